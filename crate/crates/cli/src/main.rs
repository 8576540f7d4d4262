//! Command-line front end: classification, exact evaluation, witness search,
//! census and trace tables, and the reproduction report.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wordlab::eval::evaluate;
use wordlab::factor::{homotopy_power_witness, triangular_witness, HomotopyConfig};
use wordlab::linalg::rational;
use wordlab::recurrence::{build_table, verify_induction, WordFamily};
use wordlab::search::{search_witness, transform_word, SearchConfig, SearchOutcome};
use wordlab::sign::{catalog, prove_family};
use wordlab::store::{self, StoreDocument};
use wordlab::verify::{corrupt, verify_selected, PublishedLetters, PublishedReport, CHECK_IDS};
use wordlab::word::{
    canonical_form, enumerate_classes, near_symmetric_decomposition, nearly_symmetric_census,
};
use wordlab::{classify, Classification, RationalMatrix, WitnessPair, Word};

#[derive(Parser)]
#[command(
    name = "wordlab",
    version,
    about = "Trace positivity of words in two positive definite letters"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Symmetric / nearly symmetric / neither, with the canonical class representative.
    Classify {
        #[arg(long)]
        word: String,
    },
    /// Exact trace and spectrum verdict of a word at a named pair or letters from a file.
    Eval {
        #[arg(long)]
        word: String,
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        pair: Option<String>,
        /// JSON with matrices `a` and `b` (a stored witness entry also works).
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Numerical search for a negative-trace witness, certified exactly.
    Search {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of restarts.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Merge a found witness into the store at $WORDLAB_WITNESS_STORE.
        #[arg(long)]
        save: bool,
    },
    /// Fraction of nearly symmetric words for each length up to the maximum.
    Census {
        #[arg(long, default_value_t = 12)]
        max_length: usize,
    },
    /// Equivalence classes of words with the given length and letter count.
    Classes {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        count_a: usize,
    },
    /// Trace table of `prefix A^p middle B^q` with its induction certificate.
    Table {
        #[arg(long, default_value = "AB")]
        prefix: String,
        #[arg(long, default_value = "")]
        middle: String,
        #[arg(long, default_value = "A1B1")]
        pair: String,
        #[arg(long, default_value_t = 4)]
        p_max: i64,
        #[arg(long, default_value_t = 4)]
        q_max: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Upper triangular witness for `(AB)^k (BA)^j`.
    Triangular {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        j: usize,
    },
    /// Deforms a witness toward scalar letters until `word^power` has a non-real spectrum.
    Homotopy {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 2)]
        power: usize,
        #[arg(long, default_value = "A1B1")]
        pair: String,
    },
    /// Sign-closure proofs for the single-letter extension families.
    SignFamilies {
        #[arg(long, default_value = "A1B1")]
        pair: String,
    },
    /// Recomputes every published table, witness and property check.
    VerifyPublished {
        /// Mutation run: add DELTA to entry (ROW, COL) of A1, as `ROW,COL,DELTA`.
        #[arg(long, value_name = "ROW,COL,DELTA")]
        perturb_a1: Option<String>,
        /// Run only these checks (1-12 or `table`); repeatable.
        #[arg(long = "check", value_name = "ID")]
        checks: Vec<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Fail,
    Exhausted,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
            Status::Exhausted => "exhausted",
        }
    }
}

/// Rendered output of one command; both renderings come from `payload`.
struct Outcome {
    status: Status,
    payload: Value,
    text: String,
}

type CmdResult = Result<Outcome, String>;

fn parse_word(text: &str) -> Result<Word, String> {
    text.parse()
        .map_err(|e| format!("invalid word {text:?}: {e}"))
}

fn err(e: wordlab::Error) -> String {
    e.to_string()
}

/// Built-in pairs, then the shipped store, then the user store.
fn resolve_pair(name: &str) -> Result<WitnessPair, String> {
    let (base, swapped) = match name.strip_suffix('*') {
        Some(b) => (b, true),
        None => (name, false),
    };
    let from_user = || -> Result<Option<WitnessPair>, String> {
        let path = store::default_path();
        Ok(store::load(&path)
            .map_err(|e| format!("{}: {e}", path.display()))?
            .get(base)
            .cloned())
    };
    let pair = match store::seed().get(base).cloned() {
        Some(p) => p,
        None => from_user()?.ok_or_else(|| format!("unknown pair {base:?}"))?,
    };
    Ok(if swapped { pair.interchanged() } else { pair })
}

fn letters_from_file(path: &Path) -> Result<(RationalMatrix, RationalMatrix), String> {
    #[derive(serde::Deserialize)]
    struct Letters {
        a: RationalMatrix,
        b: RationalMatrix,
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let l: Letters = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((l.a, l.b))
}

fn cmd_classify(word: &str) -> CmdResult {
    let w = parse_word(word)?;
    let class = classify(&w);
    let canonical = canonical_form(&w);
    let decomposition = near_symmetric_decomposition(&w)
        .filter(|_| class == Classification::NearlySymmetric)
        .map(|d| [d.first.to_string(), d.second.to_string()]);
    let mut text = format!("{w}: {class}\ncanonical form: {canonical}");
    if let Some([x, y]) = &decomposition {
        let _ = write!(text, "\ndecomposition: ({x}, {y})");
    }
    Ok(Outcome {
        status: Status::Ok,
        payload: json!({
            "word": w.to_string(),
            "classification": class.to_string(),
            "canonical_form": canonical.to_string(),
            "decomposition": decomposition,
        }),
        text,
    })
}

fn cmd_eval(word: &str, pair: Option<&str>, file: Option<&Path>) -> CmdResult {
    let w = parse_word(word)?;
    let (label, a, b) = match (pair, file) {
        (Some(name), _) => {
            let p = resolve_pair(name)?;
            (p.name, p.a, p.b)
        }
        (None, Some(path)) => {
            let (a, b) = letters_from_file(path)?;
            (path.display().to_string(), a, b)
        }
        (None, None) => return Err("either --pair or --file is required".into()),
    };
    let e = evaluate(&w, &a, &b).map_err(err)?;
    let trace = rational::format(&e.trace);
    let charpoly = e.charpoly.to_string();
    let text = format!(
        "{w} at {label}\ntrace: {trace}\nverdict: {}\ncharacteristic polynomial: {charpoly}",
        e.verdict
    );
    Ok(Outcome {
        status: Status::Ok,
        payload: json!({
            "word": w.to_string(),
            "letters": label,
            "trace": trace,
            "verdict": e.verdict.to_string(),
            "charpoly": charpoly,
        }),
        text,
    })
}

fn cmd_search(word: &str, seed: u64, budget: usize, save: bool) -> CmdResult {
    let w = parse_word(word)?;
    let cfg = SearchConfig {
        seed,
        restarts: budget,
        ..SearchConfig::default()
    };
    let expression = transform_word(&w).to_string();
    match search_witness(&w, &cfg).map_err(err)? {
        SearchOutcome::Found { witness, restart, float_trace, denominator_bound } => {
            let mut saved = Value::Null;
            if save {
                let path = store::default_path();
                let mut doc = StoreDocument::empty();
                doc.upsert(witness.clone()).map_err(err)?;
                store::save_merged(&path, &doc).map_err(|e| format!("{}: {e}", path.display()))?;
                saved = json!(path.display().to_string());
            }
            let trace = rational::format(&witness.trace);
            let mut text = format!(
                "{w} -> {expression}\nwitness {} found at restart {restart} (seed {seed})\n\
                 float trace {float_trace:e}, denominators up to {denominator_bound}\nexact trace: {trace}\nA =\n{}\nB =\n{}",
                witness.name, witness.a, witness.b
            );
            if let Value::String(p) = &saved {
                let _ = write!(text, "\nsaved to {p}");
            }
            Ok(Outcome {
                status: Status::Ok,
                payload: json!({
                    "word": w.to_string(),
                    "expression": expression,
                    "seed": seed,
                    "restart": restart,
                    "float_trace": float_trace,
                    "denominator_bound": denominator_bound,
                    "witness": witness,
                    "saved_to": saved,
                }),
                text,
            })
        }
        SearchOutcome::Exhausted { restarts, rejected } => Ok(Outcome {
            status: Status::Exhausted,
            payload: json!({
                "word": w.to_string(),
                "expression": expression,
                "seed": seed,
                "restarts": restarts,
                "rejected": rejected,
            }),
            text: format!(
                "{w} -> {expression}\nbudget exhausted: no certified witness in {restarts} restarts (seed {seed}); \
                 this is inconclusive"
            ),
        }),
    }
}

fn cmd_census(max_length: usize) -> CmdResult {
    let rows = nearly_symmetric_census(max_length).map_err(err)?;
    let mut text = String::from("L\ttotal\tnearly symmetric\tdensity");
    for r in &rows {
        let _ = write!(
            text,
            "\n{}\t{}\t{}\t{:.6}",
            r.length, r.total, r.nearly_symmetric, r.density
        );
    }
    Ok(Outcome {
        status: Status::Ok,
        payload: json!({ "rows": rows }),
        text,
    })
}

fn cmd_classes(length: usize, count_a: usize) -> CmdResult {
    let classes = enumerate_classes(length, count_a);
    let rows: Vec<Value> = classes
        .iter()
        .map(|o| {
            json!({
                "representative": o.representative.to_string(),
                "classification": classify(&o.representative).to_string(),
                "size": o.len(),
            })
        })
        .collect();
    let mut text = format!(
        "{} classes of length {length} with {count_a} A's",
        classes.len()
    );
    for o in &classes {
        let _ = write!(
            text,
            "\n{}\t{}\t{} words",
            o.representative,
            classify(&o.representative),
            o.len()
        );
    }
    Ok(Outcome {
        status: Status::Ok,
        payload: json!({ "length": length, "count_a": count_a, "classes": rows }),
        text,
    })
}

fn cmd_table(
    prefix: &str,
    middle: &str,
    pair: &str,
    p_max: i64,
    q_max: i64,
    seed: u64,
) -> CmdResult {
    let family = WordFamily::parse(prefix, middle).map_err(err)?;
    let letters = resolve_pair(pair)?;
    let table = build_table(&family, &letters.a, &letters.b, p_max, q_max, seed).map_err(err)?;
    let induction = verify_induction(&table);
    let spot_ok = table.spot_checks_agree();
    let mut text = format!("{family} at {}\n{}", letters.name, table.to_text());
    let _ = write!(
        text,
        "\nspot checks: {} of {} agree with direct evaluation",
        table.spot_checks.iter().filter(|s| s.agrees).count(),
        table.spot_checks.len()
    );
    match &induction {
        Ok(c) => {
            let _ = write!(
                text,
                "\ninduction base conditions hold ({} inequalities)",
                c.checked.len()
            );
        }
        Err(v) => {
            let _ = write!(text, "\ninduction base conditions fail: {v}");
        }
    }
    let status = if spot_ok && induction.is_ok() {
        Status::Ok
    } else {
        Status::Fail
    };
    Ok(Outcome {
        status,
        payload: json!({
            "family": family.to_string(),
            "pair": letters.name,
            "table": table,
            "induction": match &induction {
                Ok(c) => json!({ "holds": true, "certificate": c }),
                Err(v) => json!({ "holds": false, "violation": v }),
            },
        }),
        text,
    })
}

fn cmd_triangular(k: usize, j: usize) -> CmdResult {
    let t = triangular_witness(k, j).map_err(err)?;
    let pair = t.letter_pair().map_err(err)?;
    let text = format!(
        "T =\n{}\ntrace of T^{k} (T^T)^{j}: {}\nletters with AB = T certify {}:\nA =\n{}\nB =\n{}\ntrace: {}",
        t.t,
        rational::format(&t.trace),
        pair.word,
        pair.a,
        pair.b,
        rational::format(&pair.trace)
    );
    Ok(Outcome {
        status: Status::Ok,
        payload: json!({ "triangular": t, "witness": pair }),
        text,
    })
}

fn cmd_homotopy(word: &str, power: usize, pair: &str) -> CmdResult {
    let w = parse_word(word)?;
    let letters = resolve_pair(pair)?;
    let scan =
        homotopy_power_witness(&w, power, &letters, &HomotopyConfig::default()).map_err(err)?;
    let text = format!(
        "{w} at {} deformed to t* = {} (grid level {})\nsmallest non-real argument {:.6} < pi/{power}\n\
         exact characteristic polynomial of ({w})^{power} has {} non-real roots\nA(t*) =\n{}\nB(t*) =\n{}",
        letters.name,
        rational::format(&scan.t_star),
        scan.level,
        scan.theta,
        scan.exact_nonreal_roots,
        scan.a,
        scan.b
    );
    let payload = json!({
        "word": w.to_string(),
        "power": power,
        "pair": letters.name,
        "t_star": rational::format(&scan.t_star),
        "level": scan.level,
        "theta": scan.theta,
        "exact_nonreal_roots": scan.exact_nonreal_roots,
        "a": scan.a,
        "b": scan.b,
    });
    Ok(Outcome {
        status: Status::Ok,
        payload,
        text,
    })
}

fn cmd_sign_families(pair: &str) -> CmdResult {
    let letters = resolve_pair(pair)?;
    let mut proofs = Vec::new();
    let mut text = String::new();
    let mut status = Status::Ok;
    for family in catalog() {
        match prove_family(&family, &letters) {
            Some(p) => {
                let _ = writeln!(
                    text,
                    "({}) {}: base {} with pattern {} closes under {}",
                    family.label,
                    family.indexing,
                    p.base,
                    p.closure_pattern.rows().join(" "),
                    p.letter.as_char()
                );
                proofs.push(json!(p));
            }
            None => {
                status = Status::Fail;
                let _ = writeln!(
                    text,
                    "({}) {}: no proof at {}",
                    family.label, family.indexing, letters.name
                );
                proofs.push(json!({ "label": family.label, "proof": null }));
            }
        }
    }
    Ok(Outcome {
        status,
        payload: json!({ "pair": letters.name, "proofs": proofs }),
        text: text.trim_end().into(),
    })
}

fn render_report(r: &PublishedReport) -> String {
    let mut text = String::new();
    for c in &r.checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "[{mark}] {:>5}  {} ({} ms)", c.id, c.title, c.millis);
        for m in &c.mismatches {
            let _ = writeln!(
                text,
                "        {}: expected {}, computed {}",
                m.item, m.expected, m.computed
            );
        }
        for n in &c.notes {
            let _ = writeln!(text, "        note: {n}");
        }
    }
    if !r.table.is_empty() {
        let _ = writeln!(
            text,
            "\nword classes of length < 11 that are not nearly symmetric:"
        );
    }
    for row in &r.table {
        let state = if row.certified {
            "certified"
        } else {
            "UNCERTIFIED"
        };
        let _ = writeln!(
            text,
            "{:<11} {:<26} {state}: {}",
            row.word.to_string(),
            row.method,
            row.route
        );
        if let Some(t) = &row.trace {
            let _ = writeln!(text, "{:<11} trace {t}", "");
        }
    }
    let failed: Vec<&str> = r.failures().map(|c| c.id.as_str()).collect();
    let _ = write!(
        text,
        "\n{} of {} checks passed",
        r.checks.len() - failed.len(),
        r.checks.len()
    );
    if !failed.is_empty() {
        let _ = write!(text, "; failed: {}", failed.join(", "));
    }
    let _ = write!(text, " ({} ms)", r.millis);
    text
}

fn cmd_verify_published(perturb: Option<&str>, checks: &[String]) -> CmdResult {
    if let Some(bad) = checks.iter().find(|c| !CHECK_IDS.contains(&c.as_str())) {
        return Err(format!(
            "unknown check {bad:?}; expected one of {}",
            CHECK_IDS.join(", ")
        ));
    }
    let mut letters = PublishedLetters::default();
    if let Some(spec) = perturb {
        let parts: Vec<i64> = spec
            .split(',')
            .map(|s| s.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("--perturb-a1 {spec:?}: {e}"))?;
        let [row, col, delta] = parts[..] else {
            return Err(format!("--perturb-a1 expects ROW,COL,DELTA, got {spec:?}"));
        };
        if row < 0 || col < 0 {
            return Err("--perturb-a1 indices must be nonnegative".into());
        }
        letters.a1 = corrupt(&letters.a1, row as usize, col as usize, delta).map_err(err)?;
    }
    // The table's search witnesses come from the shipped store only.
    let report = verify_selected(&letters, &store::seed(), |id| {
        checks.is_empty() || checks.iter().any(|c| c == id)
    });
    let status = if report.passed() {
        Status::Ok
    } else {
        Status::Fail
    };
    let text = render_report(&report);
    Ok(Outcome {
        status,
        payload: json!(report),
        text,
    })
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Classify { word } => cmd_classify(word),
        Command::Eval { word, pair, file } => cmd_eval(word, pair.as_deref(), file.as_deref()),
        Command::Search {
            word,
            seed,
            budget,
            save,
        } => cmd_search(word, *seed, *budget, *save),
        Command::Census { max_length } => cmd_census(*max_length),
        Command::Classes { length, count_a } => cmd_classes(*length, *count_a),
        Command::Table {
            prefix,
            middle,
            pair,
            p_max,
            q_max,
            seed,
        } => cmd_table(prefix, middle, pair, *p_max, *q_max, *seed),
        Command::Triangular { k, j } => cmd_triangular(*k, *j),
        Command::Homotopy { word, power, pair } => cmd_homotopy(word, *power, pair),
        Command::SignFamilies { pair } => cmd_sign_families(pair),
        Command::VerifyPublished { perturb_a1, checks } => {
            cmd_verify_published(perturb_a1.as_deref(), checks)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (status, body) = match run(&cli) {
        Ok(o) => {
            let body = match cli.format {
                Format::Machine => {
                    json!({ "status": o.status.as_str(), "payload": o.payload }).to_string()
                }
                Format::Text => o.text,
            };
            (o.status.as_str(), body)
        }
        Err(message) => {
            let body = match cli.format {
                Format::Machine => json!({ "status": "error", "error": message }).to_string(),
                Format::Text => format!("error: {message}"),
            };
            ("error", body)
        }
    };
    // A closed pipe downstream is not a command failure.
    match status {
        "ok" => {
            let _ = writeln!(std::io::stdout(), "{body}");
            ExitCode::SUCCESS
        }
        "error" => {
            let _ = writeln!(std::io::stderr(), "{body}");
            ExitCode::from(2)
        }
        _ => {
            let _ = writeln!(std::io::stdout(), "{body}");
            ExitCode::from(1)
        }
    }
}
