//! `ternrep`: enumerate, compare and prove equal represented sets of
//! positive definite ternary quadratic forms.
//!
//! Exit codes: 0 success, 1 mismatch or rejected certificate, 2 no proof
//! within the budget, 64 usage error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use ternrep_core::certificate::{self, CertificateError};
use ternrep_core::congruence::{parse_class_list, precedes, ResidueClass};
use ternrep_core::enumerate::{primitive_represented_set, represented_set, theta};
use ternrep_core::fixtures;
use ternrep_core::isometry::{find_transforms, is_isometric, subform_witness};
use ternrep_core::prover::{
    prove_pair, verify_table, DirectionProof, ProofError, ProofHints, ProverConfig, TableError,
};
use ternrep_core::{Mat3, QuadForm};

const EXIT_MISMATCH: u8 = 1;
const EXIT_UNPROVABLE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const DEEP_BOUND: u64 = 3_000_000;

#[derive(Parser)]
#[command(name = "ternrep", version, about = "Represented sets of positive definite ternary quadratic forms")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Node budget for each escape-matrix search.
    #[arg(long, global = true, env = "TERNREP_MAX_NODES", default_value_t = 1_000_000)]
    max_nodes: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Integers up to MAX represented by a form.
    Enum(EnumArgs),
    /// Representation counts r(n) for n up to MAX.
    Theta(FormMax),
    /// All T with T^t M_f T = d^2 M_g.
    Transforms(TransformArgs),
    /// Decide integral isometry.
    Isometric(FormPair),
    /// Find T with T^t M_g T = M_f (f is a subform of g).
    Subform(FormPair),
    /// Test whether every residue vector of g in class (d, a) is good.
    Prec(PrecArgs),
    /// Prove Q(f) = Q(g) and write a certificate.
    Prove(ProveArgs),
    /// Compare the doubled forms of a table set.
    Table(TableArgs),
    /// Certificate operations.
    #[command(subcommand)]
    Cert(CertCommand),
}

/// A form: six coefficients "a,b,c,r,s,t" or a registry name such as S4a or S4f.
fn parse_form(s: &str) -> Result<QuadForm, String> {
    let q = match fixtures::lookup(s) {
        Some(q) => q,
        None => s.parse::<QuadForm>().map_err(|_| format!("expected \"a,b,c,r,s,t\" or a form name, got {s:?}"))?,
    };
    if !q.is_positive_definite() {
        return Err(format!("{q} is not positive definite"));
    }
    Ok(q)
}

/// A comma-separated class list, kept whole so clap sees one value.
#[derive(Clone)]
struct ClassList(Vec<ResidueClass>);

fn parse_classes(s: &str) -> Result<ClassList, String> {
    parse_class_list(s).map(ClassList).map_err(|e| e.to_string())
}

#[derive(Clone, Copy)]
enum SetChoice {
    One(usize),
    All,
}

fn parse_set(s: &str) -> Result<SetChoice, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(SetChoice::All);
    }
    fixtures::parse_set_id(s).map(SetChoice::One).ok_or(format!("unknown set {s:?}; expected S1..S15 or all"))
}

#[derive(Args)]
struct FormMax {
    #[arg(long, value_parser = parse_form)]
    form: QuadForm,
    #[arg(long)]
    max: u64,
}

#[derive(Args)]
struct EnumArgs {
    #[command(flatten)]
    base: FormMax,
    /// Print representation counts instead.
    #[arg(long, conflicts_with = "primitive")]
    theta: bool,
    /// Only primitive representations.
    #[arg(long)]
    primitive: bool,
}

#[derive(Args)]
struct FormPair {
    #[arg(long, value_parser = parse_form)]
    f: QuadForm,
    #[arg(long, value_parser = parse_form)]
    g: QuadForm,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    pair: FormPair,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    d: i64,
}

#[derive(Args)]
struct PrecArgs {
    #[command(flatten)]
    pair: FormPair,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    d: i64,
    #[arg(long)]
    a: i64,
    /// Write the coset-by-coset report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ProveArgs {
    #[command(flatten)]
    pair: FormPair,
    /// Residue classes "d:a,d:a,..." for every direction without a subform.
    #[arg(long, value_parser = parse_classes)]
    classes: Option<ClassList>,
    /// Compare represented sets up to this bound.
    #[arg(long, default_value_t = 1_000_000)]
    max: u64,
    /// Compare up to 3,000,000 instead.
    #[arg(long)]
    deep: bool,
    /// Certificate path; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// S1..S15, or all.
    #[arg(long, value_parser = parse_set)]
    set: SetChoice,
    #[arg(long, default_value_t = 1_000_000)]
    max: u64,
    /// Compare up to 3,000,000 instead.
    #[arg(long)]
    deep: bool,
}

#[derive(Subcommand)]
enum CertCommand {
    /// Verify a certificate without searching.
    Check { file: PathBuf },
}

/// A failed run: exit code and a message, also rendered as JSON.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    detail: Value,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure { code, kind, message: message.into(), detail: Value::Null }
    }

    fn with(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

/// Successful output in both renderings.
struct Output {
    text: String,
    json: Value,
}

fn joined<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn run_enum(args: &EnumArgs) -> Output {
    let FormMax { form, max } = args.base;
    if args.theta {
        return run_theta(&args.base);
    }
    let set = if args.primitive { primitive_represented_set(&form, max) } else { represented_set(&form, max) };
    Output { text: joined(&set.members), json: json!({ "represented": set.members }) }
}

fn run_theta(args: &FormMax) -> Output {
    let series = theta(&args.form, args.max);
    Output { text: joined(&series.coeffs), json: json!({ "theta": series.coeffs }) }
}

fn run_transforms(args: &TransformArgs) -> Output {
    let set = find_transforms(&args.pair.f, &args.pair.g, args.d);
    let mut text = format!("COUNT: {}", set.len());
    for t in &set.matrices {
        text.push_str(&format!("\n{t}"));
    }
    Output {
        text,
        json: json!({ "count": set.len(), "matrices": set.matrices.iter().map(|t| t.0).collect::<Vec<_>>() }),
    }
}

fn found(label: &str, t: Option<Mat3>) -> Output {
    match t {
        Some(t) => {
            Output { text: format!("{label}: true {t}"), json: json!({ label.to_lowercase(): true, "matrix": t.0 }) }
        }
        None => Output { text: format!("{label}: false"), json: json!({ label.to_lowercase(): false }) },
    }
}

fn run_prec(args: &PrecArgs) -> Result<Output, Failure> {
    let cls = ResidueClass::new(args.d, args.a).map_err(|e| Failure::new(EXIT_USAGE, "usage", e.to_string()))?;
    let (ok, report, _) = precedes(&args.pair.f, &args.pair.g, cls);
    if let Some(path) = &args.report {
        write(path, &format!("{:#}\n", report.to_json()))?;
    }
    Ok(Output {
        text: format!("PRECEDES: {ok} ({} cosets, {} bad)", report.total(), report.bad.len()),
        json: json!({ "precedes": ok, "cosets": report.total(), "bad": report.bad.len() }),
    })
}

fn write(path: &PathBuf, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_USAGE, "io", format!("{}: {e}", path.display())))
}

/// Recorded hints when `(f, g)` is one of the proved table pairs.
fn hints_for(f: &QuadForm, g: &QuadForm) -> ProofHints {
    fixtures::PROVED_SETS
        .iter()
        .find(|&&s| fixtures::proved_pair(s) == Some((*f, *g)))
        .map_or_else(ProofHints::default, |&s| ProofHints::recorded(s))
}

fn describe(direction: &DirectionProof) -> (String, Value) {
    match direction {
        DirectionProof::Subform(t) => (format!("subform {t}"), json!({ "subform": t.0 })),
        DirectionProof::Cover(classes) => {
            let names: Vec<String> =
                classes.iter().map(|c| format!("{}{}", c.cls, if c.escape.is_some() { "*" } else { "" })).collect();
            (format!("classes {}", names.join(" ")), json!({ "classes": names }))
        }
    }
}

fn run_prove(args: &ProveArgs, max_nodes: u64) -> Result<Output, Failure> {
    let (f, g) = (args.pair.f, args.pair.g);
    let mut hints = hints_for(&f, &g);
    if let Some(ClassList(list)) = &args.classes {
        hints.classes_f_in_g = Some(list.clone());
        hints.classes_g_in_f = Some(list.clone());
    }
    let bound = if args.deep { DEEP_BOUND } else { args.max };
    let config = ProverConfig { max_nodes, empirical_bound: bound, ..ProverConfig::default() };
    let mismatch = |n: u64| {
        Failure::new(EXIT_MISMATCH, "mismatch", format!("represented sets differ at {n}"))
            .with(json!({ "first_difference": n }))
    };
    let proof = prove_pair(&f, &g, &hints, &config).map_err(|e| match e {
        ProofError::EmpiricalMismatch(n) => mismatch(n),
        // A failed proof of unequal forms is reported as the difference.
        other => match represented_set(&f, bound).first_difference(&represented_set(&g, bound)) {
            Some(n) => mismatch(n),
            None => {
                let detail = match &other {
                    ProofError::CoverIncomplete { modulus, uncovered } => {
                        json!({ "modulus": modulus, "uncovered": uncovered })
                    }
                    _ => Value::Null,
                };
                Failure::new(EXIT_UNPROVABLE, "unprovable", other.to_string()).with(detail)
            }
        },
    })?;
    let cert = certificate::emit(&proof).to_canonical_string();
    let (f_in_g, f_json) = describe(&proof.f_in_g);
    let (g_in_f, g_json) = describe(&proof.g_in_f);
    let mut text = format!("PROVED: Q(f) = Q(g)\nf in g: {f_in_g}\ng in f: {g_in_f}\nempirical bound: {bound}");
    let mut json = json!({ "proved": true, "f_in_g": f_json, "g_in_f": g_json, "empirical_bound": bound });
    match &args.out {
        Some(path) => {
            write(path, &cert)?;
            text.push_str(&format!("\ncertificate: {}", path.display()));
            json["certificate"] = json!(path.display().to_string());
        }
        None => {
            text.push('\n');
            text.push_str(cert.trim_end());
            json["certificate"] = serde_json::from_str(&cert).expect("canonical certificate is JSON");
        }
    }
    Ok(Output { text, json })
}

fn run_table(args: &TableArgs) -> Result<Output, Failure> {
    let bound = if args.deep { DEEP_BOUND } else { args.max };
    let sets: Vec<usize> = match args.set {
        SetChoice::One(s) => vec![s],
        SetChoice::All => (1..=fixtures::TABLE.len()).collect(),
    };
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    for s in sets {
        let r = verify_table(s, bound).map_err(|e| {
            let detail = match &e {
                TableError::MismatchAt { set, i, j, n } => json!({ "set": set, "i": i, "j": j, "first_difference": n }),
                TableError::Isometric { set, i, j } => json!({ "set": set, "i": i, "j": j }),
                TableError::UnknownSet(set) => json!({ "set": set }),
            };
            Failure::new(EXIT_MISMATCH, "mismatch", e.to_string()).with(detail)
        })?;
        lines.push(format!(
            "S{}: {} forms agree up to {} ({} represented), non-isometric",
            r.set,
            r.forms.len(),
            r.bound,
            r.represented
        ));
        rows.push(json!({ "set": r.set, "forms": r.forms.len(), "bound": r.bound, "represented": r.represented, "non_isometric": r.non_isometric }));
    }
    Ok(Output { text: lines.join("\n"), json: json!({ "sets": rows }) })
}

fn run_cert_check(file: &PathBuf) -> Result<Output, Failure> {
    let text =
        fs::read_to_string(file).map_err(|e| Failure::new(EXIT_USAGE, "io", format!("{}: {e}", file.display())))?;
    match certificate::check_str(&text) {
        Ok(_) => Ok(Output { text: "ACCEPT".into(), json: json!({ "accepted": true }) }),
        Err(CertificateError::Rejected { clause }) => {
            Err(Failure::new(EXIT_MISMATCH, "rejected", format!("REJECT at {clause}"))
                .with(json!({ "accepted": false, "clause": clause })))
        }
        Err(e @ CertificateError::Malformed(_)) => {
            Err(Failure::new(EXIT_MISMATCH, "malformed", e.to_string()).with(json!({ "accepted": false })))
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Enum(a) => Ok(run_enum(a)),
        Command::Theta(a) => Ok(run_theta(a)),
        Command::Transforms(a) => Ok(run_transforms(a)),
        Command::Isometric(p) => Ok(found("ISOMETRIC", is_isometric(&p.f, &p.g))),
        Command::Subform(p) => Ok(found("SUBFORM", subform_witness(&p.f, &p.g))),
        Command::Prec(a) => run_prec(a),
        Command::Prove(a) => run_prove(a, cli.max_nodes),
        Command::Table(a) => run_table(a),
        Command::Cert(CertCommand::Check { file }) => run_cert_check(file),
    }
}

/// Print to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_line(s: &str) {
    let _ = writeln!(io::stdout().lock(), "{s}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("ternrep: cannot set --jobs {k}: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match dispatch(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Text => print_line(&out.text),
                Format::Json => print_line(&out.json.to_string()),
            }
            ExitCode::SUCCESS
        }
        Err(fail) => {
            match cli.format {
                Format::Text => eprintln!("ternrep: {}", fail.message),
                Format::Json => print_line(
                    &json!({ "error": fail.kind, "message": fail.message, "detail": fail.detail }).to_string(),
                ),
            }
            ExitCode::from(fail.code)
        }
    }
}
