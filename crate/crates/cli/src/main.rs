mod report;
mod reproduce;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use sepdisc::bounds::{
    check_corollary1, check_corollary2, verify_qsep_certificate, verify_theorem3, verify_theorem4, Outcome,
    TheoremId, TheoremReport, VerifyOptions, DEFAULT_VERIFY_RESTARTS,
};
use sepdisc::cones::SearchOptions;
use sepdisc::discrimination::{solve_pg_iterative, SolverOptions};
use sepdisc::ensembles::{auto_lambda, construct_n_state, construct_two_state, example1, example2, example3, ConstructOptions, Ensemble, Measurement};
use sepdisc::HermitianOperator;

use report::{rows_table, RunReport, Timing};

const EXIT_NOT_HOLDS: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(name = "sepdisc", version, about = "Minimum-error discrimination and separable-measurement bounds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for all randomised searches
    #[arg(long, global = true, env = "SEPDISC_SEED", default_value_t = 0)]
    seed: u64,
    /// Restarts per block-positivity search [default: 64]
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Override every numerical tolerance (searches, certificates, solver)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Iteration budget of the fixed-point solver [default: 5000]
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include wall-clock timing in the report
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an example ensemble (and its measurement) as JSON
    Gen {
        example: Example,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        m: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        d: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Estimate the optimal success probability with the fixed-point solver
    Solve {
        #[arg(long)]
        ensemble: PathBuf,
    },
    /// Check one of the duality results on an ensemble
    Verify {
        #[arg(long)]
        theorem: Theorem,
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        measurement: Option<PathBuf>,
        /// Dual operator
        #[arg(long = "H", visible_alias = "h")]
        h: Option<PathBuf>,
        /// Index of the guessed state (0-based)
        #[arg(long, default_value_t = 0)]
        pivot: usize,
        /// Candidate dual optimum for theorem 4 [default: Tr H]
        #[arg(long)]
        q: Option<f64>,
    },
    /// Build an ensemble with a certified gap from entanglement witnesses
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Recompute the closed-form values of the example families
    Reproduce {
        scope: Scope,
        #[arg(long, num_args = 1.., value_parser = parse_pair, default_values = ["2,2", "3,2", "2,3"])]
        pairs: Vec<(usize, usize)>,
    },
}

#[derive(Subcommand, Debug)]
enum ConstructKind {
    /// Two states from a witness W and a PSD operator P with P + W PSD
    TwoState {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long = "p", visible_alias = "P")]
        p: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// The maximally mixed state plus one state per witness
    NState {
        #[arg(long, num_args = 1.., required = true)]
        witness: Vec<PathBuf>,
        /// One per witness; defaults to 1/λ_max(W_i) for each
        #[arg(long, num_args = 1..)]
        lambda: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Example {
    Example1,
    Example2,
    Example3,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Theorem {
    #[value(name = "1")]
    T1,
    #[value(name = "2")]
    T2,
    #[value(name = "3")]
    T3,
    #[value(name = "4")]
    T4,
    #[value(name = "c1")]
    C1,
    #[value(name = "c2")]
    C2,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Scope {
    All,
    Example1,
    Example2,
    Example3,
    Constructions,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (m, d) = s.split_once(',').ok_or_else(|| format!("expected M,D, got {s:?}"))?;
    let m: usize = m.trim().parse().map_err(|e| format!("bad m in {s:?}: {e}"))?;
    let d: usize = d.trim().parse().map_err(|e| format!("bad d in {s:?}: {e}"))?;
    if m < 2 || d < 2 {
        return Err(format!("m and d must be at least 2, got {s:?}"));
    }
    Ok((m, d))
}

/// Tolerances and budgets after applying the global flags.
pub struct Settings {
    pub search: SearchOptions,
    pub solver: SolverOptions,
    pub certificate_tol: f64,
}

impl Settings {
    fn from_global(g: &Global) -> Self {
        let mut search = SearchOptions::default()
            .with_restarts(g.restarts.unwrap_or(DEFAULT_VERIFY_RESTARTS))
            .with_seed(g.seed);
        let mut solver = SolverOptions::default();
        let mut certificate_tol = VerifyOptions::default().tol;
        if let Some(tol) = g.tol {
            search.tol = tol;
            solver.tol = tol;
            certificate_tol = tol;
        }
        if let Some(n) = g.max_iters {
            solver.max_iters = n;
        }
        Self { search, solver, certificate_tol }
    }

    pub fn verify(&self) -> VerifyOptions {
        VerifyOptions { search: self.search, tol: self.certificate_tol, solver: Some(self.solver) }
    }

    pub fn verify_without_solver(&self) -> VerifyOptions {
        VerifyOptions { solver: None, ..self.verify() }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Json(PathBuf, serde_json::Error),
    Domain(sepdisc::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Json(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<sepdisc::Error> for CliError {
    fn from(e: sepdisc::Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(..) => EXIT_IO,
            CliError::Json(..) | CliError::Domain(_) => EXIT_DATA,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(path.into(), e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Json(path.into(), e))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io(path.into(), e))
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialise")
}

/// What a command hands back for rendering.
struct Output {
    inputs: Value,
    outputs: Value,
    table: String,
    exit: u8,
}

fn outcome_exit(report: &TheoremReport) -> u8 {
    match report.outcome() {
        Outcome::Holds => 0,
        Outcome::NotHolds => EXIT_NOT_HOLDS,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn theorem_table(r: &TheoremReport) -> String {
    let mut lines = vec![
        format!("theorem        {}", to_value(&r.theorem).as_str().unwrap_or("?")),
        format!("holds          {}", r.holds),
        format!("certified      {}", r.certified),
        format!("gap certified  {}", r.gap_certified),
    ];
    if let Some(p) = r.p_sep_value {
        lines.push(format!("p_SEP          {p:.9}"));
    }
    if let Some(p) = r.details.p_g_estimate {
        lines.push(format!("p_G estimate   {p:.9}"));
    }
    for d in &r.details.defects {
        lines.push(format!("witness {:<6} defect {:.9}", d.index, d.value));
    }
    for note in &r.details.notes {
        lines.push(format!("note: {note}"));
    }
    lines.join("\n") + "\n"
}

fn cmd_gen(example: Example, m: usize, d: usize, out: &Path) -> CliResult<Output> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(out.into(), e))?;
    let (ensemble, measurement, dual) = match example {
        Example::Example1 => {
            let (e, meas) = example1(m, d)?;
            (e, Some(meas), None)
        }
        Example::Example2 => {
            let (e, meas) = example2(m, d)?;
            let h = e.average();
            (e, Some(meas), Some(h))
        }
        Example::Example3 => (example3(m, d)?, None, None),
    };
    let mut files = Vec::new();
    let path = out.join("ensemble.json");
    write_json(&path, &ensemble)?;
    files.push(path);
    if let Some(meas) = &measurement {
        let path = out.join("measurement.json");
        write_json(&path, meas)?;
        files.push(path);
    }
    if let Some(h) = &dual {
        let path = out.join("h.json");
        write_json(&path, h)?;
        files.push(path);
    }
    let files: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    let table = format!(
        "{} states, {} measurement elements\n{}\n",
        ensemble.len(),
        measurement.as_ref().map_or(0, Measurement::len),
        files.join("\n")
    );
    Ok(Output {
        inputs: json!({ "example": example, "m": m, "d": d, "out": out.display().to_string() }),
        outputs: json!({
            "files": files,
            "states": ensemble.len(),
            "measurement_elements": measurement.as_ref().map(Measurement::len),
        }),
        table,
        exit: 0,
    })
}

fn cmd_solve(path: &Path, s: &Settings) -> CliResult<Output> {
    let ensemble: Ensemble = read_json(path)?;
    let r = solve_pg_iterative(&ensemble, &s.solver)?;
    let table = format!(
        "p_G estimate   {:.9}\nconverged      {}\niterations     {}\nworst residual {:.3e}\n",
        r.p_value,
        r.converged,
        r.iterations,
        r.worst_residual()
    );
    Ok(Output {
        inputs: json!({ "ensemble": path.display().to_string(), "max_iters": s.solver.max_iters, "tol": s.solver.tol }),
        outputs: to_value(&r),
        table,
        exit: 0,
    })
}

fn require<'a>(value: &'a Option<PathBuf>, flag: &str, theorem: &str) -> CliResult<&'a PathBuf> {
    value.as_ref().ok_or_else(|| CliError::Usage(format!("theorem {theorem} requires {flag}")))
}

fn cmd_verify(
    theorem: Theorem,
    ensemble_path: &Path,
    measurement: &Option<PathBuf>,
    h: &Option<PathBuf>,
    pivot: usize,
    q: Option<f64>,
    s: &Settings,
) -> CliResult<Output> {
    let ensemble: Ensemble = read_json(ensemble_path)?;
    let mut inputs = json!({
        "ensemble": ensemble_path.display().to_string(),
        "seed": s.search.seed,
        "restarts": s.search.restarts,
    });
    let report = match theorem {
        Theorem::T1 | Theorem::T2 => {
            let label = if matches!(theorem, Theorem::T1) { "1" } else { "2" };
            let mp = require(measurement, "--measurement", label)?;
            let hp = require(h, "--H", label)?;
            inputs["measurement"] = json!(mp.display().to_string());
            inputs["H"] = json!(hp.display().to_string());
            let meas: Measurement = read_json(mp)?;
            let h: HermitianOperator = read_json(hp)?;
            let mut r = verify_qsep_certificate(&ensemble, &meas, &h, &s.verify())?;
            if matches!(theorem, Theorem::T1) {
                r.theorem = TheoremId::StrongDuality;
            }
            r
        }
        Theorem::T3 => {
            let mp = require(measurement, "--measurement", "3")?;
            inputs["measurement"] = json!(mp.display().to_string());
            let meas: Measurement = read_json(mp)?;
            verify_theorem3(&ensemble, &meas, &s.verify())?
        }
        Theorem::T4 => {
            let hp = require(h, "--H", "4")?;
            let h: HermitianOperator = read_json(hp)?;
            let q = q.unwrap_or_else(|| h.trace());
            inputs["H"] = json!(hp.display().to_string());
            inputs["q"] = json!(q);
            verify_theorem4(&ensemble, &h, q, &s.verify())?
        }
        Theorem::C1 => {
            inputs["pivot"] = json!(pivot);
            check_corollary1(&ensemble, pivot, &s.search)?
        }
        Theorem::C2 => {
            inputs["pivot"] = json!(pivot);
            check_corollary2(&ensemble, pivot, &s.search)?
        }
    };
    Ok(Output { inputs, table: theorem_table(&report), exit: outcome_exit(&report), outputs: to_value(&report) })
}

fn cmd_construct(kind: &ConstructKind, s: &Settings) -> CliResult<Output> {
    let opts = ConstructOptions { search: s.search, skip_witness_check: false };
    let (ensemble, out, inputs) = match kind {
        ConstructKind::TwoState { witness, p, out } => {
            let w: HermitianOperator = read_json(witness)?;
            let pp: HermitianOperator = read_json(p)?;
            let e = construct_two_state(&w, &pp, &opts)?;
            let inputs = json!({ "kind": "two-state", "witness": witness.display().to_string(), "p": p.display().to_string() });
            (e, out, inputs)
        }
        ConstructKind::NState { witness, lambda, out } => {
            let ws = witness.iter().map(|p| read_json::<HermitianOperator>(p)).collect::<CliResult<Vec<_>>>()?;
            let lambdas = if lambda.is_empty() {
                ws.iter().map(auto_lambda).collect::<sepdisc::Result<Vec<_>>>()?
            } else {
                lambda.clone()
            };
            let e = construct_n_state(&ws, &lambdas, &opts)?;
            let paths: Vec<String> = witness.iter().map(|p| p.display().to_string()).collect();
            (e, out, json!({ "kind": "n-state", "witnesses": paths, "lambdas": lambdas }))
        }
    };
    write_json(out, &ensemble)?;
    let report = check_corollary2(&ensemble, 0, &s.search)?;
    let mut inputs = inputs;
    inputs["seed"] = json!(s.search.seed);
    inputs["restarts"] = json!(s.search.restarts);
    let table = format!(
        "wrote {} ({} states, priors {:?})\n{}",
        out.display(),
        ensemble.len(),
        ensemble.priors(),
        theorem_table(&report)
    );
    Ok(Output {
        inputs,
        outputs: json!({ "ensemble": out.display().to_string(), "priors": ensemble.priors(), "report": report }),
        table,
        exit: outcome_exit(&report),
    })
}

fn cmd_reproduce(scope: Scope, pairs: &[(usize, usize)], s: &Settings) -> CliResult<Output> {
    type RowsFn = fn(usize, usize, &Settings) -> sepdisc::Result<Vec<report::Row>>;
    let sections: Vec<RowsFn> = match scope {
        Scope::All => vec![
            reproduce::example1_rows,
            reproduce::example2_rows,
            reproduce::example3_rows,
            reproduce::construction_rows,
        ],
        Scope::Example1 => vec![reproduce::example1_rows],
        Scope::Example2 => vec![reproduce::example2_rows],
        Scope::Example3 => vec![reproduce::example3_rows],
        Scope::Constructions => vec![reproduce::construction_rows],
    };
    let mut rows = Vec::new();
    for section in sections {
        for &(m, d) in pairs {
            rows.extend(section(m, d, s)?);
        }
    }
    let passed = rows.iter().all(|r| r.pass);
    Ok(Output {
        inputs: json!({
            "scope": scope,
            "pairs": pairs,
            "seed": s.search.seed,
            "restarts": s.search.restarts,
            "max_iters": s.solver.max_iters,
        }),
        table: rows_table(&rows),
        outputs: json!({ "passed": passed, "rows": rows }),
        exit: if passed { 0 } else { EXIT_NOT_HOLDS },
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gen { .. } => "gen",
        Command::Solve { .. } => "solve",
        Command::Verify { .. } => "verify",
        Command::Construct { .. } => "construct",
        Command::Reproduce { .. } => "reproduce",
    }
}

fn run(cli: &Cli) -> CliResult<Output> {
    let s = Settings::from_global(&cli.global);
    match &cli.command {
        Command::Gen { example, m, d, out } => cmd_gen(*example, *m as usize, *d as usize, out),
        Command::Solve { ensemble } => cmd_solve(ensemble, &s),
        Command::Verify { theorem, ensemble, measurement, h, pivot, q } => {
            cmd_verify(*theorem, ensemble, measurement, h, *pivot, *q, &s)
        }
        Command::Construct { kind } => cmd_construct(kind, &s),
        Command::Reproduce { scope, pairs } => cmd_reproduce(*scope, pairs, &s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match cli.global.format {
        Format::Table => print!("{}", output.table),
        Format::Json => {
            let report = RunReport {
                command: command_name(&cli.command).into(),
                argv: std::env::args().skip(1).collect(),
                inputs: output.inputs,
                outputs: output.outputs,
                tool_version: env!("CARGO_PKG_VERSION"),
                timing: cli.global.timing.then(|| Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 }),
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
        }
    }
    ExitCode::from(output.exit)
}
