//! `lipsel`: Lipschitz selections, jet completion, explicit `C^{1,1}` and
//! Kirszbraun extensions, Hölder solutions of pointwise linear systems, and
//! their brute-force oracles — JSON in, JSON or CSV out.
//!
//! Exit codes: 0 on success, 2 when the mathematics rejects the instance
//! (a hypothesis failure naming the offending vertices, or an inconsistent
//! system naming the point), 1 on input or IO errors.

mod bench;
mod json;
mod schema;

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use lipsel_core::envelope::{extend_c11, kirszbraun_extend};
use lipsel_core::linsys::solve_holder_system;
use lipsel_core::metricspace::lipschitz_seminorm;
use lipsel_core::oracle::{finiteness_check, optimal_selection_lp, OracleReport};
use lipsel_core::selection::{select_affine_autoscale, select_cube, StageDiagnostics};
use lipsel_core::whitney::whitney_select;
use lipsel_core::{Error, Result, Tolerances};

use json::Json;
use schema::SCHEMA_VERSION;

#[derive(Parser)]
#[command(
    name = "lipsel",
    version,
    about = "Lipschitz selections of affine-set-valued maps, Whitney jet completion, \
             explicit C^{1,1}/Kirszbraun extensions, and Hölder linear-system solutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Feasibility tolerance for membership and hypothesis checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_feas: f64,

    /// KKT residual tolerance for the envelope quadratic programs.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_kkt: f64,

    /// Random seed (bench suites; all other commands are deterministic).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for the bench suites.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Lipschitz selection of affine flats over a weighted graph.
    Select { input: PathBuf },
    /// Lipschitz selection of axis-parallel cubes over a pseudometric space.
    #[command(name = "select-cube")]
    SelectCube { input: PathBuf },
    /// Complete scalar samples to a first-order jet of controlled norm.
    Whitney { input: PathBuf },
    /// Evaluate the explicit C^{1,1} extension of a jet at query points.
    #[command(name = "extend-c11")]
    ExtendC11 { input: PathBuf },
    /// Extend a vector-valued Lipschitz map with the same constant.
    Kirszbraun { input: PathBuf },
    /// Solve a pointwise linear system by a Hölder selection.
    Linsys { input: PathBuf },
    /// Brute-force ground truth: exact optima and subset enumeration.
    Oracle { input: PathBuf },
    /// Run a benchmark suite and emit CSV.
    Bench {
        /// Suite name: selection-ratio or finiteness.
        #[arg(long)]
        suite: String,
        /// Comma-separated instance counts, one block per entry.
        #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [100usize])]
        sizes: Vec<usize>,
        /// Report real wall-clock times (breaks byte-level reproducibility).
        #[arg(long)]
        timing: bool,
    },
}

enum Rendered {
    Json(Json),
    Csv(String),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let tol = Tolerances { feas: cli.tol_feas, kkt: cli.tol_kkt };
    let (name, outcome) = match &cli.command {
        Command::Select { input } => ("select", cmd_select(input, &tol)),
        Command::SelectCube { input } => ("select-cube", cmd_select_cube(input, &tol)),
        Command::Whitney { input } => ("whitney", cmd_whitney(input, &tol)),
        Command::ExtendC11 { input } => ("extend-c11", cmd_extend(input, &tol)),
        Command::Kirszbraun { input } => ("kirszbraun", cmd_kirszbraun(input, &tol)),
        Command::Linsys { input } => ("linsys", cmd_linsys(input, &tol)),
        Command::Oracle { input } => ("oracle", cmd_oracle(input)),
        Command::Bench { suite, sizes, timing } => (
            "bench",
            bench::Suite::parse(suite).and_then(|s| {
                bench::run_suite(s, cli.seed, sizes, cli.threads, *timing, &tol)
                    .map(Rendered::Csv)
            }),
        ),
    };
    match outcome {
        Ok(Rendered::Json(doc)) => emit(&cli.output, &(doc.to_string() + "\n")),
        Ok(Rendered::Csv(text)) => emit(&cli.output, &text),
        Err(e) => {
            let doc = error_doc(name, &e);
            eprintln!("lipsel {name}: {e}");
            let write_code = emit(&cli.output, &(doc.to_string() + "\n"));
            if write_code != 0 {
                write_code
            } else if e.is_mathematical() {
                2
            } else {
                1
            }
        }
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> i32 {
    match output {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("lipsel: cannot write {}: {e}", path.display());
                return 1;
            }
            0
        }
        None => {
            print!("{text}");
            0
        }
    }
}

fn parse_input<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("malformed JSON in {}: {e}", path.display())))
}

fn header(command: &str) -> Vec<(&'static str, Json)> {
    vec![
        ("schema_version", Json::Int(SCHEMA_VERSION)),
        ("command", Json::Str(command.to_string())),
    ]
}

fn error_doc(command: &str, e: &Error) -> Json {
    let mut fields = header(command);
    let kind = match e {
        Error::Input(_) => "input",
        Error::HypothesisFailure { .. } => "hypothesis-failure",
        Error::InconsistentSystem { .. } => "inconsistent-system",
        Error::Internal(_) => "internal",
    };
    let mut err = vec![
        ("kind", Json::Str(kind.to_string())),
        ("detail", Json::Str(e.to_string())),
    ];
    match e {
        Error::HypothesisFailure { stage, vertices, .. } => {
            err.push(("stage", Json::Str(stage.clone())));
            err.push((
                "vertices",
                Json::Arr(vertices.iter().map(|&v| Json::Int(v as i64)).collect()),
            ));
        }
        Error::InconsistentSystem { point, residual } => {
            err.push(("point", Json::Int(*point as i64)));
            err.push(("residual", Json::Num(*residual)));
        }
        _ => {}
    }
    fields.push(("error", Json::Obj(err)));
    Json::Obj(fields)
}

fn diagnostics_doc(d: &StageDiagnostics) -> Json {
    Json::Obj(vec![
        ("level", Json::Int(d.level as i64)),
        ("stage_c", Json::Num(d.stage_c)),
        ("lambda", Json::Num(d.lambda)),
        ("cube_radius_factor", Json::Num(d.cube_radius_factor)),
        ("faces_total", Json::Int(d.faces_total as i64)),
        ("faces_parallel", Json::Int(d.faces_parallel as i64)),
        ("isolated_vertices", Json::Int(d.isolated_vertices as i64)),
        ("sublevel_constants", Json::num_arr(&d.sublevel_constants)),
    ])
}

fn omega_doc(omega: &schema::OmegaIn) -> Json {
    let mut fields = vec![("kind", Json::Str(omega.kind.clone()))];
    if let Some(alpha) = omega.alpha {
        fields.push(("alpha", Json::Num(alpha)));
    }
    if let Some(knots) = &omega.knots {
        fields.push((
            "knots",
            Json::Arr(
                knots
                    .iter()
                    .map(|&(t, v)| Json::Arr(vec![Json::Num(t), Json::Num(v)]))
                    .collect(),
            ),
        ));
    }
    Json::Obj(fields)
}

fn cmd_select(input: &Path, tol: &Tolerances) -> Result<Rendered> {
    let doc: schema::SelectIn = parse_input(input)?;
    schema::check_version(doc.schema_version)?;
    let (space, graph, a) = doc.graph.build()?;
    let (flats, k) = doc.map.build()?;
    let sel = select_affine_autoscale(&space, &graph, &flats, a, k, tol)?;
    let mut fields = header("select");
    fields.push(("points", Json::num_mat(&sel.points)));
    fields.push(("seminorm", Json::Num(sel.seminorm)));
    fields.push(("scale", Json::Num(sel.scale)));
    fields.push(("diagnostics", diagnostics_doc(&sel.diagnostics)));
    Ok(Rendered::Json(Json::Obj(fields)))
}

fn cmd_select_cube(input: &Path, tol: &Tolerances) -> Result<Rendered> {
    let doc: schema::SelectCubeIn = parse_input(input)?;
    let (space, cubes) = doc.build()?;
    let points = select_cube(&space, &cubes, tol.feas)?;
    let mut fields = header("select-cube");
    fields.push(("points", Json::num_mat(&points)));
    fields.push(("seminorm", Json::Num(lipschitz_seminorm(&space, &points))));
    Ok(Rendered::Json(Json::Obj(fields)))
}

fn cmd_whitney(input: &Path, tol: &Tolerances) -> Result<Rendered> {
    let doc: schema::SampledIn = parse_input(input)?;
    let sf = doc.build()?;
    let report = whitney_select(&sf, tol)?;
    let mut fields = header("whitney");
    fields.push((
        "jet",
        Json::Obj(vec![
            ("X", Json::num_mat(&report.jet.points)),
            ("f", Json::num_arr(&report.jet.values)),
            ("g", Json::num_mat(&report.jet.gradients)),
            ("omega", omega_doc(&doc.omega)),
            ("omega_normalized", Json::Bool(true)),
        ]),
    ));
    fields.push(("jet_norm", Json::Num(report.jet_norm)));
    fields.push(("jet_seminorm", Json::Num(report.jet_seminorm)));
    fields.push(("selection_seminorm", Json::Num(report.selection_seminorm)));
    fields.push(("selection_sup", Json::Num(report.selection_sup)));
    fields.push(("scale", Json::Num(report.scale)));
    fields.push(("diagnostics", diagnostics_doc(&report.diagnostics)));
    Ok(Rendered::Json(Json::Obj(fields)))
}

fn cmd_extend(input: &Path, tol: &Tolerances) -> Result<Rendered> {
    let doc: schema::ExtendIn = parse_input(input)?;
    let jet = doc.build()?;
    let results = extend_c11(&jet, doc.m, &doc.queries.points, tol)?;
    let n = jet.points[0].len();
    let mut fields = header("extend-c11");
    fields.push(("m", Json::Num(doc.m)));
    fields.push(("curvature", Json::Num((n as f64).sqrt() * doc.m)));
    fields.push((
        "results",
        Json::Arr(
            results
                .iter()
                .map(|(value, gradient)| {
                    Json::Obj(vec![
                        ("value", Json::Num(*value)),
                        ("gradient", Json::num_arr(gradient)),
                    ])
                })
                .collect(),
        ),
    ));
    Ok(Rendered::Json(Json::Obj(fields)))
}

fn cmd_kirszbraun(input: &Path, tol: &Tolerances) -> Result<Rendered> {
    let doc: schema::KirszbraunIn = parse_input(input)?;
    schema::check_version(doc.schema_version)?;
    let values = kirszbraun_extend(&doc.x, &doc.f, doc.m, &doc.queries.points, tol)?;
    let mut fields = header("kirszbraun");
    fields.push(("m", Json::Num(doc.m)));
    fields.push(("values", Json::num_mat(&values)));
    Ok(Rendered::Json(Json::Obj(fields)))
}

fn cmd_linsys(input: &Path, tol: &Tolerances) -> Result<Rendered> {
    let doc: schema::SystemIn = parse_input(input)?;
    let system = doc.build()?;
    let sel = solve_holder_system(&system, tol)?;
    let mut fields = header("linsys");
    fields.push(("points", Json::num_mat(&sel.points)));
    fields.push(("seminorm", Json::Num(sel.seminorm)));
    fields.push(("scale", Json::Num(sel.scale)));
    fields.push(("diagnostics", diagnostics_doc(&sel.diagnostics)));
    Ok(Rendered::Json(Json::Obj(fields)))
}

fn oracle_doc(mode: &str, report: &OracleReport) -> Json {
    let mut fields = header("oracle");
    fields.push(("mode", Json::Str(mode.to_string())));
    fields.push(("lambda_star", Json::Num(report.lambda_star)));
    fields.push((
        "witness",
        match &report.witness {
            Some(points) => Json::num_mat(points),
            None => Json::Null,
        },
    ));
    if !report.subset_results.is_empty() {
        fields.push((
            "subsets",
            Json::Arr(
                report
                    .subset_results
                    .iter()
                    .map(|s| {
                        Json::Obj(vec![
                            (
                                "vertices",
                                Json::Arr(
                                    s.vertices.iter().map(|&v| Json::Int(v as i64)).collect(),
                                ),
                            ),
                            ("lambda", Json::Num(s.lambda)),
                        ])
                    })
                    .collect(),
            ),
        ));
    }
    Json::Obj(fields)
}

fn cmd_oracle(input: &Path) -> Result<Rendered> {
    let doc: schema::OracleIn = parse_input(input)?;
    schema::check_version(doc.schema_version)?;
    let (space, graph, _a) = doc.graph.build()?;
    let (flats, k) = doc.map.build()?;
    let mode = doc.mode.as_deref().unwrap_or("optimal");
    let report = match mode {
        "optimal" => optimal_selection_lp(&space, &flats)?,
        "finiteness" => finiteness_check(&space, &graph, &flats, k)?,
        other => {
            return Err(Error::Input(format!(
                "unknown oracle mode {other:?}; expected \"optimal\" or \"finiteness\""
            )))
        }
    };
    Ok(Rendered::Json(oracle_doc(mode, &report)))
}
