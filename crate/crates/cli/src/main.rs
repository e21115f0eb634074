mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use wso_rk::catalog::{self, CatalogError};
use wso_rk::conditions::DEFAULT_ORDER_CAP;
use wso_rk::construct::{construct_minimal, parallel_iterated, MinimalStageDocument};
use wso_rk::exact::parse_rational;
use wso_rk::experiments::{
    advection_problem, run_convergence, ConvergenceConfig, Precision, ProblemKind, StepFit,
    StepPath, System,
};
use wso_rk::tableau::{parse_tableau, Tableau};
use wso_rk::timestep::{gark_coefficients, integrate, ErkMethod, StepPolicy};
use wso_rk::SPEC_VERSION;

#[derive(Parser)]
#[command(name = "wso-rk", version, about = "Explicit Runge-Kutta methods with high weak stage order")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in methods.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Check order, weak stage order and structure of a method.
    Verify {
        /// Catalog name or path to a tableau JSON file.
        method: String,
        /// Report coefficients as exact rationals and list failing trees.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        max_order: usize,
    },
    /// Print a built-in method as tableau JSON.
    Export { method: String },
    /// Build a new method.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Grid-refinement study on a semi-discrete test problem; CSV on stdout.
    Converge {
        #[arg(long)]
        method: String,
        #[arg(long, value_parser = parse_problem)]
        problem: ProblemKind,
        #[arg(long, default_value_t = 0.9)]
        cfl: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 200, 400, 800])]
        grids: Vec<usize>,
        /// Defaults to 0.7 for advection and 0.8 for Burgers.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, value_parser = parse_precision, default_value = "binary64")]
        precision: Precision,
        #[arg(long, value_enum, default_value_t = FitArg::Equal)]
        step_fit: FitArg,
        /// Advance the linear problem through its reduced GARK form.
        #[arg(long)]
        gark: bool,
    },
    /// Compare the reduced GARK step with the direct step on advection.
    GarkCheck {
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 0.9)]
        cfl: f64,
        #[arg(long, default_value_t = 1e-11)]
        tolerance: f64,
    },
}

#[derive(Subcommand)]
enum ConstructKind {
    /// Minimal-stage method from free blocks and abscissas.
    Minimal {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Parallel-iterated method from a basic collocation method.
    Iterated {
        #[arg(long)]
        p: usize,
        /// Comma-separated basic abscissas, e.g. `0,1/2,1`.
        #[arg(long, value_delimiter = ',')]
        abscissae: Vec<String>,
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FitArg {
    Equal,
    Shortened,
}

fn parse_problem(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: wso_rk::experiments::ExperimentError| e.to_string())
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|e: wso_rk::experiments::ExperimentError| e.to_string())
}

/// Failure modes, mapped onto exit codes.
enum Failure {
    /// A check ran and did not pass.
    Check(String),
    /// Bad input: unknown method, unreadable file, invalid arguments.
    Usage(String),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn load_method(target: &str) -> Result<Tableau, Failure> {
    let path = Path::new(target);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{target}: {e}")))?;
        return parse_tableau(&text).map_err(|e| Failure::usage(format!("{target}: {e}")));
    }
    catalog::resolve(target).map_err(|CatalogError::Unknown { name, available }| {
        Failure::Usage(format!("unknown method {name:?}\navailable methods:\n  {}", available.join("\n  ")))
    })
}

fn list(as_json: bool) {
    let rows = catalog::list();
    if as_json {
        print_json(&json!({ "spec_version": SPEC_VERSION, "methods": rows }));
        return;
    }
    println!("{:<15} {:>2} {:>2} {:>2} {:>10} {:>8}  source", "method", "s", "p", "q", "A(p+1)", "D");
    for r in rows {
        println!(
            "{:<15} {:>2} {:>2} {:>2} {:>10.3e} {:>8.3}  {}",
            r.name, r.stages, r.order, r.wso, r.principal_error, r.d, r.source
        );
    }
}

fn verify(target: &str, exact: bool, max_order: usize) -> Result<(), Failure> {
    let t = load_method(target)?;
    let v = report::verify(&t, max_order, exact).map_err(Failure::usage)?;
    print_json(&v.document);
    if v.passed {
        Ok(())
    } else {
        Err(Failure::Check(format!("{}: verification failed", t.name())))
    }
}

fn export(target: &str) -> Result<(), Failure> {
    println!("{}", load_method(target)?.to_json());
    Ok(())
}

fn construct(kind: ConstructKind) -> Result<(), Failure> {
    let doc = match kind {
        ConstructKind::Minimal { spec } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| Failure::usage(format!("{}: {e}", spec.display())))?;
            let input: MinimalStageDocument = serde_json::from_str(&text).map_err(Failure::usage)?;
            let name = input.name.clone();
            let input = input.into_input().map_err(Failure::usage)?;
            let mut r = construct_minimal(&input).map_err(Failure::usage)?;
            if let Some(name) = name {
                r.tableau = r.tableau.renamed(&name);
            }
            let extra = json!({ "L": report::matrix(&r.l), "beta": report::vector(&r.beta) });
            report::constructed(&r.tableau, extra).map_err(Failure::usage)?
        }
        ConstructKind::Iterated { p, abscissae, name } => {
            let nodes = abscissae
                .iter()
                .map(|a| parse_rational(a.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::usage)?;
            let mut t = parallel_iterated(p, &nodes).map_err(Failure::usage)?;
            if let Some(name) = name {
                t = t.renamed(&name);
            }
            report::constructed(&t, json!({})).map_err(Failure::usage)?
        }
    };
    let ok = doc["verification"]["audit_ok"].as_bool() == Some(true);
    print_json(&doc);
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("constructed method fails the structure audit".into()))
    }
}

#[allow(clippy::too_many_arguments)]
fn converge(
    method: &str,
    problem: ProblemKind,
    cfl: f64,
    grids: Vec<usize>,
    t_end: Option<f64>,
    precision: Precision,
    step_fit: FitArg,
    gark: bool,
) -> Result<(), Failure> {
    let t = load_method(method)?;
    let mut config = ConvergenceConfig::new(problem, cfl, grids);
    if let Some(t_end) = t_end {
        config.t_end = t_end;
    }
    config.precision = precision;
    config.step_fit = match step_fit {
        FitArg::Equal => StepFit::Equal,
        FitArg::Shortened => StepFit::Shortened,
    };
    if gark {
        config.path = StepPath::Gark;
    }
    let result = run_convergence(&t, &config).map_err(Failure::usage)?;
    print!("{}", result.to_csv());
    Ok(())
}

fn gark_check(method: &str, n: usize, steps: usize, cfl: f64, tolerance: f64) -> Result<(), Failure> {
    let t = load_method(method)?;
    let p = advection_problem::<f64>(n).map_err(Failure::usage)?;
    let System::Linear(ivp) = &p.system else {
        unreachable!("advection is linear")
    };
    let t_end = steps as f64 * cfl * p.dx;
    let y0 = p.initial_state();
    let policy = StepPolicy::Count(steps);
    ivp.reset_applications();
    let direct = integrate(&ErkMethod::new(&t), ivp, &y0, 0.0, t_end, policy).map_err(Failure::usage)?;
    let direct_apps = ivp.applications();
    ivp.reset_applications();
    let scheme = gark_coefficients(&t).map_err(Failure::usage)?;
    let reduced = integrate(&scheme, ivp, &y0, 0.0, t_end, policy).map_err(Failure::usage)?;
    let gark_apps = ivp.applications();
    let scale = direct.y.iter().map(|v| v.abs()).fold(f64::MIN_POSITIVE, f64::max);
    let dev = direct.y.iter().zip(&reduced.y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
    let ok = dev <= tolerance && gark_apps == steps * scheme.d;
    print_json(&json!({
        "spec_version": SPEC_VERSION,
        "method": t.name(),
        "n": n,
        "steps": steps,
        "dt": direct.dt,
        "dim_Y": scheme.d,
        "max_rel_dev": dev,
        "L_applications_gark": gark_apps,
        "L_applications_direct": direct_apps,
        "passed": ok,
    }));
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(format!("{}: reduced form deviates by {dev:e}", t.name())))
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("WSO_RK_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("WSO_RK_THREADS must be a count, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(Failure::usage)
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::List { json } => {
            list(json);
            Ok(())
        }
        Command::Verify { method, exact, max_order } => verify(&method, exact, max_order),
        Command::Export { method } => export(&method),
        Command::Construct { kind } => construct(kind),
        Command::Converge { method, problem, cfl, grids, t_end, precision, step_fit, gark } => {
            converge(&method, problem, cfl, grids, t_end, precision, step_fit, gark)
        }
        Command::GarkCheck { method, n, steps, cfl, tolerance } => gark_check(&method, n, steps, cfl, tolerance),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
