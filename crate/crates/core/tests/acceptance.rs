//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wso_rk::catalog::{self, CatalogEntry};
use wso_rk::conditions::{audit_structure, classical_order, wso, WsoValue, DEFAULT_ORDER_CAP};
use wso_rk::construct::{construct_minimal, parallel_iterated, MinimalStageInput};
use wso_rk::exact::{int, rat, to_f64, RMatrix, Rational};
use wso_rk::experiments::{
    advection_problem, run_convergence, ConvergenceConfig, ConvergenceResult, Precision,
    ProblemKind, System,
};
use wso_rk::tableau::{coefficient_metrics, linear_ssp_coefficient, stability_polynomial};
use wso_rk::timestep::{gark_coefficients, integrate, ErkMethod, StepPolicy};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: Vec<String>, summary: String) -> Self {
        if failures.is_empty() {
            Outcome { pass: true, detail: summary }
        } else {
            Outcome {
                pass: false,
                detail: format!("{summary}; failures: {}", failures.join("; ")),
            }
        }
    }
}

fn entries() -> Vec<&'static CatalogEntry> {
    catalog::names().iter().map(|n| catalog::get(n).unwrap()).collect()
}

fn same_sig_digits(a: f64, b: f64, digits: i32) -> bool {
    let scale = 10f64.powi(digits - 1 - b.abs().log10().floor() as i32);
    (a * scale).round() == (b * scale).round()
}

fn within_budget(elapsed: Duration, budget: Duration, failures: &mut Vec<String>, what: &str) {
    if elapsed > budget {
        failures.push(format!("{what} took {:.1}s, budget {:.0}s", elapsed.as_secs_f64(), budget.as_secs_f64()));
    }
}

fn catalog_regression() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for e in entries() {
        let order = classical_order(&e.tableau, DEFAULT_ORDER_CAP).unwrap().order;
        let q = wso(&e.tableau).q;
        let x = &e.expected;
        if (e.tableau.stages(), order, q) != (x.stages, x.order, WsoValue::Finite(x.wso as u32)) {
            failures.push(format!("{}: got ({}, {order}, {q})", e.name(), e.tableau.stages()));
        }
    }
    let elapsed = start.elapsed();
    within_budget(elapsed, Duration::from_secs(10), &mut failures, "catalog check");
    Outcome::new(failures, format!("12 methods, {:.2}s", elapsed.as_secs_f64()))
}

fn error_metrics() -> Outcome {
    let mut failures = Vec::new();
    for e in entries() {
        let a = classical_order(&e.tableau, DEFAULT_ORDER_CAP).unwrap().principal_error;
        if !same_sig_digits(a, e.expected.principal_error, 4) {
            failures.push(format!("{} principal error {a:.4e} vs {:.4e}", e.name(), e.expected.principal_error));
        }
        let digits = if e.name() == "(4,3,2)" { 2 } else { 4 };
        let d = to_f64(&coefficient_metrics(&e.tableau).d);
        let want = to_f64(&e.expected.d);
        if !same_sig_digits(d, want, digits) {
            failures.push(format!("{} D {d} vs {want}", e.name()));
        }
    }
    let e854 = classical_order(&catalog::get("(8,5,4)").unwrap().tableau, 6).unwrap().principal_error;
    let e313 = classical_order(&catalog::get("ERK313").unwrap().tableau, 6).unwrap().principal_error;
    Outcome::new(failures, format!("(8,5,4) {e854:.4e}, ERK313 {e313:.4e}"))
}

fn stability_polynomials() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for e in entries().into_iter().filter(|e| e.is_minimal_stage()) {
        checked += 1;
        let r = stability_polynomial(&e.tableau);
        if !r.is_exponential_partial_sum(e.expected.order) {
            failures.push(format!("{}: R = {:?}", e.name(), r.trimmed()));
        }
        if (2..=3).contains(&e.expected.order) {
            let ssp = linear_ssp_coefficient(&r);
            if (ssp - 1.0).abs() > 1e-9 {
                failures.push(format!("{}: linear SSP coefficient {ssp}", e.name()));
            }
        }
    }
    Outcome::new(failures, format!("{checked} minimal-stage methods"))
}

fn structure_audit() -> Outcome {
    let mut failures = Vec::new();
    let mut equality = 0;
    for e in entries() {
        let a = audit_structure(&e.tableau);
        if !a.all_hold {
            let broken: Vec<_> = a.relations.iter().filter(|r| !r.holds).map(|r| r.relation.clone()).collect();
            failures.push(format!("{}: {}", e.name(), broken.join(", ")));
        }
        let (s, p, q) = (e.expected.stages, e.expected.order, e.expected.wso);
        if p >= 2 && p + q == s + 1 {
            equality += 1;
            if (a.dim_k_q, a.dim_y) != (q - 1, p) {
                failures.push(format!("{}: dim K_q = {}, dim Y = {}", e.name(), a.dim_k_q, a.dim_y));
            }
        }
    }
    Outcome::new(failures, format!("12 audits, {equality} equality cases"))
}

fn ssp_incompatibility() -> Outcome {
    let mut failures = Vec::new();
    for e in entries().into_iter().filter(|e| e.expected.order >= 2 && e.expected.wso >= 2) {
        let t = &e.tableau;
        if !t.a().entries().iter().chain(t.b()).any(Signed::is_negative) {
            failures.push(format!("{} has no negative coefficient", e.name()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut second_order = 0;
    for _ in 0..1000 {
        let t = common::nonnegative_tableau(&mut rng);
        if !common::is_nonnegative(&t) {
            failures.push("generator produced a negative coefficient".into());
        }
        let p = classical_order(&t, 4).unwrap().order;
        let q = wso(&t).q.lower_bound();
        second_order += usize::from(p >= 2);
        if p >= 2 && q >= 2 {
            failures.push(format!("non-negative tableau with p = {p}, q = {q}: {t:?}"));
        }
    }
    Outcome::new(failures, format!("1000 non-negative draws, {second_order} of order >= 2"))
}

fn construction_round_trip() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let lower = |n: usize, entries: &[(usize, usize, Rational)]| {
        let mut m = RMatrix::zeros(n, n);
        for (i, j, v) in entries {
            m.set(*i, *j, v.clone());
        }
        m
    };
    let cases = [
        (
            "(3,2,2)",
            MinimalStageInput {
                a22: RMatrix::zeros(1, 1),
                a33: RMatrix::zeros(1, 1),
                c: vec![int(0), rat(1, 2), int(1)],
                p: 2,
                q: 2,
            },
        ),
        (
            "(4,3,2)",
            MinimalStageInput {
                a22: RMatrix::zeros(1, 1),
                a33: lower(2, &[(1, 0, rat(-729, 3520))]),
                c: vec![int(0), rat(3, 10), rat(2, 3), rat(3, 4)],
                p: 3,
                q: 2,
            },
        ),
        (
            "(5,3,3)",
            MinimalStageInput {
                a22: lower(2, &[(1, 0, rat(103950, 493487))]),
                a33: lower(2, &[(1, 0, rat(-2268, 2405))]),
                c: vec![int(0), rat(3, 11), rat(15, 19), rat(5, 6), int(1)],
                p: 3,
                q: 3,
            },
        ),
    ];
    for (name, input) in &cases {
        let built = construct_minimal(input).unwrap().tableau;
        let reference = &catalog::get(name).unwrap().tableau;
        if built.a() != reference.a() || built.b() != reference.b() || built.c() != reference.c() {
            failures.push(format!("{name} differs from the published tableau"));
        }
    }
    let elapsed = start.elapsed();
    within_budget(elapsed, Duration::from_secs(1), &mut failures, "construction");
    Outcome::new(failures, format!("3 tableaus exact, {:.3}s", elapsed.as_secs_f64()))
}

fn parallel_iterated_methods() -> Outcome {
    let mut failures = Vec::new();
    let mut timings = Vec::new();
    for p in 2..=4usize {
        let start = Instant::now();
        let nodes: Vec<Rational> = (0..=p).map(|k| rat(k as i64, p as i64)).collect();
        let t = parallel_iterated(p, &nodes).unwrap();
        let order = classical_order(&t, p + 1).unwrap().order;
        let q = wso(&t).q;
        let elapsed = start.elapsed();
        if t.stages() != p * p || order != p || q.lower_bound() < p as u32 {
            failures.push(format!("p = {p}: s = {}, order {order}, wso {q}", t.stages()));
        }
        if p == 4 {
            within_budget(elapsed, Duration::from_secs(30), &mut failures, "p = 4");
        }
        timings.push(format!("p={p} q={q} {:.2}s", elapsed.as_secs_f64()));
    }
    Outcome::new(failures, timings.join(", "))
}

fn gark_equivalence() -> Outcome {
    let mut failures = Vec::new();
    let n = 100;
    let steps = 50;
    let problem = advection_problem::<f64>(n).unwrap();
    let System::Linear(ivp) = &problem.system else { unreachable!() };
    let y0 = problem.initial_state();
    // 50 steps at CFL 0.9
    let t_end = steps as f64 * 0.9 / n as f64;
    let mut worst: f64 = 0.0;
    for e in entries() {
        let tab = &e.tableau;
        let policy = StepPolicy::Count(steps);
        let direct = integrate(&ErkMethod::new(tab), ivp, &y0, 0.0, t_end, policy).unwrap();
        let scheme = gark_coefficients(tab).unwrap();
        ivp.reset_applications();
        let reduced = integrate(&scheme, ivp, &y0, 0.0, t_end, policy).unwrap();
        let applications = ivp.applications();
        let scale = direct.y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let dev = direct.y.iter().zip(&reduced.y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        worst = worst.max(dev);
        if dev > 1e-11 {
            failures.push(format!("{}: relative deviation {dev:.2e}", e.name()));
        }
        let d = wso(tab).dim_y;
        if applications != steps * d {
            failures.push(format!("{}: {applications} applications, expected {}", e.name(), steps * d));
        }
    }
    Outcome::new(failures, format!("N = {n}, {steps} steps, max relative deviation {worst:.2e}"))
}

const GRIDS: [usize; 5] = [50, 100, 200, 400, 800];
const COMPARATORS: [&str; 3] = ["Shu-Osher", "RK4", "Dormand-Prince"];

fn convergence(name: &str, kind: ProblemKind, precision: Precision) -> ConvergenceResult {
    let method = catalog::resolve(name).unwrap();
    let mut config = ConvergenceConfig::new(kind, 0.9, GRIDS.to_vec());
    config.precision = precision;
    run_convergence(&method, &config).unwrap()
}

fn near(value: f64, target: f64) -> bool {
    (value - target).abs() <= 0.3
}

/// `(name, p, q)` for the methods with high weak stage order.
fn wso_methods() -> Vec<(String, usize, usize)> {
    let mut out: Vec<_> = entries()
        .into_iter()
        .filter(|e| e.expected.wso >= 2)
        .map(|e| (e.name().to_string(), e.expected.order, e.expected.wso))
        .collect();
    out.push((catalog::ITERATED_933.to_string(), 3, 3));
    out
}

fn rates_line(name: &str, r: &ConvergenceResult) -> String {
    format!("{name} {:.2}/{:.2}", r.finest_rate_u().unwrap(), r.finest_rate_ux().unwrap())
}

fn advection_convergence(info: &mut Vec<String>) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for name in COMPARATORS {
        let r = convergence(name, ProblemKind::Advection, Precision::DoubleDouble);
        if !near(r.finest_rate_u().unwrap(), 2.0) {
            failures.push(format!("{name} rate_u {:.2}", r.finest_rate_u().unwrap()));
        }
        seen.push(rates_line(name, &r));
    }
    for (name, p, q) in wso_methods() {
        if q + 1 < p {
            continue;
        }
        let r = convergence(&name, ProblemKind::Advection, Precision::DoubleDouble);
        let (ru, rux) = (r.finest_rate_u().unwrap(), r.finest_rate_ux().unwrap());
        if !near(ru, p as f64) {
            failures.push(format!("{name} rate_u {ru:.2}, want {p}"));
        }
        let want_ux = if q + 1 == p { q } else { p };
        if !near(rux, want_ux as f64) {
            failures.push(format!("{name} rate_ux {rux:.2}, want {want_ux}"));
        }
        seen.push(rates_line(&name, &r));
    }
    let elapsed = start.elapsed();
    within_budget(elapsed, Duration::from_secs(120), &mut failures, "advection study");
    for name in ["(7,4,4)", "(8,5,4)", "(9,5,5)"] {
        let r = convergence(name, ProblemKind::Advection, Precision::Binary64);
        info.push(format!(
            "binary64 advection {name}: err_u(800) {:.1e}, err_ux(800) {:.1e}, finest rates {:.2}/{:.2}",
            r.err_u[4],
            r.err_ux[4],
            r.finest_rate_u().unwrap(),
            r.finest_rate_ux().unwrap()
        ));
    }
    Outcome::new(
        failures,
        format!("double-double, {:.1}s; rate_u/rate_ux: {}", elapsed.as_secs_f64(), seen.join(", ")),
    )
}

/// Methods compared on Burgers: the comparators and the optimized
/// minimal-stage methods of order three to five.
const BURGERS_SET: [&str; 5] = ["(5,3,3)", "(6,4,3)", "(7,4,4)", "(8,5,4)", "(9,5,5)"];

fn burgers_convergence(info: &mut Vec<String>) -> Outcome {
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for name in COMPARATORS {
        let r = convergence(name, ProblemKind::Burgers, Precision::DoubleDouble);
        let (ru, rux) = (r.finest_rate_u().unwrap(), r.finest_rate_ux().unwrap());
        if !near(ru, 2.0) || !near(rux, 1.0) {
            failures.push(format!("{name} rates {ru:.2}/{rux:.2}"));
        }
        seen.push(rates_line(name, &r));
    }
    for name in BURGERS_SET {
        let r = convergence(name, ProblemKind::Burgers, Precision::DoubleDouble);
        let (ru, rux) = (r.finest_rate_u().unwrap(), r.finest_rate_ux().unwrap());
        if ru < 2.7 || !near(rux, 2.0) {
            failures.push(format!("{name} rates {ru:.2}/{rux:.2}"));
        }
        seen.push(rates_line(name, &r));
    }
    for name in ["(4,3,2)", "ERK312", "ERK313", catalog::ITERATED_933] {
        let r = convergence(name, ProblemKind::Burgers, Precision::DoubleDouble);
        info.push(format!("burgers {}", rates_line(name, &r)));
    }
    Outcome::new(failures, format!("double-double; rate_u/rate_ux: {}", seen.join(", ")))
}

fn wso3_comparison() -> Outcome {
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for kind in [ProblemKind::Advection, ProblemKind::Burgers] {
        for name in ["(5,3,3)", "ERK313", catalog::ITERATED_933] {
            let r = convergence(name, kind, Precision::DoubleDouble);
            let ru = r.finest_rate_u().unwrap();
            if !near(ru, 3.0) {
                failures.push(format!("{kind} {name} rate_u {ru:.2}"));
            }
            seen.push(format!("{kind} {name} {ru:.2}"));
        }
    }
    Outcome::new(failures, format!("rate_u: {}", seen.join(", ")))
}

fn run(id: u32, title: &str, check: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| Outcome {
        pass: false,
        detail: format!(
            "panicked: {}",
            e.downcast_ref::<String>().map(String::as_str).or(e.downcast_ref::<&str>().copied()).unwrap_or("?")
        ),
    });
    let tag = if outcome.pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{tag}] {title}: {}", outcome.detail);
    outcome.pass
}

fn main() {
    let mut info = Vec::new();
    let results = [
        run(1, "catalog (s, p, q)", catalog_regression),
        run(2, "principal error and D", error_metrics),
        run(3, "stability polynomials", stability_polynomials),
        run(4, "structure audit", structure_audit),
        run(5, "non-negative coefficients", ssp_incompatibility),
        run(6, "construction round-trip", construction_round_trip),
        run(7, "parallel-iterated methods", parallel_iterated_methods),
        run(8, "GARK equivalence", gark_equivalence),
        run(9, "advection convergence", || advection_convergence(&mut info)),
        run(10, "Burgers convergence", || burgers_convergence(&mut info)),
        run(11, "weak stage order 3 comparison", wso3_comparison),
    ];
    for line in &info {
        println!("info: {line}");
    }
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
