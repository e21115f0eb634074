//! Convergence studies on 1D advection and inviscid Burgers with the
//! manufactured solution `u = (1 + x) / (1 + t)` and inflow data at `x = 0`.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{int, solve_linear, RMatrix, Rational};
use crate::scalar::{DoubleDouble, Real};
use crate::tableau::Tableau;
use crate::timestep::{
    gark_coefficients_in, integrate, ErkMethod, GenericIvp, LinearIvp, StepError, StepPolicy,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("grid too small: need at least {min} nodes, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("blow-up on grid N = {n} at t = {t}")]
    BlowUp { n: usize, t: f64 },
    #[error("rates need positive errors and step sizes")]
    NonPositive,
    #[error("rates need equal-length inputs with at least two entries")]
    Lengths,
    #[error("the GARK path needs a linear problem")]
    NotLinear,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Step(#[from] StepError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Advection,
    Burgers,
}

impl ProblemKind {
    pub fn default_t_end(self) -> f64 {
        match self {
            ProblemKind::Advection => 0.7,
            ProblemKind::Burgers => 0.8,
        }
    }

    /// Largest characteristic speed of the exact solution on `[0,1] × [0,∞)`.
    pub fn wave_speed_bound(self) -> f64 {
        match self {
            ProblemKind::Advection => 1.0,
            ProblemKind::Burgers => 2.0,
        }
    }
}

impl FromStr for ProblemKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "advection" => Ok(ProblemKind::Advection),
            "burgers" => Ok(ProblemKind::Burgers),
            other => Err(ExperimentError::Config(format!("unknown problem {other:?}"))),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProblemKind::Advection => "advection",
            ProblemKind::Burgers => "burgers",
        })
    }
}

pub fn exact_solution<T: Real>(x: T, t: T) -> T {
    (T::one() + x) / (T::one() + t)
}

pub fn exact_derivative<T: Real>(_x: T, t: T) -> T {
    T::one() / (T::one() + t)
}

/// Inflow value `g₀(t) = u(0, t)`.
pub fn inflow<T: Real>(t: T) -> T {
    T::one() / (T::one() + t)
}

/// Advection source term making `u` exact: `f = u_t + u_x`.
pub fn advection_source<T: Real>(x: T, t: T) -> T {
    let s = T::one() + t;
    (t - x) / (s * s)
}

pub enum System<T: Real = f64> {
    Linear(LinearIvp<T>),
    Generic(GenericIvp<T>),
}

/// Upwind semi-discretization on `x_i = i/N`, `i = 0..=N`. The state holds
/// the `N` interior-and-outflow values; the inflow node carries `g₀` at
/// every stage time.
pub struct SemiDiscreteProblem<T: Real = f64> {
    pub label: String,
    pub kind: ProblemKind,
    pub n: usize,
    pub dx: T,
    /// All `N + 1` nodes, inflow node first.
    pub x: Vec<T>,
    pub system: System<T>,
}

impl<T: Real> SemiDiscreteProblem<T> {
    /// Solution on all nodes from the state at time `t`.
    pub fn full_state(&self, state: &[T], t: T) -> Vec<T> {
        let mut u = Vec::with_capacity(self.n + 1);
        u.push(inflow(t));
        u.extend_from_slice(state);
        u
    }

    pub fn initial_state(&self) -> Vec<T> {
        self.x[1..].iter().map(|&x| exact_solution(x, T::zero())).collect()
    }

    pub fn exact(&self, t: T) -> Vec<T> {
        self.x.iter().map(|&x| exact_solution(x, t)).collect()
    }

    pub fn exact_dx(&self, t: T) -> Vec<T> {
        self.x.iter().map(|&x| exact_derivative(x, t)).collect()
    }
}

fn grid<T: Real>(n: usize) -> Result<(T, Vec<T>), ExperimentError> {
    if n < 4 {
        return Err(ExperimentError::GridTooSmall { min: 4, got: n });
    }
    let nn = T::from_usize(n);
    let x = (0..=n).map(|i| T::from_usize(i) / nn).collect();
    Ok((T::one() / nn, x))
}

/// `u_t = −u_x + f(x, t)` as `y' = L y + g(t)`.
pub fn advection_problem<T: Real>(n: usize) -> Result<SemiDiscreteProblem<T>, ExperimentError> {
    let (dx, x) = grid::<T>(n)?;
    let inv_dx = T::from_usize(n);
    let interior: Vec<T> = x[1..].to_vec();
    let apply_l = Box::new(move |y: &[T], out: &mut [T]| {
        out[0] = -y[0] * inv_dx;
        for i in 1..y.len() {
            out[i] = -(y[i] - y[i - 1]) * inv_dx;
        }
    });
    let forcing = Box::new(move |t: T, out: &mut [T]| {
        for (o, &xi) in out.iter_mut().zip(&interior) {
            *o = advection_source(xi, t);
        }
        out[0] += inflow(t) * inv_dx;
    });
    let y0 = x[1..].iter().map(|&xi| exact_solution(xi, T::zero())).collect();
    let t_end = T::from_f64(ProblemKind::Advection.default_t_end());
    let ivp = LinearIvp::new(n, apply_l, forcing, y0, T::zero(), t_end);
    Ok(SemiDiscreteProblem {
        label: format!("advection N={n}"),
        kind: ProblemKind::Advection,
        n,
        dx,
        x,
        system: System::Linear(ivp),
    })
}

/// `u_t + u u_x = 0` with first-order upwinding (velocity is positive).
pub fn burgers_problem<T: Real>(n: usize) -> Result<SemiDiscreteProblem<T>, ExperimentError> {
    let (dx, x) = grid::<T>(n)?;
    let inv_dx = T::from_usize(n);
    let rhs = Box::new(move |t: T, y: &[T], out: &mut [T]| {
        let mut left = inflow(t);
        for (o, &u) in out.iter_mut().zip(y) {
            *o = -u * (u - left) * inv_dx;
            left = u;
        }
    });
    let y0 = x[1..].iter().map(|&xi| exact_solution(xi, T::zero())).collect();
    let ivp = GenericIvp {
        dimension: n,
        rhs,
        y0,
        t0: T::zero(),
        t_end: T::from_f64(ProblemKind::Burgers.default_t_end()),
    };
    Ok(SemiDiscreteProblem {
        label: format!("burgers N={n}"),
        kind: ProblemKind::Burgers,
        n,
        dx,
        x,
        system: System::Generic(ivp),
    })
}

pub fn problem<T: Real>(kind: ProblemKind, n: usize) -> Result<SemiDiscreteProblem<T>, ExperimentError> {
    match kind {
        ProblemKind::Advection => advection_problem(n),
        ProblemKind::Burgers => burgers_problem(n),
    }
}

const STENCIL: usize = 7;

/// First-derivative weights on 7 consecutive nodes, for each position of
/// the evaluation node within the stencil; exact for polynomials of degree 6.
pub fn derivative_weights() -> &'static [Vec<Rational>] {
    static W: OnceLock<Vec<Vec<Rational>>> = OnceLock::new();
    W.get_or_init(|| {
        (0..STENCIL)
            .map(|pos| {
                let offsets: Vec<Rational> =
                    (0..STENCIL).map(|k| int(k as i64 - pos as i64)).collect();
                let m = RMatrix::from_fn(STENCIL, STENCIL, |r, k| {
                    num_traits::pow(offsets[k].clone(), r)
                });
                let mut rhs = vec![int(0); STENCIL];
                rhs[1] = int(1);
                solve_linear(&m, &rhs)
                    .expect("square system")
                    .expect("distinct offsets")
            })
            .collect()
    })
}

/// 6th-order first derivative on a uniform grid: centered 7-point stencil
/// inside, one-sided 7-point stencils at the three nodes nearest each end.
pub fn derivative_6th<T: Real>(u: &[T], dx: T) -> Result<Vec<T>, ExperimentError> {
    let len = u.len();
    if len < STENCIL {
        return Err(ExperimentError::GridTooSmall {
            min: STENCIL,
            got: len,
        });
    }
    let weights: Vec<Vec<T>> = derivative_weights()
        .iter()
        .map(|row| row.iter().map(T::from_rational).collect())
        .collect();
    Ok((0..len)
        .map(|i| {
            let start = i.saturating_sub(3).min(len - STENCIL);
            let mut acc = T::zero();
            for (w, v) in weights[i - start].iter().zip(&u[start..start + STENCIL]) {
                acc += *w * *v;
            }
            acc / dx
        })
        .collect())
}

/// Pairwise slopes `log(e_i/e_{i+1}) / log(dt_i/dt_{i+1})`.
pub fn fit_rate(errors: &[f64], dts: &[f64]) -> Result<Vec<f64>, ExperimentError> {
    if errors.len() != dts.len() || errors.len() < 2 {
        return Err(ExperimentError::Lengths);
    }
    if errors.iter().chain(dts).any(|&v| v.is_nan() || v <= 0.0) {
        return Err(ExperimentError::NonPositive);
    }
    Ok(errors
        .windows(2)
        .zip(dts.windows(2))
        .map(|(e, d)| (e[0] / e[1]).ln() / (d[0] / d[1]).ln())
        .collect())
}

/// How the linear problem is advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepPath {
    #[default]
    Direct,
    Gark,
}

/// How the step count is fitted to `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepFit {
    /// Equal steps no larger than the CFL step, so every step has the same size.
    #[default]
    Equal,
    /// CFL-sized steps with a shortened final step.
    Shortened,
}

/// Working precision of the time integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    #[default]
    Binary64,
    /// About 32 significant digits; resolves errors below binary64 round-off.
    DoubleDouble,
}

impl FromStr for Precision {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "binary64" | "double" | "f64" => Ok(Precision::Binary64),
            "double-double" | "dd" => Ok(Precision::DoubleDouble),
            other => Err(ExperimentError::Config(format!("unknown precision {other:?}"))),
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Precision::Binary64 => "binary64",
            Precision::DoubleDouble => "double-double",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub kind: ProblemKind,
    pub cfl: f64,
    pub grids: Vec<usize>,
    pub t_end: f64,
    pub path: StepPath,
    pub step_fit: StepFit,
    pub precision: Precision,
}

impl ConvergenceConfig {
    pub fn new(kind: ProblemKind, cfl: f64, grids: Vec<usize>) -> Self {
        Self {
            kind,
            cfl,
            grids,
            t_end: kind.default_t_end(),
            path: StepPath::Direct,
            step_fit: StepFit::Equal,
            precision: Precision::Binary64,
        }
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(ExperimentError::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(ExperimentError::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.grids.is_empty() || self.grids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::Config("grids must be non-empty and increasing".into()));
        }
        if self.path == StepPath::Gark && self.kind != ProblemKind::Advection {
            return Err(ExperimentError::NotLinear);
        }
        Ok(())
    }
}

/// Outcome on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRun {
    pub n: usize,
    pub dt: f64,
    pub steps: usize,
    pub t: f64,
    /// Solution on all nodes at `t`.
    pub u: Vec<f64>,
    pub err_u: f64,
    pub err_ux: f64,
}

impl GridRun {
    /// Pointwise `|u − u_exact|`, useful for inspecting boundary layers.
    pub fn error_profile(&self) -> Vec<f64> {
        self.u
            .iter()
            .enumerate()
            .map(|(i, u)| (u - exact_solution(i as f64 / self.n as f64, self.t)).abs())
            .collect()
    }
}

fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).abs())
        .fold(T::zero(), T::max)
        .to_f64()
}

pub fn run_grid(method: &Tableau, config: &ConvergenceConfig, n: usize) -> Result<GridRun, ExperimentError> {
    match config.precision {
        Precision::Binary64 => run_grid_in::<f64>(method, config, n),
        Precision::DoubleDouble => run_grid_in::<DoubleDouble>(method, config, n),
    }
}

fn step_policy(config: &ConvergenceConfig, dx: f64) -> StepPolicy {
    let dt = config.cfl * dx / config.kind.wave_speed_bound();
    match config.step_fit {
        StepFit::Equal => StepPolicy::AtMost(dt),
        StepFit::Shortened => StepPolicy::Fixed(dt),
    }
}

fn run_grid_in<T: Real>(
    method: &Tableau,
    config: &ConvergenceConfig,
    n: usize,
) -> Result<GridRun, ExperimentError> {
    let prob = problem::<T>(config.kind, n)?;
    let policy = step_policy(config, prob.dx.to_f64());
    let y0 = prob.initial_state();
    let (t0, t_end) = (T::zero(), T::from_f64(config.t_end));
    let blow_up = |e: StepError| match e {
        StepError::BlowUp { t } => ExperimentError::BlowUp { n, t },
        other => other.into(),
    };
    let traj = match (&prob.system, config.path) {
        (System::Linear(ivp), StepPath::Direct) => {
            integrate(&ErkMethod::<T>::new(method), ivp, &y0, t0, t_end, policy)
        }
        (System::Linear(ivp), StepPath::Gark) => {
            integrate(&gark_coefficients_in::<T>(method)?, ivp, &y0, t0, t_end, policy)
        }
        (System::Generic(ivp), StepPath::Direct) => {
            integrate(&ErkMethod::<T>::new(method), ivp, &y0, t0, t_end, policy)
        }
        (System::Generic(_), StepPath::Gark) => return Err(ExperimentError::NotLinear),
    }
    .map_err(blow_up)?;
    let u = prob.full_state(&traj.y, traj.t);
    let ux = derivative_6th(&u, prob.dx)?;
    Ok(GridRun {
        n,
        dt: traj.dt.to_f64(),
        steps: traj.steps,
        t: traj.t.to_f64(),
        err_u: max_abs_diff(&u, &prob.exact(traj.t)),
        err_ux: max_abs_diff(&ux, &prob.exact_dx(traj.t)),
        u: u.into_iter().map(Real::to_f64).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceResult {
    pub method: String,
    pub problem: ProblemKind,
    pub grids: Vec<usize>,
    pub dts: Vec<f64>,
    pub err_u: Vec<f64>,
    pub err_ux: Vec<f64>,
    pub rate_u: Vec<f64>,
    pub rate_ux: Vec<f64>,
}

impl ConvergenceResult {
    pub fn finest_rate_u(&self) -> Option<f64> {
        self.rate_u.last().copied()
    }

    pub fn finest_rate_ux(&self) -> Option<f64> {
        self.rate_ux.last().copied()
    }

    /// `N,dt,err_u,err_ux,rate_u,rate_ux` with 17 significant digits; the
    /// first row has no rates.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,dt,err_u,err_ux,rate_u,rate_ux\n");
        for i in 0..self.grids.len() {
            let _ = write!(
                out,
                "{},{:.16e},{:.16e},{:.16e},",
                self.grids[i], self.dts[i], self.err_u[i], self.err_ux[i]
            );
            if i > 0 {
                let _ = write!(out, "{:.16e},{:.16e}", self.rate_u[i - 1], self.rate_ux[i - 1]);
            } else {
                out.push(',');
            }
            out.push('\n');
        }
        out
    }
}

fn rates(errors: &[f64], dts: &[f64]) -> Vec<f64> {
    if errors.len() < 2 {
        return Vec::new();
    }
    // zero error (exact to round-off) gives an undefined slope
    fit_rate(errors, dts).unwrap_or_else(|_| {
        errors
            .windows(2)
            .zip(dts.windows(2))
            .map(|(e, d)| (e[0] / e[1]).ln() / (d[0] / d[1]).ln())
            .collect()
    })
}

/// Runs every grid (concurrently) and fits pairwise rates.
pub fn run_convergence(
    method: &Tableau,
    config: &ConvergenceConfig,
) -> Result<ConvergenceResult, ExperimentError> {
    config.validate()?;
    let runs = config
        .grids
        .par_iter()
        .map(|&n| run_grid(method, config, n))
        .collect::<Result<Vec<_>, _>>()?;
    let dts: Vec<f64> = runs.iter().map(|r| r.dt).collect();
    let err_u: Vec<f64> = runs.iter().map(|r| r.err_u).collect();
    let err_ux: Vec<f64> = runs.iter().map(|r| r.err_ux).collect();
    Ok(ConvergenceResult {
        method: method.name().to_string(),
        problem: config.kind,
        grids: config.grids.clone(),
        rate_u: rates(&err_u, &dts),
        rate_ux: rates(&err_ux, &dts),
        dts,
        err_u,
        err_ux,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_data_is_consistent() {
        for &x in &[0.0, 0.3, 1.0] {
            assert_eq!(exact_solution(x, 0.0), 1.0 + x);
            for &t in &[0.0, 0.4, 0.7] {
                // u_t + u_x − f = 0 and u_t + u u_x = 0
                let u_t = -(1.0 + x) / ((1.0 + t) * (1.0 + t));
                let u_x = exact_derivative(x, t);
                assert!((u_t + u_x - advection_source(x, t)).abs() < 1e-15);
                assert!((u_t + exact_solution(x, t) * u_x).abs() < 1e-15);
            }
        }
        assert_eq!(inflow(0.5), exact_solution(0.0, 0.5));
    }

    #[test]
    fn semi_discrete_residual_vanishes_for_exact_solution() {
        let t = 0.37;
        let adv = advection_problem::<f64>(20).unwrap();
        let System::Linear(ivp) = &adv.system else { panic!() };
        let y: Vec<f64> = adv.exact(t)[1..].to_vec();
        let mut lu = vec![0.0; 20];
        let mut g = vec![0.0; 20];
        ivp.apply(&y, &mut lu);
        ivp.forcing_at(t, &mut g);
        let u_t = |x: f64| -(1.0 + x) / ((1.0 + t) * (1.0 + t));
        for i in 0..20 {
            assert!((lu[i] + g[i] - u_t(adv.x[i + 1])).abs() < 1e-12, "node {i}");
        }
        let burgers = burgers_problem::<f64>(20).unwrap();
        let System::Generic(ivp) = &burgers.system else { panic!() };
        let mut f = vec![0.0; 20];
        (ivp.rhs)(t, &y, &mut f);
        for i in 0..20 {
            assert!((f[i] - u_t(burgers.x[i + 1])).abs() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn initial_state_matches_data() {
        let p = burgers_problem::<f64>(10).unwrap();
        let u = p.full_state(&p.initial_state(), 0.0);
        assert_eq!(u, p.exact(0.0));
        assert!(advection_problem::<f64>(3).is_err());
    }

    #[test]
    fn interior_stencil_is_the_centered_formula() {
        let w = &derivative_weights()[3];
        let expected = [-1, 9, -45, 0, 45, -9, 1].map(|v| crate::exact::rat(v, 60));
        assert_eq!(w.as_slice(), expected.as_slice());
    }

    #[test]
    fn derivative_exact_for_low_degree() {
        let n = 64;
        let dx = 1.0 / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 * dx).collect();
        let lin: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        assert!(derivative_6th(&lin, dx).unwrap().iter().all(|d| (d - 2.0).abs() < 1e-11));
        let sixth: Vec<f64> = xs.iter().map(|x| x.powi(6)).collect();
        let d = derivative_6th(&sixth, dx).unwrap();
        for (x, di) in xs.iter().zip(d) {
            assert!((di - 6.0 * x.powi(5)).abs() <= 1e-10, "x = {x}");
        }
        assert!(derivative_6th(&[0.0; 6], dx).is_err());
    }

    #[test]
    fn derivative_converges_at_sixth_order() {
        let err = |n: usize| {
            let dx = 1.0 / n as f64;
            let xs: Vec<f64> = (0..=n).map(|i| i as f64 * dx).collect();
            let u: Vec<f64> = xs.iter().map(|x| (2.0 * std::f64::consts::PI * x).sin()).collect();
            derivative_6th(&u, dx)
                .unwrap()
                .iter()
                .zip(&xs)
                .map(|(d, x)| (d - 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * x).cos()).abs())
                .fold(0.0, f64::max)
        };
        let rates = fit_rate(&[err(40), err(80), err(160)], &[1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0]).unwrap();
        for r in rates {
            assert!((r - 6.0).abs() < 0.3, "rate {r}");
        }
    }

    #[test]
    fn rate_fitting() {
        assert_eq!(fit_rate(&[1.0, 0.125], &[1.0, 0.5]).unwrap(), vec![3.0]);
        assert_eq!(fit_rate(&[1.0, 0.5], &[1.0, 0.5]).unwrap(), vec![1.0]);
        assert_eq!(fit_rate(&[0.3, 0.3], &[1.0, 0.5]).unwrap(), vec![0.0]);
        assert_eq!(fit_rate(&[0.0, 0.3], &[1.0, 0.5]), Err(ExperimentError::NonPositive));
        assert_eq!(fit_rate(&[0.3], &[1.0]), Err(ExperimentError::Lengths));
    }

    #[test]
    fn csv_layout() {
        let r = ConvergenceResult {
            method: "m".into(),
            problem: ProblemKind::Advection,
            grids: vec![10, 20],
            dts: vec![0.1, 0.05],
            err_u: vec![1e-3, 1.25e-4],
            err_ux: vec![1e-2, 2.5e-3],
            rate_u: vec![3.0],
            rate_ux: vec![2.0],
        };
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,dt,err_u,err_ux,rate_u,rate_ux");
        assert_eq!(
            lines[1],
            "10,1.0000000000000001e-1,1.0000000000000000e-3,1.0000000000000000e-2,,"
        );
        assert!(lines[2].ends_with(",3.0000000000000000e0,2.0000000000000000e0"));
    }

    #[test]
    fn config_validation() {
        let t = crate::catalog::resolve("rk4").unwrap();
        let mut c = ConvergenceConfig::new(ProblemKind::Burgers, 0.9, vec![20, 40]);
        c.path = StepPath::Gark;
        assert_eq!(run_convergence(&t, &c), Err(ExperimentError::NotLinear));
        let c = ConvergenceConfig::new(ProblemKind::Advection, 1.5, vec![20, 40]);
        assert!(run_convergence(&t, &c).is_err());
        let c = ConvergenceConfig::new(ProblemKind::Advection, 0.9, vec![40, 20]);
        assert!(run_convergence(&t, &c).is_err());
    }
}
