//! Fixed-step explicit Runge–Kutta integration, including the reduced GARK
//! form for linear constant-coefficient problems with forcing.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::conditions::dim_y;
use crate::exact::{dot, RMatrix, Rational};
use crate::scalar::Real;
use crate::tableau::Tableau;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("blow-up at t = {t}")]
    BlowUp { t: f64 },
    #[error("step size must be positive and finite, got {0}")]
    StepSize(f64),
    #[error("GARK form needs classical order >= 1")]
    Inconsistent,
}

/// Right-hand side `f(t, y)` of an ODE system.
pub trait OdeRhs<T: Real = f64>: Sync {
    fn dimension(&self) -> usize;
    fn eval(&self, t: T, y: &[T], out: &mut [T]);
}

pub type RhsFn<T = f64> = Box<dyn Fn(T, &[T], &mut [T]) + Send + Sync>;
pub type OperatorFn<T = f64> = Box<dyn Fn(&[T], &mut [T]) + Send + Sync>;
pub type ForcingFn<T = f64> = Box<dyn Fn(T, &mut [T]) + Send + Sync>;

/// `y' = f(t, y)`
pub struct GenericIvp<T: Real = f64> {
    pub dimension: usize,
    pub rhs: RhsFn<T>,
    pub y0: Vec<T>,
    pub t0: T,
    pub t_end: T,
}

impl<T: Real> OdeRhs<T> for GenericIvp<T> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn eval(&self, t: T, y: &[T], out: &mut [T]) {
        (self.rhs)(t, y, out)
    }
}

/// `y' = L y + g(t)` with `L` available only through its action.
pub struct LinearIvp<T: Real = f64> {
    pub dimension: usize,
    pub apply_l: OperatorFn<T>,
    pub forcing: ForcingFn<T>,
    pub y0: Vec<T>,
    pub t0: T,
    pub t_end: T,
    applications: AtomicUsize,
}

impl<T: Real> LinearIvp<T> {
    pub fn new(
        dimension: usize,
        apply_l: OperatorFn<T>,
        forcing: ForcingFn<T>,
        y0: Vec<T>,
        t0: T,
        t_end: T,
    ) -> Self {
        Self {
            dimension,
            apply_l,
            forcing,
            y0,
            t0,
            t_end,
            applications: AtomicUsize::new(0),
        }
    }

    /// `out = L y`, counted.
    pub fn apply(&self, y: &[T], out: &mut [T]) {
        self.applications.fetch_add(1, Ordering::Relaxed);
        (self.apply_l)(y, out)
    }

    pub fn forcing_at(&self, t: T, out: &mut [T]) {
        (self.forcing)(t, out)
    }

    /// Number of `L` applications since construction or the last reset.
    pub fn applications(&self) -> usize {
        self.applications.load(Ordering::Relaxed)
    }

    pub fn reset_applications(&self) {
        self.applications.store(0, Ordering::Relaxed)
    }
}

impl<T: Real> OdeRhs<T> for LinearIvp<T> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn eval(&self, t: T, y: &[T], out: &mut [T]) {
        self.apply(y, out);
        let mut g = vec![T::zero(); self.dimension];
        self.forcing_at(t, &mut g);
        for (o, gi) in out.iter_mut().zip(g) {
            *o += gi;
        }
    }
}

fn convert<T: Real>(v: &[Rational]) -> Vec<T> {
    v.iter().map(T::from_rational).collect()
}

fn check_step<T: Real>(dt: T) -> Result<(), StepError> {
    if dt > T::zero() && dt.is_finite() {
        Ok(())
    } else {
        Err(StepError::StepSize(dt.to_f64()))
    }
}

fn check_finite<T: Real>(y: &[T], t: T) -> Result<(), StepError> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StepError::BlowUp { t: t.to_f64() })
    }
}

/// `y += h·x`
fn axpy<T: Real>(y: &mut [T], h: T, x: &[T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += h * *xi;
    }
}

/// One-step scheme for problems of type `P`.
pub trait Stepper<P: ?Sized, T: Real = f64> {
    fn step(&self, problem: &P, t: T, y: &[T], dt: T) -> Result<Vec<T>, StepError>;
}

/// Explicit RK method with coefficients rounded once to the working precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ErkMethod<T: Real = f64> {
    name: String,
    /// nonzero `(j, a_ij)` per stage `i`
    a: Vec<Vec<(usize, T)>>,
    b: Vec<T>,
    c: Vec<T>,
}

impl<T: Real> ErkMethod<T> {
    pub fn new(t: &Tableau) -> Self {
        let a = (0..t.stages())
            .map(|i| {
                (0..i)
                    .filter(|&j| !t.a()[(i, j)].is_zero())
                    .map(|j| (j, T::from_rational(&t.a()[(i, j)])))
                    .collect()
            })
            .collect();
        Self {
            name: t.name().to_string(),
            a,
            b: convert(t.b()),
            c: convert(t.c()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }
}

impl<T: Real, P: OdeRhs<T> + ?Sized> Stepper<P, T> for ErkMethod<T> {
    fn step(&self, problem: &P, t: T, y: &[T], dt: T) -> Result<Vec<T>, StepError> {
        erk_step(self, problem, t, y, dt)
    }
}

/// One explicit RK step.
pub fn erk_step<T: Real, P: OdeRhs<T> + ?Sized>(
    method: &ErkMethod<T>,
    problem: &P,
    t: T,
    y: &[T],
    dt: T,
) -> Result<Vec<T>, StepError> {
    check_step(dt)?;
    let n = y.len();
    let mut k: Vec<Vec<T>> = Vec::with_capacity(method.stages());
    let mut stage = vec![T::zero(); n];
    for (i, row) in method.a.iter().enumerate() {
        stage.copy_from_slice(y);
        for &(j, aij) in row {
            axpy(&mut stage, dt * aij, &k[j]);
        }
        let mut ki = vec![T::zero(); n];
        problem.eval(t + method.c[i] * dt, &stage, &mut ki);
        k.push(ki);
    }
    let mut out = y.to_vec();
    for (bi, ki) in method.b.iter().zip(&k) {
        if *bi != T::zero() {
            axpy(&mut out, dt * *bi, ki);
        }
    }
    check_finite(&out, t + dt)?;
    Ok(out)
}

/// Reduced two-additive form of an explicit method on `y' = L y + g(t)`:
/// `d = dim Y` internal stages, one `L` application each.
#[derive(Debug, Clone, PartialEq)]
pub struct GarkScheme<T: Real = f64> {
    pub d: usize,
    pub a_hat: RMatrix,
    pub a_breve: RMatrix,
    pub b_hat: Vec<Rational>,
    pub b_breve: Vec<Rational>,
    pub c: Vec<Rational>,
    a_hat_f: Vec<Vec<T>>,
    a_breve_f: Vec<Vec<T>>,
    b_hat_f: Vec<T>,
    b_breve_f: Vec<T>,
    c_f: Vec<T>,
}

/// `bᵀA^k`
fn weight_power(t: &Tableau, k: usize) -> Vec<Rational> {
    let mut w = t.b().to_vec();
    for _ in 0..k {
        w = t.a().vec_mul(&w);
    }
    w
}

pub fn gark_coefficients(t: &Tableau) -> Result<GarkScheme, StepError> {
    gark_coefficients_in(t)
}

/// As [`gark_coefficients`], rounding to the working precision `T`.
pub fn gark_coefficients_in<T: Real>(t: &Tableau) -> Result<GarkScheme<T>, StepError> {
    let e = vec![Rational::one(); t.stages()];
    if dot(t.b(), &e) != Rational::one() {
        return Err(StepError::Inconsistent);
    }
    let d = dim_y(t);
    let s = t.stages();
    let mut a_hat = RMatrix::zeros(d, d);
    let mut a_breve = RMatrix::zeros(d, s);
    for i in 1..d {
        let w = weight_power(t, d - i);
        let moment = dot(&w, &e);
        if i == 1 {
            a_hat.set(1, 0, moment);
        } else {
            a_hat.set(i, 0, moment - Rational::one());
            a_hat.set(i, i - 1, Rational::one());
        }
        for (j, v) in w.into_iter().enumerate() {
            a_breve.set(i, j, v);
        }
    }
    let mut b_hat = vec![Rational::zero(); d];
    b_hat[d - 1] = Rational::one();
    let rows_f = |m: &RMatrix| -> Vec<Vec<T>> { (0..m.rows()).map(|i| convert(m.row(i))).collect() };
    Ok(GarkScheme {
        d,
        a_hat_f: rows_f(&a_hat),
        a_breve_f: rows_f(&a_breve),
        b_hat_f: convert(&b_hat),
        b_breve_f: convert(t.b()),
        c_f: convert(t.c()),
        a_hat,
        a_breve,
        b_hat,
        b_breve: t.b().to_vec(),
        c: t.c().to_vec(),
    })
}

impl<T: Real> Stepper<LinearIvp<T>, T> for GarkScheme<T> {
    fn step(&self, problem: &LinearIvp<T>, t: T, y: &[T], dt: T) -> Result<Vec<T>, StepError> {
        gark_step(self, problem, t, y, dt)
    }
}

/// One step of the reduced form: `d` applications of `L`, `s` forcing
/// evaluations.
pub fn gark_step<T: Real>(
    g: &GarkScheme<T>,
    problem: &LinearIvp<T>,
    t: T,
    y: &[T],
    dt: T,
) -> Result<Vec<T>, StepError> {
    check_step(dt)?;
    let n = y.len();
    let forcing: Vec<Vec<T>> = g
        .c_f
        .iter()
        .map(|cj| {
            let mut f = vec![T::zero(); n];
            problem.forcing_at(t + *cj * dt, &mut f);
            f
        })
        .collect();
    let mut ly: Vec<Vec<T>> = Vec::with_capacity(g.d);
    let mut stage = vec![T::zero(); n];
    for i in 0..g.d {
        stage.copy_from_slice(y);
        for (j, lyj) in ly.iter().enumerate() {
            let a = g.a_hat_f[i][j];
            if a != T::zero() {
                axpy(&mut stage, dt * a, lyj);
            }
        }
        for (a, fj) in g.a_breve_f[i].iter().zip(&forcing) {
            if *a != T::zero() {
                axpy(&mut stage, dt * *a, fj);
            }
        }
        let mut out = vec![T::zero(); n];
        problem.apply(&stage, &mut out);
        ly.push(out);
    }
    let mut out = y.to_vec();
    for (b, lyj) in g.b_hat_f.iter().zip(&ly) {
        if *b != T::zero() {
            axpy(&mut out, dt * *b, lyj);
        }
    }
    for (b, fj) in g.b_breve_f.iter().zip(&forcing) {
        if *b != T::zero() {
            axpy(&mut out, dt * *b, fj);
        }
    }
    check_finite(&out, t + dt)?;
    Ok(out)
}

/// How `[t0, t_end]` is divided into steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    /// Steps of size `dt`; the last one is shortened to land on `t_end`.
    Fixed(f64),
    /// The fewest equal steps no longer than `dt`.
    AtMost(f64),
    /// `n` equal steps.
    Count(usize),
}

impl StepPolicy {
    /// Step size and number of steps over `[t0, t_end]`.
    pub fn resolve(self, t0: f64, t_end: f64) -> Result<(f64, usize), StepError> {
        let span = t_end - t0;
        match self {
            StepPolicy::Count(0) => Ok((0.0, 0)),
            StepPolicy::Count(n) => Ok((span / n as f64, n)),
            StepPolicy::Fixed(dt) | StepPolicy::AtMost(dt) => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(StepError::StepSize(dt));
                }
                if span <= 0.0 {
                    return Ok((dt, 0));
                }
                let n = (span / dt - 1e-9).ceil().max(1.0) as usize;
                match self {
                    StepPolicy::AtMost(_) => Ok((span / n as f64, n)),
                    _ => Ok((dt, n)),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real = f64> {
    pub y: Vec<T>,
    pub t: T,
    pub steps: usize,
    pub dt: T,
}

pub fn integrate<T: Real, P: ?Sized, S: Stepper<P, T>>(
    stepper: &S,
    problem: &P,
    y0: &[T],
    t0: T,
    t_end: T,
    policy: StepPolicy,
) -> Result<Trajectory<T>, StepError> {
    let (dt, steps) = policy.resolve(t0.to_f64(), t_end.to_f64())?;
    // equal steps are recomputed in the working precision
    let dt = match policy {
        StepPolicy::Fixed(_) => T::from_f64(dt),
        _ if steps == 0 => T::zero(),
        _ => (t_end - t0) / T::from_usize(steps),
    };
    let mut y = y0.to_vec();
    let mut t = t0;
    for k in 0..steps {
        let last = k + 1 == steps;
        let h = if last { t_end - t } else { dt };
        y = stepper.step(problem, t, &y, h)?;
        t = if last { t_end } else { t0 + T::from_usize(k + 1) * dt };
    }
    Ok(Trajectory { y, t, steps, dt })
}
