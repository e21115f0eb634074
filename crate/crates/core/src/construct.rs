//! Constructions of explicit methods with high weak stage order: the
//! parametric minimal-stage family and parallel iteration of a V-transformed
//! basic method.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::solve_first_sylvester;
use crate::exact::{int, solve_linear, vandermonde_powers, ExactError, RMatrix, Rational};
use crate::tableau::{reduce_by_partition, stability_polynomial, Entry, Tableau, TableauError};

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("invalid construction input: {0}")]
    Input(String),
    #[error("quadrature system singular for these abscissas")]
    QuadratureSingular,
    #[error("abscissas must be distinct")]
    DuplicateAbscissas,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

/// Free parameters of a minimal-stage scheme (`s = p + q − 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalStageInput {
    pub a22: RMatrix,
    pub a33: RMatrix,
    pub c: Vec<Rational>,
    pub p: usize,
    pub q: usize,
}

/// JSON form of [`MinimalStageInput`]; entries are rational strings or integers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimalStageDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "A22")]
    pub a22: Vec<Vec<Entry>>,
    #[serde(rename = "A33")]
    pub a33: Vec<Vec<Entry>>,
    pub c: Vec<Entry>,
    pub p: usize,
    pub q: usize,
}

fn entry_matrix(rows: &[Vec<Entry>], n: usize, label: &str) -> Result<RMatrix, ConstructError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(ConstructError::Input(format!("{label} must be {n}x{n}")));
    }
    let rows = rows
        .iter()
        .map(|r| r.iter().map(Entry::to_rational).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    if n == 0 {
        return Ok(RMatrix::zeros(0, 0));
    }
    Ok(RMatrix::from_rows(rows)?)
}

impl MinimalStageDocument {
    pub fn into_input(self) -> Result<MinimalStageInput, ConstructError> {
        let c = self
            .c
            .iter()
            .map(Entry::to_rational)
            .collect::<Result<Vec<_>, _>>()?;
        let s = c.len();
        if self.q < 2 || self.q > s {
            return Err(ConstructError::Input(format!("q = {} out of range", self.q)));
        }
        Ok(MinimalStageInput {
            a22: entry_matrix(&self.a22, self.q - 1, "A22")?,
            a33: entry_matrix(&self.a33, s - self.q, "A33")?,
            c,
            p: self.p,
            q: self.q,
        })
    }
}

impl MinimalStageInput {
    pub fn stages(&self) -> usize {
        self.c.len()
    }

    fn validate(&self) -> Result<(), ConstructError> {
        let (s, p, q) = (self.stages(), self.p, self.q);
        let bad = |msg: String| Err(ConstructError::Input(msg));
        if q < 2 || p < 1 {
            return bad(format!("need p >= 1 and q >= 2, got p = {p}, q = {q}"));
        }
        if p + q != s + 1 {
            return bad(format!("need p + q = s + 1, got p = {p}, q = {q}, s = {s}"));
        }
        if q + 1 < p {
            return bad(format!("need q >= p - 1, got p = {p}, q = {q}"));
        }
        if !self.c[0].is_zero() {
            return bad("c_1 must be 0".into());
        }
        let head = &self.c[1..=q.min(s - 1)];
        if (0..head.len()).any(|i| (i + 1..head.len()).any(|j| head[i] == head[j])) {
            return Err(ConstructError::DuplicateAbscissas);
        }
        if head.iter().any(Zero::is_zero) {
            return bad("c_2, ..., c_(q+1) must be nonzero".into());
        }
        for (m, label, n) in [(&self.a22, "A22", q - 1), (&self.a33, "A33", s - q)] {
            if m.rows() != n || m.cols() != n {
                return bad(format!("{label} must be {n}x{n}"));
            }
            if (0..n).any(|i| (i..n).any(|j| !m[(i, j)].is_zero())) {
                return bad(format!("{label} must be strictly lower triangular"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionResult {
    pub tableau: Tableau,
    /// `(s − q) × (q − 1)` coupling matrix of the two Sylvester equations.
    pub l: RMatrix,
    /// `b = [[1, 0], [0, −Lᵀ], [0, I]]·β`
    pub beta: Vec<Rational>,
}

/// `[[1, 0], [0, −Lᵀ], [0, I]]`, an `s × (s − q + 1)` matrix.
pub fn weight_basis(l: &RMatrix, q: usize) -> RMatrix {
    let lower = l.rows();
    let s = lower + q;
    let mut m = RMatrix::zeros(s, lower + 1);
    m.set(0, 0, Rational::one());
    for i in 1..q {
        for k in 0..lower {
            m.set(i, k + 1, -l[(k, i - 1)].clone());
        }
    }
    for k in 0..lower {
        m.set(q + k, k + 1, Rational::one());
    }
    m
}

/// Minimal-stage scheme with weak stage order `q` and quadrature order `p`
/// from the free blocks `A22`, `A33` and the abscissas.
pub fn construct_minimal(input: &MinimalStageInput) -> Result<ConstructionResult, ConstructError> {
    input.validate()?;
    let (s, p, q) = (input.stages(), input.p, input.q);
    let c = &input.c;
    let c_u = &c[1..q];
    let c_l = &c[q..];
    let l = solve_first_sylvester(&input.a33, c_u, c_l, q)
        .expect("A33 is nilpotent and the upper shift is invertible, so the spectra are disjoint");
    let a32 = l.mul(&input.a22).sub(&input.a33.mul(&l));

    let mut a = RMatrix::zeros(s, s);
    for i in 1..s {
        for j in 1..s {
            let v = match (i < q, j < q) {
                (true, true) => input.a22[(i - 1, j - 1)].clone(),
                (false, true) => a32[(i - q, j - 1)].clone(),
                (false, false) => input.a33[(i - q, j - q)].clone(),
                (true, false) => Rational::zero(),
            };
            a.set(i, j, v);
        }
        let rest: Rational = a.row(i)[1..].iter().sum();
        a.set(i, 0, &c[i] - rest);
    }

    let basis = weight_basis(&l, q);
    let moments = vandermonde_powers(c, 0, p as u32 - 1).transpose().mul(&basis);
    let rhs: Vec<Rational> = (1..=p as i64).map(|j| Rational::new(1.into(), j.into())).collect();
    let beta = solve_linear(&moments, &rhs)?.ok_or(ConstructError::QuadratureSingular)?;
    let b = basis.mul_vec(&beta);
    let tableau = Tableau::new(format!("({s},{p},{q})"), a, b, Some(c.clone()))?;
    Ok(ConstructionResult { tableau, l, beta })
}

/// The V-transformed basic method of a parallel-iterated construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelIteratedSpec {
    pub p: usize,
    pub c_tilde: Vec<Rational>,
    pub basic_a: RMatrix,
    pub basic_b: Vec<Rational>,
    pub s_shift: RMatrix,
    pub v: RMatrix,
}

/// `Ã = Ṽ S̃ Ṽ⁻¹`, `b̃ᵀ = eᵀ S̃ Ṽ⁻¹` with `Ṽ = [e | c̃ | … | c̃^p]`.
pub fn v_transform_basic(p: usize, c_tilde: &[Rational]) -> Result<ParallelIteratedSpec, ConstructError> {
    if p < 1 || c_tilde.len() != p + 1 {
        return Err(ConstructError::Input(format!(
            "need p >= 1 and p + 1 abscissas, got p = {p} with {} abscissas",
            c_tilde.len()
        )));
    }
    let v = vandermonde_powers(c_tilde, 0, p as u32);
    let v_inv = crate::exact::inverse(&v)?.ok_or(ConstructError::DuplicateAbscissas)?;
    let s_shift = RMatrix::from_fn(p + 1, p + 1, |i, j| {
        if i == j + 1 {
            Rational::new(1.into(), (i as i64).into())
        } else {
            Rational::zero()
        }
    });
    let basic_a = v.mul(&s_shift).mul(&v_inv);
    let basic_b = s_shift.mul(&v_inv).vec_mul(&vec![Rational::one(); p + 1]);
    Ok(ParallelIteratedSpec {
        p,
        c_tilde: c_tilde.to_vec(),
        basic_a,
        basic_b,
        s_shift,
        v,
    })
}

/// The unreduced `p(p+1)`-stage iterated tableau: a zero first block, then
/// `p − 1` blocks each applying `Ã` to the previous one, weights `b̃` on the last.
pub fn parallel_iterated_full(spec: &ParallelIteratedSpec) -> Result<Tableau, ConstructError> {
    let (p, m) = (spec.p, spec.p + 1);
    let s = p * m;
    let mut a = RMatrix::zeros(s, s);
    for k in 1..p {
        for i in 0..m {
            for j in 0..m {
                a.set(k * m + i, (k - 1) * m + j, spec.basic_a[(i, j)].clone());
            }
        }
    }
    let mut b = vec![Rational::zero(); s];
    b[(p - 1) * m..].clone_from_slice(&spec.basic_b);
    Ok(Tableau::new(format!("({s},{p},{p})"), a, b, None)?)
}

/// Parallel-iterated `(p², p, p)` method: the full iterated tableau with its
/// first `p + 1` identical stages merged into one.
pub fn parallel_iterated(p: usize, c_tilde: &[Rational]) -> Result<Tableau, ConstructError> {
    if p < 2 {
        return Err(ConstructError::Input(format!("need p >= 2, got {p}")));
    }
    let spec = v_transform_basic(p, c_tilde)?;
    let full = parallel_iterated_full(&spec)?;
    let m = p + 1;
    let mut blocks = vec![(0..m).collect::<Vec<_>>()];
    blocks.extend((m..full.stages()).map(|i| vec![i]));
    let reduced = reduce_by_partition(&full, &blocks, format!("({},{p},{p})", p * p))
        .expect("the first block consists of identical zero rows");
    assert_eq!(
        stability_polynomial(&full).trimmed(),
        stability_polynomial(&reduced).trimmed(),
        "consolidation changed the stability polynomial"
    );
    Ok(reduced)
}

/// `Ã·c̃^(k−1) = c̃^k / k` for `k = 1..=p`.
pub fn basic_stage_order_holds(spec: &ParallelIteratedSpec) -> bool {
    (1..=spec.p as u32).all(|k| {
        let lhs = spec
            .basic_a
            .mul_vec(&crate::exact::pow_entries(&spec.c_tilde, k - 1));
        let kr = int(i64::from(k));
        let rhs: Vec<Rational> = crate::exact::pow_entries(&spec.c_tilde, k)
            .into_iter()
            .map(|x| x / &kr)
            .collect();
        lhs == rhs
    })
}
