//! Butcher tableau model and the structural analyses that only need `(A, b, c)`.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{parse_rational, to_f64, ExactError, RMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("invalid JSON tableau document: {0}")]
    Json(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("A must be square with one row per weight: A is {rows}x{cols}, b has {b} entries")]
    Shape { rows: usize, cols: usize, b: usize },
    #[error("A is not strictly lower triangular: a[{row}][{col}] = {value}")]
    NotExplicit { row: usize, col: usize, value: String },
    #[error("stage {stage}: c = {given} but the row sum of A is {row_sum}")]
    StageConsistency { stage: usize, given: String, row_sum: String },
    #[error("reducibility search supports at most {max} stages, tableau has {stages}")]
    TooManyStages { stages: usize, max: usize },
}

/// An explicit Runge–Kutta method with exact coefficients.
///
/// `A` is strictly lower triangular and `c = A·e` holds exactly; both are
/// checked at construction, so every `Tableau` value is valid.
#[derive(Clone, PartialEq, Eq)]
pub struct Tableau {
    name: String,
    a: RMatrix,
    b: Vec<Rational>,
    c: Vec<Rational>,
    pub claimed_order: Option<u32>,
    pub claimed_wso: Option<u32>,
}

impl Tableau {
    /// Validates and builds a tableau; `c` defaults to the row sums of `A`.
    pub fn new(
        name: impl Into<String>,
        a: RMatrix,
        b: Vec<Rational>,
        c: Option<Vec<Rational>>,
    ) -> Result<Self, TableauError> {
        let s = b.len();
        if a.rows() != s || a.cols() != s {
            return Err(TableauError::Shape {
                rows: a.rows(),
                cols: a.cols(),
                b: s,
            });
        }
        for i in 0..s {
            for j in i..s {
                if !a[(i, j)].is_zero() {
                    return Err(TableauError::NotExplicit {
                        row: i + 1,
                        col: j + 1,
                        value: a[(i, j)].to_string(),
                    });
                }
            }
        }
        let row_sums: Vec<Rational> = (0..s).map(|i| a.row(i).iter().sum()).collect();
        let c = match c {
            None => row_sums,
            Some(c) => {
                if c.len() != s {
                    return Err(TableauError::Shape {
                        rows: s,
                        cols: c.len(),
                        b: s,
                    });
                }
                if let Some(i) = (0..s).find(|&i| c[i] != row_sums[i]) {
                    return Err(TableauError::StageConsistency {
                        stage: i + 1,
                        given: c[i].to_string(),
                        row_sum: row_sums[i].to_string(),
                    });
                }
                c
            }
        };
        Ok(Self {
            name: name.into(),
            a,
            b,
            c,
            claimed_order: None,
            claimed_wso: None,
        })
    }

    pub fn with_claims(mut self, order: Option<u32>, wso: Option<u32>) -> Self {
        self.claimed_order = order;
        self.claimed_wso = wso;
        self
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &RMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    /// Number of distinct abscissas.
    pub fn distinct_abscissas(&self) -> usize {
        let mut seen: Vec<&Rational> = Vec::new();
        for ci in &self.c {
            if !seen.contains(&ci) {
                seen.push(ci);
            }
        }
        seen.len()
    }

    /// Rows `bᵀ, bᵀA, …, bᵀA^(s−1)`.
    pub fn weight_krylov_rows(&self) -> Vec<Vec<Rational>> {
        let mut rows = Vec::with_capacity(self.stages());
        let mut current = self.b.clone();
        for _ in 0..self.stages() {
            let next = self.a.vec_mul(&current);
            rows.push(current);
            current = next;
        }
        rows
    }

    /// Same method with the stages renumbered: new stage `i` is old stage
    /// `perm[i]`. Fails if the renumbering breaks explicitness.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, TableauError> {
        let s = self.stages();
        assert_eq!(perm.len(), s);
        let a = RMatrix::from_fn(s, s, |i, j| self.a[(perm[i], perm[j])].clone());
        let b = perm.iter().map(|&i| self.b[i].clone()).collect();
        Tableau::new(self.name.clone(), a, b, None)
            .map(|t| t.with_claims(self.claimed_order, self.claimed_wso))
    }

    pub fn to_document(&self) -> TableauDocument {
        TableauDocument {
            spec_version: Some(crate::SPEC_VERSION.to_string()),
            name: self.name.clone(),
            a: self
                .a
                .to_rows()
                .into_iter()
                .map(|r| r.iter().map(|x| Entry::Text(x.to_string())).collect())
                .collect(),
            b: self.b.iter().map(|x| Entry::Text(x.to_string())).collect(),
            c: Some(self.c.iter().map(|x| Entry::Text(x.to_string())).collect()),
            claimed_order: self.claimed_order,
            claimed_wso: self.claimed_wso,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("tableau document serializes")
    }
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tableau")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b.iter().map(ToString::to_string).collect::<Vec<_>>())
            .field("c", &self.c.iter().map(ToString::to_string).collect::<Vec<_>>())
            .finish()
    }
}

/// A numeric entry of a tableau document: a rational/decimal string or a
/// JSON integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Text(String),
    Integer(i64),
}

impl Entry {
    pub fn to_rational(&self) -> Result<Rational, ExactError> {
        match self {
            Entry::Text(s) => parse_rational(s),
            Entry::Integer(n) => Ok(Rational::from_integer((*n).into())),
        }
    }
}

/// On-disk JSON form of a tableau.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableauDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_version: Option<String>,
    pub name: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Entry>>,
    pub b: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_wso: Option<u32>,
}

impl TableauDocument {
    pub fn into_tableau(self) -> Result<Tableau, TableauError> {
        let rows = self
            .a
            .iter()
            .map(|r| r.iter().map(Entry::to_rational).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let a = RMatrix::from_rows(rows)?;
        let b = self.b.iter().map(Entry::to_rational).collect::<Result<Vec<_>, _>>()?;
        let c = self
            .c
            .as_ref()
            .map(|c| c.iter().map(Entry::to_rational).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        Ok(Tableau::new(self.name, a, b, c)?.with_claims(self.claimed_order, self.claimed_wso))
    }
}

pub fn parse_tableau(document: &str) -> Result<Tableau, TableauError> {
    let doc: TableauDocument =
        serde_json::from_str(document).map_err(|e| TableauError::Json(e.to_string()))?;
    doc.into_tableau()
}

/// `R(z) = Σ coeffs[j] z^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityPolynomial {
    pub coeffs: Vec<Rational>,
}

impl StabilityPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Truncated exponential `Σ_{j≤p} z^j/j!`.
    pub fn exponential_partial_sum(p: usize) -> Self {
        let mut coeffs = Vec::with_capacity(p + 1);
        let mut term = Rational::one();
        for j in 0..=p {
            if j > 0 {
                term /= Rational::from_integer(j.into());
            }
            coeffs.push(term.clone());
        }
        Self { coeffs }
    }

    /// Coefficients with trailing zeros removed.
    pub fn trimmed(&self) -> Vec<Rational> {
        self.coeffs[..=self.degree()].to_vec()
    }

    pub fn is_exponential_partial_sum(&self, p: usize) -> bool {
        self.trimmed() == Self::exponential_partial_sum(p).coeffs
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + to_f64(c))
    }
}

pub fn stability_polynomial(t: &Tableau) -> StabilityPolynomial {
    let s = t.stages();
    let mut coeffs = Vec::with_capacity(s + 1);
    coeffs.push(Rational::one());
    // bᵀA^(j−1)e = bᵀA^(j−2)c
    let mut v = t.c.to_vec();
    let mut weight = crate::exact::dot(&t.b, &vec![Rational::one(); s]);
    for _ in 0..s {
        coeffs.push(weight);
        weight = crate::exact::dot(&t.b, &v);
        v = t.a.mul_vec(&v);
    }
    StabilityPolynomial { coeffs }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMetrics {
    /// `max{|a_ij|, |b_i|, |c_i|}`
    pub d: Rational,
    /// Smallest entry of `A` and `b`.
    pub min_entry: Rational,
    pub abscissas_in_unit_interval: bool,
}

pub fn coefficient_metrics(t: &Tableau) -> CoefficientMetrics {
    let d = t
        .a
        .entries()
        .iter()
        .chain(&t.b)
        .chain(&t.c)
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero);
    let min_entry = t
        .a
        .entries()
        .iter()
        .chain(&t.b)
        .min()
        .cloned()
        .unwrap_or_else(Rational::zero);
    let unit = t
        .c
        .iter()
        .all(|c| !c.is_negative() && *c <= Rational::one());
    CoefficientMetrics {
        d,
        min_entry,
        abscissas_in_unit_interval: unit,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NonNegativity {
    pub a_nonneg: bool,
    pub b_nonneg: bool,
}

pub fn nonnegativity_report(t: &Tableau) -> NonNegativity {
    NonNegativity {
        a_nonneg: t.a.entries().iter().all(|x| !x.is_negative()),
        b_nonneg: t.b.iter().all(|x| !x.is_negative()),
    }
}

/// Radius of absolute monotonicity of `R`: the largest `r ≥ 0` with
/// `R^(k)(−r) ≥ 0` for every `k`, found by bisection to 1e−12.
pub fn linear_ssp_coefficient(r: &StabilityPolynomial) -> f64 {
    const TOL: f64 = 1e-12;
    let coeffs: Vec<f64> = r.trimmed().iter().map(to_f64).collect();
    if coeffs.iter().any(|&c| c < 0.0) {
        return 0.0;
    }
    // derivative k of R, as coefficient lists
    let mut derivs = vec![coeffs.clone()];
    for k in 1..coeffs.len() {
        let prev = &derivs[k - 1];
        derivs.push((1..prev.len()).map(|j| prev[j] * j as f64).collect());
    }
    let monotone_at = |x: f64| {
        derivs.iter().all(|d| {
            let v = d.iter().rev().fold(0.0, |acc, c| acc * (-x) + c);
            v >= 0.0
        })
    };
    if coeffs.len() <= 1 {
        return f64::INFINITY;
    }
    let mut hi = 1.0;
    while monotone_at(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    while hi - lo > TOL {
        let mid = 0.5 * (lo + hi);
        if monotone_at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest stage count the reducibility search accepts.
pub const MAX_REDUCIBILITY_STAGES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducibilityCertificate {
    pub reducible: bool,
    /// Blocks of 0-based stage indices, ordered by smallest member.
    pub partition: Option<Vec<Vec<usize>>>,
    /// `B` with `A·S = S·B`.
    pub b_matrix: Option<RMatrix>,
    /// Weights of the reduced method: `Sᵀb`.
    pub reduced_weights: Option<Vec<Rational>>,
}

impl ReducibilityCertificate {
    pub fn partition_matrix(&self, stages: usize) -> Option<RMatrix> {
        let blocks = self.partition.as_ref()?;
        Some(partition_matrix(blocks, stages))
    }
}

pub fn partition_matrix(blocks: &[Vec<usize>], stages: usize) -> RMatrix {
    let mut s = RMatrix::zeros(stages, blocks.len());
    for (j, block) in blocks.iter().enumerate() {
        for &i in block {
            s.set(i, j, Rational::one());
        }
    }
    s
}

/// `B` for a partition whose column space is `A`-invariant, else `None`.
pub fn lumped_matrix(a: &RMatrix, blocks: &[Vec<usize>]) -> Option<RMatrix> {
    let r = blocks.len();
    let mut b = RMatrix::zeros(r, r);
    for (m, cols) in blocks.iter().enumerate() {
        let sums: Vec<Rational> = (0..a.rows())
            .map(|i| cols.iter().map(|&k| &a[(i, k)]).sum())
            .collect();
        for (l, rows) in blocks.iter().enumerate() {
            let first = &sums[rows[0]];
            if rows.iter().any(|&i| sums[i] != *first) {
                return None;
            }
            b.set(l, m, first.clone());
        }
    }
    Some(b)
}

/// Coarsest partition refining the equal-abscissa partition whose indicator
/// space is `A`-invariant. Every invariant partition refines this one.
fn coarsest_invariant_partition(t: &Tableau) -> Vec<Vec<usize>> {
    let s = t.stages();
    let mut label: Vec<usize> = {
        let mut ids: Vec<&Rational> = Vec::new();
        t.c.iter()
            .map(|ci| match ids.iter().position(|x| *x == ci) {
                Some(p) => p,
                None => {
                    ids.push(ci);
                    ids.len() - 1
                }
            })
            .collect()
    };
    loop {
        let blocks = blocks_from_labels(&label);
        let mut keys: HashMap<(usize, Vec<Rational>), usize> = HashMap::new();
        let mut next = vec![0; s];
        for i in 0..s {
            let signature: Vec<Rational> = blocks
                .iter()
                .map(|cols| cols.iter().map(|&k| &t.a[(i, k)]).sum())
                .collect();
            let n = keys.len();
            next[i] = *keys.entry((label[i], signature)).or_insert(n);
        }
        if keys.len() == blocks.len() {
            return blocks;
        }
        label = next;
    }
}

fn blocks_from_labels(label: &[usize]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, &l) in label.iter().enumerate() {
        match order.iter().position(|&x| x == l) {
            Some(p) => blocks[p].push(i),
            None => {
                order.push(l);
                blocks.push(vec![i]);
            }
        }
    }
    blocks
}

/// Calls `visit` with every partition of `items` into exactly `k` blocks,
/// as restricted-growth labels. Stops early when `visit` returns true.
fn partitions_with_blocks(n: usize, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        labels: &mut Vec<usize>,
        n: usize,
        k: usize,
        used: usize,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let i = labels.len();
        if i == n {
            return used == k && visit(labels);
        }
        // not enough items left to open the remaining blocks
        if k - used > n - i {
            return false;
        }
        let top = if used < k { used + 1 } else { used };
        for l in 0..top {
            labels.push(l);
            let done = rec(labels, n, k, used.max(l + 1), visit);
            labels.pop();
            if done {
                return true;
            }
        }
        false
    }
    if k == 0 || k > n {
        return false;
    }
    rec(&mut Vec::with_capacity(n), n, k, 0, visit)
}

/// Searches partitions that refine the equal-abscissa partition, most blocks
/// first, for one whose partition matrix satisfies `A·S = S·B`.
pub fn s_reducibility(t: &Tableau) -> Result<ReducibilityCertificate, TableauError> {
    let s = t.stages();
    if s > MAX_REDUCIBILITY_STAGES {
        return Err(TableauError::TooManyStages {
            stages: s,
            max: MAX_REDUCIBILITY_STAGES,
        });
    }
    let irreducible = ReducibilityCertificate {
        reducible: false,
        partition: None,
        b_matrix: None,
        reduced_weights: None,
    };
    let classes = coarsest_invariant_partition(t);
    if classes.len() == s {
        return Ok(irreducible);
    }
    for r in (classes.len()..s).rev() {
        if let Some(blocks) = first_invariant_refinement(t, &classes, r) {
            let b_matrix = lumped_matrix(&t.a, &blocks).expect("candidate was checked");
            let reduced_weights = blocks
                .iter()
                .map(|blk| blk.iter().map(|&i| &t.b[i]).sum())
                .collect();
            return Ok(ReducibilityCertificate {
                reducible: true,
                partition: Some(blocks),
                b_matrix: Some(b_matrix),
                reduced_weights: Some(reduced_weights),
            });
        }
    }
    unreachable!("the coarsest invariant partition itself is invariant")
}

/// First refinement of `classes` with exactly `r` blocks in total whose
/// indicator space is `A`-invariant.
fn first_invariant_refinement(
    t: &Tableau,
    classes: &[Vec<usize>],
    r: usize,
) -> Option<Vec<Vec<usize>>> {
    // distribute r blocks over the classes, each class getting 1..=len
    fn split_counts(
        classes: &[Vec<usize>],
        idx: usize,
        remaining: usize,
        counts: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if idx == classes.len() {
            if remaining == 0 {
                out.push(counts.clone());
            }
            return;
        }
        let rest_min = classes.len() - idx - 1;
        for k in 1..=classes[idx].len() {
            if k + rest_min > remaining {
                break;
            }
            counts.push(k);
            split_counts(classes, idx + 1, remaining - k, counts, out);
            counts.pop();
        }
    }
    let mut all_counts = Vec::new();
    split_counts(classes, 0, r, &mut Vec::new(), &mut all_counts);

    fn product(
        t: &Tableau,
        classes: &[Vec<usize>],
        counts: &[usize],
        idx: usize,
        acc: &mut Vec<Vec<usize>>,
    ) -> Option<Vec<Vec<usize>>> {
        if idx == classes.len() {
            let mut blocks = acc.clone();
            blocks.sort_by_key(|b| b[0]);
            return lumped_matrix(&t.a, &blocks).map(|_| blocks);
        }
        let members = &classes[idx];
        let mut found = None;
        partitions_with_blocks(members.len(), counts[idx], &mut |labels| {
            let mut local = vec![Vec::new(); counts[idx]];
            for (pos, &l) in labels.iter().enumerate() {
                local[l].push(members[pos]);
            }
            let base = acc.len();
            acc.extend(local);
            found = product(t, classes, counts, idx + 1, acc);
            acc.truncate(base);
            found.is_some()
        });
        found
    }

    all_counts
        .iter()
        .find_map(|counts| product(t, classes, counts, 0, &mut Vec::new()))
}

/// The equivalent method on the blocks of an `A`-invariant partition:
/// `A* = B`, `b* = Sᵀb`.
pub fn reduce_by_partition(
    t: &Tableau,
    blocks: &[Vec<usize>],
    name: impl Into<String>,
) -> Option<Tableau> {
    let b_matrix = lumped_matrix(&t.a, blocks)?;
    let weights = blocks
        .iter()
        .map(|blk| blk.iter().map(|&i| &t.b[i]).sum())
        .collect();
    Tableau::new(name, b_matrix, weights, None).ok()
}
