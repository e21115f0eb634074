//! Order conditions via rooted trees, weak stage order via Krylov-space
//! orthogonality, and audits of the dimension inequalities that tie them to
//! the stage count.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{
    dot, int, is_zero_vec, pow_entries, rank, solve_sylvester, to_f64, vandermonde_powers,
    RMatrix, Rational,
};
use crate::tableau::{coefficient_metrics, stability_polynomial, Tableau};

/// Largest tree order the enumerator supports.
pub const MAX_TREE_ORDER: usize = 8;
pub const DEFAULT_ORDER_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionsError {
    #[error("tree order {requested} exceeds the supported maximum {max}")]
    OrderCap { requested: usize, max: usize },
    #[error("necessary conditions need 2 <= q <= s, got q = {q} for s = {s}")]
    WsoRange { q: usize, s: usize },
}

/// A rooted tree in canonical form: children are kept sorted, so isomorphic
/// trees compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedTree {
    children: Vec<RootedTree>,
}

impl RootedTree {
    pub fn leaf() -> Self {
        Self { children: Vec::new() }
    }

    pub fn from_children(mut children: Vec<RootedTree>) -> Self {
        children.sort();
        Self { children }
    }

    /// `[τ, …, τ]` with `n − 1` leaves.
    pub fn bushy(order: usize) -> Self {
        Self::from_children(vec![Self::leaf(); order.saturating_sub(1)])
    }

    /// Chain of `order` nodes.
    pub fn tall(order: usize) -> Self {
        let mut t = Self::leaf();
        for _ in 1..order {
            t = Self::from_children(vec![t]);
        }
        t
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    pub fn order(&self) -> usize {
        1 + self.children.iter().map(RootedTree::order).sum::<usize>()
    }

    /// γ(t) = |t| · Π γ(children)
    pub fn density(&self) -> u64 {
        self.order() as u64 * self.children.iter().map(RootedTree::density).product::<u64>()
    }

    /// σ(t) = Π σ(child)^m · m! over groups of `m` identical children.
    pub fn symmetry(&self) -> u64 {
        let mut sigma = 1u64;
        let mut i = 0;
        while i < self.children.len() {
            let mut j = i;
            while j < self.children.len() && self.children[j] == self.children[i] {
                j += 1;
            }
            let m = (j - i) as u32;
            let child = self.children[i].symmetry();
            sigma *= child.pow(m) * (1..=u64::from(m)).product::<u64>();
            i = j;
        }
        sigma
    }
}

impl Ord for RootedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl PartialOrd for RootedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for RootedTree {
    /// Bracket notation: `τ` for a leaf, `[t1,t2]` for a root with children.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.children.is_empty() {
            return write!(f, "τ");
        }
        write!(f, "[")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// All trees up to `MAX_TREE_ORDER`, each stored with the indices of its
/// children so elementary weights can be built bottom-up.
struct Forest {
    trees: Vec<RootedTree>,
    child_indices: Vec<Vec<usize>>,
    /// `order_start[n]` = index of the first tree of order `n`
    order_start: Vec<usize>,
}

fn forest() -> &'static Forest {
    static FOREST: OnceLock<Forest> = OnceLock::new();
    FOREST.get_or_init(|| {
        let mut trees = vec![RootedTree::leaf()];
        let mut child_indices = vec![Vec::new()];
        let mut order_start = vec![0, 0, 1];
        let mut orders = vec![1usize];
        for n in 2..=MAX_TREE_ORDER {
            // multisets of earlier trees (non-decreasing index lists) with total order n − 1
            let existing = trees.len();
            let mut found: Vec<Vec<usize>> = Vec::new();
            let mut stack: Vec<usize> = Vec::new();
            fn extend(
                start: usize,
                remaining: usize,
                existing: usize,
                orders: &[usize],
                stack: &mut Vec<usize>,
                found: &mut Vec<Vec<usize>>,
            ) {
                if remaining == 0 {
                    found.push(stack.clone());
                    return;
                }
                for idx in start..existing {
                    if orders[idx] <= remaining {
                        stack.push(idx);
                        extend(idx, remaining - orders[idx], existing, orders, stack, found);
                        stack.pop();
                    }
                }
            }
            extend(0, n - 1, existing, &orders, &mut stack, &mut found);
            let mut batch: Vec<(RootedTree, Vec<usize>)> = found
                .into_iter()
                .map(|idx| {
                    let tree = RootedTree::from_children(idx.iter().map(|&i| trees[i].clone()).collect());
                    (tree, idx)
                })
                .collect();
            batch.sort_by(|a, b| a.0.cmp(&b.0));
            for (tree, idx) in batch {
                trees.push(tree);
                child_indices.push(idx);
                orders.push(n);
            }
            order_start.push(trees.len());
        }
        Forest {
            trees,
            child_indices,
            order_start,
        }
    })
}

/// Every non-isomorphic rooted tree of order `1..=max_order`, by order.
pub fn enumerate_trees(max_order: usize) -> Result<Vec<RootedTree>, ConditionsError> {
    if max_order > MAX_TREE_ORDER {
        return Err(ConditionsError::OrderCap {
            requested: max_order,
            max: MAX_TREE_ORDER,
        });
    }
    let f = forest();
    Ok(f.trees[..f.order_start[max_order + 1]].to_vec())
}

/// Stage vector φ(t): `e` for a leaf, otherwise the entrywise product of
/// `A·φ(child)` over the children.
fn stage_weight(tree: &RootedTree, a: &RMatrix) -> Vec<Rational> {
    let mut out = vec![Rational::one(); a.rows()];
    for child in tree.children() {
        let v = a.mul_vec(&stage_weight(child, a));
        for (o, x) in out.iter_mut().zip(v) {
            *o *= x;
        }
    }
    out
}

/// Φ(t) = bᵀφ(t)
pub fn elementary_weight(tree: &RootedTree, t: &Tableau) -> Rational {
    dot(t.b(), &stage_weight(tree, t.a()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub order: usize,
    /// Trees of order `p + 1` whose condition fails, with `Φ(t) − 1/γ(t)`.
    pub failing_trees: Vec<(RootedTree, Rational)>,
    /// Exact `Σ ((1/σ)(1/γ − Φ))²` over trees of order `p + 1`.
    pub principal_error_squared: Rational,
    pub principal_error: f64,
    pub d: Rational,
    /// True when every order up to the cap passed.
    pub hit_cap: bool,
}

/// Order report from raw coefficients; `A` need not be triangular.
pub fn order_from_coefficients(a: &RMatrix, b: &[Rational], cap: usize) -> OrderReport {
    let f = forest();
    let max_order = (cap + 1).min(MAX_TREE_ORDER);
    let mut phi: Vec<Vec<Rational>> = Vec::new();
    let mut order = 0;
    let mut hit_cap = true;
    let mut failing = Vec::new();
    let mut err2 = Rational::zero();
    for n in 1..=max_order {
        let mut residuals = Vec::new();
        for idx in f.order_start[n]..f.order_start[n + 1] {
            let mut v = vec![Rational::one(); a.rows()];
            for &child in &f.child_indices[idx] {
                let av = a.mul_vec(&phi[child]);
                for (o, x) in v.iter_mut().zip(av) {
                    *o *= x;
                }
            }
            let tree = &f.trees[idx];
            let residual = dot(b, &v) - Rational::new(One::one(), tree.density().into());
            residuals.push((tree.clone(), residual));
            phi.push(v);
        }
        if n <= cap && residuals.iter().all(|(_, r)| r.is_zero()) {
            order = n;
            continue;
        }
        for (tree, residual) in residuals {
            let scaled = &residual / Rational::from_integer(tree.symmetry().into());
            err2 += &scaled * &scaled;
            if !residual.is_zero() {
                failing.push((tree, residual));
            }
        }
        hit_cap = n > cap;
        break;
    }
    let d = a
        .entries()
        .iter()
        .chain(b)
        .chain(&(0..a.rows()).map(|i| a.row(i).iter().sum()).collect::<Vec<Rational>>())
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero);
    OrderReport {
        order,
        failing_trees: failing,
        principal_error: to_f64(&err2).sqrt(),
        principal_error_squared: err2,
        d,
        hit_cap,
    }
}

/// Classical order up to `cap` (at most `MAX_TREE_ORDER − 1` gives a
/// principal error as well).
pub fn classical_order(t: &Tableau, cap: usize) -> Result<OrderReport, ConditionsError> {
    if cap > MAX_TREE_ORDER {
        return Err(ConditionsError::OrderCap {
            requested: cap,
            max: MAX_TREE_ORDER,
        });
    }
    let mut report = order_from_coefficients(t.a(), t.b(), cap);
    report.d = coefficient_metrics(t).d;
    Ok(report)
}

/// τ^(k) = A·c^(k−1) − c^k / k
pub fn stage_residual(k: u32, t: &Tableau) -> Vec<Rational> {
    assert!(k >= 1, "stage residuals start at k = 1");
    let ac = t.a().mul_vec(&pow_entries(t.c(), k - 1));
    let ck = pow_entries(t.c(), k);
    let kr = int(i64::from(k));
    ac.into_iter().zip(ck).map(|(x, y)| x - y / &kr).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum WsoValue {
    Finite(u32),
    /// Orthogonality holds through `n_c` but the direct moment check failed;
    /// only a lower bound is claimed.
    AtLeast(u32),
    Infinite,
}

impl WsoValue {
    /// Value usable in inequalities: `u32::MAX` for infinity.
    pub fn lower_bound(self) -> u32 {
        match self {
            WsoValue::Finite(q) | WsoValue::AtLeast(q) => q,
            WsoValue::Infinite => u32::MAX,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            WsoValue::Finite(q) => Some(q),
            _ => None,
        }
    }
}

impl std::fmt::Display for WsoValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WsoValue::Finite(q) => write!(f, "{q}"),
            WsoValue::AtLeast(q) => write!(f, ">={q}"),
            WsoValue::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WsoAnalysis {
    pub q: WsoValue,
    /// τ^(1), …, τ^(k) for every k that was examined.
    pub residual_vectors: Vec<Vec<Rational>>,
    pub distinct_abscissas: usize,
    pub dim_k_q: usize,
    pub dim_y: usize,
    /// `bᵀA^i v = 0` for every generator `v` of `K_q`.
    pub orthogonal: bool,
    pub order: usize,
    /// `p + q ≤ s + 1`, vacuous for `p < 2`.
    pub bound_ok: bool,
}

fn krylov_generators(a: &RMatrix, vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let s = a.rows();
    let mut out = Vec::new();
    for v in vectors {
        let mut current = v.clone();
        for _ in 0..s {
            if is_zero_vec(&current) {
                break;
            }
            let next = a.mul_vec(&current);
            out.push(current);
            current = next;
        }
    }
    out
}

fn rank_of_rows(rows: &[Vec<Rational>], width: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank(&RMatrix::from_rows(rows.to_vec()).unwrap_or_else(|_| RMatrix::zeros(0, width)))
}

/// `Y = span{b, Aᵀb, …}` dimension.
pub fn dim_y(t: &Tableau) -> usize {
    rank_of_rows(&t.weight_krylov_rows(), t.stages())
}

/// Weak stage order by exhaustive Krylov orthogonality.
///
/// Once orthogonality holds through `n_c` (the number of distinct
/// abscissas), every `A^i c^j` lies in `K_{n_c}`, so the method has infinite
/// weak stage order exactly when `bᵀA^i c^j = 0` for all `i` and
/// `1 ≤ j < n_c`. That moment check is run directly.
pub fn wso(t: &Tableau) -> WsoAnalysis {
    let s = t.stages();
    let y_rows = t.weight_krylov_rows();
    let n_c = t.distinct_abscissas();
    let orthogonal_to_y =
        |v: &[Rational]| -> bool { krylov_generators(t.a(), &[v.to_vec()]).iter().all(|g| y_rows.iter().all(|y| dot(y, g).is_zero())) };

    let mut residuals = vec![stage_residual(1, t)];
    let mut q = None;
    for k in 2..=n_c as u32 {
        let tau = stage_residual(k, t);
        let ok = orthogonal_to_y(&tau);
        residuals.push(tau);
        if !ok {
            q = Some(WsoValue::Finite(k - 1));
            break;
        }
    }
    let q = q.unwrap_or_else(|| {
        let moments_vanish = (1..n_c as u32).all(|j| {
            let cj = pow_entries(t.c(), j);
            y_rows.iter().all(|y| dot(y, &cj).is_zero())
        });
        if moments_vanish {
            WsoValue::Infinite
        } else {
            WsoValue::AtLeast(n_c as u32)
        }
    });

    let k_count = match q {
        WsoValue::Finite(q) => q as usize,
        _ => residuals.len(),
    };
    let generators = krylov_generators(t.a(), &residuals[..k_count]);
    let dim_k_q = rank_of_rows(&generators, s);
    let orthogonal = generators
        .iter()
        .all(|g| y_rows.iter().all(|y| dot(y, g).is_zero()));
    let order = order_from_coefficients(t.a(), t.b(), DEFAULT_ORDER_CAP).order;
    let bound_ok = order < 2 || (order as u64 + u64::from(q.lower_bound())) <= s as u64 + 1;
    WsoAnalysis {
        q,
        residual_vectors: residuals,
        distinct_abscissas: n_c,
        dim_k_q,
        dim_y: rank_of_rows(&y_rows, s),
        orthogonal,
        order,
        bound_ok,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub relation: String,
    pub holds: bool,
}

/// The dimension chain `p ≤ deg R ≤ dim Y ≤ s − dim K_q` and the related
/// stage bounds, evaluated on one tableau.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureAudit {
    pub stages: usize,
    pub order: usize,
    pub wso: WsoValue,
    pub distinct_abscissas: usize,
    pub stability_degree: usize,
    pub dim_y: usize,
    pub dim_k_q: usize,
    pub relations: Vec<Relation>,
    /// Present when `p + q = s + 1`: whether `dim K_q = q − 1` and `dim Y = p`.
    pub minimal_stage_dims: Option<bool>,
    pub all_hold: bool,
}

pub fn audit_structure(t: &Tableau) -> StructureAudit {
    let w = wso(t);
    let s = t.stages();
    let p = w.order;
    let deg = stability_polynomial(t).degree();
    let mut relations = vec![
        Relation {
            relation: format!("p <= deg R: {p} <= {deg}"),
            holds: p <= deg,
        },
        Relation {
            relation: format!("deg R <= dim Y: {deg} <= {}", w.dim_y),
            holds: deg <= w.dim_y,
        },
        Relation {
            relation: format!("dim Y <= s - dim K_q: {} <= {s} - {}", w.dim_y, w.dim_k_q),
            holds: w.dim_y + w.dim_k_q <= s,
        },
        Relation {
            relation: "Y orthogonal to K_q".to_string(),
            holds: w.orthogonal,
        },
    ];
    let mut minimal_stage_dims = None;
    if let WsoValue::Finite(q) = w.q {
        let q = q as usize;
        if q < w.distinct_abscissas {
            relations.push(Relation {
                relation: format!("dim K_q >= q - 1: {} >= {}", w.dim_k_q, q - 1),
                holds: w.dim_k_q + 1 >= q,
            });
        }
        if p >= 2 {
            relations.push(Relation {
                relation: format!("p + q <= s + 1: {p} + {q} <= {}", s + 1),
                holds: p + q <= s + 1,
            });
            relations.push(Relation {
                relation: format!("q < n_c: {q} < {}", w.distinct_abscissas),
                holds: q < w.distinct_abscissas,
            });
            if p + q == s + 1 {
                minimal_stage_dims = Some(w.dim_k_q + 1 == q && w.dim_y == p);
            }
        }
    } else if p >= 2 {
        // infinite or unresolved WSO with p ≥ 2 contradicts q < n_c
        relations.push(Relation {
            relation: format!("q < n_c with p = {p} >= 2"),
            holds: false,
        });
    }
    let all_hold = relations.iter().all(|r| r.holds) && minimal_stage_dims != Some(false);
    StructureAudit {
        stages: s,
        order: p,
        wso: w.q,
        distinct_abscissas: w.distinct_abscissas,
        stability_degree: deg,
        dim_y: w.dim_y,
        dim_k_q: w.dim_k_q,
        relations,
        minimal_stage_dims,
        all_hold,
    }
}

/// Block views of `A` and `c` for a given `q`: stage 1, the upper block of
/// stages `2..=q`, and the lower block `q+1..=s`.
struct Blocks {
    pub a22: RMatrix,
    pub a32: RMatrix,
    pub a33: RMatrix,
    pub c_u: Vec<Rational>,
    pub c_l: Vec<Rational>,
}

fn blocks(a: &RMatrix, c: &[Rational], q: usize) -> Blocks {
    let s = c.len();
    Blocks {
        a22: a.block(1..q, 1..q),
        a32: a.block(q..s, 1..q),
        a33: a.block(q..s, q..s),
        c_u: c[1..q].to_vec(),
        c_l: c[q..s].to_vec(),
    }
}

/// `[c, c², …, c^(q−1)]` and `[c²/2, c³/3, …, c^q/q]` for one abscissa block.
pub(crate) fn moment_matrices(c: &[Rational], q: usize) -> (RMatrix, RMatrix) {
    let v = vandermonde_powers(c, 1, q as u32 - 1);
    let w = vandermonde_powers(c, 2, q as u32);
    let w = RMatrix::from_fn(w.rows(), w.cols(), |i, j| &w[(i, j)] / int(j as i64 + 2));
    (v, w)
}

/// Solves `A33·L − L·(W_U V_U⁻¹) = (A33·V_L − W_L)·V_U⁻¹` for `L`.
/// `None` when `V_U` is singular.
pub(crate) fn solve_first_sylvester(
    a33: &RMatrix,
    c_u: &[Rational],
    c_l: &[Rational],
    q: usize,
) -> Option<RMatrix> {
    let (v_u, w_u) = moment_matrices(c_u, q);
    let (v_l, w_l) = moment_matrices(c_l, q);
    let v_u_inv = crate::exact::inverse(&v_u).ok()??;
    let rhs = a33.mul(&v_l).sub(&w_l).mul(&v_u_inv);
    let shift = w_u.mul(&v_u_inv);
    solve_sylvester(a33, &shift, &rhs).ok()
}

/// The structure a method with WSO `q` and `dim K_q = q − 1` must have.
#[derive(Debug, Clone, PartialEq)]
pub struct NecessaryConditions {
    pub q: usize,
    pub abscissas_distinct: bool,
    /// `L` solving both Sylvester equations, when it exists.
    pub l: Option<RMatrix>,
    /// `β` with `b = [[1,0],[0,−Lᵀ],[0,I]]·β`, when `b` has that form.
    pub beta: Option<Vec<Rational>>,
    pub subdiagonal_zero: bool,
}

impl NecessaryConditions {
    pub fn all_hold(&self) -> bool {
        self.abscissas_distinct && self.l.is_some() && self.beta.is_some() && self.subdiagonal_zero
    }
}

pub fn necessary_conditions(t: &Tableau, q: usize) -> Result<NecessaryConditions, ConditionsError> {
    let s = t.stages();
    if q < 2 || q > s {
        return Err(ConditionsError::WsoRange { q, s });
    }
    let c = t.c();
    let head = &c[..(q + 1).min(s)];
    let abscissas_distinct =
        (0..head.len()).all(|i| (i + 1..head.len()).all(|j| head[i] != head[j]));
    let subdiagonal_zero = q >= s || t.a()[(q, q - 1)].is_zero();

    let blk = blocks(t.a(), c, q);
    let l = if abscissas_distinct {
        solve_first_sylvester(&blk.a33, &blk.c_u, &blk.c_l, q).filter(|l| {
            // second Sylvester equation: L·A22 − A33·L = A32
            l.mul(&blk.a22).sub(&blk.a33.mul(l)) == blk.a32
        })
    } else {
        None
    };
    let beta = l.as_ref().and_then(|l| {
        let b = t.b();
        let b_l = &b[q..];
        let b_u = &b[1..q];
        let implied: Vec<Rational> = l.vec_mul(b_l).into_iter().map(|x| -x).collect();
        (implied == b_u).then(|| {
            let mut beta = vec![b[0].clone()];
            beta.extend_from_slice(b_l);
            beta
        })
    });
    Ok(NecessaryConditions {
        q,
        abscissas_distinct,
        l,
        beta,
        subdiagonal_zero,
    })
}
