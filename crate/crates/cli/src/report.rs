//! JSON documents emitted by the command-line tool.

use serde::Serialize;
use serde_json::{json, Value};
use wso_rk::conditions::{
    audit_structure, classical_order, necessary_conditions, wso, ConditionsError, StructureAudit,
    WsoValue,
};
use wso_rk::exact::{to_f64, RMatrix, Rational};
use wso_rk::tableau::{
    coefficient_metrics, linear_ssp_coefficient, nonnegativity_report, stability_polynomial,
    NonNegativity, Tableau,
};
use wso_rk::SPEC_VERSION;

fn exact_or_float(r: &Rational, exact: bool) -> Value {
    if exact {
        Value::String(r.to_string())
    } else {
        json!(to_f64(r))
    }
}

fn matrix_json(m: &RMatrix) -> Value {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(ToString::to_string).collect::<Vec<_>>())
        .collect()
}

fn vector_json(v: &[Rational]) -> Value {
    v.iter().map(ToString::to_string).collect()
}

/// Finite values as numbers, bounds and infinity as text.
pub fn wso_json(q: WsoValue) -> Value {
    match q {
        WsoValue::Finite(q) => json!(q),
        other => json!(other.to_string()),
    }
}

#[derive(Debug, Serialize)]
struct Claims {
    order: Option<u32>,
    wso: Option<u32>,
    consistent: bool,
}

#[derive(Debug, Serialize)]
struct Bounds {
    relations: Vec<wso_rk::conditions::Relation>,
    minimal_stage_dims: Option<bool>,
    all_hold: bool,
}

impl From<StructureAudit> for Bounds {
    fn from(a: StructureAudit) -> Self {
        Bounds {
            relations: a.relations,
            minimal_stage_dims: a.minimal_stage_dims,
            all_hold: a.all_hold,
        }
    }
}

/// Outcome of `verify`: the JSON document and whether every check passed.
pub struct Verification {
    pub document: Value,
    pub passed: bool,
}

fn claims_consistent(t: &Tableau, order: usize, hit_cap: bool, q: WsoValue) -> bool {
    let order_ok = t.claimed_order.is_none_or(|claim| {
        let claim = claim as usize;
        claim == order || (hit_cap && claim >= order)
    });
    let wso_ok = t.claimed_wso.is_none_or(|claim| match q {
        WsoValue::Finite(q) => claim == q,
        WsoValue::AtLeast(q) => claim >= q,
        WsoValue::Infinite => false,
    });
    order_ok && wso_ok
}

fn necessary_json(t: &Tableau, q: WsoValue) -> Value {
    let Some(q) = q.finite().map(|q| q as usize) else {
        return Value::Null;
    };
    match necessary_conditions(t, q) {
        Ok(n) => json!({
            "q": n.q,
            "abscissas_distinct": n.abscissas_distinct,
            "L": n.l.as_ref().map(matrix_json),
            "beta": n.beta.as_deref().map(vector_json),
            "subdiagonal_zero": n.subdiagonal_zero,
            "all_hold": n.all_hold(),
        }),
        Err(ConditionsError::WsoRange { .. }) => Value::Null,
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn verify(t: &Tableau, max_order: usize, exact: bool) -> Result<Verification, ConditionsError> {
    let order = classical_order(t, max_order)?;
    let w = wso(t);
    let r = stability_polynomial(t);
    let metrics = coefficient_metrics(t);
    let NonNegativity { a_nonneg, b_nonneg } = nonnegativity_report(t);
    let audit = audit_structure(t);
    let consistent = claims_consistent(t, order.order, order.hit_cap, w.q);
    let passed = consistent && audit.all_hold;
    let mut document = json!({
        "spec_version": SPEC_VERSION,
        "name": t.name(),
        "stages": t.stages(),
        "order": order.order,
        "order_cap_reached": order.hit_cap,
        "wso": wso_json(w.q),
        "dim_Y": w.dim_y,
        "dim_K_q": w.dim_k_q,
        "distinct_abscissas": w.distinct_abscissas,
        "stability_coeffs": r.trimmed().iter().map(|c| exact_or_float(c, exact)).collect::<Vec<_>>(),
        "principal_error": order.principal_error,
        "D": exact_or_float(&metrics.d, exact),
        "linear_ssp": linear_ssp_coefficient(&r),
        "nonneg": { "A": a_nonneg, "b": b_nonneg },
        "bounds": Bounds::from(audit),
        "necessary_conditions": necessary_json(t, w.q),
        "claims": Claims {
            order: t.claimed_order,
            wso: t.claimed_wso,
            consistent,
        },
        "passed": passed,
    });
    if exact {
        let failing: Vec<Value> = order
            .failing_trees
            .iter()
            .map(|(tree, residual)| json!({ "tree": tree.to_string(), "residual": residual.to_string() }))
            .collect();
        document["principal_error_squared"] = json!(order.principal_error_squared.to_string());
        document["failing_trees"] = json!(failing);
    }
    Ok(Verification { document, passed })
}

/// Tableau document plus the headline checks, for constructed methods.
pub fn constructed(t: &Tableau, extra: Value) -> Result<Value, ConditionsError> {
    let order = classical_order(t, wso_rk::conditions::DEFAULT_ORDER_CAP)?;
    let w = wso(t);
    let audit = audit_structure(t);
    let mut doc = json!({
        "spec_version": SPEC_VERSION,
        "tableau": t.to_document(),
        "verification": {
            "stages": t.stages(),
            "order": order.order,
            "wso": wso_json(w.q),
            "dim_Y": w.dim_y,
            "dim_K_q": w.dim_k_q,
            "principal_error": order.principal_error,
            "audit_ok": audit.all_hold,
        },
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut doc, extra) {
        map.extend(more);
    }
    Ok(doc)
}

pub fn matrix(m: &RMatrix) -> Value {
    matrix_json(m)
}

pub fn vector(v: &[Rational]) -> Value {
    vector_json(v)
}
