//! JSON rendering of library results, plus a plain-text view of the same tree.

use monodyn::dynamics::{
    ClassificationReport, CosetCycle, Decomposition, DynamicalDegree, FibrationWitness, InvariantFamily, PeriodicPoint,
    WildnessCertificate,
};
use monodyn::oracle::Containment;
use monodyn::torus::{Coset, Subtorus};
use monodyn::{IntMatrix, IntPoly, KummerNumber, Lattice};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rational(x: &BigRational) -> Value {
    json!(x.to_string())
}

pub fn matrix(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| ints(m.row(i))).collect())
}

pub fn lattice(l: &Lattice) -> Value {
    matrix(l.basis())
}

pub fn point(x: &[KummerNumber]) -> Value {
    Value::Array(x.iter().map(|c| json!(c.to_string())).collect())
}

pub fn poly(p: &IntPoly) -> Value {
    json!({ "coefficients": ints(p.coeffs()), "text": p.to_string() })
}

pub fn subtorus(s: &Subtorus) -> Value {
    json!({
        "dimension": s.dim(),
        "annihilator": lattice(s.annihilator()),
        "cocharacters": matrix(&s.cochar_basis().transpose()),
    })
}

pub fn coset(c: &Coset) -> Value {
    json!({ "base": point(&c.base), "annihilator": lattice(c.torus.annihilator()) })
}

pub fn degree(d: &DynamicalDegree) -> Value {
    match d {
        DynamicalDegree::One(q) => json!({ "equals_one": true, "ell": q.ell, "m": q.m }),
        DynamicalDegree::Greater(r) => json!({
            "equals_one": false,
            "lo": rational(&r.lo),
            "hi": rational(&r.hi),
            "approx": format!("{:.12}", r.midpoint_f64()),
        }),
    }
}

pub fn witness(w: &FibrationWitness, verified: bool) -> Value {
    json!({ "iterate": w.ell, "b": ints(&w.b), "kernel": lattice(&w.kernel), "verified": verified })
}

pub fn wildness(c: &WildnessCertificate) -> Value {
    json!({
        "ell": c.ell,
        "m": c.m,
        "phi0": matrix(&c.phi0),
        "projection": matrix(&c.projection),
        "gamma_bar": point(&c.gamma_bar),
        "primes": c.primes,
        "exponent_matrix": c.exponent_matrix.iter().map(|r| r.iter().map(rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "rank": c.rank,
        "dense": c.is_dense(),
        "refutation": c.refutation.as_ref().map(|r| json!({ "c": ints(&r.c), "b": ints(&r.b) })),
    })
}

pub fn decomposition(d: &Decomposition) -> Value {
    json!({
        "ell": d.ell,
        "minpoly": poly(&d.minpoly),
        "r": d.r,
        "q": poly(&d.q),
        "x1": subtorus(&d.x1),
        "x2": subtorus(&d.x2),
        "gamma1": point(&d.gamma1),
        "gamma2": point(&d.gamma2),
        "a1": matrix(&d.a1),
        "a2": matrix(&d.a2),
        "beta2": point(&d.beta2),
        "lattices_disjoint": d.lattices_disjoint(),
    })
}

pub fn cycle(c: &CosetCycle) -> Value {
    json!({
        "torsion_order": c.torsion_order,
        "length": c.cosets.len(),
        "verified": c.verified,
        "cosets": c.cosets.iter().map(coset).collect::<Vec<_>>(),
    })
}

pub fn family(f: &InvariantFamily) -> Value {
    json!({
        "decomposition": decomposition(&f.decomposition),
        "cycle_count": f.cycles.len(),
        "cycles": f.cycles.iter().map(cycle).collect::<Vec<_>>(),
    })
}

pub fn containment(c: &Containment, degree_bound: u32) -> Value {
    match c {
        Containment::NotContained { q, monomials, points, attempts } => json!({
            "verdict": "NOT_CONTAINED",
            "degree_bound": degree_bound,
            "prime": q,
            "monomials": monomials,
            "points": points,
            "attempts": attempts,
        }),
        Containment::Undecided { attempts, monomials, points } => json!({
            "verdict": "UNDECIDED",
            "degree_bound": degree_bound,
            "monomials": monomials,
            "points": points,
            "attempts": attempts,
        }),
    }
}

pub fn periodic_point(p: &PeriodicPoint) -> Value {
    json!({ "exponents": p.exponents, "point": point(&p.point), "period": p.period })
}

pub fn classification(r: &ClassificationReport, verified: bool, degree_bound: u32) -> Value {
    json!({
        "verdict": r.verdict.to_string(),
        "dynamical_degree": degree(&r.dynamical_degree),
        "fibration": r.fibration.as_ref().map(|w| witness(w, verified)),
        "wildness": r.wildness.as_ref().map(wildness),
        "invariant_family": r.invariant_family.as_ref().map(family),
        "density": r.density.as_ref().map(|c| containment(c, degree_bound)),
        "flags": r.flags,
    })
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        Value::Array(a)
            if a.iter().all(|x| x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))) =>
        {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn text_into(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text_into(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}- #{i}\n"));
                        text_into(x, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

/// Indented `key: value` rendering for terminals.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    text_into(v, 0, &mut out);
    out
}
