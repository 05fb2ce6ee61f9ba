//! JSON encodings for the numeric data types, fixed at `f64`.
//!
//! Complex numbers are `[re, im]` pairs, matrices row-major arrays of rows.
//! Numbers go through serde_json's shortest-round-trip printer, so every
//! value survives print/parse bit-exactly.

use serde_json::{json, Value};

use crate::autgrp::{Potential, TameGenerator};
use crate::darboux::DarbouxPoint;
use crate::error::{Error, Result};
use crate::hat::HatPair;
use crate::linalg::Mat;
use crate::rep::AdhmData;
use crate::slice::SliceForm;
use crate::C64;

fn bad(what: &str) -> Error {
    Error::Parse(format!("malformed {what}"))
}

pub fn complex_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value) -> Result<C64> {
    let pair = v.as_array().ok_or_else(|| bad("complex number"))?;
    if pair.len() != 2 {
        return Err(bad("complex number"));
    }
    let re = pair[0].as_f64().ok_or_else(|| bad("complex number"))?;
    let im = pair[1].as_f64().ok_or_else(|| bad("complex number"))?;
    Ok(C64::new(re, im))
}

pub fn cvec_to_json(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| complex_to_json(*z)).collect())
}

pub fn cvec_from_json(v: &Value) -> Result<Vec<C64>> {
    v.as_array()
        .ok_or_else(|| bad("complex vector"))?
        .iter()
        .map(complex_from_json)
        .collect()
}

pub fn mat_to_json(m: &Mat<f64>) -> Value {
    Value::Array(
        (0..m.rows)
            .map(|p| Value::Array((0..m.cols).map(|q| complex_to_json(m[(p, q)])).collect()))
            .collect(),
    )
}

pub fn mat_from_json(v: &Value) -> Result<Mat<f64>> {
    let rows = v.as_array().ok_or_else(|| bad("matrix"))?;
    if rows.is_empty() {
        return Err(bad("matrix"));
    }
    let data: Vec<Vec<C64>> = rows.iter().map(cvec_from_json).collect::<Result<_>>()?;
    let cols = data[0].len();
    if cols == 0 || data.iter().any(|r| r.len() != cols) {
        return Err(bad("matrix"));
    }
    Ok(Mat::from_rows(data))
}

pub fn adhm_to_json(d: &AdhmData<f64>) -> Value {
    json!({
        "k": d.k,
        "tau": complex_to_json(d.tau),
        "A": mat_to_json(&d.a),
        "B": mat_to_json(&d.b),
        "i": mat_to_json(&d.i),
        "j": mat_to_json(&d.j),
    })
}

pub fn adhm_from_json(v: &Value) -> Result<AdhmData<f64>> {
    let k = v["k"].as_u64().ok_or_else(|| bad("ADHM datum"))? as usize;
    let d = AdhmData {
        k,
        a: mat_from_json(&v["A"])?,
        b: mat_from_json(&v["B"])?,
        i: mat_from_json(&v["i"])?,
        j: mat_from_json(&v["j"])?,
        tau: complex_from_json(&v["tau"])?,
    };
    d.check_shapes()?;
    Ok(d)
}

pub fn hat_to_json(h: &HatPair<f64>) -> Value {
    json!({
        "Ahat": mat_to_json(&h.ahat),
        "Bhat": mat_to_json(&h.bhat),
        "tau": complex_to_json(h.tau),
    })
}

pub fn hat_from_json(v: &Value) -> Result<HatPair<f64>> {
    let ahat = mat_from_json(&v["Ahat"])?;
    let bhat = mat_from_json(&v["Bhat"])?;
    if ahat.rows != ahat.cols || ahat.rows < 2 || bhat.rows != ahat.rows || bhat.cols != ahat.cols {
        return Err(bad("hat pair"));
    }
    let k = ahat.rows - 1;
    let zero = C64::new(0.0, 0.0);
    let in_s = ahat[(k, k)] == zero && bhat[(k, k)] == zero;
    Ok(HatPair {
        k,
        ahat,
        bhat,
        tau: complex_from_json(&v["tau"])?,
        in_s,
    })
}

pub fn slice_to_json(f: &SliceForm<f64>) -> Value {
    json!({ "r": cvec_to_json(&f.r), "s": cvec_to_json(&f.s) })
}

pub fn slice_from_json(v: &Value) -> Result<SliceForm<f64>> {
    let f = SliceForm {
        r: cvec_from_json(&v["r"])?,
        s: cvec_from_json(&v["s"])?,
    };
    if f.s.len() != f.r.len() + 1 {
        return Err(bad("slice form"));
    }
    Ok(f)
}

pub fn darboux_to_json(p: &DarbouxPoint<f64>) -> Value {
    json!({
        "lambda": cvec_to_json(&p.lambda),
        "mu": cvec_to_json(&p.mu),
        "lambdahat": cvec_to_json(&p.lambdahat),
        "muhat": cvec_to_json(&p.muhat),
        "tau": complex_to_json(p.tau),
    })
}

pub fn darboux_from_json(v: &Value) -> Result<DarbouxPoint<f64>> {
    let p = DarbouxPoint {
        lambda: cvec_from_json(&v["lambda"])?,
        mu: cvec_from_json(&v["mu"])?,
        lambdahat: cvec_from_json(&v["lambdahat"])?,
        muhat: cvec_from_json(&v["muhat"])?,
        tau: complex_from_json(&v["tau"])?,
    };
    let k = p.lambda.len();
    if p.mu.len() != k || p.lambdahat.len() != k + 1 || p.muhat.len() != k + 1 {
        return Err(bad("coordinate point"));
    }
    Ok(p)
}

fn two_by_two_to_json(m: &[[C64; 2]; 2]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(|z| complex_to_json(*z)).collect()))
            .collect(),
    )
}

fn two_by_two_from_json(v: &Value) -> Result<[[C64; 2]; 2]> {
    let m = mat_from_json(v)?;
    if m.rows != 2 || m.cols != 2 {
        return Err(bad("2x2 block"));
    }
    Ok([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
}

pub fn generator_to_json(g: &TameGenerator<f64>) -> Value {
    match g {
        TameGenerator::Triangular(f) => json!({ "type": "tri", "f": f.to_string() }),
        TameGenerator::OppTriangular(f) => json!({ "type": "opp", "f": f.to_string() }),
        TameGenerator::UnimodularAffine { s, t } => json!({
            "type": "asl2",
            "S": two_by_two_to_json(s),
            "t": [complex_to_json(t[0]), complex_to_json(t[1])],
        }),
        TameGenerator::Gl2(t) => json!({ "type": "gl2", "T": two_by_two_to_json(t) }),
        TameGenerator::TriangularPoly(p) => json!({ "type": "tri_p", "p": cvec_to_json(p) }),
        TameGenerator::Gauge(g) => json!({ "type": "gauge", "g": mat_to_json(g) }),
    }
}

pub fn generator_from_json(v: &Value) -> Result<TameGenerator<f64>> {
    let kind = v["type"].as_str().ok_or_else(|| bad("generator"))?;
    let potential = |v: &Value| -> Result<Potential> {
        v.as_str().ok_or_else(|| bad("generator potential"))?.parse()
    };
    match kind {
        "tri" => Ok(TameGenerator::Triangular(potential(&v["f"])?)),
        "opp" => Ok(TameGenerator::OppTriangular(potential(&v["f"])?)),
        "asl2" => {
            let t = cvec_from_json(&v["t"])?;
            if t.len() != 2 {
                return Err(bad("affine translation"));
            }
            Ok(TameGenerator::UnimodularAffine {
                s: two_by_two_from_json(&v["S"])?,
                t: [t[0], t[1]],
            })
        }
        "gl2" => Ok(TameGenerator::Gl2(two_by_two_from_json(&v["T"])?)),
        "tri_p" => Ok(TameGenerator::TriangularPoly(cvec_from_json(&v["p"])?)),
        "gauge" => Ok(TameGenerator::Gauge(mat_from_json(&v["g"])?)),
        other => Err(Error::Parse(format!("unknown generator type {other:?}"))),
    }
}

pub fn word_to_json(word: &[TameGenerator<f64>]) -> Value {
    Value::Array(word.iter().map(generator_to_json).collect())
}

pub fn word_from_json(v: &Value) -> Result<Vec<TameGenerator<f64>>> {
    v.as_array()
        .ok_or_else(|| bad("generator word"))?
        .iter()
        .map(generator_from_json)
        .collect()
}
