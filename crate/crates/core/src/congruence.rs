//! Residue vectors modulo `d` and the good/bad classification against
//! `R(f, g, d)`.
//!
//! A coset `v` of `(Z/dZ)^3` with `g(v) ≡ a (mod d)` is good when some
//! `T ∈ R(f, g, d)` makes `v T^t ≡ 0 (mod d)`. Then `w = (1/d) v T^t` is
//! integral and `f(w) = g(v)`, so the value moves from `g` to `f`. When every
//! coset is good, `g ≺_{d,a} f`, and every integer `≡ a (mod d)` represented
//! by `g` is represented by `f`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::forms::{lcm, Mat3, QuadForm, Vector3};
use crate::isometry::{find_transforms, TransformSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("invalid residue class {0}")]
    InvalidClass(String),
    #[error("transform set R(f,g,{0}) was truncated; classification needs the complete set")]
    IncompleteTransformSet(i64),
    #[error("transform set is for d = {found} and forms ({tf}; {tg}), not the requested class")]
    TransformSetMismatch { found: i64, tf: QuadForm, tg: QuadForm },
}

/// The progression `{dn + a : n >= 0}`, written `d:a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResidueClass {
    pub d: i64,
    pub a: i64,
}

impl ResidueClass {
    pub fn new(d: i64, a: i64) -> Result<Self, CongruenceError> {
        if d >= 1 && (0..d).contains(&a) {
            Ok(ResidueClass { d, a })
        } else {
            Err(CongruenceError::InvalidClass(format!("{d}:{a}")))
        }
    }

    pub fn contains(&self, n: i64) -> bool {
        n.rem_euclid(self.d) == self.a
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.d, self.a)
    }
}

impl FromStr for ResidueClass {
    type Err = CongruenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CongruenceError::InvalidClass(s.to_string());
        let (d, a) = s.trim().split_once(':').ok_or_else(bad)?;
        let d = d.trim().parse().map_err(|_| bad())?;
        let a = a.trim().parse().map_err(|_| bad())?;
        ResidueClass::new(d, a)
    }
}

/// Parse `"d:a,d:a,..."`.
pub fn parse_class_list(s: &str) -> Result<Vec<ResidueClass>, CongruenceError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

/// Good/bad partition of `R(g, d, a)`. Witness indices point into the
/// transform set the report was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodVectorReport {
    pub f: QuadForm,
    pub g: QuadForm,
    pub cls: ResidueClass,
    pub good: Vec<(Vector3, usize)>,
    pub bad: Vec<Vector3>,
}

impl GoodVectorReport {
    pub fn total(&self) -> usize {
        self.good.len() + self.bad.len()
    }

    pub fn all_good(&self) -> bool {
        self.bad.is_empty()
    }

    /// `{d, a, total, bad: [...], witnesses: {"x,y,z": index}}`.
    pub fn to_json(&self) -> Value {
        let witnesses: serde_json::Map<String, Value> =
            self.good.iter().map(|(v, i)| (format!("{},{},{}", v.x(), v.y(), v.z()), json!(i))).collect();
        json!({
            "d": self.cls.d,
            "a": self.cls.a,
            "total": self.total(),
            "bad": self.bad,
            "witnesses": witnesses,
        })
    }
}

/// Cosets `v ∈ (Z/dZ)^3` with `v(2M_g)v^t ≡ 2a (mod 2d)`, lexicographic.
pub fn residue_vectors(g: &QuadForm, cls: ResidueClass) -> Vec<Vector3> {
    let ResidueClass { d, a } = cls;
    let mut out = Vec::new();
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let v = Vector3::new(x, y, z);
                if g.doubled_inner(&v, &v).rem_euclid(2 * d) == 2 * a {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// `(1/d) v T^t` when integral.
pub fn transport(v: &Vector3, t: &Mat3, d: i64) -> Option<Vector3> {
    let w = t.apply_transpose(v);
    w.0.iter().all(|c| c % d == 0).then(|| Vector3(w.0.map(|c| c / d)))
}

fn kills(v: &Vector3, t: &Mat3, d: i64) -> bool {
    (0..3).all(|i| (0..3).map(|j| t.0[i][j] * v.0[j]).sum::<i64>() % d == 0)
}

/// Transforms that differ mod `d`, each with its lowest index.
fn distinct_mod(matrices: &[Mat3], d: i64) -> Vec<(Mat3, usize)> {
    let mut seen = std::collections::HashSet::new();
    matrices
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let r = Mat3(t.0.map(|row| row.map(|e| e.rem_euclid(d))));
            seen.insert(r).then_some((r, i))
        })
        .collect()
}

/// Partition `R(g, d, a)` into good and bad cosets. The witness for a good
/// coset is the lowest-index matrix of `transforms` that works.
pub fn classify_good(
    f: &QuadForm,
    g: &QuadForm,
    cls: ResidueClass,
    transforms: &TransformSet,
) -> Result<GoodVectorReport, CongruenceError> {
    if transforms.d != cls.d || transforms.f != *f || transforms.g != *g {
        return Err(CongruenceError::TransformSetMismatch { found: transforms.d, tf: transforms.f, tg: transforms.g });
    }
    if !transforms.complete {
        return Err(CongruenceError::IncompleteTransformSet(cls.d));
    }
    let reduced = distinct_mod(&transforms.matrices, cls.d);
    let cosets = residue_vectors(g, cls);
    let witnesses: Vec<Option<usize>> =
        cosets.par_iter().map(|v| reduced.iter().find(|(t, _)| kills(v, t, cls.d)).map(|&(_, i)| i)).collect();
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for (v, w) in cosets.into_iter().zip(witnesses) {
        match w {
            Some(i) => good.push((v, i)),
            None => bad.push(v),
        }
    }
    Ok(GoodVectorReport { f: *f, g: *g, cls, good, bad })
}

/// Decide `g ≺_{d,a} f`, computing `R(f, g, d)` from scratch.
pub fn precedes(f: &QuadForm, g: &QuadForm, cls: ResidueClass) -> (bool, GoodVectorReport, TransformSet) {
    let transforms = find_transforms(f, g, cls.d);
    let report = classify_good(f, g, cls, &transforms).expect("unbounded search is complete");
    (report.all_good(), report, transforms)
}

/// Outcome of [`cover_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    pub modulus: i64,
    pub attainable: Vec<i64>,
    pub uncovered: Vec<i64>,
}

impl CoverReport {
    pub fn covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// Residues `g(v) mod m` over all `v ∈ (Z/mZ)^3`.
pub fn attainable_residues(g: &QuadForm, m: i64) -> Vec<i64> {
    let mut hit = vec![false; m as usize];
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                hit[g.evaluate(&Vector3::new(x, y, z)).rem_euclid(m) as usize] = true;
            }
        }
    }
    (0..m).filter(|&r| hit[r as usize]).collect()
}

/// Every residue mod `lcm(d_i)` attained by `g` lies in some class.
pub fn cover_check(g: &QuadForm, classes: &[ResidueClass]) -> CoverReport {
    let modulus = classes.iter().fold(1, |l, c| lcm(l, c.d));
    let attainable = attainable_residues(g, modulus);
    let uncovered = attainable.iter().copied().filter(|&r| !classes.iter().any(|c| c.contains(r))).collect();
    CoverReport { modulus, attainable, uncovered }
}
