//! Certificates for [`PairProof`]s and a checker that replays them.
//!
//! A certificate carries every matrix and witness the proof relies on, so
//! checking it needs no search: only matrix identities, coset scans modulo
//! each `d`, congruence tests on the recorded witnesses, eigenvector algebra
//! for escape records, and the residue cover. The checker recomputes all of
//! these from the raw integers with its own arithmetic.
//!
//! The serialized form is JSON with sorted keys and decimal integers; the
//! schema is described in `docs/certificate.md`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::Mat3;
use crate::isometry::{eigen_data, eigen_spaces_of_power};
use crate::prover::{ClassProof, DirectionProof, PairProof};

pub const VERSION: &str = "ternrep-certificate/1";

/// Largest class modulus, and largest lcm of a cover, the checker scans.
pub const MAX_MODULUS: i64 = 288;

type Matrix = [[i64; 3]; 3];
type Vec3 = [i64; 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub version: String,
    pub f: [i64; 6],
    pub g: [i64; 6],
    pub empirical_bound: u64,
    /// `Q(f) ⊆ Q(g)`: source `f`, target `g`.
    pub f_in_g: DirectionRecord,
    /// `Q(g) ⊆ Q(f)`: source `g`, target `f`.
    pub g_in_f: DirectionRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum DirectionRecord {
    /// `T^t (2M_target) T = 2M_source`.
    Subform(Matrix),
    Classes(Vec<ClassRecord>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassRecord {
    pub d: i64,
    pub a: i64,
    /// Matrices of `R(target, source, d)` referenced by `witnesses`.
    pub transforms: Vec<Matrix>,
    /// `[x, y, z, i]`: coset `(x, y, z)` is good via `transforms[i]`.
    pub witnesses: Vec<[i64; 4]>,
    pub escape: Option<EscapeRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EscapeRecord {
    pub ttilde: Matrix,
    pub bad: Vec<Vec3>,
    pub eigenvectors: Vec<Vec3>,
    /// `(m, w)`: `target(w) = m` for each eigenvector value `m`.
    pub bases: Vec<(i64, Vec3)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("check failed at {clause}")]
    Rejected { clause: String },
}

fn reject(clause: impl Into<String>) -> CertificateError {
    CertificateError::Rejected { clause: clause.into() }
}

fn class_record(proof: &ClassProof) -> ClassRecord {
    // Keep only referenced transforms, in index order.
    let used: BTreeSet<usize> = proof.report.good.iter().map(|&(_, i)| i).collect();
    let remap: HashMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let transforms = used.iter().map(|&i| proof.transforms[i].0).collect();
    let mut witnesses: Vec<[i64; 4]> =
        proof.report.good.iter().map(|(v, i)| [v.x(), v.y(), v.z(), remap[i] as i64]).collect();
    witnesses.sort_unstable();
    let escape = proof.escape.as_ref().map(|e| EscapeRecord {
        ttilde: e.ttilde.0,
        bad: e.bad.iter().map(|v| v.0).collect(),
        eigenvectors: e.eigenvectors.iter().map(|v| v.0).collect(),
        bases: e.f_covers.iter().map(|(m, w)| (*m, w.0)).collect(),
    });
    ClassRecord { d: proof.cls.d, a: proof.cls.a, transforms, witnesses, escape }
}

fn direction_record(proof: &DirectionProof) -> DirectionRecord {
    match proof {
        DirectionProof::Subform(t) => DirectionRecord::Subform(t.0),
        DirectionProof::Cover(classes) => DirectionRecord::Classes(classes.iter().map(class_record).collect()),
    }
}

/// Certificate for a proof.
pub fn emit(proof: &PairProof) -> Certificate {
    Certificate {
        version: VERSION.to_string(),
        f: proof.f.coefficients(),
        g: proof.g.coefficients(),
        empirical_bound: proof.empirical_bound,
        f_in_g: direction_record(&proof.f_in_g),
        g_in_f: direction_record(&proof.g_in_f),
    }
}

impl Certificate {
    /// Canonical JSON: sorted keys, no whitespace, trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let value = serde_json::to_value(self).expect("certificate is plain data");
        let mut s = serde_json::to_string(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Certificate, CertificateError> {
        serde_json::from_str(text).map_err(|e| CertificateError::Malformed(e.to_string()))
    }

    /// Every 3x3 matrix in the certificate, for perturbation tests.
    pub fn matrices_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = Vec::new();
        for dir in [&mut self.f_in_g, &mut self.g_in_f] {
            match dir {
                DirectionRecord::Subform(t) => out.push(t),
                DirectionRecord::Classes(classes) => {
                    for c in classes {
                        out.extend(c.transforms.iter_mut());
                        if let Some(e) = c.escape.as_mut() {
                            out.push(&mut e.ttilde);
                        }
                    }
                }
            }
        }
        out
    }
}

// Arithmetic below is deliberately local to this module.

fn doubled(q: &[i64; 6]) -> Matrix {
    let [a, b, c, r, s, t] = *q;
    [[2 * a, t, s], [t, 2 * b, r], [s, r, 2 * c]]
}

/// Form value; `None` on overflow.
fn value(q: &[i64; 6], v: &Vec3) -> Option<i64> {
    let [a, b, c, r, s, t] = q.map(i128::from);
    let [x, y, z] = v.map(i128::from);
    let terms = [(a, x, x), (b, y, y), (c, z, z), (r, y, z), (s, x, z), (t, x, y)];
    let total = terms.iter().try_fold(0i128, |acc, &(k, u, w)| acc.checked_add(k.checked_mul(u)?.checked_mul(w)?))?;
    i64::try_from(total).ok()
}

fn small_value(q: &[i64; 6], v: &Vec3) -> i64 {
    value(q, v).expect("coset representatives are small")
}

fn mat_mul(p: &Matrix, q: &Matrix) -> Option<Matrix> {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0i64;
            for k in 0..3 {
                acc = acc.checked_add(p[i][k].checked_mul(q[k][j])?)?;
            }
            out[i][j] = acc;
        }
    }
    Some(out)
}

fn transpose(m: &Matrix) -> Matrix {
    let mut out = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

/// `T^t A T == k B`.
fn identity_holds(t: &Matrix, a: &Matrix, b: &Matrix, k: i64) -> bool {
    let lhs = mat_mul(&transpose(t), a).and_then(|m| mat_mul(&m, t));
    let rhs: Option<Matrix> = (|| {
        let mut out = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = b[i][j].checked_mul(k)?;
            }
        }
        Some(out)
    })();
    matches!((lhs, rhs), (Some(l), Some(r)) if l == r)
}

/// `v T^t`, checked.
fn apply_t(t: &Matrix, v: &Vec3) -> Option<Vec3> {
    let mut out = [0i64; 3];
    for i in 0..3 {
        let mut acc = 0i64;
        for j in 0..3 {
            acc = acc.checked_add(t[i][j].checked_mul(v[j])?)?;
        }
        out[i] = acc;
    }
    Some(out)
}

fn divisible(v: &Vec3, d: i64) -> bool {
    v.iter().all(|c| c % d == 0)
}

fn positive_definite(q: &[i64; 6]) -> bool {
    // Coefficients beyond 2^40 are rejected rather than risking overflow.
    if q.iter().any(|c| c.abs() > 1 << 40) {
        return false;
    }
    let m = doubled(q).map(|r| r.map(i128::from));
    let m1 = m[0][0];
    let m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let m3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    m1 > 0 && m2 > 0 && m3 > 0
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn fmt_v(v: &Vec3) -> String {
    format!("{},{},{}", v[0], v[1], v[2])
}

fn check_escape(
    label: &str,
    target: &[i64; 6],
    source: &[i64; 6],
    d: i64,
    a: i64,
    esc: &EscapeRecord,
) -> Result<(), CertificateError> {
    let src = doubled(source);
    if !identity_holds(&esc.ttilde, &src, &src, d * d) {
        return Err(reject(format!("{label}.escape.matrix_identity")));
    }
    for u in &esc.bad {
        match apply_t(&esc.ttilde, u) {
            Some(w) if divisible(&w, d) => {}
            _ => return Err(reject(format!("{label}.escape.integrality(coset={})", fmt_v(u)))),
        }
    }
    let k = Mat3(esc.ttilde);
    let data = eigen_data(&k, d).map_err(|e| reject(format!("{label}.escape.eigen({e})")))?;
    if data.finite_order {
        return Err(reject(format!("{label}.escape.infinite_order")));
    }
    // Every lift u + d w of a bad coset maps back into the same class.
    for u in &esc.bad {
        let image = apply_t(&esc.ttilde, u).expect("checked above").map(|c| c / d);
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let lands = apply_t(&esc.ttilde, &[x, y, z])
                        .and_then(|shift| {
                            let w = [0, 1, 2].map(|i| image[i].checked_add(shift[i]).map(|c| c.rem_euclid(d)));
                            Some([w[0]?, w[1]?, w[2]?])
                        })
                        .is_some_and(|w| small_value(source, &w).rem_euclid(d) == a);
                    if !lands {
                        return Err(reject(format!("{label}.escape.descent(coset={})", fmt_v(u))));
                    }
                }
            }
        }
    }
    let mut expected = BTreeSet::new();
    for power in 1..=6u32 {
        let periodic = (d as i128).pow(power);
        let spaces = eigen_spaces_of_power(&k, power).map_err(|e| reject(format!("{label}.escape.eigen({e})")))?;
        for s in spaces {
            if s.dim() > 1 {
                if s.eigenvalue.abs() == periodic {
                    return Err(reject(format!("{label}.escape.eigenvectors(plane)")));
                }
                continue;
            }
            let v = s.basis[0].0;
            let image = apply_t(
                &matrix_power_i64(&esc.ttilde, power).ok_or_else(|| reject(format!("{label}.escape.eigen")))?,
                &v,
            );
            if image.is_none_or(|w| (0..3).any(|i| i128::from(w[i]) != s.eigenvalue * i128::from(v[i]))) {
                return Err(reject(format!("{label}.escape.eigenvectors")));
            }
            expected.insert(v);
        }
    }
    let recorded: BTreeSet<Vec3> = esc.eigenvectors.iter().copied().collect();
    if recorded != expected {
        return Err(reject(format!("{label}.escape.eigenvectors")));
    }
    let bases: BTreeMap<i64, Vec3> = esc.bases.iter().copied().collect();
    for e in &expected {
        let m = value(source, e).ok_or_else(|| reject(format!("{label}.escape.base_witness(overflow)")))?;
        match bases.get(&m) {
            Some(w) if value(target, w) == Some(m) => {}
            _ => return Err(reject(format!("{label}.escape.base_witness(m={m})"))),
        }
    }
    Ok(())
}

fn matrix_power_i64(t: &Matrix, k: u32) -> Option<Matrix> {
    let mut acc = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for _ in 0..k {
        acc = mat_mul(&acc, t)?;
    }
    Some(acc)
}

fn check_class(dir: &str, target: &[i64; 6], source: &[i64; 6], rec: &ClassRecord) -> Result<(), CertificateError> {
    let (d, a) = (rec.d, rec.a);
    let label = format!("{dir}.class({d}:{a})");
    if !(1..=MAX_MODULUS).contains(&d) || !(0..d).contains(&a) {
        return Err(reject(format!("{label}.malformed")));
    }
    let (tgt, src) = (doubled(target), doubled(source));
    for (i, t) in rec.transforms.iter().enumerate() {
        if !identity_holds(t, &tgt, &src, d * d) {
            return Err(reject(format!("{label}.transform_identity(index={i})")));
        }
    }
    let mut witnesses: HashMap<Vec3, i64> = HashMap::new();
    for w in &rec.witnesses {
        if witnesses.insert([w[0], w[1], w[2]], w[3]).is_some() {
            return Err(reject(format!("{label}.duplicate_witness(coset={})", fmt_v(&[w[0], w[1], w[2]]))));
        }
    }
    let bad: BTreeSet<Vec3> = rec.escape.as_ref().map(|e| e.bad.iter().copied().collect()).unwrap_or_default();
    let mut seen = 0usize;
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let v = [x, y, z];
                if small_value(source, &v).rem_euclid(d) != a {
                    continue;
                }
                seen += 1;
                if let Some(&i) = witnesses.get(&v) {
                    let t = usize::try_from(i).ok().and_then(|i| rec.transforms.get(i));
                    let ok = t.and_then(|t| apply_t(t, &v)).is_some_and(|w| divisible(&w, d));
                    if !ok {
                        return Err(reject(format!("{label}.witness(coset={})", fmt_v(&v))));
                    }
                } else if !bad.contains(&v) {
                    return Err(reject(format!("{label}.uncovered_coset(coset={})", fmt_v(&v))));
                }
            }
        }
    }
    if seen != witnesses.len() + bad.len() || witnesses.keys().any(|v| bad.contains(v)) {
        return Err(reject(format!("{label}.extraneous_coset")));
    }
    if let Some(esc) = &rec.escape {
        check_escape(&label, target, source, d, a, esc)?;
    }
    Ok(())
}

fn check_direction(
    dir: &str,
    target: &[i64; 6],
    source: &[i64; 6],
    rec: &DirectionRecord,
) -> Result<(), CertificateError> {
    match rec {
        DirectionRecord::Subform(t) => {
            if identity_holds(t, &doubled(target), &doubled(source), 1) {
                Ok(())
            } else {
                Err(reject(format!("{dir}.subform.identity")))
            }
        }
        DirectionRecord::Classes(classes) => {
            if classes.is_empty() {
                return Err(reject(format!("{dir}.cover_check(empty)")));
            }
            for c in classes {
                check_class(dir, target, source, c)?;
            }
            let modulus = classes.iter().fold(1i64, |l, c| l / gcd(l, c.d) * c.d);
            if modulus > MAX_MODULUS {
                return Err(reject(format!("{dir}.cover_check(modulus={modulus})")));
            }
            let mut attained = vec![false; modulus as usize];
            for x in 0..modulus {
                for y in 0..modulus {
                    for z in 0..modulus {
                        attained[small_value(source, &[x, y, z]).rem_euclid(modulus) as usize] = true;
                    }
                }
            }
            for (rho, _) in attained.iter().enumerate().filter(|(_, &hit)| hit) {
                let rho = rho as i64;
                if !classes.iter().any(|c| rho.rem_euclid(c.d) == c.a) {
                    return Err(reject(format!("{dir}.cover_check(residue={rho} mod {modulus})")));
                }
            }
            Ok(())
        }
    }
}

/// Replay every clause of the certificate; the first failing clause is named
/// in the error.
pub fn check(cert: &Certificate) -> Result<(), CertificateError> {
    if cert.version != VERSION {
        return Err(reject(format!("version({})", cert.version)));
    }
    if !positive_definite(&cert.f) {
        return Err(reject("forms.positive_definite(f)"));
    }
    if !positive_definite(&cert.g) {
        return Err(reject("forms.positive_definite(g)"));
    }
    check_direction("f_in_g", &cert.g, &cert.f, &cert.f_in_g)?;
    check_direction("g_in_f", &cert.f, &cert.g, &cert.g_in_f)?;
    Ok(())
}

/// Parse and check certificate text.
pub fn check_str(text: &str) -> Result<Certificate, CertificateError> {
    let cert = Certificate::from_json(text)?;
    check(&cert)?;
    Ok(cert)
}
