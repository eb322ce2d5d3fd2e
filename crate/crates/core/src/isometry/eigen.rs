//! Rational eigenvectors of integer 3x3 matrices.
//!
//! Eigenvectors are column eigenvectors `T v^t = λ v^t`, which for row
//! vectors reads `v T^t = λ v`. A rational eigenvalue of an integer matrix is
//! an integer root of the monic characteristic polynomial; those are located
//! exactly by bisection on the monotone pieces of the cubic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{Mat3, Vector3};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("integer overflow while computing {0}")]
pub struct ArithmeticOverflow(pub &'static str);

type M = [[i128; 3]; 3];

/// One rational eigenspace: an integer eigenvalue and a basis of primitive,
/// sign-canonical integral vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenSpace {
    pub eigenvalue: i128,
    pub basis: Vec<Vector3>,
}

impl EigenSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenData {
    pub spaces: Vec<EigenSpace>,
    /// `(T/d)^k = I` for some `1 <= k <= 12`.
    pub finite_order: bool,
}

impl EigenData {
    /// Primitive eigenvectors from every space, one per `±` class.
    pub fn eigenvectors(&self) -> Vec<Vector3> {
        self.spaces.iter().flat_map(|s| s.basis.iter().copied()).collect()
    }
}

fn widen(t: &Mat3) -> M {
    t.0.map(|r| r.map(i128::from))
}

fn mul(a: &M, b: &M) -> Result<M, ArithmeticOverflow> {
    let err = || ArithmeticOverflow("matrix product");
    let mut out = [[0i128; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0i128;
            for k in 0..3 {
                acc = a[i][k].checked_mul(b[k][j]).and_then(|p| acc.checked_add(p)).ok_or_else(err)?;
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// `T^k` with 128-bit entries.
pub fn matrix_power(t: &Mat3, k: u32) -> Result<[[i128; 3]; 3], ArithmeticOverflow> {
    let base = widen(t);
    let mut acc: M = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for _ in 0..k {
        acc = mul(&acc, &base)?;
    }
    Ok(acc)
}

/// Coefficients `(c2, c1, c0)` of `det(xI - m) = x^3 + c2 x^2 + c1 x + c0`.
fn char_poly(m: &M) -> Result<(i128, i128, i128), ArithmeticOverflow> {
    let err = || ArithmeticOverflow("characteristic polynomial");
    let minor = |i: usize, j: usize| -> Option<i128> {
        m[i][i].checked_mul(m[j][j])?.checked_sub(m[i][j].checked_mul(m[j][i])?)
    };
    let trace = m[0][0].checked_add(m[1][1]).and_then(|s| s.checked_add(m[2][2])).ok_or_else(err)?;
    let m2 = minor(0, 1)
        .and_then(|a| a.checked_add(minor(0, 2)?))
        .and_then(|a| a.checked_add(minor(1, 2)?))
        .ok_or_else(err)?;
    let det = det3(m).ok_or_else(err)?;
    Ok((-trace, m2, -det))
}

fn det3(m: &M) -> Option<i128> {
    let t0 = m[0][0].checked_mul(m[1][1].checked_mul(m[2][2])?.checked_sub(m[1][2].checked_mul(m[2][1])?)?)?;
    let t1 = m[0][1].checked_mul(m[1][0].checked_mul(m[2][2])?.checked_sub(m[1][2].checked_mul(m[2][0])?)?)?;
    let t2 = m[0][2].checked_mul(m[1][0].checked_mul(m[2][1])?.checked_sub(m[1][1].checked_mul(m[2][0])?)?)?;
    t0.checked_sub(t1)?.checked_add(t2)
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

/// All integer roots of `x^3 + c2 x^2 + c1 x + c0` with `|x| <= bound`.
fn integer_roots(c2: i128, c1: i128, c0: i128, bound: i128) -> Result<Vec<i128>, ArithmeticOverflow> {
    let eval = |x: i128| -> Result<i128, ArithmeticOverflow> {
        x.checked_add(c2)
            .and_then(|v| v.checked_mul(x))
            .and_then(|v| v.checked_add(c1))
            .and_then(|v| v.checked_mul(x))
            .and_then(|v| v.checked_add(c0))
            .ok_or(ArithmeticOverflow("polynomial evaluation"))
    };
    let mut roots = Vec::new();

    // Bisection on an integer interval where the polynomial is monotone.
    let monotone = |lo: i128, hi: i128, roots: &mut Vec<i128>| -> Result<(), ArithmeticOverflow> {
        let (lo, hi) = (lo.max(-bound), hi.min(bound));
        if lo > hi {
            return Ok(());
        }
        let (plo, phi) = (eval(lo)?, eval(hi)?);
        if plo == 0 {
            roots.push(lo);
        }
        if phi == 0 {
            roots.push(hi);
        }
        if plo.signum() * phi.signum() < 0 {
            let (mut l, mut h) = (lo, hi);
            while h - l > 1 {
                let mid = l + (h - l) / 2;
                let pm = eval(mid)?;
                if pm == 0 {
                    roots.push(mid);
                    break;
                }
                if pm.signum() == plo.signum() {
                    l = mid;
                } else {
                    h = mid;
                }
            }
        }
        Ok(())
    };

    // Critical points are (-c2 ± sqrt(delta)) / 3.
    let delta =
        c2.checked_mul(c2).and_then(|v| v.checked_sub(c1.checked_mul(3)?)).ok_or(ArithmeticOverflow("discriminant"))?;
    if delta <= 0 {
        monotone(-bound, bound, &mut roots)?;
    } else {
        let s = (delta as u128).isqrt() as i128;
        let l1 = floor_div(-c2 - s - 1, 3);
        let u1 = ceil_div(-c2 - s, 3);
        let l2 = floor_div(-c2 + s, 3);
        let u2 = ceil_div(-c2 + s + 1, 3);
        monotone(-bound, l1, &mut roots)?;
        if u1 <= l2 {
            monotone(u1, l2, &mut roots)?;
        }
        monotone(u2, bound, &mut roots)?;
        for x in (l1 + 1..u1).chain(l2 + 1..u2) {
            if x.abs() <= bound && eval(x)? == 0 {
                roots.push(x);
            }
        }
    }
    roots.sort_unstable();
    roots.dedup();
    Ok(roots)
}

fn cross(a: &[i128; 3], b: &[i128; 3]) -> Option<[i128; 3]> {
    let c = |i: usize, j: usize| a[i].checked_mul(b[j])?.checked_sub(a[j].checked_mul(b[i])?);
    Some([c(1, 2)?, c(2, 0)?, c(0, 1)?])
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn primitive(v: [i128; 3]) -> Result<Vector3, ArithmeticOverflow> {
    let g = gcd128(gcd128(v[0], v[1]), v[2]);
    debug_assert!(g > 0);
    let mut w = v.map(|c| c / g);
    if w.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
        w = w.map(|c| -c);
    }
    let conv = |c: i128| i64::try_from(c).map_err(|_| ArithmeticOverflow("eigenvector"));
    Ok(Vector3::new(conv(w[0])?, conv(w[1])?, conv(w[2])?))
}

fn is_zero(v: &[i128; 3]) -> bool {
    v.iter().all(|&c| c == 0)
}

/// Basis of the rational kernel of a singular matrix `n`.
fn kernel(n: &M) -> Result<Vec<Vector3>, ArithmeticOverflow> {
    let err = ArithmeticOverflow("kernel");
    let rows = [n[0], n[1], n[2]];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = cross(&rows[i], &rows[j]).ok_or(err.clone())?;
        if !is_zero(&c) {
            return Ok(vec![primitive(c)?]);
        }
    }
    let Some(r) = rows.iter().find(|r| !is_zero(r)) else {
        return Ok(vec![Vector3::new(1, 0, 0), Vector3::new(0, 1, 0), Vector3::new(0, 0, 1)]);
    };
    // Rank one: the plane orthogonal to r.
    let units: [[i128; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let perps: Vec<[i128; 3]> = units.iter().filter_map(|e| cross(r, e)).filter(|v| !is_zero(v)).collect();
    for (i, p) in perps.iter().enumerate() {
        for q in &perps[i + 1..] {
            if !is_zero(&cross(p, q).ok_or(err.clone())?) {
                let mut basis = vec![primitive(*p)?, primitive(*q)?];
                basis.sort_unstable();
                return Ok(basis);
            }
        }
    }
    unreachable!("a nonzero row has a two-dimensional orthogonal complement")
}

fn spaces_of(m: &M) -> Result<Vec<EigenSpace>, ArithmeticOverflow> {
    let (c2, c1, c0) = char_poly(m)?;
    // Spectral radius is at most the max absolute row sum.
    let bound = m
        .iter()
        .map(|r| r.iter().try_fold(0i128, |acc, e| acc.checked_add(e.checked_abs()?)))
        .try_fold(0i128, |acc, s| Some(acc.max(s?)))
        .ok_or(ArithmeticOverflow("row norm"))?;
    let mut spaces = Vec::new();
    for lambda in integer_roots(c2, c1, c0, bound)? {
        let mut n = *m;
        for (i, row) in n.iter_mut().enumerate() {
            row[i] = row[i].checked_sub(lambda).ok_or(ArithmeticOverflow("shift"))?;
        }
        spaces.push(EigenSpace { eigenvalue: lambda, basis: kernel(&n)? });
    }
    Ok(spaces)
}

/// Rational eigenspaces of `T^k`.
pub fn eigen_spaces_of_power(t: &Mat3, k: u32) -> Result<Vec<EigenSpace>, ArithmeticOverflow> {
    spaces_of(&matrix_power(t, k)?)
}

/// Rational eigenspaces of `T` and whether `T/d` has finite order (checked
/// for exponents up to 12, which covers every finite order of a rational
/// 3x3 matrix).
pub fn eigen_data(t: &Mat3, d: i64) -> Result<EigenData, ArithmeticOverflow> {
    assert!(d >= 1);
    let spaces = spaces_of(&widen(t))?;
    let base = widen(t);
    let mut power = base;
    let mut scale = d as i128;
    let mut finite_order = false;
    for k in 1..=12 {
        if k > 1 {
            power = mul(&power, &base)?;
            scale = scale.checked_mul(d as i128).ok_or(ArithmeticOverflow("d^k"))?;
        }
        let is_scalar = (0..3).all(|i| (0..3).all(|j| power[i][j] == if i == j { scale } else { 0 }));
        if is_scalar {
            finite_order = true;
            break;
        }
    }
    Ok(EigenData { spaces, finite_order })
}
