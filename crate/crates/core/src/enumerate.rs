//! Bounded lattice-point enumeration for positive definite ternary forms.
//!
//! Points with `f(v) <= N` are visited by completing the square twice on the
//! doubled Gram matrix `A = 2M_f`. With
//!
//! ```text
//! B11 = a11 a22 - a12^2,  B12 = a11 a23 - a12 a13,  B22 = a11 a33 - a13^2
//! a11 * vAv^t = (a11 x + a12 y + a13 z)^2 + q(y, z)
//! B11 * q(y, z) = (B11 y + B12 z)^2 + a11 det(A) z^2
//! ```
//!
//! every coordinate range is an integer interval obtained from an exact
//! integer square root, so no point is ever missed and no float is involved.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::forms::{QuadForm, RepSet, Vector3};

/// Representation counts `r(n, f)` for `0 <= n <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaSeries {
    pub form: QuadForm,
    pub bound: u64,
    pub coeffs: Vec<u64>,
}

impl ThetaSeries {
    pub fn get(&self, n: u64) -> u64 {
        self.coeffs[n as usize]
    }
}

/// Precomputed completing-the-square data for one form.
#[derive(Debug, Clone, Copy)]
struct Ellipsoid {
    a11: i128,
    a12: i128,
    a13: i128,
    b11: i128,
    b12: i128,
    b22: i128,
    det: i128,
}

impl Ellipsoid {
    fn new(form: &QuadForm) -> Self {
        assert!(form.is_positive_definite(), "enumeration needs a positive definite form, got {form}");
        let m = form.doubled_gram().0.map(|r| r.map(i128::from));
        let (a11, a12, a13) = (m[0][0], m[0][1], m[0][2]);
        let (a22, a23, a33) = (m[1][1], m[1][2], m[2][2]);
        let det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) + a13 * (a12 * a23 - a22 * a13);
        Ellipsoid {
            a11,
            a12,
            a13,
            b11: a11 * a22 - a12 * a12,
            b12: a11 * a23 - a12 * a13,
            b22: a11 * a33 - a13 * a13,
            det,
        }
    }

    /// Largest |z| with some point of `vAv^t <= m`.
    fn z_max(&self, m: i128) -> i64 {
        isqrt(self.b11 * m / self.det) as i64
    }

    fn y_range(&self, m: i128, z: i64) -> Option<(i64, i64)> {
        let z = z as i128;
        let ry = self.b11 * self.a11 * m - self.a11 * self.det * z * z;
        if ry < 0 {
            return None;
        }
        let s = isqrt(ry);
        let lo = ceil_div(-s - self.b12 * z, self.b11);
        let hi = floor_div(s - self.b12 * z, self.b11);
        (lo <= hi).then_some((lo as i64, hi as i64))
    }

    fn q(&self, y: i64, z: i64) -> i128 {
        let (y, z) = (y as i128, z as i128);
        self.b11 * y * y + 2 * self.b12 * y * z + self.b22 * z * z
    }

    fn x_range(&self, m: i128, y: i64, z: i64) -> Option<(i64, i64)> {
        let rx = self.a11 * m - self.q(y, z);
        if rx < 0 {
            return None;
        }
        let s = isqrt(rx);
        let l = self.a12 * y as i128 + self.a13 * z as i128;
        let lo = ceil_div(-s - l, self.a11);
        let hi = floor_div(s - l, self.a11);
        (lo <= hi).then_some((lo as i64, hi as i64))
    }

    /// The x with `vAv^t = m` exactly, for fixed (y, z).
    fn x_solutions(&self, m: i128, y: i64, z: i64) -> Vec<i64> {
        let rx = self.a11 * m - self.q(y, z);
        if rx < 0 {
            return Vec::new();
        }
        let s = isqrt(rx);
        if s * s != rx {
            return Vec::new();
        }
        let l = self.a12 * y as i128 + self.a13 * z as i128;
        let mut xs: Vec<i64> = [-s - l, s - l]
            .into_iter()
            .filter(|num| num.rem_euclid(self.a11) == 0)
            .map(|num| (num / self.a11) as i64)
            .collect();
        xs.dedup();
        xs
    }

    /// Call `visit(x_lo, x_hi, y, z)` for every row of points with
    /// `vAv^t <= m` and z in `zs`.
    fn rows(&self, m: i128, zs: impl Iterator<Item = i64>, mut visit: impl FnMut(i64, i64, i64, i64)) {
        for z in zs {
            let Some((ylo, yhi)) = self.y_range(m, z) else { continue };
            for y in ylo..=yhi {
                if let Some((xlo, xhi)) = self.x_range(m, y, z) {
                    visit(xlo, xhi, y, z);
                }
            }
        }
    }
}

/// Floor square root of a nonnegative integer.
pub(crate) fn isqrt(n: i128) -> i128 {
    debug_assert!(n >= 0);
    (n as u128).isqrt() as i128
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

/// All `v` with `f(v) = n`, sorted lexicographically.
pub fn representations(form: &QuadForm, n: u64) -> Vec<Vector3> {
    let e = Ellipsoid::new(form);
    let m = 2 * n as i128;
    let zmax = e.z_max(m);
    let mut out = Vec::new();
    for z in -zmax..=zmax {
        let Some((ylo, yhi)) = e.y_range(m, z) else { continue };
        for y in ylo..=yhi {
            for x in e.x_solutions(m, y, z) {
                out.push(Vector3::new(x, y, z));
            }
        }
    }
    out.sort_unstable();
    debug_assert!(out.iter().all(|v| form.evaluate(v) == n as i64));
    out
}

/// `r(n, f)`.
pub fn rep_count(form: &QuadForm, n: u64) -> u64 {
    representations(form, n).len() as u64
}

pub fn primitive_representations(form: &QuadForm, n: u64) -> Vec<Vector3> {
    representations(form, n).into_iter().filter(Vector3::is_primitive).collect()
}

/// Fixed-size bitset over `0..=bound`.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(bound: u64) -> Self {
        Bits(vec![0; (bound as usize) / 64 + 1])
    }

    #[inline]
    fn set(&mut self, n: i64) {
        let n = n as usize;
        self.0[n >> 6] |= 1 << (n & 63);
    }

    fn union(mut self, other: Bits) -> Bits {
        for (w, o) in self.0.iter_mut().zip(other.0) {
            *w |= o;
        }
        self
    }

    fn into_members(self, bound: u64) -> Vec<u64> {
        let mut out = Vec::new();
        for (i, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as u64;
                let n = (i as u64) * 64 + b;
                if n <= bound {
                    out.push(n);
                }
                w &= w - 1;
            }
        }
        out
    }
}

fn collect_values(form: &QuadForm, bound: u64, primitive_only: bool) -> RepSet {
    let e = Ellipsoid::new(form);
    let m = 2 * bound as i128;
    let zmax = e.z_max(m);
    let QuadForm { a, b, c, r, s, t } = *form;
    // f(-v) = f(v), so z >= 0 suffices.
    let bits = (0..=zmax)
        .into_par_iter()
        .fold(
            || Bits::new(bound),
            |mut bits, z| {
                e.rows(m, std::iter::once(z), |xlo, xhi, y, z| {
                    let lin = t * y + s * z;
                    let mut val = a * xlo * xlo + lin * xlo + b * y * y + c * z * z + r * y * z;
                    for x in xlo..=xhi {
                        debug_assert!(val >= 0 && val as u64 <= bound);
                        if !primitive_only || Vector3::new(x, y, z).is_primitive() {
                            bits.set(val);
                        }
                        // f(x + 1) - f(x)
                        val += a * (2 * x + 1) + lin;
                    }
                });
                bits
            },
        )
        .reduce(|| Bits::new(bound), Bits::union);
    let mut members = bits.into_members(bound);
    if primitive_only {
        members.retain(|&n| n != 0);
    } else if members.first() != Some(&0) {
        members.insert(0, 0);
    }
    RepSet { bound, members }
}

/// `Q(f) ∩ [0, bound]`.
pub fn represented_set(form: &QuadForm, bound: u64) -> RepSet {
    collect_values(form, bound, false)
}

/// Integers in `[0, bound]` with at least one primitive representation.
pub fn primitive_represented_set(form: &QuadForm, bound: u64) -> RepSet {
    collect_values(form, bound, true)
}

/// Theta coefficients up to `bound` in one enumeration pass.
pub fn theta(form: &QuadForm, bound: u64) -> ThetaSeries {
    let e = Ellipsoid::new(form);
    let m = 2 * bound as i128;
    let zmax = e.z_max(m);
    let len = bound as usize + 1;
    let coeffs = (-zmax..=zmax)
        .into_par_iter()
        .fold(
            || vec![0u64; len],
            |mut acc, z| {
                e.rows(m, std::iter::once(z), |xlo, xhi, y, z| {
                    for x in xlo..=xhi {
                        acc[form.evaluate(&Vector3::new(x, y, z)) as usize] += 1;
                    }
                });
                acc
            },
        )
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    ThetaSeries { form: *form, bound, coeffs }
}

/// Number of lattice points with `f(v) <= bound`.
pub fn count_points(form: &QuadForm, bound: u64) -> u64 {
    let e = Ellipsoid::new(form);
    let m = 2 * bound as i128;
    let zmax = e.z_max(m);
    let mut total = 0u64;
    e.rows(m, -zmax..=zmax, |xlo, xhi, _, _| total += (xhi - xlo + 1) as u64);
    total
}
