//! Integral positive definite ternary quadratic forms.
//!
//! A form is stored through its six coefficients in the order
//! `(a, b, c, r, s, t)`:
//!
//! ```text
//! f(x, y, z) = a x^2 + b y^2 + c z^2 + r yz + s xz + t xy
//! ```
//!
//! Matrix identities are always checked on the doubled Gram matrix
//! `2M_f = [[2a, t, s], [t, 2b, r], [s, r, 2c]]`, which is integral for every
//! integral form. Vectors are row vectors: `f(v) = (1/2) v (2M_f) v^t`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("expected six comma-separated integers \"a,b,c,r,s,t\", got {0:?}")]
    Parse(String),
    #[error("form {0} is not positive definite")]
    NotPositiveDefinite(QuadForm),
}

/// An integer row vector in Z^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector3(pub [i64; 3]);

impl Vector3 {
    pub const ZERO: Vector3 = Vector3([0, 0, 0]);

    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Vector3([x, y, z])
    }

    pub fn x(&self) -> i64 {
        self.0[0]
    }

    pub fn y(&self) -> i64 {
        self.0[1]
    }

    pub fn z(&self) -> i64 {
        self.0[2]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    /// gcd of the coordinates; 0 for the zero vector.
    pub fn content(&self) -> i64 {
        gcd(gcd(self.0[0], self.0[1]), self.0[2])
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn scaled(&self, m: i64) -> Vector3 {
        Vector3(self.0.map(|c| c * m))
    }

    /// Componentwise least nonnegative residue mod `d`.
    pub fn reduce_mod(&self, d: i64) -> Vector3 {
        Vector3(self.0.map(|c| c.rem_euclid(d)))
    }

    /// Divide out the content and make the first nonzero coordinate positive.
    pub fn primitive_canonical(&self) -> Vector3 {
        let g = self.content();
        if g == 0 {
            return *self;
        }
        let mut v = self.0.map(|c| c / g);
        if v.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
            v = v.map(|c| -c);
        }
        Vector3(v)
    }
}

impl Neg for Vector3 {
    type Output = Vector3;
    fn neg(self) -> Vector3 {
        Vector3(self.0.map(|c| -c))
    }
}

impl Add for Vector3 {
    type Output = Vector3;
    fn add(self, o: Vector3) -> Vector3 {
        Vector3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vector3 {
    type Output = Vector3;
    fn sub(self, o: Vector3) -> Vector3 {
        Vector3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl fmt::Display for Vector3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// A 3x3 integer matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat3(pub [[i64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);

    pub const fn new(rows: [[i64; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn scalar(d: i64) -> Mat3 {
        Mat3([[d, 0, 0], [0, d, 0], [0, 0, d]])
    }

    pub fn diag(x: i64, y: i64, z: i64) -> Mat3 {
        Mat3([[x, 0, 0], [0, y, 0], [0, 0, z]])
    }

    /// Matrix with the given vectors as its columns.
    pub fn from_columns(cols: [Vector3; 3]) -> Mat3 {
        Mat3([0, 1, 2].map(|i| cols.map(|c| c.0[i])))
    }

    pub fn column(&self, j: usize) -> Vector3 {
        Vector3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn row(&self, i: usize) -> Vector3 {
        Vector3(self.0[i])
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn det(&self) -> i64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn scale(&self, k: i64) -> Mat3 {
        Mat3(self.0.map(|row| row.map(|e| e * k)))
    }

    /// `T^t A T`.
    pub fn congruent(&self, a: &Mat3) -> Mat3 {
        self.transpose() * *a * *self
    }

    /// Row vector times the transpose, `v T^t`; equivalently `T v^t` as a row.
    pub fn apply_transpose(&self, v: &Vector3) -> Vector3 {
        let m = &self.0;
        let v = &v.0;
        Vector3([
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ])
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut out = [[0i64; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(out)
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.0.iter().map(|r| format!("[{},{},{}]", r[0], r[1], r[2])).collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// `a x^2 + b y^2 + c z^2 + r yz + s xz + t xy` with integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[i64; 6]", from = "[i64; 6]")]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub r: i64,
    pub s: i64,
    pub t: i64,
}

impl From<QuadForm> for [i64; 6] {
    fn from(q: QuadForm) -> Self {
        q.coefficients()
    }
}

impl From<[i64; 6]> for QuadForm {
    fn from(c: [i64; 6]) -> Self {
        QuadForm::new(c[0], c[1], c[2], c[3], c[4], c[5])
    }
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64, r: i64, s: i64, t: i64) -> Self {
        QuadForm { a, b, c, r, s, t }
    }

    /// Like [`QuadForm::new`] but rejects forms that are not positive definite.
    pub fn positive_definite(a: i64, b: i64, c: i64, r: i64, s: i64, t: i64) -> Result<Self, FormError> {
        let q = QuadForm::new(a, b, c, r, s, t);
        if q.is_positive_definite() {
            Ok(q)
        } else {
            Err(FormError::NotPositiveDefinite(q))
        }
    }

    pub fn coefficients(&self) -> [i64; 6] {
        [self.a, self.b, self.c, self.r, self.s, self.t]
    }

    pub fn evaluate(&self, v: &Vector3) -> i64 {
        let [x, y, z] = v.0;
        self.a * x * x + self.b * y * y + self.c * z * z + self.r * y * z + self.s * x * z + self.t * x * y
    }

    /// `2M_f`.
    pub fn doubled_gram(&self) -> Mat3 {
        Mat3([[2 * self.a, self.t, self.s], [self.t, 2 * self.b, self.r], [self.s, self.r, 2 * self.c]])
    }

    /// Bilinear form `u (2M_f) w^t`; equals `f(u + w) - f(u) - f(w)`.
    pub fn doubled_inner(&self, u: &Vector3, w: &Vector3) -> i64 {
        let [u0, u1, u2] = u.0;
        let [w0, w1, w2] = w.0;
        2 * self.a * u0 * w0
            + 2 * self.b * u1 * w1
            + 2 * self.c * u2 * w2
            + self.r * (u1 * w2 + u2 * w1)
            + self.s * (u0 * w2 + u2 * w0)
            + self.t * (u0 * w1 + u1 * w0)
    }

    /// Leading principal minors of `2M_f`.
    pub fn leading_minors(&self) -> [i64; 3] {
        let m = self.doubled_gram();
        [m.0[0][0], m.0[0][0] * m.0[1][1] - m.0[0][1] * m.0[1][0], m.det()]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.leading_minors().iter().all(|&m| m > 0)
    }

    pub fn scale(&self, m: i64) -> QuadForm {
        assert!(m >= 1, "scale factor must be positive");
        QuadForm::from(self.coefficients().map(|c| c * m))
    }

    /// The form `v -> f(v T^t)`, i.e. doubled Gram `T^t (2M_f) T`.
    /// A unimodular `T` gives an isometric form.
    pub fn transformed(&self, t: &Mat3) -> QuadForm {
        QuadForm::from_doubled_gram(&t.congruent(&self.doubled_gram()))
            .expect("congruent matrix of an integral form has even diagonal")
    }

    /// Inverse of [`QuadForm::doubled_gram`]; `None` unless the matrix is
    /// symmetric with even diagonal.
    pub fn from_doubled_gram(m: &Mat3) -> Option<QuadForm> {
        let g = &m.0;
        let symmetric = g[0][1] == g[1][0] && g[0][2] == g[2][0] && g[1][2] == g[2][1];
        let even = g[0][0] % 2 == 0 && g[1][1] % 2 == 0 && g[2][2] % 2 == 0;
        (symmetric && even).then(|| QuadForm::new(g[0][0] / 2, g[1][1] / 2, g[2][2] / 2, g[1][2], g[0][2], g[0][1]))
    }

    /// gcd of the six coefficients. Every value of the form is a multiple of it.
    pub fn content(&self) -> i64 {
        self.coefficients().iter().fold(0, |g, &c| gcd(g, c))
    }

    /// `true` when `T^t (2M_self) T = k * (2M_other)`.
    pub fn maps_onto(&self, other: &QuadForm, t: &Mat3, k: i64) -> bool {
        t.congruent(&self.doubled_gram()) == other.doubled_gram().scale(k)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{},{}", self.a, self.b, self.c, self.r, self.s, self.t)
    }
}

impl FromStr for QuadForm {
    type Err = FormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Result<Vec<i64>, _> = s.split(',').map(|p| p.trim().parse::<i64>()).collect();
        match parts {
            Ok(c) if c.len() == 6 => Ok(QuadForm::new(c[0], c[1], c[2], c[3], c[4], c[5])),
            _ => Err(FormError::Parse(s.to_string())),
        }
    }
}

/// The represented set of a form truncated at `bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepSet {
    pub bound: u64,
    pub members: Vec<u64>,
}

impl RepSet {
    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Smallest integer in exactly one of the two sets.
    pub fn first_difference(&self, other: &RepSet) -> Option<u64> {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.members, &other.members);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => return Some(a[i]),
                std::cmp::Ordering::Greater => return Some(b[j]),
            }
        }
        a.get(i).or(b.get(j)).copied()
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd(a, b) * b).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const F_S4: QuadForm = QuadForm::new(8, 14, 50, -8, -4, -4);
    const G_S4: QuadForm = QuadForm::new(8, 14, 14, 10, 4, 4);

    #[test]
    fn evaluate_sample_vectors() {
        assert_eq!(G_S4.evaluate(&Vector3::new(1, 4, 2)), 392);
        assert_eq!(F_S4.evaluate(&Vector3::new(4, 5, 1)), 392);
        assert_eq!(F_S4.evaluate(&Vector3::ZERO), 0);
    }

    #[test]
    fn positive_definiteness() {
        assert!(QuadForm::new(1, 1, 1, 0, 0, 0).is_positive_definite());
        assert!(!QuadForm::new(1, 1, 1, 0, 0, 3).is_positive_definite());
        assert!(!QuadForm::new(0, 1, 1, 0, 0, 0).is_positive_definite());
        assert!(QuadForm::positive_definite(1, 1, -1, 0, 0, 0).is_err());
    }

    #[test]
    fn scaling() {
        assert_eq!(QuadForm::new(4, 7, 25, -4, -2, -2).scale(2), F_S4);
        assert_eq!(F_S4.scale(1), F_S4);
        assert_eq!(QuadForm::new(2, 6, 14, -3, -1, 0).scale(2), QuadForm::new(4, 12, 28, -6, -2, 0));
    }

    #[test]
    fn doubled_gram_matrices() {
        assert_eq!(F_S4.doubled_gram(), Mat3::new([[16, -4, -4], [-4, 28, -8], [-4, -8, 100]]));
        assert_eq!(G_S4.doubled_gram(), Mat3::new([[16, 4, 4], [4, 28, 10], [4, 10, 28]]));
        assert_eq!(QuadForm::new(1, 1, 1, 0, 0, 0).doubled_gram(), Mat3::scalar(2));
        assert_eq!(QuadForm::from_doubled_gram(&F_S4.doubled_gram()), Some(F_S4));
    }

    #[test]
    fn parse_and_display() {
        let q: QuadForm = "8,14,50,-8,-4,-4".parse().unwrap();
        assert_eq!(q, F_S4);
        assert_eq!(q.to_string(), "8,14,50,-8,-4,-4");
        assert!("1,2,3".parse::<QuadForm>().is_err());
        assert!("1,2,3,4,5,x".parse::<QuadForm>().is_err());
    }

    #[test]
    fn subform_matrix_identity() {
        let t = Mat3::new([[1, 0, 0], [0, 0, -2], [0, -1, 1]]);
        assert!(G_S4.maps_onto(&F_S4, &t, 1));
        assert_eq!(G_S4.transformed(&t), F_S4);
    }

    #[test]
    fn primitive_canonical_form() {
        assert_eq!(Vector3::new(0, -4, 6).primitive_canonical(), Vector3::new(0, 2, -3));
        assert_eq!(Vector3::new(-3, 0, 0).primitive_canonical(), Vector3::new(1, 0, 0));
        assert_eq!(Vector3::ZERO.content(), 0);
    }

    #[test]
    fn rep_set_difference() {
        let a = RepSet { bound: 10, members: vec![0, 2, 4, 8] };
        let b = RepSet { bound: 10, members: vec![0, 2, 6, 8] };
        assert_eq!(a.first_difference(&b), Some(4));
        assert_eq!(a.first_difference(&a), None);
        let c = RepSet { bound: 10, members: vec![0, 2] };
        assert_eq!(a.first_difference(&c), Some(4));
    }

    fn small_form() -> impl Strategy<Value = QuadForm> {
        (1i64..20, 1i64..20, 1i64..20, -10i64..10, -10i64..10, -10i64..10)
            .prop_map(|(a, b, c, r, s, t)| QuadForm::new(a, b, c, r, s, t))
    }

    fn small_vec() -> impl Strategy<Value = Vector3> {
        (-50i64..50, -50i64..50, -50i64..50).prop_map(|(x, y, z)| Vector3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn gram_and_direct_evaluation_agree(q in small_form(), v in small_vec()) {
            let m = q.doubled_gram();
            let vm: i64 = (0..3).map(|j| (0..3).map(|i| v.0[i] * m.0[i][j]).sum::<i64>() * v.0[j]).sum();
            prop_assert_eq!(vm, 2 * q.evaluate(&v));
            prop_assert_eq!(q.doubled_inner(&v, &v), 2 * q.evaluate(&v));
        }

        #[test]
        fn scaling_and_symmetry(q in small_form(), v in small_vec(), m in 1i64..10) {
            prop_assert_eq!(q.scale(m).evaluate(&v), m * q.evaluate(&v));
            prop_assert_eq!(q.evaluate(&-v), q.evaluate(&v));
        }

        #[test]
        fn minors_imply_positive_values(q in small_form()) {
            if q.is_positive_definite() {
                for x in -10i64..=10 {
                    for y in -10i64..=10 {
                        for z in -10i64..=10 {
                            let v = Vector3::new(x, y, z);
                            prop_assert_eq!(q.evaluate(&v) > 0, !v.is_zero());
                        }
                    }
                }
            }
        }
    }
}
