//! Brute-force oracles shared by the integration tests. They share no code
//! with the library: a box is bounded, every point in it is evaluated.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// `f(x, y, z)` from the six coefficients `(a, b, c, r, s, t)`.
pub fn value(q: &[i64; 6], x: i64, y: i64, z: i64) -> i64 {
    let [a, b, c, r, s, t] = *q;
    a * x * x + b * y * y + c * z * z + r * y * z + s * x * z + t * x * y
}

/// Half-widths of a box containing every `v` with `f(v) <= n`.
///
/// Gershgorin on the Gram matrix gives `f(v) >= lambda |v|^2` when its row
/// margin is positive; otherwise fall back to the exact coordinate bound
/// `x_i^2 <= n * cof_ii / det` of the doubled Gram matrix, scaled by 2.
pub fn box_radius(q: &[i64; 6], n: i64) -> [i64; 3] {
    let [a, b, c, r, s, t] = *q;
    let g = [[2 * a, t, s], [t, 2 * b, r], [s, r, 2 * c]];
    let margin =
        (0..3).map(|i| g[i][i] - (0..3).filter(|&j| j != i).map(|j| g[i][j].abs()).sum::<i64>()).min().unwrap();
    if margin > 0 {
        // 2 f(v) = v G v^t >= margin |v|^2.
        let r = ((2 * n) as f64 / margin as f64).sqrt().floor() as i64 + 1;
        return [r; 3];
    }
    let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    let cof = [
        g[1][1] * g[2][2] - g[1][2] * g[1][2],
        g[0][0] * g[2][2] - g[0][2] * g[0][2],
        g[0][0] * g[1][1] - g[0][1] * g[0][1],
    ];
    cof.map(|c| ((2 * n * c) as f64 / det as f64).sqrt().floor() as i64 + 1)
}

fn for_each_point(q: &[i64; 6], n: i64, mut visit: impl FnMut(i64, i64, i64, i64)) {
    let [rx, ry, rz] = box_radius(q, n);
    for x in -rx..=rx {
        for y in -ry..=ry {
            for z in -rz..=rz {
                let v = value(q, x, y, z);
                if v <= n {
                    visit(x, y, z, v);
                }
            }
        }
    }
}

/// `r(m, f)` for `0 <= m <= n`.
pub fn counts(q: &[i64; 6], n: i64) -> Vec<u64> {
    let mut out = vec![0u64; n as usize + 1];
    for_each_point(q, n, |_, _, _, v| out[v as usize] += 1);
    out
}

/// Values in `[0, n]` that the form takes.
pub fn represented(q: &[i64; 6], n: i64) -> BTreeSet<u64> {
    counts(q, n).iter().enumerate().filter(|(_, &c)| c > 0).map(|(m, _)| m as u64).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Values in `[0, n]` taken at a vector with coprime coordinates.
pub fn primitively_represented(q: &[i64; 6], n: i64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for_each_point(q, n, |x, y, z, v| {
        if gcd(gcd(x, y), z) == 1 {
            out.insert(v as u64);
        }
    });
    out
}

/// `T^t (2M_p) T == k (2M_q)` by direct multiplication.
pub fn gram_identity(p: &[i64; 6], q: &[i64; 6], t: &[[i64; 3]; 3], k: i64) -> bool {
    let gram = |q: &[i64; 6]| {
        let [a, b, c, r, s, tt] = *q;
        [[2 * a, tt, s], [tt, 2 * b, r], [s, r, 2 * c]]
    };
    let (gp, gq) = (gram(p), gram(q));
    (0..3).all(|i| {
        (0..3).all(|j| {
            let lhs: i64 =
                (0..3).flat_map(|k| (0..3).map(move |l| (k, l))).map(|(k, l)| t[k][i] * gp[k][l] * t[l][j]).sum();
            lhs == k * gq[i][j]
        })
    })
}
