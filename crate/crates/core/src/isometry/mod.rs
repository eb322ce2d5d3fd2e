//! Exhaustive search for integral matrices `T` with `T^t M_f T = d^2 M_g`.
//!
//! Column `j` of such a `T` is a vector of `f`-value `d^2 g_jj`, and columns
//! `i, j` have doubled inner product `d^2 (2M_g)_ij`. Candidates for each
//! column come from [`representations`], which is complete, and the columns
//! are fixed one at a time in order of increasing target value, pruning on the
//! inner products with the columns already chosen. An unbounded search is
//! therefore exhaustive; a bounded one records whether it was cut short.

mod eigen;

use std::cell::Cell;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use eigen::{eigen_data, eigen_spaces_of_power, matrix_power, ArithmeticOverflow, EigenData, EigenSpace};

use crate::enumerate::representations;
use crate::forms::{Mat3, QuadForm, Vector3};

thread_local! {
    static SEARCHES: Cell<u64> = const { Cell::new(0) };
}

/// Number of transform searches started on the current thread.
pub fn searches_on_this_thread() -> u64 {
    SEARCHES.with(Cell::get)
}

/// The set `R(f, g, d)` of integral `T` with `T^t M_f T = d^2 M_g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformSet {
    pub f: QuadForm,
    pub g: QuadForm,
    pub d: i64,
    pub matrices: Vec<Mat3>,
    /// False when the search stopped at a node or result limit.
    pub complete: bool,
}

impl TransformSet {
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn contains(&self, t: &Mat3) -> bool {
        self.matrices.binary_search(t).is_ok()
    }
}

/// Limits on a transform search. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub max_results: Option<usize>,
}

impl SearchBudget {
    pub const UNLIMITED: SearchBudget = SearchBudget { max_nodes: None, max_results: None };

    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget { max_nodes: Some(max_nodes), max_results: None }
    }
}

struct Candidate {
    v: Vector3,
    /// `v (2M_f)`, so inner products are plain dot products.
    va: [i64; 3],
}

fn dot(a: &[i64; 3], b: &Vector3) -> i64 {
    a[0] * b.0[0] + a[1] * b.0[1] + a[2] * b.0[2]
}

/// Backtracking core. `accept` filters complete matrices; the search stops
/// after `budget.max_results` accepted matrices or `budget.max_nodes` nodes.
fn search(
    f: &QuadForm,
    g: &QuadForm,
    d: i64,
    budget: SearchBudget,
    accept: impl Fn(&Mat3) -> bool,
) -> (Vec<Mat3>, bool) {
    assert!(d >= 1, "scale d must be positive");
    assert!(f.is_positive_definite() && g.is_positive_definite());
    SEARCHES.with(|c| c.set(c.get() + 1));

    let a = f.doubled_gram();
    let target = g.doubled_gram().scale(d * d);
    let norms = [target.0[0][0] / 2, target.0[1][1] / 2, target.0[2][2] / 2];
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&j| norms[j]);

    let mut cache: BTreeMap<i64, Vec<Vector3>> = BTreeMap::new();
    for &n in &norms {
        cache.entry(n).or_insert_with(|| representations(f, n as u64));
    }
    let cands: Vec<Vec<Candidate>> = order
        .iter()
        .map(|&j| {
            cache[&norms[j]]
                .iter()
                .map(|&v| {
                    let va = [0, 1, 2].map(|k| (0..3).map(|i| v.0[i] * a.0[i][k]).sum());
                    Candidate { v, va }
                })
                .collect()
        })
        .collect();

    let (j0, j1, j2) = (order[0], order[1], order[2]);
    let mut nodes = 0u64;
    let mut found = Vec::new();
    let out_of_nodes = |nodes: u64| budget.max_nodes.is_some_and(|m| nodes > m);

    'outer: for c0 in &cands[0] {
        for c1 in &cands[1] {
            nodes += 1;
            if out_of_nodes(nodes) {
                break 'outer;
            }
            if dot(&c0.va, &c1.v) != target.0[j0][j1] {
                continue;
            }
            for c2 in &cands[2] {
                nodes += 1;
                if out_of_nodes(nodes) {
                    break 'outer;
                }
                if dot(&c0.va, &c2.v) != target.0[j0][j2] || dot(&c1.va, &c2.v) != target.0[j1][j2] {
                    continue;
                }
                let mut cols = [Vector3::ZERO; 3];
                cols[j0] = c0.v;
                cols[j1] = c1.v;
                cols[j2] = c2.v;
                let t = Mat3::from_columns(cols);
                debug_assert!(f.maps_onto(g, &t, d * d));
                if accept(&t) {
                    found.push(t);
                    if budget.max_results.is_some_and(|m| found.len() >= m) {
                        break 'outer;
                    }
                }
            }
        }
    }
    let complete = !out_of_nodes(nodes) && budget.max_results.is_none_or(|m| found.len() < m);
    found.sort_unstable();
    found.dedup();
    (found, complete)
}

/// The complete set `R(f, g, d)`, sorted row-major lexicographically.
pub fn find_transforms(f: &QuadForm, g: &QuadForm, d: i64) -> TransformSet {
    find_transforms_with_budget(f, g, d, SearchBudget::UNLIMITED)
}

pub fn find_transforms_with_budget(f: &QuadForm, g: &QuadForm, d: i64, budget: SearchBudget) -> TransformSet {
    let (matrices, complete) = search(f, g, d, budget, |_| true);
    TransformSet { f: *f, g: *g, d, matrices, complete }
}

/// Some `T` with `T^t M_g T = M_f`, i.e. `f` is a subform of `g`.
pub fn subform_witness(f: &QuadForm, g: &QuadForm) -> Option<Mat3> {
    if f == g {
        return Some(Mat3::IDENTITY);
    }
    let budget = SearchBudget { max_nodes: None, max_results: Some(1) };
    search(g, f, 1, budget, |_| true).0.into_iter().next()
}

/// Some unimodular `T` with `T^t M_f T = M_g`. `None` is a proof that the
/// forms are not isometric over Z.
pub fn is_isometric(f: &QuadForm, g: &QuadForm) -> Option<Mat3> {
    if f == g {
        return Some(Mat3::IDENTITY);
    }
    if f.doubled_gram().det() != g.doubled_gram().det() {
        return None;
    }
    let budget = SearchBudget { max_nodes: None, max_results: Some(1) };
    search(f, g, 1, budget, |t| t.det().abs() == 1).0.into_iter().next()
}

/// `R(g, g, d)`: matrices with `K^t M_g K = d^2 M_g`.
pub fn scaled_automorphisms(g: &QuadForm, d: i64, budget: SearchBudget) -> TransformSet {
    find_transforms_with_budget(g, g, d, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    const F_S4: QuadForm = QuadForm::new(8, 14, 50, -8, -4, -4);
    const G_S4: QuadForm = QuadForm::new(8, 14, 14, 10, 4, 4);

    fn mul(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
        let mut out = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    fn satisfies(f: &QuadForm, g: &QuadForm, t: &Mat3, d: i64) -> bool {
        let tt = t.transpose().0;
        let lhs = mul(&mul(&tt, &f.doubled_gram().0), &t.0);
        let rhs = g.doubled_gram().0.map(|r| r.map(|e| e * d * d));
        lhs == rhs
    }

    #[test]
    fn transforms_s4_at_4() {
        let set = find_transforms(&F_S4, &G_S4, 4);
        assert!(set.complete);
        assert_eq!(set.len(), 8);
        assert!(set.contains(&Mat3::new([[4, 2, 2], [0, 4, 2], [0, 0, 2]])));
        assert!(set.matrices.iter().all(|t| satisfies(&F_S4, &G_S4, t, 4)));
    }

    #[test]
    fn transforms_s4_at_12() {
        let set = find_transforms(&F_S4, &G_S4, 12);
        assert_eq!(set.len(), 144);
        assert!(set.matrices.iter().all(|t| satisfies(&F_S4, &G_S4, t, 12)));
    }

    #[test]
    fn automorphisms_contain_plus_minus_identity() {
        let set = find_transforms(&F_S4, &F_S4, 1);
        assert!(set.contains(&Mat3::IDENTITY));
        assert!(set.contains(&Mat3::scalar(-1)));
    }

    #[test]
    fn orbit_closure_under_automorphisms() {
        let autos = find_transforms(&F_S4, &F_S4, 1);
        let set = find_transforms(&F_S4, &G_S4, 4);
        for u in &autos.matrices {
            for t in &set.matrices {
                assert!(set.contains(&(*u * *t)));
            }
        }
    }

    #[test]
    fn subform_witnesses() {
        let t = subform_witness(&F_S4, &G_S4).expect("f_S4 is a subform of g_S4");
        assert!(satisfies(&G_S4, &F_S4, &t, 1));
        assert_eq!(subform_witness(&F_S4, &F_S4), Some(Mat3::IDENTITY));
        assert_eq!(is_isometric(&G_S4, &G_S4), Some(Mat3::IDENTITY));
        let f6 = QuadForm::new(4, 12, 28, -6, -2, 0);
        let g6 = QuadForm::new(4, 4, 28, 2, 4, 4);
        let t = subform_witness(&f6, &g6).expect("f_S6 is a subform of g_S6");
        assert!(satisfies(&g6, &f6, &t, 1));
    }

    #[test]
    fn isometry_tests() {
        assert!(is_isometric(&F_S4, &G_S4).is_none());
        assert!(is_isometric(&F_S4, &F_S4).is_some());
        let u = Mat3::new([[1, 2, 0], [0, 1, -1], [0, 0, 1]]);
        let h = G_S4.transformed(&u);
        let t = is_isometric(&G_S4, &h).expect("unimodular change of variables");
        assert!(satisfies(&G_S4, &h, &t, 1));
        assert_eq!(t.det().abs(), 1);
    }

    #[test]
    fn scaled_automorphism_of_g_s4() {
        let tt = Mat3::new([[12, 6, 2], [0, 0, 12], [0, -12, -8]]);
        let set = scaled_automorphisms(&G_S4, 12, SearchBudget::UNLIMITED);
        assert!(set.complete);
        assert!(set.contains(&tt));
        assert!(set.matrices.iter().all(|k| satisfies(&G_S4, &G_S4, k, 12)));
    }

    #[test]
    fn truncated_search_is_marked() {
        let set = find_transforms_with_budget(&F_S4, &G_S4, 12, SearchBudget { max_nodes: None, max_results: Some(3) });
        assert_eq!(set.len(), 3);
        assert!(!set.complete);
        let set = find_transforms_with_budget(&F_S4, &G_S4, 12, SearchBudget::nodes(10));
        assert!(!set.complete);
    }

    #[test]
    fn search_counter_advances() {
        let before = searches_on_this_thread();
        let _ = find_transforms(&F_S4, &G_S4, 1);
        assert_eq!(searches_on_this_thread(), before + 1);
    }
}
