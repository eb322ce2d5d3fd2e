//! Two-directional proofs that `Q(f) = Q(g)`.
//!
//! Each inclusion `Q(source) ⊆ Q(target)` is shown either by a subform
//! witness or by a family of residue classes covering every value of the
//! source form. On each class, all residue vectors are good, or the bad ones
//! are handled by an escape argument:
//!
//! A scaled automorphism `K` of the source (`K^t M K = d^2 M`) that sends
//! every bad coset to an integral vector `(1/d) u K^t` keeps the value and the
//! class, so iterating it from a bad representation either reaches a good
//! coset or cycles inside the finite set of representations. If `K/d` has
//! infinite order, a cycle is only possible along a rational eigenvector of
//! some `K^k` with `k <= 6`; the values `t^2 g(e)` along those directions are
//! covered by a target witness `w` with `f(w) = g(e)`, since `f(tw) = t^2 f(w)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::{
    attainable_residues, classify_good, cover_check, transport, CongruenceError, GoodVectorReport, ResidueClass,
};
use crate::enumerate::{representations, represented_set};
use crate::fixtures;
use crate::forms::{lcm, FormError, Mat3, QuadForm, RepSet, Vector3};
use crate::isometry::{
    eigen_data, eigen_spaces_of_power, find_transforms, is_isometric, scaled_automorphisms, subform_witness,
    ArithmeticOverflow, SearchBudget, TransformSet,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("classes leave residues {uncovered:?} mod {modulus} uncovered")]
    CoverIncomplete { modulus: i64, uncovered: Vec<i64> },
    #[error("class {0} has bad vectors and no escape argument")]
    ClassUnprovable(ResidueClass),
    #[error("no scaled automorphism closes the bad vectors of class {0}")]
    NoEscapeMatrix(ResidueClass),
    #[error("eigenvector value {0} is not represented by the target form")]
    EigenvalueBaseNotRepresented(i64),
    #[error("class {0} has no bad vectors; an escape argument is not needed")]
    NothingToEscape(ResidueClass),
    #[error("represented sets differ at {0}")]
    EmpiricalMismatch(u64),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Overflow(#[from] ArithmeticOverflow),
}

/// Search limits and verification bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverConfig {
    /// Node budget for each escape-matrix search.
    pub max_nodes: u64,
    /// Represented sets of the two forms are compared up to this bound.
    pub empirical_bound: u64,
    /// Moduli tried, in order, when no class list is supplied.
    pub moduli: Vec<i64>,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig { max_nodes: 1_000_000, empirical_bound: 1_000_000, moduli: vec![4, 8, 12, 24, 36, 48] }
    }
}

/// Optional guidance for [`prove_pair`]. Every hint is verified before use;
/// invalid hints are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofHints {
    pub classes_f_in_g: Option<Vec<ResidueClass>>,
    pub classes_g_in_f: Option<Vec<ResidueClass>>,
    /// Candidate `T` with `T^t M_g T = M_f`.
    pub subform_f_in_g: Option<Mat3>,
    /// Candidate escape matrices, tried before the search.
    pub escape_matrices: Vec<Mat3>,
}

impl ProofHints {
    /// Class lists and matrices for the four sets with a recorded proof.
    pub fn recorded(set: usize) -> ProofHints {
        ProofHints {
            classes_f_in_g: fixtures::recorded_classes_f_in_g(set),
            classes_g_in_f: fixtures::recorded_classes_g_in_f(set),
            subform_f_in_g: (set == 4).then_some(fixtures::S4_SUBFORM),
            escape_matrices: if set == 4 { vec![fixtures::S4_ESCAPE] } else { Vec::new() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeArgument {
    pub cls: ResidueClass,
    pub ttilde: Mat3,
    pub bad: Vec<Vector3>,
    /// Primitive rational eigenvectors of `ttilde^k`, `1 <= k <= 6`.
    pub eigenvectors: Vec<Vector3>,
    /// Distinct source values `m = g(e)`; the exceptions are `m t^2`.
    pub exceptional_values: Vec<i64>,
    /// `(m, w)` with `target(w) = m`.
    pub f_covers: Vec<(i64, Vector3)>,
}

/// Proof for one residue class: witnesses index into `transforms`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassProof {
    pub cls: ResidueClass,
    pub transforms: Vec<Mat3>,
    pub report: GoodVectorReport,
    pub escape: Option<EscapeArgument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionProof {
    /// `T` with `T^t M_target T = M_source`.
    Subform(Mat3),
    Cover(Vec<ClassProof>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairProof {
    pub f: QuadForm,
    pub g: QuadForm,
    /// `Q(f) ⊆ Q(g)`.
    pub f_in_g: DirectionProof,
    /// `Q(g) ⊆ Q(f)`.
    pub g_in_f: DirectionProof,
    /// Represented sets were compared and found equal up to this bound.
    pub empirical_bound: u64,
}

/// Check every invariant of an escape candidate `k` for the bad cosets of
/// `report` (source `report.g`, target `report.f`).
pub fn check_escape_matrix(report: &GoodVectorReport, k: &Mat3) -> Result<EscapeArgument, ProofError> {
    let (target, source, cls) = (&report.f, &report.g, report.cls);
    let d = cls.d;
    let reject = || ProofError::NoEscapeMatrix(cls);
    if report.bad.is_empty() {
        return Err(ProofError::NothingToEscape(cls));
    }
    if !source.maps_onto(source, k, d * d) {
        return Err(reject());
    }
    if !report.bad.iter().all(|u| transport(u, k, d).is_some()) {
        return Err(reject());
    }
    if eigen_data(k, d)?.finite_order {
        return Err(reject());
    }
    // Every lift of a bad coset lands back in R(g, d, a).
    for u in &report.bad {
        let base = transport(u, k, d).expect("checked above");
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let image = base + k.apply_transpose(&Vector3::new(x, y, z));
                    if !cls.contains(source.evaluate(&image.reduce_mod(d))) {
                        return Err(reject());
                    }
                }
            }
        }
    }

    let mut eigenvectors = Vec::new();
    for power in 1..=6u32 {
        let periodic = (d as i128).pow(power);
        for space in eigen_spaces_of_power(k, power)? {
            if space.dim() > 1 {
                if space.eigenvalue.abs() == periodic {
                    // A whole plane of periodic directions cannot be closed.
                    return Err(reject());
                }
                continue;
            }
            eigenvectors.extend(space.basis);
        }
    }
    eigenvectors.sort_unstable();
    eigenvectors.dedup();

    let mut exceptional_values: Vec<i64> = eigenvectors.iter().map(|e| source.evaluate(e)).collect();
    exceptional_values.sort_unstable();
    exceptional_values.dedup();
    let mut f_covers = Vec::new();
    for &m in &exceptional_values {
        let w =
            representations(target, m as u64).into_iter().next().ok_or(ProofError::EigenvalueBaseNotRepresented(m))?;
        f_covers.push((m, w));
    }
    Ok(EscapeArgument { cls, ttilde: *k, bad: report.bad.clone(), eigenvectors, exceptional_values, f_covers })
}

/// Find a scaled automorphism of `report.g` that closes the bad cosets.
/// `preferred` matrices are tried before the search.
pub fn build_escape(
    report: &GoodVectorReport,
    preferred: &[Mat3],
    config: &ProverConfig,
) -> Result<EscapeArgument, ProofError> {
    if report.bad.is_empty() {
        return Err(ProofError::NothingToEscape(report.cls));
    }
    let candidates = scaled_automorphisms(&report.g, report.cls.d, SearchBudget::nodes(config.max_nodes));
    let mut last = ProofError::NoEscapeMatrix(report.cls);
    for k in preferred.iter().chain(&candidates.matrices) {
        match check_escape_matrix(report, k) {
            Ok(arg) => return Ok(arg),
            Err(e @ ProofError::EigenvalueBaseNotRepresented(_)) => last = e,
            Err(_) => {}
        }
    }
    Err(last)
}

/// Transform sets `R(target, source, d)` for each distinct modulus.
fn transform_sets(
    target: &QuadForm,
    source: &QuadForm,
    moduli: impl IntoIterator<Item = i64>,
) -> BTreeMap<i64, TransformSet> {
    let mut ds: Vec<i64> = moduli.into_iter().collect();
    ds.sort_unstable();
    ds.dedup();
    ds.into_par_iter().map(|d| (d, find_transforms(target, source, d))).collect()
}

fn prove_class(
    target: &QuadForm,
    source: &QuadForm,
    cls: ResidueClass,
    transforms: &TransformSet,
    hints: &[Mat3],
    config: &ProverConfig,
) -> Result<ClassProof, ProofError> {
    let report = classify_good(target, source, cls, transforms)?;
    let escape = if report.all_good() {
        None
    } else {
        match build_escape(&report, hints, config) {
            Ok(e) => Some(e),
            Err(ProofError::NoEscapeMatrix(_)) => return Err(ProofError::ClassUnprovable(cls)),
            Err(e) => return Err(e),
        }
    };
    Ok(ClassProof { cls, transforms: transforms.matrices.clone(), report, escape })
}

/// Prove `Q(g) ⊆ Q(f)` from the given classes: `g ≺_{d,a} f` or an escape
/// argument on each class, and the classes cover every residue of `g`.
pub fn prove_direction(
    f: &QuadForm,
    g: &QuadForm,
    classes: &[ResidueClass],
    hints: &[Mat3],
    config: &ProverConfig,
) -> Result<Vec<ClassProof>, ProofError> {
    let cover = cover_check(g, classes);
    if !cover.covered() {
        return Err(ProofError::CoverIncomplete { modulus: cover.modulus, uncovered: cover.uncovered });
    }
    let sets = transform_sets(f, g, classes.iter().map(|c| c.d));
    classes.par_iter().map(|&cls| prove_class(f, g, cls, &sets[&cls.d], hints, config)).collect()
}

/// Search for a covering family: moduli in `config.moduli` order, every
/// residue of `g` not yet covered by a proved class whose modulus divides the
/// current one.
pub fn search_classes(
    f: &QuadForm,
    g: &QuadForm,
    hints: &[Mat3],
    config: &ProverConfig,
) -> Result<Vec<ClassProof>, ProofError> {
    let mut proved: Vec<ClassProof> = Vec::new();
    let mut failed = None;
    for &d in &config.moduli {
        let open: Vec<ResidueClass> = attainable_residues(g, d)
            .into_iter()
            .filter(|&a| !proved.iter().any(|p| d % p.cls.d == 0 && p.cls.contains(a)))
            .map(|a| ResidueClass::new(d, a).expect("residue below modulus"))
            .collect();
        if open.is_empty() {
            continue;
        }
        let transforms = find_transforms(f, g, d);
        let results: Vec<Result<ClassProof, ProofError>> =
            open.par_iter().map(|&cls| prove_class(f, g, cls, &transforms, hints, config)).collect();
        for r in results {
            match r {
                Ok(p) => proved.push(p),
                Err(e) => failed = Some(e),
            }
        }
        let classes: Vec<ResidueClass> = proved.iter().map(|p| p.cls).collect();
        if !classes.is_empty() && cover_check(g, &classes).covered() {
            return Ok(proved);
        }
    }
    // Report what is left open modulo everything that was tried.
    let modulus = config.moduli.iter().chain(proved.iter().map(|p| &p.cls.d)).fold(1, |l, &d| lcm(l, d));
    let uncovered =
        attainable_residues(g, modulus).into_iter().filter(|&r| !proved.iter().any(|p| p.cls.contains(r))).collect();
    Err(match failed {
        Some(e @ ProofError::EigenvalueBaseNotRepresented(_)) => e,
        _ => ProofError::CoverIncomplete { modulus, uncovered },
    })
}

fn verified_subform(target: &QuadForm, source: &QuadForm, hint: Option<Mat3>) -> Option<Mat3> {
    hint.filter(|t| target.maps_onto(source, t, 1)).or_else(|| subform_witness(source, target))
}

/// Prove `Q(f) = Q(g)` and compare represented sets up to the configured bound.
pub fn prove_pair(
    f: &QuadForm,
    g: &QuadForm,
    hints: &ProofHints,
    config: &ProverConfig,
) -> Result<PairProof, ProofError> {
    for q in [f, g] {
        if !q.is_positive_definite() {
            return Err(FormError::NotPositiveDefinite(*q).into());
        }
    }
    let direction = |target: &QuadForm, source: &QuadForm, subform_hint, classes: &Option<Vec<ResidueClass>>| {
        if let Some(t) = verified_subform(target, source, subform_hint) {
            return Ok(DirectionProof::Subform(t));
        }
        match classes {
            Some(list) => prove_direction(target, source, list, &hints.escape_matrices, config),
            None => search_classes(target, source, &hints.escape_matrices, config),
        }
        .map(DirectionProof::Cover)
    };
    let f_in_g = direction(g, f, hints.subform_f_in_g, &hints.classes_f_in_g)?;
    let g_in_f = direction(f, g, None, &hints.classes_g_in_f)?;

    let bound = config.empirical_bound;
    if let Some(n) = represented_set(f, bound).first_difference(&represented_set(g, bound)) {
        return Err(ProofError::EmpiricalMismatch(n));
    }
    Ok(PairProof { f: *f, g: *g, f_in_g, g_in_f, empirical_bound: bound })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("unknown set S{0}")]
    UnknownSet(usize),
    #[error("S{set}: forms {i} and {j} differ at {n}")]
    MismatchAt { set: usize, i: usize, j: usize, n: u64 },
    #[error("S{set}: forms {i} and {j} are isometric")]
    Isometric { set: usize, i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub set: usize,
    pub bound: u64,
    pub forms: Vec<QuadForm>,
    /// Size of the common represented set in `[0, bound]`.
    pub represented: usize,
    pub non_isometric: bool,
}

/// Compare the doubled forms of set `S{set}` up to `bound` and confirm that
/// no two of them are isometric.
pub fn verify_table(set: usize, bound: u64) -> Result<TableReport, TableError> {
    let forms = fixtures::scaled_set(set).ok_or(TableError::UnknownSet(set))?;
    let sets: Vec<RepSet> = forms.par_iter().map(|q| represented_set(q, bound)).collect();
    for j in 1..sets.len() {
        if let Some(n) = sets[0].first_difference(&sets[j]) {
            return Err(TableError::MismatchAt { set, i: 0, j, n });
        }
    }
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            if is_isometric(&forms[i], &forms[j]).is_some() {
                return Err(TableError::Isometric { set, i, j });
            }
        }
    }
    Ok(TableReport { set, bound, represented: sets[0].len(), forms, non_isometric: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KaplanskyFamily {
    /// `{a x^2 + b y^2 + b z^2 + b yz, a x^2 + b y^2 + 3b z^2}`
    Iii,
    /// `{a(x^2 + y^2 + z^2) + b(yz + xz + xy), a x^2 + (2a-b) y^2 + (2a+b) z^2 + 2b xz}`
    Iv,
}

pub fn kaplansky_family_pair(kind: KaplanskyFamily, a: i64, b: i64) -> Result<(QuadForm, QuadForm), FormError> {
    let (p, q) = match kind {
        KaplanskyFamily::Iii => (QuadForm::new(a, b, b, b, 0, 0), QuadForm::new(a, b, 3 * b, 0, 0, 0)),
        KaplanskyFamily::Iv => (QuadForm::new(a, a, a, b, b, b), QuadForm::new(a, 2 * a - b, 2 * a + b, 0, 2 * b, 0)),
    };
    for form in [p, q] {
        if !form.is_positive_definite() {
            return Err(FormError::NotPositiveDefinite(form));
        }
    }
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::precedes;
    use crate::fixtures::S4_ESCAPE;

    const F_S4: QuadForm = QuadForm::new(8, 14, 50, -8, -4, -4);
    const G_S4: QuadForm = QuadForm::new(8, 14, 14, 10, 4, 4);

    fn cls(d: i64, a: i64) -> ResidueClass {
        ResidueClass::new(d, a).unwrap()
    }

    fn small() -> ProverConfig {
        ProverConfig { empirical_bound: 20_000, ..ProverConfig::default() }
    }

    #[test]
    fn escape_for_s4_class_12_2() {
        let (_, report, _) = precedes(&F_S4, &G_S4, cls(12, 2));
        let arg = check_escape_matrix(&report, &S4_ESCAPE).unwrap();
        assert_eq!(arg.eigenvectors, vec![Vector3::new(1, 0, 0)]);
        assert_eq!(arg.exceptional_values, vec![8]);
        assert_eq!(arg.f_covers.len(), 1);
        assert_eq!(F_S4.evaluate(&arg.f_covers[0].1), 8);

        let searched = build_escape(&report, &[], &small()).unwrap();
        assert!(check_escape_matrix(&report, &searched.ttilde).is_ok());
        let preferred = build_escape(&report, &[S4_ESCAPE], &small()).unwrap();
        assert_eq!(preferred.ttilde, S4_ESCAPE);
    }

    #[test]
    fn scalar_matrix_is_not_an_escape() {
        let (_, report, _) = precedes(&F_S4, &G_S4, cls(12, 2));
        assert_eq!(check_escape_matrix(&report, &Mat3::scalar(12)), Err(ProofError::NoEscapeMatrix(cls(12, 2))));
        let mut broken = S4_ESCAPE;
        broken.0[2][2] = -7;
        assert!(check_escape_matrix(&report, &broken).is_err());
    }

    #[test]
    fn escape_needs_bad_vectors() {
        let (_, report, _) = precedes(&F_S4, &G_S4, cls(12, 6));
        assert_eq!(build_escape(&report, &[], &small()), Err(ProofError::NothingToEscape(cls(12, 6))));
    }

    #[test]
    fn direction_rejects_incomplete_cover() {
        let err = prove_direction(&F_S4, &G_S4, &[cls(4, 0), cls(12, 6)], &[], &small()).unwrap_err();
        assert!(matches!(err, ProofError::CoverIncomplete { .. }));
    }

    #[test]
    fn trivial_pair() {
        let q = QuadForm::new(1, 1, 1, 0, 0, 0);
        let proof = prove_pair(&q, &q, &ProofHints::default(), &small()).unwrap();
        assert!(matches!(proof.f_in_g, DirectionProof::Subform(_)));
        assert!(matches!(proof.g_in_f, DirectionProof::Subform(_)));
        let proof = prove_direction(&q, &q, &[cls(1, 0)], &[], &small()).unwrap();
        assert!(proof[0].report.all_good());
    }

    #[test]
    fn kaplansky_pairs() {
        let (p, q) = kaplansky_family_pair(KaplanskyFamily::Iii, 1, 1).unwrap();
        assert_eq!(p, QuadForm::new(1, 1, 1, 1, 0, 0));
        assert_eq!(q, QuadForm::new(1, 1, 3, 0, 0, 0));
        let (p, q) = kaplansky_family_pair(KaplanskyFamily::Iv, 3, 1).unwrap();
        assert_eq!(p, QuadForm::new(3, 3, 3, 1, 1, 1));
        assert_eq!(q, QuadForm::new(3, 5, 7, 0, 2, 0));
        assert!(kaplansky_family_pair(KaplanskyFamily::Iii, 1, -1).is_err());
    }

    #[test]
    fn table_with_zero_bound() {
        let r = verify_table(4, 0).unwrap();
        assert_eq!(r.represented, 1);
        assert!(matches!(verify_table(16, 10), Err(TableError::UnknownSet(16))));
    }
}
