//! Named forms: the fifteen sets of pairwise non-isometric forms with equal
//! represented sets, their doubled versions, and the proof hints for the four
//! pairs with a known congruence proof.

use crate::congruence::ResidueClass;
use crate::forms::{Mat3, QuadForm};

/// Sets `S1..S15`, forms in listing order (named `a, b, c, d`).
pub const TABLE: [&[QuadForm]; 15] = [
    &[QuadForm::new(5, 8, 8, -5, -1, -4), QuadForm::new(5, 5, 8, -1, -4, -2)],
    &[QuadForm::new(3, 4, 7, -1, 0, 0), QuadForm::new(3, 4, 7, 4, 3, 3)],
    &[QuadForm::new(1, 4, 7, -1, 0, 0), QuadForm::new(1, 4, 5, -1, -1, 0)],
    &[QuadForm::new(4, 7, 25, -4, -2, -2), QuadForm::new(4, 7, 7, 5, 2, 2)],
    &[QuadForm::new(2, 6, 41, -3, -1, 0), QuadForm::new(2, 2, 41, 1, 2, 2)],
    &[QuadForm::new(2, 6, 14, -3, -1, 0), QuadForm::new(2, 2, 14, 1, 2, 2)],
    &[QuadForm::new(2, 4, 8, 4, 1, 1), QuadForm::new(2, 2, 4, -1, -2, 0)],
    &[QuadForm::new(5, 5, 8, 0, -4, -3), QuadForm::new(5, 7, 7, 6, 1, 5)],
    &[QuadForm::new(3, 3, 7, 1, 2, 1), QuadForm::new(3, 5, 5, 3, 1, 3)],
    &[QuadForm::new(5, 5, 8, -1, -2, -4), QuadForm::new(5, 5, 6, 0, -3, -2)],
    &[QuadForm::new(2, 4, 7, 0, -1, -1), QuadForm::new(2, 4, 7, 4, 2, 1)],
    &[QuadForm::new(4, 6, 7, 3, 2, 3), QuadForm::new(4, 4, 6, 0, -3, -2)],
    &[
        QuadForm::new(5, 12, 28, 0, -4, -4),
        QuadForm::new(5, 12, 24, -8, 0, -4),
        QuadForm::new(5, 12, 21, -4, -2, -4),
        QuadForm::new(5, 12, 12, 0, -4, -4),
    ],
    &[
        QuadForm::new(3, 5, 7, -2, 0, -2),
        QuadForm::new(3, 5, 6, 0, -2, -2),
        QuadForm::new(3, 5, 6, 4, 2, 2),
        QuadForm::new(3, 3, 5, -2, -2, 0),
    ],
    &[
        QuadForm::new(3, 5, 5, 5, 2, 3),
        QuadForm::new(3, 3, 5, -1, -2, -1),
        QuadForm::new(3, 3, 5, 2, 3, 1),
        QuadForm::new(3, 3, 3, 1, 1, 3),
    ],
];

/// Sets whose pair has a congruence proof; in each, `f` is the first listed
/// form and `g` the second, both doubled.
pub const PROVED_SETS: [usize; 4] = [4, 6, 7, 8];

/// Forms of set `S{index}` (1-based).
pub fn set(index: usize) -> Option<&'static [QuadForm]> {
    TABLE.get(index.checked_sub(1)?).copied()
}

/// Forms of set `S{index}`, each multiplied by 2.
pub fn scaled_set(index: usize) -> Option<Vec<QuadForm>> {
    set(index).map(|s| s.iter().map(|q| q.scale(2)).collect())
}

/// Every table form with its name, `S1a, S1b, ..., S15d`.
pub fn all_named() -> Vec<(String, QuadForm)> {
    let mut out = Vec::new();
    for (i, forms) in TABLE.iter().enumerate() {
        for (j, q) in forms.iter().enumerate() {
            out.push((format!("S{}{}", i + 1, (b'a' + j as u8) as char), *q));
        }
    }
    out
}

/// Resolve `S4a`, `S13d`, or a doubled alias `S4f` / `S4g`.
pub fn lookup(name: &str) -> Option<QuadForm> {
    let rest = name.strip_prefix('S').or_else(|| name.strip_prefix('s'))?;
    let split = rest.find(|c: char| !c.is_ascii_digit())?;
    let (num, letter) = rest.split_at(split);
    let index: usize = num.parse().ok()?;
    let forms = set(index)?;
    match letter {
        "f" if PROVED_SETS.contains(&index) => Some(forms[0].scale(2)),
        "g" if PROVED_SETS.contains(&index) => Some(forms[1].scale(2)),
        l if l.len() == 1 => {
            let j = (l.as_bytes()[0] as char).to_ascii_lowercase() as usize - 'a' as usize;
            forms.get(j).copied()
        }
        _ => None,
    }
}

/// Parse a set identifier like `S4` or `4`.
pub fn parse_set_id(id: &str) -> Option<usize> {
    let n: usize = id.trim_start_matches(['S', 's']).parse().ok()?;
    set(n).map(|_| n)
}

/// The doubled `(f, g)` pair of a proved set.
pub fn proved_pair(index: usize) -> Option<(QuadForm, QuadForm)> {
    if !PROVED_SETS.contains(&index) {
        return None;
    }
    let s = set(index)?;
    Some((s[0].scale(2), s[1].scale(2)))
}

fn classes(list: &[(i64, i64)]) -> Vec<ResidueClass> {
    list.iter().map(|&(d, a)| ResidueClass::new(d, a).expect("valid class")).collect()
}

/// Residue classes with `g ≺ f` (or an escape) that prove `Q(g) ⊆ Q(f)`.
pub fn recorded_classes_g_in_f(index: usize) -> Option<Vec<ResidueClass>> {
    match index {
        4 => Some(classes(&[(4, 0), (12, 2), (12, 6), (12, 10)])),
        6 => Some(classes(&[(4, 2), (8, 0), (24, 12), (24, 20), (48, 4), (48, 28)])),
        7 => Some(classes(&[(4, 2), (24, 0), (24, 4), (24, 8), (24, 12), (24, 16), (24, 20)])),
        8 => Some(classes(&[(4, 0), (12, 2), (12, 6), (36, 10), (36, 22), (36, 34)])),
        _ => None,
    }
}

/// Classes for the reverse direction where no subform exists.
pub fn recorded_classes_f_in_g(index: usize) -> Option<Vec<ResidueClass>> {
    match index {
        8 => recorded_classes_g_in_f(8),
        _ => None,
    }
}

/// Subform witness `T` with `T^t M_g T = M_f` for the doubled S4 pair.
pub const S4_SUBFORM: Mat3 = Mat3::new([[1, 0, 0], [0, 0, -2], [0, -1, 1]]);

/// `T_1 ∈ R(f, g, 4)` for the doubled S4 pair.
pub const S4_T1: Mat3 = Mat3::new([[4, 2, 2], [0, 4, 2], [0, 0, 2]]);

/// Scaled automorphism of the doubled S4 `g` used on the class `(12, 2)`.
pub const S4_ESCAPE: Mat3 = Mat3::new([[12, 6, 2], [0, 0, 12], [0, -12, -8]]);
