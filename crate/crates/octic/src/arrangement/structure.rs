//! Cross-ratios, involution checks, ruled-surface planes and Kummer splits.

use num_traits::{One, Zero};
use serde::Serialize;

use super::linalg::{dot, kernel3, normalize_i128, q, rank, Q};
use super::{ArrangementError, InvolutionMatrix, LinearForm, PlaneArrangement};
use crate::fibration::{classify_quartic_fibration, BaseParam, FiberTable, FibrationError, QuarticFibration};

/// Cross-ratio (q1−q3)(q2−q4) / ((q1−q4)(q2−q3)) of four distinct points of P¹(Q).
pub fn cross_ratio(qs: &[BaseParam; 4]) -> Result<Q, ArrangementError> {
    let h: Vec<(Q, Q)> = qs.iter().map(BaseParam::hom).collect();
    let det = |i: usize, j: usize| &h[i].0 * &h[j].1 - &h[j].0 * &h[i].1;
    for i in 0..4 {
        for j in 0..i {
            if det(i, j).is_zero() {
                return Err(ArrangementError::RepeatedValue);
            }
        }
    }
    Ok(det(0, 2) * det(1, 3) / (det(0, 3) * det(1, 2)))
}

/// Splits four distinct points into two pairs separating each other
/// harmonically (cross-ratio −1), if such a split exists.
pub fn harmonic_pairing(qs: &[BaseParam; 4]) -> Result<Option<[[BaseParam; 2]; 2]>, ArrangementError> {
    for (a, b, c, d) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
        let r = cross_ratio(&[qs[a].clone(), qs[b].clone(), qs[c].clone(), qs[d].clone()])?;
        if r == -Q::one() {
            return Ok(Some([[qs[a].clone(), qs[b].clone()], [qs[c].clone(), qs[d].clone()]]));
        }
    }
    Ok(None)
}

/// An affine function y·Y + z·Z + c of two variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub y: Q,
    pub z: Q,
    pub c: Q,
}

impl AffineForm {
    pub fn new(y: Q, z: Q, c: Q) -> Self {
        AffineForm { y, z, c }
    }

    pub fn eval(&self, y: &Q, z: &Q) -> Q {
        &self.y * y + &self.z * z + &self.c
    }
}

/// Whether two quadruples of affine functions have identical cross-ratios
/// as rational functions of (Y, Z).
///
/// The cross-multiplied difference has degree at most 4 in each variable, so
/// vanishing on the grid {0..4}² proves it is identically zero. The
/// denominators are required to be nonzero somewhere on the grid.
pub fn cross_ratio_identity(a: &[AffineForm; 4], b: &[AffineForm; 4]) -> bool {
    let mut denominators_live = false;
    for y in 0..5 {
        for z in 0..5 {
            let (y, z) = (q(y), q(z));
            let va: Vec<Q> = a.iter().map(|f| f.eval(&y, &z)).collect();
            let vb: Vec<Q> = b.iter().map(|f| f.eval(&y, &z)).collect();
            let num = |v: &[Q]| (&v[0] - &v[2]) * (&v[1] - &v[3]);
            let den = |v: &[Q]| (&v[0] - &v[3]) * (&v[1] - &v[2]);
            let (na, da, nb, db) = (num(&va), den(&va), num(&vb), den(&vb));
            if !da.is_zero() && !db.is_zero() {
                denominators_live = true;
            }
            if na * db != nb * da {
                return false;
            }
        }
    }
    denominators_live
}

/// Orderings σ of `a` with cross_ratio(a∘σ) ≡ cross_ratio(b).
pub fn cross_ratio_orderings(a: &[AffineForm; 4], b: &[AffineForm; 4]) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let s = [i, j, k, l];
                    if (0..4).all(|x| s.contains(&x)) {
                        let perm = s.map(|x| a[x].clone());
                        if cross_ratio_identity(&perm, b) {
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Result of checking that a matrix is an involution preserving the arrangement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionCheck {
    /// c with f(Mx) = c·f(x) for the product f of the normalized forms.
    #[serde(serialize_with = "ser_q")]
    pub c: Q,
    /// c′ with M² = c′·Id.
    #[serde(serialize_with = "ser_q")]
    pub square_scalar: Q,
    /// Form i composed with M is proportional to form `permutation[i]`.
    pub permutation: Vec<usize>,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn check_involution(arr: &PlaneArrangement, m: &InvolutionMatrix) -> Result<InvolutionCheck, ArrangementError> {
    if det_q(m.entries()).is_zero() {
        return Err(ArrangementError::Singular);
    }
    let square_scalar = m.square_scalar().ok_or(ArrangementError::NotInvolution)?;
    let mut c = Q::one();
    let mut permutation = Vec::with_capacity(arr.forms.len());
    for (i, f) in arr.forms.iter().enumerate() {
        let (g, k) = LinearForm::from_rational(&f.compose(m.entries()))?;
        let j = arr.forms.iter().position(|h| *h == g).ok_or(ArrangementError::NotPreserving(i))?;
        c *= k;
        permutation.push(j);
    }
    Ok(InvolutionCheck { c, square_scalar, permutation })
}

fn det_q(m: &[[Q; 4]; 4]) -> Q {
    let mut a: Vec<Vec<Q>> = m.iter().map(|r| r.to_vec()).collect();
    let mut det = Q::one();
    for col in 0..4 {
        let Some(piv) = (col..4).find(|&i| !a[i][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        for i in col + 1..4 {
            let f = &a[i][col] / &a[col][col];
            for j in col..4 {
                let t = &f * &a[col][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Planes S containing two intersecting double lines such that the other four
/// planes meet S in a single common point.
pub fn find_ruled_planes(arr: &PlaneArrangement) -> Vec<LinearForm> {
    let forms = arr.form_matrix();
    let inv = super::singularity_inventory(arr);
    let mut out: Vec<LinearForm> = Vec::new();
    for (n, l1) in inv.double_lines.iter().enumerate() {
        for l2 in &inv.double_lines[n + 1..] {
            if l1.iter().any(|i| l2.contains(i)) {
                continue;
            }
            let quad = [forms[l1[0]], forms[l1[1]], forms[l2[0]], forms[l2[1]]];
            if rank(&quad, None) != 3 {
                continue;
            }
            let (fa, fb) = (&forms[l1[0]], &forms[l1[1]]);
            let w = (0..4).find_map(|k| {
                let mut e = [0i64; 4];
                e[k] = 1;
                let (v, _) = normalize_i128(kernel3(&forms[l2[0]], &forms[l2[1]], &e));
                (v != [0; 4] && (dot(fa, &v) != 0 || dot(fb, &v) != 0)).then_some(v)
            });
            let Some(w) = w else { continue };
            let (wa, wb) = (dot(fa, &w), dot(fb, &w));
            let s: [i128; 4] = std::array::from_fn(|j| wa * fb[j] as i128 - wb * fa[j] as i128);
            let (s, _) = normalize_i128(s);
            let rest: Vec<[i64; 4]> =
                (0..forms.len()).filter(|i| !l1.contains(i) && !l2.contains(i)).map(|i| forms[i]).collect();
            let mut rows = rest.clone();
            rows.push(s);
            if forms.contains(&s) || rest.len() != 4 || rank(&rows, None) != 3 {
                continue;
            }
            let form = LinearForm(s);
            if !out.contains(&form) {
                out.push(form);
            }
        }
    }
    out.sort();
    out
}

/// A partition of the eight planes into two quadruples with common points,
/// and the induced pair of double quartic fibrations over a common pencil.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KummerSplit {
    /// The quadruple containing plane 0.
    pub first: [usize; 4],
    pub second: [usize; 4],
    pub first_point: [i64; 4],
    pub second_point: [i64; 4],
    /// Columns are the new coordinate vectors: old = T·new. The second point
    /// becomes (1:0:0:0) and the first point (0:0:0:1).
    pub transform: [[i64; 4]; 4],
    /// Fibration of the first quadruple in P²(x,y,z) through (1:0:0) and of
    /// the second in P²(y,z,t) through (0:0:1); both use t = y/z.
    pub fibrations: [QuarticFibration; 2],
}

impl KummerSplit {
    /// Fiber table of both fibrations over the common base.
    pub fn table(&self) -> Result<FiberTable, FibrationError> {
        let a = classify_quartic_fibration(&self.fibrations[0])?;
        let b = classify_quartic_fibration(&self.fibrations[1])?;
        Ok(FiberTable::from_pair(&a, &b))
    }
}

fn common_point(rows: &[[i64; 4]]) -> Option<[i64; 4]> {
    if rank(rows, None) != 3 {
        return None;
    }
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            for k in j + 1..rows.len() {
                let v = kernel3(&rows[i], &rows[j], &rows[k]);
                if v != [0; 4] {
                    return Some(normalize_i128(v).0);
                }
            }
        }
    }
    None
}

/// All splits into two quadruples of planes, each through a common point.
pub fn find_kummer_splits(arr: &PlaneArrangement) -> Vec<KummerSplit> {
    let forms = arr.form_matrix();
    let n = forms.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() != 4 || mask & 1 == 0 {
            continue;
        }
        let a: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let b: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let rows = |s: &[usize]| -> Vec<[i64; 4]> { s.iter().map(|&i| forms[i]).collect() };
        let (Some(pa), Some(pb)) = (common_point(&rows(&a)), common_point(&rows(&b))) else {
            continue;
        };
        let mut cols = vec![pb, pa];
        for k in 0..4 {
            let mut e = [0i64; 4];
            e[k] = 1;
            let mut trial = cols.clone();
            trial.push(e);
            if rank(&trial, None) > cols.len() {
                cols = trial;
            }
            if cols.len() == 4 {
                break;
            }
        }
        if cols.len() < 4 {
            continue;
        }
        let basis = [cols[0], cols[2], cols[3], cols[1]];
        let transform: [[i64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| basis[j][i]));
        let image = |f: &[i64; 4]| -> [i128; 4] { basis.map(|v| dot(f, &v)) };
        let lines_a: [[i64; 3]; 4] = std::array::from_fn(|k| {
            let v = image(&forms[a[k]]);
            normalize_i128([v[0], v[1], v[2]]).0
        });
        let lines_b: [[i64; 3]; 4] = std::array::from_fn(|k| {
            let v = image(&forms[b[k]]);
            normalize_i128([v[1], v[2], v[3]]).0
        });
        let fa = QuarticFibration::with_pencil(lines_a, [1, 0, 0], [[0, 1, 0], [0, 0, 1]]);
        let fb = QuarticFibration::with_pencil(lines_b, [0, 0, 1], [[1, 0, 0], [0, 1, 0]]);
        let (Ok(fa), Ok(fb)) = (fa, fb) else { continue };
        out.push(KummerSplit {
            first: [a[0], a[1], a[2], a[3]],
            second: [b[0], b[1], b[2], b[3]],
            first_point: pa,
            second_point: pb,
            transform,
            fibrations: [fa, fb],
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::linalg::qr;
    use crate::arrangement::lookup;

    fn bp(n: i64) -> BaseParam {
        BaseParam::int(n)
    }

    #[test]
    fn cross_ratio_values() {
        assert_eq!(cross_ratio(&[bp(-1), bp(1), bp(0), BaseParam::Infinity]).unwrap(), q(-1));
        assert_eq!(cross_ratio(&[bp(-1), bp(0), bp(1), BaseParam::Infinity]).unwrap(), q(2));
        assert_eq!(cross_ratio(&[bp(0), bp(1), bp(2), bp(2)]), Err(ArrangementError::RepeatedValue));
        let pairs = harmonic_pairing(&[bp(-1), bp(0), bp(1), BaseParam::Infinity]).unwrap().unwrap();
        assert_eq!(pairs[0], [bp(-1), bp(1)]);
        assert_eq!(pairs[1], [bp(0), BaseParam::Infinity]);
        assert!(harmonic_pairing(&[bp(0), bp(1), bp(2), bp(5)]).unwrap().is_none());
    }

    fn aff(y: Q, z: Q) -> AffineForm {
        AffineForm::new(y, z, q(0))
    }

    #[test]
    fn birationality_quadruples() {
        let left = [aff(q(0), q(0)), aff(q(1), q(-1)), aff(q(1), qr(-1, 2)), aff(qr(1, 2), q(-1))];
        let right = [aff(q(0), q(0)), aff(qr(1, 2), q(0)), aff(q(0), qr(1, 2)), aff(qr(1, 3), qr(1, 3))];
        let ords = cross_ratio_orderings(&left, &right);
        assert!(ords.contains(&[0, 2, 3, 1]));
        assert!(!cross_ratio_identity(&left, &right));
    }

    #[test]
    fn involutions_of_catalog() {
        let arr = lookup("53").unwrap();
        let chk = check_involution(&arr, &arr.involutions[0]).unwrap();
        assert_eq!(chk.square_scalar, q(1));
        for i in 0..8 {
            assert_eq!(chk.permutation[chk.permutation[i]], i);
        }
        let id = check_involution(&arr, &InvolutionMatrix::identity()).unwrap();
        assert_eq!(id.c, q(1));
        assert_eq!(id.permutation, (0..8).collect::<Vec<_>>());
        let arr267 = lookup("267a").unwrap();
        let m = InvolutionMatrix::from_ints([[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]]);
        assert!(check_involution(&arr267, &m).is_ok());
        let swap_xz = InvolutionMatrix::from_ints([[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]]);
        assert!(matches!(check_involution(&arr, &swap_xz), Err(ArrangementError::NotPreserving(_))));
        let zero = InvolutionMatrix::from_ints([[0; 4]; 4]);
        assert_eq!(check_involution(&arr, &zero), Err(ArrangementError::Singular));
    }

    #[test]
    fn ruled_planes() {
        let has = |id: &str, s: [i64; 4]| find_ruled_planes(&lookup(id).unwrap()).contains(&LinearForm(s));
        assert!(has("4a", [1, 0, -1, 0]));
        assert!(has("244", [1, 1, 1, -1]));
        assert!(has("269", [1, 2, -1, 0]));
        assert!(has("269", [0, 1, -2, 1]));
    }

    #[test]
    fn kummer_splits() {
        assert!(find_kummer_splits(&lookup("13a").unwrap()).len() >= 2);
        assert!(find_kummer_splits(&lookup("154").unwrap()).is_empty());
        for s in find_kummer_splits(&lookup("53").unwrap()) {
            let t = s.table().unwrap();
            assert_eq!(t.row(false).euler_sum(), 12);
            assert_eq!(t.row(true).euler_sum(), 12);
        }
    }
}
