//! Multiple lines and points of an arrangement, over Q or modulo a prime.

use serde::Serialize;

use super::linalg::{kernel3, normalize_i128, rank};
use super::PlaneArrangement;
use crate::finite_fields::is_prime;

/// A point where at least three planes meet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplePoint {
    pub planes: Vec<usize>,
    /// Primitive integer coordinates.
    pub point: [i64; 4],
    /// Number of triple lines of the arrangement through the point.
    pub triple_lines: usize,
}

impl MultiplePoint {
    pub fn multiplicity(&self) -> usize {
        self.planes.len()
    }

    pub fn off_triple_line(&self) -> bool {
        self.triple_lines == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SingularityInventory {
    pub double_lines: Vec<[usize; 2]>,
    pub triple_lines: Vec<[usize; 3]>,
    /// Lines on four or more planes (never present in admissible arrangements).
    pub higher_lines: Vec<Vec<usize>>,
    pub triple_points: Vec<MultiplePoint>,
    pub fourfold_points: Vec<MultiplePoint>,
    pub fivefold_points: Vec<MultiplePoint>,
    /// Points on six or more planes.
    pub higher_points: Vec<MultiplePoint>,
}

/// Cardinalities used to compare an inventory with its reduction mod p.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InventoryCounts {
    pub double_lines: usize,
    pub triple_lines: usize,
    pub higher_lines: usize,
    pub triple_points: usize,
    pub fourfold_off_triple_line: usize,
    pub fourfold_on_triple_line: usize,
    pub fivefold_points: usize,
    pub higher_points: usize,
}

impl SingularityInventory {
    pub fn counts(&self) -> InventoryCounts {
        InventoryCounts {
            double_lines: self.double_lines.len(),
            triple_lines: self.triple_lines.len(),
            higher_lines: self.higher_lines.len(),
            triple_points: self.triple_points.len(),
            fourfold_off_triple_line: self.fourfold_points.iter().filter(|p| p.off_triple_line()).count(),
            fourfold_on_triple_line: self.fourfold_points.iter().filter(|p| !p.off_triple_line()).count(),
            fivefold_points: self.fivefold_points.len(),
            higher_points: self.higher_points.len(),
        }
    }
}

pub fn singularity_inventory(arr: &PlaneArrangement) -> SingularityInventory {
    inventory_of(&arr.form_matrix(), None)
}

/// Incidence structure with exact zero tests over Q (`None`) or F_p.
fn inventory_of(forms: &[[i64; 4]], modulus: Option<u64>) -> SingularityInventory {
    let n = forms.len();
    let is_zero = |v: i128| match modulus {
        None => v == 0,
        Some(p) => v.rem_euclid(p as i128) == 0,
    };
    let mut lines: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let set: Vec<usize> = (0..n)
                .filter(|&k| k == i || k == j || kernel3(&forms[i], &forms[j], &forms[k]).iter().all(|&c| is_zero(c)))
                .collect();
            if !lines.contains(&set) {
                lines.push(set);
            }
        }
    }
    let mut points: Vec<(Vec<usize>, [i64; 4])> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = kernel3(&forms[i], &forms[j], &forms[k]);
                if v.iter().all(|&c| is_zero(c)) {
                    continue;
                }
                let (pt, _) = normalize_i128(v);
                let set: Vec<usize> = (0..n)
                    .filter(|&l| {
                        let s: i128 = forms[l].iter().zip(v.iter()).map(|(&a, &b)| a as i128 * b).sum();
                        is_zero(s)
                    })
                    .collect();
                if !points.iter().any(|(s, _)| *s == set) {
                    points.push((set, pt));
                }
            }
        }
    }
    let mut inv = SingularityInventory::default();
    for l in &lines {
        match l.len() {
            2 => inv.double_lines.push([l[0], l[1]]),
            3 => inv.triple_lines.push([l[0], l[1], l[2]]),
            _ => inv.higher_lines.push(l.clone()),
        }
    }
    for (set, pt) in points {
        let triple_lines = inv.triple_lines.iter().filter(|t| t.iter().all(|i| set.contains(i))).count();
        let mp = MultiplePoint { planes: set, point: pt, triple_lines };
        match mp.planes.len() {
            3 => inv.triple_points.push(mp),
            4 => inv.fourfold_points.push(mp),
            5 => inv.fivefold_points.push(mp),
            _ => inv.higher_points.push(mp),
        }
    }
    inv
}

/// No point on six or more planes and no line on four or more planes.
pub fn cy_admissible(inv: &SingularityInventory) -> bool {
    inv.higher_lines.is_empty() && inv.higher_points.is_empty()
}

/// Primes 5 ≤ p ≤ pmax where the reduction keeps the forms pairwise
/// non-proportional, the leading scalar a unit, and the inventory cardinalities.
pub fn good_primes(arr: &PlaneArrangement, pmax: u64) -> Vec<u64> {
    let forms = arr.form_matrix();
    let reference = inventory_of(&forms, None).counts();
    (5..=pmax)
        .filter(|&p| is_prime(p))
        .filter(|&p| super::linalg::q_mod(&arr.scalar, p).is_some_and(|s| s != 0))
        .filter(|&p| {
            let proportional = (0..forms.len()).any(|i| (0..i).any(|j| rank(&[forms[i], forms[j]], Some(p)) < 2));
            !proportional && inventory_of(&forms, Some(p)).counts() == reference
        })
        .collect()
}

/// Euler number of the branch divisor (union of the eight planes), by
/// inclusion–exclusion over intersections of plane subsets.
pub fn branch_euler_number(arr: &PlaneArrangement) -> i64 {
    let forms = arr.form_matrix();
    let n = forms.len();
    let mut total = 0i64;
    for mask in 1u32..(1 << n) {
        let rows: Vec<[i64; 4]> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| forms[i]).collect();
        let dim = 3 - rank(&rows, None) as i64;
        let e = if dim >= 0 { dim + 1 } else { 0 };
        let sign = if rows.len() % 2 == 1 { 1 } else { -1 };
        total += sign * e;
    }
    total
}

/// Checks that every listed point lies on its planes.
#[cfg(test)]
fn incidences_hold(arr: &PlaneArrangement, inv: &SingularityInventory) -> bool {
    let all =
        inv.triple_points.iter().chain(&inv.fourfold_points).chain(&inv.fivefold_points).chain(&inv.higher_points);
    let forms = arr.form_matrix();
    all.into_iter().all(|mp| mp.planes.iter().all(|&i| super::linalg::dot(&forms[i], &mp.point) == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{catalog, lookup, PlaneArrangement};

    #[test]
    fn catalog_incidences_hold() {
        for arr in catalog() {
            assert!(incidences_hold(arr, &singularity_inventory(arr)), "{}", arr.id);
        }
    }

    fn generic() -> PlaneArrangement {
        PlaneArrangement::from_int_forms(
            "generic",
            &[
                [1, 0, 0, 0],
                [0, 1, 0, 0],
                [0, 0, 1, 0],
                [0, 0, 0, 1],
                [1, 1, 1, 1],
                [1, 2, 3, 5],
                [1, 4, 9, 25],
                [1, 8, 27, 125],
            ],
            1,
        )
        .unwrap()
    }

    #[test]
    fn generic_planes() {
        let inv = singularity_inventory(&generic());
        assert_eq!(inv.double_lines.len(), 28);
        assert!(inv.triple_lines.is_empty());
        assert!(inv.fourfold_points.is_empty() && inv.fivefold_points.is_empty());
        assert_eq!(inv.triple_points.len(), 56);
        assert!(cy_admissible(&inv));
    }

    #[test]
    fn arrangement_53_fourfold_points() {
        let arr = lookup("53").unwrap();
        let inv = singularity_inventory(&arr);
        let pts: Vec<[i64; 4]> = inv.fourfold_points.iter().map(|p| p.point).collect();
        assert!(pts.contains(&[0, 0, 0, 1]));
        assert!(pts.contains(&[1, 0, 0, 0]));
        assert!(incidences_hold(&arr, &inv));
        assert_eq!(good_primes(&arr, 97).len(), 23);
    }

    #[test]
    fn non_admissible() {
        let six_through_origin = PlaneArrangement::from_int_forms(
            "bad",
            &[
                [1, 0, 0, 0],
                [0, 1, 0, 0],
                [0, 0, 1, 0],
                [1, 1, 0, 0],
                [1, 0, 1, 0],
                [0, 1, 1, 0],
                [0, 0, 0, 1],
                [1, 2, 3, 5],
            ],
            1,
        )
        .unwrap();
        assert!(!cy_admissible(&singularity_inventory(&six_through_origin)));
        let four_on_a_line = PlaneArrangement::from_int_forms(
            "bad",
            &[
                [1, 0, 0, 0],
                [0, 1, 0, 0],
                [1, 1, 0, 0],
                [1, 2, 0, 0],
                [0, 0, 1, 0],
                [0, 0, 0, 1],
                [1, 1, 1, 1],
                [1, 2, 3, 5],
            ],
            1,
        )
        .unwrap();
        assert!(!cy_admissible(&singularity_inventory(&four_on_a_line)));
    }

    #[test]
    fn good_primes_edge_cases() {
        let arr = lookup("275").unwrap();
        assert!(good_primes(&arr, 4).is_empty());
        assert!(!good_primes(&arr, 97).contains(&2));
    }

    #[test]
    fn euler_number_of_generic_branch_locus() {
        // 8 planes: 8·3 − 28·2 + 56·1 = 24.
        assert_eq!(branch_euler_number(&generic()), 24);
    }
}
