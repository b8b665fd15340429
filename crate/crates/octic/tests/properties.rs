use octic::arrangement::linalg::qr;
use octic::arrangement::{cross_ratio, lookup};
use octic::counting::{count_cover_affine_charts, count_projective_cover, projective_size, OcticForm};
use octic::fibration::{base_change_configuration, parse_configuration, BaseParam, RationalMap};
use octic::finite_fields::{Fp2, Tower};
use octic::modforms::{kummer_charpoly, kummer_charpoly_newton, NewformRef};
use proptest::prelude::*;

const PRIMES: [u64; 10] = [5, 7, 11, 13, 17, 19, 23, 29, 31, 97];

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(PRIMES.to_vec())
}

fn element_pair() -> impl Strategy<Value = (u64, u64, u64, u64, u64)> {
    prime().prop_flat_map(|p| (Just(p), 0..p, 0..p, 0..p, 0..p))
}

fn hasse_pair() -> impl Strategy<Value = (u64, i64, i64)> {
    prime().prop_flat_map(|p| {
        let b = (2.0 * (p as f64).sqrt()).floor() as i64;
        (Just(p), -b..=b, -b..=b)
    })
}

proptest! {
    #[test]
    fn prime_field_inverse_and_character((p, x, y, _, _) in element_pair()) {
        let t = Tower::new(p).unwrap();
        prop_assert_eq!(t.chi(t.mul(x, y)), t.chi(x) * t.chi(y));
        prop_assert_eq!(t.chi(x), t.chi_euler(x));
        if x != 0 {
            prop_assert_eq!(t.mul(x, t.inv(x)), 1);
        }
        if let Some(r) = t.sqrt(x) {
            prop_assert_eq!(t.mul(r, r), x);
        } else {
            prop_assert_eq!(t.chi(x), -1);
        }
    }

    #[test]
    fn quadratic_extension_frobenius_and_norm((p, a, b, c, d) in element_pair()) {
        let t = Tower::new(p).unwrap();
        let (u, v) = (Fp2::new(a, b), Fp2::new(c, d));
        prop_assert_eq!(t.frob2(t.mul2(u, v)), t.mul2(t.frob2(u), t.frob2(v)));
        prop_assert_eq!(t.frob2(u), t.pow2(u, p));
        prop_assert_eq!(t.norm2(t.mul2(u, v)), t.mul(t.norm2(u), t.norm2(v)));
        prop_assert_eq!(t.chi2(t.mul2(u, v)), t.chi2(u) * t.chi2(v));
        prop_assert_eq!(t.chi2(u), t.chi2_euler(u));
        if !u.is_zero() {
            prop_assert_eq!(t.mul2(u, t.inv2(u)), t.embed2(1));
        }
        if let Some(r) = t.sqrt2(u) {
            prop_assert_eq!(t.mul2(r, r), u);
        }
    }

    #[test]
    fn charpoly_factors_and_matches_power_sums((p, tl, tm) in hasse_pair()) {
        let cp = kummer_charpoly(tl, tm, p).unwrap();
        let mut prod = [0i128; 7];
        for (i, a) in cp.quadratic.iter().enumerate() {
            for (j, b) in cp.quartic.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        prop_assert_eq!(prod, cp.full);
        prop_assert_eq!(kummer_charpoly_newton(tl, tm, p).unwrap(), cp.full);
        prop_assert_eq!(cp.full[6], 1);
        prop_assert_eq!(cp.full[0], (p as i128).pow(9));
    }

    #[test]
    fn cover_count_charts_agree(
        p in prop::sample::select(vec![5u64, 7]),
        forms in prop::collection::vec(prop::array::uniform4(-3i64..=3), 8),
        scalar in prop::sample::select(vec![1i64, -1, 2, 3]),
    ) {
        prop_assume!(forms.iter().all(|f| f.iter().any(|&c| c.rem_euclid(p as i64) != 0)));
        let f = OcticForm::new(p, scalar, &forms).unwrap();
        let a = count_projective_cover(&f).unwrap();
        prop_assert_eq!(&a, &count_cover_affine_charts(&f).unwrap());
        prop_assert!(a.n_branch <= projective_size(p));
        prop_assert!(a.n_total <= 2 * projective_size(p));
    }

    #[test]
    fn cross_ratio_is_mobius_invariant(
        pts in prop::collection::btree_set(-20i64..=20, 4),
        (a, b, c, d) in (1i64..=5, -5i64..=5, -5i64..=5, 1i64..=5),
    ) {
        prop_assume!(a * d - b * c != 0);
        let v: Vec<i64> = pts.into_iter().collect();
        let qs = [BaseParam::int(v[0]), BaseParam::int(v[1]), BaseParam::int(v[2]), BaseParam::int(v[3])];
        let m = RationalMap::new(vec![qr(b, 1), qr(a, 1)], vec![qr(d, 1), qr(c, 1)]);
        let moved = [m.apply(&qs[0]), m.apply(&qs[1]), m.apply(&qs[2]), m.apply(&qs[3])];
        prop_assert_eq!(cross_ratio(&qs).unwrap(), cross_ratio(&moved).unwrap());
    }

    #[test]
    fn degree_one_base_change_preserves_euler_sum(k in 1i64..=6) {
        let cfg = parse_configuration("-1:I2 0:I4 1:I2 inf:I4").unwrap();
        let m = RationalMap::new(vec![qr(-k, 1), qr(1, 1)], vec![qr(k, 1), qr(1, 1)]);
        let pulled = base_change_configuration(&cfg, &m).unwrap();
        prop_assert_eq!(pulled.euler_sum(), cfg.euler_sum());
        prop_assert_eq!(base_change_configuration(&cfg, &RationalMap::identity()).unwrap(), cfg);
    }

    #[test]
    fn newform_labels_round_trip(level in 1u32..500, weight in prop::sample::select(vec![2u32, 4]), letter in "[A-D]") {
        let s = format!("{level}{}{letter}1", if weight == 2 { String::new() } else { format!("k{weight}") });
        let f = NewformRef::parse(&s).unwrap();
        prop_assert_eq!(f.to_string(), s);
    }
}

#[test]
fn catalog_cover_counts_agree_on_charts() {
    for id in ["4a", "267a", "287"] {
        let f = OcticForm::from_arrangement(&lookup(id).unwrap(), 7).unwrap();
        assert_eq!(count_projective_cover(&f).unwrap(), count_cover_affine_charts(&f).unwrap());
    }
}
