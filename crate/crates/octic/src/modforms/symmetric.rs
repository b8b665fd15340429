//! Symmetric powers of weight-2 coefficients and the Frobenius
//! characteristic polynomial of the Kummer-construction threefolds.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{ModformError, NewformCoefficients, NewformRef};
use crate::arrangement::linalg::Q;
use crate::finite_fields::Tower;

/// When the weight-3 coefficient b_p equals a_p² − 2p rather than 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LegendreRule {
    /// a_p ≠ 0, i.e. p splits in the CM field of the weight-2 form.
    CmSplit,
    /// (−(λ+1)/p) = 1.
    MinusLambdaCharacter,
}

/// b_p under the given rule. `lambda` is only read by `MinusLambdaCharacter`.
pub fn symmetric_square(a: i64, p: u64, rule: LegendreRule, lambda: &Q) -> i64 {
    let full = a * a - 2 * p as i64;
    let holds = match rule {
        LegendreRule::CmSplit => a != 0,
        LegendreRule::MinusLambdaCharacter => {
            let l1 = lambda + Q::from_integer(1.into());
            let v = -(l1.numer() * l1.denom());
            let v: i64 = v.try_into().expect("lambda fits in i64");
            Tower::new(p).map(|t| t.legendre(v) == 1).unwrap_or(false)
        }
    };
    if holds {
        full
    } else {
        0
    }
}

/// c_p = a_p³ − 3p·a_p.
pub fn symmetric_cube(a: i64, p: u64) -> i64 {
    a * a * a - 3 * p as i64 * a
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymmetricKind {
    Square { rule: LegendreRule, lambda: Q },
    Cube,
}

/// Applies a symmetric power prime by prime.
pub fn symmetric_power_coeffs(base: &NewformCoefficients, kind: &SymmetricKind) -> NewformCoefficients {
    let (weight, tag) = match kind {
        SymmetricKind::Square { .. } => (3, "sym^2"),
        SymmetricKind::Cube => (4, "sym^3"),
    };
    let values: BTreeMap<u64, i64> = base
        .values
        .iter()
        .map(|(&p, &a)| {
            let v = match kind {
                SymmetricKind::Square { rule, lambda } => symmetric_square(a, p, *rule, lambda),
                SymmetricKind::Cube => symmetric_cube(a, p),
            };
            (p, v)
        })
        .collect();
    let form = NewformRef { weight, index: None, character: None, ..base.form.clone() };
    NewformCoefficients { form, values, provenance: format!("{tag} of {} ({})", base.form, base.provenance) }
}

/// Frobenius characteristic polynomial on H³ of the Kummer threefold, with
/// coefficients listed from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KummerCharpoly {
    pub p: u64,
    pub full: [i128; 7],
    /// T² − p·t_μ·T + p³, the H² part of P¹ × E_μ.
    pub quadratic: [i128; 3],
    pub quartic: [i128; 5],
}

impl KummerCharpoly {
    /// Sum of the roots.
    pub fn trace(&self) -> i128 {
        -self.full[5]
    }
}

fn check_hasse(t: i64, p: u64) -> Result<(), ModformError> {
    if (t as i128) * (t as i128) > 4 * p as i128 {
        return Err(ModformError::HasseBound { t, p });
    }
    Ok(())
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Expands (T − pβ)(T − pβ̄)·∏_{A ∈ {α², ᾱ²}} (T − Aβ)(T − Aβ̄) with
/// α + ᾱ = t_λ, β + β̄ = t_μ and αᾱ = ββ̄ = p.
pub fn kummer_charpoly(t_lambda: i64, t_mu: i64, p: u64) -> Result<KummerCharpoly, ModformError> {
    check_hasse(t_lambda, p)?;
    check_hasse(t_mu, p)?;
    let (p, t) = (p as i128, t_mu as i128);
    let s = (t_lambda as i128).pow(2) - 2 * p;
    let quadratic = [p.pow(3), -p * t, 1];
    let quartic = [p.pow(6), -t * p.pow(3) * s, p * (s * s - 2 * p * p) + t * t * p * p, -t * s, 1];
    let full: [i128; 7] = poly_mul(&quadratic, &quartic).try_into().expect("degree 6");
    Ok(KummerCharpoly { p: p as u64, full, quadratic, quartic })
}

/// Same polynomial from power sums of its roots and Newton's identities.
pub fn kummer_charpoly_newton(t_lambda: i64, t_mu: i64, p: u64) -> Result<[i128; 7], ModformError> {
    check_hasse(t_lambda, p)?;
    check_hasse(t_mu, p)?;
    let (pp, t) = (p as i128, t_mu as i128);
    let s = (t_lambda as i128).pow(2) - 2 * pp;
    // u_k = β^k + β̄^k, v_k = A^k + Ā^k with A = α².
    let mut u = vec![2i128, t];
    let mut v = vec![2i128, s];
    for k in 2..=6 {
        u.push(t * u[k - 1] - pp * u[k - 2]);
        v.push(s * v[k - 1] - pp * pp * v[k - 2]);
    }
    let power_sum: Vec<i128> = (0..=6).map(|k| pp.pow(k as u32) * u[k] + v[k] * u[k]).collect();
    // e_k from Newton: k·e_k = Σ_{i=1}^{k} (−1)^{i−1} e_{k−i} P_i.
    let mut e = vec![1i128];
    for k in 1..=6 {
        let mut acc = 0i128;
        for i in 1..=k {
            let term = e[k - i] * power_sum[i];
            acc += if i % 2 == 1 { term } else { -term };
        }
        e.push(acc / k as i128);
    }
    let mut out = [0i128; 7];
    for (k, ek) in e.iter().enumerate() {
        out[6 - k] = if k % 2 == 0 { *ek } else { -ek };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::linalg::q;

    #[test]
    fn symmetric_powers() {
        assert_eq!(symmetric_square(-2, 5, LegendreRule::CmSplit, &q(8)), -6);
        assert_eq!(symmetric_square(-2, 5, LegendreRule::MinusLambdaCharacter, &q(8)), -6);
        assert_eq!(symmetric_square(0, 7, LegendreRule::CmSplit, &q(8)), 0);
        assert_eq!(symmetric_cube(-2, 5), 22);
    }

    #[test]
    fn charpoly_at_cm_prime() {
        // t_λ = 0: α² = ᾱ² = −p.
        let c = kummer_charpoly(0, 2, 7).unwrap();
        let (p, t) = (7i128, 2i128);
        let other = [p.pow(3), p * t, 1];
        let expect = poly_mul(&poly_mul(&c.quadratic, &other), &other);
        assert_eq!(c.full.to_vec(), expect);
        assert_eq!(c.trace(), p * t + (0 - 2 * p) * t);
    }

    #[test]
    fn charpoly_matches_newton() {
        for (tl, tm, p) in [(2, 4, 5), (-6, 0, 13), (4, -4, 17), (0, 0, 7)] {
            assert_eq!(kummer_charpoly(tl, tm, p).unwrap().full, kummer_charpoly_newton(tl, tm, p).unwrap());
        }
        assert!(kummer_charpoly(5, 0, 5).is_err());
        assert_eq!(kummer_charpoly(2, 0, 5).unwrap().trace(), 0);
    }
}
