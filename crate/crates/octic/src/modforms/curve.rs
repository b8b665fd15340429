//! Elliptic curves over Q and their traces of Frobenius by point counting.

use std::fmt;

use serde::Serialize;

use super::ModformError;
use crate::arrangement::linalg::{q_mod, Q};
use crate::finite_fields::{is_prime, Tower};

/// Weierstrass model y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EllipticCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

impl EllipticCurve {
    pub fn new(a: [i64; 5]) -> Self {
        EllipticCurve { a1: a[0], a2: a[1], a3: a[2], a4: a[3], a6: a[4] }
    }

    fn b_invariants(&self) -> (i128, i128, i128, i128) {
        let (a1, a2, a3, a4, a6) =
            (self.a1 as i128, self.a2 as i128, self.a3 as i128, self.a4 as i128, self.a6 as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> i128 {
        let (b2, b4, b6, b8) = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{},{}]", self.a1, self.a2, self.a3, self.a4, self.a6)
    }
}

/// a_p = p + 1 − #E(F_p) for a prime p ≥ 5 of good reduction.
///
/// Completing the square, (2y + a1·x + a3)² = 4x³ + b2·x² + 2b4·x + b6, so
/// #E(F_p) = 1 + Σ_x (1 + χ(4x³ + b2·x² + 2b4·x + b6)).
pub fn ec_ap(curve: &EllipticCurve, p: u64) -> Result<i64, ModformError> {
    let bad = || ModformError::BadPrime { p, what: format!("curve {curve}") };
    if p < 5 || !is_prime(p) {
        return Err(bad());
    }
    if curve.discriminant().rem_euclid(p as i128) == 0 {
        return Err(bad());
    }
    let tw = Tower::new(p).map_err(|_| bad())?;
    let (b2, b4, b6, _) = curve.b_invariants();
    let c = [tw.reduce_i128(b6), tw.reduce_i128(2 * b4), tw.reduce_i128(b2), 4 % p];
    let mut s = 0i64;
    for x in 0..p {
        let v = ((c[3] * x + c[2]) % p * x % p + c[1]) % p * x % p + c[0];
        s += tw.chi(v % p) as i64;
    }
    Ok(-s)
}

/// a_p of E_μ: u² = (x − t)(x² − μt²)t, i.e. −Σ_x χ((x − 1)(x² − μ)).
pub fn legendre_family_ap(mu: &Q, p: u64) -> Result<i64, ModformError> {
    let bad = || ModformError::BadPrime { p, what: format!("E_mu with mu = {mu}") };
    if p < 5 || !is_prime(p) {
        return Err(bad());
    }
    let m = q_mod(mu, p).ok_or_else(bad)?;
    if m == 0 || m == 1 {
        return Err(bad());
    }
    let tw = Tower::new(p).map_err(|_| bad())?;
    let s: i64 = (0..p)
        .map(|x| {
            let v = (x + p - 1) % p * ((x * x % p + p - m) % p) % p;
            tw.chi(v) as i64
        })
        .sum();
    Ok(-s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::linalg::qr;

    #[test]
    fn conductor_32_curve() {
        let e = EllipticCurve::new([0, 0, 0, -1, 0]);
        assert_eq!(ec_ap(&e, 5).unwrap(), -2);
        assert_eq!(ec_ap(&e, 7).unwrap(), 0);
        assert!(matches!(ec_ap(&e, 2), Err(ModformError::BadPrime { p: 2, .. })));
        assert_eq!(e.discriminant(), 64);
    }

    #[test]
    fn general_weierstrass_model() {
        // 49a1: y² + xy = x³ − x² − 2x − 1, CM by Q(√−7).
        let e = EllipticCurve::new([1, -1, 0, -2, -1]);
        assert!(ec_ap(&e, 7).is_err());
        assert_eq!(ec_ap(&e, 11).unwrap(), 4);
        assert_eq!(ec_ap(&e, 5).unwrap(), 0);
    }

    #[test]
    fn legendre_family() {
        let mu = qr(1, 9);
        assert_eq!(legendre_family_ap(&mu, 5).unwrap().abs(), 2);
        assert!(legendre_family_ap(&mu, 3).is_err());
        assert!(legendre_family_ap(&qr(10, 1), 3).is_err());
    }
}
