//! Arithmetic in the tower F_p ⊂ F_{p²} ⊂ F_{p⁴}.
//!
//! F_{p²} = F_p(α) with α² = d, where d is the smallest quadratic non-residue
//! mod p. F_{p⁴} = F_{p²}(γ) with γ² = e, where e is the first non-square of
//! F_{p²} when elements `a + bα` are scanned in lexicographic order of `(a, b)`.
//!
//! Elements are plain `Copy` values; every operation goes through a [`Tower`],
//! which owns the modulus and the precomputed constants. A tower is immutable
//! once built and can be shared freely between threads.

use thiserror::Error;

/// Largest prime for which the F_p character table is precomputed.
pub const CHI_TABLE_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime >= 5")]
    BadPrime(u64),
}

/// Element `a + b·α` of F_{p²}.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Fp2 {
    pub a: u64,
    pub b: u64,
}

/// Element `x + y·γ` of F_{p⁴}.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fp4 {
    pub x: Fp2,
    pub y: Fp2,
}

impl Fp2 {
    pub const ZERO: Fp2 = Fp2 { a: 0, b: 0 };
    pub const ONE: Fp2 = Fp2 { a: 1, b: 0 };

    pub fn new(a: u64, b: u64) -> Self {
        Fp2 { a, b }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl Fp4 {
    pub const ZERO: Fp4 = Fp4 { x: Fp2::ZERO, y: Fp2::ZERO };
    pub const ONE: Fp4 = Fp4 { x: Fp2::ONE, y: Fp2::ZERO };

    pub fn is_zero(self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut k = 3;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// Primes `lo <= p <= hi`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Field contexts for F_p, F_{p²} and F_{p⁴}.
#[derive(Debug, Clone)]
pub struct Tower {
    p: u64,
    d: u64,
    e: Fp2,
    /// γ^(p−1) = e^((p−1)/2), so that γ^p = gamma_frob·γ.
    gamma_frob: Fp2,
    chi: Vec<i8>,
}

impl Tower {
    /// Builds the tower for a prime `p >= 5`.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 5 || !is_prime(p) || p >= 1 << 31 {
            return Err(FieldError::BadPrime(p));
        }
        let mut t = Tower { p, d: 0, e: Fp2::ZERO, gamma_frob: Fp2::ZERO, chi: Vec::new() };
        if p <= CHI_TABLE_LIMIT {
            let mut chi = vec![-1i8; p as usize];
            chi[0] = 0;
            for x in 1..p {
                chi[(x * x % p) as usize] = 1;
            }
            t.chi = chi;
        }
        t.d = (2..p).find(|&x| t.chi_euler(x) == -1).expect("non-residue exists");
        t.e = (0..p)
            .flat_map(|a| (0..p).map(move |b| Fp2::new(a, b)))
            .find(|&x| t.chi2_euler(x) == -1)
            .expect("non-square exists");
        t.gamma_frob = t.pow2(t.e, (p - 1) / 2);
        Ok(t)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The non-residue d with α² = d.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// The non-square e ∈ F_{p²} with γ² = e.
    pub fn e(&self) -> Fp2 {
        self.e
    }

    // ---- F_p -------------------------------------------------------------

    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.p - y
        }
    }

    #[inline]
    pub fn neg(&self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.p - x
        }
    }

    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        x * y % self.p
    }

    pub fn pow(&self, mut x: u64, mut n: u64) -> u64 {
        let mut r = 1;
        x %= self.p;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(r, x);
            }
            x = self.mul(x, x);
            n >>= 1;
        }
        r
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, x: u64) -> u64 {
        assert!(x % self.p != 0, "inverse of zero");
        self.pow(x, self.p - 2)
    }

    /// Quadratic character on F_p (table lookup when available).
    #[inline]
    pub fn chi(&self, x: u64) -> i8 {
        if self.chi.is_empty() {
            self.chi_euler(x)
        } else {
            self.chi[(x % self.p) as usize]
        }
    }

    /// Quadratic character on F_p by Euler's criterion.
    pub fn chi_euler(&self, x: u64) -> i8 {
        match self.pow(x, (self.p - 1) / 2) {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    /// Legendre symbol of an integer.
    pub fn legendre(&self, v: i64) -> i8 {
        self.chi(self.reduce(v))
    }

    /// Canonical square root in F_p (the smaller of the two residues).
    pub fn sqrt(&self, x: u64) -> Option<u64> {
        let x = x % self.p;
        if x == 0 {
            return Some(0);
        }
        if self.chi(x) != 1 {
            return None;
        }
        let p = self.p;
        let (mut q, mut s) = (p - 1, 0u32);
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut m = s;
        let mut c = self.pow(self.d, q);
        let mut t = self.pow(x, q);
        let mut r = self.pow(x, (q + 1) / 2);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let b = self.pow(c, 1 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r.min(p - r))
    }

    // ---- F_{p²} ----------------------------------------------------------

    pub fn embed2(&self, x: u64) -> Fp2 {
        Fp2::new(x % self.p, 0)
    }

    #[inline]
    pub fn add2(&self, x: Fp2, y: Fp2) -> Fp2 {
        Fp2::new(self.add(x.a, y.a), self.add(x.b, y.b))
    }

    #[inline]
    pub fn sub2(&self, x: Fp2, y: Fp2) -> Fp2 {
        Fp2::new(self.sub(x.a, y.a), self.sub(x.b, y.b))
    }

    #[inline]
    pub fn neg2(&self, x: Fp2) -> Fp2 {
        Fp2::new(self.neg(x.a), self.neg(x.b))
    }

    #[inline]
    pub fn mul2(&self, x: Fp2, y: Fp2) -> Fp2 {
        let p = self.p;
        let a = (x.a * y.a + x.b * y.b % p * self.d) % p;
        let b = (x.a * y.b + x.b * y.a) % p;
        Fp2::new(a, b)
    }

    #[inline]
    pub fn scale2(&self, k: u64, x: Fp2) -> Fp2 {
        Fp2::new(self.mul(k, x.a), self.mul(k, x.b))
    }

    pub fn pow2(&self, mut x: Fp2, mut n: u64) -> Fp2 {
        let mut r = Fp2::ONE;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul2(r, x);
            }
            x = self.mul2(x, x);
            n >>= 1;
        }
        r
    }

    /// Norm F_{p²} → F_p, a² − d·b².
    #[inline]
    pub fn norm2(&self, x: Fp2) -> u64 {
        self.sub(self.mul(x.a, x.a), self.mul(self.d, self.mul(x.b, x.b)))
    }

    pub fn inv2(&self, x: Fp2) -> Fp2 {
        let n = self.inv(self.norm2(x));
        Fp2::new(self.mul(x.a, n), self.mul(self.neg(x.b), n))
    }

    /// x^p: the conjugation a + bα ↦ a − bα.
    #[inline]
    pub fn frob2(&self, x: Fp2) -> Fp2 {
        Fp2::new(x.a, self.neg(x.b))
    }

    /// Quadratic character on F_{p²} by Euler's criterion x^((p²−1)/2).
    pub fn chi2_euler(&self, x: Fp2) -> i8 {
        if x.is_zero() {
            return 0;
        }
        let r = self.pow2(x, (self.p * self.p - 1) / 2);
        if r == Fp2::ONE {
            1
        } else {
            -1
        }
    }

    /// Quadratic character on F_{p²} through the norm, χ_{p²}(x) = χ_p(N(x)).
    #[inline]
    pub fn chi2(&self, x: Fp2) -> i8 {
        self.chi(self.norm2(x))
    }

    /// Canonical square root in F_{p²}: the root with the smaller `(a, b)`.
    pub fn sqrt2(&self, x: Fp2) -> Option<Fp2> {
        if x.is_zero() {
            return Some(Fp2::ZERO);
        }
        if self.chi2(x) != 1 {
            return None;
        }
        let (mut q, mut s) = (self.p * self.p - 1, 0u32);
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut m = s;
        let mut c = self.pow2(self.e, q);
        let mut t = self.pow2(x, q);
        let mut r = self.pow2(x, (q + 1) / 2);
        while t != Fp2::ONE {
            let mut i = 0;
            let mut t2 = t;
            while t2 != Fp2::ONE {
                t2 = self.mul2(t2, t2);
                i += 1;
            }
            let b = self.pow2(c, 1 << (m - i - 1));
            m = i;
            c = self.mul2(b, b);
            t = self.mul2(t, c);
            r = self.mul2(r, b);
        }
        Some(r.min(self.neg2(r)))
    }

    // ---- F_{p⁴} ----------------------------------------------------------

    pub fn embed4(&self, x: Fp2) -> Fp4 {
        Fp4 { x, y: Fp2::ZERO }
    }

    pub fn add4(&self, u: Fp4, v: Fp4) -> Fp4 {
        Fp4 { x: self.add2(u.x, v.x), y: self.add2(u.y, v.y) }
    }

    pub fn sub4(&self, u: Fp4, v: Fp4) -> Fp4 {
        Fp4 { x: self.sub2(u.x, v.x), y: self.sub2(u.y, v.y) }
    }

    pub fn neg4(&self, u: Fp4) -> Fp4 {
        Fp4 { x: self.neg2(u.x), y: self.neg2(u.y) }
    }

    pub fn mul4(&self, u: Fp4, v: Fp4) -> Fp4 {
        let xx = self.mul2(u.x, v.x);
        let yy = self.mul2(self.mul2(u.y, v.y), self.e);
        let xy = self.add2(self.mul2(u.x, v.y), self.mul2(u.y, v.x));
        Fp4 { x: self.add2(xx, yy), y: xy }
    }

    pub fn scale4(&self, k: Fp2, u: Fp4) -> Fp4 {
        Fp4 { x: self.mul2(k, u.x), y: self.mul2(k, u.y) }
    }

    pub fn pow4(&self, mut x: Fp4, mut n: u64) -> Fp4 {
        let mut r = Fp4::ONE;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul4(r, x);
            }
            x = self.mul4(x, x);
            n >>= 1;
        }
        r
    }

    /// x^p on F_{p⁴}, using γ^p = e^((p−1)/2)·γ.
    pub fn frob4(&self, u: Fp4) -> Fp4 {
        Fp4 { x: self.frob2(u.x), y: self.mul2(self.frob2(u.y), self.gamma_frob) }
    }

    /// A square root in F_{p⁴} of an element of F_{p²}; it always exists.
    ///
    /// Squares of F_{p²} have a root in F_{p²}. For a non-square v, v/e is a
    /// square since e is a non-square, and (√(v/e)·γ)² = v.
    pub fn sqrt_in_fp4(&self, v: Fp2) -> Fp4 {
        match self.sqrt2(v) {
            Some(r) => self.embed4(r),
            None => {
                let w = self.sqrt2(self.mul2(v, self.inv2(self.e))).expect("v/e is a square");
                Fp4 { x: Fp2::ZERO, y: w }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_nonresidues() {
        assert_eq!(Tower::new(5).unwrap().d(), 2);
        assert_eq!(Tower::new(7).unwrap().d(), 3);
        assert_eq!(Tower::new(4).unwrap_err(), FieldError::BadPrime(4));
        assert!(Tower::new(3).is_err());
        assert!(Tower::new(9).is_err());
    }

    #[test]
    fn characters() {
        let t5 = Tower::new(5).unwrap();
        assert_eq!(t5.chi(4), 1);
        assert_eq!(t5.chi(0), 0);
        let t7 = Tower::new(7).unwrap();
        assert_eq!(t7.chi(3), -1);
    }

    #[test]
    fn frobenius_on_alpha() {
        let t = Tower::new(5).unwrap();
        assert_eq!(t.frob2(Fp2::new(0, 1)), Fp2::new(0, 4));
        let x = Fp2::new(3, 2);
        assert_eq!(t.frob2(x), t.pow2(x, 5));
        assert_eq!(t.frob2(t.frob2(x)), x);
        assert_eq!(t.frob2(t.embed2(3)), t.embed2(3));
    }

    #[test]
    fn square_roots() {
        let t = Tower::new(7).unwrap();
        assert_eq!(t.sqrt(2), Some(3));
        assert_eq!(t.sqrt(3), None);
        assert_eq!(t.sqrt(0), Some(0));
        assert_eq!(t.sqrt2(Fp2::ZERO), Some(Fp2::ZERO));
    }

    #[test]
    fn fp4_frobenius_matches_power() {
        let t = Tower::new(11).unwrap();
        let u = Fp4 { x: Fp2::new(3, 7), y: Fp2::new(5, 1) };
        assert_eq!(t.frob4(u), t.pow4(u, 11));
        let mut v = u;
        for _ in 0..4 {
            v = t.frob4(v);
        }
        assert_eq!(v, u);
    }

    #[test]
    fn every_fp2_element_has_root_in_fp4() {
        let t = Tower::new(7).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                let v = Fp2::new(a, b);
                let r = t.sqrt_in_fp4(v);
                assert_eq!(t.mul4(r, r), t.embed4(v));
            }
        }
    }
}
