//! Fixed points of Frob_p ∘ Φ on the double cover, for an involution Φ of P³
//! preserving the arrangement.
//!
//! Descent. Let M be the matrix of Φ over F_p with M² = c′·Id. A point x of
//! P³(F̄_p) is fixed when M·x^(p) = κ·x for some κ. Applying the map twice
//! gives M·M·x^(p²) = κ^(p+1)·x, so x^(p²) ∝ x and fixed points are
//! F_{p²}-rational; moreover c′ = N(κ) for the scalar on any representative.
//! Pick λ ∈ F_{p²} with N(λ) = c′ and set σ(x) = (M/λ)·x^(p). Then σ is
//! semilinear with σ² = Id, so by Hilbert 90 its fixed vectors
//! V = {x : σ(x) = x} form an F_p-structure of F_{p²}⁴: dim_{F_p} V = 4 and
//! V ⊗ F_{p²} = F_{p²}⁴. For a fixed point with M·x^(p) = κx, rescaling x by
//! ν changes κ to κ·ν^(p−1), and ν^(p−1) ranges over all norm-one elements,
//! so every fixed point has a representative with κ = λ, i.e. lies in V.
//! Two vectors of V give the same point iff they differ by an element of F_p^×.
//! Hence P(V) is exactly the fixed locus and has p³ + p² + p + 1 points.
//!
//! Lifts. With f(Mx) = c_f·f(x) and s² = c_f, Φ lifts to (x, u) ↦ (Mx, ±s·u).
//! Above x ∈ P(V) with v = f(x) ≠ 0, the weighted point (x, u) with u² = v is
//! fixed by Frob ∘ Φ̃ iff (±s)^p·u^p = λ⁴·u. Since u² = v ∈ F_{p²}, u lies in
//! F_{p⁴}, so the test runs there. When v = 0 the single point is fixed for
//! both lifts.

use serde::Serialize;

use super::{par_sum, projective_size, CountingError, OcticForm, Tally};
use crate::arrangement::linalg::q_mod;
use crate::arrangement::{check_involution, rational_sqrt, InvolutionMatrix, PlaneArrangement};
use crate::finite_fields::{Fp2, Tower};

/// Largest prime accepted by the brute-force enumeration of P³(F_{p²}).
pub const BRUTE_PRIME_LIMIT: u64 = 13;

/// The F_p-space V of σ-fixed vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistedFixedForm {
    pub p: u64,
    pub basis: [[Fp2; 4]; 4],
    /// c′ with M² = c′·Id, mod p.
    pub square_scalar: u64,
    /// λ with N(λ) = c′.
    pub lambda: Fp2,
}

/// Kernel of a matrix over F_p, as a list of basis vectors.
fn kernel_mod_p(t: &Tower, mut m: Vec<Vec<u64>>, ncols: usize) -> Vec<Vec<u64>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(r, piv);
        let inv = t.inv(m[r][col]);
        for j in 0..ncols {
            m[r][j] = t.mul(m[r][j], inv);
        }
        for i in 0..m.len() {
            if i != r && m[i][col] != 0 {
                let k = m[i][col];
                for j in 0..ncols {
                    m[i][j] = t.sub(m[i][j], t.mul(k, m[r][j]));
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; ncols];
            v[fc] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = t.neg(m[row][fc]);
            }
            v
        })
        .collect()
}

/// λ ∈ F_{p²} with λ^(p+1) = c.
fn norm_preimage(t: &Tower, c: u64) -> Fp2 {
    if let Some(r) = t.sqrt(c) {
        return t.embed2(r);
    }
    let p = t.p();
    (0..p)
        .flat_map(|a| (1..p).map(move |b| Fp2::new(a, b)))
        .find(|&x| t.norm2(x) == c)
        .expect("the norm map is onto F_p^×")
}

/// Solves (M/λ)·x^(p) = x through x = a + α·b with a, b ∈ F_p⁴. Writing
/// M/λ = P + α·Q, the condition is (P − I)a − d·Q·b = 0 and Q·a − (P + I)b = 0.
pub fn twisted_fixed_form(t: &Tower, m: &[[u64; 4]; 4]) -> Result<TwistedFixedForm, CountingError> {
    let p = t.p();
    let mm: [[u64; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| (0..4).fold(0, |s, k| t.add(s, t.mul(m[i][k], m[k][j])))));
    let c = mm[0][0];
    let scalar_ok = (0..4).all(|i| (0..4).all(|j| mm[i][j] == if i == j { c } else { 0 }));
    if !scalar_ok || c == 0 {
        return Err(CountingError::InvolutionModP(p));
    }
    let lambda = norm_preimage(t, c);
    let li = t.inv2(lambda);
    let scaled: [[Fp2; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| t.scale2(m[i][j], li)));
    let d = t.d();
    let mut rows = Vec::with_capacity(8);
    for i in 0..4 {
        let mut r = vec![0u64; 8];
        for j in 0..4 {
            r[j] = t.sub(scaled[i][j].a, (i == j) as u64);
            r[4 + j] = t.neg(t.mul(d, scaled[i][j].b));
        }
        rows.push(r);
    }
    for i in 0..4 {
        let mut r = vec![0u64; 8];
        for j in 0..4 {
            r[j] = scaled[i][j].b;
            r[4 + j] = t.neg(t.add(scaled[i][j].a, (i == j) as u64));
        }
        rows.push(r);
    }
    let ker = kernel_mod_p(t, rows, 8);
    if ker.len() != 4 {
        return Err(CountingError::Dimension(ker.len()));
    }
    let basis: [[Fp2; 4]; 4] = std::array::from_fn(|k| std::array::from_fn(|i| Fp2::new(ker[k][i], ker[k][4 + i])));
    Ok(TwistedFixedForm { p, basis, square_scalar: c, lambda })
}

/// Fixed-point totals of Frob_p ∘ Φ̃ for the lifts u ↦ s·u and u ↦ −s·u.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TwistedCount {
    pub p: u64,
    pub plus: u64,
    pub minus: u64,
    /// Fixed points of Frob_p ∘ Φ on P³.
    pub points: u64,
}

/// Contribution of one fixed point x of P³, where M·x^(p) = κ·x.
fn fiber_rule(t: &Tower, f: &OcticForm, x: &[Fp2; 4], kappa4: Fp2, s: Fp2) -> Tally {
    let v = f.eval2(x);
    if v.is_zero() {
        return Tally { a: 1, b: 1, c: 1 };
    }
    let u = t.sqrt_in_fp4(v);
    let up = t.frob4(u);
    let rhs = t.scale4(kappa4, u);
    let sp = t.frob2(s);
    let plus = t.scale4(sp, up) == rhs;
    let minus = t.scale4(t.neg2(sp), up) == rhs;
    assert!(!(plus && minus), "a fiber contributes to both lifts");
    Tally { a: 2 * plus as i64, b: 2 * minus as i64, c: 1 }
}

/// Descent-route count for an octic, a matrix over F_p and a lift scalar s.
pub fn twisted_count_form(f: &OcticForm, m: &[[u64; 4]; 4], s: Fp2) -> Result<TwistedCount, CountingError> {
    let t = f.tower();
    let p = t.p();
    let tf = twisted_fixed_form(t, m)?;
    let l2 = t.mul2(tf.lambda, tf.lambda);
    let kappa4 = t.mul2(l2, l2);
    // Canonical F_p-coordinates (first nonzero = 1) of P(V), sliced by the
    // leading block.
    let size = projective_size(p);
    let tally = par_sum(p * p + 1, |i| {
        let point = |c: [u64; 4]| -> [Fp2; 4] {
            std::array::from_fn(|j| (0..4).fold(Fp2::ZERO, |acc, k| t.add2(acc, t.scale2(c[k], tf.basis[k][j]))))
        };
        let mut out = Tally::default();
        let mut visit = |c: [u64; 4]| out = out + fiber_rule(t, f, &point(c), kappa4, s);
        if i < p * p {
            for z in 0..p {
                visit([1, i / p, i % p, z]);
            }
        } else {
            for b in 0..p {
                for z in 0..p {
                    visit([0, 1, b, z]);
                }
            }
            for z in 0..p {
                visit([0, 0, 1, z]);
            }
            visit([0, 0, 0, 1]);
        }
        out
    });
    debug_assert_eq!(tally.c as u64, size);
    Ok(TwistedCount { p, plus: tally.a as u64, minus: tally.b as u64, points: tally.c as u64 })
}

/// Brute-force count over all of P³(F_{p²}): tests M·x^(p) ∝ x directly and
/// applies the fiber rule with the observed scalar.
pub fn brute_twisted_count_form(f: &OcticForm, m: &[[u64; 4]; 4], s: Fp2) -> Result<TwistedCount, CountingError> {
    let t = f.tower();
    let p = t.p();
    if p > BRUTE_PRIME_LIMIT {
        return Err(CountingError::PrimeTooLarge { p, limit: BRUTE_PRIME_LIMIT });
    }
    let q = p * p;
    let elt = |n: u64| Fp2::new(n % p, n / p);
    let check = |x: [Fp2; 4]| -> Tally {
        let xp = x.map(|c| t.frob2(c));
        let y: [Fp2; 4] =
            std::array::from_fn(|i| (0..4).fold(Fp2::ZERO, |acc, k| t.add2(acc, t.scale2(m[i][k], xp[k]))));
        let lead = (0..4).find(|&i| !x[i].is_zero()).unwrap();
        let kappa = t.mul2(y[lead], t.inv2(x[lead]));
        if (0..4).any(|i| y[i] != t.mul2(kappa, x[i])) {
            return Tally::default();
        }
        let k2 = t.mul2(kappa, kappa);
        fiber_rule(t, f, &x, t.mul2(k2, k2), s)
    };
    let one = Fp2::ONE;
    let tally = par_sum(q * q + 1, |i| {
        let mut out = Tally::default();
        if i < q * q {
            for z in 0..q {
                out = out + check([one, elt(i / q), elt(i % q), elt(z)]);
            }
        } else {
            for b in 0..q {
                for z in 0..q {
                    out = out + check([Fp2::ZERO, one, elt(b), elt(z)]);
                }
            }
            for z in 0..q {
                out = out + check([Fp2::ZERO, Fp2::ZERO, one, elt(z)]);
            }
            out = out + check([Fp2::ZERO, Fp2::ZERO, Fp2::ZERO, one]);
        }
        out
    });
    Ok(TwistedCount { p, plus: tally.a as u64, minus: tally.b as u64, points: tally.c as u64 })
}

/// The lift scalar s with s² = c_f: a rational square root reduced mod p when
/// c_f is a rational square, otherwise the canonical root in F_{p²}.
pub fn lift_scalar(arr: &PlaneArrangement, m: &InvolutionMatrix, t: &Tower) -> Result<Fp2, CountingError> {
    let p = t.p();
    let chk = check_involution(arr, m)?;
    if let Some(r) = rational_sqrt(&chk.c) {
        return Ok(t.embed2(q_mod(&r, p).ok_or(CountingError::BadPrime(p))?));
    }
    let neg = -chk.c.clone();
    if let Some(r) = rational_sqrt(&neg) {
        // s = r·√−1
        let i = t.sqrt2(t.embed2(t.neg(1))).expect("square roots exist in F_{p²}");
        return Ok(t.mul2(i, t.embed2(q_mod(&r, p).ok_or(CountingError::BadPrime(p))?)));
    }
    let c = q_mod(&chk.c, p).ok_or(CountingError::BadPrime(p))?;
    Ok(t.sqrt2(t.embed2(c)).expect("square roots exist in F_{p²}"))
}

fn prepare(
    arr: &PlaneArrangement,
    m: &InvolutionMatrix,
    p: u64,
) -> Result<(OcticForm, [[u64; 4]; 4], Fp2), CountingError> {
    let f = OcticForm::from_arrangement(arr, p)?;
    let mp = m.reduce(p).ok_or(CountingError::InvolutionModP(p))?;
    let s = lift_scalar(arr, m, f.tower())?;
    Ok((f, mp, s))
}

pub fn twisted_fixed_count(
    arr: &PlaneArrangement,
    m: &InvolutionMatrix,
    p: u64,
) -> Result<TwistedCount, CountingError> {
    let (f, mp, s) = prepare(arr, m, p)?;
    twisted_count_form(&f, &mp, s)
}

pub fn brute_twisted_count(
    arr: &PlaneArrangement,
    m: &InvolutionMatrix,
    p: u64,
) -> Result<TwistedCount, CountingError> {
    if p > BRUTE_PRIME_LIMIT {
        return Err(CountingError::PrimeTooLarge { p, limit: BRUTE_PRIME_LIMIT });
    }
    let (f, mp, s) = prepare(arr, m, p)?;
    brute_twisted_count_form(&f, &mp, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::lookup;
    use crate::counting::count_projective_cover;

    const ID: [[u64; 4]; 4] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];

    #[test]
    fn identity_reduces_to_cover_count() {
        let f = OcticForm::new(5, 1, &[[1, 0, 0, 0]; 8]).unwrap();
        let tf = twisted_fixed_form(f.tower(), &ID).unwrap();
        assert!(tf.basis.iter().all(|v| v.iter().all(|c| c.b == 0)));
        let a = twisted_count_form(&f, &ID, Fp2::ONE).unwrap();
        let b = brute_twisted_count_form(&f, &ID, Fp2::ONE).unwrap();
        assert_eq!(a.plus, 281);
        assert_eq!(a, b);
        let arr = lookup("21").unwrap();
        let g = OcticForm::from_arrangement(&arr, 7).unwrap();
        let c = twisted_count_form(&g, &ID, Fp2::ONE).unwrap();
        assert_eq!(c.plus, count_projective_cover(&g).unwrap().n_total);
    }

    #[test]
    fn fixed_space_of_catalog_involution() {
        let arr = lookup("53").unwrap();
        let m = arr.involutions[0].reduce(5).unwrap();
        let t = Tower::new(5).unwrap();
        let tf = twisted_fixed_form(&t, &m).unwrap();
        // Every basis vector satisfies M·x^(5) = λ·x.
        for x in &tf.basis {
            for i in 0..4 {
                let y = (0..4).fold(Fp2::ZERO, |acc, k| t.add2(acc, t.scale2(m[i][k], t.frob2(x[k]))));
                assert_eq!(y, t.mul2(tf.lambda, x[i]));
            }
        }
        let c = twisted_fixed_count(&arr, &arr.involutions[0], 5).unwrap();
        assert_eq!(c.points, 156);
    }

    #[test]
    fn rejects_non_involution() {
        let t = Tower::new(7).unwrap();
        let m = [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        assert_eq!(twisted_fixed_form(&t, &m), Err(CountingError::InvolutionModP(7)));
        let arr = lookup("53").unwrap();
        assert!(matches!(
            brute_twisted_count(&arr, &arr.involutions[0], 17),
            Err(CountingError::PrimeTooLarge { p: 17, .. })
        ));
    }

    #[test]
    fn non_unit_square_scalar() {
        // M² = 3·Id with M = [[0, 1], [3, 0]] blocks; 3 is a non-square mod 7.
        let t = Tower::new(7).unwrap();
        let m = [[0, 1, 0, 0], [3, 0, 0, 0], [0, 0, 0, 1], [0, 0, 3, 0]];
        let tf = twisted_fixed_form(&t, &m).unwrap();
        assert_eq!(t.norm2(tf.lambda), 3);
        let f = OcticForm::new(
            7,
            1,
            &[
                [1, 0, 0, 0],
                [0, 1, 0, 0],
                [0, 0, 1, 0],
                [0, 0, 0, 1],
                [1, 1, 1, 1],
                [1, 2, 3, 4],
                [1, 0, 2, 0],
                [0, 1, 0, 3],
            ],
        )
        .unwrap();
        let a = twisted_count_form(&f, &m, Fp2::ONE).unwrap();
        let b = brute_twisted_count_form(&f, &m, Fp2::ONE).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points, projective_size(7));
    }
}
