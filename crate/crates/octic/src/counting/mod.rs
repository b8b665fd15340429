//! Point counts over finite fields: the double cover of P³ branched along the
//! octic, elliptic fibers of Kummer splits, and fixed points of Frobenius
//! twisted by an involution.

mod fiber;
mod twisted;

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::linalg::q_mod;
use crate::arrangement::{ArrangementError, PlaneArrangement};
use crate::finite_fields::{FieldError, Fp2, Tower};
pub use fiber::{count_quartic_fiber, fiber_product_trace, fiber_traces, FiberCount, FiberProductTrace, PencilPoint};
pub use twisted::{
    brute_twisted_count, brute_twisted_count_form, lift_scalar, twisted_count_form, twisted_fixed_count,
    twisted_fixed_form, TwistedCount, TwistedFixedForm, BRUTE_PRIME_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountingError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error("the octic vanishes identically mod {0}")]
    ZeroForm(u64),
    #[error("p = {0} divides a denominator or the leading scalar")]
    BadPrime(u64),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("fiber polynomial has degree {0}, expected at most 4")]
    FiberDegree(usize),
    #[error("twisted fixed space has dimension {0}, expected 4")]
    Dimension(usize),
    #[error("involution is not defined mod {0}")]
    InvolutionModP(u64),
    #[error("p = {p} exceeds the brute-force limit {limit}")]
    PrimeTooLarge { p: u64, limit: u64 },
    #[error("arrangement has no Kummer split")]
    NoSplit,
    #[error("every fiber of the {0} family is singular")]
    ConstantSingular(&'static str),
}

/// The octic `scalar · ∏ forms` reduced mod p. Forms may repeat.
#[derive(Clone, Debug)]
pub struct OcticForm {
    tower: Tower,
    pub scalar: u64,
    pub forms: Vec<[u64; 4]>,
}

impl OcticForm {
    pub fn new(p: u64, scalar: i64, forms: &[[i64; 4]]) -> Result<Self, CountingError> {
        let tower = Tower::new(p)?;
        let scalar = tower.reduce(scalar);
        let forms = forms.iter().map(|f| f.map(|c| tower.reduce(c))).collect();
        Ok(OcticForm { tower, scalar, forms })
    }

    pub fn from_arrangement(arr: &PlaneArrangement, p: u64) -> Result<Self, CountingError> {
        let tower = Tower::new(p)?;
        let scalar = q_mod(&arr.scalar, p).ok_or(CountingError::BadPrime(p))?;
        let forms = arr.forms.iter().map(|f| f.reduce(p)).collect();
        Ok(OcticForm { tower, scalar, forms })
    }

    pub fn p(&self) -> u64 {
        self.tower.p()
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    fn check_nonzero(&self) -> Result<(), CountingError> {
        if self.scalar == 0 || self.forms.iter().any(|f| f.iter().all(|&c| c == 0)) {
            return Err(CountingError::ZeroForm(self.p()));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[u64; 4]) -> u64 {
        let t = &self.tower;
        self.forms.iter().fold(self.scalar, |acc, f| {
            let l = (0..4).fold(0, |s, i| t.add(s, t.mul(f[i], x[i])));
            t.mul(acc, l)
        })
    }

    pub fn eval2(&self, x: &[Fp2; 4]) -> Fp2 {
        let t = &self.tower;
        self.forms.iter().fold(t.embed2(self.scalar), |acc, f| {
            let l = (0..4).fold(Fp2::ZERO, |s, i| t.add2(s, t.scale2(f[i], x[i])));
            t.mul2(acc, l)
        })
    }
}

/// Points of the double cover u² = f over P³(F_p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCount {
    pub p: u64,
    /// Points of P³(F_p) with f = 0.
    pub n_branch: u64,
    /// Σ (1 + χ(f(x))) over P³(F_p).
    pub n_total: u64,
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Tally {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c }
    }
}

/// Σ_{i < n} f(i), in parallel when enabled. Integer sums are exact, so the
/// result does not depend on the worker count.
pub(crate) fn par_sum<F>(n: u64, f: F) -> Tally
where
    F: Fn(u64) -> Tally + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).reduce(Tally::default, |x, y| x + y)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).fold(Tally::default(), |x, y| x + y)
    }
}

/// Number of points of P³(F_p).
pub fn projective_size(p: u64) -> u64 {
    p * p * p + p * p + p + 1
}

/// Adds the points (prefix, c), c ∈ F_p, stepping each form linearly in c.
fn tally_line(f: &OcticForm, prefix: [u64; 3]) -> Tally {
    let t = &f.tower;
    let p = t.p();
    let mut vals: Vec<u64> = f.forms.iter().map(|g| (0..3).fold(0, |s, i| t.add(s, t.mul(g[i], prefix[i])))).collect();
    let steps: Vec<u64> = f.forms.iter().map(|g| g[3]).collect();
    let mut out = Tally::default();
    for _ in 0..p {
        let v = vals.iter().fold(f.scalar, |acc, &l| t.mul(acc, l));
        if v == 0 {
            out.a += 1;
        } else {
            out.b += t.chi(v) as i64;
        }
        for (x, &s) in vals.iter_mut().zip(&steps) {
            *x = t.add(*x, s);
        }
    }
    out
}

/// Σ_{x ∈ P³(F_p)} (1 + χ(f(x))) over representatives whose first nonzero
/// coordinate is 1.
pub fn count_projective_cover(f: &OcticForm) -> Result<CoverCount, CountingError> {
    f.check_nonzero()?;
    let p = f.p();
    // Slices 0..p·p are the lines (1, a, b, *); the last slice holds the
    // points with x = 0.
    let tally = par_sum(p * p + 1, |i| {
        if i < p * p {
            return tally_line(f, [1, i / p, i % p]);
        }
        let mut t = (0..p).fold(Tally::default(), |acc, b| acc + tally_line(f, [0, 1, b]));
        t = t + tally_line(f, [0, 0, 1]);
        let v = f.eval(&[0, 0, 0, 1]);
        t + if v == 0 {
            Tally { a: 1, ..Default::default() }
        } else {
            Tally { b: f.tower.chi(v) as i64, ..Default::default() }
        }
    });
    let n = projective_size(p) as i64;
    Ok(CoverCount { p, n_branch: tally.a as u64, n_total: (n + tally.b) as u64 })
}

/// Oracle for `count_projective_cover`: counts solutions of u² = f on the
/// four affine charts x_i = 1 from a table of square roots and divides the
/// contribution of each point by the number of charts containing it.
pub fn count_cover_affine_charts(f: &OcticForm) -> Result<CoverCount, CountingError> {
    f.check_nonzero()?;
    let p = f.p();
    let t = &f.tower;
    let mut sq = vec![0i64; p as usize];
    for u in 0..p {
        sq[t.mul(u, u) as usize] += 1;
    }
    // by_support[k]: summed over charts, for points with k nonzero coordinates.
    let mut cover = [0i64; 5];
    let mut branch = [0i64; 5];
    for chart in 0..4 {
        for n in 0..p * p * p {
            let free = [n / (p * p), n / p % p, n % p];
            let mut x = [0u64; 4];
            let mut k = 0;
            for i in 0..4 {
                x[i] = match i.cmp(&chart) {
                    std::cmp::Ordering::Less => free[i],
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Greater => free[i - 1],
                };
            }
            for &c in &x {
                k += (c != 0) as usize;
            }
            let v = f.eval(&x);
            cover[k] += sq[v as usize];
            branch[k] += (v == 0) as i64;
        }
    }
    let mut n_total = 0;
    let mut n_branch = 0;
    for k in 1..5 {
        debug_assert!(cover[k] % k as i64 == 0 && branch[k] % k as i64 == 0);
        n_total += cover[k] / k as i64;
        n_branch += branch[k] / k as i64;
    }
    Ok(CoverCount { p, n_branch: n_branch as u64, n_total: n_total as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::lookup;

    #[test]
    fn trivial_octics() {
        let f = OcticForm::new(5, 1, &[[1, 0, 0, 0]; 8]).unwrap();
        let c = count_projective_cover(&f).unwrap();
        assert_eq!((c.n_total, c.n_branch), (281, 31));
        let mut forms = vec![[1, 0, 0, 0]; 4];
        forms.extend([[0, 1, 0, 0]; 4]);
        let g = OcticForm::new(5, 1, &forms).unwrap();
        assert_eq!(count_projective_cover(&g).unwrap().n_total, 256);
        assert_eq!(count_cover_affine_charts(&g).unwrap().n_total, 256);
        let z = OcticForm::new(5, 5, &[[1, 0, 0, 0]; 8]).unwrap();
        assert_eq!(count_projective_cover(&z), Err(CountingError::ZeroForm(5)));
    }

    #[test]
    fn chart_oracle_on_catalog() {
        for id in ["53", "244", "3"] {
            let arr = lookup(id).unwrap();
            for p in [5, 7] {
                let f = OcticForm::from_arrangement(&arr, p).unwrap();
                assert_eq!(count_projective_cover(&f).unwrap(), count_cover_affine_charts(&f).unwrap(), "{id} {p}");
            }
        }
    }

    #[test]
    fn bounds() {
        let arr = lookup("21").unwrap();
        let c = count_projective_cover(&OcticForm::from_arrangement(&arr, 11).unwrap()).unwrap();
        assert!(c.n_total <= 2 * projective_size(11));
        assert!(c.n_branch <= projective_size(11));
    }
}
