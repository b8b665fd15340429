//! Genus-one fibers of the two pencils of a Kummer split.

use std::fmt;

use serde::{Serialize, Serializer};

use super::CountingError;
use crate::arrangement::linalg::q_mod;
use crate::arrangement::{KummerSplit, PlaneArrangement};
use crate::finite_fields::Tower;

/// Point count of the smooth model of w² = q(x) and, for a smooth genus-one
/// fiber, its trace of Frobenius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiberCount {
    pub count: u64,
    pub degree: usize,
    /// deg q ∈ {3, 4} and q squarefree.
    pub smooth: bool,
    pub trace: Option<i64>,
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of a by b over F_p (b nonzero, trimmed).
fn poly_rem(t: &Tower, mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    let lead_inv = t.inv(*b.last().unwrap());
    while a.len() >= b.len() {
        let k = t.mul(*a.last().unwrap(), lead_inv);
        let shift = a.len() - b.len();
        for (i, &c) in b.iter().enumerate() {
            a[shift + i] = t.sub(a[shift + i], t.mul(k, c));
        }
        a = trim(a);
    }
    a
}

fn gcd_degree(t: &Tower, a: Vec<u64>, b: Vec<u64>) -> usize {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = poly_rem(t, a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

/// Counts the smooth model of w² = q(x), with q given from the constant term
/// up. Above x = ∞ there are 1 + χ(lc) points for degree 4, one for degree 3
/// and two for degree ≤ 2.
pub fn count_quartic_fiber(t: &Tower, q: &[u64]) -> Result<FiberCount, CountingError> {
    let q = trim(q.iter().map(|&c| c % t.p()).collect());
    if q.is_empty() {
        return Err(CountingError::ZeroPolynomial);
    }
    if q.len() > 5 {
        return Err(CountingError::FiberDegree(q.len() - 1));
    }
    let p = t.p();
    let degree = q.len() - 1;
    let mut count: i64 = 0;
    for x in 0..p {
        let v = q.iter().rev().fold(0, |acc, &c| t.add(t.mul(acc, x), c));
        count += 1 + t.chi(v) as i64;
    }
    count += match degree {
        4 => 1 + t.chi(q[4]) as i64,
        3 => 1,
        _ => 2,
    };
    let deriv: Vec<u64> = (1..q.len()).map(|i| t.mul(i as u64 % p, q[i])).collect();
    let smooth = (degree == 3 || degree == 4) && gcd_degree(t, q.clone(), deriv) == 0;
    let trace = smooth.then(|| p as i64 + 1 - count);
    Ok(FiberCount { count: count as u64, degree, smooth, trace })
}

/// A point of P¹(F_p) in the pencil coordinate t = y/z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PencilPoint {
    Finite(u64),
    Infinity,
}

impl PencilPoint {
    fn hom(self) -> (u64, u64) {
        match self {
            PencilPoint::Finite(t) => (t, 1),
            PencilPoint::Infinity => (1, 0),
        }
    }
}

impl fmt::Display for PencilPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PencilPoint::Finite(t) => write!(f, "{t}"),
            PencilPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for PencilPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The two genus-one families of a split in the split coordinates (a, y, z, b)
/// with old = T·new.
struct SplitFamilies {
    /// Coefficients (a, y, z) of the first quadruple.
    first: Vec<[u64; 3]>,
    /// Coefficients (b, y, z) of the second quadruple.
    second: Vec<[u64; 3]>,
    scalar: u64,
}

impl SplitFamilies {
    fn new(arr: &PlaneArrangement, split: &KummerSplit, t: &Tower) -> Result<Self, CountingError> {
        let p = t.p();
        let scalar = q_mod(&arr.scalar, p).filter(|&s| s != 0).ok_or(CountingError::BadPrime(p))?;
        let image = |i: usize| -> [i128; 4] {
            let f = arr.forms[i].0;
            std::array::from_fn(|j| (0..4).map(|k| f[k] as i128 * split.transform[k][j] as i128).sum())
        };
        let r = |v: i128| t.reduce_i128(v);
        let first = split.first.iter().map(|&i| image(i)).map(|v| [r(v[0]), r(v[1]), r(v[2])]).collect();
        let second = split.second.iter().map(|&i| image(i)).map(|v| [r(v[3]), r(v[1]), r(v[2])]).collect();
        Ok(SplitFamilies { first, second, scalar })
    }

    /// c · ∏ (k_x·X + k_y·ty + k_z·tz) from the constant term up.
    fn poly(t: &Tower, forms: &[[u64; 3]], c: u64, at: PencilPoint) -> Vec<u64> {
        let (ty, tz) = at.hom();
        let mut out = vec![c];
        for f in forms {
            let c0 = t.add(t.mul(f[1], ty), t.mul(f[2], tz));
            let mut next = vec![0u64; out.len() + 1];
            for (i, &a) in out.iter().enumerate() {
                next[i] = t.add(next[i], t.mul(a, c0));
                next[i + 1] = t.add(next[i + 1], t.mul(a, f[0]));
            }
            out = next;
        }
        out
    }
}

/// A fiber whose equation vanishes identically lies in the branch locus and
/// counts as singular.
fn fiber_trace(t: &Tower, q: &[u64]) -> Result<Option<i64>, CountingError> {
    match count_quartic_fiber(t, q) {
        Ok(c) => Ok(c.trace),
        Err(CountingError::ZeroPolynomial) => Ok(None),
        Err(e) => Err(e),
    }
}

fn pencil_points(p: u64) -> impl Iterator<Item = PencilPoint> {
    (0..p).map(PencilPoint::Finite).chain(std::iter::once(PencilPoint::Infinity))
}

/// Fiber traces of both families over every point of P¹(F_p); `None` marks
/// a singular fiber. The leading scalar goes with the family named by
/// `scalar_on_first`.
fn traces_with(
    arr: &PlaneArrangement,
    split: &KummerSplit,
    p: u64,
    scalar_on_first: bool,
) -> Result<Vec<(PencilPoint, Option<i64>, Option<i64>)>, CountingError> {
    let t = Tower::new(p)?;
    let fam = SplitFamilies::new(arr, split, &t)?;
    let (c1, c2) = if scalar_on_first { (fam.scalar, 1) } else { (1, fam.scalar) };
    pencil_points(p)
        .map(|at| {
            let a = fiber_trace(&t, &SplitFamilies::poly(&t, &fam.first, c1, at))?;
            let b = fiber_trace(&t, &SplitFamilies::poly(&t, &fam.second, c2, at))?;
            Ok((at, a, b))
        })
        .collect()
}

pub fn fiber_traces(
    arr: &PlaneArrangement,
    split: &KummerSplit,
    p: u64,
) -> Result<Vec<(PencilPoint, Option<i64>, Option<i64>)>, CountingError> {
    traces_with(arr, split, p, true)
}

/// Diagnostic Σ t₁(t)·t₂(t) over parameters where both fibers are smooth.
/// Singular parameters are listed separately and not corrected for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberProductTrace {
    pub p: u64,
    pub smooth_sum: i64,
    pub bad_params: Vec<PencilPoint>,
}

fn product_trace(rows: &[(PencilPoint, Option<i64>, Option<i64>)], p: u64) -> Result<FiberProductTrace, CountingError> {
    if rows.iter().all(|r| r.1.is_none()) {
        return Err(CountingError::ConstantSingular("first"));
    }
    if rows.iter().all(|r| r.2.is_none()) {
        return Err(CountingError::ConstantSingular("second"));
    }
    let mut smooth_sum = 0;
    let mut bad_params = Vec::new();
    for &(at, a, b) in rows {
        match (a, b) {
            (Some(a), Some(b)) => smooth_sum += a * b,
            _ => bad_params.push(at),
        }
    }
    Ok(FiberProductTrace { p, smooth_sum, bad_params })
}

pub fn fiber_product_trace(
    arr: &PlaneArrangement,
    split: &KummerSplit,
    p: u64,
) -> Result<FiberProductTrace, CountingError> {
    product_trace(&fiber_traces(arr, split, p)?, p)
}
