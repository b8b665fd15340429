//! Small exact linear algebra over Z, Q and F_p for 4-dimensional data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Numerator and denominator of a rational as `i64`, panicking on overflow.
pub fn q_parts(x: &Q) -> (i64, i64) {
    let n: i64 = x.numer().try_into().expect("numerator fits in i64");
    let d: i64 = x.denom().try_into().expect("denominator fits in i64");
    (n, d)
}

/// Reduces a rational mod p; `None` if p divides the denominator.
pub fn q_mod(x: &Q, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = x.denom().mod_floor(&pb);
    if d.is_zero() {
        return None;
    }
    let n = x.numer().mod_floor(&pb);
    let n: u64 = n.try_into().unwrap();
    let d: u64 = d.try_into().unwrap();
    let dinv = pow_mod(d, p - 2, p);
    Some(n * dinv % p)
}

pub fn pow_mod(mut x: u64, mut n: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    x %= p;
    while n > 0 {
        if n & 1 == 1 {
            r = r * x % p;
        }
        x = x * x % p;
        n >>= 1;
    }
    r
}

/// Divides out the content and makes the first nonzero entry positive.
/// Returns the normalized vector and the factor `k` with `v = k · normalized`.
pub fn normalize_i128<const N: usize>(v: [i128; N]) -> ([i64; N], i128) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g == 0 {
        return ([0; N], 0);
    }
    let lead = v.iter().find(|&&x| x != 0).copied().unwrap();
    let k = if lead < 0 { -g } else { g };
    let mut out = [0i64; N];
    for (o, &x) in out.iter_mut().zip(v.iter()) {
        *o = i64::try_from(x / k).expect("coefficient fits in i64");
    }
    (out, k)
}

/// Clears denominators of a rational vector, then normalizes.
/// Returns the integer vector and the rational factor `k` with `v = k · w`.
pub fn normalize_q<const N: usize>(v: &[Q; N]) -> ([i64; N], Q) {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let mut ints = [0i128; N];
    for (o, x) in ints.iter_mut().zip(v.iter()) {
        let n = x.numer() * (&l / x.denom());
        *o = i128::try_from(n).expect("coefficient fits in i128");
    }
    let (w, k) = normalize_i128(ints);
    (w, Q::new(BigInt::from(k), l))
}

pub fn det3(m: [[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn det4(m: [[i128; 4]; 4]) -> i128 {
    let mut s = 0i128;
    for j in 0..4 {
        let minor = minor3(&m[1..4], j);
        let term = m[0][j] * det3(minor);
        s += if j % 2 == 0 { term } else { -term };
    }
    s
}

fn minor3(rows: &[[i128; 4]], skip: usize) -> [[i128; 3]; 3] {
    let mut out = [[0i128; 3]; 3];
    for (r, row) in rows.iter().enumerate() {
        let mut c = 0;
        for (j, &x) in row.iter().enumerate() {
            if j != skip {
                out[r][c] = x;
                c += 1;
            }
        }
    }
    out
}

/// Generalized cross product: a vector orthogonal to three rows of Z⁴.
/// It is zero exactly when the rows are linearly dependent.
pub fn kernel3(a: &[i64; 4], b: &[i64; 4], c: &[i64; 4]) -> [i128; 4] {
    let rows = [widen(a), widen(b), widen(c)];
    let mut v = [0i128; 4];
    for (j, vj) in v.iter_mut().enumerate() {
        let d = det3(minor3(&rows, j));
        *vj = if j % 2 == 0 { d } else { -d };
    }
    v
}

/// Cross product in Z³.
pub fn cross(a: &[i64; 3], b: &[i64; 3]) -> [i128; 3] {
    let (a0, a1, a2) = (a[0] as i128, a[1] as i128, a[2] as i128);
    let (b0, b1, b2) = (b[0] as i128, b[1] as i128, b[2] as i128);
    [a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0]
}

pub fn widen<const N: usize>(a: &[i64; N]) -> [i128; N] {
    let mut out = [0i128; N];
    for (o, &x) in out.iter_mut().zip(a.iter()) {
        *o = x as i128;
    }
    out
}

pub fn dot<const N: usize>(a: &[i64; N], b: &[i64; N]) -> i128 {
    a.iter().zip(b.iter()).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Rank of integer rows over Q (`modulus = None`) or over F_p.
pub fn rank(rows: &[[i64; 4]], modulus: Option<u64>) -> usize {
    match modulus {
        None => rank_q(rows),
        Some(p) => rank_mod(rows, p),
    }
}

fn rank_q(rows: &[[i64; 4]]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    let mut r = 0;
    for col in 0..4 {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = &m[i][col] / &m[r][col];
                for j in 0..4 {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

fn rank_mod(rows: &[[i64; 4]], p: u64) -> usize {
    let pi = p as i64;
    let mut m: Vec<[u64; 4]> = rows
        .iter()
        .map(|r| {
            let mut o = [0u64; 4];
            for (o, &x) in o.iter_mut().zip(r.iter()) {
                *o = x.rem_euclid(pi) as u64;
            }
            o
        })
        .collect();
    let mut r = 0;
    for col in 0..4 {
        let Some(piv) = (r..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = pow_mod(m[r][col], p - 2, p);
        for i in 0..m.len() {
            if i != r && m[i][col] != 0 {
                let f = m[i][col] * inv % p;
                for j in 0..4 {
                    m[i][j] = (m[i][j] + p * p - f * m[r][j] % p) % p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Solves `A x = b` over Q for a square invertible `A` (rows given).
pub fn solve_q<const N: usize>(a: [[Q; N]; N], b: [Q; N]) -> Option<[Q; N]> {
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, bi)| {
            let mut r = row.to_vec();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..N {
        let piv = (col..N).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for j in 0..=N {
            m[col][j] = &m[col][j] * &inv;
        }
        for i in 0..N {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..=N {
                    let t = &f * &m[col][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    let mut x: [Q; N] = std::array::from_fn(|_| Q::zero());
    for (i, xi) in x.iter_mut().enumerate() {
        *xi = m[i][N].clone();
    }
    Some(x)
}

/// Squarefree kernel of a nonzero rational: the squarefree integer with the
/// same square class.
pub fn squarefree_part(x: &Q) -> i64 {
    assert!(!x.is_zero(), "squarefree part of zero");
    let n = x.numer() * x.denom();
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut n: u128 = n.abs().try_into().expect("value fits in u128");
    let mut out: i64 = 1;
    let mut k: u128 = 2;
    while k * k <= n {
        let mut e = 0;
        while n % k == 0 {
            n /= k;
            e += 1;
        }
        if e % 2 == 1 {
            out *= k as i64;
        }
        k += 1;
    }
    if n > 1 {
        out *= n as i64;
    }
    sign * out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_orthogonal() {
        let a = [1, 2, 0, -1];
        let b = [0, 1, 1, 3];
        let c = [2, 0, 1, 1];
        let v = kernel3(&a, &b, &c);
        for r in [a, b, c] {
            assert_eq!(r.iter().zip(v.iter()).map(|(&x, &y)| x as i128 * y).sum::<i128>(), 0);
        }
        assert_eq!(kernel3(&a, &a, &c), [0; 4]);
    }

    #[test]
    fn ranks() {
        let rows = [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0]];
        assert_eq!(rank(&rows, None), 2);
        assert_eq!(rank(&[[1, 2, 0, 0], [3, 1, 0, 0]], Some(5)), 1);
        assert_eq!(rank(&[[1, 2, 0, 0], [3, 1, 0, 0]], None), 2);
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(&qr(-9, 4)), -1);
        assert_eq!(squarefree_part(&qr(8, 3)), 6);
        assert_eq!(squarefree_part(&q(63)), 7);
    }

    #[test]
    fn normalization() {
        let (w, k) = normalize_q(&[qr(-1, 2), q(1), q(0)]);
        assert_eq!(w, [1, -2, 0]);
        assert_eq!(k, qr(-1, 2));
    }
}
