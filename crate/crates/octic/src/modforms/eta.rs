//! q-expansions of Dedekind eta products ∏ η(m·z)^e.

use std::fmt;

use serde::Serialize;

use super::ModformError;

/// Largest supported expansion bound.
pub const ETA_BOUND: usize = 10_000;

/// ∏ η(m·z)^e over the listed `(m, e)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EtaProduct {
    pub factors: Vec<(u32, i32)>,
}

impl EtaProduct {
    pub fn new(factors: &[(u32, i32)]) -> Self {
        EtaProduct { factors: factors.to_vec() }
    }

    /// Σ m·e; the expansion starts at q^(Σ m·e / 24).
    pub fn order_times_24(&self) -> i64 {
        self.factors.iter().map(|&(m, e)| m as i64 * e as i64).sum()
    }

    /// Twice the weight, Σ e.
    pub fn twice_weight(&self) -> i64 {
        self.factors.iter().map(|&(_, e)| e as i64).sum()
    }
}

impl fmt::Display for EtaProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(m, e)| {
                let z = if m == 1 { "z".to_string() } else { format!("{m}z") };
                format!("eta({z})^{e}")
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Sparse expansion of ∏_k (1 − q^(m·k)) up to q^n via the pentagonal
/// number theorem: Σ_j (−1)^j q^(m·j(3j−1)/2).
fn euler_product_terms(m: usize, n: usize) -> Vec<(usize, i128)> {
    let mut out = vec![(0, 1)];
    for j in 1.. {
        let a = m * j * (3 * j - 1) / 2;
        if a > n {
            break;
        }
        let sign = if j % 2 == 1 { -1 } else { 1 };
        out.push((a, sign));
        let b = m * j * (3 * j + 1) / 2;
        if b <= n {
            out.push((b, sign));
        }
    }
    out
}

/// Coefficients a_0..a_n of the eta product.
///
/// Intermediate series of quotients grow quickly, so arithmetic is done in
/// Z/2^128 with wrapping operations. The map Z → Z/2^128 is a ring
/// homomorphism, and the final coefficients are tiny, so reading them back
/// as signed values is exact.
pub fn eta_expansion(src: &EtaProduct, n: usize) -> Result<Vec<i64>, ModformError> {
    if n > ETA_BOUND {
        return Err(ModformError::BoundTooLarge(n));
    }
    let ord = src.order_times_24();
    if ord % 24 != 0 {
        return Err(ModformError::NonIntegralExponent(ord));
    }
    let shift = ord / 24;
    if shift < 0 {
        return Err(ModformError::NegativeExponent(shift));
    }
    let mut s = vec![0i128; n + 1];
    s[0] = 1;
    for &(m, e) in &src.factors {
        let terms = euler_product_terms(m as usize, n);
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                for i in (0..=n).rev() {
                    let mut acc = 0i128;
                    for &(k, c) in &terms {
                        if k > i {
                            break;
                        }
                        acc = acc.wrapping_add(c.wrapping_mul(s[i - k]));
                    }
                    s[i] = acc;
                }
            } else {
                for i in 0..=n {
                    let mut acc = s[i];
                    for &(k, c) in terms.iter().skip(1) {
                        if k > i {
                            break;
                        }
                        acc = acc.wrapping_sub(c.wrapping_mul(s[i - k]));
                    }
                    s[i] = acc;
                }
            }
        }
    }
    let shift = shift as usize;
    let mut out = vec![0i64; n + 1];
    for i in shift..=n {
        out[i] = i64::try_from(s[i - shift]).map_err(|_| ModformError::BoundTooLarge(n))?;
    }
    Ok(out)
}
