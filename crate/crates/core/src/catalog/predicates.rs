use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `α = (w₁ + ⋯ + w_{n+1}) / d` for a weighted homogeneous hypersurface with reduced weights.
pub fn minimal_exponent(weights: &[u64], degree: u64) -> Result<Ratio<u64>> {
    if weights.is_empty() {
        return Err(Error::Catalog("at least one weight is required".into()));
    }
    if weights.contains(&0) || degree == 0 {
        return Err(Error::Catalog("weights and degree must be positive integers".into()));
    }
    let g = weights.iter().fold(0u64, |g, &w| g.gcd(&w));
    if g != 1 {
        return Err(Error::Catalog(format!("weights {weights:?} have gcd {g}; the exponent is only defined for reduced weights")));
    }
    let sum = weights
        .iter()
        .try_fold(0u64, |s, &w| s.checked_add(w))
        .ok_or_else(|| Error::Catalog("weight sum overflows".into()))?;
    Ok(Ratio::new(sum, degree))
}

/// Largest `k ≥ 0` with `α ≥ k + 1`, i.e. `⌊α⌋ − 1`, or `None` when `α < 1`.
pub fn du_bois_level(alpha: Ratio<u64>) -> Option<u64> {
    alpha.to_integer().checked_sub(1)
}

/// `H^q(ℙ^n, Ω^p(k))` with `0 ≤ p, q ≤ n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottQuery {
    n: u32,
    p: u32,
    q: u32,
    k: i64,
}

impl BottQuery {
    pub fn new(n: u32, p: u32, q: u32, k: i64) -> Result<Self> {
        if p > n || q > n {
            return Err(Error::InvalidArgument(format!("Bott query needs 0 ≤ p, q ≤ n; got n={n}, p={p}, q={q}")));
        }
        Ok(Self { n, p, q, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    /// The Serre-dual query `(n, n − p, n − q, −k)`.
    pub fn serre_dual(&self) -> Self {
        Self {
            n: self.n,
            p: self.n - self.p,
            q: self.n - self.q,
            k: -self.k,
        }
    }
}

impl std::fmt::Display for BottQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "H^{}(P^{}, Omega^{}({}))", self.q, self.n, self.p, self.k)
    }
}

/// True when `H^q(ℙ^n, Ω^p(k)) = 0`: the group is nonzero only if `k = 0, p = q`, or
/// `q = 0, k > p`, or `q = n, k < p − n`.
pub fn bott_vanishes(b: &BottQuery) -> bool {
    let (n, p, q, k) = (b.n as i64, b.p as i64, b.q as i64, b.k);
    !((k == 0 && p == q) || (q == 0 && k > p) || (q == n && k < p - n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_exponent_examples() {
        for n in 1..=8u64 {
            assert_eq!(minimal_exponent(&vec![1; n as usize + 1], 2).unwrap(), Ratio::new(n + 1, 2));
        }
        assert_eq!(minimal_exponent(&[1, 1, 1, 1], 4).unwrap(), Ratio::from_integer(1));
        assert_eq!(minimal_exponent(&[1, 2, 3], 6).unwrap(), Ratio::from_integer(1));
        assert!(minimal_exponent(&[2, 4, 6], 12).is_err());
        assert!(minimal_exponent(&[1, 0], 2).is_err());
        assert!(minimal_exponent(&[1, 1], 0).is_err());
    }

    #[test]
    fn du_bois_examples() {
        assert_eq!(du_bois_level(Ratio::new(5, 2)), Some(1));
        assert_eq!(du_bois_level(Ratio::from_integer(1)), Some(0));
        assert_eq!(du_bois_level(Ratio::new(9, 10)), None);
        assert_eq!(du_bois_level(Ratio::from_integer(3)), Some(2));
    }

    #[test]
    fn bott_examples() {
        for n in 4..=10 {
            assert!(bott_vanishes(&BottQuery::new(n, n - 1, 1, n as i64 - 3).unwrap()));
            assert!(bott_vanishes(&BottQuery::new(n, n - 1, 0, n as i64 - 1).unwrap()));
        }
        assert!(!bott_vanishes(&BottQuery::new(3, 2, 2, 0).unwrap()));
        // H⁰(ℙ², O(1)) and H²(ℙ², O(−3)) are nonzero.
        assert!(!bott_vanishes(&BottQuery::new(2, 0, 0, 1).unwrap()));
        assert!(!bott_vanishes(&BottQuery::new(2, 0, 2, -3).unwrap()));
        assert!(bott_vanishes(&BottQuery::new(2, 0, 2, -2).unwrap()));
        assert!(BottQuery::new(3, 4, 0, 0).is_err());
    }
}
