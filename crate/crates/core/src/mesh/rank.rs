use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::BoundaryOperator;

/// The Mersenne prime 2⁶¹ − 1.
pub const MODULAR_PRIME: u64 = (1 << 61) - 1;

/// How a Betti vector's ranks were computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RankMethod {
    /// Fraction-free integer elimination: the rank over ℚ, exactly.
    ExactRational,
    /// Elimination over 𝔽_p. Equals the rational rank unless p divides every maximal
    /// nonzero minor; flagged because it is not a proof.
    Modular { prime: u64 },
}

/// Rank over ℚ of an integer boundary matrix, by column reduction on the lowest pivot.
pub fn rank_exact(b: &BoundaryOperator) -> usize {
    let mut pivots: HashMap<usize, Vec<(usize, BigInt)>> = HashMap::new();
    for col in &b.columns {
        let mut v: Vec<(usize, BigInt)> = col.iter().map(|&(i, s)| (i, BigInt::from(s))).collect();
        v.sort_by_key(|e| e.0);
        while let Some((low, a)) = v.last().cloned() {
            match pivots.get(&low) {
                Some(p) => {
                    let c = &p.last().unwrap().1;
                    // v <- c*v - a*p, which cancels the entry at `low`.
                    v = combine(&v, c, p, &a);
                    normalize(&mut v);
                }
                None => {
                    pivots.insert(low, v);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn combine(v: &[(usize, BigInt)], c: &BigInt, p: &[(usize, BigInt)], a: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(v.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < p.len() {
        let take_v = j >= p.len() || (i < v.len() && v[i].0 < p[j].0);
        let take_p = i >= v.len() || (j < p.len() && p[j].0 < v[i].0);
        let (idx, val) = if take_v {
            i += 1;
            (v[i - 1].0, c * &v[i - 1].1)
        } else if take_p {
            j += 1;
            (p[j - 1].0, -(a * &p[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (v[i - 1].0, c * &v[i - 1].1 - a * &p[j - 1].1)
        };
        if !val.is_zero() {
            out.push((idx, val));
        }
    }
    out
}

fn normalize(v: &mut [(usize, BigInt)]) {
    let mut g = BigInt::zero();
    for (_, x) in v.iter() {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    let g = g.abs();
    for (_, x) in v.iter_mut() {
        *x = &*x / &g;
    }
}

/// Rank over 𝔽_p with p = [`MODULAR_PRIME`].
pub fn rank_modular(b: &BoundaryOperator) -> usize {
    let p = MODULAR_PRIME;
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for col in &b.columns {
        let mut v: Vec<(usize, u64)> = col
            .iter()
            .map(|&(i, s)| (i, if s > 0 { s as u64 } else { p - (-s) as u64 }))
            .collect();
        v.sort_by_key(|e| e.0);
        while let Some(&(low, a)) = v.last() {
            match pivots.get(&low) {
                Some(piv) => {
                    // Pivot rows are stored monic at their lowest entry.
                    let factor = a;
                    let mut out = Vec::with_capacity(v.len() + piv.len());
                    let (mut i, mut j) = (0, 0);
                    while i < v.len() || j < piv.len() {
                        let (idx, val) = if j >= piv.len() || (i < v.len() && v[i].0 < piv[j].0) {
                            i += 1;
                            (v[i - 1].0, v[i - 1].1)
                        } else if i >= v.len() || piv[j].0 < v[i].0 {
                            j += 1;
                            (piv[j - 1].0, submod(0, mulmod(factor, piv[j - 1].1, p), p))
                        } else {
                            i += 1;
                            j += 1;
                            (v[i - 1].0, submod(v[i - 1].1, mulmod(factor, piv[j - 1].1, p), p))
                        };
                        if val != 0 {
                            out.push((idx, val));
                        }
                    }
                    v = out;
                }
                None => {
                    let inv = powmod(a, p - 2, p);
                    v.iter_mut().for_each(|e| e.1 = mulmod(e.1, inv, p));
                    pivots.insert(low, v);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}
