use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::levi::Hermitian;
use crate::error::{Error, Result};

/// A real function on `ℂ^m` with first and complex second derivatives.
pub trait Potential: Send + Sync {
    fn m(&self) -> usize;
    fn value(&self, z: &[Complex64]) -> f64;
    /// `∂f/∂z_a`; for real `f`, `∂f/∂z̄_a` is its conjugate.
    fn dz(&self, z: &[Complex64]) -> Vec<Complex64>;
    fn levi(&self, z: &[Complex64]) -> Hermitian;

    /// Euclidean norm of the real gradient on `ℝ^{2m}`, `2|∂f/∂z|`.
    fn gradient_norm(&self, z: &[Complex64]) -> f64 {
        2.0 * self.dz(z).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `c · z^a · z̄^b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coefficient: Complex64,
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
}

impl Monomial {
    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut v = self.coefficient;
        for (a, za) in z.iter().enumerate() {
            if self.z[a] > 0 {
                v *= za.powu(self.z[a]);
            }
            if self.zbar[a] > 0 {
                v *= za.conj().powu(self.zbar[a]);
            }
        }
        v
    }

    /// `∂/∂z_a` (`holo = true`) or `∂/∂z̄_a`.
    fn derive(&self, a: usize, holo: bool) -> Option<Monomial> {
        let e = if holo { self.z[a] } else { self.zbar[a] };
        if e == 0 {
            return None;
        }
        let mut out = self.clone();
        out.coefficient *= e as f64;
        if holo {
            out.z[a] -= 1;
        } else {
            out.zbar[a] -= 1;
        }
        Some(out)
    }
}

/// `f = Re Σ c · z^a z̄^b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    m: usize,
    terms: Vec<Monomial>,
}

/// Coefficient given as a real number or a `[re, im]` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

/// Potential file: a monomial dictionary such as `{"z1 zbar1": 1.0, "z1^2": 0.15}` (the real
/// part of the sum is taken), or a grid of samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialDocument {
    Grid { grid: serde_json::Value },
    Monomials(BTreeMap<String, Coefficient>),
}

fn parse_factor(tok: &str) -> Result<(bool, usize, u32)> {
    let bad = || Error::InvalidArgument(format!("cannot parse monomial factor `{tok}`"));
    let (var, pow) = match tok.split_once('^') {
        Some((v, p)) => (v, p.parse::<u32>().map_err(|_| bad())?),
        None => (tok, 1),
    };
    let (holo, idx) = if let Some(i) = var.strip_prefix("zbar") {
        (false, i)
    } else if let Some(i) = var.strip_prefix('z') {
        (true, i)
    } else {
        return Err(bad());
    };
    let idx: usize = idx.parse().map_err(|_| bad())?;
    if idx == 0 {
        return Err(bad());
    }
    Ok((holo, idx - 1, pow))
}

impl Polynomial {
    pub fn new(m: usize, terms: Vec<Monomial>) -> Result<Self> {
        if terms.iter().any(|t| t.z.len() != m || t.zbar.len() != m) {
            return Err(Error::InvalidArgument("monomial arity does not match the dimension".into()));
        }
        Ok(Self { m, terms })
    }

    /// Parses a monomial key such as `"z1 zbar1"`, `"z1^2"` or `"1"`.
    pub fn from_dictionary(m: usize, dict: &BTreeMap<String, Coefficient>) -> Result<Self> {
        let mut terms = Vec::with_capacity(dict.len());
        for (key, coef) in dict {
            let coefficient = match *coef {
                Coefficient::Real(r) => Complex64::new(r, 0.0),
                Coefficient::Complex([re, im]) => Complex64::new(re, im),
            };
            let mut t = Monomial {
                coefficient,
                z: vec![0; m],
                zbar: vec![0; m],
            };
            for tok in key.split(|c: char| c.is_whitespace() || c == '*').filter(|s| !s.is_empty()) {
                if tok == "1" {
                    continue;
                }
                let (holo, a, pow) = parse_factor(tok)?;
                if a >= m {
                    return Err(Error::InvalidArgument(format!("variable in `{key}` exceeds dimension {m}")));
                }
                if holo {
                    t.z[a] += pow;
                } else {
                    t.zbar[a] += pow;
                }
            }
            terms.push(t);
        }
        Self::new(m, terms)
    }

    pub fn from_document(m: usize, doc: &PotentialDocument) -> Result<Self> {
        match doc {
            PotentialDocument::Monomials(d) => Self::from_dictionary(m, d),
            PotentialDocument::Grid { .. } => Err(Error::InvalidArgument(
                "grid-sampled potentials are not supported; give a monomial dictionary".into(),
            )),
        }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    fn sum(&self, z: &[Complex64], f: impl Fn(&Monomial) -> Option<Monomial>) -> Complex64 {
        self.terms.iter().filter_map(f).map(|t| t.eval(z)).sum()
    }
}

impl Potential for Polynomial {
    fn m(&self) -> usize {
        self.m
    }

    fn value(&self, z: &[Complex64]) -> f64 {
        self.sum(z, |t| Some(t.clone())).re
    }

    fn dz(&self, z: &[Complex64]) -> Vec<Complex64> {
        // ∂f/∂z_a = ½(∂_a P + conj(∂̄_a P)).
        (0..self.m)
            .map(|a| 0.5 * (self.sum(z, |t| t.derive(a, true)) + self.sum(z, |t| t.derive(a, false)).conj()))
            .collect()
    }

    fn levi(&self, z: &[Complex64]) -> Hermitian {
        // L_ab = ½(∂_a ∂̄_b P + conj(∂̄_a ∂_b P)).
        let mut l = Hermitian::zeros(self.m);
        for a in 0..self.m {
            for b in 0..self.m {
                let x = self.sum(z, |t| t.derive(a, true).and_then(|u| u.derive(b, false)));
                let y = self.sum(z, |t| t.derive(a, false).and_then(|u| u.derive(b, true)));
                l.set(a, b, 0.5 * (x + y.conj()));
            }
        }
        l
    }
}
