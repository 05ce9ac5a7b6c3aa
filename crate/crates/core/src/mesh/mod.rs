//! Simplicial complexes for cone links: faces, boundary operators and real Betti numbers.

pub mod generators;
mod rank;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

pub use generators::MeshSpec;
pub use rank::{rank_exact, rank_modular, RankMethod, MODULAR_PRIME};

/// Above this many simplices, ranks are computed modulo a large prime instead of over ℚ.
pub const EXACT_RANK_LIMIT: usize = 20_000;

/// JSON form of a mesh. Lower-dimensional faces are generated on load.
///
/// `periods[c]`, when present and non-null, makes coordinate `c` periodic; edge vectors
/// are then taken by the minimum-image rule. This is how flat tori are represented.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeshDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_vertices: Option<usize>,
    pub simplices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<Vec<Option<f64>>>,
}

/// An oriented closed pseudomanifold; orientation of every simplex is its sorted vertex order.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    dim: usize,
    num_vertices: usize,
    coords: Option<Vec<Vec<f64>>>,
    periods: Option<Vec<Option<f64>>>,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

/// Integer boundary matrix `∂_k`: rows are (k−1)-simplices, columns are k-simplices.
#[derive(Clone, Debug)]
pub struct BoundaryOperator {
    pub k: usize,
    pub nrows: usize,
    pub ncols: usize,
    /// For each k-simplex, its `k+1` faces with signs.
    pub columns: Vec<Vec<(usize, i8)>>,
}

impl BoundaryOperator {
    pub fn to_csr(&self) -> CsrMatrix {
        let t: Vec<_> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, s)| (i, j, s as f64)))
            .collect();
        CsrMatrix::from_triplets(self.nrows, self.ncols, &t)
    }

    /// Checks `self ∘ next = 0` in exact integer arithmetic, where `next = ∂_{k+1}`.
    pub fn composes_to_zero(&self, next: &BoundaryOperator) -> bool {
        assert_eq!(next.nrows, self.ncols);
        next.columns.iter().all(|col| {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(mid, s) in col {
                for &(row, t) in &self.columns[mid] {
                    *acc.entry(row).or_insert(0) += (s as i64) * (t as i64);
                }
            }
            acc.values().all(|&v| v == 0)
        })
    }
}

/// Real Betti numbers together with how the ranks were obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub values: Vec<usize>,
    pub method: RankMethod,
}

impl BettiVector {
    pub fn euler_characteristic(&self) -> i64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    /// Whether `b_q = b_{dim−q}` for all q.
    pub fn satisfies_poincare_duality(&self) -> bool {
        let n = self.values.len();
        (0..n).all(|q| self.values[q] == self.values[n - 1 - q])
    }
}

/// Outcome of the Betti condition `b_{n−2} = 0 or b_{n−1} = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BettiHypothesis {
    HoldsViaNMinus2,
    HoldsViaNMinus1,
    HoldsViaBoth,
    Fails,
}

impl BettiHypothesis {
    pub fn holds(self) -> bool {
        self != BettiHypothesis::Fails
    }
}

/// Reads `b[n−2]` and `b[n−1]` of a cone link of complex dimension `n`.
pub fn check_betti_hypothesis(b: &[usize], n: usize) -> Result<BettiHypothesis> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "complex dimension n = {n} < 2: the Betti condition is vacuous"
        )));
    }
    if b.len() < n {
        return Err(Error::InvalidArgument(format!(
            "Betti vector has length {} but n = {n} needs at least {n} entries",
            b.len()
        )));
    }
    Ok(match (b[n - 2] == 0, b[n - 1] == 0) {
        (true, true) => BettiHypothesis::HoldsViaBoth,
        (true, false) => BettiHypothesis::HoldsViaNMinus2,
        (false, true) => BettiHypothesis::HoldsViaNMinus1,
        (false, false) => BettiHypothesis::Fails,
    })
}

impl SimplicialComplex {
    /// Builds a complex from its top-dimensional simplices, generating all faces and
    /// validating the closed-pseudomanifold condition.
    pub fn from_top_simplices(
        dim: usize,
        num_vertices: usize,
        tops: &[Vec<usize>],
        coords: Option<Vec<Vec<f64>>>,
        periods: Option<Vec<Option<f64>>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("link dimension must be at least 1".into()));
        }
        if let Some(c) = &coords {
            if c.len() != num_vertices {
                return Err(Error::Parse(format!(
                    "{} coordinate rows for {num_vertices} vertices",
                    c.len()
                )));
            }
            let width = c.first().map(Vec::len).unwrap_or(0);
            if c.iter().any(|row| row.len() != width) {
                return Err(Error::Parse("vertex coordinate rows have unequal lengths".into()));
            }
            if let Some(p) = &periods {
                if p.len() != width {
                    return Err(Error::Parse(format!(
                        "periods has {} entries but coordinates have {width}",
                        p.len()
                    )));
                }
            }
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut top_sorted = Vec::with_capacity(tops.len());
        for (index, s) in tops.iter().enumerate() {
            if s.len() != dim + 1 {
                return Err(Error::InvalidSimplex {
                    index,
                    simplex: s.clone(),
                    reason: format!("expected {} vertices", dim + 1),
                });
            }
            if let Some(&v) = s.iter().find(|&&v| v >= num_vertices) {
                return Err(Error::InvalidSimplex {
                    index,
                    simplex: s.clone(),
                    reason: format!("vertex {v} out of range"),
                });
            }
            let mut t = s.clone();
            t.sort_unstable();
            if t.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::DegenerateSimplex {
                    index,
                    simplex: s.clone(),
                    volume: 0.0,
                });
            }
            if !seen.insert(t.clone()) {
                return Err(Error::DuplicateSimplex(t));
            }
            top_sorted.push(t);
        }
        let mut levels: Vec<HashSet<Vec<usize>>> = vec![HashSet::new(); dim + 1];
        for t in &top_sorted {
            for mask in 1u32..(1u32 << (dim + 1)) {
                let face: Vec<usize> = (0..=dim).filter(|i| mask & (1 << i) != 0).map(|i| t[i]).collect();
                levels[face.len() - 1].insert(face);
            }
        }
        let used: usize = levels[0].len();
        if used != num_vertices {
            return Err(Error::Parse(format!(
                "{} of {num_vertices} vertices are not used by any simplex",
                num_vertices - used
            )));
        }
        let simplices: Vec<Vec<Vec<usize>>> = levels
            .into_iter()
            .map(|set| {
                let mut v: Vec<_> = set.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        let index: Vec<HashMap<Vec<usize>, usize>> = simplices
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let complex = Self {
            dim,
            num_vertices,
            coords,
            periods,
            simplices,
            index,
        };
        complex.check_pseudomanifold()?;
        Ok(complex)
    }

    pub fn from_document(doc: &MeshDocument) -> Result<Self> {
        let n = match (&doc.vertices, doc.num_vertices) {
            (Some(v), Some(n)) if v.len() != n => {
                return Err(Error::Parse(format!("num_vertices = {n} but {} vertex rows", v.len())))
            }
            (Some(v), _) => v.len(),
            (None, Some(n)) => n,
            (None, None) => doc.simplices.iter().flatten().map(|&v| v + 1).max().unwrap_or(0),
        };
        Self::from_top_simplices(doc.dim, n, &doc.simplices, doc.vertices.clone(), doc.periods.clone())
    }

    /// Parses and validates a mesh JSON document.
    pub fn load_mesh(json: &str) -> Result<Self> {
        let doc: MeshDocument = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn to_document(&self) -> MeshDocument {
        MeshDocument {
            dim: self.dim,
            vertices: self.coords.clone(),
            num_vertices: if self.coords.is_none() { Some(self.num_vertices) } else { None },
            simplices: self.simplices[self.dim].clone(),
            periods: self.periods.clone(),
        }
    }

    fn check_pseudomanifold(&self) -> Result<()> {
        let facets = &self.simplices[self.dim - 1];
        let mut count = vec![0usize; facets.len()];
        for t in &self.simplices[self.dim] {
            for skip in 0..=self.dim {
                let f: Vec<usize> = face_without(t, skip);
                count[self.index[self.dim - 1][&f]] += 1;
            }
        }
        if let Some((i, &c)) = count.iter().enumerate().find(|(_, &c)| c != 2) {
            return Err(Error::NonManifold {
                facet: facets[i].clone(),
                cofaces: c,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        &self.simplices[k]
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn face_counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn total_simplices(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn simplex_index(&self, k: usize, simplex: &[usize]) -> Option<usize> {
        self.index.get(k)?.get(simplex).copied()
    }

    pub fn coordinates(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn periods(&self) -> Option<&[Option<f64>]> {
        self.periods.as_deref()
    }

    /// Multiplies all coordinates (and periods) by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        if let Some(c) = &mut out.coords {
            c.iter_mut().flatten().for_each(|x| *x *= s);
        }
        if let Some(p) = &mut out.periods {
            p.iter_mut().flatten().for_each(|x| *x *= s);
        }
        out
    }

    /// Edge vectors `v_i − v_0` of a simplex, using minimum-image wrapping on periodic axes.
    pub fn edge_vectors(&self, simplex: &[usize]) -> Result<Vec<Vec<f64>>> {
        let coords = self.coords.as_ref().ok_or(Error::MissingCoordinates)?;
        let base = &coords[simplex[0]];
        Ok(simplex[1..]
            .iter()
            .map(|&v| {
                coords[v]
                    .iter()
                    .zip(base)
                    .enumerate()
                    .map(|(c, (x, x0))| {
                        let mut d = x - x0;
                        if let Some(Some(p)) = self.periods.as_ref().map(|p| p[c]) {
                            d -= p * (d / p).round();
                        }
                        d
                    })
                    .collect()
            })
            .collect())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(k, s)| if k % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    /// `∂_k` for `1 ≤ k ≤ dim`.
    pub fn boundary(&self, k: usize) -> Result<BoundaryOperator> {
        if k == 0 || k > self.dim {
            return Err(Error::DegreeOutOfRange { degree: k, max: self.dim });
        }
        let columns = self.simplices[k]
            .iter()
            .map(|s| {
                (0..=k)
                    .map(|i| {
                        let f = face_without(s, i);
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        (self.index[k - 1][&f], sign)
                    })
                    .collect()
            })
            .collect();
        Ok(BoundaryOperator {
            k,
            nrows: self.count(k - 1),
            ncols: self.count(k),
            columns,
        })
    }

    /// Coboundary `d_k = ∂_{k+1}ᵀ` from k-cochains to (k+1)-cochains, for `0 ≤ k < dim`.
    pub fn coboundary(&self, k: usize) -> Result<CsrMatrix> {
        Ok(self.boundary(k + 1)?.to_csr().transpose())
    }

    /// Real Betti numbers `b_0..b_dim`.
    pub fn betti(&self) -> BettiVector {
        let modular = self.total_simplices() > EXACT_RANK_LIMIT;
        let mut ranks = vec![0usize; self.dim + 2];
        for k in 1..=self.dim {
            let b = self.boundary(k).expect("degree in range");
            ranks[k] = if modular { rank_modular(&b) } else { rank_exact(&b) };
        }
        let values = (0..=self.dim)
            .map(|k| self.count(k) - ranks[k] - ranks[k + 1])
            .collect();
        BettiVector {
            values,
            method: if modular {
                RankMethod::Modular { prime: MODULAR_PRIME }
            } else {
                RankMethod::ExactRational
            },
        }
    }

    /// The same complex with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        assert_eq!(perm.len(), self.num_vertices);
        let tops: Vec<Vec<usize>> = self.simplices[self.dim]
            .iter()
            .map(|s| s.iter().map(|&v| perm[v]).collect())
            .collect();
        let coords = self.coords.as_ref().map(|c| {
            let mut out = vec![Vec::new(); c.len()];
            for (v, row) in c.iter().enumerate() {
                out[perm[v]] = row.clone();
            }
            out
        });
        Self::from_top_simplices(self.dim, self.num_vertices, &tops, coords, self.periods.clone())
    }
}

fn face_without(s: &[usize], skip: usize) -> Vec<usize> {
    s.iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, &v)| v)
        .collect()
}
