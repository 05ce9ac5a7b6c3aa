//! Singularity records, a JSON registry, and the hypothesis checkers built on them.

mod predicates;

pub use predicates::{bott_vanishes, du_bois_level, minimal_exponent, BottQuery};

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::generators::MeshSpec;
use crate::mesh::{check_betti_hypothesis, BettiHypothesis, RankMethod, SimplicialComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityKind {
    WeightedHomogeneousHypersurface,
    ToricFanoCone,
    Odp,
    CustomLink,
}

/// Where a Betti vector came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum BettiProvenance {
    /// Computed from boundary ranks of the named link mesh.
    Mesh { mesh: String, method: RankMethod },
    /// A known closed form, with the reasoning that produces it.
    ClosedForm { formula: String },
}

/// Real Betti numbers `b_0, …, b_{2n−1}` of the link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiEntry {
    pub values: Vec<usize>,
    pub provenance: BettiProvenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityRecord {
    pub name: String,
    pub kind: SingularityKind,
    /// Complex dimension of the singularity; the link has real dimension `2n − 1`.
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u64>,
    /// A generator string (see [`MeshSpec`]) or a mesh JSON path relative to the registry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_mesh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betti: Option<BettiEntry>,
    /// Whether `H¹(U∖{vx}, Ω^{n−2})` is known to be nonzero (only nonvanishing is recorded).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_h1_nonzero: Option<bool>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

impl SingularityRecord {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Catalog(format!("record `{}`: {msg}", self.name)));
        if self.name.trim().is_empty() {
            return Err(Error::Catalog("record without a name".into()));
        }
        if self.n < 1 {
            return bad("dimension n must be at least 1".into());
        }
        if let Some(w) = &self.weights {
            if w.len() != self.n as usize + 1 {
                return bad(format!("{} weights given, n + 1 = {} expected", w.len(), self.n + 1));
            }
        }
        match self.kind {
            SingularityKind::WeightedHomogeneousHypersurface | SingularityKind::Odp => {
                let (Some(w), Some(d)) = (&self.weights, self.degree) else {
                    return bad("hypersurface records need weights and a degree".into());
                };
                minimal_exponent(w, d).map_err(|e| Error::Catalog(format!("record `{}`: {e}", self.name)))?;
                if self.kind == SingularityKind::Odp && (d != 2 || w.iter().any(|&x| x != 1)) {
                    return bad("an ordinary double point has unit weights and degree 2".into());
                }
            }
            SingularityKind::ToricFanoCone | SingularityKind::CustomLink => {}
        }
        if let Some(b) = &self.betti {
            if b.values.len() != 2 * self.n as usize {
                return bad(format!(
                    "Betti vector has {} entries; a link of real dimension {} needs {}",
                    b.values.len(),
                    2 * self.n - 1,
                    2 * self.n
                ));
            }
        }
        Ok(())
    }

    /// `α = Σw/d` for records with weights.
    pub fn minimal_exponent(&self) -> Option<Result<Ratio<u64>>> {
        match (&self.weights, self.degree) {
            (Some(w), Some(d)) => Some(minimal_exponent(w, d)),
            _ => None,
        }
    }

    /// Loads the link mesh from a generator string or a file under `base`.
    pub fn load_link_mesh(&self, base: Option<&Path>) -> Result<Option<SimplicialComplex>> {
        let Some(link) = &self.link_mesh else {
            return Ok(None);
        };
        if let Ok(spec) = link.parse::<MeshSpec>() {
            return spec.build().map(Some);
        }
        let path = base.map_or_else(|| PathBuf::from(link), |b| b.join(link));
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        SimplicialComplex::load_mesh(&text).map(Some)
    }

    /// Stored Betti numbers, or ones computed from the link mesh.
    pub fn resolve_betti(&self, base: Option<&Path>) -> Result<BettiEntry> {
        if let Some(b) = &self.betti {
            return Ok(b.clone());
        }
        let Some(mesh) = self.load_link_mesh(base)? else {
            return Err(Error::Catalog(format!(
                "record `{}` has no Betti data; add a link mesh (generator string or mesh JSON path)",
                self.name
            )));
        };
        if mesh.dim() != 2 * self.n as usize - 1 {
            return Err(Error::Catalog(format!(
                "record `{}`: link mesh has dimension {} but n = {} needs {}",
                self.name,
                mesh.dim(),
                self.n,
                2 * self.n - 1
            )));
        }
        let b = mesh.betti();
        Ok(BettiEntry {
            values: b.values,
            provenance: BettiProvenance::Mesh {
                mesh: self.link_mesh.clone().unwrap_or_default(),
                method: b.method,
            },
        })
    }
}

/// Verdict of the Betti condition `b_{n−2} = 0 or b_{n−1} = 0` on the regular locus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem12Verdict {
    pub hypothesis: BettiHypothesis,
    pub holds: bool,
    pub betti: BettiEntry,
    pub claim: String,
}

/// The regular locus of a cone retracts onto its link, so the condition is read off the link's
/// Betti numbers.
pub fn theorem12_hypothesis(rec: &SingularityRecord, base: Option<&Path>) -> Result<Theorem12Verdict> {
    let betti = rec.resolve_betti(base)?;
    let n = rec.n as usize;
    let hypothesis = check_betti_hypothesis(&betti.values, n)?;
    let claim = match rec.kind {
        SingularityKind::Odp if n >= 3 => {
            "the link of an ordinary double point has b_{n-2} = 0 for n >= 3".to_string()
        }
        _ => "b_{n-2}(C_reg) = 0 or b_{n-1}(C_reg) = 0".to_string(),
    };
    Ok(Theorem12Verdict {
        hypothesis,
        holds: hypothesis.holds(),
        betti,
        claim,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem13Flag {
    Satisfied,
    Violated,
    Unknown,
}

/// A Bott-predicate evaluation used in the supporting argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BottEvidence {
    pub query: BottQuery,
    pub group: String,
    pub vanishes: bool,
}

impl BottEvidence {
    fn of(q: BottQuery) -> Self {
        Self {
            group: q.to_string(),
            vanishes: bott_vanishes(&q),
            query: q,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem13Verdict {
    pub flag: Theorem13Flag,
    /// Statement the flag rests on.
    pub claim: String,
    pub evidence: Vec<BottEvidence>,
}

/// Looks up whether `H²_{X_sing}(X, Ω^{n−2}) = 0` is known for the record's family. Only toric
/// Fano cones with `n ≥ 5` (satisfied) and ordinary double points with `n ≥ 3` (violated) are
/// settled; everything else is `Unknown`.
pub fn theorem13_flag(rec: &SingularityRecord) -> Theorem13Verdict {
    let n = rec.n;
    match rec.kind {
        SingularityKind::ToricFanoCone if n >= 5 => {
            // Bott vanishing on the base, modelled by ℙ^{n−1}: H^q(Ω^p(k)) = 0 for q ≥ 1, k ≥ 1.
            let y = n - 1;
            let evidence = (1..=y)
                .flat_map(|q| (0..=y).flat_map(move |p| (1..=2).map(move |k| (p, q, k))))
                .map(|(p, q, k)| BottEvidence::of(BottQuery::new(y, p, q, k).expect("p, q ≤ y")))
                .collect();
            Theorem13Verdict {
                flag: Theorem13Flag::Satisfied,
                claim: "H^1(U - {vx}, Omega^{n-2}) = 0 for toric Fano cones with n >= 5, by Bott vanishing on the toric base"
                    .into(),
                evidence,
            }
        }
        SingularityKind::Odp if n >= 3 => {
            let evidence = if n >= 4 {
                // The quadric Y ⊂ ℙ^n: the two vanishings feeding H¹(Y, Ω^{n−2}_Y(n−3)) ≠ 0, then
                // H^{n−1}(ℙ^n, Ω²(k)) and H^n(ℙ^n, Ω²(k − 2)) for small k ≥ 0.
                let mut ev = vec![
                    BottEvidence::of(BottQuery::new(n, n - 1, 1, n as i64 - 3).expect("valid")),
                    BottEvidence::of(BottQuery::new(n, n - 1, 0, n as i64 - 1).expect("valid")),
                ];
                for k in 0..=3 {
                    ev.push(BottEvidence::of(BottQuery::new(n, 2, n - 1, k).expect("valid")));
                    ev.push(BottEvidence::of(BottQuery::new(n, 2, n, k - 2).expect("valid")));
                }
                ev
            } else {
                Vec::new()
            };
            Theorem13Verdict {
                flag: Theorem13Flag::Violated,
                claim: "H^1(U - {vx}, Omega^{n-2}) is nonzero for an ordinary double point with n >= 3".into(),
                evidence,
            }
        }
        _ => Theorem13Verdict {
            flag: Theorem13Flag::Unknown,
            claim: "no known result settles H^2_{X_sing}(X, Omega^{n-2}) for this family".into(),
            evidence: Vec::new(),
        },
    }
}

/// Everything `catalog check` reports for one record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordCheck {
    pub name: String,
    pub kind: SingularityKind,
    pub n: u32,
    /// `Σw/d` as `"num/den"`.
    pub minimal_exponent: Option<String>,
    pub du_bois_level: Option<u64>,
    pub theorem12: Option<Theorem12Verdict>,
    /// Why the Betti condition could not be evaluated.
    pub theorem12_error: Option<String>,
    pub theorem13: Theorem13Verdict,
}

pub fn check_record(rec: &SingularityRecord, base: Option<&Path>) -> Result<RecordCheck> {
    rec.validate()?;
    let alpha = rec.minimal_exponent().transpose()?;
    let (theorem12, theorem12_error) = match theorem12_hypothesis(rec, base) {
        Ok(v) => (Some(v), None),
        Err(Error::Catalog(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    Ok(RecordCheck {
        name: rec.name.clone(),
        kind: rec.kind,
        n: rec.n,
        minimal_exponent: alpha.map(|a| format!("{}/{}", a.numer(), a.denom())),
        du_bois_level: alpha.and_then(du_bois_level),
        theorem12,
        theorem12_error,
        theorem13: theorem13_flag(rec),
    })
}

/// Real Betti numbers of the link of `z₁² + ⋯ + z_{n+1}²`, the unit tangent bundle of `S^n`:
/// rationally `S^{n−1} × S^n` for odd `n` and a rational homology sphere for even `n`.
pub fn odp_link_betti(n: u32) -> Vec<usize> {
    let n = n as usize;
    let mut b = vec![0; 2 * n];
    b[0] = 1;
    b[2 * n - 1] = 1;
    if n % 2 == 1 {
        b[n - 1] += 1;
        b[n] += 1;
    }
    b
}

fn binomial_row(d: usize) -> Vec<usize> {
    (0..=d).scan(1usize, |c, k| {
        let v = *c;
        *c = *c * (d - k) / (k + 1);
        Some(v)
    })
    .collect()
}

/// On-disk catalog, `catalog.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub records: Vec<SingularityRecord>,
}

impl Registry {
    /// The built-in records.
    pub fn builtin() -> Self {
        let mut records = Vec::new();
        for n in 2..=8u32 {
            records.push(SingularityRecord {
                name: format!("odp-{n}fold"),
                kind: SingularityKind::Odp,
                n,
                weights: Some(vec![1; n as usize + 1]),
                degree: Some(2),
                link_mesh: None,
                betti: Some(BettiEntry {
                    values: odp_link_betti(n),
                    provenance: BettiProvenance::ClosedForm {
                        formula: "link = unit tangent bundle of S^n: rationally S^{n-1} x S^n for odd n, a rational homology sphere for even n"
                            .into(),
                    },
                }),
                local_h1_nonzero: (n >= 3).then_some(true),
                description: format!("ordinary double point z_1^2 + ... + z_{}^2", n + 1),
            });
        }
        records.push(SingularityRecord {
            name: "t5-link-3fold".into(),
            kind: SingularityKind::CustomLink,
            n: 3,
            weights: None,
            degree: None,
            link_mesh: None,
            betti: Some(BettiEntry {
                values: binomial_row(5),
                provenance: BettiProvenance::ClosedForm {
                    formula: "Kunneth: b_k(T^5) = C(5, k)".into(),
                },
            }),
            local_h1_nonzero: None,
            description: "cone over the flat 5-torus".into(),
        });
        records.push(SingularityRecord {
            name: "s2xs3-link-3fold".into(),
            kind: SingularityKind::CustomLink,
            n: 3,
            weights: None,
            degree: None,
            link_mesh: Some("product(sphere(2),sphere(3))".into()),
            betti: None,
            local_h1_nonzero: None,
            description: "cone over S^2 x S^3, Betti numbers from the product mesh".into(),
        });
        records.push(SingularityRecord {
            name: "toric-fano-5fold".into(),
            kind: SingularityKind::ToricFanoCone,
            n: 5,
            weights: None,
            degree: None,
            link_mesh: None,
            betti: None,
            local_h1_nonzero: Some(false),
            description: "cone over a toric Fano 4-fold".into(),
        });
        records.push(SingularityRecord {
            name: "hypersurface-1112-d4".into(),
            kind: SingularityKind::WeightedHomogeneousHypersurface,
            n: 3,
            weights: Some(vec![1, 1, 1, 2]),
            degree: Some(4),
            link_mesh: None,
            betti: None,
            local_h1_nonzero: None,
            description: "weighted homogeneous hypersurface with w = (1,1,1,2), d = 4".into(),
        });
        Self { records }
    }

    fn validated(self) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &self.records {
            r.validate()?;
            if !seen.insert(r.name.as_str()) {
                return Err(Error::Catalog(format!("duplicate record name `{}`", r.name)));
            }
        }
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<Self>(text)?.validated()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// The registry at `path`, or the built-in records when the file does not exist.
    pub fn load_or_builtin(path: &Path) -> Result<Self> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok(Self::builtin())
        }
    }

    /// Writes the whole registry to a sibling temporary file and renames it over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |p: &Path| {
            let p = p.display().to_string();
            move |source| Error::Io { path: p, source }
        };
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(format!(".tmp{}", std::process::id()));
        let tmp = PathBuf::from(tmp);
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(&tmp, text).map_err(io(&tmp))?;
        std::fs::rename(&tmp, path).map_err(|e| {
            let _ = std::fs::remove_file(&tmp);
            io(path)(e)
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&SingularityRecord> {
        self.records.iter().find(|r| r.name == name).ok_or_else(|| {
            Error::Catalog(format!("no record named `{name}`; known: {}", self.names().join(", ")))
        })
    }

    /// Adds a record, replacing any record with the same name.
    pub fn insert(&mut self, rec: SingularityRecord) -> Result<()> {
        rec.validate()?;
        match self.records.iter_mut().find(|r| r.name == rec.name) {
            Some(slot) => *slot = rec,
            None => self.records.push(rec),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate_and_round_trip() {
        let reg = Registry::builtin();
        let text = serde_json::to_string(&reg).unwrap();
        assert_eq!(Registry::from_json(&text).unwrap(), reg);
        assert!(reg.get("odp-3fold").is_ok());
        assert!(matches!(reg.get("nope"), Err(Error::Catalog(_))));
    }

    #[test]
    fn odp_betti_closed_form() {
        assert_eq!(odp_link_betti(2), vec![1, 0, 0, 1]);
        assert_eq!(odp_link_betti(3), vec![1, 0, 1, 1, 0, 1]);
        for n in 2..=8 {
            let b = odp_link_betti(n);
            let chi: i64 = b.iter().enumerate().map(|(k, &v)| if k % 2 == 0 { v as i64 } else { -(v as i64) }).sum();
            assert_eq!(chi, 0, "odd-dimensional links have χ = 0");
        }
    }

    #[test]
    fn theorem12_examples() {
        let reg = Registry::builtin();
        for n in 3..=8 {
            let v = theorem12_hypothesis(reg.get(&format!("odp-{n}fold")).unwrap(), None).unwrap();
            assert!(v.holds);
            assert!(matches!(v.hypothesis, BettiHypothesis::HoldsViaNMinus2 | BettiHypothesis::HoldsViaBoth));
        }
        let t5 = theorem12_hypothesis(reg.get("t5-link-3fold").unwrap(), None).unwrap();
        assert_eq!(t5.betti.values, vec![1, 5, 10, 10, 5, 1]);
        assert!(!t5.holds);
        let s = theorem12_hypothesis(reg.get("s2xs3-link-3fold").unwrap(), None).unwrap();
        assert_eq!(s.betti.values, vec![1, 0, 1, 1, 0, 1]);
        assert_eq!(s.hypothesis, BettiHypothesis::HoldsViaNMinus2);
        assert!(matches!(s.betti.provenance, BettiProvenance::Mesh { .. }));
        assert!(matches!(theorem12_hypothesis(reg.get("toric-fano-5fold").unwrap(), None), Err(Error::Catalog(_))));
    }

    #[test]
    fn theorem13_examples() {
        let reg = Registry::builtin();
        let toric = theorem13_flag(reg.get("toric-fano-5fold").unwrap());
        assert_eq!(toric.flag, Theorem13Flag::Satisfied);
        assert!(!toric.evidence.is_empty() && toric.evidence.iter().all(|e| e.vanishes));
        let odp = theorem13_flag(reg.get("odp-4fold").unwrap());
        assert_eq!(odp.flag, Theorem13Flag::Violated);
        assert!(odp.evidence.iter().all(|e| e.vanishes));
        assert_eq!(theorem13_flag(reg.get("odp-2fold").unwrap()).flag, Theorem13Flag::Unknown);
        assert_eq!(theorem13_flag(reg.get("hypersurface-1112-d4").unwrap()).flag, Theorem13Flag::Unknown);
    }

    #[test]
    fn record_validation() {
        let mut rec = Registry::builtin().get("hypersurface-1112-d4").unwrap().clone();
        rec.weights = Some(vec![2, 2, 2, 4]);
        assert!(rec.validate().is_err());
        rec.weights = Some(vec![1, 1, 2]);
        assert!(rec.validate().is_err());
        let mut odp = Registry::builtin().get("odp-3fold").unwrap().clone();
        odp.degree = Some(3);
        assert!(odp.validate().is_err());
        let dup = Registry {
            records: vec![rec.clone(), rec],
        };
        assert!(Registry::from_json(&serde_json::to_string(&dup).unwrap()).is_err());
    }

    #[test]
    fn check_reports_exponent_and_level() {
        let reg = Registry::builtin();
        let c = check_record(reg.get("hypersurface-1112-d4").unwrap(), None).unwrap();
        assert_eq!(c.minimal_exponent.as_deref(), Some("5/4"));
        assert_eq!(c.du_bois_level, Some(0));
        assert!(c.theorem12.is_none() && c.theorem12_error.is_some());
        let c = check_record(reg.get("odp-4fold").unwrap(), None).unwrap();
        assert_eq!(c.minimal_exponent.as_deref(), Some("5/2"));
        assert_eq!(c.du_bois_level, Some(1));
    }

    #[test]
    fn save_is_atomic_replace() {
        let dir = std::env::temp_dir().join(format!("conelab-catalog-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("catalog.json");
        let mut reg = Registry::builtin();
        reg.save(&path).unwrap();
        let mut rec = reg.get("odp-3fold").unwrap().clone();
        rec.description = "edited".into();
        reg.insert(rec).unwrap();
        reg.save(&path).unwrap();
        let back = Registry::load(&path).unwrap();
        assert_eq!(back.get("odp-3fold").unwrap().description, "edited");
        assert_eq!(back.records.len(), Registry::builtin().records.len());
        let leftovers = std::fs::read_dir(&dir).unwrap().count();
        assert_eq!(leftovers, 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
