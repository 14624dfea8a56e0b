//! Birational contraction of a negative-definite configuration of curves.
//!
//! The contraction is purely numerical: a set of curves on a smooth surface
//! whose Gram matrix is negative definite. Divisors on the target are
//! represented by divisors on the source with zero coefficient on every
//! contracted curve, and pulled back with Mumford's rule
//! `ψ*D = D + Σ a_j Γ_j`, `ψ*D · Γ_k = 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::divisor::QDivisor;
use crate::exactlin::{self, IntMatrix, LinAlgError, RatMatrix, Rational};
use crate::singularity::{chain_label, hirzebruch_jung, SingularPointReport};
use crate::surface::{Base, SurfaceError, SurfaceModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractionError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("`{0}` is not a tracked curve")]
    NotACurve(String),
    #[error("`{0}` is listed twice")]
    Duplicate(String),
    #[error(
        "not contractible (numerical criterion): the Gram matrix of {0:?} is not negative definite"
    )]
    NotContractible(Vec<String>),
    #[error("divisor has coefficient {coeff} on contracted curve `{name}`; pass a representative supported off the contracted locus")]
    SupportedOnContracted { name: String, coeff: Rational },
    #[error("target has Picard rank {0}, expected 1")]
    RankNotOne(usize),
    #[error("witness class has coefficient on contracted curve `{0}`")]
    WitnessContracted(String),
    #[error("witness class is numerically trivial")]
    TrivialWitness,
    #[error("unsupported configuration: component {component:?} is not a chain ({reason})")]
    UnsupportedConfiguration {
        component: Vec<String>,
        reason: String,
    },
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Classification of a surface pair by its minimal discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SingularityClass {
    Terminal,
    Canonical,
    Klt,
    Lc,
    NotLc,
}

impl SingularityClass {
    /// Thresholds: terminal `a > 0`, canonical `a ≥ 0`, klt `a > -1`, lc `a ≥ -1`.
    pub fn from_min_discrepancy(min: Option<&Rational>) -> Self {
        let Some(a) = min else {
            return SingularityClass::Terminal;
        };
        let minus_one = -Rational::one();
        if a.is_positive() {
            SingularityClass::Terminal
        } else if !a.is_negative() {
            SingularityClass::Canonical
        } else if *a > minus_one {
            SingularityClass::Klt
        } else if *a == minus_one {
            SingularityClass::Lc
        } else {
            SingularityClass::NotLc
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SingularityClass::Terminal => "terminal",
            SingularityClass::Canonical => "canonical",
            SingularityClass::Klt => "klt",
            SingularityClass::Lc => "lc",
            SingularityClass::NotLc => "not_lc",
        }
    }
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscrepancyReport {
    /// `a(Γ)` for each contracted curve, in contraction order.
    pub values: Vec<(String, Rational)>,
    pub minimum: Option<Rational>,
    pub class: SingularityClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroupReport {
    pub rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
}

impl fmt::Display for ClassGroupReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.rank)
            });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Class group of the quotient of the source lattice by the given rows.
pub fn quotient_class_group(lattice_rank: usize, relations: &[Vec<BigInt>]) -> ClassGroupReport {
    if relations.is_empty() {
        return ClassGroupReport {
            rank: lattice_rank,
            torsion: Vec::new(),
        };
    }
    let entries: Vec<BigInt> = relations.iter().flatten().cloned().collect();
    let m = IntMatrix::from_vec(relations.len(), lattice_rank, entries);
    let snf = exactlin::smith_normal_form(&m);
    ClassGroupReport {
        rank: lattice_rank - snf.rank(),
        torsion: snf.torsion(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NefReport {
    pub nef: bool,
    pub degrees: Vec<(String, Rational)>,
}

/// A validated contraction `ψ: S → T`.
#[derive(Debug, Clone)]
pub struct Contraction {
    source: SurfaceModel,
    contracted: Vec<String>,
    gram: RatMatrix,
    gram_inverse: RatMatrix,
    witness: QDivisor,
}

impl Contraction {
    /// Contracts the named curves of `model`.
    pub fn new(model: &SurfaceModel, names: &[&str]) -> Result<Self, ContractionError> {
        let mut contracted: Vec<String> = Vec::with_capacity(names.len());
        for &n in names {
            let d = model.divisor(n)?;
            if !d.is_curve {
                return Err(ContractionError::NotACurve(n.to_string()));
            }
            if contracted.iter().any(|c| c == n) {
                return Err(ContractionError::Duplicate(n.to_string()));
            }
            contracted.push(n.to_string());
        }
        let k = contracted.len();
        let mut gram = RatMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let v = model.pair(
                    model.class_of(&contracted[i])?,
                    model.class_of(&contracted[j])?,
                );
                gram[(i, j)] = Rational::from_integer(v);
            }
        }
        if !exactlin::is_negative_definite(&gram)? {
            return Err(ContractionError::NotContractible(contracted));
        }
        let gram_inverse = exactlin::inverse(&gram)?;
        Ok(Self {
            source: model.clone(),
            contracted,
            gram,
            gram_inverse,
            witness: default_witness(model),
        })
    }

    /// Replaces the witness curve class used for rank-one degrees.
    pub fn with_witness(mut self, witness: QDivisor) -> Result<Self, ContractionError> {
        witness.validate(&self.source)?;
        if let Some(n) = self
            .contracted
            .iter()
            .find(|n| !witness.coefficient(n).is_zero())
        {
            return Err(ContractionError::WitnessContracted(n.clone()));
        }
        if witness.total_class(&self.source)?.iter().all(Zero::is_zero) {
            return Err(ContractionError::TrivialWitness);
        }
        self.witness = witness;
        Ok(self)
    }

    pub fn source(&self) -> &SurfaceModel {
        &self.source
    }

    pub fn contracted(&self) -> &[String] {
        &self.contracted
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &RatMatrix {
        &self.gram_inverse
    }

    pub fn witness(&self) -> &QDivisor {
        &self.witness
    }

    pub fn is_contracted(&self, name: &str) -> bool {
        self.contracted.iter().any(|c| c == name)
    }

    /// Picard rank of the target.
    ///
    /// A negative-definite configuration has linearly independent classes,
    /// so this is `rank(S) - #contracted`.
    pub fn target_rank(&self) -> usize {
        self.source.rank() - self.contracted.len()
    }

    /// The canonical class of the source as a pure lattice class.
    pub fn canonical_source(&self) -> QDivisor {
        QDivisor::from_class(self.source.canonical_class().clone())
    }

    /// `K_T`, represented by `K_S` (which carries no named coefficients).
    pub fn canonical_target(&self) -> QDivisor {
        self.pushforward(&self.canonical_source())
    }

    fn check_off_contracted(&self, d: &QDivisor) -> Result<(), ContractionError> {
        d.validate(&self.source)?;
        for n in &self.contracted {
            let c = d.coefficient(n);
            if !c.is_zero() {
                return Err(ContractionError::SupportedOnContracted {
                    name: n.clone(),
                    coeff: c,
                });
            }
        }
        Ok(())
    }

    /// Coefficients `a_j` with `(D + Σ a_j Γ_j) · Γ_k = 0`.
    fn correction(&self, d: &QDivisor) -> Result<Vec<Rational>, ContractionError> {
        let total = d.total_class(&self.source)?;
        let rhs: Vec<Rational> = self
            .contracted
            .iter()
            .map(|n| {
                let gamma = self.source.class_of(n).map(|c| {
                    c.iter()
                        .map(|x| Rational::from_integer(x.clone()))
                        .collect::<Vec<_>>()
                })?;
                Ok(-self.source.pair_rational(&total, &gamma))
            })
            .collect::<Result<_, SurfaceError>>()?;
        Ok(self.gram_inverse.mul_vec(&rhs)?)
    }

    /// Mumford pullback of a divisor on the target.
    pub fn pullback(&self, d: &QDivisor) -> Result<QDivisor, ContractionError> {
        self.check_off_contracted(d)?;
        let coeffs = self.correction(d)?;
        let mut out = d.clone();
        for (n, a) in self.contracted.iter().zip(coeffs) {
            out.add_term(n.clone(), a);
        }
        Ok(out)
    }

    /// Drops the coefficients on contracted curves.
    pub fn pushforward(&self, d: &QDivisor) -> QDivisor {
        d.without(&self.contracted)
    }

    /// `a(Γ)` in `K_S = ψ*K_T + Σ a(Γ) Γ`.
    pub fn discrepancies(&self) -> Result<DiscrepancyReport, ContractionError> {
        let pulled = self.pullback(&self.canonical_target())?;
        let values: Vec<(String, Rational)> = self
            .contracted
            .iter()
            .map(|n| (n.clone(), -pulled.coefficient(n)))
            .collect();
        let minimum = values.iter().map(|(_, a)| a.clone()).min();
        let class = SingularityClass::from_min_discrepancy(minimum.as_ref());
        Ok(DiscrepancyReport {
            values,
            minimum,
            class,
        })
    }

    /// Connected components of the dual graph of contracted curves, each in
    /// contraction order of its first member.
    fn components(&self) -> Result<Vec<Vec<usize>>, ContractionError> {
        let k = self.contracted.len();
        let mut seen = vec![false; k];
        let mut comps = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                for (w, seen_w) in seen.iter_mut().enumerate() {
                    if !*seen_w && w != v && !self.gram[(v, w)].is_zero() {
                        *seen_w = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comps.push(comp);
        }
        Ok(comps)
    }

    /// Hirzebruch–Jung type of each singular point of the target.
    pub fn classify_singularities(&self) -> Result<Vec<SingularPointReport>, ContractionError> {
        let mut out = Vec::new();
        for comp in self.components()? {
            let names: Vec<String> = comp.iter().map(|&i| self.contracted[i].clone()).collect();
            let unsupported = |reason: &str| ContractionError::UnsupportedConfiguration {
                component: names.clone(),
                reason: reason.to_string(),
            };
            let neighbours = |v: usize| -> Vec<usize> {
                comp.iter()
                    .copied()
                    .filter(|&w| w != v && !self.gram[(v, w)].is_zero())
                    .collect()
            };
            let mut edges = 0;
            for &v in &comp {
                let nb = neighbours(v);
                if nb.len() > 2 {
                    return Err(unsupported("branch vertex"));
                }
                for &w in &nb {
                    if self.gram[(v, w)] != Rational::one() {
                        return Err(unsupported("curves meeting with multiplicity other than 1"));
                    }
                }
                edges += nb.len();
            }
            if edges / 2 != comp.len() - 1 {
                return Err(unsupported("cycle"));
            }
            // walk from the first endpoint (in contraction order)
            let start = comp
                .iter()
                .copied()
                .find(|&v| neighbours(v).len() <= 1)
                .ok_or_else(|| unsupported("cycle"))?;
            let mut order = vec![start];
            let mut prev = None;
            let mut cur = start;
            while let Some(next) = neighbours(cur).into_iter().find(|&w| Some(w) != prev) {
                order.push(next);
                prev = Some(cur);
                cur = next;
            }
            let chain: Vec<BigInt> = order
                .iter()
                .map(|&i| -self.gram[(i, i)].to_integer())
                .collect();
            let hj_type = hirzebruch_jung(&chain)
                .ok_or_else(|| unsupported("contains a curve with self-intersection > -2"))?;
            out.push(SingularPointReport {
                component: order.iter().map(|&i| self.contracted[i].clone()).collect(),
                label: chain_label(&chain),
                self_intersections: chain,
                hj_type,
            });
        }
        Ok(out)
    }

    /// `Cl(T) = Cl(S) / ⟨contracted classes⟩`.
    pub fn class_group(&self) -> Result<ClassGroupReport, ContractionError> {
        let rows = self
            .contracted
            .iter()
            .map(|n| self.source.class_of(n).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(quotient_class_group(self.source.rank(), &rows))
    }

    /// Degrees of `d` on the contracted curves; nef iff all are ≥ 0.
    pub fn is_relatively_nef(&self, d: &QDivisor) -> Result<NefReport, ContractionError> {
        let total = d.total_class(&self.source)?;
        let mut degrees = Vec::with_capacity(self.contracted.len());
        for n in &self.contracted {
            let gamma: Vec<Rational> = self
                .source
                .class_of(n)?
                .iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect();
            degrees.push((n.clone(), self.source.pair_rational(&total, &gamma)));
        }
        Ok(NefReport {
            nef: degrees.iter().all(|(_, x)| !x.is_negative()),
            degrees,
        })
    }

    fn require_rank_one(&self) -> Result<(), ContractionError> {
        match self.target_rank() {
            1 => Ok(()),
            r => Err(ContractionError::RankNotOne(r)),
        }
    }

    /// `ψ*D · W` for the configured witness `W`.
    pub fn degree(&self, d: &QDivisor) -> Result<Rational, ContractionError> {
        self.degree_against(d, &self.witness.clone())
    }

    /// `ψ*D · W` by the projection formula; needs a rank-one target.
    pub fn degree_against(
        &self,
        d: &QDivisor,
        witness: &QDivisor,
    ) -> Result<Rational, ContractionError> {
        self.require_rank_one()?;
        witness.validate(&self.source)?;
        if let Some(n) = self
            .contracted
            .iter()
            .find(|n| !witness.coefficient(n).is_zero())
        {
            return Err(ContractionError::WitnessContracted(n.clone()));
        }
        let pulled = self.pullback(d)?;
        Ok(self.source.intersect(&pulled, witness)?)
    }

    /// On a rank-one target a divisor is ample iff it has positive degree.
    pub fn is_ample_rank1(&self, d: &QDivisor) -> Result<bool, ContractionError> {
        Ok(self.degree(d)?.is_positive())
    }

    /// `r` with `d1 ≡ r · d2`, or `None` if `d2` is numerically trivial.
    pub fn numerically_proportional(
        &self,
        d1: &QDivisor,
        d2: &QDivisor,
    ) -> Result<Option<Rational>, ContractionError> {
        let den = self.degree(d2)?;
        if den.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.degree(d1)? / den))
    }

    /// Pullback coefficients on the contracted curves, keyed by name.
    pub fn correction_map(
        &self,
        d: &QDivisor,
    ) -> Result<BTreeMap<String, Rational>, ContractionError> {
        let p = self.pullback(d)?;
        Ok(self
            .contracted
            .iter()
            .map(|n| (n.clone(), p.coefficient(n)))
            .collect())
    }
}

/// Total transform of a general fibre of the first projection (quadric), or
/// of a general line (plane).
pub fn default_witness(model: &SurfaceModel) -> QDivisor {
    let label = match model.base() {
        Base::Quadric => "f_x",
        Base::Plane => "h",
    };
    QDivisor::from_class(model.basis_class(label).expect("base basis label"))
}
