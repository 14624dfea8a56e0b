//! Cone over a rank-one polarized surface `(T, A)`.
//!
//! Only numerical data is derived here: the constant `r` with `K_T ≡ r·A`,
//! the discrepancy `−(1 + r)` of the zero section of the partial resolution,
//! the class group `Cl(T)/⟨A⟩` and a non-Cohen–Macaulay certificate from a
//! nonvanishing `H¹`. Kltness of the vertex in positive characteristic needs a
//! local toroidal argument that this crate does not attempt; see
//! [`KltProvenance`].

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::contraction::{quotient_class_group, ClassGroupReport, Contraction, ContractionError};
use crate::divisor::QDivisor;
use crate::exactlin::Rational;
use crate::surface::SurfaceError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("polarization is numerically trivial")]
    TrivialPolarization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KltProvenance {
    /// Not derived by this crate; must be supplied by an argument outside the
    /// numerical model (e.g. a toroidal partial resolution).
    External,
    /// Licensed by the decision table in [`cone_klt_decision`].
    DecisionTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeVerdicts {
    /// `K` of the cone is ℚ-Cartier (an `r` exists).
    pub q_gorenstein: bool,
    /// The zero section has discrepancy 0: `K_Y ∼_ℚ f*K_X`.
    pub crepant_partial_resolution: bool,
    /// Only set once a cohomology certificate is supplied.
    pub cm: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct ConeModel {
    base_contraction: Contraction,
    polarization: QDivisor,
    pub r: Rational,
    pub section_discrepancy: Rational,
    /// `Cl(T)/⟨A⟩`; only defined when `A` is an integral Weil divisor.
    pub cone_class_group: Option<ClassGroupReport>,
    pub verdicts: ConeVerdicts,
    pub certificate: Option<CmCertificate>,
}

/// Builds the cone data for `(T, A)`.
pub fn build_cone(contraction: &Contraction, a: &QDivisor) -> Result<ConeModel, ConeError> {
    let model = contraction.source();
    a.validate(model)?;
    let kt = contraction.canonical_target();
    let r = contraction
        .numerically_proportional(&kt, a)?
        .ok_or(ConeError::TrivialPolarization)?;
    let section_discrepancy = -(Rational::one() + &r);

    let cone_class_group = match a.integral_class(model)? {
        Some(class) => {
            let mut relations = contraction
                .contracted()
                .iter()
                .map(|n| model.class_of(n).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            relations.push(class);
            Some(quotient_class_group(model.rank(), &relations))
        }
        None => None,
    };

    Ok(ConeModel {
        base_contraction: contraction.clone(),
        polarization: a.clone(),
        verdicts: ConeVerdicts {
            q_gorenstein: true,
            crepant_partial_resolution: section_discrepancy.is_zero(),
            cm: None,
        },
        r,
        section_discrepancy,
        cone_class_group,
        certificate: None,
    })
}

/// Evidence from `H^2_v(O) ≅ ⊕_m H¹(T, O(mA))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmCertificate {
    /// Index `m` of the summand known to be nonzero.
    pub summand: i64,
    pub h2_vertex_nonzero: bool,
}

impl ConeModel {
    pub fn contraction(&self) -> &Contraction {
        &self.base_contraction
    }

    pub fn polarization(&self) -> &QDivisor {
        &self.polarization
    }

    /// Records a certified `H¹(T, O(mA)) ≠ 0`. Without one the CM verdict
    /// stays undetermined.
    pub fn local_cohomology_certificate(&mut self, m: i64, h1_nonzero: bool) -> Option<bool> {
        if h1_nonzero {
            self.certificate = Some(CmCertificate {
                summand: m,
                h2_vertex_nonzero: true,
            });
            self.verdicts.cm = Some(false);
        }
        self.verdicts.cm
    }

    /// One-line summary of what is known about the vertex.
    pub fn summary(&self) -> ConeSummary {
        ConeSummary {
            q_factorial_klt: self.verdicts.q_gorenstein && self.verdicts.crepant_partial_resolution,
            klt_provenance: KltProvenance::External,
            cm: self.verdicts.cm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeSummary {
    /// Numerical prerequisites for kltness hold (ℚ-Gorenstein, crepant
    /// partial resolution). The singularity-theoretic step is external.
    pub q_factorial_klt: bool,
    pub klt_provenance: KltProvenance,
    pub cm: Option<bool>,
}

impl fmt::Display for ConeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let klt = if self.q_factorial_klt {
            "Q-factorial klt (kltness supplied externally via a toroidal partial resolution)"
        } else {
            "kltness not established"
        };
        let cm = match self.cm {
            Some(false) => "not CM",
            Some(true) => "CM",
            None => "CM undetermined",
        };
        write!(f, "{klt}, {cm}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairClass {
    Terminal,
    Klt,
    Dlt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeOutcome {
    Terminal,
    Klt,
    Dlt,
    NotTerminal,
    NotKlt,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeKltDecision {
    pub outcome: ConeOutcome,
    /// Which row of the table applied (1, 2 or 3).
    pub row: Option<u8>,
    pub caveat: Option<&'static str>,
}

/// The Picard group of the cone vanishes. This is a cited fact: the numerical
/// model has no access to Cartier divisors on the cone and cannot certify it.
pub const PICARD_GROUP_NOTE: &str = "Pic = 0 (cited, not certified numerically)";

pub const CHAR_ZERO_CAVEAT: &str = "row 3 relies on inversion of adjunction and assumes \
characteristic 0; in positive characteristic kltness of the cone needs a separate argument";

/// Decision table for singularities of the cone over `(X, Δ)` with
/// `K_X + Δ ∼_ℚ r·L`:
///
/// 1. `L` Cartier: cone terminal ⇔ pair terminal and `r < −1`; cone klt ⇔ pair klt and `r < 0`.
/// 2. `L` Cartier: cone dlt if pair dlt and `r < 0`.
/// 3. `X` ℚ-factorial, char 0: cone klt ⇔ pair klt and `r < 0`.
pub fn cone_klt_decision(
    pair: PairClass,
    l_cartier: bool,
    base_q_factorial: bool,
    r: &Rational,
) -> ConeKltDecision {
    let row = |outcome, row: u8, caveat| ConeKltDecision {
        outcome,
        row: Some(row),
        caveat,
    };
    let negative = *r < Rational::zero();
    if l_cartier {
        return match pair {
            PairClass::Terminal if *r < -Rational::one() => row(ConeOutcome::Terminal, 1, None),
            PairClass::Terminal | PairClass::Klt if negative => row(ConeOutcome::Klt, 1, None),
            PairClass::Terminal | PairClass::Klt => row(ConeOutcome::NotKlt, 1, None),
            PairClass::Dlt if negative => row(ConeOutcome::Dlt, 2, None),
            PairClass::Dlt => ConeKltDecision {
                outcome: ConeOutcome::Undetermined,
                row: None,
                caveat: None,
            },
        };
    }
    if base_q_factorial {
        return match pair {
            PairClass::Terminal | PairClass::Klt => row(
                if negative {
                    ConeOutcome::Klt
                } else {
                    ConeOutcome::NotKlt
                },
                3,
                Some(CHAR_ZERO_CAVEAT),
            ),
            PairClass::Dlt => ConeKltDecision {
                outcome: ConeOutcome::Undetermined,
                row: None,
                caveat: None,
            },
        };
    }
    ConeKltDecision {
        outcome: ConeOutcome::Undetermined,
        row: None,
        caveat: None,
    }
}
