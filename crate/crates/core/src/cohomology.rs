//! Riemann–Roch, sections on the quadric, and the numerical pipelines that
//! certify (non-)vanishing of cohomology on the contracted surface.
//!
//! Nothing here computes sheaf cohomology. Nonvanishing of `h¹` is certified
//! only through `χ < 0`, since `h⁰` and `h²` are nonnegative.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::contraction::{Contraction, ContractionError, NefReport};
use crate::divisor::QDivisor;
use crate::exactlin::{self, Rational};
use crate::surface::{Base, Class, SurfaceError, SurfaceModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error("divisor class is not integral")]
    NonIntegralClass,
    #[error("Leray degeneration hypothesis fails: round-down is not relatively nef ({0:?})")]
    LerayHypothesisFails(Vec<(String, Rational)>),
    #[error("hypothesis violated: ((p-1)L - K)·D = {0} is not positive")]
    NonPositiveDenominator(Rational),
    #[error("section count needs a quadric base")]
    NotQuadric,
    #[error("characteristic must be at least 2, got {0}")]
    BadCharacteristic(u64),
}

/// `χ(O_S(D)) = χ(O_S) + D·(D − K)/2` for an integral class `D`.
pub fn euler_characteristic(
    model: &SurfaceModel,
    d: &QDivisor,
) -> Result<Rational, CohomologyError> {
    let class = d
        .integral_class(model)?
        .ok_or(CohomologyError::NonIntegralClass)?;
    Ok(euler_characteristic_of_class(model, &class))
}

pub fn euler_characteristic_of_class(model: &SurfaceModel, class: &[BigInt]) -> Rational {
    let d_minus_k: Class = class
        .iter()
        .zip(model.canonical_class())
        .map(|(d, k)| d - k)
        .collect();
    model.chi_structure_sheaf() + Rational::new(model.pair(class, &d_minus_k), BigInt::from(2))
}

/// `h⁰(ℙ¹×ℙ¹, O(a, b))`.
pub fn h0_on_quadric(a: i64, b: i64) -> u128 {
    if a < 0 || b < 0 {
        0
    } else {
        (a as u128 + 1) * (b as u128 + 1)
    }
}

/// Outcome of the anticanonical section check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntiCanonicalReport {
    /// `⌊−ψ*K_T⌋` on the source.
    pub round_down: QDivisor,
    /// `−K_base + Σ c_i f_*(D_i)` over the named part of the round-down.
    pub base_class: Class,
    /// `f*(base_class) + exceptional_part` equals the round-down exactly.
    pub identity_holds: bool,
    /// `lhs − rhs` when both sides are computable but differ.
    pub difference: Option<Class>,
    /// Names in the claimed exceptional part that the model does not know.
    pub unknown_names: Vec<String>,
    /// Claimed exceptional part is effective and supported on f-exceptional curves.
    pub exceptional_part_effective: bool,
    /// `h⁰` of the base class (quadric only).
    pub h0: Option<u128>,
}

impl AntiCanonicalReport {
    /// `h⁰(T, −K_T) = 0` is certified.
    pub fn h0_vanishes(&self) -> bool {
        self.identity_holds && self.exceptional_part_effective && self.h0 == Some(0)
    }
}

/// Reduces `H⁰(T, −K_T)` to sections of a class on the base surface.
///
/// `H⁰(T, −K_T) = H⁰(S, ⌊−ψ*K_T⌋)`. If `⌊−ψ*K_T⌋ = f*B + X` with `X`
/// effective and f-exceptional, this is `H⁰(base, B)`. The caller supplies
/// the claimed `X`; the identity is checked on class vectors.
pub fn verify_h0_anticanonical_zero(
    contraction: &Contraction,
    exceptional_part: &QDivisor,
) -> Result<AntiCanonicalReport, CohomologyError> {
    let model = contraction.source();
    let neg_k = -contraction.canonical_target();
    let round_down = contraction.pullback(&neg_k)?.floor();
    let lhs = round_down
        .integral_class(model)?
        .ok_or(CohomologyError::NonIntegralClass)?;

    let mut base_class: Class = model
        .pushforward_to_base(model.canonical_class())
        .into_iter()
        .map(|x| -x)
        .collect();
    for (name, coeff) in round_down.named() {
        let c = coeff.to_integer();
        for (b, x) in base_class
            .iter_mut()
            .zip(model.pushforward_to_base(model.class_of(name)?))
        {
            *b += &c * x;
        }
    }
    let h0 = match model.base() {
        Base::Quadric => {
            let a = i64::try_from(&base_class[0]).ok();
            let b = i64::try_from(&base_class[1]).ok();
            a.zip(b).map(|(a, b)| h0_on_quadric(a, b))
        }
        Base::Plane => None,
    };

    let unknown_names: Vec<String> = exceptional_part
        .named()
        .keys()
        .filter(|n| !model.contains(n))
        .cloned()
        .collect();
    if !unknown_names.is_empty() {
        return Ok(AntiCanonicalReport {
            round_down,
            base_class,
            identity_holds: false,
            difference: None,
            unknown_names,
            exceptional_part_effective: false,
            h0,
        });
    }

    let pulled_base = QDivisor::from_class(model.pullback_from_base(&base_class));
    let rhs = (pulled_base + exceptional_part).integral_class(model)?;
    let (identity_holds, difference) = match rhs {
        Some(rhs) if rhs == lhs => (true, None),
        Some(rhs) => (
            false,
            Some(lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect()),
        ),
        None => (false, None),
    };
    let mut exceptional_part_effective = !exceptional_part.has_residual();
    for (name, coeff) in exceptional_part.named() {
        let on_base = model.pushforward_to_base(model.class_of(name)?);
        if coeff.is_negative() || on_base.iter().any(|x| !x.is_zero()) {
            exceptional_part_effective = false;
        }
    }
    Ok(AntiCanonicalReport {
        round_down,
        base_class,
        identity_holds,
        difference,
        unknown_names,
        exceptional_part_effective,
        h0,
    })
}

/// Logical consequences of `h¹(T, O_T(−A)) ≠ 0` for an ample `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorollaryFlags {
    /// Global F-splitting forces `H¹(X, O(−A)) = 0` for ample ℚ-Cartier Weil `A`.
    pub not_globally_f_split: bool,
    /// Via Serre duality `H¹(K + A) ≠ 0`, which a W₂-liftable log resolution would forbid.
    pub no_w2_liftable_log_resolution: bool,
}

/// Numerical certificate that Kawamata–Viehweg vanishing fails for `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvvFailureReport {
    /// `−ψ*A`.
    pub pullback_expansion: QDivisor,
    /// `⌊−ψ*A⌋`.
    pub floor: QDivisor,
    pub relatively_nef: NefReport,
    pub k_dot_floor: Rational,
    pub floor_squared: Rational,
    pub euler_char: Rational,
    pub h1_nonzero: bool,
    pub corollary_flags: CorollaryFlags,
    pub leray_note: &'static str,
}

pub const LERAY_NOTE: &str = "hypothesis of relative Kawamata-Viehweg vanishing for birational \
surface morphisms [Kollár 2013, Thm 10.4] verified numerically: the round-down is psi-nef, so \
R^i psi_* vanishes for i > 0 and H^i(T, O_T(-A)) = H^i(S, O_S(round-down))";

/// Runs `−ψ*A → ⌊·⌋ → ψ-nef check → K·D, D², χ`.
pub fn verify_kvv_failure(
    contraction: &Contraction,
    a: &QDivisor,
) -> Result<KvvFailureReport, CohomologyError> {
    let target_rank = contraction.target_rank();
    if target_rank != 1 {
        return Err(ContractionError::RankNotOne(target_rank).into());
    }
    let model = contraction.source();
    let pullback_expansion = -contraction.pullback(a)?;
    let floor = pullback_expansion.floor();
    let relatively_nef = contraction.is_relatively_nef(&floor)?;
    if !relatively_nef.nef {
        return Err(CohomologyError::LerayHypothesisFails(
            relatively_nef.degrees,
        ));
    }
    let class = floor
        .integral_class(model)?
        .ok_or(CohomologyError::NonIntegralClass)?;
    let k_dot_floor = Rational::from_integer(model.pair(model.canonical_class(), &class));
    let floor_squared = Rational::from_integer(model.pair(&class, &class));
    let euler_char = euler_characteristic_of_class(model, &class);
    let h1_nonzero = euler_char <= -Rational::one();
    Ok(KvvFailureReport {
        pullback_expansion,
        floor,
        relatively_nef,
        k_dot_floor,
        floor_squared,
        euler_char,
        h1_nonzero,
        corollary_flags: CorollaryFlags {
            not_globally_f_split: h1_nonzero,
            no_w2_liftable_log_resolution: h1_nonzero,
        },
        leray_note: LERAY_NOTE,
    })
}

/// Bend-and-break bound `2·dim·(L·D) / (((p−1)L − K)·D)`.
pub fn kollar_bound(
    dim: u32,
    p: u64,
    l_dot_d: &Rational,
    k_dot_d: &Rational,
) -> Result<Rational, CohomologyError> {
    if p < 2 {
        return Err(CohomologyError::BadCharacteristic(p));
    }
    let denom = Rational::from_integer(BigInt::from(p - 1)) * l_dot_d - k_dot_d;
    if !denom.is_positive() {
        return Err(CohomologyError::NonPositiveDenominator(denom));
    }
    Ok(Rational::from_integer(BigInt::from(2 * dim)) * l_dot_d / denom)
}

/// Limit of [`kollar_bound`] on a surface as `−K·D → 0⁺`: `4/(p−1)`.
/// The bound is strictly below this whenever `−K·D > 0`.
pub fn surface_threshold(p: u64) -> Result<Rational, CohomologyError> {
    if p < 2 {
        return Err(CohomologyError::BadCharacteristic(p));
    }
    Ok(exactlin::rat(4, p as i64 - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VanishingVerdict {
    Contradiction,
    NoContradiction,
}

/// `L·C_x` is bounded strictly below by `lower` and strictly above by
/// `threshold`; both cannot hold once `lower ≥ threshold`.
pub fn vanishing_case_analysis(lower: &Rational, threshold: &Rational) -> VanishingVerdict {
    if lower >= threshold {
        VanishingVerdict::Contradiction
    } else {
        VanishingVerdict::NoContradiction
    }
}

/// Contradiction check for `H¹(X, O(mA)) ≠ 0`, `A` big, nef and Cartier on a
/// klt del Pezzo surface: with `L = mA − K`, a general rational curve has
/// `L·C > m` while bend and break forces `L·C < 4/(p−1)`.
pub fn cartier_vanishing_verdict(
    p: u64,
    multiple: u32,
) -> Result<VanishingVerdict, CohomologyError> {
    let lower = Rational::from_integer(BigInt::from(multiple));
    Ok(vanishing_case_analysis(&lower, &surface_threshold(p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{int, rat};
    use crate::surface::class_from_i64;

    #[test]
    fn chi_examples() {
        let s = SurfaceModel::new_quadric();
        assert_eq!(euler_characteristic(&s, &QDivisor::zero()).unwrap(), int(1));
        let k = QDivisor::from_class(s.canonical_class().clone());
        assert_eq!(euler_characteristic(&s, &k).unwrap(), int(1));
        assert_eq!(
            euler_characteristic_of_class(&s, &class_from_i64(&[1, 2])),
            int(6)
        );
    }

    #[test]
    fn chi_rejects_fractional() {
        let mut s = SurfaceModel::new_quadric();
        s.declare_curve("F", class_from_i64(&[1, 0])).unwrap();
        assert_eq!(
            euler_characteristic(&s, &QDivisor::term("F", rat(1, 2))),
            Err(CohomologyError::NonIntegralClass)
        );
    }

    #[test]
    fn h0_examples() {
        assert_eq!(h0_on_quadric(-2, -1), 0);
        assert_eq!(h0_on_quadric(0, 0), 1);
        assert_eq!(h0_on_quadric(1, 2), 6);
        assert_eq!(h0_on_quadric(3, -1), 0);
    }

    #[test]
    fn kollar_examples() {
        assert_eq!(kollar_bound(2, 5, &int(1), &int(-1)).unwrap(), rat(4, 5));
        assert!(matches!(
            kollar_bound(2, 3, &int(0), &int(0)),
            Err(CohomologyError::NonPositiveDenominator(_))
        ));
        assert_eq!(surface_threshold(3).unwrap(), int(2));
    }

    #[test]
    fn bound_below_threshold() {
        for p in [2u64, 3, 5, 7, 11] {
            for l in 1..5 {
                for k in 1..5 {
                    let b = kollar_bound(2, p, &int(l), &int(-k)).unwrap();
                    assert!(b < surface_threshold(p).unwrap());
                }
            }
        }
    }

    #[test]
    fn vanishing_parts() {
        use VanishingVerdict::*;
        assert_eq!(cartier_vanishing_verdict(5, 1).unwrap(), Contradiction);
        assert_eq!(cartier_vanishing_verdict(7, 1).unwrap(), Contradiction);
        assert_eq!(cartier_vanishing_verdict(3, 2).unwrap(), Contradiction);
        assert_eq!(cartier_vanishing_verdict(2, 4).unwrap(), Contradiction);
        // the multiples cannot be lowered
        assert_eq!(cartier_vanishing_verdict(3, 1).unwrap(), NoContradiction);
        assert_eq!(cartier_vanishing_verdict(2, 3).unwrap(), NoContradiction);
        assert_eq!(vanishing_case_analysis(&int(0), &int(5)), NoContradiction);
    }
}
