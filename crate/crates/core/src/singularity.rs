//! Cyclic quotient singularities from chains of rational curves.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exactlin::Rational;

/// Type `1/n(1, q)` of a cyclic quotient surface singularity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HjType {
    pub n: BigInt,
    pub q: BigInt,
}

impl fmt::Display for HjType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}(1,{})", self.n, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChainLabel {
    /// Every curve is a (-2)-curve: a du Val A_k point.
    ANChain,
    WeightedCyclic,
}

impl ChainLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ChainLabel::ANChain => "A_n_chain",
            ChainLabel::WeightedCyclic => "weighted_cyclic",
        }
    }
}

/// One singular point of the contracted surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularPointReport {
    /// Curves of the chain, ordered from one end to the other.
    pub component: Vec<String>,
    /// `b_i = -Γ_i²`, in chain order.
    pub self_intersections: Vec<BigInt>,
    pub hj_type: HjType,
    pub label: ChainLabel,
}

/// Evaluates `b_1 - 1/(b_2 - 1/(... - 1/b_k))` and returns `(n, q)`.
///
/// Every `b_i` must be at least 2, which keeps each partial quotient > 1.
pub fn hirzebruch_jung(chain: &[BigInt]) -> Option<HjType> {
    if chain.is_empty() || chain.iter().any(|b| *b < BigInt::from(2)) {
        return None;
    }
    let mut value = Rational::from_integer(chain[chain.len() - 1].clone());
    for b in chain[..chain.len() - 1].iter().rev() {
        value = Rational::from_integer(b.clone()) - value.recip();
    }
    let n = value.numer().clone();
    let q = value.denom().clone();
    debug_assert!(n.gcd(&q).is_one() && !q.is_zero() && q < n);
    Some(HjType { n, q })
}

/// Inverse direction: the continued fraction expansion of `n/q`.
pub fn hj_expansion(n: &BigInt, q: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut a, mut b) = (n.clone(), q.clone());
    while !b.is_zero() {
        // ceil(a / b)
        let c = (&a + &b - BigInt::one()).div_floor(&b);
        out.push(c.clone());
        let next = &c * &b - &a;
        a = b;
        b = next;
    }
    out
}

pub fn chain_label(chain: &[BigInt]) -> ChainLabel {
    if chain.iter().all(|b| *b == BigInt::from(2)) {
        ChainLabel::ANChain
    } else {
        ChainLabel::WeightedCyclic
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn hj(n: i64, q: i64) -> HjType {
        HjType {
            n: n.into(),
            q: q.into(),
        }
    }

    #[test]
    fn a2_chain() {
        assert_eq!(hirzebruch_jung(&chain(&[2, 2])), Some(hj(3, 2)));
        assert_eq!(chain_label(&chain(&[2, 2])), ChainLabel::ANChain);
    }

    #[test]
    fn single_minus_three() {
        assert_eq!(hirzebruch_jung(&chain(&[3])), Some(hj(3, 1)));
        assert_eq!(chain_label(&chain(&[3])), ChainLabel::WeightedCyclic);
        assert_eq!(hj(3, 1).to_string(), "1/3(1,1)");
    }

    #[test]
    fn a_k_chains() {
        for k in 1..=6 {
            let c = vec![BigInt::from(2); k];
            assert_eq!(hirzebruch_jung(&c), Some(hj(k as i64 + 1, k as i64)));
        }
    }

    #[test]
    fn expansion_roundtrip() {
        for c in [vec![2, 3], vec![3, 2, 4], vec![5], vec![2, 2, 2, 7]] {
            let c = chain(&c);
            let t = hirzebruch_jung(&c).unwrap();
            assert_eq!(hj_expansion(&t.n, &t.q), c);
        }
    }

    #[test]
    fn rejects_minus_one_curves() {
        assert_eq!(hirzebruch_jung(&chain(&[1])), None);
        assert_eq!(hirzebruch_jung(&[]), None);
    }
}
