//! Formal ℚ-combinations of named prime divisors.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exactlin::Rational;
use crate::surface::{SurfaceError, SurfaceModel};

/// `Σ a_i D_i + residual`, where the `D_i` are named prime divisors of a
/// [`SurfaceModel`] and `residual` is an integral lattice class (for example
/// the canonical class, which has no preferred named representative).
///
/// Zero coefficients are never stored. An empty residual means zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QDivisor {
    named: BTreeMap<String, Rational>,
    residual: Vec<BigInt>,
}

impl QDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `coeff · name`.
    pub fn term(name: impl Into<String>, coeff: Rational) -> Self {
        let mut d = Self::zero();
        d.add_term(name, coeff);
        d
    }

    /// A single prime divisor with coefficient one.
    pub fn prime(name: impl Into<String>) -> Self {
        Self::term(name, Rational::one())
    }

    /// A pure lattice class with no named part.
    pub fn from_class(class: Vec<BigInt>) -> Self {
        let mut d = Self::zero();
        if class.iter().any(|x| !x.is_zero()) {
            d.residual = class;
        }
        d
    }

    /// Builds `Σ coeff · name` from pairs.
    pub fn from_terms<S: Into<String>>(terms: impl IntoIterator<Item = (S, Rational)>) -> Self {
        let mut d = Self::zero();
        for (name, coeff) in terms {
            d.add_term(name, coeff);
        }
        d
    }

    pub fn add_term(&mut self, name: impl Into<String>, coeff: Rational) {
        let name = name.into();
        let entry = self
            .named
            .entry(name.clone())
            .or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.named.remove(&name);
        }
    }

    pub fn coefficient(&self, name: &str) -> Rational {
        self.named.get(name).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero named coefficients, sorted by name.
    pub fn named(&self) -> &BTreeMap<String, Rational> {
        &self.named
    }

    /// Residual integral class; empty when zero.
    pub fn residual(&self) -> &[BigInt] {
        &self.residual
    }

    pub fn has_residual(&self) -> bool {
        !self.residual.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.named.is_empty() && self.residual.is_empty()
    }

    /// Drops the named coefficients on the given names.
    pub fn without(&self, names: &[String]) -> Self {
        let mut d = self.clone();
        for n in names {
            d.named.remove(n);
        }
        d
    }

    /// True iff every named coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.named.values().all(|c| c.is_integer())
    }

    /// Coefficient-wise floor of the named part; the residual is untouched.
    pub fn floor(&self) -> Self {
        let mut d = Self {
            named: BTreeMap::new(),
            residual: self.residual.clone(),
        };
        for (n, c) in &self.named {
            d.add_term(n.clone(), c.floor());
        }
        d
    }

    /// Checks that every named part is registered on `model`.
    pub fn validate(&self, model: &SurfaceModel) -> Result<(), SurfaceError> {
        for n in self.named.keys() {
            model.divisor(n)?;
        }
        if self.has_residual() && self.residual.len() != model.rank() {
            return Err(SurfaceError::RankMismatch {
                name: "<residual>".into(),
                expected: model.rank(),
                actual: self.residual.len(),
            });
        }
        Ok(())
    }

    /// `Σ a_i [D_i] + residual` as a rational vector in the lattice basis.
    pub fn total_class(&self, model: &SurfaceModel) -> Result<Vec<Rational>, SurfaceError> {
        self.validate(model)?;
        let mut v: Vec<Rational> = if self.has_residual() {
            self.residual
                .iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect()
        } else {
            vec![Rational::zero(); model.rank()]
        };
        for (name, coeff) in &self.named {
            for (vi, ci) in v.iter_mut().zip(model.class_of(name)?) {
                if !ci.is_zero() {
                    *vi += coeff * Rational::from_integer(ci.clone());
                }
            }
        }
        Ok(v)
    }

    /// The total class as an integer vector, or `None` if some coordinate is
    /// not integral.
    pub fn integral_class(
        &self,
        model: &SurfaceModel,
    ) -> Result<Option<Vec<BigInt>>, SurfaceError> {
        let v = self.total_class(model)?;
        if v.iter().all(|x| x.is_integer()) {
            Ok(Some(v.into_iter().map(|x| x.to_integer()).collect()))
        } else {
            Ok(None)
        }
    }

    /// Formats the divisor with named terms in registration order, followed
    /// by the residual in basis order, e.g. `E1 + 1/3 F1 - C + (-2 f_x - 2 f_y + ...)`.
    pub fn display<'a>(&'a self, model: &'a SurfaceModel) -> impl fmt::Display + 'a {
        DisplayIn { d: self, model }
    }

    /// Named terms in registration order of `model` (unknown names last, by name).
    pub fn ordered_terms(&self, model: &SurfaceModel) -> Vec<(String, Rational)> {
        let mut terms: Vec<(String, Rational)> = self
            .named
            .iter()
            .map(|(n, c)| (n.clone(), c.clone()))
            .collect();
        terms.sort_by_key(|(n, _)| (model.position(n).unwrap_or(usize::MAX), n.clone()));
        terms
    }

    fn combine(mut self, other: &Self, sign: i32) -> Self {
        for (n, c) in &other.named {
            let c = if sign < 0 { -c.clone() } else { c.clone() };
            self.add_term(n.clone(), c);
        }
        if other.has_residual() {
            if self.residual.is_empty() {
                self.residual = vec![BigInt::zero(); other.residual.len()];
            }
            assert_eq!(
                self.residual.len(),
                other.residual.len(),
                "residual classes live in lattices of different rank"
            );
            for (a, b) in self.residual.iter_mut().zip(&other.residual) {
                if sign < 0 {
                    *a -= b;
                } else {
                    *a += b;
                }
            }
            if self.residual.iter().all(Zero::is_zero) {
                self.residual.clear();
            }
        }
        self
    }

    /// Multiplies by a rational. The residual must stay integral, so a
    /// non-integral scalar is only allowed when the residual is zero.
    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        let mut d = Self::zero();
        for (n, c) in &self.named {
            d.add_term(n.clone(), c * s);
        }
        if self.has_residual() {
            assert!(
                s.is_integer(),
                "cannot scale an integral residual class by {s}"
            );
            let k = s.to_integer();
            d.residual = self.residual.iter().map(|x| x * &k).collect();
        }
        d
    }
}

struct DisplayIn<'a> {
    d: &'a QDivisor,
    model: &'a SurfaceModel,
}

impl fmt::Display for DisplayIn<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.d.ordered_terms(self.model);
        let refs: Vec<(Rational, &str)> =
            terms.iter().map(|(n, c)| (c.clone(), n.as_str())).collect();
        let mut out = format_terms(&refs);
        if self.d.has_residual() {
            let r = self.model.format_class(&self.d.residual);
            if out == "0" {
                out = format!("({r})");
            } else {
                out = format!("{out} + ({r})");
            }
        }
        f.write_str(&out)
    }
}

/// Formats `Σ c_i · name_i` as `E1 + 1/3 F1 - 2/3 H2`; `0` when empty.
pub fn format_terms(terms: &[(Rational, &str)]) -> String {
    let mut out = String::new();
    for (c, name) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !abs.is_one() {
            out.push_str(&abs.to_string());
            out.push(' ');
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl Add for QDivisor {
    type Output = QDivisor;
    fn add(self, rhs: QDivisor) -> QDivisor {
        self.combine(&rhs, 1)
    }
}

impl Add<&QDivisor> for QDivisor {
    type Output = QDivisor;
    fn add(self, rhs: &QDivisor) -> QDivisor {
        self.combine(rhs, 1)
    }
}

impl Sub for QDivisor {
    type Output = QDivisor;
    fn sub(self, rhs: QDivisor) -> QDivisor {
        self.combine(&rhs, -1)
    }
}

impl Sub<&QDivisor> for QDivisor {
    type Output = QDivisor;
    fn sub(self, rhs: &QDivisor) -> QDivisor {
        self.combine(rhs, -1)
    }
}

impl Neg for QDivisor {
    type Output = QDivisor;
    fn neg(self) -> QDivisor {
        QDivisor::zero().combine(&self, -1)
    }
}

impl Neg for &QDivisor {
    type Output = QDivisor;
    fn neg(self) -> QDivisor {
        QDivisor::zero().combine(self, -1)
    }
}

impl Mul<&Rational> for &QDivisor {
    type Output = QDivisor;
    fn mul(self, s: &Rational) -> QDivisor {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{int, rat};
    use crate::surface::class_from_i64;

    #[test]
    fn floor_examples() {
        let d = QDivisor::from_terms([("H1", rat(2, 3)), ("G1", rat(1, 3))]);
        assert!(d.floor().is_zero());

        let d = QDivisor::from_terms([("E1", int(1)), ("C", rat(-1, 3))]);
        assert_eq!(
            d.floor(),
            QDivisor::from_terms([("E1", int(1)), ("C", int(-1))])
        );

        let integral = QDivisor::from_terms([("E2", int(1)), ("E1", int(-1))]);
        assert_eq!(integral.floor(), integral);
    }

    #[test]
    fn arithmetic_cancels() {
        let a = QDivisor::prime("E1") + QDivisor::term("F1", rat(1, 3));
        let b = a.clone() - a;
        assert!(b.is_zero());
        let k = QDivisor::from_class(class_from_i64(&[-2, -2]));
        assert!((k.clone() - k).is_zero());
    }

    #[test]
    fn format() {
        let d = QDivisor::from_terms([("A", int(1)), ("B", rat(-2, 3))]);
        let s = SurfaceModel::new_quadric();
        assert_eq!(d.display(&s).to_string(), "A - 2/3 B");
        assert_eq!(QDivisor::zero().display(&s).to_string(), "0");
    }
}
