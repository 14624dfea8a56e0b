//! Divisor expressions such as `E2 + E3 - E1`, `-K - 1/3 C` or `2 f_x`.
//!
//! Atoms resolve in this order: `K` (the canonical class), names from the
//! scenario's divisor table, registered prime divisors, lattice basis labels.

use std::collections::BTreeMap;

use kmsurf::{QDivisor, Rational, SurfaceModel};
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unexpected {found:?} at offset {at}")]
    Unexpected { found: char, at: usize },
    #[error("expected a term at offset {at}")]
    ExpectedTerm { at: usize },
    #[error("zero denominator at offset {at}")]
    ZeroDenominator { at: usize },
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("a constant term must be 0, found {0}")]
    BareConstant(String),
    #[error("{name} has a lattice part and cannot be scaled by {coeff}")]
    FractionalResidual { name: String, coeff: String },
}

/// Reserved atom for the canonical class.
pub const CANONICAL: &str = "K";

/// Parses `"a/b"`, `"a"`, with optional sign. Denominators must be nonzero.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() || den.sign() == num_bigint::Sign::Minus {
        return None;
    }
    Some(Rational::new(num, den))
}

/// `"a/b"` with the denominator always present.
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<Option<Rational>, ExprError> {
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Ok(None);
        }
        let num: BigInt = digits.parse().expect("digits");
        self.skip_ws();
        let mut den = BigInt::from(1);
        if self.peek() == Some('/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let d = self.take_while(|c| c.is_ascii_digit());
            if d.is_empty() {
                return Err(self.unexpected());
            }
            den = d.parse().expect("digits");
            if den.is_zero() {
                return Err(ExprError::ZeroDenominator { at });
            }
        }
        Ok(Some(Rational::new(num, den)))
    }

    fn ident(&mut self) -> &'a str {
        if !matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_') {
            return "";
        }
        self.take_while(|c| c.is_ascii_alphanumeric() || c == '_')
    }

    fn unexpected(&self) -> ExprError {
        match self.peek() {
            Some(found) => ExprError::Unexpected {
                found,
                at: self.pos,
            },
            None => ExprError::ExpectedTerm { at: self.pos },
        }
    }
}

/// Parses a divisor expression on `model`.
pub fn parse_divisor(
    src: &str,
    model: &SurfaceModel,
    table: &BTreeMap<String, QDivisor>,
) -> Result<QDivisor, ExprError> {
    let mut lx = Lexer { src, pos: 0 };
    let mut total = QDivisor::zero();
    let mut first = true;
    loop {
        lx.skip_ws();
        if lx.peek().is_none() {
            if first {
                return Err(ExprError::ExpectedTerm { at: lx.pos });
            }
            break;
        }
        let mut negative = false;
        match lx.peek() {
            Some('+') if !first => lx.pos += 1,
            Some('-') => {
                negative = true;
                lx.pos += 1;
            }
            _ if first => {}
            _ => return Err(lx.unexpected()),
        }
        first = false;
        lx.skip_ws();
        let at = lx.pos;
        let coeff = lx.number()?;
        lx.skip_ws();
        if coeff.is_some() && lx.peek() == Some('*') {
            lx.pos += 1;
            lx.skip_ws();
        }
        let name = lx.ident();
        let mut coeff = coeff.unwrap_or_else(|| Rational::from_integer(1.into()));
        if negative {
            coeff = -coeff;
        }
        if name.is_empty() {
            if lx.pos == at {
                return Err(lx.unexpected());
            }
            if !coeff.is_zero() {
                return Err(ExprError::BareConstant(coeff.to_string()));
            }
            continue;
        }
        let atom = resolve(name, model, table)?;
        if atom.has_residual() && !coeff.is_integer() {
            return Err(ExprError::FractionalResidual {
                name: name.to_string(),
                coeff: coeff.to_string(),
            });
        }
        total = total + atom.scale(&coeff);
    }
    Ok(total)
}

fn resolve(
    name: &str,
    model: &SurfaceModel,
    table: &BTreeMap<String, QDivisor>,
) -> Result<QDivisor, ExprError> {
    if name == CANONICAL {
        return Ok(QDivisor::from_class(model.canonical_class().clone()));
    }
    if let Some(d) = table.get(name) {
        return Ok(d.clone());
    }
    if model.contains(name) {
        return Ok(QDivisor::prime(name));
    }
    if let Some(class) = model.basis_class(name) {
        return Ok(QDivisor::from_class(class));
    }
    Err(ExprError::UnknownName(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use kmsurf::{class_from_i64, int, rat};

    fn model() -> SurfaceModel {
        let mut s = SurfaceModel::new_quadric();
        s.declare_curve("C", class_from_i64(&[1, 3])).unwrap();
        s.blow_up("E1", &[("C", 1)]).unwrap();
        s
    }

    #[test]
    fn terms_and_signs() {
        let s = model();
        let t = BTreeMap::new();
        let d = parse_divisor("E1 - 1/3 C + 2*E1", &s, &t).unwrap();
        assert_eq!(d, QDivisor::from_terms([("E1", int(3)), ("C", rat(-1, 3))]));
        assert_eq!(parse_divisor("0", &s, &t).unwrap(), QDivisor::zero());
        assert_eq!(
            parse_divisor("-K", &s, &t).unwrap(),
            QDivisor::from_class(class_from_i64(&[2, 2, -1]))
        );
        assert_eq!(
            parse_divisor("f_x", &s, &t).unwrap(),
            QDivisor::from_class(class_from_i64(&[1, 0, 0]))
        );
    }

    #[test]
    fn table_lookup() {
        let s = model();
        let mut t = BTreeMap::new();
        t.insert("A".to_string(), QDivisor::prime("E1"));
        assert_eq!(
            parse_divisor("-2 A", &s, &t).unwrap(),
            QDivisor::term("E1", int(-2))
        );
    }

    #[test]
    fn errors() {
        let s = model();
        let t = BTreeMap::new();
        assert_eq!(
            parse_divisor("E1 + Z", &s, &t),
            Err(ExprError::UnknownName("Z".into()))
        );
        assert!(matches!(
            parse_divisor("", &s, &t),
            Err(ExprError::ExpectedTerm { .. })
        ));
        assert!(matches!(
            parse_divisor("E1 E1", &s, &t),
            Err(ExprError::Unexpected { .. })
        ));
        assert!(matches!(
            parse_divisor("1/0 C", &s, &t),
            Err(ExprError::ZeroDenominator { .. })
        ));
        assert_eq!(
            parse_divisor("3", &s, &t),
            Err(ExprError::BareConstant("3".into()))
        );
        assert!(matches!(
            parse_divisor("1/2 K", &s, &t),
            Err(ExprError::FractionalResidual { .. })
        ));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-1/3"), Some(rat(-1, 3)));
        assert_eq!(parse_rational("4"), Some(int(4)));
        assert_eq!(parse_rational("2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-3"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(rational_string(&int(-1)), "-1/1");
    }
}
