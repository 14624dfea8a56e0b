//! Picard lattice of an iterated point blow-up of ℙ¹×ℙ¹ or ℙ².
//!
//! A blow-up centre is never given by coordinates. It is described by the
//! tracked curves passing through it and their multiplicities there, and the
//! model only checks that such a point can exist numerically.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::divisor::QDivisor;
use crate::exactlin::{self, IntMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("name `{0}` is already registered")]
    DuplicateName(String),
    #[error("unknown divisor `{0}`")]
    UnknownName(String),
    #[error("class of `{name}` has {actual} coordinates, lattice rank is {expected}")]
    RankMismatch {
        name: String,
        expected: usize,
        actual: usize,
    },
    #[error(
        "class of `{name}` has arithmetic genus {genus} < 0; no irreducible curve has this class"
    )]
    NegativeGenus { name: String, genus: Rational },
    #[error("class of `{name}` is not effective (it pairs negatively with a nef class pulled back from the base)")]
    NotEffective { name: String },
    #[error("`{name}` is not a curve and cannot pass through a blow-up centre")]
    NotACurve { name: String },
    #[error("multiplicity of `{name}` at the blown-up point must be at least 1")]
    ZeroMultiplicity { name: String },
    #[error("`{name}` is listed twice in the incidence data")]
    RepeatedIncidence { name: String },
    #[error(
        "`{a}` and `{b}` meet with intersection number {available} but the blow-up needs {required}"
    )]
    IncidenceBudget {
        a: String,
        b: String,
        available: BigInt,
        required: BigInt,
    },
}

/// The surface the blow-ups start from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Base {
    /// ℙ¹_x × ℙ¹_y with basis `f_x` (a fibre of the first projection), `f_y`.
    Quadric,
    /// ℙ² with basis `h` (a line).
    Plane,
}

impl Base {
    pub fn rank(self) -> usize {
        match self {
            Base::Quadric => 2,
            Base::Plane => 1,
        }
    }
}

/// Integer class vector in the current lattice basis.
pub type Class = Vec<BigInt>;

pub fn class_from_i64(xs: &[i64]) -> Class {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

/// A named divisor tracked through the blow-up sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeDivisor {
    pub name: String,
    pub class: Class,
    /// Irreducible curves get strict transforms; other named classes are
    /// pulled back as total transforms.
    pub is_curve: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    base: Base,
    basis: Vec<String>,
    gram: IntMatrix,
    canonical: Class,
    divisors: Vec<PrimeDivisor>,
    index: BTreeMap<String, usize>,
}

impl SurfaceModel {
    pub fn new_quadric() -> Self {
        Self {
            base: Base::Quadric,
            basis: vec!["f_x".into(), "f_y".into()],
            gram: IntMatrix::from_i64(2, 2, &[0, 1, 1, 0]),
            canonical: class_from_i64(&[-2, -2]),
            divisors: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    pub fn new_plane() -> Self {
        Self {
            base: Base::Plane,
            basis: vec!["h".into()],
            gram: IntMatrix::from_i64(1, 1, &[1]),
            canonical: class_from_i64(&[-3]),
            divisors: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    pub fn new(base: Base) -> Self {
        match base {
            Base::Quadric => Self::new_quadric(),
            Base::Plane => Self::new_plane(),
        }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    /// Rank of the Picard lattice.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn canonical_class(&self) -> &Class {
        &self.canonical
    }

    /// χ(O_S) of any smooth rational surface.
    pub fn chi_structure_sheaf(&self) -> Rational {
        Rational::one()
    }

    /// Number of blow-ups performed so far.
    pub fn blowup_count(&self) -> usize {
        self.rank() - self.base.rank()
    }

    /// Registered divisors, in registration order.
    pub fn divisors(&self) -> &[PrimeDivisor] {
        &self.divisors
    }

    pub fn divisor(&self, name: &str) -> Result<&PrimeDivisor, SurfaceError> {
        self.index
            .get(name)
            .map(|&i| &self.divisors[i])
            .ok_or_else(|| SurfaceError::UnknownName(name.to_string()))
    }

    pub fn class_of(&self, name: &str) -> Result<&Class, SurfaceError> {
        Ok(&self.divisor(name)?.class)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Registration position, used to print divisors in a stable order.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Index of a basis label such as `f_x`.
    pub fn basis_index(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == label)
    }

    /// Unit vector of the given basis label.
    pub fn basis_class(&self, label: &str) -> Option<Class> {
        let i = self.basis_index(label)?;
        let mut c = vec![BigInt::zero(); self.rank()];
        c[i] = BigInt::one();
        Some(c)
    }

    /// Intersection pairing of two integral classes.
    pub fn pair(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        debug_assert_eq!(a.len(), self.rank());
        debug_assert_eq!(b.len(), self.rank());
        let mut total = BigInt::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let g = &self.gram[(i, j)];
                if !g.is_zero() && !bj.is_zero() {
                    total += ai * g * bj;
                }
            }
        }
        total
    }

    /// Intersection pairing of two rational classes.
    pub fn pair_rational(&self, a: &[Rational], b: &[Rational]) -> Rational {
        debug_assert_eq!(a.len(), self.rank());
        debug_assert_eq!(b.len(), self.rank());
        let mut total = Rational::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let g = &self.gram[(i, j)];
                if !g.is_zero() && !bj.is_zero() {
                    total += ai * bj * Rational::from_integer(g.clone());
                }
            }
        }
        total
    }

    /// `p_a(D) = D·(D + K)/2 + 1`.
    pub fn arithmetic_genus(&self, class: &[BigInt]) -> Rational {
        let d_plus_k: Class = class
            .iter()
            .zip(&self.canonical)
            .map(|(d, k)| d + k)
            .collect();
        Rational::new(self.pair(class, &d_plus_k), BigInt::from(2)) + Rational::one()
    }

    fn check_rank(&self, name: &str, class: &[BigInt]) -> Result<(), SurfaceError> {
        if class.len() != self.rank() {
            return Err(SurfaceError::RankMismatch {
                name: name.to_string(),
                expected: self.rank(),
                actual: class.len(),
            });
        }
        Ok(())
    }

    fn register(&mut self, d: PrimeDivisor) -> Result<(), SurfaceError> {
        if self.index.contains_key(&d.name) {
            return Err(SurfaceError::DuplicateName(d.name));
        }
        self.index.insert(d.name.clone(), self.divisors.len());
        self.divisors.push(d);
        Ok(())
    }

    /// Registers an irreducible curve with the given class.
    ///
    /// The class must have nonnegative arithmetic genus; the curve's actual
    /// existence (its equation) is not something the model can check.
    pub fn declare_curve(
        &mut self,
        name: impl Into<String>,
        class: Class,
    ) -> Result<(), SurfaceError> {
        let name = name.into();
        if self.basis.contains(&name) {
            return Err(SurfaceError::DuplicateName(name));
        }
        self.check_rank(&name, &class)?;
        let genus = self.arithmetic_genus(&class);
        if genus.is_negative() {
            return Err(SurfaceError::NegativeGenus { name, genus });
        }
        // Pullbacks of f_x, f_y (or h) are nef, so an irreducible curve has
        // nonnegative base coordinates; the zero class is never a curve.
        let base = self.pushforward_to_base(&class);
        if base.iter().any(Signed::is_negative) || class.iter().all(Zero::is_zero) {
            return Err(SurfaceError::NotEffective { name });
        }
        self.register(PrimeDivisor {
            name,
            class,
            is_curve: true,
        })
    }

    /// Registers a named class that is not tracked as a curve (for example a
    /// general fibre used as a witness). Blow-ups pull it back totally.
    pub fn declare_class(
        &mut self,
        name: impl Into<String>,
        class: Class,
    ) -> Result<(), SurfaceError> {
        let name = name.into();
        if self.basis.contains(&name) {
            return Err(SurfaceError::DuplicateName(name));
        }
        self.check_rank(&name, &class)?;
        self.register(PrimeDivisor {
            name,
            class,
            is_curve: false,
        })
    }

    /// Blows up a point lying on the listed curves with the given
    /// multiplicities. The new exceptional curve is registered as
    /// `exceptional_name`; incident curves are replaced by strict transforms.
    pub fn blow_up(
        &mut self,
        exceptional_name: impl Into<String>,
        incident: &[(&str, u32)],
    ) -> Result<(), SurfaceError> {
        let exceptional_name = exceptional_name.into();
        if self.contains(&exceptional_name) || self.basis.contains(&exceptional_name) {
            return Err(SurfaceError::DuplicateName(exceptional_name));
        }
        let mut resolved: Vec<(usize, BigInt)> = Vec::with_capacity(incident.len());
        for &(name, mult) in incident {
            let idx = *self
                .index
                .get(name)
                .ok_or_else(|| SurfaceError::UnknownName(name.to_string()))?;
            if !self.divisors[idx].is_curve {
                return Err(SurfaceError::NotACurve {
                    name: name.to_string(),
                });
            }
            if mult == 0 {
                return Err(SurfaceError::ZeroMultiplicity {
                    name: name.to_string(),
                });
            }
            if resolved.iter().any(|(i, _)| *i == idx) {
                return Err(SurfaceError::RepeatedIncidence {
                    name: name.to_string(),
                });
            }
            resolved.push((idx, BigInt::from(mult)));
        }
        for (a, (ia, ma)) in resolved.iter().enumerate() {
            for (ib, mb) in &resolved[a + 1..] {
                let available = self.pair(&self.divisors[*ia].class, &self.divisors[*ib].class);
                let required = ma * mb;
                if available < required {
                    return Err(SurfaceError::IncidenceBudget {
                        a: self.divisors[*ia].name.clone(),
                        b: self.divisors[*ib].name.clone(),
                        available,
                        required,
                    });
                }
            }
        }

        // Extend the lattice by an orthogonal (-1)-class.
        let n = self.rank();
        let mut gram = IntMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] = self.gram[(i, j)].clone();
            }
        }
        gram[(n, n)] = -BigInt::one();
        self.gram = gram;
        self.basis.push(exceptional_name.clone());
        self.canonical.push(BigInt::one());
        for d in &mut self.divisors {
            d.class.push(BigInt::zero());
        }
        for (idx, mult) in resolved {
            self.divisors[idx].class[n] -= mult;
        }
        let mut e = vec![BigInt::zero(); n + 1];
        e[n] = BigInt::one();
        self.register(PrimeDivisor {
            name: exceptional_name,
            class: e,
            is_curve: true,
        })
    }

    /// Total transform of a class from the base surface.
    pub fn pullback_from_base(&self, base_class: &[BigInt]) -> Class {
        assert_eq!(base_class.len(), self.base.rank());
        let mut c = base_class.to_vec();
        c.resize(self.rank(), BigInt::zero());
        c
    }

    /// Pushforward of a class to the base surface (drops exceptional coordinates).
    pub fn pushforward_to_base(&self, class: &[BigInt]) -> Class {
        class[..self.base.rank()].to_vec()
    }

    /// Intersection number of two ℚ-divisors.
    pub fn intersect(&self, a: &QDivisor, b: &QDivisor) -> Result<Rational, SurfaceError> {
        Ok(self.pair_rational(&a.total_class(self)?, &b.total_class(self)?))
    }

    /// Coefficient-wise floor of the named part; the residual class is kept.
    pub fn floor_divisor(&self, d: &QDivisor) -> QDivisor {
        d.floor()
    }

    /// Signature `(positive, negative)` of the intersection form, by
    /// symmetric Gaussian elimination (congruence diagonalization).
    pub fn signature(&self) -> (usize, usize) {
        let mut a = self.gram.to_rational();
        let n = a.rows();
        let (mut pos, mut neg) = (0, 0);
        for k in 0..n {
            if a[(k, k)].is_zero() {
                if let Some(j) = ((k + 1)..n).find(|&j| !a[(j, j)].is_zero()) {
                    symmetric_swap(&mut a, k, j);
                } else if let Some(j) = ((k + 1)..n).find(|&j| !a[(k, j)].is_zero()) {
                    // e_k -> e_k + e_j makes the diagonal entry 2 a_kj
                    for c in 0..n {
                        let v = a[(j, c)].clone();
                        a[(k, c)] += v;
                    }
                    for r in 0..n {
                        let v = a[(r, j)].clone();
                        a[(r, k)] += v;
                    }
                } else {
                    continue;
                }
            }
            let p = a[(k, k)].clone();
            if p.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for r in (k + 1)..n {
                if a[(r, k)].is_zero() {
                    continue;
                }
                let f = &a[(r, k)] / &p;
                for c in 0..n {
                    let delta = &f * &a[(k, c)];
                    a[(r, c)] -= delta;
                }
                for rr in 0..n {
                    let delta = &f * &a[(rr, k)];
                    a[(rr, r)] -= delta;
                }
            }
        }
        (pos, neg)
    }

    /// True iff the form has signature `(1, rank - 1)`.
    pub fn is_hyperbolic(&self) -> bool {
        self.signature() == (1, self.rank() - 1)
    }

    pub fn gram_rational(&self) -> exactlin::RatMatrix {
        self.gram.to_rational()
    }

    /// Formats an integral class in basis order, e.g. `f_x + 3 f_y - G1`.
    pub fn format_class(&self, class: &[BigInt]) -> String {
        let terms: Vec<(Rational, &str)> = class
            .iter()
            .zip(&self.basis)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, b)| (Rational::from_integer(c.clone()), b.as_str()))
            .collect();
        crate::divisor::format_terms(&terms)
    }
}

fn symmetric_swap(a: &mut exactlin::RatMatrix, i: usize, j: usize) {
    let n = a.rows();
    for c in 0..n {
        let t = a[(i, c)].clone();
        a[(i, c)] = a[(j, c)].clone();
        a[(j, c)] = t;
    }
    for r in 0..n {
        let t = a[(r, i)].clone();
        a[(r, i)] = a[(r, j)].clone();
        a[(r, j)] = t;
    }
}

impl fmt::Display for SurfaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "basis: {}", self.basis.join(", "))?;
        writeln!(f, "K = {}", self.format_class(&self.canonical))?;
        for d in &self.divisors {
            writeln!(f, "{} = {}", d.name, self.format_class(&d.class))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;

    pub(crate) fn char3_surface() -> SurfaceModel {
        let mut s = SurfaceModel::new_quadric();
        s.declare_curve("C", class_from_i64(&[1, 3])).unwrap();
        for i in 1..=3 {
            s.declare_curve(format!("F{i}"), class_from_i64(&[1, 0]))
                .unwrap();
        }
        for i in 1..=3 {
            let (f, g, h, e) = (
                format!("F{i}"),
                format!("G{i}"),
                format!("H{i}"),
                format!("E{i}"),
            );
            s.blow_up(&g, &[("C", 1), (&f, 1)]).unwrap();
            s.blow_up(&h, &[("C", 1), (&f, 1), (&g, 1)]).unwrap();
            s.blow_up(&e, &[("C", 1), (&f, 1), (&h, 1)]).unwrap();
        }
        s
    }

    fn dot(s: &SurfaceModel, a: &str, b: &str) -> BigInt {
        s.pair(s.class_of(a).unwrap(), s.class_of(b).unwrap())
    }

    #[test]
    fn quadric_basics() {
        let s = SurfaceModel::new_quadric();
        let fx = s.basis_class("f_x").unwrap();
        let fy = s.basis_class("f_y").unwrap();
        assert_eq!(s.pair(&fx, &fx), BigInt::zero());
        assert_eq!(s.pair(&fx, &fy), BigInt::one());
        assert_eq!(
            s.pair(s.canonical_class(), s.canonical_class()),
            BigInt::from(8)
        );
        assert_eq!(s.chi_structure_sheaf(), int(1));
        assert!(s.is_hyperbolic());
    }

    #[test]
    fn declare_curve_checks() {
        let mut s = SurfaceModel::new_quadric();
        s.declare_curve("C", class_from_i64(&[1, 3])).unwrap();
        let c = s.class_of("C").unwrap().clone();
        assert_eq!(s.pair(&c, &c), BigInt::from(6));
        assert_eq!(s.pair(&c, &s.basis_class("f_x").unwrap()), BigInt::from(3));
        s.declare_curve("F1", class_from_i64(&[1, 0])).unwrap();
        assert_eq!(dot(&s, "F1", "F1"), BigInt::zero());
        assert!(matches!(
            s.declare_curve("D", class_from_i64(&[0, -1])),
            Err(SurfaceError::NotEffective { .. })
        ));
        assert!(matches!(
            s.declare_curve("D", class_from_i64(&[0, 0])),
            Err(SurfaceError::NotEffective { .. })
        ));
        assert!(matches!(
            s.declare_curve("C", class_from_i64(&[1, 0])),
            Err(SurfaceError::DuplicateName(_))
        ));
        assert!(matches!(
            s.declare_curve("X", class_from_i64(&[1, 0, 0])),
            Err(SurfaceError::RankMismatch { .. })
        ));
    }

    #[test]
    fn genus_examples() {
        let mut s = SurfaceModel::new_quadric();
        assert_eq!(s.arithmetic_genus(&class_from_i64(&[1, 3])), int(0));
        let k = s.canonical_class().clone();
        assert_eq!(s.arithmetic_genus(&k), int(9));
        s.blow_up("E", &[]).unwrap();
        assert_eq!(s.arithmetic_genus(s.class_of("E").unwrap()), int(0));
    }

    #[test]
    fn intersection_table_after_nine_blowups() {
        let s = char3_surface();
        assert_eq!(s.rank(), 11);
        for i in 1..=3 {
            let n = |l: &str| format!("{l}{i}");
            assert_eq!(dot(&s, &n("H"), &n("H")), BigInt::from(-2));
            assert_eq!(dot(&s, &n("G"), &n("G")), BigInt::from(-2));
            assert_eq!(dot(&s, &n("F"), &n("F")), BigInt::from(-3));
            assert_eq!(dot(&s, &n("E"), &n("E")), BigInt::from(-1));
            assert_eq!(dot(&s, "C", &n("E")), BigInt::one());
            assert_eq!(dot(&s, &n("E"), &n("F")), BigInt::one());
            assert_eq!(dot(&s, &n("E"), &n("H")), BigInt::one());
            assert_eq!(dot(&s, &n("H"), &n("G")), BigInt::one());
            assert_eq!(dot(&s, &n("G"), &n("E")), BigInt::zero());
            assert_eq!(dot(&s, "C", &n("F")), BigInt::zero());
            assert_eq!(dot(&s, "C", &n("G")), BigInt::zero());
            assert_eq!(dot(&s, "C", &n("H")), BigInt::zero());
        }
        assert_eq!(dot(&s, "C", "C"), BigInt::from(-3));
        assert_eq!(
            s.canonical_class(),
            &class_from_i64(&[-2, -2, 1, 1, 1, 1, 1, 1, 1, 1, 1])
        );
        assert!(s.is_hyperbolic());
    }

    #[test]
    fn canonical_dot_fiber_by_adjunction() {
        let s = char3_surface();
        let f1 = s.class_of("F1").unwrap();
        assert_eq!(s.pair(s.canonical_class(), f1), BigInt::one());
    }

    #[test]
    fn blowup_general_point() {
        let mut s = SurfaceModel::new_quadric();
        s.declare_curve("C", class_from_i64(&[1, 3])).unwrap();
        s.blow_up("E", &[]).unwrap();
        assert_eq!(s.class_of("C").unwrap(), &class_from_i64(&[1, 3, 0]));
        assert_eq!(dot(&s, "E", "E"), BigInt::from(-1));
    }

    #[test]
    fn blowup_rejects_impossible_incidence() {
        let mut s = SurfaceModel::new_quadric();
        s.declare_curve("F1", class_from_i64(&[1, 0])).unwrap();
        s.declare_curve("F2", class_from_i64(&[1, 0])).unwrap();
        assert!(matches!(
            s.blow_up("E", &[("F1", 1), ("F2", 1)]),
            Err(SurfaceError::IncidenceBudget { .. })
        ));
        assert!(matches!(
            s.blow_up("E", &[("Z", 1)]),
            Err(SurfaceError::UnknownName(_))
        ));
        assert!(matches!(
            s.blow_up("E", &[("F1", 0)]),
            Err(SurfaceError::ZeroMultiplicity { .. })
        ));
        // failed blow-ups leave the model untouched
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn plane_basics() {
        let mut s = SurfaceModel::new_plane();
        s.declare_curve("L", class_from_i64(&[1])).unwrap();
        s.declare_curve("Q", class_from_i64(&[2])).unwrap();
        assert_eq!(s.arithmetic_genus(&class_from_i64(&[3])), int(1));
        s.blow_up("E", &[("L", 1), ("Q", 1)]).unwrap();
        assert_eq!(dot(&s, "L", "Q"), BigInt::one());
        assert_eq!(dot(&s, "L", "L"), BigInt::zero());
        assert!(s.is_hyperbolic());
    }
}
