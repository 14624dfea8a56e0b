//! The `(p, n)` family extending the bundled construction.
//!
//! `C` has class `f_x + p·f_y` and is tangent to order `p` to `n` fibres.
//! Over each tangency point we blow up `p` times, each time at the point
//! where `C`, the fibre and the newest exceptional curve meet. This leaves a
//! chain of `p − 1` curves of self-intersection −2 and a final (−1)-curve;
//! the fibre drops to −p and `C` to `p(2 − n)`. Contracting `C`, the fibres
//! and the chains gives a surface of Picard rank one.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use kmsurf::singularity::SingularPointReport;
use kmsurf::{Rational, SingularityClass};
use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::checks::{int_value, rat_value};
use crate::report::scenario_digest;
use crate::scenario::{BaseKind, BlowupSpec, CurveSpec, Incidence, Scenario, SCHEMA_VERSION};

pub const PROVENANCE: &str = "extrapolated construction";

/// Largest `p · n` accepted; the lattice has rank `2 + p·n`.
pub const MAX_BLOWUPS: u64 = 160;

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("p must be at least 2, got {0}")]
    BadCharacteristic(u64),
    #[error("C not contractible (C² = {c_squared} ≥ 0); need at least 3 points")]
    NotContractible { c_squared: i64 },
    #[error("construction too large: p·n = {0} exceeds {MAX_BLOWUPS}")]
    TooLarge(u64),
    #[error("construction failed: {0}")]
    Construction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    DelPezzo,
    KTrivial,
    CanonicallyAmple,
}

impl Verdict {
    pub fn from_degree(deg: &Rational) -> Self {
        if deg.is_positive() {
            Verdict::DelPezzo
        } else if deg.is_negative() {
            Verdict::CanonicallyAmple
        } else {
            Verdict::KTrivial
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::DelPezzo => "del_pezzo",
            Verdict::KTrivial => "K-trivial",
            Verdict::CanonicallyAmple => "canonically_ample",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Exploration {
    pub p: u64,
    pub n_points: u64,
    pub scenario: Scenario,
    pub c_self_intersection: BigInt,
    pub fibre_self_intersection: BigInt,
    pub target_rank: usize,
    /// `deg(−K_T)` against a general fibre.
    pub degree: Rational,
    pub verdict: Verdict,
    pub c_discrepancy: Rational,
    pub min_discrepancy: Option<Rational>,
    pub singularity_class: SingularityClass,
    pub singular_points: Vec<SingularPointReport>,
    pub census: BTreeMap<String, usize>,
}

/// Names of the `p` exceptional curves over point `i`, in blow-up order.
/// For `p = 3` these are the names of the bundled scenario.
fn chain_names(p: u64, i: u64) -> Vec<String> {
    let mut names: Vec<String> = if p == 3 {
        vec![format!("G{i}"), format!("H{i}")]
    } else {
        (1..p).map(|j| format!("R{i}_{j}")).collect()
    };
    names.push(format!("E{i}"));
    names
}

/// Curves, blow-ups and contraction of the `(p, n)` construction.
pub fn frobenius_scenario(p: u64, n_points: u64) -> Result<Scenario, ExploreError> {
    if p < 2 {
        return Err(ExploreError::BadCharacteristic(p));
    }
    if n_points < 3 {
        let c_squared = (p as i64) * (2 - n_points as i64);
        return Err(ExploreError::NotContractible { c_squared });
    }
    if p.saturating_mul(n_points) > MAX_BLOWUPS {
        return Err(ExploreError::TooLarge(p.saturating_mul(n_points)));
    }
    let mut curves = vec![CurveSpec {
        name: "C".into(),
        class: vec![1, p as i64],
    }];
    for i in 1..=n_points {
        curves.push(CurveSpec {
            name: format!("F{i}"),
            class: vec![1, 0],
        });
    }
    let mut blowups = Vec::new();
    let mut contraction: Vec<String> = vec!["C".into()];
    contraction.extend((1..=n_points).map(|i| format!("F{i}")));
    for i in 1..=n_points {
        let names = chain_names(p, i);
        for (j, name) in names.iter().enumerate() {
            let mut incident = vec![
                Incidence {
                    curve: "C".into(),
                    mult: 1,
                },
                Incidence {
                    curve: format!("F{i}"),
                    mult: 1,
                },
            ];
            if j > 0 {
                incident.push(Incidence {
                    curve: names[j - 1].clone(),
                    mult: 1,
                });
            }
            blowups.push(BlowupSpec {
                exceptional_name: name.clone(),
                incident,
            });
        }
        contraction.extend(names[..names.len() - 1].iter().cloned());
    }
    Ok(Scenario {
        schema_version: SCHEMA_VERSION,
        name: format!("frobenius-p{p}-n{n_points}"),
        base: BaseKind::Quadric,
        curves,
        blowups,
        contraction,
        witness: None,
        divisors: vec![],
        checks: vec![],
    })
}

/// Builds the `(p, n)` surface and reports `deg(−K_T)`, the resulting
/// verdict and the singular points.
pub fn explore_frobenius(p: u64, n_points: u64) -> Result<Exploration, ExploreError> {
    let scenario = frobenius_scenario(p, n_points)?;
    let built = scenario
        .build()
        .map_err(|e| ExploreError::Construction(e.to_string()))?;
    let (model, c) = (&built.model, &built.contraction);
    let err = |e: kmsurf::ContractionError| ExploreError::Construction(e.to_string());
    let self_int = |name: &str| {
        let class = model.class_of(name).expect("declared curve");
        model.pair(class, class)
    };
    let neg_k = -c.canonical_target();
    let degree = c.degree(&neg_k).map_err(err)?;
    let disc = c.discrepancies().map_err(err)?;
    let c_discrepancy = disc
        .values
        .iter()
        .find(|(n, _)| n == "C")
        .map(|(_, a)| a.clone())
        .expect("C is contracted");
    let singular_points = c.classify_singularities().map_err(err)?;
    let mut census = BTreeMap::new();
    for pt in &singular_points {
        *census.entry(pt.hj_type.to_string()).or_insert(0) += 1;
    }
    Ok(Exploration {
        p,
        n_points,
        c_self_intersection: self_int("C"),
        fibre_self_intersection: self_int("F1"),
        target_rank: c.target_rank(),
        verdict: Verdict::from_degree(&degree),
        degree,
        c_discrepancy,
        min_discrepancy: disc.minimum,
        singularity_class: disc.class,
        singular_points,
        census,
        scenario,
    })
}

impl Exploration {
    fn note(&self) -> Option<&'static str> {
        (self.p == 2).then_some(
            "p = 2 does not reproduce the original characteristic-2 surface; no reference values exist",
        )
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("kind".into(), json!("exploration"));
        m.insert("provenance".into(), json!(PROVENANCE));
        m.insert("p".into(), json!(self.p));
        m.insert("n_points".into(), json!(self.n_points));
        m.insert("digest".into(), json!(scenario_digest(&self.scenario)));
        m.insert(
            "c_self_intersection".into(),
            int_value(&self.c_self_intersection),
        );
        m.insert(
            "fibre_self_intersection".into(),
            int_value(&self.fibre_self_intersection),
        );
        m.insert("target_rank".into(), json!(self.target_rank));
        m.insert("degree_anticanonical".into(), rat_value(&self.degree));
        m.insert("verdict".into(), json!(self.verdict.as_str()));
        m.insert("c_discrepancy".into(), rat_value(&self.c_discrepancy));
        m.insert(
            "min_discrepancy".into(),
            self.min_discrepancy.as_ref().map_or(Value::Null, rat_value),
        );
        m.insert(
            "singularity_class".into(),
            json!(self.singularity_class.as_str()),
        );
        m.insert("singular_points".into(), json!(self.singular_points.len()));
        m.insert("census".into(), json!(self.census));
        if let Some(note) = self.note() {
            m.insert("note".into(), json!(note));
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "p = {}, points = {} ({PROVENANCE})",
            self.p, self.n_points
        )
        .unwrap();
        writeln!(
            out,
            "C^2 = {}, fibre^2 = {}",
            self.c_self_intersection, self.fibre_self_intersection
        )
        .unwrap();
        writeln!(out, "Picard rank of T = {}", self.target_rank).unwrap();
        writeln!(
            out,
            "deg(-K_T) = {} ({})",
            self.degree,
            self.verdict.as_str()
        )
        .unwrap();
        writeln!(out, "a(C) = {}", self.c_discrepancy).unwrap();
        if let Some(min) = &self.min_discrepancy {
            writeln!(
                out,
                "minimal discrepancy = {min} ({})",
                self.singularity_class
            )
            .unwrap();
        }
        writeln!(out, "singular points = {}", self.singular_points.len()).unwrap();
        for (t, k) in &self.census {
            writeln!(out, "    {t} x {k}").unwrap();
        }
        if let Some(note) = self.note() {
            writeln!(out, "note: {note}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kmsurf::{int, rat};

    #[test]
    fn oracle_table() {
        // (p, n) -> (deg(-K_T), a(C) as coefficient of C in ψ*K_T, C²),
        // from an independent solve of the Mumford system.
        let cases = [
            (2, 3, int(2), int(0), -2),
            (3, 3, int(1), rat(1, 3), -3),
            (5, 3, int(-1), rat(3, 5), -5),
            (7, 3, int(-3), rat(5, 7), -7),
            (3, 4, int(0), rat(2, 3), -6),
            (5, 4, int(-2), rat(4, 5), -10),
            (2, 4, int(1), rat(1, 2), -4),
        ];
        for (p, n, deg, coeff, c2) in cases {
            let e = explore_frobenius(p, n).unwrap();
            assert_eq!(e.degree, deg, "p={p} n={n}");
            assert_eq!(e.c_discrepancy, -coeff, "p={p} n={n}");
            assert_eq!(e.c_self_intersection, BigInt::from(c2));
            assert_eq!(e.fibre_self_intersection, BigInt::from(-(p as i64)));
            assert_eq!(e.target_rank, 1);
        }
    }

    #[test]
    fn verdicts() {
        assert_eq!(explore_frobenius(3, 3).unwrap().verdict, Verdict::DelPezzo);
        assert_eq!(explore_frobenius(3, 4).unwrap().verdict, Verdict::KTrivial);
        assert_eq!(
            explore_frobenius(5, 3).unwrap().verdict,
            Verdict::CanonicallyAmple
        );
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            explore_frobenius(3, 2),
            Err(ExploreError::NotContractible { c_squared: 0 })
        ));
        assert!(matches!(
            explore_frobenius(1, 3),
            Err(ExploreError::BadCharacteristic(1))
        ));
        assert!(matches!(
            explore_frobenius(50, 10),
            Err(ExploreError::TooLarge(500))
        ));
        let msg = explore_frobenius(3, 1).unwrap_err().to_string();
        assert!(msg.starts_with("C not contractible"));
    }
}
