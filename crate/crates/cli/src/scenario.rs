//! Scenario files: a blow-up construction, a contraction, named divisors and
//! the checks to run against them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use kmsurf::{class_from_i64, Base, Contraction, QDivisor, Rational, SurfaceModel};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_with::skip_serializing_none;
use thiserror::Error;

use crate::expr::{parse_divisor, parse_rational, rational_string, ExprError, CANONICAL};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A rational serialized as the string `"a/b"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_string(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s)
            .map(Exact)
            .ok_or_else(|| serde::de::Error::custom(format!("not a rational \"a/b\": {s:?}")))
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Quadric,
    Plane,
}

impl From<BaseKind> for Base {
    fn from(b: BaseKind) -> Base {
        match b {
            BaseKind::Quadric => Base::Quadric,
            BaseKind::Plane => Base::Plane,
        }
    }
}

/// A curve on the base surface, given by its base class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub name: String,
    pub class: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Incidence {
    pub curve: String,
    pub mult: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSpec {
    pub exceptional_name: String,
    pub incident: Vec<Incidence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedExpr {
    pub name: String,
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairValue {
    pub a: String,
    pub b: String,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

/// A check and its (optional) expected values. Missing expectations are
/// computed and reported but not compared.
#[skip_serializing_none]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    IntersectionTable {
        entries: Vec<PairValue>,
    },
    /// `ψ*K_T − K_S` on the contracted curves, and the discrepancy class.
    CanonicalPullback {
        coefficients: Option<BTreeMap<String, Exact>>,
        min_discrepancy: Option<Exact>,
        singularity_class: Option<String>,
    },
    Rank {
        target_rank: Option<usize>,
    },
    Degree {
        divisor: String,
        expected: Option<Exact>,
    },
    Ample {
        divisor: String,
        expected: Option<bool>,
    },
    /// `r` with `divisor ≡ r · reference`.
    Proportional {
        divisor: String,
        reference: String,
        expected: Option<Exact>,
    },
    Singularities {
        count: Option<usize>,
        types: Option<BTreeMap<String, usize>>,
    },
    H0Anticanonical {
        exceptional_part: String,
        round_down: Option<String>,
        base_class: Option<Vec<i64>>,
        h0: Option<u64>,
    },
    KvvFailure {
        divisor: String,
        pullback: Option<BTreeMap<String, Exact>>,
        floor: Option<String>,
        nef_degrees: Option<BTreeMap<String, Exact>>,
        k_dot_floor: Option<Exact>,
        floor_squared: Option<Exact>,
        euler_char: Option<Exact>,
        h1_nonzero: Option<bool>,
    },
    Cone {
        polarization: String,
        r: Option<Exact>,
        section_discrepancy: Option<Exact>,
        crepant: Option<bool>,
        cm: Option<bool>,
        class_group: Option<GroupSpec>,
    },
    ClassGroup {
        rank: Option<usize>,
        torsion: Option<Vec<u64>>,
    },
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::IntersectionTable { .. } => "intersection_table",
            Check::CanonicalPullback { .. } => "canonical_pullback",
            Check::Rank { .. } => "rank",
            Check::Degree { .. } => "degree",
            Check::Ample { .. } => "ample",
            Check::Proportional { .. } => "proportional",
            Check::Singularities { .. } => "singularities",
            Check::H0Anticanonical { .. } => "h0_anticanonical",
            Check::KvvFailure { .. } => "kvv_failure",
            Check::Cone { .. } => "cone",
            Check::ClassGroup { .. } => "class_group",
        }
    }

    /// Divisor expressions the check refers to.
    fn expressions(&self) -> Vec<&str> {
        match self {
            Check::Degree { divisor, .. } | Check::Ample { divisor, .. } => vec![divisor],
            Check::Proportional {
                divisor, reference, ..
            } => vec![divisor, reference],
            Check::H0Anticanonical {
                exceptional_part,
                round_down,
                ..
            } => std::iter::once(exceptional_part.as_str())
                .chain(round_down.as_deref())
                .collect(),
            Check::KvvFailure { divisor, floor, .. } => std::iter::once(divisor.as_str())
                .chain(floor.as_deref())
                .collect(),
            Check::Cone { polarization, .. } => vec![polarization],
            _ => vec![],
        }
    }
}

#[skip_serializing_none]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub base: BaseKind,
    pub curves: Vec<CurveSpec>,
    #[serde(default)]
    pub blowups: Vec<BlowupSpec>,
    #[serde(default)]
    pub contraction: Vec<String>,
    /// Curve class used for rank-one degrees; defaults to a general fibre
    /// (quadric) or line (plane).
    pub witness: Option<String>,
    #[serde(default)]
    pub divisors: Vec<NamedExpr>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("{context}: {source}")]
    Surface {
        context: String,
        source: Box<kmsurf::SurfaceError>,
    },
    #[error("{context}: {source}")]
    Expr { context: String, source: ExprError },
    #[error("contraction: {0}")]
    Contraction(Box<kmsurf::ContractionError>),
    #[error("{context}: {message}")]
    Invalid { context: String, message: String },
}

/// A validated scenario with its model, contraction and resolved divisors.
#[derive(Debug, Clone)]
pub struct Built {
    pub scenario: Scenario,
    pub model: SurfaceModel,
    pub contraction: Contraction,
    pub divisors: BTreeMap<String, QDivisor>,
}

impl From<kmsurf::ContractionError> for ScenarioError {
    fn from(e: kmsurf::ContractionError) -> Self {
        ScenarioError::Contraction(Box::new(e))
    }
}

impl Built {
    pub fn parse(&self, expr: &str) -> Result<QDivisor, ExprError> {
        parse_divisor(expr, &self.model, &self.divisors)
    }
}

impl Scenario {
    /// Builds the model and validates every name and expression.
    pub fn build(&self) -> Result<Built, ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::SchemaVersion(self.schema_version));
        }
        let mut model = SurfaceModel::new(self.base.into());
        for (i, c) in self.curves.iter().enumerate() {
            model
                .declare_curve(&c.name, class_from_i64(&c.class))
                .map_err(|source| ScenarioError::Surface {
                    source: Box::new(source),
                    context: format!("curves[{i}] ({})", c.name),
                })?;
        }
        for (i, b) in self.blowups.iter().enumerate() {
            let incident: Vec<(&str, u32)> = b
                .incident
                .iter()
                .map(|x| (x.curve.as_str(), x.mult))
                .collect();
            model
                .blow_up(&b.exceptional_name, &incident)
                .map_err(|source| ScenarioError::Surface {
                    source: Box::new(source),
                    context: format!("blowups[{i}] ({})", b.exceptional_name),
                })?;
        }
        let names: Vec<&str> = self.contraction.iter().map(String::as_str).collect();
        let mut contraction = Contraction::new(&model, &names)?;

        let mut divisors = BTreeMap::new();
        for (i, d) in self.divisors.iter().enumerate() {
            let context = format!("divisors[{i}] ({})", d.name);
            if d.name == CANONICAL
                || model.contains(&d.name)
                || model.basis_index(&d.name).is_some()
                || divisors.contains_key(&d.name)
            {
                return Err(ScenarioError::Invalid {
                    context,
                    message: "name is already taken".into(),
                });
            }
            let value = parse_divisor(&d.expr, &model, &divisors)
                .map_err(|source| ScenarioError::Expr { context, source })?;
            divisors.insert(d.name.clone(), value);
        }
        if let Some(w) = &self.witness {
            let witness =
                parse_divisor(w, &model, &divisors).map_err(|source| ScenarioError::Expr {
                    context: "witness".into(),
                    source,
                })?;
            contraction = contraction.with_witness(witness)?;
        }

        for (i, check) in self.checks.iter().enumerate() {
            let context = format!("checks[{i}] ({})", check.kind());
            for e in check.expressions() {
                parse_divisor(e, &model, &divisors).map_err(|source| ScenarioError::Expr {
                    context: context.clone(),
                    source,
                })?;
            }
            if let Check::IntersectionTable { entries } = check {
                for p in entries {
                    for n in [&p.a, &p.b] {
                        if !model.contains(n) {
                            return Err(ScenarioError::Invalid {
                                context,
                                message: format!("unknown curve {n:?}"),
                            });
                        }
                    }
                }
            }
        }
        Ok(Built {
            scenario: self.clone(),
            model,
            contraction,
            divisors,
        })
    }

    /// Canonical JSON text (field order as declared, two-space indent).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let scenario = Scenario::from_json(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    scenario.build().map_err(|source| CliError::Invalid {
        path: path.display().to_string(),
        source,
    })?;
    Ok(scenario)
}
