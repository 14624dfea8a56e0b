//! Evaluation of scenario checks against a built model.

use std::collections::BTreeMap;

use kmsurf::cohomology::{verify_h0_anticanonical_zero, verify_kvv_failure};
use kmsurf::cone::{build_cone, PICARD_GROUP_NOTE};
use kmsurf::{ClassGroupReport, QDivisor, Rational};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::expr::rational_string;
use crate::report::{CheckResult, Mismatch, Status};
use crate::scenario::{Built, Check, Exact, GroupSpec};

pub fn rat_value(r: &Rational) -> Value {
    Value::String(rational_string(r))
}

pub fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => json!(x),
        None => Value::String(n.to_string()),
    }
}

fn class_value(c: &[BigInt]) -> Value {
    Value::Array(c.iter().map(int_value).collect())
}

fn group_value(g: &ClassGroupReport) -> Value {
    json!({
        "rank": g.rank,
        "torsion": g.torsion.iter().map(int_value).collect::<Vec<_>>(),
        "group": g.to_string(),
    })
}

fn group_spec_value(g: &GroupSpec) -> Value {
    json!({ "rank": g.rank, "torsion": g.torsion })
}

fn exact_map(m: &BTreeMap<String, Exact>) -> BTreeMap<String, Rational> {
    m.iter().map(|(k, v)| (k.clone(), v.0.clone())).collect()
}

struct Eval<'a> {
    built: &'a Built,
    computed: Map<String, Value>,
    mismatches: Vec<Mismatch>,
}

impl<'a> Eval<'a> {
    fn put(&mut self, key: &str, v: Value) {
        self.computed.insert(key.to_string(), v);
    }

    /// Records `actual` and compares it to `expected` when one is given.
    fn check(&mut self, key: &str, expected: Option<Value>, actual: Value) {
        if let Some(e) = expected {
            if e != actual {
                self.mismatches.push(Mismatch {
                    field: key.to_string(),
                    expected: e,
                    actual: actual.clone(),
                });
            }
        }
        self.put(key, actual);
    }

    fn check_rat(&mut self, key: &str, expected: &Option<Exact>, actual: &Rational) {
        self.check(
            key,
            expected.as_ref().map(|e| rat_value(&e.0)),
            rat_value(actual),
        );
    }

    /// Compares two coefficient maps, treating absent names as zero. The
    /// computed side is recorded in `order`.
    fn check_coefficients(
        &mut self,
        key: &str,
        expected: &Option<BTreeMap<String, Exact>>,
        actual: &[(String, Rational)],
    ) {
        let value: Map<String, Value> = actual
            .iter()
            .map(|(n, c)| (n.clone(), rat_value(c)))
            .collect();
        if let Some(exp) = expected {
            let exp = exact_map(exp);
            let act: BTreeMap<&str, &Rational> =
                actual.iter().map(|(n, c)| (n.as_str(), c)).collect();
            let zero = Rational::zero();
            let mut names: Vec<&str> = exp.keys().map(String::as_str).collect();
            names.extend(act.keys().copied());
            names.sort_unstable();
            names.dedup();
            for n in names {
                let e = exp.get(n).unwrap_or(&zero);
                let a = act.get(n).copied().unwrap_or(&zero);
                if e != a {
                    self.mismatches.push(Mismatch {
                        field: format!("{key}.{n}"),
                        expected: rat_value(e),
                        actual: rat_value(a),
                    });
                }
            }
        }
        self.put(key, Value::Object(value));
    }

    fn check_divisor(
        &mut self,
        key: &str,
        expected: &Option<String>,
        actual: &QDivisor,
    ) -> Result<(), String> {
        let shown = Value::String(actual.display(&self.built.model).to_string());
        if let Some(src) = expected {
            let e = self.built.parse(src).map_err(|e| e.to_string())?;
            if e != *actual {
                self.mismatches.push(Mismatch {
                    field: key.to_string(),
                    expected: Value::String(e.display(&self.built.model).to_string()),
                    actual: shown.clone(),
                });
            }
        }
        self.put(key, shown);
        Ok(())
    }

    fn divisor(&self, src: &str) -> Result<QDivisor, String> {
        self.built.parse(src).map_err(|e| e.to_string())
    }
}

fn claim(check: &Check) -> &'static str {
    match check {
        Check::IntersectionTable { .. } => "intersection numbers of the blow-up sequence",
        Check::CanonicalPullback { .. } => "pullback of the canonical class and discrepancies",
        Check::Rank { .. } => "Picard rank of the contracted surface",
        Check::Degree { .. } => "degree against the witness curve",
        Check::Ample { .. } => "ampleness on a Picard rank one target",
        Check::Proportional { .. } => "numerical proportionality constant",
        Check::Singularities { .. } => "singular points of the contracted surface",
        Check::H0Anticanonical { .. } => "no sections of the anticanonical sheaf",
        Check::KvvFailure { .. } => "h1(O(-A)) is nonzero by Riemann-Roch on the resolution",
        Check::Cone { .. } => "cone over the polarized surface",
        Check::ClassGroup { .. } => "divisor class group of the contracted surface",
    }
}

/// Runs every check of the scenario, in file order.
pub fn run_checks(built: &Built) -> Vec<CheckResult> {
    built
        .scenario
        .checks
        .iter()
        .map(|c| run_check(built, c))
        .collect()
}

pub fn run_check(built: &Built, check: &Check) -> CheckResult {
    let mut ev = Eval {
        built,
        computed: Map::new(),
        mismatches: Vec::new(),
    };
    let error = evaluate(&mut ev, check).err();
    let status = if error.is_none() && ev.mismatches.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    CheckResult {
        kind: check.kind().to_string(),
        claim: claim(check).to_string(),
        status,
        computed: ev.computed,
        mismatches: ev.mismatches,
        error,
    }
}

fn evaluate(ev: &mut Eval<'_>, check: &Check) -> Result<(), String> {
    let b = ev.built;
    let model = &b.model;
    let c = &b.contraction;
    match check {
        Check::IntersectionTable { entries } => {
            for p in entries {
                let v = model.pair(
                    model.class_of(&p.a).map_err(|e| e.to_string())?,
                    model.class_of(&p.b).map_err(|e| e.to_string())?,
                );
                let key = if p.a == p.b {
                    format!("{}^2", p.a)
                } else {
                    format!("{}.{}", p.a, p.b)
                };
                ev.check(&key, Some(json!(p.value)), int_value(&v));
            }
        }
        Check::CanonicalPullback {
            coefficients,
            min_discrepancy,
            singularity_class,
        } => {
            let kt = c.canonical_target();
            let pulled = c.pullback(&kt).map_err(|e| e.to_string())?;
            let diff = pulled - c.canonical_source();
            let coeffs: Vec<(String, Rational)> = c
                .contracted()
                .iter()
                .map(|n| (n.clone(), diff.coefficient(n)))
                .collect();
            ev.check_coefficients("coefficients", coefficients, &coeffs);
            let d = c.discrepancies().map_err(|e| e.to_string())?;
            let values: Map<String, Value> = d
                .values
                .iter()
                .map(|(n, a)| (n.clone(), rat_value(a)))
                .collect();
            ev.put("discrepancies", Value::Object(values));
            let min = d.minimum.as_ref().map_or(Value::Null, rat_value);
            ev.check(
                "min_discrepancy",
                min_discrepancy.as_ref().map(|e| rat_value(&e.0)),
                min,
            );
            ev.check(
                "singularity_class",
                singularity_class.clone().map(Value::String),
                Value::String(d.class.as_str().into()),
            );
        }
        Check::Rank { target_rank } => {
            ev.put("source_rank", json!(model.rank()));
            ev.put("contracted", json!(c.contracted().len()));
            ev.check(
                "target_rank",
                target_rank.map(|r| json!(r)),
                json!(c.target_rank()),
            );
        }
        Check::Degree { divisor, expected } => {
            let d = ev.divisor(divisor)?;
            ev.put("divisor", Value::String(divisor.clone()));
            let deg = c.degree(&d).map_err(|e| e.to_string())?;
            ev.check_rat("degree", expected, &deg);
        }
        Check::Ample { divisor, expected } => {
            let d = ev.divisor(divisor)?;
            ev.put("divisor", Value::String(divisor.clone()));
            let deg = c.degree(&d).map_err(|e| e.to_string())?;
            ev.put("degree", rat_value(&deg));
            let ample = c.is_ample_rank1(&d).map_err(|e| e.to_string())?;
            ev.check("ample", expected.map(Value::Bool), Value::Bool(ample));
        }
        Check::Proportional {
            divisor,
            reference,
            expected,
        } => {
            let d1 = ev.divisor(divisor)?;
            let d2 = ev.divisor(reference)?;
            ev.put("divisor", Value::String(divisor.clone()));
            ev.put("reference", Value::String(reference.clone()));
            let r = c
                .numerically_proportional(&d1, &d2)
                .map_err(|e| e.to_string())?
                .ok_or("reference divisor is numerically trivial")?;
            ev.check_rat("ratio", expected, &r);
        }
        Check::Singularities { count, types } => {
            let pts = c.classify_singularities().map_err(|e| e.to_string())?;
            let mut census: BTreeMap<String, usize> = BTreeMap::new();
            for p in &pts {
                *census.entry(p.hj_type.to_string()).or_default() += 1;
            }
            ev.check("count", count.map(|n| json!(n)), json!(pts.len()));
            ev.check("types", types.as_ref().map(|t| json!(t)), json!(census));
            let points: Vec<Value> = pts
                .iter()
                .map(|p| {
                    json!({
                        "curves": p.component.join("-"),
                        "self_intersections": p.self_intersections.iter().map(|b| int_value(&-b)).collect::<Vec<_>>(),
                        "type": p.hj_type.to_string(),
                        "label": p.label.as_str(),
                    })
                })
                .collect();
            ev.put("points", Value::Array(points));
        }
        Check::H0Anticanonical {
            exceptional_part,
            round_down,
            base_class,
            h0,
        } => {
            let x = ev.divisor(exceptional_part)?;
            let r = verify_h0_anticanonical_zero(c, &x).map_err(|e| e.to_string())?;
            ev.check_divisor("round_down", round_down, &r.round_down)?;
            ev.put(
                "exceptional_part",
                Value::String(x.display(model).to_string()),
            );
            if !r.unknown_names.is_empty() {
                ev.put("unknown_names", json!(r.unknown_names));
            }
            if let Some(d) = &r.difference {
                ev.put("difference", class_value(d));
            }
            ev.check(
                "identity_holds",
                Some(Value::Bool(true)),
                Value::Bool(r.identity_holds),
            );
            ev.check(
                "exceptional_part_effective",
                Some(Value::Bool(true)),
                Value::Bool(r.exceptional_part_effective),
            );
            ev.check(
                "base_class",
                base_class.as_ref().map(|v| json!(v)),
                class_value(&r.base_class),
            );
            ev.check(
                "h0",
                h0.map(|v| json!(v)),
                r.h0.map_or(Value::Null, |v| json!(v)),
            );
        }
        Check::KvvFailure {
            divisor,
            pullback,
            floor,
            nef_degrees,
            k_dot_floor,
            floor_squared,
            euler_char,
            h1_nonzero,
        } => {
            let a = ev.divisor(divisor)?;
            ev.put("divisor", Value::String(divisor.clone()));
            let r = verify_kvv_failure(c, &a).map_err(|e| e.to_string())?;
            let terms = r.pullback_expansion.ordered_terms(model);
            ev.check_coefficients("pullback", pullback, &terms);
            ev.check_divisor("floor", floor, &r.floor)?;
            ev.put("relatively_nef", Value::Bool(r.relatively_nef.nef));
            ev.check_coefficients("nef_degrees", nef_degrees, &r.relatively_nef.degrees);
            ev.check_rat("k_dot_floor", k_dot_floor, &r.k_dot_floor);
            ev.check_rat("floor_squared", floor_squared, &r.floor_squared);
            ev.check_rat("euler_char", euler_char, &r.euler_char);
            ev.check(
                "h1_nonzero",
                h1_nonzero.map(Value::Bool),
                Value::Bool(r.h1_nonzero),
            );
            ev.put(
                "not_globally_f_split",
                Value::Bool(r.corollary_flags.not_globally_f_split),
            );
            ev.put(
                "no_w2_liftable_log_resolution",
                Value::Bool(r.corollary_flags.no_w2_liftable_log_resolution),
            );
            ev.put("leray", Value::String(r.leray_note.into()));
        }
        Check::Cone {
            polarization,
            r,
            section_discrepancy,
            crepant,
            cm,
            class_group,
        } => {
            let a = ev.divisor(polarization)?;
            ev.put("polarization", Value::String(polarization.clone()));
            let mut cone = build_cone(c, &a).map_err(|e| e.to_string())?;
            ev.check_rat("r", r, &cone.r);
            ev.check_rat(
                "section_discrepancy",
                section_discrepancy,
                &cone.section_discrepancy,
            );
            ev.check(
                "crepant",
                crepant.map(Value::Bool),
                Value::Bool(cone.verdicts.crepant_partial_resolution),
            );
            // H²_v(O) contains H¹(T, O(-A)), the m = -1 summand.
            let h1 = verify_kvv_failure(c, &a)
                .map(|k| k.h1_nonzero)
                .unwrap_or(false);
            let verdict = cone.local_cohomology_certificate(-1, h1);
            if let Some(cert) = &cone.certificate {
                ev.put("certificate_summand", json!(cert.summand));
            }
            ev.check(
                "cm",
                cm.map(Value::Bool),
                verdict.map_or(Value::Null, Value::Bool),
            );
            ev.put("picard_group", Value::String(PICARD_GROUP_NOTE.into()));
            let group = cone
                .cone_class_group
                .as_ref()
                .map_or(Value::Null, group_value);
            if let Some(spec) = class_group {
                let actual = cone.cone_class_group.as_ref().map(|g| {
                    json!({
                        "rank": g.rank,
                        "torsion": g.torsion.iter().map(int_value).collect::<Vec<_>>(),
                    })
                });
                let expected = group_spec_value(spec);
                if actual.as_ref() != Some(&expected) {
                    ev.mismatches.push(Mismatch {
                        field: "class_group".into(),
                        expected,
                        actual: actual.unwrap_or(Value::Null),
                    });
                }
            }
            ev.put("class_group", group);
            ev.put("summary", Value::String(cone.summary().to_string()));
        }
        Check::ClassGroup { rank, torsion } => {
            let g = c.class_group().map_err(|e| e.to_string())?;
            ev.check("rank", rank.map(|r| json!(r)), json!(g.rank));
            ev.check(
                "torsion",
                torsion.as_ref().map(|t| json!(t)),
                Value::Array(g.torsion.iter().map(int_value).collect()),
            );
            ev.put("group", Value::String(g.to_string()));
        }
    }
    Ok(())
}
