//! Command reports and their two renderings.
//!
//! CSV columns per command:
//!
//! | command     | columns                                                             |
//! |-------------|---------------------------------------------------------------------|
//! | fan         | `ray,coordinates`                                                   |
//! | class-group | `ray,free,torsion` (one row per ray class)                          |
//! | sections    | `divisor,l`                                                         |
//! | ehrhart     | `residue,coefficients` (ascending, `;`-separated)                   |
//! | zeta-coeffs | `d,M_d,ord_p`                                                       |
//! | pole        | `d,ord_p_order,ord_p_order_minus_1`                                 |
//! | mero-eval   | `valuation,unit,precision`                                          |
//!
//! Rationals are written `num/den`; an absent valuation (zero) is empty in
//! CSV and `null` in text output.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use toric_zeta_core::ehrhart::QuasiPolynomial;
use toric_zeta_core::lattice::ClassCoords;
use toric_zeta_core::padic::{PadicScalar, QuadraticBound};
use toric_zeta_core::toric::{Fan, ToricVarietyModel, TorusDivisor};
use toric_zeta_core::zeta::PoleReport;

use crate::{dump_fan, OutputFormat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreSummary {
    pub term: usize,
    pub numerator_bound: QuadraticBound,
    pub denominator_bound: Option<QuadraticBound>,
    pub bound_check: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Report {
    Fan(Fan),
    ClassGroup { rank: usize, torsion: Vec<BigInt>, ray_classes: Vec<ClassCoords> },
    Sections { divisor: Vec<i64>, dim: u64 },
    Ehrhart { divisor: TorusDivisor, qp: QuasiPolynomial, validated_to: i64, mismatches: usize },
    Zeta { q: u64, p: u64, rows: Vec<(usize, BigInt, Option<u64>)> },
    Pole(PoleReport),
    MeroEval { polynomial: String, t: BigRational, terms: usize, cores: Vec<CoreSummary>, value: PadicScalar },
}

pub fn class_group(model: &ToricVarietyModel) -> Report {
    let n = model.ray_count();
    let ray_classes = (0..n).map(|i| model.class_of(&TorusDivisor::unit(n, i)).expect("ray count matches")).collect();
    Report::ClassGroup {
        rank: model.class_group.rank,
        torsion: model.class_group.invariant_factors.clone(),
        ray_classes,
    }
}

pub fn rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn ints(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn bound_json(b: &QuadraticBound) -> Value {
    json!({ "c": rational(&b.c), "d": rational(&b.d) })
}

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl Report {
    pub fn to_json(&self) -> Value {
        match self {
            Report::Fan(f) => serde_json::from_str(&dump_fan(f)).expect("dump is valid JSON"),
            Report::ClassGroup { rank, torsion, ray_classes } => json!({
                "rank": rank,
                "torsion": ints(torsion),
                "ray_classes": ray_classes
                    .iter()
                    .map(|c| json!({ "free": ints(&c.free), "torsion": ints(&c.torsion) }))
                    .collect::<Vec<_>>(),
            }),
            Report::Sections { divisor, dim } => json!({ "divisor": divisor, "l": dim }),
            Report::Ehrhart { divisor, qp, validated_to, mismatches } => json!({
                "divisor": ints(&divisor.0),
                "period": qp.period(),
                "degree": qp.degree(),
                "components": qp.components().iter().map(|c| c.iter().map(rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "validated_to": validated_to,
                "mismatches": mismatches,
            }),
            Report::Zeta { q, p, rows } => json!({
                "q": q,
                "p": p,
                "coefficients": rows
                    .iter()
                    .map(|(d, m, v)| json!({ "d": d, "M_d": m.to_string(), "ord_p": v }))
                    .collect::<Vec<_>>(),
            }),
            Report::Pole(r) => json!({
                "order": r.order,
                "special_value": rational(&r.special_value),
                "special_value_residue": r.special_value_residue.to_string(),
                "precision": r.precision,
                "window": [r.window.0, r.window.1],
                "d0": r.d0,
                "power_sum_at_one": r.power_sum_at_one.as_ref().map(ToString::to_string),
            }),
            Report::MeroEval { polynomial, t, terms, cores, value } => json!({
                "polynomial": polynomial,
                "t": rational(t),
                "terms": terms,
                "entire_cores": cores
                    .iter()
                    .map(|c| json!({
                        "term": c.term,
                        "numerator_bound": bound_json(&c.numerator_bound),
                        "denominator_bound": c.denominator_bound.as_ref().map(bound_json),
                        "bound_check": if c.bound_check { "pass" } else { "fail" },
                    }))
                    .collect::<Vec<_>>(),
                "value": {
                    "valuation": value.valuation(),
                    "unit": value.unit().to_string(),
                    "precision": value.precision(),
                    "residue": value.residue().map(|r| r.to_string()),
                },
            }),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut row = |cells: Vec<String>| {
            out.push_str(&cells.join(","));
            out.push('\n');
        };
        match self {
            Report::Fan(f) => {
                row(vec!["ray".into(), "coordinates".into()]);
                for (i, r) in f.rays.iter().enumerate() {
                    let c: Vec<String> = r.iter().map(ToString::to_string).collect();
                    row(vec![i.to_string(), c.join(";")]);
                }
            }
            Report::ClassGroup { ray_classes, .. } => {
                row(vec!["ray".into(), "free".into(), "torsion".into()]);
                for (i, c) in ray_classes.iter().enumerate() {
                    row(vec![i.to_string(), ints(&c.free).join(";"), ints(&c.torsion).join(";")]);
                }
            }
            Report::Sections { divisor, dim } => {
                row(vec!["divisor".into(), "l".into()]);
                let d: Vec<String> = divisor.iter().map(ToString::to_string).collect();
                row(vec![d.join(";"), dim.to_string()]);
            }
            Report::Ehrhart { qp, .. } => {
                row(vec!["residue".into(), "coefficients".into()]);
                for (i, c) in qp.components().iter().enumerate() {
                    let cs: Vec<String> = c.iter().map(rational).collect();
                    row(vec![i.to_string(), cs.join(";")]);
                }
            }
            Report::Zeta { rows, .. } => {
                row(vec!["d".into(), "M_d".into(), "ord_p".into()]);
                for (d, m, v) in rows {
                    row(vec![d.to_string(), m.to_string(), opt(*v)]);
                }
            }
            Report::Pole(r) => {
                row(vec!["d".into(), "ord_p_order".into(), "ord_p_order_minus_1".into()]);
                for (d, hi, lo) in &r.profile {
                    row(vec![d.to_string(), opt(*hi), opt(*lo)]);
                }
            }
            Report::MeroEval { value, .. } => {
                row(vec!["valuation".into(), "unit".into(), "precision".into()]);
                let v = value.valuation().map(|x| x.to_string()).unwrap_or_default();
                row(vec![v, value.unit().to_string(), value.precision().to_string()]);
            }
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Text => match self {
                // keep the fan dump byte-identical to what parse_fan_str reads
                Report::Fan(f) => dump_fan(f),
                _ => serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n",
            },
        }
    }
}
