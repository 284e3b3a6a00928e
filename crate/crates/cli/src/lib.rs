//! Batch front end: picks a variety, runs one command, renders a report.

pub mod fanfile;
pub mod polyparse;
pub mod report;

use std::fmt;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use toric_zeta_core::ehrhart::{fit_toric_family, validate_qp};
use toric_zeta_core::mero::{check_increasing, evaluate_meromorphic, reduce_to_mero_parts, MeroBody};
use toric_zeta_core::padic::{check_quadratic_bound, prime_power_exponent, BoundCheck};
use toric_zeta_core::poly::rat;
use toric_zeta_core::toric::{
    hirzebruch, irreducible_generators, product_of_lines, projective_line, projective_plane, sections_dim,
    weighted_112, Fan, ToricVarietyModel, TorusDivisor, ValidatedFan,
};
use toric_zeta_core::zeta::{pole_analysis, prime_of, zeta_coefficients};

pub use fanfile::{dump_fan, parse_fan_file, parse_fan_str};
pub use polyparse::parse_polynomial;
pub use report::Report;

/// Error object printed on failure. `kind` is the library variant name or
/// a front-end category such as `Usage` or `FanParse`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &str, message: String) -> Self {
        Self { kind: kind.to_string(), message }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("Usage", message.into())
    }

    pub fn context(mut self, ctx: &str) -> Self {
        self.message = format!("{ctx}: {}", self.message);
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": { "kind": self.kind, "message": self.message } })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<toric_zeta_core::Error> for CliError {
    fn from(e: toric_zeta_core::Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error");
        Self::new(kind, e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarietySource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobConfig {
    pub variety: VarietySource,
    pub grading: Option<Vec<i64>>,
    pub q: u64,
    pub p: u64,
    pub dmax: u64,
    pub precision: i64,
    pub out: OutputFormat,
}

impl JobConfig {
    /// Defaults: `q = 2`, `p` the prime under `q`, `dmax = 10`, `N = 8`.
    pub fn new(variety: VarietySource) -> Self {
        Self { variety, grading: None, q: 2, p: 2, dmax: 10, precision: 8, out: OutputFormat::Text }
    }

    pub fn check(&self) -> Result<(), CliError> {
        prime_power_exponent(self.q, self.p)?;
        if self.dmax < 1 {
            return Err(CliError::usage("--dmax must be at least 1"));
        }
        if self.precision < 1 {
            return Err(CliError::usage("--prec must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    /// Dump the fan in file format.
    Fan,
    ClassGroup,
    Sections {
        divisor: Vec<i64>,
    },
    /// Fit `n -> l(nD)`; `D` defaults to the lowest-degree irreducible generator.
    Ehrhart {
        divisor: Option<Vec<i64>>,
        max_period: usize,
        validate_to: i64,
    },
    ZetaCoeffs,
    Pole,
    MeroEval {
        polynomial: String,
        t: BigRational,
        degrees: Option<Vec<u64>>,
    },
}

/// Fan and canonical grading of a builtin: `p1`, `p2`, `p1xp1`,
/// `hirzebruch:a`, `wp112`.
pub fn builtin(name: &str) -> Result<(Fan, Vec<i64>), CliError> {
    let unknown = || CliError::new("UnknownVariety", format!("no builtin variety `{name}`"));
    Ok(match name {
        "p1" => (projective_line(), vec![1]),
        "p2" => (projective_plane(), vec![1]),
        "p1xp1" => (product_of_lines(), vec![1, 1]),
        "wp112" => (weighted_112(), vec![1]),
        _ => {
            let a = name.strip_prefix("hirzebruch:").ok_or_else(unknown)?;
            let a: i64 = a.parse().map_err(|_| unknown())?;
            if a < 0 {
                return Err(CliError::usage("hirzebruch:a needs a >= 0"));
            }
            (hirzebruch(a), vec![1, 1])
        }
    })
}

pub fn load_fan(src: &VarietySource) -> Result<(ValidatedFan, Option<Vec<i64>>), CliError> {
    match src {
        VarietySource::Builtin(name) => {
            let (fan, grading) = builtin(name)?;
            Ok((fan.validate()?, Some(grading)))
        }
        VarietySource::File(path) => Ok((parse_fan_file(path)?, None)),
    }
}

/// Fan files carry no grading; without `--grading` every free generator
/// gets degree 1.
pub fn load_model(cfg: &JobConfig) -> Result<ToricVarietyModel, CliError> {
    let (fan, canonical) = load_fan(&cfg.variety)?;
    let grading = match (&cfg.grading, canonical) {
        (Some(g), _) => g.clone(),
        (None, Some(g)) => g,
        (None, None) => {
            let rank = fan.rays.len() - fan.dim;
            vec![1; rank]
        }
    };
    Ok(ToricVarietyModel::with_grading_i64(fan, &grading)?)
}

fn divisor_for(model: &ToricVarietyModel, coeffs: &[i64]) -> Result<TorusDivisor, CliError> {
    if coeffs.len() != model.ray_count() {
        return Err(CliError::usage(format!(
            "divisor has {} coefficients, the fan has {} rays",
            coeffs.len(),
            model.ray_count()
        )));
    }
    Ok(TorusDivisor::from_i64(coeffs))
}

pub fn run(cmd: &Command, cfg: &JobConfig) -> Result<Report, CliError> {
    cfg.check()?;
    if *cmd == Command::Fan {
        let (fan, _) = load_fan(&cfg.variety)?;
        return Ok(Report::Fan(fan.into_inner()));
    }
    if let Command::MeroEval { polynomial, t, degrees } = cmd {
        return mero_eval(polynomial, t, degrees.as_deref(), cfg);
    }
    let model = load_model(cfg)?;
    match cmd {
        Command::ClassGroup => Ok(report::class_group(&model)),
        Command::Sections { divisor } => {
            let d = divisor_for(&model, divisor)?;
            let l = sections_dim(&model.fan, &d)?;
            Ok(Report::Sections { divisor: divisor.clone(), dim: l })
        }
        Command::Ehrhart { divisor, max_period, validate_to } => {
            let d = match divisor {
                Some(c) => divisor_for(&model, c)?,
                None => {
                    irreducible_generators(&model)?
                        .into_iter()
                        .min_by_key(|g| g.degree)
                        .ok_or_else(|| CliError::new("NotEffective", "no effective generator".into()))?
                        .representative
                }
            };
            let zero = TorusDivisor::zero(model.ray_count());
            let qp = fit_toric_family(&model.fan, &zero, &d, *max_period)?;
            let sampler = |n: &[i64]| -> toric_zeta_core::Result<BigRational> {
                let dn = d.scale(&BigInt::from(n[0]));
                Ok(rat(sections_dim(&model.fan, &dn)? as i64))
            };
            let grid: Vec<Vec<i64>> = (0..=*validate_to).map(|n| vec![n]).collect();
            let mismatches = validate_qp(&qp, &sampler, &grid)?;
            Ok(Report::Ehrhart { divisor: d, qp, validated_to: *validate_to, mismatches: mismatches.len() })
        }
        Command::ZetaCoeffs => {
            let z = zeta_coefficients(&model, cfg.q, cfg.dmax)?;
            Ok(Report::Zeta { q: cfg.q, p: cfg.p, rows: z.rows(cfg.p) })
        }
        Command::Pole => Ok(Report::Pole(pole_analysis(&model, cfg.q, cfg.p, cfg.dmax, cfg.precision)?)),
        Command::Fan | Command::MeroEval { .. } => unreachable!(),
    }
}

fn mero_eval(text: &str, t: &BigRational, degrees: Option<&[u64]>, cfg: &JobConfig) -> Result<Report, CliError> {
    let poly = parse_polynomial(text, degrees.map_or(0, <[u64]>::len))?;
    let n = poly.nvars();
    let degrees = degrees.map_or_else(|| vec![1; n], <[u64]>::to_vec);
    let f = check_increasing(&poly, n, 6)?;
    let part = reduce_to_mero_parts(&f, &degrees, cfg.q, cfg.p)?;
    let mut cores = Vec::new();
    for (i, term) in part.terms.iter().enumerate() {
        if let MeroBody::Entire(core) = &term.body {
            // certified series re-check every computed coefficient against the bound
            let num = part.numerator_series(core, 64, 24)?;
            let b = &core.numerator_bound;
            let mut ok = check_quadratic_bound(&num, &b.c, &b.d)? == BoundCheck::Pass;
            if let (Some(den), Some(db)) = (part.denominator_series(core, 64, 24)?, &core.denominator_bound) {
                ok &= check_quadratic_bound(&den, &db.c, &db.d)? == BoundCheck::Pass;
            }
            cores.push(report::CoreSummary {
                term: i,
                numerator_bound: b.clone(),
                denominator_bound: core.denominator_bound.clone(),
                bound_check: ok,
            });
        }
    }
    let value = evaluate_meromorphic(&part, t, cfg.precision)?;
    Ok(Report::MeroEval { polynomial: poly.to_string(), t: t.clone(), terms: part.terms.len(), cores, value })
}

/// `"3"`, `"-1/2"`.
pub fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::usage(format!("`{s}` is not a rational number"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Comma-separated integers, as in `--grading 1,2`.
pub fn parse_int_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| CliError::usage(format!("`{x}` in `{s}` is not an integer"))))
        .collect()
}

/// Prime under `q` when `--p` is omitted.
pub fn default_prime(q: u64) -> Result<u64, CliError> {
    Ok(prime_of(q)?)
}
