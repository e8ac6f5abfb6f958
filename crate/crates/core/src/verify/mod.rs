//! Executable checks with measured and expected values.
//!
//! Every check returns a [`CheckRecord`]. A record passes when all of its
//! measurements satisfy their relation within tolerance; records that cannot
//! apply (for example a density threshold above `|R|^d`) are marked skipped.

mod bounds;
mod density;
mod matrix;
mod sums;

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fourier::{salem_constant, Method};
use crate::ring::Ring;
use crate::variety::VarietySpec;

pub use bounds::*;
pub use density::*;
pub use matrix::*;
pub use sums::*;

/// Tolerance for closed forms involving square roots.
pub const CLOSED_FORM_TOL: f64 = 1e-6;
/// Per-coefficient tolerance for agreement between spectrum methods.
pub const AGREEMENT_TOL: f64 = 1e-9;
/// Relative tolerance for matrix probe ratios.
pub const PROBE_REL_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Le,
    Ge,
    /// Recorded for inspection, never fails.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

/// `measured <relation> expected`, within `tolerance`.
#[derive(Clone, Debug, Serialize)]
pub struct Measurement {
    pub label: String,
    pub measured: f64,
    pub expected: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub ok: bool,
}

impl Measurement {
    fn new(label: impl Into<String>, measured: f64, expected: f64, relation: Relation, tolerance: f64) -> Self {
        let ok = match relation {
            Relation::Eq => (measured - expected).abs() <= tolerance,
            Relation::Le => measured <= expected + tolerance,
            Relation::Ge => measured >= expected - tolerance,
            Relation::Info => true,
        } && (measured.is_finite() || relation == Relation::Info);
        Measurement {
            label: label.into(),
            measured,
            expected,
            relation,
            tolerance,
            ok,
        }
    }

    pub fn eq(label: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(label, measured, expected, Relation::Eq, tolerance)
    }

    /// Equality within `rel * |expected|`.
    pub fn eq_rel(label: impl Into<String>, measured: f64, expected: f64, rel: f64) -> Self {
        Self::new(label, measured, expected, Relation::Eq, rel * expected.abs())
    }

    pub fn le(label: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(label, measured, bound, Relation::Le, tolerance)
    }

    pub fn ge(label: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(label, measured, bound, Relation::Ge, tolerance)
    }

    pub fn info(label: impl Into<String>, measured: f64) -> Self {
        Self::new(label, measured, f64::NAN, Relation::Info, 0.0)
    }

    /// Amount by which the relation is missed (0 when it holds strictly).
    pub fn deviation(&self) -> f64 {
        match self.relation {
            Relation::Eq => (self.measured - self.expected).abs(),
            Relation::Le => (self.measured - self.expected).max(0.0),
            Relation::Ge => (self.expected - self.measured).max(0.0),
            Relation::Info => 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub rings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub status: Status,
    pub max_deviation: f64,
    pub measurements: Vec<Measurement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Wall time in seconds; left out of output unless timings are requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_s: Option<f64>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, rings: &[&Ring]) -> Self {
        CheckRecord {
            name: name.into(),
            rings: rings.iter().map(|r| r.to_string()).collect(),
            seed: None,
            status: Status::Pass,
            max_deviation: 0.0,
            measurements: Vec::new(),
            note: None,
            runtime_s: None,
        }
    }

    pub fn with_rings(name: impl Into<String>, rings: Vec<String>) -> Self {
        CheckRecord {
            rings,
            ..CheckRecord::new(name, &[])
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn push(&mut self, m: Measurement) {
        self.max_deviation = self.max_deviation.max(m.deviation());
        if !m.ok {
            self.status = Status::Fail;
        }
        self.measurements.push(m);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        let text = text.into();
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {text}"),
            None => text,
        });
    }

    /// Marks the record skipped unless something already failed.
    pub fn skip(&mut self, reason: impl Into<String>) {
        if self.status != Status::Fail {
            self.status = Status::Skip;
        }
        self.note(reason);
    }

    /// A failure record for a check that raised an error.
    pub fn from_error(name: impl Into<String>, rings: Vec<String>, err: &Error) -> Self {
        let mut r = CheckRecord::with_rings(name, rings);
        r.status = Status::Fail;
        r.note(format!("error: {err}"));
        r
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Fields, then the non-fields used throughout the suites.
pub fn field_roster() -> Vec<&'static str> {
    vec![
        "gf(2)", "gf(3)", "gf(4)", "gf(5)", "gf(7)", "gf(8)", "gf(9)", "gf(11)", "gf(13)", "gf(16)", "gf(17)",
        "gf(19)", "gf(23)", "gf(25)", "gf(27)",
    ]
}

pub fn nonfield_roster() -> Vec<&'static str> {
    vec![
        "zmod(4)",
        "zmod(6)",
        "zmod(8)",
        "zmod(9)",
        "zmod(12)",
        "mat(2,gf(2))",
        "mat(2,gf(3))",
        "prod(gf(2),gf(3))",
        "prod(gf(3),gf(3))",
        "prod(gf(2),zmod(4))",
        "prod(gf(2),zmod(9))",
    ]
}

pub fn roster() -> Vec<Ring> {
    field_roster()
        .into_iter()
        .chain(nonfield_roster())
        .map(|s| Ring::parse(s).expect("roster spec"))
        .collect()
}

/// Shared state of a suite run: budget, seed, and memoized Salem constants.
pub struct Context {
    pub budget: Budget,
    pub seed: u64,
    salem: Mutex<HashMap<(String, usize, String), f64>>,
}

impl Context {
    pub fn new(budget: Budget, seed: u64) -> Self {
        Context {
            budget,
            seed,
            salem: Mutex::new(HashMap::new()),
        }
    }

    /// Full-spectrum Salem constant, memoized by (ring, d, variety).
    pub fn salem(&self, ring: &Ring, d: usize, variety: &VarietySpec) -> Result<f64> {
        let key = (ring.to_string(), d, variety.to_string());
        if let Some(&c) = self.salem.lock().expect("cache lock").get(&key) {
            return Ok(c);
        }
        let c = salem_constant(variety, ring, d, Method::Auto, &self.budget)?.c;
        self.salem.lock().expect("cache lock").insert(key, c);
        Ok(c)
    }

    pub fn paraboloid_c(&self, ring: &Ring, d: usize) -> Result<f64> {
        self.salem(ring, d, &VarietySpec::paraboloid(d, 0)?)
    }
}

impl Default for Context {
    fn default() -> Self {
        Context::new(Budget::from_env(), 0)
    }
}

type CheckFn = fn(&Context) -> Vec<CheckRecord>;

/// Named suites, in the order `all` runs them.
pub fn suites() -> Vec<(&'static str, CheckFn)> {
    vec![
        ("gauss", suite_gauss as CheckFn),
        ("paraboloid-fields", suite_paraboloid_fields),
        ("nonfield", suite_nonfield),
        ("matrix", suite_matrix),
        ("growth", suite_growth),
        ("hamming", suite_hamming),
        ("points", suite_points),
        ("intro", suite_intro),
        ("product", suite_product),
        ("ideal", suite_ideal),
        ("density", suite_density),
        ("agreement", suite_agreement),
        ("nu", suite_nu),
        ("plancherel", suite_plancherel),
        ("jacobson", suite_jacobson),
        ("hyperbola-ideal", suite_hyperbola_ideal),
        ("contrast", suite_contrast),
    ]
}

pub fn suite_names() -> Vec<&'static str> {
    let mut names: Vec<&str> = suites().into_iter().map(|(n, _)| n).collect();
    names.push("all");
    names
}

/// Runs one suite (or `all`), returning records in a fixed order.
pub fn run_suite(name: &str, ctx: &Context, timings: bool) -> Result<Vec<CheckRecord>> {
    let all = suites();
    let chosen: Vec<(&str, CheckFn)> = if name == "all" {
        all
    } else {
        let found: Vec<_> = all.into_iter().filter(|(n, _)| *n == name).collect();
        if found.is_empty() {
            return Err(Error::Parse(format!(
                "unknown suite '{name}'; expected one of {}",
                suite_names().join(", ")
            )));
        }
        found
    };
    let mut out: Vec<Vec<CheckRecord>> = chosen
        .par_iter()
        .map(|(_, f)| {
            let start = Instant::now();
            let mut recs = f(ctx);
            if timings {
                let secs = start.elapsed().as_secs_f64();
                let share = secs / recs.len().max(1) as f64;
                recs.iter_mut().for_each(|r| r.runtime_s = Some(share));
            }
            recs
        })
        .collect();
    Ok(out.drain(..).flatten().collect())
}

/// Wraps a fallible check so errors become failing records.
pub(crate) fn guard(name: &str, rings: &[&Ring], f: impl FnOnce() -> Result<CheckRecord>) -> CheckRecord {
    f().unwrap_or_else(|e| CheckRecord::from_error(name, rings.iter().map(|r| r.to_string()).collect(), &e))
}

pub(crate) fn ring(spec: &str) -> Ring {
    Ring::parse(spec).expect("built-in ring spec")
}
