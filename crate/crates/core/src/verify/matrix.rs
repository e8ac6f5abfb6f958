//! Matrix-ring probes, hyperbola strata, and point counts.

use super::{guard, ring, roster, CheckRecord, Context, Measurement, CLOSED_FORM_TOL, PROBE_REL_TOL};
use crate::budget::pow_sat;
use crate::dual::Dual;
use crate::error::{Error, Result};
use crate::fourier::{probe_frequency, variety_spectrum, Method};
use crate::poly::NcPolynomial;
use crate::ring::{Ring, RingSpec};
use crate::variety::{variety_points, VarietySpec};

use super::sums::{gauss_sum, GaussVariant};

/// `|R|^d |coef| / sqrt(|V|)` for the paraboloid over `M_n(field)` at the
/// trace frequency of `(E11, ..., E11)`.
pub fn matrix_probe_ratio(field: &Ring, n: usize, d: usize, ctx: &Context) -> Result<f64> {
    let r = Ring::new(&RingSpec::Matrix { n, base: Box::new(field.spec().clone()) })?;
    let e11 = r.matrix_unit(0, 0).expect("matrix ring");
    let freq = Dual::new(&r, d)?.trace_frequency(&vec![e11; d])?;
    let f = NcPolynomial::paraboloid(d)?;
    let coef = probe_frequency(&f, 0, &r, d, &freq, &ctx.budget)?;
    let q = r.size() as f64;
    Ok(coef.norm() * q.powi(d as i32) / q.powf((d - 1) as f64 / 2.0))
}

pub fn matrix_growth_probe(field: &Ring, n: usize, d: usize, ctx: &Context) -> CheckRecord {
    guard("matrix-probe", &[field], || {
        if !field.is_field() {
            return Err(Error::Precondition(format!("{field} is not a field")));
        }
        let mut rec = CheckRecord::with_rings("matrix-probe", vec![format!("mat({n},{field})")]);
        rec.push(Measurement::info("d", d as f64));
        let ratio = matrix_probe_ratio(field, n, d, ctx)?;
        let fq = field.size() as f64;
        let gauss = gauss_sum(field, GaussVariant::Shifted)?.norm();
        // (|F|^{n^2/2 - n} |G|)^{d-1}: one independent matrix sum per free coordinate
        let single = fq.powf(n as f64 * n as f64 / 2.0 - n as f64) * gauss;
        let factorized = single.powi(d as i32 - 1);
        rec.push(Measurement::eq_rel("ratio", ratio, factorized, PROBE_REL_TOL));
        match (n, d) {
            (2, 2) => rec.push(Measurement::eq("ratio vs |G|", ratio, gauss, CLOSED_FORM_TOL)),
            (3, 2) => rec.push(Measurement::eq_rel("ratio vs |F|^1.5 |G|", ratio, fq.powf(1.5) * gauss, PROBE_REL_TOL)),
            (4, 2) => rec.push(Measurement::eq_rel("ratio vs |F|^4 |G|", ratio, fq.powi(4) * gauss, PROBE_REL_TOL)),
            (2, _) => rec.push(Measurement::ge("ratio >= |F|^((d-1)/2)", ratio, fq.powf((d - 1) as f64 / 2.0), PROBE_REL_TOL * ratio)),
            (3, 3) => rec.push(Measurement::ge("ratio >= |F|^4", ratio, fq.powi(4), PROBE_REL_TOL * ratio)),
            _ => {}
        }
        Ok(rec)
    })
}

pub(super) fn suite_matrix(ctx: &Context) -> Vec<CheckRecord> {
    let cases: [(&str, usize, usize); 9] = [
        ("gf(3)", 2, 2),
        ("gf(5)", 2, 2),
        ("gf(7)", 2, 2),
        ("gf(3)", 3, 2),
        ("gf(3)", 4, 2),
        ("gf(3)", 2, 3),
        ("gf(5)", 2, 3),
        ("gf(7)", 2, 3),
        ("gf(2)", 3, 3),
    ];
    cases.iter().map(|&(f, n, d)| matrix_growth_probe(&ring(f), n, d, ctx)).collect()
}

/// The 2x2 probe ratio is strictly increasing in `q`.
pub fn check_growth(fields: &[&str], ctx: &Context) -> CheckRecord {
    let rings: Vec<Ring> = fields.iter().map(|s| ring(s)).collect();
    let refs: Vec<&Ring> = rings.iter().collect();
    guard("growth", &refs, || {
        let mut rec = CheckRecord::new("growth", &refs);
        let mut prev: Option<f64> = None;
        for f in &rings {
            let r = matrix_probe_ratio(f, 2, 2, ctx)?;
            rec.push(Measurement::info(format!("ratio M2({f})"), r));
            if let Some(p) = prev {
                rec.push(Measurement::ge(format!("increase at {f}"), r - p, f64::MIN_POSITIVE, 0.0));
            }
            prev = Some(r);
        }
        Ok(rec)
    })
}

pub(super) fn suite_growth(ctx: &Context) -> Vec<CheckRecord> {
    vec![check_growth(&["gf(3)", "gf(5)", "gf(7)", "gf(9)", "gf(11)"], ctx)]
}

/// Raw sums `sum_{x in H_1} psi(a . x)` grouped by the number `l` of zero
/// coordinates of `a`. Strata with `l >= 1` must equal `(q-1)^{l-1}`.
pub fn hamming_spectrum_check(field: &Ring, d: usize, ctx: &Context) -> CheckRecord {
    guard("hamming", &[field], || {
        if !field.is_field() {
            return Err(Error::Precondition(format!("{field} is not a field")));
        }
        let mut rec = CheckRecord::new("hamming", &[field]);
        rec.push(Measurement::info("d", d as f64));
        let spec = VarietySpec::Hamming { j: 1 };
        let spectrum = variety_spectrum(&spec, field, d, Method::Auto, &ctx.budget)?;
        let dual = spectrum.dual().clone();
        let q = field.size();
        let scale = pow_sat(q as u64, d) as f64;
        let mut worst = vec![0.0f64; d + 1];
        let mut seen = vec![false; d + 1];
        let mut generic_max: f64 = 0.0;
        for idx in 0..pow_sat(q as u64, d) as u64 {
            let a = dual.point_elements(idx);
            let zeros = a.iter().filter(|&&x| x == field.zero()).count();
            let raw = spectrum.coefficient(&dual.trace_frequency(&a)?)?.norm() * scale;
            if zeros == 0 {
                generic_max = generic_max.max(raw);
                continue;
            }
            let expected = ((q - 1) as f64).powi(zeros as i32 - 1);
            seen[zeros] = true;
            worst[zeros] = worst[zeros].max((raw - expected).abs());
        }
        for l in 1..=d {
            if seen[l] {
                rec.push(Measurement::eq(format!("max | |sum| - (q-1)^{} | at l={l}", l - 1), worst[l], 0.0, CLOSED_FORM_TOL));
            }
        }
        rec.push(Measurement::info(
            "max |sum| / q^((d-1)/2), no zero coordinate",
            generic_max / (q as f64).powf((d - 1) as f64 / 2.0),
        ));
        Ok(rec)
    })
}

pub(super) fn suite_hamming(ctx: &Context) -> Vec<CheckRecord> {
    [("gf(5)", 3), ("gf(7)", 3), ("gf(3)", 4), ("gf(4)", 3), ("gf(9)", 2)]
        .iter()
        .map(|&(f, d)| hamming_spectrum_check(&ring(f), d, ctx))
        .collect()
}

/// `|V_{f,c}| = |R|^{d-1}` and `|H_1| = |R^*|^{d-1}`.
pub fn check_point_counts(r: &Ring, d: usize, ctx: &Context) -> CheckRecord {
    guard("points", &[r], || {
        let mut rec = CheckRecord::new("points", &[r]);
        rec.push(Measurement::info("d", d as f64));
        let q = r.size() as u64;
        for c in [0, 1] {
            let v = variety_points(&VarietySpec::paraboloid(d, c)?, r, d, &ctx.budget)?;
            rec.push(Measurement::eq(format!("|V| (c={c})"), v.len() as f64, pow_sat(q, d - 1) as f64, 0.0));
        }
        let f = NcPolynomial::parse("x1*x2 + 2*x2*x1^2")?;
        if d >= 3 {
            let v = variety_points(&VarietySpec::graph(f, 1), r, d, &ctx.budget)?;
            rec.push(Measurement::eq("|V| (x1*x2 + 2*x2*x1^2, c=1)", v.len() as f64, pow_sat(q, d - 1) as f64, 0.0));
        }
        let h = variety_points(&VarietySpec::Hamming { j: 1 }, r, d, &ctx.budget)?;
        let expected = pow_sat(r.unit_count() as u64, d - 1) as f64;
        rec.push(Measurement::eq("|H_1|", h.len() as f64, expected, 0.0));
        Ok(rec)
    })
}

pub(super) fn suite_points(ctx: &Context) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for r in roster() {
        for d in [2, 3] {
            out.push(check_point_counts(&r, d, ctx));
        }
    }
    out
}
