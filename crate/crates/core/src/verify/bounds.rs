//! Salem-constant bounds: fields against non-fields, products, ideals,
//! Plancherel, the Jacobson radical, hyperbolas, and method agreement.

use rand::seq::index::sample;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    difference_count, field_roster, guard, ring, roster, CheckRecord, Context, Measurement,
    AGREEMENT_TOL, CLOSED_FORM_TOL,
};
use crate::budget::pow_sat;
use crate::error::{Error, Result};
use crate::fourier::{graph_spectrum, spectrum_fft, variety_spectrum, Method, Spectrum};
use crate::poly::{NcPolynomial, Word};
use crate::ring::{Ring, RingSpec};
use crate::structure::{all_ideals, ideal_product, jacobson_radical, IdealSet, Side};
use crate::variety::{variety_points, PointSet, VarietySpec};

/// Pairs `|E|^2` above this are not counted exactly.
const PAIR_LIMIT: u128 = 10_000_000;

fn odd_field(r: &Ring) -> bool {
    r.is_field() && r.characteristic() != 2
}

/// Paraboloid constant over a field: 1 in odd characteristic, `q^{(d-1)/2}` in characteristic 2.
pub fn field_paraboloid_constant(field: &Ring, d: usize) -> f64 {
    if odd_field(field) {
        1.0
    } else {
        (field.size() as f64).powf((d - 1) as f64 / 2.0)
    }
}

pub fn check_paraboloid_field(field: &Ring, d: usize, ctx: &Context) -> CheckRecord {
    guard("paraboloid-field", &[field], || {
        if !field.is_field() {
            return Err(Error::Precondition(format!("{field} is not a field")));
        }
        let mut rec = CheckRecord::new("paraboloid-field", &[field]);
        rec.push(Measurement::info("d", d as f64));
        let c = ctx.paraboloid_c(field, d)?;
        rec.push(Measurement::eq("C", c, field_paraboloid_constant(field, d), CLOSED_FORM_TOL));
        Ok(rec)
    })
}

pub(super) fn suite_paraboloid_fields(ctx: &Context) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for s in field_roster() {
        for d in [2, 3] {
            out.push(check_paraboloid_field(&ring(s), d, ctx));
        }
    }
    out
}

/// Odd fields give 1, characteristic-2 fields `q^{(d-1)/2}`, everything else at least `sqrt(2)`.
pub fn check_contrast(r: &Ring, d: usize, ctx: &Context) -> CheckRecord {
    guard("contrast", &[r], || {
        let mut rec = CheckRecord::new("contrast", &[r]);
        rec.push(Measurement::info("d", d as f64));
        let c = ctx.paraboloid_c(r, d)?;
        if r.is_field() {
            rec.push(Measurement::eq("C", c, field_paraboloid_constant(r, d), CLOSED_FORM_TOL));
        } else {
            rec.push(Measurement::ge("C", c, 2f64.sqrt(), CLOSED_FORM_TOL));
        }
        Ok(rec)
    })
}

pub(super) fn suite_contrast(ctx: &Context) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for r in roster() {
        for d in [2, 3] {
            out.push(check_contrast(&r, d, ctx));
        }
    }
    out
}

pub(super) fn suite_nonfield(ctx: &Context) -> Vec<CheckRecord> {
    let z4 = ring("zmod(4)");
    let f2 = ring("gf(2)");
    let mut rec = guard("nonfield", &[&z4, &f2], || {
        let mut rec = CheckRecord::new("nonfield", &[&z4, &f2]);
        rec.push(Measurement::eq("C(zmod(4), d=2)", ctx.paraboloid_c(&z4, 2)?, 2.0, CLOSED_FORM_TOL));
        rec.push(Measurement::eq("C(gf(2), d=2)", ctx.paraboloid_c(&f2, 2)?, 2f64.sqrt(), CLOSED_FORM_TOL));
        Ok(rec)
    });
    let jac = check_jacobson_bound(&z4, 2, ctx);
    if let Some(m) = jac.measurements.iter().find(|m| m.label == "C_R - C_S |J|^((d-1)/2)") {
        rec.push(Measurement::eq("zmod(4): C_R - C_S |J|^(1/2)", m.measured, 0.0, CLOSED_FORM_TOL));
    } else {
        rec.push(Measurement::eq("zmod(4) Jacobson bound computed", 0.0, 1.0, 0.0));
    }
    vec![rec, jac]
}

/// `C_{R1 x R2} = max(C_1 sqrt|V(R2)|, C_2 sqrt|V(R1)|)` for the paraboloid, measured on `target`
/// (the product itself or an isomorphic ring).
pub fn check_product_formula(r1: &Ring, r2: &Ring, target: &Ring, d: usize, ctx: &Context) -> CheckRecord {
    guard("product", &[target, r1, r2], || {
        if target.size() != r1.size() * r2.size() {
            return Err(Error::Precondition(format!("|{target}| != |{r1}| |{r2}|")));
        }
        let mut rec = CheckRecord::new("product", &[target, r1, r2]);
        rec.push(Measurement::info("d", d as f64));
        let c1 = ctx.paraboloid_c(r1, d)?;
        let c2 = ctx.paraboloid_c(r2, d)?;
        let v1 = pow_sat(r1.size() as u64, d - 1) as f64;
        let v2 = pow_sat(r2.size() as u64, d - 1) as f64;
        let formula = (c1 * v2.sqrt()).max(c2 * v1.sqrt());
        let c = ctx.paraboloid_c(target, d)?;
        rec.push(Measurement::eq("C", c, formula, CLOSED_FORM_TOL));
        rec.push(Measurement::info("C_1 C_2", c1 * c2));
        Ok(rec)
    })
}

fn product_of(a: &Ring, b: &Ring) -> Result<Ring> {
    Ring::new(&RingSpec::Product(vec![a.spec().clone(), b.spec().clone()]))
}

pub(super) fn suite_product(ctx: &Context) -> Vec<CheckRecord> {
    let (f2, f3, z4, z9) = (ring("gf(2)"), ring("gf(3)"), ring("zmod(4)"), ring("zmod(9)"));
    let mut out = Vec::new();
    for d in [2, 3] {
        out.push(check_product_formula(&f2, &f3, &ring("zmod(6)"), d, ctx));
        for (a, b) in [(&f2, &f3), (&f3, &f3), (&f2, &z4), (&f2, &z9)] {
            match product_of(a, b) {
                Ok(p) => out.push(check_product_formula(a, b, &p, d, ctx)),
                Err(e) => out.push(CheckRecord::from_error("product", vec![a.to_string(), b.to_string()], &e)),
            }
        }
    }
    out
}

fn point_box(r: &Ring, d: usize, coords: &[&[usize]]) -> Vec<u64> {
    let n = r.size() as u64;
    let mut out = vec![0u64];
    for (i, allowed) in coords.iter().enumerate().take(d) {
        let w = n.pow(i as u32);
        out = out.iter().flat_map(|&p| allowed.iter().map(move |&a| p + a as u64 * w)).collect();
    }
    out
}

/// The left ideal of matrices whose first column is zero.
fn column_zero_ideal(r: &Ring) -> Option<Vec<usize>> {
    let (n, _) = r.matrix_parts()?;
    Some(
        (0..r.size())
            .filter(|&a| {
                let e = r.matrix_entries(a).expect("matrix");
                (0..n).all(|row| e[row * n] == 0)
            })
            .collect(),
    )
}

/// Every proper one-sided ideal satisfies `|I| <= C^{1/d} q^{1/2 + 1/(2d)}`.
pub fn check_ideal_bound(r: &Ring, d: usize, ctx: &Context) -> CheckRecord {
    guard("ideal", &[r], || {
        let mut rec = CheckRecord::new("ideal", &[r]);
        rec.push(Measurement::info("d", d as f64));
        let c = ctx.paraboloid_c(r, d)?;
        let q = r.size() as f64;
        let bound = c.powf(1.0 / d as f64) * q.powf(0.5 + 0.5 / d as f64);
        let v = variety_points(&VarietySpec::paraboloid(d, 1)?, r, d, &ctx.budget)?;
        let mut largest: Option<IdealSet> = None;
        for side in [Side::Left, Side::Right] {
            let proper: Vec<IdealSet> = all_ideals(r, side)?.into_iter().filter(IdealSet::is_proper).collect();
            let max = proper.iter().max_by_key(|i| i.size()).expect("{0} is proper");
            rec.push(Measurement::le(format!("max proper {side} ideal"), max.size() as f64, bound, 1e-9));
            if largest.as_ref().is_none_or(|l| max.size() > l.size()) {
                largest = Some(max.clone());
            }
        }
        if let Some(cols) = column_zero_ideal(r) {
            let (n, base) = r.matrix_parts().expect("matrix");
            let expected = (base.size() as f64).powi((n * n - n) as i32);
            rec.push(Measurement::eq("|column-zero ideal|", cols.len() as f64, expected, 0.0));
            let ok = IdealSet::new(r, Side::Left, cols).is_ok();
            rec.push(Measurement::eq("column-zero set is a left ideal", ok as u8 as f64, 1.0, 0.0));
        }
        let ideal = largest.expect("two sides");
        let e_size = pow_sat(ideal.size() as u64, d);
        if e_size * e_size <= PAIR_LIMIT || e_size * v.len() as u128 <= PAIR_LIMIT {
            let elems = ideal.elements();
            let e = PointSet::new(r, d, point_box(r, d, &vec![elems; d]))?;
            let n_e = difference_count(&e, &v, &ctx.budget)?;
            rec.push(Measurement::eq("n(I^d) for V_{f,1}", n_e as f64, 0.0, 0.0));
        } else {
            rec.note("n(I^d) not counted: too many pairs");
        }
        Ok(rec)
    })
}

pub(super) fn suite_ideal(ctx: &Context) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for r in roster() {
        for d in [2, 3] {
            out.push(check_ideal_bound(&r, d, ctx));
        }
    }
    out
}

/// `C_E >= sqrt(1 - |E| / |R|^d)` for a point set `E`.
pub fn plancherel_margin(spectrum: &Spectrum) -> f64 {
    let total = spectrum.coefficients().len() as f64;
    let size = spectrum.set_size() as f64;
    let c = spectrum.max_nontrivial().map_or(0.0, |(_, m)| m * total / size.sqrt());
    c - (1.0 - size / total).max(0.0).sqrt()
}

pub fn check_plancherel_bound(r: &Ring, d: usize, trials: usize, ctx: &Context) -> CheckRecord {
    let seed = ctx.seed;
    guard("plancherel", &[r], || {
        let mut rec = CheckRecord::new("plancherel", &[r]).seed(seed);
        rec.push(Measurement::info("d", d as f64));
        let total = pow_sat(r.size() as u64, d) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ r.size() as u64);
        let mut worst = f64::INFINITY;
        for _ in 0..trials {
            let k = rng.gen_range(1..=total);
            let pts: Vec<u64> = sample(&mut rng, total, k).into_iter().map(|i| i as u64).collect();
            let spectrum = spectrum_fft(&PointSet::new(r, d, pts)?, &ctx.budget)?;
            worst = worst.min(plancherel_margin(&spectrum));
        }
        rec.push(Measurement::ge("min C_E - sqrt(1 - |E|/|R|^d) over random E", worst, 0.0, CLOSED_FORM_TOL));
        let full = spectrum_fft(&PointSet::full(r, d, &ctx.budget)?, &ctx.budget)?;
        rec.push(Measurement::ge("full set margin", plancherel_margin(&full), 0.0, CLOSED_FORM_TOL));
        let c = ctx.paraboloid_c(r, d)?;
        let graph_bound = (1.0 - 1.0 / r.size() as f64).sqrt();
        rec.push(Measurement::ge("paraboloid C", c, graph_bound, CLOSED_FORM_TOL));
        Ok(rec)
    })
}

pub(super) fn suite_plancherel(ctx: &Context) -> Vec<CheckRecord> {
    ["zmod(4)", "gf(4)", "gf(5)", "gf(3)"]
        .iter()
        .map(|s| check_plancherel_bound(&ring(s), 2, 100, ctx))
        .collect()
}

fn jacobson_pieces(r: &Ring, d: usize, ctx: &Context, rec: &mut CheckRecord) -> Result<()> {
    let rad = jacobson_radical(r)?;
    let j = rad.radical_size();
    let s = &rad.quotient.ring;
    rec.push(Measurement::eq("|R| - |J| |R/J|", (r.size() - j * s.size()) as f64, 0.0, 0.0));
    if j > 1 {
        let j2 = ideal_product(&rad.radical, &rad.radical)?;
        rec.push(Measurement::ge("|J| - |J^2| (Nakayama)", (j - j2.size()) as f64, 1.0, 0.0));
    }
    if let Some(parts) = r.product_parts() {
        let mut comps: Vec<Vec<usize>> = vec![vec![]];
        for p in parts {
            let pj = jacobson_radical(p)?;
            comps = comps
                .iter()
                .flat_map(|c| {
                    pj.radical.elements().iter().map(move |&x| {
                        let mut c = c.clone();
                        c.push(x);
                        c
                    })
                })
                .collect();
        }
        let mut expected: Vec<usize> = comps.iter().map(|c| r.product_from_components(c).expect("product")).collect();
        expected.sort_unstable();
        rec.push(Measurement::eq(
            "radical = product of radicals",
            (expected == rad.radical.elements()) as u8 as f64,
            1.0,
            0.0,
        ));
    }
    if j == 1 {
        rec.note("J = 0: bound holds trivially");
        return Ok(());
    }
    let cr = ctx.paraboloid_c(r, d)?;
    let cs = ctx.paraboloid_c(s, d)?;
    let rhs = cs * (j as f64).powf((d - 1) as f64 / 2.0);
    rec.push(Measurement::info("C_R", cr));
    rec.push(Measurement::info("C_S", cs));
    rec.push(Measurement::ge("C_R - C_S |J|^((d-1)/2)", cr - rhs, 0.0, CLOSED_FORM_TOL));
    Ok(())
}

/// `C_R >= C_{R/J} |J|^{(d-1)/2}` together with the radical's structural invariants.
pub fn check_jacobson_bound(r: &Ring, d: usize, ctx: &Context) -> CheckRecord {
    guard("jacobson", &[r], || {
        let mut rec = CheckRecord::new("jacobson", &[r]);
        rec.push(Measurement::info("d", d as f64));
        jacobson_pieces(r, d, ctx, &mut rec)?;
        Ok(rec)
    })
}

pub(super) fn suite_jacobson(ctx: &Context) -> Vec<CheckRecord> {
    let mut rings: Vec<Ring> = ["zmod(4)", "zmod(8)", "zmod(9)", "prod(gf(2),zmod(4))", "prod(gf(2),zmod(9))", "gf(4)"]
        .iter()
        .map(|s| ring(s))
        .collect();
    match crate::ring::upper_triangular(2, &ring("gf(2)")) {
        Ok(u) => rings.push(u),
        Err(e) => return vec![CheckRecord::from_error("jacobson", vec!["upper(2,gf(2))".into()], &e)],
    }
    let mut out = Vec::new();
    for r in &rings {
        for d in [2, 3] {
            out.push(check_jacobson_bound(r, d, ctx));
        }
    }
    out
}

/// Proper one-sided ideals satisfy `|I| <= C q / |R^*|^{(d-1)/2}` with `C` measured on `H_1`.
pub fn check_hyperbola_ideal_bound(r: &Ring, d: usize, ctx: &Context) -> CheckRecord {
    guard("hyperbola-ideal", &[r], || {
        let mut rec = CheckRecord::new("hyperbola-ideal", &[r]);
        rec.push(Measurement::info("d", d as f64));
        let spec = VarietySpec::Hamming { j: 1 };
        let c = ctx.salem(r, d, &spec)?;
        let q = r.size() as f64;
        let units = r.unit_count() as f64;
        let bound = c * q / units.powf((d - 1) as f64 / 2.0);
        rec.push(Measurement::info("C", c));
        let mut largest: Option<IdealSet> = None;
        for side in [Side::Left, Side::Right] {
            let proper: Vec<IdealSet> = all_ideals(r, side)?.into_iter().filter(IdealSet::is_proper).collect();
            let max = proper.iter().max_by_key(|i| i.size()).expect("{0} is proper");
            rec.push(Measurement::le(format!("max proper {side} ideal"), max.size() as f64, bound, 1e-9));
            if largest.as_ref().is_none_or(|l| max.size() > l.size()) {
                largest = Some(max.clone());
            }
        }
        let ideal = largest.expect("two sides");
        let v = variety_points(&spec, r, d, &ctx.budget)?;
        let e_size = pow_sat(r.size() as u64, d - 1) * ideal.size() as u128;
        if e_size * e_size.min(v.len() as u128) <= PAIR_LIMIT {
            let all: Vec<usize> = (0..r.size()).collect();
            let mut axes: Vec<&[usize]> = vec![&all; d - 1];
            axes.push(ideal.elements());
            let e = PointSet::new(r, d, point_box(r, d, &axes))?;
            let n_e = difference_count(&e, &v, &ctx.budget)?;
            rec.push(Measurement::eq("n(R^{d-1} x I) for H_1", n_e as f64, 0.0, 0.0));
        } else {
            rec.note("n(R^{d-1} x I) not counted: too many pairs");
        }
        Ok(rec)
    })
}

pub(super) fn suite_hyperbola_ideal(ctx: &Context) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for r in roster() {
        for d in [2, 3] {
            if pow_sat(r.size() as u64, d) <= 1 << 20 {
                out.push(check_hyperbola_ideal_bound(&r, d, ctx));
            }
        }
    }
    out.push(check_hyperbola_ideal_bound(&ring("zmod(4)"), 4, ctx));
    out
}

/// A random polynomial in `x_1..x_vars` with 1 to 3 words of length 1 to 3.
pub fn random_polynomial(rng: &mut impl rand::Rng, vars: usize) -> NcPolynomial {
    loop {
        let words: Vec<Word> = (0..rng.gen_range(1..=3))
            .map(|_| Word {
                coeff: rng.gen_range(1..=5),
                letters: (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=vars)).collect(),
            })
            .collect();
        if let Ok(p) = NcPolynomial::from_words(words) {
            if !p.words().is_empty() {
                return p;
            }
        }
    }
}

fn max_diff(a: &Spectrum, b: &Spectrum) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Direct, FFT and graph spectra agree per coefficient; Parseval holds on each.
pub fn check_agreement(r: &Ring, d: usize, polys: &[NcPolynomial], ctx: &Context) -> CheckRecord {
    guard("agreement", &[r], || {
        let mut rec = CheckRecord::new("agreement", &[r]);
        rec.push(Measurement::info("d", d as f64));
        rec.push(Measurement::info("polynomials", polys.len() as f64));
        let mut worst_diff: f64 = 0.0;
        let mut worst_parseval: f64 = 0.0;
        for (i, f) in polys.iter().enumerate() {
            let c = (i % 3) as i64;
            let spec = VarietySpec::graph(f.clone(), c);
            let direct = variety_spectrum(&spec, r, d, Method::Direct, &ctx.budget)?;
            let fft = variety_spectrum(&spec, r, d, Method::Fft, &ctx.budget)?;
            let graph = graph_spectrum(f, c, r, d, &ctx.budget)?;
            worst_diff = worst_diff.max(max_diff(&direct, &fft)).max(max_diff(&direct, &graph));
            for s in [&direct, &fft, &graph] {
                worst_parseval = worst_parseval.max(s.parseval_residual());
            }
        }
        rec.push(Measurement::le("max coefficient difference", worst_diff, AGREEMENT_TOL, 0.0));
        rec.push(Measurement::le("max relative Parseval residual", worst_parseval, 1e-6, 0.0));
        Ok(rec)
    })
}

/// The paraboloid plus `count` seeded random polynomials in `d - 1` variables.
pub fn agreement_polynomials(d: usize, count: usize, seed: u64) -> Vec<NcPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(d as u64));
    let mut out = vec![NcPolynomial::paraboloid(d).expect("d >= 2")];
    out.extend((0..count).map(|_| random_polynomial(&mut rng, d - 1)));
    out
}

pub(super) fn suite_agreement(ctx: &Context) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for d in [2, 3] {
        let polys = agreement_polynomials(d, 50, ctx.seed);
        for r in roster() {
            if pow_sat(r.size() as u64, d) <= 100_000 {
                out.push(check_agreement(&r, d, &polys, ctx));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::ring::upper_triangular;
    use crate::verify::Status;

    fn ctx() -> Context {
        Context::new(Budget::unlimited(), 11)
    }

    #[test]
    fn product_formula_examples() {
        let c = ctx();
        let (f2, f3) = (ring("gf(2)"), ring("gf(3)"));
        let rec = check_product_formula(&f2, &f3, &ring("zmod(6)"), 2, &c);
        assert!(rec.passed(), "{rec:?}");
        // C(gf(3) x gf(3)) = sqrt(3)
        let p = product_of(&f3, &f3).unwrap();
        assert!((c.paraboloid_c(&p, 2).unwrap() - 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn ideal_bound_examples() {
        let c = ctx();
        for s in ["gf(7)", "zmod(4)", "mat(2,gf(3))", "zmod(8)"] {
            let rec = check_ideal_bound(&ring(s), 2, &c);
            assert_eq!(rec.status, Status::Pass, "{rec:?}");
        }
        let m = check_ideal_bound(&ring("mat(2,gf(3))"), 2, &c);
        let col = m.measurements.iter().find(|m| m.label == "|column-zero ideal|").unwrap();
        assert_eq!(col.measured, 9.0);
    }

    #[test]
    fn jacobson_examples() {
        let c = ctx();
        let rec = check_jacobson_bound(&ring("zmod(4)"), 2, &c);
        let m = rec.measurements.iter().find(|m| m.label.starts_with("C_R - ")).unwrap();
        assert!(m.measured.abs() < 1e-9);
        assert!(check_jacobson_bound(&ring("zmod(9)"), 2, &c).passed());
        let u = upper_triangular(2, &ring("gf(2)")).unwrap();
        assert!(check_jacobson_bound(&u, 2, &c).passed());
        let f = check_jacobson_bound(&ring("gf(5)"), 2, &c);
        assert!(f.note.unwrap().contains("J = 0"));
    }

    #[test]
    fn hyperbola_examples() {
        let c = ctx();
        let rec = check_hyperbola_ideal_bound(&ring("zmod(4)"), 4, &c);
        assert!(rec.passed(), "{rec:?}");
        assert!(check_hyperbola_ideal_bound(&ring("gf(5)"), 2, &c).passed());
    }

    #[test]
    fn plancherel_examples() {
        let c = ctx();
        assert!(check_plancherel_bound(&ring("gf(4)"), 2, 20, &c).passed());
        let full = spectrum_fft(&PointSet::full(&ring("gf(3)"), 2, &Budget::unlimited()).unwrap(), &Budget::unlimited()).unwrap();
        assert!(plancherel_margin(&full).abs() < 1e-12);
    }

    #[test]
    fn agreement_small() {
        let c = ctx();
        let polys = agreement_polynomials(3, 5, 1);
        assert_eq!(polys.len(), 6);
        assert!(check_agreement(&ring("mat(2,gf(2))"), 2, &agreement_polynomials(2, 5, 1), &c).passed());
        assert!(check_agreement(&ring("zmod(6)"), 3, &polys, &c).passed());
    }

    #[test]
    fn contrast_examples() {
        let c = ctx();
        for s in ["gf(3)", "gf(4)", "zmod(9)", "mat(2,gf(2))"] {
            assert!(check_contrast(&ring(s), 2, &c).passed(), "{s}");
        }
    }
}
