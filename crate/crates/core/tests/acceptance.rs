//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p ringfourier-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use ringfourier::budget::Budget;
use ringfourier::poly::NcPolynomial;
use ringfourier::verify::*;
use ringfourier::Ring;

fn ring(s: &str) -> Ring {
    Ring::parse(s).unwrap()
}

fn ctx() -> Context {
    Context::new(Budget::unlimited(), 0)
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn judge(records: &[CheckRecord]) -> Outcome {
    let failed: Vec<&CheckRecord> = records.iter().filter(|r| !r.passed()).collect();
    let skipped = records.iter().filter(|r| r.status == Status::Skip).count();
    let worst = records
        .iter()
        .filter(|r| r.status == Status::Pass)
        .map(|r| r.max_deviation)
        .fold(0.0, f64::max);
    let mut detail = format!("{} records, {} skipped, max deviation {worst:.2e}", records.len(), skipped);
    for f in &failed {
        detail.push_str(&format!("\n      failed: {}", serde_json::to_string(f).unwrap()));
    }
    Outcome {
        ok: failed.is_empty() && skipped < records.len(),
        detail,
    }
}

fn suite(name: &str) -> Vec<CheckRecord> {
    run_suite(name, &ctx(), false).unwrap()
}

fn c1() -> Outcome {
    let fields = [3, 5, 7, 9, 11, 13, 25, 27, 2, 4, 8, 16];
    let recs: Vec<CheckRecord> = fields.iter().map(|q| check_gauss(&ring(&format!("gf({q})")))).collect();
    judge(&recs)
}

fn c2() -> Outcome {
    let c = ctx();
    let mut recs = Vec::new();
    for q in [3, 5, 7, 9] {
        for d in [2, 3] {
            recs.push(check_paraboloid_field(&ring(&format!("gf({q})")), d, &c));
        }
    }
    let ones = recs.iter().all(|r| r.measurements.iter().any(|m| m.label == "C" && m.expected == 1.0));
    let mut out = judge(&recs);
    out.ok &= ones;
    out
}

fn c3() -> Outcome {
    judge(&suite("nonfield"))
}

fn c4() -> Outcome {
    let c = ctx();
    let recs: Vec<CheckRecord> = [("gf(3)", 2), ("gf(5)", 2), ("gf(7)", 2), ("gf(3)", 3), ("gf(3)", 4)]
        .iter()
        .map(|&(f, n)| matrix_growth_probe(&ring(f), n, 2, &c))
        .collect();
    judge(&recs)
}

fn c5() -> Outcome {
    let c = ctx();
    let recs: Vec<CheckRecord> = [("gf(3)", 2), ("gf(5)", 2), ("gf(7)", 2), ("gf(2)", 3)]
        .iter()
        .map(|&(f, n)| matrix_growth_probe(&ring(f), n, 3, &c))
        .collect();
    judge(&recs)
}

fn c6() -> Outcome {
    let c = ctx();
    let recs: Vec<CheckRecord> = [("gf(5)", 3), ("gf(7)", 3), ("gf(3)", 4)]
        .iter()
        .map(|&(f, d)| hamming_spectrum_check(&ring(f), d, &c))
        .collect();
    judge(&recs)
}

fn c7() -> Outcome {
    let out = suite("points");
    let mut o = judge(&out);
    o.ok &= out.len() == 2 * roster().len();
    o
}

fn c8() -> Outcome {
    judge(&[check_intro(3, 2, 2), check_intro(3, 2, 4), check_intro(5, 2, 3)])
}

fn c9() -> Outcome {
    let c = ctx();
    let (f2, f3) = (ring("gf(2)"), ring("gf(3)"));
    let recs = vec![
        check_product_formula(&f2, &f3, &ring("zmod(6)"), 2, &c),
        check_product_formula(&f3, &f3, &ring("prod(gf(3),gf(3))"), 2, &c),
    ];
    judge(&recs)
}

fn c10() -> Outcome {
    judge(&suite("ideal"))
}

fn c11() -> Outcome {
    let c = ctx();
    let f = NcPolynomial::paraboloid(2).unwrap();
    let recs: Vec<CheckRecord> = roster().iter().map(|r| check_density(r, &f, 2, 200, &c)).collect();
    judge(&recs)
}

fn c12() -> Outcome {
    let recs = suite("agreement");
    let polys_ok = recs
        .iter()
        .all(|r| r.measurements.iter().any(|m| m.label == "polynomials" && m.measured == 51.0));
    let mut o = judge(&recs);
    o.ok &= polys_ok;
    o
}

fn c13() -> Outcome {
    judge(&[check_nu(0)])
}

#[test]
fn acceptance_criteria() {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 13] = [
        (1, "Gauss sums over fields", 1, c1),
        (2, "paraboloid over odd fields has C = 1", 30, c2),
        (3, "non-field witnesses and Jacobson equality", 1, c3),
        (4, "matrix probe ratios, d = 2", 120, c4),
        (5, "matrix probe ratios, d = 3", 60, c5),
        (6, "hyperbola strata with a zero coordinate", 30, c6),
        (7, "graph and hyperbola point counts", 5, c7),
        (8, "prime-power exponential sum", 1, c8),
        (9, "product formula", 10, c9),
        (10, "ideal bound on the roster", 60, c10),
        (11, "density property", 120, c11),
        (12, "direct / FFT / graph agreement and Parseval", 180, c12),
        (13, "simplex functional", 1, c13),
    ];
    let mut failures = Vec::new();
    for (n, title, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(limit);
        let ok = out.ok && in_time;
        let status = if ok { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {n:>2}: {title} ({:.2}s, limit {limit}s{}) - {}",
            took.as_secs_f64(),
            if in_time { "" } else { ", over time" },
            out.detail
        );
        if !ok {
            failures.push(n);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
