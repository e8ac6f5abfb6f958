//! Difference counts `n(E)` and the density property.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{guard, roster, CheckRecord, Context, Measurement};
use crate::budget::{pow_sat, Budget};
use crate::error::{Error, Result};
use crate::poly::NcPolynomial;
use crate::ring::Ring;
use crate::variety::{join_point, split_point, variety_points, PointSet, VarietySpec};

/// Largest `|R|^d` for which membership bitsets are allocated.
const BITSET_LIMIT: u128 = 1 << 28;

#[derive(Clone, Debug, Serialize)]
pub struct DifferenceReport {
    pub ring: String,
    pub d: usize,
    pub variety: String,
    pub e_size: usize,
    pub n_e: u64,
    pub threshold: f64,
    /// `n(E) - |E|^2 |V| / |R|^d`.
    pub discrepancy: f64,
    pub pass: bool,
}

struct Bits(Vec<u64>);

impl Bits {
    fn of(points: &[u64], total: u64) -> Bits {
        let mut w = vec![0u64; (total as usize).div_ceil(64)];
        for &p in points {
            w[(p / 64) as usize] |= 1 << (p % 64);
        }
        Bits(w)
    }

    fn has(&self, p: u64) -> bool {
        self.0[(p / 64) as usize] >> (p % 64) & 1 == 1
    }
}

/// `|{(x, y) in E x E : x - y in V}|`, ordered pairs, exact.
pub fn difference_count(e: &PointSet, v: &PointSet, budget: &Budget) -> Result<u64> {
    if !e.ring().same_ring(v.ring()) {
        return Err(Error::MixedRings);
    }
    if e.dimension() != v.dimension() {
        return Err(Error::DimensionMismatch {
            expected: e.dimension(),
            got: v.dimension(),
        });
    }
    let ring = e.ring();
    let (n, d) = (ring.size(), e.dimension());
    let total = pow_sat(n as u64, d);
    if total > BITSET_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "difference count bitset",
            required: total,
            budget: BITSET_LIMIT as u64,
        });
    }
    let (a, b) = (e.len() as u128, v.len() as u128);
    let pairs_cost = a * a;
    let shift_cost = a * b;
    budget.check("difference count", pairs_cost.min(shift_cost))?;
    let split = |p: u64| split_point(p, n, d);
    let e_elems: Vec<Vec<usize>> = e.indices().iter().map(|&p| split(p)).collect();
    let mut diff = vec![0usize; d];
    let mut count = 0u64;
    if pairs_cost <= shift_cost {
        let in_v = Bits::of(v.indices(), total as u64);
        for x in &e_elems {
            for y in &e_elems {
                for i in 0..d {
                    diff[i] = ring.sub(x[i], y[i]);
                }
                count += in_v.has(join_point(&diff, n)) as u64;
            }
        }
    } else {
        // y = x - v
        let in_e = Bits::of(e.indices(), total as u64);
        let v_elems: Vec<Vec<usize>> = v.indices().iter().map(|&p| split(p)).collect();
        for x in &e_elems {
            for w in &v_elems {
                for i in 0..d {
                    diff[i] = ring.sub(x[i], w[i]);
                }
                count += in_e.has(join_point(&diff, n)) as u64;
            }
        }
    }
    Ok(count)
}

pub fn difference_report(e: &PointSet, v: &PointSet, variety: &VarietySpec, threshold: f64, budget: &Budget) -> Result<DifferenceReport> {
    let n_e = difference_count(e, v, budget)?;
    let total = pow_sat(e.ring().size() as u64, e.dimension()) as f64;
    let expected = (e.len() as f64).powi(2) * v.len() as f64 / total;
    Ok(DifferenceReport {
        ring: e.ring().to_string(),
        d: e.dimension(),
        variety: variety.to_string(),
        e_size: e.len(),
        n_e,
        threshold,
        discrepancy: n_e as f64 - expected,
        pass: (e.len() as f64) <= threshold || n_e > 0,
    })
}

/// Stable per-ring stream so suites do not depend on evaluation order.
fn ring_seed(seed: u64, ring: &Ring, d: usize) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in ring.to_string().bytes().chain([d as u8]) {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^ seed
}

/// Random sets `E` just above `C q^d / sqrt(|V|)` with `V = V_{f,1}` must have `n(E) > 0`.
pub fn check_density(ring: &Ring, f: &NcPolynomial, d: usize, trials: usize, ctx: &Context) -> CheckRecord {
    let seed = ctx.seed;
    guard("density", &[ring], || {
        let mut rec = CheckRecord::new("density", &[ring]).seed(seed);
        rec.push(Measurement::info("d", d as f64));
        let spec = VarietySpec::graph(f.clone(), 1);
        let c = ctx.salem(ring, d, &spec)?;
        let v = variety_points(&spec, ring, d, &ctx.budget)?;
        let total = pow_sat(ring.size() as u64, d);
        let threshold = c * total as f64 / (v.len() as f64).sqrt();
        rec.push(Measurement::info("C", c));
        rec.push(Measurement::info("threshold", threshold));
        // thresholds are often integers computed through square roots
        let slack = 1e-9 * threshold.max(1.0);
        if threshold + slack >= total as f64 {
            rec.skip(format!("threshold {threshold:.4} >= |R|^d = {total}"));
            return Ok(rec);
        }
        let k = (threshold + slack).floor() as usize + 1;
        rec.push(Measurement::info("|E|", k as f64));
        let mut rng = ChaCha8Rng::seed_from_u64(ring_seed(seed, ring, d));
        let mut min_n = u64::MAX;
        let mut min_disc = f64::INFINITY;
        for _ in 0..trials {
            let picked: Vec<u64> = sample(&mut rng, total as usize, k).into_iter().map(|i| i as u64).collect();
            let e = PointSet::new(ring, d, picked)?;
            let rep = difference_report(&e, &v, &spec, threshold, &ctx.budget)?;
            min_n = min_n.min(rep.n_e);
            min_disc = min_disc.min(rep.discrepancy);
        }
        rec.push(Measurement::ge("min n(E)", min_n as f64, 1.0, 0.0));
        rec.push(Measurement::info("min discrepancy", min_disc));
        Ok(rec)
    })
}

pub(super) fn suite_density(ctx: &Context) -> Vec<CheckRecord> {
    let f = NcPolynomial::paraboloid(2).expect("d = 2");
    roster().iter().map(|r| check_density(r, &f, 2, 200, ctx)).collect()
}
