//! Fourier coefficients of point sets in `R^d` and the Salem constant.
//!
//! `coef(psi) = |R|^{-d} sum_{x in S} psi(x)`. Every method reduces each
//! coefficient to an integer histogram of phases modulo `L` and sums
//! `hist[k] * exp(2 pi i k / L)` in increasing `k`, except the FFT path, which
//! runs a naive DFT along each cyclic axis and agrees to rounding.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{pow_sat, Budget};
use crate::dual::{Dual, Frequency};
use crate::error::{Error, Result};
use crate::poly::NcPolynomial;
use crate::ring::{Ring, TABLE_LIMIT};
use crate::variety::{odometer_step, variety_points, PointSet, VarietySpec};

/// Largest dense array the FFT path will allocate (complex entries).
pub const FFT_MAX_LEN: u128 = 1 << 26;

/// Tie tolerance when picking the argmax frequency.
pub const ARGMAX_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Auto,
    Direct,
    Fft,
    Graph,
    Probe,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Direct => "direct",
            Method::Fft => "fft",
            Method::Graph => "graph",
            Method::Probe => "probe",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Method::Auto),
            "direct" => Ok(Method::Direct),
            "fft" => Ok(Method::Fft),
            "graph" => Ok(Method::Graph),
            "probe" => Ok(Method::Probe),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// Dense spectrum indexed by frequency index, normalization `|R|^{-d}` included.
#[derive(Clone)]
pub struct Spectrum {
    dual: Arc<Dual>,
    size: usize,
    method: Method,
    coefficients: Vec<Complex64>,
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Spectrum({}, d={}, |S|={}, {})",
            self.dual.ring(),
            self.dual.dimension(),
            self.size,
            self.method
        )
    }
}

impl Spectrum {
    pub fn ring(&self) -> &Ring {
        self.dual.ring()
    }

    pub fn dual(&self) -> &Arc<Dual> {
        &self.dual
    }

    pub fn dimension(&self) -> usize {
        self.dual.dimension()
    }

    /// `|S|`.
    pub fn set_size(&self) -> usize {
        self.size
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, freq: &Frequency) -> Result<Complex64> {
        Ok(self.coefficients[self.dual.index_of(freq)? as usize])
    }

    /// `|R|^d sum |coef|^2 - |S|`, relative to `max(|S|, 1)`.
    pub fn parseval_residual(&self) -> f64 {
        let n = self.coefficients.len() as f64;
        let energy: f64 = self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>() * n;
        (energy - self.size as f64).abs() / (self.size.max(1) as f64)
    }

    /// Largest `|coef|` over nontrivial frequencies, with the first index attaining it.
    pub fn max_nontrivial(&self) -> Option<(usize, f64)> {
        let max = self.coefficients.iter().skip(1).map(|c| c.norm()).fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return None;
        }
        let idx = 1 + self
            .coefficients
            .iter()
            .skip(1)
            .position(|c| c.norm() >= max - ARGMAX_TOLERANCE)
            .expect("max is attained");
        Some((idx, max))
    }

    pub fn salem_report(&self, variety: &VarietySpec) -> Result<SalemReport> {
        if self.size == 0 {
            return Err(Error::EmptyVariety);
        }
        let n = self.coefficients.len() as f64;
        let root = (self.size as f64).sqrt();
        let (c, argmax) = match self.max_nontrivial() {
            Some((i, m)) => (m * n / root, self.dual.frequency_at(i as u64)),
            None => (0.0, self.dual.frequency_at(0)),
        };
        Ok(SalemReport {
            ring: self.ring().to_string(),
            d: self.dimension(),
            variety: variety.to_string(),
            size: self.size,
            c,
            argmax,
            lower_bound: false,
            method: self.method,
            tolerance: ARGMAX_TOLERANCE,
        })
    }

    /// Columns `frequency_string, re, im, modulus`, one row per frequency in index order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Precondition(format!("csv write failed: {e}"));
        w.write_record(["frequency_string", "re", "im", "modulus"]).map_err(err)?;
        for (i, c) in self.coefficients.iter().enumerate() {
            w.write_record([
                self.dual.frequency_at(i as u64).to_string(),
                c.re.to_string(),
                c.im.to_string(),
                c.norm().to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::Precondition(format!("write failed: {e}")))?;
        Ok(())
    }
}

/// Salem constant (or a lower bound for it) with its witness frequency.
#[derive(Clone, Debug, Serialize)]
pub struct SalemReport {
    pub ring: String,
    pub d: usize,
    pub variety: String,
    pub size: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub argmax: Frequency,
    pub lower_bound: bool,
    pub method: Method,
    pub tolerance: f64,
}

fn sum_histogram(hist: &[u64], roots: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&h, &r) in hist.iter().zip(roots) {
        if h != 0 {
            acc += r * h as f64;
        }
    }
    acc
}

/// Per-block phases for every element of `R`, from block digits.
fn phase_vector(dual: &Dual, digits: &[u64]) -> Vec<u32> {
    let ring = dual.ring();
    let rank = dual.block_rank(digits);
    if let Some(t) = dual.table() {
        let n = ring.size();
        return t[rank * n..(rank + 1) * n].iter().map(|&p| p as u32).collect();
    }
    (0..ring.size()).map(|a| dual.block_phase_digits(digits, a) as u32).collect()
}

/// Shared histogram kernel: every point is `d` element indices in `flat`.
fn histogram_spectrum(dual: &Arc<Dual>, flat: &[u32], size: usize, method: Method) -> Spectrum {
    let d = dual.dimension();
    let n = dual.ring().size();
    let total = dual.frequency_count() as usize;
    let l = dual.exponent() as usize;
    let norm = 1.0 / total as f64;
    let roots = dual.roots();
    let mut coefficients = vec![Complex64::new(0.0, 0.0); total];

    if let Some(table) = dual.table() {
        coefficients.par_iter_mut().enumerate().for_each_init(
            || (vec![0u64; l], vec![0usize; d]),
            |(hist, rows), (fi, out)| {
                let mut idx = fi;
                for r in rows.iter_mut() {
                    *r = (idx % n) * n;
                    idx /= n;
                }
                hist.iter_mut().for_each(|h| *h = 0);
                for point in flat.chunks_exact(d) {
                    let mut ph = 0usize;
                    for (x, &row) in point.iter().zip(rows.iter()) {
                        ph += table[row + *x as usize] as usize;
                    }
                    hist[ph % l] += 1;
                }
                *out = sum_histogram(hist, roots) * norm;
            },
        );
    } else {
        // no phase table: precompute element coordinates once
        let ring = dual.ring();
        let m = ring.factors().len();
        let mut coords = vec![0u64; flat.len() * m];
        for (k, &x) in flat.iter().enumerate() {
            ring.coords_into(x as usize, &mut coords[k * m..(k + 1) * m]);
        }
        let weights: Vec<u64> = ring.factors().iter().map(|&f| dual.exponent() / f).collect();
        coefficients.par_iter_mut().enumerate().for_each_init(
            || vec![0u64; l],
            |hist, (fi, out)| {
                let freq = dual.frequency_at(fi as u64);
                let scaled: Vec<Vec<u64>> = freq
                    .blocks()
                    .iter()
                    .map(|b| b.iter().zip(&weights).map(|(&c, &w)| c * w % l as u64).collect())
                    .collect();
                hist.iter_mut().for_each(|h| *h = 0);
                for (pk, _) in flat.chunks_exact(d).enumerate() {
                    let mut ph = 0u64;
                    for (i, block) in scaled.iter().enumerate() {
                        let off = (pk * d + i) * m;
                        for (c, x) in block.iter().zip(&coords[off..off + m]) {
                            ph = (ph + c * x) % l as u64;
                        }
                    }
                    hist[ph as usize] += 1;
                }
                *out = sum_histogram(hist, roots) * norm;
            },
        );
    }
    Spectrum {
        dual: dual.clone(),
        size,
        method,
        coefficients,
    }
}

pub fn direct_work(ring: &Ring, d: usize, points: usize) -> u128 {
    pow_sat(ring.size() as u64, d).saturating_mul(points as u128).saturating_mul(d as u128)
}

pub fn fft_work(ring: &Ring, d: usize) -> u128 {
    let axis_sum: u128 = ring.factors().iter().map(|&f| f as u128).sum::<u128>() * d as u128;
    pow_sat(ring.size() as u64, d).saturating_mul(axis_sum)
}

pub fn graph_work(ring: &Ring, d: usize) -> u128 {
    direct_work(ring, d, pow_sat(ring.size() as u64, d - 1).min(usize::MAX as u128) as usize)
}

/// Sum over the points of `S`, one frequency at a time.
pub fn spectrum_direct(points: &PointSet, budget: &Budget) -> Result<Spectrum> {
    let ring = points.ring();
    let d = points.dimension();
    budget.check("direct spectrum", direct_work(ring, d, points.len()))?;
    let dual = Dual::new(ring, d)?;
    Ok(histogram_spectrum(&dual, &points.flat_elements(), points.len(), Method::Direct))
}

/// Naive DFT along each of the `d·m` cyclic axes of the indicator array.
pub fn spectrum_fft(points: &PointSet, budget: &Budget) -> Result<Spectrum> {
    let ring = points.ring();
    let d = points.dimension();
    let total = pow_sat(ring.size() as u64, d);
    if total > FFT_MAX_LEN {
        return Err(Error::BudgetExceeded {
            what: "fft memory",
            required: total,
            budget: FFT_MAX_LEN as u64,
        });
    }
    budget.check("fft spectrum", fft_work(ring, d))?;
    let dual = Dual::new(ring, d)?;
    let total = total as usize;
    let n = ring.size();
    let mut data = vec![Complex64::new(0.0, 0.0); total];
    for &p in points.indices() {
        let pos = points
            .elements(p)
            .iter()
            .rev()
            .fold(0usize, |acc, &x| acc * n + ring.rank(x));
        data[pos] = Complex64::new(1.0, 0.0);
    }

    let l = dual.exponent();
    let roots = dual.roots();
    let mut stride = 1usize;
    for _ in 0..d {
        for &len in ring.factors() {
            let len = len as usize;
            let w = l as usize / len;
            let block = stride * len;
            data.par_chunks_mut(block).for_each_init(
                || vec![Complex64::new(0.0, 0.0); len],
                |line, chunk| {
                    for inner in 0..stride {
                        for (k, slot) in line.iter_mut().enumerate() {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for t in 0..len {
                                acc += chunk[inner + t * stride] * roots[(k * t % len) * w];
                            }
                            *slot = acc;
                        }
                        for (k, v) in line.iter().enumerate() {
                            chunk[inner + k * stride] = *v;
                        }
                    }
                },
            );
            stride *= len;
        }
    }
    let norm = 1.0 / total as f64;
    data.iter_mut().for_each(|c| *c *= norm);
    Ok(Spectrum {
        dual,
        size: points.len(),
        method: Method::Fft,
        coefficients: data,
    })
}

/// Graph points `(x, f(x) + c)` in odometer order of `x`, flattened.
fn graph_flat(f: &NcPolynomial, c: i64, ring: &Ring, d: usize) -> Vec<u32> {
    let n = ring.size();
    let shift = ring.integer_image(c);
    let count = pow_sat(n as u64, d - 1) as usize;
    let mut flat = Vec::with_capacity(count * d);
    let mut x = vec![0usize; d - 1];
    loop {
        flat.extend(x.iter().map(|&v| v as u32));
        flat.push(ring.add(f.evaluate_unchecked(ring, &x), shift) as u32);
        if !odometer_step(&mut x, n) {
            break;
        }
    }
    flat
}

/// `coef(a) = |R|^{-d} sum_{x in R^{d-1}} psi_{a'}(x) psi_{a_d}(f(x) + c)`.
pub fn graph_spectrum(f: &NcPolynomial, c: i64, ring: &Ring, d: usize, budget: &Budget) -> Result<Spectrum> {
    if d < 1 {
        return Err(Error::Precondition("dimension d must be at least 1".into()));
    }
    f.check_dimension(d)?;
    budget.check("graph spectrum", graph_work(ring, d))?;
    let dual = Dual::new(ring, d)?;
    let flat = graph_flat(f, c, ring, d);
    let size = flat.len() / d;
    Ok(histogram_spectrum(&dual, &flat, size, Method::Graph))
}

/// Calls `visit` on every tuple of `alphabet^len`, in parallel chunks that each
/// own a histogram of `bins` counters; the histograms are summed at the end.
fn par_histogram<S, M, V>(alphabet: usize, len: usize, bins: usize, make: M, visit: V) -> Vec<u64>
where
    M: Fn() -> S + Sync,
    V: Fn(&mut S, &[usize], &mut [u64]) + Sync,
{
    let mut top = 0;
    let mut chunks = 1usize;
    while top < len && chunks < 4096 {
        chunks *= alphabet;
        top += 1;
    }
    let low = len - top;
    (0..chunks)
        .into_par_iter()
        .fold(
            || vec![0u64; bins],
            |mut hist, chunk| {
                let mut state = make();
                let mut x = vec![0usize; len];
                let mut c = chunk;
                for slot in &mut x[low..] {
                    *slot = c % alphabet;
                    c /= alphabet;
                }
                loop {
                    visit(&mut state, &x, &mut hist);
                    if !odometer_step(&mut x[..low], alphabet) {
                        break;
                    }
                }
                hist
            },
        )
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// One graph coefficient, summing over `R^{d-1}` without materializing the variety.
pub fn probe_frequency(
    f: &NcPolynomial,
    c: i64,
    ring: &Ring,
    d: usize,
    freq: &Frequency,
    budget: &Budget,
) -> Result<Complex64> {
    if d < 1 {
        return Err(Error::Precondition("dimension d must be at least 1".into()));
    }
    f.check_dimension(d)?;
    let dual = Dual::new(ring, d)?;
    dual.index_of(freq)?;
    budget.check("probe", pow_sat(ring.size() as u64, d - 1))?;
    let hist = match ring.matrix_parts() {
        Some((n, base)) if ring.size() > TABLE_LIMIT && base.size() <= TABLE_LIMIT => {
            matrix_probe(f, c, n, base, &dual, freq)?
        }
        _ => generic_probe(f, c, ring, &dual, freq),
    };
    let total = dual.frequency_count() as f64;
    Ok(sum_histogram(&hist, dual.roots()) / total)
}

fn generic_probe(f: &NcPolynomial, c: i64, ring: &Ring, dual: &Dual, freq: &Frequency) -> Vec<u64> {
    let d = dual.dimension();
    let l = dual.exponent() as usize;
    let shift = ring.integer_image(c);
    let phases: Vec<Vec<u32>> = freq.blocks().iter().map(|b| phase_vector(dual, b)).collect();
    par_histogram(
        ring.size(),
        d - 1,
        l,
        || (),
        |_, x, hist| {
            let y = ring.add(f.evaluate_unchecked(ring, x), shift);
            let mut ph = phases[d - 1][y] as usize;
            for (pv, &xi) in phases.iter().zip(x) {
                ph += pv[xi] as usize;
            }
            hist[ph % l] += 1;
        },
    )
}

/// Arithmetic on matrix entries, given as base-ring element indices.
trait EntryOps: Sync {
    fn zero(&self) -> u32;
    fn one(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn scale(&self, a: u32, k: i64) -> u32;

    fn matmul(&self, a: &[u32], b: &[u32], out: &mut [u32], n: usize) {
        for i in 0..n {
            for k in 0..n {
                let mut acc = self.zero();
                for j in 0..n {
                    acc = self.add(acc, self.mul(a[i * n + j], b[j * n + k]));
                }
                out[i * n + k] = acc;
            }
        }
    }
}

/// `Z/p` entries where the element index is the residue.
struct PrimeEntries {
    p: u32,
}

impl EntryOps for PrimeEntries {
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        a * b % self.p
    }
    fn scale(&self, a: u32, k: i64) -> u32 {
        (k.rem_euclid(self.p as i64) as u64 * a as u64 % self.p as u64) as u32
    }
    #[inline]
    fn matmul(&self, a: &[u32], b: &[u32], out: &mut [u32], n: usize) {
        for i in 0..n {
            let row = &a[i * n..(i + 1) * n];
            for k in 0..n {
                let mut acc = 0u64;
                for j in 0..n {
                    acc += row[j] as u64 * b[j * n + k] as u64;
                }
                out[i * n + k] = (acc % self.p as u64) as u32;
            }
        }
    }
}

struct RingEntries<'a> {
    ring: &'a Ring,
}

impl EntryOps for RingEntries<'_> {
    fn zero(&self) -> u32 {
        self.ring.zero() as u32
    }
    fn one(&self) -> u32 {
        self.ring.one() as u32
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        self.ring.add(a as usize, b as usize) as u32
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.ring.mul(a as usize, b as usize) as u32
    }
    fn scale(&self, a: u32, k: i64) -> u32 {
        self.ring.scale(a as usize, k) as u32
    }
}

fn matrix_probe(
    f: &NcPolynomial,
    c: i64,
    n: usize,
    base: &Ring,
    dual: &Dual,
    freq: &Frequency,
) -> Result<Vec<u64>> {
    let prime = !base.is_table() && base.is_field() && base.factors().len() == 1 && base.spec().size() == Some(base.characteristic());
    if prime {
        let ops = PrimeEntries {
            p: base.characteristic() as u32,
        };
        matrix_probe_with(&ops, f, c, n, base, dual, freq)
    } else {
        matrix_probe_with(&RingEntries { ring: base }, f, c, n, base, dual, freq)
    }
}

fn matrix_probe_with<E: EntryOps>(
    ops: &E,
    f: &NcPolynomial,
    c: i64,
    n: usize,
    base: &Ring,
    dual: &Dual,
    freq: &Frequency,
) -> Result<Vec<u64>> {
    let d = dual.dimension();
    let nn = n * n;
    let l = dual.exponent() as usize;
    let base_dual = Dual::new(base, 1)?;
    if base_dual.exponent() as usize != l {
        return Err(Error::Invariant("matrix and base exponents differ".into()));
    }
    let mb = base.factors().len();
    // phases[block][pos][entry]
    let phases: Vec<Vec<Vec<u32>>> = freq
        .blocks()
        .iter()
        .map(|block| {
            (0..nn)
                .map(|pos| phase_vector(&base_dual, &block[pos * mb..(pos + 1) * mb]))
                .collect()
        })
        .collect();
    let mut shift = vec![ops.zero(); nn];
    let c_entry = ops.scale(ops.one(), c);
    for i in 0..n {
        shift[i * n + i] = c_entry;
    }
    let words: Vec<(i64, Vec<usize>)> = f.words().iter().map(|w| (w.coeff, w.letters.clone())).collect();

    struct Scratch {
        vars: Vec<u32>,
        acc: Vec<u32>,
        prod: Vec<u32>,
        tmp: Vec<u32>,
    }
    let hist = par_histogram(
        base.size(),
        (d - 1) * nn,
        l,
        || Scratch {
            vars: vec![0; (d - 1) * nn],
            acc: vec![0; nn],
            prod: vec![0; nn],
            tmp: vec![0; nn],
        },
        |s, x, hist| {
            let mut ph = 0usize;
            for (k, &e) in x.iter().enumerate() {
                s.vars[k] = e as u32;
                ph += phases[k / nn][k % nn][e] as usize;
            }
            s.acc.copy_from_slice(&shift);
            for (coeff, letters) in &words {
                let first = letters[0] - 1;
                s.prod.copy_from_slice(&s.vars[first * nn..(first + 1) * nn]);
                for &letter in &letters[1..] {
                    let v = letter - 1;
                    ops.matmul(&s.prod, &s.vars[v * nn..(v + 1) * nn], &mut s.tmp, n);
                    std::mem::swap(&mut s.prod, &mut s.tmp);
                }
                for (a, &p) in s.acc.iter_mut().zip(&s.prod) {
                    let term = if *coeff == 1 { p } else { ops.scale(p, *coeff) };
                    *a = ops.add(*a, term);
                }
            }
            for (pos, &y) in s.acc.iter().enumerate() {
                ph += phases[d - 1][pos][y as usize] as usize;
            }
            hist[ph % l] += 1;
        },
    );
    Ok(hist)
}

/// Work estimates for `auto`, cheapest first, restricted to methods that apply.
fn candidate_methods(variety: &VarietySpec, ring: &Ring, d: usize, points: Option<usize>) -> Vec<(u128, Method)> {
    let mut out = Vec::new();
    if pow_sat(ring.size() as u64, d) <= FFT_MAX_LEN {
        out.push((fft_work(ring, d), Method::Fft));
    }
    if let Some(p) = points {
        out.push((direct_work(ring, d, p), Method::Direct));
    }
    if matches!(variety, VarietySpec::Graph { .. }) {
        out.push((graph_work(ring, d), Method::Graph));
    }
    out.sort_by_key(|&(w, _)| w);
    out
}

/// Full spectrum of a variety by the requested method.
pub fn variety_spectrum(
    variety: &VarietySpec,
    ring: &Ring,
    d: usize,
    method: Method,
    budget: &Budget,
) -> Result<Spectrum> {
    match method {
        Method::Probe => Err(Error::Precondition("probe computes single coefficients, not spectra".into())),
        Method::Graph => match variety {
            VarietySpec::Graph { f, c } => graph_spectrum(f, *c, ring, d, budget),
            _ => Err(Error::Precondition("the graph method needs a graph variety".into())),
        },
        Method::Direct => spectrum_direct(&variety_points(variety, ring, d, budget)?, budget),
        Method::Fft => spectrum_fft(&variety_points(variety, ring, d, budget)?, budget),
        Method::Auto => {
            // sizes are known up front, so an infeasible request fails before enumeration
            let expected = match variety {
                VarietySpec::Graph { .. } => pow_sat(ring.size() as u64, d.saturating_sub(1)),
                VarietySpec::Hamming { .. } => pow_sat(ring.unit_count() as u64, d.saturating_sub(1)),
                VarietySpec::Explicit(p) => p.len() as u128,
            };
            let estimate = candidate_methods(variety, ring, d, Some(expected.min(usize::MAX as u128) as usize));
            if let Some(&(work, _)) = estimate.first() {
                budget.check("spectrum", work)?;
            }
            let points = variety_points(variety, ring, d, budget)?;
            let candidates = candidate_methods(variety, ring, d, Some(points.len()));
            let Some(&(work, choice)) = candidates.first() else {
                return Err(Error::BudgetExceeded {
                    what: "spectrum",
                    required: pow_sat(ring.size() as u64, d),
                    budget: FFT_MAX_LEN as u64,
                });
            };
            budget.check("spectrum", work)?;
            match choice {
                Method::Fft => spectrum_fft(&points, budget),
                Method::Direct => spectrum_direct(&points, budget),
                _ => variety_spectrum(variety, ring, d, choice, budget),
            }
        }
    }
}

/// Salem constant from a full spectrum.
pub fn salem_constant(variety: &VarietySpec, ring: &Ring, d: usize, method: Method, budget: &Budget) -> Result<SalemReport> {
    variety_spectrum(variety, ring, d, method, budget)?.salem_report(variety)
}

/// A certified lower bound for the Salem constant of a graph from single probes.
pub fn salem_lower_bound(
    f: &NcPolynomial,
    c: i64,
    ring: &Ring,
    d: usize,
    probes: &[Frequency],
    budget: &Budget,
) -> Result<SalemReport> {
    let size = pow_sat(ring.size() as u64, d - 1);
    let total = pow_sat(ring.size() as u64, d) as f64;
    let root = (size as f64).sqrt();
    let dual = Dual::new(ring, d)?;
    let mut best: Option<(f64, Frequency)> = None;
    for freq in probes {
        if freq.is_trivial() {
            dual.index_of(freq)?;
            continue;
        }
        let ratio = probe_frequency(f, c, ring, d, freq, budget)?.norm() * total / root;
        if best.as_ref().is_none_or(|(b, _)| ratio > *b + ARGMAX_TOLERANCE) {
            best = Some((ratio, freq.clone()));
        }
    }
    let (c_val, argmax) = best.unwrap_or((0.0, dual.frequency_at(0)));
    Ok(SalemReport {
        ring: ring.to_string(),
        d,
        variety: VarietySpec::graph(f.clone(), c).to_string(),
        size: size as usize,
        c: c_val,
        argmax,
        lower_bound: true,
        method: Method::Probe,
        tolerance: ARGMAX_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(s: &str) -> Ring {
        Ring::parse(s).unwrap()
    }

    fn b() -> Budget {
        Budget::unlimited()
    }

    fn parab(r: &Ring, d: usize) -> SalemReport {
        salem_constant(&VarietySpec::paraboloid(d, 0).unwrap(), r, d, Method::Auto, &b()).unwrap()
    }

    fn max_diff(a: &Spectrum, b: &Spectrum) -> f64 {
        a.coefficients()
            .iter()
            .zip(b.coefficients())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn full_set_and_delta() {
        let r = ring("gf(4)");
        let full = PointSet::full(&r, 2, &b()).unwrap();
        for s in [spectrum_direct(&full, &b()).unwrap(), spectrum_fft(&full, &b()).unwrap()] {
            assert!((s.coefficients()[0] - 1.0).norm() < 1e-12);
            assert!(s.coefficients()[1..].iter().all(|c| c.norm() < 1e-12));
        }
        let delta = PointSet::new(&r, 2, vec![0]).unwrap();
        let s = spectrum_direct(&delta, &b()).unwrap();
        assert!(s.coefficients().iter().all(|c| (c - 1.0 / 16.0).norm() < 1e-15));
        let empty = PointSet::empty(&r, 2);
        let s = spectrum_fft(&empty, &b()).unwrap();
        assert!(s.coefficients().iter().all(|c| c.norm() == 0.0));
        assert!(matches!(s.salem_report(&VarietySpec::Explicit(vec![])), Err(Error::EmptyVariety)));
    }

    /// Brute force straight from the definition, using `character_value`.
    fn oracle(points: &PointSet) -> Vec<Complex64> {
        let dual = Dual::new(points.ring(), points.dimension()).unwrap();
        let total = dual.frequency_count() as u64;
        (0..total)
            .map(|fi| {
                let f = dual.frequency_at(fi);
                points
                    .indices()
                    .iter()
                    .map(|&p| dual.character_value(&f, &points.elements(p)).unwrap())
                    .sum::<Complex64>()
                    / total as f64
            })
            .collect()
    }

    #[test]
    fn gf3_parabola_hand_values() {
        let r = ring("gf(3)");
        let v = variety_points(&VarietySpec::paraboloid(2, 0).unwrap(), &r, 2, &b()).unwrap();
        let s = spectrum_direct(&v, &b()).unwrap();
        let dual = s.dual().clone();
        for a in 0..3 {
            for bb in 0..3 {
                if a == 0 && bb == 0 {
                    continue;
                }
                let f = dual.trace_frequency(&[a, bb]).unwrap();
                let m = s.coefficient(&f).unwrap().norm();
                let expected = if bb == 0 { 0.0 } else { 3f64.sqrt() / 9.0 };
                assert!((m - expected).abs() < 1e-12, "({a},{bb}): {m}");
            }
        }
    }

    #[test]
    fn fft_matches_direct_on_random_sets() {
        let r = ring("zmod(6)");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let k = rng.gen_range(0..=36);
            let pts: Vec<u64> = (0..k).map(|_| rng.gen_range(0..36)).collect();
            let s = PointSet::new(&r, 2, pts).unwrap();
            let a = spectrum_direct(&s, &b()).unwrap();
            let f = spectrum_fft(&s, &b()).unwrap();
            assert!(max_diff(&a, &f) < 1e-9);
        }
    }

    #[test]
    fn direct_matches_definition_on_table_ring() {
        let u = crate::ring::upper_triangular(2, &ring("gf(2)")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<u64> = (0..20).map(|_| rng.gen_range(0..64)).collect();
        let s = PointSet::new(&u, 2, pts).unwrap();
        let direct = spectrum_direct(&s, &b()).unwrap();
        let fft = spectrum_fft(&s, &b()).unwrap();
        for ((x, y), z) in direct.coefficients().iter().zip(fft.coefficients()).zip(oracle(&s)) {
            assert!((x - z).norm() < 1e-12);
            assert!((y - z).norm() < 1e-9);
        }
    }

    #[test]
    fn methods_agree_on_noncommutative_graph() {
        let r = ring("mat(2,gf(2))");
        let f = NcPolynomial::parse("x1*x2 + x2*x1^2").unwrap();
        let v = VarietySpec::graph(f.clone(), 1);
        let pts = variety_points(&v, &r, 3, &b()).unwrap();
        let direct = spectrum_direct(&pts, &b()).unwrap();
        let fft = spectrum_fft(&pts, &b()).unwrap();
        let graph = graph_spectrum(&f, 1, &r, 3, &b()).unwrap();
        assert!(max_diff(&direct, &fft) < 1e-9);
        assert_eq!(direct.coefficients(), graph.coefficients());
        assert!(direct.parseval_residual() < 1e-6);
        assert!(fft.parseval_residual() < 1e-6);
    }

    #[test]
    fn free_coordinate_orthogonality() {
        let r = ring("zmod(4)");
        let f = NcPolynomial::parse("x1^3 + 2*x1").unwrap();
        let s = graph_spectrum(&f, 0, &r, 2, &b()).unwrap();
        for a in 1..4 {
            let freq = Frequency::new(vec![vec![a], vec![0]]);
            assert!(s.coefficient(&freq).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn shift_preserves_moduli() {
        let r = ring("gf(7)");
        let f = NcPolynomial::paraboloid(3).unwrap();
        let s0 = graph_spectrum(&f, 0, &r, 3, &b()).unwrap();
        let s1 = graph_spectrum(&f, 1, &r, 3, &b()).unwrap();
        let worst = s0
            .coefficients()
            .iter()
            .zip(s1.coefficients())
            .map(|(a, c)| (a.norm() - c.norm()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9);
    }

    #[test]
    fn salem_closed_forms() {
        let c = parab(&ring("gf(5)"), 2);
        assert!((c.c - 1.0).abs() < 1e-6);
        assert!((parab(&ring("gf(7)"), 2).c - 1.0).abs() < 1e-6);
        let z4 = parab(&ring("zmod(4)"), 2);
        assert!((z4.c - 2.0).abs() < 1e-6);
        assert_eq!(z4.argmax.to_string(), "2|2");
        assert!((parab(&ring("gf(2)"), 2).c - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn report_json_shape() {
        let r = parab(&ring("gf(3)"), 2);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["ring", "d", "variety", "size", "C", "argmax", "lower_bound", "method", "tolerance"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["lower_bound"], false);
        assert_eq!(v["size"], 3);
    }

    #[test]
    fn probe_matches_spectrum() {
        for (s, d) in [("mat(2,gf(2))", 2), ("zmod(6)", 3), ("gf(9)", 2)] {
            let r = ring(s);
            let f = NcPolynomial::paraboloid(d).unwrap();
            let spec = graph_spectrum(&f, 2, &r, d, &b()).unwrap();
            let dual = spec.dual().clone();
            for fi in [0u64, 1, 5, dual.frequency_count() as u64 - 1] {
                let freq = dual.frequency_at(fi);
                let p = probe_frequency(&f, 2, &r, d, &freq, &b()).unwrap();
                assert!((p - spec.coefficients()[fi as usize]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_kernel_matches_generic() {
        // mat(2,gf(9)) has 6561 elements, so the entry kernel runs
        let r = ring("mat(2,gf(9))");
        let f = NcPolynomial::parse("x1^2 + 2*x1").unwrap();
        let dual = Dual::new(&r, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..3 {
            let a = rng.gen_range(0..r.size());
            let bb = rng.gen_range(0..r.size());
            let freq = dual.trace_frequency(&[a, bb]).unwrap();
            let fast = probe_frequency(&f, 1, &r, 2, &freq, &b()).unwrap();
            let slow = sum_histogram(&generic_probe(&f, 1, &r, &dual, &freq), dual.roots()) / (r.size() * r.size()) as f64;
            assert!((fast - slow).norm() < 1e-12);
        }
    }

    #[test]
    fn prime_matrix_probe_gauss_value() {
        let r = ring("mat(2,gf(3))");
        let e11 = r.matrix_unit(0, 0).unwrap();
        let f = NcPolynomial::paraboloid(2).unwrap();
        let freq = trace_pair(&r, e11);
        let coef = probe_frequency(&f, 0, &r, 2, &freq, &b()).unwrap();
        let ratio = coef.norm() * 81.0 * 81.0 / 81f64.sqrt();
        assert!((ratio - 3f64.sqrt()).abs() < 1e-6);
        let trivial = probe_frequency(&f, 0, &r, 2, &Dual::new(&r, 2).unwrap().frequency_at(0), &b()).unwrap();
        assert!((trivial.re - 81.0 / 6561.0).abs() < 1e-15);
    }

    fn trace_pair(r: &Ring, a: usize) -> Frequency {
        Dual::new(r, 2).unwrap().trace_frequency(&[a, a]).unwrap()
    }

    #[test]
    fn lower_bound_report() {
        let r = ring("mat(2,gf(3))");
        let f = NcPolynomial::paraboloid(2).unwrap();
        let e11 = r.matrix_unit(0, 0).unwrap();
        let rep = salem_lower_bound(&f, 0, &r, 2, &[trace_pair(&r, e11)], &b()).unwrap();
        assert!(rep.lower_bound);
        assert!((rep.c - 3f64.sqrt()).abs() < 1e-6);
        let full = parab(&r, 2);
        assert!(full.c >= rep.c - 1e-9);
    }

    #[test]
    fn budget_guard() {
        let r = ring("gf(9)");
        let v = VarietySpec::paraboloid(3, 0).unwrap();
        assert!(matches!(
            salem_constant(&v, &r, 3, Method::Direct, &Budget::new(1000)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let r = ring("gf(9)");
        let v = VarietySpec::paraboloid(3, 0).unwrap();
        let run = |threads: usize, m: Method| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| variety_spectrum(&v, &r, 3, m, &b()).unwrap().coefficients().to_vec())
        };
        for m in [Method::Direct, Method::Fft] {
            assert_eq!(run(1, m), run(3, m));
        }
    }

    #[test]
    fn csv_output() {
        let r = ring("zmod(2)");
        let s = variety_spectrum(&VarietySpec::paraboloid(2, 0).unwrap(), &r, 2, Method::Direct, &b()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "frequency_string,re,im,modulus");
        assert_eq!(lines[1], "0|0,0.5,0,0.5");
        assert_eq!(lines.len(), 5);
    }
}
