//! Additive characters of `R^d`.
//!
//! A frequency is a tuple of `d` coordinate blocks over the ring's cyclic
//! factorization `Z/d_1 x ... x Z/d_m`. Its value at a point is
//! `exp(2 pi i sum_j c_j x_j / d_j)`, evaluated as an integer phase modulo the
//! exponent `L = lcm(d_j)` and then looked up in a fixed table of roots of unity,
//! so equal phases give bit-identical values.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::budget::{pow_sat, Budget};
use crate::error::{Error, Result};
use crate::ring::{mixed_radix, Ring, TABLE_LIMIT};

/// One coordinate block per copy of `R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frequency {
    blocks: Vec<Vec<u64>>,
}

impl Frequency {
    pub fn new(blocks: Vec<Vec<u64>>) -> Self {
        Frequency { blocks }
    }

    pub fn blocks(&self) -> &[Vec<u64>] {
        &self.blocks
    }

    pub fn dimension(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.iter().flatten().all(|&c| c == 0)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, c) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Frequency {
    type Err = Error;
    fn from_str(s: &str) -> Result<Frequency> {
        let blocks = s
            .trim()
            .split('|')
            .map(|block| {
                block
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<u64>()
                            .map_err(|_| Error::Parse(format!("bad frequency digit '{c}' in '{s}'")))
                    })
                    .collect::<Result<Vec<u64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Frequency { blocks })
    }
}

impl Serialize for Frequency {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `exp(2 pi i k / L)` for `k < L`.
pub fn roots_of_unity(order: u64) -> Vec<Complex64> {
    let l = order as f64;
    (0..order)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64) / l;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

/// Character data of `R^d`: phase weights, roots of unity, and an optional
/// `|R| x |R|` phase table indexed by (frequency-block rank, element).
pub struct Dual {
    ring: Ring,
    d: usize,
    exponent: u64,
    weights: Vec<u64>,
    roots: Vec<Complex64>,
    table: OnceLock<Vec<u16>>,
}

impl fmt::Debug for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dual({}, d={})", self.ring, self.d)
    }
}

impl Dual {
    pub fn new(ring: &Ring, d: usize) -> Result<Arc<Dual>> {
        if d == 0 {
            return Err(Error::Precondition("dimension d must be at least 1".into()));
        }
        let exponent = ring.exponent();
        let weights = ring.factors().iter().map(|&f| exponent / f).collect();
        Ok(Arc::new(Dual {
            ring: ring.clone(),
            d,
            exponent,
            weights,
            roots: roots_of_unity(exponent),
            table: OnceLock::new(),
        }))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    /// `L`, the additive exponent of `R`; every phase lives in `Z/L`.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn root(&self, phase: u64) -> Complex64 {
        self.roots[(phase % self.exponent) as usize]
    }

    /// `|R|^d`, saturating.
    pub fn frequency_count(&self) -> u128 {
        pow_sat(self.ring.size() as u64, self.d)
    }

    fn check_block(&self, block: &[u64]) -> Result<()> {
        let factors = self.ring.factors();
        if block.len() != factors.len() {
            return Err(Error::DimensionMismatch {
                expected: factors.len(),
                got: block.len(),
            });
        }
        if let Some((c, f)) = block.iter().zip(factors).find(|(c, f)| c >= f) {
            return Err(Error::CoordinateOutOfRange(format!("frequency digit {c} not below {f}")));
        }
        Ok(())
    }

    fn check_frequency(&self, freq: &Frequency) -> Result<()> {
        if freq.dimension() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: freq.dimension(),
            });
        }
        freq.blocks.iter().try_for_each(|b| self.check_block(b))
    }

    /// Digits of the block with the given mixed-radix rank.
    pub fn block_digits(&self, mut rank: usize) -> Vec<u64> {
        self.ring
            .factors()
            .iter()
            .map(|&f| {
                let c = rank as u64 % f;
                rank /= f as usize;
                c
            })
            .collect()
    }

    pub fn block_rank(&self, block: &[u64]) -> usize {
        mixed_radix(block, self.ring.factors())
    }

    /// Frequency index: block ranks in little-endian base `|R|`.
    pub fn index_of(&self, freq: &Frequency) -> Result<u64> {
        self.check_frequency(freq)?;
        let n = self.ring.size() as u64;
        Ok(freq
            .blocks
            .iter()
            .rev()
            .fold(0u64, |acc, b| acc * n + self.block_rank(b) as u64))
    }

    pub fn frequency_at(&self, mut index: u64) -> Frequency {
        let n = self.ring.size() as u64;
        let blocks = (0..self.d)
            .map(|_| {
                let r = (index % n) as usize;
                index /= n;
                self.block_digits(r)
            })
            .collect();
        Frequency { blocks }
    }

    /// All frequencies in index order, trivial first.
    pub fn frequencies(&self, budget: &Budget) -> Result<impl Iterator<Item = Frequency> + '_> {
        budget.check("frequency enumeration", self.frequency_count())?;
        let total = self.frequency_count() as u64;
        Ok((0..total).map(move |i| self.frequency_at(i)))
    }

    /// Phase of a single block against one element, from digits.
    pub fn block_phase_digits(&self, block: &[u64], elem: usize) -> u64 {
        let coords = self.ring.coords(elem);
        self.dot(block, &coords)
    }

    fn dot(&self, block: &[u64], coords: &[u64]) -> u64 {
        let l = self.exponent as u128;
        let s: u128 = block
            .iter()
            .zip(coords)
            .zip(&self.weights)
            .map(|((&c, &x), &w)| (c as u128 * x as u128 % l) * w as u128)
            .sum();
        (s % l) as u64
    }

    /// Whether the phase table is (or may be) materialized for this ring.
    pub fn has_table(&self) -> bool {
        self.ring.size() <= TABLE_LIMIT
    }

    /// Phase table `[rank * |R| + elem]`; only for `|R| <= TABLE_LIMIT`.
    pub fn table(&self) -> Option<&[u16]> {
        if !self.has_table() {
            return None;
        }
        Some(self.table.get_or_init(|| {
            let n = self.ring.size();
            let m = self.ring.factors().len();
            let mut coords = vec![0u64; n * m];
            for a in 0..n {
                self.ring.coords_into(a, &mut coords[a * m..(a + 1) * m]);
            }
            let mut t = vec![0u16; n * n];
            for r in 0..n {
                let block = self.block_digits(r);
                for a in 0..n {
                    t[r * n + a] = self.dot(&block, &coords[a * m..(a + 1) * m]) as u16;
                }
            }
            t
        }))
    }

    /// Phase of block `rank` against `elem`.
    #[inline]
    pub fn block_phase(&self, rank: usize, elem: usize) -> u64 {
        match self.table() {
            Some(t) => t[rank * self.ring.size() + elem] as u64,
            None => self.block_phase_digits(&self.block_digits(rank), elem),
        }
    }

    /// Integer phase of `freq` at a point given as `d` element indices.
    pub fn phase(&self, freq: &Frequency, point: &[usize]) -> Result<u64> {
        self.check_frequency(freq)?;
        if point.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: point.len(),
            });
        }
        if point.iter().any(|&x| x >= self.ring.size()) {
            return Err(Error::CoordinateOutOfRange("point element out of range".into()));
        }
        let l = self.exponent;
        Ok(freq
            .blocks
            .iter()
            .zip(point)
            .map(|(b, &x)| self.block_phase_digits(b, x))
            .fold(0, |acc, p| (acc + p) % l))
    }

    pub fn character_value(&self, freq: &Frequency, point: &[usize]) -> Result<Complex64> {
        Ok(self.root(self.phase(freq, point)?))
    }

    /// Digits of the block whose character is `x -> gamma(b x)`.
    pub fn trace_block(&self, b: usize) -> Result<Vec<u64>> {
        let gamma = self.ring.generating_character()?;
        let m = self.ring.factors().len();
        let mut unit = vec![0u64; m];
        (0..m)
            .map(|j| {
                unit.iter_mut().for_each(|u| *u = 0);
                unit[j] = 1;
                let e = self.ring.from_coords(&unit)?;
                let k = self.block_phase_digits(&gamma, self.ring.mul(b, e));
                let w = self.weights[j];
                if k % w != 0 {
                    return Err(Error::Invariant(format!("trace phase {k} is not a multiple of {w}")));
                }
                Ok(k / w)
            })
            .collect()
    }

    /// The frequency of `x -> gamma(b_1 x_1 + ... + b_d x_d)`.
    pub fn trace_frequency(&self, b: &[usize]) -> Result<Frequency> {
        if b.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: b.len(),
            });
        }
        let blocks = b.iter().map(|&x| self.trace_block(x)).collect::<Result<Vec<_>>>()?;
        Ok(Frequency { blocks })
    }

    /// Point index: element indices in little-endian base `|R|`.
    pub fn point_index(&self, point: &[usize]) -> u64 {
        let n = self.ring.size() as u64;
        point.iter().rev().fold(0u64, |acc, &x| acc * n + x as u64)
    }

    pub fn point_elements(&self, mut index: u64) -> Vec<usize> {
        let n = self.ring.size() as u64;
        (0..self.d)
            .map(|_| {
                let x = (index % n) as usize;
                index /= n;
                x
            })
            .collect()
    }
}

/// `exp(2 pi i sum c_j x_j / d_j)` for a frequency and point over `ring`.
pub fn character_value(ring: &Ring, freq: &Frequency, point: &[usize]) -> Result<Complex64> {
    Dual::new(ring, freq.dimension().max(1))?.character_value(freq, point)
}

pub fn trace_frequency(ring: &Ring, b: &[usize]) -> Result<Frequency> {
    Dual::new(ring, b.len())?.trace_frequency(b)
}

pub fn enumerate_frequencies(ring: &Ring, d: usize, budget: &Budget) -> Result<Vec<Frequency>> {
    let dual = Dual::new(ring, d)?;
    let all = dual.frequencies(budget)?.collect();
    Ok(all)
}

/// Whether `b -> trace_block(b)` is injective, i.e. the trace pairing is nondegenerate.
pub fn trace_pairing_is_injective(ring: &Ring) -> Result<bool> {
    let dual = Dual::new(ring, 1)?;
    let mut seen = std::collections::HashSet::new();
    for b in 0..ring.size() {
        if !seen.insert(dual.trace_block(b)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(s: &str) -> Ring {
        Ring::parse(s).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn frequency_text_round_trip() {
        let f: Frequency = "2|1,0|0,2".parse().unwrap();
        assert_eq!(f.blocks(), &[vec![2], vec![1, 0], vec![0, 2]]);
        assert_eq!(f.to_string(), "2|1,0|0,2");
        assert!("1,x".parse::<Frequency>().is_err());
        assert_eq!(serde_json::to_string(&f).unwrap(), "\"2|1,0|0,2\"");
    }

    #[test]
    fn trivial_character_is_one() {
        let r = ring("mat(2,gf(2))");
        let dual = Dual::new(&r, 2).unwrap();
        let zero = dual.frequency_at(0);
        assert!(zero.is_trivial());
        for x in 0..16 {
            for y in 0..16 {
                assert_eq!(dual.character_value(&zero, &[x, y]).unwrap(), Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn half_period() {
        let r = ring("zmod(4)");
        let v = character_value(&r, &Frequency::new(vec![vec![1]]), &[2]).unwrap();
        assert!(close(v, Complex64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn dimension_mismatch() {
        let r = ring("zmod(4)");
        let dual = Dual::new(&r, 2).unwrap();
        let f = dual.frequency_at(3);
        assert!(matches!(dual.phase(&f, &[1]), Err(Error::DimensionMismatch { .. })));
        let bad = Frequency::new(vec![vec![1]]);
        assert!(matches!(dual.phase(&bad, &[1, 2]), Err(Error::DimensionMismatch { .. })));
        let out_of_range = Frequency::new(vec![vec![4], vec![0]]);
        assert!(dual.index_of(&out_of_range).is_err());
    }

    #[test]
    fn counts_and_order() {
        let budget = Budget::unlimited();
        assert_eq!(enumerate_frequencies(&ring("zmod(2)"), 2, &budget).unwrap().len(), 4);
        assert_eq!(enumerate_frequencies(&ring("gf(3)"), 1, &budget).unwrap().len(), 3);
        let all = enumerate_frequencies(&ring("mat(2,gf(2))"), 1, &budget).unwrap();
        assert_eq!(all.len(), 16);
        assert!(all[0].is_trivial());
        let dual = Dual::new(&ring("zmod(6)"), 2).unwrap();
        for (i, f) in dual.frequencies(&budget).unwrap().enumerate() {
            assert_eq!(dual.index_of(&f).unwrap(), i as u64);
        }
        assert!(matches!(
            enumerate_frequencies(&ring("gf(27)"), 6, &Budget::new(1000)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn orthogonality() {
        for (s, d) in [("zmod(6)", 2), ("gf(4)", 2), ("gf(9)", 2), ("mat(2,gf(2))", 2), ("prod(gf(2),zmod(4))", 2)] {
            let r = ring(s);
            let dual = Dual::new(&r, d).unwrap();
            let n = dual.frequency_count() as u64;
            for fi in 1..n {
                let f = dual.frequency_at(fi);
                let mut sum = Complex64::new(0.0, 0.0);
                for p in 0..n {
                    sum += dual.character_value(&f, &dual.point_elements(p)).unwrap();
                }
                assert!(sum.norm() <= 1e-9 * n as f64, "{s}: frequency {f} sums to {sum}");
            }
        }
    }

    #[test]
    fn multiplicativity_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in ["zmod(12)", "gf(27)", "mat(2,gf(3))", "prod(gf(4),zmod(9))", "mat(2,zmod(4))"] {
            let r = ring(s);
            let dual = Dual::new(&r, 3).unwrap();
            let n = r.size();
            for _ in 0..2000 {
                let f = dual.frequency_at(rng.gen_range(0..dual.frequency_count() as u64));
                let x: Vec<usize> = (0..3).map(|_| rng.gen_range(0..n)).collect();
                let y: Vec<usize> = (0..3).map(|_| rng.gen_range(0..n)).collect();
                let xy: Vec<usize> = x.iter().zip(&y).map(|(&a, &b)| r.add(a, b)).collect();
                let lhs = dual.character_value(&f, &xy).unwrap();
                let rhs = dual.character_value(&f, &x).unwrap() * dual.character_value(&f, &y).unwrap();
                assert!(close(lhs, rhs, 1e-12));
                assert!((lhs.norm() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn separation() {
        for (s, d) in [("zmod(4)", 2), ("gf(8)", 2), ("mat(2,gf(2))", 2), ("prod(gf(3),gf(3))", 2)] {
            let r = ring(s);
            let dual = Dual::new(&r, d).unwrap();
            let n = dual.frequency_count() as u64;
            // distinct points differ on some character iff the nonzero difference does
            for p in 1..n {
                let x = dual.point_elements(p);
                assert!((0..n).any(|fi| dual.phase(&dual.frequency_at(fi), &x).unwrap() != 0));
            }
        }
    }

    #[test]
    fn table_matches_digits() {
        let r = ring("prod(gf(4),zmod(6))");
        let dual = Dual::new(&r, 1).unwrap();
        for rank in 0..r.size() {
            let block = dual.block_digits(rank);
            for a in 0..r.size() {
                assert_eq!(dual.block_phase(rank, a), dual.block_phase_digits(&block, a));
            }
        }
    }

    /// Frobenius-sum trace `y + y^p + ... + y^{p^{k-1}}`, which lands in the prime field.
    fn frobenius_trace(r: &Ring, y: usize, p: u64) -> u64 {
        let mut acc = r.zero();
        let mut cur = y;
        for _ in 0..r.factors().len() {
            acc = r.add(acc, cur);
            cur = r.pow(cur, p);
        }
        let c = r.coords(acc);
        assert!(c[1..].iter().all(|&x| x == 0), "trace left the prime field");
        c[0]
    }

    #[test]
    fn trace_frequency_on_fields() {
        for (s, p) in [("gf(9)", 3u64), ("gf(4)", 2), ("gf(8)", 2), ("gf(25)", 5), ("gf(27)", 3)] {
            let r = ring(s);
            let dual = Dual::new(&r, 1).unwrap();
            let l = dual.exponent();
            assert_eq!(l, p);
            for b in 0..r.size() {
                let f = dual.trace_frequency(&[b]).unwrap();
                for x in 0..r.size() {
                    let expected = frobenius_trace(&r, r.mul(b, x), p);
                    assert_eq!(dual.phase(&f, &[x]).unwrap(), expected, "{s}: b={b} x={x}");
                }
            }
            assert!(trace_pairing_is_injective(&r).unwrap());
        }
    }

    #[test]
    fn trace_frequency_examples() {
        let r = ring("zmod(6)");
        assert!(trace_frequency(&r, &[0, 0]).unwrap().is_trivial());
        assert_eq!(trace_frequency(&r, &[1]).unwrap().blocks(), &[vec![1]]);

        let m = ring("mat(2,gf(3))");
        let e11 = m.matrix_unit(0, 0).unwrap();
        let dual = Dual::new(&m, 1).unwrap();
        let f = dual.trace_frequency(&[e11]).unwrap();
        for c in 0..m.size() {
            let c11 = m.matrix_entries(c).unwrap()[0] as u64;
            assert_eq!(dual.phase(&f, &[c]).unwrap(), c11);
        }
    }

    #[test]
    fn trace_pairing_injective_on_admissible_rings() {
        for s in ["zmod(12)", "mat(2,gf(2))", "mat(2,gf(3))", "prod(gf(2),zmod(9))", "mat(2,zmod(4))", "gf(16)"] {
            assert!(trace_pairing_is_injective(&ring(s)).unwrap(), "{s}");
        }
    }

    #[test]
    fn table_rings_are_not_trace_admissible() {
        let r = crate::ring::upper_triangular(2, &ring("gf(2)")).unwrap();
        assert!(matches!(trace_frequency(&r, &[1]), Err(Error::NotTraceAdmissible(_))));
    }

    #[test]
    fn roots_are_exact_at_quarters() {
        let r = roots_of_unity(4);
        assert_eq!(r[0], Complex64::new(1.0, 0.0));
        assert!(close(r[2], Complex64::new(-1.0, 0.0), 1e-15));
    }
}
