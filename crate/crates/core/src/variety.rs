//! Graphs `x_d = f(x_1..x_{d-1}) + c` and hyperbolas `x_1 x_2 ... x_d = j`
//! as sorted sets of point indices.

use std::fmt;
use std::io::Write;

use serde::{Serialize, Serializer};

use crate::budget::{pow_sat, Budget};
use crate::error::{Error, Result};
use crate::poly::NcPolynomial;
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub enum VarietySpec {
    /// `{x : x_d = f(x_1..x_{d-1}) + c·1}`
    Graph { f: NcPolynomial, c: i64 },
    /// `{x : x_1 x_2 ... x_d = j·1}`; `j·1` must be a unit.
    Hamming { j: i64 },
    /// Arbitrary point indices.
    Explicit(Vec<u64>),
}

impl VarietySpec {
    pub fn graph(f: NcPolynomial, c: i64) -> Self {
        VarietySpec::Graph { f, c }
    }

    pub fn paraboloid(d: usize, c: i64) -> Result<Self> {
        Ok(VarietySpec::Graph {
            f: NcPolynomial::paraboloid(d)?,
            c,
        })
    }
}

impl fmt::Display for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarietySpec::Graph { f: p, c } => write!(f, "graph({p}; c={c})"),
            VarietySpec::Hamming { j } => write!(f, "hamming(j={j})"),
            VarietySpec::Explicit(pts) => write!(f, "explicit({} points)", pts.len()),
        }
    }
}

impl Serialize for VarietySpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Sorted, deduplicated point indices in `R^d`.
/// A point's index is `sum x_i |R|^i` over its element indices.
#[derive(Clone, Debug)]
pub struct PointSet {
    ring: Ring,
    d: usize,
    points: Vec<u64>,
}

impl PointSet {
    pub fn new(ring: &Ring, d: usize, mut points: Vec<u64>) -> Result<Self> {
        let total = pow_sat(ring.size() as u64, d);
        if total > u64::MAX as u128 {
            return Err(Error::Precondition(format!("|R|^d overflows for {ring}, d = {d}")));
        }
        if let Some(&p) = points.iter().find(|&&p| p as u128 >= total) {
            return Err(Error::CoordinateOutOfRange(format!("point index {p} not below {total}")));
        }
        points.sort_unstable();
        points.dedup();
        Ok(PointSet {
            ring: ring.clone(),
            d,
            points,
        })
    }

    pub fn empty(ring: &Ring, d: usize) -> Self {
        PointSet {
            ring: ring.clone(),
            d,
            points: Vec::new(),
        }
    }

    /// All of `R^d`.
    pub fn full(ring: &Ring, d: usize, budget: &Budget) -> Result<Self> {
        let total = pow_sat(ring.size() as u64, d);
        budget.check("point enumeration", total)?;
        Ok(PointSet {
            ring: ring.clone(),
            d,
            points: (0..total as u64).collect(),
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn indices(&self) -> &[u64] {
        &self.points
    }

    pub fn contains(&self, index: u64) -> bool {
        self.points.binary_search(&index).is_ok()
    }

    pub fn elements(&self, index: u64) -> Vec<usize> {
        split_point(index, self.ring.size(), self.d)
    }

    pub fn join(&self, elems: &[usize]) -> u64 {
        join_point(elems, self.ring.size())
    }

    /// Element indices of every point, flattened (`d` per point).
    pub fn flat_elements(&self) -> Vec<u32> {
        let n = self.ring.size();
        let mut out = Vec::with_capacity(self.points.len() * self.d);
        for &p in &self.points {
            let mut p = p;
            for _ in 0..self.d {
                out.push((p % n as u64) as u32);
                p /= n as u64;
            }
        }
        out
    }

    /// CSV: a comment line naming ring, d and variety, then one row per point.
    pub fn write_csv<W: Write>(&self, variety: &VarietySpec, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "# ring={} d={} variety={}", self.ring, self.d, variety).map_err(io_err)?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["point_index".to_string()];
        header.extend((1..=self.d).map(|i| format!("x{i}")));
        w.write_record(&header).map_err(csv_err)?;
        for &p in &self.points {
            let mut row = vec![p.to_string()];
            row.extend(self.elements(p).iter().map(usize::to_string));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(io_err)?;
        Ok(())
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Precondition(format!("write failed: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Precondition(format!("csv write failed: {e}"))
}

pub(crate) fn split_point(mut index: u64, n: usize, d: usize) -> Vec<usize> {
    (0..d)
        .map(|_| {
            let x = (index % n as u64) as usize;
            index /= n as u64;
            x
        })
        .collect()
}

pub(crate) fn join_point(elems: &[usize], n: usize) -> u64 {
    elems.iter().rev().fold(0u64, |acc, &x| acc * n as u64 + x as u64)
}

/// Steps `x` through `alphabet^k` in little-endian odometer order; false when exhausted.
pub(crate) fn odometer_step(x: &mut [usize], alphabet: usize) -> bool {
    for slot in x.iter_mut() {
        *slot += 1;
        if *slot < alphabet {
            return true;
        }
        *slot = 0;
    }
    false
}

pub fn variety_points(spec: &VarietySpec, ring: &Ring, d: usize, budget: &Budget) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::Precondition("dimension d must be at least 1".into()));
    }
    let n = ring.size();
    if pow_sat(n as u64, d) > u64::MAX as u128 {
        return Err(Error::Precondition(format!("|R|^d overflows for {ring}, d = {d}")));
    }
    let top = pow_sat(n as u64, d - 1) as u64;
    match spec {
        VarietySpec::Graph { f, c } => {
            f.check_dimension(d)?;
            budget.check("graph enumeration", pow_sat(n as u64, d - 1))?;
            let shift = ring.integer_image(*c);
            let mut x = vec![0usize; d - 1];
            let mut points = Vec::with_capacity(top as usize);
            let mut base = 0u64;
            loop {
                let y = ring.add(f.evaluate_unchecked(ring, &x), shift);
                points.push(base + y as u64 * top);
                if !odometer_step(&mut x, n) {
                    break;
                }
                base += 1;
            }
            PointSet::new(ring, d, points)
        }
        VarietySpec::Hamming { j } => {
            let target = ring.integer_image(*j);
            if !ring.is_unit(target) {
                return Err(Error::InvalidVariety(format!("{j}·1 is not a unit of {ring}")));
            }
            let units = ring.units();
            budget.check("hyperbola enumeration", pow_sat(units.len() as u64, d - 1))?;
            let mut pick = vec![0usize; d - 1];
            let mut points = Vec::new();
            loop {
                let xs: Vec<usize> = pick.iter().map(|&i| units[i]).collect();
                let prod = xs.iter().fold(ring.one(), |acc, &u| ring.mul(acc, u));
                let last = ring.mul(ring.inverse(prod).expect("product of units"), target);
                points.push(join_point(&xs, n) + last as u64 * top);
                if !odometer_step(&mut pick, units.len()) {
                    break;
                }
            }
            PointSet::new(ring, d, points)
        }
        VarietySpec::Explicit(pts) => PointSet::new(ring, d, pts.clone()),
    }
}
