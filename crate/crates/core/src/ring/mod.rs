//! Finite unital rings with a canonical bijection between elements and `0..|R|`.
//!
//! Elements are plain `usize` indices. For every constructor except explicit tables
//! the index is the little-endian mixed-radix number formed by the element's
//! additive coordinates:
//!
//! * `zmod(n)`: the residue itself, one coordinate of order `n`;
//! * `gf(p^k)`: polynomial coefficients `c_0 .. c_{k-1}`, so `index = sum c_i p^i`;
//! * `mat(n, B)`: entries in row-major order, `index = sum entry_pos * |B|^pos`;
//! * `prod(R_1, ..., R_m)`: `index = i_1 + |R_1| * (i_2 + |R_2| * (...))`.
//!
//! Table rings keep the labels they were built with and carry a computed cyclic
//! decomposition of their additive group instead.

mod abelian;
mod construct;
pub mod galois;
mod spec;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use smallvec::SmallVec;

use crate::arith::{gcd, lcm, mod_inverse};
use crate::error::{Error, Result};

pub use construct::{quotient_ring, upper_triangular, Quotient};
pub use spec::{RingSpec, TableSpec, MAX_RING_SIZE};

/// Rings up to this size get materialized addition and multiplication tables.
pub const TABLE_LIMIT: usize = 4096;

/// Table rings up to this size have their axioms checked exhaustively.
pub const AXIOM_CHECK_LIMIT: usize = 256;

type Entries = SmallVec<[usize; 16]>;

/// Shared handle to an immutable finite ring.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

struct RingData {
    spec: RingSpec,
    size: usize,
    kind: Kind,
    factors: Vec<u64>,
    exponent: u64,
    zero: usize,
    one: usize,
    characteristic: u64,
    plain_coords: bool,
    tables: OnceLock<Tables>,
    inverses: OnceLock<Vec<u32>>,
}

enum Kind {
    Zmod {
        n: u64,
    },
    Galois {
        p: u64,
        k: usize,
        modulus: Vec<u64>,
        trace: Vec<u64>,
    },
    Matrix {
        n: usize,
        base: Ring,
    },
    Product {
        parts: Vec<Ring>,
        strides: Vec<usize>,
    },
    Table(TableData),
}

struct TableData {
    add: Arc<Vec<u32>>,
    mul: Arc<Vec<u32>>,
    neg: Vec<u32>,
    coords: Vec<u64>,
    elem_to_rank: Vec<u32>,
    rank_to_elem: Vec<u32>,
}

struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
}

const NO_INVERSE: u32 = u32::MAX;

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({})", self.0.spec)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.spec)
    }
}

/// JSON summary of a ring.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RingSummary {
    pub spec: String,
    pub size: usize,
    pub characteristic: u64,
    pub additive_factors: Vec<u64>,
    pub unit_count: usize,
}

impl Ring {
    pub fn parse(text: &str) -> Result<Ring> {
        Ring::new(&RingSpec::parse(text)?)
    }

    pub fn new(spec: &RingSpec) -> Result<Ring> {
        spec.validate()?;
        match spec {
            RingSpec::Zmod(n) => Ok(Ring::finish(
                spec.clone(),
                *n as usize,
                Kind::Zmod { n: *n },
                vec![*n],
                0,
                1,
                true,
            )),
            RingSpec::Galois { p, k } => {
                let modulus = galois::smallest_irreducible(*p, *k);
                let k = *k as usize;
                let trace = galois_trace_vector(*p, &modulus);
                let size = p.pow(k as u32) as usize;
                Ok(Ring::finish(
                    spec.clone(),
                    size,
                    Kind::Galois {
                        p: *p,
                        k,
                        modulus,
                        trace,
                    },
                    vec![*p; k],
                    0,
                    1,
                    true,
                ))
            }
            RingSpec::Matrix { n, base } => {
                let base = Ring::new(base)?;
                let bs = base.size();
                let size = bs.pow((n * n) as u32);
                let mut one = 0usize;
                let mut w = 1usize;
                for pos in 0..n * n {
                    if pos / n == pos % n {
                        one += base.one() * w;
                    }
                    w *= bs;
                }
                let factors = (0..n * n).flat_map(|_| base.factors().iter().copied()).collect();
                let plain = base.0.plain_coords;
                Ok(Ring::finish(
                    spec.clone(),
                    size,
                    Kind::Matrix { n: *n, base },
                    factors,
                    0,
                    one,
                    plain,
                ))
            }
            RingSpec::Product(specs) => {
                let parts = specs.iter().map(Ring::new).collect::<Result<Vec<_>>>()?;
                let mut strides = Vec::with_capacity(parts.len());
                let mut w = 1usize;
                let mut one = 0usize;
                for part in &parts {
                    strides.push(w);
                    one += part.one() * w;
                    w *= part.size();
                }
                let factors = parts.iter().flat_map(|p| p.factors().iter().copied()).collect();
                let plain = parts.iter().all(|p| p.0.plain_coords);
                Ok(Ring::finish(
                    spec.clone(),
                    w,
                    Kind::Product { parts, strides },
                    factors,
                    0,
                    one,
                    plain,
                ))
            }
            RingSpec::Table(t) => Ring::from_table(t),
        }
    }

    /// Builds a ring from explicit Cayley tables, checking the axioms exhaustively
    /// when `size <= AXIOM_CHECK_LIMIT`.
    pub fn from_tables(label: &str, add: Vec<u32>, mul: Vec<u32>, zero: usize, one: usize) -> Result<Ring> {
        let size = (add.len() as f64).sqrt().round() as usize;
        Ring::from_table(&TableSpec {
            label: label.to_string(),
            size,
            add: Arc::new(add),
            mul: Arc::new(mul),
            zero,
            one,
        })
    }

    fn from_table(t: &TableSpec) -> Result<Ring> {
        let n = t.size;
        if n < 2 {
            return Err(Error::InvalidRing("a ring needs 1 != 0, so at least two elements".into()));
        }
        if t.add.len() != n * n || t.mul.len() != n * n {
            return Err(Error::InvalidRing("tables must be size*size".into()));
        }
        if t.zero >= n || t.one >= n || t.zero == t.one {
            return Err(Error::InvalidRing("zero and one must be distinct elements".into()));
        }
        if t.add.iter().chain(t.mul.iter()).any(|&v| v as usize >= n) {
            return Err(Error::InvalidRing("table entry out of range".into()));
        }
        let add = |a: usize, b: usize| t.add[a * n + b] as usize;
        let mul = |a: usize, b: usize| t.mul[a * n + b] as usize;
        for a in 0..n {
            if add(t.zero, a) != a || add(a, t.zero) != a {
                return Err(Error::AxiomViolation("zero is not an additive identity".into()));
            }
            if mul(t.one, a) != a || mul(a, t.one) != a {
                return Err(Error::AxiomViolation("one is not a multiplicative identity".into()));
            }
        }
        let mut neg = vec![0u32; n];
        for (a, slot) in neg.iter_mut().enumerate() {
            let b = (0..n)
                .find(|&b| add(a, b) == t.zero)
                .ok_or_else(|| Error::AxiomViolation(format!("element {a} has no additive inverse")))?;
            *slot = b as u32;
        }
        if n <= AXIOM_CHECK_LIMIT {
            check_table_axioms(n, &add, &mul)?;
        }
        let dec = abelian::decompose(n, t.zero, add)?;
        let m = dec.factors.len();
        let mut coords = Vec::with_capacity(n * m);
        let mut elem_to_rank = vec![0u32; n];
        let mut rank_to_elem = vec![0u32; n];
        for (e, c) in dec.coords.iter().enumerate() {
            coords.extend_from_slice(c);
            let mut r = 0u64;
            let mut w = 1u64;
            for (x, f) in c.iter().zip(&dec.factors) {
                r += x * w;
                w *= f;
            }
            elem_to_rank[e] = r as u32;
            rank_to_elem[r as usize] = e as u32;
        }
        let data = TableData {
            add: t.add.clone(),
            mul: t.mul.clone(),
            neg,
            coords,
            elem_to_rank,
            rank_to_elem,
        };
        Ok(Ring::finish(
            RingSpec::Table(t.clone()),
            n,
            Kind::Table(data),
            dec.factors,
            t.zero,
            t.one,
            false,
        ))
    }

    fn finish(
        spec: RingSpec,
        size: usize,
        kind: Kind,
        factors: Vec<u64>,
        zero: usize,
        one: usize,
        plain_coords: bool,
    ) -> Ring {
        let exponent = factors.iter().fold(1, |acc, &f| lcm(acc, f));
        let mut ring = RingData {
            spec,
            size,
            kind,
            factors,
            exponent,
            zero,
            one,
            characteristic: 0,
            plain_coords,
            tables: OnceLock::new(),
            inverses: OnceLock::new(),
        };
        let ring_ref = Ring(Arc::new(ring));
        let coords_one = ring_ref.coords(one);
        let characteristic = coords_one
            .iter()
            .zip(ring_ref.factors())
            .fold(1, |acc, (&c, &f)| lcm(acc, f / gcd(c, f)));
        ring = Arc::try_unwrap(ring_ref.0).ok().expect("fresh ring is uniquely owned");
        ring.characteristic = characteristic;
        Ring(Arc::new(ring))
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0.spec
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn zero(&self) -> usize {
        self.0.zero
    }

    pub fn one(&self) -> usize {
        self.0.one
    }

    pub fn characteristic(&self) -> u64 {
        self.0.characteristic
    }

    /// Cyclic orders `d_1..d_m` of the additive factorization.
    pub fn factors(&self) -> &[u64] {
        &self.0.factors
    }

    /// Least common multiple of the additive factors (the exponent of `(R, +)`).
    pub fn exponent(&self) -> u64 {
        self.0.exponent
    }

    pub fn same_ring(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn element(&self, index: usize) -> Result<Element> {
        if index >= self.size() {
            return Err(Error::CoordinateOutOfRange(format!("index {index} in {}", self)));
        }
        Ok(Element {
            ring: self.clone(),
            index,
        })
    }

    pub fn is_table(&self) -> bool {
        matches!(self.0.kind, Kind::Table(_))
    }

    /// Base ring and dimension when this is a matrix ring.
    pub fn matrix_parts(&self) -> Option<(usize, &Ring)> {
        match &self.0.kind {
            Kind::Matrix { n, base } => Some((*n, base)),
            _ => None,
        }
    }

    pub fn product_parts(&self) -> Option<&[Ring]> {
        match &self.0.kind {
            Kind::Product { parts, .. } => Some(parts),
            _ => None,
        }
    }

    fn tables(&self) -> Option<&Tables> {
        if self.0.size > TABLE_LIMIT {
            return None;
        }
        Some(self.0.tables.get_or_init(|| {
            let n = self.0.size;
            let mut add = Vec::with_capacity(n * n);
            let mut mul = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    add.push(self.add_raw(a, b) as u16);
                    mul.push(self.mul_raw(a, b) as u16);
                }
            }
            let neg = (0..n).map(|a| self.neg_raw(a) as u16).collect();
            Tables { add, mul, neg }
        }))
    }

    /// Forces table materialization (no-op above `TABLE_LIMIT`).
    pub fn materialize(&self) {
        let _ = self.tables();
    }

    // ---- arithmetic on indices ----

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        match self.tables() {
            Some(t) => t.add[a * self.0.size + b] as usize,
            None => self.add_raw(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        match self.tables() {
            Some(t) => t.neg[a] as usize,
            None => self.neg_raw(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match self.tables() {
            Some(t) => t.mul[a * self.0.size + b] as usize,
            None => self.mul_raw(a, b),
        }
    }

    /// `k * a` for an integer `k` (repeated addition, possibly negated).
    pub fn scale(&self, a: usize, k: i64) -> usize {
        let mut coords = self.coords(a);
        for (c, &f) in coords.iter_mut().zip(self.factors()) {
            let kk = (k as i128).rem_euclid(f as i128) as u64;
            *c = ((*c as u128 * kk as u128) % f as u128) as u64;
        }
        self.from_coords(&coords).expect("scaled coordinates are in range")
    }

    /// Image of `k` under the unital map `Z -> R`.
    pub fn integer_image(&self, k: i64) -> usize {
        self.scale(self.one(), k)
    }

    fn add_raw(&self, a: usize, b: usize) -> usize {
        match &self.0.kind {
            Kind::Zmod { n } => ((a as u64 + b as u64) % n) as usize,
            Kind::Galois { p, k, .. } => {
                let p = *p as usize;
                let (mut a, mut b) = (a, b);
                let mut out = 0;
                let mut w = 1;
                for _ in 0..*k {
                    out += (a % p + b % p) % p * w;
                    a /= p;
                    b /= p;
                    w *= p;
                }
                out
            }
            Kind::Matrix { n, base } => {
                let ea = self.entries(a, *n, base);
                let eb = self.entries(b, *n, base);
                let sum: Entries = ea.iter().zip(&eb).map(|(&x, &y)| base.add(x, y)).collect();
                encode(&sum, base.size())
            }
            Kind::Product { parts, strides } => {
                let mut out = 0;
                for (part, &s) in parts.iter().zip(strides) {
                    let (x, y) = ((a / s) % part.size(), (b / s) % part.size());
                    out += part.add(x, y) * s;
                }
                out
            }
            Kind::Table(t) => t.add[a * self.0.size + b] as usize,
        }
    }

    fn neg_raw(&self, a: usize) -> usize {
        match &self.0.kind {
            Kind::Zmod { n } => ((n - a as u64) % n) as usize,
            Kind::Galois { p, k, .. } => {
                let p = *p as usize;
                let mut a = a;
                let mut out = 0;
                let mut w = 1;
                for _ in 0..*k {
                    out += (p - a % p) % p * w;
                    a /= p;
                    w *= p;
                }
                out
            }
            Kind::Matrix { n, base } => {
                let e: Entries = self.entries(a, *n, base).iter().map(|&x| base.neg(x)).collect();
                encode(&e, base.size())
            }
            Kind::Product { parts, strides } => parts
                .iter()
                .zip(strides)
                .map(|(part, &s)| part.neg((a / s) % part.size()) * s)
                .sum(),
            Kind::Table(t) => t.neg[a] as usize,
        }
    }

    fn mul_raw(&self, a: usize, b: usize) -> usize {
        match &self.0.kind {
            Kind::Zmod { n } => ((a as u128 * b as u128) % *n as u128) as usize,
            Kind::Galois { p, k, modulus, .. } => {
                let da = digits(a, *p, *k);
                let db = digits(b, *p, *k);
                let mut out: SmallVec<[u64; 16]> = SmallVec::from_elem(0, *k);
                galois::mul_mod(&da, &db, modulus, *p, &mut out);
                undigits(&out, *p)
            }
            Kind::Matrix { n, base } => {
                let n = *n;
                let ea = self.entries(a, n, base);
                let eb = self.entries(b, n, base);
                let zero = base.zero();
                let mut out: Entries = SmallVec::from_elem(zero, n * n);
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = zero;
                        for l in 0..n {
                            acc = base.add(acc, base.mul(ea[i * n + l], eb[l * n + j]));
                        }
                        out[i * n + j] = acc;
                    }
                }
                encode(&out, base.size())
            }
            Kind::Product { parts, strides } => {
                let mut out = 0;
                for (part, &s) in parts.iter().zip(strides) {
                    let (x, y) = ((a / s) % part.size(), (b / s) % part.size());
                    out += part.mul(x, y) * s;
                }
                out
            }
            Kind::Table(t) => t.mul[a * self.0.size + b] as usize,
        }
    }

    fn entries(&self, a: usize, n: usize, base: &Ring) -> Entries {
        let bs = base.size();
        let mut a = a;
        (0..n * n)
            .map(|_| {
                let e = a % bs;
                a /= bs;
                e
            })
            .collect()
    }

    /// Row-major entries of a matrix-ring element.
    pub fn matrix_entries(&self, a: usize) -> Option<Vec<usize>> {
        let (n, base) = self.matrix_parts()?;
        Some(self.entries(a, n, base).to_vec())
    }

    pub fn matrix_from_entries(&self, entries: &[usize]) -> Option<usize> {
        let (n, base) = self.matrix_parts()?;
        (entries.len() == n * n && entries.iter().all(|&e| e < base.size())).then(|| encode(entries, base.size()))
    }

    /// The matrix unit with the base ring's one at `(row, col)` (0-based).
    pub fn matrix_unit(&self, row: usize, col: usize) -> Option<usize> {
        let (n, base) = self.matrix_parts()?;
        if row >= n || col >= n {
            return None;
        }
        let mut e = vec![base.zero(); n * n];
        e[row * n + col] = base.one();
        Some(encode(&e, base.size()))
    }

    pub fn product_components(&self, a: usize) -> Option<Vec<usize>> {
        match &self.0.kind {
            Kind::Product { parts, strides } => {
                Some(parts.iter().zip(strides).map(|(p, &s)| (a / s) % p.size()).collect())
            }
            _ => None,
        }
    }

    pub fn product_from_components(&self, comps: &[usize]) -> Option<usize> {
        match &self.0.kind {
            Kind::Product { parts, strides } if comps.len() == parts.len() => {
                let ok = comps.iter().zip(parts).all(|(&c, p)| c < p.size());
                ok.then(|| comps.iter().zip(strides).map(|(&c, &s)| c * s).sum())
            }
            _ => None,
        }
    }

    // ---- additive coordinates ----

    /// Coordinates of `a` along the additive factorization.
    pub fn coords(&self, a: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.0.factors.len()];
        self.coords_into(a, &mut out);
        out
    }

    pub fn coords_into(&self, a: usize, out: &mut [u64]) {
        if self.0.plain_coords {
            let mut a = a as u64;
            for (slot, &f) in out.iter_mut().zip(&self.0.factors) {
                *slot = a % f;
                a /= f;
            }
            return;
        }
        match &self.0.kind {
            Kind::Matrix { n, base } => {
                let m = base.factors().len();
                for (pos, e) in self.entries(a, *n, base).into_iter().enumerate() {
                    base.coords_into(e, &mut out[pos * m..(pos + 1) * m]);
                }
            }
            Kind::Product { parts, strides } => {
                let mut off = 0;
                for (part, &s) in parts.iter().zip(strides) {
                    let m = part.factors().len();
                    part.coords_into((a / s) % part.size(), &mut out[off..off + m]);
                    off += m;
                }
            }
            Kind::Table(t) => {
                let m = self.0.factors.len();
                out.copy_from_slice(&t.coords[a * m..(a + 1) * m]);
            }
            Kind::Zmod { .. } | Kind::Galois { .. } => unreachable!("plain coordinates"),
        }
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<usize> {
        let m = self.0.factors.len();
        if coords.len() != m {
            return Err(Error::CoordinateOutOfRange(format!(
                "expected {m} coordinates, got {}",
                coords.len()
            )));
        }
        if let Some((j, (&c, &f))) = coords.iter().zip(&self.0.factors).enumerate().find(|(_, (&c, &f))| c >= f) {
            return Err(Error::CoordinateOutOfRange(format!("coordinate {j} = {c} not below {f}")));
        }
        Ok(self.from_coords_unchecked(coords))
    }

    fn from_coords_unchecked(&self, coords: &[u64]) -> usize {
        if self.0.plain_coords {
            return mixed_radix(coords, &self.0.factors);
        }
        match &self.0.kind {
            Kind::Matrix { n, base } => {
                let m = base.factors().len();
                let e: Entries = (0..n * n)
                    .map(|pos| base.from_coords_unchecked(&coords[pos * m..(pos + 1) * m]))
                    .collect();
                encode(&e, base.size())
            }
            Kind::Product { parts, strides } => {
                let mut off = 0;
                let mut out = 0;
                for (part, &s) in parts.iter().zip(strides) {
                    let m = part.factors().len();
                    out += part.from_coords_unchecked(&coords[off..off + m]) * s;
                    off += m;
                }
                out
            }
            Kind::Table(t) => t.rank_to_elem[mixed_radix(coords, &self.0.factors)] as usize,
            Kind::Zmod { .. } | Kind::Galois { .. } => unreachable!("plain coordinates"),
        }
    }

    /// Mixed-radix number of the coordinates of `a` (identity unless tables are involved).
    #[inline]
    pub fn rank(&self, a: usize) -> usize {
        if self.0.plain_coords {
            return a;
        }
        if let Kind::Table(t) = &self.0.kind {
            return t.elem_to_rank[a] as usize;
        }
        mixed_radix(&self.coords(a), &self.0.factors)
    }

    pub fn from_rank(&self, r: usize) -> usize {
        if self.0.plain_coords {
            return r;
        }
        if let Kind::Table(t) = &self.0.kind {
            return t.rank_to_elem[r] as usize;
        }
        let mut r = r as u64;
        let coords: Vec<u64> = self
            .0
            .factors
            .iter()
            .map(|&f| {
                let c = r % f;
                r /= f;
                c
            })
            .collect();
        self.from_coords_unchecked(&coords)
    }

    // ---- units ----

    /// Two-sided inverse of `a`, if `a` is a unit.
    pub fn inverse(&self, a: usize) -> Option<usize> {
        if self.0.size <= TABLE_LIMIT {
            let inv = self.inverse_table()[a];
            return (inv != NO_INVERSE).then_some(inv as usize);
        }
        match &self.0.kind {
            Kind::Zmod { n } => mod_inverse(a as u64, *n).map(|v| v as usize),
            Kind::Galois { p, k, .. } => {
                if a == 0 {
                    return None;
                }
                let q = p.pow(*k as u32);
                Some(self.pow(a, q - 2))
            }
            Kind::Product { parts, strides } => {
                let mut out = 0;
                for (part, &s) in parts.iter().zip(strides) {
                    out += part.inverse((a / s) % part.size())? * s;
                }
                Some(out)
            }
            Kind::Matrix { n, base } if base.is_field() => self.matrix_inverse(a, *n, base),
            _ => self.inverse_search(a),
        }
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.inverse(a).is_some()
    }

    pub fn units(&self) -> Vec<usize> {
        (0..self.size()).filter(|&a| self.is_unit(a)).collect()
    }

    pub fn unit_count(&self) -> usize {
        if self.0.size <= TABLE_LIMIT {
            return self.inverse_table().iter().filter(|&&v| v != NO_INVERSE).count();
        }
        match &self.0.kind {
            Kind::Galois { .. } => self.size() - 1,
            Kind::Product { parts, .. } => parts.iter().map(Ring::unit_count).product(),
            Kind::Matrix { n, base } if base.is_field() => {
                let q = base.size() as u128;
                let qn = q.pow(*n as u32);
                let mut count: u128 = 1;
                for i in 0..*n as u32 {
                    count *= qn - q.pow(i);
                }
                count as usize
            }
            _ => (0..self.size()).filter(|&a| self.is_unit(a)).count(),
        }
    }

    /// Every nonzero element is a unit (a finite division ring, hence a field).
    pub fn is_field(&self) -> bool {
        match &self.0.kind {
            Kind::Zmod { n } => crate::arith::is_prime(*n),
            Kind::Galois { .. } => true,
            Kind::Product { .. } => false,
            Kind::Matrix { n, base } => *n == 1 && base.is_field(),
            Kind::Table(_) => self.unit_count() == self.size() - 1,
        }
    }

    pub fn is_commutative(&self) -> bool {
        if self.0.size <= TABLE_LIMIT {
            let n = self.size();
            return (0..n).all(|a| (a + 1..n).all(|b| self.mul(a, b) == self.mul(b, a)));
        }
        match &self.0.kind {
            Kind::Zmod { .. } | Kind::Galois { .. } => true,
            Kind::Product { parts, .. } => parts.iter().all(Ring::is_commutative),
            Kind::Matrix { n, base } => *n == 1 && base.is_commutative(),
            Kind::Table(_) => unreachable!("tables are below the table limit"),
        }
    }

    pub fn pow(&self, a: usize, mut e: u64) -> usize {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn inverse_table(&self) -> &[u32] {
        self.0.inverses.get_or_init(|| {
            let n = self.size();
            let one = self.one();
            let mut inv = vec![NO_INVERSE; n];
            for a in 0..n {
                if inv[a] != NO_INVERSE {
                    continue;
                }
                if let Some(b) = (0..n).find(|&b| self.mul(a, b) == one) {
                    // one-sided inverses are two-sided in a finite ring
                    assert_eq!(self.mul(b, a), one, "{}: right inverse of {a} is not a left inverse", self);
                    inv[a] = b as u32;
                    inv[b] = a as u32;
                }
            }
            inv
        })
    }

    fn inverse_search(&self, a: usize) -> Option<usize> {
        let one = self.one();
        let b = (0..self.size()).find(|&b| self.mul(a, b) == one)?;
        assert_eq!(self.mul(b, a), one);
        Some(b)
    }

    fn matrix_inverse(&self, a: usize, n: usize, base: &Ring) -> Option<usize> {
        // Gauss-Jordan on [A | I] over the base field
        let ea = self.entries(a, n, base);
        let (zero, one) = (base.zero(), base.one());
        let w = 2 * n;
        let mut m = vec![zero; n * w];
        for i in 0..n {
            for j in 0..n {
                m[i * w + j] = ea[i * n + j];
            }
            m[i * w + n + i] = one;
        }
        for col in 0..n {
            let piv = (col..n).find(|&r| m[r * w + col] != zero)?;
            if piv != col {
                for j in 0..w {
                    m.swap(piv * w + j, col * w + j);
                }
            }
            let inv = base.inverse(m[col * w + col])?;
            for j in 0..w {
                m[col * w + j] = base.mul(inv, m[col * w + j]);
            }
            for r in 0..n {
                if r == col || m[r * w + col] == zero {
                    continue;
                }
                let factor = m[r * w + col];
                for j in 0..w {
                    let t = base.mul(factor, m[col * w + j]);
                    m[r * w + j] = base.sub(m[r * w + j], t);
                }
            }
        }
        let out: Vec<usize> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m[i * w + n + j]).collect();
        Some(encode(&out, base.size()))
    }

    // ---- trace pairing ----

    /// Coordinates of the generating character `x -> exp(2 pi i <gamma, x>)`:
    /// `x/n` on `Z/n`, `Tr(x)/p` on `GF(p^k)`, the base character of the matrix
    /// trace on `M_n(B)`, and componentwise on products.
    pub fn generating_character(&self) -> Result<Vec<u64>> {
        match &self.0.kind {
            Kind::Zmod { .. } => Ok(vec![1]),
            Kind::Galois { trace, .. } => Ok(trace.clone()),
            Kind::Matrix { n, base } => {
                let g = base.generating_character()?;
                let m = g.len();
                let mut out = vec![0u64; n * n * m];
                for i in 0..*n {
                    let pos = i * n + i;
                    out[pos * m..(pos + 1) * m].copy_from_slice(&g);
                }
                Ok(out)
            }
            Kind::Product { parts, .. } => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.generating_character()?);
                }
                Ok(out)
            }
            Kind::Table(_) => Err(Error::NotTraceAdmissible(self.to_string())),
        }
    }

    /// Absolute trace of a `GF(p^k)` element, as an element of the prime field.
    pub fn field_trace(&self, a: usize) -> Option<u64> {
        match &self.0.kind {
            Kind::Galois { p, trace, .. } => {
                let c = self.coords(a);
                Some(c.iter().zip(trace).map(|(x, t)| x * t).sum::<u64>() % p)
            }
            Kind::Zmod { n } if crate::arith::is_prime(*n) => Some(a as u64),
            _ => None,
        }
    }

    /// Modulus polynomial of a `GF(p^k)` ring (lowest degree first).
    pub fn field_modulus(&self) -> Option<&[u64]> {
        match &self.0.kind {
            Kind::Galois { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    pub fn summary(&self) -> RingSummary {
        RingSummary {
            spec: self.to_string(),
            size: self.size(),
            characteristic: self.characteristic(),
            additive_factors: self.factors().to_vec(),
            unit_count: self.unit_count(),
        }
    }
}

fn check_table_axioms(n: usize, add: &impl Fn(usize, usize) -> usize, mul: &impl Fn(usize, usize) -> usize) -> Result<()> {
    for a in 0..n {
        for b in 0..n {
            if add(a, b) != add(b, a) {
                return Err(Error::AxiomViolation(format!("addition not commutative at ({a},{b})")));
            }
            let (ab_sum, ab_prod) = (add(a, b), mul(a, b));
            for c in 0..n {
                if add(ab_sum, c) != add(a, add(b, c)) {
                    return Err(Error::AxiomViolation(format!("addition not associative at ({a},{b},{c})")));
                }
                if mul(ab_prod, c) != mul(a, mul(b, c)) {
                    return Err(Error::AxiomViolation(format!(
                        "multiplication not associative at ({a},{b},{c})"
                    )));
                }
                if mul(a, add(b, c)) != add(ab_prod, mul(a, c)) {
                    return Err(Error::AxiomViolation(format!("left distributivity fails at ({a},{b},{c})")));
                }
                if mul(ab_sum, c) != add(mul(a, c), mul(b, c)) {
                    return Err(Error::AxiomViolation(format!("right distributivity fails at ({a},{b},{c})")));
                }
            }
        }
    }
    Ok(())
}

/// Trace of multiplication-by-`t^j` as an F_p-linear map, for each `j < k`.
fn galois_trace_vector(p: u64, modulus: &[u64]) -> Vec<u64> {
    let k = modulus.len() - 1;
    let basis = |i: usize| -> Vec<u64> {
        let mut v = vec![0u64; k];
        v[i] = 1;
        v
    };
    (0..k)
        .map(|j| {
            let y = basis(j);
            (0..k)
                .map(|i| {
                    let mut out = vec![0u64; k];
                    galois::mul_mod(&y, &basis(i), modulus, p, &mut out);
                    out[i]
                })
                .sum::<u64>()
                % p
        })
        .collect()
}

fn digits(a: usize, p: u64, k: usize) -> SmallVec<[u64; 16]> {
    let mut a = a as u64;
    (0..k)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u64], p: u64) -> usize {
    d.iter().rev().fold(0u64, |acc, &x| acc * p + x) as usize
}

fn encode(entries: &[usize], base: usize) -> usize {
    entries.iter().rev().fold(0usize, |acc, &e| acc * base + e)
}

pub(crate) fn mixed_radix(coords: &[u64], factors: &[u64]) -> usize {
    let mut r = 0u64;
    let mut w = 1u64;
    for (&c, &f) in coords.iter().zip(factors) {
        r += c * w;
        w *= f;
    }
    r as usize
}

/// An element together with the ring that owns it.
#[derive(Clone)]
pub struct Element {
    ring: Ring,
    index: usize,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.ring, self.index)
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_ring(&other.ring) && self.index == other.index
    }
}

impl Element {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    fn same(&self, other: &Element) -> Result<()> {
        if self.ring.same_ring(&other.ring) {
            Ok(())
        } else {
            Err(Error::MixedRings)
        }
    }

    fn wrap(&self, index: usize) -> Element {
        Element {
            ring: self.ring.clone(),
            index,
        }
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.same(other)?;
        Ok(self.wrap(self.ring.add(self.index, other.index)))
    }

    pub fn try_mul(&self, other: &Element) -> Result<Element> {
        self.same(other)?;
        Ok(self.wrap(self.ring.mul(self.index, other.index)))
    }

    pub fn neg(&self) -> Element {
        self.wrap(self.ring.neg(self.index))
    }

    pub fn is_unit(&self) -> bool {
        self.ring.is_unit(self.index)
    }

    pub fn coords(&self) -> Vec<u64> {
        self.ring.coords(self.index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(s: &str) -> Ring {
        Ring::parse(s).unwrap()
    }

    #[test]
    fn zmod_arithmetic() {
        let r = ring("zmod(6)");
        assert_eq!(r.add(3, 4), 1);
        assert_eq!(r.mul(5, 5), 1);
        assert_eq!(r.integer_image(0), r.zero());
        assert_eq!(r.integer_image(-1), 5);
        assert!(r.is_unit(5));
        assert!(!r.is_unit(2));
        assert_eq!(r.units(), vec![1, 5]);
        assert_eq!(r.coords(4), vec![4]);
    }

    #[test]
    fn gf4_t_squared() {
        let r = ring("gf(4)");
        // t has coordinates (0, 1), index 2; t + 1 is (1, 1), index 3
        assert_eq!(r.field_modulus().unwrap(), &[1, 1, 1]);
        assert_eq!(r.mul(2, 2), 3);
        assert_eq!(r.coords(3), vec![1, 1]);
    }

    #[test]
    fn gf4_multiplication_matches_brute_force_reduction() {
        // oracle: multiply as integer polynomials and reduce with t^2 = t + 1 by hand
        let r = ring("gf(4)");
        for a in 0..4usize {
            for b in 0..4usize {
                let (a0, a1, b0, b1) = (a & 1, a >> 1, b & 1, b >> 1);
                let c0 = a0 * b0;
                let c1 = a0 * b1 + a1 * b0;
                let c2 = a1 * b1;
                let (r0, r1) = ((c0 + c2) % 2, (c1 + c2) % 2);
                assert_eq!(r.mul(a, b), r0 + 2 * r1);
            }
        }
    }

    #[test]
    fn unit_counts() {
        assert_eq!(ring("zmod(6)").unit_count(), 2);
        assert_eq!(ring("gf(9)").unit_count(), 8);
        assert_eq!(ring("mat(2,gf(2))").unit_count(), 6);
        assert_eq!(ring("mat(2,gf(3))").unit_count(), 48);
        let m = ring("mat(2,gf(2))");
        assert!(m.is_unit(m.one()));
    }

    #[test]
    fn large_rings_use_structural_inverses() {
        let m = ring("mat(3,gf(3))");
        assert!(m.size() > TABLE_LIMIT);
        // GL_3(F_3) = (27-1)(27-3)(27-9)
        assert_eq!(m.unit_count(), 26 * 24 * 18);
        let e11 = m.matrix_unit(0, 0).unwrap();
        assert!(!m.is_unit(e11));
        let g = m.matrix_from_entries(&[1, 1, 0, 0, 1, 2, 1, 0, 2]).unwrap();
        let inv = m.inverse(g).unwrap();
        assert_eq!(m.mul(g, inv), m.one());
        assert_eq!(m.mul(inv, g), m.one());
    }

    #[test]
    fn product_structure() {
        let r = ring("prod(gf(2),gf(3))");
        let x = r.product_from_components(&[1, 2]).unwrap();
        assert_eq!(r.coords(x), vec![1, 2]);
        assert_eq!(r.characteristic(), 6);
        assert_eq!(r.unit_count(), 2);
    }

    #[test]
    fn characteristics() {
        assert_eq!(ring("zmod(12)").characteristic(), 12);
        assert_eq!(ring("gf(27)").characteristic(), 3);
        assert_eq!(ring("mat(2,zmod(4))").characteristic(), 4);
        assert_eq!(ring("prod(zmod(4),gf(2))").characteristic(), 4);
    }

    #[test]
    fn matrix_products_are_noncommutative() {
        let m = ring("mat(2,gf(2))");
        let e12 = m.matrix_unit(0, 1).unwrap();
        let e21 = m.matrix_unit(1, 0).unwrap();
        assert_eq!(m.mul(e12, e21), m.matrix_unit(0, 0).unwrap());
        assert_eq!(m.mul(e21, e12), m.matrix_unit(1, 1).unwrap());
        assert!(!m.is_commutative());
    }

    #[test]
    fn coordinates_round_trip_and_range_check() {
        let r = ring("mat(2,gf(4))");
        for a in 0..r.size() {
            assert_eq!(r.from_coords(&r.coords(a)).unwrap(), a);
        }
        assert!(r.from_coords(&[2, 0, 0, 0, 0, 0, 0, 0]).is_err());
        assert!(r.from_coords(&[0, 0]).is_err());
    }

    #[test]
    fn mixed_ring_operands_error() {
        let a = ring("zmod(6)").element(1).unwrap();
        let b = ring("zmod(6)").element(1).unwrap();
        assert_eq!(a.try_add(&b), Err(Error::MixedRings));
        let c = a.ring().element(4).unwrap();
        assert_eq!(a.try_add(&c).unwrap().index(), 5);
        assert_eq!(a.try_mul(&c).unwrap().index(), 4);
    }

    #[test]
    fn table_ring_rejects_broken_axioms() {
        // Z/3 addition with a multiplication that is not distributive
        let add: Vec<u32> = (0..9).map(|i| ((i / 3 + i % 3) % 3) as u32).collect();
        let mut mul: Vec<u32> = (0..9).map(|i| ((i / 3) * (i % 3) % 3) as u32).collect();
        assert!(Ring::from_tables("z3", add.clone(), mul.clone(), 0, 1).is_ok());
        mul[2 * 3 + 2] = 2;
        assert!(matches!(
            Ring::from_tables("bad", add, mul, 0, 1),
            Err(Error::AxiomViolation(_))
        ));
    }

    #[test]
    fn table_ring_with_shuffled_labels() {
        // Z/4 relabelled by x -> 3 - x: zero is label 3, one is label 2
        let lbl = |x: usize| 3 - x;
        let mut add = vec![0u32; 16];
        let mut mul = vec![0u32; 16];
        for a in 0..4 {
            for b in 0..4 {
                add[lbl(a) * 4 + lbl(b)] = lbl((a + b) % 4) as u32;
                mul[lbl(a) * 4 + lbl(b)] = lbl(a * b % 4) as u32;
            }
        }
        let r = Ring::from_tables("z4-relabelled", add, mul, 3, 2).unwrap();
        assert_eq!(r.factors(), &[4]);
        assert_eq!(r.characteristic(), 4);
        assert_eq!(r.unit_count(), 2);
        assert_eq!(r.integer_image(4), r.zero());
        assert_eq!(r.integer_image(3), lbl(3));
        for a in 0..4 {
            assert_eq!(r.from_rank(r.rank(a)), a);
        }
        assert!(r.generating_character().is_err());
    }

    #[test]
    fn sampled_axioms_on_large_matrix_ring() {
        let m = ring("mat(3,gf(2))");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let (a, b, c) = (rng.gen_range(0..512), rng.gen_range(0..512), rng.gen_range(0..512));
            assert_eq!(m.mul(m.mul(a, b), c), m.mul(a, m.mul(b, c)));
            assert_eq!(m.mul(a, m.add(b, c)), m.add(m.mul(a, b), m.mul(a, c)));
            assert_eq!(m.mul(m.add(a, b), c), m.add(m.mul(a, c), m.mul(b, c)));
        }
    }

    #[test]
    fn summary_json() {
        let s = serde_json::to_value(ring("mat(2,gf(2))").summary()).unwrap();
        assert_eq!(s["size"], 16);
        assert_eq!(s["unit_count"], 6);
        assert_eq!(s["characteristic"], 2);
        assert_eq!(s["additive_factors"].as_array().unwrap().len(), 4);
    }
}
