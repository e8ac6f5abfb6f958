//! One-sided and two-sided ideals, the Jacobson radical, and the semisimple quotient.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{quotient_ring, Quotient, Ring, AXIOM_CHECK_LIMIT, TABLE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::TwoSided => "two-sided",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "two-sided" | "twosided" | "both" => Ok(Side::TwoSided),
            other => Err(Error::Parse(format!("unknown side '{other}'"))),
        }
    }
}

/// An additive subgroup closed under multiplication by `R` on the declared side.
#[derive(Clone)]
pub struct IdealSet {
    side: Side,
    ring: Ring,
    elements: Vec<usize>,
}

impl fmt::Debug for IdealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IdealSet({} {} of size {})", self.side, self.ring, self.elements.len())
    }
}

impl PartialEq for IdealSet {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_ring(&other.ring) && self.elements == other.elements
    }
}

impl IdealSet {
    /// Validates closure exhaustively before accepting the set.
    pub fn new(ring: &Ring, side: Side, mut elements: Vec<usize>) -> Result<IdealSet> {
        elements.sort_unstable();
        elements.dedup();
        if elements.iter().any(|&e| e >= ring.size()) {
            return Err(Error::NotAnIdeal("element out of range".into()));
        }
        let ideal = IdealSet {
            side,
            ring: ring.clone(),
            elements,
        };
        if !ideal.is_closed_under(side) {
            return Err(Error::NotAnIdeal(format!("set is not a {side} ideal")));
        }
        Ok(ideal)
    }

    fn from_bits(ring: &Ring, side: Side, bits: &BitSet) -> IdealSet {
        IdealSet {
            side,
            ring: ring.clone(),
            elements: bits.iter().collect(),
        }
    }

    pub fn zero(ring: &Ring) -> IdealSet {
        IdealSet {
            side: Side::TwoSided,
            ring: ring.clone(),
            elements: vec![ring.zero()],
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// A proper ideal cannot contain the identity.
    pub fn is_proper(&self) -> bool {
        !self.contains(self.ring.one())
    }

    /// Exhaustive closure check: contains 0, `I + I ⊆ I`, `-I ⊆ I`, and
    /// `R·I ⊆ I` / `I·R ⊆ I` as the side requires.
    pub fn is_closed_under(&self, side: Side) -> bool {
        let r = &self.ring;
        if !self.contains(r.zero()) {
            return false;
        }
        for &a in &self.elements {
            if !self.contains(r.neg(a)) {
                return false;
            }
            if !self.elements.iter().all(|&b| self.contains(r.add(a, b))) {
                return false;
            }
            for x in 0..r.size() {
                let left_ok = side == Side::Right || self.contains(r.mul(x, a));
                let right_ok = side == Side::Left || self.contains(r.mul(a, x));
                if !(left_ok && right_ok) {
                    return false;
                }
            }
        }
        true
    }
}

/// `R·x` (left) or `x·R` (right); for two-sided, the ideal generated by `x`.
pub fn principal_ideal(ring: &Ring, x: usize, side: Side) -> IdealSet {
    let bits = match side {
        Side::Left | Side::Right => one_sided_principal(ring, x, side),
        Side::TwoSided => {
            let mut acc = BitSet::singleton(ring.size(), ring.zero());
            for s in 0..ring.size() {
                let l = one_sided_principal(ring, ring.mul(x, s), Side::Left);
                acc = sum_subgroups(ring, &acc, &l);
            }
            acc
        }
    };
    IdealSet::from_bits(ring, side, &bits)
}

fn one_sided_principal(ring: &Ring, x: usize, side: Side) -> BitSet {
    let mut bits = BitSet::new(ring.size());
    for r in 0..ring.size() {
        bits.insert(match side {
            Side::Right => ring.mul(x, r),
            _ => ring.mul(r, x),
        });
    }
    bits
}

/// The subgroup `A + B` of two additive subgroups.
fn sum_subgroups(ring: &Ring, a: &BitSet, b: &BitSet) -> BitSet {
    let a_elems: Vec<usize> = a.iter().collect();
    let mut out = a.clone();
    for p in b.iter() {
        if out.contains(p) {
            continue;
        }
        for &i in &a_elems {
            out.insert(ring.add(i, p));
        }
    }
    out
}

/// Additive subgroup generated by `gens`.
fn additive_span(ring: &Ring, gens: impl IntoIterator<Item = usize>) -> BitSet {
    let mut span = BitSet::singleton(ring.size(), ring.zero());
    for g in gens {
        if span.contains(g) {
            continue;
        }
        let base: Vec<usize> = span.iter().collect();
        let mut shift = g;
        while !span.contains(shift) {
            for &s in &base {
                span.insert(ring.add(s, shift));
            }
            shift = ring.add(shift, g);
        }
    }
    span
}

/// Additive span of `{ab : a ∈ I, b ∈ J}`.
pub fn ideal_product(a: &IdealSet, b: &IdealSet) -> Result<IdealSet> {
    if !a.ring.same_ring(&b.ring) {
        return Err(Error::MixedRings);
    }
    let r = &a.ring;
    let prods = a
        .elements
        .iter()
        .flat_map(|&x| b.elements.iter().map(move |&y| r.mul(x, y)));
    let mut prods: Vec<usize> = prods.collect();
    prods.sort_unstable();
    prods.dedup();
    let side = if a.side == b.side { a.side } else { Side::TwoSided };
    let bits = additive_span(r, prods);
    let out = IdealSet::from_bits(r, side, &bits);
    Ok(out)
}

fn check_enumeration_size(ring: &Ring) -> Result<()> {
    if ring.size() > TABLE_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "ideal enumeration",
            required: ring.size() as u128,
            budget: TABLE_LIMIT as u64,
        });
    }
    Ok(())
}

/// An ideal together with a short list of principal generators.
#[derive(Debug, Clone)]
pub struct GeneratedIdeal {
    pub ideal: IdealSet,
    pub generators: Vec<usize>,
}

/// Every ideal of the given side, as sums of principal ideals closed to a fixpoint.
/// Sorted by size, then lexicographically by elements.
pub fn all_ideals(ring: &Ring, side: Side) -> Result<Vec<IdealSet>> {
    Ok(ideal_lattice(ring, side)?.into_iter().map(|g| g.ideal).collect())
}

pub fn ideal_lattice(ring: &Ring, side: Side) -> Result<Vec<GeneratedIdeal>> {
    check_enumeration_size(ring)?;
    let n = ring.size();

    // distinct left/right principal ideals, each keyed by its bitset
    let principal_side = if side == Side::Right { Side::Right } else { Side::Left };
    let mut one_sided: Vec<BitSet> = Vec::new();
    let mut one_sided_id: HashMap<BitSet, usize> = HashMap::new();
    let mut elem_id = vec![0usize; n];
    for (x, slot) in elem_id.iter_mut().enumerate() {
        let bits = one_sided_principal(ring, x, principal_side);
        let next = one_sided.len();
        let id = *one_sided_id.entry(bits.clone()).or_insert(next);
        if id == next {
            one_sided.push(bits);
        }
        *slot = id;
    }

    let mut principals: Vec<(BitSet, usize)> = Vec::new();
    match side {
        Side::Left | Side::Right => {
            let mut seen = vec![false; one_sided.len()];
            for x in 0..n {
                if !seen[elem_id[x]] {
                    seen[elem_id[x]] = true;
                    principals.push((one_sided[elem_id[x]].clone(), x));
                }
            }
        }
        Side::TwoSided => {
            // RxR = sum over s of R(xs)
            let mut seen: HashMap<BitSet, ()> = HashMap::new();
            for x in 0..n {
                let mut ids: Vec<usize> = (0..n).map(|s| elem_id[ring.mul(x, s)]).collect();
                ids.sort_unstable();
                ids.dedup();
                let mut acc = BitSet::singleton(n, ring.zero());
                for id in ids {
                    acc = sum_subgroups(ring, &acc, &one_sided[id]);
                }
                if seen.insert(acc.clone(), ()).is_none() {
                    principals.push((acc, x));
                }
            }
        }
    }

    let mut found: Vec<(BitSet, Vec<usize>)> = Vec::new();
    let mut index: HashMap<BitSet, usize> = HashMap::new();
    let zero = BitSet::singleton(n, ring.zero());
    index.insert(zero.clone(), 0);
    found.push((zero, Vec::new()));
    for (bits, x) in &principals {
        if let Some(&i) = index.get(bits) {
            if found[i].1.len() > 1 || found[i].1.is_empty() && *x != ring.zero() && bits.count() > 1 {
                found[i].1 = vec![*x];
            }
            continue;
        }
        index.insert(bits.clone(), found.len());
        found.push((bits.clone(), vec![*x]));
    }
    let mut i = 0;
    while i < found.len() {
        for (pbits, x) in &principals {
            let sum = sum_subgroups(ring, &found[i].0, pbits);
            if index.contains_key(&sum) {
                continue;
            }
            let mut gens = found[i].1.clone();
            gens.push(*x);
            index.insert(sum.clone(), found.len());
            found.push((sum, gens));
        }
        i += 1;
    }

    let mut out: Vec<GeneratedIdeal> = found
        .into_iter()
        .map(|(bits, generators)| GeneratedIdeal {
            ideal: IdealSet::from_bits(ring, side, &bits),
            generators,
        })
        .collect();
    out.sort_by(|a, b| {
        a.ideal
            .size()
            .cmp(&b.ideal.size())
            .then_with(|| a.ideal.elements.cmp(&b.ideal.elements))
    });
    Ok(out)
}

/// Largest proper ideal of the given side; at least 1 because `{0}` is proper.
pub fn max_proper_ideal_size(ring: &Ring, side: Side) -> Result<usize> {
    Ok(all_ideals(ring, side)?
        .iter()
        .filter(|i| i.is_proper())
        .map(IdealSet::size)
        .max()
        .unwrap_or(1))
}

/// JSON view of one lattice entry.
#[derive(Debug, Clone, Serialize)]
pub struct IdealInfo {
    pub side: Side,
    pub size: usize,
    pub proper: bool,
    pub generators: Vec<usize>,
}

pub fn lattice_info(lattice: &[GeneratedIdeal]) -> Vec<IdealInfo> {
    lattice
        .iter()
        .map(|g| IdealInfo {
            side: g.ideal.side,
            size: g.ideal.size(),
            proper: g.ideal.is_proper(),
            generators: g.generators.clone(),
        })
        .collect()
}

/// The Jacobson radical and the quotient by it.
#[derive(Debug, Clone)]
pub struct RadicalReport {
    pub radical: IdealSet,
    pub quotient: Quotient,
}

impl RadicalReport {
    pub fn radical_size(&self) -> usize {
        self.radical.size()
    }
}

/// `{x : 1 - yx is invertible for every y}`.
fn quasi_regular_elements(ring: &Ring) -> Vec<usize> {
    let one = ring.one();
    (0..ring.size())
        .filter(|&x| (0..ring.size()).all(|y| ring.is_unit(ring.sub(one, ring.mul(y, x)))))
        .collect()
}

pub fn jacobson_radical(ring: &Ring) -> Result<RadicalReport> {
    check_enumeration_size(ring)?;
    let elements = quasi_regular_elements(ring);
    let radical = IdealSet {
        side: Side::TwoSided,
        ring: ring.clone(),
        elements,
    };
    if !radical.is_closed_under(Side::TwoSided) {
        return Err(Error::Invariant(format!("radical of {ring} is not a two-sided ideal")));
    }
    if ring.size() <= AXIOM_CHECK_LIMIT {
        let via_maximal = maximal_left_intersection(ring)?;
        if via_maximal != radical.elements {
            return Err(Error::Invariant(format!(
                "radical of {ring} differs from the intersection of maximal left ideals"
            )));
        }
    }
    let quotient = quotient_ring(ring, &radical)?;
    if quotient.ring.size() <= AXIOM_CHECK_LIMIT && quasi_regular_elements(&quotient.ring) != vec![quotient.ring.zero()] {
        return Err(Error::Invariant(format!("{} is not semisimple", quotient.ring)));
    }
    Ok(RadicalReport { radical, quotient })
}

/// Intersection of the maximal proper left ideals.
pub fn maximal_left_intersection(ring: &Ring) -> Result<Vec<usize>> {
    let proper: Vec<IdealSet> = all_ideals(ring, Side::Left)?.into_iter().filter(IdealSet::is_proper).collect();
    let maximal: Vec<&IdealSet> = proper
        .iter()
        .filter(|i| {
            !proper
                .iter()
                .any(|j| j.size() > i.size() && i.elements.iter().all(|&x| j.contains(x)))
        })
        .collect();
    let mut out: Vec<usize> = (0..ring.size()).collect();
    for m in maximal {
        out.retain(|&x| m.contains(x));
    }
    Ok(out)
}

/// Fixed-size bitset over ring indices.
#[derive(Clone, PartialEq, Eq, Hash)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn singleton(n: usize, x: usize) -> Self {
        let mut b = BitSet::new(n);
        b.insert(x);
        b
    }

    fn insert(&mut self, x: usize) {
        self.words[x / 64] |= 1 << (x % 64);
    }

    fn contains(&self, x: usize) -> bool {
        self.words[x / 64] >> (x % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::upper_triangular;

    fn ring(s: &str) -> Ring {
        Ring::parse(s).unwrap()
    }

    fn sizes(r: &Ring, side: Side) -> Vec<usize> {
        all_ideals(r, side).unwrap().iter().map(IdealSet::size).collect()
    }

    #[test]
    fn principal_examples() {
        let r = ring("zmod(6)");
        assert_eq!(principal_ideal(&r, 0, Side::Left).elements(), &[0]);
        assert_eq!(principal_ideal(&r, 1, Side::Left).size(), 6);
        assert!(!principal_ideal(&r, 1, Side::Left).is_proper());
        assert_eq!(principal_ideal(&r, 2, Side::Left).elements(), &[0, 2, 4]);
    }

    #[test]
    fn fields_have_trivial_lattice() {
        for q in ["gf(2)", "gf(9)", "gf(8)", "zmod(7)"] {
            let r = ring(q);
            assert_eq!(sizes(&r, Side::Left), vec![1, r.size()]);
            assert_eq!(max_proper_ideal_size(&r, Side::Left).unwrap(), 1);
        }
    }

    #[test]
    fn zmod_lattices() {
        let r = ring("zmod(4)");
        let ideals = all_ideals(&r, Side::Left).unwrap();
        let elems: Vec<&[usize]> = ideals.iter().map(|i| i.elements()).collect();
        assert_eq!(elems, vec![&[0][..], &[0, 2][..], &[0, 1, 2, 3][..]]);
        assert_eq!(max_proper_ideal_size(&ring("zmod(8)"), Side::Left).unwrap(), 4);
        assert_eq!(sizes(&ring("zmod(12)"), Side::TwoSided), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn matrix_left_ideals() {
        let m = ring("mat(2,gf(2))");
        let left = all_ideals(&m, Side::Left).unwrap();
        assert_eq!(left.iter().map(IdealSet::size).collect::<Vec<_>>(), vec![1, 4, 4, 4, 16]);
        // matrices whose right column is zero: entries at positions 1 and 3 vanish
        let column_zero: Vec<usize> = (0..16)
            .filter(|&a| {
                let e = m.matrix_entries(a).unwrap();
                e[1] == 0 && e[3] == 0
            })
            .collect();
        assert_eq!(column_zero.len(), 4);
        assert!(left.iter().any(|i| i.elements() == column_zero.as_slice()));
        // simple ring: only trivial two-sided ideals
        assert_eq!(sizes(&m, Side::TwoSided), vec![1, 16]);
    }

    #[test]
    fn mat2_gf3_max_left_ideal() {
        // frozen from full lattice enumeration: minimal left ideals have |F|^{n^2-n} = 9 elements
        let m = ring("mat(2,gf(3))");
        assert_eq!(max_proper_ideal_size(&m, Side::Left).unwrap(), 9);
        assert_eq!(max_proper_ideal_size(&m, Side::Right).unwrap(), 9);
        assert_eq!(sizes(&m, Side::Left), vec![1, 9, 9, 9, 9, 81]);
    }

    #[test]
    fn closure_validation() {
        let r = ring("zmod(6)");
        assert!(IdealSet::new(&r, Side::Left, vec![0, 3]).is_ok());
        assert!(IdealSet::new(&r, Side::Left, vec![0, 1]).is_err());
        assert!(IdealSet::new(&r, Side::Left, vec![2, 4]).is_err());
    }

    #[test]
    fn radicals() {
        let r = jacobson_radical(&ring("gf(9)")).unwrap();
        assert_eq!(r.radical.elements(), &[0]);
        assert_eq!(r.quotient.ring.size(), 9);

        let r = jacobson_radical(&ring("zmod(4)")).unwrap();
        assert_eq!(r.radical.elements(), &[0, 2]);
        assert_eq!(r.quotient.ring.size(), 2);
        assert!(r.quotient.ring.is_field());

        let r = jacobson_radical(&ring("prod(gf(2),zmod(9))")).unwrap();
        assert_eq!(r.radical_size(), 3);
        assert_eq!(r.quotient.ring.size(), 6);
    }

    #[test]
    fn radical_of_upper_triangular() {
        let f2 = ring("gf(2)");
        let u = upper_triangular(2, &f2).unwrap();
        assert_eq!(u.size(), 8);
        let r = jacobson_radical(&u).unwrap();
        // strictly upper-triangular matrices
        assert_eq!(r.radical_size(), 2);
        assert_eq!(r.quotient.ring.size(), 4);
        assert_eq!(r.quotient.ring.unit_count(), 1);
        let j2 = ideal_product(&r.radical, &r.radical).unwrap();
        assert_eq!(j2.size(), 1);
    }

    #[test]
    fn nakayama_witness() {
        for s in ["zmod(4)", "zmod(8)", "zmod(9)", "prod(gf(2),zmod(4))", "mat(2,zmod(4))"] {
            let r = ring(s);
            if r.size() > TABLE_LIMIT {
                continue;
            }
            let rad = jacobson_radical(&r).unwrap();
            if rad.radical_size() > 1 {
                let j2 = ideal_product(&rad.radical, &rad.radical).unwrap();
                assert!(j2.size() < rad.radical_size(), "{s}: J^2 = J");
            }
        }
    }

    #[test]
    fn quotient_homomorphism() {
        let r = ring("zmod(12)");
        let i = principal_ideal(&r, 4, Side::TwoSided);
        let q = quotient_ring(&r, &i).unwrap();
        assert_eq!(q.ring.size(), 4);
        for a in 0..12 {
            for b in 0..12 {
                assert_eq!(q.projection[r.add(a, b)], q.ring.add(q.projection[a], q.projection[b]));
                assert_eq!(q.projection[r.mul(a, b)], q.ring.mul(q.projection[a], q.projection[b]));
            }
        }
    }

    #[test]
    fn quotient_errors() {
        let m = ring("mat(2,gf(2))");
        let left = all_ideals(&m, Side::Left).unwrap();
        let column = left.iter().find(|i| i.size() == 4).unwrap();
        assert!(matches!(quotient_ring(&m, column), Err(Error::NotAnIdeal(_))));
        let whole = left.last().unwrap();
        assert!(matches!(quotient_ring(&m, whole), Err(Error::NotAnIdeal(_))));
    }

    #[test]
    fn quotient_by_zero_keeps_tables() {
        let r = ring("zmod(6)");
        let q = quotient_ring(&r, &IdealSet::zero(&r)).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(q.ring.mul(a, b), r.mul(a, b));
                assert_eq!(q.ring.add(a, b), r.add(a, b));
            }
        }
    }

    #[test]
    fn enumeration_budget() {
        assert!(matches!(
            all_ideals(&ring("mat(3,gf(3))"), Side::Left),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
