//! Derived rings: quotients by two-sided ideals and upper-triangular matrix rings.

use std::collections::HashMap;

use super::{Ring, RingSpec};
use crate::error::{Error, Result};
use crate::structure::{IdealSet, Side};

/// A quotient ring with its surjection.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub ring: Ring,
    /// `projection[x]` is the coset (quotient element) containing `x`.
    pub projection: Vec<usize>,
    /// Least element of each coset, in quotient-index order.
    pub representatives: Vec<usize>,
}

/// `R / I` as a table ring on coset representatives (least element of each coset).
pub fn quotient_ring(ring: &Ring, ideal: &IdealSet) -> Result<Quotient> {
    if !ideal.ring().same_ring(ring) {
        return Err(Error::MixedRings);
    }
    if !ideal.is_closed_under(Side::TwoSided) {
        return Err(Error::NotAnIdeal("quotient needs a two-sided ideal".into()));
    }
    if !ideal.is_proper() {
        return Err(Error::NotAnIdeal("quotient by an improper ideal is the zero ring".into()));
    }
    let n = ring.size();
    let members = ideal.elements();
    let mut projection = vec![usize::MAX; n];
    let mut representatives = Vec::new();
    for x in 0..n {
        if projection[x] != usize::MAX {
            continue;
        }
        let id = representatives.len();
        representatives.push(x);
        for &i in members {
            projection[ring.add(x, i)] = id;
        }
    }
    let m = representatives.len();
    let mut add = Vec::with_capacity(m * m);
    let mut mul = Vec::with_capacity(m * m);
    for &a in &representatives {
        for &b in &representatives {
            add.push(projection[ring.add(a, b)] as u32);
            mul.push(projection[ring.mul(a, b)] as u32);
        }
    }
    let label = format!("{ring}/<{}>", members.len());
    let q = Ring::from_tables(&label, add, mul, projection[ring.zero()], projection[ring.one()])?;
    Ok(Quotient {
        ring: q,
        projection,
        representatives,
    })
}

/// Upper-triangular `n x n` matrices over `base`, as a table ring.
/// Elements are labelled in increasing order of their index in `mat(n, base)`.
pub fn upper_triangular(n: usize, base: &Ring) -> Result<Ring> {
    let full = Ring::new(&RingSpec::Matrix {
        n,
        base: Box::new(base.spec().clone()),
    })?;
    let bs = base.size();
    let upper: Vec<usize> = (0..n * n).filter(|&p| p / n <= p % n).collect();
    let count = bs
        .checked_pow(upper.len() as u32)
        .filter(|&c| c <= u32::MAX as usize)
        .ok_or_else(|| Error::InvalidRing("upper-triangular ring too large".into()))?;
    let mut elems: Vec<usize> = (0..count)
        .map(|mut c| {
            let mut entries = vec![base.zero(); n * n];
            for &p in &upper {
                entries[p] = c % bs;
                c /= bs;
            }
            full.matrix_from_entries(&entries).unwrap()
        })
        .collect();
    elems.sort_unstable();
    let label: HashMap<usize, u32> = elems.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
    let mut add = Vec::with_capacity(count * count);
    let mut mul = Vec::with_capacity(count * count);
    for &a in &elems {
        for &b in &elems {
            add.push(label[&full.add(a, b)]);
            mul.push(label[&full.mul(a, b)]);
        }
    }
    Ring::from_tables(
        &format!("upper({n},{})", base.spec()),
        add,
        mul,
        label[&full.zero()] as usize,
        label[&full.one()] as usize,
    )
}
