//! Cyclic decomposition of a finite abelian group given by an addition table.
//!
//! Generators are picked greedily (smallest index outside the current span), which
//! yields a triangular presentation; its Smith normal form gives invariant factors
//! and the change of coordinates.

use crate::error::{Error, Result};

pub(crate) struct Decomposition {
    /// Invariant factors `d_1 | d_2 | ...`, all at least 2.
    pub factors: Vec<u64>,
    /// Coordinates of each element, `coords[e][j]` in `Z/factors[j]`.
    pub coords: Vec<Vec<u64>>,
}

pub(crate) fn decompose(size: usize, zero: usize, add: impl Fn(usize, usize) -> usize) -> Result<Decomposition> {
    // triangular coordinates relative to the greedy generators
    let mut tri: Vec<Option<Vec<u64>>> = vec![None; size];
    tri[zero] = Some(Vec::new());
    let mut span: Vec<usize> = vec![zero];
    let mut relations: Vec<Vec<i128>> = Vec::new();

    while span.len() < size {
        let g = (0..size).find(|&e| tri[e].is_none()).unwrap();
        let k = relations.len();
        // smallest m > 0 with m*g in the current span
        let mut m = 1u64;
        let mut mg = g;
        while tri[mg].is_none() {
            mg = add(mg, g);
            m += 1;
            if m as usize > size {
                return Err(Error::AxiomViolation("addition is not a finite group".into()));
            }
        }
        let mut rel: Vec<i128> = tri[mg].as_ref().unwrap().iter().map(|&c| -(c as i128)).collect();
        rel.resize(k, 0);
        rel.push(m as i128);
        relations.push(rel);

        let old = span.clone();
        let mut shifted = old.clone();
        for a in 1..m {
            for s in shifted.iter_mut() {
                *s = add(*s, g);
            }
            for (&base, &e) in old.iter().zip(shifted.iter()) {
                if tri[e].is_some() {
                    return Err(Error::AxiomViolation("addition is not a group".into()));
                }
                let mut c = tri[base].clone().unwrap();
                c.resize(k, 0);
                c.push(a);
                tri[e] = Some(c);
                span.push(e);
            }
        }
    }

    let r = relations.len();
    let mut mat: Vec<Vec<i128>> = relations
        .into_iter()
        .map(|mut row| {
            row.resize(r, 0);
            row
        })
        .collect();
    let v = smith_columns(&mut mat);

    let diag: Vec<i128> = (0..r).map(|i| mat[i][i]).collect();
    let keep: Vec<usize> = (0..r).filter(|&i| diag[i] > 1).collect();
    let factors: Vec<u64> = keep.iter().map(|&i| diag[i] as u64).collect();

    let coords = tri
        .into_iter()
        .map(|c| {
            let mut x = c.unwrap();
            x.resize(r, 0);
            keep.iter()
                .map(|&j| {
                    let y: i128 = (0..r).map(|i| x[i] as i128 * v[i][j]).sum();
                    y.rem_euclid(diag[j]) as u64
                })
                .collect()
        })
        .collect();

    Ok(Decomposition { factors, coords })
}

/// Reduces `a` to Smith normal form in place and returns the accumulated column
/// transform `V` (rows are not tracked).
fn smith_columns(a: &mut [Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    let mut v: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();

    let col_sub = |a: &mut [Vec<i128>], v: &mut [Vec<i128>], dst: usize, src: usize, q: i128| {
        for row in a.iter_mut() {
            row[dst] -= q * row[src];
        }
        for row in v.iter_mut() {
            row[dst] -= q * row[src];
        }
    };

    for t in 0..n {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { return v };
            a.swap(t, pi);
            if pj != t {
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                for row in v.iter_mut() {
                    row.swap(t, pj);
                }
            }
            let piv = a[t][t];
            let mut dirty = false;
            for i in t + 1..n {
                let q = a[i][t] / piv;
                if q != 0 {
                    let pivot_row = a[t].clone();
                    for (x, y) in a[i].iter_mut().zip(pivot_row) {
                        *x -= q * y;
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..n {
                let q = a[t][j] / piv;
                if q != 0 {
                    col_sub(a, &mut v, j, t, q);
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                continue;
            }
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % piv != 0));
            if let Some(i) = bad {
                let row_i = a[i].clone();
                for (x, y) in a[t].iter_mut().zip(row_i) {
                    *x += y;
                }
                continue;
            }
            break;
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(orders: &[u64]) -> Vec<u64> {
        // direct product of cyclic groups, mixed radix little-endian
        let size: u64 = orders.iter().product();
        let digits = |mut e: u64| -> Vec<u64> {
            orders
                .iter()
                .map(|&o| {
                    let d = e % o;
                    e /= o;
                    d
                })
                .collect()
        };
        let add = |a: usize, b: usize| -> usize {
            let (da, db) = (digits(a as u64), digits(b as u64));
            let mut idx = 0u64;
            let mut w = 1u64;
            for ((x, y), &o) in da.iter().zip(&db).zip(orders) {
                idx += (x + y) % o * w;
                w *= o;
            }
            idx as usize
        };
        let dec = decompose(size as usize, 0, add).unwrap();
        assert_eq!(dec.factors.iter().product::<u64>(), size);
        // coordinate map is an additive bijection
        let mut seen = std::collections::HashSet::new();
        for a in 0..size as usize {
            assert!(seen.insert(dec.coords[a].clone()));
            for b in 0..size as usize {
                let s = add(a, b);
                for (j, &f) in dec.factors.iter().enumerate() {
                    assert_eq!((dec.coords[a][j] + dec.coords[b][j]) % f, dec.coords[s][j]);
                }
            }
        }
        dec.factors
    }

    #[test]
    fn cyclic_groups() {
        assert_eq!(check(&[12]), vec![12]);
        assert_eq!(check(&[2]), vec![2]);
    }

    #[test]
    fn products_merge_to_invariant_factors() {
        assert_eq!(check(&[2, 3]), vec![6]);
        assert_eq!(check(&[4, 2]), vec![2, 4]);
        assert_eq!(check(&[2, 2, 2]), vec![2, 2, 2]);
        assert_eq!(check(&[3, 9, 3]), vec![3, 3, 9]);
        assert_eq!(check(&[6, 4]), vec![2, 12]);
    }
}
