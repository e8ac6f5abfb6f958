//! Polynomial arithmetic over Z/p used to model GF(p^k).
//!
//! Polynomials are coefficient vectors, lowest degree first.

fn trim(poly: &mut Vec<u64>) {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
}

fn degree(poly: &[u64]) -> Option<usize> {
    poly.iter().rposition(|&c| c != 0)
}

/// Remainder of `a` divided by the monic polynomial `m`.
pub(crate) fn rem_monic(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let mut r: Vec<u64> = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let lead = r[dr];
        let shift = dr - dm;
        for (i, &mc) in m.iter().enumerate() {
            let sub = lead * mc % p;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

/// Exhaustive irreducibility test: no monic factor of degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let Some(deg) = degree(poly) else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    for fd in 1..=deg / 2 {
        let count = p.pow(fd as u32);
        for lower in 0..count {
            let mut factor = vec![0u64; fd + 1];
            let mut v = lower;
            for c in factor.iter_mut().take(fd) {
                *c = v % p;
                v /= p;
            }
            factor[fd] = 1;
            let r = rem_monic(poly, &factor, p);
            if degree(&r).is_none() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `k` over Z/p, comparing
/// the coefficient tuple `(c_0, ..., c_{k-1})` from the constant term upward.
pub fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    let count = p.pow(k as u32);
    for n in 0..count {
        let mut poly = vec![0u64; k + 1];
        let mut v = n;
        for i in (0..k).rev() {
            poly[i] = v % p;
            v /= p;
        }
        poly[k] = 1;
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Product of two reduced field elements (length `k` coefficient slices) modulo `modulus`.
pub(crate) fn mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64, out: &mut [u64]) {
    let k = modulus.len() - 1;
    let mut prod = [0u64; 64];
    let mut scratch;
    let full: &mut [u64] = if 2 * k <= 64 {
        &mut prod[..2 * k.max(1)]
    } else {
        scratch = vec![0u64; 2 * k];
        &mut scratch[..]
    };
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            full[i + j] = (full[i + j] + x * y) % p;
        }
    }
    // reduce from the top using t^k = -(m_0 + ... + m_{k-1} t^{k-1})
    for deg in (k..full.len()).rev() {
        let lead = full[deg];
        if lead == 0 {
            continue;
        }
        full[deg] = 0;
        for (i, &mc) in modulus.iter().take(k).enumerate() {
            let idx = deg - k + i;
            full[idx] = (full[idx] + p - lead * mc % p) % p;
        }
    }
    out.copy_from_slice(&full[..k]);
}

pub fn format_poly(poly: &[u64]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in poly.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_modulus_is_t2_t_1() {
        assert_eq!(smallest_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(format_poly(&[1, 1, 1]), "t^2 + t + 1");
    }

    #[test]
    fn quadratics_over_z2_exhaustive() {
        // t^2, t^2+1 = (t+1)^2, t^2+t = t(t+1) are reducible; only t^2+t+1 survives
        let irreducible: Vec<_> = (0..4u64)
            .map(|n| vec![n & 1, n >> 1, 1])
            .filter(|p| is_irreducible(p, 2))
            .collect();
        assert_eq!(irreducible, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn gf9_modulus() {
        // t^2 + 1 is irreducible mod 3 since -1 is not a square
        assert_eq!(smallest_irreducible(3, 2), vec![1, 0, 1]);
    }

    #[test]
    fn degree_one_is_t() {
        assert_eq!(smallest_irreducible(5, 1), vec![0, 1]);
    }

    #[test]
    fn mul_in_gf4() {
        let m = [1, 1, 1];
        let mut out = [0u64; 2];
        mul_mod(&[0, 1], &[0, 1], &m, 2, &mut out);
        assert_eq!(out, [1, 1]);
    }
}
