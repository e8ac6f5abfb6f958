//! Gauss sums, the prime-power exponential sum, and the simplex volume functional.

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{guard, ring, CheckRecord, Context, Measurement, CLOSED_FORM_TOL};
use crate::arith::{gcd, is_prime};
use crate::dual::{roots_of_unity, Dual};
use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussVariant {
    /// `sum_a psi(-a - a^2)`
    Shifted,
    /// `sum_a psi(-a^2)`
    Plain,
}

/// Sums the generating character of a field over `-a - a^2` or `-a^2`.
pub fn gauss_sum(field: &Ring, variant: GaussVariant) -> Result<Complex64> {
    if !field.is_field() {
        return Err(Error::Precondition(format!("{field} is not a field")));
    }
    let dual = Dual::new(field, 1)?;
    let gamma = field.generating_character()?;
    let mut hist = vec![0u64; dual.exponent() as usize];
    for a in 0..field.size() {
        let sq = field.mul(a, a);
        let y = match variant {
            GaussVariant::Shifted => field.neg(field.add(a, sq)),
            GaussVariant::Plain => field.neg(sq),
        };
        hist[dual.block_phase_digits(&gamma, y) as usize] += 1;
    }
    Ok(hist.iter().zip(dual.roots()).map(|(&h, &r)| r * h as f64).sum())
}

pub fn check_gauss(field: &Ring) -> CheckRecord {
    guard("gauss", &[field], || {
        let mut rec = CheckRecord::new("gauss", &[field]);
        let q = field.size() as f64;
        let shifted = gauss_sum(field, GaussVariant::Shifted)?;
        let plain = gauss_sum(field, GaussVariant::Plain)?;
        if field.characteristic() == 2 {
            // every term is 1
            rec.push(Measurement::eq("|shifted - q|", (shifted - q).norm(), 0.0, 1e-9));
            rec.push(Measurement::eq("|plain|", plain.norm(), 0.0, 1e-9));
        } else {
            rec.push(Measurement::eq("|shifted|", shifted.norm(), q.sqrt(), CLOSED_FORM_TOL));
            rec.push(Measurement::eq("|plain|", plain.norm(), q.sqrt(), CLOSED_FORM_TOL));
        }
        Ok(rec)
    })
}

/// `sum_{x mod p^m} exp(2 pi i x^n / p^m)` for odd prime `p`, `gcd(n, p) = 1`, `2 <= m <= n`.
pub fn intro_sum(p: u64, m: u32, n: u64) -> Result<Complex64> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not an odd prime")));
    }
    if gcd(n, p) != 1 {
        return Err(Error::Precondition(format!("n = {n} is divisible by {p}")));
    }
    if m < 2 || (m as u64) > n {
        return Err(Error::Precondition(format!("need 2 <= m <= n, got m = {m}, n = {n}")));
    }
    let modulus = p
        .checked_pow(m)
        .filter(|&q| q <= 1 << 24)
        .ok_or_else(|| Error::Precondition("p^m too large".into()))?;
    let mut hist = vec![0u64; modulus as usize];
    for x in 0..modulus {
        hist[pow_mod(x, n, modulus) as usize] += 1;
    }
    Ok(hist
        .iter()
        .zip(roots_of_unity(modulus))
        .map(|(&h, r)| r * h as f64)
        .sum())
}

fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut b = base as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

pub fn check_intro(p: u64, m: u32, n: u64) -> CheckRecord {
    let label = vec![format!("p={p} m={m} n={n}")];
    match intro_sum(p, m, n) {
        Ok(s) => {
            let mut rec = CheckRecord::with_rings("intro", label);
            let expected = (p as f64).powi(m as i32 - 1);
            rec.push(Measurement::eq("|S - p^(m-1)|", (s - expected).norm(), 0.0, CLOSED_FORM_TOL));
            rec.push(Measurement::info("Re S", s.re));
            rec
        }
        Err(e) => CheckRecord::from_error("intro", label, &e),
    }
}

/// Volume of `conv(0, v_1, ..., v_r)` as `|det(v)| / r!`, exactly.
fn simplex_volume(vertices: &[Vec<i128>]) -> Ratio<i128> {
    let r = vertices.len();
    if r == 0 {
        return Ratio::from_integer(1);
    }
    let mut m: Vec<Vec<Ratio<i128>>> = vertices
        .iter()
        .map(|v| v.iter().map(|&x| Ratio::from_integer(x)).collect())
        .collect();
    let mut det = Ratio::from_integer(1);
    for col in 0..r {
        let Some(piv) = (col..r).find(|&i| m[i][col] != Ratio::from_integer(0)) else {
            return Ratio::from_integer(0);
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for i in col + 1..r {
            let factor = m[i][col] / p;
            for j in col..r {
                let t = m[col][j] * factor;
                m[i][j] -= t;
            }
        }
    }
    let fact: i128 = (1..=r as i128).product();
    (if det < Ratio::from_integer(0) { -det } else { det }) / fact
}

/// `sum_A (-1)^|A| (m - |A|)! V_A` over subsets `A` of the coordinates, where
/// `V_A` is the volume of the face of `conv(0, k_1 e_1, ..., k_m e_m)` avoiding `A`.
pub fn nu_inclusion_exclusion(k: &[u64]) -> Result<Ratio<i128>> {
    let m = k.len();
    if m > 20 {
        return Err(Error::Precondition("at most 20 exponents".into()));
    }
    let mut total = Ratio::from_integer(0);
    for mask in 0u32..(1 << m) {
        let kept: Vec<usize> = (0..m).filter(|i| mask & (1 << i) == 0).collect();
        let r = kept.len();
        let vertices: Vec<Vec<i128>> = kept
            .iter()
            .enumerate()
            .map(|(row, &i)| {
                let mut v = vec![0i128; r];
                v[row] = k[i] as i128;
                v
            })
            .collect();
        let fact: i128 = (1..=r as i128).product();
        let term = simplex_volume(&vertices) * fact;
        if (m - r) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

pub fn nu_closed_form(k: &[u64]) -> i128 {
    k.iter().map(|&x| x as i128 - 1).product()
}

/// Both forms, asserted equal.
pub fn nu_simplex(k: &[u64]) -> Result<i128> {
    if k.contains(&0) {
        return Err(Error::Precondition("exponents must be positive".into()));
    }
    let sum = nu_inclusion_exclusion(k)?;
    let closed = nu_closed_form(k);
    if sum != Ratio::from_integer(closed) {
        return Err(Error::Invariant(format!("inclusion-exclusion gives {sum}, closed form {closed}")));
    }
    Ok(closed)
}

pub fn check_nu(seed: u64) -> CheckRecord {
    let mut rec = CheckRecord::with_rings("nu", vec![]).seed(seed);
    for m in 1..=6 {
        let k = vec![2u64; m];
        match nu_simplex(&k) {
            Ok(v) => rec.push(Measurement::eq(format!("nu(2 x {m})"), v as f64, 1.0, 0.0)),
            Err(e) => return CheckRecord::from_error("nu", vec![], &e),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for _ in 0..100 {
        let m = rng.gen_range(1..=6);
        let k: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=9)).collect();
        let sum = nu_inclusion_exclusion(&k).expect("small tuple");
        if sum != Ratio::from_integer(nu_closed_form(&k)) {
            mismatches += 1;
        }
    }
    rec.push(Measurement::eq("random tuples with sum != closed form", mismatches as f64, 0.0, 0.0));
    rec
}

pub(super) fn suite_gauss(_ctx: &Context) -> Vec<CheckRecord> {
    super::field_roster().into_iter().map(|s| check_gauss(&ring(s))).collect()
}

pub(super) fn suite_intro(_ctx: &Context) -> Vec<CheckRecord> {
    [(3, 2, 2), (3, 2, 4), (5, 2, 3), (7, 3, 4), (3, 3, 5)]
        .into_iter()
        .map(|(p, m, n)| check_intro(p, m, n))
        .collect()
}

pub(super) fn suite_nu(ctx: &Context) -> Vec<CheckRecord> {
    vec![check_nu(ctx.seed)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_examples() {
        for q in [3, 5, 7, 9, 11, 13, 25, 27] {
            let f = ring(&format!("gf({q})"));
            let s = gauss_sum(&f, GaussVariant::Shifted).unwrap();
            assert!((s.norm() - (q as f64).sqrt()).abs() < 1e-9, "q={q}");
        }
        for q in [2, 4, 8, 16] {
            let f = ring(&format!("gf({q})"));
            let s = gauss_sum(&f, GaussVariant::Shifted).unwrap();
            assert!((s - q as f64).norm() < 1e-9);
        }
        assert!(gauss_sum(&ring("zmod(4)"), GaussVariant::Plain).is_err());
    }

    #[test]
    fn plain_gauss_over_f3() {
        // 1 + 2 exp(2 pi i 2/3): modulus sqrt(3)
        let s = gauss_sum(&ring("gf(3)"), GaussVariant::Plain).unwrap();
        let hand = Complex64::new(1.0, 0.0) + 2.0 * Complex64::from_polar(1.0, std::f64::consts::TAU * 2.0 / 3.0);
        assert!((s - hand).norm() < 1e-12);
        assert!((s.norm() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn intro_values() {
        assert!((intro_sum(3, 2, 2).unwrap() - 3.0).norm() < 1e-9);
        assert!((intro_sum(5, 2, 3).unwrap() - 5.0).norm() < 1e-9);
        // nine-term sum by hand: x^4 mod 9 over x = 0..8 is 0,1,7,0,4,4,0,7,1
        let hand: Complex64 = [0u64, 1, 7, 0, 4, 4, 0, 7, 1]
            .iter()
            .map(|&k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 9.0))
            .sum();
        let s = intro_sum(3, 2, 4).unwrap();
        assert!((s - hand).norm() < 1e-12);
        assert!((s - 3.0).norm() < 1e-9);
        assert!(intro_sum(2, 2, 3).is_err());
        assert!(intro_sum(3, 2, 3).is_err());
        assert!(intro_sum(3, 3, 2).is_err());
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu_simplex(&[2, 2, 2]).unwrap(), 1);
        assert_eq!(nu_simplex(&[1, 1]).unwrap(), 0);
        // 3*2 - 2 - 3 + 1
        assert_eq!(nu_inclusion_exclusion(&[3, 2]).unwrap(), Ratio::from_integer(2));
        assert!(nu_simplex(&[0, 2]).is_err());
        assert!(check_nu(1).passed());
    }

    #[test]
    fn simplex_volume_values() {
        assert_eq!(simplex_volume(&[vec![2, 0], vec![0, 3]]), Ratio::from_integer(3));
        assert_eq!(simplex_volume(&[vec![1, 1], vec![2, 2]]), Ratio::from_integer(0));
        assert_eq!(simplex_volume(&[vec![0, 2], vec![2, 0]]), Ratio::from_integer(2));
    }
}
