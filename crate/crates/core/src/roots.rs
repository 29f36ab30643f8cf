//! Characteristic polynomials of exact matrices and extraction of their
//! Gaussian-rational roots. Roots are found by the rational-root theorem in
//! the Euclidean domain Z[i] (divisor enumeration of the extreme
//! coefficients), which is complete for roots lying in Q(i).

use crate::rat::GaussianRational;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

// ---------------------------------------------------------------------------
// Gaussian integers
// ---------------------------------------------------------------------------

type Gint = (BigInt, BigInt);

fn g_is_zero(a: &Gint) -> bool {
    a.0.is_zero() && a.1.is_zero()
}

fn g_mul(a: &Gint, b: &Gint) -> Gint {
    (
        &a.0 * &b.0 - &a.1 * &b.1,
        &a.0 * &b.1 + &a.1 * &b.0,
    )
}

fn g_sub(a: &Gint, b: &Gint) -> Gint {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn g_conj(a: &Gint) -> Gint {
    (a.0.clone(), -&a.1)
}

fn g_norm(a: &Gint) -> BigInt {
    &a.0 * &a.0 + &a.1 * &a.1
}

fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    BigRational::new(n.clone(), d.clone()).round().to_integer()
}

/// Euclidean division: remainder has norm strictly below the divisor's.
fn g_divmod(a: &Gint, b: &Gint) -> (Gint, Gint) {
    let nb = g_norm(b);
    let num = g_mul(a, &g_conj(b));
    let q = (round_div(&num.0, &nb), round_div(&num.1, &nb));
    let r = g_sub(a, &g_mul(&q, b));
    (q, r)
}

fn g_divides(d: &Gint, a: &Gint) -> Option<Gint> {
    let (q, r) = g_divmod(a, d);
    if g_is_zero(&r) {
        Some(q)
    } else {
        None
    }
}

fn g_gcd(a: &Gint, b: &Gint) -> Gint {
    let mut x = a.clone();
    let mut y = b.clone();
    while !g_is_zero(&y) {
        let (_, r) = g_divmod(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn trial_factor(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1u32;
    }
    if n > BigUint::one() {
        out.push((n, 1));
    }
    out
}

/// A Gaussian prime above the rational prime p (up to units).
fn gaussian_prime_above(p: &BigUint) -> Gint {
    let pi: BigInt = BigInt::from(p.clone());
    if *p == BigUint::from(2u32) {
        return (BigInt::one(), BigInt::one());
    }
    if (p % 4u32) == BigUint::from(3u32) {
        return (pi, BigInt::zero());
    }
    // p = 1 mod 4: find a square root of -1 mod p, then gcd(p, x + i)
    let exp = (p - 1u32) / 4u32;
    let mut a = BigUint::from(2u32);
    loop {
        let x = a.modpow(&exp, p);
        let sq = (&x * &x) % p;
        if sq == p - 1u32 {
            return g_gcd(&(pi, BigInt::zero()), &(BigInt::from(x), BigInt::one()));
        }
        a += 1u32;
    }
}

/// Factor a nonzero Gaussian integer into primes (up to units).
fn g_factor(a: &Gint) -> Vec<(Gint, u32)> {
    let mut rest = a.clone();
    let mut out = Vec::new();
    let norm = g_norm(a).to_biguint().expect("norm is nonnegative");
    for (p, _) in trial_factor(&norm) {
        for pi in [gaussian_prime_above(&p)]
            .into_iter()
            .flat_map(|q| [g_conj(&q), q])
        {
            let mut e = 0;
            while let Some(q) = g_divides(&pi, &rest) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                // merge conjugate-associate duplicates (e.g. above p = 2)
                match out.iter_mut().find(|(q, _)| {
                    g_divides(&pi, q).is_some() && g_divides(q, &pi).is_some()
                }) {
                    Some((_, old)) => *old += e,
                    None => out.push((pi.clone(), e)),
                }
            }
        }
    }
    debug_assert!(g_norm(&rest).is_one(), "leftover unit expected");
    out
}

/// All divisors of a nonzero Gaussian integer, up to units.
fn g_divisors(a: &Gint) -> Vec<Gint> {
    let factors = g_factor(a);
    let mut out = vec![(BigInt::one(), BigInt::zero())];
    for (p, e) in factors {
        let mut next = Vec::new();
        for d in &out {
            let mut power = d.clone();
            next.push(power.clone());
            for _ in 0..e {
                power = g_mul(&power, &p);
                next.push(power.clone());
            }
        }
        out = next;
    }
    out
}

// ---------------------------------------------------------------------------
// Characteristic polynomial and roots
// ---------------------------------------------------------------------------

/// Monic characteristic polynomial of a square matrix, coefficients returned
/// in ascending degree (c[0] + c[1] t + ... + t^n), by Faddeev-LeVerrier.
pub fn char_poly(m: &[Vec<GaussianRational>]) -> Vec<GaussianRational> {
    let n = m.len();
    let mut coeffs = vec![GaussianRational::zero(); n + 1];
    coeffs[n] = GaussianRational::one();
    let mut work: Vec<Vec<GaussianRational>> =
        vec![vec![GaussianRational::zero(); n]; n];
    for (i, row) in work.iter_mut().enumerate() {
        row[i] = GaussianRational::one();
    }
    let mut c_prev = GaussianRational::one();
    for k in 1..=n {
        // work <- m * (work + c_prev * I) for k > 1; for k = 1, work = m
        if k > 1 {
            for (i, row) in work.iter_mut().enumerate() {
                row[i] += &c_prev;
            }
        }
        let mut prod = vec![vec![GaussianRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = GaussianRational::zero();
                for (l, w) in work.iter().enumerate() {
                    s += &(&m[i][l] * &w[j]);
                }
                prod[i][j] = s;
            }
        }
        work = prod;
        let mut tr = GaussianRational::zero();
        for (i, row) in work.iter().enumerate() {
            tr += &row[i];
        }
        let ck = &(-&tr) / &GaussianRational::from_int(k as i64);
        coeffs[n - k] = ck.clone();
        c_prev = ck;
    }
    coeffs
}

fn horner(coeffs: &[GaussianRational], at: &GaussianRational) -> GaussianRational {
    let mut acc = GaussianRational::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * at) + c;
    }
    acc
}

/// Divide by (t - r), assuming r is a root; returns the quotient.
fn deflate(coeffs: &[GaussianRational], r: &GaussianRational) -> Vec<GaussianRational> {
    let n = coeffs.len() - 1;
    let mut q = vec![GaussianRational::zero(); n];
    let mut carry = GaussianRational::zero();
    for k in (0..n).rev() {
        carry = &coeffs[k + 1] + &(&carry * r);
        q[k] = carry.clone();
    }
    debug_assert!((&coeffs[0] + &(&carry * r)).is_zero());
    q
}

fn denominator_lcm(coeffs: &[GaussianRational]) -> BigInt {
    let mut l = BigInt::one();
    for c in coeffs {
        l = l.lcm(c.re.denom());
        l = l.lcm(c.im.denom());
    }
    l
}

/// All roots in Q(i) of the polynomial with the given ascending coefficients,
/// with multiplicity, sorted. Irrational or non-Gaussian roots are omitted.
pub fn gaussian_roots(coeffs: &[GaussianRational]) -> Vec<GaussianRational> {
    let mut cs: Vec<GaussianRational> = coeffs.to_vec();
    while cs.last().map(|c| c.is_zero()).unwrap_or(false) {
        cs.pop();
    }
    if cs.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    while cs.len() > 1 && cs[0].is_zero() {
        roots.push(GaussianRational::zero());
        cs.remove(0);
    }
    if cs.len() > 1 {
        let scale = denominator_lcm(&cs);
        let to_gint = |c: &GaussianRational| -> Gint {
            let re = &c.re * BigRational::from_integer(scale.clone());
            let im = &c.im * BigRational::from_integer(scale.clone());
            debug_assert!(re.is_integer() && im.is_integer());
            (re.to_integer(), im.to_integer())
        };
        let a0 = to_gint(&cs[0]);
        let an = to_gint(cs.last().expect("nonempty"));
        let units = [
            GaussianRational::one(),
            -&GaussianRational::one(),
            GaussianRational::i(),
            -&GaussianRational::i(),
        ];
        let mut candidates: BTreeSet<GaussianRational> = BTreeSet::new();
        for p in g_divisors(&a0) {
            for q in g_divisors(&an) {
                let num = GaussianRational::new(
                    BigRational::from_integer(p.0.clone()),
                    BigRational::from_integer(p.1.clone()),
                );
                let den = GaussianRational::new(
                    BigRational::from_integer(q.0.clone()),
                    BigRational::from_integer(q.1.clone()),
                );
                let base = &num / &den;
                for u in &units {
                    candidates.insert(&base * u);
                }
            }
        }
        for cand in candidates {
            while cs.len() > 1 && horner(&cs, &cand).is_zero() {
                roots.push(cand.clone());
                cs = deflate(&cs, &cand);
            }
        }
    }
    roots.sort();
    roots
}

/// Gaussian-rational eigenvalues of a matrix, with multiplicity.
pub fn eigenvalues(m: &[Vec<GaussianRational>]) -> Vec<GaussianRational> {
    gaussian_roots(&char_poly(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::GaussianRational as G;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<G>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| G::from_int(v)).collect())
            .collect()
    }

    #[test]
    fn char_poly_of_rotation() {
        // [[0, 1], [-1, 0]] has t^2 + 1
        let p = char_poly(&mat(&[&[0, 1], &[-1, 0]]));
        assert_eq!(p, vec![G::one(), G::zero(), G::one()]);
        assert_eq!(eigenvalues(&mat(&[&[0, 1], &[-1, 0]])), vec![-&G::i(), G::i()]);
    }

    #[test]
    fn repeated_eigenvalue() {
        let e = eigenvalues(&mat(&[&[1, 1], &[0, 1]]));
        assert_eq!(e, vec![G::one(), G::one()]);
    }

    #[test]
    fn irrational_spectrum_is_omitted() {
        // t^2 - 2: no Gaussian-rational roots
        assert!(eigenvalues(&mat(&[&[0, 2], &[1, 0]])).is_empty());
    }

    #[test]
    fn fractional_and_imaginary_roots() {
        // (t - 1/2)(t - i) = t^2 - (1/2 + i) t + i/2
        let coeffs = vec![
            &G::i() * &G::from_ratio(1, 2),
            -&(&G::from_ratio(1, 2) + &G::i()),
            G::one(),
        ];
        let r = gaussian_roots(&coeffs);
        assert_eq!(r, vec![G::i(), G::from_ratio(1, 2)]);
    }

    #[test]
    fn zero_roots_and_deflation() {
        // t^3 - t^2 = t^2 (t - 1)
        let coeffs = vec![G::zero(), G::zero(), -&G::one(), G::one()];
        let r = gaussian_roots(&coeffs);
        assert_eq!(r, vec![G::zero(), G::zero(), G::one()]);
    }

    #[test]
    fn complex_integer_eigenvalue() {
        let m = vec![
            vec![G::from_parts(3, 1, 2, 1), G::zero()],
            vec![G::zero(), G::from_int(-1)],
        ];
        let e = eigenvalues(&m);
        assert_eq!(e, vec![G::from_int(-1), G::from_parts(3, 1, 2, 1)]);
    }
}
