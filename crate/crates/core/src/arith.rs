//! Primes, prime powers in the residue classes `±1 mod p`, and the
//! weighted prime-power sums `Π(x, p, a) = Σ 1/(m q^m)` over `q^m <= x`,
//! `q^m ≡ a (mod p)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ball::Ball;
use crate::{Error, Result};

/// Ascending primes up to and including `limit` (empty below 2).
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    PrimeSieve::new(limit).primes().collect()
}

/// Odd-only sieve of Eratosthenes with constant-time primality lookups.
#[derive(Clone, Debug)]
pub struct PrimeSieve {
    limit: u64,
    // bit i set <=> 2i + 1 is composite
    composite: Vec<u64>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> PrimeSieve {
        let n_odd = (limit / 2 + 1) as usize;
        let mut composite = vec![0u64; n_odd.div_ceil(64)];
        composite[0] |= 1; // 1 is not prime
        let mut i = 1usize;
        loop {
            let q = 2 * i as u64 + 1;
            if q.saturating_mul(q) > limit {
                break;
            }
            if composite[i / 64] >> (i % 64) & 1 == 0 {
                let mut j = (q * q / 2) as usize;
                while j < n_odd {
                    composite[j / 64] |= 1 << (j % 64);
                    j += q as usize;
                }
            }
            i += 1;
        }
        PrimeSieve { limit, composite }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} beyond sieve limit {}", self.limit);
        if n < 2 {
            return false;
        }
        if n % 2 == 0 {
            return n == 2;
        }
        let i = (n / 2) as usize;
        self.composite[i / 64] >> (i % 64) & 1 == 0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let two = if self.limit >= 2 { Some(2) } else { None };
        two.into_iter().chain(
            (1..=(self.limit.saturating_sub(1) / 2))
                .map(|i| 2 * i + 1)
                .filter(move |&n| self.is_prime(n)),
        )
    }

    /// Prime powers `q^m <= x` with `q^m ≡ class (mod p)`, ascending.
    pub fn prime_powers_in_class(&self, p: u64, class: Residue, x: u64) -> Result<Vec<PrimePower>> {
        check_odd_prime(p)?;
        if x > self.limit {
            return Err(Error::InvalidInput(format!(
                "cutoff {x} exceeds sieve limit {}",
                self.limit
            )));
        }
        let r = class.residue(p);
        let mut out = Vec::new();
        // first powers: walk the progression r, r + p, r + 2p, ...
        let mut n = r;
        while n <= x {
            if self.is_prime(n) {
                out.push(PrimePower { q: n, m: 1, value: n });
            }
            n += p;
        }
        // higher powers come from primes up to sqrt(x)
        let mut q = 2u64;
        while q.saturating_mul(q) <= x {
            if self.is_prime(q) && q != p {
                let mut value = q * q;
                let mut m = 2u32;
                loop {
                    if value % p == r {
                        out.push(PrimePower { q, m, value });
                    }
                    match value.checked_mul(q) {
                        Some(v) if v <= x => {
                            value = v;
                            m += 1;
                        }
                        _ => break,
                    }
                }
            }
            q += 1;
        }
        out.sort_unstable_by_key(|pp| pp.value);
        Ok(out)
    }

    pub fn pi_sum(&self, p: u64, class: Residue, x: u64) -> Result<PiSum> {
        let powers = self.prime_powers_in_class(p, class, x)?;
        Ok(PiSum {
            p,
            class,
            x,
            terms: powers.len(),
            value: exact_weight_sum(&powers),
        })
    }
}

/// Segmented sieve over `[lo, hi]`, independent of [`PrimeSieve`].
pub fn segmented_primes(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let mut root = integer_sqrt(hi);
    while (root + 1) * (root + 1) <= hi {
        root += 1;
    }
    let base = sieve_primes(root);
    const SEGMENT: u64 = 1 << 16;
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = (start + SEGMENT - 1).min(hi);
        let mut marks = vec![true; (end - start + 1) as usize];
        for &q in &base {
            let first = (start.div_ceil(q) * q).max(q * q);
            let mut k = first;
            while k <= end {
                marks[(k - start) as usize] = false;
                k += q;
            }
        }
        out.extend(
            marks
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| start + i as u64),
        );
        start = end + 1;
    }
    out
}

fn integer_sqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = n;
    let mut y = x.div_ceil(2);
    while y < x {
        x = y;
        y = (x + n / x) / 2;
    }
    x
}

pub fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = u128::from(modulus);
    let mut acc: u128 = 1 % m;
    let mut b = u128::from(base % modulus);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (u128::from(x) * u128::from(x) % u128::from(n)) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn check_odd_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest primitive root modulo an odd prime.
pub fn primitive_root(p: u64) -> Result<u64> {
    check_odd_prime(p)?;
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&f| mod_pow(g, (p - 1) / f, p) != 1))
        .ok_or_else(|| Error::Internal(format!("no primitive root found mod {p}")))
}

/// The residue class `+1` or `-1` modulo `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Residue {
    Plus,
    Minus,
}

impl Residue {
    pub fn residue(self, p: u64) -> u64 {
        match self {
            Residue::Plus => 1,
            Residue::Minus => p - 1,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Residue::Plus => 1,
            Residue::Minus => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub q: u64,
    pub m: u32,
    pub value: u64,
}

/// `Π(x, p, a)` as an exact rational together with the number of prime
/// powers that contributed.
#[derive(Clone, Debug, PartialEq)]
pub struct PiSum {
    pub p: u64,
    pub class: Residue,
    pub x: u64,
    pub value: BigRational,
    pub terms: usize,
}

impl PiSum {
    /// Outward-rounded enclosure of the exact value.
    pub fn to_ball(&self, prec: u32) -> Ball {
        Ball::from_ratio(self.value.numer(), self.value.denom(), prec)
    }
}

/// Prime powers `q^m <= x`, `q^m ≡ class (mod p)`, using a fresh sieve.
pub fn prime_powers_in_class(p: u64, class: Residue, x: u64) -> Result<Vec<PrimePower>> {
    check_odd_prime(p)?;
    PrimeSieve::new(x).prime_powers_in_class(p, class, x)
}

pub fn pi_sum(p: u64, class: Residue, x: u64) -> Result<PiSum> {
    check_odd_prime(p)?;
    PrimeSieve::new(x).pi_sum(p, class, x)
}

/// `Σ 1/(m q^m)` exactly, combining fractions pairwise without gcds and
/// reducing once at the end.
pub fn exact_weight_sum(powers: &[PrimePower]) -> BigRational {
    fn split(terms: &[(BigInt, BigInt)]) -> (BigInt, BigInt) {
        match terms.len() {
            0 => (BigInt::zero(), BigInt::one()),
            1 => terms[0].clone(),
            n => {
                let (a, b) = split(&terms[..n / 2]);
                let (c, d) = split(&terms[n / 2..]);
                (a * &d + c * &b, b * d)
            }
        }
    }
    let fractions: Vec<(BigInt, BigInt)> = powers
        .iter()
        .map(|pp| (BigInt::one(), BigInt::from(pp.value) * pp.m))
        .collect();
    let (num, den) = split(&fractions);
    BigRational::new(num, den)
}

/// The Brun–Titchmarsh-type bound `2x / ((p - 1) log(x / p))` for prime
/// powers; defined for `x > p`.
pub fn bt_bound(p: u64, x: &Ball) -> Result<Ball> {
    let prec = x.prec();
    let pb = Ball::from_u64(p, prec);
    if !pb.certainly_lt(x) {
        return Err(Error::Domain {
            what: "bt_bound",
            detail: format!("need x > p = {p}"),
        });
    }
    let log_ratio = x.div(&pb).log();
    Ok(x.mul_2exp(1).div(&Ball::from_u64(p - 1, prec).mul(&log_ratio)))
}

/// The Montgomery–Vaughan form `2x / ((p - 1)(log(x / p) + 5/6))`, reported
/// next to [`bt_bound`] for comparison only.
pub fn mv_bound(p: u64, x: &Ball) -> Result<Ball> {
    let prec = x.prec();
    let pb = Ball::from_u64(p, prec);
    if !pb.certainly_lt(x) {
        return Err(Error::Domain {
            what: "mv_bound",
            detail: format!("need x > p = {p}"),
        });
    }
    let five_sixths = Ball::from_i64(5, prec).div_u64(6);
    let den = Ball::from_u64(p - 1, prec).mul(&x.div(&pb).log().add(&five_sixths));
    Ok(x.mul_2exp(1).div(&den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn values(v: &[PrimePower]) -> Vec<u64> {
        v.iter().map(|pp| pp.value).collect()
    }

    #[test]
    fn first_primes_and_boundaries() {
        assert_eq!(sieve_primes(10), vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2), vec![2]);
        assert!(sieve_primes(1).is_empty());
        assert!(sieve_primes(0).is_empty());
    }

    #[test]
    fn sieve_agrees_with_segmented_and_trial_division() {
        let a = sieve_primes(20_000);
        let b = segmented_primes(0, 20_000);
        let c: Vec<u64> = (0..=20_000u64).filter(|&n| is_prime(n)).collect();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(segmented_primes(9001, 9100), a.iter().copied().filter(|&q| (9001..=9100).contains(&q)).collect::<Vec<_>>());
    }

    #[test]
    fn primitive_roots_by_brute_force() {
        fn brute(p: u64) -> u64 {
            (2..p)
                .find(|&g| {
                    let mut x = 1;
                    let mut order = 0;
                    loop {
                        x = x * g % p;
                        order += 1;
                        if x == 1 {
                            break;
                        }
                    }
                    order == p - 1
                })
                .unwrap()
        }
        assert_eq!(primitive_root(5).unwrap(), 2);
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(23).unwrap(), 5);
        for p in sieve_primes(500).into_iter().skip(1) {
            assert_eq!(primitive_root(p).unwrap(), brute(p), "p = {p}");
        }
        assert!(primitive_root(9).is_err());
        assert!(primitive_root(2).is_err());
    }

    #[test]
    fn prime_powers_mod_five() {
        let plus = prime_powers_in_class(5, Residue::Plus, 50).unwrap();
        assert_eq!(values(&plus), vec![11, 16, 31, 41]);
        assert_eq!(plus[1], PrimePower { q: 2, m: 4, value: 16 });
        assert!(prime_powers_in_class(5, Residue::Plus, 10).unwrap().is_empty());
        let minus = prime_powers_in_class(5, Residue::Minus, 50).unwrap();
        assert_eq!(values(&minus), vec![4, 9, 19, 29, 49]);
        let squares: Vec<u64> = minus.iter().filter(|pp| pp.m == 2).map(|pp| pp.value).collect();
        assert_eq!(squares, vec![4, 9, 49]);
        assert!(prime_powers_in_class(9, Residue::Plus, 50).is_err());
    }

    #[test]
    fn pi_sums_mod_five() {
        let plus = pi_sum(5, Residue::Plus, 50).unwrap();
        let expected = BigRational::new(1.into(), 11.into())
            + BigRational::new(1.into(), 64.into())
            + BigRational::new(1.into(), 31.into())
            + BigRational::new(1.into(), 41.into());
        assert_eq!(plus.value, expected);
        assert_eq!(plus.terms, 4);
        assert!((plus.value.to_f64().unwrap() - 0.163182).abs() < 5e-7);
        assert!(pi_sum(5, Residue::Plus, 10).unwrap().value.is_zero());
        let minus = pi_sum(5, Residue::Minus, 50).unwrap();
        let expected = [8u64, 18, 19, 29, 98]
            .iter()
            .map(|&d| BigRational::new(1.into(), d.into()))
            .fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(minus.value, expected);
        assert!((minus.value.to_f64().unwrap() - 0.277874).abs() < 5e-7);
    }

    #[test]
    fn bt_bound_values() {
        let prec = 128;
        let x = Ball::from_u64(503 * 503, prec);
        let b = bt_bound(503, &x).unwrap();
        assert!((b.to_f64() - 162.043143254940).abs() < 1e-9);
        let b2 = bt_bound(503, &Ball::from_u64(1006, prec)).unwrap();
        assert!((b2.to_f64() - 5.782275741570905).abs() < 1e-12);
        assert!(bt_bound(503, &Ball::from_u64(503, prec)).is_err());
        assert!(bt_bound(503, &Ball::from_u64(100, prec)).is_err());
    }

    #[test]
    fn bt_bound_diverges_toward_p() {
        let prec = 128;
        let mut last = bt_bound(503, &Ball::from_u64(1006, prec)).unwrap();
        for k in 1..12 {
            let x = Ball::from_u64(503, prec).add(&Ball::one(prec).mul_2exp(-2 * k));
            let b = bt_bound(503, &x).unwrap();
            assert!(last.certainly_lt(&b));
            last = b;
        }
        assert!(last.to_f64() > 1e7);
    }
}
