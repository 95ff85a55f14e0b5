//! Exact relative class numbers `h_p^-` of `Q(zeta_p)`.
//!
//! Two independent routes: the analytic product
//! `h_p^- = 2p prod_{chi odd} (-B_{1,chi} / 2)` evaluated in ball arithmetic
//! and rounded to a certified integer, and the Maillet determinant, which
//! never leaves the integers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{check_odd_prime, mod_pow};
use crate::ball::{Ball, ComplexBall, Dyadic, Mag};
use crate::chars::{root_of_unity, Character, CharacterTable};
use crate::{Error, Result};

/// Largest prime accepted by [`hminus_analytic`].
pub const ANALYTIC_CAP: u64 = 4001;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Maillet,
    Both,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Maillet => "maillet",
            Method::Both => "both",
        }
    }
}

/// Working precision for the analytic product: an initial guess doubled on
/// each certification failure up to `max_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    /// `None` picks `ceil((p/4) log2 p) + 128`.
    pub initial_bits: Option<u32>,
    pub max_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { initial_bits: None, max_bits: 1 << 20 }
    }
}

impl PrecisionPolicy {
    pub fn initial_for(&self, p: u64) -> u32 {
        self.initial_bits.unwrap_or_else(|| {
            let bits = (p as f64 / 4.0) * (p as f64).log2();
            bits.ceil() as u32 + 128
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelativeClassNumberRecord {
    pub p: u64,
    pub h_minus: BigUint,
    pub log_g: Ball,
    /// `log h_minus - log G(p)`.
    pub log_ratio: Ball,
    pub method: Method,
    /// Bits used by the analytic product; 0 for the determinant alone.
    pub precision_bits: u32,
    pub certified: bool,
    /// Distance of the analytic product's midpoint from `h_minus`.
    pub distance: Option<f64>,
}

impl RelativeClassNumberRecord {
    fn new(p: u64, h: BigUint, method: Method, bits: u32, distance: Option<f64>, prec: u32) -> RelativeClassNumberRecord {
        let log_g = g_factor_log(p, prec);
        let log_h = Ball::from_bigint(&BigInt::from(h.clone()), prec + 16).log().with_prec(prec);
        RelativeClassNumberRecord {
            p,
            log_ratio: log_h.sub(&log_g),
            h_minus: h,
            log_g,
            method,
            precision_bits: bits,
            certified: true,
            distance,
        }
    }
}

/// `B_{1,chi} = (1/p) sum_{a=1}^{p-1} a chi(a)` for an odd character.
pub fn b1_chi(chi: &Character, prec: u32) -> Result<ComplexBall> {
    if !chi.is_odd() {
        return Err(Error::InvalidInput(format!("B_1 of the even character j = {}", chi.j)));
    }
    let table = CharacterTable::new(chi.p)?;
    let p = chi.p;
    let n = p - 1;
    let mut acc = ComplexBall::zero(prec + 16);
    for t in 0..n / 2 {
        let c = 2 * table.power(t) as i64 - p as i64;
        let w = root_of_unity((chi.j * t) % n, n, prec + 16);
        acc = acc.add(&w.mul_i64(c));
    }
    let pb = Ball::from_u64(p, prec + 16);
    Ok(ComplexBall::new(acc.re.div(&pb).with_prec(prec), acc.im.div(&pb).with_prec(prec)))
}

/// `log G(p) = log(2p) + ((p-1)/4)(log p - log 4 pi^2)`.
pub fn g_factor_log(p: u64, prec: u32) -> Ball {
    let wp = prec + 32;
    let lp = Ball::from_u64(p, wp).log();
    let four_pi2 = Ball::pi(wp).sqr().mul_2exp(2);
    let main = lp.sub(&four_pi2.log()).mul_i64(p as i64 - 1).mul_2exp(-2);
    Ball::from_u64(2 * p, wp).log().add(&main).with_prec(prec)
}

/// `h_p^-` from the product of Bernoulli numbers, certified as an integer.
pub fn hminus_analytic(p: u64, policy: PrecisionPolicy) -> Result<RelativeClassNumberRecord> {
    check_odd_prime(p)?;
    if p > ANALYTIC_CAP {
        return Err(Error::InvalidInput(format!("p = {p} above the analytic cap {ANALYTIC_CAP}")));
    }
    let table = CharacterTable::new(p)?;
    let mut bits = policy.initial_for(p).min(policy.max_bits);
    loop {
        let prod = bernoulli_product(&table, bits);
        if let Some((h, distance)) = certify(&prod) {
            return Ok(RelativeClassNumberRecord::new(p, h, Method::Analytic, bits, Some(distance), 128));
        }
        if bits >= policy.max_bits {
            return Err(Error::PrecisionExhausted {
                bits,
                detail: format!("h_{p}^- not isolated: {}", prod.re),
            });
        }
        bits = (2 * bits).min(policy.max_bits);
    }
}

/// `2p prod (-B_{1,chi}/2)` over odd characters in ascending `j`.
fn bernoulli_product(table: &CharacterTable, bits: u32) -> ComplexBall {
    let p = table.p();
    let n = p - 1;
    let h = n / 2;
    let w = bits;
    let prec = w;
    // roots by repeated multiplication; the ball radii track the drift
    let step = root_of_unity(1, n, prec);
    let mut roots = Vec::with_capacity(n as usize);
    let mut z = ComplexBall::one(prec);
    for _ in 0..n {
        roots.push(z.clone());
        z = z.mul(&step);
    }
    let unit = Mag::pow2(-i64::from(w));
    let fixed = |b: &Ball| b.mid().to_fixed(i64::from(w));
    let root_fx: Vec<(BigInt, BigInt)> = roots.iter().map(|z| (fixed(&z.re), fixed(&z.im))).collect();
    let e_w = roots.iter().fold(Mag::ZERO, |m, z| m.max(z.re.rad()).max(z.im.rad())).add(unit);
    // -B_{1,chi}/2 = -(1/2p) sum_{t<h} (2 g^t - p) chi(g)^t
    let coef: Vec<i64> = (0..h).map(|t| 2 * table.power(t) as i64 - p as i64).collect();
    let err = e_w.mul_u64(coef.iter().map(|c| c.unsigned_abs()).sum());
    let den = Ball::from_i64(-2 * p as i64, prec);
    let mut factors: Vec<Option<ComplexBall>> = vec![None; n as usize];
    for j in (1..n).step_by(2) {
        let conj = n - j;
        if conj < j {
            factors[j as usize] = factors[conj as usize].as_ref().map(|z| z.conj());
            continue;
        }
        let mut re = BigInt::zero();
        let mut im = BigInt::zero();
        for (t, &c) in coef.iter().enumerate() {
            let (wr, wi) = &root_fx[((j * t as u64) % n) as usize];
            re += wr * c;
            im += wi * c;
        }
        let to_ball = |v: BigInt| Ball::new(Dyadic::new(v, -i64::from(w)), err, prec).div(&den);
        factors[j as usize] = Some(ComplexBall::new(to_ball(re), to_ball(im)));
    }
    let mut prod = ComplexBall::from_real(Ball::from_u64(2 * p, prec));
    for f in factors.iter().flatten() {
        prod = prod.mul(f);
    }
    prod
}

/// The integer enclosed by `z`, if `Im z` contains 0 and `Re z` pins down a
/// single positive integer with radius and midpoint distance below 1/4.
fn certify(z: &ComplexBall) -> Option<(BigUint, f64)> {
    let quarter = Mag::pow2(-2);
    if !z.im.contains_zero() || !z.re.is_finite() || z.re.rad() >= quarter {
        return None;
    }
    let re = z.re.abs();
    let n = re.mid().round_to_integer();
    let diff = Dyadic::from_bigint(&n).sub_exact(re.mid());
    if diff.mag_upper() >= quarter || !re.contains_dyadic(&Dyadic::from_bigint(&n)) || !n.is_positive() {
        return None;
    }
    let h = n.to_biguint()?;
    Some((h, diff.to_f64().abs()))
}

/// `h_p^-` as `|D_p| / p^((p-3)/2)` from the Maillet determinant.
pub fn maillet_hminus(p: u64) -> Result<BigUint> {
    check_odd_prime(p)?;
    let d = maillet_determinant(p)?;
    let pk = BigInt::from(p).pow(((p - 3) / 2) as u32);
    let (q, r) = d.abs().div_rem(&pk);
    if !r.is_zero() {
        return Err(Error::Internal(format!("p^{} does not divide D_{p} = {d}", (p - 3) / 2)));
    }
    q.to_biguint()
        .filter(|q| !q.is_zero())
        .ok_or_else(|| Error::Internal(format!("D_{p} vanished")))
}

/// `det(R(a b^-1 mod p))` for `1 <= a, b <= (p-1)/2`, with `R` the least
/// positive residue.
pub fn maillet_determinant(p: u64) -> Result<BigInt> {
    check_odd_prime(p)?;
    let h = ((p - 1) / 2) as usize;
    let mut m: Vec<Vec<BigInt>> = (1..=h as u64)
        .map(|a| {
            (1..=h as u64)
                .map(|b| BigInt::from((a * mod_pow(b, p - 2, p)) % p))
                .collect()
        })
        .collect();
    Ok(bareiss(&mut m))
}

/// Determinant by fraction-free elimination; every division is exact.
fn bareiss(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Record from either or both methods. With [`Method::Both`] a
/// disagreement is an internal error.
pub fn hminus(p: u64, method: Method, policy: PrecisionPolicy) -> Result<RelativeClassNumberRecord> {
    match method {
        Method::Analytic => hminus_analytic(p, policy),
        Method::Maillet => {
            let h = maillet_hminus(p)?;
            Ok(RelativeClassNumberRecord::new(p, h, Method::Maillet, 0, None, 128))
        }
        Method::Both => {
            let mut rec = hminus_analytic(p, policy)?;
            let h = maillet_hminus(p)?;
            if h != rec.h_minus {
                return Err(Error::Internal(format!(
                    "h_{p}^-: analytic {} but Maillet {h}",
                    rec.h_minus
                )));
            }
            rec.method = Method::Both;
            Ok(rec)
        }
    }
}

/// `log(h_p^- / G(p))` from the certified analytic class number.
pub fn kummer_log_ratio(p: u64, prec: u32) -> Result<Ball> {
    let rec = hminus_analytic(p, PrecisionPolicy::default())?;
    let log_h = Ball::from_bigint(&BigInt::from_biguint(Sign::Plus, rec.h_minus), prec + 16).log();
    Ok(log_h.with_prec(prec).sub(&g_factor_log(p, prec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_primes;
    use proptest::prelude::*;

    fn small(p: u64) -> u64 {
        u64::try_from(&BigInt::from(hminus_analytic(p, PrecisionPolicy::default()).unwrap().h_minus)).unwrap()
    }

    #[test]
    fn bernoulli_hand_computations() {
        let prec = 96;
        let b = b1_chi(&Character::new(3, 1), prec).unwrap();
        assert!(b.overlaps(&ComplexBall::from_real(Ball::from_i64(-1, prec).div_u64(3))));
        // chi(2) = i for p = 5, j = 1
        let b = b1_chi(&Character::new(5, 1), prec).unwrap();
        let want = ComplexBall::new(Ball::from_i64(-3, prec).div_u64(5), Ball::from_i64(-1, prec).div_u64(5));
        assert!(b.overlaps(&want));
        let b3 = b1_chi(&Character::new(5, 3), prec).unwrap();
        assert!(b3.overlaps(&want.conj()));
        assert!(b1_chi(&Character::new(5, 2), prec).is_err());
    }

    #[test]
    fn maillet_small_determinants() {
        assert_eq!(maillet_determinant(5).unwrap(), BigInt::from(-5));
        assert_eq!(maillet_determinant(7).unwrap(), BigInt::from(49));
        assert_eq!(maillet_hminus(23).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn known_class_numbers() {
        for p in [3, 5, 7, 11, 13, 17, 19] {
            assert_eq!(small(p), 1, "p = {p}");
        }
        assert_eq!(small(23), 3);
        assert_eq!(small(29), 8);
        assert_eq!(small(37), 37);
        assert_eq!(small(41), 121);
    }

    #[test]
    fn methods_agree_below_hundred() {
        for p in sieve_primes(100).into_iter().filter(|&p| p > 2) {
            let rec = hminus(p, Method::Both, PrecisionPolicy::default()).unwrap();
            assert!(rec.certified);
            assert!(rec.distance.unwrap() < 1.0 / 256.0, "p = {p}");
        }
    }

    #[test]
    fn precision_doubles_until_certified() {
        let policy = PrecisionPolicy { initial_bits: Some(8), max_bits: 4096 };
        let rec = hminus_analytic(41, policy).unwrap();
        assert_eq!(rec.h_minus, BigUint::from(121u32));
        assert!(rec.precision_bits > 8);
        let stuck = PrecisionPolicy { initial_bits: Some(8), max_bits: 8 };
        assert!(matches!(hminus_analytic(41, stuck), Err(Error::PrecisionExhausted { .. })));
        assert!(matches!(hminus_analytic(9, policy), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn g_factor_values() {
        let prec = 128;
        // G(5) = 50 / (4 pi^2), G(3) = 3 sqrt(3) / pi
        let pi = Ball::pi(prec);
        let g5 = Ball::from_u64(50, prec).div(&pi.sqr().mul_2exp(2)).log();
        assert!(g_factor_log(5, prec).overlaps(&g5));
        let g3 = Ball::from_u64(27, prec).sqrt().div(&pi).log();
        assert!(g_factor_log(3, prec).overlaps(&g3));
        assert!((g_factor_log(5, prec).to_f64() - 0.236269).abs() < 1e-6);
        let lhs = g_factor_log(23, prec).sub(&Ball::from_u64(46, prec).log());
        let rhs = Ball::from_u64(23, prec).div(&pi.sqr().mul_2exp(2)).log().mul_i64(22).mul_2exp(-2);
        assert!(lhs.overlaps(&rhs));
    }

    #[test]
    fn kummer_ratio_small_primes() {
        let prec = 128;
        let r5 = kummer_log_ratio(5, prec).unwrap();
        assert!(r5.overlaps(&g_factor_log(5, prec).neg()));
        let r23 = kummer_log_ratio(23, prec).unwrap();
        let want = Ball::from_u64(3, prec).log().sub(&g_factor_log(23, prec));
        assert!(r23.overlaps(&want));
    }

    #[test]
    fn kummer_ratio_matches_l_values() {
        let prec = 96;
        for p in [7u64, 23] {
            let f = crate::lfunc::odd_log_l_jets(p, &Ball::one(prec), 0, prec).unwrap();
            let sum = f.iter().fold(ComplexBall::zero(prec), |a, (_, l)| a.add(&l[0]));
            let r = kummer_log_ratio(p, prec).unwrap();
            assert!(sum.re.overlaps(&r), "p = {p}: {} vs {}", sum.re, r);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn conjugate_pairs_multiply_to_positive_reals(idx in 0usize..20, k in 0u64..40) {
            let primes: Vec<u64> = sieve_primes(100).into_iter().filter(|&p| p > 2).collect();
            let p = primes[idx % primes.len()];
            let h = (p - 1) / 2;
            let j = 2 * (k % h.div_ceil(2).max(1)) + 1;
            prop_assume!(j < p - 1);
            let a = b1_chi(&Character::new(p, j), 96).unwrap();
            let b = b1_chi(&Character::new(p, p - 1 - j), 96).unwrap();
            let prod = a.mul(&b);
            prop_assert!(prod.im.contains_zero());
            prop_assert!(prod.re.is_positive());
        }
    }
}
