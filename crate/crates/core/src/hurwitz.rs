//! Certified Hurwitz zeta values and `s`-derivatives by Euler–Maclaurin
//! summation.
//!
//! The kernel evaluates the regularized function
//! `zeta*(s, a) = zeta(s, a) - 1/(s - 1)`, which is entire in `s`. With the
//! shift `N` and correction depth `M`,
//!
//! ```text
//! zeta*(s, a) = sum_{n<N} (n+a)^-s + ((N+a)^(1-s) - 1)/(s-1) + (N+a)^-s / 2
//!             + sum_{j=1}^{M} B_2j/(2j)! (s)_(2j-1) (N+a)^(-s-2j+1) + R
//! ```
//!
//! and every piece is expanded as a Taylor jet in `s`. The middle quotient
//! is expanded as a power series in `s - 1`, so `s = 1` needs no special
//! case. The remainder `R` is bounded on a disc of radius 1/2 around `s` and
//! its Taylor coefficients by Cauchy's estimate.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ball::{factorial, Ball, Mag};
use crate::jet::{self, Jet};
use crate::{Error, Result};

/// Shift `N` and correction depth `M` of the Euler–Maclaurin formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmParams {
    pub n: u64,
    pub m: usize,
}

impl EmParams {
    /// `N = max(32, ceil(0.35 prec))`, `M = ceil(0.2 prec)`.
    pub fn for_prec(prec: u32) -> EmParams {
        let prec = u64::from(prec);
        EmParams {
            n: 32.max((35 * prec).div_ceil(100)),
            m: prec.div_ceil(5) as usize,
        }
    }
}

/// `B_2, B_4, ..., B_2n` as exact fractions via tangent numbers.
pub fn bernoulli_even(n: usize) -> Vec<(BigInt, BigInt)> {
    let mut t: Vec<BigInt> = (0..=n).map(|_| BigInt::zero()).collect();
    if n == 0 {
        return Vec::new();
    }
    t[1] = BigInt::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * (k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    (1..=n)
        .map(|k| {
            let four_k = BigInt::one() << (2 * k);
            let mut num = &t[k] * (2 * k);
            if k % 2 == 0 {
                num = -num;
            }
            let den = &four_k * (&four_k - 1u32);
            let g = num_integer::Integer::gcd(&num, &den);
            (num / &g, den / g)
        })
        .collect()
}

/// The `s`-dependent part of the Euler–Maclaurin tail, shared by every
/// evaluation point `X = N + a` at the same `s`.
#[derive(Clone, Debug)]
pub struct EmKernel {
    len: usize,
    prec: u32,
    n: u64,
    u0: Ball,
    // B_2j/(2j)! times the jet of the rising factorial (s + t)_{2j-1}
    em: Vec<Jet>,
    // bound on the Taylor coefficients of R, valid for every X >= N
    remainder: Vec<Mag>,
}

impl EmKernel {
    /// Prepares jets of length `order + 1` at `s` (any real ball with
    /// `s > 1/2`; the pole is removed by the regularization).
    pub fn new(s: &Ball, order: usize, params: EmParams, prec: u32) -> Result<EmKernel> {
        let half = Ball::one(prec).mul_2exp(-1);
        if !s.is_finite() || !half.certainly_lt(s) {
            return Err(Error::Domain {
                what: "hurwitz zeta",
                detail: format!("need s > 1/2, got {s}"),
            });
        }
        let len = order + 1;
        let s = s.with_prec(prec);
        let m = params.m.max(1);
        let bern: Vec<Ball> = bernoulli_even(m)
            .iter()
            .enumerate()
            .map(|(i, (num, den))| {
                let k = 2 * (i as u64 + 1);
                Ball::from_ratio(num, &(den * factorial(k)), prec)
            })
            .collect();
        let mut rising = Vec::with_capacity(m);
        let mut r = jet::constant(Ball::one(prec), len);
        r = jet::mul_linear(&r, &s);
        rising.push(r.clone());
        for j in 2..=m as i64 {
            r = jet::mul_linear(&r, &s.add(&Ball::from_i64(2 * j - 3, prec)));
            r = jet::mul_linear(&r, &s.add(&Ball::from_i64(2 * j - 2, prec)));
            rising.push(r.clone());
        }
        let remainder = remainder_bound(&s, params.n, m, &bernoulli_even(m)[m - 1], len)?;
        Ok(EmKernel {
            len,
            prec,
            n: params.n,
            u0: s.sub(&Ball::one(prec)),
            em: bern.iter().zip(&rising).map(|(b, r)| jet::scale(r, b)).collect(),
            remainder,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Jet of the regularized tail at `X >= N`, given `X`, `log X` and
    /// `X^-s`.
    pub fn tail(&self, x: &Ball, log_x: &Ball, x_neg_s: &Ball) -> Jet {
        let prec = self.prec;
        let len = self.len;
        let e = jet::neg_power(x_neg_s, log_x, len);
        // q(t) = 1/2 + sum_j B_2j/(2j)! X^(1-2j) (s+t)_{2j-1}, Horner in X^-2
        let inv_x = x.recip();
        let inv_x2 = inv_x.sqr();
        let mut q = jet::zero(len, prec);
        for c in self.em.iter().rev() {
            for (qk, ck) in q.iter_mut().zip(c) {
                *qk = qk.mul(&inv_x2).add(ck);
            }
        }
        let mut q = jet::scale(&q, &inv_x);
        q[0] = q[0].add(&Ball::one(prec).mul_2exp(-1));
        let mut out = jet::mul(&q, &e);
        jet::add_assign(&mut out, &self.regularized_quotient(log_x, &x.mul(x_neg_s)));
        for (c, r) in out.iter_mut().zip(&self.remainder) {
            *c = c.add_error(*r);
        }
        out
    }

    /// Jet of `(X^(-u) - 1)/u` at `u = s - 1 + t`. With `z = -u log X` this
    /// is `-L phi(z)`, `phi(z) = (e^z - 1)/z`; the top derivative of `phi`
    /// comes from its power series and the lower ones from
    /// `phi^(k-1) = (e^z - z phi^(k)) / k`.
    fn regularized_quotient(&self, log_x: &Ball, x_one_minus_s: &Ball) -> Jet {
        let prec = self.prec;
        let top = self.len as u64 - 1;
        let minus_l = log_x.neg();
        let z = minus_l.mul(&self.u0);
        // phi^(K)(z) = sum_m z^m / (m! (m + K + 1)); the dropped tail is at
        // most 2 |z|^T / T! once T + 1 >= 2|z|
        let za = z.abs_upper();
        let target = Mag::pow2(-(i64::from(prec) + 4));
        let mut bound = Mag::from_u64(1);
        let mut t = 0u64;
        while !(Mag::from_u64(t + 1) >= za.mul_u64(2) && bound <= target) {
            t += 1;
            bound = bound.mul(za).div(Mag::from_u64(t));
        }
        let mut phi = Ball::zero(prec);
        let mut term = Ball::one(prec);
        for m in 0..t {
            if m > 0 {
                term = term.mul(&z).div_u64(m);
            }
            phi = phi.add(&term.div_u64(m + top + 1));
        }
        let mut phi = phi.add_error(bound.mul_u64(2));
        // derivatives of phi from the top down
        let mut derivs = alloc::vec![Ball::zero(prec); self.len];
        derivs[top as usize] = phi.clone();
        for k in (1..=top).rev() {
            phi = x_one_minus_s.sub(&z.mul(&phi)).div_u64(k);
            derivs[k as usize - 1] = phi.clone();
        }
        // coefficient k is -L (-L)^k phi^(k)(z) / k!
        let mut c = minus_l.clone();
        let mut out = Vec::with_capacity(self.len);
        for (k, d) in derivs.iter().enumerate() {
            if k > 0 {
                c = c.mul(&minus_l).div_u64(k as u64);
            }
            out.push(c.mul(d));
        }
        out
    }
}

/// Cauchy bound for the Taylor coefficients of the remainder:
/// `|B_2M|/(2M)! (s+r)_2M N^(1-s+r-2M) / (s-r+2M-1) / r^k` with `r = 1/2`.
fn remainder_bound(s: &Ball, n: u64, m: usize, b2m: &(BigInt, BigInt), len: usize) -> Result<Vec<Mag>> {
    let prec = 64;
    let r = Ball::one(prec).mul_2exp(-1);
    let s_hi = Ball::exact(s.upper(), prec);
    let s_lo = Ball::exact(s.lower(), prec);
    let two_m = 2 * m as u64;
    let b = Ball::from_ratio(&num_traits::Signed::abs(&b2m.0), &(&b2m.1 * factorial(two_m)), prec);
    let mut rising = Ball::one(prec);
    let base = s_hi.add(&r);
    for i in 0..two_m {
        rising = rising.mul(&base.add(&Ball::from_u64(i, prec)));
    }
    let expo = Ball::one(prec)
        .sub(&s_lo)
        .add(&r)
        .sub(&Ball::from_u64(two_m, prec));
    let decay = expo.mul(&Ball::from_u64(n, prec).log()).exp();
    let den = s_lo.sub(&r).add(&Ball::from_u64(two_m - 1, prec));
    if !den.is_positive() {
        return Err(Error::Domain {
            what: "hurwitz remainder",
            detail: format!("s too small for M = {m}"),
        });
    }
    let bound = b.mul(&rising).mul(&decay).div(&den);
    if !bound.is_finite() {
        return Err(Error::PrecisionExhausted {
            bits: s.prec(),
            detail: "Euler-Maclaurin remainder bound is not finite".into(),
        });
    }
    let base = bound.abs_upper();
    Ok((0..len).map(|k| base.mul_2exp(k as i64)).collect())
}

fn check_a(a: (u64, u64)) -> Result<()> {
    if a.0 == 0 || a.1 == 0 {
        return Err(Error::Domain {
            what: "hurwitz zeta",
            detail: format!("need a > 0, got {}/{}", a.0, a.1),
        });
    }
    Ok(())
}

fn working_prec(s: &Ball, n: u64, order: usize, prec: u32) -> u32 {
    // the series for the regularized quotient has terms up to X^|s-1|
    let spread = (s.to_f64() - 1.0).abs() * (64 - (n + 1).leading_zeros()) as f64;
    prec + 32 + spread.ceil() as u32 + 2 * order as u32
}

/// Taylor jet (length `order + 1`) of `zeta(s, a) - 1/(s - 1)` at `s`, for a
/// positive rational `a = a.0 / a.1`.
pub fn hurwitz_zeta_reg_jet(s: &Ball, a: (u64, u64), order: usize, prec: u32) -> Result<Jet> {
    check_a(a)?;
    let params = EmParams::for_prec(prec);
    let wp = working_prec(s, params.n, order, prec);
    let kernel = EmKernel::new(s, order, params, wp)?;
    let s = s.with_prec(wp);
    let den = Ball::from_u64(a.1, wp);
    let log_den = den.log();
    let mut sum = jet::zero(order + 1, wp);
    let point = |n: u64| -> (Ball, Ball, Ball) {
        let num = n * a.1 + a.0;
        let x = Ball::from_u64(num, wp).div(&den);
        let log_x = Ball::from_u64(num, wp).log().sub(&log_den);
        let x_neg_s = log_x.mul(&s).neg().exp();
        (x, log_x, x_neg_s)
    };
    for n in 0..kernel.n() {
        let (_, log_x, x_neg_s) = point(n);
        jet::add_assign(&mut sum, &jet::neg_power(&x_neg_s, &log_x, order + 1));
    }
    let (x, log_x, x_neg_s) = point(kernel.n());
    jet::add_assign(&mut sum, &kernel.tail(&x, &log_x, &x_neg_s));
    finish(sum, prec)
}

fn finish(jet: Jet, prec: u32) -> Result<Jet> {
    if jet.iter().any(|c| !c.is_finite()) {
        return Err(Error::PrecisionExhausted {
            bits: prec,
            detail: "hurwitz zeta enclosure is not finite".into(),
        });
    }
    Ok(jet.iter().map(|c| c.with_prec(prec)).collect())
}

/// `d^k/ds^k zeta(s, a)` for `k = 0..=order`; `s > 3/4`, `s != 1`.
pub fn hurwitz_zeta_derivs(s: &Ball, a: (u64, u64), order: usize, prec: u32) -> Result<Vec<Ball>> {
    let three_quarters = Ball::from_i64(3, prec).mul_2exp(-2);
    if !three_quarters.certainly_lt(s) {
        return Err(Error::Domain {
            what: "hurwitz zeta",
            detail: format!("need s > 3/4, got {s}"),
        });
    }
    let u = s.sub(&Ball::one(s.prec()));
    if u.contains_zero() {
        return Err(Error::Pole);
    }
    let wp = prec + 32;
    let mut jet = hurwitz_zeta_reg_jet(&s.with_prec(wp), a, order, wp)?;
    // add the jet of 1/(u + t): coefficient k is (-1)^k / u^(k+1)
    let inv = u.with_prec(wp).recip();
    let mut c = inv.clone();
    for (k, x) in jet.iter_mut().enumerate() {
        if k > 0 {
            c = c.mul(&inv).neg();
        }
        *x = x.add(&c);
    }
    let derivs = jet::to_derivatives(&jet);
    finish(derivs, prec)
}

/// Riemann zeta for real `s > 1/2`, `s != 1`, by Borwein's alternating
/// series; independent of the Euler–Maclaurin path.
pub fn riemann_zeta(s: &Ball, prec: u32) -> Result<Ball> {
    let half = Ball::one(prec).mul_2exp(-1);
    if !half.certainly_lt(s) {
        return Err(Error::Domain {
            what: "riemann zeta",
            detail: format!("need s > 1/2, got {s}"),
        });
    }
    let wp = prec + 32;
    let s = s.with_prec(wp);
    let one = Ball::one(wp);
    let factor = one.sub(&Ball::ln2(wp).mul(&one.sub(&s)).exp());
    if factor.contains_zero() {
        return Err(Error::Pole);
    }
    // (3 + sqrt 8)^n >= 2^(2.54 n)
    let n = ((u64::from(wp) + 8) * 100).div_ceil(254);
    // d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d = Vec::with_capacity(n as usize + 1);
    let mut acc = BigInt::zero();
    for i in 0..=n {
        let term = factorial(n + i - 1) * (BigInt::one() << (2 * i)) / (factorial(n - i) * factorial(2 * i));
        acc += term;
        d.push(&acc * n);
    }
    let dn = Ball::from_bigint(&d[n as usize], wp);
    let mut sum = Ball::zero(wp);
    for k in 0..n {
        let w = Ball::from_bigint(&(&d[k as usize] - &d[n as usize]), wp);
        let pow = Ball::from_u64(k + 1, wp).log().mul(&s).neg().exp();
        let term = w.mul(&pow);
        sum = if k % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
    }
    let value = sum.neg().div(&dn.mul(&factor));
    // |error| <= 3 / (3 + sqrt 8)^n / |1 - 2^(1-s)|
    let err = Ball::from_i64(3, wp)
        .mul_2exp(-((254 * n / 100) as i64))
        .div(&factor.abs());
    Ok(value.add_error(err.abs_upper()).with_prec(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = 128;

    fn pi_sq() -> Ball {
        Ball::pi(P + 20).sqr()
    }

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli_even(6);
        let as_pairs: Vec<(i64, i64)> = b
            .iter()
            .map(|(n, d)| (n.try_into().unwrap(), d.try_into().unwrap()))
            .collect();
        assert_eq!(
            as_pairs,
            vec![(1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730)]
        );
    }

    #[test]
    fn zeta_two_at_one_and_half() {
        let two = Ball::from_i64(2, P);
        let z1 = hurwitz_zeta_derivs(&two, (1, 1), 0, P).unwrap();
        assert!(z1[0].contains(&pi_sq().div_u64(6).with_prec(P)) || z1[0].overlaps(&pi_sq().div_u64(6)));
        assert!(z1[0].rad() < Mag::pow2(-(P as i64) / 2));
        assert!((z1[0].to_f64() - 1.644934066848226).abs() < 1e-15);
        let zh = hurwitz_zeta_derivs(&two, (1, 2), 0, P).unwrap();
        assert!(zh[0].overlaps(&pi_sq().mul_2exp(-1)));
        assert!((zh[0].to_f64() - 4.934802200544679).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_riemann_zeta_at_two() {
        // zeta'(2) = -0.93754825431584375370...
        let d = hurwitz_zeta_derivs(&Ball::from_i64(2, P), (1, 1), 2, P).unwrap();
        let expected = Ball::from_decimal("-0.93754825431584375370257409456786497789786", P).unwrap();
        assert!(d[1].overlaps(&expected.add_error(Mag::pow2(-130))));
        // zeta''(2) = 1.98928023429890102342...
        assert!((d[2].to_f64() - 1.98928023429890102342).abs() < 1e-14);
    }

    #[test]
    fn stieltjes_constants_at_the_pole() {
        // zeta*(s, 1) = 1/(s-1) regularized: gamma - gamma_1 (s-1) + ...
        let jet = hurwitz_zeta_reg_jet(&Ball::one(P), (1, 1), 1, P).unwrap();
        let gamma = Ball::from_decimal("0.57721566490153286060651209008240243104215933593992", P).unwrap();
        assert!(jet[0].overlaps(&gamma.add_error(Mag::pow2(-140))));
        // coefficient of (s-1) is -gamma_1 = 0.0728158454836767248605863758...
        assert!((jet[1].to_f64() - 0.07281584548367672486).abs() < 1e-15);
    }

    #[test]
    fn pole_and_domain_errors() {
        assert!(matches!(
            hurwitz_zeta_derivs(&Ball::one(P), (1, 1), 0, P),
            Err(Error::Pole)
        ));
        let low = Ball::from_decimal("0.7", P).unwrap();
        assert!(hurwitz_zeta_derivs(&low, (1, 1), 0, P).is_err());
        assert!(hurwitz_zeta_derivs(&Ball::from_i64(2, P), (0, 1), 0, P).is_err());
    }

    #[test]
    fn agrees_with_borwein() {
        for s in ["1.5", "2", "2.75", "0.8", "1.02"] {
            let s = Ball::from_decimal(s, P).unwrap();
            let a = hurwitz_zeta_derivs(&s, (1, 1), 0, P).unwrap();
            let b = riemann_zeta(&s, P).unwrap();
            assert!(a[0].overlaps(&b), "s = {s}: {} vs {}", a[0], b);
            assert!(a[0].rad() < Mag::pow2(-64));
        }
    }

    #[test]
    fn half_shift_identity() {
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        for s in ["1.25", "3"] {
            let s = Ball::from_decimal(s, P).unwrap();
            let h = hurwitz_zeta_derivs(&s, (1, 2), 0, P).unwrap();
            let z = riemann_zeta(&s, P).unwrap();
            let factor = Ball::ln2(P).mul(&s).exp().sub(&Ball::one(P));
            assert!(h[0].overlaps(&z.mul(&factor)));
        }
    }

    #[test]
    fn recurrence_in_a() {
        let s = Ball::from_decimal("1.7", P).unwrap();
        for (num, den) in [(1u64, 3u64), (2, 7), (5, 5), (3, 4)] {
            let lhs = hurwitz_zeta_derivs(&s, (num, den), 2, P).unwrap();
            let rhs = hurwitz_zeta_derivs(&s, (num + den, den), 2, P).unwrap();
            let a = Ball::from_u64(num, P).div(&Ball::from_u64(den, P));
            let log_a = a.log();
            let pw = log_a.mul(&s).neg().exp();
            // d^k/ds^k a^-s = (-log a)^k a^-s
            let mut extra = pw;
            for k in 0..3 {
                if k > 0 {
                    extra = extra.mul(&log_a).neg();
                }
                assert!(lhs[k].overlaps(&rhs[k].add(&extra)), "a={num}/{den} k={k}");
            }
        }
    }

    #[test]
    fn finite_differences_grid() {
        let h_exp = 20;
        let h = Ball::one(P).mul_2exp(-h_exp);
        let grid = [
            ("1.1", (1, 1)),
            ("1.5", (1, 2)),
            ("2", (1, 3)),
            ("3", (2, 3)),
            ("0.9", (1, 5)),
        ];
        for (s, a) in grid {
            let s = Ball::from_decimal(s, P).unwrap();
            let d = hurwitz_zeta_derivs(&s, a, 3, P).unwrap();
            let plus = hurwitz_zeta_derivs(&s.add(&h), a, 0, P).unwrap();
            let minus = hurwitz_zeta_derivs(&s.sub(&h), a, 0, P).unwrap();
            let fd = plus[0].sub(&minus[0]).div(&h.mul_2exp(1));
            // central difference error is h^2/6 |f'''|, doubled for slack
            let slack = d[3].abs_upper().mul(Mag::pow2(-2 * h_exp)).mul_2exp(-1);
            assert!(fd.add_error(slack).overlaps(&d[1]));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn doubling_precision_stays_consistent(num in 1u64..40, den in 1u64..40, s_milli in 800u64..4000) {
            prop_assume!(s_milli != 1000);
            let s = Ball::from_u64(s_milli, 256).div_u64(1000);
            let lo = hurwitz_zeta_derivs(&s.with_prec(96), (num, den), 1, 96).unwrap();
            let hi = hurwitz_zeta_derivs(&s, (num, den), 1, 192).unwrap();
            prop_assert!(lo[0].overlaps(&hi[0]));
            prop_assert!(lo[1].overlaps(&hi[1]));
        }
    }
}
