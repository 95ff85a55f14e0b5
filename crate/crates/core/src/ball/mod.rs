//! Midpoint–radius ("ball") arithmetic over arbitrary-precision dyadics.
//!
//! A [`Ball`] stands for the closed interval `[mid - rad, mid + rad]`.
//! Every operation returns a ball that contains all results of applying
//! the exact operation to points of the inputs. Midpoints are rounded to
//! the working precision and the rounding error is folded into the radius.

mod complex;
mod dyadic;
mod elementary;
mod mag;

use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use complex::ComplexBall;
pub use dyadic::Dyadic;
pub use mag::Mag;

/// Extra bits used inside the transcendental kernels.
const GUARD: u64 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    mid: Dyadic,
    rad: Mag,
    prec: u32,
}

impl Ball {
    pub fn new(mid: Dyadic, rad: Mag, prec: u32) -> Ball {
        let (mid, err) = mid.round(prec);
        Ball {
            mid,
            rad: rad.add(err),
            prec,
        }
    }

    pub fn exact(mid: Dyadic, prec: u32) -> Ball {
        Ball::new(mid, Mag::ZERO, prec)
    }

    pub fn zero(prec: u32) -> Ball {
        Ball {
            mid: Dyadic::zero(),
            rad: Mag::ZERO,
            prec,
        }
    }

    pub fn one(prec: u32) -> Ball {
        Ball::from_i64(1, prec)
    }

    /// The whole real line.
    pub fn indeterminate(prec: u32) -> Ball {
        Ball {
            mid: Dyadic::zero(),
            rad: Mag::INF,
            prec,
        }
    }

    pub fn from_i64(x: i64, prec: u32) -> Ball {
        Ball::exact(Dyadic::from_i64(x), prec)
    }

    pub fn from_u64(x: u64, prec: u32) -> Ball {
        Ball::exact(Dyadic::new(BigInt::from(x), 0), prec)
    }

    pub fn from_bigint(x: &BigInt, prec: u32) -> Ball {
        Ball::exact(Dyadic::from_bigint(x), prec)
    }

    /// Outward-rounded enclosure of `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Ball {
        Ball::from_bigint(num, prec + 8).div(&Ball::from_bigint(den, prec + 8)).with_prec(prec)
    }

    /// Parses a decimal literal such as `6.4355` or `1e-7` exactly.
    pub fn from_decimal(s: &str, prec: u32) -> Option<Ball> {
        let (num, pow10) = dyadic::parse_decimal(s)?;
        let den = num_traits::pow(BigInt::from(10u8), pow10);
        Some(Ball::from_ratio(&num, &den, prec))
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Same enclosure, re-rounded to a new working precision.
    pub fn with_prec(&self, prec: u32) -> Ball {
        Ball::new(self.mid.clone(), self.rad, prec)
    }

    pub fn add_error(&self, err: Mag) -> Ball {
        Ball {
            mid: self.mid.clone(),
            rad: self.rad.add(err),
            prec: self.prec,
        }
    }

    pub fn is_finite(&self) -> bool {
        !self.rad.is_inf()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Upper bound for every `|x|` in the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid.mag_upper().add(self.rad)
    }

    /// Lower bound for every `|x|` in the ball (zero when it contains 0).
    pub fn abs_lower(&self) -> Mag {
        self.mid.mag_lower().sub_lower(self.rad).unwrap_or(Mag::ZERO)
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub_exact(&Dyadic::from_mag(self.rad))
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add_exact(&Dyadic::from_mag(self.rad))
    }

    pub fn is_positive(&self) -> bool {
        self.is_finite() && self.lower().sign() == Sign::Plus
    }

    pub fn is_negative(&self) -> bool {
        self.is_finite() && self.upper().sign() == Sign::Minus
    }

    pub fn is_nonnegative(&self) -> bool {
        self.is_finite() && self.lower().sign() != Sign::Minus
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// True when every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Ball) -> bool {
        self.is_finite()
            && other.is_finite()
            && self.upper().cmp_value(&other.lower()) != core::cmp::Ordering::Greater
    }

    pub fn certainly_lt(&self, other: &Ball) -> bool {
        self.is_finite()
            && other.is_finite()
            && self.upper().cmp_value(&other.lower()) == core::cmp::Ordering::Less
    }

    /// True when the enclosure of `other` lies inside that of `self`.
    pub fn contains(&self, other: &Ball) -> bool {
        if self.rad.is_inf() {
            return true;
        }
        if other.rad.is_inf() {
            return false;
        }
        let lo_ok = self.lower().cmp_value(&other.lower()) != core::cmp::Ordering::Greater;
        let hi_ok = other.upper().cmp_value(&self.upper()) != core::cmp::Ordering::Greater;
        lo_ok && hi_ok
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        self.contains(&Ball::exact(x.clone(), u32::MAX))
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        if self.rad.is_inf() || other.rad.is_inf() {
            return true;
        }
        let a = self.lower().cmp_value(&other.upper()) != core::cmp::Ordering::Greater;
        let b = other.lower().cmp_value(&self.upper()) != core::cmp::Ordering::Greater;
        a && b
    }

    /// Smallest ball (at this precision) containing both inputs.
    pub fn hull(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        if !self.is_finite() || !other.is_finite() {
            return Ball::indeterminate(prec);
        }
        let lo = {
            let (a, b) = (self.lower(), other.lower());
            if a.cmp_value(&b) == core::cmp::Ordering::Less {
                a
            } else {
                b
            }
        };
        let hi = {
            let (a, b) = (self.upper(), other.upper());
            if a.cmp_value(&b) == core::cmp::Ordering::Greater {
                a
            } else {
                b
            }
        };
        let mid = lo.add_exact(&hi).mul_2exp(-1);
        let half = hi.sub_exact(&lo).mul_2exp(-1);
        Ball::new(mid, half.mag_upper(), prec)
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Ball {
        if self.mid.sign() == Sign::Minus {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        if !self.is_finite() || !other.is_finite() {
            return Ball::indeterminate(prec);
        }
        let rad = self.rad.add(other.rad);
        if self.mid.is_zero() {
            return Ball::new(other.mid.clone(), rad, prec);
        }
        if other.mid.is_zero() {
            return Ball::new(self.mid.clone(), rad, prec);
        }
        let (big, small) = if self.mid.top_exp() >= other.mid.top_exp() {
            (&self.mid, &other.mid)
        } else {
            (&other.mid, &self.mid)
        };
        if small.top_exp() < big.top_exp() - i64::from(prec) - 4 {
            return Ball::new(big.clone(), rad.add(small.mag_upper()), prec);
        }
        Ball::new(self.mid.add_exact(&other.mid), rad, prec)
    }

    pub fn sub(&self, other: &Ball) -> Ball {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        if !self.is_finite() || !other.is_finite() {
            return Ball::indeterminate(prec);
        }
        let rad = self
            .mid
            .mag_upper()
            .mul(other.rad)
            .add(other.mid.mag_upper().mul(self.rad))
            .add(self.rad.mul(other.rad));
        Ball::new(self.mid.mul_exact(&other.mid), rad, prec)
    }

    pub fn sqr(&self) -> Ball {
        self.mul(self)
    }

    pub fn mul_i64(&self, k: i64) -> Ball {
        self.mul(&Ball::from_i64(k, self.prec))
    }

    pub fn mul_2exp(&self, e: i64) -> Ball {
        Ball {
            mid: self.mid.mul_2exp(e),
            rad: self.rad.mul_2exp(e),
            prec: self.prec,
        }
    }

    pub fn div(&self, other: &Ball) -> Ball {
        let prec = self.prec.max(other.prec);
        if !self.is_finite() || !other.is_finite() {
            return Ball::indeterminate(prec);
        }
        let den_lower = match other.mid.mag_lower().sub_lower(other.rad) {
            Some(d) => d,
            None => return Ball::indeterminate(prec),
        };
        if self.mid.is_zero() {
            return Ball::new(Dyadic::zero(), self.rad.div(den_lower), prec);
        }
        let a = self.mid.mantissa();
        let b = other.mid.mantissa();
        let shift = (i64::from(prec) + 2 + b.bits() as i64 - a.bits() as i64).max(0);
        let q = (a << shift as usize) / b;
        let exp = self.mid.exponent() - shift - other.mid.exponent();
        let q = Dyadic::new(q, exp);
        let q_err = Mag::pow2(exp);
        let rad = if self.rad.is_zero() && other.rad.is_zero() {
            q_err
        } else {
            let q_abs = q.mag_upper().add(q_err);
            self.rad.add(q_abs.mul(other.rad)).div(den_lower).add(q_err)
        };
        Ball::new(q, rad, prec)
    }

    pub fn div_u64(&self, k: u64) -> Ball {
        self.div(&Ball::from_u64(k, self.prec))
    }

    pub fn recip(&self) -> Ball {
        Ball::one(self.prec).div(self)
    }

    pub fn pow_u(&self, mut n: u64) -> Ball {
        let mut base = self.clone();
        let mut acc = Ball::one(self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn pi(prec: u32) -> Ball {
        let w = u64::from(prec) + GUARD;
        let (v, err) = elementary::pi_fixed(w);
        fixed_to_ball(v, err, w, prec)
    }

    pub fn ln2(prec: u32) -> Ball {
        let w = u64::from(prec) + GUARD;
        let (v, err) = elementary::ln2_fixed(w);
        fixed_to_ball(v, err, w, prec)
    }

    pub fn exp(&self) -> Ball {
        let prec = self.prec;
        if !self.is_finite() || self.mid.top_exp() > 40 {
            return Ball::indeterminate(prec);
        }
        if self.rad > Mag::pow2(-2) {
            let lo = Ball::exact(self.lower(), prec).exp();
            let hi = Ball::exact(self.upper(), prec).exp();
            return lo.hull(&hi);
        }
        let w = u64::from(prec) + GUARD + self.mid.top_exp().max(0) as u64;
        let x = self.mid.to_fixed(w as i64);
        let (e, n, err) = elementary::exp_fixed(&x, 1, w);
        let val = Dyadic::new(e, n - w as i64);
        let mut rad = Mag::from_u64(err).mul_2exp(n - w as i64);
        if !self.rad.is_zero() {
            // exp(m + t) - exp(m) <= exp(m) * r * (1 + r) for |t| <= r <= 1
            let scale = val.mag_upper().add(rad);
            rad = rad.add(scale.mul(self.rad).mul(Mag::from_u64(1).add(self.rad)));
        }
        Ball::new(val, rad, prec)
    }

    /// Natural logarithm; indeterminate unless the ball is certainly positive.
    pub fn log(&self) -> Ball {
        let prec = self.prec;
        if !self.is_positive() {
            return Ball::indeterminate(prec);
        }
        let man = self.mid.mantissa();
        let b = man.bits() as i64;
        let mut e_total = self.mid.exponent() + b;
        // f = man / 2^b in [1/2, 1); move to [1/sqrt 2, sqrt 2)
        let doubled = (man * man) << 1usize < BigInt::one() << (2 * b) as usize;
        let w = u64::from(prec) + GUARD + 64 - e_total.unsigned_abs().leading_zeros() as u64;
        let mut f_exp = -b;
        if doubled {
            f_exp += 1;
            e_total -= 1;
        }
        let f = Dyadic::new(man.clone(), f_exp).to_fixed(w as i64);
        let (lf, lf_err) = elementary::log_near_one_fixed(&f, w);
        let (ln2, ln2_err) = elementary::ln2_fixed(w);
        let total = lf + &ln2 * e_total;
        let err = lf_err + 2 + ln2_err * e_total.unsigned_abs();
        let mut out = fixed_to_ball(total, err, w, prec);
        if !self.rad.is_zero() {
            let den = self.mid.mag_lower().sub_lower(self.rad).unwrap_or(Mag::ZERO);
            out = out.add_error(self.rad.div(den));
        }
        out
    }

    /// Square root; indeterminate unless the ball is certainly positive
    /// (an exact zero is allowed).
    pub fn sqrt(&self) -> Ball {
        let prec = self.prec;
        if self.mid.is_zero() && self.rad.is_zero() {
            return Ball::zero(prec);
        }
        if !self.is_positive() {
            return Ball::indeterminate(prec);
        }
        let man = self.mid.mantissa();
        let mut shift = (2 * i64::from(prec) + 4 - man.bits() as i64).max(0);
        if (self.mid.exponent() - shift) % 2 != 0 {
            shift += 1;
        }
        let m = man << shift as usize;
        let r = m.sqrt();
        let e = (self.mid.exponent() - shift) / 2;
        let mut rad = Mag::pow2(e);
        if !self.rad.is_zero() {
            let s = self.mid.mag_lower().sqrt_lower();
            rad = rad.add(self.rad.div(s));
        }
        Ball::new(Dyadic::new(r, e), rad, prec)
    }

    pub fn atan(&self) -> Ball {
        let prec = self.prec;
        if !self.is_finite() {
            return Ball::indeterminate(prec);
        }
        let w = u64::from(prec) + GUARD;
        let x = self.mid.to_fixed(w as i64);
        let one = BigInt::one() << w as usize;
        let (v, err) = if x.abs() <= one {
            elementary::atan_small_fixed(&x, w)
        } else {
            // atan(x) = sign(x) pi/2 - atan(1/x)
            let inv = (BigInt::one() << (2 * w) as usize) / &x;
            let (a, a_err) = elementary::atan_small_fixed(&inv, w);
            let (pi, pi_err) = elementary::pi_fixed(w);
            let half_pi = pi >> 1usize;
            let v = if x.is_negative() { -half_pi - a } else { half_pi - a };
            (v, a_err + pi_err + 4)
        };
        fixed_to_ball(v, err + 1, w, prec).add_error(self.rad)
    }

    /// `(cos x, sin x)`.
    pub fn cos_sin(&self) -> (Ball, Ball) {
        let prec = self.prec;
        if !self.is_finite() || self.mid.top_exp() > 40 {
            return (Ball::indeterminate(prec), Ball::indeterminate(prec));
        }
        let mut t = self.clone();
        if self.mid.top_exp() > 1 {
            // reduce modulo 2 pi
            let extra = self.mid.top_exp() as u32 + 8;
            let two_pi = Ball::pi(prec + extra).mul_2exp(1);
            let n = self.with_prec(prec + extra).div(&two_pi).mid().round_to_integer();
            t = self
                .with_prec(prec + extra)
                .sub(&two_pi.mul(&Ball::from_bigint(&n, prec + extra)));
        }
        let w = u64::from(prec) + GUARD;
        let x = t.mid.to_fixed(w as i64);
        let (c, s, err) = elementary::cis_fixed(&x, w);
        let cos = fixed_to_ball(c, err + 1, w, prec).add_error(t.rad);
        let sin = fixed_to_ball(s, err + 1, w, prec).add_error(t.rad);
        (cos, sin)
    }

    /// `self^s` for a positive base.
    pub fn pow(&self, s: &Ball) -> Ball {
        self.log().mul(s).exp()
    }

    /// The unique integer in the ball, if exactly one lies within.
    pub fn unique_integer(&self) -> Option<BigInt> {
        if !self.is_finite() || self.rad >= Mag::pow2(-1) {
            return None;
        }
        let n = self.mid.round_to_integer();
        let ball_n = Ball::from_bigint(&n, self.prec);
        if self.contains(&ball_n) {
            Some(n)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn floor_mid(&self) -> BigInt {
        self.mid.floor()
    }

    /// Midpoint rounded to a number of decimal places, for display.
    pub fn mid_decimal(&self, places: usize) -> alloc::string::String {
        self.mid.to_decimal_places(places)
    }

    pub fn max_upper(&self, other: &Ball) -> Ball {
        if self.certainly_le(other) {
            other.clone()
        } else if other.certainly_le(self) {
            self.clone()
        } else {
            self.hull(other)
        }
    }
}

pub(crate) fn fixed_to_ball(v: BigInt, err_units: u64, w: u64, prec: u32) -> Ball {
    let exp = -(w as i64);
    Ball::new(Dyadic::new(v, exp), Mag::from_u64(err_units).mul_2exp(exp), prec)
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let places = f.precision().unwrap_or(20);
        if !self.is_finite() {
            return write!(f, "[+/- inf]");
        }
        write!(f, "{} +/- {:.3e}", self.mid.to_decimal_places(places), self.rad.to_f64())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Ball> for &Ball {
            type Output = Ball;
            fn $method(self, rhs: &Ball) -> Ball {
                Ball::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball::neg(self)
    }
}

/// Exact `n!` as an integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Rounds a ball's midpoint to an `i64` (display and indexing helpers).
pub fn mid_to_i64(b: &Ball) -> Option<i64> {
    b.mid().round_to_integer().to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = 128;

    fn dec(s: &str) -> Ball {
        Ball::from_decimal(s, 400).unwrap()
    }

    #[test]
    fn pi_and_ln2_contain_reference_digits() {
        let pi = Ball::pi(P);
        let reference = dec("3.14159265358979323846264338327950288419716939937510582097494459");
        assert!(pi.overlaps(&reference));
        assert!(pi.rad() < Mag::pow2(-120));
        let ln2 = Ball::ln2(P);
        assert!(ln2.overlaps(&dec("0.69314718055994530941723212145817656807550013436025525412068")));
    }

    #[test]
    fn exp_log_reference_values() {
        let e = Ball::one(P).exp();
        assert!(e.overlaps(&dec("2.71828182845904523536028747135266249775724709369995957496697")));
        let l10 = Ball::from_i64(10, P).log();
        assert!(l10.overlaps(&dec("2.30258509299404568401799145468436420760110148862877297603333")));
        let em = Ball::from_i64(-50, P).exp();
        assert!(em.overlaps(&dec("1.92874984796392e-22").add_error(Mag::pow2(-110))));
        assert!(em.rad() < Mag::pow2(-190));
    }

    #[test]
    fn trig_reference_values() {
        let (c, s) = Ball::from_i64(1, P).cos_sin();
        assert!(c.overlaps(&dec("0.54030230586813971740093660744297660373231042061792222767010")));
        assert!(s.overlaps(&dec("0.84147098480789650665250232163029899962256306079837106567275")));
        let (c, s) = Ball::from_i64(100, P).cos_sin();
        assert!(c.overlaps(&dec("0.86231887228768393410193851395084253551008400853551")));
        assert!(s.overlaps(&dec("-0.50636564110975879365655761045978543206503272129065")));
        let a = Ball::from_i64(3, P).atan();
        assert!(a.overlaps(&dec("1.24904577239825442582991707728109012307782940412989")));
    }

    #[test]
    fn sqrt_and_division() {
        let s = Ball::from_i64(2, P).sqrt();
        assert!(s.overlaps(&dec("1.41421356237309504880168872420969807856967187537694807317668")));
        let third = Ball::one(P).div(&Ball::from_i64(3, P));
        assert!(third.mul_i64(3).contains(&Ball::one(P)));
        assert!(!Ball::one(P).div(&Ball::zero(P)).is_finite());
    }

    #[test]
    fn far_apart_addition_stays_cheap() {
        let big = Ball::from_i64(1, P).mul_2exp(10_000);
        let tiny = Ball::from_i64(1, P).mul_2exp(-10_000);
        let s = big.add(&tiny);
        assert!(s.contains(&big));
        assert!(s.mid().bits() <= u64::from(P));
    }

    #[test]
    fn unique_integer_gate() {
        let b = Ball::from_decimal("41.9999999", P).unwrap();
        assert_eq!(b.unique_integer(), None);
        let c = Ball::new(Dyadic::from_i64(7), Mag::pow2(-10), P);
        assert_eq!(c.unique_integer(), Some(BigInt::from(7)));
    }

    fn small_ball() -> impl Strategy<Value = (i64, i64, u32)> {
        (-1_000_000i64..1_000_000, 1i64..1_000_000, 0u32..20)
    }

    proptest! {
        #[test]
        fn arithmetic_encloses_f64_reference((a, b, r) in small_ball()) {
            let x = Ball::new(Dyadic::from_i64(a), Mag::pow2(-(i64::from(r)) - 5), P);
            let y = Ball::from_i64(b, P);
            let sum = x.add(&y);
            let prod = x.mul(&y);
            let quot = x.div(&y);
            prop_assert!(sum.contains(&Ball::from_i64(a + b, P)));
            prop_assert!(prod.contains(&Ball::from_i64(a * b, P)));
            prop_assert!(quot.mul(&y).contains(&Ball::from_i64(a, P)));
        }

        #[test]
        fn exp_log_round_trip(n in 1u64..1_000_000_000u64, d in 1u64..1000u64) {
            let x = Ball::from_ratio(&BigInt::from(n), &BigInt::from(d), P);
            let y = x.log().exp();
            prop_assert!(y.overlaps(&x));
            prop_assert!(y.rad() < x.abs_upper().mul(Mag::pow2(-100)));
        }

        #[test]
        fn precision_doubling_stays_consistent(n in 2u64..100_000u64) {
            let lo = Ball::from_u64(n, 96).log();
            let hi = Ball::from_u64(n, 192).log();
            prop_assert!(lo.overlaps(&hi));
            prop_assert!(lo.contains(&hi));
        }

        #[test]
        fn cos_sin_pythagoras(n in -100_000i64..100_000i64) {
            let x = Ball::from_ratio(&BigInt::from(n), &BigInt::from(1000), P);
            let (c, s) = x.cos_sin();
            let one = c.sqr().add(&s.sqr());
            prop_assert!(one.contains(&Ball::one(P)));
        }
    }
}
