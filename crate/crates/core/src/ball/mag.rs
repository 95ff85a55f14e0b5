//! Nonnegative magnitudes with a short mantissa, used for ball radii.
//!
//! A `Mag` is `man * 2^exp` with a 30-bit normalized mantissa. Every
//! operation has an explicit rounding direction so that radii are always
//! upper bounds (or, for the `*_lower` variants, lower bounds).

use core::cmp::Ordering;

const BITS: u32 = 30;
const TOP: u64 = 1 << (BITS - 1);
const LIMIT: u64 = 1 << BITS;
const INF_EXP: i64 = i64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub const ZERO: Mag = Mag { man: 0, exp: 0 };
    pub const INF: Mag = Mag { man: TOP, exp: INF_EXP };

    fn normalize(man: u128, exp: i64, up: bool) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        let bits = 128 - man.leading_zeros();
        if bits > BITS {
            let shift = bits - BITS;
            let mut m = (man >> shift) as u64;
            if up && (u128::from(m) << shift) != man {
                m += 1;
            }
            let mut e = exp + i64::from(shift);
            if m == LIMIT {
                m = TOP;
                e += 1;
            }
            Mag { man: m, exp: e }
        } else {
            let shift = BITS - bits;
            Mag {
                man: (man << shift) as u64,
                exp: exp - i64::from(shift),
            }
        }
    }

    pub fn from_parts_up(man: u128, exp: i64) -> Mag {
        Mag::normalize(man, exp, true)
    }

    pub fn from_parts_lower(man: u128, exp: i64) -> Mag {
        Mag::normalize(man, exp, false)
    }

    /// Exactly `2^e`.
    pub fn pow2(e: i64) -> Mag {
        Mag {
            man: TOP,
            exp: e - i64::from(BITS - 1),
        }
    }

    pub fn from_u64(x: u64) -> Mag {
        Mag::from_parts_up(u128::from(x), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    pub fn is_inf(&self) -> bool {
        self.exp == INF_EXP
    }

    pub fn mantissa(&self) -> u64 {
        self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Smallest `e` with `self <= 2^e`; `None` for zero.
    pub fn ceil_log2(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        if self.is_inf() {
            return Some(INF_EXP);
        }
        let e = self.exp + i64::from(BITS - 1);
        Some(if self.man == TOP { e } else { e + 1 })
    }

    /// Largest `e` with `2^e <= self`; `None` for zero.
    pub fn floor_log2(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        if self.is_inf() {
            return Some(INF_EXP);
        }
        Some(self.exp + i64::from(BITS - 1))
    }

    pub fn add(self, other: Mag) -> Mag {
        if self.is_inf() || other.is_inf() {
            return Mag::INF;
        }
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let d = hi.exp - lo.exp;
        if d >= 90 {
            return Mag::from_parts_up(u128::from(hi.man) + 1, hi.exp);
        }
        let sum = (u128::from(hi.man) << d) + u128::from(lo.man);
        Mag::from_parts_up(sum, lo.exp)
    }

    pub fn add_lower(self, other: Mag) -> Mag {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let d = hi.exp - lo.exp;
        if d >= 90 {
            return hi;
        }
        let sum = (u128::from(hi.man) << d) + u128::from(lo.man);
        Mag::from_parts_lower(sum, lo.exp)
    }

    pub fn mul(self, other: Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        if self.is_inf() || other.is_inf() {
            return Mag::INF;
        }
        Mag::from_parts_up(u128::from(self.man) * u128::from(other.man), self.exp + other.exp)
    }

    pub fn mul_lower(self, other: Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        Mag::from_parts_lower(u128::from(self.man) * u128::from(other.man), self.exp + other.exp)
    }

    pub fn mul_2exp(self, e: i64) -> Mag {
        if self.is_zero() || self.is_inf() {
            return self;
        }
        Mag {
            man: self.man,
            exp: self.exp + e,
        }
    }

    pub fn mul_u64(self, k: u64) -> Mag {
        self.mul(Mag::from_u64(k))
    }

    /// Upper bound for `self / den`, where `den` is a lower bound.
    pub fn div(self, den: Mag) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        if den.is_zero() || self.is_inf() {
            return Mag::INF;
        }
        if den.is_inf() {
            return Mag::ZERO;
        }
        let num = u128::from(self.man) << 64;
        let d = u128::from(den.man);
        let mut q = num / d;
        if q * d != num {
            q += 1;
        }
        Mag::from_parts_up(q, self.exp - den.exp - 64)
    }

    /// Lower bound for `self / den`, where `den` is an upper bound.
    pub fn div_lower(self, den: Mag) -> Mag {
        if self.is_zero() || den.is_inf() {
            return Mag::ZERO;
        }
        let num = u128::from(self.man) << 64;
        Mag::from_parts_lower(num / u128::from(den.man), self.exp - den.exp - 64)
    }

    /// Lower bound for `self - other` (self a lower bound, other an upper
    /// bound); `None` when the difference is not certainly positive.
    pub fn sub_lower(self, other: Mag) -> Option<Mag> {
        if other.is_zero() {
            return if self.is_zero() { None } else { Some(self) };
        }
        if self.cmp(&other) != Ordering::Greater {
            return None;
        }
        if self.is_inf() {
            return Some(self);
        }
        let d = self.exp - other.exp;
        if d >= 90 {
            return Some(Mag::from_parts_lower(u128::from(self.man) - 1, self.exp));
        }
        // d >= 0 because self > other and both are normalized
        let diff = (u128::from(self.man) << d) - u128::from(other.man);
        Some(Mag::from_parts_lower(diff, other.exp))
    }

    /// Upper bound for `sqrt(self)`.
    pub fn sqrt(self) -> Mag {
        self.sqrt_dir(true)
    }

    pub fn sqrt_lower(self) -> Mag {
        self.sqrt_dir(false)
    }

    fn sqrt_dir(self, up: bool) -> Mag {
        if self.is_zero() || self.is_inf() {
            return self;
        }
        let (mut m, mut e) = (u128::from(self.man) << 60, self.exp - 60);
        if e % 2 != 0 {
            m <<= 1;
            e -= 1;
        }
        let mut r = isqrt_u128(m);
        if up && r * r != m {
            r += 1;
        }
        Mag::normalize(r, e / 2, up)
    }

    pub fn max(self, other: Mag) -> Mag {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Approximate value as `f64`, for display only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.is_inf() {
            return f64::INFINITY;
        }
        let e = self.exp.clamp(-2000, 2000) as i32;
        let mut v = self.man as f64;
        let mut k = e;
        while k > 0 {
            let s = k.min(60);
            v *= (1u64 << s) as f64;
            k -= s;
        }
        while k < 0 {
            let s = (-k).min(60);
            v /= (1u64 << s) as f64;
            k += s;
        }
        v
    }
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = 1u128 << ((128 - n.leading_zeros()).div_ceil(2));
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Mag) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Mag) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        self.exp
            .cmp(&other.exp)
            .then_with(|| self.man.cmp(&other.man))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_directions() {
        let third_up = Mag::from_u64(1).div(Mag::from_u64(3));
        let third_lo = Mag::from_u64(1).div_lower(Mag::from_u64(3));
        assert!(third_lo < third_up);
        assert!(third_up.mul(Mag::from_u64(3)) >= Mag::from_u64(1));
        assert!(third_lo.mul_lower(Mag::from_u64(3)) <= Mag::from_u64(1));
    }

    #[test]
    fn add_far_apart_still_upper() {
        let big = Mag::pow2(100);
        let tiny = Mag::pow2(-100);
        assert!(big.add(tiny) > big);
        assert_eq!(big.add_lower(tiny), big);
    }

    #[test]
    fn sub_lower_requires_positive_gap() {
        let a = Mag::from_u64(10);
        let b = Mag::from_u64(3);
        let d = a.sub_lower(b).unwrap();
        assert!(d <= Mag::from_u64(7));
        assert!(d.add(Mag::pow2(-20)) >= Mag::from_u64(7).mul_lower(Mag::from_parts_lower(1, 0)));
        assert!(b.sub_lower(a).is_none());
        assert!(a.sub_lower(a).is_none());
    }

    #[test]
    fn sqrt_brackets() {
        let two = Mag::from_u64(2);
        let up = two.sqrt();
        let lo = two.sqrt_lower();
        assert!(up.mul(up) >= two);
        assert!(lo.mul_lower(lo) <= two);
        assert_eq!(Mag::from_u64(16).sqrt(), Mag::from_u64(4));
    }

    #[test]
    fn log2_bounds() {
        assert_eq!(Mag::pow2(5).ceil_log2(), Some(5));
        assert_eq!(Mag::from_u64(33).ceil_log2(), Some(6));
        assert_eq!(Mag::from_u64(33).floor_log2(), Some(5));
    }
}
