//! Exact dyadic numbers `man * 2^exp`, the midpoints of balls.

use core::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::mag::Mag;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Dyadic {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    /// Builds `man * 2^exp`, stripping trailing zero bits so that equal
    /// values have equal representations.
    pub fn new(man: BigInt, exp: i64) -> Dyadic {
        if man.is_zero() {
            return Dyadic::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Dyadic {
                man: man >> tz,
                exp: exp + tz as i64,
            }
        } else {
            Dyadic { man, exp }
        }
    }

    pub fn from_i64(x: i64) -> Dyadic {
        Dyadic::new(BigInt::from(x), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.man.sign()
    }

    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// `|self| < 2^top_exp()`.
    pub fn top_exp(&self) -> i64 {
        self.exp + self.man.bits() as i64
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn mul_2exp(&self, e: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + e,
        }
    }

    pub fn add_exact(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &other.man << (other.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub_exact(&self, other: &Dyadic) -> Dyadic {
        self.add_exact(&other.neg())
    }

    pub fn mul_exact(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    /// Rounds to at most `prec` mantissa bits (toward negative infinity),
    /// returning the rounded value and an upper bound on the error.
    pub fn round(&self, prec: u32) -> (Dyadic, Mag) {
        let bits = self.man.bits();
        if bits <= u64::from(prec) {
            return (self.clone(), Mag::ZERO);
        }
        let shift = bits - u64::from(prec);
        let man = &self.man >> shift as usize;
        let exp = self.exp + shift as i64;
        (Dyadic::new(man, exp), Mag::pow2(exp))
    }

    /// Upper bound for `|self|`.
    pub fn mag_upper(&self) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        let bits = self.man.bits();
        let a = self.man.magnitude();
        if bits <= 100 {
            let v = a.to_u128().unwrap_or(u128::MAX);
            return Mag::from_parts_up(v, self.exp);
        }
        let shift = bits - 100;
        let top = (a >> shift as usize).to_u128().unwrap_or(u128::MAX);
        Mag::from_parts_up(top + 1, self.exp + shift as i64)
    }

    /// Lower bound for `|self|`.
    pub fn mag_lower(&self) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        let bits = self.man.bits();
        let a = self.man.magnitude();
        if bits <= 100 {
            let v = a.to_u128().unwrap_or(0);
            return Mag::from_parts_lower(v, self.exp);
        }
        let shift = bits - 100;
        let top = (a >> shift as usize).to_u128().unwrap_or(0);
        Mag::from_parts_lower(top, self.exp + shift as i64)
    }

    /// Exact conversion of a magnitude.
    pub fn from_mag(m: Mag) -> Dyadic {
        Dyadic::new(BigInt::from(m.mantissa()), m.exponent())
    }

    /// Value scaled to a fixed-point integer with `frac` fraction bits,
    /// truncated toward negative infinity (error below one unit).
    pub fn to_fixed(&self, frac: i64) -> BigInt {
        let shift = self.exp + frac;
        if shift >= 0 {
            &self.man << shift as usize
        } else {
            &self.man >> (-shift) as usize
        }
    }

    /// Nearest integer (ties away from zero are irrelevant for our use).
    pub fn round_to_integer(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.man << self.exp as usize;
        }
        let half = Dyadic::new(BigInt::one(), -1);
        self.add_exact(&half).floor()
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            &self.man >> (-self.exp) as usize
        }
    }

    pub fn from_bigint(n: &BigInt) -> Dyadic {
        Dyadic::new(n.clone(), 0)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&self.man >> shift as usize).to_f64().unwrap_or(0.0);
        let mut e = self.exp + shift;
        let mut v = top;
        while e > 0 {
            let s = e.min(60);
            v *= (1u64 << s) as f64;
            e -= s;
            if v.is_infinite() {
                return v;
            }
        }
        while e < 0 {
            let s = (-e).min(60);
            v /= (1u64 << s) as f64;
            e += s;
            if v == 0.0 {
                return v;
            }
        }
        v
    }

    /// Exact decimal expansion (dyadic rationals always have one).
    pub fn to_decimal_exact(&self) -> alloc::string::String {
        use alloc::string::ToString;
        if self.exp >= 0 {
            return (&self.man << self.exp as usize).to_string();
        }
        let digits = (-self.exp) as usize;
        let scaled = &self.man * num_traits::pow(BigInt::from(5u8), digits);
        insert_point(&scaled, digits)
    }

    /// Decimal rounding to `digits` places after the point (toward
    /// negative infinity); display only.
    pub fn to_decimal_places(&self, digits: usize) -> alloc::string::String {
        let ten = num_traits::pow(BigInt::from(10u8), digits);
        let num = &self.man * ten;
        let scaled = if self.exp >= 0 {
            num << self.exp as usize
        } else {
            // floor division for negatives
            num.div_floor(&(BigInt::one() << (-self.exp) as usize))
        };
        insert_point(&scaled, digits)
    }

    /// Parses an exact decimal string that denotes a dyadic rational.
    pub fn from_decimal_exact(s: &str) -> Option<Dyadic> {
        let (num, den_pow10) = parse_decimal(s)?;
        if den_pow10 == 0 {
            return Some(Dyadic::new(num, 0));
        }
        let five = num_traits::pow(BigInt::from(5u8), den_pow10);
        let (q, r) = num.div_rem(&five);
        if !r.is_zero() {
            return None;
        }
        Some(Dyadic::new(q, -(den_pow10 as i64)))
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let d = self.sub_exact(other);
        match d.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

fn insert_point(scaled: &BigInt, digits: usize) -> alloc::string::String {
    use alloc::string::{String, ToString};
    let neg = scaled.is_negative();
    let mut s = scaled.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            let mut pad = String::new();
            for _ in 0..(digits + 1 - s.len()) {
                pad.push('0');
            }
            pad.push_str(&s);
            s = pad;
        }
        let split = s.len() - digits;
        s.insert(split, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

/// Parses `[-]ddd[.ddd][e[-]dd]` into an integer numerator and a power of
/// ten denominator.
pub(crate) fn parse_decimal(s: &str) -> Option<(BigInt, usize)> {
    let s = s.trim();
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.find('.') {
        Some(i) => (&body[..i], &body[i + 1..]),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut digits = alloc::string::String::with_capacity(int_part.len() + frac_part.len());
    digits.push_str(int_part);
    digits.push_str(frac_part);
    let mut num: BigInt = digits.parse().ok()?;
    let mut den = frac_part.len() as i64 - exp10;
    if den < 0 {
        num *= num_traits::pow(BigInt::from(10u8), (-den) as usize);
        den = 0;
    }
    if neg {
        num = -num;
    }
    Some((num, den as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_decimal_round_trip() {
        let d = Dyadic::new(BigInt::from(-12345), -13);
        let s = d.to_decimal_exact();
        assert_eq!(Dyadic::from_decimal_exact(&s), Some(d));
        assert_eq!(Dyadic::from_decimal_exact("0.1"), None);
        assert_eq!(
            Dyadic::from_decimal_exact("2.5e1"),
            Some(Dyadic::from_i64(25))
        );
    }

    #[test]
    fn rounding_error_is_bounded() {
        let d = Dyadic::new(BigInt::from(0b1011_0111u32), 0);
        let (r, err) = d.round(4);
        assert_eq!(r, Dyadic::from_i64(0b1011_0000));
        assert!(Dyadic::from_mag(err).cmp_value(&d.sub_exact(&r)) != Ordering::Less);
    }

    #[test]
    fn round_to_integer_and_floor() {
        let d = Dyadic::new(BigInt::from(-7), -1); // -3.5
        assert_eq!(d.floor(), BigInt::from(-4));
        assert_eq!(d.round_to_integer(), BigInt::from(-3));
        let e = Dyadic::new(BigInt::from(11), -2); // 2.75
        assert_eq!(e.round_to_integer(), BigInt::from(3));
    }

    #[test]
    fn decimal_places_display() {
        let d = Dyadic::new(BigInt::from(1), -3);
        assert_eq!(d.to_decimal_places(4), "0.1250");
        assert_eq!(d.neg().to_decimal_places(2), "-0.13");
    }
}
