//! Fixed-point kernels for the elementary functions.
//!
//! Each kernel works on integers scaled by `2^w` and returns the result
//! together with a bound on its error counted in units of `2^-w`. The
//! bounds are accumulated from the individual truncations; callers turn
//! them into ball radii.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn one(w: u64) -> BigInt {
    BigInt::one() << w as usize
}

/// Right shift truncating toward zero, so that series terms of either sign
/// reach zero.
fn shr(x: BigInt, n: usize) -> BigInt {
    if x.is_negative() {
        -((-x) >> n)
    } else {
        x >> n
    }
}

/// `atanh(1/k)` for an integer `k >= 2`.
fn atanh_inv_fixed(k: u32, w: u64) -> (BigInt, u64) {
    let k2 = u64::from(k) * u64::from(k);
    let mut pow = one(w) / k;
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    let mut terms = 0u64;
    while !pow.is_zero() {
        sum += &pow / (2 * i + 1);
        pow /= k2;
        i += 1;
        terms += 1;
    }
    // each term and each power truncates once; the dropped tail is below one unit
    (sum, 3 * terms + 2)
}

/// `ln 2 = 18 atanh(1/26) - 2 atanh(1/4801) + 8 atanh(1/8749)`.
pub fn ln2_fixed(w: u64) -> (BigInt, u64) {
    let (a, ea) = atanh_inv_fixed(26, w);
    let (b, eb) = atanh_inv_fixed(4801, w);
    let (c, ec) = atanh_inv_fixed(8749, w);
    (a * 18u32 - b * 2u32 + c * 8u32, 18 * ea + 2 * eb + 8 * ec)
}

/// `atan(1/k)` for an integer `k >= 2`.
fn atan_inv_fixed(k: u32, w: u64) -> (BigInt, u64) {
    let k2 = k * k;
    let mut pow = one(w) / k;
    let mut sum = BigInt::zero();
    let mut i: u32 = 0;
    let mut terms = 0u64;
    while !pow.is_zero() {
        let term = &pow / (2 * i + 1);
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pow /= k2;
        i += 1;
        terms += 1;
    }
    (sum, 3 * terms + 2)
}

/// `pi` by Machin's formula.
pub fn pi_fixed(w: u64) -> (BigInt, u64) {
    let (a, ea) = atan_inv_fixed(5, w);
    let (b, eb) = atan_inv_fixed(239, w);
    (a * 16u32 - b * 4u32, 16 * ea + 4 * eb)
}

/// `exp(t)` for `|t| <= 1` given at scale `2^w`, using `k` halvings
/// followed by `k` squarings.
fn exp_small_fixed(t: &BigInt, w: u64, k: u32) -> (BigInt, u64) {
    let base = one(w);
    let mut sum = base.clone();
    let mut term = base;
    let mut i: u64 = 1;
    let mut terms = 0u64;
    loop {
        term = shr(&term * t, w as usize + k as usize);
        term /= i;
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
        terms += 1;
    }
    let mut s = sum;
    for _ in 0..k {
        s = shr(&s * &s, w as usize);
    }
    // relative error grows by a factor two per squaring; the value stays in
    // [1/2, 2] before squaring, so absolute and relative units agree up to 2
    let err = (terms + 4) << (k + 3);
    (s, err)
}

/// `exp(x)` for a fixed-point `x` with an error of `x_err` units.
/// Returns `(e, n)` meaning `exp(x) ~ e * 2^-w * 2^n`, and the error of
/// `e` in units of `2^-w`.
pub fn exp_fixed(x: &BigInt, x_err: u64, w: u64) -> (BigInt, i64, u64) {
    let (ln2, ln2_err) = ln2_fixed(w + 8);
    let ln2 = ln2 >> 8usize;
    let ln2_err = ln2_err / 256 + 2;
    // n = round(x / ln2)
    let n: BigInt = {
        let twice = (x << 1usize) + &ln2;
        num_integer::Integer::div_floor(&twice, &(&ln2 << 1usize))
    };
    let t = x - &n * &ln2;
    let n_abs = n.abs().to_u64().unwrap_or(u64::MAX);
    let t_err = x_err + n_abs.saturating_mul(ln2_err) + 1;
    let k = (w.sqrt() / 2) as u32 + 2;
    let (e, e_err) = exp_small_fixed(&t, w, k);
    // the error in t perturbs exp(t) by a relative t_err units; exp(t) < 2
    let total = e_err + 2 * t_err + 2;
    (e, n.to_i64().unwrap_or(i64::MAX), total)
}

/// `log(f)` for a fixed-point `f` in `[1/sqrt 2, sqrt 2)`.
pub fn log_near_one_fixed(f: &BigInt, w: u64) -> (BigInt, u64) {
    let base = one(w);
    let num = f - &base;
    let den = f + &base;
    let z = (num << w as usize) / &den;
    let z2 = shr(&z * &z, w as usize);
    let mut pow = z;
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    let mut terms = 0u64;
    while !pow.is_zero() {
        sum += &pow / (2 * i + 1);
        pow = shr(&pow * &z2, w as usize);
        i += 1;
        terms += 1;
    }
    (sum << 1usize, 2 * (3 * terms + 4))
}

/// `atan(x)` for fixed-point `|x| <= 1`.
pub fn atan_small_fixed(x: &BigInt, w: u64) -> (BigInt, u64) {
    let base = one(w);
    let halvings = (w.sqrt() / 2) as u32 + 1;
    let mut y = x.clone();
    let w2 = 2 * w as usize;
    for _ in 0..halvings {
        // atan(y) = 2 atan(y / (1 + sqrt(1 + y^2)))
        let r = ((BigInt::one() << w2) + &y * &y).sqrt();
        y = (&y << w as usize) / (&base + r);
    }
    let y2 = shr(&y * &y, w as usize);
    let mut pow = y;
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    let mut terms = 0u64;
    while !pow.is_zero() {
        let term = &pow / (2 * i + 1);
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pow = shr(&pow * &y2, w as usize);
        i += 1;
        terms += 1;
    }
    let err = (2 * terms + 3 * u64::from(halvings) + 4) << halvings;
    (sum << halvings as usize, err)
}

/// `(cos t, sin t)` for fixed-point `|t| <= 4`.
pub fn cis_fixed(t: &BigInt, w: u64) -> (BigInt, BigInt, u64) {
    let k = (w.sqrt() / 2) as u32 + 4;
    let shift = w as usize + k as usize;
    // Taylor series of exp(i t / 2^k)
    let mut re = one(w);
    let mut im = BigInt::zero();
    let mut term_re = one(w);
    let mut term_im = BigInt::zero();
    let mut i: u64 = 1;
    let mut terms = 0u64;
    loop {
        // multiply term by i*t/(2^k * i)
        let nr = -shr(&term_im * t, shift) / i;
        let ni = shr(&term_re * t, shift) / i;
        term_re = nr;
        term_im = ni;
        if term_re.is_zero() && term_im.is_zero() {
            break;
        }
        re += &term_re;
        im += &term_im;
        i += 1;
        terms += 1;
    }
    for _ in 0..k {
        let nr = shr(&re * &re - &im * &im, w as usize);
        let ni = shr(&re * &im, w as usize - 1);
        re = nr;
        im = ni;
    }
    let err = (2 * terms + 6) << (k + 2);
    (re, im, err)
}
