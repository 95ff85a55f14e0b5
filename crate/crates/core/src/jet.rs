//! Truncated Taylor series ("jets") in a local variable `t`.
//!
//! Coefficient `k` of a jet is `f^(k)(s) / k!`; every operation truncates
//! to the common length.

use alloc::vec::Vec;

use crate::ball::{factorial, Ball, ComplexBall};

pub type Jet = Vec<Ball>;
pub type ComplexJet = Vec<ComplexBall>;

pub fn zero(len: usize, prec: u32) -> Jet {
    (0..len).map(|_| Ball::zero(prec)).collect()
}

pub fn constant(c: Ball, len: usize) -> Jet {
    let prec = c.prec();
    let mut out = zero(len, prec);
    out[0] = c;
    out
}

pub fn add_assign(a: &mut Jet, b: &Jet) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.add(y);
    }
}

pub fn scale(a: &Jet, c: &Ball) -> Jet {
    a.iter().map(|x| x.mul(c)).collect()
}

pub fn mul(a: &Jet, b: &Jet) -> Jet {
    let len = a.len().min(b.len());
    (0..len)
        .map(|n| {
            let mut acc = a[0].mul(&b[n]);
            for k in 1..=n {
                acc = acc.add(&a[k].mul(&b[n - k]));
            }
            acc
        })
        .collect()
}

/// `a(t) * (c + t)`.
pub fn mul_linear(a: &Jet, c: &Ball) -> Jet {
    (0..a.len())
        .map(|k| {
            let x = a[k].mul(c);
            if k > 0 {
                x.add(&a[k - 1])
            } else {
                x
            }
        })
        .collect()
}

/// Jet of `x^(-s - t) = x^(-s) exp(-t log x)` from `x^(-s)` and `log x`.
pub fn neg_power(x_neg_s: &Ball, log_x: &Ball, len: usize) -> Jet {
    let mut out = Vec::with_capacity(len);
    let mut c = x_neg_s.clone();
    let minus_log = log_x.neg();
    for k in 0..len {
        if k > 0 {
            c = c.mul(&minus_log).div_u64(k as u64);
        }
        out.push(c.clone());
    }
    out
}

/// Converts Taylor coefficients to derivatives.
pub fn to_derivatives(a: &Jet) -> Vec<Ball> {
    a.iter()
        .enumerate()
        .map(|(k, x)| x.mul(&Ball::from_bigint(&factorial(k as u64), x.prec())))
        .collect()
}

pub fn complex_to_derivatives(a: &ComplexJet) -> Vec<ComplexBall> {
    a.iter()
        .enumerate()
        .map(|(k, x)| x.mul_real(&Ball::from_bigint(&factorial(k as u64), x.prec())))
        .collect()
}

/// Taylor coefficients of `log L` from those of `L`, using
/// `n L_n = sum_{k=1}^{n} k l_k L_{n-k}`. `None` if `L_0` may vanish.
pub fn complex_log(l: &ComplexJet) -> Option<ComplexJet> {
    if l[0].contains_zero() || l[0].norm_sqr().contains_zero() {
        return None;
    }
    let mut out: ComplexJet = Vec::with_capacity(l.len());
    out.push(l[0].log());
    if !out[0].is_finite() {
        return None;
    }
    for n in 1..l.len() {
        let mut acc = l[n].mul_i64(n as i64);
        for k in 1..n {
            acc = acc.sub(&out[k].mul(&l[n - k]).mul_i64(k as i64));
        }
        out.push(acc.div(&l[0].mul_i64(n as i64)));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_exponentials() {
        let prec = 128;
        let two = Ball::from_i64(2, prec);
        let three = Ball::from_i64(3, prec);
        // 2^-t * 3^-t = 6^-t
        let a = neg_power(&Ball::one(prec), &two.log(), 5);
        let b = neg_power(&Ball::one(prec), &three.log(), 5);
        let c = neg_power(&Ball::one(prec), &Ball::from_i64(6, prec).log(), 5);
        for (x, y) in mul(&a, &b).iter().zip(&c) {
            assert!(x.overlaps(y));
        }
    }

    #[test]
    fn log_of_exponential_is_linear() {
        let prec = 128;
        let z = ComplexBall::new(Ball::from_i64(2, prec), Ball::from_i64(1, prec));
        // L(t) = z exp(3t)
        let mut l = Vec::new();
        let mut c = z.clone();
        for k in 0..5 {
            if k > 0 {
                c = c.mul_i64(3).div(&ComplexBall::from_real(Ball::from_i64(k, prec)));
            }
            l.push(c.clone());
        }
        let lg = complex_log(&l).unwrap();
        assert!(lg[0].overlaps(&z.log()));
        assert!(lg[1].re.overlaps(&Ball::from_i64(3, prec)));
        assert!(lg[1].im.contains_zero());
        for x in &lg[2..] {
            assert!(x.contains_zero());
        }
    }

    #[test]
    fn linear_factor_and_derivatives() {
        let prec = 64;
        let a = constant(Ball::one(prec), 3);
        let b = mul_linear(&mul_linear(&a, &Ball::from_i64(2, prec)), &Ball::from_i64(3, prec));
        // (2 + t)(3 + t) = 6 + 5t + t^2
        assert_eq!(b[0], Ball::from_i64(6, prec));
        assert_eq!(b[1], Ball::from_i64(5, prec));
        assert_eq!(b[2], Ball::from_i64(1, prec));
        assert_eq!(to_derivatives(&b)[2], Ball::from_i64(2, prec));
    }
}
