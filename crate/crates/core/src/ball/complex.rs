use core::fmt;

use super::{Ball, Mag};

/// Rectangular complex ball: independent enclosures of the real and
/// imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> ComplexBall {
        ComplexBall { re, im }
    }

    pub fn from_real(re: Ball) -> ComplexBall {
        let prec = re.prec();
        ComplexBall {
            re,
            im: Ball::zero(prec),
        }
    }

    pub fn zero(prec: u32) -> ComplexBall {
        ComplexBall::from_real(Ball::zero(prec))
    }

    pub fn one(prec: u32) -> ComplexBall {
        ComplexBall::from_real(Ball::one(prec))
    }

    /// `exp(i theta)`.
    pub fn cis(theta: &Ball) -> ComplexBall {
        let (c, s) = theta.cos_sin();
        ComplexBall { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn neg(&self) -> ComplexBall {
        ComplexBall {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn add(&self, other: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    pub fn sub(&self, other: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }

    pub fn mul(&self, other: &ComplexBall) -> ComplexBall {
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        ComplexBall { re, im }
    }

    pub fn mul_real(&self, x: &Ball) -> ComplexBall {
        ComplexBall {
            re: self.re.mul(x),
            im: self.im.mul(x),
        }
    }

    pub fn mul_i64(&self, k: i64) -> ComplexBall {
        ComplexBall {
            re: self.re.mul_i64(k),
            im: self.im.mul_i64(k),
        }
    }

    /// `|z|^2`.
    pub fn norm_sqr(&self) -> Ball {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn div(&self, other: &ComplexBall) -> ComplexBall {
        let den = other.norm_sqr();
        let num = self.mul(&other.conj());
        ComplexBall {
            re: num.re.div(&den),
            im: num.im.div(&den),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Principal argument in `(-pi, pi]`; indeterminate when the ball
    /// touches the negative real axis or the origin.
    pub fn arg(&self) -> Ball {
        let prec = self.prec();
        if self.re.is_positive() {
            return self.im.div(&self.re).atan();
        }
        let pi = Ball::pi(prec);
        let half_pi = pi.mul_2exp(-1);
        if self.im.is_positive() {
            return half_pi.sub(&self.re.div(&self.im).atan());
        }
        if self.im.is_negative() {
            return half_pi.neg().sub(&self.re.div(&self.im).atan());
        }
        Ball::indeterminate(prec)
    }

    /// Principal logarithm.
    pub fn log(&self) -> ComplexBall {
        ComplexBall {
            re: self.norm_sqr().log().mul_2exp(-1),
            im: self.arg(),
        }
    }

    /// Upper bound for the larger of the two part radii.
    pub fn rad(&self) -> Mag {
        self.re.rad().max(self.im.rad())
    }

    pub fn overlaps(&self, other: &ComplexBall) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn contains(&self, other: &ComplexBall) -> bool {
        self.re.contains(&other.re) && self.im.contains(&other.im)
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "({:.*}) + i({:.*})", p, self.re, p, self.im),
            None => write!(f, "({}) + i({})", self.re, self.im),
        }
    }
}
