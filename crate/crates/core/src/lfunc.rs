//! Dirichlet L-functions modulo a prime through the Hurwitz kernel, their
//! logarithmic derivatives, the function
//! `f(s) = sum_{chi odd} log L(s, chi) - 1_beta log(s - beta)`,
//! the orthogonality identity for `sum_{chi odd} log L(sigma, chi)` and the
//! scan for a real zero of the quadratic L-function near 1.
//!
//! For a non-principal `chi`,
//! `L(s, chi) = sum_{r=1}^{p-1} chi(r) U_r(s)` with
//! `U_r(s) = sum_{n<N} (np + r)^-s + p^-s T(s, N + r/p)`, where `T` is the
//! regularized Euler–Maclaurin tail; the pole terms cancel because the
//! character values sum to zero. The `U_r` are computed once per `(p, s)`
//! as Taylor jets and shared by all characters.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{check_odd_prime, PrimeSieve, Residue};
use crate::ball::{factorial, Ball, ComplexBall, Dyadic, Mag};
use crate::chars::{quadratic_character, Character, CharacterTable};
use crate::hurwitz::{EmKernel, EmParams};
use crate::jet::{self, ComplexJet, Jet};
use crate::{Error, Result};

/// First and last precision tried by the escalating entry points.
pub const START_PREC: u32 = 128;
pub const MAX_PREC: u32 = 4096;

/// Runs `f` at `start`, doubling the precision up to `max` while it fails
/// with a precision-related error.
pub fn escalate<T>(start: u32, max: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut prec = start;
    loop {
        match f(prec) {
            Err(Error::CannotDivide(_)) | Err(Error::Undetermined { .. }) | Err(Error::PrecisionExhausted { .. })
                if prec < max =>
            {
                prec = (2 * prec).min(max);
            }
            Err(Error::CannotDivide(what)) => {
                return Err(Error::PrecisionExhausted {
                    bits: prec,
                    detail: format!("cannot divide: {what}"),
                })
            }
            other => return other,
        }
    }
}

/// `log m` for `1 <= m <= limit` at a fixed precision, filled through a
/// smallest-prime-factor sieve so that only primes need a logarithm.
#[derive(Clone, Debug)]
pub struct LogTable {
    prec: u32,
    spf: Vec<u32>,
    logs: Vec<Ball>,
}

impl LogTable {
    pub fn new(limit: u64, prec: u32) -> LogTable {
        let limit = limit.max(1) as usize;
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut logs = Vec::with_capacity(limit + 1);
        logs.push(Ball::indeterminate(prec));
        logs.push(Ball::zero(prec));
        for m in 2..=limit {
            let q = spf[m] as usize;
            let v = if q == m {
                Ball::from_u64(m as u64, prec).log()
            } else {
                logs[q].add(&logs[m / q])
            };
            logs.push(v);
        }
        LogTable { prec, spf, logs }
    }

    pub fn limit(&self) -> u64 {
        (self.logs.len() - 1) as u64
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn log(&self, m: u64) -> &Ball {
        &self.logs[m as usize]
    }

    /// `m^-s` for every `m <= limit`, multiplicatively from the primes.
    pub fn neg_powers(&self, s: &Ball, limit: u64) -> Vec<Ball> {
        let limit = limit as usize;
        assert!(limit < self.logs.len(), "power table beyond log table");
        let mut out: Vec<Ball> = Vec::with_capacity(limit + 1);
        out.push(Ball::indeterminate(self.prec));
        out.push(Ball::one(self.prec));
        for m in 2..=limit {
            let q = self.spf[m] as usize;
            let v = if q == m {
                self.logs[m].mul(s).neg().exp()
            } else {
                out[q].mul(&out[m / q])
            };
            out.push(v);
        }
        out
    }
}

/// Working precision and table size needed for `(p, s, order)` at output
/// precision `prec`.
pub fn batch_plan(p: u64, s: &Ball, order: usize, prec: u32) -> (u32, EmParams) {
    let log2p = 64 - p.leading_zeros();
    let params0 = EmParams::for_prec(prec + 32);
    let spread = ((s.to_f64() - 1.0).abs() * f64::from(64 - (params0.n + 1).leading_zeros())).ceil() as u32;
    let wp = prec + 32 + log2p + spread + 2 * order as u32;
    (wp, EmParams::for_prec(wp))
}

/// Residue-class jets `U_r` for one `(p, s)`; see the module docs.
#[derive(Clone, Debug)]
pub struct ResidueJets {
    p: u64,
    prec: u32,
    len: usize,
    // u[r] for 1 <= r < p; u[0] unused
    u: Vec<Jet>,
}

impl ResidueJets {
    /// `logs` must cover `(N + 1) p` at the working precision reported by
    /// [`batch_plan`].
    pub fn new(p: u64, s: &Ball, order: usize, prec: u32, logs: &LogTable) -> Result<ResidueJets> {
        check_odd_prime(p)?;
        let (wp, params) = batch_plan(p, s, order, prec);
        let limit = (params.n + 1) * p;
        if logs.limit() < limit || logs.prec() < wp {
            return Err(Error::Internal(format!(
                "log table ({} at {} bits) too small for p = {p}",
                logs.limit(),
                logs.prec()
            )));
        }
        let len = order + 1;
        let s = s.with_prec(wp);
        let kernel = EmKernel::new(&s, order, params, wp)?;
        let n = params.n;
        let pows = logs.neg_powers(&s, limit);
        let log_p = logs.log(p).clone();
        let p_s = log_p.mul(&s).exp();
        let p_neg = jet::neg_power(&p_s.recip(), &log_p, len);
        let pb = Ball::from_u64(p, wp);
        let mut u = Vec::with_capacity(p as usize);
        u.push(Vec::new());
        for r in 1..p {
            // power sums S_k = sum m^-s (log m)^k; coefficient k is (-1)^k S_k / k!
            let mut acc = jet::zero(len, wp);
            for k in 0..n {
                let m = k * p + r;
                let mut v = pows[m as usize].clone();
                acc[0] = acc[0].add(&v);
                for a in acc.iter_mut().skip(1) {
                    v = v.mul(logs.log(m));
                    *a = a.add(&v);
                }
            }
            for (k, a) in acc.iter_mut().enumerate().skip(1) {
                let c = a.div(&Ball::from_bigint(&factorial(k as u64), wp));
                *a = if k % 2 == 1 { c.neg() } else { c };
            }
            let m = n * p + r;
            let x = Ball::from_u64(m, wp).div(&pb);
            let log_x = logs.log(m).sub(&log_p);
            let x_neg_s = pows[m as usize].mul(&p_s);
            let tail = jet::mul(&kernel.tail(&x, &log_x, &x_neg_s), &p_neg);
            jet::add_assign(&mut acc, &tail);
            u.push(acc);
        }
        Ok(ResidueJets { p, prec: wp, len, u })
    }

    /// Builds its own log table.
    pub fn standalone(p: u64, s: &Ball, order: usize, prec: u32) -> Result<ResidueJets> {
        let (wp, params) = batch_plan(p, s, order, prec);
        let logs = LogTable::new((params.n + 1) * p, wp);
        ResidueJets::new(p, s, order, prec, &logs)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Taylor jet of `L(s + t, chi)` for a non-principal `chi`.
    pub fn l_jet(&self, table: &CharacterTable, roots: &[ComplexBall], chi: &Character) -> Result<ComplexJet> {
        let mut v = self.l_jets(table, roots, core::slice::from_ref(chi))?;
        Ok(v.pop().expect("one jet"))
    }

    /// Jets of `L(s + t, chi)` for several non-principal characters of the
    /// same parity. A character whose conjugate appears earlier in the list
    /// is obtained by conjugation, since every `U_r` is real.
    pub fn l_jets(&self, table: &CharacterTable, roots: &[ComplexBall], chars: &[Character]) -> Result<Vec<ComplexJet>> {
        let Some(first) = chars.first() else {
            return Ok(Vec::new());
        };
        if chars.iter().any(|c| c.is_principal()) {
            return Err(Error::Unsupported("principal character"));
        }
        if chars.iter().any(|c| c.parity != first.parity) {
            return Err(Error::InvalidInput("characters of mixed parity".into()));
        }
        let p = self.p;
        let h = (p - 1) / 2;
        // chi(-n) = chi(-1) chi(n) and -g^t = g^(t+h), so only half the
        // residues carry independent weights
        let d: Vec<Jet> = (0..h)
            .map(|t| {
                let a = &self.u[table.power(t) as usize];
                let b = &self.u[table.power(t + h) as usize];
                a.iter()
                    .zip(b)
                    .map(|(x, y)| if first.is_odd() { x.sub(y) } else { x.add(y) })
                    .collect()
            })
            .collect();
        // exact fixed-point sums; rounding of D_t and the roots is covered by
        // h ((1 + e_w) e_d + D_max e_w) per component
        let w = u64::from(self.prec) + 8;
        let unit = Mag::pow2(-(w as i64));
        let fixed = |b: &Ball| b.mid().to_fixed(w as i64);
        let root_fx: Vec<(BigInt, BigInt)> = roots.iter().map(|z| (fixed(&z.re), fixed(&z.im))).collect();
        let e_w = roots.iter().fold(Mag::ZERO, |m, z| m.max(z.re.rad()).max(z.im.rad())).add(unit);
        let d_fx: Vec<Vec<BigInt>> = d.iter().map(|dt| dt.iter().map(fixed).collect()).collect();
        let err: Vec<Mag> = (0..self.len)
            .map(|k| {
                let e_d = d.iter().fold(Mag::ZERO, |m, dt| m.max(dt[k].rad())).add(unit);
                let d_max = d.iter().fold(Mag::ZERO, |m, dt| m.max(dt[k].abs_upper()));
                Mag::from_u64(1).add(e_w).mul(e_d).add(d_max.mul(e_w)).mul_u64(h)
            })
            .collect();
        let mut out: Vec<ComplexJet> = Vec::with_capacity(chars.len());
        for (i, chi) in chars.iter().enumerate() {
            let conj_j = (p - 1 - chi.j) % (p - 1);
            if let Some(k) = chars[..i].iter().position(|c| c.j == conj_j) {
                let z = out[k].iter().map(|z| z.conj()).collect();
                out.push(z);
                continue;
            }
            let mut re = vec![BigInt::zero(); self.len];
            let mut im = vec![BigInt::zero(); self.len];
            for (t, dt) in d_fx.iter().enumerate() {
                let (wr, wi) = &root_fx[((chi.j * t as u64) % (p - 1)) as usize];
                for k in 0..self.len {
                    re[k] += wr * &dt[k];
                    im[k] += wi * &dt[k];
                }
            }
            let to_ball = |v: BigInt, e: Mag| Ball::new(Dyadic::new(v, -2 * w as i64), e, self.prec);
            let jet = re
                .into_iter()
                .zip(im)
                .zip(&err)
                .map(|((a, b), e)| ComplexBall::new(to_ball(a, *e), to_ball(b, *e)))
                .collect();
            out.push(jet);
        }
        Ok(out)
    }
}

/// `[L^(k)(s, chi)]` for `k = 0..=order`.
pub fn l_value_derivs(chi: &Character, s: &Ball, order: usize, prec: u32) -> Result<Vec<ComplexBall>> {
    if chi.is_principal() {
        return Err(Error::Unsupported("principal character"));
    }
    check_s(s)?;
    let table = CharacterTable::new(chi.p)?;
    let u = ResidueJets::standalone(chi.p, s, order, prec)?;
    let roots = table.roots_of_unity(u.prec());
    let j = u.l_jet(&table, &roots, chi)?;
    Ok(round_all(&jet::complex_to_derivatives(&j), prec))
}

/// `[(log L)^(k)(sigma, chi)]` for `k = 0..=order`, principal branch for
/// `k = 0`.
pub fn log_l_derivs(chi: &Character, sigma: &Ball, order: usize, prec: u32) -> Result<Vec<ComplexBall>> {
    if chi.is_principal() {
        return Err(Error::Unsupported("principal character"));
    }
    check_s(sigma)?;
    let table = CharacterTable::new(chi.p)?;
    let u = ResidueJets::standalone(chi.p, sigma, order, prec)?;
    let roots = table.roots_of_unity(u.prec());
    let l = u.l_jet(&table, &roots, chi)?;
    let lg = jet::complex_log(&l).ok_or(Error::CannotDivide("L(sigma, chi) may vanish"))?;
    Ok(round_all(&jet::complex_to_derivatives(&lg), prec))
}

fn round_all(v: &[ComplexBall], prec: u32) -> Vec<ComplexBall> {
    v.iter()
        .map(|z| ComplexBall::new(z.re.with_prec(prec), z.im.with_prec(prec)))
        .collect()
}

fn check_s(s: &Ball) -> Result<()> {
    let lo = Ball::from_i64(3, 64).mul_2exp(-2);
    if !s.is_finite() || !lo.certainly_lt(s) {
        return Err(Error::Domain {
            what: "L-function",
            detail: format!("need s > 3/4, got {s}"),
        });
    }
    Ok(())
}

/// Taylor jets of `log L(s + t, chi)` for every odd `chi`, ascending `j`.
pub fn odd_log_l_jets(p: u64, s: &Ball, order: usize, prec: u32) -> Result<Vec<(u64, ComplexJet)>> {
    check_s(s)?;
    let table = CharacterTable::new(p)?;
    let u = ResidueJets::standalone(p, s, order, prec)?;
    let roots = table.roots_of_unity(u.prec());
    let chars = crate::chars::odd_characters(p)?;
    let ls = u.l_jets(&table, &roots, &chars)?;
    let mut out = Vec::with_capacity(chars.len());
    for (chi, l) in chars.iter().zip(&ls) {
        let lg = jet::complex_log(l).ok_or(Error::CannotDivide("L(s, chi) may vanish"))?;
        out.push((chi.j, lg));
    }
    Ok(out)
}

/// How the presence or absence of a Siegel zero was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiegelMethod {
    /// `p ≡ 1 (mod 4)`: the quadratic character is even, so no odd
    /// character is quadratic.
    Parity,
    /// `L(sigma_0, chi_quad) > 0` at the left endpoint. Concluding absence
    /// uses that the region holds at most one zero, which is real and
    /// simple, and that `L(1, chi_quad) > 0`.
    EndpointPositivity,
    /// A sign change on `[sigma_0, 1]` located by bisection.
    Bisection,
}

impl SiegelMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SiegelMethod::Parity => "parity",
            SiegelMethod::EndpointPositivity => "endpoint-positivity",
            SiegelMethod::Bisection => "bisection",
        }
    }

    /// The assumption a certificate of this kind rests on, if any.
    pub fn assumption(&self) -> Option<&'static str> {
        match self {
            SiegelMethod::EndpointPositivity => {
                Some("at most one simple real zero in ]1 - 1/(c log p), 1]")
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiegelZeroReport {
    pub p: u64,
    pub present: bool,
    pub beta: Option<Ball>,
    /// `1 - 1/(c log p)` and `1`.
    pub interval: (Ball, Ball),
    pub c: Ball,
    pub method: SiegelMethod,
    pub certified: bool,
    /// `L(sigma_0, chi_quad)` when it was evaluated.
    pub endpoint_value: Option<Ball>,
}

impl SiegelZeroReport {
    /// The indicator `1_beta`.
    pub fn indicator(&self) -> u32 {
        u32::from(self.present)
    }
}

/// `1 - 1/(c log p)`.
pub fn left_endpoint(p: u64, c: &Ball, prec: u32) -> Ball {
    let lp = Ball::from_u64(p, prec).log();
    Ball::one(prec).sub(&c.with_prec(prec).mul(&lp).recip())
}

/// `L(s, chi_quad)` for real `s`.
pub fn quadratic_l_value(p: u64, s: &Ball, prec: u32) -> Result<Ball> {
    let chi = quadratic_character(p)?;
    let v = l_value_derivs(&chi, s, 0, prec)?;
    Ok(v[0].re.clone())
}

/// Bisection for a sign change of `f` on `[lo, hi]` with `f(lo) < 0 <
/// f(hi)` or the reverse, down to width `2^-tol_bits`. Returns a ball
/// enclosing the final bracket.
pub fn bisect_root(
    mut f: impl FnMut(&Ball) -> Result<Ball>,
    lo: &Dyadic,
    hi: &Dyadic,
    tol_bits: i64,
    prec: u32,
) -> Result<Ball> {
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let f_lo = f(&Ball::exact(lo.clone(), prec))?;
    let f_hi = f(&Ball::exact(hi.clone(), prec))?;
    let rising = if f_lo.is_negative() && f_hi.is_positive() {
        true
    } else if f_lo.is_positive() && f_hi.is_negative() {
        false
    } else {
        return Err(Error::Undetermined {
            what: "no certified sign change at the bracket ends",
            bits: prec,
        });
    };
    let tol = Dyadic::new(num_bigint::BigInt::from(1), -tol_bits);
    while hi.sub_exact(&lo).cmp_value(&tol) == core::cmp::Ordering::Greater {
        let mid = lo.add_exact(&hi).mul_2exp(-1);
        let v = f(&Ball::exact(mid.clone(), prec))?;
        let below = if rising { v.is_negative() } else { v.is_positive() };
        let above = if rising { v.is_positive() } else { v.is_negative() };
        if below {
            lo = mid;
        } else if above {
            hi = mid;
        } else {
            return Err(Error::Undetermined {
                what: "sign of the function at a bisection point",
                bits: prec,
            });
        }
    }
    let lo_b = Ball::exact(lo, prec);
    let hi_b = Ball::exact(hi, prec);
    Ok(lo_b.hull(&hi_b))
}

/// Decides whether `L(s, chi_quad)` has a real zero in
/// `]1 - 1/(c log p), 1]`, escalating precision from [`START_PREC`].
pub fn siegel_scan(p: u64, c: &Ball, prec: u32) -> Result<SiegelZeroReport> {
    check_odd_prime(p)?;
    let floor = Ball::from_decimal("6.4355", c.prec().max(64)).unwrap();
    if c.certainly_lt(&floor) {
        return Err(Error::Domain {
            what: "siegel_scan",
            detail: format!("need c >= 6.4355, got {c}"),
        });
    }
    let interval = (left_endpoint(p, c, prec), Ball::one(prec));
    if p % 4 == 1 {
        return Ok(SiegelZeroReport {
            p,
            present: false,
            beta: None,
            interval,
            c: c.clone(),
            method: SiegelMethod::Parity,
            certified: true,
            endpoint_value: None,
        });
    }
    escalate(prec, MAX_PREC.max(prec), |bits| {
        let sigma0 = left_endpoint(p, c, bits + 16);
        let v = quadratic_l_value(p, &sigma0, bits)?;
        if v.is_positive() {
            return Ok(SiegelZeroReport {
                p,
                present: false,
                beta: None,
                interval: interval.clone(),
                c: c.clone(),
                method: SiegelMethod::EndpointPositivity,
                certified: true,
                endpoint_value: Some(v),
            });
        }
        if !v.is_negative() {
            return Err(Error::Undetermined {
                what: "sign of L(sigma_0, chi_quad)",
                bits,
            });
        }
        let lo = sigma0.upper();
        let hi = Dyadic::from_i64(1);
        let beta = bisect_root(
            |x| quadratic_l_value(p, x, bits),
            &lo,
            &hi,
            i64::from(bits / 4),
            bits,
        )?;
        Ok(SiegelZeroReport {
            p,
            present: true,
            beta: Some(beta),
            interval: interval.clone(),
            c: c.clone(),
            method: SiegelMethod::Bisection,
            certified: true,
            endpoint_value: Some(v),
        })
    })
}

/// `f^(nu)(sigma)` with its inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct FValue {
    pub p: u64,
    pub nu: usize,
    pub sigma: Ball,
    pub value: Ball,
    /// Radius bound of the imaginary part that was folded into `value`.
    pub imag_rad: Mag,
    pub siegel: SiegelZeroReport,
}

/// `d^nu/dsigma^nu log(sigma - beta)`.
fn siegel_term(sigma: &Ball, beta: &Ball, nu: usize) -> Result<Ball> {
    let d = sigma.sub(beta);
    if !d.is_positive() {
        return Err(Error::Domain {
            what: "f",
            detail: "sigma must exceed the Siegel zero".into(),
        });
    }
    if nu == 0 {
        return Ok(d.log());
    }
    // (-1)^(nu-1) (nu-1)! / d^nu
    let fact = Ball::from_bigint(&crate::ball::factorial(nu as u64 - 1), sigma.prec());
    let v = fact.div(&d.pow_u(nu as u64));
    Ok(if nu % 2 == 0 { v.neg() } else { v })
}

/// `f^(nu)(sigma)` for `nu = 0..=max_nu` at one `sigma`, sharing the
/// L-function jets.
pub fn f_derivatives(
    p: u64,
    max_nu: usize,
    sigma: &Ball,
    siegel: &SiegelZeroReport,
    prec: u32,
) -> Result<Vec<FValue>> {
    let jets = odd_log_l_jets(p, sigma, max_nu, prec)?;
    let wp = jets.first().map(|(_, j)| j[0].prec()).unwrap_or(prec);
    let mut out = Vec::with_capacity(max_nu + 1);
    for nu in 0..=max_nu {
        let mut sum = ComplexBall::zero(wp);
        for (_, j) in &jets {
            sum = sum.add(&j[nu]);
        }
        if !sum.im.contains_zero() {
            return Err(Error::Internal(format!(
                "sum over odd characters is not real for p = {p}, nu = {nu}: {sum}"
            )));
        }
        let fact = Ball::from_bigint(&crate::ball::factorial(nu as u64), wp);
        let imag_rad = sum.im.abs_upper().mul(fact.abs_upper());
        let mut value = sum.re.mul(&fact).add_error(imag_rad);
        if let (true, Some(beta)) = (siegel.present, siegel.beta.as_ref()) {
            value = value.sub(&siegel_term(&sigma.with_prec(wp), beta, nu)?);
        }
        if !value.is_finite() {
            return Err(Error::PrecisionExhausted {
                bits: prec,
                detail: "f enclosure is not finite".into(),
            });
        }
        out.push(FValue {
            p,
            nu,
            sigma: sigma.clone(),
            value: value.with_prec(prec),
            imag_rad,
            siegel: siegel.clone(),
        });
    }
    Ok(out)
}

/// `f^(nu)(sigma)` for `sigma` in `]1, 1 + 2/(c log p)]`.
pub fn f_derivative(
    p: u64,
    nu: usize,
    sigma: &Ball,
    c: &Ball,
    siegel: &SiegelZeroReport,
    prec: u32,
) -> Result<FValue> {
    check_odd_prime(p)?;
    let one = Ball::one(prec);
    let right = one.add(&c.with_prec(prec).mul(&Ball::from_u64(p, prec).log()).recip().mul_2exp(1));
    if !one.certainly_lt(sigma) || !sigma.certainly_le(&right) {
        return Err(Error::Domain {
            what: "f_derivative",
            detail: format!("sigma = {sigma} outside ]1, 1 + 2/(c log p)]"),
        });
    }
    let mut v = f_derivatives(p, nu, sigma, siegel, prec)?;
    Ok(v.pop().expect("nu + 1 values"))
}

/// `f(1) = sum_{chi odd} log L(1, chi) - 1_beta log(1 - beta)`.
pub fn f_at_one(p: u64, siegel: &SiegelZeroReport, prec: u32) -> Result<FValue> {
    check_odd_prime(p)?;
    let mut v = f_derivatives(p, 0, &Ball::one(prec), siegel, prec)?;
    Ok(v.pop().expect("one value"))
}

/// Both sides of the orthogonality identity
/// `sum_{chi odd} log L(sigma, chi) = (p-1)/2 (Pi_sigma(+1) - Pi_sigma(-1))`
/// with the prime-power side truncated at `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct Eq2Residual {
    pub p: u64,
    pub sigma: Ball,
    pub x: u64,
    /// `sum_{chi odd} log L(sigma, chi)` (real part; imaginary radius folded in).
    pub lhs: Ball,
    /// Truncated prime-power side.
    pub rhs: Ball,
    /// Certified bound for the dropped prime powers above `X`.
    pub tail: Mag,
    /// `lhs - rhs`, widened by `tail`.
    pub residual: Ball,
}

/// Checks the orthogonality identity at real `sigma` in `[2, 3]`.
pub fn eq2_residual(p: u64, sigma: &Ball, x: u64, prec: u32) -> Result<Eq2Residual> {
    let sieve = PrimeSieve::new(x);
    eq2_residual_with(&sieve, p, sigma, x, prec)
}

/// As [`eq2_residual`], reusing a sieve that covers `x`.
pub fn eq2_residual_with(sieve: &PrimeSieve, p: u64, sigma: &Ball, x: u64, prec: u32) -> Result<Eq2Residual> {
    check_odd_prime(p)?;
    if !Ball::from_i64(2, prec).certainly_le(sigma) || !sigma.certainly_le(&Ball::from_i64(3, prec)) {
        return Err(Error::Domain {
            what: "eq2_residual",
            detail: format!("need 2 <= sigma <= 3, got {sigma}"),
        });
    }
    if x < p * p {
        return Err(Error::Domain {
            what: "eq2_residual",
            detail: format!("need X >= p^2, got {x}"),
        });
    }
    let jets = odd_log_l_jets(p, sigma, 0, prec)?;
    let wp = jets[0].1[0].prec();
    let mut lhs_c = ComplexBall::zero(wp);
    for (_, j) in &jets {
        lhs_c = lhs_c.add(&j[0]);
    }
    if !lhs_c.im.contains_zero() {
        return Err(Error::Internal(format!("imaginary part does not vanish: {lhs_c}")));
    }
    let lhs = lhs_c.re.add_error(lhs_c.im.abs_upper());
    let plus = weighted_power_sum(sieve, p, Residue::Plus, x, sigma, wp)?;
    let minus = weighted_power_sum(sieve, p, Residue::Minus, x, sigma, wp)?;
    let half = Ball::from_u64((p - 1) / 2, wp);
    let rhs = half.mul(&plus.sub(&minus));
    // each class contributes at most X^-sigma + X^(1-sigma) / (p (sigma - 1))
    // beyond X, and the difference of two nonnegative tails is at most the
    // larger one
    let xb = Ball::from_u64(x, wp);
    let log_x = xb.log();
    let sig = sigma.with_prec(wp);
    let one = Ball::one(wp);
    let first = log_x.mul(&sig).neg().exp();
    let rest = log_x
        .mul(&one.sub(&sig))
        .exp()
        .div(&Ball::from_u64(p, wp).mul(&sig.sub(&one)));
    let tail = half.mul(&first.add(&rest)).abs_upper();
    let residual = lhs.sub(&rhs).add_error(tail);
    Ok(Eq2Residual {
        p,
        sigma: sigma.clone(),
        x,
        lhs: lhs.with_prec(prec),
        rhs: rhs.with_prec(prec),
        tail,
        residual: residual.with_prec(prec),
    })
}

/// `sum 1/(m q^(m sigma))` over `q^m <= x`, `q^m ≡ class (mod p)`.
fn weighted_power_sum(sieve: &PrimeSieve, p: u64, class: Residue, x: u64, sigma: &Ball, prec: u32) -> Result<Ball> {
    let powers = sieve.prime_powers_in_class(p, class, x)?;
    let int_sigma = if sigma.is_exact() && sigma.mid().exponent() >= 0 {
        crate::ball::mid_to_i64(sigma).and_then(|n| u32::try_from(n).ok())
    } else {
        None
    };
    if let Some(e) = int_sigma {
        // fixed point with 120 fraction bits; every term truncates once
        const W: u32 = 120;
        let mut sum: u128 = 0;
        let mut ok = true;
        for pp in &powers {
            let d = u128::from(pp.value)
                .checked_pow(e)
                .and_then(|v| v.checked_mul(u128::from(pp.m)));
            match d {
                Some(d) => sum += (1u128 << W) / d,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let v = Ball::from_ratio(&num_bigint::BigInt::from(sum), &(num_bigint::BigInt::from(1) << W), prec);
            return Ok(v.add_error(Mag::from_u64(powers.len() as u64 + 1).mul_2exp(-i64::from(W))));
        }
    }
    let mut sum = Ball::zero(prec);
    for pp in &powers {
        let v = Ball::from_u64(pp.value, prec).log().mul(sigma).neg().exp().div_u64(u64::from(pp.m));
        sum = sum.add(&v);
    }
    Ok(sum)
}
