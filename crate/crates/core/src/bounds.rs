//! The explicit constants and bounds around `f(s)` and `h_p^-`, and sweeps
//! that compare computed quantities against them.
//!
//! `loglog` below is the iterated logarithm `log log x`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::arith::{bt_bound, check_odd_prime, is_prime, PrimeSieve, Residue};
use crate::ball::{factorial, Ball};
use crate::classnumber::{hminus_analytic, PrecisionPolicy, ANALYTIC_CAP};
use crate::lfunc::{eq2_residual_with, f_at_one, f_derivatives, siegel_scan, SiegelZeroReport};
use crate::{Error, Result};

/// The smallest admissible `c`.
pub const C_MIN: &str = "6.4355";

pub fn c_min(prec: u32) -> Ball {
    Ball::from_decimal(C_MIN, prec).expect("constant parses")
}

fn loglog(x: u64, prec: u32) -> Ball {
    Ball::from_u64(x, prec).log().log()
}

fn decimal(s: &str, prec: u32) -> Ball {
    Ball::from_decimal(s, prec).expect("constant parses")
}

/// `floor(log nu)`, exact.
pub fn floor_log(nu: u64) -> u64 {
    assert!(nu >= 1, "floor_log of 0");
    let v = Ball::from_u64(nu, 128);
    let mut k = 0;
    loop {
        let e = Ball::from_u64(k + 1, 128).exp();
        if e.certainly_le(&v) {
            k += 1;
        } else {
            assert!(v.certainly_lt(&e), "e^{} not separated from {nu}", k + 1);
            return k;
        }
    }
}

/// Right end `1 + k/(c log p)`.
pub fn sigma_step(p: u64, k: u32, c: &Ball, prec: u32) -> Ball {
    let l = c.with_prec(prec).mul(&Ball::from_u64(p, prec).log());
    Ball::one(prec).add(&Ball::from_u64(u64::from(k), prec).div(&l))
}

fn check_sigma(p: u64, sigma: &Ball, c: &Ball, k: u32, what: &'static str) -> Result<()> {
    let prec = sigma.prec();
    let one = Ball::one(prec);
    let right = sigma_step(p, k, c, prec);
    if !one.certainly_lt(sigma) || right.certainly_lt(sigma) {
        return Err(Error::Domain {
            what,
            detail: format!("need 1 < sigma <= 1 + {k}/(c log p), got {sigma}"),
        });
    }
    Ok(())
}

/// The constant `c_{p,nu}` of the derivative bound, `nu >= 1`, evaluated at
/// the given `sigma`. The interval for `sigma` is enforced by
/// [`lemma22_rhs`], not here.
pub fn c_p_nu(p: u64, nu: u64, sigma: &Ball, c: &Ball, prec: u32) -> Result<Ball> {
    if nu == 0 {
        return Err(Error::InvalidInput("c_{p,nu} needs nu >= 1".into()));
    }
    check_odd_prime(p)?;
    let wp = prec + 32;
    let c = c.with_prec(wp);
    let s = sigma.with_prec(wp);
    let lp = Ball::from_u64(p, wp).log();
    let fl = floor_log(nu);
    let c_nu_fact = c.pow_u(nu).mul(&Ball::from_bigint(&factorial(nu - 1), wp));
    let t1 = Ball::ln2(wp).div(&c_nu_fact.mul(&lp).mul_2exp(1));
    let t2 = lp
        .log()
        .add(&c.log())
        .sub(&Ball::ln2(wp).log())
        .add(&Ball::from_i64(-1, wp).exp())
        .div(&c_nu_fact);
    let t3 = c.mul(&lp).recip();
    let t4 = s.mul_i64(fl as i64).div_u64(nu - fl);
    let t5 = s
        .mul_i64(nu as i64)
        .div(&c.pow_u(fl).mul(&Ball::from_bigint(&factorial(fl), wp)));
    Ok(t1.add(&t2).add(&t3).add(&t4).add(&t5).with_prec(prec))
}

/// Right-hand side of the derivative bound on `]1, 1 + 1/(c log p)]`:
/// `(1 + 1_beta) log(1/(sigma-1)) + 3/2` for `nu = 0` and
/// `(1 + 1_beta + c_{p,nu}) (nu-1)! / (sigma-1)^nu` otherwise.
pub fn lemma22_rhs(p: u64, nu: u64, sigma: &Ball, c: &Ball, indicator: u32, prec: u32) -> Result<Ball> {
    check_odd_prime(p)?;
    let wp = prec + 32;
    let s = sigma.with_prec(wp);
    check_sigma(p, &s, c, 1, "lemma22_rhs")?;
    let d = s.sub(&Ball::one(wp));
    let one_b = Ball::from_u64(1 + u64::from(indicator), wp);
    let v = if nu == 0 {
        one_b.mul(&d.recip().log()).add(&Ball::from_i64(3, wp).mul_2exp(-1))
    } else {
        let cp = c_p_nu(p, nu, sigma, c, wp)?;
        one_b
            .add(&cp)
            .mul(&Ball::from_bigint(&factorial(nu - 1), wp))
            .div(&d.pow_u(nu))
    };
    Ok(v.with_prec(prec))
}

fn check_c(c: &Ball, what: &'static str) -> Result<()> {
    if !c.is_finite() || c.certainly_lt(&c_min(c.prec().max(64))) {
        return Err(Error::Domain {
            what,
            detail: format!("need c >= {C_MIN}, got {c}"),
        });
    }
    Ok(())
}

/// `2 c^nu nu! p log^(nu+1) p`; needs `c >= 6.4355` and
/// `(p-1)/log p > c`.
pub fn lemma23_rhs(p: u64, nu: u64, c: &Ball, prec: u32) -> Result<Ball> {
    check_odd_prime(p)?;
    check_c(c, "lemma23_rhs")?;
    let wp = prec + 32;
    let lp = Ball::from_u64(p, wp).log();
    if !c.certainly_lt(&Ball::from_u64(p - 1, wp).div(&lp)) {
        return Err(Error::Domain {
            what: "lemma23_rhs",
            detail: format!("need (p-1)/log p > c for p = {p}"),
        });
    }
    let c = c.with_prec(wp);
    let v = c
        .pow_u(nu)
        .mul(&Ball::from_bigint(&factorial(nu), wp))
        .mul(&Ball::from_u64(2 * p, wp))
        .mul(&lp.pow_u(nu + 1));
    Ok(v.with_prec(prec))
}

/// `sigma_nu - 1` together with its elementary lower bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaNu {
    pub excess: Ball,
    /// `1 / (c log p (2 nu p log p)^(1/nu))`.
    pub lower_bound: Ball,
}

/// `sigma_nu - 1 = (1/(c log p)) ((1 + 1_beta + c_{p,nu}) / (2 nu p log p))^(1/nu)`
/// with `c_{p,nu}` taken at `sigma`.
pub fn sigma_nu(p: u64, nu: u64, c: &Ball, indicator: u32, sigma: &Ball, prec: u32) -> Result<SigmaNu> {
    if nu == 0 {
        return Err(Error::InvalidInput("sigma_nu needs nu >= 1".into()));
    }
    let wp = prec + 32;
    let cp = c_p_nu(p, nu, sigma, c, wp)?;
    let c = c.with_prec(wp);
    let lp = Ball::from_u64(p, wp).log();
    let base = Ball::from_u64(2 * nu * p, wp).mul(&lp);
    let inv_nu = Ball::one(wp).div_u64(nu);
    let num = Ball::from_u64(1 + u64::from(indicator), wp).add(&cp);
    let scale = c.mul(&lp).recip();
    let excess = scale.mul(&num.div(&base).pow(&inv_nu));
    let lower_bound = scale.div(&base.pow(&inv_nu));
    if excess.certainly_lt(&lower_bound) {
        return Err(Error::Internal(format!("sigma_nu below its lower bound for p = {p}, nu = {nu}")));
    }
    Ok(SigmaNu {
        excess: excess.with_prec(prec),
        lower_bound: lower_bound.with_prec(prec),
    })
}

/// `(1 + 2 1_beta + e^(1/c)) loglog p + (3 + e^(1/c)) log c + 0.791 e^(1/c)
/// + 10.720 + 0.943/c`, for `p > 500` and `c >= 6.4355`.
pub fn thm31_bound(p: u64, c: &Ball, indicator: u32, prec: u32) -> Result<Ball> {
    if p <= 500 {
        return Err(Error::Domain {
            what: "thm31_bound",
            detail: format!("need p > 500, got {p}"),
        });
    }
    check_c(c, "thm31_bound")?;
    let wp = prec + 32;
    let c = c.with_prec(wp);
    let e = c.recip().exp();
    let lead = Ball::from_u64(1 + 2 * u64::from(indicator), wp).add(&e).mul(&loglog(p, wp));
    let v = lead
        .add(&Ball::from_i64(3, wp).add(&e).mul(&c.log()))
        .add(&decimal("0.791", wp).mul(&e))
        .add(&decimal("10.720", wp))
        .add(&decimal("0.943", wp).div(&c));
    Ok(v.with_prec(prec))
}

/// `6.4355 loglog p / loglog 500`, for `p >= 500`.
pub fn default_c(p: u64, prec: u32) -> Result<Ball> {
    if p < 500 {
        return Err(Error::Domain {
            what: "default_c",
            detail: format!("need p >= 500, got {p}"),
        });
    }
    let wp = prec + 32;
    Ok(c_min(wp).mul(&loglog(p, wp)).div(&loglog(500, wp)).with_prec(prec))
}

/// `((p-1)/4) log(4 pi^2 / 39)`.
pub fn cor33_rhs(p: u64, prec: u32) -> Ball {
    let wp = prec + 32;
    let r = Ball::pi(wp).sqr().mul_2exp(2).div_u64(39).log();
    r.mul_i64(p as i64 - 1).mul_2exp(-2).with_prec(prec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundId {
    Lemma21,
    Lemma22,
    Lemma23,
    Thm31,
    Thm11,
    Cor33Crossover,
    Eq2Identity,
}

impl BoundId {
    pub const ALL: [BoundId; 7] = [
        BoundId::Lemma21,
        BoundId::Lemma22,
        BoundId::Lemma23,
        BoundId::Thm31,
        BoundId::Thm11,
        BoundId::Cor33Crossover,
        BoundId::Eq2Identity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundId::Lemma21 => "lemma21",
            BoundId::Lemma22 => "lemma22",
            BoundId::Lemma23 => "lemma23",
            BoundId::Thm31 => "thm31",
            BoundId::Thm11 => "thm11",
            BoundId::Cor33Crossover => "cor33",
            BoundId::Eq2Identity => "eq2",
        }
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<BoundId> {
        let id = match s {
            "lemma21" => BoundId::Lemma21,
            "lemma22" => BoundId::Lemma22,
            "lemma23" => BoundId::Lemma23,
            "thm31" => BoundId::Thm31,
            "thm11" => BoundId::Thm11,
            "cor33" | "cor33_crossover" => BoundId::Cor33Crossover,
            "eq2" | "eq2_identity" => BoundId::Eq2Identity,
            _ => return Err(Error::InvalidInput(format!("unknown bound {s:?}"))),
        };
        Ok(id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

/// Grid coordinates of one report; unused fields stay `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    pub nu: Option<u64>,
    pub sigma: Option<Ball>,
    pub c: Option<Ball>,
    pub x: Option<u64>,
    pub indicator: Option<u32>,
    pub class: Option<Residue>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub bound: BoundId,
    pub p: u64,
    pub params: Params,
    pub lhs: Option<Ball>,
    pub rhs: Option<Ball>,
    pub status: Status,
    pub notes: String,
}

impl BoundReport {
    /// Passes when the upper end of `lhs` is at most the lower end of `rhs`.
    pub fn compare(bound: BoundId, p: u64, params: Params, lhs: Ball, rhs: Ball) -> BoundReport {
        let status = if lhs.certainly_le(&rhs) { Status::Pass } else { Status::Fail };
        BoundReport { bound, p, params, lhs: Some(lhs), rhs: Some(rhs), status, notes: String::new() }
    }

    pub fn skipped(bound: BoundId, p: u64, params: Params, notes: impl Into<String>) -> BoundReport {
        BoundReport { bound, p, params, lhs: None, rhs: None, status: Status::Skipped, notes: notes.into() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> BoundReport {
        self.notes = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// A point of the `x` grid for the prime-power bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XPoint {
    TimesP(u64),
    PSquared,
    Fixed(u64),
}

impl XPoint {
    pub fn at(&self, p: u64) -> u64 {
        match *self {
            XPoint::TimesP(k) => k * p,
            XPoint::PSquared => p * p,
            XPoint::Fixed(x) => x,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub prec: u32,
    /// Overrides `6.4355` (lemma22, lemma23) and `default_c(p)` (thm31, thm11).
    pub c: Option<Ball>,
    pub x_grid: Vec<XPoint>,
    pub nus: Vec<u64>,
    /// Grid `sigma = 1 + k/(c log p)` for these `k`.
    pub sigma_steps: Vec<u32>,
    pub eq2_sigma: u32,
    pub eq2_x: u64,
    /// Evaluate every bound with `1_beta = 1` whatever the scan found.
    pub force_indicator: bool,
    pub policy: PrecisionPolicy,
    pub siegel_prec: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            prec: 128,
            c: None,
            x_grid: alloc::vec![XPoint::TimesP(2), XPoint::TimesP(10), XPoint::PSquared, XPoint::Fixed(10_000_000)],
            nus: alloc::vec![0, 1, 2, 3],
            sigma_steps: alloc::vec![1, 2],
            eq2_sigma: 2,
            eq2_x: 10_000_000,
            force_indicator: false,
            policy: PrecisionPolicy::default(),
            siegel_prec: 64,
        }
    }
}

impl VerifyConfig {
    fn lemma_c(&self) -> Ball {
        self.c.clone().unwrap_or_else(|| c_min(self.prec))
    }

    fn thm_c(&self, p: u64) -> Result<Ball> {
        match &self.c {
            Some(c) => Ok(c.clone()),
            None => default_c(p, self.prec),
        }
    }

    fn indicator(&self, scan: &SiegelZeroReport) -> u32 {
        if self.force_indicator {
            1
        } else {
            scan.indicator()
        }
    }
}

/// Reports for one prime; `sieve` must cover every `x` used by lemma21 and
/// eq2 (it is built on demand when `None`).
pub fn verify_prime(bound: BoundId, p: u64, cfg: &VerifyConfig, sieve: Option<&PrimeSieve>) -> Result<Vec<BoundReport>> {
    check_odd_prime(p)?;
    match bound {
        BoundId::Lemma21 => verify_lemma21(p, cfg, sieve),
        BoundId::Lemma22 | BoundId::Lemma23 => verify_lemma_derivs(bound, p, cfg),
        BoundId::Thm31 | BoundId::Thm11 => verify_thm(bound, p, cfg),
        BoundId::Cor33Crossover => Ok(alloc::vec![cor33_report(p, cfg.prec)?]),
        BoundId::Eq2Identity => verify_eq2(p, cfg, sieve),
    }
}

/// [`verify_prime`] over every odd prime in `[lo, hi]`, ascending.
pub fn verify(bound: BoundId, lo: u64, hi: u64, cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    let primes: Vec<u64> = (lo.max(3)..=hi).filter(|&n| is_prime(n)).collect();
    let sieve = match bound {
        BoundId::Lemma21 | BoundId::Eq2Identity if !primes.is_empty() => {
            Some(PrimeSieve::new(sieve_limit(bound, *primes.last().unwrap(), cfg)))
        }
        _ => None,
    };
    let mut out = Vec::new();
    for p in primes {
        out.extend(verify_prime(bound, p, cfg, sieve.as_ref())?);
    }
    Ok(out)
}

/// Sieve size needed by [`verify_prime`] for primes up to `p_max`.
pub fn sieve_limit(bound: BoundId, p_max: u64, cfg: &VerifyConfig) -> u64 {
    match bound {
        BoundId::Lemma21 => cfg.x_grid.iter().map(|x| x.at(p_max)).max().unwrap_or(2),
        BoundId::Eq2Identity => cfg.eq2_x.max(p_max * p_max),
        _ => 2,
    }
}

fn verify_lemma21(p: u64, cfg: &VerifyConfig, sieve: Option<&PrimeSieve>) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let owned;
    let sieve = match sieve {
        Some(s) => s,
        None => {
            owned = PrimeSieve::new(sieve_limit(BoundId::Lemma21, p, cfg));
            &owned
        }
    };
    for xp in &cfg.x_grid {
        let x = xp.at(p);
        for class in [Residue::Plus, Residue::Minus] {
            let params = Params { x: Some(x), class: Some(class), ..Params::default() };
            if p <= 500 {
                out.push(BoundReport::skipped(BoundId::Lemma21, p, params, "p <= 500"));
                continue;
            }
            if x <= p {
                out.push(BoundReport::skipped(BoundId::Lemma21, p, params, "x <= p"));
                continue;
            }
            let lhs = sieve.pi_sum(p, class, x)?.to_ball(cfg.prec);
            let rhs = bt_bound(p, &Ball::from_u64(x, cfg.prec))?;
            out.push(BoundReport::compare(BoundId::Lemma21, p, params, lhs, rhs));
        }
    }
    Ok(out)
}

fn verify_lemma_derivs(bound: BoundId, p: u64, cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    let c = cfg.lemma_c();
    let scan = siegel_scan(p, &c, cfg.siegel_prec)?;
    let ind = cfg.indicator(&scan);
    let max_nu = cfg.nus.iter().copied().max().unwrap_or(0) as usize;
    let mut out = Vec::new();
    for &k in &cfg.sigma_steps {
        let sigma = sigma_step(p, k, &c, cfg.prec);
        let base = Params { sigma: Some(sigma.clone()), c: Some(c.clone()), indicator: Some(ind), ..Params::default() };
        let in_domain = match bound {
            BoundId::Lemma22 => k == 1,
            _ => (1..=2).contains(&k),
        };
        if !in_domain {
            for &nu in &cfg.nus {
                let params = Params { nu: Some(nu), ..base.clone() };
                out.push(BoundReport::skipped(bound, p, params, format!("sigma = 1 + {k}/(c log p) outside the interval")));
            }
            continue;
        }
        let fs = f_derivatives(p, max_nu, &sigma, &scan, cfg.prec)?;
        for &nu in &cfg.nus {
            let params = Params { nu: Some(nu), ..base.clone() };
            let lhs = fs[nu as usize].value.abs();
            let rhs = match bound {
                BoundId::Lemma22 => lemma22_rhs(p, nu, &sigma, &c, ind, cfg.prec),
                _ => lemma23_rhs(p, nu, &c, cfg.prec),
            };
            match rhs {
                Ok(rhs) => out.push(BoundReport::compare(bound, p, params, lhs, rhs)),
                Err(Error::Domain { detail, .. }) => out.push(BoundReport::skipped(bound, p, params, detail)),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn verify_thm(bound: BoundId, p: u64, cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    let mut params = Params::default();
    if p <= 500 {
        return Ok(alloc::vec![BoundReport::skipped(bound, p, params, "p <= 500")]);
    }
    let c = cfg.thm_c(p)?;
    params.c = Some(c.clone());
    let scan = siegel_scan(p, &c, cfg.siegel_prec)?;
    let ind = cfg.indicator(&scan);
    params.indicator = Some(ind);
    let rhs = thm31_bound(p, &c, ind, cfg.prec)?;
    let lhs = match bound {
        BoundId::Thm31 => f_at_one(p, &scan, cfg.prec)?.value.abs(),
        _ => {
            if scan.present {
                return Ok(alloc::vec![BoundReport::skipped(bound, p, params, "Siegel zero present")]);
            }
            if p > ANALYTIC_CAP {
                return Ok(alloc::vec![BoundReport::skipped(bound, p, params, "h_p^- above the feasibility cap")]);
            }
            hminus_analytic(p, cfg.policy)?.log_ratio.with_prec(cfg.prec).abs()
        }
    };
    Ok(alloc::vec![BoundReport::compare(bound, p, params, lhs, rhs)])
}

fn verify_eq2(p: u64, cfg: &VerifyConfig, sieve: Option<&PrimeSieve>) -> Result<Vec<BoundReport>> {
    let x = cfg.eq2_x.max(p * p);
    let sigma = Ball::from_u64(u64::from(cfg.eq2_sigma), cfg.prec);
    let params = Params { sigma: Some(sigma.clone()), x: Some(x), ..Params::default() };
    let owned;
    let sieve = match sieve {
        Some(s) if s.limit() >= x => s,
        _ => {
            owned = PrimeSieve::new(x);
            &owned
        }
    };
    let r = eq2_residual_with(sieve, p, &sigma, x, cfg.prec)?;
    // |lhs - rhs| against the certified truncation tail
    let lhs = r.lhs.sub(&r.rhs).abs();
    let rhs = Ball::new(crate::ball::Dyadic::from_mag(r.tail), crate::ball::Mag::ZERO, cfg.prec);
    let note = if x != cfg.eq2_x { format!("X raised to p^2 = {x}") } else { String::new() };
    Ok(alloc::vec![BoundReport::compare(BoundId::Eq2Identity, p, params, lhs, rhs).with_note(note)])
}

fn cor33_report(p: u64, prec: u32) -> Result<BoundReport> {
    let c = default_c(p, prec)?;
    let lhs = thm31_bound(p, &c, 1, prec)?;
    let rhs = cor33_rhs(p, prec);
    let params = Params { c: Some(c), indicator: Some(1), ..Params::default() };
    Ok(BoundReport::compare(BoundId::Cor33Crossover, p, params, lhs, rhs))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossoverReport {
    pub reports: Vec<BoundReport>,
    /// Largest prime in range where the comparison fails.
    pub last_fail: Option<u64>,
    /// First prime from which every later prime in range passes.
    pub first_pass: Option<u64>,
}

/// The comparison `thm31_bound(p, default_c(p), 1) <= ((p-1)/4) log(4 pi^2/39)`
/// for every prime in `[lo, hi]`.
pub fn cor33_crossover(lo: u64, hi: u64, prec: u32) -> Result<CrossoverReport> {
    let reports = verify(BoundId::Cor33Crossover, lo.max(500), hi, &VerifyConfig { prec, ..VerifyConfig::default() })?;
    let last_fail = reports.iter().rev().find(|r| !r.passed()).map(|r| r.p);
    let first_pass = match last_fail {
        Some(f) => reports.iter().find(|r| r.p > f).map(|r| r.p),
        None => reports.first().map(|r| r.p),
    };
    Ok(CrossoverReport { reports, last_fail, first_pass })
}
