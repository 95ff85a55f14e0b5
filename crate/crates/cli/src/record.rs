//! JSON shapes for cache entries and output lines.
//!
//! Integers that can outgrow `u64` are decimal strings; real enclosures are
//! `{mid, rad, bits}` with both numbers as exact decimal strings.

use std::str::FromStr;

use hminus_core::arith::{PiSum, Residue};
use hminus_core::ball::{Ball, Dyadic, Mag};
use hminus_core::bounds::{BoundReport, Params};
use hminus_core::classnumber::{Method, RelativeClassNumberRecord};
use hminus_core::lfunc::SiegelZeroReport;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Real {
    pub mid: String,
    pub rad: String,
    pub bits: u32,
}

impl Real {
    pub fn from_ball(b: &Ball) -> Real {
        let rad = if b.rad().is_inf() {
            "inf".to_string()
        } else {
            Dyadic::from_mag(b.rad()).to_decimal_exact()
        };
        Real { mid: b.mid().to_decimal_exact(), rad, bits: b.prec() }
    }

    pub fn to_ball(&self) -> Option<Ball> {
        let mid = Dyadic::from_decimal_exact(&self.mid)?;
        let rad = if self.rad == "inf" {
            Mag::INF
        } else {
            Dyadic::from_decimal_exact(&self.rad)?.mag_upper()
        };
        Some(Ball::new(mid, rad, self.bits))
    }
}

fn real_opt(b: &Option<Ball>) -> Option<Real> {
    b.as_ref().map(Real::from_ball)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HminusPayload {
    pub h_minus: String,
    #[serde(rename = "log_G")]
    pub log_g: Real,
    pub log_ratio: Real,
    pub method: String,
    pub precision_bits: u32,
    pub certified: bool,
    pub distance: Option<f64>,
}

impl HminusPayload {
    pub fn from_record(r: &RelativeClassNumberRecord) -> HminusPayload {
        HminusPayload {
            h_minus: r.h_minus.to_string(),
            log_g: Real::from_ball(&r.log_g),
            log_ratio: Real::from_ball(&r.log_ratio),
            method: r.method.as_str().to_string(),
            precision_bits: r.precision_bits,
            certified: r.certified,
            distance: r.distance,
        }
    }

    pub fn to_record(&self, p: u64) -> Option<RelativeClassNumberRecord> {
        let method = match self.method.as_str() {
            "analytic" => Method::Analytic,
            "maillet" => Method::Maillet,
            "both" => Method::Both,
            _ => return None,
        };
        Some(RelativeClassNumberRecord {
            p,
            h_minus: BigUint::from_str(&self.h_minus).ok()?,
            log_g: self.log_g.to_ball()?,
            log_ratio: self.log_ratio.to_ball()?,
            method,
            precision_bits: self.precision_bits,
            certified: self.certified,
            distance: self.distance,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiegelPayload {
    pub present: bool,
    pub beta: Option<Real>,
    pub interval: [Real; 2],
    pub c: Real,
    pub method: String,
    pub certified: bool,
    pub endpoint_value: Option<Real>,
    pub assumption: Option<String>,
}

impl SiegelPayload {
    pub fn from_report(r: &SiegelZeroReport) -> SiegelPayload {
        SiegelPayload {
            present: r.present,
            beta: real_opt(&r.beta),
            interval: [Real::from_ball(&r.interval.0), Real::from_ball(&r.interval.1)],
            c: Real::from_ball(&r.c),
            method: r.method.as_str().to_string(),
            certified: r.certified,
            endpoint_value: real_opt(&r.endpoint_value),
            assumption: r.method.assumption().map(String::from),
        }
    }
}

/// Line of the cache file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub kind: String,
    pub p: u64,
    pub payload: serde_json::Value,
    pub config_fingerprint: String,
    pub timestamp: u64,
}

/// Output line of `scan` and `hminus`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: u64,
    pub h_minus: String,
    #[serde(rename = "log_G")]
    pub log_g: Real,
    pub log_ratio: Real,
    pub siegel_beta: Option<Real>,
    pub precision_bits: u32,
    pub method: String,
    pub certified: bool,
}

pub const SCAN_CSV_HEADER: &str = "p,h_minus,log_G,log_ratio,siegel_beta,precision_bits,method,certified";

/// Midpoint to 20 places; CSV is a hand-off format, the cache keeps the
/// full enclosure.
pub fn csv_real(r: &Real) -> String {
    r.to_ball().map(|b| b.mid_decimal(20)).unwrap_or_default()
}

impl ScanRow {
    pub fn new(p: u64, h: &HminusPayload, siegel: Option<&SiegelPayload>) -> ScanRow {
        ScanRow {
            p,
            h_minus: h.h_minus.clone(),
            log_g: h.log_g.clone(),
            log_ratio: h.log_ratio.clone(),
            siegel_beta: siegel.and_then(|s| s.beta.clone()),
            precision_bits: h.precision_bits,
            method: h.method.clone(),
            certified: h.certified,
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.p,
            self.h_minus,
            csv_real(&self.log_g),
            csv_real(&self.log_ratio),
            self.siegel_beta.as_ref().map(csv_real).unwrap_or_default(),
            self.precision_bits,
            self.method,
            self.certified
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub nu: Option<u64>,
    pub sigma: Option<Real>,
    pub c: Option<Real>,
    pub x: Option<u64>,
    pub indicator: Option<u32>,
    pub class: Option<i64>,
}

impl ParamsJson {
    fn from_params(p: &Params) -> ParamsJson {
        ParamsJson {
            nu: p.nu,
            sigma: real_opt(&p.sigma),
            c: real_opt(&p.c),
            x: p.x,
            indicator: p.indicator,
            class: p.class.map(Residue::sign),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub bound_id: String,
    pub p: u64,
    pub parameters: ParamsJson,
    pub lhs: Option<Real>,
    pub rhs: Option<Real>,
    pub status: String,
    pub pass: bool,
    pub notes: String,
}

pub const REPORT_CSV_HEADER: &str = "bound_id,p,nu,sigma,c,x,indicator,class,lhs,rhs,status,notes";

impl ReportJson {
    pub fn from_report(r: &BoundReport) -> ReportJson {
        ReportJson {
            bound_id: r.bound.as_str().to_string(),
            p: r.p,
            parameters: ParamsJson::from_params(&r.params),
            lhs: real_opt(&r.lhs),
            rhs: real_opt(&r.rhs),
            status: r.status.as_str().to_string(),
            pass: r.passed(),
            notes: r.notes.clone(),
        }
    }

    pub fn csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let q = &self.parameters;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.bound_id,
            self.p,
            opt(q.nu.map(|v| v.to_string())),
            opt(q.sigma.as_ref().map(csv_real)),
            opt(q.c.as_ref().map(csv_real)),
            opt(q.x.map(|v| v.to_string())),
            opt(q.indicator.map(|v| v.to_string())),
            opt(q.class.map(|v| format!("{v:+}"))),
            opt(self.lhs.as_ref().map(csv_real)),
            opt(self.rhs.as_ref().map(csv_real)),
            self.status,
            self.notes.replace([',', '\n'], ";")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiJson {
    pub p: u64,
    pub class: i64,
    pub x: u64,
    /// Exact value as `numerator/denominator`.
    pub value: String,
    pub value_decimal: String,
    pub terms: usize,
    pub bound: Option<Real>,
    pub pass: Option<bool>,
    pub notes: String,
}

impl PiJson {
    pub fn new(s: &PiSum, bound: Option<&Ball>, notes: String) -> PiJson {
        let ball = s.to_ball(128);
        PiJson {
            p: s.p,
            class: s.class.sign(),
            x: s.x,
            value: format!("{}/{}", s.value.numer(), s.value.denom()),
            value_decimal: ball.mid_decimal(12),
            terms: s.terms,
            bound: bound.map(Real::from_ball),
            pass: bound.map(|b| ball.certainly_le(b)),
            notes,
        }
    }
}
