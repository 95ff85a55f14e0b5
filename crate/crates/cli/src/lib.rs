//! Command-line front end for `hminus-core`: configuration, a resumable
//! record cache and CSV/JSONL export.
//!
//! Exit codes: 0 all pass, 1 verification failure, 2 invalid input,
//! 3 precision exhaustion.

pub mod cache;
pub mod config;
pub mod error;
pub mod record;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hminus_core::arith::{bt_bound, is_prime, PrimeSieve, Residue};
use hminus_core::ball::Ball;
use hminus_core::bounds::{cor33_crossover, sieve_limit, verify_prime, BoundId, BoundReport};
use hminus_core::classnumber::{hminus, Method, ANALYTIC_CAP};
use hminus_core::lfunc::siegel_scan;
use rayon::prelude::*;

use crate::cache::Cache;
use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::record::{HminusPayload, PiJson, ReportJson, ScanRow, SiegelPayload, REPORT_CSV_HEADER, SCAN_CSV_HEADER};

#[derive(Debug, Parser)]
#[command(name = "hminus", version, about = "Relative class numbers of Q(zeta_p) and explicit bound checks")]
pub struct Cli {
    /// TOML config file; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Cache file (overrides HMINUS_CACHE and the config).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative class number of one prime.
    Hminus {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Initial bits for the analytic product.
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Class numbers for every prime in a range.
    Scan {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare computed quantities against one of the bounds.
    Verify(VerifyArgs),
    /// Certify presence or absence of a Siegel zero.
    Siegel {
        #[arg(long, conflicts_with_all = ["from", "to"])]
        p: Option<u64>,
        #[arg(long, requires = "to")]
        from: Option<u64>,
        #[arg(long, requires = "from")]
        to: Option<u64>,
        #[arg(long)]
        c: Option<String>,
    },
    /// Weighted prime-power sum in a residue class.
    Pi {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        x: u64,
        /// `+1` or `-1`.
        #[arg(long, allow_hyphen_values = true, default_value = "+1")]
        class: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Analytic,
    Maillet,
    Both,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub bound: String,
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<String>,
    /// Comma-separated, e.g. `2p,10p,p^2,10000000`.
    #[arg(long, value_delimiter = ',')]
    pub x_grid: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    pub sigma_steps: Option<Vec<u32>>,
    #[arg(long)]
    pub eq2_x: Option<u64>,
    #[arg(long)]
    pub eq2_sigma: Option<u32>,
    /// Evaluate bounds with 1_beta = 1.
    #[arg(long)]
    pub force_indicator: bool,
}

struct Ctx<'a> {
    cfg: RunConfig,
    cache: Cache,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn say(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}").map_err(CliError::io("stdout"))
    }

    fn note(&mut self, line: &str) {
        let _ = writeln!(self.err, "{line}");
    }

    fn pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.cfg.jobs)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(pool.install(f))
    }
}

/// Runs one command, writing results to `out` and progress to `err`;
/// returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    match &cli.command {
        Command::Hminus { prec: Some(b), .. } => cfg.initial_bits = Some(*b),
        Command::Siegel { c: Some(c), .. } => cfg.c = Some(c.clone()),
        Command::Verify(v) => apply_verify_flags(&mut cfg, v),
        _ => {}
    }
    if let Some(b) = cfg.initial_bits {
        cfg.max_bits = cfg.max_bits.max(b);
    }
    cfg.validate()?;
    let cache_path = (!cli.no_cache).then(|| cfg.cache_path(cli.cache.as_deref()));
    let cache = Cache::open(cache_path.as_deref())?;
    let mut ctx = Ctx { cfg, cache, out, err };
    match cli.command {
        Command::Hminus { p, method, .. } => cmd_hminus(&mut ctx, p, method),
        Command::Scan { from, to, out } => cmd_scan(&mut ctx, from, to, out),
        Command::Verify(v) => cmd_verify(&mut ctx, &v),
        Command::Siegel { p, from, to, .. } => {
            let (lo, hi) = match (p, from, to) {
                (Some(p), _, _) => (p, p),
                (None, Some(a), Some(b)) => (a, b),
                _ => return Err(CliError::Invalid("siegel needs --p or --from/--to".into())),
            };
            cmd_siegel(&mut ctx, lo, hi, p.is_some())
        }
        Command::Pi { p, x, class } => cmd_pi(&mut ctx, p, x, &class),
    }
}

fn apply_verify_flags(cfg: &mut RunConfig, v: &VerifyArgs) {
    if let Some(c) = &v.c {
        cfg.c = Some(c.clone());
    }
    if let Some(x) = &v.x_grid {
        cfg.x_grid = x.clone();
    }
    if let Some(nu) = &v.nu {
        cfg.nu = nu.clone();
    }
    if let Some(k) = &v.sigma_steps {
        cfg.sigma_steps = k.clone();
    }
    if let Some(x) = v.eq2_x {
        cfg.eq2_x = x;
    }
    if let Some(s) = v.eq2_sigma {
        cfg.eq2_sigma = s;
    }
    cfg.force_indicator |= v.force_indicator;
}

fn check_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(CliError::Invalid(format!("{p} is not an odd prime")));
    }
    Ok(())
}

fn check_range(from: u64, to: u64) -> Result<()> {
    if from > to {
        return Err(CliError::Invalid(format!("empty range {from}..{to} is reversed")));
    }
    Ok(())
}

fn odd_primes(from: u64, to: u64) -> Vec<u64> {
    (from.max(3)..=to).filter(|&n| is_prime(n)).collect()
}

fn method_for(cfg: &RunConfig, p: u64, arg: Option<MethodArg>) -> Method {
    match arg {
        Some(MethodArg::Analytic) => Method::Analytic,
        Some(MethodArg::Maillet) => Method::Maillet,
        Some(MethodArg::Both) => Method::Both,
        None if p <= cfg.oracle_ceiling => Method::Both,
        None => Method::Analytic,
    }
}

fn compute_hminus(cfg: &RunConfig, p: u64, method: Method) -> Result<HminusPayload> {
    if method != Method::Maillet && p > ANALYTIC_CAP {
        return Err(CliError::Invalid(format!("p = {p} above the feasibility cap {ANALYTIC_CAP}")));
    }
    let rec = hminus(p, method, cfg.policy())?;
    Ok(HminusPayload::from_record(&rec))
}

fn compute_siegel(cfg: &RunConfig, p: u64) -> Result<SiegelPayload> {
    let c = cfg.siegel_c()?;
    let r = siegel_scan(p, &c, cfg.siegel_prec)?;
    Ok(SiegelPayload::from_report(&r))
}

fn cmd_hminus(ctx: &mut Ctx, p: u64, method: Option<MethodArg>) -> Result<u8> {
    check_prime(p)?;
    let method = method_for(&ctx.cfg, p, method);
    let fp = ctx.cfg.fingerprint("hminus", Some(method.as_str()));
    let payload = match ctx.cache.get::<HminusPayload>("hminus", p, &fp) {
        Some(h) => {
            ctx.note(&format!("p = {p}: cached"));
            h
        }
        None => {
            let h = compute_hminus(&ctx.cfg, p, method)?;
            ctx.cache.put("hminus", p, &fp, &h)?;
            h
        }
    };
    let row = ScanRow::new(p, &payload, None);
    match ctx.cfg.format {
        Format::Jsonl => {
            let line = serde_json::to_string(&row).expect("row serializes");
            ctx.say(&line)?;
        }
        Format::Csv => {
            ctx.say(SCAN_CSV_HEADER)?;
            ctx.say(&row.csv())?;
        }
    }
    Ok(0)
}

const CHUNK: usize = 32;

fn cmd_scan(ctx: &mut Ctx, from: u64, to: u64, out: Option<PathBuf>) -> Result<u8> {
    check_range(from, to)?;
    let primes = odd_primes(from, to);
    if let Some(&p) = primes.iter().find(|&&p| p > ANALYTIC_CAP) {
        return Err(CliError::Invalid(format!("p = {p} above the feasibility cap {ANALYTIC_CAP}")));
    }
    let mut file = match &out {
        Some(path) => Some(std::fs::File::create(path).map_err(CliError::io(path))?),
        None => None,
    };
    let format = ctx.cfg.format;
    let mut lines: Vec<String> = Vec::new();
    if format == Format::Csv && !primes.is_empty() {
        lines.push(SCAN_CSV_HEADER.to_string());
    }
    let sfp = ctx.cfg.fingerprint("siegel", None);
    let (mut computed, mut reused) = (0usize, 0usize);
    for chunk in primes.chunks(CHUNK) {
        let jobs: Vec<(u64, Method, String)> = chunk
            .iter()
            .map(|&p| {
                let m = method_for(&ctx.cfg, p, None);
                (p, m, ctx.cfg.fingerprint("hminus", Some(m.as_str())))
            })
            .collect();
        let cached: Vec<(Option<HminusPayload>, Option<SiegelPayload>)> = jobs
            .iter()
            .map(|(p, _, fp)| (ctx.cache.get("hminus", *p, fp), ctx.cache.get("siegel", *p, &sfp)))
            .collect();
        let cfg = ctx.cfg.clone();
        let results: Vec<Result<(HminusPayload, SiegelPayload, bool, bool)>> = ctx.pool(|| {
            jobs.par_iter()
                .zip(cached.into_par_iter())
                .map(|((p, m, _), (h, s))| {
                    let (h, h_new) = match h {
                        Some(h) => (h, false),
                        None => (compute_hminus(&cfg, *p, *m)?, true),
                    };
                    let (s, s_new) = match s {
                        Some(s) => (s, false),
                        None => (compute_siegel(&cfg, *p)?, true),
                    };
                    Ok((h, s, h_new, s_new))
                })
                .collect()
        })?;
        for ((p, _, fp), r) in jobs.iter().zip(results) {
            let (h, s, h_new, s_new) = r?;
            if h_new {
                ctx.cache.put("hminus", *p, fp, &h)?;
            }
            if s_new {
                ctx.cache.put("siegel", *p, &sfp, &s)?;
            }
            if h_new || s_new {
                computed += 1;
            } else {
                reused += 1;
            }
            let row = ScanRow::new(*p, &h, Some(&s));
            lines.push(match format {
                Format::Jsonl => serde_json::to_string(&row).expect("row serializes"),
                Format::Csv => row.csv(),
            });
        }
        emit(ctx, file.as_mut(), &mut lines)?;
    }
    ctx.note(&format!("scan: {} primes, computed {computed}, cached {reused}", primes.len()));
    Ok(0)
}

fn emit(ctx: &mut Ctx, file: Option<&mut std::fs::File>, lines: &mut Vec<String>) -> Result<()> {
    match file {
        Some(f) => {
            for l in lines.iter() {
                writeln!(f, "{l}").map_err(CliError::io("output file"))?;
            }
        }
        None => {
            for l in lines.iter() {
                ctx.say(l)?;
            }
        }
    }
    lines.clear();
    Ok(())
}

fn cmd_verify(ctx: &mut Ctx, v: &VerifyArgs) -> Result<u8> {
    let bound: BoundId = v.bound.parse().map_err(CliError::Core)?;
    check_range(v.from, v.to)?;
    let vcfg = ctx.cfg.verify_config()?;
    let primes = odd_primes(v.from, v.to);
    let sieve = match (bound, primes.last()) {
        (BoundId::Lemma21 | BoundId::Eq2Identity, Some(&p)) => Some(PrimeSieve::new(sieve_limit(bound, p, &vcfg))),
        _ => None,
    };
    let results: Vec<hminus_core::Result<Vec<BoundReport>>> = ctx.pool(|| {
        primes
            .par_iter()
            .map(|&p| verify_prime(bound, p, &vcfg, sieve.as_ref()))
            .collect()
    })?;
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    let mut file = match &v.out {
        Some(path) => Some(std::fs::File::create(path).map_err(CliError::io(path))?),
        None => None,
    };
    let mut lines = Vec::new();
    if ctx.cfg.format == Format::Csv && !reports.is_empty() {
        lines.push(REPORT_CSV_HEADER.to_string());
    }
    for r in &reports {
        let j = ReportJson::from_report(r);
        lines.push(match ctx.cfg.format {
            Format::Jsonl => serde_json::to_string(&j).expect("report serializes"),
            Format::Csv => j.csv(),
        });
    }
    emit(ctx, file.as_mut(), &mut lines)?;
    let failed = reports.iter().filter(|r| r.failed()).count();
    let skipped = reports.iter().filter(|r| r.status == hminus_core::bounds::Status::Skipped).count();
    if bound == BoundId::Cor33Crossover && !primes.is_empty() {
        let x = cor33_crossover(v.from, v.to, vcfg.prec)?;
        let show = |v: Option<u64>| v.map(|p| p.to_string()).unwrap_or_else(|| "none".into());
        ctx.note(&format!("cor33: last failing prime {}, passing from {}", show(x.last_fail), show(x.first_pass)));
    }
    ctx.note(&format!(
        "{}: {} reports, {} failed, {} skipped",
        bound.as_str(),
        reports.len(),
        failed,
        skipped
    ));
    Ok(u8::from(failed > 0))
}

fn cmd_siegel(ctx: &mut Ctx, lo: u64, hi: u64, single: bool) -> Result<u8> {
    check_range(lo, hi)?;
    if single {
        check_prime(lo)?;
    }
    let primes = odd_primes(lo, hi);
    let fp = ctx.cfg.fingerprint("siegel", None);
    let missing: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| ctx.cache.get::<SiegelPayload>("siegel", p, &fp).is_none())
        .collect();
    let cfg = ctx.cfg.clone();
    let fresh: Vec<Result<SiegelPayload>> =
        ctx.pool(|| missing.par_iter().map(|&p| compute_siegel(&cfg, p)).collect())?;
    for (p, s) in missing.iter().zip(fresh) {
        ctx.cache.put("siegel", *p, &fp, &s?)?;
    }
    #[derive(serde::Serialize)]
    struct Row<'a> {
        p: u64,
        #[serde(flatten)]
        report: &'a SiegelPayload,
    }
    if ctx.cfg.format == Format::Csv && !primes.is_empty() {
        ctx.say("p,present,beta,method,certified,endpoint_value")?;
    }
    for p in &primes {
        let s: SiegelPayload = ctx.cache.get("siegel", *p, &fp).expect("just stored");
        let line = match ctx.cfg.format {
            Format::Jsonl => serde_json::to_string(&Row { p: *p, report: &s }).expect("row serializes"),
            Format::Csv => format!(
                "{},{},{},{},{},{}",
                p,
                s.present,
                s.beta.as_ref().map(record::csv_real).unwrap_or_default(),
                s.method,
                s.certified,
                s.endpoint_value.as_ref().map(record::csv_real).unwrap_or_default()
            ),
        };
        ctx.say(&line)?;
    }
    let present = primes.len() - missing.len();
    ctx.note(&format!("siegel: {} primes, {} from cache", primes.len(), present));
    Ok(0)
}

fn parse_class(s: &str) -> Result<Residue> {
    match s.trim() {
        "+1" | "1" | "plus" => Ok(Residue::Plus),
        "-1" | "minus" => Ok(Residue::Minus),
        other => Err(CliError::Invalid(format!("class must be +1 or -1, got {other:?}"))),
    }
}

fn cmd_pi(ctx: &mut Ctx, p: u64, x: u64, class: &str) -> Result<u8> {
    check_prime(p)?;
    let class = parse_class(class)?;
    if x < p {
        return Err(CliError::Invalid(format!("x = {x} is below p = {p}")));
    }
    let sieve = PrimeSieve::new(x);
    let s = sieve.pi_sum(p, class, x)?;
    let (bound, notes) = if p <= 500 {
        (None, "bound omitted: p <= 500 is outside its domain".to_string())
    } else if x == p {
        (None, "bound omitted: needs x > p".to_string())
    } else {
        (Some(bt_bound(p, &Ball::from_u64(x, ctx.cfg.prec))?), String::new())
    };
    let row = PiJson::new(&s, bound.as_ref(), notes);
    match ctx.cfg.format {
        Format::Jsonl => {
            let line = serde_json::to_string(&row).expect("row serializes");
            ctx.say(&line)?;
        }
        Format::Csv => {
            ctx.say("p,class,x,value,value_decimal,terms,bound,pass,notes")?;
            let line = format!(
                "{},{:+},{},{},{},{},{},{},{}",
                row.p,
                row.class,
                row.x,
                row.value,
                row.value_decimal,
                row.terms,
                row.bound.as_ref().map(record::csv_real).unwrap_or_default(),
                row.pass.map(|b| b.to_string()).unwrap_or_default(),
                row.notes
            );
            ctx.say(&line)?;
        }
    }
    Ok(u8::from(row.pass == Some(false)))
}
