//! End-to-end acceptance checks. Each criterion prints one line; the run
//! exits non-zero if any of them fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hminus_core::arith::{is_prime, PrimeSieve};
use hminus_core::ball::{Ball, ComplexBall, Mag};
use hminus_core::bounds::{c_min, cor33_crossover, verify, BoundId, Status, VerifyConfig};
use hminus_core::chars::Character;
use hminus_core::classnumber::{
    b1_chi, hminus, hminus_analytic, kummer_log_ratio, maillet_determinant, Method, PrecisionPolicy,
};
use hminus_core::hurwitz::hurwitz_zeta_derivs;
use hminus_core::lfunc::{eq2_residual_with, odd_log_l_jets, siegel_scan, SiegelMethod};
use num_bigint::{BigInt, BigUint};

const PREC: u32 = 128;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&n| is_prime(n)).collect()
}

fn ratio(num: i64, den: u64) -> Ball {
    Ball::from_i64(num, PREC).div_u64(den)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let primes = odd_primes(3, 199);
    for &p in &primes {
        // Method::Both errors out unless the two integers agree
        let rec = hminus(p, Method::Both, PrecisionPolicy::default()).map_err(|e| format!("p = {p}: {e}"))?;
        ensure(rec.certified, || format!("p = {p} not certified"))?;
        if p <= 19 {
            ensure(rec.h_minus == BigUint::from(1u32), || format!("h_{p} = {}", rec.h_minus))?;
        }
        if p == 23 {
            ensure(rec.h_minus == BigUint::from(3u32), || format!("h_23 = {}", rec.h_minus))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("{} primes, analytic = Maillet", primes.len()))
}

fn criterion_2() -> Check {
    let b3 = b1_chi(&Character::new(3, 1), PREC).map_err(|e| e.to_string())?;
    ensure(b3.overlaps(&ComplexBall::from_real(ratio(-1, 3))), || format!("B_1 for p = 3 is {}", b3.re))?;
    let want = ComplexBall::new(ratio(-3, 5), ratio(-1, 5));
    let b5 = b1_chi(&Character::new(5, 1), PREC).map_err(|e| e.to_string())?;
    let b5c = b1_chi(&Character::new(5, 3), PREC).map_err(|e| e.to_string())?;
    ensure(b5.overlaps(&want) && b5c.overlaps(&want.conj()), || "B_1 for p = 5".into())?;
    for p in [3, 5] {
        let h = hminus_analytic(p, PrecisionPolicy::default()).map_err(|e| e.to_string())?.h_minus;
        ensure(h == BigUint::from(1u32), || format!("h_{p} = {h}"))?;
    }
    let d5 = maillet_determinant(5).map_err(|e| e.to_string())?;
    let d7 = maillet_determinant(7).map_err(|e| e.to_string())?;
    ensure(d5 == BigInt::from(-5) && d7 == BigInt::from(49), || format!("D_5 = {d5}, D_7 = {d7}"))?;
    Ok("B_1 values, h_3 = h_5 = 1, D_5 = -5, D_7 = 49".into())
}

fn criterion_3() -> Check {
    let x = 10_000_000;
    let sieve = PrimeSieve::new(x);
    let sigma = Ball::from_i64(2, PREC);
    let mut widest = 0.0f64;
    for p in [3u64, 7, 11, 13, 101] {
        let r = eq2_residual_with(&sieve, p, &sigma, x, PREC).map_err(|e| format!("p = {p}: {e}"))?;
        ensure(r.residual.contains_zero(), || format!("p = {p}: residual {}", r.residual))?;
        let width = r.residual.rad().mul_2exp(1).to_f64();
        let allowed = (p - 1) as f64 / 2.0 * 1e-7 + 1e-10;
        ensure(width <= allowed, || format!("p = {p}: width {width:e} > {allowed:e}"))?;
        widest = widest.max(width);
    }
    Ok(format!("5 residuals contain 0, widest {widest:.3e}"))
}

fn criterion_4() -> Check {
    let cfg = VerifyConfig::default();
    let reports = verify(BoundId::Lemma21, 503, 2003, &cfg).map_err(|e| e.to_string())?;
    let failed = reports.iter().filter(|r| !r.passed()).count();
    ensure(failed == 0, || format!("{failed} of {} comparisons fail or skip", reports.len()))?;
    Ok(format!("{} comparisons", reports.len()))
}

fn criterion_5() -> Check {
    let cfg = VerifyConfig { c: Some(c_min(PREC)), ..VerifyConfig::default() };
    let mut n = 0;
    for p in [503, 1009] {
        for bound in [BoundId::Lemma22, BoundId::Lemma23] {
            let reports = verify(bound, p, p, &cfg).map_err(|e| e.to_string())?;
            for r in &reports {
                match r.status {
                    Status::Pass => {
                        let lhs = r.lhs.as_ref().expect("compared");
                        ensure(lhs.is_finite(), || format!("p = {p}: uncertified enclosure"))?;
                        n += 1;
                    }
                    Status::Fail => return Err(format!("{} p = {p} nu = {:?}", bound.as_str(), r.params.nu)),
                    // the second sigma lies outside the smaller interval
                    Status::Skipped => ensure(bound == BoundId::Lemma22, || r.notes.clone())?,
                }
            }
        }
    }
    ensure(n == 24, || format!("{n} comparisons instead of 24"))?;
    Ok(format!("{n} derivative bounds hold"))
}

fn criterion_6() -> Check {
    let cfg = VerifyConfig::default();
    let reports = verify(BoundId::Thm11, 503, 2003, &cfg).map_err(|e| e.to_string())?;
    let not_passed: Vec<u64> = reports.iter().filter(|r| !r.passed()).map(|r| r.p).collect();
    ensure(not_passed.is_empty(), || format!("not passing: {not_passed:?}"))?;
    let worst = reports
        .iter()
        .map(|r| r.lhs.as_ref().unwrap().to_f64())
        .fold(0.0, f64::max);
    Ok(format!("{} primes, max |log(h/G)| = {worst:.3}", reports.len()))
}

fn criterion_7() -> Check {
    let c = c_min(PREC);
    let primes = odd_primes(3, 2003);
    for &p in &primes {
        let r = siegel_scan(p, &c, 64).map_err(|e| format!("p = {p}: {e}"))?;
        ensure(!r.present && r.certified, || format!("p = {p}: zero not excluded"))?;
        let want = if p % 4 == 1 { SiegelMethod::Parity } else { SiegelMethod::EndpointPositivity };
        ensure(r.method == want, || format!("p = {p}: method {}", r.method.as_str()))?;
    }
    Ok(format!("{} primes, no Siegel zero", primes.len()))
}

fn criterion_8() -> Check {
    let r = cor33_crossover(9001, 11000, PREC).map_err(|e| e.to_string())?;
    ensure(r.last_fail == Some(9649), || format!("last failure {:?}", r.last_fail))?;
    let first = r.first_pass.ok_or("no passing prime")?;
    ensure(first > 9649 && first <= 9700, || format!("first pass {first}"))?;
    Ok(format!("last failure 9649, passing from {first}"))
}

fn criterion_9() -> Check {
    for p in [23u64, 101, 503] {
        let exact = kummer_log_ratio(p, PREC).map_err(|e| e.to_string())?;
        let jets = odd_log_l_jets(p, &Ball::one(PREC), 0, PREC).map_err(|e| e.to_string())?;
        let sum = jets.iter().fold(ComplexBall::zero(PREC), |acc, (_, j)| acc.add(&j[0]));
        ensure(sum.im.contains_zero(), || format!("p = {p}: imaginary part {}", sum.im))?;
        ensure(sum.re.overlaps(&exact), || format!("p = {p}: {} vs {}", sum.re, exact))?;
    }
    Ok("p = 23, 101, 503 agree within radii".into())
}

fn criterion_10() -> Check {
    let pi2 = Ball::pi(PREC).sqr();
    let two = Ball::from_i64(2, PREC);
    let z1 = hurwitz_zeta_derivs(&two, (1, 1), 0, PREC).map_err(|e| e.to_string())?;
    let zh = hurwitz_zeta_derivs(&two, (1, 2), 0, PREC).map_err(|e| e.to_string())?;
    let tight = Mag::pow2(-100);
    ensure(z1[0].overlaps(&pi2.div_u64(6)) && z1[0].rad() <= tight, || format!("zeta(2,1) = {}", z1[0]))?;
    ensure(zh[0].overlaps(&pi2.mul_2exp(-1)) && zh[0].rad() <= tight, || format!("zeta(2,1/2) = {}", zh[0]))?;
    // central differences with h = 2^-20: first derivative error h^2/6 |f'''|,
    // second derivative error h^2/12 |f''''|, each doubled, plus 1e-20
    let h_exp = 20;
    let h = Ball::one(PREC).mul_2exp(-h_exp);
    let grid: [(&str, (u64, u64)); 10] = [
        ("0.9", (1, 5)),
        ("1.1", (1, 1)),
        ("1.25", (3, 4)),
        ("1.5", (1, 2)),
        ("1.75", (5, 2)),
        ("2", (1, 3)),
        ("2.5", (7, 3)),
        ("3", (2, 3)),
        ("3.5", (1, 7)),
        ("4", (9, 1)),
    ];
    let floor = Mag::pow2(-66);
    let h2 = Mag::pow2(-2 * h_exp);
    for (s, a) in grid {
        let s = Ball::from_decimal(s, PREC).unwrap();
        let d = hurwitz_zeta_derivs(&s, a, 4, PREC).map_err(|e| e.to_string())?;
        let plus = hurwitz_zeta_derivs(&s.add(&h), a, 0, PREC).map_err(|e| e.to_string())?;
        let minus = hurwitz_zeta_derivs(&s.sub(&h), a, 0, PREC).map_err(|e| e.to_string())?;
        let fd1 = plus[0].sub(&minus[0]).div(&h.mul_2exp(1));
        let tol1 = d[3].abs_upper().mul(h2).div(Mag::from_u64(3)).add(floor);
        ensure(fd1.add_error(tol1).overlaps(&d[1]), || format!("first derivative at {s}, a = {a:?}"))?;
        let fd2 = plus[0].sub(&d[0].mul_2exp(1)).add(&minus[0]).div(&h.sqr());
        let tol2 = d[4].abs_upper().mul(h2).div(Mag::from_u64(6)).add(floor);
        ensure(fd2.add_error(tol2).overlaps(&d[2]), || format!("second derivative at {s}, a = {a:?}"))?;
    }
    Ok("zeta(2,1), zeta(2,1/2) and a 10-point derivative grid".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("dual-oracle class numbers up to 199", criterion_1),
        ("hand-check anchors", criterion_2),
        ("orthogonality identity at X = 10^7", criterion_3),
        ("prime-power bound sweep 503..2003", criterion_4),
        ("derivative bounds for p = 503, 1009", criterion_5),
        ("log(h/G) against the f(1) bound, 503..2003", criterion_6),
        ("Siegel sweep up to 2003", criterion_7),
        ("crossover at 9649", criterion_8),
        ("class number path vs L-value path", criterion_9),
        ("Hurwitz kernel", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:2} PASS {name}: {detail} ({secs:.1} s)", i + 1),
            Err(detail) => {
                println!("criterion {:2} FAIL {name}: {detail} ({secs:.1} s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
