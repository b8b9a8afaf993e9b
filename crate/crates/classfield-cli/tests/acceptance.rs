//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use classfield_cli::checks::{self, DEFAULT_SEED};
use classfield_cli::reference::{BATTERY_DISCS, BATTERY_LEVELS, POLYNOMIAL};
use serde_json::Value;

type Check = Box<dyn FnOnce() -> Result<(bool, String), String>>;

fn lift(r: classfield::Result<(bool, String)>) -> Result<(bool, String), String> {
    r.map_err(|e| e.to_string())
}

fn minpoly_json(digits: usize) -> Result<(Option<i32>, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_classfield"))
        .args(["minpoly", "--disc", "-200", "--level", "3", "--format", "json", "--digits"])
        .arg(digits.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    let v = serde_json::from_slice(&out.stdout).map_err(|e| format!("unparsable output: {e}"))?;
    Ok((out.status.code(), v))
}

/// log10 of a decimal string such as `1.23e-714`, which may underflow f64.
fn log10_of(s: &str) -> f64 {
    let (m, e) = s.split_once('e').unwrap_or((s, "0"));
    match (m.parse::<f64>(), e.parse::<f64>()) {
        (Ok(m), Ok(e)) if m != 0.0 => m.abs().log10() + e,
        (Ok(_), Ok(_)) => f64::NEG_INFINITY,
        _ => f64::INFINITY,
    }
}

/// Powers whose coefficient differs from the published one.
fn mismatches(v: &Value) -> Vec<usize> {
    let got: Vec<&str> = v["coefficients"].as_array().map_or(vec![], |a| a.iter().filter_map(|c| c.as_str()).collect());
    (0..=12).filter(|&p| got.get(p).copied() != Some(POLYNOMIAL[12 - p])).collect()
}

fn published_polynomial() -> Result<(bool, String), String> {
    let (code, v) = minpoly_json(700)?;
    let bad = mismatches(&v);
    let worst = v["residuals"]
        .as_array()
        .ok_or("no residuals")?
        .iter()
        .map(|r| r.as_str().map_or(f64::INFINITY, log10_of))
        .fold(f64::NEG_INFINITY, f64::max);
    if !bad.is_empty() {
        let (_, again) = minpoly_json(1400)?;
        let persistent: Vec<usize> = mismatches(&again).into_iter().filter(|p| bad.contains(p)).collect();
        return Ok((false, format!("x^{bad:?} differ at 700 digits; x^{persistent:?} still differ at 1400 (possible discrepancy)")));
    }
    let ok = code == Some(0) && v["recognized"] == true && worst < -20.0;
    Ok((ok, format!("13 coefficients match, worst residual 1e{worst:.1}, exit {code:?}")))
}

fn main() -> ExitCode {
    let seed = DEFAULT_SEED;
    let criteria: Vec<(&str, Option<f64>, Check)> = vec![
        ("reduced forms of discriminant -200", Some(1.0), Box::new(|| lift(checks::reduced_forms()))),
        ("class count and structure for (-200, 3)", Some(10.0), Box::new(|| lift(checks::class_structure()))),
        ("12x12 group table", Some(30.0), Box::new(|| lift(checks::group_table()))),
        ("published minimal polynomial", Some(300.0), Box::new(published_polynomial)),
        (
            "form/ideal oracle equivalence",
            Some(300.0),
            Box::new(|| lift(checks::oracle_equivalence(&BATTERY_DISCS, &BATTERY_LEVELS))),
        ),
        ("classical degeneration |D| <= 500", None, Box::new(|| lift(checks::classical_degeneration(500)))),
        ("modular identities at 60 digits", Some(60.0), Box::new(move || lift(checks::modular_identities(60, seed)))),
        (
            "ideal-sum vs lattice-sum partial zeta",
            Some(120.0),
            Box::new(|| lift(checks::zeta_equivalence(-200, 3, 10_000, 200))),
        ),
        (
            "L'(0, chi) Fourier inversion and log sum",
            Some(60.0),
            Box::new(|| lift(checks::derivative_consistency(-200, 3, 80))),
        ),
        (
            "Cartan bookkeeping |W/U| = |C_N|/h",
            None,
            Box::new(|| lift(checks::cartan_bookkeeping(&BATTERY_DISCS, &BATTERY_LEVELS))),
        ),
        (
            "well-definedness, 100 trials per instance",
            None,
            Box::new(move || lift(checks::well_definedness(&BATTERY_DISCS, &BATTERY_LEVELS, 100, seed))),
        ),
    ];

    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = t.elapsed().as_secs_f64();
        let in_time = limit.is_none_or(|l| secs <= l);
        let limit_note = limit.map_or(String::new(), |l| format!(" / limit {l:.0}s"));
        let passed = ok && in_time;
        if !passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {detail} [{secs:.2}s{limit_note}]",
            i + 1,
            if passed { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
