//! Self-checks shared by `classfield verify` and the acceptance suite.

use std::time::Instant;

use classfield::cartan::cartan_groups;
use classfield::invariants::{
    class_ideal, class_invariant, g_on, g_on_ideal, general_invariant, minimal_polynomial, parse_integers, FamilyId,
    MinimalPolynomial,
};
use classfield::lfunctions::{
    all_lderiv0, fourier_inversion, gamma_on, log_g_values, zeta_ideal_partials, zeta_lattice_partial,
};
use classfield::modfun::{delta_j, elliptic_model, fricke, siegel, FrickeIndex};
use classfield::numerics::{digits_to_bits, format_log10, BigComplex, PrecisionPolicy};
use classfield::orderideals::{default_norm_bound, form_ideal_dictionary, oracle_class_group, QuadElem};
use classfield::quadforms::{
    class_enumerate, class_key, classical_compose, compose_level, compose_level_with, enumerate_reduced,
    is_discriminant, reduce, ClassGroup, Form, LiftChoice, OrderContext, UnimodularMatrix,
};
use classfield::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::reference;

pub const DEFAULT_SEED: u64 = 0x5eed_c1a5_5f1e_1d00;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn to_json(&self) -> serde_json::Value {
        json!({"name": self.name, "passed": self.passed, "detail": self.detail})
    }
}

/// Runs `f`, turning errors into failures and recording wall time.
pub fn run(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let seconds = t.elapsed().as_secs_f64();
    log::info!("{name}: {} in {seconds:.2}s", if passed { "pass" } else { "FAIL" });
    Outcome { name: name.to_string(), passed, detail, seconds }
}

fn form(t: (i64, i64, i64)) -> Form {
    Form::new(t.0, t.1, t.2).expect("reference form is valid")
}

fn ctx(d: i64) -> Result<OrderContext> {
    OrderContext::new(d)
}

pub fn reduced_forms() -> Result<(bool, String)> {
    let got = enumerate_reduced(reference::DISC)?;
    let want: Vec<Form> = reference::REDUCED_FORMS.iter().copied().map(form).collect();
    let list: Vec<String> = got.iter().map(|q| q.to_string()).collect();
    Ok((got == want, list.join(" ")))
}

pub fn class_structure() -> Result<(bool, String)> {
    let g = class_enumerate(&ctx(reference::DISC)?, reference::LEVEL)?;
    let ok = g.order() == 12 && g.invariant_factors == reference::INVARIANT_FACTORS;
    Ok((ok, format!("{} classes, invariant factors {:?}", g.order(), g.invariant_factors)))
}

/// Our class index for each published label.
pub fn align_labels(g: &ClassGroup) -> Result<Vec<usize>> {
    reference::CLASS_FORMS
        .iter()
        .map(|&t| {
            g.index_of(&form(t))
                .ok_or_else(|| classfield::Error::Invariant(format!("{} lies in no class", form(t))))
        })
        .collect()
}

pub fn group_table() -> Result<(bool, String)> {
    let g = class_enumerate(&ctx(reference::DISC)?, reference::LEVEL)?;
    let idx = align_labels(&g)?;
    let mut wrong = 0;
    for i in 0..12 {
        for j in 0..12 {
            if g.table[idx[i]][idx[j]] != idx[reference::TABLE[i][j] - 1] {
                wrong += 1;
            }
        }
    }
    Ok((wrong == 0, format!("{} of 144 cells agree", 144 - wrong)))
}

/// Compares a recovered polynomial with the published coefficients.
pub fn compare_polynomial(mp: &MinimalPolynomial) -> Result<(bool, String)> {
    let want = parse_integers(&reference::POLYNOMIAL)?;
    let got: Vec<BigInt> = mp.coefficients.iter().rev().cloned().collect();
    let mismatched: Vec<usize> = (0..want.len()).filter(|&i| got.get(i) != Some(&want[i])).map(|i| 12 - i).collect();
    let worst = mp.residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ok = mp.recognized && mismatched.is_empty() && worst < -20.0;
    let detail = if mismatched.is_empty() {
        format!("all 13 coefficients match at {} digits, worst residual {}", mp.digits_used, format_log10(worst))
    } else {
        format!("coefficients of x^{mismatched:?} differ at {} digits", mp.digits_used)
    };
    Ok((ok, detail))
}

pub fn polynomial(digits: usize) -> Result<(bool, String)> {
    let c = ctx(reference::DISC)?;
    let g = class_enumerate(&c, reference::LEVEL)?;
    let mp = minimal_polynomial(&g, &c, &PrecisionPolicy::new(digits))?;
    compare_polynomial(&mp)
}

/// Form-side and ideal-side groups agree through `[Q] ↦ [[ω_Q, 1]]`.
pub fn oracle_equivalence(discs: &[i64], levels: &[i64]) -> Result<(bool, String)> {
    let mut done = 0;
    for &d in discs {
        let c = ctx(d)?;
        if c.has_extra_units() {
            continue;
        }
        for &n in levels {
            let g = class_enumerate(&c, n)?;
            let oracle = oracle_class_group(&c, n, default_norm_bound(&c, n))?;
            if let Err(e) = form_ideal_dictionary(&g, &oracle) {
                return Ok((false, format!("D = {d}, N = {n}: {e}")));
            }
            done += 1;
        }
    }
    Ok((true, format!("{done} instances matched")))
}

pub fn classical_degeneration(max_abs_disc: i64) -> Result<(bool, String)> {
    let mut count = 0;
    for d in (-max_abs_disc..0).filter(|d| is_discriminant(*d)) {
        let c = ctx(d)?;
        let g = class_enumerate(&c, 1)?;
        let reds = enumerate_reduced(d)?;
        if g.order() != reds.len() {
            return Ok((false, format!("D = {d}: {} classes vs {} reduced forms", g.order(), reds.len())));
        }
        for r in &reds {
            for s in &reds {
                let want = classical_compose(r, s)?;
                let (i, j) = (g.index_of(r), g.index_of(s));
                let (Some(i), Some(j)) = (i, j) else {
                    return Ok((false, format!("D = {d}: reduced form unclassified")));
                };
                if reduce(&g.reps[g.table[i][j]]).0 != want {
                    return Ok((false, format!("D = {d}: {r} * {s}")));
                }
            }
        }
        count += 1;
    }
    Ok((true, format!("{count} discriminants")))
}

fn rel(a: &BigComplex, b: &BigComplex) -> f64 {
    a.log10_rel_diff(b)
}

fn random_index(rng: &mut ChaCha8Rng, levels: &[i64]) -> FrickeIndex {
    let n = levels[rng.gen_range(0..levels.len())];
    loop {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if let Ok(v) = FrickeIndex::from_ints(a, b, n) {
            if !v.is_half_integral() {
                return v;
            }
        }
    }
}

/// Modular identities at five seeded sample points each; returns the worst log10 error per identity.
pub fn modular_identities(digits: usize, seed: u64) -> Result<(bool, String)> {
    let p = digits_to_bits(digits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = -(digits as f64) + 10.0;
    let c = ctx(reference::DISC)?;
    let model = elliptic_model(&c, p)?;
    let tau_o = c.tau(p);
    let mut worst = [f64::NEG_INFINITY; 5];

    for _ in 0..5 {
        let tau = BigComplex::from_f64(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..1.8), p);
        let g12 = siegel(&FrickeIndex::from_ints(0, 1, 2)?, &tau, p)?.powi(12)?;
        let lhs = g12.add(&BigComplex::from_i64(16, p)).powi(3)?.div(&g12)?;
        worst[0] = worst[0].max(rel(&lhs, &delta_j(&tau, p)?.1));

        let v = random_index(&mut rng, &[3, 5, 7]);
        let (x, y) = model.torsion_point(&v)?;
        let f = fricke(&v, &tau_o, p)?;
        worst[1] = worst[1].max(rel(&x, &f.div_i64(-(128 * 27))));
        worst[2] = worst[2].max(model.weierstrass_residual(&x, &y));

        let conj = UnimodularMatrix { p: 1, q: c.b_o, r: 0, s: -1 };
        worst[3] = worst[3].max(rel(&f.conj(), &fricke(&v.act(&conj), &tau_o, p)?));

        let u = random_index(&mut rng, &[3, 5, 7]);
        let (_, yu) = model.torsion_point(&u)?;
        let gs = |w: &FrickeIndex| siegel(w, &tau_o, p);
        let rhs = gs(&v.scale(2))?.mul(&gs(&u)?.powi(4)?).div(&gs(&v)?.powi(4)?.mul(&gs(&u.scale(2))?))?;
        worst[4] = worst[4].max(rel(&y.div(&yu)?, &rhs));
    }
    let names = ["j-g relation", "X from f", "Weierstrass", "conjugation", "Y ratio"];
    let detail: Vec<String> = names.iter().zip(&worst).map(|(n, w)| format!("{n} {}", format_log10(*w))).collect();
    Ok((worst.iter().all(|w| *w < limit), detail.join(", ")))
}

/// Ideal sums against lattice sums at `s = 2` for every class.
pub fn zeta_equivalence(d: i64, n: i64, bound: i64, m: i64) -> Result<(bool, String)> {
    let c = ctx(d)?;
    let g = class_enumerate(&c, n)?;
    let oracle = oracle_class_group(&c, n, default_norm_bound(&c, n))?;
    let dict = form_ideal_dictionary(&g, &oracle)?;
    let ideal = zeta_ideal_partials(&g, &oracle, &dict, (2.0, 0.0), bound)?;
    let mut worst_ratio: f64 = 0.0;
    for (i, q) in g.reps.iter().enumerate() {
        let lat = zeta_lattice_partial(q, &c, n, (2.0, 0.0), m)?;
        let tol = 4.0 * (ideal[i].tail + lat.tail);
        worst_ratio = worst_ratio.max(ideal[i].diff(&lat) / tol);
    }
    Ok((worst_ratio <= 1.0, format!("largest |difference| / (4 x tail) = {worst_ratio:.3}")))
}

/// Fourier inversion of `L′(0, χ)` and the vanishing of `Σ ln|g(C)|`.
pub fn derivative_consistency(d: i64, n: i64, digits: usize) -> Result<(bool, String)> {
    let c = ctx(d)?;
    let g = class_enumerate(&c, n)?;
    let p = digits_to_bits(digits);
    let logs = log_g_values(&g, &c, p)?;
    let gamma = gamma_on(&c, n);
    let l = all_lderiv0(&g, &logs, gamma);
    let back = fourier_inversion(&g, &l, gamma);
    let inv = back.iter().zip(&logs).map(|(a, b)| a.sub(b).log10_abs()).fold(f64::NEG_INFINITY, f64::max);
    let sum = logs.iter().fold(BigComplex::zero(p), |a, b| a.add(b)).log10_abs();
    Ok((inv < -40.0 && sum < -40.0, format!("inversion residual {}, sum of logs {}", format_log10(inv), format_log10(sum))))
}

pub fn cartan_bookkeeping(discs: &[i64], levels: &[i64]) -> Result<(bool, String)> {
    let mut count = 0;
    for &d in discs {
        let c = ctx(d)?;
        let h = class_enumerate(&c, 1)?.order();
        for &n in levels {
            let cn = class_enumerate(&c, n)?.order();
            let ok = if n == 1 { cn == h } else { cartan_groups(&c, n)?.check_order_identity(cn, h) };
            if !ok {
                return Ok((false, format!("D = {d}, N = {n}")));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} instances")))
}

fn random_gamma1(rng: &mut ChaCha8Rng, n: i64) -> UnimodularMatrix {
    let mut g = UnimodularMatrix::IDENTITY;
    for _ in 0..2 {
        let lower = UnimodularMatrix { p: 1, q: 0, r: n * rng.gen_range(-1..=1), s: 1 };
        g = g.mul(&UnimodularMatrix::translation(rng.gen_range(-2..=2))).mul(&lower);
    }
    g
}

/// Randomised representative independence of invariants and of composition.
pub fn well_definedness(discs: &[i64], levels: &[i64], trials: usize, seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = digits_to_bits(40);
    let mut runs = 0;
    for &d in discs {
        let c = ctx(d)?;
        if c.has_extra_units() {
            continue;
        }
        for &n in levels {
            let g = class_enumerate(&c, n)?;
            let m = g.order();
            for _ in 0..trials {
                let q = &g.reps[rng.gen_range(0..m)];
                let lam = QuadElem::new(
                    BigRational::from_integer((1 + n * rng.gen_range(-5i64..=5)).into()),
                    BigRational::from_integer((n * rng.gen_range(-5i64..=5)).into()),
                );
                if !lam.is_zero() {
                    let base = class_ideal(q, &c, n)?;
                    let (v0, v) = if n == 1 {
                        (g_on(q, &c, 1, p)?, g_on_ideal(&base.scale(&lam), 1, p)?)
                    } else {
                        let fam = FamilyId::siegel_standard(n)?;
                        (class_invariant(&fam, q, &c, n, p)?, general_invariant(&fam, &base.scale(&lam), n, p)?)
                    };
                    if rel(&v, &v0) > -30.0 {
                        return Ok((false, format!("invariant of {q} depends on the ideal (D = {d}, N = {n})")));
                    }
                }

                let (q1, q2) = (&g.reps[rng.gen_range(0..m)], &g.reps[rng.gen_range(0..m)]);
                let base = compose_level(q1, q2, &c, n)?;
                let a1 = q1.act(&random_gamma1(&mut rng, n));
                let a2 = q2.act(&random_gamma1(&mut rng, n));
                let choice = LiftChoice {
                    coprime_index: rng.gen_range(0..3),
                    b_shift: rng.gen_range(-2..=2),
                    row_shift: (rng.gen_range(-2..=2), rng.gen_range(-2..=2)),
                    top_shift: rng.gen_range(-2..=2),
                };
                let alt = compose_level_with(&a1, &a2, &c, n, choice)?;
                if class_key(&alt, n) != class_key(&base, n) {
                    return Ok((false, format!("composition of {q1}, {q2} depends on choices (D = {d}, N = {n})")));
                }
                runs += 1;
            }
        }
    }
    Ok((true, format!("{runs} trials")))
}

/// Named batteries for `classfield verify`.
pub fn battery(name: &str, seed: u64, digits: usize) -> Option<Vec<Outcome>> {
    let small_discs: Vec<i64> = reference::BATTERY_DISCS.iter().copied().filter(|d| d.abs() <= 200).collect();
    if !["small", "paper", "full"].contains(&name) {
        return None;
    }
    let mut out = Vec::new();
    if name == "small" || name == "full" {
        out.push(run("oracle equivalence", || oracle_equivalence(&small_discs, &reference::BATTERY_LEVELS)));
        out.push(run("classical degeneration", || classical_degeneration(200)));
        out.push(run("cartan bookkeeping", || cartan_bookkeeping(&small_discs, &reference::BATTERY_LEVELS)));
    }
    if name == "paper" || name == "full" {
        out.push(run("reduced forms", reduced_forms));
        out.push(run("class structure", class_structure));
        out.push(run("group table", group_table));
        out.push(run("minimal polynomial", || polynomial(digits)));
        out.push(run("zeta equivalence", || zeta_equivalence(reference::DISC, reference::LEVEL, 10_000, 200)));
        out.push(run("derivative consistency", || derivative_consistency(reference::DISC, reference::LEVEL, 80)));
    }
    if name == "full" {
        out.push(run("modular identities", || modular_identities(60, seed)));
        out.push(run("well-definedness", || well_definedness(&small_discs, &reference::BATTERY_LEVELS, 20, seed)));
    }
    Some(out)
}
