//! Subcommand implementations; each produces a [`Report`] that can be
//! rendered as text, JSON or CSV.

use classfield::cartan::cartan_groups;
use classfield::invariants::{conjugate_orbit, minimal_polynomial, FamilyId, FamilyKind};
use classfield::lfunctions::{all_lderiv0, fourier_inversion, gamma_on, log_g_values, Character};
use classfield::modfun::FrickeIndex;
use classfield::numerics::{digits_to_bits, format_log10, BigComplex, PrecisionPolicy};
use classfield::orderideals::{default_norm_bound, form_ideal_dictionary, oracle_class_group};
use classfield::quadforms::{class_enumerate, OrderContext};
use classfield::{Error, Result};
use serde_json::{json, Value};

use crate::checks;

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNRECOGNIZED: i32 = 3;
pub const EXIT_FAILED: i32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Rendered output of one subcommand plus its exit status.
#[derive(Debug)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub csv: Vec<Vec<String>>,
    pub exit: i32,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json renders") + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(vec![]);
                for row in &self.csv {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
            }
        }
    }
}

fn complex_json(z: &BigComplex, digits: usize) -> Value {
    json!({"re": z.re().to_decimal(digits), "im": z.im().to_decimal(digits)})
}

pub fn classgroup(disc: i64, level: i64, norm_bound: Option<i64>) -> Result<Report> {
    let ctx = OrderContext::new(disc)?;
    let g = class_enumerate(&ctx, level)?;
    let mut text = format!("D = {disc}, N = {level}: {} classes\n", g.order());
    text += &format!("invariant factors: {:?}\n", g.invariant_factors);
    for (i, q) in g.reps.iter().enumerate() {
        text += &format!("g{}: {q}\n", i + 1);
    }
    text += "table:\n";
    text += &g.format_table();
    let mut json = serde_json::to_value(&g).expect("class group serializes");
    let mut csv = vec![vec!["class".into(), "a".into(), "b".into(), "c".into(), "coords".into()]];
    for (i, q) in g.reps.iter().enumerate() {
        let coords: Vec<String> = g.coords[i].iter().map(|c| c.to_string()).collect();
        csv.push(vec![(i + 1).to_string(), q.a.to_string(), q.b.to_string(), q.c.to_string(), coords.join(" ")]);
    }
    if let Some(bound) = norm_bound {
        let oracle = oracle_class_group(&ctx, level, bound.max(default_norm_bound(&ctx, level)))?;
        let dict = form_ideal_dictionary(&g, &oracle)?;
        text += &format!("ideal-side dictionary: {dict:?}\n");
        json["dictionary"] = json!(dict);
        json["oracle"] = oracle.to_json();
    }
    Ok(Report { text, json, csv, exit: 0 })
}

pub fn minpoly(disc: i64, level: i64, policy: &PrecisionPolicy) -> Result<Report> {
    let ctx = OrderContext::new(disc)?;
    if level < 2 {
        return Err(Error::Domain("minpoly needs --level at least 2".into()));
    }
    if ctx.has_extra_units() {
        return Err(Error::Domain(format!("discriminant {disc} is not supported")));
    }
    let g = class_enumerate(&ctx, level)?;
    let mp = minimal_polynomial(&g, &ctx, policy)?;
    let mut text = String::new();
    if mp.recognized {
        text += &format!("{}\n", mp.display());
    } else {
        text += "coefficient recognition failed; numerical coefficients follow\n";
    }
    text += &format!("degree {}, precision {} digits\n", mp.degree, mp.digits_used);
    let mut csv = vec![vec!["power".into(), "coefficient".into(), "residual".into()]];
    for i in (0..=mp.degree).rev() {
        let shown = if mp.recognized {
            mp.coefficients[i].to_string()
        } else {
            mp.numeric[i].to_decimal(mp.digits_used.min(120))
        };
        text += &format!("x^{i}: {shown} (residual {})\n", format_log10(mp.residuals[i]));
        csv.push(vec![i.to_string(), shown, format_log10(mp.residuals[i])]);
    }
    let exit = if mp.recognized { 0 } else { EXIT_UNRECOGNIZED };
    Ok(Report { text, json: mp.to_json(), csv, exit })
}

pub fn lderiv(disc: i64, level: i64, character: Option<usize>, digits: usize) -> Result<Report> {
    let ctx = OrderContext::new(disc)?;
    if ctx.has_extra_units() && level >= 2 {
        return Err(Error::Domain(format!("discriminant {disc} is not supported")));
    }
    let g = class_enumerate(&ctx, level)?;
    let p = digits_to_bits(digits);
    let logs = log_g_values(&g, &ctx, p)?;
    let gamma = gamma_on(&ctx, level);
    let values = all_lderiv0(&g, &logs, gamma);
    let back = fourier_inversion(&g, &values, gamma);
    let inversion = back.iter().zip(&logs).map(|(a, b)| a.sub(b).log10_abs()).fold(f64::NEG_INFINITY, f64::max);
    let log_sum = logs.iter().fold(BigComplex::zero(p), |a, b| a.add(b));
    let chosen: Vec<usize> = match character {
        Some(i) if i < values.len() => vec![i],
        Some(i) => return Err(Error::Domain(format!("character index {i} out of range"))),
        None => (0..values.len()).collect(),
    };
    let shown = digits.min(60);
    let mut text = format!("D = {disc}, N = {level}, gamma = {gamma}\n");
    let mut csv = vec![vec!["character".into(), "exponents".into(), "re".into(), "im".into()]];
    let mut chars = Vec::new();
    for &i in &chosen {
        let chi = Character::from_group(&g, i);
        let exps: Vec<String> = chi.exponents.iter().map(|e| e.to_string()).collect();
        text += &format!("chi{} [{}]: {}\n", i + 1, exps.join(" "), values[i].to_decimal(shown));
        csv.push(vec![(i + 1).to_string(), exps.join(" "), values[i].re().to_decimal(shown), values[i].im().to_decimal(shown)]);
        chars.push(json!({"character": chi.exponents, "order": chi.order, "lderiv0": complex_json(&values[i], shown)}));
    }
    text += "ln|g(C)|:\n";
    for (q, l) in g.reps.iter().zip(&logs) {
        text += &format!("  {q}: {}\n", l.re().to_decimal(shown));
    }
    text += &format!("inversion residual {}\n", format_log10(inversion));
    text += &format!("sum of ln|g(C)|: {}\n", log_sum.re().to_decimal(10));
    let json = json!({
        "disc": disc,
        "level": level,
        "gamma": gamma,
        "characters": chars,
        "per_class_log_g": logs.iter().map(|l| l.re().to_decimal(shown)).collect::<Vec<_>>(),
        "inversion_residual": format_log10(inversion),
        "sum_log_g": log_sum.re().to_decimal(10),
    });
    Ok(Report { text, json, csv, exit: 0 })
}

pub fn cartan(disc: i64, level: i64) -> Result<Report> {
    let ctx = OrderContext::new(disc)?;
    let groups = cartan_groups(&ctx, level)?;
    let o = groups.orders();
    let cn = class_enumerate(&ctx, level)?.order();
    let h = class_enumerate(&ctx, 1)?.order();
    let check = groups.check_order_identity(cn, h);
    let text = format!(
        "D = {disc}, N = {level}\n|units| = {}, |W| = {}, |U| = {}, |W^| = {}\n|W/U| = {} and |C_N|/h = {}/{}: {}\n",
        o.units,
        o.w,
        o.u,
        o.w_hat,
        o.w / o.u,
        cn,
        h,
        if check { "consistent" } else { "INCONSISTENT" }
    );
    let json = json!({"N": level, "disc": disc, "orders": o, "check_WUOG": check});
    let csv = vec![
        vec!["quantity".into(), "value".into()],
        vec!["units".into(), o.units.to_string()],
        vec!["W".into(), o.w.to_string()],
        vec!["U".into(), o.u.to_string()],
        vec!["What".into(), o.w_hat.to_string()],
        vec!["check_WUOG".into(), check.to_string()],
    ];
    Ok(Report { text, json, csv, exit: if check { 0 } else { EXIT_FAILED } })
}

fn parse_rat(s: &str) -> Result<num_rational::BigRational> {
    s.trim().parse().map_err(|_| Error::Format(format!("bad rational {s:?}")))
}

pub fn invariants(disc: i64, level: i64, family: &str, index: Option<(String, String)>, digits: usize) -> Result<Report> {
    let ctx = OrderContext::new(disc)?;
    let v = match &index {
        Some((a, b)) => Some(FrickeIndex::new(parse_rat(a)?, parse_rat(b)?)?),
        None => None,
    };
    let fam = match family {
        "siegel" => FamilyId::siegel(v.map_or_else(|| FrickeIndex::from_ints(0, 1, level), Ok)?),
        "fricke" => FamilyId::fricke(v.map_or_else(|| FrickeIndex::from_ints(0, 1, level), Ok)?),
        "j" => FamilyId::j(),
        other => return Err(Error::Domain(format!("unknown family {other:?}"))),
    };
    if let Some(v) = &fam.index {
        if level % v.level() != 0 {
            return Err(Error::Domain(format!("index level {} does not divide {level}", v.level())));
        }
    }
    let g = class_enumerate(&ctx, level)?;
    let orbit = conjugate_orbit(&fam, &g, &ctx, digits_to_bits(digits))?;
    let shown = digits.min(60);
    let kind = match fam.kind {
        FamilyKind::FrickeF => "fricke_f",
        FamilyKind::Siegel12N => "siegel_12N",
        FamilyKind::JRational => "j_rational",
    };
    let mut text = format!("D = {disc}, N = {level}, family {kind}\n");
    let mut csv = vec![vec!["class".into(), "a".into(), "b".into(), "c".into(), "re".into(), "im".into()]];
    let mut rows = Vec::new();
    for iv in &orbit {
        let q = &g.reps[iv.class];
        text += &format!("{q}: {}\n", iv.value.to_decimal(shown));
        csv.push(vec![
            (iv.class + 1).to_string(),
            q.a.to_string(),
            q.b.to_string(),
            q.c.to_string(),
            iv.value.re().to_decimal(shown),
            iv.value.im().to_decimal(shown),
        ]);
        let m = iv.matrix;
        rows.push(json!({
            "class": iv.class + 1,
            "form": [q.a, q.b, q.c],
            "matrix": [[m.p, m.q], [m.r, m.s]],
            "value": complex_json(&iv.value, shown),
        }));
    }
    let json = json!({"disc": disc, "level": level, "family": kind, "values": rows});
    Ok(Report { text, json, csv, exit: 0 })
}

pub fn verify(name: &str, seed: u64, digits: usize) -> Result<Report> {
    let outcomes =
        checks::battery(name, seed, digits).ok_or_else(|| Error::Domain(format!("unknown battery {name:?}")))?;
    let mut text = String::new();
    let mut csv = vec![vec!["check".into(), "passed".into(), "detail".into()]];
    for o in &outcomes {
        text += &format!("[{}] {}: {}\n", if o.passed { "pass" } else { "FAIL" }, o.name, o.detail);
        csv.push(vec![o.name.clone(), o.passed.to_string(), o.detail.clone()]);
    }
    let all = outcomes.iter().all(|o| o.passed);
    let json = json!({
        "battery": name,
        "seed": seed,
        "passed": all,
        "checks": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
    });
    Ok(Report { text, json, csv, exit: if all { 0 } else { EXIT_FAILED } })
}
