//! Ray class invariants `f(C)` for Fricke families, the invariant
//! `g_{O,N}(C)`, and minimal polynomials recovered from conjugate values.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modfun::{delta_j, eta, fricke, siegel_power, to_fundamental_domain, FrickeIndex};
use crate::numerics::{digits_to_bits, format_log10, BigComplex, BigRat, PrecisionPolicy};
use crate::orderideals::{QuadElem, QuadLattice};
use crate::quadforms::{gcd, mod_inv, ClassGroup, Form, OrderContext, UnimodularMatrix};

/// Largest accepted recognition residual, as log10.
pub const RECOGNITION_LOG10: f64 = -20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    FrickeF,
    #[serde(rename = "siegel_12N")]
    Siegel12N,
    JRational,
}

/// A modular function of level `N` on which `GL₂(ℤ/N)` acts through the index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilyId {
    pub kind: FamilyKind,
    pub index: Option<FrickeIndex>,
}

impl FamilyId {
    pub fn fricke(v: FrickeIndex) -> Self {
        Self { kind: FamilyKind::FrickeF, index: Some(v) }
    }

    pub fn siegel(v: FrickeIndex) -> Self {
        Self { kind: FamilyKind::Siegel12N, index: Some(v) }
    }

    /// `g_{[0, 1/N]}^{12N}`.
    pub fn siegel_standard(n: i64) -> Result<Self> {
        Ok(Self::siegel(FrickeIndex::from_ints(0, 1, n)?))
    }

    pub fn j() -> Self {
        Self { kind: FamilyKind::JRational, index: None }
    }

    /// `h^γ = h_{𝐯γ}`; `j` is fixed.
    pub fn act(&self, g: &UnimodularMatrix) -> Self {
        Self { kind: self.kind, index: self.index.as_ref().map(|v| v.act(g)) }
    }

    pub fn evaluate(&self, tau: &BigComplex, prec: usize) -> Result<BigComplex> {
        match (self.kind, &self.index) {
            (FamilyKind::JRational, _) => Ok(delta_j(tau, prec)?.1),
            (FamilyKind::FrickeF, Some(v)) => fricke(v, tau, prec),
            (FamilyKind::Siegel12N, Some(v)) => siegel_power(v, tau, prec),
            _ => Err(Error::Domain("family needs an index".into())),
        }
    }

    fn check_order(&self, ctx: &OrderContext) -> Result<()> {
        if ctx.has_extra_units() {
            return Err(Error::Domain(format!("discriminant {} is excluded", ctx.disc)));
        }
        Ok(())
    }
}

/// One evaluated invariant together with the matrix used to produce it.
#[derive(Clone, Debug)]
pub struct InvariantValue {
    pub class: usize,
    pub value: BigComplex,
    pub family: FamilyId,
    pub matrix: UnimodularMatrix,
}

/// `[1, -a′(b+b_O)/2; 0, a′]` reduced mod `N`, with `aa′ ≡ 1 (mod N)`.
pub fn class_matrix(q: &Form, ctx: &OrderContext, n: i64) -> Result<UnimodularMatrix> {
    if gcd(q.a, n) != 1 {
        return Err(Error::Domain(format!("{q} has leading coefficient not prime to {n}")));
    }
    let ap = if n == 1 { 1 } else { mod_inv(q.a.rem_euclid(n), n).expect("coprime") };
    let half = (q.b + ctx.b_o) / 2;
    Ok(UnimodularMatrix {
        p: 1,
        q: (-(ap as i128) * half as i128).rem_euclid(n as i128) as i64,
        r: 0,
        s: ap,
    })
}

/// `-ω̄_Q = (τ_O + (b + b_O)/2) / a`.
pub fn class_point(q: &Form, prec: usize) -> BigComplex {
    q.omega(prec).conj().neg()
}

/// `f^M(-ω̄_Q)` with the matrix of [`class_matrix`].
pub fn class_invariant(family: &FamilyId, q: &Form, ctx: &OrderContext, n: i64, prec: usize) -> Result<BigComplex> {
    family.check_order(ctx)?;
    let m = class_matrix(q, ctx, n)?;
    family.act(&m).evaluate(&class_point(q, prec), prec)
}

/// Solves `t = u·ξ₁ + v·ξ₂` over ℚ.
fn coordinates(t: &QuadElem, x1: &QuadElem, x2: &QuadElem) -> (BigRat, BigRat) {
    let det = &x1.x * &x2.y - &x2.x * &x1.y;
    let u = (&t.x * &x2.y - &x2.x * &t.y) / &det;
    let v = (&x1.x * &t.y - &t.x * &x1.y) / &det;
    (u, v)
}

fn small(x: &BigRat) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::Invariant(format!("matrix entry {x} is not integral")));
    }
    x.to_integer().to_i64().ok_or_else(|| Error::Invariant("matrix entry overflows".into()))
}

/// The matrix `A` with `[τ_O; 1] = A[ξ₁; ξ₂]` and the point `ξ₁/ξ₂`, for a basis of `𝔠⁻¹`.
pub fn ideal_data(ideal: &QuadLattice, n: i64, prec: usize) -> Result<(UnimodularMatrix, BigComplex)> {
    if !ideal.is_proper() {
        return Err(Error::Domain("ideal is not proper".into()));
    }
    if !ideal.prime_to(n) {
        return Err(Error::Domain(format!("ideal is not prime to {n}")));
    }
    let inv = ideal.inverse()?;
    let (x1, x2) = inv.basis();
    let (a11, a12) = coordinates(&QuadElem::tau(), &x1, &x2);
    let (a21, a22) = coordinates(&QuadElem::int(1, 0), &x1, &x2);
    let a = UnimodularMatrix { p: small(&a11)?, q: small(&a12)?, r: small(&a21)?, s: small(&a22)? };
    let det = a.det();
    if det <= 0 || gcd(det, n) != 1 {
        return Err(Error::Invariant(format!("det A = {det} is not a positive unit mod {n}")));
    }
    let xi = x1.to_complex(&ideal.ctx, prec).div(&x2.to_complex(&ideal.ctx, prec))?;
    Ok((a, xi))
}

/// `f^Ã(ξ)` for an ideal `𝔠` of the class, `ξ = ξ₁/ξ₂` from a basis of `𝔠⁻¹`.
pub fn general_invariant(family: &FamilyId, ideal: &QuadLattice, n: i64, prec: usize) -> Result<BigComplex> {
    family.check_order(&ideal.ctx)?;
    let (a, xi) = ideal_data(ideal, n, prec)?;
    let m = UnimodularMatrix {
        p: a.p.rem_euclid(n),
        q: a.q.rem_euclid(n),
        r: a.r.rem_euclid(n),
        s: a.s.rem_euclid(n),
    };
    let (x0, g) = to_fundamental_domain(&xi)?;
    family.act(&m).act(&g).evaluate(&x0, prec)
}

/// `(2π)¹² N_O([ξ,1])⁶ |η(ξ)|²⁴` where `N_O([ξ,1]) = 2 Im ξ / √|D|`.
pub fn g_level_one(xi: &BigComplex, ctx: &OrderContext, prec: usize) -> Result<BigComplex> {
    let p = prec + 32;
    // Im(ξ)⁶|η(ξ)|²⁴ is SL₂(ℤ)-invariant
    let xi = to_fundamental_domain(&xi.with_prec(p))?.0;
    let two_pi = BigComplex::pi(p).mul_i64(2);
    let sqrt_d = BigComplex::from_i64(-ctx.disc, p).sqrt();
    let norm = xi.im().mul_i64(2).div(&sqrt_d)?;
    let e = eta(&xi, p)?.abs();
    let v = two_pi.powi(12)?.mul(&norm.powi(6)?).mul(&e.powi(24)?);
    Ok(v.with_prec(prec))
}

/// `g_{O,N}` at the class of `Q`.
pub fn g_on(q: &Form, ctx: &OrderContext, n: i64, prec: usize) -> Result<BigComplex> {
    if n == 1 {
        return g_level_one(&class_point(q, prec), ctx, prec);
    }
    class_invariant(&FamilyId::siegel_standard(n)?, q, ctx, n, prec)
}

/// `g_{O,N}` from an arbitrary ideal of the class.
pub fn g_on_ideal(ideal: &QuadLattice, n: i64, prec: usize) -> Result<BigComplex> {
    if n == 1 {
        let (_, xi) = ideal_data(ideal, 1, prec)?;
        return g_level_one(&xi, &ideal.ctx, prec);
    }
    general_invariant(&FamilyId::siegel_standard(n)?, ideal, n, prec)
}

/// `{f(C) : C ∈ G}` in the order of `G.reps`.
pub fn conjugate_orbit(family: &FamilyId, g: &ClassGroup, ctx: &OrderContext, prec: usize) -> Result<Vec<InvariantValue>> {
    family.check_order(ctx)?;
    g.reps
        .par_iter()
        .enumerate()
        .map(|(i, q)| {
            let m = class_matrix(q, ctx, g.level)?;
            let value = class_invariant(family, q, ctx, g.level, prec)?;
            Ok(InvariantValue { class: i, value, family: family.clone(), matrix: m })
        })
        .collect()
}

/// `g_{O,N}(C)` for every class of `G`.
pub fn g_values(g: &ClassGroup, ctx: &OrderContext, prec: usize) -> Result<Vec<BigComplex>> {
    g.reps.par_iter().map(|q| g_on(q, ctx, g.level, prec)).collect()
}

/// Coefficients of `∏(x - rᵢ)`, lowest degree first.
pub fn expand_roots(roots: &[BigComplex]) -> Vec<BigComplex> {
    let p = roots.iter().map(BigComplex::prec).max().unwrap_or(64);
    let mut c = vec![BigComplex::one(p)];
    for r in roots {
        let mut next = vec![BigComplex::zero(p); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] = next[i + 1].add(ci);
            next[i] = next[i].sub(&ci.mul(r));
        }
        c = next;
    }
    c
}

/// Outcome of one precision level.
#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub digits: usize,
    pub unrecognized: Vec<usize>,
}

/// Integer polynomial recovered from numerical roots.
#[derive(Clone, Debug)]
pub struct MinimalPolynomial {
    pub disc: i64,
    pub level: i64,
    pub degree: usize,
    /// Nearest integers to the numerical coefficients, lowest degree first.
    pub coefficients: Vec<BigInt>,
    /// The numerical coefficients themselves.
    pub numeric: Vec<BigComplex>,
    /// log10 of `max(|c - n|, |Im c|)` per coefficient.
    pub residuals: Vec<f64>,
    pub digits_used: usize,
    pub recognized: bool,
    pub attempts: Vec<Attempt>,
}

impl MinimalPolynomial {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "disc": self.disc,
            "level": self.level,
            "degree": self.degree,
            "recognized": self.recognized,
            "coefficients": self.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "residuals": self.residuals.iter().map(|r| format_log10(*r)).collect::<Vec<_>>(),
            "precision_used": self.digits_used,
            "attempts": self.attempts,
            "unrecognized": self.unrecognized_report(),
        })
    }

    fn unrecognized_report(&self) -> Vec<serde_json::Value> {
        self.attempts
            .last()
            .map(|a| {
                a.unrecognized
                    .iter()
                    .map(|&i| serde_json::json!({"power": i, "value": self.numeric[i].to_decimal(self.digits_used.min(120))}))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Polynomial rendered as `x^12 - 1973… x^11 + … + 1`.
    pub fn display(&self) -> String {
        let mut s = String::new();
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &BigInt::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let one = mag == BigInt::from(1);
            match i {
                0 => s.push_str(&mag.to_string()),
                1 if one => s.push('x'),
                1 => s.push_str(&format!("{mag} x")),
                _ if one => s.push_str(&format!("x^{i}")),
                _ => s.push_str(&format!("{mag} x^{i}")),
            }
        }
        s
    }
}

/// Nearest integers and residuals for a list of numerical coefficients.
pub fn recognize_coefficients(c: &[BigComplex]) -> (Vec<BigInt>, Vec<f64>) {
    c.iter()
        .map(|z| {
            let (n, r) = z.nearest_integer();
            (n, r.max(z.im().log10_abs()))
        })
        .unzip()
}

/// Minimal polynomial of `g_{O,N}(C₀)` from its conjugates, escalating precision on failure.
pub fn minimal_polynomial(g: &ClassGroup, ctx: &OrderContext, policy: &PrecisionPolicy) -> Result<MinimalPolynomial> {
    if g.level < 2 {
        return Err(Error::Domain("minimal polynomials need level at least 2".into()));
    }
    family_minimal_polynomial(&FamilyId::siegel_standard(g.level)?, g, ctx, policy)
}

/// Same as [`minimal_polynomial`] for any admissible family.
pub fn family_minimal_polynomial(
    family: &FamilyId,
    g: &ClassGroup,
    ctx: &OrderContext,
    policy: &PrecisionPolicy,
) -> Result<MinimalPolynomial> {
    family.check_order(ctx)?;
    let threshold = policy.tolerance().log10().min(RECOGNITION_LOG10);
    let mut attempts = Vec::new();
    let mut k = 0;
    loop {
        let pol = policy.escalated(k);
        let digits = pol.working_digits();
        let prec = digits_to_bits(digits);
        let roots: Vec<BigComplex> = conjugate_orbit(family, g, ctx, prec)?.into_iter().map(|v| v.value).collect();
        let numeric = expand_roots(&roots);
        let (coefficients, residuals) = recognize_coefficients(&numeric);
        let unrecognized: Vec<usize> = residuals.iter().enumerate().filter(|(_, r)| **r >= threshold).map(|(i, _)| i).collect();
        let ok = unrecognized.is_empty();
        attempts.push(Attempt { digits, unrecognized });
        if ok || k >= policy.max_escalations {
            return Ok(MinimalPolynomial {
                disc: ctx.disc,
                level: g.level,
                degree: roots.len(),
                coefficients,
                numeric,
                residuals,
                digits_used: digits,
                recognized: ok,
                attempts,
            });
        }
        k += 1;
    }
}

/// Parses decimal integer strings, used for reference coefficient lists.
pub fn parse_integers(items: &[&str]) -> Result<Vec<BigInt>> {
    items
        .iter()
        .map(|s| s.parse::<BigInt>().map_err(|e| Error::Format(format!("{s}: {e}"))))
        .collect()
}

/// An ideal in the class of `Q` of the form `λ·a^k[ω_Q, 1]`, integral and prime to `N`.
pub fn class_ideal(q: &Form, ctx: &OrderContext, n: i64) -> Result<QuadLattice> {
    if gcd(q.a, n) != 1 {
        return Err(Error::Domain(format!("{q} has leading coefficient not prime to {n}")));
    }
    let phi = (1..=n.max(1)).filter(|k| k.gcd(&n) == 1).count() as u32;
    let scale = BigRat::from_integer(BigInt::from(q.a).pow(phi));
    Ok(QuadLattice::from_form(ctx, q).scale(&QuadElem::new(scale, BigRat::zero())))
}
