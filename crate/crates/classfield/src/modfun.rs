//! High-precision evaluation of η, Δ, j, Siegel functions, ϑ₁, the
//! Weierstrass ℘-function and Fricke functions, all by q-expansions.

use std::f64::consts::{LN_10, PI};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::numerics::{bits_to_digits, BigComplex, BigRat};
use crate::quadforms::{OrderContext, UnimodularMatrix};

/// Extra bits carried through long products.
const INNER_GUARD: usize = 64;

fn check_upper(tau: &BigComplex) -> Result<()> {
    if tau.im_is_positive() {
        Ok(())
    } else {
        Err(Error::Domain("point is not in the upper half plane".into()))
    }
}

/// Number of factors so that `|q|^n · e^{2π·shift·Im τ}` drops below the working precision.
fn terms_needed(im_tau: f64, prec: usize, shift: f64) -> usize {
    let digits = bits_to_digits(prec) as f64;
    (digits * LN_10 / (2.0 * PI * im_tau) + shift.abs()).ceil() as usize + 8
}

fn two_pi(p: usize) -> BigComplex {
    BigComplex::pi(p).mul_i64(2)
}

/// `q = e^{2πiτ}`.
pub fn nome(tau: &BigComplex) -> BigComplex {
    tau.exp_2pi_i()
}

/// `∏_{n≥1} (1 - qⁿ)`.
fn euler_product(q: &BigComplex, n_max: usize) -> BigComplex {
    let p = q.prec();
    let one = BigComplex::one(p);
    let mut acc = one.clone();
    let mut qn = q.clone();
    for _ in 0..n_max {
        acc = acc.mul(&one.sub(&qn));
        qn = qn.mul(q);
    }
    acc
}

/// Dedekind η by its product expansion.
pub fn eta(tau: &BigComplex, prec: usize) -> Result<BigComplex> {
    check_upper(tau)?;
    let p = prec + INNER_GUARD;
    let t = tau.with_prec(p);
    let n = terms_needed(t.im_f64(), p, 0.0);
    let q = nome(&t);
    // e^{πiτ/12}
    let pref = t.div_i64(24).exp_2pi_i();
    Ok(pref.mul(&euler_product(&q, n)).with_prec(prec))
}

/// `Δ = (2π)¹² η²⁴` and `j = E₄³ / η²⁴`.
pub fn delta_j(tau: &BigComplex, prec: usize) -> Result<(BigComplex, BigComplex)> {
    check_upper(tau)?;
    let p = prec + INNER_GUARD;
    let t = tau.with_prec(p);
    let e24 = eta(&t, p)?.powi(24)?;
    let (e4, _) = eisenstein(&t, p)?;
    let delta = two_pi(p).powi(12)?.mul(&e24);
    let j = e4.powi(3)?.div(&e24)?;
    Ok((delta.with_prec(prec), j.with_prec(prec)))
}

fn divisor_sums(n_max: usize, k: u32) -> Vec<i128> {
    let mut s = vec![0i128; n_max + 1];
    for d in 1..=n_max {
        let dk = (d as i128).pow(k);
        let mut m = d;
        while m <= n_max {
            s[m] += dk;
            m += d;
        }
    }
    s
}

/// Normalised Eisenstein series `(E₄, E₆)` at `τ`.
pub fn eisenstein(tau: &BigComplex, prec: usize) -> Result<(BigComplex, BigComplex)> {
    check_upper(tau)?;
    let p = prec + INNER_GUARD;
    let t = tau.with_prec(p);
    let n = terms_needed(t.im_f64(), p, 0.0);
    let q = nome(&t);
    let s3 = divisor_sums(n, 3);
    let s5 = divisor_sums(n, 5);
    let mut a3 = BigComplex::zero(p);
    let mut a5 = BigComplex::zero(p);
    let mut qn = q.clone();
    for m in 1..=n {
        a3 = a3.add(&qn.mul(&BigComplex::from_i128(s3[m], p)));
        a5 = a5.add(&qn.mul(&BigComplex::from_i128(s5[m], p)));
        qn = qn.mul(&q);
    }
    let one = BigComplex::one(p);
    Ok((
        one.add(&a3.mul_i64(240)).with_prec(prec),
        one.sub(&a5.mul_i64(504)).with_prec(prec),
    ))
}

/// Weierstrass invariants `(g₂, g₃)` of the lattice `[τ, 1]`.
pub fn g2_g3(tau: &BigComplex, prec: usize) -> Result<(BigComplex, BigComplex)> {
    let p = prec + INNER_GUARD;
    let (e4, e6) = eisenstein(&tau.with_prec(p), p)?;
    let tp = two_pi(p);
    let g2 = tp.powi(4)?.mul(&e4).div_i64(12);
    let g3 = tp.powi(6)?.mul(&e6).div_i64(216);
    Ok((g2.with_prec(prec), g3.with_prec(prec)))
}

/// A nonintegral index `𝐯 = [v₁ v₂] ∈ M_{1,2}(ℚ)` of a Fricke family.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrickeIndex {
    pub v1: BigRat,
    pub v2: BigRat,
}

impl FrickeIndex {
    pub fn new(v1: BigRat, v2: BigRat) -> Result<Self> {
        if v1.is_integer() && v2.is_integer() {
            return Err(Error::Domain(format!("index [{v1} {v2}] is integral")));
        }
        Ok(Self { v1, v2 })
    }

    pub fn from_ints(n1: i64, n2: i64, n: i64) -> Result<Self> {
        Self::new(
            BigRat::new(BigInt::from(n1), BigInt::from(n)),
            BigRat::new(BigInt::from(n2), BigInt::from(n)),
        )
    }

    /// Smallest `N` with `N𝐯` integral.
    pub fn level(&self) -> i64 {
        let l = self.v1.denom().lcm(self.v2.denom());
        i64::try_from(l).expect("level fits in i64")
    }

    /// `𝐯γ` for a row vector times an integer matrix.
    pub fn act(&self, g: &UnimodularMatrix) -> Self {
        let m = |x: i64| BigRat::from_integer(BigInt::from(x));
        Self {
            v1: &self.v1 * m(g.p) + &self.v2 * m(g.r),
            v2: &self.v1 * m(g.q) + &self.v2 * m(g.s),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            v1: -&self.v1,
            v2: -&self.v2,
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = BigRat::from_integer(BigInt::from(k));
        Self {
            v1: &self.v1 * &k,
            v2: &self.v2 * &k,
        }
    }

    fn frac(x: &BigRat) -> BigRat {
        x - x.floor()
    }

    /// Representative of `±𝐯 + ℤ²` with entries in `[0, 1)`, lexicographically least.
    pub fn normalized(&self) -> Self {
        let a = Self {
            v1: Self::frac(&self.v1),
            v2: Self::frac(&self.v2),
        };
        let b = Self {
            v1: Self::frac(&-&self.v1),
            v2: Self::frac(&-&self.v2),
        };
        if (&b.v1, &b.v2) < (&a.v1, &a.v2) {
            b
        } else {
            a
        }
    }

    pub fn is_half_integral(&self) -> bool {
        let two = BigRat::from_integer(BigInt::from(2));
        (&self.v1 * &two).is_integer() && (&self.v2 * &two).is_integer()
    }
}

/// `B₂(x) = x² - x + 1/6`.
fn bernoulli2(x: &BigRat) -> BigRat {
    x * x - x + BigRat::new(BigInt::one(), BigInt::from(6))
}

/// The Siegel function `g_𝐯(τ)` by its product expansion, with `𝐯` used as given.
pub fn siegel(v: &FrickeIndex, tau: &BigComplex, prec: usize) -> Result<BigComplex> {
    check_upper(tau)?;
    if v.v1.is_integer() && v.v2.is_integer() {
        return Err(Error::Domain("Siegel function of an integral index".into()));
    }
    let p = prec + INNER_GUARD;
    let t = tau.with_prec(p);
    let v1f = rat_to_f64(&v.v1);
    let n = terms_needed(t.im_f64(), p, v1f.abs() + 1.0);
    let q = nome(&t);
    let z = t.mul_rat(&v.v1).add(&BigComplex::from_rat(&v.v2, p));
    let qz = z.exp_2pi_i();
    let qz_inv = qz.inv()?;
    // -q^{B₂(v₁)/2} e^{πi v₂(v₁-1)}
    let lead_arg = t
        .mul_rat(&(bernoulli2(&v.v1) / BigRat::from_integer(BigInt::from(2))))
        .add(&BigComplex::from_rat(&(&v.v2 * (&v.v1 - BigRat::one()) / BigRat::from_integer(BigInt::from(2))), p));
    let lead = lead_arg.exp_2pi_i().neg();
    let one = BigComplex::one(p);
    let mut acc = lead.mul(&one.sub(&qz));
    let mut qn = q.clone();
    for _ in 0..n {
        let f = one.sub(&qn.mul(&qz)).mul(&one.sub(&qn.mul(&qz_inv)));
        acc = acc.mul(&f);
        qn = qn.mul(&q);
    }
    Ok(acc.with_prec(prec))
}

/// `g_𝐯(τ)^{12N}` with `N` the level of `𝐯`; invariant under `𝐯 ↦ ±𝐯 + ℤ²`.
pub fn siegel_power(v: &FrickeIndex, tau: &BigComplex, prec: usize) -> Result<BigComplex> {
    let n = v.level();
    let nv = v.normalized();
    let extra = (12 * n) as usize;
    let p = prec + 2 * (usize::BITS - extra.leading_zeros()) as usize;
    let g = siegel(&nv, &tau.with_prec(p), p)?;
    Ok(g.powi(12 * n)?.with_prec(prec))
}

fn rat_to_f64(x: &BigRat) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Jacobi `ϑ₁(ω, z) = 2e^{πiz/6} sin(πω) η(z) ∏ (1 - e^{2πi(nz+ω)})(1 - e^{2πi(nz-ω)})`.
pub fn theta1(omega: &BigComplex, z: &BigComplex, prec: usize) -> Result<BigComplex> {
    check_upper(z)?;
    let p = prec + INNER_GUARD;
    let zz = z.with_prec(p);
    let w = omega.with_prec(p);
    let im_ratio = (w.im_f64() / zz.im_f64()).abs();
    let n = terms_needed(zz.im_f64(), p, im_ratio + 1.0);
    let q = nome(&zz);
    let u = w.exp_2pi_i();
    let u_inv = u.inv()?;
    let one = BigComplex::one(p);
    let mut acc = zz.div_i64(12).exp_2pi_i().mul_i64(2);
    acc = acc.mul(&BigComplex::pi(p).mul(&w).sin()).mul(&eta(&zz, p)?);
    let mut qn = q.clone();
    for _ in 0..n {
        acc = acc.mul(&one.sub(&qn.mul(&u))).mul(&one.sub(&qn.mul(&u_inv)));
        qn = qn.mul(&q);
    }
    Ok(acc.with_prec(prec))
}

/// Shifts `z` by lattice vectors of `[τ, 1]` so that `0 ≤ Im z / Im τ < 1`.
fn reduce_mod_lattice(z: &BigComplex, tau: &BigComplex) -> BigComplex {
    let k = (z.im_f64() / tau.im_f64()).floor() as i64;
    let z1 = z.sub(&tau.mul_i64(k));
    let m = z1.re_f64().round() as i64;
    z1.sub(&BigComplex::from_i64(m, z.prec()))
}

/// `(℘(z), ℘′(z))` for the lattice `[τ, 1]`.
pub fn wp(z: &BigComplex, tau: &BigComplex, prec: usize) -> Result<(BigComplex, BigComplex)> {
    check_upper(tau)?;
    let p = prec + INNER_GUARD;
    let t = tau.with_prec(p);
    let zr = reduce_mod_lattice(&z.with_prec(p), &t);
    let n = terms_needed(t.im_f64(), p, 2.0);
    let q = nome(&t);
    let u = zr.exp_2pi_i();
    let u_inv = u.inv()?;
    let one = BigComplex::one(p);
    let pole_tol = -(bits_to_digits(prec) as f64) / 2.0;
    for w in [&u, &q.mul(&u_inv)] {
        if one.sub(w).log10_abs() < pole_tol {
            return Err(Error::Pole("z lies on the period lattice".into()));
        }
    }
    // Σ_{n∈ℤ} of w/(1-w)² and w(1+w)/(1-w)³, negative n via w = qᵐ/u
    let term = |w: &BigComplex| -> Result<(BigComplex, BigComplex)> {
        let d = one.sub(w);
        let d2 = d.sqr();
        let a = w.div(&d2)?;
        let b = w.mul(&one.add(w)).div(&d2.mul(&d))?;
        Ok((a, b))
    };
    let (mut s, mut sp) = term(&u)?;
    let mut lam = BigComplex::zero(p);
    let mut qn = q.clone();
    for m in 1..=n {
        let (a1, b1) = term(&qn.mul(&u))?;
        let (a2, b2) = term(&qn.mul(&u_inv))?;
        s = s.add(&a1).add(&a2);
        sp = sp.add(&b1).sub(&b2);
        lam = lam.add(&qn.mul_i64(m as i64).div(&one.sub(&qn))?);
        qn = qn.mul(&q);
    }
    let tpi = two_pi(p).mul_i();
    let tpi2 = tpi.sqr();
    let wp = tpi2.mul(&s.add(&BigComplex::one(p).div_i64(12)).sub(&lam.mul_i64(2)));
    let wpp = tpi2.mul(&tpi).mul(&sp);
    Ok((wp.with_prec(prec), wpp.with_prec(prec)))
}

/// `f_𝐯(τ) = -2⁷3³ (g₂g₃/Δ) ℘(v₁τ + v₂)`.
pub fn fricke(v: &FrickeIndex, tau: &BigComplex, prec: usize) -> Result<BigComplex> {
    check_upper(tau)?;
    if v.v1.is_integer() && v.v2.is_integer() {
        return Err(Error::Domain("Fricke function of an integral index".into()));
    }
    let p = prec + INNER_GUARD;
    let t = tau.with_prec(p);
    let scale = weber_scale(&t, p)?;
    let z = t.mul_rat(&v.v1).add(&BigComplex::from_rat(&v.v2, p));
    let (w, _) = wp(&z, &t, p)?;
    Ok(scale.mul(&w).mul_i64(-(128 * 27)).with_prec(prec))
}

/// `g₂g₃/Δ` at `[τ, 1]`.
fn weber_scale(tau: &BigComplex, p: usize) -> Result<BigComplex> {
    let (g2, g3) = g2_g3(tau, p)?;
    let (delta, _) = delta_j(tau, p)?;
    g2.mul(&g3).div(&delta)
}

/// The curve `y² = 4x³ - A_O x - B_O` attached to the order.
#[derive(Clone, Debug)]
pub struct EllipticModel {
    pub ctx: OrderContext,
    pub a: BigComplex,
    pub b: BigComplex,
    pub j: BigComplex,
    tau: BigComplex,
    scale: BigComplex,
    scale_root: BigComplex,
    prec: usize,
}

/// `A_O = j(j-1728)/2¹²3⁹`, `B_O = j(j-1728)²/2¹⁸3¹⁵` with `j = j(τ_O)`.
pub fn elliptic_model(ctx: &OrderContext, prec: usize) -> Result<EllipticModel> {
    if ctx.has_extra_units() {
        return Err(Error::Domain(format!("discriminant {} has g₂g₃ = 0", ctx.disc)));
    }
    let p = prec + INNER_GUARD;
    let tau = ctx.tau(p);
    let (_, j) = delta_j(&tau, p)?;
    let jm = j.sub(&BigComplex::from_i64(1728, p));
    let a = j.mul(&jm).div(&BigComplex::from_i128(2i128.pow(12) * 3i128.pow(9), p))?;
    let b = j.mul(&jm).mul(&jm).div(&BigComplex::from_i128(2i128.pow(18) * 3i128.pow(15), p))?;
    let scale = weber_scale(&tau, p)?;
    let scale_root = scale.powi(3)?.sqrt();
    Ok(EllipticModel {
        ctx: *ctx,
        a,
        b,
        j,
        tau,
        scale,
        scale_root,
        prec,
    })
}

impl EllipticModel {
    /// `(X_𝐯, Y_𝐯)` at `τ_O`; `Y` uses the principal root of `(g₂g₃/Δ)³`.
    pub fn torsion_point(&self, v: &FrickeIndex) -> Result<(BigComplex, BigComplex)> {
        if v.v1.is_integer() && v.v2.is_integer() {
            return Err(Error::Domain("integral index".into()));
        }
        let p = self.tau.prec();
        let z = self.tau.mul_rat(&v.v1).add(&BigComplex::from_rat(&v.v2, p));
        let (w, wd) = wp(&z, &self.tau, p)?;
        let x = self.scale.mul(&w);
        let y = self.scale_root.mul(&wd);
        Ok((x.with_prec(self.prec), y.with_prec(self.prec)))
    }

    /// `|Y² - (4X³ - AX - B)|` relative to the size of the terms, as log10.
    pub fn weierstrass_residual(&self, x: &BigComplex, y: &BigComplex) -> f64 {
        let rhs = x.powi(3).expect("finite").mul_i64(4).sub(&self.a.mul(x)).sub(&self.b);
        let scale = rhs.log10_abs().max(y.sqr().log10_abs()).max(self.b.log10_abs());
        y.sqr().sub(&rhs).log10_abs() - scale
    }
}

/// `γτ = (pτ + q)/(rτ + s)`.
pub fn mobius(g: &UnimodularMatrix, tau: &BigComplex) -> Result<BigComplex> {
    let p = tau.prec();
    let num = tau.mul_i64(g.p).add(&BigComplex::from_i64(g.q, p));
    let den = tau.mul_i64(g.r).add(&BigComplex::from_i64(g.s, p));
    num.div(&den)
}

/// Brings `τ` into the standard fundamental domain; returns `(τ₀, γ)` with `γτ₀ = τ`.
pub fn to_fundamental_domain(tau: &BigComplex) -> Result<(BigComplex, UnimodularMatrix)> {
    check_upper(tau)?;
    let mut t = tau.clone();
    // γ accumulates the inverse of the applied moves
    let mut g = UnimodularMatrix::IDENTITY;
    for _ in 0..10_000 {
        let k = t.re_f64().round() as i64;
        if k != 0 {
            t = t.sub(&BigComplex::from_i64(k, t.prec()));
            g = g.mul(&UnimodularMatrix::translation(k));
        }
        if t.norm_sqr().re_f64() < 1.0 - 1e-12 {
            t = t.inv()?.neg();
            g = g.mul(&UnimodularMatrix::S.inverse());
        } else {
            return Ok((t, g));
        }
    }
    Err(Error::Resource("fundamental domain reduction did not terminate".into()))
}
