//! Partial zeta functions of ray classes, `L′(0, χ)` through the Kronecker
//! limit formula, and the lattice-sum identity relating the two sides.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::g_values;
use crate::modfun::{eta, theta1};
use crate::numerics::{BigComplex, BigRat};
use crate::orderideals::{congruent_to_one, integral_ideals, units, IdealClassOracle, QuadLattice};
use crate::quadforms::{gcd, mod_inv, ClassGroup, Form, OrderContext};

/// A character of the class group, as an exponent vector over its basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Character {
    pub exponents: Vec<u64>,
    pub order: u64,
}

impl Character {
    pub fn from_group(g: &ClassGroup, i: usize) -> Self {
        let exponents = g.characters[i].clone();
        let order = exponents
            .iter()
            .zip(&g.invariant_factors)
            .map(|(&e, &d)| d / num_integer::gcd(e, d))
            .fold(1, num_integer::lcm);
        Self { exponents, order }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// `χ(C)` as `(num, den)` with `χ(C) = e^{2πi·num/den}`.
    pub fn exponent(&self, g: &ClassGroup, class: usize) -> (u64, u64) {
        g.character_exponent(&self.exponents, class)
    }

    pub fn value(&self, g: &ClassGroup, class: usize, prec: usize) -> BigComplex {
        let (num, den) = self.exponent(g, class);
        if num == 0 {
            BigComplex::one(prec)
        } else if 2 * num == den {
            BigComplex::from_i64(-1, prec)
        } else {
            BigComplex::from_rat(&BigRat::new(BigInt::from(num), BigInt::from(den)), prec).exp_2pi_i()
        }
    }
}

/// `|{ν ∈ O* : ν ≡ 1 (mod NO)}|`.
pub fn gamma_on(ctx: &OrderContext, n: i64) -> i64 {
    units(ctx).iter().filter(|u| congruent_to_one(u, n)).count() as i64
}

/// A truncated Dirichlet series together with an upper bound for what was left out.
#[derive(Clone, Debug, Serialize)]
pub struct PartialSum {
    pub re: f64,
    pub im: f64,
    pub terms: usize,
    pub tail: f64,
}

impl PartialSum {
    pub fn diff(&self, o: &Self) -> f64 {
        (self.re - o.re).hypot(self.im - o.im)
    }
}

fn check_s(s: (f64, f64)) -> Result<()> {
    if s.0 > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Re(s) = {} is not above 1", s.0)))
    }
}

/// `x^{-s}` for real `x > 0` and complex `s`.
fn pow_neg(x: f64, s: (f64, f64)) -> (f64, f64) {
    let l = x.ln();
    let m = (-s.0 * l).exp();
    let a = -s.1 * l;
    (m * a.cos(), m * a.sin())
}

/// Sums complex terms from largest to smallest modulus.
fn ordered_sum(mut terms: Vec<(f64, f64)>) -> (f64, f64) {
    terms.sort_by(|a, b| b.0.hypot(b.1).total_cmp(&a.0.hypot(a.1)));
    terms.iter().fold((0.0, 0.0), |acc, t| (acc.0 + t.0, acc.1 + t.1))
}

/// `Σ_{|w| > R} |w|^{-2σ}` over a lattice of covolume `covol` and cell diameter `d`.
pub fn lattice_tail(sigma: f64, r: f64, covol: f64, d: f64) -> f64 {
    if r <= 0.0 {
        return f64::INFINITY;
    }
    let t = 2.0 * sigma;
    t * PI / covol * (r.powf(2.0 - t) / (t - 2.0) + 2.0 * d * r.powf(1.0 - t) / (t - 1.0) + d * d * r.powf(-t) / t)
}

/// Data attached to the class of `Q`: `a′`, the point `-ω̄_Q` and the prefactor norm `N²a`.
struct ClassLattice {
    z: (f64, f64),
    shift: f64,
    scale: f64,
}

fn class_lattice(q: &Form, n: i64) -> Result<ClassLattice> {
    if gcd(q.a, n) != 1 {
        return Err(Error::Domain(format!("{q} has leading coefficient not prime to {n}")));
    }
    let ap = if n == 1 { 1 } else { mod_inv(q.a.rem_euclid(n), n).expect("coprime") };
    let d = (q.b * q.b - 4 * q.a * q.c) as f64;
    Ok(ClassLattice {
        z: (q.b as f64 / (2.0 * q.a as f64), (-d).sqrt() / (2.0 * q.a as f64)),
        shift: ap as f64 / n as f64,
        scale: (n * n * q.a) as f64,
    })
}

/// `1/(γ(N²a)^s) Σ_{|m|,|n| ≤ M} |m(-ω̄_Q) + n + a′/N|^{-2s}`, excluding the zero term.
pub fn zeta_lattice_partial(q: &Form, ctx: &OrderContext, n: i64, s: (f64, f64), m: i64) -> Result<PartialSum> {
    check_s(s)?;
    let cl = class_lattice(q, n)?;
    let gamma = gamma_on(ctx, n) as f64;
    let (zx, zy) = cl.z;
    let terms: Vec<(f64, f64)> = (-m..=m)
        .into_par_iter()
        .flat_map_iter(|i| {
            (-m..=m).filter_map(move |j| {
                let x = i as f64 * zx + j as f64 + cl.shift;
                let y = i as f64 * zy;
                let r2 = x * x + y * y;
                (r2 > 1e-18).then(|| pow_neg(r2, s))
            })
        })
        .collect();
    let count = terms.len();
    let (re, im) = ordered_sum(terms);
    let (pr, pi) = pow_neg(cl.scale, s);
    // smallest eigenvalue of the Gram matrix of (-ω̄_Q, 1)
    let (g11, g12, g22) = (zx * zx + zy * zy, zx, 1.0);
    let tr = g11 + g22;
    let lam = tr / 2.0 - ((g11 - g22).powi(2) / 4.0 + g12 * g12).sqrt();
    let r = lam.sqrt() * (m + 1) as f64 - cl.shift;
    let diam = (zx.abs() + 1.0).hypot(zy);
    let tail = lattice_tail(s.0, r, zy, diam) * cl.scale.powf(-s.0) / gamma;
    Ok(PartialSum {
        re: (re * pr - im * pi) / gamma,
        im: (re * pi + im * pr) / gamma,
        terms: count,
        tail,
    })
}

/// `Σ N(𝔞)^{-s}` over integral ideals `𝔞` of norm at most `bound`, bucketed by form class.
pub fn zeta_ideal_partials(
    g: &ClassGroup,
    oracle: &IdealClassOracle,
    dictionary: &[usize],
    s: (f64, f64),
    bound: i64,
) -> Result<Vec<PartialSum>> {
    check_s(s)?;
    let ctx = oracle.ctx;
    let n = g.level;
    let inverse_dict: Vec<usize> = {
        let mut v = vec![0; dictionary.len()];
        for (i, &o) in dictionary.iter().enumerate() {
            v[o] = i;
        }
        v
    };
    let ideals = integral_ideals(&ctx, bound, n);
    let rep_inv: Vec<QuadLattice> = oracle.reps.iter().map(|r| r.inverse()).collect::<Result<_>>()?;
    let classified: Vec<(usize, i64)> = ideals
        .par_iter()
        .map(|a| {
            let norm = a.covolume().to_integer().to_i64().expect("norm fits");
            for (k, ri) in rep_inv.iter().enumerate() {
                if principal_one_mod(&a.mul(ri), n)? {
                    return Ok((inverse_dict[k], norm));
                }
            }
            Err(Error::Invariant("ideal outside every ray class".into()))
        })
        .collect::<Result<_>>()?;
    let mut buckets: Vec<Vec<(f64, f64)>> = vec![Vec::new(); g.order()];
    for (c, norm) in classified {
        buckets[c].push(pow_neg(norm as f64, s));
    }
    Ok(g
        .reps
        .iter()
        .zip(buckets)
        .map(|(q, b)| {
            let terms = b.len();
            let (re, im) = ordered_sum(b);
            PartialSum { re, im, terms, tail: ideal_tail(q, ctx, n, s.0, bound) }
        })
        .collect())
}

/// Single-class wrapper around [`zeta_ideal_partials`].
pub fn zeta_ideal_partial(
    g: &ClassGroup,
    oracle: &IdealClassOracle,
    dictionary: &[usize],
    class: usize,
    s: (f64, f64),
    bound: i64,
) -> Result<PartialSum> {
    Ok(zeta_ideal_partials(g, oracle, dictionary, s, bound)?.swap_remove(class))
}

fn principal_one_mod(c: &QuadLattice, n: i64) -> Result<bool> {
    let Some(nu) = c.generator()? else {
        return Ok(false);
    };
    Ok(units(&c.ctx).iter().any(|z| congruent_to_one(&z.mul(&nu, &c.ctx), n)))
}

/// Tail of the ideal sum beyond norm `B`: lattice points with `N²a|w|² > B`.
fn ideal_tail(q: &Form, ctx: OrderContext, n: i64, sigma: f64, bound: i64) -> f64 {
    let cl = class_lattice(q, n).expect("class representative");
    let r = (bound as f64 / cl.scale).sqrt();
    let diam = (cl.z.0.abs() + 1.0).hypot(cl.z.1);
    lattice_tail(sigma, r, cl.z.1, diam) * cl.scale.powf(-sigma) / gamma_on(&ctx, n) as f64
}

/// `ln|g_{O,N}(C)|` for every class.
pub fn log_g_values(g: &ClassGroup, ctx: &OrderContext, prec: usize) -> Result<Vec<BigComplex>> {
    g_values(g, ctx, prec)?.iter().map(|v| v.ln_abs()).collect()
}

/// `L′(0, χ) = -1/(6Nγ) Σ χ(C) ln|g_{O,N}(C)|`.
pub fn lderiv0(chi: &Character, g: &ClassGroup, log_g: &[BigComplex], gamma: i64) -> BigComplex {
    let p = log_g[0].prec();
    let mut acc = BigComplex::zero(p);
    for (c, l) in log_g.iter().enumerate() {
        acc = acc.add(&chi.value(g, c, p).mul(l));
    }
    acc.div_i64(-6 * g.level * gamma)
}

/// `L′(0, χ)` for every character, in the order of `g.characters`.
pub fn all_lderiv0(g: &ClassGroup, log_g: &[BigComplex], gamma: i64) -> Vec<BigComplex> {
    (0..g.characters.len())
        .into_par_iter()
        .map(|i| lderiv0(&Character::from_group(g, i), g, log_g, gamma))
        .collect()
}

/// Recovers `ln|g(C)|` from all `L′(0, χ)` by orthogonality of characters.
pub fn fourier_inversion(g: &ClassGroup, lderivs: &[BigComplex], gamma: i64) -> Vec<BigComplex> {
    let p = lderivs[0].prec();
    let m = g.order() as i64;
    (0..g.order())
        .map(|c| {
            let mut acc = BigComplex::zero(p);
            for (i, l) in lderivs.iter().enumerate() {
                let chi = Character::from_group(g, i);
                acc = acc.add(&chi.value(g, c, p).conj().mul(l));
            }
            acc.mul_i64(-6 * g.level * gamma).div_i64(m)
        })
        .collect()
}

/// Which branch of the Kronecker limit formula applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiCase {
    /// `ω ∈ [z, 1]`.
    Inside,
    /// `ω ∉ [z, 1]`.
    Outside,
}

/// Whether `ω` lies on the lattice `[z, 1]` to the working precision.
pub fn on_lattice(omega: &BigComplex, z: &BigComplex) -> bool {
    let m = omega.im_f64() / z.im_f64();
    let mr = m.round();
    let rest = omega.sub(&z.mul_i64(mr as i64));
    let nr = rest.re_f64().round();
    let d = rest.sub(&BigComplex::from_i64(nr as i64, omega.prec()));
    (m - mr).abs() < 1e-9 && d.log10_abs() < -(crate::numerics::bits_to_digits(omega.prec()) as f64) / 2.0
}

/// `(ξ(0, ω, z), ξ′(0, ω, z))` from the closed forms of the Kronecker limit formula.
pub fn kronecker_xi(case: XiCase, omega: &BigComplex, z: &BigComplex, prec: usize) -> Result<(i64, BigComplex)> {
    if !z.im_is_positive() {
        return Err(Error::Domain("z is not in the upper half plane".into()));
    }
    let inside = on_lattice(omega, z);
    let p = prec + 32;
    let z = z.with_prec(p);
    let e = eta(&z, p)?;
    match (case, inside) {
        (XiCase::Inside, true) => {
            let four_pi2 = BigComplex::pi(p).sqr().mul_i64(4);
            Ok((-1, four_pi2.mul(&e.powi(4)?).ln_abs()?.neg().with_prec(prec)))
        }
        (XiCase::Outside, false) => {
            let w = omega.with_prec(p);
            let th = theta1(&w, &z, p)?;
            // e^{πiω(ω - ω̄)/(z - z̄)}
            let expo = w.mul(&w.sub(&w.conj())).div(&z.sub(&z.conj()))?.mul(&BigComplex::pi(p)).mul_i();
            let v = th.div(&e)?.mul(&expo.exp());
            Ok((0, v.ln_abs()?.mul_i64(-2).with_prec(prec)))
        }
        (XiCase::Inside, false) => Err(Error::Domain("ω is not on the lattice".into())),
        (XiCase::Outside, true) => Err(Error::Domain("ω lies on the lattice".into())),
    }
}

/// `ζ′_O(0, C)` for the class of `Q` through the Kronecker limit formula.
pub fn zeta_deriv0(q: &Form, ctx: &OrderContext, n: i64, prec: usize) -> Result<BigComplex> {
    let z = q.omega(prec).conj().neg();
    let gamma = gamma_on(ctx, n);
    if n == 1 {
        let (_, xi) = kronecker_xi(XiCase::Inside, &BigComplex::zero(prec), &z, prec)?;
        let ln_a = BigComplex::from_i64(q.a, prec).ln_abs()?;
        return Ok(ln_a.add(&xi).div_i64(gamma));
    }
    if gcd(q.a, n) != 1 {
        return Err(Error::Domain(format!("{q} has leading coefficient not prime to {n}")));
    }
    let ap = mod_inv(q.a.rem_euclid(n), n).expect("coprime");
    let omega = BigComplex::from_rat(&BigRat::new(BigInt::from(ap), BigInt::from(n)), prec);
    let (_, xi) = kronecker_xi(XiCase::Outside, &omega, &z, prec)?;
    Ok(xi.div_i64(gamma))
}
