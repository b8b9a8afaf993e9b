//! Ideal arithmetic in an imaginary quadratic order and a brute-force ray
//! class group used as an independent oracle for the form side.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, BigRat};
use crate::quadforms::{expected_order, gcd, ClassGroup, Form, OrderContext};

fn bi(n: i64) -> BigInt {
    BigInt::from(n)
}

fn br(n: i64) -> BigRat {
    BigRat::from_integer(bi(n))
}

/// `x + y·τ_O` with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub x: BigRat,
    pub y: BigRat,
}

impl QuadElem {
    pub fn new(x: BigRat, y: BigRat) -> Self {
        Self { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Self::new(br(x), br(y))
    }

    pub fn tau() -> Self {
        Self::int(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.x, -&self.y)
    }

    pub fn scale(&self, k: &BigRat) -> Self {
        Self::new(&self.x * k, &self.y * k)
    }

    /// Product using `τ² = -b_O τ - c_O`.
    pub fn mul(&self, o: &Self, ctx: &OrderContext) -> Self {
        let yy = &self.y * &o.y;
        Self::new(
            &self.x * &o.x - &yy * br(ctx.c_o),
            &self.x * &o.y + &o.x * &self.y - &yy * br(ctx.b_o),
        )
    }

    pub fn conj(&self, ctx: &OrderContext) -> Self {
        Self::new(&self.x - &self.y * br(ctx.b_o), -&self.y)
    }

    /// `x² - b_O xy + c_O y²`.
    pub fn norm(&self, ctx: &OrderContext) -> BigRat {
        &self.x * &self.x - &self.x * &self.y * br(ctx.b_o) + &self.y * &self.y * br(ctx.c_o)
    }

    /// `x·ȳ + x̄·y`, the trace of `self · conj(o)`.
    pub fn trace_form(&self, o: &Self, ctx: &OrderContext) -> BigRat {
        let p = self.mul(&o.conj(ctx), ctx);
        br(2) * &p.x - &p.y * br(ctx.b_o)
    }

    pub fn inv(&self, ctx: &OrderContext) -> Result<Self> {
        let n = self.norm(ctx);
        if n.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.conj(ctx).scale(&n.recip()))
    }

    pub fn div(&self, o: &Self, ctx: &OrderContext) -> Result<Self> {
        Ok(self.mul(&o.inv(ctx)?, ctx))
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    pub fn to_complex(&self, ctx: &OrderContext, prec: usize) -> BigComplex {
        BigComplex::from_rat(&self.x, prec).add(&ctx.tau(prec).mul_rat(&self.y))
    }
}

/// A full-rank lattice in `K`, stored in Hermite normal form
/// `{(n11·τ + n12)/den, n22/den}` with `n11, n22 > 0`, `0 ≤ n12 < n22`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadLattice {
    pub ctx: OrderContext,
    den: BigInt,
    n11: BigInt,
    n12: BigInt,
    n22: BigInt,
}

impl QuadLattice {
    /// The ℤ-module spanned by the given elements; fails when the rank is below two.
    pub fn from_generators(ctx: &OrderContext, gens: &[QuadElem]) -> Result<Self> {
        let mut den = BigInt::one();
        for g in gens {
            den = den.lcm(g.x.denom()).lcm(g.y.denom());
        }
        // rows (τ-coefficient, 1-coefficient) scaled to integers
        let rows: Vec<(BigInt, BigInt)> = gens
            .iter()
            .map(|g| {
                let y = (&g.y * BigRat::from_integer(den.clone())).to_integer();
                let x = (&g.x * BigRat::from_integer(den.clone())).to_integer();
                (y, x)
            })
            .collect();
        let mut g = BigInt::zero();
        let mut t = BigInt::zero();
        let mut m = BigInt::zero();
        for (a, b) in rows {
            if a.is_zero() {
                m = m.gcd(&b);
                continue;
            }
            if g.is_zero() {
                g = a;
                t = b;
                if g.is_negative() {
                    g = -g;
                    t = -t;
                }
                continue;
            }
            let e = g.extended_gcd(&a);
            let (gg, x, y) = if e.gcd.is_negative() { (-e.gcd, -e.x, -e.y) } else { (e.gcd, e.x, e.y) };
            let new_t = &x * &t + &y * &b;
            // (a/gg)·(g, t) - (g/gg)·(a, b) has zero τ-part
            let rest = (&a / &gg) * &t - (&g / &gg) * &b;
            m = m.gcd(&rest);
            g = gg;
            t = new_t;
        }
        if g.is_zero() || m.is_zero() {
            return Err(Error::Domain("generators do not span a lattice of rank two".into()));
        }
        let t = t.mod_floor(&m);
        Ok(Self::normalized(ctx, den, g, t, m))
    }

    fn normalized(ctx: &OrderContext, den: BigInt, n11: BigInt, n12: BigInt, n22: BigInt) -> Self {
        let c = den.gcd(&n11).gcd(&n12).gcd(&n22);
        Self {
            ctx: *ctx,
            den: den / &c,
            n11: n11 / &c,
            n12: n12 / &c,
            n22: n22 / &c,
        }
    }

    /// The order `O = [τ, 1]`.
    pub fn order(ctx: &OrderContext) -> Self {
        Self::normalized(ctx, bi(1), bi(1), bi(0), bi(1))
    }

    /// `[ω_Q, 1]`.
    pub fn from_form(ctx: &OrderContext, q: &Form) -> Self {
        // a·ω_Q = τ + (b_O - b)/2
        let shift = BigRat::new(bi(ctx.b_o - q.b), bi(2));
        let w = QuadElem::new(shift, br(1)).scale(&BigRat::new(bi(1), bi(q.a)));
        Self::from_generators(ctx, &[w, QuadElem::int(1, 0)]).expect("rank two")
    }

    /// `ν·O`.
    pub fn principal(ctx: &OrderContext, nu: &QuadElem) -> Result<Self> {
        if nu.is_zero() {
            return Err(Error::Domain("zero generator".into()));
        }
        Self::from_generators(ctx, &[nu.clone(), nu.mul(&QuadElem::tau(), ctx)])
    }

    /// Ordered basis `(α, β)` with `Im(α/β) > 0`.
    pub fn basis(&self) -> (QuadElem, QuadElem) {
        let d = BigRat::from_integer(self.den.clone());
        (
            QuadElem::new(BigRat::from_integer(self.n12.clone()) / &d, BigRat::from_integer(self.n11.clone()) / &d),
            QuadElem::new(BigRat::from_integer(self.n22.clone()) / &d, BigRat::zero()),
        )
    }

    pub fn contains(&self, z: &QuadElem) -> bool {
        // z = u·α + v·β
        let d = BigRat::from_integer(self.den.clone());
        let u = &z.y * &d / BigRat::from_integer(self.n11.clone());
        let v = (&z.x * &d - &u * BigRat::from_integer(self.n12.clone())) / BigRat::from_integer(self.n22.clone());
        u.is_integer() && v.is_integer()
    }

    pub fn is_o_module(&self) -> bool {
        let (a, b) = self.basis();
        let t = QuadElem::tau();
        self.contains(&a.mul(&t, &self.ctx)) && self.contains(&b.mul(&t, &self.ctx))
    }

    /// Covolume relative to `O`; equals `N_O(𝔞)` for proper ideals.
    pub fn covolume(&self) -> BigRat {
        BigRat::new(&self.n11 * &self.n22, &self.den * &self.den)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a1, b1) = self.basis();
        let (a2, b2) = o.basis();
        let c = &self.ctx;
        Self::from_generators(c, &[a1.mul(&a2, c), a1.mul(&b2, c), b1.mul(&a2, c), b1.mul(&b2, c)])
            .expect("product of lattices has rank two")
    }

    pub fn scale(&self, nu: &QuadElem) -> Self {
        let (a, b) = self.basis();
        let c = &self.ctx;
        Self::from_generators(c, &[a.mul(nu, c), b.mul(nu, c)]).expect("nonzero scale")
    }

    pub fn conj(&self) -> Self {
        let (a, b) = self.basis();
        let c = &self.ctx;
        Self::from_generators(c, &[a.conj(c), b.conj(c)]).expect("rank two")
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// `𝔞·𝔞̄ = N(𝔞)·O`, which characterises proper ideals.
    pub fn is_proper(&self) -> bool {
        if !self.is_o_module() {
            return false;
        }
        let n = self.covolume();
        self.mul(&self.conj()) == Self::order(&self.ctx).scale(&QuadElem::new(n, BigRat::zero()))
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_proper() {
            return Err(Error::Domain("lattice is not a proper ideal".into()));
        }
        let n = self.covolume();
        Ok(self.conj().scale(&QuadElem::new(n.recip(), BigRat::zero())))
    }

    /// The form `Q` with `[ω_Q, 1]` homothetic to this proper ideal.
    pub fn to_form(&self) -> Result<Form> {
        if &self.n12 % &self.n11 != BigInt::zero() || &self.n22 % &self.n11 != BigInt::zero() {
            return Err(Error::Domain("lattice is not an ideal in normal form".into()));
        }
        let a = (&self.n22 / &self.n11).to_i64().ok_or_else(|| Error::Domain("overflow".into()))?;
        let m = (&self.n12 / &self.n11).to_i64().ok_or_else(|| Error::Domain("overflow".into()))?;
        let b = self.ctx.b_o - 2 * m;
        Form::from_abd(a, b, self.ctx.disc).ok_or_else(|| Error::Domain("lattice is not proper".into()))
    }

    /// A shortest nonzero element and its norm, by Gauss reduction of the norm form.
    pub fn shortest(&self) -> (QuadElem, BigRat) {
        let c = &self.ctx;
        let (mut u, mut v) = self.basis();
        loop {
            let a = u.norm(c);
            let b = u.trace_form(&v, c);
            // translate v by the nearest integer to -b/2a
            let k = (-b / (br(2) * &a)).round();
            if !k.is_zero() {
                v = v.add(&u.scale(&k));
            }
            if v.norm(c) < u.norm(c) {
                std::mem::swap(&mut u, &mut v);
            } else {
                break;
            }
        }
        let n = u.norm(c);
        (u, n)
    }

    /// A generator when the ideal is principal.
    pub fn generator(&self) -> Result<Option<QuadElem>> {
        if !self.is_proper() {
            return Err(Error::Domain("lattice is not a proper ideal".into()));
        }
        let (g, n) = self.shortest();
        Ok((n == self.covolume()).then_some(g))
    }

    /// Numerator and denominator of the norm are both prime to `m`.
    pub fn prime_to(&self, m: i64) -> bool {
        let n = self.covolume();
        gcd(to_small(&n.numer().mod_floor(&bi(m))), m) == 1 && gcd(to_small(&n.denom().mod_floor(&bi(m))), m) == 1
    }

    pub fn to_complex_basis(&self, prec: usize) -> (BigComplex, BigComplex) {
        let (a, b) = self.basis();
        (a.to_complex(&self.ctx, prec), b.to_complex(&self.ctx, prec))
    }
}

fn to_small(n: &BigInt) -> i64 {
    n.to_i64().expect("residue fits in i64")
}

/// `N_O(𝔞)` for an O-ideal.
pub fn ideal_norm(a: &QuadLattice) -> Result<BigRat> {
    if !a.is_o_module() {
        return Err(Error::Domain("lattice is not an O-module".into()));
    }
    Ok(a.covolume())
}

pub fn ideal_mul(a: &QuadLattice, b: &QuadLattice) -> QuadLattice {
    a.mul(b)
}

/// Units of `O` as elements `x + yτ`.
pub fn units(ctx: &OrderContext) -> Vec<QuadElem> {
    match ctx.disc {
        -4 => vec![QuadElem::int(1, 0), QuadElem::int(-1, 0), QuadElem::int(0, 1), QuadElem::int(0, -1)],
        -3 => vec![
            QuadElem::int(1, 0),
            QuadElem::int(-1, 0),
            QuadElem::int(0, 1),
            QuadElem::int(0, -1),
            QuadElem::int(-1, -1),
            QuadElem::int(1, 1),
        ],
        _ => vec![QuadElem::int(1, 0), QuadElem::int(-1, 0)],
    }
}

/// `x ∈ N·ℤ₍N₎`: denominator prime to `N` and numerator divisible by `N`.
fn in_n_local(x: &BigRat, n: i64) -> bool {
    x.denom().gcd(&bi(n)).is_one() && (x.numer() % bi(n)).is_zero()
}

/// `ν ≡ 1` modulo `N·O` after clearing denominators prime to `N`.
pub fn congruent_to_one(nu: &QuadElem, n: i64) -> bool {
    let d = nu.sub(&QuadElem::int(1, 0));
    in_n_local(&d.x, n) && in_n_local(&d.y, n)
}

/// Whether `𝔟𝔞⁻¹ = νO` with `ν ≡ 1 mod NO` (up to a unit).
pub fn same_ray_class(a: &QuadLattice, b: &QuadLattice, n: i64) -> Result<bool> {
    if !a.prime_to(n) || !b.prime_to(n) {
        return Err(Error::Domain(format!("ideal not prime to {n}")));
    }
    let c = b.mul(&a.inverse()?);
    let Some(nu) = c.generator()? else {
        return Ok(false);
    };
    let ctx = a.ctx;
    Ok(units(&ctx).iter().any(|z| congruent_to_one(&z.mul(&nu, &ctx), n)))
}

/// All integral ideals `k·[a, τ + m]` of norm at most `bound`, filtered by
/// properness and by norm coprime to `coprime_to`.
pub fn integral_ideals(ctx: &OrderContext, bound: i64, coprime_to: i64) -> Vec<QuadLattice> {
    let mut out = Vec::new();
    let mut k = 1;
    while k * k <= bound {
        let mut a = 1;
        while k * k * a <= bound {
            if gcd(k * k * a, coprime_to) == 1 {
                for m in 0..a {
                    let nm = m * m - ctx.b_o * m + ctx.c_o;
                    if nm % a != 0 {
                        continue;
                    }
                    let b = ctx.b_o - 2 * m;
                    let c = nm / a;
                    if gcd(gcd(a, b), c) != 1 {
                        continue;
                    }
                    let l = QuadLattice::normalized(ctx, bi(1), bi(k), bi(k * m), bi(k * a));
                    out.push(l);
                }
            }
            a += 1;
        }
        k += 1;
    }
    out
}

/// The ray class group computed purely from ideals.
#[derive(Clone, Debug)]
pub struct IdealClassOracle {
    pub ctx: OrderContext,
    pub level: i64,
    pub reps: Vec<QuadLattice>,
    pub table: Vec<Vec<usize>>,
    pub norm_bound: i64,
}

#[derive(Serialize)]
struct OracleDump {
    disc: i64,
    level: i64,
    norm_bound: i64,
    reps: Vec<[String; 4]>,
    table: Vec<Vec<usize>>,
}

impl IdealClassOracle {
    pub fn order(&self) -> usize {
        self.reps.len()
    }

    /// Index of the class of a proper ideal prime to `N`.
    pub fn classify(&self, a: &QuadLattice) -> Result<Option<usize>> {
        for (i, r) in self.reps.iter().enumerate() {
            if same_ray_class(r, a, self.level)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let reps = self
            .reps
            .iter()
            .map(|r| [r.den.to_string(), r.n11.to_string(), r.n12.to_string(), r.n22.to_string()])
            .collect();
        serde_json::to_value(OracleDump {
            disc: self.ctx.disc,
            level: self.level,
            norm_bound: self.norm_bound,
            reps,
            table: self.table.clone(),
        })
        .expect("plain data serializes")
    }
}

/// Default starting bound for the oracle enumeration.
pub fn default_norm_bound(ctx: &OrderContext, n: i64) -> i64 {
    let a = 2.0 * ((-ctx.disc) as f64 / 3.0).sqrt();
    (a.ceil() as i64 * n * n).max(10 * n * n)
}

/// Enumerates integral ideals prime to `ℓN`, buckets them into ray classes and
/// doubles the norm bound until every class is found.
pub fn oracle_class_group(ctx: &OrderContext, n: i64, norm_bound: i64) -> Result<IdealClassOracle> {
    let expected = expected_order(ctx, n)? as usize;
    let modulus = ctx.conductor * n;
    let mut bound = norm_bound.max(1);
    for _ in 0..12 {
        let ideals = integral_ideals(ctx, bound, modulus);
        let mut reps: Vec<QuadLattice> = Vec::new();
        for id in ideals {
            let mut found = false;
            for r in &reps {
                if same_ray_class(r, &id, n)? {
                    found = true;
                    break;
                }
            }
            if !found {
                reps.push(id);
            }
            if reps.len() > expected {
                return Err(Error::Invariant(format!(
                    "oracle found more than {expected} classes for D = {}, N = {n}",
                    ctx.disc
                )));
            }
        }
        if reps.len() == expected {
            let mut oracle = IdealClassOracle {
                ctx: *ctx,
                level: n,
                reps,
                table: vec![],
                norm_bound: bound,
            };
            let m = oracle.order();
            let rows: Vec<Result<Vec<usize>>> = (0..m)
                .into_par_iter()
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            let p = oracle.reps[i].mul(&oracle.reps[j]);
                            oracle.classify(&p)?.ok_or_else(|| {
                                Error::Invariant(format!("product of oracle classes {i}, {j} is unclassified"))
                            })
                        })
                        .collect()
                })
                .collect();
            oracle.table = rows.into_iter().collect::<Result<_>>()?;
            return Ok(oracle);
        }
        bound *= 2;
    }
    Err(Error::Resource(format!(
        "oracle for D = {}, N = {n} did not reach {expected} classes by norm bound {bound}",
        ctx.disc
    )))
}

/// Maps each form class `[Q]` to the oracle class of `[ω_Q, 1]` and checks
/// that the map is a bijective homomorphism.
pub fn form_ideal_dictionary(g: &ClassGroup, oracle: &IdealClassOracle) -> Result<Vec<usize>> {
    if g.order() != oracle.order() {
        return Err(Error::Invariant(format!(
            "form side has {} classes, ideal side {}",
            g.order(),
            oracle.order()
        )));
    }
    let map: Vec<usize> = g
        .reps
        .iter()
        .map(|q| {
            let l = QuadLattice::from_form(&oracle.ctx, q);
            oracle
                .classify(&l)?
                .ok_or_else(|| Error::Invariant(format!("[ω_Q, 1] for {q} is unclassified")))
        })
        .collect::<Result<_>>()?;
    let mut seen = vec![false; map.len()];
    for &m in &map {
        if std::mem::replace(&mut seen[m], true) {
            return Err(Error::Invariant("dictionary is not injective".into()));
        }
    }
    for i in 0..map.len() {
        for j in 0..map.len() {
            if map[g.table[i][j]] != oracle.table[map[i]][map[j]] {
                return Err(Error::Invariant(format!("dictionary breaks the product of classes {i}, {j}")));
            }
        }
    }
    Ok(map)
}
