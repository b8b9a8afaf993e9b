//! Positive definite binary quadratic forms, Dirichlet composition and the
//! level-N form class group under Γ₁(N).

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, BigRat};

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Inverse of `a` modulo `m` in `[0, m)`, if it exists.
pub fn mod_inv(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

pub fn is_discriminant(d: i64) -> bool {
    d < 0 && (d.rem_euclid(4) == 0 || d.rem_euclid(4) == 1)
}

/// 2×2 integer matrix `[p q; r s]`; an element of SL₂(ℤ) when `ps - qr = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UnimodularMatrix {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl UnimodularMatrix {
    pub const IDENTITY: Self = Self::new(1, 0, 0, 1);
    pub const S: Self = Self::new(0, -1, 1, 0);
    pub const T: Self = Self::new(1, 1, 0, 1);

    pub const fn new(p: i64, q: i64, r: i64, s: i64) -> Self {
        Self { p, q, r, s }
    }

    pub fn det(&self) -> i64 {
        self.p * self.s - self.q * self.r
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.p * o.p + self.q * o.r,
            self.p * o.q + self.q * o.s,
            self.r * o.p + self.s * o.r,
            self.r * o.q + self.s * o.s,
        )
    }

    /// Inverse, valid for determinant one.
    pub fn inverse(&self) -> Self {
        Self::new(self.s, -self.q, -self.r, self.p)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.p, -self.q, -self.r, -self.s)
    }

    pub fn translation(k: i64) -> Self {
        Self::new(1, k, 0, 1)
    }

    /// Membership in Γ₁(N): `≡ [1 *; 0 1] (mod N)`.
    pub fn in_gamma1(&self, n: i64) -> bool {
        (self.p - 1).rem_euclid(n) == 0 && self.r.rem_euclid(n) == 0 && (self.s - 1).rem_euclid(n) == 0
    }

    /// Completes a primitive first column `(p, r)` to a matrix of determinant
    /// one, choosing the completion with the smallest `|s|` (or `|q|` when `r = 0`).
    pub fn complete_column(p: i64, r: i64) -> Option<Self> {
        let (g, x, y) = ext_gcd(p, r);
        if g != 1 {
            return None;
        }
        // p*s - q*r = 1 with s = x + k r, q = -(y - k p)
        let (s, q) = if r != 0 {
            let k = nearest_div(-x, r);
            (x + k * r, -(y - k * p))
        } else {
            let k = nearest_div(y, p);
            (x + k * r, -(y - k * p))
        };
        Some(Self::new(p, q, r, s))
    }

    /// Completes a primitive bottom row `(r, s)` to a matrix of determinant one.
    pub fn complete_row(r: i64, s: i64) -> Option<Self> {
        let (g, x, y) = ext_gcd(s, r);
        if g != 1 {
            return None;
        }
        // p*s - q*r = 1 with p = x, q = -y
        Some(Self::new(x, -y, r, s))
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}; {} {}]", self.p, self.q, self.r, self.s)
    }
}

/// Integer nearest to `a / b`.
fn nearest_div(a: i64, b: i64) -> i64 {
    let b2 = b.abs();
    let a2 = if b < 0 { -a } else { a };
    (2 * a2 + b2).div_euclid(2 * b2)
}

/// `ax² + bxy + cy²`, primitive and positive definite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = Self { a, b, c };
        if a <= 0 {
            return Err(Error::Domain(format!("{f}: leading coefficient must be positive")));
        }
        let d = f.disc_wide();
        if d >= 0 || d < i128::from(i64::MIN) {
            return Err(Error::Domain(format!("{f}: not positive definite")));
        }
        if a.gcd(&b).gcd(&c) != 1 {
            return Err(Error::Domain(format!("{f}: not primitive")));
        }
        Ok(f)
    }

    /// Builds `(a, b, (b² - d)/4a)`; `None` if that is not integral.
    pub fn from_abd(a: i64, b: i64, d: i64) -> Option<Self> {
        let num = i128::from(b) * i128::from(b) - i128::from(d);
        let den = 4 * i128::from(a);
        if a <= 0 || num % den != 0 {
            return None;
        }
        Self::new(a, b, i64::try_from(num / den).ok()?).ok()
    }

    /// The form `x² + b_O xy + c_O y²`.
    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        Self {
            a: 1,
            b,
            c: (b * b - d) / 4,
        }
    }

    pub fn disc(&self) -> i64 {
        i64::try_from(self.disc_wide()).expect("discriminant fits in i64")
    }

    fn disc_wide(&self) -> i128 {
        let (a, b, c) = (i128::from(self.a), i128::from(self.b), i128::from(self.c));
        b * b - 4 * a * c
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// `Q^γ(x, y) = Q(γ (x, y)ᵀ)`.
    pub fn act(&self, g: &UnimodularMatrix) -> Self {
        self.try_act(g).unwrap_or_else(|| panic!("{self} acted on by {g} overflows i64"))
    }

    /// [`Form::act`] that reports coefficient overflow instead of panicking.
    pub fn try_act(&self, g: &UnimodularMatrix) -> Option<Self> {
        let w = |v: i64| i128::from(v);
        let (a, b, c) = (w(self.a), w(self.b), w(self.c));
        let (p, q, r, s) = (w(g.p), w(g.q), w(g.r), w(g.s));
        let ev = |x: i128, y: i128| -> Option<i128> {
            a.checked_mul(x)?
                .checked_mul(x)?
                .checked_add(b.checked_mul(x)?.checked_mul(y)?)?
                .checked_add(c.checked_mul(y)?.checked_mul(y)?)
        };
        let mid = (2 * a)
            .checked_mul(p)?
            .checked_mul(q)?
            .checked_add(b.checked_mul(p * s + q * r)?)?
            .checked_add((2 * c).checked_mul(r)?.checked_mul(s)?)?;
        Some(Self {
            a: i64::try_from(ev(p, r)?).ok()?,
            b: i64::try_from(mid).ok()?,
            c: i64::try_from(ev(q, s)?).ok()?,
        })
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// `ω_Q = (-b + √D) / 2a` in the upper half plane.
    pub fn omega(&self, prec: usize) -> BigComplex {
        let sq = sqrt_disc(self.disc(), prec);
        sq.sub(&BigComplex::from_i64(self.b, prec)).div_i64(2 * self.a)
    }

    /// Coordinates of `ω_Q` as `x + y·√D` with rational `x, y`.
    pub fn omega_sqrt_coords(&self) -> (BigRat, BigRat) {
        (
            BigRat::new(BigInt::from(-self.b), BigInt::from(2 * self.a)),
            BigRat::new(BigInt::one(), BigInt::from(2 * self.a)),
        )
    }

    /// The opposite form `(a, -b, c)`, inverse in the classical group.
    pub fn opposite(&self) -> Self {
        Self {
            a: self.a,
            b: -self.b,
            c: self.c,
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// `i·√|D|`, the square root of a negative discriminant in the upper half plane.
pub fn sqrt_disc(d: i64, prec: usize) -> BigComplex {
    BigComplex::from_i64(-d, prec).sqrt().mul_i()
}

/// The order of discriminant `D` together with its minimal-polynomial data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrderContext {
    pub disc: i64,
    pub conductor: i64,
    pub b_o: i64,
    pub c_o: i64,
}

impl OrderContext {
    pub fn new(disc: i64) -> Result<Self> {
        if !is_discriminant(disc) {
            return Err(Error::Domain(format!("{disc} is not a negative discriminant")));
        }
        let b_o = disc.rem_euclid(2);
        let c_o = (b_o * b_o - disc) / 4;
        let mut conductor = 1;
        let mut l = 2;
        while l * l <= -disc {
            if disc % (l * l) == 0 && is_discriminant(disc / (l * l)) {
                conductor = l;
            }
            l += 1;
        }
        Ok(Self {
            disc,
            conductor,
            b_o,
            c_o,
        })
    }

    pub fn fundamental_disc(&self) -> i64 {
        self.disc / (self.conductor * self.conductor)
    }

    /// `τ_O`: `√D/2` or `(-1 + √D)/2`.
    pub fn tau(&self, prec: usize) -> BigComplex {
        sqrt_disc(self.disc, prec)
            .sub(&BigComplex::from_i64(self.b_o, prec))
            .div_i64(2)
    }

    pub fn principal_form(&self) -> Form {
        Form::principal(self.disc)
    }

    /// True when the unit group is larger than `{±1}`.
    pub fn has_extra_units(&self) -> bool {
        self.disc == -3 || self.disc == -4
    }
}

/// Gauss reduction; returns the reduced form `R` and `γ` with `Q^γ = R`.
pub fn reduce(q: &Form) -> (Form, UnimodularMatrix) {
    let mut f = *q;
    let mut g = UnimodularMatrix::IDENTITY;
    loop {
        let k = (f.a - f.b).div_euclid(2 * f.a);
        if k != 0 {
            let t = UnimodularMatrix::translation(k);
            f = f.act(&t);
            g = g.mul(&t);
        }
        if f.a > f.c || (f.a == f.c && f.b < 0) {
            f = f.act(&UnimodularMatrix::S);
            g = g.mul(&UnimodularMatrix::S);
        } else {
            break;
        }
    }
    debug_assert!(f.is_reduced());
    (f, g)
}

/// All reduced forms of discriminant `D`, sorted by `(a, b, c)`.
pub fn enumerate_reduced(d: i64) -> Result<Vec<Form>> {
    if !is_discriminant(d) {
        return Err(Error::Domain(format!("{d} is not a negative discriminant")));
    }
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a..=a {
            if let Some(f) = Form::from_abd(a, b, d) {
                if f.is_reduced() {
                    out.push(f);
                }
            }
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

/// The automorphism group of a reduced form: matrices with `R^α = R`.
pub fn automorphisms(r: &Form) -> Vec<UnimodularMatrix> {
    if r.disc() < -4 {
        return vec![UnimodularMatrix::IDENTITY, UnimodularMatrix::IDENTITY.neg()];
    }
    let mut out = Vec::new();
    for p in -2..=2 {
        for q in -2..=2 {
            for rr in -2..=2 {
                for s in -2..=2 {
                    let m = UnimodularMatrix::new(p, q, rr, s);
                    if m.det() == 1 && r.act(&m) == *r {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Dirichlet composition with the middle coefficient reduced into `[0, 2aa″)`.
pub fn dirichlet_compose(q1: &Form, q2: &Form) -> Result<Form> {
    let d = q1.disc();
    if q2.disc() != d {
        return Err(Error::Domain(format!("{q1} and {q2} have different discriminants")));
    }
    let h = (q1.b + q2.b) / 2;
    let (g1, x1, y1) = ext_gcd(q1.a, q2.a);
    let (g, x2, r) = ext_gcd(g1, h);
    if g != 1 {
        return Err(Error::Composition(format!(
            "gcd(a, a'', (b+b'')/2) = {g} for {q1} and {q2}"
        )));
    }
    let (p, q) = (x2 * x1, x2 * y1);
    let big = |v: i64| i128::from(v);
    let aa = i64::try_from(big(q1.a) * big(q2.a))
        .map_err(|_| Error::Invariant(format!("composite of {q1} and {q2} overflows")))?;
    let m = 2 * big(aa);
    let bb = big(p) * big(q1.a) * big(q2.b)
        + big(q) * big(q2.a) * big(q1.b)
        + big(r) * ((big(q1.b) * big(q2.b) + big(d)) / 2);
    let bb = bb.rem_euclid(m) as i64;
    Form::from_abd(aa, bb, d)
        .ok_or_else(|| Error::Invariant(format!("composite middle coefficient {bb} is inconsistent")))
}

/// Primitive `(p, r)` up to sign, in order of increasing max-norm.
fn primitive_vectors() -> impl Iterator<Item = (i64, i64)> {
    (1i64..).flat_map(|k| {
        let mut shell: Vec<(i64, i64)> = (-k..=k)
            .flat_map(|p| (-k..=k).map(move |r| (p, r)))
            .filter(|&(p, r)| p.abs().max(r.abs()) == k)
            .filter(|&(p, r)| p > 0 || (p == 0 && r > 0))
            .filter(|&(p, r)| gcd(p, r) == 1)
            .collect();
        shell.sort_by_key(|&(p, r)| (p.abs() + r.abs(), r < 0, r.abs(), p));
        shell
    })
}

/// The `k`-th (from zero) matrix `γ` for which the leading coefficient of
/// `Q^γ` is coprime to `m`.
pub fn make_coprime_nth(q: &Form, m: i64, k: usize) -> (UnimodularMatrix, Form) {
    let mut seen = 0;
    if gcd(q.a, m) == 1 {
        if k == 0 {
            return (UnimodularMatrix::IDENTITY, *q);
        }
        seen = 1;
    }
    for (p, r) in primitive_vectors() {
        if (p, r) == (1, 0) {
            continue;
        }
        if gcd(q.eval(p, r), m) == 1 {
            if seen == k {
                let g = UnimodularMatrix::complete_column(p, r).expect("primitive column");
                return (g, q.act(&g));
            }
            seen += 1;
        }
    }
    unreachable!("primitive forms represent integers coprime to any modulus")
}

/// `γ ∈ SL₂(ℤ)` with the leading coefficient of `Q^γ` coprime to `m`.
pub fn make_coprime(q: &Form, m: i64) -> (UnimodularMatrix, Form) {
    make_coprime_nth(q, m, 0)
}

/// Finds `γ ∈ Γ₁(N)` with `Q^γ = Q′`.
pub fn gamma1_equivalent(q: &Form, q2: &Form, n: i64) -> Result<Option<UnimodularMatrix>> {
    if q.disc() != q2.disc() {
        return Err(Error::Domain(format!("{q} and {q2} have different discriminants")));
    }
    let (r1, g1) = reduce(q);
    let (r2, g2) = reduce(q2);
    if r1 != r2 {
        return Ok(None);
    }
    let g2i = g2.inverse();
    Ok(automorphisms(&r1)
        .iter()
        .map(|alpha| g1.mul(alpha).mul(&g2i))
        .find(|g| g.in_gamma1(n)))
}

/// A hashable invariant of the Γ₁(N)-class: the reduced form together with
/// the Aut-orbit minimum of the first column of the matrix carrying it to `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassKey {
    pub reduced: Form,
    pub column: (i64, i64),
}

pub fn class_key(q: &Form, n: i64) -> ClassKey {
    let (r, g) = reduce(q);
    // Q = R^{g⁻¹}; the class is the Aut(R)-orbit of the coset g⁻¹Γ₁(N).
    let h = g.inverse();
    let column = automorphisms(&r)
        .iter()
        .map(|alpha| {
            let m = alpha.mul(&h);
            (m.p.rem_euclid(n), m.r.rem_euclid(n))
        })
        .min()
        .unwrap();
    ClassKey { reduced: r, column }
}

/// A small representative of the Γ₁(N)-class of `Q`, minimising `(a, |b|, sign b)`.
pub fn canonical_form(q: &Form, n: i64) -> Form {
    if n == 1 {
        return reduce(q).0;
    }
    let key = class_key(q, n);
    let r = key.reduced;
    let (c0, c1) = key.column;
    let orbit: Vec<(i64, i64)> = automorphisms(&r)
        .iter()
        .map(|al| ((al.p * c0 + al.q * c1).rem_euclid(n), (al.r * c0 + al.s * c1).rem_euclid(n)))
        .collect();
    let bound = 2 * n + 2;
    let mut best: Option<(i64, i64, i64, Form)> = None;
    for p in -bound..=bound {
        for rr in -bound..=bound {
            if !orbit.contains(&(p.rem_euclid(n), rr.rem_euclid(n))) || gcd(p, rr) != 1 {
                continue;
            }
            let a = r.eval(p, rr);
            if best.as_ref().is_some_and(|b| a > b.0) {
                continue;
            }
            let h = UnimodularMatrix::complete_column(p, rr).expect("primitive column");
            let f = r.act(&h);
            let f = f.act(&UnimodularMatrix::translation((f.a - f.b).div_euclid(2 * f.a)));
            let mut cands = vec![f];
            if f.b == f.a {
                cands.push(f.act(&UnimodularMatrix::translation(-1)));
            }
            for c in cands {
                let t = (c.a, c.b.abs(), c.b.signum(), c);
                if best.as_ref().is_none_or(|b| (t.0, t.1, t.2) < (b.0, b.1, b.2)) {
                    best = Some(t);
                }
            }
        }
    }
    let out = best.map(|b| b.3).expect("every class has a representative in the scan box");
    debug_assert_eq!(class_key(&out, n), key);
    out
}

/// Free choices inside [`compose_level_with`]; every choice yields the same class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LiftChoice {
    /// Which coprime representative of the second form to use.
    pub coprime_index: usize,
    /// Shift of the Dirichlet middle coefficient by multiples of `2aa″`.
    pub b_shift: i64,
    /// Shift of the bottom row of the SL₂ lift by multiples of `N`.
    pub row_shift: (i64, i64),
    /// Left multiplication of the lift by a power of `T`.
    pub top_shift: i64,
}

/// The level-N product of the classes of `Q` and `Q′`.
pub fn compose_level(q: &Form, q2: &Form, ctx: &OrderContext, n: i64) -> Result<Form> {
    compose_level_with(q, q2, ctx, n, LiftChoice::default())
}

pub fn compose_level_with(
    q: &Form,
    q2: &Form,
    ctx: &OrderContext,
    n: i64,
    choice: LiftChoice,
) -> Result<Form> {
    let d = ctx.disc;
    if q.disc() != d || q2.disc() != d {
        return Err(Error::Domain(format!("{q} or {q2} does not have discriminant {d}")));
    }
    if gcd(q.a, n) != 1 || gcd(q2.a, n) != 1 {
        return Err(Error::Domain(format!("{q} or {q2} has leading coefficient not prime to {n}")));
    }
    // (1) make the second form's leading coefficient coprime to a and N
    let (gamma, q3) = make_coprime_nth(q2, q.a * n, choice.coprime_index);
    // (2) Dirichlet composite
    let mut qc = dirichlet_compose(q, &q3)?;
    if choice.b_shift != 0 {
        qc = qc.act(&UnimodularMatrix::translation(choice.b_shift));
    }
    // (3)-(4) solve u·ω_c + v = j(γ, ω₃) = r·ω₃ + s exactly in the basis {√D, 1}
    let (wc0, wc1) = qc.omega_sqrt_coords();
    let (w30, w31) = q3.omega_sqrt_coords();
    let r = BigRat::from_integer(BigInt::from(gamma.r));
    let s = BigRat::from_integer(BigInt::from(gamma.s));
    let j0 = &r * &w30 + &s;
    let j1 = &r * &w31;
    let u = &j1 / &wc1;
    let v = &j0 - &u * &wc0;
    if !u.is_integer() || !v.is_integer() {
        return Err(Error::Invariant(format!(
            "non-integral coordinates ({u}, {v}) while composing {q} and {q2}"
        )));
    }
    let u = i64::try_from(u.to_integer()).map_err(|_| Error::Invariant("overflow".into()))?;
    let v = i64::try_from(v.to_integer()).map_err(|_| Error::Invariant("overflow".into()))?;
    if gcd(gcd(u, v), n) != 1 {
        return Err(Error::Invariant(format!("gcd(u, v, N) != 1 for ({u}, {v}), N = {n}")));
    }
    // (5) SL₂ lift with bottom row ≡ (u, v) mod N
    let sigma = lift_bottom_row(u + choice.row_shift.0 * n, v + choice.row_shift.1 * n, n)?;
    let sigma = UnimodularMatrix::translation(choice.top_shift).mul(&sigma);
    // (6)
    qc.try_act(&sigma.inverse())
        .ok_or_else(|| Error::Invariant(format!("composite of {q} and {q2} overflows i64")))
}

/// An element of SL₂(ℤ) whose bottom row is congruent to `(u, v)` mod `N`.
pub fn lift_bottom_row(u: i64, v: i64, n: i64) -> Result<UnimodularMatrix> {
    if gcd(gcd(u, v), n) != 1 {
        return Err(Error::Invariant(format!("({u}, {v}) is not primitive mod {n}")));
    }
    let u1 = if u == 0 { n } else { u };
    let mut t = 0i64;
    loop {
        for cand in [v + t * n, v - t * n] {
            if gcd(u1, cand) == 1 {
                return Ok(UnimodularMatrix::complete_row(u1, cand).expect("coprime row"));
            }
        }
        t += 1;
        if t > 10_000 {
            return Err(Error::Invariant(format!("no coprime lift of ({u}, {v}) mod {n}")));
        }
    }
}

/// Number of units of `(O/NO)` and the image size of `O*` there.
pub fn residue_unit_counts(ctx: &OrderContext, n: i64) -> (u64, u64) {
    if n == 1 {
        return (1, 1);
    }
    let mut units = 0u64;
    for s in 0..n {
        for t in 0..n {
            let nm = t * t - ctx.b_o * s * t + ctx.c_o * s * s;
            if gcd(nm.rem_euclid(n), n) == 1 {
                units += 1;
            }
        }
    }
    let image = unit_residues(ctx, n).len() as u64;
    (units, image)
}

/// Distinct residues of the units of `O` modulo `NO`, as `(s, t)` for `sτ + t`.
pub fn unit_residues(ctx: &OrderContext, n: i64) -> Vec<(i64, i64)> {
    let units: Vec<(i64, i64)> = match ctx.disc {
        -4 => vec![(0, 1), (0, -1), (1, 0), (-1, 0)],
        // τ = (-1 + √-3)/2 satisfies τ² + τ + 1 = 0; units ±1, ±τ, ±τ²
        -3 => vec![(0, 1), (0, -1), (1, 0), (-1, 0), (-1, -1), (1, 1)],
        _ => vec![(0, 1), (0, -1)],
    };
    let mut out: Vec<(i64, i64)> = units
        .into_iter()
        .map(|(s, t)| (s.rem_euclid(n), t.rem_euclid(n)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// `h · |(O/NO)*| / |image of O*|`, the order of the level-N class group.
pub fn expected_order(ctx: &OrderContext, n: i64) -> Result<u64> {
    let h = enumerate_reduced(ctx.disc)?.len() as u64;
    let (units, image) = residue_unit_counts(ctx, n);
    Ok(h * units / image)
}

/// Forms representing the principal classes `νO` for `ν` prime to `N`.
pub fn kernel_seeds(ctx: &OrderContext, n: i64) -> Result<Vec<Form>> {
    let q0 = ctx.principal_form();
    let mut out = Vec::new();
    for s in 0..n {
        for t in 0..n {
            let nm = t * t - ctx.b_o * s * t + ctx.c_o * s * s;
            if gcd(nm.rem_euclid(n), n) != 1 {
                continue;
            }
            let sigma = lift_bottom_row(s, t, n)?;
            out.push(q0.act(&sigma.inverse()));
        }
    }
    Ok(out)
}

/// The level-N class group with its structure.
#[derive(Clone, Debug, Serialize)]
pub struct ClassGroup {
    pub disc: i64,
    pub level: i64,
    pub reps: Vec<Form>,
    pub identity: usize,
    pub table: Vec<Vec<usize>>,
    pub invariant_factors: Vec<u64>,
    /// Element indices forming a basis matching `invariant_factors`.
    pub basis: Vec<usize>,
    /// Coordinates of each element in that basis.
    pub coords: Vec<Vec<u64>>,
    /// Exponent vectors of all characters.
    pub characters: Vec<Vec<u64>>,
    #[serde(skip)]
    keys: Vec<ClassKey>,
}

impl ClassGroup {
    pub fn order(&self) -> usize {
        self.reps.len()
    }

    /// Index of the class containing `Q`.
    pub fn index_of(&self, q: &Form) -> Option<usize> {
        let k = class_key(q, self.level);
        self.keys.iter().position(|x| *x == k)
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        (0..self.order()).find(|&j| self.table[i][j] == self.identity).unwrap()
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut x = i;
        let mut k = 1;
        while x != self.identity {
            x = self.table[x][i];
            k += 1;
        }
        k
    }

    /// `χ_e(C) = exp(2πi · num/den)`; returns `(num, den)` with `den` the group exponent.
    pub fn character_exponent(&self, chi: &[u64], elem: usize) -> (u64, u64) {
        let den = self.invariant_factors.iter().copied().fold(1, lcm_u64);
        let mut num = 0u64;
        for (k, d) in self.invariant_factors.iter().enumerate() {
            num += chi[k] * self.coords[elem][k] * (den / d);
        }
        (num % den, den)
    }

    /// Index of the character `χ̄`.
    pub fn conjugate_character(&self, i: usize) -> usize {
        let target: Vec<u64> = self.characters[i]
            .iter()
            .zip(&self.invariant_factors)
            .map(|(e, d)| (d - e) % d)
            .collect();
        self.characters.iter().position(|c| *c == target).unwrap()
    }

    /// The table laid out as rows `g_i: g_{i·1} g_{i·2} …` with 1-based labels.
    pub fn format_table(&self) -> String {
        let mut s = String::new();
        for (i, row) in self.table.iter().enumerate() {
            s.push_str(&format!("g{}:", i + 1));
            for j in row {
                s.push_str(&format!(" g{}", j + 1));
            }
            s.push('\n');
        }
        s
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

/// Builds the level-N class group by closing seed classes under composition.
pub fn class_enumerate(ctx: &OrderContext, n: i64) -> Result<ClassGroup> {
    if n < 1 {
        return Err(Error::Domain(format!("level {n} must be positive")));
    }
    let expected = expected_order(ctx, n)? as usize;
    let q0 = ctx.principal_form();
    let mut seeds = vec![q0];
    for r in enumerate_reduced(ctx.disc)? {
        seeds.push(make_coprime(&r, n).1);
    }
    seeds.extend(kernel_seeds(ctx, n)?);

    let mut index: HashMap<ClassKey, usize> = HashMap::new();
    let mut reps: Vec<Form> = Vec::new();
    let mut keys: Vec<ClassKey> = Vec::new();
    let mut queue = VecDeque::new();
    let mut add = |f: Form, reps: &mut Vec<Form>, keys: &mut Vec<ClassKey>, queue: &mut VecDeque<usize>| -> Result<()> {
        let f = canonical_form(&f, n);
        let k = class_key(&f, n);
        if let std::collections::hash_map::Entry::Vacant(e) = index.entry(k) {
            e.insert(reps.len());
            queue.push_back(reps.len());
            reps.push(f);
            keys.push(k);
            if reps.len() > expected {
                return Err(Error::Invariant(format!(
                    "closure exceeded the expected order {expected} for D = {}, N = {n}",
                    ctx.disc
                )));
            }
        }
        Ok(())
    };
    for f in seeds {
        add(f, &mut reps, &mut keys, &mut queue)?;
    }
    while let Some(i) = queue.pop_front() {
        let mut j = 0;
        while j <= i.max(reps.len() - 1) && j < reps.len() {
            let prod = compose_level(&reps[i], &reps[j], ctx, n)?;
            add(prod, &mut reps, &mut keys, &mut queue)?;
            j += 1;
        }
    }
    if reps.len() != expected {
        return Err(Error::Invariant(format!(
            "closure found {} classes, expected {expected}",
            reps.len()
        )));
    }

    // canonical labels, identity first, then by (a, |b|, sign b)
    let mut order: Vec<(Form, ClassKey)> = reps
        .iter()
        .zip(&keys)
        .map(|(f, k)| (*f, *k))
        .collect();
    let id_key = class_key(&q0, n);
    order.sort_by_key(|(f, k)| (*k != id_key, f.a, f.b.abs(), f.b.signum(), f.c));
    let reps: Vec<Form> = order.iter().map(|x| x.0).collect();
    let keys: Vec<ClassKey> = order.iter().map(|x| x.1).collect();
    let pos: HashMap<ClassKey, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();

    let m = reps.len();
    let mut table = vec![vec![0usize; m]; m];
    for i in 0..m {
        for j in i..m {
            let prod = compose_level(&reps[i], &reps[j], ctx, n)?;
            let k = *pos.get(&class_key(&prod, n)).ok_or_else(|| {
                Error::Invariant(format!("product {prod} of classes {i}, {j} is not in the group"))
            })?;
            table[i][j] = k;
            table[j][i] = k;
        }
    }
    let mut g = ClassGroup {
        disc: ctx.disc,
        level: n,
        reps,
        identity: 0,
        table,
        invariant_factors: vec![],
        basis: vec![],
        coords: vec![],
        characters: vec![],
        keys,
    };
    group_structure(&mut g)?;
    Ok(g)
}

/// Checks the group axioms on a multiplication table.
pub fn validate_table(table: &[Vec<usize>], identity: usize) -> Result<()> {
    let m = table.len();
    let bad = |msg: String| Err(Error::Invariant(msg));
    for (i, row) in table.iter().enumerate() {
        if row.len() != m {
            return bad(format!("row {i} has length {}", row.len()));
        }
        let mut seen = vec![false; m];
        for &x in row {
            if x >= m || seen[x] {
                return bad(format!("row {i} is not a permutation"));
            }
            seen[x] = true;
        }
        if row[identity] != i {
            return bad(format!("identity fails on {i}"));
        }
    }
    for i in 0..m {
        for j in 0..m {
            if table[i][j] != table[j][i] {
                return bad(format!("table is not commutative at ({i}, {j})"));
            }
        }
    }
    if m <= 64 {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if table[table[i][j]][k] != table[i][table[j][k]] {
                        return bad(format!("associativity fails at ({i}, {j}, {k})"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Computes invariant factors, a basis, element coordinates and characters.
pub fn group_structure(g: &mut ClassGroup) -> Result<()> {
    validate_table(&g.table, g.identity)?;
    let m = g.table.len();
    let e = g.identity;
    let pow = |x: usize, k: usize| -> usize {
        let mut y = e;
        for _ in 0..k {
            y = g.table[y][x];
        }
        y
    };

    // polycyclic presentation from greedily chosen generators
    let mut gens: Vec<usize> = Vec::new();
    let mut rel_orders: Vec<usize> = Vec::new();
    let mut rels: Vec<Vec<i64>> = Vec::new();
    // element -> exponent vector in the generators chosen so far
    let mut coord: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    coord.insert(e, vec![]);
    let mut by_order: Vec<usize> = (0..m).collect();
    by_order.sort_by_key(|&x| std::cmp::Reverse(g.element_order(x)));
    for &x in &by_order {
        if coord.contains_key(&x) {
            continue;
        }
        let k = gens.len();
        let mut t = 1;
        let mut y = x;
        while !coord.contains_key(&y) {
            y = g.table[y][x];
            t += 1;
        }
        // x^t = y lies in the previous subgroup
        let mut row = vec![0i64; k + 1];
        for (j, c) in coord[&y].iter().enumerate() {
            row[j] = -(*c as i64);
        }
        row[k] = t as i64;
        let old: Vec<(usize, Vec<usize>)> = coord.iter().map(|(a, b)| (*a, b.clone())).collect();
        for (h, mut c) in old.iter().cloned() {
            c.push(0);
            coord.insert(h, c);
        }
        for i in 1..t {
            let xi = pow(x, i);
            for (h, c) in &old {
                let z = g.table[*h][xi];
                let mut cc = c.clone();
                cc.push(i);
                coord.insert(z, cc);
            }
        }
        gens.push(x);
        rel_orders.push(t);
        rels.push(row);
    }
    let k = gens.len();
    for r in rels.iter_mut() {
        r.resize(k, 0);
    }
    let (diag, v, vinv) = smith_normal_form(rels, k);
    debug_assert_eq!(diag.iter().product::<i64>() as usize, m.max(1));

    // new coordinates y = x·V (mod d_i); basis elements h_i = Π g_j^{Vinv[i][j]}
    let keep: Vec<usize> = (0..k).filter(|&i| diag[i] > 1).collect();
    let factors: Vec<u64> = keep.iter().map(|&i| diag[i] as u64).collect();
    let mut coords = vec![vec![0u64; keep.len()]; m];
    for (elem, x) in &coord {
        for (out_i, &i) in keep.iter().enumerate() {
            let mut y = 0i64;
            for j in 0..k {
                y += x[j] as i64 * v[j][i];
            }
            coords[*elem][out_i] = y.rem_euclid(diag[i]) as u64;
        }
    }
    let mut basis = Vec::new();
    for &i in &keep {
        let mut h = e;
        for j in 0..k {
            let ord = g.element_order(gens[j]) as i64;
            h = g.table[h][pow(gens[j], vinv[i][j].rem_euclid(ord) as usize)];
        }
        basis.push(h);
    }
    // characters: all exponent vectors in lexicographic order
    let mut characters = vec![vec![]];
    for &d in &factors {
        let mut next = Vec::new();
        for c in &characters {
            for t in 0..d {
                let mut c2: Vec<u64> = c.clone();
                c2.push(t);
                next.push(c2);
            }
        }
        characters = next;
    }
    g.invariant_factors = factors;
    g.basis = basis;
    g.coords = coords;
    g.characters = characters;

    // sanity: coordinates form an isomorphism
    for a in 0..m {
        for b in 0..m {
            let c = g.table[a][b];
            for (t, d) in g.invariant_factors.iter().enumerate() {
                if (g.coords[a][t] + g.coords[b][t]) % d != g.coords[c][t] {
                    return Err(Error::Invariant("structure map is not a homomorphism".into()));
                }
            }
        }
    }
    Ok(())
}

/// Smith normal form of a square integer matrix given by rows. Returns the
/// diagonal `d₁ | d₂ | …` and the column transform `V` with its inverse.
fn smith_normal_form(mut a: Vec<Vec<i64>>, k: usize) -> (Vec<i64>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut v: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect();
    let mut vinv = v.clone();
    // column op: col_j += c·col_i  (V ← V·E, V⁻¹ ← E⁻¹·V⁻¹: row_i -= c·row_j)
    let col_add = |a: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, vinv: &mut Vec<Vec<i64>>, i: usize, j: usize, c: i64| {
        for row in a.iter_mut() {
            row[j] += c * row[i];
        }
        for row in v.iter_mut() {
            row[j] += c * row[i];
        }
        for t in 0..k {
            vinv[i][t] -= c * vinv[j][t];
        }
    };
    let col_swap = |a: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, vinv: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        vinv.swap(i, j);
    };
    for t in 0..k {
        loop {
            // pivot: smallest nonzero entry in the remaining block
            let mut piv = None;
            for i in t..k {
                for j in t..k {
                    if a[i][j] != 0 && piv.is_none_or(|(pi, pj): (usize, usize)| a[i][j].abs() < a[pi][pj].abs()) {
                        piv = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = piv else { break };
            a.swap(t, pi);
            col_swap(&mut a, &mut v, &mut vinv, t, pj);
            let p = a[t][t];
            let mut done = true;
            for i in t + 1..k {
                let c = a[i][t].div_euclid(p);
                if c != 0 {
                    let rt = a[t].clone();
                    for (x, y) in a[i].iter_mut().zip(&rt) {
                        *x -= c * y;
                    }
                }
                if a[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..k {
                let c = a[t][j].div_euclid(p);
                if c != 0 {
                    col_add(&mut a, &mut v, &mut vinv, t, j, -c);
                }
                if a[t][j] != 0 {
                    done = false;
                }
            }
            if !done {
                continue;
            }
            // divisibility of the rest of the block by the pivot
            let mut fix = None;
            for i in t + 1..k {
                for j in t + 1..k {
                    if a[i][j] % p != 0 {
                        fix = Some(i);
                    }
                }
            }
            match fix {
                Some(i) => {
                    let ri = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&ri) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let diag = (0..k).map(|i| a[i][i]).collect();
    (diag, v, vinv)
}

/// Composition of reduced classes in the classical group, via reduction.
pub fn classical_compose(q1: &Form, q2: &Form) -> Result<Form> {
    let (_, q3) = make_coprime(q2, q1.a);
    Ok(reduce(&dirichlet_compose(q1, &q3)?).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: i64, b: i64, c: i64) -> Form {
        Form::new(a, b, c).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let (r, g) = reduce(&f(17, 2, 3));
        assert_eq!(r, f(3, -2, 17));
        assert_eq!(f(17, 2, 3).act(&g), r);
        let (r, g) = reduce(&f(1, 0, 50));
        assert_eq!((r, g), (f(1, 0, 50), UnimodularMatrix::IDENTITY));
        assert_eq!(reduce(&f(50, 0, 1)).0, f(1, 0, 50));
    }

    #[test]
    fn make_coprime_examples() {
        let (g, q) = make_coprime(&f(6, -4, 9), 3);
        assert_eq!((g, q), (UnimodularMatrix::new(1, -1, 1, 0), f(11, -8, 6)));
        let (g, q) = make_coprime(&f(1, 0, 50), 3);
        assert_eq!((g, q), (UnimodularMatrix::IDENTITY, f(1, 0, 50)));
        let (g, q) = make_coprime(&f(3, -2, 17), 3);
        assert_eq!((g, q), (UnimodularMatrix::S, f(17, 2, 3)));
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&f(1, 0, 1)).len(), 4);
        assert_eq!(automorphisms(&f(1, 1, 1)).len(), 6);
        assert_eq!(automorphisms(&f(2, 1, 3)).len(), 2);
    }

    #[test]
    fn primitive_vector_order() {
        let v: Vec<_> = primitive_vectors().take(4).collect();
        assert_eq!(v, vec![(1, 0), (0, 1), (1, 1), (1, -1)]);
    }

    #[test]
    fn snf_small() {
        let (d, _, _) = smith_normal_form(vec![vec![2, 0], vec![0, 3]], 2);
        assert_eq!(d, vec![1, 6]);
        let (d, _, _) = smith_normal_form(vec![vec![4, 0], vec![-2, 2]], 2);
        let mut d2 = d.clone();
        d2.retain(|&x| x > 1);
        assert_eq!(d2, vec![2, 4]);
    }
}
