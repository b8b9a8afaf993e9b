//! Exact rationals and arbitrary-precision complex numbers.
//!
//! Every [`BigComplex`] carries its own working precision in bits. Binary
//! operations run at the larger of the two operand precisions.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type BigRat = BigRational;

const RM: RoundingMode = RoundingMode::ToEven;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Smallest working precision, in bits.
pub const MIN_PREC: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Builds `n/d` in lowest terms with a positive denominator.
pub fn rat_normalize(n: &BigInt, d: &BigInt) -> Result<BigRat> {
    if d.is_zero() {
        return Err(Error::Domain("zero denominator".into()));
    }
    Ok(BigRat::new(n.clone(), d.clone()))
}

pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

pub fn digits_to_bits(digits: usize) -> usize {
    (((digits as f64) * LOG2_10).ceil() as usize + 8).max(MIN_PREC)
}

pub fn bits_to_digits(bits: usize) -> usize {
    ((bits as f64) / LOG2_10).floor() as usize
}

/// Working-precision schedule used by recognition pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub target_decimal_digits: usize,
    pub guard_digits: usize,
    pub max_escalations: usize,
}

impl PrecisionPolicy {
    pub fn new(target_decimal_digits: usize) -> Self {
        Self {
            target_decimal_digits,
            guard_digits: 30,
            max_escalations: 4,
        }
    }

    pub fn working_digits(&self) -> usize {
        self.target_decimal_digits + self.guard_digits
    }

    pub fn working_bits(&self) -> usize {
        digits_to_bits(self.working_digits())
    }

    /// Absolute tolerance for integer recognition.
    pub fn tolerance(&self) -> f64 {
        10f64.powf(-(self.guard_digits as f64) / 2.0)
    }

    /// The policy after `k` escalations: the target doubles each time.
    pub fn escalated(&self, k: usize) -> Self {
        Self {
            target_decimal_digits: self.target_decimal_digits << k,
            ..*self
        }
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self::new(100)
    }
}

// ---- real helpers -------------------------------------------------------

pub(crate) fn bf_from_i64(n: i64, p: usize) -> BigFloat {
    BigFloat::from_i64(n, p)
}

pub(crate) fn bf_from_bigint(n: &BigInt, p: usize) -> BigFloat {
    match n.to_string().parse::<i64>() {
        Ok(small) => BigFloat::from_i64(small, p),
        Err(_) => with_cc(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, p, RM, cc)),
    }
}

pub(crate) fn bf_from_rat(r: &BigRat, p: usize) -> BigFloat {
    let n = bf_from_bigint(r.numer(), p);
    let d = bf_from_bigint(r.denom(), p);
    n.div(&d, p, RM)
}

/// Integer part of `x`, truncated toward zero.
pub(crate) fn bf_trunc_to_bigint(x: &BigFloat) -> BigInt {
    let t = x.int();
    if t.is_zero() {
        return BigInt::zero();
    }
    let Some((words, _, sign, e, _)) = t.as_raw_parts() else {
        return BigInt::zero();
    };
    let mut m = BigInt::zero();
    for w in words.iter().rev() {
        m = (m << 64) + BigInt::from(*w);
    }
    let shift = e as i64 - 64 * words.len() as i64;
    let mag = if shift >= 0 {
        m << (shift as usize)
    } else {
        m >> ((-shift) as usize)
    };
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

pub(crate) fn bf_round_to_bigint(x: &BigFloat) -> BigInt {
    let p = x.precision().unwrap_or(MIN_PREC).max(MIN_PREC);
    let half = BigFloat::from_f64(0.5, p);
    bf_trunc_to_bigint(&x.add(&half, p + 64, RM).floor())
}

/// log10 of |x|; `-inf` for zero.
pub(crate) fn bf_log10_abs(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    match x.as_raw_parts() {
        Some((words, _, _, e, _)) => {
            let top = *words.last().unwrap() as f64 / 18446744073709551616.0;
            (top.log2() + e as f64) / LOG2_10
        }
        None => f64::NAN,
    }
}

pub(crate) fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_raw_parts() {
        Some((words, _, sign, e, _)) => {
            let mut top = 0.0f64;
            for w in words.iter().rev().take(2) {
                top = top * 18446744073709551616.0 + *w as f64;
            }
            let used = words.len().min(2) as i32;
            let v = top * 2f64.powi(e - 64 * used);
            if sign == Sign::Neg {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

fn bf_pi(p: usize) -> BigFloat {
    with_cc(|cc| cc.pi(p, RM))
}

fn bf_atan2(y: &BigFloat, x: &BigFloat, p: usize) -> BigFloat {
    if x.is_zero() && y.is_zero() {
        return BigFloat::from_i64(0, p);
    }
    let pi = bf_pi(p);
    if x.abs().cmp(&y.abs()).unwrap_or(0) >= 0 {
        let a = with_cc(|cc| y.div(x, p, RM).atan(p, RM, cc));
        if x.is_positive() {
            a
        } else if y.is_negative() {
            a.sub(&pi, p, RM)
        } else {
            a.add(&pi, p, RM)
        }
    } else {
        let a = with_cc(|cc| x.div(y, p, RM).atan(p, RM, cc));
        let half_pi = pi.div(&BigFloat::from_i64(2, p), p, RM);
        if y.is_positive() {
            half_pi.sub(&a, p, RM)
        } else {
            half_pi.neg().sub(&a, p, RM)
        }
    }
}

// ---- complex ------------------------------------------------------------

/// Arbitrary-precision complex number with an explicit precision in bits.
#[derive(Clone, Debug)]
pub struct BigComplex {
    re: BigFloat,
    im: BigFloat,
    prec: usize,
}

impl BigComplex {
    fn raw(re: BigFloat, im: BigFloat, prec: usize) -> Self {
        Self { re, im, prec }
    }

    pub fn zero(prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        Self::raw(BigFloat::from_i64(0, p), BigFloat::from_i64(0, p), p)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn i(prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        Self::raw(BigFloat::from_i64(0, p), BigFloat::from_i64(1, p), p)
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        Self::raw(bf_from_i64(n, p), BigFloat::from_i64(0, p), p)
    }

    pub fn from_i128(n: i128, prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        Self::raw(BigFloat::from_i128(n, p), BigFloat::from_i64(0, p), p)
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        Self::raw(BigFloat::from_f64(re, p), BigFloat::from_f64(im, p), p)
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        Self::raw(bf_from_bigint(n, p), BigFloat::from_i64(0, p), p)
    }

    pub fn from_rat(r: &BigRat, prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        Self::raw(bf_from_rat(r, p), BigFloat::from_i64(0, p), p)
    }

    /// `x + y*i` with rational parts.
    pub fn from_rats(x: &BigRat, y: &BigRat, prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        Self::raw(bf_from_rat(x, p), bf_from_rat(y, p), p)
    }

    /// Parses decimal strings (scientific notation accepted) at `digits` precision.
    pub fn parse(re: &str, im: &str, digits: usize) -> Result<Self> {
        if digits < 20 {
            return Err(Error::Domain(format!("precision of {digits} digits is below 20")));
        }
        let p = digits_to_bits(digits);
        let parse_one = |s: &str| -> Result<BigFloat> {
            let cleaned = s.trim().replace('\u{2212}', "-");
            let ok = !cleaned.is_empty()
                && cleaned
                    .chars()
                    .all(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.' | 'e' | 'E'));
            if !ok {
                return Err(Error::Format(format!("cannot parse {s:?} as a decimal number")));
            }
            let v = with_cc(|cc| BigFloat::parse(&cleaned, Radix::Dec, p, RM, cc));
            if v.is_nan() || v.is_inf() {
                return Err(Error::Format(format!("cannot parse {s:?} as a decimal number")));
            }
            Ok(v)
        };
        Ok(Self::raw(parse_one(re)?, parse_one(im)?, p))
    }

    pub fn pi(prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        Self::raw(bf_pi(p), BigFloat::from_i64(0, p), p)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Same value rounded or padded to a new precision.
    pub fn with_prec(&self, prec: usize) -> Self {
        let p = prec.max(MIN_PREC);
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        let _ = re.set_precision(p, RM);
        let _ = im.set_precision(p, RM);
        Self::raw(re, im, p)
    }

    pub fn re(&self) -> Self {
        Self::raw(self.re.clone(), BigFloat::from_i64(0, self.prec), self.prec)
    }

    pub fn im(&self) -> Self {
        Self::raw(self.im.clone(), BigFloat::from_i64(0, self.prec), self.prec)
    }

    pub fn re_f64(&self) -> f64 {
        bf_to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        bf_to_f64(&self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn im_is_positive(&self) -> bool {
        self.im.is_positive() && !self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }

    fn p2(&self, o: &Self) -> usize {
        self.prec.max(o.prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::raw(self.re.add(&o.re, p, RM), self.im.add(&o.im, p, RM), p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::raw(self.re.sub(&o.re, p, RM), self.im.sub(&o.im, p, RM), p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p2(o);
        let ac = self.re.mul(&o.re, p, RM);
        let bd = self.im.mul(&o.im, p, RM);
        let ad = self.re.mul(&o.im, p, RM);
        let bc = self.im.mul(&o.re, p, RM);
        Self::raw(ac.sub(&bd, p, RM), ad.add(&bc, p, RM), p)
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::Pole("division by zero".into()));
        }
        let p = self.p2(o);
        let den = o.norm_sqr_bf(p);
        let ac = self.re.mul(&o.re, p, RM);
        let bd = self.im.mul(&o.im, p, RM);
        let bc = self.im.mul(&o.re, p, RM);
        let ad = self.re.mul(&o.im, p, RM);
        Ok(Self::raw(
            ac.add(&bd, p, RM).div(&den, p, RM),
            bc.sub(&ad, p, RM).div(&den, p, RM),
            p,
        ))
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(self.prec).div(self)
    }

    pub fn neg(&self) -> Self {
        Self::raw(self.re.neg(), self.im.neg(), self.prec)
    }

    pub fn conj(&self) -> Self {
        Self::raw(self.re.clone(), self.im.neg(), self.prec)
    }

    pub fn mul_i(&self) -> Self {
        Self::raw(self.im.neg(), self.re.clone(), self.prec)
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        let p = self.prec;
        let k = BigFloat::from_i64(n, p);
        Self::raw(self.re.mul(&k, p, RM), self.im.mul(&k, p, RM), p)
    }

    pub fn div_i64(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero");
        let p = self.prec;
        let k = BigFloat::from_i64(n, p);
        Self::raw(self.re.div(&k, p, RM), self.im.div(&k, p, RM), p)
    }

    pub fn mul_rat(&self, r: &BigRat) -> Self {
        let p = self.prec;
        let k = bf_from_rat(r, p);
        Self::raw(self.re.mul(&k, p, RM), self.im.mul(&k, p, RM), p)
    }

    fn norm_sqr_bf(&self, p: usize) -> BigFloat {
        self.re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    /// |z|² as a real BigComplex.
    pub fn norm_sqr(&self) -> Self {
        let p = self.prec;
        Self::raw(self.norm_sqr_bf(p), BigFloat::from_i64(0, p), p)
    }

    /// |z| as a real BigComplex.
    pub fn abs(&self) -> Self {
        let p = self.prec;
        Self::raw(self.norm_sqr_bf(p).sqrt(p, RM), BigFloat::from_i64(0, p), p)
    }

    pub fn abs_f64(&self) -> f64 {
        10f64.powf(self.log10_abs())
    }

    /// log10 |z|, accurate to double precision even far outside the f64 range.
    pub fn log10_abs(&self) -> f64 {
        let a = bf_log10_abs(&self.re);
        let b = bf_log10_abs(&self.im);
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        hi + 0.5 * (1.0 + 10f64.powf(2.0 * (lo - hi))).log10()
    }

    pub fn arg(&self) -> Self {
        let p = self.prec;
        Self::raw(bf_atan2(&self.im, &self.re, p), BigFloat::from_i64(0, p), p)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        let (m, c, s) = with_cc(|cc| {
            (
                self.re.exp(p, RM, cc),
                self.im.cos(p, RM, cc),
                self.im.sin(p, RM, cc),
            )
        });
        Self::raw(m.mul(&c, p, RM), m.mul(&s, p, RM), p)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Pole("logarithm of zero".into()));
        }
        let p = self.prec;
        let lr = with_cc(|cc| self.norm_sqr_bf(p).ln(p, RM, cc)).div(&BigFloat::from_i64(2, p), p, RM);
        Ok(Self::raw(lr, bf_atan2(&self.im, &self.re, p), p))
    }

    /// ln |z| as a real BigComplex.
    pub fn ln_abs(&self) -> Result<Self> {
        Ok(self.ln()?.re())
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec;
        if self.is_zero() {
            return Self::zero(p);
        }
        let two = BigFloat::from_i64(2, p);
        let r = self.norm_sqr_bf(p).sqrt(p, RM);
        let x = r.add(&self.re, p, RM).div(&two, p, RM).sqrt(p, RM);
        let y = r.sub(&self.re, p, RM).div(&two, p, RM).sqrt(p, RM);
        let y = if self.im.is_negative() { y.neg() } else { y };
        Self::raw(x, y, p)
    }

    pub fn sin(&self) -> Self {
        // sin z = (e^{iz} - e^{-iz}) / 2i
        let e1 = self.mul_i().exp();
        let e2 = self.mul_i().neg().exp();
        e1.sub(&e2).div_i64(2).mul_i().neg()
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(self.prec);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.sqr();
            }
        }
        Ok(acc)
    }

    /// `e^{2πi z}`.
    pub fn exp_2pi_i(&self) -> Self {
        let p = self.prec;
        Self::pi(p).mul(self).mul_i64(2).mul_i().exp()
    }

    /// Relative distance |a-b| / max(|a|,|b|,1e-300) expressed as log10.
    pub fn log10_rel_diff(&self, o: &Self) -> f64 {
        let d = self.sub(o).log10_abs();
        let s = self.log10_abs().max(o.log10_abs());
        if s == f64::NEG_INFINITY {
            d
        } else {
            d - s
        }
    }

    /// Decimal rendering with `digits` significant digits for each part.
    pub fn to_decimal(&self, digits: usize) -> String {
        let re = format_real(&self.re, digits);
        if self.im.is_zero() {
            return re;
        }
        let im = format_real(&self.im.abs(), digits);
        let sign = if self.im.is_negative() { '-' } else { '+' };
        format!("{re} {sign} {im}i")
    }

    /// Nearest integer to the real part together with log10 of the
    /// larger of the distance to it and the imaginary part.
    pub fn nearest_integer(&self) -> (BigInt, f64) {
        let n = bf_round_to_bigint(&self.re);
        let p = self.prec;
        let d = self.re.sub(&bf_from_bigint(&n, p + 64), p, RM);
        (n, bf_log10_abs(&d).max(bf_log10_abs(&self.im)))
    }
}

impl PartialEq for BigComplex {
    fn eq(&self, o: &Self) -> bool {
        self.re.cmp(&o.re) == Some(0) && self.im.cmp(&o.im) == Some(0)
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(bits_to_digits(self.prec));
        f.write_str(&self.to_decimal(digits))
    }
}

/// Formats a real at `digits` significant digits in scientific notation.
fn format_real(x: &BigFloat, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let digits = digits.max(1);
    let l = bf_log10_abs(x).floor() as i64;
    // scale |x| to an integer with `digits` digits and round once
    let p = x.precision().unwrap_or(MIN_PREC).max(digits_to_bits(digits + 10));
    let ten = BigFloat::from_i64(10, p);
    let shift = digits as i64 - 1 - l;
    let scale = with_cc(|cc| ten.pow(&BigFloat::from_i64(shift, p), p, RM, cc));
    let scaled = x.abs().mul(&scale, p, RM);
    let mut m = bf_round_to_bigint(&scaled).to_string();
    let mut exp10 = l;
    if m.len() > digits {
        m.truncate(digits);
        exp10 += 1;
    }
    let sign = if x.is_negative() { "-" } else { "" };
    let (head, tail) = m.split_at(1);
    let tail = tail.trim_end_matches('0');
    let mant = if tail.is_empty() {
        head.to_string()
    } else {
        format!("{head}.{tail}")
    };
    match exp10.cmp(&0) {
        Ordering::Equal => format!("{sign}{mant}"),
        _ => format!("{sign}{mant}e{exp10}"),
    }
}

/// Returns `n` when `x` lies within `tol` of the integer `n` and its
/// imaginary part is also below `tol`.
pub fn recognize_integer(x: &BigComplex, tol: f64) -> Option<BigInt> {
    if !x.is_finite() || !(tol > 0.0 && tol < 0.5) {
        return None;
    }
    let (n, lres) = x.nearest_integer();
    (lres < tol.log10()).then_some(n)
}

/// Formats a log10 magnitude as a short scientific-notation string.
pub fn format_log10(l: f64) -> String {
    if l == f64::NEG_INFINITY {
        return "0".into();
    }
    let e = l.floor();
    let m = 10f64.powf(l - e);
    format!("{m:.2}e{}", e as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let r = rat_normalize(&BigInt::from(2), &BigInt::from(-4)).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (BigInt::from(-1), BigInt::from(2)));
        let r = rat_normalize(&BigInt::from(0), &BigInt::from(7)).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (BigInt::from(0), BigInt::from(1)));
        let r = rat_normalize(&BigInt::from(50), &BigInt::from(1)).unwrap();
        assert_eq!(r.numer(), &BigInt::from(50));
        assert!(rat_normalize(&BigInt::from(1), &BigInt::from(0)).is_err());
    }

    #[test]
    fn parse_and_print() {
        let x = BigComplex::parse("1.5", "0", 50).unwrap();
        assert_eq!(x.to_decimal(50), "1.5");
        let i = BigComplex::parse("0", "1", 50).unwrap();
        assert_eq!(i, BigComplex::i(digits_to_bits(50)));
        let y = BigComplex::parse("3.14159", "\u{2212}2", 100).unwrap();
        assert!(y.prec() >= digits_to_bits(100));
        assert_eq!(y.to_decimal(6), "3.14159 - 2i");
        assert!(BigComplex::parse("abc", "0", 50).is_err());
        assert!(BigComplex::parse("1", "0", 10).is_err());
    }

    #[test]
    fn round_trip_many_digits() {
        let s = "1.234567890123456789012345678901234567890123456789";
        let x = BigComplex::parse(s, "0", 60).unwrap();
        assert_eq!(x.to_decimal(49), s);
    }

    #[test]
    fn recognize_examples() {
        let x = BigComplex::parse("6.9999999999999", "1e-14", 30).unwrap();
        assert_eq!(recognize_integer(&x, 1e-10), Some(BigInt::from(7)));
        let y = BigComplex::parse("6.4", "0", 30).unwrap();
        assert_eq!(recognize_integer(&y, 1e-10), None);
        let z = BigComplex::parse("-3.00000000000000000001", "-2e-30", 30).unwrap();
        assert_eq!(recognize_integer(&z, 1e-10), Some(BigInt::from(-3)));
        let w = BigComplex::parse("7", "1e-3", 30).unwrap();
        assert_eq!(recognize_integer(&w, 1e-10), None);
    }

    #[test]
    fn big_integers_round_trip() {
        let n: BigInt = "-19732842623587344380".parse().unwrap();
        let x = BigComplex::from_bigint(&n, 256);
        assert_eq!(recognize_integer(&x, 1e-10), Some(n));
    }

    #[test]
    fn transcendental_spot_values() {
        let p = 256;
        let e = BigComplex::one(p).exp();
        assert!((e.re_f64() - std::f64::consts::E).abs() < 1e-15);
        let z = BigComplex::from_f64(0.3, -1.7, p);
        let back = z.ln().unwrap().exp();
        assert!(back.log10_rel_diff(&z) < -70.0);
        let s = z.sqrt();
        assert!(s.sqr().log10_rel_diff(&z) < -70.0);
        let a = BigComplex::from_f64(-1.0, -1e-30, p).arg();
        assert!((a.re_f64() + std::f64::consts::PI).abs() < 1e-15);
        let q = BigComplex::from_f64(0.25, 0.0, p).exp_2pi_i();
        assert!(q.sub(&BigComplex::i(p)).log10_abs() < -70.0);
    }

    #[test]
    fn policy_schedule() {
        let p = PrecisionPolicy::new(700);
        assert_eq!(p.working_digits(), 730);
        assert_eq!(p.escalated(2).target_decimal_digits, 2800);
        assert!((p.tolerance() - 1e-15).abs() < 1e-25);
    }
}
