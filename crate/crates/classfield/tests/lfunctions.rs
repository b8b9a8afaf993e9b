use classfield::lfunctions::*;
use classfield::numerics::{digits_to_bits, BigComplex};
use classfield::orderideals::{default_norm_bound, form_ideal_dictionary, oracle_class_group};
use classfield::quadforms::{class_enumerate, Form, OrderContext};

const DIGITS: usize = 60;

fn bits() -> usize {
    digits_to_bits(DIGITS)
}

fn ctx(d: i64) -> OrderContext {
    OrderContext::new(d).unwrap()
}

#[test]
fn gamma_values() {
    assert_eq!(gamma_on(&ctx(-200), 3), 1);
    assert_eq!(gamma_on(&ctx(-200), 1), 2);
    assert_eq!(gamma_on(&ctx(-200), 2), 2);
    assert_eq!(gamma_on(&ctx(-4), 1), 4);
    assert_eq!(gamma_on(&ctx(-4), 2), 2);
    assert_eq!(gamma_on(&ctx(-3), 1), 6);
    assert_eq!(gamma_on(&ctx(-3), 3), 1);
}

#[test]
fn zeta_rejects_small_real_part() {
    let q = Form::principal(-200);
    assert!(zeta_lattice_partial(&q, &ctx(-200), 3, (1.0, 0.0), 10).is_err());
}

#[test]
fn lattice_term_count() {
    let q = Form::principal(-200);
    for (n, m) in [(3, 7), (1, 5), (2, 4)] {
        let z = zeta_lattice_partial(&q, &ctx(-200), n, (2.0, 0.0), m).unwrap();
        // only for N = 1 is the shift a′/N integral, removing one lattice point
        let excluded = if n == 1 { 1 } else { 0 };
        assert_eq!(z.terms as i64, (2 * m + 1).pow(2) - excluded);
    }
}

#[test]
fn level_one_principal_class_is_epstein_sum() {
    // With a = 1 the sum is Σ' |mτ + n + 1|^{-2s} / γ over O minus zero.
    let c = ctx(-20);
    let q = Form::principal(-20);
    let m = 40i64;
    let tau_im = 5f64.sqrt();
    let mut direct = 0.0;
    for i in -m..=m {
        for j in -m..=m {
            if i == 0 && j == -1 {
                continue;
            }
            let r2 = (i as f64 * tau_im).powi(2) + (j as f64 + 1.0).powi(2);
            direct += r2.powi(-2);
        }
    }
    let z = zeta_lattice_partial(&q, &c, 1, (2.0, 0.0), m).unwrap();
    assert!((z.re - direct / 2.0).abs() < 1e-12, "{} vs {}", z.re, direct / 2.0);
}

#[test]
fn ideal_and_lattice_sums_agree() {
    for (d, n, bound, m) in [(-200, 3, 10_000, 200), (-56, 2, 4000, 120), (-15, 4, 4000, 120), (-20, 1, 4000, 120)] {
        let c = ctx(d);
        let g = class_enumerate(&c, n).unwrap();
        let oracle = oracle_class_group(&c, n, default_norm_bound(&c, n)).unwrap();
        let dict = form_ideal_dictionary(&g, &oracle).unwrap();
        let ideal = zeta_ideal_partials(&g, &oracle, &dict, (2.0, 0.0), bound).unwrap();
        for (i, q) in g.reps.iter().enumerate() {
            let lat = zeta_lattice_partial(q, &c, n, (2.0, 0.0), m).unwrap();
            let tol = 4.0 * (ideal[i].tail + lat.tail);
            assert!(ideal[i].diff(&lat) <= tol, "D={d} N={n} {q}: {} vs {} (tol {tol})", ideal[i].re, lat.re);
            assert!(ideal[i].tail < 1e-2 * ideal[i].re.max(lat.re));
        }
    }
}

#[test]
fn ideal_sum_edge_cases() {
    let c = ctx(-56);
    let g = class_enumerate(&c, 2).unwrap();
    let oracle = oracle_class_group(&c, 2, default_norm_bound(&c, 2)).unwrap();
    let dict = form_ideal_dictionary(&g, &oracle).unwrap();
    let empty = zeta_ideal_partial(&g, &oracle, &dict, 0, (2.0, 0.0), 0).unwrap();
    assert_eq!((empty.re, empty.terms), (0.0, 0));
    let mut last = vec![0.0; g.order()];
    for b in [50, 200, 800] {
        let z = zeta_ideal_partials(&g, &oracle, &dict, (1.5, 0.0), b).unwrap();
        for (i, p) in z.iter().enumerate() {
            assert!(p.re >= last[i]);
            last[i] = p.re;
        }
    }
    assert!(zeta_ideal_partials(&g, &oracle, &dict, (0.5, 0.0), 10).is_err());
}

#[test]
fn complex_exponent_sums_agree() {
    let c = ctx(-56);
    let g = class_enumerate(&c, 2).unwrap();
    let oracle = oracle_class_group(&c, 2, default_norm_bound(&c, 2)).unwrap();
    let dict = form_ideal_dictionary(&g, &oracle).unwrap();
    let s = (2.5, 3.0);
    let ideal = zeta_ideal_partials(&g, &oracle, &dict, s, 4000).unwrap();
    for (i, q) in g.reps.iter().enumerate() {
        let lat = zeta_lattice_partial(q, &c, 2, s, 120).unwrap();
        assert!(ideal[i].diff(&lat) <= 4.0 * (ideal[i].tail + lat.tail));
    }
}

#[test]
fn fourier_inversion_and_constant_term() {
    let c = ctx(-200);
    let g = class_enumerate(&c, 3).unwrap();
    let p = digits_to_bits(80);
    let logs = log_g_values(&g, &c, p).unwrap();
    let gamma = gamma_on(&c, 3);
    let l = all_lderiv0(&g, &logs, gamma);
    assert_eq!(l.len(), 12);
    let back = fourier_inversion(&g, &l, gamma);
    for (a, b) in back.iter().zip(&logs) {
        assert!(a.sub(b).log10_abs() < -40.0);
    }
    let sum = logs.iter().fold(BigComplex::zero(p), |a, b| a.add(b));
    assert!(sum.log10_abs() < -40.0);
    let trivial = g.characters.iter().position(|e| e.iter().all(|&x| x == 0)).unwrap();
    assert!(l[trivial].log10_abs() < -40.0);
    for (i, v) in l.iter().enumerate() {
        let j = g.conjugate_character(i);
        assert!(l[j].sub(&v.conj()).log10_abs() < -40.0);
        if Character::from_group(&g, i).is_real() {
            assert!(v.im().log10_abs() < -40.0);
        }
    }
}

#[test]
fn kronecker_closed_forms() {
    let p = bits();
    let z = BigComplex::from_f64(0.2, 1.3, p);
    let (x0, _) = kronecker_xi(XiCase::Inside, &BigComplex::zero(p), &z, p).unwrap();
    assert_eq!(x0, -1);
    let (x1, _) = kronecker_xi(XiCase::Inside, &z.mul_i64(2).add(&BigComplex::one(p)), &z, p).unwrap();
    assert_eq!(x1, -1);
    assert!(kronecker_xi(XiCase::Outside, &z, &z, p).is_err());
    let w = BigComplex::from_f64(0.31, 0.4, p);
    assert!(kronecker_xi(XiCase::Inside, &w, &z, p).is_err());
    let (y0, a) = kronecker_xi(XiCase::Outside, &w, &z, p).unwrap();
    let (_, b) = kronecker_xi(XiCase::Outside, &w.neg(), &z, p).unwrap();
    assert_eq!(y0, 0);
    assert!(a.log10_rel_diff(&b) < -50.0);
}

#[test]
fn kronecker_reproduces_log_g() {
    // ζ′(0, C) = -ln|g_{O,N}(C)| / (6Nγ) class by class.
    let p = bits();
    for (d, n) in [(-200, 3), (-200, 1), (-56, 2)] {
        let c = ctx(d);
        let g = class_enumerate(&c, n).unwrap();
        let logs = log_g_values(&g, &c, p).unwrap();
        let gamma = gamma_on(&c, n);
        for (q, l) in g.reps.iter().zip(&logs) {
            let z = zeta_deriv0(q, &c, n, p).unwrap();
            let want = l.div_i64(-6 * n * gamma);
            assert!(z.sub(&want).log10_abs() < -50.0, "D={d} N={n} {q}");
        }
    }
}

#[test]
fn tail_bound_dominates_missing_terms() {
    let q = Form::new(17, 2, 3).unwrap();
    let c = ctx(-200);
    let small = zeta_lattice_partial(&q, &c, 3, (2.0, 0.0), 20).unwrap();
    let big = zeta_lattice_partial(&q, &c, 3, (2.0, 0.0), 300).unwrap();
    assert!(big.re - small.re <= small.tail);
    assert!(big.re > small.re);
}
