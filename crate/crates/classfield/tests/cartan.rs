use classfield::cartan::*;
use classfield::quadforms::*;
use proptest::prelude::*;

fn ctx(d: i64) -> OrderContext {
    OrderContext::new(d).unwrap()
}

fn gcd_brute(a: i64, b: i64) -> i64 {
    (1..=a.abs().max(b.abs()).max(1)).rev().find(|d| a % d == 0 && b % d == 0).unwrap_or(1)
}

#[test]
fn unit_group_examples() {
    // brute force over the 9 residues with an independent norm computation
    let c = ctx(-200);
    let brute = (0..3)
        .flat_map(|s: i64| (0..3i64).map(move |t| (s, t)))
        .filter(|&(s, t)| gcd_brute((t * t + 50 * s * s).rem_euclid(3), 3) == 1)
        .count();
    assert_eq!(brute, 4);
    assert_eq!(unit_group(&c, 3).unwrap().len(), 4);
    assert_eq!(unit_group(&c, 1).unwrap().len(), 1);
    let c4 = ctx(-4);
    let brute = (0..2).flat_map(|s| (0..2).map(move |t| (s, t))).filter(|&(s, t)| (t * t + s * s) % 2 == 1).count();
    assert_eq!(unit_group(&c4, 2).unwrap().len(), brute);
}

#[test]
fn mu_examples() {
    let c = ctx(-200);
    assert_eq!(mu(&c, 3, 1, 0), [[0, 1], [1, 0]]);
    assert_eq!(mu(&c, 3, 0, 1), [[1, 0], [0, 1]]);
}

#[test]
fn cartan_orders_for_minus_200() {
    let g = cartan_groups(&ctx(-200), 3).unwrap();
    assert_eq!((g.w.order(), g.u.order()), (4, 2));
    assert!(g.w_hat.order() == g.w.order() || g.w_hat.order() == 2 * g.w.order());
    assert!(g.w.is_closed() && g.u.is_closed() && g.w_hat.is_closed());
    assert!(g.check_order_identity(12, 6));
    assert!(cartan_groups(&ctx(-200), 1).is_err());
}

#[test]
fn mu_is_injective_on_units() {
    for d in [-200, -15, -20, -56, -71, -24, -3, -4] {
        let c = ctx(d);
        for n in 2..=12 {
            let us = unit_group(&c, n).unwrap();
            let mut imgs: Vec<Mat2> = us.iter().map(|x| mu(&c, n, x.s, x.t)).collect();
            imgs.sort();
            imgs.dedup();
            assert_eq!(imgs.len(), us.len(), "D={d} N={n}");
        }
    }
}

#[test]
fn order_identity_on_battery() {
    for d in [-15, -20, -24, -56, -71, -200] {
        let c = ctx(d);
        let h = enumerate_reduced(d).unwrap().len();
        for n in 2..=4 {
            let g = class_enumerate(&c, n).unwrap();
            assert!(cartan_groups(&c, n).unwrap().check_order_identity(g.order(), h), "D={d} N={n}");
        }
    }
}

proptest! {
    #[test]
    fn mu_is_multiplicative(d in prop::sample::select(vec![-200i64, -15, -20, -56, -71, -3, -4]),
                            n in 2i64..13, s1 in 0i64..13, t1 in 0i64..13, s2 in 0i64..13, t2 in 0i64..13) {
        let c = ctx(d);
        let x = ResidueElem { s: s1 % n, t: t1 % n };
        let y = ResidueElem { s: s2 % n, t: t2 % n };
        let xy = residue_mul(&c, n, x, y);
        prop_assert_eq!(mu(&c, n, xy.s, xy.t), mat_mul(&mu(&c, n, x.s, x.t), &mu(&c, n, y.s, y.t), n));
        let det = mat_det(&mu(&c, n, x.s, x.t), n);
        prop_assert_eq!(det, (x.t * x.t - c.b_o * x.s * x.t + c.c_o * x.s * x.s).rem_euclid(n));
    }
}
