use classfield::quadforms::*;
use proptest::prelude::*;

fn f(a: i64, b: i64, c: i64) -> Form {
    Form::new(a, b, c).unwrap()
}

pub const TILDE_FORMS: [(i64, i64, i64); 12] = [
    (1, 0, 50),
    (2, 0, 25),
    (17, 2, 3),
    (17, -2, 3),
    (11, -8, 6),
    (11, 8, 6),
    (50, 0, 1),
    (25, 0, 2),
    (22, -36, 17),
    (22, 36, 17),
    (25, 30, 11),
    (25, -30, 11),
];

pub const TABLE: [[usize; 12]; 12] = [
    [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
    [2, 1, 12, 11, 10, 9, 8, 7, 6, 5, 4, 3],
    [3, 12, 11, 1, 8, 10, 9, 6, 5, 7, 2, 4],
    [4, 11, 1, 12, 9, 8, 10, 5, 7, 6, 3, 2],
    [5, 10, 8, 9, 12, 1, 11, 4, 2, 3, 6, 7],
    [6, 9, 10, 8, 1, 11, 12, 3, 4, 2, 7, 5],
    [7, 8, 9, 10, 11, 12, 1, 2, 3, 4, 5, 6],
    [8, 7, 6, 5, 4, 3, 2, 1, 12, 11, 10, 9],
    [9, 6, 5, 7, 2, 4, 3, 12, 11, 1, 8, 10],
    [10, 5, 7, 6, 3, 2, 4, 11, 1, 12, 9, 8],
    [11, 4, 2, 3, 6, 7, 5, 10, 8, 9, 12, 1],
    [12, 3, 4, 2, 7, 5, 6, 9, 10, 8, 1, 11],
];

fn ctx200() -> OrderContext {
    OrderContext::new(-200).unwrap()
}

#[test]
fn reduced_forms_of_minus_200() {
    let got = enumerate_reduced(-200).unwrap();
    let want = vec![f(1, 0, 50), f(2, 0, 25), f(3, -2, 17), f(3, 2, 17), f(6, -4, 9), f(6, 4, 9)];
    assert_eq!(got, want);
    assert_eq!(enumerate_reduced(-4).unwrap(), vec![f(1, 0, 1)]);
    assert_eq!(enumerate_reduced(-15).unwrap(), vec![f(1, 1, 4), f(2, 1, 2)]);
    assert!(enumerate_reduced(-5).is_err());
    assert!(enumerate_reduced(12).is_err());
}

#[test]
fn order_context_data() {
    let c = ctx200();
    assert_eq!((c.b_o, c.c_o, c.conductor, c.fundamental_disc()), (0, 50, 5, -8));
    let c = OrderContext::new(-15).unwrap();
    assert_eq!((c.b_o, c.c_o, c.conductor), (1, 4, 1));
    let c = OrderContext::new(-99).unwrap();
    assert_eq!((c.conductor, c.fundamental_disc()), (3, -11));
}

/// Brute-force search for `γ` with `Q^γ = R` over small entries.
fn brute_force_equivalent(q: &Form, r: &Form) -> bool {
    for p in -6..=6 {
        for qq in -6..=6 {
            for rr in -6..=6 {
                for s in -6..=6 {
                    let g = UnimodularMatrix::new(p, qq, rr, s);
                    if g.det() == 1 && q.act(&g) == *r {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[test]
fn reduction_agrees_with_brute_force() {
    assert!(brute_force_equivalent(&f(50, 0, 1), &f(1, 0, 50)));
    assert_eq!(reduce(&f(50, 0, 1)).0, f(1, 0, 50));
}

/// Middle coefficient by scanning residues mod 2aa″ against the three congruences.
fn crt_oracle(q1: &Form, q2: &Form) -> i64 {
    let m = 2 * q1.a * q2.a;
    let d = q1.disc();
    (0..m)
        .find(|&b| {
            (b - q1.b).rem_euclid(2 * q1.a) == 0
                && (b - q2.b).rem_euclid(2 * q2.a) == 0
                && (b * b - d).rem_euclid(4 * q1.a * q2.a) == 0
        })
        .unwrap()
}

#[test]
fn dirichlet_examples() {
    assert_eq!(dirichlet_compose(&f(1, 0, 50), &f(2, 0, 25)).unwrap(), f(2, 0, 25));
    assert!(matches!(
        dirichlet_compose(&f(3, -2, 17), &f(3, 2, 17)),
        Err(classfield::Error::Composition(_))
    ));
    let c = dirichlet_compose(&f(2, 0, 25), &f(3, -2, 17)).unwrap();
    assert_eq!(c.b, crt_oracle(&f(2, 0, 25), &f(3, -2, 17)));
    assert_eq!(c, f(6, 4, 9));
    // the lift B = 16 in [0, 24) is the same form up to translation
    assert_eq!(c.act(&UnimodularMatrix::translation(1)), f(6, 16, 19));
}

#[test]
fn gamma1_examples() {
    let q = f(11, -8, 6);
    let t = UnimodularMatrix::T;
    assert_eq!(gamma1_equivalent(&q, &q.act(&t), 3).unwrap(), Some(t));
    assert_eq!(gamma1_equivalent(&f(1, 0, 50), &f(50, 0, 1), 3).unwrap(), None);
    assert_eq!(gamma1_equivalent(&q, &q, 3).unwrap(), Some(UnimodularMatrix::IDENTITY));
    assert!(gamma1_equivalent(&q, &f(1, 1, 4), 3).is_err());
}

fn align(g: &ClassGroup) -> Vec<usize> {
    TILDE_FORMS
        .iter()
        .map(|&(a, b, c)| g.index_of(&f(a, b, c)).expect("reference form lies in a class"))
        .collect()
}

#[test]
fn class_group_minus_200_level_3() {
    let g = class_enumerate(&ctx200(), 3).unwrap();
    assert_eq!(g.order(), 12);
    assert_eq!(g.invariant_factors, vec![2, 6]);
    let map = align(&g);
    let mut sorted = map.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 12, "reference representatives are pairwise inequivalent");
    for i in 0..12 {
        for j in 0..12 {
            assert_eq!(g.table[map[i]][map[j]], map[TABLE[i][j] - 1], "cell g{} g{}", i + 1, j + 1);
        }
    }
    let twos: Vec<usize> = (0..12).filter(|&i| g.element_order(map[i]) == 2).map(|i| i + 1).collect();
    assert_eq!(twos, vec![2, 7, 8]);
}

#[test]
fn compose_level_examples() {
    let c = ctx200();
    let t = |i: usize| {
        let (a, b, cc) = TILDE_FORMS[i - 1];
        f(a, b, cc)
    };
    let p = compose_level(&t(2), &t(3), &c, 3).unwrap();
    assert!(gamma1_equivalent(&p, &t(12), 3).unwrap().is_some());
    for i in 1..=12 {
        let p = compose_level(&t(1), &t(i), &c, 3).unwrap();
        assert!(gamma1_equivalent(&p, &t(i), 3).unwrap().is_some());
    }
    let p = compose_level(&t(7), &t(7), &c, 3).unwrap();
    assert!(gamma1_equivalent(&p, &t(1), 3).unwrap().is_some());
}

#[test]
fn small_class_groups() {
    let g = class_enumerate(&ctx200(), 1).unwrap();
    assert_eq!(g.order(), 6);
    let g = class_enumerate(&OrderContext::new(-4).unwrap(), 1).unwrap();
    assert_eq!(g.order(), 1);
    assert!(g.invariant_factors.is_empty());
    assert_eq!(g.characters, vec![Vec::<u64>::new()]);
    let g = class_enumerate(&OrderContext::new(-15).unwrap(), 1).unwrap();
    assert_eq!(g.invariant_factors, vec![2]);
    let g = class_enumerate(&OrderContext::new(-3).unwrap(), 2).unwrap();
    assert_eq!(g.order() as u64, expected_order(&OrderContext::new(-3).unwrap(), 2).unwrap());
}

#[test]
fn class_key_matches_gamma1_equivalence() {
    for (d, n) in [(-200, 3), (-56, 4), (-15, 2), (-4, 3), (-3, 4)] {
        let g = class_enumerate(&OrderContext::new(d).unwrap(), n).unwrap();
        for i in 0..g.order() {
            for j in 0..g.order() {
                let eq = gamma1_equivalent(&g.reps[i], &g.reps[j], n).unwrap().is_some();
                assert_eq!(eq, i == j, "D={d} N={n} classes {i} {j}");
            }
        }
    }
}

#[test]
fn reduced_forms_unique_per_class() {
    for d in (-2000..0).filter(|d| is_discriminant(*d)) {
        let reds = enumerate_reduced(d).unwrap();
        for (i, r) in reds.iter().enumerate() {
            assert_eq!(reduce(r).0, *r);
            for s in &reds[i + 1..] {
                assert!(gamma1_equivalent(r, s, 1).unwrap().is_none(), "D={d}: {r} ~ {s}");
            }
        }
    }
}

#[test]
fn level_one_matches_classical_composition() {
    for d in (-500..0).filter(|d| is_discriminant(*d)) {
        let ctx = OrderContext::new(d).unwrap();
        let g = class_enumerate(&ctx, 1).unwrap();
        let reds = enumerate_reduced(d).unwrap();
        assert_eq!(g.order(), reds.len());
        for r in &reds {
            for s in &reds {
                let want = classical_compose(r, s).unwrap();
                let i = g.index_of(r).unwrap();
                let j = g.index_of(s).unwrap();
                assert_eq!(reduce(&g.reps[g.table[i][j]]).0, want, "D={d}: {r} * {s}");
            }
        }
    }
}

#[test]
fn forgetful_map_is_a_surjective_homomorphism() {
    for (d, n) in [(-200, 3), (-56, 4), (-71, 2), (-20, 3)] {
        let ctx = OrderContext::new(d).unwrap();
        let gn = class_enumerate(&ctx, n).unwrap();
        let g1 = class_enumerate(&ctx, 1).unwrap();
        let proj: Vec<usize> = gn.reps.iter().map(|q| g1.index_of(q).unwrap()).collect();
        for i in 0..gn.order() {
            for j in 0..gn.order() {
                assert_eq!(proj[gn.table[i][j]], g1.table[proj[i]][proj[j]]);
            }
        }
        let kernel = proj.iter().filter(|&&x| x == g1.identity).count();
        let mut image = proj.clone();
        image.sort();
        image.dedup();
        assert_eq!(image.len(), g1.order());
        assert_eq!(kernel * g1.order(), gn.order());
    }
}

#[test]
fn characters_are_homomorphisms() {
    let g = class_enumerate(&ctx200(), 3).unwrap();
    assert_eq!(g.characters.len(), 12);
    for chi in &g.characters {
        for a in 0..12 {
            for b in 0..12 {
                let (x, d) = g.character_exponent(chi, a);
                let (y, _) = g.character_exponent(chi, b);
                let (z, _) = g.character_exponent(chi, g.table[a][b]);
                assert_eq!((x + y) % d, z);
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    for chi in &g.characters {
        let vals: Vec<_> = (0..12).map(|a| g.character_exponent(chi, a)).collect();
        assert!(seen.insert(vals), "characters are distinct");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn reduce_is_idempotent_and_witnessed(p in -20i64..20, q in -20i64..20, r in -20i64..20, idx in 0usize..6) {
        let base = enumerate_reduced(-200).unwrap()[idx];
        prop_assume!(gcd(p, r) == 1);
        let g = UnimodularMatrix::complete_column(p, r).unwrap().mul(&UnimodularMatrix::translation(q));
        let form = base.act(&g);
        let (red, w) = reduce(&form);
        prop_assert_eq!(red, base);
        prop_assert_eq!(form.act(&w), red);
        prop_assert_eq!(reduce(&red).0, red);
    }

    #[test]
    fn compose_level_is_lift_independent(i in 0usize..12, j in 0usize..12, k in 0usize..3,
                                         bs in -2i64..3, ru in -2i64..3, rv in -2i64..3, ts in -2i64..3) {
        let c = ctx200();
        let (a1, b1, c1) = TILDE_FORMS[i];
        let (a2, b2, c2) = TILDE_FORMS[j];
        let base = compose_level(&f(a1, b1, c1), &f(a2, b2, c2), &c, 3).unwrap();
        let choice = LiftChoice { coprime_index: k, b_shift: bs, row_shift: (ru, rv), top_shift: ts };
        let alt = compose_level_with(&f(a1, b1, c1), &f(a2, b2, c2), &c, 3, choice).unwrap();
        prop_assert!(gamma1_equivalent(&base, &alt, 3).unwrap().is_some());
    }
}
