//! Canonicalization is confluent: semantically equal expression trees, built
//! with different shapes, orders, and groupings, normalize to one Expr with
//! one printed form.

use adjflux_core::expr::{Atom, Expr, ExprTree, MultiIndex, Sym};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pool() -> Vec<Atom> {
    let ix = |s: &str| MultiIndex::new(s.chars().map(|c| Sym::new(c.to_string())).collect());
    vec![
        Atom::indep("t"),
        Atom::indep("x"),
        Atom::dep("u"),
        Atom::jet("u", ix("t")),
        Atom::jet("u", ix("x")),
        Atom::jet("u", ix("xx")),
    ]
}

fn arb_tree() -> impl Strategy<Value = ExprTree> {
    let leaf = prop_oneof![
        (0usize..6).prop_map(|i| ExprTree::Atom(pool()[i].clone())),
        (-3i64..=3).prop_map(ExprTree::int),
        (1i64..=4, 1i64..=4).prop_map(|(n, d)| ExprTree::Rational(
            num::BigRational::new(n.into(), d.into())
        )),
    ];
    leaf.prop_recursive(3, 32, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(ExprTree::Sum),
            prop::collection::vec(inner.clone(), 2..4).prop_map(ExprTree::Product),
            (inner.clone(), 0u32..=3)
                .prop_map(|(t, k)| ExprTree::Pow(Box::new(t), k as i32)),
            inner.prop_map(|t| t.neg()),
        ]
    })
}

/// Same value, different shape: permute and regroup n-ary nodes recursively.
fn reshuffle(t: &ExprTree, rng: &mut ChaCha8Rng) -> ExprTree {
    fn regroup(
        mut parts: Vec<ExprTree>,
        rng: &mut ChaCha8Rng,
        rebuild: &dyn Fn(Vec<ExprTree>) -> ExprTree,
    ) -> ExprTree {
        parts.shuffle(rng);
        while parts.len() > 1 && rng.gen_bool(0.5) {
            let a = parts.remove(rng.gen_range(0..parts.len()));
            let b = parts.remove(rng.gen_range(0..parts.len()));
            parts.push(rebuild(vec![a, b]));
        }
        rebuild(parts)
    }
    match t {
        ExprTree::Sum(parts) => {
            let parts = parts.iter().map(|p| reshuffle(p, rng)).collect();
            regroup(parts, rng, &ExprTree::Sum)
        }
        ExprTree::Product(parts) => {
            let parts = parts.iter().map(|p| reshuffle(p, rng)).collect();
            regroup(parts, rng, &ExprTree::Product)
        }
        ExprTree::Pow(b, k) => ExprTree::Pow(Box::new(reshuffle(b, rng)), *k),
        ExprTree::Quotient(n, d) => ExprTree::Quotient(
            Box::new(reshuffle(n, rng)),
            Box::new(reshuffle(d, rng)),
        ),
        leaf => leaf.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normalization_is_confluent(t in arb_tree(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = t.normalize().unwrap();
        for _ in 0..3 {
            let b = reshuffle(&t, &mut rng).normalize().unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.to_string(), b.to_string());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ring_laws(a in arb_tree(), b in arb_tree(), c in arb_tree()) {
        let (a, b, c) = (a.normalize().unwrap(), b.normalize().unwrap(), c.normalize().unwrap());
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(-&(-&a), a.clone());
        prop_assert_eq!(&a - &a, Expr::zero());
    }

    #[test]
    fn exact_division_round_trips(a in arb_tree(), b in arb_tree()) {
        let (a, b) = (a.normalize().unwrap(), b.normalize().unwrap());
        prop_assume!(!b.is_zero());
        let q = (&a * &b).try_div(&b).unwrap();
        prop_assert!(q.math_eq(&a));
        // Division by a product of the factors is exact in reduced form.
        let r = (&a * &b).try_div_reduced(&b).unwrap();
        prop_assert_eq!(r, a);
    }
}
