use modheat_core::psl::{psl_order, PslElement};
use modheat_core::word::ball_size;
use modheat_core::{ball, enumerate_psl, fiber_size, psl_image, Letter, ReducedWord};
use proptest::prelude::*;

fn letters() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop::sample::select(Letter::ALL.to_vec()), 0..30)
}

fn word() -> impl Strategy<Value = ReducedWord> {
    letters().prop_map(ReducedWord::from_letters)
}

// Plain stack reduction, kept separate from the library's seam logic.
fn reduce(ls: &[Letter]) -> Vec<Letter> {
    let power = |l: Letter| match l {
        Letter::A => (0, 1),
        Letter::B => (1, 1),
        Letter::B2 => (1, 2),
    };
    let mut out: Vec<(u8, u8)> = Vec::new();
    for &l in ls {
        let (g, k) = power(l);
        match out.last_mut() {
            Some((h, j)) if *h == g => {
                let order = if g == 0 { 2 } else { 3 };
                *j = (*j + k) % order;
                if *j == 0 {
                    out.pop();
                }
            }
            _ => out.push((g, k)),
        }
    }
    out.into_iter()
        .map(|(g, k)| match (g, k) {
            (0, _) => Letter::A,
            (_, 1) => Letter::B,
            _ => Letter::B2,
        })
        .collect()
}

proptest! {
    #[test]
    fn inverse_cancels(u in word()) {
        let inv = u.inverse();
        prop_assert!(u.multiply(&inv).is_identity());
        prop_assert!(inv.multiply(&u).is_identity());
        prop_assert_eq!(inv.len(), u.len());
        prop_assert_eq!(u.pi_project().abs(), inv.pi_project().abs());
    }

    #[test]
    fn reduction_matches_stack_model(ls in letters()) {
        let w = ReducedWord::from_letters(ls.clone());
        let want = reduce(&ls);
        prop_assert_eq!(w.letters(), want.as_slice());
    }

    #[test]
    fn multiplication_is_associative(u in word(), v in word(), w in word()) {
        prop_assert_eq!(u.multiply(&v).multiply(&w), u.multiply(&v.multiply(&w)));
    }

    #[test]
    fn display_round_trips(u in word()) {
        prop_assume!(!u.is_identity());
        let s = u.to_string();
        prop_assert_eq!(s.parse::<ReducedWord>().unwrap(), u);
    }

    #[test]
    fn psl_image_is_a_homomorphism(u in word(), v in word(), pi in 0usize..5) {
        let p = [2u32, 3, 5, 7, 13][pi];
        let lhs = psl_image(&u.multiply(&v), p).unwrap();
        let rhs = psl_image(&u, p).unwrap().mul(&psl_image(&v, p).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn swap_b_is_an_involutive_automorphism(u in word(), v in word()) {
        prop_assert_eq!(u.swap_b().swap_b(), u.clone());
        prop_assert_eq!(u.multiply(&v).swap_b(), u.swap_b().multiply(&v.swap_b()));
    }
}

#[test]
fn fiber_sizes_match_enumeration() {
    let words = ball(12, 100_000).unwrap();
    assert_eq!(words.len() as u128, ball_size(12));
    for n in -12i64..=12 {
        let count = words.iter().filter(|w| w.pi_project() == n).count() as u128;
        assert_eq!(count, fiber_size(n), "n = {n}");
    }
}

#[test]
fn group_orders() {
    for p in [2u32, 3, 5, 7, 11, 13] {
        let g = enumerate_psl(p, 10_000).unwrap();
        assert_eq!(g.len() as u128, psl_order(p));
    }
    assert_eq!(psl_order(13), 1092);
}

#[test]
fn generator_relations() {
    for p in [2u32, 3, 5, 7] {
        let a = PslElement::generator(p, Letter::A).unwrap();
        let b = PslElement::generator(p, Letter::B).unwrap();
        let e = PslElement::identity(p).unwrap();
        assert_eq!(a.mul(&a), e);
        assert_eq!(b.mul(&b).mul(&b), e);
        assert_ne!(b, e);
    }
}
