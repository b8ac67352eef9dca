use proptest::prelude::*;

use cubic_census::enumerate::root_count_w;
use cubic_census::local::{splitting_symbol, SplittingSymbol};
use cubic_census::reduce::canonical_form;
use cubic_census::rings::{automorphism_count, ring_from_form, CubicRingTable};
use cubic_census::{BinaryCubicForm, RingElement, UnimodularMatrix};

fn generator(i: u8) -> UnimodularMatrix {
    match i % 4 {
        0 => UnimodularMatrix::translation(1),
        1 => UnimodularMatrix::translation(-1),
        2 => UnimodularMatrix::inversion(),
        _ => UnimodularMatrix::reflection(),
    }
}

fn word(gens: &[u8]) -> UnimodularMatrix {
    gens.iter().fold(UnimodularMatrix::identity(), |acc, &g| acc.mul(&generator(g)).unwrap())
}

fn form() -> impl Strategy<Value = BinaryCubicForm> {
    (-12i64..=12, -12i64..=12, -12i64..=12, -12i64..=12).prop_map(|(a, b, c, d)| BinaryCubicForm::new(a, b, c, d))
}

fn irreducible() -> impl Strategy<Value = BinaryCubicForm> {
    form().prop_filter("irreducible", |f| f.discriminant().unwrap() != 0 && f.is_irreducible().unwrap())
}

fn element() -> impl Strategy<Value = RingElement> {
    prop::array::uniform3(-9i128..=9).prop_map(RingElement)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn canonical_form_is_a_class_invariant(f in irreducible(), gens in prop::collection::vec(0u8..4, 0..=12)) {
        let g = word(&gens);
        let moved = f.act(&g).unwrap();
        prop_assert_eq!(moved.discriminant().unwrap(), f.discriminant().unwrap());
        let c = canonical_form(&f).unwrap();
        prop_assert_eq!(canonical_form(&moved).unwrap(), c);
        prop_assert_eq!(canonical_form(&c).unwrap(), c);
        prop_assert_eq!(automorphism_count(&moved).unwrap(), automorphism_count(&f).unwrap());
    }

    #[test]
    fn hessian_discriminant_is_minus_three_disc(f in form()) {
        let h = f.hessian().unwrap();
        prop_assert_eq!(h.discriminant().unwrap(), -3 * f.discriminant().unwrap());
    }

    #[test]
    fn ring_discriminant_equals_form_discriminant(f in form()) {
        prop_assert_eq!(ring_from_form(&f).discriminant().unwrap(), f.discriminant().unwrap());
    }

    #[test]
    fn ring_multiplication_is_associative_and_commutative(f in form(), u in element(), v in element(), w in element()) {
        let t = ring_from_form(&f);
        let uv = t.multiply(&u, &v).unwrap();
        prop_assert_eq!(uv, t.multiply(&v, &u).unwrap());
        let left = t.multiply(&uv, &w).unwrap();
        let right = t.multiply(&u, &t.multiply(&v, &w).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn root_weights_are_class_invariant_and_multiplicative(f in irreducible(), gens in prop::collection::vec(0u8..4, 0..=12)) {
        prop_assume!(f.content() % 2 != 0 && f.content() % 3 != 0);
        let moved = f.act(&word(&gens)).unwrap();
        for n in [2u64, 3, 5, 6, 30] {
            if f.content() % 5 == 0 && n % 5 == 0 {
                continue;
            }
            prop_assert_eq!(root_count_w(&moved, n).unwrap(), root_count_w(&f, n).unwrap());
        }
        prop_assert_eq!(root_count_w(&f, 6).unwrap(), root_count_w(&f, 2).unwrap() * root_count_w(&f, 3).unwrap());
    }
}

/// Idempotents and nilpotents of `R(f)/pR(f)`, by exhaustion.
fn idempotents_and_nilpotents(t: &CubicRingTable, p: i128) -> (usize, usize) {
    let reduce = |x: RingElement| RingElement(x.0.map(|c| c.rem_euclid(p)));
    let (mut idem, mut nil) = (0, 0);
    for i in 0..p * p * p {
        let x = RingElement([i % p, (i / p) % p, i / (p * p)]);
        let x2 = reduce(t.multiply(&x, &x).unwrap());
        if x2 == x {
            idem += 1;
        }
        if reduce(t.multiply(&x2, &x).unwrap()) == RingElement::default() {
            nil += 1;
        }
    }
    (idem, nil)
}

#[test]
fn residue_algebra_matches_splitting_symbol() {
    let expected = |s: SplittingSymbol, p: usize| match s {
        SplittingSymbol::S111 => (8, 1),
        SplittingSymbol::S12 => (4, 1),
        SplittingSymbol::S3 => (2, 1),
        SplittingSymbol::S1sq1 => (4, p),
        SplittingSymbol::S1cube => (2, p * p),
        SplittingSymbol::Degenerate => unreachable!(),
    };
    for p in [2u64, 3, 5] {
        let mut seen = std::collections::BTreeSet::new();
        for a in 0..p as i64 {
            for b in 0..p as i64 {
                for c in 0..p as i64 {
                    for d in 0..p as i64 {
                        let f = BinaryCubicForm::new(a, b, c, d);
                        let s = splitting_symbol(&f, p);
                        if s == SplittingSymbol::Degenerate {
                            continue;
                        }
                        seen.insert(s);
                        let got = idempotents_and_nilpotents(&ring_from_form(&f), p as i128);
                        assert_eq!(got, expected(s, p as usize), "{f} mod {p}: {s}");
                    }
                }
            }
        }
        assert_eq!(seen.len(), 5);
    }
}
