use cubic_census::asymptotics::{residual_report, CountKind};
use cubic_census::enumerate::{classes, count, verify_switching, weighted_count_s, ClassFilter, CountMode};
use cubic_census::local::{count_p1_roots, LocalCondition, LocalMode};
use cubic_census::oracle::brute_force_classes;
use cubic_census::quadratic::{three_torsion_average, verify_l4eq};
use cubic_census::Signature;

const SIGS: [Signature; 2] = [Signature::PositiveDisc, Signature::NegativeDisc];

#[test]
fn small_counts() {
    assert_eq!(count(23.5, Signature::NegativeDisc, CountMode::Fields).unwrap().raw, 1);
    assert_eq!(count(23.0, Signature::NegativeDisc, CountMode::Fields).unwrap().raw, 0);
    assert_eq!(count(100.0, Signature::PositiveDisc, CountMode::Fields).unwrap().raw, 2);
    let cyclic = classes(0, 50, &ClassFilter::fields()).unwrap();
    assert_eq!(cyclic.len(), 1);
    assert_eq!((cyclic.records[0].disc, cyclic.records[0].aut), (49, 3));
    let first = classes(-24, 0, &ClassFilter::fields()).unwrap();
    assert_eq!(first.records.iter().map(|r| r.disc).collect::<Vec<_>>(), vec![-23]);
}

#[test]
fn filters_are_monotone_and_any_ring_is_neutral() {
    for sig in SIGS {
        let orders = count(20_000.0, sig, CountMode::Orders).unwrap();
        let fields = count(20_000.0, sig, CountMode::Fields).unwrap();
        let ntr = count(20_000.0, sig, CountMode::NowhereTotRam).unwrap();
        assert!(ntr.raw <= fields.raw && fields.raw <= orders.raw);
        assert!(orders.weighted <= num_rational::Rational64::from_integer(orders.raw as i64));
    }
    let any = ClassFilter::orders()
        .with_local(LocalCondition::new(2, LocalMode::AnyRing))
        .with_local(LocalCondition::new(3, LocalMode::AnyRing));
    assert_eq!(classes(-5000, 5000, &any).unwrap().len(), classes(-5000, 5000, &ClassFilter::orders()).unwrap().len());
}

#[test]
fn root_weighted_count_matches_oracle() {
    let oracle = brute_force_classes(100).unwrap();
    for sig in SIGS {
        let expected: u64 = oracle
            .representatives
            .iter()
            .filter(|f| Signature::of_disc(f.discriminant().unwrap()) == Some(sig))
            .map(|f| if f.content() % 2 == 0 { 3 } else { count_p1_roots(f, 2).unwrap() as u64 })
            .sum();
        let s = weighted_count_s(2, 100, sig).unwrap();
        assert_eq!(s.raw, expected, "{sig:?}");
        assert!(s.raw <= 3 * oracle.count(sig));
    }
}

#[test]
fn switching_mass_residual_vanishes() {
    for p in [2u64, 3, 5] {
        for sig in SIGS {
            let r = verify_switching(p, 10_000, sig).unwrap();
            assert_eq!(*r.residual_mass.numer(), 0, "p={p} {sig:?}: {r:?}");
        }
    }
}

#[test]
fn three_torsion_identity_and_average() {
    for sig in SIGS {
        let l = verify_l4eq(10_000, sig).unwrap();
        assert_eq!(l.residual, 0);
        let avg = three_torsion_average(10_000, sig).unwrap();
        assert!(avg.agree());
    }
}

#[test]
fn forms_first_term_error_shape_is_bounded() {
    for sig in SIGS {
        let rep = residual_report(&[1e4, 1e5, 1e6], CountKind::Forms, sig).unwrap();
        for r in &rep.rows {
            assert!(r.scaled_5_6[0].abs() < 1.5, "{r:?}");
        }
    }
}

#[test]
fn full_symbol_set_is_local_maximality() {
    for p in [2u64, 3] {
        let all = ClassFilter::parse(&format!("p{p}:split=111|12|3|1^21|1^3")).unwrap();
        let maximal = ClassFilter::parse(&format!("p{p}:maximal")).unwrap();
        let a = classes(-5000, 5000, &all).unwrap();
        let m = classes(-5000, 5000, &maximal).unwrap();
        assert_eq!(a.len(), m.len(), "p={p}");
        assert!(a.len() < classes(-5000, 5000, &ClassFilter::orders()).unwrap().len());
    }
}
