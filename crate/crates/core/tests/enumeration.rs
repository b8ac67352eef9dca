use cubic_census::arith::Factorizer;
use cubic_census::enumerate::{count, count_abs, ClassFilter, CountMode};
use cubic_census::oracle::brute_force_classes;
use cubic_census::Signature;

#[test]
fn enumeration_matches_oracle() {
    for bound in [200u64, 1000, 3000] {
        let oracle = brute_force_classes(bound).unwrap();
        for sig in [Signature::PositiveDisc, Signature::NegativeDisc] {
            let r = count(bound as f64, sig, CountMode::Orders).unwrap();
            assert_eq!(r.raw, oracle.count(sig), "{sig:?} below {bound}");
        }
    }
}

#[test]
fn known_field_counts() {
    // totally real cubic fields with discriminant below 1000
    assert_eq!(count(1000.0, Signature::PositiveDisc, CountMode::Fields).unwrap().raw, 27);
}

#[test]
fn disjoint_ranges_add() {
    let fz = Factorizer::with_table(20_000);
    let f = ClassFilter::fields();
    for sig in [Signature::PositiveDisc, Signature::NegativeDisc] {
        let whole = count_abs(sig, 1, 20_000, &f, &fz).unwrap();
        let lo = count_abs(sig, 1, 7_321, &f, &fz).unwrap();
        let hi = count_abs(sig, 7_322, 20_000, &f, &fz).unwrap();
        assert_eq!(whole.0, lo.0 + hi.0);
        assert_eq!(whole.1, lo.1 + hi.1);
    }
}
