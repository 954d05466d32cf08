use barnes_zeta::params::denumerant_table;
use barnes_zeta::{
    analyze_weights, denumerant, parse_weight_list, DeclaredMode, WeightLiteral, WeightStructure,
};
use num_rational::Ratio;
use proptest::prelude::*;

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[test]
fn stars_and_bars() {
    for r in 1..=5usize {
        let table = denumerant_table(&vec![1; r], 30).unwrap();
        let mut running = 0u128;
        for (k, &v) in table.iter().enumerate() {
            running += v;
            assert_eq!(
                running,
                binomial(k as u64 + r as u64, r as u64),
                "r={r} K={k}"
            );
        }
    }
}

#[test]
fn cli_style_lists() {
    let w = parse_weight_list("1/2, 3/4").unwrap();
    assert_eq!(
        analyze_weights(&w, None).unwrap(),
        WeightStructure::Rational {
            q: 4,
            p: vec![2, 3]
        }
    );
    let w = parse_weight_list("1,1.41421356").unwrap();
    assert_eq!(
        analyze_weights(&w, None).unwrap(),
        WeightStructure::AssumedIndependent
    );
    assert!(analyze_weights(&w, Some(DeclaredMode::Rational)).is_err());
}

proptest! {
    #[test]
    fn zero_has_one_representation(p in prop::collection::vec(1u64..20, 1..6)) {
        prop_assert_eq!(denumerant(&p, 0).unwrap(), 1);
    }

    #[test]
    fn order_of_parts_is_irrelevant(p in prop::collection::vec(1u64..8, 1..5), k in 0u64..80) {
        let mut rev = p.clone();
        rev.reverse();
        prop_assert_eq!(denumerant(&p, k).unwrap(), denumerant(&rev, k).unwrap());
    }

    #[test]
    fn rescaling_scales_the_structure(
        nums in prop::collection::vec(1u64..30, 1..4),
        dens in prop::collection::vec(1u64..30, 4),
        cn in 1u64..12, cd in 1u64..12,
    ) {
        let w: Vec<Ratio<u64>> = nums.iter().zip(&dens).map(|(&n, &d)| Ratio::new(n, d)).collect();
        let c = Ratio::new(cn, cd);
        let lit = |v: &[Ratio<u64>]| v.iter().map(|&r| WeightLiteral::Exact(r)).collect::<Vec<_>>();
        let scaled: Vec<Ratio<u64>> = w.iter().map(|&r| r * c).collect();
        let (WeightStructure::Rational { q, p }, WeightStructure::Rational { q: q2, p: p2 }) =
            (analyze_weights(&lit(&w), None).unwrap(), analyze_weights(&lit(&scaled), None).unwrap())
        else {
            panic!("exact weights must be rational");
        };
        for i in 0..w.len() {
            prop_assert_eq!(Ratio::new(p[i], q), w[i]);
            prop_assert_eq!(Ratio::new(p2[i], q2), Ratio::new(p[i], q) * c);
        }
    }
}
