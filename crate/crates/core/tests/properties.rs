use fibspace_core::compactness::{
    hmnc_estimate, operator_norm_linf, tail_norm, CompactParams, CompactTarget, TailKind,
};
use fibspace_core::kernel::Kernel;
use fibspace_core::matrices::MatrixOracle;
use fibspace_core::numerics::{frac, int, parse_rational, render, Lambda, Rational, Truncation, Verdict};
use fibspace_core::spaces::{fbar_prefix, inverse_prefix, space_norm, SequenceOracle};
use fibspace_core::spec::{lambda_to_json, parse_lambda};
use num_traits::Signed;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..=1000, 1i64..=97).prop_map(|(p, q)| frac(p, q))
}

fn table(max_len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), 1..=max_len)
}

fn lambda() -> impl Strategy<Value = Lambda> {
    prop_oneof![
        Just(Lambda::linear()),
        (1i64..=5, 1i64..=4).prop_map(|(a, b)| Lambda::affine(int(a), int(b)).unwrap()),
        (2i64..=4).prop_map(|r| Lambda::geometric(int(r)).unwrap()),
    ]
}

fn sparse() -> impl Strategy<Value = MatrixOracle> {
    prop::collection::vec((0usize..10, 0usize..10, rational()), 1..=8).prop_map(MatrixOracle::sparse)
}

fn shallow(depth: usize) -> CompactParams {
    CompactParams { trunc: Truncation::default().with_depth(depth), ..CompactParams::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rational_strings_round_trip(v in rational()) {
        prop_assert_eq!(parse_rational(&render(&v)).unwrap(), v);
    }

    #[test]
    fn lambda_documents_round_trip(lam in lambda()) {
        prop_assert_eq!(parse_lambda(&lambda_to_json(&lam).to_string()).unwrap(), lam);
    }

    #[test]
    fn transform_inverts_and_preserves_norm(y in table(12), lam in lambda()) {
        let last = 20;
        let x = SequenceOracle::table(inverse_prefix(&SequenceOracle::table(y.clone()), &lam, last).unwrap());
        let back = fbar_prefix(&x, &lam, last).unwrap();
        for (n, v) in back.iter().enumerate() {
            prop_assert_eq!(v, &y.get(n).cloned().unwrap_or_else(|| int(0)));
        }
        let norm = space_norm(&x, &lam, &Truncation::default().with_depth(last)).unwrap();
        prop_assert_eq!(norm.value, y.iter().map(|v| v.abs()).max().unwrap());
    }

    #[test]
    fn kernel_row_matches_entrywise_sums(a in table(10), lam in lambda()) {
        let k = Kernel::new(&lam);
        let row = k.abar_row(&a);
        let m = a.len() - 1;
        for (i, v) in row.iter().enumerate() {
            prop_assert_eq!(v, &k.abar_entry(&a, i, m));
        }
    }

    #[test]
    fn tail_norms_decrease_and_stay_below_the_norm(a in sparse()) {
        let lam = Lambda::linear();
        let p = shallow(24);
        let norm = operator_norm_linf(&a, &lam, &p.trunc).unwrap().value;
        let mut prev: Option<Rational> = None;
        for m in 0..=8 {
            let v = tail_norm(&a, &lam, m, TailKind::LinfLike, &p).unwrap();
            prop_assert!(v <= norm);
            if let Some(q) = &prev {
                prop_assert!(v <= *q);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn finite_rank_tails_vanish_and_sandwich_holds(a in sparse()) {
        let lam = Lambda::linear();
        let p = shallow(24);
        let last = a.zero_rows_from().unwrap();
        for kind in [TailKind::LinfLike, TailKind::L1, TailKind::Bv] {
            // Bv differences reach one row further.
            let from = if kind == TailKind::Bv { last } else { last.saturating_sub(1) };
            prop_assert_eq!(tail_norm(&a, &lam, from, kind, &p).unwrap(), int(0));
        }
        let c = hmnc_estimate(&a, &lam, CompactTarget::C, &p).unwrap();
        prop_assert_eq!(c.lower.clone() * int(2), c.upper.clone());
        let c0 = hmnc_estimate(&a, &lam, CompactTarget::C0, &p).unwrap();
        prop_assert!(c.lower <= c0.upper && c0.upper <= c.upper);
    }

    #[test]
    fn conjunction_is_no_stronger_than_its_parts(flags in prop::collection::vec(0u8..5, 1..6)) {
        let parts: Vec<Verdict> = flags.iter().map(|f| match f {
            0 => Verdict::certified_true(),
            1 => Verdict::certified_false(),
            2 => Verdict::empirical_true(10),
            3 => Verdict::empirical_false(10, None),
            _ => Verdict::indeterminate(Some(10)),
        }).collect();
        let all = Verdict::all(parts.iter());
        prop_assert_eq!(all.is_true(), parts.iter().all(Verdict::is_true));
        if all.is_certified() && all.is_true() {
            prop_assert!(parts.iter().all(Verdict::is_certified));
        }
    }
}
