//! Property tests for invariants across the crate.

use proptest::prelude::*;
use simrev_core::benchmarks::{ironed_curve, opt_revenue, OptOptions};
use simrev_core::duality::{concentration_check, inf_median, select_beta, BetaPolicy, DEFAULT_B};
use simrev_core::equilibrium::{BidGrid, Game, MixedBid, SimMechanism, StrategyProfile, DEFAULT_ENUM_BUDGET};
use simrev_core::instance::{random_instance, Atom, GeneratorConfig};
use simrev_core::lp::{LinearProgram, Relation};
use simrev_core::mechanisms::{
    expected_auction, expected_entry_fee, run_auction, AuctionKind, AuctionRule, Bid, BidProfile, EntryAction,
    EntryFeeWrapper,
};
use simrev_core::valuations::{lipschitz_constant, verify_axioms};
use simrev_core::{Instance, ItemSet};

fn instance(bidders: usize, items: usize, seed: u64) -> Instance {
    random_instance(&GeneratorConfig::new(bidders, items), seed).unwrap()
}

fn kind() -> impl Strategy<Value = AuctionKind> {
    prop_oneof![
        Just(AuctionKind::FirstPrice),
        Just(AuctionKind::SecondPrice),
        Just(AuctionKind::AllPay)
    ]
}

fn bid() -> impl Strategy<Value = Bid> {
    prop_oneof![1 => Just(Bid::Abstain), 4 => (0u32..5).prop_map(|k| Bid::Amount(k as f64))]
}

fn bid_rows(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<Bid>>> {
    prop::collection::vec(prop::collection::vec(bid(), m), n)
}

/// A pure profile drawn from grid codes.
fn pure_profile(inst: &Instance, grid: BidGrid, codes: &[usize]) -> StrategyProfile {
    let mut k = 0;
    let strategies = inst
        .models()
        .iter()
        .map(|md| {
            (0..md.type_count())
                .map(|_| {
                    let bids = (0..inst.items())
                        .map(|_| {
                            k += 1;
                            grid.bid(codes[k % codes.len()] % grid.codes())
                        })
                        .collect();
                    MixedBid::pure(bids)
                })
                .collect()
        })
        .collect();
    StrategyProfile { grid, strategies }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn set_algebra(a in 0u32..256, b in 0u32..256) {
        let (x, y) = (ItemSet(a), ItemSet(b));
        prop_assert_eq!(x.union(y).len() + x.intersect(y).len(), x.len() + y.len());
        prop_assert!(x.minus(y).is_subset_of(x));
        prop_assert!(x.minus(y).intersect(y).is_empty());
        prop_assert_eq!(x.symmetric_difference(y), x.union(y).minus(x.intersect(y)));
        prop_assert_eq!(x.subsets().count(), 1 << x.len());
    }

    #[test]
    fn generated_valuations_satisfy_axioms(seed in 0u64..10_000, n in 1usize..3, m in 1usize..4) {
        let inst = instance(n, m, seed);
        for i in 0..n {
            let spec = inst.spec(i);
            prop_assert!(verify_axioms(&spec.valuation, &spec.space, m).unwrap().passed());
        }
    }

    #[test]
    fn concentration_holds_for_generated_functions(seed in 0u64..10_000, m in 1usize..4) {
        let inst = instance(1, m, seed);
        let spec = inst.spec(0);
        let ell = lipschitz_constant(&spec.valuation, &spec.space).unwrap();
        let md = inst.model(0);
        for set in ItemSet::all(m) {
            let atoms: Vec<(f64, f64)> = (0..md.type_count()).map(|t| (md.value(t, set), md.prob[t])).collect();
            let c = concentration_check("c", &atoms, ell);
            prop_assert!(c.passed, "{:?}", c);
        }
    }

    #[test]
    fn expected_auction_is_the_tie_average(k in kind(), rows in bid_rows(3, 2)) {
        let b = BidProfile::new(rows.clone()).unwrap();
        let rule = AuctionRule::new(k);
        let exp = expected_auction(rule, &b);
        for j in 0..2 {
            let total: f64 = (0..3).map(|i| exp.win[i][j]).sum();
            let any = rows.iter().any(|r| r[j] != Bid::Abstain);
            let sold = if any { 1.0 } else { 0.0 };
            prop_assert!((total - sold).abs() < 1e-12);
        }
        let revenues: Vec<f64> = (0..64).map(|s| run_auction(rule, &b, s).revenue()).collect();
        let lo = revenues.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = revenues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(exp.revenue() >= lo - 1e-12 && exp.revenue() <= hi + 1e-12);
    }

    #[test]
    fn entry_fees_add_charged_fees(
        k in kind(),
        rows in bid_rows(2, 2),
        fees in prop::collection::vec(0.0f64..5.0, 2),
        delta in 0.05f64..0.95,
    ) {
        let w = EntryFeeWrapper::new(AuctionRule::new(k), fees.clone(), delta).unwrap();
        let actions: Vec<EntryAction> = rows.iter().map(|r| EntryAction { enter: true, bids: r.clone() }).collect();
        let base = expected_auction(AuctionRule::new(k), &BidProfile::new(rows).unwrap()).revenue();
        let out = expected_entry_fee(&w, &actions).unwrap();
        let want = base + (1.0 - delta) * fees.iter().sum::<f64>();
        prop_assert!((out.revenue() - want).abs() < 1e-9);
    }

    #[test]
    fn grid_codes_round_trip(steps in 1usize..40, cap in 0.5f64..20.0) {
        let grid = BidGrid::new(cap / steps as f64, cap).unwrap();
        for c in 0..grid.codes() {
            prop_assert_eq!(grid.code_of(grid.bid(c)).unwrap(), c);
        }
    }

    #[test]
    fn inf_median_splits_mass(values in prop::collection::vec((0u32..10, 1u32..10), 1..6)) {
        let total: f64 = values.iter().map(|v| v.1 as f64).sum();
        let atoms: Vec<(f64, f64)> = values.iter().map(|&(v, w)| (v as f64, w as f64 / total)).collect();
        let med = inf_median(&atoms);
        let below: f64 = atoms.iter().filter(|a| a.0 < med).map(|a| a.1).sum();
        let at_most: f64 = atoms.iter().filter(|a| a.0 <= med).map(|a| a.1).sum();
        prop_assert!(at_most >= 0.5 - 1e-12);
        prop_assert!(below < 0.5 + 1e-12);
    }

    #[test]
    fn ironed_curve_is_concave_and_dominates(values in prop::collection::vec((0u32..10, 1u32..10), 1..6)) {
        let total: f64 = values.iter().map(|v| v.1 as f64).sum();
        let atoms: Vec<Atom> = values.iter().map(|&(v, w)| Atom { value: v as f64, prob: w as f64 / total }).collect();
        let curve = ironed_curve(&atoms).unwrap();
        for (q, r) in curve.quantiles.iter().zip(&curve.revenue) {
            prop_assert!(curve.eval(*q) >= r - 1e-9);
        }
        let pts: Vec<f64> = (0..=20).map(|k| curve.eval(k as f64 / 20.0)).collect();
        for w in pts.windows(3) {
            prop_assert!(w[0] + w[2] <= 2.0 * w[1] + 1e-9);
        }
    }

    #[test]
    fn float_and_exact_lp_agree(
        a in prop::collection::vec(prop::collection::vec(0u32..5, 3), 1..4),
        b in prop::collection::vec(1u32..10, 3),
        c in prop::collection::vec(-3i32..6, 3),
    ) {
        let mut lp = LinearProgram::new();
        for (k, &ck) in c.iter().enumerate() {
            lp.add_var(format!("x{k}"), ck as f64);
        }
        for (r, row) in a.iter().enumerate() {
            let coeffs = row.iter().enumerate().map(|(k, &v)| (k, v as f64)).collect();
            lp.add_constraint(format!("r{r}"), coeffs, Relation::Le, b[r % b.len()] as f64);
        }
        for k in 0..3 {
            lp.add_constraint(format!("cap{k}"), vec![(k, 1.0)], Relation::Le, 4.0);
        }
        let float = lp.solve().unwrap();
        let exact = simrev_core::lp::to_f64_solution(&lp.solve_exact().unwrap());
        prop_assert!((float.objective - exact.objective).abs() < 1e-9);
        prop_assert!(lp.max_violation(&float.x) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn invariance_holds_off_equilibrium(
        seed in 0u64..1000,
        codes in prop::collection::vec(0usize..64, 8),
        fees in prop::collection::vec(0.0f64..8.0, 2),
        delta in 0.05f64..0.95,
    ) {
        let inst = instance(2, 2, seed);
        let grid = BidGrid::new(inst.max_single_value().max(1.0) / 4.0, inst.max_single_value().max(1.0)).unwrap();
        let game = Game::new(&inst, SimMechanism::plain(AuctionKind::FirstPrice), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let p = pure_profile(&inst, grid, &codes);
        let r = game.check_entry_fee_invariance(&p, &fees, delta).unwrap();
        prop_assert!(r.passed && r.bounds_hold && r.max_abs_error <= 1e-9, "{:?}", r);
    }

    #[test]
    fn tie_break_beta_verifies(seed in 0u64..10_000) {
        let inst = instance(2, 2, seed);
        let opt = opt_revenue(&inst, OptOptions::default()).unwrap();
        let beta = select_beta(&inst, &opt.pi, DEFAULT_B, BetaPolicy::TieBreak).unwrap();
        prop_assert!(beta.verified());
    }

    #[test]
    fn upward_shift_never_lowers_opt(seed in 0u64..10_000, shift in 0.0f64..3.0) {
        let inst = instance(2, 2, seed);
        let a = opt_revenue(&inst, OptOptions::default()).unwrap().value;
        let b = opt_revenue(&inst.shifted(shift).unwrap(), OptOptions::default()).unwrap().value;
        prop_assert!(b >= a / 229.0 - 1e-9);
    }
}
