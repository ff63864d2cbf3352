//! Independent oracles and frozen values for the equilibrium, mechanism and
//! benchmark modules.

use simrev_core::benchmarks::{copies_opt, opt_revenue, opt_welfare, single_item_myerson, CopiesInstance, OptOptions};
use simrev_core::duality::{select_beta, single_term, BetaPolicy, DEFAULT_B};
use simrev_core::equilibrium::{BidGrid, Game, SimMechanism, SolverConfig, StrategyProfile, DEFAULT_ENUM_BUDGET};
use simrev_core::instance::{random_instance, scalar_bidder, GeneratorConfig};
use simrev_core::mechanisms::{
    expected_auction, expected_entry_fee, run_entry_fee, AuctionKind, AuctionRule, Bid, BidProfile, EntryAction,
    EntryFeeWrapper,
};
use simrev_core::valuations::Valuation;
use simrev_core::{Instance, ItemSet};

fn instance(bidders: usize, items: usize, seed: u64) -> Instance {
    random_instance(&GeneratorConfig::new(bidders, items), seed).unwrap()
}

/// Every opponent type profile of bidder `i` with its probability.
fn opponent_profiles(inst: &Instance, i: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = vec![(vec![0; inst.bidders()], 1.0)];
    for k in (0..inst.bidders()).filter(|&k| k != i) {
        let model = inst.model(k);
        out = out
            .into_iter()
            .flat_map(|(prof, p)| {
                (0..model.type_count()).map(move |t| {
                    let mut q = prof.clone();
                    q[k] = t;
                    (q, p * model.prob[t])
                })
            })
            .collect();
    }
    out
}

/// Interim utility by direct enumeration of opponent types, opponent mixed
/// strategies and independent per-item tie-breaks.
fn brute_utility(inst: &Instance, kind: AuctionKind, p: &StrategyProfile, i: usize, t: usize, bids: &[Bid]) -> f64 {
    let m = inst.items();
    let mut total = 0.0;
    for (types, pt) in opponent_profiles(inst, i) {
        let mut mixes: Vec<(Vec<Vec<Bid>>, f64)> = vec![(vec![bids.to_vec(); inst.bidders()], 1.0)];
        for k in (0..inst.bidders()).filter(|&k| k != i) {
            mixes = mixes
                .into_iter()
                .flat_map(|(rows, q)| {
                    p.strategies[k][types[k]].support.iter().map(move |(b, w)| {
                        let mut r = rows.clone();
                        r[k] = b.clone();
                        (r, q * w)
                    })
                })
                .collect();
        }
        for (rows, q) in mixes {
            let out = expected_auction(AuctionRule::new(kind), &BidProfile::new(rows).unwrap());
            let win = &out.win[i];
            let mut value = 0.0;
            for s in ItemSet::all(m) {
                let pr: f64 = (0..m).map(|j| if s.contains(j) { win[j] } else { 1.0 - win[j] }).product();
                value += pr * inst.model(i).value(t, s);
            }
            total += pt * q * (value - out.payments[i].iter().sum::<f64>());
        }
    }
    total
}

fn all_bid_vectors(grid: BidGrid, m: usize) -> Vec<Vec<Bid>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v: Vec<Bid>| {
                (0..grid.codes()).map(move |c| {
                    let mut w = v.clone();
                    w.push(grid.bid(c));
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn certificate_matches_brute_force_regret() {
    for (seed, kind) in [(0, AuctionKind::FirstPrice), (1, AuctionKind::AllPay), (2, AuctionKind::SecondPrice)] {
        let inst = instance(2, 2, seed);
        let grid = BidGrid::new(inst.max_single_value() / 4.0, inst.max_single_value()).unwrap();
        let game = Game::new(&inst, SimMechanism::plain(kind), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let cfg = SolverConfig {
            max_iters: 3,
            seed,
            random_start: true,
            ..SolverConfig::default()
        };
        let p = game.solve(&cfg, None).unwrap().profile;
        let cert = game.certificate(&p).unwrap();
        let vectors = all_bid_vectors(grid, inst.items());
        let mut eps: f64 = 0.0;
        for i in 0..inst.bidders() {
            for t in 0..inst.model(i).type_count() {
                let played: f64 = p.strategies[i][t]
                    .support
                    .iter()
                    .map(|(b, w)| w * brute_utility(&inst, kind, &p, i, t, b))
                    .sum();
                let best = vectors
                    .iter()
                    .map(|b| brute_utility(&inst, kind, &p, i, t, b))
                    .fold(f64::NEG_INFINITY, f64::max);
                let entry = cert.entries.iter().find(|e| e.bidder == i && e.type_index == t).unwrap();
                assert!((entry.utility - played).abs() < 1e-9, "seed {seed} i {i} t {t}");
                assert!((entry.best_response_utility - best).abs() < 1e-9, "seed {seed} i {i} t {t}");
                eps = eps.max(best - played);
            }
        }
        assert!((cert.epsilon - eps).abs() < 1e-9);
    }
}

#[test]
fn interim_utility_matches_brute_force() {
    let inst = instance(2, 2, 5);
    let grid = BidGrid::new(inst.max_single_value() / 3.0, inst.max_single_value()).unwrap();
    let game = Game::new(&inst, SimMechanism::plain(AuctionKind::FirstPrice), grid, DEFAULT_ENUM_BUDGET).unwrap();
    let cfg = SolverConfig {
        max_iters: 2,
        random_start: true,
        ..SolverConfig::default()
    };
    let p = game.solve(&cfg, None).unwrap().profile;
    for bids in all_bid_vectors(grid, 2) {
        let a = game.interim_utility(&p, 0, 0, &bids).unwrap();
        let b = brute_utility(&inst, AuctionKind::FirstPrice, &p, 0, 0, &bids);
        assert!((a - b).abs() < 1e-9, "{bids:?}");
    }
}

fn action(enter: bool, bid: f64) -> EntryAction {
    EntryAction {
        enter,
        bids: vec![Bid::Amount(bid)],
    }
}

#[test]
fn entry_fee_frozen_values() {
    let w = EntryFeeWrapper::new(AuctionRule::new(AuctionKind::FirstPrice), vec![2.0, 1.0], 0.25).unwrap();
    // The high bidder always enters and pays 3; the fee is charged w.p. 0.75.
    let out = expected_entry_fee(&w, &[action(true, 3.0), action(false, 1.0)]).unwrap();
    assert!((out.revenue() - 4.5).abs() < 1e-12);
    assert_eq!(out.fees, vec![1.5, 0.0]);
    // A refusing high bidder takes the item only when waived; nothing is reallocated.
    let out = expected_entry_fee(&w, &[action(false, 3.0), action(true, 1.0)]).unwrap();
    assert!((out.revenue() - (0.75 + 0.75)).abs() < 1e-12);
    assert!((out.win[0][0] - 0.25).abs() < 1e-12);
    assert_eq!(out.win[1][0], 0.0);
}

#[test]
fn entry_fee_expectation_matches_simulation() {
    let w = EntryFeeWrapper::new(AuctionRule::new(AuctionKind::SecondPrice), vec![1.0, 0.5, 2.0], 0.3).unwrap();
    let actions = [action(false, 2.0), action(true, 2.0), action(true, 1.0)];
    let exact = expected_entry_fee(&w, &actions).unwrap().revenue();
    let samples = 20_000;
    let draws: Vec<f64> = (0..samples)
        .map(|s| run_entry_fee(&w, &actions, s).unwrap().revenue())
        .collect();
    let mean = draws.iter().sum::<f64>() / samples as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    assert!((mean - exact).abs() <= 4.0 * (var / samples as f64).sqrt() + 1e-12);
}

/// Revenue of sequential posted prices: bidders in index order each buy the
/// utility-maximizing bundle of the remaining items at prices `p`.
fn posted_price_revenue(inst: &Instance, prices: &[f64]) -> f64 {
    let m = inst.items();
    inst.profiles()
        .into_iter()
        .map(|(types, prob)| {
            let mut left = ItemSet::full(m);
            let mut revenue = 0.0;
            for (i, &t) in types.iter().enumerate() {
                let price = |s: ItemSet| s.iter().map(|j| prices[j]).sum::<f64>();
                let best = left
                    .subsets()
                    .max_by(|a, b| {
                        let ua = inst.model(i).value(t, *a) - price(*a);
                        let ub = inst.model(i).value(t, *b) - price(*b);
                        ua.total_cmp(&ub).then(b.bits().cmp(&a.bits()))
                    })
                    .unwrap();
                revenue += price(best);
                left = left.minus(best);
            }
            prob * revenue
        })
        .sum()
}

#[test]
fn posted_prices_bound_optimal_revenue_from_below() {
    for seed in 0..6 {
        let inst = instance(1 + (seed % 2) as usize, 2, 40 + seed);
        let opt = opt_revenue(&inst, OptOptions::default()).unwrap().value;
        let welfare = opt_welfare(&inst, OptOptions::default().budget).unwrap();
        assert!(opt <= welfare + 1e-9);
        let atoms: Vec<Vec<f64>> = (0..2)
            .map(|j| {
                let mut v: Vec<f64> = inst.models().iter().flat_map(|md| md.single[j].clone()).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            })
            .collect();
        for &p0 in &atoms[0] {
            for &p1 in &atoms[1] {
                let r = posted_price_revenue(&inst, &[p0, p1]);
                assert!(r <= opt + 1e-9, "seed {seed} prices {p0},{p1}: {r} > {opt}");
            }
        }
    }
}

#[test]
fn myerson_frozen_values() {
    let one = Instance::new(vec![scalar_bidder(vec![vec![1.0, 3.0]], vec![vec![0.5, 0.5]], Valuation::Additive).unwrap()])
        .unwrap();
    assert!((single_item_myerson(&one, 0).unwrap() - 1.5).abs() < 1e-12);
    assert!((opt_revenue(&one, OptOptions::default()).unwrap().value - 1.5).abs() < 1e-9);
    // Two bidders uniform on {1, 2}: virtual values 0 and 2.
    let b = || scalar_bidder(vec![vec![1.0, 2.0]], vec![vec![0.5, 0.5]], Valuation::Additive).unwrap();
    let two = Instance::new(vec![b(), b()]).unwrap();
    assert!((single_item_myerson(&two, 0).unwrap() - 1.5).abs() < 1e-12);
    let exact = opt_revenue(&two, OptOptions { exact_rational: true, ..OptOptions::default() }).unwrap();
    assert!(exact.exact);
    assert!((exact.value - 1.5).abs() < 1e-12);
}

#[test]
fn additive_single_bidder_opt_is_sum_of_monopoly_prices() {
    let inst = Instance::new(vec![scalar_bidder(
        vec![vec![1.0, 3.0], vec![2.0, 4.0, 5.0]],
        vec![vec![0.5, 0.5], vec![0.2, 0.5, 0.3]],
        Valuation::Additive,
    )
    .unwrap()])
    .unwrap();
    // Item 0: max(1, 1.5); item 1: max(2, 3.2, 1.5).
    let opt = opt_revenue(&inst, OptOptions::default()).unwrap().value;
    assert!((opt - 4.7).abs() < 1e-9);
}

#[test]
fn copies_bound_the_single_term() {
    for seed in 0..4 {
        let inst = instance(2, 2, 60 + seed);
        let opt = opt_revenue(&inst, OptOptions::default()).unwrap();
        let beta = select_beta(&inst, &opt.pi, DEFAULT_B, BetaPolicy::TieBreak).unwrap();
        let single = single_term(&inst, &opt.pi, &beta).unwrap();
        let copies = copies_opt(&CopiesInstance::from_instance(&inst), OptOptions::default().budget).unwrap();
        assert!(single <= copies.value + 1e-9, "seed {seed}: {single} > {}", copies.value);
    }
}
