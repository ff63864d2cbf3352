//! Simultaneous single-item auctions and the entry-fee and reserve-price
//! wrappers around them.

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Bids closer than this are treated as tied.
pub const BID_TOL: f64 = 1e-12;

/// A bid on one item: an amount, or the null action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bid {
    Abstain,
    Amount(f64),
}

impl Bid {
    pub fn amount(self) -> Option<f64> {
        match self {
            Bid::Abstain => None,
            Bid::Amount(x) => Some(x),
        }
    }
}

/// Bids indexed by `(bidder, item)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidProfile {
    bids: Vec<Vec<Bid>>,
}

impl BidProfile {
    pub fn new(bids: Vec<Vec<Bid>>) -> Result<Self> {
        let m = bids.first().map_or(0, Vec::len);
        for (i, row) in bids.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidArgument(format!(
                    "bidder {i} bids on {} items, expected {m}",
                    row.len()
                )));
            }
            for b in row {
                if let Bid::Amount(x) = b {
                    if !(x.is_finite() && *x >= 0.0) {
                        return Err(Error::InvalidArgument(format!("bid {x} is not a valid amount")));
                    }
                }
            }
        }
        Ok(BidProfile { bids })
    }

    pub fn bidders(&self) -> usize {
        self.bids.len()
    }

    pub fn items(&self) -> usize {
        self.bids.first().map_or(0, Vec::len)
    }

    pub fn bid(&self, i: usize, j: usize) -> Bid {
        self.bids[i][j]
    }

    pub fn row(&self, i: usize) -> &[Bid] {
        &self.bids[i]
    }

    fn column(&self, j: usize) -> Vec<Bid> {
        self.bids.iter().map(|r| r[j]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuctionKind {
    FirstPrice,
    SecondPrice,
    AllPay,
}

/// A simultaneous auction: one single-item auction of `kind` per item, ties
/// broken uniformly at random.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuctionRule {
    pub kind: AuctionKind,
}

impl AuctionRule {
    pub fn new(kind: AuctionKind) -> Self {
        AuctionRule { kind }
    }
}

/// A realized outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub winners: Vec<Option<usize>>,
    /// `payments[i][j] = p_i^{(j)}`.
    pub payments: Vec<Vec<f64>>,
}

impl Outcome {
    /// `X_i(b)` as a list of items.
    pub fn allocation(&self, i: usize) -> Vec<usize> {
        self.winners
            .iter()
            .enumerate()
            .filter(|(_, w)| **w == Some(i))
            .map(|(j, _)| j)
            .collect()
    }

    /// `p_i(b)`.
    pub fn total_payment(&self, i: usize) -> f64 {
        self.payments[i].iter().sum()
    }

    pub fn revenue(&self) -> f64 {
        self.payments.iter().flatten().sum()
    }
}

/// Outcome averaged analytically over tie-breaking (and entry coins).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedOutcome {
    /// `win[i][j]`: probability that `i` receives `j`.
    pub win: Vec<Vec<f64>>,
    /// Expected per-item payments.
    pub payments: Vec<Vec<f64>>,
    /// Expected entry fees collected per bidder.
    pub fees: Vec<f64>,
}

impl ExpectedOutcome {
    pub fn revenue(&self) -> f64 {
        self.payments.iter().flatten().sum::<f64>() + self.fees.iter().sum::<f64>()
    }
}

/// Bidders tied at the highest non-null bid.
fn top_bidders(col: &[Bid]) -> Vec<usize> {
    let best = col
        .iter()
        .filter_map(|b| b.amount())
        .fold(f64::NEG_INFINITY, f64::max);
    col.iter()
        .enumerate()
        .filter(|(_, b)| b.amount().is_some_and(|x| x >= best - BID_TOL))
        .map(|(i, _)| i)
        .collect()
}

/// Per-bidder payments on one item given the winner.
fn item_payments(kind: AuctionKind, col: &[Bid], winner: Option<usize>, reserve: &[f64]) -> Vec<f64> {
    let mut pay = vec![0.0; col.len()];
    if kind == AuctionKind::AllPay {
        for (i, b) in col.iter().enumerate() {
            pay[i] = b.amount().unwrap_or(0.0);
        }
    }
    if let Some(w) = winner {
        let own = col[w].amount().unwrap_or(0.0);
        let base = match kind {
            AuctionKind::FirstPrice | AuctionKind::AllPay => own,
            AuctionKind::SecondPrice => col
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != w)
                .filter_map(|(_, b)| b.amount())
                .fold(0.0, f64::max),
        };
        pay[w] = base.max(reserve[w]);
    }
    pay
}

fn run_with_reserves(rule: AuctionRule, b: &BidProfile, reserves: &[Vec<f64>], seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m) = (b.bidders(), b.items());
    let mut winners = Vec::with_capacity(m);
    let mut payments = vec![vec![0.0; m]; n];
    for j in 0..m {
        let col = b.column(j);
        let top = top_bidders(&col);
        let winner = match top.len() {
            0 => None,
            1 => Some(top[0]),
            k => Some(top[rng.gen_range(0..k)]),
        };
        let r: Vec<f64> = (0..n).map(|i| reserves[i][j]).collect();
        for (i, p) in item_payments(rule.kind, &col, winner, &r).into_iter().enumerate() {
            payments[i][j] = p;
        }
        winners.push(winner);
    }
    Outcome { winners, payments }
}

fn expected_with_reserves(rule: AuctionRule, b: &BidProfile, reserves: &[Vec<f64>]) -> ExpectedOutcome {
    let (n, m) = (b.bidders(), b.items());
    let mut win = vec![vec![0.0; m]; n];
    let mut payments = vec![vec![0.0; m]; n];
    for j in 0..m {
        let col = b.column(j);
        let top = top_bidders(&col);
        let r: Vec<f64> = (0..n).map(|i| reserves[i][j]).collect();
        if top.is_empty() {
            continue;
        }
        let w = 1.0 / top.len() as f64;
        for &k in &top {
            win[k][j] += w;
            for (i, p) in item_payments(rule.kind, &col, Some(k), &r).into_iter().enumerate() {
                payments[i][j] += w * p;
            }
        }
    }
    ExpectedOutcome {
        win,
        payments,
        fees: vec![0.0; n],
    }
}

fn zero_reserves(n: usize, m: usize) -> Vec<Vec<f64>> {
    vec![vec![0.0; m]; n]
}

/// Runs the simultaneous auction with ties broken by a ChaCha stream seeded
/// from `seed`.
pub fn run_auction(rule: AuctionRule, b: &BidProfile, seed: u64) -> Outcome {
    run_with_reserves(rule, b, &zero_reserves(b.bidders(), b.items()), seed)
}

/// The exact expectation of [`run_auction`] over tie-breaking.
pub fn expected_auction(rule: AuctionRule, b: &BidProfile) -> ExpectedOutcome {
    expected_with_reserves(rule, b, &zero_reserves(b.bidders(), b.items()))
}

fn check_matrix(name: &str, r: &[Vec<f64>]) -> Result<()> {
    if r.iter().flatten().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidArgument(format!("{name} must be finite and nonnegative")));
    }
    Ok(())
}

/// Personalized entry fees, each waived independently with probability `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryFeeWrapper {
    pub base: AuctionRule,
    pub fees: Vec<f64>,
    pub delta: f64,
}

pub const DEFAULT_DELTA: f64 = 0.01;

impl EntryFeeWrapper {
    pub fn new(base: AuctionRule, fees: Vec<f64>, delta: f64) -> Result<Self> {
        check_matrix("entry fees", std::slice::from_ref(&fees))?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta {delta} not in (0, 1)")));
        }
        Ok(EntryFeeWrapper { base, fees, delta })
    }
}

/// One bidder's action under entry fees: willingness to pay, and bids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryAction {
    pub enter: bool,
    pub bids: Vec<Bid>,
}

/// A realized entry-fee outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryOutcome {
    pub outcome: Outcome,
    pub entrants: Vec<bool>,
    /// Entry fee actually charged to each bidder.
    pub fees: Vec<f64>,
}

impl EntryOutcome {
    pub fn revenue(&self) -> f64 {
        self.outcome.revenue() + self.fees.iter().sum::<f64>()
    }
}

fn profile_of(actions: &[EntryAction]) -> Result<BidProfile> {
    BidProfile::new(actions.iter().map(|a| a.bids.clone()).collect())
}

/// Removes everything a non-entrant would have won or paid.
fn restrict_to_entrants(mut out: Outcome, entrants: &[bool]) -> Outcome {
    for w in out.winners.iter_mut() {
        if let Some(i) = *w {
            if !entrants[i] {
                *w = None;
            }
        }
    }
    for (i, row) in out.payments.iter_mut().enumerate() {
        if !entrants[i] {
            row.iter_mut().for_each(|p| *p = 0.0);
        }
    }
    out
}

/// Draws the fee coins, then runs the base auction on the full bid profile.
/// Non-entrants receive nothing and pay nothing.
pub fn run_entry_fee(w: &EntryFeeWrapper, actions: &[EntryAction], seed: u64) -> Result<EntryOutcome> {
    if actions.len() != w.fees.len() {
        return Err(Error::InvalidArgument("one action per bidder required".into()));
    }
    let b = profile_of(actions)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let charged: Vec<bool> = (0..actions.len()).map(|_| rng.gen::<f64>() >= w.delta).collect();
    let entrants: Vec<bool> = actions
        .iter()
        .zip(&charged)
        .map(|(a, &c)| !c || a.enter)
        .collect();
    let fees = (0..actions.len())
        .map(|i| if charged[i] && entrants[i] { w.fees[i] } else { 0.0 })
        .collect();
    let outcome = restrict_to_entrants(run_auction(w.base, &b, rng.gen()), &entrants);
    Ok(EntryOutcome {
        outcome,
        entrants,
        fees,
    })
}

/// Largest bidder count for which every waive pattern is enumerated.
const ENUMERATE_PATTERNS: usize = 10;

/// Exact expectation of [`run_entry_fee`] over fee coins and ties.
pub fn expected_entry_fee(w: &EntryFeeWrapper, actions: &[EntryAction]) -> Result<ExpectedOutcome> {
    let n = actions.len();
    if n != w.fees.len() {
        return Err(Error::InvalidArgument("one action per bidder required".into()));
    }
    let b = profile_of(actions)?;
    let base = expected_auction(w.base, &b);
    let m = b.items();
    let mut out = ExpectedOutcome {
        win: vec![vec![0.0; m]; n],
        payments: vec![vec![0.0; m]; n],
        fees: vec![0.0; n],
    };
    if n <= ENUMERATE_PATTERNS {
        for pattern in 0u32..(1 << n) {
            let mut weight = 1.0;
            let mut entrants = vec![false; n];
            for i in 0..n {
                let charged = pattern >> i & 1 == 1;
                weight *= if charged { 1.0 - w.delta } else { w.delta };
                entrants[i] = !charged || actions[i].enter;
            }
            for i in 0..n {
                let charged = pattern >> i & 1 == 1;
                if charged && entrants[i] {
                    out.fees[i] += weight * w.fees[i];
                }
                if entrants[i] {
                    for j in 0..m {
                        out.win[i][j] += weight * base.win[i][j];
                        out.payments[i][j] += weight * base.payments[i][j];
                    }
                }
            }
        }
    } else {
        for i in 0..n {
            let enter = if actions[i].enter { 1.0 } else { w.delta };
            for j in 0..m {
                out.win[i][j] = enter * base.win[i][j];
                out.payments[i][j] = enter * base.payments[i][j];
            }
            if actions[i].enter {
                out.fees[i] = (1.0 - w.delta) * w.fees[i];
            }
        }
    }
    Ok(out)
}

/// Personalized reserve prices `r[i][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveWrapper {
    pub base: AuctionRule,
    pub reserves: Vec<Vec<f64>>,
}

impl ReserveWrapper {
    pub fn new(base: AuctionRule, reserves: Vec<Vec<f64>>) -> Result<Self> {
        check_matrix("reserve prices", &reserves)?;
        Ok(ReserveWrapper { base, reserves })
    }
}

fn check_reserve_shape(w: &ReserveWrapper, b: &BidProfile) -> Result<()> {
    if w.reserves.len() != b.bidders() || w.reserves.iter().any(|r| r.len() != b.items()) {
        return Err(Error::InvalidArgument("reserve matrix does not match the profile".into()));
    }
    Ok(())
}

/// Allocates by the base rule; the winner of `j` pays at least `r[i][j]`.
pub fn run_reserve(w: &ReserveWrapper, b: &BidProfile, seed: u64) -> Result<Outcome> {
    check_reserve_shape(w, b)?;
    Ok(run_with_reserves(w.base, b, &w.reserves, seed))
}

/// Exact expectation of [`run_reserve`] over tie-breaking.
pub fn expected_reserve(w: &ReserveWrapper, b: &BidProfile) -> Result<ExpectedOutcome> {
    check_reserve_shape(w, b)?;
    Ok(expected_with_reserves(w.base, b, &w.reserves))
}
