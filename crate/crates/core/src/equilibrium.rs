//! Mixed strategies on finite bid grids, exact interim utilities, and
//! ε-Bayes-Nash equilibrium search for simultaneous auctions.
//!
//! Bid levels are coded as `0 = ⊥` and `k >= 1` for the amount `(k-1)·η`.
//! Opponents are summarized per item by the state "all ⊥" or
//! `(highest level, number of bidders at it)`, which is all a simultaneous
//! single-item rule looks at from one bidder's point of view.

use crate::error::{check_budget, Error, Result};
use crate::instance::Instance;
use crate::mechanisms::{
    run_auction, run_reserve, AuctionKind, AuctionRule, Bid, BidProfile, ReserveWrapper, BID_TOL,
};
use crate::report::{CheckResult, VerificationReport};
use crate::sets::ItemSet;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Default number of grid steps between 0 and the cap.
pub const DEFAULT_GRID_STEPS: usize = 32;
/// Default cap on any single enumeration (grid vectors × bundles, joint states).
pub const DEFAULT_ENUM_BUDGET: u128 = 1 << 24;
/// Default fictitious-play averaging weight.
pub const DEFAULT_FP_WEIGHT: f64 = 5.0;
/// Utilities closer than this are treated as equal when breaking ties.
pub const UTILITY_TOL: f64 = 1e-12;
/// Regrets may dip this far below zero from rounding.
pub const REGRET_TOL: f64 = 1e-9;

/// The bid grid `{⊥, 0, η, 2η, …, H}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BidGrid {
    pub eta: f64,
    pub cap: f64,
}

impl BidGrid {
    pub fn new(eta: f64, cap: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0 && cap.is_finite() && cap > 0.0) {
            return Err(Error::InvalidArgument(format!("bad grid: eta {eta}, cap {cap}")));
        }
        let steps = (cap / eta).round();
        if (steps * eta - cap).abs() > 1e-9 * cap.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "cap {cap} is not a multiple of eta {eta}"
            )));
        }
        Ok(BidGrid { eta, cap })
    }

    /// `H = 1.25 · max single-item value`, `η = H / 32`.
    pub fn for_instance(inst: &Instance) -> Self {
        let v = inst.max_single_value();
        let cap = if v > 0.0 { 1.25 * v } else { 1.0 };
        BidGrid {
            eta: cap / DEFAULT_GRID_STEPS as f64,
            cap,
        }
    }

    pub fn steps(&self) -> usize {
        (self.cap / self.eta).round() as usize
    }

    /// Number of codes including ⊥.
    pub fn codes(&self) -> usize {
        self.steps() + 2
    }

    pub fn amount(&self, code: usize) -> Option<f64> {
        (code > 0).then(|| (code - 1) as f64 * self.eta)
    }

    pub fn bid(&self, code: usize) -> Bid {
        self.amount(code).map_or(Bid::Abstain, Bid::Amount)
    }

    /// The code of a bid that lies on the grid.
    pub fn code_of(&self, bid: Bid) -> Result<usize> {
        match bid {
            Bid::Abstain => Ok(0),
            Bid::Amount(x) => {
                let k = (x / self.eta).round();
                if !(x >= 0.0) || (k * self.eta - x).abs() > 1e-9 * self.eta.max(1.0) || k as usize > self.steps() {
                    return Err(Error::InvalidArgument(format!("bid {x} is not on the grid")));
                }
                Ok(k as usize + 1)
            }
        }
    }

    /// The largest grid amount not above `x`, capped at `H`.
    pub fn floor_code(&self, x: f64) -> usize {
        let k = ((x / self.eta) + 1e-9).floor().max(0.0) as usize;
        k.min(self.steps()) + 1
    }
}

/// A simultaneous auction as seen by the solver, with optional personalized
/// reserves `r[i][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMechanism {
    pub kind: AuctionKind,
    pub reserves: Option<Vec<Vec<f64>>>,
}

impl SimMechanism {
    pub fn plain(kind: AuctionKind) -> Self {
        SimMechanism { kind, reserves: None }
    }

    pub fn with_reserves(kind: AuctionKind, reserves: Vec<Vec<f64>>) -> Self {
        SimMechanism {
            kind,
            reserves: Some(reserves),
        }
    }

    fn reserve(&self, i: usize, j: usize) -> f64 {
        self.reserves.as_ref().map_or(0.0, |r| r[i][j])
    }
}

/// A finitely supported distribution over bid vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedBid {
    pub support: Vec<(Vec<Bid>, f64)>,
}

impl MixedBid {
    pub fn pure(bids: Vec<Bid>) -> Self {
        MixedBid {
            support: vec![(bids, 1.0)],
        }
    }
}

/// `strategies[i][t]` for every bidder and type index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub grid: BidGrid,
    pub strategies: Vec<Vec<MixedBid>>,
}

/// Regret of one bidder type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretEntry {
    pub bidder: usize,
    pub type_index: usize,
    pub utility: f64,
    pub best_response_utility: f64,
    pub regret: f64,
    pub best_response: Vec<Bid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCertificate {
    pub entries: Vec<RegretEntry>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    /// Gauss-Seidel best responses; switches to fictitious play on a cycle.
    IteratedBestResponse,
    FictitiousPlay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: SolveMethod,
    pub eps_target: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Start from uniformly random pure bids instead of half-value bids.
    pub random_start: bool,
    /// Fictitious-play averaging weight `w`: round `k` moves the average by
    /// `(w+1)/(k+w)`; `w = 0` is the plain empirical mixture.
    pub fp_weight: f64,
    pub budget: u128,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: SolveMethod::IteratedBestResponse,
            eps_target: 1e-3,
            max_iters: 20000,
            seed: 0,
            random_start: false,
            fp_weight: DEFAULT_FP_WEIGHT,
            budget: DEFAULT_ENUM_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub profile: StrategyProfile,
    pub certificate: RegretCertificate,
    pub iterations: usize,
    pub switched_to_fictitious_play: bool,
    pub converged: bool,
}

/// `dense[i][t][code vector index]`.
type Dense = Vec<Vec<Vec<f64>>>;

/// Payoff tables of one bidder against fixed opponents.
#[derive(Debug, Clone)]
struct Evaluator {
    /// `g[c · 2^m + W]`: probability of winning exactly `W` with bid vector `c`.
    g: Vec<f64>,
    /// `pay[j][c_j]`: expected payment on item `j`.
    pay: Vec<Vec<f64>>,
    /// `win[j][c_j]`: probability of winning item `j`.
    win: Vec<Vec<f64>>,
}

/// An instance, a mechanism and a grid, with precomputed indexing tables.
pub struct Game<'a> {
    inst: &'a Instance,
    mech: SimMechanism,
    grid: BidGrid,
    n: usize,
    m: usize,
    levels: usize,
    states: usize,
    vectors: usize,
    codes: Vec<Vec<usize>>,
    support: Vec<ItemSet>,
    budget: u128,
}

impl<'a> Game<'a> {
    pub fn new(inst: &'a Instance, mech: SimMechanism, grid: BidGrid, budget: u128) -> Result<Self> {
        let (n, m) = (inst.bidders(), inst.items());
        if let Some(r) = &mech.reserves {
            if r.len() != n || r.iter().any(|row| row.len() != m) {
                return Err(Error::InvalidArgument("reserve matrix does not match the instance".into()));
            }
            if r.iter().flatten().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidArgument("reserves must be finite and non-negative".into()));
            }
        }
        let levels = grid.codes();
        let states = 1 + (levels - 1) * n.saturating_sub(1).max(1);
        let vectors = (levels as u128).pow(m as u32);
        check_budget("bid vectors × bundles", vectors << m, budget)?;
        check_budget("joint opponent states", (states as u128).pow(m as u32), budget)?;
        let vectors = vectors as usize;
        let codes: Vec<Vec<usize>> = (0..vectors)
            .map(|mut c| {
                (0..m)
                    .map(|_| {
                        let x = c % levels;
                        c /= levels;
                        x
                    })
                    .collect()
            })
            .collect();
        let support = codes
            .iter()
            .map(|cv| ItemSet::from_items(cv.iter().enumerate().filter(|(_, &x)| x > 0).map(|(j, _)| j)))
            .collect();
        Ok(Game {
            inst,
            mech,
            grid,
            n,
            m,
            levels,
            states,
            vectors,
            codes,
            support,
            budget,
        })
    }

    pub fn instance(&self) -> &Instance {
        self.inst
    }

    pub fn grid(&self) -> BidGrid {
        self.grid
    }

    pub fn mechanism(&self) -> &SimMechanism {
        &self.mech
    }

    fn vector_index(&self, cv: &[usize]) -> usize {
        cv.iter().rev().fold(0, |acc, &c| acc * self.levels + c)
    }

    fn bids_of(&self, c: usize) -> Vec<Bid> {
        self.codes[c].iter().map(|&x| self.grid.bid(x)).collect()
    }

    fn index_of_bids(&self, bids: &[Bid]) -> Result<usize> {
        if bids.len() != self.m {
            return Err(Error::InvalidArgument(format!(
                "bid vector has {} entries, expected {}",
                bids.len(),
                self.m
            )));
        }
        let cv = bids.iter().map(|&b| self.grid.code_of(b)).collect::<Result<Vec<_>>>()?;
        Ok(self.vector_index(&cv))
    }

    // Opponent states: 0 is "all ⊥", otherwise (level, count).

    fn state_parts(&self, s: usize) -> (usize, usize) {
        if s == 0 {
            return (0, 0);
        }
        let k = self.n.saturating_sub(1).max(1);
        (1 + (s - 1) / k, 1 + (s - 1) % k)
    }

    fn state_of(&self, level: usize, count: usize) -> usize {
        let k = self.n.saturating_sub(1).max(1);
        1 + (level - 1) * k + (count - 1)
    }

    /// The state after one more opponent bids `c`.
    fn absorb(&self, s: usize, c: usize) -> usize {
        if c == 0 {
            return s;
        }
        let (l, k) = self.state_parts(s);
        if s == 0 || c > l {
            self.state_of(c, 1)
        } else if c == l {
            self.state_of(l, k + 1)
        } else {
            s
        }
    }

    fn win_prob(&self, c: usize, s: usize) -> f64 {
        if c == 0 {
            return 0.0;
        }
        if s == 0 {
            return 1.0;
        }
        let (l, k) = self.state_parts(s);
        match c.cmp(&l) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Equal => 1.0 / (k + 1) as f64,
            std::cmp::Ordering::Less => 0.0,
        }
    }

    fn payment(&self, i: usize, j: usize, c: usize, s: usize) -> f64 {
        let Some(a) = self.grid.amount(c) else {
            return 0.0;
        };
        let r = self.mech.reserve(i, j);
        let w = self.win_prob(c, s);
        match self.mech.kind {
            AuctionKind::FirstPrice => w * a.max(r),
            AuctionKind::SecondPrice => {
                let price = self.grid.amount(self.state_parts(s).0).unwrap_or(0.0);
                w * price.max(r)
            }
            AuctionKind::AllPay => a + w * (r - a).max(0.0),
        }
    }

    fn check_dense(&self, p: &StrategyProfile) -> Result<Dense> {
        if p.grid != self.grid {
            return Err(Error::InvalidArgument("profile grid differs from the game grid".into()));
        }
        if p.strategies.len() != self.n {
            return Err(Error::InvalidArgument("profile has the wrong number of bidders".into()));
        }
        let mut dense = Vec::with_capacity(self.n);
        for (i, row) in p.strategies.iter().enumerate() {
            let model = self.inst.model(i);
            if row.len() != model.type_count() {
                return Err(Error::InvalidArgument(format!("bidder {i} has the wrong number of types")));
            }
            let mut per_type = Vec::with_capacity(row.len());
            for mixed in row {
                let mut d = vec![0.0; self.vectors];
                let mut total = 0.0;
                for (bids, pr) in &mixed.support {
                    if !(pr.is_finite() && *pr >= 0.0) {
                        return Err(Error::InvalidArgument(format!("bad probability {pr}")));
                    }
                    d[self.index_of_bids(bids)?] += pr;
                    total += pr;
                }
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "bidder {i} strategy sums to {total}"
                    )));
                }
                per_type.push(d);
            }
            dense.push(per_type);
        }
        Ok(dense)
    }

    fn to_profile(&self, dense: &Dense) -> StrategyProfile {
        let strategies = dense
            .iter()
            .map(|row| {
                row.iter()
                    .map(|d| MixedBid {
                        support: d
                            .iter()
                            .enumerate()
                            .filter(|(_, &p)| p > 0.0)
                            .map(|(c, &p)| (self.bids_of(c), p))
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        StrategyProfile {
            grid: self.grid,
            strategies,
        }
    }

    /// Type-averaged bid-vector distribution of bidder `k`.
    fn mixture(&self, dense: &Dense, k: usize) -> Vec<(usize, f64)> {
        let model = self.inst.model(k);
        let mut acc = vec![0.0; self.vectors];
        for (t, d) in dense[k].iter().enumerate() {
            for (c, &p) in d.iter().enumerate() {
                if p > 0.0 {
                    acc[c] += model.prob[t] * p;
                }
            }
        }
        acc.into_iter().enumerate().filter(|(_, p)| *p > 0.0).collect()
    }

    /// Joint opponent state distribution, indexed `Σ_j s_j · Q^j`.
    fn joint_states(&self, dense: &Dense, i: usize) -> Vec<f64> {
        let size = self.states.pow(self.m as u32);
        let mut joint = vec![0.0; size];
        joint[0] = 1.0;
        for k in (0..self.n).filter(|&k| k != i) {
            let mix = self.mixture(dense, k);
            let mut next = vec![0.0; size];
            for (idx, &p) in joint.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let s = self.decode_states(idx);
                for &(c, q) in &mix {
                    let cv = &self.codes[c];
                    let mut out = 0;
                    for j in (0..self.m).rev() {
                        out = out * self.states + self.absorb(s[j], cv[j]);
                    }
                    next[out] += p * q;
                }
            }
            joint = next;
        }
        joint
    }

    fn decode_states(&self, mut idx: usize) -> Vec<usize> {
        (0..self.m)
            .map(|_| {
                let s = idx % self.states;
                idx /= self.states;
                s
            })
            .collect()
    }

    fn evaluator(&self, dense: &Dense, i: usize) -> Evaluator {
        let joint = self.joint_states(dense, i);
        let (m, l, q) = (self.m, self.levels, self.states);
        let win_table: Vec<Vec<f64>> = (0..l)
            .map(|c| (0..q).map(|s| self.win_prob(c, s)).collect())
            .collect();

        let mut marg = vec![vec![0.0; q]; m];
        for (idx, &p) in joint.iter().enumerate() {
            if p > 0.0 {
                for (j, s) in self.decode_states(idx).into_iter().enumerate() {
                    marg[j][s] += p;
                }
            }
        }
        let pay = (0..m)
            .map(|j| {
                (0..l)
                    .map(|c| (0..q).map(|s| marg[j][s] * self.payment(i, j, c, s)).sum())
                    .collect()
            })
            .collect();
        let win = (0..m)
            .map(|j| {
                (0..l)
                    .map(|c| (0..q).map(|s| marg[j][s] * win_table[c][s]).sum())
                    .collect()
            })
            .collect();

        // Contract one item axis at a time: state s -> (own code c, won w).
        let mut t = joint;
        let mut dims = vec![q; m];
        let wide = 2 * l;
        for j in 0..m {
            let inner: usize = dims[..j].iter().product();
            let outer: usize = dims[j + 1..].iter().product();
            let old = dims[j];
            let mut next = vec![0.0; inner * wide * outer];
            for o in 0..outer {
                for s in 0..old {
                    let base = inner * (s + old * o);
                    for inn in 0..inner {
                        let v = t[base + inn];
                        if v == 0.0 {
                            continue;
                        }
                        for (c, row) in win_table.iter().enumerate() {
                            let w = row[s];
                            let nb = inner * (2 * c + wide * o) + inn;
                            next[nb] += v * (1.0 - w);
                            next[nb + inner] += v * w;
                        }
                    }
                }
            }
            t = next;
            dims[j] = wide;
        }
        let bundles = 1usize << m;
        let mut g = vec![0.0; self.vectors * bundles];
        for c in 0..self.vectors {
            let cv = &self.codes[c];
            for w in 0..bundles {
                let mut idx = 0;
                for j in (0..m).rev() {
                    idx = idx * wide + 2 * cv[j] + ((w >> j) & 1);
                }
                g[c * bundles + w] = t[idx];
            }
        }
        Evaluator { g, pay, win }
    }

    fn utilities(&self, ev: &Evaluator, i: usize, t: usize) -> Vec<f64> {
        let vals = &self.inst.model(i).values[t];
        let bundles = 1usize << self.m;
        (0..self.vectors)
            .map(|c| {
                let row = &ev.g[c * bundles..(c + 1) * bundles];
                let value: f64 = row.iter().zip(vals).map(|(a, b)| a * b).sum();
                let paid: f64 = self.codes[c].iter().enumerate().map(|(j, &x)| ev.pay[j][x]).sum();
                value - paid
            })
            .collect()
    }

    /// Best response under the tie-break: a pure incumbent that is already
    /// optimal, then utility, total win probability, lowest total bid and
    /// lowest index.
    fn best_index(&self, ev: &Evaluator, u: &[f64], incumbent: Option<usize>) -> usize {
        let top = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if let Some(c) = incumbent.filter(|&c| u[c] >= top - UTILITY_TOL) {
            return c;
        }
        let key = |c: usize| {
            let cv = &self.codes[c];
            let w: f64 = cv.iter().enumerate().map(|(j, &x)| ev.win[j][x]).sum();
            let b: usize = cv.iter().sum();
            (u[c], w, b)
        };
        let mut best = 0;
        let mut bk = key(0);
        for c in 1..self.vectors {
            let k = key(c);
            let better = if k.0 > bk.0 + UTILITY_TOL {
                true
            } else if k.0 >= bk.0 - UTILITY_TOL {
                k.1 > bk.1 + UTILITY_TOL || (k.1 >= bk.1 - UTILITY_TOL && k.2 < bk.2)
            } else {
                false
            };
            if better {
                best = c;
                bk = k;
            }
        }
        best
    }

    fn certificate_for(&self, dense: &Dense, evs: &[Evaluator]) -> (RegretCertificate, Vec<Vec<usize>>) {
        let per_bidder: Vec<(Vec<RegretEntry>, Vec<usize>)> = (0..self.n)
            .into_par_iter()
            .map(|i| {
                let mut entries = Vec::new();
                let mut brs = Vec::new();
                for (t, d) in dense[i].iter().enumerate() {
                    let u = self.utilities(&evs[i], i, t);
                    let br = self.best_index(&evs[i], &u, pure_code(d));
                    let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let own: f64 = d.iter().zip(&u).filter(|(p, _)| **p > 0.0).map(|(p, x)| p * x).sum();
                    entries.push(RegretEntry {
                        bidder: i,
                        type_index: t,
                        utility: own,
                        best_response_utility: best,
                        regret: best - own,
                        best_response: self.bids_of(br),
                    });
                    brs.push(br);
                }
                (entries, brs)
            })
            .collect();
        let mut entries = Vec::new();
        let mut brs = Vec::new();
        for (e, b) in per_bidder {
            entries.extend(e);
            brs.push(b);
        }
        let epsilon = entries.iter().map(|e| e.regret).fold(0.0, f64::max);
        (RegretCertificate { entries, epsilon }, brs)
    }

    fn evaluators(&self, dense: &Dense) -> Vec<Evaluator> {
        (0..self.n).into_par_iter().map(|i| self.evaluator(dense, i)).collect()
    }

    /// Exact interim utility of bidder `i` with type index `t` bidding `bids`
    /// while the others follow `profile`.
    pub fn interim_utility(&self, profile: &StrategyProfile, i: usize, t: usize, bids: &[Bid]) -> Result<f64> {
        let dense = self.check_dense(profile)?;
        let c = self.index_of_bids(bids)?;
        let ev = self.evaluator(&dense, i);
        Ok(self.utilities(&ev, i, t)[c])
    }

    /// Monte Carlo estimate of [`Game::interim_utility`] with its standard
    /// error, sampling opponents' types, bids and tie-breaks.
    pub fn interim_utility_mc(
        &self,
        profile: &StrategyProfile,
        i: usize,
        t: usize,
        bids: &[Bid],
        samples: usize,
        seed: u64,
    ) -> Result<(f64, f64)> {
        if samples < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        self.check_dense(profile)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rule = AuctionRule::new(self.mech.kind);
        let reserves = self
            .mech
            .reserves
            .clone()
            .unwrap_or_else(|| vec![vec![0.0; self.m]; self.n]);
        let wrapper = ReserveWrapper::new(rule, reserves)?;
        let model = self.inst.model(i);
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..samples {
            let mut rows = Vec::with_capacity(self.n);
            for k in 0..self.n {
                if k == i {
                    rows.push(bids.to_vec());
                    continue;
                }
                let mk = self.inst.model(k);
                let tk = sample_index(&mut rng, &mk.prob);
                let mixed = &profile.strategies[k][tk];
                let probs: Vec<f64> = mixed.support.iter().map(|(_, p)| *p).collect();
                rows.push(mixed.support[sample_index(&mut rng, &probs)].0.clone());
            }
            let bp = BidProfile::new(rows)?;
            let out = if self.mech.reserves.is_some() {
                run_reserve(&wrapper, &bp, rng.gen())?
            } else {
                run_auction(rule, &bp, rng.gen())
            };
            let won = ItemSet::from_items(out.allocation(i));
            let x = model.value(t, won) - out.total_payment(i);
            sum += x;
            sq += x * x;
        }
        let k = samples as f64;
        let mean = sum / k;
        let var = ((sq - k * mean * mean) / (k - 1.0)).max(0.0);
        Ok((mean, (var / k).sqrt()))
    }

    /// An exact best response over the grid and its utility.
    pub fn best_response(&self, profile: &StrategyProfile, i: usize, t: usize) -> Result<(Vec<Bid>, f64)> {
        let dense = self.check_dense(profile)?;
        let ev = self.evaluator(&dense, i);
        let u = self.utilities(&ev, i, t);
        let c = self.best_index(&ev, &u, pure_code(&dense[i][t]));
        Ok((self.bids_of(c), u[c]))
    }

    /// Regret of every bidder type at `profile`.
    pub fn certificate(&self, profile: &StrategyProfile) -> Result<RegretCertificate> {
        let dense = self.check_dense(profile)?;
        let evs = self.evaluators(&dense);
        Ok(self.certificate_for(&dense, &evs).0)
    }

    /// Interim utilities `u_i(t)` at `profile`.
    pub fn interim_utilities(&self, profile: &StrategyProfile) -> Result<Vec<Vec<f64>>> {
        let dense = self.check_dense(profile)?;
        let evs = self.evaluators(&dense);
        Ok((0..self.n)
            .map(|i| {
                dense[i]
                    .iter()
                    .enumerate()
                    .map(|(t, d)| {
                        let u = self.utilities(&evs[i], i, t);
                        d.iter().zip(&u).filter(|(p, _)| **p > 0.0).map(|(p, x)| p * x).sum()
                    })
                    .collect()
            })
            .collect())
    }

    /// `μ_i(t, S)` for every `S`, indexed by mask: the best utility with bids
    /// outside `S` forced to ⊥.
    pub fn mu_table(&self, profile: &StrategyProfile, i: usize, t: usize) -> Result<Vec<f64>> {
        let dense = self.check_dense(profile)?;
        let ev = self.evaluator(&dense, i);
        Ok(self.mu_from(&ev, i, t))
    }

    fn mu_from(&self, ev: &Evaluator, i: usize, t: usize) -> Vec<f64> {
        let u = self.utilities(ev, i, t);
        let bundles = 1usize << self.m;
        let mut exact = vec![f64::NEG_INFINITY; bundles];
        for (c, &x) in u.iter().enumerate() {
            let s = self.support[c].index();
            exact[s] = exact[s].max(x);
        }
        ItemSet::all(self.m)
            .map(|s| s.subsets().map(|sub| exact[sub.index()]).fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    pub fn mu(&self, profile: &StrategyProfile, i: usize, t: usize, s: ItemSet) -> Result<f64> {
        check_set(s, self.m)?;
        Ok(self.mu_table(profile, i, t)?[s.index()])
    }

    /// Expected payment on each item at `profile`.
    pub fn item_revenues(&self, profile: &StrategyProfile) -> Result<Vec<f64>> {
        let dense = self.check_dense(profile)?;
        let evs = self.evaluators(&dense);
        Ok(self.item_revenues_from(&dense, &evs))
    }

    fn item_revenues_from(&self, dense: &Dense, evs: &[Evaluator]) -> Vec<f64> {
        let mut rev = vec![0.0; self.m];
        for i in 0..self.n {
            let model = self.inst.model(i);
            for (t, d) in dense[i].iter().enumerate() {
                for (c, &p) in d.iter().enumerate() {
                    if p > 0.0 {
                        for (j, &x) in self.codes[c].iter().enumerate() {
                            rev[j] += model.prob[t] * p * evs[i].pay[j][x];
                        }
                    }
                }
            }
        }
        rev
    }

    /// `Rev(S)`: expected payments collected on items in `S`.
    pub fn revenue(&self, profile: &StrategyProfile, s: ItemSet) -> Result<f64> {
        check_set(s, self.m)?;
        Ok(self
            .item_revenues(profile)?
            .iter()
            .enumerate()
            .filter(|(j, _)| s.contains(*j))
            .map(|(_, r)| r)
            .sum())
    }

    /// Expected welfare at `profile`.
    pub fn welfare(&self, profile: &StrategyProfile) -> Result<f64> {
        let dense = self.check_dense(profile)?;
        let evs = self.evaluators(&dense);
        let bundles = 1usize << self.m;
        let mut total = 0.0;
        for i in 0..self.n {
            let model = self.inst.model(i);
            for (t, d) in dense[i].iter().enumerate() {
                for (c, &p) in d.iter().enumerate() {
                    if p > 0.0 {
                        let row = &evs[i].g[c * bundles..(c + 1) * bundles];
                        let v: f64 = row.iter().zip(&model.values[t]).map(|(a, b)| a * b).sum();
                        total += model.prob[t] * p * v;
                    }
                }
            }
        }
        Ok(total)
    }

    /// Checks `c·v_i(t, S) <= μ_i(t, S) + Rev(S)` for every `(i, t, S)`.
    pub fn check_c_efficiency(&self, profile: &StrategyProfile, c: f64, slack: f64) -> Result<VerificationReport> {
        let dense = self.check_dense(profile)?;
        let evs = self.evaluators(&dense);
        let rev = self.item_revenues_from(&dense, &evs);
        let mut report = VerificationReport::new();
        for i in 0..self.n {
            let model = self.inst.model(i);
            for t in 0..model.type_count() {
                let mu = self.mu_from(&evs[i], i, t);
                for s in ItemSet::all(self.m) {
                    let r: f64 = s.iter().map(|j| rev[j]).sum();
                    let lhs = c * model.value(t, s);
                    let witness = format!("i={i},t={:?},S={s}", model.types[t]);
                    report.push(
                        CheckResult::new(
                            &format!("c_efficiency[{witness}]"),
                            "c*v_i(t,S) <= mu_i(t,S) + Rev(S)",
                            lhs,
                            mu[s.index()] + r,
                            slack,
                        )
                        .with_witness(witness),
                    );
                }
            }
        }
        Ok(report)
    }

    /// Expected utility of the deviation "draw q from the distribution of
    /// the opponents' highest bids, bid q + ε_shift on S and ⊥ elsewhere".
    pub fn deviation_witness(
        &self,
        profile: &StrategyProfile,
        i: usize,
        t: usize,
        s: ItemSet,
        eps_shift: f64,
    ) -> Result<f64> {
        check_set(s, self.m)?;
        if self.mech.kind == AuctionKind::SecondPrice || self.mech.reserves.is_some() {
            return Err(Error::InvalidArgument(
                "the deviation witness applies to plain first-price and all-pay rules".into(),
            ));
        }
        if !(eps_shift.is_finite() && eps_shift >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad shift {eps_shift}")));
        }
        let dense = self.check_dense(profile)?;
        let joint = self.joint_states(&dense, i);
        let atoms: Vec<(Vec<usize>, f64)> = joint
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(idx, &p)| (self.decode_states(idx), p))
            .collect();
        check_budget("witness enumeration", (atoms.len() as u128).pow(2) << self.m, self.budget)?;
        let vals = &self.inst.model(i).values[t];
        let items: Vec<usize> = s.iter().collect();
        let mut total = 0.0;
        for (qs, pq) in &atoms {
            let bid: Vec<f64> = items
                .iter()
                .map(|&j| self.grid.amount(self.state_parts(qs[j]).0).unwrap_or(0.0) + eps_shift)
                .collect();
            for (st, ps) in &atoms {
                let w: Vec<f64> = items
                    .iter()
                    .zip(&bid)
                    .map(|(&j, &a)| {
                        let (l, k) = self.state_parts(st[j]);
                        match self.grid.amount(l) {
                            None => 1.0,
                            Some(x) if a > x + BID_TOL => 1.0,
                            Some(x) if a >= x - BID_TOL => 1.0 / (k + 1) as f64,
                            Some(_) => 0.0,
                        }
                    })
                    .collect();
                let mut value = 0.0;
                for sub in 0..(1usize << items.len()) {
                    let mut pr = 1.0;
                    let mut mask = ItemSet::EMPTY;
                    for (k, &j) in items.iter().enumerate() {
                        if (sub >> k) & 1 == 1 {
                            pr *= w[k];
                            mask = mask.insert(j);
                        } else {
                            pr *= 1.0 - w[k];
                        }
                    }
                    value += pr * vals[mask.index()];
                }
                let paid: f64 = match self.mech.kind {
                    AuctionKind::AllPay => bid.iter().sum(),
                    _ => bid.iter().zip(&w).map(|(a, x)| a * x).sum(),
                };
                total += pq * ps * (value - paid);
            }
        }
        Ok(total)
    }

    /// Recomputes every regret under the entry-fee wrapper two ways: by the
    /// closed-form transform `g(u) = max{δu, u − (1−δ)e}` and by the explicit
    /// enter-or-not expectation per bid vector.
    pub fn check_entry_fee_invariance(
        &self,
        profile: &StrategyProfile,
        fees: &[f64],
        delta: f64,
    ) -> Result<InvarianceReport> {
        if fees.len() != self.n || fees.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::InvalidArgument("fees must be one non-negative value per bidder".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta {delta} not in (0, 1)")));
        }
        let dense = self.check_dense(profile)?;
        let evs = self.evaluators(&dense);
        let mut rows = Vec::new();
        for i in 0..self.n {
            let e = fees[i];
            let g = |x: f64| (delta * x).max(x - (1.0 - delta) * e);
            let direct = |x: f64| {
                let enter = x >= e;
                let p_in = if enter { 1.0 } else { delta };
                let fee = if enter { (1.0 - delta) * e } else { 0.0 };
                p_in * x - fee
            };
            for (t, d) in dense[i].iter().enumerate() {
                let u = self.utilities(&evs[i], i, t);
                let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let own: f64 = weighted(d, &u, |x| x);
                let base = best - own;
                let predicted = g(best) - weighted(d, &u, g);
                let best_direct = u
                    .iter()
                    .flat_map(|&x| [x - (1.0 - delta) * e, delta * x])
                    .fold(f64::NEG_INFINITY, f64::max);
                let recomputed = best_direct - weighted(d, &u, direct);
                rows.push(InvarianceRow {
                    bidder: i,
                    type_index: t,
                    base_regret: base,
                    predicted_regret: predicted,
                    recomputed_regret: recomputed,
                });
            }
        }
        let max_abs_error = rows
            .iter()
            .map(|r| (r.predicted_regret - r.recomputed_regret).abs())
            .fold(0.0, f64::max);
        let bounds_hold = rows.iter().all(|r| {
            r.recomputed_regret >= delta * r.base_regret - REGRET_TOL
                && r.recomputed_regret <= r.base_regret + REGRET_TOL
        });
        let epsilon_base = rows.iter().map(|r| r.base_regret).fold(0.0, f64::max);
        let epsilon_wrapped = rows.iter().map(|r| r.recomputed_regret).fold(0.0, f64::max);
        Ok(InvarianceReport {
            passed: max_abs_error <= REGRET_TOL && bounds_hold,
            max_abs_error,
            bounds_hold,
            epsilon_base,
            epsilon_wrapped,
            rows,
        })
    }

    /// Revenue of the entry-fee wrapper at `profile` when each bidder enters
    /// exactly when its bid vector's utility covers the fee.
    pub fn entry_fee_revenue(&self, profile: &StrategyProfile, fees: &[f64], delta: f64) -> Result<f64> {
        if fees.len() != self.n {
            return Err(Error::InvalidArgument("fees must have one entry per bidder".into()));
        }
        let dense = self.check_dense(profile)?;
        let evs = self.evaluators(&dense);
        let mut total = 0.0;
        for i in 0..self.n {
            let model = self.inst.model(i);
            for (t, d) in dense[i].iter().enumerate() {
                let u = self.utilities(&evs[i], i, t);
                for (c, &p) in d.iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    let paid: f64 = self.codes[c].iter().enumerate().map(|(j, &x)| evs[i].pay[j][x]).sum();
                    let x = if u[c] >= fees[i] {
                        paid + (1.0 - delta) * fees[i]
                    } else {
                        delta * paid
                    };
                    total += model.prob[t] * p * x;
                }
            }
        }
        Ok(total)
    }

    fn initial(&self, cfg: &SolverConfig) -> Dense {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..self.n)
            .map(|i| {
                let model = self.inst.model(i);
                (0..model.type_count())
                    .map(|t| {
                        let cv: Vec<usize> = (0..self.m)
                            .map(|j| {
                                let v = model.single_value(t, j);
                                let top = if v > 0.0 { self.grid.floor_code(v) } else { 0 };
                                if cfg.random_start {
                                    rng.gen_range(0..=top)
                                } else if v > 0.0 {
                                    self.grid.floor_code(v / 2.0)
                                } else {
                                    0
                                }
                            })
                            .collect();
                        let mut d = vec![0.0; self.vectors];
                        d[self.vector_index(&cv)] = 1.0;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    /// Searches for an ε-BNE from `start` or a configured initial profile,
    /// returning the best profile seen.
    pub fn solve(&self, cfg: &SolverConfig, start: Option<&StrategyProfile>) -> Result<SolveOutcome> {
        if !(cfg.fp_weight.is_finite() && cfg.fp_weight >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad averaging weight {}", cfg.fp_weight)));
        }
        let mut dense = match start {
            Some(p) => self.check_dense(p)?,
            None => self.initial(cfg),
        };
        let mut best: Option<(Dense, RegretCertificate)> = None;
        let keep = |dense: &Dense, cert: &RegretCertificate, best: &mut Option<(Dense, RegretCertificate)>| {
            if best.as_ref().map_or(true, |(_, b)| cert.epsilon < b.epsilon) {
                *best = Some((dense.clone(), cert.clone()));
            }
        };
        let mut iterations = 0;
        let mut fictitious = cfg.method == SolveMethod::FictitiousPlay;
        let mut switched = false;
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut rounds = 1.0;
        while iterations < cfg.max_iters.max(1) {
            iterations += 1;
            let evs = self.evaluators(&dense);
            let (cert, brs) = self.certificate_for(&dense, &evs);
            keep(&dense, &cert, &mut best);
            if cert.epsilon <= cfg.eps_target {
                break;
            }
            if fictitious {
                rounds += 1.0;
                let step = (cfg.fp_weight + 1.0) / (rounds + cfg.fp_weight);
                for (i, row) in dense.iter_mut().enumerate() {
                    for (t, d) in row.iter_mut().enumerate() {
                        for p in d.iter_mut() {
                            *p *= 1.0 - step;
                        }
                        d[brs[i][t]] += step;
                    }
                }
                continue;
            }
            if !seen.insert(pure_key(&dense)) {
                fictitious = true;
                switched = true;
                continue;
            }
            for i in 0..self.n {
                let ev = self.evaluator(&dense, i);
                for t in 0..dense[i].len() {
                    let u = self.utilities(&ev, i, t);
                    let c = self.best_index(&ev, &u, pure_code(&dense[i][t]));
                    let d = &mut dense[i][t];
                    d.iter_mut().for_each(|p| *p = 0.0);
                    d[c] = 1.0;
                }
            }
        }
        let (dense, certificate) = best.expect("at least one iteration runs");
        let converged = certificate.epsilon <= cfg.eps_target;
        Ok(SolveOutcome {
            profile: self.to_profile(&dense),
            certificate,
            iterations,
            switched_to_fictitious_play: switched,
            converged,
        })
    }
}

/// One bidder type's regret under the base rule and under the entry-fee
/// wrapper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub bidder: usize,
    pub type_index: usize,
    pub base_regret: f64,
    pub predicted_regret: f64,
    pub recomputed_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub passed: bool,
    /// Largest gap between transform-predicted and recomputed regrets.
    pub max_abs_error: f64,
    /// Whether `δ·r_A <= r_EF <= r_A` for every row.
    pub bounds_hold: bool,
    pub epsilon_base: f64,
    pub epsilon_wrapped: f64,
    pub rows: Vec<InvarianceRow>,
}

fn weighted(d: &[f64], u: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    d.iter().zip(u).filter(|(p, _)| **p > 0.0).map(|(p, &x)| p * f(x)).sum()
}

fn pure_code(d: &[f64]) -> Option<usize> {
    d.iter().position(|&p| p == 1.0)
}

fn pure_key(dense: &Dense) -> Vec<usize> {
    dense
        .iter()
        .flatten()
        .map(|d| d.iter().position(|&p| p > 0.0).unwrap_or(0))
        .collect()
}

fn sample_index(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let x: f64 = rng.gen::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            return k;
        }
    }
    probs.len() - 1
}

fn check_set(s: ItemSet, m: usize) -> Result<()> {
    if !s.fits(m) {
        return Err(Error::SetOutOfRange { set: s.bits(), items: m });
    }
    Ok(())
}

/// The default c-efficiency slack `ε·m + η·m`.
pub fn default_slack(cert: &RegretCertificate, grid: BidGrid, m: usize) -> f64 {
    (cert.epsilon + grid.eta) * m as f64
}

/// Solves for an ε-BNE of `mech` on `inst`.
pub fn solve_bne(
    inst: &Instance,
    mech: SimMechanism,
    grid: BidGrid,
    cfg: &SolverConfig,
    start: Option<&StrategyProfile>,
) -> Result<SolveOutcome> {
    Game::new(inst, mech, grid, cfg.budget)?.solve(cfg, start)
}

/// The pure profile where bidder `i` bids 1 on item `i` and 0 elsewhere.
pub fn own_item_profile(n: usize, grid: BidGrid) -> StrategyProfile {
    StrategyProfile {
        grid,
        strategies: (0..n)
            .map(|i| {
                let bids = (0..n)
                    .map(|j| Bid::Amount(if i == j { 1.0 } else { 0.0 }))
                    .collect();
                vec![MixedBid::pure(bids)]
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::scalar_bidder;
    use crate::valuations::Valuation;

    fn single(values: Vec<f64>, pmf: Vec<f64>) -> crate::instance::BidderSpec {
        scalar_bidder(vec![values], vec![pmf], Valuation::Additive).unwrap()
    }

    fn pure(grid: BidGrid, rows: Vec<Vec<Vec<Bid>>>) -> StrategyProfile {
        StrategyProfile {
            grid,
            strategies: rows
                .into_iter()
                .map(|r| r.into_iter().map(MixedBid::pure).collect())
                .collect(),
        }
    }

    #[test]
    fn grid_codes() {
        let g = BidGrid::new(0.5, 3.0).unwrap();
        assert_eq!(g.codes(), 8);
        assert_eq!(g.code_of(Bid::Amount(1.5)).unwrap(), 4);
        assert_eq!(g.amount(4), Some(1.5));
        assert!(g.code_of(Bid::Amount(1.2)).is_err());
        assert!(BidGrid::new(0.4, 1.0).is_err());
        assert_eq!(g.floor_code(1.7), 4);
    }

    #[test]
    fn uncontested_first_price() {
        let inst = Instance::new(vec![single(vec![3.0], vec![1.0])]).unwrap();
        let grid = BidGrid::new(0.5, 3.0).unwrap();
        let game = Game::new(&inst, SimMechanism::plain(AuctionKind::FirstPrice), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let p = pure(grid, vec![vec![vec![Bid::Amount(1.0)]]]);
        let u = game.interim_utility(&p, 0, 0, &[Bid::Amount(1.0)]).unwrap();
        assert!((u - 2.0).abs() < 1e-12);
        let (br, ub) = game.best_response(&p, 0, 0).unwrap();
        assert_eq!(br, vec![Bid::Amount(0.0)]);
        assert!((ub - 3.0).abs() < 1e-12);
    }

    #[test]
    fn ties_and_all_pay() {
        let inst = Instance::new(vec![single(vec![3.0], vec![1.0]), single(vec![3.0], vec![1.0])]).unwrap();
        let grid = BidGrid::new(0.5, 3.0).unwrap();
        let fp = Game::new(&inst, SimMechanism::plain(AuctionKind::FirstPrice), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let p = pure(grid, vec![vec![vec![Bid::Amount(1.0)]], vec![vec![Bid::Amount(1.0)]]]);
        assert!((fp.interim_utility(&p, 0, 0, &[Bid::Amount(1.0)]).unwrap() - 1.0).abs() < 1e-12);
        assert!((fp.revenue(&p, ItemSet::full(1)).unwrap() - 1.0).abs() < 1e-12);
        let (br, u) = fp.best_response(&p, 0, 0).unwrap();
        assert_eq!(br, vec![Bid::Amount(1.5)]);
        assert!((u - 1.5).abs() < 1e-12);

        let ap = Game::new(&inst, SimMechanism::plain(AuctionKind::AllPay), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let q = pure(grid, vec![vec![vec![Bid::Amount(2.0)]], vec![vec![Bid::Amount(3.0)]]]);
        assert!((ap.interim_utility(&q, 0, 0, &[Bid::Amount(2.0)]).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_values_abstain() {
        let inst = Instance::new(vec![single(vec![0.0], vec![1.0]), single(vec![2.0], vec![1.0])]).unwrap();
        let grid = BidGrid::new(0.5, 2.5).unwrap();
        let game = Game::new(&inst, SimMechanism::plain(AuctionKind::FirstPrice), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let mut p = pure(grid, vec![vec![vec![Bid::Amount(0.5)]], vec![vec![Bid::Amount(1.0)]]]);
        p.strategies[0][0] = MixedBid {
            support: vec![(vec![Bid::Amount(0.5)], 0.5), (vec![Bid::Amount(1.5)], 0.5)],
        };
        let (br, u) = game.best_response(&p, 0, 0).unwrap();
        assert_eq!(br, vec![Bid::Abstain]);
        assert_eq!(u, 0.0);
    }

    #[test]
    fn mu_without_opponents() {
        let inst = Instance::new(vec![single(vec![5.0], vec![1.0])]).unwrap();
        let grid = BidGrid::new(0.5, 6.0).unwrap();
        let game = Game::new(&inst, SimMechanism::plain(AuctionKind::FirstPrice), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let p = pure(grid, vec![vec![vec![Bid::Amount(2.0)]]]);
        assert_eq!(game.mu(&p, 0, 0, ItemSet::EMPTY).unwrap(), 0.0);
        assert!((game.mu(&p, 0, 0, ItemSet::singleton(0)).unwrap() - 5.0).abs() < 1e-12);
        let out = game.solve(&SolverConfig::default(), None).unwrap();
        assert_eq!(out.certificate.epsilon, 0.0);
    }

    #[test]
    fn second_price_counterexample() {
        let inst = Instance::own_item_unit_demand(3, 0.5).unwrap();
        let grid = BidGrid::new(0.125, 1.25).unwrap();
        let game = Game::new(&inst, SimMechanism::plain(AuctionKind::SecondPrice), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let p = own_item_profile(3, grid);
        let cert = game.certificate(&p).unwrap();
        assert!(cert.epsilon.abs() < 1e-12);
        assert_eq!(game.revenue(&p, ItemSet::full(3)).unwrap(), 0.0);
        assert!((game.welfare(&p).unwrap() - 3.0).abs() < 1e-12);
        for i in 0..3 {
            let others = ItemSet::full(3).minus(ItemSet::singleton(i));
            assert_eq!(game.mu(&p, i, 0, others).unwrap(), 0.0);
            let (br, _) = game.best_response(&p, i, 0).unwrap();
            assert_eq!(br, p.strategies[i][0].support[0].0);
        }
        let out = game.solve(&SolverConfig::default(), Some(&p)).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.profile, p);
    }

    #[test]
    fn witness_without_opponents() {
        let spec = scalar_bidder(vec![vec![2.0], vec![3.0]], vec![vec![1.0], vec![1.0]], Valuation::Additive).unwrap();
        let inst = Instance::new(vec![spec]).unwrap();
        let grid = BidGrid::for_instance(&inst);
        let game = Game::new(&inst, SimMechanism::plain(AuctionKind::FirstPrice), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let p = pure(grid, vec![vec![vec![Bid::Abstain, Bid::Abstain]]]);
        let w = game.deviation_witness(&p, 0, 0, ItemSet::full(2), 0.1).unwrap();
        assert!((w - (5.0 - 0.2)).abs() < 1e-12);
    }

    #[test]
    fn entry_fee_transform_with_zero_fee() {
        let inst = Instance::new(vec![single(vec![1.0, 3.0], vec![0.5, 0.5]), single(vec![2.0], vec![1.0])]).unwrap();
        let grid = BidGrid::for_instance(&inst);
        let game = Game::new(&inst, SimMechanism::plain(AuctionKind::FirstPrice), grid, DEFAULT_ENUM_BUDGET).unwrap();
        let p = game.to_profile(&game.initial(&SolverConfig::default()));
        let rep = game.check_entry_fee_invariance(&p, &[0.0, 0.0], 0.5).unwrap();
        assert!(rep.passed);
        for r in &rep.rows {
            assert!((r.base_regret - r.recomputed_regret).abs() < 1e-12);
        }
    }

    #[test]
    fn fictitious_play_reduces_regret() {
        let inst = Instance::new(vec![
            single(vec![1.0, 2.0, 4.0], vec![0.3, 0.4, 0.3]),
            single(vec![1.0, 2.0, 4.0], vec![0.3, 0.4, 0.3]),
        ])
        .unwrap();
        let grid = BidGrid::for_instance(&inst);
        let cfg = SolverConfig {
            eps_target: 0.01 * grid.cap,
            ..SolverConfig::default()
        };
        let out = solve_bne(&inst, SimMechanism::plain(AuctionKind::FirstPrice), grid, &cfg, None).unwrap();
        assert!(out.converged, "epsilon {}", out.certificate.epsilon);
    }
}
