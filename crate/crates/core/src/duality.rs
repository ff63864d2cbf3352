//! The revenue decomposition: β thresholds, cutoffs `c_i` and `τ_i`, the
//! Single/Tail/Core/CoreHat terms, the entry fees and reserve prices they
//! induce, and end-to-end checks of the resulting revenue bounds.

use crate::benchmarks::{ironed_curve, opt_revenue, OptOptions, OptRevenue};
use crate::equilibrium::{
    default_slack, BidGrid, Game, SimMechanism, SolverConfig, StrategyProfile, DEFAULT_ENUM_BUDGET,
};
use crate::error::{Error, Result};
use crate::instance::{Instance, VALUE_TOL};
use crate::mechanisms::AuctionKind;
use crate::report::{CheckResult, VerificationReport};
use crate::sets::ItemSet;
use serde::{Deserialize, Serialize};

/// Default budget parameter `b`.
pub const DEFAULT_B: f64 = 0.2;
/// Tolerance for comparisons against LP output.
pub const LP_CHECK_TOL: f64 = 1e-9;

/// How a β entry was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaRule {
    /// Smallest candidate `x` with `Pr[V >= x] <= b·Σ f π`.
    Scan,
    /// Largest candidate `x` with `Pr[V >= x] >= b·Σ f π`, used when the scan
    /// value breaks `Σ f π <= Pr[V >= β] / b`.
    Fallback,
    /// The atom at `x` counts as clearing with fraction `λ`, so that the
    /// clearing probability equals `b·Σ f π` exactly.
    TieBreak,
}

/// How β is chosen from the allocation probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaPolicy {
    /// Keep the scan value everywhere and only flag violations.
    ScanOnly,
    /// Replace scan entries that break `Σ f π <= Pr[V >= β] / b`.
    Repair,
    /// Split the atom at the threshold with an independent uniform tie-breaker.
    #[default]
    TieBreak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaMatrix {
    pub beta: Vec<Vec<f64>>,
    /// Fraction of the atom at `β_ij` that clears the threshold; 1 except
    /// under the tie-break policy.
    pub lambda: Vec<Vec<f64>>,
    /// The scan value of every entry.
    pub scan: Vec<Vec<f64>>,
    pub b: f64,
    pub rule: Vec<Vec<BetaRule>>,
    /// `Σ_i Pr[V_ij clears β_ij]` per item.
    pub item_mass: Vec<f64>,
    /// `Σ_t f(t) π_ij(t)` per bidder and item.
    pub alloc_mass: Vec<Vec<f64>>,
    /// `Pr[V_ij clears β_ij]` per bidder and item.
    pub survival: Vec<Vec<f64>>,
    pub item_condition_holds: bool,
    pub alloc_condition_holds: bool,
}

impl BetaMatrix {
    /// Both β conditions hold; otherwise the instance is flagged.
    pub fn verified(&self) -> bool {
        self.item_condition_holds && self.alloc_condition_holds
    }

    /// Weight with which value `v` of item `j` clears `β_ij + shift`: 1 above,
    /// `λ_ij` at the threshold, 0 below.
    pub fn clears(&self, i: usize, j: usize, v: f64, shift: f64) -> f64 {
        let x = self.beta[i][j] + shift;
        if v > x + VALUE_TOL {
            1.0
        } else if v >= x - VALUE_TOL {
            self.lambda[i][j]
        } else {
            0.0
        }
    }

    /// `Pr[V_ij clears β_ij + shift]`.
    pub fn clear_prob(&self, inst: &Instance, i: usize, j: usize, shift: f64) -> f64 {
        inst.model(i)
            .value_atoms(j)
            .iter()
            .map(|a| a.prob * self.clears(i, j, a.value, shift))
            .sum()
    }

    /// Weight with which `v` clears `max{β_ij, x}` for a plain threshold `x`.
    pub fn clears_max(&self, i: usize, j: usize, v: f64, x: f64) -> f64 {
        if x > self.beta[i][j] + VALUE_TOL {
            if v >= x - VALUE_TOL {
                1.0
            } else {
                0.0
            }
        } else {
            self.clears(i, j, v, 0.0)
        }
    }

    /// `Pr[V_ij clears max{β_ij, x}]`.
    pub fn clear_prob_max(&self, inst: &Instance, i: usize, j: usize, x: f64) -> f64 {
        inst.model(i)
            .value_atoms(j)
            .iter()
            .map(|a| a.prob * self.clears_max(i, j, a.value, x))
            .sum()
    }
}

/// `{0} ∪ atoms ∪ {max atom + 1}` for item `j` of bidder `i`, sorted.
fn candidates(inst: &Instance, i: usize, j: usize) -> Vec<f64> {
    let atoms = inst.model(i).value_atoms(j);
    let top = atoms.last().map_or(0.0, |a| a.value);
    let mut xs = vec![0.0];
    xs.extend(atoms.iter().map(|a| a.value));
    xs.push(top + 1.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= VALUE_TOL);
    xs
}

/// The atom `x` and fraction `λ` with `Pr[V > x] + λ·Pr[V = x] = theta`.
fn split_quantile(inst: &Instance, i: usize, j: usize, theta: f64) -> (f64, f64) {
    let atoms = inst.model(i).value_atoms(j);
    let top = atoms.last().map_or(0.0, |a| a.value);
    if theta <= LP_CHECK_TOL {
        return (top + 1.0, 1.0);
    }
    let mut above = 0.0;
    for a in atoms.iter().rev() {
        if above + a.prob >= theta - LP_CHECK_TOL {
            return (a.value, ((theta - above) / a.prob).clamp(0.0, 1.0));
        }
        above += a.prob;
    }
    (atoms.first().map_or(0.0, |a| a.value), 1.0)
}

/// Chooses β from the allocation probabilities `pi[i][t][j]`.
pub fn select_beta(inst: &Instance, pi: &[Vec<Vec<f64>>], b: f64, policy: BetaPolicy) -> Result<BetaMatrix> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::InvalidArgument(format!("b = {b} not in (0, 1]")));
    }
    let (n, m) = (inst.bidders(), inst.items());
    if pi.len() != n {
        return Err(Error::InvalidArgument("allocation has the wrong number of bidders".into()));
    }
    let mut out = BetaMatrix {
        beta: vec![vec![0.0; m]; n],
        lambda: vec![vec![1.0; m]; n],
        scan: vec![vec![0.0; m]; n],
        b,
        rule: vec![vec![BetaRule::Scan; m]; n],
        item_mass: vec![0.0; m],
        alloc_mass: vec![vec![0.0; m]; n],
        survival: vec![vec![0.0; m]; n],
        item_condition_holds: false,
        alloc_condition_holds: false,
    };
    for i in 0..n {
        let model = inst.model(i);
        if pi[i].len() != model.type_count() {
            return Err(Error::InvalidArgument(format!("allocation of bidder {i} has the wrong number of types")));
        }
        for j in 0..m {
            let mass: f64 = pi[i].iter().zip(&model.prob).map(|(p, f)| f * p[j]).sum();
            out.alloc_mass[i][j] = mass;
            let theta = b * mass;
            let xs = candidates(inst, i, j);
            let scan = *xs
                .iter()
                .find(|&&x| model.survival(j, x) <= theta + LP_CHECK_TOL)
                .expect("the sentinel has zero survival");
            out.scan[i][j] = scan;
            out.beta[i][j] = scan;
            let broken = mass > model.survival(j, scan) / b + LP_CHECK_TOL;
            match policy {
                BetaPolicy::ScanOnly => {}
                BetaPolicy::Repair if broken => {
                    out.beta[i][j] = *xs
                        .iter()
                        .rev()
                        .find(|&&x| model.survival(j, x) >= theta - LP_CHECK_TOL)
                        .unwrap_or(&0.0);
                    out.rule[i][j] = BetaRule::Fallback;
                }
                BetaPolicy::Repair => {}
                BetaPolicy::TieBreak => {
                    let (x, lambda) = split_quantile(inst, i, j, theta);
                    out.beta[i][j] = x;
                    out.lambda[i][j] = lambda;
                    out.rule[i][j] = BetaRule::TieBreak;
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..m {
            out.survival[i][j] = out.clear_prob(inst, i, j, 0.0);
        }
    }
    out.item_mass = (0..m).map(|j| (0..n).map(|i| out.survival[i][j]).sum()).collect();
    out.item_condition_holds = out.item_mass.iter().all(|&x| x <= b + LP_CHECK_TOL);
    out.alloc_condition_holds = (0..n)
        .all(|i| (0..m).all(|j| out.alloc_mass[i][j] <= out.survival[i][j] / b + LP_CHECK_TOL));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cutoffs {
    pub c: Vec<f64>,
    pub tau: Vec<f64>,
    /// `Σ_j Pr[V_ij clears β_ij + c_i]`.
    pub c_mass: Vec<f64>,
    /// `Σ_j Pr[V_ij clears max{β_ij, τ_i}]`.
    pub tau_mass: Vec<f64>,
    /// `A_i = {j : β_ij <= τ_i}`.
    pub a: Vec<ItemSet>,
    /// Per type and item, the probability that `j ∈ T_i(t)`, i.e. that
    /// `V_ij` clears `β_ij + c_i`; `C_i(t)` is the complement.
    pub above: Vec<Vec<Vec<f64>>>,
    /// `Y_i(t) = {j : V_ij < τ_i}`.
    pub below_tau: Vec<Vec<ItemSet>>,
}

impl Cutoffs {
    /// The distribution of `C_i(t)` as `(set, probability)` pairs.
    pub fn core_sets(&self, i: usize, t: usize, m: usize) -> Vec<(ItemSet, f64)> {
        let w = &self.above[i][t];
        ItemSet::all(m)
            .map(|x| {
                let p: f64 = (0..m).map(|j| if x.contains(j) { 1.0 - w[j] } else { w[j] }).product();
                (x, p)
            })
            .filter(|&(_, p)| p > 0.0)
            .collect()
    }
}

/// Computes `c_i`, `τ_i` and the per-type sets by scanning atom candidates.
pub fn compute_cutoffs(inst: &Instance, beta: &BetaMatrix) -> Cutoffs {
    let (n, m) = (inst.bidders(), inst.items());
    let mut out = Cutoffs {
        c: vec![0.0; n],
        tau: vec![0.0; n],
        c_mass: vec![0.0; n],
        tau_mass: vec![0.0; n],
        a: vec![ItemSet::EMPTY; n],
        above: Vec::with_capacity(n),
        below_tau: Vec::with_capacity(n),
    };
    for i in 0..n {
        let model = inst.model(i);
        let b = &beta.beta[i];
        let c_mass = |x: f64| (0..m).map(|j| beta.clear_prob(inst, i, j, x)).sum::<f64>();
        let tau_mass = |x: f64| (0..m).map(|j| beta.clear_prob_max(inst, i, j, x)).sum::<f64>();

        let mut xs = vec![0.0];
        let mut top = 0.0f64;
        for j in 0..m {
            for a in model.value_atoms(j) {
                top = top.max(a.value);
                if a.value - b[j] > 0.0 {
                    xs.push(a.value - b[j]);
                }
            }
        }
        xs.push(top + 1.0);
        xs.sort_by(f64::total_cmp);
        let c = *xs.iter().find(|&&x| c_mass(x) <= 0.5 + VALUE_TOL).expect("sentinel qualifies");

        let mut ts = vec![0.0];
        ts.extend((0..m).flat_map(|j| model.value_atoms(j)).map(|a| a.value));
        ts.push(top + 1.0);
        ts.sort_by(f64::total_cmp);
        let tau = *ts.iter().find(|&&x| tau_mass(x) <= 0.5 + VALUE_TOL).expect("sentinel qualifies");

        out.c[i] = c;
        out.tau[i] = tau;
        out.c_mass[i] = c_mass(c);
        out.tau_mass[i] = tau_mass(tau);
        out.a[i] = ItemSet::from_items((0..m).filter(|&j| {
            b[j] < tau - VALUE_TOL || (b[j] <= tau + VALUE_TOL && beta.lambda[i][j] >= 1.0)
        }));
        let mut above = Vec::new();
        let mut below = Vec::new();
        for t in 0..model.type_count() {
            let v = |j: usize| model.single_value(t, j);
            above.push((0..m).map(|j| beta.clears(i, j, v(j), c)).collect());
            below.push(ItemSet::from_items((0..m).filter(|&j| v(j) < tau - VALUE_TOL)));
        }
        out.above.push(above);
        out.below_tau.push(below);
    }
    out
}

/// The smallest maximizer `j` of `V_k − β_k` with the weight of the event
/// `V_j` clears `β_j`; the type lies in `R_j` with that probability and below
/// every threshold otherwise.
pub fn region(values: &[f64], beta: &BetaMatrix, i: usize) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (k, (&v, &b)) in values.iter().zip(&beta.beta[i]).enumerate() {
        let d = v - b;
        if best.map_or(true, |(_, x)| d > x + VALUE_TOL) {
            best = Some((k, d));
        }
    }
    best.map(|(j, _)| (j, beta.clears(i, j, values[j], 0.0)))
        .filter(|&(_, w)| w > 0.0)
}

/// `Σ_i Σ_t f(t) Σ_j 1[t ∈ R_j] π_ij(t) φ̃_ij(V_ij(t))`.
pub fn single_term(inst: &Instance, pi: &[Vec<Vec<f64>>], beta: &BetaMatrix) -> Result<f64> {
    let m = inst.items();
    let mut total = 0.0;
    for (i, model) in inst.models().iter().enumerate() {
        let curves = (0..m)
            .map(|j| ironed_curve(&model.value_atoms(j)))
            .collect::<Result<Vec<_>>>()?;
        for t in 0..model.type_count() {
            let values: Vec<f64> = (0..m).map(|j| model.single_value(t, j)).collect();
            if let Some((j, w)) = region(&values, beta, i) {
                let phi = curves[j]
                    .phi_of(values[j])
                    .expect("type values are atoms of their own distribution");
                total += model.prob[t] * w * pi[i][t][j] * phi;
            }
        }
    }
    Ok(total)
}

/// `Σ_i Σ_j Σ_{V_ij >= β_ij + c_i} f_ij V_ij Σ_{k≠j} Pr[V_ik − β_ik >= V_ij − β_ij]`.
pub fn tail_term(inst: &Instance, beta: &BetaMatrix, cut: &Cutoffs) -> f64 {
    let m = inst.items();
    let mut total = 0.0;
    for (i, model) in inst.models().iter().enumerate() {
        let b = &beta.beta[i];
        for j in 0..m {
            for a in model.value_atoms(j) {
                let w = beta.clears(i, j, a.value, cut.c[i]);
                if w == 0.0 {
                    continue;
                }
                let others: f64 = (0..m)
                    .filter(|&k| k != j)
                    .map(|k| beta.clear_prob(inst, i, k, a.value - b[j]))
                    .sum();
                total += w * a.prob * a.value * others;
            }
        }
    }
    total
}

/// `(Core, CoreHat)` from `sigma[i][t][mask]`.
pub fn core_terms(inst: &Instance, sigma: &[Vec<Vec<f64>>], cut: &Cutoffs) -> (f64, f64) {
    let m = inst.items();
    let mut core = 0.0;
    let mut hat = 0.0;
    for (i, model) in inst.models().iter().enumerate() {
        for t in 0..model.type_count() {
            let cores = cut.core_sets(i, t, m);
            for s in ItemSet::all(m) {
                let p = model.prob[t] * sigma[i][t][s.index()];
                if p == 0.0 {
                    continue;
                }
                core += p * cores.iter().map(|&(c, q)| q * model.value(t, s.intersect(c))).sum::<f64>();
                hat += p * model.value(t, s.intersect(cut.below_tau[i][t]));
            }
        }
    }
    (core, hat)
}

/// `inf{x >= 0 : Pr[g <= x] >= 1/2}` for atoms `(value, prob)`.
pub fn inf_median(atoms: &[(f64, f64)]) -> f64 {
    let mut sorted = atoms.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = sorted.iter().map(|a| a.1).sum();
    let mut acc = 0.0;
    for (v, p) in sorted {
        acc += p;
        if acc >= total / 2.0 - VALUE_TOL {
            return v.max(0.0);
        }
    }
    0.0
}

/// `Σ_i max_e e·Pr[u_i >= e]` over utility atoms, with the maximizing fees.
pub fn ef_rev(inst: &Instance, utilities: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let mut total = 0.0;
    let mut fees = Vec::with_capacity(utilities.len());
    for (model, u) in inst.models().iter().zip(utilities) {
        let mut best = (0.0, 0.0);
        for &e in u.iter().filter(|&&e| e > 0.0) {
            let pr: f64 = u
                .iter()
                .zip(&model.prob)
                .filter(|(&x, _)| x >= e - VALUE_TOL)
                .map(|(_, p)| p)
                .sum();
            if e * pr > best.0 {
                best = (e * pr, e);
            }
        }
        total += best.0;
        fees.push(best.1);
    }
    (total, fees)
}

/// A reserve matrix with its two validity conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveCandidate {
    pub name: String,
    pub reserves: Vec<Vec<f64>>,
    /// `Σ_i Pr[V_ij >= r_ij]` per item, bounded by `b`.
    pub item_mass: Vec<f64>,
    /// `Σ_j Pr[V_ij >= r_ij]` per bidder, bounded by 1/2.
    pub bidder_mass: Vec<f64>,
    pub valid: bool,
    /// `Σ r_ij Pr[V_ij >= r_ij]`.
    pub target: f64,
}

impl ReserveCandidate {
    pub fn new(inst: &Instance, name: &str, reserves: Vec<Vec<f64>>, b: f64) -> Self {
        let (n, m) = (inst.bidders(), inst.items());
        let pr = |i: usize, j: usize| inst.model(i).survival(j, reserves[i][j]);
        let item_mass: Vec<f64> = (0..m).map(|j| (0..n).map(|i| pr(i, j)).sum()).collect();
        let bidder_mass: Vec<f64> = (0..n).map(|i| (0..m).map(|j| pr(i, j)).sum()).collect();
        let valid = item_mass.iter().all(|&x| x <= b + VALUE_TOL)
            && bidder_mass.iter().all(|&x| x <= 0.5 + VALUE_TOL);
        let target = (0..n)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| reserves[i][j] * pr(i, j))
            .sum();
        ReserveCandidate {
            name: name.to_string(),
            reserves,
            item_mass,
            bidder_mass,
            valid,
            target,
        }
    }
}

/// The three reserve constructions: `β + c`, `max{β, τ}` and `β + P`.
pub fn reserves_catalog(inst: &Instance, beta: &BetaMatrix, cut: &Cutoffs) -> Vec<ReserveCandidate> {
    let (n, m) = (inst.bidders(), inst.items());
    let b = &beta.beta;
    let shifted: Vec<Vec<f64>> = (0..n).map(|i| (0..m).map(|j| b[i][j] + cut.c[i]).collect()).collect();
    let capped: Vec<Vec<f64>> = (0..n).map(|i| (0..m).map(|j| b[i][j].max(cut.tau[i])).collect()).collect();
    let posted: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..m).map(|j| b[i][j] + posted_shift(inst, i, j, b[i][j], cut.c[i])).collect())
        .collect();
    vec![
        ReserveCandidate::new(inst, "beta_plus_c", shifted, beta.b),
        ReserveCandidate::new(inst, "max_beta_tau", capped, beta.b),
        ReserveCandidate::new(inst, "beta_plus_p", posted, beta.b),
    ]
}

/// `argmax_{x >= c} (x + β)·Pr[V − β >= x]` over atom candidates, smallest on ties.
pub fn posted_shift(inst: &Instance, i: usize, j: usize, beta: f64, c: f64) -> f64 {
    let model = inst.model(i);
    let mut xs = vec![c];
    xs.extend(
        model
            .value_atoms(j)
            .iter()
            .map(|a| a.value - beta)
            .filter(|&x| x >= c - VALUE_TOL),
    );
    xs.sort_by(f64::total_cmp);
    let mut best = (f64::NEG_INFINITY, c);
    for x in xs {
        let r = (x + beta) * model.survival(j, x + beta);
        if r > best.0 + VALUE_TOL {
            best = (r, x);
        }
    }
    best.1
}

/// One equilibrium found for a reserve matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveEquilibrium {
    pub seed: u64,
    pub revenue: f64,
    pub epsilon: f64,
    pub converged: bool,
    pub profile: StrategyProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveRun {
    pub candidate: ReserveCandidate,
    pub equilibria: Vec<ReserveEquilibrium>,
    /// Worst revenue over the equilibria found.
    pub worst: f64,
}

impl ReserveRun {
    pub fn worst_equilibrium(&self) -> Option<&ReserveEquilibrium> {
        self.equilibria.iter().min_by(|a, b| a.revenue.total_cmp(&b.revenue))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpRevLower {
    pub value: f64,
    pub best: Option<usize>,
    pub runs: Vec<ReserveRun>,
}

/// Solves every catalog matrix from each seed and keeps, per matrix, the
/// worst revenue found; the bound is the best of those.
pub fn rprev_lower(
    inst: &Instance,
    kind: AuctionKind,
    catalog: &[ReserveCandidate],
    grid: BidGrid,
    cfg: &SolverConfig,
    seeds: &[u64],
) -> Result<RpRevLower> {
    let mut runs = Vec::with_capacity(catalog.len());
    for cand in catalog {
        let game = Game::new(inst, SimMechanism::with_reserves(kind, cand.reserves.clone()), grid, cfg.budget)?;
        let mut equilibria = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let run_cfg = SolverConfig {
                seed,
                random_start: seed != 0,
                ..cfg.clone()
            };
            let out = game.solve(&run_cfg, None)?;
            let revenue = game.revenue(&out.profile, ItemSet::full(inst.items()))?;
            equilibria.push(ReserveEquilibrium {
                seed,
                revenue,
                epsilon: out.certificate.epsilon,
                converged: out.converged,
                profile: out.profile,
            });
        }
        let worst = equilibria.iter().map(|e| e.revenue).fold(f64::INFINITY, f64::min);
        runs.push(ReserveRun {
            candidate: cand.clone(),
            equilibria,
            worst: if worst.is_finite() { worst } else { 0.0 },
        });
    }
    let best = (0..runs.len()).max_by(|&a, &b| runs[a].worst.total_cmp(&runs[b].worst));
    Ok(RpRevLower {
        value: best.map_or(0.0, |k| runs[k].worst),
        best,
        runs,
    })
}

/// `OPT <= 2·Single + 4·Tail + 4·Core`.
pub fn verify_rev_upper(opt: f64, single: f64, tail: f64, core: f64) -> CheckResult {
    CheckResult::new(
        "rev_upper",
        "OPT <= 2*Single + 4*Tail + 4*Core",
        opt,
        2.0 * single + 4.0 * tail + 4.0 * core,
        LP_CHECK_TOL * opt.abs().max(1.0),
    )
}

/// `E[g] <= 2a + 2.5·ℓ` for a random variable given by `(value, prob)` atoms.
pub fn concentration_check(name: &str, atoms: &[(f64, f64)], ell: f64) -> CheckResult {
    let mean: f64 = atoms.iter().map(|(v, p)| v * p).sum();
    let a = inf_median(atoms);
    CheckResult::new(name, "E[g] <= 2*a + 2.5*l", mean, 2.0 * a + 2.5 * ell, 1e-12 * mean.abs().max(1.0))
        .with_note(format!("median a = {a}, l = {ell}"))
}

/// Checks that `coupling[i][t][t']` is a joint pmf with the two instances'
/// type marginals whose support only pairs dominated types.
pub fn validate_coupling(d: &Instance, d2: &Instance, coupling: &[Vec<Vec<f64>>]) -> Result<()> {
    if d.bidders() != d2.bidders() || d.items() != d2.items() || coupling.len() != d.bidders() {
        return Err(Error::InvalidArgument("coupled instances differ in shape".into()));
    }
    for (i, joint) in coupling.iter().enumerate() {
        let (a, b) = (d.model(i), d2.model(i));
        if joint.len() != a.type_count() || joint.iter().any(|r| r.len() != b.type_count()) {
            return Err(Error::InvalidArgument(format!("coupling of bidder {i} has the wrong shape")));
        }
        for (t, row) in joint.iter().enumerate() {
            let s: f64 = row.iter().sum();
            if (s - a.prob[t]).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!("coupling marginal mismatch for bidder {i}, type {t}")));
            }
        }
        for t2 in 0..b.type_count() {
            let s: f64 = joint.iter().map(|r| r[t2]).sum();
            if (s - b.prob[t2]).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!("coupling marginal mismatch for bidder {i}, type {t2}")));
            }
        }
        for (t, row) in joint.iter().enumerate() {
            for (t2, &p) in row.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                for s in ItemSet::all(d.items()) {
                    if a.value(t, s) > b.value(t2, s) + VALUE_TOL {
                        return Err(Error::InvalidArgument(format!(
                            "dominance fails for bidder {i}: type {t} beats {t2} on {s}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The coupling pairing type `t` with type `t` when both instances have the
/// same type indexing.
pub fn identity_coupling(d: &Instance) -> Vec<Vec<Vec<f64>>> {
    d.models()
        .iter()
        .map(|m| {
            (0..m.type_count())
                .map(|t| (0..m.type_count()).map(|u| if u == t { m.prob[t] } else { 0.0 }).collect())
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityResult {
    pub opt: f64,
    pub opt_shifted: f64,
    pub ratio: f64,
    pub check: CheckResult,
}

/// `OPT(D') >= OPT(D) / 229` for a validated dominating coupling.
pub fn verify_revenue_monotonicity(
    d: &Instance,
    d2: &Instance,
    coupling: &[Vec<Vec<f64>>],
    opts: OptOptions,
) -> Result<MonotonicityResult> {
    validate_coupling(d, d2, coupling)?;
    let opt = opt_revenue(d, opts)?.value;
    let opt_shifted = opt_revenue(d2, opts)?.value;
    let ratio = if opt > 0.0 { opt_shifted / opt } else { f64::INFINITY };
    let check = CheckResult::new(
        "revenue_monotonicity",
        "OPT(D)/229 <= OPT(D')",
        opt / 229.0,
        opt_shifted,
        LP_CHECK_TOL * opt.abs().max(1.0),
    )
    .with_note(format!("raw ratio OPT(D')/OPT(D) = {ratio}"));
    Ok(MonotonicityResult {
        opt,
        opt_shifted,
        ratio,
        check,
    })
}

/// Settings for a full analysis of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub kind: AuctionKind,
    pub c: f64,
    pub b: f64,
    pub beta_policy: BetaPolicy,
    pub delta: f64,
    pub grid: Option<BidGrid>,
    /// Equilibrium target as a fraction of the grid cap.
    pub eps_fraction: f64,
    pub solver: SolverConfig,
    pub reserve_seeds: Vec<u64>,
    pub lp: OptOptions,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            kind: AuctionKind::FirstPrice,
            c: 0.5,
            b: DEFAULT_B,
            beta_policy: BetaPolicy::default(),
            delta: crate::mechanisms::DEFAULT_DELTA,
            grid: None,
            eps_fraction: 0.01,
            solver: SolverConfig::default(),
            reserve_seeds: vec![0, 1],
            lp: OptOptions::default(),
        }
    }
}

/// Every intermediate quantity of the decomposition for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub opt: f64,
    pub beta: BetaMatrix,
    pub cutoffs: Cutoffs,
    pub single: f64,
    pub tail: f64,
    pub core: f64,
    pub core_hat: f64,
    pub core_gap: f64,
    pub grid: BidGrid,
    pub epsilon: f64,
    pub equilibrium_converged: bool,
    pub revenue: f64,
    pub welfare: f64,
    pub utilities: Vec<Vec<f64>>,
    /// `μ̂_i(t, [m])` per type.
    pub mu_hat: Vec<Vec<f64>>,
    pub median_fees: Vec<f64>,
    pub ef_rev: f64,
    pub ef_rev_fees: Vec<f64>,
    /// Exact revenue of the entry-fee wrapper at the median and at the
    /// EF-Rev-maximizing fees.
    pub ef_revenue_median: f64,
    pub ef_revenue_best_fees: f64,
    pub rev_ef: f64,
    pub rp: RpRevLower,
    pub profile: StrategyProfile,
}

impl DecompositionReport {
    /// Whether both β conditions hold; flagged instances are excluded from
    /// the theorem checks in acceptance runs.
    pub fn flagged(&self) -> bool {
        !self.beta.verified()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub decomposition: DecompositionReport,
    pub report: VerificationReport,
}

/// Runs the whole pipeline: LP optimum, decomposition, an ε-BNE of the base
/// auction, entry fees, reserve catalog equilibria, and every numeric check.
pub fn analyze(inst: &Instance, opts: &AnalysisOptions) -> Result<Analysis> {
    let (n, m) = (inst.bidders(), inst.items());
    let opt: OptRevenue = opt_revenue(inst, opts.lp)?;
    let beta = select_beta(inst, &opt.pi, opts.b, opts.beta_policy)?;
    let cut = compute_cutoffs(inst, &beta);
    let single = single_term(inst, &opt.pi, &beta)?;
    let tail = tail_term(inst, &beta, &cut);
    let (core, core_hat) = core_terms(inst, &opt.sigma, &cut);

    let grid = opts.grid.unwrap_or_else(|| BidGrid::for_instance(inst));
    let solver = SolverConfig {
        eps_target: opts.eps_fraction * grid.cap,
        ..opts.solver.clone()
    };
    let budget = if solver.budget == 0 { DEFAULT_ENUM_BUDGET } else { solver.budget };
    let game = Game::new(inst, SimMechanism::plain(opts.kind), grid, budget)?;
    let solved = game.solve(&solver, None)?;
    let s = solved.profile;
    let eps = solved.certificate.epsilon;
    let revenue = game.revenue(&s, ItemSet::full(m))?;
    let welfare = game.welfare(&s)?;
    let utilities = game.interim_utilities(&s)?;

    let mut mu_tables = Vec::with_capacity(n);
    for i in 0..n {
        let model = inst.model(i);
        mu_tables.push(
            (0..model.type_count())
                .map(|t| game.mu_table(&s, i, t))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mu_hat: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            mu_tables[i]
                .iter()
                .enumerate()
                .map(|(t, tab)| tab[cut.below_tau[i][t].index()])
                .collect()
        })
        .collect();
    let median_fees: Vec<f64> = (0..n)
        .map(|i| {
            let atoms: Vec<(f64, f64)> = mu_hat[i].iter().copied().zip(inst.model(i).prob.iter().copied()).collect();
            inf_median(&atoms)
        })
        .collect();
    let (ef, ef_fees) = ef_rev(inst, &utilities);
    let ef_revenue_median = game.entry_fee_revenue(&s, &median_fees, opts.delta)?;
    let ef_revenue_best_fees = game.entry_fee_revenue(&s, &ef_fees, opts.delta)?;
    let rev_ef = revenue.max(ef_revenue_median).max(ef_revenue_best_fees);

    let catalog = reserves_catalog(inst, &beta, &cut);
    let rp = rprev_lower(inst, opts.kind, &catalog, grid, &solver, &opts.reserve_seeds)?;

    let mut report = VerificationReport::new();
    let flag_note = |c: CheckResult, beta: &BetaMatrix| {
        if beta.verified() {
            c
        } else {
            c.with_note("beta conditions fail: instance flagged")
        }
    };

    report.push(
        CheckResult::flag(
            "beta_conditions",
            "sum_i Pr[V_ij>=beta_ij] <= b and sum_t f*pi_ij <= Pr[V_ij>=beta_ij]/b",
            beta.verified(),
        )
        .with_note(format!("policy {:?}", opts.beta_policy)),
    );
    report.push(flag_note(verify_rev_upper(opt.value, single, tail, core), &beta));

    let slack_c = default_slack(&solved.certificate, grid, m);
    let mut ceff = game.check_c_efficiency(&s, opts.c, slack_c)?;
    let worst = ceff
        .checks
        .iter()
        .min_by(|a, b| a.achieved_slack.total_cmp(&b.achieved_slack))
        .cloned();
    let all_ok = ceff.all_as_expected();
    let count = ceff.checks.len();
    ceff.checks.clear();
    if let Some(w) = worst {
        let mut agg = CheckResult::new(
            "c_efficiency",
            "c*v_i(t,S) <= mu_i(t,S) + Rev(S) for all (i,t,S)",
            w.lhs,
            w.rhs,
            slack_c,
        )
        .with_witness(w.name.clone())
        .with_note(format!("{count} triples, tightest shown"));
        agg.passed = all_ok;
        report.push(agg);
    }

    let eps_rp = rp
        .runs
        .iter()
        .flat_map(|r| r.equilibria.iter().map(|e| e.epsilon))
        .fold(0.0, f64::max);
    let rev_rp = rp.value;
    let slack_main = (4.0 / opts.c) * n as f64 * m as f64 * (eps + grid.eta) + (87.0 + 51.0 / opts.c) * n as f64 * eps_rp;
    let general = CheckResult::new(
        "main_theorem_general_c",
        "OPT <= (21/c)*Rev(A_EF) + (87 + 51/c)*Rev(A_RP)",
        opt.value,
        (21.0 / opts.c) * rev_ef + (87.0 + 51.0 / opts.c) * rev_rp,
        slack_main,
    );
    let ratio = if rev_ef + rev_rp > 0.0 { opt.value / (42.0 * rev_ef + 189.0 * rev_rp) } else { f64::INFINITY };
    report.push(flag_note(general, &beta));
    report.push(flag_note(
        CheckResult::new(
            "main_theorem_half",
            "OPT <= 42*Rev(A_EF) + 189*Rev(A_RP)",
            opt.value,
            42.0 * rev_ef + 189.0 * rev_rp,
            slack_main,
        )
        .with_note(format!("realized ratio OPT/(42*Rev_EF + 189*Rev_RP) = {ratio}")),
        &beta,
    ));

    for run in &rp.runs {
        if !run.candidate.valid {
            continue;
        }
        for e in &run.equilibria {
            report.push(
                CheckResult::new(
                    &format!("reserve_bound[{},seed={}]", run.candidate.name, e.seed),
                    "sum r*Pr[V>=r] <= (2/(1-b))*Rev(A_RP) + n*eps",
                    run.candidate.target,
                    2.0 / (1.0 - opts.b) * e.revenue,
                    n as f64 * e.epsilon,
                )
                .with_seeds(vec![e.seed]),
            );
        }
    }

    // Core − CoreHat <= (1/b)·Σ max{β,τ}·Pr[V >= max{β,τ}] + Σ c_i/2.
    let mut tail_tau = 0.0;
    for i in 0..n {
        for j in 0..m {
            let r = beta.beta[i][j].max(cut.tau[i]);
            tail_tau += r * beta.clear_prob_max(inst, i, j, cut.tau[i]);
        }
    }
    let c_sum: f64 = cut.c.iter().sum();
    report.push(flag_note(
        CheckResult::new(
            "chain_core_gap",
            "Core - CoreHat <= (1/b)*sum max{beta,tau}*Pr[V>=max{beta,tau}] + sum c_i/2",
            core - core_hat,
            tail_tau / opts.b + c_sum / 2.0,
            1e-9,
        ),
        &beta,
    ));
    if let Some(k) = rp.runs.iter().position(|r| r.candidate.name == "max_beta_tau") {
        let run = &rp.runs[k];
        let eps_k = run.equilibria.iter().map(|e| e.epsilon).fold(0.0, f64::max);
        report.push(
            CheckResult::new(
                "chain_tail_tau",
                "sum max{beta,tau}*Pr[V>=max{beta,tau}] <= (2/(1-b))*Rev(A_RP at max{beta,tau}) + n*eps",
                tail_tau,
                2.0 / (1.0 - opts.b) * run.worst,
                n as f64 * eps_k,
            )
            .with_note(if run.candidate.valid { "reserve conditions hold" } else { "reserve conditions fail" }),
        );
    }

    let e_mu_hat: f64 = (0..n)
        .map(|i| mu_hat[i].iter().zip(&inst.model(i).prob).map(|(x, p)| x * p).sum::<f64>())
        .sum();
    report.push(flag_note(
        CheckResult::new(
            "chain_utility_core_hat",
            "c*CoreHat - Rev(A) <= sum_i E[mu_hat_i(t,[m])]",
            opts.c * core_hat - revenue,
            e_mu_hat,
            n as f64 * slack_c,
        ),
        &beta,
    ));
    let tau_sum: f64 = cut.tau.iter().sum();
    report.push(CheckResult::new(
        "chain_utility_entry_fee",
        "sum_i E[mu_hat_i(t,[m])] <= 4*EF-Rev + 2.5*sum tau_i",
        e_mu_hat,
        4.0 * ef + 2.5 * tau_sum,
        4.0 * n as f64 * eps + 5.0 * n as f64 * grid.eta * m as f64,
    ));
    let atom_gap: f64 = (0..n).map(|i| cut.tau[i] * (1.0 - 2.0 * cut.tau_mass[i]).max(0.0)).sum();
    report.push(
        CheckResult::new(
            "chain_tau_sum",
            "sum tau_i <= 2*sum max{beta,tau}*Pr[V>=max{beta,tau}] + atom gap",
            tau_sum,
            2.0 * tail_tau,
            atom_gap + 1e-12,
        )
        .with_note(format!("atom gap {atom_gap}")),
    );

    // μ structure and the concentration bound on μ̂.
    let grid_tol = 2.0 * grid.eta * m as f64;
    for i in 0..n {
        let model = inst.model(i);
        let mut mono: f64 = 0.0;
        let mut subadd: f64 = 0.0;
        for tab in &mu_tables[i] {
            for u in ItemSet::all(m) {
                for v in ItemSet::all(m) {
                    if u.is_subset_of(v) {
                        mono = mono.max(tab[u.index()] - tab[v.index()]);
                    }
                    subadd = subadd.max(tab[u.union(v).index()] - tab[u.index()] - tab[v.index()]);
                }
            }
        }
        report.push(CheckResult::new(
            &format!("mu_monotone[i={i}]"),
            "mu(U) - mu(V) <= 0 for U subset of V",
            mono,
            0.0,
            grid_tol,
        ));
        report.push(CheckResult::new(
            &format!("mu_subadditive[i={i}]"),
            "mu(U+V) - mu(U) - mu(V) <= 0",
            subadd,
            0.0,
            grid_tol,
        ));
        let hat: Vec<Vec<f64>> = mu_tables[i]
            .iter()
            .enumerate()
            .map(|(t, tab)| ItemSet::all(m).map(|s| tab[s.intersect(cut.below_tau[i][t]).index()]).collect())
            .collect();
        let excess = lipschitz_excess(&model.types, &hat, m, cut.tau[i]);
        report.push(CheckResult::new(
            &format!("mu_hat_lipschitz[i={i}]"),
            "|mu_hat(t,X) - mu_hat(t',Y)| - tau_i*d(X,Y) <= 0",
            excess,
            0.0,
            grid_tol,
        ));
        let atoms: Vec<(f64, f64)> = mu_hat[i].iter().copied().zip(model.prob.iter().copied()).collect();
        let mut conc = concentration_check(&format!("concentration_mu_hat[i={i}]"), &atoms, cut.tau[i]);
        conc.slack_budget = grid_tol;
        conc.passed = conc.achieved_slack >= -grid_tol;
        report.push(conc);
    }

    Ok(Analysis {
        decomposition: DecompositionReport {
            opt: opt.value,
            beta,
            cutoffs: cut,
            single,
            tail,
            core,
            core_hat,
            core_gap: core - core_hat,
            grid,
            epsilon: eps,
            equilibrium_converged: solved.converged,
            revenue,
            welfare,
            utilities,
            mu_hat,
            median_fees,
            ef_rev: ef,
            ef_rev_fees: ef_fees,
            ef_revenue_median,
            ef_revenue_best_fees,
            rev_ef,
            rp,
            profile: s,
        },
        report,
    })
}

/// Largest `|g(t,X) − g(t',Y)| − ℓ·d` over all pairs, where
/// `d = |X Δ Y| + |{j ∈ X ∩ Y : t_j ≠ t'_j}|`.
pub fn lipschitz_excess(types: &[Vec<usize>], table: &[Vec<f64>], m: usize, ell: f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for (t, row) in types.iter().zip(table) {
        for (t2, row2) in types.iter().zip(table) {
            let differ = ItemSet::from_items((0..m).filter(|&j| t[j] != t2[j]));
            for x in ItemSet::all(m) {
                for y in ItemSet::all(m) {
                    let d = x.symmetric_difference(y).len() + x.intersect(y).intersect(differ).len();
                    let gap = (row[x.index()] - row2[y.index()]).abs();
                    worst = worst.max(gap - ell * d as f64);
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::scalar_bidder;
    use crate::valuations::Valuation;

    fn uniform12() -> Instance {
        Instance::new(vec![scalar_bidder(vec![vec![1.0, 2.0]], vec![vec![0.5, 0.5]], Valuation::Additive).unwrap()])
            .unwrap()
    }

    #[test]
    fn beta_scan_examples() {
        let inst = uniform12();
        let zero = select_beta(&inst, &[vec![vec![0.0], vec![0.0]]], 0.2, BetaPolicy::ScanOnly).unwrap();
        assert_eq!(zero.beta[0][0], 3.0);
        assert!(zero.verified());
        let full = select_beta(&inst, &[vec![vec![1.0], vec![1.0]]], 1.0, BetaPolicy::ScanOnly).unwrap();
        assert_eq!(full.beta[0][0], 0.0);
        assert!(full.verified());
        let pi = [vec![vec![0.0], vec![1.0]]];
        let half = select_beta(&inst, &pi, 0.2, BetaPolicy::ScanOnly).unwrap();
        assert_eq!(half.beta[0][0], 3.0);
        assert!(!half.alloc_condition_holds);
        assert!(half.item_condition_holds);
        let repaired = select_beta(&inst, &pi, 0.2, BetaPolicy::Repair).unwrap();
        assert_eq!(repaired.scan[0][0], 3.0);
        assert_eq!(repaired.rule[0][0], BetaRule::Fallback);
        assert_eq!(repaired.beta[0][0], 2.0);
        assert!(repaired.alloc_condition_holds);
        assert!(select_beta(&inst, &pi, 0.0, BetaPolicy::Repair).is_err());
    }

    #[test]
    fn tau_and_c_examples() {
        let inst = uniform12();
        let beta = select_beta(&inst, &[vec![vec![1.0], vec![1.0]]], 1.0, BetaPolicy::ScanOnly).unwrap();
        let cut = compute_cutoffs(&inst, &beta);
        assert_eq!(cut.tau[0], 2.0);
        assert_eq!(cut.c[0], 2.0);
        assert_eq!(cut.below_tau[0][0], ItemSet::singleton(0));
        assert_eq!(tail_term(&inst, &beta, &cut), 0.0);
        let high = select_beta(&inst, &[vec![vec![0.0], vec![0.0]]], 0.2, BetaPolicy::ScanOnly).unwrap();
        assert_eq!(compute_cutoffs(&inst, &high).c[0], 0.0);
    }

    #[test]
    fn median_and_ef_rev() {
        assert_eq!(inf_median(&[(2.0, 0.5), (4.0, 0.5)]), 2.0);
        assert_eq!(inf_median(&[(0.0, 1.0)]), 0.0);
        let inst = uniform12();
        assert_eq!(ef_rev(&inst, &[vec![2.0, 4.0]]).0, 2.0);
        assert_eq!(ef_rev(&inst, &[vec![0.0, 0.0]]).0, 0.0);
    }

    #[test]
    fn posted_shift_prefers_smallest_tie() {
        let inst = uniform12();
        assert_eq!(posted_shift(&inst, 0, 0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn point_mass_single() {
        let inst = Instance::new(vec![scalar_bidder(vec![vec![3.0]], vec![vec![1.0]], Valuation::Additive).unwrap()])
            .unwrap();
        let pi = vec![vec![vec![1.0]]];
        let beta = BetaMatrix {
            beta: vec![vec![0.0]],
            lambda: vec![vec![1.0]],
            scan: vec![vec![0.0]],
            b: 0.2,
            rule: vec![vec![BetaRule::Scan]],
            item_mass: vec![1.0],
            alloc_mass: vec![vec![1.0]],
            survival: vec![vec![1.0]],
            item_condition_holds: false,
            alloc_condition_holds: true,
        };
        assert_eq!(single_term(&inst, &pi, &beta).unwrap(), 3.0);
    }

    #[test]
    fn regions() {
        let two = Instance::new(vec![scalar_bidder(
            vec![vec![1.0, 2.0], vec![1.0, 2.0]],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            Valuation::Additive,
        )
        .unwrap()])
        .unwrap();
        let zero = select_beta(&two, &[vec![vec![1.0, 1.0]; 4]], 1.0, BetaPolicy::ScanOnly).unwrap();
        assert_eq!(zero.beta[0], vec![0.0, 0.0]);
        assert_eq!(region(&[1.0, 2.0], &zero, 0), Some((1, 1.0)));
        assert_eq!(region(&[2.0, 2.0], &zero, 0), Some((0, 1.0)));
        let high = select_beta(&two, &[vec![vec![0.0, 0.0]; 4]], 0.2, BetaPolicy::ScanOnly).unwrap();
        assert_eq!(region(&[1.0, 1.0], &high, 0), None);
    }

    #[test]
    fn tie_break_hits_the_target_exactly() {
        let inst = uniform12();
        let pi = [vec![vec![0.0], vec![1.0]]];
        let beta = select_beta(&inst, &pi, 0.2, BetaPolicy::TieBreak).unwrap();
        assert_eq!(beta.beta[0][0], 2.0);
        assert!((beta.lambda[0][0] - 0.2).abs() < 1e-12);
        assert!((beta.survival[0][0] - 0.1).abs() < 1e-12);
        assert!(beta.verified());
        assert_eq!(beta.clears(0, 0, 2.0, 0.0), beta.lambda[0][0]);
        assert_eq!(beta.clears(0, 0, 1.0, 0.0), 0.0);
        let none = select_beta(&inst, &[vec![vec![0.0], vec![0.0]]], 0.2, BetaPolicy::TieBreak).unwrap();
        assert_eq!((none.beta[0][0], none.survival[0][0]), (3.0, 0.0));
        let cut = compute_cutoffs(&inst, &beta);
        assert_eq!(cut.c[0], 0.0);
        let sets = cut.core_sets(0, 1, 1);
        let p_core: f64 = sets.iter().filter(|(x, _)| x.contains(0)).map(|(_, p)| p).sum();
        assert!((p_core - 0.8).abs() < 1e-12);
    }

    #[test]
    fn identity_coupling_gives_ratio_one() {
        let inst = uniform12();
        let res = verify_revenue_monotonicity(&inst, &inst, &identity_coupling(&inst), OptOptions::default()).unwrap();
        assert!((res.ratio - 1.0).abs() < 1e-9);
        assert!(res.check.passed);
    }
}
