//! Command execution and report emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use simrev_core::benchmarks::{opt_revenue, opt_welfare, revenue_lp, OptOptions};
use simrev_core::duality::{
    analyze, concentration_check, ef_rev, identity_coupling, verify_revenue_monotonicity, Analysis, AnalysisOptions,
};
use simrev_core::equilibrium::{
    default_slack, own_item_profile, BidGrid, Game, SimMechanism, SolveOutcome, SolverConfig, StrategyProfile,
};
use simrev_core::report::{CheckResult, VerificationReport};
use simrev_core::valuations::lipschitz_constant;
use simrev_core::{Instance, ItemSet};

use crate::config::{InstanceConfig, ScenarioConfig, StartKind, Wrapper};
use crate::HarnessError;

/// Command-line overrides shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub checks: Vec<String>,
    pub exact_rational: bool,
    pub mc_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Verify,
    Sweep,
    Decompose,
    Opt,
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// False when a check failed beyond its slack.
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

pub fn run(cmd: Command, cfg: &ScenarioConfig, ov: &Overrides) -> Result<Outcome, HarnessError> {
    let mut cfg = cfg.clone();
    if !ov.checks.is_empty() {
        cfg.checks.names = ov.checks.clone();
    }
    if ov.exact_rational {
        cfg.solver.exact_rational = true;
    }
    if let Some(n) = ov.mc_samples {
        cfg.solver.mc_samples = n;
    }
    cfg.validate()?;
    let out = ov.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    fs::create_dir_all(&out).map_err(|e| io_err(&out, e))?;
    match cmd {
        Command::Solve => cmd_solve(&cfg, ov.seed, &out),
        Command::Verify => cmd_verify(&cfg, ov.seed, &out),
        Command::Sweep => cmd_sweep(&cfg, ov.seed, &out),
        Command::Decompose => cmd_decompose(&cfg, ov.seed, &out),
        Command::Opt => cmd_opt(&cfg, ov.seed, &out),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        source: e,
    }
}

fn write(path: PathBuf, text: &str, files: &mut Vec<PathBuf>) -> Result<(), HarnessError> {
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    files.push(path);
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, HarnessError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| HarnessError::Config(format!("serialization failed: {e}")))
}

fn lp_options(cfg: &ScenarioConfig) -> OptOptions {
    OptOptions {
        exact_rational: cfg.solver.exact_rational,
        ..OptOptions::default()
    }
}

fn solver_config(cfg: &ScenarioConfig, grid: BidGrid, seed: u64) -> SolverConfig {
    let s = &cfg.solver;
    SolverConfig {
        method: s.method,
        eps_target: s.eps_target.unwrap_or(s.eps_fraction * grid.cap),
        max_iters: s.max_iters,
        seed,
        random_start: s.start == StartKind::Random,
        fp_weight: s.fp_weight,
        budget: s.budget as u128,
    }
}

fn start_profile(cfg: &ScenarioConfig, inst: &Instance, grid: BidGrid) -> Result<Option<StrategyProfile>, HarnessError> {
    match cfg.solver.start {
        StartKind::OwnItem => {
            if inst.bidders() != inst.items() || inst.models().iter().any(|m| m.type_count() != 1) {
                return Err(HarnessError::Config(
                    "own_item start needs as many bidders as items and one type each".into(),
                ));
            }
            let p = own_item_profile(inst.bidders(), grid);
            for row in &p.strategies {
                for mb in row {
                    for (bids, _) in &mb.support {
                        for b in bids {
                            grid.code_of(*b)?;
                        }
                    }
                }
            }
            Ok(Some(p))
        }
        _ => Ok(None),
    }
}

fn analysis_options(cfg: &ScenarioConfig, grid: BidGrid) -> AnalysisOptions {
    AnalysisOptions {
        kind: cfg.mechanism.rule,
        c: cfg.solver.c,
        b: cfg.solver.b,
        delta: cfg.mechanism.delta,
        grid: Some(grid),
        eps_fraction: cfg.solver.eps_target.map_or(cfg.solver.eps_fraction, |e| e / grid.cap),
        solver: solver_config(cfg, grid, cfg.solver.seeds[0]),
        reserve_seeds: cfg.solver.reserve_seeds.clone(),
        lp: lp_options(cfg),
        ..AnalysisOptions::default()
    }
}

/// Lazily computed shared state of one scenario.
struct Scenario<'a> {
    cfg: &'a ScenarioConfig,
    inst: Instance,
    grid: BidGrid,
    analysis: Option<Analysis>,
}

impl<'a> Scenario<'a> {
    fn new(cfg: &'a ScenarioConfig, seed: Option<u64>) -> Result<Self, HarnessError> {
        let inst = cfg.build_instance(seed)?;
        let grid = cfg.grid(&inst)?;
        Ok(Scenario {
            cfg,
            inst,
            grid,
            analysis: None,
        })
    }

    fn analysis(&mut self) -> Result<&Analysis, HarnessError> {
        if self.analysis.is_none() {
            self.analysis = Some(analyze(&self.inst, &analysis_options(self.cfg, self.grid))?);
        }
        Ok(self.analysis.as_ref().expect("just computed"))
    }

    fn mechanism(&mut self) -> Result<SimMechanism, HarnessError> {
        let rule = self.cfg.mechanism.rule;
        match (self.cfg.mechanism.wrapper, &self.cfg.mechanism.reserves) {
            (Wrapper::Reserve, Some(r)) => Ok(SimMechanism::with_reserves(rule, r.clone())),
            (Wrapper::Reserve, None) => {
                let rp = &self.analysis()?.decomposition.rp;
                let reserves = rp
                    .best
                    .map(|k| rp.runs[k].candidate.reserves.clone())
                    .ok_or_else(|| HarnessError::Config("no derived reserve matrix".into()))?;
                Ok(SimMechanism::with_reserves(rule, reserves))
            }
            _ => Ok(SimMechanism::plain(rule)),
        }
    }

    fn fees(&mut self) -> Result<Vec<f64>, HarnessError> {
        match &self.cfg.mechanism.fees {
            Some(f) => Ok(f.clone()),
            None => Ok(self.analysis()?.decomposition.median_fees.clone()),
        }
    }

    fn solve(&self, game: &Game, seed: u64) -> Result<SolveOutcome, HarnessError> {
        let start = start_profile(self.cfg, &self.inst, self.grid)?;
        Ok(game.solve(&solver_config(self.cfg, self.grid, seed), start.as_ref())?)
    }
}

#[derive(Debug, Clone, Serialize)]
struct McRow {
    bidder: usize,
    type_index: usize,
    exact: f64,
    mean: f64,
    stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
struct EntryFeeSummary {
    fees: Vec<f64>,
    delta: f64,
    epsilon_wrapped: f64,
    revenue: f64,
}

#[derive(Debug, Clone, Serialize)]
struct SolveRecord<'a> {
    seed: u64,
    mechanism: &'a SimMechanism,
    epsilon: f64,
    converged: bool,
    iterations: usize,
    switched_to_fictitious_play: bool,
    revenue: f64,
    welfare: f64,
    entry_fee: Option<EntryFeeSummary>,
    mc_check: Vec<McRow>,
    profile: &'a StrategyProfile,
    certificate: &'a simrev_core::equilibrium::RegretCertificate,
}

fn cmd_solve(cfg: &ScenarioConfig, seed: Option<u64>, out: &Path) -> Result<Outcome, HarnessError> {
    let mut sc = Scenario::new(cfg, seed)?;
    let mech = sc.mechanism()?;
    let fees = if cfg.mechanism.wrapper == Wrapper::EntryFee {
        Some(sc.fees()?)
    } else {
        None
    };
    let game = Game::new(&sc.inst, mech.clone(), sc.grid, cfg.solver.budget as u128)?;
    let mut files = Vec::new();
    let mut timings = BTreeMap::new();
    for &s in &cfg.solver.seeds {
        let t0 = Instant::now();
        let sol = sc.solve(&game, s)?;
        let entry_fee = match &fees {
            Some(f) => {
                let inv = game.check_entry_fee_invariance(&sol.profile, f, cfg.mechanism.delta)?;
                Some(EntryFeeSummary {
                    fees: f.clone(),
                    delta: cfg.mechanism.delta,
                    epsilon_wrapped: inv.epsilon_wrapped,
                    revenue: game.entry_fee_revenue(&sol.profile, f, cfg.mechanism.delta)?,
                })
            }
            None => None,
        };
        let mut mc_check = Vec::new();
        if cfg.solver.mc_samples > 0 {
            for i in 0..sc.inst.bidders() {
                for t in 0..sc.inst.model(i).type_count() {
                    let bids = &sol.profile.strategies[i][t].support[0].0;
                    let exact = game.interim_utility(&sol.profile, i, t, bids)?;
                    let (mean, stderr) =
                        game.interim_utility_mc(&sol.profile, i, t, bids, cfg.solver.mc_samples, s)?;
                    mc_check.push(McRow {
                        bidder: i,
                        type_index: t,
                        exact,
                        mean,
                        stderr,
                    });
                }
            }
        }
        let record = SolveRecord {
            seed: s,
            mechanism: &mech,
            epsilon: sol.certificate.epsilon,
            converged: sol.converged,
            iterations: sol.iterations,
            switched_to_fictitious_play: sol.switched_to_fictitious_play,
            revenue: game.revenue(&sol.profile, ItemSet::full(sc.inst.items()))?,
            welfare: game.welfare(&sol.profile)?,
            entry_fee,
            mc_check,
            profile: &sol.profile,
            certificate: &sol.certificate,
        };
        write(out.join(format!("solve_seed{s}.json")), &to_json(&record)?, &mut files)?;
        timings.insert(format!("solve_seed{s}"), t0.elapsed().as_secs_f64());
    }
    write(out.join("timings.json"), &to_json(&timings)?, &mut files)?;
    Ok(Outcome { passed: true, files })
}

/// Runs the named checks and returns the report with per-check runtimes.
pub fn verification(
    cfg: &ScenarioConfig,
    seed: Option<u64>,
) -> Result<(VerificationReport, BTreeMap<String, f64>), HarnessError> {
    let mut sc = Scenario::new(cfg, seed)?;
    let mut report = VerificationReport::new();
    let mut timings = BTreeMap::new();
    let seeds = cfg.solver.seeds.clone();
    for name in &cfg.checks.names {
        let t0 = Instant::now();
        let mut part = match name.as_str() {
            "c_efficiency" => check_c_efficiency(&mut sc)?,
            "counterexample_s2a" => check_counterexample(&mut sc)?,
            "invariance" => check_invariance(&mut sc)?,
            "concentration" => {
                let mut r = check_valuation_concentration(&sc.inst)?;
                r.extend(analysis_group(&mut sc, "concentration_mu_hat")?);
                r
            }
            "monotonicity" => {
                let shifted = sc.inst.shifted(cfg.checks.shift)?;
                let res = verify_revenue_monotonicity(&sc.inst, &shifted, &identity_coupling(&sc.inst), lp_options(cfg))?;
                let mut r = VerificationReport::new();
                r.push(res.check);
                r
            }
            "beta_conditions" => analysis_group(&mut sc, "beta_conditions")?,
            "rev_upper" => analysis_group(&mut sc, "rev_upper")?,
            "main_theorem" => analysis_group(&mut sc, "main_theorem_")?,
            "reserve_bound" => analysis_group(&mut sc, "reserve_bound[")?,
            "lemma_chains" => analysis_group(&mut sc, "chain_")?,
            "mu_structure" => analysis_group(&mut sc, "mu_")?,
            other => return Err(HarnessError::Config(format!("unknown check {other:?}"))),
        };
        for c in &mut part.checks {
            if c.seeds.is_empty() {
                c.seeds = seeds.clone();
            }
        }
        report.extend(part);
        timings.insert(name.clone(), t0.elapsed().as_secs_f64());
    }
    Ok((report, timings))
}

fn analysis_group(sc: &mut Scenario, prefix: &str) -> Result<VerificationReport, HarnessError> {
    let a = sc.analysis()?;
    let mut r = VerificationReport::new();
    for c in a.report.checks.iter().filter(|c| c.name.starts_with(prefix)) {
        r.push(c.clone());
    }
    Ok(r)
}

fn check_c_efficiency(sc: &mut Scenario) -> Result<VerificationReport, HarnessError> {
    let mech = sc.mechanism()?;
    let game = Game::new(&sc.inst, mech, sc.grid, sc.cfg.solver.budget as u128)?;
    let mut report = VerificationReport::new();
    for &seed in &sc.cfg.solver.seeds {
        let sol = sc.solve(&game, seed)?;
        let slack = default_slack(&sol.certificate, sc.grid, sc.inst.items());
        report.push(
            CheckResult::new(
                &format!("equilibrium[seed={seed}]"),
                "eps <= eps_target",
                sol.certificate.epsilon,
                solver_config(sc.cfg, sc.grid, seed).eps_target,
                0.0,
            )
            .with_seeds(vec![seed]),
        );
        for &c in &sc.cfg.checks.c_values {
            for mut row in game.check_c_efficiency(&sol.profile, c, slack)?.checks {
                row.name = row.name.replacen("c_efficiency[", &format!("c_efficiency[c={c},seed={seed},"), 1);
                row.seeds = vec![seed];
                report.push(row);
            }
        }
    }
    Ok(report)
}

fn check_counterexample(sc: &mut Scenario) -> Result<VerificationReport, HarnessError> {
    let game = Game::new(&sc.inst, SimMechanism::plain(sc.cfg.mechanism.rule), sc.grid, sc.cfg.solver.budget as u128)?;
    let seed = sc.cfg.solver.seeds[0];
    let sol = sc.solve(&game, seed)?;
    let p = &sol.profile;
    let m = sc.inst.items();
    let revenue = game.revenue(p, ItemSet::full(m))?;
    let welfare = game.welfare(p)?;
    let mut report = VerificationReport::new();
    report.push(
        CheckResult::new("counterexample_s2a_equilibrium", "eps <= 0", sol.certificate.epsilon, 0.0, 1e-12)
            .with_note(format!("revenue {revenue}, welfare {welfare}")),
    );
    let rev: Vec<f64> = game.item_revenues(p)?;
    for &c in &sc.cfg.checks.c_values {
        for i in 0..sc.inst.bidders().min(m) {
            let s = ItemSet::full(m).minus(ItemSet::singleton(i));
            let model = sc.inst.model(i);
            for t in 0..model.type_count() {
                let mu = game.mu(p, i, t, s)?;
                let r: f64 = s.iter().map(|j| rev[j]).sum();
                let witness = format!("i={i},t={t},S={s}");
                report.push(
                    CheckResult::new(
                        &format!("counterexample_s2a[c={c},{witness}]"),
                        "c*v_i(t,S) <= mu_i(t,S) + Rev(S)",
                        c * model.value(t, s),
                        mu + r,
                        0.0,
                    )
                    .with_witness(witness)
                    .expecting_failure(),
                );
            }
        }
    }
    Ok(report)
}

fn check_invariance(sc: &mut Scenario) -> Result<VerificationReport, HarnessError> {
    let game = Game::new(&sc.inst, SimMechanism::plain(sc.cfg.mechanism.rule), sc.grid, sc.cfg.solver.budget as u128)?;
    let seed = sc.cfg.solver.seeds[0];
    let sol = sc.solve(&game, seed)?;
    let mut fee_sets: Vec<(String, Vec<f64>)> = Vec::new();
    match &sc.cfg.mechanism.fees {
        Some(f) => fee_sets.push(("configured".into(), f.clone())),
        None => {
            let u = game.interim_utilities(&sol.profile)?;
            fee_sets.push(("ef_rev".into(), ef_rev(&sc.inst, &u).1));
            fee_sets.push(("half_cap".into(), vec![sc.grid.cap / 2.0; sc.inst.bidders()]));
        }
    }
    let mut report = VerificationReport::new();
    for (label, fees) in &fee_sets {
        for &delta in &sc.cfg.checks.deltas {
            let inv = game.check_entry_fee_invariance(&sol.profile, fees, delta)?;
            let mut c = CheckResult::new(
                &format!("invariance[fees={label},delta={delta}]"),
                "|r_EF - g(r_A)| <= 1e-9 and delta*r_A <= r_EF <= r_A",
                inv.max_abs_error,
                0.0,
                1e-9,
            )
            .with_note(format!("fees {fees:?}, eps_A {}, eps_EF {}", inv.epsilon_base, inv.epsilon_wrapped));
            if !inv.bounds_hold {
                c.passed = false;
                c = c.with_note("regret bounds fail");
            }
            report.push(c);
        }
    }
    Ok(report)
}

fn check_valuation_concentration(inst: &Instance) -> Result<VerificationReport, HarnessError> {
    let mut report = VerificationReport::new();
    let m = inst.items();
    for i in 0..inst.bidders() {
        let spec = inst.spec(i);
        let ell = lipschitz_constant(&spec.valuation, &spec.space)?;
        let model = inst.model(i);
        for set in ItemSet::all(m).filter(|s| !s.is_empty()) {
            let atoms: Vec<(f64, f64)> = (0..model.type_count())
                .map(|t| (model.value(t, set), model.prob[t]))
                .collect();
            report.push(concentration_check(&format!("concentration[i={i},I={set}]"), &atoms, ell));
        }
    }
    Ok(report)
}

fn cmd_verify(cfg: &ScenarioConfig, seed: Option<u64>, out: &Path) -> Result<Outcome, HarnessError> {
    let (report, timings) = verification(cfg, seed)?;
    let mut files = Vec::new();
    write(out.join("report.json"), &to_json(&report)?, &mut files)?;
    write(out.join("report.csv"), &report.to_csv(), &mut files)?;
    write(out.join("timings.json"), &to_json(&timings)?, &mut files)?;
    Ok(Outcome {
        passed: report.all_as_expected(),
        files,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub seed: u64,
    pub opt: f64,
    pub rev_ef: f64,
    pub rev_rp: f64,
    /// `OPT / (42·Rev_EF + 189·Rev_RP)`.
    pub ratio: f64,
    pub epsilon: f64,
    pub converged: bool,
    pub flagged: bool,
    pub main_theorem_passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub instances: usize,
    pub failures: usize,
    pub flagged: usize,
    pub ratio_min: f64,
    pub ratio_q25: f64,
    pub ratio_median: f64,
    pub ratio_q75: f64,
    pub ratio_max: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Analyses `count` random instances in parallel, merged by seed order.
pub fn sweep(cfg: &ScenarioConfig, seed: Option<u64>) -> Result<(Vec<SweepRow>, SweepSummary), HarnessError> {
    if !matches!(cfg.instance, InstanceConfig::Random { .. }) {
        return Err(HarnessError::Config("sweep needs a random instance source".into()));
    }
    let start = seed.unwrap_or(cfg.sweep.start_seed);
    let rows = (0..cfg.sweep.count as u64)
        .into_par_iter()
        .map(|k| -> Result<SweepRow, HarnessError> {
            let s = start + k;
            let inst = cfg.build_instance(Some(s))?;
            let grid = cfg.grid(&inst)?;
            let a = analyze(&inst, &analysis_options(cfg, grid))?;
            let d = &a.decomposition;
            let denom = 42.0 * d.rev_ef + 189.0 * d.rp.value;
            Ok(SweepRow {
                seed: s,
                opt: d.opt,
                rev_ef: d.rev_ef,
                rev_rp: d.rp.value,
                ratio: if denom > 0.0 { d.opt / denom } else if d.opt > 0.0 { f64::INFINITY } else { 0.0 },
                epsilon: d.epsilon,
                converged: d.equilibrium_converged,
                flagged: d.flagged(),
                main_theorem_passed: a
                    .report
                    .checks
                    .iter()
                    .filter(|c| c.name.starts_with("main_theorem_"))
                    .all(|c| c.passed),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let summary = SweepSummary {
        instances: rows.len(),
        failures: rows.iter().filter(|r| !r.main_theorem_passed).count(),
        flagged: rows.iter().filter(|r| r.flagged).count(),
        ratio_min: quantile(&ratios, 0.0),
        ratio_q25: quantile(&ratios, 0.25),
        ratio_median: quantile(&ratios, 0.5),
        ratio_q75: quantile(&ratios, 0.75),
        ratio_max: quantile(&ratios, 1.0),
    };
    Ok((rows, summary))
}

fn cmd_sweep(cfg: &ScenarioConfig, seed: Option<u64>, out: &Path) -> Result<Outcome, HarnessError> {
    let t0 = Instant::now();
    let (rows, summary) = sweep(cfg, seed)?;
    let mut csv = String::from("seed,opt,rev_ef,rev_rp,ratio,epsilon,converged,flagged,main_theorem_passed\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{:?},{:?},{:?},{:?},{:?},{},{},{}\n",
            r.seed, r.opt, r.rev_ef, r.rev_rp, r.ratio, r.epsilon, r.converged, r.flagged, r.main_theorem_passed
        ));
    }
    let mut files = Vec::new();
    write(out.join("sweep.csv"), &csv, &mut files)?;
    write(out.join("sweep_summary.json"), &to_json(&summary)?, &mut files)?;
    let timings = BTreeMap::from([("sweep".to_string(), t0.elapsed().as_secs_f64())]);
    write(out.join("timings.json"), &to_json(&timings)?, &mut files)?;
    Ok(Outcome {
        passed: summary.failures == 0,
        files,
    })
}

fn cmd_decompose(cfg: &ScenarioConfig, seed: Option<u64>, out: &Path) -> Result<Outcome, HarnessError> {
    let t0 = Instant::now();
    let mut sc = Scenario::new(cfg, seed)?;
    let a = sc.analysis()?;
    let mut files = Vec::new();
    write(out.join("decomposition.json"), &to_json(&a.decomposition)?, &mut files)?;
    write(out.join("decomposition_checks.csv"), &a.report.to_csv(), &mut files)?;
    let timings = BTreeMap::from([("decompose".to_string(), t0.elapsed().as_secs_f64())]);
    write(out.join("timings.json"), &to_json(&timings)?, &mut files)?;
    Ok(Outcome { passed: true, files })
}

#[derive(Debug, Clone, Serialize)]
struct OptRecord<'a> {
    revenue: &'a simrev_core::benchmarks::OptRevenue,
    welfare: f64,
}

fn cmd_opt(cfg: &ScenarioConfig, seed: Option<u64>, out: &Path) -> Result<Outcome, HarnessError> {
    let t0 = Instant::now();
    let inst = cfg.build_instance(seed)?;
    let opts = lp_options(cfg);
    let rev = opt_revenue(&inst, opts)?;
    let welfare = opt_welfare(&inst, opts.budget)?;
    let (lp, _) = revenue_lp(&inst, opts.budget)?;
    let mut files = Vec::new();
    write(out.join("opt.json"), &to_json(&OptRecord { revenue: &rev, welfare })?, &mut files)?;
    write(out.join("opt.lp"), &lp.to_lp_format(), &mut files)?;
    let timings = BTreeMap::from([("opt".to_string(), t0.elapsed().as_secs_f64())]);
    write(out.join("timings.json"), &to_json(&timings)?, &mut files)?;
    Ok(Outcome { passed: true, files })
}
