//! Scenario configuration, read from a TOML document.

use serde::{Deserialize, Serialize};
use simrev_core::equilibrium::{BidGrid, SolveMethod, DEFAULT_FP_WEIGHT, DEFAULT_GRID_STEPS};
use simrev_core::instance::{random_instance, FamilyKind, GeneratorConfig};
use simrev_core::mechanisms::{AuctionKind, DEFAULT_DELTA};
use simrev_core::valuations::{Feasibility, ItemTypeSpace, ProductDistribution, Token, Valuation};
use simrev_core::{BidderSpec, Instance};

use crate::HarnessError;

/// Checks run when the config names none.
pub const DEFAULT_CHECKS: &[&str] = &[
    "c_efficiency",
    "invariance",
    "beta_conditions",
    "rev_upper",
    "main_theorem",
    "reserve_bound",
    "lemma_chains",
    "mu_structure",
    "concentration",
    "monotonicity",
];

/// Every check name the harness knows.
pub const KNOWN_CHECKS: &[&str] = &[
    "c_efficiency",
    "counterexample_s2a",
    "invariance",
    "beta_conditions",
    "rev_upper",
    "main_theorem",
    "reserve_bound",
    "lemma_chains",
    "mu_structure",
    "concentration",
    "monotonicity",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub instance: InstanceConfig,
    #[serde(default)]
    pub mechanism: MechanismConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceConfig {
    /// A generated instance; see `GeneratorConfig` for the draw.
    Random {
        bidders: usize,
        items: usize,
        #[serde(default)]
        seed: u64,
        max_atoms: Option<usize>,
        max_value: Option<u32>,
        concentration: Option<f64>,
        families: Option<Vec<FamilyKind>>,
        xos_clauses: Option<usize>,
    },
    Explicit {
        bidders: Vec<BidderConfig>,
    },
    /// `n` unit-demand bidders valuing their own item at 1 and others at `eps`.
    OwnItemUnitDemand { bidders: usize, eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationKind {
    Additive,
    UnitDemand,
    Xos,
    /// Additive over the best `cardinality` items.
    Cardinality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TokenValue {
    Scalar(f64),
    Clauses(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BidderConfig {
    pub valuation: ValuationKind,
    /// `values[j][k]`: token `k` of item `j`, a number or one number per XOS clause.
    pub values: Vec<Vec<TokenValue>>,
    /// `pmf[j][k]`; uniform over each item's tokens when omitted.
    pub pmf: Option<Vec<Vec<f64>>>,
    pub cardinality: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wrapper {
    #[default]
    None,
    EntryFee,
    Reserve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismConfig {
    #[serde(default = "default_rule")]
    pub rule: AuctionKind,
    #[serde(default)]
    pub wrapper: Wrapper,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Explicit entry fees; derived from the equilibrium when omitted.
    pub fees: Option<Vec<f64>>,
    /// Explicit reserves `r[i][j]`; the best catalog matrix when omitted.
    pub reserves: Option<Vec<Vec<f64>>>,
}

fn default_rule() -> AuctionKind {
    AuctionKind::FirstPrice
}
fn default_delta() -> f64 {
    DEFAULT_DELTA
}

impl Default for MechanismConfig {
    fn default() -> Self {
        MechanismConfig {
            rule: default_rule(),
            wrapper: Wrapper::None,
            delta: default_delta(),
            fees: None,
            reserves: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    #[default]
    HalfValue,
    Random,
    /// Bid 1 on your own item and 0 elsewhere.
    OwnItem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Bid cap `H`; 1.25 times the largest value when omitted.
    pub cap: Option<f64>,
    #[serde(default = "default_method")]
    pub method: SolveMethod,
    /// Absolute target; `eps_fraction · H` when omitted.
    pub eps_target: Option<f64>,
    #[serde(default = "default_eps_fraction")]
    pub eps_fraction: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub start: StartKind,
    #[serde(default = "default_fp_weight")]
    pub fp_weight: f64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_b")]
    pub b: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_reserve_seeds")]
    pub reserve_seeds: Vec<u64>,
    #[serde(default)]
    pub exact_rational: bool,
    #[serde(default)]
    pub mc_samples: usize,
}

fn default_steps() -> usize {
    DEFAULT_GRID_STEPS
}
fn default_method() -> SolveMethod {
    SolveMethod::IteratedBestResponse
}
fn default_eps_fraction() -> f64 {
    0.01
}
fn default_max_iters() -> usize {
    20000
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_fp_weight() -> f64 {
    DEFAULT_FP_WEIGHT
}
fn default_budget() -> u64 {
    1 << 24
}
fn default_b() -> f64 {
    0.2
}
fn default_c() -> f64 {
    0.5
}
fn default_reserve_seeds() -> Vec<u64> {
    vec![0, 1]
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            steps: default_steps(),
            cap: None,
            method: default_method(),
            eps_target: None,
            eps_fraction: default_eps_fraction(),
            max_iters: default_max_iters(),
            seeds: default_seeds(),
            start: StartKind::HalfValue,
            fp_weight: default_fp_weight(),
            budget: default_budget(),
            b: default_b(),
            c: default_c(),
            reserve_seeds: default_reserve_seeds(),
            exact_rational: false,
            mc_samples: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    #[serde(default = "default_check_names")]
    pub names: Vec<String>,
    #[serde(default = "default_c_values")]
    pub c_values: Vec<f64>,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    /// Upward value shift for the monotonicity check.
    #[serde(default = "default_shift")]
    pub shift: f64,
}

fn default_check_names() -> Vec<String> {
    DEFAULT_CHECKS.iter().map(|s| s.to_string()).collect()
}
fn default_c_values() -> Vec<f64> {
    vec![0.5]
}
fn default_deltas() -> Vec<f64> {
    vec![0.1, 0.5, 0.9]
}
fn default_shift() -> f64 {
    1.0
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            names: default_check_names(),
            c_values: default_c_values(),
            deltas: default_deltas(),
            shift: default_shift(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub start_seed: u64,
}

fn default_count() -> usize {
    20
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            count: default_count(),
            start_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
}

fn default_dir() -> String {
    "out".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir() }
    }
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        for name in &self.checks.names {
            if !KNOWN_CHECKS.contains(&name.as_str()) {
                return Err(config_err(format!("unknown check {name:?}")));
            }
        }
        let s = &self.solver;
        if s.steps == 0 || s.max_iters == 0 || s.seeds.is_empty() {
            return Err(config_err("solver needs steps, max_iters and at least one seed"));
        }
        if !(s.eps_fraction > 0.0) || s.eps_target.is_some_and(|e| !(e > 0.0)) {
            return Err(config_err("equilibrium targets must be positive"));
        }
        if !(s.b > 0.0 && s.b < 1.0) || !(s.c > 0.0 && s.c <= 1.0) {
            return Err(config_err("need b in (0, 1) and c in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.mechanism.delta) {
            return Err(config_err("delta must lie in [0, 1]"));
        }
        if self.checks.deltas.iter().any(|d| !(0.0..=1.0).contains(d)) {
            return Err(config_err("check deltas must lie in [0, 1]"));
        }
        if self.checks.c_values.iter().any(|c| !(*c > 0.0)) || !(self.checks.shift >= 0.0) {
            return Err(config_err("c values must be positive and the shift non-negative"));
        }
        Ok(())
    }

    /// The instance, with `seed` replacing the configured random seed.
    pub fn build_instance(&self, seed: Option<u64>) -> Result<Instance, HarnessError> {
        match &self.instance {
            InstanceConfig::Random {
                bidders,
                items,
                seed: s,
                max_atoms,
                max_value,
                concentration,
                families,
                xos_clauses,
            } => {
                let mut g = GeneratorConfig::new(*bidders, *items);
                if let Some(x) = max_atoms {
                    g.max_atoms = *x;
                }
                if let Some(x) = max_value {
                    g.max_value = *x;
                }
                if let Some(x) = concentration {
                    g.concentration = *x;
                }
                if let Some(x) = families {
                    g.families = x.clone();
                }
                if let Some(x) = xos_clauses {
                    g.xos_clauses = *x;
                }
                Ok(random_instance(&g, seed.unwrap_or(*s))?)
            }
            InstanceConfig::Explicit { bidders } => {
                let specs = bidders
                    .iter()
                    .map(BidderConfig::to_spec)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Instance::new(specs)?)
            }
            InstanceConfig::OwnItemUnitDemand { bidders, eps } => Ok(Instance::own_item_unit_demand(*bidders, *eps)?),
        }
    }

    /// The bid grid: `H / steps` spacing up to the configured or derived cap.
    pub fn grid(&self, inst: &Instance) -> Result<BidGrid, HarnessError> {
        let cap = self.solver.cap.unwrap_or_else(|| {
            let top = 1.25 * inst.max_single_value();
            if top > 0.0 {
                top
            } else {
                1.0
            }
        });
        Ok(BidGrid::new(cap / self.solver.steps as f64, cap)?)
    }
}

impl BidderConfig {
    fn to_spec(&self) -> Result<BidderSpec, HarnessError> {
        let tokens: Vec<Vec<Token>> = self
            .values
            .iter()
            .enumerate()
            .map(|(j, list)| {
                list.iter()
                    .enumerate()
                    .map(|(k, v)| Token {
                        label: format!("{j}.{k}"),
                        values: match v {
                            TokenValue::Scalar(x) => vec![*x],
                            TokenValue::Clauses(xs) => xs.clone(),
                        },
                    })
                    .collect()
            })
            .collect();
        let space = ItemTypeSpace::new(tokens)?;
        let dist = match &self.pmf {
            Some(p) => ProductDistribution::new(p.clone(), &space)?,
            None => ProductDistribution::uniform(&space),
        };
        let valuation = match self.valuation {
            ValuationKind::Additive => Valuation::Additive,
            ValuationKind::UnitDemand => Valuation::UnitDemand,
            ValuationKind::Xos => {
                let clauses = self
                    .values
                    .iter()
                    .flatten()
                    .map(|v| match v {
                        TokenValue::Scalar(_) => 1,
                        TokenValue::Clauses(xs) => xs.len(),
                    })
                    .min()
                    .unwrap_or(1);
                Valuation::Xos { clauses }
            }
            ValuationKind::Cardinality => Valuation::ConstrainedAdditive {
                feasible: Feasibility::Cardinality(
                    self.cardinality
                        .ok_or_else(|| config_err("cardinality valuation needs `cardinality`"))?,
                ),
            },
        };
        valuation.validate(&space)?;
        Ok(BidderSpec { space, dist, valuation })
    }
}
