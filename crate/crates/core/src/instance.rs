//! Auction environments: bidders, items, type distributions and valuations,
//! plus the dense tables every solver reads from.

use crate::error::{check_budget, Error, Result};
use crate::sets::ItemSet;
use crate::valuations::{
    single_item_value, value, verify_axioms, ItemTypeSpace, ProductDistribution, Token, Valuation,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

/// Tolerance used when comparing a value against a threshold.
pub const VALUE_TOL: f64 = 1e-12;

/// Largest item count any exhaustive routine accepts.
pub const MAX_ITEMS: usize = 8;

/// Budget on the number of (type, set) cells materialised per bidder.
const TABLE_BUDGET: u128 = 1 << 22;

/// One bidder's type space, type distribution and valuation family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidderSpec {
    pub space: ItemTypeSpace,
    pub dist: ProductDistribution,
    pub valuation: Valuation,
}

/// A single atom of a discrete distribution over reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Dense view of one bidder: enumerated types with probabilities and the
/// full value table `values[type][mask]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BidderModel {
    pub items: usize,
    pub types: Vec<Vec<usize>>,
    pub prob: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// `single[j][token] = V(t_j)`.
    pub single: Vec<Vec<f64>>,
    /// `token_prob[j][token] = f_j(token)`.
    pub token_prob: Vec<Vec<f64>>,
}

impl BidderModel {
    fn compile(spec: &BidderSpec) -> Result<Self> {
        let m = spec.space.items();
        check_budget(
            "value table",
            spec.space.type_count() << m,
            TABLE_BUDGET,
        )?;
        spec.valuation.validate(&spec.space)?;
        let types = spec.space.enumerate_types();
        let prob = types.iter().map(|t| spec.dist.prob(t)).collect();
        let values = types
            .iter()
            .map(|t| {
                ItemSet::all(m)
                    .map(|s| value(&spec.valuation, &spec.space, t, s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let single = (0..m)
            .map(|j| {
                (0..spec.space.tokens(j).len())
                    .map(|k| single_item_value(&spec.valuation, &spec.space, k, j))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let token_prob = (0..m).map(|j| spec.dist.item(j).to_vec()).collect();
        Ok(BidderModel {
            items: m,
            types,
            prob,
            values,
            single,
            token_prob,
        })
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn value(&self, t: usize, s: ItemSet) -> f64 {
        self.values[t][s.index()]
    }

    /// `V(t_j)` for the type with index `t`.
    pub fn single_value(&self, t: usize, j: usize) -> f64 {
        self.single[j][self.types[t][j]]
    }

    /// The distribution of `V_j`, atoms merged and sorted by value.
    pub fn value_atoms(&self, j: usize) -> Vec<Atom> {
        merge_atoms(
            self.single[j]
                .iter()
                .zip(&self.token_prob[j])
                .map(|(&value, &prob)| Atom { value, prob }),
        )
    }

    /// `Pr[V_j >= x]`.
    pub fn survival(&self, j: usize, x: f64) -> f64 {
        self.single[j]
            .iter()
            .zip(&self.token_prob[j])
            .filter(|(&v, _)| v >= x - VALUE_TOL)
            .map(|(_, &p)| p)
            .sum()
    }

    /// `Pr[V_j > x]`.
    pub fn strict_survival(&self, j: usize, x: f64) -> f64 {
        self.single[j]
            .iter()
            .zip(&self.token_prob[j])
            .filter(|(&v, _)| v > x + VALUE_TOL)
            .map(|(_, &p)| p)
            .sum()
    }

    pub fn max_single_value(&self) -> f64 {
        self.single
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }
}

/// Sorts atoms by value and merges equal values.
pub fn merge_atoms(atoms: impl IntoIterator<Item = Atom>) -> Vec<Atom> {
    let mut v: Vec<Atom> = atoms.into_iter().filter(|a| a.prob > 0.0).collect();
    v.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<Atom> = Vec::with_capacity(v.len());
    for a in v {
        match out.last_mut() {
            Some(last) if (last.value - a.value).abs() <= VALUE_TOL => last.prob += a.prob,
            _ => out.push(a),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct InstanceSpec {
    bidders: Vec<BidderSpec>,
}

/// The full auction environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceSpec", into = "InstanceSpec")]
pub struct Instance {
    bidders: Vec<BidderSpec>,
    models: Vec<BidderModel>,
}

impl TryFrom<InstanceSpec> for Instance {
    type Error = Error;

    fn try_from(spec: InstanceSpec) -> Result<Self> {
        Instance::new(spec.bidders)
    }
}

impl From<Instance> for InstanceSpec {
    fn from(inst: Instance) -> Self {
        InstanceSpec {
            bidders: inst.bidders,
        }
    }
}

impl Instance {
    /// Validates every bidder and materialises the dense tables. Tabular
    /// valuations are checked against the axioms here.
    pub fn new(bidders: Vec<BidderSpec>) -> Result<Self> {
        let first = bidders
            .first()
            .ok_or_else(|| Error::InvalidInstance("no bidders".into()))?;
        let m = first.space.items();
        if m > MAX_ITEMS {
            return Err(Error::InvalidInstance(format!(
                "{m} items exceeds the limit of {MAX_ITEMS}"
            )));
        }
        for (i, b) in bidders.iter().enumerate() {
            if b.space.items() != m {
                return Err(Error::InvalidInstance(format!(
                    "bidder {i} has {} items, bidder 0 has {m}",
                    b.space.items()
                )));
            }
            if let Valuation::Tabular { .. } = b.valuation {
                let report = verify_axioms(&b.valuation, &b.space, MAX_ITEMS)?;
                if let Some(v) = report.violation {
                    return Err(Error::AxiomViolation(format!("bidder {i}: {v}")));
                }
            }
        }
        let models = bidders
            .iter()
            .map(BidderModel::compile)
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance { bidders, models })
    }

    pub fn bidders(&self) -> usize {
        self.bidders.len()
    }

    pub fn items(&self) -> usize {
        self.models[0].items
    }

    pub fn spec(&self, i: usize) -> &BidderSpec {
        &self.bidders[i]
    }

    pub fn model(&self, i: usize) -> &BidderModel {
        &self.models[i]
    }

    pub fn models(&self) -> &[BidderModel] {
        &self.models
    }

    /// Largest single-item value of any bidder.
    pub fn max_single_value(&self) -> f64 {
        self.models
            .iter()
            .map(BidderModel::max_single_value)
            .fold(0.0, f64::max)
    }

    /// Number of joint type profiles.
    pub fn profile_count(&self) -> u128 {
        self.models.iter().map(|b| b.type_count() as u128).product()
    }

    /// Every joint type profile as per-bidder type indices with its probability.
    pub fn profiles(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out = vec![(Vec::with_capacity(self.bidders()), 1.0)];
        for model in &self.models {
            let mut next = Vec::with_capacity(out.len() * model.type_count());
            for (prefix, p) in &out {
                for (t, &q) in model.prob.iter().enumerate() {
                    let mut v = prefix.clone();
                    v.push(t);
                    next.push((v, p * q));
                }
            }
            out = next;
        }
        out
    }

    /// The instance where `n` unit-demand bidders value their own item at 1
    /// and every other item at `eps`.
    pub fn own_item_unit_demand(n: usize, eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidArgument(format!("eps {eps} not in [0, 1)")));
        }
        let bidders = (0..n)
            .map(|i| {
                let values = (0..n)
                    .map(|j| vec![if i == j { 1.0 } else { eps }])
                    .collect();
                let space = ItemTypeSpace::scalar(values)?;
                let dist = ProductDistribution::uniform(&space);
                Ok(BidderSpec {
                    space,
                    dist,
                    valuation: Valuation::UnitDemand,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(bidders)
    }

    /// A copy with every scalar token value shifted up by `delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        let bidders = self
            .bidders
            .iter()
            .map(|b| {
                let tokens = (0..b.space.items())
                    .map(|j| {
                        b.space
                            .tokens(j)
                            .iter()
                            .map(|t| Token {
                                label: t.label.clone(),
                                values: t.values.iter().map(|v| v + delta).collect(),
                            })
                            .collect()
                    })
                    .collect();
                let space = ItemTypeSpace::new(tokens)?;
                let pmf = (0..space.items()).map(|j| b.dist.item(j).to_vec()).collect();
                Ok(BidderSpec {
                    dist: ProductDistribution::new(pmf, &space)?,
                    space,
                    valuation: b.valuation.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(bidders)
    }
}

/// Valuation families the random generator draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Additive,
    UnitDemand,
    Xos,
}

/// Bounds for random instances. Atom values are distinct integers drawn
/// uniformly from `0..=max_value`; each item's pmf is a draw from the
/// symmetric Dirichlet distribution with parameter `concentration`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub bidders: usize,
    pub items: usize,
    #[serde(default = "default_atoms")]
    pub max_atoms: usize,
    #[serde(default = "default_max_value")]
    pub max_value: u32,
    #[serde(default = "default_concentration")]
    pub concentration: f64,
    #[serde(default = "default_families")]
    pub families: Vec<FamilyKind>,
    #[serde(default = "default_clauses")]
    pub xos_clauses: usize,
}

fn default_atoms() -> usize {
    3
}
fn default_max_value() -> u32 {
    10
}
fn default_concentration() -> f64 {
    1.0
}
fn default_families() -> Vec<FamilyKind> {
    vec![FamilyKind::Additive, FamilyKind::UnitDemand, FamilyKind::Xos]
}
fn default_clauses() -> usize {
    2
}

impl GeneratorConfig {
    pub fn new(bidders: usize, items: usize) -> Self {
        GeneratorConfig {
            bidders,
            items,
            max_atoms: default_atoms(),
            max_value: default_max_value(),
            concentration: default_concentration(),
            families: default_families(),
            xos_clauses: default_clauses(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if self.bidders == 0 || self.items == 0 || self.items > MAX_ITEMS {
            return bad("generator needs 1..=8 items and at least one bidder");
        }
        if self.max_atoms == 0 || self.max_atoms as u32 > self.max_value + 1 {
            return bad("max_atoms must lie in 1..=max_value+1");
        }
        if !(self.concentration > 0.0 && self.concentration.is_finite()) {
            return bad("concentration must be positive");
        }
        if self.families.is_empty() || self.xos_clauses == 0 {
            return bad("need at least one family and one XOS clause");
        }
        Ok(())
    }
}

/// Draws an instance deterministically from `seed`.
pub fn random_instance(cfg: &GeneratorConfig, seed: u64) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = Gamma::new(cfg.concentration, 1.0)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut bidders = Vec::with_capacity(cfg.bidders);
    for _ in 0..cfg.bidders {
        let family = cfg.families[rng.gen_range(0..cfg.families.len())];
        let width = match family {
            FamilyKind::Xos => cfg.xos_clauses,
            _ => 1,
        };
        let mut tokens = Vec::with_capacity(cfg.items);
        let mut pmf = Vec::with_capacity(cfg.items);
        for _ in 0..cfg.items {
            let k = rng.gen_range(1..=cfg.max_atoms);
            let mut list: Vec<Token> = Vec::with_capacity(k);
            while list.len() < k {
                let values: Vec<f64> = (0..width)
                    .map(|_| rng.gen_range(0..=cfg.max_value) as f64)
                    .collect();
                if list.iter().all(|t| t.values != values) {
                    let label = values
                        .iter()
                        .map(|v| format!("{v}"))
                        .collect::<Vec<_>>()
                        .join("/");
                    list.push(Token { label, values });
                }
            }
            let raw: Vec<f64> = (0..k).map(|_| gamma.sample(&mut rng).max(1e-9)).collect();
            let total: f64 = raw.iter().sum();
            let mut p: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let head: f64 = p[..k - 1].iter().sum();
            p[k - 1] = (1.0 - head).max(0.0);
            tokens.push(list);
            pmf.push(p);
        }
        let space = ItemTypeSpace::new(tokens)?;
        let dist = ProductDistribution::new(pmf, &space)?;
        let valuation = match family {
            FamilyKind::Additive => Valuation::Additive,
            FamilyKind::UnitDemand => Valuation::UnitDemand,
            FamilyKind::Xos => Valuation::Xos {
                clauses: cfg.xos_clauses,
            },
        };
        bidders.push(BidderSpec {
            space,
            dist,
            valuation,
        });
    }
    Instance::new(bidders)
}

/// A single-bidder-per-item helper: bidder with scalar atoms and pmfs.
pub fn scalar_bidder(
    values: Vec<Vec<f64>>,
    pmf: Vec<Vec<f64>>,
    valuation: Valuation,
) -> Result<BidderSpec> {
    let space = ItemTypeSpace::scalar(values)?;
    let dist = ProductDistribution::new(pmf, &space)?;
    Ok(BidderSpec {
        space,
        dist,
        valuation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_sum_to_one() {
        let cfg = GeneratorConfig::new(2, 2);
        let inst = random_instance(&cfg, 7).unwrap();
        let total: f64 = inst.profiles().iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(inst.profiles().len() as u128, inst.profile_count());
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = GeneratorConfig::new(2, 2);
        assert_eq!(random_instance(&cfg, 3).unwrap(), random_instance(&cfg, 3).unwrap());
    }

    #[test]
    fn own_item_instance_values() {
        let inst = Instance::own_item_unit_demand(3, 0.5).unwrap();
        let b = inst.model(1);
        assert_eq!(b.value(0, ItemSet::full(3)), 1.0);
        assert_eq!(b.value(0, ItemSet::from_items([0, 2])), 0.5);
    }

    #[test]
    fn survival_and_atoms() {
        let b = scalar_bidder(
            vec![vec![1.0, 2.0, 2.0]],
            vec![vec![0.5, 0.25, 0.25]],
            Valuation::Additive,
        );
        // duplicate scalar values are distinct tokens with equal payloads
        let inst = Instance::new(vec![b.unwrap()]).unwrap();
        let m = inst.model(0);
        assert_eq!(m.survival(0, 2.0), 0.5);
        assert_eq!(m.strict_survival(0, 1.0), 0.5);
        assert_eq!(m.value_atoms(0).len(), 2);
    }

    #[test]
    fn serde_round_trip() {
        let inst = random_instance(&GeneratorConfig::new(2, 2), 1).unwrap();
        let text = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(inst, back);
    }
}
