//! Discrete product type distributions and valuation families that are
//! subadditive over independent items.
//!
//! A bidder's type is one token per item. Each token carries a small payload
//! of numbers: a single value for additive, unit-demand and constrained
//! additive bidders, or one value per clause for XOS bidders.

use crate::error::{check_budget, Error, Result};
use crate::sets::ItemSet;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

const AXIOM_TOL: f64 = 1e-12;

/// One possible type coordinate for an item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub label: String,
    pub values: Vec<f64>,
}

impl Token {
    pub fn scalar(label: impl Into<String>, value: f64) -> Self {
        Token {
            label: label.into(),
            values: vec![value],
        }
    }
}

/// The finite token lists `T_ij`, one list per item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemTypeSpace {
    tokens: Vec<Vec<Token>>,
}

impl ItemTypeSpace {
    pub fn new(tokens: Vec<Vec<Token>>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidInstance("no items".into()));
        }
        for (j, list) in tokens.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::InvalidInstance(format!("item {j} has no tokens")));
            }
            let mut seen = HashSet::new();
            for tok in list {
                if !seen.insert(tok.label.as_str()) {
                    return Err(Error::InvalidInstance(format!(
                        "item {j} lists token {:?} twice",
                        tok.label
                    )));
                }
                if tok.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "token {:?} of item {j} has a negative or non-finite value",
                        tok.label
                    )));
                }
            }
        }
        Ok(ItemTypeSpace { tokens })
    }

    /// Convenience constructor for scalar tokens.
    pub fn scalar(values: Vec<Vec<f64>>) -> Result<Self> {
        let tokens = values
            .into_iter()
            .map(|vs| {
                vs.into_iter()
                    .enumerate()
                    .map(|(k, v)| Token::scalar(format!("v{k}"), v))
                    .collect()
            })
            .collect();
        Self::new(tokens)
    }

    pub fn items(&self) -> usize {
        self.tokens.len()
    }

    pub fn tokens(&self, item: usize) -> &[Token] {
        &self.tokens[item]
    }

    pub fn token(&self, item: usize, token: usize) -> Result<&Token> {
        self.tokens
            .get(item)
            .and_then(|l| l.get(token))
            .ok_or(Error::UnknownToken { item, token })
    }

    /// Number of full type vectors.
    pub fn type_count(&self) -> u128 {
        self.tokens.iter().map(|l| l.len() as u128).product()
    }

    /// All type vectors in lexicographic order (item 0 most significant).
    pub fn enumerate_types(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::with_capacity(self.items())];
        for list in &self.tokens {
            let mut next = Vec::with_capacity(out.len() * list.len());
            for prefix in &out {
                for k in 0..list.len() {
                    let mut t = prefix.clone();
                    t.push(k);
                    next.push(t);
                }
            }
            out = next;
        }
        out
    }
}

/// Independent probability mass functions `f_ij` over the tokens of each item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductDistribution {
    pmf: Vec<Vec<f64>>,
}

impl ProductDistribution {
    pub fn new(pmf: Vec<Vec<f64>>, space: &ItemTypeSpace) -> Result<Self> {
        if pmf.len() != space.items() {
            return Err(Error::InvalidInstance(format!(
                "distribution covers {} items, type space has {}",
                pmf.len(),
                space.items()
            )));
        }
        for (j, p) in pmf.iter().enumerate() {
            if p.len() != space.tokens(j).len() {
                return Err(Error::InvalidInstance(format!(
                    "item {j}: {} masses for {} tokens",
                    p.len(),
                    space.tokens(j).len()
                )));
            }
            if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidInstance(format!("item {j}: negative mass")));
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInstance(format!(
                    "item {j}: masses sum to {total}"
                )));
            }
        }
        Ok(ProductDistribution { pmf })
    }

    /// The uniform distribution over every item's tokens.
    pub fn uniform(space: &ItemTypeSpace) -> Self {
        let pmf = (0..space.items())
            .map(|j| {
                let k = space.tokens(j).len();
                vec![1.0 / k as f64; k]
            })
            .collect();
        ProductDistribution { pmf }
    }

    pub fn item(&self, item: usize) -> &[f64] {
        &self.pmf[item]
    }

    pub fn prob(&self, t: &[usize]) -> f64 {
        t.iter().enumerate().map(|(j, &k)| self.pmf[j][k]).product()
    }
}

/// Feasible sets for a constrained-additive valuation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    /// Any set of at most `k` items.
    Cardinality(usize),
    /// An explicit list of feasible sets; the empty set is always feasible.
    Explicit(Vec<ItemSet>),
}

/// An explicit table `v(t, S)` keyed by token indices and item set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValueTable {
    entries: BTreeMap<(Vec<usize>, u32), f64>,
}

impl ValueTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, types: Vec<usize>, set: ItemSet, value: f64) {
        self.entries.insert((types, set.bits()), value);
    }

    fn get(&self, types: &[usize], set: ItemSet) -> Option<f64> {
        self.entries.get(&(types.to_vec(), set.bits())).copied()
    }

    fn any_with_singleton(&self, item: usize, token: usize) -> Option<f64> {
        let bits = ItemSet::singleton(item).bits();
        self.entries
            .iter()
            .find(|((t, s), _)| *s == bits && t.get(item) == Some(&token))
            .map(|(_, v)| *v)
    }
}

/// A valuation family binding type tokens to bundle values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Valuation {
    Additive,
    UnitDemand,
    ConstrainedAdditive { feasible: Feasibility },
    Xos { clauses: usize },
    Tabular { table: ValueTable },
}

impl Valuation {
    /// Builds a tabular valuation, rejecting tables that violate the axioms.
    pub fn tabular(table: ValueTable, space: &ItemTypeSpace) -> Result<Self> {
        let val = Valuation::Tabular { table };
        let report = verify_axioms(&val, space, 4)?;
        if let Some(v) = report.violation {
            return Err(Error::AxiomViolation(v.to_string()));
        }
        Ok(val)
    }

    /// Checks that every token carries the payload this family reads.
    pub fn validate(&self, space: &ItemTypeSpace) -> Result<()> {
        let need = match self {
            Valuation::Xos { clauses } => *clauses,
            Valuation::Tabular { .. } => 0,
            _ => 1,
        };
        for j in 0..space.items() {
            for tok in space.tokens(j) {
                if tok.values.len() < need {
                    return Err(Error::InvalidInstance(format!(
                        "token {:?} of item {j} has {} values, family needs {need}",
                        tok.label,
                        tok.values.len()
                    )));
                }
            }
        }
        if let Valuation::Xos { clauses: 0 } = self {
            return Err(Error::InvalidInstance("XOS needs at least one clause".into()));
        }
        Ok(())
    }
}

fn scalar(space: &ItemTypeSpace, t: &[usize], j: usize) -> Result<f64> {
    Ok(space.token(j, t[j])?.values[0])
}

/// `v(t, S)` for a full type vector `t`.
pub fn value(val: &Valuation, space: &ItemTypeSpace, t: &[usize], s: ItemSet) -> Result<f64> {
    let m = space.items();
    if t.len() != m {
        return Err(Error::InvalidArgument(format!(
            "type vector has {} coordinates, expected {m}",
            t.len()
        )));
    }
    if !s.fits(m) {
        return Err(Error::SetOutOfRange {
            set: s.bits(),
            items: m,
        });
    }
    for (j, &k) in t.iter().enumerate() {
        space.token(j, k)?;
    }
    if s.is_empty() {
        return Ok(0.0);
    }
    match val {
        Valuation::Additive => s.iter().map(|j| scalar(space, t, j)).sum(),
        Valuation::UnitDemand => s
            .iter()
            .map(|j| scalar(space, t, j))
            .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v))),
        Valuation::ConstrainedAdditive { feasible } => {
            let vals: Vec<(usize, f64)> = s
                .iter()
                .map(|j| scalar(space, t, j).map(|v| (j, v)))
                .collect::<Result<_>>()?;
            Ok(match feasible {
                Feasibility::Cardinality(k) => {
                    let mut vs: Vec<f64> = vals.iter().map(|&(_, v)| v).collect();
                    vs.sort_by(|a, b| b.total_cmp(a));
                    vs.iter().take(*k).sum()
                }
                Feasibility::Explicit(sets) => sets
                    .iter()
                    .filter(|y| y.is_subset_of(s))
                    .map(|y| {
                        vals.iter()
                            .filter(|(j, _)| y.contains(*j))
                            .map(|&(_, v)| v)
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max),
            })
        }
        Valuation::Xos { clauses } => {
            let mut best = 0.0f64;
            for k in 0..*clauses {
                let mut total = 0.0;
                for j in s.iter() {
                    total += space.token(j, t[j])?.values[k];
                }
                best = best.max(total);
            }
            Ok(best)
        }
        Valuation::Tabular { table } => table.get(t, s).ok_or(Error::MissingTableEntry {
            types: t.to_vec(),
            set: s.bits(),
        }),
    }
}

/// `V_i(t_ij)`: the value for item `j` alone, which depends on `t_ij` only.
pub fn single_item_value(
    val: &Valuation,
    space: &ItemTypeSpace,
    token: usize,
    item: usize,
) -> Result<f64> {
    let tok = space.token(item, token)?;
    Ok(match val {
        Valuation::Additive | Valuation::UnitDemand => tok.values[0],
        Valuation::ConstrainedAdditive { feasible } => {
            let ok = match feasible {
                Feasibility::Cardinality(k) => *k >= 1,
                Feasibility::Explicit(sets) => {
                    sets.iter().any(|y| *y == ItemSet::singleton(item))
                }
            };
            if ok {
                tok.values[0]
            } else {
                0.0
            }
        }
        Valuation::Xos { clauses } => tok.values[..*clauses].iter().copied().fold(0.0, f64::max),
        Valuation::Tabular { table } => {
            table
                .any_with_singleton(item, token)
                .ok_or(Error::MissingTableEntry {
                    types: vec![token],
                    set: ItemSet::singleton(item).bits(),
                })?
        }
    })
}

/// Which axiom failed, with the witnessing types and sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: String,
    pub types: Vec<usize>,
    pub other_types: Option<Vec<usize>>,
    pub first: ItemSet,
    pub second: ItemSet,
    pub lhs: f64,
    pub rhs: f64,
}

impl std::fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} fails at t={:?} sets {} / {}: {} vs {}",
            self.axiom, self.types, self.first, self.second, self.lhs, self.rhs
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checked_types: usize,
    pub violation: Option<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Exhaustively checks normalization, monotonicity, subadditivity and no
/// externalities over every type vector and every pair of sets.
pub fn verify_axioms(val: &Valuation, space: &ItemTypeSpace, m_max: usize) -> Result<AxiomReport> {
    let m = space.items();
    if m > m_max {
        return Err(Error::BudgetExceeded {
            what: "axiom check items".into(),
            needed: m as u128,
            budget: m_max as u128,
        });
    }
    let pairs = 1u128 << (2 * m);
    check_budget("axiom check", space.type_count() * pairs, 1 << 26)?;
    let types = space.enumerate_types();
    let table: Vec<Vec<f64>> = types
        .iter()
        .map(|t| {
            ItemSet::all(m)
                .map(|s| value(val, space, t, s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let violation = |axiom: &str, t: &[usize], o: Option<&[usize]>, a, b, lhs, rhs| {
        Some(AxiomViolation {
            axiom: axiom.into(),
            types: t.to_vec(),
            other_types: o.map(<[usize]>::to_vec),
            first: a,
            second: b,
            lhs,
            rhs,
        })
    };
    for (t, row) in types.iter().zip(&table) {
        if row[0].abs() > AXIOM_TOL {
            return Ok(AxiomReport {
                checked_types: types.len(),
                violation: violation(
                    "normalization",
                    t,
                    None,
                    ItemSet::EMPTY,
                    ItemSet::EMPTY,
                    row[0],
                    0.0,
                ),
            });
        }
        for u in ItemSet::all(m) {
            for w in ItemSet::all(m) {
                let (vu, vw, vuw) = (row[u.index()], row[w.index()], row[u.union(w).index()]);
                if u.is_subset_of(w) && vu > vw + AXIOM_TOL {
                    return Ok(AxiomReport {
                        checked_types: types.len(),
                        violation: violation("monotonicity", t, None, u, w, vu, vw),
                    });
                }
                if vuw > vu + vw + AXIOM_TOL {
                    return Ok(AxiomReport {
                        checked_types: types.len(),
                        violation: violation("subadditivity", t, None, u, w, vuw, vu + vw),
                    });
                }
            }
        }
    }
    for (a, (t, row)) in types.iter().zip(&table).enumerate() {
        for (t2, row2) in types.iter().zip(&table).skip(a + 1) {
            for s in ItemSet::all(m) {
                let agree = s.iter().all(|j| t[j] == t2[j]);
                if agree && (row[s.index()] - row2[s.index()]).abs() > AXIOM_TOL {
                    return Ok(AxiomReport {
                        checked_types: types.len(),
                        violation: violation(
                            "no externalities",
                            t,
                            Some(t2),
                            s,
                            s,
                            row[s.index()],
                            row2[s.index()],
                        ),
                    });
                }
            }
        }
    }
    Ok(AxiomReport {
        checked_types: types.len(),
        violation: None,
    })
}

/// The smallest `l` with `|v(t,X) - v(t',Y)| <= l * (|X ^ Y| + #{j in X & Y : t_j != t'_j})`
/// over every pair of types and sets.
pub fn lipschitz_constant(val: &Valuation, space: &ItemTypeSpace) -> Result<f64> {
    let m = space.items();
    let tc = space.type_count();
    check_budget("lipschitz enumeration", tc * tc * (1u128 << (2 * m)), 1 << 28)?;
    let types = space.enumerate_types();
    let table: Vec<Vec<f64>> = types
        .iter()
        .map(|t| {
            ItemSet::all(m)
                .map(|s| value(val, space, t, s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(lipschitz_of_table(&types, &table, m))
}

/// Minimal Lipschitz constant of an arbitrary set function table `g[type][mask]`.
pub fn lipschitz_of_table(types: &[Vec<usize>], table: &[Vec<f64>], m: usize) -> f64 {
    let mut best = 0.0f64;
    for (t, row) in types.iter().zip(table) {
        for (t2, row2) in types.iter().zip(table) {
            let differ = ItemSet::from_items((0..m).filter(|&j| t[j] != t2[j]));
            for x in ItemSet::all(m) {
                for y in ItemSet::all(m) {
                    let d = x.symmetric_difference(y).len() + x.intersect(y).intersect(differ).len();
                    if d == 0 {
                        continue;
                    }
                    let gap = (row[x.index()] - row2[y.index()]).abs();
                    best = best.max(gap / d as f64);
                }
            }
        }
    }
    best
}
