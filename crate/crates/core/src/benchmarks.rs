//! Optimal-revenue and optimal-welfare benchmarks: the BIC linear program,
//! ironed revenue curves, and the single-dimensional copies setting.

use crate::error::{check_budget, Error, Result};
use crate::instance::{merge_atoms, Atom, Instance, VALUE_TOL};
use crate::lp::{to_f64_solution, LinearProgram, Relation, Solution};
use crate::sets::ItemSet;
use serde::{Deserialize, Serialize};

/// Default cap on LP nonzeros.
pub const DEFAULT_LP_BUDGET: u128 = 1_000_000;

/// Optimal BIC, interim-IR revenue with the interim allocation it induces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptRevenue {
    pub value: f64,
    /// `sigma[i][t][mask]`: probability that type `t` of bidder `i` gets the set.
    pub sigma: Vec<Vec<Vec<f64>>>,
    /// `pi[i][t][j]`: probability that type `t` of bidder `i` gets item `j`.
    pub pi: Vec<Vec<Vec<f64>>>,
    /// Interim payments `P_i(t)`.
    pub payments: Vec<Vec<f64>>,
    pub variables: usize,
    pub constraints: usize,
    /// Largest constraint violation of the returned point.
    pub max_violation: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptOptions {
    pub exact_rational: bool,
    pub budget: u128,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions {
            exact_rational: false,
            budget: DEFAULT_LP_BUDGET,
        }
    }
}

/// Every allocation of `m` items to `n` bidders or to nobody (`n`), encoded
/// as per-bidder masks; the empty allocation is dropped.
fn allocations(n: usize, m: usize) -> Vec<Vec<ItemSet>> {
    let total = (n + 1).pow(m as u32);
    let mut out = Vec::with_capacity(total - 1);
    for code in 0..total {
        let mut masks = vec![ItemSet::EMPTY; n];
        let mut c = code;
        let mut any = false;
        for j in 0..m {
            let owner = c % (n + 1);
            c /= n + 1;
            if owner < n {
                masks[owner] = masks[owner].insert(j);
                any = true;
            }
        }
        if any {
            out.push(masks);
        }
    }
    out
}

/// The BIC revenue LP over deterministic allocations, with interim payment
/// variables. Returns the program and the index of the first payment variable.
pub fn revenue_lp(inst: &Instance, budget: u128) -> Result<(LinearProgram, usize)> {
    let (n, m) = (inst.bidders(), inst.items());
    let allocs = allocations(n, m);
    let profiles = inst.profiles();
    let x_count = profiles.len() as u128 * allocs.len() as u128;
    check_budget("revenue LP variables", x_count, budget)?;
    let mut lp = LinearProgram::new();
    for (p, _) in profiles.iter().enumerate() {
        for a in 0..allocs.len() {
            lp.add_var(format!("x_{p}_{a}"), 0.0);
        }
    }
    let pay_start = lp.vars();
    let mut pay_var = Vec::with_capacity(n);
    for i in 0..n {
        let model = inst.model(i);
        let mut row = Vec::with_capacity(model.type_count());
        for t in 0..model.type_count() {
            let f = model.prob[t];
            let plus = lp.add_var(format!("pp_{i}_{t}"), f);
            let minus = lp.add_var(format!("pm_{i}_{t}"), -f);
            row.push((plus, minus));
        }
        pay_var.push(row);
    }
    let x = |p: usize, a: usize| p * allocs.len() + a;
    for p in 0..profiles.len() {
        let coeffs = (0..allocs.len()).map(|a| (x(p, a), 1.0)).collect();
        lp.add_constraint(format!("prob_{p}"), coeffs, Relation::Le, 1.0);
    }
    // by_type[i][t]: profiles where bidder i has type t, with Pr[t_{-i}].
    let mut by_type: Vec<Vec<Vec<(usize, f64)>>> = (0..n)
        .map(|i| vec![Vec::new(); inst.model(i).type_count()])
        .collect();
    for (p, (types, _)) in profiles.iter().enumerate() {
        for i in 0..n {
            let q: f64 = (0..n)
                .filter(|&k| k != i)
                .map(|k| inst.model(k).prob[types[k]])
                .product();
            by_type[i][types[i]].push((p, q));
        }
    }
    let mut nonzeros: u128 = 0;
    for i in 0..n {
        let model = inst.model(i);
        let tc = model.type_count();
        // Expected value of true type t when reporting r.
        let value_terms = |t: usize, r: usize, sign: f64, out: &mut Vec<(usize, f64)>| {
            for &(p, q) in &by_type[i][r] {
                for (a, masks) in allocs.iter().enumerate() {
                    let v = model.value(t, masks[i]);
                    if v != 0.0 && q != 0.0 {
                        out.push((x(p, a), sign * q * v));
                    }
                }
            }
        };
        for t in 0..tc {
            let (pp, pm) = pay_var[i][t];
            let mut ir = vec![(pp, 1.0), (pm, -1.0)];
            value_terms(t, t, -1.0, &mut ir);
            nonzeros += ir.len() as u128;
            lp.add_constraint(format!("ir_{i}_{t}"), ir, Relation::Le, 0.0);
            for r in 0..tc {
                if r == t {
                    continue;
                }
                let (rp, rm) = pay_var[i][r];
                let mut bic = vec![(rp, -1.0), (rm, 1.0), (pp, 1.0), (pm, -1.0)];
                value_terms(t, r, 1.0, &mut bic);
                value_terms(t, t, -1.0, &mut bic);
                nonzeros += bic.len() as u128;
                check_budget("revenue LP nonzeros", nonzeros, budget)?;
                lp.add_constraint(format!("bic_{i}_{t}_{r}"), bic, Relation::Le, 0.0);
            }
        }
    }
    Ok((lp, pay_start))
}

/// `OPT(D)`: optimal revenue over BIC, interim-IR mechanisms, with the
/// interim allocation `sigma` and marginals `pi` of an optimal solution.
pub fn opt_revenue(inst: &Instance, opts: OptOptions) -> Result<OptRevenue> {
    let (lp, pay_start) = revenue_lp(inst, opts.budget)?;
    let sol: Solution<f64> = if opts.exact_rational {
        to_f64_solution(&lp.solve_exact()?)
    } else {
        lp.solve()?
    };
    let (n, m) = (inst.bidders(), inst.items());
    let allocs = allocations(n, m);
    let profiles = inst.profiles();
    let mut sigma: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| vec![vec![0.0; 1 << m]; inst.model(i).type_count()])
        .collect();
    for (p, (types, prob)) in profiles.iter().enumerate() {
        for (a, masks) in allocs.iter().enumerate() {
            let xv = sol.x[p * allocs.len() + a];
            if xv == 0.0 {
                continue;
            }
            for i in 0..n {
                let f = inst.model(i).prob[types[i]];
                if f > 0.0 && !masks[i].is_empty() {
                    sigma[i][types[i]][masks[i].index()] += prob / f * xv;
                }
            }
        }
    }
    for row in sigma.iter_mut().flatten() {
        let rest: f64 = row[1..].iter().sum();
        row[0] = (1.0 - rest).max(0.0);
    }
    let pi = sigma
        .iter()
        .map(|bidder| {
            bidder
                .iter()
                .map(|s| {
                    (0..m)
                        .map(|j| {
                            ItemSet::all(m)
                                .filter(|set| set.contains(j))
                                .map(|set| s[set.index()])
                                .sum()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut payments = Vec::with_capacity(n);
    let mut k = pay_start;
    for i in 0..n {
        let mut row = Vec::new();
        for _ in 0..inst.model(i).type_count() {
            row.push(sol.x[k] - sol.x[k + 1]);
            k += 2;
        }
        payments.push(row);
    }
    Ok(OptRevenue {
        value: sol.objective,
        sigma,
        pi,
        payments,
        variables: lp.vars(),
        constraints: lp.constraints.len(),
        max_violation: lp.max_violation(&sol.x),
        exact: opts.exact_rational,
    })
}

/// `E_t[max_a sum_i v_i(t_i, a_i)]` by enumerating allocations.
pub fn opt_welfare(inst: &Instance, budget: u128) -> Result<f64> {
    let (n, m) = (inst.bidders(), inst.items());
    let work = inst.profile_count() * (n as u128 + 1).pow(m as u32);
    check_budget("welfare enumeration", work, budget)?;
    let allocs = allocations(n, m);
    Ok(inst
        .profiles()
        .iter()
        .map(|(types, p)| {
            let best = allocs
                .iter()
                .map(|masks| (0..n).map(|i| inst.model(i).value(types[i], masks[i])).sum::<f64>())
                .fold(0.0, f64::max);
            p * best
        })
        .sum())
}

/// Revenue curve `R(q) = q * F^{-1}(1 - q)` at the atoms' quantiles and its
/// upper concave hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IronedRevenueCurve {
    /// Atoms in increasing value order.
    pub atoms: Vec<Atom>,
    /// `quantiles[k] = Pr[V >= atoms[k].value]`, decreasing in `k`.
    pub quantiles: Vec<f64>,
    pub revenue: Vec<f64>,
    pub hull: Vec<f64>,
    /// Ironed virtual value of each atom.
    pub phi: Vec<f64>,
}

impl IronedRevenueCurve {
    /// `R~(q)` by linear interpolation between hull points, with `R~(0) = 0`.
    pub fn eval(&self, q: f64) -> f64 {
        let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        pts.extend(self.quantiles.iter().zip(&self.hull).rev().map(|(&a, &b)| (a, b)));
        let q = q.clamp(0.0, 1.0);
        for w in pts.windows(2) {
            let ((q0, r0), (q1, r1)) = (w[0], w[1]);
            if q <= q1 + VALUE_TOL {
                if q1 - q0 <= 0.0 {
                    return r1;
                }
                return r0 + (r1 - r0) * (q - q0) / (q1 - q0);
            }
        }
        *self.hull.first().unwrap_or(&0.0)
    }

    /// Ironed virtual value of value `v` (which must be an atom).
    pub fn phi_of(&self, v: f64) -> Option<f64> {
        self.atoms
            .iter()
            .position(|a| (a.value - v).abs() <= VALUE_TOL)
            .map(|k| self.phi[k])
    }
}

/// Builds the ironed revenue curve of a discrete distribution.
pub fn ironed_curve(atoms: &[Atom]) -> Result<IronedRevenueCurve> {
    let atoms = merge_atoms(atoms.iter().copied());
    if atoms.is_empty() {
        return Err(Error::InvalidArgument("empty support".into()));
    }
    let k = atoms.len();
    let mut quantiles = vec![0.0; k];
    let mut acc = 0.0;
    for idx in (0..k).rev() {
        acc += atoms[idx].prob;
        quantiles[idx] = acc;
    }
    let total = quantiles[0];
    for q in quantiles.iter_mut() {
        *q /= total;
    }
    let revenue: Vec<f64> = (0..k).map(|idx| quantiles[idx] * atoms[idx].value).collect();
    // Points in increasing quantile order: origin, then atoms from the top.
    let pts: Vec<(f64, f64)> = std::iter::once((0.0, 0.0))
        .chain((0..k).rev().map(|idx| (quantiles[idx], revenue[idx])))
        .collect();
    let mut hull_idx: Vec<usize> = Vec::with_capacity(pts.len());
    for p in 0..pts.len() {
        while hull_idx.len() >= 2 {
            let a = pts[hull_idx[hull_idx.len() - 2]];
            let b = pts[hull_idx[hull_idx.len() - 1]];
            let c = pts[p];
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross >= -1e-15 {
                hull_idx.pop();
            } else {
                break;
            }
        }
        hull_idx.push(p);
    }
    let hull_at = |q: f64| -> f64 {
        for w in hull_idx.windows(2) {
            let (a, b) = (pts[w[0]], pts[w[1]]);
            if q <= b.0 + 1e-15 {
                if b.0 - a.0 <= 0.0 {
                    return b.1;
                }
                return a.1 + (b.1 - a.1) * (q - a.0) / (b.0 - a.0);
            }
        }
        pts[*hull_idx.last().unwrap()].1
    };
    let hull: Vec<f64> = quantiles.iter().map(|&q| hull_at(q).max(0.0)).collect();
    let phi = (0..k)
        .map(|idx| {
            let (q_hi, r_hi) = (quantiles[idx], hull[idx]);
            let (q_lo, r_lo) = if idx + 1 < k {
                (quantiles[idx + 1], hull[idx + 1])
            } else {
                (0.0, 0.0)
            };
            (r_hi - r_lo) / (q_hi - q_lo)
        })
        .collect();
    Ok(IronedRevenueCurve {
        atoms,
        quantiles,
        revenue,
        hull,
        phi,
    })
}

/// Myerson revenue for one item: `E[max(0, max_i phi~_i(V_i))]`.
pub fn single_item_myerson(inst: &Instance, item: usize) -> Result<f64> {
    let curves = (0..inst.bidders())
        .map(|i| ironed_curve(&inst.model(i).value_atoms(item)))
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    let mut stack: Vec<(usize, f64, f64)> = vec![(0, 1.0, 0.0)];
    while let Some((i, p, best)) = stack.pop() {
        if i == curves.len() {
            total += p * best;
            continue;
        }
        for (a, phi) in curves[i].atoms.iter().zip(&curves[i].phi) {
            stack.push((i + 1, p * a.prob, best.max(*phi)));
        }
    }
    Ok(total)
}

/// The single-dimensional copies setting: agent `(i, j)` has value
/// distribution `atoms[i][j]`; feasible allocations are matchings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopiesInstance {
    pub atoms: Vec<Vec<Vec<Atom>>>,
}

impl CopiesInstance {
    pub fn from_instance(inst: &Instance) -> Self {
        CopiesInstance {
            atoms: (0..inst.bidders())
                .map(|i| (0..inst.items()).map(|j| inst.model(i).value_atoms(j)).collect())
                .collect(),
        }
    }

    pub fn bidders(&self) -> usize {
        self.atoms.len()
    }

    pub fn items(&self) -> usize {
        self.atoms.first().map_or(0, Vec::len)
    }

    fn agents(&self) -> Vec<(usize, usize)> {
        (0..self.bidders())
            .flat_map(|i| (0..self.items()).map(move |j| (i, j)))
            .collect()
    }

    fn profile_count(&self) -> u128 {
        self.atoms.iter().flatten().map(|a| a.len() as u128).product()
    }

    /// Every joint atom profile (indices per agent in `agents()` order).
    fn profiles(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out = vec![(Vec::new(), 1.0)];
        for (i, j) in self.agents() {
            let atoms = &self.atoms[i][j];
            let mut next = Vec::with_capacity(out.len() * atoms.len());
            for (prefix, p) in &out {
                for (k, a) in atoms.iter().enumerate() {
                    let mut v = prefix.clone();
                    v.push(k);
                    next.push((v, p * a.prob));
                }
            }
            out = next;
        }
        out
    }
}

/// Every nonempty matching between bidders and items, as agent lists.
fn matchings(n: usize, m: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(j: usize, n: usize, m: usize, used: u32, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if j == m {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        rec(j + 1, n, m, used, cur, out);
        for i in 0..n {
            if used >> i & 1 == 0 {
                cur.push((i, j));
                rec(j + 1, n, m, used | 1 << i, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, 0, &mut Vec::new(), &mut out);
    out
}

/// Optimal copies revenue and ex-ante service probabilities `q[i][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopiesOpt {
    pub value: f64,
    pub q: Vec<Vec<f64>>,
}

/// `OPT^{Copies}` by maximizing expected ironed virtual welfare over matchings.
pub fn copies_opt(copies: &CopiesInstance, budget: u128) -> Result<CopiesOpt> {
    let (n, m) = (copies.bidders(), copies.items());
    let match_list = matchings(n, m);
    check_budget(
        "copies enumeration",
        copies.profile_count() * (match_list.len() as u128 + 1),
        budget,
    )?;
    let agents = copies.agents();
    let curves = agents
        .iter()
        .map(|&(i, j)| ironed_curve(&copies.atoms[i][j]))
        .collect::<Result<Vec<_>>>()?;
    let mut q = vec![vec![0.0; m]; n];
    let mut value = 0.0;
    for (prof, p) in copies.profiles() {
        let phi = |i: usize, j: usize| curves[i * m + j].phi[prof[i * m + j]];
        let mut best = 0.0;
        let mut best_match: Option<&Vec<(usize, usize)>> = None;
        for mt in &match_list {
            let w: f64 = mt.iter().map(|&(i, j)| phi(i, j).max(0.0)).sum();
            if w > best + 1e-12 {
                best = w;
                best_match = Some(mt);
            }
        }
        value += p * best;
        if let Some(mt) = best_match {
            for &(i, j) in mt {
                if phi(i, j) > 0.0 {
                    q[i][j] += p;
                }
            }
        }
    }
    Ok(CopiesOpt { value, q })
}

/// Optimal copies revenue from the direct BIC, interim-IR LP over matchings.
pub fn copies_lp(copies: &CopiesInstance, budget: u128) -> Result<f64> {
    let (n, m) = (copies.bidders(), copies.items());
    let match_list = matchings(n, m);
    let profiles = copies.profiles();
    check_budget(
        "copies LP variables",
        profiles.len() as u128 * match_list.len() as u128,
        budget,
    )?;
    let agents = copies.agents();
    let mut lp = LinearProgram::new();
    let x = |p: usize, k: usize| p * match_list.len() + k;
    for p in 0..profiles.len() {
        for k in 0..match_list.len() {
            lp.add_var(format!("x_{p}_{k}"), 0.0);
        }
    }
    let mut pay = Vec::new();
    for (ai, &(i, j)) in agents.iter().enumerate() {
        let atoms = &copies.atoms[i][j];
        let row: Vec<(usize, usize)> = atoms
            .iter()
            .enumerate()
            .map(|(k, a)| {
                (
                    lp.add_var(format!("pp_{ai}_{k}"), a.prob),
                    lp.add_var(format!("pm_{ai}_{k}"), -a.prob),
                )
            })
            .collect();
        pay.push(row);
    }
    for p in 0..profiles.len() {
        let coeffs = (0..match_list.len()).map(|k| (x(p, k), 1.0)).collect();
        lp.add_constraint(format!("prob_{p}"), coeffs, Relation::Le, 1.0);
    }
    for (ai, &(i, j)) in agents.iter().enumerate() {
        let atoms = &copies.atoms[i][j];
        // Interim service terms for reported atom r, weighted by Pr[others].
        let service = |r: usize, scale: f64, out: &mut Vec<(usize, f64)>| {
            for (p, (prof, prob)) in profiles.iter().enumerate() {
                if prof[ai] != r {
                    continue;
                }
                let q = prob / atoms[r].prob;
                for (k, mt) in match_list.iter().enumerate() {
                    if mt.contains(&(i, j)) {
                        out.push((x(p, k), scale * q));
                    }
                }
            }
        };
        for t in 0..atoms.len() {
            let v = atoms[t].value;
            let (tp, tm) = pay[ai][t];
            let mut ir = vec![(tp, 1.0), (tm, -1.0)];
            service(t, -v, &mut ir);
            lp.add_constraint(format!("ir_{ai}_{t}"), ir, Relation::Le, 0.0);
            for r in 0..atoms.len() {
                if r == t {
                    continue;
                }
                let (rp, rm) = pay[ai][r];
                let mut bic = vec![(rp, -1.0), (rm, 1.0), (tp, 1.0), (tm, -1.0)];
                service(r, v, &mut bic);
                service(t, -v, &mut bic);
                lp.add_constraint(format!("bic_{ai}_{t}_{r}"), bic, Relation::Le, 0.0);
            }
        }
    }
    Ok(lp.solve()?.objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::scalar_bidder;
    use crate::valuations::Valuation;

    fn single(values: Vec<f64>, pmf: Vec<f64>) -> Instance {
        Instance::new(vec![scalar_bidder(vec![values], vec![pmf], Valuation::Additive).unwrap()])
            .unwrap()
    }

    #[test]
    fn deterministic_value_is_extracted() {
        let inst = single(vec![5.0], vec![1.0]);
        let opt = opt_revenue(&inst, OptOptions::default()).unwrap();
        assert!((opt.value - 5.0).abs() < 1e-9);
        assert!((opt.pi[0][0][0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_one_two_earns_one() {
        let inst = single(vec![1.0, 2.0], vec![0.5, 0.5]);
        let opt = opt_revenue(&inst, OptOptions::default()).unwrap();
        assert!((opt.value - 1.0).abs() < 1e-9);
        let exact = opt_revenue(
            &inst,
            OptOptions {
                exact_rational: true,
                ..OptOptions::default()
            },
        )
        .unwrap();
        assert!((exact.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curve_for_point_mass() {
        let c = ironed_curve(&[Atom { value: 3.0, prob: 1.0 }]).unwrap();
        assert_eq!(c.phi, vec![3.0]);
        assert!((c.eval(0.5) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn curve_for_uniform_one_two() {
        let c = ironed_curve(&[Atom { value: 1.0, prob: 0.5 }, Atom { value: 2.0, prob: 0.5 }]).unwrap();
        assert_eq!(c.phi, vec![0.0, 2.0]);
        assert_eq!(c.revenue, vec![1.0, 1.0]);
        assert_eq!(c.hull, vec![1.0, 1.0]);
    }

    #[test]
    fn regular_curve_needs_no_ironing() {
        // R at q = 1, 0.5, 0.2: 1, 1.5, 1.0; slopes 5, 1.6, -1 decrease.
        let atoms = [
            Atom { value: 1.0, prob: 0.5 },
            Atom { value: 3.0, prob: 0.3 },
            Atom { value: 5.0, prob: 0.2 },
        ];
        let c = ironed_curve(&atoms).unwrap();
        for (h, r) in c.hull.iter().zip(&c.revenue) {
            assert!((h - r).abs() < 1e-12);
        }
        assert!((c.phi[2] - 5.0).abs() < 1e-12);
        assert!((c.phi[1] - 5.0 / 3.0).abs() < 1e-12);
        assert!((c.phi[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn irregular_curve_is_ironed() {
        // R at q = 1, 0.9, 0.1: 1, 1.8, 1.0; the middle point lies above the
        // chord so the hull keeps it; a dip below the chord is ironed away.
        let atoms = [
            Atom { value: 1.0, prob: 0.2 },
            Atom { value: 1.1, prob: 0.7 },
            Atom { value: 10.0, prob: 0.1 },
        ];
        let c = ironed_curve(&atoms).unwrap();
        assert!(c.hull[1] > c.revenue[1] - 1e-12);
        assert!((c.phi[1] - c.phi[0]).abs() < 1e-12 || c.phi[1] >= c.phi[0]);
        assert!(ironed_curve(&[]).is_err());
    }

    #[test]
    fn welfare_of_own_item_instance() {
        let inst = Instance::own_item_unit_demand(3, 0.5).unwrap();
        assert!((opt_welfare(&inst, 1 << 20).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn copies_one_by_one() {
        let inst = single(vec![1.0, 2.0], vec![0.5, 0.5]);
        let c = CopiesInstance::from_instance(&inst);
        assert!((copies_opt(&c, 1 << 20).unwrap().value - 1.0).abs() < 1e-12);
        assert!((copies_lp(&c, 1 << 20).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matchings_of_two_by_two() {
        assert_eq!(matchings(2, 2).len(), 6);
        assert_eq!(allocations(2, 2).len(), 8);
    }
}
