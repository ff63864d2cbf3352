//! A dense two-phase tableau simplex, generic over `f64` and exact rationals.
//!
//! Problems are stated as `maximize c·x` subject to linear rows with `<=`,
//! `=` or `>=` and `x >= 0`. Dantzig pricing is used until a run of
//! degenerate pivots, after which Bland's rule takes over to rule out cycling.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Feasibility and optimality tolerance of the floating-point solve.
pub const LP_TOL: f64 = 1e-9;

const DEGENERATE_STREAK: usize = 50;
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective·x` over `x >= 0` and the constraints.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub objective: T,
    pub x: Vec<T>,
    pub pivots: usize,
}

/// Arithmetic the tableau needs.
pub trait LpScalar: Clone + PartialOrd + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Strictly positive beyond the scalar's tolerance.
    fn is_pos(&self) -> bool;
    /// Zero within the scalar's tolerance.
    fn is_zero(&self) -> bool;
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        *self > LP_TOL
    }
    fn is_zero(&self) -> bool {
        self.abs() <= LP_TOL
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with objective coefficient `c` and returns its index.
    pub fn add_var(&mut self, name: impl Into<String>, c: f64) -> usize {
        self.names.push(name.into());
        self.objective.push(c);
        self.names.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn vars(&self) -> usize {
        self.names.len()
    }

    /// Number of nonzero constraint coefficients.
    pub fn nonzeros(&self) -> usize {
        self.constraints.iter().map(|c| c.coeffs.len()).sum()
    }

    fn validate(&self) -> Result<()> {
        let n = self.vars();
        for c in &self.constraints {
            if !c.rhs.is_finite() || c.coeffs.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
                return Err(Error::InvalidArgument(format!("malformed constraint {}", c.name)));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite objective".into()));
        }
        Ok(())
    }

    /// Solves in double precision with a bounded-variable dual simplex.
    pub fn solve(&self) -> Result<Solution<f64>> {
        use microlp::{ComparisonOp, OptimizationDirection, Problem};
        self.validate()?;
        let mut p = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = self.objective.iter().map(|&c| p.add_var(c, (0.0, f64::INFINITY))).collect();
        for c in &self.constraints {
            let expr: Vec<_> = c.coeffs.iter().map(|&(j, v)| (vars[j], v)).collect();
            let op = match c.relation {
                Relation::Le => ComparisonOp::Le,
                Relation::Eq => ComparisonOp::Eq,
                Relation::Ge => ComparisonOp::Ge,
            };
            p.add_constraint(expr.as_slice(), op, c.rhs);
        }
        let sol = p
            .solve()
            .map_err(|e| match e {
                microlp::Error::Infeasible => Error::Infeasible,
                microlp::Error::Unbounded => Error::Unbounded,
                other => Error::SolverFailure(format!("{other:?}")),
            })?
            .into_solution()
            .map_err(|_| Error::SolverFailure("interrupted".into()))?;
        Ok(Solution {
            objective: sol.objective(),
            x: vars.iter().map(|&v| sol.var_value(v)).collect(),
            pivots: sol.stats().lp_iterations as usize,
        })
    }

    /// Solves in double precision with the dense tableau used for the exact
    /// path; kept for cross-checking the two arithmetic backends.
    pub fn solve_tableau(&self) -> Result<Solution<f64>> {
        self.validate()?;
        Tableau::<f64>::build(self).run()
    }

    /// Solves in exact rational arithmetic; coefficients are converted from
    /// their binary floating-point values exactly.
    pub fn solve_exact(&self) -> Result<Solution<BigRational>> {
        self.validate()?;
        Tableau::<BigRational>::build(self).run()
    }

    /// Checks `x` against every row and the sign constraints.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Renders the problem in CPLEX LP text format.
    pub fn to_lp_format(&self) -> String {
        let name = |j: usize| sanitize(&self.names[j], j);
        let mut out = String::from("Maximize\n obj:");
        write_terms(&mut out, self.objective.iter().copied().enumerate(), &name);
        out.push_str("\nSubject To\n");
        for (k, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " {}:", sanitize(&c.name, k));
            write_terms(&mut out, c.coeffs.iter().copied(), &name);
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, " {rel} {}", fmt_num(c.rhs));
        }
        out.push_str("End\n");
        out
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

fn write_terms(out: &mut String, terms: impl Iterator<Item = (usize, f64)>, name: &dyn Fn(usize) -> String) {
    let mut any = false;
    for (j, a) in terms.filter(|(_, a)| *a != 0.0) {
        let sign = if a < 0.0 { "-" } else { "+" };
        let _ = write!(out, " {sign} {} {}", fmt_num(a.abs()), name(j));
        any = true;
    }
    if !any {
        out.push_str(" 0 dummy");
    }
}

fn sanitize(name: &str, idx: usize) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    match cleaned.chars().next() {
        Some(c) if c.is_ascii_alphabetic() => cleaned,
        _ => format!("v{idx}_{cleaned}"),
    }
}

struct Tableau<T> {
    rows: usize,
    cols: usize,
    /// Row-major `rows x (cols + 1)`; the last column is the right-hand side.
    a: Vec<T>,
    basis: Vec<usize>,
    structural: usize,
    artificial_start: usize,
    objective: Vec<T>,
    pivots: usize,
}

impl<T: LpScalar> Tableau<T> {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.vars();
        let rows = lp.constraints.len();
        let mut slack_count = 0;
        let mut art_count = 0;
        let mut normalized = Vec::with_capacity(rows);
        for c in &lp.constraints {
            let flip = c.rhs < 0.0;
            let rel = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            if rel != Relation::Eq {
                slack_count += 1;
            }
            if rel != Relation::Le {
                art_count += 1;
            }
            normalized.push((c, flip, rel));
        }
        let artificial_start = n + slack_count;
        let cols = artificial_start + art_count;
        let width = cols + 1;
        let mut a = vec![T::zero(); rows * width];
        let mut basis = vec![0; rows];
        let (mut s, mut art) = (n, artificial_start);
        for (r, (c, flip, rel)) in normalized.into_iter().enumerate() {
            let row = &mut a[r * width..(r + 1) * width];
            for &(j, v) in &c.coeffs {
                let v = if flip { -v } else { v };
                row[j] = row[j].add(&T::from_f64(v));
            }
            row[cols] = T::from_f64(if flip { -c.rhs } else { c.rhs });
            match rel {
                Relation::Le => {
                    row[s] = T::one();
                    basis[r] = s;
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = T::one().neg();
                    s += 1;
                    row[art] = T::one();
                    basis[r] = art;
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = T::one();
                    basis[r] = art;
                    art += 1;
                }
            }
        }
        let objective = lp.objective.iter().map(|&c| T::from_f64(c)).collect();
        Tableau {
            rows,
            cols,
            a,
            basis,
            structural: n,
            artificial_start,
            objective,
            pivots: 0,
        }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> &T {
        &self.a[r * self.width() + c]
    }

    /// Reduced-cost row for cost vector `c` (length `cols`) under the
    /// current basis, with `-objective` in the last slot.
    fn price(&self, c: &[T]) -> Vec<T> {
        let w = self.width();
        let mut z: Vec<T> = c.to_vec();
        z.push(T::zero());
        for r in 0..self.rows {
            let cb = &c[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            let cb = cb.clone();
            for k in 0..w {
                let v = self.at(r, k);
                if !v.is_zero() {
                    z[k] = z[k].sub(&cb.mul(v));
                }
            }
        }
        z
    }

    fn pivot(&mut self, r: usize, e: usize, z: &mut [T]) {
        let w = self.width();
        let p = self.at(r, e).clone();
        let start = r * w;
        for k in 0..w {
            if !self.a[start + k].is_zero() {
                self.a[start + k] = self.a[start + k].div(&p);
            }
        }
        self.a[start + e] = T::one();
        let pivot_row: Vec<(usize, T)> = (0..w)
            .filter(|&k| !self.a[start + k].is_zero())
            .map(|k| (k, self.a[start + k].clone()))
            .collect();
        for q in 0..self.rows {
            if q == r {
                continue;
            }
            let f = self.at(q, e).clone();
            if f.is_zero() {
                continue;
            }
            let base = q * w;
            for (k, v) in &pivot_row {
                self.a[base + k] = self.a[base + k].sub(&f.mul(v));
            }
            self.a[base + e] = T::zero();
        }
        let f = z[e].clone();
        if !f.is_zero() {
            for (k, v) in &pivot_row {
                z[*k] = z[*k].sub(&f.mul(v));
            }
            z[e] = T::zero();
        }
        self.basis[r] = e;
        self.pivots += 1;
    }

    /// Maximizes the cost encoded in `z` over columns `< allowed`.
    fn optimize(&mut self, z: &mut [T], allowed: usize) -> Result<()> {
        let w = self.width();
        let mut streak = 0;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::BudgetExceeded {
                    what: "simplex pivots".into(),
                    needed: self.pivots as u128,
                    budget: MAX_PIVOTS as u128,
                });
            }
            let bland = streak >= DEGENERATE_STREAK;
            let mut enter = None;
            for k in 0..allowed {
                if !z[k].is_pos() {
                    continue;
                }
                match enter {
                    None => enter = Some(k),
                    Some(best) if !bland && z[k] > z[best] => enter = Some(k),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some(e) = enter else { return Ok(()) };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows {
                let a = self.at(r, e);
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.at(r, w - 1).div(a);
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best
                            || (!(best < &ratio) && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Unbounded);
            };
            if ratio.is_zero() {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, e, z);
        }
    }

    fn run(mut self) -> Result<Solution<T>> {
        let w = self.width();
        if self.artificial_start < self.cols {
            let mut cost = vec![T::zero(); self.cols];
            for c in cost.iter_mut().skip(self.artificial_start) {
                *c = T::one().neg();
            }
            let mut z = self.price(&cost);
            self.optimize(&mut z, self.cols)?;
            let infeasibility = z[w - 1].clone();
            if infeasibility.is_pos() {
                return Err(Error::Infeasible);
            }
            for r in 0..self.rows {
                if self.basis[r] < self.artificial_start {
                    continue;
                }
                if let Some(e) = (0..self.artificial_start).find(|&k| !self.at(r, k).is_zero()) {
                    self.pivot(r, e, &mut z);
                }
            }
        }
        let mut cost = vec![T::zero(); self.cols];
        cost[..self.structural].clone_from_slice(&self.objective);
        let mut z = self.price(&cost);
        let allowed = self.artificial_start;
        self.optimize(&mut z, allowed)?;
        let mut x = vec![T::zero(); self.structural];
        for r in 0..self.rows {
            let b = self.basis[r];
            if b < self.structural {
                x[b] = self.at(r, w - 1).clone();
            }
        }
        let objective = z[w - 1].neg();
        Ok(Solution {
            objective,
            x,
            pivots: self.pivots,
        })
    }
}

/// Converts an exact solution to floats.
pub fn to_f64_solution(s: &Solution<BigRational>) -> Solution<f64> {
    Solution {
        objective: LpScalar::to_f64(&s.objective),
        x: s.x.iter().map(LpScalar::to_f64).collect(),
        pivots: s.pivots,
    }
}

/// Exact rational from a decimal-friendly float, used by tests.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from_i64(num).unwrap(), BigInt::from_i64(den).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textbook() -> LinearProgram {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18; optimum 36 at (2, 6)
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 3.0);
        let y = lp.add_var("y", 5.0);
        lp.add_constraint("a", vec![(x, 1.0)], Relation::Le, 4.0);
        lp.add_constraint("b", vec![(y, 2.0)], Relation::Le, 12.0);
        lp.add_constraint("c", vec![(x, 3.0), (y, 2.0)], Relation::Le, 18.0);
        lp
    }

    #[test]
    fn solves_textbook_problem() {
        let s = textbook().solve().unwrap();
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn exact_matches_float() {
        let s = textbook().solve_exact().unwrap();
        assert_eq!(s.objective, rational(36, 1));
    }

    #[test]
    fn equality_and_ge_rows_need_phase_one() {
        // min x + y (max -x - y) s.t. x + y >= 2, x - y = 1 -> x = 1.5, y = 0.5
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", -1.0);
        let y = lp.add_var("y", -1.0);
        lp.add_constraint("ge", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 2.0);
        lp.add_constraint("eq", vec![(x, 1.0), (y, -1.0)], Relation::Eq, 1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective + 2.0).abs() < 1e-9);
        assert!((s.x[0] - 1.5).abs() < 1e-9);
        let e = lp.solve_exact().unwrap();
        assert_eq!(e.x[1], rational(1, 2));
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 1.0);
        lp.add_constraint("lo", vec![(x, 1.0)], Relation::Ge, 3.0);
        assert_eq!(lp.solve().unwrap_err(), Error::Unbounded);
        lp.add_constraint("hi", vec![(x, 1.0)], Relation::Le, 2.0);
        assert_eq!(lp.solve().unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // max -x s.t. -x <= -2 -> x = 2
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", -1.0);
        lp.add_constraint("r", vec![(x, -1.0)], Relation::Le, -2.0);
        let s = lp.solve().unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example under Dantzig pricing.
        let mut lp = LinearProgram::new();
        let v: Vec<usize> = ["x4", "x5", "x6", "x7"]
            .iter()
            .zip([0.75, -150.0, 0.02, -6.0])
            .map(|(n, c)| lp.add_var(*n, c))
            .collect();
        lp.add_constraint("r1", vec![(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)], Relation::Le, 0.0);
        lp.add_constraint("r2", vec![(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)], Relation::Le, 0.0);
        lp.add_constraint("r3", vec![(v[2], 1.0)], Relation::Le, 1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 0.05).abs() < 1e-9);
    }

    #[test]
    fn lp_format_lists_rows() {
        let text = textbook().to_lp_format();
        assert!(text.starts_with("Maximize\n obj: + 3.0 x + 5.0 y"));
        assert!(text.contains(" c: + 3.0 x + 2.0 y <= 18.0"));
        assert!(text.ends_with("End\n"));
    }
}
