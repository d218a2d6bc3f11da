//! Exact rational linear programming.
//!
//! Two-phase primal simplex on a dense tableau with Bland's anti-cycling
//! rule. Every outcome carries a witness that can be re-checked with exact
//! arithmetic via [`LpOutcome::verify`]:
//!
//! * `Optimal`: a feasible point whose objective equals the reported value.
//! * `Infeasible`: Farkas multipliers `y` over [`LinearProgram::canonical_rows`]
//!   with `y_i >= 0` on `>=` rows, `sum_i y_i a_i = 0` and `sum_i y_i b_i = 1`.
//! * `Unbounded`: a feasible point plus a recession ray with negative cost.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{Rational, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    /// `row . x >= rhs`
    Ge,
    /// `row . x == rhs`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub row: Vector,
    pub sense: Sense,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarBound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

/// `minimize objective . x` subject to `constraints` and per-variable `bounds`.
///
/// Variables without bounds are free. `bounds` is either empty or has one
/// entry per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vector,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    pub fn minimize(objective: Vector) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
            bounds: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn ge(mut self, row: Vector, rhs: Rational) -> Self {
        self.push(row, Sense::Ge, rhs);
        self
    }

    pub fn eq(mut self, row: Vector, rhs: Rational) -> Self {
        self.push(row, Sense::Eq, rhs);
        self
    }

    pub fn push(&mut self, row: Vector, sense: Sense, rhs: Rational) {
        self.constraints.push(Constraint { row, sense, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        if self.bounds.is_empty() {
            self.bounds = vec![VarBound::default(); self.num_vars()];
        }
        self.bounds[var] = VarBound { lower, upper };
    }

    /// Makes every variable nonnegative.
    pub fn nonnegative(mut self) -> Self {
        self.bounds = vec![
            VarBound {
                lower: Some(Rational::zero()),
                upper: None,
            };
            self.num_vars()
        ];
        self
    }

    fn bound(&self, var: usize) -> Option<&VarBound> {
        self.bounds.get(var)
    }

    /// Constraints followed by bound rows (`x_k >= l`, then `-x_k >= -u`),
    /// the row set Farkas certificates refer to.
    pub fn canonical_rows(&self) -> Vec<Constraint> {
        let n = self.num_vars();
        let mut rows = self.constraints.clone();
        for (k, b) in self.bounds.iter().enumerate() {
            if let Some(l) = &b.lower {
                rows.push(Constraint {
                    row: Vector::basis(n, k),
                    sense: Sense::Ge,
                    rhs: l.clone(),
                });
            }
            if let Some(u) = &b.upper {
                rows.push(Constraint {
                    row: Vector::basis(n, k).neg(),
                    sense: Sense::Ge,
                    rhs: -u.clone(),
                });
            }
        }
        rows
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.constraints.is_empty() && self.bounds.iter().all(|b| b.lower.is_none() && b.upper.is_none()) {
            return Err(Error::EmptyProgram);
        }
        if !self.bounds.is_empty() && self.bounds.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.bounds.len(),
            });
        }
        for c in &self.constraints {
            if c.row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.row.len(),
                });
            }
        }
        Ok(())
    }

    pub fn is_feasible_point(&self, x: &Vector) -> bool {
        x.len() == self.num_vars()
            && self.canonical_rows().iter().all(|c| {
                let lhs = c.row.dot(x);
                match c.sense {
                    Sense::Ge => lhs >= c.rhs,
                    Sense::Eq => lhs == c.rhs,
                }
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vector },
    Infeasible { certificate: Vec<Rational> },
    Unbounded { point: Vector, ray: Vector },
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn status(&self) -> &'static str {
        match self {
            LpOutcome::Optimal { .. } => "optimal",
            LpOutcome::Infeasible { .. } => "infeasible",
            LpOutcome::Unbounded { .. } => "unbounded",
        }
    }

    /// Re-checks the witness against `lp` with exact arithmetic.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        match self {
            LpOutcome::Optimal { value, point } => {
                lp.is_feasible_point(point) && lp.objective.dot(point) == *value
            }
            LpOutcome::Infeasible { certificate } => {
                let rows = lp.canonical_rows();
                if certificate.len() != rows.len() {
                    return false;
                }
                let mut combo = Vector::zeros(lp.num_vars());
                let mut rhs = Rational::zero();
                for (y, c) in certificate.iter().zip(&rows) {
                    if c.sense == Sense::Ge && y.is_negative() {
                        return false;
                    }
                    combo.add_scaled(y, &c.row);
                    rhs += y * &c.rhs;
                }
                combo.is_zero() && rhs.is_positive()
            }
            LpOutcome::Unbounded { point, ray } => {
                if !lp.is_feasible_point(point) || lp.objective.dot(ray) >= Rational::zero() {
                    return false;
                }
                let ray_ok = lp.constraints.iter().all(|c| {
                    let d = c.row.dot(ray);
                    match c.sense {
                        Sense::Ge => !d.is_negative(),
                        Sense::Eq => d.is_zero(),
                    }
                });
                let bounds_ok = lp.bounds.iter().zip(ray.iter()).all(|(b, r)| {
                    (b.lower.is_none() || !r.is_negative()) && (b.upper.is_none() || !r.is_positive())
                });
                ray_ok && bounds_ok
            }
        }
    }
}

/// Solves `lp` exactly.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.check()?;
    let standard = StandardForm::build(lp);
    match standard.solve() {
        Solved::Optimal(y) => {
            let point = standard.recover_point(&y);
            let value = lp.objective.dot(&point);
            Ok(LpOutcome::Optimal { value, point })
        }
        Solved::Unbounded(y, dir) => Ok(LpOutcome::Unbounded {
            point: standard.recover_point(&y),
            ray: standard.recover_direction(&dir),
        }),
        Solved::Infeasible => Ok(LpOutcome::Infeasible {
            certificate: farkas_certificate(lp)?,
        }),
    }
}

/// Finds Farkas multipliers for an infeasible `lp` by solving the
/// alternative system, which is feasible exactly when `lp` is not.
fn farkas_certificate(lp: &LinearProgram) -> Result<Vec<Rational>> {
    let rows = lp.canonical_rows();
    let m = rows.len();
    let n = lp.num_vars();
    let mut alt = LinearProgram::minimize(Vector::zeros(m));
    for k in 0..n {
        let col: Vector = rows.iter().map(|c| c.row[k].clone()).collect();
        alt.push(col, Sense::Eq, Rational::zero());
    }
    let rhs: Vector = rows.iter().map(|c| c.rhs.clone()).collect();
    alt.push(rhs, Sense::Eq, Rational::one());
    for (i, c) in rows.iter().enumerate() {
        if c.sense == Sense::Ge {
            alt.set_bounds(i, Some(Rational::zero()), None);
        }
    }
    let standard = StandardForm::build(&alt);
    match standard.solve() {
        Solved::Optimal(y) => Ok(standard.recover_point(&y).0),
        _ => Err(Error::Solver(
            "phase one reported infeasibility but no Farkas certificate exists".into(),
        )),
    }
}

/// How an original variable is expressed through nonnegative columns.
#[derive(Clone, Debug)]
enum VarMap {
    /// `x = lower + y`
    Shift { col: usize, lower: Rational },
    /// `x = upper - y`
    Flip { col: usize, upper: Rational },
    /// `x = y_pos - y_neg`
    Split { pos: usize, neg: usize },
}

enum Solved {
    Optimal(Vec<Rational>),
    Unbounded(Vec<Rational>, Vec<Rational>),
    Infeasible,
}

/// `minimize cost . y` s.t. `rows y = rhs`, `y >= 0`, `rhs >= 0`.
struct StandardForm {
    maps: Vec<VarMap>,
    cost: Vec<Rational>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Column usable as the initial basic variable of each row, if any.
    initial: Vec<Option<usize>>,
    ncols: usize,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let mut maps = Vec::with_capacity(n);
        let mut ncols = 0;
        for k in 0..n {
            let b = lp.bound(k);
            let lower = b.and_then(|b| b.lower.clone());
            let upper = b.and_then(|b| b.upper.clone());
            let map = match (lower, upper) {
                (Some(lower), _) => {
                    ncols += 1;
                    VarMap::Shift { col: ncols - 1, lower }
                }
                (None, Some(upper)) => {
                    ncols += 1;
                    VarMap::Flip { col: ncols - 1, upper }
                }
                (None, None) => {
                    ncols += 2;
                    VarMap::Split {
                        pos: ncols - 2,
                        neg: ncols - 1,
                    }
                }
            };
            maps.push(map);
        }
        let structural = ncols;

        let mut cost = vec![Rational::zero(); structural];
        for (k, map) in maps.iter().enumerate() {
            let c = &lp.objective[k];
            match map {
                VarMap::Shift { col, .. } => cost[*col] = c.clone(),
                VarMap::Flip { col, .. } => cost[*col] = -c.clone(),
                VarMap::Split { pos, neg } => {
                    cost[*pos] = c.clone();
                    cost[*neg] = -c.clone();
                }
            }
        }

        // (coefficients over structural columns, rhs, sense, slack sign)
        let mut raw: Vec<(Vec<Rational>, Rational, Sense, i8)> = Vec::new();
        for c in &lp.constraints {
            let mut coeffs = vec![Rational::zero(); structural];
            let mut rhs = c.rhs.clone();
            for (k, a) in c.row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                match &maps[k] {
                    VarMap::Shift { col, lower } => {
                        coeffs[*col] = a.clone();
                        rhs -= a * lower;
                    }
                    VarMap::Flip { col, upper } => {
                        coeffs[*col] = -a.clone();
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[*pos] = a.clone();
                        coeffs[*neg] = -a.clone();
                    }
                }
            }
            let slack = if c.sense == Sense::Ge { -1 } else { 0 };
            raw.push((coeffs, rhs, c.sense, slack));
        }
        for (k, map) in maps.iter().enumerate() {
            if let (VarMap::Shift { col, lower }, Some(upper)) =
                (map, lp.bound(k).and_then(|b| b.upper.as_ref()))
            {
                let mut coeffs = vec![Rational::zero(); structural];
                coeffs[*col] = Rational::one();
                raw.push((coeffs, upper - lower, Sense::Ge, 1));
            }
        }

        let nslack = raw.iter().filter(|r| r.3 != 0).count();
        ncols = structural + nslack;
        let mut rows = Vec::with_capacity(raw.len());
        let mut rhs_out = Vec::with_capacity(raw.len());
        let mut initial = Vec::with_capacity(raw.len());
        let mut next_slack = structural;
        for (mut coeffs, mut rhs, _, slack_sign) in raw {
            coeffs.resize(ncols, Rational::zero());
            let slack_col = if slack_sign != 0 {
                coeffs[next_slack] = Rational::from_integer(slack_sign.into());
                next_slack += 1;
                Some(next_slack - 1)
            } else {
                None
            };
            if rhs.is_negative() || (rhs.is_zero() && slack_sign < 0) {
                for a in coeffs.iter_mut() {
                    *a = -a.clone();
                }
                rhs = -rhs;
            }
            let basic = slack_col.filter(|&s| coeffs[s].is_one());
            rows.push(coeffs);
            rhs_out.push(rhs);
            initial.push(basic);
        }
        cost.resize(ncols, Rational::zero());

        StandardForm {
            maps,
            cost,
            rows,
            rhs: rhs_out,
            initial,
            ncols,
        }
    }

    fn solve(&self) -> Solved {
        let real = self.ncols;
        let nart = self.initial.iter().filter(|b| b.is_none()).count();
        let mut t = Tableau {
            rows: self.rows.clone(),
            rhs: self.rhs.clone(),
            basis: Vec::with_capacity(self.rows.len()),
            cost: Vec::new(),
        };
        let mut art = real;
        for (i, init) in self.initial.iter().enumerate() {
            match init {
                Some(c) => t.basis.push(*c),
                None => {
                    t.basis.push(art);
                    art += 1;
                }
            }
            t.rows[i].resize(real + nart, Rational::zero());
        }
        for (i, &b) in t.basis.iter().enumerate() {
            if b >= real {
                t.rows[i][b] = Rational::one();
            }
        }

        if nart > 0 {
            // Phase one: minimize the sum of artificials.
            let mut cost = vec![Rational::zero(); real + nart];
            for i in 0..t.rows.len() {
                if t.basis[i] >= real {
                    for j in 0..real {
                        if !t.rows[i][j].is_zero() {
                            cost[j] -= &t.rows[i][j];
                        }
                    }
                }
            }
            t.cost = cost;
            // Phase one is bounded below by zero.
            let _ = t.run(real + nart);
            let infeasible = t
                .basis
                .iter()
                .zip(&t.rhs)
                .any(|(&b, v)| b >= real && v.is_positive());
            if infeasible {
                return Solved::Infeasible;
            }
            // Drive remaining (zero-level) artificials out of the basis.
            let mut redundant = Vec::new();
            for r in 0..t.rows.len() {
                if t.basis[r] >= real {
                    match (0..real).find(|&j| !t.rows[r][j].is_zero()) {
                        Some(j) => t.pivot(r, j),
                        None => redundant.push(r),
                    }
                }
            }
            for &r in redundant.iter().rev() {
                t.rows.remove(r);
                t.rhs.remove(r);
                t.basis.remove(r);
            }
            for row in &mut t.rows {
                row.truncate(real);
            }
        }

        let mut cost = self.cost.clone();
        for (i, &b) in t.basis.iter().enumerate() {
            let cb = self.cost[b].clone();
            if !cb.is_zero() {
                for (j, a) in t.rows[i].iter().enumerate() {
                    if !a.is_zero() {
                        cost[j] -= &cb * a;
                    }
                }
            }
        }
        t.cost = cost;
        match t.run(real) {
            None => Solved::Optimal(t.solution(real)),
            Some(entering) => {
                let y = t.solution(real);
                let mut dir = vec![Rational::zero(); real];
                dir[entering] = Rational::one();
                for (i, &b) in t.basis.iter().enumerate() {
                    dir[b] = -t.rows[i][entering].clone();
                }
                Solved::Unbounded(y, dir)
            }
        }
    }

    fn recover_point(&self, y: &[Rational]) -> Vector {
        self.maps
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, lower } => lower + &y[*col],
                VarMap::Flip { col, upper } => upper - &y[*col],
                VarMap::Split { pos, neg } => &y[*pos] - &y[*neg],
            })
            .collect()
    }

    fn recover_direction(&self, d: &[Rational]) -> Vector {
        self.maps
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, .. } => d[*col].clone(),
                VarMap::Flip { col, .. } => -d[*col].clone(),
                VarMap::Split { pos, neg } => &d[*pos] - &d[*neg],
            })
            .collect()
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs.
    cost: Vec<Rational>,
}

impl Tableau {
    /// Runs Bland's rule over columns `< allowed`. Returns the entering
    /// column of an unbounded direction, or `None` at optimality.
    fn run(&mut self, allowed: usize) -> Option<usize> {
        loop {
            let entering = (0..allowed).find(|&j| self.cost[j].is_negative())?;
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][entering];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, entering),
                None => return Some(entering),
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let mut prow = std::mem::take(&mut self.rows[r]);
        let piv = prow[c].clone();
        if !piv.is_one() {
            for a in prow.iter_mut().filter(|a| !a.is_zero()) {
                *a /= &piv;
            }
            self.rhs[r] /= &piv;
        }
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] -= &f * &prow[j];
            }
            if !prhs.is_zero() {
                self.rhs[i] -= &f * &prhs;
            }
        }
        let f = self.cost[c].clone();
        if !f.is_zero() {
            for &j in &nz {
                if j < self.cost.len() {
                    self.cost[j] -= &f * &prow[j];
                }
            }
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    fn solution(&self, ncols: usize) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < ncols {
                y[b] = self.rhs[i].clone();
            }
        }
        y
    }
}
