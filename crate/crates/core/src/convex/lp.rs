//! Dense two-phase simplex for `min cᵀλ  s.t.  Aλ = b, λ ≥ 0`.
//!
//! Entering and leaving variables follow Bland's rule (lowest index), which
//! rules out cycling and makes degenerate ties reproducible.

use crate::error::{Error, Result};
use crate::scalar::{norm_inf, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<S> {
    objective: Vec<S>,
    constraints: Vec<Vec<S>>,
    rhs: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { solution: Vec<S>, value: S },
    Infeasible,
    Unbounded,
}

impl<S: Scalar> LpOutcome<S> {
    pub fn value(&self) -> Option<S> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

impl<S: Scalar> LpProblem<S> {
    pub fn new(objective: Vec<S>, constraints: Vec<Vec<S>>, rhs: Vec<S>) -> Result<Self> {
        if constraints.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: constraints.len(),
                found: rhs.len(),
            });
        }
        if let Some(row) = constraints.iter().find(|r| r.len() != objective.len()) {
            return Err(Error::DimensionMismatch {
                expected: objective.len(),
                found: row.len(),
            });
        }
        let finite = objective
            .iter()
            .chain(rhs.iter())
            .chain(constraints.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::LpNumerical("non-finite LP data".into()));
        }
        Ok(Self {
            objective,
            constraints,
            rhs,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    fn feasibility_tol(&self) -> S {
        S::epsilon().sqrt() * S::lit(1e-2) * S::one().max(norm_inf(&self.rhs))
    }

    fn residual_tol(&self) -> S {
        let base = S::lit(1e-9).max(S::epsilon() * S::lit(1e3));
        let scale = self
            .constraints
            .iter()
            .flatten()
            .fold(S::one().max(norm_inf(&self.rhs)), |m, v| m.max(v.abs()));
        base * scale
    }

    pub fn solve(&self) -> Result<LpOutcome<S>> {
        let n = self.num_vars();
        let m = self.num_constraints();
        if m == 0 {
            // only λ ≥ 0: bounded below iff every cost is nonnegative
            return Ok(if self.objective.iter().any(|c| *c < S::zero()) {
                LpOutcome::Unbounded
            } else {
                LpOutcome::Optimal {
                    solution: vec![S::zero(); n],
                    value: S::zero(),
                }
            });
        }

        let mut tab = Tableau::phase_one(&self.constraints, &self.rhs);
        let mut cost = vec![S::zero(); n + m];
        for c in &mut cost[n..] {
            *c = S::one();
        }
        if let Status::Unbounded = tab.run(&cost, n + m)? {
            return Err(Error::LpNumerical("phase one reported unbounded".into()));
        }
        let infeasibility: S = (0..m)
            .filter(|&i| tab.alive[i] && tab.basis[i] >= n)
            .map(|i| tab.rhs(i).max(S::zero()))
            .sum();
        if infeasibility > self.feasibility_tol() {
            return Ok(LpOutcome::Infeasible);
        }
        tab.expel_artificials(n);

        let mut cost = self.objective.clone();
        cost.resize(n + m, S::zero());
        if let Status::Unbounded = tab.run(&cost, n)? {
            return Ok(LpOutcome::Unbounded);
        }

        let mut solution = vec![S::zero(); n];
        for i in 0..m {
            if tab.alive[i] && tab.basis[i] < n {
                solution[tab.basis[i]] = tab.rhs(i).max(S::zero());
            }
        }
        let residual = self
            .constraints
            .iter()
            .zip(&self.rhs)
            .fold(S::zero(), |r, (row, &b)| {
                let lhs: S = row.iter().zip(&solution).map(|(&a, &x)| a * x).sum();
                r.max((lhs - b).abs())
            });
        if residual > self.residual_tol() {
            return Err(Error::LpNumerical(format!(
                "constraint residual {residual} after solve"
            )));
        }
        let value = self
            .objective
            .iter()
            .zip(&solution)
            .map(|(&c, &x)| c * x)
            .sum();
        Ok(LpOutcome::Optimal { solution, value })
    }
}

enum Status {
    Optimal,
    Unbounded,
}

struct Tableau<S> {
    /// Row-major `m × (cols + 1)`; the last column is the right-hand side.
    cells: Vec<S>,
    m: usize,
    width: usize,
    basis: Vec<usize>,
    alive: Vec<bool>,
}

impl<S: Scalar> Tableau<S> {
    fn phase_one(a: &[Vec<S>], b: &[S]) -> Self {
        let m = b.len();
        let n = a.first().map_or(0, Vec::len);
        let width = n + m + 1;
        let mut cells = vec![S::zero(); m * width];
        for i in 0..m {
            let sign = if b[i] < S::zero() { -S::one() } else { S::one() };
            for j in 0..n {
                cells[i * width + j] = sign * a[i][j];
            }
            cells[i * width + n + i] = S::one();
            cells[i * width + width - 1] = sign * b[i];
        }
        Self {
            cells,
            m,
            width,
            basis: (n..n + m).collect(),
            alive: vec![true; m],
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> S {
        self.cells[i * self.width + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> S {
        self.cells[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let w = self.width;
        let inv = S::one() / self.at(p, q);
        for j in 0..w {
            self.cells[p * w + j] = self.cells[p * w + j] * inv;
        }
        self.cells[p * w + q] = S::one();
        for i in 0..self.m {
            if i == p || !self.alive[i] {
                continue;
            }
            let f = self.at(i, q);
            if f == S::zero() {
                continue;
            }
            for j in 0..w {
                let v = self.cells[i * w + j] - f * self.cells[p * w + j];
                self.cells[i * w + j] = v;
            }
            self.cells[i * w + q] = S::zero();
        }
        self.basis[p] = q;
    }

    fn reduced_cost(&self, cost: &[S], j: usize) -> S {
        (0..self.m)
            .filter(|&i| self.alive[i])
            .fold(cost[j], |r, i| r - cost[self.basis[i]] * self.at(i, j))
    }

    /// Minimizes `cost` over the first `cols` columns.
    fn run(&mut self, cost: &[S], cols: usize) -> Result<Status> {
        let eps = S::pivot_eps();
        let rc_tol = eps * cost.iter().fold(S::one(), |m, c| m.max(c.abs()));
        let cap = 64 * (cols + self.m) + 1024;
        for _ in 0..cap {
            let mut in_basis = vec![false; cols.max(self.width - 1)];
            for i in 0..self.m {
                if self.alive[i] {
                    in_basis[self.basis[i]] = true;
                }
            }
            let Some(q) = (0..cols).find(|&j| !in_basis[j] && self.reduced_cost(cost, j) < -rc_tol)
            else {
                return Ok(Status::Optimal);
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.m {
                if !self.alive[i] {
                    continue;
                }
                let a = self.at(i, q);
                if a <= eps {
                    continue;
                }
                let ratio = self.rhs(i).max(S::zero()) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = eps * (S::one() + best.abs());
                        if ratio < best - tie
                            || ((ratio - best).abs() <= tie && self.basis[i] < self.basis[k])
                        {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(Status::Unbounded),
                Some((p, _)) => self.pivot(p, q),
            }
        }
        Err(Error::LpNumerical("simplex iteration cap reached".into()))
    }

    /// After phase one, pivots remaining artificial variables out of the
    /// basis; rows where that is impossible are redundant and are dropped.
    fn expel_artificials(&mut self, n: usize) {
        let eps = S::pivot_eps();
        for i in 0..self.m {
            if !self.alive[i] || self.basis[i] < n {
                continue;
            }
            match (0..n).find(|&j| self.at(i, j).abs() > eps) {
                Some(q) => self.pivot(i, q),
                None => self.alive[i] = false,
            }
        }
    }
}
