//! Exact rational linear programming (two-phase tableau simplex, Bland's rule).
//!
//! Variables are free; constraints are `coeffs . x  (<=|>=|=)  rhs`.

use num_traits::{One, Signed, Zero};

use crate::rational::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rel: Rel, rhs: Rat) -> Self {
        Constraint { coeffs, rel, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Rat>, value: Rat },
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Rat]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    cost: Vec<Rat>,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= p.clone();
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= f.clone() * y;
                }
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (x, y) in self.cost.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= f.clone() * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimize over columns `< limit`. Returns false when unbounded.
    fn run(&mut self, limit: usize) -> bool {
        let rhs = self.width();
        loop {
            let Some(c) = (0..limit).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rat)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = row[rhs].clone() / row[c].clone();
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Maximize `objective . x` subject to the constraints (pass zeros for a pure
/// feasibility problem).
pub fn maximize(nvars: usize, constraints: &[Constraint], objective: &[Rat]) -> LpOutcome {
    assert_eq!(objective.len(), nvars);
    let m = constraints.len();
    let nslack = constraints.iter().filter(|c| c.rel != Rel::Eq).count();
    // columns: x+ (nvars), x- (nvars), slacks, artificials (m), rhs
    let art0 = 2 * nvars + nslack;
    let width = art0 + m;
    let mut rows = Vec::with_capacity(m);
    let mut slack = 2 * nvars;
    for (i, c) in constraints.iter().enumerate() {
        assert_eq!(c.coeffs.len(), nvars);
        let mut row = vec![Rat::zero(); width + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = a.clone();
            row[nvars + j] = -a.clone();
        }
        match c.rel {
            Rel::Le => {
                row[slack] = Rat::one();
                slack += 1;
            }
            Rel::Ge => {
                row[slack] = -Rat::one();
                slack += 1;
            }
            Rel::Eq => {}
        }
        row[width] = c.rhs.clone();
        if c.rhs.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[art0 + i] = Rat::one();
        rows.push(row);
    }
    let mut cost = vec![Rat::zero(); width + 1];
    for row in &rows {
        for j in 0..art0 {
            cost[j] -= row[j].clone();
        }
        cost[width] -= row[width].clone();
    }
    let basis: Vec<usize> = (art0..art0 + m).collect();
    let mut t = Tableau { rows, cost, basis };
    t.run(art0);
    if !t.cost[width].is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive artificial variables out of the basis, dropping redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= art0 {
            match (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    let mut cost = vec![Rat::zero(); width + 1];
    for j in 0..nvars {
        cost[j] = -objective[j].clone();
        cost[nvars + j] = objective[j].clone();
    }
    for (r, &b) in t.basis.iter().enumerate() {
        if !cost[b].is_zero() {
            let f = cost[b].clone();
            for (x, y) in cost.iter_mut().zip(&t.rows[r]) {
                *x -= f.clone() * y;
            }
        }
    }
    t.cost = cost;
    if !t.run(art0) {
        return LpOutcome::Unbounded;
    }
    let mut y = vec![Rat::zero(); art0];
    for (r, &b) in t.basis.iter().enumerate() {
        y[b] = t.rows[r][width].clone();
    }
    let x: Vec<Rat> = (0..nvars).map(|j| y[j].clone() - y[nvars + j].clone()).collect();
    let value = x.iter().zip(objective).fold(Rat::zero(), |s, (a, b)| s + a * b);
    LpOutcome::Optimal { x, value }
}

/// Some point satisfying the constraints, if any.
pub fn feasible_point(nvars: usize, constraints: &[Constraint]) -> Option<Vec<Rat>> {
    match maximize(nvars, constraints, &vec![Rat::zero(); nvars]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn r(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn small_maximization() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  (8/5, 6/5)
        let cs = vec![
            Constraint::new(r(&[1, 2]), Rel::Le, rat(4, 1)),
            Constraint::new(r(&[3, 1]), Rel::Le, rat(6, 1)),
            Constraint::new(r(&[1, 0]), Rel::Ge, rat(0, 1)),
            Constraint::new(r(&[0, 1]), Rel::Ge, rat(0, 1)),
        ];
        match maximize(2, &cs, &r(&[1, 1])) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, vec![rat(8, 5), rat(6, 5)]);
                assert_eq!(value, rat(14, 5));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cs = vec![
            Constraint::new(r(&[1]), Rel::Ge, rat(2, 1)),
            Constraint::new(r(&[1]), Rel::Le, rat(1, 1)),
        ];
        assert_eq!(maximize(1, &cs, &r(&[1])), LpOutcome::Infeasible);
        let cs = vec![Constraint::new(r(&[1]), Rel::Ge, rat(-3, 1))];
        assert_eq!(maximize(1, &cs, &r(&[1])), LpOutcome::Unbounded);
        assert_eq!(maximize(1, &cs, &r(&[-1])).point().unwrap(), &[rat(-3, 1)][..]);
    }

    #[test]
    fn equalities_with_redundancy() {
        let cs = vec![
            Constraint::new(r(&[1, 1]), Rel::Eq, rat(2, 1)),
            Constraint::new(r(&[2, 2]), Rel::Eq, rat(4, 1)),
            Constraint::new(r(&[1, -1]), Rel::Eq, rat(0, 1)),
        ];
        assert_eq!(feasible_point(2, &cs).unwrap(), r(&[1, 1]));
    }
}
