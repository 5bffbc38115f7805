//! Dense two-phase simplex over the rationals with Bland's rule.

use num_traits::{Signed, Zero};

use crate::exactnum::{rat, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Index of the right-hand-side column.
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let k = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &k * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimises `cost` over columns `< allowed`; returns false when unbounded.
    fn optimise(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() {
                        r -= &cost[b] * &self.rows[i][j];
                    }
                }
                r.is_negative()
            });
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.rhs] / &row[c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .enumerate()
            .fold(rat(0), |acc, (i, &b)| acc + &cost[b] * &self.rows[i][self.rhs])
    }
}

/// Minimises `c . x` subject to `A x = b`, `x >= 0`.
pub fn simplex_min(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert!(b.len() == m && a.iter().all(|r| r.len() == n), "inconsistent LP shape");
    let rhs = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut t: Vec<Rational> = row.iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
        t.extend((0..m).map(|k| rat(i64::from(k == i))));
        t.push(if flip { -bi.clone() } else { bi.clone() });
        rows.push(t);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..n + m).collect(),
        rhs,
    };
    let phase1: Vec<Rational> = (0..n + m).map(|j| rat(i64::from(j >= n))).collect();
    tab.optimise(&phase1, n + m);
    if !tab.value(&phase1).is_zero() {
        return LpOutcome::Infeasible;
    }
    // drive artificial variables out of the basis, dropping redundant rows
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost: Vec<Rational> = c.to_vec();
    cost.extend((0..m).map(|_| rat(0)));
    if !tab.optimise(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![rat(0); n];
    for (i, &bcol) in tab.basis.iter().enumerate() {
        x[bcol] = tab.rows[i][rhs].clone();
    }
    let value = c.iter().zip(&x).fold(rat(0), |acc, (ci, xi)| acc + ci * xi);
    LpOutcome::Optimal { x, value }
}
