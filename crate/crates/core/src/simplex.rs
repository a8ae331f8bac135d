//! Dense two-phase tableau simplex over a generic scalar type.
//!
//! Problems are given in standard form: minimize `c·x` subject to
//! `A x = b`, `x ≥ 0`.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variables; never cycles.
    Bland,
    /// Steepest edge on the current tableau, with a switch to Bland's rule
    /// after a run of degenerate pivots.
    SteepestEdge,
}

impl PivotRule {
    pub fn for_scalar<T: Scalar>() -> Self {
        if T::EXACT {
            PivotRule::Bland
        } else {
            PivotRule::SteepestEdge
        }
    }
}

#[derive(Clone, Debug)]
pub struct Lp<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub value: T,
    pub pivots: usize,
}

struct Tableau<T> {
    /// `rows × (cols + 1)`; the last column is the right-hand side.
    t: Vec<Vec<T>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

const DEGENERATE_RUN: usize = 50;
const MAX_PIVOTS: usize = 200_000;

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.t[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        let inv = T::one() / p;
        for x in self.t[r].iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * inv.clone();
            }
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
            if !T::EXACT {
                row[c] = T::zero();
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Reduced costs of `cost` restricted to `allowed` columns.
    fn reduced_costs(&self, cost: &[T], allowed: &[bool]) -> Vec<Option<T>> {
        (0..self.cols)
            .map(|j| {
                if !allowed[j] {
                    return None;
                }
                let mut d = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    let a = &self.t[i][j];
                    if !a.is_zero() && !cost[bi].is_zero() {
                        d = d - cost[bi].clone() * a.clone();
                    }
                }
                Some(d)
            })
            .collect()
    }

    /// Runs simplex iterations minimizing `cost`. Returns false on unboundedness.
    fn optimize(&mut self, cost: &[T], allowed: &[bool], rule: PivotRule) -> bool {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > MAX_PIVOTS {
                log::warn!("simplex pivot limit reached");
                return true;
            }
            let d = self.reduced_costs(cost, allowed);
            let use_bland = rule == PivotRule::Bland || degenerate >= DEGENERATE_RUN;
            let entering = if use_bland {
                (0..self.cols).find(|&j| d[j].as_ref().is_some_and(|x| x.is_neg()))
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..self.cols {
                    let Some(dj) = &d[j] else { continue };
                    if !dj.is_neg() {
                        continue;
                    }
                    let norm: f64 = 1.0 + self.t.iter().map(|r| r[j].to_f64().powi(2)).sum::<f64>();
                    let score = dj.to_f64() / norm.sqrt();
                    if best.is_none_or(|(_, s)| score < s) {
                        best = Some((j, score));
                    }
                }
                best.map(|b| b.0)
            };
            let Some(e) = entering else {
                return true;
            };
            let mut leave: Option<usize> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][e];
                if !a.is_pos() {
                    continue;
                }
                match leave {
                    None => leave = Some(i),
                    Some(l) => {
                        let lhs = self.rhs(i).clone() * self.t[l][e].clone();
                        let rhs = self.rhs(l).clone() * a.clone();
                        let diff = lhs - rhs;
                        let better = if diff.is_neg() {
                            true
                        } else if diff.is_pos() {
                            false
                        } else if use_bland || T::EXACT {
                            self.basis[i] < self.basis[l]
                        } else {
                            a.clone() > self.t[l][e].clone()
                        };
                        if better {
                            leave = Some(i);
                        }
                    }
                }
            }
            let Some(l) = leave else {
                return false;
            };
            if self.rhs(l).is_zero_tol() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(l, e);
        }
    }
}

pub fn solve<T: Scalar>(lp: &Lp<T>, rule: PivotRule) -> LpSolution<T> {
    let m = lp.a.len();
    let n = lp.c.len();
    let cols = n + m;
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m);
    for i in 0..m {
        let neg = lp.b[i] < T::zero();
        let mut row: Vec<T> = Vec::with_capacity(cols + 1);
        for j in 0..n {
            let v = lp.a[i][j].clone();
            row.push(if neg { -v } else { v });
        }
        for k in 0..m {
            row.push(if k == i { T::one() } else { T::zero() });
        }
        row.push(if neg { -lp.b[i].clone() } else { lp.b[i].clone() });
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), cols, pivots: 0 };

    // Phase one.
    let mut cost1 = vec![T::zero(); cols];
    for c in cost1.iter_mut().skip(n) {
        *c = T::one();
    }
    let all = vec![true; cols];
    tab.optimize(&cost1, &all, rule);
    let infeas = (0..m).filter(|&i| tab.basis[i] >= n).fold(T::zero(), |acc, i| acc + tab.rhs(i).clone());
    let scale = lp.b.iter().fold(1.0f64, |s, x| s.max(x.to_f64().abs()));
    if infeas.is_pos() && (T::EXACT || infeas.to_f64() > 1e-9 * scale) {
        return LpSolution {
            status: LpStatus::Infeasible,
            x: vec![T::zero(); n],
            value: T::zero(),
            pivots: tab.pivots,
        };
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            let col = (0..n).find(|&j| !tab.t[i][j].is_zero_tol());
            match col {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // Phase two.
    let mut cost2 = vec![T::zero(); cols];
    cost2[..n].clone_from_slice(&lp.c);
    let mut allowed = vec![true; cols];
    allowed[n..].fill(false);
    let bounded = tab.optimize(&cost2, &allowed, rule);
    let mut x = vec![T::zero(); n];
    for (i, &bi) in tab.basis.iter().enumerate() {
        if bi < n {
            x[bi] = tab.rhs(i).clone();
        }
    }
    let value = x.iter().zip(&lp.c).fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    LpSolution { status: if bounded { LpStatus::Optimal } else { LpStatus::Unbounded }, x, value, pivots: tab.pivots }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use num_rational::BigRational;

    fn small_lp<T: Scalar>() -> Lp<T> {
        // min -x - 2y  s.t.  x + y + s1 = 4,  x + 3y + s2 = 6
        let i = T::from_i64;
        Lp {
            a: vec![vec![i(1), i(1), i(1), i(0)], vec![i(1), i(3), i(0), i(1)]],
            b: vec![i(4), i(6)],
            c: vec![i(-1), i(-2), i(0), i(0)],
        }
    }

    #[test]
    fn solves_small_problem_both_scalars() {
        let s = solve(&small_lp::<f64>(), PivotRule::SteepestEdge);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value + 5.0).abs() < 1e-12);
        let e = solve(&small_lp::<BigRational>(), PivotRule::Bland);
        assert_eq!(e.status, LpStatus::Optimal);
        assert_eq!(e.value, q(-5));
        assert_eq!(e.x[0], q(3));
        assert_eq!(e.x[1], q(1));
    }

    #[test]
    fn detects_infeasibility() {
        let lp = Lp { a: vec![vec![1.0, 1.0]], b: vec![-1.0], c: vec![0.0, 0.0] };
        assert_eq!(solve(&lp, PivotRule::Bland).status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unboundedness() {
        let lp = Lp { a: vec![vec![1.0, -1.0]], b: vec![1.0], c: vec![-1.0, 0.0] };
        assert_eq!(solve(&lp, PivotRule::SteepestEdge).status, LpStatus::Unbounded);
    }

    #[test]
    fn handles_redundant_rows() {
        let lp = Lp { a: vec![vec![q(1), q(1)], vec![q(2), q(2)]], b: vec![q(2), q(4)], c: vec![q(1), q(0)] };
        let s = solve(&lp, PivotRule::Bland);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, q(0));
        assert_eq!(s.x[1], q(2));
    }
}
