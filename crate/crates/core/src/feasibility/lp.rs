//! Linear programs over the affine solution space `θ = θ0 + B t`.

use crate::scalar::Scalar;
use crate::simplex::{self, Lp, LpStatus, PivotRule};

pub(crate) struct Affine<'a, T> {
    pub theta0: &'a [T],
    pub kernel: &'a [Vec<i64>],
}

impl<T: Scalar> Affine<'_, T> {
    pub fn n(&self) -> usize {
        self.theta0.len()
    }

    pub fn d(&self) -> usize {
        self.kernel.len()
    }
}

struct Builder<T> {
    ncols: usize,
    cost: Vec<T>,
    rows: Vec<(Vec<(usize, T)>, T)>,
}

impl<T: Scalar> Builder<T> {
    fn new() -> Self {
        Builder { ncols: 0, cost: Vec::new(), rows: Vec::new() }
    }

    fn var(&mut self, cost: T) -> usize {
        self.cost.push(cost);
        self.ncols += 1;
        self.ncols - 1
    }

    fn vars(&mut self, k: usize, cost: T) -> Vec<usize> {
        (0..k).map(|_| self.var(cost.clone())).collect()
    }

    fn row(&mut self, terms: Vec<(usize, T)>, rhs: T) {
        self.rows.push((terms, rhs));
    }

    fn solve(&self) -> simplex::LpSolution<T> {
        let mut a = vec![vec![T::zero(); self.ncols]; self.rows.len()];
        let mut b = Vec::with_capacity(self.rows.len());
        for (i, (terms, rhs)) in self.rows.iter().enumerate() {
            for (j, v) in terms {
                a[i][*j] = a[i][*j].clone() + v.clone();
            }
            b.push(rhs.clone());
        }
        simplex::solve(&Lp { a, b, c: self.cost.clone() }, PivotRule::for_scalar::<T>())
    }
}

/// Columns of the split free kernel coordinates `t = t⁺ - t⁻`.
struct Kernel {
    tp: Vec<usize>,
    tm: Vec<usize>,
}

impl Kernel {
    fn new<T: Scalar>(b: &mut Builder<T>, d: usize) -> Self {
        Kernel { tp: b.vars(d, T::zero()), tm: b.vars(d, T::zero()) }
    }

    /// Terms of `θ_j - θ0_j`, scaled by `sign`.
    fn terms<T: Scalar>(&self, aff: &Affine<T>, j: usize, sign: i64) -> Vec<(usize, T)> {
        let mut out = Vec::new();
        for (i, k) in aff.kernel.iter().enumerate() {
            if k[j] != 0 {
                out.push((self.tp[i], T::from_i64(sign * k[j])));
                out.push((self.tm[i], T::from_i64(-sign * k[j])));
            }
        }
        out
    }

    fn theta<T: Scalar>(&self, aff: &Affine<T>, x: &[T]) -> Vec<T> {
        let t: Vec<T> = (0..aff.d()).map(|i| x[self.tp[i]].clone() - x[self.tm[i]].clone()).collect();
        point(aff, &t)
    }
}

pub(crate) fn point<T: Scalar>(aff: &Affine<T>, t: &[T]) -> Vec<T> {
    let mut th = aff.theta0.to_vec();
    for (ti, k) in t.iter().zip(aff.kernel) {
        for (x, &c) in th.iter_mut().zip(k) {
            if c != 0 {
                *x = x.clone() + ti.clone() * T::from_i64(c);
            }
        }
    }
    th
}

pub(crate) struct LpPoint<T> {
    pub value: T,
    pub theta: Vec<T>,
    pub pivots: usize,
}

/// Minimizes the sum of negative parts.
pub(crate) fn minimize_sigma<T: Scalar>(aff: &Affine<T>) -> LpPoint<T> {
    let mut b = Builder::new();
    let k = Kernel::new(&mut b, aff.d());
    let s = b.vars(aff.n(), T::one());
    let r = b.vars(aff.n(), T::zero());
    for j in 0..aff.n() {
        let mut terms = k.terms(aff, j, 1);
        terms.push((s[j], T::one()));
        terms.push((r[j], -T::one()));
        b.row(terms, -aff.theta0[j].clone());
    }
    let sol = b.solve();
    debug_assert_eq!(sol.status, LpStatus::Optimal);
    LpPoint { value: sol.value.clone(), theta: k.theta(aff, &sol.x), pivots: sol.pivots }
}

/// Maximizes `δ ≤ cap` subject to `θ_j ≥ δ` for all `j`.
pub(crate) fn maximize_min<T: Scalar>(aff: &Affine<T>, cap: T) -> Option<LpPoint<T>> {
    let mut b = Builder::new();
    let k = Kernel::new(&mut b, aff.d());
    let delta = b.var(-T::one());
    let r = b.vars(aff.n(), T::zero());
    let u = b.var(T::zero());
    for j in 0..aff.n() {
        let mut terms = k.terms(aff, j, 1);
        terms.push((delta, -T::one()));
        terms.push((r[j], -T::one()));
        b.row(terms, -aff.theta0[j].clone());
    }
    b.row(vec![(delta, T::one()), (u, T::one())], cap);
    let sol = b.solve();
    if sol.status != LpStatus::Optimal {
        return None;
    }
    Some(LpPoint { value: sol.x[delta].clone(), theta: k.theta(aff, &sol.x), pivots: sol.pivots })
}

/// Among points with `σ ≤ sigma_max` keeping the coordinates outside
/// `candidates` at least half their current value, maximizes
/// `Σ_{j ∈ candidates} min(max(θ_j, 0), 1)`.
pub(crate) fn improve_nu<T: Scalar>(
    aff: &Affine<T>,
    sigma_max: T,
    current: &[T],
    candidates: &[bool],
) -> Option<LpPoint<T>> {
    let n = aff.n();
    let mut b = Builder::new();
    let k = Kernel::new(&mut b, aff.d());
    let s = b.vars(n, T::zero());
    let r = b.vars(n, T::zero());
    let q = b.var(T::zero());
    for j in 0..n {
        let mut terms = k.terms(aff, j, 1);
        terms.push((s[j], T::one()));
        terms.push((r[j], -T::one()));
        b.row(terms, -aff.theta0[j].clone());
    }
    let mut sig: Vec<(usize, T)> = s.iter().map(|&x| (x, T::one())).collect();
    sig.push((q, T::one()));
    b.row(sig, sigma_max);
    let two = T::from_i64(2);
    let mut w = Vec::new();
    for j in 0..n {
        if candidates[j] {
            let wj = b.var(-T::one());
            let pj = b.var(T::zero());
            let uj = b.var(T::zero());
            let mut terms = k.terms(aff, j, -1);
            terms.push((wj, T::one()));
            terms.push((s[j], -T::one()));
            terms.push((pj, T::one()));
            b.row(terms, aff.theta0[j].clone());
            b.row(vec![(wj, T::one()), (uj, T::one())], T::one());
            w.push(wj);
        } else {
            let rj = b.var(T::zero());
            let mut terms = k.terms(aff, j, 1);
            terms.push((rj, -T::one()));
            b.row(terms, current[j].clone() / two.clone() - aff.theta0[j].clone());
        }
    }
    let sol = b.solve();
    if sol.status != LpStatus::Optimal {
        return None;
    }
    let value = w.iter().fold(T::zero(), |acc, &i| acc + sol.x[i].clone());
    Some(LpPoint { value, theta: k.theta(aff, &sol.x), pivots: sol.pivots })
}
