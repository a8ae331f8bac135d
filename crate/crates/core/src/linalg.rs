//! Exact row reduction over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::q;

/// Reduced row echelon form `R = E·A` together with the transform `E`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Vec<Vec<BigRational>>,
    pub transform: Vec<Vec<BigRational>>,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn to_rational(a: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    a.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

/// Gauss-Jordan elimination. Pivots are chosen in the leftmost available
/// column, taking the smallest row index with a nonzero entry.
pub fn rref(a: &[Vec<BigRational>], ncols: usize) -> Rref {
    let nrows = a.len();
    let mut r: Vec<Vec<BigRational>> = a.to_vec();
    let mut e: Vec<Vec<BigRational>> = (0..nrows)
        .map(|i| (0..nrows).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(p) = (row..nrows).find(|&i| !r[i][col].is_zero()) else {
            continue;
        };
        r.swap(row, p);
        e.swap(row, p);
        let inv = r[row][col].recip();
        if !inv.is_one() {
            for x in r[row].iter_mut().chain(e[row].iter_mut()) {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let (prow, pe) = (r[row].clone(), e[row].clone());
        for i in 0..nrows {
            if i == row || r[i][col].is_zero() {
                continue;
            }
            let f = r[i][col].clone();
            for (x, y) in r[i].iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            for (x, y) in e[i].iter_mut().zip(&pe) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { reduced: r, transform: e, pivots }
}

pub fn rank_i64(a: &[Vec<i64>], ncols: usize) -> usize {
    rref(&to_rational(a), ncols).rank()
}

pub fn mat_vec_i64(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}
