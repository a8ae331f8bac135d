//! The volume functional `V(θ) = Σ Л(θ_j)` and its maximization over the
//! positive solutions of the angle system.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lobachevsky::lobachevsky;
use crate::system::SolutionSpace;
use crate::topology::{dot_f64, face_of, phi, Triangulation};

pub fn volume(theta: &[f64]) -> f64 {
    theta.iter().map(|&x| lobachevsky(x)).sum()
}

/// `∂V/∂θ_j = -log(2 sin θ_j)`.
pub fn gradient(theta: &[f64]) -> Vec<f64> {
    theta.iter().map(|&x| -(2.0 * x.sin()).ln()).collect()
}

/// Derivative of `V` along `k`, a vector whose entries sum to zero on every
/// face, so that the `log 2` terms cancel.
pub fn directional_derivative(theta: &[f64], k: &[f64]) -> f64 {
    theta.iter().zip(k).filter(|(_, &c)| c != 0.0).map(|(&x, &c)| -c * x.sin().ln()).sum()
}

/// `Π sin(θ_j)^{v_j}`; equals one exactly when `V` is critical along `v`.
pub fn sine_ratio_product(theta: &[f64], v: &[i64]) -> f64 {
    theta.iter().zip(v).filter(|(_, &c)| c != 0).map(|(&x, &c)| c as f64 * x.sin().ln()).sum::<f64>().exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeOptions {
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// Minimal distance to the boundary of `(0, π)` kept by the line search.
    pub boundary_guard: f64,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        VolumeOptions { gradient_tol: 1e-10, max_iterations: 500, boundary_guard: 1e-8 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub volume: f64,
    /// Sup norm of the gradient in kernel coordinates.
    pub gradient_norm: f64,
    /// `Π sin θ` ratios along `Φ(T_{γ_v})`, one per vertex.
    pub vertex_products: Vec<f64>,
    /// Same along `Φ(T_μ)`.
    pub meridian_product: f64,
    pub iterations: usize,
}

pub fn report(tri: &Triangulation, sp: &SolutionSpace, theta: &[f64], iterations: usize) -> VolumeReport {
    let g = gradient(theta);
    let gradient_norm = sp.kernel.iter().map(|k| dot_f64(k, &g).abs()).fold(0.0, f64::max);
    VolumeReport {
        volume: volume(theta),
        gradient_norm,
        vertex_products: (0..tri.num_vertices())
            .map(|v| sine_ratio_product(theta, &phi(&tri.path_vector(&tri.vertex_loop(v)))))
            .collect(),
        meridian_product: sine_ratio_product(theta, &phi(&tri.path_vector(tri.meridian()))),
        iterations,
    }
}

struct Newton<'a> {
    dirs: &'a [Vec<f64>],
    /// Line search keeps `h·θ ≥ bound`.
    halfspace: Option<(&'a [i64], f64)>,
    opts: &'a VolumeOptions,
}

impl Newton<'_> {
    fn grad(&self, theta: &[f64]) -> DVector<f64> {
        let g = gradient(theta);
        DVector::from_iterator(self.dirs.len(), self.dirs.iter().map(|d| d.iter().zip(&g).map(|(a, b)| a * b).sum()))
    }

    fn admissible(&self, theta: &[f64]) -> bool {
        let eps = self.opts.boundary_guard;
        theta.iter().all(|&x| x >= eps && x <= PI - eps) && self.halfspace.is_none_or(|(h, b)| dot_f64(h, theta) >= b)
    }

    fn step(&self, theta: &[f64], dt: &DVector<f64>, s: f64) -> Vec<f64> {
        let mut th = theta.to_vec();
        for (d, &c) in self.dirs.iter().zip(dt.iter()) {
            for (x, y) in th.iter_mut().zip(d) {
                *x += s * c * y;
            }
        }
        th
    }

    fn run(&self, theta0: &[f64]) -> Result<(Vec<f64>, usize)> {
        let n = theta0.len();
        let d = self.dirs.len();
        let mut theta = theta0.to_vec();
        if d == 0 {
            return Ok((theta, 0));
        }
        for it in 0..self.opts.max_iterations {
            let g = self.grad(&theta);
            if g.amax() <= self.opts.gradient_tol {
                return Ok((theta, it));
            }
            let b = DMatrix::from_fn(n, d, |i, j| self.dirs[j][i]);
            let w = DVector::from_iterator(n, theta.iter().map(|x| 1.0 / x.tan()));
            let neg_h = b.transpose() * DMatrix::from_diagonal(&w) * &b;
            let dt = match neg_h.cholesky() {
                Some(c) => c.solve(&g),
                None => g.clone(),
            };
            let slope = g.dot(&dt);
            let v0 = volume(&theta);
            let small = g.amax() < 1e-6;
            let mut s = 1.0;
            let mut next = None;
            for _ in 0..80 {
                let cand = self.step(&theta, &dt, s);
                if self.admissible(&cand) && (small || volume(&cand) >= v0 + 1e-4 * s * slope) {
                    next = Some(cand);
                    break;
                }
                s *= 0.5;
            }
            match next {
                Some(t) => theta = t,
                None => {
                    let (j, _) = theta.iter().enumerate().fold((0, f64::INFINITY), |acc, (j, &x)| {
                        let m = x.min(PI - x);
                        if m < acc.1 {
                            (j, m)
                        } else {
                            acc
                        }
                    });
                    log::warn!("line search failed at iteration {it}, gradient {:.3e}", g.amax());
                    return Err(Error::BoundaryCollapse { face: face_of(j) });
                }
            }
        }
        Ok((theta, self.opts.max_iterations))
    }
}

/// Maximizes `V` over the positive solutions by Newton's method in the
/// kernel coordinates, starting from a positive solution.
pub fn maximize_volume(
    tri: &Triangulation,
    sp: &SolutionSpace,
    theta0: &[f64],
    opts: &VolumeOptions,
) -> Result<(Vec<f64>, VolumeReport)> {
    let dirs: Vec<Vec<f64>> = sp.kernel.iter().map(|k| k.iter().map(|&x| x as f64).collect()).collect();
    let newton = Newton { dirs: &dirs, halfspace: None, opts };
    let (theta, iterations) = newton.run(theta0)?;
    let rep = report(tri, sp, &theta, iterations);
    Ok((theta, rep))
}

#[derive(Clone, Debug, Serialize)]
pub struct SlabMaximum {
    pub theta: Vec<f64>,
    pub report: VolumeReport,
    /// Whether the maximizer lies on `h_μ·θ = K`.
    pub binding: bool,
    pub holonomy: f64,
}

/// Maximizes `V` over positive solutions with meridian holonomy at least
/// `K`, given the maximizer `theta_eq` of the equality problem.
pub fn maximize_volume_slab(
    tri: &Triangulation,
    sp: &SolutionSpace,
    theta_eq: &[f64],
    cone_angle: f64,
    opts: &VolumeOptions,
) -> Result<SlabMaximum> {
    let h = &sp.meridian_functional;
    let mut u: Vec<f64> = phi(&tri.path_vector(tri.longitude())).iter().map(|&x| x as f64).collect();
    if u.iter().zip(h).map(|(a, &b)| a * b as f64).sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    // The equality maximizer is optimal on the slab when V does not
    // increase in the direction that raises the holonomy.
    if directional_derivative(theta_eq, &u) <= opts.gradient_tol {
        return Ok(SlabMaximum {
            theta: theta_eq.to_vec(),
            report: report(tri, sp, theta_eq, 0),
            binding: true,
            holonomy: dot_f64(h, theta_eq),
        });
    }
    let mut dirs: Vec<Vec<f64>> = sp.kernel.iter().map(|k| k.iter().map(|&x| x as f64).collect()).collect();
    dirs.push(u);
    let newton = Newton { dirs: &dirs, halfspace: Some((h, cone_angle)), opts };
    let (theta, iterations) = newton.run(theta_eq)?;
    Ok(SlabMaximum { report: report(tri, sp, &theta, iterations), binding: false, holonomy: dot_f64(h, &theta), theta })
}

/// A random positive solution on a segment from `center` in a random kernel
/// direction, at most 90% of the way to the boundary.
pub fn random_positive_point<R: Rng>(sp: &SolutionSpace, center: &[f64], rng: &mut R) -> Vec<f64> {
    let t: Vec<f64> = (0..sp.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut dir = vec![0.0; center.len()];
    for (ti, k) in t.iter().zip(&sp.kernel) {
        for (x, &c) in dir.iter_mut().zip(k) {
            *x += ti * c as f64;
        }
    }
    let mut smax = f64::INFINITY;
    for (&x, &d) in center.iter().zip(&dir) {
        if d < 0.0 {
            smax = smax.min(-x / d);
        } else if d > 0.0 {
            smax = smax.min((PI - x) / d);
        }
    }
    let s = if smax.is_finite() { rng.gen_range(0.0..0.9) * smax } else { 0.0 };
    center.iter().zip(&dir).map(|(x, d)| x + s * d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_triangles() {
        let th = vec![PI / 3.0; 6];
        assert!((volume(&th) - 2.029883212819307).abs() < 1e-12);
        assert_eq!(volume(&[PI, 0.0, 0.0]), 0.0);
        let a = volume(&[0.3, 1.1, PI - 1.4]);
        let b = volume(&[1.1, PI - 1.4, 0.3]);
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn zero_direction() {
        assert_eq!(directional_derivative(&[0.5, 1.0, PI - 1.5], &[0.0; 3]), 0.0);
    }
}
