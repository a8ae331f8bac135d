//! The linear system of edge, face and meridian equations on corner angles,
//! its particular solution and its integral kernel basis.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{mat_vec_i64, rank_i64, rref, to_rational, Rref};
use crate::scalar::q;
use crate::topology::{dot_i64, phi, Triangulation};

/// Angles given as rational multiples of π.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactAngles {
    pub alpha_pi: Vec<BigRational>,
    pub cone_angle_pi: BigRational,
}

/// Exterior dihedral angles on edges plus the cone angle.
///
/// `cone_angle` may be negative; this selects the system whose meridian
/// holonomy is prescribed to be negative, which is the mirror of the
/// positive one.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleAssignment {
    pub alpha: Vec<f64>,
    pub cone_angle: f64,
    pub exact: Option<ExactAngles>,
}

impl AngleAssignment {
    pub fn new(alpha: Vec<f64>, cone_angle: f64) -> Result<Self> {
        for (e, &a) in alpha.iter().enumerate() {
            if !a.is_finite() || !(0.0..PI).contains(&a) {
                return Err(Error::InvalidAngle(format!("alpha[{e}] = {a} is not in [0, pi)")));
            }
        }
        if !cone_angle.is_finite() {
            return Err(Error::InvalidAngle("cone angle is not finite".into()));
        }
        Ok(AngleAssignment { alpha, cone_angle, exact: None })
    }

    pub fn exact(ex: ExactAngles) -> Result<Self> {
        let one = q(1);
        for (e, a) in ex.alpha_pi.iter().enumerate() {
            if *a < BigRational::zero() || *a >= one {
                return Err(Error::InvalidAngle(format!("alpha_pi[{e}] = {a} is not in [0, 1)")));
            }
        }
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN) * PI;
        Ok(AngleAssignment {
            alpha: ex.alpha_pi.iter().map(f).collect(),
            cone_angle: f(&ex.cone_angle_pi),
            exact: Some(ex),
        })
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The same edge angles with cone angle `-K`.
    pub fn negated_cone(&self) -> Self {
        let mut out = self.clone();
        out.cone_angle = -self.cone_angle;
        if let Some(ex) = &mut out.exact {
            ex.cone_angle_pi = -ex.cone_angle_pi.clone();
        }
        out
    }

    pub fn with_cone_angle(&self, k: f64) -> Self {
        AngleAssignment { alpha: self.alpha.clone(), cone_angle: k, exact: None }
    }

    /// Drops exact data, keeping the numeric values.
    pub fn to_numeric(&self) -> Self {
        AngleAssignment { exact: None, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RowKind {
    Edge(usize),
    Face(usize),
    Meridian,
    Vertex(usize),
}

/// Linear form `c_π·π + c_K·K + Σ c_e·α_e`, stored as `[c_π, c_K, c_0, …]`.
pub type LinearForm = Vec<BigRational>;

#[derive(Clone, Debug)]
pub struct SystemSigma {
    pub matrix: Vec<Vec<i64>>,
    pub rhs: Vec<LinearForm>,
    pub rows: Vec<RowKind>,
    num_edges: usize,
}

impl SystemSigma {
    pub fn num_cols(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn eval_form(&self, f: &LinearForm, a: &AngleAssignment) -> f64 {
        let mut v = f[0].to_f64().unwrap() * PI + f[1].to_f64().unwrap() * a.cone_angle;
        for (c, x) in f[2..].iter().zip(&a.alpha) {
            if !c.is_zero() {
                v += c.to_f64().unwrap() * x;
            }
        }
        v
    }

    /// Value of a form in units of π, available in exact mode.
    pub fn eval_form_pi(&self, f: &LinearForm, a: &AngleAssignment) -> Option<BigRational> {
        let ex = a.exact.as_ref()?;
        let mut v = f[0].clone() + &f[1] * &ex.cone_angle_pi;
        for (c, x) in f[2..].iter().zip(&ex.alpha_pi) {
            if !c.is_zero() {
                v += c * x;
            }
        }
        Some(v)
    }

    pub fn rhs_numeric(&self, a: &AngleAssignment) -> Vec<f64> {
        self.rhs.iter().map(|f| self.eval_form(f, a)).collect()
    }

    pub fn rhs_pi(&self, a: &AngleAssignment) -> Option<Vec<BigRational>> {
        self.rhs.iter().map(|f| self.eval_form_pi(f, a)).collect()
    }

    /// `‖Aθ − b‖∞`.
    pub fn residual(&self, theta: &[f64], a: &AngleAssignment) -> f64 {
        let b = self.rhs_numeric(a);
        self.matrix
            .iter()
            .zip(&b)
            .map(|(row, bi)| {
                let s: f64 = row.iter().zip(theta).filter(|(c, _)| **c != 0).map(|(c, t)| *c as f64 * t).sum();
                (s - bi).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn residual_tolerance(&self, a: &AngleAssignment) -> f64 {
        let bmax = self.rhs_numeric(a).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        1e-12 * (1.0 + bmax)
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }
}

/// Edge, face and meridian equations. Vertex equations are redundant and
/// left out.
pub fn assemble_sigma(tri: &Triangulation) -> SystemSigma {
    assemble(tri, false)
}

/// Same as [`assemble_sigma`] with the redundant vertex equations appended.
pub fn assemble_sigma_with_vertices(tri: &Triangulation) -> SystemSigma {
    assemble(tri, true)
}

fn assemble(tri: &Triangulation, vertices: bool) -> SystemSigma {
    let n = tri.num_corners();
    let ne = tri.num_edges();
    let form = |pi: i64, k: i64, e: Option<usize>| {
        let mut f = vec![BigRational::zero(); 2 + ne];
        f[0] = q(pi);
        f[1] = q(k);
        if let Some(e) = e {
            f[2 + e] = q(-1);
        }
        f
    };
    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    let mut rows = Vec::new();
    for e in 0..ne {
        let mut r = vec![0i64; n];
        for c in tri.opposite_corners(e) {
            r[c] += 1;
        }
        matrix.push(r);
        rhs.push(form(1, 0, Some(e)));
        rows.push(RowKind::Edge(e));
    }
    for f in 0..tri.num_faces() {
        let mut r = vec![0i64; n];
        r[3 * f..3 * f + 3].fill(1);
        matrix.push(r);
        rhs.push(form(1, 0, None));
        rows.push(RowKind::Face(f));
    }
    matrix.push(tri.holonomy_functional(tri.meridian()));
    rhs.push(form(0, 1, None));
    rows.push(RowKind::Meridian);
    if vertices {
        for v in 0..tri.num_vertices() {
            let mut r = vec![0i64; n];
            for &c in tri.vertex_corners(v) {
                r[c] += 1;
            }
            matrix.push(r);
            rhs.push(form(2, 0, None));
            rows.push(RowKind::Vertex(v));
        }
    }
    SystemSigma { matrix, rhs, rows, num_edges: ne }
}

/// Particular solution: exact row reduction of the integer matrix with the
/// right-hand side carried symbolically, free variables set to zero.
#[derive(Clone, Debug)]
pub struct Particular {
    pub theta: Vec<f64>,
    /// Exact solution in units of π, in exact mode.
    pub theta_pi: Option<Vec<BigRational>>,
    pub residual: f64,
}

pub fn solve_particular(sys: &SystemSigma, a: &AngleAssignment) -> Result<Particular> {
    let ncols = sys.num_cols();
    let rr = rref(&to_rational(&sys.matrix), ncols);
    solve_with(sys, &rr, a)
}

fn symbolic_rhs(sys: &SystemSigma, rr: &Rref) -> Vec<LinearForm> {
    let width = sys.rhs[0].len();
    rr.transform
        .iter()
        .map(|erow| {
            let mut f = vec![BigRational::zero(); width];
            for (c, b) in erow.iter().zip(&sys.rhs) {
                if c.is_zero() {
                    continue;
                }
                for (x, y) in f.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x += c * y;
                    }
                }
            }
            f
        })
        .collect()
}

fn solve_with(sys: &SystemSigma, rr: &Rref, a: &AngleAssignment) -> Result<Particular> {
    let ncols = sys.num_cols();
    let eb = symbolic_rhs(sys, rr);
    let rank = rr.rank();
    let tol = sys.residual_tolerance(a);

    if a.is_exact() {
        for f in &eb[rank..] {
            let v = sys.eval_form_pi(f, a).unwrap();
            if !v.is_zero() {
                return Err(Error::InconsistentSystem { residual: v.to_f64().unwrap_or(f64::NAN).abs() * PI });
            }
        }
    } else {
        for f in &eb[rank..] {
            let v = sys.eval_form(f, a);
            if v.abs() > tol {
                return Err(Error::InconsistentSystem { residual: v.abs() });
            }
        }
    }

    let mut theta = vec![0.0; ncols];
    let mut theta_pi = a.exact.as_ref().map(|_| vec![BigRational::zero(); ncols]);
    for (i, &col) in rr.pivots.iter().enumerate() {
        theta[col] = sys.eval_form(&eb[i], a);
        if let Some(tp) = theta_pi.as_mut() {
            let v = sys.eval_form_pi(&eb[i], a).unwrap();
            theta[col] = v.to_f64().unwrap() * PI;
            tp[col] = v;
        }
    }
    let residual = sys.residual(&theta, a);
    if residual > tol {
        return Err(Error::InconsistentSystem { residual });
    }
    Ok(Particular { theta, theta_pi, residual })
}

/// `{Φ(T_{γ_v})}` for all vertices but the last, followed by `Φ(T_μ)`.
pub fn kernel_basis(tri: &Triangulation) -> Result<Vec<Vec<i64>>> {
    let nv = tri.num_vertices();
    let mut basis: Vec<Vec<i64>> =
        (0..nv.saturating_sub(1)).map(|v| phi(&tri.path_vector(&tri.vertex_loop(v)))).collect();
    basis.push(phi(&tri.path_vector(tri.meridian())));
    let sys = assemble_sigma_with_vertices(tri);
    for k in &basis {
        if mat_vec_i64(&sys.matrix, k).iter().any(|&x| x != 0) {
            return Err(Error::DegenerateBasis { rank: 0, expected: nv });
        }
    }
    let rank = rank_i64(&basis, tri.num_corners());
    if rank != nv {
        return Err(Error::DegenerateBasis { rank, expected: nv });
    }
    Ok(basis)
}

/// Affine space of solutions: `θ = particular + Σ t_i · kernel[i]`.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionSpace {
    pub particular: Vec<f64>,
    #[serde(skip)]
    pub particular_pi: Option<Vec<BigRational>>,
    pub kernel: Vec<Vec<i64>>,
    pub meridian_functional: Vec<i64>,
    pub residual: f64,
}

impl SolutionSpace {
    pub fn new(tri: &Triangulation, a: &AngleAssignment) -> Result<Self> {
        if a.alpha.len() != tri.num_edges() {
            return Err(Error::InvalidAngle(format!(
                "expected {} edge angles, got {}",
                tri.num_edges(),
                a.alpha.len()
            )));
        }
        let sys = assemble_sigma(tri);
        let p = solve_particular(&sys, a)?;
        Ok(SolutionSpace {
            particular: p.theta,
            particular_pi: p.theta_pi,
            kernel: kernel_basis(tri)?,
            meridian_functional: tri.holonomy_functional(tri.meridian()),
            residual: p.residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.kernel.len()
    }

    pub fn point(&self, t: &[f64]) -> Vec<f64> {
        let mut th = self.particular.clone();
        for (ti, k) in t.iter().zip(&self.kernel) {
            for (x, &c) in th.iter_mut().zip(k) {
                if c != 0 {
                    *x += ti * c as f64;
                }
            }
        }
        th
    }

    /// Least-squares kernel coordinates of `theta - particular`.
    pub fn coords_of(&self, theta: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let diff: Vec<f64> = theta.iter().zip(&self.particular).map(|(a, b)| a - b).collect();
        let b = nalgebra::DMatrix::from_fn(theta.len(), d, |i, j| self.kernel[j][i] as f64);
        let rhs = nalgebra::DVector::from_column_slice(&diff);
        let normal = b.transpose() * &b;
        let r = b.transpose() * rhs;
        normal.cholesky().map(|c| c.solve(&r).iter().copied().collect()).unwrap_or_else(|| vec![0.0; d])
    }
}

/// Matrix `ᵗT Φ T` for the columns `T_{γ_1}, …, T_{γ_{m/2}}, T_μ, T_λ`.
#[derive(Clone, Debug, Serialize)]
pub struct NzReport {
    pub matrix: Vec<Vec<i64>>,
    /// Entry in row μ, column λ, divided by two (`±1`).
    pub sign: i64,
}

pub fn verify_nz(tri: &Triangulation, longitude: &crate::topology::TransversePath) -> Result<NzReport> {
    let mut cols: Vec<Vec<i64>> = (0..tri.num_vertices()).map(|v| tri.path_vector(&tri.vertex_loop(v))).collect();
    cols.push(tri.path_vector(tri.meridian()));
    cols.push(tri.path_vector(longitude));
    let phis: Vec<Vec<i64>> = cols.iter().map(|c| phi(c)).collect();
    let n = cols.len();
    let matrix: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| dot_i64(&cols[i], &phis[j])).collect()).collect();

    let sum: Vec<i64> =
        phis[..n - 2].iter().fold(vec![0; tri.num_corners()], |acc, p| acc.iter().zip(p).map(|(a, b)| a + b).collect());
    if sum.iter().any(|&x| x != 0) {
        return Err(Error::NzViolation("vertex-loop images do not sum to zero".into()));
    }
    for i in 0..n {
        for j in 0..n {
            let corner = i >= n - 2 && j >= n - 2 && i != j;
            if !corner && matrix[i][j] != 0 {
                return Err(Error::NzViolation(format!("entry ({i}, {j}) = {}", matrix[i][j])));
            }
        }
    }
    let a = matrix[n - 2][n - 1];
    if a.abs() != 2 || matrix[n - 1][n - 2] != -a {
        return Err(Error::NzViolation(format!("corner block is [[0, {a}], [{}, 0]]", matrix[n - 1][n - 2])));
    }
    Ok(NzReport { matrix, sign: a / 2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn third() -> AngleAssignment {
        AngleAssignment::new(vec![PI / 3.0; 3], PI / 3.0).unwrap()
    }

    #[test]
    fn one_vertex_system_shape() {
        let tri = generate::one_vertex();
        let sys = assemble_sigma(&tri);
        assert_eq!(sys.matrix.len(), 6);
        assert_eq!(sys.num_cols(), 6);
        for (row, kind) in sys.matrix.iter().zip(&sys.rows) {
            let ones = row.iter().filter(|&&x| x == 1).count();
            match kind {
                RowKind::Edge(_) => assert_eq!(ones, 2),
                RowKind::Face(_) => assert_eq!(ones, 3),
                _ => {}
            }
        }
    }

    #[test]
    fn zero_alpha_and_zero_cone_rhs() {
        let tri = generate::one_vertex();
        let sys = assemble_sigma(&tri);
        let a = AngleAssignment::new(vec![0.0; 3], 0.0).unwrap();
        let b = sys.rhs_numeric(&a);
        assert!(b[..3].iter().all(|&x| (x - PI).abs() < 1e-15));
        assert_eq!(*b.last().unwrap(), 0.0);
    }

    #[test]
    fn particular_solution_residual() {
        let tri = generate::one_vertex();
        let sys = assemble_sigma(&tri);
        let p = solve_particular(&sys, &third()).unwrap();
        assert!(p.residual <= 1e-12 * (1.0 + PI));
        let h = dot_i64(&tri.holonomy_functional(tri.meridian()), &[0; 6]);
        assert_eq!(h, 0);
    }

    #[test]
    fn vertex_sum_violation_is_inconsistent() {
        let tri = generate::one_vertex();
        let sys = assemble_sigma(&tri);
        let a = AngleAssignment::new(vec![PI / 2.0, PI / 3.0, PI / 3.0], 0.3).unwrap();
        assert!(matches!(solve_particular(&sys, &a), Err(Error::InconsistentSystem { .. })));
    }

    #[test]
    fn exact_mode_is_exact() {
        let tri = generate::one_vertex();
        let sys = assemble_sigma(&tri);
        let a = AngleAssignment::exact(ExactAngles {
            alpha_pi: vec![crate::scalar::q_frac(1, 3); 3],
            cone_angle_pi: crate::scalar::q_frac(1, 3),
        })
        .unwrap();
        let p = solve_particular(&sys, &a).unwrap();
        let th = p.theta_pi.unwrap();
        let b = sys.rhs_pi(&a).unwrap();
        for (row, bi) in sys.matrix.iter().zip(&b) {
            let s = row.iter().zip(&th).fold(BigRational::zero(), |acc, (c, t)| acc + q(*c) * t);
            assert_eq!(&s, bi);
        }
    }

    #[test]
    fn one_vertex_kernel_is_meridian_image() {
        let tri = generate::one_vertex();
        let k = kernel_basis(&tri).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], phi(&tri.path_vector(tri.meridian())));
    }

    #[test]
    fn one_vertex_nz_matrix() {
        let tri = generate::one_vertex();
        let r = verify_nz(&tri, tri.longitude()).unwrap();
        assert_eq!(r.matrix.len(), 3);
        assert_eq!(r.matrix[1][2], 2 * r.sign);
        assert_eq!(r.matrix[2][1], -2 * r.sign);
        for i in 0..3 {
            assert_eq!(r.matrix[i][i], 0);
        }
    }
}
