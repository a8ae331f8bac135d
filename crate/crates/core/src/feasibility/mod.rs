//! Positive solutions of the angle system, or certificates that none exist.
//!
//! The search minimizes the sum of negative parts by linear programming,
//! then the number of nonpositive coordinates, and then improves the point
//! with deformations `θ + ε Φ(T_γ)` along transverse paths that cross the
//! train track of nonpositive corners with constant sign. When no such
//! deformation exists, a violated weight inequality is extracted.

pub(crate) mod lp;
pub mod meridian;
pub mod track;

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::checker::curves::{enumerate_curves, CurveKind};
use crate::error::{Error, Result};
use crate::homology::HomologyClass;
use crate::scalar::{q, Scalar};
use crate::system::{AngleAssignment, SolutionSpace};
use crate::topology::{dot_i64, phi, Crossing, SideRef, TransversePath, Triangulation};

use lp::Affine;
use track::{build_arrow_set, ArrowSet};

/// Which inequality of the admissibility conditions a certificate violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Some closed transverse path has zero weight.
    PositiveWeight,
    /// The weight of a vertex loop differs from 2π.
    VertexSum,
    /// A curve bounding a disk around several vertices has weight ≤ 2π.
    BoundaryParallel,
    /// A meridian curve has weight ≤ K.
    Compression,
    /// No explicit witness was found; the evidence is the linear program.
    Unresolved,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::PositiveWeight => "(i)",
            Condition::VertexSum => "(ii)",
            Condition::BoundaryParallel => "(iii)",
            Condition::Compression => "(iv)",
            Condition::Unresolved => "unresolved",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub condition: Condition,
    pub path: Option<TransversePath>,
    pub crossed_edges: Vec<usize>,
    /// `W^α` of the path.
    pub weight: f64,
    /// Right-hand side of the violated inequality (0, 2π or K).
    pub bound: f64,
    /// Whether the inequality was re-evaluated from α and K and found violated.
    pub verified: bool,
    pub detail: String,
}

impl Certificate {
    pub fn summary(&self) -> String {
        match self.condition {
            Condition::Unresolved => format!("unresolved: {}", self.detail),
            Condition::VertexSum => {
                format!("condition (ii): vertex loop has weight {:.12} != 2π ({})", self.weight, self.detail)
            }
            c => format!(
                "condition {}: curve crossing {} edges has weight {:.12} <= {:.12}",
                c.label(),
                self.crossed_edges.len(),
                self.weight,
                self.bound
            ),
        }
    }

    fn from_path(
        tri: &Triangulation,
        a: &AngleAssignment,
        condition: Condition,
        path: TransversePath,
        detail: String,
    ) -> Self {
        let crossed: Vec<usize> = path.crossed_edges(tri).collect();
        let weight = crossed.iter().map(|&e| a.alpha[e]).sum();
        let bound = match condition {
            Condition::PositiveWeight => 0.0,
            Condition::VertexSum | Condition::BoundaryParallel => 2.0 * PI,
            Condition::Compression => a.cone_angle.abs(),
            Condition::Unresolved => f64::NAN,
        };
        let mut c =
            Certificate { condition, path: Some(path), crossed_edges: crossed, weight, bound, verified: false, detail };
        c.verified = c.recheck(a);
        c
    }

    /// Re-evaluates the violated inequality from the angle data alone.
    pub fn recheck(&self, a: &AngleAssignment) -> bool {
        if let Some(ex) = &a.exact {
            let w: BigRational = self.crossed_edges.iter().fold(BigRational::zero(), |acc, &e| acc + &ex.alpha_pi[e]);
            return match self.condition {
                Condition::PositiveWeight => w.is_zero(),
                Condition::VertexSum => w != q(2),
                Condition::BoundaryParallel => w <= q(2),
                Condition::Compression => {
                    let k = if ex.cone_angle_pi < BigRational::zero() {
                        -ex.cone_angle_pi.clone()
                    } else {
                        ex.cone_angle_pi.clone()
                    };
                    w <= k
                }
                Condition::Unresolved => false,
            };
        }
        let w: f64 = self.crossed_edges.iter().map(|&e| a.alpha[e]).sum();
        match self.condition {
            Condition::PositiveWeight => w <= WEIGHT_TOL,
            Condition::VertexSum => (w - 2.0 * PI).abs() > 1e-12 * (1.0 + 2.0 * PI),
            Condition::BoundaryParallel => w <= 2.0 * PI + WEIGHT_TOL,
            Condition::Compression => w <= a.cone_angle.abs() + WEIGHT_TOL,
            Condition::Unresolved => false,
        }
    }
}

/// Slack under which a numeric weight inequality `W > bound` counts as violated.
pub const WEIGHT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct FeasibilityOptions {
    /// Use exact rational arithmetic when the angles are given exactly.
    pub exact: bool,
    pub zero_tol: f64,
    pub max_iterations: usize,
    /// Normal-curve bound used when searching for a certificate by enumeration.
    pub curve_bound: Option<u32>,
    pub node_budget: u64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        FeasibilityOptions {
            exact: true,
            zero_tol: 1e-9,
            max_iterations: 1000,
            curve_bound: None,
            node_budget: 2_000_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeasibilityResult {
    Feasible {
        theta: Vec<f64>,
        #[serde(skip)]
        theta_pi: Option<Vec<BigRational>>,
        iterations: usize,
    },
    Infeasible {
        certificate: Certificate,
        /// Sum of negative parts at the final point.
        sigma: f64,
        /// Best point found (a solution of the system with some θ_j ≤ 0).
        theta: Vec<f64>,
        iterations: usize,
    },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }

    pub fn iterations(&self) -> usize {
        match self {
            FeasibilityResult::Feasible { iterations, .. } | FeasibilityResult::Infeasible { iterations, .. } => {
                *iterations
            }
        }
    }

    pub fn theta(&self) -> &[f64] {
        match self {
            FeasibilityResult::Feasible { theta, .. } | FeasibilityResult::Infeasible { theta, .. } => theta,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            FeasibilityResult::Infeasible { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

/// Point reached by the numeric or exact search.
struct Reached<T> {
    theta: Vec<T>,
    positive: bool,
    iterations: usize,
}

fn is_nonpos<T: Scalar>(x: &T, tol: f64) -> bool {
    if T::EXACT {
        !x.is_pos()
    } else {
        x.to_f64() <= tol
    }
}

fn sigma_nu<T: Scalar>(theta: &[T], tol: f64) -> (T, usize) {
    let mut s = T::zero();
    let mut nu = 0;
    for x in theta {
        if x.is_neg() || (!T::EXACT && x.to_f64() < 0.0) {
            s = s - x.clone();
        }
        if is_nonpos(x, tol) {
            nu += 1;
        }
    }
    (s, nu)
}

/// `σ(θ) = Σ max(0, -θ_j)` at the minimizer over the solution space.
pub fn minimize_negative_parts(sp: &SolutionSpace) -> (f64, Vec<f64>) {
    let aff = Affine { theta0: &sp.particular, kernel: &sp.kernel };
    let p = lp::minimize_sigma(&aff);
    (p.value, p.theta)
}

/// Improving direction at `theta`: an integer vector in the span of the
/// kernel whose coordinates on `Y'` are nonnegative and positive on at
/// least one of them.
pub fn improving_direction(tri: &Triangulation, arrows: &ArrowSet) -> Option<Vec<i64>> {
    if let Some(&(v, all_in)) = arrows.unbalanced_vertices(tri).first() {
        let mut d = phi(&tri.path_vector(&tri.vertex_loop(v)));
        if all_in {
            d.iter_mut().for_each(|x| *x = -*x);
        }
        return Some(d);
    }
    if log::log_enabled!(log::Level::Debug) {
        if let Ok(track) = track::build_train_track(tri, arrows) {
            let rep = track::classify_regions(&track);
            log::debug!(
                "train track: {} branches, {} regions, index sum {}, reeb {:?}",
                track.branches.len(),
                track.regions.len(),
                rep.twice_index_sum,
                track::detect_reeb(tri, &track).map(|w| w.region)
            );
        }
    }
    let mu = tri.class_of(tri.meridian());
    let mut covered = vec![false; arrows.y.len()];
    let mut d = vec![0i64; tri.num_corners()];
    let mut any = false;
    for yi in 0..arrows.y.len() {
        if covered[yi] {
            continue;
        }
        for target in [mu, mu.neg()] {
            if let Some(path) = meridian::constant_sign_path(tri, arrows, yi, target) {
                let v = phi(&tri.path_vector(&path));
                for (k, y) in arrows.y.iter().enumerate() {
                    if v[y.corner] > 0 {
                        covered[k] = true;
                    }
                }
                for (x, y) in d.iter_mut().zip(&v) {
                    *x += y;
                }
                any = true;
                break;
            }
        }
    }
    any.then_some(d)
}

fn search<T: Scalar>(tri: &Triangulation, theta0: &[T], kernel: &[Vec<i64>], opts: &FeasibilityOptions) -> Reached<T> {
    let tol = opts.zero_tol;
    let aff = Affine { theta0, kernel };
    let sig = lp::minimize_sigma(&aff);
    log::debug!("sigma* = {:?} after {} pivots", sig.value.to_f64(), sig.pivots);
    let sigma_zero = if T::EXACT { sig.value.is_zero() } else { sig.value.to_f64() <= tol };
    if sigma_zero {
        if let Some(mm) = lp::maximize_min(&aff, T::one()) {
            let positive = if T::EXACT { mm.value.is_pos() } else { mm.value.to_f64() > tol };
            if positive {
                return Reached { theta: mm.theta, positive: true, iterations: 0 };
            }
        }
    }

    // Reduce the number of nonpositive coordinates among σ-minimizers.
    let sigma_max =
        if T::EXACT { sig.value.clone() } else { sig.value.clone() + T::from_i64(1) * scalar_from_f64::<T>(tol) };
    let mut theta = sig.theta;
    loop {
        let cand: Vec<bool> = theta.iter().map(|x| is_nonpos(x, tol)).collect();
        if !cand.iter().any(|&b| b) {
            break;
        }
        let Some(p) = lp::improve_nu(&aff, sigma_max.clone(), &theta, &cand) else { break };
        let gain = if T::EXACT { p.value.is_pos() } else { p.value.to_f64() > tol };
        let (_, nu_old) = sigma_nu(&theta, tol);
        let (_, nu_new) = sigma_nu(&p.theta, tol);
        if !gain || nu_new >= nu_old {
            break;
        }
        theta = p.theta;
    }

    let mut iterations = 0;
    loop {
        let nonpos: Vec<bool> = theta.iter().map(|x| is_nonpos(x, tol)).collect();
        if !nonpos.iter().any(|&b| b) {
            return Reached { theta, positive: true, iterations };
        }
        if iterations >= opts.max_iterations {
            break;
        }
        let Ok(arrows) = build_arrow_set(tri, &nonpos) else { break };
        let Some(d) = improving_direction(tri, &arrows) else { break };
        if arrows.y_prime.iter().any(|&j| d[j] < 0) || !arrows.y_prime.iter().any(|&j| d[j] > 0) {
            log::warn!("deformation direction does not improve Y'");
            break;
        }
        // Half the largest step keeping positive coordinates positive.
        let mut eps = T::one();
        for (j, x) in theta.iter().enumerate() {
            if !nonpos[j] && d[j] < 0 {
                let cand = x.clone() / T::from_i64(-2 * d[j]);
                if cand < eps {
                    eps = cand;
                }
            }
        }
        let next: Vec<T> = theta.iter().zip(&d).map(|(x, &c)| x.clone() + eps.clone() * T::from_i64(c)).collect();
        let (s0, n0) = sigma_nu(&theta, tol);
        let (s1, n1) = sigma_nu(&next, tol);
        let dec = (s0.clone() - s1.clone()).is_pos() || (!(s1.clone() - s0.clone()).is_pos() && n1 < n0);
        if !dec {
            log::warn!("deformation did not decrease (sigma, nu); stopping");
            break;
        }
        theta = next;
        iterations += 1;
    }
    Reached { theta, positive: false, iterations }
}

fn scalar_from_f64<T: Scalar>(x: f64) -> T {
    // Only used with the numeric scalar, where the conversion is exact.
    let scaled = (x * 1e15).round() as i64;
    T::from_i64(scaled) / T::from_i64(1_000_000_000_000_000)
}

/// Decides whether the angle data admit a positive angle structure.
pub fn find_positive_solution(
    tri: &Triangulation,
    a: &AngleAssignment,
    opts: &FeasibilityOptions,
) -> Result<FeasibilityResult> {
    let sp = match SolutionSpace::new(tri, a) {
        Ok(sp) => sp,
        Err(Error::InconsistentSystem { residual }) => {
            let cert = vertex_sum_certificate(tri, a)
                .unwrap_or_else(|| unresolved(format!("inconsistent system, residual {residual:e}")));
            return Ok(FeasibilityResult::Infeasible {
                certificate: cert,
                sigma: f64::NAN,
                theta: Vec::new(),
                iterations: 0,
            });
        }
        Err(e) => return Err(e),
    };

    let (theta, theta_pi, positive, iterations) = match (&sp.particular_pi, opts.exact && a.is_exact()) {
        (Some(p), true) => {
            let r = search::<BigRational>(tri, p, &sp.kernel, opts);
            let th: Vec<f64> = r.theta.iter().map(|x| Scalar::to_f64(x) * PI).collect();
            (th, Some(r.theta), r.positive, r.iterations)
        }
        _ => {
            let r = search::<f64>(tri, &sp.particular, &sp.kernel, opts);
            (r.theta, None, r.positive, r.iterations)
        }
    };

    if positive {
        return Ok(FeasibilityResult::Feasible { theta, theta_pi, iterations });
    }
    let nonpos: Vec<bool> = match &theta_pi {
        Some(tp) => tp.iter().map(|x| *x <= BigRational::zero()).collect(),
        None => theta.iter().map(|&x| x <= opts.zero_tol).collect(),
    };
    let sigma = theta.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    let certificate = extract_certificate(tri, a, &nonpos, opts);
    Ok(FeasibilityResult::Infeasible { certificate, sigma, theta, iterations })
}

fn unresolved(detail: String) -> Certificate {
    Certificate {
        condition: Condition::Unresolved,
        path: None,
        crossed_edges: Vec::new(),
        weight: f64::NAN,
        bound: f64::NAN,
        verified: false,
        detail,
    }
}

/// Vertex loop whose weight differs from 2π, if any.
pub fn vertex_sum_certificate(tri: &Triangulation, a: &AngleAssignment) -> Option<Certificate> {
    for v in 0..tri.num_vertices() {
        let c = Certificate::from_path(tri, a, Condition::VertexSum, tri.vertex_loop(v), format!("vertex {v}"));
        if c.verified {
            return Some(c);
        }
    }
    None
}

/// Closed transverse path crossing only edges with `α = 0`, if any.
pub fn zero_weight_cycle(tri: &Triangulation, a: &AngleAssignment) -> Option<TransversePath> {
    let zero = |e: usize| match &a.exact {
        Some(ex) => ex.alpha_pi[e].is_zero(),
        None => a.alpha[e] <= WEIGHT_TOL,
    };
    let nf = tri.num_faces();
    let mut parent: Vec<Option<Crossing>> = vec![None; nf];
    let mut seen = vec![false; nf];
    let mut used = vec![false; tri.num_edges()];
    for root in 0..nf {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(f) = stack.pop() {
            for s in 0..3 {
                let from = SideRef::new(f, s);
                let e = tri.edge_of(from);
                if !zero(e) || used[e] {
                    continue;
                }
                used[e] = true;
                let to = tri.partner(from);
                if seen[to.face] {
                    // Cycle: root..f, the edge, then back from to.face to the root.
                    let up = |mut g: usize| {
                        let mut v = Vec::new();
                        while let Some(c) = parent[g] {
                            v.push(c);
                            g = c.from.face;
                        }
                        v.reverse();
                        v
                    };
                    let mut cr = up(f);
                    cr.push(Crossing { from, to });
                    cr.extend(up(to.face).iter().rev().map(|c| c.reversed()));
                    let cr = crate::homology::reduce_cyclic(cr);
                    return TransversePath::from_crossings(tri, &cr).ok();
                }
                seen[to.face] = true;
                parent[to.face] = Some(Crossing { from, to });
                stack.push(to.face);
            }
        }
    }
    None
}

/// Looks for a witness of a violated condition, given the nonpositive
/// corners of the point where the search stopped.
pub fn extract_certificate(
    tri: &Triangulation,
    a: &AngleAssignment,
    nonpos: &[bool],
    opts: &FeasibilityOptions,
) -> Certificate {
    if let Some(c) = vertex_sum_certificate(tri, a) {
        return c;
    }
    if let Some(p) = zero_weight_cycle(tri, a) {
        let c = Certificate::from_path(tri, a, Condition::PositiveWeight, p, "zero-weight dual cycle".into());
        if c.verified {
            return c;
        }
    }
    let mut best: Option<Certificate> = None;
    let consider = |best: &mut Option<Certificate>, c: Certificate| {
        if c.verified && best.as_ref().is_none_or(|b| c.bound - c.weight > b.bound - b.weight) {
            *best = Some(c);
        }
    };
    if let Ok(arrows) = build_arrow_set(tri, nonpos) {
        let mut cycles = track::simple_cycles(tri, &arrows, 2000);
        for yi in 0..arrows.y.len().min(64) {
            for right in [true, false] {
                if let Some(c) = track::extremal_cycle(tri, &arrows, yi, right) {
                    cycles.push(c);
                }
            }
        }
        for cyc in &cycles {
            let sides: Vec<SideRef> = cyc.iter().map(|&i| arrows.y[i].forward).collect();
            for p in [meridian::right_pushoff(tri, &sides), meridian::left_pushoff(tri, &sides)].into_iter().flatten() {
                if let Some(c) = classify_candidate(tri, a, p, "pushoff of a carried cycle") {
                    consider(&mut best, c);
                }
            }
        }
    }
    if let Some(c) = best {
        return c;
    }
    let bound = opts.curve_bound.unwrap_or(6 * tri.num_faces() as u32);
    let en = enumerate_curves(tri, bound, opts.node_budget);
    for curve in &en.curves {
        let cond = match curve.kind {
            CurveKind::NullHomotopic => Condition::BoundaryParallel,
            CurveKind::Meridian => Condition::Compression,
            _ => continue,
        };
        let c = Certificate::from_path(
            tri,
            a,
            cond,
            curve.path.clone(),
            format!("normal curve of length {}", curve.length()),
        );
        consider(&mut best, c);
    }
    if let Some(c) = best {
        return c;
    }
    unresolved(format!(
        "no positive solution; no violating curve found up to {} crossings{}",
        bound,
        if en.truncated { " (search truncated)" } else { "" }
    ))
}

/// Replaces a transverse path by the embedded normal curve with the same
/// crossing numbers and checks it against conditions (iii) and (iv).
fn classify_candidate(
    tri: &Triangulation,
    a: &AngleAssignment,
    path: TransversePath,
    detail: &str,
) -> Option<Certificate> {
    let mut w = vec![0u32; tri.num_edges()];
    for e in path.crossed_edges(tri) {
        w[e] += 1;
    }
    let curve = crate::checker::curves::normal_curve_from_weights(tri, &w)?;
    let cond = match curve.kind {
        CurveKind::NullHomotopic => Condition::BoundaryParallel,
        CurveKind::Meridian => Condition::Compression,
        _ => return None,
    };
    let c = Certificate::from_path(tri, a, cond, curve.path, detail.to_string());
    c.verified.then_some(c)
}

/// Meridian holonomy of a point.
pub fn meridian_holonomy(tri: &Triangulation, theta: &[f64]) -> f64 {
    crate::topology::dot_f64(&tri.holonomy_functional(tri.meridian()), theta)
}

pub fn meridian_class(tri: &Triangulation) -> HomologyClass {
    tri.class_of(tri.meridian())
}

#[doc(hidden)]
pub fn holonomy_of_direction(tri: &Triangulation, d: &[i64]) -> i64 {
    dot_i64(&tri.holonomy_functional(tri.meridian()), d)
}
