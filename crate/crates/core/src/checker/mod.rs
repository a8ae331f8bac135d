//! Direct checks of the admissibility conditions on `(α, K)`.
//!
//! Conditions (i) and (ii) are decided exactly. Conditions (iii) and (iv)
//! are checked on normal curves up to a crossing bound; when that is not
//! conclusive the verdict is settled by the feasibility search.

pub mod curves;
pub mod stokes;

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::feasibility::{self, Certificate, Condition, FeasibilityOptions, WEIGHT_TOL};
use crate::scalar::q;
use crate::system::AngleAssignment;
use crate::topology::{SideRef, TransversePath, Triangulation};

pub use curves::{enumerate_curves, normal_curve_from_weights, CurveEnumeration, CurveKind, NormalCurve};
pub use stokes::{stokes_residual, Subcomplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Pass,
    Fail,
    /// No violation among curves up to the bound, which does not by itself
    /// exclude longer violating curves.
    BoundedPass,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub path: TransversePath,
    pub crossed_edges: Vec<usize>,
    pub weight: f64,
    /// Right-hand side of the violated inequality.
    pub bound: f64,
}

impl Witness {
    fn new(tri: &Triangulation, a: &AngleAssignment, path: TransversePath, bound: f64) -> Self {
        let crossed_edges: Vec<usize> = path.crossed_edges(tri).collect();
        let weight = crossed_edges.iter().map(|&e| a.alpha[e]).sum();
        Witness { path, crossed_edges, weight, bound }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionResult {
    pub status: ConditionStatus,
    pub witnesses: Vec<Witness>,
    pub detail: String,
}

impl ConditionResult {
    fn pass(detail: impl Into<String>) -> Self {
        ConditionResult { status: ConditionStatus::Pass, witnesses: Vec::new(), detail: detail.into() }
    }

    pub fn failed(&self) -> bool {
        self.status == ConditionStatus::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexSum {
    pub vertex: usize,
    pub sum: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub separation: ConditionResult,
    pub vertex_sums: ConditionResult,
    pub boundary_parallel: ConditionResult,
    pub compression: ConditionResult,
    pub per_vertex: Vec<VertexSum>,
    /// Normal-curve crossing bound used for (iii) and (iv).
    pub bound: u32,
    pub truncated: bool,
    /// Whether the curve search alone decides (iii) and (iv).
    pub conclusive: bool,
    /// Verdict of the feasibility search, when it ran.
    pub feasible: Option<bool>,
    pub certificate: Option<Certificate>,
}

impl ConditionReport {
    pub fn admissible(&self) -> bool {
        ![&self.separation, &self.vertex_sums, &self.boundary_parallel, &self.compression].iter().any(|c| c.failed())
    }

    pub fn conditions(&self) -> [(&'static str, &ConditionResult); 4] {
        [
            ("(i)", &self.separation),
            ("(ii)", &self.vertex_sums),
            ("(iii)", &self.boundary_parallel),
            ("(iv)", &self.compression),
        ]
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, c) in self.conditions() {
            let st = match c.status {
                ConditionStatus::Pass => "pass",
                ConditionStatus::Fail => "FAIL",
                ConditionStatus::BoundedPass => "pass (bounded)",
            };
            out.push_str(&format!("{name:6} {st:15} {}\n", c.detail));
            for w in &c.witnesses {
                out.push_str(&format!(
                    "       witness crosses edges {:?}, W = {:.12}, bound {:.12}\n",
                    w.crossed_edges, w.weight, w.bound
                ));
            }
        }
        if let Some(f) = self.feasible {
            out.push_str(&format!("positive solution: {}\n", if f { "found" } else { "none" }));
        }
        if let Some(c) = &self.certificate {
            out.push_str(&format!("certificate: {}\n", c.summary()));
        }
        out.push_str(&format!("verdict: {}\n", if self.admissible() { "admissible" } else { "not admissible" }));
        out
    }
}

/// Sum of `α` over the edges around each vertex, an edge with both ends at
/// the vertex counted twice.
pub fn check_vertex_sums(tri: &Triangulation, a: &AngleAssignment) -> (ConditionResult, Vec<VertexSum>) {
    let mut per = Vec::new();
    let mut witnesses = Vec::new();
    for v in 0..tri.num_vertices() {
        let edges: Vec<usize> = tri.vertex_corners(v).iter().map(|&c| tri.edge_of(tri.half_edge_after(c))).collect();
        let sum: f64 = edges.iter().map(|&e| a.alpha[e]).sum();
        let pass = match &a.exact {
            Some(ex) => edges.iter().fold(BigRational::zero(), |s, &e| s + &ex.alpha_pi[e]) == q(2),
            None => (sum - 2.0 * PI).abs() <= 1e-12 * (1.0 + 2.0 * PI),
        };
        if !pass {
            witnesses.push(Witness::new(tri, a, tri.vertex_loop(v), 2.0 * PI));
        }
        per.push(VertexSum { vertex: v, sum, pass });
    }
    let bad: Vec<String> =
        per.iter().filter(|s| !s.pass).map(|s| format!("vertex {} sums to {:.12}", s.vertex, s.sum)).collect();
    let res = if bad.is_empty() {
        ConditionResult::pass(format!("{} vertex sums equal 2π", per.len()))
    } else {
        ConditionResult { status: ConditionStatus::Fail, witnesses, detail: bad.join("; ") }
    };
    (res, per)
}

/// The components of the complement of the positive-weight edges are the
/// components of the graph of faces joined across zero-weight edges; each
/// is contractible exactly when that graph is a forest.
pub fn check_separation(tri: &Triangulation, a: &AngleAssignment) -> ConditionResult {
    let zero = |e: usize| match &a.exact {
        Some(ex) => ex.alpha_pi[e].is_zero(),
        None => a.alpha[e] <= WEIGHT_TOL,
    };
    let nf = tri.num_faces();
    let mut comp: Vec<usize> = (0..nf).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    let mut zero_edges = 0;
    for e in (0..tri.num_edges()).filter(|&e| zero(e)) {
        zero_edges += 1;
        let [s, t] = tri.edge_sides(e);
        let (x, y) = (find(&mut comp, s.face), find(&mut comp, t.face));
        comp[x] = y;
    }
    let components = (0..nf).filter(|&f| find(&mut comp, f) == f).count();
    // χ of the union of open faces and open zero edges is F - E_0; it equals
    // the number of components exactly when every component is a tree.
    let chi = nf as i64 - zero_edges as i64;
    if chi == components as i64 {
        return ConditionResult::pass(format!("{components} contractible components, {zero_edges} zero-weight edges"));
    }
    let path = feasibility::zero_weight_cycle(tri, a).expect("a non-forest has a cycle");
    ConditionResult {
        status: ConditionStatus::Fail,
        witnesses: vec![Witness::new(tri, a, path, 0.0)],
        detail: format!("complement has a non-contractible component (χ total {chi}, {components} components)"),
    }
}

/// Lower bound on the weight of any normal curve with more than `bound`
/// crossings, or `None` when condition (i) fails.
pub fn weight_lower_bound(tri: &Triangulation, a: &AngleAssignment, bound: u32) -> Option<f64> {
    let pos: Vec<f64> = a.alpha.iter().copied().filter(|&x| x > WEIGHT_TOL).collect();
    let min_pos = pos.iter().copied().fold(f64::INFINITY, f64::min);
    if pos.len() == a.alpha.len() {
        return Some((bound as f64 + 1.0) * min_pos);
    }
    if check_separation(tri, a).failed() || pos.is_empty() {
        return None;
    }
    // Zero-weight edges form a forest in the dual graph, so a curve cannot
    // cross more than F - 1 of them in a row.
    let nf = tri.num_faces() as f64;
    Some(((bound as f64 + 1.0) / nf).floor() * min_pos)
}

pub fn default_bound(tri: &Triangulation) -> u32 {
    4 * tri.num_edges() as u32
}

/// Checks (iii) and (iv) on the enumerated curves.
pub fn check_curves(
    tri: &Triangulation,
    a: &AngleAssignment,
    en: &CurveEnumeration,
) -> (ConditionResult, ConditionResult) {
    let k = a.cone_angle.abs();
    let cert = |cond: Condition, c: &NormalCurve| {
        let crossed_edges: Vec<usize> = c.path.crossed_edges(tri).collect();
        Certificate {
            condition: cond,
            path: Some(c.path.clone()),
            weight: c.weight(&a.alpha),
            bound: if cond == Condition::Compression { k } else { 2.0 * PI },
            crossed_edges,
            verified: false,
            detail: String::new(),
        }
        .recheck(a)
    };
    let mut iii = Vec::new();
    let mut iv = Vec::new();
    let mut min_iii = f64::INFINITY;
    let mut min_iv = f64::INFINITY;
    // A normal curve is determined by its edge weights, so this removes the
    // same curve traced from different starting points.
    let mut seen = std::collections::HashSet::new();
    for c in en.curves.iter().filter(|c| {
        let mut e: Vec<usize> = c.path.crossed_edges(tri).collect();
        e.sort_unstable();
        seen.insert(e)
    }) {
        match c.kind {
            CurveKind::NullHomotopic => {
                min_iii = min_iii.min(c.weight(&a.alpha));
                if cert(Condition::BoundaryParallel, c) {
                    iii.push(Witness::new(tri, a, c.path.clone(), 2.0 * PI));
                }
            }
            CurveKind::Meridian => {
                min_iv = min_iv.min(c.weight(&a.alpha));
                if cert(Condition::Compression, c) {
                    iv.push(Witness::new(tri, a, c.path.clone(), k));
                }
            }
            _ => {}
        }
    }
    let mk = |w: Vec<Witness>, min: f64, what: &str| {
        if w.is_empty() {
            let detail = if min.is_finite() {
                format!("minimum {what} weight {min:.12} up to {} crossings", en.bound)
            } else {
                format!("no {what} curves up to {} crossings", en.bound)
            };
            ConditionResult { status: ConditionStatus::BoundedPass, witnesses: Vec::new(), detail }
        } else {
            ConditionResult {
                status: ConditionStatus::Fail,
                detail: format!("{} violating {what} curves up to {} crossings", w.len(), en.bound),
                witnesses: w,
            }
        }
    };
    (mk(iii, min_iii, "null-homotopic"), mk(iv, min_iv, "meridian"))
}

/// Whether curves longer than `en.bound` cannot violate (iii) or (iv).
pub fn curves_conclusive(tri: &Triangulation, a: &AngleAssignment, en: &CurveEnumeration) -> bool {
    !en.truncated
        && weight_lower_bound(tri, a, en.bound).is_some_and(|lb| lb > (2.0 * PI).max(a.cone_angle.abs()) + WEIGHT_TOL)
}

/// All four conditions. Conditions (iii) and (iv) are first checked on
/// curves up to `bound`; the feasibility search then settles them.
pub fn full_verdict(
    tri: &Triangulation,
    a: &AngleAssignment,
    bound: Option<u32>,
    opts: &FeasibilityOptions,
) -> ConditionReport {
    let separation = check_separation(tri, a);
    let (vertex_sums, per_vertex) = check_vertex_sums(tri, a);
    let bound = bound.unwrap_or_else(|| default_bound(tri));
    let en = enumerate_curves(tri, bound, opts.node_budget);
    let (mut boundary_parallel, mut compression) = check_curves(tri, a, &en);
    let conclusive = curves_conclusive(tri, a, &en);
    if conclusive {
        for c in [&mut boundary_parallel, &mut compression] {
            if c.status == ConditionStatus::BoundedPass {
                c.status = ConditionStatus::Pass;
            }
        }
    }
    let mut report = ConditionReport {
        separation,
        vertex_sums,
        boundary_parallel,
        compression,
        per_vertex,
        bound,
        truncated: en.truncated,
        conclusive,
        feasible: None,
        certificate: None,
    };
    if report.separation.failed() || report.vertex_sums.failed() {
        return report;
    }
    let opts = FeasibilityOptions { curve_bound: Some(bound), ..opts.clone() };
    match feasibility::find_positive_solution(tri, a, &opts) {
        Ok(r) if r.is_feasible() => {
            report.feasible = Some(true);
            for c in [&mut report.boundary_parallel, &mut report.compression] {
                if c.status == ConditionStatus::BoundedPass {
                    c.status = ConditionStatus::Pass;
                    c.detail.push_str("; holds since a positive solution exists");
                }
            }
        }
        Ok(r) => {
            report.feasible = Some(false);
            let cert = r.certificate().cloned();
            if let Some(c) = &cert {
                let target = match c.condition {
                    Condition::BoundaryParallel => Some(&mut report.boundary_parallel),
                    Condition::Compression => Some(&mut report.compression),
                    Condition::PositiveWeight => Some(&mut report.separation),
                    Condition::VertexSum => Some(&mut report.vertex_sums),
                    Condition::Unresolved => None,
                };
                if let (Some(t), Some(p)) = (target, &c.path) {
                    let mut edges = c.crossed_edges.clone();
                    edges.sort_unstable();
                    let known = t.witnesses.iter().any(|w| {
                        let mut e = w.crossed_edges.clone();
                        e.sort_unstable();
                        e == edges
                    });
                    if c.verified && !known {
                        t.status = ConditionStatus::Fail;
                        t.witnesses.push(Witness::new(tri, a, p.clone(), c.bound));
                    }
                }
            }
            report.certificate = cert;
        }
        Err(e) => {
            log::warn!("feasibility search failed: {e}");
        }
    }
    report
}

/// Crossing sides of a transverse path, for display.
pub fn describe_path(path: &TransversePath) -> Vec<SideRef> {
    path.steps().iter().map(|s| SideRef::new(s.face, s.exit)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::scalar::q_frac;
    use crate::system::ExactAngles;

    fn exact(alpha: [(i64, i64); 3], k: (i64, i64)) -> AngleAssignment {
        AngleAssignment::exact(ExactAngles {
            alpha_pi: alpha.iter().map(|&(n, d)| q_frac(n, d)).collect(),
            cone_angle_pi: q_frac(k.0, k.1),
        })
        .unwrap()
    }

    #[test]
    fn vertex_sums_one_vertex() {
        let tri = generate::one_vertex();
        let (r, per) = check_vertex_sums(&tri, &exact([(1, 3), (1, 3), (1, 3)], (1, 6)));
        assert_eq!(r.status, ConditionStatus::Pass);
        assert_eq!(per.len(), 1);
        let (r, per) = check_vertex_sums(&tri, &exact([(1, 2), (1, 3), (1, 3)], (1, 6)));
        assert!(r.failed());
        assert!((per[0].sum - 7.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn separation_cases() {
        let tri = generate::one_vertex();
        let a = AngleAssignment::new(vec![1.0; 3], 0.1).unwrap();
        assert_eq!(check_separation(&tri, &a).status, ConditionStatus::Pass);
        let a = AngleAssignment::new(vec![0.0; 3], 0.1).unwrap();
        let r = check_separation(&tri, &a);
        assert!(r.failed());
        assert_eq!(r.witnesses[0].weight, 0.0);
        // One zero edge joins the two faces into a disk.
        let a = AngleAssignment::new(vec![0.0, 1.0, 1.0], 0.1).unwrap();
        assert_eq!(check_separation(&tri, &a).status, ConditionStatus::Pass);
        // Two zero edges leave an annulus.
        let a = AngleAssignment::new(vec![0.0, 0.0, 2.0], 0.1).unwrap();
        assert!(check_separation(&tri, &a).failed());
    }

    #[test]
    fn full_verdict_admissible_and_compressed() {
        let tri = generate::one_vertex();
        let opts = FeasibilityOptions::default();
        let r = full_verdict(&tri, &exact([(1, 3), (1, 3), (1, 3)], (1, 6)), None, &opts);
        assert!(r.admissible(), "{}", r.render());
        assert_eq!(r.feasible, Some(true));
        // The shortest meridian crosses two edges: weight 2π/3.
        let r = full_verdict(&tri, &exact([(1, 3), (1, 3), (1, 3)], (5, 6)), None, &opts);
        assert!(r.compression.failed(), "{}", r.render());
        assert_eq!(r.feasible, Some(false));
    }

    #[test]
    fn vertex_sum_failure_skips_feasibility() {
        let tri = generate::one_vertex();
        let r = full_verdict(&tri, &exact([(1, 2), (1, 3), (1, 3)], (1, 6)), None, &FeasibilityOptions::default());
        assert!(r.vertex_sums.failed());
        assert_eq!(r.feasible, None);
    }
}
