//! Sampling of edge angles and a direct verdict from enumerated normal
//! curves, shared by the equivalence and acceptance suites.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solidtorus::checker::{enumerate_curves, CurveEnumeration, CurveKind};
use solidtorus::feasibility::{find_positive_solution, FeasibilityOptions};
use solidtorus::simplex::{self, Lp, LpStatus, PivotRule};
use solidtorus::system::AngleAssignment;
use solidtorus::topology::Triangulation;

pub const UPPER_GAP: f64 = 0.05;

/// Constraints `Σ_v α = 2π` and `lo_e ≤ α_e ≤ π - 0.05` in the shifted
/// variables `x_e = α_e - lo_e` plus slacks. Edges in `zeros` are pinned
/// to zero.
fn box_lp(tri: &Triangulation, lo: f64, zeros: &[usize]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let ne = tri.num_edges();
    let lower: Vec<f64> = (0..ne).map(|e| if zeros.contains(&e) { 0.0 } else { lo }).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for v in 0..tri.num_vertices() {
        let mut r = vec![0.0; 2 * ne];
        let mut base = 0.0;
        for &c in tri.vertex_corners(v) {
            let e = tri.edge_of(tri.half_edge_after(c));
            r[e] += 1.0;
            base += lower[e];
        }
        a.push(r);
        b.push(2.0 * PI - base);
    }
    for e in 0..ne {
        let mut r = vec![0.0; 2 * ne];
        r[e] = 1.0;
        r[ne + e] = 1.0;
        a.push(r);
        b.push(if zeros.contains(&e) { 0.0 } else { PI - UPPER_GAP - lo });
    }
    (a, b, lower)
}

/// Random α with vertex sums 2π, `lo ≤ α_e ≤ π - 0.05` off `zeros` and
/// `α_e = 0` on `zeros`, as a convex combination of random LP vertices.
pub fn sample_alpha_with_zeros(
    tri: &Triangulation,
    lo: f64,
    zeros: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<f64>> {
    let ne = tri.num_edges();
    let (a, b, lower) = box_lp(tri, lo, zeros);
    if b.iter().any(|&x| x < 0.0) {
        return None;
    }
    let mut acc = vec![0.0; ne];
    let w: Vec<f64> = (0..3).map(|_| rng.gen_range(0.1..1.0)).collect();
    let tw: f64 = w.iter().sum();
    for wi in &w {
        let mut c: Vec<f64> = (0..ne).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if rng.gen_bool(0.4) {
            // Favor a heavy pair of edges, which tends to make curves around
            // several vertices light.
            for _ in 0..2 {
                c[rng.gen_range(0..ne)] = -3.0;
            }
        }
        c.extend(std::iter::repeat(0.0).take(ne));
        let sol = simplex::solve(&Lp { a: a.clone(), b: b.clone(), c }, PivotRule::SteepestEdge);
        if sol.status != LpStatus::Optimal {
            return None;
        }
        for (x, y) in acc.iter_mut().zip(&sol.x) {
            *x += wi / tw * y;
        }
    }
    Some(acc.iter().zip(&lower).map(|(x, l)| (x + l).max(0.0)).collect())
}

pub fn sample_alpha(tri: &Triangulation, lo: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    sample_alpha_with_zeros(tri, lo, &[], rng).expect("box is feasible")
}

/// Whether the dual edges of `edges` contain a cycle.
pub fn has_dual_cycle(tri: &Triangulation, edges: &[usize]) -> bool {
    let mut root: Vec<usize> = (0..tri.num_faces()).collect();
    fn find(r: &mut Vec<usize>, x: usize) -> usize {
        if r[x] != x {
            let y = find(r, r[x]);
            r[x] = y;
        }
        r[x]
    }
    for &e in edges {
        let [s, t] = tri.edge_sides(e);
        let (x, y) = (find(&mut root, s.face), find(&mut root, t.face));
        if x == y {
            return true;
        }
        root[x] = y;
    }
    false
}

/// Angles whose zero-weight edges contain a dual cycle, when one fits in
/// the box.
pub fn separation_violation(tri: &Triangulation, lo: f64, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let ne = tri.num_edges();
    for _ in 0..100 {
        let size = rng.gen_range(1..=3.min(ne));
        let mut zeros: Vec<usize> = (0..size).map(|_| rng.gen_range(0..ne)).collect();
        zeros.sort_unstable();
        zeros.dedup();
        if !has_dual_cycle(tri, &zeros) {
            continue;
        }
        if let Some(a) = sample_alpha_with_zeros(tri, lo, &zeros, rng) {
            return Some(a);
        }
    }
    None
}

pub fn vertex_sums(tri: &Triangulation, alpha: &[f64]) -> Vec<f64> {
    (0..tri.num_vertices())
        .map(|v| tri.vertex_corners(v).iter().map(|&c| alpha[tri.edge_of(tri.half_edge_after(c))]).sum())
        .collect()
}

/// Direct verdict from the curves, or `None` when the bound is too small
/// to decide.
pub fn direct_verdict(tri: &Triangulation, a: &AngleAssignment, en: &CurveEnumeration) -> Option<bool> {
    assert!(!en.truncated);
    let zero: Vec<usize> = (0..tri.num_edges()).filter(|&e| a.alpha[e] == 0.0).collect();
    let min_pos = a.alpha.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    // A curve longer than the bound crosses a positive edge at least once
    // in every F consecutive crossings, unless (i) fails.
    let lb = if zero.is_empty() {
        (en.bound as f64 + 1.0) * min_pos
    } else {
        ((en.bound as f64 + 1.0) / tri.num_faces() as f64).floor() * min_pos
    };
    if has_dual_cycle(tri, &zero) {
        return Some(false);
    }
    if vertex_sums(tri, &a.alpha).iter().any(|s| (s - 2.0 * PI).abs() > 1e-9) {
        return Some(false);
    }
    let k = a.cone_angle.abs();
    let mut ok = true;
    for c in &en.curves {
        let w = c.weight(&a.alpha);
        match c.kind {
            CurveKind::NullHomotopic if w <= 2.0 * PI + 1e-12 => ok = false,
            CurveKind::Meridian if w <= k + 1e-12 => ok = false,
            _ => {}
        }
    }
    if !ok {
        return Some(false);
    }
    (lb > (2.0 * PI).max(k)).then_some(true)
}

#[derive(Debug, Default)]
pub struct Tally {
    pub samples: usize,
    pub conclusive: usize,
    pub disagreements: usize,
    pub feasible: usize,
    pub unverified: usize,
    /// Certificates returned, by condition.
    pub conditions: BTreeMap<String, usize>,
    /// Samples constructed to violate (i) or (ii).
    pub injected_i: usize,
    pub injected_ii: usize,
}

pub struct Sampling {
    pub bound: u32,
    pub samples: usize,
    pub lo: f64,
    /// Probability of moving one edge's weight onto a parallel edge.
    pub zero_prob: f64,
    /// Probability of a deliberate (i) or (ii) violation.
    pub violate_prob: f64,
    pub seed: u64,
}

impl Sampling {
    pub fn new(bound: u32, samples: usize, lo: f64, seed: u64) -> Self {
        Sampling { bound, samples, lo, zero_prob: 0.0, violate_prob: 0.0, seed }
    }
}

pub fn run(tri: &Triangulation, s: &Sampling) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let en = enumerate_curves(tri, s.bound, 50_000_000);
    let opts = FeasibilityOptions { exact: false, ..Default::default() };
    let mut t = Tally::default();
    for _ in 0..s.samples {
        let mut alpha = sample_alpha(tri, s.lo, &mut rng);
        if rng.gen_bool(s.zero_prob) {
            let e = rng.gen_range(0..tri.num_edges());
            let (u, v) = tri.edge_endpoints(e);
            if let Some(f) =
                (0..tri.num_edges()).find(|&f| f != e && tri.edge_endpoints(f) == (u, v) && alpha[f] + alpha[e] < PI)
            {
                alpha[f] += alpha[e];
                alpha[e] = 0.0;
            }
        }
        if rng.gen_bool(s.violate_prob) {
            match rng.gen_bool(0.5).then(|| separation_violation(tri, s.lo, &mut rng)).flatten() {
                Some(a) => {
                    alpha = a;
                    t.injected_i += 1;
                }
                None => {
                    let e = rng.gen_range(0..tri.num_edges());
                    let d = rng.gen_range(0.05..0.3);
                    alpha[e] = if alpha[e] + d < PI { alpha[e] + d } else { alpha[e] - d };
                    t.injected_ii += 1;
                }
            }
        }
        let mer_min = en
            .curves
            .iter()
            .filter(|c| c.kind == CurveKind::Meridian)
            .map(|c| c.weight(&alpha))
            .fold(f64::INFINITY, f64::min);
        let k = (rng.gen_range(0.0..1.4) * mer_min).min(1.99 * PI);
        let k = if rng.gen_bool(0.5) { k } else { -k };
        let a = AngleAssignment::new(alpha, k).unwrap();
        let r = find_positive_solution(tri, &a, &opts).unwrap();
        t.samples += 1;
        t.feasible += r.is_feasible() as usize;
        if let Some(c) = r.certificate() {
            *t.conditions.entry(c.condition.label().to_string()).or_default() += 1;
            t.unverified += (!c.verified) as usize;
        }
        if let Some(d) = direct_verdict(tri, &a, &en) {
            t.conclusive += 1;
            if d != r.is_feasible() {
                t.disagreements += 1;
                eprintln!(
                    "disagreement: alpha {:?} K {} direct {} feasibility {} {:?}",
                    a.alpha,
                    k,
                    d,
                    r.is_feasible(),
                    r.certificate().map(|c| c.summary())
                );
            }
        }
    }
    t
}

/// α minimizing the weight of a given curve, within the same box.
pub fn light_curve_alpha(tri: &Triangulation, weights: &[u32], lo: f64, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let ne = tri.num_edges();
    let (a, b, _) = box_lp(tri, lo, &[]);
    let mut c: Vec<f64> = weights.iter().map(|&w| w as f64 + rng.gen_range(0.0..0.1)).collect();
    c.extend(std::iter::repeat(0.0).take(ne));
    let sol = simplex::solve(&Lp { a, b, c }, PivotRule::SteepestEdge);
    (sol.status == LpStatus::Optimal).then(|| sol.x[..ne].iter().map(|x| x + lo).collect())
}
