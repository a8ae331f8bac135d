//! Enumeration of connected normal curves by their edge weights.

use serde::Serialize;

use crate::homology::HomologyClass;
use crate::topology::{Crossing, SideRef, TransversePath, Triangulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    VertexLoop(usize),
    NullHomotopic,
    Meridian,
    Other,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalCurve {
    /// Number of crossings with each edge.
    pub weights: Vec<u32>,
    #[serde(skip)]
    pub path: TransversePath,
    /// Class in the (meridian, longitude) basis.
    pub class: (i64, i64),
    pub kind: CurveKind,
}

impl NormalCurve {
    pub fn length(&self) -> u32 {
        self.weights.iter().sum()
    }

    /// `Σ w_e α_e`.
    pub fn weight(&self, alpha: &[f64]) -> f64 {
        self.weights.iter().zip(alpha).map(|(&w, a)| w as f64 * a).sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveEnumeration {
    pub curves: Vec<NormalCurve>,
    pub bound: u32,
    /// Set when the node budget ran out before the search finished.
    pub truncated: bool,
}

/// All connected normal curves with at most `bound` edge crossings, each
/// listed once (the reversed orientation is available via `path.reversed()`).
pub fn enumerate_curves(tri: &Triangulation, bound: u32, node_budget: u64) -> CurveEnumeration {
    let ne = tri.num_edges();
    // Edge order: edges of face 0, then new edges of face 1, ...
    let mut order = Vec::with_capacity(ne);
    let mut placed = vec![false; ne];
    let mut completes: Vec<Vec<usize>> = vec![Vec::new(); ne];
    for f in 0..tri.num_faces() {
        for s in 0..3 {
            let e = tri.edge_of(SideRef::new(f, s));
            if !placed[e] {
                placed[e] = true;
                order.push(e);
            }
        }
    }
    let rank: Vec<usize> = {
        let mut r = vec![0; ne];
        for (i, &e) in order.iter().enumerate() {
            r[e] = i;
        }
        r
    };
    for f in 0..tri.num_faces() {
        let last = (0..3).map(|s| rank[tri.edge_of(SideRef::new(f, s))]).max().unwrap();
        completes[last].push(f);
    }

    let vertex_links = vertex_links(tri);

    let mut st = Search {
        tri,
        order: &order,
        completes: &completes,
        weights: vec![0; ne],
        bound,
        nodes: 0,
        budget: node_budget,
        truncated: false,
        curves: Vec::new(),
        vertex_links: &vertex_links,
    };
    st.dfs(0, 0);
    CurveEnumeration { curves: st.curves, bound, truncated: st.truncated }
}

struct Search<'a> {
    tri: &'a Triangulation,
    order: &'a [usize],
    completes: &'a [Vec<usize>],
    weights: Vec<u32>,
    bound: u32,
    nodes: u64,
    budget: u64,
    truncated: bool,
    curves: Vec<NormalCurve>,
    vertex_links: &'a [Vec<u32>],
}

impl Search<'_> {
    fn face_ok(&self, f: usize) -> bool {
        let a: Vec<u32> = (0..3).map(|s| self.weights[self.tri.edge_of(SideRef::new(f, s))]).collect();
        let sum = a[0] + a[1] + a[2];
        sum % 2 == 0 && (0..3).all(|i| 2 * a[i] <= sum)
    }

    fn dfs(&mut self, i: usize, used: u32) {
        if self.truncated {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.truncated = true;
            return;
        }
        if i == self.order.len() {
            if used > 0 {
                if let Some(c) = self.trace() {
                    self.curves.push(c);
                }
            }
            return;
        }
        let e = self.order[i];
        for w in 0..=(self.bound - used) {
            self.weights[e] = w;
            if self.completes[i].iter().all(|&f| self.face_ok(f)) {
                self.dfs(i + 1, used + w);
            }
        }
        self.weights[e] = 0;
    }

    fn trace(&self) -> Option<NormalCurve> {
        trace(self.tri, &self.weights, self.vertex_links)
    }
}

/// Edge weights of the link of each vertex.
pub fn vertex_links(tri: &Triangulation) -> Vec<Vec<u32>> {
    (0..tri.num_vertices())
        .map(|v| {
            let mut w = vec![0u32; tri.num_edges()];
            for &c in tri.vertex_corners(v) {
                w[tri.edge_of(tri.half_edge_after(c))] += 1;
            }
            w
        })
        .collect()
}

/// The normal curve with the given edge weights, if the weights satisfy the
/// matching conditions and describe a single connected curve.
pub fn normal_curve_from_weights(tri: &Triangulation, weights: &[u32]) -> Option<NormalCurve> {
    if weights.len() != tri.num_edges() || weights.iter().all(|&w| w == 0) {
        return None;
    }
    for f in 0..tri.num_faces() {
        let a: Vec<u32> = (0..3).map(|s| weights[tri.edge_of(SideRef::new(f, s))]).collect();
        let sum = a[0] + a[1] + a[2];
        if sum % 2 != 0 || (0..3).any(|i| 2 * a[i] > sum) {
            return None;
        }
    }
    trace(tri, weights, &vertex_links(tri))
}

/// Traces the curve from the first point; returns it if connected.
fn trace(tri: &Triangulation, weights: &[u32], vertex_links: &[Vec<u32>]) -> Option<NormalCurve> {
    let total: u32 = weights.iter().sum();
    let e0 = (0..tri.num_edges()).find(|&e| weights[e] > 0)?;
    let start_side = tri.edge_sides(e0)[0];
    let w = |s: SideRef| weights[tri.edge_of(s)];
    // Current point: entering face `side.face` through `side` at position `p`
    // measured along the counterclockwise orientation of `side`.
    let mut side = start_side;
    let mut p = 0u32;
    let mut crossings = Vec::new();
    loop {
        let s = side.side;
        let f = side.face;
        let a = |k: u8| w(SideRef::new(f, k % 3));
        let n_next = (a(s) + a(s + 2) - a(s + 1)) / 2; // arcs around corner s+1
        let (exit, q) = if p < n_next {
            (SideRef::new(f, (s + 2) % 3), a(s + 2) - 1 - p)
        } else {
            (SideRef::new(f, (s + 1) % 3), a(s) - 1 - p)
        };
        let to = tri.partner(exit);
        crossings.push(Crossing { from: exit, to });
        side = to;
        p = w(exit) - 1 - q;
        if side == start_side && p == 0 {
            break;
        }
        if crossings.len() as u32 > total {
            return None;
        }
    }
    if crossings.len() as u32 != total {
        return None;
    }
    // Close the loop so that the first crossing enters `start_side`.
    crossings.rotate_right(1);
    let path = TransversePath::from_crossings(tri, &crossings).ok()?;
    let class = tri.homology_class(&path).ok()?;
    let kind = if let Some(v) = vertex_links.iter().position(|l| l.as_slice() == weights) {
        CurveKind::VertexLoop(v)
    } else if class == (0, 0) {
        CurveKind::NullHomotopic
    } else if class.1 == 0 && class.0.abs() == 1 {
        CurveKind::Meridian
    } else {
        CurveKind::Other
    };
    Some(NormalCurve { weights: weights.to_vec(), path, class, kind })
}

pub fn class_is_meridian(c: HomologyClass, mu: HomologyClass) -> bool {
    c == mu || c == mu.neg()
}
