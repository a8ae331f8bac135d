//! Subcomplexes of the dual tessellation and the discrete Stokes identity.
//!
//! Dual vertices are faces, dual edges are edges and dual faces are
//! vertices of the triangulation.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::topology::{face_of, Triangulation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subcomplex {
    pub faces: Vec<bool>,
    pub edges: Vec<bool>,
    pub vertices: Vec<bool>,
}

impl Subcomplex {
    pub fn empty(tri: &Triangulation) -> Self {
        Subcomplex {
            faces: vec![false; tri.num_faces()],
            edges: vec![false; tri.num_edges()],
            vertices: vec![false; tri.num_vertices()],
        }
    }

    pub fn full(tri: &Triangulation) -> Self {
        Subcomplex {
            faces: vec![true; tri.num_faces()],
            edges: vec![true; tri.num_edges()],
            vertices: vec![true; tri.num_vertices()],
        }
    }

    /// Whether every cell has all its boundary cells included.
    pub fn is_closed(&self, tri: &Triangulation) -> bool {
        let edges_ok = (0..tri.num_edges())
            .filter(|&e| self.edges[e])
            .all(|e| tri.edge_sides(e).iter().all(|s| self.faces[s.face]));
        let verts_ok = (0..tri.num_vertices())
            .filter(|&v| self.vertices[v])
            .all(|v| tri.vertex_corners(v).iter().all(|&c| self.edges[tri.edge_of(tri.half_edge_after(c))]));
        edges_ok && verts_ok
    }

    pub fn euler_characteristic(&self) -> i64 {
        let c = |v: &[bool]| v.iter().filter(|&&b| b).count() as i64;
        c(&self.faces) - c(&self.edges) + c(&self.vertices)
    }

    /// Corners `ι(ε)` for the oriented dual edges of the discrete boundary:
    /// arrows into an included dual vertex across an edge not included.
    pub fn discrete_boundary(&self, tri: &Triangulation) -> Vec<usize> {
        (0..tri.num_corners())
            .filter(|&c| {
                let f = face_of(c);
                self.faces[f] && !self.edges[tri.edge_of(crate::topology::SideRef::new(f, (c % 3) as u8))]
            })
            .collect()
    }

    /// `Σ α(e)` over pairs (included edge, adjacent excluded dual face), with
    /// multiplicity.
    pub fn boundary_weight(&self, tri: &Triangulation, alpha: &[f64]) -> f64 {
        let mut s = 0.0;
        for e in (0..tri.num_edges()).filter(|&e| self.edges[e]) {
            let (a, b) = tri.edge_endpoints(e);
            for v in [a, b] {
                if !self.vertices[v] {
                    s += alpha[e];
                }
            }
        }
        s
    }

    /// Random closed subcomplex grown by adding cells whose boundary is
    /// already present.
    pub fn random<R: Rng>(tri: &Triangulation, rng: &mut R) -> Self {
        let mut g = Subcomplex::empty(tri);
        let pf: f64 = rng.gen_range(0.1..1.0);
        let pe: f64 = rng.gen_range(0.0..1.0);
        let pv: f64 = rng.gen_range(0.0..1.0);
        for f in 0..tri.num_faces() {
            g.faces[f] = rng.gen_bool(pf);
        }
        let mut edges: Vec<usize> = (0..tri.num_edges()).collect();
        edges.shuffle(rng);
        for e in edges {
            if tri.edge_sides(e).iter().all(|s| g.faces[s.face]) && rng.gen_bool(pe) {
                g.edges[e] = true;
            }
        }
        for v in 0..tri.num_vertices() {
            let ok = tri.vertex_corners(v).iter().all(|&c| g.edges[tri.edge_of(tri.half_edge_after(c))]);
            if ok && rng.gen_bool(pv) {
                g.vertices[v] = true;
            }
        }
        g
    }
}

/// `|Σ_{ΔΓ} θ − π χ(Γ) − ½ Σ_{∂Γ} α|`.
pub fn stokes_residual(tri: &Triangulation, theta: &[f64], alpha: &[f64], g: &Subcomplex) -> f64 {
    let lhs: f64 = g.discrete_boundary(tri).iter().map(|&c| theta[c]).sum();
    let rhs = PI * g.euler_characteristic() as f64 + 0.5 * g.boundary_weight(tri, alpha);
    (lhs - rhs).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn full_complex_has_empty_boundary() {
        let tri = generate::one_vertex();
        let g = Subcomplex::full(&tri);
        assert!(g.is_closed(&tri));
        assert!(g.discrete_boundary(&tri).is_empty());
        assert_eq!(g.euler_characteristic(), 0);
        assert_eq!(stokes_residual(&tri, &[0.0; 6], &[1.0, 1.0, 1.14], &g), 0.0);
    }
}
