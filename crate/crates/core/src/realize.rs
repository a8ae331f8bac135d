//! Geometry of the volume maximizer: triangle shapes, the developing map of
//! the boundary similarity structure and its holonomy.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{find_positive_solution, FeasibilityOptions, FeasibilityResult};
use crate::system::{AngleAssignment, SolutionSpace};
use crate::topology::{corner, next_corner, prev_corner, SideRef, TransversePath, Triangulation};
use crate::volume::{maximize_volume, VolumeOptions, VolumeReport};

/// Shape of corner `j`: `(v_{j''} - v_j) / (v_{j'} - v_j)` for the
/// triangle with angles `θ`, so `arg z_j = θ_j` and
/// `|z_j| = sin θ_{j'} / sin θ_{j''}`.
pub fn tetra_shapes(theta: &[f64]) -> Vec<Complex64> {
    (0..theta.len())
        .map(|j| Complex64::from_polar(theta[next_corner(j)].sin() / theta[prev_corner(j)].sin(), theta[j]))
        .collect()
}

/// Orientation-preserving similarity `z ↦ a z + b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Similarity {
    #[serde(serialize_with = "ser_complex")]
    pub a: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub b: Complex64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) };

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Similarity) -> Similarity {
        Similarity { a: self.a * o.a, b: self.a * o.b + self.b }
    }

    pub fn inverse(&self) -> Similarity {
        let ai = 1.0 / self.a;
        Similarity { a: ai, b: -self.b * ai }
    }

    pub fn scale(&self) -> f64 {
        self.a.norm()
    }

    pub fn rotation(&self) -> f64 {
        self.a.arg()
    }

    pub fn translation(&self) -> Complex64 {
        self.b
    }

    pub fn fixed_point(&self) -> Option<Complex64> {
        let d = Complex64::new(1.0, 0.0) - self.a;
        (d.norm() > 1e-14).then(|| self.b / d)
    }

    /// Conjugate by the translation moving `c` to the origin.
    pub fn centered_at(&self, c: Complex64) -> Similarity {
        Similarity { a: self.a, b: self.b + (self.a - 1.0) * c }
    }

    /// The similarity taking `p0, p1` to `q0, q1`.
    fn from_pairs(p0: Complex64, p1: Complex64, q0: Complex64, q1: Complex64) -> Similarity {
        let a = (q1 - q0) / (p1 - p0);
        Similarity { a, b: q0 - a * p0 }
    }
}

/// Positions of the three corners of a developed face.
pub type Placement = [Complex64; 3];

/// Placement of the face glued to `side` of a face placed at `p`.
fn cross(tri: &Triangulation, shapes: &[Complex64], p: &Placement, side: SideRef) -> (usize, Placement) {
    let to = tri.partner(side);
    let s = side.side as usize;
    let t = to.side as usize;
    let mut q = [Complex64::new(0.0, 0.0); 3];
    q[(t + 2) % 3] = p[(s + 1) % 3];
    q[(t + 1) % 3] = p[(s + 2) % 3];
    let c = corner(to.face, ((t + 1) % 3) as u8);
    q[t] = q[(t + 1) % 3] + shapes[c] * (q[(t + 2) % 3] - q[(t + 1) % 3]);
    (to.face, q)
}

/// Standard placement of a face: corner 0 at 0, corner 1 at 1.
pub fn standard_placement(shapes: &[Complex64], f: usize) -> Placement {
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), shapes[corner(f, 0)]]
}

/// Holonomy of a closed transverse path: the similarity taking the initial
/// placement of its first face to the placement reached after developing
/// along the path.
pub fn path_holonomy(
    tri: &Triangulation,
    shapes: &[Complex64],
    path: &TransversePath,
    start: &Placement,
) -> Similarity {
    let steps = path.steps();
    if steps.is_empty() {
        return Similarity::IDENTITY;
    }
    let mut p = *start;
    for st in steps {
        let (_, q) = cross(tri, shapes, &p, SideRef::new(st.face, st.exit));
        p = q;
    }
    Similarity::from_pairs(start[0], start[1], p[0], p[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HolonomyKind {
    /// Both generators are translations (a lattice of translations).
    Lattice,
    /// Both generators fix a common point.
    Multiplicative,
}

#[derive(Clone, Debug, Serialize)]
pub struct Holonomy {
    pub rho_mu: Similarity,
    pub rho_lambda: Similarity,
    pub kind: HolonomyKind,
    /// `|ρ(μ)ρ(λ) - ρ(λ)ρ(μ)|` on the coefficients.
    pub commutator_defect: f64,
    /// Largest deviation from the identity around a vertex.
    pub vertex_defect: f64,
}

const CLOSING_TOL: f64 = 1e-7;

/// Develops the boundary and returns the holonomy of meridian and
/// longitude, normalized so that a common fixed point is at the origin.
pub fn develop_boundary(tri: &Triangulation, shapes: &[Complex64]) -> Result<Holonomy> {
    let mut vertex_defect: f64 = 0.0;
    for v in 0..tri.num_vertices() {
        let lp = tri.vertex_loop(v);
        let f = lp.steps()[0].face;
        let start = standard_placement(shapes, f);
        let r = path_holonomy(tri, shapes, &lp, &start);
        let pv = start[(0..3).find(|&k| tri.vertex_of(corner(f, k as u8)) == v).unwrap()];
        let dev = (r.a - 1.0).norm().max((r.apply(pv) - pv).norm());
        if dev > CLOSING_TOL {
            return Err(Error::NonClosing { vertex: v, deviation: dev });
        }
        vertex_defect = vertex_defect.max(dev);
    }
    let mu = tri.meridian();
    let la = tri.longitude();
    let f0 = mu.steps()[0].face;
    let start = standard_placement(shapes, f0);
    let rho_mu = path_holonomy(tri, shapes, mu, &start);
    // Develop from f0 to the longitude's first face so that both holonomies
    // are computed in the same chart.
    let to_lf = develop_to_face(tri, shapes, f0, &start, la.steps()[0].face);
    let rho_lambda = path_holonomy(tri, shapes, la, &to_lf);
    let (rho_mu, rho_lambda, kind) = match rho_mu.fixed_point() {
        Some(c) if (rho_mu.a - 1.0).norm() > 1e-9 => {
            (rho_mu.centered_at(c), rho_lambda.centered_at(c), HolonomyKind::Multiplicative)
        }
        _ => (rho_mu, rho_lambda, HolonomyKind::Lattice),
    };
    let ml = rho_mu.compose(&rho_lambda);
    let lm = rho_lambda.compose(&rho_mu);
    let commutator_defect = (ml.a - lm.a).norm().max((ml.b - lm.b).norm());
    Ok(Holonomy { rho_mu, rho_lambda, kind, commutator_defect, vertex_defect })
}

/// Placement of face `target` reached from `from` along a dual spanning tree.
fn develop_to_face(
    tri: &Triangulation,
    shapes: &[Complex64],
    from: usize,
    start: &Placement,
    target: usize,
) -> Placement {
    develop_tree(tri, shapes, from, start)[target].expect("the dual graph is connected")
}

/// Placements of all faces along a breadth-first dual spanning tree.
pub fn develop_tree(
    tri: &Triangulation,
    shapes: &[Complex64],
    root: usize,
    start: &Placement,
) -> Vec<Option<Placement>> {
    let mut placed: Vec<Option<Placement>> = vec![None; tri.num_faces()];
    placed[root] = Some(*start);
    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        let p = placed[f].unwrap();
        for s in 0..3 {
            let (g, q) = cross(tri, shapes, &p, SideRef::new(f, s));
            if placed[g].is_none() {
                placed[g] = Some(q);
                queue.push_back(g);
            }
        }
    }
    placed
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Core {
    Geodesic {
        length: f64,
        cone_angle: f64,
        /// `log` of the multiplier of `ρ(λ)`.
        complex_length: [f64; 2],
    },
    Cusp {
        cusp_shape: [f64; 2],
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Realization {
    pub volume: f64,
    pub core: Core,
    pub theta: Vec<f64>,
    #[serde(serialize_with = "ser_shapes")]
    pub shapes: Vec<Complex64>,
    pub holonomy: Holonomy,
    pub report: VolumeReport,
}

fn ser_shapes<S: serde::Serializer>(z: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    z.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

#[derive(Clone, Debug, Default)]
pub struct RealizeOptions {
    pub feasibility: FeasibilityOptions,
    pub volume: VolumeOptions,
}

/// Core geodesic data, or the cusp shape when `K = 0`.
pub fn core_of(hol: &Holonomy, cone_angle: f64) -> Core {
    if cone_angle == 0.0 {
        let s = hol.rho_lambda.b / hol.rho_mu.b;
        return Core::Cusp { cusp_shape: [s.re, s.im] };
    }
    let l = hol.rho_lambda.a.ln();
    Core::Geodesic { length: l.re.abs(), cone_angle: cone_angle.abs(), complex_length: [l.re, l.im] }
}

/// Positive solution, volume maximizer, shapes and holonomy.
pub fn realize(tri: &Triangulation, a: &AngleAssignment, opts: &RealizeOptions) -> Result<Realization> {
    let start = match find_positive_solution(tri, a, &opts.feasibility)? {
        FeasibilityResult::Feasible { theta, .. } => theta,
        FeasibilityResult::Infeasible { certificate, .. } => return Err(Error::Infeasible(Box::new(certificate))),
    };
    let sp = SolutionSpace::new(tri, a)?;
    let (theta, report) = maximize_volume(tri, &sp, &start, &opts.volume)?;
    let shapes = tetra_shapes(&theta);
    let holonomy = develop_boundary(tri, &shapes)?;
    let core = core_of(&holonomy, a.cone_angle);
    Ok(Realization { volume: report.volume, core, theta, shapes, holonomy, report })
}

/// Static figure of the developed faces, plus their image under `ρ(μ)`.
pub fn svg(tri: &Triangulation, r: &Realization) -> String {
    let root = tri.meridian().steps()[0].face;
    let start = standard_placement(&r.shapes, root);
    let base: Vec<Placement> = develop_tree(tri, &r.shapes, root, &start).into_iter().flatten().collect();
    let moved: Vec<Placement> = base.iter().map(|p| p.map(|z| r.holonomy.rho_mu.apply(z))).collect();
    let all = base.iter().chain(&moved).flatten();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for z in all {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let size = 600.0;
    let pad = 10.0;
    let k = (size - 2.0 * pad) / span;
    let tx = |z: Complex64| (pad + (z.re - x0) * k, size - pad - (z.im - y0) * k);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    for (set, fill) in [(&base, "#cfe0f5"), (&moved, "#f5dccf")] {
        for p in set.iter() {
            let pts: Vec<String> = p
                .iter()
                .map(|&z| {
                    let (x, y) = tx(z);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(
                out,
                r##"  <polygon points="{}" fill="{fill}" stroke="#333" stroke-width="0.8"/>"##,
                pts.join(" ")
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Rotation angle of `ρ(μ)` reduced to the representative closest to `k`.
pub fn rotation_near(s: &Similarity, k: f64) -> f64 {
    let r = s.rotation();
    r + 2.0 * PI * ((k - r) / (2.0 * PI)).round()
}
