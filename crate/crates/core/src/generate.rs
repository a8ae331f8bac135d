//! Torus triangulations for tests, examples and sweeps.
//!
//! Every generated triangulation comes with a flat Euclidean metric, which
//! gives corner angles with face sums π and vertex sums 2π.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::homology::HomologyClass;
use crate::instance::RawInstance;
use crate::simplex::{self, Lp, LpStatus, PivotRule};
use crate::system::AngleAssignment;
use crate::topology::{SideRef, Triangulation};

type Pt = (f64, f64);

/// Faces with planar corner positions plus gluings; corner labels are face-major.
#[derive(Clone, Debug)]
pub struct FlatComplex {
    pub points: Vec<[Pt; 3]>,
    pub gluings: Vec<[SideRef; 2]>,
}

impl FlatComplex {
    pub fn num_faces(&self) -> usize {
        self.points.len()
    }

    pub fn raw(&self, meridian: Vec<(usize, u8, u8)>) -> RawInstance {
        RawInstance {
            faces: (0..self.num_faces() as u32).map(|f| [3 * f + 1, 3 * f + 2, 3 * f + 3]).collect(),
            gluings: self.gluings.iter().map(|[a, b]| [(a.face, a.side), (b.face, b.side)]).collect(),
            meridian,
            alpha: None,
            cone_angle: None,
            alpha_pi: None,
            cone_angle_pi: None,
        }
    }

    /// Euclidean corner angles.
    pub fn flat_angles(&self) -> Vec<f64> {
        let mut th = Vec::with_capacity(3 * self.num_faces());
        for p in &self.points {
            for k in 0..3 {
                let a = p[k];
                let b = p[(k + 1) % 3];
                let c = p[(k + 2) % 3];
                let u = (b.0 - a.0, b.1 - a.1);
                let v = (c.0 - a.0, c.1 - a.1);
                th.push((u.0 * v.1 - u.1 * v.0).atan2(u.0 * v.0 + u.1 * v.1));
            }
        }
        th
    }

    /// Subdivides face `f` into three by a new vertex at the given
    /// barycentric coordinates.
    pub fn split(&mut self, f: usize, bary: [f64; 3]) {
        let [a, b, c] = self.points[f];
        let p = (bary[0] * a.0 + bary[1] * b.0 + bary[2] * c.0, bary[0] * a.1 + bary[1] * b.1 + bary[2] * c.1);
        let f2 = self.num_faces();
        let f3 = f2 + 1;
        self.points[f] = [a, b, p];
        self.points.push([b, c, p]);
        self.points.push([c, a, p]);
        let remap = |s: SideRef| {
            if s.face != f {
                return s;
            }
            match s.side {
                0 => SideRef::new(f2, 2),
                1 => SideRef::new(f3, 2),
                _ => SideRef::new(f, 2),
            }
        };
        for g in self.gluings.iter_mut() {
            *g = [remap(g[0]), remap(g[1])];
        }
        self.gluings.push([SideRef::new(f, 0), SideRef::new(f2, 1)]);
        self.gluings.push([SideRef::new(f2, 0), SideRef::new(f3, 1)]);
        self.gluings.push([SideRef::new(f3, 0), SideRef::new(f, 1)]);
    }

    /// Validated triangulation whose meridian is a reduced path in `class`
    /// (coordinates with respect to the internal dual generators).
    pub fn triangulation(&self, class: HomologyClass) -> Triangulation {
        let surface = Triangulation::surface_from_raw(&self.raw(Vec::new())).expect("generated complex is a torus");
        let path = surface.homology().path_of_class(&surface, class);
        surface.with_meridian(path).expect("generated meridian is primitive")
    }
}

/// Flat `n × k` square torus with a diagonal in each square; `diag[i + n j]`
/// selects the direction of the diagonal in square `(i, j)`.
pub fn grid_complex(n: usize, k: usize, diag: &[bool]) -> FlatComplex {
    assert!(n >= 1 && k >= 1 && diag.len() == n * k);
    let shear = 0.37;
    let height = 0.93;
    let pos = |x: i64, y: i64| (x as f64 + shear * y as f64, height * y as f64);
    let (ni, ki) = (n as i64, k as i64);
    let mut points = Vec::new();
    let mut lattice: Vec<[(i64, i64); 3]> = Vec::new();
    for j in 0..ki {
        for i in 0..ni {
            let p00 = (i, j);
            let p10 = (i + 1, j);
            let p11 = (i + 1, j + 1);
            let p01 = (i, j + 1);
            let tris = if diag[(i + ni * j) as usize] {
                [[p00, p10, p11], [p00, p11, p01]]
            } else {
                [[p00, p10, p01], [p10, p11, p01]]
            };
            for t in tris {
                points.push([pos(t[0].0, t[0].1), pos(t[1].0, t[1].1), pos(t[2].0, t[2].1)]);
                lattice.push(t);
            }
        }
    }
    let canon = [(1, 0), (0, 1), (1, 1), (1, -1)];
    let mut sides: HashMap<((i64, i64), (i64, i64)), Vec<SideRef>> = HashMap::new();
    let mut order = Vec::new();
    for (f, t) in lattice.iter().enumerate() {
        for s in 0..3u8 {
            let p = t[(s as usize + 1) % 3];
            let q = t[(s as usize + 2) % 3];
            let d = (q.0 - p.0, q.1 - p.1);
            let (start, dir) = if canon.contains(&d) { (p, d) } else { (q, (-d.0, -d.1)) };
            let key = ((start.0.rem_euclid(ni), start.1.rem_euclid(ki)), dir);
            let entry = sides.entry(key).or_default();
            if entry.is_empty() {
                order.push(key);
            }
            entry.push(SideRef::new(f, s));
        }
    }
    let gluings = order
        .iter()
        .map(|key| {
            let v = &sides[key];
            assert_eq!(v.len(), 2, "every lattice segment bounds two triangles");
            [v[0], v[1]]
        })
        .collect();
    FlatComplex { points, gluings }
}

/// The two-face, three-edge, one-vertex torus.
pub fn one_vertex_complex() -> FlatComplex {
    grid_complex(1, 1, &[true])
}

/// The one-vertex torus with meridian crossing edges 1 and 0 once each
/// (steps `(0, 0, 1)`, `(1, 1, 0)` in the face/side numbering below).
///
/// Faces are `[1, 2, 3]` and `[4, 5, 6]`, side `s` of face 0 is glued to
/// side `s` of face 1.
pub fn one_vertex_raw() -> RawInstance {
    RawInstance {
        faces: vec![[1, 2, 3], [4, 5, 6]],
        gluings: vec![[(0, 0), (1, 0)], [(0, 1), (1, 1)], [(0, 2), (1, 2)]],
        meridian: vec![(0, 0, 1), (1, 1, 0)],
        alpha: None,
        cone_angle: None,
        alpha_pi: None,
        cone_angle_pi: None,
    }
}

pub fn one_vertex() -> Triangulation {
    Triangulation::from_raw(&one_vertex_raw()).expect("one-vertex torus is valid")
}

/// The four-face, two-vertex torus (a 2 × 1 grid).
pub fn four_face_complex() -> FlatComplex {
    grid_complex(2, 1, &[true, true])
}

pub fn four_face() -> Triangulation {
    four_face_complex().triangulation(HomologyClass::new(1, 0))
}

/// Random flat complex with exactly `m` faces (`m` even, `m ≥ 2`).
pub fn random_complex<R: Rng>(m: usize, rng: &mut R) -> FlatComplex {
    assert!(m >= 2 && m % 2 == 0);
    let mut shapes: Vec<(usize, usize)> = Vec::new();
    for n in 1..=m {
        for k in 1..=m {
            if 2 * n * k <= m {
                shapes.push((n, k));
            }
        }
    }
    let &(n, k) = shapes.choose(rng).unwrap();
    let diag: Vec<bool> = (0..n * k).map(|_| rng.gen()).collect();
    let mut cx = grid_complex(n, k, &diag);
    while cx.num_faces() < m {
        let f = rng.gen_range(0..cx.num_faces());
        let w: [f64; 3] = [rng.gen_range(0.2..1.0), rng.gen_range(0.2..1.0), rng.gen_range(0.2..1.0)];
        let s = w.iter().sum::<f64>();
        cx.split(f, [w[0] / s, w[1] / s, w[2] / s]);
    }
    cx
}

pub fn random_primitive_class<R: Rng>(rng: &mut R) -> HomologyClass {
    loop {
        let a = rng.gen_range(-2i64..=2);
        let b = rng.gen_range(-2i64..=2);
        let c = HomologyClass::new(a, b);
        if c.is_primitive() {
            return c;
        }
    }
}

pub fn random_triangulation<R: Rng>(m: usize, rng: &mut R) -> Triangulation {
    let cx = random_complex(m, rng);
    cx.triangulation(random_primitive_class(rng))
}

/// A positive angle structure sampled from the polytope of corner angles
/// with face sums π, vertex sums 2π and opposite-corner sums at most
/// `π - margin` on every edge, as the average of a few random vertices of it.
pub fn random_angle_structure<R: Rng>(tri: &Triangulation, margin: f64, rng: &mut R) -> Option<Vec<f64>> {
    let n = tri.num_corners();
    let ne = tri.num_edges();
    let cols = n + ne;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for f in 0..tri.num_faces() {
        let mut r = vec![0.0; cols];
        r[3 * f..3 * f + 3].fill(1.0);
        a.push(r);
        b.push(PI - 3.0 * margin);
    }
    for v in 0..tri.num_vertices() {
        let mut r = vec![0.0; cols];
        for &c in tri.vertex_corners(v) {
            r[c] = 1.0;
        }
        a.push(r);
        b.push(2.0 * PI - margin * tri.degree(v) as f64);
    }
    for e in 0..ne {
        let mut r = vec![0.0; cols];
        for c in tri.opposite_corners(e) {
            r[c] = 1.0;
        }
        r[n + e] = 1.0;
        a.push(r);
        b.push(PI - 3.0 * margin);
    }
    let rounds = 4;
    let mut acc = vec![0.0; n];
    for _ in 0..rounds {
        let mut c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        c.extend(std::iter::repeat(0.0).take(ne));
        let sol = simplex::solve(&Lp { a: a.clone(), b: b.clone(), c }, PivotRule::SteepestEdge);
        if sol.status != LpStatus::Optimal {
            return None;
        }
        for (x, y) in acc.iter_mut().zip(&sol.x) {
            *x += y;
        }
    }
    Some(acc.iter().map(|x| margin + x / rounds as f64).collect())
}

/// Edge angles and cone angle read off a positive angle structure.
pub fn angles_from_structure(tri: &Triangulation, theta: &[f64]) -> AngleAssignment {
    let alpha = (0..tri.num_edges())
        .map(|e| {
            let [c1, c2] = tri.opposite_corners(e);
            (PI - theta[c1] - theta[c2]).max(0.0)
        })
        .collect();
    let k = crate::topology::dot_f64(&tri.holonomy_functional(tri.meridian()), theta);
    AngleAssignment::new(alpha, k).expect("angles are in range")
}

/// A random triangulation with `m` faces together with admissible angle
/// data. The meridian is oriented so that the cone angle is nonnegative.
pub fn random_admissible<R: Rng>(m: usize, rng: &mut R) -> (Triangulation, AngleAssignment, Vec<f64>) {
    loop {
        let tri = random_triangulation(m, rng);
        let Some(theta) = random_angle_structure(&tri, 0.05, rng) else {
            continue;
        };
        let mut a = angles_from_structure(&tri, &theta);
        let tri = if a.cone_angle < 0.0 {
            let rev = tri.meridian().reversed();
            let t = tri.with_meridian(rev).expect("reversed meridian is primitive");
            a.cone_angle = -a.cone_angle;
            t
        } else {
            tri
        };
        return (tri, a, theta);
    }
}
