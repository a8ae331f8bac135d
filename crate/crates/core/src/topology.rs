//! Combinatorial model of a triangulated torus.
//!
//! Faces are oriented triangles whose corners are numbered `0, 1, 2`
//! counterclockwise (with respect to the outward orientation of the boundary
//! torus). Corner `k` of face `f` has the internal id `3f + k`. Side `s` of a
//! face is the side *opposite* corner `s`; oriented counterclockwise it runs
//! from corner `s + 1` to corner `s + 2`. Gluings always reverse the side
//! orientation, so the surface is oriented.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{HomologyBasis, HomologyClass};
use crate::instance::RawInstance;

/// A side of a face, i.e. one half of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SideRef {
    pub face: usize,
    pub side: u8,
}

impl SideRef {
    pub fn new(face: usize, side: u8) -> Self {
        SideRef { face, side }
    }

    #[inline]
    pub fn index(self) -> usize {
        3 * self.face + self.side as usize
    }

    /// Corner at which the counterclockwise orientation of this side starts.
    #[inline]
    pub fn start_corner(self) -> usize {
        corner(self.face, (self.side + 1) % 3)
    }

    /// Corner at which the counterclockwise orientation of this side ends.
    #[inline]
    pub fn end_corner(self) -> usize {
        corner(self.face, (self.side + 2) % 3)
    }

    /// Corner of the same face opposite this side.
    #[inline]
    pub fn opposite_corner(self) -> usize {
        corner(self.face, self.side)
    }
}

#[inline]
pub fn corner(face: usize, k: u8) -> usize {
    3 * face + k as usize
}

#[inline]
pub fn face_of(c: usize) -> usize {
    c / 3
}

#[inline]
pub fn position(c: usize) -> u8 {
    (c % 3) as u8
}

/// The corner following `c` counterclockwise in its triangle (`j'`).
#[inline]
pub fn next_corner(c: usize) -> usize {
    3 * (c / 3) + (c % 3 + 1) % 3
}

/// The corner preceding `c` counterclockwise in its triangle (`j''`).
#[inline]
pub fn prev_corner(c: usize) -> usize {
    3 * (c / 3) + (c % 3 + 2) % 3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Turn {
    Left,
    Right,
}

impl Turn {
    pub fn sign(self) -> i64 {
        match self {
            Turn::Left => 1,
            Turn::Right => -1,
        }
    }
}

/// One passage of a transverse path through a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub face: usize,
    pub entry: u8,
    pub exit: u8,
}

impl Step {
    pub fn new(face: usize, entry: u8, exit: u8) -> Self {
        Step { face, entry, exit }
    }

    /// Exiting through the side that follows the entry side counterclockwise
    /// is a Right; the other possibility is a Left.
    pub fn turn(&self) -> Turn {
        if (self.entry + 1) % 3 == self.exit {
            Turn::Right
        } else {
            Turn::Left
        }
    }

    /// Corner where the entry and exit sides meet.
    pub fn pivot(&self) -> usize {
        corner(self.face, 3 - self.entry - self.exit)
    }

    pub fn reversed(&self) -> Step {
        Step::new(self.face, self.exit, self.entry)
    }
}

/// Passage from one face into its neighbour through a glued pair of sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub from: SideRef,
    pub to: SideRef,
}

impl Crossing {
    pub fn reversed(self) -> Crossing {
        Crossing { from: self.to, to: self.from }
    }
}

/// A closed combinatorial path through the faces, stored as a cyclic list of
/// steps. The empty path is allowed and represents the trivial loop.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransversePath {
    steps: Vec<Step>,
}

impl TransversePath {
    /// Builds a path, checking that it is transverse and closed on `tri`.
    pub fn new(tri: &Triangulation, steps: Vec<Step>) -> Result<Self> {
        let path = TransversePath { steps };
        path.check(tri)?;
        Ok(path)
    }

    pub(crate) fn from_steps_unchecked(steps: Vec<Step>) -> Self {
        TransversePath { steps }
    }

    /// Builds a path from a cyclic list of crossings. Consecutive crossings
    /// must go through distinct sides of the face between them.
    pub fn from_crossings(tri: &Triangulation, crossings: &[Crossing]) -> Result<Self> {
        let n = crossings.len();
        let steps = (0..n)
            .map(|i| {
                let cur = crossings[i];
                let nxt = crossings[(i + 1) % n];
                Step::new(cur.to.face, cur.to.side, nxt.from.side)
            })
            .collect();
        TransversePath::new(tri, steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn turns(&self) -> impl Iterator<Item = Turn> + '_ {
        self.steps.iter().map(Step::turn)
    }

    pub fn pivot_corners(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(Step::pivot)
    }

    pub fn reversed(&self) -> TransversePath {
        TransversePath { steps: self.steps.iter().rev().map(Step::reversed).collect() }
    }

    /// The crossing leaving step `i` for step `i + 1`.
    pub fn crossings<'a>(&'a self, tri: &'a Triangulation) -> impl Iterator<Item = Crossing> + 'a {
        self.steps.iter().map(move |s| {
            let from = SideRef::new(s.face, s.exit);
            Crossing { from, to: tri.partner(from) }
        })
    }

    /// Edges crossed, in order, with repeats.
    pub fn crossed_edges<'a>(&'a self, tri: &'a Triangulation) -> impl Iterator<Item = usize> + 'a {
        self.steps.iter().map(move |s| tri.edge_of(SideRef::new(s.face, s.exit)))
    }

    pub fn check(&self, tri: &Triangulation) -> Result<()> {
        let n = self.steps.len();
        for (i, s) in self.steps.iter().enumerate() {
            if s.face >= tri.num_faces() {
                return Err(Error::InvalidPath(format!("step {i}: face {} out of range", s.face)));
            }
            if s.entry > 2 || s.exit > 2 {
                return Err(Error::InvalidPath(format!("step {i}: side index out of range")));
            }
            if s.entry == s.exit {
                return Err(Error::InvalidPath(format!(
                    "step {i}: enters and exits face {} through the same side",
                    s.face
                )));
            }
            let next = self.steps[(i + 1) % n];
            let glued = tri.partner(SideRef::new(s.face, s.exit));
            if glued != SideRef::new(next.face, next.entry) {
                return Err(Error::NonClosedPath);
            }
        }
        Ok(())
    }
}

/// A validated triangulation of the torus together with the meridian word and
/// a synthesized longitude.
#[derive(Clone, Debug)]
pub struct Triangulation {
    labels: Vec<u32>,
    partner: Vec<SideRef>,
    edge_of_side: Vec<usize>,
    edges: Vec<[SideRef; 2]>,
    vertex_of_corner: Vec<usize>,
    vertex_corners: Vec<Vec<usize>>,
    meridian: TransversePath,
    longitude: TransversePath,
    homology: HomologyBasis,
}

impl Triangulation {
    /// Validates faces and gluings only; the meridian is left empty.
    pub fn surface_from_raw(raw: &RawInstance) -> Result<Self> {
        let m = raw.faces.len();
        if m == 0 {
            return Err(Error::NonTorus("no faces".into()));
        }
        let mut seen = vec![false; 3 * m];
        let mut labels = Vec::with_capacity(3 * m);
        for face in &raw.faces {
            for &l in face {
                if l == 0 || l as usize > 3 * m {
                    return Err(Error::LabelOutOfRange(l));
                }
                if std::mem::replace(&mut seen[l as usize - 1], true) {
                    return Err(Error::DuplicateLabel(l));
                }
                labels.push(l);
            }
        }

        let unset = SideRef::new(usize::MAX, 0);
        let mut partner = vec![unset; 3 * m];
        let mut edge_of_side = vec![usize::MAX; 3 * m];
        let mut edges = Vec::with_capacity(raw.gluings.len());
        for pair in &raw.gluings {
            let a = SideRef::new(pair[0].0, pair[0].1);
            let b = SideRef::new(pair[1].0, pair[1].1);
            for s in [a, b] {
                if s.face >= m {
                    return Err(Error::FaceOutOfRange(s.face));
                }
                if s.side > 2 {
                    return Err(Error::InvalidPath(format!("side index {} out of range", s.side)));
                }
            }
            if a == b || partner[a.index()] != unset || partner[b.index()] != unset {
                let dup = if partner[a.index()] != unset || a == b { a } else { b };
                return Err(Error::SideGluedTwice { face: dup.face, side: dup.side });
            }
            partner[a.index()] = b;
            partner[b.index()] = a;
            edge_of_side[a.index()] = edges.len();
            edge_of_side[b.index()] = edges.len();
            edges.push([a, b]);
        }
        if let Some(i) = partner.iter().position(|p| *p == unset) {
            return Err(Error::UnpairedSide { face: i / 3, side: (i % 3) as u8 });
        }

        let mut tri = Triangulation {
            labels,
            partner,
            edge_of_side,
            edges,
            vertex_of_corner: vec![usize::MAX; 3 * m],
            vertex_corners: Vec::new(),
            meridian: TransversePath::default(),
            longitude: TransversePath::default(),
            homology: HomologyBasis::default(),
        };
        tri.build_vertices();

        let (v, e, f) = (tri.num_vertices(), tri.num_edges(), m);
        if v + f != e {
            return Err(Error::NonTorus(format!("V - E + F = {v} - {e} + {f} != 0")));
        }
        if !tri.is_connected() {
            return Err(Error::NonTorus("surface is disconnected".into()));
        }

        tri.homology = HomologyBasis::build(&tri);
        Ok(tri)
    }

    /// Validates faces, gluings and the meridian word.
    pub fn from_raw(raw: &RawInstance) -> Result<Self> {
        let tri = Self::surface_from_raw(raw)?;
        let steps = raw.meridian.iter().map(|&(f, a, b)| Step::new(f, a, b)).collect();
        let meridian = TransversePath::new(&tri, steps)?;
        tri.with_meridian(meridian)
    }

    /// Replaces the meridian and resynthesizes the longitude.
    pub fn with_meridian(mut self, meridian: TransversePath) -> Result<Self> {
        meridian.check(&self)?;
        let class = self.homology.class_of_path(&self, &meridian);
        if !class.is_primitive() {
            return Err(Error::NonPrimitiveMeridian(class.a, class.b));
        }
        self.longitude = self.homology.complete_to_basis(&self, class)?;
        self.meridian = meridian;
        Ok(self)
    }

    fn build_vertices(&mut self) {
        let n = self.labels.len();
        for start in 0..n {
            if self.vertex_of_corner[start] != usize::MAX {
                continue;
            }
            let v = self.vertex_corners.len();
            let mut cycle = Vec::new();
            let mut c = start;
            loop {
                self.vertex_of_corner[c] = v;
                cycle.push(c);
                c = self.succ_around_vertex(c);
                if c == start {
                    break;
                }
            }
            self.vertex_corners.push(cycle);
        }
    }

    fn is_connected(&self) -> bool {
        let m = self.num_faces();
        let mut seen = vec![false; m];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for s in 0..3 {
                let g = self.partner(SideRef::new(f, s)).face;
                if !std::mem::replace(&mut seen[g], true) {
                    stack.push(g);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Faces, gluings and meridian as a raw instance without angle data.
    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            faces: self.labels.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
            gluings: self.edges.iter().map(|[a, b]| [(a.face, a.side), (b.face, b.side)]).collect(),
            meridian: self.meridian.steps().iter().map(|s| (s.face, s.entry, s.exit)).collect(),
            alpha: None,
            cone_angle: None,
            alpha_pi: None,
            cone_angle_pi: None,
        }
    }

    pub fn num_faces(&self) -> usize {
        self.labels.len() / 3
    }

    pub fn num_corners(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_corners.len()
    }

    /// External (1-based) label of an internal corner id.
    pub fn label(&self, c: usize) -> u32 {
        self.labels[c]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn partner(&self, s: SideRef) -> SideRef {
        self.partner[s.index()]
    }

    pub fn edge_of(&self, s: SideRef) -> usize {
        self.edge_of_side[s.index()]
    }

    /// The two sides of an edge, in the order given by the gluing list.
    pub fn edge_sides(&self, e: usize) -> [SideRef; 2] {
        self.edges[e]
    }

    /// The two corners opposite an edge.
    pub fn opposite_corners(&self, e: usize) -> [usize; 2] {
        let [a, b] = self.edges[e];
        [a.opposite_corner(), b.opposite_corner()]
    }

    /// Endpoints of an edge, oriented counterclockwise in the face of its first side.
    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let s = self.edges[e][0];
        (self.vertex_of_corner[s.start_corner()], self.vertex_of_corner[s.end_corner()])
    }

    pub fn vertex_of(&self, c: usize) -> usize {
        self.vertex_of_corner[c]
    }

    /// Corners at a vertex, in clockwise order around it.
    pub fn vertex_corners(&self, v: usize) -> &[usize] {
        &self.vertex_corners[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertex_corners[v].len()
    }

    /// Next corner clockwise around the vertex of `c`, across side `k + 2`.
    pub fn succ_around_vertex(&self, c: usize) -> usize {
        let f = face_of(c);
        let k = position(c);
        let g = self.partner(SideRef::new(f, (k + 2) % 3));
        corner(g.face, (g.side + 2) % 3)
    }

    /// Next corner counterclockwise around the vertex of `c`, across side `k + 1`.
    pub fn pred_around_vertex(&self, c: usize) -> usize {
        let f = face_of(c);
        let k = position(c);
        let g = self.partner(SideRef::new(f, (k + 1) % 3));
        corner(g.face, (g.side + 1) % 3)
    }

    /// Side of the face of `c` between `c` and the next corner clockwise
    /// around its vertex. Its counterclockwise orientation leaves the vertex.
    pub fn half_edge_after(&self, c: usize) -> SideRef {
        SideRef::new(face_of(c), (position(c) + 2) % 3)
    }

    pub fn meridian(&self) -> &TransversePath {
        &self.meridian
    }

    pub fn longitude(&self) -> &TransversePath {
        &self.longitude
    }

    pub fn homology(&self) -> &HomologyBasis {
        &self.homology
    }

    /// Transverse loop encircling `v` once, turning Right at each of its
    /// corners (so the vertex stays on the right and the loop runs clockwise).
    pub fn vertex_loop(&self, v: usize) -> TransversePath {
        let steps = self.vertex_corners[v]
            .iter()
            .map(|&c| {
                let k = position(c);
                Step::new(face_of(c), (k + 1) % 3, (k + 2) % 3)
            })
            .collect();
        TransversePath::from_steps_unchecked(steps)
    }

    /// Vector `T_γ`: coordinate `j` counts Left passages around corner `j`
    /// minus Right passages around it.
    pub fn path_vector(&self, path: &TransversePath) -> Vec<i64> {
        let mut t = vec![0i64; self.num_corners()];
        for s in path.steps() {
            t[s.pivot()] += s.turn().sign();
        }
        t
    }

    /// Integer functional `h` with `h·θ = Σ ε_s θ_{X_s}`, the angular holonomy.
    pub fn holonomy_functional(&self, path: &TransversePath) -> Vec<i64> {
        self.path_vector(path)
    }

    /// Homology class of a closed path, in the basis (meridian, longitude).
    pub fn homology_class(&self, path: &TransversePath) -> Result<(i64, i64)> {
        path.check(self)?;
        let x = self.homology.class_of_path(self, path);
        let mu = self.homology.class_of_path(self, &self.meridian);
        let la = self.homology.class_of_path(self, &self.longitude);
        let d = mu.det(la);
        Ok((x.det(la) / d, mu.det(x) / d))
    }

    pub fn class_of(&self, path: &TransversePath) -> HomologyClass {
        self.homology.class_of_path(self, path)
    }

    /// Pushes a maximal run of same-direction turns around one vertex across
    /// that vertex, producing a homotopic path. Returns `None` when the run
    /// at `step` is degenerate (it wraps all but one corner, or the path has
    /// no step outside the run and its two neighbours).
    pub fn push_across_vertex(&self, path: &TransversePath, step: usize) -> Option<TransversePath> {
        let n = path.len();
        if n == 0 {
            return None;
        }
        match path.steps()[step % n].turn() {
            Turn::Right => self.push_right_run(path, step % n),
            Turn::Left => {
                let rev = path.reversed();
                let pushed = self.push_right_run(&rev, n - 1 - step % n)?;
                Some(pushed.reversed())
            }
        }
    }

    fn push_right_run(&self, path: &TransversePath, step: usize) -> Option<TransversePath> {
        let steps = path.steps();
        let n = steps.len();
        let continues = |a: &Step, b: &Step| {
            a.turn() == Turn::Right && b.turn() == Turn::Right && self.succ_around_vertex(a.pivot()) == b.pivot()
        };
        // Walk back to the start of the run.
        let mut start = step;
        let mut r = 1;
        while r < n && continues(&steps[(start + n - 1) % n], &steps[start]) {
            start = (start + n - 1) % n;
            r += 1;
        }
        if r == n {
            return None;
        }
        let mut end = step;
        while r < n && continues(&steps[end], &steps[(end + 1) % n]) {
            end = (end + 1) % n;
            r += 1;
        }
        let d = self.degree(self.vertex_of(steps[start].pivot()));
        if r + 2 > d || r + 2 > n {
            return None;
        }
        let u = self.pred_around_vertex(steps[start].pivot());
        let y = self.succ_around_vertex(steps[end].pivot());
        let prev = steps[(start + n - 1) % n];
        let next = steps[(end + 1) % n];
        let ku = position(u);
        let ky = position(y);
        let new_prev = Step::new(prev.face, prev.entry, (ku + 1) % 3);
        let new_next = Step::new(next.face, (ky + 2) % 3, next.exit);
        if new_prev.entry == new_prev.exit || new_next.entry == new_next.exit {
            return None;
        }
        let mut inserted = Vec::new();
        let mut c = self.pred_around_vertex(u);
        while c != y {
            let k = position(c);
            inserted.push(Step::new(face_of(c), (k + 2) % 3, (k + 1) % 3));
            c = self.pred_around_vertex(c);
        }
        // Rebuild starting right after `next`.
        let mut out = Vec::with_capacity(n - r + inserted.len());
        let mut i = (end + 2) % n;
        while i != (start + n - 1) % n {
            out.push(steps[i]);
            i = (i + 1) % n;
        }
        out.push(new_prev);
        out.extend(inserted);
        out.push(new_next);
        let pushed = TransversePath::from_steps_unchecked(out);
        pushed.check(self).ok()?;
        Some(pushed)
    }
}

/// Linear map sending `e_j` to `e_{j''} - e_{j'}`.
pub fn phi<T>(x: &[T]) -> Vec<T>
where
    T: Copy + num_traits::Zero + std::ops::Sub<Output = T> + std::ops::AddAssign + std::ops::SubAssign,
{
    let mut out = vec![T::zero(); x.len()];
    for (j, &v) in x.iter().enumerate() {
        out[prev_corner(j)] += v;
        out[next_corner(j)] -= v;
    }
    out
}

pub fn dot<T>(a: &[i64], b: &[T]) -> T
where
    T: Copy + num_traits::Zero + std::ops::Mul<Output = T> + From<i32>,
{
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| if x == 0 { acc } else { acc + T::from(x as i32) * y })
}

pub fn dot_f64(a: &[i64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y).sum()
}

pub fn dot_i64(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
