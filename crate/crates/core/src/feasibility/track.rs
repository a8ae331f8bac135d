//! Arrow sets and the oriented train tracks they span.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::topology::{face_of, position, SideRef, Triangulation};

/// An oriented edge of `Y`, obtained from a dual arrow pointing into the
/// corner `corner` by a quarter turn counterclockwise. The arrow's head face
/// lies to the right of the edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct YEdge {
    pub edge: usize,
    pub corner: usize,
    /// Side whose counterclockwise orientation is the direction of the edge;
    /// its face is the tail face of the dual arrow.
    pub forward: SideRef,
    pub tail: usize,
    pub head: usize,
}

impl YEdge {
    /// Side of the head face of the dual arrow (opposite `corner`).
    pub fn head_side(&self) -> SideRef {
        SideRef::new(face_of(self.corner), position(self.corner))
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ArrowSet {
    /// Corners with nonpositive angle, in increasing order.
    pub y_prime: Vec<usize>,
    pub y: Vec<YEdge>,
    /// Index into `y` for each edge carrying an arrow.
    #[serde(skip)]
    pub by_edge: Vec<Option<usize>>,
}

impl ArrowSet {
    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y_edge(&self, e: usize) -> Option<&YEdge> {
        self.by_edge[e].map(|i| &self.y[i])
    }

    /// Vertices whose incident `Y` edges all point in, or all point out.
    pub fn unbalanced_vertices(&self, tri: &Triangulation) -> Vec<(usize, bool)> {
        let mut ins = vec![0usize; tri.num_vertices()];
        let mut outs = vec![0usize; tri.num_vertices()];
        for y in &self.y {
            outs[y.tail] += 1;
            ins[y.head] += 1;
        }
        (0..tri.num_vertices())
            .filter_map(|v| match (ins[v] > 0, outs[v] > 0) {
                (true, false) => Some((v, true)),
                (false, true) => Some((v, false)),
                _ => None,
            })
            .collect()
    }
}

/// Builds `Y'` and `Y` from the set of nonpositive corners.
///
/// Fails if both corners opposite one edge are nonpositive, which cannot
/// happen for angles solving the edge equations with `α < π`.
pub fn build_arrow_set(tri: &Triangulation, nonpos: &[bool]) -> Result<ArrowSet> {
    let mut by_edge = vec![None; tri.num_edges()];
    let mut y = Vec::new();
    let mut y_prime = Vec::new();
    for (c, _) in nonpos.iter().enumerate().filter(|(_, &b)| b) {
        y_prime.push(c);
        let side = SideRef::new(face_of(c), position(c));
        let e = tri.edge_of(side);
        if by_edge[e].is_some() {
            return Err(Error::InvalidAngle(format!("both corners opposite edge {e} are nonpositive")));
        }
        let forward = tri.partner(side);
        by_edge[e] = Some(y.len());
        y.push(YEdge {
            edge: e,
            corner: c,
            forward,
            tail: tri.vertex_of(forward.start_corner()),
            head: tri.vertex_of(forward.end_corner()),
        });
    }
    Ok(ArrowSet { y_prime, y, by_edge })
}

/// A `Y` half-edge at a vertex: the gap following corner `corner` clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HalfEdge {
    pub corner: usize,
    pub y: usize,
    pub outgoing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Switch {
    pub vertex: usize,
    /// `Y` half-edges in clockwise order.
    pub half_edges: Vec<HalfEdge>,
    /// Number of maximal runs of incoming half-edges.
    pub k: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Region {
    pub faces: Vec<usize>,
    pub chi_top: i64,
    pub spikes: usize,
    /// Polygon inserted at a switch with `k ≥ 2`.
    pub switch_polygon: Option<usize>,
}

impl Region {
    /// Euler index `χ - spikes/2`, doubled to stay integral.
    pub fn twice_index(&self) -> i64 {
        2 * self.chi_top - self.spikes as i64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrainTrack {
    pub branches: Vec<YEdge>,
    pub switches: Vec<Switch>,
    pub regions: Vec<Region>,
    /// Region of each face.
    #[serde(skip)]
    pub region_of_face: Vec<usize>,
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let n = p[y];
        p[y] = r;
        y = n;
    }
    r
}

pub fn build_train_track(tri: &Triangulation, arrows: &ArrowSet) -> Result<TrainTrack> {
    if let Some(&(v, _)) = arrows.unbalanced_vertices(tri).first() {
        return Err(Error::UnbalancedVertex(v));
    }
    let mut switches = Vec::new();
    let mut on_track = vec![false; tri.num_vertices()];
    for v in 0..tri.num_vertices() {
        let mut hes = Vec::new();
        for &c in tri.vertex_corners(v) {
            let side = tri.half_edge_after(c);
            if let Some(yi) = arrows.by_edge[tri.edge_of(side)] {
                hes.push(HalfEdge { corner: c, y: yi, outgoing: arrows.y[yi].forward == side });
            }
        }
        if hes.is_empty() {
            continue;
        }
        on_track[v] = true;
        let n = hes.len();
        let k = (0..n).filter(|&i| !hes[i].outgoing && hes[(i + 1) % n].outgoing).count();
        switches.push(Switch { vertex: v, half_edges: hes, k });
    }

    let nf = tri.num_faces();
    let mut parent: Vec<usize> = (0..nf).collect();
    for e in 0..tri.num_edges() {
        if arrows.by_edge[e].is_none() {
            let [a, b] = tri.edge_sides(e);
            let (ra, rb) = (find(&mut parent, a.face), find(&mut parent, b.face));
            parent[ra] = rb;
        }
    }
    // Faces around an off-track vertex are already joined through non-Y edges.
    let mut root_index = vec![usize::MAX; nf];
    let mut regions: Vec<Region> = Vec::new();
    let mut region_of_face = vec![0; nf];
    for f in 0..nf {
        let r = find(&mut parent, f);
        if root_index[r] == usize::MAX {
            root_index[r] = regions.len();
            regions.push(Region { faces: Vec::new(), chi_top: 0, spikes: 0, switch_polygon: None });
        }
        let ri = root_index[r];
        region_of_face[f] = ri;
        regions[ri].faces.push(f);
        regions[ri].chi_top += 1;
    }
    for e in 0..tri.num_edges() {
        if arrows.by_edge[e].is_none() {
            regions[region_of_face[tri.edge_sides(e)[0].face]].chi_top -= 1;
        }
    }
    for v in 0..tri.num_vertices() {
        if !on_track[v] {
            let f = face_of(tri.vertex_corners(v)[0]);
            regions[region_of_face[f]].chi_top += 1;
        }
    }
    for sw in &switches {
        let n = sw.half_edges.len();
        for i in 0..n {
            let a = sw.half_edges[i];
            let b = sw.half_edges[(i + 1) % n];
            if a.outgoing == b.outgoing {
                // The sector after `a` clockwise starts in the face of the corner after `a`.
                let c = tri.succ_around_vertex(a.corner);
                regions[region_of_face[face_of(c)]].spikes += 1;
            }
        }
        if sw.k >= 2 {
            regions.push(Region { faces: Vec::new(), chi_top: 1, spikes: 2 * sw.k, switch_polygon: Some(sw.vertex) });
        }
    }
    Ok(TrainTrack { branches: arrows.y.clone(), switches, regions, region_of_face })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RegionReport {
    pub twice_index_sum: i64,
    pub smooth_disks: Vec<usize>,
    pub positive_index: Vec<usize>,
    pub odd_spikes: Vec<usize>,
    pub polygons: Vec<usize>,
}

impl RegionReport {
    pub fn is_clean(&self) -> bool {
        self.twice_index_sum == 0
            && self.smooth_disks.is_empty()
            && self.positive_index.is_empty()
            && self.odd_spikes.is_empty()
            && self.polygons.is_empty()
    }
}

pub fn classify_regions(track: &TrainTrack) -> RegionReport {
    let mut rep = RegionReport::default();
    for (i, r) in track.regions.iter().enumerate() {
        rep.twice_index_sum += r.twice_index();
        if r.chi_top == 1 && r.spikes == 0 {
            rep.smooth_disks.push(i);
        }
        if r.twice_index() > 0 {
            rep.positive_index.push(i);
        }
        if r.spikes % 2 == 1 {
            rep.odd_spikes.push(i);
        }
        if r.switch_polygon.is_some() {
            rep.polygons.push(i);
        }
    }
    rep
}

/// Boundary branches of a smooth annulus region lying on one side of all of
/// them: its two boundary curves are parallel with opposite orientations.
#[derive(Clone, Debug, Serialize)]
pub struct ReebWitness {
    pub region: usize,
    pub branches: Vec<usize>,
}

pub fn detect_reeb(tri: &Triangulation, track: &TrainTrack) -> Option<ReebWitness> {
    for (i, r) in track.regions.iter().enumerate() {
        if r.switch_polygon.is_some() || r.chi_top != 0 || r.spikes != 0 {
            continue;
        }
        let mut right = Vec::new();
        let mut left = Vec::new();
        for (bi, b) in track.branches.iter().enumerate() {
            let head_face = face_of(b.corner);
            let tail_face = b.forward.face;
            let on_right = track.region_of_face[head_face] == i;
            let on_left = track.region_of_face[tail_face] == i;
            if on_right && on_left {
                right.clear();
                left.clear();
                break;
            }
            if on_right {
                right.push(bi);
            } else if on_left {
                left.push(bi);
            }
        }
        let _ = tri;
        match (right.is_empty(), left.is_empty()) {
            (false, true) => return Some(ReebWitness { region: i, branches: right }),
            (true, false) => return Some(ReebWitness { region: i, branches: left }),
            _ => {}
        }
    }
    None
}

/// Branch that a carried walk arriving along `incoming` continues on, taking
/// the rightmost (or leftmost) available turn.
pub fn next_branch(tri: &Triangulation, arrows: &ArrowSet, incoming: usize, right: bool) -> Option<usize> {
    let y = &arrows.y[incoming];
    // Corner at the head whose clockwise gap is the incoming half-edge.
    let back = tri.partner(y.forward);
    let start = back.start_corner();
    debug_assert_eq!(tri.half_edge_after(start), back);
    let d = tri.degree(y.head);
    let mut c = start;
    for _ in 0..d {
        c = if right { tri.pred_around_vertex(c) } else { tri.succ_around_vertex(c) };
        let side = tri.half_edge_after(c);
        if let Some(yi) = arrows.by_edge[tri.edge_of(side)] {
            if arrows.y[yi].forward == side {
                return Some(yi);
            }
        }
    }
    None
}

/// Limit cycle of the extremal walk started on branch `start`.
pub fn extremal_cycle(tri: &Triangulation, arrows: &ArrowSet, start: usize, right: bool) -> Option<Vec<usize>> {
    let n = arrows.y.len();
    let mut seen = vec![usize::MAX; n];
    let mut walk = Vec::new();
    let mut cur = start;
    loop {
        if seen[cur] != usize::MAX {
            return Some(walk[seen[cur]..].to_vec());
        }
        seen[cur] = walk.len();
        walk.push(cur);
        cur = next_branch(tri, arrows, cur, right)?;
    }
}

/// Right- and left-turning limit cycles, as lists of branch indices.
pub fn extremal_carried_cycles(tri: &Triangulation, arrows: &ArrowSet) -> Option<(Vec<usize>, Vec<usize>)> {
    if arrows.is_empty() {
        return None;
    }
    let r = extremal_cycle(tri, arrows, 0, true)?;
    let l = extremal_cycle(tri, arrows, 0, false)?;
    Some((r, l))
}

/// Simple directed cycles of `Y` (distinct vertices), up to `limit` of them.
pub fn simple_cycles(tri: &Triangulation, arrows: &ArrowSet, limit: usize) -> Vec<Vec<usize>> {
    let nv = tri.num_vertices();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (i, y) in arrows.y.iter().enumerate() {
        out_edges[y.tail].push(i);
    }
    let mut cycles = Vec::new();
    // Enumerate cycles whose smallest vertex is `s`.
    for s in 0..nv {
        let mut on_path = vec![false; nv];
        let mut path: Vec<usize> = Vec::new();
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        on_path[s] = true;
        while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
            if cycles.len() >= limit {
                return cycles;
            }
            if *idx < out_edges[v].len() {
                let yi = out_edges[v][*idx];
                *idx += 1;
                let w = arrows.y[yi].head;
                if w == s {
                    let mut cyc = path.clone();
                    cyc.push(yi);
                    cycles.push(cyc);
                } else if w > s && !on_path[w] {
                    on_path[w] = true;
                    path.push(yi);
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
                on_path[v] = false;
                path.pop();
            }
        }
    }
    cycles
}
