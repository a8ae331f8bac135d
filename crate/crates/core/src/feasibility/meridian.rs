//! Transverse paths crossing a train track with constant sign, and
//! pushoffs of carried cycles.

use std::collections::VecDeque;

use crate::feasibility::track::ArrowSet;
use crate::homology::{reduce_cyclic, HomologyClass};
use crate::topology::{face_of, position, Crossing, SideRef, TransversePath, Triangulation};

/// Searches for a closed transverse path in class `target` which crosses
/// branch `start` and crosses every branch only from its tail face into its
/// head face. Works breadth-first in the abelian cover, within class radius
/// `|target|∞ + m + 2` of the starting point.
pub fn constant_sign_path(
    tri: &Triangulation,
    arrows: &ArrowSet,
    start: usize,
    target: HomologyClass,
) -> Option<TransversePath> {
    let hb = tri.homology();
    let y = &arrows.y[start];
    let head = y.head_side();
    let first = Crossing { from: y.forward, to: head };
    let first_class = hb.crossing_class(first);
    let goal = HomologyClass::new(target.a - first_class.a, target.b - first_class.b);

    let radius = target.a.abs().max(target.b.abs()) + tri.num_faces() as i64 + 2;
    let w = (2 * radius + 1) as usize;
    let encode = |f: usize, side: u8, c: HomologyClass| -> Option<usize> {
        if c.a.abs() > radius || c.b.abs() > radius {
            return None;
        }
        Some(((3 * f + side as usize) * w + (c.a + radius) as usize) * w + (c.b + radius) as usize)
    };
    let total = 3 * tri.num_faces() * w * w;
    let mut parent: Vec<u32> = vec![u32::MAX; total];
    let root = encode(head.face, head.side, HomologyClass::ZERO)?;
    parent[root] = root as u32;
    let mut queue = VecDeque::from([(head.face, head.side, HomologyClass::ZERO, root)]);

    let allowed = |from: SideRef| -> bool {
        match arrows.by_edge[tri.edge_of(from)] {
            None => true,
            Some(i) => arrows.y[i].forward == from,
        }
    };

    while let Some((f, entry, cls, idx)) = queue.pop_front() {
        if f == y.forward.face && entry != y.forward.side && cls == goal {
            // Rebuild the crossings back to the root.
            let mut crossings = Vec::new();
            let mut cur = idx;
            while cur != root {
                let p = parent[cur] as usize;
                let (pf, _) = decode_face_side(p, w);
                let (cf, cs) = decode_face_side(cur, w);
                let to = SideRef::new(cf, cs);
                let from = tri.partner(to);
                debug_assert_eq!(from.face, pf);
                crossings.push(Crossing { from, to });
                cur = p;
            }
            crossings.reverse();
            crossings.insert(0, first);
            let crossings = reduce_cyclic(crossings);
            let path = TransversePath::from_crossings(tri, &crossings).ok()?;
            return Some(path);
        }
        for s in 0..3u8 {
            if s == entry {
                continue;
            }
            let from = SideRef::new(f, s);
            if !allowed(from) {
                continue;
            }
            let to = tri.partner(from);
            let nc = cls.add(hb.crossing_class(Crossing { from, to }));
            let Some(ni) = encode(to.face, to.side, nc) else { continue };
            if parent[ni] != u32::MAX {
                continue;
            }
            parent[ni] = idx as u32;
            queue.push_back((to.face, to.side, nc, ni));
        }
    }
    None
}

fn decode_face_side(idx: usize, w: usize) -> (usize, u8) {
    let fs = idx / (w * w);
    (fs / 3, (fs % 3) as u8)
}

/// Transverse path running alongside a directed cycle of edges, on its
/// right. `cycle` lists the sides whose counterclockwise orientation
/// follows the cycle. Returns `None` if the pushoff is trivial.
pub fn right_pushoff(tri: &Triangulation, cycle: &[SideRef]) -> Option<TransversePath> {
    let b = cycle.len();
    if b == 0 {
        return None;
    }
    let mut crossings = Vec::new();
    for i in 0..b {
        let c0 = tri.partner(cycle[i]).start_corner();
        let c_end = tri.partner(cycle[(i + 1) % b]).end_corner();
        if tri.vertex_of(c0) != tri.vertex_of(c_end) {
            return None;
        }
        let mut c = c0;
        let mut guard = 0;
        while c != c_end {
            let from = SideRef::new(face_of(c), (position(c) + 1) % 3);
            crossings.push(Crossing { from, to: tri.partner(from) });
            c = tri.pred_around_vertex(c);
            guard += 1;
            if guard > tri.degree(tri.vertex_of(c0)) {
                return None;
            }
        }
    }
    let crossings = reduce_cyclic(crossings);
    if crossings.is_empty() {
        return None;
    }
    TransversePath::from_crossings(tri, &crossings).ok()
}

/// Same as [`right_pushoff`] on the left side, traversed in the opposite
/// direction.
pub fn left_pushoff(tri: &Triangulation, cycle: &[SideRef]) -> Option<TransversePath> {
    let rev: Vec<SideRef> = cycle.iter().rev().map(|&s| tri.partner(s)).collect();
    right_pushoff(tri, &rev)
}
