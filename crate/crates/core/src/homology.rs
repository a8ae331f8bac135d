//! First homology of the triangulated torus via a tree-cotree decomposition.
//!
//! Closed transverse paths (sequences of face crossings) are measured against
//! two primal cycles made of edges. The resulting integer coordinates are
//! normalised so that the two dual generator loops have classes `(1, 0)` and
//! `(0, 1)`.

use std::collections::VecDeque;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::topology::{Crossing, SideRef, TransversePath, Triangulation};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct HomologyClass {
    pub a: i64,
    pub b: i64,
}

impl HomologyClass {
    pub const ZERO: HomologyClass = HomologyClass { a: 0, b: 0 };

    pub fn new(a: i64, b: i64) -> Self {
        HomologyClass { a, b }
    }

    pub fn det(self, o: HomologyClass) -> i64 {
        self.a * o.b - self.b * o.a
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_primitive(self) -> bool {
        self.a.gcd(&self.b) == 1
    }

    pub fn neg(self) -> Self {
        HomologyClass::new(-self.a, -self.b)
    }

    pub fn add(self, o: HomologyClass) -> Self {
        HomologyClass::new(self.a + o.a, self.b + o.b)
    }

    pub fn scale(self, k: i64) -> Self {
        HomologyClass::new(self.a * k, self.b * k)
    }
}

/// A primal cycle, stored as the set of sides whose counterclockwise
/// orientation agrees with the direction of the cycle.
#[derive(Clone, Debug, Default)]
struct PrimalCycle {
    forward: Vec<SideRef>,
}

#[derive(Clone, Debug, Default)]
pub struct HomologyBasis {
    primal: [PrimalCycle; 2],
    signs: [i64; 2],
    dual: [Vec<Crossing>; 2],
}

impl HomologyBasis {
    pub(crate) fn build(tri: &Triangulation) -> Self {
        let nv = tri.num_vertices();
        let ne = tri.num_edges();
        let nf = tri.num_faces();

        // Primal spanning tree, parents stored as the side leading to the parent.
        let mut in_tree = vec![false; ne];
        let mut parent: Vec<Option<SideRef>> = vec![None; nv];
        let mut depth = vec![usize::MAX; nv];
        let mut queue = VecDeque::from([0usize]);
        depth[0] = 0;
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for e in 0..ne {
            let (a, b) = tri.edge_endpoints(e);
            incident[a].push(e);
            if b != a {
                incident[b].push(e);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &e in &incident[v] {
                let (a, b) = tri.edge_endpoints(e);
                let w = if a == v { b } else { a };
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    in_tree[e] = true;
                    // Side of `e` oriented from w towards v.
                    let s = tri.edge_sides(e)[0];
                    let s = if a == w { s } else { tri.partner(s) };
                    parent[w] = Some(s);
                    queue.push_back(w);
                }
            }
        }

        // Dual spanning tree avoiding primal tree edges.
        let mut dual_parent: Vec<Option<Crossing>> = vec![None; nf];
        let mut in_cotree = vec![false; ne];
        let mut seen = vec![false; nf];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(f) = queue.pop_front() {
            for s in 0..3 {
                let from = SideRef::new(f, s);
                let e = tri.edge_of(from);
                if in_tree[e] || in_cotree[e] {
                    continue;
                }
                let to = tri.partner(from);
                if !seen[to.face] {
                    seen[to.face] = true;
                    in_cotree[e] = true;
                    dual_parent[to.face] = Some(Crossing { from, to });
                    queue.push_back(to.face);
                }
            }
        }

        let leftover: Vec<usize> = (0..ne).filter(|&e| !in_tree[e] && !in_cotree[e]).collect();
        debug_assert_eq!(leftover.len(), 2);

        let tree_path_up = |mut v: usize| {
            let mut sides = Vec::new();
            while let Some(s) = parent[v] {
                sides.push(s);
                v = tri.vertex_of(s.end_corner());
            }
            sides
        };
        let dual_path_from_root = |mut f: usize| {
            let mut cr = Vec::new();
            while let Some(c) = dual_parent[f] {
                cr.push(c);
                f = c.from.face;
            }
            cr.reverse();
            cr
        };

        let mut primal: [PrimalCycle; 2] = Default::default();
        let mut dual: [Vec<Crossing>; 2] = Default::default();
        for (i, &e) in leftover.iter().enumerate() {
            let s = tri.edge_sides(e)[0];
            let a = tri.vertex_of(s.start_corner());
            let b = tri.vertex_of(s.end_corner());
            // Cycle: a -> b along e, then b up to root, then root down to a.
            let mut fwd = vec![s];
            let up_b = tree_path_up(b);
            let up_a = tree_path_up(a);
            // Strip the common suffix near the root.
            let mut lb = up_b.len();
            let mut la = up_a.len();
            while lb > 0 && la > 0 && tri.edge_of(up_b[lb - 1]) == tri.edge_of(up_a[la - 1]) {
                lb -= 1;
                la -= 1;
            }
            fwd.extend_from_slice(&up_b[..lb]);
            fwd.extend(up_a[..la].iter().map(|&x| tri.partner(x)));
            primal[i] = PrimalCycle { forward: fwd };

            let from = s;
            let to = tri.partner(s);
            let mut z = dual_path_from_root(from.face);
            z.push(Crossing { from, to });
            z.extend(dual_path_from_root(to.face).iter().rev().map(|c| c.reversed()));
            // Kept unreduced so that every dual cycle is based at face 0.
            dual[i] = z;
        }

        let mut basis = HomologyBasis { primal, signs: [1, 1], dual };
        for i in 0..2 {
            basis.signs[i] = basis.pair_crossings(&basis.dual[i], i);
        }
        debug_assert!(basis.signs.iter().all(|s| s.abs() == 1));
        debug_assert_eq!(basis.pair_crossings(&basis.dual[0], 1), 0);
        debug_assert_eq!(basis.pair_crossings(&basis.dual[1], 0), 0);
        basis
    }

    fn pair_one(&self, c: Crossing, i: usize) -> i64 {
        let mut t = 0;
        for &r in &self.primal[i].forward {
            if r == c.from {
                t -= 1;
            } else if r == c.to {
                t += 1;
            }
        }
        t
    }

    fn pair_crossings(&self, cr: &[Crossing], i: usize) -> i64 {
        cr.iter().map(|&c| self.pair_one(c, i)).sum()
    }

    /// Contribution of a single crossing to the class of a transverse path.
    pub fn crossing_class(&self, c: Crossing) -> HomologyClass {
        HomologyClass::new(self.pair_one(c, 0) * self.signs[0], self.pair_one(c, 1) * self.signs[1])
    }

    pub fn class_of_crossings(&self, cr: &[Crossing]) -> HomologyClass {
        cr.iter().fold(HomologyClass::ZERO, |acc, &c| acc.add(self.crossing_class(c)))
    }

    pub fn class_of_path(&self, tri: &Triangulation, path: &TransversePath) -> HomologyClass {
        let cr: Vec<Crossing> = path.crossings(tri).collect();
        self.class_of_crossings(&cr)
    }

    /// Class of a closed cycle of edges, given by the sides whose
    /// counterclockwise orientation follows the cycle. Determined up to a
    /// global sign shared by all primal cycles.
    pub fn class_of_primal(&self, forward: &[SideRef], tri: &Triangulation) -> HomologyClass {
        let pair = |i: usize| -> i64 {
            self.dual[i]
                .iter()
                .map(|c| {
                    let mut t = 0;
                    for &r in forward {
                        if r == c.from {
                            t -= 1;
                        } else if r == c.to {
                            t += 1;
                        }
                    }
                    t
                })
                .sum()
        };
        let _ = tri;
        let s = self.signs[0] * self.signs[1];
        HomologyClass::new(-pair(1) * s, pair(0) * s)
    }

    /// Closed path based at face 0 whose class completes `mu` to a basis
    /// with determinant one.
    pub(crate) fn complete_to_basis(&self, tri: &Triangulation, mu: HomologyClass) -> Result<TransversePath> {
        let g = mu.a.extended_gcd(&mu.b);
        if g.gcd.abs() != 1 {
            return Err(Error::NonPrimitiveMeridian(mu.a, mu.b));
        }
        // a x + b y = g  =>  det(mu, (-y g, x g)) = 1
        let target = HomologyClass::new(-g.y * g.gcd, g.x * g.gcd);
        debug_assert_eq!(mu.det(target), 1);
        let path = self.path_of_class(tri, target);
        Ok(path)
    }

    /// A reduced closed transverse path based at face 0 with the given class.
    pub fn path_of_class(&self, tri: &Triangulation, class: HomologyClass) -> TransversePath {
        let mut cr = Vec::new();
        for (i, k) in [class.a, class.b].into_iter().enumerate() {
            for _ in 0..k.abs() {
                if k > 0 {
                    cr.extend_from_slice(&self.dual[i]);
                } else {
                    cr.extend(self.dual[i].iter().rev().map(|c| c.reversed()));
                }
            }
        }
        let cr = reduce_cyclic(cr);
        TransversePath::from_crossings(tri, &cr).expect("reduced crossing sequence is a transverse loop")
    }
}

/// Cancels immediate returns through the same side, cyclically.
pub fn reduce_cyclic(cr: Vec<Crossing>) -> Vec<Crossing> {
    let mut out: Vec<Crossing> = Vec::with_capacity(cr.len());
    for c in cr {
        if let Some(&last) = out.last() {
            if c.from == last.to {
                out.pop();
                continue;
            }
        }
        out.push(c);
    }
    let mut lo = 0;
    let mut hi = out.len();
    while hi - lo >= 2 && out[lo].from == out[hi - 1].to {
        lo += 1;
        hi -= 1;
    }
    out[lo..hi].to_vec()
}
