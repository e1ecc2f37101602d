//! Chains on the cell complex of a planar grid graph, difference systems on
//! its faces, and the extremal and connectivity results built on them.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cover::find_factor;
use crate::error::{Error, Result};
use crate::grid::{EdgeId, FaceId, Grid, GridGraph, VertexId};

macro_rules! sparse_chain {
    ($name:ident, $key:ty) => {
        #[derive(Clone, Debug, Default, PartialEq, Eq)]
        pub struct $name {
            coeffs: BTreeMap<$key, Rational64>,
        }

        impl $name {
            pub fn zero() -> Self {
                Self::default()
            }

            pub fn get(&self, k: $key) -> Rational64 {
                self.coeffs.get(&k).copied().unwrap_or_else(Rational64::zero)
            }

            pub fn set(&mut self, k: $key, v: Rational64) {
                if v.is_zero() {
                    self.coeffs.remove(&k);
                } else {
                    self.coeffs.insert(k, v);
                }
            }

            pub fn add_to(&mut self, k: $key, v: Rational64) {
                let cur = self.get(k);
                self.set(k, cur + v);
            }

            pub fn is_zero(&self) -> bool {
                self.coeffs.is_empty()
            }

            pub fn iter(&self) -> impl Iterator<Item = ($key, Rational64)> + '_ {
                self.coeffs.iter().map(|(&k, &v)| (k, v))
            }

            pub fn scaled(&self, s: Rational64) -> Self {
                let mut out = Self::zero();
                for (k, v) in self.iter() {
                    out.set(k, v * s);
                }
                out
            }
        }

        impl std::ops::Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                let mut out = self.clone();
                for (k, v) in rhs.iter() {
                    out.add_to(k, v);
                }
                out
            }
        }

        impl std::ops::Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                let mut out = self.clone();
                for (k, v) in rhs.iter() {
                    out.add_to(k, -v);
                }
                out
            }
        }
    };
}

sparse_chain!(Chain0, VertexId);
// Coefficients refer to the black-to-white orientation; the reverse
// orientation carries the negated value.
sparse_chain!(Chain1, EdgeId);
sparse_chain!(Chain2, FaceId);

impl Chain2 {
    pub fn from_values(values: &[i64]) -> Self {
        let mut c = Chain2::zero();
        for (f, &v) in values.iter().enumerate() {
            c.set(f, Rational64::from_integer(v));
        }
        c
    }
}

/// `d(e) = w - v` for `e = (v, w)`, extended linearly.
pub fn boundary1(g: &GridGraph, c: &Chain1) -> Chain0 {
    let mut out = Chain0::zero();
    for (e, v) in c.iter() {
        let edge = g.edge(e);
        out.add_to(edge.white, v);
        out.add_to(edge.black, -v);
    }
    out
}

/// Sum of the clockwise boundary darts of each face, extended linearly.
pub fn boundary2(grid: &Grid, c: &Chain2) -> Chain1 {
    let mut out = Chain1::zero();
    for (f, v) in c.iter() {
        for d in &grid.faces().face(f).boundary {
            let s = if d.is_forward() { v } else { -v };
            out.add_to(d.edge(), s);
        }
    }
    out
}

/// `2 - |F| + |E| - |V|`.
pub fn homology_dimension(grid: &Grid) -> i64 {
    let g = grid.graph();
    2 - grid.faces().len() as i64 + g.edge_count() as i64 - g.vertex_count() as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cost: i64,
}

/// Restrictions `tau(to) - tau(from) <= cost` on integer functions over
/// faces, with a reference face pinned to zero.
#[derive(Clone, Debug)]
pub struct DifferenceSystem {
    n: usize,
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    reference: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distance {
    Finite(i64),
    /// A cycle of faces whose total cost is negative.
    NegativeCycle(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extremum {
    Max,
    Min,
}

impl DifferenceSystem {
    pub fn new(n: usize, reference: usize) -> Self {
        assert!(reference < n);
        DifferenceSystem { n, arcs: Vec::new(), out: vec![Vec::new(); n], inc: vec![Vec::new(); n], reference }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cost: i64) {
        let id = self.arcs.len();
        self.arcs.push(Arc { from, to, cost });
        self.out[from].push(id);
        self.inc[to].push(id);
    }

    /// The system whose integer solutions with `tau(outer) = 0` correspond
    /// one-to-one to subgraphs with the same degrees as `reference`, via
    /// `omega_H = omega_ref + d tau`.
    pub fn for_subgraph(grid: &Grid, reference: &[bool]) -> Self {
        let fs = grid.faces();
        let mut sys = DifferenceSystem::new(fs.len(), fs.outer());
        for (e, &r) in reference.iter().enumerate() {
            let (l, rt) = (fs.left(e), fs.right(e));
            let r = r as i64;
            sys.add_arc(l, rt, 1 - r);
            sys.add_arc(rt, l, r);
        }
        sys
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn max_cost(&self) -> i64 {
        self.arcs.iter().map(|a| a.cost.abs()).max().unwrap_or(0)
    }

    /// True iff `tau` satisfies every restriction.
    pub fn is_valid(&self, tau: &[i64]) -> bool {
        self.arcs.iter().all(|a| tau[a.to] - tau[a.from] <= a.cost)
    }

    /// Label-correcting shortest paths from the given start labels. Returns
    /// a negative cycle if one is reachable.
    fn relax(&self, starts: &[(usize, i64)], reverse: bool) -> std::result::Result<Vec<Option<i64>>, Vec<usize>> {
        let n = self.n;
        let mut dist: Vec<Option<i64>> = vec![None; n];
        let mut pred = vec![usize::MAX; n];
        for &(s, d) in starts {
            dist[s] = Some(d);
        }
        let ends = |a: &Arc| if reverse { (a.to, a.from) } else { (a.from, a.to) };
        let tail = |a: &Arc| ends(a).0;
        let mut last = usize::MAX;
        for _ in 0..n {
            last = usize::MAX;
            for (i, a) in self.arcs.iter().enumerate() {
                let (u, v) = ends(a);
                if let Some(du) = dist[u] {
                    let nd = du + a.cost;
                    if dist[v].is_none_or(|dv| nd < dv) {
                        dist[v] = Some(nd);
                        pred[v] = i;
                        last = v;
                    }
                }
            }
            if last == usize::MAX {
                return Ok(dist);
            }
        }
        // Still relaxing after n rounds: walk back n steps to land on the cycle.
        let mut v = last;
        for _ in 0..n {
            v = tail(&self.arcs[pred[v]]);
        }
        let mut cycle = vec![v];
        let mut u = tail(&self.arcs[pred[v]]);
        while u != v {
            cycle.push(u);
            u = tail(&self.arcs[pred[u]]);
        }
        cycle.reverse();
        if reverse {
            cycle.reverse();
        }
        Err(cycle)
    }

    /// `D(from, f)` for every face `f`.
    pub fn distances_from(&self, from: usize) -> std::result::Result<Vec<Option<i64>>, Vec<usize>> {
        self.relax(&[(from, 0)], false)
    }

    /// `D(f, to)` for every face `f`.
    pub fn distances_to(&self, to: usize) -> std::result::Result<Vec<Option<i64>>, Vec<usize>> {
        self.relax(&[(to, 0)], true)
    }

    pub fn shortest_distance(&self, f1: usize, f2: usize) -> Result<Distance> {
        match self.distances_from(f1) {
            Err(cycle) => Ok(Distance::NegativeCycle(cycle)),
            Ok(d) => d[f2].map(Distance::Finite).ok_or(Error::Unreachable { from: f1, to: f2 }),
        }
    }

    /// A negative cycle anywhere in the system, if one exists.
    pub fn negative_cycle(&self) -> Option<Vec<usize>> {
        let starts: Vec<(usize, i64)> = (0..self.n).map(|f| (f, 0)).collect();
        self.relax(&starts, false).err()
    }

    pub fn exists_height(&self) -> bool {
        self.negative_cycle().is_none()
    }

    /// `D(f0, f)` (Max) or `-D(f, f0)` (Min) for every face.
    pub fn extremal_height(&self, f0: usize, dir: Extremum) -> Result<Vec<i64>> {
        let d = match dir {
            Extremum::Max => self.distances_from(f0),
            Extremum::Min => self.distances_to(f0),
        }
        .map_err(|_| Error::Infeasible)?;
        let sign = if dir == Extremum::Max { 1 } else { -1 };
        d.iter()
            .enumerate()
            .map(|(f, v)| {
                v.map(|x| sign * x).ok_or(match dir {
                    Extremum::Max => Error::Unreachable { from: f0, to: f },
                    Extremum::Min => Error::Unreachable { from: f, to: f0 },
                })
            })
            .collect()
    }

    /// All-pairs `D`, row `a` holding `D(a, .)`.
    pub fn all_pairs(&self) -> Result<Vec<Vec<Option<i64>>>> {
        (0..self.n).map(|f| self.distances_from(f).map_err(|_| Error::Infeasible)).collect()
    }

    pub fn face_clusters(&self) -> Result<FaceClusterPartition> {
        let d = self.all_pairs()?;
        Ok(FaceClusterPartition::from_distances(&d))
    }

    /// Single-face unit moves turning `tau1` into `tau2`, every intermediate
    /// field valid. The face with the largest discrepancy is moved; when a
    /// tight restriction blocks it, the blocking neighbour (whose discrepancy
    /// is at least as large) is tried instead.
    pub fn connect_heights(&self, tau1: &[i64], tau2: &[i64]) -> Result<Vec<HeightMove>> {
        let n = self.n;
        let mut tau = tau1.to_vec();
        let mut moves = Vec::new();
        let mut visited = vec![0u64; n];
        let mut stamp = 0u64;
        loop {
            let Some(mut f) = (0..n).filter(|&f| tau[f] != tau2[f]).max_by_key(|&f| ((tau[f] - tau2[f]).abs(), std::cmp::Reverse(f)))
            else {
                return Ok(moves);
            };
            stamp += 1;
            loop {
                if f == self.reference || visited[f] == stamp {
                    return Err(Error::DifferentComponent(f));
                }
                visited[f] = stamp;
                let down = tau[f] > tau2[f];
                let blocker = if down {
                    self.out[f].iter().map(|&a| self.arcs[a]).find(|a| tau[a.to] - tau[f] == a.cost).map(|a| a.to)
                } else {
                    self.inc[f].iter().map(|&a| self.arcs[a]).find(|a| tau[f] - tau[a.from] == a.cost).map(|a| a.from)
                };
                match blocker {
                    Some(b) if b != f => f = b,
                    Some(_) => return Err(Error::DifferentComponent(f)),
                    None => {
                        let delta = if down { -1 } else { 1 };
                        tau[f] += delta;
                        moves.push(HeightMove { face: f, delta });
                        break;
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightMove {
    pub face: usize,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceClusterPartition {
    pub cluster_of: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
    /// `D(root, f)` where root is the first face of f's cluster.
    pub offset: Vec<i64>,
}

impl FaceClusterPartition {
    fn from_distances(d: &[Vec<Option<i64>>]) -> Self {
        let n = d.len();
        let mut cluster_of = vec![usize::MAX; n];
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut offset = vec![0; n];
        for a in 0..n {
            if cluster_of[a] != usize::MAX {
                continue;
            }
            let id = clusters.len();
            let mut members = Vec::new();
            for b in a..n {
                let pinned = match (d[a][b], d[b][a]) {
                    (Some(x), Some(y)) => x == -y,
                    _ => false,
                };
                if (b == a || pinned) && cluster_of[b] == usize::MAX {
                    cluster_of[b] = id;
                    offset[b] = d[a][b].unwrap_or(0);
                    members.push(b);
                }
            }
            clusters.push(members);
        }
        FaceClusterPartition { cluster_of, clusters, offset }
    }

    pub fn same_cluster(&self, a: usize, b: usize) -> bool {
        self.cluster_of[a] == self.cluster_of[b]
    }

    /// The forced value of `tau(b) - tau(a)`, if the two faces are pinned.
    pub fn pinned(&self, a: usize, b: usize) -> Option<i64> {
        self.same_cluster(a, b).then(|| self.offset[b] - self.offset[a])
    }

    pub fn multi_face_clusters(&self) -> usize {
        self.clusters.iter().filter(|c| c.len() > 1).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeStatus {
    Free,
    FixedIn,
    FixedOut,
}

/// Status of every edge over all subgraphs with `deg(v) = phi[v]`.
pub fn classify_edges(grid: &Grid, phi: &[u32]) -> Result<Vec<EdgeStatus>> {
    let reference = find_factor(grid.graph(), phi).ok_or(Error::EmptySpace)?;
    let sys = DifferenceSystem::for_subgraph(grid, &reference);
    let clusters = sys.face_clusters()?;
    let fs = grid.faces();
    Ok(reference
        .iter()
        .enumerate()
        .map(|(e, &r)| {
            if !clusters.same_cluster(fs.left(e), fs.right(e)) {
                EdgeStatus::Free
            } else if r {
                EdgeStatus::FixedIn
            } else {
                EdgeStatus::FixedOut
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::find_initial_cover;
    use crate::grid::Dir;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn edge_boundary() {
        let gr = Grid::parse("##\n##").unwrap();
        let g = gr.graph();
        let mut c = Chain1::zero();
        c.set(0, r(1));
        let b = boundary1(g, &c);
        let e = g.edge(0);
        assert_eq!(b.get(e.white), r(1));
        assert_eq!(b.get(e.black), r(-1));
    }

    #[test]
    fn square_boundary_is_closed() {
        let gr = Grid::parse("###\n###\n###").unwrap();
        for f in 0..gr.faces().len() {
            let mut c = Chain2::zero();
            c.set(f, r(1));
            let d = boundary2(&gr, &c);
            assert!(boundary1(gr.graph(), &d).is_zero());
            if gr.faces().is_square(f) {
                assert_eq!(d.iter().count(), 4);
            }
        }
        let all = Chain2::from_values(&vec![1; gr.faces().len()]);
        assert!(boundary2(&gr, &all).is_zero());
    }

    #[test]
    fn homology_vanishes() {
        for mask in ["##\n##", "####\n#..#\n#..#\n####", "#####\n#...#\n#####"] {
            assert_eq!(homology_dimension(&Grid::parse(mask).unwrap()), 0);
        }
    }

    #[test]
    fn omega_boundary_is_twice_colour_sign() {
        let gr = Grid::parse("####\n####\n####\n####").unwrap();
        let g = gr.graph();
        let h = find_initial_cover(g).unwrap();
        let b = boundary1(g, &h.omega());
        for v in 0..g.vertex_count() {
            let s = if g.color_of(v) == crate::grid::Color::Black { -2 } else { 2 };
            assert_eq!(b.get(v), r(s));
        }
    }

    #[test]
    fn small_systems() {
        let mut sys = DifferenceSystem::new(2, 0);
        sys.add_arc(0, 1, 1);
        sys.add_arc(1, 0, 1);
        assert_eq!(sys.shortest_distance(0, 1), Ok(Distance::Finite(1)));
        assert!(sys.exists_height());
        assert_eq!(sys.face_clusters().unwrap().clusters.len(), 2);

        let mut bad = DifferenceSystem::new(2, 0);
        bad.add_arc(0, 1, 1);
        bad.add_arc(1, 0, -2);
        assert!(!bad.exists_height());
        let Distance::NegativeCycle(c) = bad.shortest_distance(0, 1).unwrap() else { panic!() };
        assert_eq!(c.len(), 2);
        assert_eq!(bad.extremal_height(0, Extremum::Max), Err(Error::Infeasible));

        let lone = DifferenceSystem::new(2, 0);
        assert_eq!(lone.shortest_distance(0, 1), Err(Error::Unreachable { from: 0, to: 1 }));
    }

    #[test]
    fn taut_system_is_one_cluster() {
        let mut sys = DifferenceSystem::new(3, 0);
        sys.add_arc(0, 1, 2);
        sys.add_arc(1, 0, -2);
        sys.add_arc(1, 2, 1);
        sys.add_arc(2, 1, -1);
        let cl = sys.face_clusters().unwrap();
        assert_eq!(cl.clusters.len(), 1);
        assert_eq!(cl.pinned(0, 2), Some(3));
        assert_eq!(sys.extremal_height(0, Extremum::Max), sys.extremal_height(0, Extremum::Min));
    }

    #[test]
    fn single_square_extremes() {
        let gr = Grid::parse("##\n##").unwrap();
        let h = find_initial_cover(gr.graph()).unwrap();
        let sys = DifferenceSystem::for_subgraph(&gr, h.in_h());
        let max = sys.extremal_height(gr.faces().outer(), Extremum::Max).unwrap();
        assert_eq!(max, vec![0, 0]);
    }

    #[test]
    fn connect_trivial_and_single() {
        let mut sys = DifferenceSystem::new(2, 0);
        sys.add_arc(0, 1, 1);
        sys.add_arc(1, 0, 1);
        assert!(sys.connect_heights(&[0, 1], &[0, 1]).unwrap().is_empty());
        let m = sys.connect_heights(&[0, 1], &[0, -1]).unwrap();
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn classify_small_blocks() {
        let gr = Grid::parse("##\n##").unwrap();
        let st = classify_edges(&gr, &[2; 4]).unwrap();
        assert!(st.iter().all(|&s| s == EdgeStatus::FixedIn));

        let gr = Grid::parse("###\n###").unwrap();
        let st = classify_edges(&gr, &[2; 6]).unwrap();
        let mid = gr.faces().square_edge(0, Dir::E);
        for (e, s) in st.iter().enumerate() {
            let want = if e == mid { EdgeStatus::FixedOut } else { EdgeStatus::FixedIn };
            assert_eq!(*s, want);
        }
        let gr = Grid::parse("###\n###\n###").unwrap();
        assert_eq!(classify_edges(&gr, &[2; 9]), Err(Error::EmptySpace));
    }
}
