//! Cycle covers (2-factors) of grid graphs.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::chain::Chain1;
use crate::error::{Error, Result};
use crate::grid::{Color, Dir, EdgeId, FaceId, FaceKind, Grid, GridGraph, LatticePoint, VertexId};

/// A spanning subgraph in which every vertex has degree two, with its cycle
/// decomposition cached. The id of a cycle is its smallest vertex id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCover {
    in_h: Vec<bool>,
    cycle_of: Vec<VertexId>,
    p: usize,
}

impl CycleCover {
    pub fn from_mask(g: &GridGraph, in_h: Vec<bool>) -> Result<Self> {
        assert_eq!(in_h.len(), g.edge_count());
        for v in 0..g.vertex_count() {
            let deg = g.incident(v).iter().flatten().filter(|&&e| in_h[e]).count();
            if deg != 2 {
                return Err(Error::NotACover(g.point(v), deg));
            }
        }
        let mut cover = CycleCover { in_h, cycle_of: vec![usize::MAX; g.vertex_count()], p: 0 };
        for v in 0..g.vertex_count() {
            if cover.cycle_of[v] == usize::MAX {
                let cycle = cover.walk(g, v);
                // v is the smallest unvisited vertex, hence the smallest on its cycle.
                for &w in &cycle {
                    cover.cycle_of[w] = v;
                }
                cover.p += 1;
            }
        }
        Ok(cover)
    }

    pub fn from_edges<I: IntoIterator<Item = EdgeId>>(g: &GridGraph, edges: I) -> Result<Self> {
        let mut in_h = vec![false; g.edge_count()];
        for e in edges {
            in_h[e] = true;
        }
        CycleCover::from_mask(g, in_h)
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.in_h[e]
    }

    pub fn in_h(&self) -> &[bool] {
        &self.in_h
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.in_h.iter().enumerate().filter(|(_, &b)| b).map(|(e, _)| e)
    }

    /// Number of cycles.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn cycle_of(&self, v: VertexId) -> VertexId {
        self.cycle_of[v]
    }

    pub fn cycle_ids(&self) -> &[VertexId] {
        &self.cycle_of
    }

    pub fn h_neighbors(&self, g: &GridGraph, v: VertexId) -> [VertexId; 2] {
        let mut out = [usize::MAX; 2];
        let mut k = 0;
        for &e in g.incident(v).iter().flatten() {
            if self.in_h[e] {
                out[k] = g.edge(e).other(v);
                k += 1;
            }
        }
        debug_assert_eq!(k, 2);
        out
    }

    /// Vertices of the cycle through `start`, beginning at `start` and
    /// heading first to its smaller H-neighbour.
    pub fn walk(&self, g: &GridGraph, start: VertexId) -> Vec<VertexId> {
        let mut cycle = vec![start];
        let [a, b] = self.h_neighbors(g, start);
        let mut prev = start;
        let mut cur = a.min(b);
        while cur != start {
            cycle.push(cur);
            let [x, y] = self.h_neighbors(g, cur);
            let nxt = if x == prev { y } else { x };
            prev = cur;
            cur = nxt;
        }
        cycle
    }

    /// All cycles as vertex sequences, ordered by cycle id.
    pub fn cycles(&self, g: &GridGraph) -> Vec<Vec<VertexId>> {
        let mut ids: Vec<VertexId> = self.cycle_of.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter().map(|s| self.walk(g, s)).collect()
    }

    /// Toggles the four sides of a square and refreshes the cycle labels of
    /// the cycles through its corners. Legality is not checked: use
    /// [`crate::height::z_transform`] for a checked move.
    pub fn toggle_square(&mut self, grid: &Grid, sq: FaceId) {
        let fs = grid.faces();
        for &e in fs.square_edges(sq) {
            self.in_h[e] = !self.in_h[e];
        }
        self.relabel(grid.graph(), fs.square_corners(sq));
    }

    fn relabel(&mut self, g: &GridGraph, touched: &[VertexId]) {
        let mut old: Vec<VertexId> = touched.iter().map(|&v| self.cycle_of[v]).collect();
        old.sort_unstable();
        old.dedup();
        let mut pending: Vec<VertexId> = touched.to_vec();
        let mut new_count = 0;
        while let Some(v) = pending.pop() {
            let cycle = self.walk(g, v);
            let id = *cycle.iter().min().expect("nonempty");
            for &w in &cycle {
                self.cycle_of[w] = id;
            }
            pending.retain(|u| !cycle.contains(u));
            new_count += 1;
        }
        self.p = self.p + new_count - old.len();
    }

    /// The black-to-white 1-chain with coefficient one on every edge of H.
    pub fn omega(&self) -> Chain1 {
        let mut c = Chain1::zero();
        for e in self.edges() {
            c.set(e, 1.into());
        }
        c
    }

    /// Edges as sorted vertex-coordinate pairs, for serialisation.
    pub fn edge_points(&self, g: &GridGraph) -> Vec<[LatticePoint; 2]> {
        self.edges()
            .map(|e| {
                let ed = g.edge(e);
                [g.point(ed.u), g.point(ed.v)]
            })
            .collect()
    }

    pub fn to_json(&self, g: &GridGraph) -> CoverJson {
        CoverJson {
            p: self.p,
            edges: self.edge_points(g),
            cycles: self
                .cycles(g)
                .into_iter()
                .map(|c| c.into_iter().map(|v| g.point(v)).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverJson {
    pub p: usize,
    pub edges: Vec<[LatticePoint; 2]>,
    pub cycles: Vec<Vec<LatticePoint>>,
}

/// Cycle list and count.
pub fn decompose(g: &GridGraph, h: &CycleCover) -> (Vec<Vec<VertexId>>, usize) {
    (h.cycles(g), h.p())
}

pub fn omega(h: &CycleCover) -> Chain1 {
    h.omega()
}

/// Any 2-factor of `g`, or `NoCover`.
pub fn find_initial_cover(g: &GridGraph) -> Result<CycleCover> {
    let phi = vec![2u32; g.vertex_count()];
    let in_h = find_factor(g, &phi).ok_or(Error::NoCover)?;
    CycleCover::from_mask(g, in_h)
}

/// A spanning subgraph with `deg(v) = phi[v]`, via maximum flow on the
/// bipartite gadget source -> black (cap phi) -> white (cap 1) -> sink (cap phi).
pub fn find_factor(g: &GridGraph, phi: &[u32]) -> Option<Vec<bool>> {
    let n = g.vertex_count();
    let (mut need_b, mut need_w) = (0u64, 0u64);
    for v in 0..n {
        match g.color_of(v) {
            Color::Black => need_b += phi[v] as u64,
            Color::White => need_w += phi[v] as u64,
        }
    }
    if need_b != need_w {
        return None;
    }
    let (s, t) = (n, n + 1);
    let mut net = Dinic::new(n + 2);
    let mut edge_arc = vec![usize::MAX; g.edge_count()];
    for v in 0..n {
        match g.color_of(v) {
            Color::Black => {
                net.add(s, v, phi[v] as i64);
                for &e in g.incident(v).iter().flatten() {
                    edge_arc[e] = net.add(v, g.edge(e).other(v), 1);
                }
            }
            Color::White => {
                net.add(v, t, phi[v] as i64);
            }
        }
    }
    if net.max_flow(s, t) != need_b as i64 {
        return None;
    }
    Some(edge_arc.iter().map(|&a| net.flow(a) == 1).collect())
}

struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), level: vec![0; n], iter: vec![0; n] }
    }

    fn add(&mut self, u: usize, v: usize, c: i64) -> usize {
        let id = self.to.len();
        self.head[u].push(id);
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(id + 1);
        self.to.push(u);
        self.cap.push(0);
        id
    }

    fn flow(&self, arc: usize) -> i64 {
        self.cap[arc ^ 1]
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &a in &self.head[u] {
                let v = self.to[a];
                if self.cap[a] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, f: i64) -> i64 {
        if u == t {
            return f;
        }
        while self.iter[u] < self.head[u].len() {
            let a = self.head[u][self.iter[u]];
            let v = self.to[a];
            if self.cap[a] > 0 && self.level[v] == self.level[u] + 1 {
                let d = self.dfs(v, t, f.min(self.cap[a]));
                if d > 0 {
                    self.cap[a] -= d;
                    self.cap[a ^ 1] += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SquareClass {
    /// One adjacent vertex pair from each of two cycles, exactly one of the
    /// two pair edges in H.
    Critical,
    /// One vertex from one cycle, three from the other.
    Corner,
    /// Vertices from three or more cycles.
    Triple,
    /// Any other two-cycle square; such a square or a neighbour is a local
    /// extremum.
    PlainBoundary,
}

/// Data of a critical square: the pair edge inside H, the pair edge outside
/// H and the sides they occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CriticalInfo {
    pub in_side: Dir,
    pub out_side: Dir,
}

#[derive(Clone, Debug, Default)]
pub struct BoundarySet {
    /// Faces (squares, holes, outer) incident to at least two cycles.
    pub faces: Vec<FaceId>,
    member: Vec<bool>,
    /// Classification for each boundary square, indexed by face id.
    pub class: Vec<Option<SquareClass>>,
    pub critical: Vec<Option<CriticalInfo>>,
}

impl BoundarySet {
    pub fn contains(&self, f: FaceId) -> bool {
        self.member[f]
    }

    pub fn squares(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.faces.iter().copied().filter(|&f| self.class.get(f).is_some_and(|c| c.is_some()))
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }
}

/// Whether the face meets two or more cycles.
pub fn is_boundary_face(grid: &Grid, h: &CycleCover, f: FaceId) -> bool {
    let g = grid.graph();
    let fs = grid.faces();
    if fs.is_square(f) {
        let c = fs.square_corners(f);
        let id = h.cycle_of(c[0]);
        return c[1..].iter().any(|&v| h.cycle_of(v) != id);
    }
    let ring = &fs.face(f).boundary;
    let Some(first) = ring.first() else { return false };
    let id = h.cycle_of(g.dart_tail(*first));
    ring.iter().any(|&d| h.cycle_of(g.dart_tail(d)) != id)
}

/// Classification of a square by the cycles at its corners; `None` when
/// all four corners share a cycle.
pub fn classify_square(grid: &Grid, h: &CycleCover, sq: FaceId) -> Option<(SquareClass, Option<CriticalInfo>)> {
    let fs = grid.faces();
    let c = fs.square_corners(sq);
    let ids = c.map(|v| h.cycle_of(v));
    let mut distinct = ids.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    match distinct.len() {
        1 => None,
        2 => {
            let count = ids.iter().filter(|&&i| i == ids[0]).count();
            if count == 1 || count == 3 {
                return Some((SquareClass::Corner, None));
            }
            // Corners SW, SE, NE, NW; side i joins corners i and i+1 in
            // this order: S, E, N, W.
            const SIDES: [Dir; 4] = [Dir::S, Dir::E, Dir::N, Dir::W];
            let pairs = if ids[0] == ids[1] && ids[2] == ids[3] {
                (SIDES[0], SIDES[2])
            } else if ids[1] == ids[2] && ids[3] == ids[0] {
                (SIDES[1], SIDES[3])
            } else {
                return Some((SquareClass::PlainBoundary, None));
            };
            let a = h.contains(fs.square_edge(sq, pairs.0));
            let b = h.contains(fs.square_edge(sq, pairs.1));
            match (a, b) {
                (true, false) => Some((SquareClass::Critical, Some(CriticalInfo { in_side: pairs.0, out_side: pairs.1 }))),
                (false, true) => Some((SquareClass::Critical, Some(CriticalInfo { in_side: pairs.1, out_side: pairs.0 }))),
                _ => Some((SquareClass::PlainBoundary, None)),
            }
        }
        _ => Some((SquareClass::Triple, None)),
    }
}

/// B(H) with square classification.
pub fn boundary_faces(grid: &Grid, h: &CycleCover) -> BoundarySet {
    let fs = grid.faces();
    let n = fs.len();
    let mut set = BoundarySet {
        faces: Vec::new(),
        member: vec![false; n],
        class: vec![None; fs.square_count()],
        critical: vec![None; fs.square_count()],
    };
    for f in 0..n {
        if fs.kind(f) == FaceKind::Square {
            if let Some((class, info)) = classify_square(grid, h, f) {
                set.member[f] = true;
                set.faces.push(f);
                set.class[f] = Some(class);
                set.critical[f] = info;
            }
        } else if is_boundary_face(grid, h, f) {
            set.member[f] = true;
            set.faces.push(f);
        }
    }
    set
}
