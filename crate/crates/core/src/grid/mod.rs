//! Grid graphs: induced subgraphs of the square lattice.
//!
//! Vertices are numbered row-major, top row first (largest `y`), left to
//! right within a row. Edges are numbered by scanning the vertices in that
//! order and emitting the east edge before the south edge of each vertex.

mod faces;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use faces::{Face, FaceKind, FaceStructure};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i32,
    pub y: i32,
}

impl LatticePoint {
    pub const fn new(x: i32, y: i32) -> Self {
        LatticePoint { x, y }
    }

    pub fn step(self, dir: Dir) -> Self {
        let (dx, dy) = dir.delta();
        LatticePoint::new(self.x + dx, self.y + dy)
    }

    pub fn color(self) -> Color {
        color(self)
    }

    /// Sort key for row-major order with the top row first.
    pub(crate) fn row_major_key(self) -> (i32, i32) {
        (-self.y, self.x)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

/// Black iff `x + y` is even.
pub fn color(p: LatticePoint) -> Color {
    if (p.x + p.y).rem_euclid(2) == 0 {
        Color::Black
    } else {
        Color::White
    }
}

/// Lattice directions in counter-clockwise order starting from east.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    E,
    N,
    W,
    S,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::E, Dir::N, Dir::W, Dir::S];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Dir {
        Dir::ALL[i % 4]
    }

    pub fn delta(self) -> (i32, i32) {
        match self {
            Dir::E => (1, 0),
            Dir::N => (0, 1),
            Dir::W => (-1, 0),
            Dir::S => (0, -1),
        }
    }

    pub fn opposite(self) -> Dir {
        Dir::from_index(self.index() + 2)
    }

    pub fn ccw(self) -> Dir {
        Dir::from_index(self.index() + 1)
    }

    pub fn cw(self) -> Dir {
        Dir::from_index(self.index() + 3)
    }

    fn between(from: LatticePoint, to: LatticePoint) -> Option<Dir> {
        match (to.x - from.x, to.y - from.y) {
            (1, 0) => Some(Dir::E),
            (0, 1) => Some(Dir::N),
            (-1, 0) => Some(Dir::W),
            (0, -1) => Some(Dir::S),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    /// West endpoint of a horizontal edge, top endpoint of a vertical one.
    pub u: VertexId,
    pub v: VertexId,
    pub black: VertexId,
    pub white: VertexId,
    pub horizontal: bool,
}

impl Edge {
    pub fn other(&self, w: VertexId) -> VertexId {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// An oriented edge. `2e` runs black to white, `2e + 1` white to black.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart(pub usize);

impl Dart {
    pub fn forward(e: EdgeId) -> Dart {
        Dart(2 * e)
    }

    pub fn backward(e: EdgeId) -> Dart {
        Dart(2 * e + 1)
    }

    pub fn edge(self) -> EdgeId {
        self.0 / 2
    }

    /// True when the dart runs black to white.
    pub fn is_forward(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn reverse(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

#[derive(Clone, Debug)]
pub struct GridGraph {
    points: Vec<LatticePoint>,
    index: HashMap<LatticePoint, VertexId>,
    edges: Vec<Edge>,
    incident: Vec<[Option<EdgeId>; 4]>,
    connected: bool,
}

impl PartialEq for GridGraph {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl Eq for GridGraph {}

impl GridGraph {
    pub fn from_points<I: IntoIterator<Item = LatticePoint>>(points: I) -> Result<Self> {
        let mut points: Vec<LatticePoint> = points.into_iter().collect();
        points.sort_by_key(|p| p.row_major_key());
        points.dedup();
        if points.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let index: HashMap<LatticePoint, VertexId> =
            points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut edges = Vec::new();
        let mut incident = vec![[None; 4]; points.len()];
        for (u, &p) in points.iter().enumerate() {
            for (dir, horizontal) in [(Dir::E, true), (Dir::S, false)] {
                if let Some(&v) = index.get(&p.step(dir)) {
                    let (black, white) = if color(p) == Color::Black { (u, v) } else { (v, u) };
                    let e = edges.len();
                    edges.push(Edge { u, v, black, white, horizontal });
                    incident[u][dir.index()] = Some(e);
                    incident[v][dir.opposite().index()] = Some(e);
                }
            }
        }
        let mut g = GridGraph { points, index, edges, incident, connected: false };
        g.connected = g.component_count() == 1;
        Ok(g)
    }

    /// Parses the mask format: `#` is a vertex, `.` or space is empty, lines
    /// starting with `;` are comments, and the first row is the top row.
    pub fn parse_mask(text: &str) -> Result<Self> {
        let rows: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.starts_with(';'))
            .collect();
        let n = rows.len() as i32;
        let mut points = Vec::new();
        for (i, (lineno, line)) in rows.iter().enumerate() {
            let y = n - 1 - i as i32;
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '#' => points.push(LatticePoint::new(col as i32, y)),
                    '.' | ' ' => {}
                    found => {
                        return Err(Error::Parse { line: lineno + 1, column: col + 1, found });
                    }
                }
            }
        }
        GridGraph::from_points(points)
    }

    /// Renders the bounding box of the vertex set as a mask, one `\n`
    /// terminated line per row.
    pub fn to_mask(&self) -> String {
        let (lo, hi) = self.bounding_box();
        let mut out = String::new();
        for y in (lo.y..=hi.y).rev() {
            for x in lo.x..=hi.x {
                out.push(if self.index.contains_key(&LatticePoint::new(x, y)) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    /// Translated copy whose bounding box starts at the origin.
    pub fn normalized(&self) -> GridGraph {
        let (lo, _) = self.bounding_box();
        GridGraph::from_points(self.points.iter().map(|p| LatticePoint::new(p.x - lo.x, p.y - lo.y)))
            .expect("nonempty")
    }

    pub fn bounding_box(&self) -> (LatticePoint, LatticePoint) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn point(&self, v: VertexId) -> LatticePoint {
        self.points[v]
    }

    pub fn vertex_at(&self, p: LatticePoint) -> Option<VertexId> {
        self.index.get(&p).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    /// Incident edges indexed by [`Dir::index`].
    pub fn incident(&self, v: VertexId) -> &[Option<EdgeId>; 4] {
        &self.incident[v]
    }

    pub fn edge_toward(&self, v: VertexId, dir: Dir) -> Option<EdgeId> {
        self.incident[v][dir.index()]
    }

    pub fn neighbor(&self, v: VertexId, dir: Dir) -> Option<VertexId> {
        self.incident[v][dir.index()].map(|e| self.edges[e].other(v))
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.incident[v].iter().flatten().map(move |&e| self.edges[e].other(v))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident[v].iter().flatten().count()
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let dir = Dir::between(self.points[a], self.points[b])?;
        self.edge_toward(a, dir)
    }

    pub fn color_of(&self, v: VertexId) -> Color {
        color(self.points[v])
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn dart_tail(&self, d: Dart) -> VertexId {
        let e = &self.edges[d.edge()];
        if d.is_forward() {
            e.black
        } else {
            e.white
        }
    }

    pub fn dart_head(&self, d: Dart) -> VertexId {
        self.dart_tail(d.reverse())
    }

    pub fn dart_dir(&self, d: Dart) -> Dir {
        Dir::between(self.points[self.dart_tail(d)], self.points[self.dart_head(d)])
            .expect("darts join lattice neighbours")
    }

    /// The dart leaving `v` in direction `dir`, if that edge exists.
    pub fn dart_from(&self, v: VertexId, dir: Dir) -> Option<Dart> {
        let e = self.edge_toward(v, dir)?;
        Some(if self.edges[e].black == v { Dart::forward(e) } else { Dart::backward(e) })
    }

    fn component_count(&self) -> usize {
        let n = self.points.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// True iff the graph is connected, has at least three vertices and no
    /// cut vertex.
    pub fn is_two_connected(&self) -> bool {
        let n = self.points.len();
        if n < 3 || !self.connected {
            return false;
        }
        // Iterative Hopcroft-Tarjan articulation point search.
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0;
        let mut stack: Vec<(VertexId, usize, usize)> = vec![(0, usize::MAX, 0)];
        disc[0] = 0;
        low[0] = 0;
        timer += 1;
        let mut root_children = 0;
        while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
            if *next < 4 {
                let slot = *next;
                *next += 1;
                let Some(w) = self.incident[v][slot].map(|e| self.edges[e].other(v)) else {
                    continue;
                };
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    if v == 0 {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if parent != 0 && low[v] >= disc[parent] {
                        return false;
                    }
                }
            }
        }
        root_children < 2
    }
}

pub fn parse_grid(mask: &str) -> Result<GridGraph> {
    GridGraph::parse_mask(mask)
}

pub fn check_two_connected(g: &GridGraph) -> bool {
    g.is_two_connected()
}

/// A connected grid graph together with its planar face structure.
#[derive(Clone, Debug)]
pub struct Grid {
    graph: GridGraph,
    faces: FaceStructure,
}

impl Grid {
    pub fn new(graph: GridGraph) -> Result<Self> {
        let faces = FaceStructure::build(&graph)?;
        Ok(Grid { graph, faces })
    }

    pub fn parse(mask: &str) -> Result<Self> {
        Grid::new(GridGraph::parse_mask(mask)?)
    }

    pub fn graph(&self) -> &GridGraph {
        &self.graph
    }

    pub fn faces(&self) -> &FaceStructure {
        &self.faces
    }

    pub fn square_count(&self) -> usize {
        self.faces.square_count()
    }

    pub fn hole_count(&self) -> usize {
        self.faces.hole_count()
    }
}

pub fn build_faces(g: &GridGraph) -> Result<FaceStructure> {
    FaceStructure::build(g)
}
