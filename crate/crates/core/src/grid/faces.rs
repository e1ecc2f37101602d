use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Dart, Dir, EdgeId, FaceId, GridGraph, LatticePoint, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaceKind {
    Square,
    Hole,
    Outer,
}

#[derive(Clone, Debug)]
pub struct Face {
    pub kind: FaceKind,
    /// South-west corner of the unit cell, for squares.
    pub cell: Option<LatticePoint>,
    /// Boundary darts in traversal order, face on the right of each dart.
    /// Bounded faces therefore run clockwise.
    pub boundary: Vec<Dart>,
}

/// Faces of a connected grid graph.
///
/// Face ids: squares first in row-major order of their cells, then holes,
/// then the outer face.
#[derive(Clone, Debug)]
pub struct FaceStructure {
    faces: Vec<Face>,
    square_count: usize,
    outer: FaceId,
    dart_face: Vec<FaceId>,
    square_at: HashMap<LatticePoint, FaceId>,
    /// Sides of each square indexed by [`Dir::index`].
    square_edges: Vec<[EdgeId; 4]>,
    /// Corners of each square: SW, SE, NE, NW.
    square_corners: Vec<[VertexId; 4]>,
}

impl FaceStructure {
    pub fn build(g: &GridGraph) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::NotConnected);
        }
        let ndarts = 2 * g.edge_count();
        let next = |d: Dart| -> Dart {
            let v = g.dart_head(d);
            let back = g.dart_dir(d).opposite();
            let mut dir = back.ccw();
            loop {
                if let Some(n) = g.dart_from(v, dir) {
                    return n;
                }
                dir = dir.ccw();
            }
        };

        let mut orbit_of = vec![usize::MAX; ndarts];
        let mut orbits: Vec<Vec<Dart>> = Vec::new();
        for start in 0..ndarts {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut ring = Vec::new();
            let mut d = Dart(start);
            loop {
                orbit_of[d.0] = id;
                ring.push(d);
                d = next(d);
                if d.0 == start {
                    break;
                }
            }
            orbits.push(ring);
        }

        // Twice the signed area; negative for clockwise rings.
        let area2 = |ring: &[Dart]| -> i64 {
            let mut s = 0i64;
            for (i, &d) in ring.iter().enumerate() {
                let a = g.point(g.dart_tail(d));
                let b = g.point(g.dart_tail(ring[(i + 1) % ring.len()]));
                s += a.x as i64 * b.y as i64 - b.x as i64 * a.y as i64;
            }
            s
        };

        let areas: Vec<i64> = orbits.iter().map(|r| area2(r)).collect();
        let outer_orbit = (0..orbits.len()).max_by_key(|&i| (areas[i], std::cmp::Reverse(i)));

        let mut squares: Vec<(LatticePoint, usize)> = Vec::new();
        let mut holes: Vec<((i32, i32), usize)> = Vec::new();
        for (i, ring) in orbits.iter().enumerate() {
            if Some(i) == outer_orbit {
                continue;
            }
            let least = ring
                .iter()
                .map(|&d| g.point(g.dart_tail(d)))
                .min_by_key(|p| (p.x, p.y))
                .expect("nonempty ring");
            if ring.len() == 4 && areas[i] == -2 {
                squares.push((least, i));
            } else {
                let top = ring
                    .iter()
                    .map(|&d| g.point(g.dart_tail(d)).row_major_key())
                    .min()
                    .expect("nonempty ring");
                holes.push((top, i));
            }
        }
        squares.sort_by_key(|(c, _)| c.row_major_key());
        holes.sort();

        let mut faces = Vec::with_capacity(orbits.len().max(1));
        let mut dart_face = vec![0; ndarts];
        let mut square_at = HashMap::new();
        let mut square_edges = Vec::with_capacity(squares.len());
        let mut square_corners = Vec::with_capacity(squares.len());
        let mut push = |faces: &mut Vec<Face>, kind, cell, orbit: usize| {
            let id = faces.len();
            let ring = canonical_ring(g, &orbits[orbit]);
            for d in &ring {
                dart_face[d.0] = id;
            }
            faces.push(Face { kind, cell, boundary: ring });
            id
        };
        for &(cell, orbit) in &squares {
            let id = push(&mut faces, FaceKind::Square, Some(cell), orbit);
            square_at.insert(cell, id);
            let at = |dx, dy| g.vertex_at(LatticePoint::new(cell.x + dx, cell.y + dy)).expect("corner");
            let (sw, se, ne, nw) = (at(0, 0), at(1, 0), at(1, 1), at(0, 1));
            let e = |a, b| g.edge_between(a, b).expect("side");
            square_edges.push([e(se, ne), e(nw, ne), e(sw, nw), e(sw, se)]);
            square_corners.push([sw, se, ne, nw]);
        }
        for &(_, orbit) in &holes {
            push(&mut faces, FaceKind::Hole, None, orbit);
        }
        let outer = match outer_orbit {
            Some(o) => push(&mut faces, FaceKind::Outer, None, o),
            None => {
                faces.push(Face { kind: FaceKind::Outer, cell: None, boundary: Vec::new() });
                faces.len() - 1
            }
        };

        let fs = FaceStructure {
            faces,
            square_count: squares.len(),
            outer,
            dart_face,
            square_at,
            square_edges,
            square_corners,
        };
        let euler = g.vertex_count() as i64 - g.edge_count() as i64 + fs.faces.len() as i64;
        debug_assert_eq!(euler, 2, "Euler relation");
        Ok(fs)
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f]
    }

    pub fn kind(&self, f: FaceId) -> FaceKind {
        self.faces[f].kind
    }

    pub fn is_square(&self, f: FaceId) -> bool {
        f < self.square_count
    }

    pub fn square_count(&self) -> usize {
        self.square_count
    }

    pub fn hole_count(&self) -> usize {
        self.outer - self.square_count
    }

    pub fn holes(&self) -> std::ops::Range<FaceId> {
        self.square_count..self.outer
    }

    pub fn outer(&self) -> FaceId {
        self.outer
    }

    pub fn dart_face(&self, d: Dart) -> FaceId {
        self.dart_face[d.0]
    }

    /// Face on the right of the edge oriented black to white.
    pub fn right(&self, e: EdgeId) -> FaceId {
        self.dart_face[2 * e]
    }

    /// Face on the left of the edge oriented black to white.
    pub fn left(&self, e: EdgeId) -> FaceId {
        self.dart_face[2 * e + 1]
    }

    pub fn other_face(&self, e: EdgeId, f: FaceId) -> FaceId {
        let (l, r) = (self.left(e), self.right(e));
        if l == f {
            r
        } else {
            l
        }
    }

    pub fn square_at(&self, cell: LatticePoint) -> Option<FaceId> {
        self.square_at.get(&cell).copied()
    }

    pub fn cell(&self, sq: FaceId) -> LatticePoint {
        self.faces[sq].cell.expect("square face")
    }

    pub fn square_edge(&self, sq: FaceId, side: Dir) -> EdgeId {
        self.square_edges[sq][side.index()]
    }

    pub fn square_edges(&self, sq: FaceId) -> &[EdgeId; 4] {
        &self.square_edges[sq]
    }

    /// SW, SE, NE, NW.
    pub fn square_corners(&self, sq: FaceId) -> &[VertexId; 4] {
        &self.square_corners[sq]
    }

    /// Face across the given side of a square.
    pub fn across(&self, sq: FaceId, side: Dir) -> FaceId {
        self.other_face(self.square_edge(sq, side), sq)
    }

    /// Edges bordering a face, each once.
    pub fn face_edges(&self, f: FaceId) -> Vec<EdgeId> {
        let mut es: Vec<EdgeId> = self.faces[f].boundary.iter().map(|d| d.edge()).collect();
        es.sort_unstable();
        es.dedup();
        es
    }
}

/// Rotates a ring to start at its lexicographically least tail vertex,
/// leaving it by the first direction in E, N, W, S order.
fn canonical_ring(g: &GridGraph, ring: &[Dart]) -> Vec<Dart> {
    let key = |d: Dart| {
        let p = g.point(g.dart_tail(d));
        (p.x, p.y, g.dart_dir(d).index())
    };
    let start = (0..ring.len()).min_by_key(|&i| key(ring[i])).unwrap_or(0);
    ring[start..].iter().chain(&ring[..start]).copied().collect()
}
