//! Doubled height functions on grid graphs, local square moves and rows.
//!
//! Across an edge oriented black to white, the face on the right is higher
//! than the face on the left exactly when the edge is in H. In the doubled
//! convention the step is `+1` or `-1`.
//!
//! With holes the doubled height is multivalued. A [`HeightFrame`] fixes a
//! branch: a base field for the reference cover, integrated over a spanning
//! tree of faces and boundary slots, plus the per-edge jump where the tree
//! closes up inconsistently. The relative height `tau_rel` of a cover
//! against the reference cover is always single valued; its values on holes
//! form the component signature.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::chain::Extremum;
use crate::cover::{find_initial_cover, BoundarySet, CycleCover};
use crate::error::{Error, Result};
use crate::grid::{Color, Dart, Dir, EdgeId, FaceId, Grid};

/// True when the face across `side` of square `sq` is higher than `sq`.
pub fn neighbor_higher(grid: &Grid, h: &CycleCover, sq: FaceId, side: Dir) -> bool {
    let fs = grid.faces();
    let e = fs.square_edge(sq, side);
    (fs.left(e) == sq) == h.contains(e)
}

/// Whether `next` (across `side` of `cur`) lies beyond `cur` in the sense
/// of `kind`: higher for maximal rows, lower for minimal ones.
fn beyond(grid: &Grid, h: &CycleCover, cur: FaceId, side: Dir, kind: Extremum) -> bool {
    neighbor_higher(grid, h, cur, side) == (kind == Extremum::Max)
}

pub fn higher_count(grid: &Grid, h: &CycleCover, sq: FaceId) -> usize {
    Dir::ALL.iter().filter(|&&d| neighbor_higher(grid, h, sq, d)).count()
}

/// `Max` if the square is higher than all four neighbours, `Min` if lower.
pub fn extremum_kind(grid: &Grid, h: &CycleCover, sq: FaceId) -> Option<Extremum> {
    match higher_count(grid, h, sq) {
        0 => Some(Extremum::Max),
        4 => Some(Extremum::Min),
        _ => None,
    }
}

/// Applies a Z-move in place after checking that the square is a local
/// extremum.
pub fn z_move(grid: &Grid, h: &mut CycleCover, sq: FaceId) -> Result<Extremum> {
    if !grid.faces().is_square(sq) {
        return Err(Error::NotExtremal(sq));
    }
    let kind = extremum_kind(grid, h, sq).ok_or(Error::NotExtremal(sq))?;
    h.toggle_square(grid, sq);
    Ok(kind)
}

pub fn z_transform(grid: &Grid, h: &CycleCover, sq: FaceId) -> Result<CycleCover> {
    let mut out = h.clone();
    z_move(grid, &mut out, sq)?;
    Ok(out)
}

/// Relative height `tau` with `d tau = omega_h - omega_ref` and
/// `tau(outer) = 0`, indexed by face id. Undoubled.
pub fn relative_heights(grid: &Grid, reference: &[bool], h: &CycleCover) -> Vec<i64> {
    let g = grid.graph();
    let fs = grid.faces();
    let mut tau = vec![i64::MIN; fs.len()];
    tau[fs.outer()] = 0;
    let mut queue = VecDeque::from([fs.outer()]);
    while let Some(f) = queue.pop_front() {
        for d in &fs.face(f).boundary {
            let e = d.edge();
            let step = h.contains(e) as i64 - reference[e] as i64;
            // Face f lies on the right of its darts.
            let (other, value) = if d.is_forward() {
                (fs.left(e), tau[f] - step)
            } else {
                (fs.right(e), tau[f] + step)
            };
            if tau[other] == i64::MIN {
                tau[other] = value;
                queue.push_back(other);
            } else {
                debug_assert_eq!(tau[other], value, "relative height is single valued");
            }
        }
    }
    debug_assert!(tau.iter().all(|&t| t != i64::MIN) || g.edge_count() == 0);
    tau
}

/// Hole values of the relative height against the frame's reference cover.
/// Two covers lie in the same component under square moves iff their
/// signatures agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentSignature(pub Vec<i64>);

impl ComponentSignature {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Branch data for doubled heights on one graph.
#[derive(Clone, Debug)]
pub struct HeightFrame {
    reference: CycleCover,
    /// Node of the face side of each dart: the square id, or a slot id for
    /// darts on holes and the outer face.
    node_of_dart: Vec<usize>,
    /// Doubled height of the reference cover on every node.
    base: Vec<i64>,
    /// `base(R) - base(L) - (2 omega_ref(e) - 1)`, zero off branch cuts.
    jump: Vec<i64>,
}

impl HeightFrame {
    /// Frame anchored at the canonical initial cover.
    pub fn new(grid: &Grid) -> Result<Self> {
        let reference = find_initial_cover(grid.graph())?;
        Ok(HeightFrame::with_reference(grid, reference))
    }

    pub fn with_reference(grid: &Grid, reference: CycleCover) -> Self {
        let g = grid.graph();
        let fs = grid.faces();
        let squares = fs.square_count();
        let mut node_of_dart = vec![usize::MAX; 2 * g.edge_count()];
        let mut nodes = squares;
        for f in 0..fs.len() {
            for &d in &fs.face(f).boundary {
                node_of_dart[d.0] = if fs.is_square(f) {
                    f
                } else {
                    nodes += 1;
                    nodes - 1
                };
            }
        }

        let r = |e: EdgeId| reference.contains(e) as i64;
        let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nodes];
        for e in 0..g.edge_count() {
            let (l, rt) = (node_of_dart[2 * e + 1], node_of_dart[2 * e]);
            let delta = 2 * r(e) - 1;
            adj[l].push((rt, delta));
            adj[rt].push((l, -delta));
        }
        // Slots of one face meeting at a vertex are linked with the offset
        // that closes the circulation around that vertex.
        let deficit = |v: usize| -> i64 {
            let s = if g.color_of(v) == Color::Black { -1 } else { 1 };
            -g.incident(v).iter().flatten().map(|&e| s * (2 * r(e) - 1)).sum::<i64>()
        };
        let designated = |v: usize| -> Option<Dir> {
            Dir::ALL
                .into_iter()
                .find(|&b| g.dart_from(v, b).is_some_and(|d| !fs.is_square(fs.dart_face(d))))
        };
        for f in squares..fs.len() {
            let ring = &fs.face(f).boundary;
            for i in 0..ring.len() {
                let (din, dout) = (ring[i], ring[(i + 1) % ring.len()]);
                let v = g.dart_head(din);
                let off = if designated(v) == Some(g.dart_dir(dout)) { deficit(v) } else { 0 };
                let (a, b) = (node_of_dart[din.0], node_of_dart[dout.0]);
                adj[a].push((b, off));
                adj[b].push((a, -off));
            }
        }

        let mut base = vec![i64::MIN; nodes];
        if let Some(&start) = fs.face(fs.outer()).boundary.first() {
            let root = node_of_dart[start.0];
            base[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &(w, delta) in &adj[u] {
                    if base[w] == i64::MIN {
                        base[w] = base[u] + delta;
                        queue.push_back(w);
                    }
                }
            }
        } else {
            base.iter_mut().for_each(|b| *b = 0);
        }
        let jump = (0..g.edge_count())
            .map(|e| base[node_of_dart[2 * e]] - base[node_of_dart[2 * e + 1]] - (2 * r(e) - 1))
            .collect();
        HeightFrame { reference, node_of_dart, base, jump }
    }

    pub fn reference(&self) -> &CycleCover {
        &self.reference
    }

    pub fn jump(&self, e: EdgeId) -> i64 {
        self.jump[e]
    }

    pub fn node_count(&self) -> usize {
        self.base.len()
    }

    pub fn node_of_dart(&self, d: Dart) -> usize {
        self.node_of_dart[d.0]
    }

    pub fn relative(&self, grid: &Grid, h: &CycleCover) -> Vec<i64> {
        relative_heights(grid, self.reference.in_h(), h)
    }

    pub fn signature(&self, grid: &Grid, h: &CycleCover) -> ComponentSignature {
        let tau = self.relative(grid, h);
        ComponentSignature(grid.faces().holes().map(|f| tau[f]).collect())
    }
}

/// Doubled height of a cover in a frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightField {
    /// Value on every frame node: squares first, then boundary slots.
    pub values: Vec<i64>,
    /// Doubled relative height on each hole.
    pub holes: Vec<i64>,
}

impl HeightField {
    pub fn square(&self, sq: FaceId) -> i64 {
        self.values[sq]
    }

    pub fn squares(&self, square_count: usize) -> &[i64] {
        &self.values[..square_count]
    }
}

pub fn height_of(grid: &Grid, frame: &HeightFrame, h: &CycleCover) -> HeightField {
    let fs = grid.faces();
    let tau = frame.relative(grid, h);
    let mut values = frame.base.clone();
    for f in 0..fs.len() {
        if fs.is_square(f) {
            values[f] += 2 * tau[f];
        } else {
            for &d in &fs.face(f).boundary {
                values[frame.node_of_dart(d)] += 2 * tau[f];
            }
        }
    }
    HeightField { values, holes: fs.holes().map(|f| 2 * tau[f]).collect() }
}

/// Outer boundary values of a frame, one per dart of the outer ring.
pub fn boundary_values(grid: &Grid, frame: &HeightFrame) -> Vec<i64> {
    let fs = grid.faces();
    fs.face(fs.outer()).boundary.iter().map(|&d| frame.base[frame.node_of_dart(d)]).collect()
}

/// `2 omega(e) - 1` read off a field, for every edge.
fn field_steps(grid: &Grid, frame: &HeightFrame, field: &HeightField) -> Vec<i64> {
    (0..grid.graph().edge_count())
        .map(|e| {
            field.values[frame.node_of_dart[2 * e]] - field.values[frame.node_of_dart[2 * e + 1]] - frame.jump[e]
        })
        .collect()
}

/// Rebuilds the cover a field came from.
pub fn cover_of_field(grid: &Grid, frame: &HeightFrame, field: &HeightField) -> Result<CycleCover> {
    let steps = field_steps(grid, frame, field);
    if steps.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidParams("field steps are not +-1".into()));
    }
    CycleCover::from_mask(grid.graph(), steps.iter().map(|&s| s == 1).collect())
}

/// Squares higher than every neighbour, and squares lower than every
/// neighbour.
pub fn local_extrema(grid: &Grid, frame: &HeightFrame, field: &HeightField) -> (Vec<FaceId>, Vec<FaceId>) {
    let fs = grid.faces();
    let steps = field_steps(grid, frame, field);
    let (mut maxima, mut minima) = (Vec::new(), Vec::new());
    for sq in 0..fs.square_count() {
        let mut higher = 0;
        for side in Dir::ALL {
            let e = fs.square_edge(sq, side);
            if (fs.left(e) == sq) == (steps[e] > 0) {
                higher += 1;
            }
        }
        match higher {
            0 => maxima.push(sq),
            4 => minima.push(sq),
            _ => {}
        }
    }
    (maxima, minima)
}

pub fn signature(grid: &Grid, frame: &HeightFrame, h: &CycleCover) -> ComponentSignature {
    frame.signature(grid, h)
}

/// A straight run of squares `f_0, ..., f_{r-1}` heading in `dir`, each
/// beyond the previous one. Lowering a maximal row (raising a minimal one)
/// applies Z-moves from the far end back to `f_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRef {
    pub squares: Vec<FaceId>,
    pub dir: Dir,
    pub kind: Extremum,
}

impl RowRef {
    pub fn start(&self) -> FaceId {
        self.squares[0]
    }

    pub fn last(&self) -> FaceId {
        *self.squares.last().expect("rows are nonempty")
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.squares.len() % 2 == 0
    }

    /// The same squares read from the far end, as they appear after the
    /// row has been moved.
    pub fn reversed(&self) -> RowRef {
        let mut squares = self.squares.clone();
        squares.reverse();
        let kind = match self.kind {
            Extremum::Max => Extremum::Min,
            Extremum::Min => Extremum::Max,
        };
        RowRef { squares, dir: self.dir.opposite(), kind }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowOutcome {
    Row(RowRef),
    /// The run is blocked by a hole, the outer face, or a boundary square
    /// lying beyond its last square.
    Stuck { blocker: FaceId },
}

/// Walks from `f0` in `dir` while the next face is a square lying beyond
/// the current one and `stop` does not hold for it. Returns the run and
/// the first face not taken.
fn walk(
    grid: &Grid,
    h: &CycleCover,
    f0: FaceId,
    dir: Dir,
    kind: Extremum,
    stop: impl Fn(FaceId) -> bool,
) -> (Vec<FaceId>, FaceId) {
    let fs = grid.faces();
    let mut run = vec![f0];
    let mut cur = f0;
    loop {
        let next = fs.across(cur, dir);
        if !fs.is_square(next) || stop(next) || !beyond(grid, h, cur, dir, kind) {
            return (run, next);
        }
        run.push(next);
        cur = next;
    }
}

/// The row beginning at a square that is higher (lower) than at least three
/// of its neighbours; `None` if the square is not of that form or the run
/// ends against a higher (lower) hole or outer face.
pub fn row_from(grid: &Grid, h: &CycleCover, f: FaceId) -> Option<RowRef> {
    let higher: Vec<Dir> = Dir::ALL.into_iter().filter(|&d| neighbor_higher(grid, h, f, d)).collect();
    let (kind, dir) = match higher.len() {
        0 => return Some(RowRef { squares: vec![f], dir: Dir::E, kind: Extremum::Max }),
        4 => return Some(RowRef { squares: vec![f], dir: Dir::E, kind: Extremum::Min }),
        1 => (Extremum::Max, higher[0]),
        3 => (Extremum::Min, Dir::ALL.into_iter().find(|d| !higher.contains(d)).expect("one lower side")),
        _ => return None,
    };
    let (squares, next) = walk(grid, h, f, dir, kind, |_| false);
    let last = *squares.last().expect("nonempty");
    if !grid.faces().is_square(next) && beyond(grid, h, last, dir, kind) {
        return None;
    }
    Some(RowRef { squares, dir, kind })
}

/// The row starting at a critical boundary square and running across its
/// pair edge outside H.
pub fn maximal_row_from(grid: &Grid, h: &CycleCover, f0: FaceId, boundary: &BoundarySet) -> RowOutcome {
    if let Some(kind) = extremum_kind(grid, h, f0) {
        return RowOutcome::Row(RowRef { squares: vec![f0], dir: Dir::E, kind });
    }
    let info = boundary.critical[f0].expect("critical square");
    let dir = info.out_side;
    let kind = if neighbor_higher(grid, h, f0, info.in_side) { Extremum::Min } else { Extremum::Max };
    let (squares, next) = walk(grid, h, f0, dir, kind, |f| boundary.contains(f));
    let last = *squares.last().expect("nonempty");
    if beyond(grid, h, last, dir, kind) {
        RowOutcome::Stuck { blocker: next }
    } else {
        RowOutcome::Row(RowRef { squares, dir, kind })
    }
}

/// Whether every Z-move of the row is legal when applied from the far end.
pub fn row_is_movable(grid: &Grid, h: &CycleCover, row: &RowRef) -> bool {
    let mut tmp = h.clone();
    apply_row(grid, &mut tmp, row).is_ok()
}

/// Moves a row in place. On failure `h` may be partially modified.
pub fn apply_row(grid: &Grid, h: &mut CycleCover, row: &RowRef) -> Result<()> {
    for &sq in row.squares.iter().rev() {
        match extremum_kind(grid, h, sq) {
            Some(k) if k == row.kind => h.toggle_square(grid, sq),
            _ => return Err(Error::RowInvalidated(row.start())),
        }
    }
    Ok(())
}

pub fn move_row(grid: &Grid, h: &CycleCover, row: &RowRef) -> Result<CycleCover> {
    let mut out = h.clone();
    apply_row(grid, &mut out, row)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::boundary_faces;

    fn setup(mask: &str) -> (Grid, HeightFrame) {
        let grid = Grid::parse(mask).unwrap();
        let frame = HeightFrame::new(&grid).unwrap();
        (grid, frame)
    }

    #[test]
    fn single_square_is_pinned() {
        let (grid, frame) = setup("##\n##");
        let h = frame.reference().clone();
        let field = height_of(&grid, &frame, &h);
        let (max, min) = local_extrema(&grid, &frame, &field);
        assert!(max.is_empty() && min.is_empty());
        assert_eq!(cover_of_field(&grid, &frame, &field).unwrap(), h);
        assert!(boundary_values(&grid, &frame).iter().all(|&b| (b - field.square(0)).abs() == 1));
    }

    #[test]
    fn polyomino_has_no_jumps() {
        let (grid, frame) = setup("##..\n####\n####\n..##");
        assert!((0..grid.graph().edge_count()).all(|e| frame.jump(e) == 0));
        let h = frame.reference().clone();
        let field = height_of(&grid, &frame, &h);
        let fs = grid.faces();
        for e in 0..grid.graph().edge_count() {
            let (l, r) = (fs.left(e), fs.right(e));
            if fs.is_square(l) && fs.is_square(r) {
                assert_eq!((field.square(l) - field.square(r)).abs(), 1);
            }
        }
    }

    #[test]
    fn z_move_changes_one_square_by_two() {
        let (grid, frame) = setup("####\n####\n####\n####");
        let h = frame.reference().clone();
        let before = height_of(&grid, &frame, &h);
        let sq = (0..grid.square_count()).find(|&s| extremum_kind(&grid, &h, s).is_some()).unwrap();
        let h2 = z_transform(&grid, &h, sq).unwrap();
        let after = height_of(&grid, &frame, &h2);
        for f in 0..grid.square_count() {
            let d = after.square(f) - before.square(f);
            assert_eq!(d.abs(), if f == sq { 2 } else { 0 });
        }
        assert_eq!((h2.p() as i64 - h.p() as i64).abs(), 1);
        assert_eq!(z_transform(&grid, &h2, sq).unwrap(), h);
        assert_eq!(cover_of_field(&grid, &frame, &after).unwrap(), h2);
    }

    #[test]
    fn non_extremal_move_is_rejected() {
        let (grid, frame) = setup("###\n###");
        let h = frame.reference().clone();
        assert_eq!(z_transform(&grid, &h, 0), Err(Error::NotExtremal(0)));
    }

    #[test]
    fn ring_signature_is_trivial() {
        let (grid, frame) = setup("####\n#..#\n#..#\n####");
        let h = frame.reference().clone();
        assert_eq!(frame.signature(&grid, &h), ComponentSignature(vec![0]));
        let field = height_of(&grid, &frame, &h);
        assert_eq!(cover_of_field(&grid, &frame, &field).unwrap(), h);
    }

    #[test]
    fn rows_reverse_after_moving() {
        let (grid, frame) = setup("######\n######\n######\n######");
        let h = frame.reference().clone();
        for f in 0..grid.square_count() {
            if let Some(row) = row_from(&grid, &h, f) {
                if let Ok(h2) = move_row(&grid, &h, &row) {
                    let back = row_from(&grid, &h2, row.last()).unwrap();
                    assert_eq!(back.squares, row.reversed().squares);
                    assert_eq!(move_row(&grid, &h2, &back).unwrap(), h);
                }
            }
        }
    }

    #[test]
    fn critical_rows_on_stacked_cycles() {
        // Two 2x2 cycles side by side in a 2x4 block; the middle square is
        // a boundary square and a local extremum.
        let (grid, _) = setup("####\n####");
        let g = grid.graph();
        let mut h = find_initial_cover(g).unwrap();
        h.toggle_square(&grid, 1);
        let b = boundary_faces(&grid, &h);
        assert!(extremum_kind(&grid, &h, 1).is_some());
        let RowOutcome::Row(row) = maximal_row_from(&grid, &h, 1, &b) else { panic!() };
        assert_eq!(row.len(), 1);
    }
}
