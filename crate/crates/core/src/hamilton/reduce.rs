//! One cycle-reduction step: extremal boundary squares first, then rows
//! from critical squares. Even rows become bridges that split a cycle and
//! open a subordinate boundary; the first odd row (the half bridge) is
//! consumed together with one end of every bridge.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::chain::Extremum;
use crate::cover::{boundary_faces, BoundarySet, CycleCover, SquareClass};
use crate::grid::{Dir, FaceId, Grid, VertexId};
use crate::height::{apply_row, extremum_kind, maximal_row_from, RowOutcome, RowRef};

use super::certificate::{CriticalStatus, FixedPair, MinCycleCertificate};

fn flip(kind: Extremum) -> Extremum {
    match kind {
        Extremum::Max => Extremum::Min,
        Extremum::Min => Extremum::Max,
    }
}

/// A row `f_0..f_{r-1}` of even length whose last square has been moved:
/// `f_0..f_{r-2}` is an odd row of `kind` and `f_{r-1}` a single square of
/// the opposite kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bridge {
    pub squares: Vec<FaceId>,
    pub dir: Dir,
    pub kind: Extremum,
    /// Boundary holding `f_0`.
    pub parent: usize,
    /// Boundary opened at `f_{r-1}`.
    pub child: usize,
}

impl Bridge {
    pub fn odd_part(&self) -> RowRef {
        RowRef { squares: self.squares[..self.squares.len() - 1].to_vec(), dir: self.dir, kind: self.kind }
    }

    pub fn end_part(&self) -> RowRef {
        RowRef { squares: vec![*self.squares.last().expect("bridges are nonempty")], dir: self.dir, kind: flip(self.kind) }
    }

    /// The two squares outside the bridge on its axis, with the bridge end
    /// each touches and the direction pointing away from the bridge.
    fn beyond_ends(&self, grid: &Grid) -> [(FaceId, FaceId, Dir); 2] {
        let fs = grid.faces();
        let first = self.squares[0];
        let last = *self.squares.last().expect("nonempty");
        let back = self.dir.opposite();
        [(fs.across(first, back), first, back), (fs.across(last, self.dir), last, self.dir)]
    }
}

/// Descent of cycles during one reduction. Cycles only split while bridges
/// are built, so every current cycle is a leaf of a forest whose roots are
/// the cycles present at the start.
struct Lineage {
    parent: Vec<Option<usize>>,
    /// Boundary opened when the node was split.
    split: Vec<Option<usize>>,
    leaf: Vec<usize>,
}

impl Lineage {
    fn new(h: &CycleCover, vertices: usize) -> Self {
        let mut node_of: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut leaf = Vec::with_capacity(vertices);
        for v in 0..vertices {
            let next = node_of.len();
            leaf.push(*node_of.entry(h.cycle_of(v)).or_insert(next));
        }
        let n = node_of.len();
        Lineage { parent: vec![None; n], split: vec![None; n], leaf }
    }

    fn ancestors(&self, mut x: usize) -> Vec<usize> {
        let mut out = vec![x];
        while let Some(p) = self.parent[x] {
            out.push(p);
            x = p;
        }
        out
    }

    /// Records that the cycle through `v` was just split in `h`.
    fn split_at(&mut self, h: &CycleCover, v: VertexId, boundary: usize) {
        let x = self.leaf[v];
        let (a, b) = (self.parent.len(), self.parent.len() + 1);
        self.parent.extend([Some(x), Some(x)]);
        self.split.extend([None, None]);
        self.split[x] = Some(boundary);
        let side = h.cycle_of(v);
        for u in 0..self.leaf.len() {
            if self.leaf[u] == x {
                self.leaf[u] = if h.cycle_of(u) == side { a } else { b };
            }
        }
    }
}

#[derive(Clone, Debug)]
struct BoundaryNode {
    /// Bridge that opened this boundary; `None` for the boundaries present
    /// at the start.
    opened_by: Option<usize>,
}

#[derive(Default)]
struct Forest {
    nodes: Vec<BoundaryNode>,
    roots: BTreeMap<(usize, usize), usize>,
}

impl Forest {
    fn open(&mut self, bridge: usize) -> usize {
        self.nodes.push(BoundaryNode { opened_by: Some(bridge) });
        self.nodes.len() - 1
    }

    /// Boundary separating the cycles with lineage leaves `a` and `b`.
    fn between(&mut self, lin: &Lineage, a: usize, b: usize) -> usize {
        let up_a = lin.ancestors(a);
        let up_b = lin.ancestors(b);
        if let Some(&z) = up_b.iter().find(|z| up_a.contains(z)) {
            return lin.split[z].expect("a split node records its boundary");
        }
        let ra = *up_a.last().expect("nonempty");
        let rb = *up_b.last().expect("nonempty");
        let key = (ra.min(rb), ra.max(rb));
        let next = self.nodes.len();
        *self.roots.entry(key).or_insert_with(|| {
            self.nodes.push(BoundaryNode { opened_by: None });
            next
        })
    }

    /// Bridges on the path from boundary `k` up to its root.
    fn root_path(&self, bridges: &[Bridge], mut k: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(j) = self.nodes[k].opened_by {
            out.push(j);
            k = bridges[j].parent;
        }
        out
    }
}

/// What happened inside one call.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceTrace {
    pub bridges: usize,
    pub stuck: usize,
    /// First square of the half bridge that was used.
    pub half_bridge: Option<FaceId>,
    pub half_bridge_len: usize,
    pub substitution: bool,
    pub triple_rule: bool,
    /// Moves were disjoint and pairwise non-adjacent.
    pub lemma_holds: bool,
    /// The boundary set before the bridges was recovered after consuming
    /// them.
    pub restored: bool,
    /// Half-bridge candidates whose plan failed a check, with the reason.
    pub violations: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum ReduceOutcome {
    Reduced { cover: CycleCover, trace: ReduceTrace },
    Minimal { cover: CycleCover, certificate: MinCycleCertificate, trace: ReduceTrace },
}

enum Plan {
    Half(RowRef, bool),
    Bridge(RowRef),
}

struct State<'a> {
    grid: &'a Grid,
    start: CycleCover,
    cur: CycleCover,
    original: Vec<FaceId>,
    lin: Lineage,
    forest: Forest,
    bridges: Vec<Bridge>,
    in_bridge: Vec<bool>,
    stuck: BTreeMap<FaceId, FaceId>,
    rejected: BTreeSet<FaceId>,
    trace: ReduceTrace,
}

impl<'a> State<'a> {
    /// Boundary holding square `sq`, if its corners meet exactly two cycles.
    fn boundary_of(&mut self, sq: FaceId) -> Option<usize> {
        let corners = self.grid.faces().square_corners(sq);
        let mut leaves: Vec<usize> = corners.iter().map(|&v| self.lin.leaf[v]).collect();
        leaves.sort_unstable();
        leaves.dedup();
        match leaves[..] {
            [a, b] => Some(self.forest.between(&self.lin, a, b)),
            _ => None,
        }
    }

    fn usable_extremum(&self, bs: &BoundarySet, sq: FaceId) -> Option<Extremum> {
        let fs = self.grid.faces();
        if !fs.is_square(sq) || self.in_bridge[sq] || self.rejected.contains(&sq) || !bs.contains(sq) {
            return None;
        }
        extremum_kind(self.grid, &self.cur, sq)
    }

    fn single(&self, sq: FaceId, kind: Extremum) -> RowRef {
        RowRef { squares: vec![sq], dir: Dir::E, kind }
    }

    /// The lateral square to use instead when `target` sits just past the
    /// end of an existing bridge.
    fn substitute(&mut self, bs: &BoundarySet, target: FaceId) -> Option<Option<RowRef>> {
        let fs = self.grid.faces();
        let (g, d) = self.bridges.iter().find_map(|br| {
            br.beyond_ends(self.grid).into_iter().find(|&(x, _, _)| x == target).map(|(_, g, d)| (g, d))
        })?;
        let lateral: Vec<(FaceId, FaceId)> = [d.ccw(), d.cw()]
            .into_iter()
            .map(|s| fs.across(g, s))
            .map(|x| (x, if fs.is_square(x) { fs.across(x, d) } else { fs.outer() }))
            .collect();
        let pair_bridge = |x: FaceId, y: FaceId| {
            self.bridges.iter().any(|br| br.squares.len() == 2 && br.squares.contains(&x) && br.squares.contains(&y))
        };
        let starts_at = |y: FaceId| self.bridges.iter().position(|br| br.squares[0] == y);
        let [(a, a1), (b, b1)] = [lateral[0], lateral[1]];
        let pa = fs.is_square(a) && pair_bridge(a, a1);
        let pb = fs.is_square(b) && pair_bridge(b, b1);
        let choice = match (pa, pb) {
            (true, false) => Some(b),
            (false, true) => Some(a),
            (true, true) => None,
            (false, false) => match (starts_at(a1), starts_at(b1)) {
                (None, _) => Some(a),
                (Some(_), None) => Some(b),
                (Some(ja), Some(jb)) => {
                    // Use the side whose neighbouring bridge is not consumed
                    // at its starting square.
                    let mut pick = None;
                    for (x, j) in [(a, ja), (b, jb)] {
                        if let Some(k) = fs.is_square(x).then(|| self.boundary_of(x)).flatten() {
                            if !self.forest.root_path(&self.bridges, k).contains(&j) {
                                pick = Some(x);
                                break;
                            }
                        }
                    }
                    pick
                }
            },
        };
        Some(choice.and_then(|x| self.usable_extremum(bs, x).map(|k| self.single(x, k))))
    }

    /// Applies the substitution rule to a candidate row.
    fn with_rule(&mut self, bs: &BoundarySet, plan: Plan) -> Plan {
        let ends: Vec<FaceId> = match &plan {
            Plan::Half(row, _) => vec![row.start(), row.last()],
            Plan::Bridge(row) => vec![row.start()],
        };
        for t in ends {
            match self.substitute(bs, t) {
                Some(Some(row)) => return Plan::Half(row, true),
                Some(None) => self.trace.violations.push(format!("no lateral substitute next to square {t}")),
                None => {}
            }
        }
        plan
    }

    fn select(&mut self, bs: &BoundarySet, pending: Option<FaceId>) -> Option<Plan> {
        if let Some(f) = pending {
            if let Some(k) = self.usable_extremum(bs, f) {
                self.trace.triple_rule = true;
                return Some(Plan::Half(self.single(f, k), false));
            }
            self.trace.violations.push(format!("square {f} next to a triple square is not extremal"));
        }
        let squares: Vec<FaceId> = bs.squares().collect();
        for &f in &squares {
            if let Some(k) = self.usable_extremum(bs, f) {
                let plan = Plan::Half(self.single(f, k), false);
                return Some(self.with_rule(bs, plan));
            }
        }
        for &f in &squares {
            if bs.critical[f].is_none() || self.in_bridge[f] || self.stuck.contains_key(&f) || self.rejected.contains(&f) {
                continue;
            }
            match maximal_row_from(self.grid, &self.cur, f, bs) {
                RowOutcome::Stuck { blocker } => {
                    self.stuck.insert(f, blocker);
                    self.trace.stuck += 1;
                }
                RowOutcome::Row(row) => {
                    let plan = if row.is_even() { Plan::Bridge(row) } else { Plan::Half(row, false) };
                    return Some(self.with_rule(bs, plan));
                }
            }
        }
        None
    }

    /// Moves the last square of an even row, opening a new boundary.
    /// Returns the square singled out by the triple rule, if any.
    fn build_bridge(&mut self, row: RowRef) -> Option<FaceId> {
        let grid = self.grid;
        let parent = self.boundary_of(row.start()).expect("critical squares meet two cycles");
        let top = row.last();
        let mut tmp = self.cur.clone();
        let moved = apply_row(grid, &mut tmp, &RowRef { squares: vec![top], dir: row.dir, kind: row.kind });
        debug_assert!(moved.is_ok());
        self.cur = tmp;
        let j = self.bridges.len();
        let child = self.forest.open(j);
        let corner = grid.faces().square_corners(top)[0];
        self.lin.split_at(&self.cur, corner, child);
        for &s in &row.squares {
            self.in_bridge[s] = true;
        }
        self.bridges.push(Bridge { squares: row.squares, dir: row.dir, kind: row.kind, parent, child });
        self.trace.bridges += 1;
        self.triple_neighbor()
    }

    /// For a square meeting three or more cycles, the square across a side
    /// whose two corners are each alone in their cycle.
    fn triple_neighbor(&self) -> Option<FaceId> {
        let fs = self.grid.faces();
        for sq in 0..fs.square_count() {
            let c = fs.square_corners(sq);
            let ids = c.map(|v| self.cur.cycle_of(v));
            let mut distinct = ids.to_vec();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 3 {
                continue;
            }
            let alone = |i: usize| ids.iter().filter(|&&x| x == ids[i]).count() == 1;
            // Corner order SW, SE, NE, NW; side i joins corners i and i+1.
            const SIDES: [Dir; 4] = [Dir::S, Dir::E, Dir::N, Dir::W];
            for (i, &side) in SIDES.iter().enumerate() {
                if alone(i) && alone((i + 1) % 4) {
                    let f = fs.across(sq, side);
                    if fs.is_square(f) && extremum_kind(self.grid, &self.cur, f).is_some() {
                        return Some(f);
                    }
                }
            }
        }
        None
    }

    /// Consumes the half bridge and one end of every bridge. Every check
    /// failure is reported as an error and leaves the state untouched.
    fn unwind(&mut self, half: &RowRef) -> Result<CycleCover, String> {
        let k = self.boundary_of(half.start()).ok_or("half bridge does not separate two cycles")?;
        let path = self.forest.root_path(&self.bridges, k);
        // (boundary joined, move)
        let mut moves: Vec<(usize, RowRef)> = vec![(k, half.clone())];
        for (j, br) in self.bridges.iter().enumerate() {
            if path.contains(&j) {
                moves.push((br.parent, br.odd_part()));
            } else {
                moves.push((br.child, br.end_part()));
            }
        }
        let mut joined: Vec<usize> = moves.iter().map(|m| m.0).collect();
        joined.sort_unstable();
        joined.dedup();
        if joined.len() != moves.len() {
            return Err("two moves join across the same boundary".into());
        }
        self.check_lemma(&moves)?;
        // New boundaries in reverse order of creation, the root last.
        let rank = |b: usize| match self.forest.nodes[b].opened_by {
            Some(j) => j as i64,
            None => -1,
        };
        moves.sort_by_key(|m| std::cmp::Reverse(rank(m.0)));
        let mut h = self.cur.clone();
        for (i, (b, row)) in moves.iter().enumerate() {
            if rank(*b) < 0 && i + 1 != moves.len() {
                return Err("more than one root boundary joined".into());
            }
            if rank(*b) < 0 {
                let now = boundary_faces(self.grid, &h).faces;
                if now != self.original {
                    return Err("boundary set not restored before the root join".into());
                }
                self.trace.restored = true;
            }
            let before = h.p();
            apply_row(self.grid, &mut h, row).map_err(|_| format!("move at square {} is not legal", row.start()))?;
            if h.p() + 1 != before {
                return Err(format!("move at square {} did not join two cycles", row.start()));
            }
        }
        if h.p() + 1 != self.start.p() {
            return Err("cycle count did not drop by one".into());
        }
        Ok(h)
    }

    fn check_lemma(&self, moves: &[(usize, RowRef)]) -> Result<(), String> {
        let fs = self.grid.faces();
        let mut owner: BTreeMap<FaceId, usize> = BTreeMap::new();
        for (i, (_, row)) in moves.iter().enumerate() {
            for &s in &row.squares {
                if owner.insert(s, i).is_some() {
                    return Err(format!("square {s} lies in two moves"));
                }
            }
        }
        for (&s, &i) in &owner {
            for d in Dir::ALL {
                if let Some(&j) = owner.get(&fs.across(s, d)) {
                    if j != i {
                        return Err(format!("square {s} is adjacent to another move"));
                    }
                }
            }
        }
        Ok(())
    }

    fn certificate(&self, bs: &BoundarySet) -> MinCycleCertificate {
        let fs = self.grid.faces();
        let fixed_pairs = self
            .bridges
            .iter()
            .map(|br| {
                let n = br.squares.len();
                let (a, b) = (br.squares[n - 2], br.squares[n - 1]);
                let (high, low) = if br.kind == Extremum::Max { (a, b) } else { (b, a) };
                FixedPair { high, low, vertical: matches!(br.dir, Dir::N | Dir::S) }
            })
            .collect();
        let critical = bs
            .squares()
            .filter(|&f| bs.critical[f].is_some())
            .map(|f| {
                let status = if let Some(&blocker) = self.stuck.get(&f) {
                    CriticalStatus::Stuck { blocker }
                } else if let Some(j) = self.bridges.iter().position(|br| br.squares.contains(&f)) {
                    CriticalStatus::Bridge { pair: j }
                } else {
                    CriticalStatus::Unresolved
                };
                (f, status)
            })
            .collect();
        debug_assert!(bs.squares().all(|f| fs.is_square(f)));
        MinCycleCertificate {
            m: self.start.p(),
            r: self.bridges.len(),
            cover: self.cur.clone(),
            fixed_pairs,
            critical,
        }
    }
}

/// Reduces the number of cycles by one inside the square-move component of
/// `h`, or certifies that `h` already has the fewest.
pub fn reduce_once(grid: &Grid, h: &CycleCover) -> ReduceOutcome {
    let mut trace = ReduceTrace { lemma_holds: true, ..Default::default() };
    if h.p() < 2 {
        let certificate = MinCycleCertificate::trivial(h);
        trace.restored = true;
        return ReduceOutcome::Minimal { cover: h.clone(), certificate, trace };
    }
    let bs0 = boundary_faces(grid, h);
    let mut st = State {
        grid,
        start: h.clone(),
        cur: h.clone(),
        original: bs0.faces.clone(),
        lin: Lineage::new(h, grid.graph().vertex_count()),
        forest: Forest::default(),
        bridges: Vec::new(),
        in_bridge: vec![false; grid.square_count()],
        stuck: BTreeMap::new(),
        rejected: BTreeSet::new(),
        trace,
    };
    let mut bs = bs0;
    let mut pending = None;
    loop {
        match st.select(&bs, pending.take()) {
            Some(Plan::Half(row, substituted)) => match st.unwind(&row) {
                Ok(cover) => {
                    st.trace.half_bridge = Some(row.start());
                    st.trace.half_bridge_len = row.len();
                    st.trace.substitution = substituted;
                    if st.bridges.is_empty() {
                        st.trace.restored = true;
                    }
                    return ReduceOutcome::Reduced { cover, trace: st.trace };
                }
                Err(why) => {
                    st.trace.lemma_holds = false;
                    st.trace.violations.push(why);
                    st.rejected.insert(row.start());
                }
            },
            Some(Plan::Bridge(row)) => {
                pending = st.build_bridge(row);
                bs = boundary_faces(grid, &st.cur);
            }
            None => {
                let certificate = st.certificate(&bs);
                st.trace.restored = true;
                return ReduceOutcome::Minimal { cover: st.start.clone(), certificate, trace: st.trace };
            }
        }
    }
}

/// True when some boundary square meets three or more cycles.
pub fn has_triple_square(grid: &Grid, h: &CycleCover) -> bool {
    let bs = boundary_faces(grid, h);
    let found = bs.squares().any(|f| bs.class[f] == Some(SquareClass::Triple));
    found
}
