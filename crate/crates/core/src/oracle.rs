//! Brute-force ground truth for small instances: every 2-factor of a graph,
//! the square-move graph on them, and exhaustive height enumeration.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::chain::{DifferenceSystem, Extremum};
use crate::cover::CycleCover;
use crate::error::{Error, Result};
use crate::grid::{FaceId, Grid, GridGraph};
use crate::height::{move_row, row_from, ComponentSignature, HeightFrame};
use crate::sampler;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub const DEFAULT_CAP: usize = 60;
/// Covers are stored as 128-bit edge sets.
pub const MAX_CAP: usize = 128;

pub type EdgeBits = u128;

/// Every 2-factor of a graph, with cycle counts and signatures.
#[derive(Clone, Debug)]
pub struct CoverCatalog {
    pub edge_count: usize,
    /// Sorted ascending.
    pub covers: Vec<EdgeBits>,
    pub p: Vec<usize>,
    pub signatures: Vec<ComponentSignature>,
}

impl CoverCatalog {
    pub fn len(&self) -> usize {
        self.covers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covers.is_empty()
    }

    pub fn cover(&self, g: &GridGraph, i: usize) -> CycleCover {
        CycleCover::from_mask(g, bits_to_mask(self.covers[i], self.edge_count)).expect("catalog holds covers")
    }

    pub fn index_of(&self, bits: EdgeBits) -> Option<usize> {
        self.covers.binary_search(&bits).ok()
    }

    /// Header plus one hex edge set per line.
    pub fn dump(&self) -> String {
        let width = self.edge_count.div_ceil(4).max(1);
        let mut out = String::new();
        let _ = writeln!(out, "# gridham cover catalog");
        let _ = writeln!(out, "edges {}", self.edge_count);
        let _ = writeln!(out, "covers {}", self.covers.len());
        for &c in &self.covers {
            let _ = writeln!(out, "{c:0width$x}");
        }
        out
    }

    pub fn hamiltonian_count(&self) -> usize {
        self.p.iter().filter(|&&p| p == 1).count()
    }
}

pub fn cover_bits(h: &CycleCover) -> EdgeBits {
    h.edges().fold(0, |acc, e| acc | 1u128 << e)
}

pub fn bits_to_mask(bits: EdgeBits, edges: usize) -> Vec<bool> {
    (0..edges).map(|e| bits >> e & 1 == 1).collect()
}

/// Edge order for the search: row by row from the top, the horizontal edges
/// of a row before the vertical edges hanging below it.
fn search_order(g: &GridGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by_key(|&e| {
        let ed = g.edge(e);
        let p = g.point(ed.u);
        (-p.y, !ed.horizontal, p.x)
    });
    order
}

/// All 2-factors by backtracking over edges with degree pruning.
pub fn enumerate_covers(grid: &Grid, cap: usize) -> Result<CoverCatalog> {
    let g = grid.graph();
    let cap = cap.min(MAX_CAP);
    if g.edge_count() > cap {
        return Err(Error::CapExceeded { edges: g.edge_count(), cap });
    }
    let order = search_order(g);
    let mut deg = vec![0u8; g.vertex_count()];
    let mut rem: Vec<u8> = (0..g.vertex_count()).map(|v| g.degree(v) as u8).collect();
    let mut found = Vec::new();
    if rem.iter().all(|&r| r >= 2) {
        backtrack(g, &order, 0, 0, &mut deg, &mut rem, &mut found);
    }
    found.sort_unstable();
    let frame = if found.is_empty() { None } else { Some(HeightFrame::new(grid)?) };
    let mut p = Vec::with_capacity(found.len());
    let mut signatures = Vec::with_capacity(found.len());
    for &bits in &found {
        let h = CycleCover::from_mask(g, bits_to_mask(bits, g.edge_count())).expect("degree two");
        p.push(h.p());
        signatures.push(frame.as_ref().expect("covers exist").signature(grid, &h));
    }
    Ok(CoverCatalog { edge_count: g.edge_count(), covers: found, p, signatures })
}

fn backtrack(
    g: &GridGraph,
    order: &[usize],
    i: usize,
    bits: EdgeBits,
    deg: &mut [u8],
    rem: &mut [u8],
    out: &mut Vec<EdgeBits>,
) {
    if i == order.len() {
        out.push(bits);
        return;
    }
    let e = order[i];
    let (u, v) = (g.edge(e).u, g.edge(e).v);
    rem[u] -= 1;
    rem[v] -= 1;
    if deg[u] < 2 && deg[v] < 2 {
        deg[u] += 1;
        deg[v] += 1;
        if deg[u] + rem[u] >= 2 && deg[v] + rem[v] >= 2 {
            backtrack(g, order, i + 1, bits | 1u128 << e, deg, rem, out);
        }
        deg[u] -= 1;
        deg[v] -= 1;
    }
    if deg[u] + rem[u] >= 2 && deg[v] + rem[v] >= 2 {
        backtrack(g, order, i + 1, bits, deg, rem, out);
    }
    rem[u] += 1;
    rem[v] += 1;
}

/// Second enumeration method: every integer solution of the canonical
/// difference system between its extremal fields, mapped back to covers.
pub fn enumerate_covers_by_heights(grid: &Grid) -> Result<Vec<EdgeBits>> {
    let frame = HeightFrame::new(grid)?;
    let reference = frame.reference().in_h().to_vec();
    let sys = DifferenceSystem::for_subgraph(grid, &reference);
    let f0 = sys.reference();
    let hi = sys.extremal_height(f0, Extremum::Max)?;
    let lo = sys.extremal_height(f0, Extremum::Min)?;
    let fields = enumerate_heights_between(&sys, &lo, &hi);
    let fs = grid.faces();
    let mut out: Vec<EdgeBits> = fields
        .iter()
        .map(|tau| {
            (0..reference.len()).fold(0u128, |acc, e| {
                let w = reference[e] as i64 + tau[fs.right(e)] - tau[fs.left(e)];
                debug_assert!(w == 0 || w == 1);
                if w == 1 {
                    acc | 1u128 << e
                } else {
                    acc
                }
            })
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// All valid integer fields with `tau(reference) = 0` and every value in
/// `[-bound, bound]`.
pub fn enumerate_heights(sys: &DifferenceSystem, bound: i64) -> Vec<Vec<i64>> {
    let n = sys.len();
    enumerate_heights_between(sys, &vec![-bound; n], &vec![bound; n])
}

/// All valid integer fields with `tau(reference) = 0` and
/// `lo[f] <= tau[f] <= hi[f]`.
pub fn enumerate_heights_between(sys: &DifferenceSystem, lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let n = sys.len();
    let f0 = sys.reference();
    if lo[f0] > 0 || hi[f0] < 0 {
        return Vec::new();
    }
    // Assign faces in id order with the reference first; check each arc once
    // both of its ends are assigned.
    let mut order: Vec<usize> = vec![f0];
    order.extend((0..n).filter(|&f| f != f0));
    let mut pos = vec![0; n];
    for (i, &f) in order.iter().enumerate() {
        pos[f] = i;
    }
    let mut checks: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); n];
    for a in sys.arcs() {
        let later = pos[a.from].max(pos[a.to]);
        checks[later].push((a.from, a.to, a.cost));
    }
    let mut tau = vec![0i64; n];
    let mut out = Vec::new();
    fn rec(
        i: usize,
        order: &[usize],
        lo: &[i64],
        hi: &[i64],
        checks: &[Vec<(usize, usize, i64)>],
        tau: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if i == order.len() {
            out.push(tau.clone());
            return;
        }
        let f = order[i];
        let (a, b) = if i == 0 { (0, 0) } else { (lo[f], hi[f]) };
        for v in a..=b {
            tau[f] = v;
            if checks[i].iter().all(|&(x, y, c)| tau[y] - tau[x] <= c) {
                rec(i + 1, order, lo, hi, checks, tau, out);
            }
        }
    }
    rec(0, &order, lo, hi, &checks, &mut tau, &mut out);
    out
}

/// The square-move graph on a catalog.
#[derive(Clone, Debug)]
pub struct ZGraph {
    pub adj: Vec<Vec<(usize, FaceId)>>,
    pub component: Vec<usize>,
    pub component_count: usize,
}

impl ZGraph {
    pub fn bfs(&self, from: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        dist[from] = 0;
        let mut q = VecDeque::from([from]);
        while let Some(u) = q.pop_front() {
            for &(w, _) in &self.adj[u] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    pub fn members(&self, comp: usize) -> Vec<usize> {
        (0..self.component.len()).filter(|&i| self.component[i] == comp).collect()
    }
}

fn square_bits(grid: &Grid, sq: FaceId) -> EdgeBits {
    grid.faces().square_edges(sq).iter().fold(0, |acc, &e| acc | 1u128 << e)
}

pub fn z_components(grid: &Grid, cat: &CoverCatalog) -> ZGraph {
    let masks: Vec<EdgeBits> = (0..grid.square_count()).map(|s| square_bits(grid, s)).collect();
    let index: HashMap<EdgeBits, usize> = cat.covers.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let adj: Vec<Vec<(usize, FaceId)>> = cat
        .covers
        .iter()
        .map(|&c| {
            masks
                .iter()
                .enumerate()
                .filter_map(|(s, &m)| index.get(&(c ^ m)).map(|&j| (j, s)))
                .collect()
        })
        .collect();
    let mut component = vec![usize::MAX; adj.len()];
    let mut count = 0;
    for s in 0..adj.len() {
        if component[s] != usize::MAX {
            continue;
        }
        component[s] = count;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(w, _) in &adj[u] {
                if component[w] == usize::MAX {
                    component[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    ZGraph { adj, component, component_count: count }
}

/// Minimum cycle count overall and per square-move component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCycles {
    pub overall: Option<usize>,
    pub per_component: Vec<usize>,
}

pub fn min_cycles_bruteforce(cat: &CoverCatalog, z: &ZGraph) -> MinCycles {
    let mut per = vec![usize::MAX; z.component_count];
    for (i, &p) in cat.p.iter().enumerate() {
        let c = z.component[i];
        per[c] = per[c].min(p);
    }
    MinCycles { overall: cat.p.iter().copied().min(), per_component: per }
}

/// Transition structure of the row-move chain on the covers with at most
/// two cycles of one component: for every state, the target state chosen
/// by each square (self-loops included).
pub fn row_move_targets(
    grid: &Grid,
    cat: &CoverCatalog,
    states: &[usize],
    step: impl Fn(&CycleCover, FaceId) -> Option<CycleCover>,
) -> Vec<Vec<usize>> {
    let g = grid.graph();
    let local: HashMap<usize, usize> = states.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    states
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let h = cat.cover(g, i);
            (0..grid.square_count())
                .map(|f| match step(&h, f) {
                    Some(h2) => {
                        let j = cat.index_of(cover_bits(&h2)).expect("moves stay in the catalog");
                        *local.get(&j).expect("moves stay in the state space")
                    }
                    None => k,
                })
                .collect()
        })
        .collect()
}

/// Covers reachable by single row moves in either direction, for the
/// connectivity check of the two-cycle chain.
pub fn row_move_neighbors(grid: &Grid, h: &CycleCover) -> Vec<CycleCover> {
    (0..grid.square_count())
        .filter_map(|f| row_from(grid, h, f).and_then(|row| move_row(grid, h, &row).ok()))
        .collect()
}

/// Catalog indices of the covers with one or two cycles in a component.
pub fn chain_states(cat: &CoverCatalog, z: &ZGraph, comp: usize) -> Vec<usize> {
    z.members(comp).into_iter().filter(|&i| cat.p[i] <= 2).collect()
}

/// Explicit transition counts of the sampler on a state space: entry
/// `[a][b]` is the number of squares moving state `a` to state `b`.
pub fn transition_counts(grid: &Grid, cat: &CoverCatalog, states: &[usize]) -> Vec<Vec<u32>> {
    let targets = row_move_targets(grid, cat, states, |h, f| sampler::propose(grid, h, f).map(|m| m.0));
    let n = states.len();
    targets
        .iter()
        .map(|row| {
            let mut counts = vec![0u32; n];
            for &t in row {
                counts[t] += 1;
            }
            counts
        })
        .collect()
}

/// True when every row and column of the count matrix sums to the number
/// of squares.
pub fn is_doubly_stochastic(counts: &[Vec<u32>], squares: usize) -> bool {
    let n = counts.len();
    (0..n).all(|a| counts[a].iter().sum::<u32>() as usize == squares)
        && (0..n).all(|b| counts.iter().map(|r| r[b]).sum::<u32>() as usize == squares)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainVariant {
    /// The sampler's transition rule.
    Sampler,
    /// Negative control: picks uniformly among the non-loop moves, so
    /// states are visited in proportion to their move count.
    SkipSelfLoops,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub states: usize,
    pub steps: u64,
    /// Steps between recorded visits.
    pub thin: u64,
    pub samples: u64,
    pub statistic: f64,
    pub dof: usize,
    /// The 0.999 quantile of the chi-square distribution with `dof`
    /// degrees of freedom.
    pub critical: f64,
    pub p_value: f64,
    pub passes: bool,
}

/// Chi-square test of the chain's visits against the uniform distribution
/// on the one- and two-cycle covers of component `comp`. The chain starts
/// at the first such cover, runs `steps` steps and records every
/// `thin`-th state, with `thin` chosen so that each state is expected about
/// fifty times.
pub fn stationary_check(
    grid: &Grid,
    cat: &CoverCatalog,
    z: &ZGraph,
    comp: usize,
    steps: u64,
    seed: u64,
    variant: ChainVariant,
) -> Result<StationaryReport> {
    let states = chain_states(cat, z, comp);
    let n = states.len();
    if n == 0 {
        return Err(Error::EmptyTarget);
    }
    // The walk runs on state indices; every transition comes from the
    // sampler's own rule, tabulated once per (state, square).
    let table = row_move_targets(grid, cat, &states, |h, f| sampler::propose(grid, h, f).map(|m| m.0));
    let thin = (steps / (50 * n as u64)).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = 0usize;
    let mut visits = vec![0u64; n];
    let mut samples = 0u64;
    let squares = grid.square_count();
    for t in 1..=steps {
        cur = match variant {
            ChainVariant::Sampler if squares == 0 => cur,
            ChainVariant::Sampler => table[cur][rng.random_range(0..squares)],
            ChainVariant::SkipSelfLoops => {
                let moves: Vec<usize> = table[cur].iter().copied().filter(|&j| j != cur).collect();
                if moves.is_empty() { cur } else { moves[rng.random_range(0..moves.len())] }
            }
        };
        if t % thin == 0 {
            visits[cur] += 1;
            samples += 1;
        }
    }
    let expected = samples as f64 / n as f64;
    let statistic: f64 = visits.iter().map(|&v| (v as f64 - expected).powi(2) / expected).sum();
    let dof = n.saturating_sub(1);
    let (critical, p_value) = if dof == 0 {
        (0.0, 1.0)
    } else {
        let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidParams(e.to_string()))?;
        (dist.inverse_cdf(0.999), 1.0 - dist.cdf(statistic))
    };
    Ok(StationaryReport { states: n, steps, thin, samples, statistic, dof, critical, p_value, passes: statistic <= critical })
}

/// Result of comparing square-move distance with relative height distance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceCheck {
    /// Covers used as breadth-first sources.
    pub sources: usize,
    /// Ordered (source, target) pairs in a common component.
    pub pairs: u64,
    /// Pairs whose move distance exceeds the l1 distance of their heights.
    pub violations: u64,
}

/// Breadth-first search from every cover (or, above `max_sources` covers,
/// from that many evenly spaced ones), comparing each distance with the l1
/// distance of relative heights. A square move changes one height by one,
/// so the l1 distance is updated in constant time along every move.
pub fn distance_bound_violations(grid: &Grid, cat: &CoverCatalog, z: &ZGraph, max_sources: usize) -> DistanceCheck {
    let n = cat.len();
    if n == 0 {
        return DistanceCheck::default();
    }
    let faces = grid.faces().len();
    let frame_ref = cat.cover(grid.graph(), 0);
    let mut heights = Vec::with_capacity(n * faces);
    for i in 0..n {
        heights.extend(crate::height::relative_heights(grid, frame_ref.in_h(), &cat.cover(grid.graph(), i)));
    }
    let at = |c: usize, f: FaceId| heights[c * faces + f];
    // Each move carries the moved square and its height before and after,
    // so the inner loop reads only the source's own heights.
    let moves: Vec<Vec<(u32, u32, i32, i32)>> = (0..n)
        .map(|u| z.adj[u].iter().map(|&(w, s)| (w as u32, s as u32, at(u, s) as i32, at(w, s) as i32)).collect())
        .collect();
    let stride = n.div_ceil(max_sources.max(1));
    let mut out = DistanceCheck::default();
    // (distance, l1) per cover.
    let mut seen: Vec<(u32, i32)> = vec![(u32::MAX, 0); n];
    let mut queue = VecDeque::new();
    for a in (0..n).step_by(stride) {
        out.sources += 1;
        let base = &heights[a * faces..(a + 1) * faces];
        seen.fill((u32::MAX, 0));
        seen[a] = (0, 0);
        queue.push_back(a as u32);
        while let Some(u) = queue.pop_front() {
            let (du, lu) = seen[u as usize];
            for &(w, s, hu, hw) in &moves[u as usize] {
                let slot = &mut seen[w as usize];
                if slot.0 == u32::MAX {
                    let b = base[s as usize] as i32;
                    let lw = lu - (b - hu).abs() + (b - hw).abs();
                    *slot = (du + 1, lw);
                    out.pairs += 1;
                    out.violations += ((du + 1) as i64 > lw as i64) as u64;
                    queue.push_back(w);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_catalogs() {
        let gr = Grid::parse("##\n##").unwrap();
        assert_eq!(enumerate_covers(&gr, DEFAULT_CAP).unwrap().len(), 1);
        let gr = Grid::parse("####\n####").unwrap();
        let cat = enumerate_covers(&gr, DEFAULT_CAP).unwrap();
        assert_eq!(cat.len(), 2);
        let gr = Grid::parse("###\n###\n###").unwrap();
        assert!(enumerate_covers(&gr, DEFAULT_CAP).unwrap().is_empty());
    }

    #[test]
    fn two_by_n_is_forced() {
        let gr = Grid::parse("##\n##\n##\n##").unwrap();
        let cat = enumerate_covers(&gr, DEFAULT_CAP).unwrap();
        assert_eq!(cat.len(), 2);
        assert_eq!(cat.hamiltonian_count(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let gr = Grid::parse("########\n########\n########\n########\n########").unwrap();
        assert!(matches!(enumerate_covers(&gr, 60), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn height_enumeration_agrees() {
        for mask in ["####\n####\n####\n####", "####\n#..#\n#..#\n####", "######\n#..###\n#..###\n######"] {
            let gr = Grid::parse(mask).unwrap();
            let cat = enumerate_covers(&gr, DEFAULT_CAP).unwrap();
            assert_eq!(enumerate_covers_by_heights(&gr).unwrap(), cat.covers, "{mask}");
        }
    }

    #[test]
    fn single_arc_progression() {
        let mut sys = DifferenceSystem::new(2, 0);
        sys.add_arc(0, 1, 2);
        let all = enumerate_heights(&sys, 3);
        let vals: Vec<i64> = all.iter().map(|t| t[1]).collect();
        assert_eq!(vals, vec![-3, -2, -1, 0, 1, 2]);
    }

    #[test]
    fn dump_format() {
        let gr = Grid::parse("##\n##").unwrap();
        let cat = enumerate_covers(&gr, DEFAULT_CAP).unwrap();
        assert_eq!(cat.dump(), "# gridham cover catalog\nedges 4\ncovers 1\nf\n");
    }
}
