//! Instance generators. Every generator is a pure function of its
//! parameters and seed.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::CycleCover;
use crate::error::{Error, Result};
use crate::grid::{Color, Dir, Grid, GridGraph, LatticePoint};

fn pt(x: i32, y: i32) -> LatticePoint {
    LatticePoint::new(x, y)
}

/// A solid block `w` vertices wide and `h` vertices tall.
pub fn rect(w: usize, h: usize) -> Result<GridGraph> {
    if w == 0 || h == 0 {
        return Err(Error::InvalidParams("rect needs positive width and height".into()));
    }
    GridGraph::from_points((0..h as i32).flat_map(|y| (0..w as i32).map(move |x| pt(x, y))))
}

/// One lattice point per unit cell of the Aztec diamond of order `2n`: the
/// cells whose centres satisfy `|cx| + |cy| <= 2n`. The diamond is placed so
/// that its leftmost column sits at `x = 1`, which puts a white vertex on the
/// left of every chip in the upper boundary rows.
fn aztec_points(n: usize) -> Vec<LatticePoint> {
    let order = 2 * n as i32;
    let mut pts = Vec::new();
    for a in -order..order {
        for b in -order..order {
            // Centre (a + 1/2, b + 1/2), doubled to stay integral.
            if (2 * a + 1).abs() + (2 * b + 1).abs() <= 2 * order {
                pts.push(pt(a + order + 1, b + order));
            }
        }
    }
    pts
}

pub fn aztec(n: usize) -> Result<GridGraph> {
    if n == 0 {
        return Err(Error::InvalidParams("aztec needs n >= 1".into()));
    }
    GridGraph::from_points(aztec_points(n))
}

/// A chip: a horizontally adjacent pair on the outer boundary with a white
/// vertex on the left and nothing above either vertex. Chips are taken from
/// the upper half of the diamond.
fn chip_candidates(pts: &BTreeSet<LatticePoint>, min_y: i32) -> Vec<LatticePoint> {
    let on_outer = |p: LatticePoint| {
        [(0, 0), (-1, 0), (0, -1), (-1, -1)].iter().any(|&(dx, dy)| {
            let c = pt(p.x + dx, p.y + dy);
            [(0, 0), (1, 0), (0, 1), (1, 1)].iter().any(|&(ex, ey)| !pts.contains(&pt(c.x + ex, c.y + ey)))
        })
    };
    let clear_above = |p: LatticePoint| !pts.iter().any(|q| q.x == p.x && q.y > p.y);
    pts.iter()
        .copied()
        .filter(|&p| {
            let q = pt(p.x + 1, p.y);
            p.y >= min_y
                && p.color() == Color::White
                && pts.contains(&q)
                && on_outer(p)
                && on_outer(q)
                && clear_above(p)
                && clear_above(q)
        })
        .collect()
}

/// Aztec diamond of order `2n` with `k < n` chips removed one at a time, each
/// chosen uniformly (by the seeded generator) among the current candidates.
pub fn chipped_aztec(n: usize, k: usize, seed: u64) -> Result<GridGraph> {
    if n == 0 || k >= n {
        return Err(Error::InvalidParams(format!("chipped-aztec needs 0 <= k < n, got n = {n}, k = {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: BTreeSet<LatticePoint> = aztec_points(n).into_iter().collect();
    let min_y = 2 * n as i32;
    for _ in 0..k {
        let cands = chip_candidates(&pts, min_y);
        let &p = cands
            .choose(&mut rng)
            .ok_or_else(|| Error::InvalidParams("no chip available".into()))?;
        pts.remove(&p);
        pts.remove(&pt(p.x + 1, p.y));
    }
    GridGraph::from_points(pts)
}

/// Stepped tower of `cols` columns: centred rows of widths (top to bottom)
/// `2, 4, 4, 6, 6, ..., 2c, 2c, 2c - 2`.
pub fn tower(cols: usize) -> Result<GridGraph> {
    if cols < 2 {
        return Err(Error::InvalidParams("tower needs at least 2 columns".into()));
    }
    let c = cols as i32;
    let mut widths = vec![2];
    for w in (4..=2 * c).step_by(2) {
        widths.extend([w, w]);
    }
    widths.push(2 * c - 2);
    let rows = widths.len() as i32;
    let mut pts = Vec::new();
    for (i, &w) in widths.iter().enumerate() {
        let y = rows - 1 - i as i32;
        let off = c - w / 2;
        pts.extend((0..w).map(|x| pt(off + x, y)));
    }
    GridGraph::from_points(pts)
}

/// Random polyomino of `cells` unit cells grown from one cell by repeatedly
/// adding a uniformly chosen neighbouring cell; the graph has a vertex at
/// every cell corner.
pub fn random_polyomino(cells: usize, seed: u64) -> Result<GridGraph> {
    if cells == 0 {
        return Err(Error::InvalidParams("random-polyomino needs at least one cell".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shape: BTreeSet<LatticePoint> = BTreeSet::from([pt(0, 0)]);
    while shape.len() < cells {
        let frontier: BTreeSet<LatticePoint> = shape
            .iter()
            .flat_map(|&c| Dir::ALL.map(|d| c.step(d)))
            .filter(|c| !shape.contains(c))
            .collect();
        let frontier: Vec<LatticePoint> = frontier.into_iter().collect();
        shape.insert(*frontier.choose(&mut rng).expect("frontier is nonempty"));
    }
    cells_to_graph(shape)
}

/// Grid graph on the corners of a set of unit cells (cell = south-west corner).
pub fn cells_to_graph<I: IntoIterator<Item = LatticePoint>>(cells: I) -> Result<GridGraph> {
    let corners: BTreeSet<LatticePoint> = cells
        .into_iter()
        .flat_map(|c| [(0, 0), (1, 0), (0, 1), (1, 1)].map(|(dx, dy)| pt(c.x + dx, c.y + dy)))
        .collect();
    GridGraph::from_points(corners)
}

/// All free polyominoes with at most `max_cells` cells, each as its cell
/// list in canonical form (the lexicographically least of its eight
/// rotations and reflections, shifted to the origin). Ordered by size, then
/// by canonical form.
pub fn free_polyominoes(max_cells: usize) -> Vec<Vec<LatticePoint>> {
    fn canonical(cells: &[LatticePoint]) -> Vec<LatticePoint> {
        let maps: [fn(i32, i32) -> (i32, i32); 8] = [
            |x, y| (x, y),
            |x, y| (-y, x),
            |x, y| (-x, -y),
            |x, y| (y, -x),
            |x, y| (-x, y),
            |x, y| (y, x),
            |x, y| (x, -y),
            |x, y| (-y, -x),
        ];
        maps.iter()
            .map(|m| {
                let moved: Vec<(i32, i32)> = cells.iter().map(|c| m(c.x, c.y)).collect();
                let x0 = moved.iter().map(|c| c.0).min().unwrap_or(0);
                let y0 = moved.iter().map(|c| c.1).min().unwrap_or(0);
                let mut v: Vec<LatticePoint> = moved.iter().map(|&(x, y)| pt(x - x0, y - y0)).collect();
                v.sort();
                v
            })
            .min()
            .expect("eight images")
    }
    let mut out = Vec::new();
    let mut level: BTreeSet<Vec<LatticePoint>> = BTreeSet::new();
    if max_cells > 0 {
        level.insert(vec![pt(0, 0)]);
    }
    for _ in 1..=max_cells {
        let mut next = BTreeSet::new();
        for shape in &level {
            for c in shape {
                for d in Dir::ALL {
                    let n = c.step(d);
                    if shape.contains(&n) {
                        continue;
                    }
                    let mut grown = shape.clone();
                    grown.push(n);
                    next.insert(canonical(&grown));
                }
            }
        }
        out.extend(std::mem::replace(&mut level, next));
    }
    out
}

/// The cover of an even-by-even block by its disjoint 2x2 cycles, one per
/// cell with both coordinates even relative to the south-west corner.
pub fn square_tiling_cover(grid: &Grid) -> Result<CycleCover> {
    let g = grid.graph();
    let fs = grid.faces();
    let (lo, _) = g.bounding_box();
    let edges = (0..fs.square_count())
        .filter(|&sq| {
            let c = fs.cell(sq);
            (c.x - lo.x) % 2 == 0 && (c.y - lo.y) % 2 == 0
        })
        .flat_map(|sq| *fs.square_edges(sq));
    CycleCover::from_edges(g, edges)
}

/// Random rectangle with one or two holes punched out of its interior. The
/// rectangle has at most `max_cells` unit cells; each hole removes a single
/// vertex, a domino or a 2x2 block, holes stay apart from each other and
/// from the rim, and the colour classes stay balanced.
pub fn random_holed(max_cells: usize, seed: u64) -> Result<GridGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes: [&[(i32, i32)]; 4] = [&[(0, 0)], &[(0, 0), (1, 0)], &[(0, 0), (0, 1)], &[(0, 0), (1, 0), (0, 1), (1, 1)]];
    for _ in 0..10_000 {
        let w = rng.random_range(4..=8i32);
        let h = rng.random_range(4..=8i32);
        if ((w - 1) * (h - 1)) as usize > max_cells {
            continue;
        }
        let holes = rng.random_range(1..=2);
        let mut removed: Vec<Vec<LatticePoint>> = Vec::new();
        for _ in 0..holes {
            let shape = shapes[rng.random_range(0..shapes.len())];
            let x0 = rng.random_range(1..w - 1);
            let y0 = rng.random_range(1..h - 1);
            let cells: Vec<LatticePoint> = shape.iter().map(|&(dx, dy)| pt(x0 + dx, y0 + dy)).collect();
            removed.push(cells);
        }
        let interior = removed.iter().flatten().all(|p| p.x >= 1 && p.x <= w - 2 && p.y >= 1 && p.y <= h - 2);
        let apart = removed.len() < 2
            || removed[0]
                .iter()
                .all(|a| removed[1].iter().all(|b| (a.x - b.x).abs() > 2 || (a.y - b.y).abs() > 2));
        let gone: BTreeSet<LatticePoint> = removed.iter().flatten().copied().collect();
        let black = gone.iter().filter(|p| p.color() == Color::Black).count();
        if !interior || !apart || 2 * black != gone.len() {
            continue;
        }
        let pts = (0..h).flat_map(|y| (0..w).map(move |x| pt(x, y))).filter(|p| !gone.contains(p));
        return GridGraph::from_points(pts);
    }
    Err(Error::InvalidParams("could not place holes".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn free_polyomino_counts() {
        let mut by_size = [0usize; 9];
        for p in free_polyominoes(8) {
            by_size[p.len()] += 1;
        }
        assert_eq!(by_size, [0, 1, 1, 2, 5, 12, 35, 108, 369]);
    }

    #[test]
    fn square_tiling_of_block() {
        let grid = Grid::new(rect(6, 4).unwrap()).unwrap();
        assert_eq!(square_tiling_cover(&grid).unwrap().p(), 6);
        let odd = Grid::new(rect(3, 4).unwrap()).unwrap();
        assert!(square_tiling_cover(&odd).is_err());
    }

    #[test]
    fn rect_shape() {
        let g = rect(2, 4).unwrap();
        assert_eq!(g.to_mask(), "##\n##\n##\n##\n");
    }

    #[test]
    fn aztec_vertex_counts() {
        for n in 1..5 {
            assert_eq!(aztec(n).unwrap().vertex_count(), 4 * n * (2 * n + 1));
        }
    }

    #[test]
    fn chips_remove_pairs() {
        let g = chipped_aztec(3, 2, 5).unwrap();
        assert_eq!(g.vertex_count(), 4 * 3 * 7 - 4);
        assert!(chipped_aztec(2, 2, 0).is_err());
    }

    #[test]
    fn tower_three() {
        let g = tower(3).unwrap();
        assert_eq!(g.vertex_count(), 26);
        assert_eq!(g.to_mask(), "..##..\n.####.\n.####.\n######\n######\n.####.\n");
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_polyomino(12, 9).unwrap(), random_polyomino(12, 9).unwrap());
        let g = random_holed(30, 4).unwrap();
        assert_eq!(g, random_holed(30, 4).unwrap());
        let gr = Grid::new(g).unwrap();
        assert!((1..=2).contains(&gr.hole_count()));
        assert!(gr.graph().is_two_connected());
    }
}
