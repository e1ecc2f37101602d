//! Text and SVG pictures of a cover with the doubled height of every square.

use std::fmt::Write as _;

use crate::cover::CycleCover;
use crate::grid::{Dir, Grid};
use crate::height::{height_of, HeightFrame};

const CELL: usize = 4;

fn corner(e: bool, n: bool, w: bool, s: bool) -> char {
    match (e, n, w, s) {
        (true, false, true, false) => '─',
        (false, true, false, true) => '│',
        (true, false, false, true) => '┌',
        (false, false, true, true) => '┐',
        (true, true, false, false) => '└',
        (false, true, true, false) => '┘',
        _ => '•',
    }
}

/// Vertices as box-drawing corners joined along the edges of `h`, each
/// square labelled with its doubled height.
pub fn render_ascii(grid: &Grid, frame: &HeightFrame, h: &CycleCover) -> String {
    let g = grid.graph();
    let fs = grid.faces();
    let (lo, hi) = g.bounding_box();
    let width = (hi.x - lo.x) as usize * CELL + 1;
    let height = (hi.y - lo.y) as usize * 2 + 1;
    let mut canvas = vec![vec![' '; width]; height];
    let col = |x: i32| (x - lo.x) as usize * CELL;
    let row = |y: i32| (hi.y - y) as usize * 2;
    for v in 0..g.vertex_count() {
        let p = g.point(v);
        let has = |d: Dir| g.edge_toward(v, d).is_some_and(|e| h.contains(e));
        canvas[row(p.y)][col(p.x)] = corner(has(Dir::E), has(Dir::N), has(Dir::W), has(Dir::S));
        if has(Dir::E) {
            for c in 1..CELL {
                canvas[row(p.y)][col(p.x) + c] = '─';
            }
        }
        if has(Dir::N) {
            canvas[row(p.y) - 1][col(p.x)] = '│';
        }
    }
    let field = height_of(grid, frame, h);
    for sq in 0..fs.square_count() {
        let c = fs.cell(sq);
        let label = format!("{:^3}", field.square(sq));
        let r = row(c.y) - 1;
        for (i, ch) in label.chars().take(CELL - 1).enumerate() {
            canvas[r][col(c.x) + 1 + i] = ch;
        }
    }
    let mut out = String::new();
    for line in canvas {
        let s: String = line.into_iter().collect();
        out.push_str(s.trim_end());
        out.push('\n');
    }
    out
}

/// SVG with one unit segment per cover edge, grey dots at the vertices and
/// heights centred in the squares.
pub fn render_svg(grid: &Grid, frame: &HeightFrame, h: &CycleCover) -> String {
    let g = grid.graph();
    let fs = grid.faces();
    let (lo, hi) = g.bounding_box();
    let scale = 40;
    let pad = 20;
    let x = |px: i32| pad + (px - lo.x) * scale;
    let y = |py: i32| pad + (hi.y - py) * scale;
    let w = x(hi.x) + pad;
    let ht = y(lo.y) + pad;
    let mut out = String::new();
    let _ = writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{ht}\" viewBox=\"0 0 {w} {ht}\">");
    let _ = writeln!(out, "<g stroke=\"black\" stroke-width=\"3\" stroke-linecap=\"round\">");
    for e in h.edges() {
        let edge = g.edge(e);
        let (a, b) = (g.point(edge.u), g.point(edge.v));
        let _ = writeln!(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", x(a.x), y(a.y), x(b.x), y(b.y));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "<g fill=\"grey\">");
    for p in g.points() {
        let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"3\"/>", x(p.x), y(p.y));
    }
    let _ = writeln!(out, "</g>");
    let field = height_of(grid, frame, h);
    let _ = writeln!(out, "<g font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\" dominant-baseline=\"central\">");
    for sq in 0..fs.square_count() {
        let c = fs.cell(sq);
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\">{}</text>", x(c.x) + scale / 2, y(c.y) - scale / 2, field.square(sq));
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::find_initial_cover;

    #[test]
    fn ascii_shows_cycle_and_heights() {
        let grid = Grid::parse("###\n###\n").unwrap();
        let frame = HeightFrame::new(&grid).unwrap();
        let h = find_initial_cover(grid.graph()).unwrap();
        print!("{}", render_ascii(&grid, &frame, &h));
        let svg = render_svg(&grid, &frame, &h);
        assert_eq!(svg.matches("<line").count(), 6);
    }
}
