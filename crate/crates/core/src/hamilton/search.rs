//! Enumeration of square-move components by hole signature.

use crate::chain::{DifferenceSystem, Extremum};
use crate::cover::CycleCover;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::height::{ComponentSignature, HeightFrame};

/// Cover with `omega_H = omega_ref + d tau`.
pub fn cover_from_relative(grid: &Grid, reference: &[bool], tau: &[i64]) -> Result<CycleCover> {
    let fs = grid.faces();
    let mask: Result<Vec<bool>> = reference
        .iter()
        .enumerate()
        .map(|(e, &r)| match r as i64 + tau[fs.right(e)] - tau[fs.left(e)] {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Error::Infeasible),
        })
        .collect();
    CycleCover::from_mask(grid.graph(), mask?)
}

/// Upper bound on the number of components: `2^m |F|^{m/2}` for `m` holes.
pub fn component_bound(grid: &Grid) -> f64 {
    let m = grid.hole_count() as f64;
    2f64.powf(m) * (grid.faces().len() as f64).powf(m / 2.0)
}

/// The canonical system of the frame's reference cover with every hole
/// pinned to the given relative value.
fn pinned_system(grid: &Grid, frame: &HeightFrame, values: &[i64]) -> DifferenceSystem {
    let fs = grid.faces();
    let mut sys = DifferenceSystem::for_subgraph(grid, frame.reference().in_h());
    for (h, &s) in fs.holes().zip(values) {
        sys.add_arc(fs.outer(), h, s);
        sys.add_arc(h, fs.outer(), -s);
    }
    sys
}

/// Every realisable signature with one representative cover each (the
/// cover of the pointwise highest field). Candidate hole values range over
/// `[-D(h, outer), D(outer, h)]`; each combination is kept iff the pinned
/// system is feasible.
pub fn component_representatives(grid: &Grid, frame: &HeightFrame) -> Result<Vec<(ComponentSignature, CycleCover)>> {
    let fs = grid.faces();
    let sys = DifferenceSystem::for_subgraph(grid, frame.reference().in_h());
    let outer = fs.outer();
    let from = sys.distances_from(outer).map_err(|_| Error::Infeasible)?;
    let to = sys.distances_to(outer).map_err(|_| Error::Infeasible)?;
    let ranges: Vec<(i64, i64)> = fs
        .holes()
        .map(|h| match (to[h], from[h]) {
            (Some(a), Some(b)) => Ok((-a, b)),
            _ => Err(Error::Unreachable { from: outer, to: h }),
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut values: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        if ranges.iter().all(|r| r.0 <= r.1) {
            let pinned = pinned_system(grid, frame, &values);
            if pinned.exists_height() {
                let tau = pinned.extremal_height(outer, Extremum::Max)?;
                let cover = cover_from_relative(grid, frame.reference().in_h(), &tau)?;
                let sig = ComponentSignature(values.clone());
                debug_assert_eq!(frame.signature(grid, &cover), sig);
                out.push((sig, cover));
            }
        }
        // Odometer over the hole ranges.
        let mut i = 0;
        loop {
            if i == values.len() {
                return Ok(out);
            }
            if values[i] < ranges[i].1 {
                values[i] += 1;
                break;
            }
            values[i] = ranges[i].0;
            i += 1;
        }
    }
}
