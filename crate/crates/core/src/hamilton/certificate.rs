//! Minimality certificates and their verifier.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cover::{boundary_faces, CycleCover, CoverJson, SquareClass};
use crate::grid::{Dir, FaceId, Grid, LatticePoint};
use crate::height::{extremum_kind, maximal_row_from, neighbor_higher, RowOutcome};
use crate::chain::Extremum;

/// Two adjacent squares across an edge of H: the higher one is a local
/// maximum and the lower one a local minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPair {
    pub high: FaceId,
    pub low: FaceId,
    pub vertical: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalStatus {
    /// The row from the square runs into a higher (lower) boundary face.
    Stuck { blocker: FaceId },
    /// The square starts a row ending at fixed pair `pair`.
    Bridge { pair: usize },
    /// Neither; a certificate holding such a square does not verify.
    Unresolved,
}

/// A cover with `m + r` cycles and `r` fixed pairs in which every critical
/// boundary square is stuck or leads to a fixed pair. Every cover in the
/// same square-move component then has at least `m` cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCycleCertificate {
    pub m: usize,
    pub r: usize,
    pub cover: CycleCover,
    pub fixed_pairs: Vec<FixedPair>,
    pub critical: Vec<(FaceId, CriticalStatus)>,
}

impl MinCycleCertificate {
    /// Certificate for a cover that already has at most one cycle.
    pub fn trivial(h: &CycleCover) -> Self {
        MinCycleCertificate { m: h.p(), r: 0, cover: h.clone(), fixed_pairs: Vec::new(), critical: Vec::new() }
    }

    pub fn to_json(&self, grid: &Grid) -> CertificateJson {
        let fs = grid.faces();
        let cell = |f: FaceId| fs.cell(f);
        let face_label = |f: FaceId| {
            if fs.is_square(f) {
                format!("square {},{}", fs.cell(f).x, fs.cell(f).y)
            } else if f == fs.outer() {
                "outer".to_string()
            } else {
                format!("hole {}", f - fs.square_count())
            }
        };
        CertificateJson {
            m: self.m,
            r: self.r,
            fixed_pairs: self
                .fixed_pairs
                .iter()
                .map(|p| FixedPairJson { high: cell(p.high), low: cell(p.low), vertical: p.vertical })
                .collect(),
            critical: self
                .critical
                .iter()
                .map(|&(f, s)| CriticalJson {
                    square: cell(f),
                    status: match s {
                        CriticalStatus::Stuck { blocker } => format!("stuck against {}", face_label(blocker)),
                        CriticalStatus::Bridge { pair } => format!("row to fixed pair {pair}"),
                        CriticalStatus::Unresolved => "unresolved".to_string(),
                    },
                })
                .collect(),
            cover: self.cover.to_json(grid.graph()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPairJson {
    pub high: LatticePoint,
    pub low: LatticePoint,
    pub vertical: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalJson {
    pub square: LatticePoint,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub m: usize,
    pub r: usize,
    pub fixed_pairs: Vec<FixedPairJson>,
    pub critical: Vec<CriticalJson>,
    pub cover: CoverJson,
}

/// Checks the certificate against its cover from scratch.
pub fn verify_certificate(grid: &Grid, cert: &MinCycleCertificate) -> Result<(), String> {
    let fs = grid.faces();
    let h = &cert.cover;
    if h.p() != cert.m + cert.r {
        return Err(format!("cover has {} cycles, expected {}", h.p(), cert.m + cert.r));
    }
    if cert.fixed_pairs.len() != cert.r {
        return Err("fixed pair count differs from r".into());
    }
    let mut members: BTreeSet<FaceId> = BTreeSet::new();
    for (i, p) in cert.fixed_pairs.iter().enumerate() {
        let side = Dir::ALL
            .into_iter()
            .find(|&d| fs.across(p.high, d) == p.low)
            .ok_or(format!("fixed pair {i} is not adjacent"))?;
        if matches!(side, Dir::N | Dir::S) != p.vertical {
            return Err(format!("fixed pair {i} has the wrong orientation"));
        }
        if !h.contains(fs.square_edge(p.high, side)) {
            return Err(format!("fixed pair {i} is not separated by an edge of H"));
        }
        if neighbor_higher(grid, h, p.high, side)
            || extremum_kind(grid, h, p.high) != Some(Extremum::Max)
            || extremum_kind(grid, h, p.low) != Some(Extremum::Min)
        {
            return Err(format!("fixed pair {i} is not a maximum above a minimum"));
        }
        if !members.insert(p.high) || !members.insert(p.low) {
            return Err(format!("fixed pair {i} overlaps another"));
        }
    }
    for (i, p) in cert.fixed_pairs.iter().enumerate() {
        for (j, q) in cert.fixed_pairs.iter().enumerate().skip(i + 1) {
            let touching = [p.high, p.low]
                .iter()
                .flat_map(|&a| [q.high, q.low].map(|b| (a, b)))
                .filter(|&(a, b)| Dir::ALL.iter().any(|&d| fs.across(a, d) == b))
                .count();
            if touching > 1 || (touching == 1 && p.vertical != q.vertical) {
                return Err(format!("fixed pairs {i} and {j} touch improperly"));
            }
        }
    }
    let bs = boundary_faces(grid, h);
    for f in bs.squares() {
        if bs.class[f] == Some(SquareClass::Triple) {
            return Err(format!("square {f} meets three cycles"));
        }
        if extremum_kind(grid, h, f).is_some() && !members.contains(&f) {
            return Err(format!("extremal boundary square {f} is not in a fixed pair"));
        }
        if bs.critical[f].is_none() || members.contains(&f) {
            continue;
        }
        match maximal_row_from(grid, h, f, &bs) {
            RowOutcome::Stuck { .. } => {}
            RowOutcome::Row(row) => {
                if !members.contains(&row.last()) {
                    return Err(format!("critical square {f} is neither stuck nor on a row to a fixed pair"));
                }
            }
        }
    }
    Ok(())
}
