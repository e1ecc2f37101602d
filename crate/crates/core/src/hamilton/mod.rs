//! Deciding Hamiltonicity: minimise the number of cycles inside each
//! square-move component, over every component.

mod certificate;
mod reduce;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::CycleCover;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridGraph, LatticePoint};
use crate::height::{ComponentSignature, HeightFrame};

pub use certificate::{verify_certificate, CertificateJson, CriticalStatus, FixedPair, MinCycleCertificate};
pub use reduce::{has_triple_square, reduce_once, Bridge, ReduceOutcome, ReduceTrace};
pub use search::{component_bound, component_representatives, cover_from_relative};

/// Counters over a sequence of reductions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStats {
    pub calls: usize,
    pub reductions: usize,
    pub bridges: usize,
    /// Successful reductions that consumed at least one bridge.
    pub unwinds: usize,
    pub substitutions: usize,
    pub triple_rules: usize,
    /// Calls in which some half-bridge plan failed a check.
    pub lemma_failures: usize,
    /// Calls in which the boundary set was not recovered.
    pub restore_failures: usize,
}

impl ReductionStats {
    pub fn record(&mut self, trace: &ReduceTrace, reduced: bool) {
        self.calls += 1;
        self.bridges += trace.bridges;
        if reduced {
            self.reductions += 1;
            if trace.bridges > 0 {
                self.unwinds += 1;
            }
        }
        self.substitutions += trace.substitution as usize;
        self.triple_rules += trace.triple_rule as usize;
        self.lemma_failures += (!trace.lemma_holds) as usize;
        self.restore_failures += (!trace.restored) as usize;
    }

    pub fn merge(&mut self, other: &ReductionStats) {
        self.calls += other.calls;
        self.reductions += other.reductions;
        self.bridges += other.bridges;
        self.unwinds += other.unwinds;
        self.substitutions += other.substitutions;
        self.triple_rules += other.triple_rules;
        self.lemma_failures += other.lemma_failures;
        self.restore_failures += other.restore_failures;
    }
}

#[derive(Clone, Debug)]
pub struct Minimized {
    pub cover: CycleCover,
    pub certificate: MinCycleCertificate,
    pub stats: ReductionStats,
}

/// Repeats [`reduce_once`] until it certifies minimality.
pub fn minimize_in_component(grid: &Grid, h: &CycleCover) -> Minimized {
    let mut stats = ReductionStats::default();
    let mut cur = h.clone();
    loop {
        match reduce_once(grid, &cur) {
            ReduceOutcome::Reduced { cover, trace } => {
                stats.record(&trace, true);
                log::trace!("reduced to {} cycles after {} bridges", cover.p(), trace.bridges);
                cur = cover;
            }
            ReduceOutcome::Minimal { cover, certificate, trace } => {
                stats.record(&trace, false);
                return Minimized { cover, certificate, stats };
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComponentResult {
    pub signature: ComponentSignature,
    pub minimum: usize,
    pub cover: CycleCover,
    pub certificate: MinCycleCertificate,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub minimum: usize,
    pub witness: CycleCover,
    pub components: Vec<ComponentResult>,
    pub bound: f64,
    pub stats: ReductionStats,
}

/// Minimum number of cycles over all covers, by minimising one
/// representative of every component.
pub fn search_all_components(grid: &Grid) -> Result<SearchResult> {
    let frame = HeightFrame::new(grid)?;
    let reps = component_representatives(grid, &frame)?;
    let bound = component_bound(grid);
    debug_assert!(reps.len() as f64 <= bound);
    // Components are independent; results keep the signature order.
    let minimized: Vec<(ComponentSignature, Minimized)> =
        reps.into_par_iter().map(|(signature, rep)| (signature, minimize_in_component(grid, &rep))).collect();
    let mut stats = ReductionStats::default();
    let mut components = Vec::with_capacity(minimized.len());
    for (signature, m) in minimized {
        debug_assert_eq!(frame.signature(grid, &m.cover), signature);
        stats.merge(&m.stats);
        components.push(ComponentResult { signature, minimum: m.cover.p(), cover: m.cover, certificate: m.certificate });
    }
    let best = components.iter().min_by_key(|c| c.minimum).ok_or(Error::NoCover)?;
    Ok(SearchResult { minimum: best.minimum, witness: best.cover.clone(), components, bound, stats })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictReason {
    NotTwoConnected,
    NoCover,
    MinimumCycles(usize),
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub hamiltonian: bool,
    pub reason: VerdictReason,
    /// The Hamiltonian cycle as a closed vertex sequence.
    pub cycle: Option<Vec<LatticePoint>>,
    pub search: Option<SearchResult>,
}

pub fn is_hamiltonian(g: &GridGraph) -> Verdict {
    let not = |reason| Verdict { hamiltonian: false, reason, cycle: None, search: None };
    if g.vertex_count() < 4 || !g.is_two_connected() {
        return not(VerdictReason::NotTwoConnected);
    }
    let Ok(grid) = Grid::new(g.clone()) else {
        return not(VerdictReason::NotTwoConnected);
    };
    match search_all_components(&grid) {
        Err(_) => not(VerdictReason::NoCover),
        Ok(search) => {
            let hamiltonian = search.minimum == 1;
            let cycle = hamiltonian.then(|| search.witness.walk(g, 0).into_iter().map(|v| g.point(v)).collect());
            Verdict { hamiltonian, reason: VerdictReason::MinimumCycles(search.minimum), cycle, search: Some(search) }
        }
    }
}
