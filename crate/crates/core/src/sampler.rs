//! Random walk on the covers with one or two cycles of a component, moving
//! whole rows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{boundary_faces, is_boundary_face, BoundarySet, CycleCover};
use crate::error::{Error, Result};
use crate::grid::{FaceId, Grid};
use crate::hamilton::{minimize_in_component, search_all_components};
use crate::height::{apply_row, row_from, ComponentSignature, HeightFrame};

pub const GENERATOR_ID: &str = "chacha8";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    /// A row moved in a Hamiltonian cover.
    FromOne,
    /// A row starting on the boundary between the two cycles.
    Boundary,
    /// An even row starting off the boundary, keeping two cycles.
    EvenInterior,
}

/// The transition rule applied to a chosen square, before the symmetry
/// check: the moved cover, or `None` for a self-loop.
pub fn propose_raw(grid: &Grid, h: &CycleCover, f: FaceId) -> Option<(CycleCover, MoveKind)> {
    let row = row_from(grid, h, f)?;
    let kind = match h.p() {
        1 => MoveKind::FromOne,
        2 if is_boundary_face(grid, h, f) => MoveKind::Boundary,
        2 if row.is_even() => MoveKind::EvenInterior,
        _ => return None,
    };
    let mut out = h.clone();
    apply_row(grid, &mut out, &row).ok()?;
    let ok = match kind {
        MoveKind::EvenInterior => out.p() == 2,
        _ => out.p() <= 2,
    };
    ok.then_some((out, kind))
}

/// The transition used by the chain: a raw move is taken only when the
/// raw rule, applied at the start of the reversed row, leads back. This
/// makes the move graph undirected, so every state has the same degree
/// (counting self-loops) and the uniform distribution is stationary.
pub fn propose(grid: &Grid, h: &CycleCover, f: FaceId) -> Option<(CycleCover, MoveKind)> {
    let row = row_from(grid, h, f)?;
    let (out, kind) = propose_raw(grid, h, f)?;
    let back = row.reversed().start();
    match propose_raw(grid, &out, back) {
        Some((again, _)) if &again == h => Some((out, kind)),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct ChainState {
    pub cover: CycleCover,
    pub boundary: BoundarySet,
    pub steps: u64,
}

impl ChainState {
    pub fn new(grid: &Grid, cover: CycleCover) -> Result<Self> {
        if cover.p() > 2 {
            return Err(Error::EmptyTarget);
        }
        let boundary = boundary_faces(grid, &cover);
        Ok(ChainState { cover, boundary, steps: 0 })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub steps: u64,
    /// Defaults to `10 |F|^2` over the square faces.
    pub burn_in: Option<u64>,
    pub max_restarts: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { seed: 0, steps: 10_000, burn_in: None, max_restarts: 16 }
    }
}

impl SamplerConfig {
    pub fn burn_in_for(&self, grid: &Grid) -> u64 {
        self.burn_in.unwrap_or_else(|| {
            let f = grid.square_count() as u64;
            10 * f * f
        })
    }
}

/// Visit and move counts of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub seed: u64,
    pub generator: String,
    pub steps: u64,
    pub visits_p1: u64,
    pub visits_p2: u64,
    pub moves_from_one: u64,
    pub moves_boundary: u64,
    pub moves_even_interior: u64,
    pub self_loops: u64,
}

impl RunStats {
    fn new(seed: u64) -> Self {
        RunStats { seed, generator: GENERATOR_ID.to_string(), ..Default::default() }
    }

    fn count_move(&mut self, kind: Option<MoveKind>) {
        match kind {
            Some(MoveKind::FromOne) => self.moves_from_one += 1,
            Some(MoveKind::Boundary) => self.moves_boundary += 1,
            Some(MoveKind::EvenInterior) => self.moves_even_interior += 1,
            None => self.self_loops += 1,
        }
    }

    fn count_visit(&mut self, p: usize) {
        if p == 1 {
            self.visits_p1 += 1;
        } else {
            self.visits_p2 += 1;
        }
    }
}

/// One transition: a uniformly chosen square, then the rule. Without
/// squares every step is a self-loop.
pub fn step<R: Rng>(grid: &Grid, state: &mut ChainState, rng: &mut R) -> Option<MoveKind> {
    state.steps += 1;
    if grid.square_count() == 0 {
        return None;
    }
    let f = rng.random_range(0..grid.square_count());
    let (next, kind) = propose(grid, &state.cover, f)?;
    state.boundary = boundary_faces(grid, &next);
    state.cover = next;
    Some(kind)
}

/// The starting state for a component: its minimised representative.
fn start_state(grid: &Grid, component: &ComponentSignature) -> Result<CycleCover> {
    let search = search_all_components(grid)?;
    let comp = search
        .components
        .into_iter()
        .find(|c| &c.signature == component)
        .ok_or(Error::EmptyTarget)?;
    if comp.minimum > 2 {
        return Err(Error::EmptyTarget);
    }
    Ok(minimize_in_component(grid, &comp.cover).cover)
}

/// Signature of the component holding the canonical initial cover.
pub fn default_component(grid: &Grid) -> Result<ComponentSignature> {
    let frame = HeightFrame::new(grid)?;
    Ok(frame.signature(grid, frame.reference()))
}

fn run<R: Rng>(grid: &Grid, state: &mut ChainState, rng: &mut R, steps: u64, stats: &mut RunStats) {
    for _ in 0..steps {
        let kind = step(grid, state, rng);
        stats.count_move(kind);
        stats.count_visit(state.cover.p());
        stats.steps += 1;
    }
}

/// The state after burn-in plus `cfg.steps` transitions.
pub fn sample(grid: &Grid, component: &ComponentSignature, cfg: &SamplerConfig) -> Result<(CycleCover, RunStats)> {
    if cfg.steps == 0 {
        return Err(Error::InvalidParams("steps must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = ChainState::new(grid, start_state(grid, component)?)?;
    let mut stats = RunStats::new(cfg.seed);
    run(grid, &mut state, &mut rng, cfg.burn_in_for(grid) + cfg.steps, &mut stats);
    Ok((state.cover, stats))
}

/// A Hamiltonian cycle: the first one-cycle state reached after burn-in,
/// restarting with a fresh burn-in when `cfg.steps` further steps find
/// none.
pub fn sample_hamiltonian(grid: &Grid, component: &ComponentSignature, cfg: &SamplerConfig) -> Result<(CycleCover, RunStats)> {
    let search = search_all_components(grid)?;
    let comp = search.components.iter().find(|c| &c.signature == component).ok_or(Error::NotHamiltonian)?;
    if comp.minimum != 1 {
        return Err(Error::NotHamiltonian);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = ChainState::new(grid, comp.cover.clone())?;
    let mut stats = RunStats::new(cfg.seed);
    let burn = cfg.burn_in_for(grid);
    for _ in 0..=cfg.max_restarts {
        run(grid, &mut state, &mut rng, burn, &mut stats);
        for _ in 0..cfg.steps {
            if state.cover.p() == 1 {
                return Ok((state.cover, stats));
            }
            run(grid, &mut state, &mut rng, 1, &mut stats);
        }
        if state.cover.p() == 1 {
            return Ok((state.cover, stats));
        }
    }
    Err(Error::RestartsExhausted(cfg.max_restarts))
}

/// Fraction of post-burn-in visits spent on Hamiltonian covers.
pub fn estimate_ratio(grid: &Grid, component: &ComponentSignature, cfg: &SamplerConfig) -> Result<(f64, RunStats)> {
    if cfg.steps == 0 {
        return Err(Error::InvalidParams("steps must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = ChainState::new(grid, start_state(grid, component)?)?;
    let mut burn = RunStats::new(cfg.seed);
    run(grid, &mut state, &mut rng, cfg.burn_in_for(grid), &mut burn);
    let mut measured = RunStats::new(cfg.seed);
    run(grid, &mut state, &mut rng, cfg.steps, &mut measured);
    Ok((measured.visits_p1 as f64 / measured.steps as f64, measured))
}
