use gridham::fixtures::{random_holed, random_polyomino};
use gridham::grid::Grid;
use gridham::hamilton::{search_all_components, verify_certificate, ReductionStats};
use gridham::oracle::{enumerate_covers, min_cycles_bruteforce, z_components, MAX_CAP};

fn check(grid: &Grid, stats: &mut ReductionStats) -> Result<(), String> {
    let cat = match enumerate_covers(grid, 128) {
        Ok(c) => c,
        Err(e) => return Err(format!("oracle: {e}")),
    };
    let res = search_all_components(grid);
    if cat.is_empty() {
        return if res.is_err() { Ok(()) } else { Err("cover found where oracle has none".into()) };
    }
    let res = res.map_err(|e| e.to_string())?;
    stats.merge(&res.stats);
    let z = z_components(grid, &cat);
    let mc = min_cycles_bruteforce(&cat, &z);
    for c in &res.components {
        verify_certificate(grid, &c.certificate).map_err(|e| format!("certificate: {e}"))?;
    }
    if Some(res.minimum) != mc.overall {
        return Err(format!("minimum {} vs oracle {:?}", res.minimum, mc.overall));
    }
    if res.components.len() != z.component_count {
        return Err(format!("{} components vs oracle {}", res.components.len(), z.component_count));
    }
    Ok(())
}

#[test]
fn random_polyominoes_match_oracle() {
    let mut stats = ReductionStats::default();
    let mut bad = 0;
    for seed in 0..300u64 {
        let cells = 4 + (seed as usize % 27);
        let g = random_polyomino(cells, seed).unwrap();
        if !g.is_two_connected() {
            continue;
        }
        let grid = Grid::new(g.clone()).unwrap();
        if let Err(e) = check(&grid, &mut stats) {
            bad += 1;
            eprintln!("seed {seed}: {e}\n{}", g.to_mask());
        }
    }
    for seed in 0..60u64 {
        let g = random_holed(30, seed).unwrap();
        let grid = Grid::new(g.clone()).unwrap();
        if let Err(e) = check(&grid, &mut stats) {
            bad += 1;
            eprintln!("holed seed {seed}: {e}\n{}", g.to_mask());
        }
    }
    eprintln!("{stats:?}");
    assert_eq!(bad, 0);
}

#[test]
fn every_cover_reaches_component_minimum() {
    use gridham::hamilton::minimize_in_component;
    let mut stats = ReductionStats::default();
    let mut bad = 0;
    let mut graphs = Vec::new();
    for seed in 0..200u64 {
        let g = random_polyomino(6 + seed as usize % 20, seed).unwrap();
        if g.is_two_connected() {
            graphs.push(g);
        }
    }
    for seed in 0..40u64 {
        graphs.push(random_holed(30, seed).unwrap());
    }
    for g in graphs {
        let grid = Grid::new(g.clone()).unwrap();
        let Ok(cat) = enumerate_covers(&grid, MAX_CAP) else { continue };
        let z = z_components(&grid, &cat);
        let mc = min_cycles_bruteforce(&cat, &z);
        for i in 0..cat.len().min(3000) {
            let h = cat.cover(grid.graph(), i);
            let m = minimize_in_component(&grid, &h);
            stats.merge(&m.stats);
            let want = mc.per_component[z.component[i]];
            let cert = verify_certificate(&grid, &m.certificate);
            if m.cover.p() != want || cert.is_err() {
                bad += 1;
                if bad < 6 {
                    eprintln!("got {} want {want} cert {cert:?} start p {}\n{}", m.cover.p(), h.p(), g.to_mask());
                }
            }
        }
    }
    eprintln!("{stats:?} bad {bad}");
    assert_eq!(bad, 0);
}

/// Beyond the oracle's reach: covers scrambled by random Z-moves on larger
/// graphs must come back to the minimum found for their component.
#[test]
fn scrambled_covers_on_larger_graphs() {
    use gridham::fixtures::{aztec, rect};
    use gridham::hamilton::minimize_in_component;
    use gridham::height::{z_move, HeightFrame};
    use rand::{Rng, SeedableRng};

    let mut graphs = vec![rect(10, 10).unwrap(), rect(9, 12).unwrap(), aztec(3).unwrap()];
    graphs.extend((0..8).map(|s| random_polyomino(60 + 5 * s, s as u64 + 7).unwrap()));
    graphs.extend((0..4).map(|s| random_holed(49, 500 + s).unwrap()));
    let mut stats = ReductionStats::default();
    let mut checked = 0;
    for g in graphs {
        let grid = Grid::new(g.clone()).unwrap();
        // Unbalanced random shapes have no cover at all.
        let Ok(frame) = HeightFrame::new(&grid) else { continue };
        let best = search_all_components(&grid).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for trial in 0..20 {
            let mut h = frame.reference().clone();
            for _ in 0..trial * 40 {
                let _ = z_move(&grid, &mut h, rng.random_range(0..grid.square_count()));
            }
            let sig = frame.signature(&grid, &h);
            let m = minimize_in_component(&grid, &h);
            stats.merge(&m.stats);
            let comp = best.components.iter().find(|c| c.signature == sig).unwrap();
            assert_eq!(m.cover.p(), comp.minimum, "\n{}", g.to_mask());
            assert_eq!(frame.signature(&grid, &m.cover), sig);
            verify_certificate(&grid, &m.certificate).unwrap();
        }
        checked += 1;
    }
    assert!(checked >= 8);
    assert_eq!(stats.lemma_failures + stats.restore_failures, 0);
}
