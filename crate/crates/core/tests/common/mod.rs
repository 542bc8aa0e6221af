//! Checks shared by the property and acceptance suites. Each returns a short
//! summary on success and a description of the first violation otherwise.

#![allow(dead_code)]

use rvb_core::lattice::{enumerate_hole_configs, Boundary, HoleConfig, Lattice};
use rvb_core::matching::{count_by_backtracking, permanent_count};
use rvb_core::norm::{loop_decompose, overlap, superpose};
use rvb_core::{enumerate_coverings, geometric_entanglement, is_coverable, statevector_oracle};

pub type Check = Result<String, String>;

/// Open rectangles with an even site count in `min_sites..=max_sites`, both orientations.
pub fn open_rectangles(min_sites: usize, max_sites: usize) -> Vec<Lattice> {
    let mut out = Vec::new();
    for rows in 1..=max_sites {
        for cols in 1..=max_sites {
            let n = rows * cols;
            if n % 2 == 0 && (min_sites..=max_sites).contains(&n) {
                out.push(Lattice::new(rows, cols, Boundary::Open).unwrap());
            }
        }
    }
    out
}

/// Every lattice the state-vector oracle can see with up to two hole pairs:
/// rectangles of at most 20 sites (occupied sites capped at 16 per config)
/// plus the 4x4 torus.
pub fn oracle_lattices() -> Vec<Lattice> {
    let mut out = open_rectangles(2, 20);
    out.push(Lattice::new(4, 4, Boundary::Periodic).unwrap());
    out
}

/// Balanced configs with at most `max_pairs` pairs and at most `max_occupied` occupied sites.
pub fn configs_up_to(lat: &Lattice, max_pairs: usize, max_occupied: usize) -> Vec<HoleConfig> {
    (0..=max_pairs.min(lat.half_sites()))
        .filter(|n| lat.num_sites() - 2 * n <= max_occupied)
        .flat_map(|n| enumerate_hole_configs(lat, 2 * n).unwrap())
        .collect()
}

#[derive(Debug, Default, Clone, Copy)]
pub struct OracleStats {
    pub configs: usize,
    pub max_norm_rel: f64,
    pub max_entanglement_abs: f64,
    pub max_af_vs_max_rel: f64,
}

/// Norm, entanglement and af-maximality against the state vector over every
/// coverable config with `n <= 2` and at most 16 occupied sites.
pub fn oracle_sweep(lattices: &[Lattice]) -> OracleStats {
    let mut stats = OracleStats::default();
    for lat in lattices {
        for h in configs_up_to(lat, 2, 16) {
            let covers = enumerate_coverings(lat, &h);
            if covers.is_empty() {
                continue;
            }
            let rec = statevector_oracle(lat, &h).unwrap();
            let nv = rvb_core::norm_value(&covers).unwrap();
            let oracle_sq = rec.norm * rec.norm;
            let combinatorial_sq = nv.kohmoto_sum as f64 / 2f64.powi(nv.dimers as i32);
            stats.max_norm_rel = stats.max_norm_rel.max((combinatorial_sq - oracle_sq).abs() / oracle_sq);
            let e = geometric_entanglement(lat, &h).unwrap().value;
            let e_oracle = -2.0 * (rec.af_amplitude / rec.norm).log2();
            stats.max_entanglement_abs = stats.max_entanglement_abs.max((e - e_oracle).abs());
            stats.max_af_vs_max_rel = stats
                .max_af_vs_max_rel
                .max((rec.basis_max_amplitude - rec.af_amplitude).abs() / rec.basis_max_amplitude);
            stats.configs += 1;
        }
    }
    stats
}

pub fn bipartiteness(lattices: &[Lattice]) -> Check {
    let mut edges = 0;
    for lat in lattices {
        for (u, v) in lat.edges() {
            if lat.sublattice(u) == lat.sublattice(v) {
                return Err(format!("{}: edge ({u},{v}) joins one sublattice", lat.spec()));
            }
            edges += 1;
        }
        if lat.a_sites().len() != lat.half_sites() || lat.b_sites().len() != lat.half_sites() {
            return Err(format!("{}: unequal sublattices", lat.spec()));
        }
    }
    Ok(format!("{edges} edges over {} lattices", lattices.len()))
}

/// Loop conservation, overlap positivity and symmetry over every covering
/// pair of every given config.
pub fn loop_and_overlap_properties(lat: &Lattice, configs: &[HoleConfig], pair_cap: usize) -> Check {
    let mut pairs = 0;
    for h in configs {
        let covers = enumerate_coverings(lat, h);
        let occupied = h.occupied_mask(lat).count_ones() as usize;
        for x in covers.iter().take(pair_cap) {
            for y in covers.iter().take(pair_cap) {
                let d = loop_decompose(&superpose(x, y).unwrap()).unwrap();
                if d.sites_covered() != occupied {
                    return Err(format!("{} {:?}: 2dl+sum = {} != {occupied}", lat.spec(), h.sites(), d.sites_covered()));
                }
                if d.lengths.iter().any(|&l| l < 4 || l % 2 != 0) {
                    return Err(format!("{}: bad loop lengths {:?}", lat.spec(), d.lengths));
                }
                let swapped = loop_decompose(&superpose(y, x).unwrap()).unwrap();
                if swapped != d {
                    return Err(format!("{}: census not symmetric", lat.spec()));
                }
                let (o1, o2) = (overlap(x, y).unwrap(), overlap(y, x).unwrap());
                if o1 != o2 || *o1.numer() == 0 {
                    return Err(format!("{}: overlap {o1} vs {o2}", lat.spec()));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

/// `C = 1` implies `E = m/2` exactly.
pub fn unique_covering_entanglement(lat: &Lattice, configs: &[HoleConfig]) -> Check {
    let mut hits = 0;
    for h in configs {
        if count_by_backtracking(lat, h).0 != 1 {
            continue;
        }
        let m = h.occupied_mask(lat).count_ones() as f64;
        let e = geometric_entanglement(lat, h).unwrap().value;
        if e != m / 2.0 {
            return Err(format!("{} {:?}: E = {e}, expected {}", lat.spec(), h.sites(), m / 2.0));
        }
        hits += 1;
    }
    Ok(format!("{hits} unique-covering configs"))
}

/// Enumeration, backtracking count and permanent agree; coverability matches `count > 0`.
pub fn counting_consistency(lat: &Lattice, configs: &[HoleConfig]) -> Check {
    for h in configs {
        let listed = enumerate_coverings(lat, h);
        let counted = count_by_backtracking(lat, h).0;
        let perm = permanent_count(lat, h).unwrap().0;
        if listed.len() as u128 != counted || counted != perm {
            return Err(format!(
                "{} {:?}: enumerate {} count {counted} permanent {perm}",
                lat.spec(),
                h.sites(),
                listed.len()
            ));
        }
        if is_coverable(lat, h) != (counted > 0) {
            return Err(format!("{} {:?}: coverability disagrees with count {counted}", lat.spec(), h.sites()));
        }
        if let Some(bad) = listed.iter().find(|c| !c.is_valid(lat)) {
            return Err(format!("{}: invalid covering {bad}", lat.spec()));
        }
    }
    Ok(format!("{} configs", configs.len()))
}
