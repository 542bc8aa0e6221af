//! Geometric entanglement of holed RVB states and its average over hole
//! placements.
//!
//! For a coverable configuration with `C` coverings of `D` dimers each, the
//! antiferromagnetic basis state picks up `C * 2^(-D/2)` from the unnormalized
//! superposition, whose squared norm is `R_hat / 2^D`. Taking that basis
//! state as the closest product state gives
//!
//! ```text
//! E = -2 log2( C 2^(-D/2) / sqrt(R_hat / 2^D) ) = log2(R_hat / C^2)
//! ```

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{hole_configs, Boundary, HoleConfig, Lattice, LatticeError, LatticeSpec};
use crate::matching::{count_by_backtracking, enumerate_coverings, CoveringCount};
use crate::norm::norm_value;
use crate::oracle::{rvb_statevector, OracleError};

/// Largest occupied-site count accepted by [`separable_maximizer_probe`].
pub const PROBE_MAX_SITES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EntanglementError {
    #[error("hole configuration {0:?} admits no dimer covering")]
    NotCoverable(Vec<usize>),
    #[error("entanglement sweeps need open boundaries, got {0}")]
    PeriodicSweep(LatticeSpec),
    #[error("{sites} occupied sites exceed the probe limit of {max}")]
    ProbeTooLarge { sites: usize, max: usize },
    #[error("sweep needs {configs} hole configurations, above the guard of {max}")]
    TooManyConfigs { configs: u128, max: u128 },
    #[error("hole-free lattice has {coverings} coverings, above the guard of {max}")]
    TooManyCoverings { coverings: u128, max: u128 },
    #[error("max_holes {max_holes} exceeds the {sites} lattice sites")]
    TooManyHoles { max_holes: usize, sites: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Entanglement of one holed RVB state, with the exact integers behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementValue {
    /// Bits.
    pub value: f64,
    pub coverings: CoveringCount,
    pub kohmoto_sum: u128,
    pub paper_variant: u128,
    pub dimers: usize,
}

pub fn geometric_entanglement(
    lat: &Lattice,
    holes: &HoleConfig,
) -> Result<EntanglementValue, EntanglementError> {
    config_entanglement(lat, holes).ok_or_else(|| EntanglementError::NotCoverable(holes.sites()))
}

fn config_entanglement(lat: &Lattice, holes: &HoleConfig) -> Option<EntanglementValue> {
    let coverings = enumerate_coverings(lat, holes);
    if coverings.is_empty() {
        return None;
    }
    let nv = norm_value(&coverings).expect("coverings share one occupied set");
    let c = nv.coverings as f64;
    Some(EntanglementValue {
        value: (nv.kohmoto_sum as f64 / (c * c)).log2(),
        coverings: CoveringCount(nv.coverings),
        kohmoto_sum: nv.kohmoto_sum,
        paper_variant: nv.paper_variant,
        dimers: nv.dimers,
    })
}

/// What to do with hole configurations that admit no covering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionPolicy {
    /// Leave them out of the average.
    #[default]
    Drop,
    /// Average them in with entanglement 0.
    IncludeAsZero,
}

impl ExclusionPolicy {
    pub fn distribution_label(self) -> &'static str {
        match self {
            ExclusionPolicy::Drop => "uniform-coverable",
            ExclusionPolicy::IncludeAsZero => "uniform-all-zero-for-uncoverable",
        }
    }
}

/// Work limits checked before a sweep starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepGuard {
    pub max_configs: u128,
    pub max_hole_free_coverings: u128,
}

impl Default for SweepGuard {
    fn default() -> Self {
        SweepGuard { max_configs: 20_000_000, max_hole_free_coverings: 50_000 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    pub exclusion: ExclusionPolicy,
    pub keep_details: bool,
    pub guard: SweepGuard,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigDetail {
    pub holes: Vec<usize>,
    pub coverings: u128,
    pub kohmoto_sum: u128,
    /// `None` for configurations without a covering.
    pub entanglement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub num_holes: usize,
    /// `n / L`.
    pub density: f64,
    pub avg_entanglement: f64,
    pub config_count: usize,
    pub excluded_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Vec<ConfigDetail>>,
}

/// Uniform average of the entanglement over all balanced `num_holes`-hole
/// configurations, handling uncoverable ones per `opts.exclusion`.
///
/// Per-configuration work runs in parallel; the final sum is taken in
/// configuration order so results are bit-reproducible.
pub fn average_entanglement(
    lat: &Lattice,
    num_holes: usize,
    opts: &SweepOptions,
) -> Result<CurvePoint, EntanglementError> {
    let configs: Vec<HoleConfig> = hole_configs(lat, num_holes)?.collect();
    let results: Vec<Option<EntanglementValue>> =
        configs.par_iter().map(|h| config_entanglement(lat, h)).collect();

    let values: Vec<Option<f64>> = results.iter().map(|r| r.map(|v| v.value)).collect();
    let (avg, used, excluded) = summarize(&values, opts.exclusion);
    let details = opts.keep_details.then(|| {
        configs
            .iter()
            .zip(&results)
            .map(|(h, r)| ConfigDetail {
                holes: h.sites(),
                coverings: r.map_or(0, |v| v.coverings.0),
                kohmoto_sum: r.map_or(0, |v| v.kohmoto_sum),
                entanglement: r.map(|v| v.value),
            })
            .collect()
    });
    Ok(CurvePoint {
        num_holes,
        density: (num_holes / 2) as f64 / lat.half_sites() as f64,
        avg_entanglement: avg,
        config_count: used,
        excluded_count: excluded,
        details,
    })
}

/// `(average, averaged count, uncoverable count)`, summed in slice order.
fn summarize(values: &[Option<f64>], policy: ExclusionPolicy) -> (f64, usize, usize) {
    let mut sum = 0.0f64;
    let mut used = 0usize;
    let mut excluded = 0usize;
    for v in values {
        match v {
            Some(e) => {
                sum += e;
                used += 1;
            }
            None => {
                excluded += 1;
                if policy == ExclusionPolicy::IncludeAsZero {
                    used += 1;
                }
            }
        }
    }
    (if used == 0 { 0.0 } else { sum / used as f64 }, used, excluded)
}

/// Average entanglement against hole count for one lattice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementCurve {
    pub rows: usize,
    pub cols: usize,
    pub boundary: Boundary,
    pub distribution: &'static str,
    pub points: Vec<CurvePoint>,
}

pub const CSV_HEADER: &str =
    "rows,cols,boundary,num_holes,density,avg_entanglement,config_count,excluded_count";

impl EntanglementCurve {
    /// Highest point among those with at least one configuration; first wins ties.
    pub fn peak(&self) -> Option<&CurvePoint> {
        self.points.iter().filter(|p| p.config_count > 0).fold(None, |best, p| match best {
            Some(b) if b.avg_entanglement >= p.avg_entanglement => Some(b),
            _ => Some(p),
        })
    }

    pub fn point(&self, num_holes: usize) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.num_holes == num_holes)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.rows,
                self.cols,
                self.boundary,
                p.num_holes,
                p.density,
                p.avg_entanglement,
                p.config_count,
                p.excluded_count
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }
}

/// Total balanced configurations over hole counts `0, 2, ..., max_holes`.
pub fn sweep_config_total(lat: &Lattice, max_holes: usize) -> u128 {
    let l = lat.half_sites() as u128;
    (0..=(max_holes / 2).min(lat.half_sites()) as u128)
        .map(|n| {
            let c = (0..n).fold(1u128, |acc, i| acc * (l - i) / (i + 1));
            c * c
        })
        .sum()
}

/// One curve point per even hole count up to `max_holes`.
pub fn sweep(
    lat: &Lattice,
    max_holes: usize,
    opts: &SweepOptions,
) -> Result<EntanglementCurve, EntanglementError> {
    if lat.boundary() != Boundary::Open {
        return Err(EntanglementError::PeriodicSweep(lat.spec()));
    }
    if max_holes > lat.num_sites() {
        return Err(EntanglementError::TooManyHoles { max_holes, sites: lat.num_sites() });
    }
    let configs = sweep_config_total(lat, max_holes);
    if configs > opts.guard.max_configs {
        return Err(EntanglementError::TooManyConfigs { configs, max: opts.guard.max_configs });
    }
    let coverings = count_by_backtracking(lat, &HoleConfig::empty()).0;
    if coverings > opts.guard.max_hole_free_coverings {
        return Err(EntanglementError::TooManyCoverings {
            coverings,
            max: opts.guard.max_hole_free_coverings,
        });
    }
    let points = (0..=max_holes)
        .step_by(2)
        .map(|h| average_entanglement(lat, h, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EntanglementCurve {
        rows: lat.rows(),
        cols: lat.cols(),
        boundary: lat.boundary(),
        distribution: opts.exclusion.distribution_label(),
        points,
    })
}

/// Best product-state overlap found by the probe next to the
/// antiferromagnetic-basis overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeResult {
    pub best_overlap: f64,
    pub af_overlap: f64,
}

impl ProbeResult {
    /// How far the best product state beats the antiferromagnetic one.
    pub fn excess(&self) -> f64 {
        self.best_overlap - self.af_overlap
    }
}

/// Numerically maximizes `|<phi_1 ... phi_m | Delta>|` over single-site states
/// by alternating exact single-site updates from `restarts` starting points:
/// the antiferromagnetic basis state first, then Bloch-sphere-uniform random
/// product states from a ChaCha stream seeded with `seed`.
pub fn separable_maximizer_probe(
    lat: &Lattice,
    holes: &HoleConfig,
    restarts: usize,
    seed: u64,
) -> Result<ProbeResult, EntanglementError> {
    let occupied = holes.occupied_mask(lat).count_ones() as usize;
    if occupied > PROBE_MAX_SITES {
        return Err(EntanglementError::ProbeTooLarge { sites: occupied, max: PROBE_MAX_SITES });
    }
    let state = rvb_statevector(lat, holes)?;
    let norm = state.norm();
    let psi: Vec<Complex64> = state.amplitudes.iter().map(|&a| Complex64::new(a / norm, 0.0)).collect();
    let m = state.sites.len();
    let af_overlap = psi[state.af_index].norm();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = af_overlap;
    for start in 0..restarts.max(1) {
        let mut sites: Vec<[Complex64; 2]> = if start == 0 {
            (0..m)
                .map(|i| {
                    if state.af_index >> i & 1 == 1 {
                        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
                    } else {
                        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
                    }
                })
                .collect()
        } else {
            (0..m).map(|_| random_qubit(&mut rng)).collect()
        };
        best = best.max(ascend(&psi, &mut sites));
    }
    Ok(ProbeResult { best_overlap: best, af_overlap })
}

fn random_qubit(rng: &mut impl Rng) -> [Complex64; 2] {
    let theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Sweeps single-site updates until the overlap stops improving; returns it.
fn ascend(psi: &[Complex64], sites: &mut [[Complex64; 2]]) -> f64 {
    const MAX_SWEEPS: usize = 2000;
    let mut last = 0.0f64;
    for _ in 0..MAX_SWEEPS {
        let mut current = 0.0;
        for k in 0..sites.len() {
            let v = environment(psi, sites, k);
            let len = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if len > 0.0 {
                sites[k] = [v[0] / len, v[1] / len];
            }
            current = len;
        }
        if sites.is_empty() {
            return psi[0].norm();
        }
        if current - last <= 1e-14 {
            return current.max(last);
        }
        last = current;
    }
    last
}

/// Contracts `psi` with the conjugates of every site state except `k`.
fn environment(psi: &[Complex64], sites: &[[Complex64; 2]], k: usize) -> [Complex64; 2] {
    let m = sites.len();
    let mut cur = psi.to_vec();
    // Sites above k are contracted from the top bit down.
    for j in (k + 1..m).rev() {
        let half = cur.len() / 2;
        let (c0, c1) = (sites[j][0].conj(), sites[j][1].conj());
        for idx in 0..half {
            cur[idx] = cur[idx] * c0 + cur[idx + half] * c1;
        }
        cur.truncate(half);
        debug_assert_eq!(cur.len(), 1 << j);
    }
    // Then sites below k from bit 0 up.
    for site in &sites[..k] {
        let half = cur.len() / 2;
        let (c0, c1) = (site[0].conj(), site[1].conj());
        for idx in 0..half {
            cur[idx] = cur[2 * idx] * c0 + cur[2 * idx + 1] * c1;
        }
        cur.truncate(half);
    }
    [cur[0], cur[1]]
}
