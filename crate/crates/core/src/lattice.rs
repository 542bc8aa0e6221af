//! Rectangular lattice geometry, checkerboard sublattices and balanced hole
//! configurations.
//!
//! Sites are numbered row-major, `site = row * cols + col`. A site belongs to
//! sublattice A when `row + col` is even and to B otherwise, so every nearest
//! neighbour of an A-site is a B-site. Site sets are stored as `u64` bitmasks,
//! which caps a lattice at 64 sites.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap imposed by the bitmask site-set representation.
pub const MAX_SITES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice dimensions must be positive, got {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("a {rows}x{cols} lattice has an odd number of sites")]
    OddSiteCount { rows: usize, cols: usize },
    #[error("a {rows}x{cols} lattice has {sites} sites, above the maximum of {max}")]
    TooManySites { rows: usize, cols: usize, sites: usize, max: usize },
    #[error("periodic wrap on a {rows}x{cols} lattice creates duplicate or self edges; both sides must be at least 3")]
    DegeneratePeriodic { rows: usize, cols: usize },
    #[error("periodic wrap on a {rows}x{cols} lattice is not bipartite; both sides must be even")]
    NonBipartitePeriodic { rows: usize, cols: usize },
    #[error("site {site} is out of range for a lattice with {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("site {0} is listed more than once")]
    DuplicateSite(usize),
    #[error("unbalanced holes: {a} on sublattice A, {b} on sublattice B")]
    Unbalanced { a: usize, b: usize },
    #[error("hole count {0} is odd")]
    OddHoleCount(usize),
    #[error("{pairs} hole pairs requested but each sublattice only has {available} sites")]
    TooManyHoles { pairs: usize, available: usize },
    #[error("the four-hole estimate needs at least 3 sites per sublattice, a {rows}x{cols} lattice has {half}")]
    EstimateDomain { rows: usize, cols: usize, half: usize },
    #[error("cannot parse lattice spec {0:?}; expected RxC:open or RxC:periodic")]
    BadSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Open => f.write_str("open"),
            Boundary::Periodic => f.write_str("periodic"),
        }
    }
}

impl FromStr for Boundary {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            _ => Err(LatticeError::BadSpec(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

/// Parsed form of the `RxC:open|periodic` lattice spec string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    pub rows: usize,
    pub cols: usize,
    pub boundary: Boundary,
}

impl FromStr for LatticeSpec {
    type Err = LatticeError;

    /// Accepts `RxC` (open boundary implied) or `RxC:open` / `RxC:periodic`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::BadSpec(s.to_string());
        let (dims, boundary) = match s.split_once(':') {
            Some((d, b)) => (d, b.parse().map_err(|_| bad())?),
            None => (s, Boundary::Open),
        };
        let (r, c) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
        let rows = r.trim().parse().map_err(|_| bad())?;
        let cols = c.trim().parse().map_err(|_| bad())?;
        Ok(LatticeSpec { rows, cols, boundary })
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}:{}", self.rows, self.cols, self.boundary)
    }
}

impl LatticeSpec {
    pub fn build(&self) -> Result<Lattice, LatticeError> {
        Lattice::new(self.rows, self.cols, self.boundary)
    }
}

/// An immutable rectangular lattice with its bipartite structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    rows: usize,
    cols: usize,
    boundary: Boundary,
    neighbours: Vec<Vec<usize>>,
    neighbour_masks: Vec<u64>,
    a_mask: u64,
    b_mask: u64,
}

impl Lattice {
    /// Builds a lattice with the default 64-site ceiling.
    pub fn new(rows: usize, cols: usize, boundary: Boundary) -> Result<Self, LatticeError> {
        Self::with_max_sites(rows, cols, boundary, MAX_SITES)
    }

    /// Builds a lattice, rejecting anything above `max_sites` (itself capped at 64).
    pub fn with_max_sites(
        rows: usize,
        cols: usize,
        boundary: Boundary,
        max_sites: usize,
    ) -> Result<Self, LatticeError> {
        if rows == 0 || cols == 0 {
            return Err(LatticeError::ZeroDimension { rows, cols });
        }
        let sites = rows * cols;
        if !sites.is_multiple_of(2) {
            return Err(LatticeError::OddSiteCount { rows, cols });
        }
        let max = max_sites.min(MAX_SITES);
        if sites > max {
            return Err(LatticeError::TooManySites { rows, cols, sites, max });
        }
        if boundary == Boundary::Periodic {
            if rows < 3 || cols < 3 {
                return Err(LatticeError::DegeneratePeriodic { rows, cols });
            }
            if !rows.is_multiple_of(2) || !cols.is_multiple_of(2) {
                return Err(LatticeError::NonBipartitePeriodic { rows, cols });
            }
        }

        let mut neighbours = vec![Vec::with_capacity(4); sites];
        let mut link = |u: usize, v: usize| {
            neighbours[u].push(v);
            neighbours[v].push(u);
        };
        for r in 0..rows {
            for c in 0..cols {
                let s = r * cols + c;
                if c + 1 < cols {
                    link(s, s + 1);
                } else if boundary == Boundary::Periodic {
                    link(s, r * cols);
                }
                if r + 1 < rows {
                    link(s, s + cols);
                } else if boundary == Boundary::Periodic {
                    link(s, c);
                }
            }
        }
        for list in &mut neighbours {
            list.sort_unstable();
        }
        let neighbour_masks = neighbours
            .iter()
            .map(|list| list.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();

        let (mut a_mask, mut b_mask) = (0u64, 0u64);
        for s in 0..sites {
            if (s / cols + s % cols).is_multiple_of(2) {
                a_mask |= 1 << s;
            } else {
                b_mask |= 1 << s;
            }
        }

        Ok(Lattice { rows, cols, boundary, neighbours, neighbour_masks, a_mask, b_mask })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn spec(&self) -> LatticeSpec {
        LatticeSpec { rows: self.rows, cols: self.cols, boundary: self.boundary }
    }

    pub fn num_sites(&self) -> usize {
        self.rows * self.cols
    }

    /// `L`, the number of sites on each sublattice.
    pub fn half_sites(&self) -> usize {
        self.num_sites() / 2
    }

    pub fn all_sites_mask(&self) -> u64 {
        self.a_mask | self.b_mask
    }

    pub fn sublattice(&self, site: usize) -> Sublattice {
        if self.a_mask >> site & 1 == 1 {
            Sublattice::A
        } else {
            Sublattice::B
        }
    }

    pub fn a_mask(&self) -> u64 {
        self.a_mask
    }

    pub fn b_mask(&self) -> u64 {
        self.b_mask
    }

    pub fn a_sites(&self) -> Vec<usize> {
        mask_to_sites(self.a_mask)
    }

    pub fn b_sites(&self) -> Vec<usize> {
        mask_to_sites(self.b_mask)
    }

    /// Sorted neighbour list of `site`.
    pub fn neighbours(&self, site: usize) -> &[usize] {
        &self.neighbours[site]
    }

    pub fn neighbour_mask(&self, site: usize) -> u64 {
        self.neighbour_masks[site]
    }

    pub fn degree(&self, site: usize) -> usize {
        self.neighbours[site].len()
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_sites() && self.neighbour_masks[u] >> v & 1 == 1
    }

    /// Every undirected edge once, as `(lower, higher)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbours
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site / self.cols, site % self.cols)
    }
}

pub fn mask_to_sites(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// A balanced set of vacant sites: `n` holes on each sublattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct HoleConfig {
    holes_a: u64,
    holes_b: u64,
}

impl HoleConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates an arbitrary list of hole sites against `lat`.
    pub fn from_sites(lat: &Lattice, sites: &[usize]) -> Result<Self, LatticeError> {
        let (mut holes_a, mut holes_b) = (0u64, 0u64);
        for &s in sites {
            if s >= lat.num_sites() {
                return Err(LatticeError::SiteOutOfRange { site: s, sites: lat.num_sites() });
            }
            let bit = 1u64 << s;
            if (holes_a | holes_b) & bit != 0 {
                return Err(LatticeError::DuplicateSite(s));
            }
            match lat.sublattice(s) {
                Sublattice::A => holes_a |= bit,
                Sublattice::B => holes_b |= bit,
            }
        }
        let (a, b) = (holes_a.count_ones() as usize, holes_b.count_ones() as usize);
        if a != b {
            return Err(LatticeError::Unbalanced { a, b });
        }
        Ok(HoleConfig { holes_a, holes_b })
    }

    pub fn holes_a(&self) -> Vec<usize> {
        mask_to_sites(self.holes_a)
    }

    pub fn holes_b(&self) -> Vec<usize> {
        mask_to_sites(self.holes_b)
    }

    /// All hole sites in ascending order.
    pub fn sites(&self) -> Vec<usize> {
        mask_to_sites(self.mask())
    }

    pub fn mask(&self) -> u64 {
        self.holes_a | self.holes_b
    }

    /// `n`, the number of holes on each sublattice.
    pub fn pairs(&self) -> usize {
        self.holes_a.count_ones() as usize
    }

    pub fn num_holes(&self) -> usize {
        2 * self.pairs()
    }

    pub fn occupied_mask(&self, lat: &Lattice) -> u64 {
        lat.all_sites_mask() & !self.mask()
    }
}

fn check_hole_count(lat: &Lattice, num_holes: usize) -> Result<usize, LatticeError> {
    if !num_holes.is_multiple_of(2) {
        return Err(LatticeError::OddHoleCount(num_holes));
    }
    let pairs = num_holes / 2;
    if pairs > lat.half_sites() {
        return Err(LatticeError::TooManyHoles { pairs, available: lat.half_sites() });
    }
    Ok(pairs)
}

fn combination_masks(sites: &[usize], k: usize) -> Vec<u64> {
    sites
        .iter()
        .combinations(k)
        .map(|combo| combo.into_iter().fold(0u64, |m, &s| m | 1 << s))
        .collect()
}

/// Lazily yields all `C(L, n)^2` balanced configurations with `num_holes = 2n`
/// holes. Order is lexicographic in (A-holes, B-holes), A outermost.
pub fn hole_configs(
    lat: &Lattice,
    num_holes: usize,
) -> Result<impl Iterator<Item = HoleConfig> + Clone, LatticeError> {
    let pairs = check_hole_count(lat, num_holes)?;
    let a_choices = combination_masks(&lat.a_sites(), pairs);
    let b_choices = combination_masks(&lat.b_sites(), pairs);
    Ok(a_choices.into_iter().flat_map(move |holes_a| {
        b_choices.clone().into_iter().map(move |holes_b| HoleConfig { holes_a, holes_b })
    }))
}

/// Materialized form of [`hole_configs`].
pub fn enumerate_hole_configs(
    lat: &Lattice,
    num_holes: usize,
) -> Result<Vec<HoleConfig>, LatticeError> {
    Ok(hole_configs(lat, num_holes)?.collect())
}

/// Whether the occupied sites admit a nearest-neighbour perfect matching.
///
/// Uses augmenting-path bipartite matching (Kuhn) from occupied A-sites into
/// occupied B-sites; it shares no code with the covering enumerator.
pub fn is_coverable(lat: &Lattice, holes: &HoleConfig) -> bool {
    let occupied = holes.occupied_mask(lat);
    let a_sites = mask_to_sites(occupied & lat.a_mask());
    if a_sites.len() != (occupied & lat.b_mask()).count_ones() as usize {
        return false;
    }
    let mut match_of_b = vec![usize::MAX; lat.num_sites()];
    for &a in &a_sites {
        let mut seen = 0u64;
        if !augment(lat, occupied, a, &mut seen, &mut match_of_b) {
            return false;
        }
    }
    true
}

fn augment(lat: &Lattice, occupied: u64, a: usize, seen: &mut u64, match_of_b: &mut [usize]) -> bool {
    for &b in lat.neighbours(a) {
        let bit = 1u64 << b;
        if occupied & bit == 0 || *seen & bit != 0 {
            continue;
        }
        *seen |= bit;
        if match_of_b[b] == usize::MAX || augment(lat, occupied, match_of_b[b], seen, match_of_b) {
            match_of_b[b] = a;
            return true;
        }
    }
    false
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Closed-form estimate of the fraction of four-hole configurations on an
/// `a x b` lattice that are pathological (a corner site fenced off by holes):
/// `4 (C(ab/2 - 1, 2) - 1) / C(ab/2, 2)^2`.
///
/// Only the fenced-corner motif is counted; compare with
/// [`uncoverable_count`] for the exact fraction.
pub fn pathological_probability_estimate(a: usize, b: usize) -> Result<Ratio<u64>, LatticeError> {
    if a == 0 || b == 0 {
        return Err(LatticeError::ZeroDimension { rows: a, cols: b });
    }
    if !(a * b).is_multiple_of(2) {
        return Err(LatticeError::OddSiteCount { rows: a, cols: b });
    }
    let half = (a * b / 2) as u64;
    if half < 3 {
        return Err(LatticeError::EstimateDomain { rows: a, cols: b, half: half as usize });
    }
    let numerator = 4 * (binomial(half - 1, 2) - 1);
    let denominator = binomial(half, 2).pow(2);
    Ok(Ratio::new(numerator, denominator))
}

/// `(total, uncoverable)` balanced configurations with `num_holes` holes.
pub fn uncoverable_count(lat: &Lattice, num_holes: usize) -> Result<(usize, usize), LatticeError> {
    let mut total = 0;
    let mut bad = 0;
    for holes in hole_configs(lat, num_holes)? {
        total += 1;
        if !is_coverable(lat, &holes) {
            bad += 1;
        }
    }
    Ok((total, bad))
}
