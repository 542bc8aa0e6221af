//! Overlaps between dimer coverings via transition-graph loops, and the RVB
//! norm assembled from them.
//!
//! With every singlet written A-site first, two covering states on a
//! bipartite lattice overlap as
//!
//! ```text
//! <c1|c2> = prod over loops 2^(1 - len/2) = 2^(dl + ndl - D)
//! ```
//!
//! where `D` is the number of dimers in a covering and a doubled dimer counts
//! as a loop of length 2. The squared norm of the unnormalized superposition
//! of `C` coverings is therefore `R_hat / 2^D` with `R_hat = sum 2^(dl+ndl)`
//! over ordered covering pairs.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::mask_to_sites;
use crate::matching::DimerCovering;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormError {
    #[error("coverings are over different occupied site sets")]
    MismatchedSites,
    #[error("site {site} has degree {degree} in the transition graph, expected 2")]
    DegreeViolation { site: usize, degree: usize },
    #[error("edge ({0}, {1}) touches a site outside the graph")]
    StrayEdge(usize, usize),
    #[error("no coverings supplied")]
    Empty,
}

/// Multigraph union of two coverings over the same occupied sites.
///
/// Stored as per-site neighbour lists, repeated entries marking a doubled edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGraph {
    sites: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

impl TransitionGraph {
    /// A multigraph on `sites` from an explicit edge list; degree is checked
    /// later by [`loop_decompose`].
    pub fn from_edges(sites: &[usize], edges: &[(usize, usize)]) -> Result<Self, NormError> {
        let mut sites = sites.to_vec();
        sites.sort_unstable();
        sites.dedup();
        let mut adjacency = vec![Vec::with_capacity(2); sites.len()];
        for &(u, v) in edges {
            let (Ok(i), Ok(j)) = (sites.binary_search(&u), sites.binary_search(&v)) else {
                return Err(NormError::StrayEdge(u, v));
            };
            adjacency[i].push(v);
            adjacency[j].push(u);
        }
        Ok(TransitionGraph { sites, adjacency })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    /// Summed adjacency matrix over the graph's sites: 2 marks a shared dimer.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.sites.len();
        let mut m = vec![vec![0u8; n]; n];
        for (i, list) in self.adjacency.iter().enumerate() {
            for v in list {
                let j = self.sites.binary_search(v).expect("edge endpoint is a graph site");
                m[i][j] += 1;
            }
        }
        m
    }

    fn index(&self, site: usize) -> usize {
        self.sites.binary_search(&site).expect("edge endpoint is a graph site")
    }
}

/// Renders a small integer matrix as whitespace-separated rows.
pub fn format_matrix(matrix: &[Vec<u8>]) -> String {
    let mut out = String::new();
    for row in matrix {
        let cells: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Cycle census of a transition graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopDecomposition {
    /// Doubled edges (shared dimers).
    pub dl: usize,
    /// Alternating cycles of length at least 4.
    pub ndl: usize,
    /// Lengths of the nondegenerate loops in sites, ascending.
    pub lengths: Vec<usize>,
}

impl LoopDecomposition {
    pub fn loops(&self) -> usize {
        self.dl + self.ndl
    }

    pub fn sites_covered(&self) -> usize {
        2 * self.dl + self.lengths.iter().sum::<usize>()
    }
}

pub fn superpose(c1: &DimerCovering, c2: &DimerCovering) -> Result<TransitionGraph, NormError> {
    if c1.occupied_mask() != c2.occupied_mask() {
        return Err(NormError::MismatchedSites);
    }
    let edges: Vec<(usize, usize)> =
        c1.dimers().iter().chain(c2.dimers()).map(|d| (d.a, d.b)).collect();
    TransitionGraph::from_edges(&mask_to_sites(c1.occupied_mask()), &edges)
}

pub fn loop_decompose(tg: &TransitionGraph) -> Result<LoopDecomposition, NormError> {
    for (i, list) in tg.adjacency.iter().enumerate() {
        if list.len() != 2 {
            return Err(NormError::DegreeViolation { site: tg.sites[i], degree: list.len() });
        }
    }
    let mut visited = vec![false; tg.sites.len()];
    let mut dl = 0;
    let mut lengths = Vec::new();
    for start in 0..tg.sites.len() {
        if visited[start] {
            continue;
        }
        let [x, y] = [tg.adjacency[start][0], tg.adjacency[start][1]];
        if x == y {
            visited[start] = true;
            visited[tg.index(x)] = true;
            dl += 1;
            continue;
        }
        let mut prev = start;
        let mut cur = start;
        let mut len = 0;
        loop {
            visited[cur] = true;
            len += 1;
            let [p, q] = [tg.index(tg.adjacency[cur][0]), tg.index(tg.adjacency[cur][1])];
            let next = if p != prev { p } else { q };
            prev = cur;
            cur = next;
            if cur == start {
                break;
            }
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    Ok(LoopDecomposition { dl, ndl: lengths.len(), lengths })
}

/// `(dl, ndl)` straight from two partner maps over the `occupied` sites.
pub(crate) fn loop_counts(first: &[u8], second: &[u8], occupied: u64) -> (u32, u32) {
    let mut unvisited = occupied;
    let (mut dl, mut ndl) = (0u32, 0u32);
    while unvisited != 0 {
        let start = unvisited.trailing_zeros() as usize;
        let p = first[start] as usize;
        if second[start] as usize == p {
            dl += 1;
            unvisited &= !(1 << start | 1 << p);
            continue;
        }
        let mut cur = start;
        loop {
            let mid = first[cur] as usize;
            unvisited &= !(1 << cur | 1 << mid);
            cur = second[mid] as usize;
            if cur == start {
                break;
            }
        }
        ndl += 1;
    }
    (dl, ndl)
}

/// `<c1|c2> = 2^(dl + ndl - D)` as an exact dyadic rational.
pub fn overlap(c1: &DimerCovering, c2: &DimerCovering) -> Result<Ratio<u64>, NormError> {
    let census = loop_decompose(&superpose(c1, c2)?)?;
    let deficit = c1.len() - census.loops();
    Ok(Ratio::new(1, 1u64 << deficit))
}

/// Exact norm sums over all ordered covering pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormValue {
    /// `sum 2^(dl+ndl)`; the squared norm times `2^dimers`.
    pub kohmoto_sum: u128,
    /// `sum 2^dl * 4^ndl`, the alternative loop weighting.
    pub paper_variant: u128,
    pub coverings: u128,
    /// Dimers per covering.
    pub dimers: usize,
}

impl NormValue {
    /// Squared norm of the unnormalized covering superposition.
    pub fn norm_squared(&self) -> f64 {
        self.kohmoto_sum as f64 / 2f64.powi(self.dimers as i32)
    }

    /// `norm_squared` as an exact ratio.
    pub fn norm_squared_exact(&self) -> Ratio<u128> {
        Ratio::new(self.kohmoto_sum, 1u128 << self.dimers)
    }
}

/// Sums loop weights over all `C^2` ordered pairs of `coverings`.
///
/// Off-diagonal pairs are visited once and doubled; the result is exact and
/// independent of scheduling.
pub fn norm_value(coverings: &[DimerCovering]) -> Result<NormValue, NormError> {
    let first = coverings.first().ok_or(NormError::Empty)?;
    let occupied = first.occupied_mask();
    if coverings.iter().any(|c| c.occupied_mask() != occupied) {
        return Err(NormError::MismatchedSites);
    }
    let num_sites = (64 - occupied.leading_zeros()) as usize;
    let partners: Vec<Vec<u8>> = coverings.iter().map(|c| c.partner_map(num_sites)).collect();
    let dimers = first.len();

    let row = |i: usize| -> (u128, u128) {
        let (mut k, mut p) = (0u128, 0u128);
        for j in i..partners.len() {
            let (dl, ndl) = loop_counts(&partners[i], &partners[j], occupied);
            let mult = if i == j { 1 } else { 2 };
            k += mult << (dl + ndl);
            p += mult << (dl + 2 * ndl);
        }
        (k, p)
    };
    let (kohmoto_sum, paper_variant) = if partners.len() > 64 {
        (0..partners.len())
            .into_par_iter()
            .map(row)
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    } else {
        (0..partners.len()).map(row).fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    };

    Ok(NormValue { kohmoto_sum, paper_variant, coverings: coverings.len() as u128, dimers })
}
