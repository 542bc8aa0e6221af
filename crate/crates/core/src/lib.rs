//! Exact combinatorics for nearest-neighbour resonating-valence-bond states on
//! small rectangular lattices with holes.
//!
//! * [`lattice`]: geometry, sublattices, balanced hole configurations.
//! * [`matching`]: dimer-covering enumeration and exact counts.
//! * [`norm`]: transition-graph loops, covering overlaps and the RVB norm.
//! * [`oracle`]: explicit state vectors used to validate the formulas.
//! * [`entanglement`]: geometric entanglement and its hole-averaged curves.

pub mod entanglement;
pub mod lattice;
pub mod matching;
pub mod norm;
pub mod oracle;

pub use entanglement::{
    average_entanglement, geometric_entanglement, separable_maximizer_probe, sweep, CurvePoint,
    EntanglementCurve, EntanglementError, EntanglementValue, ExclusionPolicy, SweepGuard,
    SweepOptions,
};
pub use lattice::{
    enumerate_hole_configs, is_coverable, pathological_probability_estimate, Boundary, HoleConfig,
    Lattice, LatticeError, LatticeSpec, Sublattice,
};
pub use matching::{
    count_coverings, enumerate_coverings, fisher_count, periodic_entropy_estimate, CoveringCount,
    Dimer, DimerCovering, MatchError,
};
pub use norm::{loop_decompose, norm_value, overlap, superpose, LoopDecomposition, NormValue, TransitionGraph};
pub use oracle::{oracle_check, statevector_oracle, OracleRecord, OracleReport};
