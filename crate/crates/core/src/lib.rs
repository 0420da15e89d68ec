//! Fast Monte Carlo simulation of greedy routing on Kleinberg's augmented
//! grid G(n, r, p, q).
//!
//! An n-by-n lattice under the Manhattan metric gives every node the nodes
//! within distance `p` as local neighbors plus `q` long-range contacts drawn
//! with probability proportional to distance^(-r). Greedy routing forwards a
//! message to whichever neighbor is closest to the destination; the quantity
//! of interest is the expected number of hops between two uniformly random
//! nodes, e_r(n).
//!
//! Contacts are never materialized into a graph. Each visited node draws its
//! contacts on the fly by dynamic rejection sampling ([`sampler`]): a radius
//! and an angle are drawn in a virtual ball of radius 2(n-1) that contains
//! the grid wherever the node sits, and candidates outside the grid are
//! rejected. The acceptance probability always exceeds 1/8, and the ball
//! distribution is node-independent, so one precomputed table serves every
//! node of every run. That is what makes grids up to millions of nodes per
//! side simulable on a laptop.
//!
//! Randomness is pinned to ChaCha8 with one keyed stream per run, so every
//! estimate is reproducible bit-for-bit for a fixed seed, independent of how
//! many worker threads carry the runs.

pub mod error;
pub mod experiments;
pub mod lattice;
pub mod router;
pub mod sampler;

pub use error::{Error, Result};
pub use experiments::{
    conjectured_exponent, derive_seed, estimate_exponent, estimate_exponent_two_scales,
    find_r_opt, find_threshold, six_degrees_scenarios, sweep_over_n, sweep_over_r,
    threshold_study, value_grid, ExponentEstimate, ScenarioSweep, Side, SweepRow,
    ThresholdResult, ThresholdStudyConfig, SIX_DEGREES_N, SIX_DEGREES_SCENARIOS,
};
pub use lattice::{local_step, manhattan, neighborhood_size, Coord, GridParams, Offset};
pub use router::{best_shortcut, estimate_edt, route_once, EdtEstimate, EstimateConfig};
pub use sampler::{
    check_shortcut_distribution, default_bulk_size, offset_from_angle,
    oracle_shortcut_distribution, uniform_acceptance_probability, DistributionCheck,
    RadiusWeights, ShortcutStream,
};
