//! Greedy routing with contacts generated on the fly, and Monte Carlo
//! estimation of the expected delivery time.
//!
//! No graph is ever materialized: greedy routing never revisits a node (the
//! distance to the target strictly decreases every hop), so the `q` contacts
//! of the current node can be drawn fresh at each hop and discarded after the
//! decision without changing the distribution of the walk.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{local_step, manhattan, Coord, GridParams};
use crate::sampler::{RadiusWeights, ShortcutStream};

/// Monte Carlo configuration: number of routing runs, master seed, and the
/// number of parallel workers. Results are bit-identical for a fixed
/// (seed, runs) regardless of the worker count.
#[derive(Debug, Clone, Copy)]
pub struct EstimateConfig {
    pub runs: u64,
    pub seed: u64,
    pub workers: usize,
}

impl EstimateConfig {
    pub fn new(runs: u64, seed: u64) -> Self {
        let workers = std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1);
        EstimateConfig {
            runs,
            seed,
            workers,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

/// Monte Carlo estimate of the expected delivery time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdtEstimate {
    /// Mean hop count over all runs.
    pub mean_hops: f64,
    /// Sample standard deviation / sqrt(runs).
    pub std_error: f64,
    pub runs: u64,
    /// Accepted / proposed candidates aggregated over every contact drawn.
    pub acceptance_rate: f64,
    /// Computation time only; excludes any output I/O.
    pub wall_time_seconds: f64,
}

impl EdtEstimate {
    /// Proposed / accepted candidates: the mean number of attempts per
    /// contact (1 / acceptance_rate).
    pub fn overhead(&self) -> f64 {
        1.0 / self.acceptance_rate
    }
}

/// Picks the candidate strictly closest to `target`; the earliest drawn wins
/// ties. Returns `None` only for an empty candidate sequence.
pub fn best_shortcut<I>(candidates: I, target: Coord) -> Option<(Coord, u64)>
where
    I: IntoIterator<Item = Coord>,
{
    let mut best: Option<(Coord, u64)> = None;
    for candidate in candidates {
        let dist = manhattan(candidate, target);
        if best.map_or(true, |(_, d)| dist < d) {
            best = Some((candidate, dist));
        }
    }
    best
}

/// Routes one message greedily from `source` to `target` and returns the hop
/// count.
///
/// At each hop the current node draws `q` fresh contacts; the best contact is
/// followed only when strictly closer to the target than the best local
/// neighbor (distance < d - p), otherwise a local move is made. Every hop
/// decreases the distance by at least min(p, d), so the hop count never
/// exceeds the initial distance.
pub fn route_once(
    params: &GridParams,
    source: Coord,
    target: Coord,
    stream: &mut ShortcutStream<'_>,
) -> u64 {
    let p = params.p as u64;
    let mut current = source;
    let mut dist = manhattan(current, target);
    let mut hops = 0u64;
    while dist > 0 {
        let (contact, contact_dist) =
            best_shortcut((0..params.q).map(|_| stream.draw_shortcut(current)), target)
                .expect("q >= 1");
        if contact_dist + p < dist {
            current = contact;
            dist = contact_dist;
        } else if dist <= p {
            current = target;
            dist = 0;
        } else {
            current = local_step(current, target, params.p);
            dist -= p;
        }
        hops += 1;
    }
    hops
}

#[derive(Debug, Default, Clone, Copy)]
struct RunTotals {
    hops: u64,
    hops_sq: u128,
    proposed: u64,
    accepted: u64,
}

impl RunTotals {
    fn merge(self, other: RunTotals) -> RunTotals {
        RunTotals {
            hops: self.hops + other.hops,
            hops_sq: self.hops_sq + other.hops_sq,
            proposed: self.proposed + other.proposed,
            accepted: self.accepted + other.accepted,
        }
    }
}

fn single_run(params: &GridParams, weights: &RadiusWeights, seed: u64, run: u64) -> RunTotals {
    let mut stream = ShortcutStream::keyed(weights, seed, run);
    // Source and target are independent uniform draws; coincidence is allowed
    // and contributes zero hops.
    let source = stream.draw_uniform_node();
    let target = stream.draw_uniform_node();
    let hops = route_once(params, source, target, &mut stream);
    RunTotals {
        hops,
        hops_sq: (hops as u128) * (hops as u128),
        proposed: stream.proposed(),
        accepted: stream.accepted(),
    }
}

/// Estimates the expected delivery time of greedy routing over
/// `config.runs` independent runs, each between a uniformly random source
/// and target.
///
/// Run `i` consumes the random stream keyed by (seed, i), and the reduction
/// uses exact integer sums, so the estimate is reproducible bit-for-bit for a
/// fixed (seed, runs) under any worker count or scheduling.
pub fn estimate_edt(params: &GridParams, config: &EstimateConfig) -> Result<EdtEstimate> {
    params.validate()?;
    if config.runs == 0 {
        return Err(Error::invalid("runs", "must average at least one run"));
    }
    let start = Instant::now();
    let weights = RadiusWeights::new(params.n, params.r)?;

    let totals = if config.workers <= 1 {
        (0..config.runs).fold(RunTotals::default(), |acc, i| {
            acc.merge(single_run(params, &weights, config.seed, i))
        })
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?;
        pool.install(|| {
            (0..config.runs)
                .into_par_iter()
                .fold(RunTotals::default, |acc, i| {
                    acc.merge(single_run(params, &weights, config.seed, i))
                })
                .reduce(RunTotals::default, RunTotals::merge)
        })
    };

    let runs = config.runs as f64;
    let mean_hops = totals.hops as f64 / runs;
    let std_error = if config.runs > 1 {
        let sum = totals.hops as f64;
        let sum_sq = totals.hops_sq as f64;
        let var = ((sum_sq - sum * sum / runs) / (runs - 1.0)).max(0.0);
        (var / runs).sqrt()
    } else {
        0.0
    };
    // No contact is drawn when every run starts at its own target; report a
    // rejection-free rate in that degenerate case.
    let acceptance_rate = if totals.proposed == 0 {
        1.0
    } else {
        totals.accepted as f64 / totals.proposed as f64
    };

    Ok(EdtEstimate {
        mean_hops,
        std_error,
        runs: config.runs,
        acceptance_rate,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}
