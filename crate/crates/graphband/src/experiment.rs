//! Repeat orchestration: one fresh instance per repeat, every configured
//! policy run on it, curves aggregated in repeat order.

use std::sync::Arc;

use graphband_core::env::{gen_instance, run_episode, Instance, RegretTrace, RunParams};
use graphband_core::graph::{build_pool, GraphKind, GraphSource};
use graphband_core::policy::PolicyKind;
use graphband_core::stats::{mean_std, AggregateCurves};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, GraphName};
use crate::io::{load_edge_list, load_pool};
use crate::{Error, Result};

pub const THREADS_VAR: &str = "GRAPHBAND_THREADS";

/// Stream reserved for building graph pools so it never overlaps a repeat.
const POOL_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub struct PolicyOutcome {
    pub kind: PolicyKind,
    /// One trace per repeat, in repeat order.
    pub traces: Vec<RegretTrace>,
    pub curves: AggregateCurves,
}

impl PolicyOutcome {
    pub fn final_regrets(&self) -> Vec<f64> {
        self.traces.iter().map(RegretTrace::final_regret).collect()
    }

    /// Population mean and std of the final cumulative regret.
    pub fn final_mean_std(&self) -> (f64, f64) {
        mean_std(&self.final_regrets())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub label: String,
    pub outcomes: Vec<PolicyOutcome>,
}

impl ExperimentResult {
    pub fn outcome(&self, kind: PolicyKind) -> Option<&PolicyOutcome> {
        self.outcomes.iter().find(|o| o.kind == kind)
    }
}

/// RNG for one repeat: the master seed selects the key, the repeat index the stream.
pub fn repeat_rng(seed: u64, repeat: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repeat as u64);
    rng
}

/// RNG used to sample a subgraph pool from an edge list.
pub fn pool_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(POOL_STREAM);
    rng
}

pub fn graph_source(cfg: &ExperimentConfig) -> Result<GraphSource> {
    let kind = match cfg.graph {
        GraphName::Complete => GraphKind::Complete,
        GraphName::CliqueGroup => GraphKind::CliqueGroup { cliques: cfg.cliques },
        GraphName::Star => GraphKind::Star,
        GraphName::Random => GraphKind::Random { density: cfg.density },
        GraphName::Pool => {
            if let Some(dir) = &cfg.pool_dir {
                GraphKind::Pool(Arc::new(load_pool(dir)?))
            } else {
                let path = cfg.edges.as_ref().ok_or_else(|| Error::Config("pool graphs need `edges` or `pool_dir`".into()))?;
                let edges = load_edge_list(path)?;
                build_pool(&edges, cfg.pool_size, cfg.action_count, &mut pool_rng(cfg.seed))?.kind
            }
        }
    };
    let source = GraphSource::new(kind, cfg.resample);
    source.validate(cfg.action_count)?;
    Ok(source)
}

pub fn run_params(cfg: &ExperimentConfig) -> RunParams {
    RunParams { horizon: cfg.horizon, eta: cfg.eta, delta: cfg.delta, use_lp: cfg.use_lp }
}

pub fn repeat_instance(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Instance> {
    let mut instance = gen_instance(cfg.d, cfg.class_size, cfg.action_count, rng)?;
    instance.noise_sigma = cfg.noise_sigma;
    Ok(instance)
}

/// Runs every configured policy on repeat `repeat`'s instance. All policies
/// start from the same RNG state after the instance is drawn.
pub fn run_repeat(cfg: &ExperimentConfig, source: &GraphSource, repeat: usize) -> Result<Vec<RegretTrace>> {
    let mut rng = repeat_rng(cfg.seed, repeat);
    let instance = repeat_instance(cfg, &mut rng)?;
    let params = run_params(cfg);
    cfg.policies
        .iter()
        .map(|&kind| Ok(run_episode(&instance, source, kind, &params, &mut rng.clone())?))
        .collect()
}

/// Size of the worker pool: `GRAPHBAND_THREADS` when set and positive.
pub fn worker_threads() -> Option<usize> {
    std::env::var(THREADS_VAR).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let source = graph_source(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_threads() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let per_repeat: Vec<Vec<RegretTrace>> =
        pool.install(|| (0..cfg.repeats).into_par_iter().map(|r| run_repeat(cfg, &source, r)).collect::<Result<_>>())?;

    let outcomes = cfg
        .policies
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let traces: Vec<RegretTrace> = per_repeat.iter().map(|r| r[i].clone()).collect();
            let cumulative: Vec<&[f64]> = traces.iter().map(|t| t.cumulative.as_slice()).collect();
            PolicyOutcome { kind, curves: AggregateCurves::from_traces(&cumulative), traces }
        })
        .collect();
    Ok(ExperimentResult { config: cfg.clone(), label: cfg.graph_label(), outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            horizon: 64,
            repeats: 3,
            d: 4,
            class_size: 8,
            action_count: 6,
            cliques: 2,
            policies: PolicyKind::ALL.to_vec(),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn shapes_and_bands() {
        let r = run_experiment(&small()).unwrap();
        assert_eq!(r.outcomes.len(), 4);
        for o in &r.outcomes {
            assert_eq!(o.traces.len(), 3);
            assert_eq!(o.curves.len(), 64);
            for t in 0..64 {
                assert!(o.curves.lower[t] <= o.curves.mean[t] && o.curves.mean[t] <= o.curves.upper[t]);
            }
        }
    }

    #[test]
    fn single_repeat_band_collapses() {
        let r = run_experiment(&ExperimentConfig { repeats: 1, ..small() }).unwrap();
        let c = &r.outcomes[0].curves;
        assert_eq!(c.mean, c.upper);
        assert_eq!(c.mean, c.lower);
    }

    #[test]
    fn repeats_are_independent_of_scheduling() {
        let cfg = small();
        let r = run_experiment(&cfg).unwrap();
        let source = graph_source(&cfg).unwrap();
        let again = run_repeat(&cfg, &source, 2).unwrap();
        assert_eq!(again[0], r.outcomes[0].traces[2]);
        assert_ne!(r.outcomes[0].traces[0].cumulative, r.outcomes[0].traces[1].cumulative);
    }

    #[test]
    fn streams_differ_by_repeat() {
        use rand::Rng;
        let a: u64 = repeat_rng(5, 0).random();
        let b: u64 = repeat_rng(5, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, repeat_rng(5, 0).random::<u64>());
    }
}
