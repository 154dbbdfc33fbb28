//! Stochastic environment and the episode loop.

use alloc::borrow::Cow;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::funcspace::{gen_function_class, FunctionClass, History, ObservationRecord};
use crate::graph::{FeedbackGraph, GraphKind, GraphSource};
use crate::policy::{action_distribution, begin_epoch, epoch_schedule, sample_action, ActionDistribution, AlgoParams, EpochState, LpUse, PolicyKind};
use crate::{Error, Result};

/// A realizable problem: the true reward function is a member of `class`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub class: FunctionClass,
    pub fstar: usize,
    pub actions: Vec<Vec<f64>>,
    pub noise_sigma: f64,
}

impl Instance {
    pub fn new(class: FunctionClass, fstar: usize, actions: Vec<Vec<f64>>, noise_sigma: f64) -> Result<Self> {
        if fstar >= class.len() {
            return Err(Error::InvalidParameter("true function index out of range"));
        }
        if actions.is_empty() {
            return Err(Error::InvalidParameter("action set is empty"));
        }
        if let Some(a) = actions.iter().find(|a| a.len() != class.dim()) {
            return Err(Error::DimensionMismatch { expected: class.dim(), actual: a.len() });
        }
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(Error::InvalidParameter("noise sigma must be finite and non-negative"));
        }
        Ok(Self { class, fstar, actions, noise_sigma })
    }

    pub fn dim(&self) -> usize {
        self.class.dim()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    /// Mean rewards of every action at `x`.
    pub fn mean_rewards(&self, x: &[f64]) -> Vec<f64> {
        self.class.get(self.fstar).eval_all(x, &self.actions)
    }
}

/// Random class with standard-normal parameters, actions uniform on `[-1, 1]^d`
/// and unit noise.
pub fn gen_instance<R: Rng + ?Sized>(d: usize, class_size: usize, action_count: usize, rng: &mut R) -> Result<Instance> {
    if action_count == 0 {
        return Err(Error::InvalidParameter("action set is empty"));
    }
    let (class, fstar) = gen_function_class(d, class_size, rng)?;
    let actions = (0..action_count).map(|_| (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
    Instance::new(class, fstar, actions, 1.0)
}

pub fn sample_context<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Noisy rewards of every out-neighbour of the played arm, in node order.
pub fn observe<R: Rng + ?Sized>(
    instance: &Instance,
    x: &[f64],
    g: &FeedbackGraph,
    played: usize,
    rng: &mut R,
) -> Vec<(usize, f64)> {
    let fstar = instance.class.get(instance.fstar);
    g.out_neighbors(played)
        .map(|a| {
            let noise: f64 = rng.sample(StandardNormal);
            (a, fstar.eval(x, &instance.actions[a]) + instance.noise_sigma * noise)
        })
        .collect()
}

/// Shortfall of the played arm's mean reward against the best arm's.
pub fn instant_regret(instance: &Instance, x: &[f64], played: usize) -> f64 {
    regret_from_means(&instance.mean_rewards(x), played)
}

fn regret_from_means(means: &[f64], played: usize) -> f64 {
    let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    best - means[played]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub horizon: usize,
    pub eta: f64,
    pub delta: f64,
    pub use_lp: bool,
}

impl RunParams {
    pub fn algo(&self, instance: &Instance) -> AlgoParams {
        AlgoParams {
            horizon: self.horizon,
            eta: self.eta,
            delta: self.delta,
            class_size: instance.class.len(),
            action_count: instance.action_count(),
        }
    }
}

/// Per-epoch health of the confidence set.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochDiagnostics {
    pub m: usize,
    pub conf_size: usize,
    pub fstar_in_conf: bool,
    pub fhat: usize,
    pub lambda: f64,
    /// Whether this confidence set is contained in the previous one. This is
    /// only a high-probability event, so it is recorded rather than enforced.
    pub nested_in_prev: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    /// Cumulative regret after rounds `1..=T`.
    pub cumulative: Vec<f64>,
    pub epochs: Vec<EpochDiagnostics>,
    /// Total `(action, reward)` pairs logged.
    pub observations: usize,
    pub lp_fallbacks: usize,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

/// Everything the learner saw and did in one round.
pub struct RoundView<'a> {
    pub t: usize,
    pub instance: &'a Instance,
    pub state: &'a EpochState,
    pub x: &'a [f64],
    pub graph: &'a FeedbackGraph,
    pub dist: &'a ActionDistribution,
    pub played: usize,
}

pub trait RoundObserver {
    fn on_round(&mut self, view: &RoundView<'_>);
}

impl RoundObserver for () {
    fn on_round(&mut self, _: &RoundView<'_>) {}
}

impl<F: FnMut(&RoundView<'_>)> RoundObserver for F {
    fn on_round(&mut self, view: &RoundView<'_>) {
        self(view)
    }
}

pub fn run_episode<R: Rng + ?Sized>(
    instance: &Instance,
    source: &GraphSource,
    kind: PolicyKind,
    params: &RunParams,
    rng: &mut R,
) -> Result<RegretTrace> {
    run_episode_observed(instance, source, kind, params, rng, &mut ())
}

/// Runs `T` rounds: draw the graph and context, sample an arm from the
/// policy, log every revealed reward, and accumulate mean-reward regret.
pub fn run_episode_observed<R: Rng + ?Sized>(
    instance: &Instance,
    source: &GraphSource,
    kind: PolicyKind,
    params: &RunParams,
    rng: &mut R,
    observer: &mut dyn RoundObserver,
) -> Result<RegretTrace> {
    let algo = params.algo(instance);
    algo.validate()?;
    let n = instance.action_count();
    source.validate(n)?;

    // graphs that never change are built once
    let fixed: Option<FeedbackGraph> = match (&source.kind, source.resample_each_round) {
        (GraphKind::Random { .. } | GraphKind::Pool(_), true) => None,
        _ => Some(source.generate(n, rng)?),
    };

    let schedule = epoch_schedule(params.horizon);
    let mut history = History::new(instance.class.len(), schedule.iter().flat_map(|e| [e.split, e.end]));
    let mut cumulative = Vec::with_capacity(params.horizon);
    let mut epochs = Vec::with_capacity(schedule.len());
    let mut lp_fallbacks = 0;
    let mut total = 0.0;
    let mut state: Option<EpochState> = None;

    for bounds in &schedule {
        let next = begin_epoch(&history, &instance.class, &instance.actions, &algo, &schedule, bounds.m, state.as_ref());
        epochs.push(EpochDiagnostics {
            m: next.m,
            conf_size: next.conf.len(),
            fstar_in_conf: next.conf.contains(instance.fstar),
            fhat: next.fhat,
            lambda: next.lambda,
            nested_in_prev: state.as_ref().map(|prev| next.conf.is_subset_of(&prev.conf)),
        });
        let st = state.insert(next);

        for t in bounds.start + 1..=bounds.end {
            let graph: Cow<'_, FeedbackGraph> = match (&fixed, &source.kind) {
                (Some(g), _) => Cow::Borrowed(g),
                (None, GraphKind::Pool(pool)) => Cow::Borrowed(&pool[rng.random_range(0..pool.len())]),
                (None, _) => Cow::Owned(source.generate(n, rng)?),
            };
            let x = sample_context(instance.dim(), rng);
            let dist = action_distribution(kind, st, &x, &graph, &instance.actions, &instance.class, &algo, params.use_lp);
            if dist.lp == LpUse::FellBack {
                lp_fallbacks += 1;
            }
            let played = sample_action(&dist.p, rng);
            let observed = observe(instance, &x, &graph, played, rng);
            total += instant_regret(instance, &x, played);
            cumulative.push(total);
            observer.on_round(&RoundView { t, instance, state: st, x: &x, graph: &graph, dist: &dist, played });
            history.push(&instance.class, &instance.actions, ObservationRecord { x, observed });
        }
    }

    Ok(RegretTrace { cumulative, epochs, observations: history.observation_count(), lp_fallbacks })
}
