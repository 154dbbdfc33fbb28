//! Epoch bookkeeping and the sampling rules.
//!
//! Rounds are grouped into doubling epochs `(2^(m-1), 2^m]`. At each epoch
//! boundary the learner refits the empirical best function on all data so
//! far, rebuilds the confidence set on the first half of the previous epoch
//! and rescales its exploration rate from the disagreement observed on the
//! second half.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::funcspace::{argmax, argmin_loss, beta_m, candidate_actions, mu_m, ConfidenceSet, FunctionClass, History};
use crate::graph::{exploration_set_in_order, greedy_exploration_set, FeedbackGraph};
use crate::lp::{build_sampling_lp, simplex_solve};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Gap-ordered exploration set, instance scale factor, LP refinement.
    AdaCbg,
    /// Inverse gap weighting over the whole action set as the LP baseline.
    AdaCbgFull,
    /// Full-set inverse gap weighting; graph feedback only feeds the oracle.
    Falcon,
    /// Index-ordered exploration set, unit scale factor, no LP.
    RegCbgOffline,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [Self::AdaCbg, Self::AdaCbgFull, Self::Falcon, Self::RegCbgOffline];

    /// File-name prefix for output series.
    pub fn tag(self) -> &'static str {
        match self {
            Self::AdaCbg => "ada",
            Self::AdaCbgFull => "adafull",
            Self::Falcon => "org",
            Self::RegCbgOffline => "ind",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::AdaCbg => "adacbg",
            Self::AdaCbgFull => "adacbg-full",
            Self::Falcon => "falcon",
            Self::RegCbgOffline => "regcbg",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adacbg" | "ada" => Ok(Self::AdaCbg),
            "adacbg-full" | "adacbg_full" | "adafull" => Ok(Self::AdaCbgFull),
            "falcon" | "org" => Ok(Self::Falcon),
            "regcbg" | "ind" => Ok(Self::RegCbgOffline),
            _ => Err(Error::InvalidParameter("unknown policy (expected adacbg, adacbg-full, falcon or regcbg)")),
        }
    }
}

/// Quantities fixed for a whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoParams {
    pub horizon: usize,
    pub eta: f64,
    pub delta: f64,
    pub class_size: usize,
    pub action_count: usize,
}

impl AlgoParams {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter("delta must lie in (0, 1)"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter("eta must be positive"));
        }
        if self.class_size == 0 || self.action_count == 0 {
            return Err(Error::InvalidParameter("class and action set must be non-empty"));
        }
        Ok(())
    }

    /// `2 ln(2 |A| |F| T^2 / delta)`, the shared denominator of both exploration rates.
    pub fn rate_denominator(&self) -> f64 {
        let t = self.horizon as f64;
        2.0 * libm::log(2.0 * self.action_count as f64 * self.class_size as f64 * t * t / self.delta)
    }
}

/// Rounds `start + 1 ..= end` form epoch `m`; `split` is the sample-splitting
/// point `(tau_m + tau_{m-1}) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochBounds {
    pub m: usize,
    pub start: usize,
    pub split: usize,
    pub end: usize,
}

/// Doubling schedule over `ceil(log2 T)` epochs (at least one), the last one
/// truncated at `T`.
pub fn epoch_schedule(horizon: usize) -> Vec<EpochBounds> {
    let mut out = Vec::new();
    let mut m = 1;
    loop {
        let start = if m == 1 { 0 } else { 1usize << (m - 1) };
        if start >= horizon {
            break;
        }
        let tau = 1usize << m;
        let split = ((tau + start) / 2).min(horizon);
        out.push(EpochBounds { m, start, split, end: tau.min(horizon) });
        m += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochState {
    pub m: usize,
    /// `tau_{m-1}`: last round of the previous epoch.
    pub tau_prev: usize,
    /// `tau_{m-2}`.
    pub tau_prev2: usize,
    /// `t_{m-1}`: end of the confidence-set prefix.
    pub t_split: usize,
    /// Last round of this epoch.
    pub end: usize,
    pub fhat: usize,
    pub conf: ConfidenceSet,
    pub beta: f64,
    pub mu: f64,
    pub mu_prev: f64,
    pub lambda: f64,
    /// Fraction of contexts in rounds `t_{m-1}+1 ..= tau_{m-1}` whose candidate
    /// set under this epoch's confidence set has more than one arm.
    pub disagreement: f64,
    /// The same statistic from the previous boundary.
    pub prev_disagreement: f64,
}

/// Fraction of `contexts` on which the members disagree about the best arm.
/// `None` for an empty window.
pub fn disagreement_rate<'a>(
    class: &FunctionClass,
    conf: &ConfidenceSet,
    actions: &[Vec<f64>],
    contexts: impl IntoIterator<Item = &'a [f64]>,
) -> Option<f64> {
    let (mut hits, mut total) = (0usize, 0usize);
    for x in contexts {
        total += 1;
        if candidate_actions(class, &conf.member_indices, x, actions).len() > 1 {
            hits += 1;
        }
    }
    (total > 0).then(|| hits as f64 / total as f64)
}

/// Starts epoch `schedule[m - 1]` from the data logged so far.
///
/// The oracle fit uses every round up to `tau_{m-1}`, the confidence set only
/// rounds up to `t_{m-1}`. The scale factor is one in the first epoch; later
/// it is `(E_m + mu_m) / sqrt(E_{m-1} + mu_{m-1})` with `E` the window
/// disagreement rates, and an empty window keeps the previous value.
pub fn begin_epoch(
    history: &History,
    class: &FunctionClass,
    actions: &[Vec<f64>],
    params: &AlgoParams,
    schedule: &[EpochBounds],
    m: usize,
    prev: Option<&EpochState>,
) -> EpochState {
    let bounds = schedule[m - 1];
    let (tau_prev, t_split) = if m >= 2 { (schedule[m - 2].end, schedule[m - 2].split) } else { (0, 0) };
    let tau_prev2 = if m >= 3 { schedule[m - 3].end } else { 0 };

    let beta = beta_m(params.horizon, m, params.class_size, params.action_count, params.delta);
    let mu = mu_m(m, params.horizon, params.delta);
    let mu_prev = if m >= 2 { mu_m(m - 1, params.horizon, params.delta) } else { mu };

    let fhat = argmin_loss(&history.losses_upto(class, actions, tau_prev));
    let conf = ConfidenceSet::from_losses(&history.losses_upto(class, actions, t_split), beta);

    let window = (t_split + 1..=tau_prev).map(|t| history.context(t));
    let rate = disagreement_rate(class, &conf, actions, window);
    let prev_disagreement = prev.map_or(0.0, |p| p.disagreement);
    let lambda = match (m, rate) {
        (1, _) => 1.0,
        (_, Some(e)) => (e + mu) / libm::sqrt(prev_disagreement + mu_prev),
        (_, None) => prev.map_or(1.0, |p| p.lambda),
    };

    EpochState {
        m,
        tau_prev,
        tau_prev2,
        t_split,
        end: bounds.end,
        fhat,
        conf,
        beta,
        mu,
        mu_prev,
        lambda,
        disagreement: rate.unwrap_or(0.0),
        prev_disagreement,
    }
}

fn scaled_gamma(lambda: f64, state: &EpochState, s_size: usize, params: &AlgoParams) -> f64 {
    if state.m == 1 {
        return 0.0;
    }
    let span = (state.tau_prev - state.tau_prev2) as f64;
    lambda * libm::sqrt(params.eta * s_size as f64 * span / params.rate_denominator())
}

/// Exploration rate for an exploration set of `s_size` arms; zero in epoch 1.
pub fn gamma_t(state: &EpochState, s_size: usize, params: &AlgoParams) -> f64 {
    scaled_gamma(state.lambda, state, s_size, params)
}

/// Epoch-level rate of full-set inverse gap weighting; zero in epoch 1.
pub fn full_igw_gamma(state: &EpochState, params: &AlgoParams) -> f64 {
    libm::sqrt(params.eta * params.action_count as f64 * state.tau_prev as f64 / params.rate_denominator())
}

/// Inverse-gap-weighted baseline on the exploration set: `1 / (|S| + gamma gap)`
/// for each non-greedy member, zero off the set, the remainder on the greedy
/// arm. The greedy arm must belong to `exploration_set`.
pub fn baseline_probs(fhat_values: &[f64], exploration_set: &[usize], gamma: f64) -> Vec<f64> {
    let best = argmax(fhat_values);
    debug_assert!(exploration_set.contains(&best));
    let size = exploration_set.len() as f64;
    let mut p = vec![0.0; fhat_values.len()];
    let mut rest = 1.0;
    for &a in exploration_set.iter().filter(|&&a| a != best) {
        p[a] = 1.0 / (size + gamma * (fhat_values[best] - fhat_values[a]));
        rest -= p[a];
    }
    p[best] = rest;
    p
}

/// Inverse gap weighting over every action.
pub fn full_igw_probs(fhat_values: &[f64], gamma: f64) -> Vec<f64> {
    let all: Vec<usize> = (0..fhat_values.len()).collect();
    baseline_probs(fhat_values, &all, gamma)
}

/// What happened to the LP refinement in a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpUse {
    Skipped,
    Refined,
    /// The solver did not return an optimum; the baseline was used instead.
    FellBack,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution {
    pub p: Vec<f64>,
    /// Probability that each arm's reward is revealed.
    pub q: Vec<f64>,
    pub exploration_set: Vec<usize>,
    pub gamma: f64,
    /// Greedy arm of the epoch's fitted function.
    pub best: usize,
    /// Empirical gaps `fhat(best) - fhat(a)` for every arm.
    pub gaps: Vec<f64>,
    /// Candidate set used, with the greedy arm included.
    pub candidates: Vec<usize>,
    pub lp: LpUse,
}

/// `q(a) = sum of p(j)` over in-neighbours `j` of `a`.
pub fn observation_probs(g: &FeedbackGraph, p: &[f64]) -> Vec<f64> {
    (0..g.node_count()).map(|a| g.in_neighbors(a).map(|j| p[j]).sum()).collect()
}

struct Fitted {
    values: Vec<f64>,
    best: usize,
    gaps: Vec<f64>,
}

fn fit_values(state: &EpochState, class: &FunctionClass, x: &[f64], actions: &[Vec<f64>]) -> Fitted {
    let values = class.get(state.fhat).eval_all(x, actions);
    let best = argmax(&values);
    let gaps = values.iter().map(|v| values[best] - v).collect();
    Fitted { values, best, gaps }
}

/// Replaces `p_tilde` by the sampling-LP optimum when the solver succeeds.
fn refine(g: &FeedbackGraph, fit: &Fitted, p_tilde: Vec<f64>) -> (Vec<f64>, LpUse) {
    let lp = build_sampling_lp(g, &fit.gaps, &p_tilde, fit.best);
    let sol = simplex_solve(&lp);
    if sol.is_optimal() {
        (sol.x, LpUse::Refined)
    } else {
        (p_tilde, LpUse::FellBack)
    }
}

#[derive(Clone, Copy)]
struct GraphRule {
    gap_order: bool,
    fixed_lambda: Option<f64>,
    use_lp: bool,
}

#[allow(clippy::too_many_arguments)]
fn graph_igw(
    rule: GraphRule,
    state: &EpochState,
    x: &[f64],
    g: &FeedbackGraph,
    actions: &[Vec<f64>],
    class: &FunctionClass,
    params: &AlgoParams,
) -> ActionDistribution {
    let fit = fit_values(state, class, x, actions);
    let mut candidates = candidate_actions(class, &state.conf.member_indices, x, actions);
    if let Err(pos) = candidates.binary_search(&fit.best) {
        candidates.insert(pos, fit.best);
    }
    let lambda = rule.fixed_lambda.unwrap_or(state.lambda);

    if candidates.len() == 1 {
        let mut p = vec![0.0; actions.len()];
        p[fit.best] = 1.0;
        return ActionDistribution {
            q: observation_probs(g, &p),
            p,
            exploration_set: vec![fit.best],
            gamma: scaled_gamma(lambda, state, 1, params),
            best: fit.best,
            gaps: fit.gaps,
            candidates,
            lp: LpUse::Skipped,
        };
    }

    let exploration_set = if rule.gap_order {
        greedy_exploration_set(g, &candidates, &fit.gaps)
    } else {
        let order: Vec<usize> =
            core::iter::once(fit.best).chain(candidates.iter().copied().filter(|&a| a != fit.best)).collect();
        exploration_set_in_order(g, &order)
    };
    let gamma = scaled_gamma(lambda, state, exploration_set.len(), params);
    let p_tilde = baseline_probs(&fit.values, &exploration_set, gamma);
    // epoch 1 explores uniformly; the fitted gaps carry no information yet
    let (p, lp) = if rule.use_lp && gamma > 0.0 { refine(g, &fit, p_tilde) } else { (p_tilde, LpUse::Skipped) };

    ActionDistribution {
        q: observation_probs(g, &p),
        p,
        exploration_set,
        gamma,
        best: fit.best,
        gaps: fit.gaps,
        candidates,
        lp,
    }
}

/// Graph-aware sampling: candidate arms, gap-ordered exploration set,
/// inverse-gap-weighted baseline, optional LP refinement.
pub fn action_distribution_adacbg(
    state: &EpochState,
    x: &[f64],
    g: &FeedbackGraph,
    actions: &[Vec<f64>],
    class: &FunctionClass,
    params: &AlgoParams,
    use_lp: bool,
) -> ActionDistribution {
    let rule = GraphRule { gap_order: true, fixed_lambda: None, use_lp };
    graph_igw(rule, state, x, g, actions, class, params)
}

/// The graph-aware rule with an index-ordered exploration set (greedy arm
/// first), unit scale factor and no LP.
pub fn action_distribution_regcbg(
    state: &EpochState,
    x: &[f64],
    g: &FeedbackGraph,
    actions: &[Vec<f64>],
    class: &FunctionClass,
    params: &AlgoParams,
) -> ActionDistribution {
    let rule = GraphRule { gap_order: false, fixed_lambda: Some(1.0), use_lp: false };
    graph_igw(rule, state, x, g, actions, class, params)
}

/// Inverse gap weighting over all actions with the epoch-level rate.
/// `g` is only used to report observation probabilities.
pub fn action_distribution_full_igw(
    state: &EpochState,
    x: &[f64],
    g: &FeedbackGraph,
    actions: &[Vec<f64>],
    class: &FunctionClass,
    params: &AlgoParams,
) -> ActionDistribution {
    let fit = fit_values(state, class, x, actions);
    let gamma = full_igw_gamma(state, params);
    let p = full_igw_probs(&fit.values, gamma);
    let all: Vec<usize> = (0..actions.len()).collect();
    ActionDistribution {
        q: observation_probs(g, &p),
        p,
        exploration_set: all.clone(),
        gamma,
        best: fit.best,
        gaps: fit.gaps,
        candidates: all,
        lp: LpUse::Skipped,
    }
}

/// Same sampling rule as [`action_distribution_full_igw`].
pub fn action_distribution_falcon(
    state: &EpochState,
    x: &[f64],
    g: &FeedbackGraph,
    actions: &[Vec<f64>],
    class: &FunctionClass,
    params: &AlgoParams,
) -> ActionDistribution {
    action_distribution_full_igw(state, x, g, actions, class, params)
}

/// Dispatches on `kind`. `use_lp` only affects the two graph-aware LP users.
#[allow(clippy::too_many_arguments)]
pub fn action_distribution(
    kind: PolicyKind,
    state: &EpochState,
    x: &[f64],
    g: &FeedbackGraph,
    actions: &[Vec<f64>],
    class: &FunctionClass,
    params: &AlgoParams,
    use_lp: bool,
) -> ActionDistribution {
    match kind {
        PolicyKind::AdaCbg => action_distribution_adacbg(state, x, g, actions, class, params, use_lp),
        PolicyKind::RegCbgOffline => action_distribution_regcbg(state, x, g, actions, class, params),
        PolicyKind::Falcon => action_distribution_falcon(state, x, g, actions, class, params),
        PolicyKind::AdaCbgFull => {
            let mut dist = action_distribution_full_igw(state, x, g, actions, class, params);
            if use_lp && dist.gamma > 0.0 {
                let fit = Fitted { values: Vec::new(), best: dist.best, gaps: dist.gaps.clone() };
                let (p, lp) = refine(g, &fit, core::mem::take(&mut dist.p));
                dist.q = observation_probs(g, &p);
                dist.p = p;
                dist.lp = lp;
            }
            dist
        }
    }
}

/// Inverse-CDF draw from `p`.
pub fn sample_action<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, &pa) in p.iter().enumerate() {
        acc += pa;
        if u < acc {
            return a;
        }
    }
    // round-off left u above the total; take the last arm with mass
    p.iter().rposition(|&pa| pa > 0.0).unwrap_or(0)
}
