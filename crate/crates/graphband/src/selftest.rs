//! Property checks shared by the `selftest` subcommand and the acceptance
//! suite. Each check returns counts plus the first few violations.

use std::fmt;

use graphband_core::env::{gen_instance, run_episode, run_episode_observed, RoundView, RunParams};
use graphband_core::funcspace::argmax;
use graphband_core::graph::{gen_random, greedy_exploration_set, independence_number_bruteforce, FeedbackGraph, GraphKind, GraphSource};
use graphband_core::lp::{build_sampling_lp, simplex_solve, vertex_enumerate_oracle};
use graphband_core::policy::{baseline_probs, PolicyKind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KEPT_VIOLATIONS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub violation_count: usize,
    /// The first few violations, described.
    pub violations: Vec<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, violation_count: 0, violations: Vec::new() }
    }

    fn fail(&mut self, msg: impl FnOnce() -> String) {
        self.violation_count += 1;
        if self.violations.len() < KEPT_VIOLATIONS {
            self.violations.push(msg());
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0 && self.cases > 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {} cases, {} violations", self.name, self.cases, self.violation_count)?;
        for v in &self.violations {
            write!(f, "\n    {v}")?;
        }
        Ok(())
    }
}

/// Independence, domination by a no-worse member, and `|S| <= alpha` for
/// greedy exploration sets on random graphs with up to `max_n` nodes.
pub fn check_exploration_sets(graphs: usize, max_n: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("greedy exploration sets");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..graphs {
        let n = rng.random_range(1..=max_n);
        let g = gen_random(n, rng.random_range(0.0..0.6), &mut rng).expect("n >= 1");
        let gaps: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.2) { 0.5 } else { rng.random_range(0.0..2.0) }).collect();
        let mut candidates: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.7)).collect();
        if candidates.is_empty() {
            candidates.push(rng.random_range(0..n));
        }
        candidates.shuffle(&mut rng);
        let s = greedy_exploration_set(&g, &candidates, &gaps);
        report.cases += 1;

        for &a in &s {
            for &b in s.iter().filter(|&&b| b != a) {
                if g.has_edge(a, b) {
                    report.fail(|| format!("case {case}: {b} is an out-neighbour of {a}, both in S"));
                }
            }
        }
        for &c in candidates.iter().filter(|c| !s.contains(c)) {
            if !s.iter().any(|&a| g.has_edge(a, c) && gaps[a] <= gaps[c]) {
                report.fail(|| format!("case {case}: candidate {c} is not dominated"));
            }
        }
        let alpha = independence_number_bruteforce(&g).expect("small graph");
        if s.len() > alpha {
            report.fail(|| format!("case {case}: |S| = {} exceeds alpha = {alpha}", s.len()));
        }
    }
    report
}

/// Simplex against vertex enumeration on sampling LPs built from real
/// exploration sets, and never worse than the baseline itself.
pub fn check_sampling_lps(programs: usize, max_n: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("sampling LPs vs vertex enumeration");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..programs {
        let n = rng.random_range(1..=max_n);
        let g = gen_random(n, rng.random_range(0.0..0.8), &mut rng).expect("n >= 1");
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let best = argmax(&values);
        let gaps: Vec<f64> = values.iter().map(|v| values[best] - v).collect();
        let mut candidates: Vec<usize> = (0..n).filter(|&a| a == best || rng.random_bool(0.8)).collect();
        candidates.sort_unstable();
        let s = greedy_exploration_set(&g, &candidates, &gaps);
        let gamma = rng.random_range(0.0..20.0);
        let p_tilde = baseline_probs(&values, &s, gamma);
        let lp = build_sampling_lp(&g, &gaps, &p_tilde, best);
        report.cases += 1;

        let sol = simplex_solve(&lp);
        let Some(oracle) = vertex_enumerate_oracle(&lp) else {
            report.fail(|| format!("case {case}: oracle refused {n} variables"));
            continue;
        };
        if !sol.is_optimal() || !oracle.is_optimal() {
            report.fail(|| format!("case {case}: status {:?} vs oracle {:?}", sol.status, oracle.status));
            continue;
        }
        if (sol.objective - oracle.objective).abs() > 1e-8 {
            report.fail(|| format!("case {case}: objective {} vs oracle {}", sol.objective, oracle.objective));
        }
        if sol.objective > lp.objective(&p_tilde) + 1e-12 {
            report.fail(|| format!("case {case}: objective {} above baseline {}", sol.objective, lp.objective(&p_tilde)));
        }
    }
    report
}

/// Checks both per-context inequalities of the implicit optimisation problem
/// on every round with a positive exploration rate. Gaps and observation
/// probabilities are recomputed from the instance and graph.
#[derive(Debug, Clone)]
pub struct IopChecker {
    pub report: CheckReport,
}

impl Default for IopChecker {
    fn default() -> Self {
        Self { report: CheckReport::new("IOP inequalities") }
    }
}

pub fn observation_probability(g: &FeedbackGraph, p: &[f64], b: usize) -> f64 {
    (0..g.node_count()).filter(|&j| g.has_edge(j, b)).map(|j| p[j]).sum()
}

impl IopChecker {
    pub fn observe(&mut self, v: &RoundView<'_>) {
        let dist = v.dist;
        if dist.gamma <= 0.0 {
            return;
        }
        self.report.cases += 1;
        let values = v.instance.class.get(v.state.fhat).eval_all(v.x, &v.instance.actions);
        let best = argmax(&values);
        let gaps: Vec<f64> = values.iter().map(|f| values[best] - f).collect();
        let s_size = dist.exploration_set.len() as f64;

        let regret: f64 = dist.p.iter().zip(&gaps).map(|(p, g)| p * g).sum();
        let bound = (s_size - 1.0) / dist.gamma;
        if regret > bound + 1e-9 {
            self.report.fail(|| format!("t {}: sum p*gap = {regret} > {bound}", v.t));
        }
        for &b in &dist.candidates {
            let q = observation_probability(v.graph, &dist.p, b);
            let rhs = s_size + dist.gamma * gaps[b];
            if 1.0 / q > rhs + 1e-6 {
                self.report.fail(|| format!("t {}: 1/q({b}) = {} > {rhs}", v.t, 1.0 / q));
            }
        }
    }
}

/// Runs AdaCB.G episodes on clique, star and random graphs until at least
/// `min_rounds` rounds with positive exploration rate have been checked.
pub fn check_iop(min_rounds: usize, horizon: usize, seed: u64) -> CheckReport {
    let mut checker = IopChecker::default();
    let sources = [
        GraphSource::new(GraphKind::CliqueGroup { cliques: 5 }, true),
        GraphSource::new(GraphKind::Star, true),
        GraphSource::new(GraphKind::Random { density: 0.1 }, true),
    ];
    let mut episode = 0u64;
    while checker.report.cases < min_rounds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(episode);
        let source = &sources[episode as usize % sources.len()];
        let instance = gen_instance(10, 50, rng.random_range(5..=20), &mut rng).expect("valid sizes");
        let params = RunParams { horizon, eta: 1.0, delta: 0.1, use_lp: episode % 4 != 3 };
        run_episode_observed(&instance, source, PolicyKind::AdaCbg, &params, &mut rng, &mut |v: &RoundView<'_>| checker.observe(v))
            .expect("valid configuration");
        episode += 1;
    }
    checker.report
}

/// Singleton class: AdaCB.G and RegCB.G never leave the optimal arm.
pub fn check_zero_regret(runs: usize, horizon: usize, seed: u64) -> CheckReport {
    let mut report = CheckReport::new("zero regret with a singleton class");
    let source = GraphSource::new(GraphKind::CliqueGroup { cliques: 5 }, true);
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let instance = gen_instance(10, 1, 20, &mut rng).expect("valid sizes");
        let params = RunParams { horizon, eta: 1.0, delta: 0.1, use_lp: true };
        for kind in [PolicyKind::AdaCbg, PolicyKind::RegCbgOffline] {
            let trace = run_episode(&instance, &source, kind, &params, &mut rng.clone()).expect("valid configuration");
            report.cases += 1;
            if let Some(t) = trace.cumulative.iter().position(|&r| r != 0.0) {
                report.fail(|| format!("run {run} {kind}: regret {} at round {}", trace.cumulative[t], t + 1));
            }
        }
    }
    report
}

/// The full suite at the sizes used by the `selftest` subcommand.
pub fn run_all(seed: u64) -> Vec<CheckReport> {
    vec![
        check_exploration_sets(200, 12, seed),
        check_sampling_lps(500, 6, seed),
        check_iop(10_000, 128, seed),
        check_zero_regret(10, 512, seed),
    ]
}
