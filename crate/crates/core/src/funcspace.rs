//! Finite bilinear function class, least-squares oracle and confidence sets.

use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// `f(x, a) = (x - x0) . (a - a0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearFunction {
    x0: Vec<f64>,
    a0: Vec<f64>,
}

impl BilinearFunction {
    pub fn new(x0: Vec<f64>, a0: Vec<f64>) -> Result<Self> {
        if x0.len() != a0.len() {
            return Err(Error::DimensionMismatch { expected: x0.len(), actual: a0.len() });
        }
        Ok(Self { x0, a0 })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn a0(&self) -> &[f64] {
        &self.a0
    }

    #[inline]
    pub fn eval(&self, x: &[f64], a: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.x0.len());
        debug_assert_eq!(a.len(), self.a0.len());
        x.iter()
            .zip(&self.x0)
            .zip(a.iter().zip(&self.a0))
            .map(|((xi, x0i), (ai, a0i))| (xi - x0i) * (ai - a0i))
            .sum()
    }

    /// Values at every action for one context.
    pub fn eval_all(&self, x: &[f64], actions: &[Vec<f64>]) -> Vec<f64> {
        actions.iter().map(|a| self.eval(x, a)).collect()
    }

    /// Greedy action at `x`; ties go to the lowest index.
    pub fn argmax(&self, x: &[f64], actions: &[Vec<f64>]) -> usize {
        argmax(&self.eval_all(x, actions))
    }
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionClass {
    members: Vec<BilinearFunction>,
    dim: usize,
}

impl FunctionClass {
    pub fn new(members: Vec<BilinearFunction>) -> Result<Self> {
        let dim = members.first().ok_or(Error::InvalidParameter("function class is empty"))?.dim();
        if let Some(f) = members.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, actual: f.dim() });
        }
        Ok(Self { members, dim })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> &BilinearFunction {
        &self.members[i]
    }

    pub fn members(&self) -> &[BilinearFunction] {
        &self.members
    }
}

/// `size` members with standard-normal `x0`, `a0`, plus a uniformly chosen
/// index for the true function.
pub fn gen_function_class<R: Rng + ?Sized>(d: usize, size: usize, rng: &mut R) -> Result<(FunctionClass, usize)> {
    if size == 0 || d == 0 {
        return Err(Error::InvalidParameter("function class needs positive size and dimension"));
    }
    let mut normal = || -> Vec<f64> { (0..d).map(|_| rng.sample(StandardNormal)).collect() };
    let members = (0..size)
        .map(|_| {
            let x0 = normal();
            let a0 = normal();
            BilinearFunction::new(x0, a0)
        })
        .collect::<Result<Vec<_>>>()?;
    let class = FunctionClass::new(members)?;
    let fstar = rng.random_range(0..size);
    Ok((class, fstar))
}

/// One round's context together with every revealed `(action, reward)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRecord {
    pub x: Vec<f64>,
    pub observed: Vec<(usize, f64)>,
}

/// Squared loss of one member on one record.
fn record_loss(f: &BilinearFunction, actions: &[Vec<f64>], rec: &ObservationRecord) -> f64 {
    rec.observed
        .iter()
        .map(|&(a, y)| {
            let r = f.eval(&rec.x, &actions[a]) - y;
            r * r
        })
        .sum()
}

/// Sum of squared errors of `f` over the first `upto` records.
pub fn cumulative_sq_loss(f: &BilinearFunction, actions: &[Vec<f64>], dataset: &[ObservationRecord], upto: usize) -> f64 {
    dataset[..upto].iter().map(|rec| record_loss(f, actions, rec)).sum()
}

fn all_losses(class: &FunctionClass, actions: &[Vec<f64>], dataset: &[ObservationRecord], upto: usize) -> Vec<f64> {
    class.members().iter().map(|f| cumulative_sq_loss(f, actions, dataset, upto)).collect()
}

/// Index of the smallest loss, lowest index on ties.
pub fn argmin_loss(losses: &[f64]) -> usize {
    let mut best = 0;
    for (i, l) in losses.iter().enumerate().skip(1) {
        if *l < losses[best] {
            best = i;
        }
    }
    best
}

/// Exact least-squares oracle by enumeration of the class.
pub fn oracle_fit(class: &FunctionClass, actions: &[Vec<f64>], dataset: &[ObservationRecord], upto: usize) -> usize {
    argmin_loss(&all_losses(class, actions, dataset, upto))
}

/// Members whose loss is within `beta` of the best.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceSet {
    pub member_indices: Vec<usize>,
    pub beta: f64,
}

impl ConfidenceSet {
    pub fn from_losses(losses: &[f64], beta: f64) -> Self {
        let min = losses[argmin_loss(losses)];
        let member_indices = (0..losses.len()).filter(|&i| losses[i] <= min + beta).collect();
        Self { member_indices, beta }
    }

    pub fn whole(class_size: usize, beta: f64) -> Self {
        Self { member_indices: (0..class_size).collect(), beta }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.member_indices.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.member_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_indices.is_empty()
    }

    /// True if every member here is also in `other`.
    pub fn is_subset_of(&self, other: &ConfidenceSet) -> bool {
        self.member_indices.iter().all(|&i| other.contains(i))
    }
}

pub fn confidence_set(
    class: &FunctionClass,
    actions: &[Vec<f64>],
    dataset: &[ObservationRecord],
    upto: usize,
    beta: f64,
) -> ConfidenceSet {
    ConfidenceSet::from_losses(&all_losses(class, actions, dataset, upto), beta)
}

/// Actions that are the greedy choice of at least one member, ascending.
pub fn candidate_actions(class: &FunctionClass, member_indices: &[usize], x: &[f64], actions: &[Vec<f64>]) -> Vec<usize> {
    let mut out: Vec<usize> = member_indices.iter().map(|&i| class.get(i).argmax(x, actions)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Confidence radius for epoch `m`. The epoch-count factor uses `log2`, the
/// other logarithm is natural.
pub fn beta_m(horizon: usize, m: usize, class_size: usize, action_count: usize, delta: f64) -> f64 {
    let t = horizon as f64;
    let remaining = libm::log2(t) - m as f64 + 1.0;
    let k = action_count as f64;
    16.0 * remaining * libm::log(2.0 * class_size as f64 * k * k * t * t / delta)
}

/// Smoothing parameter for epoch `m`, over the untruncated epoch length `2^(m-1)`.
pub fn mu_m(m: usize, horizon: usize, delta: f64) -> f64 {
    let len = if m == 1 { 2.0 } else { libm::exp2(m as f64 - 1.0) };
    64.0 * libm::log(4.0 / delta * libm::log2(horizon as f64)) / len
}

/// Growing dataset with per-member running losses and snapshots at chosen
/// prefix lengths.
#[derive(Debug, Clone)]
pub struct History {
    records: Vec<ObservationRecord>,
    running: Vec<f64>,
    checkpoints: BTreeMap<usize, Option<Vec<f64>>>,
    observations: usize,
}

impl History {
    /// `checkpoints` are the prefix lengths whose losses will be asked for.
    pub fn new(class_size: usize, checkpoints: impl IntoIterator<Item = usize>) -> Self {
        let mut cps: BTreeMap<usize, Option<Vec<f64>>> = checkpoints.into_iter().map(|c| (c, None)).collect();
        if let Some(slot) = cps.get_mut(&0) {
            *slot = Some(alloc::vec![0.0; class_size]);
        }
        Self { records: Vec::new(), running: alloc::vec![0.0; class_size], checkpoints: cps, observations: 0 }
    }

    pub fn push(&mut self, class: &FunctionClass, actions: &[Vec<f64>], rec: ObservationRecord) {
        for (acc, f) in self.running.iter_mut().zip(class.members()) {
            *acc += record_loss(f, actions, &rec);
        }
        self.observations += rec.observed.len();
        self.records.push(rec);
        if let Some(slot) = self.checkpoints.get_mut(&self.records.len()) {
            *slot = Some(self.running.clone());
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[ObservationRecord] {
        &self.records
    }

    /// Context of 1-based round `t`.
    pub fn context(&self, t: usize) -> &[f64] {
        &self.records[t - 1].x
    }

    /// Total number of `(action, reward)` pairs logged.
    pub fn observation_count(&self) -> usize {
        self.observations
    }

    /// Per-member loss over the first `upto` records. Uses a snapshot when one
    /// was taken, otherwise recomputes.
    pub fn losses_upto(&self, class: &FunctionClass, actions: &[Vec<f64>], upto: usize) -> Cow<'_, [f64]> {
        if upto == self.records.len() {
            return Cow::Borrowed(&self.running);
        }
        match self.checkpoints.get(&upto) {
            Some(Some(snap)) => Cow::Borrowed(snap),
            _ => Cow::Owned(all_losses(class, actions, &self.records, upto)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_dot(f: &BilinearFunction, x: &[f64], a: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..x.len() {
            s += (x[i] - f.x0()[i]) * (a[i] - f.a0()[i]);
        }
        s
    }

    fn random_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn eval_cases() {
        let f = BilinearFunction::new(vec![0.3, -1.0], vec![2.0, 0.5]).unwrap();
        assert_eq!(f.eval(&[0.3, -1.0], &[7.0, -3.0]), 0.0);
        let z = BilinearFunction::new(vec![0.0; 10], vec![0.0; 10]).unwrap();
        assert_eq!(z.eval(&[1.0; 10], &[1.0; 10]), 10.0);
        assert!(BilinearFunction::new(vec![0.0; 2], vec![0.0; 3]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let f = BilinearFunction::new(random_vec(&mut rng, 10), random_vec(&mut rng, 10)).unwrap();
            let (x, a) = (random_vec(&mut rng, 10), random_vec(&mut rng, 10));
            assert!((f.eval(&x, &a) - naive_dot(&f, &x, &a)).abs() < 1e-12);
        }
    }

    #[test]
    fn class_generation() {
        let (c, fstar) = gen_function_class(3, 1, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!((c.len(), fstar), (1, 0));
        let a = gen_function_class(10, 50, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let b = gen_function_class(10, 50, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.0.len(), a.0.dim()), (50, 10));
        assert!(a.1 < 50);
        assert!(gen_function_class(3, 0, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
    }

    fn small_problem(rng: &mut ChaCha8Rng, records: usize) -> (FunctionClass, Vec<Vec<f64>>, Vec<ObservationRecord>) {
        let (class, _) = gen_function_class(3, 6, rng).unwrap();
        let actions: Vec<Vec<f64>> = (0..4).map(|_| random_vec(rng, 3)).collect();
        let data = (0..records)
            .map(|_| ObservationRecord {
                x: random_vec(rng, 3),
                observed: (0..rng.random_range(1..4)).map(|_| (rng.random_range(0..4), rng.random_range(-2.0..2.0))).collect(),
            })
            .collect();
        (class, actions, data)
    }

    #[test]
    fn loss_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (class, actions, data) = small_problem(&mut rng, 2);
        let f = class.get(0);
        assert_eq!(cumulative_sq_loss(f, &actions, &data, 0), 0.0);

        let mut naive = 0.0;
        for rec in &data {
            for &(a, y) in &rec.observed {
                let r = naive_dot(f, &rec.x, &actions[a]) - y;
                naive += r * r;
            }
        }
        assert!((cumulative_sq_loss(f, &actions, &data, 2) - naive).abs() < 1e-12);

        let exact = ObservationRecord { x: vec![0.1, 0.2, 0.3], observed: vec![(1, f.eval(&[0.1, 0.2, 0.3], &actions[1]))] };
        assert_eq!(cumulative_sq_loss(f, &actions, &[exact], 1), 0.0);
    }

    #[test]
    fn oracle_prefers_noiseless_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (class, _) = gen_function_class(3, 2, &mut rng).unwrap();
        let actions: Vec<Vec<f64>> = (0..3).map(|_| random_vec(&mut rng, 3)).collect();
        let data: Vec<ObservationRecord> = (0..5)
            .map(|_| {
                let x = random_vec(&mut rng, 3);
                let observed = (0..3).map(|a| (a, class.get(0).eval(&x, &actions[a]))).collect();
                ObservationRecord { x, observed }
            })
            .collect();
        assert_eq!(oracle_fit(&class, &actions, &data, 5), 0);
        assert_eq!(oracle_fit(&class, &actions, &data, 0), 0);
    }

    #[test]
    fn confidence_set_radius() {
        let cs = ConfidenceSet::from_losses(&[0.0, 0.5, 2.0], 1.0);
        assert_eq!(cs.member_indices, vec![0, 1]);
        let cs = ConfidenceSet::from_losses(&[3.0, 0.5, 2.0], 0.0);
        assert_eq!(cs.member_indices, vec![1]);
        let cs = ConfidenceSet::from_losses(&[3.0, 0.5, 2.0], f64::INFINITY);
        assert_eq!(cs.member_indices, vec![0, 1, 2]);
        assert!(ConfidenceSet::from_losses(&[1.0, 2.0], 0.0).is_subset_of(&cs));
    }

    #[test]
    fn confidence_set_from_crafted_dataset() {
        // f0 fits exactly; f1 and f2 are off by sqrt(0.5) and sqrt(2) at one point.
        let f0 = BilinearFunction::new(vec![0.0], vec![0.0]).unwrap();
        let f1 = BilinearFunction::new(vec![0.0], vec![-(0.5f64).sqrt()]).unwrap();
        let f2 = BilinearFunction::new(vec![0.0], vec![-(2.0f64).sqrt()]).unwrap();
        let class = FunctionClass::new(vec![f0, f1, f2]).unwrap();
        let actions = vec![vec![0.0]];
        let data = vec![ObservationRecord { x: vec![1.0], observed: vec![(0, 0.0)] }];
        let losses: Vec<f64> = class.members().iter().map(|f| cumulative_sq_loss(f, &actions, &data, 1)).collect();
        assert!((losses[1] - 0.5).abs() < 1e-12 && (losses[2] - 2.0).abs() < 1e-12);
        assert_eq!(confidence_set(&class, &actions, &data, 1, 1.0).member_indices, vec![0, 1]);
    }

    #[test]
    fn candidate_sets() {
        let up = BilinearFunction::new(vec![0.0], vec![0.0]).unwrap();
        let down = BilinearFunction::new(vec![2.0], vec![0.0]).unwrap();
        let class = FunctionClass::new(vec![up, down]).unwrap();
        let actions = vec![vec![-1.0], vec![1.0]];
        assert_eq!(candidate_actions(&class, &[0], &[1.0], &actions), vec![1]);
        assert_eq!(candidate_actions(&class, &[0, 1], &[1.0], &actions), vec![0, 1]);
    }

    #[test]
    fn candidate_sets_match_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (class, _) = gen_function_class(10, 50, &mut rng).unwrap();
        let actions: Vec<Vec<f64>> = (0..50).map(|_| random_vec(&mut rng, 10)).collect();
        let members: Vec<usize> = (0..50).collect();
        for _ in 0..20 {
            let x: Vec<f64> = (0..10).map(|_| rng.sample(StandardNormal)).collect();
            let mut expect = [false; 50];
            for f in class.members() {
                let mut best = (0, f64::NEG_INFINITY);
                for (j, a) in actions.iter().enumerate() {
                    let v = naive_dot(f, &x, a);
                    if v > best.1 {
                        best = (j, v);
                    }
                }
                expect[best.0] = true;
            }
            let expect: Vec<usize> = (0..50).filter(|&j| expect[j]).collect();
            assert_eq!(candidate_actions(&class, &members, &x, &actions), expect);
        }
    }

    #[test]
    fn radius_and_smoothing_values() {
        // 16 * 3 * ln(2 * 2 * 4 * 64 / 0.5) = 48 ln 2048
        let b = beta_m(8, 1, 2, 2, 0.5);
        assert!((b - 48.0 * 2048f64.ln()).abs() < 1e-9);
        assert!((b - 365.99).abs() < 0.01);
        assert!((beta_m(8, 3, 2, 2, 0.5) - 16.0 * 2048f64.ln()).abs() < 1e-9);
        for m in 1..11 {
            assert!(beta_m(2048, m + 1, 50, 20, 0.1) < beta_m(2048, m, 50, 20, 0.1));
        }

        let mu = mu_m(1, 8, 0.5);
        assert!((mu - 32.0 * 24f64.ln()).abs() < 1e-9);
        assert!((mu - 101.70).abs() < 0.01);
        // epochs 1 and 2 both span two rounds; halving starts from epoch 2
        assert_eq!(mu_m(2, 2048, 0.1), mu_m(1, 2048, 0.1));
        for m in 2..11 {
            assert!((mu_m(m + 1, 2048, 0.1) - mu_m(m, 2048, 0.1) / 2.0).abs() < 1e-12);
        }
        assert!(mu_m(2, 2048, 0.01) > mu_m(2, 2048, 0.1));
    }

    #[test]
    fn history_snapshots_match_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (class, actions, data) = small_problem(&mut rng, 12);
        let mut h = History::new(class.len(), [0, 3, 7]);
        for rec in data.iter().cloned() {
            h.push(&class, &actions, rec);
        }
        for upto in [0, 3, 5, 7, 12] {
            let got = h.losses_upto(&class, &actions, upto);
            for (i, f) in class.members().iter().enumerate() {
                assert!((got[i] - cumulative_sq_loss(f, &actions, &data, upto)).abs() < 1e-9);
            }
        }
        let total: usize = data.iter().map(|r| r.observed.len()).sum();
        assert_eq!(h.observation_count(), total);
        assert_eq!(h.context(1), &data[0].x[..]);
    }

    proptest! {
        #[test]
        fn oracle_is_minimal_and_retained(seed in any::<u64>(), n in 0usize..15, beta in 0.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (class, actions, data) = small_problem(&mut rng, n);
            let best = oracle_fit(&class, &actions, &data, n);
            let best_loss = cumulative_sq_loss(class.get(best), &actions, &data, n);
            for f in class.members() {
                prop_assert!(best_loss <= cumulative_sq_loss(f, &actions, &data, n));
            }
            let cs = confidence_set(&class, &actions, &data, n, beta);
            prop_assert!(cs.contains(best));
            let x = random_vec(&mut rng, 3);
            let cands = candidate_actions(&class, &cs.member_indices, &x, &actions);
            prop_assert!(cands.contains(&class.get(best).argmax(&x, &actions)));
        }

        #[test]
        fn eval_is_linear_in_action(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = BilinearFunction::new(random_vec(&mut rng, 4), random_vec(&mut rng, 4)).unwrap();
            let (x, a, b) = (random_vec(&mut rng, 4), random_vec(&mut rng, 4), random_vec(&mut rng, 4));
            let round_trip = f.eval(&x, &a) + f.eval(&x, &b) - f.eval(&x, &a);
            prop_assert!((round_trip - f.eval(&x, &b)).abs() < 1e-12);
            // f(x, a) - f(x, b) = (x - x0) . (a - b)
            let diff: f64 = (0..4).map(|i| (x[i] - f.x0()[i]) * (a[i] - b[i])).sum();
            prop_assert!((f.eval(&x, &a) - f.eval(&x, &b) - diff).abs() < 1e-12);
        }
    }
}
