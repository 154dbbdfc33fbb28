//! Pointwise aggregation of regret curves across repeats.

use alloc::vec::Vec;

/// Mean with a one-standard-deviation band (population std).
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurves {
    pub mean: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub std: Vec<f64>,
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

impl AggregateCurves {
    /// Aggregates equally long traces, in the order given.
    pub fn from_traces<T: AsRef<[f64]>>(traces: &[T]) -> Self {
        let len = traces.first().map_or(0, |t| t.as_ref().len());
        assert!(traces.iter().all(|t| t.as_ref().len() == len), "traces must have equal length");
        let mut out = Self {
            mean: Vec::with_capacity(len),
            upper: Vec::with_capacity(len),
            lower: Vec::with_capacity(len),
            std: Vec::with_capacity(len),
        };
        let mut column = Vec::with_capacity(traces.len());
        for i in 0..len {
            column.clear();
            column.extend(traces.iter().map(|t| t.as_ref()[i]));
            let (m, s) = mean_std(&column);
            out.mean.push(m);
            out.upper.push(m + s);
            out.lower.push(m - s);
            out.std.push(s);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_repeat_has_no_band() {
        let c = AggregateCurves::from_traces(&[vec![1.0, 2.5, 4.0]]);
        assert_eq!(c.mean, c.upper);
        assert_eq!(c.mean, c.lower);
    }

    #[test]
    fn two_constant_traces() {
        let c = AggregateCurves::from_traces(&[vec![10.0; 3], vec![20.0; 3]]);
        assert_eq!(c.mean, vec![15.0; 3]);
        assert_eq!(c.std, vec![5.0; 3]);
        assert_eq!(c.lower, vec![10.0; 3]);
        assert_eq!(c.upper, vec![20.0; 3]);
    }

    #[test]
    fn band_is_ordered() {
        let traces: Vec<Vec<f64>> = (0..7).map(|k| (0..20).map(|t| (t * k % 5) as f64 * 0.7).collect()).collect();
        let c = AggregateCurves::from_traces(&traces);
        for i in 0..c.len() {
            assert!(c.lower[i] <= c.mean[i] && c.mean[i] <= c.upper[i]);
        }
        assert!(mean_std(&[]).0.is_nan());
    }
}
