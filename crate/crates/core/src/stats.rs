//! Small statistics toolkit: moments, batch means, Kolmogorov-Smirnov and
//! one-way ANOVA.

use statrs::distribution::{ContinuousCDF, FisherSnedecor};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Standard error of the mean of independent values.
pub fn std_error(xs: &[f64]) -> f64 {
    std_dev(xs) / (xs.len() as f64).sqrt()
}

/// Pearson correlation.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Outcome of a Kolmogorov-Smirnov goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

impl KsOutcome {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// One-sample KS test against a CDF that may have atoms.
///
/// `atom(x)` gives the probability mass at `x` so the left limit of the CDF
/// can be formed; pass `|_| 0.0` for continuous laws. The p-value uses the
/// asymptotic Kolmogorov distribution with Stephens' small-sample correction,
/// which is conservative when atoms are present.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64, atom: impl Fn(f64) -> f64) -> KsOutcome {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < n {
        let x = xs[i];
        let mut j = i;
        while j < n && xs[j] == x {
            j += 1;
        }
        let f = cdf(x);
        let f_left = f - atom(x);
        // Empirical CDF jumps from i/n to j/n at x.
        d = d.max((j as f64 / nf - f).abs());
        d = d.max((i as f64 / nf - f_left).abs());
        i = j;
    }
    let sqrt_n = nf.sqrt();
    let p_value = kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
    KsOutcome { statistic: d, p_value, n }
}

/// `P(K > t)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Mean and standard error from a set of batch estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_batches(value: f64, batches: &[f64]) -> Self {
        let std_error = if batches.len() >= 2 { std_error(batches) } else { f64::NAN };
        Self { value, std_error }
    }
}

/// One-way ANOVA p-value for equality of group means.
pub fn anova_p_value(groups: &[Vec<f64>]) -> f64 {
    let k = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();
    if k < 2 || n <= k {
        return 1.0;
    }
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut between = 0.0;
    let mut within = 0.0;
    for g in groups {
        let m = mean(g);
        between += g.len() as f64 * (m - grand) * (m - grand);
        within += g.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    }
    let df1 = (k - 1) as f64;
    let df2 = (n - k) as f64;
    if within == 0.0 {
        return if between == 0.0 { 1.0 } else { 0.0 };
    }
    let f = (between / df1) / (within / df2);
    match FisherSnedecor::new(df1, df2) {
        Ok(dist) => 1.0 - dist.cdf(f),
        Err(_) => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{DistributionSpec, RngStream};

    #[test]
    fn kolmogorov_critical_value() {
        // The classic 1% critical value of sqrt(n) D.
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 2e-4);
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 2e-4);
    }

    #[test]
    fn ks_accepts_true_law_and_rejects_wrong_one() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        let mut rng = RngStream::new(3, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| d.sample(&mut rng)).collect();
        assert!(ks_test(&xs, |x| d.cdf(x), |_| 0.0).passes(0.01));
        let wrong = DistributionSpec::exponential(1.1).unwrap();
        assert!(!ks_test(&xs, |x| wrong.cdf(x), |_| 0.0).passes(0.01));
    }

    #[test]
    fn ks_handles_atoms() {
        let d = DistributionSpec::mixture(vec![
            (0.3, DistributionSpec::zero()),
            (0.7, DistributionSpec::exponential(2.0).unwrap()),
        ])
        .unwrap();
        let mut rng = RngStream::new(4, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| d.sample(&mut rng)).collect();
        assert!(ks_test(&xs, |x| d.cdf(x), |x| d.atom(x)).passes(0.01));
    }

    #[test]
    fn anova_detects_shift() {
        let mut rng = RngStream::new(5, 0);
        let g = |rng: &mut RngStream, m: f64| (0..200).map(|_| m + rng.uniform()).collect::<Vec<_>>();
        let same = vec![g(&mut rng, 0.0), g(&mut rng, 0.0), g(&mut rng, 0.0)];
        let shifted = vec![g(&mut rng, 0.0), g(&mut rng, 0.0), g(&mut rng, 0.5)];
        assert!(anova_p_value(&same) > 0.001);
        assert!(anova_p_value(&shifted) < 1e-6);
    }
}
