use super::Check;
use crate::stats::ks_test;
use crate::stochastic::{
    exp_race_conditionals, hypoexp_vs_exp_conditionals, prob_exceeds_exp, DistributionSpec, RngStream,
};
use crate::Result;

const KS_ALPHA: f64 = 0.01;
const BINOMIAL_SIGMAS: f64 = 4.0;

fn binomial_check(name: &str, hits: usize, draws: usize, p: f64) -> Check {
    let phat = hits as f64 / draws as f64;
    let se = (p * (1.0 - p) / draws as f64).sqrt();
    let z = (phat - p).abs() / se;
    Check::new(name, z < BINOMIAL_SIGMAS, format!("estimate {phat:.6} vs {p:.6}, {z:.2} standard errors"))
}

fn ks_check(name: &str, xs: &[f64], cdf: impl Fn(f64) -> f64) -> Check {
    let out = ks_test(xs, cdf, |_| 0.0);
    Check::new(name, out.passes(KS_ALPHA), format!("n = {}, D = {:.5}, p = {:.4}", out.n, out.statistic, out.p_value))
}

/// Monte Carlo checks of the race probabilities (`draws` samples each) and
/// of the conditional laws (`conditional` accepted samples each).
pub fn appendix_lemma_checks(draws: usize, conditional: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = RngStream::new(seed, 0);
    let mut checks = Vec::new();

    let (lambda, mu1, mu2) = (1.0, 1.0, 2.0);
    let hypo = DistributionSpec::hypoexponential(&[mu1, mu2])?;
    let hits = (0..draws)
        .filter(|_| {
            let x = rng.exponential(lambda);
            x > hypo.sample(&mut rng)
        })
        .count();
    checks.push(binomial_check("exp exceeds hypoexponential", hits, draws, prob_exceeds_exp(lambda, &hypo)?));

    let race = hypoexp_vs_exp_conditionals(lambda, mu1, mu2)?;
    let hits = (0..draws)
        .filter(|_| {
            let x = rng.exponential(lambda);
            hypo.sample(&mut rng) > x
        })
        .count();
    checks.push(binomial_check("hypoexponential exceeds exp", hits, draws, race.p_exceed));

    let (l1, l2) = (1.0, 2.0);
    let er = exp_race_conditionals(l1, l2)?;
    let hits = (0..draws).filter(|_| rng.exponential(l2) > rng.exponential(l1)).count();
    checks.push(binomial_check("exponential race", hits, draws, er.p_win));

    let (mut z, mut xs) = (Vec::with_capacity(conditional), Vec::with_capacity(conditional));
    while z.len() < conditional {
        let x = rng.exponential(lambda);
        let y = hypo.sample(&mut rng);
        if y > x {
            z.push(y - x);
            xs.push(x);
        }
    }
    checks.push(ks_check("hypoexponential overshoot law", &z, |v| race.overshoot.cdf(v)));
    checks.push(ks_check("hypoexponential arrival law", &xs, |v| race.arrival.cdf(v)));

    let (mut w, mut gap, mut loser) = (Vec::new(), Vec::new(), Vec::new());
    while w.len() < conditional {
        let x1 = rng.exponential(l1);
        let x2 = rng.exponential(l2);
        if x2 > x1 {
            w.push(x1);
            gap.push(x2 - x1);
            loser.push(x2);
        }
    }
    checks.push(ks_check("race winner law", &w, |v| er.winner_given_win.cdf(v)));
    checks.push(ks_check("race gap law", &gap, |v| er.gap_given_win.cdf(v)));
    checks.push(ks_check("race loser law", &loser, |v| er.loser_given_win.cdf(v)));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let checks = appendix_lemma_checks(50_000, 5_000, 1).unwrap();
        assert_eq!(checks.len(), 8);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
