use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::sim::{self, sig12, RunConfig};
use crate::{stats, Error, Result};

/// `k` loads evenly spaced over `[0.1, 0.9]`.
pub fn equispaced_loads(k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![0.9],
        _ => (0..k).map(|i| 0.1 + 0.8 * i as f64 / (k - 1) as f64).collect(),
    }
}

/// Ordering that places the heaviest load last.
pub fn slowest_last(loads: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..loads.len()).collect();
    idx.sort_by(|&a, &b| loads[a].total_cmp(&loads[b]).then(a.cmp(&b)));
    idx
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..k).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

fn check_ordering(loads: &[f64], ordering: &[usize]) -> Result<Vec<f64>> {
    let mut seen = vec![false; loads.len()];
    for &i in ordering {
        if i >= loads.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Config(format!("{ordering:?} is not a permutation of {} loads", loads.len())));
        }
    }
    if ordering.len() != loads.len() {
        return Err(Error::Config(format!("{ordering:?} is not a permutation of {} loads", loads.len())));
    }
    Ok(ordering.iter().map(|&i| loads[i]).collect())
}

fn validate_loads(loads: &[f64]) -> Result<()> {
    if loads.is_empty() || loads.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::Config(format!("loads must lie in (0, 1), got {loads:?}")));
    }
    Ok(())
}

/// One line of a tandem table: the loads in path order with the replication
/// statistics and the bound interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub ordering: Vec<usize>,
    pub loads: Vec<f64>,
    /// Mean of the replication AAoIs.
    pub age_av: f64,
    /// Standard deviation of the replication AAoIs.
    pub age_sd: f64,
    /// Bounds using this ordering's final queue.
    pub age_lb: f64,
    pub age_ub: f64,
    /// Bounds with the heaviest queue moved last, the tightest choice.
    pub slowest_last_lb: f64,
    pub slowest_last_ub: f64,
    pub far_updates: u64,
    pub replication_means: Vec<f64>,
}

impl TableRow {
    pub fn std_error(&self) -> f64 {
        self.age_sd / (self.replication_means.len() as f64).sqrt()
    }
}

fn bounds_for(loads: &[f64]) -> Result<analytic::BoundInterval> {
    let rates: Vec<f64> = loads.iter().map(|r| 1.0 / r).collect();
    let (last, prior) = rates.split_last().expect("non-empty");
    Ok(analytic::tandem_chain_bounds(1.0, prior, *last)?.interval)
}

/// Simulates an M/M/1 chain with `lambda = 1` and service rates `1 / load`
/// for every ordering; ordering `j` uses streams `j * replications ..`.
pub fn reproduce_tandem_table(
    loads: &[f64],
    orderings: &[Vec<usize>],
    replications: usize,
    departures_per_rep: u64,
    seed: u64,
) -> Result<Vec<TableRow>> {
    validate_loads(loads)?;
    if replications == 0 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    let tight = bounds_for(&check_ordering(loads, &slowest_last(loads))?)?;
    let cfg = RunConfig::observed(departures_per_rep, None);
    let mut rows = Vec::with_capacity(orderings.len());
    for (j, ordering) in orderings.iter().enumerate() {
        let ordered = check_ordering(loads, ordering)?;
        let rates: Vec<f64> = ordered.iter().map(|r| 1.0 / r).collect();
        let runs = sim::replicate_streams((j * replications) as u64, replications, seed, |rng| {
            sim::run_tandem(&rates, 1.0, &cfg, rng).map(|o| o.stats)
        });
        let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
        let means: Vec<f64> = runs.iter().map(|s| s.aaoi()).collect();
        let b = bounds_for(&ordered)?;
        rows.push(TableRow {
            ordering: ordering.clone(),
            loads: ordered,
            age_av: stats::mean(&means),
            age_sd: if means.len() > 1 { stats::std_dev(&means) } else { f64::NAN },
            age_lb: b.lower,
            age_ub: b.upper,
            slowest_last_lb: tight.lower,
            slowest_last_ub: tight.upper,
            far_updates: runs.iter().map(|s| s.far_updates).sum(),
            replication_means: means,
        });
    }
    Ok(rows)
}

/// Writes rows as `rho_1..rho_k,age_av,age_sd,age_lb,age_ub` followed by the
/// slowest-last bounds and the far-update count.
pub fn write_table_csv<W: Write>(rows: &[TableRow], mut out: W) -> io::Result<()> {
    let k = rows.first().map_or(0, |r| r.loads.len());
    let mut header: Vec<String> = (1..=k).map(|i| format!("rho_{i}")).collect();
    header.extend(
        ["age_av", "age_sd", "age_lb", "age_ub", "slowest_last_lb", "slowest_last_ub", "far_updates"].map(String::from),
    );
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let mut cells: Vec<String> = r.loads.iter().map(|&x| sig12(x)).collect();
        cells.extend([r.age_av, r.age_sd, r.age_lb, r.age_ub, r.slowest_last_lb, r.slowest_last_ub].map(sig12));
        cells.push(r.far_updates.to_string());
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Comparison of the AAoI across server orderings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub rows: Vec<TableRow>,
    pub max_pairwise_gap: f64,
    /// Largest `|m_i - m_j| / sqrt(se_i^2 + se_j^2)` over pairs.
    pub max_gap_in_se: f64,
    pub anova_p_value: f64,
}

pub fn ordering_invariance_test(
    loads: &[f64],
    orderings: &[Vec<usize>],
    replications: usize,
    departures_per_rep: u64,
    seed: u64,
) -> Result<OrderingReport> {
    let rows = reproduce_tandem_table(loads, orderings, replications, departures_per_rep, seed)?;
    Ok(compare_rows(rows))
}

pub(crate) fn compare_rows(rows: Vec<TableRow>) -> OrderingReport {
    let mut gap: f64 = 0.0;
    let mut z: f64 = 0.0;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let d = (a.age_av - b.age_av).abs();
            gap = gap.max(d);
            let se = (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
            if se > 0.0 {
                z = z.max(d / se);
            }
        }
    }
    let groups: Vec<Vec<f64>> = rows.iter().map(|r| r.replication_means.clone()).collect();
    OrderingReport { anova_p_value: stats::anova_p_value(&groups), rows, max_pairwise_gap: gap, max_gap_in_se: z }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_and_orderings() {
        let l = equispaced_loads(3);
        assert_eq!(l.len(), 3);
        assert!((l[1] - 0.5).abs() < 1e-15);
        assert_eq!(slowest_last(&[0.9, 0.1, 0.5]), vec![1, 2, 0]);
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert_eq!(permutations(4).len(), 24);
        assert!(check_ordering(&l, &[0, 0, 1]).is_err());
        assert!(check_ordering(&l, &[0, 1]).is_err());
    }

    #[test]
    fn small_table_and_csv() {
        let loads = [0.1, 0.5, 0.9];
        let rows = reproduce_tandem_table(&loads, &[vec![0, 1, 2], vec![0, 1, 2]], 3, 2_000, 7).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].far_updates, 0);
        assert!((rows[0].age_lb - 9.295).abs() < 0.01);
        // Same ordering, different streams.
        assert_ne!(rows[0].age_av, rows[1].age_av);
        let mut buf = Vec::new();
        write_table_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("rho_1,rho_2,rho_3,age_av,age_sd,age_lb,age_ub,"));
        assert_eq!(text.lines().count(), 3);
    }
}
