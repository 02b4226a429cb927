use std::fs::File;
use std::io::{BufWriter, Write};

use super::format::{num, opt, table};
use super::*;
use crate::scenarios::{
    appendix_lemma_checks, bounds_containment_sweep, bounds_sweep_zero_wait, closure_check, default_closure_scenarios,
    equispaced_loads, permutations, reproduce_tandem_table, slowest_last, AnalyticReport, ExperimentResult,
    ScenarioSpec, SystemKind,
};
use crate::sim::{self, write_log_csv, Pairing};
use crate::stochastic::RngStream;

const DEFAULT_REPS: u32 = 10;
const DEFAULT_DEPARTURES: u64 = 100_000;

pub(super) fn dispatch(cmd: &Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let output = match cmd {
        Command::Analytic(a) => &a.output,
        Command::Simulate(s) => &s.model.output,
        Command::Table(t) => &t.output,
        Command::Verify(v) => &v.output,
        Command::Sweep(s) => &s.output,
    };
    let mut buf = Vec::new();
    let code = match cmd {
        Command::Analytic(a) => analytic(a, &mut buf)?,
        Command::Simulate(s) => simulate(s, &mut buf)?,
        Command::Table(t) => tandem_table(t, &mut buf)?,
        Command::Verify(v) => verify(v, &mut buf)?,
        Command::Sweep(s) => sweep(s, &mut buf)?,
    };
    // Output is assembled first so a failing command leaves no partial file.
    match &output.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => stdout.write_all(&buf)?,
    }
    Ok(code)
}

fn spec_from_flags(m: &ModelArgs) -> Result<ScenarioSpec, CliError> {
    let name =
        m.model.as_deref().ok_or_else(|| CliError::Usage("--model is required unless --config is given".into()))?;
    let system = SystemKind::from_name(name).ok_or_else(|| CliError::Usage(format!("unknown model '{name}'")))?;
    if system == SystemKind::IndependentFeed {
        return Err(CliError::Usage("independent-feed needs a feed law; describe it in a --config file".into()));
    }
    let mut spec = ScenarioSpec::new(system.name(), system, &[]);
    apply_flags(&mut spec, m);
    Ok(spec)
}

fn apply_flags(spec: &mut ScenarioSpec, m: &ModelArgs) {
    for (k, v) in [("lambda", m.lambda), ("mu", m.mu), ("gamma", m.gamma), ("theta", m.theta), ("alpha", m.alpha)] {
        if let Some(v) = v {
            spec.parameters.insert(k.into(), v);
        }
    }
    if !m.rates.is_empty() {
        spec.rates = m.rates.clone();
    }
}

fn params_of(spec: &ScenarioSpec) -> Vec<(&'static str, String)> {
    let mut p: Vec<(&'static str, String)> = vec![("model", spec.system.name().to_string())];
    for key in ["lambda", "gamma", "theta", "alpha", "mu"] {
        if let Some(v) = spec.parameters.get(key) {
            p.push((key, sim::sig12(*v)));
        }
    }
    if !spec.rates.is_empty() {
        let r: Vec<String> = spec.rates.iter().map(|&x| sim::sig12(x)).collect();
        p.push(("rates", r.join(";")));
    }
    p
}

fn analytic_rows(r: &AnalyticReport, f: Format) -> Vec<Vec<String>> {
    vec![vec![
        r.model.clone(),
        num(r.delta0, f),
        opt(r.correction, f),
        opt(r.delta, f),
        opt(r.bounds.map(|b| b.lower), f),
        opt(r.bounds.map(|b| b.upper), f),
        opt(r.delta0_service_start, f),
        opt(r.heuristic, f),
    ]]
}

const ANALYTIC_HEADER: [&str; 8] =
    ["model", "delta0", "correction", "delta", "lb", "ub", "delta0_service_start", "heuristic"];

fn analytic(a: &ModelArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = spec_from_flags(a)?;
    let report = spec.analytic()?;
    let f = a.output.format;
    table(out, f, None, &params_of(&spec), &ANALYTIC_HEADER, &analytic_rows(&report, f))?;
    Ok(EXIT_OK)
}

fn simulate(s: &SimulateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut spec = match &s.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let mut spec = ScenarioSpec::from_toml(&text)?;
            if let Some(m) = &s.model.model {
                let system = SystemKind::from_name(m).ok_or_else(|| CliError::Usage(format!("unknown model '{m}'")))?;
                spec.system = system;
            }
            apply_flags(&mut spec, &s.model);
            if let Some(seed) = s.run.seed {
                spec.seed = seed;
            }
            spec
        }
        None => {
            let mut spec = spec_from_flags(&s.model)?;
            spec.seed = resolve_seed(s.run.seed)?;
            spec.replications = DEFAULT_REPS;
            spec.departures_per_rep = DEFAULT_DEPARTURES;
            spec
        }
    };
    if let Some(r) = s.run.reps {
        spec.replications = r;
    }
    if let Some(d) = s.run.departures {
        spec.departures_per_rep = d;
    }
    if s.run.warmup.is_some() {
        spec.warmup = s.run.warmup;
    }
    let result = spec.run()?;

    if let Some(path) = &s.log {
        let cfg = spec.run_config().with_log();
        let first = spec.simulate(&cfg, RngStream::new(spec.seed, 0))?;
        let mut w = BufWriter::new(File::create(path)?);
        write_log_csv(first.log.as_deref().unwrap_or_default(), &mut w)?;
        w.flush()?;
    }

    let f = s.model.output.format;
    let mut params = params_of(&spec);
    params.push(("reps", spec.replications.to_string()));
    params.push(("departures", spec.departures_per_rep.to_string()));
    table(out, f, Some(spec.seed), &params, &SIM_HEADER, &simulation_rows(&result, f))?;
    if f == Format::Pretty {
        writeln!(out)?;
        let a = &result.analytic;
        table(out, f, None, &[], &ANALYTIC_HEADER, &analytic_rows(a, f))?;
        if let Some(v) = result.verdict {
            let against = if a.delta.is_some() { "the closed form (1%)" } else { "the bound interval" };
            writeln!(out, "\nsimulation mean {} {against}", if v { "agrees with" } else { "DISAGREES with" })?;
        }
    }
    Ok(EXIT_OK)
}

const SIM_HEADER: [&str; 10] =
    ["rep", "aaoi", "eff_rate", "cross_moment", "corr", "cv_y", "mean_A", "sd_A", "far_rate", "se_aaoi"];

fn simulation_rows(r: &ExperimentResult, f: Format) -> Vec<Vec<String>> {
    let row = |label: String, e: &sim::Fields, se: f64| {
        vec![
            label,
            num(e.aaoi, f),
            num(e.effective_rate, f),
            num(e.cross_moment, f),
            num(e.correlation, f),
            num(e.cv_interdeparture, f),
            num(e.mean_initial_age, f),
            num(e.sd_initial_age, f),
            num(e.far_update_rate, f),
            num(se, f),
        ]
    };
    let mut rows: Vec<Vec<String>> =
        r.runs.iter().enumerate().map(|(i, s)| row(i.to_string(), &s.estimates, s.standard_errors.aaoi)).collect();
    let ests: Vec<sim::Fields> = r.runs.iter().map(|s| s.estimates).collect();
    let mean = sim::Fields::mean_of(&ests);
    rows.push(row("mean".into(), &mean, r.se_aaoi));
    rows
}

fn tandem_table(t: &TableArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let loads = if t.loads.is_empty() { equispaced_loads(t.queues) } else { t.loads.clone() };
    if loads.is_empty() {
        return Err(CliError::Usage("need at least one queue".into()));
    }
    if t.all_orderings && loads.len() > 7 {
        return Err(CliError::Usage(format!("{}! orderings is too many; drop --all-orderings", loads.len())));
    }
    let orderings = if t.all_orderings { permutations(loads.len()) } else { vec![slowest_last(&loads)] };
    let seed = resolve_seed(t.run.seed)?;
    let reps = t.run.reps.unwrap_or(100) as usize;
    let departures = t.run.departures.unwrap_or(DEFAULT_DEPARTURES);
    let rows = reproduce_tandem_table(&loads, &orderings, reps, departures, seed)?;

    let f = t.output.format;
    let k = loads.len();
    let mut header: Vec<String> = (1..=k).map(|i| format!("rho_{i}")).collect();
    header.extend(
        ["age_av", "age_sd", "age_lb", "age_ub", "slowest_last_lb", "slowest_last_ub", "far_updates"].map(String::from),
    );
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut c: Vec<String> = r.loads.iter().map(|&x| num(x, f)).collect();
            c.extend([r.age_av, r.age_sd, r.age_lb, r.age_ub, r.slowest_last_lb, r.slowest_last_ub].map(|x| num(x, f)));
            c.push(r.far_updates.to_string());
            c
        })
        .collect();
    let params = [("reps", reps.to_string()), ("departures", departures.to_string())];
    table(out, f, Some(seed), &params, &header, &cells)?;
    Ok(EXIT_OK)
}

fn verify(v: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let seed = resolve_seed(v.run.seed)?;
    let f = v.output.format;
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" }.to_string();
    let all_passed = match v.suite.suite {
        Suite::Theorem1 => {
            let reps = v.run.reps.unwrap_or(20);
            let departures = v.run.departures.unwrap_or(DEFAULT_DEPARTURES);
            let mut rows = Vec::new();
            let mut ok = true;
            for mut spec in default_closure_scenarios(reps, departures, seed) {
                spec.warmup = v.run.warmup;
                let c = closure_check(&spec, Pairing::Lagged)?;
                ok &= c.passed;
                rows.push(vec![
                    c.name.clone(),
                    num(c.mean_aaoi, f),
                    num(c.implied_delta0, f),
                    num(c.combined_se, f),
                    num(c.delta0, f),
                    num(c.z, f),
                    verdict(c.passed),
                ]);
                if let Some((d, z, pass)) = c.service_start {
                    rows.push(vec![
                        format!("{} (service-start)", c.name),
                        num(c.mean_aaoi, f),
                        num(c.implied_delta0, f),
                        num(c.combined_se, f),
                        num(d, f),
                        num(z, f),
                        verdict(pass),
                    ]);
                }
            }
            let params = [("reps", reps.to_string()), ("departures", departures.to_string())];
            let header = ["scenario", "mean_aaoi", "implied_delta0", "se", "delta0", "z", "status"];
            table(out, f, Some(seed), &params, &header, &rows)?;
            ok
        }
        Suite::AppendixLemmas => {
            let draws = v.run.departures.unwrap_or(200_000) as usize;
            let checks = appendix_lemma_checks(draws, (draws / 10).max(1_000), seed)?;
            let rows: Vec<Vec<String>> =
                checks.iter().map(|c| vec![c.name.clone(), verdict(c.passed), c.detail.clone()]).collect();
            let header = ["check", "status", "detail"];
            table(out, f, Some(seed), &[("draws", draws.to_string())], &header, &csv_safe(rows, f))?;
            checks.iter().all(|c| c.passed)
        }
        Suite::Bounds => {
            let points = v.run.reps.unwrap_or(1_000) as usize;
            let report = bounds_containment_sweep(points, seed)?;
            let mut rows = vec![vec!["checked".to_string(), report.checked.to_string()]];
            rows.push(vec!["violations".to_string(), report.violations.len().to_string()]);
            table(out, f, Some(seed), &[("points", points.to_string())], &["item", "count"], &rows)?;
            for msg in &report.violations {
                writeln!(out, "# violation: {msg}")?;
            }
            report.passed()
        }
    };
    if f == Format::Pretty {
        writeln!(out, "\n{}", if all_passed { "all checks passed" } else { "some checks FAILED" })?;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_FAILED })
}

fn csv_safe(rows: Vec<Vec<String>>, f: Format) -> Vec<Vec<String>> {
    if f == Format::Pretty {
        return rows;
    }
    rows.into_iter()
        .map(|r| {
            r.into_iter().map(|c| if c.contains(',') { format!("\"{}\"", c.replace('"', "\"\"")) } else { c }).collect()
        })
        .collect()
}

fn sweep(s: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if s.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let grid: Vec<f64> = (0..s.points).map(|i| 0.95 * i as f64 / (s.points - 1) as f64).collect();
    let rows = bounds_sweep_zero_wait(s.mu, &grid)?;
    let f = s.output.format;
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| [r.alpha, r.correction, r.lb, r.ub, r.clamped_lb].iter().map(|&x| num(x, f)).collect())
        .collect();
    let header = ["alpha", "correction", "lb", "ub", "clamped_lb"];
    table(out, f, None, &[("model", "zero-wait".into()), ("mu", sim::sig12(s.mu))], &header, &cells)?;
    Ok(EXIT_OK)
}
