use std::path::Path;

use anyhow::{anyhow, Context, Result};
use log::{debug, info, warn};
use serde_json::json;
use tropical_ca::ca::{
    async_run, build_stg_with, check_bijection, sync_orbit, Fault, STG_MAX_CELLS,
};
use tropical_ca::network::build_p;
use tropical_ca::render::{
    contour_plot, critical_dot, event_dag, spacetime_async, spacetime_async_pgm, spacetime_sync,
    spacetime_sync_pgm, stg_dot, AsyncLayer, PlotSpec,
};
use tropical_ca::semiring::{Ext, MaxPlusMatrix, Scalar};
use tropical_ca::spectral::{analyze_tol, is_eigenvector, is_irreducible, SpectralSummary};
use tropical_ca::trajectory::{detect_regime, iterate, verify_regime, RegimeReport};

use crate::config::Experiment;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Schedule {
    Sync,
    Async,
    Both,
}

/// Files to write and whether every check passed.
#[derive(Default)]
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
    pub failures: Vec<String>,
}

impl Outputs {
    fn add(&mut self, name: &str, data: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), data.into()));
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl std::fmt::Display) {
        if ok {
            println!("PASS  {name}: {detail}");
        } else {
            println!("FAIL  {name}: {detail}");
            self.failures.push(name.to_string());
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, data) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, data).with_context(|| format!("writing {}", path.display()))?;
            info!("wrote {}", path.display());
        }
        Ok(())
    }
}

pub struct RunContext<'a> {
    pub exp: &'a Experiment,
    pub parallel: bool,
    pub fault: Fault,
}

fn plot_spec(exp: &Experiment) -> PlotSpec {
    let mut spec = PlotSpec {
        time_scale: exp.time_scale,
        ..PlotSpec::default()
    };
    for (k, v) in exp.metadata() {
        spec = spec.with_meta(k, v);
    }
    spec
}

fn timing_matrix<T: Scalar>(exp: &Experiment) -> Result<MaxPlusMatrix<T>> {
    let (params, _) = exp.timing::<T>()?;
    Ok(build_p(&exp.spec, &params)?)
}

fn spectral<T: Scalar>(
    exp: &Experiment,
    p: &MaxPlusMatrix<T>,
) -> Result<SpectralSummary<T::Field>> {
    Ok(analyze_tol(p, exp.tol)?)
}

fn regime<T: Scalar>(
    exp: &Experiment,
    p: &MaxPlusMatrix<T>,
    summary: &SpectralSummary<T::Field>,
) -> Result<Option<RegimeReport<T::Field>>> {
    if exp.mode == crate::config::Mode::Float {
        warn!("regime detection needs exact arithmetic; skipped in float mode");
        return Ok(None);
    }
    let (_, x0) = exp.timing::<T>()?;
    let traj = iterate(p, &x0, 0)?;
    Ok(Some(detect_regime(&traj, summary)?))
}

pub fn analyze<T: Scalar>(cx: &RunContext) -> Result<Outputs> {
    let exp = cx.exp;
    let p = timing_matrix::<T>(exp)?;
    let summary = spectral(exp, &p)?;
    println!("lambda = {}", summary.lambda);
    println!("sigma = {}", summary.sigma);
    println!(
        "critical nodes = {:?}",
        summary
            .critical
            .nodes
            .iter()
            .map(|i| i + 1)
            .collect::<Vec<_>>()
    );
    let mut out = Outputs::default();
    out.add("network.json", exp.network_json()?);
    out.add("spectral.json", summary.to_json()? + "\n");
    out.add("critical.dot", critical_dot(&summary, &plot_spec(exp)));
    Ok(out)
}

pub fn simulate<T: Scalar>(cx: &RunContext) -> Result<Outputs> {
    let exp = cx.exp;
    let p = timing_matrix::<T>(exp)?;
    let summary = spectral(exp, &p)?;
    let (_, x0) = exp.timing::<T>()?;
    let traj = iterate(&p, &x0, exp.k_max)?;
    let mut out = Outputs::default();
    out.add("network.json", exp.network_json()?);
    out.add("trajectory.csv", traj.to_csv(summary.lambda)?);
    out.add("contours.svg", contour_plot(&traj, &plot_spec(exp)));
    println!("lambda = {}", summary.lambda);
    if let Some(r) = regime(exp, &p, &summary)? {
        println!("k* = {}", r.k_star);
        println!("rho = {}", r.rho);
        println!("mu = {}", r.mu);
        println!("cycletime = {}", r.cycletime()?);
        out.add("regime.json", r.to_json()? + "\n");
    }
    Ok(out)
}

pub fn ca<T: Scalar>(cx: &RunContext, schedule: Schedule) -> Result<Outputs> {
    let exp = cx.exp;
    let plot = plot_spec(exp);
    let mut out = Outputs::default();
    out.add("network.json", exp.network_json()?);
    if schedule != Schedule::Async {
        let orbit = sync_orbit(exp.rule, &exp.spec, &exp.s0, exp.orbit_cap)?;
        println!("sync entry = {}", orbit.entry);
        println!("sync period = {}", orbit.period);
        for s in orbit.cycle() {
            println!("  {s}");
        }
        let steps = exp.k_max + 1;
        out.add("orbit.json", serde_json::to_string_pretty(&orbit)? + "\n");
        out.add("sync.svg", spacetime_sync(&orbit, steps, &plot));
        out.add(
            "sync.pgm",
            spacetime_sync_pgm(&orbit, steps, &plot).to_pgm(),
        );
    }
    if schedule != Schedule::Sync {
        let (params, x0) = exp.timing::<T>()?;
        let run = async_run(exp.rule, &exp.spec, &params, &exp.s0, &x0, exp.k_max)?;
        let states: Vec<String> = run.contour_states().iter().map(|s| s.to_string()).collect();
        out.add("contour_states.txt", states.join("\n") + "\n");
        out.add(
            "async_contours.svg",
            spacetime_async(&run, &plot, AsyncLayer::ContoursWithStates),
        );
        out.add(
            "async_memory.svg",
            spacetime_async(&run, &plot, AsyncLayer::MemoryWithContours),
        );
        out.add(
            "async_final.svg",
            spacetime_async(&run, &plot, AsyncLayer::Final),
        );
        out.add("async.pgm", spacetime_async_pgm(&run, &plot).to_pgm());
        out.add("events.dot", event_dag(&run, 0..=exp.k_max.min(4), &plot)?);
        println!("async contours = {}", exp.k_max + 1);
    }
    if schedule == Schedule::Both {
        let (params, x0) = exp.timing::<T>()?;
        let report = check_bijection(
            exp.rule, &exp.spec, &params, &exp.s0, &x0, exp.k_max, cx.fault,
        )?;
        out.check(
            "bijection",
            report.holds(),
            mismatch_summary(&report, exp.k_max),
        );
    }
    Ok(out)
}

fn mismatch_summary(report: &tropical_ca::ca::BijectionReport, k_max: usize) -> String {
    if report.holds() {
        format!("contour states equal synchronous states for k = 0..={k_max}")
    } else {
        format!(
            "state mismatches at k = {:?}, time mismatches at k = {:?}",
            report.state_mismatches, report.time_mismatches
        )
    }
}

pub fn stg(cx: &RunContext) -> Result<Outputs> {
    let exp = cx.exp;
    let g = build_stg_with(exp.rule, &exp.spec, STG_MAX_CELLS, cx.parallel)?;
    let census = g.census();
    println!("states = {}", g.state_count());
    println!("fixed points = {:?}", census.fixed_points);
    for c in census.cycles.iter().take(8) {
        println!("cycle of period {}: {:?}", c.period, c.states);
    }
    if census.cycles.len() > 8 {
        println!(
            "... {} more cycles in attractors.json",
            census.cycles.len() - 8
        );
    }
    println!("transient states = {}", g.transient_count());
    let mut out = Outputs::default();
    out.add("attractors.json", g.census_json()? + "\n");
    out.add("stg.dot", stg_dot(&g, &plot_spec(exp)));
    Ok(out)
}

pub fn verify<T: Scalar>(cx: &RunContext) -> Result<Outputs> {
    let exp = cx.exp;
    let mut out = Outputs::default();
    let p = timing_matrix::<T>(exp)?;
    if !is_irreducible(&p)? {
        return Err(anyhow!(tropical_ca::Error::Reducible {
            op: "verify",
            components: tropical_ca::spectral::scc_decompose(&tropical_ca::spectral::build_graph(
                &p
            )?)
            .len(),
        }));
    }
    let summary = spectral(exp, &p)?;

    let pf = p.to_field();
    let mut bad = 0;
    for v in summary.eigenbasis.iter().chain(&summary.critical_columns) {
        if !is_eigenvector(&pf, summary.lambda, v, exp.tol)? {
            bad += 1;
        }
    }
    out.check(
        "eigen-equation",
        bad == 0,
        format!(
            "{} of {} vectors satisfy P v = {} v",
            summary.eigenbasis.len() + summary.critical_columns.len() - bad,
            summary.eigenbasis.len() + summary.critical_columns.len(),
            summary.lambda
        ),
    );

    match regime(exp, &p, &summary)? {
        Some(r) => {
            let ok = verify_regime(&r, &p) && r.cycletime()? == summary.lambda;
            out.check(
                "regime",
                ok,
                format!(
                    "k* = {}, rho = {}, mu = {}, sigma = {}",
                    r.k_star, r.rho, r.mu, summary.sigma
                ),
            );
        }
        None => println!("SKIP  regime: needs int or rational mode"),
    }

    let (params, x0) = exp.timing::<T>()?;
    let report = check_bijection(
        exp.rule, &exp.spec, &params, &exp.s0, &x0, exp.k_max, cx.fault,
    )?;
    debug!("bijection report {report:?}");
    out.check(
        "bijection",
        report.holds(),
        mismatch_summary(&report, exp.k_max),
    );

    let lambda = Ext::Fin(summary.lambda);
    out.add(
        "verify.json",
        serde_json::to_string_pretty(&json!({
            "lambda": lambda,
            "sigma": summary.sigma,
            "failures": out.failures,
        }))? + "\n",
    );
    Ok(out)
}

pub fn render<T: Scalar>(cx: &RunContext) -> Result<Outputs> {
    let mut out = simulate::<T>(cx)?;
    let ca = ca::<T>(cx, Schedule::Both)?;
    let exp = cx.exp;
    let p = timing_matrix::<T>(exp)?;
    let summary = spectral(exp, &p)?;
    out.files
        .extend(ca.files.into_iter().filter(|(n, _)| n != "network.json"));
    out.failures.extend(ca.failures);
    out.add("critical.dot", critical_dot(&summary, &plot_spec(exp)));
    if exp.spec.size() <= 10 {
        out.files.extend(stg(cx)?.files);
    } else {
        info!("state transition graph skipped for N > 10");
    }
    Ok(out)
}
