//! Subcommand bodies. Each writes its CSV files into the output directory,
//! reports progress to `log`, and returns the paths written.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use tclfano::bath::SpectralParams;
use tclfano::export::{self, SteadyRow};
use tclfano::metrics::{
    boundary_curve, bures_trajectory, heatmap, DistanceTrajectory, SweepSettings,
};
use tclfano::models::{ModelRegistry, OrderModel};
use tclfano::numerics::{build_frequency_quadrature, FrequencyQuadrature, TimeGrid};
use tclfano::validation::{run_suite, Outcome};

use crate::config::{Config, SweepKind};

/// Validated pieces shared by all subcommands.
struct Prepared<'r> {
    params: SpectralParams,
    grid: TimeGrid,
    models: Vec<&'r dyn OrderModel>,
    out: PathBuf,
}

fn prepare<'r>(cfg: &Config, registry: &'r ModelRegistry) -> Result<Prepared<'r>> {
    cfg.params.validate()?;
    let grid = cfg.grid()?;
    let models = registry.resolve_list(&cfg.orders)?;
    let out = cfg.output_dir();
    fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    Ok(Prepared {
        params: cfg.params,
        grid,
        models,
        out,
    })
}

fn quadrature(
    cfg: &Config,
    params: &SpectralParams,
    grid: &TimeGrid,
) -> Result<FrequencyQuadrature> {
    Ok(build_frequency_quadrature(
        params,
        &cfg.quadrature.with_horizon(grid.t_end()),
    )?)
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn report_regime(params: &SpectralParams, log: &mut dyn Write) -> Result<()> {
    let r = params.coupling_regime();
    writeln!(
        log,
        "regime: {} (gamma0/lambda = {:.6}, R(delta) = {:.6})",
        r.classification, r.alpha_sq, r.radius
    )?;
    Ok(())
}

/// `coeffs_<order>.csv` per requested order.
pub fn coeffs(cfg: &Config, log: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let registry = ModelRegistry::standard();
    let p = prepare(cfg, &registry)?;
    report_regime(&p.params, log)?;
    let quad = quadrature(cfg, &p.params, &p.grid)?;
    let mut written = Vec::new();
    for m in &p.models {
        let c = m.coefficients(&p.params, &p.grid, &quad)?;
        if !c.singular_nodes.is_empty() {
            writeln!(
                log,
                "{}: {} singular nodes bridged",
                m.name(),
                c.singular_nodes.len()
            )?;
        }
        let (path, w) = create(&p.out, &format!("coeffs_{}.csv", m.name()))?;
        export::write_coefficients(w, &c)?;
        written.push(path);
    }
    Ok(written)
}

/// `steady.csv` plus `steady_boundary.csv` with the markers
/// `|Δ| = √(λ(2γ₀−λ))` for every γ₀ above λ/2.
pub fn steady(cfg: &Config, log: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let registry = ModelRegistry::standard();
    let p = prepare(cfg, &registry)?;
    let axis = cfg.sweep_axis();
    if axis.points == 0 {
        bail!("sweep_points must be at least 1");
    }
    let fixed = if cfg.sweep_fixed.is_empty() {
        vec![match cfg.sweep {
            SweepKind::Delta => p.params.gamma0,
            SweepKind::Gamma0 => p.params.delta,
        }]
    } else {
        cfg.sweep_fixed.clone()
    };
    let points: Vec<(f64, f64)> = fixed
        .iter()
        .flat_map(|&f| {
            axis.values().into_iter().map(move |v| match cfg.sweep {
                SweepKind::Delta => (v, f),
                SweepKind::Gamma0 => (f, v),
            })
        })
        .collect();

    let mut rows = Vec::new();
    for m in &p.models {
        for &(delta, gamma0) in &points {
            let params = SpectralParams {
                delta,
                gamma0,
                ..p.params
            };
            let state = m
                .steady_state(&params)
                .with_context(|| format!("{} at delta = {delta}, gamma0 = {gamma0}", m.name()))?;
            rows.push(SteadyRow {
                delta,
                gamma0,
                state,
            });
        }
    }
    let (path, w) = create(&p.out, "steady.csv")?;
    export::write_steady(w, &rows)?;

    let lambda = p.params.lambda;
    let mut gammas: Vec<f64> = points
        .iter()
        .map(|&(_, g)| g)
        .filter(|&g| g > 0.5 * lambda)
        .collect();
    gammas.sort_by(f64::total_cmp);
    gammas.dedup();
    let markers: Vec<(f64, f64)> = gammas
        .iter()
        .flat_map(|&g| {
            let b = (lambda * (2.0 * g - lambda)).sqrt();
            [(g, -b), (g, b)]
        })
        .collect();
    for &(g, b) in markers.iter().filter(|m| m.1 > 0.0) {
        writeln!(log, "gamma0 = {g}: perturbative only for |delta| > {b:.6}")?;
    }
    let (bpath, bw) = create(&p.out, "steady_boundary.csv")?;
    export::write_steady_boundary(bw, &markers)?;
    writeln!(log, "{} stationary points", rows.len())?;
    Ok(vec![path, bpath])
}

/// `moments_alpha1.csv`, `moments_alpha2.csv` and `phase.csv`.
pub fn evolve(cfg: &Config, log: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let registry = ModelRegistry::standard();
    let p = prepare(cfg, &registry)?;
    report_regime(&p.params, log)?;
    let quad = quadrature(cfg, &p.params, &p.grid)?;
    let initial = cfg.pair.moments();
    let runs = p
        .models
        .iter()
        .map(|m| Ok((m.name(), m.evolve(&p.params, &initial, &p.grid, &quad)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut written = Vec::new();
    for (k, label) in ["alpha1", "alpha2"].into_iter().enumerate() {
        let rows: Vec<_> = runs.iter().map(|(n, e)| (*n, &e.trajectories[k])).collect();
        let (path, w) = create(&p.out, &format!("moments_{label}.csv"))?;
        export::write_moments(w, &rows)?;
        written.push(path);
    }
    let phase: Vec<_> = runs
        .iter()
        .flat_map(|(n, e)| {
            [
                ("alpha1", &e.trajectories[0]),
                ("alpha2", &e.trajectories[1]),
            ]
            .map(|(label, tr)| (*n, label, tr))
        })
        .collect();
    let (path, w) = create(&p.out, "phase.csv")?;
    export::write_phase(w, &phase)?;
    written.push(path);
    for (n, e) in &runs {
        let bad: usize = e
            .trajectories
            .iter()
            .map(|t| t.positivity_violations().len())
            .sum();
        if bad > 0 {
            writeln!(log, "{n}: {bad} nodes violate Gaussian positivity")?;
        }
    }
    Ok(written)
}

fn distances(
    cfg: &Config,
    log: &mut dyn Write,
) -> Result<(PathBuf, Vec<(&'static str, DistanceTrajectory)>)> {
    let registry = ModelRegistry::standard();
    let p = prepare(cfg, &registry)?;
    report_regime(&p.params, log)?;
    let quad = quadrature(cfg, &p.params, &p.grid)?;
    let initial = cfg.pair.moments();
    let mut out = Vec::new();
    for m in &p.models {
        let e = m.evolve(&p.params, &initial, &p.grid, &quad)?;
        let d = bures_trajectory(
            &e.trajectories[0].gaussian_states(),
            &e.trajectories[1].gaussian_states(),
            &p.grid,
        )?;
        if d.unphysical_nodes > 0 || d.clamped_nodes > 0 {
            writeln!(
                log,
                "{}: {} unphysical states, {} clamped fidelities",
                m.name(),
                d.unphysical_nodes,
                d.clamped_nodes
            )?;
        }
        out.push((m.name(), d));
    }
    Ok((p.out, out))
}

/// `bures.csv`
pub fn bures(cfg: &Config, log: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let (dir, runs) = distances(cfg, log)?;
    let rows: Vec<_> = runs.iter().map(|(n, d)| (*n, d)).collect();
    let (path, w) = create(&dir, "bures.csv")?;
    export::write_bures(w, &rows)?;
    Ok(vec![path])
}

/// `nonmarkov.csv`; prints the final 𝒩 per order.
pub fn nonmarkov(cfg: &Config, log: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let (dir, runs) = distances(cfg, log)?;
    for (n, d) in &runs {
        writeln!(log, "N[{n}] = {:.9e}", d.non_markovianity())?;
    }
    let rows: Vec<_> = runs.iter().map(|(n, d)| (*n, d)).collect();
    let (path, w) = create(&dir, "nonmarkov.csv")?;
    export::write_nonmarkov(w, &rows)?;
    Ok(vec![path])
}

/// `heatmap.csv` over (Δ, γ₀/λ) for every requested order, and
/// `boundary.csv` with `R(Δ)` on a fine detuning axis.
pub fn heatmap_cmd(cfg: &Config, log: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let registry = ModelRegistry::standard();
    let p = prepare(cfg, &registry)?;
    let deltas = cfg.delta_axis.values();
    let couplings = cfg.coupling_axis.values();
    let settings = SweepSettings {
        grid: p.grid,
        quadrature: cfg.quadrature,
        pair: cfg.pair,
    };
    let mut sweeps = Vec::new();
    for m in &p.models {
        let s = heatmap(&p.params, &deltas, &couplings, *m, &settings)?;
        let errors = s.cells.iter().filter(|c| c.error.is_some()).count();
        writeln!(
            log,
            "{}: {} cells, {} flagged ({} errors)",
            m.name(),
            s.cells.len(),
            s.failures().count(),
            errors
        )?;
        sweeps.push(s);
    }
    let refs: Vec<_> = sweeps.iter().collect();
    let (path, w) = create(&p.out, "heatmap.csv")?;
    export::write_heatmap(w, &refs)?;
    let fine = tclfano::metrics::linspace(cfg.delta_axis.min, cfg.delta_axis.max, 401);
    let (bpath, bw) = create(&p.out, "boundary.csv")?;
    export::write_boundary(bw, &boundary_curve(p.params.lambda, &fine))?;
    Ok(vec![path, bpath])
}

/// Runs the oracle suite; `Ok(false)` when any check fails.
pub fn validate(cfg: &Config, log: &mut dyn Write) -> Result<bool> {
    cfg.params.validate()?;
    let grid = cfg.grid()?;
    report_regime(&cfg.params, log)?;
    let report = run_suite(&cfg.params, &grid, &cfg.quadrature)?;
    for c in &report.checks {
        writeln!(log, "{c}")?;
    }
    let failed = report
        .checks
        .iter()
        .filter(|c| c.outcome == Outcome::Fail)
        .count();
    let xfail = report
        .checks
        .iter()
        .filter(|c| c.outcome == Outcome::ExpectedFail)
        .count();
    writeln!(
        log,
        "{} checks: {} failed, {} expected failures",
        report.checks.len(),
        failed,
        xfail
    )?;
    Ok(report.passed())
}
