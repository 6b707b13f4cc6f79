//! One function per subcommand. Each writes its artifacts under `out` and
//! returns the lines printed as a summary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use scatterlab_core::analysis::audit::{inequality_audit, AuditInputs};
use scatterlab_core::analysis::convergence::{convergence_study, ConvergenceFlag, ConvergenceTable};
use scatterlab_core::analysis::decay::{
    exterior_envelope, fit_decay_samples, fit_energy_decay, pointwise_samples, DecayFit, DecayRegion,
};
use scatterlab_core::analysis::sobolev::{sobolev_ratio, BumpFamily};
use scatterlab_core::energy::energy_breakdown;
use scatterlab_core::evolve::{evolve_forward, evolve_goursat, extract_radiation, restrict_to_cauchy};
use scatterlab_core::io;
use scatterlab_core::scattering::{inverse_trace, scattering_report, trace_forward};
use scatterlab_core::{BoundarySide, EnergyBreakdown};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::plot::{LinePlot, Scale, Series};

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: RunConfig,
    pub run_id: String,
    pub out: PathBuf,
    pub resolutions: Option<Vec<usize>>,
    pub stamp: bool,
}

impl RunContext {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_plot(&self, name: &str, plot: &LinePlot) -> Result<(), CliError> {
        let stamp = self.stamp.then(|| {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            format!("generated at unix time {secs}")
        });
        fs::write(self.path(name), plot.render(stamp.as_deref()))?;
        Ok(())
    }
}

fn energy_plot(b: &EnergyBreakdown) -> LinePlot {
    let pick = |f: fn(&scatterlab_core::ClosureAudit) -> f64| b.series.iter().map(|c| (c.t, f(c))).collect();
    LinePlot::new("Energy balance", "T", "energy", Scale::Linear, Scale::Linear)
        .with(Series::new("E(S_T)", pick(|c| c.slice.total)))
        .with(Series::new("E(H+) cumulative", pick(|c| c.e_hplus_cum)))
        .with(Series::new("E(I+) cumulative", pick(|c| c.e_iplus_cum)))
}

fn write_energy_artifacts(ctx: &RunContext, b: &EnergyBreakdown) -> Result<(), CliError> {
    let rows: Vec<io::EnergyAuditRecord> = b.series.iter().map(Into::into).collect();
    io::write_energy_audit(&ctx.path("energy_audit.csv"), &rows)?;
    ctx.write_plot("energy.svg", &energy_plot(b))
}

fn energy_summary(b: &EnergyBreakdown) -> Vec<String> {
    vec![
        format!("E_Sigma0 = {:.6e}", b.e_sigma0),
        format!("E_Hplus = {:.6e}, E_Iplus = {:.6e}", b.e_hplus, b.e_iplus),
        format!("closure residual at T = {:.1}: {:.3e}", b.series.last().map_or(0.0, |c| c.t), b.closure_residual),
    ]
}

pub fn forward(ctx: &RunContext) -> Result<Vec<String>, CliError> {
    let cfg = &ctx.config;
    let grid = cfg.grid()?;
    let data = cfg.cauchy_data(&grid)?;
    let field = evolve_forward(&data, &grid)?;
    let radiation = extract_radiation(&field)?;
    io::write_radiation(&ctx.path("radiation_Hplus.csv"), &ctx.path("radiation_Iplus.csv"), &radiation)?;
    let b = energy_breakdown(&field, &cfg.audit_times())?;
    write_energy_artifacts(ctx, &b)?;
    let mut lines = vec![
        format!("grid n = {}, h = {:.6e}", grid.n(), grid.h()),
        format!("max |phi| = {:.6e}", field.max_abs()),
    ];
    lines.extend(energy_summary(&b));
    Ok(lines)
}

pub fn goursat(ctx: &RunContext) -> Result<Vec<String>, CliError> {
    let cfg = &ctx.config;
    let (hplus, iplus) = match &cfg.boundary {
        Some(b) => (b.hplus.clone(), b.iplus.clone()),
        None => (ctx.path("radiation_Hplus.csv"), ctx.path("radiation_Iplus.csv")),
    };
    let grid = cfg.grid()?;
    let bdata = io::read_radiation(&hplus, &iplus, BoundarySide::Future, cfg.mode()?)?;
    let field = evolve_goursat(&bdata, &grid)?;
    let restored = restrict_to_cauchy(&field)?;
    io::write_cauchy(&ctx.path("cauchy_out.csv"), &restored)?;
    let mut lines = vec![format!("reconstructed {} Cauchy samples", restored.len())];
    // Compare with the configured data when it lives on the same nodes.
    if let Ok(original) = cfg.cauchy_data(&grid) {
        if let Ok(diff) = restored.difference(&original) {
            lines.push(format!("max deviation from configured data: {:.3e}", diff.max_abs()));
        }
    }
    Ok(lines)
}

pub fn roundtrip(ctx: &RunContext) -> Result<Vec<String>, CliError> {
    let cfg = &ctx.config;
    let grid = cfg.grid()?;
    let data = cfg.cauchy_data(&grid)?;
    let restored = inverse_trace(&trace_forward(&data, &grid)?, &grid)?;
    io::write_cauchy(&ctx.path("roundtrip_cauchy.csv"), &restored)?;
    let diff = restored.difference(&data)?;
    let rel = diff.max_abs() / data.max_abs().max(f64::MIN_POSITIVE);
    Ok(vec![
        format!("max |restored - data| = {:.3e}", diff.max_abs()),
        format!("relative sup residual = {rel:.3e}"),
    ])
}

pub fn energy_audit(ctx: &RunContext) -> Result<Vec<String>, CliError> {
    let cfg = &ctx.config;
    let grid = cfg.grid()?;
    let data = cfg.cauchy_data(&grid)?;
    let field = evolve_forward(&data, &grid)?;
    let b = energy_breakdown(&field, &cfg.audit_times())?;
    write_energy_artifacts(ctx, &b)?;
    let inputs = AuditInputs::from_field(&field, cfg.analysis.late_time * cfg.params.mass)?;
    let rows = inequality_audit(&inputs)?;
    let records: Vec<io::AuditRecord> = rows.iter().map(Into::into).collect();
    io::write_audit(&ctx.path("audit.csv"), &records)?;
    let mut lines = energy_summary(&b);
    for r in &rows {
        lines.push(format!(
            "{}: lhs {:.6e} rhs {:.6e} margin {:.3e} {}",
            r.id.name(),
            r.lhs,
            r.rhs,
            r.margin,
            if r.pass { "pass" } else { "FAIL" }
        ));
    }
    Ok(lines)
}

pub fn decay_fit(ctx: &RunContext) -> Result<Vec<String>, CliError> {
    let cfg = &ctx.config;
    let grid = cfg.grid()?;
    let data = cfg.cauchy_data(&grid)?;
    let field = evolve_forward(&data, &grid)?;
    let mass = cfg.params.mass;
    let [lo, hi] = cfg.analysis.decay_window;
    let window = (lo * mass, hi * mass);

    let count = (hi - lo).ceil().max(4.0) as usize;
    let times: Vec<f64> = (0..=count).map(|k| window.0 + (window.1 - window.0) * k as f64 / count as f64).collect();
    let b = energy_breakdown(&field, &times)?;
    let energy: Vec<(f64, f64)> = b.series.iter().map(|c| (c.t, c.slice.total)).collect();
    let near = pointwise_samples(&field, DecayRegion::NearHorizon, (lo, hi), 1.0)?;
    let envelope = exterior_envelope(&field, (lo, hi), 1.0)?;

    let fits: Vec<DecayFit> = vec![
        fit_energy_decay(&energy, window)?,
        fit_decay_samples(DecayRegion::NearHorizon, &near, window)?,
        fit_decay_samples(DecayRegion::Exterior, &envelope.samples, window)?,
    ];
    let records: Vec<io::DecayRecord> = fits.iter().map(Into::into).collect();
    io::write_decay_fits(&ctx.path("decay_fit.csv"), &records)?;

    let plot = LinePlot::new("Decay profiles", "tau", "amplitude", Scale::Log, Scale::Log)
        .with(Series::new("energy of S_tau", energy))
        .with(Series::new("near horizon", near))
        .with(Series::new("exterior", envelope.samples.clone()))
        .with(Series::new("exterior peaks", envelope.peaks.clone()));
    ctx.write_plot("decay.svg", &plot)?;

    let mut lines: Vec<String> = fits
        .iter()
        .map(|f| {
            format!(
                "{}: slope {:.4} (bound {}), r2 {:.4}, {}",
                f.region.name(),
                f.slope,
                f.region.slope_bound(),
                f.r2,
                if f.within_envelope() { "within envelope" } else { "OUTSIDE envelope" }
            )
        })
        .collect();
    lines.push(format!(
        "exterior peaks non-increasing: {} ({} peaks)",
        envelope.non_increasing,
        envelope.peaks.len()
    ));
    Ok(lines)
}

fn convergence_plot(table: &ConvergenceTable) -> LinePlot {
    table.rows.iter().fold(
        LinePlot::new("Convergence", "n", "error", Scale::Log, Scale::Log),
        |plot, row| {
            let pts = row
                .errors
                .iter()
                .zip(&table.resolutions[1..])
                .map(|(&e, &n)| (n as f64, e))
                .collect();
            plot.with(Series::new(row.quantity.name(), pts))
        },
    )
}

pub fn converge(ctx: &RunContext) -> Result<Vec<String>, CliError> {
    let cfg = &ctx.config;
    let n = cfg.grid.n;
    let resolutions = ctx.resolutions.clone().unwrap_or_else(|| vec![n, 2 * n, 4 * n]);
    let table = convergence_study(&cfg.convergence_setup()?, &resolutions)?;
    io::write_convergence(&ctx.path("convergence.csv"), &io::convergence_records(&table))?;
    ctx.write_plot("convergence.svg", &convergence_plot(&table))?;
    Ok(table
        .rows
        .iter()
        .map(|r| {
            let order = match r.order() {
                Some(p) => format!("{p:.3}"),
                None => "-".into(),
            };
            let flag = match r.flag {
                ConvergenceFlag::Ok => String::new(),
                f => format!(" [{}]", f.name()),
            };
            format!("{}: errors {:?} order {order}{flag}", r.quantity.name(), r.errors)
        })
        .collect())
}

pub fn sobolev(ctx: &RunContext) -> Result<Vec<String>, CliError> {
    let cfg = &ctx.config;
    let family = BumpFamily::default();
    let bumps = family.draw(cfg.analysis.sobolev_profiles, cfg.seed);
    let summary = sobolev_ratio(&bumps, family.length, cfg.analysis.sobolev_cells)?;
    io::write_sobolev(&ctx.path("sobolev.csv"), &io::sobolev_records(&summary))?;
    Ok(vec![format!(
        "{} profiles on {} cells, max ratio {:.6e}",
        summary.rows.len(),
        summary.cells,
        summary.max_ratio
    )])
}

pub fn scatter(ctx: &RunContext) -> Result<Vec<String>, CliError> {
    let cfg = &ctx.config;
    let grid = cfg.grid()?;
    let data = cfg.cauchy_data(&grid)?;
    let report = scattering_report(
        &ctx.run_id,
        &data,
        &grid,
        &cfg.audit_times(),
        cfg.analysis.lipschitz_directions,
        cfg.seed,
    )?;
    io::write_scattering_report(&ctx.path("scattering_report.csv"), &[(&report).into()])?;
    Ok(vec![
        format!("forward norm ratio {:.6e}", report.forward_norm_ratio),
        format!("roundtrip residual {:.3e}", report.roundtrip_residual),
        format!(
            "Lipschitz max ratio {:.6e} within ball of radius {:.6e}",
            report.lipschitz_max_ratio, report.ball_radius
        ),
    ])
}

/// Run identifier: the config file stem.
pub fn run_id(config_path: &Path) -> String {
    config_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into())
}
