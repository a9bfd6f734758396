//! Implementations of the six subcommands. Every command writes
//! deterministic bytes for a fixed config: floats are formatted with the
//! shortest representation that round-trips to the same double.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use tailcord::asymptotics::{finite_sample_surface, limit_surface, LimitSurface};
use tailcord::concomitants::{run_replicates, ReplicateRecord};
use tailcord::empirics::{
    quantile_sorted, rescaled_split_points, validate_against_limit, AsymptoticSurfaceProvider,
    EcdfSurfaceProvider, FiniteSampleSurfaceProvider, SurfaceProvider, ValidationReport,
};
use tailcord::gaussian::{validate_gaussian_limit, NormingConstants};
use tailcord::ModelSpec;

use crate::config::{ExperimentConfig, SurfaceChoice};

/// Exit status: 0 clean, 1 when some quadrature rows were flagged.
pub type CmdResult = anyhow::Result<u8>;

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| {
        format!("creating output file {}", path.display())
    })?))
}

fn simulate_records(cfg: &ExperimentConfig) -> anyhow::Result<Vec<ReplicateRecord>> {
    run_replicates(
        &cfg.model,
        cfg.n,
        &cfg.k_list,
        cfg.replicates,
        cfg.seed,
        0,
    )
    .map_err(|e| anyhow::anyhow!(e.to_string()))
}

/// `simulate`: one `replicate,k,v1,v2` row per (replicate, k), raw working
/// scale.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> CmdResult {
    let records = simulate_records(cfg)?;
    let mut out = create(&cfg.output_dir, "replicates.csv")?;
    writeln!(out, "replicate,k,v1,v2")?;
    for r in &records {
        for s in &r.splits {
            writeln!(out, "{},{},{},{}", r.replicate_index, s.k, s.v1, s.v2)?;
        }
    }
    out.flush()?;
    Ok(0)
}

fn grid_points(cfg: &ExperimentConfig, rescaled: bool) -> anyhow::Result<Vec<(f64, f64)>> {
    if cfg.grid.is_sample_points() {
        let records = simulate_records(cfg)?;
        let k = cfg.k_list[0];
        if rescaled {
            rescaled_split_points(&records, k).map_err(|e| anyhow::anyhow!(e.to_string()))
        } else {
            Ok(records
                .iter()
                .map(|r| {
                    let s = r.split_for(k).expect("k_list[0] is always recorded");
                    (s.v1, s.v2)
                })
                .collect())
        }
    } else {
        Ok(cfg.grid.rect_points().expect("validated rectangle"))
    }
}

fn write_surface_csv(
    dir: &Path,
    name: &str,
    surface: &LimitSurface,
) -> anyhow::Result<u8> {
    let mut out = create(dir, name)?;
    writeln!(out, "v1,v2,cdf,quad_error")?;
    for ((&(v1, v2), &cdf), &err) in surface
        .grid
        .iter()
        .zip(&surface.values)
        .zip(&surface.quad_errors)
    {
        let flagged = if err < 0.0 { -1.0 } else { err };
        writeln!(out, "{},{},{},{}", v1, v2, cdf, flagged)?;
    }
    out.flush()?;
    let failed = surface.failed_points();
    if failed > 0 {
        eprintln!("{failed} of {} grid points failed to converge", surface.grid.len());
        Ok(1)
    } else {
        Ok(0)
    }
}

/// `limit-surface`: the asymptotic law on the configured grid (limit axis).
pub fn cmd_limit_surface(cfg: &ExperimentConfig) -> CmdResult {
    let grid = grid_points(cfg, true)?;
    let surface = limit_surface(&cfg.model, cfg.k_list[0], &grid, &cfg.quad)
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    write_surface_csv(&cfg.output_dir, "limit_cdf.csv", &surface)
}

/// `finite-oracle`: the exact finite-sample law on the configured grid
/// (raw working scale).
pub fn cmd_finite_oracle(cfg: &ExperimentConfig) -> CmdResult {
    let grid = grid_points(cfg, false)?;
    let surface = finite_sample_surface(&cfg.model, cfg.n, cfg.k_list[0], &grid, &cfg.quad)
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    write_surface_csv(&cfg.output_dir, "oracle_cdf.csv", &surface)
}

fn build_report(cfg: &ExperimentConfig, records: &[ReplicateRecord], k: usize) -> anyhow::Result<ValidationReport> {
    let provider: Box<dyn SurfaceProvider> = match cfg.surface {
        SurfaceChoice::Limit => Box::new(AsymptoticSurfaceProvider {
            model: cfg.model,
            k,
            quad: cfg.quad,
        }),
        SurfaceChoice::Oracle => Box::new(FiniteSampleSurfaceProvider {
            model: cfg.model,
            n: cfg.n,
            k,
            quad: cfg.quad,
        }),
        SurfaceChoice::SelfTest => Box::new(EcdfSurfaceProvider {
            points: rescaled_split_points(records, k)
                .map_err(|e| anyhow::anyhow!(e.to_string()))?,
        }),
    };
    validate_against_limit(records, provider.as_ref(), k)
        .map_err(|e| anyhow::anyhow!(e.to_string()))
}

/// `validate`: simulate, evaluate the chosen surface at the rescaled sample
/// points, and write `report.json` + `errors.csv`.
pub fn cmd_validate(cfg: &ExperimentConfig) -> CmdResult {
    let records = simulate_records(cfg)?;
    let report = build_report(cfg, &records, cfg.k_list[0])?;

    let mut out = create(&cfg.output_dir, "errors.csv")?;
    writeln!(out, "v1,v2,empirical,theoretical,abs_error")?;
    for p in &report.point_errors {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.v1, p.v2, p.empirical, p.theoretical, p.abs_error
        )?;
    }
    out.flush()?;

    let mut json = create(&cfg.output_dir, "report.json")?;
    serde_json::to_writer_pretty(&mut json, &report)?;
    json.write_all(b"\n")?;
    json.flush()?;

    println!(
        "max_abs_error = {}  mean_abs_error = {}",
        report.max_abs_error, report.mean_abs_error
    );
    Ok(0)
}

/// `ksweep`: per-k medians/quantiles of the split maxima and the max error
/// against the chosen surface.
pub fn cmd_ksweep(cfg: &ExperimentConfig) -> CmdResult {
    let records = simulate_records(cfg)?;
    let mut out = create(&cfg.output_dir, "ksweep.csv")?;
    writeln!(out, "k,v1_median,v2_median,v2_q90,max_abs_error")?;
    for &k in &cfg.k_list {
        let mut v1s: Vec<f64> = Vec::with_capacity(records.len());
        let mut v2s: Vec<f64> = Vec::with_capacity(records.len());
        for r in &records {
            let s = r.split_for(k).expect("k_list splits always recorded");
            v1s.push(s.v1);
            v2s.push(s.v2);
        }
        v1s.sort_by(f64::total_cmp);
        v2s.sort_by(f64::total_cmp);
        let report = build_report(cfg, &records, k)?;
        writeln!(
            out,
            "{},{},{},{},{}",
            k,
            quantile_sorted(&v1s, 0.5),
            quantile_sorted(&v2s, 0.5),
            quantile_sorted(&v2s, 0.9),
            report.max_abs_error
        )?;
    }
    out.flush()?;
    Ok(0)
}

/// `gaussian`: norming constants table plus, for a nonempty `y_grid`, the
/// tail-conditioned Monte Carlo check of the conditional limit.
pub fn cmd_gaussian(cfg: &ExperimentConfig) -> CmdResult {
    let constants = NormingConstants::new(cfg.n as u64, cfg.rho)
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let mut out = create(&cfg.output_dir, "norming.csv")?;
    writeln!(out, "n,rho,a_n,b_n,a_tilde_n,b_tilde_n,a_tilde_nE,b_tilde_nE")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        constants.n,
        constants.rho,
        constants.a_n,
        constants.b_n,
        constants.a_tilde_n,
        constants.b_tilde_n,
        constants.a_tilde_ne,
        constants.b_tilde_ne
    )?;
    out.flush()?;

    if cfg.y_grid.is_empty() {
        return Ok(0);
    }
    let report = validate_gaussian_limit(
        cfg.rho,
        cfg.threshold_u,
        &cfg.y_grid,
        cfg.tail_samples,
        cfg.seed,
    )
    .map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let mut out = create(&cfg.output_dir, "gauss_tail.csv")?;
    writeln!(out, "y,empirical,limit,mills,rel_gap")?;
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.y, row.empirical, row.limit, row.mills, row.rel_gap
        )?;
    }
    out.flush()?;
    Ok(0)
}

/// Shared sanity check used by `validate`-style commands on family choice.
pub fn check_surface_supported(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    if matches!(cfg.model, ModelSpec::GaussianBivariate { .. })
        && cfg.surface == SurfaceChoice::Limit
    {
        anyhow::bail!(
            "the asymptotic surface is undefined for the Gaussian family; \
             use --surface oracle or self-test"
        );
    }
    Ok(())
}
