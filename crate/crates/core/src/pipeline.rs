//! Stage runners shared by the command-line subcommands and the end-to-end
//! pipeline: project, recover moments, reconstruct.

use std::path::{Path, PathBuf};

use crate::config::{ReconPath, RunConfig};
use crate::density_recon::{min_bound_over_delta, standard_deltas, sup_error, Approximation, ReconGrid};
use crate::error::{Error, Result};
use crate::io;
use crate::moment_recovery::{MomentRecovery, OrderSolution};
use crate::phantoms::MomentTable;
use crate::projector::{add_noise, evenness_residual, l1_norm, mollify, Projector, Sinogram};
use crate::spectral_inversion::fbp_reconstruct;

pub const SINOGRAM_FILE: &str = "sinogram.csv";
pub const MOMENTS_FILE: &str = "moments.csv";
pub const RECON_CSV_FILE: &str = "recon.csv";
pub const RECON_PGM_FILE: &str = "recon.pgm";

#[derive(Clone, Debug)]
pub struct ProjectOutput {
    pub sinogram: Sinogram,
    pub l1_norm: f64,
    pub evenness: Option<f64>,
}

/// Forward projection, then mollification and noise as configured.
///
/// The result is passed through its file representation so that in-memory
/// and on-disk sinograms are indistinguishable downstream.
pub fn run_project(cfg: &RunConfig) -> Result<ProjectOutput> {
    let sinogram = simulate(cfg, true)?;
    Ok(ProjectOutput {
        l1_norm: l1_norm(&sinogram)?,
        evenness: evenness_residual(&sinogram),
        sinogram,
    })
}

fn simulate(cfg: &RunConfig, with_noise: bool) -> Result<Sinogram> {
    let density = cfg.density()?;
    let angles = cfg.angle_grid()?;
    let offsets = cfg.offset_grid()?;
    let step = cfg.projector.line_step * offsets.spacing();
    let projector = if cfg.projector.bin_nodes == 0 {
        Projector::point(step)
    } else {
        Projector::binned(step, cfg.projector.bin_nodes)
    };
    let mut s = projector.project(&density, &angles, &offsets)?;
    if let Some(m) = cfg.mollifier()? {
        s = mollify(&s, &m)?;
    }
    let (sigma, seed) = cfg.noise();
    if with_noise && sigma > 0.0 {
        s = add_noise(&s, sigma, seed)?;
    }
    io::parse_sinogram(&io::format_sinogram(&s))
}

#[derive(Clone, Debug)]
pub struct MomentsOutput {
    pub table: MomentTable,
    pub solutions: Vec<OrderSolution>,
}

pub fn run_moments(cfg: &RunConfig, sinogram: &Sinogram) -> Result<MomentsOutput> {
    let recovery = MomentRecovery::with_max_order(cfg.moments.order_cap);
    let m = cfg.mollifier()?;
    let (table, solutions) =
        recovery.recover_moment_table(sinogram, m.as_ref(), cfg.moments.order, &cfg.moment_angles()?)?;
    Ok(MomentsOutput { table, solutions })
}

#[derive(Clone, Debug)]
pub struct ReconOutput {
    pub grid: ReconGrid,
    /// `max |rec − f|` over pixel centres.
    pub sup_error: f64,
    /// Smallest uniform error bound over the standard δ grid, when the
    /// phantom is continuous. Only set on the moment path.
    pub bound: Option<(f64, f64)>,
    /// Relative L² error against the phantom samples.
    pub relative_l2: f64,
}

fn score(cfg: &RunConfig, grid: ReconGrid, with_bound: bool) -> Result<ReconOutput> {
    let density = cfg.density()?;
    let truth = ReconGrid::from_density(&density, grid.resolution())?;
    let bound = if with_bound {
        let (m, n) = (cfg.recon.m, cfg.recon.n);
        min_bound_over_delta(&density, m, n, &standard_deltas())?
    } else {
        None
    };
    Ok(ReconOutput {
        sup_error: sup_error(&grid, &density),
        relative_l2: grid.relative_l2_to(&truth)?,
        bound,
        grid,
    })
}

pub fn reconstruct_from_moments(cfg: &RunConfig, table: &MomentTable) -> Result<ReconOutput> {
    let r = &cfg.recon;
    let grid = Approximation::with_cap(r.m, r.n, r.stability_cap)?.reconstruct_grid(table, r.resolution)?;
    score(cfg, grid, true)
}

pub fn reconstruct_fbp(cfg: &RunConfig, sinogram: &Sinogram) -> Result<ReconOutput> {
    let m = cfg.mollifier()?;
    let grid = fbp_reconstruct(sinogram, &cfg.filter()?, m.as_ref(), cfg.recon.resolution)?;
    score(cfg, grid, false)
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub project: ProjectOutput,
    pub moments: MomentsOutput,
    pub recon: ReconOutput,
    /// Largest moment change caused by the configured noise.
    pub noise_deviation: Option<f64>,
    pub files: Vec<PathBuf>,
}

/// Writes a sinogram artifact.
pub fn save_sinogram(dir: &Path, s: &Sinogram) -> Result<PathBuf> {
    let path = dir.join(SINOGRAM_FILE);
    io::write_sinogram(&path, s)?;
    Ok(path)
}

pub fn save_moments(dir: &Path, t: &MomentTable) -> Result<PathBuf> {
    let path = dir.join(MOMENTS_FILE);
    io::write_moments(&path, t)?;
    Ok(path)
}

pub fn save_recon(dir: &Path, r: &ReconGrid) -> Result<Vec<PathBuf>> {
    let csv = dir.join(RECON_CSV_FILE);
    let pgm = dir.join(RECON_PGM_FILE);
    io::write_recon(&csv, &pgm, r)?;
    Ok(vec![csv, pgm])
}

/// All three stages in one process, writing every artifact into `dir`.
pub fn run_pipeline(cfg: &RunConfig, dir: &Path) -> Result<PipelineOutput> {
    let project = run_project(cfg)?;
    let mut files = vec![save_sinogram(dir, &project.sinogram)?];
    let moments = run_moments(cfg, &project.sinogram)?;
    files.push(save_moments(dir, &moments.table)?);
    let noise_deviation = if cfg.noise().0 > 0.0 {
        let clean = run_moments(cfg, &simulate(cfg, false)?)?;
        Some(clean.table.max_abs_diff(&moments.table))
    } else {
        None
    };
    let recon = match cfg.recon.path {
        ReconPath::Moments => reconstruct_from_moments(cfg, &moments.table)?,
        ReconPath::Fbp => reconstruct_fbp(cfg, &project.sinogram)?,
    };
    files.extend(save_recon(dir, &recon.grid)?);
    Ok(PipelineOutput {
        project,
        moments,
        recon,
        noise_deviation,
        files,
    })
}

/// Output directory: the override if given, else the configured one.
pub fn output_dir(cfg: &RunConfig, override_dir: Option<&Path>) -> PathBuf {
    override_dir.map_or_else(|| cfg.output.clone(), Path::to_path_buf)
}

/// Rejects a moment table too short for the configured reconstruction.
pub fn check_moment_order(cfg: &RunConfig, table: &MomentTable) -> Result<()> {
    let required = cfg.recon.m + cfg.recon.n;
    if table.max_order() < required {
        return Err(Error::InsufficientOrder {
            available: table.max_order(),
            required,
        });
    }
    Ok(())
}
