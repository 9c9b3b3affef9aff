//! `radmom`: simulate Radon data, recover moments, reconstruct densities.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use radon_moments::config::{MollifierConfig, NoiseConfig, ReconPath, RunConfig};
use radon_moments::pipeline::{self, ReconOutput};
use radon_moments::{acceptance, io, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "radmom", version, about = "Density reconstruction from mollified Radon data via moments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a sinogram and write it to the output directory.
    Project(Common),
    /// Recover the moment table from a sinogram file.
    Moments {
        #[command(flatten)]
        common: Common,
        /// Sinogram CSV produced by `project`.
        #[arg(long)]
        sinogram: PathBuf,
    },
    /// Reconstruct an image from a moment table or a sinogram.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Moment CSV; selects the moment path.
        #[arg(long, conflicts_with = "sinogram", required_unless_present = "sinogram")]
        moments: Option<PathBuf>,
        /// Sinogram CSV; the configured recon path decides what happens next.
        #[arg(long)]
        sinogram: Option<PathBuf>,
    },
    /// Run project, moments and reconstruct in one process.
    Pipeline(Common),
    /// Run the acceptance checks.
    Selftest {
        /// Run only this criterion (1 to 12).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=12))]
        criterion: Option<u8>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory (overrides `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    phantom: Option<String>,
    /// Number of angles.
    #[arg(long)]
    angles: Option<usize>,
    /// Number of offsets.
    #[arg(long)]
    offsets: Option<usize>,
    #[arg(long)]
    margin: Option<f64>,
    /// Mollifier kernel (bump or truncated-cosine).
    #[arg(long)]
    kernel: Option<String>,
    /// Mollifier width ε.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Remove the mollifier block.
    #[arg(long, conflicts_with_all = ["kernel", "epsilon"])]
    no_mollifier: bool,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Highest moment order K.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Image resolution N.
    #[arg(long)]
    resolution: Option<usize>,
    /// Reconstruction path (moments or fbp).
    #[arg(long)]
    path: Option<String>,
    /// Filter (riesz or modified-riesz).
    #[arg(long)]
    filter: Option<String>,
    /// Band cutoff as a fraction of the offset Nyquist frequency.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Floor on the mollifier transform when dividing.
    #[arg(long)]
    reg_floor: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::read(&self.config)?;
        if let Some(v) = &self.phantom {
            cfg.phantom.kind = v.clone();
        }
        if let Some(v) = self.angles {
            cfg.grids.angles = v;
        }
        if let Some(v) = self.offsets {
            cfg.grids.offsets = v;
        }
        if let Some(v) = self.margin {
            cfg.grids.margin = v;
        }
        if self.no_mollifier {
            cfg.mollifier = None;
        }
        if self.kernel.is_some() || self.epsilon.is_some() {
            let current = cfg.mollifier.take();
            let kernel = self
                .kernel
                .clone()
                .or_else(|| current.as_ref().map(|m| m.kernel.clone()))
                .unwrap_or_else(|| "bump".into());
            let epsilon = self
                .epsilon
                .or_else(|| current.as_ref().map(|m| m.epsilon))
                .ok_or_else(|| Error::Config("--kernel needs --epsilon when the config has no mollifier".into()))?;
            cfg.mollifier = Some(MollifierConfig { kernel, epsilon });
        }
        if self.sigma.is_some() || self.seed.is_some() {
            let current = cfg.noise.take().unwrap_or(NoiseConfig { sigma: 0.0, seed: 0 });
            cfg.noise = Some(NoiseConfig {
                sigma: self.sigma.unwrap_or(current.sigma),
                seed: self.seed.unwrap_or(current.seed),
            });
        }
        if let Some(v) = self.order {
            cfg.moments.order = v;
        }
        if let Some(v) = self.m {
            cfg.recon.m = v;
        }
        if let Some(v) = self.n {
            cfg.recon.n = v;
        }
        if let Some(v) = self.resolution {
            cfg.recon.resolution = v;
        }
        if let Some(v) = &self.path {
            cfg.recon.path = match v.as_str() {
                "moments" => ReconPath::Moments,
                "fbp" => ReconPath::Fbp,
                other => return Err(Error::Config(format!("unknown path '{other}' (expected moments or fbp)"))),
            };
        }
        if self.filter.is_some() || self.cutoff.is_some() || self.reg_floor.is_some() {
            let mut f = cfg.filter.take().unwrap_or(radon_moments::config::FilterConfig {
                kind: None,
                cutoff: None,
                reg_floor: None,
            });
            f.kind = self.filter.clone().or(f.kind);
            f.cutoff = self.cutoff.or(f.cutoff);
            f.reg_floor = self.reg_floor.or(f.reg_floor);
            cfg.filter = Some(f);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &RunConfig) -> PathBuf {
        pipeline::output_dir(cfg, self.out.as_deref())
    }
}

fn report_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn report_recon(cfg: &RunConfig, r: &ReconOutput) {
    println!("sup error: {:.6e}", r.sup_error);
    println!("relative L2 error: {:.6e}", r.relative_l2);
    if cfg.recon.path == ReconPath::Moments {
        match r.bound {
            Some((bound, delta)) => {
                println!("error bound: {bound:.6e} (δ = {delta:.2})");
                let ok = r.sup_error <= bound;
                println!("check sup error ≤ bound: {}", if ok { "PASS" } else { "FAIL" });
            }
            None => println!("error bound: n/a (phantom is discontinuous)"),
        }
    }
}

fn report_solutions(out: &pipeline::MomentsOutput) {
    for sol in &out.solutions {
        println!("order {}: condition estimate {:.3e}", sol.order, sol.condition);
    }
}

fn cmd_project(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let out = pipeline::run_project(&cfg)?;
    let path = pipeline::save_sinogram(&common.out_dir(&cfg), &out.sinogram)?;
    println!("L1 norm: {:.10e}", out.l1_norm);
    match out.evenness {
        Some(e) => println!("evenness residual: {e:.3e}"),
        None => println!("evenness residual: n/a (angles do not cover the full circle)"),
    }
    report_files(&[path]);
    Ok(())
}

fn cmd_moments(common: &Common, sinogram: &Path) -> Result<()> {
    let cfg = common.load()?;
    let s = io::read_sinogram(sinogram)?;
    let out = pipeline::run_moments(&cfg, &s)?;
    report_solutions(&out);
    let path = pipeline::save_moments(&common.out_dir(&cfg), &out.table)?;
    report_files(&[path]);
    Ok(())
}

fn cmd_reconstruct(common: &Common, moments: Option<&Path>, sinogram: Option<&Path>) -> Result<()> {
    let cfg = common.load()?;
    let recon = match (moments, sinogram) {
        (Some(path), _) => {
            if cfg.recon.path == ReconPath::Fbp {
                return Err(Error::Misuse("a moment table cannot drive the fbp path".into()));
            }
            let table = io::read_moments(path)?;
            pipeline::check_moment_order(&cfg, &table)?;
            pipeline::reconstruct_from_moments(&cfg, &table)?
        }
        (None, Some(path)) => {
            let s = io::read_sinogram(path)?;
            match cfg.recon.path {
                ReconPath::Fbp => pipeline::reconstruct_fbp(&cfg, &s)?,
                ReconPath::Moments => {
                    let out = pipeline::run_moments(&cfg, &s)?;
                    pipeline::check_moment_order(&cfg, &out.table)?;
                    pipeline::reconstruct_from_moments(&cfg, &out.table)?
                }
            }
        }
        (None, None) => return Err(Error::Config("give --moments or --sinogram".into())),
    };
    report_recon(&cfg, &recon);
    report_files(&pipeline::save_recon(&common.out_dir(&cfg), &recon.grid)?);
    Ok(())
}

fn cmd_pipeline(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    if cfg.recon.path == ReconPath::Moments {
        let dummy = radon_moments::phantoms::MomentTable::zeros(cfg.moments.order);
        pipeline::check_moment_order(&cfg, &dummy)?;
    }
    let out = pipeline::run_pipeline(&cfg, &common.out_dir(&cfg))?;
    println!("L1 norm: {:.10e}", out.project.l1_norm);
    if let Some(e) = out.project.evenness {
        println!("evenness residual: {e:.3e}");
    }
    report_solutions(&out.moments);
    if let Some(d) = out.noise_deviation {
        println!("moment deviation caused by noise: {d:.3e}");
    }
    report_recon(&cfg, &out.recon);
    report_files(&out.files);
    Ok(())
}

fn cmd_selftest(criterion: Option<u8>) -> Result<bool> {
    let dir = std::env::temp_dir().join(format!("radmom-selftest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    let ids: Vec<u8> = criterion.map_or_else(|| (1..=12).collect(), |c| vec![c]);
    let mut all = true;
    for id in ids {
        let report = acceptance::run(id, &dir);
        println!("{report}");
        all &= report.passed;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(all)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Project(c) => cmd_project(c),
        Command::Moments { common, sinogram } => cmd_moments(common, sinogram),
        Command::Reconstruct {
            common,
            moments,
            sinogram,
        } => cmd_reconstruct(common, moments.as_deref(), sinogram.as_deref()),
        Command::Pipeline(c) => cmd_pipeline(c),
        Command::Selftest { criterion } => match cmd_selftest(*criterion) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
