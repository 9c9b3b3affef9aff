//! Acceptance checks, one function per criterion. Each returns a report
//! with the measured quantities so failures can be diagnosed from the
//! printed line alone.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::config::RunConfig;
use crate::density_recon::{
    min_bound_over_delta, reconstruct_grid_exact, standard_deltas, sup_error, Approximation, RationalMomentTable,
    ReconGrid,
};
use crate::error::{Error, Result};
use crate::mollifier::{KernelKind, MollifierSpec};
use crate::moment_recovery::{
    convolve_moments, deconvolve_moments, default_angles, range_residual, snap_to_grid, AngularMomentSet,
    MomentRecovery, MomentSystem, Provenance,
};
use crate::numerics::fourier::{dft_1d, Complex64, Direction};
use crate::numerics::quadrature::Grid1D;
use crate::phantoms::{Density, Disk, MomentTable};
use crate::pipeline::run_pipeline;
use crate::projector::{
    add_noise, evenness_residual, full_circle, l1_norm, mollify, offset_grid, open_half_circle, Projector, Sinogram,
};
use crate::spectral_inversion::{fbp_reconstruct, projection_slice_residual, row_transform, FilterKind, FilterSpec};

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

const TITLES: [&str; 12] = [
    "moment recovery exactness",
    "mollifier moment deconvolution",
    "end-to-end mollified pipeline",
    "L1 bounds of raw and mollified sinograms",
    "evenness and range consistency",
    "convolution theorem per angle",
    "projection slice",
    "convergence with exact moments",
    "convergence with mollified moments",
    "filtered backprojection paths",
    "determinant factorisation",
    "reproducibility",
];

/// Runs criterion `id` (1 to 12). Errors become failing reports.
pub fn run(id: u8, work_dir: &Path) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(work_dir),
        _ => Err(Error::domain(format!("no criterion {id}"))),
    };
    let (passed, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport {
        id,
        title: TITLES.get(id as usize - 1).copied().unwrap_or("unknown"),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(work_dir: &Path) -> Vec<CriterionReport> {
    (1..=12).map(|id| run(id, work_dir)).collect()
}

type Outcome = Result<(bool, String)>;

/// Bin-averaged sinogram on `n` angles inside `(0, π)` and `m` offsets over
/// `[−1.1√2, 1.1√2]`.
fn open_sinogram(d: &Density, n: usize, m: usize) -> Result<Sinogram> {
    let offsets = offset_grid(1.1, m)?;
    Projector::binned(0.5 * offsets.spacing(), 8).project(d, &open_half_circle(n)?, &offsets)
}

fn half_circle(n: usize) -> Result<Grid1D> {
    Grid1D::from_spacing(0.0, PI / n as f64, n)
}

fn recover(s: &Sinogram, m: Option<&MollifierSpec>, k: usize, cap: usize) -> Result<MomentTable> {
    let angles = snap_to_grid(&default_angles(k), s.angles())?;
    Ok(MomentRecovery::with_max_order(cap).recover_moment_table(s, m, k, &angles)?.0)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: Vec<f64> = Vec::new();
    for d in [Density::uniform(), Density::bilinear()] {
        let s = open_sinogram(&d, 256, 1024)?;
        let table = recover(&s, None, 6, 12)?;
        worst.push(table.max_abs_diff(&MomentTable::from_density(&d, 6)?));
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = worst.iter().all(|&e| e <= 1e-5) && secs < 30.0;
    Ok((
        passed,
        format!(
            "max |Δγ| uniform {:.2e}, bilinear {:.2e} (limit 1e-5); {secs:.1} s (limit 30 s)",
            worst[0], worst[1]
        ),
    ))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let m = MollifierSpec::make_bump(0.1, 12)?;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let angles: Vec<f64> = (1..=8).map(|i| i as f64 * 0.35).collect();
        let values: Vec<Vec<f64>> =
            (0..8).map(|_| (0..=12).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let raw = AngularMomentSet::new(angles, values, Provenance::Raw)?;
        let back = deconvolve_moments(&convolve_moments(&raw, m.moments())?, &m)?;
        for i in 0..raw.angles().len() {
            for (a, b) in raw.row(i).iter().zip(back.row(i)) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max |b − b'| {worst:.2e} over 50 random sets, K = 12 (limit 1e-12)")))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let d = Density::uniform();
    let raw = open_sinogram(&d, 256, 1024)?;
    let m = MollifierSpec::make_bump(0.05, 4)?;
    let moll = mollify(&raw, &m)?;
    let clean = recover(&moll, Some(&m), 4, 12)?.max_abs_diff(&MomentTable::from_density(&d, 4)?);
    let noisy = add_noise(&moll, 0.01, 3)?;
    let mut noisy_err: f64 = 0.0;
    for k in 0..=2 {
        let mk = MollifierSpec::make_bump(0.05, k)?;
        let table = recover(&noisy, Some(&mk), k, 12)?;
        noisy_err = noisy_err.max(table.max_abs_diff(&MomentTable::from_density(&d, k)?));
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = clean <= 1e-4 && noisy_err <= 5e-3 && secs < 60.0;
    Ok((
        passed,
        format!(
            "σ=0, K=4: {clean:.2e} (limit 1e-4); σ=0.01, K≤2: {noisy_err:.2e} (limit 5e-3); {secs:.1} s (limit 60 s)"
        ),
    ))
}

/// Every density constructor shipped with the crate, plus a two-disk mixture.
fn shipped_phantoms() -> Result<Vec<(&'static str, Density)>> {
    Ok(vec![
        ("uniform", Density::uniform()),
        ("bilinear", Density::bilinear()),
        ("disk", Density::reference_disk()),
        (
            "two disks",
            Density::disks(vec![Disk::new([0.3, 0.35], 0.15, 4.0)?, Disk::new([0.65, 0.6], 0.2, 2.0)?])?,
        ),
    ])
}

fn criterion_4() -> Outcome {
    let angles = half_circle(90)?;
    let offsets = offset_grid(1.1, 512)?;
    let m = MollifierSpec::make_bump(0.05, 0)?;
    let mut passed = true;
    let mut worst_ratio: f64 = 0.0;
    for (_, d) in shipped_phantoms()? {
        let raw = Projector::binned(0.5 * offsets.spacing(), 8).project(&d, &angles, &offsets)?;
        let limit = 2.0 * PI * d.mass() * 1.001;
        for norm in [l1_norm(&raw)?, l1_norm(&mollify(&raw, &m)?)?] {
            passed &= norm <= limit;
            worst_ratio = worst_ratio.max(norm / (2.0 * PI * d.mass()));
        }
    }
    Ok((passed, format!("max ‖g‖₁ / (2π γ₀₀) = {worst_ratio:.6} over 4 phantoms (limit 1.001)")))
}

fn criterion_5() -> Outcome {
    let angles = full_circle(64)?;
    let offsets = offset_grid(1.1, 513)?;
    let mut even: f64 = 0.0;
    for d in [Density::uniform(), Density::reference_disk()] {
        let s = Projector::binned(0.5 * offsets.spacing(), 8).project(&d, &angles, &offsets)?;
        even = even.max(evenness_residual(&s).ok_or_else(|| Error::domain("grid is not a full circle"))?);
    }
    let mut range: f64 = 0.0;
    for d in [Density::bilinear(), Density::reference_disk()] {
        let s = open_sinogram(&d, 256, 1024)?;
        let table = recover(&s, None, 4, 12)?;
        let held_out: Vec<f64> = [17, 60, 101, 170, 230].iter().map(|&i| s.angles().point(i)).collect();
        let ams = MomentRecovery::default().angular_moments(&s, 4, &held_out)?;
        range = range.max(range_residual(&table, &ams)?);
    }
    Ok((
        even <= 1e-6 && range <= 1e-4,
        format!("evenness {even:.2e} (limit 1e-6); held-out range residual {range:.2e} (limit 1e-4)"),
    ))
}

fn criterion_6() -> Outcome {
    let angles = full_circle(8)?;
    let offsets = offset_grid(1.1, 1024)?;
    let d = Density::disks(vec![Disk::unit_mass([0.4, 0.55], 0.2)?])?;
    let raw = Projector::binned(0.5 * offsets.spacing(), 8).project(&d, &angles, &offsets)?;
    let m = MollifierSpec::make_bump(0.05, 0)?;
    let moll = mollify(&raw, &m)?;
    let n = offsets.count();
    let length = n as f64 * offsets.spacing();
    let band = 0.25 * offsets.nyquist();
    let to_c = |r: &[f64]| r.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>();
    let (mut worst, mut bins): (f64, usize) = (0.0, 0);
    for i in 0..angles.count() {
        let fr = dft_1d(&to_c(raw.row(i)), Direction::Forward);
        let fm = dft_1d(&to_c(moll.row(i)), Direction::Forward);
        let dc = fr[0].norm();
        for k in 1..n / 2 {
            let s = 2.0 * PI * k as f64 / length;
            if s > band {
                break;
            }
            let predicted = fr[k] * m.transfer(s);
            if predicted.norm() >= 1e-3 * dc {
                worst = worst.max((fm[k] - predicted).norm() / predicted.norm());
                bins += 1;
            }
        }
    }
    Ok((
        worst <= 1e-3,
        format!("max relative deviation {worst:.2e} over {bins} resolved bins, 8 angles (limit 1e-3)"),
    ))
}

fn criterion_7() -> Outcome {
    let u = Density::uniform();
    let angles = Grid1D::from_spacing(PI / 4.0, PI / 4.0, 3)?;
    let offsets = offset_grid(1.1, 1024)?;
    let s = Projector::binned(0.5 * offsets.spacing(), 8).project(&u, &angles, &offsets)?;
    let mut residual: f64 = 0.0;
    let mut mass: f64 = 0.0;
    for theta in angles.points() {
        residual = residual.max(projection_slice_residual(&u, &s, theta, &[0.0, 1.0, 2.0, 4.0])?);
        let i = angles.nearest_index(theta);
        let slice = row_transform(s.row(i), &offsets, 0.0) / (2.0 * PI).sqrt();
        mass = mass.max((slice - Complex64::new(1.0 / (2.0 * PI), 0.0)).norm());
    }
    Ok((
        residual <= 1e-3 && mass <= 1e-6,
        format!("slice residual {residual:.2e} (limit 1e-3); |slice(0) − 1/2π| {mass:.2e} (limit 1e-6)"),
    ))
}

/// `e_{i+1} ≤ 1.1 e_i` for consecutive errors.
fn non_increasing(errors: &[f64]) -> bool {
    errors.windows(2).all(|w| w[1] <= 1.1 * w[0] + 1e-12)
}

fn format_errors(errors: &[f64]) -> String {
    errors.iter().map(|e| format!("{e:.3}")).collect::<Vec<_>>().join(" → ")
}

fn criterion_8() -> Outcome {
    let orders = [4usize, 8, 16, 32];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, d) in [("uniform", Density::uniform()), ("bilinear", Density::bilinear())] {
        let exact = RationalMomentTable::from_density(&d, 64)?;
        let mut errors = Vec::new();
        let mut within_bound = true;
        for &m in &orders {
            let rec = reconstruct_grid_exact(&exact, m, m, 64)?;
            let e = sup_error(&rec, &d);
            let (bound, _) = min_bound_over_delta(&d, m, m, &standard_deltas())?
                .ok_or_else(|| Error::Capability("phantom has no modulus of continuity".into()))?;
            within_bound &= e <= bound;
            errors.push(e);
        }
        passed &= within_bound && non_increasing(&errors);
        parts.push(format!(
            "{name} {} (within bound: {within_bound})",
            format_errors(&errors)
        ));
    }
    Ok((passed, format!("sup error at m=n=4,8,16,32: {}", parts.join("; "))))
}

fn criterion_9() -> Outcome {
    let orders = [8usize, 16, 32];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, d) in [("uniform", Density::uniform()), ("bilinear", Density::bilinear())] {
        let raw = open_sinogram(&d, 256, 1024)?;
        let mut errors = Vec::new();
        for &m in &orders {
            let k = 2 * m;
            let spec = MollifierSpec::with_order_cap(KernelKind::Bump, 1.0 / m as f64, k, k)?;
            let moll = mollify(&raw, &spec)?;
            let e = recover(&moll, Some(&spec), k, k).and_then(|table| {
                let rec = Approximation::with_cap(m, m, m)?.reconstruct_grid(&table, 64)?;
                Ok(sup_error(&rec, &d))
            });
            errors.push(e.unwrap_or(f64::INFINITY));
        }
        passed &= errors.iter().all(|e| e.is_finite()) && non_increasing(&errors);
        parts.push(format!("{name} {}", errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" → ")));
    }
    Ok((passed, format!("sup error at m=n=8,16,32, ε=1/m: {}", parts.join("; "))))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let angles = half_circle(180)?;
    let offsets = offset_grid(1.1, 512)?;
    let d = Density::reference_disk();
    let raw = Projector::binned(0.5 * offsets.spacing(), 8).project(&d, &angles, &offsets)?;
    let riesz = FilterSpec::standard(FilterKind::Riesz, &offsets);
    let resolution = 128;
    let rec_raw = fbp_reconstruct(&raw, &riesz, None, resolution)?;
    let truth = ReconGrid::from_density(&d, resolution)?;
    let raw_err = rec_raw.relative_l2_to(&truth)?;
    let m = MollifierSpec::make_bump(0.02, 0)?;
    let moll = mollify(&raw, &m)?;
    let modified = FilterSpec::standard(FilterKind::ModifiedRiesz, &offsets);
    let rec_mod = fbp_reconstruct(&moll, &modified, Some(&m), resolution)?;
    let path_gap = rec_mod.relative_l2_to(&rec_raw)?;
    let secs = start.elapsed().as_secs_f64();
    Ok((
        raw_err <= 0.15 && path_gap <= 0.05 && secs < 120.0,
        format!(
            "raw relative L2 {raw_err:.4} (limit 0.15); modified vs raw {path_gap:.2e} (limit 0.05); mass {:.4}; {secs:.1} s (limit 120 s)",
            rec_raw.mass()
        ),
    ))
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        for k in 0..=6 {
            // sorted angles in (0, π) at least 0.02 apart
            let angles = loop {
                let mut a: Vec<f64> = (0..=k).map(|_| rng.random_range(0.02..PI - 0.02)).collect();
                a.sort_by(|x, y| x.total_cmp(y));
                if a.windows(2).all(|w| w[1] - w[0] >= 0.02) {
                    break a;
                }
            };
            let system = MomentSystem::assemble(&angles, k)?;
            let direct = system.determinant();
            let factored = system.factored_determinant()?;
            worst = worst.max((direct - factored).abs() / factored.abs());
        }
    }
    Ok((worst <= 1e-8, format!("max relative difference {worst:.2e} over 700 systems (limit 1e-8)")))
}

const REPRODUCIBILITY_CONFIG: &str = r#"
[phantom]
kind = "bilinear"

[grids]
angles = 63
offsets = 257
margin = 1.1

[mollifier]
kernel = "bump"
epsilon = 0.05

[noise]
sigma = 0.01
seed = 12

[moments]
order = 4

[recon]
m = 2
n = 2
resolution = 32
"#;

fn criterion_12(work_dir: &Path) -> Outcome {
    let cfg = RunConfig::from_toml_str(REPRODUCIBILITY_CONFIG)?;
    let mut snapshots = Vec::new();
    for (run, threads) in [1usize, 4, 1].into_iter().enumerate() {
        let dir = work_dir.join(format!("reproducibility-{run}"));
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::domain(e.to_string()))?;
        let out = pool.install(|| run_pipeline(&cfg, &dir))?;
        let mut files = Vec::new();
        for path in &out.files {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            files.push((path.file_name().map(|n| n.to_owned()), bytes));
        }
        snapshots.push(files);
    }
    let identical = snapshots.windows(2).all(|w| w[0] == w[1]);
    Ok((
        identical,
        format!(
            "{} artifacts compared across 3 runs with 1, 4 and 1 threads: {}",
            snapshots[0].len(),
            if identical { "byte-identical" } else { "differ" }
        ),
    ))
}
