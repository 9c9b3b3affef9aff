//! Forward simulation: sinograms of analytic densities, offset-domain
//! mollification and seeded additive noise.

use std::f64::consts::{PI, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mollifier::MollifierSpec;
use crate::numerics::quadrature::{trapezoid_weights, GaussLegendre, Grid1D};
use crate::phantoms::{clip_to_square, Density};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SinogramKind {
    Raw,
    Mollified,
    Noisy,
}

impl SinogramKind {
    pub fn name(self) -> &'static str {
        match self {
            SinogramKind::Raw => "raw",
            SinogramKind::Mollified => "mollified",
            SinogramKind::Noisy => "noisy",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "raw" => Some(SinogramKind::Raw),
            "mollified" => Some(SinogramKind::Mollified),
            "noisy" => Some(SinogramKind::Noisy),
            _ => None,
        }
    }
}

/// `θ_j = π(j + 1)/(n + 1)`: `n` angles strictly inside `(0, π)`.
pub fn open_half_circle(n: usize) -> Result<Grid1D> {
    let step = PI / (n as f64 + 1.0);
    Grid1D::from_spacing(step, step, n)
}

/// `θ_j = 2πj/n`, covering `[0, 2π)`.
pub fn full_circle(n: usize) -> Result<Grid1D> {
    Grid1D::from_spacing(0.0, 2.0 * PI / n as f64, n)
}

/// `p_i` uniformly spaced on `[-√2·margin, √2·margin]`.
pub fn offset_grid(margin: f64, count: usize) -> Result<Grid1D> {
    if !(margin > 0.0) {
        return Err(Error::domain(format!("offset margin must be positive, got {margin}")));
    }
    Grid1D::new(-SQRT_2 * margin, SQRT_2 * margin, count)
}

/// Sampled Radon data on an angle × offset grid, stored angle-major.
///
/// `aperture` is the width of the detector bin each sample averages over;
/// zero means point samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    angles: Grid1D,
    offsets: Grid1D,
    values: Vec<f64>,
    kind: SinogramKind,
    aperture: f64,
}

impl Sinogram {
    pub fn new(angles: Grid1D, offsets: Grid1D, values: Vec<f64>, kind: SinogramKind) -> Result<Self> {
        let expected = angles.count() * offsets.count();
        if values.len() != expected {
            return Err(Error::Shape {
                expected,
                actual: values.len(),
            });
        }
        Ok(Sinogram {
            angles,
            offsets,
            values,
            kind,
            aperture: 0.0,
        })
    }

    pub fn zeros(angles: Grid1D, offsets: Grid1D) -> Self {
        Sinogram {
            values: vec![0.0; angles.count() * offsets.count()],
            angles,
            offsets,
            kind: SinogramKind::Raw,
            aperture: 0.0,
        }
    }

    pub fn with_aperture(mut self, width: f64) -> Result<Self> {
        if !(width >= 0.0) || !width.is_finite() {
            return Err(Error::domain(format!("aperture must be non-negative, got {width}")));
        }
        self.aperture = width;
        Ok(self)
    }

    pub fn angles(&self) -> &Grid1D {
        &self.angles
    }

    pub fn offsets(&self) -> &Grid1D {
        &self.offsets
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SinogramKind {
        self.kind
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.offsets.count();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.offsets.count())
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.offsets.count() + j]
    }

    /// Same grids and metadata with new values.
    pub fn with_values(&self, values: Vec<f64>, kind: SinogramKind) -> Result<Self> {
        let mut out = Sinogram::new(self.angles, self.offsets, values, kind)?;
        out.aperture = self.aperture;
        Ok(out)
    }

    /// Linear interpolation of row `i` at offset `p`; zero outside the grid.
    pub fn interpolate_row(&self, i: usize, p: f64) -> f64 {
        interpolate(self.row(i), &self.offsets, p)
    }
}

pub(crate) fn interpolate(row: &[f64], grid: &Grid1D, p: f64) -> f64 {
    let t = (p - grid.start()) / grid.spacing();
    if !(t >= 0.0) || t > (grid.count() - 1) as f64 {
        return 0.0;
    }
    let j = (t.floor() as usize).min(grid.count() - 2);
    let frac = t - j as f64;
    row[j] * (1.0 - frac) + row[j + 1] * frac
}

/// How each sinogram sample integrates over the detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Aperture {
    /// Single line per sample.
    Point,
    /// Average over the bin `[p − h/2, p + h/2]`, `h` the offset spacing,
    /// using this many Gauss–Legendre sub-lines.
    Bin { nodes: usize },
}

/// Line-integral projector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projector {
    /// Maximum trapezoid step along each line.
    pub line_step: f64,
    pub aperture: Aperture,
}

impl Projector {
    pub fn point(line_step: f64) -> Self {
        Projector {
            line_step,
            aperture: Aperture::Point,
        }
    }

    pub fn binned(line_step: f64, nodes: usize) -> Self {
        Projector {
            line_step,
            aperture: Aperture::Bin { nodes },
        }
    }

    pub fn project(&self, d: &Density, angles: &Grid1D, offsets: &Grid1D) -> Result<Sinogram> {
        check_coverage(offsets)?;
        if !(self.line_step > 0.0) || self.line_step > offsets.spacing() * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "line step {} must be positive and at most the offset spacing {}",
                self.line_step,
                offsets.spacing()
            )));
        }
        let h = offsets.spacing();
        let gl = match self.aperture {
            Aperture::Point => None,
            Aperture::Bin { nodes } => {
                if nodes == 0 {
                    return Err(Error::domain("bin aperture needs at least one node"));
                }
                Some(GaussLegendre::new(nodes))
            }
        };
        let m = offsets.count();
        let rows: Vec<Vec<f64>> = (0..angles.count())
            .into_par_iter()
            .map(|i| {
                let theta = angles.point(i);
                let mut kinks = d.offset_breaks(theta);
                kinks.sort_by(|a, b| a.total_cmp(b));
                (0..m)
                    .map(|j| {
                        let p = offsets.point(j);
                        match &gl {
                            None => line_integral(d, theta, p, self.line_step),
                            Some(gl) => bin_average(d, theta, p - 0.5 * h, p + 0.5 * h, &kinks, gl, self.line_step),
                        }
                    })
                    .collect()
            })
            .collect();
        let width = match self.aperture {
            Aperture::Point => 0.0,
            Aperture::Bin { .. } => h,
        };
        Sinogram::new(*angles, *offsets, rows.concat(), SinogramKind::Raw)?.with_aperture(width)
    }
}

/// Point-sampled projection with trapezoid line integrals.
pub fn project(d: &Density, angles: &Grid1D, offsets: &Grid1D, line_step: f64) -> Result<Sinogram> {
    Projector::point(line_step).project(d, angles, offsets)
}

fn check_coverage(offsets: &Grid1D) -> Result<()> {
    let tol = 1e-12;
    if offsets.start() > -SQRT_2 + tol || offsets.stop() < SQRT_2 - tol {
        return Err(Error::Coverage(format!(
            "offsets [{}, {}] must contain [-√2, √2]",
            offsets.start(),
            offsets.stop()
        )));
    }
    Ok(())
}

/// Mean of `Rf(θ, ·)` over `[lo, hi]`, with Gauss–Legendre on each piece
/// between consecutive kinks of the projection.
fn bin_average(d: &Density, theta: f64, lo: f64, hi: f64, kinks: &[f64], gl: &GaussLegendre, line_step: f64) -> f64 {
    let mut cuts = vec![lo];
    cuts.extend(kinks.iter().copied().filter(|&k| k > lo && k < hi));
    cuts.push(hi);
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        total += gl.integrate(pair[0], pair[1], |q| line_integral(d, theta, q, line_step));
    }
    total / (hi - lo)
}

/// Trapezoid integral of `f` along `⟨x, ω(θ)⟩ = p`, split at every jump of `f`.
pub fn line_integral(d: &Density, theta: f64, p: f64, line_step: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let base = [p * c, p * s];
    let dir = [-s, c];
    let Some((t0, t1)) = clip_to_square(base, dir) else {
        return 0.0;
    };
    let mut breaks = vec![t0, t1];
    breaks.extend(d.interior_breaks(base, dir).into_iter().filter(|&t| t > t0 && t < t1));
    breaks.sort_by(|a, b| a.total_cmp(b));
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        let panels = (len / line_step).ceil().max(1.0) as usize;
        let step = len / panels as f64;
        // evaluate just inside the piece so jumps are attributed to the right side
        let inset = (0.25 * len).min(1e-9);
        let at = |t: f64| {
            let t = t.clamp(a + inset, b - inset);
            d.value([base[0] + t * dir[0], base[1] + t * dir[1]])
        };
        let mut acc = 0.5 * (at(a) + at(b));
        for k in 1..panels {
            acc += at(a + k as f64 * step);
        }
        total += acc * step;
    }
    total
}

/// Taps `w_l ∝ h·φ_ε((l − reach)h)`, normalised to unit sum, and `reach`.
///
/// A kernel narrower than one grid step degenerates to the identity.
pub fn kernel_weights(m: &MollifierSpec, h: f64) -> (Vec<f64>, usize) {
    let reach = (m.epsilon() / h).floor() as usize;
    let mut weights: Vec<f64> = (0..=2 * reach)
        .map(|l| h * m.evaluate_kernel((l as f64 - reach as f64) * h))
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        weights = vec![0.0; 2 * reach + 1];
        weights[reach] = 1.0;
    } else {
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
    (weights, reach)
}

/// Frequency response `Σ_l w_l cos(s(l − reach)h)` of the taps used by [`mollify`].
///
/// Tends to `√(2π)F₁(φ_ε)(s)` as `h → 0`.
pub fn discrete_transfer(m: &MollifierSpec, h: f64, s: f64) -> f64 {
    let (weights, reach) = kernel_weights(m, h);
    weights
        .iter()
        .enumerate()
        .map(|(l, w)| w * (s * (l as f64 - reach as f64) * h).cos())
        .sum()
}

/// Convolves every row with `φ_ε` on the offset grid (zero padding).
pub fn mollify(s: &Sinogram, m: &MollifierSpec) -> Result<Sinogram> {
    if s.kind() == SinogramKind::Mollified {
        return Err(Error::Misuse("sinogram is already mollified".into()));
    }
    let h = s.offsets().spacing();
    if m.epsilon() < 2.0 * h {
        log::warn!(
            "mollifier width {} is below twice the offset spacing {}; the kernel is poorly resolved",
            m.epsilon(),
            h
        );
    }
    let (weights, reach) = kernel_weights(m, h);
    let cols = s.offsets().count();
    let rows: Vec<Vec<f64>> = s
        .rows()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = 0.0;
                    for (l, w) in weights.iter().enumerate() {
                        let src = j as isize + l as isize - reach as isize;
                        if src >= 0 && (src as usize) < cols {
                            acc += w * row[src as usize];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    s.with_values(rows.concat(), SinogramKind::Mollified)
}

/// Adds i.i.d. `N(0, σ²)` noise; row `i` draws from stream `i` of a generator
/// seeded with `seed`, so the result does not depend on scheduling.
pub fn add_noise(s: &Sinogram, sigma: f64, seed: u64) -> Result<Sinogram> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("noise level must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return s.with_values(s.values().to_vec(), SinogramKind::Noisy);
    }
    let rows: Vec<Vec<f64>> = s
        .rows()
        .collect::<Vec<_>>()
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            row.iter()
                .map(|v| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    v + sigma * z
                })
                .collect()
        })
        .collect();
    s.with_values(rows.concat(), SinogramKind::Noisy)
}

/// Angular quadrature weights over one period, and whether evenness doubles
/// the result to a full circle.
///
/// Grids with `n·Δθ = 2π` are treated as periodic on the full circle. Grids
/// spanning at most a half circle are treated as periodic with period π.
pub(crate) fn angular_weights(angles: &Grid1D) -> Result<(Vec<f64>, bool)> {
    let n = angles.count();
    let dt = angles.spacing();
    let span = n as f64 * dt;
    if (span - 2.0 * PI).abs() <= 1e-9 {
        return Ok((vec![dt; n], false));
    }
    let extent = angles.stop() - angles.start();
    if extent > PI + 1e-9 {
        return Err(Error::domain(format!(
            "angle grid spans {extent} rad; need a full circle or at most a half circle"
        )));
    }
    // periodic trapezoid with period π: the wrap-around gap closes the circle
    let wrap = PI - extent;
    let mut w = vec![dt; n];
    w[0] = 0.5 * (dt + wrap);
    w[n - 1] = 0.5 * (dt + wrap);
    Ok((w, true))
}

/// `∫∫ |g(θ, p)| dp dθ` over the full circle, extending half-circle data by evenness.
pub fn l1_norm(s: &Sinogram) -> Result<f64> {
    let (wt, doubled) = angular_weights(s.angles())?;
    let wp = trapezoid_weights(s.offsets());
    let mut total = 0.0;
    for (row, w) in s.rows().zip(&wt) {
        let line: f64 = row.iter().zip(&wp).map(|(v, q)| v.abs() * q).sum();
        total += w * line;
    }
    Ok(if doubled { 2.0 * total } else { total })
}

/// `max |g(θ, p) − g(θ + π, −p)|` for full-circle grids with an even angle count.
pub fn evenness_residual(s: &Sinogram) -> Option<f64> {
    let n = s.angles().count();
    let full = (n as f64 * s.angles().spacing() - 2.0 * PI).abs() <= 1e-9;
    if !full || n % 2 != 0 {
        return None;
    }
    let half = n / 2;
    let offsets = s.offsets();
    let mut worst: f64 = 0.0;
    for i in 0..half {
        for j in 0..offsets.count() {
            let p = offsets.point(j);
            let mirrored = s.interpolate_row(i + half, -p);
            worst = worst.max((s.value(i, j) - mirrored).abs());
        }
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fourier::{dft_1d, Complex64, Direction};
    use crate::numerics::quadrature::trapezoid_integrate;
    use crate::phantoms::Disk;
    use std::f64::consts::FRAC_PI_2;

    fn grids(n_angles: usize, n_offsets: usize) -> (Grid1D, Grid1D) {
        (full_circle(n_angles).unwrap(), offset_grid(1.1, n_offsets).unwrap())
    }

    #[test]
    fn single_line_examples() {
        let u = Density::uniform();
        assert!((line_integral(&u, FRAC_PI_2, 0.5, 1e-3) - 1.0).abs() < 1e-12);
        let disk = Density::reference_disk();
        let p = 0.5 * (0.4f64.cos() + 0.4f64.sin());
        assert!((line_integral(&disk, 0.4, p, 1e-3) - 8.0 / PI).abs() < 1e-12);
        assert_eq!(line_integral(&disk, 0.0, 1.5, 1e-3), 0.0);
        assert_eq!(line_integral(&u, 0.0, 1.5, 1e-3), 0.0);
    }

    #[test]
    fn matches_analytic_radon() {
        let (angles, offsets) = grids(16, 128);
        for d in [Density::uniform(), Density::reference_disk()] {
            let s = project(&d, &angles, &offsets, offsets.spacing()).unwrap();
            for i in 0..angles.count() {
                for j in 0..offsets.count() {
                    let exact = d.analytic_radon(angles.point(i), offsets.point(j)).unwrap();
                    assert!((s.value(i, j) - exact).abs() < 1e-10, "({i},{j}) {} {} {exact}", offsets.point(j), s.value(i, j));
                }
            }
        }
    }

    #[test]
    fn polynomial_line_integral_converges() {
        // 4x₁x₂ along θ = π/2 (horizontal line x₂ = p): ∫₀¹ 4 x p dx = 2p
        let d = Density::bilinear();
        for step in [1e-2, 1e-3] {
            let v = line_integral(&d, FRAC_PI_2, 0.3, step);
            assert!((v - 0.6).abs() < 1e-12);
        }
        // diagonal: the integrand is quadratic, trapezoid error is O(step²)
        let p = 0.8;
        let exact = {
            let base = [p * (PI / 4.0).cos(), p * (PI / 4.0).sin()];
            let dir = [-(PI / 4.0).sin(), (PI / 4.0).cos()];
            let (a, b) = clip_to_square(base, dir).unwrap();
            GaussLegendre::new(4).integrate(a, b, |t| 4.0 * (base[0] + t * dir[0]) * (base[1] + t * dir[1]))
        };
        let coarse = (line_integral(&d, PI / 4.0, p, 1e-2) - exact).abs();
        let fine = (line_integral(&d, PI / 4.0, p, 1e-3) - exact).abs();
        assert!(fine < coarse / 50.0 && fine < 1e-6, "{coarse} {fine}");
    }

    #[test]
    fn coverage_and_step_checks() {
        let angles = full_circle(8).unwrap();
        let short = offset_grid(0.9, 65).unwrap();
        assert!(matches!(project(&Density::uniform(), &angles, &short, 0.01), Err(Error::Coverage(_))));
        let offsets = offset_grid(1.1, 65).unwrap();
        assert!(project(&Density::uniform(), &angles, &offsets, 1.0).is_err());
    }

    #[test]
    fn mass_per_angle_and_evenness() {
        let (angles, offsets) = grids(32, 1025);
        for d in [Density::uniform(), Density::bilinear(), Density::reference_disk()] {
            let s = Projector::binned(0.5 * offsets.spacing(), 8).project(&d, &angles, &offsets).unwrap();
            for row in s.rows() {
                let mass = trapezoid_integrate(row, &offsets).unwrap();
                assert!((mass - 1.0).abs() < 1e-6, "{mass} {:?}", d.kind());
            }
            assert!(evenness_residual(&s).unwrap() < 1e-6);
        }
    }

    #[test]
    fn l1_norm_examples() {
        let (angles, offsets) = grids(64, 513);
        let s = project(&Density::reference_disk(), &angles, &offsets, offsets.spacing()).unwrap();
        let raw = l1_norm(&s).unwrap();
        assert!((raw - 2.0 * PI).abs() < 1e-3, "{raw}");
        let moll = l1_norm(&mollify(&s, &MollifierSpec::make_bump(0.05, 0).unwrap()).unwrap()).unwrap();
        assert!(moll <= raw + 1e-6);
        assert_eq!(l1_norm(&Sinogram::zeros(angles, offsets)).unwrap(), 0.0);

        // half-circle data is extended by evenness
        let half = open_half_circle(63).unwrap();
        let s = project(&Density::uniform(), &half, &offsets, offsets.spacing()).unwrap();
        assert!((l1_norm(&s).unwrap() - 2.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn mollify_properties() {
        let (angles, offsets) = grids(8, 801);
        let disk = Density::reference_disk();
        let raw = project(&disk, &angles, &offsets, offsets.spacing()).unwrap();
        let m = MollifierSpec::make_bump(0.05, 0).unwrap();
        let moll = mollify(&raw, &m).unwrap();
        assert_eq!(moll.kind(), SinogramKind::Mollified);
        for (r, q) in raw.rows().zip(moll.rows()) {
            let a = trapezoid_integrate(r, &offsets).unwrap();
            let b = trapezoid_integrate(q, &offsets).unwrap();
            assert!((a - b).abs() < 1e-8);
            let peak = q.iter().cloned().fold(0.0, f64::max);
            assert!(peak < 8.0 / PI);
        }
        assert!(matches!(mollify(&moll, &m), Err(Error::Misuse(_))));

        // constant regions are unchanged
        let ones = raw.with_values(vec![1.0; raw.values().len()], SinogramKind::Raw).unwrap();
        let sm = mollify(&ones, &m).unwrap();
        let reach = (0.05 / offsets.spacing()).ceil() as usize;
        for j in reach..offsets.count() - reach {
            assert!((sm.value(0, j) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn convolution_theorem_per_angle() {
        // DFT(mollified) = DFT(raw) · √(2π)F₁φ within the band where the kernel is resolved
        let (angles, offsets) = grids(4, 1024);
        let d = Density::disks(vec![Disk::unit_mass([0.4, 0.55], 0.2).unwrap()]).unwrap();
        let raw = project(&d, &angles, &offsets, offsets.spacing()).unwrap();
        let m = MollifierSpec::make_bump(0.05, 0).unwrap();
        let moll = mollify(&raw, &m).unwrap();
        let n = offsets.count();
        let length = n as f64 * offsets.spacing();
        for i in 0..angles.count() {
            let to_c = |r: &[f64]| r.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>();
            let fr = dft_1d(&to_c(raw.row(i)), Direction::Forward);
            let fm = dft_1d(&to_c(moll.row(i)), Direction::Forward);
            for k in 1..60 {
                let s = 2.0 * PI * k as f64 / length;
                let predicted = fr[k] * m.transfer(s);
                if fr[k].norm() > 1e-3 * fr[0].norm() {
                    assert!((fm[k] - predicted).norm() <= 1e-3 * predicted.norm().max(1e-3 * fr[0].norm()), "k={k}");
                }
            }
        }
    }

    #[test]
    fn noise_contract() {
        let (angles, offsets) = grids(100, 1000);
        let zero = Sinogram::zeros(angles, offsets);
        assert_eq!(add_noise(&zero, 0.0, 7).unwrap().values(), zero.values());
        let a = add_noise(&zero, 0.1, 42).unwrap();
        let b = add_noise(&zero, 0.1, 42).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.kind(), SinogramKind::Noisy);
        assert_ne!(add_noise(&zero, 0.1, 43).unwrap().values(), a.values());
        let n = a.values().len() as f64;
        let mean = a.values().iter().sum::<f64>() / n;
        let var = a.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() <= 3.0 * 0.1 / n.sqrt());
        assert!((var - 0.01).abs() <= 0.05 * 0.01);
        assert!(add_noise(&zero, -1.0, 0).is_err());
    }

    #[test]
    fn noise_is_thread_count_independent() {
        let (angles, offsets) = grids(16, 64);
        let zero = Sinogram::zeros(angles, offsets);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| add_noise(&zero, 0.3, 9).unwrap())
        };
        assert_eq!(run(1).values(), run(3).values());
    }

    #[test]
    fn angular_weight_rules() {
        let (w, doubled) = angular_weights(&full_circle(10).unwrap()).unwrap();
        assert!(!doubled && (w.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-12);
        let (w, doubled) = angular_weights(&open_half_circle(9).unwrap()).unwrap();
        assert!(doubled && (w.iter().sum::<f64>() - PI).abs() < 1e-12);
        let odd = Grid1D::new(0.0, 4.0, 5).unwrap();
        assert!(angular_weights(&odd).is_err());
    }
}
