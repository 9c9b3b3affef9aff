//! Fourier-side inversion: projection-slice check, Riesz filtering with
//! optional mollifier deconvolution, and backprojection.
//!
//! Conventions: `F₁g(s) = (1/√2π) ∫ g(p) e^{-isp} dp` and
//! `F₂f(ξ) = (1/2π) ∫ f(x) e^{-i⟨x,ξ⟩} dx`. The filtered backprojection is
//! `f = (1/4π) R*(I⁻¹ g)` with `I⁻¹` the multiplier `|s|` and `R*` the
//! integral over the full circle of directions.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::density_recon::ReconGrid;
use crate::error::{Error, Result};
use crate::mollifier::MollifierSpec;
use crate::numerics::fourier::{Complex64, Direction, UnitaryDft};
use crate::numerics::quadrature::Grid1D;
use crate::phantoms::Density;
use crate::projector::{angular_weights, discrete_transfer, interpolate, Sinogram, SinogramKind};

/// Default floor on `F₁(φ_ε)` when dividing: `10⁻⁶/√(2π)`.
pub const DEFAULT_REG_FLOOR: f64 = 1e-6 / 2.506_628_274_631_000_7;

/// Default band limit as a fraction of the offset Nyquist frequency.
pub const DEFAULT_CUTOFF_FRACTION: f64 = 0.8;

/// Fraction of the band over which the multiplier is tapered to zero.
const TAPER_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterKind {
    Riesz,
    ModifiedRiesz,
}

impl FilterKind {
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Riesz => "riesz",
            FilterKind::ModifiedRiesz => "modified-riesz",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "riesz" => Ok(FilterKind::Riesz),
            "modified-riesz" | "modified_riesz" => Ok(FilterKind::ModifiedRiesz),
            other => Err(Error::Config(format!(
                "unknown filter '{other}' (expected riesz or modified-riesz)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    /// Band limit `s_max` in radians per unit offset.
    pub cutoff: f64,
    /// Smallest magnitude of `F₁(φ_ε)` divided by; smaller values are clamped
    /// with their sign kept.
    pub floor: f64,
}

impl FilterSpec {
    pub fn new(kind: FilterKind, cutoff: f64, floor: f64) -> Result<Self> {
        if !(cutoff >= 0.0) || !cutoff.is_finite() {
            return Err(Error::domain(format!("band cutoff must be non-negative, got {cutoff}")));
        }
        if !(floor >= 0.0) || !floor.is_finite() {
            return Err(Error::domain(format!("regularisation floor must be non-negative, got {floor}")));
        }
        Ok(FilterSpec { kind, cutoff, floor })
    }

    /// `0.8·Nyquist` of `offsets` and the default floor.
    pub fn standard(kind: FilterKind, offsets: &Grid1D) -> Self {
        FilterSpec {
            kind,
            cutoff: DEFAULT_CUTOFF_FRACTION * offsets.nyquist(),
            floor: DEFAULT_REG_FLOOR,
        }
    }
}

/// `(1/√2π) Σ_j h g_j e^{-is p_j}`, the trapezoid approximation of `F₁g(s)`.
///
/// The row is modulated by the distance from `s` to the nearest DFT bin so
/// that a single unitary DFT yields the value at `s` exactly.
pub fn row_transform(row: &[f64], offsets: &Grid1D, s: f64) -> Complex64 {
    let n = row.len();
    let h = offsets.spacing();
    let bin = 2.0 * PI / (n as f64 * h);
    let k = (s / bin).round();
    let delta = s - k * bin;
    let mut buffer: Vec<Complex64> = row
        .iter()
        .enumerate()
        .map(|(j, &g)| g * Complex64::from_polar(1.0, -delta * j as f64 * h))
        .collect();
    UnitaryDft::new(n).process(&mut buffer, Direction::Forward);
    let index = (k as i64).rem_euclid(n as i64) as usize;
    let phase = Complex64::from_polar(1.0, -s * offsets.start());
    buffer[index] * phase * (n as f64).sqrt() * h / (2.0 * PI).sqrt()
}

/// `max_s |F₂f(sω) − (1/√2π) F₁(g(θ,·))(s)|` for the row of `sino` at `theta`.
pub fn projection_slice_residual(d: &Density, sino: &Sinogram, theta: f64, s_values: &[f64]) -> Result<f64> {
    let i = sino.angles().nearest_index(theta);
    let found = sino.angles().point(i);
    if (found - theta).abs() > 1e-9 {
        return Err(Error::domain(format!("no sinogram row at θ = {theta} (nearest {found})")));
    }
    let nyquist = sino.offsets().nyquist();
    let (c, sn) = (theta.cos(), theta.sin());
    let mut worst: f64 = 0.0;
    for &s in s_values {
        if s.abs() > nyquist {
            return Err(Error::Band { s, nyquist });
        }
        let (re, im) = d.fourier_2d([s * c, s * sn]);
        let slice = row_transform(sino.row(i), sino.offsets(), s) / (2.0 * PI).sqrt();
        worst = worst.max((Complex64::new(re, im) - slice).norm());
    }
    Ok(worst)
}

fn taper(s: f64, cutoff: f64) -> f64 {
    let start = (1.0 - TAPER_FRACTION) * cutoff;
    if s > cutoff {
        0.0
    } else if s <= start {
        1.0
    } else {
        0.5 * (1.0 + (PI * (s - start) / (cutoff - start)).cos())
    }
}

/// Applies `|s|` (divided by the mollifier transform for the modified
/// filter) to every row.
///
/// Rows are zero-padded symmetrically to a power of two at least twice their
/// length; the output keeps the padded offset grid so that every filtered row
/// sums to zero.
pub fn apply_filter(sino: &Sinogram, filter: &FilterSpec, mollifier: Option<&MollifierSpec>) -> Result<Sinogram> {
    match (filter.kind, sino.kind(), mollifier) {
        (FilterKind::ModifiedRiesz, _, None) => {
            return Err(Error::Misuse("the modified Riesz filter needs the mollifier".into()));
        }
        (FilterKind::ModifiedRiesz, SinogramKind::Raw, _) => {
            return Err(Error::Misuse("the modified Riesz filter expects a mollified sinogram".into()));
        }
        (FilterKind::Riesz, SinogramKind::Mollified, _) => {
            return Err(Error::Misuse("the Riesz filter expects a raw sinogram".into()));
        }
        _ => {}
    }
    let offsets = sino.offsets();
    let nyquist = offsets.nyquist();
    if filter.cutoff > nyquist * (1.0 + 1e-12) {
        return Err(Error::Band {
            s: filter.cutoff,
            nyquist,
        });
    }
    let n = offsets.count();
    let h = offsets.spacing();
    let padded = (2 * n).next_power_of_two();
    let left = (padded - n) / 2;
    let bin = 2.0 * PI / (padded as f64 * h);
    let clamp = (2.0 * PI).sqrt() * filter.floor;
    let multiplier: Vec<f64> = (0..padded)
        .map(|k| {
            let signed = if k <= padded / 2 { k as f64 } else { k as f64 - padded as f64 };
            let s = (signed * bin).abs();
            let mut value = s * taper(s, filter.cutoff);
            if value == 0.0 {
                return 0.0;
            }
            if let (FilterKind::ModifiedRiesz, Some(m)) = (filter.kind, mollifier) {
                let t = discrete_transfer(m, h, s);
                let divisor = if t.abs() >= clamp { t } else { clamp.copysign(t) };
                value /= divisor;
            }
            value
        })
        .collect();
    let dft = UnitaryDft::new(padded);
    let rows: Vec<Vec<f64>> = sino
        .rows()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|row| {
            let mut buffer = vec![Complex64::new(0.0, 0.0); padded];
            for (b, &v) in buffer[left..left + n].iter_mut().zip(row.iter()) {
                b.re = v;
            }
            dft.process(&mut buffer, Direction::Forward);
            for (b, w) in buffer.iter_mut().zip(&multiplier) {
                *b *= *w;
            }
            dft.process(&mut buffer, Direction::Inverse);
            buffer.iter().map(|c| c.re).collect()
        })
        .collect();
    let grid = Grid1D::from_spacing(offsets.start() - left as f64 * h, h, padded)?;
    let out = Sinogram::new(sino.angles().clone(), grid, rows.concat(), sino.kind())?;
    out.with_aperture(sino.aperture())
}

/// `R*g(x) = ∫₀^{2π} g(θ, ⟨x,ω⟩) dθ` at the pixel centres.
///
/// Offsets are interpolated linearly; values off the offset grid count as
/// zero. Half-circle data is extended by evenness.
pub fn backproject(sino: &Sinogram, resolution: usize) -> Result<ReconGrid> {
    if resolution == 0 {
        return Err(Error::domain("resolution must be positive"));
    }
    let (weights, doubled) = angular_weights(sino.angles())?;
    let scale = if doubled { 2.0 } else { 1.0 };
    let directions: Vec<(f64, f64, f64)> = sino
        .angles()
        .points()
        .zip(&weights)
        .map(|(t, w)| (t.cos(), t.sin(), scale * w))
        .collect();
    let n = resolution as f64;
    let values: Vec<f64> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let x1 = ((idx % resolution) as f64 + 0.5) / n;
            let x2 = ((idx / resolution) as f64 + 0.5) / n;
            directions
                .iter()
                .enumerate()
                .map(|(i, &(c, s, w))| w * interpolate(sino.row(i), sino.offsets(), x1 * c + x2 * s))
                .sum()
        })
        .collect();
    ReconGrid::new(resolution, values, None)
}

/// `(1/4π) R*(filtered sinogram)`.
pub fn fbp_reconstruct(
    sino: &Sinogram,
    filter: &FilterSpec,
    mollifier: Option<&MollifierSpec>,
    resolution: usize,
) -> Result<ReconGrid> {
    let filtered = apply_filter(sino, filter, mollifier)?;
    let grid = backproject(&filtered, resolution)?;
    let values = grid.values().iter().map(|v| v / (4.0 * PI)).collect();
    ReconGrid::new(resolution, values, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projector::{full_circle, mollify, offset_grid, Projector};

    fn half_circle(n: usize) -> Grid1D {
        Grid1D::from_spacing(0.0, PI / n as f64, n).unwrap()
    }

    #[test]
    fn row_transform_matches_direct_sum() {
        let offsets = offset_grid(1.1, 300).unwrap();
        let row: Vec<f64> = offsets.points().map(|p| (-(p - 0.3f64).powi(2) * 8.0).exp()).collect();
        for s in [0.0, 1.0, 2.7, -5.3, 40.0] {
            let direct: Complex64 = offsets
                .points()
                .zip(&row)
                .map(|(p, &g)| g * offsets.spacing() * Complex64::from_polar(1.0, -s * p))
                .sum::<Complex64>()
                / (2.0 * PI).sqrt();
            assert!((row_transform(&row, &offsets, s) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn projection_slice_examples() {
        let offsets = offset_grid(1.1, 1024).unwrap();
        let angles = Grid1D::from_spacing(PI / 4.0, PI / 4.0, 2).unwrap();
        let u = Density::uniform();
        let sino = Projector::binned(0.5 * offsets.spacing(), 8).project(&u, &angles, &offsets).unwrap();
        let r0 = projection_slice_residual(&u, &sino, PI / 2.0, &[0.0]).unwrap();
        assert!(r0 < 1e-6);
        let slice = row_transform(sino.row(1), &offsets, 0.0).re / (2.0 * PI).sqrt();
        assert!((slice - 1.0 / (2.0 * PI)).abs() < 1e-6);
        let r = projection_slice_residual(&u, &sino, PI / 2.0, &[1.0, 2.0, 4.0]).unwrap();
        assert!(r < 1e-3, "{r}");
        assert!(projection_slice_residual(&u, &sino, 0.3, &[0.0]).is_err());
        assert!(matches!(
            projection_slice_residual(&u, &sino, PI / 2.0, &[2.0 * offsets.nyquist()]),
            Err(Error::Band { .. })
        ));
    }

    #[test]
    fn filter_examples() {
        let angles = half_circle(4);
        let offsets = offset_grid(1.1, 256).unwrap();
        let ones = Sinogram::new(angles.clone(), offsets.clone(), vec![1.0; 4 * 256], SinogramKind::Raw).unwrap();
        let spec = FilterSpec::standard(FilterKind::Riesz, &offsets);
        let filtered = apply_filter(&ones, &spec, None).unwrap();
        for row in filtered.rows() {
            assert!(row.iter().sum::<f64>().abs() < 1e-10);
        }
        let off = FilterSpec::new(FilterKind::Riesz, 0.0, DEFAULT_REG_FLOOR).unwrap();
        assert!(apply_filter(&ones, &off, None).unwrap().values().iter().all(|&v| v == 0.0));
        let modified = FilterSpec::standard(FilterKind::ModifiedRiesz, &offsets);
        assert!(matches!(apply_filter(&ones, &modified, None), Err(Error::Misuse(_))));
        let too_wide = FilterSpec::new(FilterKind::Riesz, 2.0 * offsets.nyquist(), 0.0).unwrap();
        assert!(matches!(apply_filter(&ones, &too_wide, None), Err(Error::Band { .. })));
    }

    #[test]
    fn box_row_matches_hilbert_oracle() {
        // |s| = (−i sgn s)(is): the filtered box is the Hilbert transform of
        // δ(p+a) − δ(p−a); with period L this is (1/L)[cot(π(p+a)/L) − cot(π(p−a)/L)]
        let angles = half_circle(2);
        let offsets = Grid1D::new(-8.0, 8.0, 1601).unwrap();
        let row: Vec<f64> = offsets.points().map(|p| if p.abs() <= 6.0 + 1e-9 { 1.0 } else { 0.0 }).collect();
        let s = Sinogram::new(angles, offsets.clone(), [row.clone(), row].concat(), SinogramKind::Raw).unwrap();
        let filtered = apply_filter(&s, &FilterSpec::standard(FilterKind::Riesz, &offsets), None).unwrap();
        let g = filtered.offsets();
        let period = g.count() as f64 * g.spacing();
        let a = 6.0 + 0.5 * offsets.spacing();
        let cot = |x: f64| 1.0 / (PI * x / period).tan();
        for (p, v) in g.points().zip(filtered.row(0)) {
            if (p.abs() - a).abs() > 2.0 && p.abs() < 15.0 {
                let want = (cot(p + a) - cot(p - a)) / period;
                assert!((v - want).abs() < 2e-3, "p={p} v={v} want={want}");
            }
        }
    }

    #[test]
    fn modified_filter_undoes_the_mollifier() {
        let angles = half_circle(6);
        let offsets = offset_grid(1.1, 512).unwrap();
        let d = Density::reference_disk();
        let raw = Projector::binned(offsets.spacing(), 4).project(&d, &angles, &offsets).unwrap();
        let m = MollifierSpec::make_bump(0.02, 0).unwrap();
        let moll = mollify(&raw, &m).unwrap();
        let spec = FilterSpec::standard(FilterKind::Riesz, &offsets);
        let a = apply_filter(&raw, &spec, None).unwrap();
        let b = apply_filter(&moll, &FilterSpec { kind: FilterKind::ModifiedRiesz, ..spec }, Some(&m)).unwrap();
        let scale = a.values().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-3 * scale);
        }
        assert!(matches!(apply_filter(&raw, &b_spec(spec), Some(&m)), Err(Error::Misuse(_))));
    }

    fn b_spec(spec: FilterSpec) -> FilterSpec {
        FilterSpec {
            kind: FilterKind::ModifiedRiesz,
            ..spec
        }
    }

    #[test]
    fn backprojection_examples() {
        let angles = full_circle(64).unwrap();
        let offsets = offset_grid(1.1, 101).unwrap();
        let ones = Sinogram::new(angles.clone(), offsets.clone(), vec![1.0; 64 * 101], SinogramKind::Raw).unwrap();
        let bp = backproject(&ones, 8).unwrap();
        assert!(bp.values().iter().all(|v| (v - 2.0 * PI).abs() < 1e-12));
        let ramp: Vec<f64> = (0..64).flat_map(|_| offsets.points().collect::<Vec<_>>()).collect();
        let ramp = ones.with_values(ramp, SinogramKind::Raw).unwrap();
        let bp = backproject(&ramp, 8).unwrap();
        assert!(bp.values().iter().all(|v| v.abs() < 1e-12));

        // one non-zero column at θ = 0 smears along the vertical line x₁ = p
        let mut spike = vec![0.0; 64 * 101];
        let j = offsets.nearest_index(0.5);
        spike[j] = 1.0;
        let spike = ones.with_values(spike, SinogramKind::Raw).unwrap();
        let bp = backproject(&spike, 16).unwrap();
        let dt = 2.0 * PI / 64.0;
        for jj in 0..16 {
            for ii in 0..16 {
                let x1 = bp.centre(ii, jj)[0];
                let expect = dt * (1.0 - (x1 - offsets.point(j)).abs() / offsets.spacing()).max(0.0);
                assert!((bp.get(ii, jj) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fbp_of_disk() {
        let angles = half_circle(180);
        let offsets = offset_grid(1.1, 512).unwrap();
        let d = Density::reference_disk();
        let raw = Projector::binned(offsets.spacing(), 4).project(&d, &angles, &offsets).unwrap();
        let rec = fbp_reconstruct(&raw, &FilterSpec::standard(FilterKind::Riesz, &offsets), None, 128).unwrap();
        let truth = ReconGrid::from_density(&d, 128).unwrap();
        let err = rec.relative_l2_to(&truth).unwrap();
        assert!(err <= 0.15, "{err}");
        assert!((rec.mass() - 1.0).abs() < 0.1);
        let zero = Sinogram::zeros(angles, offsets.clone());
        let z = fbp_reconstruct(&zero, &FilterSpec::standard(FilterKind::Riesz, &offsets), None, 16).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }
}
