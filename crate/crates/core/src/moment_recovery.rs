//! Angular moments of sinogram rows, removal of the mollifier by the
//! binomial moment relation, and the Vandermonde-structured solves that turn
//! angular moments into the bivariate moment table.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mollifier::MollifierSpec;
use crate::numerics::linalg::{CotangentVandermonde, VandermondeSolver, DEFAULT_MAX_ORDER};
use crate::numerics::quadrature::{trapezoid_weights, Grid1D};
use crate::numerics::special::binomial;
use crate::phantoms::MomentTable;
use crate::projector::{Sinogram, SinogramKind};

/// Whether angular moments still carry the mollifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Raw,
    Mollified,
}

/// `b⁽ᵏ⁾(θ_i) = ∫ g(θ_i, p) p^k dp` for `k ≤ K` at a list of angles.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularMomentSet {
    max_order: usize,
    angles: Vec<f64>,
    /// `values[i][k]`
    values: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl AngularMomentSet {
    pub fn new(angles: Vec<f64>, values: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self> {
        if angles.len() != values.len() || angles.is_empty() {
            return Err(Error::Shape {
                expected: angles.len(),
                actual: values.len(),
            });
        }
        let width = values[0].len();
        if width == 0 || values.iter().any(|v| v.len() != width) {
            return Err(Error::domain("angular moment rows must share one non-zero length"));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::DataQuality("non-finite angular moment".into()));
        }
        Ok(AngularMomentSet {
            max_order: width - 1,
            angles,
            values,
            provenance,
        })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `b⁽ᵏ⁾(θ_i)`.
    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[i][k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }
}

/// `b_k − Σ_{j≥1} C(k,j) c_j b_{k−j}`: undoes convolution with a kernel whose
/// moments are `c` (`c_0 = 1`).
fn deconvolve_row(hat: &[f64], c: &[f64]) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::with_capacity(hat.len());
    for k in 0..hat.len() {
        let mut acc = hat[k];
        for j in 1..=k {
            if c[j] != 0.0 {
                acc -= binomial(k, j)? * c[j] * out[k - j];
            }
        }
        out.push(acc / c[0]);
    }
    Ok(out)
}

/// `Σ_j C(k,j) c_j b_{k−j}`.
fn convolve_row(raw: &[f64], c: &[f64]) -> Result<Vec<f64>> {
    (0..raw.len())
        .map(|k| (0..=k).map(|j| Ok(binomial(k, j)? * c[j] * raw[k - j])).sum())
        .collect()
}

/// Moments `∫ box(τ)(−τ)^j dτ` of the unit-mass box on `[−w/2, w/2]`.
fn box_moments(width: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| if j % 2 == 1 { 0.0 } else { (0.5 * width).powi(j as i32) / (j as f64 + 1.0) })
        .collect()
}

/// Angles `π(i + 1)/(K + 2)`, `i = 0..=K`.
pub fn default_angles(max_order: usize) -> Vec<f64> {
    (0..=max_order)
        .map(|i| PI * (i as f64 + 1.0) / (max_order as f64 + 2.0))
        .collect()
}

/// Replaces each angle by the nearest sample of `grid`; fails if two collide.
pub fn snap_to_grid(angles: &[f64], grid: &Grid1D) -> Result<Vec<f64>> {
    let snapped: Vec<f64> = angles.iter().map(|&a| grid.point(grid.nearest_index(a))).collect();
    if snapped.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Singular(format!(
            "angle grid with {} samples is too coarse for {} distinct angles",
            grid.count(),
            angles.len()
        )));
    }
    Ok(snapped)
}

/// The `k + 1` angles (as indices into `0..=K`) used for the order-`k` system.
pub fn angle_subset(k: usize, available: usize) -> Vec<usize> {
    let last = available - 1;
    if k == 0 {
        return vec![last / 2];
    }
    (0..=k)
        .map(|i| ((i * last) as f64 / k as f64).round() as usize)
        .collect()
}

/// Assembled `A⁽ᵏ⁾` with entries `C(k,j) cos^jθ_i sin^{k−j}θ_i`.
#[derive(Clone, Debug)]
pub struct MomentSystem {
    pub order: usize,
    pub angles: Vec<f64>,
    pub matrix: DMatrix<f64>,
}

impl MomentSystem {
    pub fn assemble(angles: &[f64], order: usize) -> Result<Self> {
        if angles.len() != order + 1 {
            return Err(Error::Shape {
                expected: order + 1,
                actual: angles.len(),
            });
        }
        let coeffs = (0..=order).map(|j| binomial(order, j)).collect::<Result<Vec<_>>>()?;
        let matrix = DMatrix::from_fn(order + 1, order + 1, |i, j| {
            let (s, c) = angles[i].sin_cos();
            coeffs[j] * c.powi(j as i32) * s.powi((order - j) as i32)
        });
        Ok(MomentSystem {
            order,
            angles: angles.to_vec(),
            matrix,
        })
    }

    /// Determinant by LU factorization of the assembled matrix.
    pub fn determinant(&self) -> f64 {
        self.matrix.clone().determinant()
    }

    /// `(∏_j C(k,j)) (∏_i sin^kθ_i) ∏_{i<j} (cot θ_j − cot θ_i)`.
    pub fn factored_determinant(&self) -> Result<f64> {
        let k = self.order;
        let mut det = 1.0;
        for j in 0..=k {
            det *= binomial(k, j)?;
        }
        for &t in &self.angles {
            det *= t.sin().powi(k as i32);
        }
        for j in 0..=k {
            for i in 0..j {
                det *= 1.0 / self.angles[j].tan() - 1.0 / self.angles[i].tan();
            }
        }
        Ok(det)
    }
}

/// Solution of one order together with the estimated `κ∞(A⁽ᵏ⁾)`.
#[derive(Clone, Debug)]
pub struct OrderSolution {
    pub order: usize,
    /// `(γ_{0,k}, γ_{1,k−1}, …, γ_{k,0})`
    pub moments: Vec<f64>,
    pub condition: f64,
}

/// Tunable moment recovery.
#[derive(Clone, Copy, Debug)]
pub struct MomentRecovery {
    pub max_order: usize,
    /// Allowed spread of `b⁽⁰⁾` across angles, relative to its mean.
    pub consistency_tol: f64,
}

impl Default for MomentRecovery {
    fn default() -> Self {
        MomentRecovery {
            max_order: DEFAULT_MAX_ORDER,
            consistency_tol: 2e-2,
        }
    }
}

impl MomentRecovery {
    pub fn with_max_order(max_order: usize) -> Self {
        MomentRecovery {
            max_order,
            ..Default::default()
        }
    }

    /// Trapezoid `∫ g(θ, p) p^k dp` at the requested angles. Off-grid angles
    /// are interpolated across rows. A detector bin aperture recorded on the
    /// sinogram is removed exactly, so point-sample moments are returned.
    pub fn angular_moments(&self, s: &Sinogram, max_order: usize, angles: &[f64]) -> Result<AngularMomentSet> {
        if max_order > self.max_order {
            return Err(Error::Order {
                requested: max_order,
                max: self.max_order,
            });
        }
        if angles.is_empty() {
            return Err(Error::domain("at least one angle is required"));
        }
        for &a in angles {
            if !(a > 0.0 && a < PI) {
                return Err(Error::domain(format!("moment angle {a} is outside (0, π)")));
            }
        }
        let offsets = s.offsets();
        if offsets.start() > -1.0 || offsets.stop() < std::f64::consts::SQRT_2 {
            return Err(Error::Coverage(format!(
                "offsets [{}, {}] do not cover [-1, √2]",
                offsets.start(),
                offsets.stop()
            )));
        }
        let weighted_powers = power_weights(offsets, max_order);
        let row_moments = |i: usize| -> Vec<f64> {
            let row = s.row(i);
            weighted_powers
                .iter()
                .map(|w| w.iter().zip(row).map(|(a, b)| a * b).sum())
                .collect()
        };
        let grid = s.angles();
        let mut values = Vec::with_capacity(angles.len());
        for &theta in angles {
            let t = (theta - grid.start()) / grid.spacing();
            let nearest = t.round();
            let b = if (t - nearest).abs() < 1e-9 && nearest >= 0.0 && (nearest as usize) < grid.count() {
                row_moments(nearest as usize)
            } else {
                interpolate_moments(grid, t, &row_moments)?
            };
            values.push(b);
        }
        if s.aperture() > 0.0 {
            let c = box_moments(s.aperture(), max_order + 1);
            values = values.iter().map(|b| deconvolve_row(b, &c)).collect::<Result<_>>()?;
        }
        let provenance = match s.kind() {
            SinogramKind::Mollified => Provenance::Mollified,
            SinogramKind::Raw | SinogramKind::Noisy => Provenance::Raw,
        };
        AngularMomentSet::new(angles.to_vec(), values, provenance)
    }

    /// Solves `A⁽ᵏ⁾ x = b⁽ᵏ⁾` on a spread subset of `k + 1` angles.
    pub fn solve_moment_system(&self, ams: &AngularMomentSet, k: usize) -> Result<OrderSolution> {
        if ams.provenance() != Provenance::Raw {
            return Err(Error::Misuse("angular moments still carry the mollifier".into()));
        }
        if k > ams.max_order() {
            return Err(Error::InsufficientOrder {
                available: ams.max_order(),
                required: k,
            });
        }
        if ams.angles().len() < k + 1 {
            return Err(Error::Singular(format!(
                "order {k} needs {} distinct angles, only {} given",
                k + 1,
                ams.angles().len()
            )));
        }
        let picks = angle_subset(k, ams.angles().len());
        let angles: Vec<f64> = picks.iter().map(|&i| ams.angles()[i]).collect();
        let rhs: Vec<f64> = picks.iter().map(|&i| ams.value(i, k)).collect();
        let v = CotangentVandermonde::from_angles(&angles)?;
        let row_scales: Vec<f64> = angles.iter().map(|t| t.sin().powi(k as i32)).collect();
        let solver = VandermondeSolver::with_max_order(self.max_order);
        let moments = solver.solve(&v, &rhs, &row_scales)?;

        // κ∞ from the explicit inverse, one unit vector at a time
        let a = MomentSystem::assemble(&angles, k)?.matrix;
        let norm_a = (0..=k).map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        let mut inv_rows = vec![0.0; k + 1];
        for e in 0..=k {
            let mut unit = vec![0.0; k + 1];
            unit[e] = 1.0;
            let col = solver.solve(&v, &unit, &row_scales)?;
            for (r, c) in inv_rows.iter_mut().zip(col) {
                *r += c.abs();
            }
        }
        let condition = norm_a * inv_rows.iter().cloned().fold(0.0, f64::max);
        log::debug!("order {k}: condition estimate {condition:.3e}");
        if condition > 1e12 {
            log::warn!("order {k} moment system is ill-conditioned (κ ≈ {condition:.3e})");
        }
        Ok(OrderSolution {
            order: k,
            moments,
            condition,
        })
    }

    /// Full pipeline from a sinogram to the moment table.
    pub fn recover_moment_table(
        &self,
        s: &Sinogram,
        m: Option<&MollifierSpec>,
        max_order: usize,
        angles: &[f64],
    ) -> Result<(MomentTable, Vec<OrderSolution>)> {
        if angles.len() != max_order + 1 {
            return Err(Error::Shape {
                expected: max_order + 1,
                actual: angles.len(),
            });
        }
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Singular("moment angles must be strictly increasing".into()));
        }
        let mut ams = self.angular_moments(s, max_order, angles)?;
        if s.kind() == SinogramKind::Noisy && m.is_some() {
            // noisy data does not record whether it was mollified first
            ams.provenance = Provenance::Mollified;
        }
        match (ams.provenance(), m) {
            (Provenance::Mollified, Some(m)) => ams = deconvolve_moments(&ams, m)?,
            (Provenance::Mollified, None) => {
                return Err(Error::Misuse("mollified sinogram requires the mollifier that produced it".into()))
            }
            (Provenance::Raw, Some(_)) => {
                return Err(Error::Misuse("a mollifier was given but the sinogram is not mollified".into()))
            }
            (Provenance::Raw, None) => {}
        }
        self.check_consistency(&ams)?;
        let mut table = MomentTable::zeros(max_order);
        let mut solutions = Vec::with_capacity(max_order + 1);
        for k in 0..=max_order {
            let sol = self.solve_moment_system(&ams, k)?;
            for (j, &g) in sol.moments.iter().enumerate() {
                table.set(j, k - j, g)?;
            }
            solutions.push(sol);
        }
        Ok((table, solutions))
    }

    fn check_consistency(&self, ams: &AngularMomentSet) -> Result<()> {
        let b0: Vec<f64> = (0..ams.angles().len()).map(|i| ams.value(i, 0)).collect();
        let mean = b0.iter().sum::<f64>() / b0.len() as f64;
        let lo = b0.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = b0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > self.consistency_tol * mean.abs() + 1e-9 {
            return Err(Error::DataQuality(format!(
                "zeroth angular moment varies from {lo} to {hi} across angles"
            )));
        }
        Ok(())
    }
}

/// Trapezoid weights times `p^k`, one vector per order.
fn power_weights(offsets: &Grid1D, max_order: usize) -> Vec<Vec<f64>> {
    let w = trapezoid_weights(offsets);
    let mut out = Vec::with_capacity(max_order + 1);
    let mut cur = w;
    for k in 0..=max_order {
        if k > 0 {
            cur = cur.iter().zip(offsets.points()).map(|(c, p)| c * p).collect();
        }
        out.push(cur.clone());
    }
    out
}

/// Six-point Lagrange interpolation of angular moments at fractional row index `t`.
fn interpolate_moments(grid: &Grid1D, t: f64, row_moments: &dyn Fn(usize) -> Vec<f64>) -> Result<Vec<f64>> {
    const POINTS: usize = 6;
    let n = grid.count();
    if n < POINTS || t < 0.0 || t > (n - 1) as f64 {
        return Err(Error::domain(format!(
            "angle at row position {t} cannot be interpolated from {n} rows"
        )));
    }
    let first = (t.floor() as isize - (POINTS as isize / 2 - 1)).clamp(0, (n - POINTS) as isize) as usize;
    let rows: Vec<Vec<f64>> = (first..first + POINTS).map(row_moments).collect();
    let mut out = vec![0.0; rows[0].len()];
    for (a, row) in rows.iter().enumerate() {
        let xa = (first + a) as f64;
        let mut l = 1.0;
        for b in 0..POINTS {
            if b != a {
                let xb = (first + b) as f64;
                l *= (t - xb) / (xa - xb);
            }
        }
        for (o, v) in out.iter_mut().zip(row) {
            *o += l * v;
        }
    }
    Ok(out)
}

/// Angular moments with the default order cap.
pub fn angular_moments(s: &Sinogram, max_order: usize, angles: &[f64]) -> Result<AngularMomentSet> {
    MomentRecovery::default().angular_moments(s, max_order, angles)
}

/// Raw angular moments from mollified ones.
pub fn deconvolve_moments(hat: &AngularMomentSet, m: &MollifierSpec) -> Result<AngularMomentSet> {
    if hat.provenance() != Provenance::Mollified {
        return Err(Error::Misuse("angular moments are already raw".into()));
    }
    if m.max_moment() < hat.max_order() {
        return Err(Error::Order {
            requested: hat.max_order(),
            max: m.max_moment(),
        });
    }
    let c = &m.moments()[..=hat.max_order()];
    let values = hat.values.iter().map(|b| deconvolve_row(b, c)).collect::<Result<_>>()?;
    AngularMomentSet::new(hat.angles.clone(), values, Provenance::Raw)
}

/// Mollified angular moments from raw ones and kernel moments `c` (`c_0 = 1`).
pub fn convolve_moments(raw: &AngularMomentSet, c: &[f64]) -> Result<AngularMomentSet> {
    if raw.provenance() != Provenance::Raw {
        return Err(Error::Misuse("angular moments are already mollified".into()));
    }
    if c.len() <= raw.max_order() {
        return Err(Error::Order {
            requested: raw.max_order(),
            max: c.len().saturating_sub(1),
        });
    }
    let values = raw.values.iter().map(|b| convolve_row(b, c)).collect::<Result<_>>()?;
    AngularMomentSet::new(raw.angles.clone(), values, Provenance::Mollified)
}

/// Solves the order-`k` system with the default order cap.
pub fn solve_moment_system(ams: &AngularMomentSet, k: usize) -> Result<Vec<f64>> {
    MomentRecovery::default().solve_moment_system(ams, k).map(|s| s.moments)
}

/// Moment table from a sinogram with the default settings.
pub fn recover_moment_table(
    s: &Sinogram,
    m: Option<&MollifierSpec>,
    max_order: usize,
    angles: &[f64],
) -> Result<MomentTable> {
    MomentRecovery::default()
        .recover_moment_table(s, m, max_order, angles)
        .map(|(t, _)| t)
}

/// `b⁽ᵏ⁾(θ) = Σ_j C(k,j) cos^jθ sin^{k−j}θ γ_{j,k−j}` from a table.
pub fn synthesize_angular_moment(table: &MomentTable, k: usize, theta: f64) -> Result<f64> {
    let (s, c) = theta.sin_cos();
    let mut acc = 0.0;
    for j in 0..=k {
        let g = table.get(j, k - j).ok_or(Error::InsufficientOrder {
            available: table.max_order(),
            required: k,
        })?;
        acc += binomial(k, j)? * c.powi(j as i32) * s.powi((k - j) as i32) * g;
    }
    Ok(acc)
}

/// Largest `|measured − synthesized|` over the angles and orders of `held_out`.
pub fn range_residual(table: &MomentTable, held_out: &AngularMomentSet) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, &theta) in held_out.angles().iter().enumerate() {
        for k in 0..=held_out.max_order().min(table.max_order()) {
            let predicted = synthesize_angular_moment(table, k, theta)?;
            worst = worst.max((predicted - held_out.value(i, k)).abs());
        }
    }
    Ok(worst)
}
