//! Density approximation from finitely many moments:
//!
//! `app(f)(x) = (m+1)C(m,r₁) (n+1)C(n,r₂) Σ_{α1≤m−r₁} Σ_{α2≤n−r₂}
//!     (−1)^{α1+α2} C(m−r₁,α1) C(n−r₂,α2) γ_{α1+r₁, α2+r₂}`
//!
//! with `r₁ = ⌊m x₁⌋`, `r₂ = ⌊n x₂⌋` clamped to `m`, `n`.
//!
//! The alternating sum loses roughly `log₁₀[(m+1)C(m,r)2^{m−r}]` digits per
//! axis in floating point. For densities with rational moments an exact
//! evaluation is provided as well.

use std::collections::HashMap;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::quadrature::CompensatedSum;
use crate::numerics::special::log_gamma;
use crate::phantoms::{Density, MomentTable};

/// Default cap on `m` and `n` for the floating-point evaluation.
pub const DEFAULT_STABILITY_CAP: usize = 40;

/// Image on the `N × N` pixel centres `((i + ½)/N, (j + ½)/N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconGrid {
    resolution: usize,
    /// Row `j` holds the pixels with `x₂ = (j + ½)/N`.
    values: Vec<f64>,
    orders: Option<(usize, usize)>,
}

impl ReconGrid {
    pub fn new(resolution: usize, values: Vec<f64>, orders: Option<(usize, usize)>) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::domain("resolution must be positive"));
        }
        if values.len() != resolution * resolution {
            return Err(Error::Shape {
                expected: resolution * resolution,
                actual: values.len(),
            });
        }
        Ok(ReconGrid {
            resolution,
            values,
            orders,
        })
    }

    /// Samples `d` at the pixel centres.
    pub fn from_density(d: &Density, resolution: usize) -> Result<Self> {
        let values = pixel_centres(resolution).map(|x| d.value(x)).collect();
        Self::new(resolution, values, None)
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn orders(&self) -> Option<(usize, usize)> {
        self.orders
    }

    /// Pixel `(i, j)`: `i` along x₁, `j` along x₂.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.resolution + i]
    }

    /// Pixel-centre point of pixel `(i, j)`.
    pub fn centre(&self, i: usize, j: usize) -> [f64; 2] {
        let n = self.resolution as f64;
        [(i as f64 + 0.5) / n, (j as f64 + 0.5) / n]
    }

    /// Midpoint-rule integral over the unit square.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / (self.resolution * self.resolution) as f64
    }

    /// `‖self − other‖₂ / ‖other‖₂` over pixel values.
    pub fn relative_l2_to(&self, other: &ReconGrid) -> Result<f64> {
        if other.resolution != self.resolution {
            return Err(Error::Shape {
                expected: self.resolution,
                actual: other.resolution,
            });
        }
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = other.values.iter().map(|b| b * b).sum();
        Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
    }
}

fn pixel_centres(n: usize) -> impl Iterator<Item = [f64; 2]> {
    let nf = n as f64;
    (0..n).flat_map(move |j| (0..n).map(move |i| [(i as f64 + 0.5) / nf, (j as f64 + 0.5) / nf]))
}

/// `⌊m x⌋` clamped to `m`.
pub fn cell_index(m: usize, x: f64) -> usize {
    ((m as f64 * x).floor().max(0.0) as usize).min(m)
}

/// Evaluator for `app(f)` in double precision.
#[derive(Clone, Copy, Debug)]
pub struct Approximation {
    pub m: usize,
    pub n: usize,
    pub stability_cap: usize,
}

impl Approximation {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        Self::with_cap(m, n, DEFAULT_STABILITY_CAP)
    }

    pub fn with_cap(m: usize, n: usize, cap: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::domain("orders m and n must be positive"));
        }
        if m > cap || n > cap {
            return Err(Error::Stability { m, n, cap });
        }
        Ok(Approximation {
            m,
            n,
            stability_cap: cap,
        })
    }

    fn check_table(&self, gamma: &MomentTable) -> Result<()> {
        if gamma.max_order() < self.m + self.n {
            return Err(Error::InsufficientOrder {
                available: gamma.max_order(),
                required: self.m + self.n,
            });
        }
        Ok(())
    }

    /// Value on the cell `(r₁, r₂)`.
    ///
    /// Magnitudes of the combinatorial weights are formed from log-Gamma,
    /// positive and negative contributions are accumulated separately with
    /// compensated sums, and combined once.
    fn cell_value(&self, gamma: &MomentTable, r1: usize, r2: usize) -> Result<f64> {
        let (m, n) = (self.m, self.n);
        let lg = |x: usize| log_gamma(x as f64 + 1.0);
        // ln[(m+1) C(m,r) C(m−r,α)] = ln Γ(m+2) − ln Γ(r+1) − ln Γ(α+1) − ln Γ(m−r−α+1)
        let prefix1 = log_gamma(m as f64 + 2.0)? - lg(r1)?;
        let prefix2 = log_gamma(n as f64 + 2.0)? - lg(r2)?;
        let w1 = (0..=m - r1)
            .map(|a| Ok(prefix1 - lg(a)? - lg(m - r1 - a)?))
            .collect::<Result<Vec<_>>>()?;
        let w2 = (0..=n - r2)
            .map(|a| Ok(prefix2 - lg(a)? - lg(n - r2 - a)?))
            .collect::<Result<Vec<_>>>()?;
        let mut positive = CompensatedSum::default();
        let mut negative = CompensatedSum::default();
        for (a1, l1) in w1.iter().enumerate() {
            for (a2, l2) in w2.iter().enumerate() {
                let g = gamma.get(a1 + r1, a2 + r2).expect("order checked");
                if g == 0.0 {
                    continue;
                }
                let term = (l1 + l2).exp() * g.abs();
                let negative_sign = ((a1 + a2) % 2 == 1) != (g < 0.0);
                if negative_sign {
                    negative.add(term);
                } else {
                    positive.add(term);
                }
            }
        }
        Ok(positive.value() - negative.value())
    }

    /// `app(f)(x)`.
    pub fn evaluate(&self, gamma: &MomentTable, x: [f64; 2]) -> Result<f64> {
        check_point(x)?;
        self.check_table(gamma)?;
        self.cell_value(gamma, cell_index(self.m, x[0]), cell_index(self.n, x[1]))
    }

    /// `app(f)` at every pixel centre.
    pub fn reconstruct_grid(&self, gamma: &MomentTable, resolution: usize) -> Result<ReconGrid> {
        self.check_table(gamma)?;
        let cells = distinct_cells(self.m, self.n, resolution);
        let values: HashMap<(usize, usize), f64> = cells
            .par_iter()
            .map(|&(r1, r2)| self.cell_value(gamma, r1, r2).map(|v| ((r1, r2), v)))
            .collect::<Result<_>>()?;
        let pixels = pixel_centres(resolution)
            .map(|x| values[&(cell_index(self.m, x[0]), cell_index(self.n, x[1]))])
            .collect();
        ReconGrid::new(resolution, pixels, Some((self.m, self.n)))
    }
}

fn check_point(x: [f64; 2]) -> Result<()> {
    if !(0.0..=1.0).contains(&x[0]) || !(0.0..=1.0).contains(&x[1]) {
        return Err(Error::domain(format!("point ({}, {}) is outside the unit square", x[0], x[1])));
    }
    Ok(())
}

fn distinct_cells(m: usize, n: usize, resolution: usize) -> Vec<(usize, usize)> {
    let mut cells: Vec<(usize, usize)> = pixel_centres(resolution)
        .map(|x| (cell_index(m, x[0]), cell_index(n, x[1])))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells
}

/// `app(f)(x)` with the default stability cap.
pub fn app_f(gamma: &MomentTable, m: usize, n: usize, x: [f64; 2]) -> Result<f64> {
    Approximation::new(m, n)?.evaluate(gamma, x)
}

/// `app(f)` on the `N × N` pixel centres with the default stability cap.
pub fn reconstruct_grid(gamma: &MomentTable, m: usize, n: usize, resolution: usize) -> Result<ReconGrid> {
    Approximation::new(m, n)?.reconstruct_grid(gamma, resolution)
}

/// Moment table with exact rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMomentTable {
    max_order: usize,
    values: Vec<BigRational>,
}

impl RationalMomentTable {
    pub fn from_density(d: &Density, max_order: usize) -> Result<Self> {
        let mut values = Vec::with_capacity((max_order + 1) * (max_order + 2) / 2);
        for k in 0..=max_order {
            for a1 in 0..=k {
                values.push(d.exact_moment_rational(a1, k - a1)?);
            }
        }
        Ok(RationalMomentTable { max_order, values })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn get(&self, a1: usize, a2: usize) -> Option<&BigRational> {
        let k = a1 + a2;
        (k <= self.max_order).then(|| &self.values[k * (k + 1) / 2 + a1])
    }
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::from(1u32)];
    for j in 0..n {
        let next = &row[j] * BigInt::from(n - j) / BigInt::from(j + 1);
        row.push(next);
    }
    row
}

/// Exact value of `app(f)` on cell `(r₁, r₂)`, rounded to `f64` at the end.
fn exact_cell_value(gamma: &RationalMomentTable, m: usize, n: usize, r1: usize, r2: usize) -> f64 {
    let c1 = binomial_row(m - r1);
    let c2 = binomial_row(n - r2);
    let mut total = BigRational::zero();
    for (a1, w1) in c1.iter().enumerate() {
        let mut inner = BigRational::zero();
        for (a2, w2) in c2.iter().enumerate() {
            let term = gamma.get(a1 + r1, a2 + r2).expect("order checked") * BigRational::from_integer(w2.clone());
            if a2 % 2 == 0 {
                inner += term;
            } else {
                inner -= term;
            }
        }
        inner *= BigRational::from_integer(w1.clone());
        if a1 % 2 == 0 {
            total += inner;
        } else {
            total -= inner;
        }
    }
    let prefix = BigInt::from(m + 1) * &binomial_row(m)[r1] * BigInt::from(n + 1) * &binomial_row(n)[r2];
    (total * BigRational::from_integer(prefix)).to_f64().unwrap_or(f64::NAN)
}

/// Exact-arithmetic `app(f)(x)`; no stability cap applies.
pub fn app_f_exact(gamma: &RationalMomentTable, m: usize, n: usize, x: [f64; 2]) -> Result<f64> {
    check_point(x)?;
    check_exact(gamma, m, n)?;
    Ok(exact_cell_value(gamma, m, n, cell_index(m, x[0]), cell_index(n, x[1])))
}

fn check_exact(gamma: &RationalMomentTable, m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::domain("orders m and n must be positive"));
    }
    if gamma.max_order() < m + n {
        return Err(Error::InsufficientOrder {
            available: gamma.max_order(),
            required: m + n,
        });
    }
    Ok(())
}

/// Exact-arithmetic `app(f)` on the pixel centres.
pub fn reconstruct_grid_exact(gamma: &RationalMomentTable, m: usize, n: usize, resolution: usize) -> Result<ReconGrid> {
    check_exact(gamma, m, n)?;
    let cells = distinct_cells(m, n, resolution);
    let values: HashMap<(usize, usize), f64> = cells
        .par_iter()
        .map(|&(r1, r2)| ((r1, r2), exact_cell_value(gamma, m, n, r1, r2)))
        .collect();
    let pixels = pixel_centres(resolution)
        .map(|x| values[&(cell_index(m, x[0]), cell_index(n, x[1]))])
        .collect();
    ReconGrid::new(resolution, pixels, Some((m, n)))
}

/// Inputs of the uniform error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInputs {
    pub sup_norm: f64,
    pub modulus: f64,
    pub delta: f64,
    pub m: usize,
    pub n: usize,
}

/// `Δ(f,δ) + 4‖f‖/(δ²(α*+2)) + 2‖f‖/(δ⁴(m+2)(n+2))`, `α* = min(m, n)`.
pub fn uniform_error_bound(b: BoundInputs) -> Result<f64> {
    if !(b.delta > 0.0) {
        return Err(Error::domain(format!("δ must be positive, got {}", b.delta)));
    }
    if b.sup_norm < 0.0 || b.modulus < 0.0 {
        return Err(Error::domain("norm and modulus must be non-negative"));
    }
    let alpha = b.m.min(b.n) as f64;
    let d2 = b.delta * b.delta;
    Ok(b.modulus
        + 4.0 * b.sup_norm / (d2 * (alpha + 2.0))
        + 2.0 * b.sup_norm / (d2 * d2 * (b.m as f64 + 2.0) * (b.n as f64 + 2.0)))
}

/// `δ ∈ {0.05, 0.10, …, 0.50}`.
pub fn standard_deltas() -> Vec<f64> {
    (1..=10).map(|i| 0.05 * i as f64).collect()
}

/// Smallest bound over `deltas` with the density's own modulus; `None` when
/// the density is discontinuous. Returns `(bound, δ)`.
pub fn min_bound_over_delta(d: &Density, m: usize, n: usize, deltas: &[f64]) -> Result<Option<(f64, f64)>> {
    let mut best: Option<(f64, f64)> = None;
    for &delta in deltas {
        let Some(modulus) = d.modulus_of_continuity(delta) else {
            return Ok(None);
        };
        let bound = uniform_error_bound(BoundInputs {
            sup_norm: d.sup_norm(),
            modulus,
            delta,
            m,
            n,
        })?;
        if best.is_none_or(|(b, _)| bound < b) {
            best = Some((bound, delta));
        }
    }
    Ok(best)
}

/// `max |rec − f|` over the pixel centres.
pub fn sup_error(rec: &ReconGrid, d: &Density) -> f64 {
    let n = rec.resolution();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            worst = worst.max((rec.get(i, j) - d.value(rec.centre(i, j))).abs());
        }
    }
    worst
}
