//! Uniform grids, composite trapezoid and Gauss–Legendre rules.

use crate::error::{Error, Result};

/// Uniformly spaced samples `start, start + h, …, start + (count - 1) h`.
///
/// The spacing is stored alongside the end points so a grid rebuilt from
/// `(start, spacing, count)`, as the file readers do, yields bit-identical
/// sample positions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    start: f64,
    stop: f64,
    count: usize,
    spacing: f64,
}

impl Grid1D {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::domain(format!("grid needs at least 2 samples, got {count}")));
        }
        if !start.is_finite() || !stop.is_finite() || stop <= start {
            return Err(Error::domain(format!("grid requires start < stop, got [{start}, {stop}]")));
        }
        let spacing = (stop - start) / (count - 1) as f64;
        Ok(Grid1D {
            start,
            stop,
            count,
            spacing,
        })
    }

    pub fn from_spacing(start: f64, spacing: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::domain(format!("grid needs at least 2 samples, got {count}")));
        }
        if !start.is_finite() || !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::domain(format!("grid spacing must be positive, got {spacing}")));
        }
        Ok(Grid1D {
            start,
            stop: start + spacing * (count - 1) as f64,
            count,
            spacing,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Index of the sample closest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.start) / self.spacing).round();
        if t <= 0.0 {
            0
        } else {
            (t as usize).min(self.count - 1)
        }
    }

    /// Nyquist frequency `π / h` in radians per unit.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing
    }
}

/// Composite trapezoid weights for a grid.
pub fn trapezoid_weights(grid: &Grid1D) -> Vec<f64> {
    let h = grid.spacing();
    let mut w = vec![h; grid.count()];
    w[0] = 0.5 * h;
    w[grid.count() - 1] = 0.5 * h;
    w
}

/// Composite trapezoid rule over `grid`.
pub fn trapezoid_integrate(samples: &[f64], grid: &Grid1D) -> Result<f64> {
    if samples.len() != grid.count() {
        return Err(Error::Shape {
            expected: grid.count(),
            actual: samples.len(),
        });
    }
    let n = samples.len();
    let interior: f64 = samples[1..n - 1].iter().sum();
    Ok(grid.spacing() * (interior + 0.5 * (samples[0] + samples[n - 1])))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Adaptive Gauss–Legendre integration: a panel is accepted once the
/// 20-point rule on it agrees with the sum over its two halves to `tol`.
pub fn adaptive_gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let rule = GaussLegendre::new(20);
    let whole = rule.integrate(a, b, &f);
    adaptive_step(&rule, &f, a, b, whole, tol, 0)
}

fn adaptive_step<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    let refined = left + right;
    if (refined - whole).abs() <= tol || depth >= 40 {
        return refined;
    }
    adaptive_step(rule, f, a, mid, left, 0.5 * tol, depth + 1)
        + adaptive_step(rule, f, mid, b, right, 0.5 * tol, depth + 1)
}

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
