//! Structured linear solvers: scaled Vandermonde systems in cotangent nodes
//! and lower-triangular systems.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::special::binomial;

/// Default cap on the moment order handled in double precision.
pub const DEFAULT_MAX_ORDER: usize = 12;

/// Vandermonde matrix `V[i][j] = t_i^j` with nodes `t_i = cot θ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentVandermonde {
    nodes: Vec<f64>,
}

impl CotangentVandermonde {
    /// Builds the nodes from strictly increasing angles in `(0, π)`.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::domain("at least one angle is required"));
        }
        for (i, &theta) in angles.iter().enumerate() {
            if !(theta > 0.0 && theta < PI) {
                return Err(Error::domain(format!("angle {theta} is outside (0, π)")));
            }
            if i > 0 && theta <= angles[i - 1] {
                return Err(Error::Singular(format!(
                    "angles must be strictly increasing; {} follows {}",
                    theta,
                    angles[i - 1]
                )));
            }
        }
        Self::from_nodes(angles.iter().map(|t| t.cos() / t.sin()).collect())
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::domain("at least one node is required"));
        }
        for i in 0..nodes.len() {
            for j in 0..i {
                let scale = nodes[i].abs().max(nodes[j].abs()).max(1.0);
                if (nodes[i] - nodes[j]).abs() <= 1e-14 * scale {
                    return Err(Error::Singular(format!(
                        "nodes {i} and {j} coincide ({})",
                        nodes[i]
                    )));
                }
            }
        }
        Ok(CotangentVandermonde { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Polynomial order `k` (the matrix is `(k + 1) × (k + 1)`).
    pub fn order(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `∏_{i<j} (t_j - t_i)`.
    pub fn determinant(&self) -> f64 {
        let mut det = 1.0;
        for j in 0..self.nodes.len() {
            for i in 0..j {
                det *= self.nodes[j] - self.nodes[i];
            }
        }
        det
    }
}

/// Björck–Pereyra solver for `diag(r) · V · diag(c) x = b`.
#[derive(Clone, Copy, Debug)]
pub struct VandermondeSolver {
    pub max_order: usize,
}

impl Default for VandermondeSolver {
    fn default() -> Self {
        VandermondeSolver {
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl VandermondeSolver {
    pub fn with_max_order(max_order: usize) -> Self {
        VandermondeSolver { max_order }
    }

    /// Solves the moment system `diag(row_scales) · V · diag(C(k, j)) x = rhs`.
    pub fn solve(&self, v: &CotangentVandermonde, rhs: &[f64], row_scales: &[f64]) -> Result<Vec<f64>> {
        let k = v.order();
        let col_scales = (0..=k).map(|j| binomial(k, j)).collect::<Result<Vec<_>>>()?;
        self.solve_scaled(v, rhs, row_scales, &col_scales)
    }

    /// Solves `diag(row_scales) · V · diag(col_scales) x = rhs`.
    ///
    /// The diagonal scalings are removed first; the remaining plain
    /// Vandermonde system is the interpolation problem `Σ_j y_j t_i^j = z_i`,
    /// solved by Newton divided differences followed by the conversion of
    /// the Newton form to monomial coefficients.
    ///
    /// Cotangent nodes of both signs and widely different sizes make that
    /// factorisation lose accuracy the scaled system itself does not have, so
    /// the result is polished by iterative refinement against the scaled
    /// system.
    pub fn solve_scaled(
        &self,
        v: &CotangentVandermonde,
        rhs: &[f64],
        row_scales: &[f64],
        col_scales: &[f64],
    ) -> Result<Vec<f64>> {
        let n = v.nodes.len();
        let order = n - 1;
        if order > self.max_order {
            return Err(Error::Order {
                requested: order,
                max: self.max_order,
            });
        }
        for len in [rhs.len(), row_scales.len(), col_scales.len()] {
            if len != n {
                return Err(Error::Shape {
                    expected: n,
                    actual: len,
                });
            }
        }
        if let Some(i) = row_scales.iter().chain(col_scales).position(|&s| s == 0.0 || !s.is_finite()) {
            return Err(Error::Singular(format!("zero or non-finite diagonal scale at position {i}")));
        }

        let t = &v.nodes;
        let unscaled = |b: &[f64]| -> Result<Vec<f64>> {
            let mut c: Vec<f64> = b.iter().zip(row_scales).map(|(b, r)| b / r).collect();
            bjorck_pereyra(t, &mut c)?;
            Ok(c.iter().zip(col_scales).map(|(y, s)| y / s).collect())
        };
        let mut x = unscaled(rhs)?;
        for _ in 0..REFINEMENT_STEPS {
            let residual: Vec<f64> = (0..n)
                .map(|i| {
                    let p = (0..n).rev().fold(0.0, |acc, j| acc * t[i] + col_scales[j] * x[j]);
                    rhs[i] - row_scales[i] * p
                })
                .collect();
            for (x, d) in x.iter_mut().zip(unscaled(&residual)?) {
                *x += d;
            }
        }
        Ok(x)
    }
}

const REFINEMENT_STEPS: usize = 2;

/// In-place solve of `Σ_j y_j t_i^j = c_i`.
fn bjorck_pereyra(t: &[f64], c: &mut [f64]) -> Result<()> {
    let order = t.len() - 1;
    for k in 0..order {
        for i in (k + 1..=order).rev() {
            let denom = t[i] - t[i - k - 1];
            if denom == 0.0 {
                return Err(Error::Singular(format!("duplicate node {}", t[i])));
            }
            c[i] = (c[i] - c[i - 1]) / denom;
        }
    }
    for k in (0..order).rev() {
        for i in k..order {
            c[i] -= t[k] * c[i + 1];
        }
    }
    Ok(())
}

/// Solves the moment system with the default order cap.
pub fn solve_vandermonde_system(v: &CotangentVandermonde, rhs: &[f64], row_scales: &[f64]) -> Result<Vec<f64>> {
    VandermondeSolver::default().solve(v, rhs, row_scales)
}

/// Square lower-triangular matrix stored row-packed.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangularMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl LowerTriangularMatrix {
    pub fn zeros(order: usize) -> Self {
        LowerTriangularMatrix {
            order,
            entries: vec![0.0; order * (order + 1) / 2],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from full square rows, rejecting non-zero entries above the diagonal.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        let mut m = Self::zeros(order);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::Shape {
                    expected: order,
                    actual: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if j > i {
                    if v != 0.0 {
                        return Err(Error::domain(format!("entry ({i},{j}) above the diagonal is {v}")));
                    }
                } else {
                    m.set(i, j, v);
                }
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn offset(i: usize, j: usize) -> usize {
        i * (i + 1) / 2 + j
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.order && j < self.order);
        if j > i {
            0.0
        } else {
            self.entries[Self::offset(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(j <= i && i < self.order, "({i},{j}) is not in the lower triangle");
        self.entries[Self::offset(i, j)] = value;
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.order {
            return Err(Error::Shape {
                expected: self.order,
                actual: x.len(),
            });
        }
        Ok((0..self.order)
            .map(|i| (0..=i).map(|j| self.get(i, j) * x[j]).sum())
            .collect())
    }

    pub fn determinant(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).product()
    }
}

/// Forward substitution for `L x = rhs`.
pub fn solve_lower_triangular(l: &LowerTriangularMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != l.order() {
        return Err(Error::Shape {
            expected: l.order(),
            actual: rhs.len(),
        });
    }
    let mut x = Vec::with_capacity(rhs.len());
    for i in 0..l.order() {
        let diag = l.get(i, i);
        if diag == 0.0 {
            return Err(Error::Singular(format!("zero diagonal entry at row {i}")));
        }
        let mut acc = rhs[i];
        for (j, xj) in x.iter().enumerate() {
            acc -= l.get(i, j) * xj;
        }
        x.push(acc / diag);
    }
    Ok(x)
}
