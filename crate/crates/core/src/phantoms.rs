//! Analytic test densities on the unit square with exact moment oracles.

use std::f64::consts::PI;

use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{adaptive_gauss, GaussLegendre};

/// Points this far outside the unit square are still accepted by [`Density::evaluate`].
const DOMAIN_SLACK: f64 = 1e-12;

/// Single monomial term `coeff · x₁^a · x₂^b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub a: u32,
    pub b: u32,
}

/// Constant-amplitude disk inside the unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
}

impl Disk {
    pub fn new(center: [f64; 2], radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("disk radius must be positive, got {radius}")));
        }
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::domain(format!("disk amplitude must be non-negative, got {amplitude}")));
        }
        for c in center {
            if c - radius < -DOMAIN_SLACK || c + radius > 1.0 + DOMAIN_SLACK {
                return Err(Error::domain(format!(
                    "disk at ({}, {}) with radius {radius} leaves the unit square",
                    center[0], center[1]
                )));
            }
        }
        Ok(Disk {
            center,
            radius,
            amplitude,
        })
    }

    /// Disk whose amplitude gives it unit mass.
    pub fn unit_mass(center: [f64; 2], radius: f64) -> Result<Self> {
        Self::new(center, radius, 1.0 / (PI * radius * radius))
    }

    fn contains(&self, x: [f64; 2]) -> bool {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        dx * dx + dy * dy < self.radius * self.radius
    }

    fn chord(&self, theta: f64, p: f64) -> f64 {
        let d = self.center[0] * theta.cos() + self.center[1] * theta.sin() - p;
        let h = self.radius * self.radius - d * d;
        if h > 0.0 {
            2.0 * self.amplitude * h.sqrt()
        } else {
            0.0
        }
    }

    /// `∫_disk x₁^a x₂^b dx` with `x₁ = c₁ + r sin φ`; the x₂ integral is done in closed form.
    fn moment(&self, a: usize, b: usize) -> f64 {
        let [c1, c2] = self.center;
        let r = self.radius;
        let integrand = |phi: f64| {
            let half = r * phi.cos();
            let x1 = c1 + r * phi.sin();
            let inner = ((c2 + half).powi(b as i32 + 1) - (c2 - half).powi(b as i32 + 1)) / (b as f64 + 1.0);
            x1.powi(a as i32) * inner * half
        };
        self.amplitude * adaptive_gauss(integrand, -PI / 2.0, PI / 2.0, 1e-15)
    }

    /// `∫_disk e^{-i⟨x,ξ⟩} dx` as (re, im).
    fn fourier(&self, xi: [f64; 2]) -> (f64, f64) {
        let rho = xi[0].hypot(xi[1]);
        let r = self.radius;
        // Rotate so ξ lies on the first axis; the chord profile is 2√(r²−u²).
        let nodes = 64 + (2.0 * r * rho) as usize;
        let radial = GaussLegendre::new(nodes).integrate(-PI / 2.0, PI / 2.0, |phi| {
            2.0 * r * r * phi.cos().powi(2) * (r * rho * phi.sin()).cos()
        });
        let phase = -(self.center[0] * xi[0] + self.center[1] * xi[1]);
        let mag = self.amplitude * radial;
        (mag * phase.cos(), mag * phase.sin())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DensityKind {
    Uniform,
    Polynomial(Vec<Monomial>),
    Disk(Disk),
    Disks(Vec<Disk>),
}

/// Nonnegative density supported in `[0,1]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    kind: DensityKind,
}

impl Density {
    pub fn uniform() -> Self {
        Density {
            kind: DensityKind::Uniform,
        }
    }

    /// Polynomial density; rejected if it is negative somewhere on the square
    /// (checked on a 101×101 lattice when some coefficient is negative).
    pub fn polynomial(terms: Vec<Monomial>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("polynomial density needs at least one term"));
        }
        if terms.iter().any(|t| !t.coeff.is_finite()) {
            return Err(Error::domain("polynomial coefficients must be finite"));
        }
        let d = Density {
            kind: DensityKind::Polynomial(terms),
        };
        if let DensityKind::Polynomial(ts) = &d.kind {
            if ts.iter().any(|t| t.coeff < 0.0) {
                for i in 0..=100 {
                    for j in 0..=100 {
                        let x = [i as f64 / 100.0, j as f64 / 100.0];
                        if d.value(x) < 0.0 {
                            return Err(Error::domain(format!(
                                "polynomial density is negative at ({}, {})",
                                x[0], x[1]
                            )));
                        }
                    }
                }
            }
        }
        if !(d.exact_moment(0, 0)? > 0.0) {
            return Err(Error::domain("polynomial density has no positive mass"));
        }
        Ok(d)
    }

    /// `f(x) = 4 x₁ x₂`, unit mass.
    pub fn bilinear() -> Self {
        Density {
            kind: DensityKind::Polynomial(vec![Monomial { coeff: 4.0, a: 1, b: 1 }]),
        }
    }

    pub fn disk(disk: Disk) -> Self {
        Density {
            kind: DensityKind::Disk(disk),
        }
    }

    pub fn disks(disks: Vec<Disk>) -> Result<Self> {
        if disks.is_empty() {
            return Err(Error::domain("sum of disks needs at least one disk"));
        }
        Ok(Density {
            kind: DensityKind::Disks(disks),
        })
    }

    /// Centered unit-mass disk of radius 1/4 (amplitude 16/π).
    pub fn reference_disk() -> Self {
        Density::disk(Disk::unit_mass([0.5, 0.5], 0.25).expect("valid reference disk"))
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    fn disk_list(&self) -> &[Disk] {
        match &self.kind {
            DensityKind::Disk(d) => std::slice::from_ref(d),
            DensityKind::Disks(ds) => ds,
            _ => &[],
        }
    }

    /// Value of f at `x`, without domain checking; zero off the square.
    pub fn value(&self, x: [f64; 2]) -> f64 {
        if x[0] < 0.0 || x[0] > 1.0 || x[1] < 0.0 || x[1] > 1.0 {
            return 0.0;
        }
        match &self.kind {
            DensityKind::Uniform => 1.0,
            DensityKind::Polynomial(terms) => terms
                .iter()
                .map(|t| t.coeff * x[0].powi(t.a as i32) * x[1].powi(t.b as i32))
                .sum(),
            DensityKind::Disk(_) | DensityKind::Disks(_) => self
                .disk_list()
                .iter()
                .filter(|d| d.contains(x))
                .map(|d| d.amplitude)
                .sum(),
        }
    }

    /// Value of f at a point of the unit square.
    pub fn evaluate(&self, x: [f64; 2]) -> Result<f64> {
        let inside = |v: f64| (-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&v);
        if !inside(x[0]) || !inside(x[1]) {
            return Err(Error::domain(format!("point ({}, {}) is outside the unit square", x[0], x[1])));
        }
        Ok(self.value([x[0].clamp(0.0, 1.0), x[1].clamp(0.0, 1.0)]))
    }

    /// `γ_{α1,α2} = ∫ x₁^α1 x₂^α2 f(x) dx`.
    pub fn exact_moment(&self, a1: usize, a2: usize) -> Result<f64> {
        Ok(match &self.kind {
            DensityKind::Uniform => 1.0 / ((a1 as f64 + 1.0) * (a2 as f64 + 1.0)),
            DensityKind::Polynomial(terms) => terms
                .iter()
                .map(|t| t.coeff / ((a1 as f64 + t.a as f64 + 1.0) * (a2 as f64 + t.b as f64 + 1.0)))
                .sum(),
            DensityKind::Disk(_) | DensityKind::Disks(_) => {
                self.disk_list().iter().map(|d| d.moment(a1, a2)).sum()
            }
        })
    }

    /// Moment as an exact rational; available for uniform and polynomial densities.
    pub fn exact_moment_rational(&self, a1: usize, a2: usize) -> Result<BigRational> {
        let denom = |a: usize, b: usize| BigRational::from_integer(((a + 1) * (b + 1)).into());
        match &self.kind {
            DensityKind::Uniform => Ok(BigRational::one() / denom(a1, a2)),
            DensityKind::Polynomial(terms) => {
                let mut acc = BigRational::zero();
                for t in terms {
                    let c = BigRational::from_float(t.coeff)
                        .ok_or_else(|| Error::domain("non-finite polynomial coefficient"))?;
                    acc += c / denom(a1 + t.a as usize, a2 + t.b as usize);
                }
                Ok(acc)
            }
            _ => Err(Error::Capability("rational moments need a polynomial density".into())),
        }
    }

    pub fn mass(&self) -> f64 {
        self.exact_moment(0, 0).expect("every built-in kind has moments")
    }

    /// Closed-form `Rf(θ, p)` for uniform and disk densities.
    pub fn analytic_radon(&self, theta: f64, p: f64) -> Result<f64> {
        match &self.kind {
            DensityKind::Uniform => Ok(square_chord(theta, p)),
            DensityKind::Polynomial(_) => Err(Error::Capability(
                "no closed-form line integrals for polynomial densities".into(),
            )),
            DensityKind::Disk(_) | DensityKind::Disks(_) => {
                Ok(self.disk_list().iter().map(|d| d.chord(theta, p)).sum())
            }
        }
    }

    /// Line parameters where the density jumps inside the square, for the line
    /// `base + t·dir` with unit `dir`.
    pub fn interior_breaks(&self, base: [f64; 2], dir: [f64; 2]) -> Vec<f64> {
        let mut out = Vec::new();
        for d in self.disk_list() {
            let wx = base[0] - d.center[0];
            let wy = base[1] - d.center[1];
            let half_b = wx * dir[0] + wy * dir[1];
            let c = wx * wx + wy * wy - d.radius * d.radius;
            let disc = half_b * half_b - c;
            if disc > 0.0 {
                let root = disc.sqrt();
                out.push(-half_b - root);
                out.push(-half_b + root);
            }
        }
        out
    }

    /// Offsets where `p ↦ Rf(θ, p)` fails to be smooth: projected square
    /// corners and disk tangents.
    pub fn offset_breaks(&self, theta: f64) -> Vec<f64> {
        let (s, c) = theta.sin_cos();
        let mut out = vec![0.0, c, s, c + s];
        for d in self.disk_list() {
            let centre = d.center[0] * c + d.center[1] * s;
            out.push(centre - d.radius);
            out.push(centre + d.radius);
        }
        out
    }

    /// Upper bound on `sup f`.
    pub fn sup_norm(&self) -> f64 {
        match &self.kind {
            DensityKind::Uniform => 1.0,
            DensityKind::Polynomial(terms) => terms.iter().map(|t| t.coeff.abs()).sum(),
            DensityKind::Disk(_) | DensityKind::Disks(_) => self.disk_list().iter().map(|d| d.amplitude).sum(),
        }
    }

    /// Upper bound on the modulus of continuity `Δ(f, δ)`; `None` when f is discontinuous.
    pub fn modulus_of_continuity(&self, delta: f64) -> Option<f64> {
        match &self.kind {
            DensityKind::Uniform => Some(0.0),
            DensityKind::Polynomial(terms) => {
                // |∂₁f| ≤ Σ|c|a and |∂₂f| ≤ Σ|c|b on the square
                let g1: f64 = terms.iter().map(|t| t.coeff.abs() * t.a as f64).sum();
                let g2: f64 = terms.iter().map(|t| t.coeff.abs() * t.b as f64).sum();
                Some(g1.hypot(g2) * delta)
            }
            _ => None,
        }
    }

    /// `F₂f(ξ) = (1/2π) ∫ f(x) e^{-i⟨x,ξ⟩} dx` as (re, im).
    pub fn fourier_2d(&self, xi: [f64; 2]) -> (f64, f64) {
        let scale = 1.0 / (2.0 * PI);
        match &self.kind {
            DensityKind::Uniform => {
                let (ar, ai) = unit_interval_transform(xi[0]);
                let (br, bi) = unit_interval_transform(xi[1]);
                (scale * (ar * br - ai * bi), scale * (ar * bi + ai * br))
            }
            DensityKind::Polynomial(_) => {
                let nodes = 48 + xi[0].abs().max(xi[1].abs()) as usize;
                let gl = GaussLegendre::new(nodes);
                let (mut re, mut im) = (0.0, 0.0);
                for (u, wu) in gl.nodes().iter().zip(gl.weights()) {
                    let x1 = 0.5 * (u + 1.0);
                    for (v, wv) in gl.nodes().iter().zip(gl.weights()) {
                        let x2 = 0.5 * (v + 1.0);
                        let w = 0.25 * wu * wv * self.value([x1, x2]);
                        let phase = -(x1 * xi[0] + x2 * xi[1]);
                        re += w * phase.cos();
                        im += w * phase.sin();
                    }
                }
                (scale * re, scale * im)
            }
            DensityKind::Disk(_) | DensityKind::Disks(_) => {
                let (mut re, mut im) = (0.0, 0.0);
                for d in self.disk_list() {
                    let (r, i) = d.fourier(xi);
                    re += r;
                    im += i;
                }
                (scale * re, scale * im)
            }
        }
    }
}

/// Triangular table of moments `γ_{α1,α2}`, `α1 + α2 ≤ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    max_order: usize,
    values: Vec<f64>,
}

impl MomentTable {
    pub fn zeros(max_order: usize) -> Self {
        MomentTable {
            max_order,
            values: vec![0.0; (max_order + 1) * (max_order + 2) / 2],
        }
    }

    /// Exact moments of `d` up to order `max_order`.
    pub fn from_density(d: &Density, max_order: usize) -> Result<Self> {
        let mut t = Self::zeros(max_order);
        for k in 0..=max_order {
            for a1 in 0..=k {
                t.set(a1, k - a1, d.exact_moment(a1, k - a1)?)?;
            }
        }
        Ok(t)
    }

    fn index(&self, a1: usize, a2: usize) -> Option<usize> {
        let k = a1 + a2;
        (k <= self.max_order).then(|| k * (k + 1) / 2 + a1)
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn get(&self, a1: usize, a2: usize) -> Option<f64> {
        self.index(a1, a2).map(|i| self.values[i])
    }

    pub fn set(&mut self, a1: usize, a2: usize, value: f64) -> Result<()> {
        let i = self.index(a1, a2).ok_or(Error::Order {
            requested: a1 + a2,
            max: self.max_order,
        })?;
        self.values[i] = value;
        Ok(())
    }

    /// `(α1, α2, γ)` by increasing order, then increasing α1.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..=self.max_order).flat_map(move |k| (0..=k).map(move |a1| (a1, k - a1, self.values[k * (k + 1) / 2 + a1])))
    }

    /// `a·self + b·other` on the common orders.
    pub fn combine(&self, a: f64, other: &MomentTable, b: f64) -> MomentTable {
        let k = self.max_order.min(other.max_order);
        let n = (k + 1) * (k + 2) / 2;
        MomentTable {
            max_order: k,
            values: (0..n).map(|i| a * self.values[i] + b * other.values[i]).collect(),
        }
    }

    /// Largest absolute entrywise difference on the common orders.
    pub fn max_abs_diff(&self, other: &MomentTable) -> f64 {
        self.combine(1.0, other, -1.0).values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `∫₀¹ e^{-iωt} dt`.
fn unit_interval_transform(w: f64) -> (f64, f64) {
    if w.abs() < 1e-8 {
        return (1.0 - w * w / 6.0, -w / 2.0);
    }
    (w.sin() / w, (w.cos() - 1.0) / w)
}

/// Length of the intersection of the line `⟨x, ω(θ)⟩ = p` with the unit square.
pub fn square_chord(theta: f64, p: f64) -> f64 {
    match clip_to_square([p * theta.cos(), p * theta.sin()], [-theta.sin(), theta.cos()]) {
        Some((t0, t1)) => t1 - t0,
        None => 0.0,
    }
}

/// Parameter interval where `base + t·dir` lies in the unit square.
pub fn clip_to_square(base: [f64; 2], dir: [f64; 2]) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for axis in 0..2 {
        if dir[axis].abs() < 1e-15 {
            if base[axis] < 0.0 || base[axis] > 1.0 {
                return None;
            }
        } else {
            let a = (0.0 - base[axis]) / dir[axis];
            let b = (1.0 - base[axis]) / dir[axis];
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
    }
    (hi > lo).then_some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{trapezoid_integrate, Grid1D};
    use num::ToPrimitive;
    use proptest::prelude::*;

    fn shipped() -> Vec<Density> {
        vec![
            Density::uniform(),
            Density::bilinear(),
            Density::reference_disk(),
            Density::disks(vec![
                Disk::new([0.3, 0.35], 0.15, 4.0).unwrap(),
                Disk::new([0.65, 0.6], 0.2, 5.0).unwrap(),
            ])
            .unwrap(),
        ]
    }

    /// Independent 2-D oracle: polar coordinates around the disk centre, tensor Gauss–Legendre.
    fn disk_moment_polar(d: &Disk, a: usize, b: usize) -> f64 {
        let gl = GaussLegendre::new(80);
        let mut acc = 0.0;
        for (u, wu) in gl.nodes().iter().zip(gl.weights()) {
            let rho = 0.5 * d.radius * (u + 1.0);
            for (v, wv) in gl.nodes().iter().zip(gl.weights()) {
                let phi = PI * (v + 1.0);
                let x1 = d.center[0] + rho * phi.cos();
                let x2 = d.center[1] + rho * phi.sin();
                acc += 0.5 * d.radius * PI * wu * wv * rho * x1.powi(a as i32) * x2.powi(b as i32);
            }
        }
        d.amplitude * acc
    }

    #[test]
    fn closed_form_moments() {
        assert_eq!(Density::uniform().exact_moment(0, 0).unwrap(), 1.0);
        assert_eq!(Density::uniform().exact_moment(1, 1).unwrap(), 0.25);
        assert!((Density::bilinear().exact_moment(1, 1).unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert!((Density::bilinear().exact_moment(0, 2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rational_moments_agree() {
        for d in [Density::uniform(), Density::bilinear()] {
            for a in 0..6 {
                for b in 0..6 {
                    let r = d.exact_moment_rational(a, b).unwrap().to_f64().unwrap();
                    assert!((r - d.exact_moment(a, b).unwrap()).abs() < 1e-15);
                }
            }
        }
        assert_eq!(
            Density::bilinear().exact_moment_rational(1, 1).unwrap(),
            BigRational::new(4.into(), 9.into())
        );
        assert!(matches!(
            Density::reference_disk().exact_moment_rational(0, 0),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn disk_moments_match_polar_oracle() {
        let disks = [
            Disk::unit_mass([0.5, 0.5], 0.25).unwrap(),
            Disk::new([0.3, 0.7], 0.2, 2.5).unwrap(),
        ];
        for d in disks {
            let dens = Density::disk(d);
            for a in 0..5 {
                for b in 0..5 {
                    let got = dens.exact_moment(a, b).unwrap();
                    let oracle = disk_moment_polar(&d, a, b);
                    assert!((got - oracle).abs() < 1e-12, "({a},{b}) {got} vs {oracle}");
                }
            }
        }
        assert!((Density::reference_disk().mass() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(Density::uniform().evaluate([0.3, 0.7]).unwrap(), 1.0);
        let disk = Density::reference_disk();
        assert!((disk.evaluate([0.5, 0.5]).unwrap() - 16.0 / PI).abs() < 1e-14);
        assert_eq!(disk.evaluate([0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(disk.evaluate([1.2, 0.5]), Err(Error::Domain(_))));
        assert!(Density::uniform().evaluate([1.0, 1.0]).is_ok());
    }

    #[test]
    fn analytic_radon_examples() {
        let u = Density::uniform();
        assert!((u.analytic_radon(PI / 2.0, 0.5).unwrap() - 1.0).abs() < 1e-14);
        assert!((u.analytic_radon(PI / 4.0, 0.5f64.sqrt()).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let disk = Density::reference_disk();
        let center_p = 0.5 * (0.3f64.cos() + 0.3f64.sin());
        assert!((disk.analytic_radon(0.3, center_p).unwrap() - 8.0 / PI).abs() < 1e-13);
        for d in shipped() {
            if let Ok(v) = d.analytic_radon(0.0, 1.5) {
                assert_eq!(v, 0.0);
            }
            assert_eq!(d.analytic_radon(1.0, 1.5).unwrap_or(0.0), 0.0);
        }
        assert!(matches!(
            Density::bilinear().analytic_radon(0.0, 0.5),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn mass_conservation_of_line_integrals() {
        let grid = Grid1D::new(-1.6, 1.6, 100_001).unwrap();
        for d in [Density::uniform(), Density::reference_disk()] {
            for theta in [0.1, 0.7, 1.3, 2.0, 2.9, 4.0] {
                let row: Vec<f64> = grid.points().map(|p| d.analytic_radon(theta, p).unwrap()).collect();
                let mass = trapezoid_integrate(&row, &grid).unwrap();
                assert!((mass - d.mass()).abs() < 1e-6, "θ={theta}: {mass}");
            }
        }
    }

    #[test]
    fn numerical_mass_matches_moment() {
        let gl = GaussLegendre::new(400);
        for d in shipped() {
            let mut acc = 0.0;
            // midpoint sums converge slowly at disk edges; use a fine product rule on the polynomial
            // kinds and polar quadrature on disks instead
            match d.kind() {
                DensityKind::Disk(_) | DensityKind::Disks(_) => {
                    for disk in d.disk_list() {
                        acc += disk_moment_polar(disk, 0, 0);
                    }
                }
                _ => {
                    for (u, wu) in gl.nodes().iter().zip(gl.weights()) {
                        for (v, wv) in gl.nodes().iter().zip(gl.weights()) {
                            acc += 0.25 * wu * wv * d.value([0.5 * (u + 1.0), 0.5 * (v + 1.0)]);
                        }
                    }
                }
            }
            assert!((acc - d.exact_moment(0, 0).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn constructors_validate() {
        assert!(Disk::new([0.1, 0.5], 0.2, 1.0).is_err());
        assert!(Disk::new([0.5, 0.5], -0.1, 1.0).is_err());
        assert!(Density::polynomial(vec![Monomial { coeff: -1.0, a: 1, b: 0 }]).is_err());
        assert!(Density::polynomial(vec![
            Monomial { coeff: 1.0, a: 0, b: 0 },
            Monomial { coeff: -0.5, a: 1, b: 1 },
        ])
        .is_ok());
    }

    #[test]
    fn fourier_at_zero_is_mass_over_two_pi() {
        for d in shipped() {
            let (re, im) = d.fourier_2d([0.0, 0.0]);
            assert!((re - d.mass() / (2.0 * PI)).abs() < 1e-12 && im.abs() < 1e-14);
        }
    }

    #[test]
    fn disk_fourier_matches_uniform_style_quadrature() {
        // brute-force polar quadrature of e^{-i⟨x,ξ⟩} over the reference disk
        let d = Disk::unit_mass([0.5, 0.5], 0.25).unwrap();
        let gl = GaussLegendre::new(120);
        for xi in [[3.0, -1.0], [10.0, 4.0], [-25.0, 12.0]] {
            let (mut re, mut im) = (0.0, 0.0);
            for (u, wu) in gl.nodes().iter().zip(gl.weights()) {
                let rho = 0.5 * d.radius * (u + 1.0);
                for (v, wv) in gl.nodes().iter().zip(gl.weights()) {
                    let phi = PI * (v + 1.0);
                    let x1 = d.center[0] + rho * phi.cos();
                    let x2 = d.center[1] + rho * phi.sin();
                    let w = 0.5 * d.radius * PI * wu * wv * rho * d.amplitude;
                    re += w * (-(x1 * xi[0] + x2 * xi[1])).cos();
                    im += w * (-(x1 * xi[0] + x2 * xi[1])).sin();
                }
            }
            let (gr, gi) = d.fourier(xi);
            assert!((gr - re).abs() < 1e-10 && (gi - im).abs() < 1e-10, "{xi:?}");
        }
    }

    #[test]
    fn interior_breaks_hit_the_circle() {
        let d = Density::reference_disk();
        let breaks = d.interior_breaks([0.0, 0.5], [1.0, 0.0]);
        assert_eq!(breaks.len(), 2);
        assert!((breaks[0] - 0.25).abs() < 1e-14 && (breaks[1] - 0.75).abs() < 1e-14);
        assert!(Density::uniform().interior_breaks([0.0, 0.5], [1.0, 0.0]).is_empty());
    }

    #[test]
    fn moment_table_layout() {
        let t = MomentTable::from_density(&Density::uniform(), 3).unwrap();
        assert_eq!(t.entries().count(), 10);
        assert_eq!(t.get(1, 1), Some(0.25));
        assert_eq!(t.get(2, 2), None);
        let mut z = MomentTable::zeros(2);
        assert!(z.set(2, 1, 1.0).is_err());
        z.set(0, 2, 0.5).unwrap();
        assert_eq!(z.entries().nth(3), Some((0, 2, 0.5)));
        assert!((t.max_abs_diff(&t.combine(2.0, &t, -1.0))).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn moments_are_monotone(a in 0usize..10, b in 0usize..10, which in 0usize..4) {
            let d = &shipped()[which];
            let g = d.exact_moment(a, b).unwrap();
            prop_assert!(d.exact_moment(a + 1, b).unwrap() <= g + 1e-15);
            prop_assert!(d.exact_moment(a, b + 1).unwrap() <= g + 1e-15);
            prop_assert!(g <= d.sup_norm() / ((a as f64 + 1.0) * (b as f64 + 1.0)) + 1e-15);
        }

        #[test]
        fn values_are_nonnegative(x in 0.0f64..=1.0, y in 0.0f64..=1.0, which in 0usize..4) {
            prop_assert!(shipped()[which].evaluate([x, y]).unwrap() >= 0.0);
        }
    }
}
