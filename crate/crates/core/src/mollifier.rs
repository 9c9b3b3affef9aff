//! Symmetric compactly supported mollifiers `φ_ε(t) = φ(t/ε)/ε`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::linalg::DEFAULT_MAX_ORDER;
use crate::numerics::quadrature::GaussLegendre;

/// `∫_{-1}^{1} e^{-1/(1-t²)} dt`.
pub const BUMP_NORMALIZER: f64 = 0.443_993_816_168_079_3;

const MOMENT_NODES: usize = 200;
const TABULATED_SAMPLES: usize = 257;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// `e^{-1/(1-t²)}` on `(-1, 1)`, normalized.
    Bump,
    /// `(1 + cos πt)/2` on `[-1, 1]`.
    TruncatedCosine,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Bump => "bump",
            KernelKind::TruncatedCosine => "truncated-cosine",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "bump" => Ok(KernelKind::Bump),
            "truncated-cosine" | "cosine" => Ok(KernelKind::TruncatedCosine),
            other => Err(Error::Config(format!("unknown mollifier kernel '{other}'"))),
        }
    }

    /// Unit-width kernel, zero outside `(-1, 1)`.
    pub fn base(self, t: f64) -> f64 {
        if t.abs() >= 1.0 {
            return 0.0;
        }
        match self {
            KernelKind::Bump => (-1.0 / (1.0 - t * t)).exp() / BUMP_NORMALIZER,
            KernelKind::TruncatedCosine => 0.5 * (1.0 + (PI * t).cos()),
        }
    }

    /// `∫ φ(u) cos(wu) du` for the unit-width kernel; equals 1 at `w = 0`.
    pub fn base_transfer(self, w: f64) -> f64 {
        let nodes = MOMENT_NODES + (2.0 * w.abs()) as usize;
        GaussLegendre::new(nodes).integrate(-1.0, 1.0, |u| self.base(u) * (w * u).cos())
    }

    /// First positive zero of [`Self::base_transfer`].
    fn first_transfer_zero(self) -> f64 {
        let step = 0.05;
        let mut lo = 0.0;
        let mut hi = step;
        while self.base_transfer(hi) > 0.0 {
            lo = hi;
            hi += step;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.base_transfer(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Mollifier `φ_ε` with its moments `c_j = ∫ φ_ε(τ)(-τ)^j dτ`, `j ≤ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifierSpec {
    kind: KernelKind,
    epsilon: f64,
    moments: Vec<f64>,
    band: f64,
    fourier_samples: Vec<(f64, f64)>,
}

impl MollifierSpec {
    /// Builds the mollifier with moments up to `max_moment`, capped at the default order.
    pub fn new(kind: KernelKind, epsilon: f64, max_moment: usize) -> Result<Self> {
        Self::with_order_cap(kind, epsilon, max_moment, DEFAULT_MAX_ORDER)
    }

    pub fn with_order_cap(kind: KernelKind, epsilon: f64, max_moment: usize, cap: usize) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::domain(format!("mollifier width must be positive, got {epsilon}")));
        }
        if max_moment > cap {
            return Err(Error::Order {
                requested: max_moment,
                max: cap,
            });
        }
        let gl = GaussLegendre::new(MOMENT_NODES);
        let moments = (0..=max_moment)
            .map(|j| {
                if j == 0 {
                    1.0
                } else if j % 2 == 1 {
                    0.0
                } else {
                    gl.integrate(-1.0, 1.0, |u| kind.base(u) * u.powi(j as i32)) * epsilon.powi(j as i32)
                }
            })
            .collect();
        let band = kind.first_transfer_zero() / epsilon;
        Ok(MollifierSpec {
            kind,
            epsilon,
            moments,
            band,
            fourier_samples: Vec::new(),
        })
    }

    pub fn make_bump(epsilon: f64, max_moment: usize) -> Result<Self> {
        Self::new(KernelKind::Bump, epsilon, max_moment)
    }

    pub fn make_truncated_cosine(epsilon: f64, max_moment: usize) -> Result<Self> {
        Self::new(KernelKind::TruncatedCosine, epsilon, max_moment)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `c_0, …, c_K`.
    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    pub fn max_moment(&self) -> usize {
        self.moments.len() - 1
    }

    /// `φ_ε(t)`.
    pub fn evaluate_kernel(&self, t: f64) -> f64 {
        self.kind.base(t / self.epsilon) / self.epsilon
    }

    /// Signed `F₁(φ_ε)(s) = (1/√2π) ∫ φ_ε(t) e^{-ist} dt`.
    pub fn fourier(&self, s: f64) -> f64 {
        self.transfer(s) / (2.0 * PI).sqrt()
    }

    /// `√(2π) F₁(φ_ε)(s)`, the multiplier of convolution with `φ_ε`; 1 at `s = 0`.
    pub fn transfer(&self, s: f64) -> f64 {
        self.kind.base_transfer(self.epsilon * s)
    }

    /// `F₁(φ_ε)(s)`, rejecting frequencies where it is not positive.
    pub fn fourier_of_kernel(&self, s: f64) -> Result<f64> {
        let value = self.fourier(s);
        if value > 0.0 {
            Ok(value)
        } else {
            Err(Error::OmegaMembership { s, value })
        }
    }

    /// Frequency of the first zero of the transform; it is positive on `(-band, band)`.
    pub fn omega_band(&self) -> f64 {
        self.band
    }

    /// Tabulates the transform on `[0, s_max]`, failing if it is not positive there.
    pub fn with_fourier_samples(mut self, s_max: f64) -> Result<Self> {
        if !(s_max > 0.0) {
            return Err(Error::domain(format!("band limit must be positive, got {s_max}")));
        }
        let step = s_max / (TABULATED_SAMPLES - 1) as f64;
        let samples = (0..TABULATED_SAMPLES)
            .map(|i| {
                let s = i as f64 * step;
                self.fourier_of_kernel(s).map(|v| (s, v))
            })
            .collect::<Result<Vec<_>>>()?;
        self.fourier_samples = samples;
        Ok(self)
    }

    /// Tabulates on `[0, min(s_max, band))`, warning when the requested band is cut.
    pub fn with_positive_band(self, s_max: f64) -> Result<Self> {
        let limit = 0.999 * self.band;
        if s_max > limit {
            log::warn!(
                "{} kernel transform changes sign at s = {:.4}; tabulating only up to {:.4} instead of {:.4}",
                self.kind.name(),
                self.band,
                limit,
                s_max
            );
        }
        self.with_fourier_samples(s_max.min(limit))
    }

    pub fn fourier_samples(&self) -> &[(f64, f64)] {
        &self.fourier_samples
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::adaptive_gauss;

    const C2_BUMP: f64 = 0.158_113_636_263_79;
    const C4_BUMP: f64 = 0.052_981_818_022;

    #[test]
    fn normalizer_matches_quadrature() {
        let z = adaptive_gauss(|t| if t.abs() < 1.0 { (-1.0 / (1.0 - t * t)).exp() } else { 0.0 }, -1.0, 1.0, 1e-15);
        assert!((z - BUMP_NORMALIZER).abs() < 1e-14, "{z}");
    }

    #[test]
    fn unit_mass_and_symmetry() {
        for kind in [KernelKind::Bump, KernelKind::TruncatedCosine] {
            for eps in [0.01, 0.05, 0.1, 0.5] {
                let m = MollifierSpec::new(kind, eps, 8).unwrap();
                let mass = adaptive_gauss(|t| m.evaluate_kernel(t), -eps, eps, 1e-14);
                assert!((mass - 1.0).abs() < 1e-10, "{kind:?} ε={eps}: {mass}");
                assert!((m.moments()[0] - 1.0).abs() < 1e-12);
                for j in (1..=8).step_by(2) {
                    assert_eq!(m.moments()[j], 0.0);
                }
                assert_eq!(m.evaluate_kernel(eps), 0.0);
                assert_eq!(m.evaluate_kernel(-eps), 0.0);
                for t in [0.1, 0.37, 0.8] {
                    assert_eq!(m.evaluate_kernel(t * eps), m.evaluate_kernel(-t * eps));
                    assert!(m.evaluate_kernel(t * eps) <= m.evaluate_kernel(0.0));
                }
            }
        }
    }

    #[test]
    fn bump_moments_and_scaling() {
        let m1 = MollifierSpec::make_bump(1.0, 8).unwrap();
        assert!((m1.moments()[2] - C2_BUMP).abs() < 1e-12);
        assert!((m1.moments()[4] - C4_BUMP).abs() < 1e-11);
        for eps in [0.01, 0.05, 0.1, 0.5] {
            let m = MollifierSpec::make_bump(eps, 8).unwrap();
            for j in (2..=8).step_by(2) {
                let ratio = m.moments()[j] / eps.powi(j as i32);
                assert!((ratio - m1.moments()[j]).abs() < 1e-8 * ratio, "ε={eps} j={j}");
                assert!(m.moments()[j] > 0.0);
            }
        }
    }

    #[test]
    fn cosine_moments_closed_form() {
        // ∫_{-1}^{1} (1 + cos πu)/2 · u² du = 1/3 − 2/π²
        let m = MollifierSpec::make_truncated_cosine(1.0, 2).unwrap();
        assert!((m.moments()[2] - (1.0 / 3.0 - 2.0 / (PI * PI))).abs() < 1e-14);
    }

    #[test]
    fn kernel_scaling_at_origin() {
        let half = MollifierSpec::make_bump(0.5, 0).unwrap();
        assert!((half.evaluate_kernel(0.0) - 2.0 * (-1.0f64).exp() / BUMP_NORMALIZER).abs() < 1e-14);
    }

    #[test]
    fn fourier_examples() {
        let m = MollifierSpec::make_bump(0.1, 0).unwrap();
        assert!((m.fourier_of_kernel(0.0).unwrap() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-14);
        assert_eq!(m.fourier(3.7), m.fourier(-3.7));
        let v = m.fourier_of_kernel(5.0).unwrap();
        // direct complex quadrature as the oracle
        let (re, im) = (
            adaptive_gauss(|t| m.evaluate_kernel(t) * (5.0 * t).cos(), -0.1, 0.1, 1e-14),
            adaptive_gauss(|t| -m.evaluate_kernel(t) * (5.0 * t).sin(), -0.1, 0.1, 1e-14),
        );
        assert!((v - re / (2.0 * PI).sqrt()).abs() < 1e-13 && im.abs() < 1e-14);
        assert!(v > 0.0 && v < 1.0 / (2.0 * PI).sqrt());
    }

    #[test]
    fn cosine_transfer_closed_form_and_band() {
        let m = MollifierSpec::make_truncated_cosine(1.0, 0).unwrap();
        for w in [0.5f64, 1.7, 4.0, 9.5] {
            let exact = PI * PI * w.sin() / (w * (PI * PI - w * w));
            assert!((m.transfer(w) - exact).abs() < 1e-13, "w={w}");
        }
        assert!((m.omega_band() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn bump_transform_changes_sign() {
        let m = MollifierSpec::make_bump(1.0, 0).unwrap();
        let band = m.omega_band();
        assert!(band > 4.9 && band < 5.0, "{band}");
        assert!(m.fourier_of_kernel(0.99 * band).is_ok());
        assert!(matches!(m.fourier_of_kernel(1.05 * band), Err(Error::OmegaMembership { .. })));
        assert!(m.clone().with_fourier_samples(2.0 * band).is_err());
        let tab = m.with_positive_band(2.0 * band).unwrap();
        assert!(tab.fourier_samples().iter().all(|&(_, v)| v > 0.0));
    }

    #[test]
    fn transform_tends_to_delta_limit() {
        let mut prev = 0.0;
        for k in 0..10 {
            let eps = 0.2 / 2f64.powi(k);
            let v = MollifierSpec::make_bump(eps, 0).unwrap().fourier(10.0);
            assert!(v > prev, "not monotone at ε={eps}");
            prev = v;
        }
        assert!((prev - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(MollifierSpec::make_bump(0.0, 2), Err(Error::Domain(_))));
        assert!(matches!(MollifierSpec::make_bump(-1.0, 2), Err(Error::Domain(_))));
        assert!(matches!(MollifierSpec::make_bump(0.1, 13), Err(Error::Order { .. })));
        assert!(MollifierSpec::with_order_cap(KernelKind::Bump, 0.1, 40, 64).is_ok());
        assert!(KernelKind::parse("gaussian").is_err());
    }
}
