//! Unitary one-dimensional DFT of arbitrary length.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

pub use rustfft::num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Planned unitary DFT, `X_k = N^{-1/2} Σ_n x_n e^{∓2πi kn/N}`.
///
/// The plan is immutable and can be shared across threads.
#[derive(Clone)]
pub struct UnitaryDft {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for UnitaryDft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UnitaryDft").field("len", &self.len).finish()
    }
}

impl UnitaryDft {
    /// Panics if `len == 0`.
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "DFT length must be at least 1");
        let mut planner = FftPlanner::new();
        UnitaryDft {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            scale: 1.0 / (len as f64).sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transforms `buffer` in place. Panics on a length mismatch.
    pub fn process(&self, buffer: &mut [Complex64], direction: Direction) {
        assert_eq!(buffer.len(), self.len, "buffer length does not match the plan");
        match direction {
            Direction::Forward => self.forward.process(buffer),
            Direction::Inverse => self.inverse.process(buffer),
        }
        for v in buffer.iter_mut() {
            *v *= self.scale;
        }
    }
}

/// One-shot unitary DFT. An empty input yields an empty output.
pub fn dft_1d(samples: &[Complex64], direction: Direction) -> Vec<Complex64> {
    let mut out = samples.to_vec();
    if !out.is_empty() {
        UnitaryDft::new(out.len()).process(&mut out, direction);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn naive(x: &[Complex64], direction: Direction) -> Vec<Complex64> {
        let n = x.len();
        let sign = match direction {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        };
        (0..n)
            .map(|k| {
                let sum: Complex64 = x
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * Complex64::from_polar(1.0, sign * 2.0 * PI * (k * j) as f64 / n as f64))
                    .sum();
                sum / (n as f64).sqrt()
            })
            .collect()
    }

    fn norm(x: &[Complex64]) -> f64 {
        x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn delta_and_constant() {
        let n = 12;
        let mut delta = vec![Complex64::new(0.0, 0.0); n];
        delta[0] = Complex64::new(1.0, 0.0);
        for v in dft_1d(&delta, Direction::Forward) {
            assert!((v - Complex64::new(1.0 / (n as f64).sqrt(), 0.0)).norm() < 1e-15);
        }
        let constant = vec![Complex64::new(1.0, 0.0); n];
        let spec = dft_1d(&constant, Direction::Forward);
        assert!((spec[0] - Complex64::new((n as f64).sqrt(), 0.0)).norm() < 1e-13);
        assert!(spec[1..].iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn matches_naive_transform_for_odd_and_prime_lengths() {
        for n in [1usize, 2, 7, 15, 31, 64] {
            let x: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
                .collect();
            for dir in [Direction::Forward, Direction::Inverse] {
                let fast = dft_1d(&x, dir);
                let slow = naive(&x, dir);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-12, "n={n}");
                }
            }
        }
    }

    #[test]
    fn empty_input() {
        assert!(dft_1d(&[], Direction::Forward).is_empty());
    }

    proptest! {
        #[test]
        fn parseval_and_round_trip(values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..200)) {
            let x: Vec<Complex64> = values.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let spec = dft_1d(&x, Direction::Forward);
            prop_assert!((norm(&x) - norm(&spec)).abs() <= 1e-12 * norm(&x).max(1.0));
            let back = dft_1d(&spec, Direction::Inverse);
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).norm() <= 1e-12);
            }
        }
    }
}
