//! Log-gamma and binomial coefficients.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Half-width of the windows around 1 and 2 where the Taylor series of
/// `ln Γ(1 + z)` is used instead of Lanczos, so that relative accuracy
/// survives near the two zeros of `ln Γ`.
const SERIES_WINDOW: f64 = 0.25;
const SERIES_TERMS: usize = 30;

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x
        return ln_gamma_positive(x + 1.0) - x.ln();
    }
    let z1 = x - 1.0;
    if z1.abs() <= SERIES_WINDOW {
        return ln_gamma_1p_series(z1);
    }
    let z2 = x - 2.0;
    if z2.abs() <= SERIES_WINDOW {
        // Γ(2 + z) = (1 + z) Γ(1 + z)
        return z2.ln_1p() + ln_gamma_1p_series(z2);
    }
    ln_gamma_lanczos(x)
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let mut a = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `ln Γ(1 + z) = -γ z + Σ_{k≥2} (-1)^k ζ(k) z^k / k` for small `|z|`.
fn ln_gamma_1p_series(z: f64) -> f64 {
    let zeta = zeta_table();
    let mut sum = 0.0;
    let mut power = -z;
    for k in 2..=SERIES_TERMS {
        power *= -z;
        sum += zeta[k] * power / k as f64;
    }
    -EULER_GAMMA * z + sum
}

/// ζ(k) for k = 0..=SERIES_TERMS (entries 0 and 1 unused), by Euler–Maclaurin.
fn zeta_table() -> &'static [f64; SERIES_TERMS + 1] {
    static TABLE: OnceLock<[f64; SERIES_TERMS + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B_{2j} / (2j)!
        const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30_240.0,
            -1.0 / 1_209_600.0,
            1.0 / 47_900_160.0,
            -691.0 / 1_307_674_368_000.0,
        ];
        let mut table = [0.0; SERIES_TERMS + 1];
        let n = 10.0_f64;
        for (s_idx, slot) in table.iter_mut().enumerate().skip(2) {
            let s = s_idx as f64;
            let mut head = 0.0;
            for m in (1..10).rev() {
                head += (m as f64).powf(-s);
            }
            let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
            // rising factorial s (s+1) ... (s+2j-2)
            let mut rising = s;
            for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
                let j = j as f64 + 1.0;
                tail += coeff * rising * n.powf(-s - 2.0 * j + 1.0);
                rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
            }
            *slot = head + tail;
        }
        table
    })
}

/// Largest `k` for which every `C(k, j)` fits in a `u64`.
pub const EXACT_BINOMIAL_LIMIT: usize = 62;

/// Exact binomial coefficient in integer arithmetic, `k ≤ 62`.
pub fn binomial_u64(k: usize, j: usize) -> Result<u64> {
    if j > k {
        return Err(Error::domain(format!("binomial({k}, {j}) requires j <= k")));
    }
    if k > EXACT_BINOMIAL_LIMIT {
        return Err(Error::domain(format!(
            "exact binomial limited to k <= {EXACT_BINOMIAL_LIMIT}, got {k}"
        )));
    }
    let j = j.min(k - j);
    let mut acc: u128 = 1;
    for i in 0..j {
        // acc * (k - i) is divisible by (i + 1) at every step.
        acc = acc * (k - i) as u128 / (i as u128 + 1);
    }
    Ok(acc as u64)
}

/// Binomial coefficient as a real: exact for `k ≤ 62`, log-gamma above.
pub fn binomial(k: usize, j: usize) -> Result<f64> {
    if j > k {
        return Err(Error::domain(format!("binomial({k}, {j}) requires j <= k")));
    }
    if k <= EXACT_BINOMIAL_LIMIT {
        return binomial_u64(k, j).map(|v| v as f64);
    }
    let ln = ln_gamma_positive(k as f64 + 1.0)
        - ln_gamma_positive(j as f64 + 1.0)
        - ln_gamma_positive((k - j) as f64 + 1.0);
    Ok(ln.exp().round())
}
