//! Reference curves: Gilbert-Varshamov distance, the Gallager random-coding
//! bound for the binary-input AWGN channel, and required-SNR extraction.
//!
//! The bound is `P_F ≤ 2^{−n·E_r(R)}` with
//! `E_r(R) = max_{0≤ρ≤1} E_0(ρ) − ρR` and, for equiprobable inputs ±1,
//!
//! ```text
//! E_0(ρ) = −log2 E_{Y~N(1,σ²)} [ (½ + ½·exp(−2Y/((1+ρ)σ²)))^{1+ρ} ]
//! ```
//!
//! The expectation is evaluated by Gauss-Hermite quadrature.

use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::sim::sigma_from_ebn0;

/// Largest `d ≤ n` with `Σ_{i=0}^{d−2} C(n−1, i) ≤ 2^{n−k}`.
pub fn gv_distance(n: usize, k: usize) -> usize {
    assert!(0 < k && k < n, "need 0 < k < n");
    let budget = BigUint::one() << (n - k);
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    let mut d = 2;
    // invariant: sum = Σ_{i ≤ d−2} C(n−1, i) ≤ budget
    while d < n {
        let i = d - 1;
        term = term * (n - i) / i;
        sum += &term;
        if sum > budget {
            break;
        }
        d += 1;
    }
    d
}

/// Gauss-Hermite rule for `∫ e^{−x²} f(x) dx`.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes by Newton iteration on the orthonormal Hermite recurrence.
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("quadrature needs at least one node"));
        }
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let half = m.div_ceil(2);
        let mf = m as f64;
        let mut z = 0.0f64;
        for i in 0..half {
            z = match i {
                0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-0.16667),
                1 => z - 1.14 * mf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            let mut converged = false;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..m {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * mf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Integration(format!("Hermite root {i} of {m} did not converge")));
            }
            nodes[i] = z;
            nodes[m - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[m - 1 - i] = weights[i];
        }
        Ok(GaussHermite { nodes, weights })
    }

    /// `E[f(X)]` for `X ~ N(mean, var)`.
    pub fn gaussian_expectation(&self, mean: f64, var: f64, f: impl Fn(f64) -> f64) -> f64 {
        let s = (2.0 * var).sqrt();
        let total: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mean + s * x))
            .sum();
        total / std::f64::consts::PI.sqrt()
    }
}

/// Nodes used for every channel integral in this module.
pub const QUADRATURE_NODES: usize = 96;

fn quadrature() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(QUADRATURE_NODES).expect("fixed node count converges"))
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Gallager's `E_0(ρ)` in bits for the binary-input AWGN channel.
pub fn e0(rho: f64, sigma2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("rho {rho} outside [0, 1]")));
    }
    if sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(Error::invalid("noise variance must be positive"));
    }
    let s = 1.0 / (1.0 + rho);
    let mean = quadrature().gaussian_expectation(1.0, sigma2, |y| {
        let a = -2.0 * y * s / sigma2;
        ((1.0 + rho) * (softplus(a) - std::f64::consts::LN_2)).exp()
    });
    let v = -mean.log2();
    if !v.is_finite() {
        return Err(Error::Integration(format!("E0 not finite at rho {rho}, sigma2 {sigma2}")));
    }
    Ok(v)
}

/// Mutual information in bits of the binary-input AWGN channel with
/// equiprobable inputs.
pub fn biawgn_capacity(sigma2: f64) -> f64 {
    1.0 - quadrature().gaussian_expectation(1.0, sigma2, |y| softplus(-2.0 * y / sigma2)) / std::f64::consts::LN_2
}

/// Tolerance in ρ of the golden-section search.
pub const RHO_TOLERANCE: f64 = 1e-6;

/// Exponents below this many bits are quadrature noise and read as zero.
pub const EXPONENT_FLOOR: f64 = 1e-12;

/// `E_r(R) = max_{ρ∈[0,1]} E_0(ρ) − ρR`, clamped at zero.
pub fn random_coding_exponent(rate: f64, sigma2: f64) -> Result<f64> {
    let f = |rho: f64| e0(rho, sigma2).map(|v| v - rho * rate);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > RHO_TOLERANCE {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let best = [fc, fd, f(0.0)?, f(1.0)?].into_iter().fold(0.0, f64::max);
    Ok(if best < EXPONENT_FLOOR { 0.0 } else { best })
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::invalid(format!("rate {rate} outside (0, 1)")));
    }
    Ok(())
}

/// `min(1, 2^{−n·E_r(R)})` at the noise level of `ebn0_db`.
pub fn gallager_fer_bound(n: usize, rate: f64, ebn0_db: f64) -> Result<f64> {
    check_rate(rate)?;
    let er = random_coding_exponent(rate, sigma_from_ebn0(ebn0_db, rate))?;
    Ok((-(n as f64) * er).exp2().min(1.0))
}

/// Smallest `E_b/N_0` (dB) at which the Gallager bound reaches
/// `target_fer`, found by bisection to 1e-6 dB.
pub fn gallager_required_snr(n: usize, rate: f64, target_fer: f64) -> Result<f64> {
    check_rate(rate)?;
    if !(target_fer > 0.0 && target_fer < 1.0) {
        return Err(Error::OutOfRange { target: target_fer });
    }
    let (mut lo, mut hi) = (-2.0f64, 20.0f64);
    if gallager_fer_bound(n, rate, hi)? > target_fer {
        return Err(Error::OutOfRange { target: target_fer });
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if gallager_fer_bound(n, rate, mid)? > target_fer {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// BER under the assumption that an erroneous frame carries `d` bit errors.
pub fn fer_to_ber(fer: f64, d: usize, n: usize) -> f64 {
    fer * d as f64 / n as f64
}

/// SNR at which `curve` crosses `target`, interpolating linearly in
/// `(dB, log10 value)`.
///
/// Points with value 0 are ignored. The first consecutive pair with
/// `v_i ≥ target ≥ v_{i+1}` is used.
pub fn required_snr(curve: &[(f64, f64)], target: f64) -> Result<f64> {
    if target.is_nan() || target <= 0.0 {
        return Err(Error::OutOfRange { target });
    }
    let pts: Vec<(f64, f64)> = curve.iter().copied().filter(|&(_, v)| v > 0.0).collect();
    for w in pts.windows(2) {
        let ((x0, v0), (x1, v1)) = (w[0], w[1]);
        if v0 == target {
            return Ok(x0);
        }
        if v0 > target && target >= v1 {
            if v1 == target {
                return Ok(x1);
            }
            let (l0, l1, lt) = (v0.log10(), v1.log10(), target.log10());
            return Ok(x0 + (x1 - x0) * (l0 - lt) / (l0 - l1));
        }
    }
    if let Some(&(x, v)) = pts.last() {
        if v == target {
            return Ok(x);
        }
    }
    Err(Error::OutOfRange { target })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundPoint {
    pub ebn0_db: f64,
    pub fer_bound: f64,
    pub ber_bound: f64,
}

/// Gallager bound over an SNR grid with BER by the `d_gv / n` rule.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurve {
    pub n: usize,
    pub rate: f64,
    pub d_gv: usize,
    pub points: Vec<BoundPoint>,
}

impl BoundCurve {
    pub fn compute(n: usize, rate: f64, grid_db: &[f64]) -> Result<Self> {
        check_rate(rate)?;
        let k = ((n as f64) * rate).round() as usize;
        if k == 0 || k >= n {
            return Err(Error::invalid(format!("rate {rate} gives no code of length {n}")));
        }
        let d_gv = gv_distance(n, k);
        let points = grid_db
            .iter()
            .map(|&db| {
                let fer = gallager_fer_bound(n, rate, db)?;
                Ok(BoundPoint {
                    ebn0_db: db,
                    fer_bound: fer,
                    ber_bound: fer_to_ber(fer, d_gv, n),
                })
            })
            .collect::<Result<_>>()?;
        Ok(BoundCurve { n, rate, d_gv, points })
    }

    pub fn fer_curve(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.ebn0_db, p.fer_bound)).collect()
    }

    pub fn ber_curve(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.ebn0_db, p.ber_bound)).collect()
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["ebn0_db", "fer_bound", "ber_bound"])?;
        for p in &self.points {
            out.write_record([
                p.ebn0_db.to_string(),
                format!("{:e}", p.fer_bound),
                format!("{:e}", p.ber_bound),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::file(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// Evenly spaced grid from `start` to `stop` inclusive.
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(Error::invalid("grid needs step > 0 and stop ≥ start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // rounding to 1e-9 dB keeps printed grid values clean
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}
