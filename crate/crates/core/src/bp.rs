//! Flooding sum-product decoding and the Leaking variant.
//!
//! Messages are log-likelihood ratios, positive favouring bit 0. Check
//! nodes use the tanh product rule; every outgoing message is clipped to
//! `±llr_clip`. The hard-decision syndrome is tested before the first
//! iteration and after every iteration.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::SparseBinaryMatrix;
use crate::seeds;
use crate::tanner::TannerGraph;

/// Saturation applied to channel LLRs.
pub const MAX_LLR: f64 = 25.0;

/// Channel log-likelihood ratios, finite and within `±MAX_LLR`.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    /// Saturates every value at `±MAX_LLR`; NaN is rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for v in values.iter_mut() {
            if v.is_nan() {
                return Err(Error::invalid("NaN log-likelihood ratio"));
            }
            *v = v.clamp(-MAX_LLR, MAX_LLR);
        }
        Ok(LlrVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// LLRs `2·y/σ²` for the mapping bit 0 → +1, bit 1 → −1.
pub fn channel_llr(y: &[f64], sigma2: f64) -> Result<LlrVector> {
    if !sigma2.is_finite() || sigma2 <= 0.0 {
        return Err(Error::invalid(format!("noise variance {sigma2} must be positive")));
    }
    LlrVector::new(y.iter().map(|&v| 2.0 * v / sigma2).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoderConfig {
    pub max_iterations: usize,
    pub llr_clip: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_iterations: 200,
            llr_clip: 25.0,
        }
    }
}

impl DecoderConfig {
    pub fn with_iterations(max_iterations: usize) -> Self {
        DecoderConfig {
            max_iterations,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        if !self.llr_clip.is_finite() || self.llr_clip <= 0.0 {
            return Err(Error::invalid("llr_clip must be positive and finite"));
        }
        Ok(())
    }
}

/// Parameters of the Leaking decoder.
///
/// A node is informed of its channel value from the first iteration `i`
/// with `leak_schedule(i) ≥ u`, where `u` is drawn once per node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeakConfig {
    pub p_leak: f64,
    pub i_max_prime: usize,
    pub mask_seed: u64,
}

impl Default for LeakConfig {
    fn default() -> Self {
        LeakConfig {
            p_leak: 0.9,
            i_max_prime: 300,
            mask_seed: 0,
        }
    }
}

impl LeakConfig {
    pub fn with_seed(mask_seed: u64) -> Self {
        LeakConfig {
            mask_seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_leak > 0.0 && self.p_leak <= 1.0) {
            return Err(Error::invalid(format!("p_leak {} not in (0, 1]", self.p_leak)));
        }
        if self.i_max_prime == 0 {
            return Err(Error::invalid("i_max_prime must be at least 1"));
        }
        Ok(())
    }
}

/// Informed fraction at iteration `i ≥ 1`: a linear ramp from `p_leak` at
/// `i = 1` to 1 at `i = i_max_prime`. With `i_max_prime = 1` it is 1.
pub fn leak_schedule(lk: &LeakConfig, iteration: usize) -> f64 {
    assert!(iteration >= 1, "iterations are counted from 1");
    if lk.i_max_prime <= 1 {
        return 1.0;
    }
    let ramp = (iteration - 1) as f64 / (lk.i_max_prime - 1) as f64;
    (lk.p_leak + (1.0 - lk.p_leak) * ramp).min(1.0)
}

/// Per-node activation thresholds `u_j ∈ [0, 1)`.
pub fn leak_mask(lk: &LeakConfig, n: usize) -> Vec<f64> {
    let mut rng = seeds::rng(lk.mask_seed);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoderOutput {
    pub hard_decision: Vec<u8>,
    pub syndrome_valid: bool,
    pub iterations_used: usize,
    /// `Σ map(bit)·llr` over the channel LLRs, with map(0) = +1.
    pub correlation: f64,
}

/// `Σ_i (1 − 2·bits_i)·values_i`.
pub fn correlation(bits: &[u8], values: &[f64]) -> f64 {
    bits.iter()
        .zip(values)
        .map(|(&b, &v)| if b == 0 { v } else { -v })
        .sum()
}

/// `tanh(x/2)` from a single `expm1`.
#[inline]
fn tanh_half(x: f64) -> f64 {
    let e = (-x.abs()).exp_m1();
    (-e / (2.0 + e)).copysign(x)
}

/// `2·atanh(p)` from a single `ln_1p`; infinite at `|p| = 1`.
#[inline]
fn two_atanh(p: f64) -> f64 {
    let a = p.abs();
    (2.0 * a / (1.0 - a)).ln_1p().copysign(p)
}

fn hard(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

/// Sum-product decoder bound to one Tanner graph.
///
/// Holds the message memory, so one instance decodes one frame at a time.
pub struct BpDecoder<'g> {
    graph: &'g TannerGraph,
    c2v: Vec<f64>,
    v2c: Vec<f64>,
    total: Vec<f64>,
    hard: Vec<u8>,
    // channel values visible in the current iteration
    visible: Vec<f64>,
    // scratch for the forward-backward products of one check
    tanh: Vec<f64>,
    suffix: Vec<f64>,
}

impl<'g> BpDecoder<'g> {
    pub fn new(graph: &'g TannerGraph) -> Self {
        let e = graph.n_edges();
        let n = graph.n_vars();
        let max_deg = (0..graph.n_checks())
            .map(|c| graph.check_edge_range(c).len())
            .max()
            .unwrap_or(0);
        BpDecoder {
            graph,
            c2v: vec![0.0; e],
            v2c: vec![0.0; e],
            total: vec![0.0; n],
            hard: vec![0; n],
            visible: vec![0.0; n],
            tanh: vec![0.0; max_deg],
            suffix: vec![0.0; max_deg + 1],
        }
    }

    pub fn graph(&self) -> &TannerGraph {
        self.graph
    }

    pub fn decode(&mut self, llr: &[f64], cfg: &DecoderConfig) -> Result<DecoderOutput> {
        self.run(llr, cfg, None)
    }

    pub fn decode_leaking(
        &mut self,
        llr: &[f64],
        cfg: &DecoderConfig,
        lk: &LeakConfig,
    ) -> Result<DecoderOutput> {
        lk.validate()?;
        let mask = leak_mask(lk, llr.len());
        self.run(llr, cfg, Some((lk, &mask)))
    }

    fn run(
        &mut self,
        llr: &[f64],
        cfg: &DecoderConfig,
        leak: Option<(&LeakConfig, &[f64])>,
    ) -> Result<DecoderOutput> {
        cfg.validate()?;
        let n = self.graph.n_vars();
        if llr.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: llr.len(),
            });
        }
        let clip = cfg.llr_clip;
        let finish = |this: &Self, valid: bool, iterations: usize| DecoderOutput {
            hard_decision: this.hard.clone(),
            syndrome_valid: valid,
            iterations_used: iterations,
            correlation: correlation(&this.hard, llr),
        };

        for (h, &l) in self.hard.iter_mut().zip(llr) {
            *h = hard(l);
        }
        if self.syndrome_is_zero() {
            return Ok(finish(self, true, 0));
        }

        self.set_visible(llr, leak, 1);
        for v in 0..n {
            let x = self.visible[v].clamp(-clip, clip);
            for &e in self.graph.var_edges(v) {
                self.v2c[e] = x;
            }
        }

        for it in 1..=cfg.max_iterations {
            self.check_update(clip);
            self.variable_update(clip);
            if self.syndrome_is_zero() {
                return Ok(finish(self, true, it));
            }
            if it < cfg.max_iterations {
                self.set_visible(llr, leak, it + 1);
            }
        }
        Ok(finish(self, false, cfg.max_iterations))
    }

    fn set_visible(&mut self, llr: &[f64], leak: Option<(&LeakConfig, &[f64])>, iteration: usize) {
        match leak {
            None => self.visible.copy_from_slice(llr),
            Some((lk, mask)) => {
                let p = leak_schedule(lk, iteration);
                for ((vis, &l), &u) in self.visible.iter_mut().zip(llr).zip(mask) {
                    *vis = if p >= u { l } else { 0.0 };
                }
            }
        }
    }

    fn check_update(&mut self, clip: f64) {
        for c in 0..self.graph.n_checks() {
            let range = self.graph.check_edge_range(c);
            let d = range.len();
            let base = range.start;
            for k in 0..d {
                self.tanh[k] = tanh_half(self.v2c[base + k]);
            }
            self.suffix[d] = 1.0;
            for k in (0..d).rev() {
                self.suffix[k] = self.suffix[k + 1] * self.tanh[k];
            }
            let mut prefix = 1.0;
            for k in 0..d {
                let p = prefix * self.suffix[k + 1];
                self.c2v[base + k] = two_atanh(p).clamp(-clip, clip);
                prefix *= self.tanh[k];
            }
        }
    }

    fn variable_update(&mut self, clip: f64) {
        for v in 0..self.graph.n_vars() {
            let edges = self.graph.var_edges(v);
            let mut t = self.visible[v];
            for &e in edges {
                t += self.c2v[e];
            }
            self.total[v] = t;
            self.hard[v] = hard(t);
            for &e in edges {
                self.v2c[e] = (t - self.c2v[e]).clamp(-clip, clip);
            }
        }
    }

    fn syndrome_is_zero(&self) -> bool {
        (0..self.graph.n_checks()).all(|c| {
            self.graph
                .check_vars(c)
                .iter()
                .fold(0u8, |acc, &v| acc ^ self.hard[v])
                == 0
        })
    }
}

/// Decodes `llr` on the Tanner graph of `h`.
pub fn bp_decode(h: &SparseBinaryMatrix, llr: &LlrVector, cfg: &DecoderConfig) -> Result<DecoderOutput> {
    let g = TannerGraph::new(h);
    BpDecoder::new(&g).decode(llr.values(), cfg)
}

/// Leaking decoding of `llr` on the Tanner graph of `h`.
pub fn leaking_decode(
    h: &SparseBinaryMatrix,
    llr: &LlrVector,
    cfg: &DecoderConfig,
    lk: &LeakConfig,
) -> Result<DecoderOutput> {
    let g = TannerGraph::new(h);
    BpDecoder::new(&g).decode_leaking(llr.values(), cfg, lk)
}
