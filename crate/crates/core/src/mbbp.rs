//! Multiple-bases belief propagation.
//!
//! A bank of independent decoders runs on different parity-check matrices
//! of one code. Among the syndrome-valid outputs the word with maximal
//! correlation `Σ map(bit)·y` is selected, which under the unit-energy
//! antipodal mapping is the word closest to `y` in Euclidean distance.

use rayon::prelude::*;

use crate::bp::{channel_llr, correlation, BpDecoder, DecoderConfig, DecoderOutput, LeakConfig};
use crate::error::{Error, Result};
use crate::redundancy::RepresentationSet;
use crate::seeds;
use crate::tanner::TannerGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecoderKind {
    Plain,
    Leaking(LeakConfig),
}

/// One decoder of the bank: a representation index and a decoder kind.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoderSpec {
    pub representation: usize,
    pub kind: DecoderKind,
}

impl DecoderSpec {
    pub fn plain(representation: usize) -> Self {
        DecoderSpec {
            representation,
            kind: DecoderKind::Plain,
        }
    }

    pub fn leaking(representation: usize, leak: LeakConfig) -> Self {
        DecoderSpec {
            representation,
            kind: DecoderKind::Leaking(leak),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MbbpConfig {
    pub specs: Vec<DecoderSpec>,
    pub decoder: DecoderConfig,
}

impl MbbpConfig {
    /// Plain BP on each of the first `l` representations.
    pub fn mbbp(l: usize, decoder: DecoderConfig) -> Self {
        MbbpConfig {
            specs: (0..l).map(DecoderSpec::plain).collect(),
            decoder,
        }
    }

    /// Plain BP and one Leaking decoder on each of the first `l`
    /// representations, `2·l` decoders in all. Decoder `l + i` runs on
    /// representation `i` with mask seed `derive(leak.mask_seed, i)`.
    pub fn leaking_mbbp(l: usize, leak: LeakConfig, decoder: DecoderConfig) -> Self {
        let mut specs: Vec<DecoderSpec> = (0..l).map(DecoderSpec::plain).collect();
        specs.extend((0..l).map(|i| {
            DecoderSpec::leaking(
                i,
                LeakConfig {
                    mask_seed: seeds::derive(leak.mask_seed, i as u64),
                    ..leak
                },
            )
        }));
        MbbpConfig { specs, decoder }
    }

    /// Number of representations the bank reads.
    pub fn representations_needed(&self) -> usize {
        self.specs.iter().map(|s| s.representation + 1).max().unwrap_or(0)
    }

    pub fn validate(&self, available: usize) -> Result<()> {
        if self.specs.is_empty() {
            return Err(Error::invalid("decoder bank is empty"));
        }
        self.decoder.validate()?;
        for s in &self.specs {
            if s.representation >= available {
                return Err(Error::invalid(format!(
                    "representation index {} but only {available} available",
                    s.representation
                )));
            }
            if let DecoderKind::Leaking(lk) = &s.kind {
                lk.validate()?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateSummary {
    pub syndrome_valid: bool,
    pub correlation: f64,
    pub iterations_used: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MbbpResult {
    pub selected: DecoderOutput,
    pub selected_index: usize,
    /// False when no decoder reached a zero syndrome; `selected` is then the
    /// best-correlation hard decision of the whole bank.
    pub any_valid: bool,
    pub per_decoder: Vec<CandidateSummary>,
}

/// Index of the chosen candidate and whether it is syndrome-valid.
///
/// Valid candidates are compared by `Σ map(bit)·y`; ties go to the lowest
/// index. Without valid candidates the same rule runs over all of them.
pub fn select_candidate(y: &[f64], outputs: &[DecoderOutput]) -> Result<(usize, bool)> {
    if outputs.is_empty() {
        return Err(Error::invalid("no candidates to select from"));
    }
    for o in outputs {
        if o.hard_decision.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: y.len(),
                found: o.hard_decision.len(),
            });
        }
    }
    let any_valid = outputs.iter().any(|o| o.syndrome_valid);
    let mut best: Option<(usize, f64)> = None;
    for (i, o) in outputs.iter().enumerate() {
        if any_valid && !o.syndrome_valid {
            continue;
        }
        let c = correlation(&o.hard_decision, y);
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((i, c));
        }
    }
    Ok((best.expect("nonempty").0, any_valid))
}

/// Decoder bank over a representation set, reusable across frames.
pub struct MbbpDecoder {
    graphs: Vec<TannerGraph>,
    cfg: MbbpConfig,
    n: usize,
}

impl MbbpDecoder {
    pub fn new(reps: &RepresentationSet, cfg: MbbpConfig) -> Result<Self> {
        cfg.validate(reps.len())?;
        let graphs = reps.matrices[..cfg.representations_needed()]
            .iter()
            .map(TannerGraph::new)
            .collect();
        Ok(MbbpDecoder {
            graphs,
            cfg,
            n: reps.n(),
        })
    }

    pub fn config(&self) -> &MbbpConfig {
        &self.cfg
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.cfg.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cfg.specs.is_empty()
    }

    /// Runs the bank one decoder after the other.
    pub fn decode(&self, y: &[f64], sigma2: f64) -> Result<MbbpResult> {
        self.decode_frame(y, sigma2, None, false)
    }

    /// Runs the decoders of the bank on the rayon pool; the result does not
    /// depend on the pool size.
    pub fn decode_parallel(&self, y: &[f64], sigma2: f64) -> Result<MbbpResult> {
        self.decode_frame(y, sigma2, None, true)
    }

    /// Like [`decode`](Self::decode), with every Leaking mask seed mixed
    /// with `nonce` so that each frame sees fresh activation masks.
    pub fn decode_with_nonce(&self, y: &[f64], sigma2: f64, nonce: u64, parallel: bool) -> Result<MbbpResult> {
        self.decode_frame(y, sigma2, Some(nonce), parallel)
    }

    fn decode_frame(&self, y: &[f64], sigma2: f64, nonce: Option<u64>, parallel: bool) -> Result<MbbpResult> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: y.len(),
            });
        }
        let llr = channel_llr(y, sigma2)?;
        let run = |spec: &DecoderSpec| -> Result<DecoderOutput> {
            let mut dec = BpDecoder::new(&self.graphs[spec.representation]);
            match spec.kind {
                DecoderKind::Plain => dec.decode(llr.values(), &self.cfg.decoder),
                DecoderKind::Leaking(lk) => {
                    let lk = match nonce {
                        Some(x) => LeakConfig {
                            mask_seed: seeds::derive(lk.mask_seed, x),
                            ..lk
                        },
                        None => lk,
                    };
                    dec.decode_leaking(llr.values(), &self.cfg.decoder, &lk)
                }
            }
        };
        let outputs: Vec<DecoderOutput> = if parallel {
            self.cfg.specs.par_iter().map(run).collect::<Result<_>>()?
        } else {
            self.cfg.specs.iter().map(run).collect::<Result<_>>()?
        };
        let (idx, any_valid) = select_candidate(y, &outputs)?;
        let per_decoder = outputs
            .iter()
            .map(|o| CandidateSummary {
                syndrome_valid: o.syndrome_valid,
                correlation: o.correlation,
                iterations_used: o.iterations_used,
            })
            .collect();
        let selected = outputs.into_iter().nth(idx).expect("index from selection");
        Ok(MbbpResult {
            selected,
            selected_index: idx,
            any_valid,
            per_decoder,
        })
    }
}

/// One-shot MBBP decoding of the received vector `y`.
pub fn mbbp_decode(reps: &RepresentationSet, y: &[f64], sigma2: f64, cfg: &MbbpConfig) -> Result<MbbpResult> {
    MbbpDecoder::new(reps, cfg.clone())?.decode(y, sigma2)
}
