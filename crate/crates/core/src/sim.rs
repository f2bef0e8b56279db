//! Monte-Carlo link simulation over the AWGN channel.
//!
//! Every frame owns a ChaCha8 stream addressed by `(seed, SNR index,
//! frame index)`. The stream first yields the information word (64 bits
//! per `u64` draw, least significant bit first), then `n` noise samples.
//! Noise is `σ·Z` with `Z` drawn by the `StandardNormal` ziggurat sampler
//! of `rand_distr`. Frames are decoded in fixed batches and merged in
//! frame order, so counters do not depend on the number of workers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::alist;
use crate::bp::{DecoderConfig, LeakConfig};
use crate::error::{Error, Result};
use crate::gf2::{self, GeneratorForm, SparseBinaryMatrix};
use crate::mbbp::{MbbpConfig, MbbpDecoder};
use crate::peg;
use crate::qc;
use crate::redundancy::{self, AssemblyConfig, RepresentationSet, RowSource};
use crate::seeds;

/// Systematic encoding of the information word `u`.
pub fn encode(g: &GeneratorForm, u: &[u8]) -> Result<Vec<u8>> {
    g.encode(u)
}

/// Antipodal mapping, bit 0 → +1 and bit 1 → −1.
pub fn modulate(c: &[u8]) -> Vec<f64> {
    c.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect()
}

/// `x + σ·Z` with i.i.d. standard normal `Z` drawn from `rng`.
pub fn awgn<R: Rng + ?Sized>(x: &[f64], sigma2: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !sigma2.is_finite() || sigma2 < 0.0 {
        return Err(Error::invalid(format!("noise variance {sigma2} must be nonnegative")));
    }
    let s = sigma2.sqrt();
    Ok(x.iter()
        .map(|&v| v + s * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

/// Noise variance `1 / (2·R·10^(dB/10))` at unit symbol energy.
pub fn sigma_from_ebn0(ebn0_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))
}

/// `k` uniform bits, 64 per `u64` draw, least significant bit first.
pub fn random_bits<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<u8> {
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let w: u64 = rng.random();
        let take = (k - out.len()).min(64);
        out.extend((0..take).map(|i| ((w >> i) & 1) as u8));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CodeSpec {
    Wimax { n: usize },
    Peg { n: usize, seed: u64 },
    /// Relative paths are resolved against the config file's directory.
    Alist { path: PathBuf },
}

fn default_p_leak() -> f64 {
    LeakConfig::default().p_leak
}

fn default_i_max_prime() -> usize {
    LeakConfig::default().i_max_prime
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DecoderChoice {
    Bp,
    Mbbp {
        l: usize,
    },
    LeakingMbbp {
        l: usize,
        #[serde(default = "default_p_leak")]
        p_leak: f64,
        #[serde(default = "default_i_max_prime")]
        i_max_prime: usize,
        #[serde(default)]
        mask_seed: u64,
    },
}

impl DecoderChoice {
    pub fn representations(&self) -> usize {
        match self {
            DecoderChoice::Bp => 1,
            DecoderChoice::Mbbp { l } | DecoderChoice::LeakingMbbp { l, .. } => *l,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DecoderChoice::Bp => "bp".into(),
            DecoderChoice::Mbbp { l } => format!("mbbp-{l}"),
            DecoderChoice::LeakingMbbp { l, .. } => format!("l-mbbp-{l}"),
        }
    }

    pub fn bank(&self, decoder: DecoderConfig) -> MbbpConfig {
        match *self {
            DecoderChoice::Bp => MbbpConfig::mbbp(1, decoder),
            DecoderChoice::Mbbp { l } => MbbpConfig::mbbp(l, decoder),
            DecoderChoice::LeakingMbbp {
                l,
                p_leak,
                i_max_prime,
                mask_seed,
            } => MbbpConfig::leaking_mbbp(
                l,
                LeakConfig {
                    p_leak,
                    i_max_prime,
                    mask_seed,
                },
                decoder,
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfoSource {
    #[default]
    Random,
    /// Transmits the all-zero word; valid for linear codes on the
    /// output-symmetric AWGN channel with a symmetric decoder.
    AllZero,
}

fn default_reps_seed() -> u64 {
    1
}

fn default_max_iterations() -> usize {
    DecoderConfig::default().max_iterations
}

fn default_min_frame_errors() -> u64 {
    100
}

fn default_max_frames() -> u64 {
    1_000_000
}

/// A simulation campaign, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub code: CodeSpec,
    pub decoder: DecoderChoice,
    /// Seed of the representation set built for MBBP banks.
    #[serde(default = "default_reps_seed")]
    pub reps_seed: u64,
    /// Directory written by `gen-reps`; overrides `reps_seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps_dir: Option<PathBuf>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    pub snr_db: Vec<f64>,
    #[serde(default = "default_min_frame_errors")]
    pub min_frame_errors: u64,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    pub seed: u64,
    #[serde(default)]
    pub source: InfoSource,
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: CampaignConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.snr_db.is_empty() {
            return bad("snr_db is empty");
        }
        if self.snr_db.iter().any(|v| !v.is_finite()) {
            return bad("snr_db holds a non-finite value");
        }
        if self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return bad("snr_db must be strictly increasing");
        }
        if self.min_frame_errors == 0 || self.max_frames == 0 {
            return bad("min_frame_errors and max_frames must be positive");
        }
        if self.max_frames > seeds::MAX_FRAMES {
            return bad("max_frames exceeds the addressable frame range");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if self.decoder.representations() == 0 {
            return bad("decoder needs l >= 1");
        }
        if let DecoderChoice::LeakingMbbp { p_leak, i_max_prime, .. } = self.decoder {
            LeakConfig {
                p_leak,
                i_max_prime,
                mask_seed: 0,
            }
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Builds the parity-check matrix named by `spec`.
pub fn build_code(spec: &CodeSpec, base_dir: Option<&Path>) -> Result<(SparseBinaryMatrix, String)> {
    match spec {
        CodeSpec::Wimax { n } => Ok((qc::wimax_parity_check(*n)?, format!("wimax-{n}"))),
        CodeSpec::Peg { n, seed } => {
            let (h, used) = peg::peg_rate_half_full_rank(*n, *seed, 64)?;
            Ok((h, format!("peg-{n}-s{used}")))
        }
        CodeSpec::Alist { path } => {
            let p = resolve(path, base_dir);
            let h = alist::read_alist(&p)?;
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "alist".into());
            Ok((h, id))
        }
    }
}

fn resolve(path: &Path, base_dir: Option<&Path>) -> PathBuf {
    match base_dir {
        Some(b) if path.is_relative() => b.join(path),
        _ => path.to_path_buf(),
    }
}

/// Error counts of one frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FrameOutcome {
    pub bit_errors: u64,
    pub frame_error: bool,
    pub undetected: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnrPoint {
    pub ebn0_db: f64,
    pub sigma2: f64,
    pub frames_run: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub undetected_frame_errors: u64,
    pub k: usize,
}

impl SnrPoint {
    pub fn fer(&self) -> f64 {
        self.frame_errors as f64 / self.frames_run as f64
    }

    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / (self.frames_run as f64 * self.k as f64)
    }

    /// Binomial standard error of the FER estimate.
    pub fn fer_std_error(&self) -> f64 {
        let p = self.fer();
        (p * (1.0 - p) / self.frames_run as f64).sqrt()
    }
}

/// Frames decoded per parallel batch.
pub const BATCH: u64 = 256;

/// A prepared campaign: code, encoder and decoder bank.
pub struct Campaign {
    pub config: CampaignConfig,
    pub code_id: String,
    pub generator: GeneratorForm,
    pub representations: RepresentationSet,
    decoder: MbbpDecoder,
    rate: f64,
}

impl Campaign {
    /// Builds code and representations; relative paths in the config are
    /// resolved against `base_dir`.
    pub fn prepare(config: CampaignConfig, base_dir: Option<&Path>) -> Result<Self> {
        config.validate()?;
        let (h, code_id) = build_code(&config.code, base_dir)?;
        let l = config.decoder.representations();
        let representations = match &config.reps_dir {
            Some(dir) => {
                let set = RepresentationSet::read_dir(resolve(dir, base_dir))?;
                if set.matrices[0] != h {
                    return Err(Error::Config("representation set belongs to another matrix".into()));
                }
                if set.len() < l {
                    return Err(Error::Config(format!("{} representations stored, {l} needed", set.len())));
                }
                set.prefix(l)
            }
            None if l == 1 => RepresentationSet::single(h.clone(), code_id.clone()),
            None => {
                let pool = redundancy::build_pool(&h, &RowSource::default_for(&h))?;
                redundancy::build_representation_set(
                    &h,
                    &pool,
                    l,
                    redundancy::default_replace_count(h.n_cols()),
                    config.reps_seed,
                    &code_id,
                    &AssemblyConfig::default(),
                )?
            }
        };
        let generator = gf2::systematic_generator(&h)?;
        let rate = generator.k() as f64 / generator.n() as f64;
        let bank = config
            .decoder
            .bank(DecoderConfig::with_iterations(config.max_iterations));
        let decoder = MbbpDecoder::new(&representations, bank)?;
        Ok(Campaign {
            config,
            code_id,
            generator,
            representations,
            decoder,
            rate,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Simulates one frame from its own random stream.
    pub fn run_frame(&self, snr_index: usize, frame: u64) -> Result<FrameOutcome> {
        let db = *self
            .config
            .snr_db
            .get(snr_index)
            .ok_or_else(|| Error::invalid("SNR index out of range"))?;
        let sigma2 = sigma_from_ebn0(db, self.rate);
        let seed = self.config.seed;
        let mut rng = seeds::frame_rng(seed, snr_index, frame);
        let k = self.generator.k();
        let (u, x) = match self.config.source {
            InfoSource::Random => {
                let u = random_bits(k, &mut rng);
                let x = self.generator.encode(&u)?;
                (u, x)
            }
            InfoSource::AllZero => (vec![0; k], vec![0; self.generator.n()]),
        };
        let y = awgn(&modulate(&x), sigma2, &mut rng)?;
        let nonce = seeds::frame_nonce(seed, snr_index, frame);
        let r = self.decoder.decode_with_nonce(&y, sigma2, nonce, false)?;
        let decoded = self.generator.extract_info(&r.selected.hard_decision);
        let bit_errors = decoded.iter().zip(&u).filter(|(a, b)| a != b).count() as u64;
        let frame_error = bit_errors > 0;
        Ok(FrameOutcome {
            bit_errors,
            frame_error,
            undetected: frame_error && r.selected.syndrome_valid,
        })
    }

    /// Runs the SNR grid on a pool of `workers` threads. `progress` is
    /// called after each finished point.
    pub fn run(&self, workers: usize, mut progress: impl FnMut(&SnrPoint)) -> Result<CampaignResult> {
        let pool = worker_pool(workers)?;
        let start = Instant::now();
        let mut points = Vec::with_capacity(self.config.snr_db.len());
        for si in 0..self.config.snr_db.len() {
            let p = self.point_on(&pool, si)?;
            progress(&p);
            points.push(p);
        }
        Ok(self.collect(points, workers, start.elapsed().as_secs_f64()))
    }

    /// Runs the single grid point `snr_index` under the stop rule.
    pub fn run_point(&self, snr_index: usize, workers: usize) -> Result<SnrPoint> {
        self.point_on(&worker_pool(workers)?, snr_index)
    }

    fn point_on(&self, pool: &rayon::ThreadPool, si: usize) -> Result<SnrPoint> {
        let db = *self
            .config
            .snr_db
            .get(si)
            .ok_or_else(|| Error::invalid("SNR index out of range"))?;
        let mut p = SnrPoint {
            ebn0_db: db,
            sigma2: sigma_from_ebn0(db, self.rate),
            frames_run: 0,
            frame_errors: 0,
            bit_errors: 0,
            undetected_frame_errors: 0,
            k: self.generator.k(),
        };
        while p.frames_run < self.config.max_frames {
            let first = p.frames_run;
            let last = (first + BATCH).min(self.config.max_frames);
            let outcomes: Vec<FrameOutcome> = pool.install(|| {
                (first..last)
                    .into_par_iter()
                    .map(|f| self.run_frame(si, f))
                    .collect::<Result<_>>()
            })?;
            for o in outcomes {
                p.frames_run += 1;
                p.bit_errors += o.bit_errors;
                p.frame_errors += u64::from(o.frame_error);
                p.undetected_frame_errors += u64::from(o.undetected);
                if p.frame_errors >= self.config.min_frame_errors {
                    return Ok(p);
                }
            }
        }
        Ok(p)
    }

    /// Wraps finished points with this campaign's provenance.
    pub fn collect(&self, points: Vec<SnrPoint>, workers: usize, wall_time_s: f64) -> CampaignResult {
        let provenance = Provenance {
            config_sha256: self.config.hash(),
            seed: self.config.seed,
            reps_seed: self.representations.seed,
            representation_sub_seeds: self.representations.sub_seeds.clone(),
            code_id: self.code_id.clone(),
            n: self.generator.n(),
            k: self.generator.k(),
            decoder: self.config.decoder.label(),
            decoders_in_bank: self.decoder.len(),
            workers: workers.max(1),
            wall_time_s,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        CampaignResult { points, provenance }
    }
}

fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))
}

/// Where a result came from. Only the CSV is covered by the
/// reproducibility guarantee; `workers` and `wall_time_s` vary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub reps_seed: u64,
    pub representation_sub_seeds: Vec<Option<u64>>,
    pub code_id: String,
    pub n: usize,
    pub k: usize,
    pub decoder: String,
    pub decoders_in_bank: usize,
    pub workers: usize,
    pub wall_time_s: f64,
    pub crate_version: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignResult {
    pub points: Vec<SnrPoint>,
    pub provenance: Provenance,
}

pub const CSV_HEADER: [&str; 8] = [
    "ebn0_db",
    "sigma2",
    "frames",
    "frame_errors",
    "bit_errors",
    "undetected",
    "fer",
    "ber",
];

impl CampaignResult {
    pub fn fer_curve(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.ebn0_db, p.fer())).collect()
    }

    pub fn ber_curve(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.ebn0_db, p.ber())).collect()
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for p in &self.points {
            out.write_record([
                p.ebn0_db.to_string(),
                p.sigma2.to_string(),
                p.frames_run.to_string(),
                p.frame_errors.to_string(),
                p.bit_errors.to_string(),
                p.undetected_frame_errors.to_string(),
                format!("{:e}", p.fer()),
                format!("{:e}", p.ber()),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.csv_string()).map_err(|e| Error::file(path, e))
    }

    pub fn provenance_json(&self) -> String {
        serde_json::to_string_pretty(&self.provenance).expect("provenance serializes")
    }

    /// Writes the provenance next to `csv_path`, as `<stem>.provenance.json`.
    pub fn write_provenance(&self, csv_path: impl AsRef<Path>) -> Result<PathBuf> {
        let p = provenance_path(csv_path.as_ref());
        std::fs::write(&p, self.provenance_json()).map_err(|e| Error::file(&p, e))?;
        Ok(p)
    }
}

pub fn provenance_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".into());
    csv_path.with_file_name(format!("{stem}.provenance.json"))
}

/// One row of a result CSV.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ResultRow {
    pub ebn0_db: f64,
    pub sigma2: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub undetected: u64,
    pub fer: f64,
    pub ber: f64,
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
    let mut rdr = csv::Reader::from_reader(f);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {}", header.join(",")),
        });
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Text table of required SNR per target, one row per labelled curve.
pub fn required_snr_table(rows: &BTreeMap<String, Vec<(f64, f64)>>, target: f64) -> String {
    let mut s = String::new();
    for (label, curve) in rows {
        let v = match crate::bounds::required_snr(curve, target) {
            Ok(db) => format!("{db:.3}"),
            Err(_) => "-".into(),
        };
        let _ = writeln!(s, "{label}\t{v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::tests::hamming74;

    #[test]
    fn conversion() {
        assert!((sigma_from_ebn0(0.0, 0.5) - 1.0).abs() < 1e-15);
        assert!((sigma_from_ebn0(10.0 * 2f64.log10(), 0.5) - 0.5).abs() < 1e-12);
        assert!((sigma_from_ebn0(0.0, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mapping() {
        assert_eq!(modulate(&[0, 1, 0]), vec![1.0, -1.0, 1.0]);
        assert!(modulate(&[0; 5]).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn noise() {
        let x = vec![1.0; 1_000_000];
        let mut r = seeds::rng(1);
        assert_eq!(awgn(&x, 0.0, &mut r).unwrap(), x);
        assert!(awgn(&x, -1.0, &mut r).is_err());
        let y = awgn(&x, 0.64, &mut r).unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (y.len() - 1) as f64;
        assert!((var / 0.64 - 1.0).abs() < 0.01, "{var}");
        assert!((mean - 1.0).abs() < 0.005);
        let a = awgn(&[0.0; 8], 1.0, &mut seeds::rng(5)).unwrap();
        let b = awgn(&[0.0; 8], 1.0, &mut seeds::rng(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn encoding() {
        let g = gf2::systematic_generator(&hamming74()).unwrap();
        assert_eq!(encode(&g, &[0; 4]).unwrap(), vec![0; 7]);
        for i in 0..4 {
            let mut u = vec![0; 4];
            u[i] = 1;
            let c = encode(&g, &u).unwrap();
            assert!(c.iter().filter(|&&b| b == 1).count() >= 3);
            assert_eq!(g.extract_info(&c), u);
        }
        assert!(encode(&g, &[0; 3]).is_err());
    }

    #[test]
    fn config_parsing() {
        let text = r#"
            code = { kind = "wimax", n = 576 }
            decoder = { kind = "leaking-mbbp", l = 15 }
            snr_db = [1.0, 1.25]
            seed = 3
        "#;
        let c = CampaignConfig::from_toml(text).unwrap();
        assert_eq!(c.min_frame_errors, 100);
        assert_eq!(c.max_iterations, 200);
        assert_eq!(c.source, InfoSource::Random);
        assert_eq!(
            c.decoder,
            DecoderChoice::LeakingMbbp {
                l: 15,
                p_leak: 0.9,
                i_max_prime: 300,
                mask_seed: 0
            }
        );
        assert_eq!(c.decoder.bank(DecoderConfig::default()).specs.len(), 30);
        let back = CampaignConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        assert_eq!(c.hash().len(), 64);

        let bad = text.replace("[1.0, 1.25]", "[1.25, 1.0]");
        assert!(matches!(CampaignConfig::from_toml(&bad), Err(Error::Config(_))));
        let unknown = format!("{text}\nbogus = 1\n");
        assert!(matches!(CampaignConfig::from_toml(&unknown), Err(Error::Config(_))));
    }

    fn small_campaign(source: InfoSource, snr: Vec<f64>, max_frames: u64) -> Campaign {
        let cfg = CampaignConfig {
            code: CodeSpec::Wimax { n: 576 },
            decoder: DecoderChoice::Bp,
            reps_seed: 1,
            reps_dir: None,
            max_iterations: 30,
            snr_db: snr,
            min_frame_errors: 1_000_000,
            max_frames,
            seed: 9,
            source,
        };
        Campaign::prepare(cfg, None).unwrap()
    }

    #[test]
    fn frames_replay_and_counters_add_up() {
        let c = small_campaign(InfoSource::Random, vec![0.5], 300);
        let r = c.run(1, |_| {}).unwrap();
        let p = &r.points[0];
        assert_eq!(p.frames_run, 300);
        let mut fe = 0;
        let mut be = 0;
        let mut ud = 0;
        for f in 0..300 {
            let o = c.run_frame(0, f).unwrap();
            assert_eq!(o, c.run_frame(0, f).unwrap());
            fe += u64::from(o.frame_error);
            be += o.bit_errors;
            ud += u64::from(o.undetected);
        }
        assert_eq!((fe, be, ud), (p.frame_errors, p.bit_errors, p.undetected_frame_errors));
        assert!(p.undetected_frame_errors <= p.frame_errors);
        assert!(p.bit_errors <= p.frames_run * 288);
        assert!(p.ber() <= p.fer() * 576.0 / 288.0);
        assert!(p.frame_errors > 0);
    }

    #[test]
    fn stop_rule_is_exact() {
        let mut c = small_campaign(InfoSource::AllZero, vec![0.0], 10_000);
        c.config.min_frame_errors = 7;
        let r = c.run(1, |_| {}).unwrap();
        let p = &r.points[0];
        assert_eq!(p.frame_errors, 7);
        assert!(c.run_frame(0, p.frames_run - 1).unwrap().frame_error);
    }

    #[test]
    fn csv_round_trip() {
        let c = small_campaign(InfoSource::AllZero, vec![1.0, 2.0], 64);
        let r = c.run(2, |_| {}).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("res.csv");
        r.write_csv_file(&p).unwrap();
        let prov = r.write_provenance(&p).unwrap();
        assert!(prov.ends_with("res.provenance.json"));
        let rows = read_results_csv(&p).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].frames, 64);
        assert_eq!(rows[1].ebn0_db, 2.0);
        assert_eq!(r.csv_string().lines().next().unwrap(), CSV_HEADER.join(","));
        let v: serde_json::Value = serde_json::from_str(&r.provenance_json()).unwrap();
        assert_eq!(v["config_sha256"].as_str().unwrap(), c.config.hash());
    }
}
