//! `mbbp`: construct codes, build representation sets, run link
//! simulations and tabulate required SNR.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use mbbp_lab::bounds::{self, BoundCurve};
use mbbp_lab::bp::{DecoderConfig, LeakConfig};
use mbbp_lab::mbbp::{MbbpConfig, MbbpDecoder};
use mbbp_lab::peg::{self, DegreeDistribution, PegManifest};
use mbbp_lab::redundancy::{self, AssemblyConfig, RepresentationSet, RowSource};
use mbbp_lab::sim::{self, Campaign, CampaignConfig};
use mbbp_lab::{alist, gf2, qc, seeds, Error};

#[derive(Parser, Debug)]
#[command(name = "mbbp", version, about = "LDPC construction, MBBP decoding and AWGN link simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the rate-1/2 quasi-cyclic parity-check matrix of length n.
    ConstructWimax {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the renormalized base matrix as text.
        #[arg(long)]
        base_out: Option<PathBuf>,
    },
    /// Build a rate-1/2 PEG code of length n with full rank.
    ConstructPeg {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Construction manifest; defaults to `<out>.manifest.txt`.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Seeds tried, counting up from --seed, before giving up on full rank.
        #[arg(long, default_value_t = 64)]
        max_tries: u64,
    },
    /// Generate l parity-check representations of one code.
    GenReps {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Rows replaced per representation; defaults by code length.
        #[arg(long)]
        replace: Option<usize>,
    },
    /// Transmit and decode a single random frame, printing every decoder.
    DecodeOne {
        #[arg(long)]
        code: PathBuf,
        /// Representation directory; without it only the code itself is used.
        #[arg(long)]
        reps: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = DecoderArg::Bp)]
        decoder: DecoderArg,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long)]
        ebn0: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
    },
    /// Run a simulation campaign described by a TOML file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "MBBP_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        quiet: bool,
    },
    /// Gallager bound curve with BER by the Gilbert-Varshamov distance.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
        #[arg(long, default_value_t = 0.0)]
        snr_start: f64,
        #[arg(long, default_value_t = 4.0)]
        snr_stop: f64,
        #[arg(long, default_value_t = 0.1)]
        snr_step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Required SNR at target BER and FER for result CSV files.
    Summarize {
        #[arg(required = true)]
        results: Vec<PathBuf>,
        #[arg(long, default_value_t = 1e-5)]
        ber_target: f64,
        #[arg(long, default_value_t = 1e-3)]
        fer_target: f64,
        /// Add the Gallager bound of this length to the table.
        #[arg(long)]
        bound_n: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Base,
    Cycles,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DecoderArg {
    Bp,
    Mbbp,
    LeakingMbbp,
}

/// Exit status 2: bad input; 1: the work itself failed.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

/// Library errors caused by the input are usage errors.
fn classify(e: Error) -> Failure {
    match e {
        Error::Config(_)
        | Error::File { .. }
        | Error::Parse { .. }
        | Error::InvalidArgument(_)
        | Error::ShiftOutOfRange { .. } => Failure::Usage(e.into()),
        other => Failure::Runtime(other.into()),
    }
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::ConstructWimax { n, out, base_out } => construct_wimax(n, &out, base_out.as_deref()),
        Command::ConstructPeg {
            n,
            seed,
            out,
            manifest,
            max_tries,
        } => construct_peg(n, seed, &out, manifest, max_tries),
        Command::GenReps {
            code,
            l,
            seed,
            out,
            method,
            replace,
        } => gen_reps(&code, l, seed, &out, method, replace),
        Command::DecodeOne {
            code,
            reps,
            decoder,
            l,
            ebn0,
            seed,
            max_iterations,
        } => decode_one(&code, reps.as_deref(), decoder, l, ebn0, seed, max_iterations),
        Command::Simulate {
            config,
            out,
            workers,
            quiet,
        } => simulate(&config, &out, workers, quiet),
        Command::Bounds {
            n,
            rate,
            snr_start,
            snr_stop,
            snr_step,
            out,
        } => bounds_cmd(n, rate, snr_start, snr_stop, snr_step, &out),
        Command::Summarize {
            results,
            ber_target,
            fer_target,
            bound_n,
            rate,
        } => summarize(&results, ber_target, fer_target, bound_n, rate),
    }
}

/// Refuses to write over one of the command's inputs.
fn ensure_not_input(out: &Path, inputs: &[&Path]) -> CliResult<()> {
    let Ok(o) = out.canonicalize() else {
        return Ok(());
    };
    for i in inputs {
        if i.canonicalize().is_ok_and(|c| c == o) {
            return Err(usage(anyhow!("output {} would overwrite an input", out.display())));
        }
    }
    Ok(())
}

fn construct_wimax(n: usize, out: &Path, base_out: Option<&Path>) -> CliResult<()> {
    if !qc::WIMAX_LENGTHS.contains(&n) {
        return Err(usage(anyhow!("n must be one of {:?}", qc::WIMAX_LENGTHS)));
    }
    let h = qc::wimax_parity_check(n).map_err(classify)?;
    alist::write_alist(out, &h).map_err(runtime)?;
    if let Some(p) = base_out {
        let base = qc::wimax_renormalized(n).map_err(classify)?;
        std::fs::write(p, base.to_text())
            .with_context(|| format!("writing {}", p.display()))
            .map_err(runtime)?;
    }
    let weights: std::collections::BTreeSet<usize> = h.row_weights().into_iter().collect();
    println!(
        "wrote {}: {}x{}, row weights {:?}",
        out.display(),
        h.n_rows(),
        h.n_cols(),
        weights
    );
    Ok(())
}

fn construct_peg(n: usize, seed: u64, out: &Path, manifest: Option<PathBuf>, max_tries: u64) -> CliResult<()> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(usage(anyhow!("n must be even and at least 4")));
    }
    let dist = DegreeDistribution::optimized_rate_half();
    if dist.max_degree() > n / 2 {
        return Err(usage(anyhow!("n = {n} is too short for the degree distribution")));
    }
    let (h, used) = peg::peg_rate_half_full_rank(n, seed, max_tries).map_err(runtime)?;
    let m = PegManifest::describe(&h, used, &dist);
    alist::write_alist(out, &h).map_err(runtime)?;
    let mpath = manifest.unwrap_or_else(|| {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.txt");
        PathBuf::from(s)
    });
    std::fs::write(&mpath, m.to_text())
        .with_context(|| format!("writing {}", mpath.display()))
        .map_err(runtime)?;
    println!(
        "wrote {}: {}x{}, seed {used}, girth {}, rank {}",
        out.display(),
        h.n_rows(),
        h.n_cols(),
        m.girth.map_or("inf".to_string(), |g| g.to_string()),
        m.rank
    );
    Ok(())
}

fn gen_reps(code: &Path, l: usize, seed: u64, out: &Path, method: Method, replace: Option<usize>) -> CliResult<()> {
    if l == 0 {
        return Err(usage(anyhow!("--l must be at least 1")));
    }
    let h = alist::read_alist(code).map_err(classify)?;
    let wimax = qc::identify_wimax(&h);
    let source = match (method, wimax) {
        (Method::Base, None) => {
            return Err(usage(anyhow!("--method base needs a lifted rate-1/2 quasi-cyclic matrix")));
        }
        (Method::Base, Some(_)) | (Method::Auto, _) => RowSource::default_for(&h),
        (Method::Cycles, _) => RowSource::Cycles {
            lengths: vec![4, 6],
            max_rows_per_length: 20_000,
        },
    };
    let cfg = AssemblyConfig::default();
    let replace = replace.unwrap_or_else(|| redundancy::default_replace_count(h.n_cols()));
    if replace == 0 || replace > h.n_rows() {
        return Err(usage(anyhow!("--replace must lie in 1..={}", h.n_rows())));
    }
    let manifest = out.join("manifest.txt");
    ensure_not_input(&manifest, &[code])?;
    for i in 1..=l {
        ensure_not_input(&out.join(format!("H_{i:02}.alist")), &[code])?;
    }
    let code_id = match wimax {
        Some(n) => format!("wimax-{n}"),
        None => code
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "code".into()),
    };
    let pool = redundancy::build_pool(&h, &source).map_err(runtime)?;
    let set = redundancy::build_representation_set(&h, &pool, l, replace, seed, &code_id, &cfg).map_err(runtime)?;
    set.validate().map_err(runtime)?;
    set.write_dir(out).map_err(runtime)?;
    println!(
        "wrote {} representations of {code_id} to {} ({} pool rows from {})",
        set.len(),
        out.display(),
        pool.len(),
        source.name()
    );
    Ok(())
}

fn decode_one(
    code: &Path,
    reps: Option<&Path>,
    decoder: DecoderArg,
    l: usize,
    ebn0: f64,
    seed: u64,
    max_iterations: usize,
) -> CliResult<()> {
    if l == 0 || max_iterations == 0 {
        return Err(usage(anyhow!("--l and --max-iterations must be positive")));
    }
    let h = alist::read_alist(code).map_err(classify)?;
    let set = match reps {
        Some(d) => RepresentationSet::read_dir(d).map_err(classify)?,
        None => RepresentationSet::single(h.clone(), "code"),
    };
    if set.matrices[0] != h {
        return Err(usage(anyhow!("representation set belongs to another matrix")));
    }
    let dc = DecoderConfig::with_iterations(max_iterations);
    let bank = match decoder {
        DecoderArg::Bp => MbbpConfig::mbbp(1, dc),
        DecoderArg::Mbbp => MbbpConfig::mbbp(l, dc),
        DecoderArg::LeakingMbbp => MbbpConfig::leaking_mbbp(l, LeakConfig::with_seed(seed), dc),
    };
    let dec = MbbpDecoder::new(&set, bank).map_err(classify)?;
    let g = gf2::systematic_generator(&h).map_err(runtime)?;
    let rate = g.k() as f64 / g.n() as f64;
    let sigma2 = sim::sigma_from_ebn0(ebn0, rate);
    let mut rng = seeds::frame_rng(seed, 0, 0);
    let u = sim::random_bits(g.k(), &mut rng);
    let x = g.encode(&u).map_err(runtime)?;
    let y = sim::awgn(&sim::modulate(&x), sigma2, &mut rng).map_err(runtime)?;
    let r = dec
        .decode_with_nonce(&y, sigma2, seeds::frame_nonce(seed, 0, 0), false)
        .map_err(runtime)?;
    println!("decoder\tvalid\titerations\tcorrelation");
    for (i, c) in r.per_decoder.iter().enumerate() {
        println!("{i}\t{}\t{}\t{:.4}", c.syndrome_valid, c.iterations_used, c.correlation);
    }
    let errors = g
        .extract_info(&r.selected.hard_decision)
        .iter()
        .zip(&u)
        .filter(|(a, b)| a != b)
        .count();
    println!(
        "selected {} (any valid: {}), information bit errors: {errors}",
        r.selected_index, r.any_valid
    );
    Ok(())
}

fn simulate(config: &Path, out: &Path, workers: Option<usize>, quiet: bool) -> CliResult<()> {
    let cfg = CampaignConfig::read(config).map_err(classify)?;
    ensure_not_input(out, &[config])?;
    let workers = match workers {
        Some(0) => return Err(usage(anyhow!("--workers must be positive"))),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let base = config.parent();
    let campaign = Campaign::prepare(cfg, base).map_err(classify)?;
    let result = campaign
        .run(workers, |p| {
            if !quiet {
                eprintln!(
                    "{:>6.2} dB  frames {:>8}  frame errors {:>5}  FER {:.3e}  BER {:.3e}",
                    p.ebn0_db,
                    p.frames_run,
                    p.frame_errors,
                    p.fer(),
                    p.ber()
                );
            }
        })
        .map_err(runtime)?;
    result.write_csv_file(out).map_err(runtime)?;
    let prov = result.write_provenance(out).map_err(runtime)?;
    if !quiet {
        eprintln!("wrote {} and {}", out.display(), prov.display());
    }
    Ok(())
}

fn bounds_cmd(n: usize, rate: f64, start: f64, stop: f64, step: f64, out: &Path) -> CliResult<()> {
    if n < 2 || !(rate > 0.0 && rate < 1.0) {
        return Err(usage(anyhow!("need n >= 2 and 0 < rate < 1")));
    }
    let grid = bounds::snr_grid(start, stop, step).map_err(classify)?;
    let curve = BoundCurve::compute(n, rate, &grid).map_err(classify)?;
    curve.write_csv_file(out).map_err(runtime)?;
    println!("wrote {} points to {} (d_gv = {})", curve.points.len(), out.display(), curve.d_gv);
    Ok(())
}

fn summarize(results: &[PathBuf], ber_target: f64, fer_target: f64, bound_n: Option<usize>, rate: f64) -> CliResult<()> {
    let mut ber: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut fer: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for p in results {
        let rows = sim::read_results_csv(p).map_err(classify)?;
        let label = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string());
        ber.insert(label.clone(), rows.iter().map(|r| (r.ebn0_db, r.ber)).collect());
        fer.insert(label, rows.iter().map(|r| (r.ebn0_db, r.fer)).collect());
    }
    let mut bound_rows = Vec::new();
    if let Some(n) = bound_n {
        if !(rate > 0.0 && rate < 1.0) || n < 2 {
            return Err(usage(anyhow!("need n >= 2 and 0 < rate < 1 for the bound")));
        }
        let k = ((n as f64) * rate).round() as usize;
        let d = bounds::gv_distance(n, k);
        let fer_db = bounds::gallager_required_snr(n, rate, fer_target).map_err(runtime)?;
        // BER target t corresponds to FER target t·n/d
        let ber_db = bounds::gallager_required_snr(n, rate, (ber_target * n as f64 / d as f64).min(0.999_999))
            .map_err(runtime)?;
        bound_rows.push((format!("gallager-n{n}"), ber_db, fer_db));
    }
    let fmt = |c: &[(f64, f64)], t: f64| match bounds::required_snr(c, t) {
        Ok(v) => format!("{v:.3}"),
        Err(_) => "-".to_string(),
    };
    println!("curve\tBER={ber_target:e}\tFER={fer_target:e}");
    for (label, b) in &ber {
        println!("{label}\t{}\t{}", fmt(b, ber_target), fmt(&fer[label], fer_target));
    }
    for (label, b, f) in bound_rows {
        println!("{label}\t{b:.3}\t{f:.3}");
    }
    Ok(())
}
