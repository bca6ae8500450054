//! `nidkit` command-line front end.

mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nidkit::approx::{classify, fluctuation_count};
use nidkit::complexity::{k_time, k_upper_trace, ScheduleEntry};
use nidkit::constructions::{
    diagonal_nid, diagonal_u, diagonal_violations, encode_length, gap_sweep, nid_surrogate_traces,
    s_of_n,
};
use nidkit::ncd::{
    self, load_dir, load_manifest, synthetic_corpus, upgma, Builtin, CommandCompressor, Compressor,
    DistanceMatrix, SyntheticSpec, DEFAULT_SEED,
};
use nidkit::prefix_machine::{literal_bound, machine_spec_document, StepBound};
use nidkit::BitString;
use num_rational::BigRational;
use serde::Serialize;

use output::{emit, header};

#[derive(Parser, Debug)]
#[command(name = "nidkit", version, about = "Information-distance experiments and NCD clustering")]
struct Cli {
    /// Worker threads for enumeration and matrix fill (0 = rayon default).
    /// Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the frozen opcode table.
    MachineSpec(OutArgs),
    /// Time-bounded K^t(x | y) with its witness program.
    Ktime(KtimeArgs),
    /// Diagonal string u of length n and its brute-force verification.
    Lemma1(Lemma1Args),
    /// XOR gap experiment over a range of n.
    Gap(GapArgs),
    /// Approximation trace of K^t (upper) or 1/K^t (diagonal) along a schedule.
    Trace(TraceArgs),
    /// Threshold index s(n) over all pairs of length n, using the shipped
    /// surrogate traces.
    SOfN(SOfNArgs),
    /// Write the synthetic Markov corpus to a directory.
    SynthCorpus(SynthArgs),
    /// NCD distance matrix of a corpus directory or manifest.
    NcdMatrix(MatrixArgs),
    /// UPGMA tree (Newick) from a TSV distance matrix.
    NcdCluster(ClusterArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
struct BoundArgs {
    /// t(n) = a·n^b + c
    #[arg(long, default_value_t = 8)]
    bound_a: u64,
    #[arg(long, default_value_t = 1)]
    bound_b: u32,
    #[arg(long, default_value_t = 16)]
    bound_c: u64,
}

impl BoundArgs {
    fn bound(&self) -> StepBound {
        StepBound::new(self.bound_a, self.bound_b, self.bound_c)
    }
}

/// Missing parts default to those of `2·t`.
#[derive(Args, Debug, Clone, Copy, Serialize)]
struct PrimeArgs {
    #[arg(long)]
    prime_a: Option<u64>,
    #[arg(long)]
    prime_b: Option<u32>,
    #[arg(long)]
    prime_c: Option<u64>,
}

impl PrimeArgs {
    fn bound(&self, t: &StepBound) -> StepBound {
        let d = t.doubled();
        StepBound::new(
            self.prime_a.unwrap_or(d.a),
            self.prime_b.unwrap_or(d.b),
            self.prime_c.unwrap_or(d.c),
        )
    }
}

fn parse_bits(s: &str) -> Result<BitString, String> {
    BitString::parse_human(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone, Serialize)]
struct KtimeArgs {
    /// Target string (binary digits).
    #[arg(long, value_parser = parse_bits)]
    #[serde(serialize_with = "ser_bits")]
    x: BitString,
    /// Conditional string; `eps` for empty.
    #[arg(long, value_parser = parse_bits, default_value = "eps")]
    #[serde(serialize_with = "ser_bits")]
    y: BitString,
    #[command(flatten)]
    bound: BoundArgs,
    /// Longest program searched; defaults to the literal bound for |x|.
    #[arg(long)]
    cap: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Lemma1Args {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    bound: BoundArgs,
    #[command(flatten)]
    prime: PrimeArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GapArgs {
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[command(flatten)]
    bound: BoundArgs,
    #[command(flatten)]
    prime: PrimeArgs,
    /// Search cap for E^t; defaults to the literal bound for n_max.
    #[arg(long)]
    cap: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum TraceMode {
    Upper,
    Diagonal,
}

#[derive(Args, Debug, Clone, Serialize)]
struct TraceArgs {
    #[arg(long, value_parser = parse_bits)]
    #[serde(serialize_with = "ser_bits")]
    x: BitString,
    /// Conditional for upper traces; `eps` for empty.
    #[arg(long, value_parser = parse_bits, default_value = "eps")]
    #[serde(serialize_with = "ser_bits")]
    y: BitString,
    /// Schedule `a,b,c,cap;a,b,c,cap;...` with growing bounds and caps.
    #[arg(long)]
    schedule: String,
    #[arg(long, value_enum, default_value_t = TraceMode::Upper)]
    mode: TraceMode,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SOfNArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    c: u64,
    #[arg(long, default_value_t = 64)]
    step_cap: usize,
    /// Schedule `a,b,c,cap;...` for the surrogate traces.
    #[arg(long, default_value = "1,1,6,17;1,1,12,17;1,1,18,17;1,1,24,17")]
    schedule: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SynthArgs {
    /// Directory to create the files in.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    families: usize,
    #[arg(long, default_value_t = 4)]
    per_family: usize,
    #[arg(long, default_value_t = 4096)]
    item_len: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
struct MatrixArgs {
    /// A directory (label = file name) or a manifest of `label,path` lines.
    #[arg(long)]
    corpus: PathBuf,
    /// External compressor command reading stdin, writing stdout. The
    /// built-in compressor is used when absent.
    #[arg(long)]
    compressor_cmd: Option<String>,
    /// Call the external compressor from one thread only.
    #[arg(long)]
    serial_compressor: bool,
    /// TSV matrix output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exact rational report (JSON); defaults to `<out>.json` when --out is set.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ClusterArgs {
    /// TSV matrix as written by ncd-matrix.
    #[arg(long)]
    matrix: PathBuf,
    /// Also print the clusters left after undoing the top k-1 merges.
    #[arg(long)]
    cut: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

fn ser_bits<S: serde::Serializer>(b: &BitString, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&b.human())
}

fn parse_schedule(spec: &str) -> Result<Vec<ScheduleEntry>> {
    spec.split(';')
        .filter(|e| !e.trim().is_empty())
        .map(|entry| {
            let f: Vec<&str> = entry.split(',').map(str::trim).collect();
            let [a, b, c, cap] = f[..] else {
                bail!("schedule entry {entry:?} needs a,b,c,cap");
            };
            Ok(ScheduleEntry::new(
                StepBound::new(a.parse()?, b.parse()?, c.parse()?),
                cap.parse()?,
            ))
        })
        .collect()
}

fn rational(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// `Ok(false)` is a failed post-verification.
fn dispatch(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::MachineSpec(a) => {
            emit(a.out.as_deref(), &machine_spec_document())?;
            Ok(true)
        }
        Cmd::Ktime(a) => cmd_ktime(a),
        Cmd::Lemma1(a) => cmd_lemma1(a),
        Cmd::Gap(a) => cmd_gap(a),
        Cmd::Trace(a) => cmd_trace(a),
        Cmd::SOfN(a) => cmd_s_of_n(a),
        Cmd::SynthCorpus(a) => cmd_synth(a),
        Cmd::NcdMatrix(a) => cmd_ncd_matrix(a),
        Cmd::NcdCluster(a) => cmd_ncd_cluster(a),
    }
}

fn cmd_ktime(a: KtimeArgs) -> Result<bool> {
    let cap = a.cap.unwrap_or_else(|| literal_bound(a.x.len()));
    let k = k_time(&a.x, &a.y, &a.bound.bound(), cap)?;
    let mut s = header("ktime", &a)?;
    writeln!(s, "{}", k.to_record())?;
    emit(a.out.out.as_deref(), &s)?;
    Ok(true)
}

fn cmd_lemma1(a: Lemma1Args) -> Result<bool> {
    let tp = a.prime.bound(&a.bound.bound());
    let u = diagonal_u(a.n, &tp)?;
    let bad = diagonal_violations(&u, a.n, &tp);
    let mut s = header("lemma1", &a)?;
    writeln!(
        s,
        "n={} conditional={} bound_prime={} u={} checked_codes_below={} violations={}",
        a.n,
        encode_length(a.n),
        tp,
        u,
        a.n,
        bad.len()
    )?;
    for p in &bad {
        writeln!(s, "violation code={}", p.code)?;
    }
    emit(a.out.out.as_deref(), &s)?;
    Ok(bad.is_empty())
}

fn cmd_gap(a: GapArgs) -> Result<bool> {
    if a.n_min == 0 || a.n_min > a.n_max {
        bail!("need 1 <= n_min <= n_max");
    }
    let t = a.bound.bound();
    let tp = a.prime.bound(&t);
    let cap = a.cap.unwrap_or_else(|| literal_bound(a.n_max));
    let sweep = gap_sweep(a.n_min..=a.n_max, &t, &tp, cap)?;
    let mut s = header("gap", &a)?;
    for r in &sweep.reports {
        writeln!(s, "{}", r.to_record())?;
    }
    let n0 = sweep.n0.map_or_else(|| "none".to_string(), |n| n.to_string());
    writeln!(
        s,
        "summary trend_holds={} witness_growth={} n0={n0}",
        sweep.trend_holds, sweep.witness_growth
    )?;
    if !sweep.trend_holds {
        log::warn!("E^t trend does not rise over the sweep; bound_prime {tp} may be too small");
    }
    emit(a.out.out.as_deref(), &s)?;
    Ok(true)
}

fn cmd_trace(a: TraceArgs) -> Result<bool> {
    let schedule = parse_schedule(&a.schedule)?;
    let trace = match a.mode {
        TraceMode::Upper => k_upper_trace(&a.x, &a.y, &schedule)?,
        TraceMode::Diagonal => diagonal_nid(&a.x, &schedule)?,
    };
    let mut s = header("trace", &a)?;
    writeln!(
        s,
        "# class={} fluctuations={}",
        classify(&trace),
        fluctuation_count(&trace)
    )?;
    s.push_str(&trace.to_text());
    emit(a.out.out.as_deref(), &s)?;
    Ok(true)
}

fn cmd_s_of_n(a: SOfNArgs) -> Result<bool> {
    let schedule = parse_schedule(&a.schedule)?;
    let s_n = s_of_n(a.n, |x, y| nid_surrogate_traces(x, y, &schedule), a.c, a.step_cap)?;
    let mut s = header("s-of-n", &a)?;
    let value = s_n.map_or_else(|| "exhausted".to_string(), |v| v.to_string());
    writeln!(s, "n={} c={} step_cap={} s={value}", a.n, a.c, a.step_cap)?;
    emit(a.out.out.as_deref(), &s)?;
    Ok(true)
}

fn cmd_synth(a: SynthArgs) -> Result<bool> {
    let spec = SyntheticSpec {
        families: a.families,
        per_family: a.per_family,
        item_len: a.item_len,
        seed: a.seed,
        ..SyntheticSpec::default()
    };
    let corpus = synthetic_corpus(&spec);
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for it in &corpus.items {
        let p = a.out.join(&it.label);
        std::fs::write(&p, &it.payload).with_context(|| format!("writing {}", p.display()))?;
    }
    let dir_name = a
        .out
        .file_name()
        .ok_or_else(|| anyhow!("--out needs a directory name"))?
        .to_string_lossy()
        .into_owned();
    let mut manifest = header("synth-corpus", &a)?;
    for it in &corpus.items {
        writeln!(manifest, "{},{dir_name}/{}", it.label, it.label)?;
    }
    // the manifest lives beside the corpus, outside the item files
    let m = a.out.with_extension("manifest");
    std::fs::write(&m, manifest).with_context(|| format!("writing {}", m.display()))?;
    Ok(true)
}

fn load_corpus(path: &Path) -> Result<Vec<ncd::CorpusItem>> {
    let items = if path.is_dir() {
        load_dir(path)?
    } else {
        load_manifest(path)?
    };
    Ok(items)
}

fn cmd_ncd_matrix(a: MatrixArgs) -> Result<bool> {
    let corpus = load_corpus(&a.corpus)?;
    let external = match &a.compressor_cmd {
        Some(cmd) => {
            let c = CommandCompressor::parse(cmd).ok_or_else(|| anyhow!("empty --compressor-cmd"))?;
            Some(if a.serial_compressor { c.serial() } else { c })
        }
        None => None,
    };
    let compressor: &dyn Compressor = match &external {
        Some(c) => c,
        None => &Builtin,
    };
    let m = ncd::matrix(&corpus, compressor)?;
    let mut tsv = header("ncd-matrix", &a)?;
    writeln!(tsv, "# compressor {}", compressor.name())?;
    tsv.push_str(&m.to_tsv());
    emit(a.out.as_deref(), &tsv)?;

    let report_path = a
        .report
        .clone()
        .or_else(|| a.out.as_ref().map(|o| PathBuf::from(format!("{}.json", o.display()))));
    if let Some(rp) = report_path {
        let audit = m.triangle_audit(&BigRational::new(1.into(), 20.into()));
        let report = serde_json::json!({
            "tool": format!("nidkit {}", env!("CARGO_PKG_VERSION")),
            "compressor": compressor.name(),
            "config": &a,
            "labels": m.labels(),
            "entries": m.rows().iter().map(|r| r.iter().map(rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "symmetric": m.is_symmetric(),
            "triangle_audit": {
                "slack": "1/20",
                "violations": audit.violations,
                "triples": audit.triples,
                "max_excess": rational(&audit.max_excess),
            },
        });
        emit(Some(&rp), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    Ok(m.is_symmetric())
}

fn cmd_ncd_cluster(a: ClusterArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&a.matrix)
        .with_context(|| format!("reading {}", a.matrix.display()))?;
    let m = DistanceMatrix::from_tsv(&text)?;
    let tree = upgma(&m);
    let mut s = header("ncd-cluster", &a)?;
    if let Some(k) = a.cut {
        for (i, cluster) in tree.cut(k).iter().enumerate() {
            writeln!(s, "# cluster {i}: {}", cluster.join(" "))?;
        }
    }
    writeln!(s, "{}", tree.to_newick())?;
    emit(a.out.out.as_deref(), &s)?;
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("nidkit: cannot size thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("nidkit: post-verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("nidkit: {e:#}");
            ExitCode::from(2)
        }
    }
}
