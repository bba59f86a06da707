use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use dotstitch_core::datasetgen::{
    build_dataset, file_stem, read_manifest, BppmSource, FoldingSource, TsvDirSource, CNN_MANIFEST,
    DOTPLOT_DIR,
};
use dotstitch_core::dotplot::{bppm_to_dotplot, resize_bilinear, write_bppm_tsv, write_png};
use dotstitch_core::evalkit::{
    evaluate, make_batch_plan, read_predictions, roc, EvalReport, Ratio, DEFAULT_THRESHOLD,
};
use dotstitch_core::seeds;
use dotstitch_core::seqcore::{fetch_family, filter_by_length, load_family_dir, RetryPolicy};
use dotstitch_core::thermo::{
    base_pair_probabilities, enumerate_structures, oracle_bppm, partition_function,
};
use dotstitch_core::{Bppm, FamilyCollection, RnaSequence, RunConfig};

use crate::{config, Command, GlobalArgs};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_IO: u8 = 3;

pub const BPPM_DIR: &str = "bppm";

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = classify(&error);
        Failure { code, error }
    }
}

impl From<dotstitch_core::Error> for Failure {
    fn from(error: dotstitch_core::Error) -> Self {
        anyhow::Error::from(error).into()
    }
}

fn classify(error: &anyhow::Error) -> u8 {
    for cause in error.chain() {
        if let Some(e) = cause.downcast_ref::<dotstitch_core::Error>() {
            return if e.is_io() { EXIT_IO } else { EXIT_DATA };
        }
        if cause.is::<io::Error>() {
            return EXIT_IO;
        }
        if cause.is::<toml::de::Error>() {
            return EXIT_USAGE;
        }
    }
    EXIT_DATA
}

/// Relative paths resolve against the output directory; absolute ones pass through.
fn resolve(cfg: &RunConfig, p: &Path) -> PathBuf {
    cfg.out_dir.join(p)
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: anyhow!(msg.into()),
    }
}

pub fn run(global: GlobalArgs, command: Command) -> Result<(), Failure> {
    let mut cfg = config::load(global.config.as_deref()).map_err(|e| Failure {
        code: if e.chain().any(|c| c.is::<io::Error>()) {
            EXIT_IO
        } else {
            EXIT_USAGE
        },
        error: e,
    })?;
    config::apply_overrides(&mut cfg, &global);
    cfg.fold_params()
        .validate()
        .map_err(|e| usage(e.to_string()))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = global.jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;

    pool.install(|| match command {
        Command::Fetch(args) => cmd_fetch(&cfg, args),
        Command::Bppm(args) => cmd_bppm(&mut cfg, args),
        Command::Build(args) => cmd_build(&mut cfg, args),
        Command::Plan(args) => cmd_plan(&mut cfg, args),
        Command::Eval(args) => cmd_eval(&cfg, args),
        Command::Oracle(args) => cmd_oracle(&cfg, args),
    })
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Family accessions, e.g. RF00001.
    #[arg(required = true)]
    accessions: Vec<String>,

    /// Archive base URL; files are fetched from `<endpoint>/<accession>.fasta`.
    #[arg(long, env = dotstitch_core::seqcore::RFAM_URL_ENV)]
    endpoint: Option<String>,

    /// Destination directory (default: config input_dir).
    #[arg(long)]
    dest: Option<PathBuf>,

    /// Download even when a nonempty file is already present.
    #[arg(long)]
    force: bool,

    #[arg(long, default_value_t = 3)]
    retries: u32,
}

fn cmd_fetch(cfg: &RunConfig, args: FetchArgs) -> Result<(), Failure> {
    let endpoint = args.endpoint.ok_or_else(|| {
        usage(format!(
            "no endpoint: pass --endpoint or set {}",
            dotstitch_core::seqcore::RFAM_URL_ENV
        ))
    })?;
    let dest = resolve(cfg, args.dest.as_deref().unwrap_or(&cfg.input_dir));
    let retry = RetryPolicy {
        attempts: args.retries.max(1),
        ..RetryPolicy::default()
    };
    let results: Vec<_> = args
        .accessions
        .par_iter()
        .map(|acc| fetch_family(acc, &endpoint, &dest, args.force, &retry))
        .collect();
    for r in results {
        let path = r.context("fetch failed")?;
        println!("{}", path.display());
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct BppmArgs {
    /// Directory of `<family>.fasta` files (default: config input_dir).
    #[arg(long)]
    input: Option<PathBuf>,

    /// Dot-plot side after resizing.
    #[arg(long)]
    side: Option<usize>,

    /// Recompute outputs even if they are newer than their FASTA file.
    #[arg(long)]
    force: bool,
}

fn up_to_date(outputs: &[&Path], source_mtime: Option<std::time::SystemTime>) -> bool {
    let Some(src) = source_mtime else {
        return false;
    };
    outputs.iter().all(|p| {
        fs::metadata(p)
            .and_then(|m| m.modified())
            .is_ok_and(|t| t >= src)
    })
}

fn check_stems(c: &FamilyCollection) -> anyhow::Result<()> {
    let mut stems: HashMap<String, &str> = HashMap::new();
    for s in c.sequences() {
        if let Some(other) = stems.insert(file_stem(s.id()), s.id()) {
            return Err(
                dotstitch_core::Error::FileNameCollision(other.into(), s.id().into()).into(),
            );
        }
    }
    Ok(())
}

fn cmd_bppm(cfg: &mut RunConfig, args: BppmArgs) -> Result<(), Failure> {
    if let Some(input) = args.input {
        cfg.input_dir = input;
    }
    if let Some(side) = args.side {
        cfg.side = side;
    }
    let input = resolve(cfg, &cfg.input_dir);
    let collection = load_family_dir(&input)?;
    check_stems(&collection)?;
    let params = cfg.fold_params();

    let jobs: Vec<(&RnaSequence, Option<std::time::SystemTime>)> = collection
        .iter()
        .flat_map(|(acc, members)| {
            let fasta = input.join(format!("{acc}.fasta"));
            let mtime = fs::metadata(fasta).and_then(|m| m.modified()).ok();
            members.iter().map(move |s| (s, mtime))
        })
        .collect();

    let outcomes: Vec<anyhow::Result<bool>> = jobs
        .par_iter()
        .map(|&(seq, mtime)| {
            let stem = file_stem(seq.id());
            let tsv = cfg.out_dir.join(BPPM_DIR).join(format!("{stem}.tsv"));
            let png = cfg.out_dir.join(DOTPLOT_DIR).join(format!("{stem}.png"));
            if !args.force && up_to_date(&[&tsv, &png], mtime) {
                return Ok(false);
            }
            let bppm = base_pair_probabilities(seq, &params)
                .with_context(|| format!("folding `{}`", seq.id()))?;
            write_bppm_tsv(&bppm, &tsv)?;
            write_png(&resize_bilinear(&bppm_to_dotplot(&bppm), cfg.side)?, &png)?;
            Ok(true)
        })
        .collect();
    let mut folded = 0;
    for o in outcomes {
        if o? {
            folded += 1;
        }
    }
    println!(
        "folded {folded} sequence(s), {} up to date",
        jobs.len() - folded
    );
    Ok(())
}

/// Uses `<out>/bppm/<stem>.tsv` when present, otherwise folds.
struct PreferTsv {
    tsv: TsvDirSource,
    fold: FoldingSource,
    dir: PathBuf,
}

impl BppmSource for PreferTsv {
    fn bppm(&self, seq_id: &str) -> dotstitch_core::Result<Bppm> {
        if self
            .dir
            .join(format!("{}.tsv", file_stem(seq_id)))
            .is_file()
        {
            self.tsv.bppm(seq_id)
        } else {
            self.fold.bppm(seq_id)
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    input: Option<PathBuf>,

    #[arg(long)]
    min_len: Option<usize>,

    #[arg(long)]
    max_len: Option<usize>,

    /// Largest family size kept after truncation.
    #[arg(long)]
    cap: Option<usize>,

    /// Repeats of the different-family training sampler.
    #[arg(long)]
    repeats: Option<usize>,

    #[arg(long)]
    side: Option<usize>,

    /// Override the split seed derived from --seed.
    #[arg(long)]
    split_seed: Option<u64>,
}

fn cmd_build(cfg: &mut RunConfig, args: BuildArgs) -> Result<(), Failure> {
    if let Some(v) = args.input {
        cfg.input_dir = v;
    }
    if let Some(v) = args.min_len {
        cfg.min_len = v;
    }
    if let Some(v) = args.max_len {
        cfg.max_len = v;
    }
    if let Some(v) = args.cap {
        cfg.cap = v;
    }
    if let Some(v) = args.repeats {
        cfg.diff_repeats = v;
    }
    if let Some(v) = args.side {
        cfg.side = v;
    }
    if args.split_seed.is_some() {
        cfg.split_seed = args.split_seed;
    }
    if cfg.min_len > cfg.max_len {
        return Err(usage("min_len exceeds max_len"));
    }
    if cfg.cap < 2 {
        return Err(usage("cap must be at least 2"));
    }

    let all = load_family_dir(&resolve(cfg, &cfg.input_dir))?;
    let collection = filter_by_length(&all, cfg.min_len, cfg.max_len);
    println!(
        "{} of {} families retained with lengths in [{}, {}]",
        collection.num_families(),
        all.num_families(),
        cfg.min_len,
        cfg.max_len
    );
    check_stems(&collection)?;
    let tsv_dir = cfg.out_dir.join(BPPM_DIR);
    let source = PreferTsv {
        tsv: TsvDirSource::new(&tsv_dir, &collection),
        fold: FoldingSource::new(&collection, cfg.fold_params()),
        dir: tsv_dir,
    };
    let summary = build_dataset(&collection, &cfg.dataset_options(), &source, &cfg.out_dir)?;
    print!("{summary}");
    Ok(())
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Manifest to plan over (default: <out>/manifest.cnn.jsonl).
    #[arg(long)]
    manifest: Option<PathBuf>,

    /// Different-to-same ratio `r:1`, or `none`.
    #[arg(long)]
    ratio: Option<Ratio>,

    #[arg(long)]
    batch_size: Option<usize>,

    #[arg(long)]
    iterations: Option<usize>,

    /// Output file relative to --out.
    #[arg(long, default_value = "batch_plan.json")]
    output: PathBuf,
}

fn cmd_plan(cfg: &mut RunConfig, args: PlanArgs) -> Result<(), Failure> {
    if let Some(v) = args.ratio {
        cfg.ratio = v;
    }
    if let Some(v) = args.batch_size {
        cfg.batch_size = v;
    }
    if let Some(v) = args.iterations {
        cfg.iterations = v;
    }
    let manifest_path = resolve(
        cfg,
        args.manifest.as_deref().unwrap_or(Path::new(CNN_MANIFEST)),
    );
    let manifest = read_manifest(&manifest_path)?;
    let plan = make_batch_plan(
        &manifest,
        cfg.ratio,
        cfg.batch_size,
        cfg.iterations,
        seeds::derive_seed(cfg.seed, seeds::PLAN),
    )?;
    let out = cfg.out_dir.join(&args.output);
    write_json(&out, &plan)?;
    println!(
        "{} iterations of {} ({} ratio) -> {}",
        plan.iterations,
        plan.batch_size,
        plan.ratio,
        out.display()
    );
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predictions JSONL from the trainer.
    #[arg(long)]
    predictions: PathBuf,

    #[arg(long)]
    manifest: Option<PathBuf>,

    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,

    /// Report directory relative to --out.
    #[arg(long, default_value = "eval")]
    report_dir: PathBuf,
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    #[serde(flatten)]
    report: &'a EvalReport,
    auc: Option<f64>,
}

fn cmd_eval(cfg: &RunConfig, args: EvalArgs) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&args.threshold) {
        return Err(usage("--threshold must lie in [0, 1]"));
    }
    let manifest_path = resolve(
        cfg,
        args.manifest.as_deref().unwrap_or(Path::new(CNN_MANIFEST)),
    );
    let manifest = read_manifest(&manifest_path)?;
    let preds = read_predictions(&resolve(cfg, &args.predictions))?;
    let report = evaluate(&preds, &manifest, args.threshold)?;

    let dir = cfg.out_dir.join(&args.report_dir);
    let curve = match roc(&preds) {
        Ok(curve) => Some(curve),
        Err(dotstitch_core::Error::SingleClass) => None,
        Err(e) => return Err(anyhow::Error::from(e).into()),
    };
    if let Some(curve) = &curve {
        let path = dir.join("roc.csv");
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(&path, curve.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    let auc = curve.as_ref().map(|c| c.auc);
    write_json(
        &dir.join("report.json"),
        &EvalOutput {
            report: &report,
            auc,
        },
    )?;
    let table = report.to_string();
    fs::write(dir.join("report.txt"), &table)
        .with_context(|| format!("writing {}", dir.join("report.txt").display()))?;
    print!("{table}");
    match auc {
        Some(auc) => println!("AUC {auc:.4}"),
        None => println!("AUC undefined (single class)"),
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// RNA sequence, at most 20 nt.
    sequence: String,
}

const ORACLE_TOLERANCE: f64 = 1e-9;

fn cmd_oracle(cfg: &RunConfig, args: OracleArgs) -> Result<(), Failure> {
    let seq = RnaSequence::new("query", "-", &args.sequence)?;
    let params = cfg.fold_params();
    let structures = enumerate_structures(&seq, &params)?;
    for (s, w) in &structures {
        println!("{}  {w}", s.dot_bracket(seq.len()));
    }
    let z_enum: f64 = structures.iter().map(|(_, w)| w).sum();
    let z_dp = partition_function(&seq, &params)?.z();
    let diff = base_pair_probabilities(&seq, &params)?.max_abs_diff(&oracle_bppm(&seq, &params)?);
    println!("structures: {}", structures.len());
    println!("Z (enumeration): {z_enum}");
    println!("Z (dynamic programming): {z_dp}");
    println!("max |bppm dp - oracle|: {diff:e}");
    if diff > ORACLE_TOLERANCE {
        return Err(anyhow!(
            "dynamic programming disagrees with enumeration ({diff:e} > {ORACLE_TOLERANCE:e})"
        )
        .into());
    }
    Ok(())
}
