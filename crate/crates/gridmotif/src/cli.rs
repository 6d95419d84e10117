//! Command-line front end over the library.
//!
//! Four subcommands cover the pipeline stages: `symbolize` (per-window
//! symbols as CSV), `motifs` (temporal motifs as JSON plus one DOT file
//! per frame), `hierarchy` (the same pipeline at every level of a
//! metering tree), and `mine` (signature counts and a top-k table).
//!
//! Every command writes into a `--out` directory and finishes with a
//! `manifest.json` recording the resolved config, its hash, input file
//! digests, and the produced files. Outputs are byte-deterministic:
//! rerunning a command on the same inputs reproduces every file exactly.
//!
//! Exit codes: 0 on success, 1 for validation or usage errors, 2 for I/O
//! errors.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{self, ConfigFile, ConfigOverrides, DurationSpec, PipelineConfig};
use crate::error::{Error, Result};
use crate::export;
use crate::hierarchy::{self, HierarchyChild, HierarchyNode};
use crate::ingest::{self, format_timestamp, ChannelSchema, MeterSeries, UNMETERED_CHANNEL};
use crate::mine;
use crate::motif::{self, MotifFrame};
use crate::pipeline;
use crate::symbolize::Alphabet;

#[derive(Debug, Parser)]
#[command(
    name = "gridmotif",
    version,
    about = "Symbolic temporal star motifs for smart-meter time series"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Discretize every channel into per-window symbols (CSV output).
    Symbolize(SymbolizeArgs),
    /// Build temporal motifs and export them as JSON and per-frame DOT.
    Motifs(MotifsArgs),
    /// Run the motif pipeline at every level of a metering hierarchy.
    Hierarchy(HierarchyArgs),
    /// Count recurring motif signatures and print the top patterns.
    Mine(MineArgs),
}

/// Pipeline parameter flags shared by the data-processing subcommands.
/// Flags override the config file, which overrides the defaults.
#[derive(Debug, Args)]
struct PipelineArgs {
    /// JSON config file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Window length, e.g. "1h" or "15m".
    #[arg(long, value_name = "DURATION")]
    window: Option<String>,
    /// Window stride; defaults to the window length (non-overlapping).
    #[arg(long, value_name = "DURATION")]
    stride: Option<String>,
    /// Consecutive windows per temporal motif.
    #[arg(long, value_name = "N")]
    delta: Option<usize>,
    /// Number of uniform alphabet symbols.
    #[arg(long, value_name = "N")]
    alphabet: Option<usize>,
    /// Minimum raw window-mean power (kW) for a channel to count as on.
    #[arg(long = "epsilon-on", value_name = "KW")]
    epsilon_on: Option<f64>,
}

impl PipelineArgs {
    fn resolve(&self) -> Result<PipelineConfig> {
        let file = match &self.config {
            Some(path) => Some(ConfigFile::load(path)?),
            None => None,
        };
        let overrides = ConfigOverrides {
            window: self
                .window
                .as_deref()
                .map(DurationSpec::parse)
                .transpose()?,
            stride: self
                .stride
                .as_deref()
                .map(DurationSpec::parse)
                .transpose()?,
            delta: self.delta,
            alphabet_symbols: self.alphabet,
            epsilon_on: self.epsilon_on,
        };
        config::resolve_config(file, &overrides)
    }
}

#[derive(Debug, Args)]
struct SymbolizeArgs {
    /// Meter CSV (a `timestamp` column followed by one column per channel).
    csv: PathBuf,
    /// Channel schema JSON: {"mains": "...", "generators": [...]}.
    #[arg(long, value_name = "PATH")]
    schema: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
struct MotifsArgs {
    /// Meter CSV (a `timestamp` column followed by one column per channel).
    csv: PathBuf,
    /// Channel schema JSON: {"mains": "...", "generators": [...]}.
    #[arg(long, value_name = "PATH")]
    schema: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Write only the JSON export.
    #[arg(long)]
    json: bool,
    /// Write only the DOT exports.
    #[arg(long)]
    dot: bool,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
struct HierarchyArgs {
    /// Hierarchy description JSON (nested nodes with CSV leaves).
    hierarchy: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
struct MineArgs {
    /// Motif JSON file as written by the motifs subcommand.
    motifs: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// How many signatures to print.
    #[arg(long, value_name = "K", default_value_t = 10)]
    top_k: usize,
    /// Cross-check counts against the brute-force pairwise oracle.
    #[arg(long)]
    verify: bool,
}

/// Parse arguments and run, exiting with 0/1/2. Help and version requests
/// exit 0; any other argument problem exits 1.
pub fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Symbolize(args) => cmd_symbolize(args),
        Command::Motifs(args) => cmd_motifs(args),
        Command::Hierarchy(args) => cmd_hierarchy(args),
        Command::Mine(args) => cmd_mine(args),
    }
}

/// Collects written files and finishes with a manifest. Nothing about the
/// output directory's own location goes into the manifest, so runs into
/// different directories stay byte-identical.
struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, relative: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, bytes)?;
        self.written.push(relative.to_string());
        Ok(())
    }

    fn finish(mut self, manifest: ManifestHeader<'_>) -> Result<()> {
        self.written.sort();
        let doc = Manifest {
            command: manifest.command,
            config: manifest.config,
            config_sha256: manifest.config.map(PipelineConfig::sha256_hex),
            top_k: manifest.top_k,
            inputs: manifest.inputs,
            outputs: self.written,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("manifest always serializes");
        text.push('\n');
        fs::write(self.root.join("manifest.json"), text)?;
        Ok(())
    }
}

struct ManifestHeader<'a> {
    command: &'a str,
    config: Option<&'a PipelineConfig>,
    top_k: Option<usize>,
    inputs: Vec<InputDigest>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a PipelineConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    top_k: Option<usize>,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

fn digest_input(path: &Path) -> Result<InputDigest> {
    let bytes = fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
    })
}

fn load_schema(path: &Option<PathBuf>) -> Result<ChannelSchema> {
    match path {
        Some(p) => ChannelSchema::from_json(&fs::read_to_string(p)?),
        None => Ok(ChannelSchema::default_mains()),
    }
}

fn load_prepared(
    csv: &Path,
    schema_path: &Option<PathBuf>,
    config: &PipelineConfig,
) -> Result<(MeterSeries, ingest::LoadReport)> {
    let schema = load_schema(schema_path)?;
    let (series, report) = ingest::load_csv_with_report(csv, &schema)?;
    let prepared = pipeline::prepare_series(&series, config.tolerance)?;
    Ok((prepared, report))
}

fn pipeline_inputs(csv: &Path, schema: &Option<PathBuf>) -> Result<Vec<InputDigest>> {
    let mut inputs = vec![digest_input(csv)?];
    if let Some(schema) = schema {
        inputs.push(digest_input(schema)?);
    }
    Ok(inputs)
}

fn report_load(series: &MeterSeries, report: &ingest::LoadReport, dropped: usize) {
    if report.gaps_filled > 0 {
        println!(
            "filled {} single-row gap(s) by interpolation",
            report.gaps_filled
        );
    }
    if dropped > 0 {
        println!("dropped {dropped} trailing sample(s) that fill no window");
    }
    if series.channel_values(UNMETERED_CHANNEL).is_some() {
        println!("added \"{UNMETERED_CHANNEL}\" channel for the conservation residual");
    }
}

fn cmd_symbolize(args: &SymbolizeArgs) -> Result<()> {
    let config = args.pipeline.resolve()?;
    let (series, report) = load_prepared(&args.csv, &args.schema, &config)?;
    let symbolized = pipeline::symbolize_series(&series, &config)?;

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["channel", "t_w", "symbol"])
        .expect("writing to memory cannot fail");
    for cs in &symbolized.channels {
        let name = cs.symbols.channel().name();
        for (&t_w, &symbol) in cs
            .symbols
            .window_timestamps()
            .iter()
            .zip(cs.symbols.symbols())
        {
            writer
                .write_record([name, &format_timestamp(t_w), &symbol.to_string()])
                .expect("writing to memory cannot fail");
        }
    }
    let csv_bytes = writer.into_inner().expect("flushed");

    let mut out = OutDir::create(&args.out)?;
    out.write("symbols.csv", &csv_bytes)?;

    report_load(
        &series,
        &report,
        symbolized.plan.dropped_samples(series.n_samples()),
    );
    println!(
        "symbolized {} channel(s) over {} window(s) of {} sample(s) (stride {})",
        symbolized.channels.len(),
        symbolized.plan.window_count(),
        symbolized.plan.window_length_samples(),
        symbolized.plan.stride_samples()
    );

    out.finish(ManifestHeader {
        command: "symbolize",
        config: Some(&config),
        top_k: None,
        inputs: pipeline_inputs(&args.csv, &args.schema)?,
    })
}

fn write_frame_dots(
    out: &mut OutDir,
    prefix: &str,
    frames: &[MotifFrame],
    alphabet: &Alphabet,
) -> Result<usize> {
    let width = frames.len().to_string().len().max(3);
    for (i, frame) in frames.iter().enumerate() {
        let name = format!("frame_{i:0width$}");
        let trends = (i > 0).then(|| motif::annotate_trends(&frames[i - 1], frame, alphabet));
        let dot = export::frame_to_dot(frame, &name, trends.as_ref());
        out.write(&format!("{prefix}{name}.dot"), dot.as_bytes())?;
    }
    Ok(frames.len())
}

fn cmd_motifs(args: &MotifsArgs) -> Result<()> {
    let config = args.pipeline.resolve()?;
    let (series, report) = load_prepared(&args.csv, &args.schema, &config)?;
    let output = pipeline::motifs_for_series(&series, &config)?;

    let write_json = args.json || !args.dot;
    let write_dot = args.dot || !args.json;

    let mut out = OutDir::create(&args.out)?;
    if write_json {
        out.write(
            "motifs.json",
            export::motifs_to_json_string(&output.motifs).as_bytes(),
        )?;
    }
    if write_dot {
        write_frame_dots(&mut out, "", &output.frames, &output.alphabet)?;
    }

    report_load(
        &series,
        &report,
        output.plan.dropped_samples(series.n_samples()),
    );
    println!(
        "star of {} node(s) around \"{}\"",
        output.star.node_count(),
        output.star.center()
    );
    println!(
        "{} frame(s), {} temporal motif(s) of {} window(s) each",
        output.frames.len(),
        output.motifs.len(),
        config.delta
    );

    out.finish(ManifestHeader {
        command: "motifs",
        config: Some(&config),
        top_k: None,
        inputs: pipeline_inputs(&args.csv, &args.schema)?,
    })
}

/// Replace filesystem-hostile characters so node ids map to directories.
fn sanitize_node_dir(id: &str) -> String {
    let cleaned: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned.trim_matches('.').is_empty() {
        "node".to_string()
    } else {
        cleaned
    }
}

fn prepare_tree(child: HierarchyChild, tolerance: f64) -> Result<HierarchyChild> {
    Ok(match child {
        HierarchyChild::Leaf(series) => {
            HierarchyChild::Leaf(pipeline::prepare_series(&series, tolerance)?)
        }
        HierarchyChild::Node(node) => {
            let id = node.node_id().to_string();
            let children = node
                .children()
                .iter()
                .cloned()
                .map(|c| prepare_tree(c, tolerance))
                .collect::<Result<Vec<_>>>()?;
            HierarchyChild::Node(HierarchyNode::new(id, children)?)
        }
    })
}

#[derive(Serialize)]
struct LevelEntry {
    id: String,
    level: usize,
    branching: usize,
}

/// Preorder walk yielding (id, level, branching, series to run) per node.
fn collect_nodes(
    child: &HierarchyChild,
    acc: &mut Vec<(String, usize, usize, MeterSeries)>,
) -> Result<()> {
    match child {
        HierarchyChild::Leaf(series) => {
            acc.push((
                series.node_id().to_string(),
                0,
                series.appliance_channels().count(),
                series.clone(),
            ));
        }
        HierarchyChild::Node(node) => {
            acc.push((
                node.node_id().to_string(),
                node.level(),
                node.branching(),
                hierarchy::aggregate_level(node)?,
            ));
            for c in node.children() {
                collect_nodes(c, acc)?;
            }
        }
    }
    Ok(())
}

fn hierarchy_csv_inputs(value: &serde_json::Value, base: &Path, acc: &mut Vec<PathBuf>) {
    if let Some(obj) = value.as_object() {
        if let Some(csv) = obj.get("csv").and_then(|v| v.as_str()) {
            let path = Path::new(csv);
            acc.push(if path.is_absolute() {
                path.to_path_buf()
            } else {
                base.join(path)
            });
        }
        if let Some(children) = obj.get("children").and_then(|v| v.as_array()) {
            for c in children {
                hierarchy_csv_inputs(c, base, acc);
            }
        }
    }
}

fn cmd_hierarchy(args: &HierarchyArgs) -> Result<()> {
    let config = args.pipeline.resolve()?;
    let root = hierarchy::load_hierarchy(&args.hierarchy)?;
    let root = prepare_tree(root, config.tolerance)?;

    let mut nodes = Vec::new();
    collect_nodes(&root, &mut nodes)?;

    let mut out = OutDir::create(&args.out)?;
    let mut dirs_used: HashMap<String, String> = HashMap::new();
    let mut levels_meta = Vec::new();
    let mut motifs_by_level: BTreeMap<usize, Vec<crate::motif::TemporalMotif>> = BTreeMap::new();

    for (id, level, branching, series) in &nodes {
        let dir = sanitize_node_dir(id);
        if let Some(previous) = dirs_used.insert(dir.clone(), id.clone()) {
            return Err(Error::Config(format!(
                "node ids \"{previous}\" and \"{id}\" collide on output directory \"{dir}\""
            )));
        }
        let output = pipeline::motifs_for_series(series, &config)?;
        let prefix = format!("nodes/{dir}/");
        out.write(
            &format!("{prefix}motifs.json"),
            export::motifs_to_json_string(&output.motifs).as_bytes(),
        )?;
        write_frame_dots(&mut out, &prefix, &output.frames, &output.alphabet)?;
        let counts = mine::count_signatures(&output.motifs)?;
        out.write(
            &format!("{prefix}counts.json"),
            export::counts_to_json_string(&counts).as_bytes(),
        )?;
        out.write(
            &format!("{prefix}counts.csv"),
            export::counts_to_csv_string(&counts).as_bytes(),
        )?;

        println!(
            "{id} (level {level}, {branching} below): {} motif(s) over {} frame(s)",
            output.motifs.len(),
            output.frames.len()
        );
        levels_meta.push(LevelEntry {
            id: id.clone(),
            level: *level,
            branching: *branching,
        });
        motifs_by_level
            .entry(*level)
            .or_default()
            .extend(output.motifs);
    }

    let mut levels_text =
        serde_json::to_string_pretty(&levels_meta).expect("levels always serialize");
    levels_text.push('\n');
    out.write("levels.json", levels_text.as_bytes())?;

    // Signatures pooled across all nodes of one level: patterns recurring
    // anywhere on that level count together.
    for (level, motifs) in &motifs_by_level {
        let counts = mine::count_signatures(motifs)?;
        out.write(
            &format!("levels/level_{level}/counts.json"),
            export::counts_to_json_string(&counts).as_bytes(),
        )?;
        out.write(
            &format!("levels/level_{level}/counts.csv"),
            export::counts_to_csv_string(&counts).as_bytes(),
        )?;
    }

    let mut inputs = vec![digest_input(&args.hierarchy)?];
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&args.hierarchy)?)?;
    let base = args
        .hierarchy
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();
    let mut csv_paths = Vec::new();
    hierarchy_csv_inputs(&value, &base, &mut csv_paths);
    for path in csv_paths {
        inputs.push(digest_input(&path)?);
    }

    out.finish(ManifestHeader {
        command: "hierarchy",
        config: Some(&config),
        top_k: None,
        inputs,
    })
}

fn cmd_mine(args: &MineArgs) -> Result<()> {
    if args.top_k == 0 {
        return Err(Error::Config("--top-k must be at least 1".into()));
    }
    let text = fs::read_to_string(&args.motifs)?;
    let motifs = export::motifs_from_json_str(&text)?;
    let counts = mine::count_signatures(&motifs)?;
    if args.verify {
        mine::verify_counts(&motifs, &counts)?;
        println!("verified: counts match the brute-force pairwise oracle");
    }

    match counts.delta() {
        Some(delta) => println!(
            "{} motif(s), {} distinct signature(s), delta {delta}",
            counts.total(),
            counts.counts().len()
        ),
        None => println!("no motifs in the input"),
    }
    println!("count  signature");
    for (sig, n) in mine::top_k(&counts, args.top_k) {
        println!("{n:>5}  {sig}");
    }

    let mut out = OutDir::create(&args.out)?;
    out.write(
        "counts.json",
        export::counts_to_json_string(&counts).as_bytes(),
    )?;
    out.write(
        "counts.csv",
        export::counts_to_csv_string(&counts).as_bytes(),
    )?;
    out.finish(ManifestHeader {
        command: "mine",
        config: None,
        top_k: Some(args.top_k),
        inputs: vec![digest_input(&args.motifs)?],
    })
}
