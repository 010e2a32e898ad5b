//! Command implementations for the `infcom` binary. Kept in a library so
//! tests can drive them without spawning processes.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use infcom_core::conga::CutLevel;
use infcom_core::influence::{reports_to_jsonl, round2};
use infcom_core::{
    best_level, build_coauthor_graph, cut_at_count, load_dataset, parse_dataset, run_conga, Dataset, Dendrogram,
    InfluenceReport, QueryError, QueryRequest, Snapshot,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "infcom", version, about = "Overlapping community detection and influence ranking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a dataset and list every violation with its line number.
    Validate {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Run detection and write the dendrogram and chosen communities.
    Detect(QueryArgs),
    /// Detect, then rank communities by influence.
    Rank(QueryArgs),
    /// Start the HTTP query service.
    Serve {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Write the topic/year-filtered subset of a dataset.
    Export(QueryArgs),
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Comma-separated keywords; empty keeps every topic.
    #[arg(long, value_delimiter = ',')]
    pub topics: Vec<String>,
    #[arg(long)]
    pub from: Option<i32>,
    #[arg(long)]
    pub to: Option<i32>,
    /// Keep only the K most influential communities.
    #[arg(long)]
    pub k: Option<usize>,
    /// Cut the dendrogram at this many communities instead of the
    /// modularity optimum.
    #[arg(long)]
    pub communities: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl QueryArgs {
    pub fn request(&self) -> QueryRequest {
        QueryRequest {
            topics: self.topics.clone(),
            year_from: self.from.unwrap_or(i32::MIN),
            year_to: self.to.unwrap_or(i32::MAX),
            k: self.k,
            community_count: self.communities,
        }
    }
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure { code: EXIT_DATA, message: message.into() }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        Failure::usage(e.to_string())
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::data(format!("{}: {e}", path.display()))
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code; everything the user should see goes to `out`/`err`.
pub fn run<I, T>(args: I, out: &mut dyn io::Write, err: &mut dyn io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate { dataset } => cmd_validate(&dataset).map(|text| {
            let _ = write!(out, "{text}");
        }),
        Command::Detect(args) => cmd_detect(&args).map(|text| {
            let _ = write!(out, "{text}");
        }),
        Command::Rank(args) => cmd_rank(&args).map(|text| {
            let _ = write!(out, "{text}");
        }),
        Command::Export(args) => cmd_export(&args).map(|text| {
            let _ = write!(out, "{text}");
        }),
        Command::Serve { dataset, port } => cmd_serve(&dataset, port),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<Dataset, Failure> {
    load_dataset(path).map_err(|e| Failure::data(e.to_string()))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_failure(&path, e))
}

/// Returns the report printed on success; data problems become exit 2 with
/// every violation listed.
pub fn cmd_validate(path: &Path) -> Result<String, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let (dataset, errors) = parse_dataset(&text);
    if errors.is_empty() {
        return Ok(format!(
            "{}: ok ({} papers, {} authors)\n",
            path.display(),
            dataset.papers().len(),
            dataset.authors().len()
        ));
    }
    let mut message = format!("{}: {} problem(s)", path.display(), errors.len());
    for e in &errors {
        message.push_str("\n  ");
        message.push_str(&e.to_string());
    }
    Err(Failure::data(message))
}

/// Detection only: the full dendrogram plus the chosen cut.
pub struct Detection {
    pub dendrogram: Dendrogram,
    pub level: CutLevel,
}

pub fn detect(dataset: &Dataset, request: &QueryRequest) -> Result<Detection, QueryError> {
    let request = request.normalized()?;
    let papers = request.filter()?.apply(dataset.papers());
    let graph = build_coauthor_graph(&papers);
    let dendrogram = run_conga(&graph);
    let level = match request.community_count {
        Some(n) => cut_at_count(&dendrogram, n),
        None => best_level(&dendrogram),
    };
    Ok(Detection { dendrogram, level })
}

pub fn communities_jsonl(level: &CutLevel) -> String {
    let mut s = String::new();
    for c in level.communities.iter() {
        s.push_str(&serde_json::to_string(c).expect("serializable"));
        s.push('\n');
    }
    s
}

pub fn cmd_detect(args: &QueryArgs) -> Result<String, Failure> {
    let dataset = load(&args.dataset)?;
    let d = detect(&dataset, &args.request())?;
    if let Some(dir) = &args.out {
        write_file(dir, "dendrogram.jsonl", &d.dendrogram.to_jsonl())?;
        write_file(dir, "communities.jsonl", &communities_jsonl(&d.level))?;
    }
    let mut text = format!(
        "{} events, cut after step {} (modularity {:.4}), {} communities\n",
        d.dendrogram.events.len(),
        d.level.step,
        d.level.modularity.value,
        d.level.communities.len()
    );
    for c in d.level.communities.iter() {
        let members: Vec<&str> = c.member_ids.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(text, "{}\t{}", c.community_id, members.join(","));
    }
    Ok(text)
}

pub fn rank_reports(dataset: Dataset, request: &QueryRequest) -> Result<Vec<InfluenceReport>, QueryError> {
    let snapshot = Snapshot::build(Arc::new(dataset), request)?;
    let k = request.k.unwrap_or(usize::MAX);
    Ok(snapshot.reports().iter().take(k).cloned().collect())
}

fn optional<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// Fixed-width table with two-decimal scores.
pub fn render_table(reports: &[InfluenceReport]) -> String {
    let mut s = format!(
        "{:<5} {:<10} {:>10} {:>10} {:>8} {:>9} {:>7}  {}\n",
        "rank", "community", "influence", "normalized", "min_cite", "mean_cite", "h_index", "members"
    );
    for r in reports {
        let members: Vec<&str> = r.member_ids.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(
            s,
            "{:<5} {:<10} {:>10.2} {:>10.2} {:>8} {:>9} {:>7}  {}",
            r.rank,
            r.community_id,
            round2(r.influence),
            round2(r.normalized),
            optional(r.baselines.min_citation),
            optional(r.baselines.mean_citation.map(|m| format!("{:.2}", round2(m)))),
            r.baselines.h_index,
            members.join(",")
        );
    }
    s
}

pub fn cmd_rank(args: &QueryArgs) -> Result<String, Failure> {
    let dataset = load(&args.dataset)?;
    let reports = rank_reports(dataset, &args.request())?;
    let table = render_table(&reports);
    if let Some(dir) = &args.out {
        write_file(dir, "rank.jsonl", &reports_to_jsonl(&reports))?;
        write_file(dir, "rank.txt", &table)?;
    }
    Ok(table)
}

pub fn cmd_export(args: &QueryArgs) -> Result<String, Failure> {
    let Some(dir) = &args.out else {
        return Err(Failure::usage("export needs --out"));
    };
    let dataset = load(&args.dataset)?;
    let filter = args.request().filter()?;
    let subset = dataset.restrict(filter.apply(dataset.papers()));
    write_file(dir, "dataset.jsonl", &subset.to_jsonl())?;
    Ok(format!("exported {} papers, {} authors\n", subset.papers().len(), subset.authors().len()))
}

pub fn cmd_serve(dataset: &Path, port: u16) -> Result<(), Failure> {
    let dataset = Arc::new(load(dataset)?);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::data(e.to_string()))?;
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    runtime.block_on(infcom_service::serve(dataset, addr)).map_err(|e| Failure::data(format!("{addr}: {e}")))
}
