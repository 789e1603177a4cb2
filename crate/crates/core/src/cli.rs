//! Command-line surface: `generate`, `detect`, `evaluate` and `bench`.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 invalid data. The thread count
//! comes from `HOUGH_PRIMS_THREADS`; 0 selects the serial path.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::datagen::{generate_scene, SceneSpec};
use crate::detector::{detect_with, reference_votes, DetectionReport, DetectorConfig, Execution, Timing};
use crate::error::{Error, Result};
use crate::eval::{evaluate, SEGCOMP_THRESHOLD};
use crate::geometry::{PointCloud, PrimitiveKind};
use crate::io::{
    read_cloud, read_ground_truth, read_report, write_cloud, write_curves_csv, write_ground_truth, write_labels_csv,
    write_report, CloudFileFormat, ReportOptions,
};

pub const THREADS_ENV: &str = "HOUGH_PRIMS_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hough-prims", version, about = "Plane, sphere, cylinder and cone detection in oriented point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a synthetic scene into `cloud.ply` and `ground_truth.json`.
    Generate {
        /// Scene description (JSON); defaults apply to missing fields.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Cloud file format.
        #[arg(long, value_enum, default_value_t = FormatArg::Ply)]
        format: FormatArg,
        /// Overrides `rng_seed` of the scene file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Detect primitives in a cloud and write a JSON report.
    Detect {
        cloud: PathBuf,
        #[command(flatten)]
        detector: DetectorArgs,
        /// Report path; defaults to `report.json` next to the cloud.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-point label CSV.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Include stage timings in the report.
        #[arg(long)]
        timing: bool,
        /// Directory for CSV dumps of one reference point's accumulators.
        #[arg(long)]
        dump_accumulators: Option<PathBuf>,
        /// Reference slot to dump.
        #[arg(long, default_value_t = 0, requires = "dump_accumulators")]
        dump_slot: usize,
    },
    /// Score a report against ground truth.
    Evaluate {
        /// Scene directory holding `cloud.ply`, `ground_truth.json` and
        /// `report.json`.
        dir: Option<PathBuf>,
        #[arg(long)]
        cloud: Option<PathBuf>,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Output directory for `metrics.json` and `curves.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overlap fraction for a correct match.
        #[arg(long, default_value_t = SEGCOMP_THRESHOLD)]
        threshold: f64,
    },
    /// Time detection stages over repeated runs.
    Bench {
        cloud: PathBuf,
        #[command(flatten)]
        detector: DetectorArgs,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        /// Worker threads; 0 is the serial path. Defaults to serial.
        #[arg(long)]
        threads: Option<usize>,
        /// Also time single-type runs for every enabled type.
        #[arg(long)]
        per_type: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum FormatArg {
    Ply,
    PlyAscii,
    Xyzn,
}

impl FormatArg {
    fn file_format(self) -> (CloudFileFormat, &'static str) {
        match self {
            FormatArg::Ply => (CloudFileFormat::PlyBinaryLittleEndian, "cloud.ply"),
            FormatArg::PlyAscii => (CloudFileFormat::PlyAscii, "cloud.ply"),
            FormatArg::Xyzn => (CloudFileFormat::Xyzn, "cloud.xyzn"),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct DetectorArgs {
    /// Detector configuration (JSON); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Reference points.
    #[arg(long)]
    refs: Option<usize>,
    /// Pairs per reference point.
    #[arg(long)]
    pairs: Option<usize>,
    /// Comma-separated primitive types to detect.
    #[arg(long, value_delimiter = ',')]
    types: Option<Vec<String>>,
    /// Vote into the nearest bin only.
    #[arg(long)]
    no_spread: bool,
    /// Extract the peak bin center instead of the neighborhood mean.
    #[arg(long)]
    no_bin_avg: bool,
    /// Keep each cluster's strongest candidate instead of averaging.
    #[arg(long)]
    nms_cluster: bool,
}

impl DetectorArgs {
    fn config(&self) -> Result<DetectorConfig> {
        let mut c = match &self.config {
            Some(path) => serde_json::from_str(&read_text(path)?)?,
            None => DetectorConfig::default(),
        };
        if let Some(s) = self.seed {
            c.rng_seed = s;
        }
        if let Some(n) = self.refs {
            c.n_reference = n;
        }
        if let Some(n) = self.pairs {
            c.n_pair = n;
        }
        if let Some(types) = &self.types {
            c.enabled_types = types.iter().map(|t| t.parse()).collect::<Result<_>>()?;
        }
        c.use_vote_spreading &= !self.no_spread;
        c.use_bin_averaging &= !self.no_bin_avg;
        c.use_cluster_averaging &= !self.nms_cluster;
        c.validate()?;
        Ok(c)
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Parses `args` (program name first) and runs the subcommand, printing to
/// the process's stdout and stderr.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run(args, &mut out, &mut err)
}

/// [`cli_main`] with explicit output streams.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().ansi().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_INVALID
            }
        }
    }
}

/// Thread setting from the environment; `None` when unset.
fn env_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::invalid(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

/// Runs detection serially for 0 threads, on a dedicated pool for a fixed
/// count, and on rayon's global pool otherwise.
fn detect_threads(cloud: &PointCloud, config: &DetectorConfig, threads: Option<usize>) -> Result<DetectionReport> {
    match threads {
        Some(0) => detect_with(cloud, config, Execution::Serial),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| detect_with(cloud, config, Execution::Parallel)),
        None => detect_with(cloud, config, Execution::Parallel),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    let say = |out: &mut dyn Write, text: String| writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e));
    match command {
        Command::Generate { spec, out: dir, format, seed } => {
            let mut scene: SceneSpec = serde_json::from_str(&read_text(&spec)?)?;
            if let Some(s) = seed {
                scene.rng_seed = s;
            }
            let (cloud, truth) = generate_scene(&scene)?;
            create_dir(&dir)?;
            let (format, name) = format.file_format();
            let cloud_path = dir.join(name);
            write_cloud(&cloud_path, &cloud, format)?;
            write_ground_truth(&dir.join("ground_truth.json"), &truth)?;
            say(
                out,
                format!("{}: {} points, {} primitives", cloud_path.display(), cloud.len(), truth.primitives.len()),
            )
        }
        Command::Detect { cloud: path, detector, out: report_path, labels, timing, dump_accumulators, dump_slot } => {
            let config = detector.config()?;
            let cloud = read_cloud(&path)?;
            let report = detect_threads(&cloud, &config, env_threads()?)?;
            let report_path = report_path.unwrap_or_else(|| sibling(&path, "report.json"));
            write_report(&report_path, &report, ReportOptions { include_timing: timing })?;
            if let Some(l) = labels {
                write_labels_csv(&l, &report.labels)?;
            }
            if let Some(dir) = dump_accumulators {
                dump(&cloud, &config, dump_slot, &dir)?;
            }
            say(
                out,
                format!(
                    "{}: {} primitives from {} candidates",
                    report_path.display(),
                    report.primitives.len(),
                    report.candidate_count
                ),
            )
        }
        Command::Evaluate { dir, cloud, truth, report, out: out_dir, threshold } => {
            let pick = |explicit: Option<PathBuf>, name: &str| -> Result<PathBuf> {
                explicit
                    .or_else(|| dir.as_ref().map(|d| d.join(name)))
                    .ok_or_else(|| Error::invalid(format!("no scene directory and no path for {name}")))
            };
            let cloud_path = pick(cloud, "cloud.ply")?;
            let truth_path = pick(truth, "ground_truth.json")?;
            let report_path = pick(report, "report.json")?;
            let out_dir = out_dir.or_else(|| dir.clone()).unwrap_or_else(|| sibling(&report_path, ""));
            if !(threshold > 0.5 && threshold <= 1.0) {
                return Err(Error::invalid("threshold must lie in (0.5, 1]"));
            }

            let cloud = read_cloud(&cloud_path)?;
            let truth = read_ground_truth(&truth_path)?;
            let report = read_report(&report_path)?;
            if truth.labels.len() != cloud.len() || report.labels.len() != cloud.len() {
                return Err(Error::invalid(format!(
                    "label counts (truth {}, report {}) do not match the cloud ({} points)",
                    truth.labels.len(),
                    report.labels.len(),
                    cloud.len()
                )));
            }
            let result = evaluate(&cloud, &truth, &report, threshold);
            create_dir(&out_dir)?;
            let metrics = out_dir.join("metrics.json");
            std::fs::write(&metrics, serde_json::to_string_pretty(&result)?).map_err(|e| Error::io(&metrics, e))?;
            write_curves_csv(&out_dir.join("curves.csv"), &result.p_coverage, &result.s_coverage)?;
            let s = &result.scores;
            say(
                out,
                format!(
                    "precision {:.3} recall {:.3} mean DOD {:.3} sigma ({} correct of {} detected, {} true)",
                    s.precision, s.recall, result.mean_dod_sigma, s.correct, s.detections, s.ground_truth
                ),
            )
        }
        Command::Bench { cloud: path, detector, repeats, threads, per_type } => {
            if repeats == 0 {
                return Err(Error::invalid("repeats must be positive"));
            }
            let config = detector.config()?;
            let cloud = read_cloud(&path)?;
            let threads = Some(threads.unwrap_or(0));
            let mut modes = vec![("joint".to_string(), config.clone())];
            if per_type {
                for kind in PrimitiveKind::ALL.into_iter().filter(|k| config.enabled_types.contains(k)) {
                    let c = DetectorConfig { enabled_types: vec![kind], ..config.clone() };
                    modes.push((format!("{}-only", kind.name()), c));
                }
            }
            say(
                out,
                format!("{} points, {} x {} pairs, {repeats} repeats", cloud.len(), config.n_reference, config.n_pair),
            )?;
            say(out, "mode,voting_ms,clustering_ms,inliers_ms,total_ms,primitives".into())?;
            for (name, c) in modes {
                let mut sum = Timing::default();
                let mut found = 0;
                for _ in 0..repeats {
                    let r = detect_threads(&cloud, &c, threads)?;
                    sum.voting_ms += r.timing.voting_ms;
                    sum.clustering_ms += r.timing.clustering_ms;
                    sum.inliers_ms += r.timing.inliers_ms;
                    sum.total_ms += r.timing.total_ms;
                    found = r.primitives.len();
                }
                let k = repeats as f64;
                say(
                    out,
                    format!(
                        "{name},{:.2},{:.2},{:.2},{:.2},{found}",
                        sum.voting_ms / k,
                        sum.clustering_ms / k,
                        sum.inliers_ms / k,
                        sum.total_ms / k
                    ),
                )?;
            }
            Ok(())
        }
    }
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    path.parent().unwrap_or(Path::new("")).join(name)
}

fn dump(cloud: &PointCloud, config: &DetectorConfig, slot: usize, dir: &Path) -> Result<()> {
    let (_, space) = reference_votes(cloud, config, slot)?;
    create_dir(dir)?;
    let file = |name: &str| -> Result<(PathBuf, std::io::BufWriter<std::fs::File>)> {
        let p = dir.join(name);
        let f = std::fs::File::create(&p).map_err(|e| Error::io(&p, e))?;
        Ok((p, std::io::BufWriter::new(f)))
    };
    let (p, mut w) = file("plane.csv")?;
    space.plane.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&p, e))?;
    let (p, mut w) = file("sphere.csv")?;
    space.sphere.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&p, e))?;
    let (p, mut w) = file("cylinder.csv")?;
    space.cylinder.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&p, e))?;
    let (p, mut w) = file("cone.csv")?;
    space.cone.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&p, e))
}
