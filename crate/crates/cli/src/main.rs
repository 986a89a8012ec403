//! Command-line front end: dataset generation, coverage analysis, the
//! curve-type ablation, and dataset inspection.
//!
//! Exit codes: 0 success, 2 usage errors, 3 configuration errors,
//! 4 generation errors, 5 dataset/I-O errors, 6 analysis errors.

use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

use reachfield::config::{Scenario, ScenarioConfig};
use reachfield::curve::CurveType;
use reachfield::dataset::{read_dataset, SerializedRecord};
use reachfield::error::{Error, Result};
use reachfield::metrics::{
    bounding_cube, coverage, coverage_in_cube, max_discrete_curvature, CoverageReport,
};
use reachfield::reward::RewardMode;
use reachfield::rollout::discretize;
use reachfield::sampler::{
    episode_seed, generate_baseline, generate_dataset, sample_start_pose, DiversityLevel,
};

#[derive(Parser)]
#[command(
    name = "reachfield",
    version,
    about = "Field-guided reach-trajectory dataset generation and analysis",
    after_help = "Exit codes: 0 ok, 2 usage, 3 config, 4 generation, 5 dataset/io, 6 analysis.\n\
                  Config keys and defaults are listed in the project README."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Scenario source plus the overrides shared by the generating commands.
#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config file (TOML); built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the episode count
    #[arg(long)]
    episodes: Option<u64>,
    /// Override the curve type (cycloid | bezier)
    #[arg(long)]
    curve: Option<CurveType>,
    /// Override the reward mode (off | uniform_reward | uniform_volume)
    #[arg(long)]
    reward: Option<RewardMode>,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario> {
        let mut config = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(episodes) = self.episodes {
            config.episodes = episodes;
        }
        if let Some(curve) = self.curve {
            config.curve_type = curve;
        }
        if let Some(reward) = self.reward {
            config.reward_mode = reward;
        }
        Scenario::from_config(&config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an episode dataset and write it to a directory
    Generate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output dataset directory
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: rayon's choice)
        #[arg(long, env = "REACHFIELD_JOBS")]
        jobs: Option<usize>,
    },
    /// Voxel coverage of a dataset, or of freshly generated trajectory sets
    Coverage {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Analyze an existing dataset directory instead of generating
        #[arg(long, conflicts_with_all = ["compare", "seed", "episodes", "curve", "reward"])]
        dataset: Option<PathBuf>,
        /// Voxels per axis (default: config coverage_resolution)
        #[arg(long)]
        resolution: Option<usize>,
        /// Share one bounding cube across compared sets
        #[arg(long)]
        fixed_cube: bool,
        /// Compare diversity levels (default all three when flag is present)
        #[arg(
            long,
            value_delimiter = ',',
            num_args = 0..,
            default_missing_value = "low,middle,high"
        )]
        compare: Option<Vec<DiversityLevel>>,
        /// Write the XY scatter of all waypoints as CSV
        #[arg(long)]
        scatter_csv: Option<PathBuf>,
    },
    /// Build cycloid and bezier trajectories on identical geometries and
    /// compare their curvature
    AblateCurve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Number of seeded geometries
        #[arg(long, default_value_t = 100)]
        seeds: u64,
    },
    /// Print a dataset manifest and its first records
    Inspect {
        /// Dataset directory
        #[arg(long)]
        dataset: PathBuf,
        /// How many records to print
        #[arg(long, default_value_t = 5)]
        records: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::ZeroVector
        | Error::InvalidHalfAngle(_)
        | Error::InvalidGain(_)
        | Error::InvalidCloseDistance(_)
        | Error::InvalidSpacing(_)
        | Error::InvalidRewardRadius(_)
        | Error::InvalidResolution { .. } => 3,
        Error::NotARotation { .. }
        | Error::DegenerateStart
        | Error::StartAtGoal
        | Error::CurveParameterOutOfDomain(_)
        | Error::DegeneratePath
        | Error::SpacingExceedsPath { .. }
        | Error::ChunkStartOutOfRange { .. }
        | Error::OutsideRewardSphere { .. }
        | Error::EmptyWorkspace => 4,
        Error::RecordOrder { .. }
        | Error::VersionMismatch { .. }
        | Error::ChecksumMismatch { .. }
        | Error::RecordCountMismatch { .. }
        | Error::EpisodeCountMismatch { .. }
        | Error::MalformedRecord { .. }
        | Error::MalformedManifest(_)
        | Error::Io(_) => 5,
        Error::EmptyTrajectorySet => 6,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            scenario,
            out,
            jobs,
        } => cmd_generate(&scenario, &out, jobs),
        Command::Coverage {
            scenario,
            dataset,
            resolution,
            fixed_cube,
            compare,
            scatter_csv,
        } => cmd_coverage(
            &scenario,
            dataset.as_deref(),
            resolution,
            fixed_cube,
            compare,
            scatter_csv.as_deref(),
        ),
        Command::AblateCurve { scenario, seeds } => cmd_ablate_curve(&scenario, seeds),
        Command::Inspect { dataset, records } => cmd_inspect(&dataset, records),
    }
}

fn cmd_generate(args: &ScenarioArgs, out: &Path, jobs: Option<usize>) -> Result<()> {
    let scenario = args.scenario()?;
    let summary = generate_dataset(&scenario, out, jobs)?;
    let secs = summary.elapsed.as_secs_f64();
    let rate = if secs > 0.0 {
        summary.frames as f64 / secs
    } else {
        0.0
    };
    println!("episodes:       {}", summary.episodes);
    println!("records:        {}", summary.records);
    println!("frames:         {}", summary.frames);
    println!("elapsed_s:      {secs:.3}");
    println!("frames_per_sec: {rate:.0}");
    println!("records_sha256: {}", summary.manifest.records_sha256);
    println!("out:            {}", out.display());
    Ok(())
}

/// Waypoint polylines reconstructed from stored records: the observation
/// position followed by the cumulative action deltas of its chunk.
fn record_polylines(records: &[SerializedRecord]) -> Vec<Vec<Vector3<f64>>> {
    records
        .iter()
        .map(|r| {
            let mut p = Vector3::new(r.pose[0], r.pose[1], r.pose[2]);
            let mut line = Vec::with_capacity(r.actions.len() + 1);
            line.push(p);
            for row in &r.actions {
                p += Vector3::new(row[0], row[1], row[2]);
                line.push(p);
            }
            line
        })
        .collect()
}

fn write_scatter_csv(path: &Path, sets: &[(String, Vec<Vec<Vector3<f64>>>)]) -> Result<()> {
    let mut text = String::from("level,x,y\n");
    for (label, lines) in sets {
        for point in reachfield::metrics::xy_scatter(lines) {
            text.push_str(&format!("{label},{},{}\n", point[0], point[1]));
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn cmd_coverage(
    args: &ScenarioArgs,
    dataset: Option<&Path>,
    resolution: Option<usize>,
    fixed_cube: bool,
    compare: Option<Vec<DiversityLevel>>,
    scatter_csv: Option<&Path>,
) -> Result<()> {
    if let Some(dir) = dataset {
        let (manifest, records) = read_dataset(dir)?;
        let config = ScenarioConfig::from_toml(&manifest.config)?;
        let resolution = resolution.unwrap_or(config.coverage_resolution);
        let polylines = record_polylines(&records);
        let report = coverage(&polylines, resolution)?;
        if let Some(path) = scatter_csv {
            write_scatter_csv(path, &[("dataset".to_owned(), polylines)])?;
        }
        print_json(&serde_json::json!({
            "source": dir.display().to_string(),
            "coverage": report,
        }));
        return Ok(());
    }

    let scenario = args.scenario()?;
    let resolution = resolution.unwrap_or(scenario.coverage_resolution);

    let Some(levels) = compare else {
        let trajs = generate_baseline(
            scenario.diversity,
            &scenario,
            scenario.episodes,
            scenario.master_seed,
        )?;
        let polylines: Vec<_> = trajs.iter().map(|t| t.positions()).collect();
        let report = coverage(&polylines, resolution)?;
        if let Some(path) = scatter_csv {
            write_scatter_csv(path, &[(scenario.diversity.to_string(), polylines)])?;
        }
        print_json(&serde_json::json!({
            "source": "generated",
            "diversity_level": scenario.diversity.to_string(),
            "coverage": report,
        }));
        return Ok(());
    };

    let mut sets: Vec<(String, Vec<Vec<Vector3<f64>>>)> = Vec::new();
    for level in &levels {
        let trajs = generate_baseline(*level, &scenario, scenario.episodes, scenario.master_seed)?;
        sets.push((
            level.to_string(),
            trajs.iter().map(|t| t.positions()).collect(),
        ));
    }

    let mut reports: Vec<(String, CoverageReport)> = Vec::new();
    if fixed_cube {
        let union: Vec<Vec<Vector3<f64>>> =
            sets.iter().flat_map(|(_, lines)| lines.clone()).collect();
        let cube = bounding_cube(&union)?;
        for (label, lines) in &sets {
            reports.push((label.clone(), coverage_in_cube(lines, cube, resolution)?));
        }
    } else {
        for (label, lines) in &sets {
            reports.push((label.clone(), coverage(lines, resolution)?));
        }
    }

    let ratio_of = |level: DiversityLevel| {
        reports
            .iter()
            .find(|(label, _)| *label == level.to_string())
            .map(|(_, r)| r.ratio)
    };
    let ordering_ok = match (
        ratio_of(DiversityLevel::Low),
        ratio_of(DiversityLevel::Middle),
        ratio_of(DiversityLevel::High),
    ) {
        (Some(low), Some(middle), Some(high)) => Some(high > middle && middle > low),
        _ => None,
    };

    let mut levels_json = serde_json::Map::new();
    for (label, report) in &reports {
        levels_json.insert(label.clone(), serde_json::to_value(report).expect("json"));
    }
    if let Some(path) = scatter_csv {
        write_scatter_csv(path, &sets)?;
    }
    print_json(&serde_json::json!({
        "source": "generated",
        "trajectories_per_level": scenario.episodes,
        "resolution": resolution,
        "cube_mode": if fixed_cube { "fixed" } else { "per_set" },
        "levels": serde_json::Value::Object(levels_json),
        "ordering": "high > middle > low",
        "ordering_ok": ordering_ok,
    }));
    Ok(())
}

fn cmd_ablate_curve(args: &ScenarioArgs, seeds: u64) -> Result<()> {
    let scenario = args.scenario()?;
    let mut per_pair = Vec::new();
    let mut not_sharper = 0u64;
    let mut ties = 0u64;

    for i in 0..seeds {
        let seed = episode_seed(scenario.master_seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = sample_start_pose(&scenario.workspace, &scenario.field, &mut rng)?;

        let evaluate = |curve: CurveType| -> Result<(f64, f64)> {
            let path = curve.build_path(
                scenario.field.cone(),
                &start.position,
                scenario.curve_samples,
            )?;
            let traj = discretize(
                &path,
                &scenario.field,
                &start.orientation,
                scenario.beta,
                seed,
                curve,
            )?;
            Ok((max_discrete_curvature(&traj.positions()), path.length()))
        };
        let (cycloid_curvature, cycloid_length) = evaluate(CurveType::Cycloid)?;
        let (bezier_curvature, bezier_length) = evaluate(CurveType::Bezier)?;

        // straight-line geometries leave both curves with negligible
        // curvature and count as ties
        let tie = (cycloid_curvature - bezier_curvature).abs() < 1e-12
            || (cycloid_curvature < 1e-6 && bezier_curvature < 1e-6);
        if tie {
            ties += 1;
        }
        if tie || cycloid_curvature <= bezier_curvature {
            not_sharper += 1;
        }
        per_pair.push(serde_json::json!({
            "seed": seed,
            "cycloid_max_curvature": cycloid_curvature,
            "bezier_max_curvature": bezier_curvature,
            "cycloid_path_length": cycloid_length,
            "bezier_path_length": bezier_length,
        }));
    }

    let fraction = not_sharper as f64 / seeds.max(1) as f64;
    let (ci_low, ci_high) = wilson_ci95(not_sharper, seeds);
    print_json(&serde_json::json!({
        "pairs": seeds,
        "ties": ties,
        "fraction_cycloid_le_bezier": fraction,
        "wilson_ci95": [ci_low, ci_high],
        "beta_m": scenario.beta,
        "cone_half_angle_rad": scenario.field.cone().half_angle(),
        "curve_samples": scenario.curve_samples,
        "per_pair": per_pair,
    }));
    Ok(())
}

/// Wilson score interval for a binomial proportion at 95% confidence.
fn wilson_ci95(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = 1.959_963_984_540_054f64;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn cmd_inspect(dataset: &Path, records: usize) -> Result<()> {
    let (manifest, all_records) = read_dataset(dataset)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&manifest).expect("manifest serializes")
    );
    for record in all_records.iter().take(records) {
        println!(
            "{}",
            serde_json::to_string(record).expect("record serializes")
        );
    }
    Ok(())
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}
