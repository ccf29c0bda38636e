//! Command-line front end: run scenarios, replay recorded clouds, dump map
//! layers, benchmark pipeline stages, and emit plot-ready CSVs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use terranav::{
    build_costmap, inflate, ingest_scan, mark_obstacles, parse_grid_dump, publish_bundle,
    run_scenario_full, run_stage_benches, write_local_grid, CostMap, GridPath, Kernel,
    LayerRingBuffer, LocalGrid, MapBundle, PointCloud, Pose2D, RoiTracker, RunLog,
    ScenarioConfig, SimError, TerrainModel,
};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "terranav",
    version,
    about = "Terrain-aware local navigation simulator",
    after_help = "Environment:\n  TERRANAV_LOG=1  print progress to stderr\n\n\
Replay file formats:\n  cloud: CSV `x,y,z` meters per line, `#` comments allowed\n  \
poses: CSV `x,y,heading` per line, one line per cloud, in order"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario closed-loop and write its logs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for RunLog CSVs and the summary.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Benchmark each pipeline stage in isolation against its rate budget.
    Bench {
        /// Scenario to measure on; a built-in default is used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        /// Also write the report to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Feed recorded point clouds through the mapping pipeline offline and
    /// dump the resulting layers.
    Replay {
        /// Cloud CSV files, oldest first.
        #[arg(required = true)]
        clouds: Vec<PathBuf>,
        /// Pose CSV file with one `x,y,heading` line per cloud.
        #[arg(long)]
        poses: PathBuf,
        /// Optional scenario config supplying grid and fusion parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated layer names (default: all).
        #[arg(long)]
        layers: Option<String>,
    },
    /// Run a scenario and dump its final map layers as grid files.
    DumpMap {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated layer names (default: all).
        #[arg(long)]
        layers: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario and emit plot-ready CSV tables.
    PlotData {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn verbose() -> bool {
    std::env::var("TERRANAV_LOG").map_or(false, |v| !v.is_empty() && v != "0")
}

fn progress(msg: &str) {
    if verbose() {
        eprintln!("terranav: {msg}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<ExitCode, SimError> {
    match cmd {
        Cmd::Run { config, out, seed } => cmd_run(&config, out.as_deref(), seed),
        Cmd::Bench {
            config,
            iterations,
            out,
            seed,
        } => cmd_bench(config.as_deref(), iterations, out.as_deref(), seed),
        Cmd::Replay {
            clouds,
            poses,
            config,
            out,
            layers,
        } => cmd_replay(&clouds, &poses, config.as_deref(), &out, layers.as_deref()),
        Cmd::DumpMap {
            config,
            out,
            layers,
            seed,
        } => cmd_dump_map(&config, &out, layers.as_deref(), seed),
        Cmd::PlotData { config, out, seed } => cmd_plot_data(&config, &out, seed),
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig, SimError> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn cmd_run(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<ExitCode, SimError> {
    let cfg = load_config(config, seed)?;
    progress("running scenario");
    let products = run_scenario_full(&cfg)?;
    let summary = run_summary(&cfg, &products.log);
    if let Some(dir) = out {
        products.log.write_csv_dir(dir)?;
        std::fs::write(dir.join("summary.txt"), &summary)?;
    }
    print!("{summary}");
    Ok(ExitCode::from(products.log.outcome.exit_code() as u8))
}

/// Outcome, distance traveled, worst obstacle clearance, and per-stage
/// compute-time percentiles.
fn run_summary(cfg: &ScenarioConfig, log: &RunLog) -> String {
    let terrain = cfg.terrain.build(cfg.seed);
    let mut length = 0.0;
    for pair in log.poses.windows(2) {
        length += pair[0].pose.distance_to(pair[1].pose);
    }
    let min_clearance = log
        .poses
        .iter()
        .map(|p| terrain.clearance(p.pose.x, p.pose.y) - cfg.vehicle.radius)
        .fold(f64::INFINITY, f64::min);

    let mut s = format!(
        "outcome: {}\nelapsed: {:.3} s\npath length: {:.3} m\nmin clearance: {:.3} m\n",
        log.outcome, log.elapsed, length, min_clearance
    );
    let mut stages: Vec<&str> = log.timings.iter().map(|t| t.stage).collect();
    stages.sort_unstable();
    stages.dedup();
    for stage in stages {
        let mut ms: Vec<f64> = log
            .timings
            .iter()
            .filter(|t| t.stage == stage)
            .map(|t| t.millis)
            .collect();
        ms.sort_by(f64::total_cmp);
        let pct = |q: f64| ms[((q * ms.len() as f64).ceil() as usize).clamp(1, ms.len()) - 1];
        s.push_str(&format!(
            "stage {stage}: p50 {:.3} ms, p95 {:.3} ms over {} cycles\n",
            pct(0.50),
            pct(0.95),
            ms.len()
        ));
    }
    s
}

const DEFAULT_BENCH_SCENARIO: &str = "schema_version = 1\n[goal]\nx = 30.0\ny = 0.0\n";

fn cmd_bench(
    config: Option<&Path>,
    iterations: usize,
    out: Option<&Path>,
    seed: Option<u64>,
) -> Result<ExitCode, SimError> {
    let cfg = match config {
        Some(path) => load_config(path, seed)?,
        None => {
            let mut cfg = ScenarioConfig::from_toml_str(DEFAULT_BENCH_SCENARIO)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            cfg
        }
    };
    progress("benchmarking stages");
    let report = run_stage_benches(&cfg, iterations)?;
    print!("{report}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("bench_report.txt"), report.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_pose_file(path: &Path) -> Result<Vec<Pose2D>, SimError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
    let mut poses = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let mut coord = [0.0f64; 3];
        for c in coord.iter_mut() {
            *c = fields
                .next()
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| {
                    SimError::Config(format!("{} line {}: expected x,y,heading", path.display(), i + 1))
                })?;
        }
        if fields.next().is_some() {
            return Err(SimError::Config(format!(
                "{} line {}: expected exactly three fields",
                path.display(),
                i + 1
            )));
        }
        poses.push(Pose2D::new(coord[0], coord[1], coord[2]));
    }
    Ok(poses)
}

fn cmd_replay(
    clouds: &[PathBuf],
    pose_path: &Path,
    config: Option<&Path>,
    out: &Path,
    layers: Option<&str>,
) -> Result<ExitCode, SimError> {
    let cfg = match config {
        Some(path) => load_config(path, None)?,
        None => ScenarioConfig::from_toml_str(DEFAULT_BENCH_SCENARIO)?,
    };
    let poses = parse_pose_file(pose_path)?;
    if poses.len() != clouds.len() {
        return Err(SimError::Config(format!(
            "{} poses for {} clouds; counts must match",
            poses.len(),
            clouds.len()
        )));
    }

    let spec = cfg.grid;
    let kernel = Kernel::gaussian(cfg.fusion.kernel_sigma, cfg.fusion.kernel_radius)?;
    let mut tracker = RoiTracker::new(spec, cfg.roi.half_extent, cfg.roi.margin, poses[0])?;
    let mut buffer = LayerRingBuffer::new(spec, cfg.fusion.buffer_depth)?;
    let period = 1.0 / cfg.sensor.rate_hz;
    for (i, (path, &pose)) in clouds.iter().zip(&poses).enumerate() {
        progress(&format!("replaying {}", path.display()));
        let file = File::open(path)
            .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        let cloud = PointCloud::from_csv(BufReader::new(file), i as f64 * period)?;
        tracker.advance(pose, buffer.grids_mut())?;
        let scan = ingest_scan(&cloud, pose, spec, &tracker)?;
        buffer.push(mark_obstacles(scan, cfg.fusion.obstacle_threshold)?)?;
    }

    let last = *poses.last().expect("at least one cloud");
    let stamp = (clouds.len() - 1) as f64 * period;
    let bundle = publish_bundle(&buffer, last, tracker.half_extent(), &kernel, stamp)?;
    let costmap = inflate(&build_costmap(&bundle, &cfg.cost)?, cfg.cost.robot_radius)?;
    write_layer_dumps(out, &bundle, &costmap, layers)?;
    println!("replayed {} clouds into {}", clouds.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

const LAYER_NAMES: [&str; 6] = [
    "height",
    "height_filled",
    "gradient",
    "obstacle",
    "certainty",
    "cost",
];

fn write_layer_dumps(
    dir: &Path,
    bundle: &MapBundle,
    costmap: &CostMap,
    layers: Option<&str>,
) -> Result<(), SimError> {
    let selected: Vec<&str> = match layers {
        Some(list) => {
            let mut v = Vec::new();
            for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                if !LAYER_NAMES.contains(&name) {
                    return Err(SimError::Config(format!(
                        "unknown layer `{name}` (expected one of {})",
                        LAYER_NAMES.join(", ")
                    )));
                }
                v.push(name);
            }
            if v.is_empty() {
                return Err(SimError::Config("no layers selected".into()));
            }
            v
        }
        None => LAYER_NAMES.to_vec(),
    };
    std::fs::create_dir_all(dir)?;
    let grid_for = |name: &str| -> &LocalGrid {
        match name {
            "height" => &bundle.height,
            "height_filled" => &bundle.height_filled,
            "gradient" => &bundle.gradient_mag,
            "obstacle" => &bundle.obstacle,
            "certainty" => &bundle.certainty,
            "cost" => costmap.grid(),
            _ => unreachable!(),
        }
    };
    for name in selected {
        let path = dir.join(format!("{name}.grid"));
        let mut w = BufWriter::new(File::create(&path)?);
        write_local_grid(&mut w, grid_for(name), bundle.origin)?;
        w.flush()?;
        progress(&format!("wrote {}", path.display()));
    }
    Ok(())
}

fn cmd_dump_map(
    config: &Path,
    out: &Path,
    layers: Option<&str>,
    seed: Option<u64>,
) -> Result<ExitCode, SimError> {
    let cfg = load_config(config, seed)?;
    progress("running scenario for final map");
    let products = run_scenario_full(&cfg)?;
    let (Some(bundle), Some(costmap)) = (products.bundle.as_ref(), products.costmap.as_ref())
    else {
        return Err(SimError::Config(
            "run ended before a map was ever published; nothing to dump".into(),
        ));
    };
    write_layer_dumps(out, bundle, costmap, layers)?;
    // every dump must survive a round trip
    for entry in std::fs::read_dir(out)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "grid") {
            parse_grid_dump(BufReader::new(File::open(&path)?))
                .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        }
    }
    println!("wrote map layers to {}", out.display());
    Ok(ExitCode::from(products.log.outcome.exit_code() as u8))
}

fn cmd_plot_data(config: &Path, out: &Path, seed: Option<u64>) -> Result<ExitCode, SimError> {
    let cfg = load_config(config, seed)?;
    progress("running scenario for plot data");
    let products = run_scenario_full(&cfg)?;
    std::fs::create_dir_all(out)?;
    products.log.write_csv_dir(out)?;

    if let Some(path) = products.path.as_ref() {
        write_path_csv(&out.join("final_path.csv"), path)?;
    }
    if let Some(map) = products.costmap.as_ref() {
        write_cost_csv(&out.join("costmap.csv"), map)?;
    }
    write_terrain_csv(&out.join("terrain.csv"), &cfg.terrain.build(cfg.seed), &cfg)?;
    println!("wrote plot data to {}", out.display());
    Ok(ExitCode::from(products.log.outcome.exit_code() as u8))
}

fn write_path_csv(path: &Path, grid_path: &GridPath) -> Result<(), SimError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,y")?;
    for (x, y) in &grid_path.world_points {
        writeln!(w, "{x},{y}")?;
    }
    w.flush()?;
    Ok(())
}

fn write_cost_csv(path: &Path, map: &CostMap) -> Result<(), SimError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,y,cost")?;
    let grid = map.grid();
    for row in 0..grid.size() {
        for col in 0..grid.size() {
            let (x, y) = grid.cell_center(col, row);
            writeln!(w, "{x},{y},{}", grid.get(col, row))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Obstacle outlines sampled as point sequences, one shape id per obstacle.
fn write_terrain_csv(
    path: &Path,
    terrain: &TerrainModel,
    cfg: &ScenarioConfig,
) -> Result<(), SimError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "shape,x,y")?;
    for (i, c) in terrain.cylinders.iter().enumerate() {
        for k in 0..=32 {
            let a = std::f64::consts::TAU * k as f64 / 32.0;
            writeln!(w, "cyl{i},{},{}", c.cx + c.radius * a.cos(), c.cy + c.radius * a.sin())?;
        }
    }
    for (i, b) in terrain.boxes.iter().enumerate() {
        for (x, y) in [
            (b.x0, b.y0),
            (b.x1, b.y0),
            (b.x1, b.y1),
            (b.x0, b.y1),
            (b.x0, b.y0),
        ] {
            writeln!(w, "box{i},{x},{y}")?;
        }
    }
    writeln!(w, "goal,{},{}", cfg.goal.x, cfg.goal.y)?;
    w.flush()?;
    Ok(())
}
