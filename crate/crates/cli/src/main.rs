//! `floorplan`: batch driver for the reconstruction pipeline.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use floorplan_core::evaluate::evaluate;
use floorplan_core::extract::extract_candidates;
use floorplan_core::heatmap::{decode_stack, encode_stack, render_ground_truth, HeatmapStack};
use floorplan_core::model::{load, render_svg, save, Floorplan};
use floorplan_core::pointcloud::{compute_domain, density_image, parse_cloud, subsample, write_ply};
use floorplan_core::raster::ChannelStack;
use floorplan_core::reconstruct::reconstruct;
use floorplan_core::synth::{corrupt_heatmaps, gen_floorplan, sample_scan, SynthConfig};

use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "floorplan", version, about = "Vector floorplan reconstruction pipeline")]
struct Cli {
    /// Base seed (synth seeds, subsampling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for commands with independent inputs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate synthetic plans, scans and heatmap stacks.
    Synth {
        /// TOML or JSON generator config; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        /// Scan density in points per square metre.
        #[arg(long, default_value_t = 200.0)]
        density: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Point cloud to a top-down density raster.
    Project {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        subsample: Option<usize>,
    },
    /// Dump primitive candidates of a heatmap stack as JSON.
    Extract {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heatmap stack to vector floorplan.
    Reconstruct {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the integer program in LP format.
        #[arg(long)]
        dump_ip: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Score a predicted plan against ground truth.
    Evaluate {
        pred: PathBuf,
        gt: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan to SVG, and optionally to its ground-truth heatmap stack.
    Render {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        heatmap: Option<PathBuf>,
    },
}

/// Exit status 2 for usage and input/output problems, 1 for pipeline failures.
#[derive(Debug)]
enum Failure {
    Input(anyhow::Error),
    Pipeline(anyhow::Error),
}

trait Classify<T> {
    fn input(self, what: impl FnOnce() -> String) -> Result<T, Failure>;
    fn pipeline(self, what: impl FnOnce() -> String) -> Result<T, Failure>;
}

impl<T, E> Classify<T> for Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn input(self, what: impl FnOnce() -> String) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(anyhow::Error::new(e).context(what())))
    }

    fn pipeline(self, what: impl FnOnce() -> String) -> Result<T, Failure> {
        self.map_err(|e| Failure::Pipeline(anyhow::Error::new(e).context(what())))
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).input(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, bytes).input(|| format!("cannot write {}", path.display()))
}

fn read_plan(path: &Path) -> Result<Floorplan, Failure> {
    load(&read(path)?).input(|| format!("invalid plan file {}", path.display()))
}

fn read_stack(path: &Path) -> Result<HeatmapStack, Failure> {
    decode_stack(&read(path)?).input(|| format!("invalid FHM1 file {}", path.display()))
}

fn save_plan(plan: &Floorplan, path: &Path) -> Result<(), Failure> {
    let bytes = save(plan)
        .map_err(anyhow::Error::new)
        .map_err(Failure::Pipeline)?;
    write(path, bytes)
}

fn load_config(path: &Path) -> Result<SynthConfig, Failure> {
    let text = fs::read_to_string(path).input(|| format!("cannot read {}", path.display()))?;
    let config: SynthConfig = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).input(|| format!("bad config {}", path.display()))?
    } else {
        toml::from_str(&text).input(|| format!("bad config {}", path.display()))?
    };
    config
        .validate()
        .input(|| format!("bad config {}", path.display()))?;
    Ok(config)
}

fn finish<T: Serialize>(
    cli: &Cli,
    command: &str,
    inputs: &[&Path],
    outputs: Vec<PathBuf>,
    settings: &T,
    started: Instant,
) -> Result<(), Failure> {
    let manifest = RunManifest::new(command, inputs, &outputs, settings, cli.seed, started.elapsed());
    let anchor = &outputs[0];
    let path = manifest
        .write_beside(anchor)
        .input(|| format!("cannot write manifest beside {}", anchor.display()))?;
    if cli.verbose {
        eprintln!("{command}: wrote {} outputs, manifest {}", outputs.len(), path.display());
    }
    Ok(())
}

fn synth(cli: &Cli, config: Option<&Path>, seeds: u64, density: f64, out: &Path) -> Result<(), Failure> {
    let started = Instant::now();
    let mut config = match config {
        Some(p) => load_config(p)?,
        None => SynthConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if !density.is_finite() || density < 0.0 {
        return Err(Failure::Input(anyhow!("--density must be non-negative, got {density}")));
    }
    fs::create_dir_all(out).input(|| format!("cannot create {}", out.display()))?;
    let base = config.seed;
    let run = |s: u64| -> Result<Vec<PathBuf>, Failure> {
        let c = config.with_seed(s);
        let plan = gen_floorplan(&c).input(|| "bad config".into())?;
        let scan = sample_scan(&plan, density, s).pipeline(|| format!("scan of seed {s}"))?;
        let stack = render_ground_truth(&plan).pipeline(|| format!("render of seed {s}"))?;
        let stack = corrupt_heatmaps(&stack, &c.noise, s);
        let files = [
            out.join(format!("plan_{s:05}.json")),
            out.join(format!("scan_{s:05}.ply")),
            out.join(format!("heatmap_{s:05}.fhm")),
        ];
        save_plan(&plan, &files[0])?;
        write(&files[1], write_ply(&scan))?;
        write(&files[2], encode_stack(&stack))?;
        if cli.verbose {
            eprintln!("seed {s}: {} rooms, {} points", plan.rooms.len(), scan.len());
        }
        Ok(files.to_vec())
    };
    let results: Vec<Result<Vec<PathBuf>, Failure>> = (base..base + seeds).into_par_iter().map(run).collect();
    let mut outputs = vec![out.to_path_buf()];
    for r in results {
        outputs.extend(r?);
    }
    let settings = serde_json::json!({ "config": config, "seeds": seeds, "density": density });
    finish(cli, "synth", &[], outputs, &settings, started)
}

fn project(cli: &Cli, input: &Path, out: &Path, k: Option<usize>) -> Result<(), Failure> {
    let started = Instant::now();
    let text = String::from_utf8(read(input)?).input(|| format!("{} is not UTF-8 text", input.display()))?;
    let mut cloud = parse_cloud(&text).input(|| format!("cannot parse {}", input.display()))?;
    if let Some(k) = k {
        cloud = subsample(&cloud, k, cli.seed.unwrap_or(0)).pipeline(|| "subsample".into())?;
    }
    let domain = compute_domain(&cloud).pipeline(|| format!("no domain for {}", input.display()))?;
    let image = density_image(&cloud, &domain);
    write(out, encode_stack(&ChannelStack::from_raster("density", image)))?;
    let sidecar = out.with_extension("domain.json");
    let mut json = serde_json::to_string_pretty(&domain).expect("domain serializes");
    json.push('\n');
    write(&sidecar, json)?;
    if cli.verbose {
        eprintln!("projected {} points, cell {} m", cloud.len(), domain.scale);
    }
    let settings = serde_json::json!({ "subsample": k });
    finish(cli, "project", &[input], vec![out.to_path_buf(), sidecar], &settings, started)
}

fn extract(cli: &Cli, input: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let started = Instant::now();
    let stack = read_stack(input)?;
    let c = extract_candidates(&stack).pipeline(|| "candidate extraction".into())?;
    let mut json = serde_json::to_string_pretty(&c.to_json()).expect("candidates serialize");
    json.push('\n');
    match out {
        Some(path) => {
            write(path, json)?;
            finish(cli, "extract", &[input], vec![path.to_path_buf()], &serde_json::json!({}), started)
        }
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn reconstruct_cmd(
    cli: &Cli,
    input: &Path,
    out: &Path,
    dump_ip: Option<&Path>,
    svg: Option<&Path>,
) -> Result<(), Failure> {
    let started = Instant::now();
    let stack = read_stack(input)?;
    let r = reconstruct(&stack).pipeline(|| format!("reconstruction of {}", input.display()))?;
    if !r.solution.certified {
        eprintln!("warning: node budget exhausted; selection is not proven optimal");
    }
    let mut outputs = vec![out.to_path_buf()];
    save_plan(&r.plan, out)?;
    if let Some(p) = dump_ip {
        write(p, r.model.to_lp())?;
        outputs.push(p.to_path_buf());
    }
    if let Some(p) = svg {
        write(p, render_svg(&r.plan))?;
        outputs.push(p.to_path_buf());
    }
    if cli.verbose {
        eprintln!(
            "{} variables, {} constraints, {} nodes, objective {:.4}",
            r.model.len(),
            r.model.constraints.len(),
            r.solution.nodes,
            r.solution.objective
        );
    }
    finish(cli, "reconstruct", &[input], outputs, &serde_json::json!({}), started)
}

fn evaluate_cmd(cli: &Cli, pred: &Path, gt: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let started = Instant::now();
    let (p, g) = (read_plan(pred)?, read_plan(gt)?);
    let report = evaluate(&p, &g);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{json}");
    print!("{}", report.to_table());
    if let Some(path) = out {
        write(path, format!("{json}\n"))?;
        finish(cli, "evaluate", &[pred, gt], vec![path.to_path_buf()], &serde_json::json!({}), started)?;
    }
    Ok(())
}

fn render(cli: &Cli, input: &Path, out: &Path, heatmap: Option<&Path>) -> Result<(), Failure> {
    let started = Instant::now();
    let plan = read_plan(input)?;
    write(out, render_svg(&plan))?;
    let mut outputs = vec![out.to_path_buf()];
    if let Some(p) = heatmap {
        let stack = render_ground_truth(&plan).pipeline(|| "heatmap rendering".into())?;
        write(p, encode_stack(&stack))?;
        outputs.push(p.to_path_buf());
    }
    finish(cli, "render", &[input], outputs, &serde_json::json!({}), started)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool")
            .map_err(Failure::Input)?;
    }
    match &cli.command {
        Command::Synth {
            config,
            seeds,
            density,
            out,
        } => synth(cli, config.as_deref(), *seeds, *density, out),
        Command::Project { input, out, subsample } => project(cli, input, out, *subsample),
        Command::Extract { input, out } => extract(cli, input, out.as_deref()),
        Command::Reconstruct {
            input,
            out,
            dump_ip,
            svg,
        } => reconstruct_cmd(cli, input, out, dump_ip.as_deref(), svg.as_deref()),
        Command::Evaluate { pred, gt, out } => evaluate_cmd(cli, pred, gt, out.as_deref()),
        Command::Render { input, out, heatmap } => render(cli, input, out, heatmap.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Pipeline(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
