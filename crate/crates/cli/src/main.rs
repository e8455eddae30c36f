use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aimarray::geometry::{wavelength_mm, LATTICE48_CSV};
use aimarray::imaging::export::{write_csv_raster, write_pgm16, write_sidecar, ImageSidecar};
use aimarray::imaging::{psf, reconstruct, SceneParams, DEFAULT_RASTER};
use aimarray::io::write_atomic;
use aimarray::metrics::{
    avg_sll, count_unique, psl, scene_study, sll_profile, MainLobe, MetricsError, SsimParams,
    StudyError, StudyLayout,
};
use aimarray::optimize::{
    evaluate_objectives, random_search, Checkpoint, GaEngine, GaParams, OptimizeError,
};
use aimarray::signalsim::{
    apply_weights, calibrate_point_source, grid_estimate, simulate_visibility, ChannelModel,
    EmitterScene, SignalError,
};
use aimarray::{
    aperture_figures, sampling_function, ArrayLayout, GridConstraints, PositionGrid, UvConfig,
};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

/// Built-in grid name accepted wherever a grid path is.
const BUILTIN_GRID: &str = "lattice48";
/// Built-in layout name: the 24-element circle of radius 95 mm.
const BUILTIN_CIRCULAR: &str = "circular";
const CIRCULAR_N: usize = 24;
const CIRCULAR_RADIUS_MM: f64 = 95.0;

const EXIT_INPUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "aimarray",
    version,
    about = "Design and evaluate sparse receive-array layouts for interferometric imaging"
)]
struct Cli {
    /// Carrier frequency in GHz.
    #[arg(long, global = true, default_value_t = 38.0)]
    freq_ghz: f64,
    /// UV cell size in wavelengths.
    #[arg(long, global = true, default_value_t = 0.5)]
    cell: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a grid file against the physical constraints.
    GridValidate(GridValidateArgs),
    /// Unique samples, sidelobe levels and aperture figures of one layout.
    LayoutEval(LayoutEvalArgs),
    /// Search for layouts by random sampling or the genetic algorithm.
    Optimize(OptimizeArgs),
    /// Write the PSF image and its radial sidelobe profile.
    Psf(PsfArgs),
    /// SSIM of reconstructed random scenes for one or more layouts.
    SceneStudy(SceneStudyArgs),
    /// Snapshot-level receiver simulation with optional calibration.
    Signalsim(SignalsimArgs),
}

#[derive(Args)]
struct GridValidateArgs {
    /// Grid CSV (`id,x_mm,y_mm`) or `lattice48`.
    #[arg(default_value = BUILTIN_GRID)]
    grid: String,
    #[arg(long, default_value_t = 26.0)]
    min_spacing_mm: f64,
    #[arg(long, default_value_t = 202.0)]
    max_extent_mm: f64,
}

#[derive(Args)]
struct GridArg {
    /// Grid CSV or `lattice48`.
    #[arg(long, default_value = BUILTIN_GRID)]
    grid: String,
}

#[derive(Args)]
struct LayoutEvalArgs {
    #[command(flatten)]
    grid: GridArg,
    /// Layout JSON or `circular`.
    #[arg(long)]
    layout: String,
    #[arg(long, default_value_t = DEFAULT_RASTER)]
    raster: usize,
    /// Angular step of the sidelobe profile, degrees.
    #[arg(long, default_value_t = 1.0)]
    step_deg: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Random,
    Ga,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(value_enum)]
    method: Method,
    #[command(flatten)]
    grid: GridArg,
    /// Number of elements.
    #[arg(long, default_value_t = 24)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Random search trial count.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// GA with population 500 and 200 generations instead of 200/100.
    #[arg(long)]
    paper_scale: bool,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    crossover: Option<f64>,
    #[arg(long)]
    pareto: Option<f64>,
    /// Per-gene mutation probability (default 2/n).
    #[arg(long)]
    mutation_rate: Option<f64>,
    /// Write `ga_checkpoint.json` every K generations (0 = never).
    #[arg(long, default_value_t = 0)]
    checkpoint_every: usize,
    /// Continue a GA run from a checkpoint; its stored params and seed win.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Args)]
struct PsfArgs {
    #[command(flatten)]
    grid: GridArg,
    #[arg(long)]
    layout: String,
    #[arg(long, default_value_t = DEFAULT_RASTER)]
    raster: usize,
    #[arg(long, default_value_t = 1.0)]
    step_deg: f64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SceneStudyArgs {
    #[command(flatten)]
    grid: GridArg,
    /// Layout JSON or `circular`; repeat for more columns.
    #[arg(long, required = true)]
    layout: Vec<String>,
    #[arg(long, default_value_t = 20)]
    n_scenes: usize,
    /// Scene k uses seed `seed + k`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RASTER)]
    raster: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SignalsimArgs {
    #[command(flatten)]
    grid: GridArg,
    #[arg(long)]
    layout: String,
    /// Emitter scene JSON: `{"points": [{"alpha", "beta", "intensity"}]}`.
    #[arg(long)]
    scene: PathBuf,
    /// Channel model JSON; ideal unit gains without noise when omitted.
    #[arg(long)]
    channel: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    snapshots: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Calibrate on a point source first (seed + 1) and weight the scene run.
    #[arg(long)]
    calibrate: bool,
    /// Calibration source direction cosines.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    cal_alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    cal_beta: f64,
    #[arg(long, default_value_t = DEFAULT_RASTER)]
    raster: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// Failures that come from the run itself rather than its inputs.
#[derive(Debug)]
struct Infeasible(String);

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Infeasible {}

fn opt_err(e: OptimizeError) -> anyhow::Error {
    match e {
        OptimizeError::InfeasiblePopulation { .. } | OptimizeError::TooManyElements { .. } => {
            Infeasible(e.to_string()).into()
        }
        e => e.into(),
    }
}

fn metrics_err(e: MetricsError) -> anyhow::Error {
    match e {
        MetricsError::MainLobeFillsRaster => Infeasible(e.to_string()).into(),
        e => e.into(),
    }
}

fn study_err(e: StudyError) -> anyhow::Error {
    match e {
        StudyError::Metrics(m) => metrics_err(m),
        e => e.into(),
    }
}

fn signal_err(e: SignalError) -> anyhow::Error {
    match e {
        SignalError::PhaseResidual { .. } => Infeasible(e.to_string()).into(),
        e => e.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<Infeasible>()) {
                ExitCode::from(EXIT_INFEASIBLE)
            } else {
                ExitCode::from(EXIT_INPUT)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if !(cli.freq_ghz > 0.0 && cli.freq_ghz.is_finite()) {
        anyhow::bail!("--freq-ghz must be positive");
    }
    if !(cli.cell > 0.0 && cli.cell.is_finite()) {
        anyhow::bail!("--cell must be positive");
    }
    let uv = UvConfig::new(wavelength_mm(cli.freq_ghz), cli.cell);
    match cli.command {
        Command::GridValidate(a) => cmd_grid_validate(&a),
        Command::LayoutEval(a) => cmd_layout_eval(&a, uv, cli.freq_ghz),
        Command::Optimize(a) => cmd_optimize(&a, uv),
        Command::Psf(a) => cmd_psf(&a, uv),
        Command::SceneStudy(a) => cmd_scene_study(&a, uv),
        Command::Signalsim(a) => cmd_signalsim(&a, uv),
    }
}

fn load_grid(spec: &str, constraints: &GridConstraints) -> Result<PositionGrid> {
    if spec == BUILTIN_GRID && !Path::new(spec).exists() {
        return PositionGrid::from_csv_reader(BUILTIN_GRID, LATTICE48_CSV.as_bytes(), constraints)
            .with_context(|| format!("grid {spec}"));
    }
    PositionGrid::load(Path::new(spec), constraints).with_context(|| format!("grid {spec}"))
}

fn load_layout(spec: &str, grid: &PositionGrid) -> Result<ArrayLayout> {
    let layout = if spec == BUILTIN_CIRCULAR && !Path::new(spec).exists() {
        grid.circular_reference(CIRCULAR_N, CIRCULAR_RADIUS_MM)?
    } else {
        ArrayLayout::load(Path::new(spec)).with_context(|| format!("layout {spec}"))?
    };
    layout.validate(grid).with_context(|| format!("layout {spec}"))?;
    Ok(layout)
}

fn layout_name(spec: &str) -> String {
    Path::new(spec)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string())
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

/// Millimetre figure without a trailing `.0` on whole numbers.
fn mm(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
    }
}

fn cmd_grid_validate(a: &GridValidateArgs) -> Result<()> {
    let constraints = GridConstraints {
        min_spacing_mm: a.min_spacing_mm,
        max_extent_mm: a.max_extent_mm,
    };
    let grid = load_grid(&a.grid, &constraints)?;
    let (w, h) = grid.extents_mm();
    let min = grid
        .min_spacing_mm()
        .map(|d| format!("min {d:.1} mm"))
        .unwrap_or_else(|| "single slot".into());
    println!("{} slots, {}×{} mm, {min}, OK", grid.len(), mm(w), mm(h));
    Ok(())
}

fn cmd_layout_eval(a: &LayoutEvalArgs, uv: UvConfig, freq_ghz: f64) -> Result<()> {
    let grid = load_grid(&a.grid.grid, &GridConstraints::default())?;
    let layout = load_layout(&a.layout, &grid)?;
    let s = sampling_function(&layout, &grid, uv)?;
    let counts = count_unique(&s);
    let figures = aperture_figures(&layout, &grid, uv.wavelength_mm)?;
    let p = psf(&s, a.raster)?;
    let profile = sll_profile(&p, a.step_deg, MainLobe::FirstMinimum).map_err(metrics_err)?;
    let eval = evaluate_objectives(&layout, &grid, uv).map_err(opt_err)?;
    let out = json!({
        "grid": grid.name(),
        "n": layout.len(),
        "indices": layout.indices(),
        "frequency_ghz": freq_ghz,
        "wavelength_mm": uv.wavelength_mm,
        "unique_samples": counts.unique,
        "redundant_samples": counts.redundant,
        "avg_sll_db": avg_sll(&profile).map_err(metrics_err)?,
        "psl_db": psl(&profile).map_err(metrics_err)?,
        "aperture": figures,
        "objectives": eval.objectives,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn ga_params(a: &OptimizeArgs) -> GaParams {
    let mut p = if a.paper_scale {
        GaParams::paper_scale(a.seed)
    } else {
        GaParams::desk(a.seed)
    };
    if let Some(v) = a.population {
        p.population = v;
    }
    if let Some(v) = a.generations {
        p.generations = v;
    }
    if let Some(v) = a.crossover {
        p.crossover_fraction = v;
    }
    if let Some(v) = a.pareto {
        p.pareto_fraction = v;
    }
    if a.mutation_rate.is_some() {
        p.mutation_rate = a.mutation_rate;
    }
    p
}

fn cmd_optimize(a: &OptimizeArgs, uv: UvConfig) -> Result<()> {
    let grid = load_grid(&a.grid.grid, &GridConstraints::default())?;
    prepare_out_dir(&a.out_dir)?;
    match a.method {
        Method::Random => {
            let r = random_search(&grid, a.n, a.trials, uv, a.seed).map_err(opt_err)?;
            println!(
                "random search: {} unique samples after {} trials (seed {})",
                r.evaluation.unique, r.trials, r.seed
            );
            write_json(&a.out_dir.join("random_layout.json"), &r.layout)?;
            write_json(&a.out_dir.join("random_report.json"), &r)?;
        }
        Method::Ga => {
            let mut engine = match &a.resume {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let cp = Checkpoint::from_json(&text)?;
                    GaEngine::resume(&grid, cp).map_err(opt_err)?
                }
                None => GaEngine::new(&grid, a.n, uv, ga_params(a)).map_err(opt_err)?,
            };
            let p = *engine.params();
            println!(
                "GA params: population {}, generations {}, crossover {}, pareto {}, \
                 mutation {:.4}, seed {}",
                p.population,
                p.generations,
                p.crossover_fraction,
                p.pareto_fraction,
                p.mutation_rate_for(a.n),
                p.seed
            );
            let cp_path = a.out_dir.join("ga_checkpoint.json");
            while !engine.is_done() {
                engine.step();
                if a.checkpoint_every > 0 && engine.generation() % a.checkpoint_every == 0 {
                    write_text(&cp_path, &engine.checkpoint().to_json())?;
                }
            }
            let outcome = engine.finish().map_err(opt_err)?;
            let sel = &outcome.report.selected;
            println!(
                "GA: front of {}, selected {} unique samples",
                outcome.front.len(),
                sel.objectives.unique()
            );
            write_json(&a.out_dir.join("ga_front.json"), &outcome.front)?;
            write_json(&a.out_dir.join("ga_selected.json"), &sel.layout)?;
            write_json(&a.out_dir.join("ga_report.json"), &outcome.report)?;
        }
    }
    Ok(())
}

fn cmd_psf(a: &PsfArgs, uv: UvConfig) -> Result<()> {
    let grid = load_grid(&a.grid.grid, &GridConstraints::default())?;
    let layout = load_layout(&a.layout, &grid)?;
    prepare_out_dir(&a.out_dir)?;
    let s = sampling_function(&layout, &grid, uv)?;
    let p = psf(&s, a.raster)?;
    let mag = p.magnitude();
    let profile = sll_profile(&p, a.step_deg, MainLobe::FirstMinimum).map_err(metrics_err)?;
    let sidecar = ImageSidecar {
        cell_size: uv.cell_size,
        raster: a.raster,
        wavelength_mm: uv.wavelength_mm,
    };
    write_pgm16(&mag, &a.out_dir.join("psf.pgm"))?;
    write_csv_raster(&mag, &a.out_dir.join("psf.csv"))?;
    write_sidecar(&sidecar, &a.out_dir.join("psf.json"))?;
    write_text(&a.out_dir.join("sll.csv"), &profile.to_csv())?;
    let avg = avg_sll(&profile).map_err(metrics_err)?;
    let peak = psl(&profile).map_err(metrics_err)?;
    write_json(
        &a.out_dir.join("sll_summary.json"),
        &json!({ "avg_sll_db": avg, "psl_db": peak, "step_deg": a.step_deg }),
    )?;
    println!("avg SLL {avg:.2} dB, PSL {peak:.2} dB");
    Ok(())
}

fn cmd_scene_study(a: &SceneStudyArgs, uv: UvConfig) -> Result<()> {
    let grid = load_grid(&a.grid.grid, &GridConstraints::default())?;
    let columns = a
        .layout
        .iter()
        .map(|spec| {
            let layout = load_layout(spec, &grid)?;
            Ok(StudyLayout {
                name: layout_name(spec),
                sampling: sampling_function(&layout, &grid, uv)?,
                figures: aperture_figures(&layout, &grid, uv.wavelength_mm)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    prepare_out_dir(&a.out_dir)?;
    let params = SceneParams {
        raster: a.raster,
        cell_size: uv.cell_size,
        ..SceneParams::default()
    };
    let table = scene_study(&columns, a.n_scenes, a.seed, &params, &SsimParams::default())
        .map_err(study_err)?;
    write_text(&a.out_dir.join("ssim.csv"), &table.to_csv())?;
    for (name, mean) in table.layouts.iter().zip(table.means()) {
        println!("{name}: mean SSIM {mean:.4}");
    }
    Ok(())
}

fn cmd_signalsim(a: &SignalsimArgs, uv: UvConfig) -> Result<()> {
    let grid = load_grid(&a.grid.grid, &GridConstraints::default())?;
    let layout = load_layout(&a.layout, &grid)?;
    let scene = EmitterScene::load(&a.scene).with_context(|| format!("scene {}", a.scene.display()))?;
    let channel = match &a.channel {
        Some(path) => {
            ChannelModel::load(path).with_context(|| format!("channel {}", path.display()))?
        }
        None => ChannelModel::ideal(layout.len()),
    };
    if a.snapshots < layout.len() as u64 {
        eprintln!(
            "warning: {} snapshot(s) for {} channels; the covariance estimate is rank-deficient \
             and the image will be noisy",
            a.snapshots,
            layout.len()
        );
    }
    prepare_out_dir(&a.out_dir)?;
    let lambda = uv.wavelength_mm;
    let mut est = simulate_visibility(&scene, &layout, &grid, lambda, &channel, a.snapshots, a.seed)
        .map_err(signal_err)?;
    let mut weights = None;
    if a.calibrate {
        let source = EmitterScene::point(a.cal_alpha, a.cal_beta, 1.0)?;
        let cal = simulate_visibility(
            &source,
            &layout,
            &grid,
            lambda,
            &channel,
            a.snapshots,
            a.seed.wrapping_add(1),
        )
        .map_err(signal_err)?;
        let w = calibrate_point_source(&cal, &layout, &grid, lambda, (a.cal_alpha, a.cal_beta))
            .map_err(signal_err)?;
        est = apply_weights(&est, &w)?;
        weights = Some(w);
    }
    write_text(&a.out_dir.join("visibility.csv"), &est.to_csv())?;
    let vis = grid_estimate(&est.normalized(), &layout, &grid, uv, a.raster)?;
    let img = reconstruct(&vis);
    let (mut peak, mut at) = (f64::NEG_INFINITY, (0, 0));
    for r in 0..img.height() {
        for c in 0..img.width() {
            if img.get(r, c) > peak {
                peak = img.get(r, c);
                at = (r, c);
            }
        }
    }
    let sidecar = ImageSidecar {
        cell_size: uv.cell_size,
        raster: a.raster,
        wavelength_mm: lambda,
    };
    write_pgm16(&img, &a.out_dir.join("recon.pgm"))?;
    write_csv_raster(&img, &a.out_dir.join("recon.csv"))?;
    write_sidecar(&sidecar, &a.out_dir.join("recon.json"))?;
    let weights_json = weights.map(|w| w.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>());
    write_json(
        &a.out_dir.join("signalsim.json"),
        &json!({
            "snapshots": a.snapshots,
            "seed": a.seed,
            "calibrated": a.calibrate,
            "peak": peak,
            "peak_alpha": img.alpha().value(at.1),
            "peak_beta": img.beta().value(at.0),
            "weights": weights_json,
        }),
    )?;
    println!(
        "peak {peak:.6} at alpha {:.4}, beta {:.4}",
        img.alpha().value(at.1),
        img.beta().value(at.0)
    );
    Ok(())
}
