use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use obb2d::contour::SamplingMode;
use obb2d::detect::DetectParams;
use obb2d::harness::{
    animate, run_oracle_check, write_csv, Experiment, FixtureKind, RecordWriter, DEFAULT_REPEATS,
};
use obb2d::multires::AnalysisKind;
use obb2d::{generate_fixture, BoxTree, ClosedContour, ContourPyramid, FitParams, Method, Scene};

#[derive(Parser)]
#[command(
    name = "obb2d",
    version,
    about = "Oriented box trees for 2D interference detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Elementary,
    Multires,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Elementary => Method::Elementary,
            MethodArg::Multires => Method::Multiresolution,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    Averaging,
    LeastSquares,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Blob,
    Gear,
    Star,
}

#[derive(clap::Args)]
struct FitArgs {
    /// Samples per segment used to orient boxes.
    #[arg(long = "r", default_value_t = 5)]
    r: usize,
    /// Space orientation samples evenly in arc length instead of parameter.
    #[arg(long)]
    arc_length: bool,
    /// Analysis filter for the multiresolution pyramid.
    #[arg(long, value_enum, default_value = "least-squares")]
    filter: FilterArg,
}

impl FitArgs {
    fn params(&self) -> FitParams {
        FitParams {
            orientation_samples: self.r,
            sampling: if self.arc_length {
                SamplingMode::ArcLength
            } else {
                SamplingMode::Parameter
            },
            analysis: match self.filter {
                FilterArg::Averaging => AnalysisKind::Averaging,
                FilterArg::LeastSquares => AnalysisKind::LeastSquares,
            },
            ..FitParams::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a box tree for one contour and print a per-level summary.
    Build {
        #[arg(long)]
        contour: PathBuf,
        #[arg(long, value_enum, default_value = "multires")]
        method: MethodArg,
        #[command(flatten)]
        fit: FitArgs,
        /// Print the full tree as JSON instead of the summary.
        #[arg(long)]
        dump_tree: bool,
        /// Print the contour pyramid as JSON instead of the summary.
        #[arg(long)]
        dump_pyramid: bool,
    },
    /// Run detection on a scene and write one CSV record.
    Detect {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_enum, default_value = "multires")]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Time detection under both methods (minimum over repetitions).
    Bench {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REPEATS)]
        repeat: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Compare tree-based contacts with an all-pairs check.
    Oracle {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_enum, default_value = "multires")]
        method: MethodArg,
    },
    /// Run detection for every frame of a scene.
    Animate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_enum, default_value = "multires")]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Generate a fixture contour.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 512)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        roughness: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: Option<&Path>) -> obb2d::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            obb2d::Error::Io {
                path: p.to_path_buf(),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn experiment(scene: &Path, method: Method, fit: &FitArgs) -> obb2d::Result<Experiment> {
    let scene = Scene::load(scene)?;
    Experiment::build(scene, method, &fit.params(), DetectParams::from_env()?)
}

fn run(cli: Cli) -> obb2d::Result<ExitCode> {
    match cli.command {
        Command::Build {
            contour,
            method,
            fit,
            dump_tree,
            dump_pyramid,
        } => {
            let contour = ClosedContour::load(&contour)?;
            let params = fit.params();
            if dump_pyramid {
                let min_level = params.min_level.min(contour.level());
                let pyramid = ContourPyramid::build_with(&params.analysis, &contour, min_level)?;
                println!("{}", pyramid.to_json_string());
            }
            let tree = BoxTree::from_contour(&contour, method.into(), &params)?;
            if dump_tree {
                println!("{}", tree.to_json_string());
            } else if !dump_pyramid {
                println!("method: {}", tree.method());
                println!("segments: {}", tree.leaf_count());
                println!("boxes: {}", tree.node_count());
                for (level, area) in tree.area_by_level().iter().enumerate() {
                    println!("level {level:>2}: area {area:.6}");
                }
            }
        }
        Command::Detect {
            scene,
            method,
            out,
            fit,
        } => {
            let exp = experiment(&scene, method.into(), &fit)?;
            let record = exp.measure(0, &exp.scene.poses, 1);
            write_csv(output(out.as_deref())?, &[record])?;
        }
        Command::Bench {
            scene,
            repeat,
            out,
            fit,
        } => {
            let mut records = Vec::new();
            for method in Method::ALL {
                let exp = experiment(&scene, method, &fit)?;
                records.push(exp.measure(0, &exp.scene.poses, repeat));
            }
            write_csv(output(out.as_deref())?, &records)?;
        }
        Command::Oracle { scene, method } => {
            let scene = Scene::load(&scene)?;
            let mut failed = false;
            let frames = if scene.frames.is_empty() {
                vec![scene.poses.clone()]
            } else {
                scene.frames.clone()
            };
            for (f, poses) in frames.iter().enumerate() {
                let report = run_oracle_check(&scene, method.into(), poses)?;
                println!(
                    "frame {f}: tree contacts {}, oracle contacts {}, missing {}",
                    report.tree_contacts,
                    report.oracle_contacts,
                    report.missing.len()
                );
                for m in &report.missing {
                    println!(
                        "  missing: objects ({}, {}) segments ({}, {}) distance {:.3e}",
                        m.object_a, m.object_b, m.segment_a, m.segment_b, m.distance
                    );
                }
                failed |= !report.passed();
            }
            println!("{}", if failed { "FAIL" } else { "PASS" });
            if failed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Animate {
            scene,
            method,
            out,
            fit,
        } => {
            let exp = experiment(&scene, method.into(), &fit)?;
            let mut writer = RecordWriter::new(output(out.as_deref())?);
            for record in animate(&exp) {
                writer.write(&record)?;
            }
            writer.finish()?;
        }
        Command::Gen {
            kind,
            m,
            roughness,
            seed,
            out,
        } => {
            let kind = match kind {
                KindArg::Blob => FixtureKind::Blob,
                KindArg::Gear => FixtureKind::Gear,
                KindArg::Star => FixtureKind::Star,
            };
            let contour = generate_fixture(kind, m, roughness, seed)?;
            match out {
                Some(p) => contour.save(p)?,
                None => println!("{}", contour.to_json_string()),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
