use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nodal_atlas::io;
use nodal_atlas::mesh::{gen_flat_torus, gen_genus2_with, Genus2Metric};
use nodal_atlas::SurfaceMesh64;
use nodal_atlas_cli::{init_threads, run_pipeline, verify_bundle, PipelineConfig};

#[derive(Parser)]
#[command(name = "nodal-atlas", version, about = "Nodal sets and eigenfunction restrictions on surfaces with an isometric involution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a JSON config.
    Run {
        config: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-check the invariants recorded in a bundle.
    Verify { dir: PathBuf },
    /// Write a generated mesh, its edge lengths and its involution.
    Gen {
        #[command(subcommand)]
        surface: Surface,
        #[arg(short, long, global = true, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Surface {
    /// Flat torus with the reflection y -> -y.
    Torus {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        l1: f64,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        l2: f64,
    },
    /// Doubled one-holed torus with the swap of its halves.
    Genus2 {
        #[arg(long, default_value_t = 1)]
        subdiv: u32,
        #[arg(long, value_enum, default_value_t = Metric::UniformCurvature)]
        metric: Metric,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Metric {
    UniformCurvature,
    Grid,
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

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let threads = init_threads()?;
    match cli.command {
        Command::Run { config, k, out, seed } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(out) = out {
                cfg.output = out;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            eprintln!("running {} on {threads} threads", config.display());
            let bundle = run_pipeline(&cfg)?;
            let s = &bundle.summary;
            println!(
                "{}: V={} genus={} pairs={} -> {}",
                s.mesh.source,
                s.mesh.vertices,
                s.mesh.genus,
                s.records.len(),
                cfg.output.display()
            );
            for k in &bundle.report.kuznecov {
                match k.exponent {
                    Some(e) => println!("kuznecov {} {:?}: exponent {e:.4}", k.observable, k.kind),
                    None => println!("kuznecov {} {:?}: fit flagged (mean-zero f)", k.observable, k.kind),
                }
            }
            for v in &s.violations {
                println!("VIOLATION {v}");
            }
            Ok(if bundle.ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Verify { dir } => {
            let report = verify_bundle(&dir)?;
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let failed = report.failures().count();
            println!("{} checks, {failed} failed", report.checks.len());
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Gen { surface, out } => {
            let (mesh, inv): (SurfaceMesh64, _) = match surface {
                Surface::Torus { n, l1, l2 } => gen_flat_torus(n, l1, l2)?,
                Surface::Genus2 { subdiv, metric } => {
                    let metric = match metric {
                        Metric::UniformCurvature => Genus2Metric::UniformCurvature,
                        Metric::Grid => Genus2Metric::Grid,
                    };
                    gen_genus2_with(subdiv, metric)?
                }
            };
            std::fs::create_dir_all(&out)?;
            io::write_off(&mesh, &out.join("mesh.off"))?;
            io::write_lengths(&mesh, &out.join("mesh_lengths.json"))?;
            io::write_involution(&inv, &out.join("involution.json"))?;
            println!(
                "wrote V={} F={} genus={} to {}",
                mesh.vertex_count(),
                mesh.triangle_count(),
                mesh.genus(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
