use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use acurves::binforms::{self, MultiplicityProfile, ProfilePoset};
use acurves::deformation::{self, RepresentationModel};
use acurves::{aut, degeneration, enumerate, report, Curve, Error};

#[derive(Parser)]
#[command(
    name = "acurves",
    version,
    about = "Pointed curves with A-type singularities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a curve document and list its violations.
    Validate { curve: PathBuf },
    /// Arithmetic genus.
    Genus { curve: PathBuf },
    /// Prestability and stability for a given r.
    Stable {
        curve: PathBuf,
        #[arg(long)]
        r: u32,
    },
    /// Identity component of the automorphism group.
    Aut {
        curve: PathBuf,
        #[arg(long)]
        r: u32,
    },
    /// One-step isotrivial specializations.
    Degenerate {
        curve: PathBuf,
        #[arg(long)]
        r: u32,
    },
    /// Closed-point status.
    Closed {
        curve: PathBuf,
        #[arg(long)]
        r: u32,
    },
    /// Catalog of all stable types.
    Enumerate(Range),
    /// Degeneration digraph of all stable types.
    Poset {
        #[command(flatten)]
        range: Range,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Shorthand for `--format dot`.
        #[arg(long)]
        dot: bool,
    },
    /// Binary forms and their multiplicity profiles.
    #[command(subcommand)]
    Binforms(Binforms),
    /// Theta- and S-feasibility of a representation model.
    Theta { model: PathBuf },
}

#[derive(Args)]
struct Range {
    #[arg(long)]
    g: u32,
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long)]
    r: u32,
    #[arg(long, default_value_t = 4)]
    max_components: u32,
}

#[derive(Subcommand)]
enum Binforms {
    /// Profiles with multiplicities at most `max-mult` and their GIT status.
    Check {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        max_mult: u32,
    },
    /// Whether an open set of profiles admits a good moduli space.
    Gms {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        open: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

enum Failure {
    Invalid(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::ResourceBound(_) => Failure::Resource(err.to_string()),
            _ => Failure::Invalid(err.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Invalid(err.to_string())
    }
}

fn read_curve(path: &Path) -> Result<Curve, Failure> {
    Ok(Curve::from_json(&fs::read_to_string(path)?)?)
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let text = match &cli.command {
        Command::Validate { curve } => {
            let curve = read_curve(curve)?;
            let violations = curve.validate();
            if !violations.is_empty() {
                let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
                return Err(Failure::Invalid(list.join("\n")));
            }
            "valid".to_string()
        }
        Command::Genus { curve } => read_curve(curve)?.arithmetic_genus()?.to_string(),
        Command::Stable { curve, r } => {
            let curve = read_curve(curve)?;
            to_json(&json!({
                "prestable": curve.is_prestable(*r)?,
                "stable": curve.is_stable(*r)?,
            }))
        }
        Command::Aut { curve, r } => {
            let curve = read_curve(curve)?;
            let desc = aut::aut_identity_component(&curve, *r)?;
            to_json(&json!({
                "group": desc.to_string(),
                "torus_rank": desc.torus_rank,
                "unipotent": desc.unipotent,
                "weights": desc.basis.first(),
            }))
        }
        Command::Degenerate { curve, r } => {
            let curve = read_curve(curve)?;
            let moves: Vec<_> = degeneration::one_step_specializations(&curve, *r)?
                .into_iter()
                .map(|m| {
                    json!({
                        "move": m.kind.letter().to_string(),
                        "description": m.kind.to_string(),
                        "target": m.target,
                        "deformed": m.deformed,
                    })
                })
                .collect();
            to_json(&moves)
        }
        Command::Closed { curve, r } => {
            degeneration::closed_point_status(&read_curve(curve)?, *r)?.to_string()
        }
        Command::Enumerate(range) => to_json(&report::run_report(
            range.g,
            range.n,
            range.r,
            range.max_components,
        )?),
        Command::Poset { range, format, dot } => {
            let types =
                enumerate::enumerate_types(range.g, range.n, range.r, range.max_components)?;
            let digraph = degeneration::degeneration_digraph(&types, range.r)?;
            if *dot || *format == Format::Dot {
                digraph.to_dot()
            } else {
                to_json(&digraph)
            }
        }
        Command::Binforms(Binforms::Check { g, max_mult }) => {
            let poset = ProfilePoset::new(*g);
            let open = poset.bounded(*max_mult);
            let profiles: Vec<_> = open
                .iter()
                .map(|p| {
                    json!({
                        "parts": p.parts(),
                        "semistable": p.is_semistable(),
                        "stable": p.is_stable(),
                    })
                })
                .collect();
            let gms = if open.iter().any(|p| p.max_part() == 2 * g + 2) {
                None
            } else {
                Some(binforms::admits_gms(&open, *g)?)
            };
            to_json(
                &json!({ "g": g, "max_mult": max_mult, "profiles": profiles, "admits_gms": gms }),
            )
        }
        Command::Binforms(Binforms::Gms { g, open }) => {
            let text = fs::read_to_string(open)?;
            let open: BTreeSet<MultiplicityProfile> = match serde_json::from_str(&text) {
                Ok(set) => set,
                Err(_) => {
                    let parts: Vec<Vec<u32>> = serde_json::from_str(&text).map_err(Error::from)?;
                    parts
                        .into_iter()
                        .map(|p| MultiplicityProfile::new(*g, p))
                        .collect::<Result<_, _>>()?
                }
            };
            to_json(&json!({ "admits_gms": binforms::admits_gms(&open, *g)? }))
        }
        Command::Theta { model } => {
            let model: RepresentationModel =
                serde_json::from_str(&fs::read_to_string(model)?).map_err(Error::from)?;
            to_json(&json!({
                "theta_feasible": deformation::theta_feasible(&model)?,
                "s_feasible": deformation::s_feasible(&model)?,
            }))
        }
    };
    Ok(text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            if let Some(path) = &cli.out {
                if let Err(err) = fs::write(path, text + "\n") {
                    eprintln!("error: {err}");
                    return ExitCode::from(1);
                }
            } else {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
