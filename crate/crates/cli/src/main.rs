mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noisy_pbt::PauliChannel;

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::Format;

/// Noisy port-based teleportation: fidelities, entanglement bounds, scans and
/// protocol simulation.
#[derive(Debug, Parser)]
#[command(name = "noisy-pbt", version)]
struct Cli {
    /// Defaults file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for relative or omitted output paths.
    #[arg(long, global = true, env = "NOISY_PBT_OUT_DIR")]
    out_dir: Option<PathBuf>,

    /// Output format; otherwise taken from the config, then the `--out` extension.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ideal and noisy PBT fidelities.
    Fidelity {
        #[arg(long)]
        ports: usize,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Closed-form bound surface or slice table.
    Bounds {
        #[arg(long, value_enum, default_value = "surface")]
        table: BoundsTable,
        /// Initial negativity for the slice table.
        #[arg(long, conflicts_with = "theta")]
        m0: Option<f64>,
        /// Schmidt angle; the slice uses `m0 = sin(theta)`.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        omega_min: f64,
        #[arg(long, default_value_t = 2.0 / 3.0)]
        omega_max: f64,
        #[arg(long)]
        omega_steps: Option<usize>,
        #[arg(long)]
        m0_steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo boundary scan over states and channels.
    Scan {
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Also run local refinement from both extremes.
        #[arg(long)]
        refine: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the exact protocol simulation with the analytic channel.
    Simulate {
        #[arg(long)]
        ports: usize,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entanglement teleportation of a pure two-qubit state.
    Pbet {
        #[arg(long)]
        ports: usize,
        #[arg(long)]
        theta: f64,
        /// Euler angles `alpha1,alpha2,gamma,beta1,beta2`.
        #[arg(long, value_parser = parse_angles)]
        angles: Option<[f64; 5]>,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum BoundsTable {
    Surface,
    Slice,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct NoiseArgs {
    /// Resource noise `p1,p2,p3` (probabilities summing with p0 to 4).
    #[arg(long, value_parser = parse_triple)]
    noise: Option<[f64; 3]>,
    /// Depolarizing resource noise with parameter `p`.
    #[arg(long)]
    depolarizing: Option<f64>,
    /// Single-axis flip noise `axis,p` with axis x, y, z or 1, 2, 3.
    #[arg(long, value_parser = parse_flip)]
    flip: Option<(usize, f64)>,
}

impl NoiseArgs {
    fn channel(&self) -> CliResult<Option<PauliChannel>> {
        let ch = if let Some([p1, p2, p3]) = self.noise {
            Some(PauliChannel::from_probabilities(p1, p2, p3)?)
        } else if let Some(p) = self.depolarizing {
            Some(PauliChannel::depolarizing(p)?)
        } else if let Some((axis, p)) = self.flip {
            Some(PauliChannel::flip(axis, p)?)
        } else {
            None
        };
        Ok(ch)
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    n_simplex: Option<usize>,
    #[arg(long)]
    n_sphere: Option<usize>,
    #[arg(long)]
    gamma_steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_list(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("not a number: {x:?}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated values, got {}", v.len()));
    }
    Ok(v)
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v = parse_list(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

fn parse_angles(s: &str) -> Result<[f64; 5], String> {
    let v = parse_list(s, 5)?;
    Ok([v[0], v[1], v[2], v[3], v[4]])
}

fn parse_flip(s: &str) -> Result<(usize, f64), String> {
    let (axis, p) = s.split_once(',').ok_or("expected axis,p")?;
    let axis = match axis.trim().to_ascii_lowercase().as_str() {
        "x" | "1" => 1,
        "y" | "2" => 2,
        "z" | "3" => 3,
        other => return Err(format!("unknown axis {other:?}")),
    };
    let p = p.trim().parse::<f64>().map_err(|_| format!("not a number: {p:?}"))?;
    Ok((axis, p))
}

/// Output settings shared by all file-writing commands.
pub struct OutputSettings {
    out_dir: Option<PathBuf>,
    format: Option<Format>,
}

impl OutputSettings {
    /// Resolves the target path and format. `default_name` is used (with the
    /// format extension) when no path was given.
    pub fn resolve(&self, out: Option<&PathBuf>, default_name: Option<&str>) -> Option<(PathBuf, Format)> {
        let from_ext = out.and_then(|p| p.extension()).and_then(|e| e.to_str()).and_then(|e| {
            match e.to_ascii_lowercase().as_str() {
                "json" => Some(Format::Json),
                "csv" => Some(Format::Csv),
                _ => None,
            }
        });
        let format = self.format.or(from_ext).unwrap_or(Format::Csv);
        let path = match (out, default_name) {
            (Some(p), _) => p.clone(),
            (None, Some(name)) => PathBuf::from(format!("{name}.{}", format.extension())),
            (None, None) => return None,
        };
        let path = match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path,
        };
        Some((path, format))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let settings = OutputSettings {
        out_dir: cli.out_dir.or(config.out_dir.clone()),
        format: cli.format.or(config.format),
    };
    match cli.command {
        Command::Fidelity { ports, noise } => commands::fidelity(ports, noise.channel()?),
        Command::Bounds {
            table,
            m0,
            theta,
            omega_min,
            omega_max,
            omega_steps,
            m0_steps,
            out,
        } => {
            let omega_steps = omega_steps.or(config.omega_steps).unwrap_or(61);
            let range = commands::OmegaRange {
                min: omega_min,
                max: omega_max,
                steps: omega_steps,
            };
            let out = settings
                .resolve(out.as_ref(), Some("bounds"))
                .expect("default name given");
            match table {
                BoundsTable::Surface => {
                    let m0_steps = m0_steps.or(config.m0_steps).unwrap_or(21);
                    commands::bounds_surface(range, m0_steps, &out)
                }
                BoundsTable::Slice => {
                    let m0 = match (m0, theta) {
                        (Some(m), _) => m,
                        (None, Some(t)) => t.sin(),
                        (None, None) => return Err(CliError::Usage("slice table needs --m0 or --theta".into())),
                    };
                    commands::bounds_slice(m0, range, &out)
                }
            }
        }
        Command::Scan {
            omega,
            theta,
            grid,
            refine,
            out,
        } => {
            let defaults = noisy_pbt::SampleGrid::default();
            let grid = noisy_pbt::SampleGrid {
                n_simplex: grid.n_simplex.or(config.n_simplex).unwrap_or(defaults.n_simplex),
                n_sphere: grid.n_sphere.or(config.n_sphere).unwrap_or(defaults.n_sphere),
                gamma_steps: grid.gamma_steps.or(config.gamma_steps).unwrap_or(defaults.gamma_steps),
                seed: grid.seed.or(config.seed).unwrap_or(defaults.seed),
            };
            let out = settings
                .resolve(out.as_ref(), Some("scan"))
                .expect("default name given");
            commands::scan(omega, theta, grid, refine, &out)
        }
        Command::Simulate { ports, noise, out } => {
            let out = settings.resolve(out.as_ref(), None);
            commands::simulate(ports, noise.channel()?.unwrap_or(PauliChannel::IDENTITY), out.as_ref())
        }
        Command::Pbet {
            ports,
            theta,
            angles,
            noise,
            out,
        } => {
            let out = settings.resolve(out.as_ref(), None);
            let angles = angles.map(noisy_pbt::EulerAngles::from_array).unwrap_or_default();
            commands::pbet(
                ports,
                theta,
                angles,
                noise.channel()?.unwrap_or(PauliChannel::IDENTITY),
                out.as_ref(),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flag_parsers() {
        assert_eq!(parse_triple("0.1, 0.2,0.3").unwrap(), [0.1, 0.2, 0.3]);
        assert!(parse_triple("0.1,0.2").is_err());
        assert_eq!(parse_flip("z,0.1").unwrap(), (3, 0.1));
        assert_eq!(parse_flip("X,0.2").unwrap(), (1, 0.2));
        assert!(parse_flip("w,0.1").is_err());
        assert_eq!(parse_angles("0,1,2,3,4").unwrap(), [0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn output_resolution() {
        let s = OutputSettings {
            out_dir: Some(PathBuf::from("/data")),
            format: None,
        };
        assert_eq!(
            s.resolve(Some(&PathBuf::from("a.json")), None),
            Some((PathBuf::from("/data/a.json"), Format::Json))
        );
        assert_eq!(
            s.resolve(None, Some("scan")),
            Some((PathBuf::from("/data/scan.csv"), Format::Csv))
        );
        assert_eq!(s.resolve(None, None), None);
        assert_eq!(
            s.resolve(Some(&PathBuf::from("/abs/x.csv")), None),
            Some((PathBuf::from("/abs/x.csv"), Format::Csv))
        );
    }
}
