//! Command-line front end. Every subcommand renders its result to a string so runs are easy to
//! test and byte-identical for identical arguments.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error as ThisError;

use crate::capacity::{
    adc_transmit_range, capacity_report, fig2_csv, fig2_curves, fig3_grid, fig3_rows,
};
use crate::catalysim::{self, DEFAULT_PRESET_EPS};
use crate::channels::QuantumChannel;
use crate::convertibility::build_eps_net;
use crate::error::Error;
use crate::linalg::DensityMatrix;
use crate::measures::{eof_two_qubit, log_negativity, von_neumann_entropy};
use crate::nodedist::{self, feasibility, DetCell, NodeScenario, LN3};
use crate::noniid::{build_sequence, prefix_rows};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0x00C0_FFEE;
/// Monte-Carlo samples per point when `--samples` is not given.
pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Parser, Debug)]
#[command(name = "entcat", version, about = "Catalytic entanglement toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format (each subcommand has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte-Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Entropy, log-negativity and (two qubits) entanglement of formation of a state file.
    Measures {
        #[arg(long)]
        state: PathBuf,
        /// Subsystems 0..cut form side A.
        #[arg(long, default_value_t = 1)]
        cut: usize,
    },
    /// Pauli-channel thresholds for n = 1..n_max.
    Fig2 {
        #[arg(long, default_value_t = 50)]
        n_max: u32,
    },
    /// Entanglement of formation vs sampled squashed bound for dephasing Choi states.
    Fig3 {
        /// Explicit p values; overrides --points.
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Amplitude-damping thresholds for d = 3..8.
    Table1,
    /// Non-iid sequence prefixes.
    Noniid {
        #[arg(long, default_value_t = 0.9)]
        f: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        u: f64,
        /// Prefix lengths to report.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1,10,100,1000,10000,100000,1000000"
        )]
        n: Vec<u64>,
    },
    /// Determinant heatmap (csv) or feasibility verdict (json) for the assisted line.
    Node {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Line length; defaults to ln 3/alpha.
        #[arg(long)]
        l: Option<f64>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Single-copy catalytic protocol from a scenario file or a named preset.
    Catalysim {
        #[arg(long, conflicts_with = "preset")]
        scenario: Option<PathBuf>,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(catalysim::PRESETS))]
        preset: Option<String>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_PRESET_EPS)]
        eps: f64,
    },
    /// Target net for catalytic conversions.
    Net {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Capacity bracket of a channel file; adds the sampled converse when --samples is given.
    Capacity {
        #[arg(long)]
        channel: PathBuf,
    },
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Toolkit(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Toolkit(e) if !e.is_input_error() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Six significant digits; scientific notation outside `[1e-5, 1e6)`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..6).contains(&e) {
        format!("{:.*}", (5 - e).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn read(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct MeasuresOut {
    dims: Vec<usize>,
    cut: usize,
    #[serde(rename = "S")]
    s_a: f64,
    #[serde(rename = "S_joint")]
    s_joint: f64,
    #[serde(rename = "E_N")]
    e_n: f64,
    #[serde(rename = "E_f", skip_serializing_if = "Option::is_none")]
    e_f: Option<f64>,
}

fn cmd_measures(state: &PathBuf, cut: usize, fmt: Format) -> CliResult<String> {
    let rho = DensityMatrix::from_json(&read(state)?)?;
    let n = rho.dims().len();
    if cut == 0 || cut >= n {
        return Err(
            Error::InvalidArgument(format!("cut {cut} does not split {n} subsystems")).into(),
        );
    }
    let a: Vec<usize> = (0..cut).collect();
    let out = MeasuresOut {
        dims: rho.dims().to_vec(),
        cut,
        s_a: von_neumann_entropy(&rho.partial_trace(&a)?).value,
        s_joint: von_neumann_entropy(&rho).value,
        e_n: log_negativity(&rho, cut)?.value,
        e_f: if rho.dims() == [2, 2] {
            Some(eof_two_qubit(&rho)?.value)
        } else {
            None
        },
    };
    Ok(match fmt {
        Format::Json => json(&out),
        Format::Csv => {
            let ef = out.e_f.map(fmt_sig).unwrap_or_default();
            format!(
                "S,S_joint,E_N,E_f\n{},{},{},{}\n",
                fmt_sig(out.s_a),
                fmt_sig(out.s_joint),
                fmt_sig(out.e_n),
                ef
            )
        }
    })
}

fn cmd_fig2(n_max: u32, fmt: Format) -> CliResult<String> {
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let rows = fig2_curves(&(1..=n_max).collect::<Vec<_>>())?;
    Ok(match fmt {
        Format::Csv => fig2_csv(&rows),
        Format::Json => json(&rows),
    })
}

fn cmd_fig3(p: &[f64], points: usize, samples: usize, seed: u64, fmt: Format) -> CliResult<String> {
    let ps = if p.is_empty() {
        fig3_grid(points)
    } else {
        p.to_vec()
    };
    let rows = fig3_rows(&ps, samples, seed)?;
    Ok(match fmt {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut s = String::from("p,E_f,E_sq_MC\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    fmt_sig(r.p),
                    fmt_sig(r.ef),
                    fmt_sig(r.esq_mc)
                );
            }
            s
        }
    })
}

fn cmd_table1(fmt: Format) -> CliResult<String> {
    let rows = (3..=8)
        .map(|d| adc_transmit_range(d, 1))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(match fmt {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut s = String::from("d,p_star,p_star_2dp,hashing_at_p_star\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{:.4},{:.2},{}",
                    r.d,
                    r.p_star,
                    r.p_star,
                    fmt_sig(r.hashing_closed)
                );
            }
            s
        }
    })
}

#[derive(Serialize)]
struct NoniidOut {
    f: f64,
    eps: f64,
    u: f64,
    delta: f64,
    log2_n: f64,
    rows: Vec<crate::noniid::PrefixRow>,
    singlet_probability: Vec<f64>,
    bracket: Vec<(f64, f64)>,
}

fn cmd_noniid(f: f64, eps: f64, u: f64, ns: &[u64], fmt: Format) -> CliResult<String> {
    let seq = build_sequence(f, eps, u)?;
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.first() == Some(&0) || ns.is_empty() {
        return Err(CliError::Usage("--n needs positive prefix lengths".into()));
    }
    let last = *ns.last().expect("nonempty");
    let all = prefix_rows(&seq, 1, last, 1)?;
    let rows: Vec<_> = ns.iter().map(|&n| all[(n - 1) as usize]).collect();
    Ok(match fmt {
        Format::Csv => {
            let mut s = String::from("i,p_i,prod,entropy_sum,count\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.i,
                    fmt_sig(r.p_i),
                    fmt_sig(r.prod),
                    fmt_sig(r.entropy_sum),
                    r.count
                );
            }
            s
        }
        Format::Json => {
            let singlet_probability = ns
                .iter()
                .map(|&n| seq.singlet_probability(n, f))
                .collect::<crate::Result<_>>()?;
            let bracket = ns.iter().map(|&n| seq.integral_bracket(n)).collect();
            json(&NoniidOut {
                f,
                eps,
                u,
                delta: seq.delta,
                log2_n: seq.tail.log2,
                rows,
                singlet_probability,
                bracket,
            })
        }
    })
}

fn cmd_node(alpha: f64, l: Option<f64>, grid: usize, fmt: Format) -> CliResult<String> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be positive")).into());
    }
    let l = l.unwrap_or(LN3 / alpha);
    match fmt {
        Format::Json => Ok(json(&feasibility(alpha, l)?)),
        Format::Csv => {
            let cells = if (alpha * l - LN3).abs() < 1e-12 {
                nodedist::det_grid(grid, grid)?
            } else {
                numeric_det_grid(alpha, l, grid)?
            };
            Ok(det_csv(&cells))
        }
    }
}

fn numeric_det_grid(alpha: f64, l: f64, grid: usize) -> CliResult<Vec<DetCell>> {
    use rayon::prelude::*;
    if grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let cells: crate::Result<Vec<DetCell>> = (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let s = l * (idx / grid) as f64 / (grid - 1) as f64;
            let beta = std::f64::consts::FRAC_PI_2 * (idx % grid) as f64 / (grid - 1) as f64;
            let det = nodedist::det_pt_numeric(&NodeScenario::new(alpha, l, s, beta)?)?;
            Ok(DetCell {
                s_prime: alpha * s,
                beta,
                det,
            })
        })
        .collect();
    Ok(cells?)
}

fn det_csv(cells: &[DetCell]) -> String {
    let mut s = String::from("s_prime,beta,det\n");
    for c in cells {
        let _ = writeln!(
            s,
            "{},{},{}",
            fmt_sig(c.s_prime),
            fmt_sig(c.beta),
            fmt_sig(c.det)
        );
    }
    s
}

fn cmd_catalysim(
    scenario: Option<&PathBuf>,
    preset: Option<&str>,
    n: usize,
    eps: f64,
    fmt: Format,
) -> CliResult<String> {
    let sc = match (scenario, preset) {
        (Some(path), _) => catalysim::parse_scenario(&read(path)?)?,
        (None, Some(name)) => catalysim::preset(name, n, eps)?,
        (None, None) => {
            return Err(CliError::Usage(
                "give --scenario FILE or --preset NAME".into(),
            ))
        }
    };
    let r = catalysim::report(&sc)?;
    Ok(match fmt {
        Format::Json => json(&r),
        Format::Csv => format!(
            "eps_in,eps_out,catalyst_residual,mi,mi_bound\n{},{},{},{},{}\n",
            fmt_sig(r.eps_in),
            fmt_sig(r.eps_out),
            fmt_sig(r.catalyst_residual),
            fmt_sig(r.mi),
            r.mi_bound.map(fmt_sig).unwrap_or_default()
        ),
    })
}

fn cmd_net(d: usize, eps: f64, fmt: Format) -> CliResult<String> {
    let net = build_eps_net(d, eps)?;
    Ok(match fmt {
        Format::Json => net.to_json() + "\n",
        Format::Csv => {
            let mut s = String::from("i,entropy");
            for k in 1..=d {
                let _ = write!(s, ",p{k}");
            }
            s.push('\n');
            for (i, p) in net.points.iter().enumerate() {
                let _ = write!(s, "{i},{}", fmt_sig(p.entropy()));
                for x in p.probs() {
                    let _ = write!(s, ",{}", fmt_sig(*x));
                }
                s.push('\n');
            }
            s
        }
    })
}

fn cmd_capacity(
    channel: &PathBuf,
    samples: Option<usize>,
    seed: u64,
    fmt: Format,
) -> CliResult<String> {
    let text = read(channel)?;
    let ch = QuantumChannel::from_json(&text)?;
    let descriptor = channel
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let r = capacity_report(&ch, &descriptor, samples.map(|n| (n, seed)))?;
    Ok(match fmt {
        Format::Json => json(&r),
        Format::Csv => {
            let mut s = String::from("name,value,threshold,verdict\n");
            for c in &r.criteria_log {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    c.name,
                    fmt_sig(c.value),
                    fmt_sig(c.threshold),
                    c.verdict
                );
            }
            let _ = writeln!(s, "qc_lower,{},,", r.qc_lower);
            let _ = writeln!(s, "qc_upper,{},,", r.qc_upper);
            s
        }
    })
}

/// Runs one parsed command and returns the rendered output.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    let fmt_or = |default: Format| g.format.unwrap_or(default);
    let samples = g.samples;
    match &cli.command {
        Command::Measures { state, cut } => cmd_measures(state, *cut, fmt_or(Format::Json)),
        Command::Fig2 { n_max } => cmd_fig2(*n_max, fmt_or(Format::Csv)),
        Command::Fig3 { p, points } => cmd_fig3(
            p,
            *points,
            samples.unwrap_or(DEFAULT_SAMPLES),
            g.seed,
            fmt_or(Format::Csv),
        ),
        Command::Table1 => cmd_table1(fmt_or(Format::Csv)),
        Command::Noniid { f, eps, u, n } => cmd_noniid(*f, *eps, *u, n, fmt_or(Format::Csv)),
        Command::Node { alpha, l, grid } => cmd_node(*alpha, *l, *grid, fmt_or(Format::Csv)),
        Command::Catalysim {
            scenario,
            preset,
            n,
            eps,
        } => cmd_catalysim(
            scenario.as_ref(),
            preset.as_deref(),
            *n,
            *eps,
            fmt_or(Format::Json),
        ),
        Command::Net { d, eps } => cmd_net(*d, *eps, fmt_or(Format::Json)),
        Command::Capacity { channel } => {
            cmd_capacity(channel, samples, g.seed, fmt_or(Format::Json))
        }
    }
}

fn run_parsed(cli: &Cli) -> CliResult<()> {
    let output = match cli.global.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| execute(cli))?,
        None => execute(cli)?,
    };
    match &cli.global.out {
        Some(path) => std::fs::write(path, output).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

/// Parses `args`, runs, reports errors on stderr and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_parsed(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
