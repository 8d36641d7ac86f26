//! Command-line front end: `integrals`, `fci` and `sv2rdm` subcommands.
//!
//! Exit codes: 0 success, 1 numerical or I/O failure, 2 usage error.

mod config;
mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{ConfigFile, InputSource, OutputFormat, RunConfig, ShadowRange, UsageError, CONFIG_KEYS};
pub use report::{convergence_csv, convergence_json, fci_csv, fci_json, fci_rows, ConvergenceRow, FciRow, HARTREE_TO_KCAL};

use crate::error::Error;
use crate::fci::{select_singlets, solve_fci, states_from_json, states_to_json, CIState, DeterminantBasis};
use crate::hamiltonian::{build_h_chain, parse_fcidump, write_fcidump, GeometryHChain, Hamiltonian};
use crate::sdp::{solve_points, ConditionSet, SolverMethod, SweepOptions};
use crate::shadow::RotationGroup;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SV2RDM_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sv2rdm", version, about = "Excited-state 2-RDM tomography from classical shadows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build H-chain integrals and write them as FCIDUMP.
    Integrals(CommonArgs),
    /// Solve FCI and list the lowest singlets.
    Fci(FciArgs),
    /// Reconstruct a state's 2-RDM from shadows for a range of shadow counts.
    Sv2rdm(Sv2rdmArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Linear hydrogen chain with N atoms.
    #[arg(long, value_name = "N")]
    hchain: Option<usize>,
    /// H-H distance in angstrom (default 1.0).
    #[arg(long, value_name = "ANGSTROM")]
    bond: Option<f64>,
    /// Read integrals from an FCIDUMP file.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["hchain", "bond"])]
    fcidump: Option<PathBuf>,
    /// key=value file; flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads (also read from SV2RDM_THREADS).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct FciArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Excited singlets reported after the ground state.
    #[arg(long, value_name = "M")]
    singlets: Option<usize>,
    #[arg(long, value_name = "csv|json")]
    format: Option<OutputFormat>,
    /// Write the eigenvectors to a checksummed JSON container.
    #[arg(long, value_name = "PATH")]
    states_out: Option<PathBuf>,
    /// Reuse states from a container instead of diagonalizing.
    #[arg(long, value_name = "PATH")]
    load: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Sv2rdmArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target singlet: 0 ground, K the K-th excited singlet.
    #[arg(long, value_name = "K")]
    state: Option<usize>,
    #[arg(long, value_name = "D|DQ|DQG")]
    conditions: Option<ConditionSet>,
    /// Single shadow count.
    #[arg(long, value_name = "N", conflicts_with = "sweep")]
    shadows: Option<usize>,
    /// Inclusive range of shadow counts, e.g. 0..12.
    #[arg(long, value_name = "A..B")]
    sweep: Option<ShadowRange>,
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, value_name = "COUNT")]
    seeds: Option<usize>,
    /// Per-value shadow tolerance; noisy shadows when positive.
    #[arg(long, value_name = "E")]
    epsilon: Option<f64>,
    /// Keep exact shadow values even when epsilon is positive.
    #[arg(long)]
    no_noise: bool,
    /// Primal and dual residual tolerance.
    #[arg(long, value_name = "T")]
    tol: Option<f64>,
    #[arg(long, value_name = "N")]
    max_iter: Option<usize>,
    #[arg(long, value_name = "auto|ipm|admm")]
    solver: Option<SolverMethod>,
    #[arg(long, value_name = "unitary|orthogonal")]
    rotations: Option<RotationGroup>,
    #[arg(long, value_name = "csv|json")]
    format: Option<OutputFormat>,
    /// Reuse states from a container instead of diagonalizing.
    #[arg(long, value_name = "PATH")]
    load: Option<PathBuf>,
    /// Write the resolved configuration as key=value.
    #[arg(long, value_name = "PATH")]
    save_config: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        Self::Usage(e.0)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => Self::Usage(m),
            other => Self::Failure(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Integrals(a) => cmd_integrals(&a),
        Command::Fci(a) => cmd_fci(&a),
        Command::Sv2rdm(a) => cmd_sv2rdm(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            EXIT_FAILURE
        }
    }
}

fn load_config(common: &CommonArgs) -> CliResult<ConfigFile> {
    match &common.config {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?;
            Ok(ConfigFile::parse(&text)?)
        }
    }
}

fn resolve_common(common: &CommonArgs, file: &ConfigFile, cfg: &mut RunConfig) -> CliResult<()> {
    let from_flags = common.hchain.is_some() || common.bond.is_some() || common.fcidump.is_some();
    let (hchain, bond, fcidump) = if from_flags {
        (common.hchain, common.bond, common.fcidump.clone())
    } else {
        (
            file.pick::<usize>(None, "hchain")?,
            file.pick::<f64>(None, "bond")?,
            file.pick::<PathBuf>(None, "fcidump")?,
        )
    };
    cfg.input = match (hchain, fcidump) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--hchain and --fcidump are mutually exclusive".into())),
        (Some(n), None) => Some(InputSource::HChain {
            n_atoms: n,
            bond_length: bond.unwrap_or(1.0),
        }),
        (None, Some(p)) => {
            if bond.is_some() {
                return Err(CliError::Usage("--bond requires --hchain".into()));
            }
            Some(InputSource::Fcidump(p))
        }
        (None, None) if bond.is_some() => return Err(CliError::Usage("--bond requires --hchain".into())),
        (None, None) => None,
    };
    cfg.out = file.pick(common.out.clone(), "out")?;
    let env_threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|e| CliError::Usage(format!("{THREADS_ENV}: {e}")))?,
        ),
        _ => None,
    };
    cfg.threads = file.pick(common.threads, "threads")?.or(env_threads);
    Ok(())
}

fn thread_pool(cfg: &RunConfig) -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Failure(format!("thread pool: {e}")))
}

fn hamiltonian(cfg: &RunConfig) -> CliResult<Hamiltonian> {
    match &cfg.input {
        None => Err(CliError::Usage("an input is required: --hchain N [--bond A] or --fcidump PATH".into())),
        Some(InputSource::HChain { n_atoms, bond_length }) => {
            let geom = GeometryHChain::new(*n_atoms, *bond_length).map_err(CliError::from)?;
            Ok(build_h_chain(&geom)?)
        }
        Some(InputSource::Fcidump(p)) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Failure(format!("{}: {e}", p.display())))?;
            Ok(parse_fcidump(&text).map_err(|e| CliError::Failure(e.to_string()))?)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Failure(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Failure(format!("stdout: {e}")))
        }
    }
}

fn cmd_integrals(a: &CommonArgs) -> CliResult<i32> {
    let file = load_config(a)?;
    let mut cfg = RunConfig::default();
    resolve_common(a, &file, &mut cfg)?;
    cfg.validate()?;
    let Some(out) = cfg.out.clone() else {
        return Err(CliError::Usage("integrals requires --out PATH".into()));
    };
    if matches!(cfg.input, Some(InputSource::Fcidump(_))) {
        return Err(CliError::Usage("integrals builds H-chain integrals; use --hchain".into()));
    }
    let h = hamiltonian(&cfg)?;
    write_output(Some(&out), &write_fcidump(&h))?;
    eprintln!(
        "wrote {} ({} orbitals, {} electrons, e_core {:.10})",
        out.display(),
        h.r_spatial(),
        h.n_electrons(),
        h.e_core()
    );
    Ok(EXIT_OK)
}

/// Lowest states containing the ground singlet and `m` excited singlets.
fn singlet_states(h: &Hamiltonian, m: usize) -> CliResult<Vec<CIState>> {
    let (na, nb) = h.spin_counts();
    let size = DeterminantBasis::dimension_for(h.r_spatial(), na, nb);
    let mut k = (4 * (m + 1)).clamp(1, size.max(1));
    loop {
        let states = solve_fci(h, k)?;
        let found = states.iter().filter(|s| s.is_singlet()).count();
        if found > m || k >= size {
            return Ok(states);
        }
        k = (2 * k).min(size);
    }
}

fn load_states(path: &Path) -> CliResult<Vec<CIState>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?;
    states_from_json(&text).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn check_states(h: &Hamiltonian, states: &[CIState]) -> CliResult<()> {
    let (na, nb) = h.spin_counts();
    match states.first() {
        Some(s) if s.basis.r_spatial == h.r_spatial() && s.basis.n_alpha == na && s.basis.n_beta == nb => Ok(()),
        Some(_) => Err(CliError::Usage("loaded states do not match the Hamiltonian's orbital or electron counts".into())),
        None => Err(CliError::Failure("state container is empty".into())),
    }
}

fn cmd_fci(a: &FciArgs) -> CliResult<i32> {
    let file = load_config(&a.common)?;
    let mut cfg = RunConfig::default();
    resolve_common(&a.common, &file, &mut cfg)?;
    if let Some(m) = file.pick(a.singlets, "singlets")? {
        cfg.singlets = m;
    }
    if let Some(f) = file.pick(a.format, "format")? {
        cfg.format = f;
    }
    cfg.states_out = file.pick(a.states_out.clone(), "states_out")?;
    cfg.load = file.pick(a.load.clone(), "load")?;
    cfg.validate()?;
    let pool = thread_pool(&cfg)?;

    let states = pool.install(|| -> CliResult<Vec<CIState>> {
        match &cfg.load {
            Some(p) => {
                let states = load_states(p)?;
                if cfg.input.is_some() {
                    check_states(&hamiltonian(&cfg)?, &states)?;
                }
                Ok(states)
            }
            None => singlet_states(&hamiltonian(&cfg)?, cfg.singlets),
        }
    })?;
    if let Some(p) = &cfg.states_out {
        write_output(Some(p), &states_to_json(&states)?)?;
    }
    let rows = fci_rows(&states, cfg.singlets);
    let text = match cfg.format {
        OutputFormat::Csv => fci_csv(&rows),
        OutputFormat::Json => fci_json(&rows)?,
    };
    write_output(cfg.out.as_deref(), &text)?;
    let listed = rows.iter().filter(|r| r.singlet_rank.is_some()).count();
    if listed < cfg.singlets + 1 {
        eprintln!("warning: the determinant space holds only {listed} singlet(s)");
    }
    Ok(EXIT_OK)
}

fn resolve_sv2rdm(a: &Sv2rdmArgs) -> CliResult<RunConfig> {
    let file = load_config(&a.common)?;
    let mut cfg = RunConfig::default();
    resolve_common(&a.common, &file, &mut cfg)?;
    if let Some(k) = file.pick(a.state, "state")? {
        cfg.state_index = k;
    }
    if let Some(c) = file.pick(a.conditions, "conditions")? {
        cfg.conditions = c;
    }
    let flag_range = match (a.shadows, a.sweep) {
        (Some(n), None) => Some(ShadowRange::single(n)),
        (None, r) => r,
        (Some(_), Some(_)) => return Err(CliError::Usage("--shadows and --sweep are mutually exclusive".into())),
    };
    cfg.shadows = match flag_range {
        Some(r) => r,
        None => match (file.pick::<usize>(None, "shadows")?, file.pick::<ShadowRange>(None, "sweep")?) {
            (Some(_), Some(_)) => return Err(CliError::Usage("config sets both shadows and sweep".into())),
            (Some(n), None) => ShadowRange::single(n),
            (None, Some(r)) => r,
            (None, None) => cfg.shadows,
        },
    };
    let seed = file.pick(a.seed, "seed")?.unwrap_or(0);
    let n_seeds = file.pick(a.seeds, "seeds")?.unwrap_or(1);
    cfg.seeds = (0..n_seeds as u64).map(|i| seed.wrapping_add(i)).collect();
    if let Some(e) = file.pick(a.epsilon, "epsilon")? {
        cfg.epsilon = e;
    }
    cfg.noise = if a.no_noise {
        false
    } else {
        file.pick::<bool>(None, "noise")?.unwrap_or(true)
    };
    if let Some(t) = file.pick(a.tol, "tol")? {
        cfg.tol = t;
    }
    if let Some(m) = file.pick(a.max_iter, "max_iter")? {
        cfg.max_iter = m;
    }
    if let Some(s) = file.pick(a.solver, "solver")? {
        cfg.solver = s;
    }
    if let Some(r) = file.pick(a.rotations, "rotations")? {
        cfg.rotations = r;
    }
    if let Some(f) = file.pick(a.format, "format")? {
        cfg.format = f;
    }
    cfg.load = file.pick(a.load.clone(), "load")?;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_sv2rdm(a: &Sv2rdmArgs) -> CliResult<i32> {
    let cfg = resolve_sv2rdm(a)?;
    if let Some(p) = &a.save_config {
        write_output(Some(p), &cfg.to_config_text())?;
    }
    let pool = thread_pool(&cfg)?;
    let (rows, failures) = pool.install(|| -> CliResult<(Vec<ConvergenceRow>, usize)> {
        let h = hamiltonian(&cfg)?;
        let states = match &cfg.load {
            Some(p) => {
                let s = load_states(p)?;
                check_states(&h, &s)?;
                s
            }
            None => singlet_states(&h, cfg.state_index)?,
        };
        let singlets = select_singlets(&states, cfg.state_index)?;
        let target = &singlets[cfg.state_index];
        let counts = cfg.shadows.counts();
        let mut rows = Vec::new();
        let mut failures = 0;
        for &seed in &cfg.seeds {
            let opts = SweepOptions {
                seed,
                group: cfg.rotations,
                epsilon: cfg.epsilon,
                noisy: cfg.noise,
                settings: cfg.solver_settings(),
            };
            for (rec, sol) in solve_points(&h, target, cfg.conditions, &counts, &opts)? {
                if rec.status == "error" || rec.status == "infeasible_detected" {
                    failures += 1;
                }
                if let Some(m) = &rec.message {
                    eprintln!("seed {seed} n={}: {} ({m})", rec.n_shadows, rec.status);
                } else if !rec.is_converged() {
                    eprintln!("seed {seed} n={}: {}", rec.n_shadows, rec.status);
                }
                rows.push(ConvergenceRow::new(rec, sol.as_ref(), cfg.conditions, cfg.state_index));
            }
        }
        Ok((rows, failures))
    })?;
    let text = match cfg.format {
        OutputFormat::Csv => convergence_csv(&cfg, &rows),
        OutputFormat::Json => convergence_json(&cfg, &rows)?,
    };
    write_output(cfg.out.as_deref(), &text)?;
    if failures > 0 {
        eprintln!("{failures} sweep point(s) failed");
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}
