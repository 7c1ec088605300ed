//! `frustra`: spectral ground states of antiferromagnetically coupled
//! spins on the C60 fullerene graph and toy polyhedra.
//!
//! Subcommands run the pipeline end to end and emit plot-ready CSV/JSON/VTK
//! files. Exit codes: 0 success, 1 usage error, 2 computation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use frustra_core::{
    anisotropy, build_c60, build_toy, dynamics, eigen, graph, io, optimize, spin, Toy,
};

#[derive(Parser)]
#[command(
    name = "frustra",
    version,
    about = "Ground states of antiferromagnetic spins on fullerene-like graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the spectral pipeline: graph, spectrum, ground state.
    ///
    /// Prints a JSON summary (both energy conventions) and writes the spin
    /// CSV plus a summary JSON into the output directory.
    Solve(SolveArgs),
    /// Integrate the precession dynamics and write the trajectory CSV.
    Dynamics(DynamicsArgs),
    /// Minimize the energy directly with seeded projected-gradient restarts.
    Optimize(OptimizeArgs),
    /// Anisotropy sensitivity: single-delta report plus a sweep CSV.
    Anisotropy(AnisotropyArgs),
    /// Export the graph or the ground-state spin field.
    Export(ExportArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Molecule to build.
    #[arg(long, value_enum)]
    molecule: MoleculeKind,
    /// Ring size; required when --molecule ring.
    #[arg(long)]
    size: Option<usize>,
    /// Exchange constant J (> 0, antiferromagnetic).
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    /// Spin magnitude S.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Double-bond coupling anisotropy: double bonds weighted 1 + delta.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Output directory; defaults to $FRUSTRA_OUT, then the current dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DynamicsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Initial state.
    #[arg(long, value_enum, default_value_t = InitialState::Ground)]
    init: InitialState,
    /// Integration span in units of 1/(J S^2).
    #[arg(long = "t-end", default_value_t = 10.0)]
    t_end: f64,
    /// Time step in units of 1/(J S^2).
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Seed for the random initial state.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record one sample every this many steps.
    #[arg(long = "sample-every", default_value_t = 10)]
    sample_every: usize,
    /// Also dump every k-th recorded sample to spin CSV files (0 = off);
    /// combine with --sample-every 1 for per-step dumps.
    #[arg(long = "dump-every", default_value_t = 0)]
    dump_every: usize,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of independent seeded restarts.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Base seed; restart r derives its own stream from (seed, r).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration cap per restart.
    #[arg(long = "max-iters", default_value_t = 50_000)]
    max_iters: usize,
}

#[derive(Args)]
struct AnisotropyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sweep lower bound.
    #[arg(long = "sweep-lo", default_value_t = -0.1)]
    sweep_lo: f64,
    /// Sweep upper bound.
    #[arg(long = "sweep-hi", default_value_t = 0.1)]
    sweep_hi: f64,
    /// Number of sweep grid points.
    #[arg(long = "sweep-points", default_value_t = 21)]
    sweep_points: usize,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output format.
    #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
    format: ExportFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum MoleculeKind {
    C60,
    Tetrahedron,
    Cube,
    Ring,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitialState {
    /// Spectral ground state.
    Ground,
    /// Seeded random unit vectors.
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    /// Graph document (vertices, edges, bond classes).
    Json,
    /// Ground-state spin CSV.
    Csv,
    /// Ground-state point cloud with spin vectors.
    Vtk,
}

enum CliError {
    Usage(String),
    Computation(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Computation(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Dynamics(args) => cmd_dynamics(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Anisotropy(args) => cmd_anisotropy(args),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Computation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

impl CommonArgs {
    fn build_graph(&self) -> Result<(graph::MolecularGraph, String), CliError> {
        match self.molecule {
            MoleculeKind::C60 => Ok((build_c60()?, "c60".to_string())),
            MoleculeKind::Tetrahedron => {
                Ok((build_toy(Toy::Tetrahedron)?, "tetrahedron".to_string()))
            }
            MoleculeKind::Cube => Ok((build_toy(Toy::Cube)?, "cube".to_string())),
            MoleculeKind::Ring => {
                let k = self.size.ok_or_else(|| {
                    CliError::Usage("--molecule ring requires --size".to_string())
                })?;
                Ok((build_toy(Toy::Ring(k))?, format!("ring{k}")))
            }
        }
    }

    fn coupling(&self) -> Result<spin::CouplingModel, CliError> {
        if self.delta.is_nan() || self.delta.abs() >= 0.5 {
            return Err(CliError::Usage(format!(
                "--delta must satisfy |delta| < 0.5, got {}",
                self.delta
            )));
        }
        Ok(spin::CouplingModel::with_multipliers(
            self.j,
            self.s,
            1.0,
            1.0 + self.delta,
        )?)
    }

    fn out_dir(&self) -> Result<PathBuf, CliError> {
        let dir = self
            .out
            .clone()
            .or_else(|| std::env::var_os("FRUSTRA_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::Computation(anyhow::anyhow!("cannot create {dir:?}: {e}")))?;
        Ok(dir)
    }
}

/// Summary printed by `solve`. Both energy conventions are shown: the
/// half-prefactor pairwise sum (the value every bound and ratio in this
/// tool uses) and the per-site eigenvalue sum J S^2 sum_i lambda_i, which
/// is exactly twice it for a spectral ground state.
#[derive(Serialize)]
struct SolveSummary {
    molecule: String,
    lambda_min: f64,
    multiplicity: usize,
    energy_half_convention: f64,
    energy_paper_convention: f64,
    hypothetical_min: f64,
    gap_ratio: f64,
    residual: f64,
}

/// Summary written next to the spin CSV.
#[derive(Serialize)]
struct FileSummary {
    lambda_min: f64,
    multiplicity: usize,
    energy: f64,
    bound: f64,
    gap_ratio: f64,
    residual: f64,
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let (g, label) = args.common.build_graph()?;
    let c = args.common.coupling()?;
    let out = args.common.out_dir()?;

    let matrix = graph::neighbor_matrix(&g, &c);
    let es = eigen::solve_symmetric(&matrix)?;
    let bottom = eigen::degenerate_group(&es, eigen::GroupSelector::Min)?;
    let gs = spin::ground_state(&g, &c)?;
    let hyp = spin::hypothetical_minimum(&g, &c);
    let bound = spin::spectral_bound(&g, &c)?;
    let eigen_sum_energy = c.energy_scale() * gs.lambda_site.iter().sum::<f64>();

    let summary = SolveSummary {
        molecule: label.clone(),
        lambda_min: bottom.value,
        multiplicity: bottom.multiplicity,
        energy_half_convention: gs.energy,
        energy_paper_convention: eigen_sum_energy,
        hypothetical_min: hyp,
        gap_ratio: (gs.energy - hyp) / hyp.abs(),
        residual: gs.stationarity_residual,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);

    io::write_spins_csv(&out.join(format!("spins_{label}.csv")), &g, &gs)?;
    let file_summary = FileSummary {
        lambda_min: bottom.value,
        multiplicity: bottom.multiplicity,
        energy: gs.energy,
        bound,
        gap_ratio: summary.gap_ratio,
        residual: gs.stationarity_residual,
    };
    std::fs::write(
        out.join(format!("summary_{label}.json")),
        serde_json::to_string_pretty(&file_summary)? + "\n",
    )
    .map_err(anyhow::Error::from)?;
    Ok(())
}

#[derive(Serialize)]
struct DynamicsSummary {
    molecule: String,
    init: String,
    t_end: f64,
    dt: f64,
    time_unit: String,
    samples: usize,
    initial_stationarity: f64,
    max_displacement: f64,
    energy_drift: f64,
    norm_drift: f64,
    moment_drift: f64,
}

fn cmd_dynamics(args: DynamicsArgs) -> Result<(), CliError> {
    let (g, label) = args.common.build_graph()?;
    let c = args.common.coupling()?;
    let out = args.common.out_dir()?;

    let (initial, init_label) = match args.init {
        InitialState::Ground => (spin::ground_state(&g, &c)?.directions, "ground"),
        InitialState::Random => (
            spin::random_directions(g.n_vertices(), args.seed),
            "random",
        ),
    };
    let stationarity = dynamics::stationarity_test(&g, &c, &initial)?;
    let options = dynamics::IntegrationOptions {
        sample_every: args.sample_every,
        renormalize: false,
    };
    let traj = dynamics::integrate(&g, &c, &initial, args.t_end, args.dt, options)?;

    let summary = DynamicsSummary {
        molecule: label.clone(),
        init: init_label.to_string(),
        t_end: args.t_end,
        dt: args.dt,
        time_unit: "1/(J*S^2)".to_string(),
        samples: traj.times.len(),
        initial_stationarity: stationarity,
        max_displacement: traj.max_displacement(),
        energy_drift: traj.energy_drift,
        norm_drift: traj.norm_drift,
        moment_drift: traj.moment_drift,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);

    io::write_trajectory_csv(&out.join(format!("trajectory_{label}.csv")), &traj)?;
    if args.dump_every > 0 {
        for (i, snapshot) in traj.snapshots.iter().enumerate().step_by(args.dump_every) {
            let config = spin::SpinConfiguration::from_directions(&g, &c, snapshot.clone())?;
            io::write_spins_csv(
                &out.join(format!("snapshot_{label}_{i:05}.csv")),
                &g,
                &config,
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct OptimizeSummary {
    molecule: String,
    restarts: usize,
    seed: u64,
    energy: f64,
    bound: f64,
    certification: optimize::Certification,
    converged: bool,
    restarts_converged: usize,
    best_restart: usize,
    residual: f64,
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let (g, label) = args.common.build_graph()?;
    let c = args.common.coupling()?;
    let out = args.common.out_dir()?;

    let cfg = optimize::OptimizerConfig {
        restarts: args.restarts,
        seed: args.seed,
        max_iters: args.max_iters,
        ..Default::default()
    };
    let res = optimize::minimize(&g, &c, &cfg)?;

    let summary = OptimizeSummary {
        molecule: label.clone(),
        restarts: args.restarts,
        seed: args.seed,
        energy: res.config.energy,
        bound: res.bound,
        certification: res.certification,
        converged: res.converged,
        restarts_converged: res.restarts_converged,
        best_restart: res.best_restart,
        residual: res.config.stationarity_residual,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);

    io::write_spins_csv(&out.join(format!("optimized_{label}.csv")), &g, &res.config)?;
    std::fs::write(
        out.join(format!("optimized_{label}.json")),
        serde_json::to_string_pretty(&summary)? + "\n",
    )
    .map_err(anyhow::Error::from)?;
    Ok(())
}

fn cmd_anisotropy(args: AnisotropyArgs) -> Result<(), CliError> {
    let (g, label) = args.common.build_graph()?;
    let out = args.common.out_dir()?;
    let delta = if args.common.delta != 0.0 {
        args.common.delta
    } else {
        anisotropy::NOMINAL_DELTA
    };

    let report = anisotropy::state_overlap(&g, delta)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    let grid = anisotropy::delta_grid(args.sweep_lo, args.sweep_hi, args.sweep_points);
    let rows = anisotropy::sweep(&g, &grid)?;
    io::write_sweep_csv(&out.join(format!("anisotropy_sweep_{label}.csv")), &rows)?;
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<(), CliError> {
    let (g, label) = args.common.build_graph()?;
    let out = args.common.out_dir()?;
    let path: PathBuf = match args.format {
        ExportFormat::Json => {
            let path = out.join(format!("graph_{label}.json"));
            io::write_graph_json(&path, &g)?;
            path
        }
        ExportFormat::Csv => {
            let c = args.common.coupling()?;
            let gs = spin::ground_state(&g, &c)?;
            let path = out.join(format!("spins_{label}.csv"));
            io::write_spins_csv(&path, &g, &gs)?;
            path
        }
        ExportFormat::Vtk => {
            let c = args.common.coupling()?;
            let gs = spin::ground_state(&g, &c)?;
            let path = out.join(format!("spins_{label}.vtk"));
            io::write_spins_vtk(&path, &g, &gs)?;
            path
        }
    };
    println!("{}", display_path(&path));
    Ok(())
}

fn display_path(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}
