//! `qre`: batch front end for Hamiltonian construction, Trotter synthesis,
//! Krylov scans, QPE bounds, ADAPT runs and resource tables.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qre_core::adapt::{self, StopCriteria};
use qre_core::circuit::{self, GateCount, Strategy};
use qre_core::grouping::{self, Relation};
use qre_core::hamlib::{self, HubbardSpec};
use qre_core::krylov::{self, ScanConfig, Threshold};
use qre_core::optimize::BfgsOptions;
use qre_core::qpe::{self, V2Form};
use qre_core::report::{self, Provenance, ResourceReport, SystemInfo, TableRow};
use qre_core::routing::{self, CouplingGraph};
use qre_core::{io, linalg, sim, Error};

#[derive(Parser)]
#[command(name = "qre", version, about = "Quantum resource estimation for ground-state energy algorithms")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect Hamiltonian files.
    #[command(subcommand)]
    Ham(HamCommand),
    /// Partition terms into measurement groups and estimate shots.
    Group(GroupArgs),
    /// Synthesize one Trotter step and count gates.
    Trotter(TrotterArgs),
    #[command(subcommand)]
    Krylov(KrylovCommand),
    /// Trotter-error bound and resource plan for phase estimation.
    Qpe(QpeArgs),
    /// Run ADAPT-VQE with the qubit-excitation pool.
    Adapt(AdaptArgs),
    #[command(subcommand)]
    Report(ReportCommand),
    /// Resource arithmetic from explicit counts.
    #[command(subcommand)]
    Resources(ResourcesCommand),
}

#[derive(Subcommand)]
enum HamCommand {
    /// Spinless Fermi-Hubbard model on an open nx×ny lattice.
    Hubbard {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 4.0)]
        u: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Term counts, norms and (when small enough) the spectrum edges.
    Info {
        #[arg(short, long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct GroupArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value = "qubit-wise")]
    relation: Relation,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Also estimate shots on this state (QSV1 file).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Estimate shots on the dense ground state.
    #[arg(long, conflicts_with = "state")]
    ground: bool,
    /// Group membership CSV: group,term,coefficient,word.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TrotterArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Total evolution time.
    #[arg(long, default_value_t = 1.0)]
    time: f64,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    /// Comma-separated strategies; all three by default.
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<Strategy>,
    /// Route onto a heavy-hex lattice of ROWSxCOLS cells, e.g. 2x2.
    #[arg(long, value_parser = parse_grid, value_name = "ROWSxCOLS")]
    heavy_hex: Option<(usize, usize)>,
    /// Write the circuit of the first strategy.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once('x').ok_or_else(|| format!("expected ROWSxCOLS, got {s:?}"))?;
    Ok((
        r.parse().map_err(|e| format!("{r:?}: {e}"))?,
        c.parse().map_err(|e| format!("{c:?}: {e}"))?,
    ))
}

#[derive(Subcommand)]
enum KrylovCommand {
    /// Energies for every subspace dimension and evolution setting.
    Scan(ScanArgs),
    /// Dimension at which the convergence bound reaches a target error.
    Bound(BoundArgs),
    /// Least-squares line through (x, y) points, evaluated at a target x.
    Extrapolate(ExtrapolateArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Squared overlap of the reference with the ground state.
    #[arg(long)]
    overlap: f64,
    #[arg(long)]
    dmax: usize,
    /// Comma-separated Trotter step counts.
    #[arg(long, value_delimiter = ',')]
    trotter: Vec<usize>,
    /// Skip the exact-evolution column.
    #[arg(long)]
    no_exact: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Krylov time step; defaults to π/(4‖H‖).
    #[arg(long)]
    time: Option<f64>,
    /// Overlap-matrix eigenvalue threshold, or "none".
    #[arg(long, default_value = "none")]
    threshold: Threshold,
    #[arg(long, default_value = "naive")]
    strategy: Strategy,
    /// Directory for KM1 matrix dumps, one file per column.
    #[arg(long)]
    matrices: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct BoundArgs {
    /// Take the gaps from this Hamiltonian's dense spectrum.
    #[arg(short, long, required_unless_present_all = ["gap1", "gapn"])]
    input: Option<PathBuf>,
    #[arg(long, conflicts_with = "input")]
    gap1: Option<f64>,
    #[arg(long, conflicts_with = "input")]
    gapn: Option<f64>,
    #[arg(long)]
    overlap: f64,
    #[arg(long, default_value_t = 1e-3)]
    target: f64,
    /// Also evaluate the bound at this dimension.
    #[arg(long)]
    d: Option<f64>,
}

#[derive(Args)]
struct ExtrapolateArgs {
    /// Points as x:y, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    points: Vec<String>,
    #[arg(long)]
    x: f64,
}

#[derive(Args)]
struct QpeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(long, default_value = "symmetric")]
    form: V2Form,
    /// Use the closed-form bound even when the exact shift is computable.
    #[arg(long)]
    bound_only: bool,
    /// Strategy for the per-step gate counts.
    #[arg(long, default_value = "cancel")]
    strategy: Strategy,
    /// Relation for the recorded group count.
    #[arg(long, default_value = "qubit-wise")]
    relation: Relation,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct AdaptArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Occupied qubits in the computational reference; defaults to the
    /// particle number of the dense ground state.
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    grad_tol: f64,
    /// Stop at this error against the dense ground energy; 0 disables.
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum ReportCommand {
    /// One resource row per algorithm.
    Table(TableArgs),
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    adapt: Option<PathBuf>,
    #[arg(long)]
    krylov: Option<PathBuf>,
    /// QPE report JSON; also the source of n, N_terms, N_groups and the
    /// per-step gate counts.
    #[arg(long)]
    qpe: PathBuf,
    #[arg(long, default_value = "system")]
    system: String,
    /// Error target for reading the Krylov scan.
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum ResourcesCommand {
    Krylov {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        groups: u64,
        #[arg(long)]
        n_t: u64,
        /// Single-qubit gates per Trotter step.
        #[arg(long)]
        n1q: u64,
        /// Two-qubit gates per Trotter step.
        #[arg(long)]
        n2q: u64,
    },
    Qpe {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n_t: f64,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long)]
        n1q: u64,
        #[arg(long)]
        n2q: u64,
    },
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    let json = serde_json::to_string(&ErrorJson { error: kind, message }).unwrap_or_default();
    eprintln!("{json}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail("usage", e.render().to_string().trim_end().to_string(), 2);
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return fail("usage", "--jobs must be at least 1".into(), 2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return fail("usage", e.to_string(), 2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.to_string(), 1),
    }
}

fn print_json<T: Serialize>(value: &T) -> qre_core::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(command: Command) -> qre_core::Result<()> {
    match command {
        Command::Ham(c) => ham(c),
        Command::Group(a) => group(a),
        Command::Trotter(a) => trotter(a),
        Command::Krylov(KrylovCommand::Scan(a)) => krylov_scan(a),
        Command::Krylov(KrylovCommand::Bound(a)) => krylov_bound(a),
        Command::Krylov(KrylovCommand::Extrapolate(a)) => krylov_extrapolate(a),
        Command::Qpe(a) => qpe_cmd(a),
        Command::Adapt(a) => adapt_cmd(a),
        Command::Report(ReportCommand::Table(a)) => report_table(a),
        Command::Resources(c) => resources(c),
    }
}

fn ham(c: HamCommand) -> qre_core::Result<()> {
    match c {
        HamCommand::Hubbard { nx, ny, t, u, mu, output } => {
            let h = hamlib::build_hubbard(&HubbardSpec::new(nx, ny, t, u, mu))?;
            hamlib::save_pauli_file(&h, &output)?;
            print_json(&serde_json::json!({
                "n": h.n(),
                "N_terms": h.len(),
                "identity_offset": h.identity_offset(),
                "output": output,
            }))
        }
        HamCommand::Info { input } => {
            let h = hamlib::load_pauli_file(&input)?;
            let mut info = serde_json::json!({
                "n": h.n(),
                "N_terms": h.len(),
                "identity_offset": h.identity_offset(),
                "h_max": h.max_abs_coefficient(),
                "norm_upper_bound": hamlib::norm_upper_bound(&h),
            });
            if h.n() <= linalg::dense_cap() {
                let s = hamlib::dense_spectrum(&h)?.info;
                info["e0"] = s.e0.into();
                info["e1"] = s.e1.into();
                info["emax"] = s.emax.into();
                info["norm"] = s.norm2.into();
            }
            print_json(&info)
        }
    }
}

fn group(a: GroupArgs) -> qre_core::Result<()> {
    let h = hamlib::load_pauli_file(&a.input)?;
    let groups = grouping::sorted_insertion_group(&h, a.relation);
    let mm = grouping::maximally_mixed_shot_bound(&h, &groups, a.epsilon)?;
    let state = match (&a.state, a.ground) {
        (Some(p), _) => Some(sim::load_state(p)?),
        (None, true) => Some(sim::ground_state(&h)?.1),
        (None, false) => None,
    };
    let on_state = match &state {
        Some(s) => Some(grouping::estimate_shots(&h, &groups, s, a.epsilon)?.total_shots),
        None => None,
    };
    if let Some(out) = &a.output {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["group", "term", "coefficient", "word"])?;
        for (g, members) in groups.groups().iter().enumerate() {
            for &i in members {
                let t = &h.terms()[i];
                w.write_record([g.to_string(), i.to_string(), format!("{:e}", t.coefficient), t.word.to_string()])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        io::write_atomic(out, &bytes)?;
    }
    print_json(&serde_json::json!({
        "relation": groups.relation().to_string(),
        "N_terms": h.len(),
        "N_groups": groups.len(),
        "epsilon": a.epsilon,
        "shots_maximally_mixed": mm.total_shots,
        "shots_state": on_state,
    }))
}

#[derive(Serialize)]
struct TrotterRow {
    strategy: String,
    #[serde(flatten)]
    counts: GateCount,
    routed: Option<GateCount>,
    overhead: Option<f64>,
}

fn trotter(a: TrotterArgs) -> qre_core::Result<()> {
    let h = hamlib::load_pauli_file(&a.input)?;
    let strategies = if a.strategy.is_empty() {
        Strategy::ALL.to_vec()
    } else {
        a.strategy.clone()
    };
    let graph = match a.heavy_hex {
        Some((rows, cols)) => Some(CouplingGraph::heavy_hex(rows, cols)?),
        None => None,
    };
    let mut rows = Vec::new();
    for (k, &s) in strategies.iter().enumerate() {
        let c = circuit::synth_trotter_step(&h, a.time, a.steps, s)?;
        if k == 0 {
            if let Some(out) = &a.output {
                circuit::save_circuit(&c, out)?;
            }
        }
        let counts = c.count();
        let (routed, overhead) = match &graph {
            Some(g) => {
                let r = routing::route(&c, g)?.circuit.count();
                let ratio = if counts.n_2q == 0 { 1.0 } else { r.n_2q as f64 / counts.n_2q as f64 };
                (Some(r), Some(ratio))
            }
            None => (None, None),
        };
        rows.push(TrotterRow {
            strategy: s.to_string(),
            counts,
            routed,
            overhead,
        });
    }
    print_json(&serde_json::json!({ "n": h.n(), "N_terms": h.len(), "rows": rows }))
}

fn krylov_scan(a: ScanArgs) -> qre_core::Result<()> {
    let h = hamlib::load_pauli_file(&a.input)?;
    let cfg = ScanConfig {
        trotter_steps: a.trotter.clone(),
        include_exact: !a.no_exact,
        t: a.time,
        threshold: a.threshold,
        strategy: a.strategy,
        seed: a.seed,
        ..ScanConfig::new(a.overlap, a.dmax)
    };
    let scan = krylov::convergence_scan(&h, &cfg)?;
    krylov::write_scan(&scan.rows, &a.output)?;
    if let Some(dir) = &a.matrices {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        for (steps, m) in &scan.matrices {
            let name = match steps {
                Some(r) => format!("trotter{r}.km1"),
                None => "exact.km1".to_string(),
            };
            krylov::save_matrices(m, dir.join(name))?;
        }
    }
    print_json(&serde_json::json!({
        "e0": scan.e0,
        "t": scan.t,
        "rows": scan.rows.len(),
        "output": a.output,
    }))
}

fn krylov_bound(a: BoundArgs) -> qre_core::Result<()> {
    let (gap1, gapn) = match &a.input {
        Some(p) => {
            let s = hamlib::dense_spectrum(&hamlib::load_pauli_file(p)?)?.info;
            (s.e1 - s.e0, s.emax - s.e0)
        }
        None => (a.gap1.unwrap_or_default(), a.gapn.unwrap_or_default()),
    };
    let d = krylov::epperly_dimension(gap1, gapn, a.overlap, a.target)?;
    let at_d = match a.d {
        Some(d) => Some(krylov::epperly_bound(gap1, gapn, a.overlap, d)?),
        None => None,
    };
    print_json(&serde_json::json!({
        "gap1": gap1,
        "gapN": gapn,
        "overlap": a.overlap,
        "target": a.target,
        "d": d,
        "bound_at_d": at_d,
    }))
}

fn parse_point(s: &str) -> qre_core::Result<(f64, f64)> {
    let bad = || Error::InvalidArgument(format!("point {s:?} is not x:y"));
    let (x, y) = s.split_once(':').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

fn krylov_extrapolate(a: ExtrapolateArgs) -> qre_core::Result<()> {
    let points = a.points.iter().map(|p| parse_point(p)).collect::<qre_core::Result<Vec<_>>>()?;
    let fit = krylov::fit_line(&points)?;
    print_json(&serde_json::json!({
        "slope": fit.slope,
        "intercept": fit.intercept,
        "x": a.x,
        "y": fit.at(a.x),
    }))
}

fn qpe_cmd(a: QpeArgs) -> qre_core::Result<()> {
    let h = hamlib::load_pauli_file(&a.input)?;
    let base = circuit::synth_trotter_step(&h, 1.0, 1, a.strategy)?.count();
    let exact = if a.bound_only || h.len() > qpe::V2_MAX_TERMS || h.n() > linalg::dense_cap() {
        None
    } else {
        let (_, ground) = sim::ground_state(&h)?;
        Some(qpe::v2_exact(&h, &ground, a.form)?)
    };
    let e1 = exact.map_or_else(|| qpe::v2_bound(&h), f64::abs);
    let mut plan = qpe::qpe_plan(&h, a.epsilon, e1, &base)?;
    plan.e1_exact = exact;
    plan.n_groups = Some(grouping::sorted_insertion_group(&h, a.relation).len());
    io::write_atomic(&a.output, serde_json::to_string_pretty(&plan)?.as_bytes())?;
    print_json(&plan)
}

fn adapt_cmd(a: AdaptArgs) -> qre_core::Result<()> {
    let h = hamlib::load_pauli_file(&a.input)?;
    let (e0, ground) = sim::ground_state(&h)?;
    let particles = match a.particles {
        Some(p) => p,
        None => adapt::particle_number(&ground)?,
    };
    let reference = adapt::occupied_reference(h.n(), particles)?;
    let pool = adapt::build_qe_pool(h.n())?;
    let target = (a.epsilon > 0.0).then_some((a.epsilon, e0));
    let stop = StopCriteria {
        grad_tol: a.grad_tol,
        target,
        max_iters: a.max_iters,
    };
    let state = adapt::adapt_run(&h, &reference, &pool, stop, BfgsOptions::default())?;
    adapt::write_trace(&state.trace, &a.output)?;
    let counts = adapt::ansatz_gate_count(&state)?;
    print_json(&serde_json::json!({
        "particles": particles,
        "pool": pool.len(),
        "iterations": state.iterations,
        "energy": state.energy,
        "e0": e0,
        "gradient_norm": state.gradient_norm,
        "status": state.status.to_string(),
        "n_1q": counts.n_1q,
        "n_2q": counts.n_2q,
    }))
}

/// Krylov resources from a scan: the cheapest Trotter column reaching the
/// target sets `n_T` and `d`. Without one, the largest simulated setting is
/// reported as a lower estimate.
fn krylov_from_scan(rows: &[krylov::ScanRow], n: usize, n_groups: u64, base: &GateCount, eps: f64) -> qre_core::Result<ResourceReport> {
    let mut steps: Vec<usize> = rows.iter().filter_map(|r| r.n_trotter).collect();
    steps.sort_unstable();
    steps.dedup();
    let within = |col: Option<usize>| {
        rows.iter()
            .filter(|r| r.n_trotter == col && r.error.is_some_and(|e| e.abs() <= eps))
            .map(|r| r.d)
            .min()
    };
    let d_max = rows.iter().map(|r| r.d).max().unwrap_or(1) as u64;
    let (d, n_t, reached) = match steps.iter().find_map(|&s| within(Some(s)).map(|d| (d as u64, s as u64))) {
        Some((d, s)) => (d, s, true),
        None => (d_max, steps.last().copied().unwrap_or(1) as u64, false),
    };
    let mut r = krylov::krylov_resources(n, d, n_groups, base, n_t)?;
    if !reached {
        r.provenance_n_c = Provenance::EstimatedLower;
        r.provenance_n_2q = Provenance::EstimatedLower;
    }
    Ok(r)
}

fn report_table(a: TableArgs) -> qre_core::Result<()> {
    let plan: qpe::QpeBoundReport = serde_json::from_str(&io::read_to_string(&a.qpe)?)?;
    let n_groups = plan
        .n_groups
        .ok_or_else(|| Error::InvalidArgument("QPE report has no N_groups".into()))?;
    let sys = SystemInfo {
        system: a.system.clone(),
        n: plan.n,
        n_terms: plan.m,
        n_groups,
    };
    let mut rows = Vec::new();
    if let Some(p) = &a.adapt {
        let trace = adapt::read_trace(p)?;
        let n_2q = trace.last().map_or(0, |r| r.n_2q_cumulative);
        let r = ResourceReport {
            algorithm: "adapt".into(),
            n_q: plan.n as u64,
            n_c: n_groups as u64,
            n_1q: None,
            n_2q: n_2q as u128,
            provenance_n_c: Provenance::Exact,
            provenance_n_2q: Provenance::Exact,
        };
        rows.push(TableRow::new(&sys, &r));
    }
    if let Some(p) = &a.krylov {
        let scan = krylov::read_scan(p)?;
        let r = krylov_from_scan(&scan, plan.n, n_groups as u64, &plan.trotter_base, a.epsilon)?;
        rows.push(TableRow::new(&sys, &r));
    }
    rows.push(TableRow::new(&sys, &plan.resources()));
    report::write_table(&rows, &a.output)?;
    print!("{}", report::table_to_csv(&rows)?);
    Ok(())
}

fn resources(c: ResourcesCommand) -> qre_core::Result<()> {
    let r = match c {
        ResourcesCommand::Krylov { n, d, groups, n_t, n1q, n2q } => {
            let base = GateCount { n_1q: n1q, n_2q: n2q, depth: 0 };
            krylov::krylov_resources(n, d, groups, &base, n_t)?
        }
        ResourcesCommand::Qpe { n, n_t, epsilon, n1q, n2q } => {
            if !(n_t >= 1.0 && n_t.is_finite()) {
                return Err(Error::InvalidArgument(format!("n_T must be at least 1, got {n_t}")));
            }
            let base = GateCount { n_1q: n1q, n_2q: n2q, depth: 0 };
            qpe::qpe_resources(n, n_t.ceil() as u64, epsilon, &base)?
        }
    };
    print_json(&r)
}
