//! `shaped-spectra`: command-line front end.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 budget or feasibility
//! refusal, 4 numerical non-convergence.

mod svg;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::json;

use shaped_spectra::dyckpaths::{count_paths, path_to_tree, tree_to_path, LambdaDyckPath, PathError};
use shaped_spectra::enumeration::{
    count_brute, count_fat_hook, count_recurrence, count_summation, moments, EnumerationError,
    LabelledPlaneTree, DEFAULT_BRUTE_BUDGET,
};
use shaped_spectra::matrix_mc::{run_experiment, EntryLaw, MonteCarloError, SpectralSample};
use shaped_spectra::powerseries::{g_to_r, moments_to_g, r_to_s, SeriesError, TruncatedSeries};
use shaped_spectra::spectral_analytic::{
    cauchy_equation, fat_hook_density, fat_hook_support, spectrum, stieltjes_density_grid,
    AnalyticError, ContinuationOptions,
};
use shaped_spectra::{parse_heights, parse_partition, Partition, PartitionError};

/// A failure with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn budget(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<EnumerationError> for Failure {
    fn from(e: EnumerationError) -> Self {
        match e {
            EnumerationError::BudgetExceeded { .. } => Failure::budget(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<PathError> for Failure {
    fn from(e: PathError) -> Self {
        match e {
            PathError::BudgetExceeded { .. } => Failure::budget(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<AnalyticError> for Failure {
    fn from(e: AnalyticError) -> Self {
        if e.is_numerical() {
            Failure::numeric(e.to_string())
        } else if matches!(e, AnalyticError::DegreeGuard { .. }) {
            Failure::budget(e.to_string())
        } else {
            Failure::usage(e.to_string())
        }
    }
}

impl From<MonteCarloError> for Failure {
    fn from(e: MonteCarloError) -> Self {
        match e {
            MonteCarloError::DimensionCap { .. } => Failure::budget(e.to_string()),
            MonteCarloError::EigenNonConvergence { .. } | MonteCarloError::Accuracy { .. } => {
                Failure::numeric(e.to_string())
            }
            _ => Failure::usage(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure::usage(format!("{}: {e}", path.display()))
}

type CliResult<T = ()> = Result<T, Failure>;

/// Limiting spectra of random matrices shaped like self-conjugate Young
/// diagrams. Set LS_THREADS to cap the number of worker threads.
#[derive(Parser, Debug)]
#[command(name = "shaped-spectra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tree counts C_k and moments m_k = C_k/ℓ as CSV.
    Moments(MomentsArgs),
    /// Exact coefficients of the Cauchy, R- or S-transform series.
    Transform(TransformArgs),
    /// λ-Dyck path conversion and counting.
    #[command(subcommand)]
    Dyck(DyckCommand),
    /// Coefficients of the algebraic equation L(G, z) = 0.
    Algebraic(AlgebraicArgs),
    /// Density of the continuous part of the limiting law as CSV.
    Density(DensityArgs),
    /// Monte Carlo histogram of the eigenvalues of W_N.
    Simulate(SimulateArgs),
    /// Monte Carlo against theory: CSV, SVG overlay and summary JSON.
    Compare(CompareArgs),
}

/// Exactly one of --partition or --heights.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct Shape {
    /// Partition as comma-separated parts, e.g. 3,3,2.
    #[arg(long)]
    partition: Option<String>,
    /// Self-conjugate shape by block heights a1,…,ar, e.g. 2,1 for 3,3,2.
    #[arg(long)]
    heights: Option<String>,
}

impl Shape {
    /// The shape, which must be self-conjugate.
    fn resolve(&self) -> CliResult<Partition> {
        let p = match (&self.partition, &self.heights) {
            (Some(text), None) => parse_partition(text)?,
            (None, Some(text)) => parse_heights(text)?,
            _ => return Err(Failure::usage("give exactly one of --partition and --heights")),
        };
        if !p.is_self_conjugate() {
            return Err(PartitionError::NotSelfConjugate.into());
        }
        Ok(p)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Recurrence,
    Summation,
    Hypergeometric,
    Brute,
    All,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[command(flatten)]
    shape: Shape,
    /// Largest k.
    #[arg(long, default_value_t = 8)]
    kmax: usize,
    /// Counting method; `all` prints one column per method (empty where a
    /// method does not apply or exceeds the budget).
    #[arg(long, value_enum, default_value_t = Method::Recurrence)]
    method: Method,
    /// Cap on ℓ^{k+1}·Catalan(k) for brute force.
    #[arg(long, default_value_t = DEFAULT_BRUTE_BUDGET)]
    budget: u64,
    /// Output CSV path (default: stdout). Columns: k, C_k (or one column per
    /// method), m_k as num/den, m_k as decimal.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Transform {
    #[value(name = "G")]
    G,
    #[value(name = "R")]
    R,
    #[value(name = "S")]
    S,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    shape: Shape,
    /// G(w) = Σ m_k w^{k+1} in w = 1/z; R(z); or S(z).
    #[arg(long, value_enum)]
    what: Transform,
    /// Truncation order K: coefficients of powers 0..=K.
    #[arg(long, default_value_t = 16)]
    order: usize,
}

#[derive(Subcommand, Debug)]
enum DyckCommand {
    /// Tree JSON {"child_counts": […], "labels": […]} ↔ path JSON [[i,j,h], …].
    Convert(ConvertArgs),
    /// Number of λ-Dyck paths of length 2k by exhaustive search.
    Count(CountArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Direction {
    #[value(name = "tree2path")]
    TreeToPath,
    #[value(name = "path2tree")]
    PathToTree,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long, value_enum)]
    direction: Direction,
    /// Input JSON file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output JSON path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    shape: Shape,
    /// Half-length k.
    #[arg(long)]
    k: usize,
    /// Cap on |λ|·ℓ^k·Catalan(k) for the search.
    #[arg(long, default_value_t = DEFAULT_BRUTE_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct AlgebraicArgs {
    /// Block heights a1,…,ar.
    #[arg(long)]
    heights: String,
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// Block heights a1,…,ar.
    #[arg(long)]
    heights: String,
    /// Number of grid points; x is sampled at cell midpoints of [xmin, xmax].
    #[arg(long, default_value_t = 200)]
    grid: usize,
    /// Left end of the range (default 0).
    #[arg(long)]
    xmin: Option<f64>,
    /// Right end of the range (default: 1.05 times the support edge).
    #[arg(long)]
    xmax: Option<f64>,
    /// Imaginary offsets ε for continuation, relative to x, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-2, 1e-3, 1e-4])]
    eps_ladder: Vec<f64>,
    /// Output CSV path (default: stdout). Columns: x, f.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Law {
    Gaussian,
    Phase,
}

impl From<Law> for EntryLaw {
    fn from(l: Law) -> Self {
        match l {
            Law::Gaussian => EntryLaw::ComplexGaussian,
            Law::Phase => EntryLaw::UniformPhase,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SimArgs {
    #[command(flatten)]
    shape: Shape,
    /// Dilation factor N; matrices are Nℓ × Nℓ.
    #[arg(short = 'N', default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Master seed; trial t uses stream t of ChaCha20 seeded with it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of histogram bins.
    #[arg(long, default_value_t = 200)]
    bins: usize,
    /// Entry law: complex Gaussian or uniform unit phase.
    #[arg(long, value_enum, default_value_t = Law::Gaussian)]
    law: Law,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Histogram CSV path (default: stdout). Columns: bin_left, bin_right,
    /// mass, with masses summing to 1 over all eigenvalues.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write moments CSV: k, mean, stderr of m_{k,N} across trials.
    #[arg(long)]
    emit_moments: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Directory for compare.csv, compare.svg and summary.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Largest moment compared.
    #[arg(long, default_value_t = 4)]
    kmax: usize,
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(e.to_string())),
    }
}

fn moments_cmd(args: &MomentsArgs) -> CliResult {
    let p = args.shape.resolve()?;
    let table = count_recurrence(&p, args.kmax)?;
    let heights = p.heights().to_vec();
    let fat = heights.len() == 2;
    let mut csv = String::new();
    let method_header = match args.method {
        Method::All => "recurrence,summation,hypergeometric,brute",
        _ => "C_k",
    };
    writeln!(csv, "k,{method_header},m_k,m_k_decimal").unwrap();
    for k in 0..=args.kmax {
        let counts = match args.method {
            Method::Recurrence => table.counts[k].to_string(),
            Method::Summation => count_summation(&heights, k)?.to_string(),
            Method::Hypergeometric => {
                if !fat {
                    return Err(Failure::usage("the hypergeometric method needs a two-block shape"));
                }
                count_fat_hook(heights[0], heights[1], k)?.to_string()
            }
            Method::Brute => count_brute(&p, k, args.budget)?.to_string(),
            Method::All => {
                let hyp = if fat {
                    count_fat_hook(heights[0], heights[1], k)?.to_string()
                } else {
                    String::new()
                };
                let brute = match count_brute(&p, k, args.budget) {
                    Ok(c) => c.to_string(),
                    Err(EnumerationError::BudgetExceeded { .. }) => String::new(),
                    Err(e) => return Err(e.into()),
                };
                format!(
                    "{},{},{hyp},{brute}",
                    table.counts[k],
                    count_summation(&heights, k)?
                )
            }
        };
        let m = &table.moments[k];
        writeln!(csv, "{k},{counts},{m},{}", m.to_f64().unwrap_or(f64::NAN)).unwrap();
    }
    emit(args.out.as_deref(), &csv)
}

fn transform_cmd(args: &TransformArgs) -> CliResult {
    let p = args.shape.resolve()?;
    // R and S lose two orders to the reversion
    let need = if args.what == Transform::G { args.order } else { args.order + 2 };
    let m = moments(&p, need)?;
    let g = moments_to_g(&m, need)?;
    let series: TruncatedSeries = match args.what {
        Transform::G => g,
        Transform::R => g_to_r(&g)?,
        Transform::S => r_to_s(&g_to_r(&g)?)?,
    };
    let mut out = String::from("n,coefficient\n");
    for (n, c) in series.coeffs().iter().enumerate() {
        writeln!(out, "{n},{c}").unwrap();
    }
    emit(None, &out)
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn dyck_cmd(cmd: &DyckCommand) -> CliResult {
    match cmd {
        DyckCommand::Convert(args) => {
            let p = args.shape.resolve()?;
            let text = read_input(&args.input)?;
            let bad_json = |e: serde_json::Error| Failure::usage(format!("{}: {e}", args.input.display()));
            let out = match args.direction {
                Direction::TreeToPath => {
                    let tree: LabelledPlaneTree = serde_json::from_str(&text).map_err(bad_json)?;
                    let tree = LabelledPlaneTree::new(tree.child_counts().to_vec(), tree.labels().to_vec())
                        .map_err(|e| Failure::usage(e.to_string()))?;
                    serde_json::to_string(&tree_to_path(&p, &tree)?).unwrap()
                }
                Direction::PathToTree => {
                    let path: LambdaDyckPath = serde_json::from_str(&text).map_err(bad_json)?;
                    serde_json::to_string(&path_to_tree(&p, &path)?).unwrap()
                }
            };
            emit(args.out.as_deref(), &(out + "\n"))
        }
        DyckCommand::Count(args) => {
            let p = args.shape.resolve()?;
            let n = count_paths(&p, args.k, args.budget)?;
            emit(None, &format!("{n}\n"))
        }
    }
}

fn heights_of(text: &str) -> CliResult<Vec<usize>> {
    Ok(parse_heights(text)?.heights().to_vec())
}

fn algebraic_cmd(args: &AlgebraicArgs) -> CliResult {
    let heights = heights_of(&args.heights)?;
    let l = cauchy_equation(&heights)?;
    let mut terms = l.terms();
    terms.sort_by(|a, b| b.0.cmp(&a.0));
    let mut out = String::new();
    let mut map = serde_json::Map::new();
    for ((i, j), c) in &terms {
        writeln!(out, "({i},{j}): {c}").unwrap();
        map.insert(format!("({i},{j})"), json!(c.to_string()));
    }
    let doc = json!({
        "schema": 1,
        "heights": heights,
        "variables": ["G", "z"],
        "polynomial": l.to_string(),
        "coefficients": map,
    });
    writeln!(out, "{doc}").unwrap();
    emit(None, &out)
}

fn continuation_options(ladder: &[f64]) -> CliResult<ContinuationOptions> {
    if ladder.is_empty() || ladder.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Failure::usage("--eps-ladder needs positive finite values"));
    }
    let mut eps = ladder.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    Ok(ContinuationOptions {
        eps_ladder: eps,
        ..ContinuationOptions::default()
    })
}

/// Right edge of the support of the continuous part.
fn support_edge(heights: &[usize], opts: &ContinuationOptions) -> CliResult<f64> {
    if let [a1, a2] = *heights {
        return Ok(fat_hook_support(a1, a2)?.z_plus);
    }
    let sp = spectrum(heights, opts)?;
    Ok(sp.intervals.last().map_or(1.0, |iv| iv.1))
}

/// Density at each of `xs`, closed form for two blocks, continuation otherwise.
fn densities(heights: &[usize], xs: &[f64], opts: &ContinuationOptions) -> CliResult<Vec<f64>> {
    if let [a1, a2] = *heights {
        return xs
            .iter()
            .map(|&x| Ok(fat_hook_density(a1, a2, x)?.value))
            .collect();
    }
    let inside: Vec<f64> = xs.iter().map(|&x| x.max(f64::MIN_POSITIVE)).collect();
    Ok(stieltjes_density_grid(heights, &inside, opts)?
        .into_iter()
        .map(|b| b.density)
        .collect())
}

fn density_cmd(args: &DensityArgs) -> CliResult {
    let heights = heights_of(&args.heights)?;
    let opts = continuation_options(&args.eps_ladder)?;
    if args.grid == 0 {
        return Err(Failure::usage("--grid must be positive"));
    }
    let xmin = args.xmin.unwrap_or(0.0);
    let xmax = match args.xmax {
        Some(x) => x,
        None => 1.05 * support_edge(&heights, &opts)?,
    };
    if !(xmax > xmin) || xmin < 0.0 {
        return Err(Failure::usage("need 0 ≤ xmin < xmax"));
    }
    let h = (xmax - xmin) / args.grid as f64;
    let xs: Vec<f64> = (0..args.grid).map(|i| xmin + h * (i as f64 + 0.5)).collect();
    let fs = densities(&heights, &xs, &opts)?;
    let mut csv = String::from("x,f\n");
    for (x, f) in xs.iter().zip(&fs) {
        writeln!(csv, "{x:.12e},{f:.12e}").unwrap();
    }
    emit(args.out.as_deref(), &csv)
}

fn simulate(sim: &SimArgs) -> CliResult<(Partition, SpectralSample)> {
    let p = sim.shape.resolve()?;
    let sample = run_experiment(&p, sim.n, sim.trials, sim.seed, sim.bins, sim.law.into())?;
    Ok((p, sample))
}

fn simulate_cmd(args: &SimulateArgs) -> CliResult {
    let (_, sample) = simulate(&args.sim)?;
    let h = &sample.histogram;
    let mut csv = String::from("bin_left,bin_right,mass\n");
    for (b, m) in h.masses.iter().enumerate() {
        writeln!(csv, "{:.12e},{:.12e},{m:.12e}", h.edges[b], h.edges[b + 1]).unwrap();
    }
    emit(args.out.as_deref(), &csv)?;
    if let Some(path) = &args.emit_moments {
        let mut csv = String::from("k,mean,stderr\n");
        for m in &sample.moments {
            writeln!(csv, "{},{:.12e},{:.12e}", m.k, m.mean, m.stderr).unwrap();
        }
        fs::write(path, csv).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

/// Sub-points per bin for the midpoint rule on the analytic density.
const BIN_SUBPOINTS: usize = 8;

fn compare_cmd(args: &CompareArgs) -> CliResult {
    let (p, sample) = simulate(&args.sim)?;
    let heights = p.heights().to_vec();
    let ell = p.len() as f64;
    let opts = ContinuationOptions::default();
    let edges = &sample.histogram.edges;
    let bins = edges.len() - 1;
    let width = edges[1] - edges[0];
    let total = sample.eigenvalues.len() as f64;

    // empirical density of the continuous part, per unit length
    let mut counts = vec![0usize; bins];
    for &v in sample.continuous_part() {
        let idx = (((v - edges[0]) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / total / width).collect();
    let sub: Vec<f64> = (0..bins * BIN_SUBPOINTS)
        .map(|i| edges[0] + width * (i as f64 + 0.5) / BIN_SUBPOINTS as f64)
        .collect();
    let fine = densities(&heights, &sub, &opts)?;
    let analytic: Vec<f64> = fine
        .chunks(BIN_SUBPOINTS)
        .map(|c| c.iter().sum::<f64>() / BIN_SUBPOINTS as f64)
        .collect();
    let l1: f64 = empirical.iter().zip(&analytic).map(|(e, a)| (e - a).abs() * width).sum();

    let exact = moments(&p, args.kmax.min(sample.moments.len() - 1))?;
    let mut moment_rows = Vec::new();
    let mut max_gap = 0.0f64;
    for (k, m) in exact.iter().enumerate().skip(1) {
        let analytic = m.to_f64().unwrap_or(f64::NAN);
        let est = sample.moments[k];
        let gap = (est.mean - analytic).abs();
        max_gap = max_gap.max(gap);
        moment_rows.push(json!({
            "k": k,
            "empirical": est.mean,
            "stderr": est.stderr,
            "analytic": analytic,
            "gap": gap,
            "z_score": if est.stderr > 0.0 { gap / est.stderr } else { 0.0 },
        }));
    }
    let atom = p.generic_kernel_dim() as f64 / ell;
    let frac = sample.near_zero_fraction();

    fs::create_dir_all(&args.out_dir).map_err(|e| io_error(&args.out_dir, e))?;
    let mut csv = String::from("bin_left,bin_right,empirical_density,analytic_density\n");
    for b in 0..bins {
        writeln!(
            csv,
            "{:.12e},{:.12e},{:.12e},{:.12e}",
            edges[b],
            edges[b + 1],
            empirical[b],
            analytic[b]
        )
        .unwrap();
    }
    let write = |name: &str, text: &str| {
        let path = args.out_dir.join(name);
        fs::write(&path, text).map_err(|e| io_error(&path, e))
    };
    write("compare.csv", &csv)?;
    let title = format!(
        "λ = {:?}, N = {}, {} trials, seed {}; atom {:.4} (theory {:.4})",
        p.parts(),
        args.sim.n,
        args.sim.trials,
        args.sim.seed,
        frac,
        atom
    );
    write("compare.svg", &svg::overlay(edges, &empirical, &sub, &fine, &title))?;
    let summary = json!({
        "schema": 1,
        "partition": p.parts(),
        "heights": heights,
        "n": args.sim.n,
        "trials": args.sim.trials,
        "seed": args.sim.seed,
        "law": EntryLaw::from(args.sim.law).to_string(),
        "moments": moment_rows,
        "max_moment_gap": max_gap,
        "atom": {
            "empirical": frac,
            "analytic": atom,
            "abs_diff": (frac - atom).abs(),
        },
        "histogram_l1": l1,
    });
    write("summary.json", &(serde_json::to_string_pretty(&summary).unwrap() + "\n"))?;
    emit(None, &format!("{summary}\n"))
}

fn configure_threads() -> CliResult {
    let Ok(value) = std::env::var("LS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("LS_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn run(cli: &Cli) -> CliResult {
    configure_threads()?;
    match &cli.command {
        Command::Moments(a) => moments_cmd(a),
        Command::Transform(a) => transform_cmd(a),
        Command::Dyck(c) => dyck_cmd(c),
        Command::Algebraic(a) => algebraic_cmd(a),
        Command::Density(a) => density_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Compare(a) => compare_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
