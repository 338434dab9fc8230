mod output;

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use esspath_core::cache::{self, CacheStatus};
use esspath_core::checks::{self, Suite, VerifyOptions};
use esspath_core::endo::EndAlgebra;
use esspath_core::essential::{length_bound, recursive_cell_dims, EssentialSpace, SpaceOptions};
use esspath_core::graph::{self, builtin, fused_matrices, perron_frobenius, Graph, PerronData};
use esspath_core::report::CheckReport;
use esspath_core::serial::{parse_path_vector, path_to_json, path_vector_to_json};
use esspath_core::{a2, Error, Parallelism};

use output::{csv_line, fmt12, to_json_string};

/// Paths whose largest cell has more elementary paths than this use the
/// recursive route for `dims --method auto`.
const KERNEL_ROUTE_MAX_PATHS: u64 = 600;

#[derive(Parser)]
#[command(name = "esspath", version, about = "Essential paths on ADE graphs and their graded endomorphism algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Args, Clone)]
struct Common {
    /// Built-in diagram (A1..A12, D4..D8, E6..E8) or path to a graph JSON file
    #[arg(long)]
    graph: String,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Relative singular value threshold for kernels
    #[arg(long = "rank-tol", default_value_t = 1e-7)]
    rank_tol: f64,
    /// Longest essential paths to compute; required when the spectral radius is at least 2
    #[arg(long = "max-length")]
    max_length: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Worker threads; 1 runs sequentially
    #[arg(long)]
    jobs: Option<usize>,
    /// Accept graphs with cycles
    #[arg(long = "allow-cycles")]
    allow_cycles: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DimsMethod {
    Auto,
    Kernel,
    Recursive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProductOp {
    Bullet,
    Concat,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of the graded components
    Dims {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = DimsMethod::Auto)]
        method: DimsMethod,
    },
    /// Orthonormal basis of one cell
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        length: usize,
    },
    /// Graded product (or plain concatenation) of two path vectors
    Product {
        #[command(flatten)]
        common: Common,
        /// Labels such as 2,1,0 or a JSON path vector
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, value_enum, default_value_t = ProductOp::Bullet)]
        op: ProductOp,
    },
    /// Decompose an essential path into products of shorter ones
    Decompose {
        #[command(flatten)]
        common: Common,
        /// Labels or a JSON path vector; alternatively pick a basis vector
        #[arg(long, conflicts_with_all = ["from", "to", "length", "index"])]
        path: Option<String>,
        #[arg(long, requires_all = ["to", "length"])]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        split: usize,
    },
    /// Run verification suites and report every check
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grade of the antipode obstruction check
        #[arg(long = "antipode-grade", default_value_t = 1)]
        antipode_grade: usize,
    },
    /// Tables and checks for the two-vertex diagram
    A2Compare {
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// Fused matrices F_p
    Fused {
        #[command(flatten)]
        common: Common,
    },
    /// Perron-Frobenius data
    Pf {
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Verification,
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numeric(m) => Failure::Numeric(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

/// Die quietly when stdout is closed early (e.g. piped into `head`).
fn reset_sigpipe() {
    #[cfg(unix)]
    // SAFETY: restoring the default disposition of a signal is always sound.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::A2Compare { format, tolerance } => a2_compare(format, tolerance),
        Command::Dims { common, method } => with_jobs(&common, |par| dims(&common, method, par)),
        Command::Basis { common, from, to, length } => {
            with_jobs(&common, |par| basis(&common, &from, &to, length, par))
        }
        Command::Product { common, left, right, op } => {
            with_jobs(&common, |par| product(&common, &left, &right, op, par))
        }
        Command::Decompose { common, path, from, to, length, index, split } => with_jobs(&common, |par| {
            decompose(&common, path.as_deref(), from.as_deref(), to.as_deref(), length, index, split, par)
        }),
        Command::Verify { common, suite, samples, seed, antipode_grade } => with_jobs(&common, |par| {
            verify(&common, &suite, samples, seed, antipode_grade, par)
        }),
        Command::Fused { common } => fused(&common),
        Command::Pf { common } => pf(&common),
    }
}

fn with_jobs(common: &Common, f: impl FnOnce(Parallelism) -> CmdResult + Send) -> CmdResult {
    validate(common)?;
    match common.jobs {
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(1) => f(Parallelism::Sequential),
        #[cfg(not(feature = "parallel"))]
        Some(_) => f(Parallelism::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            pool.install(|| f(Parallelism::Rayon))
        }
        None => f(Parallelism::default()),
    }
}

fn validate(common: &Common) -> CmdResult {
    if !(common.tolerance > 0.0) || !(common.rank_tol > 0.0) {
        return Err(Failure::Usage("tolerances must be positive".into()));
    }
    if common.max_length == Some(0) {
        return Err(Failure::Usage("--max-length must be positive".into()));
    }
    Ok(())
}

fn load_graph(common: &Common) -> Result<Graph, Failure> {
    if let Ok(g) = builtin(&common.graph) {
        return Ok(g);
    }
    let path = Path::new(&common.graph);
    if !path.exists() {
        return Err(Failure::Usage(format!(
            "'{}' is neither a built-in graph (A1..A12, D4..D8, E6..E8) nor a file",
            common.graph
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(graph::parse_graph(&text, common.allow_cycles)?)
}

fn load_perron(common: &Common) -> Result<(Graph, PerronData), Failure> {
    let g = load_graph(common)?;
    let pf = perron_frobenius(&g, common.tolerance)?;
    Ok((g, pf))
}

fn space_options(common: &Common, par: Parallelism) -> SpaceOptions {
    SpaceOptions {
        tol: common.tolerance,
        rank_tol: common.rank_tol,
        max_length: common.max_length,
        parallelism: par,
    }
}

fn load_space(common: &Common, par: Parallelism) -> Result<EssentialSpace, Failure> {
    let (g, pf) = load_perron(common)?;
    let dir = cache::dir_from_env();
    let (space, status) = cache::load_or_build(g, pf, space_options(common, par), dir.as_deref())?;
    match status {
        CacheStatus::Hit => eprintln!("cell bases read from cache"),
        CacheStatus::Stored => eprintln!("cell bases written to cache"),
        CacheStatus::Disabled => {}
    }
    if space.is_truncated() {
        eprintln!("note: lengths above {} were not computed", space.max_length());
    }
    Ok(space)
}

fn emit_json(v: Value) {
    println!("{}", to_json_string(v));
}

fn vertex(g: &Graph, label: &str) -> Result<usize, Failure> {
    g.index_of(label).map_err(Failure::from)
}

// ---------------------------------------------------------------- dims

fn largest_cell(g: &Graph, max_length: usize) -> u64 {
    // entries of A^l count paths; saturating to stay finite on large graphs
    let n = g.len();
    let mut cur: Vec<Vec<u64>> = (0..n).map(|a| (0..n).map(|b| u64::from(a == b)).collect()).collect();
    let mut best = 1;
    for _ in 0..max_length {
        let mut next = vec![vec![0u64; n]; n];
        for a in 0..n {
            for b in 0..n {
                next[a][b] = g.neighbors(b).iter().fold(0u64, |s, &v| s.saturating_add(cur[a][v]));
                best = best.max(next[a][b]);
            }
        }
        cur = next;
    }
    best
}

fn dims(common: &Common, method: DimsMethod, par: Parallelism) -> CmdResult {
    let (g, pf) = load_perron(common)?;
    let (max_length, truncated) = length_bound(&pf, common.max_length)?;
    let use_kernel = match method {
        DimsMethod::Kernel => true,
        DimsMethod::Recursive => false,
        DimsMethod::Auto => largest_cell(&g, max_length) <= KERNEL_ROUTE_MAX_PATHS,
    };
    let (dims, name) = if use_kernel {
        let space = load_space(common, par)?;
        (space.dims(), "kernel")
    } else {
        let mut d: Vec<usize> = recursive_cell_dims(&g, &pf, max_length, common.rank_tol, par)
            .iter()
            .map(|m| m.sum())
            .collect();
        while d.len() > 1 && *d.last().unwrap() == 0 {
            d.pop();
        }
        (d, "recursive")
    };
    let total: usize = dims.iter().sum();
    let end_dim: usize = dims.iter().map(|d| d * d).sum();
    match common.format {
        Format::Json => emit_json(json!({
            "graph": g.name(),
            "method": name,
            "dims": dims,
            "total": total,
            "end_dim": end_dim,
            "truncated": truncated,
        })),
        Format::Csv => {
            println!("length,dim");
            for (l, d) in dims.iter().enumerate() {
                println!("{l},{d}");
            }
            println!("total,{total}");
        }
        Format::Pretty => {
            let list: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
            println!("graph:  {}", g.name());
            println!("dims:   ({})", list.join(","));
            println!("total:  {total}");
            println!("End_#:  {end_dim}");
            println!("method: {name}");
            if truncated {
                println!("(truncated at length {max_length})");
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- basis

fn basis(common: &Common, from: &str, to: &str, length: usize, par: Parallelism) -> CmdResult {
    let g = load_graph(common)?;
    let (a, b) = (vertex(&g, from)?, vertex(&g, to)?);
    let space = load_space(common, par)?;
    if length > space.max_length() {
        return Err(Failure::Usage(format!(
            "length {length} exceeds the computed range {}",
            space.max_length()
        )));
    }
    let cell = space.cell(a, b, length).expect("length checked");
    let gram = cell.gram_residual();
    let constraint = cell.constraint_residual(space.perron());
    let paths: Vec<Vec<String>> = cell.paths.iter().map(|p| path_to_json(&g, p)).collect();
    let coords: Vec<Vec<f64>> = (0..cell.dim()).map(|i| cell.coords.row(i).iter().copied().collect()).collect();
    match common.format {
        Format::Json => emit_json(json!({
            "graph": g.name(),
            "from": from,
            "to": to,
            "length": length,
            "dim": cell.dim(),
            "paths": paths,
            "coords": coords,
            "gram_residual": gram,
            "constraint_residual": constraint,
        })),
        Format::Csv => {
            println!("vector,path,coeff");
            for (i, row) in coords.iter().enumerate() {
                for (p, c) in paths.iter().zip(row) {
                    println!("{}", csv_line(&[i.to_string(), p.join("-"), fmt12(*c)]));
                }
            }
        }
        Format::Pretty => {
            println!("E({from} -{length}-> {to}) of {}: dimension {}", g.name(), cell.dim());
            for (i, row) in coords.iter().enumerate() {
                let terms: Vec<String> = paths
                    .iter()
                    .zip(row)
                    .filter(|(_, c)| c.abs() > 1e-14)
                    .map(|(p, c)| format!("{} [{}]", fmt12(*c), p.join(",")))
                    .collect();
                println!("  e_{i} = {}", terms.join(" + "));
            }
            println!("gram residual {}, constraint residual {}", fmt12(gram), fmt12(constraint));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- product

fn product(common: &Common, left: &str, right: &str, op: ProductOp, par: Parallelism) -> CmdResult {
    let g = load_graph(common)?;
    let p = parse_path_vector(&g, left)?;
    let q = parse_path_vector(&g, right)?;
    let (result, warnings) = match op {
        ProductOp::Concat => (&p * &q, Vec::new()),
        ProductOp::Bullet => {
            let space = load_space(common, par)?;
            space.bullet_with_warnings(&p, &q)
        }
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let opname = match op {
        ProductOp::Bullet => "bullet",
        ProductOp::Concat => "concat",
    };
    match common.format {
        Format::Json => emit_json(json!({
            "graph": g.name(),
            "op": opname,
            "left": path_vector_to_json(&g, &p),
            "right": path_vector_to_json(&g, &q),
            "result": path_vector_to_json(&g, &result),
            "norm": result.norm(),
            "warnings": warnings,
        })),
        Format::Csv => {
            println!("path,coeff");
            for (path, c) in result.terms() {
                println!("{}", csv_line(&[path.labels(&g).join("-"), fmt12(c)]));
            }
        }
        Format::Pretty => {
            if result.is_zero() {
                println!("0");
            }
            for (path, c) in result.terms() {
                println!("{:>20}  [{}]", fmt12(c), path.labels(&g).join(","));
            }
            println!("norm {}", fmt12(result.norm()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- decompose

#[allow(clippy::too_many_arguments)]
fn decompose(
    common: &Common,
    path: Option<&str>,
    from: Option<&str>,
    to: Option<&str>,
    length: Option<usize>,
    index: usize,
    split: usize,
    par: Parallelism,
) -> CmdResult {
    let g = load_graph(common)?;
    let e = match (path, from, to, length) {
        (Some(text), ..) => parse_path_vector(&g, text)?,
        (None, Some(f), Some(t), Some(l)) => {
            let (a, b) = (vertex(&g, f)?, vertex(&g, t)?);
            let space = load_space(common, par)?;
            let cell = space
                .cell(a, b, l)
                .filter(|c| index < c.dim())
                .ok_or_else(|| Failure::Usage(format!("E({f} -{l}-> {t}) has no basis vector {index}")))?;
            cell.vector(index)
        }
        _ => return Err(Failure::Usage("give --path or --from, --to and --length".into())),
    };
    let space = load_space(common, par)?;
    let d = space.decompose(&e, split)?;
    let recon = (&space.reconstruct(&d) - &e).norm();
    let entries: Vec<Value> = d
        .entries
        .iter()
        .map(|x| {
            let left = space.cell(d.a, x.v, d.split).unwrap().vector(x.i);
            let right = space.cell(x.v, d.b, d.length - d.split).unwrap().vector(x.j);
            json!({
                "via": g.label(x.v),
                "i": x.i,
                "j": x.j,
                "gamma": x.gamma,
                "left": path_vector_to_json(&g, &left),
                "right": path_vector_to_json(&g, &right),
            })
        })
        .collect();
    match common.format {
        Format::Json => emit_json(json!({
            "graph": g.name(),
            "path": path_vector_to_json(&g, &e),
            "split": split,
            "entries": entries,
            "norm_squared": d.norm_squared(),
            "path_norm_squared": e.norm().powi(2),
            "reconstruction_residual": recon,
        })),
        Format::Csv => {
            println!("via,i,j,gamma");
            for x in &d.entries {
                println!("{}", csv_line(&[g.label(x.v).to_string(), x.i.to_string(), x.j.to_string(), fmt12(x.gamma)]));
            }
        }
        Format::Pretty => {
            for x in &d.entries {
                println!("via {:>4}  e'_{} e''_{}  gamma = {}", g.label(x.v), x.i, x.j, fmt12(x.gamma));
            }
            println!("sum of squares {}  (|e|^2 = {})", fmt12(d.norm_squared()), fmt12(e.norm().powi(2)));
            println!("reconstruction residual {}", fmt12(recon));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- verify

fn print_reports(format: Format, reports: &[CheckReport]) {
    match format {
        Format::Json => emit_json(serde_json::to_value(reports).expect("reports serialize")),
        Format::Csv => {
            println!("name,residual,tolerance,pass");
            for r in reports {
                println!(
                    "{}",
                    csv_line(&[r.name.clone(), fmt12(r.residual), fmt12(r.tolerance), r.pass.to_string()])
                );
            }
        }
        Format::Pretty => {
            for r in reports {
                println!(
                    "{}  {}  (residual {}, tolerance {})",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    fmt12(r.residual),
                    fmt12(r.tolerance)
                );
            }
        }
    }
}

fn verify(common: &Common, suite: &str, samples: usize, seed: u64, antipode_grade: usize, par: Parallelism) -> CmdResult {
    let suite: Suite = suite.parse()?;
    let space = load_space(common, par)?;
    let opts = VerifyOptions {
        tol: common.tolerance,
        samples,
        seed,
        parallelism: par,
        ..VerifyOptions::default()
    };
    let mut reports = if antipode_grade == 1 {
        checks::run_suite(&space, suite, &opts)
    } else {
        let rest = if suite == Suite::Antipode {
            Vec::new()
        } else {
            let mut r = Vec::new();
            for s in [Suite::Graph, Suite::Paths, Suite::Essential, Suite::Bialgebra, Suite::Star] {
                if suite.includes(s) {
                    r.extend(checks::run_suite(&space, s, &opts));
                }
            }
            r
        };
        let mut r = rest;
        if suite.includes(Suite::Antipode) {
            let alg = EndAlgebra::with_parallelism(space.clone(), par);
            r.push(checks::antipode_infeasibility(&alg, antipode_grade, &opts)?);
        }
        r
    };
    if space.graph().len() == 2 && space.dims() == vec![2, 2] && suite == Suite::All {
        reports.extend(a2::all_checks(1e-12)?);
    }
    print_reports(common.format, &reports);
    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!("{} checks, {} failed", reports.len(), failed);
    if failed > 0 {
        Err(Failure::Verification)
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------- a2

fn a2_compare(format: Format, tol: f64) -> CmdResult {
    let reports = a2::all_checks(tol)?;
    let tables = a2::tables();
    match format {
        Format::Json => emit_json(json!({
            "tables": tables,
            "checks": reports,
        })),
        Format::Csv => print_reports(Format::Csv, &reports),
        Format::Pretty => {
            let print_table = |title: &str, names: &[&str], t: &[Vec<String>]| {
                println!("{title}");
                println!("{:>6}{}", "", names.iter().map(|n| format!("{n:>6}")).collect::<String>());
                for (n, row) in names.iter().zip(t) {
                    println!("{n:>6}{}", row.iter().map(|c| format!("{c:>6}")).collect::<String>());
                }
                println!();
            };
            print_table("graded product •", &tables.paths, &tables.graded_product);
            print_table("filtered product ★", &tables.paths, &tables.filtered_product);
            print_table("composition ∘", &tables.endomorphisms, &tables.composition);
            print_table("graded product • on End", &tables.endomorphisms, &tables.graded_endo_product);
            print_table("filtered product ★ on End", &tables.endomorphisms, &tables.filtered_endo_product);
            println!("coproduct on paths");
            for (k, v) in &tables.path_coproduct {
                println!("  D{k} = {v}");
            }
            println!("\ngraded coproduct");
            for (k, v) in &tables.graded_coproduct {
                println!("  Δρ{k} = {v}");
            }
            println!("\nfiltered coproduct");
            for (k, v) in &tables.filtered_coproduct {
                println!("  Δρ{k} = {v}");
            }
            println!();
            print_reports(Format::Pretty, &reports);
        }
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

// ---------------------------------------------------------------- fused, pf

fn fused(common: &Common) -> CmdResult {
    validate(common)?;
    let (g, pf) = load_perron(common)?;
    let f = fused_matrices(&g, &pf)?;
    let mats: Vec<Vec<Vec<i64>>> = f
        .mats
        .iter()
        .map(|m| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
        .collect();
    match common.format {
        Format::Json => emit_json(json!({
            "graph": g.name(),
            "labels": g.labels(),
            "kappa": pf.kappa,
            "sums": f.sums(),
            "matrices": mats,
        })),
        Format::Csv => {
            let mut header = vec!["p".to_string(), "row".to_string()];
            header.extend(g.labels().iter().cloned());
            println!("{}", csv_line(&header));
            for (p, m) in mats.iter().enumerate() {
                for (i, row) in m.iter().enumerate() {
                    let mut fields = vec![p.to_string(), g.label(i).to_string()];
                    fields.extend(row.iter().map(|x| x.to_string()));
                    println!("{}", csv_line(&fields));
                }
            }
        }
        Format::Pretty => {
            println!("vertices: {}", g.labels().join(" "));
            for (p, m) in mats.iter().enumerate() {
                println!("F_{p}  (sum {})", f.sums()[p]);
                for row in m {
                    println!("  {}", row.iter().map(|x| format!("{x:>3}")).collect::<String>());
                }
            }
            let sums: Vec<String> = f.sums().iter().map(|s| s.to_string()).collect();
            println!("sums: ({})", sums.join(","));
        }
    }
    Ok(())
}

fn pf(common: &Common) -> CmdResult {
    validate(common)?;
    let (g, pf) = load_perron(common)?;
    match common.format {
        Format::Json => emit_json(json!({
            "graph": g.name(),
            "labels": g.labels(),
            "distinguished": g.label(g.distinguished()),
            "beta": pf.beta,
            "mu": pf.mu,
            "kappa": pf.kappa,
            "residual": pf.residual(&g),
        })),
        Format::Csv => {
            println!("vertex,mu");
            for (l, m) in g.labels().iter().zip(&pf.mu) {
                println!("{}", csv_line(&[l.clone(), fmt12(*m)]));
            }
        }
        Format::Pretty => {
            println!("graph: {}", g.name());
            println!("beta:  {}", fmt12(pf.beta));
            match pf.kappa {
                Some(k) => println!("kappa: {k}"),
                None => println!("kappa: none (spectral radius >= 2)"),
            }
            println!("mu ({} = 1):", g.label(g.distinguished()));
            for (l, m) in g.labels().iter().zip(&pf.mu) {
                println!("  {l:>4}  {}", fmt12(*m));
            }
        }
    }
    Ok(())
}
