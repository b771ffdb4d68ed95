use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};
use sudoku_bounds::bounds::{bound_terms, ln_biguint, oriented_bound, TermKind};
use sudoku_bounds::counting::{ConstraintSystem, DEFAULT_BUDGET};
use sudoku_bounds::coupling::greedy_decomposition;
use sudoku_bounds::report::render_table;
use sudoku_bounds::{
    admissibility_matrix, asymptotic_exponents, best_decomposition, bregman_minc_bound,
    coding_rate, composite_bound, count_row_completions, decompose, herzberg_bound, make_layout,
    partly_filled_bound, permanent_naive, permanent_ryser, run_paper_report, total_cells,
    BinaryMatrix, CountError, Counter, CoupledLayout, Grid, LayoutKind, LogBound, PartlyFilledSpec,
    Selection,
};

#[derive(Parser, Debug)]
#[command(
    name = "sudoku-bounds",
    about = "Exact Sudoku solution counts and permanent-based upper bounds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Upper bounds for isolated or coupled Sudokus.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Exact solution count by backtracking.
    Count(CountArgs),
    /// Coding rate log_{n²}(count) / cells.
    Rate(RateArgs),
    /// Leading exponents of the partly filled bound for large n.
    Asymptotic(AsymptoticArgs),
    /// Permanent of a (0,1)-matrix.
    Permanent(PermanentArgs),
    /// Recompute the published values and compare.
    Paper(PaperArgs),
}

#[derive(Subcommand, Debug)]
enum BoundCommand {
    /// S_U(n) or S_U(n; c1, c2) for a single grid.
    Isolated {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        c1: usize,
        #[arg(long, default_value_t = 0)]
        c2: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Composite bound for a coupled layout.
    Layout {
        /// shogun, sumo, stair:<l>, belt:<l> or file:<path>
        layout: String,
        /// Use the exact count for components with nothing pre-filled.
        #[arg(long)]
        exact_free: bool,
        /// Processing order as comma-separated component indices.
        #[arg(long, value_delimiter = ',', conflicts_with = "greedy")]
        order: Option<Vec<usize>>,
        /// Greedy order instead of the exhaustive search.
        #[arg(long)]
        greedy: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["grid", "layout", "rows"]))]
struct CountArgs {
    /// Grid file with `.` for empty cells.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// shogun, sumo, stair:<l>, belt:<l> or file:<path>
    #[arg(long)]
    layout: Option<String>,
    /// Grid file whose row `--row` is to be completed.
    #[arg(long, requires = "row")]
    rows: Option<PathBuf>,
    /// 0-based target row for `--rows`.
    #[arg(long)]
    row: Option<usize>,
    /// Search node limit.
    #[arg(long, env = "SUDOKU_BOUNDS_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Split the search across threads.
    #[arg(long)]
    parallel: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct RateArgs {
    /// shogun, sumo, stair:<l>, belt:<l> or file:<path>
    #[arg(long, conflicts_with_all = ["n", "count", "cells"])]
    layout: Option<String>,
    #[arg(long)]
    exact_free: bool,
    #[arg(long, requires_all = ["count", "cells"])]
    n: Option<usize>,
    /// Decimal solution count.
    #[arg(long)]
    count: Option<String>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct AsymptoticArgs {
    #[arg(long)]
    d1: f64,
    #[arg(long)]
    d2: f64,
    /// Also evaluate the estimate and the exact bound at this order.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct PermanentArgs {
    /// Matrix file: `m <size>` then rows of 0/1.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Ryser)]
    method: Method,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct PaperArgs {
    #[arg(long, value_enum)]
    only: Option<Only>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Naive,
    Ryser,
    Bound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Only {
    Exact,
    Bounds,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("{0}")]
    Compute(String),
    #[error("{0} report rows failed")]
    ReportFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Count(CountError::BudgetExceeded { .. }) => 3,
            _ => 1,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn compute(e: impl ToString) -> CliError {
    CliError::Compute(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load_layout(arg: &str) -> Result<CoupledLayout, CliError> {
    if let Some(path) = arg.strip_prefix("file:") {
        return read(Path::new(path))?.parse().map_err(usage);
    }
    let kind = LayoutKind::from_str(arg).map_err(usage)?;
    make_layout(kind).map_err(usage)
}

fn emit(format: Format, value: &Value, text: &str) {
    let out = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("json value") + "\n",
        Format::Text => text.to_string(),
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn bound_json(b: &LogBound) -> Value {
    json!({
        "ln": b.ln(),
        "log10": b.log10(),
        "value": b.to_string(),
        "floor": b.floor_value().ok().map(|v| v.to_string()),
        "exact": b.exact().map(|v| v.to_string()),
    })
}

fn bound_text(b: &LogBound) -> String {
    let floor = b.floor_value().map_or("n/a".to_string(), |v| v.to_string());
    format!(
        "bound = {b}\nln = {:.6}\nlog10 = {:.6}\nfloor = {floor}\n",
        b.ln(),
        b.log10()
    )
}

fn bound_isolated(n: usize, c1: usize, c2: usize, format: Format) -> Result<(), CliError> {
    let spec = PartlyFilledSpec::new(n, c1, c2).map_err(usage)?;
    let b = if spec.is_empty() {
        herzberg_bound(n).map_err(usage)?
    } else {
        partly_filled_bound(&spec)
    };
    let terms = bound_terms(&spec);
    let (_, transposed_better) = oriented_bound(&spec);
    let value = json!({
        "n": n,
        "c1": c1,
        "c2": c2,
        "bound": bound_json(&b),
        "transposed_smaller": transposed_better,
        "terms": terms.iter().map(|t| json!({
            "kind": match t.kind { TermKind::Mu => "mu", TermKind::Nu => "nu" },
            "band": t.band,
            "position": t.position,
            "filled_bands": t.filled_bands,
            "factorial": t.factorial,
            "exponent": t.exponent.to_string(),
            "ln": t.ln,
        })).collect::<Vec<_>>(),
    });
    let mut text = format!("S_U{spec}\n{}", bound_text(&b));
    if transposed_better {
        text.push_str(&format!("note: S_U{} is smaller\n", spec.transposed()));
    }
    for t in &terms {
        text.push_str(&format!("  {t}  ln {:.6}\n", t.ln));
    }
    emit(format, &value, &text);
    Ok(())
}

fn layout_decomposition(
    layout: &CoupledLayout,
    exact_free: bool,
    order: Option<Vec<usize>>,
    greedy: bool,
) -> Result<sudoku_bounds::Decomposition, CliError> {
    match (order, greedy) {
        (Some(order), _) => decompose(layout, &order).map_err(usage),
        (None, true) => greedy_decomposition(layout, exact_free).map_err(compute),
        (None, false) => best_decomposition(layout, exact_free).map_err(compute),
    }
}

fn bound_layout(
    arg: &str,
    exact_free: bool,
    order: Option<Vec<usize>>,
    greedy: bool,
    format: Format,
) -> Result<(), CliError> {
    let layout = load_layout(arg)?;
    let d = layout_decomposition(&layout, exact_free, order, greedy)?;
    let b = composite_bound(&d, exact_free).map_err(compute)?;
    let components: Vec<Value> = d
        .steps()
        .iter()
        .zip(&b.per_component)
        .map(|(s, c)| {
            json!({
                "component": s.component,
                "offset": layout.components()[s.component],
                "spec": [c.spec.c1(), c.spec.c2()],
                "transposed": s.transposed,
                "exact_count": c.exact_count,
                "ln": c.bound.ln(),
            })
        })
        .collect();
    let value = json!({
        "layout": arg,
        "n": layout.n(),
        "components": layout.len(),
        "cells": b.cells,
        "order": d.order(),
        "exact_free": exact_free,
        "bound": bound_json(&b.bound),
        "rate_upper": b.rate_upper,
    });
    let mut text = format!(
        "{arg}: {} components, {} cells\norder {:?}\n{}rate <= {:.6}\n",
        layout.len(),
        b.cells,
        d.order(),
        bound_text(&b.bound),
        b.rate_upper
    );
    for c in &b.per_component {
        let tag = if c.exact_count { " (exact)" } else { "" };
        text.push_str(&format!(
            "  component {}: S{}{tag} = {}\n",
            c.component, c.spec, c.bound
        ));
    }
    let mut value = value;
    value["per_component"] = Value::Array(components);
    emit(format, &value, &text);
    Ok(())
}

fn count(args: CountArgs) -> Result<(), CliError> {
    let counter = Counter::new()
        .with_budget(args.budget)
        .parallel(args.parallel);
    if let Some(path) = &args.rows {
        let row = args.row.expect("clap enforces --row");
        let g: Grid = read(path)?.parse().map_err(usage)?;
        let direct = count_row_completions(&g, row)?;
        let matrix = admissibility_matrix(&g, row).map_err(usage)?;
        let perm = permanent_ryser(&matrix).map_err(compute)?;
        let value = json!({
            "row": row,
            "count": direct.to_string(),
            "permanent": perm.to_string(),
            "agree": direct == perm,
        });
        let text = format!("row {row} completions = {direct}\npermanent = {perm}\n");
        emit(args.format, &value, &text);
        return Ok(());
    }
    let (label, sys) = match (&args.grid, &args.layout) {
        (Some(path), _) => {
            let g: Grid = read(path)?.parse().map_err(usage)?;
            (path.display().to_string(), ConstraintSystem::from_grid(&g))
        }
        (None, Some(spec)) => (
            spec.clone(),
            ConstraintSystem::from_layout(&load_layout(spec)?),
        ),
        (None, None) => unreachable!("clap requires an input"),
    };
    let r = counter.count(&sys)?;
    let value = json!({
        "input": label,
        "cells": sys.cell_count(),
        "count": r.count.to_string(),
        "nodes": r.nodes_explored,
        "elapsed_ms": r.elapsed.as_secs_f64() * 1e3,
    });
    let text = format!(
        "count = {}\nnodes = {}\nelapsed = {:?}\n",
        r.count, r.nodes_explored, r.elapsed
    );
    emit(args.format, &value, &text);
    Ok(())
}

fn rate(args: RateArgs) -> Result<(), CliError> {
    let (n, cells, ln, source) = match (&args.layout, args.n, &args.count, args.cells) {
        (Some(spec), ..) => {
            let layout = load_layout(spec)?;
            let d = best_decomposition(&layout, args.exact_free).map_err(compute)?;
            let b = composite_bound(&d, args.exact_free).map_err(compute)?;
            (layout.n(), total_cells(&layout), b.ln_value, "bound")
        }
        (None, Some(n), Some(count), Some(cells)) => {
            let c = BigUint::from_str(count).map_err(|_| usage(format!("bad count `{count}`")))?;
            (n, cells, ln_biguint(&c), "count")
        }
        _ => return Err(usage("give --layout, or --n with --count and --cells")),
    };
    let r = coding_rate(ln, n, cells).map_err(usage)?;
    let value = json!({ "n": n, "cells": cells, "ln": ln, "source": source, "rate": r });
    emit(args.format, &value, &format!("rate = {r:.6}\n"));
    Ok(())
}

fn asymptotic(args: AsymptoticArgs) -> Result<(), CliError> {
    let ab = asymptotic_exponents(args.d1, args.d2).map_err(usage)?;
    let mut value = json!({ "d1": args.d1, "d2": args.d2, "alpha": ab.alpha, "beta": ab.beta });
    let mut text = format!("alpha = {:.6}\nbeta = {:.6}\n", ab.alpha, ab.beta);
    if let Some(n) = args.n {
        let spec = sudoku_bounds::spec_from_fractions(n, args.d1, args.d2).map_err(usage)?;
        let exact = partly_filled_bound(&spec).ln();
        let estimate = ab.ln_estimate(n);
        value["n"] = json!(n);
        value["ln_bound"] = json!(exact);
        value["ln_estimate"] = json!(estimate);
        text.push_str(&format!(
            "n = {n}: ln S_U = {exact:.3}, estimate {estimate:.3}\n"
        ));
    }
    emit(args.format, &value, &text);
    Ok(())
}

fn permanent(args: PermanentArgs) -> Result<(), CliError> {
    let a: BinaryMatrix = read(&args.matrix)?.parse().map_err(usage)?;
    let (method, value, text) = match args.method {
        Method::Naive | Method::Ryser => {
            let p = if args.method == Method::Naive {
                permanent_naive(&a)
            } else {
                permanent_ryser(&a)
            }
            .map_err(compute)?;
            let name = if args.method == Method::Naive {
                "naive"
            } else {
                "ryser"
            };
            (name, json!(p.to_string()), format!("permanent = {p}\n"))
        }
        Method::Bound => {
            let b = bregman_minc_bound(&a);
            ("bound", bound_json(&b), bound_text(&b))
        }
    };
    let out = json!({ "size": a.size(), "method": method, "result": value });
    emit(args.format, &out, &text);
    Ok(())
}

fn paper(args: PaperArgs) -> Result<(), CliError> {
    let selection = match args.only {
        None => Selection::All,
        Some(Only::Exact) => Selection::ExactCounts,
        Some(Only::Bounds) => Selection::Bounds,
    };
    let rows = run_paper_report(selection);
    let failed = rows.iter().filter(|r| !r.pass).count();
    let value = json!({
        "rows": rows.iter().map(|r| json!({
            "label": r.label,
            "paper_value": r.paper_value,
            "computed_value": r.computed_value,
            "relative_error": r.relative_error,
            "tolerance": r.tolerance.to_string(),
            "status": if r.pass { "pass" } else { "fail" },
        })).collect::<Vec<_>>(),
        "passed": rows.len() - failed,
        "failed": failed,
    });
    emit(args.format, &value, &render_table(&rows));
    if failed > 0 {
        return Err(CliError::ReportFailed(failed));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bound(BoundCommand::Isolated { n, c1, c2, format }) => {
            bound_isolated(n, c1, c2, format)
        }
        Command::Bound(BoundCommand::Layout {
            layout,
            exact_free,
            order,
            greedy,
            format,
        }) => bound_layout(&layout, exact_free, order, greedy, format),
        Command::Count(args) => count(args),
        Command::Rate(args) => rate(args),
        Command::Asymptotic(args) => asymptotic(args),
        Command::Permanent(args) => permanent(args),
        Command::Paper(args) => paper(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
