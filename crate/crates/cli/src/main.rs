//! Command-line front end: solve single problems, run grid-refinement
//! studies, print certificates, list built-ins, emit CSV and SVG.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 non-convergence,
//! 4 evaluation/parse errors, 5 certificate not contractive.

mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use navier_bvp::certificate::{
    apriori_bound, contraction_check, lipschitz_estimate, positivity_check, sup_f_check,
    Certificate, ContractionInputs,
};
use navier_bvp::kernels::kernel_bound_m2;
use navier_bvp::study::{convergence_table, observed_order, ConvergenceStudy};
use navier_bvp::{
    by_name, from_expressions, problem, solve, Error, GridSpec, Problem, Solution, StoppingRule,
};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;
const EXIT_EVAL: u8 = 4;
const EXIT_NOT_CONTRACTIVE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "navier-bvp",
    version,
    about = "Fixed-point solver for u'''' = f(x, u, u', Ku) with Navier boundary conditions \
             on [0, 1], where (Ku)(x) is the kernel integral of u"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem; print iterations, residual and errors
    Solve(SolveArgs),
    /// Run a grid-refinement study over several grid sizes
    Study(StudyArgs),
    /// Evaluate the contraction certificate (and sampled hypothesis checks)
    Certify(CertifyArgs),
    /// List the built-in problems
    ListExamples,
}

#[derive(Args)]
struct ProblemSelect {
    /// Built-in problem name (see list-examples)
    #[arg(long, value_name = "NAME")]
    example: Option<String>,

    /// Right-hand side f over x, u, v, z (v = u', z = kernel integral)
    #[arg(long, value_name = "EXPR", requires = "kernel")]
    f: Option<String>,

    /// Kernel k over x, t
    #[arg(long, value_name = "EXPR", requires = "f")]
    kernel: Option<String>,

    /// Exact solution u(x); enables error reporting and exact stopping
    #[arg(long, value_name = "EXPR", requires = "f")]
    exact: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    /// stop when the sup-norm change of the iterate falls below eps
    Successive,
    /// stop when the error against the exact solution falls below h^2
    Exact,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    select: ProblemSelect,

    /// Number of grid subintervals N (grid step h = 1/N)
    #[arg(long, default_value_t = 100)]
    n: usize,

    #[arg(long, value_enum, default_value_t = CriterionArg::Successive)]
    criterion: CriterionArg,

    /// Tolerance for the successive criterion
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,

    #[arg(long, default_value_t = 1000)]
    max_iter: usize,

    /// Write the solution as CSV (columns x,u,v)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Write an SVG plot of the solution
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,

    /// Print a JSON summary instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    select: ProblemSelect,

    /// Comma-separated grid sizes, e.g. 50,100,200
    #[arg(long, value_name = "N1,N2,...", value_delimiter = ',', required = true)]
    grids: Vec<usize>,

    #[arg(long, value_enum, default_value_t = CriterionArg::Successive)]
    criterion: CriterionArg,

    #[arg(long, default_value_t = 1e-10)]
    eps: f64,

    #[arg(long, default_value_t = 1000)]
    max_iter: usize,

    /// Write the study table as CSV
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Print a JSON summary instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    select: ProblemSelect,

    /// Ball radius M of the certificate
    #[arg(long = "M", value_name = "REAL")]
    m: f64,

    /// Lipschitz constant of f in u (analytic, takes precedence over --estimate)
    #[arg(long = "L0", value_name = "REAL")]
    l0: Option<f64>,

    /// Lipschitz constant of f in v
    #[arg(long = "L1", value_name = "REAL")]
    l1: Option<f64>,

    /// Lipschitz constant of f in z
    #[arg(long = "L2", value_name = "REAL")]
    l2: Option<f64>,

    /// Kernel bound M2; estimated from the kernel when omitted
    #[arg(long = "M2", value_name = "REAL")]
    m2: Option<f64>,

    /// Estimate missing Lipschitz constants by random secant sampling
    #[arg(long)]
    estimate: bool,

    /// Sample count for Lipschitz estimation
    #[arg(long, default_value_t = 100_000)]
    samples: usize,

    /// Points per axis for the sampled sup/positivity checks
    #[arg(long, default_value_t = 20)]
    density: usize,

    /// Also check the positive-solution hypotheses on the positive box
    #[arg(long)]
    positivity: bool,

    /// Print the certificate as JSON instead of text
    #[arg(long)]
    json: bool,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn from_core(err: Error) -> Failure {
    let code = exit_code_for(&err);
    Failure {
        code,
        message: err.to_string(),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::Parse { .. } | Error::Eval(_) => EXIT_EVAL,
        Error::NonConvergence { .. } => EXIT_NO_CONVERGENCE,
        Error::StudyRow { source, .. } => exit_code_for(source),
    }
}

fn from_io(err: std::io::Error, what: &str) -> Failure {
    Failure {
        code: 1,
        message: format!("{what}: {err}"),
    }
}

impl ProblemSelect {
    fn is_empty(&self) -> bool {
        self.example.is_none() && self.f.is_none()
    }

    fn build(&self) -> Result<Problem, Failure> {
        match (&self.example, &self.f) {
            (Some(_), Some(_)) => Err(usage(
                "choose either --example or --f/--kernel, not both",
            )),
            (Some(name), None) => by_name(name)
                .ok_or_else(|| usage(format!("unknown example '{name}'; try list-examples"))),
            (None, Some(f_text)) => {
                let kernel = self.kernel.as_deref().expect("clap enforces --kernel");
                from_expressions(f_text, kernel, self.exact.as_deref()).map_err(from_core)
            }
            (None, None) => Err(usage(
                "a problem is required: --example NAME or --f EXPR --kernel EXPR",
            )),
        }
    }
}

fn stopping_rule(
    criterion: CriterionArg,
    eps: f64,
    max_iter: usize,
    problem: &Problem,
) -> Result<StoppingRule, Failure> {
    let rule = match criterion {
        CriterionArg::Successive => StoppingRule::successive(eps).map_err(from_core)?,
        CriterionArg::Exact => {
            if !problem.has_exact() {
                return Err(usage(
                    "--criterion exact requires a problem with an exact solution",
                ));
            }
            StoppingRule::exact_error()
        }
    };
    Ok(rule.with_max_iter(max_iter))
}

fn criterion_name(criterion: CriterionArg) -> &'static str {
    match criterion {
        CriterionArg::Successive => "successive",
        CriterionArg::Exact => "exact",
    }
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

fn write_solution_csv(solution: &Solution, path: &Path) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| from_io(e, "creating CSV file"))?;
    let mut w = BufWriter::new(file);
    solution
        .write_csv(&mut w)
        .and_then(|()| w.flush())
        .map_err(|e| from_io(e, "writing CSV"))
}

fn run_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let problem = args.select.build()?;
    let grid = GridSpec::new(args.n).map_err(from_core)?;
    let rule = stopping_rule(args.criterion, args.eps, args.max_iter, &problem)?;
    let solution = solve(&problem, &grid, &rule).map_err(from_core)?;

    if let Some(path) = &args.out {
        write_solution_csv(&solution, path)?;
    }
    if let Some(path) = &args.plot {
        let file = File::create(path).map_err(|e| from_io(e, "creating SVG file"))?;
        let mut w = BufWriter::new(file);
        svg::emit_svg(&solution, &mut w)
            .and_then(|()| w.flush())
            .map_err(|e| from_io(e, "writing SVG"))?;
    }

    let residual = solution.final_residual().unwrap_or(0.0);
    if args.json {
        let summary = serde_json::json!({
            "problem": problem.name(),
            "n": args.n,
            "criterion": criterion_name(args.criterion),
            "eps": if args.criterion == CriterionArg::Successive { Some(args.eps) } else { None },
            "iterations": solution.iterations,
            "residual": residual,
            "max_abs_u": max_abs(&solution.u),
            "max_abs_v": max_abs(&solution.v),
            "error_u": solution.error_u,
            "error_v": solution.error_v,
        });
        println!("{summary}");
    } else {
        println!("problem      {}", problem.name());
        println!("N            {}", args.n);
        println!("criterion    {}", criterion_name(args.criterion));
        if args.criterion == CriterionArg::Successive {
            println!("eps          {:.4e}", args.eps);
        }
        println!("iterations   {}", solution.iterations);
        println!("residual     {:.4e}", residual);
        println!("max|u|       {:.4e}", max_abs(&solution.u));
        println!("max|v|       {:.4e}", max_abs(&solution.v));
        if let Some(e) = solution.error_u {
            println!("error u      {:.4e}", e);
        }
        if let Some(e) = solution.error_v {
            println!("error v      {:.4e}", e);
        }
        if let Some(path) = &args.out {
            println!("csv          {}", path.display());
        }
        if let Some(path) = &args.plot {
            println!("svg          {}", path.display());
        }
    }
    Ok(0)
}

fn print_study_table(study: &ConvergenceStudy, orders: &[Option<f64>]) {
    println!(
        "{:>6}  {:>12}  {:>4}  {:>12}  {:>10}",
        "N",
        "h2",
        "m",
        study.error_kind.column_name(),
        "order"
    );
    for (i, row) in study.rows.iter().enumerate() {
        let order = if i == 0 {
            "-".to_string()
        } else {
            match orders[i - 1] {
                Some(o) => format!("{o:.4}"),
                None => "-".to_string(),
            }
        };
        println!(
            "{:>6}  {:>12.4e}  {:>4}  {:>12.4e}  {:>10}",
            row.n, row.h2, row.iterations, row.error, order
        );
    }
}

fn run_study(args: &StudyArgs) -> Result<u8, Failure> {
    let problem = args.select.build()?;
    let rule = stopping_rule(args.criterion, args.eps, args.max_iter, &problem)?;
    let study = convergence_table(&problem, &args.grids, &rule).map_err(from_core)?;
    let orders = observed_order(&study.rows);

    if let Some(path) = &args.out {
        let file = File::create(path).map_err(|e| from_io(e, "creating CSV file"))?;
        let mut w = BufWriter::new(file);
        study
            .write_csv(&mut w)
            .and_then(|()| w.flush())
            .map_err(|e| from_io(e, "writing CSV"))?;
    }

    if args.json {
        let rows: Vec<serde_json::Value> = study
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "n": r.n,
                    "h2": r.h2,
                    "m": r.iterations,
                    study.error_kind.column_name(): r.error,
                })
            })
            .collect();
        let summary = serde_json::json!({
            "problem": problem.name(),
            "criterion": criterion_name(args.criterion),
            "error_column": study.error_kind.column_name(),
            "rows": rows,
            "orders": orders,
        });
        println!("{summary}");
    } else {
        print_study_table(&study, &orders);
        if let Some(path) = &args.out {
            println!("csv          {}", path.display());
        }
    }
    Ok(0)
}

fn run_certify(args: &CertifyArgs) -> Result<u8, Failure> {
    let problem = if args.select.is_empty() {
        None
    } else {
        Some(args.select.build()?)
    };
    let need_problem = |what: &str| {
        usage(format!(
            "{what} requires a problem (--example or --f/--kernel)"
        ))
    };

    let m2 = match args.m2 {
        Some(v) => v,
        None => {
            let p = problem.as_ref().ok_or_else(|| need_problem("estimating M2"))?;
            kernel_bound_m2(|x, t| p.kernel(x, t), 1000).map_err(from_core)?
        }
    };

    let (l0, l1, l2) = if args.estimate {
        let p = problem
            .as_ref()
            .ok_or_else(|| need_problem("--estimate"))?;
        let (e0, e1, e2) = lipschitz_estimate(p, args.m, args.samples).map_err(from_core)?;
        (
            args.l0.unwrap_or(e0),
            args.l1.unwrap_or(e1),
            args.l2.unwrap_or(e2),
        )
    } else {
        match (args.l0, args.l1, args.l2) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(usage(
                    "provide --L0, --L1 and --L2, or pass --estimate",
                ))
            }
        }
    };

    let inputs = ContractionInputs::new(args.m, l0, l1, l2, m2).map_err(from_core)?;
    let mut cert: Certificate = contraction_check(&inputs);

    let mut sup_estimate = None;
    if let Some(p) = &problem {
        let (sup, ok) = sup_f_check(p, args.m, args.density).map_err(from_core)?;
        sup_estimate = Some(sup);
        cert.sup_ok = Some(ok);
        if args.positivity {
            cert.positivity_ok = Some(positivity_check(p, args.m, args.density).map_err(from_core)?);
        }
    }

    if args.json {
        println!("{}", cert.to_json());
    } else {
        println!("{cert}");
        if let Some(sup) = sup_estimate {
            println!("sup estimate {:.4e}", sup);
        }
        if cert.contraction_ok {
            let (eu, ev) = apriori_bound(cert.q, 1.0, 10).map_err(from_core)?;
            println!("10-step envelope per unit displacement: u {:.4e}, u' {:.4e}", eu, ev);
        } else {
            eprintln!("warning: q >= 1, the fixed-point iteration is not certified to converge");
        }
    }
    Ok(if cert.contraction_ok {
        0
    } else {
        EXIT_NOT_CONTRACTIVE
    })
}

fn run_list_examples() -> Result<u8, Failure> {
    for (name, summary) in problem::builtin_summaries() {
        println!("{name:<10}  {summary}");
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Study(args) => run_study(args),
        Command::Certify(args) => run_certify(args),
        Command::ListExamples => run_list_examples(),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
