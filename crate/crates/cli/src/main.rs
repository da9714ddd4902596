//! `mvf` — load `.mvf` field files, evaluate fields, take directional
//! derivatives, inspect chart frames and Jacobians, and run the identity
//! suite.
//!
//! Exit codes: 0 success, 1 parse error, 2 name/domain/usage error,
//! 3 identity failure, 4 singular Jacobian.

use clap::{Args, Parser, Subcommand};
use mvf_core::calculus;
use mvf_core::charts::Chart;
use mvf_core::dsl;
use mvf_core::extensor::ExtensorError;
use mvf_core::suite::{run_suite, SuiteConfig, DEFAULT_SEED};
use mvf_core::{Direction, FieldFile, Multivector, MultivectorField, VectorField};

const EXIT_PARSE: i32 = 1;
const EXIT_REFERENCE: i32 = 2;
const EXIT_CHECK_FAILED: i32 = 3;
const EXIT_SINGULAR: i32 = 4;

#[derive(Parser)]
#[command(name = "mvf", version, about = "Multivector field engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a named field at a point.
    Eval(EvalArgs),
    /// Directional derivative of a named field.
    Derive(DeriveArgs),
    /// Run the identity-verification suite.
    Check(CheckArgs),
    /// Print the covariant and contravariant frames of a chart.
    Frames(FramesArgs),
    /// Print the Jacobian matrix of a chart.
    Jacobian(JacobianArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Path to the `.mvf` file.
    input: String,
    #[arg(short, long)]
    field: String,
    /// Comma-separated coordinates.
    #[arg(short, long)]
    point: String,
}

#[derive(Args)]
struct DeriveArgs {
    input: String,
    #[arg(short, long)]
    field: String,
    /// Direction: comma-separated components, or the name of a vector field.
    #[arg(short = 'a', long)]
    direction: Option<String>,
    /// Interpret the field in this chart's coordinates.
    #[arg(short, long)]
    chart: Option<String>,
    #[arg(short, long)]
    point: Option<String>,
    /// Also print the central finite difference with this step.
    #[arg(long, value_name = "H")]
    fd: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    input: String,
    /// Sample count per identity (overrides per-identity defaults).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Tolerance override for every identity.
    #[arg(long)]
    tol: Option<f64>,
    /// Emit one JSON object per line instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FramesArgs {
    input: String,
    #[arg(short, long)]
    chart: String,
    /// Chart-coordinate point at which to also print frame values.
    #[arg(short, long)]
    point: Option<String>,
}

#[derive(Args)]
struct JacobianArgs {
    input: String,
    #[arg(short, long)]
    chart: String,
    /// Print the inverse Jacobian instead.
    #[arg(long)]
    inverse: bool,
    /// Point at which to evaluate (chart coordinates; canonical for
    /// --inverse).
    #[arg(short, long)]
    point: Option<String>,
}

/// Print a line, exiting quietly if stdout has gone away (broken pipe).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Derive(args) => cmd_derive(args),
        Command::Check(args) => cmd_check(args),
        Command::Frames(args) => cmd_frames(args),
        Command::Jacobian(args) => cmd_jacobian(args),
    };
    if let Err(failure) = result {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn load(path: &str) -> Result<(String, FieldFile), Failure> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_REFERENCE, format!("cannot read {path}: {e}")))?;
    let file = dsl::parse(&source)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{path}:{}", e.render(&source))))?;
    Ok((source, file))
}

fn parse_point(text: &str, expected: usize) -> Result<Vec<f64>, Failure> {
    let coords: Result<Vec<f64>, _> = text.split(',').map(|c| c.trim().parse::<f64>()).collect();
    let coords = coords
        .map_err(|e| Failure::new(EXIT_REFERENCE, format!("bad coordinate list `{text}`: {e}")))?;
    if coords.len() != expected {
        return Err(Failure::new(
            EXIT_REFERENCE,
            format!("expected {expected} coordinates, got {}", coords.len()),
        ));
    }
    Ok(coords)
}

fn field_on_domain(
    file: &FieldFile,
    name: &str,
    domain: mvf_core::DomainBox,
) -> Result<MultivectorField, Failure> {
    let expr = file
        .field(name)
        .ok_or_else(|| Failure::new(EXIT_REFERENCE, format!("no field named `{name}`")))?;
    MultivectorField::new(expr.clone(), domain)
        .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))
}

fn parse_direction(
    file: &FieldFile,
    text: &str,
    domain: &mvf_core::DomainBox,
) -> Result<Direction, Failure> {
    let n = file.dimension.n();
    if text.contains(',') || text.trim().parse::<f64>().is_ok() {
        let components = parse_point(text, n)?;
        Direction::from_components(file.dimension, &components)
            .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))
    } else {
        let field = field_on_domain(file, text, domain.clone())?;
        let vf = VectorField::new(field)
            .map_err(|e| Failure::new(EXIT_REFERENCE, format!("direction `{text}`: {e}")))?;
        Ok(Direction::Field(vf))
    }
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let (_, file) = load(&args.input)?;
    let field = field_on_domain(&file, &args.field, file.eval_domain())?;
    let point = parse_point(&args.point, file.dimension.n())?;
    let value = field
        .evaluate(&point)
        .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
    out!("{value}");
    Ok(())
}

fn cmd_derive(args: DeriveArgs) -> Result<(), Failure> {
    let (_, file) = load(&args.input)?;
    let n = file.dimension.n();
    let Some(direction_text) = &args.direction else {
        return Err(Failure::new(EXIT_REFERENCE, "missing direction (-a)"));
    };

    // with a chart the field lives in chart coordinates and is gated by the
    // chart's own box
    let (domain, chart) = match &args.chart {
        Some(name) => {
            let def = file.chart(name).ok_or_else(|| {
                Failure::new(EXIT_REFERENCE, format!("no chart named `{name}`"))
            })?;
            let chart = Chart::from_def(name.clone(), def, file.dimension)
                .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
            (chart.chart_domain().clone(), Some(chart))
        }
        None => (file.eval_domain(), None),
    };
    let field = field_on_domain(&file, &args.field, domain.clone())?;
    let direction = parse_direction(&file, direction_text, &domain)?;

    let derivative = match &chart {
        Some(chart) => chart
            .dod_chart(&direction, &field)
            .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?,
        None => calculus::dod(&direction, &field)
            .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?,
    };

    match &args.point {
        None => out!("{derivative}"),
        Some(point_text) => {
            let point = parse_point(point_text, n)?;
            let value = derivative
                .evaluate(&point)
                .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
            out!("{value}");
            if let Some(h) = args.fd {
                if h <= 0.0 {
                    return Err(Failure::new(EXIT_REFERENCE, "fd step must be positive"));
                }
                let a_value = direction
                    .evaluate(&point)
                    .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
                let mut fd = Multivector::zero(file.dimension);
                for mu in 1..=n {
                    let weight = a_value.coefficient(1 << (mu - 1));
                    if weight != 0.0 {
                        let partial = field
                            .fd_partial(mu, &point, h)
                            .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
                        fd = &fd + &partial.scale(weight);
                    }
                }
                out!("fd: {fd}");
                out!("fd discrepancy: {:e}", value.max_abs_diff(&fd));
            }
        }
    }
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<(), Failure> {
    let (_, file) = load(&args.input)?;
    let config = SuiteConfig {
        samples: args.samples,
        seed: args.seed,
        tol: args.tol,
    };
    if let Some(tol) = args.tol {
        if tol <= 0.0 {
            return Err(Failure::new(EXIT_REFERENCE, "tolerance must be positive"));
        }
    }
    let reports = run_suite(&file, &config)
        .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
    let mut all_pass = true;
    for report in &reports {
        all_pass &= report.pass;
        if args.json {
            out!("{}", report.to_json_line());
        } else {
            out!(
                "{} {} max_residual={:.3e} tol={:.1e} points={} ({})",
                if report.pass { "PASS" } else { "FAIL" },
                report.identity,
                report.max_residual,
                report.tolerance,
                report.points,
                report.law
            );
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::new(EXIT_CHECK_FAILED, "identity checks failed"))
    }
}

/// Numeric display for frame/matrix values: six decimals, trailing zeros
/// trimmed.
fn trim(value: f64) -> String {
    let text = format!("{value:.6}");
    let text = text.trim_end_matches('0').trim_end_matches('.').to_string();
    if text == "-0" {
        "0".into()
    } else {
        text
    }
}

fn load_chart(file: &FieldFile, name: &str) -> Result<Chart, Failure> {
    let def = file
        .chart(name)
        .ok_or_else(|| Failure::new(EXIT_REFERENCE, format!("no chart named `{name}`")))?;
    Chart::from_def(name.to_string(), def, file.dimension)
        .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))
}

fn cmd_frames(args: FramesArgs) -> Result<(), Failure> {
    let (_, file) = load(&args.input)?;
    let chart = load_chart(&file, &args.chart)?;
    let n = file.dimension.n();
    let covariant = chart.covariant_frame();
    let contravariant = chart.contravariant_frame();
    for (mu, vf) in covariant.iter().enumerate() {
        out!("covariant_{} = {}", mu + 1, vf);
    }
    for (nu, vf) in contravariant.iter().enumerate() {
        out!("contravariant_{} = {}", nu + 1, vf);
    }
    if let Some(point_text) = &args.point {
        let point = parse_point(point_text, n)?;
        let canonical = chart
            .inverse_coords(&point)
            .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
        for (mu, vf) in covariant.iter().enumerate() {
            let value = vf
                .field()
                .evaluate_raw(&point)
                .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
            let comps: Vec<String> = value.vector_components().iter().map(|&v| trim(v)).collect();
            out!("covariant_{} at point: {}", mu + 1, comps.join(", "));
        }
        for (nu, vf) in contravariant.iter().enumerate() {
            let value = vf
                .field()
                .evaluate_raw(&canonical)
                .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
            let comps: Vec<String> = value.vector_components().iter().map(|&v| trim(v)).collect();
            out!("contravariant_{} at point: {}", nu + 1, comps.join(", "));
        }
    }
    Ok(())
}

fn cmd_jacobian(args: JacobianArgs) -> Result<(), Failure> {
    let (_, file) = load(&args.input)?;
    let chart = load_chart(&file, &args.chart)?;
    let n = file.dimension.n();
    let jacobian = if args.inverse {
        chart.jacobian_inverse()
    } else {
        chart.jacobian()
    };
    for (mu, row) in jacobian.matrix().iter().enumerate() {
        for (nu, entry) in row.iter().enumerate() {
            out!("J[{}][{}] = {}", mu + 1, nu + 1, entry);
        }
    }
    if let Some(point_text) = &args.point {
        let point = parse_point(point_text, n)?;
        // the condition bound gates evaluation at the point; singular
        // points (outside any declared box or not) exit 4
        match jacobian.condition_at(&point) {
            Ok(_) => {}
            Err(ExtensorError::Singular { condition, point }) => {
                return Err(Failure::new(
                    EXIT_SINGULAR,
                    format!("singular jacobian at {point:?}: condition estimate {condition:.3e}"),
                ));
            }
            Err(e) => return Err(Failure::new(EXIT_REFERENCE, e.to_string())),
        }
        let matrix = jacobian
            .evaluate_matrix(&point)
            .map_err(|e| Failure::new(EXIT_REFERENCE, e.to_string()))?;
        for row in &matrix {
            let cells: Vec<String> = row.iter().map(|&v| trim(v)).collect();
            out!("{}", cells.join(", "));
        }
    }
    Ok(())
}
