//! Batch front end: problem files on stdin (or --input), one subcommand per
//! computation, fixtures for the three reference bundles, SVG region plots.

use boxnef_cli::{json, svg};

use boxnef::bundle::{Bigness, BundleProblem, ChartPoint};
use boxnef::envelope::{self, WeightValue};
use boxnef::error::Error as CoreError;
use boxnef::mult_ideal::{self, Monomial};
use boxnef::positivity::{self, ZariskiShape};
use boxnef::scalar::{format_f64, rat_parse, Rat, Scalar};
use boxnef::torus::Complex;
use boxnef::fixtures;
use clap::{Args, Parser, Subcommand};
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "boxnef",
    about = "Positivity invariants of line bundles on toric bundles over abelian surfaces",
    version
)]
struct Cli {
    /// Problem JSON file; reads stdin when omitted (except for `fixture`).
    #[arg(long, global = true)]
    input: Option<String>,
    /// Numeric tolerance for approximate comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PointArg {
    /// Chart point: "P(L0)" | "P(L1)" | "P(L2)" | "apex:SIGMA" |
    /// "sigma=K;x=a,b;z=c,d" with complex entries "re" or "re:im".
    #[arg(long)]
    point: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check fan smoothness, completeness, and Cartier data consistency.
    Validate,
    /// Pseudo-effectivity: is the nef box nonempty?
    Pseff,
    /// Bigness via an exact ample witness.
    Big,
    /// The nef box: exact facet description and vertices.
    Boxnef {
        #[arg(long)]
        svg: Option<String>,
    },
    /// The exponent body of one chart (optionally scaled).
    Sset {
        #[arg(long)]
        sigma: usize,
        #[arg(long, default_value = "1")]
        t: String,
        #[arg(long)]
        svg: Option<String>,
    },
    /// Envelope weight at a point.
    Eval(PointArg),
    /// Lelong number at a point.
    Lelong(PointArg),
    /// Kiselman number at a point with direction weights.
    Kiselman {
        #[command(flatten)]
        point: PointArg,
        /// Comma-separated positive weights, one per vanished coordinate.
        #[arg(long)]
        w: String,
    },
    /// Non-nef locus strata with generic Lelong numbers.
    Nnef,
    /// Divisorial negative part coefficients.
    Negpart,
    /// Rational-polyhedrality of the nef box.
    Zariski,
    /// Multiplier-ideal queries at a point and level.
    Mideal {
        #[command(flatten)]
        point: PointArg,
        #[arg(long)]
        t: String,
        /// Query monomial "p,q" (defaults to 1).
        #[arg(long)]
        monomial: Option<String>,
        /// List minimal monomial generators instead.
        #[arg(long)]
        gens: bool,
        #[arg(long)]
        degree_bound: Option<i64>,
    },
    /// Jumping numbers up to a bound.
    Jumps {
        #[command(flatten)]
        point: PointArg,
        #[arg(long)]
        max: String,
    },
    /// Log-canonical threshold at a point.
    Lct(PointArg),
    /// Global section count via the lattice decomposition.
    Sections,
    /// Emit a reference problem as JSON.
    Fixture {
        #[command(subcommand)]
        which: FixtureCommand,
    },
}

#[derive(Subcommand)]
enum FixtureCommand {
    /// The bundle with no Zariski decomposition even after modifications.
    Nakayama {
        #[arg(long, default_value_t = 2)]
        a: i64,
    },
    /// The rational-polyhedral family with parameters u < v.
    Ex62 {
        #[arg(long, default_value_t = 1)]
        u: i64,
        #[arg(long, default_value_t = 2)]
        v: i64,
    },
    /// The polyhedral-but-irrational example.
    Ex65,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Math(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

enum AppError {
    Parse(String),
    Math(CoreError),
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(msg) => AppError::Parse(msg),
            other => AppError::Math(other),
        }
    }
}

fn load_problem(cli_input: &Option<String>) -> Result<BundleProblem, AppError> {
    let text = match cli_input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| AppError::Parse(format!("cannot read {path}: {e}")))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| AppError::Parse(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    let file: json::ProblemFile =
        serde_json::from_str(&text).map_err(|e| AppError::Parse(format!("problem JSON: {e}")))?;
    json::to_problem(&file).map_err(AppError::Parse)
}

fn parse_complex(s: &str) -> Result<Complex, AppError> {
    let parts: Vec<&str> = s.split(':').collect();
    let parse = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| AppError::Parse(format!("cannot parse coordinate '{x}'")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex::new(parse(re)?, parse(im)?)),
        _ => Err(AppError::Parse(format!("cannot parse complex entry '{s}'"))),
    }
}

fn parse_point(spec: &str, problem: &BundleProblem) -> Result<ChartPoint, AppError> {
    let n = problem.fiber_rank();
    let d = problem.torus_dim();
    let reference = fixtures::projective_plane_fan();
    let named = |sigma: usize| Ok(ChartPoint::apex(sigma, n, d));
    match spec {
        "P(L0)" | "P(L1)" | "P(L2)" => {
            if problem.fan != reference {
                return Err(AppError::Parse(
                    "named sections P(Lj) require the reference fan".into(),
                ));
            }
            named(match spec {
                "P(L0)" => 0,
                "P(L1)" => 1,
                _ => 2,
            })
        }
        _ => {
            if let Some(rest) = spec.strip_prefix("apex:") {
                let sigma: usize = rest
                    .parse()
                    .map_err(|_| AppError::Parse(format!("bad chart id '{rest}'")))?;
                return named(sigma);
            }
            let mut sigma = None;
            let mut x = Vec::new();
            let mut z = vec![Complex::new(0.0, 0.0); d];
            for field in spec.split(';') {
                let Some((key, value)) = field.split_once('=') else {
                    return Err(AppError::Parse(format!("bad point field '{field}'")));
                };
                match key.trim() {
                    "sigma" => {
                        sigma = Some(value.trim().parse::<usize>().map_err(|_| {
                            AppError::Parse(format!("bad chart id '{value}'"))
                        })?);
                    }
                    "x" => {
                        x = value.split(',').map(parse_complex).collect::<Result<_, _>>()?;
                    }
                    "z" => {
                        z = value.split(',').map(parse_complex).collect::<Result<_, _>>()?;
                    }
                    other => {
                        return Err(AppError::Parse(format!("unknown point field '{other}'")));
                    }
                }
            }
            let sigma =
                sigma.ok_or_else(|| AppError::Parse("point needs a chart: sigma=K".into()))?;
            if x.len() != n {
                return Err(AppError::Parse(format!("point needs {n} fiber coordinates")));
            }
            if z.len() != d {
                return Err(AppError::Parse(format!("point needs {d} base coordinates")));
            }
            Ok(ChartPoint::new(sigma, x, z))
        }
    }
}

fn parse_level(s: &str) -> Result<Rat, AppError> {
    rat_parse(s).ok_or_else(|| AppError::Parse(format!("cannot parse level '{s}'")))
}

fn show(value: &Scalar) -> String {
    match value {
        Scalar::Exact(_) => format!("{value} = {}", format_f64(value.to_f64())),
        Scalar::Approx { .. } => format!("{value}"),
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    if let Command::Fixture { which } = &cli.command {
        let problem = match which {
            FixtureCommand::Nakayama { a } => fixtures::nakayama(*a)?,
            FixtureCommand::Ex62 { u, v } => fixtures::ex62(*u, *v)?,
            FixtureCommand::Ex65 => fixtures::ex65()?,
        };
        let file = json::from_problem(&problem);
        println!("{}", serde_json::to_string_pretty(&file).unwrap());
        return Ok(());
    }
    let problem = load_problem(&cli.input)?;
    match cli.command {
        Command::Fixture { .. } => unreachable!(),
        Command::Validate => {
            let report = problem.validate()?;
            println!("smooth: yes");
            match report.complete {
                Some(true) => println!("complete: yes"),
                Some(false) => println!("complete: no"),
                None => println!("complete: not certified (fiber rank > 2)"),
            }
            for w in report.warnings {
                println!("warning: {w}");
            }
            println!("valid");
        }
        Command::Pseff => {
            println!(
                "pseudoeffective: {}",
                if problem.is_pseudoeffective()? { "yes" } else { "no" }
            );
        }
        Command::Big => {
            let (verdict, witness) = problem.is_big()?;
            match verdict {
                Bigness::Big => {
                    let w = witness.unwrap();
                    println!(
                        "big: yes (ample twist at m = ({}, {}))",
                        Scalar::Exact(w[0].clone()),
                        Scalar::Exact(w[1].clone())
                    );
                }
                Bigness::NotBig => println!("big: no"),
                Bigness::Unknown => println!("big: unknown"),
            }
        }
        Command::Boxnef { svg } => {
            let region = problem.box_nef()?;
            if region.is_empty()? {
                println!("box_nef: empty");
                return Ok(());
            }
            println!(
                "box_nef: {} affine inequalities, {} conic constraints",
                region.affine.len(),
                region.conics.len()
            );
            let heading = if region.is_polyhedral() {
                "vertices (exact):"
            } else {
                "boundary has conic arcs; polyhedral extreme points:"
            };
            println!("{heading}");
            for v in region.feasible_affine_vertices() {
                println!("  ({}, {})", Scalar::Exact(v[0].clone()), Scalar::Exact(v[1].clone()));
            }
            if let Some(path) = svg {
                std::fs::write(&path, svg::plot_region(&region, "nef box"))
                    .map_err(|e| AppError::Parse(format!("cannot write {path}: {e}")))?;
                println!("svg written to {path}");
            }
        }
        Command::Sset { sigma, t, svg } => {
            let level = parse_level(&t)?;
            let body = positivity::s_set(&problem, sigma)?;
            println!(
                "S-set of chart {sigma}: bounded part with {} inequalities plus the positive orthant",
                body.region.affine.len() + body.region.conics.len()
            );
            for (j, min) in body.coordinate_minima.iter().enumerate() {
                println!("  coordinate {j} minimum: {}", show(min));
            }
            if let Some(path) = svg {
                let tf = boxnef::scalar::rat_to_f64(&level);
                let view = (2.0 * tf).max(4.0);
                std::fs::write(
                    &path,
                    svg::plot_sset(&body, tf, view, &format!("S_{t} of chart {sigma}")),
                )
                .map_err(|e| AppError::Parse(format!("cannot write {path}: {e}")))?;
                println!("svg written to {path}");
            }
        }
        Command::Eval(p) => {
            let pt = parse_point(&p.point, &problem)?;
            match envelope::psi_sigma(&problem, &pt)? {
                WeightValue::NegInfinity => println!("psi = -inf"),
                WeightValue::Finite(v) => println!("psi = {}", format_f64(v)),
            }
        }
        Command::Lelong(p) => {
            let pt = parse_point(&p.point, &problem)?;
            let v = positivity::lelong_number(&problem, &pt)?;
            println!("lelong = {}", show(&v));
        }
        Command::Kiselman { point, w } => {
            let pt = parse_point(&point.point, &problem)?;
            let weights: Vec<Scalar> = w
                .split(',')
                .map(|s| {
                    rat_parse(s.trim())
                        .map(Scalar::Exact)
                        .ok_or_else(|| AppError::Parse(format!("bad weight '{s}'")))
                })
                .collect::<Result<_, _>>()?;
            let v = positivity::kiselman_number(&problem, &pt, &weights)?;
            println!("kiselman = {}", show(&v));
        }
        Command::Nnef => {
            let strata = positivity::nnef_locus(&problem)?;
            if strata.is_empty() {
                println!("non-nef locus: empty");
            } else {
                println!("non-nef locus strata:");
                for s in strata {
                    println!(
                        "  {} generic lelong {}",
                        fixtures::stratum_name(&problem.fan, &s.rays),
                        show(&s.generic_lelong)
                    );
                }
            }
        }
        Command::Negpart => {
            println!("negative part coefficients:");
            for (ray, coeff) in positivity::negative_part(&problem)? {
                println!("  Gamma_v{ray}: {}", show(&coeff));
            }
        }
        Command::Zariski => {
            let shape = positivity::zariski_polyhedrality(&problem)?;
            println!(
                "{}",
                match shape {
                    ZariskiShape::RationalPolyhedral => "RationalPolyhedral",
                    ZariskiShape::NonPolyhedralOrIrrational => "NonPolyhedralOrIrrational",
                }
            );
        }
        Command::Mideal { point, t, monomial, gens, degree_bound } => {
            let pt = parse_point(&point.point, &problem)?;
            let level = parse_level(&t)?;
            if gens {
                let list = mult_ideal::ideal_generators(&problem, &pt, &level, degree_bound)?;
                println!("minimal monomial generators at t = {t}:");
                for g in list {
                    println!("  {}", monomial_name(&g));
                }
            } else {
                let mono = match monomial {
                    Some(spec) => Monomial::new(
                        spec.split(',')
                            .map(|s| {
                                s.trim()
                                    .parse::<i64>()
                                    .map_err(|_| AppError::Parse(format!("bad exponent '{s}'")))
                            })
                            .collect::<Result<_, _>>()?,
                    )?,
                    None => Monomial::one(problem.fiber_rank()),
                };
                let member = mult_ideal::in_multiplier_ideal(
                    &problem,
                    &pt,
                    std::slice::from_ref(&mono),
                    &level,
                )?;
                println!(
                    "{} at t = {t}: {}",
                    monomial_name(&mono),
                    if member { "member" } else { "not a member" }
                );
            }
        }
        Command::Jumps { point, max } => {
            let pt = parse_point(&point.point, &problem)?;
            let bound = parse_level(&max)?;
            let jumps = mult_ideal::jumping_numbers(&problem, &pt, &bound)?;
            println!("jumping numbers up to {max}:");
            for j in jumps {
                let realized: Vec<String> = j
                    .realized_by
                    .iter()
                    .map(|n| {
                        format!(
                            "({})",
                            n.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                        )
                    })
                    .collect();
                println!("  {}  [{}]", show(&j.value), realized.join(" "));
            }
        }
        Command::Lct(p) => {
            let pt = parse_point(&p.point, &problem)?;
            let v = mult_ideal::lct(&problem, &pt)?;
            println!("{}", format_f64(v.to_f64()));
        }
        Command::Sections => {
            let report = mult_ideal::section_count(&problem)?;
            println!("lattice twists and section counts:");
            for (m, count) in &report.per_lattice_point {
                let label =
                    format!("({})", m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
                match count {
                    mult_ideal::SectionCount::Known(k) => println!("  {label}: {k}"),
                    mult_ideal::SectionCount::BoundaryUnknown => {
                        println!("  {label}: boundary (unknown)")
                    }
                }
            }
            match report.total {
                Some(total) => println!("total: {total}"),
                None => println!("total: unknown (boundary classes present)"),
            }
        }
    }
    Ok(())
}

fn monomial_name(m: &Monomial) -> String {
    if m.exponents.iter().all(|&e| e == 0) {
        return "1".into();
    }
    m.exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, &e)| {
            if e == 1 {
                format!("x{}", j + 1)
            } else {
                format!("x{}^{}", j + 1, e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}
