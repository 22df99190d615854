//! Implementations behind the CLI subcommands.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use simcheck_core::attack::{find_attack_channel, AttackError, AttackRequest};
use simcheck_core::linalg::default_rank_tol;
use simcheck_core::lp::FEASIBILITY_TOL;
use simcheck_core::pmf::{binary_symmetric_erasure, JointPmf, PMF_TOL};
use simcheck_core::simulatability::{
    build_system, check_system, CheckOptions, Direction, LpPath, VerdictReason, VERDICT_TOL,
};

use crate::report::{AttackRefusal, AttackReport, CheckReport, Timings, Tolerances};
use crate::schema::{load_pmf, load_template};
use crate::CliError;

fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

pub fn direction_from_flag(flag: &str) -> Result<Direction, CliError> {
    match flag {
        "y" => Ok(Direction::YFixedZToX),
        "x" => Ok(Direction::XFixedZToY),
        other => Err(CliError::BadFlag(format!(
            "--direction must be 'y' or 'x', got '{other}'"
        ))),
    }
}

fn direction_name(direction: Direction) -> String {
    match direction {
        Direction::YFixedZToX => "y".to_string(),
        Direction::XFixedZToY => "x".to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct CheckArgs {
    pub direction: Direction,
    pub full_lp: bool,
    pub tol_rank: Option<f64>,
    pub tol_verdict: Option<f64>,
    pub seed: Option<u64>,
}

impl Default for CheckArgs {
    fn default() -> Self {
        CheckArgs {
            direction: Direction::YFixedZToX,
            full_lp: false,
            tol_rank: None,
            tol_verdict: None,
            seed: None,
        }
    }
}

fn oriented_system(
    pmf: &JointPmf,
    direction: Direction,
) -> Result<simcheck_core::simulatability::LinearSystem, CliError> {
    let working = match direction {
        Direction::YFixedZToX => pmf.clone(),
        Direction::XFixedZToY => pmf.swap_xy(),
    };
    Ok(build_system(
        &working.marginal_yz(),
        &working.marginal_yx(),
    )?)
}

pub fn run_check(input: &Path, args: &CheckArgs) -> Result<CheckReport, CliError> {
    let started = Instant::now();
    let pmf = load_pmf(input)?;
    let sys = oriented_system(&pmf, args.direction)?;
    let opts = CheckOptions {
        rank_tol: args.tol_rank,
        verdict_tol: args.tol_verdict.unwrap_or(VERDICT_TOL),
        lp_path: if args.full_lp {
            LpPath::Full
        } else {
            LpPath::Auto
        },
        early_termination: false,
    };
    let verdict = check_system(&sys, &opts)?;
    let total_ms = started.elapsed().as_secs_f64() * 1e3;

    let reason = match verdict.reason {
        VerdictReason::RankMismatch => "rank_mismatch",
        VerdictReason::NegativeHStar => "negative_h_star",
        VerdictReason::HStarZero => "h_star_zero",
    };
    let h_star_sign = match verdict.reason {
        VerdictReason::RankMismatch => None,
        VerdictReason::NegativeHStar => Some("negative".to_string()),
        VerdictReason::HStarZero => Some("zero".to_string()),
    };
    Ok(CheckReport {
        version: version(),
        direction: direction_name(args.direction),
        holds: verdict.holds,
        reason: reason.to_string(),
        rank_a: verdict.rank_a,
        rank_aug: verdict.rank_aug,
        h_star_sign,
        h_star: verdict.h_star,
        m: verdict.trace.m,
        n: verdict.trace.n,
        reduction_used: verdict.trace.reduction_used,
        lp_iterations: verdict.trace.lp_iterations,
        timings: Timings { total_ms },
        tolerances: tolerances(&opts, sys.m(), sys.n()),
        seed: args.seed,
    })
}

fn tolerances(opts: &CheckOptions, m: usize, n: usize) -> Tolerances {
    Tolerances {
        rank_tol: opts.rank_tol.unwrap_or_else(|| default_rank_tol(m, n)),
        verdict_tol: opts.verdict_tol,
        pmf_tol: PMF_TOL,
        lp_tol: FEASIBILITY_TOL,
    }
}

#[derive(Debug, Clone, Default)]
pub struct AttackArgs {
    pub direction: Direction,
    pub cost: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum AttackOutput {
    Channel(AttackReport),
    Refused(AttackRefusal),
}

pub fn parse_cost_flag(flag: &str) -> Result<Vec<f64>, CliError> {
    flag.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::BadFlag(format!("bad cost entry '{part}'")))
        })
        .collect()
}

pub fn run_attack(input: &Path, args: &AttackArgs) -> Result<AttackOutput, CliError> {
    let started = Instant::now();
    let pmf = load_pmf(input)?;
    let sys = oriented_system(&pmf, args.direction)?;
    let request = match &args.cost {
        Some(cost) => AttackRequest::with_cost(&sys, cost.clone()).map_err(cost_error)?,
        None => AttackRequest::new(&sys),
    };
    let opts = CheckOptions::default();
    let tols = tolerances(&opts, sys.m(), sys.n());
    match find_attack_channel(&request) {
        Ok(channel) => {
            let rows = channel.rows();
            let cols = channel.cols();
            let table: Vec<Vec<f64>> = (0..rows)
                .map(|r| (0..cols).map(|j| channel.prob(r, j)).collect())
                .collect();
            let objective = (0..rows)
                .flat_map(|r| (0..cols).map(move |j| (r, j)))
                .map(|(r, j)| request.cost()[r * cols + j] * channel.prob(r, j))
                .sum();
            Ok(AttackOutput::Channel(AttackReport {
                version: version(),
                direction: direction_name(args.direction),
                rows,
                cols,
                channel: table,
                objective,
                cost: request.cost().to_vec(),
                timings: Timings {
                    total_ms: started.elapsed().as_secs_f64() * 1e3,
                },
                tolerances: tols,
            }))
        }
        Err(AttackError::NotSimulatable { certificate }) => {
            Ok(AttackOutput::Refused(AttackRefusal {
                version: version(),
                direction: direction_name(args.direction),
                error: "not_simulatable".to_string(),
                farkas_certificate: certificate,
                tolerances: tols,
            }))
        }
        Err(other) => Err(other.into()),
    }
}

fn cost_error(err: AttackError) -> CliError {
    match err {
        AttackError::DimensionMismatch { expected, actual } => {
            CliError::BadFlag(format!("--cost must list {expected} entries, got {actual}"))
        }
        AttackError::NonPositiveCost { index, value } => CliError::BadFlag(format!(
            "--cost entries must be strictly positive; entry {index} is {value}"
        )),
        other => other.into(),
    }
}

/// Runs the erasure-family verdict over the template's parameter grids and
/// renders `alpha,gamma,holds` CSV rows in grid order.
pub fn run_sweep(template_path: &Path) -> Result<String, CliError> {
    let template = load_template(template_path)?;
    if template.family != "binary_symmetric_erasure" {
        return Err(CliError::BadTemplate(format!(
            "unknown family '{}'",
            template.family
        )));
    }
    let alphas = template.alpha.grid()?;
    let gammas = template.gamma.grid()?;
    for &value in alphas.iter().chain(gammas.iter()) {
        if !(value > 0.0 && value < 1.0) {
            return Err(CliError::BadTemplate(format!(
                "parameters must lie strictly inside (0, 1); got {value}"
            )));
        }
    }

    let mut csv = String::from("alpha,gamma,holds\n");
    for &alpha in &alphas {
        for &gamma in &gammas {
            let pmf = binary_symmetric_erasure(alpha, gamma)?;
            let verdict = simcheck_core::check_simulatability(
                &pmf,
                Direction::YFixedZToX,
                &CheckOptions::default(),
            )?;
            let _ = writeln!(csv, "{alpha},{gamma},{}", verdict.holds);
        }
    }
    Ok(csv)
}
