//! Command dispatch for the `jobmarket` binary.
//!
//! Every command loads a market file, calls into `jobmarket-core` and renders
//! the result as text. Output is deterministic for a given input.

pub mod file;
mod render;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use jobmarket_core::competitive::{
    core_violation, is_core_allocation, max_competitive_salaries, min_competitive_salaries,
    Allocation, CoreConstraintSystem, CoreViolation,
};
use jobmarket_core::kaneko::{
    buyer_core_constraints, ce_constraints, ce_equals_core, ce_prices, ce_vertices,
    core_vertices_in_ce, optimal_buyer_matching, BuyerMarket,
};
use jobmarket_core::maxmin::{enumerate_extremes, maxmin_table};
use jobmarket_core::rational::parse_vector;
use jobmarket_core::solutions::{
    fair_division, has_dominant_diagonal, is_convex_game, is_convex_market, kernel_violation,
    nucleolus, shapley, side_optimal_allocations, tau_value,
};
use jobmarket_core::tight_digraph::{build_tight_digraph, TightDigraph};
use jobmarket_core::{all_optimal_matchings, build_game, optimal_matching, Market, Rational};
use thiserror::Error;

use crate::file::{parse_market, FileError, LoadedMarket};
use crate::render::{Renderer, Table};

#[derive(Debug, Parser)]
#[command(
    name = "jobmarket",
    version,
    about = "Exact solvers for many-to-one assignment markets"
)]
pub struct Cli {
    /// Print numbers as decimals with this many digits instead of exact fractions.
    #[arg(long, global = true, value_name = "DIGITS")]
    pub decimal: Option<usize>,

    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct MarketArg {
    /// Market file (JSON).
    pub market: PathBuf,
}

/// Comma-separated rationals, e.g. `3,2,0` or `9/2,2,11/2,4,2`.
#[derive(Debug, Clone)]
pub struct Payoffs(pub Vec<Rational>);

fn payoffs(text: &str) -> Result<Payoffs, String> {
    parse_vector(text).map(Payoffs).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal matching and its value.
    Match {
        #[command(flatten)]
        file: MarketArg,
        /// List every optimal matching.
        #[arg(long)]
        all: bool,
    },
    /// Core membership.
    #[command(subcommand)]
    Core(CheckCommand),
    /// Minimum or maximum competitive salaries.
    Salaries {
        #[command(flatten)]
        file: MarketArg,
        #[arg(long, conflicts_with = "max", required_unless_present = "max")]
        min: bool,
        #[arg(long)]
        max: bool,
    },
    /// Extreme core allocations from the max-min salary vectors.
    Extremes {
        #[command(flatten)]
        file: MarketArg,
        /// Show the supporting extended orders of each point.
        #[arg(long, conflicts_with_all = ["json", "witnesses"])]
        table: bool,
        #[arg(long, conflicts_with = "witnesses")]
        json: bool,
        /// Every extended order with its max-min vector and core flag.
        #[arg(long)]
        witnesses: bool,
    },
    /// Tight digraph of a salary vector.
    Digraph {
        #[command(flatten)]
        file: MarketArg,
        #[arg(value_parser = payoffs, allow_hyphen_values = true)]
        salaries: Payoffs,
        #[arg(long)]
        dot: bool,
    },
    Nucleolus(MarketArg),
    /// Tau-value.
    Tau(MarketArg),
    Shapley(MarketArg),
    /// Midpoint of the firm-optimal and worker-optimal core allocations.
    FairDivision(MarketArg),
    /// Kernel membership.
    #[command(subcommand)]
    Kernel(CheckCommand),
    /// Dominant-diagonal test and side-optimal allocations.
    DominantDiagonal(MarketArg),
    /// Convexity of the market and of its game.
    Convex(MarketArg),
    /// Buyer-seller markets.
    #[command(subcommand)]
    Kaneko(KanekoCommand),
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Check salaries (one per worker) or a full allocation (firms, then workers).
    Check {
        #[command(flatten)]
        file: MarketArg,
        #[arg(value_parser = payoffs, allow_hyphen_values = true)]
        allocation: Payoffs,
    },
}

#[derive(Debug, Subcommand)]
pub enum KanekoCommand {
    /// Extreme competitive-equilibrium buyer payoffs with their prices.
    Extremes(MarketArg),
    /// Extended tight digraph of a CE buyer payoff vector.
    Digraph {
        #[command(flatten)]
        file: MarketArg,
        #[arg(value_parser = payoffs, allow_hyphen_values = true)]
        payoffs: Payoffs,
        #[arg(long)]
        dot: bool,
    },
    /// Whether core and CE coincide; with payoffs, membership in both.
    CeCheck {
        #[command(flatten)]
        file: MarketArg,
        #[arg(value_parser = payoffs, allow_hyphen_values = true)]
        payoffs: Option<Payoffs>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Market(#[from] jobmarket_core::Error),
    #[error("{0}")]
    Input(String),
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    if let Some(n) = cli.jobs {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match execute(&cli) {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn job_market(file: &MarketArg) -> Result<Market, CliError> {
    match parse_market(&file.market)? {
        LoadedMarket::Job(m) => Ok(m),
        LoadedMarket::Buyers(_) => Err(CliError::Input(format!(
            "{}: this command needs a job-market file",
            file.market.display()
        ))),
    }
}

fn buyer_market(file: &MarketArg) -> Result<BuyerMarket, CliError> {
    match parse_market(&file.market)? {
        LoadedMarket::Buyers(m) => Ok(m),
        LoadedMarket::Job(_) => Err(CliError::Input(format!(
            "{}: kaneko commands need a buyer-seller file",
            file.market.display()
        ))),
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let r = Renderer::new(cli.decimal);
    match &cli.command {
        Command::Match { file, all } => run_match(&r, &job_market(file)?, *all),
        Command::Core(CheckCommand::Check { file, allocation }) => {
            core_check(&r, &job_market(file)?, &allocation.0)
        }
        Command::Salaries { file, min, .. } => {
            let m = job_market(file)?;
            let y = if *min {
                min_competitive_salaries(&m)
            } else {
                max_competitive_salaries(&m)
            };
            let z = CoreConstraintSystem::for_market(&m).allocation(&y)?;
            Ok(format!(
                "salaries {}\nfirm payoffs {}\n",
                r.vector(&z.workers),
                r.vector(&z.firms)
            ))
        }
        Command::Extremes {
            file,
            table,
            json,
            witnesses,
        } => {
            let m = job_market(file)?;
            if *witnesses {
                order_table(&r, &m)
            } else if *json {
                extremes_json(&r, &m)
            } else {
                extremes(&r, &m, *table)
            }
        }
        Command::Digraph {
            file,
            salaries,
            dot,
        } => {
            let m = job_market(file)?;
            let sys = CoreConstraintSystem::for_market(&m);
            let d = build_tight_digraph(&sys, &salaries.0)?;
            Ok(digraph(&d, *dot))
        }
        Command::Nucleolus(file) => {
            let m = job_market(file)?;
            Ok(r.allocation(&nucleolus(&m, &build_game(&m)?)?) + "\n")
        }
        Command::Tau(file) => {
            let m = job_market(file)?;
            Ok(r.allocation(&tau_value(&build_game(&m)?)?) + "\n")
        }
        Command::Shapley(file) => {
            let m = job_market(file)?;
            Ok(r.allocation(&shapley(&build_game(&m)?)) + "\n")
        }
        Command::FairDivision(file) => Ok(r.allocation(&fair_division(&job_market(file)?)?) + "\n"),
        Command::Kernel(CheckCommand::Check { file, allocation }) => {
            kernel_check(&r, &job_market(file)?, &allocation.0)
        }
        Command::DominantDiagonal(file) => dominant_diagonal(&r, &job_market(file)?),
        Command::Convex(file) => {
            let m = job_market(file)?;
            let yes_no = |b: bool| if b { "yes" } else { "no" };
            Ok(format!(
                "convex market: {}\nconvex game: {}\n",
                yes_no(is_convex_market(&m)),
                yes_no(is_convex_game(&build_game(&m)?))
            ))
        }
        Command::Kaneko(KanekoCommand::Extremes(file)) => kaneko_extremes(&r, &buyer_market(file)?),
        Command::Kaneko(KanekoCommand::Digraph { file, payoffs, dot }) => {
            let bm = buyer_market(file)?;
            let sys = ce_constraints(&bm, &optimal_buyer_matching(&bm))?;
            let d = build_tight_digraph(&sys, &payoffs.0)?;
            Ok(digraph(&d, *dot))
        }
        Command::Kaneko(KanekoCommand::CeCheck { file, payoffs }) => ce_check(
            &r,
            &buyer_market(file)?,
            payoffs.as_ref().map(|p| p.0.as_slice()),
        ),
    }
}

fn run_match(r: &Renderer, m: &Market, all: bool) -> Result<String, CliError> {
    let best = optimal_matching(m);
    let mut out = String::new();
    for (i, firm) in m.firms().iter().enumerate() {
        let hired: Vec<&str> = best
            .matching
            .workers_of(i)
            .into_iter()
            .map(|j| m.workers()[j].as_str())
            .collect();
        out += &format!("{}: {}\n", firm.id, hired.join(", "));
    }
    out += &format!("value: {}\n", r.number(&best.value));
    if all {
        let matchings = all_optimal_matchings(m)?;
        out += &format!("optimal matchings: {}\n", matchings.len());
        for mu in matchings {
            let pairs: Vec<String> = mu
                .pairs()
                .iter()
                .map(|&(i, j)| format!("({},{})", m.firms()[i].id, m.workers()[j]))
                .collect();
            out += &format!("  {{{}}}\n", pairs.join(", "));
        }
    }
    Ok(out)
}

/// Salaries alone, or firm payoffs followed by salaries.
fn split_allocation(
    m: &Market,
    sys: &CoreConstraintSystem,
    values: &[Rational],
) -> Result<Allocation, CliError> {
    let (firms, workers) = (m.firm_count(), m.worker_count());
    if values.len() == workers {
        Ok(sys.allocation(values)?)
    } else if values.len() == firms + workers {
        Ok(Allocation::new(
            values[..firms].to_vec(),
            values[firms..].to_vec(),
        ))
    } else {
        Err(CliError::Input(format!(
            "expected {workers} salaries or {} payoffs, got {}",
            firms + workers,
            values.len()
        )))
    }
}

fn core_check(r: &Renderer, m: &Market, values: &[Rational]) -> Result<String, CliError> {
    let sys = CoreConstraintSystem::for_market(m);
    let z = split_allocation(m, &sys, values)?;
    let g = build_game(m)?;
    Ok(match core_violation(&g, &z)? {
        None => format!("in core: yes\nallocation {}\n", r.allocation(&z)),
        Some(CoreViolation::Inefficient { total, value }) => format!(
            "in core: no\nallocation {}\ntotal {} differs from the optimal value {}\n",
            r.allocation(&z),
            r.number(&total),
            r.number(&value)
        ),
        Some(CoreViolation::Blocked { coalition, excess }) => format!(
            "in core: no\nallocation {}\nblocking coalition {} with excess {}\n",
            r.allocation(&z),
            g.describe(coalition),
            r.number(&excess)
        ),
    })
}

fn kernel_check(r: &Renderer, m: &Market, values: &[Rational]) -> Result<String, CliError> {
    let sys = CoreConstraintSystem::for_market(m);
    let z = split_allocation(m, &sys, values)?;
    let g = build_game(m)?;
    let mut out = format!("allocation {}\n", r.allocation(&z));
    match kernel_violation(&g, &z)? {
        None => out.insert_str(0, "in kernel: yes\n"),
        Some((i, j, sij, sji)) => {
            out.insert_str(0, "in kernel: no\n");
            let (a, b) = (&g.names()[i], &g.names()[j]);
            out += &format!(
                "s({a},{b}) = {} but s({b},{a}) = {}\n",
                r.number(&sij),
                r.number(&sji)
            );
        }
    }
    out += &format!(
        "in core: {}\n",
        if is_core_allocation(&g, &z)? {
            "yes"
        } else {
            "no"
        }
    );
    Ok(out)
}

fn header(m: &Market) -> Vec<String> {
    let mut head: Vec<String> = m.firms().iter().map(|f| f.id.clone()).collect();
    head.push("|".into());
    head.extend(m.workers().iter().cloned());
    head
}

fn extremes(r: &Renderer, m: &Market, with_orders: bool) -> Result<String, CliError> {
    let sys = CoreConstraintSystem::for_market(m);
    let set = enumerate_extremes(&sys)?;
    let mut head = header(m);
    if with_orders {
        head.push("|".into());
        head.push("extended orders".into());
    }
    let mut table = Table::new(head);
    if with_orders {
        table = table.left_align_last();
    }
    for p in &set.points {
        let mut row: Vec<String> = p.allocation.firms.iter().map(|v| r.number(v)).collect();
        row.push("|".into());
        row.extend(p.allocation.workers.iter().map(|v| r.number(v)));
        if with_orders {
            row.push("|".into());
            row.push(
                p.witnesses
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
            );
        }
        table.push(row);
    }
    Ok(format!(
        "{}{} extreme points from {} of {} extended orders\n",
        table.render(),
        set.len(),
        set.in_core_orders(),
        set.orders
    ))
}

fn extremes_json(r: &Renderer, m: &Market) -> Result<String, CliError> {
    let sys = CoreConstraintSystem::for_market(m);
    let set = enumerate_extremes(&sys)?;
    let strings = |v: &[Rational]| v.iter().map(|x| r.number(x)).collect::<Vec<_>>();
    let points: Vec<serde_json::Value> = set
        .points
        .iter()
        .map(|p| {
            serde_json::json!({
                "firms": strings(&p.allocation.firms),
                "workers": strings(&p.allocation.workers),
                "orders": p.witnesses.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = serde_json::json!({
        "firms": m.firms().iter().map(|f| f.id.clone()).collect::<Vec<_>>(),
        "workers": m.workers(),
        "orders": set.orders,
        "in_core_orders": set.in_core_orders(),
        "extremes": points,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("plain JSON values") + "\n")
}

fn order_table(r: &Renderer, m: &Market) -> Result<String, CliError> {
    let sys = CoreConstraintSystem::for_market(m);
    let rows = maxmin_table(&sys)?;
    let mut head = vec!["order".to_string(), "|".into()];
    head.extend(m.workers().iter().cloned());
    head.push("|".into());
    head.push("in core".into());
    let mut table = Table::new(head);
    for row in &rows {
        let mut cells = vec![row.order.to_string(), "|".into()];
        cells.extend(sys.project(&row.salaries).iter().map(|v| r.number(v)));
        cells.push("|".into());
        cells.push(if row.in_core { "+" } else { "-" }.into());
        table.push(cells);
    }
    let in_core = rows.iter().filter(|row| row.in_core).count();
    Ok(format!(
        "{}{in_core} of {} extended orders in core\n",
        table.render(),
        rows.len()
    ))
}

fn digraph(d: &TightDigraph, dot: bool) -> String {
    if dot {
        return d.to_dot();
    }
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let arcs: Vec<String> = d
        .arcs()
        .iter()
        .map(|a| format!("{} -> {}", a.from, a.to))
        .collect();
    format!(
        "arcs: {}\nextreme: {}\nminimum: {}\nmaximum: {}\n",
        arcs.join(", "),
        yes_no(d.is_connected()),
        yes_no(d.is_zero_sourced()),
        yes_no(d.is_zero_sinked())
    )
}

fn dominant_diagonal(r: &Renderer, m: &Market) -> Result<String, CliError> {
    let dd = has_dominant_diagonal(m)?;
    if !dd.holds {
        let reason = match (dd.bundle_failure, dd.column_failure) {
            (Some(i), _) => format!("{} does not hold its best bundle", m.firms()[i].id),
            (None, Some((i, j))) => {
                format!("{} is worth more to {}", m.workers()[j], m.firms()[i].id)
            }
            (None, None) => unreachable!("a failing test names its reason"),
        };
        return Ok(format!("dominant diagonal: no ({reason})\n"));
    }
    let (firm_best, worker_best) = side_optimal_allocations(m)?;
    Ok(format!(
        "dominant diagonal: yes\nfirm-optimal {}\nworker-optimal {}\n",
        r.allocation(&firm_best),
        r.allocation(&worker_best)
    ))
}

fn kaneko_extremes(r: &Renderer, bm: &BuyerMarket) -> Result<String, CliError> {
    let ce = ce_vertices(bm)?;
    let mut head: Vec<String> = bm.buyers().to_vec();
    head.push("|".into());
    head.extend(bm.sellers().iter().map(|s| format!("p({})", s.id)));
    head.push("|".into());
    head.extend(bm.sellers().iter().map(|s| s.id.clone()));
    let mut table = Table::new(head);
    for p in &ce.points {
        let mut row: Vec<String> = p.buyers.iter().map(|v| r.number(v)).collect();
        row.push("|".into());
        row.extend(p.prices.iter().map(|v| r.number(v)));
        row.push("|".into());
        row.extend(p.sellers.iter().map(|v| r.number(v)));
        table.push(row);
    }
    Ok(format!(
        "{}{} extreme CE payoff vectors\nmax-min orders agree: {}\n",
        table.render(),
        ce.points.len(),
        if ce.maxmin_agrees { "yes" } else { "no" }
    ))
}

fn ce_check(r: &Renderer, bm: &BuyerMarket, x: Option<&[Rational]>) -> Result<String, CliError> {
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let mut out = format!(
        "sufficient condition for core = CE: {}\ncore vertices all in CE: {}\n",
        yes_no(ce_equals_core(bm)),
        yes_no(core_vertices_in_ce(bm)?)
    );
    if let Some(x) = x {
        if x.len() != bm.buyer_count() {
            return Err(CliError::Input(format!(
                "expected {} buyer payoffs, got {}",
                bm.buyer_count(),
                x.len()
            )));
        }
        let mu = optimal_buyer_matching(bm);
        let core = buyer_core_constraints(bm, &mu)?;
        let ce = ce_constraints(bm, &mu)?;
        out += &format!("payoffs {}\n", r.vector(x));
        out += &format!("in core: {}\n", yes_no(core.contains(x)?));
        match ce_prices(&ce, x) {
            Ok(prices) => out += &format!("in CE: yes\nprices {}\n", r.vector(&prices)),
            Err(jobmarket_core::Error::NotInCore) => out += "in CE: no\n",
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}
