use std::fmt::Write as _;
use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;
use urn_core::exact::{format_rational, int, Assignment, Rational, Var};
use urn_core::holonomic::{
    eval_forward_traced, guess_bivariate, guess_univariate, theorem1, theorem2, verify_recurrence,
    DataSource, GuessOutcome, GuessSpec, Region, VerificationReport,
};
use urn_core::montecarlo::{significant, simulate, SimConfig};
use urn_core::urnproc::{
    rounds_moments, simple_win_probability, win_probability, Quantity, UrnState, ValueTable,
    Variant, DEFAULT_CELL_CAP,
};

use crate::args::{Cli, Command, Format, GuessArgs, State};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    /// Carries the report, which is still printed.
    #[error("verification failed")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
            CliError::VerificationFailed(_) => 3,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values always serialize")
}

fn check_cells(max_m: u32, max_n: u32) -> Result<(), CliError> {
    let cells = (u64::from(max_m) + 1) * (u64::from(max_n) + 1);
    if cells > DEFAULT_CELL_CAP {
        return Err(CliError::Domain(format!(
            "{cells} table cells exceed the cap of {DEFAULT_CELL_CAP}"
        )));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let format = resolve_format(&cli.command, cli.format)?;
    validate(&cli.command)?;
    execute(&cli.command, format)
}

fn resolve_format(cmd: &Command, requested: Option<Format>) -> Result<Format, CliError> {
    let (name, default, csv) = match cmd {
        Command::Prob(_) => ("prob", Format::Text, false),
        Command::Expect(_) => ("expect", Format::Text, false),
        Command::Table { .. } => ("table", Format::Json, true),
        Command::Simulate { .. } => ("simulate", Format::Json, false),
        Command::Guess(_) => ("guess", Format::Json, false),
        Command::Verify { .. } => ("verify", Format::Json, false),
        Command::Diag { .. } => ("diag", Format::Text, true),
        Command::Bench { .. } => ("bench", Format::Json, false),
    };
    match requested {
        Some(Format::Csv) if !csv => Err(CliError::Usage(format!(
            "--format csv is not available for {name}"
        ))),
        Some(f) => Ok(f),
        None => Ok(default),
    }
}

fn validate(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Prob(s) | Command::Expect(s) => check_cells(s.m, s.n),
        Command::Table { max_m, max_n, .. } => check_cells(*max_m, *max_n),
        Command::Simulate { state, trials, .. } => {
            if *trials == 0 {
                return Err(CliError::Usage("--trials must be positive".into()));
            }
            if state.m == 0 || state.n == 0 {
                return Err(CliError::Domain(format!(
                    "simulation needs both colours, got ({},{})",
                    state.m, state.n
                )));
            }
            Ok(())
        }
        Command::Guess(g) => {
            if g.margin == 0 {
                return Err(CliError::Usage("--margin must be at least 1".into()));
            }
            if g.order == Some(0) {
                return Err(CliError::Usage("--order must be at least 1".into()));
            }
            if g.diagonal {
                check_cells(g.up_to, g.up_to)
            } else {
                check_cells(g.max_m, g.max_n)
            }
        }
        Command::Verify {
            theorem,
            from,
            up_to,
            max_m,
            max_n,
        } => {
            let (lo, hi) = if *theorem == 1 {
                (*from, *max_m)
            } else {
                (*from, *up_to)
            };
            if lo > hi {
                return Err(CliError::Usage(format!("empty range {lo}..={hi}")));
            }
            if *theorem == 1 {
                check_cells(max_m + 4, *max_n)
            } else {
                check_cells(up_to + 3, up_to + 3)
            }
        }
        Command::Diag { up_to, .. } => check_cells(*up_to, *up_to),
        Command::Bench { n, sizes, dp_limit } => {
            if sizes.is_empty() {
                return Err(CliError::Usage("--sizes needs at least one value".into()));
            }
            if *n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            check_cells(*dp_limit, *n)
        }
    }
}

fn execute(cmd: &Command, format: Format) -> Result<String, CliError> {
    match cmd {
        Command::Prob(s) => prob(s, format),
        Command::Expect(s) => expect(s, format),
        Command::Table {
            quantity,
            max_m,
            max_n,
        } => table(*quantity, *max_m, *max_n, format),
        Command::Simulate {
            state,
            trials,
            seed,
            sampler,
        } => {
            let config = SimConfig::new(
                UrnState::new(state.m, state.n),
                state.variant,
                *trials,
                *seed,
            )
            .with_sampler(*sampler);
            let stats = simulate(&config).map_err(domain)?;
            Ok(match format {
                Format::Text => {
                    let f = stats.win_frequency();
                    format!(
                        "{} green wins in {} trials (frequency {})\nmean rounds {} (standard error {})\nvariance {}",
                        stats.green_wins,
                        stats.trials,
                        significant(f),
                        significant(stats.mean_rounds),
                        significant(stats.std_error_mean),
                        significant(stats.variance_rounds),
                    )
                }
                _ => pretty(&stats.to_json()),
            })
        }
        Command::Guess(g) => guess(g, format),
        Command::Verify {
            theorem,
            from,
            up_to,
            max_m,
            max_n,
        } => verify(*theorem, *from, *up_to, *max_m, *max_n, format),
        Command::Diag { quantity, up_to } => {
            let values = ValueTable::build(*quantity, *up_to, *up_to)
                .map_err(domain)?
                .diagonal();
            Ok(match format {
                Format::Text => values
                    .iter()
                    .map(format_rational)
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Csv => {
                    let mut out = String::from("n,value\n");
                    for (k, v) in values.iter().enumerate() {
                        writeln!(out, "{},{}", k + 1, format_rational(v)).unwrap();
                    }
                    out
                }
                Format::Json => pretty(&json!({
                    "quantity": quantity,
                    "values": values.iter().map(format_rational).collect::<Vec<_>>(),
                })),
            })
        }
        Command::Bench { n, sizes, dp_limit } => bench(*n, sizes, *dp_limit, format),
    }
}

fn prob(s: &State, format: Format) -> Result<String, CliError> {
    let p = match s.variant {
        Variant::Returning => win_probability(s.m, s.n),
        Variant::Simple => simple_win_probability(s.m, s.n),
    }
    .map_err(domain)?;
    Ok(match format {
        Format::Json => pretty(&json!({
            "m": s.m,
            "n": s.n,
            "variant": s.variant,
            "probability": format_rational(&p),
        })),
        _ => format_rational(&p),
    })
}

fn expect(s: &State, format: Format) -> Result<String, CliError> {
    let moments = rounds_moments(s.m, s.n, s.variant);
    Ok(match format {
        Format::Json => pretty(&json!({
            "m": s.m,
            "n": s.n,
            "variant": s.variant,
            "expected": format_rational(&moments.expected),
            "second_moment": format_rational(&moments.second_moment),
            "variance": format_rational(&moments.variance()),
        })),
        _ => format_rational(&moments.expected),
    })
}

fn table(quantity: Quantity, max_m: u32, max_n: u32, format: Format) -> Result<String, CliError> {
    let t = ValueTable::build(quantity, max_m, max_n).map_err(domain)?;
    Ok(match format {
        Format::Csv => t.to_csv(),
        Format::Json => pretty(&t.to_json()),
        Format::Text => {
            let mut out = String::new();
            for m in 0..=max_m {
                let row: Vec<String> = (0..=max_n)
                    .map(|n| {
                        t.get(m, n)
                            .map(format_rational)
                            .unwrap_or_else(|| "-".into())
                    })
                    .collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
            out
        }
    })
}

fn guess(g: &GuessArgs, format: Format) -> Result<String, CliError> {
    let outcome = if g.diagonal {
        let spec =
            GuessSpec::univariate(g.order.unwrap_or(3), g.deg_n.unwrap_or(7)).with_margin(g.margin);
        let values = ValueTable::build(g.quantity, g.up_to, g.up_to)
            .map_err(domain)?
            .diagonal();
        guess_univariate(&values, Var::N, 1, &spec)
    } else {
        let (dm, dn) = (g.deg_m.unwrap_or(4), g.deg_n.unwrap_or(3));
        let (ds, dp) = match g.shift {
            Var::M => (dm, dn),
            Var::N => (dn, dm),
        };
        let spec = GuessSpec::bivariate(g.order.unwrap_or(4), ds, dp).with_margin(g.margin);
        let t = ValueTable::build(g.quantity, g.max_m, g.max_n).map_err(domain)?;
        guess_bivariate(&t, &spec, g.shift)
    };
    let payload = match (&outcome, format) {
        (GuessOutcome::Found(r), Format::Text) => r.to_string(),
        (GuessOutcome::Found(r), _) => {
            pretty(&json!({"status": "found", "recurrence": r.to_json()}))
        }
        (GuessOutcome::NotFound, Format::Text) => "not found".to_string(),
        (GuessOutcome::NotFound, _) => pretty(&json!({"status": "not_found"})),
        (
            GuessOutcome::InsufficientData {
                order,
                unknowns,
                equations,
            },
            _,
        ) => {
            return Err(CliError::Domain(format!(
                "insufficient data at order {order}: {unknowns} unknowns plus a margin of {} \
                 need more than the {equations} available equations",
                g.margin
            )));
        }
    };
    Ok(payload)
}

fn verify(
    theorem: u8,
    from: u32,
    up_to: u32,
    max_m: u32,
    max_n: u32,
    format: Format,
) -> Result<String, CliError> {
    let (report, region): (VerificationReport, Value) = if theorem == 1 {
        let t = ValueTable::build(Quantity::ExpectedRounds, max_m + 4, max_n).map_err(domain)?;
        let region = Region::Rect {
            m: i64::from(from)..=i64::from(max_m),
            n: 1..=i64::from(max_n),
        };
        let report =
            verify_recurrence(&theorem1(), DataSource::Table(&t), &region).map_err(domain)?;
        (report, json!({"m": [from, max_m], "n": [1, max_n]}))
    } else {
        let diag = ValueTable::build(Quantity::ExpectedRounds, up_to + 3, up_to + 3)
            .map_err(domain)?
            .diagonal();
        let data = DataSource::Sequence {
            first_index: 1,
            values: &diag,
        };
        let region = Region::Indices(i64::from(from)..=i64::from(up_to));
        let report = verify_recurrence(&theorem2(), data, &region).map_err(domain)?;
        (report, json!({"n": [from, up_to]}))
    };
    let payload = match format {
        Format::Text => match &report.witness {
            None => format!("all {} residuals are zero", report.points_checked),
            Some(w) => format!(
                "residual {} at m = {}, n = {} ({} points checked)",
                format_rational(&w.residual),
                w.m,
                w.n,
                report.points_checked
            ),
        },
        _ => {
            let mut v = report.to_json();
            v["theorem"] = json!(theorem);
            v["region"] = region;
            pretty(&v)
        }
    };
    if report.all_zero() {
        Ok(payload)
    } else {
        Err(CliError::VerificationFailed(payload))
    }
}

/// One row of the benchmark: the table path (if within `dp_limit`) and the
/// recurrence path for `E(m, n)`.
fn bench(n: u32, sizes: &[u32], dp_limit: u32, format: Format) -> Result<String, CliError> {
    let rec = theorem1();
    let params = Assignment::new().with(Var::N, int(n.into()));
    let mut rows = Vec::new();
    for &m in sizes {
        let dp = if m <= dp_limit {
            let start = Instant::now();
            let t = ValueTable::build(Quantity::ExpectedRounds, m, n).map_err(domain)?;
            let secs = start.elapsed().as_secs_f64();
            let cells = (u64::from(m) + 1) * (u64::from(n) + 1);
            Some((t.get(m, n).unwrap().clone(), secs, cells))
        } else {
            None
        };
        let start = Instant::now();
        let seed = ValueTable::build(Quantity::ExpectedRounds, 4, n).map_err(domain)?;
        let initial: Vec<Rational> = (1..=4).map(|k| seed.get(k, n).unwrap().clone()).collect();
        let (value, trace) = if m == 0 {
            (Rational::from_integer(0.into()), Default::default())
        } else {
            eval_forward_traced(&rec, &params, &initial, 1, m.into()).map_err(domain)?
        };
        let secs = start.elapsed().as_secs_f64();
        let agree = dp.as_ref().map(|(v, _, _)| *v == value);
        rows.push((m, dp, secs, trace, agree));
    }
    Ok(match format {
        Format::Text => {
            let mut out = format!(
                "n = {n}\n{:>8} {:>12} {:>10} {:>12} {:>8} {:>6}\n",
                "m", "dp_seconds", "dp_cells", "rec_seconds", "window", "agree"
            );
            for (m, dp, secs, trace, agree) in &rows {
                let (ds, dc) = match dp {
                    Some((_, s, c)) => (format!("{s:.6}"), c.to_string()),
                    None => ("skipped".into(), "-".into()),
                };
                let agree = agree.map_or("-".to_string(), |a| a.to_string());
                writeln!(
                    out,
                    "{m:>8} {ds:>12} {dc:>10} {secs:>12.6} {:>8} {agree:>6}",
                    trace.peak_window
                )
                .unwrap();
            }
            out
        }
        _ => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(m, dp, secs, trace, agree)| {
                    json!({
                        "m": m,
                        "dp": dp.as_ref().map_or(json!("skipped"), |(_, s, c)| json!({"seconds": s, "cells": c})),
                        "recurrence": {"seconds": secs, "steps": trace.steps, "peak_window": trace.peak_window},
                        "agree": agree,
                    })
                })
                .collect();
            pretty(&json!({"n": n, "dp_limit": dp_limit, "rows": rows}))
        }
    })
}
