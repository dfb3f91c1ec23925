use std::f64::consts::LN_2;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use super::fixtures::{generate_fixture, FixtureParams};
use super::lemma::{lemma1_draws, lemma2_draws, lemma_csv};
use super::{Command, Format, GridArgs, IoArgs, ModeArg, SearchArgs, VariantArg};
use crate::dilution::{
    achievability_curve_iid, converse_bound_level, effective_rate, rate_to_rank, rows_to_csv,
    simulate_dilution, DilutionRow, ScissorsVariant,
};
use crate::entanglement::{
    cost_proxy_minimize, ensemble_from_isometry, eof_minimize, eof_regularized_estimate,
    eof_two_qubit, CostSource, CqExtension, Ensemble, EofOptions, SearchOptions,
};
use crate::error::{Error, Result};
use crate::qcore::io::{format_f64, read_state, state_to_string, StateFile};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::state::{DensityMatrix, PureState};
use crate::spectra::{gamma_grid, gamma_sweep, rate_estimate, CqLevel, SweepMode, SweepSource};

/// Runs one command and returns the text it produces.
pub fn execute(command: &Command) -> Result<String> {
    match command {
        Command::LemmaCheck {
            io,
            draws,
            max_dim,
            lemma,
            n,
        } => lemma_check(io, *draws, *max_dim, *lemma, n),
        Command::SpectralRate {
            io,
            grid,
            reference,
            mode,
            n,
            epsilon,
            estimates,
        } => spectral_rate(io, grid, reference.as_deref(), *mode, n, *epsilon, estimates.as_deref()),
        Command::Eof { io, search } => eof(io, search),
        Command::EofReg { io, search, n } => eof_reg(io, search, n),
        Command::DilutionSim {
            io,
            n,
            rates,
            rank,
            variant,
        } => dilution_sim(io, n, rates, rank, *variant),
        Command::DilutionCurve { io, rates, n } => dilution_curve(io, rates, n),
        Command::Converse { io, grid, rates, n } => converse(io, grid, rates, n),
        Command::CostProxy {
            io,
            search,
            n,
            explicit,
        } => cost_proxy(io, search, n, *explicit),
        Command::Fixture {
            io,
            kind,
            dims,
            p,
            rank,
        } => {
            let dims = match dims.as_slice() {
                [d] => (*d, *d),
                [a, b] => (*a, *b),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "--dims takes one or two values, got {dims:?}"
                    )))
                }
            };
            let params = FixtureParams {
                dims,
                p: *p,
                rank: *rank,
                seed: io.seed,
            };
            state_to_string(&generate_fixture(*kind, &params)?)
        }
    }
}

fn load(io: &IoArgs) -> Result<StateFile> {
    let path = io
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("--input is required".into()))?;
    read_state(path)
}

/// Reads the input as an ensemble: mixed states are split into their
/// eigen-ensemble, pure states become a single member.
fn load_ensemble(io: &IoArgs) -> Result<Ensemble> {
    match load(io)? {
        StateFile::Ensemble(e) => Ok(e),
        StateFile::Pure(psi) => {
            psi.require_split()?;
            Ensemble::single(psi)
        }
        StateFile::Density(rho) => {
            let rank = rho.rank().max(1);
            if rank == 1 {
                let eig = crate::qcore::linalg::hermitian_eig(rho.matrix())?;
                return Ensemble::single(PureState::normalized(
                    eig.vector(0),
                    Some(rho.require_split()?),
                )?);
            }
            ensemble_from_isometry(&rho, &ComplexMatrix::identity(rank), rank)
        }
    }
}

fn load_density(io: &IoArgs) -> Result<DensityMatrix> {
    load(io)?.to_density()
}

fn check_n(n: &[usize]) -> Result<()> {
    if n.is_empty() || n.contains(&0) {
        return Err(Error::InvalidParameter("n values must be non-empty and >= 1".into()));
    }
    Ok(())
}

fn check_finite(name: &str, values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} value {v} is not finite")));
    }
    Ok(())
}

fn grid_of(grid: &GridArgs) -> Result<Vec<f64>> {
    gamma_grid(grid.gamma_min, grid.gamma_max, grid.gamma_step)
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn unit(bits: bool) -> &'static str {
    if bits {
        "bits"
    } else {
        "nats"
    }
}

fn in_unit(x: f64, bits: bool) -> f64 {
    if bits {
        x / LN_2
    } else {
        x
    }
}

fn search_options(search: &SearchArgs, seed: u64) -> EofOptions {
    EofOptions {
        member_count: search.members,
        search: SearchOptions {
            restarts: search.restarts,
            seed,
            max_sweeps: search.max_sweeps,
            ..SearchOptions::default()
        },
    }
}

fn lemma_check(
    io: &IoArgs,
    draws: usize,
    max_dim: usize,
    lemma: Option<u8>,
    n: &[usize],
) -> Result<String> {
    if max_dim == 0 {
        return Err(Error::InvalidParameter("--max-dim must be >= 1".into()));
    }
    check_n(n)?;
    let mut rows = Vec::new();
    match lemma {
        None => {
            rows.extend(lemma1_draws(io.seed, draws, max_dim)?);
            rows.extend(lemma2_draws(io.seed, draws, max_dim, n)?);
        }
        Some(1) => rows.extend(lemma1_draws(io.seed, draws, max_dim)?),
        Some(2) => rows.extend(lemma2_draws(io.seed, draws, max_dim, n)?),
        Some(other) => {
            return Err(Error::InvalidParameter(format!("--lemma must be 1 or 2, got {other}")))
        }
    }
    match io.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(lemma_csv(&rows, io.bits)),
        Format::Json => pretty(&Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "lemma": r.lemma,
                        "draw": r.draw,
                        "dim": r.dim,
                        "n": r.n,
                        format!("gamma_{}", unit(io.bits)): r.gamma.map(|g| in_unit(g, io.bits)),
                        "value": r.value,
                        "bound": r.bound,
                        "margin": r.margin(),
                    })
                })
                .collect(),
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn spectral_rate(
    io: &IoArgs,
    grid: &GridArgs,
    reference: Option<&Path>,
    mode: Option<ModeArg>,
    n: &[usize],
    epsilon: f64,
    estimates_path: Option<&Path>,
) -> Result<String> {
    check_n(n)?;
    let source = match reference {
        Some(path) => SweepSource::Iid {
            rho: load_density(io)?,
            omega: read_state(path)?.to_density()?.matrix().clone(),
        },
        None => SweepSource::IidCq(CqExtension::new(load_ensemble(io)?)),
    };
    let mode = match mode {
        Some(ModeArg::Divergence) => SweepMode::Divergence,
        Some(ModeArg::Conditional) => SweepMode::ConditionalEntropy,
        None if reference.is_some() => SweepMode::Divergence,
        None => SweepMode::ConditionalEntropy,
    };
    let sweep = gamma_sweep(&source, n, &grid_of(grid)?, mode)?;
    let estimates = rate_estimate(&sweep, epsilon)?;
    let bits = io.bits;
    let estimates_json: Vec<Value> = estimates
        .iter()
        .map(|e| {
            json!({
                "n": e.n,
                "unit": unit(bits),
                "gamma_low": in_unit(e.gamma_low, bits),
                "gamma_high": in_unit(e.gamma_high, bits),
                "midpoint": in_unit(e.midpoint, bits),
                "epsilon": e.epsilon,
                "open_low": e.open_low,
                "open_high": e.open_high,
            })
        })
        .collect();
    if let Some(path) = estimates_path {
        fs::write(path, pretty(&Value::Array(estimates_json.clone()))?)?;
    }
    let mode_label = match mode {
        SweepMode::Divergence => "divergence",
        SweepMode::ConditionalEntropy => "conditional-entropy",
    };
    match io.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = format!("n,gamma_{},f_value\n", unit(bits));
            for (n, row) in sweep.n_values.iter().zip(&sweep.f_values) {
                for (g, f) in sweep.gamma_grid.iter().zip(row) {
                    s.push_str(&format!(
                        "{n},{},{}\n",
                        format_f64(in_unit(*g, bits)),
                        format_f64(*f)
                    ));
                }
            }
            Ok(s)
        }
        Format::Json => {
            let rows: Vec<Value> = sweep
                .n_values
                .iter()
                .zip(&sweep.f_values)
                .flat_map(|(n, row)| {
                    sweep
                        .gamma_grid
                        .iter()
                        .zip(row)
                        .map(move |(g, f)| json!({"n": n, "gamma": in_unit(*g, bits), "f_value": f}))
                })
                .collect();
            pretty(&json!({
                "mode": mode_label,
                "unit": unit(bits),
                "sweep": rows,
                "estimates": estimates_json,
            }))
        }
    }
}

fn eof(io: &IoArgs, search: &SearchArgs) -> Result<String> {
    let rho = load_density(io)?;
    let report = eof_minimize(&rho, &search_options(search, io.seed))?;
    let mut v = report.to_json()?;
    if let Ok(reference) = eof_two_qubit(&rho) {
        v["wootters_nats"] = json!(reference);
        v["wootters_bits"] = json!(reference / LN_2);
    }
    pretty(&v)
}

fn eof_reg(io: &IoArgs, search: &SearchArgs, n: &[usize]) -> Result<String> {
    check_n(n)?;
    let rho = load_density(io)?;
    let n_max = *n.iter().max().expect("non-empty");
    let points = eof_regularized_estimate(&rho, n_max, &search_options(search, io.seed))?;
    match io.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from(
                "n,value_per_copy_nats,value_per_copy_bits,member_count,restarts_used,converged\n",
            );
            for p in &points {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    p.n,
                    format_f64(p.value_per_copy),
                    format_f64(p.value_per_copy / LN_2),
                    p.report.member_count,
                    p.report.restarts_used,
                    p.report.converged
                ));
            }
            Ok(s)
        }
        Format::Json => pretty(&Value::Array(
            points
                .iter()
                .map(|p| {
                    Ok(json!({
                        "n": p.n,
                        "value_per_copy_nats": p.value_per_copy,
                        "value_per_copy_bits": p.value_per_copy / LN_2,
                        "report": p.report.to_json()?,
                    }))
                })
                .collect::<Result<_>>()?,
        )),
    }
}

fn variants(v: VariantArg) -> Vec<ScissorsVariant> {
    match v {
        VariantArg::OrthogonalFlag => vec![ScissorsVariant::OrthogonalFlag],
        VariantArg::WeylTeleport => vec![ScissorsVariant::WeylTeleport],
        VariantArg::Both => vec![ScissorsVariant::OrthogonalFlag, ScissorsVariant::WeylTeleport],
    }
}

fn dilution_table(io: &IoArgs, rows: &[DilutionRow]) -> Result<String> {
    match io.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(rows_to_csv(rows)),
        Format::Json => pretty(&Value::Array(rows.iter().map(DilutionRow::to_json).collect())),
    }
}

fn dilution_sim(
    io: &IoArgs,
    n: &[usize],
    rates: &[f64],
    ranks: &[usize],
    variant: VariantArg,
) -> Result<String> {
    check_n(n)?;
    check_finite("rate", rates)?;
    if !rates.is_empty() && !ranks.is_empty() {
        return Err(Error::InvalidParameter("give --rates or --rank, not both".into()));
    }
    let base = load_ensemble(io)?;
    let mut rows = Vec::new();
    for &k in n {
        let ensemble = base.product_power(k)?;
        let local = ensemble.split().min_local();
        let ms: Vec<usize> = if !ranks.is_empty() {
            ranks.to_vec()
        } else if !rates.is_empty() {
            rates
                .iter()
                .map(|&r| {
                    let m = rate_to_rank(k, r);
                    usize::try_from(m).ok().filter(|&m| m <= local).ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "rate {r} at n = {k} needs rank {m} > local dimension {local}"
                        ))
                    })
                })
                .collect::<Result<_>>()?
        } else {
            (1..=local).collect()
        };
        for m in ms {
            for v in variants(variant) {
                let report = simulate_dilution(&ensemble, m, v)?.with_block_length(k)?;
                rows.push(DilutionRow::from(&report));
            }
        }
    }
    dilution_table(io, &rows)
}

fn dilution_curve(io: &IoArgs, rates: &[f64], n: &[usize]) -> Result<String> {
    check_n(n)?;
    check_finite("rate", rates)?;
    let base = load_ensemble(io)?;
    dilution_table(io, &achievability_curve_iid(&base, rates, n)?)
}

/// Bound rows at the rate `ln(M)/n` actually consumed by `M = ceil(e^{nR})`.
fn converse(io: &IoArgs, grid: &GridArgs, rates: &[f64], n: &[usize]) -> Result<String> {
    check_n(n)?;
    check_finite("rate", rates)?;
    if rates.is_empty() {
        return Err(Error::InvalidParameter("rate grid is empty".into()));
    }
    let base = load_ensemble(io)?;
    let cq = CqExtension::new(base.clone());
    let gammas = grid_of(grid)?;
    let bits = io.bits;
    let u = unit(bits);
    let mut s = format!(
        "n,rate_{u},m_rank,effective_rate_{u},gamma_{u},f_value,bound,f2_exact,margin\n"
    );
    let mut json_rows = Vec::new();
    for &k in n {
        let level = CqLevel::iid(&cq, k)?;
        for &r in rates {
            let m = rate_to_rank(k, r);
            let r_eff = effective_rate(k, m);
            let f2 = achievability_curve_iid(&base, &[r_eff], &[k])?[0].f2_formula;
            for &g in &gammas {
                let f = level.conditional_value(g);
                let bound = converse_bound_level(&level, g, r_eff);
                match io.format.unwrap_or(Format::Csv) {
                    Format::Csv => s.push_str(&format!(
                        "{k},{},{m},{},{},{},{},{},{}\n",
                        format_f64(in_unit(r, bits)),
                        format_f64(in_unit(r_eff, bits)),
                        format_f64(in_unit(g, bits)),
                        format_f64(f),
                        format_f64(bound),
                        format_f64(f2),
                        format_f64(bound - f2),
                    )),
                    Format::Json => json_rows.push(json!({
                        "n": k,
                        "unit": u,
                        "rate": in_unit(r, bits),
                        "m_rank": m.to_string(),
                        "effective_rate": in_unit(r_eff, bits),
                        "gamma": in_unit(g, bits),
                        "f_value": f,
                        "bound": if bound.is_finite() { json!(bound) } else { Value::Null },
                        "f2_exact": f2,
                        "margin": if bound.is_finite() { json!(bound - f2) } else { Value::Null },
                    })),
                }
            }
        }
    }
    match io.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(s),
        Format::Json => pretty(&Value::Array(json_rows)),
    }
}

fn cost_proxy(io: &IoArgs, search: &SearchArgs, n: &[usize], explicit: bool) -> Result<String> {
    check_n(n)?;
    if explicit && n.len() != 1 {
        return Err(Error::InvalidParameter("--explicit takes exactly one --n".into()));
    }
    let rho = load_density(io)?;
    let source = if explicit {
        CostSource::Explicit(rho)
    } else {
        CostSource::Iid(rho)
    };
    let opts = search_options(search, io.seed);
    let reports = n
        .iter()
        .map(|&k| cost_proxy_minimize(&source, k, &opts).map(|r| (k, r)))
        .collect::<Result<Vec<_>>>()?;
    match io.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from(
                "n,value_nats,value_bits,member_count,witness_copies,restarts_used,converged\n",
            );
            for (k, r) in &reports {
                s.push_str(&format!(
                    "{k},{},{},{},{},{},{}\n",
                    format_f64(r.value_nats),
                    format_f64(r.value_bits()),
                    r.member_count,
                    r.witness_copies,
                    r.restarts_used,
                    r.converged
                ));
            }
            Ok(s)
        }
        Format::Json => pretty(&Value::Array(
            reports
                .iter()
                .map(|(k, r)| {
                    let mut v = r.to_json()?;
                    v["n"] = json!(k);
                    Ok(v)
                })
                .collect::<Result<_>>()?,
        )),
    }
}
