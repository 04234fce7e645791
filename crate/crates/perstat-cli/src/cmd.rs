//! Per-subcommand handlers.
//!
//! Each handler reads its inputs, calls the library, writes any `--out`
//! artifact, and returns an [`Outcome`] from which the caller prints the
//! stdout summary and writes the manifest. Handlers never print.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Result;
use serde_json::{json, Value};

use perstat::forecast;
use perstat::longterm;
use perstat::models;
use perstat::series::{
    block_rescale, build_state_sequence, StateSequence, ThresholdMap, TimeSeries,
};
use perstat::shortterm;
use perstat::synth;

use crate::args::EstimatorKind;
use crate::io::{self, fmt_f64};
use crate::UsageError;
use crate::{
    AcfArgs, Command, CrossoverArgs, DfaArgs, EfoldArgs, ForecastArgs, InputOpt, MarkovArgs,
    MasterArgs, MetricsArgs, MfdfaArgs, PsdArgs, RescaleArgs, RsArgs, SemivarArgs, StatesArgs,
    SynthArgs, WaveletArgs,
};

/// What a handler produced; the dispatcher turns this into the stdout
/// summary and the manifest.
pub struct Outcome {
    /// JSON summary printed to stdout.
    pub summary: Value,
    /// Artifacts written, primary first. Empty when no `--out` was given
    /// (then no manifest is written either).
    pub outputs: Vec<PathBuf>,
    /// Input path -> SHA-256 content digest.
    pub inputs: BTreeMap<String, String>,
    /// Master seed for randomized subcommands.
    pub seed: Option<u64>,
    /// Defaults and data-derived values the run actually used.
    pub resolved: Value,
}

/// Dispatches a parsed subcommand. `replay` is handled by the caller.
pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::States(a) => states(a),
        Command::Metrics(a) => metrics(a),
        Command::Markov(a) => markov(a),
        Command::Dfa(a) => dfa(a),
        Command::Mfdfa(a) => mfdfa(a),
        Command::Rs(a) => rs(a),
        Command::Wavelet(a) => wavelet(a),
        Command::Acf(a) => acf(a),
        Command::Semivar(a) => semivar(a),
        Command::Psd(a) => psd(a),
        Command::Efold(a) => efold(a),
        Command::Master(a) => master(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Rescale(a) => rescale(a),
        Command::Forecast(a) => forecast_cmd(a),
        Command::Crossover(a) => crossover(a),
        Command::Replay(_) => unreachable!("replay is dispatched before execute"),
    }
}

/// A numeric column loaded as a series, plus its provenance.
struct Loaded {
    series: TimeSeries,
    inputs: BTreeMap<String, String>,
    column: String,
}

fn load_series(input: &InputOpt, tau: f64) -> Result<Loaded> {
    let table = io::read_table(&input.input)?;
    let index = table.column_index(&input.col)?;
    let column = table.headers[index].clone();
    let values = table.f64_column(&input.col)?;
    let series = TimeSeries::new(values, tau, column.clone())?;
    Ok(Loaded {
        series,
        inputs: BTreeMap::from([(table.path, table.digest)]),
        column,
    })
}

fn load_states(input: &InputOpt) -> Result<(StateSequence, BTreeMap<String, String>, String)> {
    let table = io::read_table(&input.input)?;
    let index = table.column_index(&input.col)?;
    let column = table.headers[index].clone();
    let labels = table.i64_column(&input.col)?;
    let sequence = StateSequence::from_labels(labels)?;
    Ok((
        sequence,
        BTreeMap::from([(table.path, table.digest)]),
        column,
    ))
}

/// Writes pretty JSON with a trailing newline.
fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| anyhow::anyhow!("cannot write output {}: {e}", path.display()))
}

/// An infinite value has no JSON number; keep it textual and exact.
fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn indexed_csv(path: &Path, header: &str, values: impl Iterator<Item = String>) -> Result<()> {
    io::write_csv(
        path,
        header,
        values.enumerate().map(|(i, v)| format!("{i},{v}")),
    )
}

fn states(a: &StatesArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, 1.0)?;
    let labels = a
        .labels
        .clone()
        .unwrap_or_else(|| (0..=a.thresholds.len() as i64).collect());
    let map = ThresholdMap::new(a.thresholds.clone(), labels)
        .map_err(|e| UsageError(format!("--thresholds/--labels: {e}")))?;
    let sequence = build_state_sequence(&loaded.series, &map);
    let mut counts: BTreeMap<i64, usize> = map.labels().iter().map(|&l| (l, 0)).collect();
    for &s in sequence.states() {
        *counts.get_mut(&s).expect("classified label is in the map") += 1;
    }
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        indexed_csv(
            out,
            "index,state",
            sequence.states().iter().map(|s| s.to_string()),
        )?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary: json!({
            "n": sequence.len(),
            "n_states": map.n_states(),
            "counts": counts,
            "column": loaded.column,
        }),
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({"n": sequence.len(), "column": loaded.column}),
    })
}

fn metrics(a: &MetricsArgs) -> Result<Outcome> {
    let (sequence, inputs, column) = load_states(&a.input)?;
    let stats = shortterm::dwell_stats(&sequence);
    let burst = shortterm::persistence_burst(&sequence);
    let pm = shortterm::persistence_markov(&sequence)?;
    let mut pp: BTreeMap<i64, BTreeMap<usize, f64>> = BTreeMap::new();
    for &state in sequence.alphabet() {
        pp.insert(state, shortterm::persistence_pp(&sequence, state)?);
    }
    let dwell: BTreeMap<i64, Value> = stats
        .per_state
        .iter()
        .map(|(&state, d)| {
            (
                state,
                json!({
                    "n_visits": d.n_visits,
                    "n_samples": d.n_samples,
                    "mean_dwell": d.mean_dwell,
                    "max_dwell": d.max_dwell,
                    "frequency": d.frequency,
                }),
            )
        })
        .collect();
    let summary = json!({
        "n": sequence.len(),
        "n_states": sequence.alphabet().len(),
        "PE": shortterm::persistence_expected(&sequence),
        "Pb": burst.per_state,
        "Pb_max": burst.p_max,
        "Pb_S": burst.p_sum,
        "PP": pp,
        "PM": pm,
        "dwell": dwell,
    });
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        write_json(out, &summary)?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary,
        outputs,
        inputs,
        seed: None,
        resolved: json!({"n": sequence.len(), "column": column}),
    })
}

fn markov(a: &MarkovArgs) -> Result<Outcome> {
    let (sequence, inputs, column) = load_states(&a.input)?;
    let model = shortterm::fit_markov(&sequence, a.order)?;
    let model_json = serde_json::to_value(model.to_json_model())?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        write_json(out, &model_json)?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary: model_json,
        outputs,
        inputs,
        seed: None,
        resolved: json!({
            "n": sequence.len(),
            "column": column,
            "n_histories": model.n_histories(),
        }),
    })
}

fn scaling_csv(path: &Path, result: &longterm::ScalingResult) -> Result<()> {
    io::write_csv(
        path,
        "s,F",
        result
            .scales
            .iter()
            .zip(&result.fluctuations)
            .map(|(s, f)| format!("{s},{}", fmt_f64(*f))),
    )
}

fn scaling_summary(result: &longterm::ScalingResult, extra: &[(&str, Value)]) -> Value {
    let mut summary = json!({
        "exponent": result.exponent,
        "fit_range": result.fit_range,
        "residual_sse": result.residual_sse,
        "n_scales": result.scales.len(),
    });
    if let Some(crossover) = &result.crossover {
        summary["crossover"] = json!(crossover);
    }
    for (key, value) in extra {
        summary[*key] = value.clone();
    }
    summary
}

fn dfa(a: &DfaArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, 1.0)?;
    let scales = a.scales.resolve(loaded.series.len(), a.order)?;
    let result = longterm::dfa(&loaded.series, &scales, a.order)?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        scaling_csv(out, &result)?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary: scaling_summary(
            &result,
            &[
                ("alpha", json!(result.exponent)),
                ("order", json!(a.order)),
                ("n", json!(loaded.series.len())),
            ],
        ),
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({
            "n": loaded.series.len(),
            "column": loaded.column,
            "scales": result.scales,
        }),
    })
}

fn mfdfa(a: &MfdfaArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, 1.0)?;
    let scales = a.scales.resolve(loaded.series.len(), a.order)?;
    let result = longterm::mfdfa(&loaded.series, &scales, a.qs.values(), a.order)?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        let rows = result.qs.iter().enumerate().flat_map(|(qi, q)| {
            let fq = &result.fq[qi];
            result
                .scales
                .iter()
                .zip(fq)
                .map(move |(s, f)| format!("{s},{},{}", fmt_f64(*f), fmt_f64(*q)))
        });
        io::write_csv(out, "s,F,q", rows)?;
        outputs.push(out.clone());
    }
    let mut summary = json!({
        "qs": result.qs,
        "h": result.h,
        "order": a.order,
        "n": loaded.series.len(),
        "n_scales": result.scales.len(),
        "n_excluded_segments": result.n_excluded_segments,
    });
    if let Some(h2) = result.h_of(2.0) {
        summary["alpha"] = json!(h2);
    }
    Ok(Outcome {
        summary,
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({
            "n": loaded.series.len(),
            "column": loaded.column,
            "scales": result.scales,
            "qs": result.qs,
        }),
    })
}

fn rs(a: &RsArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, 1.0)?;
    // R/S needs windows of at least 8 samples; order 2 gives the same
    // floor as the DFA default grid.
    let scales = a.scales.resolve(loaded.series.len(), 2)?;
    let result = longterm::hurst_rs(&loaded.series, &scales)?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        scaling_csv(out, &result)?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary: scaling_summary(
            &result,
            &[
                ("H", json!(result.exponent)),
                ("n", json!(loaded.series.len())),
            ],
        ),
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({
            "n": loaded.series.len(),
            "column": loaded.column,
            "scales": result.scales,
        }),
    })
}

fn wavelet(a: &WaveletArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, 1.0)?;
    let n = loaded.series.len();
    let series = if n.is_power_of_two() {
        loaded.series
    } else {
        longterm::truncate_pow2(&loaded.series)?
    };
    let n_used = series.len();
    let result = longterm::wavelet_beta(&series)?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        io::write_csv(
            out,
            "level,variance",
            result
                .levels
                .iter()
                .zip(&result.variances)
                .map(|(l, v)| format!("{l},{}", fmt_f64(*v))),
        )?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary: json!({
            "beta": result.beta,
            "n": n,
            "n_used": n_used,
            "n_levels": result.levels.len(),
        }),
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({"n": n, "n_used": n_used, "column": loaded.column}),
    })
}

fn default_kmax(n: usize) -> usize {
    (n / 4).clamp(1, 100)
}

fn acf(a: &AcfArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, 1.0)?;
    let k_max = a.kmax.unwrap_or_else(|| default_kmax(loaded.series.len()));
    let r = longterm::acf(&loaded.series, k_max)?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        indexed_csv(out, "lag,r", r.iter().map(|v| fmt_f64(*v)))?;
        outputs.push(out.clone());
    }
    let mut summary = json!({
        "k_max": k_max,
        "n": loaded.series.len(),
    });
    if let Some(r1) = r.get(1) {
        summary["r1"] = json!(r1);
    }
    Ok(Outcome {
        summary,
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({
            "n": loaded.series.len(),
            "column": loaded.column,
            "k_max": k_max,
        }),
    })
}

fn semivar(a: &SemivarArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, 1.0)?;
    let k_max = a.kmax.unwrap_or_else(|| default_kmax(loaded.series.len()));
    let result = longterm::semivariogram(&loaded.series, k_max)?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        io::write_csv(
            out,
            "lag,gamma",
            result
                .lags
                .iter()
                .zip(&result.gamma)
                .map(|(l, g)| format!("{l},{}", fmt_f64(*g))),
        )?;
        outputs.push(out.clone());
    }
    let mut summary = json!({
        "k_max": k_max,
        "n": loaded.series.len(),
        "hausdorff": result.hausdorff,
    });
    if let Some(h) = result.hausdorff {
        // Spectral strength via the Hausdorff exponent: beta = 2H + 1.
        summary["beta"] = json!(2.0 * h + 1.0);
    }
    Ok(Outcome {
        summary,
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({
            "n": loaded.series.len(),
            "column": loaded.column,
            "k_max": k_max,
        }),
    })
}

fn psd(a: &PsdArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, 1.0)?;
    let (freqs, power) = longterm::periodogram(&loaded.series)?;
    let beta = longterm::psd_beta(&loaded.series, a.fit_fraction)?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        io::write_csv(
            out,
            "f,S",
            freqs
                .iter()
                .zip(&power)
                .map(|(f, s)| format!("{},{}", fmt_f64(*f), fmt_f64(*s))),
        )?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary: json!({
            "beta": beta,
            "fit_fraction": a.fit_fraction,
            "n_freqs": freqs.len(),
            "n": loaded.series.len(),
        }),
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({
            "n": loaded.series.len(),
            "column": loaded.column,
            "n_freqs": freqs.len(),
        }),
    })
}

fn efold(a: &EfoldArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, a.tau)?;
    let a_hat = models::fit_ar1(&loaded.series)?;
    let t_e = models::efolding_from_series(&loaded.series)?;
    let summary = json!({
        "a_hat": a_hat,
        "T_e": json_f64(t_e),
        "tau": a.tau,
        "n": loaded.series.len(),
    });
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        write_json(out, &summary)?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary,
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({"n": loaded.series.len(), "column": loaded.column}),
    })
}

fn master(a: &MasterArgs) -> Result<Outcome> {
    // Every master input is a flag, so failures are usage errors.
    let mut rates = shortterm::RateMatrix::new(a.rates.n_states())
        .map_err(|e| UsageError(format!("--rates: {e}")))?;
    for &(from, to, rate) in a.rates.entries() {
        rates
            .set_rate(from, to, rate)
            .map_err(|e| UsageError(format!("--rates: {e}")))?;
    }
    let trajectory = shortterm::master_equation_evolve(&rates, &a.p0, a.t_end, a.dt)
        .map_err(|e| UsageError(format!("master equation: {e}")))?;
    let n_states = a.rates.n_states();
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        let header = std::iter::once("t".to_string())
            .chain((0..n_states).map(|i| format!("p{i}")))
            .collect::<Vec<_>>()
            .join(",");
        let rows = trajectory
            .times
            .iter()
            .zip(&trajectory.probs)
            .map(|(t, p)| {
                std::iter::once(fmt_f64(*t))
                    .chain(p.iter().map(|v| fmt_f64(*v)))
                    .collect::<Vec<_>>()
                    .join(",")
            });
        io::write_csv(out, &header, rows)?;
        outputs.push(out.clone());
    }
    let mass_error = trajectory
        .probs
        .iter()
        .map(|p| (p.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(Outcome {
        summary: json!({
            "n_states": n_states,
            "t_end": a.t_end,
            "dt": a.dt,
            "n_times": trajectory.times.len(),
            "p_final": trajectory.probs.last(),
            "mass_error": mass_error,
        }),
        outputs,
        inputs: BTreeMap::new(),
        seed: None,
        resolved: json!({"n_times": trajectory.times.len()}),
    })
}

fn synth_cmd(a: &SynthArgs) -> Result<Outcome> {
    let (series, seed, source, explosive) = match (&a.spec, &a.arma) {
        (Some(spec), None) => (synth::generate(spec)?, spec.seed, json!(spec), false),
        (None, Some(arma)) => {
            let n =
                a.n.ok_or_else(|| UsageError("--arma requires --n".into()))?;
            let seed = a
                .seed
                .ok_or_else(|| UsageError("--arma requires --seed".into()))?;
            let sim = models::simulate(arma, n, seed)?;
            (sim.series, seed, json!(arma), sim.explosive)
        }
        // clap's "source" group guarantees exactly one is present.
        _ => unreachable!("synth source group"),
    };
    indexed_csv(
        &a.out,
        "index,value",
        series.values().iter().map(|v| fmt_f64(*v)),
    )?;
    let mut summary = json!({
        "n": series.len(),
        "seed": seed,
        "mean": series.mean(),
        "std": series.std_dev(),
    });
    if explosive {
        summary["explosive"] = json!(true);
    }
    Ok(Outcome {
        summary,
        outputs: vec![a.out.clone()],
        inputs: BTreeMap::new(),
        seed: Some(seed),
        resolved: json!({"source": source, "n": series.len()}),
    })
}

fn rescale(a: &RescaleArgs) -> Result<Outcome> {
    if a.block == 0 {
        return Err(UsageError("--block must be at least 1".into()).into());
    }
    let loaded = load_series(&a.input, a.tau)?;
    let rescaled = block_rescale(&loaded.series, a.block)?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        indexed_csv(
            out,
            "index,value",
            rescaled.values().iter().map(|v| fmt_f64(*v)),
        )?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary: json!({
            "n_in": loaded.series.len(),
            "n_out": rescaled.len(),
            "block": a.block,
            "sample_period_out": rescaled.sample_period(),
        }),
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({
            "n_in": loaded.series.len(),
            "n_out": rescaled.len(),
            "column": loaded.column,
        }),
    })
}

fn forecast_cmd(a: &ForecastArgs) -> Result<Outcome> {
    let table = io::read_table(&a.input)?;
    let timestamps = table.str_column(&a.timestamp_col)?;
    let irradiance = table.f64_column(&a.irradiance_col)?;
    let clearsky = table.f64_column(&a.clearsky_col)?;
    let obs = TimeSeries::new(irradiance, 1.0, "irradiance")?;
    let cs = TimeSeries::new(clearsky, 1.0, "clearsky")?;
    let config = forecast::ForecastConfig::weighted(a.variant, a.k, a.alpha, a.beta)
        .map_err(|e| UsageError(format!("--variant/--k/--alpha/--beta: {e}")))?;
    let prediction = forecast::predict(&config, &cs, &obs)?;
    let score = forecast::evaluate(&prediction, &obs)?;
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        let rows = timestamps
            .iter()
            .zip(&prediction.predictions)
            .zip(&prediction.valid)
            .map(|((ts, p), v)| format!("{ts},{},{v}", fmt_f64(*p)));
        io::write_csv(out, "timestamp,prediction,valid", rows)?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary: json!({
            "variant": a.variant.name(),
            "k": a.k,
            "alpha": a.alpha,
            "beta": a.beta,
            "mae": score.mae,
            "rmse": score.rmse,
            "n_valid": score.n_valid,
            "n_invalid": score.n_invalid,
            "n": prediction.predictions.len(),
        }),
        outputs,
        inputs: BTreeMap::from([(table.path, table.digest)]),
        seed: None,
        resolved: json!({"n": prediction.predictions.len()}),
    })
}

fn crossover(a: &CrossoverArgs) -> Result<Outcome> {
    let loaded = load_series(&a.input, 1.0)?;
    let scales = match a.estimator {
        EstimatorKind::Dfa => a.scales.resolve(loaded.series.len(), a.order)?,
        EstimatorKind::Rs => a.scales.resolve(loaded.series.len(), 2)?,
    };
    let mut result = match a.estimator {
        EstimatorKind::Dfa => longterm::dfa(&loaded.series, &scales, a.order)?,
        EstimatorKind::Rs => longterm::hurst_rs(&loaded.series, &scales)?,
    };
    let fitted = longterm::crossover_fit(&result)?;
    result.crossover = Some(fitted);
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        scaling_csv(out, &result)?;
        outputs.push(out.clone());
    }
    Ok(Outcome {
        summary: scaling_summary(
            &result,
            &[
                ("estimator", json!(a.estimator.to_string())),
                ("s_star", json!(fitted.s_star)),
                ("alpha1", json!(fitted.alpha1)),
                ("alpha2", json!(fitted.alpha2)),
                ("n", json!(loaded.series.len())),
            ],
        ),
        outputs,
        inputs: loaded.inputs,
        seed: None,
        resolved: json!({
            "n": loaded.series.len(),
            "column": loaded.column,
            "scales": result.scales,
        }),
    })
}
