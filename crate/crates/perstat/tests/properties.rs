//! Property tests for the contract-level invariants of every module.

use proptest::prelude::*;

use perstat::forecast::{evaluate, predict, ForecastConfig, Variant};
use perstat::longterm::{convert_exponents, semivariogram, ExponentKind};
use perstat::models::{simulate, ArmaSpec};
use perstat::shortterm::{
    dwell_stats, fit_markov, gaussian_change_prob, gaussian_pm, master_equation_evolve,
    persistence_expected, persistence_pp, RateMatrix,
};
use perstat::synth::{ffm_powerlaw, generate, GeneratorKind, GeneratorSpec};
use perstat::{
    block_rescale, build_state_sequence, profile, standardize, StateSequence, ThresholdMap,
    TimeSeries,
};

fn ts(values: Vec<f64>) -> TimeSeries {
    TimeSeries::from_values(values).unwrap()
}

fn finite_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0e6..1.0e6f64, 1..max_len)
}

fn state_labels(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..4, 1..max_len)
}

proptest! {
    // series: discretization is total and deterministic, and every output
    // label comes from the map.
    #[test]
    fn state_sequence_total_and_deterministic(
        values in finite_values(120),
        raw_thresholds in prop::collection::vec(-100.0..100.0f64, 0..4),
    ) {
        let mut thresholds = raw_thresholds;
        thresholds.sort_by(f64::total_cmp);
        let labels: Vec<i64> = (0..=thresholds.len() as i64).collect();
        let map = ThresholdMap::new(thresholds, labels).unwrap();
        let x = ts(values);
        let a = build_state_sequence(&x, &map);
        let b = build_state_sequence(&x, &map);
        prop_assert_eq!(a.states(), b.states());
        prop_assert_eq!(a.states().len(), x.len());
        for s in a.states() {
            prop_assert!(map.labels().contains(s));
        }
    }

    // series: block size 1 is the identity and block means preserve the
    // mean of the covered prefix.
    #[test]
    fn block_rescale_identity_and_mean(values in finite_values(200), b in 1usize..20) {
        let x = ts(values);
        prop_assume!(b <= x.len());
        let identity = block_rescale(&x, 1).unwrap();
        prop_assert_eq!(identity.values(), x.values());

        let r = block_rescale(&x, b).unwrap();
        let covered = &x.values()[..(x.len() / b) * b];
        let covered_mean = covered.iter().sum::<f64>() / covered.len() as f64;
        let scale = covered_mean.abs().max(1.0);
        prop_assert!((r.mean() - covered_mean).abs() <= 1e-12 * scale);
    }

    // series: standardizing twice changes nothing beyond 1e-10.
    #[test]
    fn standardize_is_idempotent(values in finite_values(200)) {
        let x = ts(values);
        if let Ok(z1) = standardize(&x) {
            let z2 = standardize(&z1).unwrap();
            for (a, b) in z1.values().iter().zip(z2.values()) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }

    // series: the profile of a constant series is an arithmetic
    // progression.
    #[test]
    fn profile_of_constant_is_arithmetic(c in -100.0..100.0f64, n in 1usize..100) {
        let y = profile(&ts(vec![c; n]));
        for (i, v) in y.values().iter().enumerate() {
            prop_assert!((v - c * (i + 1) as f64).abs() < 1e-9 * (1.0 + c.abs() * n as f64));
        }
    }

    // shortterm: the empirical dwell distribution is a probability
    // distribution for every visited state.
    #[test]
    fn dwell_distribution_sums_to_one(labels in state_labels(150)) {
        let s = StateSequence::from_labels(labels).unwrap();
        for &state in s.alphabet().clone().iter() {
            let pp = persistence_pp(&s, state).unwrap();
            let total: f64 = pp.values().sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "state {}: {}", state, total);
            for p in pp.values() {
                prop_assert!(*p > 0.0 && *p <= 1.0);
            }
        }
    }

    // shortterm: dwell bookkeeping ties out against the sequence length,
    // and PE is the pooled episode mean.
    #[test]
    fn dwell_bookkeeping(labels in state_labels(150)) {
        let s = StateSequence::from_labels(labels).unwrap();
        let d = dwell_stats(&s);
        let total_samples: usize = d.per_state.values().map(|st| st.n_samples).sum();
        prop_assert_eq!(total_samples, s.len());
        let mut freq_sum = 0.0;
        for st in d.per_state.values() {
            prop_assert_eq!(st.episodes.iter().sum::<usize>(), st.n_samples);
            prop_assert_eq!(st.episodes.len(), st.n_visits);
            freq_sum += st.frequency;
        }
        prop_assert!((freq_sum - 1.0).abs() < 1e-12);

        let pooled = d.pooled_episodes();
        let pooled_mean = pooled.iter().sum::<usize>() as f64 / pooled.len() as f64;
        prop_assert!((persistence_expected(&s) - pooled_mean).abs() < 1e-12);
    }

    // shortterm: estimated transition probabilities are row-stochastic.
    #[test]
    fn markov_rows_stochastic(labels in state_labels(150), k in 1usize..4) {
        let s = StateSequence::from_labels(labels).unwrap();
        prop_assume!(s.len() > k);
        let model = fit_markov(&s, k).unwrap();
        let mut rows: std::collections::BTreeMap<Vec<i64>, f64> = std::collections::BTreeMap::new();
        for e in model.entries() {
            *rows.entry(e.history.clone()).or_insert(0.0) += e.prob;
        }
        for (history, row) in rows {
            prop_assert!((row - 1.0).abs() < 1e-12, "history {:?}: {}", history, row);
        }
    }

    // shortterm: PM and change probability share one computation, so they
    // sum to 1 exactly. The two-tail form is a probability only for
    // non-positive drift; mu > epsilon pushes the formula above 1.
    #[test]
    fn gaussian_split_is_exact(
        epsilon in 0.01..10.0f64,
        mu in -5.0..5.0f64,
        sigma in 0.01..10.0f64,
    ) {
        let p = gaussian_change_prob(epsilon, mu, sigma).unwrap();
        let pm = gaussian_pm(epsilon, mu, sigma).unwrap();
        prop_assert_eq!(p + pm, 1.0);
        if mu <= 0.0 {
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    // shortterm: probability mass is conserved by the integrator and no
    // component goes materially negative.
    #[test]
    fn master_equation_conserves_mass(
        r01 in 0.0..5.0f64,
        r10 in 0.0..5.0f64,
        r02 in 0.0..5.0f64,
        r20 in 0.0..5.0f64,
        p0 in 0.05..0.9f64,
    ) {
        let mut rates = RateMatrix::new(3).unwrap();
        rates.set_rate(0, 1, r01).unwrap();
        rates.set_rate(1, 0, r10).unwrap();
        rates.set_rate(0, 2, r02).unwrap();
        rates.set_rate(2, 0, r20).unwrap();
        let init = vec![p0, 1.0 - p0, 0.0];
        let traj = master_equation_evolve(&rates, &init, 2.0, 1e-3).unwrap();
        for probs in &traj.probs {
            let total: f64 = probs.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-8);
            for &p in probs {
                prop_assert!(p >= -1e-10);
            }
        }
    }

    // models: simulation is bit-reproducible for a fixed spec and seed.
    #[test]
    fn simulate_bit_reproducible(a in -0.95..0.95f64, seed in 0u64..1000) {
        let spec = ArmaSpec::standard(vec![a], vec![]).unwrap();
        let x = simulate(&spec, 500, seed).unwrap();
        let y = simulate(&spec, 500, seed).unwrap();
        prop_assert_eq!(x.series.values(), y.series.values());
        prop_assert!(!x.explosive);
    }

    // longterm: semivariogram values are non-negative with a zero origin.
    #[test]
    fn semivariogram_non_negative(values in prop::collection::vec(-100.0..100.0f64, 16..200)) {
        let x = ts(values);
        let k_max = x.len() / 4;
        let sv = semivariogram(&x, k_max).unwrap();
        prop_assert_eq!(sv.gamma[0], 0.0);
        for &g in &sv.gamma {
            prop_assert!(g >= 0.0);
        }
    }

    // longterm: exponent conversions round-trip through every
    // representation.
    #[test]
    fn exponent_round_trips(h in 0.01..1.5f64) {
        for kind in [ExponentKind::H, ExponentKind::Alpha, ExponentKind::Beta, ExponentKind::D] {
            let v = convert_exponents(h, ExponentKind::H, kind).unwrap();
            let back = convert_exponents(v, kind, ExponentKind::H).unwrap();
            prop_assert!((back - h).abs() < 1e-12);
        }
    }

    // synth: every generator is bit-reproducible for a fixed spec.
    #[test]
    fn generators_reproducible(seed in 0u64..500, pick in 0usize..5) {
        let kind = [
            GeneratorKind::GaussianNoise { mu: 0.0, sigma: 1.0 },
            GeneratorKind::UniformNoise { lo: -2.0, hi: 2.0 },
            GeneratorKind::GaussianWalk { mu: 0.0, sigma: 1.0 },
            GeneratorKind::UniformWalk { lo: 0.0, hi: 1.0 },
            GeneratorKind::FfmPowerlaw { beta: 0.6 },
        ][pick];
        let spec = GeneratorSpec { kind, n: 256, seed };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }

    // synth: the Fourier filter standardizes its output.
    #[test]
    fn ffm_output_standardized(beta in 0.0..2.5f64, seed in 0u64..200) {
        let x = ffm_powerlaw(512, beta, seed).unwrap();
        prop_assert!(x.mean().abs() < 1e-10);
        prop_assert!((x.std_dev() - 1.0).abs() < 1e-10);
    }

    // forecast: betweenness, AM-GM ordering, exact half-weight identity,
    // and MAE <= RMSE, all on shared random inputs.
    #[test]
    fn forecast_invariants(
        raw in prop::collection::vec((0.1..100.0f64, 0.1..100.0f64), 8..80),
        k in 1usize..4,
    ) {
        prop_assume!(raw.len() > k);
        let cs = ts(raw.iter().map(|p| p.0).collect());
        let obs = ts(raw.iter().map(|p| p.1).collect());

        let f1 = predict(&ForecastConfig::new(Variant::CsNv1, k).unwrap(), &cs, &obs).unwrap();
        let f2 = predict(
            &ForecastConfig::weighted(Variant::CsNv2, k, 0.5, 0.5).unwrap(),
            &cs,
            &obs,
        )
        .unwrap();
        let f3 = predict(&ForecastConfig::new(Variant::CsNv3, k).unwrap(), &cs, &obs).unwrap();
        let fnv = predict(&ForecastConfig::new(Variant::Nv, k).unwrap(), &cs, &obs).unwrap();

        for i in k..obs.len() {
            let c = cs.values()[i];
            let nv = fnv.predictions[i];
            let lo = c.min(nv);
            let hi = c.max(nv);
            prop_assert!(f1.predictions[i] >= lo - 1e-12 && f1.predictions[i] <= hi + 1e-12);
            prop_assert_eq!(f1.predictions[i].to_bits(), f2.predictions[i].to_bits());
            prop_assert!(f3.predictions[i] <= f1.predictions[i] * (1.0 + 1e-12));
        }

        for f in [&f1, &f3, &fnv] {
            let score = evaluate(f, &obs).unwrap();
            prop_assert!(score.mae <= score.rmse + 1e-12);
        }
    }
}
