use std::collections::BTreeMap;

use proptest::prelude::*;
use upsell_core::influence::PersuasionPrinciple;
use upsell_experiment::{
    run_experiment, simulate_population, uplift, HarnessError, HttpPipeline, InProcessPipeline, MixEntry,
    SimConfig,
};

fn run(config: &SimConfig) -> upsell_experiment::ExperimentReport {
    let mut pipeline = InProcessPipeline::new(&config.taxonomy, config.seed).unwrap();
    run_experiment(config, &mut pipeline).unwrap()
}

#[test]
fn null_runs_are_calibrated() {
    let mut false_positives = 0;
    let (mut control, mut treatment) = ((0, 0), (0, 0));
    for seed in 1..=100 {
        let report = run(&SimConfig::new(4_000, 0.05, 1.0, seed));
        false_positives += usize::from(report.p_value < 0.05);
        control = (control.0 + report.control.conversions, control.1 + report.control.impressions);
        treatment = (treatment.0 + report.treatment.conversions, treatment.1 + report.treatment.impressions);
    }
    assert!(false_positives <= 10, "{false_positives} false positives");
    let pooled = uplift(
        control.0 as f64 / control.1 as f64,
        treatment.0 as f64 / treatment.1 as f64,
    )
    .unwrap();
    assert!(pooled.abs() < 0.03, "pooled null uplift {pooled}");
}

#[test]
fn uplift_grows_with_the_multiplier() {
    let uplifts: Vec<f64> = [1.0, 1.5, 2.0, 3.0]
        .into_iter()
        .map(|m| run(&SimConfig::new(20_000, 0.05, m, 5)).uplift.unwrap())
        .collect();
    assert!(uplifts.windows(2).all(|w| w[0] <= w[1]), "{uplifts:?}");
    assert!(uplifts[3] > uplifts[0]);
}

#[test]
fn reports_are_reproducible() {
    let config = SimConfig::new(3_000, 0.08, 2.0, 77);
    let a = run(&config).to_json();
    assert_eq!(a, run(&config).to_json());
    let other = SimConfig { seed: 78, ..config };
    assert_ne!(a, run(&other).to_json());
}

#[test]
fn category_mix_is_followed() {
    let mut config = SimConfig::new(10_000, 0.05, 2.0, 3);
    config.category_mix = vec![
        MixEntry { sub_emotion: "Urgency".into(), principle: PersuasionPrinciple::Scarcity, weight: 0.7 },
        MixEntry { sub_emotion: "Curiosity".into(), principle: PersuasionPrinciple::Liking, weight: 0.3 },
    ];
    let population = simulate_population(&config).unwrap();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for guest in &population.guests {
        *counts.entry(guest.category.sub_emotion.clone()).or_default() += 1;
    }
    let share = |name: &str| counts.get(name).copied().unwrap_or(0) as f64 / 10_000.0;
    assert!((share("Urgency") - 0.7).abs() <= 0.02, "{counts:?}");
    assert!((share("Curiosity") - 0.3).abs() <= 0.02, "{counts:?}");
    assert_eq!(counts.len(), 2);

    config.category_mix.truncate(1);
    let population = simulate_population(&config).unwrap();
    assert!(population.guests.iter().all(|g| g.category.sub_emotion == "Urgency"
        && g.category.principle == PersuasionPrinciple::Scarcity
        && g.category.emotion == "Fear"));
}

#[test]
fn uniform_mix_covers_the_grid() {
    let population = simulate_population(&SimConfig::new(10_000, 0.05, 2.0, 8)).unwrap();
    let mut counts: BTreeMap<(String, PersuasionPrinciple), usize> = BTreeMap::new();
    for guest in &population.guests {
        *counts.entry((guest.category.sub_emotion.clone(), guest.category.principle)).or_default() += 1;
    }
    assert_eq!(counts.len(), 90);
    for n in counts.values() {
        assert!((*n as f64 / 10_000.0 - 1.0 / 90.0).abs() <= 0.02);
    }
}

#[test]
fn guests_do_not_depend_on_population_size() {
    let small = simulate_population(&SimConfig::new(500, 0.05, 2.0, 21)).unwrap();
    let large = simulate_population(&SimConfig::new(5_000, 0.05, 2.0, 21)).unwrap();
    assert_eq!(small.guests[..], large.guests[..500]);
}

#[test]
fn unreachable_service() {
    // Port 9 (discard) is essentially never served on loopback.
    let mut pipeline = HttpPipeline::new("http://127.0.0.1:9").unwrap();
    let err = run_experiment(&SimConfig::new(10, 0.05, 2.0, 1), &mut pipeline).unwrap_err();
    assert!(matches!(err, HarnessError::ServiceUnreachable(_)), "{err}");
}

proptest! {
    #[test]
    fn equal_rates_have_no_uplift(rate in 1e-6f64..=1.0) {
        prop_assert_eq!(uplift(rate, rate).unwrap(), 0.0);
    }

    #[test]
    fn rates_stay_in_range(seed in any::<u64>(), m in 0.25f64..4.0, base in 0.01f64..0.5) {
        let report = run(&SimConfig::new(200, base, m, seed));
        for arm in [report.control, report.treatment] {
            prop_assert!((0.0..=1.0).contains(&arm.rate));
            prop_assert_eq!(arm.impressions, 100);
        }
    }
}
