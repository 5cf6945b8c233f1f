use emwave::analysis::*;
use emwave::grid::*;
use emwave::signal::{Channel, SignalSet};
use emwave::wavelet::{decompose_set, Extension};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ring_response(node: usize) -> SignalSet {
    let model = BenchmarkSpec::new(Topology::Ring { nodes: 20 }).build().unwrap();
    simulate(&model, &DisturbanceEvent::new(node, 1.0, -0.05), 8.0, 1e-3).unwrap().signals
}

fn two_area() -> SignalSet {
    let g = GeneratorParams { damping_d: 0.5, ..Default::default() };
    let model = BenchmarkSpec::new(Topology::TwoArea { per_area: 4, tie_susceptance: 0.05 })
        .with_generator(g)
        .build()
        .unwrap();
    simulate(&model, &DisturbanceEvent::new(0, 1.0, -0.01), 45.0, 1e-3).unwrap().signals
}

const ENERGY_WINDOW: Window = Window { start: 1.0, end: 1.4 };

#[test]
fn localization_ignores_amplitude_and_sign() {
    let signals = ring_response(7);
    let base = localize(&decompose_set(&signals, 5, Extension::Symmetric).unwrap(), ENERGY_WINDOW, 1e-6).unwrap();
    for factor in [1e-3, -1.0, 250.0] {
        let dec = decompose_set(&signals.scaled(factor), 5, Extension::Symmetric).unwrap();
        let r = localize(&dec, ENERGY_WINDOW, 1e-6 * factor.abs()).unwrap();
        assert_eq!(r.ranking, base.ranking, "factor {factor}");
        assert_eq!(r.arrival_order, base.arrival_order, "factor {factor}");
        for (a, b) in r.energies.iter().zip(&base.energies) {
            assert!((a - b * factor * factor).abs() <= 1e-9 * b * factor * factor + 1e-300);
        }
    }
    assert_eq!(base.origin(), Some("bus07"));
}

#[test]
fn localization_follows_channel_relabelling() {
    let signals = ring_response(4);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut order: Vec<usize> = (0..signals.num_channels()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let shuffled = SignalSet::new(
        signals.sample_rate(),
        signals.start_time(),
        order.iter().map(|&i| signals.channels()[i].clone()).collect(),
    )
    .unwrap();
    let a = localize(&decompose_set(&signals, 5, Extension::Symmetric).unwrap(), ENERGY_WINDOW, 5e-4).unwrap();
    let b = localize(&decompose_set(&shuffled, 5, Extension::Symmetric).unwrap(), ENERGY_WINDOW, 5e-4).unwrap();
    let names = |r: &LocalizationReport, idx: &[usize]| idx.iter().map(|&i| r.labels[i].clone()).collect::<Vec<_>>();
    assert_eq!(names(&a, &a.ranking), names(&b, &b.ranking));
    assert_eq!(b.origin(), Some("bus04"));
}

#[test]
fn two_simultaneous_events_rank_top_two() {
    let model = BenchmarkSpec::new(Topology::Ring { nodes: 20 }).build().unwrap();
    let events = [DisturbanceEvent::new(3, 1.0, -0.05), DisturbanceEvent::new(13, 1.0, -0.05)];
    let r = simulate_events(&model, &events, 6.0, 1e-3).unwrap();
    let dec = decompose_set(&r.signals, 5, Extension::Symmetric).unwrap();
    let rep = localize(&dec, ENERGY_WINDOW, DEFAULT_THRESHOLD).unwrap();
    let mut top: Vec<&str> = rep.ranking[..2].iter().map(|&i| rep.labels[i].as_str()).collect();
    top.sort();
    assert_eq!(top, ["bus03", "bus13"]);
}

#[test]
fn coherency_is_invariant_to_scale_and_sign() {
    let signals = two_area();
    let window = Window::new(3.0, 41.0);
    let base = coherency_groups(
        &decompose_set(&signals, 5, Extension::Symmetric).unwrap(),
        window,
        DEFAULT_THETA_IN,
        DEFAULT_THETA_OUT,
    )
    .unwrap();
    assert_eq!(base.label_groups(), vec![
        vec!["bus00", "bus01", "bus02", "bus03"],
        vec!["bus04", "bus05", "bus06", "bus07"],
    ]);
    assert_eq!(base.opposing, vec![(0, 1)]);
    for factor in [-1.0, 1e-4, 30.0] {
        let dec = decompose_set(&signals.scaled(factor), 5, Extension::Symmetric).unwrap();
        let p = coherency_groups(&dec, window, DEFAULT_THETA_IN, DEFAULT_THETA_OUT).unwrap();
        assert_eq!(p.label_groups(), base.label_groups());
        assert_eq!(p.opposing, base.opposing);
        assert_eq!(p.weak, base.weak);
    }
}

#[test]
fn negating_one_area_merges_the_groups() {
    let signals = two_area();
    let flipped: Vec<Channel> = signals
        .channels()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let s = if i >= 4 { -1.0 } else { 1.0 };
            Channel::new(c.label.clone(), c.samples.iter().map(|v| v * s).collect())
        })
        .collect();
    // Flipping the far area turns the anti-phase swing into an in-phase one.
    let set = SignalSet::new(signals.sample_rate(), signals.start_time(), flipped).unwrap();
    let dec = decompose_set(&set, 5, Extension::Symmetric).unwrap();
    let p = coherency_groups(&dec, Window::new(3.0, 41.0), DEFAULT_THETA_IN, DEFAULT_THETA_OUT).unwrap();
    assert!(p.opposing.is_empty());
    assert!(p.groups.iter().any(|g| g.members.contains(&0) && g.members.contains(&7)));
}

#[test]
fn rocof_recovers_slope_under_small_noise() {
    let fs = 10.0;
    let n = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let slopes = [-0.3, -0.31, -0.29];
    let channels = slopes
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let s = (0..n).map(|j| k * j as f64 / fs + rng.gen_range(-1e-6..1e-6)).collect();
            Channel::new(format!("g{i}"), s)
        })
        .collect();
    let set = SignalSet::new(fs, 0.0, channels).unwrap();
    let dec = decompose_set(&set, 5, Extension::Symmetric).unwrap();
    let est = estimate_rocof(&dec, None, Window::new(20.0, 80.0)).unwrap();
    assert!(est.system.is_none());
    for (c, k) in est.channels.iter().zip(slopes) {
        assert!((c.slope - k).abs() < 1e-5, "{} {}", c.label, c.slope);
        assert!(c.residual < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn d1_energy_is_quadratic_in_amplitude(
        seed in any::<u64>(),
        factor in prop_oneof![-100.0..-0.01f64, 0.01..100.0f64],
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let channels = (0..4)
            .map(|i| Channel::new(format!("c{i}"), (0..200).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        let set = SignalSet::new(10.0, 0.0, channels).unwrap();
        let w = Window::new(2.0, 12.0);
        let a = d1_energy(&decompose_set(&set, 3, Extension::Symmetric).unwrap(), w).unwrap();
        let b = d1_energy(&decompose_set(&set.scaled(factor), 3, Extension::Symmetric).unwrap(), w).unwrap();
        for (x, y) in a.energies.iter().zip(&b.energies) {
            prop_assert!((y - x * factor * factor).abs() <= 1e-9 * y.abs().max(1e-300));
        }
        prop_assert_eq!(a.ranking(), b.ranking());
    }
}
