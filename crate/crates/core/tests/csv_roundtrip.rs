use emwave::signal::{Channel, SignalSet};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn write_then_read_preserves_samples(
        rate in prop::sample::select(vec![1.0, 10.0, 30.0, 100.0]),
        start_ms in 0u32..100_000,
        columns in prop::collection::vec(prop::collection::vec(-1e3..1e3f64, 2..80), 1..5),
    ) {
        let len = columns.iter().map(Vec::len).min().unwrap();
        let channels = columns
            .iter()
            .enumerate()
            .map(|(i, c)| Channel::new(format!("ch{i}"), c[..len].to_vec()))
            .collect();
        let start = start_ms as f64 / 1000.0;
        let set = SignalSet::new(rate, start, channels).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        set.write_csv(&path).unwrap();
        let back = SignalSet::read_csv(&path).unwrap();
        prop_assert_eq!(back.sample_rate(), rate);
        prop_assert!((back.start_time() - start).abs() < 1e-9);
        prop_assert_eq!(back.labels().collect::<Vec<_>>(), set.labels().collect::<Vec<_>>());
        for (a, b) in set.channels().iter().zip(back.channels()) {
            for (x, y) in a.samples.iter().zip(&b.samples) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }
    }
}
