//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_RED` are expected to fail; the reason is printed
//! with the result. The process exits non-zero when any outcome differs from
//! its expectation, including a known-red criterion that starts passing.

use std::f64::consts::PI;
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use emwave::analysis::{coherency_groups, estimate_rocof, localize, Window, DEFAULT_THETA_IN, DEFAULT_THETA_OUT, DEFAULT_THRESHOLD};
use emwave::grid::{simulate, BenchmarkSpec, DisturbanceEvent, GeneratorParams, Topology};
use emwave::wavelet::{band_frequencies, decompose, decompose_set, reconstruct_bands, Band, Extension};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (criterion id, why it cannot pass).
const KNOWN_RED: &[(&str, &str)] = &[(
    "band-selectivity",
    "the 4-tap Daubechies level-5 detail passes at most ~68% of a steady 0.2 Hz tone \
     (closed-form |m0|^2 product gives 0.683); no extension or length reaches 70%",
)];

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn perfect_reconstruction() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let extensions = [Extension::Symmetric, Extension::Periodic, Extension::Zero];
    let mut worst = 0.0f64;
    for i in 0..100 {
        let len = rng.gen_range(64..=4096);
        let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ext = extensions[i % 3];
        let p = decompose(&x, 5, ext).expect("long enough for five levels");
        let bands = reconstruct_bands(&p, ext).expect("same extension");
        let mse = (0..len)
            .map(|n| {
                let sum: f64 = bands.iter().map(|b| b[n]).sum();
                (x[n] - sum).powi(2)
            })
            .sum::<f64>()
            / len as f64;
        worst = worst.max(mse.sqrt());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-9 && secs < 5.0, format!("worst RMS error {worst:.2e}, {secs:.2} s for 100 signals"))
}

fn band_map() -> Outcome {
    let expected = [
        "D1 [5.000 - 2.500 Hz]",
        "D2 [2.500 - 1.250 Hz]",
        "D3 [1.250 - 0.625 Hz]",
        "D4 [0.625 - 0.313 Hz]",
        "D5 [0.313 - 0.156 Hz]",
        "A5 [0.156 - 0.000 Hz]",
    ];
    let m = band_frequencies(10.0, 5);
    let text: Vec<String> = m.entries.iter().map(|e| e.to_string()).collect();
    let dyadic = m.entries[..5]
        .iter()
        .enumerate()
        .all(|(j, e)| e.f_high == 10.0 / 2f64.powi(j as i32 + 1) && e.f_low == e.f_high / 2.0)
        && m.entries[5].f_low == 0.0
        && m.entries[5].f_high == 0.15625;
    outcome(text == expected && dyadic, text.join(", "))
}

/// Fraction of the DFT energy of `x` with frequency inside [lo, hi].
fn dft_band_fraction(x: &[f64], fs: f64, lo: f64, hi: f64) -> f64 {
    let n = x.len();
    let (mut inside, mut total) = (0.0, 0.0);
    for k in 0..=n / 2 {
        let (mut re, mut im) = (0.0, 0.0);
        for (m, v) in x.iter().enumerate() {
            let a = -2.0 * PI * (k * m) as f64 / n as f64;
            re += v * a.cos();
            im += v * a.sin();
        }
        let weight = if k == 0 || 2 * k == n { 1.0 } else { 2.0 };
        let p = weight * (re * re + im * im);
        total += p;
        let f = k as f64 * fs / n as f64;
        if f >= lo && f <= hi {
            inside += p;
        }
    }
    inside / total
}

fn band_selectivity() -> Outcome {
    let fs = 10.0;
    let n = 1024;
    let map = band_frequencies(fs, 5);
    let mut pass = true;
    let mut parts = Vec::new();
    for (freq, band) in [(0.2, Band::Detail(5)), (3.5, Band::Detail(1))] {
        let x: Vec<f64> = (0..n).map(|k| (2.0 * PI * freq * k as f64 / fs).sin()).collect();
        let edges = map.get(band).expect("band exists");
        let input_in_band = dft_band_fraction(&x, fs, edges.f_low, edges.f_high);
        let p = decompose(&x, 5, Extension::Symmetric).expect("long enough");
        let bands = reconstruct_bands(&p, Extension::Symmetric).expect("same extension");
        let idx = map.index_of(band).expect("band exists");
        let share = energy(&bands[idx]) / energy(&x);
        pass &= share >= 0.70;
        parts.push(format!(
            "{freq} Hz: {:.1}% in {band} (DFT oracle puts {:.1}% of the input in band)",
            100.0 * share,
            100.0 * input_in_band
        ));
    }
    outcome(pass, parts.join("; "))
}

fn localization() -> Outcome {
    let start = Instant::now();
    let mut top_hits = 0;
    let mut monotone = 0;
    let mut misses = Vec::new();
    for (name, topology) in [("ring", Topology::Ring { nodes: 20 }), ("chain", Topology::Chain { nodes: 20 })] {
        let model = BenchmarkSpec::new(topology).build().expect("uniform benchmark");
        for node in 0..20 {
            let r = simulate(&model, &DisturbanceEvent::new(node, 1.0, -0.05), 8.0, 1e-3).expect("simulates");
            let dec = decompose_set(&r.signals, 5, Extension::Symmetric).expect("decomposes");
            let rep = localize(&dec, Window::new(1.0, 1.4), DEFAULT_THRESHOLD).expect("localizes");
            if rep.ranking.first() == Some(&node) {
                top_hits += 1;
            } else {
                misses.push(format!("{name}/{node} top {:?}", rep.origin()));
            }
            let hops: Vec<usize> = model.hop_distances(node).into_iter().map(|d| d.expect("connected")).collect();
            let arrival = |i: usize| rep.arrival_times[i].unwrap_or(f64::INFINITY);
            let ordered = (0..20).all(|i| (0..20).all(|j| hops[i] >= hops[j] || arrival(i) <= arrival(j)));
            if ordered {
                monotone += 1;
            } else {
                misses.push(format!("{name}/{node} arrivals out of order"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut detail = format!("top-1 {top_hits}/40, monotone arrivals {monotone}/40, {secs:.1} s");
    if !misses.is_empty() {
        detail += &format!(" [{}]", misses.join(", "));
    }
    outcome(top_hits == 40 && monotone == 40 && secs < 60.0, detail)
}

fn coherency() -> Outcome {
    let ties = [0.02, 0.0356, 0.0632, 0.1125, 0.2];
    let mut ok = 0;
    let mut parts = Vec::new();
    for tie in ties {
        let model = BenchmarkSpec::new(Topology::TwoArea { per_area: 4, tie_susceptance: tie })
            .with_generator(GeneratorParams { damping_d: 0.5, ..Default::default() })
            .build()
            .expect("two-area benchmark");
        let r = simulate(&model, &DisturbanceEvent::new(0, 1.0, -0.01), 45.0, 1e-3).expect("simulates");
        let dec = decompose_set(&r.signals, 5, Extension::Symmetric).expect("decomposes");
        let p = coherency_groups(&dec, Window::new(3.0, 41.0), DEFAULT_THETA_IN, DEFAULT_THETA_OUT)
            .expect("partitions");
        let exact = p.groups.len() == 2
            && p.groups[0].members == [0, 1, 2, 3]
            && p.groups[1].members == [4, 5, 6, 7]
            && p.weak.is_empty()
            && p.opposing == [(0, 1)];
        if exact {
            ok += 1;
        }
        parts.push(format!("B={tie}: {}", if exact { "ok" } else { "wrong" }));
    }
    outcome(ok == ties.len(), format!("{ok}/{} tie settings ({})", ties.len(), parts.join(", ")))
}

fn rocof() -> Outcome {
    let model = BenchmarkSpec::new(Topology::Ring { nodes: 10 })
        .with_generator(GeneratorParams { damping_d: 0.01, ..Default::default() })
        .build()
        .expect("ring benchmark");
    let delta_p = -0.5;
    let expected = delta_p * model.nominal_frequency() / (2.0 * model.aggregate_inertia());
    let r = simulate(&model, &DisturbanceEvent::new(3, 1.0, delta_p), 15.0, 1e-3).expect("simulates");
    let dec = decompose_set(&r.signals, 5, Extension::Symmetric).expect("decomposes");
    let est = estimate_rocof(&dec, Some(&model), Window::new(4.0, 10.0)).expect("fits");
    let sys = est.system.as_ref().expect("model given").slope;
    let sys_err = ((sys - expected) / expected).abs();
    let spread = est
        .channels
        .iter()
        .map(|c| ((c.slope - sys) / sys).abs())
        .fold(0.0, f64::max);
    outcome(
        sys_err < 0.05 && spread < 0.10,
        format!(
            "system {sys:.4} Hz/s vs analytic {expected:.4} ({:.2}% off); worst channel {:.2}% from COI",
            100.0 * sys_err,
            100.0 * spread
        ),
    )
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run_analyze(scenario: &Path, out: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_emwave"))
        .arg("analyze")
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(dir).expect("readable").map(|e| e.expect("entry").path()).collect();
    entries.sort();
    for p in entries {
        let name = p.file_name().expect("named").to_string_lossy().into_owned();
        if p.is_dir() {
            for (inner, bytes) in tree(&p) {
                files.push((format!("{name}/{inner}"), bytes));
            }
        } else {
            files.push((name, fs::read(&p).expect("readable")));
        }
    }
    files
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let sc = scenario("ring20.toml");
    if !(run_analyze(&sc, &a) && run_analyze(&sc, &b)) {
        return outcome(false, "analyze failed");
    }
    let (ta, tb) = (tree(&a), tree(&b));
    outcome(ta == tb && !ta.is_empty(), format!("{} files compared", ta.len()))
}

fn equilibrium_null() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let out = dir.path().join("out");
    if !run_analyze(&scenario("quiet.toml"), &out) {
        return outcome(false, "analyze failed");
    }
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap_or_default();
    let energies: Vec<f64> = fs::read_to_string(out.join("energies.csv"))
        .unwrap_or_default()
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').nth(1)?.parse().ok())
        .collect();
    let max = energies.iter().cloned().fold(0.0, f64::max);
    outcome(
        summary.contains("no disturbance found") && energies.len() == 20 && max < 1e-18,
        format!("{} energies, max {max:.1e}", energies.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("perfect-reconstruction", perfect_reconstruction),
        ("band-map", band_map),
        ("band-selectivity", band_selectivity),
        ("localization", localization),
        ("coherency", coherency),
        ("rocof", rocof),
        ("determinism", determinism),
        ("equilibrium-null", equilibrium_null),
    ];
    let mut unexpected = 0;
    for (id, check) in criteria {
        let result = panic::catch_unwind(check).unwrap_or_else(|_| outcome(false, "panicked"));
        let known = KNOWN_RED.iter().find(|(k, _)| *k == id);
        let status = if result.pass { "PASS" } else { "FAIL" };
        println!("{status} {id}: {}", result.detail);
        match (result.pass, known) {
            (false, Some((_, why))) => println!("     known unattainable: {why}"),
            (true, Some(_)) => {
                println!("     listed as known red but passed; update KNOWN_RED");
                unexpected += 1;
            }
            (false, None) => unexpected += 1,
            (true, None) => {}
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria with unexpected outcome");
        ExitCode::FAILURE
    }
}
