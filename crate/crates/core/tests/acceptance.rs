//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_2_PI, TAU};
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ris_beam::analysis::gain_bandwidth;
use ris_beam::beamformer::{
    brute_force_on_steering, conjugate_weights, quantize_nearest, ContinuousWeights, Method, PgdParams, PhaseSet,
    DEFAULT_ORACLE_LIMIT,
};
use ris_beam::cli::{self, ConfigurationFile, ScenarioConfig};
use ris_beam::geometry::{direction, wavelength, ArrayGeometry, Position};
use ris_beam::scenario::Scenario;
use ris_beam::steering::{beam_gain, focusing_vector, ElementWeights, SteeringVector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn gain<W: ElementWeights + ?Sized>(w: &W, b: &SteeringVector) -> f64 {
    beam_gain(w, b).unwrap().norm()
}

fn scenario(rows: usize, cols: usize) -> Scenario {
    let spacing = wavelength(102e9).unwrap() / 2.0;
    let g = ArrayGeometry::grid(rows, cols, spacing, Position::ORIGIN).unwrap();
    Scenario::new(g, 0.5, 102e9).unwrap()
}

fn random_targets(rng: &mut ChaCha8Rng, n: usize, theta_max: f64) -> Vec<(f64, f64)> {
    (0..n).map(|_| (rng.gen_range(0.0..theta_max), rng.gen_range(0.0..360.0))).collect()
}

fn ac1_conjugate_upper_bound() -> Outcome {
    let start = Instant::now();
    let s = Scenario::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0_f64;
    for (theta, phi) in random_targets(&mut rng, 20, 90.0) {
        let b = s.steering(theta, phi).unwrap();
        let g = gain(&conjugate_weights(&b), &b);
        worst = worst.max((g - 961.0).abs() / 961.0);
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && elapsed < Duration::from_secs(1),
        format!("max relative deviation from 961 = {worst:.2e} (<= 1e-6), {elapsed:.2?} (< 1 s)"),
    )
}

fn ac2_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let k = PhaseSet::one_bit();
    let params = PgdParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_pgd, mut worst_nearest) = (f64::INFINITY, f64::INFINITY);
    let mut enumerations = 0usize;
    for (rows, cols) in [(3, 3), (2, 6)] {
        let s = scenario(rows, cols);
        for (theta, phi) in random_targets(&mut rng, 20, 60.0) {
            let b = s.steering(theta, phi).unwrap();
            let best = gain(&brute_force_on_steering(&b, &k, DEFAULT_ORACLE_LIMIT).unwrap(), &b);
            enumerations = enumerations.max(1 << s.geometry.len());
            let pgd = gain(&s.design(theta, phi, Method::Pgd, &params).unwrap(), &b);
            let nearest = gain(&quantize_nearest(&conjugate_weights(&b), &k), &b);
            worst_pgd = worst_pgd.min(pgd / best);
            worst_nearest = worst_nearest.min(nearest / best);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst_pgd >= 0.95 && worst_nearest >= 0.85 && enumerations <= 4096 && elapsed < Duration::from_secs(30),
        format!(
            "min pgd/oracle = {worst_pgd:.4} (>= 0.95), min nearest/oracle = {worst_nearest:.4} (>= 0.85), \
             {enumerations} enumerations/target, {elapsed:.2?} (< 30 s)"
        ),
    )
}

fn reference_22_5() -> (ris_beam::analysis::PatternMetrics, Duration) {
    let start = Instant::now();
    let s = Scenario::reference();
    let c = s.design(22.5, 0.0, Method::Pgd, &PgdParams::default()).unwrap();
    let m = s.metrics(&c, 22.5, 0.0).unwrap();
    (m, start.elapsed())
}

fn ac3_pointing(m: &ris_beam::analysis::PatternMetrics, elapsed: Duration) -> Outcome {
    outcome(
        m.pointing_error <= 1.0 && elapsed < Duration::from_secs(10),
        format!("peak at {:.1} deg, error {:.2} deg (<= 1.0), {elapsed:.2?} (< 10 s)", m.peak_theta, m.pointing_error),
    )
}

fn ac4_sll_band(m: &ris_beam::analysis::PatternMetrics) -> Outcome {
    match m.sll_db {
        Some(sll) => outcome((5.5..=8.5).contains(&sll), format!("SLL = {sll:.3} dB (in [5.5, 8.5])")),
        None => outcome(false, "no sidelobe found"),
    }
}

fn ac5_quantization_loss() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
    let w = ContinuousWeights::new(phases);
    let q = quantize_nearest(&w, &PhaseSet::one_bit());
    let retention: f64 = w.phases().iter().zip(q.phases()).map(|(p, l)| (p - l).cos()).sum::<f64>() / n as f64;
    let err = (retention - FRAC_2_PI).abs();
    outcome(
        err <= 0.005,
        format!("mean retention {retention:.5} vs 2/pi = {FRAC_2_PI:.5}, |diff| {err:.2e} (<= 0.005)"),
    )
}

fn ac6a_even_pattern() -> Outcome {
    let s = Scenario::reference();
    let w = conjugate_weights(&s.steering(0.0, 0.0).unwrap());
    let p = s.pattern(&w, 0.0).unwrap();
    let mags: Vec<f64> = p.magnitudes().collect();
    let n = mags.len();
    let worst = (0..n).map(|k| (mags[k] - mags[n - 1 - k]).abs()).fold(0.0, f64::max);
    outcome(worst <= 1e-9, format!("max |G(theta)| - |G(-theta)| = {worst:.2e} (<= 1e-9)"))
}

fn ac6b_plane_wave() -> Outcome {
    let s = Scenario::reference();
    let lambda = s.wavelength();
    let r = 100.0 * s.geometry.fraunhofer_distance(s.frequency).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for (theta, phi) in [(0.0, 0.0), (22.5, 0.0), (45.0, 0.0)].into_iter().chain(random_targets(&mut rng, 10, 90.0)) {
        let a = focusing_vector(&s.geometry, &s.geometry.farfield_probe(theta, phi, r).unwrap(), lambda).unwrap();
        let u = direction(theta, phi);
        for (e, q) in a.entries().iter().zip(s.geometry.elements()) {
            let plane = TAU / lambda * (u.x * q.x + u.y * q.y + u.z * q.z);
            let err = (e * num_complex::Complex64::from_polar(1.0, -plane)).arg().abs();
            worst = worst.max(err);
        }
    }
    outcome(worst <= 1e-3, format!("max phase deviation at 100x Fraunhofer = {worst:.3e} rad (<= 1e-3)"))
}

fn ac7_bandwidth() -> Outcome {
    let params = PgdParams::default();
    let big = Scenario::reference();
    let broadside = big.design(0.0, 0.0, Method::Pgd, &params).unwrap();
    let narrow =
        gain_bandwidth(&big.geometry, &broadside, &big.feed, (0.0, 0.0), &big.sweep_spec(80e9, 125e9, 91)).unwrap();
    let finite = !narrow.is_clipped() && narrow.f_low <= 102e9 && 102e9 <= narrow.f_high;

    let fractional = |s: &Scenario| {
        let c = s.design(22.5, 0.0, Method::Pgd, &params).unwrap();
        gain_bandwidth(&s.geometry, &c, &s.feed, (22.5, 0.0), &s.sweep_spec(40e9, 200e9, 321)).unwrap()
    };
    let small = fractional(&scenario(5, 5));
    let large = fractional(&big);
    let ordered = !small.is_clipped() && !large.is_clipped() && small.fractional_bandwidth > large.fractional_bandwidth;
    outcome(
        finite && ordered,
        format!(
            "31x31 broadside band {:.2}-{:.2} GHz ({:.1}%, unclipped: {}); 22.5 deg scan: 5x5 {:.1}% vs 31x31 {:.1}%",
            narrow.f_low / 1e9,
            narrow.f_high / 1e9,
            100.0 * narrow.fractional_bandwidth,
            !narrow.is_clipped(),
            100.0 * small.fractional_bandwidth,
            100.0 * large.fractional_bandwidth
        ),
    )
}

fn ac8_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let cfg = dir.path().join("scenario.json");
    fs::write(&cfg, r#"{"rows": 15, "cols": 15, "pgd": {"starts": 3}}"#).unwrap();
    let cfg = cfg.to_str().unwrap().to_string();
    let run = |args: &[&str], out: &str| -> Vec<u8> {
        let path = dir.path().join(out);
        let mut full: Vec<&str> = vec!["--config", &cfg, "--seed", "7", "--out", path.to_str().unwrap()];
        full.extend_from_slice(args);
        let status = Command::new(env!("CARGO_BIN_EXE_ris-beam")).args(&full).output().unwrap().status;
        assert!(status.success(), "{args:?} failed");
        fs::read(path).unwrap()
    };
    let conf = dir.path().join("c1.json");
    let conf = conf.to_str().unwrap().to_string();
    let files_equal = [
        run(&["design", "--theta", "22.5"], "c1.json") == run(&["design", "--theta", "22.5"], "c2.json"),
        run(&["codebook", "--targets", "0,22.5,45"], "k1.json")
            == run(&["codebook", "--targets", "0,22.5,45"], "k2.json"),
        run(&["pattern", "--configuration", &conf], "p1.csv") == run(&["pattern", "--configuration", &conf], "p2.csv"),
        run(
            &["sweep", "--configuration", &conf, "--f-min-ghz", "80", "--f-max-ghz", "125", "--n-freqs", "46"],
            "s1.csv",
        ) == run(
            &["sweep", "--configuration", &conf, "--f-min-ghz", "80", "--f-max-ghz", "125", "--n-freqs", "46"],
            "s2.csv",
        ),
    ];

    // reference scenario: in-memory design -> JSON -> pattern of the reread file
    let config = ScenarioConfig::default();
    let designed = cli::design(&config, 22.5, None, Method::Pgd, Some(7)).unwrap();
    let reread: ConfigurationFile = serde_json::from_str(&serde_json::to_string_pretty(&designed).unwrap()).unwrap();
    let (_, metrics) = cli::pattern(&config, Some(&reread), None).unwrap();
    let round_trip = reread.states == designed.states && metrics == designed.meta.metrics;
    outcome(
        files_equal.iter().all(|&e| e) && round_trip,
        format!("byte-identical [config, codebook, pattern, sweep] = {files_equal:?}; round-trip metrics identical: {round_trip}"),
    )
}

fn main() {
    let (m22, t22) = reference_22_5();
    let results = [
        ("AC1 conjugate upper bound", ac1_conjugate_upper_bound()),
        ("AC2 oracle equivalence (3x3, 2x6)", ac2_oracle_equivalence()),
        ("AC3 pointing accuracy 22.5 deg", ac3_pointing(&m22, t22)),
        ("AC4 approximated-beam SLL band", ac4_sll_band(&m22)),
        ("AC5 1-bit quantization loss", ac5_quantization_loss()),
        ("AC6a broadside pattern symmetry", ac6a_even_pattern()),
        ("AC6b far-field plane-wave phases", ac6b_plane_wave()),
        ("AC7 bandwidth behavior", ac7_bandwidth()),
        ("AC8 determinism and round-trip", ac8_determinism()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        println!("{} {name}: {}", if r.pass { "PASS" } else { "FAIL" }, r.detail);
        failed += usize::from(!r.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
