//! Acceptance criteria 1 through 8. Each criterion prints a PASS or FAIL
//! line; the process exits non-zero if any check fails. Pass criterion
//! numbers as arguments to run a subset.

use irvweak::analytic::iac::{closed_form, iac_enumerate, iac_simplex_sample};
use irvweak::analytic::ic::{ic_probabilities, v1, v2, v3, IcResult};
use irvweak::analytic::sphere::DEFAULT_TOL;
use irvweak::analytic::{ic_gaussian_cone, ic_spherical_triangle, AnalyticMeasure};
use irvweak::election::{analyze, borda_scores, BordaVariant, Rule, WeakMeasure};
use irvweak::empirical::{complete_proportionally, parse_ballots, reduce_to_three};
use irvweak::montecarlo::{run_experiment, sweep_sigma, Criterion, ExperimentConfig, PARTIAL_BULLET_PROB};
use irvweak::spatial::SpatialModel;
use irvweak::{Candidate, Pick, Profile3};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::time::Instant;

const SEED: u64 = 20240001;

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    fn close(&mut self, name: impl Into<String>, got: f64, want: f64, tol: f64) {
        let d = (got - want).abs();
        self.check(name, d <= tol, format!("got {got:.12}, want {want:.12}, |diff| {d:.3e}, tol {tol:.1e}"));
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, name: impl Into<String>, got: T, want: T) {
        let pass = got == want;
        self.check(name, pass, format!("got {got:?}, want {want:?}"));
    }

    fn within_sigmas(&mut self, name: impl Into<String>, got: f64, se: f64, want: f64, k: f64) {
        let z = (got - want).abs() / se;
        self.check(name, z < k, format!("got {got:.6} ± {se:.2e}, want {want:.6}, {z:.2} se (limit {k})"));
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn ratio_scores(p: &Profile3, v: BordaVariant) -> [Ratio<i64>; 3] {
    borda_scores(p, v).unwrap()
}

fn ints(xs: [i64; 3]) -> [Ratio<i64>; 3] {
    xs.map(Ratio::from_integer)
}

fn criterion_1(c: &mut Checks) {
    let start = Instant::now();
    let t1 = Profile3::complete([6, 0, 0, 8, 4, 1]);
    let out = analyze(&t1, SEED).unwrap();
    c.eq("19-voter example: IRV winner", out.irv_winner, Candidate::A);
    c.eq("19-voter example: final tally", out.irv.rounds[1].tallies, [Some(10), Some(9), None]);
    c.eq("19-voter example: Borda", ratio_scores(&t1, BordaVariant::Complete), ints([16, 23, 18]));
    c.eq("19-voter example: Bucklin round 2", (out.bucklin.declared_round, out.bucklin.sums), (2, [10, 15, 13]));
    c.eq("19-voter example: Borda loser", out.borda_complete, Some(Pick::Unique(Candidate::A)));
    c.eq("19-voter example: Bucklin loser", out.bucklin.loser, Pick::Unique(Candidate::A));

    let t5 = Profile3::new([908, 756, 801, 1177, 1088, 1299], [1572, 822, 492]);
    let out = analyze(&t5, SEED).unwrap();
    c.eq("Minneapolis: IRV winner", out.irv_winner, Candidate::C);
    c.eq("Minneapolis: final tally", out.irv.rounds[1].tallies, [Some(4037), None, Some(4056)]);
    c.eq("Minneapolis: Bucklin", out.bucklin.sums, [5125, 5007, 4812]);
    c.eq("Minneapolis: Borda PM", ratio_scores(&t5, BordaVariant::Pm), ints([8361, 7807, 7691]));

    let raw = parse_ballots(&data("minneapolis_w2_synthetic.csv")).unwrap();
    let r = reduce_to_three(&raw, SEED).unwrap();
    let back = r.profile.relabeled([Candidate::A, Candidate::C, Candidate::B]);
    c.eq("five-candidate fixture reduces to the Minneapolis three", back, t5);
    let secs = start.elapsed().as_secs_f64();
    c.check("runtime under 1 s", secs < 1.0, format!("{secs:.3} s"));
}

fn criterion_2(c: &mut Checks) {
    let start = Instant::now();
    for m in AnalyticMeasure::ALL {
        let q = closed_form(m);
        let exact = *q.numer() as f64 / *q.denom() as f64;
        let s = iac_simplex_sample(&m.event(), 10_000_000, SEED).unwrap();
        c.within_sigmas(format!("{} simplex sampling vs {q}", m.name()), s.value, s.error, exact, 4.0);
        let errs: Vec<f64> = [30u64, 60, 120]
            .iter()
            .map(|&v| (iac_enumerate(&m.event(), v).unwrap().to_f64() - exact).abs())
            .collect();
        c.check(
            format!("{} enumeration error shrinks from V=60 to V=120", m.name()),
            errs[2] < errs[1],
            format!("|err| at V=30,60,120: {:.6}, {:.6}, {:.6}", errs[0], errs[1], errs[2]),
        );
    }
    let secs = start.elapsed().as_secs_f64();
    c.check("runtime under 2 min", secs < 120.0, format!("{secs:.1} s"));
}

fn step(r: &IcResult, name: &str) -> f64 {
    r.step(name).unwrap().value
}

fn criterion_3(c: &mut Checks) {
    let start = Instant::now();
    let tri = ic_spherical_triangle(&[v1(), v2(), v3()]).unwrap();
    c.close("spherical triangle", tri, 0.0407767114, 1e-9);

    let r = ic_probabilities(DEFAULT_TOL).unwrap();
    c.close("Borda B-branch, step 2", step(&r, "borda_b/step2"), 0.01342486871, 1e-6);
    c.close("Borda B-branch, step 3", step(&r, "borda_b/step3"), 0.01129966085, 1e-6);
    c.close("Borda B-branch difference", step(&r, "borda_b"), 0.00212520794, 1e-9);
    c.close("Borda-loser limit", r.borda, 0.02810862798, 1e-6);
    c.close("Bucklin B-branch", step(&r, "bucklin_b"), 0.0024298360, 1e-9);
    c.close("Bucklin-loser limit", r.bucklin, 0.0717769434, 1e-6);

    let n = 10_000_000;
    let g = |m: AnalyticMeasure| ic_gaussian_cone(&m.event(), n, SEED).unwrap();
    let gb = g(AnalyticMeasure::BordaLoser);
    c.within_sigmas("Gaussian cone vs Schläfli, Borda", gb.value, gb.error, r.borda, 4.0);
    let gk = g(AnalyticMeasure::BucklinLoser);
    c.within_sigmas("Gaussian cone vs Schläfli, Bucklin", gk.value, gk.error, r.bucklin, 4.0);
    let gm = g(AnalyticMeasure::MostLastPlace);
    c.within_sigmas("Gaussian cone vs Schläfli, most last place", gm.value, gm.error, r.bucklin, 4.0);
    let secs = start.elapsed().as_secs_f64();
    c.check("runtime under 5 min", secs < 300.0, format!("{secs:.1} s"));
}

/// Benchmark percentages per model, in report column order.
const COMPLETE_ROWS: [(&str, [f64; 4]); 8] = [
    ("UNI", [0.19, 1.74, 0.0, 0.0]),
    ("BIM(0.5)", [0.69, 8.86, 0.0, 0.0]),
    ("WBI(0.5)", [3.68, 1.68, 0.0, 0.0]),
    ("UNIxUNI", [0.11, 0.33, 0.89, 1.27]),
    ("UNIxBIM(0.5)", [0.42, 1.34, 3.18, 4.58]),
    ("UNIxWBI(0.5)", [1.41, 0.57, 1.30, 2.34]),
    ("BIM(0.5)xBIM(0.5)", [2.70, 12.08, 2.15, 8.53]),
    ("WBI(0.5)xWBI(0.5)", [3.59, 0.4, 0.25, 1.91]),
];

const PARTIAL_ROWS: [(&str, [f64; 5]); 8] = [
    ("UNI", [1.4, 1.0, 0.9, 1.0, 0.0]),
    ("BIM(0.5)", [9.8, 2.3, 2.4, 2.2, 0.0]),
    ("WBI(0.5)", [3.7, 1.7, 1.4, 1.9, 0.0]),
    ("UNIxUNI", [0.5, 0.2, 0.2, 0.2, 0.5]),
    ("UNIxBIM(0.5)", [2.8, 0.6, 0.6, 0.7, 2.5]),
    ("UNIxWBI(0.5)", [1.9, 0.5, 0.4, 0.5, 0.9]),
    ("BIM(0.5)xBIM(0.5)", [21.2, 0.3, 0.4, 0.3, 3.7]),
    ("WBI(0.5)xWBI(0.5)", [3.9, 0.6, 0.4, 1.0, 0.2]),
];

fn benchmark_row(c: &mut Checks, model: &str, bullet_prob: f64, want: &[f64], tol_pp: f64) {
    let mut cfg = ExperimentConfig::new(model.parse().unwrap(), SEED);
    cfg.bullet_prob = bullet_prob;
    let dims = cfg.model.dimension();
    let report = run_experiment(&cfg).unwrap();
    for (criterion, &w) in cfg.criteria().iter().zip(want) {
        let s = report.stat(Rule::Irv, *criterion).unwrap();
        let got = 100.0 * s.frequency;
        let name = format!("{model} {}", criterion.name());
        let zero_cell = dims == 1
            && matches!(criterion, Criterion::Weak(WeakMeasure::Bucklin) | Criterion::Weak(WeakMeasure::MostLastPlace));
        if zero_cell {
            c.check(name, s.count == 0, format!("{} events in {} trials, want exactly 0", s.count, cfg.trials));
        } else {
            let d = (got - w).abs();
            c.check(name, d <= tol_pp, format!("got {got:.2}%, want {w:.2}%, |diff| {d:.2} pp, tol {tol_pp} pp"));
        }
    }
}

fn criterion_4(c: &mut Checks) {
    let start = Instant::now();
    for (model, want) in COMPLETE_ROWS {
        benchmark_row(c, model, 0.0, &want, 0.5);
    }
    let secs = start.elapsed().as_secs_f64();
    c.check("runtime under 30 min", secs < 1800.0, format!("{secs:.1} s on {} threads", rayon::current_num_threads()));
}

fn criterion_5(c: &mut Checks) {
    for (model, want) in PARTIAL_ROWS {
        benchmark_row(c, model, PARTIAL_BULLET_PROB, &want, 1.0);
    }
}

fn random_profile(rng: &mut ChaCha8Rng) -> Profile3 {
    let max = [3u64, 10, 100, 1000][rng.random_range(0..4)];
    let full: [u64; 6] = std::array::from_fn(|_| rng.random_range(0..=max));
    let bullets: [u64; 3] =
        if rng.random_bool(0.5) { [0; 3] } else { std::array::from_fn(|_| rng.random_range(0..=max)) };
    let p = Profile3::new(full, bullets);
    if p.voters() == 0 {
        Profile3::complete([1, 0, 0, 0, 0, 0])
    } else {
        p
    }
}

fn criterion_6(c: &mut Checks) {
    for model in ["UNI", "BIM(0.4)", "WBI(0.5)"] {
        let cfg = ExperimentConfig::new(model.parse().unwrap(), SEED);
        let report = run_experiment(&cfg).unwrap();
        for m in [WeakMeasure::Bucklin, WeakMeasure::MostLastPlace] {
            let n = report.stat(Rule::Irv, Criterion::Weak(m)).unwrap().count;
            c.check(format!("{model} IRV elects {m}"), n == 0, format!("{n} events in {} trials", cfg.trials));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let n = 1_000_000u64;
    let (mut condorcet, mut plurality, mut with_cl, mut with_pl) = (0u64, 0u64, 0u64, 0u64);
    for _ in 0..n {
        let p = random_profile(&mut rng);
        let out = analyze(&p, rng.random()).unwrap();
        if let Some(l) = out.condorcet_loser {
            with_cl += 1;
            condorcet += u64::from(out.irv_winner == l);
        }
        if let Some(l) = out.plurality.loser.unique() {
            with_pl += 1;
            plurality += u64::from(out.irv_winner == l);
        }
    }
    c.check(
        "IRV never elects the Condorcet loser",
        condorcet == 0,
        format!("{condorcet} of {with_cl} profiles with a Condorcet loser ({n} profiles)"),
    );
    c.check(
        "IRV never elects the plurality loser",
        plurality == 0,
        format!("{plurality} of {with_pl} profiles with a unique plurality loser ({n} profiles)"),
    );
}

fn criterion_7(c: &mut Checks) {
    let p = Profile3::new([30, 20, 0, 0, 0, 0], [100, 0, 0]);
    let q = complete_proportionally(&p);
    c.eq("100 bullets over (30, 20) split 60/40", [q.full[0] - 30, q.full[1] - 20], [60, 40]);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut bad = 0;
    for _ in 0..1000 {
        let p = random_profile(&mut rng);
        let q = complete_proportionally(&p);
        let ok = q.is_complete()
            && q.voters() == p.voters()
            && Candidate::ALL.iter().all(|&x| q.first_place(x) == p.first_place(x));
        bad += u32::from(!ok);
    }
    c.check("V and first places preserved on 1000 profiles", bad == 0, format!("{bad} violations"));
}

fn criterion_8(c: &mut Checks) {
    for (model, increasing) in [("BIM", false), ("WBI", true)] {
        let mut cfg = ExperimentConfig::new(SpatialModel::parse_with_sigma(model, Some(0.25)).unwrap(), SEED);
        cfg.trials = 20_000;
        let rows = sweep_sigma(&cfg, &[0.25, 0.70]).unwrap();
        let f: Vec<f64> = rows
            .iter()
            .map(|(_, r)| r.frequency(Rule::Irv, Criterion::Weak(WeakMeasure::Borda)).unwrap())
            .collect();
        let pass = if increasing { f[1] > f[0] } else { f[1] < f[0] };
        let dir = if increasing { "increases" } else { "decreases" };
        c.check(
            format!("{model}(sigma) Borda-loser frequency {dir} from 0.25 to 0.70"),
            pass,
            format!("{:.2}% at 0.25, {:.2}% at 0.70", 100.0 * f[0], 100.0 * f[1]),
        );
    }
}

fn main() {
    let criteria: [(&str, fn(&mut Checks)); 8] = [
        ("worked examples", criterion_1),
        ("IAC closed forms", criterion_2),
        ("IC geometric route", criterion_3),
        ("spatial benchmark, complete ballots", criterion_4),
        ("spatial benchmark, partial ballots", criterion_5),
        ("one-dimensional zeros and loser properties", criterion_6),
        ("proportional completion", criterion_7),
        ("sigma-sweep trends", criterion_8),
    ];
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !wanted.is_empty() && !wanted.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let mut checks = Checks::default();
        let panicked = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&mut checks))).is_err();
        for ch in &checks.0 {
            println!("    [{}] {}: {}", if ch.pass { "ok" } else { "FAIL" }, ch.name, ch.detail);
        }
        let bad = checks.0.iter().filter(|ch| !ch.pass).count() + usize::from(panicked);
        let verdict = if bad == 0 { "PASS" } else { "FAIL" };
        println!(
            "criterion {k} ({title}): {verdict} ({} of {} checks passed{}, {:.1} s)",
            checks.0.len() + usize::from(panicked) - bad,
            checks.0.len() + usize::from(panicked),
            if panicked { ", panicked" } else { "" },
            start.elapsed().as_secs_f64()
        );
        if bad > 0 {
            failed.push(k);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
