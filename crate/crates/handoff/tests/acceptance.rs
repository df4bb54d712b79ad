//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use handoff::report::{emit_report, Format};
use handoff_core::estimator::{rank_loss, rank_loss_gradient, PairStrategy, Sample, SampleSet};
use handoff_core::radio::Bandwidth;
use handoff_core::scheduler::{marking_rate, throughput_model, SchedulerConfig};
use handoff_core::selector::{select_ap, select_ap_bruteforce, SelectorMode, SelectorState};
use handoff_core::sim::{
    estimation_trial, run, HandoffPolicy, MetricsReport, MobilitySpec, RfMode, Scenario, DEFAULT_TOUR_JITTER_M,
};
use handoff_core::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

static RUNS: AtomicUsize = AtomicUsize::new(0);
static UNCONSERVED: AtomicUsize = AtomicUsize::new(0);

/// Every simulation in the suite goes through here so criterion 9 can
/// check conservation across all of them.
fn sim(sc: &Scenario) -> MetricsReport {
    let r = run(sc).expect("scenario runs");
    RUNS.fetch_add(1, Ordering::Relaxed);
    if !r.clients.iter().all(|c| c.packets.conserved()) {
        UNCONSERVED.fetch_add(1, Ordering::Relaxed);
    }
    r
}

fn sim_all(scs: &[Scenario]) -> Vec<MetricsReport> {
    scs.par_iter().map(sim).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn tour(warmup_m: f64) -> Scenario {
    let mut sc = Scenario::default();
    sc.clients[0].mobility = MobilitySpec::Tour {
        phase: 0,
        warmup_m,
        jitter_m: DEFAULT_TOUR_JITTER_M,
    };
    sc
}

fn c1_gradient() -> (bool, String) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(3..30);
        let samples: Vec<Sample> = (0..n)
            .map(|_| Sample {
                r: 10f64.powf(rng.gen_range(-2.0..4.0)),
                q: Vec3::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..15.0), 1.0),
            })
            .collect();
        let set = SampleSet::with_pairs(samples, PairStrategy::AllPairs).expect("distinct positions");
        let p = Vec3::new(
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..15.0),
            rng.gen_range(2.0..4.0),
        );
        let g = rank_loss_gradient(p, &set).unwrap();
        let fd = |e: Vec3| (rank_loss(p + e * h, &set).unwrap() - rank_loss(p - e * h, &set).unwrap()) / (2.0 * h);
        let num = Vec3::new(
            fd(Vec3::new(1.0, 0.0, 0.0)),
            fd(Vec3::new(0.0, 1.0, 0.0)),
            fd(Vec3::new(0.0, 0.0, 1.0)),
        );
        worst = worst.max(g.dist(num) / g.norm().max(num.norm()).max(1e-6));
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst < 1e-6 && secs < 10.0,
        format!("max relative error {worst:.2e} over 1000 instances in {secs:.2}s"),
    )
}

fn c2_estimation() -> (bool, String) {
    let mut sc = Scenario::default();
    sc.channel.shadowing_sigma_db = 2.0;
    let walks = [5.0, 10.0, 15.0, 20.0];
    let med: Vec<f64> = walks
        .par_iter()
        .map(|&w| median((1..=20).map(|s| estimation_trial(&sc, w, s).unwrap()).collect()))
        .collect();
    let ok = med.windows(2).all(|p| p[1] <= p[0]) && med[2] <= 0.5 && med[3] <= 0.5;
    let shown: Vec<String> = walks.iter().zip(&med).map(|(w, m)| format!("{w}m {m:.3}")).collect();
    (ok, format!("median error {}", shown.join(", ")))
}

fn c3_selection() -> (bool, String) {
    let scs: Vec<Scenario> = [15.0, 20.0]
        .iter()
        .flat_map(|&w| (1..=20).map(move |seed| Scenario { seed, ..tour(w) }))
        .collect();
    let reports = sim_all(&scs);
    let acc: Vec<f64> = reports
        .chunks(20)
        .map(|rs| {
            rs.iter()
                .map(|r| r.clients[0].selection_accuracy.unwrap_or(0.0))
                .sum::<f64>()
                / 20.0
        })
        .collect();
    (
        acc.iter().all(|&a| a >= 0.9),
        format!("accuracy 15m {:.3}, 20m {:.3}", acc[0], acc[1]),
    )
}

fn c4_select_ap() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let v = |rng: &mut ChaCha8Rng| {
        Vec3::new(
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-3.0..3.0),
        )
    };
    let modes = [SelectorMode::Literal, SelectorMode::Relative, SelectorMode::Lookahead];
    let mut mismatches = [0usize; 3];
    for _ in 0..10_000 {
        let aps: Vec<Vec3> = (0..rng.gen_range(1..12)).map(|_| v(&mut rng)).collect();
        let pos = v(&mut rng);
        let d = loop {
            let d = v(&mut rng);
            if d.norm() > 1e-6 {
                break d;
            }
        };
        for (k, &m) in modes.iter().enumerate() {
            let st = SelectorState::new(0, aps.clone(), m).unwrap();
            if select_ap(d, pos, &st).unwrap() != select_ap_bruteforce(d, pos, &aps, m) {
                mismatches[k] += 1;
            }
        }
    }
    (
        mismatches == [0; 3],
        format!(
            "mismatches literal {}, relative {}, lookahead {} over 10000",
            mismatches[0], mismatches[1], mismatches[2]
        ),
    )
}

fn c5_inversion() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 1000 {
        let c = SchedulerConfig {
            mss_bits: rng.gen_range(1000.0..20000.0),
            rtt_s: rng.gen_range(0.01..0.5),
            buffer_bits: rng.gen_range(1e5..1e7),
            safety_factor: 1.0,
            ..SchedulerConfig::default()
        };
        let p = rng.gen_range(0.0..0.5);
        let target: f64 = rng.gen_range(1e-4..1.0);
        let dt = ((target + p) / 2.0).sqrt() * c.buffer_bits * c.rtt_s / c.mss_bits;
        let alpha = marking_rate(dt, &c, p);
        if alpha <= 0.0 || alpha >= 1.0 {
            continue;
        }
        let delivered = throughput_model(p, alpha, &c).unwrap() * dt;
        worst = worst.max((delivered / c.buffer_bits - 1.0).abs());
        n += 1;
    }
    (worst < 1e-9, format!("max relative error {worst:.2e} over 1000 draws"))
}

fn c6_scheduler() -> (bool, String) {
    let scs: Vec<Scenario> = (1..=10)
        .flat_map(|seed| {
            [true, false].map(|on| Scenario {
                seed,
                scheduler_enabled: on,
                ..Scenario::default()
            })
        })
        .collect();
    let reports = sim_all(&scs);
    let mut ok = true;
    let (mut rt_on, mut rt_off, mut worst_ratio) = (0, 0, f64::INFINITY);
    for pair in reports.chunks(2) {
        let (on, off) = (pair[0].totals(), pair[1].totals());
        ok &= on.handoff_retransmissions <= off.handoff_retransmissions;
        ok &= on.delivered as f64 >= 0.95 * off.delivered as f64;
        rt_on += on.handoff_retransmissions;
        rt_off += off.handoff_retransmissions;
        worst_ratio = worst_ratio.min(on.delivered as f64 / off.delivered as f64);
    }
    (
        ok,
        format!("handoff retransmissions on {rt_on} / off {rt_off}; worst delivered on/off {worst_ratio:.3}"),
    )
}

fn c7_policy() -> (bool, String) {
    let scs: Vec<Scenario> = (1..=10)
        .flat_map(|seed| {
            [HandoffPolicy::Direction, HandoffPolicy::GreedySnr].map(|policy| Scenario {
                seed,
                policy,
                ..Scenario::default()
            })
        })
        .collect();
    let reports = sim_all(&scs);
    let counts: Vec<(usize, usize)> = reports
        .chunks(2)
        .map(|p| (p[0].total_handoffs(), p[1].total_handoffs()))
        .collect();
    let exact = sim(&Scenario {
        exact_estimation: true,
        ..Scenario::default()
    })
    .total_handoffs();
    let ok = counts.iter().all(|(d, g)| d <= g) && exact == 5;
    let (d, g): (usize, usize) = counts.iter().fold((0, 0), |a, c| (a.0 + c.0, a.1 + c.1));
    (
        ok,
        format!("handoffs direction {d} / greedy {g} over 10 seeds; exact tour {exact}"),
    )
}

fn c8_trends(suite_start: Instant, budget: Duration) -> (bool, String) {
    let seeds = [1, 2, 3];
    let ratios: Vec<f64> = (1..=4)
        .map(|n| {
            let dirf = Scenario::default().with_client_count(n);
            let omrf = Scenario {
                mode: RfMode::Omrf,
                ..dirf.clone()
            };
            let scs: Vec<Scenario> = seeds
                .iter()
                .flat_map(|&seed| [&dirf, &omrf].map(|s| Scenario { seed, ..s.clone() }))
                .collect();
            let mbps: Vec<f64> = sim_all(&scs)
                .iter()
                .map(MetricsReport::mean_client_throughput_mbps)
                .collect();
            let (d, o): (f64, f64) = mbps.chunks(2).fold((0.0, 0.0), |a, p| (a.0 + p[0], a.1 + p[1]));
            d / o
        })
        .collect();
    let aps: Vec<Scenario> = [2, 4, 6]
        .iter()
        .map(|&n| Scenario::default().with_ap_count(n).unwrap())
        .collect();
    let tput: Vec<f64> = sim_all(&aps)
        .iter()
        .map(MetricsReport::mean_client_throughput_mbps)
        .collect();
    let bw = sim_all(&[
        Scenario::default(),
        Scenario {
            bandwidth: Bandwidth::Mhz40,
            ..Scenario::default()
        },
    ]);
    let bw_ratio = bw[1].mean_client_throughput_mbps() / bw[0].mean_client_throughput_mbps();
    let elapsed = suite_start.elapsed();
    let ok = ratios[0] > 1.0
        && ratios.windows(2).all(|w| w[1] > w[0])
        && tput.windows(2).all(|w| w[1] >= w[0])
        && (1.8..=2.0).contains(&bw_ratio)
        && elapsed < budget;
    let r: Vec<String> = ratios.iter().map(|x| format!("{x:.3}")).collect();
    let t: Vec<String> = tput.iter().map(|x| format!("{x:.2}")).collect();
    (
        ok,
        format!(
            "DiRF/OmRF by clients [{}]; Mbps by APs 2/4/6 [{}]; 40/20 MHz {bw_ratio:.3}; suite so far {:.1}s",
            r.join(", "),
            t.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn c9_determinism() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let mut identical = true;
    for sc in [
        Scenario {
            record_packets: true,
            ..Scenario::default()
        },
        Scenario {
            seed: 17,
            record_packets: true,
            ..Scenario::default().with_client_count(3)
        },
    ] {
        let outs: Vec<Vec<Vec<u8>>> = (0..2)
            .map(|i| {
                let sub = dir.path().join(format!("{}-{}-{i}", sc.seed, sc.clients.len()));
                std::fs::create_dir_all(&sub).unwrap();
                let files = emit_report(&sim(&sc), &sub, Format::Csv).unwrap();
                files.iter().map(|f| std::fs::read(f).unwrap()).collect()
            })
            .collect();
        identical &= outs[0] == outs[1];
    }
    let (runs, bad) = (RUNS.load(Ordering::Relaxed), UNCONSERVED.load(Ordering::Relaxed));
    (
        identical && bad == 0,
        format!(
            "re-runs byte-identical: {identical}; {} of {} runs conserve packets",
            runs - bad,
            runs
        ),
    )
}

type Check = Box<dyn Fn() -> (bool, String)>;

fn main() {
    let suite_start = Instant::now();
    let budget = Duration::from_secs(300);
    let checks: [(&str, Check); 9] = [
        ("gradient matches finite differences", Box::new(c1_gradient)),
        ("estimation error shrinks with walk length", Box::new(c2_estimation)),
        ("selection accuracy", Box::new(c3_selection)),
        ("select_ap equals brute force", Box::new(c4_select_ap)),
        ("marking-rate inversion", Box::new(c5_inversion)),
        ("ECN scheduler on vs off", Box::new(c6_scheduler)),
        ("direction policy vs greedy SNR", Box::new(c7_policy)),
        (
            "throughput trends and time budget",
            Box::new(move || c8_trends(suite_start, budget)),
        ),
        ("determinism and packet conservation", Box::new(c9_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!(
            "{} criterion {}: {name}: {detail} ({:.2}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        9 - failed,
        suite_start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
