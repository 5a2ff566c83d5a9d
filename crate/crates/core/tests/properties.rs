use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wsn_fuzzy::geometry::{euclidean, kmeans, within_sse, Point2D, MAX_ITERATIONS};
use wsn_fuzzy::report::{fmt_f64, read_rows, write_rounds, RoundRow};
use wsn_fuzzy::rules::{FuzzyParams, FuzzySystem};
use wsn_fuzzy::sim::{simulate, SimConfig, LEDGER_TOLERANCE};
use wsn_fuzzy::ProtocolKind;

fn point() -> impl Strategy<Value = Point2D> {
    (0.0..100.0f64, 0.0..100.0f64).prop_map(|(x, y)| Point2D::new(x, y))
}

fn system() -> FuzzySystem {
    FuzzySystem::new(&FuzzyParams::default(), 1.5).unwrap()
}

proptest! {
    #[test]
    fn euclidean_is_a_metric(p in point(), q in point(), r in point()) {
        prop_assert_eq!(euclidean(p, q), euclidean(q, p));
        prop_assert!(euclidean(p, r) <= euclidean(p, q) + euclidean(q, r) + 1e-9);
        prop_assert!(euclidean(p, p) == 0.0);
    }

    #[test]
    fn kmeans_invariants(pts in prop::collection::vec(point(), 3..40), k in 1usize..6, seed: u64) {
        let k = k.min(pts.len());
        let indexed: Vec<_> = pts.iter().enumerate().map(|(i, p)| (i as u32, *p)).collect();
        let layout = kmeans(&indexed, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();

        prop_assert!(layout.sse_history.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        prop_assert!(layout.sizes().iter().all(|&n| n >= 1));
        prop_assert_eq!(layout.sizes().iter().sum::<usize>(), pts.len());
        let labels: Vec<usize> = layout.assignment.clone();
        prop_assert!((within_sse(&pts, &labels, k) - layout.sse()).abs() <= 1e-6 * (1.0 + layout.sse()));
        if layout.iterations < MAX_ITERATIONS {
            for c in 0..k {
                let members: Vec<&Point2D> = pts.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
                let mx = members.iter().map(|p| p.x).sum::<f64>() / members.len() as f64;
                let my = members.iter().map(|p| p.y).sum::<f64>() / members.len() as f64;
                prop_assert!((layout.centers[c].x - mx).abs() < 1e-9);
                prop_assert!((layout.centers[c].y - my).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kmeans_ignores_input_order(pts in prop::collection::vec(point(), 4..25), seed: u64, rot in 0usize..25) {
        let indexed: Vec<_> = pts.iter().enumerate().map(|(i, p)| (i as u32, *p)).collect();
        let mut shuffled = indexed.clone();
        shuffled.reverse();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        let a = kmeans(&indexed, 3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = kmeans(&shuffled, 3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn more_battery_never_lowers_election_score(
        b1 in 0.0..1.5f64, b2 in 0.0..1.5f64, c in 0.0..75.0f64, d in 0.0..150.0f64,
    ) {
        let sys = system();
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(sys.election_score(hi, c, d).unwrap() >= sys.election_score(lo, c, d).unwrap() - 1e-9);
    }

    #[test]
    fn relay_score_monotone(b1 in 0.0..1.5f64, b2 in 0.0..1.5f64, d1 in 0.0..100.0f64, d2 in 0.0..100.0f64) {
        let sys = system();
        let (blo, bhi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        let (dlo, dhi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(sys.relay_score(bhi, dlo).unwrap() >= sys.relay_score(blo, dlo).unwrap() - 1e-9);
        prop_assert!(sys.relay_score(bhi, dlo).unwrap() >= sys.relay_score(bhi, dhi).unwrap() - 1e-9);
    }

    #[test]
    fn scores_stay_within_centroid_range(b in 0.0..1.5f64, c in 0.0..75.0f64, d in 0.0..150.0f64) {
        let s = system().election_score(b, c, d).unwrap();
        prop_assert!((10.0..=90.0).contains(&s));
    }

    #[test]
    fn numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ledger_closes_and_series_decline(seed in 0u64..10_000, which in 0usize..3, nodes in 5usize..60) {
        let mut cfg = SimConfig {
            protocol: ProtocolKind::ALL[which],
            seed,
            rounds: 300,
            clusters: 4,
            ..SimConfig::default()
        };
        cfg.heterogeneity.nodes = nodes;
        // drain fast enough to see deaths
        cfg.heterogeneity.energies.normal = 0.03;
        cfg.heterogeneity.energies.advanced = 0.05;
        cfg.heterogeneity.energies.super_ = 0.08;
        let run = simulate(&cfg).unwrap();
        for m in &run.metrics {
            prop_assert!(m.ledger_gap.abs() <= LEDGER_TOLERANCE);
        }
        for w in run.metrics.windows(2) {
            prop_assert!(w[1].alive <= w[0].alive);
            prop_assert!(w[1].residual_j <= w[0].residual_j);
        }
        if let Some(f) = run.fnd {
            let first_drop = run.metrics.iter().position(|m| m.alive < nodes).map(|i| i as u64 + 1);
            prop_assert_eq!(Some(f), first_drop);
        }
    }
}

#[test]
fn rounds_csv_round_trips() {
    for p in ProtocolKind::ALL {
        let cfg = SimConfig { protocol: p, rounds: 200, ..SimConfig::default() };
        let run = simulate(&cfg).unwrap();
        let mut buf = Vec::new();
        write_rounds(&mut buf, &run).unwrap();
        let rows: Vec<RoundRow> = read_rows(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), run.metrics.len());
        for (r, m) in rows.iter().zip(&run.metrics) {
            assert_eq!(r.round, m.round);
            assert_eq!(r.alive, m.alive);
            assert_eq!(r.residual_j, m.residual_j);
            assert_eq!(r.ch_count, m.ch_count);
            assert_eq!(r.relay_count, m.relay_count);
        }
    }
}

#[test]
fn fuzzy_keeps_everyone_alive_early() {
    let run = simulate(&SimConfig { rounds: 1000, ..SimConfig::default() }).unwrap();
    assert!(run.metrics.iter().all(|m| m.alive == 100));
    assert!(run.metrics.iter().all(|m| m.ch_count == 5));
}
