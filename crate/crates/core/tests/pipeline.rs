use sparse_pr::harness::{
    emit_report, gen_instance, inject_noise, mid_gap_tau, parse_curve_csv, run_curve, run_curve_in_pool, Algorithm,
    BenchConfig, InstanceConfig, Manifest, NoiseConfig, NoiseMode,
};
use sparse_pr::noisy_support::NoisySupportParams;
use sparse_pr::recovery::{
    collision_graph, direct_applicable, rank_one_approx, solve_sdp_equality_report, tspr, tspr_noisy, NoisyOptions,
    SdpMethod, SdpSettings, TsprOptions,
};
use sparse_pr::{autocorrelation, distance_set, equivalent, SupportSet};

#[test]
fn noiseless_recovery_at_moderate_sparsity() {
    for k in 6..=14 {
        let mut ok = 0;
        for i in 0..5 {
            let x = gen_instance(&InstanceConfig::uniform(4096, k, 31 * k as u64 + i)).unwrap();
            if let Ok(y) = tspr(&autocorrelation(&x), &TsprOptions::default()) {
                assert!(
                    equivalent(&x, &y, 1e-6).unwrap(),
                    "k={k} seed {i}: wrong signal accepted"
                );
                ok += 1;
            }
        }
        assert!(ok >= 4, "k={k}: {ok}/5");
    }
}

#[test]
fn noisy_pipeline_reduces_to_noiseless() {
    for i in 0..10 {
        let x = gen_instance(&InstanceConfig::uniform(4096, 8, 500 + i)).unwrap();
        let a = autocorrelation(&x);
        let Ok(y) = tspr(&a, &TsprOptions::default()) else {
            continue;
        };
        let opts = NoisyOptions {
            support: NoisySupportParams {
                tau: 1e-9 * a.energy(),
                ..Default::default()
            },
            ..Default::default()
        };
        let (z, lifted) = tspr_noisy(&a, &opts).unwrap();
        assert!(equivalent(&y, &z, 1e-6).unwrap());
        assert!(lifted.lift_error(&x).unwrap() < 1e-6 * a.energy());
    }
}

#[test]
fn noisy_error_within_bound() {
    let eta = 1e-3;
    for i in 0..10 {
        let x = gen_instance(&InstanceConfig::uniform(2048, 8, 700 + i)).unwrap();
        let a = autocorrelation(&x);
        let noisy = inject_noise(
            &a,
            &NoiseConfig {
                eta,
                mode: NoiseMode::GaussianScaled,
            },
            i,
        )
        .unwrap()
        .a;
        let opts = NoisyOptions {
            support: NoisySupportParams {
                tau: mid_gap_tau(&a, &noisy).unwrap(),
                ..Default::default()
            },
            eta,
            ..Default::default()
        };
        if let Ok((_, lifted)) = tspr_noisy(&noisy, &opts) {
            assert!(lifted.lift_error(&x).unwrap() <= 4.0 * 8.0 * eta);
        }
    }
}

#[test]
fn direct_and_splitting_agree() {
    let mut compared = 0;
    for k in 6..=10 {
        for i in 0..4 {
            let x = gen_instance(&InstanceConfig::uniform(64, k, 90 * k as u64 + i)).unwrap();
            let a = autocorrelation(&x);
            let u = SupportSet::canonical(x.support()).unwrap();
            if !direct_applicable(&collision_graph(&u, &distance_set(&u))) {
                continue;
            }
            let solve = |method| {
                solve_sdp_equality_report(
                    &a,
                    &u,
                    &SdpSettings {
                        method,
                        ..Default::default()
                    },
                )
            };
            let (Ok((d, rd)), Ok((s, _))) = (solve(SdpMethod::DirectGraph), solve(SdpMethod::Splitting)) else {
                continue;
            };
            assert_eq!(rd.method, SdpMethod::DirectGraph);
            assert!(d.is_psd(1e-8) && s.is_psd(1e-8));
            assert!(d.lift_error(&x).unwrap() <= 1e-6 * a.energy());
            let xd = rank_one_approx(&d).unwrap();
            let xs = rank_one_approx(&s).unwrap();
            assert!(equivalent(&xd, &xs, 1e-3).unwrap(), "k={k} seed {i}");
            compared += 1;
        }
    }
    assert!(compared >= 5, "only {compared} comparable instances");
}

#[test]
fn serial_and_parallel_curves_agree() {
    let grid = [(48, 2), (48, 5), (96, 4)];
    for alg in [Algorithm::Tspr, Algorithm::KnownSupportSdp, Algorithm::Fienup] {
        let cfg = BenchConfig {
            alg,
            trials: 6,
            base_seed: 17,
            fienup_inits: 3,
            fienup_iters: 40,
            ..Default::default()
        };
        let serial = run_curve(&grid, &BenchConfig { parallel: false, ..cfg }).unwrap();
        let pooled = run_curve_in_pool(&grid, &cfg, 3).unwrap();
        assert_eq!(serial.results.len(), pooled.results.len());
        for (a, b) in serial.results.iter().zip(&pooled.results) {
            assert_eq!((a.seed, a.n, a.k, a.success), (b.seed, b.n, b.k, b.success));
            assert!(a.residual.to_bits() == b.residual.to_bits());
        }
    }
}

#[test]
fn reports_are_byte_stable_and_parse_back() {
    let grid = [(40, 2), (40, 6)];
    let cfg = BenchConfig {
        trials: 5,
        base_seed: 3,
        ..Default::default()
    };
    let manifest = Manifest {
        command: "bench".into(),
        flags: [("grid".to_string(), "40:2,6".to_string())].into_iter().collect(),
        seed: 3,
        tool_version: "test".into(),
        started_at: None,
    };
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for name in ["a", "b"] {
        let rows = run_curve(&grid, &cfg).unwrap().rows;
        let files = emit_report(&rows, &manifest, &dir.path().join(name), false).unwrap();
        let csv = std::fs::read_to_string(&files.csv).unwrap();
        let parsed = parse_curve_csv(&csv).unwrap();
        assert_eq!(parsed.len(), rows.len());
        for (p, r) in parsed.iter().zip(&rows) {
            assert_eq!((p.n, p.k, p.trials, p.successes), (r.n, r.k, r.trials, r.successes));
            assert_eq!(p.rate, r.rate);
            assert!(p.mean_ms.is_none());
        }
        bytes.push([files.csv, files.plot, files.manifest].map(|f| std::fs::read(f).unwrap()));
    }
    assert_eq!(bytes[0], bytes[1]);
}
