use super::*;
use crate::formula::truth_table;

fn clause(pos: &[usize], neg: &[usize]) -> Clause {
    Clause::new(pos.to_vec(), neg.to_vec()).unwrap()
}

#[test]
fn class_sdnf_small_cases() {
    // x1 x2 x3 !x4 and x1 x2 x4, zero-based.
    let cs = build_class_sdnf(PipelineFormula::new(2, 2).unwrap()).unwrap();
    assert_eq!(cs.clauses(), [clause(&[0, 1, 2], &[3]), clause(&[0, 1, 3], &[])]);
    let cs = build_class_sdnf(PipelineFormula::new(0, 1).unwrap()).unwrap();
    assert_eq!(cs.clauses(), [clause(&[0], &[])]);
    let big = PipelineFormula::new(20, 10).unwrap();
    let cs = build_class_sdnf(big).unwrap();
    assert_eq!(cs.len(), 10);
    for (k, c) in cs.clauses().iter().enumerate() {
        assert_eq!(c.pos().len(), 21);
        assert_eq!(c.neg().len(), 9 - k);
    }
    assert!(PipelineFormula::new(3, 0).is_err());
}

#[test]
fn class_sdnf_is_strict_and_equivalent() {
    for m in 0..=4 {
        for n in 1..=4 {
            let pf = PipelineFormula::new(m, n).unwrap();
            let cs = build_class_sdnf(pf).unwrap();
            assert!(cs.verify_strict().unwrap());
            let table = truth_table(&pf.formula(), &pf.vars()).unwrap();
            let mut models = 0;
            for (a, s) in table {
                assert_eq!(cs.holds(a.bits()), s == 1, "M={m} N={n} {a}");
                assert_eq!(pf.is_satisfying(a.bits()), s == 1);
                models += s as u64;
            }
            assert_eq!(models, pf.model_count());
            let listed: Vec<Vec<u8>> = pf.satisfying().collect();
            assert_eq!(listed.len() as u64, pf.model_count());
            assert!(listed.iter().all(|b| pf.is_satisfying(b)));
        }
    }
}

#[test]
fn coverage_on_a_desk_scale_class() {
    let pf = PipelineFormula::new(6, 3).unwrap();
    let cfg = SamplerConfig {
        seed: 17,
        max_samples: 200_000,
        ..SamplerConfig::default()
    };
    let report = run_coverage(pf, &cfg, 4, 10_000).unwrap();
    assert_eq!(report.runs.len(), 4);
    assert!(!report.vacuous);
    for run in &report.runs {
        assert_eq!(run.false_accepts, 0);
        assert!(run.samples_to_full.is_some());
        assert_eq!(run.checkpoints.len(), 20);
        for w in run.checkpoints.windows(2) {
            assert!(w[0].coverage <= w[1].coverage);
            assert!(w[0].wall_time <= w[1].wall_time);
        }
        assert!(run.checkpoints.iter().all(|c| c.accuracy == 1.0));
        assert_eq!(run.checkpoints.last().unwrap().coverage, 1.0);
    }
    assert_eq!(report.full_coverage_runs(), 4);
    assert!(report.search_space_ratio().unwrap() > 0.0);
    let last = report.summary.last().unwrap();
    assert_eq!((last.coverage_mean, last.coverage_sd), (1.0, 0.0));

    let again = run_coverage(pf, &cfg, 4, 10_000).unwrap();
    for (a, b) in report.runs.iter().zip(&again.runs) {
        assert_eq!(a.samples_to_full, b.samples_to_full);
        let cov = |r: &CoverageRun| {
            r.checkpoints
                .iter()
                .map(|c| (c.samples, c.coverage))
                .collect::<Vec<_>>()
        };
        assert_eq!(cov(a), cov(b));
    }
}

#[test]
fn no_samples_is_vacuous() {
    let pf = PipelineFormula::new(2, 2).unwrap();
    let cfg = SamplerConfig {
        max_samples: 0,
        ..SamplerConfig::default()
    };
    let report = run_coverage(pf, &cfg, 1, 10).unwrap();
    assert!(report.vacuous);
    let cp = report.runs[0].checkpoints[0];
    assert_eq!((cp.samples, cp.coverage, cp.accuracy), (0, 0.0, 1.0));
}

#[test]
fn checkpoints_follow_the_cadence() {
    let pf = PipelineFormula::new(2, 2).unwrap();
    let cfg = SamplerConfig {
        seed: 1,
        max_samples: 2_500,
        chains: 2,
        ..SamplerConfig::default()
    };
    let report = run_coverage(pf, &cfg, 2, 1_000).unwrap();
    let marks: Vec<u64> = report.runs[0].checkpoints.iter().map(|c| c.samples).collect();
    assert_eq!(marks, [1_000, 2_000, 2_500]);
    let mut out = Vec::new();
    report.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("run_id,samples,coverage,accuracy\n"));
    assert_eq!(text.lines().count(), 1 + 6);
}

#[test]
fn timing_rows_and_csv() {
    let cfg = SamplerConfig {
        seed: 2,
        max_samples: 1_000_000,
        round: 500,
        ..SamplerConfig::default()
    };
    assert!(run_timing(4, &[], &cfg, 3, None).unwrap().is_empty());
    let rows = run_timing(4, &[1, 2], &cfg, 2, None).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| !r.censored && r.seconds >= 0.0 && r.samples > 0));
    let mut out = Vec::new();
    write_timing_csv(&rows, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().next(), Some("M,N,run_id,seconds,censored"));

    let tiny = SamplerConfig { max_samples: 5, ..cfg };
    let rows = run_timing(12, &[3], &tiny, 1, None).unwrap();
    assert!(rows[0].censored);
}

#[test]
fn interpolation_between_sync_points() {
    let p = |s, ms| Progress {
        samples: s,
        elapsed: Duration::from_millis(ms),
    };
    let progress = [p(100, 10), p(200, 30)];
    assert_eq!(interpolate_time(&progress, 50), Duration::from_millis(5));
    assert_eq!(interpolate_time(&progress, 150), Duration::from_millis(20));
    assert_eq!(interpolate_time(&progress, 500), Duration::from_millis(30));
}
