use proptest::prelude::*;

use super::*;
use crate::formula::{parse, parse_kb, truth_table};
use crate::normalize::{merge_weighted, to_sdnf};
use crate::rbm::{compile, compile_weighted};
use crate::testutil::arb_formula;

fn compiled(src: &str) -> (RbmModel, VarTable) {
    let (f, vt) = parse(src).unwrap();
    let cs = to_sdnf(&f).unwrap().with_var_count(vt.len());
    (compile(&cs, 0.5, 1.0).unwrap().model, vt)
}

fn cfg(seed: u64, max_samples: u64) -> SamplerConfig {
    SamplerConfig {
        seed,
        max_samples,
        ..SamplerConfig::default()
    }
}

fn accepted_bits(log: &SampleLog) -> Vec<Vec<u8>> {
    log.accepted.keys().map(|a| a.bits().to_vec()).collect()
}

#[test]
fn zero_model_bits_are_fair_coins() {
    let m = RbmModel::zeros(4, 3);
    let ev = Evidence::none(4);
    let mut rng = chain_rng(1, 0);
    let mut x = Assignment::zeros(4);
    let mut ones = [0u32; 4];
    let n = 20_000;
    for _ in 0..n {
        x = gibbs_step(&m, &x, &ev, &mut rng).unwrap();
        for (o, &b) in ones.iter_mut().zip(x.bits()) {
            *o += b as u32;
        }
    }
    for o in ones {
        let p = o as f64 / n as f64;
        assert!((p - 0.5).abs() < 0.02, "{p}");
    }
}

#[test]
fn fully_clamped_state_is_fixed() {
    let (m, vt) = compiled("(x ^ y) <-> z");
    let ev = Evidence::parse("x=1,y=0,z=0", &vt).unwrap();
    let x = Assignment::from_bits(vec![1, 0, 0]).unwrap();
    let mut rng = chain_rng(3, 0);
    for _ in 0..50 {
        assert_eq!(gibbs_step(&m, &x, &ev, &mut rng).unwrap(), x);
    }
}

#[test]
fn gibbs_step_rejects_inconsistent_input() {
    let (m, vt) = compiled("(x ^ y) <-> z");
    let ev = Evidence::parse("z=1", &vt).unwrap();
    let x = Assignment::from_bits(vec![0, 0, 0]).unwrap();
    assert!(gibbs_step(&m, &x, &ev, &mut chain_rng(0, 0)).is_err());
    assert!(gibbs_step(&m, &Assignment::zeros(2), &Evidence::none(2), &mut chain_rng(0, 0)).is_err());
}

#[test]
fn low_temperature_concentrates_on_satisfying_states() {
    let (mut m, vt) = compiled("(x ^ y) <-> z");
    m.temperature = 0.05;
    let ev = Evidence::parse("z=0", &vt).unwrap();
    let mut rng = chain_rng(11, 0);
    let mut x = Assignment::zeros(3);
    for _ in 0..1000 {
        x = gibbs_step(&m, &x, &ev, &mut rng).unwrap();
    }
    let mut hits = 0;
    for _ in 0..10_000 {
        x = gibbs_step(&m, &x, &ev, &mut rng).unwrap();
        hits += matches!(x.bits(), [0, 0, 0] | [1, 1, 0]) as u32;
    }
    assert!(hits as f64 / 10_000.0 >= 0.95, "{hits}");
}

#[test]
fn evidence_parsing() {
    let vt = VarTable::from_names(["r", "n", "q", "p"]).unwrap();
    let ev = Evidence::parse("n=1, q=0", &vt).unwrap();
    assert_eq!(ev.free(), [0, 3]);
    assert_eq!(ev.clamped().iter().collect::<Vec<_>>(), [(&1, &1), (&2, &0)]);
    assert!(Evidence::parse("", &vt).unwrap().clamped().is_empty());
    assert!(matches!(Evidence::parse("w=1", &vt), Err(Error::UnknownVariable(_))));
    assert!(matches!(Evidence::parse("n", &vt), Err(Error::InvalidArgument(_))));
    assert!(matches!(Evidence::parse("n=2", &vt), Err(Error::InvalidArgument(_))));
    assert!(Evidence::parse("n=1,n=0", &vt).is_err());
    assert!(Evidence::new(2, [(2, true)]).is_err());
}

#[test]
fn pipeline_class_finds_exactly_the_models() {
    let (m, _) = compiled("a & b & c & (d | e)");
    let log = search(&m, &Evidence::none(5), &cfg(5, 20_000)).unwrap();
    assert_eq!(
        accepted_bits(&log),
        [vec![1, 1, 1, 0, 1], vec![1, 1, 1, 1, 0], vec![1, 1, 1, 1, 1]]
    );
    assert_eq!(log.samples_drawn, 20_000);
    assert_eq!(log.stop, StopReason::Exhausted);
}

#[test]
fn unsatisfiable_model_accepts_nothing() {
    let (f, _) = parse("x & ~x").unwrap();
    assert!(to_sdnf(&f).unwrap().is_empty());
    let m = RbmModel::zeros(1, 0);
    let log = search(&m, &Evidence::none(1), &cfg(0, 5_000)).unwrap();
    assert!(log.accepted.is_empty());
}

#[test]
fn negated_head_rules_out_the_body() {
    let (m, vt) = compiled("y <- x1 & ~x2");
    let ev = Evidence::parse("y=0", &vt).unwrap();
    let log = search(&m, &ev, &cfg(2, 20_000)).unwrap();
    assert!(!log.accepted.is_empty());
    let (y, x1, x2) = (
        vt.lookup("y").unwrap(),
        vt.lookup("x1").unwrap(),
        vt.lookup("x2").unwrap(),
    );
    for a in log.accepted.keys() {
        assert_eq!(a.bits()[y], 0);
        assert!(!(a.bits()[x1] == 1 && a.bits()[x2] == 0), "{a}");
    }
    assert_eq!(log.accepted.len(), 3);
}

#[test]
fn target_stops_early() {
    let (m, _) = compiled("a & b & c & (d | e)");
    let config = SamplerConfig {
        target: Some(3),
        round: 100,
        ..cfg(5, 1_000_000)
    };
    let log = search(&m, &Evidence::none(5), &config).unwrap();
    assert_eq!(log.stop, StopReason::TargetReached);
    assert!(log.samples_drawn < 1_000_000);
    assert_eq!(log.accepted.len(), 3);
}

#[test]
fn search_is_reproducible_and_chain_split_is_deterministic() {
    let (m, _) = compiled("(a | b) & (c -> d) & ~(e & a)");
    let ev = Evidence::none(5);
    for chains in [1, 3] {
        let config = SamplerConfig {
            chains,
            round: 777,
            ..cfg(42, 10_001)
        };
        let a = search(&m, &ev, &config).unwrap();
        let b = search(&m, &ev, &config).unwrap();
        assert_eq!(a.accepted, b.accepted);
        assert_eq!(a.samples_drawn, 10_001);
        // The round length only sets synchronisation points.
        let c = search(&m, &ev, &SamplerConfig { round: 50, ..config }).unwrap();
        assert_eq!(a.accepted, c.accepted);
    }
}

#[test]
fn csv_log_has_one_row_per_sample() {
    let (m, _) = compiled("(x ^ y) <-> z");
    let mut out = Vec::new();
    let config = SamplerConfig {
        chains: 2,
        ..cfg(9, 101)
    };
    let log = search_logged(&m, &Evidence::none(3), &config, Some(&mut out), Some(4)).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut rows = text.lines();
    assert_eq!(
        rows.next(),
        Some("sample_index,chain_id,free_energy,accepted,coverage_so_far")
    );
    let rows: Vec<Vec<&str>> = rows.map(|r| r.split(',').collect()).collect();
    assert_eq!(rows.len(), 101);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0].parse::<usize>().unwrap(), i + 1);
        assert_eq!(r[1].parse::<usize>().unwrap(), i % 2);
    }
    let last: f64 = rows.last().unwrap()[4].parse().unwrap();
    assert_eq!(last, log.accepted.len() as f64 / 4.0);
}

#[test]
fn merge_is_a_union_with_earliest_index() {
    let a = |bits: &[u8]| Assignment::from_bits(bits.to_vec()).unwrap();
    let mk = |items: &[(&[u8], u64)]| {
        let mut log = SampleLog::empty();
        for (bits, i) in items {
            log.accepted.insert(a(bits), Accepted { first_seen: *i });
        }
        log.samples_drawn = 10;
        log
    };
    let x = mk(&[(&[0, 1], 4), (&[1, 1], 9)]);
    let y = mk(&[(&[1, 1], 2)]);
    let z = mk(&[(&[0, 0], 7), (&[0, 1], 1)]);
    let left = x.clone().merge(y.clone()).merge(z.clone());
    let right = x.clone().merge(y.clone().merge(z.clone()));
    let swapped = z.merge(x).merge(y);
    assert_eq!(left.accepted, right.accepted);
    assert_eq!(left.accepted, swapped.accepted);
    assert_eq!(left.accepted[&a(&[1, 1])].first_seen, 2);
    assert_eq!(left.accepted[&a(&[0, 1])].first_seen, 1);
    assert_eq!(left.samples_drawn, 30);
}

#[test]
fn invalid_configs_are_rejected() {
    let m = RbmModel::zeros(2, 1);
    let ev = Evidence::none(2);
    for bad in [
        SamplerConfig {
            max_samples: 0,
            ..Default::default()
        },
        SamplerConfig {
            temperature: 0.0,
            ..Default::default()
        },
        SamplerConfig {
            confidence: -1.0,
            ..Default::default()
        },
        SamplerConfig {
            chains: 0,
            ..Default::default()
        },
        SamplerConfig {
            epsilon: 1.0,
            ..Default::default()
        },
    ] {
        assert!(search(&m, &ev, &bad).is_err(), "{bad:?}");
    }
    assert!(search(&m, &Evidence::none(3), &SamplerConfig::default()).is_err());
}

#[test]
fn rank_xor_completion() {
    let (m, vt) = compiled("(x ^ y) <-> z");
    let ev = Evidence::parse("x=1,y=1", &vt).unwrap();
    let ranked = rank_exact(&m, &ev, 5.0).unwrap();
    assert_eq!(ranked.len(), 2);
    assert_eq!(ranked[0].assignment.bits(), [1, 1, 0]);
    assert!(ranked[0].probability > 0.9);
    // Two-term comparison: p(z=0) = 1 / (1 + exp(F0 - F1)).
    let f0 = m.free_energy(&[1, 1, 0], 5.0).unwrap();
    let f1 = m.free_energy(&[1, 1, 1], 5.0).unwrap();
    assert!((ranked[0].probability - 1.0 / (1.0 + (f0 - f1).exp())).abs() < 1e-12);
}

#[test]
fn rank_zero_model_is_uniform() {
    let m = RbmModel::zeros(4, 2);
    let ranked = rank_exact(&m, &Evidence::none(4), 5.0).unwrap();
    assert_eq!(ranked.len(), 16);
    for (k, r) in ranked.iter().enumerate() {
        assert!((r.probability - 1.0 / 16.0).abs() < 1e-15);
        // Ties keep lexicographic order.
        assert_eq!(r.assignment, Assignment::from_index(4, k as u64));
    }
}

#[test]
fn rank_nixon_with_n_true() {
    let kb = parse_kb("1000 : r <- n\n1000 : q <- n\n10 : ~p <- r\n10 : p <- q\n").unwrap();
    let sets: Vec<_> = kb
        .rules
        .iter()
        .map(|r| (r.weight.unwrap(), to_sdnf(&r.formula).unwrap()))
        .collect();
    let ws = merge_weighted(&sets).unwrap().with_var_count(kb.vars.len());
    let m = compile_weighted(&ws, 0.5).unwrap().model;
    let ev = Evidence::parse("n=1", &kb.vars).unwrap();
    let ranked = rank_exact(&m, &ev, 0.01).unwrap();
    let (r, q) = (kb.vars.lookup("r").unwrap(), kb.vars.lookup("q").unwrap());

    // Weighted satisfaction of the four rules over the 8 completions.
    let score = |b: &[u8]| {
        let (r, n, q, p) = (b[0] == 1, b[1] == 1, b[2] == 1, b[3] == 1);
        1000.0 * ((r || !n) as u8 as f64)
            + 1000.0 * ((q || !n) as u8 as f64)
            + 10.0 * ((!p || !r) as u8 as f64)
            + 10.0 * ((p || !q) as u8 as f64)
    };
    let best = (0..8u64)
        .map(|k| {
            let mut b = Assignment::from_index(3, k).into_bits();
            b.insert(1, 1);
            score(&b)
        })
        .fold(f64::MIN, f64::max);
    let top = &ranked[0].assignment;
    assert_eq!((top.bits()[r], top.bits()[q]), (1, 1));
    assert_eq!(score(top.bits()), best);
    assert!(ranked[1].assignment.bits()[r] == 1 && ranked[1].assignment.bits()[q] == 1);
}

#[test]
fn rank_guard_and_normalisation() {
    let m = RbmModel::zeros(21, 1);
    assert!(matches!(
        rank_exact(&m, &Evidence::none(21), 1.0),
        Err(Error::EnumerationGuard { vars: 21, limit: 20 })
    ));
    let ev = Evidence::new(21, [(0, true)]).unwrap();
    let (big, _) = compiled("a & (b | c) & ~(d ^ e)");
    let ranked = rank_exact(&big, &Evidence::none(5), 5.0).unwrap();
    let total: f64 = ranked.iter().map(|r| r.probability).sum();
    assert!((total - 1.0).abs() < 1e-9);
    for w in ranked.windows(2) {
        assert!(w[0].probability >= w[1].probability);
        assert!(w[0].free_energy <= w[1].free_energy + 1e-12);
    }
    // With one variable clamped, 20 free is still within the guard.
    let tiny = RbmModel::zeros(21, 0);
    assert_eq!(rank_exact(&tiny, &ev, 1.0).unwrap().len(), 1 << 20);
}

#[test]
fn empirical_marginal_matches_exact() {
    let (m, _) = compiled("(x | y) & (y -> z)");
    let config = SamplerConfig {
        chains: 4,
        burn_in: 100,
        ..cfg(8, 200_000)
    };
    let counts = sample_histogram(&m, &Evidence::none(3), &config).unwrap();
    let total: u64 = counts.iter().sum();
    assert_eq!(total, 200_000);
    // At tau = 1 the visible marginal is proportional to exp(-F(x)) with c = 1.
    let exact: Vec<f64> = (0..8u64)
        .map(|k| (-m.free_energy(Assignment::from_index(3, k).bits(), 1.0).unwrap()).exp())
        .collect();
    let z: f64 = exact.iter().sum();
    let tv: f64 = exact
        .iter()
        .zip(&counts)
        .map(|(e, &c)| (e / z - c as f64 / total as f64).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.02, "tv = {tv}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn accepted_samples_satisfy_the_formula(f in arb_formula(8), seed in any::<u64>()) {
        let vt = VarTable::from_names((0..8).map(|i| format!("v{i}"))).unwrap();
        let cs = to_sdnf(&f).unwrap().with_var_count(8);
        prop_assume!(!cs.is_empty());
        let m = compile(&cs, 0.5, 1.0).unwrap().model;
        let log = search(&m, &Evidence::none(8), &cfg(seed, 3_000)).unwrap();
        let table = truth_table(&f, &vt).unwrap();
        for a in log.accepted.keys() {
            let k = a.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            prop_assert_eq!(table[k].1, 1, "{}", a);
        }
    }

    #[test]
    fn clamped_bits_never_move(seed in any::<u64>(), clamp in proptest::collection::btree_map(0usize..5, any::<bool>(), 0..5)) {
        let (m, _) = compiled("(a | b) & (c -> d) & ~(e & a)");
        let ev = Evidence::new(5, clamp).unwrap();
        let mut bits = vec![0u8; 5];
        ev.apply(&mut bits);
        let mut x = Assignment::from_bits(bits).unwrap();
        let mut rng = chain_rng(seed, 0);
        for _ in 0..200 {
            x = gibbs_step(&m, &x, &ev, &mut rng).unwrap();
            prop_assert!(ev.respected_by(x.bits()));
        }
        let log = search(&m, &ev, &cfg(seed, 500)).unwrap();
        for a in log.accepted.keys() {
            prop_assert!(ev.respected_by(a.bits()));
        }
    }
}
