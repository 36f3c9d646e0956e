//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test -p microdss-cli --test acceptance -- --nocapture`.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use microdss_core::characterization::{classify, FactTag};
use microdss_core::config::KernelConfig;
use microdss_core::fsf::{Coord, Fsf, QualifierValue, Selector, SelectorType, Value};
use microdss_core::prediction::{
    outcome_score, update_weight, ActionTemplate, CaseBase, Signature,
};
use microdss_core::proximity::{proximity, PolarityTable, ProximityConfig};
use microdss_core::representation::{AgentView, AutomatonState, LinkKind, RepresentationSnapshot};
use microdss_core::rng::SplitMix64;
use microdss_core::runner::{Policy, RunDriver};
use microdss_core::scenario::Scenario;

const SCENARIOS: [&str; 5] = [
    "cluster",
    "scattered",
    "regroup",
    "quiet",
    "adjacent-start",
];

fn manifest_path(relative: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(relative)
}

fn scenario_path(name: &str) -> PathBuf {
    manifest_path(&format!("../../scenarios/{name}.json"))
}

fn load_scenario(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name)).unwrap()
}

fn microdss() -> Command {
    Command::new(env!("CARGO_BIN_EXE_microdss"))
}

/// Whitespace normalizer independent of the parser: values and qualifiers
/// never contain commas or spaces, so the canonical form is the
/// comma-split tokens rejoined with ", ".
fn canonical_whitespace(line: &str) -> String {
    line.trim()
        .split(',')
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(", ")
}

#[test]
fn ac1_parser_round_trip_over_corpus() {
    let started = Instant::now();
    let corpus = fs::read_to_string(manifest_path("tests/data/fsf_corpus.txt")).unwrap();
    let lines: Vec<&str> = corpus.lines().filter(|l| !l.trim().is_empty()).collect();
    assert!(lines.len() >= 50, "corpus has only {} entries", lines.len());

    for line in &lines {
        let fsf = Fsf::parse(line).unwrap_or_else(|e| panic!("{line}: {e}"));
        assert_eq!(fsf.to_line(), canonical_whitespace(line), "canonical identity");
        assert_eq!(Fsf::parse(&fsf.to_line()).unwrap(), fsf, "parse∘serialize identity");
    }

    let reference = Fsf::parse(lines[0]).unwrap();
    assert_eq!(reference.selector(), Selector::new(SelectorType::Fire, 14));
    assert_eq!(reference.int_value("fieriness"), Some(1));
    assert_eq!(reference.int_value("inDangerNeighbours"), Some(3));
    assert_eq!(reference.int_value("burningNeighbours"), Some(2));
    assert_eq!(reference.location(), Coord::new(20, 25));
    assert_eq!(reference.time(), 7);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "AC-1 parser round-trip over {} corpus entries ({elapsed:?}): PASS",
        lines.len()
    );
}

fn random_feature(rng: &mut SplitMix64) -> Fsf {
    let selector_type = SelectorType::ALL[rng.next_below(4) as usize];
    Fsf::new(
        Selector::new(selector_type, rng.next_below(16)),
        vec![
            QualifierValue::new(
                "localisation",
                Value::Coordinate(Coord::new(
                    rng.next_below(16) as i32 - 4,
                    rng.next_below(16) as i32 - 4,
                )),
            ),
            QualifierValue::new("time", Value::Integer(rng.next_below(8) as i64)),
        ],
    )
    .unwrap()
}

#[test]
fn ac2_proximity_properties_over_ten_thousand_pairs() {
    let table = PolarityTable::fire_rescue();
    let cfg = ProximityConfig::default();
    let mut rng = SplitMix64::new(0xAC2);
    let mut nonzero = 0u32;
    for _ in 0..10_000 {
        let a = random_feature(&mut rng);
        let b = random_feature(&mut rng);
        let p = proximity(&a, &b, &table, &cfg);
        let q = proximity(&b, &a, &table, &cfg);
        assert_eq!(p.to_bits(), q.to_bits(), "symmetry");
        assert!(p.abs() <= 1.0, "bound");
        let polarity = table.polarity(
            a.selector().selector_type,
            b.selector().selector_type,
        );
        let distance = a.location().chebyshev(b.location());
        let dt = a.time().abs_diff(b.time());
        if distance >= cfg.d_max || dt >= cfg.t_max || polarity == 0 {
            assert_eq!(p, 0.0, "horizon/neutral zeroing");
        }
        if p != 0.0 {
            assert_eq!(p.signum() as i8, polarity, "sign agreement");
            nonzero += 1;
        }
    }
    assert!(nonzero > 1000, "only {nonzero} informative pairs sampled");

    let fire = Fsf::parse(
        "(fire#14, fieriness, 1, inDangerNeighbours, 3, burningNeighbours, 2, localisation, 20|25, time, 7)",
    )
    .unwrap();
    let brigade = Fsf::parse("(fireBrigade#1, localisation, 22|25, time, 7)").unwrap();
    let p = proximity(&fire, &brigade, &table, &cfg);
    assert!((p - (-0.8)).abs() < 1e-9, "hand-derived example: {p}");
    println!("AC-2 proximity properties over 10000 pairs: PASS");
}

fn agent_view(id: u64, i1: f64, i2: f64, born: u64) -> AgentView {
    AgentView {
        id,
        selector: Selector::new(SelectorType::Fire, id),
        state: AutomatonState::Developing,
        i1,
        i2,
        born_cycle: born,
        location: Coord::new(0, 0),
    }
}

fn snapshot_of(cycle: u64, agents: Vec<AgentView>) -> RepresentationSnapshot {
    RepresentationSnapshot {
        cycle,
        agents,
        links: Vec::new(),
        retired: Vec::new(),
    }
}

#[test]
fn ac3_characterization_partitions_every_cycle() {
    // The classification rule table on indicator movements.
    let eps = 1e-6;
    let cases = [
        ((0.4, 0.2), (0.5, 0.2), "active"),
        ((0.4, 0.2), (0.3, 0.1), "passive"),
        ((0.4, 0.2), (0.4, 0.2), "stable"),
        ((0.4, 0.2), (0.3, 0.2), "passive"),
    ];
    for ((i1p, i2p), (i1c, i2c), expected) in cases {
        let prev = snapshot_of(4, vec![agent_view(0, i1p, i2p, 0)]);
        let cur = snapshot_of(5, vec![agent_view(0, i1c, i2c, 0)]);
        let groups = classify(Some(&prev), &cur, eps).unwrap();
        let got = if groups.active == vec![0] {
            "active"
        } else if groups.passive == vec![0] {
            "passive"
        } else {
            "stable"
        };
        assert_eq!(got, expected, "({i1p},{i2p}) -> ({i1c},{i2c})");
    }

    // Partition over full 30-cycle runs of every bundled scenario.
    for name in SCENARIOS {
        let scenario = load_scenario(name);
        let mut driver =
            RunDriver::new(&scenario, 1, Policy::None, KernelConfig::new(), None).unwrap();
        for _ in 0..30 {
            let out = driver.step().unwrap();
            let live: HashSet<u64> = out.snapshot.agents.iter().map(|a| a.id).collect();
            let groups = &out.report.groups;
            let mut seen = HashSet::new();
            for id in groups
                .active
                .iter()
                .chain(&groups.passive)
                .chain(&groups.stable)
            {
                assert!(seen.insert(*id), "{name}: agent {id} in two groups");
                assert!(live.contains(id), "{name}: grouped agent {id} not live");
            }
            assert_eq!(seen.len(), live.len(), "{name}: partition not exhaustive");
        }
    }
    println!("AC-3 characterization partition over 5 scenarios x 30 cycles: PASS");
}

#[test]
fn ac4_cluster_scenario_reaches_engagement() {
    let started = Instant::now();
    let scenario = load_scenario("cluster");
    let mut driver =
        RunDriver::new(&scenario, 1, Policy::None, KernelConfig::new(), None).unwrap();
    let mut engagement_emitted = false;
    let mut strong_opposed_pair = false;
    for _ in 0..15 {
        let out = driver.step().unwrap();
        engagement_emitted |= out
            .report
            .facts
            .iter()
            .any(|f| f.tag == FactTag::Engagement);
        for link in &out.snapshot.links {
            if link.kind != LinkKind::Opposition {
                continue;
            }
            let a = out.snapshot.agent(link.a).unwrap();
            let b = out.snapshot.agent(link.b).unwrap();
            let both_strong =
                a.state == AutomatonState::Strong && b.state == AutomatonState::Strong;
            let fire_brigade_pair = matches!(
                (a.selector.selector_type, b.selector.selector_type),
                (SelectorType::Fire, SelectorType::FireBrigade)
                    | (SelectorType::FireBrigade, SelectorType::Fire)
            );
            strong_opposed_pair |= both_strong && fire_brigade_pair;
        }
    }
    assert!(engagement_emitted, "no ENGAGEMENT fact within 15 cycles");
    assert!(
        strong_opposed_pair,
        "no strong fire/brigade opposition within 15 cycles"
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("AC-4 engagement on cluster scenario ({elapsed:?}): PASS");
}

#[test]
fn ac5_retrieval_matches_brute_force() {
    let mut rng = SplitMix64::new(0xAC5);
    let random_signature = |rng: &mut SplitMix64| {
        let mut s = [0.0; 12];
        for f in s.iter_mut() {
            *f = (rng.next_below(1000) as f64) / 999.0;
        }
        Signature(s)
    };
    let mut base = CaseBase::new();
    for _ in 0..100 {
        let signature = random_signature(&mut rng);
        let template = match rng.next_below(4) {
            0 => ActionTemplate::AttackStrongest,
            1 => ActionTemplate::AttackNearest,
            2 => ActionTemplate::Regroup,
            _ => ActionTemplate::Hold,
        };
        base.add(signature, Vec::new(), template, (rng.next_below(11) as f64) / 10.0);
    }

    for _ in 0..100 {
        let query = random_signature(&mut rng);
        let got = base.retrieve(&query, 3);

        // Independent oracle: full argsort by similarity * weight with the
        // documented tie-break, computed from first principles.
        let mut scored: Vec<(f64, u64)> = base
            .cases()
            .iter()
            .map(|case| {
                let l1: f64 = query
                    .as_slice()
                    .iter()
                    .zip(case.signature.as_slice())
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                ((1.0 - l1 / 12.0) * case.weight, case.id)
            })
            .collect();
        scored.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(&y.1)));

        assert_eq!(got.len(), 3);
        for (retrieved, (score, id)) in got.iter().zip(scored.iter()) {
            assert_eq!(retrieved.case_id, *id);
            assert_eq!(retrieved.score().to_bits(), score.to_bits());
        }
    }
    println!("AC-5 retrieval equals brute-force argsort on 100x100: PASS");
}

#[test]
fn ac6_weights_are_safe_under_random_outcomes() {
    let mut rng = SplitMix64::new(0xAC6);
    for _ in 0..1000 {
        let mut weight = (rng.next_below(1001) as f64) / 1000.0;
        for _ in 0..40 {
            let score = (rng.next_below(1001) as f64) / 1000.0;
            weight = update_weight(weight, score, 0.1);
            assert!((0.0..=1.0).contains(&weight), "weight {weight} escaped");
        }
        let fixed = update_weight(weight, 0.5, 0.1);
        assert!((fixed - weight).abs() <= 1e-12, "neutral outcome moved weight");
    }
    assert_eq!(outcome_score(10, 10), 0.5);
    println!("AC-6 weight safety over 1000 outcome sequences: PASS");
}

fn run_cli(scenario: &str, policy: &str, out_dir: &Path) {
    let status = microdss()
        .args([
            "run",
            "--scenario",
            scenario_path(scenario).to_str().unwrap(),
            "--seed",
            "1",
            "--cycles",
            "30",
            "--policy",
            policy,
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success(), "run on {scenario} failed");
}

#[test]
fn ac7_golden_event_logs_reproduce_byte_for_byte() {
    let tmp = tempfile::tempdir().unwrap();
    for name in SCENARIOS {
        let first = tmp.path().join(format!("{name}-1"));
        let second = tmp.path().join(format!("{name}-2"));
        run_cli(name, "none", &first);
        run_cli(name, "none", &second);
        let a = fs::read(first.join("events.jsonl")).unwrap();
        let b = fs::read(second.join("events.jsonl")).unwrap();
        assert_eq!(a, b, "{name}: consecutive runs differ");
        let golden =
            fs::read(manifest_path(&format!("tests/golden/{name}.events.jsonl"))).unwrap();
        assert_eq!(a, golden, "{name}: run differs from committed golden");
    }
    println!("AC-7 golden event logs for {} scenarios: PASS", SCENARIOS.len());
}

#[test]
fn ac8_baseline_beats_holding_still_on_adjacent_start() {
    let scenario = load_scenario("adjacent-start");
    let mut final_burned = Vec::new();
    for policy in [Policy::Baseline, Policy::None] {
        let mut driver =
            RunDriver::new(&scenario, 1, policy, KernelConfig::new(), None).unwrap();
        let total = driver.world().metrics().building_total();
        for _ in 0..30 {
            driver.step().unwrap();
            let m = driver.world().metrics();
            assert_eq!(m.building_total(), total, "conservation violated");
        }
        final_burned.push(driver.world().metrics().burned_out);
    }
    assert!(
        final_burned[0] < final_burned[1],
        "baseline burned {} vs none {}",
        final_burned[0],
        final_burned[1]
    );
    println!(
        "AC-8 closed-loop efficacy (baseline {} < none {} burned out): PASS",
        final_burned[0], final_burned[1]
    );
}

#[test]
fn ac9_capture_replay_equivalence() {
    let tmp = tempfile::tempdir().unwrap();
    let run_out = tmp.path().join("run");
    run_cli("cluster", "baseline", &run_out);

    let replay_out = tmp.path().join("replay");
    let status = microdss()
        .args([
            "replay",
            "--log",
            run_out.join("fsf.log").to_str().unwrap(),
            "--out",
            replay_out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let kernel_records = |path: &Path| -> Vec<String> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("\"recommendation\""))
            .map(str::to_string)
            .collect()
    };
    let original = kernel_records(&run_out.join("events.jsonl"));
    let replayed = kernel_records(&replay_out.join("events.jsonl"));
    assert!(!original.is_empty());
    assert_eq!(original, replayed, "replay diverged from capture");
    println!(
        "AC-9 capture-replay equivalence over {} kernel records: PASS",
        original.len()
    );
}
