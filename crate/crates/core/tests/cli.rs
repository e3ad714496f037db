use std::path::Path;
use std::process::{Command, Output};

use genetic_automata::cli::{EmergeRecord, IpdRecord};
use genetic_automata::ipd::{build_strategy, StrategyParams};
use genetic_automata::WeightedAutomaton;

fn gauto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gauto"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_strategy(dir: &Path, name: &str, p: [f64; 6]) -> String {
    let path = dir.join(name);
    std::fs::write(
        &path,
        build_strategy(StrategyParams(p))
            .unwrap()
            .core()
            .to_json()
            .unwrap(),
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn play_prints_history_and_totals() {
    let o = gauto(&["play", "tft", "vindictive", "--rounds", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().next().unwrap().ends_with("C C"));
    assert!(text.ends_with("total tft vindictive: 30 / 30\n"));
    assert!(stdout(&gauto(&["play", "alld", "allc", "--rounds", "10"])).ends_with(": 50 / 0\n"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(gauto(&["play", "uniform", "tft"]).status.code(), Some(2));
    assert_eq!(gauto(&["play", "grudger", "tft"]).status.code(), Some(2));
    assert_eq!(
        gauto(&["play", "params:1,1,1", "tft"]).status.code(),
        Some(2)
    );
    assert_eq!(gauto(&["frobnicate"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(
        gauto(&["evolve-ipd", "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gauto(&[
            "evolve-ipd",
            "--seed",
            "1",
            "--pop",
            "3",
            "--out",
            out.to_str().unwrap()
        ])
        .status
        .code(),
        Some(2)
    );
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"seed": 1, "generatoins": 3}"#).unwrap();
    assert_eq!(
        gauto(&["emerge", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn evolve_ipd_writes_records() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = gauto(&[
        "evolve-ipd",
        "--seed",
        "5",
        "--pop",
        "8",
        "--generations",
        "7",
        "--rounds",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = std::fs::read_to_string(out.join("stats.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("generation,fit_min,fit_mean,fit_max,coop_rate")
    );
    assert_eq!(lines.count(), 8);

    let text = std::fs::read_to_string(out.join("run.json")).unwrap();
    let record: IpdRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(record.stats.len(), 8);
    assert_eq!(record.final_population.len(), 8);
    assert_eq!(record.config.seed, Some(5));
    assert_eq!(serde_json::to_string_pretty(&record).unwrap() + "\n", text);

    for (i, a) in record.final_population.iter().enumerate() {
        let file = WeightedAutomaton::load(out.join(format!("population/{i:03}.json"))).unwrap();
        assert_eq!(&file, a);
    }
    assert!(out.join("timing.json").exists());
}

#[test]
fn zero_generations_echo_the_seeded_population() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, gens) in [(&a, "0"), (&b, "3")] {
        let o = gauto(&[
            "evolve-ipd",
            "--seed",
            "9",
            "--pop",
            "6",
            "--generations",
            gens,
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let ra: IpdRecord =
        serde_json::from_str(&std::fs::read_to_string(a.join("run.json")).unwrap()).unwrap();
    let rb: IpdRecord =
        serde_json::from_str(&std::fs::read_to_string(b.join("run.json")).unwrap()).unwrap();
    assert_eq!(ra.stats.len(), 1);
    assert_eq!(ra.stats[0], rb.stats[0]);
    assert_ne!(ra.final_population, rb.final_population);
}

#[test]
fn emerge_reports_clusters() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("emerge.json");
    std::fs::write(
        &cfg,
        r#"{"seed": 3, "generations": 4, "epsilon": 0.05,
            "agents": {"kind": "clustered", "count": 10, "centers": 2, "spread": 0.02},
            "problem": {"s0": "tft", "rounds": 8},
            "composition": {"mode": "weighted_sum", "w": 0.5}}"#,
    )
    .unwrap();
    let out = tmp.path().join("run");
    let o = gauto(&[
        "emerge",
        "--config",
        cfg.to_str().unwrap(),
        "--generations",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("stats.csv")).unwrap();
    assert!(
        csv.starts_with("generation,fit_min,fit_mean,fit_max,mean_within_nbhd_dist,n_clusters\n")
    );
    assert_eq!(csv.lines().count(), 7);
    let record: EmergeRecord =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(record.config.generations, 5);
    let mut ids: Vec<u64> = record.final_clusters.unwrap().concat();
    ids.sort_unstable();
    assert_eq!(ids, (0..10).collect::<Vec<_>>());
    assert_eq!(
        std::fs::read_dir(out.join("population")).unwrap().count(),
        10
    );
}

#[test]
fn distance_and_eval() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write_strategy(tmp.path(), "a.json", [0.5, 0.5, 0.5, 0.5, 0.5, 0.5]);
    let b = write_strategy(tmp.path(), "b.json", [0.5, 0.75, 0.5, 0.5, 0.5, 0.5]);

    let report: serde_json::Value =
        serde_json::from_str(&stdout(&gauto(&["distance", &a, &b, "--alpha", "1"]))).unwrap();
    assert_eq!(report["automaton_distance"], 0.5);
    let same: serde_json::Value =
        serde_json::from_str(&stdout(&gauto(&["distance", &a, &a]))).unwrap();
    assert_eq!(same["automaton_distance"], 0.0);
    assert_eq!(same["behavior_gap"], 0.0);
    let short: serde_json::Value = serde_json::from_str(&stdout(&gauto(&[
        "distance",
        &a,
        &b,
        "--alpha",
        "1",
        "--max-len",
        "0",
    ])))
    .unwrap();
    assert_eq!(short["behavior_gap"], 0.0);

    let three = tmp.path().join("c.json");
    let c = WeightedAutomaton::from_rows(
        genetic_automata::SemiringKind::Real,
        ["C", "D"],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0],
        &[vec![vec![0.0; 3]; 3], vec![vec![0.0; 3]; 3]],
    )
    .unwrap();
    std::fs::write(&three, c.to_json().unwrap()).unwrap();
    assert_eq!(
        gauto(&["distance", &a, three.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let o = gauto(&["eval", &a]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(stdout(&o).contains("0.25"));
    assert_eq!(
        gauto(&["eval", tmp.path().join("missing.json").to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}
