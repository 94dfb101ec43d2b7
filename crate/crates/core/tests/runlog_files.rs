use std::fs::File;
use std::io::BufReader;

use bellharness::harness::{replay_verify, run_in_process, RunConfig, RunLog, SettingMode};
use bellharness::strategy::BUILTIN_STRATEGIES;

#[test]
fn logs_survive_disk_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    for name in BUILTIN_STRATEGIES {
        let mut config =
            RunConfig::new(500).with_strategies(name, "antipodal").with_mode(SettingMode::UniformIndependent);
        config.memory_mode = *name == "memory-flip";
        let log = run_in_process(&config).unwrap();
        let path = dir.path().join(format!("{name}.jsonl"));
        log.write_jsonl(File::create(&path).unwrap()).unwrap();
        let back = RunLog::read_jsonl(BufReader::new(File::open(&path).unwrap())).unwrap();
        assert_eq!(back, log);
        assert!(replay_verify(&back).unwrap().matches);
    }
}

#[test]
fn changed_settings_seed_fails_replay() {
    let mut log = run_in_process(&RunConfig::new(200)).unwrap();
    log.config.seed_settings ^= 1;
    let report = replay_verify(&log).unwrap();
    assert!(!report.matches);
    assert!(report.first_mismatch.is_some());
}
