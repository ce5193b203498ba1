use gfdm_im::sim::csv::{emit_csv, read_csv, rows_for, to_csv_string};
use gfdm_im::sim::{run_sweep, Scheme, SimConfig, Simulator};
use gfdm_im::Error;

fn small(scheme: Scheme) -> SimConfig {
    SimConfig {
        scheme,
        subcarriers: 16,
        subsymbols: 3,
        taps: 4,
        snr_db: vec![0.0, 10.0],
        min_errors: 50,
        max_bits: 20_000,
        seed: 17,
        ..SimConfig::default()
    }
}

#[test]
fn sweep_is_independent_of_worker_count() {
    for scheme in Scheme::ALL {
        let base = to_csv_string(&rows_for(&small(scheme), &run_sweep(&small(scheme)).unwrap())).unwrap();
        for workers in [2, 3, 5] {
            let cfg = SimConfig { workers, ..small(scheme) };
            let text = to_csv_string(&rows_for(&cfg, &run_sweep(&cfg).unwrap())).unwrap();
            assert_eq!(text, base, "{scheme} with {workers} workers");
        }
    }
}

#[test]
fn stopping_rule_is_respected() {
    let cfg = small(Scheme::GfdmIm);
    let per_trial = (cfg.payload_bits() * cfg.users * cfg.tx_antennas) as u64;
    for r in run_sweep(&cfg).unwrap() {
        assert_eq!(r.bits, r.trials * per_trial);
        assert!(r.errors >= cfg.min_errors || r.bits >= cfg.max_bits);
        // the previous trial had not yet met either threshold
        assert!(r.trials == 1 || r.bits - per_trial < cfg.max_bits);
    }
}

#[test]
fn trials_depend_only_on_seed_and_index() {
    let sim = Simulator::new(small(Scheme::GfdmIm)).unwrap();
    let a = sim.run_trial(4, 5.0).unwrap();
    let _ = sim.run_trial(3, 5.0).unwrap();
    assert_eq!(sim.run_trial(4, 5.0).unwrap(), a);
    let other = Simulator::new(SimConfig { seed: 18, ..small(Scheme::GfdmIm) }).unwrap();
    assert_ne!(other.run_trial(4, 5.0).unwrap().tx_bits, a.tx_bits);
}

#[test]
fn csv_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ber.csv");
    let cfg = small(Scheme::OfdmIm);
    let records = run_sweep(&cfg).unwrap();
    emit_csv(&cfg, &records, &path).unwrap();
    let rows = read_csv(&path).unwrap();
    assert_eq!(rows, rows_for(&cfg, &records));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("scheme,snr_db,bits,errors,ber,ci95,trials,seed,"));
    assert_eq!(text.lines().count(), 1 + records.len());
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"scheme": "gfdm", "users": 3, "rx_antennas": 3}"#).unwrap();
    let cfg = SimConfig::from_file(&path).unwrap();
    assert_eq!((cfg.scheme, cfg.users, cfg.subcarriers), (Scheme::Gfdm, 3, 32));
    std::fs::write(&path, r#"{"user": 3}"#).unwrap();
    assert!(matches!(SimConfig::from_file(&path), Err(Error::Config(_))));
    assert!(SimConfig::from_file(&dir.path().join("missing.json")).is_err());
}
