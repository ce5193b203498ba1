//! Monte Carlo BER engine: configuration, trials, SNR sweeps and CSV output.

mod config;
pub mod csv;
pub mod oracle;
mod sweep;
mod trial;

pub use config::{Scheme, SimConfig};
pub use oracle::{hypothesis_count, ml_oracle_decode};
pub use sweep::{run_point, run_sweep, BerRecord};
pub use trial::{run_trial, Simulator, TrialOutcome};

/// Noise power per complex sample for a per-active-symbol SNR with unit
/// symbol energy: `σ² = 10^(-snr_db / 10)`.
pub fn snr_to_noise_power(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}
