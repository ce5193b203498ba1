use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::SimConfig;
use super::trial::Simulator;

/// Accumulated counts at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// Half-width of the normal-approximation 95% interval.
    pub ci95: f64,
    pub trials: u64,
}

impl BerRecord {
    pub fn from_counts(snr_db: f64, bits: u64, errors: u64, trials: u64) -> Self {
        let ber = if bits == 0 { 0.0 } else { errors as f64 / bits as f64 };
        let ci95 = if bits == 0 {
            0.0
        } else {
            1.96 * (ber * (1.0 - ber) / bits as f64).sqrt()
        };
        BerRecord {
            snr_db,
            bits,
            errors,
            ber,
            ci95,
            trials,
        }
    }

    pub fn lower(&self) -> f64 {
        (self.ber - self.ci95).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.ber + self.ci95).min(1.0)
    }

    /// True when the two 95% intervals intersect.
    pub fn overlaps(&self, other: &BerRecord) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }
}

/// Trials per scheduling round for each worker. Results beyond the stopping
/// point are discarded, so the batch size never changes the output.
const TRIALS_PER_WORKER: u64 = 4;

/// Runs trials `0, 1, 2, ...` at one SNR until `min_errors` errors or
/// `max_bits` bits have been counted. At least one trial always runs.
pub fn run_point(sim: &Simulator, snr_db: f64, pool: Option<&rayon::ThreadPool>) -> Result<BerRecord> {
    let cfg = sim.config();
    let (mut bits, mut errors, mut trials) = (0u64, 0u64, 0u64);
    let batch = match pool {
        Some(p) => p.current_num_threads() as u64 * TRIALS_PER_WORKER,
        None => 1,
    };
    loop {
        let range = trials..trials + batch;
        let outcomes: Vec<(u64, u64)> = match pool {
            Some(p) => p.install(|| {
                range
                    .into_par_iter()
                    .map(|i| sim.run_trial(i, snr_db).map(|o| (o.bits(), o.bit_errors())))
                    .collect::<Result<Vec<_>>>()
            })?,
            None => range
                .map(|i| sim.run_trial(i, snr_db).map(|o| (o.bits(), o.bit_errors())))
                .collect::<Result<Vec<_>>>()?,
        };
        for (b, e) in outcomes {
            bits += b;
            errors += e;
            trials += 1;
            if errors >= cfg.min_errors || bits >= cfg.max_bits {
                return Ok(BerRecord::from_counts(snr_db, bits, errors, trials));
            }
        }
    }
}

/// BER at every point of the configured SNR grid.
pub fn run_sweep(config: &SimConfig) -> Result<Vec<BerRecord>> {
    let sim = Simulator::new(config.clone())?;
    let pool = if config.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?,
        )
    } else {
        None
    };
    config
        .snr_db
        .iter()
        .map(|&snr| run_point(&sim, snr, pool.as_ref()))
        .collect()
}
