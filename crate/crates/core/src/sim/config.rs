use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::{Constellation, IndexMetric, LookupTable};
use crate::error::{Error, Result};

/// Waveform and mapping under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// GFDM with index modulation on subcarrier groups.
    #[default]
    #[serde(rename = "gfdm-im")]
    GfdmIm,
    /// Classical GFDM, every subcarrier carries QAM.
    #[serde(rename = "gfdm")]
    Gfdm,
    /// OFDM (one inverse DFT per subsymbol) with index modulation.
    #[serde(rename = "ofdm-im")]
    OfdmIm,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::GfdmIm, Scheme::Gfdm, Scheme::OfdmIm];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::GfdmIm => "gfdm-im",
            Scheme::Gfdm => "gfdm",
            Scheme::OfdmIm => "ofdm-im",
        }
    }

    pub fn uses_index_modulation(self) -> bool {
        !matches!(self, Scheme::Gfdm)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gfdm-im" => Ok(Scheme::GfdmIm),
            "gfdm" => Ok(Scheme::Gfdm),
            "ofdm-im" => Ok(Scheme::OfdmIm),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected gfdm-im, gfdm or ofdm-im)"
            ))),
        }
    }
}

/// Everything that defines one BER sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub scheme: Scheme,
    /// U
    pub users: usize,
    /// N_T
    pub tx_antennas: usize,
    /// N_R
    pub rx_antennas: usize,
    /// L
    pub subsymbols: usize,
    /// N_tot
    pub subcarriers: usize,
    /// N, subcarriers per index-modulation group
    pub group_size: usize,
    /// K, active subcarriers per group
    pub active: usize,
    /// M
    pub qam_order: usize,
    pub rolloff: f64,
    /// V, channel taps per link
    pub taps: usize,
    pub snr_db: Vec<f64>,
    pub min_errors: u64,
    pub max_bits: u64,
    pub seed: u64,
    pub workers: usize,
    pub index_metric: IndexMetric,
    /// Reuse one tap vector per (t, u) on every receive antenna.
    pub shared_rx_taps: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scheme: Scheme::GfdmIm,
            users: 2,
            tx_antennas: 1,
            rx_antennas: 2,
            subsymbols: 5,
            subcarriers: 32,
            group_size: 4,
            active: 2,
            qam_order: 4,
            rolloff: 0.1,
            taps: 10,
            snr_db: (0..=6).map(|i| 5.0 * i as f64).collect(),
            min_errors: 200,
            max_bits: 10_000_000,
            seed: 1,
            workers: 1,
            index_metric: IndexMetric::Magnitude,
            shared_rx_taps: false,
        }
    }
}

impl SimConfig {
    /// Reads a flat JSON object; absent keys keep their defaults.
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Samples per frame, `Q = L * N_tot`.
    pub fn frame_len(&self) -> usize {
        self.subsymbols * self.subcarriers
    }

    /// Index bits per group, zero for classical GFDM.
    pub fn index_bits(&self) -> usize {
        match self.scheme {
            Scheme::Gfdm => 0,
            _ => LookupTable::new(self.group_size, self.active)
                .map(|t| t.index_bits())
                .unwrap_or(0),
        }
    }

    /// Active subcarriers per group for this scheme.
    pub fn active_per_group(&self) -> usize {
        match self.scheme {
            Scheme::Gfdm => self.group_size,
            _ => self.active,
        }
    }

    pub fn bits_per_group(&self) -> usize {
        let m = self.qam_order.trailing_zeros() as usize;
        self.index_bits() + self.active_per_group() * m
    }

    /// Bits carried per frame and transmit antenna.
    pub fn payload_bits(&self) -> usize {
        self.subsymbols * (self.subcarriers / self.group_size.max(1)) * self.bits_per_group()
    }

    /// `Eb / Es`: symbol energy spent per bit. Multiplying `Es/N0` by this
    /// gives `Eb/N0`.
    pub fn ebn0_factor(&self) -> f64 {
        self.active_per_group() as f64 / self.bits_per_group() as f64
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.users == 0 || self.tx_antennas == 0 || self.rx_antennas == 0 {
            return fail("users, tx_antennas and rx_antennas must be at least 1".into());
        }
        if self.rx_antennas < self.users * self.tx_antennas {
            return fail(format!(
                "need rx_antennas >= users * tx_antennas, got {} < {} * {}",
                self.rx_antennas, self.users, self.tx_antennas
            ));
        }
        if self.subsymbols == 0 {
            return fail("subsymbols must be at least 1".into());
        }
        if self.subcarriers < 2 {
            return fail(format!("subcarriers must be at least 2, got {}", self.subcarriers));
        }
        if self.group_size == 0 || !self.subcarriers.is_multiple_of(self.group_size) {
            return fail(format!(
                "group_size {} must divide subcarriers {}",
                self.group_size, self.subcarriers
            ));
        }
        if self.active == 0 || self.active > self.group_size {
            return fail(format!(
                "need 1 <= active <= group_size, got active = {}, group_size = {}",
                self.active, self.group_size
            ));
        }
        Constellation::new(self.qam_order).map_err(|e| Error::Config(e.to_string()))?;
        LookupTable::new(self.group_size, self.active).map_err(|e| Error::Config(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.rolloff) {
            return fail(format!("rolloff must lie in [0, 1], got {}", self.rolloff));
        }
        if self.taps == 0 || self.taps > self.frame_len() {
            return fail(format!(
                "taps must lie in 1..={}, got {}",
                self.frame_len(),
                self.taps
            ));
        }
        if self.snr_db.is_empty() {
            return fail("snr_db grid is empty".into());
        }
        if let Some(bad) = self.snr_db.iter().find(|v| !v.is_finite()) {
            return fail(format!("non-finite SNR value {bad}"));
        }
        if self.max_bits == 0 {
            return fail("max_bits must be positive".into());
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        Ok(())
    }
}
