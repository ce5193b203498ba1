use crate::channel::{apply_channel, ChannelRealization, LinkDims};
use crate::error::{Error, Result};
use crate::frame::{FrameLayout, GroupMapper};
use crate::modulator::{PrototypeFilter, TransmitterMatrix};
use crate::numerics::{CVector, SeededRng};
use crate::receiver::{decode_frame, split_streams, JointDetector};

use super::config::{Scheme, SimConfig};
use super::snr_to_noise_power;

/// Transmitted and detected bits of one trial, all streams concatenated in
/// (user, antenna) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub tx_bits: Vec<bool>,
    pub rx_bits: Vec<bool>,
}

impl TrialOutcome {
    pub fn bit_errors(&self) -> u64 {
        self.tx_bits
            .iter()
            .zip(&self.rx_bits)
            .filter(|(a, b)| a != b)
            .count() as u64
    }

    pub fn bits(&self) -> u64 {
        self.tx_bits.len() as u64
    }
}

/// Per-configuration state shared by every trial: mapper, frame layout and
/// the receiver built around the scheme's transmitter matrix.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: SimConfig,
    layout: FrameLayout,
    mapper: GroupMapper,
    detector: JointDetector,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let layout = FrameLayout::new(config.subcarriers, config.subsymbols, config.group_size)?;
        let mapper = match config.scheme {
            Scheme::Gfdm => GroupMapper::dense(config.group_size, config.qam_order)?,
            Scheme::GfdmIm | Scheme::OfdmIm => {
                GroupMapper::index_modulated(config.group_size, config.active, config.qam_order)?
                    .with_metric(config.index_metric)
            }
        };
        let transmitter = match config.scheme {
            Scheme::Gfdm | Scheme::GfdmIm => TransmitterMatrix::gfdm(&PrototypeFilter::root_raised_cosine(
                config.subcarriers,
                config.subsymbols,
                config.rolloff,
            )?),
            Scheme::OfdmIm => TransmitterMatrix::ofdm(config.subcarriers, config.subsymbols)?,
        };
        Ok(Simulator {
            config,
            layout,
            mapper,
            detector: JointDetector::new(transmitter),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    pub fn mapper(&self) -> &GroupMapper {
        &self.mapper
    }

    pub fn transmitter(&self) -> &TransmitterMatrix {
        self.detector.transmitter()
    }

    pub fn detector(&self) -> &JointDetector {
        &self.detector
    }

    fn dims(&self) -> LinkDims {
        LinkDims {
            users: self.config.users,
            tx_antennas: self.config.tx_antennas,
            rx_antennas: self.config.rx_antennas,
            taps: self.config.taps,
        }
    }

    /// One frame per user through a fresh channel at the given SNR. All
    /// randomness comes from stream `trial_index` of the configured seed,
    /// drawn in the order channel, payload bits, noise.
    pub fn run_trial(&self, trial_index: u64, snr_db: f64) -> Result<TrialOutcome> {
        let mut rng = SeededRng::new(self.config.seed, trial_index);
        let channel = ChannelRealization::draw(&mut rng, self.dims(), self.config.shared_rx_taps)?;
        self.run_trial_on(&channel, &mut rng, snr_db)
    }

    /// Same as `run_trial` but over a caller-supplied channel.
    pub fn run_trial_on(
        &self,
        channel: &ChannelRealization,
        rng: &mut SeededRng,
        snr_db: f64,
    ) -> Result<TrialOutcome> {
        let cfg = &self.config;
        if channel.dims() != self.dims() {
            return Err(Error::Dimension(format!(
                "channel {:?} does not match configuration {:?}",
                channel.dims(),
                self.dims()
            )));
        }
        let noise_power = snr_to_noise_power(snr_db);
        let payload = self.layout.bits_per_frame(&self.mapper);
        assert_eq!(payload, cfg.payload_bits(), "payload accounting");

        let a = self.detector.transmitter();
        let mut tx_bits = Vec::with_capacity(payload * cfg.users * cfg.tx_antennas);
        let mut signals: Vec<CVector> = Vec::with_capacity(cfg.users);
        for _ in 0..cfg.users {
            let mut x = Vec::with_capacity(a.len() * cfg.tx_antennas);
            for _ in 0..cfg.tx_antennas {
                let bits = rng.bits(payload);
                let block = self.layout.assemble(&bits, &self.mapper)?;
                x.extend(a.modulate(&block)?);
                tx_bits.extend(bits);
            }
            signals.push(x);
        }

        let y = apply_channel(channel, &signals, noise_power, rng)?;
        let frame = self.detector.equalize(channel, &y, noise_power)?;
        let groups = split_streams(&frame, &self.layout)?;
        let rx_bits: Vec<bool> = decode_frame(&groups, &self.mapper)?.into_iter().flatten().collect();
        assert_eq!(rx_bits.len(), tx_bits.len(), "payload accounting");
        Ok(TrialOutcome { tx_bits, rx_bits })
    }
}

pub fn run_trial(config: &SimConfig, trial_index: u64, snr_db: f64) -> Result<TrialOutcome> {
    Simulator::new(config.clone())?.run_trial(trial_index, snr_db)
}
