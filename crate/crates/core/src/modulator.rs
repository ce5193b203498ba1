//! GFDM transmitter: prototype pulse, modulation matrix, block interleaver.
//!
//! A frame holds `L` subsymbols of `N_tot` subcarriers, `Q = L * N_tot`
//! samples in total. Data index `p = l * N_tot + n` (subcarrier fast,
//! subsymbol slow) maps to matrix column `p`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector, Complex64};

/// Real prototype pulse of length `Q`, unit energy, peak at sample 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeFilter {
    rolloff: f64,
    subcarriers: usize,
    subsymbols: usize,
    taps: Vec<f64>,
}

/// Root-raised-cosine impulse response at `t` symbol periods, unnormalised.
/// The removable singularities at `t = 0` and `|t| = 1 / (4 alpha)` use
/// their limits.
fn rrc_value(t: f64, alpha: f64) -> f64 {
    const EPS: f64 = 1e-9;
    if t.abs() < EPS {
        return 1.0 - alpha + 4.0 * alpha / PI;
    }
    if alpha > 0.0 && (1.0 - (4.0 * alpha * t).powi(2)).abs() < EPS {
        let arg = PI / (4.0 * alpha);
        return alpha / 2f64.sqrt()
            * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos());
    }
    let num = (PI * t * (1.0 - alpha)).sin() + 4.0 * alpha * t * (PI * t * (1.0 + alpha)).cos();
    let den = PI * t * (1.0 - (4.0 * alpha * t).powi(2));
    num / den
}

impl PrototypeFilter {
    /// Root-raised-cosine pulse with a symbol period of `subcarriers`
    /// samples, sampled at the `Q` offsets `-floor(Q/2) ..= ceil(Q/2) - 1`
    /// around the peak and stored circularly so offset 0 lands on sample 0.
    pub fn root_raised_cosine(subcarriers: usize, subsymbols: usize, rolloff: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rolloff) {
            return Err(Error::InvalidParameter(format!(
                "roll-off must lie in [0, 1], got {rolloff}"
            )));
        }
        if subsymbols == 0 || subcarriers < 2 {
            return Err(Error::InvalidParameter(format!(
                "need L >= 1 and N_tot >= 2, got L = {subsymbols}, N_tot = {subcarriers}"
            )));
        }
        let q = subcarriers * subsymbols;
        let positive = q.div_ceil(2);
        let mut taps: Vec<f64> = (0..q)
            .map(|i| {
                let offset = if i < positive { i as f64 } else { i as f64 - q as f64 };
                rrc_value(offset / subcarriers as f64, rolloff)
            })
            .collect();
        let energy = taps.iter().map(|v| v * v).sum::<f64>().sqrt();
        taps.iter_mut().for_each(|v| *v /= energy);
        Ok(PrototypeFilter {
            rolloff,
            subcarriers,
            subsymbols,
            taps,
        })
    }

    /// Wraps arbitrary samples as a prototype; they are normalised to unit
    /// energy.
    pub fn from_taps(subcarriers: usize, subsymbols: usize, mut taps: Vec<f64>) -> Result<Self> {
        if taps.len() != subcarriers * subsymbols || taps.is_empty() {
            return Err(Error::Dimension(format!(
                "{} taps for Q = {}",
                taps.len(),
                subcarriers * subsymbols
            )));
        }
        let energy = taps.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(energy.is_finite() && energy > 0.0) {
            return Err(Error::InvalidParameter("prototype has no energy".into()));
        }
        taps.iter_mut().for_each(|v| *v /= energy);
        Ok(PrototypeFilter {
            rolloff: f64::NAN,
            subcarriers,
            subsymbols,
            taps,
        })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn subsymbols(&self) -> usize {
        self.subsymbols
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }
}

/// The `Q x Q` modulation matrix of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitterMatrix {
    matrix: CMatrix,
    subcarriers: usize,
    subsymbols: usize,
}

impl TransmitterMatrix {
    /// GFDM matrix: column `(n, l)` is the prototype circularly delayed by
    /// `l * N_tot` samples and modulated to subcarrier `n`.
    pub fn gfdm(filter: &PrototypeFilter) -> Self {
        let k = filter.subcarriers();
        let m = filter.subsymbols();
        let q = k * m;
        let g = filter.taps();
        let phasors: Vec<Complex64> = (0..k)
            .map(|r| Complex64::from_polar(1.0, 2.0 * PI * r as f64 / k as f64))
            .collect();
        let matrix = CMatrix::from_fn(q, q, |row, col| {
            let (l, n) = (col / k, col % k);
            let shifted = g[(row + q - l * k) % q];
            phasors[(n * row) % k] * shifted
        });
        TransmitterMatrix {
            matrix,
            subcarriers: k,
            subsymbols: m,
        }
    }

    /// OFDM reference: `L` unitary inverse-DFT blocks on the diagonal.
    pub fn ofdm(subcarriers: usize, subsymbols: usize) -> Result<Self> {
        if subcarriers == 0 || subsymbols == 0 {
            return Err(Error::InvalidParameter(format!(
                "need positive dimensions, got N_tot = {subcarriers}, L = {subsymbols}"
            )));
        }
        let k = subcarriers;
        let q = k * subsymbols;
        let norm = (k as f64).sqrt().recip();
        let matrix = CMatrix::from_fn(q, q, |row, col| {
            if row / k != col / k {
                return Complex64::new(0.0, 0.0);
            }
            let (m, n) = (row % k, col % k);
            Complex64::from_polar(norm, 2.0 * PI * ((n * m) % k) as f64 / k as f64)
        });
        Ok(TransmitterMatrix {
            matrix,
            subcarriers,
            subsymbols,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn subsymbols(&self) -> usize {
        self.subsymbols
    }

    /// Frame length `Q`.
    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.rows() == 0
    }

    /// `x = A d`.
    pub fn modulate(&self, data: &[Complex64]) -> Result<CVector> {
        self.matrix.mul_vec(data)
    }
}

pub fn rrc_prototype(subcarriers: usize, subsymbols: usize, rolloff: f64) -> Result<PrototypeFilter> {
    PrototypeFilter::root_raised_cosine(subcarriers, subsymbols, rolloff)
}

pub fn build_transmitter_matrix(filter: &PrototypeFilter) -> TransmitterMatrix {
    TransmitterMatrix::gfdm(filter)
}

pub fn build_ofdm_matrix(subcarriers: usize, subsymbols: usize) -> Result<TransmitterMatrix> {
    TransmitterMatrix::ofdm(subcarriers, subsymbols)
}

pub fn modulate(a: &TransmitterMatrix, data: &[Complex64]) -> Result<CVector> {
    a.modulate(data)
}

pub fn interleave(data: &[Complex64], map: &Interleaver) -> Result<CVector> {
    map.interleave(data)
}

pub fn deinterleave(data: &[Complex64], map: &Interleaver) -> Result<CVector> {
    map.deinterleave(data)
}

/// Per-subsymbol block interleaver spreading each group's subcarriers
/// `G` positions apart: group-major slot `g * N + n` moves to `n * G + g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interleaver {
    group_size: usize,
    groups: usize,
}

impl Interleaver {
    pub fn new(group_size: usize, groups: usize) -> Result<Self> {
        if group_size == 0 || groups == 0 {
            return Err(Error::InvalidParameter(format!(
                "interleaver needs N, G >= 1, got N = {group_size}, G = {groups}"
            )));
        }
        Ok(Interleaver { group_size, groups })
    }

    /// Interleaver for `N_tot` subcarriers split into groups of `N`.
    pub fn for_subcarriers(subcarriers: usize, group_size: usize) -> Result<Self> {
        if group_size == 0 || !subcarriers.is_multiple_of(group_size) {
            return Err(Error::InvalidParameter(format!(
                "group size {group_size} does not divide {subcarriers} subcarriers"
            )));
        }
        Self::new(group_size, subcarriers / group_size)
    }

    pub fn subcarriers(&self) -> usize {
        self.group_size * self.groups
    }

    /// Interleaved position of group-major slot `p` within one subsymbol.
    #[inline]
    pub fn forward(&self, p: usize) -> usize {
        let (g, n) = (p / self.group_size, p % self.group_size);
        n * self.groups + g
    }

    fn check(&self, len: usize) -> Result<()> {
        if !len.is_multiple_of(self.subcarriers()) {
            return Err(Error::Dimension(format!(
                "length {len} is not a whole number of {}-subcarrier subsymbols",
                self.subcarriers()
            )));
        }
        Ok(())
    }

    pub fn interleave(&self, data: &[Complex64]) -> Result<CVector> {
        self.check(data.len())?;
        let k = self.subcarriers();
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for (block_in, block_out) in data.chunks(k).zip(out.chunks_mut(k)) {
            for (p, v) in block_in.iter().enumerate() {
                block_out[self.forward(p)] = *v;
            }
        }
        Ok(out)
    }

    pub fn deinterleave(&self, data: &[Complex64]) -> Result<CVector> {
        self.check(data.len())?;
        let k = self.subcarriers();
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for (block_in, block_out) in data.chunks(k).zip(out.chunks_mut(k)) {
            for (p, v) in block_out.iter_mut().enumerate() {
                *v = block_in[self.forward(p)];
            }
        }
        Ok(out)
    }
}
