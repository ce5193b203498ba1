//! MMSE joint detection and demodulation at the base station.
//!
//! All users' frames are estimated at once with
//! `d̃ = (B^H B + σ² I)^{-1} B^H y`, where `B = [B_1 … B_U]` and block
//! `(r, t)` of `B_u` is `H_{rtu} A`. The estimate is then cut into per-user,
//! per-antenna streams, deinterleaved, and decoded group by group.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::frame::{FrameLayout, GroupMapper};
use crate::modulator::TransmitterMatrix;
use crate::numerics::{
    circulant_mul, circular_correlate, mul_circulant_adjoint, CMatrix, CVector, Cholesky,
    Complex64,
};

/// The stacked matrix `B` mapping every user's data block to the received
/// signal.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveMatrix {
    matrix: CMatrix,
    users: usize,
    tx_antennas: usize,
    frame_len: usize,
}

impl EffectiveMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx_antennas
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }
}

pub fn build_effective_matrix(
    realization: &ChannelRealization,
    a: &TransmitterMatrix,
) -> Result<EffectiveMatrix> {
    let d = realization.dims();
    let q = a.len();
    if q < d.taps {
        return Err(Error::Dimension(format!(
            "{} channel taps exceed the frame length {q}",
            d.taps
        )));
    }
    let streams = d.users * d.tx_antennas;
    let mut b = CMatrix::zeros(q * d.rx_antennas, q * streams);
    for u in 0..d.users {
        for t in 0..d.tx_antennas {
            let col0 = (u * d.tx_antennas + t) * q;
            for r in 0..d.rx_antennas {
                let block = circulant_mul(realization.taps(r, t, u), a.matrix());
                for i in 0..q {
                    b.row_mut(r * q + i)[col0..col0 + q].copy_from_slice(block.row(i));
                }
            }
        }
    }
    Ok(EffectiveMatrix {
        matrix: b,
        users: d.users,
        tx_antennas: d.tx_antennas,
        frame_len: q,
    })
}

fn check_noise(noise_power: f64) -> Result<()> {
    if !(noise_power.is_finite() && noise_power >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be non-negative, got {noise_power}"
        )));
    }
    Ok(())
}

/// Dense MMSE estimate `(B^H B + σ² I)^{-1} B^H y` via a Cholesky solve of
/// the normal equations.
pub fn mmse_estimate(b: &CMatrix, y: &[Complex64], noise_power: f64) -> Result<CVector> {
    check_noise(noise_power)?;
    let rhs = b.adjoint_mul_vec(y)?;
    let mut normal = b.gram_cols();
    normal.add_diagonal(noise_power);
    Cholesky::new(&normal)?.solve_vec(&rhs)
}

/// The explicit filter `W = (B^H B + σ² I)^{-1} B^H`. Only needed for
/// diagnostics; equalisation never forms it.
pub fn mmse_filter(b: &CMatrix, noise_power: f64) -> Result<CMatrix> {
    check_noise(noise_power)?;
    let mut normal = b.gram_cols();
    normal.add_diagonal(noise_power);
    Cholesky::new(&normal)?.solve(&b.adjoint())
}

/// Equalised estimates of every user's stacked data blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizedFrame {
    estimates: CVector,
    users: usize,
    tx_antennas: usize,
    frame_len: usize,
}

impl EqualizedFrame {
    pub fn new(estimates: CVector, users: usize, tx_antennas: usize, frame_len: usize) -> Result<Self> {
        if estimates.len() != users * tx_antennas * frame_len {
            return Err(Error::Dimension(format!(
                "{} estimates for {users} users x {tx_antennas} antennas x {frame_len}",
                estimates.len()
            )));
        }
        Ok(EqualizedFrame {
            estimates,
            users,
            tx_antennas,
            frame_len,
        })
    }

    pub fn estimates(&self) -> &[Complex64] {
        &self.estimates
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx_antennas
    }

    /// Interleaved block estimate of antenna `t` of user `u`.
    pub fn stream(&self, u: usize, t: usize) -> &[Complex64] {
        let start = (u * self.tx_antennas + t) * self.frame_len;
        &self.estimates[start..start + self.frame_len]
    }
}

/// `mmse_equalize` on an assembled effective matrix.
pub fn mmse_equalize(b: &EffectiveMatrix, y: &[Complex64], noise_power: f64) -> Result<EqualizedFrame> {
    let est = mmse_estimate(b.matrix(), y, noise_power)?;
    EqualizedFrame::new(est, b.users, b.tx_antennas, b.frame_len)
}

/// Forward and inverse transforms of one frame length.
type FftPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

/// Reusable MMSE receiver for one transmitter matrix.
///
/// Every path computes the equivalent form `B^H (B B^H + σ² I)^{-1} y`.
/// With a unitary `A` (the OFDM baseline) `B B^H` is block circulant and
/// the solve splits into one `N_R x N_R` system per frequency bin. Otherwise,
/// when the system is square (`N_R = U N_T`), `B B^H` is built from the
/// precomputed `A A^H` and the sparse circulant taps without forming `B`.
/// Tall systems fall back to the dense normal equations.
#[derive(Clone)]
pub struct JointDetector {
    transmitter: TransmitterMatrix,
    outer: CMatrix,
    spectral: Option<FftPair>,
}

impl fmt::Debug for JointDetector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JointDetector")
            .field("frame_len", &self.transmitter.len())
            .field("spectral", &self.spectral.is_some())
            .finish()
    }
}

impl JointDetector {
    pub fn new(transmitter: TransmitterMatrix) -> Self {
        let outer = transmitter.matrix().gram_rows();
        let q = transmitter.len();
        let deviation = outer.sub(&CMatrix::identity(q)).map_or(f64::INFINITY, |d| d.frobenius_norm());
        let spectral = (deviation <= 1e-10 * (q as f64).sqrt()).then(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(q), planner.plan_fft_inverse(q))
        });
        JointDetector {
            transmitter,
            outer,
            spectral,
        }
    }

    /// True when equalization runs per frequency bin.
    pub fn is_spectral(&self) -> bool {
        self.spectral.is_some()
    }

    pub fn transmitter(&self) -> &TransmitterMatrix {
        &self.transmitter
    }

    pub fn equalize(
        &self,
        realization: &ChannelRealization,
        y: &[Complex64],
        noise_power: f64,
    ) -> Result<EqualizedFrame> {
        check_noise(noise_power)?;
        let d = realization.dims();
        let q = self.transmitter.len();
        if y.len() != q * d.rx_antennas {
            return Err(Error::Dimension(format!(
                "received vector of length {} for {} antennas x {q}",
                y.len(),
                d.rx_antennas
            )));
        }
        if q < d.taps {
            return Err(Error::Dimension(format!("{} taps exceed frame length {q}", d.taps)));
        }
        let streams = d.users * d.tx_antennas;
        if let Some((forward, inverse)) = &self.spectral {
            return self.equalize_spectral(forward.as_ref(), inverse.as_ref(), realization, y, noise_power);
        }
        if d.rx_antennas != streams {
            let b = build_effective_matrix(realization, &self.transmitter)?;
            return mmse_equalize(&b, y, noise_power);
        }

        // Gram G = sum over links of H_{rtu} (A A^H) H_{r'tu}^H, lower blocks only.
        let rx = d.rx_antennas;
        let mut gram = CMatrix::zeros(q * rx, q * rx);
        for u in 0..d.users {
            for t in 0..d.tx_antennas {
                for r in 0..rx {
                    let left = circulant_mul(realization.taps(r, t, u), &self.outer);
                    for r2 in 0..=r {
                        let block = mul_circulant_adjoint(&left, realization.taps(r2, t, u));
                        for i in 0..q {
                            let dst = &mut gram.row_mut(r * q + i)[r2 * q..(r2 + 1) * q];
                            for (g, v) in dst.iter_mut().zip(block.row(i)) {
                                *g += v;
                            }
                        }
                    }
                }
            }
        }
        gram.add_diagonal(noise_power);
        let z = Cholesky::new(&gram)?.solve_vec(y)?;

        let mut estimates = Vec::with_capacity(q * streams);
        for u in 0..d.users {
            for t in 0..d.tx_antennas {
                let mut acc = vec![Complex64::new(0.0, 0.0); q];
                for r in 0..rx {
                    let back = circular_correlate(realization.taps(r, t, u), &z[r * q..(r + 1) * q]);
                    acc.iter_mut().zip(back).for_each(|(a, b)| *a += b);
                }
                estimates.extend(self.transmitter.matrix().adjoint_mul_vec(&acc)?);
            }
        }
        EqualizedFrame::new(estimates, d.users, d.tx_antennas, q)
    }

    fn equalize_spectral(
        &self,
        forward: &dyn Fft<f64>,
        inverse: &dyn Fft<f64>,
        realization: &ChannelRealization,
        y: &[Complex64],
        noise_power: f64,
    ) -> Result<EqualizedFrame> {
        let d = realization.dims();
        let q = self.transmitter.len();
        let (rx, streams) = (d.rx_antennas, d.users * d.tx_antennas);
        let zero = Complex64::new(0.0, 0.0);

        let mut received = y.to_vec();
        for chunk in received.chunks_mut(q) {
            forward.process(chunk);
        }
        // response[r][s] over all bins, stream s = u N_T + t
        let mut response = vec![vec![zero; q]; rx * streams];
        for r in 0..rx {
            for u in 0..d.users {
                for t in 0..d.tx_antennas {
                    let buf = &mut response[r * streams + u * d.tx_antennas + t];
                    buf[..d.taps].copy_from_slice(realization.taps(r, t, u));
                    forward.process(buf);
                }
            }
        }

        let mut spectra = vec![zero; q * streams];
        let mut gram = CMatrix::zeros(rx, rx);
        let mut rhs = vec![zero; rx];
        for k in 0..q {
            for r in 0..rx {
                for r2 in 0..=r {
                    let mut acc = zero;
                    for s in 0..streams {
                        acc += response[r * streams + s][k] * response[r2 * streams + s][k].conj();
                    }
                    gram[(r, r2)] = acc;
                }
                gram[(r, r)] += noise_power;
                rhs[r] = received[r * q + k];
            }
            let z = Cholesky::new(&gram)?.solve_vec(&rhs)?;
            for s in 0..streams {
                spectra[s * q + k] = (0..rx).map(|r| response[r * streams + s][k].conj() * z[r]).sum();
            }
        }

        let scale = 1.0 / q as f64;
        let mut estimates = Vec::with_capacity(q * streams);
        for chunk in spectra.chunks_mut(q) {
            inverse.process(chunk);
            chunk.iter_mut().for_each(|v| *v *= scale);
            estimates.extend(self.transmitter.matrix().adjoint_mul_vec(chunk)?);
        }
        EqualizedFrame::new(estimates, d.users, d.tx_antennas, q)
    }
}

/// Deinterleaved per-(user, antenna) streams, each split into subsymbols
/// and groups.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamGroups {
    layout: FrameLayout,
    users: usize,
    tx_antennas: usize,
    // (u, t) streams back to back, each in (l, g, n) order
    data: CVector,
}

impl StreamGroups {
    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx_antennas
    }

    /// Deinterleaved stream of antenna `t` of user `u`.
    pub fn stream(&self, u: usize, t: usize) -> &[Complex64] {
        let q = self.layout.frame_len();
        let start = (u * self.tx_antennas + t) * q;
        &self.data[start..start + q]
    }

    /// Observation of group `g` of subsymbol `l`.
    pub fn group(&self, u: usize, t: usize, l: usize, g: usize) -> &[Complex64] {
        let n = self.layout.group_size();
        let start = l * self.layout.subcarriers() + g * n;
        &self.stream(u, t)[start..start + n]
    }

    /// All groups of one stream in transmit order.
    pub fn groups(&self, u: usize, t: usize) -> impl Iterator<Item = &[Complex64]> {
        self.stream(u, t).chunks(self.layout.group_size())
    }
}

pub fn split_streams(frame: &EqualizedFrame, layout: &FrameLayout) -> Result<StreamGroups> {
    if frame.frame_len != layout.frame_len() {
        return Err(Error::Dimension(format!(
            "equalised frame length {} against layout {}",
            frame.frame_len,
            layout.frame_len()
        )));
    }
    let mut data = Vec::with_capacity(frame.estimates.len());
    for u in 0..frame.users {
        for t in 0..frame.tx_antennas {
            data.extend(layout.interleaver().deinterleave(frame.stream(u, t))?);
        }
    }
    Ok(StreamGroups {
        layout: *layout,
        users: frame.users,
        tx_antennas: frame.tx_antennas,
        data,
    })
}

/// Hard-decision bits for every (user, antenna) stream, in `u`-major order,
/// each in the order the transmitter consumed them.
pub fn decode_frame(groups: &StreamGroups, mapper: &GroupMapper) -> Result<Vec<Vec<bool>>> {
    if mapper.group_size() != groups.layout.group_size() {
        return Err(Error::Dimension(format!(
            "mapper group size {} against layout {}",
            mapper.group_size(),
            groups.layout.group_size()
        )));
    }
    let per_stream = groups.layout.bits_per_frame(mapper);
    let mut out = Vec::with_capacity(groups.users * groups.tx_antennas);
    for u in 0..groups.users {
        for t in 0..groups.tx_antennas {
            let mut bits = Vec::with_capacity(per_stream);
            for obs in groups.groups(u, t) {
                mapper.decode_into(obs, &mut bits);
            }
            out.push(bits);
        }
    }
    Ok(out)
}
