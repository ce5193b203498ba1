//! Multi-user frequency-selective Rayleigh MIMO uplink.
//!
//! Every link (receive antenna `r`, transmit antenna `t`, user `u`) has `V`
//! i.i.d. CN(0, 1/V) taps and acts on the frame as a circular convolution.

use crate::error::{Error, Result};
use crate::numerics::{
    circulant, circular_convolve, complex_gaussian, CMatrix, CVector, Complex64, SeededRng,
};

/// Link dimensions of the uplink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkDims {
    pub users: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub taps: usize,
}

impl LinkDims {
    pub fn validate(&self) -> Result<()> {
        if self.users == 0 || self.tx_antennas == 0 || self.rx_antennas == 0 || self.taps == 0 {
            return Err(Error::InvalidParameter(format!(
                "channel dimensions must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Tap vectors for every (r, t, u) link of one channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    dims: LinkDims,
    // indexed ((u * N_T + t) * N_R + r)
    links: Vec<CVector>,
}

impl ChannelRealization {
    /// Draws `U * N_T * N_R` independent tap vectors, user-major, then
    /// transmit antenna, then receive antenna. With `shared_across_rx` one
    /// vector per (t, u) is reused on every receive antenna.
    pub fn draw(rng: &mut SeededRng, dims: LinkDims, shared_across_rx: bool) -> Result<Self> {
        dims.validate()?;
        let variance = 1.0 / dims.taps as f64;
        let mut links = Vec::with_capacity(dims.users * dims.tx_antennas * dims.rx_antennas);
        for _ in 0..dims.users * dims.tx_antennas {
            if shared_across_rx {
                let h = complex_gaussian(rng, dims.taps, variance)?;
                links.extend(std::iter::repeat_n(h, dims.rx_antennas));
            } else {
                for _ in 0..dims.rx_antennas {
                    links.push(complex_gaussian(rng, dims.taps, variance)?);
                }
            }
        }
        Ok(ChannelRealization { dims, links })
    }

    /// Builds a realization from explicit taps, indexed `[u][t][r]`.
    pub fn from_taps(taps: Vec<Vec<Vec<CVector>>>) -> Result<Self> {
        let users = taps.len();
        let tx_antennas = taps.first().map_or(0, Vec::len);
        let rx_antennas = taps.first().and_then(|t| t.first()).map_or(0, Vec::len);
        let v = taps
            .first()
            .and_then(|t| t.first())
            .and_then(|r| r.first())
            .map_or(0, Vec::len);
        let dims = LinkDims {
            users,
            tx_antennas,
            rx_antennas,
            taps: v,
        };
        dims.validate()?;
        let mut links = Vec::new();
        for per_user in taps {
            if per_user.len() != tx_antennas {
                return Err(Error::Dimension("ragged transmit-antenna list".into()));
            }
            for per_tx in per_user {
                if per_tx.len() != rx_antennas || per_tx.iter().any(|h| h.len() != v) {
                    return Err(Error::Dimension("ragged receive-antenna or tap list".into()));
                }
                links.extend(per_tx);
            }
        }
        Ok(ChannelRealization { dims, links })
    }

    /// Unit single-tap links everywhere.
    pub fn identity(users: usize, tx_antennas: usize, rx_antennas: usize) -> Result<Self> {
        let one = vec![Complex64::new(1.0, 0.0)];
        Self::from_taps(vec![vec![vec![one; rx_antennas]; tx_antennas]; users])
    }

    pub fn dims(&self) -> LinkDims {
        self.dims
    }

    pub fn taps(&self, r: usize, t: usize, u: usize) -> &[Complex64] {
        let d = &self.dims;
        &self.links[(u * d.tx_antennas + t) * d.rx_antennas + r]
    }

    /// All tap vectors in draw order.
    pub fn links(&self) -> impl Iterator<Item = &[Complex64]> {
        self.links.iter().map(Vec::as_slice)
    }

    /// `H_u`: `N_R x N_T` grid of `Q x Q` circulant blocks.
    pub fn user_matrix(&self, user: usize, frame_len: usize) -> Result<CMatrix> {
        let d = self.dims;
        if user >= d.users {
            return Err(Error::InvalidParameter(format!(
                "user {user} out of range for {} users",
                d.users
            )));
        }
        if frame_len < d.taps {
            return Err(Error::Dimension(format!(
                "{} taps do not fit in a frame of {frame_len}",
                d.taps
            )));
        }
        let q = frame_len;
        let mut h = CMatrix::zeros(q * d.rx_antennas, q * d.tx_antennas);
        for r in 0..d.rx_antennas {
            for t in 0..d.tx_antennas {
                let block = circulant(self.taps(r, t, user), q)?;
                for i in 0..q {
                    h.row_mut(r * q + i)[t * q..(t + 1) * q].copy_from_slice(block.row(i));
                }
            }
        }
        Ok(h)
    }

    /// Noise-free received signal `sum_u H_u x_u`. Each `x_u` stacks the
    /// user's `N_T` antenna frames.
    pub fn propagate(&self, per_user: &[CVector]) -> Result<CVector> {
        let d = self.dims;
        if per_user.len() != d.users {
            return Err(Error::Dimension(format!(
                "{} user signals for {} users",
                per_user.len(),
                d.users
            )));
        }
        let total = per_user[0].len();
        if !total.is_multiple_of(d.tx_antennas) || per_user.iter().any(|x| x.len() != total) {
            return Err(Error::Dimension("user signal lengths disagree".into()));
        }
        let q = total / d.tx_antennas;
        if q < d.taps {
            return Err(Error::Dimension(format!("frame of {q} shorter than {} taps", d.taps)));
        }
        let mut y = vec![Complex64::new(0.0, 0.0); q * d.rx_antennas];
        for (u, x) in per_user.iter().enumerate() {
            for t in 0..d.tx_antennas {
                let xt = &x[t * q..(t + 1) * q];
                for r in 0..d.rx_antennas {
                    let conv = circular_convolve(self.taps(r, t, u), xt);
                    for (yi, ci) in y[r * q..(r + 1) * q].iter_mut().zip(conv) {
                        *yi += ci;
                    }
                }
            }
        }
        Ok(y)
    }
}

pub fn draw_channel(
    rng: &mut SeededRng,
    users: usize,
    tx_antennas: usize,
    rx_antennas: usize,
    taps: usize,
) -> Result<ChannelRealization> {
    ChannelRealization::draw(
        rng,
        LinkDims {
            users,
            tx_antennas,
            rx_antennas,
            taps,
        },
        false,
    )
}

pub fn build_user_channel_matrix(
    realization: &ChannelRealization,
    user: usize,
    frame_len: usize,
) -> Result<CMatrix> {
    realization.user_matrix(user, frame_len)
}

/// `y = sum_u H_u x_u + w` with `w ~ CN(0, noise_power)` i.i.d.
pub fn apply_channel(
    realization: &ChannelRealization,
    per_user: &[CVector],
    noise_power: f64,
    rng: &mut SeededRng,
) -> Result<CVector> {
    if !(noise_power.is_finite() && noise_power >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be non-negative, got {noise_power}"
        )));
    }
    let mut y = realization.propagate(per_user)?;
    if noise_power > 0.0 {
        let w = complex_gaussian(rng, y.len(), noise_power)?;
        y.iter_mut().zip(w).for_each(|(yi, wi)| *yi += wi);
    }
    Ok(y)
}
