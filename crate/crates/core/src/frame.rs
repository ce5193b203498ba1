//! Frame assembly: per-antenna bit stream -> subsymbols -> groups -> data
//! block -> interleaved block ready for the transmitter matrix.

use crate::codec::{
    demap_row_into, detect_group_with, encode_group, group_bits, Constellation, IndexMetric,
    LookupTable,
};
use crate::error::{Error, Result};
use crate::modulator::Interleaver;
use crate::numerics::{CVector, Complex64};

/// How one group of `N` subcarriers turns bits into amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupMapper {
    /// `K` of `N` subcarriers active, chosen by index bits.
    IndexModulated {
        table: LookupTable,
        constellation: Constellation,
        metric: IndexMetric,
    },
    /// Every subcarrier carries a QAM symbol.
    Dense {
        group_size: usize,
        constellation: Constellation,
    },
}

impl GroupMapper {
    pub fn index_modulated(group_size: usize, active: usize, qam_order: usize) -> Result<Self> {
        Ok(GroupMapper::IndexModulated {
            table: LookupTable::new(group_size, active)?,
            constellation: Constellation::new(qam_order)?,
            metric: IndexMetric::Magnitude,
        })
    }

    pub fn dense(group_size: usize, qam_order: usize) -> Result<Self> {
        if group_size == 0 {
            return Err(Error::InvalidParameter("group size must be positive".into()));
        }
        Ok(GroupMapper::Dense {
            group_size,
            constellation: Constellation::new(qam_order)?,
        })
    }

    pub fn with_metric(self, metric: IndexMetric) -> Self {
        match self {
            GroupMapper::IndexModulated {
                table,
                constellation,
                ..
            } => GroupMapper::IndexModulated {
                table,
                constellation,
                metric,
            },
            dense => dense,
        }
    }

    pub fn group_size(&self) -> usize {
        match self {
            GroupMapper::IndexModulated { table, .. } => table.group_size(),
            GroupMapper::Dense { group_size, .. } => *group_size,
        }
    }

    pub fn constellation(&self) -> &Constellation {
        match self {
            GroupMapper::IndexModulated { constellation, .. }
            | GroupMapper::Dense { constellation, .. } => constellation,
        }
    }

    /// Active subcarriers per group.
    pub fn active(&self) -> usize {
        match self {
            GroupMapper::IndexModulated { table, .. } => table.active(),
            GroupMapper::Dense { group_size, .. } => *group_size,
        }
    }

    pub fn bits_per_group(&self) -> usize {
        match self {
            GroupMapper::IndexModulated {
                table,
                constellation,
                ..
            } => group_bits(table, constellation),
            GroupMapper::Dense {
                group_size,
                constellation,
            } => group_size * constellation.bits_per_symbol(),
        }
    }

    fn encode_into(&self, bits: &[bool], out: &mut [Complex64]) -> Result<()> {
        match self {
            GroupMapper::IndexModulated {
                table,
                constellation,
                ..
            } => {
                let g = encode_group(bits, table, constellation)?;
                out.copy_from_slice(&g.values);
            }
            GroupMapper::Dense { constellation, .. } => {
                for (slot, chunk) in out.iter_mut().zip(bits.chunks(constellation.bits_per_symbol())) {
                    *slot = constellation.modulate(chunk)?;
                }
            }
        }
        Ok(())
    }

    /// Hard decision on one observed group, bits appended to `out`.
    pub fn decode_into(&self, observed: &[Complex64], out: &mut Vec<bool>) {
        match self {
            GroupMapper::IndexModulated {
                table,
                constellation,
                metric,
            } => {
                let (row, _) = detect_group_with(observed, table, *metric);
                demap_row_into(observed, row, table, constellation, out);
            }
            GroupMapper::Dense { constellation, .. } => {
                for z in observed {
                    constellation.demodulate_into(*z, out);
                }
            }
        }
    }
}

/// Dimensions of one antenna's frame and its group partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    subcarriers: usize,
    subsymbols: usize,
    group_size: usize,
    interleaver: Interleaver,
}

impl FrameLayout {
    pub fn new(subcarriers: usize, subsymbols: usize, group_size: usize) -> Result<Self> {
        if subsymbols == 0 {
            return Err(Error::InvalidParameter("need at least one subsymbol".into()));
        }
        Ok(FrameLayout {
            subcarriers,
            subsymbols,
            group_size,
            interleaver: Interleaver::for_subcarriers(subcarriers, group_size)?,
        })
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn subsymbols(&self) -> usize {
        self.subsymbols
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    /// Groups per subsymbol, `G`.
    pub fn groups(&self) -> usize {
        self.subcarriers / self.group_size
    }

    /// Samples per frame, `Q`.
    pub fn frame_len(&self) -> usize {
        self.subcarriers * self.subsymbols
    }

    pub fn interleaver(&self) -> &Interleaver {
        &self.interleaver
    }

    /// `L * G * bits_per_group`.
    pub fn bits_per_frame(&self, mapper: &GroupMapper) -> usize {
        self.subsymbols * self.groups() * mapper.bits_per_group()
    }

    fn check_mapper(&self, mapper: &GroupMapper) -> Result<()> {
        if mapper.group_size() != self.group_size {
            return Err(Error::Dimension(format!(
                "mapper group size {} against layout group size {}",
                mapper.group_size(),
                self.group_size
            )));
        }
        Ok(())
    }

    /// Data block before interleaving: subsymbol-major, groups in order
    /// within each subsymbol.
    pub fn data_block(&self, bits: &[bool], mapper: &GroupMapper) -> Result<CVector> {
        self.check_mapper(mapper)?;
        let expected = self.bits_per_frame(mapper);
        if bits.len() != expected {
            return Err(Error::BitCount {
                expected,
                actual: bits.len(),
            });
        }
        let mut block = vec![Complex64::new(0.0, 0.0); self.frame_len()];
        for (group_bits, slot) in bits
            .chunks(mapper.bits_per_group())
            .zip(block.chunks_mut(self.group_size))
        {
            mapper.encode_into(group_bits, slot)?;
        }
        Ok(block)
    }

    /// Interleaved data block `d̄` for one transmit antenna.
    pub fn assemble(&self, bits: &[bool], mapper: &GroupMapper) -> Result<CVector> {
        let block = self.data_block(bits, mapper)?;
        self.interleaver.interleave(&block)
    }
}
