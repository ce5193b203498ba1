//! Index-modulation mapping for one subcarrier group.
//!
//! A group of `N` subcarriers carries `b1 = floor(log2 C(N, K))` index bits,
//! which select the `K` active positions from a truncated look-up table, and
//! `b2 = K log2 M` bits carried as Gray-labelled square QAM symbols on those
//! positions. The remaining `N - K` positions stay exactly zero.
//!
//! All subcarrier indices are 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{CVector, Complex64};

/// Reads `bits` as an unsigned integer, most significant bit first.
pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Writes the `width` low bits of `value`, most significant bit first.
pub fn index_to_bits(value: usize, width: usize, out: &mut Vec<bool>) {
    for shift in (0..width).rev() {
        out.push((value >> shift) & 1 == 1);
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Advances `comb` to the next K-combination of `0..n` in lexicographic
/// order. Returns false once the last combination has been passed.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The truncated table of allowed active-subcarrier combinations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupTable {
    group_size: usize,
    active: usize,
    index_bits: usize,
    rows: Vec<Vec<usize>>,
}

impl LookupTable {
    /// Keeps the lexicographically first `2^b1` K-combinations of `0..N`.
    pub fn new(group_size: usize, active: usize) -> Result<Self> {
        if active == 0 || active > group_size {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= K <= N, got N = {group_size}, K = {active}"
            )));
        }
        let combos = binomial(group_size, active);
        let index_bits = (127 - combos.leading_zeros()) as usize;
        if index_bits >= usize::BITS as usize - 1 {
            return Err(Error::InvalidParameter(format!(
                "C({group_size}, {active}) is too large for an explicit table"
            )));
        }
        let count = 1usize << index_bits;
        let mut rows = Vec::with_capacity(count);
        let mut comb: Vec<usize> = (0..active).collect();
        rows.push(comb.clone());
        while rows.len() < count && next_combination(&mut comb, group_size) {
            rows.push(comb.clone());
        }
        Ok(LookupTable {
            group_size,
            active,
            index_bits,
            rows,
        })
    }

    /// Subcarriers per group, `N`.
    pub fn group_size(&self) -> usize {
        self.group_size
    }

    /// Active subcarriers per group, `K`.
    pub fn active(&self) -> usize {
        self.active
    }

    /// Index bits per group, `b1`.
    pub fn index_bits(&self) -> usize {
        self.index_bits
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, j: usize) -> &[usize] {
        &self.rows[j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.rows.iter().map(Vec::as_slice)
    }

    /// Row number of an active tuple, if it is in the table.
    pub fn position(&self, active: &[usize]) -> Option<usize> {
        self.rows.iter().position(|r| r == active)
    }
}

/// Gray-labelled square QAM with unit average energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    bits_per_symbol: usize,
    side: usize,
    scale: f64,
    points: Vec<Complex64>,
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

impl Constellation {
    /// `order` must be 4, 16, 64, ... (a square power of two).
    pub fn new(order: usize) -> Result<Self> {
        if order < 4 || !order.is_power_of_two() || !order.trailing_zeros().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "QAM order {order} is not a supported square constellation"
            )));
        }
        let bits_per_symbol = order.trailing_zeros() as usize;
        let side = 1usize << (bits_per_symbol / 2);
        let scale = (2.0 * (order as f64 - 1.0) / 3.0).sqrt().recip();
        let mut cons = Constellation {
            order,
            bits_per_symbol,
            side,
            scale,
            points: Vec::with_capacity(order),
        };
        cons.points = (0..order).map(|label| cons.point_of(label)).collect();
        Ok(cons)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Constellation points indexed by their integer bit label.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    fn level(&self, gray: usize) -> f64 {
        // label 0 sits on the positive edge of the axis
        (self.side as f64 - 1.0) - 2.0 * gray_decode(gray) as f64
    }

    fn point_of(&self, label: usize) -> Complex64 {
        let half = self.bits_per_symbol / 2;
        let i_bits = label >> half;
        let q_bits = label & ((1 << half) - 1);
        Complex64::new(self.level(i_bits), self.level(q_bits)) * self.scale
    }

    pub fn modulate(&self, bits: &[bool]) -> Result<Complex64> {
        if bits.len() != self.bits_per_symbol {
            return Err(Error::BitCount {
                expected: self.bits_per_symbol,
                actual: bits.len(),
            });
        }
        Ok(self.points[bits_to_index(bits)])
    }

    fn axis_label(&self, value: f64) -> usize {
        let top = self.side as f64 - 1.0;
        let level = ((top - value / self.scale) / 2.0).round();
        let level = level.clamp(0.0, top) as usize;
        level ^ (level >> 1)
    }

    /// Integer label of the nearest constellation point.
    pub fn nearest_label(&self, symbol: Complex64) -> usize {
        let half = self.bits_per_symbol / 2;
        (self.axis_label(symbol.re) << half) | self.axis_label(symbol.im)
    }

    /// Minimum-distance hard decision, appended to `out`.
    pub fn demodulate_into(&self, symbol: Complex64, out: &mut Vec<bool>) {
        index_to_bits(self.nearest_label(symbol), self.bits_per_symbol, out);
    }

    pub fn demodulate(&self, symbol: Complex64) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.bits_per_symbol);
        self.demodulate_into(symbol, &mut out);
        out
    }
}

/// One encoded subcarrier group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupData {
    /// `N` amplitudes, nonzero exactly on `active`.
    pub values: CVector,
    /// Table row selected by the index bits.
    pub row: usize,
    pub active: Vec<usize>,
    pub bits: Vec<bool>,
}

pub fn build_lookup_table(group_size: usize, active: usize) -> Result<LookupTable> {
    LookupTable::new(group_size, active)
}

pub fn qam_modulate(bits: &[bool], cons: &Constellation) -> Result<Complex64> {
    cons.modulate(bits)
}

pub fn qam_demodulate(symbol: Complex64, cons: &Constellation) -> Vec<bool> {
    cons.demodulate(symbol)
}

/// Bits per group, `b1 + b2`.
pub fn group_bits(table: &LookupTable, cons: &Constellation) -> usize {
    table.index_bits() + table.active() * cons.bits_per_symbol()
}

/// Maps `b1 + b2` bits onto one group.
pub fn encode_group(bits: &[bool], table: &LookupTable, cons: &Constellation) -> Result<GroupData> {
    let expected = group_bits(table, cons);
    if bits.len() != expected {
        return Err(Error::BitCount {
            expected,
            actual: bits.len(),
        });
    }
    let (index_part, symbol_part) = bits.split_at(table.index_bits());
    let row = bits_to_index(index_part);
    let active = table.row(row).to_vec();
    let mut values = vec![Complex64::new(0.0, 0.0); table.group_size()];
    for (&pos, chunk) in active
        .iter()
        .zip(symbol_part.chunks(cons.bits_per_symbol()))
    {
        values[pos] = cons.modulate(chunk)?;
    }
    Ok(GroupData {
        values,
        row,
        active,
        bits: bits.to_vec(),
    })
}

/// Decision statistic used to rank candidate active-subcarrier tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexMetric {
    /// Sum of magnitudes over the candidate positions.
    #[default]
    Magnitude,
    /// Sum of squared magnitudes.
    Energy,
}

impl IndexMetric {
    fn score(self, z: Complex64) -> f64 {
        match self {
            IndexMetric::Magnitude => z.norm(),
            IndexMetric::Energy => z.norm_sqr(),
        }
    }
}

impl std::str::FromStr for IndexMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "magnitude" => Ok(IndexMetric::Magnitude),
            "energy" => Ok(IndexMetric::Energy),
            other => Err(Error::Config(format!("unknown index metric '{other}'"))),
        }
    }
}

impl std::fmt::Display for IndexMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IndexMetric::Magnitude => "magnitude",
            IndexMetric::Energy => "energy",
        })
    }
}

/// Per-row decision metrics for an observed group.
pub fn index_metrics(observed: &[Complex64], table: &LookupTable, metric: IndexMetric) -> Vec<f64> {
    table
        .rows()
        .map(|row| row.iter().map(|&i| metric.score(observed[i])).sum())
        .collect()
}

/// Picks the table row with the largest summed magnitude over its
/// positions. Ties go to the lowest row.
pub fn detect_group<'t>(observed: &[Complex64], table: &'t LookupTable) -> (usize, &'t [usize]) {
    detect_group_with(observed, table, IndexMetric::Magnitude)
}

pub fn detect_group_with<'t>(
    observed: &[Complex64],
    table: &'t LookupTable,
    metric: IndexMetric,
) -> (usize, &'t [usize]) {
    debug_assert_eq!(observed.len(), table.group_size());
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (j, row) in table.rows().enumerate() {
        let score: f64 = row.iter().map(|&i| metric.score(observed[i])).sum();
        if score > best_score {
            best = j;
            best_score = score;
        }
    }
    (best, table.row(best))
}

/// Recovers the group's bits given the detected active tuple: index bits
/// from the tuple's row number, then a hard QAM decision per active
/// position in increasing order.
pub fn demap_group(
    observed: &[Complex64],
    active: &[usize],
    table: &LookupTable,
    cons: &Constellation,
) -> Result<Vec<bool>> {
    let row = table
        .position(active)
        .ok_or_else(|| Error::UnknownCombination(active.to_vec()))?;
    let mut bits = Vec::with_capacity(group_bits(table, cons));
    demap_row_into(observed, row, table, cons, &mut bits);
    Ok(bits)
}

pub(crate) fn demap_row_into(
    observed: &[Complex64],
    row: usize,
    table: &LookupTable,
    cons: &Constellation,
    out: &mut Vec<bool>,
) {
    index_to_bits(row, table.index_bits(), out);
    for &pos in table.row(row) {
        cons.demodulate_into(observed[pos], out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn to_bits(s: &str) -> Vec<bool> {
        s.chars().map(|ch| ch == '1').collect()
    }

    #[test]
    fn table_4_2_matches_reference() {
        let t = LookupTable::new(4, 2).unwrap();
        assert_eq!(t.index_bits(), 2);
        let rows: Vec<_> = t.rows().map(<[usize]>::to_vec).collect();
        assert_eq!(rows, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn table_small_cases() {
        let t = LookupTable::new(2, 1).unwrap();
        assert_eq!(t.index_bits(), 1);
        assert_eq!(t.row(0), &[0]);
        assert_eq!(t.row(1), &[1]);

        let t = LookupTable::new(8, 2).unwrap();
        assert_eq!(t.index_bits(), 4);
        assert_eq!(t.len(), 16);
        assert_eq!(t.row(15), &[2, 5]);

        let t = LookupTable::new(4, 4).unwrap();
        assert_eq!(t.index_bits(), 0);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn table_rejects_bad_dimensions() {
        assert!(LookupTable::new(4, 0).is_err());
        assert!(LookupTable::new(4, 5).is_err());
    }

    #[test]
    fn qpsk_points_and_labels() {
        let q = Constellation::new(4).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((q.points()[0] - c(s, s)).norm() < 1e-15);
        for p in q.points() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(q.demodulate(c(0.9, 0.9)), to_bits("00"));
        assert_eq!(q.demodulate(c(-0.2, 0.9)), to_bits("10"));
        assert_eq!(q.demodulate(c(0.3, -2.0)), to_bits("01"));
    }

    #[test]
    fn qam_round_trip_energy_and_gray() {
        for order in [4usize, 16, 64, 256] {
            let cons = Constellation::new(order).unwrap();
            let energy: f64 = cons.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
            assert!((energy - 1.0).abs() < 1e-12, "M = {order}: {energy}");
            let mut labels = Vec::new();
            for label in 0..order {
                index_to_bits(label, cons.bits_per_symbol(), &mut labels);
                let bits = &labels[labels.len() - cons.bits_per_symbol()..];
                let sym = cons.modulate(bits).unwrap();
                assert_eq!(cons.demodulate(sym), bits);
            }
            // nearest neighbours (distance 2 * scale) differ in one bit
            let d_min = cons.points().iter().enumerate().flat_map(|(i, a)| {
                cons.points()[i + 1..].iter().map(move |b| (a - b).norm())
            }).fold(f64::INFINITY, f64::min);
            for (i, a) in cons.points().iter().enumerate() {
                for (j, b) in cons.points().iter().enumerate() {
                    if i != j && ((a - b).norm() - d_min).abs() < 1e-9 {
                        assert_eq!((i ^ j).count_ones(), 1, "M = {order}: {i} vs {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn unsupported_orders() {
        for order in [0usize, 1, 2, 8, 12, 32] {
            assert!(Constellation::new(order).is_err(), "{order}");
        }
    }

    #[test]
    fn encode_fourth_row() {
        let t = LookupTable::new(4, 2).unwrap();
        let q = Constellation::new(4).unwrap();
        let g = encode_group(&to_bits("110000"), &t, &q).unwrap();
        assert_eq!(g.row, 3);
        assert_eq!(g.active, vec![1, 2]);
    }

    #[test]
    fn encode_all_zero_bits() {
        let t = LookupTable::new(4, 2).unwrap();
        let q = Constellation::new(4).unwrap();
        let g = encode_group(&to_bits("000000"), &t, &q).unwrap();
        let s00 = q.points()[0];
        let z = c(0.0, 0.0);
        assert_eq!(g.values, vec![s00, s00, z, z]);
    }

    #[test]
    fn encode_full_activation_is_plain_qam() {
        let t = LookupTable::new(4, 4).unwrap();
        let q = Constellation::new(4).unwrap();
        let g = encode_group(&to_bits("00011011"), &t, &q).unwrap();
        assert_eq!(g.values, q.points().to_vec());
    }

    #[test]
    fn encode_wrong_bit_count() {
        let t = LookupTable::new(4, 2).unwrap();
        let q = Constellation::new(4).unwrap();
        assert_eq!(
            encode_group(&to_bits("00000"), &t, &q).unwrap_err(),
            Error::BitCount { expected: 6, actual: 5 }
        );
    }

    #[test]
    fn detection_examples() {
        let t = LookupTable::new(4, 2).unwrap();
        let obs = [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(index_metrics(&obs, &t, IndexMetric::Magnitude), vec![2.0, 1.0, 1.0, 1.0]);
        assert_eq!(detect_group(&obs, &t), (0, &[0usize, 1][..]));

        assert_eq!(detect_group(&[c(0.0, 0.0); 4], &t).0, 0);

        let obs = [c(0.0, 0.0), c(0.1, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let m = index_metrics(&obs, &t, IndexMetric::Magnitude);
        for (a, b) in m.iter().zip([0.1, 1.0, 1.0, 1.1]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(detect_group(&obs, &t), (3, &[1usize, 2][..]));
    }

    #[test]
    fn energy_metric_can_disagree_with_magnitude() {
        let t = LookupTable::new(4, 2).unwrap();
        // {1,2}: magnitude 2.0, energy 2.0; {0,3}: magnitude 1.45, energy 2.1025
        let obs = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.45, 0.0)];
        assert_eq!(detect_group_with(&obs, &t, IndexMetric::Magnitude).0, 3);
        assert_eq!(detect_group_with(&obs, &t, IndexMetric::Energy).0, 2);
    }

    #[test]
    fn demap_examples() {
        let t = LookupTable::new(4, 2).unwrap();
        let q = Constellation::new(4).unwrap();
        let obs = [c(0.0, 0.0), c(0.9, 0.9), c(-0.7, 0.6), c(0.0, 0.0)];
        assert_eq!(demap_group(&obs, &[1, 2], &t, &q).unwrap(), to_bits("110010"));
        assert_eq!(
            demap_group(&obs, &[2, 3], &t, &q).unwrap_err(),
            Error::UnknownCombination(vec![2, 3])
        );
    }

    #[test]
    fn exhaustive_round_trip_4_2_qpsk() {
        let t = LookupTable::new(4, 2).unwrap();
        let q = Constellation::new(4).unwrap();
        let mut bits = Vec::new();
        for pattern in 0..64 {
            bits.clear();
            index_to_bits(pattern, 6, &mut bits);
            let g = encode_group(&bits, &t, &q).unwrap();
            let (row, active) = detect_group(&g.values, &t);
            assert_eq!(row, g.row);
            assert_eq!(demap_group(&g.values, active, &t, &q).unwrap(), bits);
        }
    }
}
