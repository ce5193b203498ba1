use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codec::IndexMetric;
use crate::error::Result;

use super::config::{Scheme, SimConfig};
use super::sweep::BerRecord;

/// One CSV line: a BER point plus the full configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub scheme: Scheme,
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub ci95: f64,
    pub trials: u64,
    pub seed: u64,
    pub ebn0_factor: f64,
    pub ebn0_db: f64,
    pub users: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub subsymbols: usize,
    pub subcarriers: usize,
    pub group_size: usize,
    pub active: usize,
    pub qam_order: usize,
    pub rolloff: f64,
    pub taps: usize,
    pub min_errors: u64,
    pub max_bits: u64,
    pub index_metric: IndexMetric,
    pub shared_rx_taps: bool,
}

pub const COLUMNS: [&str; 24] = [
    "scheme",
    "snr_db",
    "bits",
    "errors",
    "ber",
    "ci95",
    "trials",
    "seed",
    "ebn0_factor",
    "ebn0_db",
    "users",
    "tx_antennas",
    "rx_antennas",
    "subsymbols",
    "subcarriers",
    "group_size",
    "active",
    "qam_order",
    "rolloff",
    "taps",
    "min_errors",
    "max_bits",
    "index_metric",
    "shared_rx_taps",
];

impl CsvRow {
    pub fn new(config: &SimConfig, record: &BerRecord) -> Self {
        let factor = config.ebn0_factor();
        CsvRow {
            scheme: config.scheme,
            snr_db: record.snr_db,
            bits: record.bits,
            errors: record.errors,
            ber: record.ber,
            ci95: record.ci95,
            trials: record.trials,
            seed: config.seed,
            ebn0_factor: factor,
            ebn0_db: record.snr_db + 10.0 * factor.log10(),
            users: config.users,
            tx_antennas: config.tx_antennas,
            rx_antennas: config.rx_antennas,
            subsymbols: config.subsymbols,
            subcarriers: config.subcarriers,
            group_size: config.group_size,
            active: config.active,
            qam_order: config.qam_order,
            rolloff: config.rolloff,
            taps: config.taps,
            min_errors: config.min_errors,
            max_bits: config.max_bits,
            index_metric: config.index_metric,
            shared_rx_taps: config.shared_rx_taps,
        }
    }

    pub fn record(&self) -> BerRecord {
        BerRecord {
            snr_db: self.snr_db,
            bits: self.bits,
            errors: self.errors,
            ber: self.ber,
            ci95: self.ci95,
            trials: self.trials,
        }
    }
}

/// Writes the header and one row per record. An empty row list yields a
/// header-only file.
pub fn write_rows<W: Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[CsvRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Rows for one sweep's records.
pub fn rows_for(config: &SimConfig, records: &[BerRecord]) -> Vec<CsvRow> {
    records.iter().map(|r| CsvRow::new(config, r)).collect()
}

pub fn emit_csv(config: &SimConfig, records: &[BerRecord], path: &Path) -> Result<()> {
    write_rows(std::fs::File::create(path)?, &rows_for(config, records))
}

pub fn read_rows<R: std::io::Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    read_rows(std::fs::File::open(path)?)
}
