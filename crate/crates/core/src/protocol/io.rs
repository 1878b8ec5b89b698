//! Line-delimited JSON serialization of datasets.
//!
//! The first line is a header object; each following line is one record holding the
//! row-major `(re, im)` entries of every local unitary and the sparse outcome histogram.
//! Floats are written in shortest round-trip form, so reading restores every bit.

use super::{MeasurementRecord, RandomizedDataset};
use crate::qcore::{BasisString, LocalSetting};
use crate::{CMatrix, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

pub const DATASET_FORMAT: &str = "randmeas-dataset-v1";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    n: usize,
    d: usize,
    m: usize,
    k: u64,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    setting: Vec<Vec<f64>>,
    counts: BTreeMap<String, u64>,
}

pub fn write_dataset<W: Write>(data: &RandomizedDataset, mut out: W) -> Result<()> {
    let header = Header {
        format: DATASET_FORMAT.into(),
        n: data.n_sites(),
        d: data.local_dim(),
        m: data.settings_count(),
        k: data.shots(),
        seed: data.seed(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for r in data.records() {
        let setting = r
            .setting()
            .unitaries()
            .iter()
            .map(|u| {
                let d = u.nrows();
                (0..d * d)
                    .flat_map(|i| [u[(i / d, i % d)].re, u[(i / d, i % d)].im])
                    .collect()
            })
            .collect();
        let counts = r
            .counts()
            .iter()
            .map(|(&idx, &c)| {
                (
                    BasisString::decode(idx, data.n_sites(), data.local_dim()).to_string(),
                    c,
                )
            })
            .collect();
        serde_json::to_writer(&mut out, &RecordLine { setting, counts })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_dataset<R: BufRead>(input: R) -> Result<RandomizedDataset> {
    let mut lines = input
        .lines()
        .filter(|l| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("missing dataset header".into()))??;
    let header: Header = serde_json::from_str(&first)?;
    if header.format != DATASET_FORMAT {
        return Err(Error::Parse(format!("unknown dataset format '{}'", header.format)));
    }
    let (n, d) = (header.n, header.d);
    let mut records = Vec::with_capacity(header.m);
    for (lineno, line) in lines.enumerate() {
        let rec: RecordLine = serde_json::from_str(&line?)?;
        if rec.setting.len() != n {
            return Err(Error::Parse(format!(
                "record {lineno}: {} unitaries for {n} sites",
                rec.setting.len()
            )));
        }
        let unitaries = rec
            .setting
            .iter()
            .map(|flat| {
                if flat.len() != 2 * d * d {
                    return Err(Error::Parse(format!(
                        "record {lineno}: unitary with {} numbers",
                        flat.len()
                    )));
                }
                Ok(CMatrix::from_row_iterator(
                    d,
                    d,
                    flat.chunks(2).map(|c| C64::new(c[0], c[1])),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let counts = rec
            .counts
            .iter()
            .map(|(s, &c)| {
                let s = BasisString::parse(s, d)?;
                if s.len() != n {
                    return Err(Error::Parse(format!("record {lineno}: outcome '{s}' for {n} sites")));
                }
                Ok((s.encode(), c))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        records.push(MeasurementRecord::new(LocalSetting::new(unitaries)?, counts)?);
    }
    if records.len() != header.m {
        return Err(Error::Parse(format!(
            "header announces {} records, found {}",
            header.m,
            records.len()
        )));
    }
    let data = RandomizedDataset::new(n, d, header.seed, records)?;
    if data.shots() != header.k {
        return Err(Error::Parse(format!(
            "header announces K = {}, records have {}",
            header.k,
            data.shots()
        )));
    }
    Ok(data)
}
