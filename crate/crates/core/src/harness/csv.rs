//! CSV output of trials and batch summaries.

use std::io::{Read, Write};

use super::summary::BatchSummary;
use super::trial::TrialResult;
use crate::error::{Error, Result};

/// Marker for undefined values.
pub const UNDEFINED: &str = ".";

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |x| x.to_string())
}

/// Columns `frame, time_s, rho, u_1..u_N, gamma_1..gamma_N`.
pub fn write_trial_csv<W: Write>(out: W, result: &TrialResult) -> Result<()> {
    let n = result
        .utility
        .first()
        .map(Vec::len)
        .or_else(|| result.msc.first().map(|m| m.len()))
        .unwrap_or(0);
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["frame".to_string(), "time_s".into(), "rho".into()];
    header.extend((1..=n).map(|p| format!("u_{p}")));
    header.extend((1..=n).map(|p| format!("gamma_{p}")));
    wtr.write_record(&header)?;
    let frames = result.rho.len().max(result.utility.len());
    for l in 0..frames {
        let mut row = vec![
            l.to_string(),
            cell(result.frame_times.get(l).copied()),
            cell(result.rho.get(l).copied().flatten()),
        ];
        for p in 0..n {
            row.push(cell(result.utility.get(l).map(|u| u[p])));
        }
        for p in 0..n {
            row.push(cell(result.msc.get(l).map(|g| g.0[p])));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Read back the `rho` column.
pub fn read_rho_column<R: Read>(input: R) -> Result<Vec<Option<f64>>> {
    let mut rdr = csv::Reader::from_reader(input);
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h == "rho")
        .ok_or_else(|| Error::Config("CSV has no rho column".into()))?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let raw = rec.get(col).unwrap_or(UNDEFINED);
            if raw == UNDEFINED {
                Ok(None)
            } else {
                raw.parse::<f64>()
                    .map(Some)
                    .map_err(|e| Error::Config(format!("bad rho value {raw:?}: {e}")))
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(
    out: W,
    summary: &BatchSummary,
    frame_times: &[f64],
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["frame", "time_s", "q25", "median", "q75", "defined"])?;
    for l in 0..summary.frames() {
        wtr.write_record([
            l.to_string(),
            cell(frame_times.get(l).copied()),
            cell(summary.q25[l]),
            cell(summary.median[l]),
            cell(summary.q75[l]),
            summary.defined[l].to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
