//! CSV and JSON artifacts. Floats are written in shortest round-trip form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::counting::{CoincidenceTally, G2Point};
use crate::eit::TransmissionSpectrum;
use crate::error::{Error, Result};
use crate::model::{ComplexWaveform, TimeGrid, C64};
use crate::qubit::BasisCounts;

#[derive(Debug, Serialize, Deserialize)]
struct WaveformRow {
    tau_ns: f64,
    re: f64,
    im: f64,
}

pub fn write_waveform_csv(path: &Path, w: &ComplexWaveform) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    for (t, s) in w.grid().times().zip(w.samples()) {
        out.serialize(WaveformRow {
            tau_ns: t * 1e9,
            re: s.re,
            im: s.im,
        })?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a waveform written by [`write_waveform_csv`]. Rows must be
/// uniformly spaced in time.
pub fn read_waveform_csv(path: &Path) -> Result<ComplexWaveform> {
    let mut rdr = csv::Reader::from_path(path)?;
    let rows = rdr.deserialize().collect::<Result<Vec<WaveformRow>, _>>()?;
    if rows.len() < 2 {
        return Err(Error::param("waveform", "needs at least two rows"));
    }
    let start = rows[0].tau_ns * 1e-9;
    let step = (rows[1].tau_ns - rows[0].tau_ns) * 1e-9;
    let grid = TimeGrid::new(start, step, rows.len())?;
    for (i, r) in rows.iter().enumerate() {
        if (r.tau_ns * 1e-9 - grid.time(i)).abs() > 1e-6 * step {
            return Err(Error::param(
                "waveform",
                format!("row {} is off the uniform grid", i + 2),
            ));
        }
    }
    ComplexWaveform::new(grid, rows.iter().map(|r| C64::new(r.re, r.im)).collect())
}

pub fn write_spectrum_csv(path: &Path, s: &TransmissionSpectrum) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    out.write_record(["delta_hz", "transmission"])?;
    for (d, t) in s.detunings.iter().zip(&s.transmission) {
        // detunings are angular internally
        out.write_record(&[(d / (2.0 * std::f64::consts::PI)).to_string(), t.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// One CSV row per record, header from the field names.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

/// `basis,outcome,count` rows in H V D A L R order.
pub fn write_counts_csv(path: &Path, c: &BasisCounts) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    out.write_record(["basis", "outcome", "count"])?;
    for (basis, outcome, n) in [
        ("HV", "H", c.h),
        ("HV", "V", c.v),
        ("DA", "D", c.d),
        ("DA", "A", c.a),
        ("LR", "L", c.l),
        ("LR", "R", c.r),
    ] {
        out.write_record(&[basis.to_string(), outcome.to_string(), n.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_counts_csv(path: &Path) -> Result<BasisCounts> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut c = BasisCounts::default();
    for rec in rdr.records() {
        let rec = rec?;
        let outcome = rec.get(1).unwrap_or("");
        let n: f64 = rec
            .get(2)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| Error::param("count", format!("unparseable count in {rec:?}")))?;
        c.add(outcome, n)?;
    }
    Ok(c)
}

pub fn write_tally_csv(path: &Path, t: &CoincidenceTally) -> Result<()> {
    write_rows(path, std::slice::from_ref(t))
}

#[derive(Serialize)]
struct G2Row {
    storage_time_us: f64,
    p_signal: f64,
    p_noise: f64,
    g2: f64,
    sigma: f64,
    g2_analytic: f64,
}

pub fn write_g2_curve_csv(path: &Path, pts: &[G2Point]) -> Result<()> {
    let rows: Vec<G2Row> = pts
        .iter()
        .map(|p| G2Row {
            storage_time_us: p.storage_time * 1e6,
            p_signal: p.p_signal,
            p_noise: p.p_noise,
            g2: p.g2,
            sigma: p.sigma,
            g2_analytic: p.g2_analytic,
        })
        .collect();
    write_rows(path, &rows)
}
