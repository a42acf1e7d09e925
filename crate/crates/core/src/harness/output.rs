//! CSV emission and the JSON metadata sidecar.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

use super::run::Rows;
use super::spec::SweepSpec;

pub fn write_csv<W: Write>(rows: &Rows, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match rows {
        Rows::Moment(rs) => rs.iter().try_for_each(|r| w.serialize(r))?,
        Rows::Crlb(rs) => rs.iter().try_for_each(|r| w.serialize(r))?,
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Conventions {
    angles: &'static str,
    gains: &'static str,
    power_profile: &'static str,
    noise: &'static str,
    rice_factor: &'static str,
    pilots_total: &'static str,
    pilots_ratio: &'static str,
    bound: &'static str,
    prior_seed: &'static str,
}

const CONVENTIONS: Conventions = Conventions {
    angles: "AoD phi and AoA psi uniform on [0, pi); half-wavelength ULA phase step pi*cos(angle)",
    gains: "independent Rician per path, alpha = |mu + sigma/sqrt(2)(g1 + j g2)|",
    power_profile: "Omega_l proportional to exp(-(l-1) delta), sum of Omega_l = 1",
    noise: "sigma_v^2 = n_t n_r / 10^(snr_db/10)",
    rice_factor: "K = 10^(rice_db/10)",
    pilots_total: "total pilots x maps to p_t = p_r = round(sqrt(x))",
    pilots_ratio: "PPR maps to p_t = p_r = ceil(sqrt(ceil(PPR * 3L)))",
    bound: "Bayesian bound tr((J_D + J_P)^-1); value column follows --scale",
    prior_seed: "prior term seeded from (master seed, experiment, rice_db, L, delta); shared across SNR, codebook and pilots",
};

#[derive(Debug, Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    spec: &'a SweepSpec,
    rows: usize,
    conventions: Conventions,
}

/// Sidecar path: the output path with `.meta` appended.
pub fn meta_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn write_meta<W: Write>(spec: &SweepSpec, rows: &Rows, out: W) -> Result<()> {
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        spec,
        rows: rows.len(),
        conventions: CONVENTIONS,
    };
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &meta)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Writes `<path>` and `<path>.meta`.
pub fn write_outputs(spec: &SweepSpec, rows: &Rows, path: &Path) -> Result<()> {
    let mut csv_out = BufWriter::new(File::create(path)?);
    write_csv(rows, &mut csv_out)?;
    csv_out.flush()?;
    let mut meta_out = BufWriter::new(File::create(meta_path(path))?);
    write_meta(spec, rows, &mut meta_out)?;
    meta_out.flush()?;
    Ok(())
}
