//! Column schemas of every CSV the tool writes, and a validator.

use std::path::Path;

use crate::csvio::{read_table, Table};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schema {
    /// `step,loss`
    Loss,
    /// `step,sv_1..sv_p`
    Spectra,
    /// `step,time,lambda_1..lambda_r`
    LambdaTrajectory,
    /// `step,time,sigma_1..sigma_p`
    SigmaTrajectory,
    /// `step,sigma_1..sigma_k[,err_1..err_k]`
    Forecast,
    /// `step,beta_1..beta_k`
    Beta,
    /// `x,empirical,model`
    Density,
    /// `x,density`
    DensityTable,
    /// `s,cdf`
    CdfTable,
}

/// `true` when `cols` is exactly `prefix_1..prefix_len`.
fn numbered(cols: &[String], prefix: &str) -> bool {
    !cols.is_empty()
        && cols
            .iter()
            .enumerate()
            .all(|(i, c)| *c == format!("{prefix}_{}", i + 1))
}

fn classify(header: &[String]) -> Option<Schema> {
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    match h.as_slice() {
        ["step", "loss"] => return Some(Schema::Loss),
        ["x", "empirical", "model"] => return Some(Schema::Density),
        ["x", "density"] => return Some(Schema::DensityTable),
        ["s", "cdf"] => return Some(Schema::CdfTable),
        _ => {}
    }
    if h.first() != Some(&"step") {
        return None;
    }
    let rest = &header[1..];
    if numbered(rest, "sv") {
        return Some(Schema::Spectra);
    }
    if numbered(rest, "beta") {
        return Some(Schema::Beta);
    }
    if h.get(1) == Some(&"time") {
        if numbered(&header[2..], "lambda") {
            return Some(Schema::LambdaTrajectory);
        }
        if numbered(&header[2..], "sigma") {
            return Some(Schema::SigmaTrajectory);
        }
        return None;
    }
    if numbered(rest, "sigma") {
        return Some(Schema::Forecast);
    }
    if rest.len() % 2 == 0 {
        let (s, e) = rest.split_at(rest.len() / 2);
        if numbered(s, "sigma") && numbered(e, "err") {
            return Some(Schema::Forecast);
        }
    }
    None
}

fn check_rows(path: &Path, schema: Schema, t: &Table) -> Result<()> {
    let bad = |reason: String| Err(Error::format(path, reason));
    let mut prev_step = None;
    for (i, r) in t.rows.iter().enumerate() {
        if r.iter().any(|v| v.is_nan()) {
            return bad(format!("row {}: NaN", i + 1));
        }
        match schema {
            Schema::Density => continue,
            Schema::DensityTable if r[1] < 0.0 => {
                return bad(format!("row {}: negative density", i + 1))
            }
            Schema::CdfTable if !(0.0..=1.0).contains(&r[1]) => {
                return bad(format!("row {}: cdf outside [0, 1]", i + 1))
            }
            Schema::CdfTable if t.rows[..i].last().is_some_and(|p| p[1] > r[1]) => {
                return bad(format!("row {}: cdf decreases", i + 1))
            }
            Schema::DensityTable | Schema::CdfTable => continue,
            _ => {}
        }
        let step = r[0];
        if step < 0.0 || step.fract() != 0.0 {
            return bad(format!("row {}: step must be a nonnegative integer", i + 1));
        }
        if prev_step.is_some_and(|p| step < p) {
            return bad(format!("row {}: steps must be nondecreasing", i + 1));
        }
        prev_step = Some(step);
        if schema == Schema::Spectra && r[1..].windows(2).any(|w| w[0] < w[1] || w[1] < 0.0) {
            return bad(format!(
                "row {}: singular values must be nonincreasing and nonnegative",
                i + 1
            ));
        }
    }
    Ok(())
}

/// Identifies the schema of a CSV file from its header and checks every row.
pub fn validate_csv(path: &Path) -> Result<Schema> {
    let t = read_table(path)?;
    let schema = classify(&t.header)
        .ok_or_else(|| Error::format(path, format!("unrecognized header {:?}", t.header)))?;
    check_rows(path, schema, &t)?;
    Ok(schema)
}
