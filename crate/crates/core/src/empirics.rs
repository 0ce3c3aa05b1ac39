//! Implied liquidity premium from observed spreads and share turnover,
//! `LiP ~ 3/4 * spread * turnover`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_PERIODS_PER_YEAR: f64 = 12.0;

/// One observation period. Spread and turnover are decimals; turnover is per
/// period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub period: String,
    pub spread: f64,
    pub turnover: f64,
    pub periods_per_year: f64,
}

/// Implied premium per period and annualized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpliedRow {
    pub period: String,
    pub spread: f64,
    pub turnover: f64,
    pub implied_premium: f64,
    pub implied_premium_annual: f64,
}

/// `3/4 * spread * turnover`, in the units of `turnover`.
pub fn implied_premium(row: &EmpiricalRow) -> f64 {
    0.75 * row.spread * row.turnover
}

pub fn implied_row(row: &EmpiricalRow) -> ImpliedRow {
    let p = implied_premium(row);
    ImpliedRow {
        period: row.period.clone(),
        spread: row.spread,
        turnover: row.turnover,
        implied_premium: p,
        implied_premium_annual: p * row.periods_per_year,
    }
}

fn parse_value(raw: &str, line: usize, column: &str) -> Result<f64> {
    let raw = raw.trim();
    let (body, scale) = match raw.strip_suffix('%') {
        Some(b) => (b.trim_end(), 0.01),
        None => (raw, 1.0),
    };
    let v: f64 = body.parse().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("{column}: cannot parse {raw:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::MalformedRow {
            line,
            reason: format!("{column}: non-finite value {raw:?}"),
        });
    }
    if v < 0.0 {
        return Err(Error::NegativeValue {
            line,
            column: column.to_string(),
            value: v * scale,
        });
    }
    Ok(v * scale)
}

/// Parses comma- or tab-delimited text with a header naming the columns
/// `period`, `spread` and `turnover` (any order, case-insensitive, other
/// columns ignored). Values may carry a trailing `%`.
pub fn parse_rows<R: Read>(mut source: R, periods_per_year: f64) -> Result<Vec<EmpiricalRow>> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let Some(header) = text.lines().find(|l| !l.trim().is_empty()) else {
        return Ok(Vec::new());
    };
    let delimiter = if header.contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| Error::MalformedRow {
        line: 1,
        reason: e.to_string(),
    })?;
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MalformedRow {
                line: 1,
                reason: format!("header lacks a {name:?} column"),
            })
    };
    let (ip, is, it) = (find("period")?, find("spread")?, find("turnover")?);

    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::MalformedRow {
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let field = |i: usize, name: &str| {
            rec.get(i).ok_or_else(|| Error::MalformedRow {
                line,
                reason: format!("missing {name} field"),
            })
        };
        let spread = parse_value(field(is, "spread")?, line, "spread")?;
        if spread >= 1.0 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("spread {spread} is not below 1"),
            });
        }
        rows.push(EmpiricalRow {
            period: field(ip, "period")?.to_string(),
            spread,
            turnover: parse_value(field(it, "turnover")?, line, "turnover")?,
            periods_per_year,
        });
    }
    Ok(rows)
}

/// Writes `period, spread, turnover, implied_premium, implied_premium_annual`.
pub fn write_implied<W: Write>(rows: &[ImpliedRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
