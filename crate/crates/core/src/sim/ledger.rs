use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SimPath;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Buy,
    Sell,
}

/// One transaction. Purchases are at the ask, sales at the bid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub path: usize,
    pub t: f64,
    pub side: Side,
    /// Units of the risky asset traded, nonnegative.
    pub shares: f64,
    /// Transaction price per unit.
    pub price: f64,
    /// State before the trade.
    pub state: f64,
    pub shares_after: f64,
    /// Safe-asset units before and after the trade.
    pub safe_before: f64,
    pub safe_after: f64,
}

/// Writes every recorded trade (initial trades included) as delimited text
/// with a header.
pub fn write_trades<W: Write>(paths: &[SimPath], out: W, delimiter: u8) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    w.write_record(["path", "time", "side", "shares", "price", "state"])
        .map_err(csv_err)?;
    for p in paths {
        for tr in p.initial_trade.iter().chain(p.trades.iter()) {
            let side = match tr.side {
                Side::Buy => "buy",
                Side::Sell => "sell",
            };
            w.write_record([
                tr.path.to_string(),
                tr.t.to_string(),
                side.to_string(),
                tr.shares.to_string(),
                tr.price.to_string(),
                tr.state.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Io(e.to_string())
}
