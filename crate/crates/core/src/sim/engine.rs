use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ledger::{Side, TradeRecord};
use super::{SamplePoint, SimConfig, SimPath};
use crate::gap::GapSolution;
use crate::numerics::CompensatedSum;
use crate::shadow::{initial_state, InitialPosition};
use crate::{Error, Result};

/// FNV-1a over 64-bit words.
pub(crate) struct Fnv(u64);

impl Fnv {
    pub fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
    pub fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    pub fn write_f64(&mut self, v: f64) {
        self.write_u64(v.to_bits());
    }
    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// Everything a path needs, computed once.
///
/// The state is `y = log(ratio / l)` where `ratio` is the value of the risky
/// position at the ask over the safe position. Between trades
/// `dy = (mu - sigma^2/2) dt + sigma dW`; the buy boundary is `y = 0` and the
/// sell boundary `y = log(u/l)`. Prices are not stepped: `log S_t` is the
/// exact exponential of the same Brownian path, recovered from the running
/// sum of the normal draws.
pub(crate) struct Setup {
    unit: bool,
    steps: usize,
    dt: f64,
    drift_dt: f64,
    vol_sdt: f64,
    price_drift: f64,
    r: f64,
    eps: f64,
    width: f64,
    orient: f64,
    lo: f64,
    hi: f64,
    l: f64,
    u: f64,
    buy_scale: f64,
    sell_scale: f64,
    y0: f64,
    ln_phi0: f64,
    ln_s0: f64,
    initial_trade: Option<TradeRecord>,
    seed: u64,
    record_trades: bool,
    record_every: usize,
    horizon: f64,
}

impl Setup {
    pub fn new(gap: &GapSolution, cfg: &SimConfig, pos: &InitialPosition) -> Result<Self> {
        let s = &gap.spec;
        let width = gap.log_ratio;
        if width != 0.0 {
            let limit = (width / s.sigma()).powi(2) / 16.0;
            if cfg.step > limit {
                return Err(Error::StepTooCoarse { step: cfg.step, limit });
            }
        }
        let unit = s.is_unit_merton();
        let y0 = initial_state(gap, pos)?;
        let eps = s.epsilon();
        let (xi0, xi, s0) = (pos.xi0, pos.xi, pos.s0);

        // initial trade onto the boundary, if the start lies outside
        let delta = if unit {
            xi0 / s0
        } else if y0 == 0.0 {
            (gap.l * xi0 - xi * s0) / (s0 * (1.0 + gap.l))
        } else if y0 == width {
            -(xi * s0 - gap.u * xi0) / (s0 * (1.0 + (1.0 - eps) * gap.u))
        } else {
            0.0
        };
        let phi = xi + delta;
        if phi.is_nan() || phi <= 0.0 {
            return Err(Error::NonpositiveWealth(phi * s0));
        }
        let initial_trade = (delta != 0.0).then(|| {
            let side = if delta > 0.0 { Side::Buy } else { Side::Sell };
            let price = if side == Side::Buy || eps == 0.0 { s0 } else { (1.0 - eps) * s0 };
            TradeRecord {
                path: 0,
                t: 0.0,
                side,
                shares: delta.abs(),
                price,
                state: y0,
                shares_after: phi,
                safe_before: xi0,
                safe_after: xi0 - delta * price,
            }
        });

        Ok(Setup {
            unit,
            steps: cfg.steps(),
            dt: cfg.step,
            drift_dt: (s.mu() - 0.5 * s.sigma2()) * cfg.step,
            vol_sdt: s.sigma() * cfg.step.sqrt(),
            price_drift: s.mu() + s.r() - 0.5 * s.sigma2(),
            r: s.r(),
            eps,
            width,
            orient: gap.orientation(),
            lo: width.min(0.0),
            hi: width.max(0.0),
            l: gap.l,
            u: gap.u,
            buy_scale: 1.0 / (1.0 + gap.l),
            sell_scale: 1.0 / (1.0 + (1.0 - eps) * gap.u),
            y0,
            ln_phi0: phi.ln(),
            ln_s0: s0.ln(),
            initial_trade,
            seed: cfg.seed,
            record_trades: cfg.record_trades,
            record_every: cfg.record_every,
            horizon: cfg.steps() as f64 * cfg.step,
        })
    }

    /// Signed stock/safe ratio at the ask for state `y`; infinite when
    /// everything is in the stock.
    fn ratio(&self, y: f64) -> f64 {
        if self.unit {
            f64::INFINITY
        } else {
            self.l * y.exp()
        }
    }

    fn ln_price(&self, t: f64, zsum: f64) -> f64 {
        self.ln_s0 + self.price_drift * t + self.vol_sdt * zsum
    }

    fn snapshot(&self, t: f64, y: f64, ln_phi: f64, zsum: f64, lb: f64, ls: f64) -> SamplePoint {
        let price = self.ln_price(t, zsum).exp();
        let shares = ln_phi.exp();
        let stock = shares * price;
        let rho = self.ratio(y);
        SamplePoint {
            t,
            y,
            local_buy: lb,
            local_sell: ls,
            shares,
            safe_units: stock / rho / (self.r * t).exp(),
            price,
            liquidation: stock * (1.0 / rho + 1.0 - self.eps),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &self,
        path: usize,
        t: f64,
        side: Side,
        y_pre: f64,
        rel: f64,
        ln_phi_pre: f64,
        zsum: f64,
    ) -> TradeRecord {
        let ask = self.ln_price(t, zsum).exp();
        let phi = ln_phi_pre.exp();
        let discount = (self.r * t).exp();
        let (price, rho_after) = match side {
            Side::Buy => (ask, self.l),
            Side::Sell => ((1.0 - self.eps) * ask, self.u),
        };
        let phi_after = phi * (1.0 + rel);
        TradeRecord {
            path,
            t,
            side,
            shares: (phi * rel).abs(),
            price,
            state: y_pre,
            shares_after: phi_after,
            safe_before: phi * ask / self.ratio(y_pre) / discount,
            safe_after: phi_after * ask / rho_after / discount,
        }
    }

    pub fn run(&self, index: usize) -> SimPath {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);

        let mut y = self.y0;
        let mut zsum = 0.0f64;
        let mut ln_phi = self.ln_phi0;
        let mut lb = CompensatedSum::new();
        let mut ls = CompensatedSum::new();
        let mut share = CompensatedSum::new();
        let mut wealth = CompensatedSum::new();
        let (mut buys, mut sells) = (0u64, 0u64);
        let (mut y_min, mut y_max) = (y, y);
        let mut trades = Vec::new();
        let mut series = Vec::new();
        let mut next_sample = if self.record_every > 0 { self.record_every } else { usize::MAX };

        for step in 1..=self.steps {
            let z: f64 = rng.sample(StandardNormal);
            zsum += z;
            if !self.unit {
                y += self.drift_dt + self.vol_sdt * z;
                if y < self.lo || y > self.hi {
                    let t = step as f64 * self.dt;
                    if self.orient * y < 0.0 {
                        // past the buy boundary: buy back to ratio l
                        let rel = (-y).exp_m1() * self.buy_scale;
                        lb.add(y.abs());
                        share.add(rel.abs());
                        wealth.add((self.l * y.exp_m1() * self.buy_scale / (1.0 + self.ratio(y))).abs());
                        if self.record_trades {
                            trades.push(self.record(index, t, Side::Buy, y, rel, ln_phi, zsum));
                        }
                        ln_phi += rel.ln_1p();
                        buys += 1;
                        y = 0.0;
                    } else {
                        // beyond the sell boundary: sell back to ratio u
                        let d = y - self.width;
                        let rel = (-d).exp_m1() * self.sell_scale;
                        ls.add(d.abs());
                        share.add(rel.abs());
                        let rho = self.ratio(y);
                        wealth.add(
                            ((1.0 - self.eps) * self.u * d.exp_m1() * self.sell_scale
                                / (1.0 + (1.0 - self.eps) * rho))
                                .abs(),
                        );
                        if self.record_trades {
                            trades.push(self.record(index, t, Side::Sell, y, rel, ln_phi, zsum));
                        }
                        ln_phi += rel.ln_1p();
                        sells += 1;
                        y = self.width;
                    }
                }
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
            if step == next_sample {
                let t = step as f64 * self.dt;
                series.push(self.snapshot(t, y, ln_phi, zsum, lb.value(), ls.value()));
                next_sample += self.record_every;
            }
        }

        let t_end = self.horizon;
        let rho = self.ratio(y);
        let log_liquidation = ln_phi + self.ln_price(t_end, zsum) + (1.0 / rho + 1.0 - self.eps).ln();

        let mut h = Fnv::new();
        for v in [y, lb.value(), ls.value(), share.value(), wealth.value(), log_liquidation] {
            h.write_f64(v);
        }
        h.write_u64(buys);
        h.write_u64(sells);

        SimPath {
            index,
            horizon: t_end,
            steps: self.steps,
            y0: self.y0,
            y_final: y,
            y_min,
            y_max,
            local_buy: lb.value(),
            local_sell: ls.value(),
            share_traded: share.value(),
            wealth_traded: wealth.value(),
            buys,
            sells,
            log_liquidation,
            initial_trade: self.initial_trade.map(|tr| TradeRecord { path: index, ..tr }),
            trades,
            series,
            digest: h.finish(),
        }
    }
}
