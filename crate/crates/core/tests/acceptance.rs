//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails. All tolerances are fixed here.

use std::time::Instant;

use notrade::empirics::{implied_premium, EmpiricalRow};
use notrade::gap::no_trade_width;
use notrade::policy::{expansions, finite_horizon_bounds, policy_report, turnover};
use notrade::shadow::shadow_coefficients;
use notrade::{
    boundary_residual, derivative_table_check, estimate_horizon_esr, estimate_turnover, gap_series,
    local_time_rates, simulate, solve_gap, validate, CaseTag, InitialPosition, MarketSpec,
    SeriesOrder, SimConfig, ValidatedSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MU: f64 = 0.08;
const SIGMA: f64 = 0.16;

fn spec(mu: f64, sigma: f64, gamma: f64, eps: f64) -> ValidatedSpec {
    validate(MarketSpec::new(0.0, mu, sigma, gamma, eps)).expect("valid parameters")
}

fn reference(gamma: f64, eps: f64) -> ValidatedSpec {
    spec(MU, SIGMA, gamma, eps)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Residual below 1e-12 at the solved gap, each solve under 1 ms.
fn gap_solver() -> Outcome {
    const RESIDUAL_TOL: f64 = 1e-12;
    const TIME_LIMIT_MS: f64 = 1.0;
    const REPEAT: usize = 200;
    let mut worst_res: f64 = 0.0;
    let mut worst_ms: f64 = 0.0;
    for eps in [1e-5, 1e-4, 1e-3, 1e-2] {
        let s = reference(5.0, eps);
        let start = Instant::now();
        let mut lambda = 0.0;
        for _ in 0..REPEAT {
            lambda = solve_gap(&s).map(|g| g.lambda).unwrap_or(f64::NAN);
        }
        let ms = start.elapsed().as_secs_f64() * 1e3 / REPEAT as f64;
        let res = boundary_residual(&s, lambda).map(f64::abs).unwrap_or(f64::INFINITY);
        worst_res = worst_res.max(res);
        worst_ms = worst_ms.max(ms);
    }
    outcome(
        worst_res < RESIDUAL_TOL && worst_ms < TIME_LIMIT_MS,
        format!("max |residual| {worst_res:.2e} (< {RESIDUAL_TOL:e}), slowest solve {worst_ms:.3} ms (< {TIME_LIMIT_MS} ms)"),
    )
}

/// Scaled truncation errors within a factor 3 of frozen constants.
fn series_orders() -> Outcome {
    const FACTOR: f64 = 3.0;
    // frozen from an independent prototype at gamma = 5
    const C_GAP: f64 = 0.0045; // |lambda - lambda_2| / eps^(4/3)
    const C_ESR: f64 = 0.0013; // |esr - expansion| / eps^(4/3)
    const C_PI: f64 = 0.05; // |pi_pm - expansion| / eps
    let mut ok = true;
    let mut worst: f64 = 1.0;
    let mut check = |value: f64, c: f64| {
        let r = value / c;
        let ratio = r.max(1.0 / r);
        worst = worst.max(ratio);
        ok &= ratio.is_finite() && ratio <= FACTOR;
    };
    for eps in [1e-4, 1e-3, 1e-2] {
        let s = reference(5.0, eps);
        let g = solve_gap(&s).expect("solve");
        let rep = policy_report(&g);
        let exp = expansions(&s, eps);
        let e43 = f64::powf(eps, 4.0 / 3.0);
        check((g.lambda - gap_series(&s, SeriesOrder::Second)).abs() / e43, C_GAP);
        check((rep.esr - exp.esr).abs() / e43, C_ESR);
        check((rep.pi_plus - exp.pi_plus).abs() / eps, C_PI);
        check((rep.pi_minus - exp.pi_minus).abs() / eps, C_PI);
    }
    outcome(ok, format!("gap, ESR, pi+ and pi- error constants within factor {worst:.2} of frozen values (limit {FACTOR})"))
}

/// LiP/(eps ShT) and the welfare-loss ratio in [0.74, 0.76].
fn universal_relation() -> Outcome {
    const LO: f64 = 0.74;
    const HI: f64 = 0.76;
    const EPS: f64 = 1e-4;
    let mut ok = true;
    let mut parts = Vec::new();
    for gamma in [0.5, 2.0, 5.0, 10.0] {
        let s = reference(gamma, EPS);
        if s.is_unit_merton() {
            continue;
        }
        let g = solve_gap(&s).expect("solve");
        let rep = policy_report(&g);
        let share = rep.lip / (EPS * rep.share_turnover);
        let wealth = (s.frictionless_esr() - rep.esr) / (EPS * rep.wealth_turnover);
        ok &= (LO..=HI).contains(&share) && (LO..=HI).contains(&wealth);
        parts.push(format!("gamma {gamma}: {share:.4}/{wealth:.4}"));
    }
    outcome(ok, format!("ratios in [{LO}, {HI}]: {}", parts.join(", ")))
}

/// Direct and local-time turnover formulas agree on a 100-point grid.
fn turnover_identity() -> Outcome {
    const TOL: f64 = 1e-12;
    let gammas = [0.5, 1.0, 1.5, 2.0, 2.5, 4.0, 5.0, 7.5, 10.0, 20.0];
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for &gamma in &gammas {
        for k in 0..10 {
            let eps = 10f64.powf(-5.0 + 4.0 * k as f64 / 9.0);
            let g = solve_gap(&reference(gamma, eps)).expect("solve");
            let t = turnover(&g).expect("turnover");
            let d1 = (t.share - t.share_direct).abs() / t.share.abs().max(1.0);
            let d2 = (t.wealth - t.wealth_direct).abs() / t.wealth.abs().max(1.0);
            worst = worst.max(d1).max(d2);
            points += 1;
        }
    }
    outcome(worst <= TOL, format!("{points} grid points, max discrepancy {worst:.2e} (<= {TOL:e})"))
}

/// Simulated long-run rates within 5% of the closed forms.
fn monte_carlo() -> Outcome {
    const TOL: f64 = 0.05;
    const TIME_TARGET_S: f64 = 60.0;
    let s = reference(5.0, 0.01);
    let g = solve_gap(&s).expect("solve");
    // 400 years and step 1e-5 in business time sigma^2 t
    let cfg = SimConfig::business_time(&s, 400.0, 1e-5, 64, 7);
    let start = Instant::now();
    let paths = simulate(&g, &cfg, &InitialPosition::cash()).expect("simulate");
    let secs = start.elapsed().as_secs_f64();
    let est = estimate_turnover(&paths);
    let (lb, ls) = local_time_rates(&g).expect("local times");
    let rep = policy_report(&g);
    let pairs = [
        ("L/T", est.ltime_buy.mean, lb),
        ("U/T", est.ltime_sell.mean, ls),
        ("ShT", est.share.mean, rep.share_turnover),
        ("WeT", est.wealth.mean, rep.wealth_turnover),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, mc, exact) in pairs {
        let rel = (mc / exact - 1.0).abs();
        ok &= rel < TOL;
        parts.push(format!("{name} {:+.2}%", 100.0 * (mc / exact - 1.0)));
    }
    let timing = if secs < TIME_TARGET_S { "within" } else { "over" };
    outcome(
        ok,
        format!(
            "{} (limit {}%); {:.1} s for {} paths x {} steps, {timing} the {TIME_TARGET_S} s target",
            parts.join(", "),
            100.0 * TOL,
            secs,
            cfg.paths,
            cfg.steps()
        ),
    )
}

/// MC horizon ESR inside the exact bounds; bound width against the loss bound.
fn finite_horizon() -> Outcome {
    const SE_MULT: f64 = 2.0;
    const PATHS: usize = 2000;
    let s = reference(5.0, 0.01);
    let g = solve_gap(&s).expect("solve");
    let start = InitialPosition::cash();
    let mut ok = true;
    let mut parts = Vec::new();
    for horizon in [2.0, 10.0] {
        let cfg = SimConfig::new(horizon, 1e-4, PATHS, 2024);
        let paths = simulate(&g, &cfg, &start).expect("simulate");
        let est = estimate_horizon_esr(&paths, s.gamma()).expect("esr");
        let b = finite_horizon_bounds(&g, horizon, &start).expect("bounds");
        let inside = est.value >= b.lower - SE_MULT * est.se && est.value <= b.upper + SE_MULT * est.se;
        ok &= inside;
        parts.push(format!(
            "T={horizon}: {:.5} in [{:.5}, {:.5}] +/- {:.5}",
            est.value,
            b.lower,
            b.upper,
            SE_MULT * est.se
        ));
    }
    let eps = 1e-3;
    let s = reference(5.0, eps);
    let g = solve_gap(&s).expect("solve");
    let limit = (3.0 * s.merton_fraction() + 1.0) * eps + 0.5 * f64::powf(eps, 4.0 / 3.0);
    let mut worst: f64 = 0.0;
    for horizon in [0.5, 1.0, 2.0, 5.0, 10.0, 50.0] {
        let b = finite_horizon_bounds(&g, horizon, &start).expect("bounds");
        worst = worst.max(b.width() * horizon);
    }
    ok &= worst <= limit;
    parts.push(format!("max (upper-lower)T at eps=1e-3 {worst:.3e} <= {limit:.3e}"));
    outcome(ok, parts.join("; "))
}

/// Published implied premia within 10%.
fn implied_premia() -> Outcome {
    const TOL: f64 = 0.10;
    let rows = [
        ("1992-1995", 0.0120, 0.07, 0.00066),
        ("1996-2000", 0.0097, 0.11, 0.00083),
        ("2001-2005", 0.0037, 0.13, 0.00038),
        ("2006-2010", 0.0012, 0.21, 0.00022),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (period, spread, turnover, printed) in rows {
        let row = EmpiricalRow {
            period: period.into(),
            spread,
            turnover,
            periods_per_year: 12.0,
        };
        let p = implied_premium(&row);
        let rel = (p / printed - 1.0).abs();
        ok &= rel <= TOL;
        parts.push(format!("{period} {:.4}% vs {:.3}% ({:.1}%)", 100.0 * p, 100.0 * printed, 100.0 * rel));
    }
    outcome(ok, format!("{} (limit {}%)", parts.join(", "), 100.0 * TOL))
}

/// (mu, sigma) -> (4 mu, 2 sigma) scales rates by 4 and keeps weights.
fn business_time() -> Outcome {
    const TOL: f64 = 1e-10;
    let mut worst: f64 = 0.0;
    for gamma in [0.5, 2.0, 5.0, 10.0] {
        for eps in [1e-4, 1e-3, 1e-2] {
            let a = solve_gap(&spec(MU, SIGMA, gamma, eps)).expect("solve");
            let b = solve_gap(&spec(4.0 * MU, 2.0 * SIGMA, gamma, eps)).expect("solve");
            let (ra, rb) = (policy_report(&a), policy_report(&b));
            for (x, y) in [
                (ra.gap, rb.gap),
                (ra.esr, rb.esr),
                (ra.lip, rb.lip),
                (ra.share_turnover, rb.share_turnover),
                (ra.wealth_turnover, rb.wealth_turnover),
            ] {
                worst = worst.max((y / (4.0 * x) - 1.0).abs());
            }
            worst = worst.max((ra.pi_minus - rb.pi_minus).abs()).max((ra.pi_plus - rb.pi_plus).abs());
        }
    }
    outcome(worst <= TOL, format!("max relative deviation {worst:.2e} (<= {TOL:e}) over 12 parameter sets"))
}

/// Shadow multiplier within the spread; smooth pasting at both boundaries.
fn shadow_confinement() -> Outcome {
    const SETS: usize = 20;
    const GRID: usize = 10_000;
    const PASTE_TOL: f64 = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut ok = true;
    let mut done = 0;
    let mut levered = 0;
    let mut worst_paste: f64 = 0.0;
    let mut failures = Vec::new();
    while done < SETS {
        let mu = rng.random_range(0.03..0.12);
        let sigma = rng.random_range(0.12..0.35);
        // every other set levered
        let p_target = if done % 2 == 0 { rng.random_range(1.1..3.0) } else { rng.random_range(0.1..0.9) };
        let gamma = mu / (sigma * sigma * p_target);
        let eps = 10f64.powf(rng.random_range(-4.0..-2.0));
        let s = spec(mu, sigma, gamma, eps);
        if s.is_levered() {
            levered += 1;
        }
        done += 1;
        let Ok(g) = solve_gap(&s) else {
            ok = false;
            failures.push(format!("no solution at mu={mu:.3} sigma={sigma:.3} gamma={gamma:.3}"));
            continue;
        };
        let c = shadow_coefficients(&g).expect("coefficients");
        for i in 0..GRID {
            let y = g.log_ratio * i as f64 / (GRID - 1) as f64;
            let v = c.g(y).unwrap_or(f64::NAN);
            if !(v >= 1.0 - eps - 1e-12 && v <= 1.0 + 1e-12) {
                ok = false;
                failures.push(format!("g({y})={v} at gamma={gamma:.3}"));
                break;
            }
        }
        let w = g.w_function().expect("w");
        let (pm, pp) = (g.pi_minus, g.pi_plus);
        let width = no_trade_width(&s, g.lambda).expect("width");
        let checks = [
            w.eval_w(0.0).unwrap() - pm,
            w.eval_w(width).unwrap() - pp,
            w.eval_w_prime(0.0).unwrap() - pm * (1.0 - pm),
            w.eval_w_prime(width).unwrap() - pp * (1.0 - pp),
        ];
        for d in checks {
            worst_paste = worst_paste.max(d.abs());
        }
    }
    ok &= worst_paste <= PASTE_TOL;
    let mut detail = format!(
        "{SETS} sets ({levered} levered), {GRID}-point grids; max smooth-pasting error {worst_paste:.2e} (<= {PASTE_TOL:e})"
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; {}", failures.join("; ")));
    }
    outcome(ok, detail)
}

/// Closed-form partials of w at the origin against Richardson differences.
fn derivative_table() -> Outcome {
    const TOL: f64 = 1e-4;
    let mut ok = true;
    let mut parts = Vec::new();
    for (gamma, want) in [(5.0, CaseTag::TanCase), (2.0, CaseTag::TanhCase), (0.5, CaseTag::CothCase)] {
        let s = reference(gamma, 0.0);
        let case = notrade::classify(&s, 0.0).expect("case");
        let rep = derivative_table_check(&s).expect("derivatives");
        ok &= case == want && rep.max_rel_error < TOL;
        parts.push(format!("{case}: {:.1e}", rep.max_rel_error));
    }
    outcome(ok, format!("max relative error per case {} (< {TOL:e})", parts.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("gap solver residual and speed", gap_solver),
        ("series convergence orders", series_orders),
        ("universal volume-spread relation", universal_relation),
        ("turnover identity", turnover_identity),
        ("Monte Carlo local times and turnover", monte_carlo),
        ("finite-horizon sandwich", finite_horizon),
        ("implied premium table", implied_premia),
        ("business-time invariance", business_time),
        ("shadow price confinement", shadow_confinement),
        ("derivative table", derivative_table),
    ];
    let mut passed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {name}: {}", i + 1, o.detail);
        passed += o.pass as usize;
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
