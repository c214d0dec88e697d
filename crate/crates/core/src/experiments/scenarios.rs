use num_complex::Complex64;
use rand::Rng;

use super::report::Check;
use super::tolerances as tol;
use super::{RunConfig, RunError};
use crate::closed_forms::{
    averaged_p, averaged_q, beta6_mean, drift_correction, symbol_p2, symbol_q2, variance_betas,
    variance_symbol_averaged, SystemParams,
};
use crate::nonmarkovian::{
    beta1_memory_ode, beta1_pole_solution, kernel_poles, symbol_p_nonmarkov, ExpKernel,
};
use crate::closed_forms::beta1_canonical;
use crate::oracle::{mc_noise_correlation, mc_noise_mean, mc_symbol_averages, Oracle};
use crate::reservoir::{LorentzianBath, ReservoirError, ReservoirSpec};
use crate::rng::sample_stream;
use crate::series::{linspace, TimeSeries};
use crate::symbol_algebra::{PhasePoint, Poly, StarAlgebra};

pub(super) struct Outcome {
    pub series: TimeSeries,
    pub checks: Vec<Check>,
    pub flags: Vec<(String, String)>,
}

fn outcome(series: TimeSeries, checks: Vec<Check>) -> Outcome {
    Outcome { series, checks, flags: Vec::new() }
}

pub(super) fn params(cfg: &RunConfig) -> SystemParams<f64> {
    SystemParams {
        mass: cfg.mass,
        gamma: cfg.gamma,
        temperature: cfg.kbt,
        force: cfg.force,
        hbar: cfg.hbar_value(),
        k_b: 1.0,
    }
}

pub(super) fn bath(cfg: &RunConfig) -> Result<ReservoirSpec, RunError> {
    LorentzianBath {
        gamma: cfg.gamma,
        cutoff: cfg.cutoff,
        mass: cfg.mass,
        n_modes: cfg.n_modes,
        omega_max: cfg.omega_max,
        temperature: cfg.kbt,
        hbar: cfg.hbar_value(),
        k_b: 1.0,
    }
    .build(cfg.t_max)
    .map_err(|e| match e {
        ReservoirError::RecurrenceGuard { horizon, limit } => RunError::Guard { t_max: horizon, limit },
        other => RunError::Compute(other.to_string()),
    })
}

fn grid(cfg: &RunConfig) -> Vec<f64> {
    linspace(0.0, cfg.t_max, cfg.t_steps + 1)
}

fn compute<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Compute(e.to_string())
}

fn col<'a>(s: &'a TimeSeries, name: &str) -> &'a [f64] {
    s.column(name).expect("column produced by this module")
}

fn mc_tolerance(rel: f64) -> String {
    format!("max({} SE, {}% of |expected|)", tol::SE_MULTIPLIER, rel * 100.0)
}

/// `|mean − expected| ≤ max(3 SE, rel·|expected|)` at every listed point.
fn mc_check(name: &str, claim: &str, rel: f64, points: impl IntoIterator<Item = (f64, f64, f64)>) -> Check {
    Check::pointwise(
        name,
        claim,
        mc_tolerance(rel),
        points
            .into_iter()
            .map(|(mean, se, expected)| (mean - expected, (tol::SE_MULTIPLIER * se).max(rel * expected.abs()))),
    )
}

/// Least-squares slope of `y` against `t` over `[lo, hi]`.
fn fitted_slope(t: &[f64], y: &[f64], lo: f64, hi: f64) -> f64 {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(t, _)| **t >= lo - 1e-12 && **t <= hi + 1e-12)
        .map(|(&t, &y)| (t, y))
        .collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    sxy / sxx
}

fn in_window(t: f64, lo: f64, hi: f64) -> bool {
    t >= lo - 1e-12 && t <= hi + 1e-12
}

pub(super) fn canonical(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let spec = bath(cfg)?;
    let p = params(cfg);
    let ts = grid(cfg);
    let z0 = PhasePoint::new(1.0, 1.0);
    let oracle = Oracle::new(spec, p).map_err(compute)?;
    let mc = mc_symbol_averages(&oracle, &[("q", &Poly::q()), ("p", &Poly::p())], z0, &ts, cfg.n_samples, cfg.seed)
        .map_err(compute)?;
    let closed_q: Vec<f64> = ts.iter().map(|&t| averaged_q(t, z0, &p)).collect();
    let closed_p: Vec<f64> = ts.iter().map(|&t| averaged_p(t, z0, &p)).collect();
    let mut series = TimeSeries::new(ts.clone()).map_err(compute)?;
    for (name, values) in [
        ("mc_q_mean", col(&mc, "q_mean").to_vec()),
        ("mc_q_se", col(&mc, "q_se").to_vec()),
        ("closed_q", closed_q.clone()),
        ("mc_p_mean", col(&mc, "p_mean").to_vec()),
        ("mc_p_se", col(&mc, "p_se").to_vec()),
        ("closed_p", closed_p.clone()),
    ] {
        series.push(name, values).map_err(compute)?;
    }
    let (lo, hi) = (5.0 / cfg.cutoff, 5.0 / cfg.gamma);
    let window = |closed: &[f64], mean: &[f64], se: &[f64]| -> Vec<(f64, f64, f64)> {
        ts.iter()
            .enumerate()
            .filter(|(_, &t)| in_window(t, lo, hi))
            .map(|(i, _)| (mean[i], se[i], closed[i]))
            .collect()
    };
    let checks = vec![
        mc_check(
            "canonical_q",
            "thermal mean of q from (1,1) follows the reservoir-averaged position symbol for 5/Gamma <= t <= 5/gamma",
            tol::CANONICAL_MEANS,
            window(&closed_q, col(&mc, "q_mean"), col(&mc, "q_se")),
        ),
        mc_check(
            "canonical_p",
            "thermal mean of p from (1,1) follows the reservoir-averaged momentum symbol for 5/Gamma <= t <= 5/gamma",
            tol::CANONICAL_MEANS,
            window(&closed_p, col(&mc, "p_mean"), col(&mc, "p_se")),
        ),
    ];
    Ok(outcome(series, checks))
}

fn nearest_index(ts: &[f64], t: f64) -> usize {
    ts.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Composite Simpson on `[0, t]`.
fn simpson(f: impl Fn(f64) -> f64, t: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = t / n as f64;
    let mut s = f(0.0) + f(t);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

fn beta6_check(ts: &[f64], p: &SystemParams<f64>) -> Check {
    let mut dev = 0.0f64;
    for &(b1, b3) in &[(1.0, 0.0), (0.0, 1.0)] {
        for &t in ts.iter().filter(|&&t| t > 0.0) {
            let quad = 2.0 * p.kbt() * p.mass * p.gamma * simpson(|s| variance_betas(s, b1, b3, p).beta1, t, 2000);
            dev = dev.max((quad - beta6_mean(t, b1, b3, p)).abs());
        }
    }
    Check::absolute(
        "beta6_quadrature",
        "closed-form mean of the fluctuating variance coefficient equals 2 kBT m gamma times the integral of beta1",
        dev,
        tol::BETA6_QUADRATURE,
    )
}

pub(super) fn variance(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let spec = bath(cfg)?;
    let p = params(cfg);
    let ts = grid(cfg);
    let z0 = PhasePoint::origin();
    let oracle = Oracle::new(spec, p).map_err(compute)?;
    let q2 = Poly::real_monomial(2, 0, 1.0);
    let p2 = Poly::real_monomial(0, 2, 1.0);
    let mc = mc_symbol_averages(&oracle, &[("q2", &q2), ("p2", &p2)], z0, &ts, cfg.n_samples, cfg.seed)
        .map_err(compute)?;
    let free = SystemParams { force: 0.0, ..p };
    let closed_q2: Vec<f64> = ts.iter().map(|&t| symbol_q2(t, z0, &free)).collect();
    let closed_p2: Vec<f64> = ts.iter().map(|&t| symbol_p2(t, z0, &free)).collect();
    let mut series = TimeSeries::new(ts.clone()).map_err(compute)?;
    for (name, values) in [
        ("mc_q2_mean", col(&mc, "q2_mean").to_vec()),
        ("mc_q2_se", col(&mc, "q2_se").to_vec()),
        ("closed_q2", closed_q2),
        ("mc_p2_mean", col(&mc, "p2_mean").to_vec()),
        ("mc_p2_se", col(&mc, "p2_se").to_vec()),
        ("closed_p2", closed_p2.clone()),
    ] {
        series.push(name, values).map_err(compute)?;
    }

    let mut flags = Vec::new();
    let t_eq = 6.0 / cfg.gamma;
    let i_eq = nearest_index(&ts, t_eq);
    if (ts[i_eq] - t_eq).abs() > 1e-9 {
        flags.push(("equipartition_time".to_owned(), format!("{} (grid point nearest 6/gamma)", ts[i_eq])));
    }
    let mkt = p.mass * p.kbt();
    let equipartition = mc_check(
        "equipartition",
        "thermal mean of p^2 from the origin reaches m kBT at t = 6/gamma",
        tol::EQUIPARTITION,
        [(col(&mc, "p2_mean")[i_eq], col(&mc, "p2_se")[i_eq], mkt)],
    );

    let mut exact_dev = 0.0f64;
    let probe = [PhasePoint::origin(), PhasePoint::new(0.7, -1.3)];
    for &t in &ts {
        for &z in &probe {
            let assembled = variance_symbol_averaged(t, 1.0, 0.0, &free).evaluate_real(z);
            let direct = symbol_p2(t, z, &free);
            exact_dev = exact_dev.max((assembled - direct).abs() / direct.abs().max(1.0));
        }
    }
    let late = symbol_p2(40.0 / cfg.gamma, z0, &free);
    exact_dev = exact_dev.max((late - mkt).abs() / mkt.max(1.0));
    let closed = Check::new(
        "p2_closed_form",
        "closed-form p^2 symbol agrees with its beta-coefficient assembly and tends to m kBT",
        format!("{:e} relative", tol::CLOSED_FORM_EXACT),
        exact_dev,
        exact_dev / tol::CLOSED_FORM_EXACT,
    );

    let slope = fitted_slope(&ts, col(&mc, "q2_mean"), 3.0 / cfg.gamma, 6.0 / cfg.gamma);
    let target = 2.0 * p.diffusion();
    let diffusion = Check::new(
        "diffusion_slope",
        "fitted growth rate of <q^2> over [3/gamma, 6/gamma] equals 2D = 2 kBT/(m gamma)",
        format!("{}% of 2D", tol::DIFFUSION_SLOPE * 100.0),
        (slope - target).abs(),
        (slope - target).abs() / (tol::DIFFUSION_SLOPE * target),
    );

    let checks = vec![equipartition, closed, diffusion, beta6_check(&ts, &free)];
    Ok(Outcome { series, checks, flags })
}

pub(super) fn correlation(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let spec = bath(cfg)?;
    let kbt = cfg.kbt;
    let lags = linspace(0.0, 5.0 / cfg.cutoff, cfg.t_steps + 1);
    let target = |t: f64| cfg.mass * cfg.gamma * cfg.cutoff * (-cfg.cutoff * t.abs()).exp();
    let pairs: Vec<(f64, f64)> = lags.iter().map(|&t| (t, 0.0)).collect();
    let means = mc_noise_mean(&spec, &lags, cfg.n_samples, cfg.seed).map_err(compute)?;
    let corr = mc_noise_correlation(&spec, &pairs, cfg.n_samples, cfg.seed).map_err(compute)?;

    let mut series = TimeSeries::new(lags.clone()).map_err(compute)?;
    let bath_ff: Vec<f64> = lags.iter().map(|&t| kbt * spec.correlation(t)).collect();
    let target_ff: Vec<f64> = lags.iter().map(|&t| kbt * target(t)).collect();
    for (name, values) in [
        ("mc_F_mean", means.iter().map(|e| e.mean).collect()),
        ("mc_F_se", means.iter().map(|e| e.stderr).collect()),
        ("mc_FF_mean", corr.iter().map(|e| e.estimate.mean).collect()),
        ("mc_FF_se", corr.iter().map(|e| e.estimate.stderr).collect()),
        ("bath_FF", bath_ff.clone()),
        ("target_FF", target_ff.clone()),
    ] {
        series.push(name, values).map_err(compute)?;
    }
    let series = series.with_index_name("lag").map_err(compute)?;

    let c0 = spec.correlation(0.0);
    let scale = (kbt * c0).sqrt();
    let noise_mean = Check::pointwise(
        "noise_mean",
        "thermal mean of the noise force vanishes",
        format!("max({} SE, {}% of sqrt(kBT C(0)))", tol::SE_MULTIPLIER, tol::NOISE_MOMENTS * 100.0),
        means.iter().map(|e| (e.mean, (tol::SE_MULTIPLIER * e.stderr).max(tol::NOISE_MOMENTS * scale))),
    );
    let ff_bath = mc_check(
        "noise_correlation_bath",
        "thermal noise correlation equals kBT times the discrete bath kernel",
        tol::NOISE_MOMENTS,
        corr.iter().zip(&bath_ff).map(|(e, &x)| (e.estimate.mean, e.estimate.stderr, x)),
    );
    let ff_target = mc_check(
        "noise_correlation_target",
        "thermal noise correlation equals kBT m gamma Gamma exp(-Gamma |t - t'|)",
        tol::NOISE_MOMENTS,
        corr.iter().zip(&target_ff).map(|(e, &x)| (e.estimate.mean, e.estimate.stderr, x)),
    );

    let fine = linspace(0.0, 5.0 / cfg.gamma, 5001);
    let fid = fine.iter().map(|&t| (spec.correlation(t) - target(t)).abs()).fold(0.0, f64::max);
    let c_target0 = target(0.0);
    let fidelity = Check::new(
        "bath_fidelity",
        "discrete bath kernel reproduces m gamma Gamma exp(-Gamma t) on [0, 5/gamma]",
        format!("{}% of C(0)", tol::BATH_FIDELITY * 100.0),
        fid,
        fid / (tol::BATH_FIDELITY * c_target0),
    );
    let friction = spec.correlation_integral(5.0 / cfg.gamma) / cfg.mass;
    let friction_check = Check::new(
        "friction_integral",
        "integral of the discrete kernel over [0, 5/gamma] divided by m equals gamma",
        format!("{}% of gamma", tol::FRICTION_INTEGRAL * 100.0),
        (friction - cfg.gamma).abs(),
        (friction - cfg.gamma).abs() / (tol::FRICTION_INTEGRAL * cfg.gamma),
    );
    let checks = vec![noise_mean, ff_bath, ff_target, fidelity, friction_check, k_action_check(&spec, cfg.t_max, cfg.seed)];
    Ok(outcome(series, checks))
}

/// `K(t)F(t') = −C(t − t')` at random time pairs in `[−t_max, t_max]`.
pub(super) fn k_action_check(spec: &ReservoirSpec, t_max: f64, seed: u64) -> Check {
    let mut rng = sample_stream(seed, u64::MAX);
    let c0 = spec.correlation(0.0);
    let mut dev = 0.0f64;
    for _ in 0..tol::K_ACTION_PAIRS {
        let t = rng.random_range(-t_max..=t_max);
        let tp = rng.random_range(-t_max..=t_max);
        let got = spec.k_action(t, &spec.noise_force_form(tp));
        let want = Complex64::new(-spec.correlation(t - tp), 0.0);
        dev = dev.max((got - want).norm() / c0);
    }
    Check::new(
        "k_action",
        "the dissipation operator applied to the noise force gives minus the kernel",
        format!("{:e} relative to C(0)", tol::K_ACTION),
        dev,
        dev / tol::K_ACTION,
    )
}

pub(super) fn fdt_drift(cfg: &RunConfig) -> Result<Outcome, RunError> {
    if cfg.force == 0.0 {
        return Err(RunError::Config(super::ConfigError::Invalid {
            key: "F0".into(),
            reason: "must be nonzero for fdt_drift".into(),
        }));
    }
    let spec = bath(cfg)?;
    let p = params(cfg);
    let ts = grid(cfg);
    let z0 = PhasePoint::origin();
    let oracle = Oracle::new(spec, p).map_err(compute)?;
    let q2 = Poly::real_monomial(2, 0, 1.0);
    let mc = mc_symbol_averages(
        &oracle,
        &[("q", &Poly::q()), ("q2", &q2), ("p", &Poly::p())],
        z0,
        &ts,
        cfg.n_samples,
        cfg.seed,
    )
    .map_err(compute)?;
    let q_mean = col(&mc, "q_mean");
    let var_q: Vec<f64> = col(&mc, "q2_mean").iter().zip(q_mean).map(|(m2, m)| m2 - m * m).collect();
    let free = SystemParams { force: 0.0, ..p };
    let mut series = TimeSeries::new(ts.clone()).map_err(compute)?;
    for (name, values) in [
        ("mc_q_mean", q_mean.to_vec()),
        ("mc_q_se", col(&mc, "q_se").to_vec()),
        ("mc_var_q", var_q.clone()),
        ("mc_p_mean", col(&mc, "p_mean").to_vec()),
        ("mc_p_se", col(&mc, "p_se").to_vec()),
        ("closed_q", ts.iter().map(|&t| drift_correction(t, &p).0).collect()),
        ("closed_p", ts.iter().map(|&t| drift_correction(t, &p).1).collect()),
        ("closed_var_q", ts.iter().map(|&t| symbol_q2(t, z0, &free)).collect()),
    ] {
        series.push(name, values).map_err(compute)?;
    }

    let last = ts.len() - 1;
    let velocity = col(&mc, "p_mean")[last] / p.mass;
    let v_target = p.force * p.mobility();
    let drift = Check::new(
        "drift_velocity",
        "long-time mean velocity under a constant force equals F0/(m gamma)",
        format!("{}% of F0/(m gamma)", tol::DRIFT_VELOCITY * 100.0),
        (velocity - v_target).abs(),
        (velocity - v_target).abs() / (tol::DRIFT_VELOCITY * v_target.abs()),
    );
    let (lo, hi) = (3.0 / cfg.gamma, cfg.t_max);
    let d_fit = 0.5 * fitted_slope(&ts, &var_q, lo, hi);
    let mu_fit = fitted_slope(&ts, q_mean, lo, hi) / p.force;
    let ratio = d_fit / (mu_fit * p.kbt());
    let einstein = Check::new(
        "einstein_relation",
        "fitted diffusion constant over fitted mobility times kBT equals 1",
        format!("{}% of 1", tol::EINSTEIN_RATIO * 100.0),
        (ratio - 1.0).abs(),
        (ratio - 1.0).abs() / tol::EINSTEIN_RATIO,
    );
    let flags = vec![
        ("fitted_D".to_owned(), format!("{d_fit:e}")),
        ("fitted_mobility".to_owned(), format!("{mu_fit:e}")),
    ];
    Ok(Outcome { series, checks: vec![drift, einstein], flags })
}

pub(super) fn nonmarkovian(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let kernel = ExpKernel::new(cfg.gamma, cfg.cutoff, cfg.mass).map_err(compute)?;
    let p = params(cfg);
    let coarse = grid(cfg);
    let per = ((cfg.t_max / cfg.t_steps as f64) / kernel.max_step()).ceil() as usize;
    let fine = linspace(0.0, cfg.t_max, cfg.t_steps * per + 1);

    let (s1, s2) = kernel_poles(&kernel);
    let slow_tol = tol::SLOW_POLE_FACTOR * cfg.gamma * cfg.gamma / cfg.cutoff;
    let slow = Check::new(
        "slow_pole",
        "slow pole approaches -gamma with error of order gamma^2/Gamma",
        format!("{} gamma^2/Gamma = {slow_tol:e}", tol::SLOW_POLE_FACTOR),
        (s1 + cfg.gamma).norm(),
        (s1 + cfg.gamma).norm() / slow_tol,
    );
    let fast = Check::new(
        "fast_pole",
        "fast pole approaches -Gamma with error of order gamma",
        format!("{} gamma", tol::SLOW_POLE_FACTOR),
        (s2 + cfg.cutoff).norm(),
        (s2 + cfg.cutoff).norm() / (tol::SLOW_POLE_FACTOR * cfg.gamma),
    );
    let sym0 = symbol_p_nonmarkov(0.0, &kernel);
    let init_dev = sym0.symbol.poly.max_abs_diff(&Poly::p());
    let initial = Check::new(
        "initial_condition",
        "short-time corrected momentum symbol equals p at t = 0",
        "exact",
        init_dev,
        if init_dev == 0.0 { 0.0 } else { f64::INFINITY },
    );

    let (lo, hi) = (5.0 / cfg.cutoff, 5.0 / cfg.gamma);
    let markov_tol = tol::MARKOV_LIMIT_FACTOR * cfg.gamma / cfg.cutoff;
    let mut markov_dev = 0.0f64;
    let mut ode_score = 0.0f64;
    let mut ode_dev = 0.0f64;
    let mut markov_column = Vec::new();
    let mut memory_column = Vec::new();
    for &(b1, b2) in &[(1.0, 0.0), (0.0, 1.0)] {
        let sol = beta1_pole_solution(b1, b2, &kernel);
        let check_range = linspace(lo, hi, 4001);
        for &t in &check_range {
            markov_dev = markov_dev.max((sol.eval(t) - beta1_canonical(t, b1, b2, &p)).abs());
        }
        let ode = beta1_memory_ode(&fine, b1, b2, &kernel).map_err(compute)?;
        let exact: Vec<f64> = fine.iter().map(|&t| sol.eval(t)).collect();
        let peak = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (&v, &e) in col(&ode, "beta1").iter().zip(&exact) {
            let d = (v - e).abs();
            ode_dev = ode_dev.max(d);
            ode_score = ode_score.max(d / (tol::MEMORY_ODE * peak));
        }
        if b1 == 1.0 {
            markov_column = coarse.iter().map(|&t| beta1_canonical(t, b1, b2, &p)).collect();
            memory_column = (0..coarse.len()).map(|i| col(&ode, "beta1")[i * per]).collect();
        }
    }
    let markov = Check::new(
        "markov_limit",
        "memory and Markov beta1 agree within 5 gamma/Gamma for 5/Gamma <= t <= 5/gamma",
        format!("{} gamma/Gamma = {markov_tol:e}", tol::MARKOV_LIMIT_FACTOR),
        markov_dev,
        markov_dev / markov_tol,
    );
    let ode = Check::new(
        "memory_ode",
        "auxiliary-variable ODE reproduces the pole expansion of beta1",
        format!("{:e} relative to max |beta1|", tol::MEMORY_ODE),
        ode_dev,
        ode_score,
    );

    let diff: Vec<f64> = markov_column.iter().zip(&memory_column).map(|(a, b)| (a - b).abs()).collect();
    let mut series = TimeSeries::new(coarse).map_err(compute)?;
    series.push("beta1_markov", markov_column).map_err(compute)?;
    series.push("beta1_nonmarkov", memory_column).map_err(compute)?;
    series.push("abs_diff", diff).map_err(compute)?;
    let flags = vec![
        ("degraded".to_owned(), sym0.degraded.to_string()),
        ("slow_pole".to_owned(), format!("{}{:+}i", s1.re, s1.im)),
        ("fast_pole".to_owned(), format!("{}{:+}i", s2.re, s2.im)),
    ];
    Ok(Outcome { series, checks: vec![slow, fast, initial, markov, ode], flags })
}

fn random_poly<R: Rng>(rng: &mut R, max_deg: u32, real: bool) -> Poly<f64> {
    let n_terms = rng.random_range(1..=6);
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let a = rng.random_range(0..=max_deg);
        let b = rng.random_range(0..=max_deg);
        let re = rng.random_range(-1.0..1.0);
        let im = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
        terms.push(((a, b), Complex64::new(re, im)));
    }
    Poly::from_terms(terms)
}

fn random_quadratic<R: Rng>(rng: &mut R) -> Poly<f64> {
    let mut terms = Vec::new();
    for a in 0..=2u32 {
        for b in 0..=(2 - a) {
            terms.push(((a, b), Complex64::new(rng.random_range(-1.0..1.0), 0.0)));
        }
    }
    Poly::from_terms(terms)
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

/// Star-product identities over random polynomials; the returned table has one row per trial.
pub(super) fn star_identities(hbar: f64, seed: u64, trials: usize) -> (TimeSeries, Vec<Check>) {
    let alg = StarAlgebra::new(hbar);
    let mut assoc = Vec::with_capacity(trials);
    let mut quad = Vec::with_capacity(trials);
    let mut reality = Vec::with_capacity(trials);
    let mut routes = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut rng = sample_stream(seed, i as u64);
        let (a, b, c) = (random_poly(&mut rng, 3, false), random_poly(&mut rng, 3, false), random_poly(&mut rng, 3, false));
        let left = alg.star_product(&alg.star_product(&a, &b), &c);
        let right = alg.star_product(&a, &alg.star_product(&b, &c));
        assoc.push(rel(left.max_abs_diff(&right), left.max_abs_coeff()));

        let qd = random_quadratic(&mut rng);
        let ar = random_poly(&mut rng, 4, true);
        let moyal = alg.moyal_bracket(&qd, &ar);
        quad.push(rel(moyal.max_abs_diff(&alg.poisson_bracket(&qd, &ar)), moyal.max_abs_coeff()));

        let br = random_poly(&mut rng, 3, true);
        let ab = alg.star_product(&ar, &br);
        let ba = alg.star_product(&br, &ar);
        let conj = Poly::from_terms(ab.terms().map(|(e, c)| (e, c.conj())));
        reality.push(rel(conj.max_abs_diff(&ba), ab.max_abs_coeff()));

        let direct = alg.moyal_bracket(&ar, &br);
        routes.push(rel(direct.max_abs_diff(&alg.moyal_bracket_by_commutator(&ar, &br)), direct.max_abs_coeff()));
    }
    let comm = &alg.star_product(&Poly::q(), &Poly::p()) - &alg.star_product(&Poly::p(), &Poly::q());
    let comm_dev = comm.max_abs_diff(&Poly::constant(Complex64::new(0.0, hbar)));

    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let t = tol::STAR_IDENTITY;
    let rel_tol = format!("{t:e} relative to the largest coefficient");
    let checks = vec![
        Check::new("commutator", "q*p - p*q equals i hbar", "exact", comm_dev, if comm_dev == 0.0 { 0.0 } else { f64::INFINITY }),
        Check::new("associativity", "(A*B)*C equals A*(B*C)", rel_tol.clone(), max(&assoc), max(&assoc) / t),
        Check::new("quadratic_exactness", "Moyal and Poisson brackets coincide when one argument is at most quadratic", rel_tol.clone(), max(&quad), max(&quad) / t),
        Check::new("reality", "complex conjugate of A*B equals B*A for real symbols", rel_tol.clone(), max(&reality), max(&reality) / t),
        Check::new("bracket_routes", "odd-order Moyal sum equals the star commutator over i hbar", rel_tol, max(&routes), max(&routes) / t),
    ];
    let index: Vec<f64> = (0..trials).map(|i| i as f64).collect();
    let mut series = TimeSeries::new(index).expect("increasing trial index");
    series.push("assoc_err", assoc).expect("fresh column");
    series.push("quad_exact_err", quad).expect("fresh column");
    series.push("reality_err", reality).expect("fresh column");
    series.push("bracket_route_err", routes).expect("fresh column");
    let series = series.with_index_name("trial").expect("valid name");
    (series, checks)
}

pub(super) fn star_algebra(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let hbar = match cfg.hbar {
        super::Hbar::Fixed(h) => h,
        super::Hbar::Auto => 1.0,
    };
    let (series, checks) = star_identities(hbar, cfg.seed, tol::STAR_TRIALS);
    Ok(outcome(series, checks))
}
