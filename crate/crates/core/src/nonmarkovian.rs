//! Exact dynamics for a finite-memory reservoir.
//!
//! `m β̇₁(t) = β₂(0) − ∫_0^t β₁(t') C(t − t') dt'` is solved three ways:
//! by partial fractions of its Laplace transform (exponential kernel only),
//! by an auxiliary-variable ODE embedding (exponential kernel only) and by
//! product-integrated history convolution for any kernel with known
//! antiderivatives.

use num_complex::Complex;
use thiserror::Error;

use crate::closed_forms::{NoiseKernel, NoiseShift, StochasticSymbol};
use crate::reservoir::ReservoirSpec;
use crate::scalar::Real;
use crate::series::TimeSeries;
use crate::symbol_algebra::{PhasePoint, Poly};

/// Below this ratio `Γ/γ` the leading-order short-time symbol is flagged as degraded.
pub const LEADING_ORDER_MIN_RATIO: f64 = 20.0;

/// Smallest `|s + C̃(s)/m|` accepted by [`laplace_beta1`].
pub const POLE_PROXIMITY: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NonMarkovError {
    #[error("invalid kernel: {0}")]
    InvalidKernel(&'static str),
    #[error("s = {re}{im:+}i lies within {tol:e} of a pole")]
    PoleProximity { re: f64, im: f64, tol: f64 },
    #[error("time grid must be uniform, start at 0 and have at least two points")]
    BadGrid,
    #[error("step {step:e} exceeds the stability limit {limit:e}")]
    StepTooLarge { step: f64, limit: f64 },
}

/// Memory function with closed-form first and second antiderivatives
/// (`C₁' = C`, `C₂' = C₁`, both zero at `t = 0`).
pub trait MemoryKernel<T> {
    fn value(&self, t: T) -> T;
    fn first_integral(&self, t: T) -> T;
    fn second_integral(&self, t: T) -> T;
}

/// `C(t) = mγΓ e^{-Γt}`, total weight `mγ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpKernel<T> {
    gamma: T,
    cutoff: T,
    mass: T,
}

impl<T: Real> ExpKernel<T> {
    pub fn new(gamma: T, cutoff: T, mass: T) -> Result<Self, NonMarkovError> {
        if !(gamma > T::zero() && gamma.is_finite()) {
            return Err(NonMarkovError::InvalidKernel("gamma must be positive"));
        }
        if !(cutoff > gamma && cutoff.is_finite()) {
            return Err(NonMarkovError::InvalidKernel("cutoff must exceed gamma"));
        }
        if !(mass > T::zero() && mass.is_finite()) {
            return Err(NonMarkovError::InvalidKernel("mass must be positive"));
        }
        Ok(Self { gamma, cutoff, mass })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn cutoff(&self) -> T {
        self.cutoff
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    /// `C̃(s) = mγΓ / (s + Γ)`.
    pub fn laplace(&self, s: Complex<T>) -> Complex<T> {
        Complex::from(self.mass * self.gamma * self.cutoff) / (s + self.cutoff)
    }

    pub fn is_leading_order(&self) -> bool {
        self.cutoff >= T::lit(LEADING_ORDER_MIN_RATIO) * self.gamma
    }

    /// Largest step [`beta1_memory_ode`] accepts.
    pub fn max_step(&self) -> T {
        T::lit(0.01) / self.cutoff
    }
}

impl<T: Real> MemoryKernel<T> for ExpKernel<T> {
    fn value(&self, t: T) -> T {
        self.mass * self.gamma * self.cutoff * (-self.cutoff * t).exp()
    }

    fn first_integral(&self, t: T) -> T {
        -self.mass * self.gamma * (-self.cutoff * t).exp_m1()
    }

    fn second_integral(&self, t: T) -> T {
        let x = self.cutoff * t;
        // t − (1 − e^{-Γt})/Γ, kept accurate for small Γt
        let tail = if x < T::lit(1e-3) {
            t * x * (T::lit(0.5) - x / T::lit(6.0) + x * x / T::lit(24.0))
        } else {
            t + (-x).exp_m1() / self.cutoff
        };
        self.mass * self.gamma * tail
    }
}

impl MemoryKernel<f64> for ReservoirSpec {
    fn value(&self, t: f64) -> f64 {
        self.correlation(t)
    }

    fn first_integral(&self, t: f64) -> f64 {
        self.correlation_integral(t)
    }

    fn second_integral(&self, t: f64) -> f64 {
        self.modes()
            .iter()
            .map(|m| {
                let s = (0.5 * m.omega * t).sin();
                2.0 * m.k * s * s / (m.omega * m.omega)
            })
            .sum()
    }
}

/// `β̃₁(s) = (β₁(0) + β₂(0)/(ms)) / (s + C̃(s)/m)`.
pub fn laplace_beta1<T: Real>(
    s: Complex<T>,
    beta1_0: T,
    beta2_0: T,
    kernel: &ExpKernel<T>,
) -> Result<Complex<T>, NonMarkovError> {
    let den = s + kernel.laplace(s) / kernel.mass;
    let tol = T::lit(POLE_PROXIMITY);
    let near_zero = s.norm() < tol && beta2_0 != T::zero();
    if !(den.re.is_finite() && den.im.is_finite()) || den.norm() < tol || near_zero {
        let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
        return Err(NonMarkovError::PoleProximity { re: f(s.re), im: f(s.im), tol: POLE_PROXIMITY });
    }
    Ok((Complex::from(beta1_0) + Complex::from(beta2_0 / kernel.mass) / s) / den)
}

/// Exact roots of `s² + Γs + γΓ`, ordered by magnitude (slow pole first).
pub fn kernel_poles<T: Real>(kernel: &ExpKernel<T>) -> (Complex<T>, Complex<T>) {
    let (g, c) = (kernel.gamma, kernel.cutoff);
    let half = T::lit(0.5);
    let disc = c * c - T::lit(4.0) * g * c;
    if disc >= T::zero() {
        // fast root first, then Vieta for the slow root to avoid cancellation
        let fast = -half * (c + disc.sqrt());
        (Complex::from(g * c / fast), Complex::from(fast))
    } else {
        let im = half * (-disc).sqrt();
        (Complex::new(-half * c, im), Complex::new(-half * c, -im))
    }
}

/// Large-`Γ` expansion `s₁ ≈ −γ − γ²/Γ − 2γ³/Γ²`, `s₂ ≈ −Γ + γ + γ²/Γ`.
pub fn kernel_poles_expansion<T: Real>(kernel: &ExpKernel<T>) -> (T, T) {
    let (g, c) = (kernel.gamma, kernel.cutoff);
    let r = g / c;
    (-g * (T::one() + r + T::lit(2.0) * r * r), -c + g + g * r)
}

/// `(a + b t) e^{s t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleTerm<T> {
    pub pole: Complex<T>,
    pub coeff: Complex<T>,
    pub linear: Complex<T>,
}

/// Inverse Laplace transform of [`laplace_beta1`] as a finite sum of pole terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Beta1Solution<T> {
    pub terms: Vec<PoleTerm<T>>,
}

impl<T: Real> Beta1Solution<T> {
    pub fn eval(&self, t: T) -> T {
        let tc = Complex::from(t);
        self.terms
            .iter()
            .map(|term| (term.coeff + term.linear * tc) * (term.pole * tc).exp())
            .fold(Complex::from(T::zero()), |a, b| a + b)
            .re
    }

    /// Coefficient of the simple pole closest to `s`.
    pub fn residue_near(&self, s: Complex<T>) -> Option<Complex<T>> {
        self.terms
            .iter()
            .min_by(|a, b| (a.pole - s).norm().partial_cmp(&(b.pole - s).norm()).unwrap())
            .map(|t| t.coeff)
    }
}

/// Relative discriminant below which the two nonzero poles are merged.
const DOUBLE_ROOT_TOL: f64 = 1e-10;

/// Partial fractions of `P(s)/Q(s)` with `P = (β₁(0)s + β₂(0)/m)(s + Γ)` and
/// `Q = s(s² + Γs + γΓ)`.
pub fn beta1_pole_solution<T: Real>(beta1_0: T, beta2_0: T, kernel: &ExpKernel<T>) -> Beta1Solution<T> {
    let (g, c, m) = (kernel.gamma, kernel.cutoff, kernel.mass);
    let b2m = beta2_0 / m;
    let p = |s: Complex<T>| (s * beta1_0 + b2m) * (s + c);
    let dp = |s: Complex<T>| s * (T::lit(2.0) * beta1_0) + beta1_0 * c + b2m;
    let dq = |s: Complex<T>| s * s * T::lit(3.0) + s * (T::lit(2.0) * c) + g * c;
    let zero = Complex::from(T::zero());
    let disc = c * c - T::lit(4.0) * g * c;

    if disc.abs() <= T::lit(DOUBLE_ROOT_TOL) * c * c {
        let r = Complex::from(-c / T::lit(2.0));
        let at_zero = p(zero) / (r * r);
        let a = dp(r) / r - p(r) / (r * r);
        let b = p(r) / r;
        return Beta1Solution {
            terms: vec![
                PoleTerm { pole: zero, coeff: at_zero, linear: zero },
                PoleTerm { pole: r, coeff: a, linear: b },
            ],
        };
    }
    let (s1, s2) = kernel_poles(kernel);
    let terms = [zero, s1, s2]
        .into_iter()
        .map(|s| PoleTerm { pole: s, coeff: p(s) / dq(s), linear: zero })
        .collect();
    Beta1Solution { terms }
}

/// Exact reservoir-averaged momentum symbol for the exponential kernel:
/// `β₁(t) p − mγΓ q (e^{s₁t} − e^{s₂t}) / (s₁ − s₂)`, with `β₁` from `(1, 0)`.
pub fn averaged_p_exact<T: Real>(t: T, z: PhasePoint<T>, kernel: &ExpKernel<T>) -> T {
    let beta1 = beta1_pole_solution(T::one(), T::zero(), kernel).eval(t);
    let (s1, s2) = kernel_poles(kernel);
    let tc = Complex::from(t);
    let drag = if (s1 - s2).norm() <= T::lit(DOUBLE_ROOT_TOL).sqrt() * kernel.cutoff {
        tc * (s1 * tc).exp()
    } else {
        ((s1 * tc).exp() - (s2 * tc).exp()) / (s1 - s2)
    };
    beta1 * z.p - kernel.mass * kernel.gamma * kernel.cutoff * drag.re * z.q
}

/// Leading-order short-time momentum symbol plus its validity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct NonMarkovSymbol<T> {
    pub symbol: StochasticSymbol<T>,
    /// Set when `Γ < 20γ`, where the leading order in `γ/Γ` is unreliable.
    pub degraded: bool,
}

impl<T: Real> NonMarkovSymbol<T> {
    pub fn averaged(&self, z: PhasePoint<T>) -> T {
        self.symbol.averaged().evaluate_real(z)
    }
}

/// `e^{-γt} p − mγ q (e^{-γt} − e^{-Γt})` with noise weight `e^{-γt'}`.
pub fn symbol_p_nonmarkov<T: Real>(t: T, kernel: &ExpKernel<T>) -> NonMarkovSymbol<T> {
    let slow = (-kernel.gamma * t).exp();
    let fast = (-kernel.cutoff * t).exp();
    let mg = kernel.mass * kernel.gamma;
    let poly = Poly::from_real_terms([((0, 1), slow), ((1, 0), -mg * (slow - fast))]);
    let noise = if t > T::zero() {
        NoiseKernel::Exponential { amplitude: T::one(), rate: kernel.gamma }
    } else {
        NoiseKernel::Zero
    };
    NonMarkovSymbol {
        symbol: StochasticSymbol { poly, kernel: noise, pair: None, shift: NoiseShift::Backward, time: t },
        degraded: !kernel.is_leading_order(),
    }
}

fn uniform_step<T: Real>(t_grid: &[T]) -> Result<T, NonMarkovError> {
    if t_grid.len() < 2 || t_grid[0] != T::zero() {
        return Err(NonMarkovError::BadGrid);
    }
    let h = t_grid[1] - t_grid[0];
    let tol = T::lit(1e-9) * h * T::from_count(t_grid.len());
    let uniform = t_grid
        .iter()
        .enumerate()
        .all(|(i, &t)| (t - h * T::from_count(i)).abs() <= tol);
    if !(h > T::zero()) || !uniform {
        return Err(NonMarkovError::BadGrid);
    }
    Ok(h)
}

fn grid_to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Fixed-step RK4 on the embedding `β̇₁ = β₂(0)/m − γy`, `ẏ = Γ(β₁ − y)`,
/// where `y(t) = ∫_0^t β₁(t') Γe^{-Γ(t-t')} dt'`. Returns column `beta1`.
pub fn beta1_memory_ode<T: Real>(
    t_grid: &[T],
    beta1_0: T,
    beta2_0: T,
    kernel: &ExpKernel<T>,
) -> Result<TimeSeries<T>, NonMarkovError> {
    let h = uniform_step(t_grid)?;
    if h > kernel.max_step() * (T::one() + T::lit(1e-9)) {
        return Err(NonMarkovError::StepTooLarge { step: grid_to_f64(h), limit: grid_to_f64(kernel.max_step()) });
    }
    let (g, c) = (kernel.gamma, kernel.cutoff);
    let drive = beta2_0 / kernel.mass;
    let rhs = |b: T, y: T| (drive - g * y, c * (b - y));
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let two = T::lit(2.0);

    let mut out = Vec::with_capacity(t_grid.len());
    let (mut b, mut y) = (beta1_0, T::zero());
    out.push(b);
    for _ in 1..t_grid.len() {
        let k1 = rhs(b, y);
        let k2 = rhs(b + half * h * k1.0, y + half * h * k1.1);
        let k3 = rhs(b + half * h * k2.0, y + half * h * k2.1);
        let k4 = rhs(b + h * k3.0, y + h * k3.1);
        b = b + h * sixth * (k1.0 + two * k2.0 + two * k3.0 + k4.0);
        y = y + h * sixth * (k1.1 + two * k2.1 + two * k3.1 + k4.1);
        out.push(b);
    }
    let mut series = TimeSeries::new(t_grid.to_vec()).map_err(|_| NonMarkovError::BadGrid)?;
    series.push("beta1", out).expect("fresh series");
    Ok(series)
}

/// Trapezoidal time stepping with the memory integral evaluated exactly for
/// piecewise-linear `β₁`; works for any [`MemoryKernel`] and costs `O(n²)`.
/// Returns column `beta1`.
pub fn beta1_history_convolution<T: Real, K: MemoryKernel<T> + ?Sized>(
    t_grid: &[T],
    beta1_0: T,
    beta2_0: T,
    mass: T,
    kernel: &K,
) -> Result<TimeSeries<T>, NonMarkovError> {
    let h = uniform_step(t_grid)?;
    if !(mass > T::zero()) {
        return Err(NonMarkovError::InvalidKernel("mass must be positive"));
    }
    let n = t_grid.len();
    let lag = |k: usize| h * T::from_count(k);
    let c1: Vec<T> = (0..n).map(|k| kernel.first_integral(lag(k))).collect();
    let c2: Vec<T> = (0..n).map(|k| kernel.second_integral(lag(k))).collect();
    // segment [t_{j-k}, t_{j-k+1}] contributes a[k] β_{j-k} + b[k] β_{j-k+1}
    let mut a = vec![T::zero(); n];
    let mut b = vec![T::zero(); n];
    for k in 1..n {
        let dc2 = (c2[k] - c2[k - 1]) / h;
        a[k] = c1[k] - dc2;
        b[k] = dc2 - c1[k - 1];
    }
    let half = T::lit(0.5);
    let mut beta = Vec::with_capacity(n);
    beta.push(beta1_0);
    let mut rate = beta2_0 / mass;
    let implicit = T::one() + half * h * b[1] / mass;
    for j in 1..n {
        // memory integral at t_j without the unknown β_j term
        let mut known = a[j] * beta[0];
        for k in 1..j {
            known = known + (a[k] + b[k + 1]) * beta[j - k];
        }
        let next = (beta[j - 1] + half * h * rate + half * h * (beta2_0 - known) / mass) / implicit;
        rate = (beta2_0 - known - b[1] * next) / mass;
        beta.push(next);
    }
    let mut series = TimeSeries::new(t_grid.to_vec()).map_err(|_| NonMarkovError::BadGrid)?;
    series.push("beta1", beta).expect("fresh series");
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{beta1_canonical, SystemParams};
    use crate::reservoir::LorentzianBath;
    use crate::series::linspace;
    use std::f64::consts::PI;

    fn kernel(g: f64, c: f64) -> ExpKernel<f64> {
        ExpKernel::new(g, c, 1.0).unwrap()
    }

    fn grid(t_max: f64, h: f64) -> Vec<f64> {
        let n = (t_max / h).round() as usize;
        linspace(0.0, t_max, n + 1)
    }

    /// `(1/2πi)∮ f(s) ds` on a circle, trapezoid rule in the angle.
    fn contour_residue(f: impl Fn(Complex<f64>) -> Complex<f64>, center: Complex<f64>, radius: f64) -> Complex<f64> {
        let m = 512;
        let mut acc = Complex::new(0.0, 0.0);
        for j in 0..m {
            let e = Complex::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            acc += f(center + e * radius) * e * radius;
        }
        acc / m as f64
    }

    #[test]
    fn kernel_validation_and_weight() {
        assert!(ExpKernel::new(1.0, 0.5, 1.0).is_err());
        assert!(ExpKernel::new(0.0, 5.0, 1.0).is_err());
        assert!(ExpKernel::new(1.0, 5.0, -1.0).is_err());
        let k = ExpKernel::new(0.7f64, 30.0, 2.0).unwrap();
        assert!((k.first_integral(50.0) - 2.0 * 0.7).abs() < 1e-14);
        for t in [1e-6, 1e-3, 0.01, 0.2] {
            let fd1 = (k.first_integral(t + 1e-7) - k.first_integral(t - 1e-7)) / 2e-7;
            assert!((fd1 / k.value(t) - 1.0).abs() < 1e-6);
            let fd2 = (k.second_integral(t + 1e-7) - k.second_integral(t - 1e-7)) / 2e-7;
            assert!((fd2 - k.first_integral(t)).abs() < 1e-6 * k.first_integral(t).max(1e-3));
        }
    }

    #[test]
    fn laplace_examples() {
        let k = kernel(1.0, 100.0);
        let v = laplace_beta1(Complex::new(1.0, 0.0), 1.0, 0.0, &k).unwrap();
        assert!((v.re - 1.0 / (1.0 + 100.0 / 101.0)).abs() < 1e-12 && v.im == 0.0);
        assert!((v.re - 0.502488).abs() < 1e-6);
        let big = Complex::new(1e9, 0.0);
        let iv = big * laplace_beta1(big, 0.37, 0.0, &k).unwrap();
        assert!((iv.re - 0.37).abs() < 1e-6);
        for y in [0.1, 1.0, 40.0] {
            let w = laplace_beta1(Complex::new(0.0, y), 0.0, 1.0, &k).unwrap();
            assert!(w.is_finite());
        }
        let (s1, _) = kernel_poles(&k);
        assert!(matches!(laplace_beta1(s1, 1.0, 0.0, &k), Err(NonMarkovError::PoleProximity { .. })));
        assert!(laplace_beta1(Complex::new(0.0, 0.0), 1.0, 1.0, &k).is_err());
    }

    #[test]
    fn poles_examples() {
        let (s1, s2) = kernel_poles(&kernel(1.0, 100.0));
        assert!((s1.re + 1.01020514).abs() < 1e-8 && s1.im == 0.0);
        assert!((s2.re + 98.98979486).abs() < 1e-8);
        assert!((s1.re + 1.0).abs() <= 0.02);
        for s in [s1, s2] {
            assert!((s * s + s * 100.0 + 100.0).norm() < 1e-10);
        }
        let (d1, d2) = kernel_poles(&kernel(2.5, 10.0));
        assert_eq!(d1, d2);
        assert_eq!(d1.re, -5.0);
        let (c1, c2) = kernel_poles(&kernel(3.0, 5.0));
        assert!(c1.im > 0.0 && c2 == c1.conj());
        assert!((c1 * c1 + c1 * 5.0 + 15.0).norm() < 1e-12);
    }

    #[test]
    fn expansion_tracks_exact_poles() {
        for ratio in [20.0, 100.0, 1e4] {
            let k = kernel(1.0, ratio);
            let (s1, s2) = kernel_poles(&k);
            let (e1, e2) = kernel_poles_expansion(&k);
            assert!((s1.re - e1).abs() < 6.0 / ratio.powi(3));
            assert!((s2.re - e2).abs() < 3.0 / ratio.powi(2));
            assert!((s1.re + 1.0).abs() < 2.0 / ratio);
            assert!((s2.re + ratio).abs() < 2.0);
        }
    }

    #[test]
    fn residues_match_contour_integrals() {
        for &(g, c) in &[(1.0, 100.0), (1.0, 20.0), (2.0, 5.0)] {
            let k = kernel(g, c);
            for &(b1, b2) in &[(1.0, 0.0), (0.0, 1.0), (0.3, -0.8)] {
                let sol = beta1_pole_solution(b1, b2, &k);
                for term in &sol.terms {
                    let others = sol.terms.iter().filter(|o| o.pole != term.pole).map(|o| (o.pole - term.pole).norm());
                    let radius = 0.25 * others.fold(f64::INFINITY, f64::min);
                    let res = contour_residue(
                        |s| laplace_beta1(s, b1, b2, &k).unwrap(),
                        term.pole,
                        radius,
                    );
                    assert!((res - term.coeff).norm() < 1e-10, "g={g} c={c} pole={}", term.pole);
                }
            }
        }
    }

    #[test]
    fn pole_solution_initial_values() {
        for &(g, c) in &[(1.0, 100.0), (1.0, 4.0), (3.0, 5.0)] {
            let k = kernel(g, c);
            let sol = beta1_pole_solution(0.6, 1.3, &k);
            assert!((sol.eval(0.0) - 0.6).abs() < 1e-12);
            let d = (sol.eval(1e-6) - sol.eval(0.0)) / 1e-6;
            assert!((d - 1.3).abs() < 1e-3);
            assert!((sol.eval(400.0 / g) - 1.3 / g).abs() < 1e-9);
        }
    }

    #[test]
    fn double_root_is_continuous() {
        let exact = beta1_pole_solution(1.0, 0.5, &kernel(1.0, 4.0));
        let near = beta1_pole_solution(1.0, 0.5, &kernel(1.0, 4.0 + 1e-5));
        for t in [0.1, 0.5, 2.0] {
            assert!((exact.eval(t) - near.eval(t)).abs() < 1e-5);
        }
    }

    #[test]
    fn memory_ode_matches_pole_expansion() {
        let k = kernel(1.0, 100.0);
        let ts = grid(5.0, k.max_step());
        for &(b1, b2) in &[(1.0, 0.0), (0.0, 1.0)] {
            let ode = beta1_memory_ode(&ts, b1, b2, &k).unwrap();
            let sol = beta1_pole_solution(b1, b2, &k);
            assert_eq!(ode.column("beta1").unwrap()[0], b1);
            for (t, v) in ts.iter().zip(ode.column("beta1").unwrap()).skip(1) {
                let exact = sol.eval(*t);
                assert!((v - exact).abs() <= 1e-4 * exact.abs(), "t={t}");
            }
        }
    }

    #[test]
    fn memory_ode_step_rejection() {
        let k = kernel(1.0, 100.0);
        let coarse = grid(1.0, 2e-3);
        assert!(matches!(beta1_memory_ode(&coarse, 1.0, 0.0, &k), Err(NonMarkovError::StepTooLarge { .. })));
        assert_eq!(beta1_memory_ode(&[0.0, 1e-4, 3e-4], 1.0, 0.0, &k), Err(NonMarkovError::BadGrid));
    }

    #[test]
    fn memory_ode_limits() {
        let k = kernel(1.0, 10.0);
        let ts = grid(60.0, k.max_step());
        let long = beta1_memory_ode(&ts, 1.0, 0.0, &k).unwrap();
        assert!(long.column("beta1").unwrap().last().unwrap().abs() < 1e-20);

        let k = kernel(1.0, 1e4);
        let ts = grid(1.0, k.max_step());
        let v = *beta1_memory_ode(&ts, 1.0, 0.0, &k).unwrap().column("beta1").unwrap().last().unwrap();
        assert!((v / (-1.0f64).exp() - 1.0).abs() < 0.01);
    }

    #[test]
    fn markov_limit_bound() {
        for ratio in [20.0, 50.0, 100.0] {
            let k = kernel(1.0, ratio);
            let params = SystemParams::new(1.0, 1.0, 1.0).unwrap();
            for &(b1, b2) in &[(1.0, 0.0), (0.0, 1.0), (0.5, 0.5)] {
                let sol = beta1_pole_solution(b1, b2, &k);
                let sup = linspace(5.0 / ratio, 5.0, 2000)
                    .into_iter()
                    .map(|t| (sol.eval(t) - beta1_canonical(t, b1, b2, &params)).abs())
                    .fold(0.0, f64::max);
                assert!(sup <= 5.0 / ratio, "ratio={ratio} sup={sup}");
            }
        }
    }

    #[test]
    fn history_convolution_matches_exponential_embedding() {
        let k = kernel(1.0, 50.0);
        let ts = grid(5.0, 2e-3);
        let conv = beta1_history_convolution(&ts, 1.0, 0.5, 1.0, &k).unwrap();
        let sol = beta1_pole_solution(1.0, 0.5, &k);
        for (t, v) in ts.iter().zip(conv.column("beta1").unwrap()) {
            assert!((v - sol.eval(*t)).abs() < 1e-4, "t={t}");
        }
    }

    #[test]
    fn history_convolution_with_discrete_bath() {
        let bath = LorentzianBath {
            gamma: 1.0,
            cutoff: 50.0,
            mass: 1.0,
            n_modes: 4000,
            omega_max: 2000.0,
            temperature: 10.0,
            hbar: 1e-3,
            k_b: 1.0,
        };
        let spec = bath.build(5.0).unwrap();
        let k = kernel(1.0, 50.0);
        let ts = grid(5.0, 2e-3);
        for &(b1, b2) in &[(1.0, 0.0), (0.0, 1.0)] {
            let conv = beta1_history_convolution(&ts, b1, b2, 1.0, &spec).unwrap();
            let sol = beta1_pole_solution(b1, b2, &k);
            let scale = ts.iter().map(|&t| sol.eval(t).abs()).fold(0.0, f64::max);
            for (t, v) in ts.iter().zip(conv.column("beta1").unwrap()) {
                assert!((v - sol.eval(*t)).abs() <= 0.02 * scale, "t={t}");
            }
        }
    }

    #[test]
    fn short_time_symbol() {
        let k = kernel(1.0, 100.0);
        let z = PhasePoint::new(0.4, -1.3);
        let s0 = symbol_p_nonmarkov(0.0, &k);
        assert_eq!(s0.averaged(z), z.p);
        assert_eq!(s0.symbol.poly, Poly::p());
        assert!(!s0.degraded);
        let v = symbol_p_nonmarkov(0.02, &k).averaged(PhasePoint::new(1.0, 0.0));
        assert!((v + ((-0.02f64).exp() - (-2.0f64).exp())).abs() < 1e-15);
        assert!((v + 0.84486339).abs() < 1e-8);
        assert!(symbol_p_nonmarkov(0.1, &kernel(1.0, 5.0)).degraded);

        let params = SystemParams::new(1.0, 1.0, 1.0).unwrap();
        for t in [0.1, 0.5, 2.0] {
            let markov = crate::closed_forms::averaged_p(t, z, &params);
            let short = symbol_p_nonmarkov(t, &k).averaged(z);
            assert!((markov - short).abs() <= (-100.0 * t).exp() * 1.0 * z.q.abs() + 1e-15);
        }
    }

    #[test]
    fn exact_momentum_symbol() {
        let k = kernel(1.0, 100.0);
        let z = PhasePoint::new(0.7, 0.2);
        assert!((averaged_p_exact(0.0, z, &k) - z.p).abs() < 1e-14);
        for t in [0.005, 0.05, 1.0, 3.0] {
            let lead = symbol_p_nonmarkov(t, &k).averaged(z);
            let exact = averaged_p_exact(t, z, &k);
            assert!((lead - exact).abs() < 0.05, "t={t}");
        }
        // double root branch is continuous
        let a = averaged_p_exact(0.3, z, &kernel(1.0, 4.0));
        let b = averaged_p_exact(0.3, z, &kernel(1.0, 4.0 + 1e-6));
        assert!((a - b).abs() < 1e-5);
    }

    #[test]
    fn single_precision_poles() {
        let k = ExpKernel::new(1.0f32, 100.0, 1.0).unwrap();
        let (s1, _) = kernel_poles(&k);
        assert!((s1.re + 1.0102051).abs() < 1e-5);
        assert!((beta1_pole_solution(1.0f32, 0.0, &k).eval(0.0) - 1.0).abs() < 1e-5);
    }
}
