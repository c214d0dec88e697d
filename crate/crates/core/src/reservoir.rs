//! Finite harmonic reservoir: bath construction, thermal sampling, the noise
//! force `F(t)`, the correlation `C(t)` and the action of `K(t)` on noise
//! forms.
//!
//! Bath oscillators are described through the complex coordinates
//! `α_n = (q_n / l_n + i l_n p_n / ħ) / √2` with `l_n = √(ħ / (m_n ω_n))`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReservoirError {
    #[error("invalid reservoir parameter: {0}")]
    InvalidParameter(String),
    #[error("simulation horizon {horizon} exceeds the recurrence guard {limit} (= 0.5 * 2π/Δω)")]
    RecurrenceGuard { horizon: f64, limit: f64 },
}

/// One bath oscillator with `k = m ω²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMode {
    pub omega: f64,
    pub k: f64,
    pub mass: f64,
}

impl BathMode {
    pub fn new(omega: f64, k: f64) -> Self {
        Self { omega, k, mass: k / (omega * omega) }
    }

    /// Oscillator length `√(ħ / (m ω))`.
    pub fn length(&self, hbar: f64) -> f64 {
        (hbar / (self.mass * self.omega)).sqrt()
    }
}

/// Static description of the reservoir.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirSpec {
    modes: Vec<BathMode>,
    temperature: f64,
    hbar: f64,
    k_b: f64,
    /// Frequency spacing of a uniform grid; `None` for irregular baths.
    delta_omega: Option<f64>,
}

impl ReservoirSpec {
    pub fn new(modes: Vec<BathMode>, temperature: f64, hbar: f64, k_b: f64) -> Result<Self, ReservoirError> {
        if modes.is_empty() {
            return Err(invalid("reservoir needs at least one mode"));
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(invalid("temperature must be finite and non-negative"));
        }
        if !(hbar > 0.0 && k_b > 0.0 && hbar.is_finite() && k_b.is_finite()) {
            return Err(invalid("hbar and k_B must be finite and positive"));
        }
        for (i, m) in modes.iter().enumerate() {
            if !(m.omega > 0.0 && m.k > 0.0 && m.mass > 0.0) || !m.omega.is_finite() || !m.k.is_finite() {
                return Err(invalid(&format!("mode {i}: omega, k and mass must be positive")));
            }
            let rel = (m.k - m.mass * m.omega * m.omega).abs() / m.k;
            if rel > 1e-12 {
                return Err(invalid(&format!("mode {i}: k != m omega^2 (relative error {rel:e})")));
            }
            if i > 0 && modes[i - 1].omega >= m.omega {
                return Err(invalid("mode frequencies must be strictly increasing"));
            }
        }
        Ok(Self { modes, temperature, hbar, k_b, delta_omega: None })
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn k_b(&self) -> f64 {
        self.k_b
    }

    pub fn kbt(&self) -> f64 {
        self.k_b * self.temperature
    }

    pub fn delta_omega(&self) -> Option<f64> {
        self.delta_omega
    }

    /// Largest horizon accepted by the recurrence guard, `0.5 · 2π/Δω`.
    /// Irregular baths have no guard.
    pub fn recurrence_limit(&self) -> f64 {
        self.delta_omega.map_or(f64::INFINITY, |dw| PI / dw)
    }

    pub fn check_horizon(&self, horizon: f64) -> Result<(), ReservoirError> {
        let limit = self.recurrence_limit();
        if horizon > limit {
            return Err(ReservoirError::RecurrenceGuard { horizon, limit });
        }
        Ok(())
    }

    /// Mean thermal energy `½ ħω coth(ħω / 2k_BT)` of a mode; `½ ħω` at zero temperature.
    pub fn mean_energy(&self, omega: f64) -> f64 {
        mean_thermal_energy(self.hbar, omega, self.kbt())
    }

    /// `C(t) = Σ k_n cos(ω_n t)`.
    pub fn correlation(&self, t: f64) -> f64 {
        self.modes.iter().map(|m| m.k * (m.omega * t).cos()).sum()
    }

    /// `∫_0^t C(s) ds = Σ k_n sin(ω_n t) / ω_n`, exact for the discrete bath.
    pub fn correlation_integral(&self, t: f64) -> f64 {
        self.modes.iter().map(|m| m.k * (m.omega * t).sin() / m.omega).sum()
    }

    /// One-sided slope `(C(h) − C(0)) / h`. The discrete kernel has zero slope
    /// at the origin; on steps `h ≫ 1/ω_max` it follows the continuum kernel.
    pub fn correlation_slope(&self, h: f64) -> f64 {
        (self.correlation(h) - self.correlation(0.0)) / h
    }

    /// Draws a thermal state: each `α_n` is a circular complex Gaussian with
    /// `⟨|α_n|²⟩ = ⟨E_n⟩ / (ħ ω_n)`.
    pub fn sample_thermal<R: Rng + ?Sized>(&self, rng: &mut R) -> ReservoirState {
        let alphas = self
            .modes
            .iter()
            .map(|m| {
                let sigma = (self.mean_energy(m.omega) / (2.0 * self.hbar * m.omega)).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(sigma * re, sigma * im)
            })
            .collect();
        ReservoirState { alphas }
    }

    /// `F(t) = Σ (k_n l_n / √2)(e^{iω_n t} α_n + e^{-iω_n t} α_n*)`.
    pub fn noise_force(&self, state: &ReservoirState, t: f64) -> f64 {
        debug_assert_eq!(state.alphas.len(), self.modes.len());
        self.modes
            .iter()
            .zip(&state.alphas)
            .map(|(m, a)| {
                let phase = Complex64::from_polar(1.0, m.omega * t);
                SQRT_2 * m.k * m.length(self.hbar) * (phase * a).re
            })
            .sum()
    }

    /// Symbolic form of [`ReservoirSpec::noise_force`] at time `t`.
    pub fn noise_force_form(&self, t: f64) -> NoiseLinearForm {
        let coeffs = self
            .modes
            .iter()
            .map(|m| {
                let c = Complex64::from_polar(m.k * m.length(self.hbar) * FRAC_1_SQRT_2, m.omega * t);
                (c, c.conj())
            })
            .collect();
        NoiseLinearForm { constant: Complex64::new(0.0, 0.0), coeffs }
    }

    /// Applies `K(t) = -Σ (k_n l_n / (√2 ħ ω_n))(e^{-iω_n t} ∂_{α_n} + e^{iω_n t} ∂_{α_n*})`.
    pub fn k_action(&self, t: f64, form: &NoiseLinearForm) -> Complex64 {
        debug_assert_eq!(form.coeffs.len(), self.modes.len());
        -self
            .modes
            .iter()
            .zip(&form.coeffs)
            .map(|(m, &(c, d))| {
                let w = m.k * m.length(self.hbar) * FRAC_1_SQRT_2 / (self.hbar * m.omega);
                let phase = Complex64::from_polar(1.0, -m.omega * t);
                w * (phase * c + phase.conj() * d)
            })
            .sum::<Complex64>()
    }

    /// Bath phase-space coordinates `(q_n, p_n)` of a sampled state.
    pub fn coordinates(&self, state: &ReservoirState) -> Vec<(f64, f64)> {
        self.modes
            .iter()
            .zip(&state.alphas)
            .map(|(m, a)| {
                let l = m.length(self.hbar);
                (SQRT_2 * l * a.re, SQRT_2 * self.hbar * a.im / l)
            })
            .collect()
    }
}

/// `½ ħω coth(ħω / 2k_BT)`.
pub fn mean_thermal_energy(hbar: f64, omega: f64, kbt: f64) -> f64 {
    let e0 = 0.5 * hbar * omega;
    if kbt <= 0.0 {
        return e0;
    }
    let x = e0 / kbt;
    if x < 1e-4 {
        // coth x ≈ 1/x + x/3
        return kbt * (1.0 + x * x / 3.0);
    }
    e0 / x.tanh()
}

/// One sampled bath configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirState {
    pub alphas: Vec<Complex64>,
}

impl ReservoirState {
    pub fn ground(n: usize) -> Self {
        Self { alphas: vec![Complex64::new(0.0, 0.0); n] }
    }
}

/// `c₀ + Σ (c_n α_n + d_n α_n*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseLinearForm {
    pub constant: Complex64,
    pub coeffs: Vec<(Complex64, Complex64)>,
}

impl NoiseLinearForm {
    pub fn constant(n: usize, c: Complex64) -> Self {
        Self { constant: c, coeffs: vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); n] }
    }

    pub fn evaluate(&self, state: &ReservoirState) -> Complex64 {
        self.constant
            + self
                .coeffs
                .iter()
                .zip(&state.alphas)
                .map(|(&(c, d), a)| c * a + d * a.conj())
                .sum::<Complex64>()
    }
}

impl std::ops::Add for &NoiseLinearForm {
    type Output = NoiseLinearForm;
    fn add(self, rhs: &NoiseLinearForm) -> NoiseLinearForm {
        NoiseLinearForm {
            constant: self.constant + rhs.constant,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&(a, b), &(c, d))| (a + c, b + d))
                .collect(),
        }
    }
}

/// Parameters of a bath realizing the kernel `C(t) = mγΓ e^{-Γt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianBath {
    pub gamma: f64,
    pub cutoff: f64,
    pub mass: f64,
    pub n_modes: usize,
    pub omega_max: f64,
    pub temperature: f64,
    pub hbar: f64,
    pub k_b: f64,
}

impl LorentzianBath {
    /// Spectral density `κ(ω) = (2/π) mγΓ² / (ω² + Γ²)`, whose cosine
    /// transform over `[0, ∞)` is `mγΓ e^{-Γt}`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        let g2 = self.cutoff * self.cutoff;
        2.0 / PI * self.mass * self.gamma * g2 / (omega * omega + g2)
    }

    /// The continuum kernel `mγΓ e^{-Γ|t|}`.
    pub fn target_correlation(&self, t: f64) -> f64 {
        self.mass * self.gamma * self.cutoff * (-self.cutoff * t.abs()).exp()
    }

    /// Spectral weight above `omega_max`, missing from any grid truncated there:
    /// `(2/π) mγΓ (π/2 − atan(ω_max/Γ))`.
    pub fn truncated_tail(&self) -> f64 {
        2.0 / PI * self.mass * self.gamma * self.cutoff * (0.5 * PI - (self.omega_max / self.cutoff).atan())
    }

    pub fn delta_omega(&self) -> f64 {
        self.omega_max / self.n_modes as f64
    }

    /// Midpoint grid `ω_n = (n − ½)Δω`, `k_n = κ(ω_n)Δω`, `m_n = k_n/ω_n²`.
    /// `horizon` is the longest time the caller will simulate.
    pub fn build(&self, horizon: f64) -> Result<ReservoirSpec, ReservoirError> {
        if !(self.gamma > 0.0 && self.cutoff > self.gamma) {
            return Err(invalid("require Gamma > gamma > 0"));
        }
        if !(self.mass > 0.0) {
            return Err(invalid("mass must be positive"));
        }
        if self.n_modes < 100 {
            return Err(invalid("require N >= 100"));
        }
        if !(self.omega_max >= 10.0 * self.cutoff) {
            return Err(invalid("require omega_max >= 10 * Gamma"));
        }
        let dw = self.delta_omega();
        let modes = (1..=self.n_modes)
            .map(|n| {
                let omega = (n as f64 - 0.5) * dw;
                BathMode::new(omega, self.spectral_density(omega) * dw)
            })
            .collect();
        let mut spec = ReservoirSpec::new(modes, self.temperature, self.hbar, self.k_b)?;
        spec.delta_omega = Some(dw);
        spec.check_horizon(horizon)?;
        Ok(spec)
    }
}

fn invalid(msg: &str) -> ReservoirError {
    ReservoirError::InvalidParameter(msg.to_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::sample_stream;
    use crate::stats::parallel_moments;

    fn lorentzian(omega_max: f64) -> LorentzianBath {
        LorentzianBath {
            gamma: 1.0,
            cutoff: 50.0,
            mass: 1.0,
            n_modes: 4000,
            omega_max,
            temperature: 10.0,
            hbar: 10.0 / (100.0 * omega_max),
            k_b: 1.0,
        }
    }

    /// Independent oracle for the continuum kernel: composite Simpson
    /// quadrature of `∫_0^W κ(ω) cos(ωt) dω` on a grid much finer than Δω.
    fn truncated_cosine_transform(bath: &LorentzianBath, t: f64) -> f64 {
        let n = 400_000;
        let h = bath.omega_max / n as f64;
        let f = |w: f64| bath.spectral_density(w) * (w * t).cos();
        let mut s = f(0.0) + f(bath.omega_max);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn continuum_kernel_integrates_to_m_gamma() {
        let bath = lorentzian(2000.0);
        // ∫_0^∞ mγΓ e^{-Γt} dt by trapezoid on [0, 40/Γ]
        let h = 1e-4 / bath.cutoff;
        let n = 400_000;
        let mut s = 0.5 * (bath.target_correlation(0.0) + bath.target_correlation(n as f64 * h));
        for i in 1..n {
            s += bath.target_correlation(i as f64 * h);
        }
        assert!((s * h - bath.mass * bath.gamma).abs() < 1e-8);
    }

    #[test]
    fn discrete_kernel_matches_truncated_quadrature() {
        let bath = lorentzian(2000.0);
        let spec = bath.build(5.0).unwrap();
        for &t in &[0.0, 0.003, 0.02, 0.1, 1.0, 4.9] {
            let oracle = truncated_cosine_transform(&bath, t);
            assert!((spec.correlation(t) - oracle).abs() < 2e-3 * bath.target_correlation(0.0), "t={t}");
        }
    }

    #[test]
    fn fidelity_within_two_percent() {
        let bath = lorentzian(2000.0);
        let spec = bath.build(5.0).unwrap();
        let c0 = bath.target_correlation(0.0);
        let worst = (0..=5000)
            .map(|i| i as f64 * 1e-3)
            .map(|t| (spec.correlation(t) - bath.target_correlation(t)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.02 * c0, "worst {worst}");
        assert!((spec.correlation(0.0) - 50.0).abs() < 0.02 * 50.0);
    }

    #[test]
    fn coarse_cutoff_error_is_the_missing_tail() {
        // With ω_max = 1000 the grid drops (2/π)·50·(π/2 − atan 20) ≈ 1.59,
        // i.e. 3.2% of C(0): the t = 0 error is the truncated tail.
        let bath = lorentzian(1000.0);
        let spec = bath.build(5.0).unwrap();
        let missing = bath.target_correlation(0.0) - spec.correlation(0.0);
        assert!((missing - bath.truncated_tail()).abs() < 1e-3, "{missing}");
        assert!(missing > 0.03 * bath.target_correlation(0.0));
    }

    #[test]
    fn kernel_integral_tends_to_gamma() {
        let bath = lorentzian(2000.0);
        let spec = bath.build(6.0).unwrap();
        let t_end = 6.0;
        let h = 0.01 / bath.cutoff;
        let n = (t_end / h).round() as usize;
        let mut s = 0.5 * (spec.correlation(0.0) + spec.correlation(t_end));
        for i in 1..n {
            s += spec.correlation(i as f64 * h);
        }
        let trapezoid = s * h / bath.mass;
        assert!((trapezoid - bath.gamma).abs() < 0.02 * bath.gamma, "{trapezoid}");
        assert!((trapezoid - spec.correlation_integral(t_end)).abs() < 1e-3);
    }

    #[test]
    fn single_mode_correlation() {
        let spec = ReservoirSpec::new(vec![BathMode::new(3.0, 2.0)], 1.0, 1.0, 1.0).unwrap();
        assert!((spec.correlation(PI / 3.0) + 2.0).abs() < 1e-12);
        assert_eq!(spec.correlation(0.0), 2.0);
        for t in [0.1, 0.7, 2.0] {
            assert!((spec.correlation(t) - 2.0 * (3.0 * t).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn correlation_is_even() {
        let spec = lorentzian(2000.0).build(5.0).unwrap();
        for t in [0.01, 0.3, 2.2] {
            assert_eq!(spec.correlation(t), spec.correlation(-t));
        }
        let bath = lorentzian(2000.0);
        let h = 0.05;
        let continuum = (bath.target_correlation(h) - bath.target_correlation(0.0)) / h;
        assert!((spec.correlation_slope(h) / continuum - 1.0).abs() < 0.1);
        assert!(spec.correlation_slope(1e-7).abs() < 1.0);
    }

    #[test]
    fn spec_validation() {
        assert!(ReservoirSpec::new(vec![], 1.0, 1.0, 1.0).is_err());
        let bad = BathMode { omega: 1.0, k: 1.0, mass: 2.0 };
        assert!(ReservoirSpec::new(vec![bad], 1.0, 1.0, 1.0).is_err());
        let unordered = vec![BathMode::new(2.0, 1.0), BathMode::new(1.0, 1.0)];
        assert!(ReservoirSpec::new(unordered, 1.0, 1.0, 1.0).is_err());

        let mut bath = lorentzian(2000.0);
        bath.n_modes = 50;
        assert!(matches!(bath.build(1.0), Err(ReservoirError::InvalidParameter(_))));
        let bath = lorentzian(2000.0);
        match bath.build(100.0) {
            Err(ReservoirError::RecurrenceGuard { limit, .. }) => assert!((limit - 2.0 * PI).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let spec = bath.build(6.0).unwrap();
        for m in spec.modes() {
            assert!((m.k - m.mass * m.omega * m.omega).abs() <= 1e-12 * m.k);
        }
    }

    #[test]
    fn k_action_reproduces_minus_correlation() {
        let spec = lorentzian(2000.0).build(5.0).unwrap();
        let mut rng = sample_stream(3, 0);
        for _ in 0..100 {
            let t: f64 = rng.random_range(-5.0..5.0);
            let s: f64 = rng.random_range(-5.0..5.0);
            let v = spec.k_action(t, &spec.noise_force_form(s));
            let c = spec.correlation(t - s);
            assert!((v.re + c).abs() <= 1e-12 * spec.correlation(0.0), "t={t} s={s}");
            assert!(v.im.abs() <= 1e-12 * spec.correlation(0.0));
        }
        let v = spec.k_action(1.3, &spec.noise_force_form(1.3));
        assert!((v.re + spec.correlation(0.0)).abs() < 1e-12 * spec.correlation(0.0));
        let constant = NoiseLinearForm::constant(spec.len(), Complex64::new(4.0, -1.0));
        assert_eq!(spec.k_action(0.4, &constant), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn noise_form_is_consistent() {
        let spec = lorentzian(2000.0).build(5.0).unwrap();
        let mut rng = sample_stream(5, 1);
        let state = spec.sample_thermal(&mut rng);
        for t in [-2.0, 0.0, 0.37, 4.0] {
            let direct = spec.noise_force(&state, t);
            let form = spec.noise_force_form(t).evaluate(&state);
            assert!((direct - form.re).abs() < 1e-12 * direct.abs().max(1.0));
            assert!(form.im.abs() < 1e-9);
            let sym = &spec.noise_force_form(t) + &spec.noise_force_form(-t);
            assert!(sym.coeffs.iter().all(|(c, d)| c.im.abs() < 1e-12 && d.im.abs() < 1e-12));
        }
        let single = ReservoirSpec::new(vec![BathMode::new(2.0, 3.0)], 1.0, 0.5, 1.0).unwrap();
        let f = single.noise_force_form(0.0);
        let expect = 3.0 * single.modes()[0].length(0.5) * FRAC_1_SQRT_2;
        assert!((f.coeffs[0].0.re - expect).abs() < 1e-15 && f.coeffs[0].0 == f.coeffs[0].1);
        let ground = ReservoirState::ground(spec.len());
        assert_eq!(spec.noise_force(&ground, 1.0), 0.0);
    }

    #[test]
    fn thermal_sampling_moments() {
        let modes = vec![BathMode::new(0.5, 1.0), BathMode::new(2.0, 3.0)];
        let spec = ReservoirSpec::new(modes, 1.5, 1.0, 1.0).unwrap();
        let stats = parallel_moments(100_000, 17, 9, |rng, out| {
            let s = spec.sample_thermal(rng);
            let coords = spec.coordinates(&s);
            let (a0, a1) = (s.alphas[0], s.alphas[1]);
            out[0] = a0.norm_sqr();
            out[1] = a1.norm_sqr();
            out[2] = a0.re;
            out[3] = a0.im;
            out[4] = a0.re * a0.re - a0.im * a0.im; // Re α²
            out[5] = a0.re * a0.im; // Im α² / 2
            out[6] = a0.re * a1.re + a0.im * a1.im; // Re α₀ α₁*
            out[7] = coords[1].1 * coords[1].1 / (2.0 * spec.modes()[1].mass);
            out[8] = 0.5 * spec.modes()[1].k * coords[1].0 * coords[1].0;
        });
        for (i, m) in spec.modes().iter().enumerate() {
            let expect = spec.mean_energy(m.omega) / (spec.hbar() * m.omega);
            assert!((stats[i].mean() - expect).abs() < 3.0 * stats[i].std_error(), "mode {i}");
        }
        for s in &stats[2..7] {
            assert!(s.mean().abs() < 3.0 * s.std_error(), "{s:?}");
        }
        let half_energy = 0.5 * spec.mean_energy(spec.modes()[1].omega);
        assert!((stats[7].mean() - half_energy).abs() < 3.0 * stats[7].std_error());
        assert!((stats[8].mean() - half_energy).abs() < 3.0 * stats[8].std_error());
    }

    #[test]
    fn hot_and_cold_limits() {
        let omega = 2.0;
        let e = mean_thermal_energy(1.0, omega, 100.0 * omega);
        assert!((e / (100.0 * omega) - 1.0).abs() < 1e-3);
        assert_eq!(mean_thermal_energy(1.0, omega, 0.0), 1.0);
        // series branch agrees with coth at the switch point
        let x = 1e-4;
        let series = mean_thermal_energy(1.0, 2.0 * x, 1.0);
        let direct = x / x.tanh();
        assert!((series - direct).abs() < 1e-15);
    }

    #[test]
    fn noise_statistics_hot_regime() {
        let bath = lorentzian(2000.0);
        let spec = bath.build(5.0).unwrap();
        let pairs = [(0.3, 0.3), (0.3, 0.3 + 3.0 / bath.cutoff), (1.0, 1.2)];
        let stats = parallel_moments(10_000, 23, 1 + pairs.len(), |rng, out| {
            let s = spec.sample_thermal(rng);
            out[0] = spec.noise_force(&s, 0.7);
            for (j, &(t, u)) in pairs.iter().enumerate() {
                out[j + 1] = spec.noise_force(&s, t) * spec.noise_force(&s, u);
            }
        });
        assert!(stats[0].mean().abs() < 3.0 * stats[0].std_error());
        for (j, &(t, u)) in pairs.iter().enumerate() {
            let expect = spec.kbt() * spec.correlation(t - u);
            let tol = (3.0 * stats[j + 1].std_error()).max(0.05 * expect.abs());
            assert!((stats[j + 1].mean() - expect).abs() < tol, "pair {j}");
        }
    }
}
