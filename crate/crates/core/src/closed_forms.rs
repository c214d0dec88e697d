//! Markovian solutions of the open Moyal equation for a free particle.
//!
//! Canonical symbols evolve as
//!
//! ```text
//! A_q(t) = q e^{-γt} + p (1 - e^{-γt}) / (mγ) + ∫_0^t (1 - e^{-γt'}) F(t'-t) dt' / (mγ)
//! A_p(t) = e^{-γt} (p - mγq)                 + ∫_0^t e^{-γt'} F(t'-t) dt'
//! ```
//!
//! and the reservoir average simply drops the noise integrals. Note that
//! `A_p(0) = p - mγq`: the Markov approximation only holds for `t ≫ 1/Γ`,
//! the exact short-time behavior lives in [`crate::nonmarkovian`].

use thiserror::Error;

use crate::scalar::Real;
use crate::symbol_algebra::{PhasePoint, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("invalid system parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("noise trajectory covers [{have_start}, {have_end}] but [{need_start}, {need_end}] is required")]
    TrajectoryCoverage { need_start: f64, need_end: f64, have_start: f64, have_end: f64 },
    #[error("noise trajectory needs a positive step and at least two samples")]
    BadTrajectory,
}

/// Physical constants of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    pub mass: T,
    pub gamma: T,
    pub temperature: T,
    /// Constant external force `F₀`.
    pub force: T,
    pub hbar: T,
    pub k_b: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(mass: T, gamma: T, temperature: T) -> Result<Self, ClosedFormError> {
        let p = Self { mass, gamma, temperature, force: T::zero(), hbar: T::one(), k_b: T::one() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_force(mut self, force: T) -> Self {
        self.force = force;
        self
    }

    pub fn validate(&self) -> Result<(), ClosedFormError> {
        let pos = |x: T| x > T::zero() && x.is_finite();
        if !pos(self.mass) {
            return Err(ClosedFormError::InvalidParameter("mass must be positive"));
        }
        if !pos(self.gamma) {
            return Err(ClosedFormError::InvalidParameter("gamma must be positive"));
        }
        if !(self.temperature >= T::zero() && self.temperature.is_finite()) {
            return Err(ClosedFormError::InvalidParameter("temperature must be non-negative"));
        }
        if !pos(self.hbar) || !pos(self.k_b) {
            return Err(ClosedFormError::InvalidParameter("hbar and k_B must be positive"));
        }
        if !self.force.is_finite() {
            return Err(ClosedFormError::InvalidParameter("force must be finite"));
        }
        Ok(())
    }

    pub fn kbt(&self) -> T {
        self.k_b * self.temperature
    }

    /// `D = k_BT / (mγ)`.
    pub fn diffusion(&self) -> T {
        self.kbt() / (self.mass * self.gamma)
    }

    /// `μ = 1 / (mγ)`.
    pub fn mobility(&self) -> T {
        T::one() / (self.mass * self.gamma)
    }

    fn decay(&self, t: T) -> T {
        (-self.gamma * t).exp()
    }
}

/// Where the kernel integral samples the noise force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseShift {
    /// `∫_0^t g(t') F(t' - t) dt'`, reading `F` on `[-t, 0]`.
    Backward,
    /// `∫_0^t g(t') F(t - t') dt'`, reading `F` on `[0, t]`.
    Forward,
}

/// Weight `g(t')` multiplying the noise force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKernel<T> {
    Zero,
    /// `a e^{-r t'}`
    Exponential { amplitude: T, rate: T },
    /// `a (1 - e^{-r t'})`
    Saturating { amplitude: T, rate: T },
}

impl<T: Real> NoiseKernel<T> {
    pub fn eval(&self, t: T) -> T {
        match *self {
            NoiseKernel::Zero => T::zero(),
            NoiseKernel::Exponential { amplitude, rate } => amplitude * (-rate * t).exp(),
            NoiseKernel::Saturating { amplitude, rate } => amplitude * (T::one() - (-rate * t).exp()),
        }
    }
}

/// Double-integral noise term of a variance symbol,
/// `∫_0^t dt' F(t') ∫_0^{t'} du h(t', u) F(u)` with
/// `h(t', u) = 2 e^{-γ(t'-u)} β₁(u) + β₂(u) (1 - e^{-γ(t'-u)}) / (mγ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairKernel<T> {
    pub beta1_0: T,
    pub beta3_0: T,
    pub params: SystemParams<T>,
}

impl<T: Real> PairKernel<T> {
    pub fn eval(&self, t_outer: T, u: T) -> T {
        let b = variance_betas(u, self.beta1_0, self.beta3_0, &self.params);
        let mg = self.params.mass * self.params.gamma;
        let e = (-self.params.gamma * (t_outer - u)).exp();
        T::lit(2.0) * e * b.beta1 + b.beta2 * (T::one() - e) / mg
    }
}

/// A symbol that depends on the noise history:
/// `poly(z) + ∫ g(t') F(·) dt'` plus an optional pair term.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticSymbol<T> {
    pub poly: Poly<T>,
    pub kernel: NoiseKernel<T>,
    pub pair: Option<PairKernel<T>>,
    pub shift: NoiseShift,
    /// Evolution time `t`; kernels are integrated over `[0, t]`.
    pub time: T,
}

impl<T: Real> StochasticSymbol<T> {
    /// Reservoir average: the noise has zero mean, so only the polynomial survives.
    pub fn averaged(&self) -> &Poly<T> {
        &self.poly
    }

    /// Value on one noise realization: the polynomial at `z` plus trapezoid
    /// quadrature of the noise integrals on the trajectory's own step.
    pub fn evaluate_on_noise(&self, noise: &NoiseTrajectory<T>, z: PhasePoint<T>) -> Result<T, ClosedFormError> {
        let t = self.time;
        let (need_start, need_end) = match self.shift {
            NoiseShift::Backward => (-t, T::zero()),
            NoiseShift::Forward => (T::zero(), t),
        };
        noise.check_covers(need_start, need_end)?;
        let mut value = self.poly.evaluate_real(z);
        if t <= T::zero() {
            return Ok(value);
        }
        let n = (t / noise.step - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1);
        let h = t / T::from_count(n);
        let force_at = |tp: T| match self.shift {
            NoiseShift::Backward => noise.at(tp - t),
            NoiseShift::Forward => noise.at(t - tp),
        };
        let forces: Vec<T> = (0..=n).map(|j| force_at(h * T::from_count(j))).collect();
        let half = T::lit(0.5);

        if self.kernel != NoiseKernel::Zero {
            let mut s = T::zero();
            for (j, &f) in forces.iter().enumerate() {
                let w = if j == 0 || j == n { half } else { T::one() };
                s = s + w * self.kernel.eval(h * T::from_count(j)) * f;
            }
            value = value + s * h;
        }

        if let Some(pair) = &self.pair {
            value = value + pair_integral(pair, &forces, h);
        }
        Ok(value)
    }
}

/// Trapezoid rule on the triangle `0 ≤ u ≤ t' ≤ t`. The inner integral is
/// split into the decaying part `e^{-γ(t'-u)}(2β₁ − β₂/(mγ))` carried by
/// a recurrence, and the plain cumulative part `β₂/(mγ)`.
fn pair_integral<T: Real>(pair: &PairKernel<T>, forces: &[T], h: T) -> T {
    let n = forces.len() - 1;
    let half = T::lit(0.5);
    let mg = pair.params.mass * pair.params.gamma;
    let decay = (-pair.params.gamma * h).exp();
    let (mut fast, mut slow) = (T::zero(), T::zero());
    let (mut prev_fast, mut prev_slow) = (T::zero(), T::zero());
    let mut outer = T::zero();
    for (j, &f) in forces.iter().enumerate() {
        let u = h * T::from_count(j);
        let b = variance_betas(u, pair.beta1_0, pair.beta3_0, &pair.params);
        let a_fast = (T::lit(2.0) * b.beta1 - b.beta2 / mg) * f;
        let a_slow = b.beta2 / mg * f;
        if j > 0 {
            fast = decay * fast + half * h * (decay * prev_fast + a_fast);
            slow = slow + half * h * (prev_slow + a_slow);
        }
        prev_fast = a_fast;
        prev_slow = a_slow;
        let w = if j == 0 || j == n { half } else { T::one() };
        outer = outer + w * f * (fast + slow);
    }
    outer * h
}

/// Noise force samples on a uniform grid `start + i·step`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrajectory<T> {
    start: T,
    step: T,
    values: Vec<T>,
}

impl<T: Real> NoiseTrajectory<T> {
    pub fn new(start: T, step: T, values: Vec<T>) -> Result<Self, ClosedFormError> {
        if !(step > T::zero()) || values.len() < 2 {
            return Err(ClosedFormError::BadTrajectory);
        }
        Ok(Self { start, step, values })
    }

    /// Samples `f` at `n + 1` points covering `[start, end]`.
    pub fn sample(start: T, end: T, n: usize, f: impl Fn(T) -> T) -> Result<Self, ClosedFormError> {
        let step = (end - start) / T::from_count(n.max(1));
        Self::new(start, step, (0..=n).map(|i| f(start + step * T::from_count(i))).collect())
    }

    /// Constant force over `[start, end]`.
    pub fn constant(start: T, end: T, value: T) -> Self {
        Self { start, step: end - start, values: vec![value, value] }
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn end(&self) -> T {
        self.start + self.step * T::from_count(self.values.len() - 1)
    }

    /// Linear interpolation; clamps within rounding of the ends.
    pub fn at(&self, time: T) -> T {
        let x = ((time - self.start) / self.step).max(T::zero());
        let last = self.values.len() - 1;
        let i = x.floor().to_usize().unwrap_or(0).min(last - 1);
        let frac = (x - T::from_count(i)).min(T::one());
        self.values[i] + (self.values[i + 1] - self.values[i]) * frac
    }

    fn check_covers(&self, need_start: T, need_end: T) -> Result<(), ClosedFormError> {
        let slack = self.step * T::lit(1e-9);
        if self.start > need_start + slack || self.end() < need_end - slack {
            let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
            return Err(ClosedFormError::TrajectoryCoverage {
                need_start: f(need_start),
                need_end: f(need_end),
                have_start: f(self.start),
                have_end: f(self.end()),
            });
        }
        Ok(())
    }
}

/// `β₁(t) = β₁(0) e^{-γt} + β₂(0) (1 - e^{-γt}) / (mγ)`.
pub fn beta1_canonical<T: Real>(t: T, beta1_0: T, beta2_0: T, params: &SystemParams<T>) -> T {
    let e = params.decay(t);
    beta1_0 * e + beta2_0 / (params.mass * params.gamma) * (T::one() - e)
}

/// Position symbol; `F₀` enters as the constant drift of [`drift_correction`].
pub fn symbol_q<T: Real>(t: T, params: &SystemParams<T>) -> StochasticSymbol<T> {
    let e = params.decay(t);
    let mg = params.mass * params.gamma;
    let mut poly = Poly::from_real_terms([((1, 0), e), ((0, 1), (T::one() - e) / mg)]);
    let (dq, _) = drift_correction(t, params);
    poly += &Poly::real_constant(dq);
    let kernel = if t > T::zero() {
        NoiseKernel::Saturating { amplitude: T::one() / mg, rate: params.gamma }
    } else {
        NoiseKernel::Zero
    };
    StochasticSymbol { poly, kernel, pair: None, shift: NoiseShift::Backward, time: t }
}

/// Momentum symbol; `F₀` enters as the constant drift of [`drift_correction`].
pub fn symbol_p<T: Real>(t: T, params: &SystemParams<T>) -> StochasticSymbol<T> {
    let e = params.decay(t);
    let mg = params.mass * params.gamma;
    let mut poly = Poly::from_real_terms([((0, 1), e), ((1, 0), -mg * e)]);
    let (_, dp) = drift_correction(t, params);
    poly += &Poly::real_constant(dp);
    let kernel = if t > T::zero() {
        NoiseKernel::Exponential { amplitude: T::one(), rate: params.gamma }
    } else {
        NoiseKernel::Zero
    };
    StochasticSymbol { poly, kernel, pair: None, shift: NoiseShift::Backward, time: t }
}

/// Reservoir-averaged `A_q(z, t)`, including drift when `F₀ ≠ 0`.
pub fn averaged_q<T: Real>(t: T, z: PhasePoint<T>, params: &SystemParams<T>) -> T {
    symbol_q(t, params).averaged().evaluate_real(z)
}

/// Reservoir-averaged `A_p(z, t)`, including drift when `F₀ ≠ 0`.
pub fn averaged_p<T: Real>(t: T, z: PhasePoint<T>, params: &SystemParams<T>) -> T {
    symbol_p(t, params).averaged().evaluate_real(z)
}

fn force_free_aq<T: Real>(t: T, z: PhasePoint<T>, params: &SystemParams<T>) -> T {
    let e = params.decay(t);
    z.q * e + z.p * (T::one() - e) / (params.mass * params.gamma)
}

fn force_free_ap<T: Real>(t: T, z: PhasePoint<T>, params: &SystemParams<T>) -> T {
    params.decay(t) * (z.p - params.mass * params.gamma * z.q)
}

/// Averaged `A_{q²}(z, t)` for `F₀ = 0`:
/// `A_q² + q²(1 - e^{-γt})² + (k_BT / mγ²)(2γt - 3 - e^{-2γt} + 4e^{-γt})`.
/// `params.force` is ignored.
pub fn symbol_q2<T: Real>(t: T, z: PhasePoint<T>, params: &SystemParams<T>) -> T {
    let e = params.decay(t);
    let aq = force_free_aq(t, z, params);
    let g = params.gamma;
    let one = T::one();
    let diffusive = params.kbt() / (params.mass * g * g)
        * (T::lit(2.0) * g * t - T::lit(3.0) - e * e + T::lit(4.0) * e);
    aq * aq + z.q * z.q * (one - e) * (one - e) + diffusive
}

/// Averaged `A_{p²}(z, t)` for `F₀ = 0`:
/// `A_p² + m k_BT (1 - e^{-2γt}) + e^{-2γt} m²γ² q²`. `params.force` is ignored.
pub fn symbol_p2<T: Real>(t: T, z: PhasePoint<T>, params: &SystemParams<T>) -> T {
    let e2 = params.decay(T::lit(2.0) * t);
    let ap = force_free_ap(t, z, params);
    let mg = params.mass * params.gamma;
    ap * ap + params.mass * params.kbt() * (T::one() - e2) + e2 * mg * mg * z.q * z.q
}

/// Deterministic coefficients of the quadratic ansatz `β₁p² + β₂pq + β₃q² + ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceBetas<T> {
    pub beta1: T,
    pub beta2: T,
    pub beta3: T,
}

pub fn variance_betas<T: Real>(t: T, beta1_0: T, beta3_0: T, params: &SystemParams<T>) -> VarianceBetas<T> {
    let e = params.decay(t);
    let mg = params.mass * params.gamma;
    let one_minus = T::one() - e;
    VarianceBetas {
        beta1: e * e * beta1_0 + beta3_0 / (mg * mg) * one_minus * one_minus,
        beta2: T::lit(2.0) * beta3_0 / mg * one_minus,
        beta3: beta3_0,
    }
}

/// `⟨β₆(t)⟩ = m k_BT {β₁(0)(1 - e^{-2γt}) + β₃(0)(2γt - e^{-2γt} + 4e^{-γt} - 3)/(γ²m²)}`.
pub fn beta6_mean<T: Real>(t: T, beta1_0: T, beta3_0: T, params: &SystemParams<T>) -> T {
    let e = params.decay(t);
    let g = params.gamma;
    let m = params.mass;
    m * params.kbt()
        * (beta1_0 * (T::one() - e * e)
            + beta3_0 * (T::lit(2.0) * g * t - e * e + T::lit(4.0) * e - T::lit(3.0)) / (g * g * m * m))
}

/// The fluctuating part `β₆` as a pair-kernel symbol; its reservoir mean
/// tends to [`beta6_mean`] when the kernel is short-lived.
pub fn beta6_symbol<T: Real>(t: T, beta1_0: T, beta3_0: T, params: &SystemParams<T>) -> StochasticSymbol<T> {
    StochasticSymbol {
        poly: Poly::zero(),
        kernel: NoiseKernel::Zero,
        pair: Some(PairKernel { beta1_0, beta3_0, params: *params }),
        shift: NoiseShift::Backward,
        time: t,
    }
}

/// Averaged variance symbol assembled from the β coefficients:
/// `β₁p² + q²(β₃ − mγβ₂ + 2m²γ²β₁) + pq(β₂ − 2mγβ₁) + ⟨β₆⟩`.
pub fn variance_symbol_averaged<T: Real>(t: T, beta1_0: T, beta3_0: T, params: &SystemParams<T>) -> Poly<T> {
    let b = variance_betas(t, beta1_0, beta3_0, params);
    let mg = params.mass * params.gamma;
    let two = T::lit(2.0);
    Poly::from_real_terms([
        ((0, 2), b.beta1),
        ((2, 0), b.beta3 - mg * b.beta2 + two * mg * mg * b.beta1),
        ((1, 1), b.beta2 - two * mg * b.beta1),
        ((0, 0), beta6_mean(t, beta1_0, beta3_0, params)),
    ])
}

/// Shifts `(dq, dp)` from a constant force:
/// `dq = (F₀/mγ)(t − (1 − e^{-γt})/γ)`, `dp = (F₀/γ)(1 − e^{-γt})`.
pub fn drift_correction<T: Real>(t: T, params: &SystemParams<T>) -> (T, T) {
    if params.force.is_zero() {
        return (T::zero(), T::zero());
    }
    let one_minus = T::one() - params.decay(t);
    let g = params.gamma;
    let dq = params.force / (params.mass * g) * (t - one_minus / g);
    let dp = params.force / g * one_minus;
    (dq, dp)
}
