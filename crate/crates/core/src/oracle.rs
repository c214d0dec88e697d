//! Exact finite-N classical dynamics of the particle and its bath.
//!
//! Every Hamiltonian here is quadratic, so the Moyal bracket with `H`
//! coincides with the Poisson bracket and a symbol evolves by transport
//! along the classical flow: `A(z, t) = A₀(Φ_t(z))`. The oracle therefore
//! propagates the full phase-space point `(q, p, q_n, p_n)` exactly and
//! evaluates `A₀` on the system coordinates; averaging over thermal bath
//! draws gives the reservoir-averaged symbol.
//!
//! `H = p²/2m − F₀q + Σ [p_n²/2m_n + k_n(q_n − q)²/2]`.
//!
//! In mass-weighted coordinates `x = √M q` the stiffness matrix is an
//! arrowhead `D` with `D₀₀ = Σk_n/m`, `D₀ₙ = −ω_n√(k_n/m)`, `Dₙₙ = ω_n²`.
//! [`NormalModes`] diagonalizes it by solving the secular equation root by
//! root, which keeps `N = 4000` cheap. Two independent backends serve as
//! cross-checks at small `N`: the dense matrix exponential of the generator
//! and a fourth-order symplectic integrator.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::closed_forms::SystemParams;
use crate::reservoir::{ReservoirError, ReservoirSpec, ReservoirState};
use crate::rng::sample_stream;
use crate::series::{SeriesError, TimeSeries};
use crate::stats::{parallel_moments, parallel_moments_batched};
use crate::symbol_algebra::{PhasePoint, Poly};

/// Largest bath for which the dense backends are allowed.
pub const DENSE_MAX_MODES: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Reservoir(#[from] ReservoirError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("state has {got} bath modes, reservoir has {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("{what} needs at least {min} samples, got {got}")]
    TooFewSamples { what: &'static str, got: usize, min: usize },
    #[error("dense backend limited to {max} modes, reservoir has {got}")]
    TooLarge { got: usize, max: usize },
    #[error("invalid oracle input: {0}")]
    Invalid(&'static str),
}

/// Point in the full phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    pub z: PhasePoint<f64>,
    pub bath: Vec<(f64, f64)>,
}

impl FullState {
    /// System at `z`, bath coordinates recovered from the complex amplitudes.
    pub fn from_reservoir(z: PhasePoint<f64>, spec: &ReservoirSpec, state: &ReservoirState) -> Self {
        Self { z, bath: spec.coordinates(state) }
    }

    /// System at `z`, every bath oscillator at rest at the origin.
    pub fn bath_at_rest(z: PhasePoint<f64>, n: usize) -> Self {
        Self { z, bath: vec![(0.0, 0.0); n] }
    }

    /// `(q, q_1..q_N, p, p_1..p_N)`.
    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.bath.len() + 1;
        let mut v = DVector::zeros(2 * n);
        v[0] = self.z.q;
        v[n] = self.z.p;
        for (j, &(q, p)) in self.bath.iter().enumerate() {
            v[1 + j] = q;
            v[n + 1 + j] = p;
        }
        v
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        let n = v.len() / 2;
        Self {
            z: PhasePoint::new(v[0], v[n]),
            bath: (1..n).map(|j| (v[j], v[n + j])).collect(),
        }
    }

    fn check(&self, spec: &ReservoirSpec) -> Result<(), OracleError> {
        if self.bath.len() != spec.len() {
            return Err(OracleError::Dimension { got: self.bath.len(), expected: spec.len() });
        }
        Ok(())
    }
}

/// Total energy including the `−F₀q` potential.
pub fn energy(state: &FullState, spec: &ReservoirSpec, params: &SystemParams<f64>) -> f64 {
    let (q, p) = (state.z.q, state.z.p);
    let bath: f64 = spec
        .modes()
        .iter()
        .zip(&state.bath)
        .map(|(m, &(qn, pn))| 0.5 * pn * pn / m.mass + 0.5 * m.k * (qn - q) * (qn - q))
        .sum();
    0.5 * p * p / params.mass - params.force * q + bath
}

/// Generator of `ż = M z + g` in the ordering of [`FullState::to_vector`].
pub fn hamiltonian_matrix(spec: &ReservoirSpec, params: &SystemParams<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let n = spec.len() + 1;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    let mut g = DVector::zeros(2 * n);
    m[(0, n)] = 1.0 / params.mass;
    g[n] = params.force;
    for (j, mode) in spec.modes().iter().enumerate() {
        let i = 1 + j;
        m[(i, n + i)] = 1.0 / mode.mass;
        m[(n, 0)] -= mode.k;
        m[(n, i)] = mode.k;
        m[(n + i, i)] = -mode.k;
        m[(n + i, 0)] = mode.k;
    }
    (m, g)
}

/// Dense affine flow `z ↦ S z + c` over a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    pub t: f64,
    pub matrix: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl FlowMatrix {
    /// Matrix exponential of the generator augmented by the constant drive.
    pub fn exponential(spec: &ReservoirSpec, params: &SystemParams<f64>, t: f64) -> Result<Self, OracleError> {
        if spec.len() > DENSE_MAX_MODES {
            return Err(OracleError::TooLarge { got: spec.len(), max: DENSE_MAX_MODES });
        }
        let (m, g) = hamiltonian_matrix(spec, params);
        let dim = m.nrows();
        let mut aug = DMatrix::zeros(dim + 1, dim + 1);
        aug.view_mut((0, 0), (dim, dim)).copy_from(&(m * t));
        aug.view_mut((0, dim), (dim, 1)).copy_from(&(g * t));
        let e = aug.exp();
        Ok(Self {
            t,
            matrix: e.view((0, 0), (dim, dim)).into_owned(),
            offset: e.view((0, dim), (dim, 1)).column(0).into_owned(),
        })
    }

    pub fn apply(&self, state: &FullState) -> FullState {
        FullState::from_vector(&(&self.matrix * state.to_vector() + &self.offset))
    }

    /// `max |SᵀJS − J|` for the canonical form `J = [[0, I], [−I, 0]]`.
    pub fn symplectic_defect(&self) -> f64 {
        symplectic_defect(&self.matrix)
    }
}

pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows() / 2;
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    (s.transpose() * &j * s - j).amax()
}

/// Affine function `Σ a_j q_j + Σ b_j p_j + c` of the full state; index 0 is the particle.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineRow {
    pub position: Vec<f64>,
    pub momentum: Vec<f64>,
    pub constant: f64,
}

impl AffineRow {
    pub fn apply(&self, state: &FullState) -> f64 {
        let mut acc = self.constant + self.position[0] * state.z.q + self.momentum[0] * state.z.p;
        for (j, &(q, p)) in state.bath.iter().enumerate() {
            acc += self.position[1 + j] * q + self.momentum[1 + j] * p;
        }
        acc
    }
}

/// System coordinates at time `t` as affine functions of the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemRows {
    pub t: f64,
    pub q: AffineRow,
    pub p: AffineRow,
}

impl SystemRows {
    /// Poisson bracket `{q(t), p(t)}` with respect to the initial state; 1 for a canonical flow.
    pub fn bracket(&self) -> f64 {
        let (q, p) = (&self.q, &self.p);
        (0..q.position.len())
            .map(|j| q.position[j] * p.momentum[j] - q.momentum[j] * p.position[j])
            .sum()
    }
}

/// Orthonormal eigenbasis of the mass-weighted stiffness matrix.
#[derive(Debug, Clone)]
pub struct NormalModes {
    /// `√m` followed by `√m_n`.
    sqrt_mass: Vec<f64>,
    /// Ascending; the first is the exact zero mode.
    omega: Vec<f64>,
    /// Columns are eigenvectors.
    vectors: DMatrix<f64>,
}

impl NormalModes {
    pub fn new(spec: &ReservoirSpec, mass: f64) -> Result<Self, OracleError> {
        if !(mass > 0.0) {
            return Err(OracleError::Invalid("mass must be positive"));
        }
        let modes = spec.modes();
        let n = modes.len();
        let omega_b: Vec<f64> = modes.iter().map(|m| m.omega).collect();
        let d: Vec<f64> = omega_b.iter().map(|w| w * w).collect();
        let z: Vec<f64> = modes.iter().map(|m| -m.omega * (m.k / mass).sqrt()).collect();
        let z2: Vec<f64> = z.iter().map(|x| x * x).collect();
        let a: f64 = modes.iter().map(|m| m.k).sum::<f64>() / mass;
        let upper = a.max(d[n - 1]) + z2.iter().sum::<f64>().sqrt();

        let secular = Secular { a, omega: &omega_b, d: &d, z2: &z2 };
        let roots: Vec<(usize, f64)> = (0..n).into_par_iter().map(|k| secular.root(k, upper)).collect();

        let mut sqrt_mass = Vec::with_capacity(n + 1);
        sqrt_mass.push(mass.sqrt());
        sqrt_mass.extend(modes.iter().map(|m| m.mass.sqrt()));
        let norm0 = sqrt_mass.iter().map(|s| s * s).sum::<f64>().sqrt();

        let columns: Vec<Vec<f64>> = roots
            .par_iter()
            .map(|&(base, mu)| {
                let mut v = Vec::with_capacity(n + 1);
                v.push(1.0);
                for j in 0..n {
                    let gap = (omega_b[base] - omega_b[j]) * (omega_b[base] + omega_b[j]) + mu;
                    v.push(z[j] / gap);
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter_mut().for_each(|x| *x /= norm);
                v
            })
            .collect();
        let mut data = Vec::with_capacity((n + 1) * (n + 1));
        data.extend(sqrt_mass.iter().map(|s| s / norm0));
        for c in columns {
            data.extend(c);
        }
        let mut omega = Vec::with_capacity(n + 1);
        omega.push(0.0);
        omega.extend(roots.iter().map(|&(base, mu)| (d[base] + mu).max(0.0).sqrt()));
        Ok(Self { sqrt_mass, omega, vectors: DMatrix::from_vec(n + 1, n + 1, data) })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.omega
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// `max |VᵀV − I|`; cubic cost.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.vectors.ncols();
        (self.vectors.transpose() * &self.vectors - DMatrix::identity(n, n)).amax()
    }

    /// `q(t)` and `p(t)` for each time, from one pass over the eigenbasis.
    pub fn system_rows(&self, times: &[f64], force: f64) -> Vec<SystemRows> {
        let n = self.omega.len();
        let nt = times.len();
        let v0: Vec<f64> = (0..n).map(|k| self.vectors[(0, k)]).collect();
        let mut u = self.vectors.clone();
        for (k, mut col) in u.column_iter_mut().enumerate() {
            col *= v0[k];
        }
        let mut cos = DMatrix::zeros(n, nt);
        let mut sinc = DMatrix::zeros(n, nt);
        let mut dsin = DMatrix::zeros(n, nt);
        for (i, &t) in times.iter().enumerate() {
            for k in 0..n {
                let w = self.omega[k];
                if k == 0 {
                    cos[(k, i)] = 1.0;
                    sinc[(k, i)] = t;
                } else {
                    let (s, c) = (w * t).sin_cos();
                    cos[(k, i)] = c;
                    sinc[(k, i)] = s / w;
                    dsin[(k, i)] = -w * s;
                }
            }
        }
        let a = &u * &cos;
        let b = &u * &sinc;
        let c = &u * &dsin;
        let s = &self.sqrt_mass;
        let s0 = s[0];
        times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let (mut qf, mut pf) = (0.0, 0.0);
                if force != 0.0 {
                    for (k, (&v, &om)) in v0.iter().zip(&self.omega).enumerate().take(n) {
                        let w2 = v * v;
                        if k == 0 {
                            qf += w2 * 0.5 * t * t;
                            pf += w2 * t;
                        } else {
                            let half = 0.5 * om * t;
                            // (1 − cos ωt)/ω² = 2 sin²(ωt/2)/ω²
                            qf += w2 * 2.0 * (half.sin() / om).powi(2);
                            pf += w2 * (om * t).sin() / om;
                        }
                    }
                }
                SystemRows {
                    t,
                    q: AffineRow {
                        position: (0..n).map(|j| s[j] / s0 * a[(j, i)]).collect(),
                        momentum: (0..n).map(|j| b[(j, i)] / (s0 * s[j])).collect(),
                        constant: force / (s0 * s0) * qf,
                    },
                    p: AffineRow {
                        position: (0..n).map(|j| s0 * s[j] * c[(j, i)]).collect(),
                        momentum: (0..n).map(|j| s0 / s[j] * a[(j, i)]).collect(),
                        constant: force * pf,
                    },
                }
            })
            .collect()
    }

    /// Full state after time `t`; quadratic cost.
    pub fn propagate(&self, state: &FullState, t: f64, force: f64) -> FullState {
        let n = self.omega.len();
        let v = state.to_vector();
        let s = &self.sqrt_mass;
        let x = DVector::from_fn(n, |j, _| s[j] * v[j]);
        let pi = DVector::from_fn(n, |j, _| v[n + j] / s[j]);
        let y = self.vectors.tr_mul(&x);
        let eta = self.vectors.tr_mul(&pi);
        let mut yt = DVector::zeros(n);
        let mut et = DVector::zeros(n);
        for k in 0..n {
            let fk = self.vectors[(0, k)] * force / s[0];
            let w = self.omega[k];
            if k == 0 {
                yt[k] = y[k] + eta[k] * t + fk * 0.5 * t * t;
                et[k] = eta[k] + fk * t;
            } else {
                let (sn, c) = (w * t).sin_cos();
                let half = (0.5 * w * t).sin() / w;
                yt[k] = c * y[k] + sn / w * eta[k] + fk * 2.0 * half * half;
                et[k] = -w * sn * y[k] + c * eta[k] + fk * sn / w;
            }
        }
        let xt = &self.vectors * yt;
        let pt = &self.vectors * et;
        let mut out = DVector::zeros(2 * n);
        for j in 0..n {
            out[j] = xt[j] / s[j];
            out[n + j] = pt[j] * s[j];
        }
        FullState::from_vector(&out)
    }
}

/// Secular function of the arrowhead, evaluated relative to a pole `d_base`
/// so that roots close to a pole keep full relative accuracy.
struct Secular<'a> {
    a: f64,
    omega: &'a [f64],
    d: &'a [f64],
    z2: &'a [f64],
}

impl Secular<'_> {
    /// `f(d_base + μ)` and its derivative; `f(λ) = λ − a + Σ z_j²/(d_j − λ)` is increasing.
    fn eval(&self, base: usize, mu: f64) -> (f64, f64) {
        let wb = self.omega[base];
        let mut f = self.d[base] + mu - self.a;
        let mut df = 1.0;
        for j in 0..self.d.len() {
            let gap = (self.omega[j] - wb) * (self.omega[j] + wb) - mu;
            let r = self.z2[j] / gap;
            f += r;
            df += r / gap;
        }
        (f, df)
    }

    /// Root above `d_k` (below `d_{k+1}` unless `k` is last), as `(base, μ)`.
    fn root(&self, k: usize, upper: f64) -> (usize, f64) {
        let n = self.d.len();
        let (base, mut lo, mut hi) = if k + 1 < n {
            let gap = (self.omega[k + 1] - self.omega[k]) * (self.omega[k + 1] + self.omega[k]);
            if self.eval(k, 0.5 * gap).0 >= 0.0 {
                (k, 0.0, 0.5 * gap)
            } else {
                (k + 1, -0.5 * gap, 0.0)
            }
        } else {
            (k, 0.0, upper - self.d[k])
        };
        let mut x = 0.5 * (lo + hi);
        for _ in 0..300 {
            let (f, df) = self.eval(base, x);
            if f == 0.0 {
                break;
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - f / df;
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            let tol = 2.0 * f64::EPSILON * next.abs().max(f64::MIN_POSITIVE);
            if (next - x).abs() <= tol || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                x = next;
                break;
            }
            x = next;
        }
        (base, x)
    }
}

/// Fourth-order symplectic (Yoshida) integration with step at most `step`.
pub fn symplectic_integrate(
    state: &FullState,
    t: f64,
    spec: &ReservoirSpec,
    params: &SystemParams<f64>,
    step: f64,
) -> FullState {
    let steps = (t.abs() / step).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let cbrt2 = 2f64.cbrt();
    let w1 = 1.0 / (2.0 - cbrt2);
    let w0 = -cbrt2 * w1;
    let drift = [0.5 * w1, 0.5 * (w0 + w1), 0.5 * (w0 + w1), 0.5 * w1];
    let kick = [w1, w0, w1];
    let modes = spec.modes();
    let (mut q, mut p) = (state.z.q, state.z.p);
    let mut qn: Vec<f64> = state.bath.iter().map(|b| b.0).collect();
    let mut pn: Vec<f64> = state.bath.iter().map(|b| b.1).collect();
    for _ in 0..steps {
        for stage in 0..4 {
            let c = drift[stage] * h;
            q += c * p / params.mass;
            for (j, m) in modes.iter().enumerate() {
                qn[j] += c * pn[j] / m.mass;
            }
            if stage < 3 {
                let d = kick[stage] * h;
                let mut fq = params.force;
                for (j, m) in modes.iter().enumerate() {
                    let f = m.k * (qn[j] - q);
                    fq += f;
                    pn[j] -= d * f;
                }
                p += d * fq;
            }
        }
    }
    FullState { z: PhasePoint::new(q, p), bath: qn.into_iter().zip(pn).collect() }
}

/// How [`Oracle::propagate`] applies the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    NormalModes,
    /// Dense matrix exponential, cached per time.
    MatrixExp,
    Symplectic { step: f64 },
}

/// Exact dynamics for one reservoir and one set of system parameters.
pub struct Oracle {
    spec: ReservoirSpec,
    params: SystemParams<f64>,
    modes: OnceLock<NormalModes>,
    flows: Mutex<HashMap<u64, Arc<FlowMatrix>>>,
}

impl Oracle {
    pub fn new(spec: ReservoirSpec, params: SystemParams<f64>) -> Result<Self, OracleError> {
        params.validate().map_err(|_| OracleError::Invalid("system parameters"))?;
        Ok(Self { spec, params, modes: OnceLock::new(), flows: Mutex::new(HashMap::new()) })
    }

    pub fn spec(&self) -> &ReservoirSpec {
        &self.spec
    }

    pub fn params(&self) -> &SystemParams<f64> {
        &self.params
    }

    pub fn normal_modes(&self) -> &NormalModes {
        self.modes
            .get_or_init(|| NormalModes::new(&self.spec, self.params.mass).expect("mass validated"))
    }

    pub fn flow_matrix(&self, t: f64) -> Result<Arc<FlowMatrix>, OracleError> {
        self.spec.check_horizon(t.abs())?;
        let key = t.to_bits();
        if let Some(f) = self.flows.lock().expect("cache poisoned").get(&key) {
            return Ok(f.clone());
        }
        let flow = Arc::new(FlowMatrix::exponential(&self.spec, &self.params, t)?);
        self.flows.lock().expect("cache poisoned").insert(key, flow.clone());
        Ok(flow)
    }

    pub fn propagate(&self, state: &FullState, t: f64, backend: Backend) -> Result<FullState, OracleError> {
        state.check(&self.spec)?;
        self.spec.check_horizon(t.abs())?;
        if t == 0.0 {
            return Ok(state.clone());
        }
        Ok(match backend {
            Backend::NormalModes => self.normal_modes().propagate(state, t, self.params.force),
            Backend::MatrixExp => self.flow_matrix(t)?.apply(state),
            Backend::Symplectic { step } => symplectic_integrate(state, t, &self.spec, &self.params, step),
        })
    }

    pub fn system_rows(&self, times: &[f64]) -> Result<Vec<SystemRows>, OracleError> {
        for &t in times {
            self.spec.check_horizon(t.abs())?;
        }
        Ok(self.normal_modes().system_rows(times, self.params.force))
    }
}

/// Exact flow via normal modes.
pub fn propagate(
    state: &FullState,
    t: f64,
    spec: &ReservoirSpec,
    params: &SystemParams<f64>,
) -> Result<FullState, OracleError> {
    Oracle::new(spec.clone(), *params)?.propagate(state, t, Backend::NormalModes)
}

/// Minimum sample count for symbol averages.
pub const MIN_SYMBOL_SAMPLES: usize = 100;
/// Minimum sample count for noise statistics.
pub const MIN_NOISE_SAMPLES: usize = 1000;

/// Thermal averages of several symbols along the exact flow from `z0`.
/// Columns are `<name>_mean` and `<name>_se` per symbol.
pub fn mc_symbol_averages(
    oracle: &Oracle,
    symbols: &[(&str, &Poly<f64>)],
    z0: PhasePoint<f64>,
    t_grid: &[f64],
    n_samples: usize,
    master_seed: u64,
) -> Result<TimeSeries, OracleError> {
    if n_samples < MIN_SYMBOL_SAMPLES {
        return Err(OracleError::TooFewSamples { what: "symbol average", got: n_samples, min: MIN_SYMBOL_SAMPLES });
    }
    let mut series = TimeSeries::new(t_grid.to_vec())?;
    let rows = oracle.system_rows(t_grid)?;
    let spec = oracle.spec();
    let n = spec.len() + 1;
    let nt = t_grid.len();
    let ns = symbols.len();
    let width = nt * ns;
    let mut r = DMatrix::zeros(2 * nt, 2 * n);
    let mut consts = vec![0.0; 2 * nt];
    for (i, row) in rows.iter().enumerate() {
        for j in 0..n {
            r[(2 * i, j)] = row.q.position[j];
            r[(2 * i, n + j)] = row.q.momentum[j];
            r[(2 * i + 1, j)] = row.p.position[j];
            r[(2 * i + 1, n + j)] = row.p.momentum[j];
        }
        consts[2 * i] = row.q.constant;
        consts[2 * i + 1] = row.p.constant;
    }

    let moments = parallel_moments_batched(n_samples, width, |range, out| {
        let count = range.len();
        let mut x = DMatrix::zeros(2 * n, count);
        for (col, i) in range.enumerate() {
            let mut rng = sample_stream(master_seed, i as u64);
            let bath = spec.coordinates(&spec.sample_thermal(&mut rng));
            x[(0, col)] = z0.q;
            x[(n, col)] = z0.p;
            for (j, (q, p)) in bath.into_iter().enumerate() {
                x[(1 + j, col)] = q;
                x[(n + 1 + j, col)] = p;
            }
        }
        let y = &r * x;
        for col in 0..count {
            for ti in 0..nt {
                let z = PhasePoint::new(y[(2 * ti, col)] + consts[2 * ti], y[(2 * ti + 1, col)] + consts[2 * ti + 1]);
                for (si, (_, sym)) in symbols.iter().enumerate() {
                    out[col * width + ti * ns + si] = sym.evaluate_real(z);
                }
            }
        }
    });

    for (si, (name, _)) in symbols.iter().enumerate() {
        let mean = (0..nt).map(|ti| moments[ti * ns + si].mean()).collect();
        let se = (0..nt).map(|ti| moments[ti * ns + si].std_error()).collect();
        series.push(&format!("{name}_mean"), mean)?;
        series.push(&format!("{name}_se"), se)?;
    }
    Ok(series)
}

/// Thermal average of `a0` along the flow; columns `mean` and `stderr`.
pub fn mc_symbol_average(
    a0: &Poly<f64>,
    z0: PhasePoint<f64>,
    t_grid: &[f64],
    spec: &ReservoirSpec,
    params: &SystemParams<f64>,
    n_samples: usize,
    master_seed: u64,
) -> Result<TimeSeries, OracleError> {
    let oracle = Oracle::new(spec.clone(), *params)?;
    let s = mc_symbol_averages(&oracle, &[("a", a0)], z0, t_grid, n_samples, master_seed)?;
    let mut out = TimeSeries::new(t_grid.to_vec())?;
    out.push("mean", s.column("a_mean").expect("pushed above").to_vec())?;
    out.push("stderr", s.column("a_se").expect("pushed above").to_vec())?;
    Ok(out)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// `⟨F(t)F(t')⟩` estimate for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub t: f64,
    pub t_prime: f64,
    pub estimate: Estimate,
}

/// `F(t) = Σ w_n (cos ω_n t Re α_n − sin ω_n t Im α_n)` tabulated for fixed times.
struct NoiseTable {
    /// Row per time: interleaved `(w cos, −w sin)` per mode.
    rows: Vec<Vec<f64>>,
}

impl NoiseTable {
    fn new(spec: &ReservoirSpec, times: &[f64]) -> Self {
        let hbar = spec.hbar();
        let rows = times
            .iter()
            .map(|&t| {
                spec.modes()
                    .iter()
                    .flat_map(|m| {
                        let w = std::f64::consts::SQRT_2 * m.k * m.length(hbar);
                        let (s, c) = (m.omega * t).sin_cos();
                        [w * c, -w * s]
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    fn forces(&self, state: &ReservoirState, out: &mut [f64]) {
        for (row, f) in self.rows.iter().zip(out.iter_mut()) {
            *f = row
                .chunks_exact(2)
                .zip(&state.alphas)
                .map(|(w, a)| w[0] * a.re + w[1] * a.im)
                .sum();
        }
    }
}

fn distinct_times(times: impl Iterator<Item = f64>) -> (Vec<f64>, HashMap<u64, usize>) {
    let mut list = Vec::new();
    let mut index = HashMap::new();
    for t in times {
        index.entry(t.to_bits()).or_insert_with(|| {
            list.push(t);
            list.len() - 1
        });
    }
    (list, index)
}

/// Monte Carlo `⟨F(t)⟩` over thermal bath draws.
pub fn mc_noise_mean(
    spec: &ReservoirSpec,
    times: &[f64],
    n_samples: usize,
    master_seed: u64,
) -> Result<Vec<Estimate>, OracleError> {
    if n_samples < MIN_NOISE_SAMPLES {
        return Err(OracleError::TooFewSamples { what: "noise statistics", got: n_samples, min: MIN_NOISE_SAMPLES });
    }
    let table = NoiseTable::new(spec, times);
    let m = parallel_moments(n_samples, master_seed, times.len(), |rng, out| {
        table.forces(&spec.sample_thermal(rng), out);
    });
    Ok(m.iter().map(|m| Estimate { mean: m.mean(), stderr: m.std_error() }).collect())
}

/// Monte Carlo `⟨F(t)F(t')⟩` over thermal bath draws.
pub fn mc_noise_correlation(
    spec: &ReservoirSpec,
    t_pairs: &[(f64, f64)],
    n_samples: usize,
    master_seed: u64,
) -> Result<Vec<CorrelationEstimate>, OracleError> {
    if n_samples < MIN_NOISE_SAMPLES {
        return Err(OracleError::TooFewSamples { what: "noise statistics", got: n_samples, min: MIN_NOISE_SAMPLES });
    }
    let (times, index) = distinct_times(t_pairs.iter().flat_map(|&(a, b)| [a, b]));
    let slots: Vec<(usize, usize)> = t_pairs.iter().map(|(a, b)| (index[&a.to_bits()], index[&b.to_bits()])).collect();
    let table = NoiseTable::new(spec, &times);
    let m = parallel_moments(n_samples, master_seed, t_pairs.len(), |rng, out| {
        let mut f = vec![0.0; times.len()];
        table.forces(&spec.sample_thermal(rng), &mut f);
        for (o, &(i, j)) in out.iter_mut().zip(&slots) {
            *o = f[i] * f[j];
        }
    });
    Ok(t_pairs
        .iter()
        .zip(&m)
        .map(|(&(t, t_prime), m)| CorrelationEstimate {
            t,
            t_prime,
            estimate: Estimate { mean: m.mean(), stderr: m.std_error() },
        })
        .collect())
}
