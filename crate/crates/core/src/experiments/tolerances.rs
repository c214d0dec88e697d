//! Acceptance thresholds used by the scenarios.

/// Standard errors allowed on a Monte Carlo mean.
pub const SE_MULTIPLIER: f64 = 3.0;

/// Star-product identities, relative to the largest coefficient.
pub const STAR_IDENTITY: f64 = 1e-12;
/// `K(t)F(t') + C(t − t')`, relative to `C(0)`.
pub const K_ACTION: f64 = 1e-12;
/// Random polynomial triples per identity sweep.
pub const STAR_TRIALS: usize = 200;
/// Random `(t, t')` pairs for the `K` identity.
pub const K_ACTION_PAIRS: usize = 100;

/// Discrete kernel against the continuum target, as a fraction of `C(0)`.
pub const BATH_FIDELITY: f64 = 0.02;
/// `(1/m)∫C` against `γ`.
pub const FRICTION_INTEGRAL: f64 = 0.02;
/// Noise moments; the floor for `⟨F⟩` is this fraction of `√(k_BT C(0))`.
pub const NOISE_MOMENTS: f64 = 0.05;

/// Thermal means of `q` and `p` against the averaged canonical symbols.
pub const CANONICAL_MEANS: f64 = 0.02;
/// `⟨p²⟩` against `m k_BT`.
pub const EQUIPARTITION: f64 = 0.05;
/// Closed-form second moments against their β-coefficient assembly.
pub const CLOSED_FORM_EXACT: f64 = 1e-12;
/// Fitted `d⟨q²⟩/dt` against `2k_BT/(mγ)`.
pub const DIFFUSION_SLOPE: f64 = 0.10;
/// Quadrature of `⟨β₆⟩`, absolute.
pub const BETA6_QUADRATURE: f64 = 1e-8;

/// Long-time drift velocity against `F₀/(mγ)`.
pub const DRIFT_VELOCITY: f64 = 0.05;
/// `D/(μ k_BT)` against 1.
pub const EINSTEIN_RATIO: f64 = 0.10;

/// `|s₁ + γ| ≤ 2γ²/Γ`; equals `0.02γ` at `Γ = 100γ`.
pub const SLOW_POLE_FACTOR: f64 = 2.0;
/// Markov and memory `β₁` differ by at most this times `γ/Γ`.
pub const MARKOV_LIMIT_FACTOR: f64 = 5.0;
/// Memory ODE against the pole expansion, relative.
pub const MEMORY_ODE: f64 = 1e-4;
