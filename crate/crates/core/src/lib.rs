//! Phase-space dynamics of a free particle coupled to a bath of harmonic
//! oscillators: Weyl symbols, the Moyal star product, closed-form reservoir
//! averages, memory-kernel corrections and an exact Hamiltonian oracle.
//!
//! The algebraic core is generic over [`scalar::Real`]; the aliases below fix
//! it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod experiments;
pub mod nonmarkovian;
pub mod oracle;
pub mod reservoir;
pub mod rng;
pub mod scalar;
pub mod series;
pub mod stats;
pub mod symbol_algebra;

pub type Poly64 = symbol_algebra::Poly<f64>;
pub type StarAlgebra64 = symbol_algebra::StarAlgebra<f64>;
pub type PhasePoint64 = symbol_algebra::PhasePoint<f64>;
pub type SystemParams64 = closed_forms::SystemParams<f64>;
pub type StochasticSymbol64 = closed_forms::StochasticSymbol<f64>;
pub type NoiseTrajectory64 = closed_forms::NoiseTrajectory<f64>;
pub type ExpKernel64 = nonmarkovian::ExpKernel<f64>;
pub type Beta1Solution64 = nonmarkovian::Beta1Solution<f64>;
pub type TimeSeries64 = series::TimeSeries<f64>;
