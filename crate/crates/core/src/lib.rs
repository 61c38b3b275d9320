//! Simulation of a laser source driving a two-level target through a
//! cascaded (one-way) coupling.
//!
//! The composite Hilbert space is a truncated Fock register for the source
//! tensored with a qubit; basis index `2n + q` with `q = 0` for `|−⟩` and
//! `q = 1` for `|+⟩`. Every routine is generic over the scalar type through
//! [`scalar::Real`]; the aliases below fix it to `f64`.

// Parameter checks use negated comparisons so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod ansatz;
pub mod error;
pub mod evolve;
pub mod hilbert;
mod linalg;
pub mod liouvillian;
pub mod scalar;
pub mod sources;
pub mod verification;

pub use error::{Error, Result};
pub use evolve::{evolve_master, mcwf_run, ensemble_average, TimeGrid, Unraveling};
pub use hilbert::{DensityOperator, Factor, FockSpec, Layout, Operator, PureState, Qubit};
pub use liouvillian::{CouplingConfig, Superoperator};
pub use scalar::Real;
pub use sources::{ClassicalPath, SourceModel};

pub type OperatorF64 = hilbert::Operator<f64>;
pub type PureStateF64 = hilbert::PureState<f64>;
pub type DensityOperatorF64 = hilbert::DensityOperator<f64>;
pub type SuperoperatorF64 = liouvillian::Superoperator<f64>;
pub type CouplingConfigF64 = liouvillian::CouplingConfig<f64>;
pub type SourceModelF64 = sources::SourceModel<f64>;
pub type TimeGridF64 = evolve::TimeGrid<f64>;

pub type OperatorF32 = hilbert::Operator<f32>;
pub type PureStateF32 = hilbert::PureState<f32>;
pub type DensityOperatorF32 = hilbert::DensityOperator<f32>;
