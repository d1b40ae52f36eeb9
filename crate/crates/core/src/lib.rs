//! Explicit deep-network constructions for Hölder-smooth functions over
//! general activations, with a sup-norm verification harness.
//!
//! * [`activation`]: piecewise-linear and locally-quadratic activations and the named catalog.
//! * [`network`]: network parameters, size metrics, composition and JSON export.
//! * [`lift`]: exact rewriting of ReLU networks over any piecewise-linear activation.
//! * [`gadgets`]: square, product, monomial, square-root, absolute-value and ReLU
//!   gadgets for locally-quadratic activations.
//! * [`relu_gadgets`]: sawtooth-based product and square networks for ReLU.
//! * [`approx`]: grid, local Taylor surrogate and full network assembly.
//! * [`corpus`]: target functions with derivative oracles and declared smoothness.
//! * [`complexity`]: covering-number bound and regression/classification rate calculators.
//! * [`sweep`]: knob sweeps of the gadgets with fitted log-log rates.
//! * [`verify`]: invariant suites behind `holonet verify`.

pub mod activation;
pub mod approx;
pub mod complexity;
pub mod corpus;
pub mod error;
pub mod fit;
pub mod gadgets;
pub mod interval;
pub mod lift;
pub mod multi_index;
pub mod network;
pub mod relu_gadgets;
pub mod sweep;
pub mod verify;

pub mod cli;

#[cfg(test)]
pub(crate) mod testutil;

pub use activation::{catalog, Activation};
pub use error::{Error, Result};
pub use network::{Layer, Metrics, Network, NetworkClassSpec};
