//! Synthesis of λ-contractive polytopes, scaled-set families and their
//! transition graph, plus the self-triggered closed-loop controller that
//! runs on top of them.
//!
//! The offline pipeline is
//! [`contractive::synth_target`] → [`enlargement::build_family`] →
//! [`graph::build_graph`] → [`controller::synth_periodic`]; the online
//! half is [`controller::ClosedLoop`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contractive;
pub mod controller;
pub mod enlargement;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod serde_util;
pub mod system;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use polytope::HPolytope;
pub use system::LinearSystem;
pub use tolerance::Tolerances;
