//! Turning-process chatter classification from topological features.
//!
//! The pipeline: simulate the nondimensional turning model (deterministic DDE
//! or Itô SDDE), embed the vibration signal as a point cloud via Takens delay
//! embedding, summarize the cloud with Vietoris–Rips persistent homology,
//! map diagrams to feature vectors, and train/apply a logistic classifier
//! against analytic stability-lobe labels.

pub mod classifier;
pub mod embedding;
pub mod error;
pub mod features;
pub mod io;
pub mod persistence;
pub mod pipeline;
pub mod render;
pub mod stability;
pub mod turning;

pub use error::{Error, Result};
