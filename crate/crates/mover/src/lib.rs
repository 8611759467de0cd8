//! Deepfake detection through facial-part consistency.
//!
//! The pipeline pretrains a masked autoencoder on real faces with a
//! facial-part masking strategy, then trains two discrepancy branches on top
//! of it: an encoder finetuned for classification over 10-frame averaged
//! encodings, and a mapping network regressed toward the frozen
//! reconstruction while classifying, trained episodically across
//! manipulation domains. A procedural face benchmark makes the whole thing
//! runnable and testable at desk scale.
//!
//! All numerics are generic over the scalar type ([`Scalar`]); `f32` is the
//! default precision used by the CLI, `f64` backs the gradient checks.

pub mod error;
pub mod face;
pub mod ingest;
pub mod manifest;
pub mod mask;
pub mod rng;
pub mod scalar;
pub mod synth;

pub use error::{MoverError, Result};
pub use scalar::Scalar;

/// Default scalar used by the CLI and pipeline entry points.
pub type Real = f32;
