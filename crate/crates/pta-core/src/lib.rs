//! Principal trade-off analysis for empirical games.
//!
//! The toolkit builds skew-symmetric evaluation matrices from games or
//! outcome logs, splits them into transitive ratings plus a cyclic residual
//! (Helmholtz-Hodge), decomposes the result into a sequence of planar
//! disc-game embeddings via the real Schur form, and quantifies the
//! strategic trade-offs those embeddings encode.

pub mod analysis;
pub mod embedding;
pub mod error;
pub mod games;
pub mod hodge;
pub mod ingest;
pub mod io;
pub mod matrix;
pub mod schur;

pub use error::{Error, Result};
pub use matrix::EvaluationMatrix;
