//! HTTP service and batch command line for eyevis.

pub mod api;
pub mod cli;
pub mod error;
pub mod settings;

pub use api::{router, serve, AppState};
pub use error::ApiError;
pub use settings::{Overrides, ProviderKind, Settings};
