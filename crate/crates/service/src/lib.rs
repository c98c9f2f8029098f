//! REST routes for the Specified Model and Direct interfaces.

mod error;
mod routes;
mod server;

pub use error::ApiError;
pub use routes::router;
pub use server::{serve, serve_until_ctrl_c, spawn, ServerHandle, DEFAULT_BIND};
