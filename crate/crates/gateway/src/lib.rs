//! HTTP/JSON API and admin CLI for the `sciarchive` library.
//!
//! [`ops`] holds the operations behind both surfaces; [`http`] and [`cli`]
//! only translate requests into calls to it.

pub mod auth;
pub mod cli;
pub mod config;
pub mod error;
pub mod http;
pub mod ops;
pub mod page;
mod xml;
