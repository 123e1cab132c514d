//! Brute-force reference implementations shared by the property tests
//! and the acceptance run. Each check returns a one-line summary or the
//! first disagreement found.

#![allow(dead_code)]

pub mod amsbib;
pub mod metrics;
pub mod resolver;
pub mod search;
pub mod workflow;

pub type Check = Result<String, String>;
