//! Deterministic fixture data for examples, tests and benchmarks.

mod demo;
mod random;
mod resolver;
mod table1;

pub use demo::{demo_editorial, demo_state, DEMO_JOURNAL};
pub use random::{random_store, RandomParams, FAMILIES, ORGANIZATIONS, VOCABULARY};
pub use resolver::{resolver_fixture, CaseKind, ResolverCase, ResolverFixture};
pub use table1::{table1_ndjson, table1_records, table1_store, Table1Journal, TABLE1, TABLE1_HORIZON, TABLE1_YEAR};
