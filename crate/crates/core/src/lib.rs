//! Backend for a scientific journal archive: AMSBIB references, a catalog
//! of journals, articles and persons, a forward-link citation graph,
//! impact factors and a manuscript workflow, over an embedded store.

pub mod amsbib;
pub mod archive;
pub mod citegraph;
pub mod editorial;
pub mod fixtures;
pub mod ids;
pub mod metrics;
pub mod store;
pub mod text;
