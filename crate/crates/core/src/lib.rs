//! List coloring of plane graphs whose adjacent lists share at most one
//! color, with lists of size 4 relaxed to 3 on an independent set.
//!
//! [`engine`] is the constructive solver, [`oracle`] an exact backtracking
//! search used as ground truth, [`constructions`] the family showing that
//! lists of size 2 do not suffice, and [`gen`] seeded instance generators.

pub mod constructions;
pub mod engine;
pub mod format;
pub mod gen;
pub mod lists;
pub mod oracle;
pub mod plane_graph;
