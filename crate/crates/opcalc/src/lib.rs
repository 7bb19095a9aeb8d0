//! Parser, canonical printer, spec files, random generators and
//! verification suites for the operator calculus in `opcalc-core`.

pub mod expr;
pub mod spec_file;
pub mod gen;
pub mod suites;
pub mod cli;
