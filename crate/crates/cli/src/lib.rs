//! Library side of the `schelling` binary: batch experiments, SVG plots and
//! instance loading shared by the subcommands and the tests.

pub mod experiment;
pub mod instance;
pub mod plot;
