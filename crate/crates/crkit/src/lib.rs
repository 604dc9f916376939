//! File formats, reports, plots, a rayon executor and the `crkit` command
//! line on top of `crkit-core`.

pub mod cgrid;
pub mod cli;
pub mod parallel;
pub mod plot;
pub mod report;
pub mod specs;

pub use parallel::Rayon;
