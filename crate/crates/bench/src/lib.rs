//! Benchmark cases, reference solutions and output for the mixed rod solver.

// Index loops read closer to the formulas in dense numeric kernels.
#![allow(clippy::needless_range_loop)]

pub mod cases;
pub mod checks;
pub mod oracles;
pub mod run;
