//! Batch front-end for the cutsolver suite: instance files, solver and
//! oracle invocation, solution verification, generators and reductions.

pub mod format;
pub mod run;
