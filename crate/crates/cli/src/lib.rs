//! Library surface of the `hdpc` binary: configuration, experiments,
//! file formats and seed derivation. The binary is a thin dispatcher
//! over [`experiments::Registry`].

pub mod config;
pub mod experiments;
pub mod io;
pub mod seeding;
