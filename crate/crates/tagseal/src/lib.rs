//! File formats, OS randomness, the parallel experiment harness and the
//! command line front end for [`tagseal_core`].

pub mod cli;
pub mod driver;
pub mod formats;
pub mod harness;
pub mod rng;
