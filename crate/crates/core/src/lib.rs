pub mod cascade;
pub mod cli;
pub mod error;
pub mod inversion;
pub mod limits;
pub mod nilalg;
pub mod plancherel;
pub mod rational;
pub mod report;
pub mod rootsys;
pub mod schrodinger;
pub mod suite;

pub use error::{Error, Result};
