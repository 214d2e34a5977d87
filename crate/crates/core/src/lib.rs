pub mod error;
pub mod field;
pub mod model;
pub mod closed_form;
pub mod rearrange;
pub mod groundstate;
pub mod dynamics;
pub mod config;
pub mod io;
pub mod verify;
pub mod run;
pub mod cli;

pub use error::{Error, Result};
