#![no_std]

extern crate alloc;

pub mod error;
pub mod frames;
pub mod hilbert;
pub mod protocols;
pub mod resources;
pub mod sampling;
pub mod usd;

pub use error::{Error, Result};
