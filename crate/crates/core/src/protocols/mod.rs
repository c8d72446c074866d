//! Executable protocols and the relation registry.

mod coherent;
mod asymptotic;
mod common;
mod conversion;
mod lab;
mod registry;
mod superdense;
mod teleport;

pub use coherent::*;
pub use asymptotic::*;
pub use common::*;
pub use conversion::*;
pub use lab::{ChannelUses, Lab};
pub use registry::*;
pub use superdense::*;
pub use teleport::*;
