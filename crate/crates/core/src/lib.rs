#![no_std]
extern crate alloc;

pub mod ball;
pub mod channel;
pub mod control;
pub mod error;
pub mod power;
pub mod presets;
pub mod rate;
pub mod sim;

pub use error::{Error, Result};
