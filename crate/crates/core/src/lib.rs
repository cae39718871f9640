#![cfg_attr(not(feature = "std"), no_std)]
extern crate alloc;

pub mod autodiff;
pub mod data;
pub mod harness;
pub mod inference;
pub mod losses;
mod math;
pub mod model;
pub mod relations;
