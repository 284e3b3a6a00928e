#![no_std]
#![doc = "Exact toric geometry, quasi-polynomial fitting and certified p-adic series for zeta functions of divisors."]

extern crate alloc;

pub mod ehrhart;
pub mod error;
pub mod lattice;
pub mod mero;
pub mod padic;
pub mod poly;
pub mod toric;
pub mod zeta;

pub use error::{Error, Result};
