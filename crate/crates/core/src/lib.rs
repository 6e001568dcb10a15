//! Certified computation on presentations of `l^p` spaces.
//!
//! The crate is `no_std` and only needs `alloc`. Everything numeric is exact
//! rational arithmetic or rational-endpoint enclosures.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod genset;
pub mod construction;
pub mod isometry;
pub mod lpspace;
pub mod rigor;

pub use error::{Error, Result};
