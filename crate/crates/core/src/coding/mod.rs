//! LDPC code, alist I/O and the bit/symbol-vector mapping.

pub mod alist;
pub mod constellation;
pub mod ldpc;

pub use constellation::{Constellation, Modulation};
pub use ldpc::{LdpcCode, SparseBinaryMatrix};
