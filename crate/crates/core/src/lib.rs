pub mod commutative;
pub mod error;
pub mod intlin;
pub mod linsep;
pub mod linsets;
pub mod oracle;
pub mod reach;
pub mod vas;
pub mod vassep;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
