pub mod category;
pub mod cli;
pub mod double;
pub mod dsl;
pub mod error;
pub mod finset;
pub mod gen;
pub mod int;
pub mod laws;
pub mod operad;
pub mod para;
pub mod pointwise;
pub mod poly;
pub mod semantics;
pub mod trace;
