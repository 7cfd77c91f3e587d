pub mod algorithms;
pub mod fem;
pub mod harness;
pub mod linalg;
pub mod mesh;
pub mod ppr;
