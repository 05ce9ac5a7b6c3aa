//! Sparse storage, sparse LDLᵀ factorization and small dense helpers.

mod ldl;
mod sparse;

pub use ldl::SparseLdl;
pub use sparse::{axpy, dot, norm, CsrMatrix};
