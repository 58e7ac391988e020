//! Finite-alphabet probability tables and Shannon measures.

mod function;
mod measures;
mod pmf;

pub use function::FunctionTable;
pub use measures::{
    binary_entropy, conditional_entropy, conditional_mutual_information, entropy, entropy_of, h2,
    mutual_information, neg_xlog2x, Bits,
};
pub use pmf::{bernoulli_product, dsbs, JointPmf, MAX_CELLS, NORMALIZATION_TOLERANCE, SUPPORT_EPS};

pub(crate) use pmf::{advance, cell_count};
