//! Dense complex linear algebra: Hermitian eigensolver, unitary DFT and
//! numerical rank.

mod dft;
mod eigh;
mod matrix;
mod rank;

pub use dft::dft;
pub use eigh::{eigh, eigh_window, EigenDecomposition, WindowedEigen};
pub use matrix::{CMatrix, HermitianMatrix};
pub use rank::{default_rank_tolerance, null_space_dim, numerical_rank, singular_values};
