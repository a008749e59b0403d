//! Numerical kernels shared by the band and real-space solvers.

pub mod cubic;
pub mod eigen;
pub mod laplacian;
pub mod roots;

pub use cubic::{cubic_discriminant, solve_cubic_real};
pub use eigen::{eig_dense, eigenvalues_dense, ComplexMatrix, EigenDecomposition, EigenPair};
pub use laplacian::{laplacian_1d, laplacian_1d_fourth_order, SymmetricBanded};
pub use roots::{bisect_bracket, find_roots_scan, Root, RootSet};
