//! Meromorphic decomposition of `Σ_x q^f(x) T^(d·x)` for increasing `f`.

mod cone;
mod increasing;

pub use cone::{cone_decomposition, triangular_substitute, ConeDecomposition, ConeTerm};
pub use increasing::{check_increasing, IncreasingPolynomial};
mod reduce;

pub use reduce::{
    reduce_to_mero_parts, reduce_with, Atom, Denominator, EntireCore, MeroBody, MeroTerm, MeromorphicPart,
    ReduceOptions,
};
mod entire;

pub use entire::{evaluate_meromorphic, rational_valuation};
