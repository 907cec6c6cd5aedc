//! Cross Z-complementary sequence families and complete complementary codes
//! over cyclotomic rings.
//!
//! The crate provides exact arithmetic in `Z[ζ_K]` ([`cyclo`]), sequence
//! containers ([`model`]), correlation and property verification ([`corr`]),
//! unitary-like matrices ([`matrices`]), the construction operators and
//! algorithms ([`construct`]), a recipe planner ([`planner`]) and a JSON file
//! format ([`doc`]).

pub mod construct;
pub mod corr;
pub mod cyclo;
pub mod doc;
pub mod error;
pub mod matrices;
pub mod model;
pub mod planner;

pub use construct::{
    ccc_from_unitary, connect, cosf_to_ccc, dyadic_sum, elongate_cosf, enlarge_ccc, entrywise, generate_cosf,
    kron_expand, Partition,
};
pub use corr::{acorr, corr_sum, is_ccc, is_complementary_set, is_n_co_sf, pcorr, zccc_zone, Claim, Report, Verifier};
pub use cyclo::CycloNum;
pub use error::{Error, Result};
pub use matrices::{dft_matrix, hadamard_matrix, identity_matrix, MatrixSpec, UnitaryLike};
pub use model::{
    canonical_form, equal_up_to_indexing, Mode, PathVector, Scalar, Sequence, SequenceFamily, SequenceSet,
};
