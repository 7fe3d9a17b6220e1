//! Sequences, transforms, the lambda spaces and their bases.

pub mod basis;
pub mod sequence;
pub mod space;
pub mod transform;
pub mod witness;

pub use basis::{b_sequence, basis_vector, expand_in_basis, BasisExpansion};
pub use sequence::{FbarForm, Origin, RuleParams, SequenceOracle, BUILTIN_SEQUENCES};
pub use space::{membership, space_norm, NormEstimate, SpaceId};
pub use transform::{
    fbar_prefix, fbar_transform, fbar_transform_rows, fhat_prefix, fhat_transform, inverse_oracle, inverse_prefix,
    inverse_transform,
};
pub use witness::{inclusion_witness, verify_witness, InclusionWitness, WitnessCheck, WITNESS_NAMES};
