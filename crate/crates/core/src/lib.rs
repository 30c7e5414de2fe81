//! Exact-arithmetic convex spaces.
//!
//! A convex space is a set with binary operations `cc_λ`, `λ ∈ [0, 1]`,
//! behaving like `λx + (1 − λ)y`. This crate provides concrete models
//! (rational hulls, meet-semilattices, explicit operation tables), the
//! derived n-ary barycentric operation, seeded axiom checking, the
//! embedding into a rational vector space, and recovery of a norm from a
//! compatible metric. All arithmetic is exact.

pub mod cli;
pub mod dist;
pub mod error;
pub mod harness;
pub mod hull;
pub mod linalg;
pub mod model;
pub mod norm;
pub mod rational;
pub mod report;
pub mod sampler;
pub mod spec;
pub mod stone;

pub use dist::{drop_last, l1_distance, merge_first_two, permute, product_split, Permutation, ProbDist};
pub use error::{Error, Result};
pub use harness::{
    cancellation_propagation, cancellation_search, check_convex_space_axioms, check_first_metric_condition,
    check_gamma_axioms, check_metric_axiom, lambda_sequence, CancellationWitness,
};
pub use model::{nu_assoc, ConvexModel, HullModel, MetricKind, ModelKind, Point, Semilattice, TableModel};
pub use norm::{
    boundedness_check, check_translation_invariance, check_uniform_on_lines, recover_norm, verify_isometry,
    sampled_quads, NormProbe, TranslationQuad,
};
pub use rational::{dyadic_plus_thirds, Rational, Weight};
pub use report::{CheckReport, Failure, Instance};
pub use sampler::Sampler;
pub use stone::{build_relations, generate_carrier, quotient_coordinates, verify_embedding, EmbeddingReport, FiniteCarrier};
