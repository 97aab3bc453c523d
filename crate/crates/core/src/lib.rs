//! Locality-sensitive hashing in hyperbolic space.
//!
//! Points live in the Poincare ball, the upper half-space or the hyperboloid
//! ([`geometry`]). In the plane a hash is the side of a random geodesic drawn
//! from the kinematic measure ([`geodesic`], [`lsh2d`]); in higher dimension
//! points are first projected to the plane along a Gaussian direction
//! ([`lsh_hd`]). [`index`] builds a multi-table ANN index on top, and
//! [`experiments`] estimates collision rates on synthetic data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dimreduce;
pub mod error;
pub mod experiments;
pub mod geodesic;
pub mod geometry;
pub mod index;
pub mod lowerbound;
pub mod lsh2d;
pub mod lsh_hd;
pub mod special;
pub mod validate;

pub use dimreduce::{alpha_constant, big_f, check_f_stretch, jl_transform, ProjectionMap};
pub use error::{Error, Result};
pub use experiments::{
    boundary_pair_experiment, estimate_curve, estimate_p1_p2, rho_curve, sample_ball, sample_uniform_ball,
    ExperimentConfig, PairSelection, RadialLaw, RhoEstimate, SamplerRadius,
};
pub use geodesic::{separation_measure_quadrature, Geodesic, KinematicSampler, Label};
pub use geometry::{
    distance_halfspace, distance_hyperboloid, distance_poincare, halfspace_to_hyperboloid, halfspace_to_poincare,
    hyperboloid_to_halfspace, hyperboloid_to_poincare, poincare_to_halfspace, poincare_to_hyperboloid,
    HalfSpacePoint, HyperboloidPoint, Model, PoincarePoint, Point,
};
pub use index::{brute_force_nn, choose_params, IndexParams, LshIndex};
pub use lowerbound::{induced_approximation_factor, puiseux_sandwich, HammingEmbedding};
pub use lsh2d::{collision_probability, estimate_collision_mc, rho_bound, rho_exact, LshFamilyParams};
pub use lsh_hd::{collision_bounds_hd, HdFamilyParams, HdHasher};
pub use special::stable_arccosh1p;
