//! Horocycle Radon transform on the hyperbolic half-space `H^n`, its reduction to
//! one-dimensional Volterra and Abel equations by Fourier transform in the
//! horizontal variables, and a reconstruction pipeline built on top of it.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functions;
pub mod geometry;
pub mod quadrature;
pub mod scalar;
pub mod slice_fourier;
pub mod special;
pub mod support;
pub mod transform;
pub mod volterra;

pub use error::{Error, Result};
pub use functions::DecayFunction;
pub use geometry::{
    apply_isometry, distance, horocycle_to_plane, lies_outside, sphere_to_plane_isometry, Horocycle, Isometry,
    IsometryChain, PointH,
};
pub use num_complex::Complex64;
pub use scalar::Scalar;
pub use slice_fourier::{
    assemble_kernel_equation, exterior_data, exterior_data_multi, fourier_slice, fourier_slices, fubini_integral,
    sphere_phase_integral, BesselProfile, EvenStepProfile, FnProfile, KernelEquation, Profile, SliceData,
};
pub use support::{
    reconstruct_all, reconstruct_any, reconstruct_slice, reconstruct_slice_reduced, synthesize_dataset, verify_support,
    verify_support_with, ExteriorDataset, Provenance, SliceReconstruction, SupportReport, SupportTolerance, Verdict,
    VerifyPlan,
};
pub use transform::{
    decay_certificate, transform_plane, transform_sphere, transform_via_isometry, Estimate, QuadratureSpec,
};
pub use volterra::{
    reduce_diagonal_vanishing, reduce_even_step, solve_abel, solve_abel_product, solve_first_kind, solve_second_kind,
    AbelProblem, DiagonalVanishingProblem, FirstKindProblem, Kernel, SecondKindProblem, Solution, UniformGrid,
};
