//! Germs of great-circle fibrations of odd-dimensional spheres.
//!
//! A family of oriented great circles through a neighbourhood of a base
//! circle on the unit sphere in R^(2n+2) is described by 2n twisting
//! functions. This crate builds such germs, decides whether they fibre a
//! tube around the base circle (the twisting matrix must have no real
//! eigenvalues), and decides whether the hyperplane field orthogonal to the
//! circles is a contact structure at the base point (the Pfaffian of the
//! skew part of the twisting matrix must not vanish).
//!
//! The crate is organized around that pipeline:
//!
//! - [`matrix`]: dense matrices, eigenvalue realness, determinants,
//!   Pfaffians by two independent algorithms, skew normal form.
//! - [`forms`]: alternating multilinear forms with wedge products, used for
//!   the bivector formulation of the Pfaffian and for powers of d-alpha.
//! - [`chart`]: the Hom(P, P-perp) chart on the Grassmannian of oriented
//!   2-planes, the bad set of planes meeting P, and the transversality test.
//! - [`germ`]: base-point frames, parallel transport, the circle family,
//!   twisting matrices, and the named germ families.
//! - [`contact`]: the contact one-form in local coordinates and the
//!   contact verdict at the base point.
//! - [`io`]: the matrix and germ text formats shared with the CLI.

pub mod chart;
pub mod contact;
pub mod error;
pub mod forms;
pub mod germ;
pub mod io;
pub mod matrix;
pub mod poly;
pub mod scalar;

pub use contact::{analyze, ContactReport};
pub use error::{Error, Result};
pub use nalgebra::Complex;
pub use germ::{counterexample_germ, hopf_germ, GermSpec};
pub use matrix::{Matrix, SkewMatrix, SkewNormalForm};
