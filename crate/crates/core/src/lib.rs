//! Explicit trigonometric-polynomial perturbations of the free Hamiltonian
//! `½|y|²` on the torus, built around a near-resonance of a frequency vector,
//! together with the numerical machinery used to check that they destroy the
//! invariant torus with that frequency.
//!
//! The pipeline runs [`diophantine`] → [`frame`] → [`trigpoly`] →
//! [`perturbation`] → [`variational`].

pub mod diophantine;
pub mod error;
pub mod exec;
pub mod frame;
pub mod numeric;
pub mod perturbation;
pub mod trigpoly;
pub mod variational;

pub use error::{Error, Result};
