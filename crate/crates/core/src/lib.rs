//! Computational workbench for semi-regular right-angled buildings.

pub mod autos;
pub mod chambers;
pub mod coxeter;
pub mod error;
pub mod geometry;
pub mod verify;

pub use autos::{Automorphism, GeneratorSet, PanelPermutation, UTarget, ValidityReport};
pub use chambers::{BuildingSpec, Chamber, Syllable};
pub use coxeter::{CoxeterDiagram, TypeSet, WeylWord};
pub use error::{Error, Result};
pub use geometry::{ApartmentFragment, Ball, BallCenter, Panel, Residue, Wing};
