//! Combinatorial models of pointed curves with A-type singularities: genus
//! and stability, identity components of automorphism groups, isotrivial
//! degeneration moves, closed points, and GIT of binary forms.

pub mod aut;
pub mod binforms;
pub mod canon;
pub mod catalog;
pub mod curve;
pub mod deformation;
pub mod degeneration;
pub mod enumerate;
pub mod error;
pub mod patterns;
pub mod report;

pub use curve::{
    BranchPoint, Builder, Component, Curve, DistinguishedPoint, Marking, Pointed, Role,
    Singularity, SingularityType, Violation,
};
pub use error::{Error, Result};
