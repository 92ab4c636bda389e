use std::fmt;

use crate::curve::Violation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid curve: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown singularity `{0}`")]
    UnknownSingularity(String),
    #[error("curve is not prestable for r = {0}")]
    NotPrestable(u32),
    #[error("curve is not stable for r = {0}")]
    NotStable(u32),
    #[error("missing hyperelliptic role for point `{point}` on component `{component}`")]
    MissingRole { component: String, point: String },
    #[error("weight assignment does not fit the curve: {0}")]
    BadAssignment(String),
    #[error("torus does not survive on the rosary")]
    NoTorus,
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Document(err.to_string())
    }
}
