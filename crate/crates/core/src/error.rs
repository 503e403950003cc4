use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::Rat;

/// Errors raised by operations on modules, morphisms and matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    InvalidField(u32),
    FieldMismatch { left: u32, right: u32 },
    DimensionMismatch { context: &'static str },
    InvalidGrid(String),
    AxisMismatch { left: usize, right: usize },
    NotARefinement,
    GridMismatch,
    /// Two modules that must coincide as data (e.g. the middle term of a
    /// composition) differ.
    ModuleMismatch(&'static str),
    NotComparable { from: Vec<Rat>, to: Vec<Rat> },
    InvalidModule(String),
    InvalidMorphism(String),
    InvalidArgument(String),
    /// An exhaustive search would exceed the configured Hom-dimension budget.
    BudgetExceeded { needed: usize, budget: usize },
    UnverifiedLink(usize),
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidField(p) => write!(f, "{p} is not a supported prime"),
            Error::FieldMismatch { left, right } => {
                write!(f, "field mismatch: F_{left} vs F_{right}")
            }
            Error::DimensionMismatch { context } => write!(f, "dimension mismatch in {context}"),
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::AxisMismatch { left, right } => {
                write!(f, "axis count mismatch: {left} vs {right}")
            }
            Error::NotARefinement => write!(f, "target grid does not refine the module grid"),
            Error::GridMismatch => write!(f, "objects do not share a grid"),
            Error::ModuleMismatch(ctx) => write!(f, "module mismatch in {ctx}"),
            Error::NotComparable { from, to } => {
                write!(f, "no structure map from ")?;
                write_point(f, from)?;
                write!(f, " to ")?;
                write_point(f, to)
            }
            Error::InvalidModule(msg) => write!(f, "invalid module: {msg}"),
            Error::InvalidMorphism(msg) => write!(f, "invalid morphism: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::BudgetExceeded { needed, budget } => write!(
                f,
                "search budget exceeded: exhaustive path needs dimension {needed}, budget is {budget}"
            ),
            Error::UnverifiedLink(k) => write!(f, "chain link {k} does not verify"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

fn write_point(f: &mut fmt::Formatter<'_>, p: &[Rat]) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in p.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
