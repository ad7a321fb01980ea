//! Exact symbolic engine for classical affine W-superalgebras obtained by
//! generalized Drinfeld-Sokolov reduction, their Poisson lambda-bracket
//! tables, and the associated integrable super-Hamiltonian hierarchies.
//!
//! The pipeline, bottom to top:
//!
//! * [`scalars`] — rationals and Laurent polynomials in the level symbol `k`;
//! * [`liesuper`] / [`families`] — finite-dimensional Lie superalgebras with
//!   invariant forms, sl2-triples and Dynkin gradings;
//! * [`diffsuper`] — the differential superpolynomial algebra and
//!   lambda-polynomials;
//! * [`pva`] — affine Poisson vertex algebra brackets, the master formula and
//!   local functionals;
//! * [`dsred`] — Lax operators, gauge transformations, the canonical-form
//!   recursion and free generators of `W(g,f,k)`;
//! * [`hierarchy`] — the dressing recursion, Hamiltonians `H_n`, evolution
//!   equations and Lenard-Magri verification;
//! * [`report`] / [`config`] — structured reports and the job pipeline behind
//!   the `walgebra` binary.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod config;
pub mod diffsuper;
pub mod dsred;
pub mod families;
pub mod hierarchy;
pub mod liesuper;
pub mod linalg;
pub mod pva;
pub mod report;
pub mod scalars;

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    UnsupportedFamily(String),
    DegenerateForm(String),
    NotSl2Triple(String),
    NonDiagonalizable(String),
    NonHalfIntegerSpectrum(String),
    FormNormalization(String),
    SingularPairing(String),
    NoEvenTopElement(String),
    BadPartition(String),
    ParityMismatch(String),
    DivisionByZero(String),
    SubspaceInconsistency(String),
    GaugeSupport(String),
    NotGaugeInvariant(String),
    SemisimpleFailure(String),
    TruncationTooShallow(String),
    Config(String),
    Stage { stage: &'static str, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedFamily(m) => write!(f, "unsupported family: {m}"),
            Error::DegenerateForm(m) => write!(f, "degenerate form: {m}"),
            Error::NotSl2Triple(m) => write!(f, "not an sl2-triple: {m}"),
            Error::NonDiagonalizable(m) => write!(f, "ad h/2 not diagonalizable: {m}"),
            Error::NonHalfIntegerSpectrum(m) => {
                write!(f, "ad h/2 spectrum not half-integral: {m}")
            }
            Error::FormNormalization(m) => write!(f, "form normalization impossible: {m}"),
            Error::SingularPairing(m) => write!(f, "singular pairing block: {m}"),
            Error::NoEvenTopElement(m) => write!(f, "no even element of top degree: {m}"),
            Error::BadPartition(m) => write!(f, "invalid partition: {m}"),
            Error::ParityMismatch(m) => write!(f, "parity mismatch: {m}"),
            Error::DivisionByZero(m) => write!(f, "division by zero: {m}"),
            Error::SubspaceInconsistency(m) => write!(f, "subspace inconsistency: {m}"),
            Error::GaugeSupport(m) => write!(f, "invalid gauge element: {m}"),
            Error::NotGaugeInvariant(m) => write!(f, "not gauge invariant: {m}"),
            Error::SemisimpleFailure(m) => write!(f, "semisimplicity failure: {m}"),
            Error::TruncationTooShallow(m) => write!(f, "truncation too shallow: {m}"),
            Error::Config(m) => write!(f, "config error: {m}"),
            Error::Stage { stage, message } => write!(f, "stage {stage}: {message}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    pub fn at_stage(self, stage: &'static str) -> Error {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                message: other.to_string(),
            },
        }
    }
}
