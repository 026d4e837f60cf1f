//! Exact computations around Klein's cubic threefold
//! `x0^2 x1 + x1^2 x2 + x2^2 x3 + x3^2 x4 + x4^2 x0 = 0`.

pub mod counting;
pub mod cyclotomic;
pub mod ffield;
pub mod gdcohom;
pub mod hecke;
pub mod lfunc;
pub mod thetasupp;

pub use counting::{Algorithm, CountError, CountOptions, CountRecord};
pub use cyclotomic::CyclotomicNumber;
pub use ffield::{FieldDescriptor, FieldElement, FieldError};
pub use gdcohom::{CohomologySummary, GdError, RationalDifferential};
pub use hecke::{HeckeError, HeckeRecord, SplitType};
pub use lfunc::{LfuncError, LocalFactor};
pub use thetasupp::{ClaimStatus, CosetParams, CosetType, LatticeSpec, PadicMat2, ScanBox, ThetaError, ThetaReport, TypeReport};
