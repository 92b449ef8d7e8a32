//! Frobenius characteristic polynomials, Jacobian group arithmetic and
//! isogeny evidence for hyperelliptic curves over finite fields of odd
//! characteristic.

pub mod configs;
pub mod curve;
pub mod error;
pub mod ff;
pub mod intpoly;
pub mod isogeny;
pub mod jacgrp;
pub mod json;
pub mod nt;
pub mod recon;
pub mod weil;
pub mod zeta;

pub use configs::{Configuration, RnString, Signature};
pub use curve::{parse_curve_spec, CurvePoint, HyperellipticCurve};
pub use error::{Error, Result};
pub use ff::{ext_field, FieldDesc, FieldElement};
pub use jacgrp::{Jacobian, JacobianGroupTable, MumfordDivisor};
pub use isogeny::{IsogenyCertificate, Verdict};
pub use recon::{CMinusReport, GenerationReport, TowerReport};
pub use zeta::{FrobCharPoly, OrderSequence};
