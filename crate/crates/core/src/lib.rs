//! Checker for structural contracts: assume/guarantee contracts over
//! extra-functional quantities, composed only through declared, type-checked
//! composition operators whose glue equations form their term signature.

pub mod algebra;
pub mod cli;
pub mod diagnostics;
pub mod engine;
pub mod model;
pub mod syntax;
pub mod types;
