//! Proof checking for Martin-Löf type theory with a forcing layer: finite
//! conditions, a generic Cohen real `f : N → N2`, and condition-indexed
//! reduction, conversion and typing.

pub mod cli;
pub mod condition;
pub mod conversion;
pub mod prelude;
pub mod reduction;
pub mod semantics;
pub mod syntax;
pub mod typecheck;

pub use condition::{Bit, Condition, ConditionError, Partition, SplitTree};
pub use syntax::{Context, Mode, ModeViolation, Term};
