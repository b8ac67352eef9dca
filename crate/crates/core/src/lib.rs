//! Enumeration and local classification of integral binary cubic forms,
//! cubic rings and cubic fields by discriminant.

pub mod arith;
pub mod asymptotics;
pub mod cache;
pub mod cuberoot;
pub mod enumerate;
pub mod error;
pub mod forms;
pub mod local;
pub mod oracle;
pub mod quadratic;
pub mod reduce;
pub mod rings;
pub mod special;

pub use cuberoot::CubeRootRational;
pub use error::{Error, Result};
pub use forms::{BinaryCubicForm, HessianForm, Signature, UnimodularMatrix};
pub use local::{LocalCondition, LocalMode, SplittingSymbol};
pub use rings::{CubicRingTable, RingElement};
