//! Exact analysis, construction and time stepping for explicit Runge–Kutta
//! methods with high weak stage order.

/// Version tag carried by every JSON document this crate writes.
pub const SPEC_VERSION: &str = "1.0";

pub mod catalog;
pub mod conditions;
pub mod construct;
pub mod exact;
pub mod experiments;
pub mod scalar;
pub mod tableau;
pub mod timestep;
