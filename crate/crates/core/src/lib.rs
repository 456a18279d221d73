//! Ext over the mod 2 Steenrod algebra for finite modules, computed from
//! minimal free resolutions, with Adams E2 charts and h0/h1/h2 lines.

pub mod charts;
pub mod claims;
pub mod fixtures;
pub mod gf2;
pub mod modules;
pub mod resolution;
pub mod steenrod;
pub mod store;

pub use charts::{build_chart, ChartError, ExtChart, Format};
pub use fixtures::Fixture;
pub use gf2::{quotient_lift, Gf2Error, Gf2Matrix, Gf2Vector};
pub use modules::{parse_module, FdModule, ModuleElement, ModuleError, Violation};
pub use resolution::{hom_complex_ext, resolve, ExtTable, HProducts, Resolution, ResolutionError};
pub use steenrod::{adem_reduce, admissible_basis, antipode, multiply, AdmissibleMonomial, SteenrodElement};
