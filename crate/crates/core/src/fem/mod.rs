//! Reference elements, quadrature, dof numbering and Dirichlet constraints.

pub mod dirichlet;
mod dofs;
mod element;
mod quadrature;
mod values;

pub use dofs::{distribute_dofs, distribute_dofs_single_domain, BlockClass, DirichletKind, DofMap, Field};
pub use element::{shape_eval, ElementKind, ElementPair, ScalarElement, Tabulation};
pub use quadrature::{gauss_legendre_1d, QuadratureRule};
pub use values::{facet_values, CellValues, FacetValues, FeCache};
