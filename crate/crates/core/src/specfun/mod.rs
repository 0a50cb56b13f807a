//! Special functions: Airy, Painleve II and the Tracy-Widom laws.

pub mod airy;
pub mod fredholm;
pub mod painleve;
pub mod quadrature;
pub mod tracy_widom;

pub use airy::{airy_ai, AiryValue};
pub use fredholm::fredholm_tw2_cdf;
pub use painleve::{solve_painleve_ii, PainleveDiagnostics, PainleveSolution};
pub use tracy_widom::{F2Integrand, TwDistribution, TwMetadata};
