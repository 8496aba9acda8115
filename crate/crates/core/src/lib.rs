pub mod cone;
pub mod decomposition;
pub mod error;
pub mod exterior;
pub mod g2;
pub(crate) mod linalg;
pub mod parabolicity;
pub mod selftest;
pub mod spectra;
pub mod su3;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/su3.md")]
    mod su3 {}
    #[doc = include_str!("../../../book/src/g2.md")]
    mod g2 {}
    #[doc = include_str!("../../../book/src/torsion.md")]
    mod torsion {}
    #[doc = include_str!("../../../book/src/parabolicity.md")]
    mod parabolicity {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/cones.md")]
    mod cones {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
