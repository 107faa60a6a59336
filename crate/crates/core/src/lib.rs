//! Exact-arithmetic tools for smoothing and approximation on the discrete
//! torus ℤ_m^n, built around metric cotype inequalities.

pub mod bernoulli;
pub mod calibration;
pub mod check;
pub mod error;
pub mod identities;
pub mod kernels;
pub mod lower_bounds;
pub mod metrics;
pub mod rational;
pub mod torus;

pub use error::{Error, Result};
pub use rational::Rational;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/torus.md")]
    struct TorusChapter;
    #[doc = include_str!("../../../book/src/kernels.md")]
    struct Kernels;
    #[doc = include_str!("../../../book/src/bernoulli.md")]
    struct Bernoulli;
    #[doc = include_str!("../../../book/src/identities.md")]
    struct Identities;
    #[doc = include_str!("../../../book/src/cotype.md")]
    struct Cotype;
    #[doc = include_str!("../../../book/src/lower-bounds.md")]
    struct LowerBounds;
    #[doc = include_str!("../../../book/src/calibration.md")]
    struct Calibration;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
