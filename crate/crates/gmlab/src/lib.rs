//! A numerical laboratory for the stationary Gierer-Meinhardt
//! activator-inhibitor system
//!
//! ```text
//! d1 lap(u) - u + u^p/v^q + sigma = 0
//! d2 lap(v) - v + u^r/v^s       = 0       no-flux boundary
//! ```
//!
//! The crate computes every closed-form object attached to this system —
//! the constant steady state, the diffusion-ratio threshold curve and its
//! admissible sets, explicit amplitude bounds, Neumann spectra and
//! bifurcation values, mode-count parity — and solves the discretized
//! system for constant and spike steady states with a damped Newton method,
//! pseudo-time marching, and homotopy continuation. A verifier grades
//! computed solutions against the estimates the parameters certify.
//!
//! # Quick start
//!
//! ```
//! use gmlab::exponents::Exponents;
//! use gmlab::threshold::k_thresholds;
//!
//! let exps = Exponents::new(2.0, 4.0, 2.0, 4.0)?;
//! let report = k_thresholds(&exps, 0.0)?;
//! // Below this diffusion ratio the constant state is the only solution.
//! assert!((report.k.unwrap() - 1.0).abs() < 1e-10);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The accompanying guide in `book/` walks through the concepts chapter by
//! chapter; its code snippets are compiled and run as doc-tests of this
//! crate.

pub mod bounds;
pub mod existence;
pub mod exponents;
pub mod field;
pub mod grid;
pub mod linalg;
pub mod numeric;
pub mod quad;
pub mod solver;
pub mod spectrum;
pub mod steady;
pub mod threshold;
pub mod verify;

pub use bounds::{BoundCertificate, ModelParams};
pub use exponents::Exponents;
pub use field::SolutionField;
pub use grid::Grid;
pub use spectrum::Domain;
pub use steady::ConstantState;

// Compile and run the guide's code snippets as doc-tests.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(steady_states, "../../../book/src/steady-states.md");
    chapter!(thresholds, "../../../book/src/thresholds.md");
    chapter!(amplitude_bounds, "../../../book/src/amplitude-bounds.md");
    chapter!(spectra_parity, "../../../book/src/spectra-and-parity.md");
    chapter!(solving, "../../../book/src/solving.md");
    chapter!(verification, "../../../book/src/verification.md");
}
