//! Simulatability checking for finite joint distributions.
//!
//! Given a joint PMF over `X × Y × Z`, this crate decides whether the
//! observations `Z` can be passed through a memoryless channel so that the
//! output, paired with `Y`, is distributed exactly like `(X, Y)`. The
//! decision runs as a rank consistency test on a structured linear system
//! followed by a sign test on a small linear program; when the answer is
//! yes, a second linear program produces a concrete channel.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the
//! command line live in the companion `simcheck-cli` crate.
//!
//! ```
//! use simcheck_core::attack::{find_attack_channel, validate_channel, AttackRequest};
//! use simcheck_core::simulatability::build_system;
//! use simcheck_core::{check_simulatability, CheckOptions, Direction};
//!
//! let pmf = simcheck_core::fixtures::simulatable_2x2x3();
//! let verdict =
//!     check_simulatability(&pmf, Direction::YFixedZToX, &CheckOptions::default()).unwrap();
//! assert!(verdict.holds);
//!
//! let (a, c) = (pmf.marginal_yz(), pmf.marginal_yx());
//! let sys = build_system(&a, &c).unwrap();
//! let channel = find_attack_channel(&AttackRequest::new(&sys)).unwrap();
//! assert!(validate_channel(&a, &c, &channel, 1e-8).unwrap());
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod attack;
pub mod fixtures;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod pmf;
pub mod simulatability;

pub(crate) mod fmath {
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }

    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
}

pub use linalg::Matrix;
pub use pmf::{Channel, JointPmf};
pub use simulatability::{check_simulatability, CheckOptions, Direction, Verdict};
