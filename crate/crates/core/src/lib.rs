//! Recovery of sparse discrete-time signals from their autocorrelation
//! (equivalently, from the magnitude of a Fourier transform of at least twice
//! the signal length).
//!
//! Recovery is a two-stage procedure:
//!
//! 1. the support of the signal is reconstructed from the support of the
//!    autocorrelation, which is the set of pairwise distances of the signal
//!    support ([`turnpike`], or [`noisy_support`] for thresholded noisy data);
//! 2. the values are recovered from a lifted semidefinite program restricted
//!    to that support ([`recovery`]).
//!
//! Signals are identified up to time-shift, conjugate-flip and global phase;
//! see [`ambiguity`].
//!
//! ```
//! use sparse_pr::{autocorrelation, equivalent, recovery::tspr, SparseSignal};
//! use num_complex::Complex64;
//!
//! let x = SparseSignal::from_parts(
//!     64,
//!     &[2, 5, 13, 31, 44],
//!     &[0.8, -1.3, 0.4, 2.1, -0.6].map(|v| Complex64::new(v, 0.3 * v)),
//! )
//! .unwrap();
//! let a = autocorrelation(&x);
//! let y = tspr(&a, &Default::default()).unwrap();
//! assert!(equivalent(&x, &y, 1e-6).unwrap());
//! ```

pub mod ambiguity;
pub mod error;
pub mod harness;
pub mod io;
pub mod measure;
pub mod noisy_support;
pub mod recovery;
pub mod sets;
pub mod signal;
pub mod turnpike;

pub use ambiguity::{canonicalize, equivalent, is_aperiodic_support, orbit_distance};
pub use error::{Error, Result};
pub use measure::{autocorrelation, distance_set, power_spectrum, support_of, ZERO_GUARD};
pub use sets::{DistanceSet, SupportSet};
pub use signal::{Autocorrelation, SparseSignal, C64};
