//! Exact analysis of two-colour urn solitaire.
//!
//! * [`exact`]: rationals, binomials, polynomials in `m` and `n`, nullspaces.
//! * [`urnproc`]: dynamic programs for win probabilities and round counts.
//! * [`montecarlo`]: seeded simulation of both game variants.
//! * [`holonomic`]: recurrences with polynomial coefficients: the known ones
//!   for the expected round count, forward evaluation, verification against
//!   tables, and guessing from data.

pub mod exact;
pub mod holonomic;
pub mod montecarlo;
pub mod urnproc;
