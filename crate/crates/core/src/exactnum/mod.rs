//! Exact arithmetic graded by powers of `pi^2`.

mod bernoulli;
pub mod float;
mod pi;

pub use bernoulli::{a_seq, bernoulli, warm_a_seq, zeta_even};
pub use float::{big_to_f64, render_decimal, render_sig, to_float, DEFAULT_PRECISION_BITS};
pub use pi::{parse_rational, GradingError, PiLaurent, PiScalar};
