//! Tunneling of momentum-space wave packets through a high one-dimensional
//! Coulomb barrier.
//!
//! A plane wave of momentum p crosses the barrier with probability
//! D(p) = exp(−a/p). A packet with momentum density |φ(p)|² crosses with the
//! average T = ∫₀^∞ D(p)|φ(p)|² dp, which for slow packets can exceed D(p₀)
//! by hundreds of orders of magnitude. All magnitudes are kept as natural
//! logarithms ([`LogMagnitude`]).
//!
//! ```
//! use packet_tunnel::transmission::{evaluate, BarrierQuery, Method};
//!
//! let q = BarrierQuery::new(700.0, 1e-3, 2.0, Method::Quadrature).unwrap();
//! let r = evaluate(&q).unwrap();
//! assert!(r.ln_t() > -700.0);
//! ```

pub mod correlation;
pub mod error;
pub mod packet;
pub mod physical;
pub mod quad;
pub mod specfun;
pub mod transmission;
pub mod validation;

pub use error::{Error, Result};
pub use packet::{DensityTable, PacketShape};
pub use specfun::LogMagnitude;
pub use transmission::{BarrierQuery, Evaluator, Method, TransmissionResult};
