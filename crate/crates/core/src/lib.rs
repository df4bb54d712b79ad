//! Control plane and simulator for handoff between ceiling-mounted
//! directional access points.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It provides:
//!
//! * [`geometry`], [`mobility`], [`layout`]: positions, client traces, AP
//!   layouts and the switch lines between Voronoi-adjacent APs.
//! * [`radio`]: a synthetic link model (path loss, antenna lobes, shadowing)
//!   and SNR to rate / loss mappings.
//! * [`estimator`]: locates the first AP in the client's frame by minimising
//!   a pairwise ranking cross-entropy between SNR samples and distances.
//! * [`selector`]: picks the next AP from the client's moving direction when
//!   a switch line is crossed.
//! * [`scheduler`]: trajectory-driven ECN marking of downlink packets.
//! * [`sim`]: a deterministic packet-level discrete-event simulator tying the
//!   above together.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod estimator;
pub mod geometry;
pub mod layout;
pub mod mobility;
pub mod radio;
pub mod scheduler;
pub mod selector;
pub mod sim;

pub(crate) mod hash;

pub use error::{Error, Result};
pub use geometry::Vec3;
