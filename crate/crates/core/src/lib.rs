//! Polar code construction for partially degradable (PD) quantum channels.
//!
//! The crate reduces a channel description to amplitude/phase fidelity
//! parameters, polarizes them over `k` levels, derives the PD codeword sets
//! and their finite-`n` rates, and evaluates block-error bounds alongside a
//! genie-aided successive-cancellation Monte Carlo oracle.
//!
//! ```
//! use pdpolar::channel::{ChannelModel, DegradingMapSpec};
//! use pdpolar::pipeline::{analyze_cell, CellSettings};
//! use pdpolar::config::{GeometryMode, McConfig};
//!
//! let model = ChannelModel::erasure(0.5, DegradingMapSpec::parametric(0.4).unwrap()).unwrap();
//! let settings = CellSettings {
//!     beta: 0.3,
//!     mode: GeometryMode::Exact,
//!     eta: 0.5,
//!     mc: McConfig { enabled: false, samples: 10_000, seed: None },
//!     timing: false,
//!     rate_targets: vec![],
//! };
//! let cell = analyze_cell(&model, 10, &settings).unwrap();
//! assert!(cell.row.rq_pd >= cell.row.rq_degr);
//! ```

pub mod ber;
pub mod channel;
pub mod codesets;
pub mod config;
pub mod csv_out;
pub mod indexset;
pub mod pipeline;
pub mod polarize;
pub mod rates;
pub mod verify;

pub use indexset::IndexSet;
