//! RF chain-free transmit mapping and the receive chain.
//!
//! Transmit: bits → Gray-mapped symbols → per-stream coefficient sequences,
//! one stream per surface partition, pilots first. Receive: optional
//! derotation, integrate-and-dump, least-squares channel estimate from the
//! pilots, zero-forcing detection, nearest-point demapping, EVM and BER.

mod frame;
mod linalg;
mod metrics;
mod modulation;
mod receiver;

pub use frame::{
    conventional_waveform, expand_stream_matrix, hadamard_pilots, symbols_to_schedule,
    FramePayload, FrameSpec, SurfacePartition,
};
pub use linalg::CMatrix;
pub use metrics::{ber, evm};
pub use modulation::{demap_symbol, demap_symbols, map_bits, ModulationScheme};
pub use receiver::{receive_frame, LinkReport, StreamMetrics};
