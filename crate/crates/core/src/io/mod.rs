//! Calibration bundle I/O: CSV schemas, instance loading, and bundled
//! instance generation.

pub mod gen;
