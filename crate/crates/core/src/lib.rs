//! Tweet-stream analytics: ingestion, location resolution, country and
//! language aggregation, and rank correlation against development indices.

pub mod analytics;
pub mod correlate;
pub mod geo;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod rankcorr;
pub mod raw;
pub mod records;
pub mod report;
pub mod synth;
