//! System-wide CVSS analysis over a specified-model endpoint.

pub mod client;
pub mod cvss;
pub mod rollup;

pub use client::{find_seeded_vulnerability, run_analysis_client, AnalysisOutcome, ClientError, SeededMatch};
pub use cvss::{base_score, CvssResult, CvssVector, Metric, MetricError};
pub use rollup::{roll_up, MetricArrays, RollUpError, Strategy};
