//! Library surface of the experiment driver, so integration tests can
//! call experiments directly instead of reparsing report JSON.

pub mod experiments;
pub mod report;
