pub mod paths;
pub mod report;
