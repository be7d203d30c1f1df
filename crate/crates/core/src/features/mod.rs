//! Feature tables, standardization and feature selection.

mod correlation;
mod rfe;
mod table;

pub use correlation::{average_ranks, correlation_filter, spearman_rho, DroppedFeature, FilterOutcome};
pub use rfe::{build_selection_report, rfe_select, RfeOutcome, SelectionEntry, SelectionReport};
pub use table::{format_real, table_zscore, FeatureTable, ZscoreParams};
