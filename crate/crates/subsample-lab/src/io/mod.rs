//! Dataset ingestion, configuration parsing, and result serialization.

pub mod config;
pub mod csv_data;
pub mod results;

pub use config::read_config;
pub use csv_data::{read_dataset_csv, write_selection_csv, IngestedDataset, SelectionRow};
pub use results::{write_results, OutputFormat, ResultRow, RESULT_HEADER};
