//! File formats, reports and the command line for `polarembed-core`.

pub mod artifact;
pub mod cli;
pub mod corpus_io;
pub mod embeddings_io;
pub mod model_file;
pub mod report;

pub use cli::run;
