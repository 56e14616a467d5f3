pub mod error;
pub mod probinfo;
pub mod table;
pub mod index_model;
pub mod network_model;
pub mod instance_mapping;
pub mod code_translation;
pub mod fixtures;
pub mod random;
pub mod format;
pub mod cli;
