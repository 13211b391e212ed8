pub mod real_forms;
pub mod structure;
