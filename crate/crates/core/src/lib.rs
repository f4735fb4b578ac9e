pub mod cli;
pub mod error;
pub mod glue;
pub mod newton;
pub mod series;
pub mod tower;
pub mod witness;
pub mod value_group;
pub mod witt;
