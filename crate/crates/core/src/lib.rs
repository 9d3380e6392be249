pub mod error;
pub mod syntax;
pub mod qe;
pub mod model;
pub mod generic;
pub mod field;
pub mod random;
pub mod defsets;
pub mod imaginaries;
