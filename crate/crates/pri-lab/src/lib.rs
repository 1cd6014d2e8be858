pub mod apps;
pub mod cli;
pub mod error;
pub mod haar;
pub mod mc;
pub mod pri;
pub mod qcore;
pub mod rng;
pub mod symtypes;
pub mod verify;
