pub mod intlinalg;
pub mod lattice;
pub mod discform;
pub mod data;
pub mod roots;
pub mod niemeier;
pub mod action;
pub mod degen;
