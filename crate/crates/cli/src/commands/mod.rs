pub mod converge;
pub mod graph;
pub mod lp;
pub mod sanitize;
pub mod tradeoff;
pub mod verify;
