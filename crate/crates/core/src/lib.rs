pub mod btriple;
pub mod cli;
pub mod contour;
pub mod numkit;
pub mod report;
pub mod sampling;
pub mod schrodinger;
