pub mod contraction;
pub mod density;
pub mod elliptic;
pub mod error;
pub mod optimize;
pub mod params;
pub mod quadrature;
pub mod wick;
pub mod twosite;
pub mod threesite;
pub mod oracle;
pub mod dynamics;
pub mod scan;
pub mod cli;
