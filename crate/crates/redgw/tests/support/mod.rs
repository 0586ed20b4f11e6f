//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]
pub mod caporaso_harris;
pub mod kontsevich;
pub mod strata;
