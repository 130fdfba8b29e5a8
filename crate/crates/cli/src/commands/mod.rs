pub mod data;
pub mod evaluate;
pub mod model;
