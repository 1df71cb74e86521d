//! Encodings of neighbouring problems into approval elections.

pub mod budgeting;
pub mod classification;
pub mod facility;
pub mod minimax;
