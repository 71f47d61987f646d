pub mod dgbv;
pub mod error;
pub mod formal;
pub mod frobenius;
pub mod geometry;
pub mod graded;
pub mod homology;
pub mod io;
pub mod linalg;
pub mod mc;
pub mod models;
pub mod morphism;
pub mod par;
pub mod pipeline;
pub mod poly;
