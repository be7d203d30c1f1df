#![allow(dead_code)]

pub mod cases;
pub mod naive_radiomics;
pub mod tree;
