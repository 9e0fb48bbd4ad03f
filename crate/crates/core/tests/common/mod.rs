#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};

/// exp(A) via scaling and squaring of a 24-term Taylor series.
pub fn expm3(a: &Matrix3<f64>) -> Matrix3<f64> {
    let norm = a.abs().column_sum().max();
    let squarings = (norm.log2().ceil().max(0.0) as i32) + 6;
    let scaled = a / 2f64.powi(squarings);
    let mut term = Matrix3::identity();
    let mut sum = Matrix3::identity();
    for k in 1..=24 {
        term = term * scaled / k as f64;
        sum += term;
    }
    (0..squarings).fold(sum, |e, _| e * e)
}

/// State `(x, x', z)` of one closed-loop axis at time `t`.
pub fn axis_solution(a: &Matrix3<f64>, x0: Vector3<f64>, t: f64) -> Vector3<f64> {
    expm3(&(a * t)) * x0
}
