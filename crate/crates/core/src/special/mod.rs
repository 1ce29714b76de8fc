//! Bessel, Hankel and modified Bessel kernels of orders 0, 1 and 2.

mod bessel;
mod hankel;

pub use bessel::{bessel_j, bessel_k, bessel_k_scaled, bessel_y};
pub use hankel::{
    connection_constant, hankel2, hankel2_asymptotic, hankel2_asymptotic_series, hankel_completion, kernel,
    paper_kernel, KernelBasis, Ray,
};
