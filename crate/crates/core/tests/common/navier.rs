//! Closed-form single-harmonic solutions for simply supported cross-ply
//! plates, built from the same laminate section but none of the spline,
//! quadrature or constraint machinery.
//!
//! Trial fields for half-wave numbers (m, n), α = mπ/a, β = nπ/b:
//! u₀ = U cos αx sin βy, v₀ = V sin αx cos βy, w_b = W_b sin αx sin βy,
//! w_s = W_s sin αx sin βy. Every integral of a squared trigonometric
//! product over the plate equals ab/4, which is dropped throughout.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Matrix4, SMatrix, SymmetricEigen, Vector4};
use rpt_iga_core::laminate::{InertiaMatrix, SectionMatrices};

pub struct Harmonic {
    pub alpha: f64,
    pub beta: f64,
}

impl Harmonic {
    pub fn new(m: usize, n: usize, a: f64, b: f64) -> Self {
        Self {
            alpha: m as f64 * PI / a,
            beta: n as f64 * PI / b,
        }
    }

    /// Amplitudes of the 11 generalized strains per unit (U, V, W_b, W_s).
    fn strain_map(&self) -> SMatrix<f64, 11, 4> {
        let (a, b) = (self.alpha, self.beta);
        let mut p = SMatrix::<f64, 11, 4>::zeros();
        p[(0, 0)] = -a;
        p[(1, 1)] = -b;
        p[(2, 0)] = b;
        p[(2, 1)] = a;
        p[(3, 2)] = a * a;
        p[(4, 2)] = b * b;
        p[(5, 2)] = -2.0 * a * b;
        p[(6, 3)] = -a * a;
        p[(7, 3)] = -b * b;
        p[(8, 3)] = 2.0 * a * b;
        p[(9, 3)] = a;
        p[(10, 3)] = b;
        p
    }

    pub fn stiffness(&self, section: &SectionMatrices) -> Matrix4<f64> {
        let p = self.strain_map();
        p.transpose() * section.generalized() * p
    }

    pub fn mass(&self, inertia: &InertiaMatrix) -> Matrix4<f64> {
        let i0 = inertia.i0();
        let ru = SMatrix::<f64, 3, 4>::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -self.alpha, 0.0, 0.0, 0.0, 0.0, self.alpha);
        let rv = SMatrix::<f64, 3, 4>::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -self.beta, 0.0, 0.0, 0.0, 0.0, self.beta);
        let rw = SMatrix::<f64, 1, 4>::new(0.0, 0.0, 1.0, 1.0);
        ru.transpose() * i0 * ru + rv.transpose() * i0 * rv + rw.transpose() * rw * inertia.i1()
    }

    pub fn geometric(&self, nx0: f64, ny0: f64) -> Matrix4<f64> {
        let rw = SMatrix::<f64, 1, 4>::new(0.0, 0.0, 1.0, 1.0);
        rw.transpose() * rw * (nx0 * self.alpha * self.alpha + ny0 * self.beta * self.beta)
    }

    /// Amplitudes under the load q₀ sin(πx/a) sin(πy/b) (use m = n = 1).
    pub fn static_amplitudes(&self, section: &SectionMatrices, q0: f64) -> Vector4<f64> {
        self.stiffness(section)
            .lu()
            .solve(&Vector4::new(0.0, 0.0, q0, q0))
            .expect("nonsingular harmonic stiffness")
    }

    /// Generalized strains at (x, y) for amplitudes `amp`.
    pub fn strains_at(&self, amp: &Vector4<f64>, x: f64, y: f64) -> SMatrix<f64, 11, 1> {
        let (sx, cx) = (self.alpha * x).sin_cos();
        let (sy, cy) = (self.beta * y).sin_cos();
        let p = self.strain_map() * amp;
        let shape = [
            sx * sy, sx * sy, cx * cy,
            sx * sy, sx * sy, cx * cy,
            sx * sy, sx * sy, cx * cy,
            cx * sy, sx * cy,
        ];
        SMatrix::<f64, 11, 1>::from_fn(|i, _| p[i] * shape[i])
    }

    /// Squared circular frequencies, ascending.
    pub fn frequencies_squared(&self, section: &SectionMatrices, inertia: &InertiaMatrix) -> Vec<f64> {
        generalized_eigenvalues(&self.stiffness(section), &self.mass(inertia))
    }

    /// Buckling multiplier of the reference load (nx0, ny0), compression negative.
    pub fn buckling_load(&self, section: &SectionMatrices, nx0: f64, ny0: f64) -> f64 {
        // static condensation of the in-plane amplitudes, then a 2×2 pencil
        // whose geometric part is rank one
        let k = self.stiffness(section);
        let kg = -self.geometric(nx0, ny0);
        let kuu = k.fixed_view::<2, 2>(0, 0).into_owned();
        let kuw = k.fixed_view::<2, 2>(0, 2).into_owned();
        let kww = k.fixed_view::<2, 2>(2, 2).into_owned();
        let cond = kww - kuw.transpose() * kuu.try_inverse().expect("in-plane block") * kuw;
        let g = kg.fixed_view::<2, 2>(2, 2).into_owned();
        // rank-one g = c·[1 1]ᵀ[1 1]: λ = 1 / (c · eᵀ cond⁻¹ e)
        let e = nalgebra::Vector2::new(1.0, 1.0);
        let c = g[(0, 0)];
        let inv = cond.try_inverse().expect("condensed bending block");
        1.0 / (c * (e.transpose() * inv * e)[0])
    }
}

fn generalized_eigenvalues(k: &Matrix4<f64>, m: &Matrix4<f64>) -> Vec<f64> {
    let l = m.cholesky().expect("SPD harmonic mass").l();
    let li = l.try_inverse().expect("triangular inverse");
    let c = li * k * li.transpose();
    let c = (c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Lowest buckling multiplier over half-wave numbers up to `max_waves`,
/// with the wave numbers that attain it.
pub fn critical_buckling(
    section: &SectionMatrices,
    a: f64,
    b: f64,
    nx0: f64,
    ny0: f64,
    max_waves: usize,
) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for m in 1..=max_waves {
        for n in 1..=max_waves {
            let l = Harmonic::new(m, n, a, b).buckling_load(section, nx0, ny0);
            if l > 0.0 && l < best.0 {
                best = (l, m, n);
            }
        }
    }
    best
}
