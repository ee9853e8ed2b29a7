//! Static, free-vibration and buckling solutions of a reduced system.
//!
//! Both eigenproblems are brought to standard symmetric form with a
//! Cholesky factor `L Lᵀ` of the positive definite matrix and solved densely.
//! Modes are returned as full-length vectors (zeros at constrained
//! unknowns), scaled so the control value of `w_b + w_s` with the largest
//! magnitude is `+1`.

use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::linalg::solvers::Solve;
use faer::{Mat, Par, Side};

use crate::assembly::{Dof, DofMap};
use crate::boundary::ReducedSystem;
use crate::error::{Error, Result};

const STATIC_RESIDUAL: f64 = 1e-10;
const EIGEN_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ModalResult {
    /// Circular frequencies of the elastic modes, ascending.
    pub frequencies: Vec<f64>,
    pub modes: Vec<Vec<f64>>,
    /// Zero-frequency rigid motions skipped before the first reported mode.
    pub rigid_modes: usize,
}

#[derive(Debug, Clone)]
pub struct BucklingResult {
    /// Positive load multipliers, ascending.
    pub critical_loads: Vec<f64>,
    pub modes: Vec<Vec<f64>>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn matvec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += a[(i, j)] * xj;
        }
    }
    y
}

/// Solve `K q = F`; returns the full-length displacement vector.
pub fn solve_static(sys: &ReducedSystem) -> Result<Vec<f64>> {
    let f = sys
        .f
        .as_ref()
        .ok_or_else(|| Error::Argument("static solve needs a load vector".into()))?;
    let llt = sys.k.llt(Side::Lower).map_err(|_| {
        Error::Constraint(
            "stiffness matrix is not positive definite; the supports do not prevent rigid motion"
                .into(),
        )
    })?;
    let q = llt.solve(f);
    let q: Vec<f64> = q.iter().copied().collect();
    let fv: Vec<f64> = f.iter().copied().collect();
    let r: Vec<f64> = matvec(&sys.k, &q).iter().zip(&fv).map(|(a, b)| a - b).collect();
    if norm(&r) > STATIC_RESIDUAL * norm(&fv) {
        return Err(Error::Constraint(format!(
            "static residual {:.3e} exceeds tolerance; stiffness is ill-conditioned",
            norm(&r) / norm(&fv)
        )));
    }
    Ok(sys.expand(&q))
}

/// Eigenpairs of `A y = μ B y` for symmetric `A` and SPD `B` (given its
/// lower Cholesky factor), `μ` ascending, `y` B-orthonormal.
fn generalized_symmetric_eigen(a: &Mat<f64>, l: faer::MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    // C = L⁻¹ A L⁻ᵀ
    let mut x = a.clone();
    solve_lower_triangular_in_place(l, x.as_mut(), Par::Seq);
    let mut c = x.transpose().to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    let n = c.nrows();
    for j in 0..n {
        for i in j + 1..n {
            let s = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = s;
            c[(j, i)] = s;
        }
    }
    let evd = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("symmetric eigensolver failed: {e:?}")))?;
    let mu: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let mut y = evd.U().to_owned();
    solve_upper_triangular_in_place(l.transpose(), y.as_mut(), Par::Seq);
    Ok((mu, y))
}

/// Scale a full-length mode so its largest-magnitude total deflection is +1.
/// Falls back to the largest entry overall for modes with no deflection.
pub fn normalize_mode(dofs: &DofMap, q: &mut [f64]) {
    let mut pick = 0.0f64;
    for a in 0..dofs.num_points() {
        let w = q[dofs.index(a, Dof::Wb)] + q[dofs.index(a, Dof::Ws)];
        if w.abs() > pick.abs() * (1.0 + 1e-12) {
            pick = w;
        }
    }
    if pick.abs() <= 1e-12 * q.iter().fold(0.0f64, |m, v| m.max(v.abs())) {
        pick = q.iter().copied().fold(0.0, |m: f64, v| if v.abs() > m.abs() { v } else { m });
    }
    if pick != 0.0 {
        for v in q.iter_mut() {
            *v /= pick;
        }
    }
}

/// Normwise backward error `‖K y − λ B y‖ / ((‖K‖ + |λ| ‖B‖) ‖y‖)` with
/// Frobenius matrix norms.
fn check_residual(k: &Mat<f64>, b: &Mat<f64>, lambda: f64, y: &[f64], what: &str) -> Result<()> {
    let ky = matvec(k, y);
    let by = matvec(b, y);
    let r: Vec<f64> = ky.iter().zip(&by).map(|(p, q)| p - lambda * q).collect();
    let scale = (k.norm_l2() + lambda.abs() * b.norm_l2()) * norm(y);
    let backward = norm(&r) / scale;
    if backward.is_nan() || backward > EIGEN_RESIDUAL {
        return Err(Error::Eigen(format!(
            "{what} eigen-residual {backward:.3e} exceeds tolerance"
        )));
    }
    Ok(())
}

fn collect_modes(sys: &ReducedSystem, y: &Mat<f64>, cols: &[usize]) -> Vec<Vec<f64>> {
    cols.iter()
        .map(|&c| {
            let red: Vec<f64> = y.col(c).iter().copied().collect();
            let mut full = sys.expand(&red);
            normalize_mode(&sys.dofs, &mut full);
            full
        })
        .collect()
}

/// Lowest `count` nonzero free-vibration frequencies of `(K − ω² M) q = 0`.
pub fn solve_modal(sys: &ReducedSystem, count: usize) -> Result<ModalResult> {
    if count == 0 {
        return Err(Error::Argument("mode count must be at least 1".into()));
    }
    let m = sys
        .m
        .as_ref()
        .ok_or_else(|| Error::Argument("modal solve needs a mass matrix".into()))?;
    let llt = m.llt(Side::Lower).map_err(|_| {
        Error::Inertia("mass matrix is not positive definite (zero or invalid density?)".into())
    })?;
    let (mu, y) = generalized_symmetric_eigen(&sys.k, llt.L())?;
    let top = mu.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // rigid motions left by the supports have ω² at roundoff level
    let rigid_tol = 1e-10 * top;
    if let Some(&w2) = mu.first().filter(|&&w2| w2 < -rigid_tol) {
        return Err(Error::Eigen(format!(
            "negative squared frequency {w2:.3e}; stiffness is not positive semidefinite"
        )));
    }
    let rigid_modes = mu.iter().take_while(|&&w2| w2 <= rigid_tol).count();
    let cols: Vec<usize> = (rigid_modes..mu.len()).take(count).collect();
    let mut frequencies = Vec::with_capacity(cols.len());
    for &i in &cols {
        let col: Vec<f64> = y.col(i).iter().copied().collect();
        check_residual(&sys.k, m, mu[i], &col, "modal")?;
        frequencies.push(mu[i].sqrt());
    }
    Ok(ModalResult {
        frequencies,
        modes: collect_modes(sys, &y, &cols),
        rigid_modes,
    })
}

/// Lowest `count` positive multipliers of the pre-buckling load in
/// `(K − λ K_g⁻) q = 0`, where `K_g⁻ = −K_g` so that a compressive reference
/// load gives positive `λ`.
pub fn solve_buckling(sys: &ReducedSystem, count: usize) -> Result<BucklingResult> {
    if count == 0 {
        return Err(Error::Argument("mode count must be at least 1".into()));
    }
    let kg = sys
        .kg
        .as_ref()
        .ok_or_else(|| Error::Argument("buckling solve needs a geometric stiffness".into()))?;
    let neg = kg * faer::Scale(-1.0);
    let llt = sys.k.llt(Side::Lower).map_err(|_| {
        Error::Constraint(
            "stiffness matrix is not positive definite; the supports do not prevent rigid motion"
                .into(),
        )
    })?;
    // K_g⁻ y = μ K y with λ = 1/μ: the largest positive μ are the critical loads
    let (mu, y) = generalized_symmetric_eigen(&neg, llt.L())?;
    let top = mu.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut cols = Vec::new();
    let mut critical_loads = Vec::new();
    for i in (0..mu.len()).rev() {
        if cols.len() == count || mu[i] <= 1e-12 * top {
            break;
        }
        let lambda = 1.0 / mu[i];
        let col: Vec<f64> = y.col(i).iter().copied().collect();
        check_residual(&sys.k, &neg, lambda, &col, "buckling")?;
        cols.push(i);
        critical_loads.push(lambda);
    }
    if cols.is_empty() {
        return Err(Error::LoadDirection(
            "no positive buckling load; the pre-buckling state has no compression".into(),
        ));
    }
    Ok(BucklingResult {
        critical_loads,
        modes: collect_modes(sys, &y, &cols),
    })
}
