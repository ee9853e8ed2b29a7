//! Recovery of displacements and stresses, benchmark normalizations, and
//! CSV emission of thickness profiles and mode lines.

use std::fs::File;
use std::path::Path;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::assembly::{generalized_strains, Dof, DofMap};
use crate::error::{Error, Result};
use crate::laminate::{InterfaceSide, Layup, ShearModel};
use crate::nurbs::{BasisEval, NurbsPatch};

/// Displacement unknowns interpolated at a point, with `w = w_b + w_s`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Displacement {
    pub u0: f64,
    pub v0: f64,
    pub wb: f64,
    pub ws: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressState {
    pub sigma_xx: f64,
    pub sigma_yy: f64,
    pub tau_xy: f64,
    pub tau_xz: f64,
    pub tau_yz: f64,
}

fn basis_at(patch: &NurbsPatch, x: f64, y: f64, deriv_order: usize) -> Result<BasisEval> {
    let (xi, eta) = patch.parametric_coords(x, y)?;
    patch.eval_basis(xi, eta, deriv_order)
}

fn check_len(dofs: &DofMap, q: &[f64]) -> Result<()> {
    if q.len() != dofs.total() {
        return Err(Error::Argument(format!(
            "solution has {} entries, expected {}",
            q.len(),
            dofs.total()
        )));
    }
    Ok(())
}

fn interpolate(basis: &BasisEval, dofs: &DofMap, q: &[f64]) -> Displacement {
    let mut d = Displacement::default();
    for (&a, &r) in basis.active_indices.iter().zip(&basis.values) {
        d.u0 += r * q[dofs.index(a, Dof::U0)];
        d.v0 += r * q[dofs.index(a, Dof::V0)];
        d.wb += r * q[dofs.index(a, Dof::Wb)];
        d.ws += r * q[dofs.index(a, Dof::Ws)];
    }
    d.w = d.wb + d.ws;
    d
}

/// Field values of a full-length solution vector at physical `(x, y)`.
pub fn displacement_at(
    patch: &NurbsPatch,
    dofs: &DofMap,
    q: &[f64],
    x: f64,
    y: f64,
) -> Result<Displacement> {
    check_len(dofs, q)?;
    Ok(interpolate(&basis_at(patch, x, y, 0)?, dofs, q))
}

/// Constitutive stresses at `(x, y, z)` in plate axes. `side` picks the ply
/// when `z` lies on an interface.
#[allow(clippy::too_many_arguments)]
pub fn stress_at(
    patch: &NurbsPatch,
    dofs: &DofMap,
    q: &[f64],
    layup: &Layup,
    model: ShearModel,
    x: f64,
    y: f64,
    z: f64,
    side: InterfaceSide,
) -> Result<StressState> {
    check_len(dofs, q)?;
    let ply = layup.ply_at(z, side)?;
    let basis = basis_at(patch, x, y, 2)?;
    let eps = generalized_strains(&basis, dofs, q);
    stress_from_strains(layup, model, ply, z, eps.as_slice())
}

/// Stresses in ply `ply` at height `z` from the 11 generalized strains.
pub fn stress_from_strains(
    layup: &Layup,
    model: ShearModel,
    ply: usize,
    z: f64,
    eps: &[f64],
) -> Result<StressState> {
    let h = layup.thickness();
    let sf = crate::laminate::shear_functions(model, z, h)?;
    let c = layup.laminas()[ply].stiffness()?;
    let e: [f64; 3] =
        std::array::from_fn(|i| eps[i] + z * eps[3 + i] + sf.g * eps[6 + i]);
    let gamma = [sf.df * eps[9], sf.df * eps[10]];
    let s: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| c.inplane[(i, j)] * e[j]).sum());
    let t: [f64; 2] = std::array::from_fn(|i| (0..2).map(|j| c.shear[(i, j)] * gamma[j]).sum());
    Ok(StressState {
        sigma_xx: s[0],
        sigma_yy: s[1],
        tau_xy: s[2],
        tau_xz: t[0],
        tau_yz: t[1],
    })
}

/// Normalization constants of the benchmark results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub a: f64,
    pub h: f64,
    pub e2: f64,
    pub rho: f64,
    pub q0: f64,
}

impl Scales {
    /// `w̄ = 100 w E₂ h³ / (q₀ a⁴)`
    pub fn deflection(&self, w: f64) -> f64 {
        100.0 * w * self.e2 * self.h.powi(3) / (self.q0 * self.a.powi(4))
    }

    pub fn deflection_raw(&self, w_bar: f64) -> f64 {
        w_bar * self.q0 * self.a.powi(4) / (100.0 * self.e2 * self.h.powi(3))
    }

    /// `σ̄ = σ h² / (q₀ a²)`
    pub fn stress(&self, sigma: f64) -> f64 {
        sigma * self.h * self.h / (self.q0 * self.a * self.a)
    }

    pub fn stress_raw(&self, sigma_bar: f64) -> f64 {
        sigma_bar * self.q0 * self.a * self.a / (self.h * self.h)
    }

    /// `τ̄ = τ h / (q₀ a)`
    pub fn shear(&self, tau: f64) -> f64 {
        tau * self.h / (self.q0 * self.a)
    }

    pub fn shear_raw(&self, tau_bar: f64) -> f64 {
        tau_bar * self.q0 * self.a / self.h
    }

    /// `ω̄ = ω a² / h · √(ρ / E₂)`
    pub fn frequency(&self, omega: f64) -> f64 {
        omega * self.a * self.a / self.h * (self.rho / self.e2).sqrt()
    }

    pub fn frequency_raw(&self, omega_bar: f64) -> f64 {
        omega_bar * self.h / (self.a * self.a) * (self.e2 / self.rho).sqrt()
    }

    /// `λ̄ = λ a² / (E₂ h³)`
    pub fn buckling(&self, lambda: f64) -> f64 {
        lambda * self.a * self.a / (self.e2 * self.h.powi(3))
    }

    pub fn buckling_raw(&self, lambda_bar: f64) -> f64 {
        lambda_bar * self.e2 * self.h.powi(3) / (self.a * self.a)
    }
}

/// One sample of a through-thickness stress profile (normalized).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub z_over_h: f64,
    pub sigma_xx: f64,
    pub sigma_yy: f64,
    pub tau_xy: f64,
    pub tau_xz: f64,
    pub tau_yz: f64,
}

/// `num_z` evenly spaced samples in every ply, both ends included, so each
/// interface appears twice (once per adjacent ply).
#[allow(clippy::too_many_arguments)]
pub fn thickness_profile(
    patch: &NurbsPatch,
    dofs: &DofMap,
    q: &[f64],
    layup: &Layup,
    model: ShearModel,
    scales: &Scales,
    x: f64,
    y: f64,
    num_z: usize,
) -> Result<Vec<ProfileRow>> {
    check_len(dofs, q)?;
    if num_z < 2 {
        return Err(Error::Argument("profile needs at least 2 points per ply".into()));
    }
    let basis = basis_at(patch, x, y, 2)?;
    let eps = generalized_strains(&basis, dofs, q);
    let zs = layup.interfaces();
    let h = layup.thickness();
    let mut rows = Vec::with_capacity(num_z * layup.laminas().len());
    for ply in 0..layup.laminas().len() {
        for i in 0..num_z {
            let t = i as f64 / (num_z - 1) as f64;
            let z = if i + 1 == num_z { zs[ply + 1] } else { zs[ply] + t * (zs[ply + 1] - zs[ply]) };
            let s = stress_from_strains(layup, model, ply, z, eps.as_slice())?;
            rows.push(ProfileRow {
                z_over_h: z / h,
                sigma_xx: scales.stress(s.sigma_xx),
                sigma_yy: scales.stress(s.sigma_yy),
                tau_xy: scales.stress(s.tau_xy),
                tau_xz: scales.shear(s.tau_xz),
                tau_yz: scales.shear(s.tau_yz),
            });
        }
    }
    Ok(rows)
}

/// Sampling line across the plate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AxisLine {
    /// Along x at `y = b/2`.
    #[default]
    #[serde(rename = "y_mid")]
    MidY,
    /// Along y at `x = a/2`.
    #[serde(rename = "x_mid")]
    MidX,
}

impl AxisLine {
    pub fn name(&self) -> &'static str {
        match self {
            AxisLine::MidY => "y_mid",
            AxisLine::MidX => "x_mid",
        }
    }
}

pub const MODELINE_SAMPLES: usize = 101;

/// Field values at 101 evenly spaced points of the line; the first element
/// of each pair is the running coordinate.
pub fn modeline(
    patch: &NurbsPatch,
    dofs: &DofMap,
    q: &[f64],
    line: AxisLine,
) -> Result<Vec<(f64, Displacement)>> {
    check_len(dofs, q)?;
    let rect = patch.affine_rect().ok_or_else(|| {
        Error::Geometry("mode lines need a rectangular patch with an affine map".into())
    })?;
    let n = MODELINE_SAMPLES - 1;
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let (s, x, y) = match line {
                AxisLine::MidY => {
                    let x = rect.x0 + t * rect.width();
                    (x, x, 0.5 * (rect.y0 + rect.y1))
                }
                AxisLine::MidX => {
                    let y = rect.y0 + t * rect.height();
                    (y, 0.5 * (rect.x0 + rect.x1), y)
                }
            };
            Ok((s, displacement_at(patch, dofs, q, x, y)?))
        })
        .collect()
}

/// Number of interior sign changes of a sampled line, ignoring values below
/// `1e-6` of the line maximum.
pub fn sign_changes(values: &[f64]) -> usize {
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut last = 0.0;
    let mut count = 0;
    for &v in values {
        if v.abs() <= 1e-6 * top {
            continue;
        }
        if last * v < 0.0 {
            count += 1;
        }
        last = v;
    }
    count
}

fn quad_form(a: &Mat<f64>, q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (j, &qj) in q.iter().enumerate() {
        if qj == 0.0 {
            continue;
        }
        for (i, &qi) in q.iter().enumerate() {
            s += qi * a[(i, j)] * qj;
        }
    }
    s
}

/// Share of the kinetic energy of mode `q` carried by transverse motion,
/// given the full and transverse-only mass matrices.
pub fn transverse_fraction(m: &Mat<f64>, m_transverse: &Mat<f64>, q: &[f64]) -> f64 {
    let total = quad_form(m, q);
    if total <= 0.0 {
        return 0.0;
    }
    quad_form(m_transverse, q) / total
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a numeric table with a header row; values use 17 significant digits.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_f64(v)))
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write a table whose cells are already formatted.
pub fn write_csv_records(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub const PROFILE_HEADER: [&str; 6] = ["z_over_h", "sigma_xx", "sigma_yy", "tau_xy", "tau_xz", "tau_yz"];
pub const MODELINE_HEADER: [&str; 6] = ["s", "u0", "v0", "wb", "ws", "w"];

pub fn write_profile(path: &Path, rows: &[ProfileRow]) -> Result<()> {
    let data: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.z_over_h, r.sigma_xx, r.sigma_yy, r.tau_xy, r.tau_xz, r.tau_yz])
        .collect();
    write_csv(path, &PROFILE_HEADER, &data)
}

pub fn write_modeline(path: &Path, rows: &[(f64, Displacement)]) -> Result<()> {
    let data: Vec<Vec<f64>> = rows
        .iter()
        .map(|(s, d)| vec![*s, d.u0, d.v0, d.wb, d.ws, d.w])
        .collect();
    write_csv(path, &MODELINE_HEADER, &data)
}
