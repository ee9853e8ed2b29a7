//! Lamina constitutive data, transverse shear shape functions and
//! through-thickness integration of the laminate section and inertia matrices.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix3, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

/// Gauss points per ply for through-thickness integrals.
pub const PLY_GAUSS_POINTS: usize = 16;

/// Orthotropic ply material in its principal axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orthotropic {
    pub e1: f64,
    pub e2: f64,
    pub g12: f64,
    pub g13: f64,
    pub g23: f64,
    pub nu12: f64,
    pub rho: f64,
}

impl Orthotropic {
    /// E1 = 25 E2, G12 = G13 = 0.5 E2, G23 = 0.2 E2, ν12 = 0.25, ρ = 1 (E2 = 1).
    pub fn material_i() -> Self {
        Self {
            e1: 25.0,
            e2: 1.0,
            g12: 0.5,
            g13: 0.5,
            g23: 0.2,
            nu12: 0.25,
            rho: 1.0,
        }
    }

    /// E1 = ratio·E2, G12 = G13 = 0.6 E2, G23 = 0.5 E2, ν12 = 0.25, ρ = 1 (E2 = 1).
    pub fn material_ii(e1_over_e2: f64) -> Self {
        Self {
            e1: e1_over_e2,
            e2: 1.0,
            g12: 0.6,
            g13: 0.6,
            g23: 0.5,
            nu12: 0.25,
            rho: 1.0,
        }
    }

    pub fn isotropic(e: f64, nu: f64, rho: f64) -> Self {
        let g = e / (2.0 * (1.0 + nu));
        Self {
            e1: e,
            e2: e,
            g12: g,
            g13: g,
            g23: g,
            nu12: nu,
            rho,
        }
    }

    pub fn nu21(&self) -> f64 {
        self.nu12 * self.e2 / self.e1
    }

    /// Every modulus multiplied by `s`; density and Poisson ratio unchanged.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            e1: self.e1 * s,
            e2: self.e2 * s,
            g12: self.g12 * s,
            g13: self.g13 * s,
            g23: self.g23 * s,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        let moduli = [self.e1, self.e2, self.g12, self.g13, self.g23];
        if moduli.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::Material(format!(
                "moduli must be positive and finite: {self:?}"
            )));
        }
        if self.rho.is_nan() || self.rho < 0.0 {
            return Err(Error::Material(format!("negative density {}", self.rho)));
        }
        if 1.0 - self.nu12 * self.nu21() <= 0.0 {
            return Err(Error::Material(format!(
                "1 - nu12*nu21 = {} is not positive",
                1.0 - self.nu12 * self.nu21()
            )));
        }
        Ok(())
    }
}

/// Plane-stress stiffness of a ply. The in-plane block acts on
/// `(ε_xx, ε_yy, γ_xy)`, the shear block on `(γ_xz, γ_yz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlyStiffness {
    pub inplane: Matrix3<f64>,
    pub shear: Matrix2<f64>,
}

/// Reduced stiffness in material axes. The shear block is `diag(G13, G23)`,
/// i.e. Q55 on the x–z and Q44 on the y–z component.
pub fn reduced_stiffness(mat: &Orthotropic) -> Result<PlyStiffness> {
    mat.validate()?;
    let den = 1.0 - mat.nu12 * mat.nu21();
    let q11 = mat.e1 / den;
    let q22 = mat.e2 / den;
    let q12 = mat.nu12 * mat.e2 / den;
    Ok(PlyStiffness {
        inplane: Matrix3::new(q11, q12, 0.0, q12, q22, 0.0, 0.0, 0.0, mat.g12),
        shear: Matrix2::new(mat.g13, 0.0, 0.0, mat.g23),
    })
}

/// Rotate material-axis stiffness to plate axes for a fiber angle in degrees.
///
/// `Q̄ = Tᵀ Q T` with `T` the engineering-strain transformation from plate to
/// material axes.
pub fn transform_stiffness(q: &PlyStiffness, theta_deg: f64) -> PlyStiffness {
    let t = theta_deg.to_radians();
    let (s, c) = t.sin_cos();
    let strain = Matrix3::new(
        c * c,
        s * s,
        c * s,
        s * s,
        c * c,
        -c * s,
        -2.0 * c * s,
        2.0 * c * s,
        c * c - s * s,
    );
    let rot = Matrix2::new(c, s, -s, c);
    let inplane = strain.transpose() * q.inplane * strain;
    let shear = rot.transpose() * q.shear * rot;
    PlyStiffness {
        inplane: 0.5 * (inplane + inplane.transpose()),
        shear: 0.5 * (shear + shear.transpose()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lamina {
    pub material: Orthotropic,
    pub theta_deg: f64,
    pub thickness_fraction: f64,
}

impl Lamina {
    /// Ply stiffness in plate axes.
    pub fn stiffness(&self) -> Result<PlyStiffness> {
        Ok(transform_stiffness(
            &reduced_stiffness(&self.material)?,
            self.theta_deg,
        ))
    }
}

/// Which ply to use for a point that lies exactly on a ply interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterfaceSide {
    #[default]
    Below,
    Above,
}

/// Plies stacked bottom (z = -h/2) to top (z = +h/2).
#[derive(Debug, Clone, PartialEq)]
pub struct Layup {
    laminas: Vec<Lamina>,
    thickness: f64,
}

impl Layup {
    pub fn new(laminas: Vec<Lamina>, thickness: f64) -> Result<Self> {
        if laminas.is_empty() {
            return Err(Error::Material("layup has no plies".into()));
        }
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::Material(format!("invalid thickness {thickness}")));
        }
        for l in &laminas {
            if !(l.thickness_fraction > 0.0 && l.thickness_fraction <= 1.0) {
                return Err(Error::Material(format!(
                    "thickness fraction {} not in (0, 1]",
                    l.thickness_fraction
                )));
            }
            l.material.validate()?;
        }
        let total: f64 = laminas.iter().map(|l| l.thickness_fraction).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Material(format!(
                "thickness fractions sum to {total}, not 1"
            )));
        }
        Ok(Self { laminas, thickness })
    }

    /// Equal-thickness plies of one material at the given angles (bottom first).
    pub fn equal_plies(material: Orthotropic, angles_deg: &[f64], thickness: f64) -> Result<Self> {
        let frac = 1.0 / angles_deg.len().max(1) as f64;
        Self::new(
            angles_deg
                .iter()
                .map(|&theta_deg| Lamina {
                    material,
                    theta_deg,
                    thickness_fraction: frac,
                })
                .collect(),
            thickness,
        )
    }

    pub fn laminas(&self) -> &[Lamina] {
        &self.laminas
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    /// Ply interface coordinates `z_0 = -h/2 < … < z_N = h/2`.
    pub fn interfaces(&self) -> Vec<f64> {
        let h = self.thickness;
        let mut z = Vec::with_capacity(self.laminas.len() + 1);
        z.push(-0.5 * h);
        let mut acc = 0.0;
        for l in &self.laminas {
            acc += l.thickness_fraction;
            z.push(-0.5 * h + acc * h);
        }
        *z.last_mut().unwrap() = 0.5 * h;
        z
    }

    /// Index of the ply containing `z`.
    pub fn ply_at(&self, z: f64, side: InterfaceSide) -> Result<usize> {
        let h = self.thickness;
        let tol = 1e-12 * h;
        if z.abs() > 0.5 * h + tol {
            return Err(Error::Domain(format!(
                "z = {z} outside thickness [-{}, {}]",
                0.5 * h,
                0.5 * h
            )));
        }
        let zs = self.interfaces();
        let n = self.laminas.len();
        for k in 0..n {
            let (lo, hi) = (zs[k], zs[k + 1]);
            let on_top = (z - hi).abs() <= tol;
            let on_bottom = (z - lo).abs() <= tol;
            if on_top {
                return Ok(match side {
                    InterfaceSide::Above if k + 1 < n => k + 1,
                    _ => k,
                });
            }
            if on_bottom && k == 0 {
                return Ok(0);
            }
            if z > lo && z < hi {
                return Ok(k);
            }
        }
        Ok(n - 1)
    }

    /// The same plies in reverse order (the laminate flipped about its midplane).
    pub fn mirrored(&self) -> Self {
        let mut laminas = self.laminas.clone();
        laminas.reverse();
        Self {
            laminas,
            thickness: self.thickness,
        }
    }

    pub fn with_scaled_moduli(&self, s: f64) -> Self {
        Self {
            laminas: self
                .laminas
                .iter()
                .map(|l| Lamina {
                    material: l.material.scaled(s),
                    ..*l
                })
                .collect(),
            thickness: self.thickness,
        }
    }

    /// Integrate `f(ply, z)` through the thickness ply by ply.
    fn integrate<const N: usize>(&self, mut f: impl FnMut(usize, f64) -> [f64; N]) -> [f64; N] {
        let rule = GaussRule::legendre(PLY_GAUSS_POINTS);
        let zs = self.interfaces();
        let mut acc = [0.0; N];
        for k in 0..self.laminas.len() {
            for (z, w) in rule.mapped(zs[k], zs[k + 1]) {
                let v = f(k, z);
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += w * x;
                }
            }
        }
        acc
    }
}

/// Transverse shear distribution functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ShearModel {
    /// Third-order polynomial, `f = z − 4z³/(3h²)`.
    Reddy,
    /// `f = 5z/4 − 5z³/(3h²)`.
    Shimpi,
    /// Exponential, `f = z·exp(−2(z/h)²)`.
    Karama,
    /// Sinusoidal, `f = sin(πz/h)`.
    Arya,
    /// Fifth-order polynomial, `f = 7z/8 − 2z³/h² + 2z⁵/h⁴`.
    FiSdt,
}

/// `f`, `f′`, and the higher-order part `g = f − z` with its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearFunctions {
    pub f: f64,
    pub df: f64,
    pub g: f64,
    pub dg: f64,
}

impl ShearModel {
    pub const ALL: [ShearModel; 5] = [
        ShearModel::Reddy,
        ShearModel::Shimpi,
        ShearModel::Arya,
        ShearModel::Karama,
        ShearModel::FiSdt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ShearModel::Reddy => "reddy",
            ShearModel::Shimpi => "shimpi",
            ShearModel::Karama => "karama",
            ShearModel::Arya => "arya",
            ShearModel::FiSdt => "fisdt",
        }
    }

    /// Values at `z` without the thickness range check.
    pub fn eval(&self, z: f64, h: f64) -> ShearFunctions {
        let (f, df) = match self {
            ShearModel::Reddy => (
                z - 4.0 * z.powi(3) / (3.0 * h * h),
                1.0 - 4.0 * z * z / (h * h),
            ),
            ShearModel::Shimpi => (
                1.25 * z - 5.0 * z.powi(3) / (3.0 * h * h),
                1.25 * (1.0 - 4.0 * z * z / (h * h)),
            ),
            ShearModel::Karama => {
                let e = (-2.0 * (z / h).powi(2)).exp();
                (z * e, (1.0 - 4.0 * z * z / (h * h)) * e)
            }
            ShearModel::Arya => {
                let k = PI / h;
                ((k * z).sin(), k * (k * z).cos())
            }
            ShearModel::FiSdt => (
                0.875 * z - 2.0 * z.powi(3) / (h * h) + 2.0 * z.powi(5) / h.powi(4),
                0.875 - 6.0 * z * z / (h * h) + 10.0 * z.powi(4) / h.powi(4),
            ),
        };
        ShearFunctions {
            f,
            df,
            g: f - z,
            dg: df - 1.0,
        }
    }
}

impl fmt::Display for ShearModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl TryFrom<String> for ShearModel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ShearModel> for String {
    fn from(m: ShearModel) -> Self {
        m.name().to_string()
    }
}

impl FromStr for ShearModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        ShearModel::ALL
            .into_iter()
            .find(|m| m.name() == key || (key == "nguyen-xuan" && *m == ShearModel::FiSdt))
            .ok_or_else(|| {
                let names: Vec<_> = ShearModel::ALL.iter().map(|m| m.name()).collect();
                Error::Config(format!(
                    "unknown shear model `{}`; valid models: {}",
                    s.trim(),
                    names.join(", ")
                ))
            })
    }
}

/// Shear shape functions at `z`, checked against the plate thickness.
pub fn shear_functions(model: ShearModel, z: f64, h: f64) -> Result<ShearFunctions> {
    if z.abs() > 0.5 * h * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "z = {z} outside thickness [-{}, {}]",
            0.5 * h,
            0.5 * h
        )));
    }
    Ok(model.eval(z, h))
}

/// Through-thickness stiffness resultants.
///
/// `A, B, D, E, F, H` weight the in-plane stiffness by `1, z, z², g, z·g, g²`;
/// `ds` weights the shear block by `f′²` and acts on `(γ_xz, γ_yz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionMatrices {
    pub a: Matrix3<f64>,
    pub b: Matrix3<f64>,
    pub d: Matrix3<f64>,
    pub e: Matrix3<f64>,
    pub f: Matrix3<f64>,
    pub h: Matrix3<f64>,
    pub ds: Matrix2<f64>,
}

/// Generalized constitutive matrix acting on `(ε₀, κ_b, κ_s, ε_s)`.
pub type GeneralizedStiffness = SMatrix<f64, 11, 11>;

impl SectionMatrices {
    pub fn generalized(&self) -> GeneralizedStiffness {
        let mut m = GeneralizedStiffness::zeros();
        let blocks = [
            [&self.a, &self.b, &self.e],
            [&self.b, &self.d, &self.f],
            [&self.e, &self.f, &self.h],
        ];
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, blk) in row.iter().enumerate() {
                m.fixed_view_mut::<3, 3>(3 * bi, 3 * bj).copy_from(*blk);
            }
        }
        m.fixed_view_mut::<2, 2>(9, 9).copy_from(&self.ds);
        m
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a: self.a * s,
            b: self.b * s,
            d: self.d * s,
            e: self.e * s,
            f: self.f * s,
            h: self.h * s,
            ds: self.ds * s,
        }
    }
}

pub fn section_matrices(layup: &Layup, model: ShearModel) -> Result<SectionMatrices> {
    let stiff = layup
        .laminas()
        .iter()
        .map(Lamina::stiffness)
        .collect::<Result<Vec<_>>>()?;
    let h = layup.thickness();
    // 6 in-plane weights × 9 entries, then 4 shear entries
    let acc = layup.integrate::<58>(|k, z| {
        let sf = model.eval(z, h);
        let weights = [1.0, z, z * z, sf.g, z * sf.g, sf.g * sf.g];
        let q = &stiff[k].inplane;
        let mut out = [0.0; 58];
        for (wi, w) in weights.iter().enumerate() {
            for (e, v) in q.iter().enumerate() {
                out[9 * wi + e] = w * v;
            }
        }
        for (e, v) in stiff[k].shear.iter().enumerate() {
            out[54 + e] = sf.df * sf.df * v;
        }
        out
    });
    let m3 = |wi: usize| {
        let m = Matrix3::from_column_slice(&acc[9 * wi..9 * wi + 9]);
        0.5 * (m + m.transpose())
    };
    let ds = Matrix2::from_column_slice(&acc[54..58]);
    Ok(SectionMatrices {
        a: m3(0),
        b: m3(1),
        d: m3(2),
        e: m3(3),
        f: m3(4),
        h: m3(5),
        ds: 0.5 * (ds + ds.transpose()),
    })
}

/// Mass moments `I1…I6` of the density weighted by `1, z, z², g, z·g, g²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaMatrix {
    pub i: [f64; 6],
}

impl InertiaMatrix {
    pub fn i1(&self) -> f64 {
        self.i[0]
    }
    pub fn i2(&self) -> f64 {
        self.i[1]
    }
    pub fn i3(&self) -> f64 {
        self.i[2]
    }
    pub fn i4(&self) -> f64 {
        self.i[3]
    }
    pub fn i5(&self) -> f64 {
        self.i[4]
    }
    pub fn i6(&self) -> f64 {
        self.i[5]
    }

    /// `[[I1, I2, I4], [I2, I3, I5], [I4, I5, I6]]`, acting on `(u, −w_b', w_s')`.
    pub fn i0(&self) -> Matrix3<f64> {
        let [i1, i2, i3, i4, i5, i6] = self.i;
        Matrix3::new(i1, i2, i4, i2, i3, i5, i4, i5, i6)
    }
}

pub fn inertia_matrix(layup: &Layup, model: ShearModel) -> InertiaMatrix {
    let h = layup.thickness();
    let rho: Vec<f64> = layup.laminas().iter().map(|l| l.material.rho).collect();
    let i = layup.integrate::<6>(|k, z| {
        let g = model.eval(z, h).g;
        let r = rho[k];
        [r, r * z, r * z * z, r * g, r * z * g, r * g * g]
    });
    InertiaMatrix { i }
}
