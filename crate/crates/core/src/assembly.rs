//! Strain–displacement operators and global matrix assembly.
//!
//! Each control point carries four unknowns `(u₀, v₀, w_b, w_s)`. The
//! generalized strain vector is `(ε₀, κ_b, κ_s, ε_s)` with
//!
//! ```text
//! ε₀  = (u₀,x, v₀,y, u₀,y + v₀,x)
//! κ_b = −(w_b,xx, w_b,yy, 2 w_b,xy)
//! κ_s =  (w_s,xx, w_s,yy, 2 w_s,xy)
//! ε_s =  (w_s,x, w_s,y)
//! ```
//!
//! Elements are nonempty knot-span pairs integrated with a full
//! `(p+1) × (q+1)` Gauss rule.

use std::f64::consts::PI;

use faer::{Col, Mat};
use nalgebra::{DMatrix, Matrix2, Matrix2x4, Matrix3x4, SMatrix};

use crate::error::{Error, Result};
use crate::laminate::{InertiaMatrix, SectionMatrices};
use crate::nurbs::{BasisEval, Element, NurbsPatch};
use crate::quadrature::GaussRule;

/// Local unknown at a control point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dof {
    U0 = 0,
    V0 = 1,
    Wb = 2,
    Ws = 3,
}

impl Dof {
    pub const ALL: [Dof; 4] = [Dof::U0, Dof::V0, Dof::Wb, Dof::Ws];
}

/// Interleaved numbering: global index `4·A + dof`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofMap {
    num_points: usize,
}

impl DofMap {
    pub const PER_POINT: usize = 4;

    pub fn new(num_points: usize) -> Self {
        Self { num_points }
    }

    pub fn for_patch(patch: &NurbsPatch) -> Self {
        Self::new(patch.num_points())
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn total(&self) -> usize {
        Self::PER_POINT * self.num_points
    }

    pub fn index(&self, point: usize, dof: Dof) -> usize {
        debug_assert!(point < self.num_points);
        Self::PER_POINT * point + dof as usize
    }

    pub fn split(&self, global: usize) -> (usize, Dof) {
        (global / Self::PER_POINT, Dof::ALL[global % Self::PER_POINT])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadKind {
    Uniform,
    /// `q₀ sin(πx/a) sin(πy/b)`
    Sinusoidal,
}

/// Transverse pressure on the plate `[0, a] × [0, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSpec {
    pub kind: LoadKind,
    pub q0: f64,
    pub a: f64,
    pub b: f64,
}

impl LoadSpec {
    pub fn intensity(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            LoadKind::Uniform => self.q0,
            LoadKind::Sinusoidal => self.q0 * (PI * x / self.a).sin() * (PI * y / self.b).sin(),
        }
    }
}

/// In-plane force resultants before buckling; compression is negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrebucklingLoad {
    pub nx0: f64,
    pub ny0: f64,
    pub nxy0: f64,
}

impl PrebucklingLoad {
    pub fn uniaxial(magnitude: f64) -> Self {
        Self {
            nx0: -magnitude,
            ny0: 0.0,
            nxy0: 0.0,
        }
    }

    pub fn biaxial(magnitude: f64) -> Self {
        Self {
            nx0: -magnitude,
            ny0: -magnitude,
            nxy0: 0.0,
        }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.nx0, self.nxy0, self.nxy0, self.ny0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            nx0: s * self.nx0,
            ny0: s * self.ny0,
            nxy0: s * self.nxy0,
        }
    }
}

/// Per-control-point strain–displacement blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainBlocks {
    pub bm: Matrix3x4<f64>,
    pub bb1: Matrix3x4<f64>,
    pub bb2: Matrix3x4<f64>,
    pub bs: Matrix2x4<f64>,
    pub bg: Matrix2x4<f64>,
}

/// Blocks for the `local`-th active function of `basis` (which must carry
/// second derivatives).
pub fn strain_displacement_blocks(basis: &BasisEval, local: usize) -> StrainBlocks {
    let [rx, ry] = basis.d1[local];
    let [rxx, ryy, rxy] = basis.d2[local];
    StrainBlocks {
        bm: Matrix3x4::new(rx, 0.0, 0.0, 0.0, 0.0, ry, 0.0, 0.0, ry, rx, 0.0, 0.0),
        bb1: -Matrix3x4::new(
            0.0,
            0.0,
            rxx,
            0.0,
            0.0,
            0.0,
            ryy,
            0.0,
            0.0,
            0.0,
            2.0 * rxy,
            0.0,
        ),
        bb2: Matrix3x4::new(
            0.0,
            0.0,
            0.0,
            rxx,
            0.0,
            0.0,
            0.0,
            ryy,
            0.0,
            0.0,
            0.0,
            2.0 * rxy,
        ),
        bs: Matrix2x4::new(0.0, 0.0, 0.0, rx, 0.0, 0.0, 0.0, ry),
        bg: Matrix2x4::new(0.0, 0.0, rx, rx, 0.0, 0.0, ry, ry),
    }
}

/// Generalized strain operator `(B^m; B^b1; B^b2; B^s)`, 11 × 4n, columns
/// ordered by active function then local dof.
pub fn generalized_strain_operator(basis: &BasisEval) -> DMatrix<f64> {
    let n = basis.len();
    let mut b = DMatrix::zeros(11, 4 * n);
    for k in 0..n {
        let blk = strain_displacement_blocks(basis, k);
        let c = 4 * k;
        b.fixed_view_mut::<3, 4>(0, c).copy_from(&blk.bm);
        b.fixed_view_mut::<3, 4>(3, c).copy_from(&blk.bb1);
        b.fixed_view_mut::<3, 4>(6, c).copy_from(&blk.bb2);
        b.fixed_view_mut::<2, 4>(9, c).copy_from(&blk.bs);
    }
    b
}

/// Generalized strains `(ε₀, κ_b, κ_s, ε_s)` of a full solution vector at one point.
pub fn generalized_strains(basis: &BasisEval, dofs: &DofMap, q: &[f64]) -> SMatrix<f64, 11, 1> {
    let mut eps = SMatrix::<f64, 11, 1>::zeros();
    for (k, &a) in basis.active_indices.iter().enumerate() {
        let blk = strain_displacement_blocks(basis, k);
        let qa = nalgebra::Vector4::from_fn(|d, _| q[dofs.index(a, Dof::ALL[d])]);
        let mut m = eps.fixed_rows_mut::<3>(0);
        m += blk.bm * qa;
        let mut b = eps.fixed_rows_mut::<3>(3);
        b += blk.bb1 * qa;
        let mut s = eps.fixed_rows_mut::<3>(6);
        s += blk.bb2 * qa;
        let mut t = eps.fixed_rows_mut::<2>(9);
        t += blk.bs * qa;
    }
    eps
}

/// A quadrature point with its basis evaluation and integration weight
/// (Gauss weight × parametric span scaling × |det J|).
#[derive(Debug, Clone)]
pub struct GaussPoint {
    pub basis: BasisEval,
    pub weight: f64,
}

/// Full `(p+1) × (q+1)` Gauss points of one element, with derivatives up to
/// `deriv_order`.
pub fn element_gauss_points(
    patch: &NurbsPatch,
    element: &Element,
    deriv_order: usize,
) -> Result<Vec<GaussPoint>> {
    let ru = GaussRule::legendre(patch.knots_xi().degree() + 1);
    let rv = GaussRule::legendre(patch.knots_eta().degree() + 1);
    let mut pts = Vec::with_capacity(ru.len() * rv.len());
    for (eta, wv) in rv.mapped(element.eta.lo, element.eta.hi) {
        for (xi, wu) in ru.mapped(element.xi.lo, element.xi.hi) {
            let basis = patch.eval_basis(xi, eta, deriv_order).map_err(|e| match e {
                Error::Geometry(msg) => Error::Geometry(format!(
                    "element (span {}, {}): {msg}",
                    element.xi.index, element.eta.index
                )),
                other => other,
            })?;
            let weight = wu * wv * basis.jacobian_det.abs();
            pts.push(GaussPoint { basis, weight });
        }
    }
    Ok(pts)
}

fn global_indices(basis: &BasisEval, dofs: &DofMap) -> Vec<usize> {
    basis
        .active_indices
        .iter()
        .flat_map(|&a| Dof::ALL.map(|d| dofs.index(a, d)))
        .collect()
}

/// Accumulate `Σ_gp w · opᵀ C op` over every element into a dense global matrix.
fn assemble_quadratic_form<F>(
    patch: &NurbsPatch,
    dofs: &DofMap,
    deriv_order: usize,
    mut local: F,
) -> Result<Mat<f64>>
where
    F: FnMut(&GaussPoint, &mut DMatrix<f64>),
{
    let n = dofs.total();
    let mut global = Mat::<f64>::zeros(n, n);
    for element in patch.elements() {
        let gps = element_gauss_points(patch, &element, deriv_order)?;
        let idx = global_indices(&gps[0].basis, dofs);
        let mut ke = DMatrix::<f64>::zeros(idx.len(), idx.len());
        for gp in &gps {
            local(gp, &mut ke);
        }
        for (j, &gj) in idx.iter().enumerate() {
            for (i, &gi) in idx.iter().enumerate() {
                global[(gi, gj)] += ke[(i, j)];
            }
        }
    }
    Ok(global)
}

/// Global stiffness: bending/membrane block with `[A B E; B D F; E F H]`
/// plus the transverse shear term with `D^s`.
pub fn assemble_stiffness(
    patch: &NurbsPatch,
    dofs: &DofMap,
    section: &SectionMatrices,
) -> Result<Mat<f64>> {
    let d = section.generalized();
    assemble_quadratic_form(patch, dofs, 2, |gp, ke| {
        let b = generalized_strain_operator(&gp.basis);
        let db = d * &b;
        ke.gemm_tr(gp.weight, &b, &db, 1.0);
    })
}

/// Consistent mass matrix from the first-moment inertia terms.
pub fn assemble_mass(patch: &NurbsPatch, dofs: &DofMap, inertia: &InertiaMatrix) -> Result<Mat<f64>> {
    let i0 = inertia.i0();
    let mut m = SMatrix::<f64, 9, 9>::zeros();
    for blk in 0..3 {
        m.fixed_view_mut::<3, 3>(3 * blk, 3 * blk).copy_from(&i0);
    }
    assemble_quadratic_form(patch, dofs, 1, |gp, ke| {
        let r = mass_operator(&gp.basis);
        let mr = m * &r;
        ke.gemm_tr(gp.weight, &r, &mr, 1.0);
    })
}

/// Mass of the transverse motion alone, `∫ I₁ (w_b + w_s)²`. Its share of
/// the full kinetic energy separates flexural from in-plane modes.
pub fn assemble_transverse_mass(
    patch: &NurbsPatch,
    dofs: &DofMap,
    inertia: &InertiaMatrix,
) -> Result<Mat<f64>> {
    let i1 = inertia.i1();
    assemble_quadratic_form(patch, dofs, 0, |gp, ke| {
        let n = gp.basis.len();
        let mut r = DMatrix::<f64>::zeros(1, 4 * n);
        for k in 0..n {
            r[(0, 4 * k + 2)] = gp.basis.values[k];
            r[(0, 4 * k + 3)] = gp.basis.values[k];
        }
        ke.gemm_tr(gp.weight * i1, &r, &r, 1.0);
    })
}

/// `(R₁; R₂; R₃)`, 9 × 4n: rows `(u₀, −w_b,x, w_s,x, v₀, −w_b,y, w_s,y, w, 0, 0)`.
pub fn mass_operator(basis: &BasisEval) -> DMatrix<f64> {
    let n = basis.len();
    let mut r = DMatrix::zeros(9, 4 * n);
    for k in 0..n {
        let c = 4 * k;
        let v = basis.values[k];
        let [rx, ry] = basis.d1[k];
        r[(0, c)] = v;
        r[(1, c + 2)] = -rx;
        r[(2, c + 3)] = rx;
        r[(3, c + 1)] = v;
        r[(4, c + 2)] = -ry;
        r[(5, c + 3)] = ry;
        r[(6, c + 2)] = v;
        r[(6, c + 3)] = v;
    }
    r
}

/// Geometric stiffness from the pre-buckling resultants, acting on the
/// gradient of the total deflection `w_b + w_s`.
pub fn assemble_geometric(patch: &NurbsPatch, dofs: &DofMap, n0: &PrebucklingLoad) -> Result<Mat<f64>> {
    let nm = n0.matrix();
    assemble_quadratic_form(patch, dofs, 1, |gp, ke| {
        let n = gp.basis.len();
        let mut bg = DMatrix::<f64>::zeros(2, 4 * n);
        for k in 0..n {
            let [rx, ry] = gp.basis.d1[k];
            bg[(0, 4 * k + 2)] = rx;
            bg[(0, 4 * k + 3)] = rx;
            bg[(1, 4 * k + 2)] = ry;
            bg[(1, 4 * k + 3)] = ry;
        }
        let nb = nm * &bg;
        ke.gemm_tr(gp.weight, &bg, &nb, 1.0);
    })
}

/// Transverse load vector; the pressure enters the `w_b` and `w_s` rows alike.
pub fn assemble_load(patch: &NurbsPatch, dofs: &DofMap, load: &LoadSpec) -> Result<Col<f64>> {
    let mut f = Col::<f64>::zeros(dofs.total());
    for element in patch.elements() {
        for gp in element_gauss_points(patch, &element, 0)? {
            let [x, y] = gp.basis.point;
            let q = load.intensity(x, y) * gp.weight;
            for (&a, &r) in gp.basis.active_indices.iter().zip(&gp.basis.values) {
                f[dofs.index(a, Dof::Wb)] += q * r;
                f[dofs.index(a, Dof::Ws)] += q * r;
            }
        }
    }
    Ok(f)
}

/// Assembled operators for one analysis. Only `k` is always present.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub dofs: DofMap,
    pub k: Mat<f64>,
    pub m: Option<Mat<f64>>,
    pub kg: Option<Mat<f64>>,
    pub f: Option<Col<f64>>,
}

impl GlobalSystem {
    pub fn new(dofs: DofMap, k: Mat<f64>) -> Self {
        Self {
            dofs,
            k,
            m: None,
            kg: None,
            f: None,
        }
    }

    pub fn with_mass(mut self, m: Mat<f64>) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_geometric(mut self, kg: Mat<f64>) -> Self {
        self.kg = Some(kg);
        self
    }

    pub fn with_load(mut self, f: Col<f64>) -> Self {
        self.f = Some(f);
        self
    }
}

/// Largest `|A_ij − A_ji|` relative to the largest entry.
pub fn relative_asymmetry(a: &Mat<f64>) -> f64 {
    let n = a.nrows();
    let mut diff: f64 = 0.0;
    let mut max: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            diff = diff.max((a[(i, j)] - a[(j, i)]).abs());
            max = max.max(a[(i, j)].abs());
        }
    }
    if max == 0.0 {
        0.0
    } else {
        diff / max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laminate::{inertia_matrix, section_matrices, Layup, Orthotropic, ShearModel};
    use crate::nurbs::KnotVector;
    use faer::Side;

    fn layup() -> Layup {
        // unsymmetric so that every coupling block is populated
        Layup::equal_plies(Orthotropic::material_ii(25.0), &[30.0, -45.0, 0.0], 0.1).unwrap()
    }

    fn quad_form(a: &Mat<f64>, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for j in 0..a.ncols() {
            if y[j] == 0.0 {
                continue;
            }
            for i in 0..a.nrows() {
                s += x[i] * a[(i, j)] * y[j];
            }
        }
        s
    }

    /// Control values reproducing `x` and `x²` on an open knot vector
    /// (mapped by `scale`): first and second symmetric polar forms.
    fn marsden(kv: &KnotVector, scale: f64) -> (Vec<f64>, Vec<f64>) {
        let p = kv.degree();
        let t = kv.values();
        let lin = kv.greville().iter().map(|g| scale * g).collect();
        let pairs = (p * (p - 1) / 2) as f64;
        let quad = (0..kv.num_basis())
            .map(|i| {
                let w = &t[i + 1..=i + p];
                let mut s = 0.0;
                for j in 0..p {
                    for k in j + 1..p {
                        s += w[j] * w[k];
                    }
                }
                scale * scale * s / pairs
            })
            .collect();
        (lin, quad)
    }

    /// Nodal vector for polynomial fields given per dof as combinations of
    /// `(1, x, y, x², y², xy)`.
    fn polynomial_field(patch: &NurbsPatch, a: f64, b: f64, coeffs: [[f64; 6]; 4]) -> Vec<f64> {
        let (lx, qx) = marsden(patch.knots_xi(), a);
        let (ly, qy) = marsden(patch.knots_eta(), b);
        let dofs = DofMap::for_patch(patch);
        let (n, m) = patch.grid();
        let mut q = vec![0.0; dofs.total()];
        for j in 0..m {
            for i in 0..n {
                let basis = [1.0, lx[i], ly[j], qx[i], qy[j], lx[i] * ly[j]];
                let pt = patch.point_index(i, j);
                for (d, c) in Dof::ALL.iter().zip(&coeffs) {
                    q[dofs.index(pt, *d)] = c.iter().zip(&basis).map(|(c, v)| c * v).sum();
                }
            }
        }
        q
    }

    fn count_small_eigenvalues(k: &Mat<f64>, rel: f64) -> usize {
        let ev = k.self_adjoint_eigenvalues(Side::Lower).unwrap();
        let max = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        ev.iter().filter(|v| v.abs() <= rel * max).count()
    }

    #[test]
    fn dof_numbering_roundtrip() {
        let d = DofMap::new(5);
        assert_eq!(d.total(), 20);
        assert_eq!(d.index(3, Dof::Wb), 14);
        assert_eq!(d.split(14), (3, Dof::Wb));
    }

    #[test]
    fn operators_are_symmetric() {
        let patch = NurbsPatch::rectangle(1.0, 0.7, 3, 4, 3).unwrap();
        let dofs = DofMap::for_patch(&patch);
        let l = layup();
        let model = ShearModel::Karama;
        let k = assemble_stiffness(&patch, &dofs, &section_matrices(&l, model).unwrap()).unwrap();
        let m = assemble_mass(&patch, &dofs, &inertia_matrix(&l, model)).unwrap();
        let n0 = PrebucklingLoad { nx0: -1.0, ny0: 0.3, nxy0: 0.2 };
        let kg = assemble_geometric(&patch, &dofs, &n0).unwrap();
        assert!(relative_asymmetry(&k) <= 1e-10);
        assert!(relative_asymmetry(&m) <= 1e-10);
        assert!(relative_asymmetry(&kg) <= 1e-10);
    }

    #[test]
    fn free_stiffness_has_seven_rigid_modes() {
        // 3 in-plane rigid motions, w_b ∈ span{1, x, y}, w_s constant
        let patch = NurbsPatch::rectangle(1.0, 1.0, 2, 4, 4).unwrap();
        let dofs = DofMap::for_patch(&patch);
        let sec = section_matrices(&layup(), ShearModel::Reddy).unwrap();
        let k = assemble_stiffness(&patch, &dofs, &sec).unwrap();
        assert_eq!(count_small_eigenvalues(&k, 1e-10), 7);
    }

    #[test]
    fn stiffness_is_linear_in_section() {
        let patch = NurbsPatch::rectangle(2.0, 1.0, 2, 3, 2).unwrap();
        let dofs = DofMap::for_patch(&patch);
        let sec = section_matrices(&layup(), ShearModel::Arya).unwrap();
        let k1 = assemble_stiffness(&patch, &dofs, &sec).unwrap();
        let k2 = assemble_stiffness(&patch, &dofs, &sec.scaled(2.0)).unwrap();
        let diff = (&k2 - &k1 * faer::Scale(2.0)).norm_max();
        assert!(diff <= 1e-12 * k2.norm_max());
    }

    #[test]
    fn strains_reproduce_quadratic_fields() {
        let (a, b) = (1.3, 0.8);
        let patch = NurbsPatch::rectangle(a, b, 3, 3, 4).unwrap();
        let dofs = DofMap::for_patch(&patch);
        //              1    x    y    x²   y²   xy
        let u0 = [0.1, 0.4, -0.2, 0.0, 0.0, 0.0];
        let v0 = [0.0, 0.3, 0.5, 0.0, 0.0, 0.0];
        let wb = [1.0, 0.2, 0.1, 0.5, -0.25, 1.5];
        let ws = [0.0, 0.7, -0.3, -1.0, 2.0, 0.6];
        let q = polynomial_field(&patch, a, b, [u0, v0, wb, ws]);
        for &(xi, eta) in &[(0.13, 0.71), (0.5, 0.5), (0.99, 0.02)] {
            let basis = patch.eval_basis(xi, eta, 2).unwrap();
            let [x, y] = basis.point;
            let eps = generalized_strains(&basis, &dofs, &q);
            let expect = [
                0.4,
                0.5,
                -0.2 + 0.3,
                -1.0,
                0.5,
                -3.0,
                -2.0,
                4.0,
                1.2,
                0.7 - 2.0 * x + 0.6 * y,
                -0.3 + 4.0 * y + 0.6 * x,
            ];
            for (got, want) in eps.iter().zip(expect) {
                assert!((got - want).abs() < 1e-10, "{eps:?} vs {expect:?}");
            }
        }
    }

    #[test]
    fn strain_energy_of_polynomial_field() {
        let (a, b) = (1.0, 1.5);
        let patch = NurbsPatch::rectangle(a, b, 2, 3, 3).unwrap();
        let dofs = DofMap::for_patch(&patch);
        let sec = section_matrices(&layup(), ShearModel::Shimpi).unwrap();
        let k = assemble_stiffness(&patch, &dofs, &sec).unwrap();
        let q = polynomial_field(
            &patch,
            a,
            b,
            [
                [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
            ],
        );
        // ε = (1, -1, 0 | -2, 0, 0 | 0, 2, 0 | 0, 2y)
        let d = sec.generalized();
        let e = nalgebra::SVector::<f64, 11>::from_column_slice(&[
            1.0, -1.0, 0.0, -2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0,
        ]);
        let expect = a * b * (e.transpose() * d * e)[0] + 4.0 * d[(10, 10)] * a * b.powi(3) / 3.0;
        let got = quad_form(&k, &q, &q);
        assert!((got - expect).abs() <= 1e-9 * expect.abs(), "{got} vs {expect}");
    }

    #[test]
    fn mass_matrix_kinetic_energy() {
        let (a, b) = (2.0, 1.0);
        let patch = NurbsPatch::rectangle(a, b, 3, 4, 2).unwrap();
        let dofs = DofMap::for_patch(&patch);
        let inertia = inertia_matrix(&layup(), ShearModel::Karama);
        let m = assemble_mass(&patch, &dofs, &inertia).unwrap();
        let translate = |d: Dof| {
            polynomial_field(&patch, a, b, {
                let mut c = [[0.0; 6]; 4];
                c[d as usize][0] = 1.0;
                c
            })
        };
        for d in Dof::ALL {
            let q = translate(d);
            let got = quad_form(&m, &q, &q);
            assert!((got - inertia.i1() * a * b).abs() <= 1e-12 * got.abs());
        }
        // w_b = x: −w_b,x = −1 contributes I3, the deflection x contributes I1 x²
        let mut c = [[0.0; 6]; 4];
        c[2][1] = 1.0;
        let q = polynomial_field(&patch, a, b, c);
        let expect = inertia.i3() * a * b + inertia.i1() * b * a.powi(3) / 3.0;
        let got = quad_form(&m, &q, &q);
        assert!((got - expect).abs() <= 1e-12 * expect);
        // positive definite
        assert!(m.llt(Side::Lower).is_ok());
    }

    #[test]
    fn geometric_stiffness_acts_on_total_slope() {
        let (a, b) = (1.0, 2.0);
        let patch = NurbsPatch::rectangle(a, b, 2, 3, 3).unwrap();
        let dofs = DofMap::for_patch(&patch);
        let n0 = PrebucklingLoad { nx0: -1.5, ny0: 0.5, nxy0: 0.25 };
        let kg = assemble_geometric(&patch, &dofs, &n0).unwrap();
        for i in 0..dofs.total() {
            for j in 0..dofs.total() {
                let (_, di) = dofs.split(i);
                let (_, dj) = dofs.split(j);
                if matches!(di, Dof::U0 | Dof::V0) || matches!(dj, Dof::U0 | Dof::V0) {
                    assert_eq!(kg[(i, j)], 0.0);
                }
            }
        }
        // w_b = x, w_s = y: ∇w = (1, 1)
        let mut c = [[0.0; 6]; 4];
        c[2][1] = 1.0;
        c[3][2] = 1.0;
        let q = polynomial_field(&patch, a, b, c);
        let expect = (n0.nx0 + 2.0 * n0.nxy0 + n0.ny0) * a * b;
        let got = quad_form(&kg, &q, &q);
        assert!((got - expect).abs() <= 1e-12);
    }

    #[test]
    fn load_vector_resultants() {
        let (a, b) = (1.0, 2.0);
        let patch = NurbsPatch::rectangle(a, b, 3, 8, 8).unwrap();
        let dofs = DofMap::for_patch(&patch);
        let sum_wb = |f: &Col<f64>| -> f64 {
            (0..dofs.num_points()).map(|p| f[dofs.index(p, Dof::Wb)]).sum()
        };
        let uniform = LoadSpec { kind: LoadKind::Uniform, q0: 3.0, a, b };
        let f = assemble_load(&patch, &dofs, &uniform).unwrap();
        assert!((sum_wb(&f) - 3.0 * a * b).abs() < 1e-12);
        for p in 0..dofs.num_points() {
            assert_eq!(f[dofs.index(p, Dof::Wb)], f[dofs.index(p, Dof::Ws)]);
            assert_eq!(f[dofs.index(p, Dof::U0)], 0.0);
        }
        let sine = LoadSpec { kind: LoadKind::Sinusoidal, q0: 1.0, a, b };
        let f = assemble_load(&patch, &dofs, &sine).unwrap();
        let expect = 4.0 * a * b / (PI * PI);
        assert!((sum_wb(&f) - expect).abs() < 1e-7 * expect);
        let zero = LoadSpec { q0: 0.0, ..sine };
        let f = assemble_load(&patch, &dofs, &zero).unwrap();
        assert_eq!(f.norm_max(), 0.0);
    }
    #[test]
    fn transverse_mass_is_part_of_full_mass() {
        let (a, b) = (1.0, 1.0);
        let patch = NurbsPatch::rectangle(a, b, 2, 3, 3).unwrap();
        let dofs = DofMap::for_patch(&patch);
        let inertia = inertia_matrix(&layup(), ShearModel::Reddy);
        let m = assemble_mass(&patch, &dofs, &inertia).unwrap();
        let mw = assemble_transverse_mass(&patch, &dofs, &inertia).unwrap();
        // rigid deflection: all kinetic energy is transverse
        let mut c = [[0.0; 6]; 4];
        c[3][0] = 1.0;
        let q = polynomial_field(&patch, a, b, c);
        assert!((quad_form(&m, &q, &q) - quad_form(&mw, &q, &q)).abs() < 1e-14);
        // in-plane translation: none of it is
        let mut c = [[0.0; 6]; 4];
        c[0][0] = 1.0;
        let q = polynomial_field(&patch, a, b, c);
        assert_eq!(quad_form(&mw, &q, &q), 0.0);
    }

}
