//! Essential boundary conditions and elimination of constrained unknowns.
//!
//! Clamped edges fix the deflection unknowns on the first interior row of
//! control points as well: with an open knot vector the normal slope at the
//! boundary is proportional to the difference between the edge and adjacent
//! control values, so zeroing both rows zeroes the slope.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use faer::{Col, Mat};
use serde::{Deserialize, Serialize};

use crate::assembly::{Dof, DofMap, GlobalSystem};
use crate::error::{Error, Result};
use crate::nurbs::NurbsPatch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeSupport {
    SimplySupported,
    Clamped,
    Free,
}

impl EdgeSupport {
    pub fn letter(&self) -> char {
        match self {
            EdgeSupport::SimplySupported => 'S',
            EdgeSupport::Clamped => 'C',
            EdgeSupport::Free => 'F',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'S' => Some(EdgeSupport::SimplySupported),
            'C' => Some(EdgeSupport::Clamped),
            'F' => Some(EdgeSupport::Free),
            _ => None,
        }
    }
}

/// Selects which in-plane displacement a simply supported edge restrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LayupKind {
    /// Tangential displacement restrained (v₀ on x = const, u₀ on y = const).
    CrossPly,
    /// Normal displacement restrained (u₀ on x = const, v₀ on y = const).
    AnglePly,
}

impl LayupKind {
    pub fn name(&self) -> &'static str {
        match self {
            LayupKind::CrossPly => "cross_ply",
            LayupKind::AnglePly => "angle_ply",
        }
    }
}

impl TryFrom<String> for LayupKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LayupKind> for String {
    fn from(k: LayupKind) -> Self {
        k.name().to_string()
    }
}

impl FromStr for LayupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "cross_ply" | "crossply" => Ok(LayupKind::CrossPly),
            "angle_ply" | "angleply" => Ok(LayupKind::AnglePly),
            other => Err(Error::Config(format!(
                "unknown layup kind `{other}`; expected cross_ply or angle_ply"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    /// x = 0
    X0,
    /// y = 0
    Y0,
    /// x = a
    XA,
    /// y = b
    YB,
}

impl Edge {
    /// Order of the letters in a boundary code: counter-clockwise from the
    /// bottom edge.
    pub const CODE_ORDER: [Edge; 4] = [Edge::Y0, Edge::XA, Edge::YB, Edge::X0];

    fn is_x_edge(&self) -> bool {
        matches!(self, Edge::X0 | Edge::XA)
    }
}

/// Support type of each plate edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeCondition {
    pub x0: EdgeSupport,
    pub y0: EdgeSupport,
    pub xa: EdgeSupport,
    pub yb: EdgeSupport,
    pub layup_kind: LayupKind,
}

impl EdgeCondition {
    /// Parse a four-letter code (`S`, `C`, `F`) in the edge order
    /// `y = 0, x = a, y = b, x = 0`. `SFSF` is simply supported on
    /// `y = 0` and `y = b` with `x = 0` and `x = a` free.
    pub fn from_code(code: &str, layup_kind: LayupKind) -> Result<Self> {
        let letters: Vec<char> = code.trim().chars().collect();
        if letters.len() != 4 {
            return Err(Error::Config(format!(
                "boundary code `{code}` must have exactly four letters from S, C, F"
            )));
        }
        let mut sup = [EdgeSupport::Free; 4];
        for (s, c) in sup.iter_mut().zip(&letters) {
            *s = EdgeSupport::from_letter(*c).ok_or_else(|| {
                Error::Config(format!(
                    "boundary code `{code}`: invalid letter `{c}` (expected S, C or F)"
                ))
            })?;
        }
        Ok(Self {
            y0: sup[0],
            xa: sup[1],
            yb: sup[2],
            x0: sup[3],
            layup_kind,
        })
    }

    pub fn all(support: EdgeSupport, layup_kind: LayupKind) -> Self {
        Self {
            x0: support,
            y0: support,
            xa: support,
            yb: support,
            layup_kind,
        }
    }

    pub fn support(&self, edge: Edge) -> EdgeSupport {
        match edge {
            Edge::X0 => self.x0,
            Edge::Y0 => self.y0,
            Edge::XA => self.xa,
            Edge::YB => self.yb,
        }
    }

    pub fn code(&self) -> String {
        Edge::CODE_ORDER
            .iter()
            .map(|&e| self.support(e).letter())
            .collect()
    }
}

impl fmt::Display for EdgeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// Sorted, deduplicated global indices of unknowns fixed to zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    fixed: BTreeSet<usize>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fix(&mut self, dof: usize) {
        self.fixed.insert(dof);
    }

    pub fn contains(&self, dof: usize) -> bool {
        self.fixed.contains(&dof)
    }

    pub fn len(&self) -> usize {
        self.fixed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.fixed.iter().copied()
    }
}

impl FromIterator<usize> for ConstraintSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self {
            fixed: iter.into_iter().collect(),
        }
    }
}

/// Control points on an edge (`offset = 0`) or on the parallel line
/// `offset` rows inside it.
fn edge_points(patch: &NurbsPatch, edge: Edge, offset: usize) -> Vec<usize> {
    let (n, m) = patch.grid();
    match edge {
        Edge::X0 => (0..m).map(|j| patch.point_index(offset, j)).collect(),
        Edge::XA => (0..m).map(|j| patch.point_index(n - 1 - offset, j)).collect(),
        Edge::Y0 => (0..n).map(|i| patch.point_index(i, offset)).collect(),
        Edge::YB => (0..n).map(|i| patch.point_index(i, m - 1 - offset)).collect(),
    }
}

pub fn build_constraints(
    patch: &NurbsPatch,
    dofs: &DofMap,
    bc: &EdgeCondition,
) -> Result<ConstraintSet> {
    if !patch.knots_xi().is_open() || !patch.knots_eta().is_open() {
        return Err(Error::Argument(
            "edge constraints need open knot vectors in both directions".into(),
        ));
    }
    let (n, m) = patch.grid();
    let mut cs = ConstraintSet::new();
    for edge in Edge::CODE_ORDER {
        let fixed: &[Dof] = match bc.support(edge) {
            EdgeSupport::Free => continue,
            EdgeSupport::Clamped => &Dof::ALL,
            EdgeSupport::SimplySupported => {
                let inplane = match (bc.layup_kind, edge.is_x_edge()) {
                    (LayupKind::CrossPly, true) | (LayupKind::AnglePly, false) => Dof::V0,
                    (LayupKind::CrossPly, false) | (LayupKind::AnglePly, true) => Dof::U0,
                };
                match inplane {
                    Dof::V0 => &[Dof::V0, Dof::Wb, Dof::Ws],
                    _ => &[Dof::U0, Dof::Wb, Dof::Ws],
                }
            }
        };
        for a in edge_points(patch, edge, 0) {
            for &d in fixed {
                cs.fix(dofs.index(a, d));
            }
        }
        if bc.support(edge) == EdgeSupport::Clamped {
            let across = if edge.is_x_edge() { n } else { m };
            if across < 2 {
                return Err(Error::Argument(
                    "clamped edge needs at least two control rows".into(),
                ));
            }
            for a in edge_points(patch, edge, 1) {
                cs.fix(dofs.index(a, Dof::Wb));
                cs.fix(dofs.index(a, Dof::Ws));
            }
        }
    }
    Ok(cs)
}

/// Unknowns to pin so that in-plane rigid motions left free by `cs` are
/// removed. Translations and the in-plane rotation carry no strain and no
/// geometric stiffness, so pinning them is exact for static and buckling
/// solutions; modal solutions keep them as zero-frequency modes instead.
pub fn rigid_inplane_gauge(patch: &NurbsPatch, dofs: &DofMap, cs: &ConstraintSet) -> Vec<usize> {
    let pts = patch.control_points();
    let n = dofs.num_points();
    let mut modes: Vec<Vec<f64>> = Vec::with_capacity(3);
    for k in 0..3 {
        let mut v = vec![0.0; dofs.total()];
        for (a, [x, y]) in pts.iter().enumerate().take(n) {
            let (u, w) = match k {
                0 => (1.0, 0.0),
                1 => (0.0, 1.0),
                _ => (-y, *x),
            };
            v[dofs.index(a, Dof::U0)] = u;
            v[dofs.index(a, Dof::V0)] = w;
        }
        modes.push(v);
    }
    let scale = modes
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    // Gaussian elimination with full pivoting: every pivot on a constrained
    // unknown removes one rigid motion; pivots found on free unknowns once
    // the constrained ones are exhausted become gauge pins.
    let mut pins = Vec::new();
    let mut remaining = modes;
    let mut allow_free = false;
    while !remaining.is_empty() {
        let mut best: Option<(usize, usize, f64)> = None;
        for (m, v) in remaining.iter().enumerate() {
            for (i, &x) in v.iter().enumerate() {
                if cs.contains(i) == allow_free {
                    continue;
                }
                if best.is_none_or(|(_, _, b)| x.abs() > b * (1.0 + 1e-12)) {
                    best = Some((m, i, x.abs()));
                }
            }
        }
        match best {
            Some((m, i, mag)) if mag > 1e-9 * scale => {
                let pivot = remaining.swap_remove(m);
                for v in remaining.iter_mut() {
                    let c = v[i] / pivot[i];
                    for (x, p) in v.iter_mut().zip(&pivot) {
                        *x -= c * p;
                    }
                }
                if allow_free {
                    pins.push(i);
                }
            }
            _ if !allow_free => allow_free = true,
            _ => break,
        }
    }
    pins.sort_unstable();
    pins
}

/// The system restricted to the free unknowns.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub dofs: DofMap,
    /// `free[r]` is the full index of reduced unknown `r`.
    pub free: Vec<usize>,
    pub k: Mat<f64>,
    pub m: Option<Mat<f64>>,
    pub kg: Option<Mat<f64>>,
    pub f: Option<Col<f64>>,
}

impl ReducedSystem {
    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    /// Full-size vector with zeros at the constrained unknowns.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        assert_eq!(reduced.len(), self.free.len());
        let mut full = vec![0.0; self.dofs.total()];
        for (&g, &v) in self.free.iter().zip(reduced) {
            full[g] = v;
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&g| full[g]).collect()
    }
}

fn submatrix(a: &Mat<f64>, idx: &[usize]) -> Mat<f64> {
    Mat::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

/// Delete the rows and columns of the fixed unknowns.
pub fn reduce_system(sys: &GlobalSystem, cs: &ConstraintSet) -> Result<ReducedSystem> {
    let total = sys.dofs.total();
    if let Some(bad) = cs.iter().find(|&d| d >= total) {
        return Err(Error::Argument(format!(
            "constrained index {bad} out of range ({total} unknowns)"
        )));
    }
    let free: Vec<usize> = (0..total).filter(|&d| !cs.contains(d)).collect();
    if free.is_empty() {
        return Err(Error::Degenerate("every unknown is constrained".into()));
    }
    Ok(ReducedSystem {
        dofs: sys.dofs,
        k: submatrix(&sys.k, &free),
        m: sys.m.as_ref().map(|m| submatrix(m, &free)),
        kg: sys.kg.as_ref().map(|m| submatrix(m, &free)),
        f: sys
            .f
            .as_ref()
            .map(|f| Col::from_fn(free.len(), |i| f[free[i]])),
        free,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn patch() -> NurbsPatch {
        NurbsPatch::rectangle(1.0, 1.0, 3, 11, 11).unwrap()
    }

    #[test]
    fn simply_supported_cross_ply_edge() {
        let p = patch();
        let dofs = DofMap::for_patch(&p);
        let bc = EdgeCondition::from_code("FFFS", LayupKind::CrossPly).unwrap();
        let cs = build_constraints(&p, &dofs, &bc).unwrap();
        assert_eq!(cs.len(), 14 * 3);
        for j in 0..14 {
            let a = p.point_index(0, j);
            assert!(!cs.contains(dofs.index(a, Dof::U0)));
            assert!(cs.contains(dofs.index(a, Dof::V0)));
            assert!(cs.contains(dofs.index(a, Dof::Wb)));
            assert!(cs.contains(dofs.index(a, Dof::Ws)));
        }
    }

    #[test]
    fn angle_ply_swaps_inplane_roles() {
        let p = patch();
        let dofs = DofMap::for_patch(&p);
        let bc = EdgeCondition::from_code("SFFS", LayupKind::AnglePly).unwrap();
        let cs = build_constraints(&p, &dofs, &bc).unwrap();
        let on_x0 = p.point_index(0, 5);
        let on_y0 = p.point_index(5, 0);
        assert!(cs.contains(dofs.index(on_x0, Dof::U0)));
        assert!(!cs.contains(dofs.index(on_x0, Dof::V0)));
        assert!(cs.contains(dofs.index(on_y0, Dof::V0)));
        assert!(!cs.contains(dofs.index(on_y0, Dof::U0)));
        // the shared corner gets both
        let corner = p.point_index(0, 0);
        assert!(cs.contains(dofs.index(corner, Dof::U0)));
        assert!(cs.contains(dofs.index(corner, Dof::V0)));
    }

    #[test]
    fn clamped_fixes_adjacent_row() {
        let p = patch();
        let dofs = DofMap::for_patch(&p);
        let bc = EdgeCondition::from_code("CCCC", LayupKind::CrossPly).unwrap();
        let cs = build_constraints(&p, &dofs, &bc).unwrap();
        let (n, m) = p.grid();
        // boundary ring: all four unknowns
        let ring = 2 * n + 2 * (m - 2);
        // second ring: w_b, w_s only
        let inner = 2 * (n - 2) + 2 * (m - 4);
        assert_eq!(cs.len(), 4 * ring + 2 * inner);
        let adj = p.point_index(1, 1);
        assert!(cs.contains(dofs.index(adj, Dof::Wb)));
        assert!(cs.contains(dofs.index(adj, Dof::Ws)));
        assert!(!cs.contains(dofs.index(adj, Dof::U0)));
        assert!(!cs.contains(dofs.index(p.point_index(2, 2), Dof::Wb)));
    }

    #[test]
    fn free_plate_has_no_constraints() {
        let p = patch();
        let dofs = DofMap::for_patch(&p);
        let bc = EdgeCondition::from_code("FFFF", LayupKind::CrossPly).unwrap();
        assert!(build_constraints(&p, &dofs, &bc).unwrap().is_empty());
    }

    #[test]
    fn bad_codes() {
        assert!(EdgeCondition::from_code("SSS", LayupKind::CrossPly).is_err());
        assert!(EdgeCondition::from_code("SSXS", LayupKind::CrossPly).is_err());
        let bc = EdgeCondition::from_code("sfsc", LayupKind::CrossPly).unwrap();
        assert_eq!(bc.code(), "SFSC");
        assert_eq!(bc.y0, EdgeSupport::SimplySupported);
        assert_eq!(bc.xa, EdgeSupport::Free);
        assert_eq!(bc.yb, EdgeSupport::SimplySupported);
        assert_eq!(bc.x0, EdgeSupport::Clamped);
    }

    #[test]
    fn reduction_and_expansion() {
        let dofs = DofMap::new(2);
        let k = Mat::from_fn(8, 8, |i, j| (i * 8 + j) as f64);
        let sys = GlobalSystem::new(dofs, k.clone()).with_load(Col::from_fn(8, |i| i as f64));
        let same = reduce_system(&sys, &ConstraintSet::new()).unwrap();
        assert_eq!(same.k, k);
        let cs: ConstraintSet = [1, 5, 5].into_iter().collect();
        let red = reduce_system(&sys, &cs).unwrap();
        assert_eq!(red.len(), 6);
        assert_eq!(red.k[(1, 1)], k[(2, 2)]);
        assert_eq!(red.f.as_ref().unwrap()[4], 6.0);
        let full = red.expand(&[1.0; 6]);
        assert_eq!(full[1], 0.0);
        assert_eq!(full[5], 0.0);
        assert_eq!(full.iter().sum::<f64>(), 6.0);
        let all: ConstraintSet = (0..8).collect();
        assert!(matches!(reduce_system(&sys, &all), Err(Error::Degenerate(_))));
    }
    #[test]
    fn gauge_pins_only_free_rigid_motions() {
        let p = NurbsPatch::rectangle(1.0, 1.0, 3, 4, 4).unwrap();
        let dofs = DofMap::for_patch(&p);
        let gauge = |code: &str| {
            let bc = EdgeCondition::from_code(code, LayupKind::CrossPly).unwrap();
            let cs = build_constraints(&p, &dofs, &bc).unwrap();
            rigid_inplane_gauge(&p, &dofs, &cs)
        };
        assert!(gauge("SSSS").is_empty());
        assert!(gauge("CFFF").is_empty());
        // u₀ held on both y-edges, v₀ nowhere: one translation left
        let pins = gauge("SFSF");
        assert_eq!(pins.len(), 1);
        assert_eq!(dofs.split(pins[0]).1, Dof::V0);
        assert_eq!(gauge("FFFF").len(), 3);
        // v₀ held along x = 0 only: u-translation and rotation about a point
        // of that edge remain free
        assert_eq!(gauge("FFFS").len(), 2);
    }

}
