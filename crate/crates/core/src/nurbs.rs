//! B-spline and NURBS basis evaluation.
//!
//! Univariate values and parametric derivatives come from the Cox–de Boor
//! recursion and its derivative form. Bivariate rational functions are the
//! weighted tensor product, differentiated by the quotient rule through second
//! order and then pushed forward to physical coordinates through the geometry
//! map (inverse Jacobian for gradients, full second-order chain rule including
//! the map's Hessian for second derivatives).

use crate::error::{Error, Result};

/// Non-decreasing knot sequence together with its polynomial degree.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    values: Vec<f64>,
    degree: usize,
}

/// A nonempty knot span `[lo, hi)`, identified by the index of its left knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotSpan {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
}

/// Values and parametric derivatives of the `p + 1` functions that are
/// nonzero on one knot span.
#[derive(Debug, Clone, PartialEq)]
pub struct BsplineEval {
    pub span: usize,
    pub degree: usize,
    /// `ders[k][j]` is the k-th derivative of `N_{span - p + j}`.
    pub ders: Vec<Vec<f64>>,
}

impl BsplineEval {
    pub fn first_index(&self) -> usize {
        self.span - self.degree
    }

    pub fn values(&self) -> &[f64] {
        &self.ders[0]
    }
}

impl KnotVector {
    pub fn new(values: Vec<f64>, degree: usize) -> Result<Self> {
        if values.len() < 2 * (degree + 1) {
            return Err(Error::Argument(format!(
                "knot vector of degree {degree} needs at least {} knots, got {}",
                2 * (degree + 1),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("knot values must be finite".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Argument("knot values must be non-decreasing".into()));
        }
        let kv = Self { values, degree };
        let (lo, hi) = kv.domain();
        if hi <= lo {
            return Err(Error::Argument("knot vector has an empty domain".into()));
        }
        Ok(kv)
    }

    /// Open knot vector on [0, 1] with `num_elements` uniform spans and
    /// single interior knots, so the basis is C^(p-1) across every interior knot.
    pub fn open_uniform(degree: usize, num_elements: usize) -> Result<Self> {
        if num_elements == 0 {
            return Err(Error::Argument("need at least one element".into()));
        }
        let mut values = Vec::with_capacity(num_elements + 2 * degree + 1);
        values.extend(std::iter::repeat_n(0.0, degree + 1));
        values.extend((1..num_elements).map(|k| k as f64 / num_elements as f64));
        values.extend(std::iter::repeat_n(1.0, degree + 1));
        Self::new(values, degree)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis functions, `len - p - 1`.
    pub fn num_basis(&self) -> usize {
        self.values.len() - self.degree - 1
    }

    /// The parametric domain `[ξ_p, ξ_n]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.values[self.degree], self.values[self.num_basis()])
    }

    /// `true` when the first and last knots are each repeated exactly p+1 times.
    pub fn is_open(&self) -> bool {
        let p = self.degree;
        let v = &self.values;
        let n = v.len();
        let first = v[0];
        let last = v[n - 1];
        v[..=p].iter().all(|&x| x == first)
            && v[p + 1] != first
            && v[n - 1 - p..].iter().all(|&x| x == last)
            && v[n - 2 - p] != last
    }

    /// Index `i` of the span with `ξ_i <= xi < ξ_{i+1}`. The right end of the
    /// domain belongs to the last nonempty span.
    pub fn find_span(&self, xi: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&xi) {
            return Err(Error::Domain(format!(
                "parameter {xi} outside knot range [{lo}, {hi}]"
            )));
        }
        let n = self.num_basis();
        let v = &self.values;
        if xi >= v[n] {
            // last nonempty span
            let mut i = n - 1;
            while v[i] == v[i + 1] {
                i -= 1;
            }
            return Ok(i);
        }
        let (mut low, mut high) = (self.degree, n);
        let mut mid = (low + high) / 2;
        while xi < v[mid] || xi >= v[mid + 1] {
            if xi < v[mid] {
                high = mid;
            } else {
                low = mid;
            }
            mid = (low + high) / 2;
        }
        Ok(mid)
    }

    /// Nonempty spans of the domain, left to right.
    pub fn spans(&self) -> Vec<KnotSpan> {
        let p = self.degree;
        let n = self.num_basis();
        (p..n)
            .filter(|&i| self.values[i + 1] > self.values[i])
            .map(|i| KnotSpan {
                index: i,
                lo: self.values[i],
                hi: self.values[i + 1],
            })
            .collect()
    }

    /// Greville abscissae, the knot averages that give B-splines linear precision.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.num_basis())
            .map(|i| {
                if p == 0 {
                    0.5 * (self.values[i] + self.values[i + 1])
                } else {
                    self.values[i + 1..=i + p].iter().sum::<f64>() / p as f64
                }
            })
            .collect()
    }

    /// Values and derivatives up to `deriv_order` of the nonzero basis
    /// functions at `xi`.
    pub fn eval_basis(&self, xi: f64, deriv_order: usize) -> Result<BsplineEval> {
        if deriv_order > self.degree {
            return Err(Error::Argument(format!(
                "derivative order {deriv_order} exceeds degree {}",
                self.degree
            )));
        }
        let span = self.find_span(xi)?;
        let ders = ders_basis_funs(&self.values, span, xi, self.degree, deriv_order);
        Ok(BsplineEval {
            span,
            degree: self.degree,
            ders,
        })
    }
}

/// Cox–de Boor values plus derivatives via the triangular table of
/// basis functions and knot differences.
fn ders_basis_funs(knots: &[f64], span: usize, xi: f64, p: usize, n: usize) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = xi - knots[span + 1 - j];
        right[j] = knots[span + j] - xi;
        let mut saved = 0.0;
        for r in 0..j {
            // lower triangle holds knot differences
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = if ndu[j][r] == 0.0 {
                0.0
            } else {
                ndu[r][j - 1] / ndu[j][r]
            };
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    let mut ders = vec![vec![0.0; p + 1]; n + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let mut a = vec![vec![0.0; p + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=n {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                let rk = rk as usize;
                a[s2][0] = if ndu[pk + 1][rk] == 0.0 {
                    0.0
                } else {
                    a[s1][0] / ndu[pk + 1][rk]
                };
                d = a[s2][0] * ndu[rk][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize {
                k - 1
            } else {
                p - r
            };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = if ndu[pk + 1][idx] == 0.0 {
                    0.0
                } else {
                    (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx]
                };
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = if ndu[pk + 1][r] == 0.0 {
                    0.0
                } else {
                    -a[s1][k - 1] / ndu[pk + 1][r]
                };
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=n {
        for v in ders[k].iter_mut() {
            *v *= factor;
        }
        factor *= (p - k) as f64;
    }
    ders
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Tensor-product NURBS surface in the plane. Control points and weights are
/// stored with the ξ index running fastest: `A = i + n_ξ * j`.
#[derive(Debug, Clone, PartialEq)]
pub struct NurbsPatch {
    knots_xi: KnotVector,
    knots_eta: KnotVector,
    control_points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

/// Basis functions active at one parametric point, with physical derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    /// Global control-point indices of the active functions.
    pub active_indices: Vec<usize>,
    pub values: Vec<f64>,
    /// `[∂R/∂x, ∂R/∂y]`, empty when first derivatives were not requested.
    pub d1: Vec<[f64; 2]>,
    /// `[∂²R/∂x², ∂²R/∂y², ∂²R/∂x∂y]`, empty unless second derivatives were requested.
    pub d2: Vec<[f64; 3]>,
    /// Determinant of the parametric-to-physical Jacobian.
    pub jacobian_det: f64,
    /// Physical location of the evaluation point.
    pub point: [f64; 2],
}

impl BasisEval {
    pub fn len(&self) -> usize {
        self.active_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active_indices.is_empty()
    }
}

/// One nonempty knot-span pair, the unit of assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub xi: KnotSpan,
    pub eta: KnotSpan,
}

impl NurbsPatch {
    pub fn new(
        knots_xi: KnotVector,
        knots_eta: KnotVector,
        control_points: Vec<[f64; 2]>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n = knots_xi.num_basis() * knots_eta.num_basis();
        if control_points.len() != n || weights.len() != n {
            return Err(Error::Argument(format!(
                "expected {n} control points and weights, got {} and {}",
                control_points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Argument("weights must be strictly positive".into()));
        }
        if knots_xi.degree() == 0 || knots_eta.degree() == 0 {
            return Err(Error::Argument(
                "a surface patch needs degree at least 1 in both directions".into(),
            ));
        }
        Ok(Self {
            knots_xi,
            knots_eta,
            control_points,
            weights,
        })
    }

    /// Rectangle `[0, a] × [0, b]` with open uniform knots and control points
    /// at the Greville abscissae, so the geometry map is exactly affine.
    pub fn rectangle(a: f64, b: f64, degree: usize, nx: usize, ny: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Argument(format!(
                "plate dimensions must be positive, got {a} x {b}"
            )));
        }
        let kx = KnotVector::open_uniform(degree, nx)?;
        let ky = KnotVector::open_uniform(degree, ny)?;
        let gx = kx.greville();
        let gy = ky.greville();
        let control_points = gy
            .iter()
            .flat_map(|&y| gx.iter().map(move |&x| [a * x, b * y]))
            .collect::<Vec<_>>();
        let weights = vec![1.0; control_points.len()];
        Self::new(kx, ky, control_points, weights)
    }

    pub fn knots_xi(&self) -> &KnotVector {
        &self.knots_xi
    }

    pub fn knots_eta(&self) -> &KnotVector {
        &self.knots_eta
    }

    pub fn control_points(&self) -> &[[f64; 2]] {
        &self.control_points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.weights.len() {
            return Err(Error::Argument("weight count mismatch".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Argument("weights must be strictly positive".into()));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn with_control_points(mut self, pts: Vec<[f64; 2]>) -> Result<Self> {
        if pts.len() != self.control_points.len() {
            return Err(Error::Argument("control point count mismatch".into()));
        }
        self.control_points = pts;
        Ok(self)
    }

    /// Control-point grid dimensions `(n_ξ, n_η)`.
    pub fn grid(&self) -> (usize, usize) {
        (self.knots_xi.num_basis(), self.knots_eta.num_basis())
    }

    pub fn num_points(&self) -> usize {
        self.control_points.len()
    }

    pub fn point_index(&self, i: usize, j: usize) -> usize {
        i + self.knots_xi.num_basis() * j
    }

    /// Elements (nonempty span pairs), ξ running fastest.
    pub fn elements(&self) -> Vec<Element> {
        let sx = self.knots_xi.spans();
        self.knots_eta
            .spans()
            .into_iter()
            .flat_map(|eta| sx.iter().map(move |&xi| Element { xi, eta }))
            .collect()
    }

    fn characteristic_area(&self) -> f64 {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in &self.control_points {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let (a, b) = self.knots_xi.domain();
        let (c, d) = self.knots_eta.domain();
        let l = (x1 - x0).max(y1 - y0);
        l * l / ((b - a) * (d - c))
    }

    /// Bounds of the patch when its geometry map is the affine image of the
    /// parameter domain onto an axis-aligned rectangle (uniform weights,
    /// Greville-placed control points).
    pub fn affine_rect(&self) -> Option<Rect> {
        let w0 = self.weights[0];
        if self.weights.iter().any(|&w| (w - w0).abs() > 1e-14 * w0) {
            return None;
        }
        let gx = self.knots_xi.greville();
        let gy = self.knots_eta.greville();
        let (u0, u1) = self.knots_xi.domain();
        let (v0, v1) = self.knots_eta.domain();
        let first = self.control_points[0];
        let last = self.control_points[self.num_points() - 1];
        let r = Rect {
            x0: first[0],
            x1: last[0],
            y0: first[1],
            y1: last[1],
        };
        if !(r.width() > 0.0 && r.height() > 0.0) {
            return None;
        }
        let tol = 1e-12 * r.width().max(r.height());
        for (j, &gj) in gy.iter().enumerate() {
            for (i, &gi) in gx.iter().enumerate() {
                let p = self.control_points[self.point_index(i, j)];
                let x = r.x0 + r.width() * (gi - u0) / (u1 - u0);
                let y = r.y0 + r.height() * (gj - v0) / (v1 - v0);
                if (p[0] - x).abs() > tol || (p[1] - y).abs() > tol {
                    return None;
                }
            }
        }
        Some(r)
    }

    /// Parametric coordinates of a physical point. Only affine rectangular
    /// patches are supported.
    pub fn parametric_coords(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let r = self.affine_rect().ok_or_else(|| {
            Error::Geometry(
                "physical-to-parametric inversion needs an affine rectangular patch".into(),
            )
        })?;
        let tol = 1e-12 * r.width().max(r.height());
        if x < r.x0 - tol || x > r.x1 + tol || y < r.y0 - tol || y > r.y1 + tol {
            return Err(Error::Domain(format!(
                "point ({x}, {y}) outside plate [{}, {}] x [{}, {}]",
                r.x0, r.x1, r.y0, r.y1
            )));
        }
        let (u0, u1) = self.knots_xi.domain();
        let (v0, v1) = self.knots_eta.domain();
        let s = ((x - r.x0) / r.width()).clamp(0.0, 1.0);
        let t = ((y - r.y0) / r.height()).clamp(0.0, 1.0);
        Ok((u0 + s * (u1 - u0), v0 + t * (v1 - v0)))
    }

    /// Rational basis functions at `(xi, eta)` with physical derivatives up to
    /// `deriv_order` (at most 2).
    pub fn eval_basis(&self, xi: f64, eta: f64, deriv_order: usize) -> Result<BasisEval> {
        if deriv_order > 2 {
            return Err(Error::Argument(format!(
                "derivative order {deriv_order} not supported (max 2)"
            )));
        }
        let p = self.knots_xi.degree();
        let q = self.knots_eta.degree();
        // first derivatives are always needed for the Jacobian
        let order = deriv_order.max(1);
        let bu = self.knots_xi.eval_basis(xi, order)?;
        let bv = self.knots_eta.eval_basis(eta, order)?;
        let nloc = (p + 1) * (q + 1);

        let mut active = Vec::with_capacity(nloc);
        // weighted tensor products: [N, N_ξ, N_η, N_ξξ, N_ηη, N_ξη]
        let mut nw = Vec::with_capacity(nloc);
        let mut wsum = [0.0f64; 6];
        for b in 0..=q {
            for a in 0..=p {
                let gi = bu.first_index() + a;
                let gj = bv.first_index() + b;
                let idx = self.point_index(gi, gj);
                let w = self.weights[idx];
                let u = |k: usize| bu.ders.get(k).map_or(0.0, |d| d[a]);
                let v = |k: usize| bv.ders.get(k).map_or(0.0, |d| d[b]);
                let t = [
                    u(0) * v(0) * w,
                    u(1) * v(0) * w,
                    u(0) * v(1) * w,
                    u(2) * v(0) * w,
                    u(0) * v(2) * w,
                    u(1) * v(1) * w,
                ];
                for (s, x) in wsum.iter_mut().zip(&t) {
                    *s += x;
                }
                active.push(idx);
                nw.push(t);
            }
        }

        // quotient rule through second order
        let [w, w_u, w_v, w_uu, w_vv, w_uv] = wsum;
        let mut r = Vec::with_capacity(nloc);
        let mut r1 = Vec::with_capacity(nloc);
        let mut r2 = Vec::with_capacity(nloc);
        for t in &nw {
            let rv = t[0] / w;
            let ru = (t[1] - rv * w_u) / w;
            let rvv = (t[2] - rv * w_v) / w;
            r.push(rv);
            r1.push([ru, rvv]);
            if deriv_order >= 2 {
                let r_uu = (t[3] - 2.0 * ru * w_u - rv * w_uu) / w;
                let r_vv = (t[4] - 2.0 * rvv * w_v - rv * w_vv) / w;
                let r_uv = (t[5] - ru * w_v - rvv * w_u - rv * w_uv) / w;
                r2.push([r_uu, r_vv, r_uv]);
            }
        }

        // geometry map and its derivatives
        let mut point = [0.0; 2];
        let mut jac = [[0.0; 2]; 2]; // jac[i][a] = ∂x_i/∂ξ_a
        let mut hess = [[0.0; 3]; 2]; // hess[i] = [x_i,ξξ, x_i,ηη, x_i,ξη]
        for (k, &idx) in active.iter().enumerate() {
            let cp = self.control_points[idx];
            for i in 0..2 {
                point[i] += r[k] * cp[i];
                jac[i][0] += r1[k][0] * cp[i];
                jac[i][1] += r1[k][1] * cp[i];
                if deriv_order >= 2 {
                    for c in 0..3 {
                        hess[i][c] += r2[k][c] * cp[i];
                    }
                }
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() <= 1e-14 * self.characteristic_area() {
            return Err(Error::Geometry(format!(
                "singular Jacobian (det = {det:e}) at parameter ({xi}, {eta})"
            )));
        }
        // inverse Jacobian: inv[a][i] = ∂ξ_a/∂x_i
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];

        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        if deriv_order >= 1 {
            d1 = r1
                .iter()
                .map(|g| {
                    [
                        g[0] * inv[0][0] + g[1] * inv[1][0],
                        g[0] * inv[0][1] + g[1] * inv[1][1],
                    ]
                })
                .collect();
        }
        if deriv_order >= 2 {
            d2 = r2
                .iter()
                .zip(&d1)
                .map(|(h, g)| {
                    // H_ξ = Jᵀ H_x J + Σ_i R_{,x_i} G_i  ⇒  H_x = J⁻ᵀ (H_ξ − Σ_i R_{,x_i} G_i) J⁻¹
                    let m = [
                        [
                            h[0] - g[0] * hess[0][0] - g[1] * hess[1][0],
                            h[2] - g[0] * hess[0][2] - g[1] * hess[1][2],
                        ],
                        [
                            h[2] - g[0] * hess[0][2] - g[1] * hess[1][2],
                            h[1] - g[0] * hess[0][1] - g[1] * hess[1][1],
                        ],
                    ];
                    let mut hx = [[0.0; 2]; 2];
                    for (i, row) in hx.iter_mut().enumerate() {
                        for (j, out) in row.iter_mut().enumerate() {
                            let mut s = 0.0;
                            for a in 0..2 {
                                for b in 0..2 {
                                    s += inv[a][i] * m[a][b] * inv[b][j];
                                }
                            }
                            *out = s;
                        }
                    }
                    [hx[0][0], hx[1][1], hx[0][1]]
                })
                .collect();
        }

        Ok(BasisEval {
            active_indices: active,
            values: r,
            d1,
            d2,
            jacobian_det: det,
            point,
        })
    }

    /// Physical point of the parametric coordinates.
    pub fn map(&self, xi: f64, eta: f64) -> Result<[f64; 2]> {
        Ok(self.eval_basis(xi, eta, 0)?.point)
    }
}
