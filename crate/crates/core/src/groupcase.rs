//! Matrix Lie algebras: integrating paths to group elements, the adjoint
//! action, and flowing a morphism along a path.
//!
//! A path `θ(t) = Σ θ^a(t) E_a` integrates to `h = h(1)` with
//!
//! ```text
//! dh/dt = θ(t)·h(t),   h(0) = I
//! ```
//!
//! (right-invariant convention), by fixed-step classical Runge–Kutta. Then
//! `Φ_t = Ad_{h(t)}∘Φ₀` satisfies `∂ₜΦ_t = ad_{θ(t)}∘Φ_t`.
//!
//! Right-invariant vector fields bracket with the opposite sign of the
//! matrix commutator, so the algebroid attached to the algebra
//! ([`MatrixLieAlgebra::to_algebroid`]) uses the constants `−c^c_{ab}`.
//! With that identification `(Φ_t, θ)` satisfies the homotopy condition
//! `∂ₜΦ* = d i + i d` of [`crate::homotopy`].

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::algebroid::LieAlgebroid;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::report::{Check, Report, Status};

/// Residual above which `h E h⁻¹` is considered outside the basis span,
/// relative to `max(1, ‖h E h⁻¹‖_max)`.
pub const SPAN_TOLERANCE: f64 = 1e-9;

type RatMatrix = Vec<Vec<BigRational>>;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixLieAlgebra {
    n: usize,
    basis: Vec<RatMatrix>,
    /// `structure[a][b][c]`: `[E_a, E_b] = Σ_c c^c_{ab} E_c`.
    structure: Vec<Vec<Vec<BigRational>>>,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn rat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn flatten(m: &RatMatrix) -> Vec<BigRational> {
    m.iter().flatten().cloned().collect()
}

/// Coordinates of `v` in the span of `cols`, or `None` if `v` lies outside.
/// `cols` must be linearly independent.
fn solve_in_span(cols: &[Vec<BigRational>], v: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = v.len();
    let r = cols.len();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| cols.iter().map(|c| c[i].clone()).chain([v[i].clone()]).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = BigRational::from_integer(1.into()) / &m[row][col];
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..=r {
                    let delta = &f * &m[row][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if (row..rows).any(|i| !m[i][r].is_zero()) {
        return None;
    }
    let mut out = vec![BigRational::zero(); r];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = m[i][r].clone();
    }
    Some(out)
}

fn rank_of(cols: &[Vec<BigRational>]) -> usize {
    // the span test on each prefix
    let mut kept: Vec<Vec<BigRational>> = Vec::new();
    for c in cols {
        if (kept.is_empty() || solve_in_span(&kept, c).is_none()) && c.iter().any(|x| !x.is_zero()) {
            kept.push(c.clone());
        }
    }
    kept.len()
}

impl MatrixLieAlgebra {
    /// Computes the structure constants exactly; fails if the basis is
    /// dependent or not closed under commutators.
    pub fn new(n: usize, basis: Vec<RatMatrix>) -> Result<Self> {
        for (a, e) in basis.iter().enumerate() {
            if e.len() != n || e.iter().any(|row| row.len() != n) {
                return Err(Error::Dimension(format!("basis matrix {} is not {n}x{n}", a + 1)));
            }
        }
        let cols: Vec<Vec<BigRational>> = basis.iter().map(flatten).collect();
        if rank_of(&cols) != basis.len() {
            return Err(Error::InvalidStructure("basis matrices are linearly dependent".into()));
        }
        let r = basis.len();
        let mut structure = vec![vec![vec![BigRational::zero(); r]; r]; r];
        for a in 0..r {
            for b in a + 1..r {
                let ab = rat_mul(&basis[a], &basis[b]);
                let ba = rat_mul(&basis[b], &basis[a]);
                let comm: Vec<BigRational> = flatten(&ab).into_iter().zip(flatten(&ba)).map(|(x, y)| x - y).collect();
                let coeffs = solve_in_span(&cols, &comm).ok_or_else(|| {
                    Error::InvalidStructure(format!("[E_{}, E_{}] leaves the span of the basis", a + 1, b + 1))
                })?;
                for (c, k) in coeffs.into_iter().enumerate() {
                    structure[b][a][c] = -k.clone();
                    structure[a][b][c] = k;
                }
            }
        }
        Ok(MatrixLieAlgebra { n, basis, structure })
    }

    /// `so(3)` with `E_1, E_2, E_3` the infinitesimal rotations about the
    /// coordinate axes; `[E_1, E_2] = E_3` cyclically.
    pub fn so3() -> Self {
        let m = |v: [[i64; 3]; 3]| v.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::new(
            3,
            vec![
                m([[0, 0, 0], [0, 0, -1], [0, 1, 0]]),
                m([[0, 0, 1], [0, 0, 0], [-1, 0, 0]]),
                m([[0, -1, 0], [1, 0, 0], [0, 0, 0]]),
            ],
        )
        .expect("so(3) closes")
    }

    /// Strictly upper triangular 3x3 matrices: `[E_1, E_2] = E_3`, `E_3`
    /// central.
    pub fn heisenberg() -> Self {
        let unit = |i: usize, j: usize| -> RatMatrix {
            (0..3).map(|a| (0..3).map(|b| int((a == i && b == j) as i64)).collect()).collect()
        };
        Self::new(3, vec![unit(0, 1), unit(1, 2), unit(0, 2)]).expect("heisenberg closes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RatMatrix] {
        &self.basis
    }

    pub fn structure(&self, a: usize, b: usize, c: usize) -> &BigRational {
        &self.structure[a][b][c]
    }

    /// Point-base algebroid with the right-invariant bracket `−c`.
    pub fn to_algebroid(&self) -> LieAlgebroid {
        let r = self.dim();
        let brackets: Vec<(usize, usize, Vec<BigRational>)> = (0..r)
            .flat_map(|a| (a + 1..r).map(move |b| (a, b)))
            .map(|(a, b)| (a, b, self.structure[a][b].iter().map(|x| -x.clone()).collect()))
            .collect();
        LieAlgebroid::lie_algebra(r, &brackets).expect("commutator constants are antisymmetric")
    }

    pub fn basis_f64(&self, a: usize) -> DMatrix<f64> {
        let e = &self.basis[a];
        DMatrix::from_fn(self.n, self.n, |i, j| e[i][j].to_f64().unwrap_or(f64::NAN))
    }

    /// `Σ v^a E_a`.
    pub fn element(&self, v: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (a, &x) in v.iter().enumerate() {
            if x != 0.0 {
                out += self.basis_f64(a) * x;
            }
        }
        out
    }

    /// `ad_v` in the basis: `(ad_v)^c_b = Σ_a v^a c^c_{ab}`.
    pub fn ad(&self, v: &[f64]) -> DMatrix<f64> {
        let r = self.dim();
        DMatrix::from_fn(r, r, |c, b| {
            (0..r)
                .map(|a| v[a] * self.structure[a][b][c].to_f64().unwrap_or(f64::NAN))
                .sum()
        })
    }

    /// Least-squares coordinates of `m` in the basis (normal equations over
    /// the Frobenius Gram matrix). Fails if the fit leaves a residual.
    pub fn expand(&self, m: &DMatrix<f64>) -> Result<DVector<f64>> {
        let r = self.dim();
        let basis: Vec<DMatrix<f64>> = (0..r).map(|a| self.basis_f64(a)).collect();
        let gram = DMatrix::from_fn(r, r, |a, b| basis[a].dot(&basis[b]));
        let rhs = DVector::from_fn(r, |a, _| basis[a].dot(m));
        let coeffs = gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::InvalidStructure("singular Gram matrix".into()))?;
        let fit = self.element(coeffs.as_slice());
        let residual = (m - fit).amax();
        if residual > SPAN_TOLERANCE * m.amax().max(1.0) {
            return Err(Error::BasisExpansion(residual));
        }
        Ok(coeffs)
    }

    /// `Ad_h` in the basis: column `a` holds the coordinates of `h E_a h⁻¹`.
    pub fn adjoint(&self, h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let inv = h
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidStructure("group element is singular".into()))?;
        let r = self.dim();
        let mut out = DMatrix::zeros(r, r);
        for a in 0..r {
            let col = self.expand(&(h * self.basis_f64(a) * &inv))?;
            out.set_column(a, &col);
        }
        Ok(out)
    }

    /// `max |Φ[E_a, E_b] − [ΦE_a, ΦE_b]|` over basis pairs, in coordinates.
    pub fn morphism_defect(&self, phi: &DMatrix<f64>) -> f64 {
        let r = self.dim();
        let c = |a: usize, b: usize| DVector::from_fn(r, |k, _| self.structure[a][b][k].to_f64().unwrap_or(f64::NAN));
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in a + 1..r {
                let lhs = phi * c(a, b);
                let (pa, pb) = (phi.column(a), phi.column(b));
                let mut rhs = DVector::zeros(r);
                for x in 0..r {
                    for y in 0..r {
                        let w = pa[x] * pb[y];
                        if w != 0.0 {
                            rhs += c(x, y) * w;
                        }
                    }
                }
                worst = worst.max((lhs - rhs).amax());
            }
        }
        worst
    }

    fn theta_at(&self, theta: &[Polynomial], t: f64) -> DMatrix<f64> {
        let coeffs: Vec<f64> = theta.iter().map(|p| eval_in_time(p, t)).collect();
        self.element(&coeffs)
    }

    fn check_path(&self, theta: &[Polynomial]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::RankMismatch {
                expected: self.dim(),
                found: theta.len(),
            });
        }
        for p in theta {
            let ring = p.ring();
            if let Some(i) = (0..ring.len()).find(|&i| Some(i) != ring.time_index() && p.contains_var(i)) {
                return Err(Error::UnknownVariable(format!(
                    "{} (a path may only depend on t)",
                    ring.vars()[i]
                )));
            }
        }
        Ok(())
    }
}

fn eval_in_time(p: &Polynomial, t: f64) -> f64 {
    let mut values = vec![0.0; p.ring().len()];
    if let Some(ti) = p.ring().time_index() {
        values[ti] = t;
    }
    p.eval_f64_at(&values)
}

/// One classical RK4 step of `ḣ = θ(t) h` from `t` with step `dt`.
fn rk4_step(g: &MatrixLieAlgebra, theta: &[Polynomial], t: f64, dt: f64, h: &DMatrix<f64>) -> DMatrix<f64> {
    let a0 = g.theta_at(theta, t);
    let a1 = g.theta_at(theta, t + dt / 2.0);
    let a2 = g.theta_at(theta, t + dt);
    let k1 = &a0 * h;
    let k2 = &a1 * (h + &k1 * (dt / 2.0));
    let k3 = &a1 * (h + &k2 * (dt / 2.0));
    let k4 = &a2 * (h + &k3 * dt);
    h + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

fn rk4(g: &MatrixLieAlgebra, theta: &[Polynomial], t0: f64, t1: f64, steps: usize, h0: DMatrix<f64>) -> DMatrix<f64> {
    let dt = (t1 - t0) / steps as f64;
    (0..steps).fold(h0, |h, k| rk4_step(g, theta, t0 + k as f64 * dt, dt, &h))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub matrix: DMatrix<f64>,
    pub steps: usize,
    pub method: &'static str,
    pub interval: (f64, f64),
}

impl GroupElement {
    /// `|det h − exp(∫ tr θ)|`, relative to the expected value.
    pub fn determinant_check(&self, g: &MatrixLieAlgebra, theta: &[Polynomial], tol: f64) -> Check {
        let mut trace = Polynomial::zero(theta.first().map_or(&crate::poly::Ring::new(["t"]), |p| p.ring()));
        for (a, p) in theta.iter().enumerate() {
            let tr = (0..g.n).fold(BigRational::zero(), |acc, i| acc + &g.basis[a][i][i]);
            trace += &p.scale(&tr);
        }
        let (a, b) = self.interval;
        let exact = |x: f64| BigRational::from_float(x).expect("finite interval endpoint");
        let integral = eval_in_time(&trace.integrate_time(&exact(a), &exact(b)), 0.0);
        let expected = integral.exp();
        let det = self.matrix.determinant();
        Check::numeric("det h = exp(integral of tr theta)", "relative error", ((det - expected) / expected).abs(), tol)
            .metric("det h", det)
    }
}

/// Solves `ḣ = θ(t) h`, `h(0) = I` on `[0, 1]`.
pub fn integrate_path(g: &MatrixLieAlgebra, theta: &[Polynomial], steps: usize) -> Result<GroupElement> {
    integrate_path_on(g, theta, 0.0, 1.0, steps)
}

/// Solves `ḣ = θ(t) h` on `[a, b]` from `h(a) = I`.
pub fn integrate_path_on(g: &MatrixLieAlgebra, theta: &[Polynomial], a: f64, b: f64, steps: usize) -> Result<GroupElement> {
    g.check_path(theta)?;
    if steps == 0 {
        return Err(Error::Dimension("steps must be positive".into()));
    }
    let matrix = rk4(g, theta, a, b, steps, DMatrix::identity(g.n, g.n));
    Ok(GroupElement {
        matrix,
        steps,
        method: "rk4",
        interval: (a, b),
    })
}

/// `exp` of a matrix (scaling and squaring with Padé approximation).
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().exp()
}

/// Checks `Φ₁ = Ad_h ∘ Φ₀` in max norm.
pub fn verify_ad(
    g: &MatrixLieAlgebra,
    phi0: &DMatrix<f64>,
    phi1: &DMatrix<f64>,
    h: &GroupElement,
    tol: f64,
) -> Result<Report> {
    let r = g.dim();
    for (name, m) in [("Phi0", phi0), ("Phi1", phi1)] {
        if m.shape() != (r, r) {
            return Err(Error::Dimension(format!("{name} must be {r}x{r}")));
        }
    }
    let mut report = Report::new("Phi1 = Ad_h o Phi0");
    for (name, m) in [("Phi0", phi0), ("Phi1", phi1)] {
        let defect = g.morphism_defect(m);
        let mut c = Check::numeric(format!("{name} is a Lie algebra morphism"), "bracket defect", defect, tol);
        if !c.passed() {
            c.status = Status::Precondition;
        }
        report.push(c);
    }
    let ad = g.adjoint(&h.matrix)?;
    let err = (phi1 - ad * phi0).amax();
    report.push(Check::numeric("Phi1 = Ad_h o Phi0", "max error", err, tol));
    Ok(report)
}

/// `Φ_t = Ad_{h(t)} Φ₀` sampled on a uniform grid, with `θ̂` kept for
/// checking.
#[derive(Debug, Clone)]
pub struct SampledHomotopy {
    pub times: Vec<f64>,
    pub group: Vec<DMatrix<f64>>,
    pub phis: Vec<DMatrix<f64>>,
    pub thetas: Vec<DVector<f64>>,
    phi0: DMatrix<f64>,
    theta: Vec<Polynomial>,
}

/// Flows `Φ₀` along `θ̂`. `samples` intervals of the grid share `steps`
/// RK4 steps (at least one each).
pub fn flow_homotopy(
    g: &MatrixLieAlgebra,
    phi0: &DMatrix<f64>,
    theta: &[Polynomial],
    steps: usize,
    samples: usize,
) -> Result<SampledHomotopy> {
    g.check_path(theta)?;
    if samples == 0 || steps == 0 {
        return Err(Error::Dimension("steps and samples must be positive".into()));
    }
    let per = steps.div_ceil(samples).max(1);
    let mut h = DMatrix::identity(g.n, g.n);
    let mut out = SampledHomotopy {
        times: Vec::with_capacity(samples + 1),
        group: Vec::with_capacity(samples + 1),
        phis: Vec::with_capacity(samples + 1),
        thetas: Vec::with_capacity(samples + 1),
        phi0: phi0.clone(),
        theta: theta.to_vec(),
    };
    for k in 0..=samples {
        let t = k as f64 / samples as f64;
        if k > 0 {
            h = rk4(g, theta, (k - 1) as f64 / samples as f64, t, per, h);
        }
        out.phis.push(g.adjoint(&h)? * phi0);
        out.thetas.push(DVector::from_iterator(theta.len(), theta.iter().map(|p| eval_in_time(p, t))));
        out.times.push(t);
        out.group.push(h.clone());
    }
    Ok(out)
}

impl SampledHomotopy {
    /// `max ‖(Φ_{t+ε} − Φ_{t−ε})/2ε − ad_{θ̂_t} Φ_t‖` over interior grid
    /// points; `h(t ± ε)` comes from a few extra RK4 steps off the grid.
    pub fn finite_difference_residual(&self, g: &MatrixLieAlgebra, eps: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let sub = 8;
        for k in 1..self.times.len().saturating_sub(1) {
            let t = self.times[k];
            let h = &self.group[k];
            let fwd = rk4(g, &self.theta, t, t + eps, sub, h.clone());
            let bwd = rk4(g, &self.theta, t, t - eps, sub, h.clone());
            let dphi = (g.adjoint(&fwd)? - g.adjoint(&bwd)?) * &self.phi0 / (2.0 * eps);
            let expected = g.ad(self.thetas[k].as_slice()) * &self.phis[k];
            worst = worst.max((dphi - expected).amax());
        }
        Ok(worst)
    }

    /// Homotopy-condition check by central differences.
    pub fn check(&self, g: &MatrixLieAlgebra, eps: f64, tol: f64) -> Result<Report> {
        let mut report = Report::new("flowed homotopy");
        let r1 = self.finite_difference_residual(g, eps)?;
        let r2 = self.finite_difference_residual(g, eps / 2.0)?;
        let mut c = Check::numeric("dPhi/dt = ad_theta o Phi (central differences)", "residual", r1, tol)
            .metric("eps", eps)
            .metric("residual at eps/2", r2);
        if r2 > 0.0 {
            c = c.metric("ratio", r1 / r2);
        }
        report.push(c);
        let defect = self.phis.iter().map(|p| g.morphism_defect(p)).fold(0.0, f64::max);
        report.push(Check::numeric("Phi_t is a morphism at every sample", "bracket defect", defect, tol));
        Ok(report)
    }

    pub fn end(&self) -> (&DMatrix<f64>, GroupElement) {
        let h = GroupElement {
            matrix: self.group.last().unwrap().clone(),
            steps: 0,
            method: "rk4",
            interval: (0.0, 1.0),
        };
        (self.phis.last().unwrap(), h)
    }
}
