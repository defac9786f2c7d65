//! Tangent bundles, homotopies induced by smooth families of maps, and
//! deformation retractions onto subalgebroids in adapted coordinates.
//!
//! For `φ(x, t)` the pair `Φ_t = dφ_t`, `θ = ∂φ/∂t` is always a natural
//! homotopy, and its homotopy condition is the classical formula
//! `∂ₜφ_t* = d i + i d`. That makes [`homotopy_from_map`] the reference
//! against which the sign conventions of the general checks are fixed.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_rational::BigRational;

use crate::algebroid::LieAlgebroid;
use crate::bundlemap::{BundleMap, SupportedSection};
use crate::error::{Error, Result};
use crate::homotopy::NaturalHomotopy;
use crate::poly::{Polynomial, Ring};
use crate::report::{Check, Report, Status};

/// Numeric rank threshold on singular values.
pub const RANK_THRESHOLD: f64 = 1e-9;

/// `Tℝ^m` with coordinates `x1..xm`, frame `e_i = ∂/∂x_i`.
pub fn tangent_algebroid(m: usize) -> LieAlgebroid {
    let coords: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    tangent_algebroid_on(&coords).expect("generated coordinate names are valid")
}

/// The tangent algebroid over the given coordinate names.
pub fn tangent_algebroid_on<S: AsRef<str>>(coords: &[S]) -> Result<LieAlgebroid> {
    let m = coords.len();
    let mut a = LieAlgebroid::new(coords.iter().map(|c| c.as_ref().to_string()), m)?;
    for i in 0..m {
        let row = (0..m)
            .map(|j| Polynomial::from_int(a.ring(), (i == j) as i64))
            .collect();
        a.set_anchor(i, row)?;
    }
    Ok(a)
}

/// Identity anchor and vanishing brackets.
pub fn is_tangent(a: &LieAlgebroid) -> bool {
    let m = a.base_dim();
    a.rank() == m
        && (0..m).all(|i| (0..m).all(|j| a.anchor(i, j).as_constant() == Some(BigRational::from_integer(((i == j) as i64).into()))))
        && (0..m).all(|x| (0..m).all(|y| a.bracket_of_frame(x, y).iter().all(Polynomial::is_zero)))
}

/// `Φ_t = ∂φ/∂x`, `θ = ∂φ/∂t` between tangent algebroids.
pub fn homotopy_from_map(
    source: Arc<LieAlgebroid>,
    target: Arc<LieAlgebroid>,
    phi: Vec<Polynomial>,
) -> Result<NaturalHomotopy> {
    if !is_tangent(&source) || !is_tangent(&target) {
        return Err(Error::AlgebroidMismatch("homotopy_from_map needs tangent algebroids".into()));
    }
    let fiber = phi
        .iter()
        .map(|f| (0..source.base_dim()).map(|i| f.diff_at(i)).collect())
        .collect();
    let theta = phi.iter().map(Polynomial::diff_time).collect();
    let map = BundleMap::new(source, target, phi, fiber)?;
    let section = SupportedSection::new(&map, theta)?;
    NaturalHomotopy::new(map, section)
}

/// `A_R ⊂ A_M` in adapted form: `R` is cut out by setting some coordinates
/// to zero, and `A_R` is spanned by a subset of the frame over `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubalgebroidPresentation {
    ambient: Arc<LieAlgebroid>,
    dropped: Vec<usize>,
    kept_coords: Vec<usize>,
    kept_frame: Vec<usize>,
    sub: Arc<LieAlgebroid>,
    inclusion: BundleMap,
}

impl SubalgebroidPresentation {
    /// `dropped` are coordinate indices set to zero, `frame` the indices of
    /// frame elements spanning `A_R`. The structure of `A_R` is the
    /// restriction of the ambient one; whether it closes is reported by
    /// [`Self::closure`].
    pub fn new(ambient: Arc<LieAlgebroid>, dropped: &[usize], frame: &[usize]) -> Result<Self> {
        let m = ambient.base_dim();
        let mut dropped = dropped.to_vec();
        dropped.sort_unstable();
        dropped.dedup();
        let mut frame = frame.to_vec();
        frame.sort_unstable();
        frame.dedup();
        if let Some(&i) = dropped.iter().find(|&&i| i >= m) {
            return Err(Error::Dimension(format!("coordinate index {} out of range", i + 1)));
        }
        if let Some(&a) = frame.iter().find(|&&a| a >= ambient.rank()) {
            return Err(Error::Dimension(format!("frame index {} out of range", a + 1)));
        }
        let kept_coords: Vec<usize> = (0..m).filter(|i| !dropped.contains(i)).collect();
        let names: Vec<String> = kept_coords.iter().map(|&i| ambient.coords()[i].clone()).collect();
        let mut sub = LieAlgebroid::new(names, frame.len())?;
        let restrict = restriction(ambient.ring(), &dropped, &sub.ring().clone())?;
        for (a2, &a) in frame.iter().enumerate() {
            let row = kept_coords
                .iter()
                .map(|&i| restrict(ambient.anchor(a, i)))
                .collect::<Result<Vec<_>>>()?;
            sub.set_anchor(a2, row)?;
            for (b2, &b) in frame.iter().enumerate().skip(a2 + 1) {
                let comps = frame
                    .iter()
                    .map(|&c| restrict(ambient.structure(a, b, c)))
                    .collect::<Result<Vec<_>>>()?;
                sub.set_bracket(a2, b2, comps)?;
            }
        }
        let sub = Arc::new(sub);
        let r = sub.ring();
        let base_map = (0..m)
            .map(|i| match kept_coords.iter().position(|&k| k == i) {
                Some(k) => Polynomial::var_at(r, k),
                None => Polynomial::zero(r),
            })
            .collect();
        let fiber = (0..ambient.rank())
            .map(|b| {
                (0..frame.len())
                    .map(|a2| Polynomial::from_int(r, (frame[a2] == b) as i64))
                    .collect()
            })
            .collect();
        let inclusion = BundleMap::new(sub.clone(), ambient.clone(), base_map, fiber)?;
        Ok(SubalgebroidPresentation {
            ambient,
            dropped,
            kept_coords,
            kept_frame: frame,
            sub,
            inclusion,
        })
    }

    pub fn ambient(&self) -> &Arc<LieAlgebroid> {
        &self.ambient
    }

    pub fn subalgebroid(&self) -> &Arc<LieAlgebroid> {
        &self.sub
    }

    pub fn inclusion(&self) -> &BundleMap {
        &self.inclusion
    }

    pub fn dropped_coords(&self) -> &[usize] {
        &self.dropped
    }

    pub fn kept_frame(&self) -> &[usize] {
        &self.kept_frame
    }

    /// Brackets of kept frame elements stay in the kept span over `R`, and
    /// their anchors are tangent to `R`.
    pub fn closure(&self) -> Check {
        let mut check = Check::identity("A_R closes under bracket and anchor");
        let res: Result<()> = (|| {
            let restrict = restriction(self.ambient.ring(), &self.dropped, self.sub.ring())?;
            for &a in &self.kept_frame {
                for &i in &self.dropped {
                    check.residual(
                        format!("anchor(e_{})^{}", a + 1, self.ambient.coords()[i]),
                        &restrict(self.ambient.anchor(a, i))?,
                    );
                }
                for &b in self.kept_frame.iter().filter(|&&b| b > a) {
                    for c in (0..self.ambient.rank()).filter(|c| !self.kept_frame.contains(c)) {
                        check.residual(
                            format!("[e_{},e_{}]^{}", a + 1, b + 1, c + 1),
                            &restrict(self.ambient.structure(a, b, c))?,
                        );
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = res {
            check.fail(e.to_string());
        }
        check
    }

    /// `Φ̌: A_M → A_R` from a map `Φ: A_M → A_M` whose image lies in `A_R`,
    /// keeping the rows of the retained coordinates and frame elements.
    pub fn factor(&self, map: &BundleMap) -> Result<BundleMap> {
        let base_map = self.kept_coords.iter().map(|&i| map.base_map()[i].clone()).collect();
        let fiber = self.kept_frame.iter().map(|&b| map.fiber()[b].clone()).collect();
        BundleMap::new(map.source().clone(), self.sub.clone(), base_map, fiber)
    }
}

/// `p ↦ p|_R` as a polynomial on `R`.
fn restriction(ambient: &Ring, dropped: &[usize], sub: &Ring) -> Result<impl Fn(&Polynomial) -> Result<Polynomial>> {
    let target = sub.clone();
    let images = ambient
        .vars()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            if dropped.contains(&i) {
                Ok(Polynomial::zero(&target))
            } else {
                Polynomial::var(&target, name)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(move |p: &Polynomial| p.substitute(&images, &target))
}

fn identity_residuals(check: &mut Check, map: &BundleMap, tag: &str) {
    let id = BundleMap::identity(map.source().clone());
    for (j, (a, b)) in map.base_map().iter().zip(id.base_map()).enumerate() {
        check.residual(format!("{tag} phi_{}", j + 1), &(a - b));
    }
    for (b, (ra, rb)) in map.fiber().iter().zip(id.fiber()).enumerate() {
        for (a, (x, y)) in ra.iter().zip(rb).enumerate() {
            check.residual(format!("{tag} Phi[{}][{}]", b + 1, a + 1), &(x - y));
        }
    }
}

/// Verifies that `h` deforms `id_{A_M}` into a retraction onto `A_R`.
pub fn check_retraction(h: &NaturalHomotopy, s: &SubalgebroidPresentation) -> Report {
    let mut report = Report::new("deformation retraction");
    if h.source() != &s.ambient || h.target() != &s.ambient {
        report.push(
            Check::with_status("homotopy acts on the ambient algebroid", Status::Precondition)
                .note("source and target must both be the ambient algebroid of A_R"),
        );
        return report;
    }
    if !h.check_homotopy().passed() {
        report.push(Check::with_status("retraction", Status::Precondition).note("the homotopy condition fails"));
        return report;
    }
    report.push(s.closure());

    let phi0 = h.start_map();
    let phi1 = h.end_map();
    let mut start = Check::identity("Phi_0 = id");
    identity_residuals(&mut start, &phi0, "Phi_0");
    report.push(start);

    let mut lands = Check::identity("Phi_1 lands in A_R");
    for &i in &s.dropped {
        lands.residual(format!("phi_1 {}", s.ambient.coords()[i]), &phi1.base_map()[i]);
    }
    for b in (0..s.ambient.rank()).filter(|b| !s.kept_frame.contains(b)) {
        for (a, entry) in phi1.fiber()[b].iter().enumerate() {
            lands.residual(format!("Phi_1[{}][{}]", b + 1, a + 1), entry);
        }
    }
    report.push(lands);

    let mut section = Check::identity("Phi1check o i = id on A_R");
    match s.factor(&phi1).and_then(|f| f.compose(&s.inclusion)) {
        Ok(composite) => identity_residuals(&mut section, &composite, "Phi1check o i"),
        Err(e) => section.fail(e.to_string()),
    }
    report.push(section);

    let mut idem = Check::identity("Phi_1 o Phi_1 = Phi_1");
    match phi1.compose(&phi1) {
        Ok(sq) => {
            for (j, (a, b)) in sq.base_map().iter().zip(phi1.base_map()).enumerate() {
                idem.residual(format!("phi_{}", j + 1), &(a - b));
            }
            for (b, (ra, rb)) in sq.fiber().iter().zip(phi1.fiber()).enumerate() {
                for (a, (x, y)) in ra.iter().zip(rb).enumerate() {
                    idem.residual(format!("Phi[{}][{}]", b + 1, a + 1), &(x - y));
                }
            }
        }
        Err(e) => idem.fail(e.to_string()),
    }
    report.push(idem);
    report
}

/// `Im dφ̌ + Im ♯_{A_R} = TR` at each sample, by numeric rank of the
/// concatenated Jacobian and anchor matrices.
///
/// `phi_check` are the `dim R` components of `φ̌` as polynomials on `M`,
/// and each sample is a point of `M`.
pub fn check_transversality(phi_check: &[Polynomial], sub: &LieAlgebroid, samples: &[Vec<f64>]) -> Report {
    let mut report = Report::new("transversality to the characteristic foliation");
    let dim_r = sub.base_dim();
    if phi_check.len() != dim_r {
        report.push(
            Check::with_status("base map shape", Status::Precondition)
                .note(format!("expected {dim_r} components, got {}", phi_check.len())),
        );
        return report;
    }
    let m_ring = phi_check.first().map(|p| p.ring().clone());
    for x in samples {
        let name = format!(
            "sample ({})",
            x.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(", ")
        );
        let m = m_ring.as_ref().map_or(0, |r| r.len() - 1);
        if x.len() != m && dim_r > 0 {
            report.push(
                Check::with_status(name, Status::Precondition)
                    .note(format!("point needs {m} coordinates")),
            );
            continue;
        }
        let mut at_m = x.clone();
        at_m.push(0.0);
        let y: Vec<f64> = phi_check.iter().map(|p| p.eval_f64_at(&at_m)).collect();
        let mut at_r = y.clone();
        at_r.push(0.0);
        let cols = m + sub.rank();
        let mut mat = DMatrix::<f64>::zeros(dim_r, cols);
        for (j, p) in phi_check.iter().enumerate() {
            for i in 0..m {
                mat[(j, i)] = p.diff_at(i).eval_f64_at(&at_m);
            }
            for a in 0..sub.rank() {
                mat[(j, m + a)] = sub.anchor(a, j).eval_f64_at(&at_r);
            }
        }
        let rank = if dim_r == 0 || cols == 0 {
            0
        } else {
            mat.singular_values().iter().filter(|&&s| s > RANK_THRESHOLD).count()
        };
        let status = if rank == dim_r { Status::Pass } else { Status::Fail };
        report.push(
            Check::with_status(name, status)
                .metric("rank", rank as f64)
                .metric("dim R", dim_r as f64),
        );
    }
    report
}
