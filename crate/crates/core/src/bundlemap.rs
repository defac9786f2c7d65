//! Vector-bundle maps between algebroids and what they induce on forms.
//!
//! A [`BundleMap`] `Φ: A_M → A_N` is a base map `y_j = φ_j(x[, t])` plus a
//! fiber matrix `Φ(e_a) = Σ_b Φ^b_a ε_b`, all entries in the source ring.
//! Entries containing `t` describe a smooth family `Φ_t`, and every check
//! on such a map is an identity in `t`.
//!
//! The pullback is the graded-algebra morphism fixed by its generators:
//!
//! ```text
//! Φ*(y_j) = φ_j(x),    Φ*(ε^b) = Σ_a Φ^b_a(x) e^a.
//! ```
//!
//! `Φ` is a Lie algebroid morphism iff `Φ* ∘ d_N = d_M ∘ Φ*`. Both sides are
//! `Φ*`-derivations of degree 1 (the difference `D` satisfies
//! `D(α∧β) = Dα∧Φ*β + (−1)^{|α|}Φ*α∧Dβ`), and `Ω(A_N)` is generated by the
//! coordinates and the frame covectors, so the identity only needs checking
//! on those `n + r_N` generators.

use std::sync::Arc;

use crate::algebroid::LieAlgebroid;
use crate::error::{Error, Result};
use crate::exterior::AlgebroidForm;
use crate::poly::{Polynomial, Ring};
use crate::report::{Check, Report};

use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq)]
pub struct BundleMap {
    source: Arc<LieAlgebroid>,
    target: Arc<LieAlgebroid>,
    base_map: Vec<Polynomial>,
    /// `fiber[b][a] = Φ^b_a`.
    fiber: Vec<Vec<Polynomial>>,
}

/// A section of `φ*A_N`: one polynomial per target frame direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportedSection {
    base_map: Vec<Polynomial>,
    components: Vec<Polynomial>,
}

impl SupportedSection {
    pub fn new(map: &BundleMap, components: Vec<Polynomial>) -> Result<Self> {
        if components.len() != map.target.rank() {
            return Err(Error::RankMismatch {
                expected: map.target.rank(),
                found: components.len(),
            });
        }
        for c in &components {
            if c.ring() != map.source.ring() {
                return Err(ring_mismatch(map.source.ring(), c.ring()));
            }
        }
        Ok(SupportedSection {
            base_map: map.base_map.clone(),
            components,
        })
    }

    pub fn zero(map: &BundleMap) -> Self {
        let zero = Polynomial::zero(map.source.ring());
        SupportedSection {
            base_map: map.base_map.clone(),
            components: vec![zero; map.target.rank()],
        }
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn base_map(&self) -> &[Polynomial] {
        &self.base_map
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }
}

fn ring_mismatch(expected: &Ring, found: &Ring) -> Error {
    Error::RingMismatch {
        left: expected.vars().join(", "),
        right: found.vars().join(", "),
    }
}

impl BundleMap {
    pub fn new(
        source: Arc<LieAlgebroid>,
        target: Arc<LieAlgebroid>,
        base_map: Vec<Polynomial>,
        fiber: Vec<Vec<Polynomial>>,
    ) -> Result<Self> {
        if base_map.len() != target.base_dim() {
            return Err(Error::Dimension(format!(
                "base map needs {} components, got {}",
                target.base_dim(),
                base_map.len()
            )));
        }
        if fiber.len() != target.rank() || fiber.iter().any(|row| row.len() != source.rank()) {
            return Err(Error::Dimension(format!(
                "fiber matrix must be {}x{}",
                target.rank(),
                source.rank()
            )));
        }
        for p in base_map.iter().chain(fiber.iter().flatten()) {
            if p.ring() != source.ring() {
                return Err(ring_mismatch(source.ring(), p.ring()));
            }
        }
        Ok(BundleMap {
            source,
            target,
            base_map,
            fiber,
        })
    }

    pub fn identity(algebroid: Arc<LieAlgebroid>) -> Self {
        let ring = algebroid.ring().clone();
        let base_map = (0..algebroid.base_dim())
            .map(|i| Polynomial::var_at(&ring, i))
            .collect();
        let r = algebroid.rank();
        let fiber = (0..r)
            .map(|b| {
                (0..r)
                    .map(|a| Polynomial::from_int(&ring, (a == b) as i64))
                    .collect()
            })
            .collect();
        BundleMap {
            source: algebroid.clone(),
            target: algebroid,
            base_map,
            fiber,
        }
    }

    pub fn source(&self) -> &Arc<LieAlgebroid> {
        &self.source
    }

    pub fn target(&self) -> &Arc<LieAlgebroid> {
        &self.target
    }

    pub fn base_map(&self) -> &[Polynomial] {
        &self.base_map
    }

    pub fn fiber(&self) -> &[Vec<Polynomial>] {
        &self.fiber
    }

    pub fn fiber_entry(&self, b: usize, a: usize) -> &Polynomial {
        &self.fiber[b][a]
    }

    pub fn is_time_dependent(&self) -> bool {
        self.base_map
            .iter()
            .chain(self.fiber.iter().flatten())
            .any(Polynomial::contains_time)
    }

    /// Images of the target ring's variables: `φ_j` for the coordinates and
    /// `t` for time.
    fn substitution_images(&self) -> Vec<Polynomial> {
        let mut images = self.base_map.clone();
        images.push(Polynomial::time(self.source.ring()).expect("algebroid rings carry t"));
        images
    }

    /// `g ↦ g ∘ φ`.
    pub fn pull_function(&self, g: &Polynomial) -> Result<Polynomial> {
        if g.ring() != self.target.ring() {
            return Err(ring_mismatch(self.target.ring(), g.ring()));
        }
        g.substitute(&self.substitution_images(), self.source.ring())
    }

    /// `Φ*(ε^b) = Σ_a Φ^b_a e^a`.
    pub fn pull_covector(&self, b: usize) -> AlgebroidForm {
        let ring = self.source.ring();
        let mut out = AlgebroidForm::zero(ring, self.source.rank(), 1);
        for (a, entry) in self.fiber[b].iter().enumerate() {
            out.add_component(vec![a], entry);
        }
        out
    }

    /// Replaces the frame covectors of a target-rank form whose coefficients
    /// already live in the source ring by their pullbacks.
    fn apply_fiber(&self, w: &AlgebroidForm) -> Result<AlgebroidForm> {
        let ring = self.source.ring();
        let r_m = self.source.rank();
        let mut out = AlgebroidForm::zero(ring, r_m, w.degree());
        if w.is_zero() {
            return Ok(out);
        }
        let pulled: Vec<AlgebroidForm> = (0..self.target.rank()).map(|b| self.pull_covector(b)).collect();
        for (index, g) in w.components() {
            let mut term = AlgebroidForm::function(g.clone(), r_m);
            for &b in index {
                term = term.wedge(&pulled[b])?;
                if term.is_zero() {
                    break;
                }
            }
            if !term.is_zero() {
                out += &term;
            }
        }
        Ok(out)
    }

    fn check_target_form(&self, w: &AlgebroidForm) -> Result<()> {
        if w.rank() != self.target.rank() {
            return Err(Error::RankMismatch {
                expected: self.target.rank(),
                found: w.rank(),
            });
        }
        if w.ring() != self.target.ring() {
            return Err(ring_mismatch(self.target.ring(), w.ring()));
        }
        Ok(())
    }

    fn substitute_coefficients(&self, w: &AlgebroidForm) -> Result<AlgebroidForm> {
        let images = self.substitution_images();
        let ring = self.source.ring();
        w.try_map_coefficients(ring, |c| c.substitute(&images, ring))
    }

    /// `Φ*w` for a form on `A_N`.
    pub fn pullback(&self, w: &AlgebroidForm) -> Result<AlgebroidForm> {
        self.check_target_form(w)?;
        self.apply_fiber(&self.substitute_coefficients(w)?)
    }

    /// The `Φ*`-derivation of degree −1 attached to `θ`:
    ///
    /// ```text
    /// i(g ε^{b1}∧…∧ε^{bk}) = (g∘φ) Σ_j (−1)^{j−1} θ^{bj} Φ*ε^{b1}∧…(omit j)…∧Φ*ε^{bk}
    /// ```
    ///
    /// Functions go to zero.
    pub fn contraction(&self, theta: &SupportedSection, w: &AlgebroidForm) -> Result<AlgebroidForm> {
        if theta.base_map != self.base_map {
            return Err(Error::BaseMapMismatch);
        }
        self.check_target_form(w)?;
        if w.degree() == 0 {
            return Ok(AlgebroidForm::zero(self.source.ring(), self.source.rank(), 0));
        }
        let contracted = self
            .substitute_coefficients(w)?
            .contract_first(&theta.components)?;
        self.apply_fiber(&contracted)
    }

    /// Values `i_θ^Φ(ε^b)`, which determine the derivation.
    pub fn contraction_values(&self, theta: &SupportedSection) -> Result<Vec<Polynomial>> {
        (0..self.target.rank())
            .map(|b| {
                let eb = AlgebroidForm::covector(self.target.ring(), self.target.rank(), b);
                Ok(self.contraction(theta, &eb)?.as_function())
            })
            .collect()
    }

    /// Inverse of [`BundleMap::contraction_values`]: the derivation with
    /// `V(ε^b)` given is contraction against `θ^b = V(ε^b)`.
    pub fn derivation_to_section(&self, values: Vec<Polynomial>) -> Result<SupportedSection> {
        SupportedSection::new(self, values)
    }

    /// `Φ* ∘ d_N = d_M ∘ Φ*` on the generators `y_j` and `ε^b`.
    pub fn is_morphism(&self) -> Report {
        let mut report = Report::new("Lie algebroid morphism");
        let mut check = Check::identity("pullback commutes with d on generators");
        let n_ring = self.target.ring();
        let r_n = self.target.rank();
        let result: Result<()> = (|| {
            for j in 0..self.target.base_dim() {
                let y = AlgebroidForm::function(Polynomial::var_at(n_ring, j), r_n);
                let lhs = self.pullback(&self.target.differential(&y)?)?;
                let rhs = self.source.differential(&self.pullback(&y)?)?;
                check.residual(format!("d({})", n_ring.vars()[j]), &(&lhs - &rhs));
            }
            for b in 0..r_n {
                let eb = AlgebroidForm::covector(n_ring, r_n, b);
                let lhs = self.pullback(&self.target.differential(&eb)?)?;
                let rhs = self.source.differential(&self.pullback(&eb)?)?;
                check.residual(format!("d(e^{})", b + 1), &(&lhs - &rhs));
            }
            Ok(())
        })();
        if let Err(e) = result {
            check.fail(e.to_string());
        }
        report.push(check);
        report
    }

    /// `self ∘ inner`: substitution in the base, matrix product with
    /// substituted entries in the fiber.
    pub fn compose(&self, inner: &BundleMap) -> Result<BundleMap> {
        if inner.target != self.source {
            return Err(Error::AlgebroidMismatch(
                "inner map's target is not the outer map's source".into(),
            ));
        }
        let ring = inner.source.ring();
        let pulled_base = inner.substitution_images();
        let base_map = self
            .base_map
            .iter()
            .map(|p| p.substitute(&pulled_base, ring))
            .collect::<Result<Vec<_>>>()?;
        let outer_fiber = self
            .fiber
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.substitute(&pulled_base, ring))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let fiber = matmul(&outer_fiber, &inner.fiber, ring);
        BundleMap::new(inner.source.clone(), self.target.clone(), base_map, fiber)
    }

    /// Applies `f` to every entry (base map and fiber).
    pub fn try_map_entries(&self, mut f: impl FnMut(&Polynomial) -> Result<Polynomial>) -> Result<BundleMap> {
        let base_map = self.base_map.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        let fiber = self
            .fiber
            .iter()
            .map(|row| row.iter().map(&mut f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        BundleMap::new(self.source.clone(), self.target.clone(), base_map, fiber)
    }

    /// The member of the family at a fixed time.
    pub fn at_time(&self, t: &BigRational) -> BundleMap {
        self.try_map_entries(|p| Ok(p.at_time(t)))
            .expect("fixing t keeps shapes")
    }
}

pub(crate) fn matmul(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>], ring: &Ring) -> Vec<Vec<Polynomial>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Polynomial::zero(ring);
                    for (k, aik) in row.iter().enumerate() {
                        if !aik.is_zero() && !b[k][j].is_zero() {
                            acc += &(aik * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Matrix times vector of polynomials.
pub(crate) fn matvec(a: &[Vec<Polynomial>], v: &[Polynomial], ring: &Ring) -> Vec<Polynomial> {
    a.iter()
        .map(|row| {
            let mut acc = Polynomial::zero(ring);
            for (aik, vk) in row.iter().zip(v) {
                if !aik.is_zero() && !vk.is_zero() {
                    acc += &(aik * vk);
                }
            }
            acc
        })
        .collect()
}
