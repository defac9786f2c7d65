//! Natural homotopies `Ψ = Φ + θ dt` and the calculus on `A_M × TI`.
//!
//! A homotopy is stored as an ordered list of [`Piece`]s covering `[0, 1]`.
//! A smooth homotopy has one piece; vertical composites have several, and
//! every check runs piece by piece. Entries of a piece are polynomials in
//! the global time `t`, and only `Φ` has to match at the junctions.
//!
//! Forms on the product split as `α + β∧dt` ([`ProductForm`]) and
//!
//! ```text
//! d(α + β∧dt) = dα + ((−1)^k ∂ₜα + dβ)∧dt
//! Ψ*w         = Φ*w − (−1)^{|w|} i_θ^Φ(w)∧dt
//! ```
//!
//! Comparing the `dt` parts of `Ψ*∘d` and `d∘Ψ*` gives the homotopy
//! condition used throughout, `∂ₜΦ* = d∘i + i∘d`, and integrating it over
//! `[0, 1]` gives `Φ₁* − Φ₀* = dΘ + Θd` with `Θ = ∫₀¹ i dt`.

use std::fmt;
use std::ops::Sub;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebroid::LieAlgebroid;
use crate::bundlemap::{matvec, BundleMap, SupportedSection};
use crate::error::{Error, Result};
use crate::exterior::AlgebroidForm;
use crate::poly::Polynomial;
use crate::report::{Check, Report, Status};

/// `α + β∧dt` with `deg α = k` and `deg β = k − 1` (`β` absent for `k = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductForm {
    alpha: AlgebroidForm,
    beta: Option<AlgebroidForm>,
}

impl ProductForm {
    pub fn new(alpha: AlgebroidForm, beta: AlgebroidForm) -> Result<Self> {
        if beta.degree() + 1 != alpha.degree() {
            return Err(Error::Dimension(format!(
                "dt part must have degree {}, got {}",
                alpha.degree().saturating_sub(1),
                beta.degree()
            )));
        }
        if beta.rank() != alpha.rank() {
            return Err(Error::RankMismatch {
                expected: alpha.rank(),
                found: beta.rank(),
            });
        }
        Ok(ProductForm {
            alpha,
            beta: Some(beta),
        })
    }

    /// A form with no `dt` part.
    pub fn horizontal(alpha: AlgebroidForm) -> Self {
        let beta = (alpha.degree() > 0)
            .then(|| AlgebroidForm::zero(alpha.ring(), alpha.rank(), alpha.degree() - 1));
        ProductForm { alpha, beta }
    }

    /// `dt` itself.
    pub fn dt(ring: &crate::poly::Ring, rank: usize) -> Self {
        ProductForm {
            alpha: AlgebroidForm::zero(ring, rank, 1),
            beta: Some(AlgebroidForm::function(Polynomial::one(ring), rank)),
        }
    }

    pub fn degree(&self) -> usize {
        self.alpha.degree()
    }

    pub fn alpha(&self) -> &AlgebroidForm {
        &self.alpha
    }

    /// The `dt` part; `None` for degree 0.
    pub fn beta(&self) -> Option<&AlgebroidForm> {
        self.beta.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.as_ref().is_none_or(AlgebroidForm::is_zero)
    }

    /// The differential of `A_M × TI`, with `A` the algebroid of `A_M`.
    pub fn differential(&self, a: &LieAlgebroid) -> Result<ProductForm> {
        let k = self.degree();
        let alpha = a.differential(&self.alpha)?;
        let mut beta = self.alpha.diff_time();
        if k % 2 == 1 {
            beta = -beta;
        }
        if let Some(b) = &self.beta {
            beta += &a.differential(b)?;
        }
        Ok(ProductForm {
            alpha,
            beta: Some(beta),
        })
    }
}

impl Sub for &ProductForm {
    type Output = ProductForm;
    fn sub(self, other: &ProductForm) -> ProductForm {
        let beta = match (&self.beta, &other.beta) {
            (Some(a), Some(b)) => Some(a - b),
            (None, None) => None,
            _ => panic!("subtracting product forms of different degree"),
        };
        ProductForm {
            alpha: &self.alpha - &other.alpha,
            beta,
        }
    }
}

impl fmt::Display for ProductForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.beta {
            Some(b) if !b.is_zero() => {
                if self.alpha.is_zero() {
                    write!(f, "({b})^dt")
                } else {
                    write!(f, "{} + ({b})^dt", self.alpha)
                }
            }
            _ => write!(f, "{}", self.alpha),
        }
    }
}

impl crate::report::IsZeroDisplay for ProductForm {
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

/// One smooth stretch `[start, end]` of a homotopy.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    start: BigRational,
    end: BigRational,
    map: BundleMap,
    section: SupportedSection,
}

impl Piece {
    pub fn new(start: BigRational, end: BigRational, map: BundleMap, section: SupportedSection) -> Result<Self> {
        if start >= end {
            return Err(Error::Dimension(format!("empty interval [{start}, {end}]")));
        }
        if section.base_map() != map.base_map() {
            return Err(Error::BaseMapMismatch);
        }
        Ok(Piece {
            start,
            end,
            map,
            section,
        })
    }

    pub fn start(&self) -> &BigRational {
        &self.start
    }

    pub fn end(&self) -> &BigRational {
        &self.end
    }

    pub fn map(&self) -> &BundleMap {
        &self.map
    }

    pub fn section(&self) -> &SupportedSection {
        &self.section
    }

    fn contraction(&self, w: &AlgebroidForm) -> Result<AlgebroidForm> {
        self.map.contraction(&self.section, w)
    }

    /// `Ψ*w = (Φ*w, −(−1)^{|w|} i_θ^Φ w)`.
    pub fn product_pullback(&self, w: &AlgebroidForm) -> Result<ProductForm> {
        let alpha = self.map.pullback(w)?;
        if w.degree() == 0 {
            return Ok(ProductForm::horizontal(alpha));
        }
        let mut beta = self.contraction(w)?;
        if w.degree().is_multiple_of(2) {
            beta = -beta;
        }
        ProductForm::new(alpha, beta)
    }

    fn conditions(&self) -> Vec<Check> {
        let mut morphism = self.map.is_morphism().checks.remove(0);
        morphism.name = "Phi_t is a morphism".into();
        let mut condition = Check::identity("homotopy condition dPhi*/dt = d i + i d");
        if let Err(e) = self.homotopy_residuals(&mut condition) {
            condition.fail(e.to_string());
        }
        vec![morphism, condition]
    }

    fn homotopy_residuals(&self, check: &mut Check) -> Result<()> {
        let source = self.map.source();
        let target = self.map.target();
        let n_ring = target.ring();
        let r_n = target.rank();
        for (j, phi_j) in self.map.base_map().iter().enumerate() {
            let dy = target.function_differential(&Polynomial::var_at(n_ring, j));
            let i_dy = self.contraction(&dy)?.as_function();
            check.residual(n_ring.vars()[j].clone(), &(&phi_j.diff_time() - &i_dy));
        }
        for b in 0..r_n {
            let eb = AlgebroidForm::covector(n_ring, r_n, b);
            let lhs = self.map.pull_covector(b).diff_time();
            let d_i = source.function_differential(&self.contraction(&eb)?.as_function());
            let i_d = self.contraction(&target.covector_differential(b))?;
            check.residual(format!("e^{}", b + 1), &(&(&lhs - &d_i) - &i_d));
        }
        Ok(())
    }

    /// Reads the piece in a new time `s` with old time `t = λs + μ`.
    /// `θ` picks up the factor `λ`.
    fn reparametrize(&self, lambda: &BigRational, mu: &BigRational) -> Result<Piece> {
        let ring = self.map.source().ring();
        let ti = ring.time_index().expect("algebroid rings carry t");
        let t = Polynomial::var_at(ring, ti);
        let new_t = &t.scale(lambda) + &Polynomial::constant(ring, mu.clone());
        let sub = |p: &Polynomial| p.substitute_var(ti, &new_t);
        let map = self.map.try_map_entries(sub)?;
        let comps = self
            .section
            .components()
            .iter()
            .map(|p| Ok(sub(p)?.scale(lambda)))
            .collect::<Result<Vec<_>>>()?;
        let section = SupportedSection::new(&map, comps)?;
        let a = (&self.start - mu) / lambda;
        let b = (&self.end - mu) / lambda;
        let (start, end) = if a < b { (a, b) } else { (b, a) };
        Piece::new(start, end, map, section)
    }

    /// The same data on a shorter interval.
    fn restrict(&self, start: &BigRational, end: &BigRational) -> Piece {
        Piece {
            start: start.clone(),
            end: end.clone(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaturalHomotopy {
    pieces: Vec<Piece>,
}

impl NaturalHomotopy {
    /// A smooth homotopy on `[0, 1]`.
    pub fn new(map: BundleMap, section: SupportedSection) -> Result<Self> {
        let piece = Piece::new(BigRational::zero(), BigRational::one(), map, section)?;
        Ok(NaturalHomotopy { pieces: vec![piece] })
    }

    /// `Φ_t ≡ Φ`, `θ = 0`.
    pub fn constant(map: BundleMap) -> Self {
        let section = SupportedSection::zero(&map);
        Self::new(map, section).expect("unit interval is nonempty")
    }

    /// Assembles pieces; they must tile `[0, 1]` in order, share source and
    /// target, and agree on `Φ` at every junction.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        let first = pieces
            .first()
            .ok_or_else(|| Error::Dimension("a homotopy needs at least one piece".into()))?;
        if !first.start.is_zero() || !pieces.last().unwrap().end.is_one() {
            return Err(Error::Dimension("pieces must cover [0, 1]".into()));
        }
        for w in pieces.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            if p.end != q.start {
                return Err(Error::Dimension(format!(
                    "pieces leave a gap or overlap at {} / {}",
                    p.end, q.start
                )));
            }
            if p.map.source() != q.map.source() || p.map.target() != q.map.target() {
                return Err(Error::AlgebroidMismatch("pieces join different algebroids".into()));
            }
            if p.map.at_time(&p.end) != q.map.at_time(&q.start) {
                return Err(Error::EndpointMismatch(format!("Phi jumps at t = {}", p.end)));
            }
        }
        Ok(NaturalHomotopy { pieces })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn source(&self) -> &std::sync::Arc<LieAlgebroid> {
        self.pieces[0].map.source()
    }

    pub fn target(&self) -> &std::sync::Arc<LieAlgebroid> {
        self.pieces[0].map.target()
    }

    /// The single piece of a smooth homotopy.
    pub fn single(&self) -> Result<&Piece> {
        match self.pieces.as_slice() {
            [p] => Ok(p),
            ps => Err(Error::MultiPiece(ps.len())),
        }
    }

    /// `Φ₀`.
    pub fn start_map(&self) -> BundleMap {
        let p = &self.pieces[0];
        p.map.at_time(&p.start)
    }

    /// `Φ₁`.
    pub fn end_map(&self) -> BundleMap {
        let p = self.pieces.last().unwrap();
        p.map.at_time(&p.end)
    }

    pub fn product_pullback(&self, w: &AlgebroidForm) -> Result<ProductForm> {
        self.single()?.product_pullback(w)
    }

    fn piece_prefix(&self, k: usize) -> String {
        if self.pieces.len() == 1 {
            String::new()
        } else {
            let p = &self.pieces[k];
            format!("piece {} [{}, {}]: ", k + 1, p.start, p.end)
        }
    }

    /// `Φ_t` is a morphism and `∂ₜΦ* = d i + i d` on generators, per piece.
    pub fn check_homotopy(&self) -> Report {
        let mut report = Report::new("natural homotopy");
        for (k, p) in self.pieces.iter().enumerate() {
            let prefix = self.piece_prefix(k);
            for mut c in p.conditions() {
                c.name = format!("{prefix}{}", c.name);
                report.push(c);
            }
        }
        report
    }

    /// Route through the product algebroid: `Ψ*∘d_N = d_{M×I}∘Ψ*` on the
    /// generators of `Ω(A_N)`. Equivalent to [`Self::check_homotopy`].
    pub fn check_product_morphism(&self) -> Report {
        let mut report = Report::new("product morphism");
        for (k, p) in self.pieces.iter().enumerate() {
            let mut check = Check::identity(format!("{}Psi* commutes with d", self.piece_prefix(k)));
            let target = p.map.target();
            let source = p.map.source();
            let ring = target.ring();
            let r = target.rank();
            let mut generators: Vec<(String, AlgebroidForm)> = (0..target.base_dim())
                .map(|j| {
                    let y = AlgebroidForm::function(Polynomial::var_at(ring, j), r);
                    (ring.vars()[j].clone(), y)
                })
                .collect();
            generators.extend((0..r).map(|b| (format!("e^{}", b + 1), AlgebroidForm::covector(ring, r, b))));
            for (label, g) in generators {
                let res: Result<ProductForm> = (|| {
                    let lhs = p.product_pullback(&target.differential(&g)?)?;
                    let rhs = p.product_pullback(&g)?.differential(source)?;
                    Ok(&lhs - &rhs)
                })();
                match res {
                    Ok(r) => check.residual(format!("d({label})"), &r),
                    Err(e) => check.fail(e.to_string()),
                }
            }
            report.push(check);
        }
        report
    }

    /// `Θ(w) = ∫₀¹ i_{θ_t}^{Φ_t}(w) dt`, integrated exactly piece by piece.
    /// For a function `w` the result is the zero function.
    pub fn chain_homotopy_operator(&self, w: &AlgebroidForm) -> Result<AlgebroidForm> {
        let source = self.source();
        let mut out = AlgebroidForm::zero(source.ring(), source.rank(), w.degree().saturating_sub(1));
        if w.degree() == 0 {
            return Ok(out);
        }
        for p in &self.pieces {
            out += &p.contraction(w)?.integrate_time(&p.start, &p.end);
        }
        Ok(out)
    }

    /// `Φ₁*w − Φ₀*w = dΘ(w) + Θ(dw)`, for a time-independent `w`.
    pub fn verify_chain_homotopy(&self, w: &AlgebroidForm) -> Report {
        let mut report = Report::new("chain homotopy");
        let name = "Phi1* - Phi0* = d Theta + Theta d";
        let pre = self.check_homotopy();
        if !pre.passed() {
            report.push(Check::with_status(name, Status::Precondition).note("the homotopy condition fails"));
            return report;
        }
        if w.contains_time() {
            report.push(Check::with_status(name, Status::Precondition).note("the form depends on t"));
            return report;
        }
        let mut check = Check::identity(name);
        let res: Result<AlgebroidForm> = (|| {
            let source = self.source();
            let target = self.target();
            let mut r = &self.end_map().pullback(w)? - &self.start_map().pullback(w)?;
            if w.degree() > 0 {
                r -= &source.differential(&self.chain_homotopy_operator(w)?)?;
            }
            r -= &self.chain_homotopy_operator(&target.differential(w)?)?;
            Ok(r)
        })();
        match res {
            Ok(r) => check.residual(format!("w = {w}"), &r),
            Err(e) => check.fail(e.to_string()),
        }
        report.push(check);
        report
    }

    fn reparametrized(&self, lambda: &BigRational, mu: &BigRational) -> Result<Vec<Piece>> {
        let mut pieces = self
            .pieces
            .iter()
            .map(|p| p.reparametrize(lambda, mu))
            .collect::<Result<Vec<_>>>()?;
        if lambda < &BigRational::zero() {
            pieces.reverse();
        }
        Ok(pieces)
    }

    /// The homotopy run backwards, `t ↦ 1 − t`.
    pub fn reverse(&self) -> Result<NaturalHomotopy> {
        let pieces = self.reparametrized(&-BigRational::one(), &BigRational::one())?;
        NaturalHomotopy::from_pieces(pieces)
    }

    /// `self` on `[0, 1/2]` at double speed, then `next` on `[1/2, 1]`.
    pub fn compose_vertical(&self, next: &NaturalHomotopy) -> Result<NaturalHomotopy> {
        if self.source() != next.source() || self.target() != next.target() {
            return Err(Error::AlgebroidMismatch("vertical composition needs equal source and target".into()));
        }
        if self.end_map() != next.start_map() {
            return Err(Error::EndpointMismatch("Phi_1 of the first homotopy differs from Phi_0 of the second".into()));
        }
        let two = BigRational::from_integer(2.into());
        let mut pieces = self.reparametrized(&two, &BigRational::zero())?;
        pieces.extend(next.reparametrized(&two, &-BigRational::one())?);
        NaturalHomotopy::from_pieces(pieces)
    }

    fn breakpoints(&self) -> Vec<BigRational> {
        std::iter::once(self.pieces[0].start.clone())
            .chain(self.pieces.iter().map(|p| p.end.clone()))
            .collect()
    }

    /// Splits pieces so that every point of `cuts` is a junction.
    pub fn refine(&self, cuts: &[BigRational]) -> NaturalHomotopy {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let mut inner: Vec<&BigRational> = cuts.iter().filter(|c| **c > p.start && **c < p.end).collect();
            inner.sort();
            inner.dedup();
            let mut a = &p.start;
            for c in inner {
                pieces.push(p.restrict(a, c));
                a = c;
            }
            pieces.push(p.restrict(a, &p.end));
        }
        NaturalHomotopy { pieces }
    }

    /// `outer ∘ self` for `self: A_M → A_N`, `outer: A_N → A_P`:
    /// `Φ^H = Φ′(φ)·Φ`, `θ^H = Φ′(φ)·θ + θ′(φ)`, on the common refinement
    /// of both partitions.
    pub fn compose_horizontal(&self, outer: &NaturalHomotopy) -> Result<NaturalHomotopy> {
        if self.target() != outer.source() {
            return Err(Error::AlgebroidMismatch(
                "the first homotopy's target is not the second's source".into(),
            ));
        }
        let mut cuts = self.breakpoints();
        cuts.extend(outer.breakpoints());
        let inner = self.refine(&cuts);
        let outer = outer.refine(&cuts);
        let pieces = inner
            .pieces
            .iter()
            .zip(&outer.pieces)
            .map(|(h, k)| {
                debug_assert_eq!((&h.start, &h.end), (&k.start, &k.end));
                let map = k.map.compose(&h.map)?;
                let ring = h.map.source().ring();
                let outer_fiber = k
                    .map
                    .fiber()
                    .iter()
                    .map(|row| row.iter().map(|p| h.map.pull_function(p)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let mut theta = matvec(&outer_fiber, h.section.components(), ring);
                for (acc, th) in theta.iter_mut().zip(k.section.components()) {
                    *acc += &h.map.pull_function(th)?;
                }
                let section = SupportedSection::new(&map, theta)?;
                Piece::new(h.start.clone(), h.end.clone(), map, section)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NaturalHomotopy { pieces })
    }

    /// `(K1 ∘_H H1) ∘_V (K0 ∘_H H0) = (K1 ∘_V K0) ∘_H (H1 ∘_V H0)`, compared
    /// piece by piece on a common partition.
    pub fn interchange_check(
        h0: &NaturalHomotopy,
        h1: &NaturalHomotopy,
        k0: &NaturalHomotopy,
        k1: &NaturalHomotopy,
    ) -> Result<Report> {
        let lhs = h0.compose_horizontal(k0)?.compose_vertical(&h1.compose_horizontal(k1)?)?;
        let rhs = h0.compose_vertical(h1)?.compose_horizontal(&k0.compose_vertical(k1)?)?;
        let mut cuts = lhs.breakpoints();
        cuts.extend(rhs.breakpoints());
        let (lhs, rhs) = (lhs.refine(&cuts), rhs.refine(&cuts));
        let mut report = Report::new("interchange law");
        let mut phi = Check::identity("Phi components agree");
        let mut theta = Check::identity("theta components agree");
        for (k, (l, r)) in lhs.pieces.iter().zip(&rhs.pieces).enumerate() {
            let at = format!("piece {} [{}, {}]", k + 1, l.start, l.end);
            for (j, (a, b)) in l.map.base_map().iter().zip(r.map.base_map()).enumerate() {
                phi.residual(format!("{at} phi_{}", j + 1), &(a - b));
            }
            for (b, (ra, rb)) in l.map.fiber().iter().zip(r.map.fiber()).enumerate() {
                for (a, (x, y)) in ra.iter().zip(rb).enumerate() {
                    phi.residual(format!("{at} Phi[{}][{}]", b + 1, a + 1), &(x - y));
                }
            }
            for (b, (x, y)) in l.section.components().iter().zip(r.section.components()).enumerate() {
                theta.residual(format!("{at} theta[{}]", b + 1), &(x - y));
            }
        }
        report.push(phi);
        report.push(theta);
        Ok(report)
    }
}
