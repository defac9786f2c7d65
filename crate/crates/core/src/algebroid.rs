//! Lie algebroids presented in one chart and one global frame.
//!
//! The base has coordinates `x1..xm`, the frame is `e_1..e_r` and the
//! structure data are polynomials in the coordinates:
//!
//! * the anchor `♯(e_a) = Σ_i ρ^i_a ∂/∂x_i`,
//! * the bracket `[e_a, e_b] = Σ_c c^c_{ab} e_c`, antisymmetric in `(a, b)`.
//!
//! Every polynomial of the algebroid lives in the ring `(x1, …, xm, t)`.
//! The structure data never contain `t`; forms may, in which case `t` is a
//! parameter the differential does not see.
//!
//! # The differential
//!
//! `d` is computed on generators and extended by the Leibniz rule:
//!
//! ```text
//! d f   = Σ_a ρ_a(f) e^a              ρ_a = Σ_i ρ^i_a ∂_i
//! d e^c = −½ Σ_{a,b} c^c_{ab} e^a∧e^b = −Σ_{a<b} c^c_{ab} e^a∧e^b
//! ```
//!
//! The factor in `d e^c` comes from the invariant formula evaluated on a
//! pair of frame elements: `(d e^c)(e_a, e_b) = ρ_a(δ^c_b) − ρ_b(δ^c_a) −
//! e^c([e_a, e_b]) = −c^c_{ab}`, and `(e^a∧e^b)(e_a, e_b) = 1` for `a < b`.
//!
//! # Validation
//!
//! [`LieAlgebroid::validate_dga`] checks `d² = 0` on the generators `x_i`
//! and `e^c`. Expanding, `d²x_i` pairs to the anchor defect
//! `ρ([e_a, e_b]) − [ρe_a, ρe_b]` and `d²e^c` to minus the Jacobiator on
//! frame triples, so the verdict agrees with the direct bracket-axiom check
//! in [`LieAlgebroid::bracket_axioms_oracle`].

use crate::error::{Error, Result};
use crate::exterior::AlgebroidForm;
use crate::poly::{Polynomial, Ring, TIME};
use crate::report::{Check, Report};

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebroid {
    ring: Ring,
    base_dim: usize,
    rank: usize,
    /// `anchor[a][i] = ρ^i_a`.
    anchor: Vec<Vec<Polynomial>>,
    /// `structure[a][b][c] = c^c_{ab}`, stored for all pairs.
    structure: Vec<Vec<Vec<Polynomial>>>,
}

impl LieAlgebroid {
    /// Zero anchor and zero bracket over the given coordinates.
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = S>, rank: usize) -> Result<Self> {
        let coords: Vec<String> = coords.into_iter().map(Into::into).collect();
        for (i, c) in coords.iter().enumerate() {
            if c == TIME {
                return Err(Error::InvalidStructure(
                    "`t` is reserved for time and cannot be a coordinate".into(),
                ));
            }
            if coords[..i].contains(c) {
                return Err(Error::InvalidStructure(format!("coordinate `{c}` repeated")));
            }
        }
        let base_dim = coords.len();
        let ring = Ring::with_time(coords);
        let zero = Polynomial::zero(&ring);
        Ok(LieAlgebroid {
            anchor: vec![vec![zero.clone(); base_dim]; rank],
            structure: vec![vec![vec![zero; rank]; rank]; rank],
            ring,
            base_dim,
            rank,
        })
    }

    /// A Lie algebra over a point with `[e_a, e_b] = Σ_c consts[a][b][c] e_c`
    /// given for `a < b`.
    pub fn lie_algebra(rank: usize, brackets: &[(usize, usize, Vec<num_rational::BigRational>)]) -> Result<Self> {
        let mut out = Self::new(Vec::<String>::new(), rank)?;
        for (a, b, cs) in brackets {
            let comps: Vec<Polynomial> = cs
                .iter()
                .map(|c| Polynomial::constant(&out.ring, c.clone()))
                .collect();
            out.set_bracket(*a, *b, comps)?;
        }
        Ok(out)
    }

    fn check_data(&self, p: &Polynomial) -> Result<()> {
        if p.ring() != &self.ring {
            return Err(Error::RingMismatch {
                left: self.ring.vars().join(", "),
                right: p.ring().vars().join(", "),
            });
        }
        if p.contains_time() {
            return Err(Error::InvalidStructure(
                "structure data must not depend on `t`".into(),
            ));
        }
        Ok(())
    }

    /// Sets `♯(e_a)` by its components along `∂/∂x_i`.
    pub fn set_anchor(&mut self, a: usize, row: Vec<Polynomial>) -> Result<()> {
        if a >= self.rank {
            return Err(Error::Dimension(format!("frame index {} out of range", a + 1)));
        }
        if row.len() != self.base_dim {
            return Err(Error::Dimension(format!(
                "anchor row needs {} entries, got {}",
                self.base_dim,
                row.len()
            )));
        }
        for p in &row {
            self.check_data(p)?;
        }
        self.anchor[a] = row;
        Ok(())
    }

    /// Sets `[e_a, e_b]` (and `[e_b, e_a]` with the opposite sign).
    pub fn set_bracket(&mut self, a: usize, b: usize, comps: Vec<Polynomial>) -> Result<()> {
        if a >= self.rank || b >= self.rank {
            return Err(Error::Dimension("frame index out of range".into()));
        }
        if comps.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: comps.len(),
            });
        }
        for p in &comps {
            self.check_data(p)?;
        }
        if a == b {
            if comps.iter().all(Polynomial::is_zero) {
                return Ok(());
            }
            return Err(Error::InvalidStructure("[e_a, e_a] must vanish".into()));
        }
        self.structure[b][a] = comps.iter().map(|p| -p).collect();
        self.structure[a][b] = comps;
        Ok(())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coords(&self) -> &[String] {
        &self.ring.vars()[..self.base_dim]
    }

    pub fn anchor(&self, a: usize, i: usize) -> &Polynomial {
        &self.anchor[a][i]
    }

    pub fn anchor_row(&self, a: usize) -> &[Polynomial] {
        &self.anchor[a]
    }

    /// `c^c_{ab}`.
    pub fn structure(&self, a: usize, b: usize, c: usize) -> &Polynomial {
        &self.structure[a][b][c]
    }

    pub fn bracket_of_frame(&self, a: usize, b: usize) -> &[Polynomial] {
        &self.structure[a][b]
    }

    pub fn coordinate(&self, i: usize) -> Polynomial {
        Polynomial::var_at(&self.ring, i)
    }

    /// Lie derivative of `f` along `♯(e_a)`.
    pub fn anchor_derivative(&self, a: usize, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(&self.ring);
        for (i, rho) in self.anchor[a].iter().enumerate() {
            if !rho.is_zero() {
                out += &(rho * &f.diff_at(i));
            }
        }
        out
    }

    /// Lie derivative of `f` along `♯(u)` for a section `u = Σ u^a e_a`.
    pub fn anchor_derivative_along(&self, u: &[Polynomial], f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(&self.ring);
        for (a, ua) in u.iter().enumerate() {
            if !ua.is_zero() {
                out += &(ua * &self.anchor_derivative(a, f));
            }
        }
        out
    }

    /// Bracket of two sections given by their frame components, expanded by
    /// the Leibniz rule.
    pub fn bracket(&self, u: &[Polynomial], v: &[Polynomial]) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(&self.ring); self.rank];
        for a in 0..self.rank {
            for b in 0..self.rank {
                let uv = &u[a] * &v[b];
                if uv.is_zero() {
                    continue;
                }
                for (c, coeff) in self.structure[a][b].iter().enumerate() {
                    if !coeff.is_zero() {
                        out[c] += &(&uv * coeff);
                    }
                }
            }
        }
        for d in 0..self.rank {
            out[d] += &self.anchor_derivative_along(u, &v[d]);
            out[d] -= &self.anchor_derivative_along(v, &u[d]);
        }
        out
    }

    pub fn function_differential(&self, f: &Polynomial) -> AlgebroidForm {
        let mut out = AlgebroidForm::zero(&self.ring, self.rank, 1);
        for a in 0..self.rank {
            out.add_component(vec![a], &self.anchor_derivative(a, f));
        }
        out
    }

    /// `d e^c = −Σ_{a<b} c^c_{ab} e^a∧e^b`.
    pub fn covector_differential(&self, c: usize) -> AlgebroidForm {
        let mut out = AlgebroidForm::zero(&self.ring, self.rank, 2);
        for a in 0..self.rank {
            for b in a + 1..self.rank {
                out.add_component(vec![a, b], &-&self.structure[a][b][c]);
            }
        }
        out
    }

    fn check_form(&self, w: &AlgebroidForm) -> Result<()> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: w.rank(),
            });
        }
        if w.ring() != &self.ring {
            return Err(Error::RingMismatch {
                left: self.ring.vars().join(", "),
                right: w.ring().vars().join(", "),
            });
        }
        Ok(())
    }

    /// The algebroid differential `d_A`, acting on coefficients through the
    /// anchor and on frame covectors through the structure functions.
    pub fn differential(&self, w: &AlgebroidForm) -> Result<AlgebroidForm> {
        self.check_form(w)?;
        let k = w.degree();
        let mut out = AlgebroidForm::zero(&self.ring, self.rank, k + 1);
        if k >= self.rank {
            // Ω^{k+1} = 0
            return Ok(out);
        }
        let de: Vec<AlgebroidForm> = (0..self.rank).map(|c| self.covector_differential(c)).collect();
        let one = Polynomial::one(&self.ring);
        for (index, g) in w.components() {
            let basis = AlgebroidForm::monomial(one.clone(), self.rank, index);
            out += &self.function_differential(g).wedge(&basis)?;
            for (j, &c) in index.iter().enumerate() {
                if de[c].is_zero() {
                    continue;
                }
                let before = AlgebroidForm::monomial(one.clone(), self.rank, &index[..j]);
                let after = AlgebroidForm::monomial(one.clone(), self.rank, &index[j + 1..]);
                let term = before.wedge(&de[c])?.wedge(&after)?.mul_function(g);
                if j % 2 == 0 {
                    out += &term;
                } else {
                    out -= &term;
                }
            }
        }
        Ok(out)
    }

    /// `d²` on every coordinate function and frame covector.
    pub fn validate_dga(&self) -> Report {
        let mut report = Report::new("d^2 = 0 on generators");
        let mut coords = Check::identity("d^2 x_i = 0");
        for i in 0..self.base_dim {
            let dx = self.function_differential(&self.coordinate(i));
            let ddx = self.differential(&dx).expect("same algebroid");
            coords.residual(format!("d^2({})", self.ring.vars()[i]), &ddx);
        }
        report.push(coords);
        let mut covectors = Check::identity("d^2 e^c = 0");
        for c in 0..self.rank {
            let dde = self
                .differential(&self.covector_differential(c))
                .expect("same algebroid");
            covectors.residual(format!("d^2(e^{})", c + 1), &dde);
        }
        report.push(covectors);
        report
    }

    /// Direct check of the bracket axioms on frame elements: the Jacobi
    /// identity with the Leibniz rule and the anchor being a bracket
    /// morphism into vector fields.
    pub fn bracket_axioms_oracle(&self) -> Report {
        let mut report = Report::new("bracket axioms on frame");
        let unit = |a: usize| -> Vec<Polynomial> {
            (0..self.rank)
                .map(|b| {
                    if a == b {
                        Polynomial::one(&self.ring)
                    } else {
                        Polynomial::zero(&self.ring)
                    }
                })
                .collect()
        };
        let mut jacobi = Check::identity("Jacobi identity");
        for a in 0..self.rank {
            for b in a + 1..self.rank {
                for c in b + 1..self.rank {
                    let (ea, eb, ec) = (unit(a), unit(b), unit(c));
                    let t1 = self.bracket(&ea, &self.bracket(&eb, &ec));
                    let t2 = self.bracket(&eb, &self.bracket(&ec, &ea));
                    let t3 = self.bracket(&ec, &self.bracket(&ea, &eb));
                    for d in 0..self.rank {
                        let sum = &(&t1[d] + &t2[d]) + &t3[d];
                        jacobi.residual(
                            format!("Jac(e_{},e_{},e_{})^{}", a + 1, b + 1, c + 1, d + 1),
                            &sum,
                        );
                    }
                }
            }
        }
        report.push(jacobi);
        let mut anchor = Check::identity("anchor preserves brackets");
        for a in 0..self.rank {
            for b in a + 1..self.rank {
                for i in 0..self.base_dim {
                    let mut lhs = Polynomial::zero(&self.ring);
                    for c in 0..self.rank {
                        lhs += &(&self.structure[a][b][c] * &self.anchor[c][i]);
                    }
                    // [ρe_a, ρe_b]^i = ρe_a(ρ^i_b) − ρe_b(ρ^i_a)
                    let rhs = &self.anchor_derivative(a, &self.anchor[b][i])
                        - &self.anchor_derivative(b, &self.anchor[a][i]);
                    anchor.residual(
                        format!("(ρ[e_{},e_{}] - [ρe_{},ρe_{}])^{}", a + 1, b + 1, a + 1, b + 1, self.ring.vars()[i]),
                        &(&lhs - &rhs),
                    );
                }
            }
        }
        report.push(anchor);
        report
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use num_rational::BigRational;
    use proptest::prelude::*;

    pub(crate) fn so3() -> LieAlgebroid {
        let q = |v: [i64; 3]| v.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        LieAlgebroid::lie_algebra(
            3,
            &[(1, 2, q([1, 0, 0])), (2, 0, q([0, 1, 0])), (0, 1, q([0, 0, 1]))],
        )
        .unwrap()
    }

    pub(crate) fn tangent(m: usize) -> LieAlgebroid {
        let coords: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        let mut a = LieAlgebroid::new(coords, m).unwrap();
        for i in 0..m {
            let row = (0..m)
                .map(|j| Polynomial::from_int(a.ring(), (i == j) as i64))
                .collect();
            a.set_anchor(i, row).unwrap();
        }
        a
    }

    /// Rank-2 algebroid over the line with anchor `♯e_1 = ∂_x`, `♯e_2 = x ∂_x`
    /// and `[e_1, e_2] = e_1`: the action algebroid of the affine algebra.
    pub(crate) fn affine_action() -> LieAlgebroid {
        let mut a = LieAlgebroid::new(["x1"], 2).unwrap();
        let r = a.ring().clone();
        let p = |s: &str| parse_poly(s, &r).unwrap();
        a.set_anchor(0, vec![p("1")]).unwrap();
        a.set_anchor(1, vec![p("x1")]).unwrap();
        a.set_bracket(0, 1, vec![p("1"), p("0")]).unwrap();
        a
    }

    #[test]
    fn tangent_differential_of_coordinate() {
        let a = tangent(2);
        let x1 = AlgebroidForm::function(a.coordinate(0), 2);
        assert_eq!(a.differential(&x1).unwrap(), AlgebroidForm::covector(a.ring(), 2, 0));
    }

    #[test]
    fn so3_differential_of_covector() {
        let a = so3();
        let de1 = a.differential(&AlgebroidForm::covector(a.ring(), 3, 0)).unwrap();
        assert_eq!(de1, -AlgebroidForm::monomial(Polynomial::one(a.ring()), 3, &[1, 2]));
    }

    #[test]
    fn constants_are_closed() {
        for a in [so3(), tangent(3), affine_action()] {
            let one = AlgebroidForm::function(Polynomial::one(a.ring()), a.rank());
            assert!(a.differential(&one).unwrap().is_zero());
        }
    }

    #[test]
    fn validation_examples() {
        assert!(tangent(3).validate_dga().passed());
        assert!(so3().validate_dga().passed());
        assert!(so3().bracket_axioms_oracle().passed());
        assert!(affine_action().validate_dga().passed());
        assert!(affine_action().bracket_axioms_oracle().passed());
        let abelian = LieAlgebroid::new(Vec::<String>::new(), 3).unwrap();
        assert!(abelian.bracket_axioms_oracle().passed());

        let q = |v: [i64; 3]| v.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        // c^1_{23} = c^2_{13} = c^3_{12} = 1 is so(2,1): every cyclic term
        // of the Jacobiator is [e_i, ±e_i] = 0.
        let so21 = LieAlgebroid::lie_algebra(
            3,
            &[(1, 2, q([1, 0, 0])), (0, 2, q([0, 1, 0])), (0, 1, q([0, 0, 1]))],
        )
        .unwrap();
        assert!(so21.validate_dga().passed());
        assert!(so21.bracket_axioms_oracle().passed());

        // [e1,e2] = e3, [e2,e3] = e2: Jac(e1,e2,e3) = [e1,[e2,e3]] = e3.
        let bad = LieAlgebroid::lie_algebra(3, &[(0, 1, q([0, 0, 1])), (1, 2, q([0, 1, 0]))]).unwrap();
        let dga = bad.validate_dga();
        assert!(!dga.passed());
        assert_eq!(
            dga.check("d^2 e^c = 0").unwrap().residuals[0].value,
            "(-1)*e^1^e^2^e^3"
        );
        let oracle = bad.bracket_axioms_oracle();
        assert_eq!(oracle.check("Jacobi identity").unwrap().residuals[0].label, "Jac(e_1,e_2,e_3)^3");
        assert!(!bad.bracket_axioms_oracle().passed());
    }

    #[test]
    fn anchor_defect_is_seen_by_both_checks() {
        let mut a = affine_action();
        let r = a.ring().clone();
        a.set_anchor(1, vec![parse_poly("x1^2", &r).unwrap()]).unwrap();
        let dga = a.validate_dga();
        assert!(!dga.check("d^2 x_i = 0").unwrap().passed());
        let oracle = a.bracket_axioms_oracle();
        assert!(!oracle.check("anchor preserves brackets").unwrap().passed());
    }

    #[test]
    fn rejects_time_in_structure_and_bad_shapes() {
        let mut a = LieAlgebroid::new(["x1"], 1).unwrap();
        let r = a.ring().clone();
        assert!(matches!(
            a.set_anchor(0, vec![parse_poly("t", &r).unwrap()]),
            Err(Error::InvalidStructure(_))
        ));
        assert!(matches!(a.set_anchor(0, vec![]), Err(Error::Dimension(_))));
        assert!(LieAlgebroid::new(["t"], 1).is_err());
        let form = AlgebroidForm::covector(&r, 2, 0);
        assert!(matches!(a.differential(&form), Err(Error::RankMismatch { .. })));
    }

    /// The invariant formula for `d` on forms of degree ≤ 2, evaluated on
    /// frame elements. Independent of the generator route.
    pub(crate) fn alternating_differential(a: &LieAlgebroid, w: &AlgebroidForm) -> AlgebroidForm {
        let r = a.rank();
        let k = w.degree();
        assert!(k <= 2);
        let ring = a.ring();
        let eval = |idx: &[usize]| -> Polynomial {
            // w evaluated on frame elements e_{idx}
            let mut sorted = idx.to_vec();
            match crate::exterior::sort_with_sign(&mut sorted) {
                Some(s) => w.component(&sorted).scale_int(s),
                None => Polynomial::zero(ring),
            }
        };
        // w evaluated with a section in one slot
        let eval_with = |section: &[Polynomial], slot: usize, others: &[usize]| -> Polynomial {
            let mut acc = Polynomial::zero(ring);
            for (c, s) in section.iter().enumerate() {
                if s.is_zero() {
                    continue;
                }
                let mut idx = others.to_vec();
                idx.insert(slot, c);
                acc += &(s * &eval(&idx));
            }
            acc
        };
        let mut out = AlgebroidForm::zero(ring, r, k + 1);
        let mut push = |idx: Vec<usize>, value: Polynomial| {
            out.add_component(idx, &value);
        };
        let tuples: Vec<Vec<usize>> = match k + 1 {
            1 => (0..r).map(|a| vec![a]).collect(),
            2 => (0..r).flat_map(|a| (a + 1..r).map(move |b| vec![a, b])).collect(),
            3 => (0..r)
                .flat_map(|a| (a + 1..r).flat_map(move |b| (b + 1..r).map(move |c| vec![a, b, c])))
                .collect(),
            _ => unreachable!(),
        };
        for t in tuples {
            let mut value = Polynomial::zero(ring);
            for j in 0..t.len() {
                let mut rest = t.clone();
                rest.remove(j);
                let term = a.anchor_derivative(t[j], &eval(&rest));
                value += &term.scale_int(if j % 2 == 0 { 1 } else { -1 });
            }
            for i in 0..t.len() {
                for j in i + 1..t.len() {
                    let mut rest = t.clone();
                    rest.remove(j);
                    rest.remove(i);
                    let term = eval_with(a.bracket_of_frame(t[i], t[j]), 0, &rest);
                    value += &term.scale_int(if (i + j) % 2 == 0 { 1 } else { -1 });
                }
            }
            push(t, value);
        }
        out
    }

    fn arb_algebroid() -> impl Strategy<Value = LieAlgebroid> {
        prop_oneof![
            Just(so3()),
            Just(tangent(2)),
            Just(affine_action()),
            Just(tangent(3)),
        ]
    }

    fn arb_form_for(a: &LieAlgebroid, degree: usize) -> impl Strategy<Value = AlgebroidForm> {
        crate::exterior::tests::arb_form(a.ring().clone(), a.rank(), degree)
    }

    proptest! {
        #[test]
        fn generator_route_matches_invariant_formula(
            (a, w) in (arb_algebroid(), 0usize..3).prop_flat_map(|(a, k)| {
                let f = arb_form_for(&a, k);
                (Just(a), f)
            })
        ) {
            prop_assert_eq!(a.differential(&w).unwrap(), alternating_differential(&a, &w));
        }

        #[test]
        fn differential_is_a_derivation(
            (a, x, y) in (arb_algebroid(), 0usize..3, 0usize..3).prop_flat_map(|(a, i, j)| {
                let fx = arb_form_for(&a, i);
                let fy = arb_form_for(&a, j);
                (Just(a), fx, fy)
            })
        ) {
            let lhs = a.differential(&x.wedge(&y).unwrap()).unwrap();
            let dx = a.differential(&x).unwrap().wedge(&y).unwrap();
            let xdy = x.wedge(&a.differential(&y).unwrap()).unwrap();
            let rhs = if x.degree() % 2 == 0 { &dx + &xdy } else { &dx - &xdy };
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn differential_squares_to_zero(
            (a, w) in (arb_algebroid(), 0usize..3).prop_flat_map(|(a, k)| {
                let f = arb_form_for(&a, k);
                (Just(a), f)
            })
        ) {
            let dd = a.differential(&a.differential(&w).unwrap()).unwrap();
            prop_assert!(dd.is_zero());
        }
    }

    #[test]
    fn tangent_differential_is_de_rham() {
        let a = tangent(2);
        let r = a.ring().clone();
        let f = parse_poly("x1*x2", &r).unwrap();
        let df = a.function_differential(&f);
        let expect = &AlgebroidForm::monomial(parse_poly("x2", &r).unwrap(), 2, &[0])
            + &AlgebroidForm::monomial(parse_poly("x1", &r).unwrap(), 2, &[1]);
        assert_eq!(df, expect);
        // d(g e^1) = ∂_2 g e^2∧e^1
        let g = parse_poly("x1^2*x2 + t", &r).unwrap();
        let w = AlgebroidForm::monomial(g.clone(), 2, &[0]);
        let dw = a.differential(&w).unwrap();
        assert_eq!(dw, AlgebroidForm::monomial(-g.diff("x2").unwrap(), 2, &[0, 1]));
    }
}
