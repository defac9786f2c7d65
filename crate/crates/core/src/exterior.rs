//! Homogeneous exterior forms over a frame of rank `r` with polynomial
//! coefficients.
//!
//! A form of degree `k` is stored as a sparse map from strictly increasing
//! multi-indices `i1 < … < ik` to nonzero coefficients; antisymmetry is
//! implicit. Indices are 0-based internally and printed 1-based, so the
//! covector at index 0 renders as `e^1`.
//!
//! Degrees above the rank are allowed and always hold the zero form; this
//! keeps `wedge` total.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Ring};

pub type MultiIndex = Vec<usize>;

#[derive(Clone, PartialEq, Eq)]
pub struct AlgebroidForm {
    ring: Ring,
    rank: usize,
    degree: usize,
    components: BTreeMap<MultiIndex, Polynomial>,
}

/// Sorts `indices` in place and returns the permutation sign, or `None` if
/// an index repeats.
pub fn sort_with_sign(indices: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl AlgebroidForm {
    pub fn zero(ring: &Ring, rank: usize, degree: usize) -> Self {
        AlgebroidForm {
            ring: ring.clone(),
            rank,
            degree,
            components: BTreeMap::new(),
        }
    }

    /// Degree-0 form.
    pub fn function(f: Polynomial, rank: usize) -> Self {
        let mut out = Self::zero(f.ring(), rank, 0);
        if !f.is_zero() {
            out.components.insert(Vec::new(), f);
        }
        out
    }

    /// The basis covector `e^{index+1}`.
    pub fn covector(ring: &Ring, rank: usize, index: usize) -> Self {
        Self::monomial(Polynomial::one(ring), rank, &[index])
    }

    /// `coeff · e^{i1} ∧ … ∧ e^{ik}` for indices in any order; repeated
    /// indices give zero.
    pub fn monomial(coeff: Polynomial, rank: usize, indices: &[usize]) -> Self {
        assert!(
            indices.iter().all(|&i| i < rank),
            "frame index out of range for rank {rank}"
        );
        let mut out = Self::zero(coeff.ring(), rank, indices.len());
        let mut sorted = indices.to_vec();
        if let Some(sign) = sort_with_sign(&mut sorted) {
            out.add_component(sorted, &coeff.scale_int(sign));
        }
        out
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&[usize], &Polynomial)> {
        self.components.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Coefficient of a sorted multi-index (zero if absent).
    pub fn component(&self, index: &[usize]) -> Polynomial {
        self.components
            .get(index)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.ring))
    }

    /// The coefficient of a degree-0 form.
    pub fn as_function(&self) -> Polynomial {
        assert_eq!(self.degree, 0, "as_function on a degree-{} form", self.degree);
        self.component(&[])
    }

    pub(crate) fn add_component(&mut self, index: MultiIndex, coeff: &Polynomial) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(index.windows(2).all(|w| w[0] < w[1]));
        match self.components.get_mut(&index) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.components.remove(&index);
                }
            }
            None => {
                self.components.insert(index, coeff.clone());
            }
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            self.rank == other.rank && self.degree == other.degree && self.ring == other.ring,
            "adding forms of different shape: rank {} degree {} vs rank {} degree {}",
            self.rank,
            self.degree,
            other.rank,
            other.degree
        );
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_function(&self, f: &Polynomial) -> Self {
        let mut out = Self::zero(&self.ring, self.rank, self.degree);
        for (k, c) in &self.components {
            out.add_component(k.clone(), &(c * f));
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.map_coefficients(|p| p.scale(c))
    }

    /// Applies `f` to every coefficient, keeping ring and shape.
    pub fn map_coefficients(&self, mut f: impl FnMut(&Polynomial) -> Polynomial) -> Self {
        let mut out = Self::zero(&self.ring, self.rank, self.degree);
        for (k, c) in &self.components {
            out.add_component(k.clone(), &f(c));
        }
        out
    }

    /// Applies a fallible coefficient map whose results live in `ring`.
    pub fn try_map_coefficients(
        &self,
        ring: &Ring,
        mut f: impl FnMut(&Polynomial) -> Result<Polynomial>,
    ) -> Result<Self> {
        let mut out = Self::zero(ring, self.rank, self.degree);
        for (k, c) in &self.components {
            out.add_component(k.clone(), &f(c)?);
        }
        Ok(out)
    }

    pub fn diff_time(&self) -> Self {
        self.map_coefficients(Polynomial::diff_time)
    }

    pub fn integrate_time(&self, a: &BigRational, b: &BigRational) -> Self {
        self.map_coefficients(|p| p.integrate_time(a, b))
    }

    pub fn integrate_t01(&self) -> Self {
        self.map_coefficients(Polynomial::integrate_t01)
    }

    pub fn at_time(&self, t: &BigRational) -> Self {
        self.map_coefficients(|p| p.at_time(t))
    }

    pub fn contains_time(&self) -> bool {
        self.components.values().any(Polynomial::contains_time)
    }

    /// Exterior product. Degrees adding past the rank give the zero form of
    /// that degree.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        let mut out = Self::zero(&self.ring, self.rank, self.degree + other.degree);
        for (ka, ca) in &self.components {
            for (kb, cb) in &other.components {
                let mut merged: MultiIndex = ka.iter().chain(kb).copied().collect();
                if let Some(sign) = sort_with_sign(&mut merged) {
                    out.add_component(merged, &(ca * cb).scale_int(sign));
                }
            }
        }
        Ok(out)
    }

    /// Contraction of the first slot against the vector `v` (one polynomial
    /// per frame direction): `(i_v b)_J = Σ_a v^a b_{aJ}`, with the sign of
    /// moving `a` to the front of the sorted index.
    pub fn contract_first(&self, v: &[Polynomial]) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        if v.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: v.len(),
            });
        }
        let mut out = Self::zero(&self.ring, self.rank, self.degree - 1);
        for (k, c) in &self.components {
            for (pos, &a) in k.iter().enumerate() {
                if v[a].is_zero() {
                    continue;
                }
                let mut rest = k.clone();
                rest.remove(pos);
                let term = c * &v[a];
                let term = if pos % 2 == 1 { -term } else { term };
                out.add_component(rest, &term);
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for AlgebroidForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebroidForm(deg {}: {self})", self.degree)
    }
}

/// `coeff*e^1^e^2 + …` in lexicographic index order. The coefficient is
/// parenthesised unless it is a single term without a leading sign, and
/// omitted when it is 1.
impl fmt::Display for AlgebroidForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, c)) in self.components.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            if k.is_empty() {
                write!(f, "{c}")?;
                continue;
            }
            let basis: Vec<String> = k.iter().map(|i| format!("e^{}", i + 1)).collect();
            let basis = basis.join("^");
            if c.is_one() {
                f.write_str(&basis)?;
            } else {
                let text = c.to_string();
                if c.num_terms() == 1 && !text.starts_with('-') {
                    write!(f, "{text}*{basis}")?;
                } else {
                    write!(f, "({text})*{basis}")?;
                }
            }
        }
        Ok(())
    }
}

impl AddAssign<&AlgebroidForm> for AlgebroidForm {
    fn add_assign(&mut self, rhs: &AlgebroidForm) {
        self.assert_compatible(rhs);
        for (k, c) in &rhs.components {
            self.add_component(k.clone(), c);
        }
    }
}

impl SubAssign<&AlgebroidForm> for AlgebroidForm {
    fn sub_assign(&mut self, rhs: &AlgebroidForm) {
        self.assert_compatible(rhs);
        for (k, c) in &rhs.components {
            self.add_component(k.clone(), &-c);
        }
    }
}

impl<'a> Add<&'a AlgebroidForm> for &'a AlgebroidForm {
    type Output = AlgebroidForm;
    fn add(self, rhs: &'a AlgebroidForm) -> AlgebroidForm {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a AlgebroidForm> for &'a AlgebroidForm {
    type Output = AlgebroidForm;
    fn sub(self, rhs: &'a AlgebroidForm) -> AlgebroidForm {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for AlgebroidForm {
    type Output = AlgebroidForm;
    fn add(mut self, rhs: AlgebroidForm) -> AlgebroidForm {
        self += &rhs;
        self
    }
}

impl Sub for AlgebroidForm {
    type Output = AlgebroidForm;
    fn sub(mut self, rhs: AlgebroidForm) -> AlgebroidForm {
        self -= &rhs;
        self
    }
}

impl Neg for &AlgebroidForm {
    type Output = AlgebroidForm;
    fn neg(self) -> AlgebroidForm {
        self.map_coefficients(|c| -c)
    }
}

impl Neg for AlgebroidForm {
    type Output = AlgebroidForm;
    fn neg(self) -> AlgebroidForm {
        -&self
    }
}
