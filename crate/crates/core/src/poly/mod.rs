//! Exact multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] lives in a [`Ring`]: an ordered list of variable names
//! plus a total-degree cap. The time variable `t` is an ordinary variable of
//! the ring; a "time-dependent" polynomial is simply one in which `t` occurs.
//!
//! Terms are stored sparsely as exponent vectors mapped to nonzero
//! [`BigRational`] coefficients, so structural equality is equality of
//! polynomials.
//!
//! Arithmetic operators panic when their operands live in different rings;
//! every ring in this crate is fixed by the algebroid that owns the data, so
//! a mismatch is a bug in the caller. The operations that can raise the
//! degree past the cap by a large jump (parsing, [`Polynomial::pow`],
//! [`Polynomial::substitute`]) report [`Error::DegreeCap`] instead.

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use parse::parse_poly;

/// Name of the distinguished time variable.
pub const TIME: &str = "t";

pub const DEFAULT_MAX_DEGREE: u32 = 16;

/// Shorthand for the exact rational `num/den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug)]
struct RingData {
    vars: Vec<String>,
    max_degree: u32,
}

/// Ordered variable names shared by a family of polynomials.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl Ring {
    pub fn new<I, S>(vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_max_degree(vars, DEFAULT_MAX_DEGREE)
    }

    pub fn with_max_degree<I, S>(vars: I, max_degree: u32) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ring(Arc::new(RingData {
            vars: vars.into_iter().map(Into::into).collect(),
            max_degree,
        }))
    }

    /// Coordinates followed by the time variable.
    pub fn with_time<I, S>(coords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vars: Vec<String> = coords.into_iter().map(Into::into).collect();
        vars.push(TIME.to_string());
        Self::new(vars)
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn len(&self) -> usize {
        self.0.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.vars.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.0.max_degree
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn time_index(&self) -> Option<usize> {
        self.index_of(TIME)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.vars == other.0.vars && self.0.max_degree == other.0.max_degree)
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring[{}]", self.0.vars.join(", "))
    }
}

type Exponents = Vec<u32>;

/// Exact polynomial in canonical form: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    ring: Ring,
    terms: BTreeMap<Exponents, BigRational>,
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, BigRational::one())
    }

    pub fn constant(ring: &Ring, c: BigRational) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(vec![0; ring.len()], c);
        }
        p
    }

    pub fn from_int(ring: &Ring, c: i64) -> Self {
        Self::constant(ring, BigRational::from_integer(c.into()))
    }

    pub fn var(ring: &Ring, name: &str) -> Result<Self> {
        let idx = ring
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Self::var_at(ring, idx))
    }

    /// The variable at position `idx` of the ring.
    pub fn var_at(ring: &Ring, idx: usize) -> Self {
        assert!(idx < ring.len(), "variable index {idx} out of range");
        let mut exps = vec![0; ring.len()];
        exps[idx] = 1;
        let mut p = Self::zero(ring);
        p.terms.insert(exps, BigRational::one());
        p
    }

    /// The time variable `t`; fails if the ring has none.
    pub fn time(ring: &Ring) -> Result<Self> {
        Self::var(ring, TIME)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The coefficient if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|e| e[idx]).max().unwrap_or(0)
    }

    pub fn contains_var(&self, idx: usize) -> bool {
        self.terms.keys().any(|e| e[idx] > 0)
    }

    pub fn contains_time(&self) -> bool {
        self.ring.time_index().is_some_and(|i| self.contains_var(i))
    }

    fn check_cap(self) -> Result<Self> {
        let degree = self.total_degree();
        let cap = self.ring.max_degree();
        if degree > cap {
            Err(Error::DegreeCap { degree, cap })
        } else {
            Ok(self)
        }
    }

    fn assert_same_ring(&self, other: &Self) {
        assert!(
            self.ring == other.ring,
            "polynomial ring mismatch: {:?} vs {:?}",
            self.ring,
            other.ring
        );
    }

    fn add_term(&mut self, exps: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(c.into()))
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::one(&self.ring);
        for _ in 0..n {
            acc = (&acc * self).check_cap()?;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to the named variable.
    pub fn diff(&self, var: &str) -> Result<Self> {
        let idx = self
            .ring
            .index_of(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        Ok(self.diff_at(idx))
    }

    pub fn diff_at(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            let k = e[idx];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[idx] -= 1;
            out.add_term(e2, c * BigRational::from_integer(k.into()));
        }
        out
    }

    /// Partial derivative in `t`; zero when the ring has no time variable.
    pub fn diff_time(&self) -> Self {
        match self.ring.time_index() {
            Some(i) => self.diff_at(i),
            None => Self::zero(&self.ring),
        }
    }

    /// Exact integral over `t` from `a` to `b`. The result stays in the same
    /// ring with `t` absent. Without a time variable the polynomial is a
    /// constant in `t` and gets multiplied by `b - a`.
    pub fn integrate_time(&self, a: &BigRational, b: &BigRational) -> Self {
        let Some(ti) = self.ring.time_index() else {
            return self.scale(&(b - a));
        };
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            let k = e[ti] as usize;
            let upper = num_traits::pow(b.clone(), k + 1);
            let lower = num_traits::pow(a.clone(), k + 1);
            let factor = (upper - lower) / BigRational::from_integer((k + 1).into());
            let mut e2 = e.clone();
            e2[ti] = 0;
            out.add_term(e2, c * factor);
        }
        out
    }

    /// `∫₀¹ p dt`.
    pub fn integrate_t01(&self) -> Self {
        self.integrate_time(&BigRational::zero(), &BigRational::one())
    }

    /// Replaces every variable of this ring by the matching entry of
    /// `images`, all of which live in `target`.
    pub fn substitute(&self, images: &[Polynomial], target: &Ring) -> Result<Self> {
        if images.len() != self.ring.len() {
            return Err(Error::Dimension(format!(
                "substitution needs {} images, got {}",
                self.ring.len(),
                images.len()
            )));
        }
        for img in images {
            if img.ring != *target {
                return Err(Error::RingMismatch {
                    left: target.vars().join(", "),
                    right: img.ring.vars().join(", "),
                });
            }
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|img| vec![Polynomial::one(target), img.clone()])
            .collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= k as usize {
                    let next = (&cache[cache.len() - 1] * &cache[1]).check_cap()?;
                    cache.push(next);
                }
                term = (&term * &cache[k as usize]).check_cap()?;
            }
            out += &term;
        }
        Ok(out)
    }

    /// Replaces a single variable by `value`, keeping the ring.
    pub fn substitute_var(&self, idx: usize, value: &Polynomial) -> Result<Self> {
        let images: Vec<Polynomial> = (0..self.ring.len())
            .map(|i| {
                if i == idx {
                    value.clone()
                } else {
                    Polynomial::var_at(&self.ring, i)
                }
            })
            .collect();
        self.substitute(&images, &self.ring)
    }

    /// Sets `t` to a rational constant.
    pub fn at_time(&self, t: &BigRational) -> Self {
        match self.ring.time_index() {
            None => self.clone(),
            Some(ti) => {
                let mut out = Self::zero(&self.ring);
                for (e, c) in &self.terms {
                    let mut e2 = e.clone();
                    let k = std::mem::replace(&mut e2[ti], 0);
                    out.add_term(e2, c * num_traits::pow(t.clone(), k as usize));
                }
                out
            }
        }
    }

    /// Moves the polynomial into another ring by variable name. Every
    /// variable that actually occurs must exist in `target`.
    pub fn embed(&self, target: &Ring) -> Result<Self> {
        let map: Vec<Option<usize>> = self
            .ring
            .vars()
            .iter()
            .map(|v| target.index_of(v))
            .collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| Error::UnknownVariable(self.ring.vars()[i].clone()))?;
                e2[j] += k;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Exact evaluation at a rational point given by variable name.
    pub fn eval(&self, point: &BTreeMap<String, BigRational>) -> Result<BigRational> {
        let values = self.point_values(|name| point.get(name).cloned())?;
        Ok(self.eval_with(&values, BigRational::zero(), |c| c.clone()))
    }

    pub fn eval_f64(&self, point: &BTreeMap<String, f64>) -> Result<f64> {
        let values = self.point_values(|name| point.get(name).copied())?;
        Ok(self.eval_with(&values, 0.0, |c| c.to_f64().unwrap_or(f64::NAN)))
    }

    /// Floating-point evaluation with values indexed like the ring.
    pub fn eval_f64_at(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.ring.len(), "point has wrong dimension");
        self.eval_with(values, 0.0, |c| c.to_f64().unwrap_or(f64::NAN))
    }

    fn point_values<T>(&self, lookup: impl Fn(&str) -> Option<T>) -> Result<Vec<Option<T>>> {
        let mut values = Vec::with_capacity(self.ring.len());
        for (i, name) in self.ring.vars().iter().enumerate() {
            let v = lookup(name);
            if v.is_none() && self.contains_var(i) {
                return Err(Error::MissingAssignment(name.clone()));
            }
            values.push(v);
        }
        Ok(values)
    }

    /// Horner evaluation, nested from the first variable inwards. Terms are
    /// visited in lexicographic exponent order, so the terms sharing a
    /// power of the leading variable are contiguous.
    fn eval_with<T, V>(&self, values: &[V], zero: T, coeff: impl Fn(&BigRational) -> T + Copy) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
        V: Clone + AsValue<T>,
    {
        let terms: Vec<(&Exponents, &BigRational)> = self.terms.iter().collect();
        horner(&terms, 0, values, &zero, coeff)
    }
}

trait AsValue<T> {
    fn as_value(&self) -> Option<T>;
}

impl AsValue<f64> for f64 {
    fn as_value(&self) -> Option<f64> {
        Some(*self)
    }
}

impl<T: Clone> AsValue<T> for Option<T> {
    fn as_value(&self) -> Option<T> {
        self.clone()
    }
}

fn horner<T, V>(
    terms: &[(&Exponents, &BigRational)],
    var: usize,
    values: &[V],
    zero: &T,
    coeff: impl Fn(&BigRational) -> T + Copy,
) -> T
where
    T: Clone + Add<Output = T> + Mul<Output = T>,
    V: AsValue<T>,
{
    if terms.is_empty() {
        return zero.clone();
    }
    if var == values.len() {
        return terms
            .iter()
            .fold(zero.clone(), |acc, (_, c)| acc + coeff(c));
    }
    // Group by exponent of `var`, highest first.
    let mut groups: Vec<(u32, Vec<(&Exponents, &BigRational)>)> = Vec::new();
    for &(e, c) in terms {
        match groups.iter_mut().find(|(k, _)| *k == e[var]) {
            Some((_, g)) => g.push((e, c)),
            None => groups.push((e[var], vec![(e, c)])),
        }
    }
    groups.sort_by_key(|g| std::cmp::Reverse(g.0));
    let x = values[var].as_value();
    let mut acc = zero.clone();
    let mut prev = groups[0].0;
    for (k, group) in &groups {
        if let Some(x) = &x {
            for _ in *k..prev {
                acc = acc * x.clone();
            }
        }
        prev = *k;
        acc = acc + horner(group, var + 1, values, zero, coeff);
    }
    if let Some(x) = &x {
        for _ in 0..prev {
            acc = acc * x.clone();
        }
    }
    acc
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

/// Canonical printing: terms by descending total degree, then descending
/// exponent vector. The output parses back to the same polynomial.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<(&Exponents, &BigRational)> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (n, (e, c)) in terms.into_iter().enumerate() {
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let name = &self.ring.vars()[i];
                    if k == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            let negative = c.is_negative();
            let magnitude = c.abs();
            if n == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            if monomial.is_empty() {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() || (n == 0 && negative) {
                    write!(f, "{magnitude}*")?;
                }
                f.write_str(&monomial.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        self.assert_same_ring(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        self.assert_same_ring(rhs);
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.assert_same_ring(rhs);
        let mut out = Polynomial::zero(&self.ring);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &'a Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Polynomial> for &'a Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_xt() -> Ring {
        Ring::new(["x1", "t"])
    }

    fn p(text: &str, ring: &Ring) -> Polynomial {
        parse_poly(text, ring).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let r = Ring::new(["x1", "x2", "t"]);
        assert_eq!(p("x1^2", &r).diff("x1").unwrap(), p("2*x1", &r));
        assert_eq!(p("x1*t^2 + x1", &r).diff("t").unwrap(), p("2*x1*t", &r));
        assert!(p("x1^3", &r).diff("x2").unwrap().is_zero());
        assert_eq!(
            p("x1", &r).diff("y"),
            Err(Error::UnknownVariable("y".into()))
        );
    }

    #[test]
    fn time_integral_examples() {
        let r = ring_xt();
        assert_eq!(p("t", &r).integrate_t01(), Polynomial::constant(&r, rational(1, 2)));
        assert_eq!(p("x1", &r).integrate_t01(), p("x1", &r));
        assert_eq!(p("3*t^2*x1 - t", &r).integrate_t01(), p("x1 - 1/2", &r));
        assert_eq!(
            p("t", &r).integrate_time(&rational(1, 2), &BigRational::one()),
            Polynomial::constant(&r, rational(3, 8))
        );
    }

    #[test]
    fn evaluation_examples() {
        let r = Ring::new(["x1", "x2", "t"]);
        let pt = |xs: &[(&str, BigRational)]| {
            xs.iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect::<BTreeMap<_, _>>()
        };
        assert_eq!(
            p("x1^2", &r).eval(&pt(&[("x1", rational(3, 1))])).unwrap(),
            rational(9, 1)
        );
        assert_eq!(
            p("x1*t", &r)
                .eval(&pt(&[("x1", rational(2, 1)), ("t", rational(1, 2))]))
                .unwrap(),
            BigRational::one()
        );
        assert_eq!(
            p("x1+x2", &r)
                .eval(&pt(&[("x1", rational(1, 3)), ("x2", rational(2, 3))]))
                .unwrap(),
            BigRational::one()
        );
        assert_eq!(
            p("x1+x2", &r).eval(&pt(&[("x1", rational(1, 3))])),
            Err(Error::MissingAssignment("x2".into()))
        );
    }

    #[test]
    fn horner_matches_termwise_float() {
        let r = Ring::new(["x1", "x2", "t"]);
        let q = p("3*x1^3*x2 - x2^2*t + 1/2*x1*t^4 - 7", &r);
        let v: [f64; 3] = [0.3, -1.7, 2.5];
        let direct: f64 = q
            .terms()
            .map(|(e, c)| {
                c.to_f64().unwrap()
                    * e.iter()
                        .zip(&v)
                        .map(|(&k, x)| x.powi(k as i32))
                        .product::<f64>()
            })
            .sum();
        assert!((q.eval_f64_at(&v) - direct).abs() < 1e-12);
    }

    #[test]
    fn substitution_and_degree_cap() {
        let r = Ring::with_max_degree(["x1", "t"], 4);
        let y = Ring::new(["y1", "t"]);
        let g = p("y1^2 + t", &y);
        let images = [p("x1 + t", &r), p("t", &r)];
        assert_eq!(
            g.substitute(&images, &r).unwrap(),
            p("x1^2 + 2*x1*t + t^2 + t", &r)
        );
        let big = p("y1^3", &y);
        assert_eq!(
            big.substitute(&[p("x1^2", &r), p("t", &r)], &r),
            Err(Error::DegreeCap { degree: 6, cap: 4 })
        );
    }

    #[test]
    fn at_time_and_embed() {
        let r = ring_xt();
        assert_eq!(p("x1*t^2 + t", &r).at_time(&rational(1, 2)), p("1/4*x1 + 1/2", &r));
        let wide = Ring::new(["x0", "x1", "t"]);
        assert_eq!(p("x1*t", &r).embed(&wide).unwrap(), p("x1*t", &wide));
        let narrow = Ring::new(["t"]);
        assert!(p("x1", &r).embed(&narrow).is_err());
    }

    #[test]
    fn printer_examples() {
        let r = ring_xt();
        assert_eq!(p("x1^2 + 2*x1*t - 1/3", &r).to_string(), "x1^2 + 2*x1*t - 1/3");
        assert_eq!(p("0 - x1", &r).to_string(), "-1*x1");
        assert_eq!(p("-2/3*t + x1^2*t", &r).to_string(), "x1^2*t - 2/3*t");
        assert_eq!(Polynomial::zero(&r).to_string(), "0");
    }
}
