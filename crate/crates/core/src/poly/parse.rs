//! Recursive-descent parser for the polynomial grammar:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' uint)?
//! base     := rational | ident | '(' expr ')'
//! rational := int ('/' uint)?
//! ident    := letter (letter | digit)*
//! ```
//!
//! Whitespace is insignificant and there is no implicit multiplication.
//! `int` may carry a leading `-`, which is how the printer writes a negative
//! leading coefficient (`-1*x1`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Polynomial, Ring};
use crate::error::{Error, Result};

pub fn parse_poly(text: &str, ring: &Ring) -> Result<Polynomial> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        ring,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Ring,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            if op == b'+' {
                acc += &rhs;
            } else {
                acc -= &rhs;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = &acc * &rhs;
            let degree = acc.total_degree();
            if degree > self.ring.max_degree() {
                return Err(Error::DegreeCap {
                    degree,
                    cap: self.ring.max_degree(),
                });
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let n = self.uint()?;
            let n: u32 = n
                .try_into()
                .map_err(|_| self.error("exponent too large"))?;
            return base.pow(n);
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let q = self.rational()?;
                Ok(Polynomial::constant(self.ring, q))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Polynomial::var(self.ring, name)
            }
            Some(_) => Err(self.error("expected a number, identifier or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn rational(&mut self) -> Result<BigRational> {
        let negative = self.src[self.pos] == b'-';
        if negative {
            self.pos += 1;
        }
        let num = self.uint()?;
        let num = if negative { -num } else { num };
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let den_at = self.pos;
            let den = self.uint()?;
            if den.is_zero() {
                return Err(Error::Syntax {
                    offset: den_at,
                    message: "zero denominator".into(),
                });
            }
            return Ok(BigRational::new(num, den));
        }
        Ok(BigRational::from_integer(num))
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(digits.parse().expect("digit string"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn zero_literal() {
        let r = Ring::new(["x1"]);
        assert!(parse_poly("0", &r).unwrap().is_zero());
    }

    #[test]
    fn three_term_example() {
        let r = Ring::new(["x1", "t"]);
        let q = parse_poly("x1^2 + 2*x1*t - 1/3", &r).unwrap();
        assert_eq!(q.num_terms(), 3);
        let coeffs: Vec<(Vec<u32>, BigRational)> =
            q.terms().map(|(e, c)| (e.to_vec(), c.clone())).collect();
        assert!(coeffs.contains(&(vec![2, 0], BigRational::one())));
        assert!(coeffs.contains(&(vec![1, 1], rational(2, 1))));
        assert!(coeffs.contains(&(vec![0, 0], rational(-1, 3))));
    }

    #[test]
    fn cancellation() {
        let r = Ring::new(["x1"]);
        let q = parse_poly("x1*(x1 + 1) - x1^2", &r).unwrap();
        assert_eq!(q, Polynomial::var(&r, "x1").unwrap());
    }

    #[test]
    fn errors_carry_offsets_and_names() {
        let r = Ring::new(["x1"]);
        assert_eq!(
            parse_poly("x1 + y2", &r),
            Err(Error::UnknownVariable("y2".into()))
        );
        match parse_poly("x1 + * 2", &r) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        // no implicit multiplication
        match parse_poly("2 x1", &r) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_poly("(x1", &r), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("1/0", &r), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("", &r), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn degree_cap_is_reported() {
        let r = Ring::with_max_degree(["x1"], 3);
        assert_eq!(
            parse_poly("x1^4", &r),
            Err(Error::DegreeCap { degree: 4, cap: 3 })
        );
        assert_eq!(
            parse_poly("x1^2*x1*x1", &r),
            Err(Error::DegreeCap { degree: 4, cap: 3 })
        );
        assert!(parse_poly("x1^3", &r).is_ok());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        let ring = Ring::new(["x1", "x2", "t"]);
        proptest::collection::vec(
            ((-9i64..10), (1i64..5), (0u32..3), (0u32..3), (0u32..3)),
            0..6,
        )
        .prop_map(move |terms| {
            let mut acc = Polynomial::zero(&ring);
            for (n, d, a, b, c) in terms {
                let mono = Polynomial::var_at(&ring, 0).pow(a).unwrap()
                    * Polynomial::var_at(&ring, 1).pow(b).unwrap()
                    * Polynomial::var_at(&ring, 2).pow(c).unwrap();
                acc += &mono.scale(&rational(n, d));
            }
            acc
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_print(q in arb_poly()) {
            let back = parse_poly(&q.to_string(), q.ring()).unwrap();
            prop_assert_eq!(back, q);
        }

        #[test]
        fn leibniz_rule(a in arb_poly(), b in arb_poly(), v in 0usize..3) {
            let lhs = (&a * &b).diff_at(v);
            let rhs = &a.diff_at(v) * &b + &a * &b.diff_at(v);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn integral_of_time_derivative(q in arb_poly()) {
            let lhs = q.diff_time().integrate_t01();
            let rhs = q.at_time(&BigRational::one()) - q.at_time(&BigRational::zero());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn ring_operations_commute(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        }
    }
}
