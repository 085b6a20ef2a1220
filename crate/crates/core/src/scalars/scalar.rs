use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::polynomial::{fmt_rational, Polynomial};
use super::{Assignment, Rational, ScalarError};

/// Element of the rational function field Q(params).
///
/// Always stored as `num / den` with `gcd(num, den) = 1` and `den` having
/// leading coefficient 1, so structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    num: Polynomial,
    den: Polynomial,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Scalar { num: Polynomial::one(), den: Polynomial::one() }
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::from_rational(Rational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(c: Rational) -> Self {
        Scalar { num: Polynomial::constant(c), den: Polynomial::one() }
    }

    pub fn var(name: &str) -> Self {
        Scalar { num: Polynomial::var(name), den: Polynomial::one() }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Scalar { num: p, den: Polynomial::one() }
    }

    /// Builds `num / den`; fails when `den` is the zero polynomial.
    pub fn from_fraction(num: Polynomial, den: Polynomial) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = den.constant_value() {
            if c.is_one() {
                return Scalar { num, den };
            }
            return Scalar { num: num.scale(&(Rational::one() / c)), den: Polynomial::one() };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coefficient();
        if lc.is_one() {
            Scalar { num, den }
        } else {
            let inv = Rational::one() / lc;
            Scalar { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn variables(&self) -> std::collections::BTreeSet<String> {
        let mut v = self.num.variables();
        v.extend(self.den.variables());
        v
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, exp: i32) -> Result<Scalar, ScalarError> {
        if exp >= 0 {
            let e = exp as u32;
            Ok(Scalar { num: self.num.pow(e), den: self.den.pow(e) })
        } else {
            self.inv()?.pow(-exp)
        }
    }

    /// Partial substitution. Fails if the denominator becomes identically zero.
    pub fn substitute(&self, assignment: &Assignment) -> Result<Scalar, ScalarError> {
        let den = self.den.substitute(assignment);
        if den.is_zero() {
            return Err(ScalarError::DenominatorVanishes { denominator: self.den.to_string() });
        }
        Ok(Self::normalized(self.num.substitute(assignment), den))
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<Rational, ScalarError> {
        let den = self.den.eval(assignment)?;
        if den.is_zero() {
            return Err(ScalarError::DenominatorVanishes { denominator: self.den.to_string() });
        }
        Ok(self.num.eval(assignment)? / den)
    }

    /// Simultaneous substitution of parameters by rational functions.
    pub fn compose(&self, images: &BTreeMap<String, Scalar>) -> Result<Scalar, ScalarError> {
        if images.is_empty() {
            return Ok(self.clone());
        }
        let eval_poly = |p: &Polynomial| -> Scalar {
            let mut acc = Scalar::zero();
            for (m, c) in p.terms() {
                let mut term = Scalar::from_rational(c.clone());
                for (v, e) in m.factors() {
                    let base = images.get(v).cloned().unwrap_or_else(|| Scalar::var(v));
                    term = &term * &base.pow(e as i32).expect("nonnegative power");
                }
                acc = &acc + &term;
            }
            acc
        };
        eval_poly(&self.num).checked_div(&eval_poly(&self.den)).map_err(|_| {
            ScalarError::DenominatorVanishes { denominator: self.den.to_string() }
        })
    }

    pub fn is_negative_constant(&self) -> bool {
        self.to_rational().map(|r| r.is_negative()).unwrap_or(false)
    }
}

fn add_impl(a: &Scalar, b: &Scalar) -> Scalar {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.den == b.den {
        if a.den.is_one() {
            return Scalar { num: a.num.add(&b.num), den: Polynomial::one() };
        }
        return Scalar::normalized(a.num.add(&b.num), a.den.clone());
    }
    if b.den.is_one() {
        return Scalar::normalized(a.num.add(&b.num.mul(&a.den)), a.den.clone());
    }
    if a.den.is_one() {
        return Scalar::normalized(a.num.mul(&b.den).add(&b.num), b.den.clone());
    }
    Scalar::normalized(
        a.num.mul(&b.den).add(&b.num.mul(&a.den)),
        a.den.mul(&b.den),
    )
}

fn mul_impl(a: &Scalar, b: &Scalar) -> Scalar {
    if a.is_zero() || b.is_zero() {
        return Scalar::zero();
    }
    if a.den.is_one() && b.den.is_one() {
        return Scalar { num: a.num.mul(&b.num), den: Polynomial::one() };
    }
    Scalar::normalized(a.num.mul(&b.num), a.den.mul(&b.den))
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        add_impl(self, rhs)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        add_impl(self, &-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        mul_impl(self, rhs)
    }
}

/// Panics on division by zero; use [`Scalar::checked_div`] for fallible code.
impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<Rational> for Scalar {
    fn from(v: Rational) -> Self {
        Scalar::from_rational(v)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.len() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        let den = match self.den.constant_value() {
            Some(c) => fmt_rational(&c),
            None if self.den.len() > 1 => format!("({})", self.den),
            None => {
                // A single monomial with coefficient 1, but may be a product.
                let s = self.den.to_string();
                if s.contains('*') {
                    format!("({s})")
                } else {
                    s
                }
            }
        };
        write!(f, "{num}/{den}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Scalar {
        Scalar::var(n)
    }

    #[test]
    fn canonical_form_makes_equal_fractions_identical() {
        let a = v("a");
        let b = v("b");
        let lhs = (&(&a * &a) - &(&b * &b)) / (&a + &b);
        assert_eq!(lhs, &a - &b);
        let half = Scalar::from_ratio(1, 2);
        let x = (&a * &half) / (&b * &half);
        assert_eq!(x, &a / &b);
        assert_eq!((&a / &b).to_string(), "a/b");
    }

    #[test]
    fn denominator_is_monic() {
        let a = v("a");
        let x = Scalar::one() / (&a * &Scalar::from_int(-2));
        assert!(x.denominator().leading_coefficient().is_one());
        assert_eq!(x.to_string(), "-1/2/a");
    }

    #[test]
    fn substitution_detects_vanishing_denominators() {
        let a = v("a");
        let x = Scalar::one() / (&a - &Scalar::one());
        let mut asg = Assignment::new();
        asg.insert("a".into(), Rational::one());
        assert!(matches!(x.eval(&asg), Err(ScalarError::DenominatorVanishes { .. })));
        assert!(matches!(x.substitute(&asg), Err(ScalarError::DenominatorVanishes { .. })));
    }

    #[test]
    fn eval_reports_missing_parameter() {
        let x = &v("a") + &v("b");
        let mut asg = Assignment::new();
        asg.insert("a".into(), Rational::one());
        assert!(matches!(x.eval(&asg), Err(ScalarError::MissingParameter(p)) if p == "b"));
    }

    #[test]
    fn compose_replaces_parameters() {
        let x = &v("a") / &v("b");
        let mut images = BTreeMap::new();
        images.insert("a".to_string(), &v("b") * &v("c"));
        assert_eq!(x.compose(&images).unwrap(), v("c"));
    }
}
