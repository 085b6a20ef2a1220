use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Assignment, Rational, ScalarError};

/// A power product of named parameters, stored sparsely and sorted by name.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(Arc<str>, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(Arc::from(name), 1)])
    }

    pub fn var_pow(name: Arc<str>, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(name, exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn exponent(&self, var: &str) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| v.as_ref() == var)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(v, e)| (v.as_ref(), *e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0.as_ref() < v.as_ref() {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v.clone(), e - f)),
                }
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes `var` from the monomial, returning its exponent.
    fn split_var(&self, var: &str) -> (u32, Monomial) {
        let mut exp = 0;
        let rest = self
            .0
            .iter()
            .filter(|(v, e)| {
                if v.as_ref() == var {
                    exp = *e;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (exp, Monomial(rest))
    }
}

// Graded lexicographic order: total degree first, then the exponent of the
// alphabetically first parameter where the two monomials differ.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Multivariate polynomial with rational coefficients in named parameters.
///
/// Terms are kept in a map ordered by the graded lexicographic monomial
/// order; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(name), Rational::one());
        Polynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_one() && c.is_one())
    }

    /// The rational value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().map(|(v, _)| v.to_string()))
            .collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Leading term in graded lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    fn mul_term(&self, mono: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.mul(mono), a * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    /// Views the polynomial as univariate in `var` with coefficients in the
    /// remaining parameters.
    pub fn coefficients_in(&self, var: &str) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(var);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    fn from_coefficients(var: &str, coeffs: &BTreeMap<u32, Polynomial>) -> Polynomial {
        let name: Arc<str> = Arc::from(var);
        let mut out = Polynomial::zero();
        for (e, p) in coeffs {
            let xe = Monomial::var_pow(name.clone(), *e);
            for (m, c) in &p.terms {
                out.add_term(m.mul(&xe), c.clone());
            }
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&(Rational::one() / c)));
        }
        let (lm_d, lc_d) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut quotient = Polynomial::zero();
        let mut rem = self.clone();
        while let Some((lm_r, lc_r)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let m = lm_r.checked_div(&lm_d)?;
            let c = lc_r / &lc_d;
            rem = rem.sub(&divisor.mul_term(&m, &c));
            quotient.add_term(m, c);
        }
        Some(quotient)
    }

    /// Greatest common divisor, defined up to a nonzero rational factor.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_constant() || other.is_constant() {
            return Polynomial::one();
        }
        if self == other {
            return self.clone();
        }
        let vars: BTreeSet<String> = self.variables().union(&other.variables()).cloned().collect();
        let x = vars.iter().next_back().expect("nonconstant polynomial has a variable");
        let (da, db) = (self.degree_in(x), other.degree_in(x));
        if da == 0 {
            return self.gcd(&other.content_in(x));
        }
        if db == 0 {
            return self.content_in(x).gcd(other);
        }
        let (ca, cb) = (self.content_in(x), other.content_in(x));
        let content = ca.gcd(&cb);
        let mut p = self.div_exact(&ca).expect("content divides").integer_primitive();
        let mut q = other.div_exact(&cb).expect("content divides").integer_primitive();
        if p.degree_in(x) < q.degree_in(x) {
            std::mem::swap(&mut p, &mut q);
        }
        let g = loop {
            let r = p.pseudo_remainder(&q, x);
            if r.is_zero() {
                break q;
            }
            if r.degree_in(x) == 0 {
                break Polynomial::one();
            }
            p = q;
            q = r.primitive_part_in(x).integer_primitive();
        };
        content.mul(&g).integer_primitive()
    }

    /// Rescales to coprime integer coefficients with a positive leading
    /// coefficient. Keeps remainder sequences from growing.
    fn integer_primitive(&self) -> Polynomial {
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for (_, c) in self.terms() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        if num.is_zero() {
            return self.clone();
        }
        if self.leading_coefficient().is_negative() {
            num = -num;
        }
        self.scale(&Rational::new(den, num))
    }

    fn content_in(&self, var: &str) -> Polynomial {
        let mut g = Polynomial::zero();
        for c in self.coefficients_in(var).values() {
            g = g.gcd(c);
            if g.is_constant() && !g.is_zero() {
                return Polynomial::one();
            }
        }
        g
    }

    fn primitive_part_in(&self, var: &str) -> Polynomial {
        let c = self.content_in(var);
        self.div_exact(&c).expect("content divides")
    }

    fn pseudo_remainder(&self, divisor: &Polynomial, var: &str) -> Polynomial {
        let dcoeffs = divisor.coefficients_in(var);
        let (&dq, lq) = dcoeffs.iter().next_back().expect("nonzero divisor");
        let mut r = self.clone();
        while !r.is_zero() {
            let rcoeffs = r.coefficients_in(var);
            let (&dr, lr) = rcoeffs.iter().next_back().expect("nonzero remainder");
            if dr < dq {
                break;
            }
            let mut shift = BTreeMap::new();
            shift.insert(dr - dq, lr.clone());
            let t = Polynomial::from_coefficients(var, &shift);
            r = r.mul(lq).sub(&t.mul(divisor));
        }
        r
    }

    /// Substitutes the assigned parameters; unassigned ones stay symbolic.
    pub fn substitute(&self, assignment: &Assignment) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (v, e) in &m.0 {
                match assignment.get(v.as_ref()) {
                    Some(val) => coeff *= pow_rational(val, *e),
                    None => rest.push((v.clone(), *e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<Rational, ScalarError> {
        let p = self.substitute(assignment);
        match p.constant_value() {
            Some(v) => Ok(v),
            None => {
                let missing = p.variables().into_iter().next().unwrap_or_default();
                Err(ScalarError::MissingParameter(missing))
            }
        }
    }

    /// Replaces each parameter by a polynomial (simultaneous substitution).
    pub fn compose(&self, images: &BTreeMap<String, Polynomial>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone());
            for (v, e) in &m.0 {
                let factor = match images.get(v.as_ref()) {
                    Some(p) => p.pow(*e),
                    None => Polynomial::from_terms([(Monomial::var_pow(v.clone(), *e), Rational::one())]),
                };
                term = term.mul(&factor);
            }
            out = out.add(&term);
        }
        out
    }
}

pub(crate) fn pow_rational(base: &Rational, exp: u32) -> Rational {
    let mut r = Rational::one();
    for _ in 0..exp {
        r *= base;
    }
    r
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let negative = c.is_negative();
            let abs = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl From<i64> for Polynomial {
    fn from(v: i64) -> Self {
        Polynomial::constant(Rational::from_integer(BigInt::from(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(&[(&str, u32)], i64)]) -> Polynomial {
        Polynomial::from_terms(terms.iter().map(|(m, c)| {
            let mono = m
                .iter()
                .fold(Monomial::one(), |acc, (v, e)| acc.mul(&Monomial::var_pow(Arc::from(*v), *e)));
            (mono, Rational::from_integer(BigInt::from(*c)))
        }))
    }

    #[test]
    fn grlex_orders_by_degree_then_name() {
        let x = Monomial::var("a");
        let y = Monomial::var("b");
        let xy = x.mul(&y);
        assert!(xy > x);
        assert!(x > y);
        assert!(Monomial::one() < y);
    }

    #[test]
    fn exact_division_and_remainder_detection() {
        // (a + b)(a - b) / (a + b) = a - b
        let a_plus_b = p(&[(&[("a", 1)], 1), (&[("b", 1)], 1)]);
        let a_minus_b = p(&[(&[("a", 1)], 1), (&[("b", 1)], -1)]);
        let prod = a_plus_b.mul(&a_minus_b);
        assert_eq!(prod.div_exact(&a_plus_b), Some(a_minus_b));
        assert_eq!(prod.add(&Polynomial::one()).div_exact(&a_plus_b), None);
    }

    #[test]
    fn gcd_of_multivariate_products() {
        let f = p(&[(&[("a", 1)], 1), (&[("b", 1)], 1)]);
        let g = p(&[(&[("a", 2)], 1), (&[], 1)]);
        let h = p(&[(&[("b", 1), ("c", 1)], 2), (&[("a", 1)], -1)]);
        let lhs = f.mul(&g).mul(&h);
        let rhs = f.mul(&h).mul(&p(&[(&[("c", 1)], 1), (&[], 3)]));
        let gcd = lhs.gcd(&rhs);
        let expected = f.mul(&h);
        // Equal up to a rational unit.
        let ratio = gcd.div_exact(&expected).expect("divisible");
        assert!(ratio.is_constant() && !ratio.is_zero());
    }

    #[test]
    fn display_uses_descending_grlex() {
        let q = p(&[(&[("a", 2)], 1), (&[("b", 1)], -2), (&[], 3)]);
        assert_eq!(q.to_string(), "a^2 - 2*b + 3");
    }
}
