//! Exterior forms on R^n with rational-function coefficients.
//!
//! Indices are 1-based and stored strictly increasing; `e^{12}` is `[1, 2]`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalars::{Assignment, Scalar, ScalarError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FormError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("interior product of a 0-form")]
    DegreeZero,
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KForm {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Scalar>,
}

/// All increasing index tuples of length `k` in `1..=n`, in lexicographic order.
pub fn basis_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Sorts `idx` in place and returns the sign of the permutation, or `None`
/// if an index repeats.
fn sort_with_sign(idx: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl KForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        KForm { dim, degree, coeffs: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        let mut f = KForm::zero(dim, 0);
        if !c.is_zero() {
            f.coeffs.insert(Vec::new(), c);
        }
        f
    }

    /// The basis form `e^{i_1} ∧ ... ∧ e^{i_k}` with indices in any order.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self, FormError> {
        Self::monomial(dim, indices, Scalar::one())
    }

    pub fn monomial(dim: usize, indices: &[usize], c: Scalar) -> Result<Self, FormError> {
        for &i in indices {
            if i == 0 || i > dim {
                return Err(FormError::IndexOutOfRange { index: i, dim });
            }
        }
        let mut idx = indices.to_vec();
        let mut f = KForm::zero(dim, indices.len());
        if let Some(sign) = sort_with_sign(&mut idx) {
            let c = if sign < 0 { -c } else { c };
            if !c.is_zero() {
                f.coeffs.insert(idx, c);
            }
        }
        Ok(f)
    }

    /// 1-form `sum_i v_i e^i`.
    pub fn one_form(coeffs: &[Scalar]) -> Self {
        let dim = coeffs.len();
        let mut f = KForm::zero(dim, 1);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                f.coeffs.insert(vec![i + 1], c.clone());
            }
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, indices: &[usize]) -> Scalar {
        self.coeffs.get(indices).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.coeffs.iter()
    }

    /// Coefficients of a 1-form as a vector.
    pub fn components(&self) -> Vec<Scalar> {
        (1..=self.dim).map(|i| self.coeff(&[i])).collect()
    }

    /// Coefficient vector over [`basis_tuples`] of this degree.
    pub fn coefficient_vector(&self) -> Vec<Scalar> {
        basis_tuples(self.dim, self.degree)
            .iter()
            .map(|t| self.coeff(t))
            .collect()
    }

    fn add_term(&mut self, idx: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(idx) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_same_shape(&self, other: &KForm) -> Result<(), FormError> {
        if self.dim != other.dim {
            return Err(FormError::DimensionMismatch(self.dim, other.dim));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(FormError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &KForm) -> Result<KForm, FormError> {
        self.check_same_shape(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &KForm) -> Result<KForm, FormError> {
        self.try_add(&other.neg())
    }

    /// Sum; panics on shape mismatch.
    pub fn add(&self, other: &KForm) -> KForm {
        self.try_add(other).expect("forms of equal shape")
    }

    pub fn sub(&self, other: &KForm) -> KForm {
        self.try_sub(other).expect("forms of equal shape")
    }

    pub fn neg(&self) -> KForm {
        KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(i, c)| (i.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> KForm {
        let mut out = KForm::zero(self.dim, self.degree);
        if s.is_zero() {
            return out;
        }
        for (i, c) in &self.coeffs {
            out.add_term(i.clone(), c * s);
        }
        out
    }

    pub fn wedge(&self, other: &KForm) -> Result<KForm, FormError> {
        if self.dim != other.dim {
            return Err(FormError::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = KForm::zero(self.dim, self.degree + other.degree);
        for (ia, ca) in &self.coeffs {
            for (ib, cb) in &other.coeffs {
                let mut idx: Vec<usize> = ia.iter().chain(ib.iter()).copied().collect();
                if let Some(sign) = sort_with_sign(&mut idx) {
                    let c = ca * cb;
                    out.add_term(idx, if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `self ∧ self ∧ ... ` (k factors); the 0-th power is the constant 1.
    pub fn wedge_power(&self, k: usize) -> KForm {
        let mut out = KForm::constant(self.dim, Scalar::one());
        for _ in 0..k {
            out = out.wedge(self).expect("same dimension");
        }
        out
    }

    /// Interior product `ι_x` with a vector given by its components.
    pub fn interior(&self, x: &[Scalar]) -> Result<KForm, FormError> {
        if x.len() != self.dim {
            return Err(FormError::DimensionMismatch(self.dim, x.len()));
        }
        if self.degree == 0 {
            return Err(FormError::DegreeZero);
        }
        let mut out = KForm::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.coeffs {
            for (p, &i) in idx.iter().enumerate() {
                let xi = &x[i - 1];
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(p);
                let v = c * xi;
                out.add_term(rest, if p % 2 == 1 { -v } else { v });
            }
        }
        Ok(out)
    }

    /// `ω(x_1, ..., x_k)`.
    pub fn evaluate(&self, vectors: &[Vec<Scalar>]) -> Result<Scalar, FormError> {
        if vectors.len() != self.degree {
            return Err(FormError::DegreeMismatch(self.degree, vectors.len()));
        }
        let mut f = self.clone();
        for v in vectors {
            f = f.interior(v)?;
        }
        Ok(f.coeff(&[]))
    }

    /// Evaluation of a form on basis vectors `e_{i_1}, ...` (1-based).
    pub fn evaluate_basis(&self, indices: &[usize]) -> Scalar {
        let mut idx = indices.to_vec();
        match sort_with_sign(&mut idx) {
            None => Scalar::zero(),
            Some(sign) => {
                let c = self.coeff(&idx);
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// Applies the dual linear map `e^k -> sum_i m[i][k] e^i`, extended
    /// multiplicatively to all degrees.
    pub fn apply_dual(&self, m: &Matrix) -> Result<KForm, FormError> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(FormError::DimensionMismatch(self.dim, m.rows()));
        }
        let images: Vec<KForm> = (0..self.dim)
            .map(|k| KForm::one_form(&m.column(k)))
            .collect();
        let mut out = KForm::zero(self.dim, self.degree);
        for (idx, c) in &self.coeffs {
            let mut term = KForm::constant(self.dim, c.clone());
            for &i in idx {
                term = term.wedge(&images[i - 1])?;
                if term.is_zero() {
                    break;
                }
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    pub fn substitute(&self, assignment: &Assignment) -> Result<KForm, FormError> {
        let mut out = KForm::zero(self.dim, self.degree);
        for (i, c) in &self.coeffs {
            out.add_term(i.clone(), c.substitute(assignment)?);
        }
        Ok(out)
    }

    pub fn map_coefficients(
        &self,
        mut f: impl FnMut(&Scalar) -> Result<Scalar, ScalarError>,
    ) -> Result<KForm, FormError> {
        let mut out = KForm::zero(self.dim, self.degree);
        for (i, c) in &self.coeffs {
            out.add_term(i.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Embeds into a larger space, renaming index `i` to `map[i - 1]`.
    pub fn reindex(&self, new_dim: usize, map: &[usize]) -> Result<KForm, FormError> {
        let mut out = KForm::zero(new_dim, self.degree);
        for (idx, c) in &self.coeffs {
            let new_idx: Vec<usize> = idx.iter().map(|&i| map[i - 1]).collect();
            out = out.try_add(&KForm::monomial(new_dim, &new_idx, c.clone())?)?;
        }
        Ok(out)
    }

    pub fn parameters(&self) -> std::collections::BTreeSet<String> {
        self.coeffs.values().flat_map(|c| c.variables()).collect()
    }
}

/// Formats a basis index tuple as `e12` or, for dimensions above 9, `e{1,10}`.
pub fn format_basis(dim: usize, idx: &[usize]) -> String {
    if dim <= 9 {
        let digits: String = idx.iter().map(|i| i.to_string()).collect();
        format!("e{digits}")
    } else {
        let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        format!("e{{{}}}", parts.join(","))
    }
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.coeffs {
            let (neg, abs) = match c.to_rational() {
                Some(r) if r < num_traits::Zero::zero() => (true, -c),
                _ => (false, c.clone()),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            if idx.is_empty() {
                write!(f, "{abs}")?;
                continue;
            }
            let b = format_basis(self.dim, idx);
            if abs.is_one() {
                write!(f, "{b}")?;
            } else if abs.numerator().len() > 1 || !abs.denominator().is_one() {
                write!(f, "({abs})*{b}")?;
            } else {
                write!(f, "{abs}*{b}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(idx: &[usize]) -> KForm {
        KForm::basis(4, idx).unwrap()
    }

    #[test]
    fn wedge_sign_and_repeats() {
        assert_eq!(e(&[2]).wedge(&e(&[1])).unwrap(), e(&[1, 2]).neg());
        assert!(e(&[1]).wedge(&e(&[1])).unwrap().is_zero());
        assert_eq!(e(&[2, 1]), e(&[1, 2]).neg());
    }

    #[test]
    fn interior_product_on_basis() {
        let x = vec![Scalar::zero(), Scalar::one(), Scalar::zero(), Scalar::zero()];
        assert_eq!(e(&[1, 2]).interior(&x).unwrap(), e(&[1]).neg());
        assert_eq!(KForm::constant(4, Scalar::one()).interior(&x), Err(FormError::DegreeZero));
    }

    #[test]
    fn evaluation_convention() {
        assert_eq!(e(&[1, 2]).evaluate_basis(&[1, 2]), Scalar::one());
        assert_eq!(e(&[1, 2]).evaluate_basis(&[2, 1]), -Scalar::one());
    }

    #[test]
    fn display() {
        let f = e(&[1, 2]).scale(&Scalar::from_int(2)).sub(&e(&[3, 4]));
        assert_eq!(f.to_string(), "2*e12 - e34");
        let g = KForm::basis(10, &[1, 10]).unwrap();
        assert_eq!(g.to_string(), "e{1,10}");
    }
}
