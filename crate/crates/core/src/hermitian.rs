//! Complex structures, automorphisms and the Hermitian metric of a 2-form.

use thiserror::Error;

use crate::exterior::{FormError, KForm};
use crate::liealg::{LieAlgebra, LieError};
use crate::linalg::Matrix;
use crate::scalars::{Assignment, Scalar, ScalarError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HermitianError {
    #[error("matrix is {0}x{1}, expected {2}x{2}")]
    Shape(usize, usize, usize),
    #[error("2-form is not J-invariant")]
    NotInvariant,
    #[error("metric still depends on parameters {0:?}")]
    NotNumeric(Vec<String>),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// An almost complex structure given by its action on the dual basis:
/// column `k` of `dual` holds the coefficients of `J e^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexStructure {
    pub name: String,
    dual: Matrix,
    primal: Matrix,
}

impl ComplexStructure {
    pub fn from_dual(name: &str, dual: Matrix) -> Result<Self, HermitianError> {
        if !dual.is_square() {
            return Err(HermitianError::Shape(dual.rows(), dual.cols(), dual.rows()));
        }
        let primal = dual.transpose().neg();
        Ok(ComplexStructure { name: name.to_string(), dual, primal })
    }

    /// Builds the structure from the matrix of `J` acting on vectors
    /// (column `j` is `J e_j`).
    pub fn from_primal(name: &str, primal: Matrix) -> Result<Self, HermitianError> {
        if !primal.is_square() {
            return Err(HermitianError::Shape(primal.rows(), primal.cols(), primal.rows()));
        }
        let dual = primal.transpose().neg();
        Ok(ComplexStructure { name: name.to_string(), dual, primal })
    }

    pub fn dual(&self) -> &Matrix {
        &self.dual
    }

    /// Matrix of `J` on vectors.
    pub fn primal(&self) -> &Matrix {
        &self.primal
    }

    pub fn dim(&self) -> usize {
        self.dual.rows()
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.primal.mul_vec(x)
    }

    pub fn substitute(&self, assignment: &Assignment) -> Result<Self, ScalarError> {
        Ok(ComplexStructure {
            name: self.name.clone(),
            dual: self.dual.substitute(assignment)?,
            primal: self.primal.substitute(assignment)?,
        })
    }

    pub fn squares_to_minus_one(&self) -> bool {
        self.primal.mul(&self.primal) == Matrix::identity(self.dim()).neg()
    }
}

/// Nijenhuis tensor `N(x, y)`.
pub fn nijenhuis(g: &LieAlgebra, j: &ComplexStructure, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>, HermitianError> {
    let jx = j.apply(x);
    let jy = j.apply(y);
    let t1 = g.bracket(x, y)?;
    let t2 = g.bracket(&jx, &jy)?;
    let t3 = j.apply(&g.bracket(&jx, y)?);
    let t4 = j.apply(&g.bracket(x, &jy)?);
    Ok((0..g.dim())
        .map(|k| &(&(&t2[k] - &t1[k]) - &t3[k]) - &t4[k])
        .collect())
}

/// `J^2 = -1` and the Nijenhuis tensor vanishes on all basis pairs.
pub fn is_complex_structure(g: &LieAlgebra, j: &ComplexStructure) -> Result<bool, HermitianError> {
    check_shape(g, j.dual())?;
    if !j.squares_to_minus_one() {
        return Ok(false);
    }
    for a in 0..g.dim() {
        for b in a + 1..g.dim() {
            let n = nijenhuis(g, j, &g.basis_vector(a), &g.basis_vector(b))?;
            if n.iter().any(|c| !c.is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_shape(g: &LieAlgebra, m: &Matrix) -> Result<(), HermitianError> {
    if m.rows() != g.dim() || m.cols() != g.dim() {
        return Err(HermitianError::Shape(m.rows(), m.cols(), g.dim()));
    }
    Ok(())
}

/// A linear map given on the dual basis: `e^k -> sum_i dual[i][k] e^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub dual: Matrix,
}

impl Automorphism {
    pub fn new(dual: Matrix) -> Self {
        Automorphism { dual }
    }

    pub fn pullback_form(&self, form: &KForm) -> Result<KForm, FormError> {
        form.apply_dual(&self.dual)
    }

    /// Preserves brackets and is invertible.
    pub fn is_automorphism(&self, g: &LieAlgebra) -> Result<bool, HermitianError> {
        check_shape(g, &self.dual)?;
        if self.dual.det().is_zero() {
            return Ok(false);
        }
        Ok(g.dual_map_is_homomorphism(g, &self.dual)?)
    }

    pub fn commutes_with(&self, j: &ComplexStructure) -> bool {
        self.dual.mul(j.dual()) == j.dual().mul(&self.dual)
    }

    /// Image of a complex structure: `A^{-1} J A` on the dual side.
    pub fn transform_structure(&self, j: &ComplexStructure) -> Result<ComplexStructure, HermitianError> {
        let inv = self.dual.inverse().map_err(|_| HermitianError::Shape(0, 0, self.dual.rows()))?;
        ComplexStructure::from_dual(&j.name, inv.mul(j.dual()).mul(&self.dual))
    }
}

/// `Ω(Jx, Jy) = Ω(x, y)` for all x, y.
pub fn is_j_invariant(omega: &KForm, j: &ComplexStructure) -> Result<bool, FormError> {
    Ok(invariance_defect(omega, j)?.is_zero())
}

/// `Ω(J·, J·) - Ω` as a 2-form.
pub fn invariance_defect(omega: &KForm, j: &ComplexStructure) -> Result<KForm, FormError> {
    Ok(omega.apply_dual(&j.primal().transpose())?.sub(omega))
}

/// Matrix of `Ω(x, y)` on basis vectors.
pub fn form_matrix(omega: &KForm) -> Matrix {
    let n = omega.dim();
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            if i != k {
                w.set(i, k, omega.evaluate_basis(&[i + 1, k + 1]));
            }
        }
    }
    w
}

/// `G[i][j] = Ω(e_i, J e_j)`; fails if `Ω` is not J-invariant.
pub fn gram_metric(omega: &KForm, j: &ComplexStructure) -> Result<Matrix, HermitianError> {
    if !is_j_invariant(omega, j)? {
        return Err(HermitianError::NotInvariant);
    }
    Ok(form_matrix(omega).mul(j.primal()))
}

/// Positive definiteness of the metric at a rational point, by leading
/// principal minors.
pub fn is_positive_at(g: &Matrix, assignment: &Assignment) -> Result<bool, HermitianError> {
    let m = g.substitute(assignment)?;
    let free = m.parameters();
    if !free.is_empty() {
        return Err(HermitianError::NotNumeric(free.into_iter().collect()));
    }
    Ok(m.leading_minors().iter().all(|d| {
        d.to_rational()
            .map(|r| r > num_traits::Zero::zero())
            .unwrap_or(false)
    }))
}
