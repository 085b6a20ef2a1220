//! Linear solving for twisted-closed and J-invariant 2-forms, and
//! certificates that a solution space contains no positive element.

use num_traits::Zero;
use thiserror::Error;

use crate::exterior::{basis_tuples, FormError, KForm};
use crate::hermitian::ComplexStructure;
use crate::lck::LckError;
use crate::liealg::{LieAlgebra, LieError};
use crate::linalg::{nullspace_from, Matrix};
use crate::scalars::{Assignment, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("theta is not closed: d theta = {0}")]
    ThetaNotClosed(String),
    #[error("basis index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("certificate is malformed: {0}")]
    BadCertificate(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Lck(#[from] LckError),
}

/// Basis of a space of 2-forms, valid where every side condition is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSpace {
    pub dim: usize,
    pub basis: Vec<KForm>,
    pub side_conditions: Vec<Scalar>,
}

impl SolutionSpace {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `sum_i c_i b_i` with fresh symbols `_c1, _c2, ...`.
    pub fn generic_element(&self) -> KForm {
        let mut out = KForm::zero(self.dim, 2);
        for (i, b) in self.basis.iter().enumerate() {
            out = out.add(&b.scale(&Scalar::var(&format!("_c{}", i + 1))));
        }
        out
    }

    /// True if some element has nonzero top power `Ω^{n/2}`.
    pub fn has_nondegenerate_element(&self) -> bool {
        self.dim.is_multiple_of(2) && !self.generic_element().wedge_power(self.dim / 2).is_zero()
    }
}

/// Stacks the linear conditions on the coefficients `ω_{ij}` of Ω:
/// `dΩ - θ∧Ω = 0`, and if `j` is given, `Ω(J·,J·) = Ω`.
pub fn condition_matrix(
    g: &LieAlgebra,
    theta: &KForm,
    j: Option<&ComplexStructure>,
) -> Result<Matrix, SolverError> {
    let n = g.dim();
    let cols = basis_tuples(n, 2);
    let twisted_rows = basis_tuples(n, 3);
    let mut rows: Vec<Vec<Scalar>> = twisted_rows
        .iter()
        .map(|_| vec![Scalar::zero(); cols.len()])
        .collect();
    let pt = j.map(|j| j.primal().transpose());
    let mut inv_rows: Vec<Vec<Scalar>> = if j.is_some() {
        cols.iter().map(|_| vec![Scalar::zero(); cols.len()]).collect()
    } else {
        Vec::new()
    };
    for (c, t) in cols.iter().enumerate() {
        let e = KForm::basis(n, t)?;
        let img = g.d(&e)?.sub(&theta.wedge(&e)?);
        for (r, u) in twisted_rows.iter().enumerate() {
            rows[r][c] = img.coeff(u);
        }
        if let Some(pt) = &pt {
            let defect = e.apply_dual(pt)?.sub(&e);
            for (r, u) in cols.iter().enumerate() {
                inv_rows[r][c] = defect.coeff(u);
            }
        }
    }
    rows.extend(inv_rows);
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, cols.len()));
    }
    Ok(Matrix::from_rows(rows).expect("rectangular"))
}

fn solve_space(g: &LieAlgebra, theta: &KForm, j: Option<&ComplexStructure>) -> Result<SolutionSpace, SolverError> {
    let dtheta = g.d(theta)?;
    if !dtheta.is_zero() {
        return Err(SolverError::ThetaNotClosed(dtheta.to_string()));
    }
    let n = g.dim();
    let cols = basis_tuples(n, 2);
    let m = condition_matrix(g, theta, j)?;
    let ech = m.echelon();
    let basis = nullspace_from(&ech, cols.len())
        .into_iter()
        .map(|v| {
            let mut f = KForm::zero(n, 2);
            for (c, t) in v.into_iter().zip(&cols) {
                if !c.is_zero() {
                    f = f.add(&KForm::monomial(n, t, c).expect("valid indices"));
                }
            }
            f
        })
        .collect();
    Ok(SolutionSpace { dim: n, basis, side_conditions: ech.side_conditions })
}

/// All 2-forms with `dΩ = θ ∧ Ω`.
pub fn twisted_closed_space(g: &LieAlgebra, theta: &KForm) -> Result<SolutionSpace, SolverError> {
    solve_space(g, theta, None)
}

/// J-invariant 2-forms with `dΩ = θ ∧ Ω`.
pub fn lck_space(g: &LieAlgebra, theta: &KForm, j: &ComplexStructure) -> Result<SolutionSpace, SolverError> {
    solve_space(g, theta, Some(j))
}

/// Rank of the condition matrix after substituting numbers.
pub fn rank_at(
    g: &LieAlgebra,
    theta: &KForm,
    j: Option<&ComplexStructure>,
    at: &Assignment,
) -> Result<usize, SolverError> {
    let m = condition_matrix(g, theta, j)?.substitute(at)?;
    Ok(m.rank())
}

/// Certificate that no element of a space is positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    /// `sum_i w_i Ω(x_i, J x_i) = 0` on the whole space with all `w_i > 0`;
    /// a single vector with weight 1 is the plain isotropic-vector case.
    Vanishing { vectors: Vec<(Vec<Rational>, Rational)> },
    /// Every element is degenerate.
    Degenerate,
}

/// `Ω(e_v, J e_v) ≡ 0` on the whole space, for a 1-based basis index `v`.
pub fn degeneracy_certificate(space: &SolutionSpace, j: &ComplexStructure, v: usize) -> Result<bool, SolverError> {
    let n = j.dim();
    if v == 0 || v > n {
        return Err(SolverError::IndexOutOfRange(v, n));
    }
    let mut e = vec![Scalar::zero(); n];
    e[v - 1] = Scalar::one();
    vanishes_on(space, j, &e)
}

/// `Ω(v, Jv) ≡ 0` for every Ω in the space.
pub fn vanishes_on(space: &SolutionSpace, j: &ComplexStructure, v: &[Scalar]) -> Result<bool, SolverError> {
    let jv = j.apply(v);
    for b in &space.basis {
        if !b.evaluate(&[v.to_vec(), jv.clone()])?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks an obstruction against a solution space.
pub fn check_obstruction(
    space: &SolutionSpace,
    j: &ComplexStructure,
    obstruction: &Obstruction,
) -> Result<bool, SolverError> {
    match obstruction {
        Obstruction::Degenerate => Ok(!space.has_nondegenerate_element()),
        Obstruction::Vanishing { vectors } => {
            if vectors.is_empty() {
                return Err(SolverError::BadCertificate("no vectors".into()));
            }
            let mut evaluated = Vec::new();
            for (x, w) in vectors {
                if *w <= Rational::zero() {
                    return Err(SolverError::BadCertificate("weights must be positive".into()));
                }
                if x.len() != space.dim || x.iter().all(Zero::is_zero) {
                    return Err(SolverError::BadCertificate("vectors must be nonzero of full length".into()));
                }
                let xs: Vec<Scalar> = x.iter().cloned().map(Scalar::from_rational).collect();
                evaluated.push((j.apply(&xs), xs, Scalar::from_rational(w.clone())));
            }
            for b in &space.basis {
                let mut total = Scalar::zero();
                for (jx, x, w) in &evaluated {
                    total = &total + &(w * &b.evaluate(&[x.clone(), jx.clone()])?);
                }
                if !total.is_zero() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_form;

    fn heisenberg() -> (LieAlgebra, ComplexStructure) {
        let g = LieAlgebra::from_structure_equations("rh3", "0,0,-12,0", &[]).unwrap();
        let j = ComplexStructure::from_dual(
            "J",
            Matrix::from_ints(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]),
        )
        .unwrap();
        (g, j)
    }

    #[test]
    fn heisenberg_lck_space_is_a_line() {
        let (g, j) = heisenberg();
        let theta = parse_form("-e4", 4, 1, &[]).unwrap();
        let s = lck_space(&g, &theta, &j).unwrap();
        assert_eq!(s.len(), 1);
        let omega = &s.basis[0];
        assert_eq!(omega.coeff(&[1, 2]), omega.coeff(&[3, 4]));
        assert!(s.has_nondegenerate_element());
    }

    #[test]
    fn non_closed_theta_rejected() {
        let (g, _) = heisenberg();
        let theta = parse_form("e3", 4, 1, &[]).unwrap();
        assert!(matches!(twisted_closed_space(&g, &theta), Err(SolverError::ThetaNotClosed(_))));
    }

    #[test]
    fn weighted_certificate() {
        let (g, j) = heisenberg();
        // For θ = e4 every solution has Ω(e1, Je1) = -Ω(e3, Je3).
        let theta = parse_form("e4", 4, 1, &[]).unwrap();
        let s = lck_space(&g, &theta, &j).unwrap();
        let unit = |k: usize| -> Vec<Rational> {
            (0..4).map(|i| if i == k { Rational::from_integer(1.into()) } else { Rational::zero() }).collect()
        };
        let one = Rational::from_integer(1.into());
        let cert = Obstruction::Vanishing { vectors: vec![(unit(0), one.clone()), (unit(2), one.clone())] };
        assert!(check_obstruction(&s, &j, &cert).unwrap());
        assert!(!degeneracy_certificate(&s, &j, 3).unwrap());
        assert!(matches!(degeneracy_certificate(&s, &j, 0), Err(SolverError::IndexOutOfRange(0, 4))));
    }
}
