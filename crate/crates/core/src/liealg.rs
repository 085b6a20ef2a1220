//! Real Lie algebras given by structure equations `de^k`.

use std::fmt;

use thiserror::Error;

use crate::exterior::{basis_tuples, FormError, KForm};
use crate::expr::{parse_structure_component, ParseError};
use crate::linalg::Matrix;
use crate::scalars::{Assignment, Scalar, ScalarError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("structure string has {found} components, expected {expected}")]
    WrongComponentCount { expected: usize, found: usize },
    #[error("component {index} of the structure equations is not a 2-form: {source}")]
    BadComponent { index: usize, source: ParseError },
    #[error("Jacobi identity fails: d(de^{index}) = {residual}")]
    JacobiFails { index: usize, residual: String },
    #[error("operation needs numeric structure constants; free parameters: {0:?}")]
    ParametersNotInstantiated(Vec<String>),
    #[error("vector has length {found}, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A Lie algebra with basis `e_1..e_n` described by `d e^k` on the dual basis.
///
/// Convention: `de^k(e_i, e_j) = -e^k([e_i, e_j])`, so `de^3 = -e^{12}`
/// means `[e_1, e_2] = e_3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    params: Vec<String>,
    d_coframe: Vec<KForm>,
    // structure[i][j][k] = e^k([e_i, e_j]), 0-based.
    structure: Vec<Vec<Vec<Scalar>>>,
}

impl LieAlgebra {
    /// Builds an algebra from a comma-separated list of `de^k`, e.g.
    /// `"0,0,-12,0"`. The Jacobi identity is checked.
    pub fn from_structure_equations(name: &str, spec: &str, params: &[String]) -> Result<Self, LieError> {
        let parts: Vec<&str> = split_top_level(spec);
        let dim = parts.len();
        let mut d_coframe = Vec::with_capacity(dim);
        for (i, p) in parts.iter().enumerate() {
            let f = parse_structure_component(p.trim(), dim, params)
                .map_err(|source| LieError::BadComponent { index: i + 1, source })?;
            d_coframe.push(f);
        }
        Self::from_differentials(name, d_coframe, params)
    }

    pub fn from_differentials(name: &str, d_coframe: Vec<KForm>, params: &[String]) -> Result<Self, LieError> {
        let dim = d_coframe.len();
        let mut structure = vec![vec![vec![Scalar::zero(); dim]; dim]; dim];
        for (k, f) in d_coframe.iter().enumerate() {
            if f.dim() != dim {
                return Err(FormError::DimensionMismatch(dim, f.dim()).into());
            }
            for (idx, c) in f.terms() {
                let (i, j) = (idx[0] - 1, idx[1] - 1);
                structure[i][j][k] = -c;
                structure[j][i][k] = c.clone();
            }
        }
        let g = LieAlgebra {
            name: name.to_string(),
            dim,
            params: params.to_vec(),
            d_coframe,
            structure,
        };
        g.check_jacobi()?;
        Ok(g)
    }

    /// Builds an algebra from brackets: `brackets(i, j)` returns the
    /// coordinates of `[e_i, e_j]` for `i < j` (0-based).
    pub fn from_brackets(
        name: &str,
        dim: usize,
        params: &[String],
        mut brackets: impl FnMut(usize, usize) -> Vec<Scalar>,
    ) -> Result<Self, LieError> {
        let mut d_coframe = vec![KForm::zero(dim, 2); dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let v = brackets(i, j);
                if v.len() != dim {
                    return Err(LieError::WrongLength { expected: dim, found: v.len() });
                }
                for (k, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        let t = KForm::monomial(dim, &[i + 1, j + 1], -c)?;
                        d_coframe[k] = d_coframe[k].add(&t);
                    }
                }
            }
        }
        Self::from_differentials(name, d_coframe, params)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn d_coframe(&self) -> &[KForm] {
        &self.d_coframe
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// `e^k([e_i, e_j])`, 0-based.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.structure[i][j][k]
    }

    /// Chevalley-Eilenberg differential on forms with constant coefficients.
    pub fn d(&self, form: &KForm) -> Result<KForm, LieError> {
        if form.dim() != self.dim {
            return Err(FormError::DimensionMismatch(self.dim, form.dim()).into());
        }
        let mut out = KForm::zero(self.dim, form.degree() + 1);
        for (idx, c) in form.terms() {
            for p in 0..idx.len() {
                let de = &self.d_coframe[idx[p] - 1];
                if de.is_zero() {
                    continue;
                }
                let prefix = KForm::basis(self.dim, &idx[..p])?;
                let suffix = KForm::basis(self.dim, &idx[p + 1..])?;
                let mut t = prefix.wedge(de)?.wedge(&suffix)?.scale(c);
                if p % 2 == 1 {
                    t = t.neg();
                }
                out = out.add(&t);
            }
        }
        Ok(out)
    }

    fn check_jacobi(&self) -> Result<(), LieError> {
        for (k, de) in self.d_coframe.iter().enumerate() {
            let dd = self.d(de)?;
            if !dd.is_zero() {
                return Err(LieError::JacobiFails { index: k + 1, residual: dd.to_string() });
            }
        }
        Ok(())
    }

    /// True when `d(de^k) = 0` for all `k` (always true for a constructed value).
    pub fn jacobi_holds(&self) -> bool {
        self.check_jacobi().is_ok()
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>, LieError> {
        for v in [x, y] {
            if v.len() != self.dim {
                return Err(LieError::WrongLength { expected: self.dim, found: v.len() });
            }
        }
        let mut out = vec![Scalar::zero(); self.dim];
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y[j].is_zero() || i == j {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.structure[i][j][k];
                    if !c.is_zero() {
                        *o = &*o + &(&xy * c);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim];
        v[i] = Scalar::one();
        v
    }

    /// Matrix of `ad_x` in the basis `e_1..e_n` (column j is `[x, e_j]`).
    pub fn ad_matrix(&self, x: &[Scalar]) -> Result<Matrix, LieError> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let col = self.bracket(x, &self.basis_vector(j))?;
            for (k, v) in col.into_iter().enumerate() {
                m.set(k, j, v);
            }
        }
        Ok(m)
    }

    /// `x -> tr(ad_x)`, as a 1-form.
    pub fn unimodular_character(&self) -> KForm {
        let coeffs: Vec<Scalar> = (0..self.dim)
            .map(|i| {
                let mut t = Scalar::zero();
                for j in 0..self.dim {
                    t = &t + &self.structure[i][j][j];
                }
                t
            })
            .collect();
        KForm::one_form(&coeffs)
    }

    pub fn is_unimodular(&self) -> bool {
        self.unimodular_character().is_zero()
    }

    pub fn free_parameters(&self) -> Vec<String> {
        let mut set = std::collections::BTreeSet::new();
        for f in &self.d_coframe {
            set.extend(f.parameters());
        }
        set.into_iter().collect()
    }

    /// Basis of the center. Requires numeric structure constants.
    pub fn center(&self) -> Result<Vec<Vec<Scalar>>, LieError> {
        let free = self.free_parameters();
        if !free.is_empty() {
            return Err(LieError::ParametersNotInstantiated(free));
        }
        // x is central iff sum_i x_i c^k_{ij} = 0 for all j, k.
        let mut rows = Vec::new();
        for j in 0..self.dim {
            for k in 0..self.dim {
                let row: Vec<Scalar> = (0..self.dim).map(|i| self.structure[i][j][k].clone()).collect();
                if row.iter().any(|c| !c.is_zero()) {
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return Ok((0..self.dim).map(|i| self.basis_vector(i)).collect());
        }
        Ok(Matrix::from_rows(rows).expect("rectangular").nullspace())
    }

    /// Substitutes parameter values into the structure constants.
    pub fn instantiate(&self, assignment: &Assignment) -> Result<LieAlgebra, LieError> {
        let d_coframe = self
            .d_coframe
            .iter()
            .map(|f| f.substitute(assignment))
            .collect::<Result<Vec<_>, _>>()?;
        let params: Vec<String> = self
            .params
            .iter()
            .filter(|p| !assignment.contains_key(*p))
            .cloned()
            .collect();
        Self::from_differentials(&self.name, d_coframe, &params)
    }

    /// Derived algebra `[g, g]` as a spanning set of vectors (rank over the
    /// rational function field).
    pub fn derived_algebra(&self) -> Vec<Vec<Scalar>> {
        let mut rows = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let v = self.structure[i][j].clone();
                if v.iter().any(|c| !c.is_zero()) {
                    rows.push(v);
                }
            }
        }
        if rows.is_empty() {
            return Vec::new();
        }
        let m = Matrix::from_rows(rows).expect("rectangular");
        let ech = m.echelon();
        (0..ech.pivots.len()).map(|r| ech.reduced.row(r)).collect()
    }

    /// Checks whether the dual map `e^k -> sum_i m[i][k] e^i` from `other`'s
    /// coframe into this algebra's forms intertwines the differentials.
    pub fn dual_map_is_homomorphism(&self, other: &LieAlgebra, m: &Matrix) -> Result<bool, LieError> {
        if other.dim != self.dim {
            return Err(LieError::WrongLength { expected: self.dim, found: other.dim });
        }
        for k in 0..self.dim {
            let image = KForm::one_form(&m.column(k));
            let lhs = other.d_coframe[k].apply_dual(m)?;
            let rhs = self.d(&image)?;
            if !lhs.sub(&rhs).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Structure equations in the input notation.
    pub fn structure_string(&self) -> String {
        self.d_coframe
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Basis 2-forms `e^{ij}` in lexicographic order.
    pub fn two_form_basis(&self) -> Vec<Vec<usize>> {
        basis_tuples(self.dim, 2)
    }
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ({})", self.name, self.structure_string())
    }
}

/// Splits on commas that are not nested inside parentheses or braces.
pub fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
