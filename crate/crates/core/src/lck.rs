//! Locally conformally Kähler structures: verification, Lee form, Vaisman
//! test and Morse-Novikov cohomology.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse_scalar, ParseError};
use crate::exterior::{basis_tuples, FormError, KForm};
use crate::hermitian::{gram_metric, invariance_defect, ComplexStructure, HermitianError};
use crate::liealg::{LieAlgebra, LieError};
use crate::linalg::{Matrix, MatrixError};
use crate::scalars::{format_rational, Assignment, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LckError {
    #[error("structure `{0}` has no witness points")]
    NoWitness(String),
    #[error("2-form is degenerate")]
    Degenerate,
    #[error("no 1-form solves theta ^ omega = d omega")]
    Inconsistent,
    #[error("Lee form vanishes at the witness")]
    ThetaZero,
    #[error("1-form is not closed: d theta = {0}")]
    NotClosed(String),
    #[error("twisted differential does not square to zero")]
    NotACochainComplex,
    #[error("witness {index} violates constraint `{constraint}`")]
    WitnessViolates { index: usize, constraint: String },
    #[error("witness index {0} out of range")]
    NoSuchWitness(usize),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Hermitian(#[from] HermitianError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Gt,
    Ge,
    Lt,
    Le,
    Ne,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ne => "!=",
            Relation::Eq => "=",
        }
    }

    fn holds(self, v: &Rational) -> bool {
        let z = Rational::zero();
        match self {
            Relation::Gt => *v > z,
            Relation::Ge => *v >= z,
            Relation::Lt => *v < z,
            Relation::Le => *v <= z,
            Relation::Ne => *v != z,
            Relation::Eq => *v == z,
        }
    }
}

/// A polynomial (in)equality `lhs REL rhs`, stored as `lhs - rhs REL 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub text: String,
    pub difference: Scalar,
    pub relation: Relation,
}

impl Constraint {
    pub fn parse(text: &str, params: &[String]) -> Result<Self, ParseError> {
        const OPS: [(&str, Relation); 6] = [
            (">=", Relation::Ge),
            ("<=", Relation::Le),
            ("!=", Relation::Ne),
            (">", Relation::Gt),
            ("<", Relation::Lt),
            ("=", Relation::Eq),
        ];
        for (op, rel) in OPS {
            if let Some(pos) = text.find(op) {
                let lhs = parse_scalar(text[..pos].trim(), params)?;
                let rhs = parse_scalar(text[pos + op.len()..].trim(), params)?;
                return Ok(Constraint { text: text.trim().to_string(), difference: &lhs - &rhs, relation: rel });
            }
        }
        Err(ParseError::UnexpectedToken { token: "missing relation".into(), input: text.to_string() })
    }

    /// Evaluates the constraint; a vanishing denominator counts as violation.
    pub fn holds(&self, assignment: &Assignment) -> Result<bool, ScalarError> {
        match self.difference.eval(assignment) {
            Ok(v) => Ok(self.relation.holds(&v)),
            Err(ScalarError::DenominatorVanishes { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} 0", self.difference, self.relation.symbol())
    }
}

/// A candidate lcK structure `(J, Ω, θ)` on a Lie algebra, possibly
/// depending on parameters restricted by `constraints`.
#[derive(Debug, Clone)]
pub struct LcKStructure {
    pub id: String,
    pub algebra: LieAlgebra,
    pub j: ComplexStructure,
    pub theta: KForm,
    pub omega: KForm,
    pub params: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub witnesses: Vec<Assignment>,
}

/// Outcome of a single check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub pass: bool,
    pub residual: Option<String>,
    pub witness: Option<Assignment>,
}

impl CheckOutcome {
    pub fn ok() -> Self {
        CheckOutcome { pass: true, residual: None, witness: None }
    }

    pub fn fail(residual: impl Into<String>) -> Self {
        CheckOutcome { pass: false, residual: Some(residual.into()), witness: None }
    }

    fn from_form(f: &KForm) -> Self {
        if f.is_zero() {
            Self::ok()
        } else {
            Self::fail(f.to_string())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LckReport {
    pub theta_closed: CheckOutcome,
    pub twisted_closed: CheckOutcome,
    pub j_invariant: CheckOutcome,
    /// Metric positive and Lee form nonzero at every witness.
    pub positive: CheckOutcome,
}

impl LckReport {
    pub fn passed(&self) -> bool {
        self.theta_closed.pass && self.twisted_closed.pass && self.j_invariant.pass && self.positive.pass
    }

    pub fn first_failure(&self) -> Option<(&'static str, &CheckOutcome)> {
        [
            ("d theta = 0", &self.theta_closed),
            ("d omega = theta ^ omega", &self.twisted_closed),
            ("J-invariance", &self.j_invariant),
            ("positivity", &self.positive),
        ]
        .into_iter()
        .find(|(_, c)| !c.pass)
    }
}

/// `d_θ α = dα - θ ∧ α`.
pub fn twisted_differential(g: &LieAlgebra, theta: &KForm, alpha: &KForm) -> Result<KForm, LckError> {
    Ok(g.d(alpha)?.sub(&theta.wedge(alpha)?))
}

pub fn verify_lck(s: &LcKStructure) -> Result<LckReport, LckError> {
    if s.witnesses.is_empty() {
        return Err(LckError::NoWitness(s.id.clone()));
    }
    let g = &s.algebra;
    let theta_closed = CheckOutcome::from_form(&g.d(&s.theta)?);
    let twisted_closed = CheckOutcome::from_form(&twisted_differential(g, &s.theta, &s.omega)?);
    let j_invariant = CheckOutcome::from_form(&invariance_defect(&s.omega, &s.j)?);
    let positive = if j_invariant.pass {
        check_witnesses(s)?
    } else {
        CheckOutcome::fail("metric undefined: omega is not J-invariant")
    };
    Ok(LckReport { theta_closed, twisted_closed, j_invariant, positive })
}

fn check_witnesses(s: &LcKStructure) -> Result<CheckOutcome, LckError> {
    let gram = gram_metric(&s.omega, &s.j)?;
    for w in &s.witnesses {
        let fail = |msg: String| CheckOutcome { pass: false, residual: Some(msg), witness: Some(w.clone()) };
        let m = match gram.substitute(w) {
            Ok(m) => m,
            Err(e) => return Ok(fail(e.to_string())),
        };
        let minors = m.leading_minors();
        for (k, d) in minors.iter().enumerate() {
            match d.to_rational() {
                Some(r) if r > Rational::zero() => {}
                Some(r) => return Ok(fail(format!("leading minor {} = {}", k + 1, format_rational(&r)))),
                None => return Ok(fail(format!("metric depends on free parameters: {d}"))),
            }
        }
        match s.theta.substitute(w) {
            Ok(t) if t.is_zero() => return Ok(fail("Lee form vanishes".into())),
            Ok(_) => {}
            Err(e) => return Ok(fail(e.to_string())),
        }
    }
    Ok(CheckOutcome::ok())
}

impl LcKStructure {
    /// Checks that each witness satisfies every constraint.
    pub fn check_witness_constraints(&self) -> Result<(), LckError> {
        for (i, w) in self.witnesses.iter().enumerate() {
            for c in &self.constraints {
                if !c.holds(w)? {
                    return Err(LckError::WitnessViolates { index: i, constraint: c.text.clone() });
                }
            }
        }
        Ok(())
    }

    /// Substitutes a full parameter assignment.
    pub fn instantiate(&self, w: &Assignment) -> Result<LcKStructure, LckError> {
        Ok(LcKStructure {
            id: self.id.clone(),
            algebra: self.algebra.instantiate(w)?,
            j: self.j.substitute(w)?,
            theta: self.theta.substitute(w)?,
            omega: self.omega.substitute(w)?,
            params: self.params.iter().filter(|p| !w.contains_key(*p)).cloned().collect(),
            constraints: Vec::new(),
            witnesses: vec![Assignment::new()],
        })
    }
}

/// Result of solving for the Lee form of a 2-form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeeForm {
    pub theta: KForm,
    pub closed: bool,
}

/// Solves `θ ∧ Ω = dΩ` for the unique 1-form θ (dimension at least 4).
pub fn lee_form(g: &LieAlgebra, omega: &KForm) -> Result<LeeForm, LckError> {
    let n = g.dim();
    if n % 2 == 1 || omega.wedge_power(n / 2).is_zero() {
        return Err(LckError::Degenerate);
    }
    let d_omega = g.d(omega)?;
    let rows = basis_tuples(n, 3);
    let cols: Vec<KForm> = (1..=n)
        .map(|i| KForm::basis(n, &[i]).and_then(|e| e.wedge(omega)))
        .collect::<Result<_, _>>()?;
    let mut m = Matrix::zeros(rows.len(), n);
    for (r, t) in rows.iter().enumerate() {
        for (c, f) in cols.iter().enumerate() {
            m.set(r, c, f.coeff(t));
        }
    }
    let b: Vec<Scalar> = rows.iter().map(|t| d_omega.coeff(t)).collect();
    let theta = match m.solve(&b) {
        Ok(x) => KForm::one_form(&x),
        Err(MatrixError::Inconsistent) => return Err(LckError::Inconsistent),
        Err(e) => return Err(e.into()),
    };
    let closed = g.d(&theta)?.is_zero();
    Ok(LeeForm { theta, closed })
}

/// Outcome of the Vaisman test at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VaismanOutcome {
    pub vaisman: bool,
    /// Metric dual of θ normalized so that θ(A) = 1.
    pub anti_lee: Vec<Rational>,
    /// `g(ad_A ·, ·) + g(·, ad_A ·)` when nonzero.
    pub residual: Option<String>,
}

/// Vaisman test: `ad_A` is skew-symmetric for the metric, where `A` is the
/// vector with `θ(A) = 1` orthogonal to `ker θ`.
pub fn vaisman_test(s: &LcKStructure, at: &Assignment) -> Result<VaismanOutcome, LckError> {
    let inst = s.instantiate(at)?;
    let g = &inst.algebra;
    let n = g.dim();
    let theta = inst.theta.components();
    if theta.iter().all(Scalar::is_zero) {
        return Err(LckError::ThetaZero);
    }
    let gram = gram_metric(&inst.omega, &inst.j)?;
    let kernel = Matrix::from_rows(vec![theta.clone()])?.nullspace();
    let mut rows = vec![theta];
    let mut rhs = vec![Scalar::one()];
    for k in kernel {
        let kt = Matrix::from_rows(vec![k])?.mul(&gram);
        rows.push(kt.row(0));
        rhs.push(Scalar::zero());
    }
    let a = Matrix::from_rows(rows)?.solve(&rhs)?;
    let ad = g.ad_matrix(&a)?;
    let defect = gram.mul(&ad).add(&ad.transpose().mul(&gram));
    let anti_lee = a
        .iter()
        .map(|x| x.to_rational().ok_or_else(|| LieError::ParametersNotInstantiated(x.variables().into_iter().collect())))
        .collect::<Result<Vec<_>, _>>()?;
    let vaisman = defect.is_zero();
    debug_assert_eq!(anti_lee.len(), n);
    Ok(VaismanOutcome {
        vaisman,
        anti_lee,
        residual: (!vaisman).then(|| defect.to_string()),
    })
}

/// Matrix of `d_θ : Λ^k → Λ^{k+1}` in the lexicographic bases.
pub fn twisted_differential_matrix(g: &LieAlgebra, theta: &KForm, k: usize) -> Result<Matrix, LckError> {
    let n = g.dim();
    let src = basis_tuples(n, k);
    let dst = basis_tuples(n, k + 1);
    let mut m = Matrix::zeros(dst.len(), src.len());
    for (c, t) in src.iter().enumerate() {
        let img = twisted_differential(g, theta, &KForm::basis(n, t)?)?;
        for (r, u) in dst.iter().enumerate() {
            m.set(r, c, img.coeff(u));
        }
    }
    Ok(m)
}

/// Betti numbers of the complex `(Λ g*, d - θ∧)` at a numeric point.
pub fn morse_novikov_betti(g: &LieAlgebra, theta: &KForm, at: &Assignment) -> Result<Vec<usize>, LckError> {
    let g = g.instantiate(at)?;
    let theta = theta.substitute(at)?;
    let dtheta = g.d(&theta)?;
    if !dtheta.is_zero() {
        return Err(LckError::NotClosed(dtheta.to_string()));
    }
    let n = g.dim();
    let mats: Vec<Matrix> = (0..n)
        .map(|k| twisted_differential_matrix(&g, &theta, k))
        .collect::<Result<_, _>>()?;
    for w in mats.windows(2) {
        if !w[1].mul(&w[0]).is_zero() {
            return Err(LckError::NotACochainComplex);
        }
    }
    let ranks: Vec<usize> = mats.iter().map(Matrix::rank).collect();
    Ok((0..=n)
        .map(|k| {
            let dim_k = basis_tuples(n, k).len();
            let out_rank = if k < n { ranks[k] } else { 0 };
            let in_rank = if k > 0 { ranks[k - 1] } else { 0 };
            dim_k - out_rank - in_rank
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_form;

    fn rh3_structure() -> LcKStructure {
        let params = vec!["s".to_string()];
        let g = LieAlgebra::from_structure_equations("rh3", "0,0,-12,0", &[]).unwrap();
        let j = ComplexStructure::from_dual(
            "J",
            Matrix::from_ints(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]),
        )
        .unwrap();
        let mut w1 = Assignment::new();
        w1.insert("s".into(), Rational::from_integer(1.into()));
        let mut w2 = Assignment::new();
        w2.insert("s".into(), Rational::new(7.into(), 3.into()));
        LcKStructure {
            id: "rh3".into(),
            algebra: g,
            j,
            theta: parse_form("-e4", 4, 1, &params).unwrap(),
            omega: parse_form("s*(e12+e34)", 4, 2, &params).unwrap(),
            constraints: vec![Constraint::parse("s > 0", &params).unwrap()],
            params,
            witnesses: vec![w1, w2],
        }
    }

    #[test]
    fn heisenberg_family_verifies() {
        let s = rh3_structure();
        let r = verify_lck(&s).unwrap();
        assert!(r.passed(), "{r:?}");
        s.check_witness_constraints().unwrap();
    }

    #[test]
    fn lee_form_recovered() {
        let s = rh3_structure();
        let lee = lee_form(&s.algebra, &s.omega).unwrap();
        assert_eq!(lee.theta, s.theta);
        assert!(lee.closed);
        let degenerate = parse_form("e12", 4, 2, &[]).unwrap();
        assert_eq!(lee_form(&s.algebra, &degenerate), Err(LckError::Degenerate));
    }

    #[test]
    fn heisenberg_is_vaisman() {
        let s = rh3_structure();
        let v = vaisman_test(&s, &s.witnesses[0]).unwrap();
        assert!(v.vaisman);
        assert_eq!(v.anti_lee[3], Rational::from_integer((-1).into()));
    }

    #[test]
    fn constraint_parsing() {
        let p = vec!["a".to_string(), "b".to_string()];
        let c = Constraint::parse("a*b >= 1", &p).unwrap();
        assert_eq!(c.relation, Relation::Ge);
        let mut w = Assignment::new();
        w.insert("a".into(), Rational::from_integer(1.into()));
        w.insert("b".into(), Rational::from_integer(1.into()));
        assert!(c.holds(&w).unwrap());
        let d = Constraint::parse("1/(a-1) > 0", &p).unwrap();
        assert!(!d.holds(&w).unwrap());
    }

    #[test]
    fn missing_witness_is_an_error() {
        let mut s = rh3_structure();
        s.witnesses.clear();
        assert!(matches!(verify_lck(&s), Err(LckError::NoWitness(_))));
    }
}
