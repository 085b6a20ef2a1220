//! Builders for higher-dimensional lcK algebras: semidirect extensions by a
//! Hermitian representation, Oeljeklaus-Toma algebras, and mapping tori of
//! coKähler algebras.

use std::fmt;

use thiserror::Error;

use crate::exterior::{FormError, KForm};
use crate::hermitian::{is_complex_structure, ComplexStructure, HermitianError};
use crate::lck::{verify_lck, LcKStructure, LckError};
use crate::liealg::{LieAlgebra, LieError};
use crate::linalg::Matrix;
use crate::scalars::{Assignment, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("rho(e_{0}) is not skew-symmetric")]
    RhoNotSkew(usize),
    #[error("rho(e_{0}) does not commute with the fiber complex structure")]
    RhoNotCommuting(usize),
    #[error("rho does not vanish on the commutator ideal")]
    RhoOnCommutator,
    #[error("action is not a representation: pi([e_{i}, e_{j}]) != [pi(e_{i}), pi(e_{j})]")]
    NotARepresentation { i: usize, j: usize },
    #[error("map is not a derivation on (e_{i}, e_{j})")]
    NotADerivation { i: usize, j: usize },
    #[error("coKähler condition fails: {0}")]
    NotCoKaehler(CoKaehlerCondition),
    #[error("derivation is incompatible with the coKähler data: {0}")]
    DNotCompatible(&'static str),
    #[error("alpha must be nonzero")]
    AlphaZero,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("constructed structure fails verification: {0}")]
    NotLck(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Hermitian(#[from] HermitianError),
    #[error(transparent)]
    Lck(#[from] LckError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The defining conditions of a coKähler structure `(η, ξ, Φ, g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoKaehlerCondition {
    /// `η(ξ) = 1`
    ReebNormalized,
    /// `Φ² = -Id + η ⊗ ξ`
    PhiSquare,
    /// `g(Φx, Φy) = g(x, y) - η(x)η(y)`, g symmetric
    MetricCompatible,
    /// `dη = dω = 0`
    Closed,
    /// `N_Φ + 2 dη ⊗ ξ = 0`
    Normal,
}

impl fmt::Display for CoKaehlerCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoKaehlerCondition::ReebNormalized => "eta(xi) = 1",
            CoKaehlerCondition::PhiSquare => "Phi^2 = -Id + eta (x) xi",
            CoKaehlerCondition::MetricCompatible => "g(Phi x, Phi y) = g(x, y) - eta(x) eta(y)",
            CoKaehlerCondition::Closed => "d eta = d omega = 0",
            CoKaehlerCondition::Normal => "N_Phi + 2 d eta (x) xi = 0",
        })
    }
}

/// How a semidirect product acts.
#[derive(Debug, Clone)]
pub enum Action {
    /// `h ⋊_D R`: one new basis vector `t` with `[t, x] = Dx`.
    Derivation(Matrix),
    /// `h ⋉_π V`: one matrix `π(e_i)` per basis vector of `h`.
    Representation(Vec<Matrix>),
}

fn combination(coeffs: &[Scalar], mats: &[Matrix]) -> Matrix {
    let m = mats[0].rows();
    let mut out = Matrix::zeros(m, m);
    for (c, a) in coeffs.iter().zip(mats) {
        if !c.is_zero() {
            out = out.add(&a.scale(c));
        }
    }
    out
}

/// Builds `h ⋊_D R` or `h ⋉_π V`, checking the derivation or
/// representation property first. New basis vectors come last.
pub fn semidirect_extension(base: &LieAlgebra, action: &Action) -> Result<LieAlgebra, ConstructionError> {
    let n = base.dim();
    match action {
        Action::Derivation(d) => {
            if d.rows() != n || d.cols() != n {
                return Err(ConstructionError::Shape(format!("derivation is {}x{}, algebra has dim {n}", d.rows(), d.cols())));
            }
            for i in 0..n {
                for j in i + 1..n {
                    let (x, y) = (base.basis_vector(i), base.basis_vector(j));
                    let lhs = d.mul_vec(&base.bracket(&x, &y)?);
                    let a = base.bracket(&d.column(i), &y)?;
                    let b = base.bracket(&x, &d.column(j))?;
                    if (0..n).any(|k| !(&lhs[k] - &(&a[k] + &b[k])).is_zero()) {
                        return Err(ConstructionError::NotADerivation { i: i + 1, j: j + 1 });
                    }
                }
            }
            let name = format!("{} x_D R", base.name());
            Ok(LieAlgebra::from_brackets(&name, n + 1, base.params(), |i, j| {
                let mut v = vec![Scalar::zero(); n + 1];
                if j < n {
                    let b = base.bracket(&base.basis_vector(i), &base.basis_vector(j)).expect("basis vectors");
                    v[..n].clone_from_slice(&b);
                } else {
                    // [e_i, t] = -D e_i
                    for (k, c) in d.column(i).into_iter().enumerate() {
                        v[k] = -&c;
                    }
                }
                v
            })?)
        }
        Action::Representation(pi) => {
            if pi.len() != n {
                return Err(ConstructionError::Shape(format!("{} matrices for an algebra of dim {n}", pi.len())));
            }
            let m = pi.first().map(Matrix::rows).unwrap_or(0);
            if pi.iter().any(|a| a.rows() != m || a.cols() != m) {
                return Err(ConstructionError::Shape("representation matrices differ in size".into()));
            }
            for i in 0..n {
                for j in i + 1..n {
                    let br = base.bracket(&base.basis_vector(i), &base.basis_vector(j))?;
                    if combination(&br, pi) != pi[i].commutator(&pi[j]) {
                        return Err(ConstructionError::NotARepresentation { i: i + 1, j: j + 1 });
                    }
                }
            }
            let name = format!("{} x R^{m}", base.name());
            Ok(LieAlgebra::from_brackets(&name, n + m, base.params(), |i, j| {
                let mut v = vec![Scalar::zero(); n + m];
                if j < n {
                    let b = base.bracket(&base.basis_vector(i), &base.basis_vector(j)).expect("basis vectors");
                    v[..n].clone_from_slice(&b);
                } else if i < n {
                    for (k, c) in pi[i].column(j - n).into_iter().enumerate() {
                        v[n + k] = c;
                    }
                }
                v
            })?)
        }
    }
}

/// `J_0` on `R^{2m}` with basis `u_1, v_1, ..., u_m, v_m` and `J_0 u_i = v_i`.
pub fn fiber_complex_structure(m: usize) -> Matrix {
    let block = Matrix::from_ints(&[&[0, -1], &[1, 0]]);
    Matrix::block_diagonal(&vec![block; m])
}

/// Data for extending an lcK algebra by a `2m`-dimensional Hermitian
/// representation `π = -θ/2 Id + ρ`.
#[derive(Debug, Clone)]
pub struct LcKExtensionSpec {
    pub base: LcKStructure,
    /// `ρ(e_i)` for each basis vector of the base, in the basis `u_1, v_1, ...`.
    pub rho: Vec<Matrix>,
}

impl LcKExtensionSpec {
    pub fn fiber_dim(&self) -> usize {
        self.rho.first().map(Matrix::rows).unwrap_or(0)
    }

    pub fn pi(&self) -> Vec<Matrix> {
        let m = self.fiber_dim();
        let half = Scalar::from_ratio(-1, 2);
        let theta = self.base.theta.components();
        self.rho
            .iter()
            .zip(theta)
            .map(|(r, t)| Matrix::identity(m).scale(&(&half * &t)).add(r))
            .collect()
    }

    /// Checks that each `ρ(e_i)` lies in `u(m)` and that `ρ` kills `[h, h]`.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        let n = self.base.algebra.dim();
        if self.rho.len() != n {
            return Err(ConstructionError::Shape(format!("{} rho matrices for a base of dim {n}", self.rho.len())));
        }
        let m = self.fiber_dim();
        if !m.is_multiple_of(2) || self.rho.iter().any(|r| r.rows() != m || r.cols() != m) {
            return Err(ConstructionError::Shape("fiber must be even-dimensional and square".into()));
        }
        let j0 = fiber_complex_structure(m / 2);
        for (i, r) in self.rho.iter().enumerate() {
            if !r.add(&r.transpose()).is_zero() {
                return Err(ConstructionError::RhoNotSkew(i + 1));
            }
            if !r.commutator(&j0).is_zero() {
                return Err(ConstructionError::RhoNotCommuting(i + 1));
            }
        }
        for v in self.base.algebra.derived_algebra() {
            if !combination(&v, &self.rho).is_zero() {
                return Err(ConstructionError::RhoOnCommutator);
            }
        }
        Ok(())
    }
}

/// `h ⋉_π R^{2m}` with `θ' = θ`, `Ω' = Ω + Σ u^i ∧ v^i` and `J' = J ⊕ J_0`.
/// The result is verified before it is returned.
pub fn lck_extension(spec: &LcKExtensionSpec) -> Result<LcKStructure, ConstructionError> {
    spec.validate()?;
    let base = &spec.base;
    let n = base.algebra.dim();
    let m = spec.fiber_dim();
    let g = semidirect_extension(&base.algebra, &Action::Representation(spec.pi()))?;
    let total = n + m;
    let embed: Vec<usize> = (1..=n).collect();
    let theta = base.theta.reindex(total, &embed)?;
    let mut omega = base.omega.reindex(total, &embed)?;
    for i in 0..m / 2 {
        omega = omega.add(&KForm::basis(total, &[n + 2 * i + 1, n + 2 * i + 2])?);
    }
    let primal = Matrix::block_diagonal(&[base.j.primal().clone(), fiber_complex_structure(m / 2)]);
    let j = ComplexStructure::from_primal(&format!("{}+J0", base.j.name), primal)?;
    let out = LcKStructure {
        id: format!("{} x R^{m}", base.id),
        algebra: g,
        j,
        theta,
        omega,
        params: base.params.clone(),
        constraints: base.constraints.clone(),
        witnesses: base.witnesses.clone(),
    };
    ensure_lck(&out)?;
    Ok(out)
}

fn ensure_lck(s: &LcKStructure) -> Result<(), ConstructionError> {
    if !is_complex_structure(&s.algebra, &s.j)? {
        return Err(ConstructionError::NotLck("J is not integrable".into()));
    }
    let report = verify_lck(s)?;
    match report.first_failure() {
        None => Ok(()),
        Some((name, c)) => Err(ConstructionError::NotLck(format!(
            "{name}: {}",
            c.residual.clone().unwrap_or_default()
        ))),
    }
}

/// `tr(ad_X) - m θ(X)` on the base, where `2m` is the fiber dimension.
/// The extension is unimodular iff this vanishes.
pub fn unimodularity_defect(spec: &LcKExtensionSpec) -> KForm {
    let m = Scalar::from_int((spec.fiber_dim() / 2) as i64);
    spec.base.algebra.unimodular_character().sub(&spec.base.theta.scale(&m))
}

/// Whether the extension is unimodular at the given parameter values.
pub fn unimodularity_check(spec: &LcKExtensionSpec, at: &Assignment) -> Result<bool, ConstructionError> {
    Ok(unimodularity_defect(spec).substitute(at)?.is_zero())
}

fn rational_scalar(r: &Rational) -> Scalar {
    Scalar::from_rational(r.clone())
}

fn numeric_structure(id: &str, g: LieAlgebra, j: ComplexStructure, theta: KForm, omega: KForm) -> LcKStructure {
    LcKStructure {
        id: id.to_string(),
        algebra: g,
        j,
        theta,
        omega,
        params: Vec::new(),
        constraints: Vec::new(),
        witnesses: vec![Assignment::new()],
    }
}

/// The Oeljeklaus-Toma algebra of dimension `2n + 2` in the basis
/// `x_1..x_n, y_1..y_n, z_1, z_2`, with its standard lcK structure.
pub fn ot_algebra(c: &[Rational]) -> Result<LcKStructure, ConstructionError> {
    let n = c.len();
    if n == 0 {
        return Err(ConstructionError::Shape("need at least one c_i".into()));
    }
    let dim = 2 * n + 2;
    let (z1, z2) = (2 * n, 2 * n + 1);
    let half = Scalar::from_ratio(1, 2);
    let g = LieAlgebra::from_brackets(&format!("ot{n}"), dim, &[], |i, j| {
        let mut v = vec![Scalar::zero(); dim];
        if i < n {
            let ci = rational_scalar(&c[i]);
            if j == n + i {
                v[j] = Scalar::one();
            } else if j == z1 {
                v[z1] = -&half;
                v[z2] = ci;
            } else if j == z2 {
                v[z1] = -&ci;
                v[z2] = -&half;
            }
        }
        v
    })?;
    let mut primal = Matrix::zeros(dim, dim);
    for i in 0..n {
        primal.set(n + i, i, Scalar::one());
        primal.set(i, n + i, Scalar::from_int(-1));
    }
    primal.set(z2, z1, Scalar::one());
    primal.set(z1, z2, Scalar::from_int(-1));
    let j = ComplexStructure::from_primal("J", primal)?;
    let mut theta = KForm::zero(dim, 1);
    let mut omega = KForm::basis(dim, &[z1 + 1, z2 + 1])?;
    for i in 0..n {
        theta = theta.add(&KForm::basis(dim, &[i + 1])?);
        for k in 0..n {
            let w = Scalar::from_int(if i == k { 2 } else { 1 });
            omega = omega.add(&KForm::monomial(dim, &[i + 1, n + k + 1], w)?);
        }
    }
    let s = numeric_structure(&format!("ot/{n}"), g, j, theta, omega);
    ensure_lck(&s)?;
    Ok(s)
}

/// `aff(R)^n` in the basis `e_1, f_1, ..., e_n, f_n` with `[e_i, f_i] = f_i`,
/// `J e_i = f_i`, `θ = Σ e^i` and `Ω = 2 Σ e^i ∧ f^i + Σ_{i≠j} e^i ∧ f^j`.
pub fn aff_structure(n: usize) -> Result<LcKStructure, ConstructionError> {
    let dim = 2 * n;
    let g = LieAlgebra::from_brackets(&format!("aff{n}"), dim, &[], |i, j| {
        let mut v = vec![Scalar::zero(); dim];
        if i % 2 == 0 && j == i + 1 {
            v[j] = Scalar::one();
        }
        v
    })?;
    let j = ComplexStructure::from_primal("J", fiber_complex_structure(n))?;
    let mut theta = KForm::zero(dim, 1);
    let mut omega = KForm::zero(dim, 2);
    for i in 0..n {
        theta = theta.add(&KForm::basis(dim, &[2 * i + 1])?);
        for k in 0..n {
            let w = Scalar::from_int(if i == k { 2 } else { 1 });
            omega = omega.add(&KForm::monomial(dim, &[2 * i + 1, 2 * k + 2], w)?);
        }
    }
    let s = numeric_structure(&format!("aff/{n}"), g, j, theta, omega);
    ensure_lck(&s)?;
    Ok(s)
}

fn rotation(c: &Scalar) -> Matrix {
    let mut r = Matrix::zeros(2, 2);
    r.set(0, 1, -c);
    r.set(1, 0, c.clone());
    r
}

/// `aff(R)^n` extended by `R^2` with `ρ(e_i)` the rotation by `c_i` and
/// `ρ(f_i) = 0`.
pub fn aff_ot_spec(c: &[Rational]) -> Result<LcKExtensionSpec, ConstructionError> {
    let base = aff_structure(c.len())?;
    let rho = c
        .iter()
        .flat_map(|ci| [rotation(&rational_scalar(ci)), Matrix::zeros(2, 2)])
        .collect();
    Ok(LcKExtensionSpec { base, rho })
}

/// Dual matrix of the map `e_i -> x_i, f_i -> y_i, u_k -> z_k` from the
/// `aff(R)^n` extension to the Oeljeklaus-Toma algebra: column `k` holds the
/// pullback of the `k`-th OT coframe element.
pub fn ot_identification(n: usize) -> Matrix {
    let dim = 2 * n + 2;
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..n {
        m.set(2 * i, i, Scalar::one());
        m.set(2 * i + 1, n + i, Scalar::one());
    }
    m.set(2 * n, 2 * n, Scalar::one());
    m.set(2 * n + 1, 2 * n + 1, Scalar::one());
    m
}

/// Which pieces of structure a linear isomorphism preserves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsomorphismCheck {
    pub brackets: bool,
    pub complex: bool,
    pub lee: bool,
    pub fundamental: bool,
}

impl IsomorphismCheck {
    pub fn all(&self) -> bool {
        self.brackets && self.complex && self.lee && self.fundamental
    }
}

/// Tests the map whose pullback on coframes is `m` (column `k` is the
/// pullback of the `k`-th coframe element of `target`).
pub fn check_isomorphism(
    source: &LcKStructure,
    target: &LcKStructure,
    m: &Matrix,
) -> Result<IsomorphismCheck, ConstructionError> {
    let brackets = !m.det().is_zero() && source.algebra.dual_map_is_homomorphism(&target.algebra, m)?;
    let complex = m.mul(target.j.dual()) == source.j.dual().mul(m);
    let lee = target.theta.apply_dual(m)? == source.theta;
    let fundamental = target.omega.apply_dual(m)? == source.omega;
    Ok(IsomorphismCheck { brackets, complex, lee, fundamental })
}

/// The family `θ = μ e^4`, `Ω = σ(e^12 - (δ + μ) e^34)` on the algebra
/// `(δ/2 14 + 24, -14 + δ/2 24, -12 + δ 34, 0)` with
/// `J e^1 = e^2`, `J e^3 = -e^4`.
pub fn dprime_structure(delta: &Rational, mu: &Rational, sigma: &Rational) -> Result<LcKStructure, ConstructionError> {
    let (d, m, s) = (rational_scalar(delta), rational_scalar(mu), rational_scalar(sigma));
    let half_d = &d * &Scalar::from_ratio(1, 2);
    let e = |idx: &[usize], c: Scalar| KForm::monomial(4, idx, c);
    let d_coframe = vec![
        e(&[1, 4], half_d.clone())?.add(&e(&[2, 4], Scalar::one())?),
        e(&[1, 4], Scalar::from_int(-1))?.add(&e(&[2, 4], half_d)?),
        e(&[1, 2], Scalar::from_int(-1))?.add(&e(&[3, 4], d.clone())?),
        KForm::zero(4, 2),
    ];
    let g = LieAlgebra::from_differentials("dp4d", d_coframe, &[])?;
    let j = ComplexStructure::from_dual(
        "J",
        Matrix::from_ints(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, -1, 0]]),
    )?;
    let theta = e(&[4], m.clone())?;
    let omega = e(&[1, 2], s.clone())?.sub(&e(&[3, 4], &s * &(&d + &m))?);
    let st = numeric_structure("dp4d", g, j, theta, omega);
    ensure_lck(&st)?;
    Ok(st)
}

/// Extension of [`dprime_structure`] by `R^{2n}` with `ρ(e_4)` the block
/// rotation `[[0, a_i], [-a_i, 0]]` and `ρ(e_1) = ρ(e_2) = ρ(e_3) = 0`.
pub fn dprime_extension_spec(
    delta: &Rational,
    mu: &Rational,
    sigma: &Rational,
    a: &[Rational],
) -> Result<LcKExtensionSpec, ConstructionError> {
    let base = dprime_structure(delta, mu, sigma)?;
    let m = 2 * a.len();
    let blocks: Vec<Matrix> = a.iter().map(|ai| rotation(&rational_scalar(ai)).neg()).collect();
    let rho4 = Matrix::block_diagonal(&blocks);
    let mut rho = vec![Matrix::zeros(m, m); 3];
    rho.push(rho4);
    Ok(LcKExtensionSpec { base, rho })
}

/// A coKähler algebra `(h, η, ξ, Φ, g)` with a derivation `D` satisfying
/// `Dω = αω`, `η∘D = 0`, `Dξ = 0` and `DΦ = ΦD`, where `ω = g(·, Φ·)`.
#[derive(Debug, Clone)]
pub struct CoKaehlerData {
    pub h: LieAlgebra,
    pub eta: KForm,
    pub xi: Vec<Scalar>,
    /// Matrix of `Φ` on vectors.
    pub phi: Matrix,
    pub metric: Matrix,
    /// Matrix of `D` on vectors.
    pub d: Matrix,
    pub alpha: Scalar,
}

impl CoKaehlerData {
    /// `ω(x, y) = g(x, Φy)`.
    pub fn omega(&self) -> Result<KForm, ConstructionError> {
        let n = self.h.dim();
        let w = self.metric.mul(&self.phi);
        let mut out = KForm::zero(n, 2);
        for i in 0..n {
            for j in i + 1..n {
                out = out.add(&KForm::monomial(n, &[i + 1, j + 1], w.get(i, j).clone())?);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        use CoKaehlerCondition::*;
        let n = self.h.dim();
        let fail = |c| Err(ConstructionError::NotCoKaehler(c));
        let square = |m: &Matrix| m.rows() == n && m.cols() == n;
        if !square(&self.phi) || !square(&self.metric) || !square(&self.d) || self.xi.len() != n || self.eta.dim() != n {
            return Err(ConstructionError::Shape(format!("coKähler data must live on dimension {n}")));
        }
        let eta = self.eta.components();
        let eta_of = |v: &[Scalar]| eta.iter().zip(v).fold(Scalar::zero(), |acc, (a, b)| &acc + &(a * b));
        if !eta_of(&self.xi).is_one() {
            return fail(ReebNormalized);
        }
        let xi_col = Matrix::from_rows(self.xi.iter().map(|x| vec![x.clone()]).collect())
            .map_err(|e| ConstructionError::Shape(e.to_string()))?;
        let eta_row = Matrix::from_rows(vec![eta.clone()]).map_err(|e| ConstructionError::Shape(e.to_string()))?;
        let xi_eta = xi_col.mul(&eta_row);
        if self.phi.mul(&self.phi) != Matrix::identity(n).neg().add(&xi_eta) {
            return fail(PhiSquare);
        }
        let g = &self.metric;
        if *g != g.transpose() || self.phi.transpose().mul(g).mul(&self.phi) != g.sub(&eta_row.transpose().mul(&eta_row)) {
            return fail(MetricCompatible);
        }
        let omega = self.omega()?;
        if !self.h.d(&self.eta)?.is_zero() || !self.h.d(&omega)?.is_zero() {
            return fail(Closed);
        }
        let deta = self.h.d(&self.eta)?;
        for a in 0..n {
            for b in a + 1..n {
                let (x, y) = (self.h.basis_vector(a), self.h.basis_vector(b));
                let (px, py) = (self.phi.mul_vec(&x), self.phi.mul_vec(&y));
                let t1 = self.h.bracket(&x, &y)?;
                let t2 = self.h.bracket(&px, &py)?;
                let t3 = self.phi.mul_vec(&self.h.bracket(&px, &y)?);
                let t4 = self.phi.mul_vec(&self.h.bracket(&x, &py)?);
                let c = &deta.evaluate(&[x, y])? * &Scalar::from_int(2);
                if (0..n).any(|k| !(&(&(&(&t2[k] - &t1[k]) - &t3[k]) - &t4[k]) + &(&c * &self.xi[k])).is_zero()) {
                    return fail(Normal);
                }
            }
        }
        Ok(())
    }

    fn validate_derivation(&self) -> Result<(), ConstructionError> {
        if self.alpha.is_zero() {
            return Err(ConstructionError::AlphaZero);
        }
        let n = self.h.dim();
        // derivation property, via the semidirect product builder
        semidirect_extension(&self.h, &Action::Derivation(self.d.clone()))?;
        let omega = self.omega()?;
        // (D·ω)(x, y) = ω(Dx, y) + ω(x, Dy)
        let mut d_omega = KForm::zero(n, 2);
        for a in 0..n {
            for b in a + 1..n {
                let (x, y) = (self.h.basis_vector(a), self.h.basis_vector(b));
                let v = &omega.evaluate(&[self.d.mul_vec(&x), y.clone()])? + &omega.evaluate(&[x, self.d.mul_vec(&y)])?;
                d_omega = d_omega.add(&KForm::monomial(n, &[a + 1, b + 1], v)?);
            }
        }
        if d_omega != omega.scale(&self.alpha) {
            return Err(ConstructionError::DNotCompatible("D omega != alpha omega"));
        }
        let eta_d = self.eta.apply_dual(&self.d.transpose())?;
        if !eta_d.is_zero() {
            return Err(ConstructionError::DNotCompatible("eta o D != 0"));
        }
        if self.d.mul_vec(&self.xi).iter().any(|c| !c.is_zero()) {
            return Err(ConstructionError::DNotCompatible("D xi != 0"));
        }
        if !self.d.commutator(&self.phi).is_zero() {
            return Err(ConstructionError::DNotCompatible("D Phi != Phi D"));
        }
        Ok(())
    }
}

/// `g = h ⋊_D R` with `θ(X, a) = -αa`, `Ω = ω + η ∧ θ` and
/// `J(X, a) = (aξ - ΦX, -η(X))`. The sign makes `Ω(x, Jx) > 0` for `α > 0`.
/// Integrability and the lcK conditions are checked on the output.
pub fn cokahler_mapping_torus(data: &CoKaehlerData) -> Result<LcKStructure, ConstructionError> {
    data.validate()?;
    data.validate_derivation()?;
    let n = data.h.dim();
    let g = semidirect_extension(&data.h, &Action::Derivation(data.d.clone()))?;
    let total = n + 1;
    let embed: Vec<usize> = (1..=n).collect();
    let theta = KForm::monomial(total, &[total], -&data.alpha)?;
    let eta = data.eta.reindex(total, &embed)?;
    let omega = data.omega()?.reindex(total, &embed)?.add(&eta.wedge(&theta)?);
    let mut primal = Matrix::zeros(total, total);
    for i in 0..n {
        for k in 0..n {
            primal.set(k, i, -data.phi.get(k, i));
        }
        primal.set(k_last(total), i, -&data.eta.coeff(&[i + 1]));
        primal.set(i, k_last(total), data.xi[i].clone());
    }
    let j = ComplexStructure::from_primal("J", primal)?;
    let params = data.h.params().to_vec();
    let s = LcKStructure {
        id: format!("{} mapping torus", data.h.name()),
        algebra: g,
        j,
        theta,
        omega,
        params,
        constraints: Vec::new(),
        witnesses: vec![Assignment::new()],
    };
    ensure_lck(&s)?;
    Ok(s)
}

fn k_last(total: usize) -> usize {
    total - 1
}

/// The 3-dimensional coKähler algebra `R^2 ⋊_B Rξ` with `[ξ, e_1] = e_2`,
/// `[ξ, e_2] = -e_1`, `Φ = J` on `R^2`, `η = ξ^*`, orthonormal metric,
/// together with the derivation `D` given on `R^2` and `Dξ = 0`.
pub fn rotation_cokahler(d_plane: [[i64; 2]; 2], alpha: Scalar) -> Result<CoKaehlerData, ConstructionError> {
    let h = LieAlgebra::from_brackets("R2 x_B R", 3, &[], |i, j| {
        let mut v = vec![Scalar::zero(); 3];
        match (i, j) {
            // [e_1, ξ] = -e_2, [e_2, ξ] = e_1
            (0, 2) => v[1] = Scalar::from_int(-1),
            (1, 2) => v[0] = Scalar::one(),
            _ => {}
        }
        v
    })?;
    let phi = Matrix::from_ints(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 0]]);
    let [[a, b], [c, e]] = d_plane;
    let d = Matrix::from_ints(&[&[a, b, 0], &[c, e, 0], &[0, 0, 0]]);
    Ok(CoKaehlerData {
        eta: KForm::basis(3, &[3])?,
        xi: vec![Scalar::zero(), Scalar::zero(), Scalar::one()],
        phi,
        metric: Matrix::identity(3),
        d,
        alpha,
        h,
    })
}

/// The example: `D = 1/2 Id` on `R^2` (so `α = 1`).
pub fn example_cokahler() -> Result<CoKaehlerData, ConstructionError> {
    let mut data = rotation_cokahler([[0, 0], [0, 0]], Scalar::one())?;
    let half = Scalar::from_ratio(1, 2);
    data.d.set(0, 0, half.clone());
    data.d.set(1, 1, half);
    Ok(data)
}

/// Pullback matrix identifying the mapping torus of [`example_cokahler`]
/// (basis `e_1, e_2, ξ, t`) with `(0, 0, -13+24, -14-23)`:
/// `e_1 <-> 2t`, `e_2 <-> -ξ`, `e_3 <-> e_1`, `e_4 <-> -e_2`. Under it `J`
/// becomes `J2` with `(a, b) = (0, -2)`.
pub fn torus_identification() -> Matrix {
    let mut m = Matrix::zeros(4, 4);
    // column k: pullback of the k-th target coframe element
    m.set(3, 0, Scalar::from_ratio(1, 2));
    m.set(2, 1, Scalar::from_int(-1));
    m.set(0, 2, Scalar::one());
    m.set(1, 3, Scalar::from_int(-1));
    m
}
