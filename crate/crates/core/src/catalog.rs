//! Machine-readable table of 4-dimensional Lie algebras, their complex
//! structures and lcK families, with the row-level verification driver.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::expr::{eval_rational, parse_form, parse_scalar, ParseError};
use crate::exterior::KForm;
use crate::hermitian::{is_complex_structure, Automorphism, ComplexStructure};
use crate::lck::{lee_form, twisted_differential, vaisman_test, verify_lck, Constraint, LcKStructure};
use crate::liealg::LieAlgebra;
use crate::linalg::Matrix;
use crate::report::{CheckRecord, EntryReport};
use crate::scalars::{Assignment, Rational, Scalar};
use crate::solver::{check_obstruction, lck_space, rank_at, twisted_closed_space, Obstruction, SolutionSpace};

/// The catalog shipped with the library.
pub const BUILTIN: &str = include_str!("../data/catalog.toml");

/// Row ids of the published lcK table; each must be covered by exactly one
/// catalog family.
pub const TABLE_ROWS: &[&str] = &[
    "R4",
    "gl2/J1mu/A",
    "gl2/J1mu/B-real",
    "gl2/J1mu/B-complex",
    "u2/Jab",
    "u2/J0b",
    "rh3",
    "rr30",
    "rr31",
    "rrp30",
    "rrp3g/J1",
    "rrp3g/J2",
    "r2r2/e3",
    "r2r2/e1",
    "r2r2/generic",
    "rp2/J1/generic",
    "rp2/J1/-2e1",
    "rp2/J1/e1",
    "rp2/J2/ab",
    "rp2/J2/01",
    "r41",
    "r4a1",
    "r4aa",
    "rp40d/J1",
    "rp40d/J2",
    "rp4gd/J1",
    "rp4gd/J2",
    "d4/J1",
    "d4/J2",
    "d41/-e4",
    "d41/e2",
    "d412/J1",
    "d412/J2",
    "d412/J3",
    "d4l/J1",
    "d4l/J2",
    "dp40/J2",
    "dp40/J3",
    "dp4d/J1",
    "dp4d/J2",
    "dp4d/J3",
    "dp4d/J4",
    "h4",
];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
}

fn schema(location: impl Into<String>, message: impl ToString) -> CatalogError {
    CatalogError::Schema { location: location.into(), message: message.to_string() }
}

// ---------------------------------------------------------------- raw records

type RawPoint = BTreeMap<String, String>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    #[serde(default)]
    entry: Vec<RawEntry>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct RawParam {
    name: String,
    #[serde(default)]
    constraints: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: String,
    name: String,
    salamon: String,
    #[serde(default)]
    params: Vec<RawParam>,
    #[serde(default)]
    notes: Vec<String>,
    #[serde(default, rename = "J")]
    complex: Vec<RawComplex>,
    #[serde(default)]
    center: Vec<RawCenter>,
    #[serde(default)]
    automorphism: Vec<RawAutomorphism>,
    #[serde(default)]
    lck: Vec<RawLck>,
    #[serde(default)]
    no_lck: Vec<RawNoLck>,
    #[serde(default)]
    replay: Vec<RawReplay>,
    #[serde(default)]
    equivalence: Vec<RawEquivalence>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComplex {
    name: String,
    matrix: Vec<String>,
    #[serde(default)]
    params: Vec<RawParam>,
    flag: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCenter {
    #[serde(default)]
    at: RawPoint,
    basis: Vec<String>,
    table: Option<String>,
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAutomorphism {
    name: String,
    matrix: Vec<String>,
    #[serde(default)]
    params: Vec<RawParam>,
    #[serde(default)]
    fixed: RawPoint,
    samples: Vec<RawPoint>,
    #[serde(default)]
    commutes_with: Vec<String>,
    conjugates: Option<(String, String)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLck {
    id: String,
    #[serde(rename = "J")]
    j: String,
    theta: String,
    omega: String,
    #[serde(default)]
    params: Vec<RawParam>,
    #[serde(default)]
    fixed: RawPoint,
    #[serde(default)]
    constraints: Vec<String>,
    #[serde(default)]
    alt_constraints: Vec<String>,
    witnesses: Vec<RawPoint>,
    vaisman: String,
    #[serde(default)]
    vaisman_if: Vec<String>,
    #[serde(default)]
    table_rows: Vec<String>,
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawObstruction {
    Kind(String),
    Vectors { vectors: Vec<(String, String)> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoLck {
    id: String,
    #[serde(rename = "J")]
    j: Option<String>,
    theta: String,
    #[serde(default)]
    params: Vec<RawParam>,
    #[serde(default)]
    fixed: RawPoint,
    #[serde(default)]
    constraints: Vec<String>,
    obstruction: RawObstruction,
    #[serde(default)]
    samples: Vec<RawPoint>,
    #[serde(default)]
    table_rows: Vec<String>,
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReplay {
    id: String,
    #[serde(rename = "J")]
    j: Option<String>,
    theta: String,
    #[serde(default)]
    params: Vec<RawParam>,
    #[serde(default)]
    fixed: RawPoint,
    twisted_dim: usize,
    lck_dim: Option<usize>,
    #[serde(default)]
    samples: Vec<RawPoint>,
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    matrix: Vec<String>,
    constraint: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquivalence {
    id: String,
    #[serde(rename = "J")]
    j: String,
    theta: String,
    omega: String,
    #[serde(default)]
    params: Vec<RawParam>,
    #[serde(default)]
    fixed: RawPoint,
    witness: RawPoint,
    steps: Vec<RawStep>,
    expected_theta: String,
    expected_omega: String,
    #[serde(default)]
    expected_params: RawPoint,
}

// ------------------------------------------------------------ built records

#[derive(Debug, Clone)]
pub struct NamedStructure {
    pub structure: ComplexStructure,
    pub params: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub flag: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CenterExpectation {
    pub at: Assignment,
    pub basis: Vec<Vec<Scalar>>,
    pub table: Option<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct AutomorphismFamily {
    pub name: String,
    pub matrix: Matrix,
    pub algebra: LieAlgebra,
    pub constraints: Vec<Constraint>,
    pub samples: Vec<Assignment>,
    pub commutes_with: Vec<String>,
    pub conjugates: Option<(String, String)>,
    /// Numeric values of fixed parameters, applied to referenced structures.
    pub fixed: Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VaismanExpectation {
    Always,
    Never,
    /// Vaisman exactly when all these equalities hold.
    When(Vec<Constraint>),
}

impl VaismanExpectation {
    pub fn describe(&self) -> String {
        match self {
            VaismanExpectation::Always => "always".into(),
            VaismanExpectation::Never => "never".into(),
            VaismanExpectation::When(cs) => {
                let parts: Vec<&str> = cs.iter().map(|c| c.text.as_str()).collect();
                format!("iff {}", parts.join(" and "))
            }
        }
    }

    pub fn expected_at(&self, w: &Assignment) -> Result<bool, crate::scalars::ScalarError> {
        match self {
            VaismanExpectation::Always => Ok(true),
            VaismanExpectation::Never => Ok(false),
            VaismanExpectation::When(cs) => {
                for c in cs {
                    if !c.holds(w)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct LckFamily {
    pub structure: LcKStructure,
    pub j_name: String,
    pub vaisman: VaismanExpectation,
    pub alt_constraints: Vec<Constraint>,
    pub table_rows: Vec<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct NoLckFamily {
    pub id: String,
    pub algebra: LieAlgebra,
    pub j: Option<ComplexStructure>,
    pub theta: KForm,
    pub params: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub obstruction: Obstruction,
    pub samples: Vec<Assignment>,
    pub table_rows: Vec<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Replay {
    pub id: String,
    pub algebra: LieAlgebra,
    pub j: Option<ComplexStructure>,
    pub theta: KForm,
    pub twisted_dim: usize,
    pub lck_dim: Option<usize>,
    pub samples: Vec<Assignment>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct EquivalenceStep {
    pub matrix: Vec<String>,
    pub constraint: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Equivalence {
    pub id: String,
    pub algebra: LieAlgebra,
    pub j: ComplexStructure,
    pub theta: KForm,
    pub omega: KForm,
    pub params: Vec<String>,
    pub witness: Assignment,
    pub steps: Vec<EquivalenceStep>,
    pub expected_theta: String,
    pub expected_omega: String,
    pub expected_params: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub name: String,
    pub salamon: String,
    pub params: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub algebra: LieAlgebra,
    pub structures: Vec<(String, NamedStructure)>,
    pub centers: Vec<CenterExpectation>,
    pub automorphisms: Vec<AutomorphismFamily>,
    pub families: Vec<LckFamily>,
    pub obstructions: Vec<NoLckFamily>,
    pub replays: Vec<Replay>,
    pub equivalences: Vec<Equivalence>,
    pub notes: Vec<String>,
}

impl CatalogEntry {
    pub fn structure(&self, name: &str) -> Option<&NamedStructure> {
        self.structures.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn family(&self, id: &str) -> Option<&LckFamily> {
        self.families.iter().find(|f| f.structure.id == id)
    }
}

// ------------------------------------------------------------------ loading

struct Scope {
    names: Vec<String>,
    constraints: Vec<Constraint>,
}

impl Scope {
    fn extend(&self, raw: &[RawParam], loc: &str) -> Result<Scope, CatalogError> {
        let mut names = self.names.clone();
        for p in raw {
            if names.contains(&p.name) {
                return Err(schema(loc, format!("parameter `{}` declared twice", p.name)));
            }
            names.push(p.name.clone());
        }
        let mut constraints = self.constraints.clone();
        for p in raw {
            for c in &p.constraints {
                constraints.push(Constraint::parse(c, &names).map_err(|e| schema(format!("{loc}.params.{}", p.name), e))?);
            }
        }
        Ok(Scope { names, constraints })
    }

    fn add_constraints(&mut self, raw: &[String], loc: &str) -> Result<(), CatalogError> {
        for c in raw {
            self.constraints
                .push(Constraint::parse(c, &self.names).map_err(|e| schema(format!("{loc}.constraints"), e))?);
        }
        Ok(())
    }

    /// Removes fixed parameters, returning the substitution to apply.
    fn fix(&mut self, fixed: &RawPoint, loc: &str) -> Result<BTreeMap<String, Scalar>, CatalogError> {
        let mut images = BTreeMap::new();
        for (k, v) in fixed {
            if !self.names.contains(k) {
                return Err(schema(format!("{loc}.fixed"), format!("unknown parameter `{k}`")));
            }
            images.insert(k.clone(), parse_scalar(v, &self.names).map_err(|e| schema(format!("{loc}.fixed.{k}"), e))?);
        }
        if images.is_empty() {
            return Ok(images);
        }
        self.names.retain(|n| !images.contains_key(n));
        let mut constraints = Vec::new();
        for c in &self.constraints {
            let difference = c.difference.compose(&images).map_err(|e| schema(format!("{loc}.fixed"), e))?;
            // Constraints that become constant are decided now.
            if let Some(v) = difference.to_rational() {
                let probe = Constraint { text: c.text.clone(), difference: Scalar::from_rational(v), relation: c.relation };
                if !probe.holds(&Assignment::new()).unwrap_or(false) {
                    return Err(schema(format!("{loc}.fixed"), format!("fixed values violate `{}`", c.text)));
                }
                continue;
            }
            constraints.push(Constraint { text: c.text.clone(), difference, relation: c.relation });
        }
        self.constraints = constraints;
        Ok(images)
    }
}

fn parse_point(raw: &RawPoint, loc: &str) -> Result<Assignment, CatalogError> {
    raw.iter()
        .map(|(k, v)| {
            eval_rational(v, &Assignment::new())
                .map(|r| (k.clone(), r))
                .map_err(|e| schema(format!("{loc}.{k}"), e))
        })
        .collect()
}

fn parse_matrix(raw: &[String], dim: usize, params: &[String], loc: &str) -> Result<Matrix, CatalogError> {
    if raw.len() != dim * dim {
        return Err(schema(loc, format!("expected {} entries, found {}", dim * dim, raw.len())));
    }
    let entries = raw
        .iter()
        .map(|s| parse_scalar(s, params).map_err(|e| schema(loc, e)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(entries.chunks(dim).map(|c| c.to_vec()).collect()).expect("square"))
}

fn compose_matrix(m: &Matrix, images: &BTreeMap<String, Scalar>, loc: &str) -> Result<Matrix, CatalogError> {
    m.map(|x| x.compose(images)).map_err(|e| schema(loc, e))
}

fn compose_form(f: &KForm, images: &BTreeMap<String, Scalar>, loc: &str) -> Result<KForm, CatalogError> {
    f.map_coefficients(|x| x.compose(images)).map_err(|e| schema(loc, e))
}

fn fixed_algebra(g: &LieAlgebra, images: &BTreeMap<String, Scalar>, names: &[String], loc: &str) -> Result<LieAlgebra, CatalogError> {
    if images.is_empty() {
        return Ok(g.clone());
    }
    let d = g
        .d_coframe()
        .iter()
        .map(|f| compose_form(f, images, loc))
        .collect::<Result<Vec<_>, _>>()?;
    LieAlgebra::from_differentials(g.name(), d, names).map_err(|e| schema(loc, e))
}

fn check_points(points: &[Assignment], scope: &Scope, loc: &str) -> Result<(), CatalogError> {
    for (i, w) in points.iter().enumerate() {
        for n in &scope.names {
            if !w.contains_key(n) {
                return Err(schema(format!("{loc}[{i}]"), format!("missing value for `{n}`")));
            }
        }
        for k in w.keys() {
            if !scope.names.contains(k) {
                return Err(schema(format!("{loc}[{i}]"), format!("unknown parameter `{k}`")));
            }
        }
        for c in &scope.constraints {
            let ok = c.holds(w).map_err(|e| schema(format!("{loc}[{i}]"), e))?;
            if !ok {
                return Err(schema(format!("{loc}[{i}]"), format!("violates constraint `{}`", c.text)));
            }
        }
    }
    Ok(())
}

fn vector(expr: &str, dim: usize, loc: &str) -> Result<Vec<Scalar>, CatalogError> {
    Ok(parse_form(expr, dim, 1, &[]).map_err(|e| schema(loc, e))?.components())
}

/// Parses catalog text. An empty document yields an empty catalog.
pub fn load_catalog(source: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let raw: RawCatalog = toml::from_str(source).map_err(|e| schema("document", e))?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.entry.len());
    for (i, e) in raw.entry.into_iter().enumerate() {
        let loc = format!("entry[{i}] ({})", e.id);
        if !seen.insert(e.id.clone()) {
            return Err(schema(loc, "duplicate entry id"));
        }
        out.push(build_entry(e, &loc)?);
    }
    Ok(out)
}

pub fn builtin_catalog() -> Vec<CatalogEntry> {
    load_catalog(BUILTIN).expect("built-in catalog is well formed")
}

fn build_entry(e: RawEntry, loc: &str) -> Result<CatalogEntry, CatalogError> {
    let base = Scope { names: Vec::new(), constraints: Vec::new() }.extend(&e.params, loc)?;
    let algebra = LieAlgebra::from_structure_equations(&e.id, &e.salamon, &base.names)
        .map_err(|err| schema(format!("{loc}.salamon"), err))?;
    let dim = algebra.dim();

    let mut structures: Vec<(String, NamedStructure)> = Vec::new();
    for (k, c) in e.complex.iter().enumerate() {
        let l = format!("{loc}.J[{k}] ({})", c.name);
        if structures.iter().any(|(n, _)| *n == c.name) {
            return Err(schema(l, "duplicate complex structure name"));
        }
        let scope = base.extend(&c.params, &l)?;
        let m = parse_matrix(&c.matrix, dim, &scope.names, &format!("{l}.matrix"))?;
        let structure = ComplexStructure::from_dual(&c.name, m).map_err(|err| schema(&l, err))?;
        structures.push((
            c.name.clone(),
            NamedStructure {
                structure,
                params: c.params.iter().map(|p| p.name.clone()).collect(),
                constraints: scope.constraints[base.constraints.len()..].to_vec(),
                flag: c.flag.clone(),
            },
        ));
    }
    let structure_scope = |name: &str, l: &str| -> Result<(ComplexStructure, Scope), CatalogError> {
        let (_, s) = structures
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| schema(l, format!("unknown complex structure `{name}`")))?;
        let raw: Vec<RawParam> = e
            .complex
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.params.clone())
            .unwrap_or_default();
        Ok((s.structure.clone(), base.extend(&raw, l)?))
    };

    let mut centers = Vec::new();
    for (k, c) in e.center.iter().enumerate() {
        let l = format!("{loc}.center[{k}]");
        let at = parse_point(&c.at, &l)?;
        check_points(std::slice::from_ref(&at), &base, &format!("{l}.at"))?;
        let basis = c
            .basis
            .iter()
            .map(|v| vector(v, dim, &l))
            .collect::<Result<Vec<_>, _>>()?;
        centers.push(CenterExpectation { at, basis, table: c.table.clone(), note: c.note.clone() });
    }

    let mut automorphisms = Vec::new();
    for (k, a) in e.automorphism.iter().enumerate() {
        let l = format!("{loc}.automorphism[{k}] ({})", a.name);
        let mut referenced: Vec<RawParam> = Vec::new();
        for n in a.commutes_with.iter().chain(a.conjugates.iter().flat_map(|(x, y)| [x, y])) {
            let c = e
                .complex
                .iter()
                .find(|c| &c.name == n)
                .ok_or_else(|| schema(&l, format!("unknown complex structure `{n}`")))?;
            for p in &c.params {
                if !referenced.iter().any(|q| q.name == p.name) {
                    referenced.push(p.clone());
                }
            }
        }
        referenced.extend(a.params.iter().cloned());
        let mut scope = base.extend(&referenced, &l)?;
        let m = parse_matrix(&a.matrix, dim, &scope.names, &format!("{l}.matrix"))?;
        let images = scope.fix(&a.fixed, &l)?;
        let fixed = images
            .iter()
            .map(|(k, v)| {
                v.to_rational()
                    .map(|r| (k.clone(), r))
                    .ok_or_else(|| schema(format!("{l}.fixed.{k}"), "automorphism fixes must be numeric"))
            })
            .collect::<Result<Assignment, _>>()?;
        let m = compose_matrix(&m, &images, &l)?;
        let g = fixed_algebra(&algebra, &images, &scope.names, &l)?;
        let samples = a
            .samples
            .iter()
            .enumerate()
            .map(|(i, p)| parse_point(p, &format!("{l}.samples[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        check_points(&samples, &scope, &format!("{l}.samples"))?;
        automorphisms.push(AutomorphismFamily {
            name: a.name.clone(),
            matrix: m,
            algebra: g,
            constraints: scope.constraints,
            samples,
            commutes_with: a.commutes_with.clone(),
            conjugates: a.conjugates.clone(),
            fixed,
        });
    }

    let mut families = Vec::new();
    for (k, r) in e.lck.iter().enumerate() {
        let l = format!("{loc}.lck[{k}] ({})", r.id);
        let (j, scope0) = structure_scope(&r.j, &l)?;
        let mut scope = scope0.extend(&r.params, &l)?;
        scope.add_constraints(&r.constraints, &l)?;
        let theta = parse_form(&r.theta, dim, 1, &scope.names).map_err(|err| schema(format!("{l}.theta"), err))?;
        let omega = parse_form(&r.omega, dim, 2, &scope.names).map_err(|err| schema(format!("{l}.omega"), err))?;
        let images = scope.fix(&r.fixed, &l)?;
        let g = fixed_algebra(&algebra, &images, &scope.names, &l)?;
        let j = ComplexStructure::from_dual(&j.name, compose_matrix(j.dual(), &images, &l)?).map_err(|err| schema(&l, err))?;
        let theta = compose_form(&theta, &images, &l)?;
        let omega = compose_form(&omega, &images, &l)?;
        let witnesses = r
            .witnesses
            .iter()
            .enumerate()
            .map(|(i, p)| parse_point(p, &format!("{l}.witnesses[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        if witnesses.len() < 2 {
            return Err(schema(format!("{l}.witnesses"), "at least two witnesses required"));
        }
        check_points(&witnesses, &scope, &format!("{l}.witnesses"))?;
        let vaisman = match r.vaisman.as_str() {
            "always" => VaismanExpectation::Always,
            "never" => VaismanExpectation::Never,
            "conditional" => {
                if r.vaisman_if.is_empty() {
                    return Err(schema(format!("{l}.vaisman_if"), "conditional expectation needs equalities"));
                }
                VaismanExpectation::When(
                    r.vaisman_if
                        .iter()
                        .map(|c| Constraint::parse(c, &scope.names).map_err(|err| schema(format!("{l}.vaisman_if"), err)))
                        .collect::<Result<_, _>>()?,
                )
            }
            other => return Err(schema(format!("{l}.vaisman"), format!("unknown expectation `{other}`"))),
        };
        let alt_constraints = r
            .alt_constraints
            .iter()
            .map(|c| Constraint::parse(c, &scope.names).map_err(|err| schema(format!("{l}.alt_constraints"), err)))
            .collect::<Result<_, _>>()?;
        families.push(LckFamily {
            structure: LcKStructure {
                id: r.id.clone(),
                algebra: g,
                j,
                theta,
                omega,
                params: scope.names.clone(),
                constraints: scope.constraints,
                witnesses,
            },
            j_name: r.j.clone(),
            vaisman,
            alt_constraints,
            table_rows: r.table_rows.clone(),
            note: r.note.clone(),
        });
    }

    let mut obstructions = Vec::new();
    for (k, r) in e.no_lck.iter().enumerate() {
        let l = format!("{loc}.no_lck[{k}] ({})", r.id);
        let (j, scope0) = match &r.j {
            Some(name) => {
                let (j, s) = structure_scope(name, &l)?;
                (Some(j), s)
            }
            None => (None, base.extend(&[], &l)?),
        };
        let mut scope = scope0.extend(&r.params, &l)?;
        scope.add_constraints(&r.constraints, &l)?;
        let theta = parse_form(&r.theta, dim, 1, &scope.names).map_err(|err| schema(format!("{l}.theta"), err))?;
        let images = scope.fix(&r.fixed, &l)?;
        let g = fixed_algebra(&algebra, &images, &scope.names, &l)?;
        let j = match j {
            Some(j) => Some(ComplexStructure::from_dual(&j.name, compose_matrix(j.dual(), &images, &l)?).map_err(|err| schema(&l, err))?),
            None => None,
        };
        let theta = compose_form(&theta, &images, &l)?;
        let obstruction = match &r.obstruction {
            RawObstruction::Kind(s) if s == "degenerate" => Obstruction::Degenerate,
            RawObstruction::Kind(s) => return Err(schema(format!("{l}.obstruction"), format!("unknown obstruction `{s}`"))),
            RawObstruction::Vectors { vectors } => {
                if j.is_none() {
                    return Err(schema(format!("{l}.obstruction"), "vector certificates need a complex structure"));
                }
                Obstruction::Vanishing {
                    vectors: vectors
                        .iter()
                        .map(|(v, w)| {
                            let x = vector(v, dim, &l)?
                                .into_iter()
                                .map(|s| s.to_rational().ok_or_else(|| schema(&l, "vector must be numeric")))
                                .collect::<Result<Vec<_>, _>>()?;
                            let w = eval_rational(w, &Assignment::new()).map_err(|err| schema(&l, err))?;
                            Ok((x, w))
                        })
                        .collect::<Result<_, CatalogError>>()?,
                }
            }
        };
        let samples = r
            .samples
            .iter()
            .enumerate()
            .map(|(i, p)| parse_point(p, &format!("{l}.samples[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        check_points(&samples, &scope, &format!("{l}.samples"))?;
        obstructions.push(NoLckFamily {
            id: r.id.clone(),
            algebra: g,
            j,
            theta,
            params: scope.names.clone(),
            constraints: scope.constraints,
            obstruction,
            samples,
            table_rows: r.table_rows.clone(),
            note: r.note.clone(),
        });
    }

    let mut replays = Vec::new();
    for (k, r) in e.replay.iter().enumerate() {
        let l = format!("{loc}.replay[{k}] ({})", r.id);
        let (j, scope0) = match &r.j {
            Some(name) => {
                let (j, s) = structure_scope(name, &l)?;
                (Some(j), s)
            }
            None => (None, base.extend(&[], &l)?),
        };
        let mut scope = scope0.extend(&r.params, &l)?;
        let theta = parse_form(&r.theta, dim, 1, &scope.names).map_err(|err| schema(format!("{l}.theta"), err))?;
        let images = scope.fix(&r.fixed, &l)?;
        let g = fixed_algebra(&algebra, &images, &scope.names, &l)?;
        let j = match j {
            Some(j) => Some(ComplexStructure::from_dual(&j.name, compose_matrix(j.dual(), &images, &l)?).map_err(|err| schema(&l, err))?),
            None => None,
        };
        if r.lck_dim.is_some() != j.is_some() {
            return Err(schema(&l, "lck_dim requires a complex structure and vice versa"));
        }
        let theta = compose_form(&theta, &images, &l)?;
        let samples = r
            .samples
            .iter()
            .enumerate()
            .map(|(i, p)| parse_point(p, &format!("{l}.samples[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        check_points(&samples, &scope, &format!("{l}.samples"))?;
        replays.push(Replay {
            id: r.id.clone(),
            algebra: g,
            j,
            theta,
            twisted_dim: r.twisted_dim,
            lck_dim: r.lck_dim,
            samples,
            note: r.note.clone(),
        });
    }

    let mut equivalences = Vec::new();
    for (k, r) in e.equivalence.iter().enumerate() {
        let l = format!("{loc}.equivalence[{k}] ({})", r.id);
        let (j, scope0) = structure_scope(&r.j, &l)?;
        let mut scope = scope0.extend(&r.params, &l)?;
        let theta = parse_form(&r.theta, dim, 1, &scope.names).map_err(|err| schema(format!("{l}.theta"), err))?;
        let omega = parse_form(&r.omega, dim, 2, &scope.names).map_err(|err| schema(format!("{l}.omega"), err))?;
        let images = scope.fix(&r.fixed, &l)?;
        let g = fixed_algebra(&algebra, &images, &scope.names, &l)?;
        let j = ComplexStructure::from_dual(&j.name, compose_matrix(j.dual(), &images, &l)?).map_err(|err| schema(&l, err))?;
        let witness = parse_point(&r.witness, &format!("{l}.witness"))?;
        check_points(std::slice::from_ref(&witness), &scope, &format!("{l}.witness"))?;
        for (i, s) in r.steps.iter().enumerate() {
            if s.matrix.len() != dim * dim {
                return Err(schema(format!("{l}.steps[{i}]"), "matrix has wrong size"));
            }
        }
        equivalences.push(Equivalence {
            id: r.id.clone(),
            algebra: g,
            j,
            theta: compose_form(&theta, &images, &l)?,
            omega: compose_form(&omega, &images, &l)?,
            params: scope.names.clone(),
            witness,
            steps: r
                .steps
                .iter()
                .map(|s| EquivalenceStep { matrix: s.matrix.clone(), constraint: s.constraint.clone() })
                .collect(),
            expected_theta: r.expected_theta.clone(),
            expected_omega: r.expected_omega.clone(),
            expected_params: r.expected_params.clone(),
        });
    }

    Ok(CatalogEntry {
        id: e.id,
        name: e.name,
        salamon: e.salamon,
        params: base.names.clone(),
        constraints: base.constraints,
        algebra,
        structures,
        centers,
        automorphisms,
        families,
        obstructions,
        replays,
        equivalences,
        notes: e.notes,
    })
}

// ------------------------------------------------------------ verification

fn span_equal(a: &[Vec<Scalar>], b: &[Vec<Scalar>], dim: usize) -> bool {
    let rank = |rows: Vec<Vec<Scalar>>| {
        if rows.is_empty() {
            0
        } else {
            Matrix::from_rows(rows).expect("rectangular").rank()
        }
    };
    let _ = dim;
    let ra = rank(a.to_vec());
    let rb = rank(b.to_vec());
    let rab = rank(a.iter().chain(b.iter()).cloned().collect());
    ra == rb && rb == rab
}

fn format_vectors(vs: &[Vec<Scalar>]) -> String {
    let parts: Vec<String> = vs.iter().map(|v| KForm::one_form(v).to_string().replace('e', "e_")).collect();
    format!("<{}>", parts.join(", "))
}

/// Runs every check attached to a catalog entry.
pub fn verify_entry(e: &CatalogEntry) -> EntryReport {
    let mut checks = Vec::new();
    let id = &e.id;
    checks.push(CheckRecord::from_bool(format!("{id}/jacobi"), e.algebra.jacobi_holds(), || {
        "d(de^k) != 0".into()
    }));

    for (k, c) in e.centers.iter().enumerate() {
        let cid = format!("{id}/center[{k}]");
        let rec = match e.algebra.instantiate(&c.at).and_then(|g| g.center()) {
            Ok(z) => CheckRecord::from_bool(cid, span_equal(&z, &c.basis, e.algebra.dim()), || {
                format!("computed {} expected {}", format_vectors(&z), format_vectors(&c.basis))
            }),
            Err(err) => CheckRecord::fail(cid, err.to_string()),
        };
        let rec = rec.with_witness(&c.at);
        checks.push(match (&c.table, &c.note) {
            (Some(t), Some(n)) => rec.with_note(format!("table column: {t}; {n}")),
            (None, Some(n)) => rec.with_note(n.clone()),
            (Some(t), None) => rec.with_note(format!("table column: {t}")),
            (None, None) => rec,
        });
    }

    for (name, s) in &e.structures {
        let cid = format!("{id}/{name}/integrable");
        let rec = match is_complex_structure(&e.algebra, &s.structure) {
            Ok(ok) => CheckRecord::from_bool(cid, ok, || "J^2 != -1 or Nijenhuis tensor nonzero".into()),
            Err(err) => CheckRecord::fail(cid, err.to_string()),
        };
        checks.push(match &s.flag {
            Some(f) => rec.with_note(f.clone()),
            None => rec,
        });
    }

    for a in &e.automorphisms {
        checks.extend(verify_automorphism(e, a));
    }
    for f in &e.families {
        checks.extend(verify_family(f));
    }
    for o in &e.obstructions {
        checks.extend(verify_obstruction(o));
    }
    for r in &e.replays {
        checks.extend(verify_replay(r));
    }
    for q in &e.equivalences {
        checks.extend(verify_equivalence(q));
    }
    EntryReport { entry: e.id.clone(), checks }
}

fn verify_automorphism(e: &CatalogEntry, a: &AutomorphismFamily) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for (i, w) in a.samples.iter().enumerate() {
        let cid = format!("{}/aut/{}[{i}]", e.id, a.name);
        let mut full = w.clone();
        full.extend(a.fixed.iter().map(|(k, v)| (k.clone(), v.clone())));
        let result = (|| -> Result<Option<String>, String> {
            let w = &full;
            let g = a.algebra.instantiate(w).map_err(|x| x.to_string())?;
            let m = a.matrix.substitute(w).map_err(|x| x.to_string())?;
            let aut = Automorphism::new(m);
            if !aut.is_automorphism(&g).map_err(|x| x.to_string())? {
                return Ok(Some("not a Lie algebra automorphism".into()));
            }
            for jn in &a.commutes_with {
                let j = e.structure(jn).expect("checked at load").structure.substitute(w).map_err(|x| x.to_string())?;
                if !aut.commutes_with(&j) {
                    return Ok(Some(format!("does not commute with {jn}")));
                }
            }
            if let Some((from, to)) = &a.conjugates {
                let j1 = e.structure(from).expect("checked").structure.substitute(w).map_err(|x| x.to_string())?;
                let j2 = e.structure(to).expect("checked").structure.substitute(w).map_err(|x| x.to_string())?;
                let image = aut.transform_structure(&j1).map_err(|x| x.to_string())?;
                if image.dual() != j2.dual() {
                    return Ok(Some(format!("A^-1 {from} A = {} differs from {to}", image.dual())));
                }
            }
            Ok(None)
        })();
        out.push(
            match result {
                Ok(None) => CheckRecord::pass(cid),
                Ok(Some(r)) | Err(r) => CheckRecord::fail(cid, r),
            }
            .with_witness(w),
        );
    }
    out
}

/// lcK identities, Lee-form round trip and Vaisman expectation for a family.
pub fn verify_family(f: &LckFamily) -> Vec<CheckRecord> {
    let s = &f.structure;
    let mut out = Vec::new();
    let cid = format!("{}/lck", s.id);
    out.push(match verify_lck(s) {
        Ok(r) => match r.first_failure() {
            None => CheckRecord::pass(cid),
            Some((name, c)) => {
                let rec = CheckRecord::fail(cid, format!("{name}: {}", c.residual.clone().unwrap_or_default()));
                match &c.witness {
                    Some(w) => rec.with_witness(w),
                    None => rec,
                }
            }
        },
        Err(err) => CheckRecord::fail(cid, err.to_string()),
    });
    let cid = format!("{}/lee", s.id);
    out.push(match lee_form(&s.algebra, &s.omega) {
        Ok(l) => CheckRecord::from_bool(cid, l.theta == s.theta && l.closed, || format!("solved theta = {}", l.theta)),
        Err(err) => CheckRecord::fail(cid, err.to_string()),
    });
    if !f.alt_constraints.is_empty() {
        let cid = format!("{}/alt-constraints", s.id);
        let mut bad = None;
        for w in &s.witnesses {
            for c in &f.alt_constraints {
                if !c.holds(w).unwrap_or(false) {
                    bad = Some((w.clone(), c.text.clone()));
                }
            }
        }
        out.push(match bad {
            None => CheckRecord::pass(cid),
            Some((w, c)) => CheckRecord::fail(cid, format!("witness violates `{c}`")).with_witness(&w),
        });
    }
    for (i, w) in s.witnesses.iter().enumerate() {
        let cid = format!("{}/vaisman[{i}]", s.id);
        let expected = match f.vaisman.expected_at(w) {
            Ok(v) => v,
            Err(err) => {
                out.push(CheckRecord::fail(cid, err.to_string()).with_witness(w));
                continue;
            }
        };
        let rec = match vaisman_test(s, w) {
            Ok(v) => CheckRecord::from_bool(cid, v.vaisman == expected, || {
                format!("expected {expected}, got {} ({})", v.vaisman, f.vaisman.describe())
            }),
            Err(err) => CheckRecord::fail(cid, err.to_string()),
        };
        out.push(rec.with_witness(w).with_note(format!("expected {}", f.vaisman.describe())));
    }
    out
}

fn sample_avoids(side: &[Scalar], w: &Assignment) -> bool {
    side.iter().all(|c| matches!(c.eval(w), Ok(v) if v != Rational::from_integer(0.into())))
}

fn completeness(
    id: &str,
    g: &LieAlgebra,
    theta: &KForm,
    j: Option<&ComplexStructure>,
    space: &SolutionSpace,
    samples: &[Assignment],
) -> Vec<CheckRecord> {
    let ambient = g.dim() * (g.dim() - 1) / 2;
    samples
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let cid = format!("{id}/rank[{i}]");
            if !sample_avoids(&space.side_conditions, w) {
                return CheckRecord::fail(cid, "sample hits a pivot side condition").with_witness(w);
            }
            match rank_at(g, theta, j, w) {
                Ok(r) => CheckRecord::from_bool(cid, ambient - r == space.len(), || {
                    format!("numeric kernel dimension {} vs symbolic {}", ambient - r, space.len())
                }),
                Err(err) => CheckRecord::fail(cid, err.to_string()),
            }
            .with_witness(w)
        })
        .collect()
}

/// Re-checks that each basis element satisfies the defining conditions.
fn soundness(id: &str, g: &LieAlgebra, theta: &KForm, j: Option<&ComplexStructure>, space: &SolutionSpace) -> CheckRecord {
    let cid = format!("{id}/sound");
    for b in &space.basis {
        match twisted_differential(g, theta, b) {
            Ok(r) if r.is_zero() => {}
            Ok(r) => return CheckRecord::fail(cid, format!("d_theta({b}) = {r}")),
            Err(err) => return CheckRecord::fail(cid, err.to_string()),
        }
        if let Some(j) = j {
            match crate::hermitian::invariance_defect(b, j) {
                Ok(r) if r.is_zero() => {}
                Ok(r) => return CheckRecord::fail(cid, format!("J-defect of {b} = {r}")),
                Err(err) => return CheckRecord::fail(cid, err.to_string()),
            }
        }
    }
    CheckRecord::pass(cid)
}

pub fn verify_obstruction(o: &NoLckFamily) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let cid = format!("{}/obstruction", o.id);
    let space = match &o.j {
        Some(j) => lck_space(&o.algebra, &o.theta, j),
        None => twisted_closed_space(&o.algebra, &o.theta),
    };
    let space = match space {
        Ok(s) => s,
        Err(err) => {
            out.push(CheckRecord::fail(cid, err.to_string()));
            return out;
        }
    };
    let result = match &o.j {
        Some(j) => check_obstruction(&space, j, &o.obstruction),
        None => match o.obstruction {
            Obstruction::Degenerate => Ok(!space.has_nondegenerate_element()),
            _ => Ok(false),
        },
    };
    let side: Vec<String> = space.side_conditions.iter().map(|c| format!("{c} != 0")).collect();
    let note = format!("space dimension {}; side conditions: [{}]", space.len(), side.join(", "));
    out.push(
        match result {
            Ok(ok) => CheckRecord::from_bool(cid, ok, || {
                let forms: Vec<String> = space.basis.iter().map(|b| b.to_string()).collect();
                format!("certificate does not vanish on [{}]", forms.join("; "))
            }),
            Err(err) => CheckRecord::fail(cid, err.to_string()),
        }
        .with_note(note),
    );
    out.push(soundness(&o.id, &o.algebra, &o.theta, o.j.as_ref(), &space));
    out.extend(completeness(&o.id, &o.algebra, &o.theta, o.j.as_ref(), &space, &o.samples));
    out
}

pub fn verify_replay(r: &Replay) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let spaces = twisted_closed_space(&r.algebra, &r.theta).and_then(|t| {
        let l = match &r.j {
            Some(j) => Some(lck_space(&r.algebra, &r.theta, j)?),
            None => None,
        };
        Ok((t, l))
    });
    let (tw, lk) = match spaces {
        Ok(x) => x,
        Err(err) => return vec![CheckRecord::fail(format!("{}/dims", r.id), err.to_string())],
    };
    let mut rec = CheckRecord::from_bool(
        format!("{}/dims", r.id),
        tw.len() == r.twisted_dim && lk.as_ref().map(|s| s.len()) == r.lck_dim,
        || {
            format!(
                "twisted {} (expected {}), lck {:?} (expected {:?})",
                tw.len(),
                r.twisted_dim,
                lk.as_ref().map(|s| s.len()),
                r.lck_dim
            )
        },
    );
    if let Some(n) = &r.note {
        rec = rec.with_note(n.clone());
    }
    out.push(rec);
    out.push(soundness(&format!("{}/twisted", r.id), &r.algebra, &r.theta, None, &tw));
    out.extend(completeness(&format!("{}/twisted", r.id), &r.algebra, &r.theta, None, &tw, &r.samples));
    if let (Some(j), Some(lk)) = (&r.j, &lk) {
        out.push(soundness(&format!("{}/lck", r.id), &r.algebra, &r.theta, Some(j), lk));
        out.extend(completeness(&format!("{}/lck", r.id), &r.algebra, &r.theta, Some(j), lk, &r.samples));
    }
    out
}

/// Applies the normalizing chain at the witness and compares with the
/// expected normal form.
pub fn verify_equivalence(q: &Equivalence) -> Vec<CheckRecord> {
    let cid = format!("{}/chain", q.id);
    let result = run_chain(q);
    vec![match result {
        Ok(None) => CheckRecord::pass(cid),
        Ok(Some(r)) => CheckRecord::fail(cid, r),
        Err(r) => CheckRecord::fail(cid, r),
    }
    .with_witness(&q.witness)]
}

fn run_chain(q: &Equivalence) -> Result<Option<String>, String> {
    let w = &q.witness;
    let g = q.algebra.instantiate(w).map_err(|e| e.to_string())?;
    let j = q.j.substitute(w).map_err(|e| e.to_string())?;
    let mut theta = q.theta.substitute(w).map_err(|e| e.to_string())?;
    let mut omega = q.omega.substitute(w).map_err(|e| e.to_string())?;
    let dim = g.dim();
    for (i, step) in q.steps.iter().enumerate() {
        let entries = step
            .matrix
            .iter()
            .map(|s| eval_rational(s, w))
            .collect::<Result<Vec<_>, ParseError>>()
            .map_err(|e| format!("step {i}: {e}"))?;
        let m = Matrix::from_rows(
            entries
                .chunks(dim)
                .map(|r| r.iter().cloned().map(Scalar::from_rational).collect())
                .collect(),
        )
        .map_err(|e| e.to_string())?;
        if let Some(c) = &step.constraint {
            let mut env = w.clone();
            for (k, v) in entries.iter().enumerate() {
                env.insert(format!("a{}{}", k / dim + 1, k % dim + 1), v.clone());
            }
            let names: Vec<String> = env.keys().cloned().collect();
            let con = Constraint::parse(c, &names).map_err(|e| e.to_string())?;
            if !con.holds(&env).map_err(|e| e.to_string())? {
                return Ok(Some(format!("step {i} violates `{c}`")));
            }
        }
        let aut = Automorphism::new(m);
        if !aut.is_automorphism(&g).map_err(|e| e.to_string())? {
            return Ok(Some(format!("step {i} is not an automorphism")));
        }
        if !aut.commutes_with(&j) {
            return Ok(Some(format!("step {i} does not commute with J")));
        }
        theta = aut.pullback_form(&theta).map_err(|e| e.to_string())?;
        omega = aut.pullback_form(&omega).map_err(|e| e.to_string())?;
    }
    let mut env = Assignment::new();
    for (k, v) in &q.expected_params {
        env.insert(k.clone(), eval_rational(v, w).map_err(|e| e.to_string())?);
    }
    let names: Vec<String> = env.keys().cloned().collect();
    let et = parse_form(&q.expected_theta, dim, 1, &names)
        .map_err(|e| e.to_string())?
        .substitute(&env)
        .map_err(|e| e.to_string())?;
    let eo = parse_form(&q.expected_omega, dim, 2, &names)
        .map_err(|e| e.to_string())?
        .substitute(&env)
        .map_err(|e| e.to_string())?;
    if theta != et {
        return Ok(Some(format!("theta = {theta}, expected {et}")));
    }
    if omega != eo {
        return Ok(Some(format!("omega = {omega}, expected {eo}")));
    }
    Ok(None)
}

/// Verifies all entries in parallel; results are ordered by entry id.
pub fn verify_catalog(entries: &[CatalogEntry]) -> Vec<EntryReport> {
    let mut reports: Vec<EntryReport> = entries.par_iter().map(verify_entry).collect();
    reports.sort_by(|a, b| a.entry.cmp(&b.entry));
    reports
}

/// Manifest coverage: each table row is claimed by exactly one family.
pub fn coverage(entries: &[CatalogEntry]) -> Result<(), Vec<String>> {
    let mut count: BTreeMap<&str, usize> = TABLE_ROWS.iter().map(|r| (*r, 0)).collect();
    let mut problems = Vec::new();
    for e in entries {
        let rows = e
            .families
            .iter()
            .flat_map(|f| f.table_rows.iter())
            .chain(e.obstructions.iter().flat_map(|o| o.table_rows.iter()));
        for r in rows {
            match count.get_mut(r.as_str()) {
                Some(c) => *c += 1,
                None => problems.push(format!("row `{r}` is not in the manifest")),
            }
        }
    }
    for (r, c) in count {
        if c != 1 {
            problems.push(format!("row `{r}` covered {c} times"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}

/// Counts of algebras, complex structures and lcK families.
pub fn summary(entries: &[CatalogEntry]) -> (usize, usize, usize) {
    (
        entries.len(),
        entries.iter().map(|e| e.structures.len()).sum(),
        entries.iter().map(|e| e.families.len()).sum(),
    )
}
