//! Text records for extension specs and coKähler data. Same conventions as
//! the catalog: matrices are row-major lists of expressions, forms and
//! vectors use the `a*e12 + e34` syntax. All values are numeric.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::catalog::builtin_catalog;
use crate::constructions::{CoKaehlerData, LcKExtensionSpec};
use crate::expr::{parse_form, parse_scalar};
use crate::hermitian::ComplexStructure;
use crate::lck::LcKStructure;
use crate::liealg::LieAlgebra;
use crate::linalg::Matrix;
use crate::scalars::Assignment;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("spec error at {location}: {message}")]
    Invalid { location: String, message: String },
}

fn invalid(location: impl Into<String>, message: impl ToString) -> SpecError {
    SpecError::Invalid { location: location.into(), message: message.to_string() }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExtension {
    fiber: usize,
    base: RawBase,
    #[serde(default)]
    rho: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBase {
    family: Option<String>,
    #[serde(default)]
    witness: usize,
    salamon: Option<String>,
    #[serde(rename = "J")]
    j: Option<Vec<String>>,
    theta: Option<String>,
    omega: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoKaehler {
    salamon: String,
    eta: String,
    xi: String,
    phi: Vec<String>,
    metric: Vec<String>,
    d: Vec<String>,
    alpha: String,
}

fn matrix(raw: &[String], dim: usize, loc: &str) -> Result<Matrix, SpecError> {
    if raw.len() != dim * dim {
        return Err(invalid(loc, format!("expected {} entries, found {}", dim * dim, raw.len())));
    }
    let entries = raw
        .iter()
        .map(|s| parse_scalar(s, &[]).map_err(|e| invalid(loc, e)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(entries.chunks(dim).map(|c| c.to_vec()).collect()).expect("square"))
}

fn form(src: &str, dim: usize, degree: usize, loc: &str) -> Result<crate::KForm, SpecError> {
    parse_form(src, dim, degree, &[]).map_err(|e| invalid(loc, e))
}

/// A catalog family instantiated at one of its witnesses.
pub fn catalog_structure(family: &str, witness: usize) -> Result<LcKStructure, SpecError> {
    let cat = builtin_catalog();
    let f = cat
        .iter()
        .find_map(|e| e.family(family))
        .ok_or_else(|| invalid("base.family", format!("no catalog family `{family}`")))?;
    let w = f
        .structure
        .witnesses
        .get(witness)
        .ok_or_else(|| invalid("base.witness", format!("`{family}` has {} witnesses", f.structure.witnesses.len())))?;
    let mut s = f.structure.instantiate(w).map_err(|e| invalid("base", e))?;
    s.params.clear();
    s.constraints.clear();
    s.witnesses = vec![Assignment::new()];
    Ok(s)
}

fn base_structure(raw: &RawBase) -> Result<LcKStructure, SpecError> {
    if let Some(family) = &raw.family {
        if raw.salamon.is_some() || raw.j.is_some() || raw.theta.is_some() || raw.omega.is_some() {
            return Err(invalid("base", "give either `family` or explicit data, not both"));
        }
        return catalog_structure(family, raw.witness);
    }
    let missing = |f: &str| invalid("base", format!("missing `{f}`"));
    let salamon = raw.salamon.as_deref().ok_or_else(|| missing("salamon"))?;
    let g = LieAlgebra::from_structure_equations("base", salamon, &[]).map_err(|e| invalid("base.salamon", e))?;
    let n = g.dim();
    let j = ComplexStructure::from_dual("J", matrix(raw.j.as_deref().ok_or_else(|| missing("J"))?, n, "base.J")?)
        .map_err(|e| invalid("base.J", e))?;
    let theta = form(raw.theta.as_deref().ok_or_else(|| missing("theta"))?, n, 1, "base.theta")?;
    let omega = form(raw.omega.as_deref().ok_or_else(|| missing("omega"))?, n, 2, "base.omega")?;
    Ok(LcKStructure {
        id: "base".into(),
        algebra: g,
        j,
        theta,
        omega,
        params: Vec::new(),
        constraints: Vec::new(),
        witnesses: vec![Assignment::new()],
    })
}

/// Parses an extension spec. `rho` maps basis names `e1, e2, ...` of the base
/// to `fiber x fiber` matrices; omitted ones are zero.
pub fn load_extension_spec(source: &str) -> Result<LcKExtensionSpec, SpecError> {
    let raw: RawExtension = toml::from_str(source).map_err(|e| invalid("document", e))?;
    let base = base_structure(&raw.base)?;
    let n = base.algebra.dim();
    let m = raw.fiber;
    if m == 0 || !m.is_multiple_of(2) {
        return Err(invalid("fiber", "must be a positive even number"));
    }
    let mut rho = vec![Matrix::zeros(m, m); n];
    for (name, entries) in &raw.rho {
        let idx = name
            .strip_prefix('e')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|i| (1..=n).contains(i))
            .ok_or_else(|| invalid(format!("rho.{name}"), format!("expected e1..e{n}")))?;
        rho[idx - 1] = matrix(entries, m, &format!("rho.{name}"))?;
    }
    Ok(LcKExtensionSpec { base, rho })
}

/// Parses coKähler data with a derivation; `phi`, `metric` and `d` act on
/// vectors.
pub fn load_cokahler(source: &str) -> Result<CoKaehlerData, SpecError> {
    let raw: RawCoKaehler = toml::from_str(source).map_err(|e| invalid("document", e))?;
    let h = LieAlgebra::from_structure_equations("h", &raw.salamon, &[]).map_err(|e| invalid("salamon", e))?;
    let n = h.dim();
    Ok(CoKaehlerData {
        eta: form(&raw.eta, n, 1, "eta")?,
        xi: form(&raw.xi, n, 1, "xi")?.components(),
        phi: matrix(&raw.phi, n, "phi")?,
        metric: matrix(&raw.metric, n, "metric")?,
        d: matrix(&raw.d, n, "d")?,
        alpha: parse_scalar(&raw.alpha, &[]).map_err(|e| invalid("alpha", e))?,
        h,
    })
}
