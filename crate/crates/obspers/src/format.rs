//! The `obspers/1` JSON formats.
//!
//! Every file is an object starting with `"format": "obspers/1"` and a
//! `"kind"`. Rationals are strings (`"3/4"`, `"-2"`), matrices are arrays of
//! rows of residues in `0..p`. Grid points are addressed by multi-index;
//! flat orderings are row-major with the last axis fastest. Writers emit a
//! canonical form, so reading and re-writing a canonical file reproduces it
//! byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use obspers_core::grid::Grid;
use obspers_core::metric::Interleaving;
use obspers_core::morphism::Morphism;
use obspers_core::pipelines::{Bifiltration, FiniteMetricSpace, SimplicialComplex};
use obspers_core::rational::{format_rat, parse_rat};
use obspers_core::{Fp, Matrix, Rat, StepModule};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const FORMAT: &str = "obspers/1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("unsupported format tag {0:?} (expected \"obspers/1\")")]
    Tag(String),
    #[error("expected a {expected} file, found kind {found:?}")]
    Kind { expected: &'static str, found: String },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Core(#[from] obspers_core::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn shape(msg: impl Into<String>) -> FormatError {
    FormatError::Shape(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsJson {
    pub shape: Vec<usize>,
    /// Row-major, last axis fastest.
    pub values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub at: Vec<usize>,
    pub axis: usize,
    pub matrix: Vec<Vec<u32>>,
}

/// A module without the header; embedded in morphism files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleData {
    pub field: FieldJson,
    pub grid: Vec<Vec<String>>,
    pub dims: DimsJson,
    /// Unit steps between points of positive dimension. Steps touching a
    /// zero space are omitted.
    pub steps: Vec<StepJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub at: Vec<usize>,
    pub matrix: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismData {
    pub source: ModuleData,
    pub target: ModuleData,
    /// Components at points where both spaces are nonzero.
    pub components: Vec<ComponentJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleavingData {
    pub eps: String,
    pub f: MorphismData,
    pub g: MorphismData,
}

/// Terms and links given as paths relative to the manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainData {
    pub terms: Vec<String>,
    pub links: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexData {
    pub vertices: usize,
    /// Facets or a full simplex list; closed under faces on load.
    pub simplices: Vec<Vec<usize>>,
    /// Lower-star values, one vector per vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    pub distances: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSimplex {
    pub simplex: Vec<usize>,
    /// Minimal grades.
    pub grades: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BifiltrationData {
    pub vertices: usize,
    pub n_params: usize,
    /// Axis labels; Degree-Rips files use `["radius", "-degree"]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<String>>,
    pub simplices: Vec<GradedSimplex>,
}

/// `{"format", "kind", ...payload}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tagged<T> {
    pub format: String,
    pub kind: String,
    #[serde(flatten)]
    pub data: T,
}

impl<T> Tagged<T> {
    pub fn new(kind: &str, data: T) -> Self {
        Tagged {
            format: FORMAT.to_string(),
            kind: kind.to_string(),
            data,
        }
    }
}

pub mod kind {
    pub const MODULE: &str = "module";
    pub const MORPHISM: &str = "morphism";
    pub const INTERLEAVING: &str = "interleaving";
    pub const CHAIN: &str = "chain";
    pub const COMPLEX: &str = "complex";
    pub const METRIC: &str = "metric";
    pub const BIFILTRATION: &str = "bifiltration";
}

/// Canonical text: two-space pretty JSON with a trailing newline.
pub fn to_canonical<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The `kind` of a file after checking its format tag.
pub fn peek_kind(text: &str) -> Result<String> {
    let v: Value = serde_json::from_str(text)?;
    let tag = v.get("format").and_then(Value::as_str).unwrap_or_default();
    if tag != FORMAT {
        return Err(FormatError::Tag(tag.to_string()));
    }
    v.get("kind")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| shape("missing \"kind\""))
}

pub fn parse_tagged<T: DeserializeOwned>(text: &str, expected: &'static str) -> Result<T> {
    let found = peek_kind(text)?;
    if found != expected {
        return Err(FormatError::Kind { expected, found });
    }
    let t: Tagged<T> = serde_json::from_str(text)?;
    Ok(t.data)
}

fn rat_in(s: &str) -> Result<Rat> {
    Ok(parse_rat(s)?)
}

fn rats_in(v: &[String]) -> Result<Vec<Rat>> {
    v.iter().map(|s| rat_in(s)).collect()
}

fn rats_out(v: &[Rat]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

fn matrix_out(m: &Matrix) -> Vec<Vec<u32>> {
    m.to_rows()
}

fn matrix_in(field: Fp, rows: usize, cols: usize, data: &[Vec<u32>], what: &str) -> Result<Matrix> {
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(shape(format!("{what}: expected a {rows}×{cols} matrix")));
    }
    if data.iter().flatten().any(|&x| x >= field.p()) {
        return Err(shape(format!("{what}: entries must be residues in 0..{}", field.p())));
    }
    Ok(Matrix::from_vec(field, rows, cols, data.concat())?)
}

fn field_in(f: &FieldJson) -> Result<Fp> {
    Ok(Fp::new(f.p)?)
}

fn grid_in(axes: &[Vec<String>]) -> Result<Grid> {
    let axes = axes.iter().map(|a| rats_in(a)).collect::<Result<Vec<_>>>()?;
    Ok(Grid::new(axes)?)
}

fn grid_out(g: &Grid) -> Vec<Vec<String>> {
    g.axes().iter().map(|a| rats_out(a)).collect()
}

fn flat_of(g: &Grid, at: &[usize], what: &str) -> Result<usize> {
    let shape_ = g.shape();
    if at.len() != shape_.len() || at.iter().zip(&shape_).any(|(i, n)| i >= n) {
        return Err(shape(format!("{what}: index {at:?} is outside the grid")));
    }
    Ok(g.flat(at))
}

pub fn module_to_data(v: &StepModule) -> ModuleData {
    let g = v.grid();
    let mut steps = Vec::new();
    for x in 0..g.size() {
        for axis in 0..g.n_axes() {
            let Some(y) = g.successor(x, axis) else { continue };
            if v.dim(x) == 0 || v.dim(y) == 0 {
                continue;
            }
            steps.push(StepJson {
                at: g.multi(x),
                axis,
                matrix: matrix_out(v.step(x, axis).expect("step exists")),
            });
        }
    }
    ModuleData {
        field: FieldJson { p: v.field().p() },
        grid: grid_out(g),
        dims: DimsJson {
            shape: g.shape(),
            values: v.dims().to_vec(),
        },
        steps,
    }
}

pub fn module_from_data(d: &ModuleData) -> Result<StepModule> {
    let field = field_in(&d.field)?;
    let g = grid_in(&d.grid)?;
    if d.dims.shape != g.shape() || d.dims.values.len() != g.size() {
        return Err(shape("dims do not match the grid shape"));
    }
    let dims = d.dims.values.clone();
    let mut given: BTreeMap<(usize, usize), &StepJson> = BTreeMap::new();
    for s in &d.steps {
        if s.axis >= g.n_axes() {
            return Err(shape(format!("step at {:?}: axis {} out of range", s.at, s.axis)));
        }
        let x = flat_of(&g, &s.at, "step")?;
        if given.insert((x, s.axis), s).is_some() {
            return Err(shape(format!("duplicate step at {:?} along axis {}", s.at, s.axis)));
        }
    }
    let mut steps = vec![vec![None; g.size()]; g.n_axes()];
    for (axis, row) in steps.iter_mut().enumerate() {
        for (x, slot) in row.iter_mut().enumerate() {
            let Some(y) = g.successor(x, axis) else {
                if given.contains_key(&(x, axis)) {
                    return Err(shape(format!("step at {:?} leaves the grid along axis {axis}", g.multi(x))));
                }
                continue;
            };
            let what = format!("step at {:?} along axis {axis}", g.multi(x));
            *slot = Some(match given.get(&(x, axis)) {
                Some(s) => matrix_in(field, dims[y], dims[x], &s.matrix, &what)?,
                None if dims[x] == 0 || dims[y] == 0 => Matrix::zeros(field, dims[y], dims[x]),
                None => return Err(shape(format!("missing {what}"))),
            });
        }
    }
    Ok(StepModule::new(field, g, dims, steps)?)
}

pub fn morphism_to_data(m: &Morphism) -> MorphismData {
    let g = m.grid();
    let components = (0..g.size())
        .filter(|&x| m.source().dim(x) > 0 && m.target().dim(x) > 0)
        .map(|x| ComponentJson {
            at: g.multi(x),
            matrix: matrix_out(m.comp(x)),
        })
        .collect();
    MorphismData {
        source: module_to_data(m.source()),
        target: module_to_data(m.target()),
        components,
    }
}

pub fn morphism_from_data(d: &MorphismData) -> Result<Morphism> {
    let source = module_from_data(&d.source)?;
    let target = module_from_data(&d.target)?;
    if source.grid() != target.grid() {
        return Err(shape("morphism source and target must share a grid"));
    }
    let g = source.grid().clone();
    let field = source.field();
    let mut given: BTreeMap<usize, &ComponentJson> = BTreeMap::new();
    for c in &d.components {
        let x = flat_of(&g, &c.at, "component")?;
        if given.insert(x, c).is_some() {
            return Err(shape(format!("duplicate component at {:?}", c.at)));
        }
    }
    let mut comps = Vec::with_capacity(g.size());
    for x in 0..g.size() {
        let (r, c) = (target.dim(x), source.dim(x));
        let what = format!("component at {:?}", g.multi(x));
        comps.push(match given.get(&x) {
            Some(m) => matrix_in(field, r, c, &m.matrix, &what)?,
            None if r == 0 || c == 0 => Matrix::zeros(field, r, c),
            None => return Err(shape(format!("missing {what}"))),
        });
    }
    Ok(Morphism::new(source, target, comps)?)
}

pub fn interleaving_to_data(i: &Interleaving) -> InterleavingData {
    InterleavingData {
        eps: format_rat(&i.eps),
        f: morphism_to_data(&i.f),
        g: morphism_to_data(&i.g),
    }
}

/// Loads the pair without verifying it; see [`obspers_core::metric::verify`].
pub fn interleaving_from_data(d: &InterleavingData) -> Result<Interleaving> {
    Ok(Interleaving {
        eps: rat_in(&d.eps)?,
        f: morphism_from_data(&d.f)?,
        g: morphism_from_data(&d.g)?,
        verified: false,
    })
}

pub fn complex_from_data(d: &ComplexData) -> Result<(SimplicialComplex, Option<Vec<Vec<Rat>>>)> {
    let k = SimplicialComplex::from_facets(d.vertices, &d.simplices)?;
    let values = d
        .values
        .as_ref()
        .map(|vs| vs.iter().map(|v| rats_in(v)).collect::<Result<Vec<_>>>())
        .transpose()?;
    Ok((k, values))
}

pub fn metric_from_data(d: &MetricData) -> Result<FiniteMetricSpace> {
    let rows = d.distances.iter().map(|r| rats_in(r)).collect::<Result<Vec<_>>>()?;
    if let Some(p) = &d.points {
        if p.len() != rows.len() {
            return Err(shape("one label per point is required"));
        }
    }
    Ok(FiniteMetricSpace::new(rows)?)
}

pub fn metric_to_data(m: &FiniteMetricSpace, points: Option<Vec<String>>) -> MetricData {
    MetricData {
        points,
        distances: m.distances().iter().map(|r| rats_out(r)).collect(),
    }
}

pub fn bifiltration_to_data(b: &Bifiltration, axes: Option<Vec<String>>) -> BifiltrationData {
    BifiltrationData {
        vertices: b.complex.n_vertices(),
        n_params: b.n_params,
        axes,
        simplices: b
            .complex
            .simplices()
            .iter()
            .zip(&b.grades)
            .map(|(s, gs)| GradedSimplex {
                simplex: s.clone(),
                grades: gs.iter().map(|g| rats_out(g)).collect(),
            })
            .collect(),
    }
}

pub fn bifiltration_from_data(d: &BifiltrationData) -> Result<Bifiltration> {
    let simplices: Vec<Vec<usize>> = d.simplices.iter().map(|s| s.simplex.clone()).collect();
    let k = SimplicialComplex::new(d.vertices, simplices)?;
    let grades = d
        .simplices
        .iter()
        .map(|s| s.grades.iter().map(|g| rats_in(g)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Bifiltration::new(k, d.n_params, grades)?)
}

pub fn module_to_string(v: &StepModule) -> String {
    to_canonical(&Tagged::new(kind::MODULE, module_to_data(v)))
}

pub fn module_from_str(text: &str) -> Result<StepModule> {
    module_from_data(&parse_tagged(text, kind::MODULE)?)
}

pub fn read_module(path: &Path) -> Result<StepModule> {
    module_from_str(&read_text(path)?)
}

pub fn write_module(path: &Path, v: &StepModule) -> Result<()> {
    write_text(path, &module_to_string(v))
}

pub fn morphism_to_string(m: &Morphism) -> String {
    to_canonical(&Tagged::new(kind::MORPHISM, morphism_to_data(m)))
}

pub fn interleaving_to_string(i: &Interleaving) -> String {
    to_canonical(&Tagged::new(kind::INTERLEAVING, interleaving_to_data(i)))
}

pub fn read_interleaving(path: &Path) -> Result<Interleaving> {
    interleaving_from_data(&parse_tagged(&read_text(path)?, kind::INTERLEAVING)?)
}

pub fn chain_to_string(terms: &[String], links: &[String]) -> String {
    to_canonical(&Tagged::new(
        kind::CHAIN,
        ChainData {
            terms: terms.to_vec(),
            links: links.to_vec(),
        },
    ))
}

/// Resolves a chain manifest's term and link files relative to it.
pub fn read_chain(path: &Path) -> Result<(Vec<StepModule>, Vec<Interleaving>)> {
    let d: ChainData = parse_tagged(&read_text(path)?, kind::CHAIN)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let terms = d.terms.iter().map(|t| read_module(&base.join(t))).collect::<Result<Vec<_>>>()?;
    let links = d.links.iter().map(|l| read_interleaving(&base.join(l))).collect::<Result<Vec<_>>>()?;
    Ok((terms, links))
}

pub fn bifiltration_to_string(b: &Bifiltration, axes: Option<Vec<String>>) -> String {
    to_canonical(&Tagged::new(kind::BIFILTRATION, bifiltration_to_data(b, axes)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use obspers_core::library::{lambda_module, single_cell};
    use obspers_core::rational::{int, rat};

    #[test]
    fn module_text_round_trips() {
        let v = lambda_module(Fp::new(5).unwrap(), 3).unwrap();
        let text = module_to_string(&v);
        let back = module_from_str(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(module_to_string(&back), text);
    }

    #[test]
    fn zero_steps_are_implied() {
        let f = Fp::new(2).unwrap();
        let c = single_cell(f, &[rat(1, 2), int(0)], int(1)).unwrap();
        let d = module_to_data(&c);
        assert!(d.steps.is_empty());
        assert_eq!(module_from_data(&d).unwrap(), c);
    }

    #[test]
    fn rejects_bad_residues_and_tags() {
        let f = Fp::new(3).unwrap();
        let v = lambda_module(Fp::new(5).unwrap(), 4).unwrap();
        let mut d = module_to_data(&v);
        d.field = FieldJson { p: f.p() };
        assert!(module_from_data(&d).is_err());
        let text = module_to_string(&v).replace("obspers/1", "obspers/0");
        assert!(matches!(module_from_str(&text), Err(FormatError::Tag(_))));
    }
}
