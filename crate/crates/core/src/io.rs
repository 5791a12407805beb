//! JSON and CSV interchange for elements, matrices, crossed elements, and
//! evaluation reports.
//!
//! Formats are stable and diffable: element files are weight-term lists,
//! matrix files are row-major grids of elements, pairing tables carry the
//! fixed column set (theta, value_re, value_im, normalized,
//! integer_distance) in both JSON and CSV renderings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocycles::PairingReport;
use crate::crossed_products::{CrossedElement, CrossedError};
use crate::graded_core::{GradedElement, GradedError, MatrixGradedElement, Weight};

/// Errors from parsing or validating interchange files.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("matrix file declares dim {dim} but row {row} has {got} entries")]
    RaggedMatrix { dim: usize, row: usize, got: usize },
    #[error("matrix file declares dim {dim} but has {got} rows")]
    WrongRowCount { dim: usize, got: usize },
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Crossed(#[from] CrossedError),
}

/// One weight term of an element file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub m: i32,
    pub n: i32,
    pub re: f64,
    pub im: f64,
}

/// Element file body: declared weight cutoff plus the term list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementJson {
    pub cutoff: u32,
    pub terms: Vec<TermJson>,
}

impl ElementJson {
    /// Captures an element, with the cutoff taken from its support.
    pub fn from_element(a: &GradedElement) -> Self {
        ElementJson {
            cutoff: a.cutoff(),
            terms: a
                .iter_terms()
                .map(|(w, c)| TermJson {
                    m: w.m,
                    n: w.n,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    /// Rebuilds the element; coinciding terms merge additively.
    pub fn to_element(&self) -> GradedElement {
        let mut out = GradedElement::zero();
        for t in &self.terms {
            out.add_term(Weight::new(t.m, t.n), Complex64::new(t.re, t.im));
        }
        out
    }
}

/// Matrix file body: dimension plus a row-major grid of elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<ElementJson>>,
}

impl MatrixJson {
    pub fn from_matrix(p: &MatrixGradedElement) -> Self {
        let d = p.dim();
        MatrixJson {
            dim: d,
            entries: (0..d)
                .map(|i| (0..d).map(|j| ElementJson::from_element(p.entry(i, j))).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<MatrixGradedElement, IoError> {
        if self.entries.len() != self.dim {
            return Err(IoError::WrongRowCount {
                dim: self.dim,
                got: self.entries.len(),
            });
        }
        let mut flat = Vec::with_capacity(self.dim * self.dim);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.dim {
                return Err(IoError::RaggedMatrix {
                    dim: self.dim,
                    row: i,
                    got: row.len(),
                });
            }
            flat.extend(row.iter().map(|e| e.to_element()));
        }
        Ok(MatrixGradedElement::from_entries(self.dim, flat)?)
    }
}

/// One term of a crossed-element file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossedTermJson {
    pub k: i32,
    pub l: i32,
    pub element: ElementJson,
}

/// Crossed-element file body: outer and frequency windows plus terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossedJson {
    #[serde(rename = "K")]
    pub k_cut: u32,
    #[serde(rename = "L")]
    pub l_cut: u32,
    pub terms: Vec<CrossedTermJson>,
}

impl CrossedJson {
    pub fn from_crossed(x: &CrossedElement) -> Self {
        CrossedJson {
            k_cut: x.k_cut(),
            l_cut: x.l_cut(),
            terms: x
                .iter_terms()
                .map(|((k, l), a)| CrossedTermJson {
                    k,
                    l,
                    element: ElementJson::from_element(a),
                })
                .collect(),
        }
    }

    pub fn to_crossed(&self) -> Result<CrossedElement, IoError> {
        let mut out = CrossedElement::new(self.k_cut, self.l_cut);
        for t in &self.terms {
            out.add_term(t.k, t.l, t.element.to_element())?;
        }
        Ok(out)
    }
}

/// Flat pairing record with the fixed column set shared by the JSON and
/// CSV renderings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingJson {
    pub cocycle: String,
    pub theta: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub normalized: f64,
    pub integer_distance: f64,
}

impl PairingJson {
    pub fn from_report(r: &PairingReport) -> Self {
        PairingJson {
            cocycle: r.cocycle.clone(),
            theta: r.theta,
            value_re: r.value.re,
            value_im: r.value.im,
            normalized: r.normalized.re,
            integer_distance: r.integer_distance,
        }
    }
}

/// Free-form evaluation record for spectral quantities: operation name,
/// echoed inputs, complex value, and the window bookkeeping behind it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralRecordJson {
    pub op: String,
    pub inputs: serde_json::Value,
    pub value: [f64; 2],
    pub window: u32,
    pub mask_fraction: f64,
}

pub fn parse_element(s: &str) -> Result<GradedElement, IoError> {
    let body: ElementJson = serde_json::from_str(s)?;
    Ok(body.to_element())
}

pub fn render_element(a: &GradedElement) -> String {
    serde_json::to_string_pretty(&ElementJson::from_element(a)).expect("plain data")
}

pub fn parse_matrix(s: &str) -> Result<MatrixGradedElement, IoError> {
    let body: MatrixJson = serde_json::from_str(s)?;
    body.to_matrix()
}

pub fn render_matrix(p: &MatrixGradedElement) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(p)).expect("plain data")
}

/// Parses a matrix file, falling back to reading a bare element as a 1×1
/// matrix so scalar projections need no wrapper.
pub fn parse_matrix_or_element(s: &str) -> Result<MatrixGradedElement, IoError> {
    match parse_matrix(s) {
        Ok(p) => Ok(p),
        Err(IoError::Json(_)) => Ok(MatrixGradedElement::from_scalar(parse_element(s)?)),
        Err(e) => Err(e),
    }
}

pub fn parse_crossed(s: &str) -> Result<CrossedElement, IoError> {
    let body: CrossedJson = serde_json::from_str(s)?;
    body.to_crossed()
}

pub fn render_crossed(x: &CrossedElement) -> String {
    serde_json::to_string_pretty(&CrossedJson::from_crossed(x)).expect("plain data")
}

pub fn render_pairings_json(reports: &[PairingReport]) -> String {
    let rows: Vec<PairingJson> = reports.iter().map(PairingJson::from_report).collect();
    serde_json::to_string_pretty(&rows).expect("plain data")
}

/// Fixed-column CSV rendering of pairing reports.
pub fn render_pairings_csv(reports: &[PairingReport]) -> String {
    let mut out = String::from("theta,value_re,value_im,normalized,integer_distance\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.theta, r.value.re, r.value.im, r.normalized.re, r.integer_distance
        ));
    }
    out
}
