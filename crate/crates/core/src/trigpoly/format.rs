//! Text serialization of trigonometric polynomials.
//!
//! The layout is a JSON object `{dim, degree, terms: [{freq, cos, sin}]}`.
//! Reals are written with 17 significant digits so that reading a file back
//! reproduces every coefficient bit for bit.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::poly::{Term, TrigPoly};
use crate::error::{Error, Result};

/// Formats a double with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrigPolyFile {
    pub dim: usize,
    pub degree: f64,
    pub terms: Vec<Term>,
}

/// Writes the polynomial; `header` lines (already formatted `"key": value`
/// pairs) are placed before the polynomial fields.
pub fn write_trigpoly(p: &TrigPoly, header: &[(String, String)]) -> String {
    let mut out = String::from("{\n");
    for (k, v) in header {
        let _ = writeln!(out, "  \"{k}\": {v},");
    }
    let _ = writeln!(out, "  \"dim\": {},", p.dim());
    let _ = writeln!(out, "  \"degree\": {},", fmt_real(p.degree()));
    out.push_str("  \"terms\": [");
    for (i, t) in p.terms().iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let freq: Vec<String> = t.freq.iter().map(|n| n.to_string()).collect();
        let _ = write!(
            out,
            "    {{\"freq\": [{}], \"cos\": {}, \"sin\": {}}}",
            freq.join(", "),
            fmt_real(t.cos),
            fmt_real(t.sin)
        );
    }
    out.push_str(if p.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    out
}

pub fn read_trigpoly(text: &str) -> Result<TrigPoly> {
    let file: TrigPolyFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let p = TrigPoly::new(file.dim, file.terms)?;
    if (p.degree() - file.degree).abs() > 1e-9 * file.degree.max(1.0) {
        return Err(Error::Format(format!(
            "declared degree {} does not match terms ({})",
            file.degree,
            p.degree()
        )));
    }
    Ok(p)
}
