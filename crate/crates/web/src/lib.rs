//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes the plain-text polynomial and polytope formats and
//! returns the text that the page prints. Errors come back as JS strings.

use wasm_bindgen::prelude::*;

use polybound::bounds::{run_pipeline, KSpec, PipelineOptions, ShiftMode};
use polybound::integrate::{integrate_polynomial, volume as exact_volume, Backend};
use polybound::polytope::HRep;
use polybound::ratpoly::parse_rational;
use polybound::{Polynomial, Rational};

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn parse_inputs(poly: &str, polytope: &str) -> Result<(Polynomial, HRep), JsValue> {
    let f = Polynomial::parse(poly).map_err(err)?;
    let p = HRep::parse(polytope).map_err(err)?;
    if f.dim() != p.dim() {
        return Err(err(format!(
            "polynomial is in dimension {}, polytope in {}",
            f.dim(),
            p.dim()
        )));
    }
    Ok((f, p))
}

/// Vertices and exact volume.
#[wasm_bindgen]
pub fn describe_polytope(polytope: &str) -> Result<String, JsValue> {
    let p = HRep::parse(polytope).map_err(err)?;
    let mut out = String::new();
    for v in p.vertices() {
        let coords: Vec<String> = v.point.iter().map(Rational::to_string).collect();
        out += &format!("vertex ({})\n", coords.join(", "));
    }
    out += &format!("volume = {}\n", exact_volume(&p));
    Ok(out)
}

/// `∫_P f^k dx` as an exact fraction.
#[wasm_bindgen]
pub fn integrate(poly: &str, polytope: &str, k: u32) -> Result<String, JsValue> {
    let (f, p) = parse_inputs(poly, polytope)?;
    let value = integrate_polynomial(&p, &f.pow(k), Backend::LinearForms).map_err(err)?;
    Ok(format!("integral of f^{k} = {value}\n"))
}

/// Bounds report for one `k`. An empty `lipschitz` lets the library compute it;
/// `shift_auto` finds a Handelman shift so that `f + s ≥ 0`.
#[wasm_bindgen]
pub fn bounds(poly: &str, polytope: &str, k: u32, lipschitz: &str, shift_auto: bool) -> Result<String, JsValue> {
    let (f, p) = parse_inputs(poly, polytope)?;
    let lipschitz = match lipschitz.trim() {
        "" => None,
        text => Some(parse_rational(text).ok_or_else(|| err(format!("cannot parse Lipschitz constant `{text}`")))?),
    };
    let options = PipelineOptions {
        shift: if shift_auto { ShiftMode::Auto } else { ShiftMode::None },
        lipschitz,
        digits: 8,
        ..PipelineOptions::default()
    };
    let report = run_pipeline(&p, &f, &KSpec::Fixed(k), &options).map_err(err)?;
    Ok(report.to_table())
}
