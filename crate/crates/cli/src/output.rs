//! Wire formats: the JSON element schema and text renderers.
//!
//! Every element is a list of `{monomial, coeff}` records with the monomial
//! as an exponent tuple and the coefficient as an explicit `numer/denom`
//! string in lowest terms; monomials are strictly sorted lexicographically
//! and zero coefficients are never emitted. Command output is wrapped in a
//! `{command, inputs, result, trunc, seed}` envelope whose serialization is
//! byte-stable for fixed input and seed.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sqw_core::poly::Poly;
use sqw_core::rat::Rat;
use sqw_core::structure::{Component, FinElem, QuotElem, SeriesReport, Witness};
use sqw_core::uea::UEAElem;
use sqw_core::whittaker::ModElem;

/// One monomial/coefficient record of the element schema.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonTerm {
    pub monomial: Vec<u32>,
    pub coeff: String,
}

pub fn uea_to_json(u: &UEAElem) -> Vec<JsonTerm> {
    u.terms()
        .map(|(m, c)| JsonTerm { monomial: m.0.to_vec(), coeff: c.to_fraction_string() })
        .collect()
}

pub fn mod_to_json(v: &ModElem) -> Vec<JsonTerm> {
    v.terms()
        .map(|(t, c)| JsonTerm { monomial: t.to_vec(), coeff: c.to_fraction_string() })
        .collect()
}

pub fn fin_to_json(v: &FinElem) -> Vec<JsonTerm> {
    v.terms()
        .map(|(t, c)| JsonTerm { monomial: t.to_vec(), coeff: c.to_fraction_string() })
        .collect()
}

pub fn quot_to_json(v: &QuotElem) -> Vec<JsonTerm> {
    v.terms()
        .map(|(t, c)| JsonTerm { monomial: t.to_vec(), coeff: c.to_fraction_string() })
        .collect()
}

pub fn poly_to_json(p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(Rat::to_fraction_string).collect()
}

pub fn witness_to_json(w: &Witness) -> Value {
    json!({
        "element": uea_to_json(&w.element),
        "scalar": w.scalar.to_fraction_string(),
    })
}

pub fn series_to_json(r: &SeriesReport) -> Value {
    json!({
        "layers": r.layers.iter().map(Rat::to_fraction_string).collect::<Vec<_>>(),
        "length": r.layers.len(),
    })
}

pub fn component_to_json(c: &Component) -> Value {
    json!({
        "root": c.root.to_fraction_string(),
        "multiplicity": c.multiplicity,
        "generator": fin_to_json(&c.generator),
        "complement": poly_to_json(&c.complement),
        "bezout": poly_to_json(&c.bezout),
    })
}

/// Renders a finite-quotient element in the adapted letters.
pub fn fin_to_text(v: &FinElem, degenerate: bool) -> String {
    element_text(v.terms().map(|(t, c)| (*t, c.clone())), degenerate, 3)
}

/// Renders a simple-quotient element in the adapted letters.
pub fn quot_to_text(v: &QuotElem, degenerate: bool) -> String {
    element_text(v.terms().map(|(t, c)| ([t[0], t[1], 0], c.clone())), degenerate, 2)
}

fn element_text(
    terms: impl Iterator<Item = ([u32; 3], Rat)>,
    degenerate: bool,
    slots: usize,
) -> String {
    let letters: [&str; 3] = if degenerate { ["X", "h", "C"] } else { ["h", "f", "C"] };
    let rendered: Vec<(String, Rat)> = terms
        .map(|(t, c)| {
            let mut parts = Vec::new();
            for (s, letter) in letters.iter().enumerate().take(slots) {
                match t[s] {
                    0 => {}
                    1 => parts.push(letter.to_string()),
                    e => parts.push(format!("{letter}^{e}")),
                }
            }
            parts.push("w".to_string());
            (parts.join("*"), c)
        })
        .collect();
    if rendered.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (mon, c)) in rendered.iter().rev().enumerate() {
        if i == 0 {
            if c.is_one() {
                out.push_str(mon);
            } else {
                out.push_str(&format!("{c}*{mon}"));
            }
        } else {
            let mag = c.abs();
            out.push_str(if c.is_negative() { " - " } else { " + " });
            if mag.is_one() {
                out.push_str(mon);
            } else {
                out.push_str(&format!("{mag}*{mon}"));
            }
        }
    }
    out
}

/// The command envelope; serialization order is fixed by field order.
#[derive(Serialize)]
pub struct Envelope {
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub trunc: u32,
    pub seed: u64,
}
