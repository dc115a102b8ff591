//! Independent cross-check of the rewriting kernel.
//!
//! The algebra acts faithfully enough on one-variable polynomials through
//! the oscillator realization
//!
//! ```text
//! p ↦ d/dx      q ↦ x·        z ↦ 1
//! e ↦ (1/2)(d/dx)^2   f ↦ -(1/2)x^2   h ↦ -x·d/dx - 1/2
//! ```
//!
//! under which all brackets of the defining table hold exactly (the -1/2
//! shift in `h` is forced by `[e,f] = h`). Realizing a word directly as a
//! composition of operators and realizing its canonical form must agree;
//! any sign or coefficient slip in the rewriting engine shows up here.
//! Note that `z` maps to 1, not 0: this oracle validates the algebra
//! arithmetic, not the module theory.

use std::collections::BTreeMap;

use crate::poly::Poly;
use crate::rat::Rat;
use crate::uea::{normalize, Generator, UEAElem};

/// Differential operator `Σ c · x^a (d/dx)^b` with exact coefficients,
/// stored in the normal form "all x's left of all derivatives".
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiffOp {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn identity() -> Self {
        DiffOp::from_term(0, 0, Rat::one())
    }

    pub fn from_term(x_pow: u32, d_pow: u32, c: Rat) -> Self {
        let mut op = DiffOp::zero();
        op.add_term(x_pow, d_pow, c);
        op
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, x_pow: u32, d_pow: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((x_pow, d_pow)).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(x_pow, d_pow));
        }
    }

    pub fn add_assign(&mut self, rhs: &DiffOp) {
        for (&(a, b), c) in rhs.terms() {
            self.add_term(a, b, c.clone());
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return DiffOp::zero();
        }
        DiffOp {
            terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect(),
        }
    }

    /// Operator composition `self ∘ rhs`, re-normalized with the Leibniz
    /// exchange `D^b x^c = Σ_i C(b,i) c!/(c-i)! x^{c-i} D^{b-i}`.
    pub fn compose(&self, rhs: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        for (&(a1, b1), c1) in self.terms() {
            for (&(a2, b2), c2) in rhs.terms() {
                let coeff = c1 * c2;
                for i in 0..=b1.min(a2) {
                    let k = Rat::from_int(binom_u32(b1, i)) * falling(a2, i);
                    out.add_term(a1 + a2 - i, b1 + b2 - i, &k * &coeff);
                }
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> DiffOp {
        let mut acc = DiffOp::identity();
        for _ in 0..exp {
            acc = acc.compose(self);
        }
        acc
    }

    /// Applies the operator to the monomial `x^n` exactly.
    pub fn apply_to_power(&self, n: u32) -> Poly {
        let mut coeffs = vec![Rat::zero(); 1];
        for (&(a, b), c) in self.terms() {
            if b > n {
                continue;
            }
            let deg = (n - b + a) as usize;
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, Rat::zero());
            }
            coeffs[deg] += c * &falling(n, b);
        }
        Poly::from_coeffs(coeffs)
    }
}

fn binom_u32(n: u32, k: u32) -> i64 {
    crate::uea::binomial(n, k)
}

/// Falling factorial `n (n-1) ... (n-k+1)` as a rational.
fn falling(n: u32, k: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..k {
        acc = acc * Rat::from_int((n - i) as i64);
    }
    acc
}

/// Oscillator realization of a single generator.
pub fn realize(g: Generator) -> DiffOp {
    match g {
        Generator::P => DiffOp::from_term(0, 1, Rat::one()),
        Generator::Q => DiffOp::from_term(1, 0, Rat::one()),
        Generator::Z => DiffOp::identity(),
        Generator::E => DiffOp::from_term(0, 2, Rat::from_pair(1, 2)),
        Generator::F => DiffOp::from_term(2, 0, Rat::from_pair(-1, 2)),
        Generator::H => {
            let mut op = DiffOp::from_term(1, 1, Rat::from_int(-1));
            op.add_term(0, 0, Rat::from_pair(-1, 2));
            op
        }
    }
}

/// Realization of a word, composed letter by letter without any rewriting.
pub fn realize_word(word: &[Generator]) -> DiffOp {
    word.iter()
        .fold(DiffOp::identity(), |acc, &g| acc.compose(&realize(g)))
}

/// Realization of a canonical element, extended linearly and
/// multiplicatively over its monomials.
pub fn realize_elem(u: &UEAElem) -> DiffOp {
    let mut out = DiffOp::zero();
    for (m, c) in u.terms() {
        out.add_assign(&realize_word(&m.to_word()).scale(c));
    }
    out
}

/// True iff realizing the normalized combination and composing the raw
/// words directly agree on every `x^n` with `n ≤ degree_bound`.
pub fn cross_check(words: &[(Vec<Generator>, Rat)], degree_bound: u32) -> bool {
    let mut direct = DiffOp::zero();
    let mut canonical = UEAElem::zero();
    for (w, c) in words {
        direct.add_assign(&realize_word(w).scale(c));
        let n = normalize(w, c);
        for (m, k) in n.terms() {
            canonical.add_term(*m, k.clone());
        }
    }
    let via_normal = realize_elem(&canonical);
    (0..=degree_bound).all(|n| direct.apply_to_power(n) == via_normal.apply_to_power(n))
}
