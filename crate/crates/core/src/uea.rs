//! The universal enveloping algebra of the Schrödinger algebra.
//!
//! The algebra is spanned by six generators `e, h, f, p, q, z` with brackets
//!
//! ```text
//! [h,e] = 2e   [h,f] = -2f   [e,f] = h
//! [h,p] = p    [h,q] = -q    [p,q] = z
//! [e,q] = p    [p,f] = -q    [f,q] = 0
//! [e,p] = 0    [z,·] = 0
//! ```
//!
//! so `{e,h,f}` is an sl2 triple and `{p,q,z}` a Heisenberg algebra sitting
//! as an ideal. Elements of the enveloping algebra are kept in the PBW basis
//! of sorted monomials `e^a h^b f^c p^d q^m z^g`, ordered sl2 block first and
//! the central letter last. Rewriting an arbitrary word to this basis is a
//! pair-exchange loop: every adjacent out-of-order pair `x·y` becomes
//! `y·x + [x,y]`, which terminates because each step lowers either the word
//! length or its inversion count.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;
use crate::rat::Rat;
use crate::whittaker::WhittakerType;

/// The six generators, in PBW order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Generator {
    E,
    H,
    F,
    P,
    Q,
    Z,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::E,
        Generator::H,
        Generator::F,
        Generator::P,
        Generator::Q,
        Generator::Z,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Generator::E => 'e',
            Generator::H => 'h',
            Generator::F => 'f',
            Generator::P => 'p',
            Generator::Q => 'q',
            Generator::Z => 'z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Generator::ALL.iter().copied().find(|g| g.letter() == c)
    }
}

/// Turns a string of generator letters into a word; test and table helper.
pub fn word(s: &str) -> Vec<Generator> {
    s.chars()
        .map(|c| Generator::from_letter(c).unwrap_or_else(|| panic!("bad generator letter {c:?}")))
        .collect()
}

/// Bracket `[x, y]` for an *inverted* pair (`index(x) > index(y)`), as a
/// scaled single generator; `None` when the pair commutes.
fn bracket_table(x: Generator, y: Generator) -> Option<(Generator, i64)> {
    use Generator::*;
    debug_assert!(x.index() > y.index());
    match (x, y) {
        (H, E) => Some((E, 2)),
        (F, E) => Some((H, -1)),
        (F, H) => Some((F, 2)),
        (P, H) => Some((P, -1)),
        (P, F) => Some((Q, -1)),
        (Q, E) => Some((P, -1)),
        (Q, H) => Some((Q, 1)),
        (Q, P) => Some((Z, -1)),
        _ => None,
    }
}

/// Lie bracket of two generators as an enveloping-algebra element.
pub fn bracket_gen(a: Generator, b: Generator) -> UEAElem {
    use std::cmp::Ordering;
    let (x, y, sign) = match a.index().cmp(&b.index()) {
        Ordering::Equal => return UEAElem::zero(),
        Ordering::Greater => (a, b, 1),
        Ordering::Less => (b, a, -1),
    };
    match bracket_table(x, y) {
        None => UEAElem::zero(),
        Some((g, k)) => UEAElem::from_term(Monomial::generator(g), Rat::from_int(sign * k)),
    }
}

/// PBW monomial `e^a h^b f^c p^d q^m z^g`, stored as exponents in generator
/// order. The all-zero tuple is the unit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(pub [u32; 6]);

impl Monomial {
    pub fn unit() -> Self {
        Monomial([0; 6])
    }

    pub fn generator(g: Generator) -> Self {
        let mut exps = [0; 6];
        exps[g.index()] = 1;
        Monomial(exps)
    }

    pub fn exp(&self, g: Generator) -> u32 {
        self.0[g.index()]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Index of the first generator with nonzero exponent.
    fn min_letter(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }

    /// Index of the last generator with nonzero exponent.
    fn max_letter(&self) -> Option<usize> {
        self.0.iter().rposition(|&e| e > 0)
    }

    pub fn to_word(&self) -> Vec<Generator> {
        let mut w = Vec::with_capacity(self.total_degree() as usize);
        for g in Generator::ALL {
            for _ in 0..self.exp(g) {
                w.push(g);
            }
        }
        w
    }

    /// Counts exponents of a word already in PBW order.
    pub fn from_sorted_word(w: &[Generator]) -> Self {
        debug_assert!(w.windows(2).all(|p| p[0].index() <= p[1].index()));
        let mut exps = [0; 6];
        for g in w {
            exps[g.index()] += 1;
        }
        Monomial(exps)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for g in Generator::ALL {
            let e = self.exp(g);
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", g.letter())?;
            } else {
                write!(f, "{}^{}", g.letter(), e)?;
            }
        }
        Ok(())
    }
}

/// Which adjacent inversion the rewriting loop fixes first. Both strategies
/// must agree on the canonical form; the test suite checks that they do.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    LeftmostFirst,
    RightmostFirst,
}

/// Element of the enveloping algebra: a sparse rational combination of PBW
/// monomials. Zero coefficients are never stored, so structural equality is
/// equality of canonical forms.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UEAElem {
    terms: BTreeMap<Monomial, Rat>,
}

impl UEAElem {
    pub fn zero() -> Self {
        UEAElem::default()
    }

    pub fn one() -> Self {
        UEAElem::from_term(Monomial::unit(), Rat::one())
    }

    pub fn from_term(m: Monomial, c: Rat) -> Self {
        let mut e = UEAElem::zero();
        e.add_term(m, c);
        e
    }

    pub fn generator(g: Generator) -> Self {
        UEAElem::from_term(Monomial::generator(g), Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Highest total degree over the support; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return UEAElem::zero();
        }
        UEAElem {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = UEAElem::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// True when every monomial in the support has `z`-exponent at least
    /// `min`; vacuously true for zero.
    pub fn all_z_exp_at_least(&self, min: u32) -> bool {
        self.terms.keys().all(|m| m.exp(Generator::Z) >= min)
    }
}

/// Rewrites `coeff * word` into canonical PBW form, fixing the leftmost
/// inversion first.
pub fn normalize(word: &[Generator], coeff: &Rat) -> UEAElem {
    normalize_with_strategy(word, coeff, Strategy::LeftmostFirst)
}

pub fn normalize_with_strategy(word: &[Generator], coeff: &Rat, strategy: Strategy) -> UEAElem {
    if coeff.is_zero() {
        return UEAElem::zero();
    }
    normalize_cached(word, strategy).scale(coeff)
}

// Distinct rewrite paths reconverge on the same intermediate words, so an
// uncached pair-exchange loop does exponential work on towers like q^n h^m.
// Memoizing per word keeps the work proportional to the set of words
// actually visited. The cache is keyed by strategy: the confluence tests
// compare leftmost against rightmost rewriting and must not share results.
fn normalize_cached(word: &[Generator], strategy: Strategy) -> UEAElem {
    use std::cell::RefCell;
    use std::collections::HashMap;
    thread_local! {
        static CACHE: RefCell<HashMap<(bool, Vec<Generator>), UEAElem>> =
            RefCell::new(HashMap::new());
    }
    let Some(i) = find_inversion(word, strategy) else {
        return UEAElem::from_term(Monomial::from_sorted_word(word), Rat::one());
    };
    let key = (strategy == Strategy::LeftmostFirst, word.to_vec());
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }

    let mut swapped = word.to_vec();
    swapped.swap(i, i + 1);
    let mut out = normalize_cached(&swapped, strategy);
    if let Some((g, k)) = bracket_table(word[i], word[i + 1]) {
        let mut shorter = Vec::with_capacity(word.len() - 1);
        shorter.extend_from_slice(&word[..i]);
        shorter.push(g);
        shorter.extend_from_slice(&word[i + 2..]);
        let bracket_part = normalize_cached(&shorter, strategy);
        for (m, c) in bracket_part.terms() {
            out.add_term(*m, c * &Rat::from_int(k));
        }
    }
    CACHE.with(|c| c.borrow_mut().insert(key, out.clone()));
    out
}

fn find_inversion(w: &[Generator], strategy: Strategy) -> Option<usize> {
    let inverted = |i: &usize| w[*i].index() > w[*i + 1].index();
    let n = w.len().saturating_sub(1);
    match strategy {
        Strategy::LeftmostFirst => (0..n).find(inverted),
        Strategy::RightmostFirst => (0..n).rev().find(inverted),
    }
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> UEAElem {
    // Concatenation is already sorted whenever a's last letter does not
    // exceed b's first; then exponents just add.
    let sorted = match (a.max_letter(), b.min_letter()) {
        (None, _) | (_, None) => true,
        (Some(x), Some(y)) => x <= y,
    };
    if sorted {
        let mut exps = [0u32; 6];
        for i in 0..6 {
            exps[i] = a.0[i] + b.0[i];
        }
        return UEAElem::from_term(Monomial(exps), Rat::one());
    }
    let mut w = a.to_word();
    w.extend(b.to_word());
    normalize(&w, &Rat::one())
}

impl Mul for &UEAElem {
    type Output = UEAElem;

    fn mul(self, rhs: &UEAElem) -> UEAElem {
        let mut out = UEAElem::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                let prod = mul_monomials(ma, mb);
                let c = ca * cb;
                for (m, k) in prod.terms() {
                    out.add_term(*m, k * &c);
                }
            }
        }
        out
    }
}

impl Add for &UEAElem {
    type Output = UEAElem;
    fn add(self, rhs: &UEAElem) -> UEAElem {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &UEAElem {
    type Output = UEAElem;
    fn sub(self, rhs: &UEAElem) -> UEAElem {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &UEAElem {
    type Output = UEAElem;
    fn neg(self) -> UEAElem {
        UEAElem {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

/// Commutator `ab - ba` in canonical form.
pub fn commutator(a: &UEAElem, b: &UEAElem) -> UEAElem {
    &(a * b) - &(b * a)
}

/// The Casimir-like element `p^2 f - q^2 e - h p q`, which commutes with the
/// whole algebra modulo the ideal generated by `z`. Canonically this is
/// `-e q^2 + f p^2 - h p q`.
pub fn casimir() -> UEAElem {
    use Generator::*;
    let mut out = normalize(&[P, P, F], &Rat::one());
    out = &out - &normalize(&[Q, Q, E], &Rat::one());
    &out - &normalize(&[H, P, Q], &Rat::one())
}

/// The Whittaker-adapted elements attached to a nonzero type: `X` and `C`
/// span the raising directions of the module bases, `P±` are the shifted
/// annihilation directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedQuad {
    pub x: UEAElem,
    pub c: UEAElem,
    pub p_plus: UEAElem,
    pub p_minus: UEAElem,
}

/// Builds `X, C, P+, P-` from the Kronecker-delta formulas
/// `X = δ_{φ(q),0} e + δ_{φ(p),0} f`,
/// `C = φ(p)^2 f - φ(q)^2 e - φ(p)φ(q) h`,
/// `P+ = δ_{φ(p),0} p + δ_{φ(q),0} q`,
/// `P- = δ_{φ(q),0} p + δ_{φ(p),0} q`.
pub fn adapted_elements(phi: &WhittakerType) -> Result<AdaptedQuad, Error> {
    use Generator::*;
    if phi.is_zero() {
        return Err(Error::ZeroPhi);
    }
    let dp = if phi.phi_p().is_zero() { Rat::one() } else { Rat::zero() };
    let dq = if phi.phi_q().is_zero() { Rat::one() } else { Rat::zero() };
    let gen = |g: Generator, c: &Rat| UEAElem::from_term(Monomial::generator(g), c.clone());

    let x = &gen(E, &dq) + &gen(F, &dp);
    let mut c = gen(F, &phi.phi_p().pow(2));
    c = &c - &gen(E, &phi.phi_q().pow(2));
    c = &c - &gen(H, &(phi.phi_p() * phi.phi_q()));
    let p_plus = &gen(P, &dp) + &gen(Q, &dq);
    let p_minus = &gen(P, &dq) + &gen(Q, &dp);
    Ok(AdaptedQuad { x, c, p_plus, p_minus })
}

impl fmt::Display for UEAElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest monomial first; the leading sign folds into the
        // coefficient so the output stays inside the expression grammar.
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if first {
                first = false;
                if m.is_unit() {
                    write!(f, "{c}")?;
                } else if c.is_one() {
                    write!(f, "{m}")?;
                } else {
                    write!(f, "{c}*{m}")?;
                }
            } else {
                let mag = c.abs();
                let sep = if c.is_negative() { " - " } else { " + " };
                write!(f, "{sep}")?;
                if m.is_unit() {
                    write!(f, "{mag}")?;
                } else if mag.is_one() {
                    write!(f, "{m}")?;
                } else {
                    write!(f, "{mag}*{m}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UEAElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Result of one symbolic identity check.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub exponents: Vec<u32>,
    pub pass: bool,
}

/// Outcome of the reordering-identity suite.
#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Symbolically checks the four reordering identities
///
/// ```text
/// p^n h^m = sum_i C(m,i) (-1)^i n^i h^{m-i} p^n
/// q^n h^m = sum_i C(m,i)        n^i h^{m-i} q^n
/// p f^k   = f^k p - k f^{k-1} q
/// q e^k   = e^k q - k e^{k-1} p
/// ```
///
/// for all exponents up to `max_exp`, comparing both sides through the
/// rewriting engine.
pub fn verify_uea_identities(max_exp: u32) -> IdentityReport {
    use Generator::*;
    let mut report = IdentityReport::default();

    let power_word = |g: Generator, n: u32| vec![g; n as usize];

    for n in 0..=max_exp {
        for m in 0..=max_exp {
            for (name, letter, sign) in [("p^n h^m", P, -1i64), ("q^n h^m", Q, 1i64)] {
                let mut lhs_word = power_word(letter, n);
                lhs_word.extend(power_word(H, m));
                let lhs = normalize(&lhs_word, &Rat::one());

                let mut rhs = UEAElem::zero();
                for i in 0..=m {
                    let mut exps = [0u32; 6];
                    exps[H.index()] = m - i;
                    exps[letter.index()] = n;
                    let c = Rat::from_int(binomial(m, i))
                        * Rat::from_int(sign).pow(i as i64)
                        * Rat::from_int(n as i64).pow(i as i64);
                    rhs.add_term(Monomial(exps), c);
                }
                report.checks.push(IdentityCheck {
                    identity: name,
                    exponents: vec![n, m],
                    pass: lhs == rhs,
                });
            }
        }
    }

    for k in 0..=max_exp {
        for (name, mover, tower, lowered) in
            [("p f^k", P, F, Q), ("q e^k", Q, E, P)]
        {
            let mut lhs_word = vec![mover];
            lhs_word.extend(power_word(tower, k));
            let lhs = normalize(&lhs_word, &Rat::one());

            let mut exps = [0u32; 6];
            exps[tower.index()] = k;
            exps[mover.index()] = 1;
            let mut rhs = UEAElem::from_term(Monomial(exps), Rat::one());
            if k > 0 {
                let mut low = [0u32; 6];
                low[tower.index()] = k - 1;
                low[lowered.index()] = 1;
                rhs.add_term(Monomial(low), Rat::from_int(-(k as i64)));
            }
            report.checks.push(IdentityCheck {
                identity: name,
                exponents: vec![k],
                pass: lhs == rhs,
            });
        }
    }
    report
}

pub(crate) fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let mut acc: i64 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}
