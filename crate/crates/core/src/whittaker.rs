//! Quasi-Whittaker modules induced from the Heisenberg subalgebra.
//!
//! A Whittaker type is a Lie algebra homomorphism from the Heisenberg
//! subalgebra `span{p,q,z}` to the scalars; it is determined by the pair
//! `(φ(p), φ(q))` since `φ(z) = 0` is forced by `[p,q] = z`. Inducing the
//! one-dimensional module `C·w` with `p w = φ(p) w`, `q w = φ(q) w` up to the
//! full algebra gives the universal quasi-Whittaker module `M_φ`, which is
//! free of rank one over the sl2 part: `{e^i h^j f^k w}` is a basis.
//!
//! Everything here works in that canonical basis. The type-adapted bases
//! `{X^i h^j C^k w}` (when `φ(p)φ(q) = 0`) and `{h^i f^j C^k w}` (otherwise)
//! are views, reached by an exact triangular change of basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::linalg::RatMatrix;
use crate::rat::Rat;
use crate::uea::{adapted_elements, normalize, Generator, UEAElem};

/// Whittaker type `(φ(p), φ(q))`; `φ(z) = 0` always and is not stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WhittakerType {
    phi_p: Rat,
    phi_q: Rat,
}

/// Classification by which of the two values vanish.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PhiClass {
    /// Both zero: the module theory reduces to sl2 and is out of scope here.
    Zero,
    /// `φ(p) = 0`, `φ(q) ≠ 0`.
    PZero,
    /// `φ(q) = 0`, `φ(p) ≠ 0`.
    QZero,
    /// Both nonzero.
    Nondegenerate,
}

impl PhiClass {
    pub fn is_degenerate(self) -> bool {
        matches!(self, PhiClass::PZero | PhiClass::QZero)
    }
}

impl WhittakerType {
    pub fn new(phi_p: Rat, phi_q: Rat) -> Self {
        WhittakerType { phi_p, phi_q }
    }

    pub fn from_ints(p: i64, q: i64) -> Self {
        WhittakerType::new(Rat::from_int(p), Rat::from_int(q))
    }

    pub fn phi_p(&self) -> &Rat {
        &self.phi_p
    }

    pub fn phi_q(&self) -> &Rat {
        &self.phi_q
    }

    pub fn is_zero(&self) -> bool {
        self.phi_p.is_zero() && self.phi_q.is_zero()
    }

    pub fn class(&self) -> PhiClass {
        match (self.phi_p.is_zero(), self.phi_q.is_zero()) {
            (true, true) => PhiClass::Zero,
            (true, false) => PhiClass::PZero,
            (false, true) => PhiClass::QZero,
            (false, false) => PhiClass::Nondegenerate,
        }
    }

    /// Evaluates φ on a Heisenberg combination (letters p, q, z only).
    pub fn eval(&self, elem: &UEAElem) -> Rat {
        let mut out = Rat::zero();
        for (m, c) in elem.terms() {
            let val = match (m.exp(Generator::P), m.exp(Generator::Q), m.exp(Generator::Z)) {
                (1, 0, 0) => self.phi_p.clone(),
                (0, 1, 0) => self.phi_q.clone(),
                (0, 0, 1) => Rat::zero(),
                _ => panic!("eval expects a linear Heisenberg combination"),
            };
            debug_assert_eq!(m.total_degree(), 1);
            out += &val * c;
        }
        out
    }
}

/// Element of `M_φ` in the canonical basis `e^i h^j f^k w`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModElem {
    phi: WhittakerType,
    terms: BTreeMap<[u32; 3], Rat>,
}

impl ModElem {
    pub fn zero(phi: WhittakerType) -> Self {
        ModElem { phi, terms: BTreeMap::new() }
    }

    /// The cyclic vector `w`.
    pub fn cyclic(phi: WhittakerType) -> Self {
        ModElem::from_term(phi, [0, 0, 0], Rat::one())
    }

    pub fn from_term(phi: WhittakerType, t: [u32; 3], c: Rat) -> Self {
        let mut v = ModElem::zero(phi);
        v.add_term(t, c);
        v
    }

    pub fn phi(&self) -> &WhittakerType {
        &self.phi
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t: &[u32; 3]) -> Rat {
        self.terms.get(t).cloned().unwrap_or_else(Rat::zero)
    }

    /// Highest total sl2 degree `i+j+k` over the support.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|t| t.iter().sum()).max()
    }

    pub fn add_term(&mut self, t: [u32; 3], c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn add_assign(&mut self, rhs: &ModElem) {
        assert_eq!(self.phi, rhs.phi, "Whittaker type mismatch");
        for (t, c) in rhs.terms() {
            self.add_term(*t, c.clone());
        }
    }

    pub fn sub_assign(&mut self, rhs: &ModElem) {
        assert_eq!(self.phi, rhs.phi, "Whittaker type mismatch");
        for (t, c) in rhs.terms() {
            self.add_term(*t, -c);
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return ModElem::zero(self.phi.clone());
        }
        ModElem {
            phi: self.phi.clone(),
            terms: self.terms.iter().map(|(t, a)| (*t, a * c)).collect(),
        }
    }

    /// Converts to the type-adapted basis; errors on the zero type.
    pub fn to_adapted(&self) -> Result<AdaptedElem, Error> {
        let mut ctx = BasisCtx::new(self.phi.clone())?;
        Ok(ctx.to_adapted(self))
    }
}

fn triple_word(t: &[u32; 3]) -> Vec<Generator> {
    let mut w = Vec::with_capacity((t[0] + t[1] + t[2]) as usize);
    w.extend(std::iter::repeat(Generator::E).take(t[0] as usize));
    w.extend(std::iter::repeat(Generator::H).take(t[1] as usize));
    w.extend(std::iter::repeat(Generator::F).take(t[2] as usize));
    w
}

/// Action of the enveloping algebra on `M_φ`: normal-order the concatenated
/// word, then evaluate the Heisenberg tail of each canonical monomial on the
/// cyclic vector (`p ↦ φ(p)`, `q ↦ φ(q)`, `z ↦ 0`).
pub fn act(u: &UEAElem, v: &ModElem) -> ModElem {
    let phi = v.phi.clone();
    let mut out = ModElem::zero(phi.clone());
    for (mu, cu) in u.terms() {
        for (t, cv) in v.terms() {
            let mut w = mu.to_word();
            w.extend(triple_word(t));
            let canon = normalize(&w, &(cu * cv));
            for (m, c) in canon.terms() {
                if m.exp(Generator::Z) > 0 {
                    continue;
                }
                let mut c = c.clone();
                let dp = m.exp(Generator::P);
                let dq = m.exp(Generator::Q);
                if dp > 0 {
                    c = c * phi.phi_p.pow(dp as i64);
                }
                if dq > 0 {
                    c = c * phi.phi_q.pow(dq as i64);
                }
                out.add_term(
                    [m.exp(Generator::E), m.exp(Generator::H), m.exp(Generator::F)],
                    c,
                );
            }
        }
    }
    out
}

/// True when `v` is a quasi-Whittaker vector: `p v = φ(p) v`, `q v = φ(q) v`
/// (the `z` condition is automatic). Errors on the zero vector.
pub fn is_qw_vector(v: &ModElem) -> Result<bool, Error> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let p = UEAElem::generator(Generator::P);
    let q = UEAElem::generator(Generator::Q);
    Ok(act(&p, v) == v.scale(v.phi.phi_p()) && act(&q, v) == v.scale(v.phi.phi_q()))
}

/// Which adapted basis an [`AdaptedElem`] lives in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AdaptedCase {
    /// Basis `X^i h^j C^k w`, for types with `φ(p)φ(q) = 0`.
    Degenerate,
    /// Basis `h^i f^j C^k w`, for types with `φ(p)φ(q) ≠ 0`.
    Nondegenerate,
}

impl AdaptedCase {
    pub fn for_class(class: PhiClass) -> Result<Self, Error> {
        match class {
            PhiClass::Zero => Err(Error::ZeroPhi),
            PhiClass::PZero | PhiClass::QZero => Ok(AdaptedCase::Degenerate),
            PhiClass::Nondegenerate => Ok(AdaptedCase::Nondegenerate),
        }
    }
}

/// Element of `M_φ` in the type-adapted basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdaptedElem {
    phi: WhittakerType,
    case: AdaptedCase,
    terms: BTreeMap<[u32; 3], Rat>,
}

impl AdaptedElem {
    pub fn zero(phi: WhittakerType) -> Result<Self, Error> {
        let case = AdaptedCase::for_class(phi.class())?;
        Ok(AdaptedElem { phi, case, terms: BTreeMap::new() })
    }

    pub fn from_terms<I>(phi: WhittakerType, terms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = ([u32; 3], Rat)>,
    {
        let mut a = AdaptedElem::zero(phi)?;
        for (t, c) in terms {
            a.add_term(t, c);
        }
        Ok(a)
    }

    pub fn phi(&self) -> &WhittakerType {
        &self.phi
    }

    pub fn case(&self) -> AdaptedCase {
        self.case
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t: &[u32; 3]) -> Rat {
        self.terms.get(t).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, t: [u32; 3], c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    /// Highest exponent in the first basis slot (`X` or `h`).
    pub fn max_first(&self) -> u32 {
        self.terms.keys().map(|t| t[0]).max().unwrap_or(0)
    }

    /// Highest exponent in the second basis slot (`h` or `f`).
    pub fn max_second(&self) -> u32 {
        self.terms.keys().map(|t| t[1]).max().unwrap_or(0)
    }

    /// Highest `C`-exponent.
    pub fn max_c(&self) -> u32 {
        self.terms.keys().map(|t| t[2]).max().unwrap_or(0)
    }

    /// True when the element is a polynomial in `C` applied to `w`.
    pub fn is_c_polynomial(&self) -> bool {
        self.terms.keys().all(|t| t[0] == 0 && t[1] == 0)
    }

    pub fn to_canonical(&self) -> ModElem {
        let mut ctx = BasisCtx::new(self.phi.clone()).expect("nonzero type by construction");
        ctx.to_canonical(self)
    }
}

/// Conversion context between the canonical and adapted bases.
///
/// The adapted basis vectors, written back in canonical coordinates, are
/// triangular with respect to the order "e-exponent, then h+f degree, then
/// h-exponent": the image of the adapted triple `(i,j,k)` has a unique
/// maximal canonical monomial with a nonzero scalar in front (a power of
/// `φ(p)` or `-φ(q)^2`). Conversion into the adapted basis is therefore a
/// finite elimination against computed-on-demand images.
pub(crate) struct BasisCtx {
    phi: WhittakerType,
    case: AdaptedCase,
    class: PhiClass,
    slots: [UEAElem; 3],
    c_pows: Vec<UEAElem>,
    images: HashMap<[u32; 3], (ModElem, [u32; 3], Rat)>,
}

impl BasisCtx {
    pub fn new(phi: WhittakerType) -> Result<Self, Error> {
        let class = phi.class();
        let case = AdaptedCase::for_class(class)?;
        let quad = adapted_elements(&phi)?;
        let slots = match case {
            AdaptedCase::Degenerate => {
                [quad.x, UEAElem::generator(Generator::H), quad.c]
            }
            AdaptedCase::Nondegenerate => [
                UEAElem::generator(Generator::H),
                UEAElem::generator(Generator::F),
                quad.c,
            ],
        };
        Ok(BasisCtx {
            phi,
            case,
            class,
            slots,
            c_pows: vec![UEAElem::one()],
            images: HashMap::new(),
        })
    }

    fn c_pow(&mut self, k: u32) -> UEAElem {
        while self.c_pows.len() <= k as usize {
            let next = &self.c_pows[self.c_pows.len() - 1] * &self.slots[2];
            self.c_pows.push(next);
        }
        self.c_pows[k as usize].clone()
    }

    /// Canonical image of the adapted basis vector at `(i,j,k)`, together
    /// with its maximal canonical key and the coefficient there. Images are
    /// memoized process-wide per Whittaker type: they are pure facts about
    /// the algebra, and conversions ask for the same ones constantly.
    fn image(&mut self, t: [u32; 3]) -> (ModElem, [u32; 3], Rat) {
        if let Some(hit) = self.images.get(&t) {
            return hit.clone();
        }
        type Table = HashMap<(WhittakerType, [u32; 3]), (ModElem, [u32; 3], Rat)>;
        static SHARED: OnceLock<Mutex<Table>> = OnceLock::new();
        let shared = SHARED.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = shared.lock().unwrap().get(&(self.phi.clone(), t)) {
            self.images.insert(t, hit.clone());
            return hit.clone();
        }

        let mut elem = self.slots[0].pow(t[0]);
        elem = &elem * &self.slots[1].pow(t[1]);
        elem = &elem * &self.c_pow(t[2]);

        let mut img = ModElem::zero(self.phi.clone());
        for (m, c) in elem.terms() {
            debug_assert_eq!(
                m.exp(Generator::P) + m.exp(Generator::Q) + m.exp(Generator::Z),
                0,
                "adapted basis words stay inside sl2"
            );
            img.add_term(
                [m.exp(Generator::E), m.exp(Generator::H), m.exp(Generator::F)],
                c.clone(),
            );
        }
        let key = max_key(&img).expect("basis image is nonzero");
        let lead = img.coeff(&key);
        let entry = (img, key, lead);
        self.images.insert(t, entry.clone());
        shared
            .lock()
            .unwrap()
            .insert((self.phi.clone(), t), entry.clone());
        entry
    }

    /// Which adapted triple eliminates the canonical key `(a,b,c)`.
    fn adapted_for_key(&self, key: [u32; 3]) -> [u32; 3] {
        match self.class {
            PhiClass::QZero => key,
            PhiClass::PZero => [key[2], key[1], key[0]],
            PhiClass::Nondegenerate => [key[1], key[2], key[0]],
            PhiClass::Zero => unreachable!("rejected at construction"),
        }
    }

    pub fn to_adapted(&mut self, v: &ModElem) -> AdaptedElem {
        assert_eq!(v.phi, self.phi, "Whittaker type mismatch");
        let mut rest = v.clone();
        let mut out = AdaptedElem {
            phi: self.phi.clone(),
            case: self.case,
            terms: BTreeMap::new(),
        };
        while let Some(key) = max_key(&rest) {
            let t = self.adapted_for_key(key);
            let (img, lead_key, lead) = self.image(t);
            assert_eq!(lead_key, key, "adapted basis lost triangularity");
            let coef = rest.coeff(&key) / lead;
            rest.sub_assign(&img.scale(&coef));
            out.add_term(t, coef);
        }
        out
    }

    pub fn to_canonical(&mut self, a: &AdaptedElem) -> ModElem {
        assert_eq!(a.phi, self.phi, "Whittaker type mismatch");
        assert_eq!(a.case, self.case);
        let mut out = ModElem::zero(self.phi.clone());
        for (t, c) in a.terms() {
            let (img, _, _) = self.image(*t);
            out.add_assign(&img.scale(c));
        }
        out
    }
}

/// Elimination order on canonical monomials: e-exponent, then the combined
/// h+f degree, then the h-exponent.
fn key_rank(t: &[u32; 3]) -> (u32, u32, u32) {
    (t[0], t[1] + t[2], t[1])
}

fn max_key(v: &ModElem) -> Option<[u32; 3]> {
    v.terms.keys().max_by_key(|t| key_rank(t)).copied()
}

/// All canonical triples of total degree at most `max_deg`, in a fixed
/// deterministic order (by degree, then lexicographic).
pub fn triples_up_to(max_deg: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for d in 0..=max_deg {
        for i in 0..=d {
            for j in 0..=(d - i) {
                out.push([i, j, d - i - j]);
            }
        }
    }
    out
}

/// Exact basis of the quasi-Whittaker vectors of degree at most `max_deg`,
/// found as the nullspace of the two shifted Heisenberg actions on the
/// truncated module. The truncation is exact because `p` and `q` never raise
/// the canonical degree.
pub fn qw_vector_basis(phi: &WhittakerType, max_deg: u32) -> Result<Vec<ModElem>, Error> {
    if phi.is_zero() {
        return Err(Error::ZeroPhi);
    }
    let basis = triples_up_to(max_deg);
    let index: HashMap<[u32; 3], usize> =
        basis.iter().enumerate().map(|(n, t)| (*t, n)).collect();
    let dim = basis.len();
    let mut m = RatMatrix::zero(2 * dim, dim);

    let p = UEAElem::generator(Generator::P);
    let q = UEAElem::generator(Generator::Q);
    for (col, t) in basis.iter().enumerate() {
        let v = ModElem::from_term(phi.clone(), *t, Rat::one());
        let mut pv = act(&p, &v);
        pv.sub_assign(&v.scale(phi.phi_p()));
        for (s, c) in pv.terms() {
            m.set(index[s], col, c.clone());
        }
        let mut qv = act(&q, &v);
        qv.sub_assign(&v.scale(phi.phi_q()));
        for (s, c) in qv.terms() {
            m.set(dim + index[s], col, c.clone());
        }
    }

    let out = m
        .nullspace()
        .into_iter()
        .map(|coords| {
            let mut v = ModElem::zero(phi.clone());
            for (t, c) in basis.iter().zip(coords) {
                v.add_term(*t, c);
            }
            v
        })
        .collect();
    Ok(out)
}

/// The shifted annihilation operators of the adapted machinery.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ShiftOp {
    /// `P₊ - φ(P₊)`; degenerate classes only.
    PPlus,
    /// `P₋ - φ(P₋)`; degenerate classes only.
    PMinus,
    /// `p - φ(p)`.
    PShift,
    /// `q - φ(q)`.
    QShift,
}

/// The operator as an element of the enveloping algebra.
pub fn shift_elem(phi: &WhittakerType, op: ShiftOp) -> Result<UEAElem, Error> {
    let shifted = |base: UEAElem, value: &Rat| {
        &base - &UEAElem::one().scale(value)
    };
    match op {
        ShiftOp::PShift => Ok(shifted(UEAElem::generator(Generator::P), phi.phi_p())),
        ShiftOp::QShift => Ok(shifted(UEAElem::generator(Generator::Q), phi.phi_q())),
        ShiftOp::PPlus | ShiftOp::PMinus => {
            if !phi.class().is_degenerate() {
                return Err(if phi.is_zero() { Error::ZeroPhi } else { Error::WrongCase });
            }
            let quad = adapted_elements(phi)?;
            let base = if op == ShiftOp::PPlus { quad.p_plus } else { quad.p_minus };
            let value = phi.eval(&base);
            Ok(shifted(base, &value))
        }
    }
}

/// Applies the chosen shifted operator `n` times.
pub fn apply_annihilation_power(v: &ModElem, op: ShiftOp, n: u32) -> Result<ModElem, Error> {
    let s = shift_elem(v.phi(), op)?;
    let mut out = v.clone();
    for _ in 0..n {
        out = act(&s, &out);
    }
    Ok(out)
}

/// Size limits for the randomized reduction-lemma suite.
#[derive(Clone, Copy, Debug)]
pub struct LemmaBounds {
    /// Degree bound for random coefficient polynomials in `C`.
    pub poly_deg: u32,
    /// Bound on the structural indices (powers of `X`, `h`, `f`).
    pub idx: u32,
}

impl Default for LemmaBounds {
    fn default() -> Self {
        LemmaBounds { poly_deg: 4, idx: 5 }
    }
}

/// One comparison from the reduction-lemma suite.
#[derive(Clone, Debug)]
pub struct LemmaCheck {
    pub lemma: &'static str,
    pub params: String,
    pub pass: bool,
    /// Rendering of the offending input when the check fails.
    pub witness: Option<String>,
}

/// Outcome of [`verify_reduction_lemmas`].
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub phi: WhittakerType,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn random_poly_coeffs(rng: &mut ChaCha8Rng, deg: u32) -> Vec<Rat> {
    // Small integer coefficients keep exact arithmetic fast.
    (0..=deg).map(|_| Rat::from_int(rng.gen_range(-5..=5))).collect()
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product::<i64>().max(1)
}

/// Checks the annihilation and reduction identities of the adapted machinery
/// against their closed forms, on random coefficient polynomials drawn from
/// the seeded generator. Which identities run depends on the class of `φ`:
/// the `P±` ladder for degenerate types, the `(p,q)`-shift ladder for
/// nondegenerate ones. Errors on the zero type.
pub fn verify_reduction_lemmas(
    phi: &WhittakerType,
    bounds: &LemmaBounds,
    seed: u64,
) -> Result<LemmaReport, Error> {
    if phi.is_zero() {
        return Err(Error::ZeroPhi);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LemmaReport { phi: phi.clone(), checks: Vec::new() };
    let mut ctx = BasisCtx::new(phi.clone())?;

    // Shared check: every C^k w is a quasi-Whittaker vector.
    for k in 0..=bounds.idx {
        let v = ctx.to_canonical(
            &AdaptedElem::from_terms(phi.clone(), [([0, 0, k], Rat::one())])?,
        );
        let pass = is_qw_vector(&v)?;
        report.checks.push(LemmaCheck {
            lemma: "C^k w is quasi-Whittaker",
            params: format!("k={k}"),
            pass,
            witness: (!pass).then(|| format!("{v:?}")),
        });
    }

    if phi.class().is_degenerate() {
        degenerate_lemmas(phi, bounds, &mut rng, &mut ctx, &mut report)?;
    } else {
        nondegenerate_lemmas(phi, bounds, &mut rng, &mut ctx, &mut report)?;
    }
    Ok(report)
}

fn push_check(
    report: &mut LemmaReport,
    lemma: &'static str,
    params: String,
    lhs: &ModElem,
    rhs: &ModElem,
) {
    let pass = lhs == rhs;
    report.checks.push(LemmaCheck {
        lemma,
        params,
        pass,
        witness: (!pass).then(|| format!("lhs={lhs:?} rhs={rhs:?}")),
    });
}

fn degenerate_lemmas(
    phi: &WhittakerType,
    bounds: &LemmaBounds,
    rng: &mut ChaCha8Rng,
    ctx: &mut BasisCtx,
    report: &mut LemmaReport,
) -> Result<(), Error> {
    let quad = adapted_elements(phi)?;
    let p_plus_shift = shift_elem(phi, ShiftOp::PPlus)?;
    let p_minus_shift = shift_elem(phi, ShiftOp::PMinus)?;
    let phi_minus = phi.eval(&quad.p_minus);
    // (-1)^(δ_{φ(p),0}+1) — the sign alternation of the h-ladder.
    let ladder_sign = if phi.phi_p().is_zero() { 1i64 } else { -1i64 };

    // Operator identity (P₊ - φ(P₊)) X^i = X^i P₊ - i X^{i-1} P₋ in the
    // algebra itself (φ(P₊) = 0 in the degenerate classes).
    for i in 1..=bounds.idx {
        let lhs = &p_plus_shift * &quad.x.pow(i);
        let mut rhs = &quad.x.pow(i) * &quad.p_plus;
        rhs = &rhs
            - &(&quad.x.pow(i - 1) * &quad.p_minus).scale(&Rat::from_int(i as i64));
        let pass = lhs == rhs;
        report.checks.push(LemmaCheck {
            lemma: "ladder identity on X^i",
            params: format!("i={i}"),
            pass,
            witness: (!pass).then(|| format!("lhs={lhs:?} rhs={rhs:?}")),
        });
    }

    // h-ladder identity applied to quasi-Whittaker vectors b(C)w:
    // (P₋ - φ(P₋)) h^m b(C)w = Σ_{i≥1} C(m,i) (±1)^i h^{m-i} P₋ b(C)w.
    let h = UEAElem::generator(Generator::H);
    for m in 1..=bounds.idx {
        let b = random_poly_coeffs(rng, bounds.poly_deg);
        let bw = ctx.to_canonical(&AdaptedElem::from_terms(
            phi.clone(),
            b.iter().cloned().enumerate().map(|(k, c)| ([0, 0, k as u32], c)),
        )?);
        let hm_bw = ctx.to_canonical(&AdaptedElem::from_terms(
            phi.clone(),
            b.iter().cloned().enumerate().map(|(k, c)| ([0, m, k as u32], c)),
        )?);
        let lhs = act(&p_minus_shift, &hm_bw);
        let mut rhs = ModElem::zero(phi.clone());
        let pm_bw = act(&quad.p_minus, &bw);
        for i in 1..=m {
            let c = Rat::from_int(crate::uea::binomial(m, i))
                * Rat::from_int(ladder_sign).pow(i as i64);
            rhs.add_assign(&act(&h.pow(m - i), &pm_bw).scale(&c));
        }
        push_check(report, "h-ladder on b(C)w", format!("m={m}"), &lhs, &rhs);
    }

    // Full X-reduction, first closed form:
    // (P₊-φ(P₊))^n x = (-1)^n n! Σ_j P₋^n h^j a_{nj}(C) w.
    for n in 1..=bounds.idx {
        let m = rng.gen_range(0..=bounds.idx.min(3));
        let mut x = AdaptedElem::zero(phi.clone())?;
        let mut top_rows: Vec<Vec<Rat>> = Vec::new();
        for i in 0..=n {
            for j in 0..=m {
                let a = random_poly_coeffs(rng, bounds.poly_deg);
                for (k, c) in a.iter().enumerate() {
                    x.add_term([i, j, k as u32], c.clone());
                }
                if i == n {
                    top_rows.push(a);
                }
            }
        }
        let x_canon = ctx.to_canonical(&x);
        let mut lhs = x_canon.clone();
        for _ in 0..n {
            lhs = act(&p_plus_shift, &lhs);
        }

        let sign = Rat::from_int(if n % 2 == 0 { 1 } else { -1 })
            * Rat::from_int(factorial(n));
        let mut rhs = ModElem::zero(phi.clone());
        let p_minus_n = quad.p_minus.pow(n);
        for (j, a) in top_rows.iter().enumerate() {
            let hja = ctx.to_canonical(&AdaptedElem::from_terms(
                phi.clone(),
                a.iter().cloned().enumerate().map(|(k, c)| ([0, j as u32, k as u32], c)),
            )?);
            rhs.add_assign(&act(&p_minus_n, &hja).scale(&sign));
        }
        push_check(
            report,
            "X-reduction, ladder form",
            format!("n={n} m={m}"),
            &lhs,
            &rhs,
        );

        // Second closed form, shape only: the result is supported on
        // X-degree zero with h-degree at most m, and the scalar prefactor
        // (-1)^n n! (φ(p)+φ(q))^n is nonzero.
        let adapted = ctx.to_adapted(&lhs);
        let factor = &sign * &(phi.phi_p() + phi.phi_q()).pow(n as i64);
        let shape_ok =
            adapted.max_first() == 0 && adapted.max_second() <= m && !factor.is_zero();
        report.checks.push(LemmaCheck {
            lemma: "X-reduction, scalar shape",
            params: format!("n={n} m={m}"),
            pass: shape_ok,
            witness: (!shape_ok).then(|| format!("{adapted:?}")),
        });
    }

    // h-reduction closed form on h^t b(C)w: zero for s > t, and the scalar
    // (φ(p)+φ(q))^t (±1)^t t! for s = t.
    for t in 0..=bounds.idx {
        let b = random_poly_coeffs(rng, bounds.poly_deg);
        let make = |ctx: &mut BasisCtx, shift: u32| -> Result<ModElem, Error> {
            Ok(ctx.to_canonical(&AdaptedElem::from_terms(
                phi.clone(),
                b.iter().cloned().enumerate().map(|(k, c)| ([0, shift, k as u32], c)),
            )?))
        };
        let htb = make(ctx, t)?;
        let mut s_eq = htb.clone();
        for _ in 0..t {
            s_eq = act(&p_minus_shift, &s_eq);
        }
        let scalar = phi_minus.pow(t as i64)
            * Rat::from_int(ladder_sign).pow(t as i64)
            * Rat::from_int(factorial(t));
        let expected = make(ctx, 0)?.scale(&scalar);
        push_check(report, "h-reduction at s = t", format!("t={t}"), &s_eq, &expected);

        let overshoot = act(&p_minus_shift, &s_eq);
        let zero = ModElem::zero(phi.clone());
        push_check(
            report,
            "h-reduction vanishes for s > t",
            format!("s={} t={t}", t + 1),
            &overshoot,
            &zero,
        );
    }

    // Annihilation facts behind the ladder: (P₊-φ(P₊)) h^k C^i w = 0 and
    // (P₋-φ(P₋)) C^k w = 0.
    for k in 0..=bounds.idx {
        for i in 0..=bounds.idx {
            let v = ctx.to_canonical(&AdaptedElem::from_terms(
                phi.clone(),
                [([0, k, i], Rat::one())],
            )?);
            let hit = act(&p_plus_shift, &v);
            let zero = ModElem::zero(phi.clone());
            push_check(
                report,
                "P+ annihilates h^k C^i w",
                format!("k={k} i={i}"),
                &hit,
                &zero,
            );
        }
        let v = ctx.to_canonical(&AdaptedElem::from_terms(
            phi.clone(),
            [([0, 0, k], Rat::one())],
        )?);
        let hit = act(&p_minus_shift, &v);
        let zero = ModElem::zero(phi.clone());
        push_check(report, "P- annihilates C^k w", format!("k={k}"), &hit, &zero);
    }
    Ok(())
}

fn nondegenerate_lemmas(
    phi: &WhittakerType,
    bounds: &LemmaBounds,
    rng: &mut ChaCha8Rng,
    ctx: &mut BasisCtx,
    report: &mut LemmaReport,
) -> Result<(), Error> {
    let q_shift = shift_elem(phi, ShiftOp::QShift)?;
    let p_shift = shift_elem(phi, ShiftOp::PShift)?;

    // h-reduction: (q-φ(q))^s (h^t Σ_i f^i a_i(C) w) is zero for s > t and
    // t! φ(q)^t Σ_i f^i a_i(C) w for s = t.
    for t in 0..=bounds.idx {
        let m = rng.gen_range(0..=bounds.idx.min(3));
        let coeffs: Vec<Vec<Rat>> =
            (0..=m).map(|_| random_poly_coeffs(rng, bounds.poly_deg)).collect();
        let make = |ctx: &mut BasisCtx, h_deg: u32| -> Result<ModElem, Error> {
            let mut a = AdaptedElem::zero(phi.clone())?;
            for (i, poly) in coeffs.iter().enumerate() {
                for (k, c) in poly.iter().enumerate() {
                    a.add_term([h_deg, i as u32, k as u32], c.clone());
                }
            }
            Ok(ctx.to_canonical(&a))
        };
        let start = make(ctx, t)?;
        let mut s_eq = start;
        for _ in 0..t {
            s_eq = act(&q_shift, &s_eq);
        }
        let scalar = Rat::from_int(factorial(t)) * phi.phi_q().pow(t as i64);
        let expected = make(ctx, 0)?.scale(&scalar);
        push_check(
            report,
            "h-reduction at s = t",
            format!("t={t} m={m}"),
            &s_eq,
            &expected,
        );

        let overshoot = act(&q_shift, &s_eq);
        let zero = ModElem::zero(phi.clone());
        push_check(
            report,
            "h-reduction vanishes for s > t",
            format!("s={} t={t}", t + 1),
            &overshoot,
            &zero,
        );
    }

    // f-reduction: (p-φ(p))^m (Σ_{i≤m} f^i a_i(C) w) = (-1)^m m! φ(q)^m a_m(C) w.
    for m in 0..=bounds.idx {
        let coeffs: Vec<Vec<Rat>> =
            (0..=m).map(|_| random_poly_coeffs(rng, bounds.poly_deg)).collect();
        let mut a = AdaptedElem::zero(phi.clone())?;
        for (i, poly) in coeffs.iter().enumerate() {
            for (k, c) in poly.iter().enumerate() {
                a.add_term([0, i as u32, k as u32], c.clone());
            }
        }
        let mut lhs = ctx.to_canonical(&a);
        for _ in 0..m {
            lhs = act(&p_shift, &lhs);
        }
        let scalar = Rat::from_int(if m % 2 == 0 { 1 } else { -1 })
            * Rat::from_int(factorial(m))
            * phi.phi_q().pow(m as i64);
        let top = &coeffs[m as usize];
        let rhs = ctx
            .to_canonical(&AdaptedElem::from_terms(
                phi.clone(),
                top.iter().cloned().enumerate().map(|(k, c)| ([0, 0, k as u32], c)),
            )?)
            .scale(&scalar);
        push_check(report, "f-reduction closed form", format!("m={m}"), &lhs, &rhs);
    }
    Ok(())
}

impl fmt::Display for ModElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, c) in self.terms.iter().rev() {
            let word = ["e", "h", "f"]
                .iter()
                .zip(t)
                .filter(|(_, &e)| e > 0)
                .map(|(g, &e)| if e == 1 { g.to_string() } else { format!("{g}^{e}") })
                .collect::<Vec<_>>()
                .join("*");
            let mon = if word.is_empty() { "w".to_string() } else { format!("{word}*w") };
            if first {
                first = false;
                if c.is_one() {
                    write!(f, "{mon}")?;
                } else {
                    write!(f, "{c}*{mon}")?;
                }
            } else {
                let mag = c.abs();
                let sep = if c.is_negative() { " - " } else { " + " };
                if mag.is_one() {
                    write!(f, "{sep}{mon}")?;
                } else {
                    write!(f, "{sep}{mag}*{mon}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uea::{casimir, word};

    fn phi_10() -> WhittakerType {
        WhittakerType::from_ints(1, 0)
    }

    fn phi_23() -> WhittakerType {
        WhittakerType::from_ints(2, 3)
    }

    fn gen_elem(s: &str) -> UEAElem {
        normalize(&word(s), &Rat::one())
    }

    #[test]
    fn action_on_cyclic_vector() {
        let w = ModElem::cyclic(phi_10());
        assert_eq!(act(&gen_elem("p"), &w), w.scale(&Rat::one()));
        assert!(act(&gen_elem("q"), &w).is_zero());
        assert!(act(&gen_elem("z"), &w).is_zero());
    }

    #[test]
    fn action_uses_reordering() {
        // p·(f w) = φ(p) f w - φ(q) w
        let phi = WhittakerType::from_ints(2, 3);
        let fw = ModElem::from_term(phi.clone(), [0, 0, 1], Rat::one());
        let got = act(&gen_elem("p"), &fw);
        let mut expected = fw.scale(&Rat::from_int(2));
        expected.add_term([0, 0, 0], Rat::from_int(-3));
        assert_eq!(got, expected);
    }

    #[test]
    fn casimir_acts_like_adapted_c_on_w() {
        for phi in [phi_10(), WhittakerType::from_ints(0, 1), phi_23()] {
            let w = ModElem::cyclic(phi.clone());
            let got = act(&casimir(), &w);
            let mut expected = ModElem::zero(phi.clone());
            expected.add_term([0, 0, 1], phi.phi_p().pow(2));
            expected.add_term([1, 0, 0], -&phi.phi_q().pow(2));
            expected.add_term([0, 1, 0], -&(phi.phi_p() * phi.phi_q()));
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn z_kills_everything() {
        let phi = phi_23();
        let v = ModElem::from_term(phi.clone(), [2, 1, 3], Rat::from_pair(5, 2));
        assert!(act(&gen_elem("z"), &v).is_zero());
    }

    #[test]
    fn module_axiom_on_samples() {
        let phi = phi_23();
        let v = ModElem::from_term(phi.clone(), [1, 1, 1], Rat::one());
        for (a, b) in [("pf", "qe"), ("h", "ef"), ("qq", "pe")] {
            let (a, b) = (gen_elem(a), gen_elem(b));
            assert_eq!(act(&(&a * &b), &v), act(&a, &act(&b, &v)));
        }
        assert_eq!(act(&UEAElem::one(), &v), v);
    }

    #[test]
    fn qw_vector_detection() {
        let w = ModElem::cyclic(phi_10());
        assert!(is_qw_vector(&w).unwrap());
        // C^2 w + 3 C w with C = f for φ=(1,0)
        let mut v = ModElem::from_term(phi_10(), [0, 0, 2], Rat::one());
        v.add_term([0, 0, 1], Rat::from_int(3));
        assert!(is_qw_vector(&v).unwrap());
        // h w is not one: (p-φ(p)) h w = -φ(p) w
        let hw = ModElem::from_term(phi_10(), [0, 1, 0], Rat::one());
        assert!(!is_qw_vector(&hw).unwrap());
        assert_eq!(is_qw_vector(&ModElem::zero(phi_10())), Err(Error::ZeroVector));
    }

    #[test]
    fn adapted_round_trip_diagonal_case() {
        // φ=(1,0): C = f, so the adapted triple (0,0,1) is exactly f w.
        let a = AdaptedElem::from_terms(phi_10(), [([0, 0, 1], Rat::one())]).unwrap();
        let canon = a.to_canonical();
        assert_eq!(canon, ModElem::from_term(phi_10(), [0, 0, 1], Rat::one()));
        assert_eq!(canon.to_adapted().unwrap(), a);
    }

    #[test]
    fn adapted_round_trip_p_zero_case() {
        // φ=(0,1): C = -e, so (0,0,1) maps to -e w.
        let phi = WhittakerType::from_ints(0, 1);
        let a = AdaptedElem::from_terms(phi.clone(), [([0, 0, 1], Rat::one())]).unwrap();
        let canon = a.to_canonical();
        assert_eq!(canon, ModElem::from_term(phi.clone(), [1, 0, 0], Rat::from_int(-1)));
        assert_eq!(canon.to_adapted().unwrap(), a);
    }

    #[test]
    fn adapted_round_trip_on_mixed_elements() {
        for phi in [phi_10(), WhittakerType::from_ints(0, 1), phi_23()] {
            let mut v = ModElem::zero(phi.clone());
            v.add_term([2, 1, 0], Rat::from_pair(3, 2));
            v.add_term([0, 2, 1], Rat::from_int(-1));
            v.add_term([1, 1, 1], Rat::from_int(4));
            v.add_term([0, 0, 0], Rat::from_pair(-2, 7));
            let a = v.to_adapted().unwrap();
            assert_eq!(a.to_canonical(), v);
        }
    }

    #[test]
    fn zero_phi_has_no_adapted_basis() {
        let v = ModElem::cyclic(WhittakerType::from_ints(0, 0));
        assert_eq!(v.to_adapted(), Err(Error::ZeroPhi));
    }

    #[test]
    fn qw_basis_dimensions_and_membership() {
        // φ=(1,0): C = f, so the degree-2 solutions are exactly w, fw, f²w.
        let basis = qw_vector_basis(&phi_10(), 2).unwrap();
        assert_eq!(
            basis,
            vec![
                ModElem::cyclic(phi_10()),
                ModElem::from_term(phi_10(), [0, 0, 1], Rat::one()),
                ModElem::from_term(phi_10(), [0, 0, 2], Rat::one()),
            ]
        );
        for v in &basis {
            assert!(is_qw_vector(v).unwrap());
            let a = v.to_adapted().unwrap();
            assert!(a.is_c_polynomial());
        }

        // φ=(2,3), degree 1: the line C·w with C = 4f - 9e - 6h, plus w.
        let basis = qw_vector_basis(&phi_23(), 1).unwrap();
        let mut c = ModElem::zero(phi_23());
        c.add_term([0, 0, 1], Rat::from_int(4));
        c.add_term([1, 0, 0], Rat::from_int(-9));
        c.add_term([0, 1, 0], Rat::from_int(-6));
        let w = ModElem::cyclic(phi_23());
        assert_eq!(basis, vec![w.clone(), c]);

        assert_eq!(qw_vector_basis(&phi_23(), 0).unwrap(), vec![w]);
    }

    #[test]
    fn annihilation_power_examples() {
        // φ=(1,0), v = X w = e w: one application of P₊-φ(P₊) gives -w.
        let v = ModElem::from_term(phi_10(), [1, 0, 0], Rat::one());
        let got = apply_annihilation_power(&v, ShiftOp::PPlus, 1).unwrap();
        assert_eq!(got, ModElem::cyclic(phi_10()).scale(&Rat::from_int(-1)));

        // n = 0 is the identity.
        assert_eq!(apply_annihilation_power(&v, ShiftOp::PMinus, 0).unwrap(), v);

        // φ=(1,1), v = f a(C) w with a = 1: (p-φ(p)) v = -φ(q) a(C) w = -w.
        let phi = WhittakerType::from_ints(1, 1);
        let a = AdaptedElem::from_terms(phi.clone(), [([0, 1, 0], Rat::one())]).unwrap();
        let v = a.to_canonical();
        let got = apply_annihilation_power(&v, ShiftOp::PShift, 1).unwrap();
        assert_eq!(got, ModElem::cyclic(phi).scale(&Rat::from_int(-1)));
    }

    #[test]
    fn p_ladder_rejected_for_nondegenerate_type() {
        let v = ModElem::cyclic(phi_23());
        assert_eq!(
            apply_annihilation_power(&v, ShiftOp::PPlus, 1),
            Err(Error::WrongCase)
        );
    }

    #[test]
    fn h_ladder_example() {
        // φ=(1,0), v = h b(C) w with b = 1: (P₋-φ(P₋)) v = -b(C) w.
        let v = ModElem::from_term(phi_10(), [0, 1, 0], Rat::one());
        let got = apply_annihilation_power(&v, ShiftOp::PMinus, 1).unwrap();
        assert_eq!(got, ModElem::cyclic(phi_10()).scale(&Rat::from_int(-1)));
    }

    #[test]
    fn reduction_lemma_suites_pass() {
        for phi in [phi_10(), WhittakerType::from_ints(0, 1), phi_23()] {
            let report =
                verify_reduction_lemmas(&phi, &LemmaBounds { poly_deg: 2, idx: 3 }, 7).unwrap();
            assert!(
                report.all_pass(),
                "failures: {:?}",
                report.failures().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn filtration_of_heisenberg_actions() {
        let phi = phi_23();
        let v = ModElem::from_term(phi.clone(), [2, 2, 1], Rat::one());
        for g in ["p", "q", "z"] {
            let out = act(&gen_elem(g), &v);
            assert!(out.degree().unwrap_or(0) <= v.degree().unwrap());
        }
        for g in ["e", "h", "f"] {
            let out = act(&gen_elem(g), &v);
            assert!(out.degree().unwrap_or(0) <= v.degree().unwrap() + 1);
        }
    }
}
