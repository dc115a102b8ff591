//! Dense univariate polynomials over [`Rat`].
//!
//! Degrees in this crate stay small (well under 30), so coefficients are
//! stored densely, lowest degree first, with no trailing zeros. Besides the
//! ring operations the module provides exact Euclidean division, gcds, and
//! Bezout certificates for coprime factor lists.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;
use crate::rat::Rat;

/// Univariate polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    /// The monic linear factor `x - root`.
    pub fn linear(root: &Rat) -> Self {
        Poly::from_coeffs(vec![-root, Rat::one()])
    }

    /// Builds from low-to-high coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn make_monic(&self) -> Self {
        match self.leading_coeff() {
            None => Poly::zero(),
            Some(lc) => self.scale(&lc.inverse()),
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn pow(&self, exp: usize) -> Self {
        let mut acc = Poly::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division: returns `(quotient, remainder)` with
    /// `self = q * divisor + r` and `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly), Error> {
        let d_deg = divisor.degree().ok_or(Error::DivisionByZeroPoly)?;
        let d_lc = divisor.leading_coeff().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(d_deg)];
        while rem.len() > d_deg {
            let r_deg = rem.len() - 1;
            let factor = rem.last().unwrap() / &d_lc;
            let shift = r_deg - d_deg;
            for (k, dc) in divisor.coeffs.iter().enumerate() {
                let t = &factor * dc;
                rem[shift + k] = &rem[shift + k] - &t;
            }
            quot[shift] = factor;
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divmod(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Extended Euclid: returns `(g, s, t)` with `s*self + t*other = g`
    /// and `g` the monic gcd.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1).expect("nonzero divisor");
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match r0.leading_coeff() {
            None => (Poly::zero(), Poly::zero(), Poly::zero()),
            Some(lc) => {
                let inv = lc.inverse();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }
}

/// Remainder of `a` modulo `d`; errors when `d = 0`.
pub fn poly_rem(a: &Poly, d: &Poly) -> Result<Poly, Error> {
    Ok(a.divmod(d)?.1)
}

/// Bezout certificate for a pairwise-coprime factor list: returns
/// `r_1..r_k` with `sum r_i * factor_i = 1` and `deg r_i` below the degree
/// of the complementary product. The identity is re-verified by direct
/// polynomial arithmetic before returning.
pub fn poly_bezout(factors: &[Poly]) -> Result<Vec<Poly>, Error> {
    if factors.is_empty() {
        return Err(Error::EmptyFactors);
    }
    if factors.iter().any(|f| f.is_zero()) {
        return Err(Error::DivisionByZeroPoly);
    }
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            if !factors[i].gcd(&factors[j]).is_constant() {
                return Err(Error::NotCoprime);
            }
        }
    }
    bezout_setwise(factors)
}

/// Bezout certificate requiring only that the collective gcd is 1. This is
/// what direct-sum decompositions need for three or more roots, where the
/// complementary products share factors pairwise.
pub fn bezout_setwise(factors: &[Poly]) -> Result<Vec<Poly>, Error> {
    if factors.is_empty() {
        return Err(Error::EmptyFactors);
    }
    let k = factors.len();
    if k == 1 {
        // sum r*f = 1 with a single factor forces f constant.
        let f = &factors[0];
        if !f.is_constant() || f.is_zero() {
            return Err(Error::DegenerateBezout);
        }
        return Ok(vec![Poly::constant(f.coeff(0).inverse())]);
    }

    // Fold extended Euclid across the list: keep g = gcd so far together
    // with cofactors expressing g in terms of the factors seen.
    let mut g = factors[0].clone();
    let mut cof: Vec<Poly> = vec![Poly::one()];
    for f in &factors[1..] {
        let (g2, s, t) = g.ext_gcd(f);
        for c in cof.iter_mut() {
            *c = &*c * &s;
        }
        cof.push(t);
        g = g2;
    }
    if !g.is_constant() || g.is_zero() {
        return Err(Error::NotCoprime);
    }
    let inv = g.coeff(0).inverse();
    for c in cof.iter_mut() {
        *c = c.scale(&inv);
    }

    // Reduce each cofactor modulo the complementary product; degree
    // counting shows the corrected sum is still exactly 1.
    for i in 0..k {
        let mut comp = Poly::one();
        for (j, f) in factors.iter().enumerate() {
            if j != i {
                comp = &comp * f;
            }
        }
        if !comp.is_constant() {
            cof[i] = poly_rem(&cof[i], &comp)?;
        }
    }

    let mut check = Poly::zero();
    for (r, f) in cof.iter().zip(factors) {
        check = &check + &(r * f);
    }
    assert_eq!(check, Poly::one(), "Bezout certificate failed self-check");
    Ok(cof)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        Poly::from_coeffs(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - rhs.coeff(k));
        }
        Poly::from_coeffs(out)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    #[test]
    fn rem_evaluates_at_root() {
        // x^2 mod (x-1) = 1
        let r = poly_rem(&p(&[0, 0, 1]), &p(&[-1, 1])).unwrap();
        assert_eq!(r, p(&[1]));
    }

    #[test]
    fn rem_of_self_is_zero() {
        let r = poly_rem(&Poly::x(), &Poly::x()).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn rem_by_quadratic() {
        // x^3 + 1 mod (x^2 + 1) = -x + 1, worked by long division
        let r = poly_rem(&p(&[1, 0, 0, 1]), &p(&[1, 0, 1])).unwrap();
        assert_eq!(r, p(&[1, -1]));
    }

    #[test]
    fn rem_by_zero_fails() {
        assert_eq!(
            poly_rem(&Poly::x(), &Poly::zero()),
            Err(Error::DivisionByZeroPoly)
        );
    }

    #[test]
    fn divmod_reconstructs() {
        let a = p(&[3, -2, 0, 5, 1]);
        let d = p(&[1, 2, 1]);
        let (q, r) = a.divmod(&d).unwrap();
        assert_eq!(&(&q * &d) + &r, a);
        assert!(r.degree() < d.degree());
    }

    #[test]
    fn bezout_two_linear_factors() {
        // -(x-2) + (x-1) = 1
        let rs = poly_bezout(&[p(&[-2, 1]), p(&[-1, 1])]).unwrap();
        assert_eq!(rs, vec![p(&[-1]), p(&[1])]);
    }

    #[test]
    fn bezout_symmetric_pair() {
        // -(x-1)/2 + (x+1)/2 = 1
        let rs = poly_bezout(&[p(&[-1, 1]), p(&[1, 1])]).unwrap();
        assert_eq!(
            rs,
            vec![
                Poly::constant(Rat::from_pair(-1, 2)),
                Poly::constant(Rat::from_pair(1, 2))
            ]
        );
    }

    #[test]
    fn bezout_single_nonconstant_factor_fails() {
        let sq = &p(&[-1, 1]) * &p(&[-1, 1]);
        assert_eq!(poly_bezout(&[sq]), Err(Error::DegenerateBezout));
    }

    #[test]
    fn bezout_empty_fails() {
        assert_eq!(poly_bezout(&[]), Err(Error::EmptyFactors));
    }

    #[test]
    fn bezout_rejects_shared_factor() {
        let a = &p(&[-1, 1]) * &p(&[1, 1]);
        let b = &p(&[-1, 1]) * &p(&[2, 1]);
        assert_eq!(poly_bezout(&[a, b]), Err(Error::NotCoprime));
    }

    #[test]
    fn setwise_bezout_with_shared_pairwise_factors() {
        // Complementary products of (x)(x-1)(x+1): pairwise gcds are
        // nonconstant but the collective gcd is 1.
        let f1 = &p(&[-1, 1]) * &p(&[1, 1]);
        let f2 = &p(&[0, 1]) * &p(&[1, 1]);
        let f3 = &p(&[0, 1]) * &p(&[-1, 1]);
        let rs = bezout_setwise(&[f1.clone(), f2.clone(), f3.clone()]).unwrap();
        let mut sum = Poly::zero();
        for (r, f) in rs.iter().zip([&f1, &f2, &f3]) {
            sum = &sum + &(r * f);
        }
        assert_eq!(sum, Poly::one());
    }

    #[test]
    fn display_reads_naturally() {
        assert_eq!(p(&[-1, 0, 1]).to_string(), "x^2 - 1");
        assert_eq!(
            Poly::from_coeffs(vec![Rat::from_pair(1, 2)]).to_string(),
            "1/2"
        );
    }
}
