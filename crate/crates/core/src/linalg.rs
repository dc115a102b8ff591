//! Exact linear algebra over the rationals.
//!
//! The nullspace routine clears denominators and runs fraction-free
//! (Bareiss-style) elimination on integers, which keeps intermediate entries
//! as minors of the input instead of letting fractions compound. Everything
//! here is exact; results are normalized so output is deterministic.

use num::bigint::BigInt;
use num::Integer;
use num::{One, Signed, Zero};

use crate::rat::Rat;

/// Dense matrix of exact rationals, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    /// Exact basis of the right nullspace, empty when the matrix is
    /// injective. Each basis vector is scaled to coprime integers with the
    /// first nonzero entry positive.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        if self.cols == 0 {
            return vec![];
        }
        // Row-scale to integers; scaling rows does not change the nullspace.
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| {
                let mut lcm = BigInt::one();
                for c in 0..self.cols {
                    lcm = lcm.lcm(self.get(r, c).denom());
                }
                (0..self.cols)
                    .map(|c| {
                        let e = self.get(r, c);
                        e.numer() * (&lcm / e.denom())
                    })
                    .collect()
            })
            .collect();

        // Fraction-free forward elimination with column pivoting.
        let mut prev = BigInt::one();
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            for i in row + 1..self.rows {
                for j in col + 1..self.cols {
                    let t = &m[row][col] * &m[i][j] - &m[i][col] * &m[row][j];
                    m[i][j] = t / &prev; // exact by the Sylvester identity
                }
                m[i][col] = BigInt::zero();
            }
            prev = m[row][col].clone();
            pivot_cols.push(col);
            row += 1;
        }

        let rank = pivot_cols.len();
        let free_cols: Vec<usize> =
            (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();

        let mut basis = Vec::with_capacity(free_cols.len());
        for &fc in &free_cols {
            let mut v = vec![Rat::zero(); self.cols];
            v[fc] = Rat::one();
            for r in (0..rank).rev() {
                let pc = pivot_cols[r];
                let mut sum = Rat::zero();
                for j in pc + 1..self.cols {
                    if !v[j].is_zero() && !m[r][j].is_zero() {
                        sum += Rat::new(m[r][j].clone(), BigInt::one()) * &v[j];
                    }
                }
                v[pc] = -sum / Rat::new(m[r][pc].clone(), BigInt::one());
            }
            normalize_vector(&mut v);
            basis.push(v);
        }
        basis
    }

    /// Rank by plain rational Gaussian elimination, independent of the
    /// fraction-free path used by `nullspace`.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<Rat>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).clone()).collect())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let inv = m[rank][col].inverse();
            for j in col..self.cols {
                m[rank][j] = &m[rank][j] * &inv;
            }
            for i in rank + 1..self.rows {
                if m[i][col].is_zero() {
                    continue;
                }
                let f = m[i][col].clone();
                for j in col..self.cols {
                    let t = &f * &m[rank][j];
                    m[i][j] = &m[i][j] - &t;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Matrix-vector product, for verifying nullspace output in tests.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut sum = Rat::zero();
                for c in 0..self.cols {
                    if !v[c].is_zero() {
                        sum += self.get(r, c) * &v[c];
                    }
                }
                sum
            })
            .collect()
    }
}

/// Clears denominators, divides out the content, and makes the first
/// nonzero entry positive.
fn normalize_vector(v: &mut [Rat]) {
    let mut lcm = BigInt::one();
    for e in v.iter() {
        lcm = lcm.lcm(e.denom());
    }
    let mut nums: Vec<BigInt> = v
        .iter()
        .map(|e| e.numer() * (&lcm / e.denom()))
        .collect();
    let mut content = BigInt::zero();
    for n in &nums {
        content = content.gcd(n);
    }
    if content.is_zero() {
        return;
    }
    if let Some(first) = nums.iter().find(|n| !n.is_zero()) {
        if first.is_negative() {
            content = -content;
        }
    }
    for (e, n) in v.iter_mut().zip(nums.iter_mut()) {
        *e = Rat::new(&*n / &content, BigInt::one());
    }
}

/// Incrementally maintained row space in reduced echelon form. Used for
/// closure computations: insert vectors, query rank and membership.
#[derive(Clone, Debug, Default)]
pub struct RowSpace {
    // Rows with pairwise distinct leading columns, each leading with 1.
    rows: Vec<Vec<Rat>>,
}

impl RowSpace {
    pub fn new() -> Self {
        RowSpace::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    fn reduce(&self, mut v: Vec<Rat>) -> Vec<Rat> {
        for row in &self.rows {
            let lead = row.iter().position(|c| !c.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let f = v[lead].clone();
                for (a, b) in v.iter_mut().zip(row) {
                    let t = &f * b;
                    *a = &*a - &t;
                }
            }
        }
        v
    }

    /// Inserts a vector; returns true when it enlarges the span.
    pub fn insert(&mut self, v: Vec<Rat>) -> bool {
        let v = self.reduce(v);
        let Some(lead) = v.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = v[lead].inverse();
        let v: Vec<Rat> = v.iter().map(|c| c * &inv).collect();
        // Back-substitute to keep the basis fully reduced.
        for row in self.rows.iter_mut() {
            if !row[lead].is_zero() {
                let f = row[lead].clone();
                for (a, b) in row.iter_mut().zip(&v) {
                    let t = &f * b;
                    *a = &*a - &t;
                }
            }
        }
        let pos = self
            .rows
            .partition_point(|r| r.iter().position(|c| !c.is_zero()).unwrap() < lead);
        self.rows.insert(pos, v);
        true
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v.to_vec()).iter().all(|c| c.is_zero())
    }
}
