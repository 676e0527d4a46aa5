//! Polynomials in the per-degree masses `P_0 .. P_{n-1}` with exact
//! rational coefficients, enough to expand the uniform-deletion update by
//! hand and read off its coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_traits::{One, Zero};

use crate::weight::{Exact, Weight};

/// Sparse polynomial; a monomial is its sorted list of variable indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<usize>, Exact>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Exact) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![i], Exact::one());
        p
    }

    fn add_term(&mut self, mono: Vec<usize>, c: Exact) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert_with(Exact::zero);
        *entry += c;
        let zero = entry.is_zero();
        if zero {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn coefficient(&self, mono: &[usize]) -> Exact {
        self.terms.get(mono).cloned().unwrap_or_else(Exact::zero)
    }

    /// Homogeneous part of the given degree.
    pub fn part(&self, degree: usize) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.len() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Rewrites the polynomial using `P_0 + ... + P_{n-1} = 1`: a quadratic
    /// part of the form `(sum_i P_i) * L` is replaced by `L`, constants are
    /// absorbed as `c * sum_i P_i`. Returns the resulting linear
    /// coefficients, or `None` when the quadratic part does not factor.
    pub fn reduce_on_simplex(&self, n: usize) -> Option<Vec<Exact>> {
        if self.degree() > 2 {
            return None;
        }
        // quadratic: c_ii = l_i and c_ij = l_i + l_j for (S)(sum l_j P_j)
        let quad = self.part(2);
        let l: Vec<Exact> = (0..n).map(|i| quad.coefficient(&[i, i])).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if quad.coefficient(&[i, j]) != l[i].clone() + l[j].clone() {
                    return None;
                }
            }
        }
        let c = self.coefficient(&[]);
        Some(
            (0..n)
                .map(|i| self.coefficient(&[i]) + l[i].clone() + c.clone())
                .collect(),
        )
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut m = ma.clone();
                m.extend(mb);
                m.sort_unstable();
                out.add_term(m, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl Mul<Exact> for Poly {
    type Output = Poly;

    fn mul(self, rhs: Exact) -> Poly {
        &self * &Poly::constant(rhs)
    }
}

fn frac(num: usize, den: usize) -> Exact {
    Exact::from_ratio(num as u64, den as u64)
}

/// Update of the mass at `(n-1, k)` after one uniform deletion at size
/// `n`, as a polynomial in the conditional masses `P_j` at size `n`:
///
/// `sum_j P_j [ [j=k] stay_j + [j=k+1] lose_j + q_j r_k ]`
///
/// with `stay_j = (n-1-j)/n`, `lose_j = j/n`, `q_j = 1/n` and
/// `r_k = n/(n-1) [P_k stay_k + P_{k+1} lose_{k+1}]`.
pub fn uniform_deletion_update(n: usize, k: usize) -> Poly {
    assert!(n >= 2 && k + 2 <= n);
    let stay = |j: usize| frac(n - 1 - j, n);
    let lose = |j: usize| frac(j, n);
    let removal = frac(1, n);
    let reassign = (Poly::var(k) * stay(k) + Poly::var(k + 1) * lose(k + 1)) * frac(n, n - 1);
    let mut update = Poly::zero();
    for j in 0..n {
        let mut row = Poly::constant(removal.clone());
        row = &row * &reassign;
        if j == k {
            row = row + Poly::constant(stay(j));
        }
        if j == k + 1 {
            row = row + Poly::constant(lose(j));
        }
        update = update + &Poly::var(j) * &row;
    }
    update
}
