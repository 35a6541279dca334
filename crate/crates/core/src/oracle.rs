//! Independent correctness oracles.
//!
//! Equivalence is decided by exact integer linear algebra on the working
//! graph's Laplacian lattice, and rank by the literal definition: peel off
//! every effective divisor of degree s and ask for an effective equivalent
//! of the remainder. The lattice verdict never consults the chip-firing
//! machinery; as a built-in consistency check, every nonemptiness question
//! is additionally answered by the reduction algorithm and the two answers
//! are compared.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::reduce;
use crate::working::WorkingGraph;

type Matrix = Vec<Vec<BigInt>>;

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// The integer image of the working graph's Laplacian, carried by a Smith
/// normal form with tracked transforms: u * s * v = l and s = p * l * q for
/// unimodular u, v, p, q (q is not stored; p suffices for membership).
pub struct LaplacianLattice {
    n: usize,
    s: Matrix,
    u: Matrix,
    v: Matrix,
    p: Matrix,
}

fn laplacian(wg: &WorkingGraph) -> Matrix {
    let n = wg.node_count();
    let mut l = vec![vec![BigInt::zero(); n]; n];
    for e in wg.edges() {
        l[e.a][e.a] += 1;
        l[e.b][e.b] += 1;
        l[e.a][e.b] -= 1;
        l[e.b][e.a] -= 1;
    }
    l
}

impl LaplacianLattice {
    pub fn new(wg: &WorkingGraph) -> Self {
        let l = laplacian(wg);
        let n = l.len();
        let mut lat = LaplacianLattice {
            n,
            s: l,
            u: identity(n),
            v: identity(n),
            p: identity(n),
        };
        lat.smith();
        lat
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.s.swap(i, j);
        self.p.swap(i, j);
        for row in &mut self.u {
            row.swap(i, j);
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.s {
            row.swap(i, j);
        }
        self.v.swap(i, j);
    }

    /// row i += k * row j on s and p; the inverse column operation on u.
    fn row_add(&mut self, i: usize, j: usize, k: &BigInt) {
        for c in 0..self.n {
            let t = k * &self.s[j][c];
            self.s[i][c] += t;
            let t = k * &self.p[j][c];
            self.p[i][c] += t;
        }
        for r in 0..self.n {
            let t = k * &self.u[r][i];
            self.u[r][j] -= t;
        }
    }

    /// col j += k * col i on s; the inverse row operation on v.
    fn col_add(&mut self, j: usize, i: usize, k: &BigInt) {
        for r in 0..self.n {
            let t = k * &self.s[r][i];
            self.s[r][j] += t;
        }
        for c in 0..self.n {
            let t = k * &self.v[j][c];
            self.v[i][c] -= t;
        }
    }

    fn row_negate(&mut self, i: usize) {
        for c in 0..self.n {
            let t = -&self.s[i][c];
            self.s[i][c] = t;
            let t = -&self.p[i][c];
            self.p[i][c] = t;
        }
        for r in 0..self.n {
            let t = -&self.u[r][i];
            self.u[r][i] = t;
        }
    }

    fn smith(&mut self) {
        let n = self.n;
        for t in 0..n {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !self.s[i][j].is_zero()
                        && pivot.map_or(true, |(pi, pj)| {
                            self.s[i][j].abs() < self.s[pi][pj].abs()
                        })
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            self.row_swap(t, pi);
            self.col_swap(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..n {
                    if self.s[i][t].is_zero() {
                        continue;
                    }
                    let q = &self.s[i][t] / &self.s[t][t];
                    if !q.is_zero() {
                        self.row_add(i, t, &-q);
                    }
                    if !self.s[i][t].is_zero() {
                        // the remainder is smaller; promote it to pivot
                        self.row_swap(i, t);
                        dirty = true;
                    }
                }
                if dirty {
                    continue;
                }
                for j in t + 1..n {
                    if self.s[t][j].is_zero() {
                        continue;
                    }
                    let q = &self.s[t][j] / &self.s[t][t];
                    if !q.is_zero() {
                        self.col_add(j, t, &-q);
                    }
                    if !self.s[t][j].is_zero() {
                        self.col_swap(j, t);
                        dirty = true;
                    }
                }
                if dirty {
                    continue;
                }
                // pivot must divide the trailing block for the chain
                'seek: for i in t + 1..n {
                    for j in t + 1..n {
                        if !(&self.s[i][j] % &self.s[t][t]).is_zero() {
                            self.row_add(t, i, &BigInt::one());
                            dirty = true;
                            break 'seek;
                        }
                    }
                }
                if !dirty {
                    break;
                }
            }
        }
        for t in 0..n {
            if self.s[t][t].is_negative() {
                self.row_negate(t);
            }
        }
    }

    /// Elementary divisors on the diagonal.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.n).map(|i| self.s[i][i].clone()).collect()
    }

    fn transform(&self, x: &[i64]) -> Vec<BigInt> {
        self.p
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, &b)| a * b).sum())
            .collect()
    }

    /// Canonical residue of x modulo the lattice; two vectors differ by a
    /// lattice element iff their residues agree.
    fn residue(&self, x: &[i64]) -> Vec<BigInt> {
        self.transform(x)
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                if self.s[i][i].is_zero() {
                    c
                } else {
                    c.mod_floor(&self.s[i][i])
                }
            })
            .collect()
    }

    /// Whether x lies in the integer image of the Laplacian.
    pub fn contains(&self, x: &[i64]) -> bool {
        assert_eq!(x.len(), self.n, "vector length must match the node count");
        self.transform(x).iter().enumerate().all(|(i, c)| {
            if self.s[i][i].is_zero() {
                c.is_zero()
            } else {
                (c % &self.s[i][i]).is_zero()
            }
        })
    }
}

/// Exact linear-equivalence test via the Laplacian lattice. Divisors of
/// different degree are never equivalent.
pub fn oracle_equivalent(g: &MetricGraph, d1: &Divisor, d2: &Divisor) -> Result<bool> {
    d1.validate(g)?;
    d2.validate(g)?;
    if d1.degree() != d2.degree() {
        return Ok(false);
    }
    let mut denominators = d1.denominators();
    denominators.extend(d2.denominators());
    let wg = WorkingGraph::new(g, &denominators)?;
    let lat = LaplacianLattice::new(&wg);
    let x1 = d1.to_vec(&wg)?;
    let x2 = d2.to_vec(&wg)?;
    let diff: Vec<i64> = x1.iter().zip(&x2).map(|(a, b)| a - b).collect();
    Ok(lat.contains(&diff))
}

/// Resource guard for the definitional rank search.
#[derive(Debug, Clone, Copy)]
pub struct OracleCaps {
    /// Largest allowed product of the two enumeration sizes at any stage.
    pub max_pairs: u64,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_pairs: 5_000_000,
        }
    }
}

fn effective_vectors(n: usize, degree: i64) -> Vec<Vec<i64>> {
    (0..n)
        .combinations_with_replacement(degree as usize)
        .map(|combo| {
            let mut v = vec![0i64; n];
            for i in combo {
                v[i] += 1;
            }
            v
        })
        .collect()
}

fn count_effective(n: u64, degree: u64) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 1..=degree {
        c = c.checked_mul(u128::from(n - 1 + i))?;
        c /= u128::from(i);
    }
    Some(c)
}

/// Definitional rank on the divisor's working grid: the largest s such that
/// subtracting any effective divisor of degree s leaves a class with an
/// effective representative. Every nonemptiness verdict is double-checked
/// against the reduction algorithm; a discrepancy is an internal error.
pub fn oracle_rank(g: &MetricGraph, d: &Divisor, caps: OracleCaps) -> Result<i64> {
    d.validate(g)?;
    let deg = d.degree();
    if deg < 0 {
        return Ok(-1);
    }
    let wg = WorkingGraph::new(g, &d.denominators())?;
    let n = wg.node_count();
    let lat = LaplacianLattice::new(&wg);
    let dvec = d.to_vec(&wg)?;

    for s in 0..=deg {
        let pairs = count_effective(n as u64, s as u64)
            .zip(count_effective(n as u64, (deg - s) as u64))
            .and_then(|(a, b)| a.checked_mul(b));
        if pairs.map_or(true, |p| p > u128::from(caps.max_pairs)) {
            return Err(Error::resource_cap(format!(
                "definitional rank at removal degree {s} exceeds the pair cap {}",
                caps.max_pairs
            )));
        }
        // all residues attainable by an effective divisor of the remaining
        // degree; membership of a class is a residue lookup
        let attainable: BTreeSet<Vec<BigInt>> = effective_vectors(n, deg - s)
            .iter()
            .map(|f| lat.residue(f))
            .collect();
        for e in effective_vectors(n, s) {
            let target: Vec<i64> = dvec.iter().zip(&e).map(|(a, b)| a - b).collect();
            let via_lattice = attainable.contains(&lat.residue(&target));
            let via_reduction = {
                let mut t = target.clone();
                let mut script = vec![0i64; n];
                reduce::reduce_vec(&wg, &mut t, 0, &mut script);
                t[0] >= 0
            };
            if via_lattice != via_reduction {
                return Err(Error::internal(
                    "lattice and reduction disagree on linear-system nonemptiness",
                ));
            }
            if !via_lattice {
                return Ok(s - 1);
            }
        }
    }
    // removing degree deg + 1 leaves negative degree, which always fails
    Ok(deg)
}
