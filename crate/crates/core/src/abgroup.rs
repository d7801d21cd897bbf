//! Finite abelian groups in invariant-factor form.
//!
//! Every group is carried as a divisibility chain `d_1 | d_2 | ... | d_k`
//! with `d_i >= 2`; the trivial group is the empty chain. Elements are
//! coordinate vectors against the canonical generators. The module also
//! provides Smith normal form over the integers, presentations by
//! relations, and enumeration of homomorphisms into a cyclic group.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbGroupError {
    #[error("invariant factor {0} is smaller than 2")]
    FactorTooSmall(u64),
    #[error("invariant factors do not form a divisibility chain: {0} does not divide {1}")]
    NotAChain(u64, u64),
    #[error("element has {got} coordinates, group has {expected} generators")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} out of range for factor {modulus}")]
    CoordinateOutOfRange { value: u64, modulus: u64 },
    #[error("image {image} of generator of order {order} is not well defined modulo {modulus}")]
    IllDefinedHom { image: u64, order: u64, modulus: u64 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("group order overflows 128 bits")]
    Overflow,
}

/// A finite abelian group `Z/d_1 + ... + Z/d_k` with `d_i | d_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct InvariantFactors {
    factors: Vec<u64>,
}

impl TryFrom<Vec<u64>> for InvariantFactors {
    type Error = AbGroupError;

    fn try_from(factors: Vec<u64>) -> Result<Self, Self::Error> {
        Self::new(factors)
    }
}

impl From<InvariantFactors> for Vec<u64> {
    fn from(g: InvariantFactors) -> Self {
        g.factors
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl InvariantFactors {
    /// Validates a divisibility chain. Factors equal to 1 are rejected, not dropped.
    pub fn new(factors: Vec<u64>) -> Result<Self, AbGroupError> {
        for &d in &factors {
            if d < 2 {
                return Err(AbGroupError::FactorTooSmall(d));
            }
        }
        for w in factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(AbGroupError::NotAChain(w[0], w[1]));
            }
        }
        Ok(Self { factors })
    }

    /// Orders of independent cyclic generators that need not form a chain.
    /// Only coordinate arithmetic is meaningful on such a value.
    pub(crate) fn loose(factors: Vec<u64>) -> Self {
        Self { factors }
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cyclic(d: u64) -> Self {
        Self::from_cyclic_orders(&[d])
    }

    /// Canonical form of `Z/m_1 + ... + Z/m_r` for arbitrary positive `m_i`.
    ///
    /// Orders equal to 0 would describe a free summand and are ignored.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        // Prime-power parts, sorted per prime in decreasing exponent, then
        // recombined column by column: the largest factor takes the largest
        // power of every prime.
        let mut primes: Vec<(u64, Vec<u32>)> = Vec::new();
        for &m in orders.iter().filter(|&&m| m > 1) {
            for (p, e) in factorize(m) {
                match primes.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, es)) => es.push(e),
                    None => primes.push((p, vec![e])),
                }
            }
        }
        let len = primes.iter().map(|(_, es)| es.len()).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (p, es) in &mut primes {
            es.sort_unstable_by(|a, b| b.cmp(a));
            for (i, &e) in es.iter().enumerate() {
                factors[len - 1 - i] *= p.pow(e);
            }
        }
        factors.retain(|&d| d > 1);
        Self { factors }
    }

    /// Direct sum, re-canonicalized.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut all = self.factors.clone();
        all.extend_from_slice(&other.factors);
        Self::from_cyclic_orders(&all)
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of canonical generators.
    pub fn ngens(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> u128 {
        self.checked_order().expect("group order overflows u128")
    }

    pub fn checked_order(&self) -> Option<u128> {
        self.factors
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
    }

    /// Least common multiple of element orders (1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    /// True when every element is killed by `n`.
    pub fn is_killed_by(&self, n: u64) -> bool {
        self.factors.iter().all(|&d| n % d == 0)
    }

    pub fn zero(&self) -> AbElement {
        AbElement {
            coords: vec![0; self.factors.len()],
        }
    }

    /// The `i`-th canonical generator.
    pub fn generator(&self, i: usize) -> AbElement {
        let mut coords = vec![0; self.factors.len()];
        coords[i] = 1;
        AbElement { coords }
    }

    /// Builds an element from arbitrary integers, reducing each coordinate.
    pub fn element_from_ints(&self, xs: &[i64]) -> Result<AbElement, AbGroupError> {
        self.check_len(xs.len())?;
        let coords = xs
            .iter()
            .zip(&self.factors)
            .map(|(&x, &d)| x.rem_euclid(d as i64) as u64)
            .collect();
        Ok(AbElement { coords })
    }

    /// Checks that `coords` is a reduced coordinate vector for this group.
    pub fn element(&self, coords: Vec<u64>) -> Result<AbElement, AbGroupError> {
        self.check_len(coords.len())?;
        for (&x, &d) in coords.iter().zip(&self.factors) {
            if x >= d {
                return Err(AbGroupError::CoordinateOutOfRange { value: x, modulus: d });
            }
        }
        Ok(AbElement { coords })
    }

    pub fn contains(&self, x: &AbElement) -> bool {
        x.coords.len() == self.factors.len()
            && x.coords.iter().zip(&self.factors).all(|(&c, &d)| c < d)
    }

    fn check_len(&self, got: usize) -> Result<(), AbGroupError> {
        if got != self.factors.len() {
            return Err(AbGroupError::DimensionMismatch {
                expected: self.factors.len(),
                got,
            });
        }
        Ok(())
    }

    pub fn add(&self, x: &AbElement, y: &AbElement) -> AbElement {
        let coords = x
            .coords
            .iter()
            .zip(&y.coords)
            .zip(&self.factors)
            .map(|((&a, &b), &d)| (a + b) % d)
            .collect();
        AbElement { coords }
    }

    pub fn neg(&self, x: &AbElement) -> AbElement {
        let coords = x
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&a, &d)| (d - a) % d)
            .collect();
        AbElement { coords }
    }

    pub fn scale(&self, k: u64, x: &AbElement) -> AbElement {
        let coords = x
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&a, &d)| mul_mod(k % d, a, d))
            .collect();
        AbElement { coords }
    }

    /// Order of an element.
    pub fn element_order(&self, x: &AbElement) -> u64 {
        x.coords
            .iter()
            .zip(&self.factors)
            .map(|(&a, &d)| d / a.gcd(&d))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// All elements, in lexicographic order of coordinates.
    pub fn elements(&self) -> Elements<'_> {
        Elements {
            moduli: &self.factors,
            next: Some(vec![0; self.factors.len()]),
        }
    }

    /// Whether `x` lies in `n·G`.
    pub fn in_multiple_subgroup(&self, x: &AbElement, n: u64) -> bool {
        x.coords
            .iter()
            .zip(&self.factors)
            .all(|(&a, &d)| a % n.gcd(&d) == 0)
    }

    /// The `n`-torsion subgroup `G[n] = Z/gcd(d_i, n) + ...` and its embedding into `G`.
    ///
    /// The generator of the summand `Z/gcd(d_i, n)` maps to `(d_i / gcd(d_i, n))·e_i`.
    pub fn torsion_subgroup(&self, n: u64) -> (InvariantFactors, GroupHom) {
        assert!(n >= 1, "torsion_subgroup needs n >= 1");
        let mut sub = Vec::new();
        let mut images = Vec::new();
        for (i, &d) in self.factors.iter().enumerate() {
            let g = d.gcd(&n);
            if g > 1 {
                sub.push(g);
                let mut coords = vec![0; self.factors.len()];
                coords[i] = d / g;
                images.push(AbElement { coords });
            }
        }
        let domain = InvariantFactors { factors: sub };
        let hom = GroupHom {
            domain: domain.clone(),
            codomain: self.clone(),
            images,
        };
        (domain, hom)
    }

    /// The quotient `G/nG = Z/gcd(d_i, n) + ...` and the projection `G -> G/nG`.
    pub fn quotient_mod_n(&self, n: u64) -> (InvariantFactors, GroupHom) {
        assert!(n >= 1, "quotient_mod_n needs n >= 1");
        let gs: Vec<u64> = self.factors.iter().map(|&d| d.gcd(&n)).collect();
        let quotient = InvariantFactors {
            factors: gs.iter().copied().filter(|&g| g > 1).collect(),
        };
        let mut images = Vec::with_capacity(self.factors.len());
        let mut slot = 0;
        for &g in &gs {
            let mut coords = vec![0; quotient.factors.len()];
            if g > 1 {
                coords[slot] = 1;
                slot += 1;
            }
            images.push(AbElement { coords });
        }
        let hom = GroupHom {
            domain: self.clone(),
            codomain: quotient.clone(),
            images,
        };
        (quotient, hom)
    }

    /// Lifts an element of `G/nG` (as produced by [`Self::quotient_mod_n`]) back to `G`
    /// by reading each residue as an integer in the matching summand of `G`.
    pub fn lift_from_quotient(&self, n: u64, x: &AbElement) -> AbElement {
        let mut coords = vec![0; self.factors.len()];
        let mut slot = 0;
        for (i, &d) in self.factors.iter().enumerate() {
            if d.gcd(&n) > 1 {
                coords[i] = x.coords[slot];
                slot += 1;
            }
        }
        AbElement { coords }
    }

    /// The subgroup `n·G[n^2]`, of order `prod gcd(d_i, n^2) / gcd(d_i, n)`.
    pub fn n_times_torsion(&self, n: u64) -> InvariantFactors {
        assert!(n >= 1, "n_times_torsion needs n >= 1");
        let n2 = n as u128 * n as u128;
        let orders: Vec<u64> = self
            .factors
            .iter()
            .map(|&d| {
                let g2 = (d as u128).gcd(&n2) as u64;
                g2 / d.gcd(&n)
            })
            .collect();
        Self::from_cyclic_orders(&orders)
    }

    /// Character group `Hom(G, Z/n)`, isomorphic to `Z/gcd(d_i, n) + ...`.
    pub fn dual(&self, n: u64) -> InvariantFactors {
        self.quotient_mod_n(n).0
    }

    /// Number of homomorphisms `G -> Z/n`.
    pub fn hom_count(&self, n: u64) -> u128 {
        self.factors.iter().map(|&d| d.gcd(&n) as u128).product()
    }

    /// Every homomorphism `G -> Z/n` exactly once, lexicographic on image vectors.
    pub fn homs_to_cyclic(&self, n: u64) -> HomsToCyclic {
        assert!(n >= 1, "homs_to_cyclic needs n >= 1");
        let steps: Vec<u64> = self.factors.iter().map(|&d| n / d.gcd(&n)).collect();
        HomsToCyclic {
            n,
            steps,
            next: Some(vec![0; self.factors.len()]),
        }
    }

    /// Whether some injective homomorphism `self -> other` exists.
    ///
    /// Decided prime by prime: the `p`-parts must compare elementwise after
    /// sorting exponents in decreasing order.
    pub fn embeds_into(&self, other: &Self) -> bool {
        let mine = self.primary_exponents();
        let theirs = other.primary_exponents();
        mine.iter().all(|(p, es)| {
            let empty = Vec::new();
            let os = theirs
                .iter()
                .find(|(q, _)| q == p)
                .map(|(_, v)| v)
                .unwrap_or(&empty);
            es.len() <= os.len() && es.iter().zip(os).all(|(a, b)| a <= b)
        })
    }

    /// Exponents of each prime, in decreasing order.
    pub fn primary_exponents(&self) -> Vec<(u64, Vec<u32>)> {
        let mut out: Vec<(u64, Vec<u32>)> = Vec::new();
        for &d in &self.factors {
            for (p, e) in factorize(d) {
                match out.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, es)) => es.push(e),
                    None => out.push((p, vec![e])),
                }
            }
        }
        for (_, es) in &mut out {
            es.sort_unstable_by(|a, b| b.cmp(a));
        }
        out.sort_unstable_by_key(|(p, _)| *p);
        out
    }
}

/// Coordinates of an element against canonical generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbElement {
    coords: Vec<u64>,
}

impl AbElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

pub struct Elements<'a> {
    moduli: &'a [u64],
    next: Option<Vec<u64>>,
}

impl Iterator for Elements<'_> {
    type Item = AbElement;

    fn next(&mut self) -> Option<AbElement> {
        let cur = self.next.take()?;
        self.next = odometer_step(&cur, self.moduli, |c, _| c + 1);
        Some(AbElement { coords: cur })
    }
}

/// Advance `cur` as a mixed-radix counter, last coordinate fastest.
fn odometer_step(cur: &[u64], limits: &[u64], bump: impl Fn(u64, usize) -> u64) -> Option<Vec<u64>> {
    let mut nxt = cur.to_vec();
    for i in (0..nxt.len()).rev() {
        let v = bump(nxt[i], i);
        if v < limits[i] {
            nxt[i] = v;
            return Some(nxt);
        }
        nxt[i] = 0;
    }
    None
}

/// A homomorphism between two invariant-factor groups, by images of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    pub domain: InvariantFactors,
    pub codomain: InvariantFactors,
    pub images: Vec<AbElement>,
}

impl GroupHom {
    pub fn apply(&self, x: &AbElement) -> AbElement {
        let mut acc = self.codomain.zero();
        for (&c, img) in x.coords.iter().zip(&self.images) {
            if c != 0 {
                acc = self.codomain.add(&acc, &self.codomain.scale(c, img));
            }
        }
        acc
    }

    /// Brute-force kernel size.
    pub fn kernel_size(&self) -> u128 {
        self.domain
            .elements()
            .filter(|x| self.apply(x).is_zero())
            .count() as u128
    }
}

/// A homomorphism `G -> Z/n` given by the images `h_i` of the canonical generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicHom {
    modulus: u64,
    images: Vec<u64>,
}

impl CyclicHom {
    /// Validates `d_i·h_i ≡ 0 (mod n)` for every generator of `domain`.
    pub fn new(domain: &InvariantFactors, modulus: u64, images: Vec<u64>) -> Result<Self, AbGroupError> {
        if modulus == 0 {
            return Err(AbGroupError::ZeroModulus);
        }
        domain.check_len(images.len())?;
        for (&h, &d) in images.iter().zip(domain.factors()) {
            if h >= modulus {
                return Err(AbGroupError::CoordinateOutOfRange { value: h, modulus });
            }
            if mul_mod(d % modulus, h, modulus) != 0 {
                return Err(AbGroupError::IllDefinedHom { image: h, order: d, modulus });
            }
        }
        Ok(Self { modulus, images })
    }

    pub fn zero(domain: &InvariantFactors, modulus: u64) -> Self {
        Self {
            modulus,
            images: vec![0; domain.ngens()],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|&h| h == 0)
    }

    /// `sum h_i x_i mod n`.
    pub fn eval(&self, x: &AbElement) -> Result<u64, AbGroupError> {
        if x.coords.len() != self.images.len() {
            return Err(AbGroupError::DimensionMismatch {
                expected: self.images.len(),
                got: x.coords.len(),
            });
        }
        Ok(self.eval_unchecked(&x.coords))
    }

    pub(crate) fn eval_unchecked(&self, coords: &[u64]) -> u64 {
        let n = self.modulus;
        coords
            .iter()
            .zip(&self.images)
            .fold(0u64, |acc, (&x, &h)| (acc + mul_mod(x % n, h, n)) % n)
    }
}

/// Free function form of [`CyclicHom::eval`].
pub fn eval_hom(phi: &CyclicHom, x: &AbElement) -> Result<u64, AbGroupError> {
    phi.eval(x)
}

pub struct HomsToCyclic {
    n: u64,
    steps: Vec<u64>,
    next: Option<Vec<u64>>,
}

impl Iterator for HomsToCyclic {
    type Item = CyclicHom;

    fn next(&mut self) -> Option<CyclicHom> {
        let cur = self.next.take()?;
        let n = self.n;
        let steps = &self.steps;
        let limits = vec![n; steps.len()];
        self.next = odometer_step(&cur, &limits, |c, i| c + steps[i]);
        Some(CyclicHom {
            modulus: n,
            images: cur,
        })
    }
}

/// Dense integer matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged relation matrix");
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v as i128;
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i128 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut m = self.clone();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[(k, k)] == 0 {
                match (k + 1..n).find(|&i| m[(i, k)] != 0) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[(i, j)] = (m[(i, j)] * m[(k, k)] - m[(i, k)] * m[(k, j)]) / prev;
                }
            }
            prev = m[(k, k)];
        }
        sign * m[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i128) {
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += k * v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i128) {
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += k * v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of [`smith_normal_form`]: `u · m · v = s`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Diagonal entries `s_1 | s_2 | ...`, length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s[(i, i)]).collect()
    }
}

/// Smith normal form with unimodular transforms.
///
/// Pivots on the smallest nonzero absolute value of the remaining block.
/// Diagonal entries are nonnegative and every nonzero entry divides the next.
pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (r, c) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            // smallest nonzero pivot in the block [t.., t..]
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = s[(i, j)].abs();
                    if x != 0 && best.map_or(true, |(bi, bj)| x < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, s, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = s[(t, t)];
            let mut dirty = false;
            for i in t + 1..r {
                let q = s[(i, t)].div_euclid(p);
                if q != 0 {
                    s.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                }
                dirty |= s[(i, t)] != 0;
            }
            for j in t + 1..c {
                let q = s[(t, j)].div_euclid(p);
                if q != 0 {
                    s.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                }
                dirty |= s[(t, j)] != 0;
            }
            if dirty {
                continue;
            }
            // pivot must divide the whole remaining block
            let offender = (t + 1..r)
                .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                .find(|&(i, j)| s[(i, j)] % p != 0);
            match offender {
                Some((i, _)) => {
                    s.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                }
                None => break,
            }
        }
        if s[(t, t)] < 0 {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, s, v)
}

fn finish(u: IntMatrix, s: IntMatrix, v: IntMatrix) -> Smith {
    Smith { u, s, v }
}

/// `Z^g / (row lattice)`: torsion invariant factors, free rank, and the
/// coordinate change that reads off classes.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub torsion: InvariantFactors,
    pub free_rank: usize,
    diag: Vec<i128>,
    v: IntMatrix,
}

impl Presentation {
    /// Coordinates in the torsion part of the class of `x ∈ Z^g`.
    pub fn torsion_coords(&self, x: &[i64]) -> AbElement {
        let g = self.v.rows;
        assert_eq!(x.len(), g, "vector length must equal the number of generators");
        let mut coords = Vec::with_capacity(self.torsion.ngens());
        for (j, &d) in self.diag.iter().enumerate() {
            if d > 1 {
                let y: i128 = (0..g).map(|i| x[i] as i128 * self.v[(i, j)]).sum();
                coords.push(y.rem_euclid(d) as u64);
            }
        }
        AbElement { coords }
    }
}

/// Structure of `Z^g` modulo the lattice spanned by the rows of `relations`.
pub fn group_from_relations(relations: &[Vec<i64>], g: usize) -> Presentation {
    let m = IntMatrix::from_rows(relations, g);
    let snf = smith_normal_form(&m);
    let mut diag = snf.diagonal();
    diag.resize(g, 0);
    let torsion = InvariantFactors {
        factors: diag.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect(),
    };
    let free_rank = diag.iter().filter(|&&d| d == 0).count();
    Presentation {
        torsion,
        free_rank,
        diag,
        v: snf.v,
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Trial-division factorization into `(prime, exponent)` pairs, increasing primes.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}
