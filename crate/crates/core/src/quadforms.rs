//! Positive definite binary quadratic forms and the form class group of a
//! fundamental discriminant `D < 0`.
//!
//! Forms `(a, b, c)` stand for `a x^2 + b xy + c y^2`. For fundamental `D` the
//! classes of primitive forms under composition give the ideal class group of
//! the imaginary quadratic field of discriminant `D`.

use std::collections::HashMap;
use std::fmt;

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{group_from_relations, AbElement, InvariantFactors};

/// Default ceiling on the class number handled by [`class_group`].
pub const DEFAULT_CLASS_BOUND: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadFormError {
    #[error("discriminant {0} is not negative")]
    NotNegative(i64),
    #[error("discriminant {0} is not congruent to 0 or 1 mod 4")]
    BadResidue(i64),
    #[error("discriminant {0} is not fundamental: {1}")]
    NotFundamental(i64, &'static str),
    #[error("form ({0}, {1}, {2}) is not primitive")]
    NotPrimitive(i64, i64, i64),
    #[error("form ({0}, {1}, {2}) is not positive definite")]
    NotPositiveDefinite(i64, i64, i64),
    #[error("discriminants differ: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("class number {h} exceeds the bound {bound}")]
    ClassNumberTooLarge { h: usize, bound: usize },
}

/// A fundamental negative discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Discriminant(i64);

impl TryFrom<i64> for Discriminant {
    type Error = QuadFormError;
    fn try_from(d: i64) -> Result<Self, Self::Error> {
        Self::new(d)
    }
}

impl From<Discriminant> for i64 {
    fn from(d: Discriminant) -> i64 {
        d.0
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Discriminant {
    pub fn new(d: i64) -> Result<Self, QuadFormError> {
        if d >= 0 {
            return Err(QuadFormError::NotNegative(d));
        }
        match d.rem_euclid(4) {
            1 => {
                if !squarefree(d.unsigned_abs()) {
                    return Err(QuadFormError::NotFundamental(d, "D = 1 mod 4 but D is not squarefree"));
                }
            }
            0 => {
                let m = d / 4;
                match m.rem_euclid(4) {
                    2 | 3 => {}
                    _ => {
                        return Err(QuadFormError::NotFundamental(
                            d,
                            "D = 4m requires m = 2 or 3 mod 4",
                        ))
                    }
                }
                if !squarefree(m.unsigned_abs()) {
                    return Err(QuadFormError::NotFundamental(d, "D = 4m with m not squarefree"));
                }
            }
            _ => return Err(QuadFormError::BadResidue(d)),
        }
        Ok(Self(d))
    }

    pub fn get(self) -> i64 {
        self.0
    }

    /// All fundamental discriminants in `(lower, 0)`, in decreasing order.
    pub fn fundamentals_above(lower: i64) -> Vec<Discriminant> {
        (lower + 1..0).rev().filter_map(|d| Self::new(d).ok()).collect()
    }
}

fn squarefree(mut m: u64) -> bool {
    let mut p = 2u64;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        if m % p == 0 {
            m /= p;
        }
        p += 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The principal form `(1, D mod 2, (D mod 2 - D)/4)`.
    pub fn principal(d: Discriminant) -> Self {
        let b = d.0.rem_euclid(2);
        Self::new(1, b, (b - d.0) / 4)
    }

    pub fn inverse(&self) -> Self {
        reduce_unchecked(Self::new(self.a, -self.b, self.c))
    }
}

/// Unique reduced form equivalent to `f`.
pub fn reduce(f: QuadForm) -> Result<QuadForm, QuadFormError> {
    let QuadForm { a, b, c } = f;
    if !f.is_primitive() {
        return Err(QuadFormError::NotPrimitive(a, b, c));
    }
    if a <= 0 || f.discriminant() >= 0 {
        return Err(QuadFormError::NotPositiveDefinite(a, b, c));
    }
    Ok(reduce_unchecked(f))
}

fn reduce_unchecked(f: QuadForm) -> QuadForm {
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        // translate b into (-a, a]
        if b <= -a || b > a {
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            // x -> x + k y with b + 2ak = r
            let k = (r - b) / two_a;
            c += a * k * k + b * k;
            b = r;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        break;
    }
    QuadForm::new(a as i64, b as i64, c as i64)
}

/// All reduced primitive forms of discriminant `d`, sorted by `(a, b, c)`.
pub fn enumerate_reduced(d: Discriminant) -> Vec<QuadForm> {
    let dd = d.0;
    let amax = (dd.unsigned_abs() / 3).sqrt() as i64;
    let mut out = Vec::new();
    for a in 1..=amax {
        for b in (-a + 1)..=a {
            if (b - dd).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - dd;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = QuadForm::new(a, b, c);
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out.sort();
    out
}

/// Class number by enumeration of reduced forms.
pub fn class_number(d: Discriminant) -> usize {
    enumerate_reduced(d).len()
}

/// Composition of two primitive forms of the same discriminant, reduced.
pub fn compose(f: QuadForm, g: QuadForm) -> Result<QuadForm, QuadFormError> {
    let (df, dg) = (f.discriminant(), g.discriminant());
    if df != dg {
        return Err(QuadFormError::DiscriminantMismatch(df, dg));
    }
    reduce(f)?;
    reduce(g)?;
    Ok(compose_unchecked(f, g))
}

/// Dirichlet composition: bring both forms to concordant position sharing a
/// middle coefficient, then multiply the leading coefficients.
fn compose_unchecked(f: QuadForm, g: QuadForm) -> QuadForm {
    let (f, g) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2, c2) = (g.a as i128, g.b as i128, g.c as i128);
    let disc = b2 * b2 - 4 * a2 * c2;

    let s = (b1 + b2) / 2;
    let n = b2 - s;

    let (y1, d) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let e = a2.extended_gcd(&a1);
        (e.x, e.gcd)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let e = s.extended_gcd(&d);
        (e.x, -e.y, e.gcd)
    };

    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (b3 * b3 - disc) / (4 * a3);
    debug_assert_eq!((b3 * b3 - disc) % (4 * a3), 0);
    reduce_unchecked(QuadForm::new(a3 as i64, b3 as i64, c3 as i64))
}

/// Order of the roots-of-unity group of `Q(sqrt(D))`.
pub fn unit_data(d: Discriminant) -> u64 {
    match d.0 {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Form class group with a discrete-log table.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub discriminant: Discriminant,
    pub structure: InvariantFactors,
    /// Reduced forms mapping to the canonical generators of `structure`.
    pub generators: Vec<QuadForm>,
    pub forms: Vec<QuadForm>,
    dlog: HashMap<QuadForm, AbElement>,
}

impl ClassGroup {
    pub fn class_number(&self) -> usize {
        self.forms.len()
    }

    /// Coordinates of a form's class; the form need not be reduced.
    pub fn dlog(&self, f: &QuadForm) -> Option<&AbElement> {
        let r = reduce(*f).ok()?;
        self.dlog.get(&r)
    }

    /// The reduced form with the given coordinates.
    pub fn form_of(&self, x: &AbElement) -> Option<QuadForm> {
        self.dlog.iter().find(|(_, v)| *v == x).map(|(f, _)| *f)
    }

    pub fn identity(&self) -> QuadForm {
        QuadForm::principal(self.discriminant)
    }

    pub fn compose(&self, f: QuadForm, g: QuadForm) -> QuadForm {
        compose_unchecked(f, g)
    }

    pub fn power(&self, f: QuadForm, k: u64) -> QuadForm {
        let mut acc = self.identity();
        let mut base = f;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = compose_unchecked(acc, base);
            }
            base = compose_unchecked(base, base);
            k >>= 1;
        }
        acc
    }

    /// Order of a class under composition, by repeated composition.
    pub fn form_order(&self, f: QuadForm) -> u64 {
        let id = self.identity();
        let f = reduce_unchecked(f);
        let mut acc = f;
        let mut k = 1;
        while acc != id {
            acc = compose_unchecked(acc, f);
            k += 1;
        }
        k
    }
}

/// Class group structure with the default class-number bound.
pub fn class_group(d: Discriminant) -> Result<ClassGroup, QuadFormError> {
    class_group_bounded(d, DEFAULT_CLASS_BOUND)
}

/// Class group structure.
///
/// Generators are chosen greedily (largest order first) among classes not yet
/// in the span; for each new generator the least multiple landing in the
/// previous span gives one relation. These relations generate the full
/// relation lattice, which is then put in invariant-factor form.
pub fn class_group_bounded(d: Discriminant, bound: usize) -> Result<ClassGroup, QuadFormError> {
    let forms = enumerate_reduced(d);
    let h = forms.len();
    if h > bound {
        return Err(QuadFormError::ClassNumberTooLarge { h, bound });
    }
    let id = QuadForm::principal(d);
    let proto = ClassGroup {
        discriminant: d,
        structure: InvariantFactors::trivial(),
        generators: Vec::new(),
        forms: forms.clone(),
        dlog: HashMap::new(),
    };

    let mut by_order: Vec<(u64, QuadForm)> = forms.iter().map(|&f| (proto.form_order(f), f)).collect();
    by_order.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));

    // span: form -> exponent vector over the chosen generators
    let mut span: HashMap<QuadForm, Vec<i64>> = HashMap::from([(id, Vec::new())]);
    let mut gens: Vec<QuadForm> = Vec::new();
    let mut relations: Vec<Vec<i64>> = Vec::new();

    for &(_, f) in &by_order {
        if span.len() == h {
            break;
        }
        if span.contains_key(&f) {
            continue;
        }
        let k = gens.len();
        // least m with f^m in the current span
        let mut m = 1i64;
        let mut pw = f;
        while !span.contains_key(&pw) {
            pw = compose_unchecked(pw, f);
            m += 1;
        }
        let mut rel: Vec<i64> = span[&pw].iter().map(|&e| -e).collect();
        rel.resize(k, 0);
        rel.push(m);
        for r in &mut relations {
            r.push(0);
        }
        for v in span.values_mut() {
            v.push(0);
        }
        relations.push(rel);
        gens.push(f);

        // extend the span by f^j, 0 < j < m
        let old: Vec<(QuadForm, Vec<i64>)> = span.iter().map(|(g, v)| (*g, v.clone())).collect();
        let mut fj = id;
        for j in 1..m {
            fj = compose_unchecked(fj, f);
            for (g, v) in &old {
                let prod = compose_unchecked(*g, fj);
                let mut e = v.clone();
                e[k] = j;
                span.entry(prod).or_insert(e);
            }
        }
    }

    let pres = group_from_relations(&relations, gens.len());
    debug_assert_eq!(pres.free_rank, 0);
    let dlog: HashMap<QuadForm, AbElement> = span
        .iter()
        .map(|(f, e)| (*f, pres.torsion_coords(e)))
        .collect();
    let structure = pres.torsion.clone();

    let mut cg = ClassGroup {
        discriminant: d,
        structure: structure.clone(),
        generators: Vec::new(),
        forms,
        dlog,
    };
    cg.generators = (0..structure.ngens())
        .map(|i| cg.form_of(&structure.generator(i)).expect("generator class present"))
        .collect();
    Ok(cg)
}
