//! The BF path integral for a pair of dual abelian varieties, over
//! synthetic finite-group models of their Selmer groups.
//!
//! An [`AvModel`] fixes n-torsion groups standing for `A(F)/n`, `B(F)/n`,
//! `Sha(A)[n]` and `Sha(B)[n]`. The hypotheses on Néron models (semistable
//! reduction, `n` prime to the component groups `Phi_A`, `Phi_B`, good
//! reduction above `n`, finite Sha with `Sha(B)[n^2] = Sha(B)[n]`) are not
//! tested; the model assumes their consequences:
//!
//! * `H^1(X, A[n]) = Sel(F, A[n])` is the product set `A(F)/n x Sha(A)[n]`,
//!   and likewise for `B` (the split extension);
//! * `H^2(X, B[n])` is the full character group of `Sel(F, A[n])`, which
//!   makes the cup product the evaluation pairing;
//! * the Bockstein kills exactly the `B(F)/n` factor and restricts to an
//!   injection `Sha(B)[n] -> H^2(X, B[n])`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abgroup::{divisors, factorize, AbElement, CyclicHom, InvariantFactors};
use crate::bf_gm::{evaluate, BfError, EnumerationOptions, Mode, PathIntegralReport};
use crate::cyclo::{Phase, PhaseVector};

/// Attempts allowed when drawing a random injective Bockstein.
pub const RANDOM_INJECTION_ATTEMPTS: usize = 1000;

/// How the injection `Sha(B)[n] -> H^2(X, B[n])` is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaChoice {
    /// `Sha(B)[n]` has the shape of `Sha(A)[n]`; generators go to dual generators.
    Canonical(CanonicalTag),
    /// Row `i` is the character image of the `i`-th generator of `Sha(B)[n]`,
    /// with one entry per generator of `A(F)/n` followed by `Sha(A)[n]`, or one
    /// entry per generator of `Sha(A)[n]` only.
    Matrix { matrix: Vec<Vec<i64>> },
    /// Pseudo-random injection, reproducible from the seed.
    Seed { seed: u64 },
}

/// Serialized as the string `"canonical"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CanonicalTag {
    Canonical,
}

impl DeltaChoice {
    pub fn canonical() -> Self {
        DeltaChoice::Canonical(CanonicalTag::Canonical)
    }
}

/// Synthetic stand-in for the arithmetic of `A` and its dual `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvModel {
    pub n: u64,
    /// `A(F)/n`
    pub mw_a: InvariantFactors,
    /// `B(F)/n`
    pub mw_b: InvariantFactors,
    /// `Sha(A)[n]`
    pub sha_a: InvariantFactors,
    /// `Sha(B)[n]`
    pub sha_b: InvariantFactors,
    pub delta: DeltaChoice,
}

impl AvModel {
    pub fn validate(&self) -> Result<(), BfError> {
        if self.n < 2 {
            return Err(BfError::BadModulus { got: self.n, min: 2 });
        }
        for (name, g) in [
            ("mw_a", &self.mw_a),
            ("mw_b", &self.mw_b),
            ("sha_a", &self.sha_a),
            ("sha_b", &self.sha_b),
        ] {
            if !g.is_killed_by(self.n) {
                return Err(BfError::InvalidModel(format!(
                    "{name} = {g:?} is not {}-torsion",
                    self.n
                )));
            }
        }
        if self.sha_a.order() != self.sha_b.order() {
            return Err(BfError::InvalidModel(format!(
                "|sha_a| = {} differs from |sha_b| = {}",
                self.sha_a.order(),
                self.sha_b.order()
            )));
        }
        Ok(())
    }

    /// The model with the roles of `A` and `B` exchanged, using a canonical
    /// Bockstein when the Sha shapes agree and a seeded one otherwise.
    pub fn swapped(&self, seed: u64) -> Self {
        let delta = if self.sha_a == self.sha_b {
            DeltaChoice::canonical()
        } else {
            DeltaChoice::Seed { seed }
        };
        Self {
            n: self.n,
            mw_a: self.mw_b.clone(),
            mw_b: self.mw_a.clone(),
            sha_a: self.sha_b.clone(),
            sha_b: self.sha_a.clone(),
            delta,
        }
    }

    pub fn closed_form(&self) -> u128 {
        self.mw_a.order() * self.mw_b.order() * self.sha_a.order()
    }

    pub fn symmetric_closed_form(&self) -> u128 {
        self.mw_b.order() * self.mw_a.order() * self.sha_b.order()
    }
}

/// An element of a product `mw x sha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelElement {
    pub mw: AbElement,
    pub sha: AbElement,
}

/// Built model: Selmer product sets, `H^2(X, B[n])`, and the injection.
#[derive(Debug, Clone)]
pub struct AvInstance {
    pub model: AvModel,
    /// Generators of `sel_a`: those of `mw_a` followed by those of `sha_a`.
    sel_a_factors: Vec<u64>,
    /// `H^2(X, B[n]) = Hom(sel_a, Z/n)`, as an abstract group.
    h2b: InvariantFactors,
    /// Row `i`: image of the `i`-th generator of `sha_b`, a character of `sel_a`.
    delta_rows: Vec<CyclicHom>,
}

impl AvInstance {
    pub fn build(model: AvModel) -> Result<Self, BfError> {
        model.validate()?;
        let n = model.n;
        let sel_a_factors: Vec<u64> = model
            .mw_a
            .factors()
            .iter()
            .chain(model.sha_a.factors())
            .copied()
            .collect();
        let h2b = model.mw_a.dual(n).direct_sum(&model.sha_a.dual(n));
        let nmw = model.mw_a.ngens();

        let delta_rows = match &model.delta {
            DeltaChoice::Canonical(_) => {
                let dual_sha_a = model.sha_a.dual(n);
                if model.sha_b != dual_sha_a {
                    return Err(BfError::InvalidModel(format!(
                        "canonical delta needs sha_b = dual(sha_a) = {:?}, got {:?}",
                        dual_sha_a, model.sha_b
                    )));
                }
                model
                    .sha_b
                    .factors()
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| {
                        let mut images = vec![0u64; sel_a_factors.len()];
                        images[nmw + i] = n / d;
                        CyclicHom::new(&sel_group(&sel_a_factors), n, images)
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            DeltaChoice::Matrix { matrix } => {
                let rows = explicit_rows(&model, &sel_a_factors, matrix)?;
                if !injective(&model.sha_b, &rows, n) {
                    return Err(BfError::InvalidModel("requested delta is not injective".into()));
                }
                rows
            }
            DeltaChoice::Seed { seed } => {
                if !model.sha_b.embeds_into(&h2b) {
                    return Err(BfError::InvalidModel(format!(
                        "no injection {:?} -> H^2 = {:?} exists",
                        model.sha_b, h2b
                    )));
                }
                random_injection(&model.sha_b, &sel_a_factors, n, *seed)?
            }
        };

        Ok(Self {
            model,
            sel_a_factors,
            h2b,
            delta_rows,
        })
    }

    pub fn n(&self) -> u64 {
        self.model.n
    }

    pub fn h2b(&self) -> &InvariantFactors {
        &self.h2b
    }

    pub fn sel_a_order(&self) -> u128 {
        self.model.mw_a.order() * self.model.sha_a.order()
    }

    pub fn sel_b_order(&self) -> u128 {
        self.model.mw_b.order() * self.model.sha_b.order()
    }

    /// The injection `sha_b -> H^2`, one character per generator of `sha_b`.
    pub fn delta_rows(&self) -> &[CyclicHom] {
        &self.delta_rows
    }

    pub fn sel_a_elements(&self) -> impl Iterator<Item = SelElement> + '_ {
        product(&self.model.mw_a, &self.model.sha_a)
    }

    pub fn sel_b_elements(&self) -> impl Iterator<Item = SelElement> + '_ {
        product(&self.model.mw_b, &self.model.sha_b)
    }

    /// `δb`: the `mw_b` coordinate dies, the `sha_b` coordinate goes through the injection.
    pub fn bockstein(&self, b: &SelElement) -> CyclicHom {
        let n = self.n();
        let mut images = vec![0u64; self.sel_a_factors.len()];
        for (&c, row) in b.sha.coords().iter().zip(&self.delta_rows) {
            for (img, &h) in images.iter_mut().zip(row.images()) {
                *img = (*img + crate::abgroup::mul_mod(c, h, n)) % n;
            }
        }
        CyclicHom::new(&sel_group(&self.sel_a_factors), n, images).expect("sum of characters is a character")
    }

    /// `BF(a, b) = (δb)(a)`.
    pub fn bf_value(&self, a: &SelElement, b: &SelElement) -> Phase {
        let delta = self.bockstein(b);
        Phase::new(delta.eval_unchecked(&concat(a)), self.n())
    }

    /// Brute-force `|ker δ|`.
    pub fn kernel_size(&self) -> u128 {
        self.sel_b_elements().filter(|b| self.bockstein(b).is_zero()).count() as u128
    }

    /// Perfectness of the evaluation pairing `sel_a x H^2 -> (1/n)Z/Z`: same
    /// order, and every nonzero `a` is detected by some character.
    pub fn pairing_is_perfect(&self) -> bool {
        let g = sel_group(&self.sel_a_factors);
        let chars: Vec<CyclicHom> = g.homs_to_cyclic(self.n()).collect();
        chars.len() as u128 == g.order()
            && self.h2b.order() == g.order()
            && g.elements()
                .filter(|a| !a.is_zero())
                .all(|a| chars.iter().any(|c| c.eval_unchecked(a.coords()) != 0))
    }

    pub fn phase_vector(&self, opts: &EnumerationOptions) -> Result<PhaseVector, BfError> {
        let pairs = self.pair_count();
        if pairs > opts.budget_pairs {
            return Err(BfError::BudgetExceeded {
                pairs,
                budget: opts.budget_pairs,
            });
        }
        let n = self.n();
        let sel_a: Vec<Vec<u64>> = self.sel_a_elements().map(|a| concat(&a)).collect();
        let sel_b: Vec<SelElement> = self.sel_b_elements().collect();
        let chunk = sel_b.len().div_ceil(opts.jobs.max(1)).max(1);
        let pv = opts.with_pool(|| {
            sel_b
                .par_chunks(chunk)
                .map(|ch| {
                    let mut pv = PhaseVector::new(n);
                    for b in ch {
                        let delta = self.bockstein(b);
                        for a in &sel_a {
                            pv.record(opts.phase(delta.eval_unchecked(a), n), 1);
                        }
                    }
                    pv
                })
                .reduce(|| PhaseVector::new(n), |mut x, y| {
                    x.merge(&y);
                    x
                })
        });
        Ok(pv)
    }

    pub fn pair_count(&self) -> u128 {
        self.sel_a_order() * self.sel_b_order()
    }

    pub fn path_integral(&self, mode: Mode, opts: &EnumerationOptions) -> Result<PathIntegralReport, BfError> {
        let m = &self.model;
        let closed = m.closed_form();
        let (phase_vector, brute) = match mode {
            Mode::Closed => (None, None),
            Mode::Brute | Mode::Both => {
                let pv = self.phase_vector(opts)?;
                let v = evaluate(&pv)?;
                (Some(pv), Some(v))
            }
        };
        Ok(PathIntegralReport {
            n: m.n,
            mode,
            phase_vector,
            brute_force_value: brute,
            closed_form_value: closed,
            factors: [m.mw_a.order(), m.mw_b.order(), m.sha_a.order()],
            matches: brute.map(|b| b == closed),
            pair_count: self.pair_count(),
        })
    }
}

pub fn build_av_instance(model: AvModel) -> Result<AvInstance, BfError> {
    AvInstance::build(model)
}

pub fn path_integral_av(inst: &AvInstance, opts: &EnumerationOptions) -> Result<PathIntegralReport, BfError> {
    inst.path_integral(Mode::Both, opts)
}

fn sel_group(factors: &[u64]) -> InvariantFactors {
    // The concatenation mw ++ sha need not be a divisibility chain; CyclicHom
    // only needs the orders of the generators, so a loose wrapper is enough.
    InvariantFactors::loose(factors.to_vec())
}

fn concat(x: &SelElement) -> Vec<u64> {
    x.mw.coords().iter().chain(x.sha.coords()).copied().collect()
}

fn product<'a>(mw: &'a InvariantFactors, sha: &'a InvariantFactors) -> impl Iterator<Item = SelElement> + 'a {
    mw.elements()
        .flat_map(move |m| sha.elements().map(move |s| SelElement { mw: m.clone(), sha: s }))
}

fn explicit_rows(model: &AvModel, sel_a_factors: &[u64], matrix: &[Vec<i64>]) -> Result<Vec<CyclicHom>, BfError> {
    let n = model.n;
    let nmw = model.mw_a.ngens();
    let width = sel_a_factors.len();
    if matrix.len() != model.sha_b.ngens() {
        return Err(BfError::InvalidModel(format!(
            "delta matrix has {} rows, sha_b has {} generators",
            matrix.len(),
            model.sha_b.ngens()
        )));
    }
    let domain = sel_group(sel_a_factors);
    matrix
        .iter()
        .zip(model.sha_b.factors())
        .map(|(row, &order)| {
            let mut images: Vec<u64> = if row.len() == width {
                row.iter().map(|&x| x.rem_euclid(n as i64) as u64).collect()
            } else if row.len() == width - nmw {
                let mut v = vec![0u64; nmw];
                v.extend(row.iter().map(|&x| x.rem_euclid(n as i64) as u64));
                v
            } else {
                return Err(BfError::InvalidModel(format!(
                    "delta row has {} entries, expected {} or {}",
                    row.len(),
                    width,
                    width - nmw
                )));
            };
            // the generator has order `order`, so its image must be killed by it
            if images.iter().any(|&h| crate::abgroup::mul_mod(h, order, n) != 0) {
                return Err(BfError::InvalidModel(format!(
                    "delta row {row:?} is not killed by the generator order {order}"
                )));
            }
            images.shrink_to_fit();
            CyclicHom::new(&domain, n, images).map_err(|e| BfError::InvalidModel(format!("delta row {row:?}: {e}")))
        })
        .collect()
}

fn injective(sha_b: &InvariantFactors, rows: &[CyclicHom], n: u64) -> bool {
    sha_b.elements().filter(|x| !x.is_zero()).all(|x| {
        let width = rows.first().map_or(0, |r| r.images().len());
        (0..width).any(|j| {
            x.coords()
                .iter()
                .zip(rows)
                .fold(0u64, |acc, (&c, r)| (acc + crate::abgroup::mul_mod(c, r.images()[j], n)) % n)
                != 0
        })
    })
}

fn random_injection(sha_b: &InvariantFactors, sel_a_factors: &[u64], n: u64, seed: u64) -> Result<Vec<CyclicHom>, BfError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = sel_group(sel_a_factors);
    for _ in 0..RANDOM_INJECTION_ATTEMPTS {
        let rows: Vec<CyclicHom> = sha_b
            .factors()
            .iter()
            .map(|&s| {
                // h must satisfy s·h ≡ 0 and d·h ≡ 0 (mod n): a multiple of n / gcd(s, d)
                let images = sel_a_factors
                    .iter()
                    .map(|&d| {
                        let g = num_integer::gcd(s, d);
                        rng.gen_range(0..g) * (n / g)
                    })
                    .collect();
                CyclicHom::new(&domain, n, images).expect("random row is a character")
            })
            .collect();
        if injective(sha_b, &rows, n) {
            return Ok(rows);
        }
    }
    Err(BfError::InvalidModel(format!(
        "no injective delta found in {RANDOM_INJECTION_ATTEMPTS} random attempts"
    )))
}

/// Size bounds for [`random_model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelBounds {
    /// Upper bound on the order of each of the four groups.
    pub max_group_order: u128,
    /// Upper bound on the number of cyclic factors drawn per group.
    pub max_factors: usize,
    /// Upper bound on `|sel_a|` and `|sel_b|`.
    pub max_selmer_order: u128,
}

impl Default for ModelBounds {
    fn default() -> Self {
        Self {
            max_group_order: 1000,
            max_factors: 3,
            max_selmer_order: 1000,
        }
    }
}

/// Reproducible random model; `|sha_a| = |sha_b|` and an injection always exists.
pub fn random_model(seed: u64, n: u64, bounds: ModelBounds) -> AvModel {
    assert!(n >= 2, "random_model needs n >= 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sel_cap = bounds.max_selmer_order.max(1);
    let cap = bounds.max_group_order.max(1);

    let mw_a = random_torsion_group(&mut rng, n, bounds.max_factors, cap);
    let mw_b = random_torsion_group(&mut rng, n, bounds.max_factors, cap);
    let sha_cap = cap
        .min(sel_cap / mw_a.order().max(1))
        .min(sel_cap / mw_b.order().max(1))
        .max(1);
    let sha_a = random_torsion_group(&mut rng, n, bounds.max_factors, sha_cap);
    let reshaped = random_same_order(&mut rng, n, &sha_a);
    let h2b = mw_a.dual(n).direct_sum(&sha_a.dual(n));

    let (sha_b, delta) = if reshaped != sha_a && reshaped.embeds_into(&h2b) {
        (reshaped, DeltaChoice::Seed { seed: rng.gen() })
    } else if rng.gen_bool(0.5) {
        (sha_a.clone(), DeltaChoice::canonical())
    } else {
        (sha_a.clone(), DeltaChoice::Seed { seed: rng.gen() })
    };

    AvModel {
        n,
        mw_a,
        mw_b,
        sha_a,
        sha_b,
        delta,
    }
}

fn random_torsion_group(rng: &mut ChaCha8Rng, n: u64, max_factors: usize, cap: u128) -> InvariantFactors {
    let choices: Vec<u64> = divisors(n).into_iter().filter(|&d| d > 1).collect();
    let k = rng.gen_range(0..=max_factors);
    let mut orders: Vec<u64> = Vec::new();
    let mut order = 1u128;
    for _ in 0..k {
        let d = choices[rng.gen_range(0..choices.len())];
        if order * d as u128 <= cap {
            order *= d as u128;
            orders.push(d);
        }
    }
    InvariantFactors::from_cyclic_orders(&orders)
}

/// A random `n`-torsion group of the same order as `g`: each prime exponent
/// of `|g|` is split into random parts no larger than the exponent of `p` in `n`.
fn random_same_order(rng: &mut ChaCha8Rng, n: u64, g: &InvariantFactors) -> InvariantFactors {
    let caps = factorize(n);
    let mut orders = Vec::new();
    for (p, es) in g.primary_exponents() {
        let cap = caps.iter().find(|(q, _)| *q == p).map(|(_, e)| *e).unwrap_or(0);
        let mut left: u32 = es.iter().sum();
        while left > 0 {
            let part = rng.gen_range(1..=left.min(cap));
            orders.push(p.pow(part));
            left -= part;
        }
    }
    InvariantFactors::from_cyclic_orders(&orders)
}
