//! The BF path integral for the multiplicative group over the ring of
//! integers of a totally imaginary field.
//!
//! The moduli set is `H^1(X, Z/n) x H^1(X, mu_n)`. We model
//!
//! * `H^1(X, Z/n)` as `Hom(Cl_F, Z/n)` (unramified class field theory, no
//!   real places),
//! * `H^1(X, mu_n)` as pairs `(u, t)` with `u` indexing `O^x/(O^x)^n` and
//!   `t ∈ Cl_F[n]`,
//! * the Bockstein as `t ↦ image of t in Cl_F/n`,
//! * the cup product into `(1/n)Z/Z` as evaluation of the character.
//!
//! The brute-force sum is compared with
//! `|n Cl[n^2]| · |O^x/(O^x)^n| · |Cl/n|`.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{AbElement, AbGroupError, CyclicHom, GroupHom, InvariantFactors};
use crate::cyclo::{phase_sum_as_integer, to_u128, Phase, PhaseVector};
use crate::quadforms::{class_group, unit_data, Discriminant, QuadFormError};

/// Default ceiling on `|H^1(X,Z/n)| · |H^1(X,mu_n)|` for brute force.
pub const DEFAULT_PAIR_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BfError {
    #[error("pair count {pairs} exceeds the budget {budget}")]
    BudgetExceeded { pairs: u128, budget: u128 },
    #[error("phase sum is not an integer (phase counts {0:?})")]
    NotAnInteger(Vec<String>),
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
    #[error("invalid field data: {0}")]
    InvalidField(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("n must be at least {min}, got {got}")]
    BadModulus { got: u64, min: u64 },
    #[error(transparent)]
    Group(#[from] AbGroupError),
    #[error(transparent)]
    Forms(#[from] QuadFormError),
}

impl BfError {
    /// Whether the failure is a resource limit rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, BfError::BudgetExceeded { .. } | BfError::Overflow(_))
    }
}

/// How the path integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Brute,
    Closed,
    #[default]
    Both,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Brute => "brute",
            Mode::Closed => "closed",
            Mode::Both => "both",
        })
    }
}

/// Knobs for brute-force enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub jobs: usize,
    pub budget_pairs: u128,
    /// Multiply by the unit-part size instead of looping over it.
    pub unit_shortcut: bool,
    /// Negative control: replaces the phase `k` by `k^2`, breaking bilinearity.
    pub corrupt_pairing: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            budget_pairs: DEFAULT_PAIR_BUDGET,
            unit_shortcut: true,
            corrupt_pairing: false,
        }
    }
}

impl EnumerationOptions {
    pub(crate) fn with_pool<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.max(1))
            .build()
            .expect("thread pool");
        pool.install(f)
    }

    pub(crate) fn phase(&self, k: u64, n: u64) -> u64 {
        if self.corrupt_pairing {
            crate::abgroup::mul_mod(k, k, n)
        } else {
            k
        }
    }
}

/// Arithmetic data of a totally imaginary field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldData {
    pub label: String,
    pub cl: InvariantFactors,
    pub unit_rank: u32,
    /// Number of roots of unity in the field.
    pub w: u64,
    pub degree: u32,
}

impl FieldData {
    pub fn new(label: impl Into<String>, cl: InvariantFactors, unit_rank: u32, w: u64, degree: u32) -> Result<Self, BfError> {
        let fd = Self {
            label: label.into(),
            cl,
            unit_rank,
            w,
            degree,
        };
        fd.validate()?;
        Ok(fd)
    }

    pub fn validate(&self) -> Result<(), BfError> {
        if self.degree < 2 || self.degree % 2 != 0 {
            return Err(BfError::InvalidField(format!(
                "degree {} must be even and at least 2",
                self.degree
            )));
        }
        if self.unit_rank != self.degree / 2 - 1 {
            return Err(BfError::InvalidField(format!(
                "unit rank {} must equal degree/2 - 1 = {}",
                self.unit_rank,
                self.degree / 2 - 1
            )));
        }
        if self.w < 2 || self.w % 2 != 0 {
            return Err(BfError::InvalidField(format!(
                "roots of unity order {} must be even and at least 2",
                self.w
            )));
        }
        Ok(())
    }

    /// Imaginary quadratic field of fundamental discriminant `d`, computed natively.
    pub fn imaginary_quadratic(d: Discriminant) -> Result<Self, BfError> {
        let cg = class_group(d)?;
        Self::new(format!("Q(sqrt({}))", d.get()), cg.structure, 0, unit_data(d), 2)
    }

    /// `|O^x / (O^x)^n| = gcd(w, n) · n^unit_rank`.
    pub fn unit_quotient_order(&self, n: u64) -> Result<u128, BfError> {
        (n as u128)
            .checked_pow(self.unit_rank)
            .and_then(|p| p.checked_mul(self.w.gcd(&n) as u128))
            .ok_or(BfError::Overflow("|O^x/(O^x)^n|"))
    }
}

/// Orders of `H^i(X, mu_n)` for `i = 0..=3`; higher groups vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CohomologyOrders {
    pub h0: u128,
    pub h1: u128,
    pub h2: u128,
    pub h3: u128,
}

impl CohomologyOrders {
    pub fn order(&self, i: usize) -> u128 {
        match i {
            0 => self.h0,
            1 => self.h1,
            2 => self.h2,
            3 => self.h3,
            _ => 1,
        }
    }

    pub fn as_array(&self) -> [u128; 4] {
        [self.h0, self.h1, self.h2, self.h3]
    }
}

/// A class of `H^1(X, mu_n)`: unit index and class-group part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct H1MuElement {
    pub u: u128,
    pub t: AbElement,
}

/// Closed form and its three factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GmClosedForm {
    pub value: u128,
    /// `|n Cl[n^2]|`
    pub n_cl_n2: u128,
    /// `|O^x / (O^x)^n|`
    pub units: u128,
    /// `|Cl / n|`
    pub cl_mod_n: u128,
    /// `|O^x/(O^x)^n| · |Cl|`, reported when `Cl[n] = Cl`.
    pub stabilized: Option<u128>,
}

/// Outcome of a path-integral evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathIntegralReport {
    pub n: u64,
    pub mode: Mode,
    pub phase_vector: Option<PhaseVector>,
    pub brute_force_value: Option<u128>,
    pub closed_form_value: u128,
    pub factors: [u128; 3],
    #[serde(rename = "match")]
    pub matches: Option<bool>,
    pub pair_count: u128,
}

impl PathIntegralReport {
    /// True unless a brute-force value disagrees with the closed form.
    pub fn consistent(&self) -> bool {
        self.matches.unwrap_or(true)
    }
}

/// `(Field, n)` with the group-theoretic pieces precomputed.
#[derive(Debug, Clone)]
pub struct GmInstance {
    pub field: FieldData,
    pub n: u64,
    cl_n: InvariantFactors,
    embed: GroupHom,
    cl_mod_n: InvariantFactors,
    project: GroupHom,
}

impl GmInstance {
    pub fn new(field: FieldData, n: u64) -> Result<Self, BfError> {
        if n < 1 {
            return Err(BfError::BadModulus { got: n, min: 1 });
        }
        field.validate()?;
        let (cl_n, embed) = field.cl.torsion_subgroup(n);
        let (cl_mod_n, project) = field.cl.quotient_mod_n(n);
        Ok(Self {
            field,
            n,
            cl_n,
            embed,
            cl_mod_n,
            project,
        })
    }

    /// `Cl[n]`
    pub fn cl_torsion(&self) -> &InvariantFactors {
        &self.cl_n
    }

    /// `Cl/n`
    pub fn cl_quotient(&self) -> &InvariantFactors {
        &self.cl_mod_n
    }

    pub fn cohomology_orders(&self) -> Result<CohomologyOrders, BfError> {
        let n = self.n;
        let units = self.field.unit_quotient_order(n)?;
        Ok(CohomologyOrders {
            h0: self.field.w.gcd(&n) as u128,
            h1: units
                .checked_mul(self.cl_n.order())
                .ok_or(BfError::Overflow("|H^1(X, mu_n)|"))?,
            h2: self.cl_mod_n.order(),
            h3: n as u128,
        })
    }

    /// `|H^1(X, Z/n)| = |Hom(Cl, Z/n)|`
    pub fn h1_z_order(&self) -> u128 {
        self.field.cl.hom_count(self.n)
    }

    pub fn pair_count(&self) -> Result<u128, BfError> {
        self.h1_z_order()
            .checked_mul(self.cohomology_orders()?.h1)
            .ok_or(BfError::Overflow("pair count"))
    }

    /// Classes of `H^1(X, mu_n)` with the given unit index range.
    pub fn h1_mu_elements(&self) -> Result<impl Iterator<Item = H1MuElement> + '_, BfError> {
        let units = self.field.unit_quotient_order(self.n)?;
        Ok((0..units).flat_map(move |u| self.cl_n.elements().map(move |t| H1MuElement { u, t })))
    }

    /// Whether `b` is a valid class for this instance.
    pub fn contains(&self, b: &H1MuElement) -> bool {
        self.cl_n.contains(&b.t)
            && self
                .field
                .unit_quotient_order(self.n)
                .map(|u| b.u < u)
                .unwrap_or(false)
    }

    /// Bockstein `H^1(X, mu_n) -> H^2(X, mu_n) = Cl/n`: forget the unit part,
    /// embed `t` into `Cl`, reduce modulo `n`.
    pub fn bockstein(&self, b: &H1MuElement) -> AbElement {
        self.project.apply(&self.embed.apply(&b.t))
    }

    /// `BF(a, b) = <a, δb>` as a phase in `(1/n)Z/Z`.
    pub fn bf_value(&self, a: &CyclicHom, b: &H1MuElement) -> Result<Phase, BfError> {
        let delta = self.bockstein(b);
        let lift = self.field.cl.lift_from_quotient(self.n, &delta);
        Ok(Phase::new(a.eval(&lift)?, self.n))
    }

    pub fn closed_form(&self) -> Result<GmClosedForm, BfError> {
        let n = self.n;
        let n_cl_n2 = self.field.cl.n_times_torsion(n).order();
        let units = self.field.unit_quotient_order(n)?;
        let cl_mod_n = self.cl_mod_n.order();
        let value = n_cl_n2
            .checked_mul(units)
            .and_then(|v| v.checked_mul(cl_mod_n))
            .ok_or(BfError::Overflow("closed form"))?;
        let stabilized = if self.field.cl.is_killed_by(n) {
            Some(units.checked_mul(self.field.cl.order()).ok_or(BfError::Overflow("stabilized form"))?)
        } else {
            None
        };
        Ok(GmClosedForm {
            value,
            n_cl_n2,
            units,
            cl_mod_n,
            stabilized,
        })
    }

    /// Count of unramified `Z/n`-algebras embeddable in a `Z/n^2`-algebra,
    /// read off as `|n Cl[n^2]|`.
    pub fn etale_count(&self) -> u128 {
        self.field.cl.n_times_torsion(self.n).order()
    }

    /// Brute-force phase tally over the whole moduli set.
    pub fn phase_vector(&self, opts: &EnumerationOptions) -> Result<PhaseVector, BfError> {
        let pairs = self.pair_count()?;
        if pairs > opts.budget_pairs {
            return Err(BfError::BudgetExceeded {
                pairs,
                budget: opts.budget_pairs,
            });
        }
        let n = self.n;
        let units = self.field.unit_quotient_order(n)?;
        let homs: Vec<CyclicHom> = self.field.cl.homs_to_cyclic(n).collect();
        let ts: Vec<AbElement> = self.cl_n.elements().collect();

        let tally = |t: &AbElement| -> PhaseVector {
            let mut pv = PhaseVector::new(n);
            let b0 = H1MuElement { u: 0, t: t.clone() };
            let lift = self.field.cl.lift_from_quotient(n, &self.bockstein(&b0));
            for a in &homs {
                let k = opts.phase(a.eval_unchecked(lift.coords()), n);
                if opts.unit_shortcut {
                    pv.record(k, units);
                } else {
                    for u in 0..units {
                        let b = H1MuElement { u, t: t.clone() };
                        let k = opts.phase(self.bf_value(a, &b).map(|p| p.numerator).unwrap_or(0), n);
                        pv.record(k, 1);
                    }
                }
            }
            pv
        };

        let chunk = ts.len().div_ceil(opts.jobs.max(1)).max(1);
        let pv = opts.with_pool(|| {
            ts.par_chunks(chunk)
                .map(|ch| {
                    let mut acc = PhaseVector::new(n);
                    for t in ch {
                        acc.merge(&tally(t));
                    }
                    acc
                })
                .reduce(|| PhaseVector::new(n), |mut a, b| {
                    a.merge(&b);
                    a
                })
        });
        Ok(pv)
    }

    pub fn path_integral(&self, mode: Mode, opts: &EnumerationOptions) -> Result<PathIntegralReport, BfError> {
        let closed = self.closed_form()?;
        let pair_count = self.pair_count()?;
        let (phase_vector, brute) = match mode {
            Mode::Closed => (None, None),
            Mode::Brute | Mode::Both => {
                let pv = self.phase_vector(opts)?;
                let value = evaluate(&pv)?;
                (Some(pv), Some(value))
            }
        };
        Ok(PathIntegralReport {
            n: self.n,
            mode,
            phase_vector,
            brute_force_value: brute,
            closed_form_value: closed.value,
            factors: [closed.n_cl_n2, closed.units, closed.cl_mod_n],
            matches: brute.map(|b| b == closed.value),
            pair_count,
        })
    }
}

/// Exact integer value of a tally, or [`BfError::NotAnInteger`].
pub(crate) fn evaluate(pv: &PhaseVector) -> Result<u128, BfError> {
    let v = phase_sum_as_integer(pv)
        .ok_or_else(|| BfError::NotAnInteger(pv.counts().iter().map(|c| c.to_string()).collect()))?;
    to_u128(&v).ok_or_else(|| BfError::NotAnInteger(vec![v.to_string()]))
}

/// Free-function form of [`GmInstance::cohomology_orders`].
pub fn cohomology_orders(inst: &GmInstance) -> Result<CohomologyOrders, BfError> {
    inst.cohomology_orders()
}

pub fn closed_form_gm(inst: &GmInstance) -> Result<GmClosedForm, BfError> {
    inst.closed_form()
}

pub fn path_integral_gm(inst: &GmInstance, mode: Mode, opts: &EnumerationOptions) -> Result<PathIntegralReport, BfError> {
    inst.path_integral(mode, opts)
}

pub fn etale_count(inst: &GmInstance) -> u128 {
    inst.etale_count()
}
