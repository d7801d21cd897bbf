//! Verification battery run by `arithbf selftest`.
//!
//! Each check is exact; a check fails with a one-line reason naming the
//! first counterexample it met.

use std::time::Instant;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abgroup::InvariantFactors;
use crate::bf_av::{random_model, AvInstance, AvModel, DeltaChoice, ModelBounds};
use crate::bf_gm::{EnumerationOptions, FieldData, GmInstance, Mode};
use crate::cli::{cmd_av, cmd_gm, AvArgs, GmArgs};
use crate::cyclo::{cyclotomic_polynomial, phase_sum_as_integer, phase_sum_float, IntPolynomial, PhaseVector};
use crate::quadforms::{class_group, Discriminant, QuadForm};

pub const NATIVE_DISCRIMINANTS: [i64; 8] = [-3, -4, -7, -15, -23, -39, -47, -71];
pub const AV_MODULI: [u64; 7] = [2, 3, 4, 5, 6, 8, 9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    #[default]
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u64,
}

type Check = fn(Scope, &EnumerationOptions) -> Result<String, String>;

pub fn run(scope: Scope, corrupt_pairing: bool) -> Vec<CheckResult> {
    let opts = EnumerationOptions {
        corrupt_pairing,
        ..Default::default()
    };
    let checks: [(&'static str, Check); 9] = [
        ("gm_identity_native_fields", gm_identity),
        ("gm_stabilization", gm_stabilization),
        ("gm_etale_rearrangement", gm_etale),
        ("av_identity_random_models", av_identity),
        ("character_orthogonality", orthogonality),
        ("torsion_quotient_identities", structural),
        ("form_class_group_laws", form_laws),
        ("cyclotomic_sums", cyclotomic),
        ("jobs_determinism", determinism),
    ];
    checks
        .iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let res = f(scope, &opts);
            let elapsed_ms = t.elapsed().as_millis() as u64;
            match res {
                Ok(detail) => CheckResult {
                    name,
                    passed: true,
                    detail,
                    elapsed_ms,
                },
                Err(detail) => CheckResult {
                    name,
                    passed: false,
                    detail,
                    elapsed_ms,
                },
            }
        })
        .collect()
}

fn native(d: i64, n: u64) -> Result<GmInstance, String> {
    let d = Discriminant::new(d).map_err(|e| e.to_string())?;
    let fd = FieldData::imaginary_quadratic(d).map_err(|e| e.to_string())?;
    GmInstance::new(fd, n).map_err(|e| e.to_string())
}

fn gm_identity(scope: Scope, opts: &EnumerationOptions) -> Result<String, String> {
    let nmax = if scope == Scope::Full { 12 } else { 6 };
    let mut cases = 0;
    for d in NATIVE_DISCRIMINANTS {
        for n in 1..=nmax {
            let r = native(d, n)?
                .path_integral(Mode::Both, opts)
                .map_err(|e| format!("D = {d}, n = {n}: {e}"))?;
            if r.matches != Some(true) {
                return Err(format!(
                    "D = {d}, n = {n}: brute {:?} != closed {}",
                    r.brute_force_value, r.closed_form_value
                ));
            }
            cases += 1;
        }
    }
    for (d, n, want) in [(-23, 3, 3), (-4, 2, 2), (-3, 6, 6), (-39, 2, 8), (-47, 5, 5)] {
        let got = native(d, n)?.closed_form().map_err(|e| e.to_string())?.value;
        if got != want {
            return Err(format!("D = {d}, n = {n}: closed form {got}, expected {want}"));
        }
    }
    Ok(format!("{cases} (D, n) cases agree"))
}

fn gm_stabilization(_: Scope, opts: &EnumerationOptions) -> Result<String, String> {
    for n in (3..=30).step_by(3) {
        let inst = native(-23, n)?;
        let want = num_integer::gcd(2, n) as u128 * 3;
        let r = inst.path_integral(Mode::Both, opts).map_err(|e| e.to_string())?;
        let stab = inst.closed_form().map_err(|e| e.to_string())?.stabilized;
        if r.brute_force_value != Some(want) || stab != Some(want) {
            return Err(format!(
                "n = {n}: brute {:?}, stabilized {stab:?}, expected {want}",
                r.brute_force_value
            ));
        }
    }
    Ok("D = -23, n = 3..30 step 3".into())
}

fn gm_etale(_: Scope, _: &EnumerationOptions) -> Result<String, String> {
    for d in NATIVE_DISCRIMINANTS {
        for n in 1..=12 {
            let inst = native(d, n)?;
            let c = inst.closed_form().map_err(|e| e.to_string())?;
            let rhs = inst.cl_torsion().order() * c.units * inst.etale_count();
            if c.value != rhs {
                return Err(format!("D = {d}, n = {n}: {} != {rhs}", c.value));
            }
        }
    }
    Ok("96 cases".into())
}

fn av_identity(scope: Scope, opts: &EnumerationOptions) -> Result<String, String> {
    let models = if scope == Scope::Full { 200 } else { 20 };
    for i in 0..models {
        let n = AV_MODULI[i % AV_MODULI.len()];
        let m = random_model(1000 + i as u64, n, ModelBounds::default());
        let inst = AvInstance::build(m.clone()).map_err(|e| format!("model {i}: {e}"))?;
        let r = inst
            .path_integral(Mode::Both, opts)
            .map_err(|e| format!("model {i} {m:?}: {e}"))?;
        if r.matches != Some(true) {
            return Err(format!("model {i}: brute {:?} != closed {}", r.brute_force_value, r.closed_form_value));
        }
    }
    let (shapes, draws) = if scope == Scope::Full { (10, 20) } else { (3, 5) };
    for (k, shape) in fixed_shapes().into_iter().take(shapes).enumerate() {
        for s in 0..draws {
            let m = AvModel {
                delta: DeltaChoice::Seed { seed: s },
                ..shape.clone()
            };
            let want = m.closed_form();
            let inst = AvInstance::build(m).map_err(|e| format!("shape {k}: {e}"))?;
            let r = inst.path_integral(Mode::Both, opts).map_err(|e| e.to_string())?;
            if r.brute_force_value != Some(want) {
                return Err(format!("shape {k}, seed {s}: {:?} != {want}", r.brute_force_value));
            }
        }
    }
    Ok(format!("{models} random models, {shapes} shapes x {draws} injections"))
}

/// Model shapes used for the injection-invariance check.
pub fn fixed_shapes() -> Vec<AvModel> {
    let g = |v: &[u64]| InvariantFactors::new(v.to_vec()).expect("valid chain");
    let m = |n, a: &[u64], b: &[u64], sa: &[u64], sb: &[u64]| AvModel {
        n,
        mw_a: g(a),
        mw_b: g(b),
        sha_a: g(sa),
        sha_b: g(sb),
        delta: DeltaChoice::canonical(),
    };
    vec![
        m(2, &[2], &[2, 2], &[2, 2], &[2, 2]),
        m(3, &[], &[3], &[3, 3], &[3, 3]),
        m(4, &[2], &[4], &[4], &[2, 2]),
        m(4, &[], &[], &[2, 4], &[2, 4]),
        m(5, &[5], &[], &[5, 5], &[5, 5]),
        m(6, &[6], &[2], &[6], &[6]),
        m(8, &[2], &[], &[8], &[2, 4]),
        m(9, &[3], &[3], &[9], &[3, 3]),
        m(6, &[], &[3], &[2, 6], &[2, 6]),
        m(2, &[2, 2], &[2], &[2, 2, 2], &[2, 2, 2]),
    ]
}

/// Random group of order at most `cap`.
pub fn random_group(rng: &mut impl Rng, cap: u64) -> InvariantFactors {
    let mut orders = Vec::new();
    let mut order = 1u64;
    for _ in 0..rng.gen_range(0..=4) {
        let d = rng.gen_range(2..=30);
        if order * d <= cap {
            order *= d;
            orders.push(d);
        }
    }
    InvariantFactors::from_cyclic_orders(&orders)
}

fn orthogonality(scope: Scope, _: &EnumerationOptions) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cases = if scope == Scope::Full { 100 } else { 25 };
    for _ in 0..cases {
        let g = random_group(&mut rng, 1000);
        let n = rng.gen_range(1..=12u64);
        let elems: Vec<_> = g.elements().collect();
        let x = &elems[rng.gen_range(0..elems.len())];
        let mut pv = PhaseVector::new(n);
        for phi in g.homs_to_cyclic(n) {
            pv.record(phi.eval(x).map_err(|e| e.to_string())?, 1);
        }
        let want: i64 = if g.in_multiple_subgroup(x, n) {
            g.hom_count(n) as i64
        } else {
            0
        };
        if phase_sum_as_integer(&pv) != Some(want.into()) {
            return Err(format!("G = {g:?}, n = {n}, x = {:?}: expected {want}", x.coords()));
        }
    }
    Ok(format!("{cases} random (G, n, x)"))
}

fn structural(scope: Scope, _: &EnumerationOptions) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases = if scope == Scope::Full { 100 } else { 25 };
    for _ in 0..cases {
        let g = random_group(&mut rng, 1000);
        let n = rng.gen_range(1..=12u64);
        let tors = |m: u64| g.elements().filter(|x| g.scale(m, x).is_zero()).count() as u128;
        let n_g = g.elements().filter(|x| g.in_multiple_subgroup(x, n)).count() as u128;
        let g_n = tors(n);
        let g_n2 = tors(n * n);
        let quotient = g.order() / n_g;
        let ntn = g.n_times_torsion(n).order();
        if g_n != quotient || g.torsion_subgroup(n).0.order() != g_n || g.quotient_mod_n(n).0.order() != quotient {
            return Err(format!("G = {g:?}, n = {n}: |G[n]| = {g_n}, |G/nG| = {quotient}"));
        }
        if ntn * g_n != g_n2 {
            return Err(format!("G = {g:?}, n = {n}: |nG[n^2]| {ntn} * |G[n]| {g_n} != |G[n^2]| {g_n2}"));
        }
    }
    Ok(format!("{cases} random (G, n)"))
}

fn form_laws(scope: Scope, _: &EnumerationOptions) -> Result<String, String> {
    let lower = if scope == Scope::Full { -10_000 } else { -1_000 };
    let discs = Discriminant::fundamentals_above(lower);
    for &d in &discs {
        let cg = class_group(d).map_err(|e| e.to_string())?;
        if cg.structure.order() as usize != cg.class_number() {
            return Err(format!("D = {d}: |Cl| {} != h {}", cg.structure.order(), cg.class_number()));
        }
        let id = cg.identity();
        for &f in &cg.forms {
            if cg.compose(id, f) != f || cg.compose(f, id) != f {
                return Err(format!("D = {d}: identity law fails at {f}"));
            }
            let inv = QuadForm::new(f.a, -f.b, f.c);
            if cg.compose(f, inv) != id {
                return Err(format!("D = {d}: inverse law fails at {f}"));
            }
        }
        if cg.class_number() <= 20 {
            for &f in &cg.forms {
                for &g in &cg.forms {
                    let fg = cg.compose(f, g);
                    for &h in &cg.forms {
                        if cg.compose(fg, h) != cg.compose(f, cg.compose(g, h)) {
                            return Err(format!("D = {d}: associativity fails at {f}, {g}, {h}"));
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{} fundamental discriminants above {lower}", discs.len()))
}

fn cyclotomic(scope: Scope, _: &EnumerationOptions) -> Result<String, String> {
    let nmax = if scope == Scope::Full { 200 } else { 60 };
    for n in 1..=nmax {
        let prod = crate::abgroup::divisors(n)
            .into_iter()
            .fold(IntPolynomial::from_i64(&[1]), |acc, d| &acc * &cyclotomic_polynomial(d));
        if prod != IntPolynomial::x_pow_minus_one(n as usize) {
            return Err(format!("product of Phi_d over d | {n} is not x^{n} - 1"));
        }
        if n > 1 {
            let uniform = PhaseVector::from_counts(n, &vec![7; n as usize]);
            if phase_sum_as_integer(&uniform) != Some(0.into()) {
                return Err(format!("uniform phase vector at n = {n} does not vanish"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let samples = if scope == Scope::Full { 1000 } else { 100 };
    for _ in 0..samples {
        let n = rng.gen_range(1..=24u64);
        let counts: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=1_000_000)).collect();
        let pv = PhaseVector::from_counts(n, &counts);
        if let Some(m) = phase_sum_as_integer(&pv) {
            let z = phase_sum_float(&pv);
            let m: f64 = m.to_string().parse().unwrap_or(f64::NAN);
            if (z.re - m).abs() > 1e-6 * m.abs().max(1.0) || z.im.abs() > 1e-6 * m.abs().max(1.0) {
                return Err(format!("n = {n}, counts {counts:?}: exact {m}, float {z}"));
            }
        }
    }
    Ok(format!("n <= {nmax}, {samples} random phase vectors"))
}

fn mask_timing(s: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(s).expect("report is JSON");
    if let Some(obj) = v.as_object_mut() {
        obj.insert("elapsed_ms".into(), serde_json::Value::Null);
    }
    v.to_string()
}

fn determinism(scope: Scope, _: &EnumerationOptions) -> Result<String, String> {
    let nmax = if scope == Scope::Full { 12 } else { 4 };
    let jobs = [1usize, 4, 16];
    for d in NATIVE_DISCRIMINANTS {
        for n in 1..=nmax {
            let outs: Vec<String> = jobs
                .iter()
                .map(|&j| {
                    let mut a = GmArgs::for_disc(d, n);
                    a.jobs = j;
                    mask_timing(&cmd_gm(&a).stdout)
                })
                .collect();
            if outs.iter().any(|o| o != &outs[0]) {
                return Err(format!("gm D = {d}, n = {n} differs across --jobs"));
            }
        }
    }
    let models = if scope == Scope::Full { 200 } else { 10 };
    for i in 0..models {
        let n = AV_MODULI[i % AV_MODULI.len()];
        let outs: Vec<String> = jobs
            .iter()
            .map(|&j| {
                let mut a = AvArgs::for_random(1000 + i as u64, n);
                a.jobs = j;
                mask_timing(&cmd_av(&a).stdout)
            })
            .collect();
        if outs.iter().any(|o| o != &outs[0]) {
            return Err(format!("av model {i} differs across --jobs"));
        }
    }
    Ok(format!("--jobs 1, 4, 16 agree on gm n <= {nmax} and {models} av models"))
}
