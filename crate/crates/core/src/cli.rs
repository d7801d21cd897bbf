//! Command layer behind the `arithbf` binary: argument types, input file
//! formats, reports, and exit codes.
//!
//! Every command returns a [`CommandOutput`] instead of printing, so reports
//! can be compared byte for byte in tests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::abgroup::InvariantFactors;
use crate::bf_av::{random_model, AvInstance, AvModel, DeltaChoice, ModelBounds};
use crate::bf_gm::{
    BfError, CohomologyOrders, EnumerationOptions, FieldData, GmClosedForm, GmInstance, Mode, PathIntegralReport,
    DEFAULT_PAIR_BUDGET,
};
use crate::cyclo::{phase_sum_float, PhaseVector};
use crate::quadforms::{class_group, unit_data, Discriminant, QuadFormError};
use crate::selftest::{self, Scope};

pub const DEFAULT_MAX_N: u64 = 1000;
pub const DEFAULT_MAX_DISC: u64 = 1_000_000;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    /// Identity holds, or every check passed.
    Ok = 0,
    /// Brute force disagrees with the closed form.
    Mismatch = 1,
    InputError = 2,
    ResourceLimit = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub status: ExitStatus,
}

impl CommandOutput {
    fn ok(stdout: String, status: ExitStatus) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            status,
        }
    }

    fn fail(msg: impl Into<String>, status: ExitStatus) -> Self {
        Self {
            stdout: String::new(),
            stderr: msg.into(),
            status,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "arithbf", version, about = "Exact finite BF path integrals over class groups and Selmer models")]
pub struct Cli {
    /// Print nothing; report through the exit code only.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class group of an imaginary quadratic field.
    Classgroup(ClassgroupArgs),
    /// Path integral for G_m over a totally imaginary field.
    Gm(GmArgs),
    /// Path integral for a synthetic pair of dual abelian varieties.
    Av(AvArgs),
    /// Run the verification battery.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ClassgroupArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub disc: i64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_MAX_DISC)]
    pub max_disc: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GmArgs {
    /// Fundamental discriminant of an imaginary quadratic field.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "field_data", required_unless_present = "field_data")]
    pub disc: Option<i64>,
    /// JSON file with precomputed field invariants.
    #[arg(long)]
    pub field_data: Option<PathBuf>,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    pub mode: Mode,
    /// Loop over the unit part instead of multiplying by its size.
    #[arg(long)]
    pub no_shortcut: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
    pub budget_pairs: u128,
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    pub max_n: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_DISC)]
    pub max_disc: u64,
    /// Omit timing from the report.
    #[arg(long)]
    pub no_timing: bool,
}

impl GmArgs {
    pub fn for_disc(disc: i64, n: u64) -> Self {
        Self {
            disc: Some(disc),
            field_data: None,
            n,
            mode: Mode::Both,
            no_shortcut: false,
            jobs: 1,
            format: Format::Json,
            budget_pairs: DEFAULT_PAIR_BUDGET,
            max_n: DEFAULT_MAX_N,
            max_disc: DEFAULT_MAX_DISC,
            no_timing: false,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AvArgs {
    /// JSON model file.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub model: Option<PathBuf>,
    /// Draw a random model from --seed and --n.
    #[arg(long, requires_all = ["seed", "n"])]
    pub random: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
    pub budget_pairs: u128,
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    pub max_n: u64,
    #[arg(long)]
    pub no_timing: bool,
}

impl AvArgs {
    pub fn for_random(seed: u64, n: u64) -> Self {
        Self {
            model: None,
            random: true,
            seed: Some(seed),
            n: Some(n),
            jobs: 1,
            format: Format::Json,
            budget_pairs: DEFAULT_PAIR_BUDGET,
            max_n: DEFAULT_MAX_N,
            no_timing: false,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    #[arg(long, value_enum, default_value_t = Scope::Quick)]
    pub scope: Scope,
    /// Negative control: break bilinearity of the pairing.
    #[arg(long, hide = true)]
    pub corrupt_pairing: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Field invariants ingested from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDataFile {
    pub label: String,
    pub class_group_invariants: Vec<u64>,
    pub unit_rank: u32,
    pub roots_of_unity_order: u64,
    pub degree: u32,
}

impl FieldDataFile {
    pub fn into_field_data(self) -> Result<FieldData, BfError> {
        let cl = InvariantFactors::new(self.class_group_invariants)
            .map_err(|e| BfError::InvalidField(format!("class_group_invariants: {e}")))?;
        FieldData::new(self.label, cl, self.unit_rank, self.roots_of_unity_order, self.degree)
    }
}

/// Synthetic abelian-variety model ingested from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvModelFile {
    pub n: u64,
    pub mw_a: Vec<u64>,
    pub mw_b: Vec<u64>,
    pub sha_a: Vec<u64>,
    pub sha_b: Vec<u64>,
    #[serde(default = "DeltaChoice::canonical")]
    pub delta: DeltaChoice,
    /// Free-form name of the example.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Where externally published orders came from; never verified here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl AvModelFile {
    pub fn into_model(self) -> Result<AvModel, BfError> {
        let group = |name: &str, v: Vec<u64>| {
            InvariantFactors::new(v).map_err(|e| BfError::InvalidModel(format!("{name}: {e}")))
        };
        let model = AvModel {
            n: self.n,
            mw_a: group("mw_a", self.mw_a)?,
            mw_b: group("mw_b", self.mw_b)?,
            sha_a: group("sha_a", self.sha_a)?,
            sha_b: group("sha_b", self.sha_b)?,
            delta: self.delta,
        };
        model.validate()?;
        Ok(model)
    }
}

impl From<&AvModel> for AvModelFile {
    fn from(m: &AvModel) -> Self {
        Self {
            n: m.n,
            mw_a: m.mw_a.factors().to_vec(),
            mw_b: m.mw_b.factors().to_vec(),
            sha_a: m.sha_a.factors().to_vec(),
            sha_b: m.sha_b.factors().to_vec(),
            delta: m.delta.clone(),
            label: None,
            source: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassGroupReport {
    pub discriminant: i64,
    pub class_number: usize,
    pub invariant_factors: Vec<u64>,
    pub reduced_forms: Vec<[i64; 3]>,
    pub roots_of_unity: u64,
}

/// Floating-point value of the phase sum. Never used for verdicts.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct DisplayValue {
    pub re: f64,
    pub im: f64,
}

impl DisplayValue {
    fn of(pv: &PhaseVector) -> Self {
        let z = phase_sum_float(pv);
        // round away float noise so output is stable across platforms
        let clean = |x: f64| {
            let r = (x * 1e9).round() / 1e9;
            if r == 0.0 {
                0.0
            } else {
                r
            }
        };
        Self {
            re: clean(z.re),
            im: clean(z.im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhaseCounts {
    pub n: u64,
    pub counts: Vec<u128>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldSummary {
    pub label: String,
    /// `native` (computed from reduced forms) or `ingested`.
    pub origin: String,
    pub class_group: Vec<u64>,
    pub unit_rank: u32,
    pub roots_of_unity: u64,
    pub degree: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GmReport {
    pub kind: String,
    pub field: FieldSummary,
    pub n: u64,
    pub mode: Mode,
    pub unit_shortcut: bool,
    pub cohomology_orders: [u128; 4],
    pub closed_form_value: u128,
    /// `|n Cl[n^2]|`, `|O^x/(O^x)^n|`, `|Cl/n|`
    pub factors: [u128; 3],
    pub stabilized_value: Option<u128>,
    pub brute_force_value: Option<u128>,
    #[serde(rename = "match")]
    pub matches: Option<bool>,
    pub pair_count: u128,
    pub etale_count: u128,
    pub phase_vector: Option<PhaseCounts>,
    pub display_value: Option<DisplayValue>,
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AvReport {
    pub kind: String,
    pub model: AvModelFile,
    pub n: u64,
    pub closed_form_value: u128,
    pub symmetric_closed_form_value: u128,
    /// `|A(F)/n|`, `|B(F)/n|`, `|Sha(A)[n]|`
    pub factors: [u128; 3],
    pub selmer_orders: [u128; 2],
    pub bockstein_kernel_size: u128,
    pub brute_force_value: Option<u128>,
    #[serde(rename = "match")]
    pub matches: Option<bool>,
    pub pair_count: u128,
    pub phase_vector: Option<PhaseCounts>,
    pub display_value: Option<DisplayValue>,
    pub elapsed_ms: Option<u64>,
}

fn phase_counts(pv: &PhaseVector) -> PhaseCounts {
    use num_traits::ToPrimitive;
    PhaseCounts {
        n: pv.modulus(),
        counts: pv.counts().iter().map(|c| c.to_u128().unwrap_or(u128::MAX)).collect(),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn classify(e: &BfError) -> ExitStatus {
    if e.is_resource_limit() {
        ExitStatus::ResourceLimit
    } else {
        ExitStatus::InputError
    }
}

fn check_disc(disc: i64, max_disc: u64) -> Result<Discriminant, CommandOutput> {
    if disc.unsigned_abs() > max_disc {
        return Err(CommandOutput::fail(
            format!("error: |D| = {} exceeds --max-disc {max_disc}", disc.unsigned_abs()),
            ExitStatus::ResourceLimit,
        ));
    }
    Discriminant::new(disc).map_err(|e| CommandOutput::fail(format!("error: {e}"), ExitStatus::InputError))
}

pub fn cmd_classgroup(args: &ClassgroupArgs) -> CommandOutput {
    let d = match check_disc(args.disc, args.max_disc) {
        Ok(d) => d,
        Err(out) => return out,
    };
    let cg = match class_group(d) {
        Ok(cg) => cg,
        Err(e @ QuadFormError::ClassNumberTooLarge { .. }) => {
            return CommandOutput::fail(format!("error: {e}"), ExitStatus::ResourceLimit)
        }
        Err(e) => return CommandOutput::fail(format!("error: {e}"), ExitStatus::InputError),
    };
    let report = ClassGroupReport {
        discriminant: d.get(),
        class_number: cg.class_number(),
        invariant_factors: cg.structure.factors().to_vec(),
        reduced_forms: cg.forms.iter().map(|f| [f.a, f.b, f.c]).collect(),
        roots_of_unity: unit_data(d),
    };
    let out = match args.format {
        Format::Json => to_json(&report),
        Format::Text => {
            let forms: Vec<String> = cg.forms.iter().map(|f| f.to_string()).collect();
            format!(
                "discriminant      {}\nclass number      {}\ninvariant factors {:?}\nstructure         {}\nroots of unity    {}\nreduced forms     {}\n",
                report.discriminant,
                report.class_number,
                report.invariant_factors,
                cg.structure,
                report.roots_of_unity,
                forms.join(" ")
            )
        }
    };
    CommandOutput::ok(out, ExitStatus::Ok)
}

fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CommandOutput> {
    let text = fs::read_to_string(path)
        .map_err(|e| CommandOutput::fail(format!("error: cannot read {}: {e}", path.display()), ExitStatus::InputError))?;
    serde_json::from_str(&text)
        .map_err(|e| CommandOutput::fail(format!("error: malformed {}: {e}", path.display()), ExitStatus::InputError))
}

fn gm_field(args: &GmArgs) -> Result<(FieldData, FieldSummary), CommandOutput> {
    let (fd, origin, note) = if let Some(path) = &args.field_data {
        let file: FieldDataFile = load_json(path)?;
        let fd = file
            .into_field_data()
            .map_err(|e| CommandOutput::fail(format!("error: {e}"), ExitStatus::InputError))?;
        (
            fd,
            "ingested",
            Some("field data checked for internal consistency only; not verified to describe a real field".to_string()),
        )
    } else {
        let disc = args.disc.expect("clap enforces a source");
        let d = check_disc(disc, args.max_disc)?;
        let fd = FieldData::imaginary_quadratic(d).map_err(|e| {
            let status = match e {
                BfError::Forms(QuadFormError::ClassNumberTooLarge { .. }) => ExitStatus::ResourceLimit,
                _ => classify(&e),
            };
            CommandOutput::fail(format!("error: {e}"), status)
        })?;
        (fd, "native", None)
    };
    let summary = FieldSummary {
        label: fd.label.clone(),
        origin: origin.to_string(),
        class_group: fd.cl.factors().to_vec(),
        unit_rank: fd.unit_rank,
        roots_of_unity: fd.w,
        degree: fd.degree,
        note,
    };
    Ok((fd, summary))
}

pub fn cmd_gm(args: &GmArgs) -> CommandOutput {
    let start = Instant::now();
    if args.n > args.max_n {
        return CommandOutput::fail(
            format!("error: n = {} exceeds --max-n {}", args.n, args.max_n),
            ExitStatus::ResourceLimit,
        );
    }
    let (fd, summary) = match gm_field(args) {
        Ok(x) => x,
        Err(out) => return out,
    };
    let opts = EnumerationOptions {
        jobs: args.jobs.max(1),
        budget_pairs: args.budget_pairs,
        unit_shortcut: !args.no_shortcut,
        corrupt_pairing: false,
    };
    let result = GmInstance::new(fd, args.n).and_then(|inst| {
        let report = inst.path_integral(args.mode, &opts)?;
        let closed = inst.closed_form()?;
        let orders = inst.cohomology_orders()?;
        Ok((report, closed, orders, inst.etale_count()))
    });
    let (report, closed, orders, etale) = match result {
        Ok(x) => x,
        Err(e) => return CommandOutput::fail(format!("error: {e}"), classify(&e)),
    };
    let gm = gm_report(summary, &report, &closed, &orders, etale, !args.no_shortcut, {
        (!args.no_timing).then(|| start.elapsed().as_millis() as u64)
    });
    let out = match args.format {
        Format::Json => to_json(&gm),
        Format::Text => gm_text(&gm),
    };
    CommandOutput::ok(out, verdict(&report))
}

fn verdict(r: &PathIntegralReport) -> ExitStatus {
    if r.consistent() {
        ExitStatus::Ok
    } else {
        ExitStatus::Mismatch
    }
}

fn gm_report(
    field: FieldSummary,
    r: &PathIntegralReport,
    closed: &GmClosedForm,
    orders: &CohomologyOrders,
    etale: u128,
    unit_shortcut: bool,
    elapsed_ms: Option<u64>,
) -> GmReport {
    GmReport {
        kind: "gm".into(),
        field,
        n: r.n,
        mode: r.mode,
        unit_shortcut,
        cohomology_orders: orders.as_array(),
        closed_form_value: r.closed_form_value,
        factors: r.factors,
        stabilized_value: closed.stabilized,
        brute_force_value: r.brute_force_value,
        matches: r.matches,
        pair_count: r.pair_count,
        etale_count: etale,
        phase_vector: r.phase_vector.as_ref().map(phase_counts),
        display_value: r.phase_vector.as_ref().map(DisplayValue::of),
        elapsed_ms,
    }
}

fn gm_text(r: &GmReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("field             {} ({})\n", r.field.label, r.field.origin));
    if let Some(note) = &r.field.note {
        s.push_str(&format!("note              {note}\n"));
    }
    s.push_str(&format!(
        "class group       {:?}  unit rank {}  w {}  degree {}\n",
        r.field.class_group, r.field.unit_rank, r.field.roots_of_unity, r.field.degree
    ));
    s.push_str(&format!("n                 {}\n", r.n));
    s.push_str(&format!("|H^i(X, mu_n)|    {:?}\n", r.cohomology_orders));
    s.push_str(&format!(
        "closed form       {} = {} * {} * {}\n",
        r.closed_form_value, r.factors[0], r.factors[1], r.factors[2]
    ));
    if let Some(v) = r.stabilized_value {
        s.push_str(&format!("stabilized        {v}\n"));
    }
    s.push_str(&format!("brute force       {}\n", opt(r.brute_force_value)));
    s.push_str(&format!("pairs             {}\n", r.pair_count));
    s.push_str(&format!("etale count       {}\n", r.etale_count));
    if let Some(z) = r.display_value {
        s.push_str(&format!("float (display)   {} + {}i\n", z.re, z.im));
    }
    s.push_str(&format!("match             {}\n", opt(r.matches)));
    if let Some(ms) = r.elapsed_ms {
        s.push_str(&format!("elapsed           {ms} ms\n"));
    }
    s
}

pub fn cmd_av(args: &AvArgs) -> CommandOutput {
    let start = Instant::now();
    let model = if let Some(path) = &args.model {
        let file: AvModelFile = match load_json(path) {
            Ok(f) => f,
            Err(out) => return out,
        };
        match file.into_model() {
            Ok(m) => m,
            Err(e) => return CommandOutput::fail(format!("error: {e}"), classify(&e)),
        }
    } else {
        let (seed, n) = (args.seed.unwrap_or(0), args.n.unwrap_or(2));
        if n < 2 {
            return CommandOutput::fail("error: random models need n >= 2", ExitStatus::InputError);
        }
        if n > args.max_n {
            return CommandOutput::fail(
                format!("error: n = {n} exceeds --max-n {}", args.max_n),
                ExitStatus::ResourceLimit,
            );
        }
        random_model(seed, n, ModelBounds::default())
    };
    if model.n > args.max_n {
        return CommandOutput::fail(
            format!("error: n = {} exceeds --max-n {}", model.n, args.max_n),
            ExitStatus::ResourceLimit,
        );
    }
    let opts = EnumerationOptions {
        jobs: args.jobs.max(1),
        budget_pairs: args.budget_pairs,
        ..Default::default()
    };
    let result = AvInstance::build(model.clone()).and_then(|inst| {
        let r = inst.path_integral(Mode::Both, &opts)?;
        Ok((inst, r))
    });
    let (inst, r) = match result {
        Ok(x) => x,
        Err(e) => return CommandOutput::fail(format!("error: {e}"), classify(&e)),
    };
    let report = AvReport {
        kind: "av".into(),
        model: AvModelFile::from(&model),
        n: model.n,
        closed_form_value: r.closed_form_value,
        symmetric_closed_form_value: model.symmetric_closed_form(),
        factors: r.factors,
        selmer_orders: [inst.sel_a_order(), inst.sel_b_order()],
        bockstein_kernel_size: inst.kernel_size(),
        brute_force_value: r.brute_force_value,
        matches: r.matches,
        pair_count: r.pair_count,
        phase_vector: r.phase_vector.as_ref().map(phase_counts),
        display_value: r.phase_vector.as_ref().map(DisplayValue::of),
        elapsed_ms: (!args.no_timing).then(|| start.elapsed().as_millis() as u64),
    };
    let out = match args.format {
        Format::Json => to_json(&report),
        Format::Text => av_text(&report),
    };
    CommandOutput::ok(out, verdict(&r))
}

fn av_text(r: &AvReport) -> String {
    let m = &r.model;
    let mut s = String::new();
    s.push_str(&format!("n                 {}\n", r.n));
    s.push_str(&format!("A(F)/n            {:?}\n", m.mw_a));
    s.push_str(&format!("B(F)/n            {:?}\n", m.mw_b));
    s.push_str(&format!("Sha(A)[n]         {:?}\n", m.sha_a));
    s.push_str(&format!("Sha(B)[n]         {:?}\n", m.sha_b));
    s.push_str(&format!("delta             {}\n", serde_json::to_string(&m.delta).unwrap_or_default()));
    s.push_str(&format!("|Sel_A|, |Sel_B|  {}, {}\n", r.selmer_orders[0], r.selmer_orders[1]));
    s.push_str(&format!("|ker delta|       {}\n", r.bockstein_kernel_size));
    s.push_str(&format!(
        "closed form       {} = {} * {} * {}\n",
        r.closed_form_value, r.factors[0], r.factors[1], r.factors[2]
    ));
    s.push_str(&format!("symmetric form    {}\n", r.symmetric_closed_form_value));
    s.push_str(&format!("brute force       {}\n", opt(r.brute_force_value)));
    s.push_str(&format!("pairs             {}\n", r.pair_count));
    if let Some(z) = r.display_value {
        s.push_str(&format!("float (display)   {} + {}i\n", z.re, z.im));
    }
    s.push_str(&format!("match             {}\n", opt(r.matches)));
    if let Some(ms) = r.elapsed_ms {
        s.push_str(&format!("elapsed           {ms} ms\n"));
    }
    s
}

pub fn cmd_selftest(args: &SelftestArgs) -> CommandOutput {
    let results = selftest::run(args.scope, args.corrupt_pairing);
    let all = results.iter().all(|r| r.passed);
    let out = match args.format {
        Format::Json => to_json(&results),
        Format::Text => {
            let mut s = String::new();
            for r in &results {
                s.push_str(&format!(
                    "[{}] {}: {} ({} ms)\n",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail,
                    r.elapsed_ms
                ));
            }
            let passed = results.iter().filter(|r| r.passed).count();
            s.push_str(&format!("{passed}/{} checks passed\n", results.len()));
            s
        }
    };
    CommandOutput::ok(out, if all { ExitStatus::Ok } else { ExitStatus::Mismatch })
}

pub fn run(cli: &Cli) -> CommandOutput {
    let mut out = match &cli.command {
        Command::Classgroup(a) => cmd_classgroup(a),
        Command::Gm(a) => cmd_gm(a),
        Command::Av(a) => cmd_av(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    if cli.quiet {
        out.stdout.clear();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classgroup_reports() {
        let out = cmd_classgroup(&ClassgroupArgs {
            disc: -23,
            format: Format::Json,
            max_disc: DEFAULT_MAX_DISC,
        });
        assert_eq!(out.status, ExitStatus::Ok);
        let r: ClassGroupReport = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!((r.class_number, r.invariant_factors.clone()), (3, vec![3]));
        assert_eq!(r.reduced_forms.len(), 3);

        let out = cmd_classgroup(&ClassgroupArgs {
            disc: -7,
            format: Format::Json,
            max_disc: DEFAULT_MAX_DISC,
        });
        let r: ClassGroupReport = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(r.reduced_forms, vec![[1, 1, 2]]);
        assert!(r.invariant_factors.is_empty());

        let out = cmd_classgroup(&ClassgroupArgs {
            disc: -4,
            format: Format::Text,
            max_disc: DEFAULT_MAX_DISC,
        });
        assert!(out.stdout.contains("roots of unity    4"));
    }

    #[test]
    fn classgroup_rejects_non_fundamental() {
        let out = cmd_classgroup(&ClassgroupArgs {
            disc: -12,
            format: Format::Text,
            max_disc: DEFAULT_MAX_DISC,
        });
        assert_eq!(out.status, ExitStatus::InputError);
        assert!(out.stderr.contains("m = 2 or 3 mod 4"), "{}", out.stderr);
    }

    #[test]
    fn gm_reports() {
        let out = cmd_gm(&GmArgs::for_disc(-23, 3));
        assert_eq!(out.status, ExitStatus::Ok);
        let r: GmReport = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!((r.closed_form_value, r.brute_force_value), (3, Some(3)));

        let r: GmReport = serde_json::from_str(&cmd_gm(&GmArgs::for_disc(-3, 6)).stdout).unwrap();
        assert_eq!(r.closed_form_value, 6);
    }

    #[test]
    fn gm_limits() {
        let mut args = GmArgs::for_disc(-23, 3);
        args.budget_pairs = 2;
        assert_eq!(cmd_gm(&args).status, ExitStatus::ResourceLimit);
        let mut args = GmArgs::for_disc(-23, 3);
        args.max_n = 2;
        assert_eq!(cmd_gm(&args).status, ExitStatus::ResourceLimit);
        assert_eq!(cmd_gm(&GmArgs::for_disc(-24 * 4, 3)).status, ExitStatus::InputError);
    }

    #[test]
    fn av_random() {
        let out = cmd_av(&AvArgs::for_random(7, 3));
        assert_eq!(out.status, ExitStatus::Ok, "{}", out.stderr);
        let r: AvReport = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(r.matches, Some(true));
    }
}
