//! Subcommand definitions and drivers.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use monocube::cube::CubePoint;
use monocube::dist::{self, table_tv, DenseDistribution};
use monocube::estimators::{
    distance_to_uniform_oracle, estimate_distance_to_uniform, estimate_support, learn, learner_params,
    plan_distance_to_uniform, plan_support, test_monotonicity, ExactTvOracle, LearnerOverrides,
    LearnerParams, LpMonotoneDistance, SupportOverrides, UniformityOverrides,
};
use monocube::lowerbound::{self, MixtureSpec, DEFAULT_EXPONENT};
use monocube::structural::{corollary_weights, find_h0, slack_regret_reduce, verify_decomposition};
use monocube::verify::{check_conditions, cond_d_scan, ratio_bound_scan, ratio_bound_threshold};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::{read_distribution, write_estimate, write_table, EstimateSidecar, TableFormat};
use crate::report::{num, CsvTable, Formulas, Outputs, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "monocube", version, about = "Monotone distributions on the Boolean cube")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random stream of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
    /// Write the CSV rows here.
    #[arg(long, global = true)]
    pub csv_out: Option<PathBuf>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Include wall time in the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated distribution.
    Gen(GenArgs),
    /// Learn a monotone distribution from samples.
    Learn(LearnArgs),
    /// Estimate the distance to uniform.
    DistUniform(DistUniformArgs),
    /// Estimate the support fraction.
    Support(SupportArgs),
    /// Run the slack-regret decomposition.
    Decompose(DecomposeArgs),
    /// Check the window-schedule conditions and the tail-ratio bound.
    VerifyConditions(VerifyArgs),
    /// Lower-bound quantities and the collision experiment.
    LbDemo(LbDemoArgs),
    /// Learn-then-test monotonicity with exact distance oracles.
    TestMonotone(TestMonotoneArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Uniform,
    Subcube,
    PointMass,
    DeltaClose,
    DeltaFar,
    RandomMonotone,
    Upset,
    FarShift,
}

fn parse_mask(s: &str) -> Result<u64, String> {
    let s = s.replace('_', "");
    let r = if let Some(b) = s.strip_prefix("0b") {
        u64::from_str_radix(b, 2)
    } else if let Some(h) = s.strip_prefix("0x") {
        u64::from_str_radix(h, 16)
    } else {
        s.parse()
    };
    r.map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub family: Family,
    pub n: u32,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = TableFormat::Mcd1)]
    pub format: TableFormat,
    /// Center for `subcube` and `point-mass` (decimal, 0b…, 0x…).
    #[arg(long, value_parser = parse_mask, default_value = "0")]
    pub center: u64,
    /// Center weight exponent for the mixture families.
    #[arg(long, default_value_t = DEFAULT_EXPONENT)]
    pub exponent: f64,
    /// Mass moved by `far-shift`.
    #[arg(long, default_value_t = 0.3)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long = "A")]
    pub a: Option<f64>,
    /// Constant window for every level.
    #[arg(long = "L")]
    pub window: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<u32>,
    #[arg(long = "N")]
    pub samples: Option<u64>,
    /// Estimate table (MCD1); parameters go to `<out>.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistUniformArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long)]
    pub h0: Option<u32>,
    #[arg(long = "L")]
    pub window: Option<u32>,
    #[arg(long = "N1")]
    pub n1: Option<u64>,
    #[arg(long = "N2")]
    pub n2: Option<u64>,
    /// Replace every sampled quantity by its exact value.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct SupportArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long = "M1")]
    pub m1: Option<u64>,
    #[arg(long = "M2")]
    pub m2: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Level `h0`, or `auto` to search for one.
    #[arg(long, default_value = "auto")]
    pub h0: String,
    /// Write the output function `f` (MCD1).
    #[arg(long)]
    pub f_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Dimensions for the condition checks.
    #[arg(long, value_delimiter = ',', default_value = "64,256,1024,4096")]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Dimensions for the tail-ratio scan.
    #[arg(long, value_delimiter = ',', default_value = "64,256,1024,4096")]
    pub ratio_n: Vec<u32>,
    /// Largest `n` for the doubling scan of condition (d).
    #[arg(long, default_value_t = 1u64 << 62)]
    pub scan_budget: u64,
}

fn parse_pair(s: &str) -> Result<(u64, u64), String> {
    let (k, q) = s.split_once(':').ok_or("expected K:q")?;
    Ok((k.parse().map_err(|e| format!("{e}"))?, q.parse().map_err(|e| format!("{e}"))?))
}

#[derive(Debug, Args)]
pub struct LbDemoArgs {
    #[arg(long, default_value_t = 16)]
    pub n: u32,
    #[arg(long, default_value_t = DEFAULT_EXPONENT)]
    pub exponent: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Collision experiment settings as `K:q`.
    #[arg(long, value_delimiter = ',', value_parser = parse_pair, default_value = "8:3,128:8,2048:20")]
    pub collisions: Vec<(u64, u64)>,
}

#[derive(Debug, Args)]
pub struct TestMonotoneArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    pub epsilon: f64,
    #[arg(long = "L")]
    pub window: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<u32>,
    #[arg(long = "N")]
    pub samples: Option<u64>,
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let out = Outputs::new(cli.global.json_out.clone(), cli.global.csv_out.clone(), cli.global.timing);
    let seed = cli.global.seed;
    match &cli.command {
        Command::Gen(a) => gen(a, seed, &out),
        Command::Learn(a) => learn_cmd(a, seed, &out),
        Command::DistUniform(a) => dist_uniform(a, seed, &out),
        Command::Support(a) => support(a, seed, &out),
        Command::Decompose(a) => decompose(a, seed, &out),
        Command::VerifyConditions(a) => verify_conditions(a, seed, &out),
        Command::LbDemo(a) => lb_demo(a, seed, &out),
        Command::TestMonotone(a) => test_monotone(a, seed, &out),
    }
}

#[derive(Debug, Serialize)]
pub struct GenResult {
    pub n: u32,
    pub support_fraction: f64,
    pub monotone: bool,
    pub well_behaved: bool,
    pub tv_to_uniform: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixture: Option<MixtureSummary>,
}

#[derive(Debug, Serialize)]
pub struct MixtureSummary {
    pub m: u32,
    pub components: usize,
    pub rounding: String,
}

fn gen(a: &GenArgs, seed: u64, out: &Outputs) -> CliResult<()> {
    let mut config = RunConfig::new("gen", seed);
    config.n = Some(a.n);
    config.output = Some(path_str(&a.out));
    config.format = Some(format!("{:?}", a.format).to_lowercase());
    config.set("family", a.family);
    let mut formulas = Formulas::default();
    let mut mixture = None;
    let d = match a.family {
        Family::Uniform => dist::uniform(a.n)?,
        Family::Subcube | Family::PointMass => {
            config.set("center", a.center);
            let c = CubePoint::new(a.center, a.n)?;
            if a.family == Family::Subcube {
                dist::subcube(c)?
            } else {
                dist::point_mass(c)?
            }
        }
        Family::DeltaClose | Family::DeltaFar => {
            config.set("exponent", a.exponent);
            let spec = if a.family == Family::DeltaClose {
                MixtureSpec::close(a.n, a.exponent)?
            } else {
                MixtureSpec::far(a.n, seed, a.exponent)?
            };
            formulas.show("m", spec.m);
            formulas.show("K", spec.component_count());
            mixture = Some(MixtureSummary {
                m: spec.m,
                components: spec.component_count(),
                rounding: spec.rounding.clone(),
            });
            spec.realize()?
        }
        Family::RandomMonotone => dist::random_monotone(a.n, seed)?,
        Family::Upset => dist::uniform_on_upset(a.n, seed)?,
        Family::FarShift => {
            config.epsilon = Some(a.epsilon);
            dist::top_to_bottom_shift(a.n, a.epsilon)?
        }
    };
    write_table(&a.out, a.n, d.probs(), a.format)?;
    let u = dist::uniform(a.n)?;
    let result = GenResult {
        n: a.n,
        support_fraction: d.support_fraction(),
        monotone: d.is_monotone(),
        well_behaved: d.is_well_behaved(),
        tv_to_uniform: dist::tv_distance(&d, &u)?,
        mixture,
    };
    println!("support fraction = {}", result.support_fraction);
    println!("monotone = {}", result.monotone);
    println!("tv to uniform = {}", result.tv_to_uniform);
    let mut csv = CsvTable::new(&["family", "n", "support_fraction", "monotone", "well_behaved", "tv_to_uniform"]);
    csv.push(vec![
        format!("{:?}", a.family).to_lowercase(),
        a.n.to_string(),
        num(result.support_fraction),
        result.monotone.to_string(),
        result.well_behaved.to_string(),
        num(result.tv_to_uniform),
    ]);
    out.finish(config, formulas, result, Some(csv))?;
    Ok(())
}

fn learner_overrides(a: Option<f64>, window: Option<f64>, cutoff: Option<u32>, samples: Option<u64>) -> LearnerOverrides {
    LearnerOverrides { a, levels: window.map(|w| vec![w]), low_cutoff: cutoff, samples }
}

fn show_learner(f: &mut Formulas, prefix: &str, p: &LearnerParams) {
    f.show(&format!("{prefix}A"), p.a);
    f.show(&format!("{prefix}L_h"), &p.levels);
    f.show(&format!("{prefix}L_h_raw"), &p.raw_levels);
    f.show(&format!("{prefix}cutoff"), p.low_cutoff);
    f.show(&format!("{prefix}N_log2"), p.samples_log2);
    f.show(&format!("{prefix}N"), p.samples);
}

#[derive(Debug, Serialize)]
pub struct LearnResult {
    #[serde(rename = "N")]
    pub samples: u64,
    pub params: LearnerParams,
    pub l1_to_input: f64,
    pub all_zeroed_by_cutoff: bool,
    pub clamped_points: u64,
    pub cutoff_points: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn learn_cmd(a: &LearnArgs, seed: u64, out: &Outputs) -> CliResult<()> {
    let rho = read_distribution(&a.dist)?;
    let n = rho.dim();
    let mut config = RunConfig::new("learn", seed);
    config.n = Some(n);
    config.epsilon = Some(a.epsilon);
    config.input = Some(path_str(&a.dist));
    config.output = a.out.as_ref().map(|p| path_str(p));
    config.set("A", a.a).set("L", a.window).set("cutoff", a.cutoff).set("N", a.samples);
    let params = learner_params(n, a.epsilon, &learner_overrides(a.a, a.window, a.cutoff, a.samples))?;
    let mut formulas = Formulas::default();
    show_learner(&mut formulas, "", &params);
    let outcome = learn(&mut rho.sampler(seed), &params)?;
    let l1 = 2.0 * table_tv(&outcome.table.rho_hat, rho.probs())?;
    let zeroed = outcome.all_zeroed_by_cutoff();
    let note = zeroed.then(|| "all φ̂ zeroed by cutoff; output is uniform".to_string());
    if let Some(nt) = &note {
        println!("{nt}");
    }
    println!("L1(rho_hat, rho) = {l1}");
    if let Some(path) = &a.out {
        let sidecar = EstimateSidecar { params: params.clone(), seed, samples: outcome.samples };
        write_estimate(path, &outcome.table, &sidecar)?;
    }
    let mut csv = CsvTable::new(&["n", "epsilon", "N", "seed", "l1_to_input", "all_zeroed_by_cutoff"]);
    csv.push(vec![
        n.to_string(),
        num(a.epsilon),
        outcome.samples.to_string(),
        seed.to_string(),
        num(l1),
        zeroed.to_string(),
    ]);
    let result = LearnResult {
        samples: outcome.samples,
        params,
        l1_to_input: l1,
        all_zeroed_by_cutoff: zeroed,
        clamped_points: outcome.clamped_points,
        cutoff_points: outcome.cutoff_points,
        note,
    };
    out.finish(config, formulas, result, Some(csv))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct DistUniformResult {
    pub mode: &'static str,
    pub d1: f64,
    pub d2: f64,
    pub estimate: f64,
    pub exact_tv: f64,
}

fn dist_uniform(a: &DistUniformArgs, seed: u64, out: &Outputs) -> CliResult<()> {
    let rho = read_distribution(&a.dist)?;
    let n = rho.dim();
    let mut config = RunConfig::new("dist-uniform", seed);
    config.n = Some(n);
    config.epsilon = Some(a.epsilon);
    config.input = Some(path_str(&a.dist));
    config
        .set("h0", a.h0)
        .set("L", a.window)
        .set("N1", a.n1)
        .set("N2", a.n2)
        .set("exact", a.exact);
    let over = UniformityOverrides { h0: a.h0, window: a.window, n1: a.n1, n2: a.n2 };
    let plan = plan_distance_to_uniform(n, a.epsilon, &over)?;
    let mut formulas = Formulas::default();
    formulas.show("h0", plan.h0);
    formulas.show("L", plan.window);
    formulas.show("N1", plan.n1);
    formulas.show("N2_log2", plan.n2_log2);
    formulas.show("N2", plan.n2);
    let est = if a.exact {
        distance_to_uniform_oracle(&rho, &plan)?
    } else {
        estimate_distance_to_uniform(&mut rho.sampler(seed), &plan)?
    };
    let exact_tv = dist::tv_distance(&rho, &dist::uniform(n)?)?;
    println!("estimate = {} (exact tv = {exact_tv})", est.estimate);
    let mode = if a.exact { "exact" } else { "sampled" };
    let mut csv = CsvTable::new(&["n", "epsilon", "mode", "h0", "L", "d1", "d2", "estimate", "exact_tv", "seed"]);
    csv.push(vec![
        n.to_string(),
        num(a.epsilon),
        mode.into(),
        plan.h0.to_string(),
        plan.window.to_string(),
        num(est.d1),
        num(est.d2),
        num(est.estimate),
        num(exact_tv),
        seed.to_string(),
    ]);
    let result = DistUniformResult { mode, d1: est.d1, d2: est.d2, estimate: est.estimate, exact_tv };
    out.finish(config, formulas, result, Some(csv))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SupportResult {
    pub covered_probes: u64,
    pub probes: u64,
    pub eta_hat: f64,
    pub support_fraction: f64,
}

/// Probe stream seed, derived so it differs from the sampling stream.
pub fn probe_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

fn support(a: &SupportArgs, seed: u64, out: &Outputs) -> CliResult<()> {
    let rho = read_distribution(&a.dist)?;
    let n = rho.dim();
    let mut config = RunConfig::new("support", seed);
    config.n = Some(n);
    config.epsilon = Some(a.epsilon);
    config.input = Some(path_str(&a.dist));
    config.set("M1", a.m1).set("M2", a.m2).set("probe_seed", probe_seed(seed));
    let plan = plan_support(n, a.epsilon, &SupportOverrides { m1: a.m1, m2: a.m2 })?;
    let mut formulas = Formulas::default();
    formulas.show("M1_log2", plan.m1_log2);
    formulas.show("M1", plan.m1);
    formulas.show("M2", plan.m2);
    let est = estimate_support(&mut rho.sampler(seed), &plan, probe_seed(seed))?;
    let truth = rho.support_fraction();
    println!("eta_hat = {} (support fraction = {truth})", est.eta_hat);
    let mut csv = CsvTable::new(&["n", "epsilon", "M1", "M2", "eta_hat", "support_fraction", "seed"]);
    csv.push(vec![
        n.to_string(),
        num(a.epsilon),
        plan.m1.map(|m| m.to_string()).unwrap_or_default(),
        plan.m2.to_string(),
        num(est.eta_hat),
        num(truth),
        seed.to_string(),
    ]);
    let result = SupportResult {
        covered_probes: est.covered_probes,
        probes: est.probes,
        eta_hat: est.eta_hat,
        support_fraction: truth,
    };
    out.finish(config, formulas, result, Some(csv))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct DecomposeResult {
    pub mass_removed: f64,
    pub slacky_levels: Vec<u32>,
    pub regret_spent: f64,
    pub zeroed_levels: Vec<u32>,
    pub slacky_below_h0: usize,
    pub slacky_bound: f64,
    pub properties: monocube::structural::DecompositionReport,
}

fn decompose(a: &DecomposeArgs, seed: u64, out: &Outputs) -> CliResult<()> {
    let rho = read_distribution(&a.dist)?;
    let n = rho.dim();
    let mut config = RunConfig::new("decompose", seed);
    config.n = Some(n);
    config.epsilon = Some(a.epsilon);
    config.input = Some(path_str(&a.dist));
    config.output = a.f_out.as_ref().map(|p| path_str(p));
    config.set("h0", &a.h0);
    let h0 = if a.h0 == "auto" {
        find_h0(n, a.epsilon)?
    } else {
        a.h0.parse::<u32>().map_err(|_| CliError::Usage(format!("--h0 expects an integer or auto, got {}", a.h0)))?
    };
    let weights = corollary_weights(n, a.epsilon, h0)?;
    let mut formulas = Formulas::default();
    formulas.show("h0", h0);
    formulas.show("R_h", weights.as_slice());
    formulas.show("zeta", a.epsilon);
    let r = slack_regret_reduce(&rho, &weights)?;
    let properties = verify_decomposition(&rho, &r, &weights, a.epsilon);
    println!(
        "mass removed = {}, slacky levels = {:?}, properties hold = {}",
        r.mass_removed,
        r.slacky_levels,
        properties.all_hold()
    );
    if let Some(path) = &a.f_out {
        write_table(path, n, &r.f, TableFormat::Mcd1)?;
    }
    let mut csv = CsvTable::new(&["n", "epsilon", "h0", "mass_removed", "regret_spent", "slacky_levels", "prop1", "prop2", "prop3"]);
    csv.push(vec![
        n.to_string(),
        num(a.epsilon),
        h0.to_string(),
        num(r.mass_removed),
        num(r.regret_spent),
        r.slacky_levels.len().to_string(),
        properties.prop1.to_string(),
        properties.prop2.to_string(),
        properties.prop3.to_string(),
    ]);
    let result = DecomposeResult {
        mass_removed: r.mass_removed,
        slacky_below_h0: r.slacky_levels_below(h0),
        slacky_levels: r.slacky_levels,
        regret_spent: r.regret_spent,
        zeroed_levels: r.zeroed_levels,
        slacky_bound: 16.0 / (a.epsilon * a.epsilon),
        properties,
    };
    out.finish(config, formulas, result, Some(csv))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct VerifyResult {
    pub conditions: Vec<monocube::verify::ConditionReport>,
    pub ratio_margins: Vec<monocube::verify::RatioMargin>,
    pub ratio_holds_from: Option<u32>,
    pub cond_d_scan: monocube::verify::CondDScan,
}

fn verify_conditions(a: &VerifyArgs, seed: u64, out: &Outputs) -> CliResult<()> {
    let mut config = RunConfig::new("verify-conditions", seed);
    config.epsilon = Some(a.epsilon);
    config.set("n", &a.n).set("ratio_n", &a.ratio_n).set("scan_budget", a.scan_budget);
    let mut formulas = Formulas::default();
    let mut conditions = Vec::new();
    for &n in &a.n {
        let p = learner_params(n, a.epsilon, &LearnerOverrides::default())?;
        formulas.show(&format!("A[n={n}]"), p.a);
        formulas.show(&format!("cutoff[n={n}]"), p.low_cutoff);
        let r = check_conditions(n, a.epsilon, &p)?;
        println!(
            "n = {n}: a {} b {} c {} ({}) d {} ({} vs {})",
            r.cond_a, r.cond_b, r.cond_c, r.cond_c_value, r.cond_d, r.cond_d_value, r.cond_d_bound
        );
        conditions.push(r);
    }
    let ratio_margins = ratio_bound_scan(&a.ratio_n)?;
    for m in &ratio_margins {
        println!("ratio bound n = {}: max margin {} at h = {}", m.n, m.max_margin, m.worst_h);
    }
    let scan = cond_d_scan(a.epsilon, 4, a.scan_budget)?;
    match scan.first_holding {
        Some(n) => println!("condition (d) envelope first holds at n = {n}"),
        None => println!("condition (d) envelope: not found within budget {}", a.scan_budget),
    }
    let mut csv = CsvTable::new(&[
        "n", "epsilon", "cond_a", "cond_a_max_step", "cond_b", "cond_b_max_level", "cond_c", "cond_c_value",
        "cond_d", "cond_d_value", "cond_d_bound",
    ]);
    for r in &conditions {
        csv.push(vec![
            r.n.to_string(),
            num(r.eps),
            r.cond_a.to_string(),
            num(r.cond_a_max_step),
            r.cond_b.to_string(),
            num(r.cond_b_max_level),
            r.cond_c.to_string(),
            num(r.cond_c_value),
            r.cond_d.to_string(),
            num(r.cond_d_value),
            num(r.cond_d_bound),
        ]);
    }
    let result = VerifyResult {
        conditions,
        ratio_holds_from: ratio_bound_threshold(&ratio_margins),
        ratio_margins,
        cond_d_scan: scan,
    };
    out.finish(config, formulas, result, Some(csv))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct CollisionRow {
    #[serde(rename = "K")]
    pub k: u64,
    pub q: u64,
    pub exact: f64,
    pub empirical: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct LbDemoResult {
    pub n: u32,
    pub m: u32,
    pub binomial_shift_tv: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub close_tv_to_uniform: Option<f64>,
    pub far_components: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub far_support_fraction: Option<f64>,
    pub far_support_union_bound: f64,
    pub collisions: Vec<CollisionRow>,
}

fn lb_demo(a: &LbDemoArgs, seed: u64, out: &Outputs) -> CliResult<()> {
    let mut config = RunConfig::new("lb-demo", seed);
    config.n = Some(a.n);
    config.trials = Some(a.trials);
    config.set("exponent", a.exponent).set("collisions", &a.collisions);
    let mut formulas = Formulas::default();
    let m = lowerbound::center_weight(a.n, a.exponent);
    let far = MixtureSpec::far(a.n, seed, a.exponent)?;
    formulas.show("m", m);
    formulas.show("K", far.component_count());
    let shift = lowerbound::binomial_shift_tv(a.n, m)?;
    let dense = a.n <= dist::DEFAULT_DENSE_DIM;
    let close_tv = if dense {
        let close = MixtureSpec::close(a.n, a.exponent)?.realize()?;
        Some(dist::tv_distance(&close, &dist::uniform(a.n)?)?)
    } else {
        None
    };
    let far_support = if dense { Some(lowerbound::far_support_check(&far)?) } else { None };
    let union = lowerbound::support_union_bound(&far);
    println!("binomial shift tv = {shift}");
    if let Some(s) = far_support {
        println!("far support fraction = {s} (≤ 1/2: {})", s <= 0.5);
    }
    let mut collisions = Vec::new();
    for &(k, q) in &a.collisions {
        let exact = lowerbound::collision_probability(k, q)?;
        let k_us = usize::try_from(k).map_err(|_| CliError::Usage("K too large".into()))?;
        let q_us = usize::try_from(q).map_err(|_| CliError::Usage("q too large".into()))?;
        let empirical = lowerbound::collision_experiment_components(k_us, q_us, a.trials, seed);
        println!("collision K = {k}, q = {q}: exact {exact}, empirical {empirical}");
        collisions.push(CollisionRow { k, q, exact, empirical, trials: a.trials, seed });
    }
    let mut csv = CsvTable::new(&["kind", "n", "m", "K", "q", "exact", "empirical", "trials", "seed"]);
    let blank = String::new;
    csv.push(vec![
        "binomial_shift_tv".into(), a.n.to_string(), m.to_string(), blank(), blank(), num(shift), blank(), blank(), blank(),
    ]);
    csv.push(vec![
        "far_support_fraction".into(),
        a.n.to_string(),
        m.to_string(),
        far.component_count().to_string(),
        blank(),
        far_support.map(num).unwrap_or_default(),
        blank(),
        blank(),
        seed.to_string(),
    ]);
    for c in &collisions {
        csv.push(vec![
            "collision".into(),
            blank(),
            blank(),
            c.k.to_string(),
            c.q.to_string(),
            num(c.exact),
            num(c.empirical),
            c.trials.to_string(),
            c.seed.to_string(),
        ]);
    }
    let result = LbDemoResult {
        n: a.n,
        m,
        binomial_shift_tv: shift,
        close_tv_to_uniform: close_tv,
        far_components: far.component_count(),
        far_support_fraction: far_support,
        far_support_union_bound: union,
        collisions,
    };
    out.finish(config, formulas, result, Some(csv))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct TestMonotoneResult {
    pub verdict: monocube::estimators::MonotonicityVerdict,
    pub input_monotone: bool,
}

fn test_monotone(a: &TestMonotoneArgs, seed: u64, out: &Outputs) -> CliResult<()> {
    let rho: DenseDistribution = read_distribution(&a.dist)?;
    let n = rho.dim();
    let mut config = RunConfig::new("test-monotone", seed);
    config.n = Some(n);
    config.epsilon = Some(a.epsilon);
    config.input = Some(path_str(&a.dist));
    config.set("L", a.window).set("cutoff", a.cutoff).set("N", a.samples).set("learner_epsilon", a.epsilon / 4.0);
    let params = learner_params(n, a.epsilon / 4.0, &learner_overrides(None, a.window, a.cutoff, a.samples))?;
    let mut formulas = Formulas::default();
    show_learner(&mut formulas, "learner.", &params);
    formulas.show("threshold", a.epsilon / 2.0);
    let verdict = test_monotonicity(
        &mut rho.sampler(seed),
        &params,
        a.epsilon,
        &mut ExactTvOracle { truth: &rho },
        &mut LpMonotoneDistance,
    )?;
    println!(
        "{} (learned distance {}, distance to monotone {:?})",
        if verdict.accept { "accept" } else { "reject" },
        verdict.learned_distance,
        verdict.monotone_distance
    );
    let mut csv = CsvTable::new(&["n", "epsilon", "seed", "accept", "learned_distance", "monotone_distance"]);
    csv.push(vec![
        n.to_string(),
        num(a.epsilon),
        seed.to_string(),
        verdict.accept.to_string(),
        num(verdict.learned_distance),
        verdict.monotone_distance.map(num).unwrap_or_default(),
    ]);
    let result = TestMonotoneResult { verdict, input_monotone: rho.is_monotone() };
    out.finish(config, formulas, result, Some(csv))?;
    Ok(())
}
