//! Command-line front end for the lift-verification library: catalog
//! queries, verification runs, cohomology tables, lift solving, and
//! machine-readable reports.
//!
//! Exit codes: 0 when every requested check passes, 1 on a verification or
//! computation failure, 2 on a usage error (reported on stderr).

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use liftlab_core::catalog::{
    self, enumerate_instances, parse_grid, parse_instance, Instance, TestGrid,
};
use liftlab_core::cohomology::{
    build_truncated_space_with, compute_h1, default_degree, TruncatedSpace,
};
use liftlab_core::liealg::{span_equal, LieAlgebra, LiftType};
use liftlab_core::liftsolver::solve_ansatz_lifts;
use liftlab_core::{Error, Space};

// ---------------------------------------------------------------------------
// argument grammar

#[derive(Parser)]
#[command(
    name = "liftlab",
    version,
    about = "Exact catalog of transitive vector-field algebras on the plane, \
             their fiber lifts, and first cohomology with function coefficients",
    arg_required_else_help = true
)]
struct Cli {
    /// Emit one machine-readable JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Include wall-clock timing in the report. Off by default so that two
    /// runs with identical arguments produce byte-identical output.
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the catalog families and their parameter schemas.
    List,
    /// Print the generators of one catalog instance in text syntax.
    Show {
        /// Instance id, e.g. `g6`, `g6.a`, or `g8[r=5,alpha=2]`.
        id: String,
    },
    /// Verify one instance: bracket closure, transitivity, and for lift
    /// entries the projection, kernel, and type checks.
    Verify {
        /// Instance id, e.g. `g6.a` or `g8.m[r=4,alpha=1]`.
        id: String,
    },
    /// Verify every instance enumerated from the test grid.
    VerifyAll {
        /// Grid bounds, e.g. `rmax=5;alphas=0,1,i;freqs=0,1`. Overrides the
        /// LIFTLAB_GRID environment variable; defaults to the built-in grid.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Compute first cohomology with analytic coefficients, truncated to a
    /// finite window of monomials times exponentials.
    Cohomology {
        /// Instance id; lift ids are accepted (their fiber components act
        /// trivially on base functions, so the answer matches the base).
        id: String,
        /// Truncation degree; defaults to the generator coefficient degree
        /// plus three.
        #[arg(long)]
        degree: Option<u32>,
        /// Frequency budget: sums of at most this many generator
        /// frequencies are admitted (default 2).
        #[arg(long)]
        freq: Option<u32>,
    },
    /// Solve for the lifts of a base instance up to the given type cap.
    Solve {
        /// Base-family instance id, e.g. `g6`.
        id: String,
        /// Largest stabilizer fiber span to search for.
        #[arg(long, value_enum)]
        cap: CapArg,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CapArg {
    Metric,
    Affine,
    Projective,
}

impl CapArg {
    fn lift_type(self) -> LiftType {
        match self {
            CapArg::Metric => LiftType::Metric,
            CapArg::Affine => LiftType::Affine,
            CapArg::Projective => LiftType::Projective,
        }
    }
}

// ---------------------------------------------------------------------------
// report structure

/// One self-contained report per invocation. Serialization is deterministic:
/// struct fields keep their declared order and all maps are ordered.
#[derive(Serialize)]
struct Report {
    command: String,
    id: Option<String>,
    params: BTreeMap<String, String>,
    outcome: Outcome,
    payload: Option<Payload>,
    versions: Versions,
    timing: Option<Timing>,
}

#[derive(Serialize)]
struct Outcome {
    ok: bool,
    diagnostics: Vec<String>,
}

#[derive(Serialize)]
struct Versions {
    #[serde(rename = "liftlab-cli")]
    cli: &'static str,
    #[serde(rename = "liftlab-core")]
    core: &'static str,
}

#[derive(Serialize)]
struct Timing {
    total_ms: u128,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Payload {
    List {
        families: Vec<FamilySchema>,
    },
    Show {
        space: String,
        dim: usize,
        generators: Vec<String>,
    },
    Verify(VerifyDetail),
    VerifyAll {
        grid: String,
        instances: usize,
        failures: usize,
        results: Vec<VerifyLine>,
    },
    Cohomology(CohomologyReport),
    Solve(SolveReport),
}

#[derive(Serialize)]
struct FamilySchema {
    id: String,
    kind: String,
    base: Option<String>,
    #[serde(rename = "type")]
    tag: Option<String>,
    params: Vec<String>,
    constraints: String,
    singular: bool,
}

#[derive(Serialize, Clone)]
struct VerifyDetail {
    id: String,
    kind: String,
    base: Option<String>,
    ok: bool,
    checks: Vec<Check>,
}

#[derive(Serialize, Clone)]
struct Check {
    name: String,
    ok: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyLine {
    id: String,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

#[derive(Serialize)]
struct TruncationInfo {
    degree: u32,
    freq_budget: u32,
    frequencies: Vec<String>,
    monomials: usize,
}

impl TruncationInfo {
    fn of(space: &TruncatedSpace) -> TruncationInfo {
        TruncationInfo {
            degree: space.degree,
            freq_budget: space.budget,
            frequencies: space
                .freqs
                .iter()
                .map(|f| format!("({}, {})", f.x, f.y))
                .collect(),
            monomials: space.basis.len(),
        }
    }
}

#[derive(Serialize)]
struct CohomologyReport {
    space: String,
    dim: usize,
    truncation: TruncationInfo,
    dim_z1: usize,
    dim_b1: usize,
    dim_h1: usize,
    representatives: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct SolveReport {
    cap: String,
    truncation: TruncationInfo,
    branches: Vec<BranchReport>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct BranchReport {
    #[serde(rename = "type")]
    tag: String,
    transitive: bool,
    assignment: BTreeMap<String, String>,
    free_symbols: Vec<String>,
    generators: Vec<String>,
}

// ---------------------------------------------------------------------------
// entry point

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let start = Instant::now();

    let run = match &cli.cmd {
        Cmd::List => Ok(run_list()),
        Cmd::Show { id } => run_show(id),
        Cmd::Verify { id } => run_verify(id),
        Cmd::VerifyAll { grid } => run_verify_all(grid.as_deref()),
        Cmd::Cohomology { id, degree, freq } => run_cohomology(id, *degree, *freq),
        Cmd::Solve { id, cap } => run_solve(id, cap.lift_type()),
    };

    let (target, output) = match run {
        Ok(out) => out,
        Err(usage) => {
            eprintln!("error: {usage}");
            return ExitCode::from(2);
        }
    };

    let (id, params) = match target {
        Some(inst) => (
            Some(inst.to_string()),
            inst.params
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
        ),
        None => (None, BTreeMap::new()),
    };
    let report = Report {
        command,
        id,
        params,
        outcome: Outcome {
            ok: output.ok,
            diagnostics: output.diagnostics,
        },
        payload: output.payload,
        versions: Versions {
            cli: env!("CARGO_PKG_VERSION"),
            core: liftlab_core::VERSION,
        },
        timing: cli.timings.then(|| Timing {
            total_ms: start.elapsed().as_millis(),
        }),
    };

    let mut lines = Vec::new();
    if cli.json {
        lines.push(serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        lines.extend(output.human);
        if let Some(t) = &report.timing {
            lines.push(format!("time: {} ms", t.total_ms));
        }
    }
    // A consumer that stops reading (e.g. `| head`) closes the pipe; treat
    // that as a truncated view, not an error.
    if let Err(e) = write_lines(&lines) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if report.outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn write_lines(lines: &[String]) -> std::io::Result<()> {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    for line in lines {
        writeln!(out, "{line}")?;
    }
    out.flush()
}

/// Everything a subcommand produces besides the fixed report envelope.
struct Output {
    ok: bool,
    diagnostics: Vec<String>,
    payload: Option<Payload>,
    human: Vec<String>,
}

/// Parse and instantiate, mapping id/parameter problems to usage errors.
/// These are the only error classes `parse_instance` and `instantiate`
/// produce, so every failure here is a malformed invocation.
fn resolve(id: &str) -> Result<Instance, String> {
    let inst = parse_instance(id).map_err(|e| e.to_string())?;
    catalog::instantiate(&inst).map_err(|e| e.to_string())?;
    Ok(inst)
}

type RunResult = Result<(Option<Instance>, Output), String>;

// ---------------------------------------------------------------------------
// list

fn run_list() -> (Option<Instance>, Output) {
    let mut families = Vec::new();
    let mut human = Vec::new();
    let head = format!(
        "{:<10} {:<5} {:<5} {:<11} {:<12} constraints",
        "id", "kind", "base", "type", "params"
    );
    human.push(head);
    for f in catalog::families() {
        let kind = if f.base.is_some() { "lift" } else { "base" };
        let tag = f.tag.map(|t| t.to_string());
        families.push(FamilySchema {
            id: f.id.to_string(),
            kind: kind.to_string(),
            base: f.base.map(|b| b.to_string()),
            tag: tag.clone(),
            params: f.params.iter().map(|p| p.to_string()).collect(),
            constraints: f.constraints.to_string(),
            singular: f.singular,
        });
        human.push(format!(
            "{:<10} {:<5} {:<5} {:<11} {:<12} {}",
            f.id,
            kind,
            f.base.unwrap_or("-"),
            tag.as_deref().unwrap_or("-"),
            if f.params.is_empty() {
                "-".to_string()
            } else {
                f.params.join(",")
            },
            f.constraints
        ));
    }
    let n = families.len();
    human.push(format!("{n} catalog entries"));
    (
        None,
        Output {
            ok: true,
            diagnostics: Vec::new(),
            payload: Some(Payload::List { families }),
            human,
        },
    )
}

// ---------------------------------------------------------------------------
// show

fn run_show(id: &str) -> RunResult {
    let inst = resolve(id)?;
    let gens = catalog::instantiate(&inst).expect("validated by resolve");
    let space = catalog::space_of(&inst.family).expect("validated by resolve");
    let space_name = match space {
        Space::Base => "base",
        Space::Total => "total",
    };
    let strings: Vec<String> = gens.iter().map(|v| v.to_string()).collect();
    let mut human = vec![format!(
        "{inst}: {} generators on the {space_name} space",
        gens.len()
    )];
    human.extend(strings.iter().map(|s| format!("  {s}")));
    Ok((
        Some(inst),
        Output {
            ok: true,
            diagnostics: Vec::new(),
            payload: Some(Payload::Show {
                space: space_name.to_string(),
                dim: strings.len(),
                generators: strings,
            }),
            human,
        },
    ))
}

// ---------------------------------------------------------------------------
// verify

fn run_verify(id: &str) -> RunResult {
    let inst = resolve(id)?;
    let detail = verify_instance(&inst);
    let mut human = vec![format!(
        "verify {inst}: {}",
        if detail.ok { "ok" } else { "FAIL" }
    )];
    for c in &detail.checks {
        human.push(format!(
            "  {}: {} — {}",
            c.name,
            if c.ok { "ok" } else { "FAIL" },
            c.detail
        ));
    }
    let diagnostics: Vec<String> = detail
        .checks
        .iter()
        .filter(|c| !c.ok)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    Ok((
        Some(inst),
        Output {
            ok: detail.ok,
            diagnostics,
            payload: Some(Payload::Verify(detail)),
            human,
        },
    ))
}

/// Append one check outcome; returns whether it passed.
fn push_check(checks: &mut Vec<Check>, name: &str, result: Result<String, String>) -> bool {
    let (ok, text) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    checks.push(Check {
        name: name.to_string(),
        ok,
        detail: text,
    });
    ok
}

/// Run the full check list for one instance. Malformed ids never reach this
/// point; every computational failure becomes a failed check, and checks
/// after the first failure are not attempted.
fn verify_instance(inst: &Instance) -> VerifyDetail {
    let fam = catalog::family(&inst.family).expect("resolved");
    let base_inst = catalog::base_of(inst);
    let mut checks = Vec::new();
    let ok = verify_checks(inst, base_inst.as_ref(), &mut checks);
    VerifyDetail {
        id: inst.to_string(),
        kind: if fam.base.is_some() { "lift" } else { "base" }.to_string(),
        base: base_inst.as_ref().map(|b| b.to_string()),
        ok,
        checks,
    }
}

fn verify_checks(inst: &Instance, base_inst: Option<&Instance>, checks: &mut Vec<Check>) -> bool {
    let fam = catalog::family(&inst.family).expect("resolved");
    let gens = catalog::instantiate(inst).expect("resolved");

    if fam.base.is_none() {
        // Base entry: bracket closure, then transitivity at the sample point.
        let alg = match LieAlgebra::new(Space::Base, gens) {
            Ok(a) => {
                push_check(
                    checks,
                    "closure",
                    Ok(format!("{} generators close under the bracket", a.dim())),
                );
                a
            }
            Err(e) => return push_check(checks, "closure", Err(e.to_string())),
        };
        let point = catalog::sample_point(inst);
        let result = match alg.transitive_at(&point) {
            Ok(true) => Ok(format!("spans the tangent plane at {}", show_point(&point))),
            Ok(false) => Err(format!(
                "fields do not span the tangent plane at {}",
                show_point(&point)
            )),
            Err(e) => Err(e.to_string()),
        };
        return push_check(checks, "transitivity", result);
    }

    // Lift entry: closure upstairs, projection onto the paired base with zero
    // kernel, identical structure constants, declared type, transitivity.
    let base_inst = base_inst.expect("lift entries have a base");
    let base_gens = match catalog::instantiate(base_inst) {
        Ok(g) => g,
        Err(e) => {
            return push_check(
                checks,
                "projection",
                Err(format!("paired base {base_inst}: {e}")),
            )
        }
    };

    let hat = match LieAlgebra::new(Space::Total, gens) {
        Ok(a) => {
            push_check(
                checks,
                "closure",
                Ok(format!("{} generators close under the bracket", a.dim())),
            );
            a
        }
        Err(e) => return push_check(checks, "closure", Err(e.to_string())),
    };

    let projs: Result<Vec<_>, _> = hat.basis.iter().map(|v| v.project()).collect();
    let projs = match projs {
        Ok(p) => p,
        Err(e) => return push_check(checks, "projection", Err(e.to_string())),
    };
    let base_alg = match LieAlgebra::new(Space::Base, projs) {
        Ok(a) => a,
        Err(e) => {
            return push_check(
                checks,
                "projection",
                Err(format!("projected generators: {e}")),
            )
        }
    };

    let proj_result = if span_equal(&base_alg.basis, &base_gens) {
        Ok(format!("images span the base realization {base_inst}"))
    } else {
        Err(format!(
            "images do not span the base realization {base_inst}"
        ))
    };
    if !push_check(checks, "projection", proj_result) {
        return false;
    }

    // The projected basis is independent and the dimensions match, so no
    // nonzero element of the span is vertical.
    push_check(
        checks,
        "kernel",
        Ok(format!(
            "projection is injective on the span ({} independent images)",
            base_alg.dim()
        )),
    );

    if !push_check(
        checks,
        "structure constants",
        structure_constants_match(&hat, &base_alg),
    ) {
        return false;
    }

    let point = catalog::sample_point(inst);
    let type_result = match hat.classify_lift_type(&base_alg, &point) {
        Ok(t) if Some(t) == fam.tag => Ok(t.to_string()),
        Ok(t) => Err(format!(
            "classified as {t}, catalog declares {}",
            fam.tag.map(|x| x.to_string()).unwrap_or_default()
        )),
        Err(e) => Err(e.to_string()),
    };
    if !push_check(checks, "type", type_result) {
        return false;
    }

    let tpoint = catalog::sample_point_total(inst);
    let result = match hat.transitive_at(&tpoint) {
        Ok(true) => Ok(format!("spans the tangent space at {}", show_point(&tpoint))),
        Ok(false) => Err(format!(
            "fields do not span the tangent space at {}",
            show_point(&tpoint)
        )),
        Err(e) => Err(e.to_string()),
    };
    push_check(checks, "transitivity", result)
}

/// Compare the two structure-constant tables entry by entry; on a mismatch
/// report the first offending bracket in text syntax.
fn structure_constants_match(
    hat: &LieAlgebra,
    base: &LieAlgebra,
) -> Result<String, String> {
    for i in 0..hat.dim() {
        for j in (i + 1)..hat.dim() {
            if hat.bracket_coeffs(i, j) != base.bracket_coeffs(i, j) {
                return Err(format!(
                    "[{}, {}] expands with coefficients {:?} upstairs but {:?} downstairs",
                    hat.basis[i],
                    hat.basis[j],
                    show_coeffs(hat.bracket_coeffs(i, j)),
                    show_coeffs(base.bracket_coeffs(i, j)),
                ));
            }
        }
    }
    Ok("identical upstairs and downstairs, uniformly in all free constants".to_string())
}

fn show_coeffs(cs: &[liftlab_core::GaussianRational]) -> Vec<String> {
    cs.iter().map(|c| c.to_string()).collect()
}

fn show_point(p: &BTreeMap<liftlab_core::Var, liftlab_core::GaussianRational>) -> String {
    let parts: Vec<String> = p.values().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

// ---------------------------------------------------------------------------
// verify-all

fn run_verify_all(grid_arg: Option<&str>) -> RunResult {
    let spec = match grid_arg {
        Some(s) => Some(s.to_string()),
        None => std::env::var("LIFTLAB_GRID").ok(),
    };
    let grid = match &spec {
        Some(s) => parse_grid(s).map_err(|e| format!("grid `{s}`: {e}"))?,
        None => TestGrid::default(),
    };
    let instances = enumerate_instances(&grid);

    let mut results = Vec::new();
    let mut failures = 0usize;
    let mut human = Vec::new();
    for inst in &instances {
        let detail = verify_instance(inst);
        let failure = detail
            .checks
            .iter()
            .find(|c| !c.ok)
            .map(|c| format!("{}: {}", c.name, c.detail));
        if detail.ok {
            human.push(format!("ok   {inst}"));
        } else {
            failures += 1;
            human.push(format!(
                "FAIL {inst}: {}",
                failure.as_deref().unwrap_or("unknown")
            ));
        }
        results.push(VerifyLine {
            id: inst.to_string(),
            ok: detail.ok,
            failure,
        });
    }
    human.push(format!(
        "grid {grid}: {} instances, {} ok, {failures} failed",
        instances.len(),
        instances.len() - failures
    ));
    let diagnostics: Vec<String> = results
        .iter()
        .filter_map(|r| r.failure.as_ref().map(|f| format!("{}: {f}", r.id)))
        .collect();
    Ok((
        None,
        Output {
            ok: failures == 0,
            diagnostics,
            payload: Some(Payload::VerifyAll {
                grid: grid.to_string(),
                instances: instances.len(),
                failures,
                results,
            }),
            human,
        },
    ))
}

// ---------------------------------------------------------------------------
// cohomology

fn run_cohomology(id: &str, degree: Option<u32>, freq: Option<u32>) -> RunResult {
    let inst = resolve(id)?;
    let gens = catalog::instantiate(&inst).expect("validated by resolve");
    let space = catalog::space_of(&inst.family).expect("validated by resolve");
    let space_name = match space {
        Space::Base => "base",
        Space::Total => "total",
    };

    let fail = |inst: Instance, stage: &str, e: &Error| -> RunResult {
        Ok((
            Some(inst),
            Output {
                ok: false,
                diagnostics: vec![format!("{stage}: {e}")],
                payload: None,
                human: vec![format!("cohomology failed at {stage}: {e}")],
            },
        ))
    };

    let alg = match LieAlgebra::new(space, gens) {
        Ok(a) => a,
        Err(e) => return fail(inst, "closure", &e),
    };
    let degree = degree.unwrap_or_else(|| default_degree(&alg));
    let budget = freq.unwrap_or(2);
    let tspace = match build_truncated_space_with(&alg, degree, budget) {
        Ok(s) => s,
        Err(e) => return fail(inst, "truncation", &e),
    };
    let res = match compute_h1(&alg, &tspace) {
        Ok(r) => r,
        Err(e) => return fail(inst, "cohomology", &e),
    };

    let reps: Vec<Vec<String>> = res
        .representatives
        .iter()
        .map(|c| c.components.iter().map(|p| p.to_string()).collect())
        .collect();
    let mut human = vec![
        format!("cohomology {inst}: dim H1 = {}", res.dim_h1),
        format!(
            "  algebra of dimension {} on the {space_name} space",
            alg.dim()
        ),
        format!(
            "  truncation: degree {}, frequency budget {} ({} monomials, {} frequencies)",
            tspace.degree,
            tspace.budget,
            tspace.basis.len(),
            tspace.freqs.len()
        ),
        format!("  dim Z1 = {}, dim B1 = {}", res.dim_z1, res.dim_b1),
    ];
    for (k, rep) in reps.iter().enumerate() {
        human.push(format!("  representative {}: ({})", k + 1, rep.join(", ")));
    }
    Ok((
        Some(inst),
        Output {
            ok: true,
            diagnostics: Vec::new(),
            payload: Some(Payload::Cohomology(CohomologyReport {
                space: space_name.to_string(),
                dim: alg.dim(),
                truncation: TruncationInfo::of(&tspace),
                dim_z1: res.dim_z1,
                dim_b1: res.dim_b1,
                dim_h1: res.dim_h1,
                representatives: reps,
            })),
            human,
        },
    ))
}

// ---------------------------------------------------------------------------
// solve

fn run_solve(id: &str, cap: LiftType) -> RunResult {
    let inst = resolve(id)?;
    let fam = catalog::family(&inst.family).expect("validated by resolve");
    if fam.base.is_some() {
        return Err(format!(
            "solve expects a base-family id, but `{}` is a lift entry of {}",
            inst.family,
            fam.base.unwrap_or_default()
        ));
    }
    let gens = catalog::instantiate(&inst).expect("validated by resolve");

    let fail = |inst: Instance, stage: &str, e: &Error| -> RunResult {
        Ok((
            Some(inst),
            Output {
                ok: false,
                diagnostics: vec![format!("{stage}: {e}")],
                payload: None,
                human: vec![format!("solve failed at {stage}: {e}")],
            },
        ))
    };

    let base = match LieAlgebra::new(Space::Base, gens) {
        Ok(a) => a,
        Err(e) => return fail(inst, "closure", &e),
    };
    let tspace = match build_truncated_space_with(&base, default_degree(&base), 2) {
        Ok(s) => s,
        Err(e) => return fail(inst, "truncation", &e),
    };
    let res = match solve_ansatz_lifts(&base, cap, &tspace) {
        Ok(r) => r,
        Err(e) => return fail(inst, "solving", &e),
    };

    let base_params: BTreeSet<String> = base
        .basis
        .iter()
        .flat_map(|v| v.components().into_iter().flat_map(|p| p.params()))
        .collect();
    let mut branches = Vec::new();
    for b in &res.branches {
        let mut free: BTreeSet<String> = b
            .generators
            .iter()
            .flat_map(|v| v.components().into_iter().flat_map(|p| p.params()))
            .collect();
        free = free.difference(&base_params).cloned().collect();
        branches.push(BranchReport {
            tag: b.tag.to_string(),
            transitive: b.transitive,
            assignment: b
                .assignment
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
            free_symbols: free.into_iter().collect(),
            generators: b.generators.iter().map(|v| v.to_string()).collect(),
        });
    }

    let mut human = vec![format!(
        "solve {inst} --cap {cap}: {} branch{}",
        branches.len(),
        if branches.len() == 1 { "" } else { "es" }
    )];
    human.push(format!(
        "  truncation: degree {}, frequency budget {}",
        tspace.degree, tspace.budget
    ));
    for (k, b) in branches.iter().enumerate() {
        human.push(format!(
            "  branch {}: {}, {}",
            k + 1,
            b.tag,
            if b.transitive {
                "transitive"
            } else {
                "not transitive"
            }
        ));
        if !b.assignment.is_empty() {
            let parts: Vec<String> = b
                .assignment
                .iter()
                .map(|(k, v)| format!("{k} = {v}"))
                .collect();
            human.push(format!("    solved constants: {}", parts.join(", ")));
        }
        if !b.free_symbols.is_empty() {
            human.push(format!(
                "    free constants: {}",
                b.free_symbols.join(", ")
            ));
        }
        for g in &b.generators {
            human.push(format!("    {g}"));
        }
    }
    for n in &res.groebner_traces {
        human.push(format!("  note: {n}"));
    }
    Ok((
        Some(inst),
        Output {
            ok: true,
            diagnostics: Vec::new(),
            payload: Some(Payload::Solve(SolveReport {
                cap: cap.to_string(),
                truncation: TruncationInfo::of(&tspace),
                branches,
                notes: res.groebner_traces.clone(),
            })),
            human,
        },
    ))
}
