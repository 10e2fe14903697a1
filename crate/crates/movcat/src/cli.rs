//! The command surface.
//!
//! Every command loads a workspace, runs one check or construction,
//! and renders a [`Report`](crate::report::Report).  The workspace is
//! the shipped fixture set unless `MOVCAT_FIXTURES` names a directory
//! of `.mcw` files, and `--workspace` files stack on top either way.
//!
//! Exit statuses follow the verdict: `0` when the property holds or
//! the construction succeeds, `1` when it is refuted (a certificate
//! accompanies the verdict), `2` when the input is invalid.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::construct::{comma_category, find_pullback};
use crate::fincat::{product, FinCategory, Functor, MorId, SubcategorySpec};
use crate::gen::{gen_workspace, GenOptions};
use crate::movability::{
    decide_movable, decide_uniformly_movable, verify_uniform_witness, verify_witness,
    CategoryDecision, UniformMovabilityWitness,
};
use crate::prosys::{
    check_ae1, check_ae2, decide_system_movable, decide_system_uniform, validate_system,
    AxiomViolation, Expansion, System, SystemMovableWitness, SystemUniformWitness, ThreadBody,
};
use crate::report::Report;
use crate::shapebridge::{corollary_sequence_check, theorem_check, Equivalence, TheoremReport};
use crate::shipped;
use crate::workspace::{
    parse_workspace, print_workspace, raw_of, witness_entry, BuiltWitness, WorkspaceFile,
};

/// Movability and uniform movability over finite categories.
#[derive(Debug, Parser)]
#[command(name = "movcat", version, about)]
pub struct Cli {
    /// Workspace files loaded on top of the fixtures; repeatable.
    #[arg(short, long, global = true, value_name = "FILE")]
    pub workspace: Vec<PathBuf>,
    /// Render the report as one JSON document.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and check every entry of the loaded workspace.
    Validate,
    /// Decide movability of one object.
    CheckMovable {
        /// Category to work in.
        #[arg(long)]
        cat: String,
        /// Object whose movability is in question.
        #[arg(long)]
        object: String,
        /// Decide uniform movability instead.
        #[arg(long)]
        uniform: bool,
    },
    /// Construct the comma category of an object over a subcategory.
    Comma {
        /// Ambient category.
        #[arg(long)]
        cat: String,
        /// Subcategory the comma objects land in.
        #[arg(long)]
        sub: String,
        /// Object whose morphisms into the subcategory are taken.
        #[arg(long)]
        apex: String,
    },
    /// Construct the product of two categories.
    Product {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Construct the dual category.
    Dual {
        #[arg(long)]
        cat: String,
    },
    /// Search a category for a pullback of the cospan `f`, `g`.
    Pullback {
        #[arg(long)]
        cat: String,
        /// One morphism of the cospan.
        #[arg(long)]
        f: String,
        /// The other; must share `f`'s codomain.
        #[arg(long)]
        g: String,
    },
    /// Decide movability of an inverse system.
    SystemCheck {
        #[arg(long)]
        system: String,
        /// Decide uniform movability instead.
        #[arg(long)]
        uniform: bool,
    },
    /// Check the expansion axioms AE1 and AE2.
    ExpansionCheck {
        #[arg(long)]
        exp: String,
    },
    /// Check that the system and its comma category agree on uniform
    /// movability, transporting witnesses both ways.
    TheoremCheck {
        #[arg(long)]
        exp: String,
    },
    /// For a sequence expansion: movability and uniform movability of
    /// the comma category coincide.
    #[command(name = "corollary8")]
    Corollary8 {
        #[arg(long)]
        exp: String,
    },
    /// Generate a seeded random workspace.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Target object count per category.
        #[arg(long)]
        objects: Option<usize>,
        /// Morphism cap per category.
        #[arg(long)]
        morphisms: Option<usize>,
        /// Generator edge density, between 0 and 1.
        #[arg(long)]
        density: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::CheckMovable { .. } => "check-movable",
            Command::Comma { .. } => "comma",
            Command::Product { .. } => "product",
            Command::Dual { .. } => "dual",
            Command::Pullback { .. } => "pullback",
            Command::SystemCheck { .. } => "system-check",
            Command::ExpansionCheck { .. } => "expansion-check",
            Command::TheoremCheck { .. } => "theorem-check",
            Command::Corollary8 { .. } => "corollary8",
            Command::Gen { .. } => "gen",
        }
    }
}

/// Runs one parsed invocation, rendering the report to `out`, and
/// returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    let report = execute(cli);
    let _ = report.render(cli.json, out);
    report.exit_code()
}

fn execute(cli: &Cli) -> Report {
    if let Command::Gen { .. } = &cli.command {
        return dispatch(&cli.command, &WorkspaceFile::default());
    }
    match load_workspace(&cli.workspace) {
        Ok(ws) => dispatch(&cli.command, &ws),
        Err(message) => Report::invalid(cli.command.name(), message),
    }
}

#[derive(Debug, Parser)]
#[command(name = "movcat")]
struct CommandOnly {
    #[command(subcommand)]
    command: Command,
}

/// Parses bare command arguments — no binary name, no global flags —
/// and runs them against `ws`.  A usage error comes back as the
/// rendered clap message.
pub fn run_args<I, S>(ws: &WorkspaceFile, args: I) -> Result<Report, String>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString>,
{
    let argv = std::iter::once(std::ffi::OsString::from("movcat"))
        .chain(args.into_iter().map(Into::into));
    let parsed = CommandOnly::try_parse_from(argv).map_err(|e| e.to_string())?;
    Ok(dispatch(&parsed.command, ws))
}

/// Runs one command against an already-loaded workspace.  `gen` never
/// reads the workspace.
pub fn dispatch(command: &Command, ws: &WorkspaceFile) -> Report {
    match command {
        Command::Validate => validate(ws),
        Command::CheckMovable { cat, object, uniform } => check_movable(ws, cat, object, *uniform),
        Command::Comma { cat, sub, apex } => comma(ws, cat, sub, apex),
        Command::Product { left, right } => product_cmd(ws, left, right),
        Command::Dual { cat } => dual(ws, cat),
        Command::Pullback { cat, f, g } => pullback(ws, cat, f, g),
        Command::SystemCheck { system, uniform } => system_check(ws, system, *uniform),
        Command::ExpansionCheck { exp } => expansion_check(ws, exp),
        Command::TheoremCheck { exp } => theorem_check_cmd(ws, exp),
        Command::Corollary8 { exp } => corollary8(ws, exp),
        Command::Gen { seed, objects, morphisms, density } => {
            gen(*seed, *objects, *morphisms, *density)
        }
    }
}

// ---------------------------------------------------------------------
// Workspace loading
// ---------------------------------------------------------------------

fn load_workspace(extra: &[PathBuf]) -> Result<WorkspaceFile, String> {
    let mut parts = Vec::new();
    match std::env::var_os("MOVCAT_FIXTURES") {
        Some(dir) => {
            let dir = PathBuf::from(dir);
            let entries =
                std::fs::read_dir(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "mcw"))
                .collect();
            paths.sort();
            for path in &paths {
                parts.push(load_file(path)?);
            }
        }
        None => parts.push(shipped::embedded_workspace()),
    }
    for path in extra {
        parts.push(load_file(path)?);
    }
    shipped::merge(parts)
}

fn load_file(path: &Path) -> Result<WorkspaceFile, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_workspace(&text).map_err(|e| format!("{}: {e}", path.display()))
}

// ---------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------

fn validate(ws: &WorkspaceFile) -> Report {
    let mut outcomes: Vec<(&'static str, String, Option<String>)> = Vec::new();

    for c in &ws.categories {
        outcomes.push(("category", c.name.clone(), ws.build_category(&c.name).err().map(brief)));
    }
    for s in &ws.subcategories {
        let problem = ws.build_subcategory(&s.name).err().map(brief);
        outcomes.push(("subcategory", s.name.clone(), problem));
    }
    for s in &ws.systems {
        let problem = match ws.build_system(&s.name) {
            Err(e) => Some(brief(e)),
            Ok(sys) => join_problems(validate_system(&sys)),
        };
        outcomes.push(("system", s.name.clone(), problem));
    }
    for e in &ws.expansions {
        let problem = match ws.build_expansion(&e.name) {
            Err(e) => Some(brief(e)),
            Ok(exp) => join_problems(exp.validate()),
        };
        outcomes.push(("expansion", e.name.clone(), problem));
    }
    for w in &ws.witnesses {
        let problem = match ws.build_witness(&w.name) {
            Err(e) => Some(brief(e)),
            Ok((cat, BuiltWitness::Movable(w))) => join_problems(verify_witness(&cat, &w)),
            Ok((cat, BuiltWitness::Uniform(w))) => {
                join_problems(verify_uniform_witness(&cat, &w))
            }
        };
        outcomes.push(("witness", w.name.clone(), problem));
    }

    let failed = outcomes.iter().filter(|(_, _, problem)| problem.is_some()).count();
    let rows: Vec<Value> = outcomes
        .iter()
        .map(|(kind, name, problem)| match problem {
            None => json!({"kind": kind, "name": name, "status": "ok"}),
            Some(text) => json!({"kind": kind, "name": name, "status": "error", "error": text}),
        })
        .collect();
    let mut report = if failed == 0 {
        Report::ok("validate")
    } else {
        Report::invalid("validate", format!("{failed} of {} entries failed", outcomes.len()))
    };
    for (kind, name, problem) in &outcomes {
        report = report.note(match problem {
            None => format!("{kind} {name}: ok"),
            Some(text) => format!("{kind} {name}: {text}"),
        });
    }
    report.details(json!({ "entries": rows }))
}

fn brief(e: impl Display) -> String {
    e.to_string()
}

fn join_problems(problems: Vec<impl Display>) -> Option<String> {
    if problems.is_empty() {
        None
    } else {
        Some(problems.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("; "))
    }
}

// ---------------------------------------------------------------------
// check-movable
// ---------------------------------------------------------------------

fn check_movable(ws: &WorkspaceFile, cat_name: &str, object: &str, uniform: bool) -> Report {
    const CMD: &str = "check-movable";
    let cat = match ws.build_category(cat_name) {
        Ok(cat) => cat,
        Err(e) => return Report::invalid(CMD, brief(e)),
    };
    let x = match cat.object(object) {
        Ok(x) => x,
        Err(e) => return Report::invalid(CMD, brief(e)),
    };
    let notion = if uniform { "uniformly movable" } else { "movable" };
    let outcome = if uniform {
        decide_uniformly_movable(&cat, x).map(|w| w.0)
    } else {
        decide_movable(&cat, x)
    };
    match outcome {
        Ok(w) => {
            let entry = witness_entry(&cat, object, &w, uniform);
            Report::ok(CMD)
                .note(format!("`{object}` is {notion} in `{cat_name}`"))
                .note(format!(
                    "mover `{}` via `{}`; {} factors",
                    entry.mover,
                    entry.m,
                    entry.factors.len()
                ))
                .details(json!({ "witness": entry }))
        }
        Err(r) => {
            let certificate = if uniform {
                format!("no (M,m) admits consistent factors\n{r}")
            } else {
                r.to_string()
            };
            Report::refuted(CMD, certificate)
                .note(format!("`{object}` is not {notion} in `{cat_name}`"))
                .details(json!({ "refutation": r }))
        }
    }
}

// ---------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------

fn category_workspace(cats: &[&FinCategory]) -> WorkspaceFile {
    WorkspaceFile {
        categories: cats.iter().map(|c| raw_of(c)).collect(),
        ..WorkspaceFile::default()
    }
}

fn construction_report(cmd: &'static str, built: &FinCategory) -> Report {
    let ws = category_workspace(&[built]);
    Report::ok(cmd)
        .note(format!(
            "category `{}`: {} objects, {} morphisms",
            built.name(),
            built.object_count(),
            built.morphism_count()
        ))
        .details(json!({ "workspace": ws }))
        .text(print_workspace(&ws))
}

fn comma(ws: &WorkspaceFile, cat_name: &str, sub: &str, apex: &str) -> Report {
    const CMD: &str = "comma";
    let entry = match ws.subcategory_entry(sub) {
        Some(entry) => entry,
        None => return Report::invalid(CMD, format!("no subcategory named `{sub}`")),
    };
    if entry.category != cat_name {
        return Report::invalid(
            CMD,
            format!("subcategory `{sub}` belongs to `{}`, not `{cat_name}`", entry.category),
        );
    }
    let (cat, spec) = match ws.build_subcategory(sub) {
        Ok(built) => built,
        Err(e) => return Report::invalid(CMD, brief(e)),
    };
    let x = match cat.object(apex) {
        Ok(x) => x,
        Err(e) => return Report::invalid(CMD, brief(e)),
    };
    match comma_category(&cat, &spec, x) {
        Ok(comma) => construction_report(CMD, &comma.category)
            .note(format!("objects are the morphisms `{apex} -> {sub}`; an object's name is its ambient morphism")),
        Err(e) => Report::invalid(CMD, brief(e)),
    }
}

fn functor_json(dom: &FinCategory, cod: &FinCategory, f: &Functor) -> Value {
    let objects: serde_json::Map<String, Value> = dom
        .objects()
        .map(|o| {
            (dom.object_name(o).to_string(), json!(cod.object_name(f.object_map[o.index()])))
        })
        .collect();
    let morphisms: serde_json::Map<String, Value> = dom
        .morphisms()
        .map(|m| {
            (dom.morphism_name(m).to_string(), json!(cod.morphism_name(f.morphism_map[m.index()])))
        })
        .collect();
    json!({ "objects": objects, "morphisms": morphisms })
}

fn product_cmd(ws: &WorkspaceFile, left: &str, right: &str) -> Report {
    const CMD: &str = "product";
    let (a, b) = match (ws.build_category(left), ws.build_category(right)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Report::invalid(CMD, brief(e)),
    };
    match product(&[&a, &b]) {
        Ok(p) => {
            let out = category_workspace(&[&p.category]);
            Report::ok(CMD)
                .note(format!(
                    "category `{}`: {} objects, {} morphisms",
                    p.category.name(),
                    p.category.object_count(),
                    p.category.morphism_count()
                ))
                .details(json!({
                    "workspace": out,
                    "projections": [
                        functor_json(&p.category, &a, &p.projections[0]),
                        functor_json(&p.category, &b, &p.projections[1]),
                    ],
                }))
                .text(print_workspace(&out))
        }
        Err(e) => Report::invalid(CMD, brief(e)),
    }
}

fn dual(ws: &WorkspaceFile, cat_name: &str) -> Report {
    const CMD: &str = "dual";
    match ws.build_category(cat_name) {
        Ok(cat) => construction_report(CMD, &cat.dual()),
        Err(e) => Report::invalid(CMD, brief(e)),
    }
}

fn pullback(ws: &WorkspaceFile, cat_name: &str, f: &str, g: &str) -> Report {
    const CMD: &str = "pullback";
    let cat = match ws.build_category(cat_name) {
        Ok(cat) => cat,
        Err(e) => return Report::invalid(CMD, brief(e)),
    };
    let (fm, gm) = match (cat.morphism(f), cat.morphism(g)) {
        (Ok(fm), Ok(gm)) => (fm, gm),
        (Err(e), _) | (_, Err(e)) => return Report::invalid(CMD, brief(e)),
    };
    if cat.cod(fm) != cat.cod(gm) {
        return Report::invalid(
            CMD,
            format!("`{f}` and `{g}` do not share a codomain, so they form no cospan"),
        );
    }
    match find_pullback(&cat, fm, gm) {
        Ok(Some(pb)) => {
            let mediators: Vec<Value> = pb
                .mediators
                .iter()
                .map(|(&(qx, qy), &u)| {
                    json!({
                        "q_x": cat.morphism_name(qx),
                        "q_y": cat.morphism_name(qy),
                        "mediator": cat.morphism_name(u),
                    })
                })
                .collect();
            Report::ok(CMD)
                .note(format!(
                    "apex `{}` with projections `{}`, `{}`",
                    cat.object_name(pb.apex),
                    cat.morphism_name(pb.p_x),
                    cat.morphism_name(pb.p_y)
                ))
                .note(format!("{} commuting cones factor uniquely", mediators.len()))
                .details(json!({
                    "apex": cat.object_name(pb.apex),
                    "p_x": cat.morphism_name(pb.p_x),
                    "p_y": cat.morphism_name(pb.p_y),
                    "mediators": mediators,
                }))
        }
        Ok(None) => Report::refuted(
            CMD,
            format!("no object of `{cat_name}` is a pullback of (`{f}`, `{g}`)"),
        ),
        Err(e) => Report::invalid(CMD, brief(e)),
    }
}

// ---------------------------------------------------------------------
// system-check
// ---------------------------------------------------------------------

fn system_ambient(sys: &System) -> Option<&FinCategory> {
    match sys {
        System::Finite(s) => Some(&s.ambient),
        System::Periodic(s) => Some(&s.ambient),
        System::Divisibility(_) => None,
    }
}

fn mor_json(cat: Option<&FinCategory>, m: MorId) -> Value {
    match cat {
        Some(cat) => json!(cat.morphism_name(m)),
        None => json!(m.index()),
    }
}

fn movable_witness_json(cat: Option<&FinCategory>, w: &SystemMovableWitness) -> Value {
    match w {
        SystemMovableWitness::Finite(sets) => {
            let rows: Vec<Value> = sets
                .iter()
                .map(|s| {
                    let factors: serde_json::Map<String, Value> = s
                        .factors
                        .iter()
                        .map(|(&nu, &r)| (nu.to_string(), mor_json(cat, r)))
                        .collect();
                    json!({"lambda": s.lambda, "m": s.m, "factors": factors})
                })
                .collect();
            json!({ "finite": rows })
        }
        SystemMovableWitness::Periodic(sets) => {
            let rows: Vec<Value> = sets
                .iter()
                .map(|s| {
                    json!({
                        "lambda": s.lambda,
                        "m": s.m,
                        "start": s.start,
                        "prefix": s.prefix.iter().map(|&r| mor_json(cat, r)).collect::<Vec<_>>(),
                        "cycle": s.cycle.iter().map(|&r| mor_json(cat, r)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({ "periodic": rows })
        }
        SystemMovableWitness::Divisibility(sets) => {
            let rows: Vec<Value> = sets
                .iter()
                .map(|s| {
                    json!({
                        "lambda": s.lambda,
                        "m": s.m,
                        "head": s.head.iter().map(u128::to_string).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({ "divisibility": rows })
        }
    }
}

fn uniform_witness_json(cat: Option<&FinCategory>, w: &SystemUniformWitness) -> Value {
    let threads: Vec<Value> = w
        .threads
        .iter()
        .map(|t| {
            let body = match &t.body {
                ThreadBody::Total(rs) => {
                    json!({"components": rs.iter().map(|&r| mor_json(cat, r)).collect::<Vec<_>>()})
                }
                ThreadBody::Periodic { prefix, cycle } => json!({
                    "prefix": prefix.iter().map(|&r| mor_json(cat, r)).collect::<Vec<_>>(),
                    "cycle": cycle.iter().map(|&r| mor_json(cat, r)).collect::<Vec<_>>(),
                }),
                ThreadBody::Arithmetic { head } => {
                    json!({"head": head.iter().map(u128::to_string).collect::<Vec<_>>()})
                }
            };
            json!({"lambda": t.lambda, "m": t.m, "body": body})
        })
        .collect();
    json!({ "threads": threads })
}

fn system_summary(sys: &System) -> String {
    match sys {
        System::Finite(s) => format!("finite system over {} indices", s.objects.len()),
        System::Periodic(s) => format!(
            "periodic sequence, prefix {} and cycle {}",
            s.prefix_objects.len(),
            s.cycle_objects.len()
        ),
        System::Divisibility(s) => format!(
            "divisibility sequence, prefix {:?} and cycle {:?}",
            s.prefix, s.cycle
        ),
    }
}

fn system_check(ws: &WorkspaceFile, name: &str, uniform: bool) -> Report {
    const CMD: &str = "system-check";
    let sys = match ws.build_system(name) {
        Ok(sys) => sys,
        Err(e) => return Report::invalid(CMD, brief(e)),
    };
    if let Some(problems) = join_problems(validate_system(&sys)) {
        return Report::invalid(CMD, problems);
    }
    let summary = system_summary(&sys);
    let cat = system_ambient(&sys);
    let notion = if uniform { "uniformly movable" } else { "movable" };
    if uniform {
        match decide_system_uniform(&sys) {
            Ok(w) => Report::ok(CMD)
                .note(format!("`{name}` ({summary}) is {notion}"))
                .note(format!("{} pro-threads exhibit it", w.threads.len()))
                .details(json!({ "witness": uniform_witness_json(cat, &w) })),
            Err(r) => Report::refuted(CMD, r.to_string())
                .note(format!("`{name}` ({summary}) is not {notion}"))
                .details(json!({ "refutation": r })),
        }
    } else {
        match decide_system_movable(&sys) {
            Ok(w) => Report::ok(CMD)
                .note(format!("`{name}` ({summary}) is {notion}"))
                .details(json!({ "witness": movable_witness_json(cat, &w) })),
            Err(r) => Report::refuted(CMD, r.to_string())
                .note(format!("`{name}` ({summary}) is not {notion}"))
                .details(json!({ "refutation": r })),
        }
    }
}

// ---------------------------------------------------------------------
// expansion-check
// ---------------------------------------------------------------------

fn expansion_check(ws: &WorkspaceFile, name: &str) -> Report {
    const CMD: &str = "expansion-check";
    let exp = match ws.build_expansion(name) {
        Ok(exp) => exp,
        Err(e) => return Report::invalid(CMD, brief(e)),
    };
    if let Some(problems) = join_problems(exp.validate()) {
        return Report::invalid(CMD, problems);
    }
    let ambient = &exp.ambient;
    let mut violations: Vec<AxiomViolation> = Vec::new();
    let mut reports = (None, None);
    match check_ae1(&exp) {
        Ok(r) => reports.0 = Some(r),
        Err(mut v) => violations.append(&mut v),
    }
    match check_ae2(&exp) {
        Ok(r) => reports.1 = Some(r),
        Err(mut v) => violations.append(&mut v),
    }
    if violations.iter().any(|v| matches!(v, AxiomViolation::Malformed(_))) {
        let text = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n");
        return Report::invalid(CMD, text);
    }
    if !violations.is_empty() {
        let text = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n");
        let rows: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Report::refuted(CMD, text)
            .note(format!("`{name}` is not an expansion: {} violations", rows.len()))
            .details(json!({ "violations": rows }));
    }
    let (ae1, ae2) = (reports.0.expect("no violations"), reports.1.expect("no violations"));
    let factorizations: serde_json::Map<String, Value> = ae1
        .factorizations
        .iter()
        .map(|(&f, &(level, factor))| {
            (
                ambient.morphism_name(f).to_string(),
                json!({"level": level, "factor": ambient.morphism_name(factor)}),
            )
        })
        .collect();
    let equalizations: Vec<Value> = ae2
        .equalizations
        .iter()
        .map(|c| {
            json!({
                "lambda": c.lambda,
                "h": ambient.morphism_name(c.h),
                "k": ambient.morphism_name(c.k),
                "level": c.level,
            })
        })
        .collect();
    Report::ok(CMD)
        .note(format!(
            "AE1: all {} morphisms out of the apex factor through a leg",
            factorizations.len()
        ))
        .note(format!(
            "AE2: all {} agreeing pairs are equalized by a deeper bond",
            equalizations.len()
        ))
        .details(json!({"ae1": factorizations, "ae2": equalizations}))
}

// ---------------------------------------------------------------------
// theorem-check and corollary8
// ---------------------------------------------------------------------

fn expansion_context(
    ws: &WorkspaceFile,
    cmd: &'static str,
    name: &str,
) -> Result<(FinCategory, SubcategorySpec, Expansion), Report> {
    let entry = match ws.expansion_entry(name) {
        Some(entry) => entry,
        None => return Err(Report::invalid(cmd, format!("no expansion named `{name}`"))),
    };
    let (cat, spec) =
        ws.build_subcategory(&entry.subcategory).map_err(|e| Report::invalid(cmd, brief(e)))?;
    let exp = ws.build_expansion(name).map_err(|e| Report::invalid(cmd, brief(e)))?;
    Ok((cat, spec, exp))
}

fn holds_word(holds: bool) -> &'static str {
    if holds {
        "uniformly movable"
    } else {
        "not uniformly movable"
    }
}

fn comma_witness_entries(
    comma: &FinCategory,
    side: &CategoryDecision<UniformMovabilityWitness>,
) -> Vec<Value> {
    side.witnesses
        .values()
        .map(|w| json!(witness_entry(comma, comma.object_name(w.0.target), &w.0, true)))
        .collect()
}

fn theorem_details(report: &TheoremReport) -> Value {
    let comma = &report.comma.category;
    let threads: serde_json::Map<String, Value> = report
        .threads_from_comma
        .iter()
        .map(|(&level, outcome)| {
            let v = match outcome {
                Ok(_) => json!("ok"),
                Err(e) => json!(e.to_string()),
            };
            (level.to_string(), v)
        })
        .collect();
    let witnesses: serde_json::Map<String, Value> = report
        .witnesses_from_system
        .iter()
        .map(|(&obj, outcome)| {
            let v = match outcome {
                Ok(_) => json!("ok"),
                Err(e) => json!(e.to_string()),
            };
            (comma.object_name(obj).to_string(), v)
        })
        .collect();
    json!({
        "comma_category": comma.name(),
        "comma_objects": comma.object_count(),
        "comma_holds": report.comma_side.holds(),
        "system_holds": report.system_side.is_ok(),
        "comma_witnesses": comma_witness_entries(comma, &report.comma_side),
        "threads_from_comma": threads,
        "witnesses_from_system": witnesses,
    })
}

fn theorem_check_cmd(ws: &WorkspaceFile, name: &str) -> Report {
    const CMD: &str = "theorem-check";
    let (cat, spec, exp) = match expansion_context(ws, CMD, name) {
        Ok(parts) => parts,
        Err(report) => return report,
    };
    let outcome = match theorem_check(&cat, &spec, exp.apex, &exp) {
        Ok(outcome) => outcome,
        Err(e) => return Report::invalid(CMD, brief(e)),
    };
    let details = theorem_details(&outcome);
    let comma_name = outcome.comma.category.name().to_string();
    match outcome.equivalence {
        Equivalence::Consistent { holds } => {
            let transports = outcome.transports_verified();
            let base = Report::ok(CMD)
                .note(format!("system side: {}", holds_word(outcome.system_side.is_ok())))
                .note(format!(
                    "comma side: `{comma_name}` is {}",
                    holds_word(outcome.comma_side.holds())
                ))
                .note(if holds {
                    "the equivalence holds with both sides positive".to_string()
                } else {
                    "the equivalence holds with both sides negative".to_string()
                });
            if transports {
                base.note(format!(
                    "{} threads and {} comma witnesses transported and re-verified",
                    outcome.threads_from_comma.len(),
                    outcome.witnesses_from_system.len()
                ))
                .details(details)
            } else {
                let failures: Vec<String> = outcome
                    .threads_from_comma
                    .values()
                    .filter_map(|r| r.as_ref().err())
                    .map(|e| e.to_string())
                    .chain(
                        outcome
                            .witnesses_from_system
                            .values()
                            .filter_map(|r| r.as_ref().err())
                            .map(|e| e.to_string()),
                    )
                    .collect();
                Report::refuted(
                    CMD,
                    format!("witness transport failed:\n{}", failures.join("\n")),
                )
                .note("the verdicts agree but a transported witness does not verify".to_string())
                .details(details)
            }
        }
        Equivalence::Disagreement { comma_holds, system_holds } => Report::refuted(
            CMD,
            format!(
                "the sides disagree: the system is {}, the comma category `{comma_name}` is {}",
                holds_word(system_holds),
                holds_word(comma_holds)
            ),
        )
        .details(details),
    }
}

fn corollary8(ws: &WorkspaceFile, name: &str) -> Report {
    const CMD: &str = "corollary8";
    let (cat, spec, exp) = match expansion_context(ws, CMD, name) {
        Ok(parts) => parts,
        Err(report) => return report,
    };
    let outcome = match corollary_sequence_check(&cat, &spec, exp.apex, &exp) {
        Ok(outcome) => outcome,
        Err(e) => return Report::invalid(CMD, brief(e)),
    };
    let movable = outcome.movable.holds();
    let uniform = outcome.uniform.holds();
    let details = json!({
        "movable": movable,
        "uniform": uniform,
        "movable_refuted": outcome.movable.refutations.len(),
        "uniform_refuted": outcome.uniform.refutations.len(),
    });
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let base = Report::ok(CMD)
        .note(format!("comma category movable everywhere: {}", yes_no(movable)))
        .note(format!("comma category uniformly movable everywhere: {}", yes_no(uniform)));
    if outcome.agrees() {
        base.note("the sequence reading holds: the verdicts coincide".to_string()).details(details)
    } else {
        Report::refuted(
            CMD,
            format!(
                "for a sequence expansion the verdicts must coincide, but movable = {} while uniformly movable = {}",
                yes_no(movable),
                yes_no(uniform)
            ),
        )
        .details(details)
    }
}

// ---------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------

fn gen(
    seed: u64,
    objects: Option<usize>,
    morphisms: Option<usize>,
    density: Option<f64>,
) -> Report {
    const CMD: &str = "gen";
    let defaults = GenOptions::default();
    let opts = GenOptions {
        objects: objects.unwrap_or(defaults.objects),
        morphisms: morphisms.unwrap_or(defaults.morphisms),
        density: density.unwrap_or(defaults.density),
    };
    match gen_workspace(seed, &opts) {
        Ok(ws) => Report::ok(CMD)
            .note(format!(
                "seed {seed}, {} objects, {} morphisms, density {}",
                opts.objects, opts.morphisms, opts.density
            ))
            .note(format!(
                "{} categories, {} subcategories, {} systems, {} expansions",
                ws.categories.len(),
                ws.subcategories.len(),
                ws.systems.len(),
                ws.expansions.len()
            ))
            .details(json!({ "workspace": ws }))
            .text(print_workspace(&ws)),
        Err(e) => Report::invalid(CMD, brief(e)),
    }
}
