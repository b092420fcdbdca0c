//! Command-line front end. [`run`] parses arguments, dispatches one verb and
//! returns the exit code with the text to print; the `finehier` binary is a
//! thin wrapper around it.
//!
//! Exit codes: 0 on success, 1 on domain errors (no reduction, failed
//! preconditions, budgets), 2 on unreadable or malformed input.

use std::fmt::Write as _;
use std::fs;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::category::{self, CategoryError, Sampling};
use crate::families::{self, format_path, FamilyError, KPartition, TFamily, Undetermined};
use crate::hausdorff::{self, HausdorffError};
use crate::hierarchy::{self, HierarchyError, MembershipStatus};
use crate::spaces::{self, SpaceError, SpaceMap, SpaceModel};
use crate::trees::{self, HComparator, IterTree, TreeError};

#[derive(Parser, Debug)]
#[command(name = "finehier", about = "Fine hierarchy of k-partitions on finite space models")]
struct Cli {
    /// Emit structured JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of nodes accepted in an input tree.
    #[arg(long, global = true, default_value_t = 64)]
    budget_nodes: usize,
    /// Largest cylinder depth accepted in an input model.
    #[arg(long, global = true, default_value_t = 6)]
    budget_depth: u32,
    /// Candidate sets a membership search may examine.
    #[arg(long, global = true, default_value_t = hierarchy::DEFAULT_SEARCH_BUDGET)]
    budget_search: usize,
    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare two trees under the h-preorder.
    TreeCompare { a: String, b: String },
    /// Rank the trees of a file (one per line) under the h-preorder.
    TreeLinearize { trees: String },
    /// Summarize a space file.
    SpaceLoad { space: String },
    /// Validate a family and report what it determines.
    FamilyValidate { space: String, family: String },
    /// Reduce a family.
    FamilyReduce { space: String, family: String },
    /// Run the mind-change evaluation on every point (or one point).
    FamilyEval {
        space: String,
        family: String,
        #[arg(long)]
        point: Option<String>,
    },
    /// Decide membership of a partition against candidate trees.
    Classify {
        space: String,
        partition: String,
        trees: String,
    },
    /// The category image f[S] of a set along a map.
    CategoryImage {
        domain: String,
        codomain: String,
        map: String,
        set: String,
    },
    /// Check level preservation along an open surjection.
    PreservationCheck {
        domain: String,
        codomain: String,
        map: String,
        partition: String,
        tree: String,
    },
    /// Extract a tree family from a guess table.
    HausdorffExtract {
        table: String,
        /// Compare against the limit partition.
        #[arg(long)]
        verify: bool,
    },
    /// Run the cross-module invariant checks.
    Selftest,
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Domain(String),
}

impl From<SpaceError> for Failure {
    fn from(e: SpaceError) -> Self {
        match e {
            SpaceError::Parse { .. } | SpaceError::UnknownPoint(_) | SpaceError::DuplicatePoint(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Parse { .. } => Failure::Input(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Parse { .. } | FamilyError::InvalidPath(_) => Failure::Input(e.to_string()),
            FamilyError::Space(s) => s.into(),
            FamilyError::Tree(t) => t.into(),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<HausdorffError> for Failure {
    fn from(e: HausdorffError) -> Self {
        match e {
            HausdorffError::Parse { .. } => Failure::Input(e.to_string()),
            HausdorffError::Space(s) => s.into(),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<CategoryError> for Failure {
    fn from(e: CategoryError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<HierarchyError> for Failure {
    fn from(e: HierarchyError) -> Self {
        Failure::Domain(e.to_string())
    }
}

struct Ctx {
    json: bool,
    budget_nodes: usize,
    budget_depth: u32,
    budget_search: usize,
    seed: u64,
}

/// Output of one command: JSON report and its text rendering.
struct Report {
    json: Value,
    text: String,
    /// Nonzero when the command ran but found a domain failure to report.
    code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    let ctx = Ctx {
        json: cli.json,
        budget_nodes: cli.budget_nodes,
        budget_depth: cli.budget_depth,
        budget_search: cli.budget_search,
        seed: cli.seed,
    };
    match dispatch(&ctx, &cli.command) {
        Ok(r) => {
            let out = if ctx.json {
                serde_json::to_string_pretty(&r.json).unwrap() + "\n"
            } else {
                r.text
            };
            (r.code, out)
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Input(m) => (2, m),
                Failure::Domain(m) => (1, m),
            };
            let out = if ctx.json {
                serde_json::to_string_pretty(&json!({ "error": msg, "exit": code })).unwrap() + "\n"
            } else {
                format!("error: {msg}\n")
            };
            (code, out)
        }
    }
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read `{path}`: {e}")))
}

fn first_content_line(text: &str) -> &str {
    spaces::content_lines(text).next().map_or("", |(_, l)| l)
}

fn load_tree(ctx: &Ctx, path: &str) -> Result<IterTree, Failure> {
    let t: IterTree = first_content_line(&read(path)?).parse()?;
    check_tree_budget(ctx, &t)?;
    Ok(t)
}

fn check_tree_budget(ctx: &Ctx, t: &IterTree) -> Result<(), Failure> {
    let n = t.node_count();
    if n > ctx.budget_nodes {
        return Err(Failure::Domain(format!(
            "tree has {n} nodes, over the --budget-nodes limit {}",
            ctx.budget_nodes
        )));
    }
    Ok(())
}

fn load_trees(ctx: &Ctx, path: &str) -> Result<Vec<IterTree>, Failure> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (_, l) in spaces::content_lines(&text) {
        let t: IterTree = l.parse()?;
        check_tree_budget(ctx, &t)?;
        out.push(t);
    }
    Ok(out)
}

fn load_space(ctx: &Ctx, path: &str) -> Result<Arc<SpaceModel>, Failure> {
    let m = spaces::parse_space(&read(path)?)?;
    if let spaces::ModelKind::Cylinder { depth, .. } = m.kind() {
        if *depth > ctx.budget_depth {
            return Err(Failure::Domain(format!(
                "cylinder depth {depth} is over the --budget-depth limit {}",
                ctx.budget_depth
            )));
        }
    }
    Ok(Arc::new(m))
}

fn dispatch(ctx: &Ctx, cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::TreeCompare { a, b } => tree_compare(ctx, a, b),
        Command::TreeLinearize { trees } => tree_linearize(ctx, trees),
        Command::SpaceLoad { space } => space_load(ctx, space),
        Command::FamilyValidate { space, family } => family_validate(ctx, space, family),
        Command::FamilyReduce { space, family } => family_reduce(ctx, space, family),
        Command::FamilyEval { space, family, point } => family_eval(ctx, space, family, point.as_deref()),
        Command::Classify {
            space,
            partition,
            trees,
        } => classify(ctx, space, partition, trees),
        Command::CategoryImage {
            domain,
            codomain,
            map,
            set,
        } => category_image(ctx, domain, codomain, map, set),
        Command::PreservationCheck {
            domain,
            codomain,
            map,
            partition,
            tree,
        } => preservation_check(ctx, domain, codomain, map, partition, tree),
        Command::HausdorffExtract { table, verify } => hausdorff_extract(table, *verify),
        Command::Selftest => selftest(ctx),
    }
}

fn ok(json: Value, text: String) -> Result<Report, Failure> {
    Ok(Report { json, text, code: 0 })
}

fn tree_compare(ctx: &Ctx, a: &str, b: &str) -> Result<Report, Failure> {
    let t = load_tree(ctx, a)?;
    let s = load_tree(ctx, b)?;
    let mut cmp = HComparator::new();
    let ab = cmp.leq_with_witness(&t, &s);
    let ba = cmp.leq_with_witness(&s, &t);
    let verdict = match (&ab, &ba) {
        (Some(_), Some(_)) => "equivalent",
        (Some(_), None) => "less",
        (None, Some(_)) => "greater",
        (None, None) => "incomparable",
    };
    let fmt_witness = |w: &Option<trees::HWitness>| {
        w.as_ref().map(|w| {
            w.map
                .iter()
                .map(|(x, y)| {
                    format!(
                        "{} -> {}",
                        format_path(std::slice::from_ref(x)),
                        format_path(std::slice::from_ref(y))
                    )
                })
                .collect::<Vec<_>>()
        })
    };
    let mut text = format!("{verdict}\n");
    if let Some(w) = fmt_witness(&ab) {
        let _ = writeln!(text, "witness A <= B: {}", w.join(", "));
    }
    if let Some(w) = fmt_witness(&ba) {
        let _ = writeln!(text, "witness B <= A: {}", w.join(", "));
    }
    ok(
        json!({
            "a": t.to_string(),
            "b": s.to_string(),
            "verdict": verdict,
            "a_leq_b": fmt_witness(&ab),
            "b_leq_a": fmt_witness(&ba),
        }),
        text,
    )
}

fn tree_linearize(ctx: &Ctx, path: &str) -> Result<Report, Failure> {
    let ts = load_trees(ctx, path)?;
    let classes = trees::linearize(&ts)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for c in &classes {
        let members: Vec<String> = c.members.iter().map(|&i| ts[i].to_string()).collect();
        let _ = writeln!(text, "rank {}: {}", c.rank, members.join(" ~ "));
        rows.push(json!({ "rank": c.rank, "members": members }));
    }
    ok(json!({ "classes": rows }), text)
}

fn space_load(ctx: &Ctx, path: &str) -> Result<Report, Failure> {
    let x = load_space(ctx, path)?;
    let kind = match x.kind() {
        spaces::ModelKind::FinitePoset => "poset".to_string(),
        spaces::ModelKind::Cylinder { alphabet, depth } => format!("cylinder b={alphabet} d={depth}"),
    };
    let opens = if x.len() <= 24 {
        Some(spaces::open_sets(&x).len())
    } else {
        None
    };
    let maximal: Vec<&str> = x.maximal_points().iter().map(|p| x.name(p)).collect();
    let mut text = format!("{kind}, {} points\n", x.len());
    if let Some(n) = opens {
        let _ = writeln!(text, "open sets: {n}");
    }
    let _ = writeln!(text, "maximal points: {}", maximal.join(" "));
    text.push_str(&x.to_string());
    ok(
        json!({
            "kind": kind,
            "points": x.names(),
            "open_sets": opens,
            "maximal": maximal,
            "text": x.to_string(),
        }),
        text,
    )
}

fn load_family(ctx: &Ctx, space: &str, family: &str) -> Result<(Arc<SpaceModel>, TFamily), Failure> {
    let x = load_space(ctx, space)?;
    let f = families::parse_family(x.clone(), &read(family)?)?;
    check_tree_budget(ctx, f.shape())?;
    Ok((x, f))
}

fn partition_json(a: &KPartition) -> Value {
    let x = a.space();
    Value::Object(
        (0..x.len())
            .map(|p| (x.name(p).to_string(), json!(a.value(p))))
            .collect(),
    )
}

fn undetermined_text(x: &SpaceModel, u: &Undetermined) -> String {
    match u {
        Undetermined::Conflict { point, first, second } => format!(
            "conflict at `{}`: {} says {}, {} says {}",
            x.name(*point),
            format_path(&first.0),
            first.1,
            format_path(&second.0),
            second.1
        ),
        Undetermined::Uncovered { point } => format!("no terminating component contains `{}`", x.name(*point)),
    }
}

fn family_validate(ctx: &Ctx, space: &str, family: &str) -> Result<Report, Failure> {
    let (x, f) = load_family(ctx, space, family)?;
    let det = f.determine();
    let mut text = format!(
        "valid: yes\nmonotone: {}\nreduced: {}\n",
        yes(f.is_monotone()),
        yes(f.is_reduced())
    );
    let det_json = match &det {
        Ok(a) => {
            let _ = writeln!(text, "determines: {}", partition_line(a));
            partition_json(a)
        }
        Err(u) => {
            let _ = writeln!(text, "determines: none ({})", undetermined_text(&x, u));
            json!({ "undetermined": undetermined_text(&x, u) })
        }
    };
    ok(
        json!({
            "valid": true,
            "monotone": f.is_monotone(),
            "reduced": f.is_reduced(),
            "determines": det_json,
        }),
        text,
    )
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn partition_line(a: &KPartition) -> String {
    let x = a.space();
    (0..x.len())
        .map(|p| format!("{}={}", x.name(p), a.value(p)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn family_reduce(ctx: &Ctx, space: &str, family: &str) -> Result<Report, Failure> {
    let (_, f) = load_family(ctx, space, family)?;
    let r = f.reduce_family().map_err(|e| match e {
        FamilyError::Space(SpaceError::NoReduction { level, point, .. }) => Failure::Domain(format!(
            "NoReduction at level {level}: the connected piece containing `{point}` lies in no single sibling set"
        )),
        other => other.into(),
    })?;
    ok(
        json!({ "family": r.to_string(), "reduced": r.is_reduced() }),
        r.to_string(),
    )
}

fn family_eval(ctx: &Ctx, space: &str, family: &str, point: Option<&str>) -> Result<Report, Failure> {
    let (x, f) = load_family(ctx, space, family)?;
    let points: Vec<usize> = match point {
        Some(name) => vec![x
            .index_of(name)
            .ok_or_else(|| Failure::Input(format!("unknown point `{name}`")))?],
        None => (0..x.len()).collect(),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut conflicts = 0;
    for p in points {
        let ev = f.evaluate(p);
        let runs: Vec<String> = ev
            .runs
            .iter()
            .map(|(path, l)| format!("{}:{}", format_path(path), l))
            .collect();
        let value = ev.value();
        if value.is_none() {
            conflicts += 1;
        }
        let shown = value.map_or_else(|| "conflict".to_string(), |v| v.to_string());
        let _ = writeln!(text, "{}\t{}\t{}", x.name(p), shown, runs.join(" "));
        rows.push(json!({ "point": x.name(p), "value": value, "runs": runs }));
    }
    Ok(Report {
        json: json!({ "points": rows }),
        text,
        code: i32::from(conflicts > 0),
    })
}

fn status_json(s: &MembershipStatus) -> Value {
    match s {
        MembershipStatus::Member(f) => json!({ "status": s.name(), "witness": f.to_string() }),
        _ => json!({ "status": s.name() }),
    }
}

fn classify(ctx: &Ctx, space: &str, partition: &str, trees: &str) -> Result<Report, Failure> {
    let x = load_space(ctx, space)?;
    let a = families::parse_partition(x, &read(partition)?)?;
    let ts = load_trees(ctx, trees)?;
    let c = hierarchy::classify(&a, &ts, ctx.budget_search);
    let mut text = String::new();
    let mut rows = Vec::new();
    for e in &c.entries {
        let _ = writeln!(text, "{}\t{}\t{}", e.tree, e.result.status.name(), e.result.stats);
        let mut row = status_json(&e.result.status);
        row["tree"] = json!(e.tree.to_string());
        row["candidates"] = json!(e.result.stats.candidates);
        rows.push(row);
    }
    let minimal: Vec<String> = c.minimal_trees().iter().map(|t| t.to_string()).collect();
    let _ = writeln!(text, "minimal: {}", minimal.join(", "));
    let _ = writeln!(text, "monotonicity violations: {}", c.violations.len());
    Ok(Report {
        json: json!({ "entries": rows, "minimal": minimal, "violations": c.violations }),
        text,
        code: i32::from(!c.violations.is_empty()),
    })
}

fn load_map(ctx: &Ctx, domain: &str, codomain: &str, map: &str) -> Result<SpaceMap, Failure> {
    let x = load_space(ctx, domain)?;
    let y = load_space(ctx, codomain)?;
    Ok(spaces::parse_map(x, y, &read(map)?)?)
}

fn category_image(ctx: &Ctx, domain: &str, codomain: &str, map: &str, set: &str) -> Result<Report, Failure> {
    let f = load_map(ctx, domain, codomain, map)?;
    let s = spaces::parse_set(f.domain(), first_content_line(&read(set)?))?;
    let img = category::category_image(&f, s)?;
    let plain = f.image(s);
    let y = f.codomain();
    let text = format!(
        "f[S] = {}\nf(S) = {}\n",
        spaces::format_set(y, img),
        spaces::format_set(y, plain)
    );
    ok(
        json!({
            "category_image": spaces::format_set(y, img),
            "image": spaces::format_set(y, plain),
        }),
        text,
    )
}

fn preservation_check(
    ctx: &Ctx,
    domain: &str,
    codomain: &str,
    map: &str,
    partition: &str,
    tree: &str,
) -> Result<Report, Failure> {
    let f = load_map(ctx, domain, codomain, map)?;
    let a = families::parse_partition(f.codomain().clone(), &read(partition)?)?;
    let t = load_tree(ctx, tree)?;
    let r = category::check_preservation(&f, &a, &t, ctx.budget_search)?;
    let opt = |b: Option<bool>| b.map_or("n/a", yes);
    let text = format!(
        "A in Sigma(Y,T): {}\nA o f in Sigma(X,T): {}\nbiconditional: {}\npushforward witness verifies: {}\npullback witness verifies: {}\nholds: {}\n",
        r.codomain.name(),
        r.domain.name(),
        opt(r.biconditional),
        opt(r.pushforward_verified),
        opt(r.pullback_verified),
        yes(r.holds())
    );
    Ok(Report {
        json: json!({
            "codomain": status_json(&r.codomain),
            "domain": status_json(&r.domain),
            "biconditional": r.biconditional,
            "pushforward_verified": r.pushforward_verified,
            "pullback_verified": r.pullback_verified,
            "holds": r.holds(),
        }),
        text,
        code: i32::from(!r.holds()),
    })
}

fn hausdorff_extract(table: &str, verify: bool) -> Result<Report, Failure> {
    let g = hausdorff::parse_guess_table(&read(table)?)?;
    let m = g.machine();
    let e = hausdorff::hausdorff_extract(&m)?;
    let mut text = format!("tree: {}\nfamily:\n{}", e.tree, e.family);
    let levels: Vec<Vec<String>> =
        e.r.levels
            .iter()
            .map(|l| l.iter().map(|c| spaces::string_name(&c.string)).collect())
            .collect();
    for (n, l) in levels.iter().enumerate() {
        let _ = writeln!(text, "R{n}: {}", l.join(" "));
    }
    let mut out = json!({
        "tree": e.tree.to_string(),
        "family": e.family.to_string(),
        "r_sequence": levels,
    });
    let mut code = 0;
    if verify {
        let limit = hausdorff::limit_partition(&m)?;
        let leaves = g.space().leaves();
        let agree = leaves
            .iter()
            .filter(|&p| limit.value(p) == e.partition.value(p))
            .count();
        let all_points = limit.same_values(&e.partition);
        let _ = writeln!(text, "limit-match: {agree}/{}", leaves.len());
        out["limit_match"] = json!({ "agree": agree, "leaves": leaves.len(), "all_points": all_points });
        if agree != leaves.len() || !all_points {
            code = 1;
        }
    }
    Ok(Report { json: out, text, code })
}

// ---- selftest -------------------------------------------------------------

fn selftest(ctx: &Ctx) -> Result<Report, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let checks: Vec<(&str, Result<(), String>)> = vec![
        ("h-preorder is a preorder on small trees", check_preorder()),
        ("reduction keeps what a family determines", check_reduction(&mut rng)),
        ("category image lies inside the image", check_category()),
        ("preservation on a chain collapse", check_preservation_example(ctx)),
        ("extraction matches the limit", check_extraction(&mut rng)),
    ];
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut failed = 0;
    for (name, r) in &checks {
        match r {
            Ok(()) => {
                let _ = writeln!(text, "ok   {name}");
            }
            Err(msg) => {
                failed += 1;
                let _ = writeln!(text, "FAIL {name}: {msg}");
            }
        }
        rows.push(json!({ "check": name, "ok": r.is_ok(), "detail": r.as_ref().err() }));
    }
    Ok(Report {
        json: json!({ "checks": rows, "failed": failed }),
        text,
        code: i32::from(failed > 0),
    })
}

fn check_preorder() -> Result<(), String> {
    let ts = trees::enumerate_trees(2, 1, 3).map_err(|e| e.to_string())?;
    let mut cmp = HComparator::new();
    let n = ts.len();
    let leq: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| cmp.leq(&ts[i], &ts[j])).collect())
        .collect();
    for i in 0..n {
        if !leq[i][i] {
            return Err(format!("{} is not below itself", ts[i]));
        }
        for j in 0..n {
            for k in 0..n {
                if leq[i][j] && leq[j][k] && !leq[i][k] {
                    return Err(format!("transitivity fails for {}, {}, {}", ts[i], ts[j], ts[k]));
                }
            }
        }
    }
    Ok(())
}

fn check_reduction(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let x = Arc::new(SpaceModel::cylinder(2, 2).map_err(|e| e.to_string())?);
    let opens = spaces::open_sets(&x);
    let shapes = trees::enumerate_trees(3, 1, 3).map_err(|e| e.to_string())?;
    for _ in 0..50 {
        let t = &shapes[rng.gen_range(0..shapes.len())];
        let sets = t
            .addresses()
            .into_iter()
            .filter(|a| !a.is_empty())
            .map(|a| (a, opens[rng.gen_range(0..opens.len())]));
        let f = TFamily::from_layer0(x.clone(), t.clone(), 3, sets)
            .map_err(|e| e.to_string())?
            .monotonize();
        let r = f.reduce_family().map_err(|e| e.to_string())?;
        if !r.is_reduced() {
            return Err(format!("reduct of a {t}-family is not reduced"));
        }
        let Ok(b) = r.determine() else {
            return Err(format!("reduct of a {t}-family determines nothing"));
        };
        if let Ok(a) = f.determine() {
            if a != b {
                return Err(format!("reduct of a {t}-family changed the partition"));
            }
        }
    }
    Ok(())
}

fn check_category() -> Result<(), String> {
    let x = Arc::new(SpaceModel::linear(3));
    let y = Arc::new(SpaceModel::sierpinski());
    let f = SpaceMap::new(x, y, vec![0, 1, 1]).map_err(|e| e.to_string())?;
    let r = category::check_baire(&f, 0, Sampling::Exhaustive).map_err(|e| e.to_string())?;
    if r.passed() {
        Ok(())
    } else {
        Err(r.violations.join("; "))
    }
}

fn check_preservation_example(ctx: &Ctx) -> Result<(), String> {
    let x = Arc::new(SpaceModel::linear(3));
    let y = Arc::new(SpaceModel::sierpinski());
    let f = SpaceMap::new(x, y.clone(), vec![0, 1, 1]).map_err(|e| e.to_string())?;
    let a = KPartition::new(y, 2, vec![0, 1]).map_err(|e| e.to_string())?;
    for t in [IterTree::base(0), IterTree::chain(&[0, 1]), IterTree::chain(&[1, 0])] {
        let r = category::check_preservation(&f, &a, &t, ctx.budget_search).map_err(|e| e.to_string())?;
        if !r.holds() {
            return Err(format!("fails for {t}"));
        }
    }
    Ok(())
}

fn check_extraction(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..10 {
        let g = hausdorff::GuessTable::random(3, 2, 4, rng).map_err(|e| e.to_string())?;
        let m = g.machine();
        let e = hausdorff::hausdorff_extract(&m).map_err(|e| e.to_string())?;
        let limit = hausdorff::limit_partition(&m).map_err(|e| e.to_string())?;
        if !limit.same_values(&e.partition) {
            return Err(format!("mismatch on table\n{g}"));
        }
    }
    Ok(())
}
