//! End-to-end runs of the command-line verbs on the files in `data/`.

use fine_hierarchy::cli::run;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn finehier(args: &[&str]) -> (i32, String) {
    let mut full = vec!["finehier".to_string()];
    full.extend(args.iter().map(|a| {
        if a.contains('.') && !a.starts_with('-') {
            data(a)
        } else {
            a.to_string()
        }
    }));
    run(full)
}

#[test]
fn equal_leaves_are_equivalent() {
    let (code, out) = finehier(&["tree-compare", "leaf0.tree", "leaf0.tree"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("equivalent"));
}

#[test]
fn chain_is_below_its_extension() {
    let (code, out) = finehier(&["--json", "tree-compare", "chain01.tree", "leaf0.tree"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "greater");
    assert!(v["a_leq_b"].is_null());
}

#[test]
fn linearize_ranks_candidates() {
    let (code, out) = finehier(&["tree-linearize", "candidates.trees"]);
    assert_eq!(code, 0);
    assert!(out.contains("rank 2: node(1; node(0; 1))"), "{out}");
}

#[test]
fn extraction_matches_limit_on_all_leaves() {
    let (code, out) = finehier(&["hausdorff-extract", "guess_d6.table", "--verify"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("tree: "));
    assert!(out.contains("family:\n"));
    assert!(out.ends_with("limit-match: 64/64\n"), "{out}");
}

#[test]
fn overlap_on_v_poset_has_no_reduction() {
    let (code, out) = finehier(&["family-reduce", "vposet.space", "vposet_overlap.fam"]);
    assert_eq!(code, 1);
    assert!(out.contains("NoReduction") && out.contains("`a`"), "{out}");
}

#[test]
fn cylinder_family_reduces_and_evaluates() {
    let (code, out) = finehier(&["family-reduce", "cylinder_b2_d3.space", "cylinder_chain.fam"]);
    assert_eq!(code, 0, "{out}");
    let (code, out) = finehier(&[
        "family-eval",
        "cylinder_b2_d3.space",
        "cylinder_chain.fam",
        "--point",
        "10",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "10\t1\te:1\n");
}

#[test]
fn validate_reports_conflicts() {
    let (code, out) = finehier(&["family-validate", "vposet.space", "vposet_overlap.fam"]);
    assert_eq!(code, 0);
    assert!(out.contains("reduced: no"));
    assert!(out.contains("conflict at `a`"));
}

#[test]
fn classify_finds_minimal_trees() {
    let (code, out) = finehier(&[
        "classify",
        "sierpinski.space",
        "sierpinski_indicator.part",
        "candidates.trees",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("minimal: node(0; 1), node(0; 1, 0)"), "{out}");
}

#[test]
fn category_image_drops_meagre_parts() {
    let args = ["category-image", "chain3.space", "sierpinski.space", "collapse.map"];
    let (code, out) = finehier(&[&args[..], &["meagre.set"]].concat());
    assert_eq!(code, 0);
    assert_eq!(out, "f[S] = {}\nf(S) = {top}\n");
    let (_, out) = finehier(&[&args[..], &["upper.set"]].concat());
    assert_eq!(out, "f[S] = {top}\nf(S) = {top}\n");
}

#[test]
fn preservation_holds_on_chain_collapse() {
    let (code, out) = finehier(&[
        "preservation-check",
        "chain3.space",
        "sierpinski.space",
        "collapse.map",
        "sierpinski_indicator.part",
        "chain01.tree",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("holds: yes\n"));
}

#[test]
fn space_load_counts_open_sets() {
    let (code, out) = finehier(&["space-load", "vposet.space"]);
    assert_eq!(code, 0);
    assert!(out.contains("open sets: 5"));
}

#[test]
fn selftest_passes() {
    let (code, out) = finehier(&["selftest", "--seed", "11"]);
    assert_eq!(code, 0, "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn json_output_is_deterministic() {
    let args = [
        "--json",
        "classify",
        "sierpinski.space",
        "sierpinski_indicator.part",
        "candidates.trees",
    ];
    let first = finehier(&args);
    let second = finehier(&args);
    assert_eq!(first, second);
    let v: serde_json::Value = serde_json::from_str(&first.1).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 6);
}

#[test]
fn malformed_input_exits_with_two() {
    let (code, out) = finehier(&["tree-compare", "vposet.space", "leaf0.tree"]);
    assert_eq!(code, 2, "{out}");
    let (code, _) = finehier(&["tree-compare", "missing.tree", "leaf0.tree"]);
    assert_eq!(code, 2);
    let (code, _) = finehier(&["no-such-verb"]);
    assert_eq!(code, 2);
}

#[test]
fn budgets_are_enforced() {
    let (code, out) = finehier(&["--budget-nodes", "1", "tree-compare", "chain01.tree", "leaf0.tree"]);
    assert_eq!(code, 1);
    assert!(out.contains("--budget-nodes"));
    let (code, _) = finehier(&["--budget-depth", "2", "space-load", "cylinder_b2_d3.space"]);
    assert_eq!(code, 1);
}
