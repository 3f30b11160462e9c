//! Printed expressions and series parse back to themselves.

use std::path::Path;

use jetcalc::kawahara::{catalog, gke, GKESpec};
use jetcalc::psd::frechet_hat;
use jetcalc::symmetry::formal_symmetry_scan;
use jetcalc::{FunctionSpec, JetExpr};
use jetcalc_cli::{parse_equation_file, parse_expr, parse_series};

#[test]
fn catalog_expressions() {
    for (label, e) in catalog().expressions() {
        let text = e.to_string();
        let back = parse_expr(&text).unwrap_or_else(|err| panic!("{label}: {text}: {err}"));
        assert_eq!(back, e, "{label}");
    }
}

#[test]
fn scan_transcripts() {
    for f in [FunctionSpec::Abstract, FunctionSpec::power(2), FunctionSpec::power(3)] {
        let scan = formal_symmetry_scan(&gke(&GKESpec::new(f)).unwrap(), 13).unwrap();
        for step in &scan.steps {
            for e in step.constraints.iter().chain(&step.solved) {
                assert_eq!(parse_expr(&e.to_string()).unwrap(), *e);
            }
        }
    }
}

#[test]
fn series() {
    let symbol = frechet_hat(gke(&GKESpec::new(FunctionSpec::Abstract)).unwrap().rhs());
    assert_eq!(parse_series(&symbol.to_string(), 8).unwrap(), symbol);
    let root = symbol.nth_root_prec(5, 6).unwrap();
    assert_eq!(parse_series(&root.to_string(), 6).unwrap(), root);
}

#[test]
fn equivalent_spellings() {
    let want = parse_expr("u_xxx").unwrap();
    for s in ["u_3x", "u_{3x}", "u_{3}x", "u_{xxx}"] {
        assert_eq!(parse_expr(s).unwrap(), want, "{s}");
    }
    assert_eq!(parse_expr("f^(2)(u)").unwrap(), JetExpr::fn_sym("f", 2));
    assert_eq!(parse_expr("r(u)").unwrap(), JetExpr::fn_sym("f", -1));
}

#[test]
fn shipped_equation_files() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../equations");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let file = parse_equation_file(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(parse_expr(&file.equation.rhs().to_string()).unwrap(), *file.equation.rhs());
        seen += 1;
    }
    assert_eq!(seen, 6);
}
