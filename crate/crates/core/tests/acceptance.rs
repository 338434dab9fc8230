//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so the
//! lines are always visible; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use esspath_core::a2;
use esspath_core::algebra::{check_gram_condition, check_multiply_back, TruncatedPaths};
use esspath_core::checks::{self, VerifyOptions};
use esspath_core::endo::{EndAlgebra, Product};
use esspath_core::graph::{builtin, fused_matrices, perron_frobenius};
use esspath_core::report::CheckReport;
use esspath_core::{EssentialSpace, SpaceOptions};

const GRAPHS: [&str; 5] = ["A2", "A3", "A4", "D4", "E6"];

fn space(name: &str) -> EssentialSpace {
    EssentialSpace::from_graph(builtin(name).unwrap(), SpaceOptions::default()).unwrap()
}

fn algebra(name: &str) -> EndAlgebra {
    EndAlgebra::new(space(name))
}

fn failures(reports: &[CheckReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} (residual {:e}, tolerance {:e})", r.name, r.residual, r.tolerance))
        .collect()
}

fn verdict(prefix: &str, reports: &[CheckReport]) -> Result<String, String> {
    let f = failures(reports);
    let worst = reports
        .iter()
        .filter(|r| r.tolerance.is_finite() && r.tolerance > 0.0 && r.residual <= r.tolerance)
        .map(|r| r.residual.abs())
        .fold(0.0, f64::max);
    if f.is_empty() {
        Ok(format!("{prefix}: {} checks, worst residual {worst:e}", reports.len()))
    } else {
        Err(format!("{prefix}: {}", f.join("; ")))
    }
}

fn c1() -> Result<String, String> {
    let expected = [6usize, 10, 14, 18, 20, 20, 20, 18, 14, 10, 6];
    let start = Instant::now();
    let s = space("E6");
    let elapsed = start.elapsed();
    let kernel = s.dims();
    let f = fused_matrices(s.graph(), s.perron()).map_err(|e| e.to_string())?;
    let fused: Vec<usize> = f.sums().iter().map(|&x| x as usize).collect();
    let total: usize = kernel.iter().sum();
    if kernel != expected || fused != expected || total != 156 {
        return Err(format!("kernel {kernel:?}, fused {fused:?}, total {total}"));
    }
    if elapsed >= Duration::from_secs(10) {
        return Err(format!("dims correct but took {elapsed:?}"));
    }
    Ok(format!("dims {kernel:?}, total {total}, {elapsed:.2?}"))
}

fn c2() -> Result<String, String> {
    let mut got = Vec::new();
    for (name, want) in [("A2", 8usize), ("A3", 34), ("E6", 2512)] {
        let s = space(name);
        let d: usize = s.dims().iter().map(|d| d * d).sum();
        got.push(format!("{name} {d}"));
        if d != want {
            return Err(format!("{name}: {d} != {want}"));
        }
    }
    Ok(got.join(", "))
}

fn c3() -> Result<String, String> {
    let g = builtin("E6").unwrap();
    let pf = perron_frobenius(&g, 1e-12).map_err(|e| e.to_string())?;
    let ratio = pf.mu[3] / pf.mu[1];
    let err = (ratio - (3f64.sqrt() - 1.0)).abs();
    if err <= 1e-9 {
        Ok(format!("mu3/mu1 = {ratio}, error {err:e}"))
    } else {
        Err(format!("mu3/mu1 = {ratio}, error {err:e}"))
    }
}

fn c4() -> Result<String, String> {
    let opts = VerifyOptions { samples: 200, ..VerifyOptions::default() };
    let reports: Vec<CheckReport> = GRAPHS
        .iter()
        .map(|g| {
            let mut r = checks::check_projector_identity(&space(g), &opts);
            r.name = format!("{g}: {}", r.name);
            r
        })
        .collect();
    verdict("200 pairs per graph", &reports)
}

fn c5() -> Result<String, String> {
    let opts = VerifyOptions { decomposition_max_length: Some(6), ..VerifyOptions::default() };
    verdict("E6, L <= 6, every split", &checks::check_decomposition(&space("E6"), &opts))
}

fn c6() -> Result<String, String> {
    let opts = VerifyOptions::default();
    let mut reports = Vec::new();
    for g in GRAPHS {
        let alg = algebra(g);
        for mut r in [
            check_gram_condition(alg.space(), 1e-8),
            checks::check_homomorphism(&alg, false, Product::Bullet, &opts),
        ] {
            r.name = format!("{g}: {}", r.name);
            reports.push(r);
        }
    }
    verdict("Gram and 100 homomorphism pairs per graph", &reports)
}

fn c7() -> Result<String, String> {
    let opts = VerifyOptions::default();
    let mut reports = Vec::new();
    for g in ["A2", "E6"] {
        let alg = algebra(g);
        let mut rs = checks::check_comonoidality(&alg, &opts);
        rs.push(checks::check_unit_not_grouplike(&alg));
        for mut r in rs {
            r.name = format!("{g}: {}", r.name);
            reports.push(r);
        }
    }
    verdict("A2 and E6", &reports)
}

fn c8() -> Result<String, String> {
    let opts = VerifyOptions::default();
    let mut parts = Vec::new();
    for (g, floor) in [("A2", 1.0), ("A3", 0.5), ("D4", 0.5)] {
        let r = checks::antipode_infeasibility(&algebra(g), 1, &opts).map_err(|e| e.to_string())?;
        let ok = if g == "A2" { r.residual >= floor } else { r.residual > floor };
        parts.push(format!("{g} {:.6}", r.residual));
        if !ok {
            return Err(format!("{g}: residual {} below {floor}", r.residual));
        }
    }
    Ok(parts.join(", "))
}

fn c9() -> Result<String, String> {
    let reports = a2::all_checks(1e-12).map_err(|e| e.to_string())?;
    verdict("A2 tables, Grassmann and matrix units", &reports)
}

fn c10() -> Result<String, String> {
    let opts = VerifyOptions::default();
    let mut reports = Vec::new();
    for g in GRAPHS {
        for mut r in checks::check_star_suite(&algebra(g), &opts) {
            r.name = format!("{g}: {}", r.name);
            reports.push(r);
        }
    }
    verdict("100 pairs per graph", &reports)
}

fn c11() -> Result<String, String> {
    let t = TruncatedPaths::new(&builtin("A3").unwrap(), 4);
    let reports = [check_gram_condition(&t, 0.0), check_multiply_back(&t, 0.0)];
    verdict("A3, length <= 4, exact", &reports)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<String, String>); 11] = [
        ("E6 graded dimensions", c1),
        ("endomorphism algebra dimensions", c2),
        ("E6 Perron-Frobenius ratio", c3),
        ("projector identity", c4),
        ("decomposition of essential paths", c5),
        ("weak bialgebra condition", c6),
        ("comonoidality", c7),
        ("antipode obstruction", c8),
        ("A2 goldens", c9),
        ("star suite", c10),
        ("truncated path algebra", c11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("PASS {:>2} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
