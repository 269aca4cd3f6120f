// One pass/fail line per acceptance criterion. Runs without the libtest
// harness so every criterion reports even when an earlier one fails.

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctxupb::contextuality::{strength, theta_cycle, theta_cycle_complement, theta_paley, TABLE2_ORDERS};
use ctxupb::entanglement::{
    lee_upper_bound, one_param_bound_entangled_state, table1, table1_thetas, LeeOptions, TABLE1_LABELS,
    TABLE1_LEE_REF, TABLE1_STRENGTH_REF,
};
use ctxupb::families::*;
use ctxupb::graphs::{complement, cycle, independence_number, is_cycle, paley, Graph};
use ctxupb::linalg::{kron, partial_transpose, C64, ComplexMatrix, ComplexVector, Tolerances};
use ctxupb::upb::*;
use ctxupb::Error;

#[path = "support/product_oracle.rs"]
mod product_oracle;

type Outcome = Result<String, String>;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn check(cond: bool, msg: impl Into<String>, fails: &mut Vec<String>) {
    if !cond {
        fails.push(msg.into());
    }
}

fn verdict(fails: Vec<String>, ok: String) -> Outcome {
    if fails.is_empty() {
        Ok(ok)
    } else {
        Err(fails.join("; "))
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str, fails: &mut Vec<String>) {
    check(elapsed < limit, format!("{what} took {elapsed:.2?} (limit {limit:?})"), fails);
}

fn criterion1() -> Outcome {
    let mut fails = Vec::new();
    let start = Instant::now();
    let first: Vec<f64> = table1_thetas()
        .iter()
        .map(|&t| strength(&one_param_family(t).unwrap().vectors).unwrap().value)
        .collect();
    within(start.elapsed(), Duration::from_secs(1), "strength column", &mut fails);
    let second: Vec<f64> = table1_thetas()
        .iter()
        .map(|&t| strength(&one_param_family(t).unwrap().vectors).unwrap().value)
        .collect();
    check(
        first.iter().zip(&second).all(|(a, b)| a.to_bits() == b.to_bits()),
        "not bitwise deterministic",
        &mut fails,
    );
    for ((label, got), want) in TABLE1_LABELS.iter().zip(&first).zip(TABLE1_STRENGTH_REF) {
        check((got - want).abs() <= 1e-3, format!("{label}: {got:.6} vs {want}"), &mut fails);
    }
    verdict(fails, format!("{first:.5?}"))
}

fn criterion2() -> Outcome {
    let mut fails = Vec::new();
    let start = Instant::now();
    let rows = table1(&LeeOptions::default()).map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(300), "LEE column", &mut fails);
    for (row, want) in rows.iter().zip(TABLE1_LEE_REF) {
        check(
            row.lee <= want + 1e-3,
            format!("{}: {:.7} exceeds {want} + 1e-3", row.label, row.lee),
            &mut fails,
        );
        check(
            (row.lee - want).abs() <= 5e-3,
            format!("{}: |{:.7} - {want}| = {:.5} > 5e-3", row.label, row.lee, (row.lee - want).abs()),
            &mut fails,
        );
    }
    check(
        rows.windows(2).all(|w| w[0].lee > w[1].lee),
        "ordering is not strictly decreasing",
        &mut fails,
    );
    let values: Vec<f64> = rows.iter().map(|r| r.lee).collect();
    verdict(fails, format!("{values:.7?}"))
}

fn criterion3() -> Outcome {
    let mut fails = Vec::new();
    let start = Instant::now();
    let thetas = [5f64.sqrt(), 3.0, 13f64.sqrt(), 17f64.sqrt(), 5.0, 29f64.sqrt()];
    let alphas = [2usize, 3, 3, 3, 5, 4];
    let mut got = Vec::new();
    for ((q, theta), alpha) in TABLE2_ORDERS.iter().zip(thetas).zip(alphas) {
        let t = theta_paley(*q).map_err(|e| e.to_string())?.value;
        let a = independence_number(&paley(*q).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        check((t - theta).abs() <= 1e-9, format!("theta(P_{q}) = {t}"), &mut fails);
        check(a == alpha, format!("alpha(P_{q}) = {a}, expected {alpha}"), &mut fails);
        got.push(a);
    }
    within(start.elapsed(), Duration::from_secs(30), "table 2", &mut fails);
    verdict(fails, format!("alpha {got:?}"))
}

/// Builds the sets named in criterion 4 with the method each must pass.
fn criterion4_sets() -> Vec<(&'static str, Result<ProductSet, Error>, VerifyMethod)> {
    vec![
        ("pyramid", pyramid_upb(), VerifyMethod::Exact),
        ("tiles-rep", one_param_upb(TILES_THETA), VerifyMethod::Exact),
        ("quadres(5)", quadres_upb(5), VerifyMethod::Exact),
        ("quadres(13)", quadres_upb(13), VerifyMethod::Exact),
        ("gencontextual(5)", gencontextual_upb(5), VerifyMethod::Exact),
        ("gencontextual(7)", gencontextual_upb(7), VerifyMethod::Exact),
        ("gencontextual(9)", gencontextual_upb(9), VerifyMethod::Exact),
        ("genpyramid(2,2)", genpyramid_upb(2, 2), VerifyMethod::Exact),
        ("genpyramid(4,3) p=9", genpyramid_upb(4, 3), VerifyMethod::Exact),
        ("gencontextual(11)", gencontextual_upb(11), VerifyMethod::Bound),
        ("gencontextual(13)", gencontextual_upb(13), VerifyMethod::Bound),
        ("genpyramid(12,10) p=25", genpyramid_upb(12, 10), VerifyMethod::Bound),
    ]
}

fn criterion4(verified: &mut Vec<(&'static str, ProductSet, UpbVerdict)>) -> Outcome {
    let mut fails = Vec::new();
    let mut passed = 0;
    for (label, ps, method) in criterion4_sets() {
        let start = Instant::now();
        let ps = match ps {
            Ok(ps) => ps,
            Err(e) => {
                fails.push(format!("{label}: construction failed: {e}"));
                continue;
            }
        };
        match verify_upb(&ps, &tol(), method) {
            Ok(v) if v.is_upb() => {
                passed += 1;
                verified.push((label, ps, v));
            }
            Ok(v) => fails.push(format!("{label}: {:?}", v.status)),
            Err(e) => fails.push(format!("{label}: {} ({e})", e.name())),
        }
        within(start.elapsed(), Duration::from_secs(60), label, &mut fails);
    }
    // p = 15 must come back as a non-UPB with the failing condition named.
    let start = Instant::now();
    let p15 = genpyramid_upb(7, 6).map_err(|e| e.to_string())?;
    let named = match verify_upb(&p15, &tol(), VerifyMethod::Auto) {
        Err(Error::NotOrthogonalSet(i, j)) => format!("NotOrthogonalSet({i},{j})"),
        Ok(v) if !v.is_upb() => format!("{:?}", v.status),
        Ok(v) => {
            fails.push(format!("p=15: unexpectedly {:?}", v.status));
            String::new()
        }
        Err(e) => {
            fails.push(format!("p=15: {} does not name a condition", e.name()));
            String::new()
        }
    };
    within(start.elapsed(), Duration::from_secs(60), "p=15", &mut fails);
    verdict(fails, format!("{passed} certified; p=15 {named}"))
}

fn criterion5(verified: &[(&'static str, ProductSet, UpbVerdict)]) -> Outcome {
    let mut fails = Vec::new();
    for (label, ps, v) in verified {
        let rho = match bound_entangled_state(ps, v) {
            Ok(rho) => rho,
            Err(e) => {
                fails.push(format!("{label}: {e}"));
                continue;
            }
        };
        let eig = rho.eigenvalues().unwrap();
        check(eig[0] >= -1e-9, format!("{label}: min eigenvalue {}", eig[0]), &mut fails);
        check((rho.trace() - C64::new(1.0, 0.0)).norm() <= 1e-12, format!("{label}: trace"), &mut fails);
        let rank = rho.rank(&tol()).unwrap();
        check(rank == ps.total_dim() - ps.k(), format!("{label}: rank {rank}"), &mut fails);
        for party in 0..ps.parties() {
            let m = min_pt_eigenvalue(&rho, party).unwrap();
            check(m >= -1e-9, format!("{label}: PT on party {party} has {m}"), &mut fails);
        }
        let worst = (0..ps.k())
            .map(|j| rho.expectation(&ps.state_vector(j)).abs())
            .fold(0.0, f64::max);
        check(worst <= 1e-12, format!("{label}: member overlap {worst:e}"), &mut fails);
    }
    verdict(fails, format!("{} states", verified.len()))
}

fn criterion6() -> Outcome {
    let mut fails = Vec::new();
    let pyr = pyramid_upb().map_err(|e| e.to_string())?;
    let others = [
        ("tiles-rep", one_param_upb(TILES_THETA)),
        ("quadres(5)", quadres_upb(5)),
        ("gencontextual(5)", gencontextual_upb(5)),
    ];
    for (label, ps) in &others {
        let ps = ps.as_ref().map_err(|e| e.to_string())?;
        match upb_graph_equivalent(&pyr, ps, &tol()) {
            Ok(Some(_)) => {}
            Ok(None) => fails.push(format!("pyramid ~ {label}: no permutation")),
            Err(e) => fails.push(format!("pyramid ~ {label}: {e}")),
        }
    }
    // Minimal bipartite UPBs whose first party is a qutrit.
    let mut suite = vec![("pyramid", pyr.clone())];
    for (label, ps) in others {
        suite.push((label, ps.unwrap()));
    }
    for n in [7, 9, 11, 13] {
        suite.push(("gencontextual", gencontextual_upb(n).unwrap()));
    }
    for (label, ps) in &suite {
        check(is_minimal(ps), format!("{label} is not minimal"), &mut fails);
        let (graphs, _) = party_graphs(ps, &tol()).unwrap();
        check(is_cycle(&graphs[0]), format!("{label}: party-1 graph is not a cycle"), &mut fails);
    }
    verdict(fails, format!("3 equivalences, {} cycles", suite.len()))
}

fn criterion7() -> Outcome {
    let mut fails = Vec::new();
    for n in [5u64, 7, 9, 11] {
        let c = cycle(n as usize).unwrap();
        let cases = [
            ("genkcbs", gen_kcbs(n), c.clone(), theta_cycle(n)),
            ("loor-complement", loor_cycle_complement(n), complement(&c), theta_cycle_complement(n)),
        ];
        for (label, fam, graph, theta) in cases {
            let (fam, theta) = (fam.map_err(|e| e.to_string())?, theta.map_err(|e| e.to_string())?);
            let r = verify_loor(&fam, &graph, theta.value).map_err(|e| e.to_string())?;
            check(r.certified, format!("{label}({n}): {r:?}"), &mut fails);
            check(r.theta_gap <= 1e-6, format!("{label}({n}) gap {:e}", r.theta_gap), &mut fails);
        }
    }
    for p in [5u64, 13, 17] {
        let s = strength(&quadres_local(p).unwrap().vectors).unwrap().value;
        let gap = (s - (p as f64).sqrt()).abs();
        check(gap <= 1e-9, format!("quadres({p}) strength gap {gap:e}"), &mut fails);
    }
    verdict(fails, "8 certificates, 3 quadres strengths".into())
}

fn criterion8() -> Outcome {
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(20240817);
    let mut sets = Vec::new();
    for i in 0..200 {
        let d = if i % 2 == 0 { 2 } else { 3 };
        sets.push(product_oracle::random_orthogonal_set(&mut rng, d, 6));
    }
    for base in [pyramid_upb().unwrap(), one_param_upb(TILES_THETA).unwrap()] {
        for _ in 0..3 {
            let s = product_oracle::scramble(&base, &mut rng);
            sets.push(s.without(rng.random_range(0..s.k())).unwrap());
            sets.push(s);
        }
    }
    let (mut extendible, mut closed) = (0, 0);
    for (i, ps) in sets.iter().enumerate() {
        let v = match verify_upb_exact(ps, &tol()) {
            Ok(v) => v,
            Err(e) => {
                fails.push(format!("set {i}: {e}"));
                continue;
            }
        };
        let oracle = product_oracle::brute_witness(ps, &mut rng);
        let ext = v.status == UpbStatus::Extendible;
        if ext != oracle.is_some() {
            fails.push(format!("set {i} (k = {}, d = {:?}): verifier {:?}", ps.k(), ps.party_dims(), v.status));
        }
        if let Some(w) = &v.witness {
            check(max_overlap_with(ps, w) <= 1e-9, format!("set {i}: bad witness"), &mut fails);
        }
        if ext {
            extendible += 1;
        } else {
            closed += 1;
        }
    }
    verdict(fails, format!("{} sets, {extendible} extendible, {closed} not, 0 disagreements", sets.len()))
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn random_graph(seed: u64, n: usize, density: f64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

fn report<T: std::fmt::Debug>(name: &str, r: Result<(), TestError<T>>, fails: &mut Vec<String>) {
    if let Err(e) = r {
        fails.push(format!("{name}: {e}"));
    }
}

fn criterion9() -> Outcome {
    let mut fails = Vec::new();

    let r = runner(256).run(&(any::<u64>(), 0usize..20, 0.0f64..1.0), |(seed, n, d)| {
        let g = random_graph(seed, n, d);
        prop_assert_eq!(complement(&complement(&g)), g);
        Ok(())
    });
    report("complement involution", r, &mut fails);

    let r = runner(64).run(&any::<u64>(), |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = product_oracle::random_unitary(&mut rng, 3);
        let mut moved: Vec<ComplexVector> = kcbs().unwrap().vectors.iter().map(|v| &u * v).collect();
        for i in (1..moved.len()).rev() {
            moved.swap(i, rng.random_range(0..=i));
        }
        let perm = gram_moduli_equivalence(&moved, &pyramid().unwrap().vectors, 1e-9);
        prop_assert!(perm.is_some());
        Ok(())
    });
    report("Gram-moduli KCBS ~ Pyramid", r, &mut fails);

    let r = runner(128).run(&(any::<u64>(), 1usize..9, 1usize..6), |(seed, count, dim)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs: Vec<ComplexVector> = (0..count)
            .map(|_| {
                let v = ComplexVector::from_fn(dim, |_, _| product_oracle::gaussian(&mut rng));
                let n = v.norm();
                v / C64::new(n, 0.0)
            })
            .collect();
        let u = product_oracle::random_unitary(&mut rng, dim);
        let moved: Vec<ComplexVector> = vs.iter().map(|v| &u * v).collect();
        let (a, b) = (strength(&vs).unwrap().value, strength(&moved).unwrap().value);
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        Ok(())
    });
    report("strength unitary invariance", r, &mut fails);

    let r = runner(128).run(&(any::<u64>(), 1usize..4, 1usize..4, 0usize..2), |(seed, da, db, party)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = da * db;
        let a = ComplexMatrix::from_fn(d, d, |_, _| product_oracle::gaussian(&mut rng));
        let rho = &a * a.adjoint();
        let dims = [da, db];
        let twice = partial_transpose(&partial_transpose(&rho, &dims, party).unwrap(), &dims, party).unwrap();
        prop_assert_eq!(twice, rho.clone());
        let once = partial_transpose(&rho, &dims, party).unwrap();
        // transposing the other party as well gives the full transpose
        let both = partial_transpose(&once, &dims, 1 - party).unwrap();
        prop_assert_eq!(both, rho.transpose());
        Ok(())
    });
    report("partial-transpose involution", r, &mut fails);

    // Sanity of the product helper used above.
    let k = kron(&ComplexMatrix::identity(2, 2), &ComplexMatrix::identity(3, 3));
    check(k == ComplexMatrix::identity(6, 6), "kron of identities", &mut fails);

    let thetas = table1_thetas();
    let r = runner(6).run(&(0usize..5, 1usize..4), |(row, restarts)| {
        let rho = one_param_bound_entangled_state(thetas[row]).unwrap();
        let fewer = lee_upper_bound(&rho, &LeeOptions { restarts, ..LeeOptions::default() }).unwrap();
        let more = lee_upper_bound(&rho, &LeeOptions { restarts: restarts + 1, ..LeeOptions::default() }).unwrap();
        prop_assert!(more.value <= fewer.value + 1e-15, "{} > {}", more.value, fewer.value);
        Ok(())
    });
    report("LEE monotone in restarts", r, &mut fails);

    verdict(fails, "5 suites".into())
}

fn main() {
    let mut verified = Vec::new();
    let mut failed = 0;
    let mut line = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} ({name}): PASS [{secs:.2}s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL [{secs:.2}s] {detail}");
            }
        }
    };
    line(1, "table 1 strength", &mut criterion1);
    line(2, "table 1 LEE", &mut criterion2);
    line(3, "table 2", &mut criterion3);
    line(4, "UPB verdicts", &mut || criterion4(&mut verified));
    line(5, "bound entanglement", &mut || criterion5(&verified));
    line(6, "equivalence suite", &mut criterion6);
    line(7, "LOOR certificates", &mut criterion7);
    line(8, "oracle equivalence", &mut criterion8);
    line(9, "property suites", &mut criterion9);
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
