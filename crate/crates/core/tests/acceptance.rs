//! Acceptance criteria, one line each. Runs as a plain binary so the lines
//! are always printed; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use htp_lz::cyclotomic::{
    cos_elem, cos_elem_in, eval_poly_at, galois_kernel, rationality_nullspace, vandermonde_rank, CycloElem,
    CycloField,
};
use htp_lz::formula::{self, eval_term, parse, parse_term, print, Assignment, Element, Term};
use htp_lz::growth::{
    circle, estimate_order, eval_log_magnitude_branch, pell_residual, Branch, SolutionSpec,
};
use htp_lz::params::ParamSet;
use htp_lz::pell::{gen_table, group_add, PellPair};
use htp_lz::polyring::{divides_exactly, RatPoly};
use htp_lz::reduction::{
    build_witness, check_witness, compile_htp, formula_phi, phi_witness, yk_polynomial_filter, DiophantineInput,
};
use htp_lz::verify::random_formula;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pair(table: &[PellPair], n: i64) -> PellPair {
    let p = &table[n.unsigned_abs() as usize];
    if n < 0 {
        p.inverse()
    } else {
        p.clone()
    }
}

fn denef() -> Outcome {
    let table = gen_table(200);
    let one = BigRational::from_integer(1.into());
    let d = RatPoly::from_i64s(&[-1, 0, 1]);
    for n in -200i64..=200 {
        let p = pair(&table, n);
        let norm = &(p.x() * p.x()) - &(&d * &(p.y() * p.y()));
        ensure(norm.is_one(), || format!("Pell identity fails at n = {n}"))?;
        ensure(p.x().degree() == n.abs(), || format!("deg x_{n} = {}", p.x().degree()))?;
        ensure(p.y().eval(&one) == BigRational::from_integer(n.into()), || format!("y_{n}(1) != {n}"))?;
    }
    for k in 1..=60usize {
        for n in 1..=60usize {
            let div = divides_exactly(table[k].y(), table[n].y()).map_err(|e| e.to_string())?;
            ensure(div == (n % k == 0), || format!("y_{k} | y_{n} is {div}"))?;
        }
    }
    Ok("|n| <= 200 exact; divisibility law for 1 <= k', n' <= 60".into())
}

fn group() -> Outcome {
    let table = gen_table(100);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let (m, n) = (rng.gen_range(-50i64..=50), rng.gen_range(-50i64..=50));
        ensure(group_add(&pair(&table, m), &pair(&table, n)) == pair(&table, m + n), || {
            format!("gen({m}) + gen({n}) != gen({})", m + n)
        })?;
    }
    let id = PellPair::identity();
    for _ in 0..100 {
        let mut pick = || {
            let p = pair(&table, rng.gen_range(-30i64..=30));
            if rng.gen_bool(0.5) {
                p.negate()
            } else {
                p
            }
        };
        let (a, b, c) = (pick(), pick(), pick());
        ensure(group_add(&group_add(&a, &b), &c) == group_add(&a, &group_add(&b, &c)), || {
            "associativity".into()
        })?;
        ensure(group_add(&a, &b) == group_add(&b, &a), || "commutativity".into())?;
        ensure(group_add(&a, &id) == a, || "identity".into())?;
        ensure(group_add(&a, &a.inverse()) == id, || "inverse".into())?;
    }
    Ok("500 random pairs; axioms on 100 triples".into())
}

fn chebyshev() -> Outcome {
    let table = gen_table(20);
    let half = BigRational::new(1.into(), 2.into());
    for k in 3..=30u64 {
        let field = CycloField::new(k);
        let zeta = CycloElem::zeta_pow(&field, 1);
        let zinv = CycloElem::zeta_pow(&field, -1);
        let c = zeta.add(&zinv).unwrap().scale(&half);
        let diff = zeta.sub(&zinv).unwrap();
        for n in 1..=20i64 {
            let (zn, zmn) = (CycloElem::zeta_pow(&field, n), CycloElem::zeta_pow(&field, -n));
            let p = &table[n as usize];
            let cos_ok = eval_poly_at(p.x(), &c) == zn.add(&zmn).unwrap().scale(&half);
            let sin_ok = diff.mul(&eval_poly_at(p.y(), &c)).unwrap() == zn.sub(&zmn).unwrap();
            ensure(cos_ok && sin_ok, || format!("k = {k}, n = {n}"))?;
        }
    }
    Ok("3 <= k <= 30, 1 <= n <= 20, both identities exact".into())
}

fn rationality() -> Outcome {
    for (k, m) in [(35, 2), (77, 4)] {
        let r = rationality_nullspace(k, m).map_err(|e| e.to_string())?;
        ensure(r.dimension == 1 && r.basis == vec![RatPoly::one()], || {
            format!("k = {k}, m = {m}: dimension {}", r.dimension)
        })?;
    }
    let ranks = (vandermonde_rank(7, 2), vandermonde_rank(11, 4));
    ensure(ranks == (Ok(3), Ok(5)), || format!("ranks {ranks:?}"))?;
    let kernels = (galois_kernel(5, 7).map(|k| k.len()), galois_kernel(7, 11).map(|k| k.len()));
    ensure(kernels == (Ok(4), Ok(6)), || format!("kernel sizes {kernels:?}"))?;
    Ok("dimension 1 (constants) at k = 35, 77; ranks 3, 5; kernels 4, 6".into())
}

fn vanishing() -> Outcome {
    let y35 = gen_table(35)[35].y().clone();
    for a in 1..=34 {
        let c = cos_elem(35, a).map_err(|e| e.to_string())?;
        ensure(eval_poly_at(&y35, &c).is_zero(), || format!("a = {a}"))?;
    }
    // and not at a = 0, where y_35(1) = 35
    let field = CycloField::new(35);
    ensure(!eval_poly_at(&y35, &cos_elem_in(&field, 0)).is_zero(), || "a = 0".into())?;
    Ok("y_35(cos(2*pi*a/35)) = 0 for a = 1..34".into())
}

fn yk_filter() -> Outcome {
    let r = yk_polynomial_filter(&ParamSet::rho_zero(), 200);
    ensure(r.pass, || r.discrepancies.join("; "))?;
    let expected: Vec<(i64, i8)> = (-200i64..=200)
        .filter(|n| n % 35 == 0)
        .flat_map(|n| [(n, 1), (n, -1)])
        .collect();
    ensure(r.accepted == expected, || format!("accepted {:?}", r.accepted))?;
    Ok(format!("{} of {} candidates accepted, exactly the multiples of 35", r.accepted.len(), r.candidates))
}

fn reduction() -> Outcome {
    let params = ParamSet::rho_zero();
    for (src, sol) in [("n - 3", vec![3i64]), ("n1^2 + n2^2 - n3^2", vec![3, 4, 5])] {
        let input = DiophantineInput::parse(src).map_err(|e| e.to_string())?;
        let sol: Vec<BigInt> = sol.into_iter().map(BigInt::from).collect();
        let f = compile_htp(&input, &params);
        ensure(formula::audit_sentence(&f).is_empty(), || format!("{src}: audit"))?;
        let w = build_witness(&input, &sol, &params).map_err(|e| e.to_string())?;
        ensure(check_witness(&f, &w.assignment) == Ok(true), || format!("{src}: rejected"))?;
        for name in w.assignment.keys() {
            let mut bad = w.assignment.clone();
            let v = bad[name].plus_one();
            bad.insert(name.clone(), v);
            ensure(check_witness(&f, &bad) == Ok(false), || format!("{src}: corrupted {name} accepted"))?;
        }
    }
    Ok("both sentences accepted; every single-entry corruption rejected".into())
}

fn phi() -> Outcome {
    let params = ParamSet::rho_zero();
    let f = formula_phi(&params, "t");
    let mut built = 0;
    for c in -105i64..=105 {
        let w = phi_witness(&params, "t", &BigRational::from_integer(c.into()));
        ensure(w.is_ok() == (c % 35 == 0), || format!("c = {c}"))?;
        if let Ok(w) = w {
            ensure(check_witness(&f, &w.assignment) == Ok(true), || format!("c = {c}: witness rejected"))?;
            built += 1;
        }
    }
    Ok(format!("{built} witnesses, exactly at the multiples of 35"))
}

fn growth() -> Outcome {
    let mut shown = Vec::new();
    for (n, h, want) in [(1i64, vec![1i64], 1.0), (0, vec![0, 1], 2.0), (2, vec![0, 0, 1], 3.0)] {
        let spec = SolutionSpec::new(n, RatPoly::from_i64s(&h));
        let e = estimate_order(&spec, 10.0, 1e4, 12).map_err(|e| e.to_string())?;
        ensure((e.rho_hat - want).abs() <= 0.25, || format!("{spec}: rho_hat {}", e.rho_hat))?;
        shown.push(format!("{:.3}", e.rho_hat));
    }
    let mut worst: f64 = 0.0;
    for n in -2..=4 {
        for h in [vec![], vec![1], vec![0, 1], vec![2, -1, 1]] {
            let spec = SolutionSpec::new(n, RatPoly::from_i64s(&h));
            worst = worst.max(pell_residual(&spec, &circle(3.0, 64)).map_err(|e| e.to_string())?);
            for z in circle(25.0, 24).into_iter().chain([Complex64::new(3.0, 0.0)]) {
                let a = eval_log_magnitude_branch(&spec, z, Branch::Principal).map_err(|e| e.to_string())?;
                let b = eval_log_magnitude_branch(&spec, z, Branch::Negated).map_err(|e| e.to_string())?;
                let same = |u: f64, v: f64| u == v || (u - v).abs() <= 1e-10 * u.abs().max(1.0);
                ensure(same(a.0, b.0) && same(a.1, b.1), || format!("{spec}: branch at {z}"))?;
            }
        }
    }
    ensure(worst < 1e-6, || format!("residual {worst:e}"))?;
    Ok(format!("rho_hat {}; max residual {worst:.1e}", shown.join(", ")))
}

fn parser() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        let f = random_formula(&mut rng, 4);
        let text = print(&f);
        ensure(parse(&text).as_ref() == Ok(&f), || format!("round trip of `{text}`"))?;
    }
    for bad in ["x - 1 = 0", "!(x = 1)", "~(x = y)", "forall x . x = 0", "E a . a = -1"] {
        let msg = parse(bad).map(|_| String::new()).unwrap_or_else(|e| e.to_string());
        ensure(msg.contains("not in the positive existential language"), || format!("`{bad}` accepted"))?;
    }
    for _ in 0..100 {
        let n: u64 = rng.gen_range(0..=1_000_000);
        let t = Term::numeral(&BigUint::from(n));
        let v = eval_term(&t, &Assignment::new()).map_err(|e| e.to_string())?;
        ensure(v == Element::Poly(RatPoly::from_int(n)), || format!("numeral {n}"))?;
        ensure(parse_term(&n.to_string()) == Ok(t), || format!("numeral {n} parse"))?;
    }
    Ok("10000 round trips; 5 rejections; 100 numerals".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("denef", denef),
        ("group", group),
        ("chebyshev", chebyshev),
        ("rationality", rationality),
        ("vanishing", vanishing),
        ("yk-filter", yk_filter),
        ("reduction", reduction),
        ("phi", phi),
        ("growth", growth),
        ("parser", parser),
    ];
    let results: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    let r = f();
                    (r, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (Err("panicked".into()), 0.0)))
            .collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (r, secs))) in criteria.iter().zip(&results).enumerate() {
        match r {
            Ok(d) => println!("criterion {:>2} {name:<12} PASS  {d} ({secs:.1}s)", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} {name:<12} FAIL  {d} ({secs:.1}s)", i + 1)
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
