//! Acceptance checks, one line per criterion. Runs as a plain binary so the
//! output reads as a checklist; exits non-zero if any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resfmb::abelian::{decompose, monomial_fmb};
use resfmb::corpus::{self, random_change_of_basis, random_triangular, triangular_f2_dim3};
use resfmb::env::{EnvAlgebra, EnvElement};
use resfmb::field::{Field, PrimeField};
use resfmb::filtration::{dimension_subalgebras, Analysis};
use resfmb::fmb::{
    decide, height_one_generators, is_fm_basis, quadratic_obstruction, search_fmb, Certificate, SearchBudget,
    SearchOutcome,
};
use resfmb::format::AnyAlgebra;
use resfmb::liealg::{LieElement, RestrictedLieAlgebra};
use resfmb::linalg::{rref, Subspace};
use resfmb::{report, with_algebra};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn analyse<F: Field>(alg: &RestrictedLieAlgebra<F>) -> Analysis<F> {
    Analysis::new(Arc::new(alg.clone())).expect("p-nilpotent")
}

const TWISTED_BASIS: [&str; 8] = ["1", "a", "b", "a*b", "a*b + c", "a*c", "b*c", "a*b*c"];

/// Brute-force test of the defining conditions, using the oracle chain for ω:
/// closure of products, full rank, and `B ∩ ω` spanning `ω`.
fn oracle_is_fm_basis<F: Field>(env: &EnvAlgebra<F>, omega: &Subspace<F>, basis: &[EnvElement<F>]) -> bool {
    let f = env.field();
    let rank = rref(f, env.dim(), basis.iter().map(|b| b.coords.clone()).collect())
        .unwrap()
        .1;
    if rank != env.dim() || basis.len() != env.dim() {
        return false;
    }
    for x in basis {
        for y in basis {
            let xy = env.mul(x, y);
            if !env.is_zero(&xy) && !basis.contains(&xy) {
                return false;
            }
        }
    }
    let inside: Vec<_> = basis
        .iter()
        .filter(|b| omega.contains(&b.coords).unwrap())
        .map(|b| b.coords.clone())
        .collect();
    Subspace::span(f.clone(), env.dim(), inside) == *omega
}

fn criterion_1() -> Outcome {
    let alg = corpus::load_prime("heisenberg_p2").unwrap();
    let a = analyse(&alg);
    let basis: Vec<_> = TWISTED_BASIS
        .iter()
        .map(|s| a.from_input(&a.input_env.parse_element(s).unwrap()))
        .collect();
    ensure(is_fm_basis(&a, &basis).unwrap().is_valid(), "twisted basis rejected")?;

    let omega = a.env.omega_powers_oracle().unwrap()[0].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut invalid, mut valid, mut tries, mut by_product) = (0, 0, 0, 0);
    while invalid < 100 {
        tries += 1;
        ensure(tries < 10_000, "could not draw 100 invalid perturbations")?;
        let k = rng.gen_range(1..basis.len());
        let coords = (0..a.env.dim())
            .map(|i| if i == 0 { 0 } else { rng.gen_range(0..2) })
            .collect();
        let delta = a.env.from_coords(coords).unwrap();
        if a.env.is_zero(&delta) {
            continue;
        }
        let mut candidate = basis.clone();
        candidate[k] = a.env.add(&candidate[k], &delta);
        let expected = oracle_is_fm_basis(&a.env, &omega, &candidate);
        let report = is_fm_basis(&a, &candidate).unwrap();
        ensure(
            report.is_valid() == expected,
            format!("verifier and oracle disagree on {}", a.render(&candidate[k])),
        )?;
        if expected {
            valid += 1;
            continue;
        }
        // a dependent set can be closed under products; then the dependence
        // is the cited violation
        let cited = report.describe(&a, &candidate);
        ensure(
            !report.closure_violations.is_empty() || (!report.independent && !cited.is_empty()),
            format!(
                "perturbation {} rejected without a cited violation",
                a.render(&candidate[k])
            ),
        )?;
        if !report.closure_violations.is_empty() {
            by_product += 1;
        }
        invalid += 1;
    }
    Ok(format!(
        "twisted basis accepted; 100 invalid perturbations rejected, {by_product} citing a product and {} citing only linear dependence; {valid} valid perturbations also accepted",
        100 - by_product
    ))
}

fn random_abelian(rng: &mut ChaCha8Rng) -> RestrictedLieAlgebra<PrimeField> {
    let p = [2, 3][rng.gen_range(0..2)];
    let dim = rng.gen_range(1..=4);
    let alg = random_triangular(rng, p, dim, true);
    random_change_of_basis(rng, &alg)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..50 {
        let alg = random_abelian(&mut rng);
        let a = analyse(&alg);
        let dec = decompose(&a.adapted).map_err(|e| e.to_string())?;
        let basis = monomial_fmb(&a.env, &dec);
        ensure(basis.len() == a.env.dim(), format!("algebra {i}: wrong basis size"))?;
        ensure(
            is_fm_basis(&a, &basis).unwrap().is_valid(),
            format!("algebra {i}: basis rejected"),
        )?;
    }
    Ok("50 random abelian algebras: cyclic monomials verified".into())
}

fn decide_kind(name: &str) -> Result<&'static str, String> {
    let alg = corpus::load(name).unwrap();
    with_algebra!(&alg, a => {
        let analysis = analyse(a);
        let cert = decide(&analysis, &SearchBudget { max_nodes: 100_000, threads: None }).map_err(|e| e.to_string())?;
        ensure(cert.recheck(&analysis, None).unwrap(), format!("{name}: certificate fails recheck"))?;
        Ok(cert.kind())
    })
}

fn criterion_3() -> Outcome {
    for (name, want) in [
        ("l_alpha_t", "NoBasis_NoCyclicDecomposition"),
        ("l_alpha_t2", "FoundBasis"),
        ("l_alpha_f2", "FoundBasis"),
    ] {
        let start = Instant::now();
        let got = decide_kind(name)?;
        ensure(got == want, format!("{name}: expected {want}, got {got}"))?;
        ensure(
            start.elapsed() < Duration::from_secs(1),
            format!("{name}: took {:?}", start.elapsed()),
        )?;
    }
    Ok("alpha = t has no basis; alpha = t^2 and alpha over F2 have verified bases".into())
}

fn criterion_4() -> Outcome {
    let alg = corpus::load_prime("powerful_p3").unwrap();
    let a = analyse(&alg);
    ensure(
        a.structure.is_powerful && !a.structure.is_abelian,
        "not reported powerful and nonabelian",
    )?;
    let gens = height_one_generators(&a);
    let report = quadratic_obstruction(&a, &gens).map_err(|e| e.to_string())?;
    ensure(report.holds(), format!("conditions fail: {:?}", report.failure()))?;
    let cert = Certificate::QuadraticObstruction {
        generators: gens,
        report,
    };
    ensure(cert.recheck(&a, None).unwrap(), "certificate fails recheck")?;
    Ok(format!("{}: {}", cert.kind(), cert.summary(&a)))
}

/// Every element of a subspace over `F_p`.
fn all_elements(f: &PrimeField, s: &Subspace<PrimeField>) -> Vec<Vec<u32>> {
    let p = f.characteristic() as usize;
    (0..p.pow(s.dim() as u32))
        .map(|mut k| {
            let mut v = vec![0; s.ambient()];
            for row in s.rows() {
                let c = (k % p) as u32;
                k /= p;
                for (x, y) in v.iter_mut().zip(row) {
                    *x = f.add(x, &f.mul(&c, y));
                }
            }
            v
        })
        .collect()
}

/// `L^[p]` by brute force: the span of every element's associative `p`-th
/// power, closed under brackets and `p`-th powers of all its elements.
fn power_subalgebra_oracle(alg: &RestrictedLieAlgebra<PrimeField>) -> Subspace<PrimeField> {
    let f = alg.field();
    let n = alg.dim();
    let env = EnvAlgebra::new(Arc::new(alg.clone()));
    let p = f.characteristic() as u64;
    let pth = |v: &Vec<u32>| {
        let x = env.power(&env.embed(&LieElement::new(v.clone())), p);
        env.project_to_l(&x).expect("p-th powers lie in L").coords
    };
    let full = Subspace::full(*f, n);
    let mut cur = Subspace::span(*f, n, all_elements(f, &full).iter().map(pth).collect());
    loop {
        let elems = all_elements(f, &cur);
        let mut rows: Vec<Vec<u32>> = cur.rows().to_vec();
        rows.extend(elems.iter().map(pth));
        for x in cur.rows() {
            for y in cur.rows() {
                let b = alg
                    .bracket(&LieElement::new(x.clone()), &LieElement::new(y.clone()))
                    .unwrap();
                rows.push(b.coords);
            }
        }
        let next = Subspace::span(*f, n, rows);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn criterion_5() -> Outcome {
    let alg = corpus::load_prime("heisenberg_p3").unwrap();
    let a = analyse(&alg);
    let cert = decide(
        &a,
        &SearchBudget {
            max_nodes: 1000,
            threads: None,
        },
    )
    .map_err(|e| e.to_string())?;
    let Certificate::OddClassTwo { report } = &cert else {
        return Err(format!("expected the class-two route, got {}", cert.kind()));
    };
    let (r, s) = report.witness.ok_or("no witness pair")?;
    let bracket = a.adapted.bracket(&a.adapted.basis(r), &a.adapted.basis(s)).unwrap();
    let powers = power_subalgebra_oracle(&a.adapted);
    ensure(
        !powers.contains(&bracket.coords).unwrap(),
        "witness bracket lies in L^[p]",
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let class_two: Vec<_> = [
        "heisenberg_p2",
        "heisenberg_p3",
        "powerful_p3",
        "powerful_p2",
        "abelian_zero_p3",
    ]
    .iter()
    .map(|n| corpus::load_prime(n).unwrap())
    .collect();
    for _ in 0..100 {
        let alg = &class_two[rng.gen_range(0..class_two.len())];
        let env = EnvAlgebra::new(Arc::new(alg.clone()));
        let f = alg.field();
        let mut draw = || env.embed(&LieElement::new((0..alg.dim()).map(|_| f.random(&mut rng)).collect()));
        let (ur, us) = (draw(), draw());
        let v1 = env.mul(&env.mul(&us, &us), &ur);
        let v2 = env.mul(&env.mul(&us, &ur), &us);
        let v3 = env.mul(&ur, &env.mul(&us, &us));
        let two = f.from_i64(2);
        let total = env.add(&env.sub(&v1, &env.scale(&two, &v2)), &v3);
        ensure(env.is_zero(&total), "class-two identity fails")?;
    }
    Ok(format!("{}; identity holds on 100 random pairs", cert.summary(&a)))
}

fn chains_agree<F: Field>(alg: &RestrictedLieAlgebra<F>) -> Result<(), String> {
    let a = analyse(alg);
    let oracle = a.env.omega_powers_oracle().map_err(|e| e.to_string())?;
    ensure(a.omega == oracle, "ω chains differ")?;
    // D_m of the adapted algebra against L ∩ ω^m read off the oracle
    let data = dimension_subalgebras(&a.adapted).map_err(|e| e.to_string())?;
    let f = a.env.field();
    let n = a.adapted.dim();
    let gens: Vec<usize> = (0..n).map(|i| a.env.indexer().generator(i)).collect();
    let l = Subspace::coordinate(f.clone(), a.env.dim(), gens.clone());
    for m in 1..=oracle.len() {
        let meet = l.intersect(&oracle[m - 1]).unwrap();
        let rows = meet
            .rows()
            .iter()
            .map(|r| gens.iter().map(|&g| r[g].clone()).collect())
            .collect();
        let lie_part = Subspace::span(f.clone(), n, rows);
        ensure(
            lie_part == data.dim_subalgebra(m),
            format!("D_{m} differs from L ∩ ω^{m}"),
        )?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    for (name, alg) in corpus::all() {
        with_algebra!(&alg, a => chains_agree(a)).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..24 {
        let p = [2, 3][i % 2];
        let dim = rng.gen_range(1..=4);
        let base = random_triangular(&mut rng, p, dim, false);
        let alg = random_change_of_basis(&mut rng, &base);
        chains_agree(&alg).map_err(|e| format!("random algebra {i}: {e}"))?;
    }
    Ok(format!(
        "{} corpus algebras and 24 random ones agree with the oracle",
        corpus::CORPUS.len()
    ))
}

fn sparse_element<F: Field>(env: &EnvAlgebra<F>, rng: &mut ChaCha8Rng) -> EnvElement<F> {
    let f = env.field();
    let mut coords = vec![f.zero(); env.dim()];
    let terms = if env.dim() <= 27 { env.dim() } else { 4 };
    for _ in 0..terms {
        coords[rng.gen_range(0..env.dim())] = f.random(rng);
    }
    env.from_coords(coords).unwrap()
}

fn pbw_laws<F: Field>(alg: &RestrictedLieAlgebra<F>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let env = EnvAlgebra::new(Arc::new(alg.clone()));
    for _ in 0..1000 {
        let (x, y, z) = (
            sparse_element(&env, rng),
            sparse_element(&env, rng),
            sparse_element(&env, rng),
        );
        ensure(
            env.mul(&env.mul(&x, &y), &z) == env.mul(&x, &env.mul(&y, &z)),
            "associativity fails",
        )?;
        ensure(
            env.mul(&env.one(), &x) == x && env.mul(&x, &env.one()) == x,
            "unit law fails",
        )?;
        ensure(
            env.mul(&x, &env.add(&y, &z)) == env.add(&env.mul(&x, &y), &env.mul(&x, &z)),
            "distributivity fails",
        )?;
    }
    Ok(())
}

/// Builds `g_1^{a_1} ⋯ g_k^{a_k}` from associative powers and checks the
/// truncated polynomial rules: independence, and `m_a m_b = m_{a+b}` or 0.
fn truncated_model(alg: &RestrictedLieAlgebra<PrimeField>) -> Result<(), String> {
    let dec = decompose(alg).map_err(|e| e.to_string())?;
    let env = EnvAlgebra::new(Arc::new(alg.clone()));
    let p = alg.p() as usize;
    let orders: Vec<usize> = dec.exponents.iter().map(|&e| p.pow(e as u32)).collect();
    let gens: Vec<_> = dec.generators.iter().map(|g| env.embed(g)).collect();
    let mut exps: Vec<Vec<usize>> = vec![vec![]];
    for &o in &orders {
        exps = exps
            .into_iter()
            .flat_map(|e| (0..o).map(move |a| [e.clone(), vec![a]].concat()))
            .collect();
    }
    let mono = |a: &[usize]| {
        a.iter()
            .zip(&gens)
            .fold(env.one(), |acc, (&k, g)| env.mul(&acc, &env.power(g, k as u64)))
    };
    let basis: Vec<_> = exps.iter().map(|a| mono(a)).collect();
    let rank = rref(alg.field(), env.dim(), basis.iter().map(|b| b.coords.clone()).collect())
        .unwrap()
        .1;
    ensure(rank == env.dim(), "model monomials are dependent")?;
    for (a, ma) in exps.iter().zip(&basis) {
        for (b, mb) in exps.iter().zip(&basis) {
            let sum: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            let expected = if sum.iter().zip(&orders).all(|(s, o)| s < o) {
                mono(&sum)
            } else {
                env.zero()
            };
            ensure(
                env.mul(ma, mb) == expected,
                "product differs from the truncated polynomial model",
            )?;
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut models = Vec::new();
    for (name, alg) in corpus::all() {
        with_algebra!(&alg, a => pbw_laws(a, &mut rng)).map_err(|e| format!("{name}: {e}"))?;
        if let AnyAlgebra::Prime(a) = &alg {
            if a.is_abelian() {
                truncated_model(a).map_err(|e| format!("{name}: {e}"))?;
                models.push(name);
            }
        }
    }
    Ok(format!(
        "1000 triples per corpus algebra; truncated model matches on {}",
        models.join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let algs = triangular_f2_dim3();
    let budget = SearchBudget {
        max_nodes: 50_000_000,
        threads: None,
    };
    let (mut found, mut none, mut nodes) = (0, 0, 0);
    for (i, alg) in algs.iter().enumerate() {
        let a = analyse(alg);
        match search_fmb(&a, &budget).map_err(|e| e.to_string())? {
            SearchOutcome::Found { basis, nodes: n } => {
                ensure(
                    is_fm_basis(&a, &basis).unwrap().is_valid(),
                    format!("table {i}: found basis rejected"),
                )?;
                found += 1;
                nodes += n;
            }
            SearchOutcome::Exhausted { nodes: n, .. } => {
                none += 1;
                nodes += n;
            }
            other => return Err(format!("table {i}: no definite answer ({other:?})")),
        }
    }
    // the Heisenberg entry: [x1,x2] = x3 and nothing else
    let heis = algs
        .iter()
        .find(|a| !a.is_abelian() && (0..3).all(|i| a.pmap_basis(i).iter().all(|&c| c == 0)))
        .ok_or("Heisenberg table missing")?;
    let a = analyse(heis);
    let SearchOutcome::Found { basis, .. } = search_fmb(&a, &budget).unwrap() else {
        return Err("Heisenberg table: no basis found".into());
    };
    ensure(is_fm_basis(&a, &basis).unwrap().is_valid(), "Heisenberg basis rejected")?;
    Ok(format!(
        "{} tables: {found} with a basis, {none} exhausted, {nodes} nodes in total",
        algs.len()
    ))
}

/// Reports for every algebra the other criteria touch, at two thread counts.
fn all_reports(threads: Option<usize>) -> Vec<String> {
    let budget = SearchBudget {
        max_nodes: 200_000,
        threads,
    };
    let mut out = Vec::new();
    let push = |out: &mut Vec<String>, any: &AnyAlgebra| {
        with_algebra!(any, alg => {
            let a = analyse(alg);
            let cert = decide(&a, &budget).unwrap();
            out.push(report::to_string(&report::build(&a, &cert, &budget)));
        })
    };
    for (_, alg) in corpus::all() {
        push(&mut out, &alg);
    }
    for alg in triangular_f2_dim3() {
        push(&mut out, &AnyAlgebra::Prime(alg));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        push(&mut out, &AnyAlgebra::Prime(random_abelian(&mut rng)));
    }
    out
}

fn criterion_9() -> Outcome {
    let first = all_reports(Some(1));
    let second = all_reports(None);
    ensure(first.len() == second.len(), "report counts differ")?;
    for (i, (x, y)) in first.iter().zip(&second).enumerate() {
        ensure(x == y, format!("report {i} differs between runs"))?;
    }
    Ok(format!(
        "{} reports byte-identical across runs and thread counts",
        first.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "twisted Heisenberg basis in characteristic 2",
            criterion_1,
            Duration::from_secs(1),
        ),
        ("abelian algebras over F_p", criterion_2, Duration::from_secs(30)),
        ("non-perfect field example", criterion_3, Duration::from_secs(3)),
        (
            "quadratic obstruction, powerful p = 3",
            criterion_4,
            Duration::from_secs(5),
        ),
        ("class two, p = 3", criterion_5, Duration::from_secs(60)),
        ("fast ω chain against the oracle", criterion_6, Duration::from_secs(60)),
        ("PBW multiplication", criterion_7, Duration::from_secs(600)),
        (
            "search on all 3-dimensional F_2 tables",
            criterion_8,
            Duration::from_secs(600),
        ),
        ("deterministic reports", criterion_9, Duration::from_secs(600)),
    ];
    let mut failures = 0;
    for (i, (title, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS  {title} ({took:.2?}): {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("criterion {}: FAIL  {title} ({took:.2?}): {msg}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
