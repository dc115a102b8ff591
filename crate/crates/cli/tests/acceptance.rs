//! Acceptance suite: one test per criterion, each exercising the library
//! end to end with exact (zero-tolerance) arithmetic. Run with
//! `cargo test --test acceptance` (add `-- --nocapture` for the PASS lines).

use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqw_cli::parser::parse_expr;
use sqw_core::oracle::{cross_check, realize, realize_elem, DiffOp};
use sqw_core::poly::Poly;
use sqw_core::rat::Rat;
use sqw_core::structure::{
    act_simple, cyclic_reduction, local_finiteness_dim, FactoredPoly, FiniteQW, QuotElem,
};
use sqw_core::uea::{
    bracket_gen, casimir, commutator, normalize_with_strategy, verify_uea_identities,
    Generator, Monomial, Strategy, UEAElem,
};
use sqw_core::whittaker::{
    qw_vector_basis, shift_elem, verify_reduction_lemmas, LemmaBounds, ModElem, ShiftOp,
    WhittakerType,
};
use sqw_core::RatMatrix;

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Generator> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| Generator::ALL[rng.gen_range(0..6)]).collect()
}

fn random_monomial(rng: &mut ChaCha8Rng, max_deg: usize) -> Monomial {
    let mut w = random_word(rng, max_deg);
    w.sort_by_key(|g| g.index());
    Monomial::from_sorted_word(&w)
}

fn phi_classes() -> [WhittakerType; 3] {
    [
        WhittakerType::from_ints(1, 0),
        WhittakerType::from_ints(0, 1),
        WhittakerType::from_ints(2, 3),
    ]
}

#[test]
fn criterion_01_bracket_table() {
    for a in Generator::ALL {
        for b in Generator::ALL {
            assert_eq!(bracket_gen(a, b), -&bracket_gen(b, a), "antisymmetry at ({a:?},{b:?})");
            for c in Generator::ALL {
                let mut sum = commutator(&UEAElem::generator(a), &bracket_gen(b, c));
                sum = &sum + &commutator(&UEAElem::generator(b), &bracket_gen(c, a));
                sum = &sum + &commutator(&UEAElem::generator(c), &bracket_gen(a, b));
                assert!(sum.is_zero(), "Jacobi fails at ({a:?},{b:?},{c:?})");
            }
        }
    }
    println!("PASS criterion 1: bracket antisymmetry and Jacobi over all 216 triples, exact");
}

#[test]
fn criterion_02_pbw_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5042_5701);
    for _ in 0..200 {
        let w = random_word(&mut rng, 5);
        let l = normalize_with_strategy(&w, &Rat::one(), Strategy::LeftmostFirst);
        let r = normalize_with_strategy(&w, &Rat::one(), Strategy::RightmostFirst);
        assert_eq!(l, r, "strategies disagree on {w:?}");
    }
    for _ in 0..200 {
        let a = UEAElem::from_term(random_monomial(&mut rng, 4), Rat::one());
        let b = UEAElem::from_term(random_monomial(&mut rng, 4), Rat::one());
        let c = UEAElem::from_term(random_monomial(&mut rng, 4), Rat::one());
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c), "associativity fails");
    }
    println!("PASS criterion 2: 200 confluence words + 200 associativity triples, exact");
}

#[test]
fn criterion_03_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6f72_6101);
    for _ in 0..100 {
        let pieces = rng.gen_range(1..=2);
        let words: Vec<(Vec<Generator>, Rat)> = (0..pieces)
            .map(|_| {
                let w = random_word(&mut rng, 4);
                let mut n = rng.gen_range(-5..=5i64);
                if n == 0 {
                    n = 1;
                }
                (w, Rat::from_pair(n, rng.gen_range(1..=4)))
            })
            .collect();
        assert!(cross_check(&words, 8), "oracle mismatch on {words:?}");
    }
    println!("PASS criterion 3: 100 random elements agree with the oscillator realization on x^n, n <= 8");
}

fn diff_op_sub(a: &DiffOp, b: &DiffOp) -> DiffOp {
    let mut out = a.clone();
    out.add_assign(&b.scale(&Rat::from_int(-1)));
    out
}

#[test]
fn criterion_04_centrality_mod_z() {
    let c0 = casimir();
    for g in Generator::ALL {
        let com = commutator(&UEAElem::generator(g), &c0);
        assert!(com.all_z_exp_at_least(1), "[{g:?}, C0] has a z-free monomial");
    }
    // Independent oracle path: [e, C0] = z·e and [f, C0] = -z·f as operators.
    let c_op = realize_elem(&c0);
    let e_op = realize(Generator::E);
    let f_op = realize(Generator::F);
    let ze = realize_elem(&(&UEAElem::generator(Generator::Z) * &UEAElem::generator(Generator::E)));
    let zf = realize_elem(&(&UEAElem::generator(Generator::Z) * &UEAElem::generator(Generator::F)));
    assert_eq!(diff_op_sub(&e_op.compose(&c_op), &c_op.compose(&e_op)), ze);
    assert_eq!(
        diff_op_sub(&f_op.compose(&c_op), &c_op.compose(&f_op)),
        zf.scale(&Rat::from_int(-1))
    );
    println!("PASS criterion 4: [g, C0] lies in the z-ideal; oracle confirms [e,C0]=z*e and [f,C0]=-z*f");
}

#[test]
fn criterion_05_reordering_identities() {
    let report = verify_uea_identities(6);
    assert!(
        report.all_pass(),
        "failures: {:?}",
        report.failures().collect::<Vec<_>>()
    );
    println!(
        "PASS criterion 5: all four reordering identities for exponents <= 6 ({} checks)",
        report.checks.len()
    );
}

#[test]
fn criterion_06_reduction_lemmas() {
    let bounds = LemmaBounds { poly_deg: 4, idx: 5 };
    let mut total = 0;
    for (i, phi) in phi_classes().into_iter().enumerate() {
        let report = verify_reduction_lemmas(&phi, &bounds, 0xACC0 + i as u64).unwrap();
        assert!(
            report.all_pass(),
            "failures for {phi:?}: {:?}",
            report.failures().collect::<Vec<_>>()
        );
        total += report.checks.len();
    }
    println!("PASS criterion 6: annihilation-ladder closed forms across all type classes ({total} checks)");
}

#[test]
fn criterion_07_qw_vectors_universal() {
    for phi in phi_classes() {
        for max_deg in 0..=6u32 {
            let basis = qw_vector_basis(&phi, max_deg).unwrap();
            assert_eq!(
                basis.len(),
                max_deg as usize + 1,
                "dimension defect for {phi:?} at degree {max_deg}"
            );
            for v in &basis {
                let a = v.to_adapted().unwrap();
                assert!(a.is_c_polynomial(), "solution outside C[C]w for {phi:?}");
            }
        }
    }
    println!("PASS criterion 7: quasi-Whittaker space has dimension maxDeg+1 and lies in C[C]w, all classes");
}

#[test]
fn criterion_08_simple_quotient_vectors_and_witnesses() {
    let xis = [Rat::zero(), Rat::one(), Rat::from_int(-2)];
    for phi in phi_classes() {
        let p_shift = shift_elem(&phi, ShiftOp::PShift).unwrap();
        let q_shift = shift_elem(&phi, ShiftOp::QShift).unwrap();
        for xi in &xis {
            // Pairs (i,j) with i+j <= 6 span the truncated simple quotient.
            let pairs: Vec<[u32; 2]> = (0..=6u32)
                .flat_map(|d| (0..=d).map(move |i| [i, d - i]))
                .collect();
            let index: std::collections::BTreeMap<[u32; 2], usize> =
                pairs.iter().enumerate().map(|(n, t)| (*t, n)).collect();
            let dim = pairs.len();
            let mut m = RatMatrix::zero(2 * dim, dim);
            for (col, t) in pairs.iter().enumerate() {
                let v = QuotElem::from_term(phi.clone(), xi.clone(), *t, Rat::one());
                for (s, c) in act_simple(&p_shift, &v).unwrap().terms() {
                    m.set(index[s], col, c.clone());
                }
                for (s, c) in act_simple(&q_shift, &v).unwrap().terms() {
                    m.set(dim + index[s], col, c.clone());
                }
            }
            let ns = m.nullspace();
            assert_eq!(ns.len(), 1, "solution space not a line for {phi:?}, xi={xi}");
            let w_col = index[&[0, 0]];
            for (col, c) in ns[0].iter().enumerate() {
                assert_eq!(c.is_zero(), col != w_col, "solution is not the cyclic line");
            }

            // Every spanning vector reduces to the cyclic line with a
            // verified nonzero scalar.
            for t in &pairs {
                let v = QuotElem::from_term(phi.clone(), xi.clone(), *t, Rat::one());
                let witness = cyclic_reduction(&v).unwrap();
                assert!(!witness.scalar.is_zero());
            }
            // A few dense combinations, beyond the monomial spanning set.
            let mut rng = ChaCha8Rng::seed_from_u64(0x3808);
            for _ in 0..5 {
                let mut v = QuotElem::zero(phi.clone(), xi.clone());
                for t in &pairs {
                    v.add_term(*t, Rat::from_int(rng.gen_range(-3..=3)));
                }
                if v.is_zero() {
                    continue;
                }
                let witness = cyclic_reduction(&v).unwrap();
                assert!(!witness.scalar.is_zero());
            }
        }
    }
    println!("PASS criterion 8: simple quotients have a one-dimensional quasi-Whittaker line and verified witnesses");
}

#[test]
fn criterion_09_casimir_scalar_action() {
    let c0 = casimir();
    let xis = [Rat::zero(), Rat::one(), Rat::from_int(-2)];
    for phi in phi_classes() {
        for xi in &xis {
            for d in 0..=5u32 {
                for i in 0..=d {
                    let b = QuotElem::from_term(phi.clone(), xi.clone(), [i, d - i], Rat::one());
                    let got = act_simple(&c0, &b).unwrap();
                    assert_eq!(got, b.scale(xi), "C0 not scalar at ({i},{}) xi={xi}", d - i);
                }
            }
        }
    }
    println!("PASS criterion 9: C0 acts by xi on every simple-quotient basis vector with i+j <= 5");
}

#[test]
fn criterion_10_direct_sum_decomposition() {
    let phi = WhittakerType::from_ints(1, 0);
    let cases = [
        FactoredPoly::new(vec![(Rat::one(), 1), (Rat::from_int(-1), 1)]),
        FactoredPoly::new(vec![(Rat::one(), 2), (Rat::from_int(-2), 1)]),
    ];
    for d in cases {
        let module = FiniteQW::new(phi.clone(), d.clone(), 6).unwrap();
        // decompose() internally verifies the projector identities and the
        // per-grade dimension bookkeeping; failures panic.
        let comps = module.decompose().unwrap();
        assert_eq!(comps.len(), d.roots().len());

        // The Bezout identity, re-checked symbolically at test level.
        let mut sum = Poly::zero();
        for c in &comps {
            sum = &sum + &(&c.bezout * &c.complement);
        }
        assert_eq!(sum, Poly::one());

        // Composition lengths equal the multiplicities, per summand and in
        // total.
        let series = module.composition_series();
        assert_eq!(series.layers.len() as u32, d.degree());
        for c in &comps {
            let single = FiniteQW::new(
                phi.clone(),
                FactoredPoly::single(c.root.clone(), c.multiplicity),
                6,
            )
            .unwrap();
            assert_eq!(
                single.composition_series().layers.len() as u32,
                c.multiplicity
            );
        }
    }
    println!("PASS criterion 10: Bezout certificates, projectors, graded dimensions, and composition lengths");
}

#[test]
fn criterion_11_annihilator_of_the_cyclic_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA111);
    for phi in [WhittakerType::from_ints(1, 0), WhittakerType::from_ints(2, 3)] {
        let d = FactoredPoly::new(vec![(Rat::one(), 1), (Rat::from_int(-2), 1)]);
        let module = FiniteQW::new(phi.clone(), d.clone(), 6).unwrap();

        let c0 = casimir();
        let mut dc0 = UEAElem::zero();
        for (k, c) in d.expand().coeffs().iter().enumerate() {
            dc0 = &dc0 + &c0.pow(k as u32).scale(c);
        }
        let p_shift = shift_elem(&phi, ShiftOp::PShift).unwrap();
        let q_shift = shift_elem(&phi, ShiftOp::QShift).unwrap();

        let random_elem = |rng: &mut ChaCha8Rng| {
            let mut u = UEAElem::zero();
            for _ in 0..rng.gen_range(1..=2) {
                u.add_term(
                    random_monomial(rng, 2),
                    Rat::from_int(rng.gen_range(-5..=5)),
                );
            }
            u
        };
        for _ in 0..25 {
            let u1 = random_elem(&mut rng);
            let u2 = random_elem(&mut rng);
            let u3 = random_elem(&mut rng);
            let mut ideal_elem = &u1 * &dc0;
            ideal_elem = &ideal_elem + &(&u2 * &p_shift);
            ideal_elem = &ideal_elem + &(&u3 * &q_shift);
            assert!(
                module.annihilator_contains(&ideal_elem),
                "ideal element fails to annihilate w for {phi:?}"
            );
        }
        for u in [
            UEAElem::one(),
            UEAElem::generator(Generator::H),
            UEAElem::generator(Generator::E),
        ] {
            assert!(
                !module.annihilator_contains(&u),
                "{u} wrongly annihilates w for {phi:?}"
            );
        }
    }
    println!("PASS criterion 11: 50 random ideal elements annihilate w; 1, h, e do not");
}

#[test]
fn criterion_12_local_finiteness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x10CF);
    let phi = WhittakerType::from_ints(2, 3);
    for _ in 0..50 {
        let mut v = ModElem::zero(phi.clone());
        for _ in 0..rng.gen_range(1..=4) {
            let i = rng.gen_range(0..=5);
            let j = rng.gen_range(0..=(5 - i));
            let k = rng.gen_range(0..=(5 - i - j));
            v.add_term([i, j, k], Rat::from_int(rng.gen_range(-5..=5)));
        }
        if v.is_zero() {
            continue;
        }
        let dim = local_finiteness_dim(&v).unwrap();
        assert!(dim >= 1);
    }

    let phi = WhittakerType::from_ints(1, 0);
    let module = FiniteQW::new(phi, FactoredPoly::single(Rat::one(), 2), 6).unwrap();
    for _ in 0..50 {
        let mut v = sqw_core::structure::FinElem::zero();
        for _ in 0..rng.gen_range(1..=4) {
            let i = rng.gen_range(0..=4);
            let j = rng.gen_range(0..=(4 - i));
            let k = rng.gen_range(0..2).min(4 - i - j);
            v.add_term([i, j, k], Rat::from_int(rng.gen_range(-5..=5)));
        }
        if v.is_zero() {
            continue;
        }
        let dim = module.local_finiteness_dim(&v).unwrap();
        assert!(dim >= 1);
    }
    println!("PASS criterion 12: Heisenberg closures terminate with finite dimension on 50+50 random vectors");
}

fn gen_expr(rng: &mut ChaCha8Rng) -> String {
    let letters = ['e', 'h', 'f', 'p', 'q', 'z'];
    let n_terms = rng.gen_range(1..=4);
    let mut out = String::new();
    for i in 0..n_terms {
        let mut factors: Vec<String> = Vec::new();
        if rng.gen_bool(0.6) {
            let n: i64 = rng.gen_range(-20..=20);
            if rng.gen_bool(0.5) {
                factors.push(format!("{n}/{}", rng.gen_range(1..=9)));
            } else {
                factors.push(format!("{n}"));
            }
        }
        for _ in 0..rng.gen_range(0..=3) {
            let g = letters[rng.gen_range(0..6)];
            let e = rng.gen_range(1..=4);
            factors.push(if e == 1 { g.to_string() } else { format!("{g}^{e}") });
        }
        if factors.is_empty() {
            factors.push(format!("{}", rng.gen_range(1..=9)));
        }
        let term = factors.join("*");
        if i == 0 {
            out.push_str(&term);
        } else {
            out.push_str(if rng.gen_bool(0.5) { " + " } else { " - " });
            out.push_str(&term);
        }
    }
    out
}

#[test]
fn criterion_13_cli_contract() {
    // Grammar round trip on 100 generated expressions.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC11);
    for _ in 0..100 {
        let src = gen_expr(&mut rng);
        let first = parse_expr(&src).unwrap_or_else(|e| panic!("generated {src:?}: {e}"));
        let second = parse_expr(&first.format())
            .unwrap_or_else(|e| panic!("round trip of {src:?}: {e}"));
        assert_eq!(first, second, "fixpoint broken for {src:?}");
    }

    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_sqw"))
            .args(args)
            .output()
            .expect("binary runs")
    };

    // The full verification battery exits cleanly.
    let out = run(&["verify", "--suite", "all", "--seed", "42"]);
    assert!(
        out.status.success(),
        "verify failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    // JSON output is byte-stable across runs for fixed input and seed.
    for args in [
        vec!["normalize", "q*p - 3/2*e^2*h", "--format", "json"],
        vec![
            "qwvectors", "--phi-p", "2", "--phi-q", "3", "--degree", "3", "--format", "json",
        ],
        vec![
            "decompose", "--phi-p", "1", "--phi-q", "0", "--d", "1:2,-2:1", "--format", "json",
        ],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "unstable output for {args:?}");
    }
    println!("PASS criterion 13: grammar fixpoint, verify exit 0, byte-stable JSON");
}
