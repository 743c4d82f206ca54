//! Acceptance run: one PASS/FAIL line per criterion, with wall time against its budget.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gaudin::arith::{int, p1_equal, q, random_distinct, random_nonzero, to_f64, P1Value, RatFunc, Rational, Tolerance};
use gaudin::envelope::Envelope;
use gaudin::gaudin::{
    degeneration_family, dynamical, family_span, homogeneous, inhomogeneous, interior_span, iota0_span, quad_span, span_limit_eps0, trig_by_reduction,
    trigonometric, verma_matching, DegenerationPoints, GaudinError, HamiltonianSet, SpanParams,
};
use gaudin::holonomy::{q_of_point, reconstruct_coordinates, HolonomyAlgebra};
use gaudin::liealg::{build_sl, is_regular, CartanRole, CartanVector};
use gaudin::moduli::{boundary_from_components, Assembly, Child, MNode, ModuliPoint, Petal, Space};
use gaudin::reps::{build_irrep, TensorRep};
use gaudin::spectra::{
    compact_theta, exchange_loop, monodromy_permutation, there_and_back, to_complex, trig_matrices, CMat, CVec, CommutingFamily, CompactConvention,
};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sl(m: usize) -> Envelope {
    Envelope::new(build_sl(m).unwrap())
}

fn rng(k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + k)
}

fn cartan(rng: &mut ChaCha8Rng, r: usize) -> Vec<Rational> {
    (0..r).map(|_| random_nonzero(rng, 4, 3)).collect()
}

fn regular(rng: &mut ChaCha8Rng, env: &Envelope) -> Vec<Rational> {
    loop {
        let c = cartan(rng, env.lie().rank());
        if is_regular(&CartanVector::new(c.clone(), CartanRole::Chi), env.lie()) {
            return c;
        }
    }
}

fn nonzero_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    loop {
        let z = random_distinct(rng, n, 5, 4);
        if z.iter().all(|x| !x.is_zero()) {
            return z;
        }
    }
}

fn commute(env: &Envelope, h: HamiltonianSet<Rational>) -> bool {
    h.commutator_failure(env).is_none()
}

struct Verdict {
    pass: bool,
    note: String,
}

fn verdict(pass: bool, note: impl Into<String>) -> Verdict {
    Verdict { pass, note: note.into() }
}

fn c1_commutativity() -> Verdict {
    let mut r = rng(1);
    let mut bad = Vec::new();
    for (m, n) in [(2, 2), (2, 3), (3, 2)] {
        let env = sl(m);
        let rk = env.lie().rank();
        for k in 0..20 {
            let z = random_distinct(&mut r, n, 5, 4);
            let zt = nonzero_points(&mut r, n);
            let theta = cartan(&mut r, rk);
            let chi = regular(&mut r, &env);
            let mut mixed = inhomogeneous(&env, &z, &chi).unwrap();
            mixed.elements.extend(dynamical(&env, &z, &chi).unwrap().elements);
            let ok = commute(&env, homogeneous(&env, &z).unwrap()) && commute(&env, trigonometric(&env, &zt, &theta).unwrap()) && commute(&env, mixed);
            if !ok {
                bad.push(format!("sl{m} n={n} #{k}"));
            }
        }
    }
    verdict(bad.is_empty(), format!("60 parameter sets, failures: {bad:?}"))
}

fn c2_psi() -> Verdict {
    let mut r = rng(2);
    let mut ok = 0;
    for m in [2, 3] {
        let env = sl(m);
        for _ in 0..10 {
            let z = nonzero_points(&mut r, 2);
            let theta = cartan(&mut r, env.lie().rank());
            ok += (trig_by_reduction(&env, &z, &theta).unwrap() == trigonometric(&env, &z, &theta).unwrap().elements) as usize;
        }
    }
    verdict(ok == 20, format!("{ok}/20 exact matches"))
}

fn c3_verma() -> Verdict {
    let env = sl(2);
    let mut r = rng(3);
    let lambdas = vec![vec![int(1)], vec![int(1)]];
    let (mut ok, mut skipped) = (0, 0);
    let mut done = 0;
    while done < 10 {
        let z = nonzero_points(&mut r, 2);
        let theta = vec![random_nonzero(&mut r, 6, 7)];
        let mut all = true;
        let mut generic = true;
        for mu in [-2, 0, 2] {
            match verma_matching(&env, &lambdas, &z, &theta, &[int(mu)]) {
                Ok(pairs) => all &= pairs.iter().all(|(a, b)| a == b),
                Err(GaudinError::NonGenericTheta(_)) => generic = false,
                Err(e) => panic!("{e}"),
            }
        }
        if !generic {
            skipped += 1;
            continue;
        }
        done += 1;
        ok += all as usize;
    }
    verdict(ok == 10, format!("{ok}/10 (θ, z) match on μ ∈ {{-2, 0, 2}}; {skipped} non-generic θ redrawn"))
}

fn c4_degeneration() -> Verdict {
    let mut r = rng(4);
    let (mut lit, mut flipped, mut inv, mut plus, mut total) = (0, 0, 0, 0, 0);
    for (m, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let env = sl(m);
        for _ in 0..10 {
            let z = random_distinct(&mut r, n, 5, 4);
            let chi = regular(&mut r, &env);
            let target = interior_span(&env, &z, &SpanParams::Inhomogeneous(chi.clone())).unwrap();
            let mz: Vec<Rational> = z.iter().map(|x| -x).collect();
            let at_minus = interior_span(&env, &mz, &SpanParams::Inhomogeneous(chi.clone())).unwrap();
            let lim = |p| span_limit_eps0(&degeneration_family(&env, &z, &chi, p).unwrap()).unwrap();
            let l = lim(DegenerationPoints::Literal);
            lit += l.same_as(&target) as usize;
            flipped += l.same_as(&at_minus) as usize;
            inv += lim(DegenerationPoints::Inverse).same_as(&target) as usize;
            plus += lim(DegenerationPoints::Plus).same_as(&target) as usize;
            total += 1;
        }
    }
    verdict(
        lit == total,
        format!(
            "points 1 - εz: limit == span{{H_χ(z), ω}} in {lit}/{total}; diagnostics: limit == span{{H_χ(-z), ω}} {flipped}/{total}, \
             points (1 - εz)^-1 {inv}/{total}, points 1 + εz {plus}/{total}"
        ),
    )
}

fn c5_moduli() -> Verdict {
    let mut r = rng(5);
    let mut bad = Vec::new();
    for space in [Space::M, Space::F, Space::T, Space::CalF] {
        let mut count = 0;
        while count < 500 {
            let n = r.random_range(2..=5);
            let z = random_distinct(&mut r, n, 8, 5);
            let eps = (space == Space::CalF).then(|| random_nonzero(&mut r, 2, 7));
            let p = match ModuliPoint::from_marked_points(space, &z, eps) {
                Ok(p) => p,
                Err(gaudin::moduli::ModuliError::PoleAtParameter(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            count += 1;
            if !p.validate().ok() {
                bad.push(format!("{space} {z:?}"));
            }
        }
    }
    let mut assembled = 0;
    for k in 0..20 {
        let n = 2 + k % 4;
        let labels: Vec<usize> = (1..=n).collect();
        let flower = k % 2 == 0;
        let a = Assembly::random(&mut r, &labels, flower);
        let p = boundary_from_components(&a, if flower { Space::F } else { Space::M }).unwrap();
        if p.validate().ok() && p.decompose().unwrap() == a.canonical() {
            assembled += 1;
        }
    }
    verdict(
        bad.is_empty() && assembled == 20,
        format!("2000 interior points, {} invalid; {assembled}/20 assemblies roundtrip", bad.len()),
    )
}

fn direct_coordinates(z: &[Rational]) -> (BTreeMap<(usize, usize), P1Value>, BTreeMap<(usize, usize, usize), P1Value>) {
    let n = z.len();
    let mut nu = BTreeMap::new();
    let mut mu = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            nu.insert((i + 1, j + 1), P1Value::new(Rational::one() / (&z[i] - &z[j]), Rational::one()).unwrap());
            for k in 0..n {
                if k != i && k != j {
                    mu.insert((i + 1, j + 1, k + 1), P1Value::new((&z[i] - &z[k]) / (&z[i] - &z[j]), Rational::one()).unwrap());
                }
            }
        }
    }
    (nu, mu)
}

fn c6_holonomy() -> Verdict {
    let mut r = rng(6);
    let mut interior = 0;
    for _ in 0..50 {
        let n = r.random_range(2..=5);
        let z = random_distinct(&mut r, n, 8, 5);
        let h = HolonomyAlgebra::<Rational>::r(n);
        let rec = reconstruct_coordinates(&h, &h.q_of_points(&z).unwrap()).unwrap();
        let (nu, mu) = direct_coordinates(&z);
        let nu_ok = nu.iter().all(|(k, v)| rec.nu.get(k).is_some_and(|g| p1_equal(g, v)));
        let mu_ok = mu.iter().all(|(k, v)| match rec.mu.get(k) {
            Some(Some(g)) => p1_equal(g, v),
            _ => false,
        });
        interior += (nu_ok && mu_ok) as usize;
    }
    // boundary: maximal flower, one petal holding one bubble (the M̄ₙ₊₁ stratum), then random flowers
    let n = 4;
    let labels: Vec<usize> = (1..=n).collect();
    let leaf = |p: i64, i: usize| (int(p), Child::Leaf(i));
    let mut pts = vec![
        Assembly::F(labels.iter().map(|&i| Petal { slots: vec![leaf(0, i)] }).collect()),
        Assembly::F(vec![Petal {
            slots: vec![(
                int(0),
                Child::Node(MNode {
                    children: labels.iter().map(|&i| leaf((i * i) as i64, i)).collect(),
                }),
            )],
        }]),
    ];
    while pts.len() < 10 {
        let a = Assembly::random(&mut r, &labels, true);
        if boundary_from_components(&a, Space::F).unwrap().interior_marked_points().is_none() {
            pts.push(a);
        }
    }
    let mut boundary = 0;
    for a in &pts {
        let p = boundary_from_components(a, Space::F).unwrap();
        let (h, qc) = q_of_point(&p).unwrap();
        let rec = reconstruct_coordinates(&h, &qc).unwrap();
        let ok = h.is_commutative(&qc) && qc.rank() == n && gaudin::holonomy::coordinates_match(&rec, p.nu_map(), p.mu_map());
        boundary += ok as usize;
    }
    verdict(interior == 50 && boundary == 10, format!("interior {interior}/50, boundary {boundary}/10"))
}

/// Random degenerating family: the canonical family of a random assembly plus a random t⁵ perturbation.
fn perturbed_family(r: &mut ChaCha8Rng, a: &Assembly) -> Vec<RatFunc> {
    let (_, zt) = a.family();
    let t = RatFunc::var();
    let t5 = t.clone() * t.clone() * t.clone() * t.clone() * t;
    zt.into_iter()
        .map(|z| z + t5.clone() * RatFunc::from_rational(random_nonzero(r, 3, 4)))
        .collect()
}

fn c7_flatness() -> Verdict {
    let env = sl(2);
    let mut r = rng(7);
    let mut ok = 0;
    let mut notes = Vec::new();
    for k in 0..20 {
        let n = 2 + k % 2;
        let (a, params, space, want) = match k % 3 {
            0 => (
                Assembly::random(&mut r, &(1..=n + 1).collect::<Vec<_>>(), false),
                SpanParams::Homogeneous,
                Space::M,
                2 * (n + 1) - 1,
            ),
            1 => (
                Assembly::random(&mut r, &(1..=n).collect::<Vec<_>>(), true),
                SpanParams::Inhomogeneous(vec![random_nonzero(&mut r, 3, 4)]),
                Space::F,
                2 * n,
            ),
            _ => (
                Assembly::random(&mut r, &(0..=n).collect::<Vec<_>>(), false),
                SpanParams::Trig(vec![random_nonzero(&mut r, 3, 4)]),
                Space::M,
                2 * n,
            ),
        };
        let p = boundary_from_components(&a, space).unwrap();
        let at_point = quad_span(&env, &p, &params).unwrap();
        let lim = span_limit_eps0(&family_span(&env, &perturbed_family(&mut r, &a), &params).unwrap()).unwrap();
        if lim.same_as(&at_point) && lim.dim() == want {
            ok += 1;
        } else {
            notes.push(format!("#{k} dims {} / {} want {want}", lim.dim(), at_point.dim()));
        }
    }
    verdict(ok == 20, format!("{ok}/20 families {notes:?}"))
}

fn sub_form(g: &CMat, rows: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), rows.len(), |a, b| g[(rows[a], rows[b])])
}

fn c8_simple_split() -> Verdict {
    let env = sl(2);
    let mut r = rng(8);
    let tol = Tolerance::default();
    let v1 = Arc::new(build_irrep(env.lie(), &[int(1)]).unwrap());
    let mut ok = 0;
    let mut total = 0;
    for n in [2, 3] {
        let rep = TensorRep::of_irreps(&vec![v1.clone(); n]);
        let g = to_complex(&rep.hermitian_gram());
        let labels: Vec<String> = (1..=n).map(|i| format!("H{i}")).collect();
        for _ in 0..20 {
            let z = random_distinct(&mut r, n, 5, 4);
            let chi = vec![random_nonzero(&mut r, 3, 4)];
            let h = inhomogeneous(&env, &z, &chi).unwrap();
            let f = CommutingFamily::from_elements(&rep, &h.elements, labels.clone(), None, tol).unwrap();
            let mut good = f.is_normal_family(&g).unwrap();
            for w in rep.weights() {
                let rows = rep.weight_space(&w);
                let sp = f.restrict(&rows).unwrap().joint_eigenbasis(1).unwrap();
                good &= sp.simple && sp.residual_max <= 1e-9 && f.restrict(&rows).unwrap().is_normal_family(&sub_form(&g, &rows)).unwrap();
            }
            good &= f.is_cyclic(&CVec::from_element(rep.dim(), Complex64::new(1.0, 0.0)), Some(rep.dim()));
            ok += good as usize;
            total += 1;
        }
    }
    verdict(ok == total, format!("{ok}/{total} configurations normal, simple per weight space, cyclic"))
}

fn circle(t: f64) -> Complex64 {
    Complex64::new((1.0 - t * t) / (1.0 + t * t), 2.0 * t / (1.0 + t * t))
}

/// Configurations (out of 10) normal and simple on every weight space, per convention.
fn compact_runs(conv: CompactConvention) -> usize {
    let env = sl(2);
    let tol = Tolerance::default();
    let mut r = rng(9);
    let mut ok = 0;
    for k in 0..10 {
        let second = if k % 2 == 0 { 1 } else { 2 };
        let rep = TensorRep::of_irreps(&[
            Arc::new(build_irrep(env.lie(), &[int(1)]).unwrap()),
            Arc::new(build_irrep(env.lie(), &[int(second)]).unwrap()),
        ]);
        let g = to_complex(&rep.hermitian_gram());
        let ts = random_distinct(&mut r, 2, 4, 5);
        let z: Vec<Complex64> = ts.iter().map(|t| circle(to_f64(t))).collect();
        let imag = vec![to_f64(&random_nonzero(&mut r, 2, 5))];
        let mut good = true;
        for w in rep.weights() {
            let rows = rep.weight_space(&w);
            let theta = compact_theta(&env, &w, &imag, conv).unwrap();
            let mats = trig_matrices(&env, &rep, &z, &theta, &rows).unwrap();
            let f = CommutingFamily::new(mats, vec!["H1".into(), "H2".into()], tol).unwrap();
            let sp = f.joint_eigenbasis(1).unwrap();
            good &= f.is_normal_family(&sub_form(&g, &rows)).unwrap() && sp.simple && sp.residual_max <= 1e-9;
        }
        ok += good as usize;
    }
    ok
}

fn c9_compact() -> Verdict {
    let minus = compact_runs(CompactConvention::MinusHalfMu);
    let plus = compact_runs(CompactConvention::PlusHalfMu);
    let rho = compact_runs(CompactConvention::RhoPlusHalfMu);
    let winner = match (minus == 10, plus == 10) {
        (true, _) => "θ - μ/2",
        (_, true) => "θ + μ/2",
        _ => "none",
    };
    verdict(
        minus == 10 || plus == 10,
        format!("θ - μ/2 imaginary: {minus}/10, θ + μ/2 imaginary: {plus}/10, winner: {winner}; diagnostic: θ + ρ + μ/2 imaginary: {rho}/10"),
    )
}

fn c10_monodromy() -> Verdict {
    let env = sl(2);
    let tol = Tolerance::default();
    let v1 = Arc::new(build_irrep(env.lie(), &[int(1)]).unwrap());
    let rep = TensorRep::of_irreps(&[v1.clone(), v1]);
    let ex = exchange_loop(&env, &rep, &[q(1, 1)], tol).unwrap();
    let m = monodromy_permutation(&ex, 16, 0).unwrap();
    let m2 = monodromy_permutation(&ex, 32, 0).unwrap();
    let back = monodromy_permutation(there_and_back(&ex), 32, 0).unwrap();
    let constant = monodromy_permutation(|_| ex(0.3), 8, 0).unwrap();
    let involution = m.compose(&m).iter().enumerate().all(|(a, &b)| a == b);
    verdict(
        constant.is_identity() && back.is_identity() && involution && m.permutation == m2.permutation,
        format!(
            "exchange {:?}, doubled {:?}, there-and-back {:?}, constant {:?}",
            m.permutation, m2.permutation, back.permutation, constant.permutation
        ),
    )
}

fn c11_iota0() -> Verdict {
    let env = sl(2);
    let mut r = rng(11);
    let mut ok = 0;
    for k in 0..10 {
        let n = 2 + k % 2;
        let z = random_distinct(&mut r, n + 1, 6, 5);
        let (img, want) = iota0_span(&env, &z).unwrap();
        ok += img.same_as(&want) as usize;
    }
    verdict(ok == 10, format!("{ok}/10 spans equal"))
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, u64, fn() -> Verdict)> = vec![
        ("1 exact commutativity", 60, c1_commutativity),
        ("2 psi reduction matches trig", 10, c2_psi),
        ("3 Verma action matching", 30, c3_verma),
        ("4 degeneration limit", 60, c4_degeneration),
        ("5 moduli validators", 10, c5_moduli),
        ("6 holonomy correspondence", 20, c6_holonomy),
        ("7 boundary flatness", 60, c7_flatness),
        ("8 simple spectrum, split inhomogeneous", 30, c8_simple_split),
        ("9 compact trigonometric", 30, c9_compact),
        ("10 monodromy sanity", 60, c10_monodromy),
        ("11 iota0 invariance", 20, c11_iota0),
    ];
    let mut failed = Vec::new();
    for (name, budget, f) in criteria {
        let t = Instant::now();
        let v = f();
        let el = t.elapsed();
        let pass = v.pass && el <= Duration::from_secs(budget);
        println!(
            "{} criterion {name}: {:.2}s / {budget}s; {}",
            if pass { "PASS" } else { "FAIL" },
            el.as_secs_f64(),
            v.note
        );
        if !pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
