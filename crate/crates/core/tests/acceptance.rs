//! Acceptance criteria, one line each. Exact comparisons throughout.

mod common;

use std::fmt::Debug;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gw0::action::{act_infinitesimal, act_lower};
use gw0::axioms::{verify, AxiomReport, CheckResult, Checks, TrrEntry};
use gw0::frobenius::{
    check_frobenius_invariance, check_wdvv, structure_constants, InvarianceReport, StructureTensor, WdvvReport,
};
use gw0::loopgroup::{check_symplectic, exp_lie, w_matrices, EndSeries, GroupElement, LieElement, WMatrixFamily};
use gw0::matrix::Matrix;
use gw0::potential::{points_potential, Potential};
use gw0::rank1::{
    even_from_odd, extract_cube, extract_extended, point_potential, psi_intersection, rank1_coords, rank1_from_coords,
    reconstruct_from_c3, LinearForm, OrbitCoords, Rank1Report, Relation,
};
use gw0::rational::{format_rational, int, parse_rational, rat, Rational};
use gw0::series::{FormalSeries, Frame, Monomial, Var, VarId};
use num_traits::Zero;
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use common::*;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_point_potential() -> Outcome {
    let f = point_potential(8, 6);
    let fr = f.frame_arc().clone();
    let q0 = FormalSeries::variable(fr, 6, 8, Var::q(1, 0)).unwrap();
    ensure(f.c(3).raw_terms() == q0.pow(3).scale(&rat(-1, 6)).raw_terms(), || "c_3 is not -q_0^3/6".into())?;
    for n in 0..3 {
        ensure(f.c(n).is_zero(), || format!("c_{n} is not zero"))?;
    }
    let mono = Monomial::from_factors([(VarId::new(1, 0), 4), (VarId::new(1, 2), 1)]);
    let c = f.series().coeff(-3, &mono);
    ensure(c == rat(-1, 24), || format!("q_0^4 q_2 / x^3 has coefficient {c}"))?;
    let rep = verify(f.series(), Checks { dilaton: true, string: true, trr: true, cone: false }).unwrap();
    ensure(rep.pass(), || format!("axiom sweep failed: {:?}", rep.failing_trr().next()))?;
    // k in 0..6, (l, m) with l <= m in 0..=6
    ensure(rep.trr.len() == 6 * 28, || format!("{} TRR relations checked", rep.trr.len()))?;
    ensure(rep.region == 8, || format!("reliable degree {}", rep.region))
}

fn each_vector(n: usize, total: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() == n {
        if total == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for k in 0..=total {
        cur.push(k);
        each_vector(n, total - k, cur, out);
        cur.pop();
    }
}

fn c2_psi_oracle() -> Outcome {
    let mut count = 0;
    for n in 3..=9usize {
        for total in [n as u32 - 3, n as u32 - 2] {
            let mut vs = Vec::new();
            each_vector(n, total, &mut Vec::new(), &mut vs);
            for v in vs {
                let got = psi_intersection(&v).map_err(|e| e.to_string())?;
                let want = psi_by_string(&v);
                ensure(got == want, || format!("<tau {v:?}> = {got}, string recursion gives {want}"))?;
                count += 1;
            }
        }
    }
    ensure(count > 5000, || format!("only {count} vectors checked"))
}

fn c3_symplectic_algebra() -> Outcome {
    let mut r = rng(3);
    let frames = [rank_one(), diag_frame(), hyperbolic_frame()];
    for case in 0..20 {
        let fr = &frames[case % 3];
        let a = random_lie(&mut r, fr, 1, 6);
        let order = 13;
        let g = exp_lie(&a, order);
        let rep = check_symplectic(g.series());
        ensure(rep.pass, || format!("case {case}: exp is not symplectic: {rep:?}"))?;
        ensure(g.invert() == exp_lie(&a.neg(), order), || format!("case {case}: inverse is not exp(-a)"))?;
        let w = w_matrices(&g, 6).map_err(|e| e.to_string())?;
        let oracle = bivariate_w(&g, 6);
        for (k, row) in oracle.iter().enumerate() {
            for (l, want) in row.iter().enumerate() {
                ensure(w.get(k, l) == want, || format!("case {case}: W_({k},{l}) differs from the oracle"))?;
            }
        }
        ensure(w.check_adjoint_symmetry().is_none(), || format!("case {case}: W* symmetry fails"))?;
    }
    Ok(())
}

fn c4_action_preserves() -> Outcome {
    let mut r = rng(4);
    for f in [point_potential(6, 4), points_potential(2, 6, 4).unwrap()] {
        let fr = f.frame_arc().clone();
        for case in 0..10 {
            let s = exp_lie(&random_lie(&mut r, &fr, 2, 9), 9);
            let h = act_lower(&s, &f).map_err(|e| e.to_string())?;
            let rep = verify(h.series(), Checks { dilaton: true, string: true, trr: true, cone: false }).unwrap();
            ensure(rep.pass() && h.reliable() == 6, || {
                format!("N = {} case {case}: image fails ({:?}, reliable {})", fr.dim(), rep.failing_trr().next(), h.reliable())
            })?;
        }
    }
    Ok(())
}

fn c5_quantization() -> Outcome {
    let mut r = rng(5);
    let inputs = [point_potential(5, 4), points_potential(2, 4, 3).unwrap()];
    for f in &inputs {
        let fr = f.frame_arc().clone();
        for case in 0..3 {
            let a = random_lie(&mut r, &fr, 2, 2 * f.zmax() + 1);
            let inf = act_infinitesimal(&a, f).map_err(|e| e.to_string())?;
            let c = inf.compare_reliable(&epsilon_oracle(&a, f));
            ensure(c.equal && c.checked_deg >= 3, || format!("N = {} case {case}: {c:?}", fr.dim()))?;
        }
    }
    let mut verified = vec![point_potential(8, 6), points_potential(3, 5, 3).unwrap()];
    let s = exp_lie(&random_lie(&mut r, &inputs[1].frame_arc().clone(), 2, 7), 7);
    verified.push(act_lower(&s, &inputs[1]).unwrap());
    for f in &verified {
        let rep = verify(f.series(), Checks { string: true, ..Checks::NONE }).unwrap();
        ensure(rep.pass(), || "input does not satisfy the string equation".into())?;
        let id = LieElement::new(f.frame_arc().clone(), 1, [(1, Matrix::identity(f.dim()))]).unwrap();
        let v = act_infinitesimal(&id, f).map_err(|e| e.to_string())?;
        ensure(v.vanishes_on_reliable(), || format!("z^-1 direction gives {:?}", v.first_reliable_term()))?;
    }
    Ok(())
}

fn strip_stages(f: &Potential) -> Outcome {
    let m = f.zmax();
    let mut cur = f.clone();
    for k in 1..=(m - 1) / 2 {
        let j = 2 * k + 1;
        let form = extract_cube(&cur).map_err(|e| format!("stage {k}: {e}"))?;
        ensure(form.alpha(2).is_zero(), || format!("stage {k}: alpha_2 != 0"))?;
        for n in 2..=m / 2 {
            let want = even_from_odd(&|i| form.alpha(i), n);
            ensure(form.alpha(2 * n) == want, || format!("stage {k}: alpha_{} is not forced", 2 * n))?;
        }
        for i in 3..j {
            ensure(form.alpha(i).is_zero(), || format!("stage {k}: alpha_{i} survived stripping"))?;
        }
        let strip = LieElement::new(cur.frame_arc().clone(), j, [(j, Matrix::scalar(1, form.alpha(j)))]).unwrap();
        cur = act_lower(&exp_lie(&strip, 2 * m + 1), &cur).unwrap();
    }
    let rest = extract_cube(&cur).map_err(|e| e.to_string())?;
    ensure(rest.restrict(m) == LinearForm::unit(), || format!("after stripping: {rest:?}"))
}

fn c6_rank1_classification() -> Outcome {
    let mut r = rng(6);
    let (d, m) = (6, 6);
    for case in 0..10 {
        let depth = r.random_range(1..=2);
        let a: Vec<Rational> = (0..depth).map(|_| small_rational(&mut r)).collect();
        let coords = OrbitCoords::new(a.clone());
        let f = rank1_from_coords(&coords, d, m).map_err(|e| e.to_string())?;
        let back = rank1_coords(&f).map_err(|e| e.to_string())?;
        ensure(back == coords, || format!("case {case}: {a:?} came back as {back:?}"))?;
        strip_stages(&f).map_err(|e| format!("case {case}: {e}"))?;
        let l = extract_extended(&f).map_err(|e| e.to_string())?;
        let g = reconstruct_from_c3(&l, d, m).map_err(|e| e.to_string())?;
        for n in 0..=d {
            ensure(g.c(n).raw_terms() == f.c(n).raw_terms(), || format!("case {case}: stratum c_{n} differs"))?;
        }
    }
    Ok(())
}

fn c7_trr_equivalence() -> Outcome {
    let (d, m) = (6, 5);
    let mut forms = vec![
        LinearForm::unit(),
        LinearForm::new([(3, rat(1, 2))]).unwrap(),
        LinearForm::new([(3, int(1)), (5, rat(-2, 3))]).unwrap(),
        LinearForm::new([(5, rat(3, 2))]).unwrap(),
    ];
    let f = rank1_from_coords(&OrbitCoords::new(vec![rat(-1, 3), rat(1, 2)]), d, m).unwrap();
    forms.push(extract_extended(&f).unwrap());
    for l in forms {
        let g = reconstruct_from_c3(&l, d, m).map_err(|e| e.to_string())?;
        let rep = verify(g.series(), Checks::ALL).unwrap();
        ensure(rep.pass() && !rep.trr.is_empty(), || format!("{l:?}: {:?}", rep.failing_trr().next()))?;
    }
    Ok(())
}

fn c8_frobenius() -> Outcome {
    for f in [point_potential(8, 6), points_potential(2, 6, 4).unwrap()] {
        let rep = check_wdvv(&f);
        ensure(rep.pass, || format!("WDVV fails for N = {}: {rep:?}", f.dim()))?;
    }
    let f = points_potential(2, 6, 4).unwrap();
    let before = structure_constants(&f).map_err(|e| e.to_string())?;
    let mut r = rng(8);
    for case in 0..5 {
        let s = exp_lie(&random_lie(&mut r, f.frame_arc(), 2, 9), 9);
        let rep = check_frobenius_invariance(&s, &f).map_err(|e| e.to_string())?;
        ensure(rep.pass && rep.before == before, || format!("case {case}: structure constants moved"))?;
    }
    Ok(())
}

fn c9_positive_powers() -> Outcome {
    let mut r = rng(9);
    let frames = [rank_one(), diag_frame(), hyperbolic_frame()];
    for case in 0..100 {
        let fr = frames[case % 3].clone();
        let order = 4;
        let g = exp_lie(&random_lie(&mut r, &fr, 1, order), order);
        let mut coeffs: Vec<(i64, Matrix)> = g.series().coeffs().iter().map(|(k, v)| (*k, v.clone())).collect();
        let p = r.random_range(1..=3);
        let mut m = random_matrix(&mut r, fr.dim());
        while m.is_zero() {
            m = random_matrix(&mut r, fr.dim());
        }
        coeffs.push((p, m));
        let s = EndSeries::from_coeffs(fr, order, coeffs).unwrap();
        ensure(!check_symplectic(&s).pass, || format!("case {case}: positive power z^{p} passed"))?;
        ensure(GroupElement::from_series(s).is_err(), || format!("case {case}: accepted as a group element"))?;
    }
    Ok(())
}

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + Debug>(v: &T) -> Outcome {
    let text = serde_json::to_string(v).map_err(|e| e.to_string())?;
    let back: T = serde_json::from_str(&text).map_err(|e| format!("{e} in {text}"))?;
    ensure(&back == v, || format!("value changed: {text}"))?;
    let again = serde_json::to_string(&back).unwrap();
    ensure(again == text, || format!("bytes changed: {text} vs {again}"))
}

fn random_series(r: &mut impl Rng, fr: &Arc<Frame>, weight_two: bool) -> FormalSeries {
    let (zmax, degcap) = (3, 5);
    let mut s = FormalSeries::zero(fr.clone(), zmax, degcap);
    for _ in 0..r.random_range(0..8) {
        let deg = r.random_range(0..=degcap);
        let factors: Vec<(VarId, u32)> = (0..deg)
            .map(|_| loop {
                let v = VarId::new(r.random_range(1..=fr.dim() as u16), r.random_range(0..=zmax as u16));
                if !v.is_distinguished() {
                    break (v, 1);
                }
            })
            .collect();
        let e = if weight_two { 2 - deg as i64 } else { r.random_range(-4..=3) };
        s.add_term(e, Monomial::from_factors(factors), nonzero_rational(r)).unwrap();
    }
    s.with_reliable(r.random_range(-1..=degcap as i64))
}

fn c10_serialization() -> Outcome {
    let mut r = rng(10);
    let frames = [rank_one(), diag_frame(), hyperbolic_frame()];
    for case in 0..100 {
        let fr = frames[case % 3].clone();
        let n = fr.dim();
        let x = Rational::new(r.random_range(-1000i64..1000).into(), r.random_range(1i64..1000).into());
        ensure(parse_rational(&format_rational(&x)).unwrap() == x, || format!("rational {x}"))?;
        round_trip(&random_matrix(&mut r, n))?;
        round_trip(&(*fr).clone())?;
        round_trip(&random_series(&mut r, &fr, false))?;
        round_trip(&Potential::new(random_series(&mut r, &fr, true)).unwrap())?;
        let a = random_lie(&mut r, &fr, 1, 5);
        round_trip(&a)?;
        let g = exp_lie(&a, 7);
        round_trip(&g)?;
        round_trip::<WMatrixFamily>(&w_matrices(&g, 3).unwrap())?;
        let mut picks: Vec<(usize, Rational)> = Vec::new();
        for i in 2..8 {
            if r.random_bool(0.5) {
                picks.push((i, nonzero_rational(&mut r)));
            }
        }
        let l = LinearForm::new(picks).unwrap();
        round_trip(&l)?;
        round_trip(&OrbitCoords::new((0..r.random_range(0..4)).map(|_| small_rational(&mut r)).collect()))?;
        let t = StructureTensor::from_components(
            (0..n).map(|_| (0..n).map(|_| (0..n).map(|_| small_rational(&mut r)).collect()).collect()).collect(),
        )
        .unwrap();
        round_trip(&t)?;
        let check = CheckResult {
            pass: r.random_bool(0.5),
            checked_deg: r.random_range(-1..8),
            residual_terms: r.random_range(0..5),
            first_mismatch: r.random_bool(0.5).then(|| "q0^1".to_string()),
        };
        round_trip(&check)?;
        let entry = TrrEntry {
            k: r.random_range(0..4),
            l: r.random_range(0..4),
            m: r.random_range(0..4),
            alpha: 1,
            beta: r.random_range(1..3),
            gamma: 2,
            pass: r.random_bool(0.5),
            checked_deg: r.random_range(-1..8),
        };
        round_trip(&AxiomReport {
            dilaton: Some(check.clone()),
            string: r.random_bool(0.5).then(|| check.clone()),
            cone: None,
            trr: vec![entry; r.random_range(0..3)],
            region: r.random_range(-1..8),
        })?;
        round_trip(&Rank1Report {
            relations: (0..r.random_range(0..4)).map(|i| Relation { name: format!("bebe({i},3)"), pass: r.random_bool(0.5) }).collect(),
        })?;
        round_trip(&WdvvReport {
            pass: r.random_bool(0.5),
            checked_deg: r.random_range(-1..6),
            quadruples: n.pow(4),
            failing: vec![[1, 2, 1, 2]; r.random_range(0..2)],
            trr_path_failing: vec![],
        })?;
        round_trip(&InvarianceReport { pass: true, before: t.clone(), after: t })?;
    }
    Ok(())
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("point potential fidelity", 60, c1_point_potential),
        ("psi oracle equivalence", 30, c2_psi_oracle),
        ("symplectic algebra", 60, c3_symplectic_algebra),
        ("action preserves the axioms", 300, c4_action_preserves),
        ("quantization consistency", 60, c5_quantization),
        ("rank-one classification", 300, c6_rank1_classification),
        ("TRR equivalence", 120, c7_trr_equivalence),
        ("Frobenius structure", 120, c8_frobenius),
        ("positive powers are never symplectic", 10, c9_positive_powers),
        ("serialization round trips", 10, c10_serialization),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(o) => o,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into())),
        };
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed < Duration::from_secs(*limit), || format!("took {elapsed:.1?}, limit {limit} s"))
        });
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({elapsed:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({elapsed:.2?}): {e}", i + 1);
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
