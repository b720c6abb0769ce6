//! End-to-end acceptance run against the bundled Hirota-Ramani problem.
//!
//! Prints one `criterion N: PASS|FAIL` line per criterion. A criterion is
//! made of named checks; it passes when all of them hold. A few checks
//! compare against reference expressions that are known to contain typos.
//! Those are listed in `KNOWN_DISCREPANCIES`. The test requires them to fail
//! and every other check to pass, so a change in either direction is noticed.

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use liesym::conslaw::{
    conservation_law, euler, find_multipliers, homotopy, homotopy_integrands, FluxPair, Multiplier, MultiplierAnsatz,
};
use liesym::detsolve::{classical_symmetries, collect_rows, in_span, invariance_residual};
use liesym::dsl::{parse_problem, Problem, HIROTA_RAMANI};
use liesym::expr::{equal_by_sampling, Coeff, Context, Expr, Symbol, Var};
use liesym::flows::{exponentiate, verify_flow};
use liesym::jet::{on_function, total_derivative, ProblemSpec};
use liesym::liealg::{combination_string, spectrum, LieAlgebra};
use liesym::linalg::{mat_scale, rank};
use liesym::nonclassical::{
    check_candidate, is_classical_lift, linear_ansatz_solve, nonclassical_determining, AugmentedSystem, Mode,
};
use liesym::reduce::{
    back_substitute, chart_from, chart_is_invariant, differential_invariant_residual, invariants, reduce_pde,
    InvariantChart,
};
use liesym::report::{run, Command, Config};
use liesym::vfield::VectorField;

/// (criterion, check) pairs whose reference data is misprinted.
const KNOWN_DISCREPANCIES: &[(usize, &str)] = &[
    (9, "printed tau=1 first determining expression"),
    (11, "printed flux pair for the u_xx multiplier modulo trivial fluxes"),
];

static ORACLE_CALLS: AtomicUsize = AtomicUsize::new(0);

/// Exact normal-form equality, confirmed by independent evaluation of both
/// sides at 20 random rational points.
fn same(a: &Expr, b: &Expr) -> bool {
    ORACLE_CALLS.fetch_add(1, Ordering::Relaxed);
    let normal = a == b;
    let sampled = equal_by_sampling(a, b, 20, 7);
    assert_eq!(normal, sampled, "normal form and point oracle disagree");
    normal
}

#[derive(Default)]
struct Checks(Vec<(String, bool)>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push((name.into(), ok));
    }
}

fn problem() -> Problem {
    parse_problem(HIROTA_RAMANI).unwrap()
}

fn ctx() -> Context {
    Context::default()
        .with_symbol(Symbol::group("s"))
        .with_symbol(Symbol::group("eps"))
        .with_symbol(Symbol::constant("c"))
}

fn p(s: &str) -> Expr {
    ctx().parse(s).unwrap()
}

fn op(s: &str) -> Expr {
    InvariantChart::ode_context("a").with_symbol(Symbol::constant("c")).parse(s).unwrap()
}

fn vf(xi: &str, eta: &str, phi: &str) -> VectorField {
    VectorField::scalar(p(xi), p(eta), p(phi))
}

fn basis() -> Vec<VectorField> {
    vec![vf("1", "0", "0"), vf("0", "1", "0"), vf("0", "0", "1/a"), vf("-x", "3*t", "2*t + u - 2*x/a")]
}

fn algebra() -> LieAlgebra {
    LieAlgebra::new(basis(), (1..=4).map(|i| format!("v{i}")).collect(), &ctx()).unwrap()
}

fn q(n: i64) -> Coeff {
    Coeff::from_int(n)
}

fn spec() -> ProblemSpec {
    problem().spec
}

fn delta() -> Expr {
    spec().equations[0].lhs.clone()
}

fn criterion_1(c: &mut Checks) {
    let pr = problem();
    c.add("declared basis matches the reference fields", pr.basis.iter().zip(basis()).all(|((_, a), b)| *a == b));
    for degree in [1, 2] {
        let space = classical_symmetries(&pr.spec, degree).unwrap();
        c.add(format!("degree {degree}: dimension 4"), space.dim() == 4);
        for (k, v) in basis().iter().enumerate() {
            c.add(format!("degree {degree}: v{} in span", k + 1), in_span(&space.fields, v).is_some());
        }
        let all_zero = space
            .fields
            .iter()
            .chain(basis().iter())
            .all(|f| same(&invariance_residual(&pr.spec, f).unwrap(), &Expr::zero()));
        c.add(format!("degree {degree}: invariance residuals vanish"), all_zero);
    }
}

fn criterion_2(c: &mut Checks) {
    let g = algebra();
    let names_ctx = ctx().with_symbol(Symbol::constant("v1"));
    let expected = [
        ["0", "0", "0", "-v1 - 2*v3"],
        ["0", "0", "0", "3*v2 + 2*a*v3"],
        ["0", "0", "0", "v3"],
        ["v1 + 2*v3", "-3*v2 - 2*a*v3", "-v3", "0"],
    ];
    for i in 0..4 {
        for j in 0..4 {
            let got = combination_string(&g.consts[i][j], &g.names, &names_ctx);
            c.add(format!("[v{},v{}] = {}", i + 1, j + 1, expected[i][j]), got == expected[i][j]);
        }
    }
}

fn criterion_3(c: &mut Checks) {
    let g = algebra();
    c.add("derived series [4, 3, 0]", g.derived_series() == vec![4, 3, 0]);
    c.add("solvable", g.is_solvable());
    let r = run(Command::Algebra, &problem(), &Config::default()).unwrap();
    c.add("report verified", r.verified);
    c.add(
        "first derived algebra mismatch emitted as a diagnostic",
        r.diagnostics.iter().any(|d| d.contains("dimension 3")),
    );
}

fn criterion_4(c: &mut Checks) {
    let g = algebra();
    let eps = Symbol::group("eps");
    let e = Var::Sym(eps.clone());
    // rows: Ad(exp(eps v_i)) v_j to first order, as coordinate vectors
    let table: [[[&str; 4]; 4]; 4] = [
        [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["eps", "0", "2*eps", "1"]],
        [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "-3*eps", "-2*a*eps", "1"]],
        [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "-eps", "1"]],
        [
            ["1 - eps", "0", "-2*eps", "0"],
            ["0", "1 + 3*eps", "2*a*eps", "0"],
            ["0", "0", "1 + eps", "0"],
            ["0", "0", "0", "1"],
        ],
    ];
    let (e1, e2) = (p("s"), p("eps"));
    for i in 0..4 {
        let m = g.adjoint_exp(i, &eps, None).unwrap();
        let mut first_order = true;
        for j in 0..4 {
            let mut ej = vec![q(0); 4];
            ej[j] = q(1);
            for (k, w) in m.apply(&ej).iter().enumerate() {
                let w0 = w.subs1(e.clone(), Expr::zero()).unwrap();
                let w1 = w.partial(&e).subs1(e.clone(), Expr::zero()).unwrap();
                let lin = &w0 + &(&w1 * &Expr::sym(eps.clone()));
                first_order &= same(&lin, &p(table[i][j][k]));
            }
        }
        c.add(format!("Ad(exp(eps v{})) first order", i + 1), first_order);
        let a = m.at(&e1).unwrap();
        let b = m.at(&e2).unwrap();
        let ab = m.at(&(&e1 + &e2)).unwrap();
        let prod = liesym::liealg::expr_mat_mul(&a, &b);
        c.add(
            format!("group law for v{}", i + 1),
            prod.iter().flatten().zip(ab.iter().flatten()).all(|(x, y)| same(x, y)),
        );
        let minus_ad = mat_scale(&g.ad_matrix(i), &-Coeff::one());
        let mut deriv = true;
        for r in 0..4 {
            for k in 0..4 {
                let d = m.entries[r][k].partial(&e).subs1(e.clone(), Expr::zero()).unwrap();
                deriv &= same(&d, &Expr::constant(minus_ad[r][k].clone()));
            }
        }
        c.add(format!("d/deps at 0 equals -ad(v{})", i + 1), deriv);
        if i < 3 {
            c.add(format!("series terminates for v{}", i + 1), m.is_polynomial());
        } else {
            let mut ev: Vec<i64> = spectrum(&minus_ad)
                .unwrap()
                .iter()
                .filter(|(r, _)| *r.numer() != 0.into())
                .map(|(r, _)| r.to_integer().try_into().unwrap())
                .collect();
            ev.sort();
            c.add("v4 closed form uses exponentials", !m.is_polynomial() && !m.truncated);
            c.add("v4 nonzero eigenvalues -1, 1, 3", ev == vec![-1, 1, 3]);
        }
    }
}

fn criterion_5(c: &mut Checks) {
    let g = algebra();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let rational = |rng: &mut ChaCha8Rng| {
        let n: i64 = rng.gen_range(-9..=9);
        let d: i64 = rng.gen_range(1..=7);
        Coeff::from_rational(liesym::expr::rat(n, d))
    };
    let target = vec![q(0), q(0), q(0), q(1)];
    let (mut reached, mut replayed) = (true, true);
    for _ in 0..50 {
        let mut v: Vec<Coeff> = (0..3).map(|_| rational(&mut rng)).collect();
        let mut a4 = rational(&mut rng);
        while a4.is_zero() {
            a4 = rational(&mut rng);
        }
        v.push(a4);
        let r = g.orbit_reduce(&v).unwrap();
        reached &= r.representative == target;
        replayed &= g.apply_word(&v, &r.word).unwrap() == r.representative;
    }
    c.add("50 random vectors with a4 != 0 reach v4", reached);
    c.add("reduction words replay to the representative", replayed);
    let alpha = Coeff::from_rational(liesym::expr::rat(2, 3));
    let beta = Coeff::from_rational(liesym::expr::rat(-5, 2));
    for (name, v) in [
        ("alpha v1 + beta v2 + v3", vec![alpha.clone(), beta, q(1), q(0)]),
        ("alpha v1 + v2", vec![alpha, q(1), q(0), q(0)]),
        ("v1", vec![q(1), q(0), q(0), q(0)]),
    ] {
        let r = g.orbit_reduce(&v).unwrap();
        c.add(format!("{name} returned unchanged"), r.representative == v);
        c.add(format!("{name} word replays"), g.apply_word(&v, &r.word).unwrap() == r.representative);
    }
}

fn criterion_6(c: &mut Checks) {
    let cx = ctx();
    let s = Symbol::group("s");
    let expected = [
        ["x + s", "t", "u"],
        ["x", "t + s", "u"],
        ["x", "t", "u + s/a"],
        ["x*exp(-s)", "t*exp(3*s)", "t*exp(3*s) + x/a*exp(-s) + (u - t - x/a)*exp(s)"],
    ];
    let hr = delta();
    let sol = p("x/(a*(1 - a)) + t/a + c");
    c.add("explicit solution satisfies the equation", same(&on_function(&hr, "u", &sol, &cx).unwrap(), &Expr::zero()));
    for (i, v) in basis().iter().enumerate() {
        let g = exponentiate(v, &cx, &s).unwrap();
        let maps_ok = g.maps.iter().zip(expected[i]).all(|(m, e)| same(m, &p(e)));
        c.add(format!("G{} maps", i + 1), maps_ok);
        c.add(format!("G{} verify_flow", i + 1), verify_flow(v, &g, &cx).unwrap());
        let tf = liesym::flows::transform_solution(&g, &sol, &cx).unwrap();
        c.add(
            format!("G{} transported solution has zero residual", i + 1),
            same(&on_function(&hr, "u", &tf, &cx).unwrap(), &Expr::zero()),
        );
    }
}

fn criterion_7(c: &mut Checks) {
    let sp = spec();
    let cx = &sp.ctx;
    let rows = [
        ("v1", vf("1", "0", "0"), "t", "u", "w_y"),
        ("v2", vf("0", "1", "0"), "x", "u", "a*w_y"),
        ("v1 + a*v3", vf("1", "0", "1"), "t", "u - x", "(1 - a)*w_y + a"),
        ("v2 + v3", vf("0", "1", "1/a"), "x", "u - t/a", "(a - 1)*w_y + 1/a"),
        ("v1 + v2", vf("1", "1", "0"), "x - t", "u", "-w_y + w_{y,y,y} + a*w_y*(1 + w_y)"),
    ];
    for (name, v, y, w, ode) in rows {
        let ch = invariants(&v, cx).unwrap();
        c.add(format!("{name} chart"), same(&ch.y, &p(y)) && same(&ch.w, &p(w)));
        let red = reduce_pde(&sp, &ch).unwrap();
        c.add(format!("{name} reduced equation"), same(&red.ode, &op(ode)));
    }
    let ch = invariants(&vf("0", "1", "1/a"), cx).unwrap();
    let u = back_substitute(&sp, &ch, &op("-y/(a*(a - 1)) + c")).unwrap();
    c.add("back-substitution gives the explicit solution", same(&u, &p("x/(a*(1 - a)) + t/a + c")));
    c.add(
        "explicit solution verified against the equation",
        same(&on_function(&delta(), "u", &u, &ctx()).unwrap(), &Expr::zero()),
    );
    let v4 = &basis()[3];
    let ch4 = invariants(v4, cx).unwrap();
    c.add("v4 chart annihilated", chart_is_invariant(v4, &ch4, cx));
    c.add("v4 reduction is autonomous", reduce_pde(&sp, &ch4).is_ok());
    let printed =
        chart_from(p("x*t^(1/3)"), p("(u - 2*x/a)*t^(-1/3) + t^(2/3)"), &Var::jet("u", 0, 0), 1).unwrap();
    c.add("printed v4 chart fails annihilation", !chart_is_invariant(v4, &printed, cx));
    c.add("printed v4 chart gives no autonomous reduction", reduce_pde(&sp, &printed).is_err());
    let cfg = Config {
        generators: vec!["v4".into()],
        chart: Some("x*t^(1/3), (u - 2*x/a)*t^(-1/3) + t^(2/3)".into()),
        ..Config::default()
    };
    let r = run(Command::Reduce, &problem(), &cfg).unwrap();
    c.add(
        "report flags the printed v4 chart",
        !r.verified && r.diagnostics.iter().any(|d| d.contains("not annihilated by v4")),
    );
}

fn criterion_8(c: &mut Checks) {
    let cx = ctx();
    let b = basis();
    let zero_residual = |v: &VectorField, inv: &str, n: u32| {
        same(&differential_invariant_residual(v, &p(inv), n, &cx).unwrap(), &Expr::zero())
    };
    let ordinary = [["t", "u"], ["x", "u"], ["x", "t"]];
    for (i, v) in b.iter().take(3).enumerate() {
        let mut ok = ordinary[i].iter().all(|e| zero_residual(v, e, 0));
        ok &= ["u_x", "u_t"].iter().all(|e| zero_residual(v, e, 1));
        ok &= ["u_{x,x}", "u_{x,t}", "u_{t,t}"].iter().all(|e| zero_residual(v, e, 2));
        c.add(format!("v{} invariants", i + 1), ok);
    }
    let v4 = &b[3];
    for (inv, n) in [
        ("t*x^3", 0),
        ("(-x/a - t + u)*x", 0),
        ("(u_t - 1)/x^2", 1),
        ("x^3*u_{x,x}", 2),
        ("u_{x,t}/x", 2),
        ("u_{t,t}/x^5", 2),
    ] {
        c.add(format!("v4: {inv}"), zero_residual(v4, inv, n));
    }
    let r = differential_invariant_residual(v4, &p("x^2*u_x - 1/a"), 1, &cx).unwrap();
    c.add("printed x^2*u_x - 1/a fails with residual -2*x^2/a", same(&r, &p("-2*x^2/a")));
    c.add("corrected x^2*(u_x - 1/a) passes", zero_residual(v4, "x^2*(u_x - 1/a)", 1));
    let cfg = Config { generators: vec!["v4".into()], candidates: vec!["x^2*u_x - 1/a".into()], ..Config::default() };
    let rep = run(Command::Invariants, &problem(), &cfg).unwrap();
    c.add("report flags the printed invariant", !rep.verified && !rep.diagnostics.is_empty());
}

const TAU1_FIRST_PRINTED: &str = "(2*(u_t - 1/2)*u_x^2*a - u_t*(u_x - v_x))*xi_u - u_t*psi_u - psi_t \
    + ((1 - 2*u_t)*a*u_x + u_t)*phi_u + (u_x*(1 - u_t)*a - u_t)*psi_v \
    + (-u_x^3*(u_t - 1)*a^2 + 2*(u_t - 1/2)*u_x^2*a - u_t*(u_x - v_x))*xi_v \
    + (u_x^2*(u_t - 1)*a^2 + ((1 - 2*u_t)*u_x - v_x*(u_t - 1))*a + u_t)*phi_v \
    + (1 - a*u_x)*phi_t - a*(u_t - 1)*phi_x + u_x*(u_t - 1)*a*xi_x + (u_x^2*a - u_x + v_x)*xi_t";

const TAU1_SECOND: &str = "-psi - u_x*xi_{x,x} - 2*u_x^2*xi_{x,u} + u_x^2*phi_{u,u} - u_x^3*xi_{u,u} + u_{x,x}*phi_u \
    - 2*u_{x,x}*xi_x + v_x^2*phi_{v,v} + v_{x,x}*phi_v + 2*u_x*phi_{x,u} + 2*v_x*phi_{x,v} - 2*u_x*v_x*xi_{x,v} \
    + 2*u_x*v_x*phi_{u,v} - 2*u_x^2*v_x*xi_{u,v} - 3*u_{x,x}*u_x*xi_u - 2*u_{x,x}*v_x*xi_v - u_x*v_x^2*xi_{v,v} \
    - v_{x,x}*u_x*xi_v + phi_{x,x}";

const TAU0_FIRST: &str = "(u_x^2*(u_t - 1)*a^2 + ((-v_x - 2*u_x)*u_t + v_x + u_x)*a + u_t)*phi_v \
    + ((u_x - 2*u_x*u_t)*a + u_t)*phi_u + (u_x*(u_t - 1)*a - u_t)*psi_v \
    + (1 - a*u_x)*phi_t - a*(u_t - 1)*phi_x - psi_t - u_t*psi_u";

const TAU0_SECOND: &str = "-psi + phi_{x,x} + 2*u_x*phi_{x,u} + 2*phi_{x,v}*v_x + u_x^2*phi_{u,u} + 2*u_x*v_x*phi_{u,v} \
    + u_{x,x}*phi_u + v_x^2*phi_{v,v} + v_{x,x}*phi_v";

fn criterion_9(c: &mut Checks) {
    let sys = AugmentedSystem::from_scalar(&spec(), "v").unwrap();
    let g = sys.generic_context();
    let gp = |s: &str| g.parse(s).unwrap();
    let t1 = nonclassical_determining(&sys, Mode::Tau1).unwrap();
    let t0 = nonclassical_determining(&sys, Mode::Tau0).unwrap();
    c.add(KNOWN_DISCREPANCIES[0].1, same(&t1[0], &gp(TAU1_FIRST_PRINTED)));
    // the only difference is the psi_v coefficient, whose printed form
    // disagrees with -psi_v * v_t after v_t is eliminated
    c.add(
        "tau=1 first expression differs from the printed one only in the psi_v sign",
        same(&(&t1[0] - &gp(TAU1_FIRST_PRINTED)), &gp("2*a*u_x*(u_t - 1)*psi_v")),
    );
    c.add("tau=1 second expression", same(&t1[1], &gp(TAU1_SECOND)));
    c.add("tau=0 first expression", same(&t0[0], &gp(TAU0_FIRST)));
    c.add("tau=0 second expression", same(&t0[1], &gp(TAU0_SECOND)));
    let cx = sys.ctx();
    let field = VectorField::new(
        cx.parse("1").unwrap(),
        Expr::zero(),
        sys.spec.deps(),
        vec![cx.parse("1").unwrap(), Expr::zero()],
    );
    let r = check_candidate(&sys, &field, Mode::Tau0).unwrap();
    c.add("d/dx + d/du passes with zero residuals", r.passes() && r.residuals.iter().all(|e| same(e, &Expr::zero())));
    let sol = linear_ansatz_solve(&sys, Mode::Tau1, Config::default().degree).unwrap();
    let scalar = spec();
    let mut only_classical = sol.particular.is_some();
    if let Some(part) = &sol.particular {
        only_classical &= is_classical_lift(&sys, &scalar, part).unwrap();
        for h in &sol.homogeneous {
            only_classical &= is_classical_lift(&sys, &scalar, &part.add(h)).unwrap();
        }
    }
    c.add("tau=1 linear ansatz yields only classical symmetries", only_classical);
}

fn criterion_10(c: &mut Checks) {
    let cx = ctx();
    let ansatz = MultiplierAnsatz::products(&cx, 1, &MultiplierAnsatz::jet_factors("u", 2));
    let space = find_multipliers(&spec(), &ansatz).unwrap();
    c.add("dimension 3", space.multipliers.len() == 3);
    let expected = [p("u_{x,x}"), p("u_{t,t}"), p("t*u_{t,t} + u_t/2 - 1/2")];
    let cols: Vec<Vec<Expr>> = space
        .multipliers
        .iter()
        .map(|m| m.lambda.clone())
        .chain(expected.iter().cloned())
        .map(|e| vec![e])
        .collect();
    let (rows, _) = collect_rows(&cols);
    c.add("span equals the reference span", rank(&rows, 6) == 3);
    let d = delta();
    c.add(
        "each multiplier passes the Euler test",
        space.multipliers.iter().all(|m| same(&euler(&(&m.lambda * &d), "u"), &Expr::zero())),
    );
}

fn criterion_11(c: &mut Checks) {
    let d = delta();
    let f = &p("u_{t,t}") * &d;
    let (ix, it) = homotopy_integrands(&f);
    c.add(
        "x-integrand for u_tt * Delta",
        same(
            &ix,
            &p("a*u*u_{t,t} - a*u*u_t*u_{t,t} - 2/3*u*u_{x,t,t,t} + 1/3*u_t*u_{x,t,t} + 1/3*u_x*u_{t,t,t} \
                - 2/3*u_{x,t}*u_{t,t}"),
        ),
    );
    c.add(
        "t-integrand for u_tt * Delta",
        same(
            &it,
            &p("u_t^2 - u_t*u_{x,x,t} + a*u_x*u_t - a*u_x*u_t^2 + 2/3*u*u_{x,x,t,t} - a*u*u_{x,t} + a*u*u_{x,t}*u_t \
                + 1/3*u_x*u_{x,t,t} - 1/3*u_{x,x}*u_{t,t}"),
        ),
    );
    let law = conservation_law(&spec(), &Multiplier { lambda: p("u_{t,t}") }).unwrap();
    c.add(
        "fluxes for u_tt",
        same(
            &law.flux.phi,
            &p("1/2*a*u*u_{t,t} - 1/3*a*u*u_t*u_{t,t} - 1/3*u*u_{x,t,t,t} + 1/6*u_t*u_{x,t,t} + 1/6*u_x*u_{t,t,t} \
                - 1/3*u_{x,t}*u_{t,t}"),
        ) && same(
            &law.flux.psi,
            &p("1/2*u_t^2 - 1/2*u_t*u_{x,x,t} + 1/2*a*u_x*u_t - 1/3*a*u_x*u_t^2 + 1/3*u*u_{x,x,t,t} - 1/2*a*u*u_{x,t} \
                + 1/3*a*u*u_{x,t}*u_t + 1/6*u_x*u_{x,t,t} - 1/6*u_{x,x}*u_{t,t}"),
        ),
    );
    for lam in ["u_{t,t}", "u_{x,x}", "t*u_{t,t} + u_t/2 - 1/2"] {
        let law = conservation_law(&spec(), &Multiplier { lambda: p(lam) }).unwrap();
        c.add(format!("divergence identity for {lam}"), same(&law.flux.divergence(), &(&p(lam) * &d)));
    }
    let uxx = conservation_law(&spec(), &Multiplier { lambda: p("u_{x,x}") }).unwrap();
    let printed = FluxPair {
        phi: p("1/2*u_x*u_t + 1/2*a*u_x^2 - 1/3*a*u_x^2*u_t - 1/2*u*u_{x,t} + 1/3*a*u*u_x*u_{x,t}"),
        psi: p("1/2*u*u_{x,x} - 1/3*a*u*u_x*u_{t,t} - 1/2*u_{x,x}"),
    };
    c.add(KNOWN_DISCREPANCIES[1].1, uxx.flux.equivalent(&printed));
    let corrected = FluxPair {
        phi: printed.phi.clone(),
        psi: p("1/2*u*u_{x,x} - 1/3*a*u*u_x*u_{x,x} - 1/2*u_{x,x}^2"),
    };
    c.add("corrected u_xx flux pair is equivalent modulo trivial fluxes", uxx.flux.equivalent(&corrected));
    let third = conservation_law(&spec(), &Multiplier { lambda: p("t*u_{t,t} + u_t/2 - 1/2") }).unwrap();
    let printed_third = FluxPair {
        phi: p("-1/2*a*u + 1/2*a*u*u_t + 1/2*a*t*u*u_{t,t} - 1/3*a*t*u*u_t*u_{t,t} - 1/6*a*u*u_t^2 - 1/2*u*u_{x,t,t} \
                - 1/3*t*u*u_{x,t,t,t} + 1/6*t*u_t*u_{x,t,t} - 1/12*u_t*u_{x,t} + 1/4*u_x*u_{t,t} + 1/6*t*u_x*u_{t,t,t} \
                + 1/3*u_{x,t} - 1/3*t*u_{x,t}*u_{t,t}"),
        psi: p("-1/2*u + 1/6*u*u_{x,x,t} + 1/3*t*u*u_{x,x,t,t} + 1/6*t*u_x*u_{x,t,t} + 1/12*u_x*u_{x,t} + 1/6*u_{x,x} \
                - 1/12*u_{x,x}*u_t - 1/2*a*t*u*u_{x,t} + 1/3*a*t*u*u_t*u_{x,t} + 1/2*t*u_t^2 - 1/2*t*u_t*u_{x,x,t} \
                - 1/6*t*u_{x,x}*u_{t,t} + 1/2*a*t*u_x*u_t - 1/3*a*t*u_x*u_t^2"),
    };
    c.add("printed third flux pair is equivalent modulo trivial fluxes", third.flux.equivalent(&printed_third));
}

/// Random polynomial in jets and (x, t, a), small integer coefficients.
/// With `jet_only` every monomial contains at least one jet, as the
/// homotopy operator needs fluxes that vanish at u = 0.
fn random_jet_poly(rng: &mut ChaCha8Rng, jet_only: bool) -> Expr {
    let jets = ["u", "u_x", "u_t", "u_{x,x}", "u_{x,t}", "u_{t,t}"];
    let plain = ["1", "x", "t", "a", "x*t"];
    let mut e = Expr::zero();
    for _ in 0..rng.gen_range(1..4) {
        let mut m = &Expr::int(rng.gen_range(-3..4)) * &p(plain[rng.gen_range(0..plain.len())]);
        for k in 0..rng.gen_range(1..3) {
            let atom = if jet_only && k == 0 || rng.gen_bool(0.7) {
                jets[rng.gen_range(0..jets.len())]
            } else {
                plain[rng.gen_range(0..plain.len())]
            };
            m = &m * &p(atom);
        }
        e = &e + &m;
    }
    e
}

fn criterion_12(c: &mut Checks) {
    let cx = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut euler_ok, mut homotopy_ok) = (true, true);
    let mut tried = 0;
    while tried < 100 {
        let pair = FluxPair { psi: random_jet_poly(&mut rng, true), phi: random_jet_poly(&mut rng, true) };
        let f = pair.divergence();
        if f.is_zero() {
            continue;
        }
        tried += 1;
        euler_ok &= same(&euler(&f, "u"), &Expr::zero());
        homotopy_ok &= same(&homotopy(&f, &cx).unwrap().divergence(), &f);
    }
    c.add("Euler o Div = 0 on 100 divergences", euler_ok);
    c.add("Div o Homotopy = id on 100 divergences", homotopy_ok);
    c.add("Jacobi identity on structure constants", algebra().jacobi_holds());
    let mut commute = true;
    for _ in 0..100 {
        let e = random_jet_poly(&mut rng, false);
        commute &= same(&total_derivative(&total_derivative(&e, 0), 1), &total_derivative(&total_derivative(&e, 1), 0));
    }
    c.add("D_x D_t = D_t D_x on 100 expressions", commute);
    // every `same` call above and in earlier criteria ran the point oracle
    c.add("point oracle ran for every symbolic comparison", ORACLE_CALLS.load(Ordering::Relaxed) > 300);
}

type Criterion = fn(&mut Checks);

/// Written straight to stderr so the lines show without `--nocapture`.
fn report(line: String) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    let mut unexpected = Vec::new();
    for (k, f) in criteria.iter().enumerate() {
        let n = k + 1;
        let mut checks = Checks::default();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut checks)));
        let failed: Vec<&str> = checks.0.iter().filter(|(_, ok)| !ok).map(|(s, _)| s.as_str()).collect();
        match outcome {
            Err(_) => {
                report(format!("criterion {n}: FAIL (panicked)"));
                unexpected.push(format!("{n}: panicked"));
                continue;
            }
            Ok(()) if failed.is_empty() => report(format!("criterion {n}: PASS ({} checks)", checks.0.len())),
            Ok(()) => report(format!(
                "criterion {n}: FAIL ({} of {} checks failed: {})",
                failed.len(),
                checks.0.len(),
                failed.join("; ")
            )),
        }
        let known: BTreeMap<&str, ()> =
            KNOWN_DISCREPANCIES.iter().filter(|(m, _)| *m == n).map(|(_, s)| (*s, ())).collect();
        for (name, ok) in &checks.0 {
            if *ok == known.contains_key(name.as_str()) {
                unexpected.push(format!("{n}: {name} ({})", if *ok { "unexpectedly passed" } else { "failed" }));
            }
        }
        for name in known.keys() {
            if !checks.0.iter().any(|(s, _)| s == name) {
                unexpected.push(format!("{n}: {name} was not checked"));
            }
        }
    }
    assert!(unexpected.is_empty(), "unexpected outcomes: {unexpected:#?}");
}
