use std::sync::Arc;

use polybne_core::quantize::{dispersion, kantorovich_marginal, kantorovich_upper_bound};
use polybne_core::{GameSpec, Interval, QuantizerConfig, TypeMarginal};
use proptest::prelude::*;

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn game_with(marginals: Vec<TypeMarginal>) -> GameSpec {
    let n = marginals.len();
    let actions = vec![iv(0.0, 1.0); n];
    GameSpec::new(
        "test",
        marginals,
        actions,
        Arc::new(|_: usize, _: &[f64], _: &[f64]| 0.0),
    )
    .unwrap()
}

fn domains(game: &GameSpec) -> Vec<Interval> {
    (0..game.players()).map(|i| game.type_domain(i)).collect()
}

/// Adaptive Simpson; refines around density jumps until the local error
/// estimate is below `tol`.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 60)
}

fn tabulated() -> impl Strategy<Value = TypeMarginal> {
    (-2.0f64..2.0, prop::collection::vec((0.05f64..1.0, 0.1f64..3.0), 1..6)).prop_map(|(lo, bins)| {
        let mut edges = vec![lo];
        for (w, _) in &bins {
            edges.push(edges.last().unwrap() + w);
        }
        TypeMarginal::tabulated(edges, bins.iter().map(|b| b.1).collect()).unwrap()
    })
}

fn marginal() -> impl Strategy<Value = TypeMarginal> {
    prop_oneof![
        (-2.0f64..2.0, 0.1f64..3.0).prop_map(|(lo, w)| TypeMarginal::uniform(iv(lo, lo + w))),
        tabulated(),
    ]
}

#[test]
fn kantorovich_matches_quarter_cell_integral() {
    let game = game_with(vec![TypeMarginal::uniform(iv(0.0, 1.0)); 2]);
    for m in [4, 16, 64] {
        let s = QuantizerConfig::grid(vec![m, 1]).build(&game).unwrap();
        let h = 1.0 / m as f64;
        // per cell ∫|x - c| dx = h²/4
        let expected = m as f64 * h * h / 4.0;
        let bound = kantorovich_marginal(&s, &game, 0).unwrap();
        assert!((bound - expected).abs() <= 1e-10 * expected, "M={m}: {bound}");
        let beta = dispersion(&s.marginal(0).unwrap(), &[iv(0.0, 1.0)]).unwrap();
        assert_eq!(beta.value, 1.0 / (2.0 * m as f64));

        let s = QuantizerConfig::grid(vec![m, m]).build(&game).unwrap();
        assert!(kantorovich_upper_bound(&s, &game).unwrap() <= dispersion(&s, &domains(&game)).unwrap().value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_sum_to_one(ms in prop::collection::vec(marginal(), 2..4), k in 1usize..9, mc in 1usize..300, seed: u64) {
        let game = game_with(ms);
        let counts: Vec<usize> = (0..game.players()).map(|i| k + i).collect();
        for q in [QuantizerConfig::grid(counts), QuantizerConfig::monte_carlo(mc, seed)] {
            let s = q.build(&game).unwrap();
            let total: f64 = s.weights().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12, "{total}");
            for atom in s.atoms() {
                for (x, d) in atom.iter().zip(s.domains()) {
                    prop_assert!(d.contains(*x));
                }
            }
        }
    }

    #[test]
    fn kantorovich_halves_under_refinement(
        domains in prop::collection::vec((-2.0f64..2.0, 0.1f64..3.0), 2..4),
        k in 1usize..10,
    ) {
        let game = game_with(domains.iter().map(|&(lo, w)| TypeMarginal::uniform(iv(lo, lo + w))).collect());
        let coarse = QuantizerConfig::grid(vec![k; domains.len()]).build(&game).unwrap();
        let fine = QuantizerConfig::grid(vec![2 * k; domains.len()]).build(&game).unwrap();
        let a = kantorovich_upper_bound(&coarse, &game).unwrap();
        let b = kantorovich_upper_bound(&fine, &game).unwrap();
        prop_assert!((b / a - 0.5).abs() <= 1e-10, "{a} {b}");
        let a = kantorovich_marginal(&coarse, &game, 0).unwrap();
        let b = kantorovich_marginal(&fine, &game, 0).unwrap();
        prop_assert!((b / a - 0.5).abs() <= 1e-10, "{a} {b}");
    }

    #[test]
    fn bound_dominates_mean_error_and_sits_below_dispersion(
        ms in prop::collection::vec(marginal(), 2..4),
        k in 1usize..8,
    ) {
        let game = game_with(ms);
        let counts: Vec<usize> = (0..game.players()).map(|i| k + 2 * i).collect();
        let s = QuantizerConfig::grid(counts).build(&game).unwrap();
        let dk = kantorovich_upper_bound(&s, &game).unwrap();
        let beta = dispersion(&s, &domains(&game)).unwrap();
        prop_assert!(beta.exact);
        prop_assert!(dk <= beta.value * (1.0 + 1e-12));
        // f(θ) = Σ θ_i is √n-Lipschitz for the Euclidean metric
        let exact: f64 = game.marginals().iter().map(|m| m.first_moment(m.domain().lo(), m.domain().hi())).sum();
        let approx = s.expectation(|t| t.iter().sum());
        let lip = (game.players() as f64).sqrt();
        prop_assert!((approx - exact).abs() <= dk * lip + 1e-12);
    }

    #[test]
    fn monte_carlo_is_reproducible(m in 1usize..500, seed: u64) {
        let game = game_with(vec![TypeMarginal::uniform(iv(0.01, 1.01)), TypeMarginal::uniform(iv(0.01, 2.01))]);
        let a = QuantizerConfig::monte_carlo(m, seed).build(&game).unwrap();
        let b = QuantizerConfig::monte_carlo(m, seed).build(&game).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.weights().iter().all(|&w| w == 1.0 / m as f64));
    }

    #[test]
    fn rectangle_mass_matches_quadrature(
        ms in prop::collection::vec(tabulated(), 2..4),
        cuts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3),
    ) {
        let game = game_with(ms);
        let rect: Vec<Interval> = game
            .marginals()
            .iter()
            .zip(&cuts)
            .map(|(m, &(u, v))| {
                let d = m.domain();
                let (a, b) = (u.min(v), u.max(v).max(u.min(v) + 1e-3));
                iv(d.lo() + a * d.width(), (d.lo() + b * d.width()).min(d.hi()))
            })
            .collect();
        let mass = game.rectangle_mass(&rect).unwrap();
        let oracle: f64 = game
            .marginals()
            .iter()
            .zip(&rect)
            .map(|(m, r)| {
                let dens = |x: f64| m.density(m.domain().clamp(x)).unwrap();
                integrate(&dens, r.lo(), r.hi(), 1e-13)
            })
            .product();
        prop_assert!((mass - oracle).abs() <= 1e-8, "{mass} vs {oracle}");
    }
}

#[test]
fn monte_carlo_mean_is_centred() {
    let game = game_with(vec![TypeMarginal::uniform(iv(0.0, 1.0)); 2]);
    let s = QuantizerConfig::monte_carlo(100_000, 42).build(&game).unwrap();
    let mean = s.expectation(|t| t[0]);
    assert!((mean - 0.5).abs() <= 0.005, "{mean}");
    let small = QuantizerConfig::monte_carlo(50, 42).build(&game).unwrap();
    assert!(!dispersion(&small, &domains(&game)).unwrap().exact);
}
