use coevo_mog::evolution::Individual;
use coevo_mog::games::{IdSource, Strategy as GameStrategy, StrategyBounds, StrategyId};
use coevo_mog::localsearch::{
    nelder_mead, random_simplex_weights, refine_population, scalarized_objective, NelderMeadParams,
};
use coevo_mog::metrics::{igd, wilcoxon_signed_rank};
use coevo_mog::surrogate::{predict, train_surrogate, Mlp, OutputScaling, SurrogateParams};
use coevo_mog::{PayoffVector, Sense};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

/// Worst relative error between backprop and central differences over a
/// batch of random networks.
fn gradient_check(trials: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let (n_in, hidden, n_out) = (r.random_range(1..5), r.random_range(1..8), r.random_range(1..4));
        let mut net = Mlp::random(n_in, hidden, n_out, 0.8, &mut r);
        let samples = r.random_range(1..6);
        let xs: Vec<Vec<f64>> = (0..samples).map(|_| (0..n_in).map(|_| r.random()).collect()).collect();
        let ys: Vec<Vec<f64>> = (0..samples).map(|_| (0..n_out).map(|_| r.random()).collect()).collect();
        let (_, analytic) = net.loss_and_gradient(&xs, &ys);
        let h = 1e-5;
        let mut numeric = Vec::with_capacity(analytic.len());
        for i in 0..analytic.len() {
            let keep = net.params()[i];
            net.params_mut()[i] = keep + h;
            let up = net.loss(&xs, &ys);
            net.params_mut()[i] = keep - h;
            let down = net.loss(&xs, &ys);
            net.params_mut()[i] = keep;
            numeric.push((up - down) / (2.0 * h));
        }
        let diff = norm(analytic.iter().zip(&numeric).map(|(a, n)| a - n));
        let scale = norm(analytic.iter().copied()).max(norm(numeric.iter().copied())).max(1e-12);
        worst = worst.max(diff / scale);
    }
    worst
}

#[test]
fn backprop_matches_finite_differences() {
    let err = gradient_check(200, 5);
    assert!(err < 1e-4, "relative gradient error {err}");
}

#[test]
fn output_scaling_round_trips() {
    let targets = vec![PayoffVector::from([1.0, -3.0]), PayoffVector::from([4.5, 2.0]), PayoffVector::from([0.25, 0.0])];
    let s = OutputScaling::fit(&targets);
    for t in &targets {
        let back = s.denormalize(&s.normalize(t.as_slice()));
        for (a, b) in back.iter().zip(t.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

fn unit_box(n: usize) -> StrategyBounds {
    StrategyBounds::new(vec![0.0; n], vec![1.0; n]).unwrap()
}

fn samples(n: usize, dim: usize, r: &mut ChaCha8Rng) -> Vec<GameStrategy> {
    (0..n)
        .map(|i| GameStrategy::new(StrategyId(i as u64), (0..dim).map(|_| r.random()).collect()))
        .collect()
}

#[test]
fn constant_and_single_sample_targets_are_reproduced() {
    let mut r = rng(1);
    let xs = samples(20, 3, &mut r);
    let c = PayoffVector::from([0.7, -1.2]);
    let model = train_surrogate(&xs, &vec![c.clone(); 20], &unit_box(3), &SurrogateParams::default(), &mut r).unwrap();
    for x in &xs {
        let p = predict(&model, x).unwrap();
        assert!((p[0] - c[0]).abs() < 1e-3 && (p[1] - c[1]).abs() < 1e-3);
    }
    let one = train_surrogate(&xs[..1], std::slice::from_ref(&c), &unit_box(3), &SurrogateParams::default(), &mut r).unwrap();
    let p = predict(&one, &xs[0]).unwrap();
    assert!((p[0] - c[0]).abs() < 1e-3 && (p[1] - c[1]).abs() < 1e-3);
    assert_eq!(predict(&one, &xs[1]).unwrap(), predict(&one, &xs[1]).unwrap());
}

#[test]
fn linear_target_beats_the_mean_predictor() {
    let mut r = rng(2);
    let xs = samples(50, 2, &mut r);
    let ys: Vec<PayoffVector> = xs
        .iter()
        .map(|s| PayoffVector::from([2.0 * s.values[0] - s.values[1] + 0.5, 0.3 * s.values[1]]))
        .collect();
    let model = train_surrogate(&xs, &ys, &unit_box(2), &SurrogateParams::default(), &mut r).unwrap();
    let mse = |pred: &dyn Fn(&GameStrategy) -> Vec<f64>| {
        xs.iter()
            .zip(&ys)
            .map(|(x, y)| pred(x).iter().zip(y.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .sum::<f64>()
            / xs.len() as f64
    };
    let mean: Vec<f64> = (0..2).map(|j| ys.iter().map(|y| y[j]).sum::<f64>() / 50.0).collect();
    let fitted = mse(&|x| predict(&model, x).unwrap().as_slice().to_vec());
    let baseline = mse(&|_| mean.clone());
    assert!(fitted < baseline, "fitted {fitted} vs mean {baseline}");
}

#[test]
fn retraining_leaves_the_previous_model_alone() {
    let mut r = rng(3);
    let xs = samples(10, 2, &mut r);
    let ys: Vec<PayoffVector> = xs.iter().map(|s| PayoffVector::from([s.values[0], s.values[1]])).collect();
    let first = train_surrogate(&xs, &ys, &unit_box(2), &SurrogateParams::default(), &mut r).unwrap();
    let snapshot = first.clone();
    let xs_before = xs.clone();
    let _second = train_surrogate(&xs, &ys, &unit_box(2), &SurrogateParams::default(), &mut r).unwrap();
    assert_eq!(first, snapshot);
    assert_eq!(xs, xs_before);
}

#[test]
fn diverging_training_is_reported() {
    let mut r = rng(4);
    let xs = samples(10, 2, &mut r);
    let ys: Vec<PayoffVector> = xs.iter().map(|s| PayoffVector::from([s.values[0], -s.values[1]])).collect();
    let params = SurrogateParams { learning_rate: 1e6, ..Default::default() };
    assert!(train_surrogate(&xs, &ys, &unit_box(2), &params, &mut r).is_err());
}

#[test]
fn nelder_mead_recovers_quadratic_minimizers() {
    let bounds = StrategyBounds::new(vec![-5.0], vec![5.0]).unwrap();
    let r = nelder_mead(|x: &[f64]| (x[0] - 2.0).powi(2), &[0.0], &bounds, &NelderMeadParams::default()).unwrap();
    assert!((r.point[0] - 2.0).abs() < 1e-4, "{:?}", r.point);

    let bounds = StrategyBounds::new(vec![-5.0; 2], vec![5.0; 2]).unwrap();
    let r = nelder_mead(|x: &[f64]| x[0] * x[0] + x[1] * x[1], &[1.0, 1.0], &bounds, &NelderMeadParams::default()).unwrap();
    assert!(norm(r.point.iter().copied()) < 1e-3, "{:?}", r.point);

    let r = nelder_mead(|x: &[f64]| x[0] * x[0] + x[1] * x[1], &[0.0, 0.0], &bounds, &NelderMeadParams::default()).unwrap();
    assert!(r.value <= 0.0);
}

#[test]
fn simplex_weights_have_uniform_mean() {
    let mut r = rng(6);
    let n = 100_000;
    let mean = (0..n)
        .map(|_| random_simplex_weights(2, &mut r).unwrap().as_slice()[0])
        .sum::<f64>()
        / n as f64;
    assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
}

proptest! {
    #[test]
    fn simplex_weights_sum_to_one(k in 1usize..10, seed in any::<u64>()) {
        let w = random_simplex_weights(k, &mut rng(seed)).unwrap();
        prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.as_slice().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn igd_is_zero_on_supersets(points in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..15), extra in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 0..5)) {
        let reference: Vec<PayoffVector> = points.iter().map(|p| PayoffVector::from([p.0, p.1])).collect();
        let mut approx = reference.clone();
        approx.extend(extra.iter().map(|p| PayoffVector::from([p.0, p.1])));
        prop_assert_eq!(igd(&reference, &approx).unwrap(), 0.0);
    }

    #[test]
    fn igd_never_grows_when_points_are_added(
        reference in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..15),
        approx in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..15),
        added in (-5.0f64..5.0, -5.0f64..5.0),
    ) {
        let to_pv = |v: &[(f64, f64)]| v.iter().map(|p| PayoffVector::from([p.0, p.1])).collect::<Vec<_>>();
        let (reference, mut approx) = (to_pv(&reference), to_pv(&approx));
        let before = igd(&reference, &approx).unwrap();
        approx.push(PayoffVector::from([added.0, added.1]));
        prop_assert!(igd(&reference, &approx).unwrap() <= before);
    }

    #[test]
    fn igd_scales_with_both_sets(
        reference in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..15),
        approx in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..15),
        c in 0.01f64..100.0,
    ) {
        let to_pv = |v: &[(f64, f64)], s: f64| v.iter().map(|p| PayoffVector::from([s * p.0, s * p.1])).collect::<Vec<_>>();
        let base = igd(&to_pv(&reference, 1.0), &to_pv(&approx, 1.0)).unwrap();
        let scaled = igd(&to_pv(&reference, c), &to_pv(&approx, c)).unwrap();
        prop_assert!((scaled - c * base).abs() <= 1e-9 * (1.0 + c * base));
    }

    #[test]
    fn igd_matches_brute_force(
        reference in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..20),
        approx in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..20),
    ) {
        let to_pv = |v: &[(f64, f64)]| v.iter().map(|p| PayoffVector::from([p.0, p.1])).collect::<Vec<_>>();
        let oracle = reference
            .iter()
            .map(|v| approx.iter().map(|a| ((v.0 - a.0).powi(2) + (v.1 - a.1).powi(2)).sqrt()).fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            / reference.len() as f64;
        let got = igd(&to_pv(&reference), &to_pv(&approx)).unwrap();
        prop_assert!((got - oracle).abs() < 1e-12);
    }
}

#[test]
fn wilcoxon_has_nominal_size() {
    let mut r = rng(8);
    let reps = 1000;
    let rejections = (0..reps)
        .filter(|_| {
            let a: Vec<f64> = (0..20).map(|_| r.sample(StandardNormal)).collect();
            let b: Vec<f64> = (0..20).map(|_| r.sample(StandardNormal)).collect();
            wilcoxon_signed_rank(&a, &b).unwrap().significant(0.05)
        })
        .count();
    let rate = rejections as f64 / reps as f64;
    assert!((0.03..=0.08).contains(&rate), "rejection rate {rate}");
}

/// A surrogate whose scalarization is a convex bowl: targets are squared
/// distances of each input to the box centre.
fn bowl_model(r: &mut ChaCha8Rng) -> coevo_mog::surrogate::SurrogateModel {
    let xs = samples(60, 2, r);
    let ys: Vec<PayoffVector> = xs
        .iter()
        .map(|s| {
            let d = (s.values[0] - 0.5).powi(2) + (s.values[1] - 0.5).powi(2);
            PayoffVector::from([d, 2.0 * d])
        })
        .collect();
    train_surrogate(&xs, &ys, &unit_box(2), &SurrogateParams::default(), r).unwrap()
}

fn offspring(n: usize, r: &mut ChaCha8Rng, ids: &mut IdSource) -> Vec<Individual> {
    (0..n)
        .map(|_| Individual::new(GameStrategy::new(ids.next_id(), vec![r.random(), r.random()])))
        .collect()
}

#[test]
fn refinement_improves_and_stays_in_bounds() {
    let mut r = rng(9);
    let model = bowl_model(&mut r);
    let bounds = unit_box(2);
    let mut ids = IdSource::new();
    let input = offspring(30, &mut r, &mut ids);
    for sense in [Sense::Minimize, Sense::Maximize] {
        let mut ls_rng = rng(10);
        let out = refine_population(input.clone(), &model, 1.0, sense, &bounds, &NelderMeadParams::default(), &mut ids, &mut ls_rng).unwrap();
        // replay the weight draws to score each individual on its own objective
        let mut replay = rng(10);
        for (before, after) in input.iter().zip(&out) {
            let _: f64 = replay.random();
            let w = random_simplex_weights(2, &mut replay).unwrap();
            let f = scalarized_objective(&model, &w, sense);
            assert!(bounds.contains(&after.strategy.values));
            assert!(f(&after.strategy.values) <= f(&before.strategy.values));
            assert_ne!(after.strategy.id, before.strategy.id);
        }
    }
}

#[test]
fn refinement_with_zero_probability_is_identity_and_deterministic() {
    let mut r = rng(11);
    let model = bowl_model(&mut r);
    let mut ids = IdSource::new();
    let input = offspring(20, &mut r, &mut ids);
    let params = NelderMeadParams::default();
    let out = refine_population(input.clone(), &model, 0.0, Sense::Minimize, &unit_box(2), &params, &mut ids, &mut rng(1)).unwrap();
    assert_eq!(out, input);

    let run = || {
        let mut ids = IdSource::new();
        let input = offspring(20, &mut rng(12), &mut ids);
        refine_population(input, &model, 0.5, Sense::Minimize, &unit_box(2), &params, &mut ids, &mut rng(13)).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn refinement_selection_count_is_binomial() {
    let mut r = rng(14);
    let model = bowl_model(&mut r);
    let params = NelderMeadParams { max_iterations: 5, ..Default::default() };
    let (n, p, trials) = (10usize, 0.2, 10_000);
    let mut ids = IdSource::new();
    let input = offspring(n, &mut r, &mut ids);
    let mut ls_rng = rng(15);
    let mut total = 0usize;
    for _ in 0..trials {
        let out = refine_population(input.clone(), &model, p, Sense::Minimize, &unit_box(2), &params, &mut ids, &mut ls_rng).unwrap();
        total += out.iter().zip(&input).filter(|(a, b)| a.strategy.id != b.strategy.id).count();
    }
    let mean = total as f64 / trials as f64;
    let expected = n as f64 * p;
    let sigma = (n as f64 * p * (1.0 - p) / trials as f64).sqrt();
    assert!((mean - expected).abs() < 3.0 * sigma, "mean {mean}, expected {expected} ± {}", 3.0 * sigma);
}
