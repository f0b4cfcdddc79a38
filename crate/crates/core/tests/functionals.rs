use std::f64::consts::PI;

use currentalg::functionals::*;
use currentalg::specfun::{mittag_leffler, mittag_leffler_deriv, FractionalOrder, LogNormalWidth};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::{gamma, ln_gamma};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn unit_interval(rho: f64) -> IntensityMeasure {
    IntensityMeasure::new(BoxDomain::interval(1.0).unwrap(), rho).unwrap()
}

/// `π·1_{[0, 1/2]}`, for which `∫_0^1 (e^{if} − 1) dx = −1` exactly.
fn half_flip() -> TestFunction {
    TestFunction::indicator_1d(0.0, 0.5, PI).unwrap()
}

#[test]
fn zero_function_gives_one_everywhere() {
    let f = TestFunction::zero();
    let mu = unit_interval(3.0);
    assert_eq!(char_poisson(&f, &mu).unwrap(), ONE);
    assert_eq!(char_finite_nv(&f, 5, &mu.domain).unwrap(), ONE);
    assert_eq!(char_fractional(&f, &mu, order(0.4)).unwrap(), ONE);
    let xi = MixingMeasure::Exponential { rho_bar: 2.0 };
    assert_eq!(char_compound(&f, &mu, &xi).unwrap(), ONE);
}

#[test]
fn indicator_examples() {
    let f = half_flip();
    let p = char_poisson(&f, &unit_interval(2.0)).unwrap();
    assert!((p - (-2f64).exp()).norm() < 1e-15);

    let unit = unit_interval(1.0);
    let exp_mix = char_compound(&f, &unit, &MixingMeasure::Exponential { rho_bar: 1.0 }).unwrap();
    assert!((exp_mix - 0.5).norm() < 1e-15);

    let nu = MixingMeasure::FractionalNu { alpha: order(0.5) };
    let frac_mix = char_compound(&f, &unit, &nu).unwrap();
    assert!((frac_mix - 0.427_583_576_155_807).norm() < 1e-6);
}

#[test]
fn dirac_mixture_is_poisson() {
    let f = TestFunction::single(Shape::Cosine, vec![0.4], 0.3, 2.2).unwrap();
    let unit = unit_interval(1.0);
    let compound = char_compound(&f, &unit, &MixingMeasure::Dirac { rho0: 3.7 }).unwrap();
    let poisson = char_poisson(&f, &unit_interval(3.7)).unwrap();
    assert!((compound - poisson).norm() < 1e-12);
}

#[test]
fn fractional_examples() {
    let f = half_flip();
    let mu = unit_interval(2.0);
    let unit_order = char_fractional(&f, &mu, FractionalOrder::POISSON).unwrap();
    assert!((unit_order - char_poisson(&f, &mu).unwrap()).norm() < 1e-12);

    let v = char_fractional(&f, &mu, order(0.5)).unwrap();
    assert!(v.im.abs() < 1e-12 && v.re > 0.0 && v.re < 1.0);
    assert!((v.re - mittag_leffler(order(0.5), -2.0).unwrap()).abs() < 1e-12);
    let mixture = char_compound(
        &f,
        &unit_interval(2.0),
        &MixingMeasure::FractionalNu { alpha: order(0.5) },
    )
    .unwrap();
    assert!((v - mixture).norm() < 1e-6);
}

#[test]
fn finite_volume_error_decays_like_one_over_n() {
    let f = TestFunction::indicator_1d(0.0, 0.5, 0.3).unwrap();
    let rho = 2.0;
    let error = |n: u64| {
        let domain = BoxDomain::interval(n as f64 / rho).unwrap();
        let finite = char_finite_nv(&f, n, &domain).unwrap();
        let poisson = char_poisson(&f, &IntensityMeasure::new(domain, rho).unwrap()).unwrap();
        (finite - poisson).norm()
    };
    let ratio = error(1 << 11) / error(1 << 10);
    assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
}

#[test]
fn fractional_weights() {
    let poisson = weights_fractional(FractionalOrder::POISSON, 2.0, 10).unwrap();
    for (n, p) in poisson.iter().enumerate() {
        let expected = (-2.0 + n as f64 * 2f64.ln() - ln_gamma(n as f64 + 1.0)).exp();
        assert!((p / expected - 1.0).abs() < 1e-13);
    }

    let half = weights_fractional(order(0.5), 1.0, 30).unwrap();
    assert!((half[0] - 0.427_583_576_155_807).abs() < 1e-10);
    // Against the derivative representation.
    for n in 1..8u32 {
        let via_deriv = mittag_leffler_deriv(order(0.5), n, -1.0).unwrap() / gamma(f64::from(n) + 1.0);
        assert!((half[n as usize] / via_deriv - 1.0).abs() < 1e-9, "n = {n}");
    }
}

#[test]
fn fractional_weights_sum_to_one() {
    // Masses large enough to make the n > 200 tail visible (α = 1/2 with
    // m = 50 leaves about 5e−3 beyond 200) are outside this check.
    for a in [0.25, 0.5, 0.75, 0.9] {
        for m in [0.5, 1.0, 3.0, 10.0] {
            let p = weights_fractional(order(a), m, 200).unwrap();
            assert!(p.iter().all(|&x| x >= 0.0));
            let total: f64 = p.iter().sum();
            assert!((total - 1.0).abs() < 1e-10, "α = {a}, m = {m}: {total}");
        }
    }
}

#[test]
fn poisson_count_mean() {
    let mu = IntensityMeasure::new(BoxDomain::cube(2, 1.0).unwrap(), 5.0).unwrap();
    let sampler = PoissonSampler::new(mu.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let counts: Vec<f64> = (0..100_000)
        .map(|_| {
            let c = sampler.sample(&mut rng);
            assert!(c.points().all(|p| mu.domain.contains(p)));
            c.len() as f64
        })
        .collect();
    let (mean, se) = mean_and_stderr(&counts);
    assert!((mean - 5.0).abs() < 3.0 * se, "{mean} ± {se}");
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn fractional_counts_match_weights() {
    let mu = IntensityMeasure::new(BoxDomain::interval(3.0).unwrap(), 1.0).unwrap();
    let sampler = FractionalSampler::new(mu, order(0.5));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 100_000usize;
    let counts: Vec<usize> = (0..draws).map(|_| sampler.sample(&mut rng).len()).collect();

    let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (mean, se) = mean_and_stderr(&as_f64);
    let expected_mean = 3.0 / gamma(1.5);
    assert!(
        (mean - expected_mean).abs() < 3.0 * se,
        "{mean} ± {se} vs {expected_mean}"
    );

    // Chi-square over bins with expected count ≥ 5; the rest is pooled.
    let weights = weights_fractional(order(0.5), 3.0, 200).unwrap();
    let mut observed = vec![0usize; weights.len()];
    for c in counts {
        observed[c.min(weights.len() - 1)] += 1;
    }
    let (mut stat, mut bins) = (0.0, 0);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (o, p) in observed.iter().zip(&weights) {
        let e = p * draws as f64;
        if e >= 5.0 {
            stat += (*o as f64 - e).powi(2) / e;
            bins += 1;
        } else {
            pooled_obs += *o as f64;
            pooled_exp += e;
        }
    }
    // Whatever probability the truncated weights miss belongs to the pool.
    pooled_exp += (1.0 - weights.iter().sum::<f64>()) * draws as f64;
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        bins += 1;
    }
    let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(
        stat < critical,
        "χ² = {stat} with {} dof, critical {critical}",
        bins - 1
    );
}

#[test]
fn monte_carlo_reproduces_poisson_functional() {
    let mu = IntensityMeasure::new(BoxDomain::interval(4.0).unwrap(), 1.5).unwrap();
    let f = TestFunction::single(Shape::Gaussian, vec![2.0], 0.3, 1.2).unwrap();
    let exact = char_poisson(&f, &mu).unwrap();
    let mc = mc_char(&f, &PoissonSampler::new(mu.clone()), 40_000, 3).unwrap();
    assert!(
        (mc.value - exact).norm() <= 3.0 * mc.stderr,
        "{} vs {exact} ± {}",
        mc.value,
        mc.stderr
    );

    let g = TestFunction::indicator_1d(1.0, 2.5, 2.0).unwrap();
    let exact = char_poisson(&g, &mu).unwrap();
    let mc = mc_char(&g, &PoissonSampler::new(mu), 40_000, 4).unwrap();
    assert!((mc.value - exact).norm() <= 3.0 * mc.stderr);
}

#[test]
fn monte_carlo_reproduces_fractional_functional() {
    let mu = IntensityMeasure::new(BoxDomain::interval(2.0).unwrap(), 1.5).unwrap();
    let f = TestFunction::indicator_1d(0.0, 1.0, 1.0).unwrap();
    let exact = char_fractional(&f, &mu, order(0.5)).unwrap();
    let mc = mc_char(&f, &FractionalSampler::new(mu, order(0.5)), 40_000, 5).unwrap();
    assert!(
        (mc.value - exact).norm() <= 3.0 * mc.stderr,
        "{} vs {exact} ± {}",
        mc.value,
        mc.stderr
    );
}

#[test]
fn monte_carlo_is_deterministic_and_exact_for_zero() {
    let mu = unit_interval(4.0);
    let sampler = FractionalSampler::new(mu, order(0.7));
    let zero = mc_char(&TestFunction::zero(), &sampler, 500, 9).unwrap();
    assert_eq!(zero.value, ONE);
    assert_eq!(zero.stderr, 0.0);
    let f = half_flip();
    let a = mc_char(&f, &sampler, 1000, 9).unwrap();
    let b = mc_char(&f, &sampler, 1000, 9).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, mc_char(&f, &sampler, 1000, 10).unwrap());
}

fn girard_params(beta: f64, n_max: usize) -> GirardParams {
    GirardParams {
        circle_length: 1.0,
        n_max,
        beta,
        rho_bar: 1.0,
    }
}

#[test]
fn girard_zero_temperature_limit() {
    let v = girard_functional(&half_flip(), &girard_params(200.0, 32), OccupationOrdering::Right).unwrap();
    assert!((v - 0.5).norm() < 1e-3, "{v}");
    let left = girard_functional(&half_flip(), &girard_params(200.0, 32), OccupationOrdering::Left).unwrap();
    assert!((v - left).norm() < 1e-6);
    assert_eq!(
        girard_functional(
            &TestFunction::zero(),
            &girard_params(200.0, 8),
            OccupationOrdering::Right
        )
        .unwrap(),
        ONE
    );
}

#[test]
fn girard_mode_truncation_converges() {
    let f = half_flip();
    let coarse = girard_functional(&f, &girard_params(10.0, 32), OccupationOrdering::Right).unwrap();
    let fine = girard_functional(&f, &girard_params(10.0, 64), OccupationOrdering::Right).unwrap();
    assert!((coarse - fine).norm() < 1e-6);
    // At high temperature many modes matter; still bounded by one.
    let smooth = TestFunction::single(Shape::Cosine, vec![0.5], 0.4, 1.3).unwrap();
    let hot = girard_functional(&smooth, &girard_params(0.05, 16), OccupationOrdering::Right).unwrap();
    assert!(hot.norm() <= 1.0 + 1e-12);
}

fn two_body_grid() -> TensorGrid {
    TensorGrid::cube(2, -2.0, 2.0, 101).unwrap()
}

#[test]
fn harmonic_pair_potential_formula() {
    let omega = 0.8;
    let field = GroundStateField::Analytic {
        n_particles: 2,
        pair: PairPotential::Harmonic { omega },
    };
    let grid = two_body_grid();
    let v = ground_state_potential(&field, &grid).unwrap();
    for (i, vi) in v.iter().enumerate() {
        let x = grid.point(i);
        let expected = 8.0 * omega * omega * (x[0] - x[1]).powi(2) - 4.0 * omega;
        assert!((vi - expected).abs() < 1e-12 * expected.abs().max(1.0));
    }
}

#[test]
fn ground_state_residuals() {
    let grid = two_body_grid();
    let harmonic = GroundStateField::Analytic {
        n_particles: 2,
        pair: PairPotential::Harmonic { omega: 1.0 },
    };
    let r = residual_check(&harmonic, &grid, 3.0).unwrap();
    assert!(r.relative < 1e-4 && r.points_excluded == 0, "{r:?}");
    for lambda in [-1.0, -2.0] {
        let calogero = GroundStateField::Analytic {
            n_particles: 2,
            pair: PairPotential::Calogero { omega: 1.0, lambda },
        };
        let r = residual_check(&calogero, &grid, 3.0).unwrap();
        assert!(r.relative < 1e-4 && r.points_excluded > 0, "λ = {lambda}: {r:?}");
    }
}

#[test]
fn three_body_residual() {
    let grid = TensorGrid::cube(3, -1.5, 1.5, 81).unwrap();
    let field = GroundStateField::Analytic {
        n_particles: 3,
        pair: PairPotential::Calogero {
            omega: 0.5,
            lambda: -2.0,
        },
    };
    let r = residual_check(&field, &grid, 3.0).unwrap();
    assert!(r.relative < 1e-4, "{r:?}");
}

#[derive(Debug, Clone)]
struct RandomFunction {
    f: TestFunction,
    domain: BoxDomain,
}

fn random_function() -> impl Strategy<Value = RandomFunction> {
    (1usize..=2, 1usize..=3).prop_flat_map(|(dim, terms)| {
        let side = 2.0;
        let bump = (
            0usize..3,
            proptest::collection::vec(0.6f64..1.4, dim),
            0.05f64..0.5,
            -4.0f64..4.0,
        );
        proptest::collection::vec(bump, terms).prop_map(move |bumps| {
            let mut f = TestFunction::zero();
            for (shape, center, width, amplitude) in bumps {
                let shape = [Shape::Indicator, Shape::Gaussian, Shape::Cosine][shape];
                f = f.with(shape, center, width, amplitude).unwrap();
            }
            RandomFunction {
                f,
                domain: BoxDomain::cube(dim, side).unwrap(),
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn functionals_are_bounded_by_one(rf in random_function(), rho in 0.1f64..2.5, alpha in 0.2f64..1.0, n in 1u64..200) {
        let mu = IntensityMeasure::new(rf.domain.clone(), rho).unwrap();
        let unit = IntensityMeasure::new(rf.domain.clone(), 1.0).unwrap();
        let slack = 1.0 + 1e-12;
        let values = [
            char_poisson(&rf.f, &mu).unwrap(),
            char_finite_nv(&rf.f, n, &rf.domain).unwrap(),
            char_fractional(&rf.f, &mu, order(alpha)).unwrap(),
            char_compound(&rf.f, &unit, &MixingMeasure::Exponential { rho_bar: rho }).unwrap(),
            char_compound(&rf.f, &unit, &MixingMeasure::LogNormal { sigma: LogNormalWidth::new(0.5).unwrap() }).unwrap(),
        ];
        for v in values {
            prop_assert!(v.norm() <= slack, "|L| = {}", v.norm());
        }
        let zero = TestFunction::zero();
        prop_assert_eq!(char_poisson(&zero, &mu).unwrap(), ONE);
        prop_assert_eq!(char_fractional(&zero, &mu, order(alpha)).unwrap(), ONE);
    }

    #[test]
    fn exponential_mixture_identity(rf in random_function(), rho_bar in 0.1f64..3.0) {
        let unit = IntensityMeasure::new(rf.domain.clone(), 1.0).unwrap();
        let a = rf.f.exp_integral(&rf.domain).unwrap();
        prop_assume!(rho_bar * a.re < 0.5);
        let xi = MixingMeasure::Exponential { rho_bar };
        let numeric = char_compound_quadrature(&rf.f, &unit, &xi).unwrap();
        let closed = 1.0 / (1.0 - a * rho_bar);
        prop_assert!((numeric - closed).norm() < 1e-8, "{} vs {}", numeric, closed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fractional_equals_its_mixture(rf in random_function(), alpha in 0.2f64..0.95, rho in 0.2f64..2.0) {
        let mu = IntensityMeasure::new(rf.domain.clone(), rho).unwrap();
        let series = char_fractional(&rf.f, &mu, order(alpha)).unwrap();
        let mixture = char_compound(&rf.f, &mu, &MixingMeasure::FractionalNu { alpha: order(alpha) }).unwrap();
        prop_assert!((series - mixture).norm() < 1e-6, "{} vs {}", series, mixture);
    }
}
