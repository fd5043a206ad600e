use fratio::fisher::FisherFParams;
use fratio::gof::{critical_value, ks_statistic, DEFAULT_SAMPLE_SIZE};
use fratio::montecarlo::{estimate_cdf_curve, estimate_probability, RandomStream};
use fratio::quadrature::integrate;
use fratio::ratio::RatioSpec;
use fratio::specfun::{ln_gamma, sample_gamma};
use rand::Rng;

fn f(db: f64, m: f64, ms: f64) -> FisherFParams {
    FisherFParams::from_db(db, m, ms).unwrap()
}

fn t_max() -> f64 {
    critical_value(0.05, DEFAULT_SAMPLE_SIZE).unwrap()
}

#[test]
fn gamma_draws_follow_the_gamma_law() {
    for (k, seed) in [(0.4, 1), (1.0, 2), (3.7, 3)] {
        let mut rng = RandomStream::new(seed, 0);
        let mut draws: Vec<f64> = (0..DEFAULT_SAMPLE_SIZE).map(|_| sample_gamma(k, 1.0, &mut rng)).collect();
        draws.sort_by(f64::total_cmp);
        // regularized lower incomplete gamma, accumulated along the sorted draws
        let density = |x: f64| ((k - 1.0) * x.ln() - x - ln_gamma(k)).exp();
        let mut acc = 0.0;
        let mut prev = 0.0;
        let mut table = Vec::with_capacity(draws.len());
        for &x in &draws {
            acc += if prev == 0.0 && k < 1.0 {
                // integrable singularity at the origin: x^k / (k Γ(k)) plus a smooth remainder
                let head = (k * x.ln() - ln_gamma(k)).exp() / k;
                head + integrate(|t| density(t) - (((k - 1.0) * t.ln()) - ln_gamma(k)).exp(), 0.0, x, 1e-14, 1e-12).unwrap()
            } else {
                integrate(density, prev, x, 1e-14, 1e-12).unwrap()
            };
            prev = x;
            table.push((x, acc));
        }
        let lookup = |x: f64| {
            let i = table.partition_point(|&(t, _)| t < x);
            Ok(table[i].1)
        };
        let stat = ks_statistic(&draws, lookup).unwrap();
        assert!(stat < t_max(), "shape {k}: {stat}");
    }
}

#[test]
fn fisher_draws_follow_the_exact_cdf() {
    for (p, seed) in [(f(1.0, 2.0, 4.0), 4), (f(-3.0, 0.8, 1.6), 5), (f(10.0, 8.0, 10.0), 6)] {
        let mut rng = RandomStream::new(seed, 0);
        let draws: Vec<f64> = (0..DEFAULT_SAMPLE_SIZE).map(|_| p.sample(&mut rng)).collect();
        let stat = ks_statistic(&draws, |x| p.cdf(x)).unwrap();
        assert!(stat < t_max(), "{p:?}: {stat}");
    }
}

#[test]
fn ratio_draws_follow_the_exact_cdf() {
    let specs = [
        RatioSpec::new(vec![f(1.0, 5.0, 10.0); 2], vec![f(1.0, 5.0, 10.0); 2]).unwrap(),
        RatioSpec::new(vec![f(3.0, 2.0, 4.0), f(0.0, 1.5, 2.5)], vec![f(-2.0, 3.0, 6.0)]).unwrap(),
        RatioSpec::product(vec![f(5.0, 6.0, 3.0); 3]).unwrap(),
    ];
    // each check is a 5% test; two of three independent streams must accept
    for (i, s) in specs.iter().enumerate() {
        let stats: Vec<f64> = (0..3u64)
            .map(|k| {
                let mut rng = RandomStream::new(7, 10 * i as u64 + k);
                let draws: Vec<f64> = (0..DEFAULT_SAMPLE_SIZE).map(|_| s.sample(&mut rng)).collect();
                ks_statistic(&draws, |z| s.cdf(z)).unwrap()
            })
            .collect();
        assert!(stats.iter().filter(|&&t| t < t_max()).count() >= 2, "spec {i}: {stats:?}");
    }
}

#[test]
fn simulated_curve_matches_exact_cdf() {
    let s = RatioSpec::new(vec![f(1.0, 2.0, 4.0); 2], vec![f(1.0, 2.0, 4.0); 2]).unwrap();
    let grid: Vec<f64> = (0..15).map(|i| 0.05 * 1.5f64.powi(i)).collect();
    let n = 200_000;
    let est = estimate_cdf_curve(|r| s.sample(r), &grid, n, &mut RandomStream::new(8, 0));
    for (z, e) in grid.iter().zip(&est) {
        let exact = s.cdf(*z).unwrap();
        assert!(e.z_score(exact) < 3.5, "z={z}: {exact} vs {e:?}");
    }
    assert!(est.windows(2).all(|w| w[1].value >= w[0].value));
}

#[test]
fn binomial_coverage() {
    let p = 0.37;
    let covered = (0..100u64)
        .filter(|&seed| {
            let mut rng = RandomStream::new(seed, 3);
            let est = estimate_probability(|r| r.random::<f64>(), |&u| u < p, 20_000, &mut rng);
            (est.value - p).abs() <= 3.0 * est.stderr
        })
        .count();
    assert!(covered >= 99, "{covered}/100");
}
