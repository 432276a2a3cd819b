//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits non-zero if any check fails.

use std::path::PathBuf;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mmwave_connectivity::analytics::{
    all_bounds, conditional_upper_bound, connectivity_upper_bound, optimal_window_bound,
};
use mmwave_connectivity::geometry::{
    free_space_connected, grid_flood_fill_connected, witness_is_sound, AxisRect, CompressedGrid, Strip,
};
use mmwave_connectivity::model::{sample_field, BlockageModelParams, Condition, GrainDistribution, LinkGeometry};
use mmwave_connectivity::montecarlo::{estimate_connectivity, paired_kappa_comparison};
use mmwave_connectivity::rng::mix;
use mmwave_connectivity::QuadratureSpec;

const SEED: u64 = 0x5eed_2024;
const Z_99_ONE_SIDED: f64 = 2.326_347_874_040_841;

struct Verdict {
    pass: bool,
    detail: String,
}

type Check = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn fixed(lambda: f64) -> BlockageModelParams {
    BlockageModelParams::fixed(lambda, 10.0, 10.0).unwrap()
}

fn link(d: f64, kappa: f64) -> LinkGeometry {
    LinkGeometry::new(d, kappa).unwrap()
}

fn los_matches_closed_form() -> Verdict {
    let est = estimate_connectivity(&fixed(1e-4), &link(200.0, 0.0), Condition::Unconditional, 100_000, SEED).unwrap();
    let target = (-0.21f64).exp();
    let gap = (est.mean - target).abs();
    verdict(
        gap <= 3.0 * est.std_err,
        format!("mc {:.6} vs {:.6}, |gap| {:.2e}, 3se {:.2e}", est.mean, target, gap, 3.0 * est.std_err),
    )
}

fn bound_dominates_estimates() -> Verdict {
    let quad = QuadratureSpec::default();
    let laws = [
        (
            "deterministic",
            GrainDistribution::deterministic(10.0).unwrap(),
            GrainDistribution::deterministic(10.0).unwrap(),
        ),
        ("uniform", GrainDistribution::uniform(5.0, 15.0).unwrap(), GrainDistribution::uniform(5.0, 15.0).unwrap()),
    ];
    let mut points = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for (name, w, l) in &laws {
        for lambda in [1e-5, 1e-4, 5e-4, 1e-3] {
            let params = BlockageModelParams::new(lambda, w.clone(), l.clone()).unwrap();
            for kappa in [0.0, 5.0, 10.0, 20.0, 100.0] {
                let lk = link(200.0, kappa);
                let bound = connectivity_upper_bound(&params, &lk, &quad).unwrap().value;
                let est =
                    estimate_connectivity(&params, &lk, Condition::Unconditional, 10_000, mix(SEED, points)).unwrap();
                let excess = est.mean - 3.0 * est.std_err - bound;
                worst = worst.max(excess);
                if excess > 0.0 {
                    failures.push(format!("{name} lambda={lambda} kappa={kappa}"));
                }
                points += 1;
            }
        }
    }
    verdict(failures.is_empty(), format!("{points} points, max(mc - 3se - bound) {worst:.2e} {failures:?}"))
}

fn bound_is_tight_when_sparse() -> Verdict {
    let params = fixed(1e-5);
    let lk = link(200.0, 20.0);
    let bound = connectivity_upper_bound(&params, &lk, &QuadratureSpec::default()).unwrap().value;
    let est = estimate_connectivity(&params, &lk, Condition::Unconditional, 100_000, SEED).unwrap();
    let tol = (3.0 * est.std_err).max(0.002);
    let gap = (est.mean - bound).abs();
    verdict(gap <= tol, format!("mc {:.6} vs bound {:.6}, |gap| {:.2e}, tol {:.2e}", est.mean, bound, gap, tol))
}

fn moderate_window_is_nearly_optimal() -> Verdict {
    let paired = paired_kappa_comparison(&fixed(5e-4), 200.0, &[0.0, 20.0, 100.0], 100_000, SEED).unwrap();
    let wide_gain = paired.difference(1, 2);
    let relay_gain = paired.difference(0, 1);
    let pass = (0.0..=0.02).contains(&wide_gain.mean) && relay_gain.is_positive_at(Z_99_ONE_SIDED);
    verdict(
        pass,
        format!(
            "means {:.5}/{:.5}/{:.5}; mean(100)-mean(20) {:.5}; mean(20)-mean(0) {:.5} (se {:.2e})",
            paired.estimates[0].mean,
            paired.estimates[1].mean,
            paired.estimates[2].mean,
            wide_gain.mean,
            relay_gain.mean,
            relay_gain.std_err
        ),
    )
}

fn wide_grains_make_window_irrelevant() -> Verdict {
    let params = BlockageModelParams::fixed(5e-4, 300.0, 10.0).unwrap();
    let kappas = [0.0, 10.0, 50.0];
    let quad = QuadratureSpec::default();
    let bounds: Vec<f64> =
        kappas.iter().map(|&k| connectivity_upper_bound(&params, &link(200.0, k), &quad).unwrap().value).collect();
    let bound_spread = bounds.iter().map(|b| (b - bounds[0]).abs()).fold(0.0, f64::max);

    let paired = paired_kappa_comparison(&params, 200.0, &kappas, 100_000, SEED).unwrap();
    let se = paired.estimates.iter().map(|e| e.std_err).fold(0.0, f64::max);
    let means: Vec<f64> = paired.estimates.iter().map(|e| e.mean).collect();
    let mc_spread = means.iter().map(|m| (m - means[0]).abs()).fold(0.0, f64::max);
    verdict(
        bound_spread <= 1e-12 && mc_spread <= 2.0 * se,
        format!(
            "bound {:.9} spread {bound_spread:.1e}; mc {means:?} spread {mc_spread:.1e}, 2se {:.2e}",
            bounds[0],
            2.0 * se
        ),
    )
}

fn optimal_window_matches_kernel_bound() -> Verdict {
    let quad = QuadratureSpec::default();
    let det = GrainDistribution::deterministic;
    let laws = vec![
        ("deterministic", det(10.0).unwrap(), det(10.0).unwrap()),
        ("deterministic wide", det(300.0).unwrap(), det(10.0).unwrap()),
        (
            "pmf",
            GrainDistribution::pmf(vec![5.0, 10.0, 250.0], vec![0.3, 0.5, 0.2]).unwrap(),
            GrainDistribution::pmf(vec![4.0, 8.0, 16.0], vec![0.25, 0.25, 0.5]).unwrap(),
        ),
        ("uniform", GrainDistribution::uniform(5.0, 15.0).unwrap(), GrainDistribution::uniform(2.0, 30.0).unwrap()),
        (
            "uniform across d",
            GrainDistribution::uniform(150.0, 260.0).unwrap(),
            GrainDistribution::uniform(1.0, 12.0).unwrap(),
        ),
    ];
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (name, w, l) in laws {
        let params = BlockageModelParams::new(3e-4, w, l).unwrap();
        let (kappa_star, opt) = optimal_window_bound(&params, 200.0, &quad).unwrap();
        let direct = connectivity_upper_bound(&params, &link(200.0, kappa_star), &quad).unwrap();
        let rel = ((opt.value - direct.value) / direct.value).abs();
        worst = worst.max(rel);
        if rel > 1e-12 {
            failures.push(name);
        }
    }
    verdict(failures.is_empty(), format!("max relative gap {worst:.1e} {failures:?}"))
}

fn random_law(rng: &mut ChaCha8Rng) -> GrainDistribution {
    match rng.random_range(0..3) {
        0 => GrainDistribution::deterministic(rng.random_range(0.5..400.0)).unwrap(),
        1 => {
            let lo = rng.random_range(0.5..300.0);
            GrainDistribution::uniform(lo, lo + rng.random_range(0.1..200.0)).unwrap()
        }
        _ => {
            let k = rng.random_range(1..5);
            let values = (0..k).map(|_| rng.random_range(0.5..400.0)).collect();
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            GrainDistribution::pmf(values, raw.iter().map(|p| p / total).collect()).unwrap()
        }
    }
}

fn conditioning_orders_bounds() -> Verdict {
    let quad = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = 0;
    for _ in 0..1000 {
        let lambda = 10f64.powf(rng.random_range(-6.0..-2.0));
        let params = BlockageModelParams::new(lambda, random_law(&mut rng), random_law(&mut rng)).unwrap();
        let lk = link(rng.random_range(1.0..500.0), rng.random_range(0.0..100.0));
        let b = all_bounds(&params, &lk, &quad).unwrap();
        if !(b.unconditional.value <= b.src_outdoor.value && b.src_outdoor.value <= b.both_outdoor.value) {
            violations += 1;
        }
    }

    let mut mc_failures = Vec::new();
    for (i, lambda) in [1e-4, 5e-4, 1e-3].into_iter().enumerate() {
        let lk = link(200.0, 20.0);
        let params = fixed(lambda);
        let ests: Vec<_> = Condition::ALL
            .iter()
            .map(|&c| estimate_connectivity(&params, &lk, c, 50_000, mix(SEED, i as u64)).unwrap())
            .collect();
        let ordered = ests.windows(2).all(|p| p[0].mean <= p[1].mean + 3.0 * p[0].std_err.hypot(p[1].std_err));
        let bounds_hold = Condition::ALL.iter().zip(&ests).all(|(&c, e)| {
            let bound = conditional_upper_bound(&params, &lk, c, &quad).unwrap().value;
            e.mean - 3.0 * e.std_err <= bound
        });
        if !(ordered && bounds_hold) {
            mc_failures.push(lambda);
        }
    }
    verdict(
        violations == 0 && mc_failures.is_empty(),
        format!("1000 analytic tuples, {violations} violations; mc spot checks failing at lambda {mc_failures:?}"),
    )
}

fn exact_and_raster_agree() -> Verdict {
    let params = fixed(5e-4);
    let lk = link(200.0, 20.0);
    let strip = lk.strip();
    let n = 10_000u64;
    let mut disagreements = Vec::new();
    for i in 0..n {
        let field = sample_field(&params, &lk, mix(SEED, i));
        let exact = free_space_connected(&strip, &field.obstacles, lk.source(), lk.destination()).unwrap().connected;
        let raster = grid_flood_fill_connected(&strip, &field.obstacles, lk.source(), lk.destination(), 0.05).unwrap();
        if exact != raster {
            disagreements.push((i, exact, field.obstacles));
        }
    }
    let persisting: Vec<String> = disagreements
        .iter()
        .filter(|(_, exact, obstacles)| {
            grid_flood_fill_connected(&strip, obstacles, lk.source(), lk.destination(), 0.025).unwrap() != *exact
        })
        .map(|(i, _, obstacles)| format!("trial {i} thinnest slab {:.1e} m", thinnest_slab(&strip, obstacles)))
        .collect();
    let agreement = 1.0 - disagreements.len() as f64 / n as f64;
    verdict(
        agreement >= 0.999 && persisting.is_empty(),
        format!(
            "agreement {:.4}% ({} disagreements), {} persist at 0.025 {persisting:?}",
            agreement * 100.0,
            disagreements.len(),
            persisting.len()
        ),
    )
}

/// Narrowest band between consecutive compressed grid lines; a free sliver
/// thinner than half a raster cell is invisible to center sampling.
fn thinnest_slab(strip: &Strip, obstacles: &[AxisRect]) -> f64 {
    let grid = CompressedGrid::build(strip, obstacles, &[strip.source(), strip.destination()]);
    let gaps = |v: &[f64]| v.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
    gaps(grid.x_lines()).min(gaps(grid.y_lines()))
}

fn couplings_hold_per_realization() -> Verdict {
    let lambdas = [2e-4, 5e-4, 1e-3, 2e-3];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let (mut subset_breaks, mut window_breaks, mut unsound, mut connected_count) = (0, 0, 0, 0);
    for i in 0..10_000u64 {
        let params = fixed(lambdas[i as usize % lambdas.len()]);
        let wide = link(200.0, 40.0);
        let field = sample_field(&params, &wide, mix(SEED, i));
        let narrow_kappa = rng.random_range(0.0..40.0);
        let narrow = link(200.0, narrow_kappa);

        let decide = |lk: &LinkGeometry, obstacles: &[AxisRect]| {
            free_space_connected(&lk.strip(), obstacles, lk.source(), lk.destination()).unwrap()
        };
        let full = decide(&narrow, &field.obstacles);
        let subset: Vec<AxisRect> = field.obstacles.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if full.connected && !decide(&narrow, &subset).connected {
            subset_breaks += 1;
        }
        if full.connected && !decide(&wide, &field.obstacles).connected {
            window_breaks += 1;
        }
        if full.connected {
            connected_count += 1;
            let strip: Strip = narrow.strip();
            let path = full.witness.as_deref().unwrap_or(&[]);
            if !witness_is_sound(&strip, &field.obstacles, narrow.source(), narrow.destination(), path) {
                unsound += 1;
            }
        }
    }
    verdict(
        subset_breaks + window_breaks + unsound == 0,
        format!(
            "10000 realizations ({connected_count} connected): subset breaks {subset_breaks}, window breaks {window_breaks}, unsound witnesses {unsound}"
        ),
    )
}

fn sweep_is_byte_identical() -> Verdict {
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/window_comparison.json");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (run, workers) in [(0, 1), (1, 1), (2, 2), (3, 4)] {
        let out = dir.path().join(format!("run{run}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_mmwave-conn"))
            .args(["sweep", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--workers", &workers.to_string()])
            .status()
            .unwrap();
        if !status.success() {
            return verdict(false, format!("sweep exited with {status}"));
        }
        outputs.push(std::fs::read(&out).unwrap());
    }
    let identical = outputs.windows(2).all(|p| p[0] == p[1]);
    verdict(identical && !outputs[0].is_empty(), format!("4 runs (workers 1,1,2,4), {} bytes each", outputs[0].len()))
}

fn main() {
    let checks: [Check; 10] = [
        ("line-of-sight estimate matches closed form", los_matches_closed_form),
        ("upper bound dominates estimates on 40 points", bound_dominates_estimates),
        ("upper bound is tight for sparse obstacles", bound_is_tight_when_sparse),
        ("moderate window is nearly optimal", moderate_window_is_nearly_optimal),
        ("window is irrelevant for grains wider than the link", wide_grains_make_window_irrelevant),
        ("optimal-window bound equals kernel bound at l_max", optimal_window_matches_kernel_bound),
        ("conditioning on outdoor endpoints orders the bounds", conditioning_orders_bounds),
        ("exact search agrees with raster oracle", exact_and_raster_agree),
        ("monotone couplings and sound witnesses per realization", couplings_hold_per_realization),
        ("sweep output is byte-identical across runs and workers", sweep_is_byte_identical),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let v = check();
        println!("acceptance {:>2} {}: {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
