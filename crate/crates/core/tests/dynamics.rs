//! Long-time behaviour of the split-step evolution on exact solutions.

use solwave::closed_form::{symmetric_pair, traveling_wave, TravelingWaveSpec};
use solwave::dynamics::{evolve, propagate, stability_experiment, EvolutionConfig, StabilityConfig};
use solwave::field::{y_norm, Grid};
use solwave::groundstate::{minimize, ConstraintPair, MinimizerConfig, StartKind};
use solwave::model::ModelParams;

fn quartic() -> ModelParams {
    ModelParams::single(1.0, 1.0, 1.0, 4.0, 4.0, 2.0).unwrap()
}

fn traveling_error(sigma: f64) -> f64 {
    let grid = Grid::default_box();
    let spec = TravelingWaveSpec::new(1.0, 1.0, sigma, symmetric_pair(1.0, 1.0, &grid).unwrap()).unwrap();
    let horizon = 4.0;
    let cfg = EvolutionConfig {
        dt: 2.5e-4,
        horizon,
        sample_stride: 4000,
    };
    let (end, _) = evolve(&quartic(), &traveling_wave(&spec, 0.0), &cfg).unwrap();
    y_norm(&end.sub(&traveling_wave(&spec, horizon)))
}

#[test]
fn evolution_tracks_standing_wave() {
    let e = traveling_error(0.0);
    assert!(e < 1e-6, "{e:e}");
}

#[test]
fn evolution_tracks_traveling_wave() {
    let e = traveling_error(0.5);
    assert!(e < 1e-6, "{e:e}");
}

#[test]
fn backward_steps_undo_forward_steps() {
    let grid = Grid::default_box();
    let spec = TravelingWaveSpec::new(1.0, 1.0, 0.5, symmetric_pair(1.0, 1.0, &grid).unwrap()).unwrap();
    let start = traveling_wave(&spec, 0.0);
    let forward = propagate(&quartic(), &start, 1e-3, 1000).unwrap();
    let back = propagate(&quartic(), &forward, -1e-3, 1000).unwrap();
    let d = y_norm(&back.sub(&start));
    assert!(d < 1e-10, "{d:e}");
}

#[test]
fn unperturbed_ground_state_stays_on_its_orbit() {
    let cfg = MinimizerConfig {
        starts: vec![StartKind::SechAnsatz],
        ..Default::default()
    };
    let g = minimize(&quartic(), ConstraintPair::new(2.0, 2.0).unwrap(), &cfg).unwrap();
    let run = StabilityConfig {
        evolution: EvolutionConfig {
            dt: 5e-4,
            horizon: 20.0,
            sample_stride: 1000,
        },
        seed: 0,
    };
    let r = stability_experiment(&quartic(), &g, 0.0, &run).unwrap();
    assert!(r.max_distance < 1e-6, "{:e}", r.max_distance);
}
