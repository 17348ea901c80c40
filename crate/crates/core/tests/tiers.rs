use std::f64::consts::{FRAC_PI_2, TAU};

use proptest::prelude::*;

use cavity_ghz::calibration::{calibrate_report, revival_detuning, CalibrationResult, CalibrationTargets};
use cavity_ghz::device::{DeviceParams, DriveParams, Thresholds, Topology};
use cavity_ghz::dynamics::{evolve, evolve_pure, IntegrationConfig, NoObserver};
use cavity_ghz::ghz::FrameSpec;
use cavity_ghz::hamiltonian::{
    build_effective, build_full, build_reduced, collapse_set, collective_x, AnalyticPropagator, HamiltonianModel,
    Rates, TermHamiltonian, Truncation,
};
use cavity_ghz::quantum::{hermitian_eigen, DensityMatrix, OperatorMatrix, StateVector};
use cavity_ghz::units::mhz;

struct Setup {
    dev: DeviceParams<f64>,
    cal: CalibrationResult<f64>,
}

impl Setup {
    fn new(topology: Topology, j: f64, g: &[f64], g_target: f64, omega: f64) -> Self {
        let dev = DeviceParams::with_uniform_qubits(
            topology,
            mhz(6000.0),
            mhz(j),
            g.iter().copied().map(mhz).collect(),
            mhz(600.0),
            revival_detuning(mhz(g_target), 1),
        )
        .unwrap();
        let targets = CalibrationTargets { g: mhz(g_target), omega: mhz(omega), omega_z: mhz(600.0), k: 1 };
        let cal = calibrate_report(&dev, targets, FRAC_PI_2, 0.0, 3, Thresholds::default()).unwrap();
        Self { dev, cal }
    }

    /// Two-qubit scenario with the Rabi rate scaled by `drive`.
    fn two(topology: Topology, drive: f64) -> Self {
        match topology {
            Topology::TwoCavity => Self::new(topology, 81.0, &[84.9, 87.0], 15.0, 90.0 * drive),
            Topology::OneCavity => Self::new(topology, 0.0, &[45.0, 46.5], 15.0, 90.0 * drive),
        }
    }

    fn four(topology: Topology, drive: f64) -> Self {
        match topology {
            Topology::TwoCavity => Self::new(topology, 230.0, &[31.8, 32.5, 33.2, 33.9], 10.0, 60.0 * drive),
            Topology::OneCavity => Self::new(topology, 0.0, &[28.0, 29.0, 30.0, 31.0], 10.0, 80.0 * drive),
        }
    }

    fn drive(&self) -> DriveParams<f64> {
        self.cal.drive_params(&self.dev, FRAC_PI_2, 0.0)
    }

    fn tiers(&self, levels: usize) -> [TermHamiltonian<f64>; 3] {
        let drv = self.drive();
        [
            build_full(&self.dev, &drv, Truncation::new(levels, 2).unwrap()).unwrap(),
            build_effective(&self.dev, &drv, levels).unwrap(),
            build_reduced(&self.cal, levels).unwrap(),
        ]
    }
}

fn final_ket(model: &TermHamiltonian<f64>, t: f64, steps_per_period: f64) -> StateVector<f64> {
    let cfg = IntegrationConfig::for_model(model, t, steps_per_period, 1).unwrap();
    let psi0 = model.layout().ground_state();
    evolve_pure(&psi0, model, &cfg, &NoObserver).unwrap().final_ket().unwrap().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_tier_is_hermitian(t in 0.0..2.0e-7f64, four in any::<bool>(), two_cavity in any::<bool>()) {
        let topology = if two_cavity { Topology::TwoCavity } else { Topology::OneCavity };
        let s = if four { Setup::four(topology, 1.0) } else { Setup::two(topology, 1.0) };
        for h in s.tiers(3) {
            prop_assert!(h.evaluate(t).hermiticity_error() <= 1e-12 * h.norm_bound());
        }
    }

    /// Columns that start with at most two photons keep unit norm and stay
    /// orthogonal once the truncation leaves room for the displacement.
    #[test]
    fn propagator_is_unitary_on_low_photon_columns(phase in 0.0..TAU, two_cavity in any::<bool>()) {
        let topology = if two_cavity { Topology::TwoCavity } else { Topology::OneCavity };
        let s = Setup::two(topology, 1.0);
        let levels = 40;
        let p = AnalyticPropagator::from_calibration(&s.cal, levels).unwrap();
        let u = p.propagator(phase / s.cal.delta).unwrap();
        let cols = 3 * (1 << s.cal.n_qubits());
        for a in 0..cols {
            for b in 0..cols {
                let dot: cavity_ghz::C64 = (0..u.dim()).map(|r| u.get(r, a).conj() * u.get(r, b)).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - expected).norm() <= 1e-9, "({a}, {b}) -> {dot}");
            }
        }
    }
}

#[test]
fn propagator_is_unitary_at_the_revival() {
    for s in [Setup::two(Topology::TwoCavity, 1.0), Setup::four(Topology::OneCavity, 1.0)] {
        let p = AnalyticPropagator::from_calibration(&s.cal, 6).unwrap();
        let u = p.propagator(TAU / s.cal.delta).unwrap();
        assert!(u.unitarity_error() <= 1e-9, "{}", u.unitarity_error());
    }
}

#[test]
fn zero_rates_match_the_pure_state_run() {
    for s in [Setup::two(Topology::TwoCavity, 1.0), Setup::two(Topology::OneCavity, 1.0)] {
        let [_, eff, red] = s.tiers(5);
        for h in [eff, red] {
            // a pure density matrix has no dissipative margin above the
            // positivity guard, so the grid is finer than the default
            let collapse = collapse_set(h.layout(), Rates::zero()).unwrap();
            let cfg = IntegrationConfig::for_model(&h, s.cal.tau, 80.0, 4).unwrap();
            let psi0 = h.layout().ground_state();
            let mixed = evolve(&psi0.projector(), &h, &collapse, &cfg, &NoObserver).unwrap();
            let pure = evolve_pure(&psi0, &h, &cfg, &NoObserver).unwrap();
            let rho: &DensityMatrix<f64> = mixed.final_density().unwrap();
            let diff = rho.matrix().max_abs_diff(pure.final_ket().unwrap().projector().matrix()).unwrap();
            assert!(diff <= 1e-7, "{diff:e}");
        }
    }
}

/// The gap between the effective and reduced models is the drive term that
/// rotates at the dressed Rabi rate; it closes as the drive grows.
#[test]
fn effective_model_approaches_the_reduced_one_under_strong_drive() {
    for s in [
        Setup::two(Topology::TwoCavity, 16.0),
        Setup::two(Topology::OneCavity, 16.0),
        Setup::four(Topology::TwoCavity, 16.0),
    ] {
        let levels = 10;
        let [_, eff, red] = s.tiers(levels);
        let tau = s.cal.tau;
        let psi_eff = final_ket(&eff, tau, 40.0);
        let frame = FrameSpec::new(&s.dev, &s.drive()).unwrap();
        let r = OperatorMatrix::identity(levels).kron(&frame.rotation(tau));
        let psi_red = final_ket(&red, tau, 40.0).apply(&r).unwrap();
        let overlap = psi_eff.inner(&psi_red).unwrap().norm_sqr();
        assert!(overlap >= 0.999, "{} qubits: {overlap}", s.cal.n_qubits());
    }
}

#[test]
fn effective_coupling_flips_sign_after_half_a_detuning_period() {
    let s = Setup::two(Topology::TwoCavity, 1.0);
    let [_, eff, _] = s.tiers(3);
    let (h0, h1) = (eff.evaluate(0.0), eff.evaluate(std::f64::consts::PI / s.cal.delta));
    let drive = eff.static_part().to_dense();
    let mut checked = 0;
    for r in 0..h0.dim() {
        for c in 0..h0.dim() {
            let (a, b) = (h0.get(r, c) - drive.get(r, c), h1.get(r, c) - drive.get(r, c));
            if a.norm() > 0.0 {
                assert!((a + b).norm() <= 1e-9 * a.norm(), "({r}, {c})");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn collective_spin_of_two_qubits() {
    let (mut values, _) = hermitian_eigen(&collective_x::<f64>(2, Topology::TwoCavity).unwrap());
    values.sort_by(f64::total_cmp);
    for (v, e) in values.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
        assert!((v - e).abs() < 1e-12);
    }
}
