//! CSV and text rendering. Numbers are written with `{:.14e}`, which keeps
//! 15 significant digits and makes reruns byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use cavity_ghz::device::ValidityReport;
use cavity_ghz::dynamics::Trajectory;
use cavity_ghz::units::{to_mhz, to_ns};

use crate::run::Calibrated;
use crate::CliError;

pub const TRAJECTORY_HEADER: &str = "t_ns,fidelity,trace,purity";

pub fn trajectory_csv(tr: &Trajectory<f64>) -> String {
    let mut out = String::with_capacity(64 * (tr.times.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, r) in tr.times.iter().zip(&tr.records) {
        writeln!(out, "{:.14e},{:.14e},{:.14e},{:.14e}", to_ns(*t), r.fidelity, r.trace, r.purity)
            .expect("writing to a string");
    }
    out
}

pub const CALIBRATION_HEADER: &str = "qubit,g_over_2pi_MHz,alpha,A_over_2pi_MHz,Omega_over_2pi_MHz,\
worst_sideband_ratio,drive_ratio,delta_over_2pi_MHz,tau_ns,frame_cycles";

pub fn calibration_csv(cal: &Calibrated) -> String {
    let c = &cal.calibration;
    let cycles = c.commensurability().cycles;
    let mut out = String::new();
    out.push_str(CALIBRATION_HEADER);
    out.push('\n');
    for j in 0..c.n_qubits() {
        writeln!(
            out,
            "{},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
            j + 1,
            to_mhz(cal.device.g[j]),
            c.alpha[j],
            to_mhz(c.a[j]),
            to_mhz(c.rabi[j]),
            c.validity.per_qubit_worst[j].ratio,
            c.validity.drive_ratios[j],
            to_mhz(c.delta),
            to_ns(c.tau),
            cycles
        )
        .expect("writing to a string");
    }
    out
}

/// Human-readable calibration table.
pub fn calibration_table(cal: &Calibrated) -> String {
    let c = &cal.calibration;
    let mut out = String::new();
    let w = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    w(&mut out, format!("topology: {}", c.topology.name()));
    w(&mut out, format!(
        "g/2pi = {:.4} MHz, Omega/2pi = {:.4} MHz, omega_z/2pi = {:.4} MHz, k = {}",
        to_mhz(c.g_eff),
        to_mhz(c.omega_eff),
        to_mhz(c.omega_z),
        c.k
    ));
    w(&mut out, format!("{:>5} {:>12} {:>10} {:>14} {:>16}", "qubit", "g/2pi MHz", "alpha", "A/2pi MHz", "Omega_j/2pi MHz"));
    for j in 0..c.n_qubits() {
        w(&mut out, format!(
            "{:>5} {:>12.4} {:>10.4} {:>14.4} {:>16.4}",
            j + 1,
            to_mhz(cal.device.g[j]),
            c.alpha[j],
            to_mhz(c.a[j]),
            to_mhz(c.rabi[j])
        ));
    }
    let cycles = c.commensurability();
    w(&mut out, format!("delta/2pi = {:.4} MHz, tau = {:.4} ns", to_mhz(c.delta), to_ns(c.tau)));
    w(&mut out, format!(
        "frame cycles Omega*tau/2pi = {:.6}{}",
        cycles.cycles,
        if cycles.integer { "" } else { " (not an integer)" }
    ));
    w(&mut out, format!("validity: {} ({})", pass_fail(c.validity.passes()), c.validity.summary()));
    out
}

/// One line per checked sideband, then the drive ratios.
pub fn validity_text(report: &ValidityReport<f64>) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>5} {:>4} {:>3} {:>16} {:>12} {:>10}",
        "qubit", "mode", "m", "|detuning|/2pi", "scale/2pi", "ratio"
    )
    .expect("writing to a string");
    for s in &report.sidebands {
        let flag = if s.ratio < report.thresholds.sideband { "  FAIL" } else { "" };
        writeln!(
            out,
            "{:>5} {:>4} {:>3} {:>12.4} MHz {:>8.4} MHz {:>10.4}{flag}",
            s.qubit + 1,
            s.mode.to_string(),
            s.m,
            to_mhz(s.detuning),
            to_mhz(s.scale),
            s.ratio
        )
        .expect("writing to a string");
    }
    for (j, r) in report.drive_ratios.iter().enumerate() {
        let flag = if *r < report.thresholds.drive { "  FAIL" } else { "" };
        writeln!(out, "qubit {} drive ratio {:.4}{flag}", j + 1, r).expect("writing to a string");
    }
    writeln!(out, "{}", report.summary()).expect("writing to a string");
    writeln!(out, "{}", pass_fail(report.passes())).expect("writing to a string");
    out
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
