//! One driver per subcommand: build the model from the resolved
//! configuration, run it, and write that mode's artifacts into the
//! output directory.

use std::path::Path;

use nalgebra::Vector3;
use stokeswim_core::{
    calibrate as run_calibration, classify_mode, design_point, design_sweep, lin_spaced,
    log_spaced, solve_speeds, spacing_sweep, Calibration, CalibrationMode, DesignPoint,
    DriveLimits, FreeSample, FreeState, LinearPlant, ModelError, PivotSample, PivotState,
    RunConfig, SweepKind, Swimmer, TailForcing,
};

use crate::output::{self, float};
use crate::CliError;

/// Ordered key = value pairs destined for `summary.txt`.
type SummaryEntries = Vec<(&'static str, String)>;

/// Pitch relaxation about the fixed support under the configured
/// drive pair.
pub fn pivot(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let rates = [cfg.omega1, cfg.omega2];
    let swimmer = build_swimmer(cfg, rates)?;
    swimmer.check_time_step(cfg.time_step)?;
    let mut state = PivotState::at_rest();
    let samples = swimmer.run_pivot(&mut state, cfg.time_step, cfg.step_count())?;

    write_pivot_trajectory(cfg, out, &samples, rates)?;
    let (entries, beta_ss) = pivot_summary(cfg, &samples, rates)?;
    output::write_summary(out, &entries)?;

    println!(
        "pivot: {} steps of {} s, beta_ss = {:.3} deg -> {}",
        samples.len(),
        cfg.time_step,
        beta_ss.to_degrees(),
        out.display()
    );
    Ok(())
}

/// Free rigid-body swim from rest.
pub fn free(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let rates = [cfg.omega1, cfg.omega2];
    let swimmer = build_swimmer(cfg, rates)?;
    swimmer.check_time_step(cfg.time_step)?;
    let mut state = FreeState::at_rest();
    let samples = swimmer.run_free(&mut state, cfg.time_step, cfg.step_count())?;

    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            let q = &s.orientation;
            vec![
                s.time,
                s.position.x,
                s.position.y,
                s.position.z,
                s.velocity.x,
                s.velocity.y,
                s.velocity.z,
                q.w,
                q.i,
                q.j,
                q.k,
                s.omega_body.x,
                s.omega_body.y,
                s.omega_body.z,
                s.tail_force_z[0],
                s.tail_force_z[1],
                s.tail_torque.y,
                tilt_of(s),
            ]
        })
        .collect();
    output::write_table(
        out,
        "trajectory.csv",
        output::FREE_SCHEMA,
        output::FREE_HEADER,
        &rows,
    )?;

    let omega = rates[0].abs().max(rates[1].abs());
    let window = rev_window(samples.len(), cfg.time_step, omega);
    let steady = &samples[samples.len() - window..];
    let tilt_ss = mean(steady, tilt_of);
    let mean_speed = mean(steady, |s| s.velocity.norm());
    let mean_f1 = mean(steady, |s| s.tail_force_z[0]);
    let mean_f2 = mean(steady, |s| s.tail_force_z[1]);
    let mean_ty = mean(steady, |s| s.tail_torque.y);
    let numbers = design_numbers(cfg)?;
    let mode = classify_mode(
        rates,
        mean_f1 + mean_f2,
        mean_ty,
        cfg.viscosity,
        cfg.helix_radius,
        cfg.filament_length,
    );
    let last = samples.last().expect("at least one step");
    output::write_summary(
        out,
        &[
            ("beta_ss_rad", float(tilt_ss)),
            ("beta_ss_deg", float(tilt_ss.to_degrees())),
            ("thrust_number", float(numbers.thrust_number)),
            ("torque_number", float(numbers.torque_number)),
            ("mean_f_tail1_z_n", float(mean_f1)),
            ("mean_f_tail2_z_n", float(mean_f2)),
            ("mean_tail_torque_y_n_m", float(mean_ty)),
            ("displacement_z_m", float(last.position.z)),
            ("mean_speed_m_per_s", float(mean_speed)),
            ("locomotion_mode", mode.as_str().to_string()),
        ],
    )?;
    println!(
        "free: {} steps of {} s, drift z = {:.4e} m, mode = {} -> {}",
        samples.len(),
        cfg.time_step,
        last.position.z,
        mode.as_str(),
        out.display()
    );
    Ok(())
}

/// Dimensionless sweep over tail shape ratios or tail spacing.
pub fn sweep(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let settings = cfg.sweep_settings();
    match cfg.sweep_kind {
        SweepKind::Grid => {
            let wl = log_spaced(cfg.grid_wl_min, cfg.grid_wl_max, cfg.grid_wl_count);
            let rw = log_spaced(cfg.grid_rw_min, cfg.grid_rw_max, cfg.grid_rw_count);
            let points = design_sweep(&wl, &rw, &settings)?;
            let rows: Vec<Vec<f64>> = points
                .iter()
                .map(|p| {
                    vec![
                        p.wavelength_over_length,
                        p.radius_over_wavelength,
                        p.thrust_number,
                        p.torque_number,
                    ]
                })
                .collect();
            output::write_table(
                out,
                "sweep.csv",
                output::GRID_SCHEMA,
                output::GRID_HEADER,
                &rows,
            )?;

            let peak = points
                .iter()
                .max_by(|a, b| a.thrust_number.total_cmp(&b.thrust_number))
                .expect("grid has at least one point");
            output::write_summary(
                out,
                &[
                    ("points", points.len().to_string()),
                    (
                        "thrust_number_min",
                        float(fold_min(&points, |p| p.thrust_number)),
                    ),
                    ("thrust_number_max", float(peak.thrust_number)),
                    (
                        "torque_number_min",
                        float(fold_min(&points, |p| p.torque_number)),
                    ),
                    (
                        "torque_number_max",
                        float(fold_max(&points, |p| p.torque_number)),
                    ),
                    (
                        "peak_thrust_wavelength_over_length",
                        float(peak.wavelength_over_length),
                    ),
                    (
                        "peak_thrust_radius_over_wavelength",
                        float(peak.radius_over_wavelength),
                    ),
                ],
            )?;
            println!(
                "sweep: {} x {} shape grid -> {}",
                wl.len(),
                rw.len(),
                out.display()
            );
        }
        SweepKind::Spacing => {
            let ratios = lin_spaced(
                cfg.spacing_ratio_min,
                cfg.spacing_ratio_max,
                cfg.spacing_ratio_count,
            );
            let points = spacing_sweep(&cfg.helix_spec(), &ratios, &settings)?;
            let rows: Vec<Vec<f64>> = points
                .iter()
                .map(|p| {
                    vec![
                        p.spacing_over_radius,
                        p.counter_thrust_number,
                        p.co_thrust_number,
                        p.torque_number,
                    ]
                })
                .collect();
            output::write_table(
                out,
                "spacing.csv",
                output::SPACING_SCHEMA,
                output::SPACING_HEADER,
                &rows,
            )?;
            output::write_summary(
                out,
                &[
                    ("points", points.len().to_string()),
                    (
                        "counter_thrust_number_max",
                        float(fold_max(&points, |p| p.counter_thrust_number)),
                    ),
                    (
                        "co_thrust_number_min",
                        float(fold_min(&points, |p| p.co_thrust_number)),
                    ),
                    (
                        "torque_number_min",
                        float(fold_min(&points, |p| p.torque_number)),
                    ),
                    (
                        "torque_number_max",
                        float(fold_max(&points, |p| p.torque_number)),
                    ),
                ],
            )?;
            println!(
                "sweep: {} spacing ratios -> {}",
                points.len(),
                out.display()
            );
        }
    }
    Ok(())
}

/// Calibrate gains, invert them for the commanded pitch, then track it
/// closed-form: the planned speed pair is held for the whole run.
pub fn control(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let calibration = calibrate_tails(cfg)?;
    write_calibration_table(out, &calibration)?;

    let head = cfg.head();
    let plant = LinearPlant::new(
        head.restoring_moment(),
        head.rotational_drag(cfg.viscosity),
        cfg.inertia().y,
        cfg.spacing,
    )?;
    let limits = DriveLimits {
        max_thrust: cfg.f_max.unwrap_or(calibration.gains.k1 * cfg.omega_max),
        max_rate: cfg.omega_max,
    };
    let plan = solve_speeds(&plant, &calibration.gains, cfg.beta_ref, &limits)?;
    println!(
        "control: beta_ref {:.2} deg -> drive speeds [{:+.4}, {:+.4}] rad/s, predicted pitch {:.2} deg",
        cfg.beta_ref.to_degrees(),
        plan.rates[0],
        plan.rates[1],
        plan.predicted_pitch.to_degrees()
    );

    let swimmer = build_swimmer(cfg, plan.rates)?;
    swimmer.check_time_step(cfg.time_step)?;
    let mut state = PivotState::at_rest();
    let samples = swimmer.run_pivot(&mut state, cfg.time_step, cfg.step_count())?;
    write_pivot_trajectory(cfg, out, &samples, plan.rates)?;

    let (mut entries, _) = pivot_summary(cfg, &samples, plan.rates)?;
    entries.extend([
        ("beta_ref_rad", float(cfg.beta_ref)),
        ("predicted_pitch_rad", float(plan.predicted_pitch)),
        ("k1_n_s_per_rad", float(calibration.gains.k1)),
        ("k2_n_s_per_rad", float(calibration.gains.k2)),
        ("rate_tail1_rad_per_s", float(plan.rates[0])),
        ("rate_tail2_rad_per_s", float(plan.rates[1])),
        ("thrust_tail1_n", float(plan.thrusts[0])),
        ("thrust_tail2_n", float(plan.thrusts[1])),
    ]);
    output::write_summary(out, &entries)?;
    println!(
        "control: {} tracking steps -> {}",
        samples.len(),
        out.display()
    );
    Ok(())
}

/// Thrust-per-speed calibration only.
pub fn calibrate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let calibration = calibrate_tails(cfg)?;
    write_calibration_table(out, &calibration)?;
    output::write_summary(
        out,
        &[
            ("k1_n_s_per_rad", float(calibration.gains.k1)),
            ("k2_n_s_per_rad", float(calibration.gains.k2)),
            ("r_squared_tail1", float(calibration.fits[0].r_squared)),
            ("r_squared_tail2", float(calibration.fits[1].r_squared)),
            ("calibration_mode", mode_name(calibration.mode).to_string()),
            ("speeds", calibration.points.len().to_string()),
        ],
    )?;
    println!(
        "calibrate: k1 = {:.4e} N s/rad over {} speeds ({}) -> {}",
        calibration.gains.k1,
        calibration.points.len(),
        mode_name(calibration.mode),
        out.display()
    );
    Ok(())
}

fn build_swimmer(cfg: &RunConfig, rates: [f64; 2]) -> Result<Swimmer, ModelError> {
    Ok(Swimmer::new(
        &cfg.geometry(),
        cfg.head(),
        cfg.viscosity,
        cfg.segment_length,
        rates,
        TailForcing::Hydrodynamic,
    )?
    .with_inertia(cfg.inertia()))
}

fn calibrate_tails(cfg: &RunConfig) -> Result<Calibration, ModelError> {
    run_calibration(
        &cfg.geometry(),
        cfg.viscosity,
        cfg.segment_length,
        &cfg.calibration_rates,
        cfg.calibration_mode,
        cfg.phase_samples,
    )
}

fn write_calibration_table(out: &Path, calibration: &Calibration) -> std::io::Result<()> {
    let rows: Vec<Vec<f64>> = calibration
        .points
        .iter()
        .map(|p| vec![p.rate, p.down_thrusts[0], p.down_thrusts[1]])
        .collect();
    output::write_table(
        out,
        "calibration.csv",
        output::CALIBRATION_SCHEMA,
        output::CALIBRATION_HEADER,
        &rows,
    )
}

/// Characteristic dimensionless thrust and pitch couple of the
/// configured tail shape, evaluated on the same path as sweep mode so
/// a one-point sweep at matching ratios reproduces these numbers
/// exactly. The pair couple uses the robot's actual tail spacing.
fn design_numbers(cfg: &RunConfig) -> Result<DesignPoint, ModelError> {
    let wl = cfg.helix_pitch / cfg.filament_length;
    let rw = cfg.helix_radius / cfg.helix_pitch;
    let mut settings = cfg.sweep_settings();
    settings.spacing_over_radius = cfg.spacing / cfg.helix_radius;
    design_point(wl, rw, &settings)
}

fn write_pivot_trajectory(
    cfg: &RunConfig,
    out: &Path,
    samples: &[PivotSample],
    rates: [f64; 2],
) -> std::io::Result<()> {
    let head = cfg.head();
    let damping = head.rotational_drag(cfg.viscosity);
    let omega = rates[0].abs().max(rates[1].abs());
    let force_scale = cfg.viscosity * omega * cfg.helix_radius * cfg.filament_length;
    let torque_scale = force_scale * cfg.helix_radius;
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            let thrust_number = if force_scale > 0.0 {
                0.5 * (s.tail_force_z[0].abs() + s.tail_force_z[1].abs()) / force_scale
            } else {
                0.0
            };
            let torque_number = if torque_scale > 0.0 {
                s.tail_torque_y.abs() / torque_scale
            } else {
                0.0
            };
            vec![
                s.time,
                s.beta,
                s.beta_dot,
                s.tail_force_z[0],
                s.tail_force_z[1],
                s.tail_torque_y,
                -damping * s.beta_dot,
                head.pitch_righting_torque(s.beta),
                thrust_number,
                torque_number,
            ]
        })
        .collect();
    output::write_table(
        out,
        "trajectory.csv",
        output::PIVOT_SCHEMA,
        output::PIVOT_HEADER,
        &rows,
    )
}

/// Summary shared by the pivot and control modes: steady pitch over
/// the last tail revolution, the shape's characteristic dimensionless
/// numbers, and the measured steady loads.
fn pivot_summary(
    cfg: &RunConfig,
    samples: &[PivotSample],
    rates: [f64; 2],
) -> Result<(SummaryEntries, f64), ModelError> {
    let omega = rates[0].abs().max(rates[1].abs());
    let window = rev_window(samples.len(), cfg.time_step, omega);
    let steady = &samples[samples.len() - window..];
    let beta_ss = mean(steady, |s| s.beta);
    let mean_f1 = mean(steady, |s| s.tail_force_z[0]);
    let mean_f2 = mean(steady, |s| s.tail_force_z[1]);
    let mean_ty = mean(steady, |s| s.tail_torque_y);
    let numbers = design_numbers(cfg)?;
    let mode = classify_mode(
        rates,
        mean_f1 + mean_f2,
        mean_ty,
        cfg.viscosity,
        cfg.helix_radius,
        cfg.filament_length,
    );
    let entries = vec![
        ("beta_ss_rad", float(beta_ss)),
        ("beta_ss_deg", float(beta_ss.to_degrees())),
        ("thrust_number", float(numbers.thrust_number)),
        ("torque_number", float(numbers.torque_number)),
        ("mean_f_tail1_z_n", float(mean_f1)),
        ("mean_f_tail2_z_n", float(mean_f2)),
        ("mean_tail_torque_y_n_m", float(mean_ty)),
        ("locomotion_mode", mode.as_str().to_string()),
    ];
    Ok((entries, beta_ss))
}

/// Sample count covering the last full tail revolution (the whole run
/// if it is shorter than one revolution or nothing spins).
fn rev_window(len: usize, dt: f64, omega: f64) -> usize {
    if omega <= 0.0 || dt <= 0.0 {
        return len.max(1);
    }
    let per_rev = (std::f64::consts::TAU / (omega * dt)).ceil() as usize;
    per_rev.clamp(1, len.max(1))
}

fn mean<T>(items: &[T], value: impl Fn(&T) -> f64) -> f64 {
    items.iter().map(value).sum::<f64>() / items.len() as f64
}

fn fold_min<T>(items: &[T], value: impl Fn(&T) -> f64) -> f64 {
    items.iter().map(&value).fold(f64::INFINITY, f64::min)
}

fn fold_max<T>(items: &[T], value: impl Fn(&T) -> f64) -> f64 {
    items.iter().map(&value).fold(f64::NEG_INFINITY, f64::max)
}

fn tilt_of(s: &FreeSample) -> f64 {
    let up = s.orientation * Vector3::z();
    up.z.clamp(-1.0, 1.0).acos()
}

fn mode_name(mode: CalibrationMode) -> &'static str {
    match mode {
        CalibrationMode::InPair => "in_pair",
        CalibrationMode::Isolated => "isolated",
    }
}
