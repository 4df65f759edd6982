//! Sweeps over the scale grid for each experiment.
//!
//! Every grid point is computed independently on the rayon pool; rows are collected in
//! `(N, sweep point)` order whatever the completion order.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::configuration::{check_assumptions, AssumptionConstants, PointCluster};
use crate::error::{Error, Result};
use crate::freeenergy::{
    cluster_split_residual, decoupled_logdet, ginibre_constant_estimate, ginibre_constant_extrapolated,
    ginibre_log_z_asymptotic, ginibre_log_z_exact, multihole_residual, rotation_shift, translation_shift, KernelMode,
};
use crate::kernel::BackgroundScale;
use crate::numerics::{zeta_prime_minus_one, LogValue};
use crate::oracle::{run_battery, BatteryOptions};

use super::config::{resolve_clusters, ClusterSpec, ExperimentConfig, ExperimentKind};
use super::table::{Cell, Check, ExperimentOutput, Table};

/// Tolerance on `|asymptotic + ln Z|` at the largest `N` of the Ginibre sweep.
pub const GINIBRE_RESIDUAL_LIMIT: f64 = 0.01;
/// Tolerance on the extrapolated constant of the Ginibre sweep.
pub const GINIBRE_CONSTANT_LIMIT: f64 = 1e-3;
/// Largest accepted `|F_corr(a) - F_corr(0)|` in infinite-kernel mode.
pub const INVARIANCE_LIMIT: f64 = 1e-8;

fn scales(config: &ExperimentConfig) -> Result<Vec<BackgroundScale>> {
    config.scale_grid.iter().map(|&n| BackgroundScale::new(n)).collect()
}

fn require_admissible(
    clusters: &[PointCluster],
    scale: BackgroundScale,
    constants: &AssumptionConstants,
) -> Result<()> {
    let report = check_assumptions(clusters, scale, constants)?;
    if !report.admissible() {
        return Err(Error::AssumptionViolated(format!(
            "N = {}: {}",
            scale.value(),
            report.failures().join("; ")
        )));
    }
    Ok(())
}

/// Whether each entry is strictly below the previous one; two zeros in a row count as shrinking.
fn strictly_shrinking(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))
}

fn shrink_check(name: &str, values: &[f64]) -> Check {
    let detail = values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" > ");
    Check::new(name, strictly_shrinking(values), detail)
}

fn log_abs(v: LogValue) -> f64 {
    v.log_mag()
}

fn sign(v: LogValue) -> f64 {
    v.sign().as_f64()
}

fn collect_rows(table: &mut Table, rows: Vec<Result<Vec<Vec<Cell>>>>) -> Result<()> {
    for group in rows {
        for row in group? {
            table.push(row)?;
        }
    }
    Ok(())
}

pub fn run_translate(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let mut table = Table::new(&[
        "N",
        "M",
        "a_re",
        "a_im",
        "mismatch",
        "correction_base_log",
        "correction_base_sign",
        "correction_moved_log",
        "correction_moved_sign",
        "residual_log",
        "residual_sign",
        "residual",
        "direct",
        "f_corr_base",
        "f_corr_moved",
    ]);
    let rows: Vec<Result<Vec<Vec<Cell>>>> = scales(config)?
        .into_par_iter()
        .map(|s| {
            let cluster = config.clusters[0].resolve(s)?;
            require_admissible(std::slice::from_ref(&cluster), s, &config.assumptions)?;
            config
                .translations
                .iter()
                .map(|&[x, y]| {
                    let a = Complex64::new(x, y);
                    require_admissible(&[cluster.with_translation(a)], s, &config.assumptions)?;
                    let t = translation_shift(&cluster, s, a, config.kernel_mode)?;
                    Ok(vec![
                        s.value().into(),
                        cluster.count().into(),
                        x.into(),
                        y.into(),
                        t.mismatch.into(),
                        log_abs(t.correction_base).into(),
                        sign(t.correction_base).into(),
                        log_abs(t.correction_moved).into(),
                        sign(t.correction_moved).into(),
                        log_abs(t.shift).into(),
                        sign(t.shift).into(),
                        t.shift.to_f64().into(),
                        t.direct.into(),
                        t.f_corr_base.into(),
                        t.f_corr_moved.into(),
                    ])
                })
                .collect()
        })
        .collect();
    collect_rows(&mut table, rows)?;
    let checks = sweep_checks(config, &table, "residual_log", "residual")?;
    Ok(ExperimentOutput::new(config.clone(), table, checks))
}

/// Largest `|residual|` per `N`, compared in log form so tiny residuals still order.
fn sweep_checks(config: &ExperimentConfig, table: &Table, log_column: &str, value_column: &str) -> Result<Vec<Check>> {
    let n_col = table.column("N").ok_or(Error::NonFinite("missing N column"))?;
    let logs = table
        .column(log_column)
        .ok_or(Error::NonFinite("missing residual column"))?;
    let values = table
        .column(value_column)
        .ok_or(Error::NonFinite("missing residual column"))?;
    match config.kernel_mode {
        KernelMode::Infinite => {
            let worst = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
            Ok(vec![Check::new(
                "infinite-mode-invariance",
                worst < INVARIANCE_LIMIT * config.tolerance_scale,
                format!(
                    "max |residual| = {worst:e}, limit {:e}",
                    INVARIANCE_LIMIT * config.tolerance_scale
                ),
            )])
        }
        KernelMode::Finite => {
            let worst: Vec<f64> = config
                .scale_grid
                .iter()
                .map(|&n| {
                    n_col
                        .iter()
                        .zip(&logs)
                        .filter(|(m, _)| **m == n)
                        .map(|(_, l)| *l)
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            // An exactly vanishing residual carries no trend, so those N drop out of the comparison.
            let nonzero: Vec<f64> = worst.iter().copied().filter(|l| l.is_finite()).collect();
            let shrinking = nonzero.windows(2).all(|w| w[1] < w[0]);
            let detail = worst
                .iter()
                .map(|l| {
                    if l.is_finite() {
                        format!("exp({l})")
                    } else {
                        "0".to_string()
                    }
                })
                .collect::<Vec<_>>()
                .join(" > ");
            Ok(vec![Check::new(
                "residual-shrinks-with-N",
                shrinking,
                format!("max |residual|: {detail}"),
            )])
        }
    }
}

pub fn run_rotate(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let mut table = Table::new(&[
        "N",
        "angle",
        "shift_log",
        "shift_sign",
        "shift",
        "direct",
        "f_corr_base",
        "f_corr_rotated",
    ]);
    let rows: Vec<Result<Vec<Vec<Cell>>>> = scales(config)?
        .into_par_iter()
        .map(|s| {
            let clusters = resolve_clusters(&config.clusters, s)?;
            require_admissible(&clusters, s, &config.assumptions)?;
            config
                .rotations
                .iter()
                .map(|&angle| {
                    let r = rotation_shift(&clusters, s, angle, config.kernel_mode)?;
                    Ok(vec![
                        s.value().into(),
                        angle.into(),
                        log_abs(r.shift).into(),
                        sign(r.shift).into(),
                        r.shift.to_f64().into(),
                        r.direct.into(),
                        r.f_corr_base.into(),
                        r.f_corr_moved.into(),
                    ])
                })
                .collect()
        })
        .collect();
    collect_rows(&mut table, rows)?;
    let checks = match config.kernel_mode {
        KernelMode::Infinite => sweep_checks(config, &table, "shift_log", "direct")?,
        KernelMode::Finite => sweep_checks(config, &table, "shift_log", "shift")?,
    };
    Ok(ExperimentOutput::new(config.clone(), table, checks))
}

pub fn run_decouple(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let mut table = Table::new(&["N", "separation", "M_A", "M_B", "sum_blocks", "full", "gap"]);
    let charges: Vec<f64> = config.clusters.iter().filter_map(ClusterSpec::charge).collect();
    let rows: Vec<Result<Vec<Vec<Cell>>>> = scales(config)?
        .into_par_iter()
        .map(|s| {
            config
                .separations
                .iter()
                .map(|&d| {
                    let a = ClusterSpec::lattice(charges[0], [-d / 2.0, 0.0]).resolve(s)?;
                    let b = ClusterSpec::lattice(charges[1], [d / 2.0, 0.0]).resolve(s)?;
                    let (ma, mb) = (a.count(), b.count());
                    let r = decoupled_logdet(&[a, b], s)?;
                    Ok(vec![
                        s.value().into(),
                        d.into(),
                        ma.into(),
                        mb.into(),
                        r.sum_blocks.into(),
                        r.full.into(),
                        r.gap.into(),
                    ])
                })
                .collect()
        })
        .collect();
    collect_rows(&mut table, rows)?;
    let n_col = table.column("N").unwrap_or_default();
    let gaps = table.column("gap").unwrap_or_default();
    let checks = config
        .scale_grid
        .iter()
        .map(|&n| {
            let per_n: Vec<f64> = n_col
                .iter()
                .zip(&gaps)
                .filter(|(m, _)| **m == n)
                .map(|(_, g)| g.abs())
                .collect();
            shrink_check(&format!("gap-shrinks-with-separation-N{n}"), &per_n)
        })
        .collect();
    Ok(ExperimentOutput::new(config.clone(), table, checks))
}

pub fn run_multihole(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let mut table = Table::new(&[
        "N",
        "lhs",
        "prediction",
        "residual",
        "n_log_n",
        "linear",
        "lebesgue_measure",
        "log_n",
        "zeta",
        "log_two_pi",
        "radius_bracket",
        "f_corr_all",
        "split_residual",
    ]);
    let rows: Vec<Result<Vec<Vec<Cell>>>> = scales(config)?
        .into_par_iter()
        .map(|s| {
            let clusters = resolve_clusters(&config.clusters, s)?;
            require_admissible(&clusters, s, &config.assumptions)?;
            let r = multihole_residual(&clusters, s, config.kernel_mode)?;
            let split = cluster_split_residual(&clusters, s)?;
            let p = r.prediction;
            Ok(vec![vec![
                s.value().into(),
                r.lhs.into(),
                p.total.into(),
                r.residual.into(),
                p.n_log_n.into(),
                p.linear.into(),
                p.lebesgue_measure.into(),
                p.log_n.into(),
                p.zeta.into(),
                p.log_two_pi.into(),
                p.radius_bracket.into(),
                r.f_corr_all.into(),
                split.residual.into(),
            ]])
        })
        .collect();
    collect_rows(&mut table, rows)?;
    let residuals: Vec<f64> = table
        .column("residual")
        .unwrap_or_default()
        .iter()
        .map(|r| r.abs())
        .collect();
    let checks = vec![shrink_check("residual-shrinks-with-N", &residuals)];
    Ok(ExperimentOutput::new(config.clone(), table, checks))
}

pub fn run_ginibre_asymptotics(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let mut table = Table::new(&[
        "N",
        "minus_log_z_exact",
        "asymptotic",
        "residual",
        "constant_estimate",
        "constant_extrapolated",
    ]);
    let rows: Vec<Result<Vec<Vec<Cell>>>> = scales(config)?
        .into_par_iter()
        .map(|s| {
            let j = s.value() as usize;
            let exact = -ginibre_log_z_exact(j, s)?;
            let asymptotic = ginibre_log_z_asymptotic(j, s)?.value;
            Ok(vec![vec![
                s.value().into(),
                exact.into(),
                asymptotic.into(),
                (asymptotic - exact).into(),
                ginibre_constant_estimate(j)?.into(),
                ginibre_constant_extrapolated(j)?.into(),
            ]])
        })
        .collect();
    collect_rows(&mut table, rows)?;
    let residuals: Vec<f64> = table
        .column("residual")
        .unwrap_or_default()
        .iter()
        .map(|r| r.abs())
        .collect();
    let last = residuals.last().copied().unwrap_or(f64::INFINITY);
    let target = zeta_prime_minus_one() + (2.0 * std::f64::consts::PI).ln() / 2.0;
    let constant = table
        .column("constant_extrapolated")
        .unwrap_or_default()
        .last()
        .copied()
        .unwrap_or(f64::NAN);
    let residual_limit = GINIBRE_RESIDUAL_LIMIT * config.tolerance_scale;
    let constant_limit = GINIBRE_CONSTANT_LIMIT * config.tolerance_scale;
    let checks = vec![
        shrink_check("residual-shrinks-with-N", &residuals),
        Check::new(
            "residual-at-largest-N",
            last < residual_limit,
            format!("{last:e} < {residual_limit:e}"),
        ),
        Check::new(
            "extrapolated-constant",
            (constant - target).abs() < constant_limit,
            format!("{constant} vs {target}"),
        ),
    ];
    Ok(ExperimentOutput::new(config.clone(), table, checks))
}

pub fn run_oracle_battery(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let report = run_battery(&BatteryOptions {
        seed: config.seed,
        samples: config.samples,
        tolerance_scale: config.tolerance_scale,
    })?;
    let mut table = Table::new(&["item", "value", "reference", "deviation", "tolerance", "passed"]);
    for item in &report.items {
        table.push(vec![
            item.name.as_str().into(),
            item.value.into(),
            item.reference.into(),
            item.deviation.into(),
            item.tolerance.into(),
            item.passed.into(),
        ])?;
    }
    let checks = report
        .items
        .iter()
        .map(|i| Check::new(&i.name, i.passed, format!("{:e} < {:e}", i.deviation, i.tolerance)))
        .collect();
    let mut output = ExperimentOutput::new(config.clone(), table, checks);
    output.battery = Some(report);
    Ok(output)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    match config.experiment {
        ExperimentKind::Translate => run_translate(config),
        ExperimentKind::Rotate => run_rotate(config),
        ExperimentKind::Decouple => run_decouple(config),
        ExperimentKind::Multihole => run_multihole(config),
        ExperimentKind::GinibreAsymptotics => run_ginibre_asymptotics(config),
        ExperimentKind::OracleBattery => run_oracle_battery(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::preset(kind);
        if kind != ExperimentKind::GinibreAsymptotics {
            c.scale_grid = vec![100.0, 200.0];
        }
        c
    }

    #[test]
    fn translate_default_passes() {
        let out = run_translate(&small(ExperimentKind::Translate)).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
        let residual = out.table.column("residual").unwrap();
        assert_eq!(residual[0], 0.0);
        assert_eq!(out.table.rows.len(), 8);
    }

    #[test]
    fn translate_infinite_mode_is_invariant() {
        let mut c = small(ExperimentKind::Translate);
        c.kernel_mode = KernelMode::Infinite;
        assert!(run_translate(&c).unwrap().passed());
    }

    #[test]
    fn rotate_infinite_mode_is_invariant() {
        let mut c = small(ExperimentKind::Rotate);
        c.kernel_mode = KernelMode::Infinite;
        let out = run_rotate(&c).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
    }

    #[test]
    fn decouple_gap_shrinks() {
        let out = run_decouple(&small(ExperimentKind::Decouple)).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
    }

    #[test]
    fn multihole_is_symmetric_in_cluster_order() {
        let c = small(ExperimentKind::Multihole);
        let out = run_multihole(&c).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
        let mut swapped = c.clone();
        swapped.clusters.reverse();
        let other = run_multihole(&swapped).unwrap();
        let (a, b) = (out.table.column("lhs").unwrap(), other.table.column("lhs").unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn inadmissible_configuration_is_reported() {
        let mut c = small(ExperimentKind::Multihole);
        c.assumptions = AssumptionConstants::default();
        assert!(matches!(run_multihole(&c), Err(Error::AssumptionViolated(_))));
    }

    #[test]
    fn ginibre_sweep_passes() {
        let out = run_ginibre_asymptotics(&small(ExperimentKind::GinibreAsymptotics)).unwrap();
        assert!(out.passed(), "{:?}", out.checks);
    }
}
