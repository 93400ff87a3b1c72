use std::path::PathBuf;

use noisy_pbt::bounds::{m_low, m_up};
use noisy_pbt::pbet::{
    apply_pbet, asymptotic_bounds, m_bound_pbet_for_noise, m_free, phase_flip_representable, BoundKind, PbetSetting,
};
use noisy_pbt::pbt::{effective_params, entanglement_fidelity, q_n, teleportation_fidelity, PbtChannel};
use noisy_pbt::protocol::{choi_discrepancy, PortConfig};
use noisy_pbt::search::{linspace, refine_extreme, slice_data, surface_data, Objective, ScanPoint, ScanSpace};
use noisy_pbt::states::{general_pure_state, negativity};
use noisy_pbt::{EulerAngles, PauliChannel, SampleGrid};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::output::{base_meta, format_short, sibling, write_table, Cell, Format, Table};

pub const SIMULATION_TOL: f64 = 1e-8;
const SANDWICH_TOL: f64 = 1e-9;

fn line(name: &str, value: f64) {
    println!("{name:<14} {}", format_short(value));
}

pub fn fidelity(ports: usize, noise: Option<PauliChannel>) -> CliResult<()> {
    line("F", entanglement_fidelity(ports)?);
    line("f", teleportation_fidelity(ports)?);
    line("q_N", q_n(ports)?);
    if let Some(noise) = noise {
        let params = effective_params(&noise)?;
        let ch = PbtChannel::new(ports, noise)?;
        line("q_p", params.q_p);
        for (j, q) in params.q.iter().enumerate() {
            line(&format!("q^({})", j + 1), *q);
        }
        line("F_noisy", ch.entanglement_fidelity());
        line("f_noisy", ch.teleportation_fidelity());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct OmegaRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl OmegaRange {
    fn grid(&self) -> CliResult<Vec<f64>> {
        if !(0.0 <= self.min && self.min <= self.max && self.max <= 4.0 / 3.0) || self.steps == 0 {
            return Err(CliError::Usage(format!(
                "omega range [{}, {}] with {} steps is invalid (need 0 <= min <= max <= 4/3, steps >= 1)",
                self.min, self.max, self.steps
            )));
        }
        Ok(linspace(self.min, self.max, self.steps))
    }

    fn record(&self, meta: &mut crate::output::Meta) {
        meta.insert("omega_min".into(), Value::from(self.min));
        meta.insert("omega_max".into(), Value::from(self.max));
        meta.insert("omega_steps".into(), Value::from(self.steps));
    }
}

fn report_written(table: &Table, path: &std::path::Path) {
    println!("wrote {} rows to {}", table.rows.len(), path.display());
}

pub fn bounds_surface(range: OmegaRange, m0_steps: usize, out: &(PathBuf, Format)) -> CliResult<()> {
    if m0_steps == 0 {
        return Err(CliError::Usage("m0 grid needs at least one step".into()));
    }
    let rows = surface_data(&linspace(0.0, 1.0, m0_steps), &range.grid()?);
    let mut table = Table::new(vec!["m0", "omega", "m_low", "m_up", "m_dep", "critical"]);
    for r in rows {
        table.push(vec![
            r.m0.into(),
            r.omega.into(),
            r.m_low.into(),
            r.m_up.into(),
            r.m_dep.into(),
            r.critical.into(),
        ]);
    }
    let mut meta = base_meta("bounds");
    meta.insert("table".into(), Value::from("surface"));
    meta.insert("m0_steps".into(), Value::from(m0_steps));
    range.record(&mut meta);
    write_table(&out.0, out.1, &table, &meta)?;
    report_written(&table, &out.0);
    Ok(())
}

pub fn bounds_slice(m0: f64, range: OmegaRange, out: &(PathBuf, Format)) -> CliResult<()> {
    let rows = slice_data(m0, &range.grid()?)?;
    let mut table = Table::new(vec!["omega", "m_low_ratio", "m_up_ratio", "m_dep_ratio"]);
    for r in rows {
        table.push(vec![r.omega.into(), r.low.into(), r.up.into(), r.dep.into()]);
    }
    let mut meta = base_meta("bounds");
    meta.insert("table".into(), Value::from("slice"));
    meta.insert("m0".into(), Value::from(m0));
    range.record(&mut meta);
    write_table(&out.0, out.1, &table, &meta)?;
    report_written(&table, &out.0);
    Ok(())
}

fn point_cells(p: &ScanPoint) -> Vec<Cell> {
    let a = p.angles.as_array();
    let q = p.channel.probabilities();
    a.iter().chain(q.iter()).map(|&x| Cell::Num(x)).collect()
}

const POINT_COLUMNS: [&str; 8] = ["alpha1", "alpha2", "gamma", "beta1", "beta2", "p1", "p2", "p3"];

pub fn scan(omega: f64, theta: f64, grid: SampleGrid, refine: bool, out: &(PathBuf, Format)) -> CliResult<()> {
    let space = ScanSpace::from_grid(omega, &grid)?;
    let values = space.evaluate(theta)?;
    let result = space.extremes(&values)?;

    let mut samples = Table::new([&["index"][..], &POINT_COLUMNS, &["negativity"]].concat());
    for (i, v) in values.iter().enumerate() {
        let mut row = vec![Cell::from(i)];
        row.extend(point_cells(&space.point(i)));
        row.push(Cell::Num(*v));
        samples.push(row);
    }

    let mut extremes = Table::new([&["kind"][..], &POINT_COLUMNS, &["negativity"]].concat());
    let mut add = |kind: &str, p: &ScanPoint, v: f64| {
        let mut row = vec![Cell::from(kind)];
        row.extend(point_cells(p));
        row.push(Cell::Num(v));
        extremes.push(row);
    };
    add("min", &result.argmin, result.min_value);
    add("max", &result.argmax, result.max_value);
    let (mut lowest, mut highest) = (result.min_value, result.max_value);
    if refine {
        let lo = refine_extreme(result.argmin, Objective::Min, theta)?;
        let hi = refine_extreme(result.argmax, Objective::Max, theta)?;
        add("refined_min", &lo.point, lo.value);
        add("refined_max", &hi.point, hi.value);
        lowest = lowest.min(lo.value);
        highest = highest.max(hi.value);
    }

    let mut meta = base_meta("scan");
    meta.insert("omega".into(), Value::from(omega));
    meta.insert("theta".into(), Value::from(theta));
    meta.insert("seed".into(), Value::from(grid.seed));
    meta.insert("n_simplex".into(), Value::from(grid.n_simplex));
    meta.insert("n_sphere".into(), Value::from(grid.n_sphere));
    meta.insert("gamma_steps".into(), Value::from(grid.gamma_steps));
    meta.insert("refine".into(), Value::from(refine));
    write_table(&out.0, out.1, &samples, &meta)?;
    let extremes_path = sibling(&out.0, "extremes", out.1);
    write_table(&extremes_path, out.1, &extremes, &meta)?;
    report_written(&samples, &out.0);
    report_written(&extremes, &extremes_path);

    let m0 = theta.sin();
    let (lo, up) = (m_low(m0, omega), m_up(m0, omega));
    line("min", result.min_value);
    line("max", result.max_value);
    if refine {
        line("refined_min", lowest);
        line("refined_max", highest);
    }
    line("m_low", lo);
    line("m_up", up);
    if omega <= 2.0 / 3.0 && (lowest < lo - SANDWICH_TOL || highest > up + SANDWICH_TOL) {
        return Err(CliError::Tolerance(format!(
            "scan values [{lowest}, {highest}] leave the bound interval [{lo}, {up}]"
        )));
    }
    Ok(())
}

fn noise_cells(noise: &PauliChannel) -> Vec<Cell> {
    noise.probabilities().iter().map(|&x| Cell::Num(x)).collect()
}

pub fn simulate(ports: usize, noise: PauliChannel, out: Option<&(PathBuf, Format)>) -> CliResult<()> {
    let cfg = PortConfig::new(ports, noise)?;
    let d = choi_discrepancy(&cfg)?;
    line("discrepancy", d);
    if let Some((path, format)) = out {
        let mut table = Table::new(vec!["ports", "p1", "p2", "p3", "discrepancy"]);
        let mut row = vec![Cell::from(ports)];
        row.extend(noise_cells(&noise));
        row.push(Cell::Num(d));
        table.push(row);
        write_table(path, *format, &table, &base_meta("simulate"))?;
        report_written(&table, path);
    }
    if d >= SIMULATION_TOL {
        return Err(CliError::Tolerance(format!(
            "Choi discrepancy {d:e} is not below {SIMULATION_TOL:e}"
        )));
    }
    Ok(())
}

pub fn pbet(
    ports: usize,
    theta: f64,
    angles: EulerAngles,
    noise: PauliChannel,
    out: Option<&(PathBuf, Format)>,
) -> CliResult<()> {
    let input = general_pure_state(theta, &angles)?;
    let m0 = theta.sin();
    let setting = PbetSetting::new(ports, noise, input)?;
    let m = negativity(&apply_pbet(&setting)?)?;
    let free = m_free(ports, m0)?;
    let low = m_bound_pbet_for_noise(ports, &noise, m0, BoundKind::Low)?;
    let up = m_bound_pbet_for_noise(ports, &noise, m0, BoundKind::Up)?;
    let (asym_low, asym_up) = asymptotic_bounds(ports, noise.omega(), m0);
    let q_p = setting.channel.q_p();
    let representable = phase_flip_representable(q_p);

    line("m0", m0);
    line("negativity", m);
    line("m_free", free);
    line("m_low", low.value);
    line("m_up", up.value);
    line("asym_low", asym_low);
    line("asym_up", asym_up);
    line("q_p", q_p);
    println!("{:<14} {representable}", "representable");

    if let Some((path, format)) = out {
        let mut table = Table::new(vec![
            "ports",
            "theta",
            "p1",
            "p2",
            "p3",
            "m0",
            "negativity",
            "m_free",
            "m_low",
            "m_up",
            "asym_low",
            "asym_up",
            "q_p",
            "representable",
        ]);
        let mut row = vec![Cell::from(ports), Cell::Num(theta)];
        row.extend(noise_cells(&noise));
        row.extend([m0, m, free, low.value, up.value, asym_low, asym_up, q_p].map(Cell::Num));
        row.push(Cell::from(representable));
        table.push(row);
        write_table(path, *format, &table, &base_meta("pbet"))?;
        report_written(&table, path);
    }
    Ok(())
}
