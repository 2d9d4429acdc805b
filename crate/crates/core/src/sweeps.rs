//! Grid evaluation: light-current curves, noise-vs-current curves and the
//! noise-threshold maps over β.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::device::{DeviceParams, MaterialConstants, ELEMENTARY_CHARGE};
use crate::error::{Error, Result};
use crate::model::{self, OperatingPoint};
use crate::noise::{self, NoiseResult, RegimeTag};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptVariable {
    PumpRate,
    Beta,
    PhotonNumber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn log(min: f64, max: f64, points: usize) -> Self {
        Grid { min, max, points, spacing: Spacing::Log }
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        Grid { min, max, points, spacing: Spacing::Linear }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "grid needs min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidConfig("grid needs at least two points".into()));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return Err(Error::InvalidConfig("log spacing needs min > 0".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                if i + 1 == self.points {
                    self.max
                } else {
                    match self.spacing {
                        Spacing::Linear => self.min + t * (self.max - self.min),
                        Spacing::Log => self.min * (self.max / self.min).powf(t),
                    }
                }
            })
            .collect())
    }
}

/// Output column tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Column {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "inv_beta")]
    InvBeta,
    #[serde(rename = "j")]
    Pump,
    #[serde(rename = "current_mA")]
    CurrentMilliamps,
    #[serde(rename = "j_over_jth")]
    PumpOverThreshold,
    #[serde(rename = "n_bar")]
    Photons,
    #[serde(rename = "N_bar")]
    Excitations,
    #[serde(rename = "variance")]
    Variance,
    #[serde(rename = "ratio")]
    Ratio,
    #[serde(rename = "fano")]
    Fano,
    #[serde(rename = "n_th")]
    ThresholdPhotons,
    #[serde(rename = "n_half")]
    NoiseThreshold,
    #[serde(rename = "n_half_piecewise")]
    NoiseThresholdPiecewise,
    #[serde(rename = "margin")]
    Margin,
    #[serde(rename = "margin_piecewise")]
    MarginPiecewise,
    #[serde(rename = "regime")]
    Regime,
    #[serde(rename = "asym_adiabatic")]
    AsymptoteAdiabatic,
    #[serde(rename = "asym_gain_fixed")]
    AsymptoteGainFixed,
    #[serde(rename = "asym_stimulated")]
    AsymptoteStimulated,
}

impl Column {
    pub const ALL: [Column; 20] = [
        Column::X,
        Column::Beta,
        Column::InvBeta,
        Column::Pump,
        Column::CurrentMilliamps,
        Column::PumpOverThreshold,
        Column::Photons,
        Column::Excitations,
        Column::Variance,
        Column::Ratio,
        Column::Fano,
        Column::ThresholdPhotons,
        Column::NoiseThreshold,
        Column::NoiseThresholdPiecewise,
        Column::Margin,
        Column::MarginPiecewise,
        Column::Regime,
        Column::AsymptoteAdiabatic,
        Column::AsymptoteGainFixed,
        Column::AsymptoteStimulated,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Column::X => "x",
            Column::Beta => "beta",
            Column::InvBeta => "inv_beta",
            Column::Pump => "j",
            Column::CurrentMilliamps => "current_mA",
            Column::PumpOverThreshold => "j_over_jth",
            Column::Photons => "n_bar",
            Column::Excitations => "N_bar",
            Column::Variance => "variance",
            Column::Ratio => "ratio",
            Column::Fano => "fano",
            Column::ThresholdPhotons => "n_th",
            Column::NoiseThreshold => "n_half",
            Column::NoiseThresholdPiecewise => "n_half_piecewise",
            Column::Margin => "margin",
            Column::MarginPiecewise => "margin_piecewise",
            Column::Regime => "regime",
            Column::AsymptoteAdiabatic => "asym_adiabatic",
            Column::AsymptoteGainFixed => "asym_gain_fixed",
            Column::AsymptoteStimulated => "asym_stimulated",
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Column::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown column `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub swept_variable: SweptVariable,
    pub grid: Grid,
    pub device: DeviceParams,
    /// When sweeping β, hold β·N_T and n_T at the fixed device's values.
    #[serde(default = "yes")]
    pub hold_material: bool,
    /// Operating point for β sweeps, as a multiple of each row's j_th.
    #[serde(default = "two")]
    pub pump_over_threshold: f64,
    pub columns: Vec<Column>,
}

fn yes() -> bool {
    true
}

fn two() -> f64 {
    2.0
}

impl SweepSpec {
    pub fn new(swept_variable: SweptVariable, grid: Grid, device: DeviceParams, columns: Vec<Column>) -> Self {
        SweepSpec {
            swept_variable,
            grid,
            device,
            hold_material: true,
            pump_over_threshold: 2.0,
            columns,
        }
    }

    /// Device evaluated at grid value `x`.
    pub fn row_device(&self, x: f64) -> Result<DeviceParams> {
        match self.swept_variable {
            SweptVariable::Beta if self.hold_material => {
                let product = self.device.beta() * self.device.transparency_excitations();
                DeviceParams::with_transparency_photons(
                    x,
                    product / x,
                    self.device.tau_sp(),
                    self.device.transparency_photons(),
                )
            }
            SweptVariable::Beta => DeviceParams::new(
                x,
                self.device.transparency_excitations(),
                self.device.tau_sp(),
                self.device.tau_cav(),
            ),
            _ => Ok(self.device),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

/// Shortest round-trip decimal; scientific notation outside [1e-4, 1e15).
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Number(v) => f.write_str(&format_number(*v)),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFailure {
    pub index: usize,
    pub x: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub failures: Vec<RowFailure>,
    pub metadata: Map<String, Value>,
}

impl SweepTable {
    pub fn column_index(&self, column: Column) -> Option<usize> {
        self.columns.iter().position(|c| *c == column)
    }

    /// Numeric column values, one per surviving row.
    pub fn numbers(&self, column: Column) -> Option<Vec<f64>> {
        let i = self.column_index(column)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    fn metadata_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("tool: {TOOL_VERSION}")];
        for (k, v) in &self.metadata {
            lines.push(format!("{k}: {v}"));
        }
        if !self.failures.is_empty() {
            lines.push(format!(
                "failed_rows: {}",
                serde_json::to_string(&self.failures).expect("failures serialize")
            ));
        }
        lines
    }

    /// `#`-prefixed metadata, a header row, then one line per row.
    pub fn write_csv<W: Write>(&self, mut out: W, metadata: bool) -> Result<()> {
        if metadata {
            for line in self.metadata_lines() {
                writeln!(out, "# {line}")?;
            }
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.tag()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, metadata: bool) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, metadata).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// `{"metadata": {...}, "rows": [{tag: value}, ...]}`; metadata omitted
    /// when `metadata` is false.
    pub fn to_json(&self, metadata: bool) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.tag().to_owned(), serde_json::to_value(cell).expect("cell")))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut env = Map::new();
        if metadata {
            let mut meta = Map::new();
            meta.insert("tool".into(), json!(TOOL_VERSION));
            meta.extend(self.metadata.clone());
            env.insert("metadata".into(), Value::Object(meta));
        }
        env.insert("columns".into(), json!(self.columns.iter().map(|c| c.tag()).collect::<Vec<_>>()));
        env.insert("rows".into(), Value::Array(rows));
        if !self.failures.is_empty() {
            env.insert("failed_rows".into(), serde_json::to_value(&self.failures).expect("failures"));
        }
        Value::Object(env)
    }
}

/// Piecewise summary of n̄_1/2 against β for the semiconductor material
/// constants.
pub fn piecewise_noise_threshold(beta: f64) -> f64 {
    if beta < 1e-8 {
        1.0 / beta.sqrt()
    } else if beta < 1e-4 {
        1e4
    } else {
        1e2 / beta.sqrt()
    }
}

/// Piecewise summary of (j_1/2 − j_th)/j_th against β.
pub fn piecewise_margin(beta: f64) -> f64 {
    if beta < 1e-8 {
        0.0
    } else if beta < 1e-4 {
        1e4 * beta
    } else {
        1e2 * beta.sqrt()
    }
}

/// Lazily computed quantities for one grid row.
struct RowContext<'a> {
    spec: &'a SweepSpec,
    x: f64,
    device: DeviceParams,
    point: Option<OperatingPoint>,
    noise: Option<NoiseResult>,
    noise_threshold: Option<noise::NoiseThresholdCurrent>,
}

impl RowContext<'_> {
    fn point(&mut self) -> Result<OperatingPoint> {
        if let Some(p) = self.point {
            return Ok(p);
        }
        let p = match self.spec.swept_variable {
            SweptVariable::PumpRate => model::steady_state(&self.device, self.x)?,
            SweptVariable::PhotonNumber => {
                let j = model::current_for_photon_number(&self.device, self.x)?;
                OperatingPoint {
                    pump: j,
                    photons: self.x,
                    excitations: model::steady_state(&self.device, j)?.excitations,
                }
            }
            SweptVariable::Beta => {
                let j = self.spec.pump_over_threshold * model::threshold_current(&self.device)?;
                model::steady_state(&self.device, j)?
            }
        };
        self.point = Some(p);
        Ok(p)
    }

    fn noise(&mut self) -> Result<NoiseResult> {
        if let Some(n) = self.noise {
            return Ok(n);
        }
        let photons = self.point()?.photons;
        let n = noise::photon_variance_closed_form(&self.device, photons)?;
        self.noise = Some(n);
        Ok(n)
    }

    fn noise_threshold(&mut self) -> Result<noise::NoiseThresholdCurrent> {
        if let Some(n) = self.noise_threshold {
            return Ok(n);
        }
        let n = noise::noise_threshold_current(&self.device)?;
        self.noise_threshold = Some(n);
        Ok(n)
    }

    fn cell(&mut self, column: Column) -> Result<Cell> {
        let d = self.device;
        let v = match column {
            Column::X => self.x,
            Column::Beta => d.beta(),
            Column::InvBeta => 1.0 / d.beta(),
            Column::Pump => self.point()?.pump,
            Column::CurrentMilliamps => self.point()?.pump * ELEMENTARY_CHARGE * 1e3,
            Column::PumpOverThreshold => self.point()?.pump / model::threshold_current(&d)?,
            Column::Photons => self.point()?.photons,
            Column::Excitations => self.point()?.excitations,
            Column::Variance => self.noise()?.variance,
            Column::Ratio => self.noise()?.ratio,
            Column::Fano => self.noise()?.fano,
            Column::ThresholdPhotons => model::threshold_photon_number(&d)?,
            Column::NoiseThreshold => self.noise_threshold()?.photons,
            Column::NoiseThresholdPiecewise => piecewise_noise_threshold(d.beta()),
            Column::Margin => self.noise_threshold()?.margin,
            Column::MarginPiecewise => piecewise_margin(d.beta()),
            Column::Regime => return Ok(Cell::Text(noise::classify_regime(&d)?.to_string())),
            Column::AsymptoteAdiabatic => noise::asymptotic_noise_threshold(&d, RegimeTag::Adiabatic),
            Column::AsymptoteGainFixed => noise::asymptotic_noise_threshold(&d, RegimeTag::GainFixed),
            Column::AsymptoteStimulated => {
                noise::asymptotic_noise_threshold(&d, RegimeTag::StimulatedDominated)
            }
        };
        Ok(Cell::Number(v))
    }
}

fn evaluate_row(spec: &SweepSpec, x: f64) -> Result<Vec<Cell>> {
    let mut ctx = RowContext {
        spec,
        x,
        device: spec.row_device(x)?,
        point: None,
        noise: None,
        noise_threshold: None,
    };
    spec.columns.iter().map(|c| ctx.cell(*c)).collect()
}

fn map_rows(spec: &SweepSpec, xs: &[f64]) -> Vec<Result<Vec<Cell>>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        xs.par_iter().map(|&x| evaluate_row(spec, x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        xs.iter().map(|&x| evaluate_row(spec, x)).collect()
    }
}

/// Evaluates every requested column on every grid point. Rows that fail are
/// reported in `failures` and left out of `rows`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.columns.is_empty() {
        return Err(Error::InvalidConfig("no output columns requested".into()));
    }
    let xs = spec.grid.values()?;
    let mut rows = Vec::with_capacity(xs.len());
    let mut failures = Vec::new();
    for (index, (x, r)) in xs.iter().zip(map_rows(spec, &xs)).enumerate() {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(RowFailure {
                index,
                x: *x,
                error: e.to_string(),
            }),
        }
    }
    let mut metadata = Map::new();
    metadata.insert("device".into(), spec.device.to_json());
    metadata.insert("swept_variable".into(), serde_json::to_value(spec.swept_variable)?);
    metadata.insert("grid".into(), serde_json::to_value(spec.grid)?);
    if spec.swept_variable == SweptVariable::Beta {
        metadata.insert("hold_material".into(), json!(spec.hold_material));
        metadata.insert("pump_over_threshold".into(), json!(spec.pump_over_threshold));
    } else if let Ok(j_th) = model::threshold_current(&spec.device) {
        metadata.insert("j_th".into(), json!(j_th));
    }
    Ok(SweepTable {
        columns: spec.columns.clone(),
        rows,
        failures,
        metadata,
    })
}

fn require(spec: &SweepSpec, swept: SweptVariable) -> Result<()> {
    if spec.swept_variable == swept {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "expected a sweep over {swept:?}, got {:?}",
            spec.swept_variable
        )))
    }
}

/// Light-current characteristic: columns (j, n̄, N̄).
pub fn sweep_light_current(spec: &SweepSpec) -> Result<SweepTable> {
    require(spec, SweptVariable::PumpRate)?;
    let spec = SweepSpec {
        columns: vec![Column::Pump, Column::Photons, Column::Excitations],
        ..spec.clone()
    };
    run_sweep(&spec)
}

/// Photon noise along the light-current curve: (j, n̄, variance, ratio, Fano).
pub fn sweep_noise_vs_current(spec: &SweepSpec) -> Result<SweepTable> {
    require(spec, SweptVariable::PumpRate)?;
    let spec = SweepSpec {
        columns: vec![
            Column::Pump,
            Column::Photons,
            Column::Variance,
            Column::Ratio,
            Column::Fano,
        ],
        ..spec.clone()
    };
    run_sweep(&spec)
}

fn beta_map(beta_grid: &[f64], columns: Vec<Column>) -> Result<SweepTable> {
    if beta_grid.is_empty() {
        return Err(Error::InvalidConfig("empty β grid".into()));
    }
    if let Some(b) = beta_grid.iter().find(|b| !(**b >= 1e-12 * (1.0 - 1e-9) && **b <= 0.1)) {
        return Err(Error::InvalidConfig(format!("β = {b} outside [1e-12, 0.1]")));
    }
    let material = MaterialConstants::SEMICONDUCTOR;
    let device = material.device(1e-5)?;
    let spec = SweepSpec::new(
        SweptVariable::Beta,
        Grid::log(beta_grid[0], beta_grid[beta_grid.len() - 1].max(beta_grid[0] * 2.0), 2),
        device,
        columns,
    );
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (index, (x, r)) in beta_grid.iter().zip(map_rows(&spec, beta_grid)).enumerate() {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(RowFailure {
                index,
                x: *x,
                error: e.to_string(),
            }),
        }
    }
    let mut metadata = Map::new();
    metadata.insert(
        "material".into(),
        json!({
            "betaV_cm3": material.beta_volume_cm3,
            "NT_per_cm3": material.excitation_density_cm3,
            "tau_sp_s": material.tau_sp,
            "n_T": material.n_t,
        }),
    );
    metadata.insert("beta_points".into(), json!(beta_grid.len()));
    Ok(SweepTable {
        columns: spec.columns,
        rows,
        failures,
        metadata,
    })
}

/// Noise threshold against β: (1/β, n̄_1/2 numeric, piecewise, n̄_th).
pub fn figure1_data(beta_grid: &[f64]) -> Result<SweepTable> {
    beta_map(
        beta_grid,
        vec![
            Column::InvBeta,
            Column::NoiseThreshold,
            Column::NoiseThresholdPiecewise,
            Column::ThresholdPhotons,
        ],
    )
}

/// Noise-threshold current margin against β: (1/β, numeric, piecewise).
pub fn figure2_data(beta_grid: &[f64]) -> Result<SweepTable> {
    beta_map(
        beta_grid,
        vec![Column::InvBeta, Column::Margin, Column::MarginPiecewise],
    )
}

/// Log-spaced grid helper.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    Grid::log(min, max, points).values()
}

/// Grid cell `[x_i, x_{i+1}]` in which the `ratio` column first drops to or
/// below one half.
pub fn ratio_crossing(table: &SweepTable, x_column: Column) -> Option<(f64, f64)> {
    let xs = table.numbers(x_column)?;
    let ratios = table.numbers(Column::Ratio)?;
    (0..xs.len().saturating_sub(1))
        .find(|&i| ratios[i] > 0.5 && ratios[i + 1] <= 0.5)
        .map(|i| (xs[i], xs[i + 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::log(0.0, 1.0, 5).validate().is_err());
        assert!(Grid::linear(2.0, 1.0, 5).validate().is_err());
        assert!(Grid::linear(0.0, 1.0, 1).validate().is_err());
        let v = Grid::log(1.0, 100.0, 3).values().unwrap();
        assert_eq!(v.len(), 3);
        assert!((v[1] - 10.0).abs() < 1e-12);
        assert_eq!(v[2], 100.0);
    }

    #[test]
    fn two_point_grid_gives_two_rows() {
        let d = DeviceParams::reference();
        let spec = SweepSpec::new(SweptVariable::PumpRate, Grid::linear(1e17, 1e18, 2), d, vec![]);
        let t = sweep_light_current(&spec).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.metadata.contains_key("j_th"));
    }

    #[test]
    fn wrong_sweep_kind_is_rejected() {
        let d = DeviceParams::reference();
        let spec = SweepSpec::new(SweptVariable::Beta, Grid::log(1e-6, 1e-4, 3), d, vec![]);
        assert!(sweep_light_current(&spec).is_err());
    }

    #[test]
    fn failed_rows_are_flagged_not_fatal() {
        let d = DeviceParams::reference();
        // below transparency the noise columns fail
        let spec = SweepSpec::new(
            SweptVariable::PumpRate,
            Grid::log(1e15, 1e18, 7),
            d,
            vec![Column::Pump, Column::Ratio],
        );
        let t = run_sweep(&spec).unwrap();
        assert!(!t.failures.is_empty());
        assert_eq!(t.rows.len() + t.failures.len(), 7);
        assert!(t.to_csv_string(true).contains("# failed_rows"));
    }

    #[test]
    fn csv_header_matches_columns() {
        let d = DeviceParams::reference();
        let cols = vec![Column::Pump, Column::CurrentMilliamps, Column::Regime];
        let spec = SweepSpec::new(SweptVariable::PumpRate, Grid::log(5e17, 1e18, 3), d, cols);
        let t = run_sweep(&spec).unwrap();
        let csv = t.to_csv_string(false);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "j,current_mA,regime");
        assert_eq!(lines.count(), 3);
        let with_meta = t.to_csv_string(true);
        assert!(with_meta.starts_with("# tool: "));
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, 1e-12, 0.5, 123.456, 4.444e17, -3e-7, 1.0 / 3.0] {
            let s = format_number(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_number(1e-12), "1e-12");
        assert_eq!(format_number(0.25), "0.25");
    }

    #[test]
    fn column_tags_parse() {
        for c in Column::ALL {
            assert_eq!(c.tag().parse::<Column>().unwrap(), c);
            assert_eq!(serde_json::to_value(c).unwrap(), json!(c.tag()));
        }
    }

    #[test]
    fn piecewise_branches() {
        assert!((piecewise_noise_threshold(1e-10) - 1e5).abs() < 1e-6);
        assert_eq!(piecewise_noise_threshold(1e-6), 1e4);
        assert!((piecewise_noise_threshold(1e-2) - 1e3).abs() < 1e-9);
        assert_eq!(piecewise_margin(1e-10), 0.0);
        assert!((piecewise_margin(1e-5) - 0.1).abs() < 1e-15);
        assert!((piecewise_margin(1e-2) - 10.0).abs() < 1e-12);
    }
}
