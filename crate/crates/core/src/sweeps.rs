//! Canned parameter sweeps behind each figure and table.
//!
//! A sweep evaluates one row per grid point, in parallel, and assembles rows
//! in grid order. Grid points whose evaluation fails are dropped and counted
//! in the metadata.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::beam::{superkick, Helicity, TwistedPhotonBeam};
use crate::error::{Error, Result};
use crate::pair_production::{crossover_product, pair_threshold, plane_wave_threshold, PairThresholdQuery};
use crate::recoil_kinematics::{deuteron_threshold, transverse_recoil_energy, TargetParticle};
use crate::special_functions::HalfInt;
use crate::table::{Column, Table};
use crate::transitions::{mean_cm_am, recoil_ratio, sublevel_profile, TransitionChannel};
use crate::trap::{jump_probability_extended, jump_probability_point, TrapModel};
use crate::units::{
    ca40_ion_mass, deuteron_binding, electron_mass, hbar_c, nonrel_recoil_energy, wavelength_to_energy, Energy, Length,
    CONSTANTS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig5a,
    Fig5b,
    Fig5c,
    Fig6,
    Fig7,
    Fig8a,
    Fig8b,
    DeuteronTable,
    PairTable,
}

impl FigureId {
    pub const ALL: [FigureId; 18] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig2c,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig3c,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig4c,
        FigureId::Fig5a,
        FigureId::Fig5b,
        FigureId::Fig5c,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8a,
        FigureId::Fig8b,
        FigureId::DeuteronTable,
        FigureId::PairTable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig2c => "fig2c",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig3c => "fig3c",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig4c => "fig4c",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
            FigureId::Fig5c => "fig5c",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8a => "fig8a",
            FigureId::Fig8b => "fig8b",
            FigureId::DeuteronTable => "deuteron_table",
            FigureId::PairTable => "pair_table",
        }
    }

    /// Documented defaults for every parameter the figure exposes.
    pub fn default_parameters(self) -> BTreeMap<&'static str, f64> {
        let pairs: &[(&str, f64)] = match self {
            f if f.am_panel().is_some() => &[("pitch_rad", 0.1)],
            FigureId::Fig6 => &[("wavelength_nm", 397.0)],
            FigureId::Fig7 => {
                &[("wavelength_nm", 729.0), ("pitch_rad", 0.5), ("sigma_nm", 10.0), ("trap_mhz", 1.5), ("spin", -1.0)]
            }
            FigureId::Fig8a => &[("omega2_ev", 2.5), ("pitch_urad", 5.0), ("l_gamma", 1.0)],
            FigureId::Fig8b => &[("omega2_ev", 2.5), ("b_fm", 200.0), ("l_gamma", 1.0)],
            FigureId::DeuteronTable => &[("m_gamma", 2.0), ("pitch_rad", 1e-3)],
            FigureId::PairTable => &[("pitch_urad", 5.0), ("b_fm", 200.0), ("l_gamma", 1.0)],
            _ => unreachable!("all figure ids are covered"),
        };
        pairs.iter().copied().collect()
    }

    pub fn default_grid(self) -> Grid {
        let g = |min, max, count, scale| Grid { min, max, count, scale };
        match self {
            f if f.am_panel().is_some() => g(1e-3, 1.5, 600, GridScale::LogLinear),
            FigureId::Fig6 => g(1.0, 100.0, 200, GridScale::Log),
            FigureId::Fig7 => g(1.0, 1500.0, 300, GridScale::LogLinear),
            FigureId::Fig8a => g(20.0, 2000.0, 400, GridScale::Log),
            FigureId::Fig8b => g(0.5, 50.0, 400, GridScale::Log),
            FigureId::DeuteronTable => g(20.0, 2000.0, 100, GridScale::Log),
            FigureId::PairTable => g(0.1, 10.0, 50, GridScale::Log),
            _ => unreachable!("all figure ids are covered"),
        }
    }

    /// Name and unit of the swept variable.
    pub fn axis(self) -> Column {
        match self {
            f if f.am_panel().is_some() => Column::new("b/lambda", "1"),
            FigureId::Fig6 | FigureId::Fig7 => Column::new("b", "nm"),
            FigureId::Fig8a | FigureId::DeuteronTable => Column::new("b", "fm"),
            FigureId::Fig8b => Column::new("pitch", "urad"),
            FigureId::PairTable => Column::new("omega2", "eV"),
            _ => unreachable!("all figure ids are covered"),
        }
    }

    /// `(multipole, Λ, ratio?)` for the angular-momentum panels.
    fn am_panel(self) -> Option<(u32, i32, bool)> {
        use FigureId::*;
        Some(match self {
            Fig2a => (1, 1, false),
            Fig2b => (2, 1, false),
            Fig2c => (3, 1, false),
            Fig3a => (1, -1, false),
            Fig3b => (2, -1, false),
            Fig3c => (3, -1, false),
            Fig4a => (1, 1, true),
            Fig4b => (2, 1, true),
            Fig4c => (3, 1, true),
            Fig5a => (1, -1, true),
            Fig5b => (2, -1, true),
            Fig5c => (3, -1, true),
            _ => return None,
        })
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL.iter().copied().find(|f| f.as_str() == s).ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    Linear,
    Log,
    /// Logarithmic up to `max/15`, linear beyond.
    LogLinear,
}

impl FromStr for GridScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "lin" => Ok(GridScale::Linear),
            "log" => Ok(GridScale::Log),
            "log-linear" | "loglinear" | "log_linear" => Ok(GridScale::LogLinear),
            _ => Err(Error::InvalidGrid(format!("unknown grid scale `{s}` (linear, log, log-linear)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: GridScale,
}

pub const MAX_GRID_COUNT: usize = 1_000_000;

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_GRID_COUNT).contains(&self.count) {
            return Err(Error::InvalidGrid(format!("count must be in 2..={MAX_GRID_COUNT}, got {}", self.count)));
        }
        if !self.min.is_finite() || !self.max.is_finite() || !(self.min < self.max) {
            return Err(Error::InvalidGrid(format!("need finite min < max, got [{}, {}]", self.min, self.max)));
        }
        if self.scale != GridScale::Linear && !(self.min > 0.0) {
            return Err(Error::InvalidGrid(format!("logarithmic grid needs min > 0, got {}", self.min)));
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = self.count;
        let knee = self.max / 15.0;
        let scale = match self.scale {
            GridScale::LogLinear if n < 4 || knee <= self.min => GridScale::Log,
            s => s,
        };
        Ok(match scale {
            GridScale::Linear => spaced(self.min, self.max, n, false),
            GridScale::Log => spaced(self.min, self.max, n, true),
            GridScale::LogLinear => {
                let n_log = n / 2;
                let mut pts = spaced(self.min, knee, n_log, true);
                let lin = spaced(knee, self.max, n - n_log + 1, false);
                pts.extend_from_slice(&lin[1..]);
                pts
            }
        })
    }
}

fn spaced(a: f64, b: f64, n: usize, log: bool) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == 0 {
                return a;
            }
            if i == n - 1 {
                return b;
            }
            let t = i as f64 / last;
            if log {
                (a.ln() + t * (b.ln() - a.ln())).exp()
            } else {
                a + t * (b - a)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub figure: FigureId,
    pub overrides: BTreeMap<String, f64>,
    pub grid: Option<Grid>,
}

impl SweepSpec {
    pub fn new(figure: FigureId) -> Self {
        SweepSpec { figure, overrides: BTreeMap::new(), grid: None }
    }

    pub fn set(mut self, name: &str, value: f64) -> Self {
        self.overrides.insert(name.to_string(), value);
        self
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = Some(grid);
        self
    }

    fn resolved_parameters(&self) -> Result<BTreeMap<String, f64>> {
        let mut params: BTreeMap<String, f64> =
            self.figure.default_parameters().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        for (name, value) in &self.overrides {
            match params.get_mut(name) {
                Some(slot) => *slot = *value,
                None => {
                    return Err(Error::UnknownParameter { figure: self.figure.to_string(), name: name.clone() });
                }
            }
        }
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub figure: FigureId,
    pub table: Table,
    pub dropped_rows: usize,
}

struct Params(BTreeMap<String, f64>);

impl Params {
    fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    fn int(&self, name: &str) -> Result<i32> {
        let v = self.get(name);
        if v.fract() != 0.0 || v.abs() > 1e6 {
            return Err(Error::Config(format!("parameter `{name}` must be an integer, got {v}")));
        }
        Ok(v as i32)
    }
}

type RowFn = Box<dyn Fn(f64) -> Result<Vec<f64>> + Sync>;

/// Builds the series columns and the row evaluator for a figure.
fn figure_rows(figure: FigureId, p: &Params) -> Result<(Vec<Column>, RowFn)> {
    if let Some((multipole, spin, ratio)) = figure.am_panel() {
        let theta = p.get("pitch_rad");
        let helicity = Helicity::from_i32(spin)?;
        let energy = wavelength_to_energy(Length::from_nm(397.0))?;
        let beams = [1, 2, 3]
            .iter()
            .map(|&m| TwistedPhotonBeam::new(m, helicity, energy, theta))
            .collect::<Result<Vec<_>>>()?;
        let channel = TransitionChannel::electric(multipole)?;
        let lambda = beams[0].wavelength().nm();
        let columns = beams
            .iter()
            .map(|b| {
                if ratio {
                    Column::new(format!("pT/pz(m_gamma={})", b.m_gamma()), "1")
                } else {
                    Column::new(format!("l_cm(m_gamma={})", b.m_gamma()), "hbar")
                }
            })
            .collect();
        let row: RowFn = Box::new(move |x| {
            let b = Length::from_nm(x * lambda);
            beams
                .iter()
                .map(|beam| if ratio { recoil_ratio(beam, &channel, b) } else { mean_cm_am(beam, &channel, b) })
                .collect()
        });
        return Ok((columns, row));
    }
    match figure {
        FigureId::Fig6 => {
            let photon = wavelength_to_energy(Length::from_nm(p.get("wavelength_nm")))?;
            let e_long = nonrel_recoil_energy(photon.as_momentum(), ca40_ion_mass())?;
            let mut columns = vec![Column::new("E_long", "neV")];
            columns.extend((2..=4).map(|m| Column::new(format!("E_T(m_gamma={m})"), "neV")));
            let row: RowFn = Box::new(move |b| {
                let target = TargetParticle::new(ca40_ion_mass(), Length::from_nm(b))?;
                let mut out = vec![e_long.nev()];
                for m in 2..=4u32 {
                    out.push(transverse_recoil_energy(&target, m - 1)?.nev());
                }
                Ok(out)
            });
            Ok((columns, row))
        }
        FigureId::Fig7 => {
            let photon = wavelength_to_energy(Length::from_nm(p.get("wavelength_nm")))?;
            let beam = TwistedPhotonBeam::new(-2, Helicity::from_i32(p.int("spin")?)?, photon, p.get("pitch_rad"))?;
            let channel = TransitionChannel::new(2, HalfInt::from_twice(-1), "S1/2-D5/2")?;
            let m_final = HalfInt::from_twice(-3);
            let trap = TrapModel::calcium(p.get("trap_mhz") * 1e6)?;
            let sigma = Length::from_nm(p.get("sigma_nm"));
            // ν = m_γ − Δm units go to the centre of mass
            let nu = beam.m_gamma() - (m_final.twice() - channel.m_initial().twice()) / 2;
            let columns = vec![
                Column::new("P_transition", "1"),
                Column::new("P_jump_point", "1"),
                Column::new("P_jump_extended", "1"),
                Column::new("P_transition*P_jump_point", "1"),
                Column::new("P_transition*P_jump_extended", "1"),
            ];
            let row: RowFn = Box::new(move |b| {
                let b = Length::from_nm(b);
                let profile = sublevel_profile(&beam, &channel, m_final, b)?;
                let point = jump_probability_point(superkick(nu.abs(), b)?, &trap)?;
                let extended = jump_probability_extended(&beam, nu, b, &trap, Some(sigma))?;
                Ok(vec![profile, point, extended, profile * point, profile * extended])
            });
            Ok((columns, row))
        }
        FigureId::Fig8a | FigureId::Fig8b => {
            let omega2 = Energy::from_ev(p.get("omega2_ev"));
            let l_gamma = p.int("l_gamma")?;
            let plane = plane_wave_threshold(omega2)?;
            let fixed = if figure == FigureId::Fig8a { p.get("pitch_urad") } else { p.get("b_fm") };
            let columns = vec![Column::new("threshold", "GeV"), Column::new("plane_wave", "GeV")];
            let row: RowFn = Box::new(move |x| {
                let (theta, b) = if figure == FigureId::Fig8a { (fixed * 1e-6, x) } else { (x * 1e-6, fixed) };
                let q = PairThresholdQuery::new(omega2, theta, Length::from_fm(b), l_gamma)?;
                Ok(vec![pair_threshold(&q)?.photon_energy.gev(), plane.gev()])
            });
            Ok((columns, row))
        }
        FigureId::DeuteronTable => {
            let m_gamma = p.int("m_gamma")?;
            let beam = TwistedPhotonBeam::new(m_gamma, Helicity::Plus, deuteron_binding(), p.get("pitch_rad"))?;
            let columns = vec![
                Column::new("threshold_dipole", "keV"),
                Column::new("threshold_quadrupole", "keV"),
                Column::new("recoil_dipole", "keV"),
                Column::new("recoil_quadrupole", "keV"),
            ];
            let row: RowFn = Box::new(move |b| {
                let b = Length::from_fm(b);
                let e1 = deuteron_threshold(&beam, 1, b)?;
                let e2 = deuteron_threshold(&beam, 2, b)?;
                Ok(vec![e1.photon_energy.kev(), e2.photon_energy.kev(), e1.recoil_energy.kev(), e2.recoil_energy.kev()])
            });
            Ok((columns, row))
        }
        FigureId::PairTable => {
            let (theta, b, l_gamma) = (p.get("pitch_urad") * 1e-6, p.get("b_fm"), p.int("l_gamma")?);
            let columns = vec![
                Column::new("plane_wave", "GeV"),
                Column::new("crossover", "pm*urad"),
                Column::new("b_tenfold", "fm"),
                Column::new("threshold", "GeV"),
            ];
            let row: RowFn = Box::new(move |w2| {
                let omega2 = Energy::from_ev(w2);
                let plane = plane_wave_threshold(omega2)?;
                let cross = crossover_product(omega2, l_gamma.max(1))?;
                let b10 = tenfold_radius(l_gamma);
                let q = PairThresholdQuery::new(omega2, theta, Length::from_fm(b), l_gamma)?;
                Ok(vec![plane.gev(), cross.pm_urad(), b10, pair_threshold(&q)?.photon_energy.gev()])
            });
            Ok((columns, row))
        }
        _ => unreachable!("angular-momentum panels handled above"),
    }
}

/// `b = ℓ_γℏ/p_T` with `p_T = 6m` for a ten-fold threshold, in fm.
fn tenfold_radius(l_gamma: i32) -> f64 {
    let p_t = 2.0 * electron_mass().ev() * 9f64.sqrt();
    f64::from(l_gamma.max(1)) * hbar_c() / p_t * 1e6
}

/// Evaluates a figure's sweep. Identical specs give bit-identical tables.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let params = spec.resolved_parameters()?;
    let grid = spec.grid.unwrap_or_else(|| spec.figure.default_grid());
    let xs = grid.points()?;
    let p = Params(params.clone());
    let (series, row) = figure_rows(spec.figure, &p)?;

    let evaluated: Vec<Option<Vec<f64>>> = xs
        .par_iter()
        .map(|&x| {
            row(x).ok().and_then(|mut cells| {
                cells.insert(0, x);
                cells.iter().all(|v| v.is_finite()).then_some(cells)
            })
        })
        .collect();

    let mut columns = vec![spec.figure.axis()];
    columns.extend(series);
    let mut table = Table::new(columns);
    let mut dropped = 0;
    for cells in evaluated {
        match cells {
            Some(cells) => table.push_row(cells)?,
            None => dropped += 1,
        }
    }
    let table = table
        .with_meta("figure", spec.figure.as_str())
        .with_meta("parameters", &params)
        .with_meta("grid", grid)
        .with_meta("version", env!("CARGO_PKG_VERSION"))
        .with_meta("constants_sha256", CONSTANTS.table_hash())
        .with_meta("dropped_rows", dropped);
    Ok(SweepResult { figure: spec.figure, table, dropped_rows: dropped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(figure: FigureId, count: usize) -> SweepResult {
        let mut grid = figure.default_grid();
        grid.count = count;
        run_sweep(&SweepSpec::new(figure).with_grid(grid)).unwrap()
    }

    #[test]
    fn figure_ids_round_trip() {
        for f in FigureId::ALL {
            assert_eq!(f.as_str().parse::<FigureId>().unwrap(), f);
        }
        assert!(matches!("fig9".parse::<FigureId>(), Err(Error::UnknownFigure(_))));
    }

    #[test]
    fn grid_shapes() {
        let lin = Grid { min: 0.0, max: 1.0, count: 5, scale: GridScale::Linear }.points().unwrap();
        assert_eq!(lin, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = Grid { min: 1.0, max: 100.0, count: 3, scale: GridScale::Log }.points().unwrap();
        assert_eq!(log[0], 1.0);
        assert!((log[1] - 10.0).abs() < 1e-12);
        assert_eq!(log[2], 100.0);
        let ll = Grid { min: 1e-3, max: 1.5, count: 600, scale: GridScale::LogLinear }.points().unwrap();
        assert_eq!(ll.len(), 600);
        assert!(ll.windows(2).all(|w| w[0] < w[1]));
        assert_eq!((ll[0], ll[599]), (1e-3, 1.5));
        let two = Grid { min: 1e-3, max: 1.5, count: 2, scale: GridScale::LogLinear }.points().unwrap();
        assert_eq!(two, vec![1e-3, 1.5]);
        assert!(Grid { min: 0.0, max: 1.0, count: 1, scale: GridScale::Linear }.points().is_err());
        assert!(Grid { min: 0.0, max: 1.0, count: 3, scale: GridScale::Log }.points().is_err());
        assert!(Grid { min: 2.0, max: 1.0, count: 3, scale: GridScale::Linear }.points().is_err());
    }

    #[test]
    fn overrides_are_validated() {
        let bad = SweepSpec::new(FigureId::Fig6).set("pitch_rad", 0.1);
        assert!(matches!(run_sweep(&bad), Err(Error::UnknownParameter { .. })));
        let ok = SweepSpec::new(FigureId::Fig6).set("wavelength_nm", 729.0);
        let r = run_sweep(&ok).unwrap();
        assert_eq!(r.table.metadata["parameters"]["wavelength_nm"], 729.0);
    }

    #[test]
    fn fig6_schema_and_longitudinal_line() {
        let r = run_sweep(&SweepSpec::new(FigureId::Fig6)).unwrap();
        let headers: Vec<String> = r.table.columns.iter().map(Column::header).collect();
        assert_eq!(
            headers,
            ["b [nm]", "E_long [neV]", "E_T(m_gamma=2) [neV]", "E_T(m_gamma=3) [neV]", "E_T(m_gamma=4) [neV]"]
        );
        assert_eq!(r.table.rows.len(), 200);
        for row in &r.table.rows {
            assert!((row[1] - 0.13).abs() < 0.05 * 0.13);
            assert!((row[3] / row[2] - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fig8a_crossing_near_380_fm() {
        let r = run_sweep(&SweepSpec::new(FigureId::Fig8a)).unwrap();
        let rows = &r.table.rows;
        let i = rows.iter().position(|row| row[1] < row[2]).unwrap();
        assert!(i > 0);
        let oracle = hbar_c() * 2.5 / electron_mass().ev().powi(2) / 5e-6 * 1e6;
        assert!((rows[i][0] - oracle).abs() / oracle < 0.02, "{} vs {oracle}", rows[i][0]);
        assert!((oracle - 378.0).abs() < 2.0);
    }

    #[test]
    fn minimal_grid_for_every_figure() {
        for f in FigureId::ALL {
            let r = small(f, 2);
            assert_eq!(r.table.rows.len() + r.dropped_rows, 2, "{f}");
            assert_eq!(r.table.rows.len(), 2, "{f}");
            assert!(r.table.rows.iter().all(|row| row.len() == r.table.columns.len()));
        }
    }

    #[test]
    fn error_rows_are_dropped_and_counted() {
        let grid = Grid { min: 0.0, max: 50.0, count: 3, scale: GridScale::Linear };
        let r = run_sweep(&SweepSpec::new(FigureId::Fig6).with_grid(grid)).unwrap();
        assert_eq!(r.dropped_rows, 1);
        assert_eq!(r.table.rows.len(), 2);
        assert_eq!(r.table.metadata["dropped_rows"], 1);
    }

    #[test]
    fn deterministic_output() {
        let a = small(FigureId::Fig2b, 50).table.to_csv().unwrap();
        let b = small(FigureId::Fig2b, 50).table.to_csv().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fig7_combined_curve_has_interior_maximum() {
        let r = small(FigureId::Fig7, 60);
        let combined: Vec<f64> = r.table.rows.iter().map(|row| row[5]).collect();
        let (imax, vmax) =
            combined.iter().copied().enumerate().fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        assert!(imax > 0 && imax < combined.len() - 1);
        assert!(combined[0] < 0.01 * vmax);
        assert!(*combined.last().unwrap() < 0.5 * vmax);
    }
}
