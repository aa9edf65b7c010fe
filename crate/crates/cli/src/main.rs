//! `superkick` command-line front-end.
//!
//! Every physical flag carries its unit in its name. Data goes to stdout (or
//! `--output`); diagnostics go to stderr as `error[CODE]: message`.
//! Exit codes: 0 success, 1 usage error, 2 numerical error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use superkick::beam::{superkick, Helicity, TwistedPhotonBeam};
use superkick::pair_production::{
    crossover_product, fit_beam_for_threshold_factor, pair_threshold, pair_threshold_with_pt, profile_peak_for,
    PairThresholdQuery,
};
use superkick::recoil_kinematics::{
    absorption_energy, deuteron_threshold, focus_fraction, focus_radius, TargetParticle,
};
use superkick::special_functions::HalfInt;
use superkick::sweeps::{run_sweep, FigureId, GridScale, SweepSpec};
use superkick::table::{Column, Table};
use superkick::transitions::{excitation_probabilities, mean_cm_am, recoil_ratio, TransitionChannel};
use superkick::trap::{
    jump_probability_extended, jump_probability_point, lamb_dicke, sideband_spectrum, LambDickeRegime, TrapModel,
};
use superkick::units::{
    ca40_ion_mass, deuteron_binding, electron_mass, hbar_c, nonrel_recoil_energy, wavelength_to_energy, Energy, Length,
    Momentum,
};
use superkick::{Error, Result};

const THREADS_ENV: &str = "SUPERKICK_THREADS";

#[derive(Parser, Debug)]
#[command(name = "superkick", version, about = "Recoil kinematics of twisted-photon absorption")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sublevel probabilities and the internal / centre-of-mass split of m_γ
    AmTransfer(AtomArgs),
    /// Ratio of transverse to longitudinal recoil momentum
    RecoilRatio(AtomArgs),
    /// Longitudinal and transverse recoil of a trapped ⁴⁰Ca⁺ ion
    IonRecoil(IonRecoilArgs),
    /// Trap-jump probabilities for point-like and extended ions
    TrapJump(TrapArgs),
    /// Distribution of transverse trap quanta after absorption
    Sidebands(SidebandArgs),
    /// Deuteron photodisintegration threshold with recoil
    DeuteronThreshold(DeuteronArgs),
    /// Fraction of absorptions with a large transverse kick
    FocusFraction(FocusArgs),
    /// γγ → e⁺e⁻ threshold for a twisted photon
    PairThreshold(PairArgs),
    /// b·θ_k product where the twisted and plane-wave thresholds meet
    Crossover(CrossoverArgs),
    /// Beam parameters for a chosen multiple of the plane-wave threshold
    BeamFit(BeamFitArgs),
    /// Regenerate the data series behind a figure or table
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct AtomArgs {
    /// Total angular momentum m_γ of the photon [ħ]
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    m_gamma: i32,
    /// Photon spin Λ (+1 or -1) [ħ]
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    spin: i32,
    /// Multipole order J of the transition (1 = S→P, 2 = S→D, 3 = S→F)
    #[arg(long, default_value_t = 1)]
    multipole: u32,
    /// Initial magnetic quantum number m_i (integer or half-integer) [ħ]
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    m_initial: f64,
    /// Pitch angle θ_k [rad]
    #[arg(long, default_value_t = 0.1)]
    pitch_rad: f64,
    /// Photon wavelength [nm]
    #[arg(long, default_value_t = 397.0)]
    wavelength_nm: f64,
    /// Impact parameter [nm]
    #[arg(long)]
    b_nm: f64,
}

#[derive(Args, Debug)]
struct IonRecoilArgs {
    /// Impact parameter [nm]
    #[arg(long, allow_hyphen_values = true)]
    b_nm: f64,
    /// Photon wavelength [nm]
    #[arg(long, default_value_t = 397.0)]
    wavelength_nm: f64,
    /// Angular momentum delivered to the centre of mass [ħ]
    #[arg(long, default_value_t = 1)]
    delta_l: u32,
    /// Trap frequency [MHz]
    #[arg(long, default_value_t = 1.5)]
    trap_mhz: f64,
}

#[derive(Args, Debug)]
struct BeamArgs {
    /// Total angular momentum m_γ of the photon [ħ]
    #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
    m_gamma: i32,
    /// Photon spin Λ (+1 or -1) [ħ]
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    spin: i32,
    /// Photon wavelength [nm]
    #[arg(long, default_value_t = 729.0)]
    wavelength_nm: f64,
    /// Pitch angle θ_k [rad]
    #[arg(long, default_value_t = 0.5)]
    pitch_rad: f64,
    /// Internal angular momentum change Δm = m_f − m_i [ħ]; ν = m_γ − Δm goes to the centre of mass
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    delta_m: i32,
    /// Per-axis rms spread of the ion [nm]; defaults to the trap ground-state width
    #[arg(long)]
    sigma_nm: Option<f64>,
    /// Trap frequency, axial and transverse [MHz]
    #[arg(long, default_value_t = 1.5)]
    trap_mhz: f64,
}

#[derive(Args, Debug)]
struct TrapArgs {
    #[command(flatten)]
    beam: BeamArgs,
    /// Impact parameter [nm]
    #[arg(long, allow_hyphen_values = true)]
    b_nm: f64,
}

#[derive(Args, Debug)]
struct SidebandArgs {
    #[command(flatten)]
    beam: BeamArgs,
    /// Impact parameter [nm]
    #[arg(long, allow_hyphen_values = true)]
    b_nm: f64,
    /// Highest oscillator level kept
    #[arg(long, default_value_t = 8)]
    n_max: u32,
}

#[derive(Args, Debug)]
struct DeuteronArgs {
    /// Total angular momentum m_γ of the photon [ħ]
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    m_gamma: i32,
    /// Angular momentum absorbed by the nuclear transition [ħ]
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    internal_am: i32,
    /// Impact parameter [fm]
    #[arg(long, allow_hyphen_values = true)]
    b_fm: f64,
}

#[derive(Args, Debug)]
struct FocusArgs {
    /// Envelope scale w_0 of the Bessel–Gauss profile [pm]
    #[arg(long)]
    w0_pm: f64,
    /// Angular momentum delivered to the centre of mass [ħ]
    #[arg(long, default_value_t = 1)]
    delta_l: u32,
    /// Cut on p_T/p_z
    #[arg(long, default_value_t = 0.1)]
    ratio_cut: f64,
    /// Pitch angle θ_k [rad]
    #[arg(long, default_value_t = 1e-3)]
    pitch_rad: f64,
    /// Total angular momentum m_γ of the photon [ħ]
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    m_gamma: i32,
    /// Photon energy [MeV]; defaults to the deuteron binding energy
    #[arg(long)]
    energy_mev: Option<f64>,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Background photon energy ω₂ [eV]
    #[arg(long, default_value_t = 2.5)]
    omega2_ev: f64,
    /// Pitch angle θ_k [µrad]
    #[arg(long, default_value_t = 5.0)]
    pitch_urad: f64,
    /// Transverse momentum of the pair [MeV/c]
    #[arg(long, conflicts_with = "b_fm", required_unless_present = "b_fm")]
    pt_mev: Option<f64>,
    /// Impact parameter [fm]; p_T = ℓ_γ ħ/b
    #[arg(long, allow_hyphen_values = true)]
    b_fm: Option<f64>,
    /// Orbital index ℓ_γ = m_γ − Λ, used with --b-fm
    #[arg(long, default_value_t = 1)]
    l_gamma: i32,
}

#[derive(Args, Debug)]
struct CrossoverArgs {
    /// Background photon energy ω₂ [eV]
    #[arg(long, default_value_t = 2.5)]
    omega2_ev: f64,
    /// Orbital index ℓ_γ = m_γ − Λ
    #[arg(long, default_value_t = 1)]
    l_gamma: i32,
}

#[derive(Args, Debug)]
struct BeamFitArgs {
    /// Requested multiple of the plane-wave threshold
    #[arg(long, default_value_t = 10.0)]
    factor: f64,
    /// Background photon energy ω₂ [eV]
    #[arg(long, default_value_t = 2.5)]
    omega2_ev: f64,
    /// Orbital index ℓ_γ = m_γ − Λ
    #[arg(long, default_value_t = 1)]
    l_gamma: i32,
    /// Pitch angle of a reference beam whose profile peak is also reported [µrad]
    #[arg(long, default_value_t = 5.0)]
    reference_pitch_urad: f64,
    /// Envelope w_0 of the reference beam [fm]
    #[arg(long, default_value_t = 60.0)]
    reference_w0_fm: f64,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// Figure or table id (fig2a … fig8b, deuteron_table, pair_table)
    #[arg(long)]
    figure: String,
    /// Override a figure parameter, as name=value (repeatable)
    #[arg(long = "set", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
    /// Lower end of the swept axis, in the axis unit
    #[arg(long)]
    grid_min: Option<f64>,
    /// Upper end of the swept axis, in the axis unit
    #[arg(long)]
    grid_max: Option<f64>,
    /// Number of grid points (2 … 1000000)
    #[arg(long)]
    grid_count: Option<usize>,
    /// Grid spacing: linear, log or log-linear
    #[arg(long)]
    grid_scale: Option<String>,
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn single_row(columns: Vec<Column>, row: Vec<f64>) -> Result<Table> {
    let mut t = Table::new(columns);
    t.push_row(row)?;
    Ok(t)
}

fn atom_inputs(a: &AtomArgs) -> Result<(TwistedPhotonBeam, TransitionChannel, Length)> {
    let beam = TwistedPhotonBeam::from_wavelength(
        a.m_gamma,
        Helicity::from_i32(a.spin)?,
        Length::from_nm(a.wavelength_nm),
        a.pitch_rad,
    )?;
    let channel = TransitionChannel::new(a.multipole, HalfInt::from_f64(a.m_initial)?, format!("E{}", a.multipole))?;
    Ok((beam, channel, Length::from_nm(a.b_nm)))
}

fn am_transfer(a: &AtomArgs) -> Result<Table> {
    let (beam, channel, b) = atom_inputs(a)?;
    let dist = excitation_probabilities(&beam, &channel, b)?;
    let internal = dist.mean_delta_m();
    let mut columns = vec![Column::new("b", "nm"), Column::new("l_internal", "hbar"), Column::new("l_cm", "hbar")];
    let mut row = vec![b.nm(), internal, f64::from(beam.m_gamma()) - internal];
    for (level, w) in dist.levels.iter().zip(&dist.weights) {
        columns.push(Column::new(format!("w(m_f={})", level.m_final), "1"));
        row.push(*w);
    }
    single_row(columns, row)
}

fn recoil_ratio_cmd(a: &AtomArgs) -> Result<Table> {
    let (beam, channel, b) = atom_inputs(a)?;
    let cm = mean_cm_am(&beam, &channel, b)?;
    let ratio = recoil_ratio(&beam, &channel, b)?;
    single_row(
        vec![Column::new("b", "nm"), Column::new("l_cm", "hbar"), Column::new("pT/pz", "1")],
        vec![b.nm(), cm, ratio],
    )
}

fn ion_recoil(a: &IonRecoilArgs) -> Result<Table> {
    let b = Length::from_nm(a.b_nm);
    let p_t = superkick(a.delta_l as i32, b)?;
    let photon = wavelength_to_energy(Length::from_nm(a.wavelength_nm))?;
    let target = TargetParticle::new(ca40_ion_mass(), b)?;
    let solution = absorption_energy(photon, &target, a.delta_l)?;
    let e_long = nonrel_recoil_energy(photon.as_momentum(), ca40_ion_mass())?;
    let e_t = nonrel_recoil_energy(p_t, ca40_ion_mass())?;
    let trap = TrapModel::calcium(a.trap_mhz * 1e6)?;
    let eta = lamb_dicke(e_t, trap.transverse_hz())?;
    single_row(
        vec![
            Column::new("b", "nm"),
            Column::new("p_T", "eV/c"),
            Column::new("E_long", "neV"),
            Column::new("E_T", "neV"),
            Column::new("shift", "neV"),
            Column::new("level_spacing", "neV"),
            Column::new("eta_T", "1"),
        ],
        vec![b.nm(), p_t.ev(), e_long.nev(), e_t.nev(), solution.shift().nev(), trap.level_spacing().nev(), eta],
    )
}

fn trap_inputs(a: &BeamArgs) -> Result<(TwistedPhotonBeam, TrapModel, Option<Length>, i32)> {
    let beam = TwistedPhotonBeam::from_wavelength(
        a.m_gamma,
        Helicity::from_i32(a.spin)?,
        Length::from_nm(a.wavelength_nm),
        a.pitch_rad,
    )?;
    let trap = TrapModel::calcium(a.trap_mhz * 1e6)?;
    Ok((beam, trap, a.sigma_nm.map(Length::from_nm), a.m_gamma - a.delta_m))
}

fn trap_jump(a: &TrapArgs) -> Result<Table> {
    let (beam, trap, sigma, nu) = trap_inputs(&a.beam)?;
    let b = Length::from_nm(a.b_nm);
    let p_t = superkick(nu.abs(), b)?;
    let eta = lamb_dicke(nonrel_recoil_energy(p_t, trap.ion_mass())?, trap.transverse_hz())?;
    let point = jump_probability_point(p_t, &trap)?;
    let extended = jump_probability_extended(&beam, nu, b, &trap, sigma)?;
    let broken = LambDickeRegime::classify(eta) == LambDickeRegime::Broken;
    single_row(
        vec![
            Column::new("b", "nm"),
            Column::new("p_T", "eV/c"),
            Column::new("eta_T", "1"),
            Column::new("lamb_dicke_broken", "1"),
            Column::new("P_jump_point", "1"),
            Column::new("P_jump_extended", "1"),
        ],
        vec![b.nm(), p_t.ev(), eta, f64::from(u8::from(broken)), point, extended],
    )
}

fn sidebands(a: &SidebandArgs) -> Result<Table> {
    let (beam, trap, sigma, nu) = trap_inputs(&a.beam)?;
    let s = sideband_spectrum(&beam, nu, Length::from_nm(a.b_nm), &trap, sigma, a.n_max)?;
    if s.truncation_warning {
        eprintln!("warning[TRUNCATION]: {:.3e} of the absorption strength lies above n_max = {}", s.residual, a.n_max);
    }
    let mut t = Table::new(vec![Column::new("n", "1"), Column::new("weight", "1")]);
    for (n, w) in s.weights.iter().enumerate() {
        t.push_row(vec![n as f64, *w])?;
    }
    Ok(t.with_meta("carrier_weight", s.carrier_weight)
        .with_meta("residual", s.residual)
        .with_meta("truncation_warning", s.truncation_warning)
        .with_meta("nu", nu))
}

fn deuteron(a: &DeuteronArgs) -> Result<Table> {
    let beam = TwistedPhotonBeam::new(a.m_gamma, Helicity::Plus, deuteron_binding(), 1e-3)?;
    let b = Length::from_fm(a.b_fm);
    let s = deuteron_threshold(&beam, a.internal_am, b)?;
    single_row(
        vec![
            Column::new("b", "fm"),
            Column::new("threshold", "keV"),
            Column::new("shift", "keV"),
            Column::new("p_T", "MeV/c"),
            Column::new("recoil", "keV"),
        ],
        vec![b.fm(), s.photon_energy.kev(), s.shift().kev(), s.p_t.mev(), s.recoil_energy.kev()],
    )
}

fn focus(a: &FocusArgs) -> Result<Table> {
    let energy = a.energy_mev.map_or_else(deuteron_binding, Energy::from_mev);
    let beam = TwistedPhotonBeam::new(a.m_gamma, Helicity::Plus, energy, a.pitch_rad)?
        .with_envelope(Length::from_pm(a.w0_pm))?;
    let r = focus_radius(&beam, a.delta_l, a.ratio_cut)?;
    let f = focus_fraction(&beam, a.delta_l, a.ratio_cut)?;
    single_row(
        vec![Column::new("w0", "pm"), Column::new("b_star", "fm"), Column::new("fraction", "1")],
        vec![a.w0_pm, r.fm(), f],
    )
}

fn pair(a: &PairArgs) -> Result<Table> {
    let omega2 = Energy::from_ev(a.omega2_ev);
    let theta = a.pitch_urad * 1e-6;
    let t = match (a.pt_mev, a.b_fm) {
        (Some(pt), _) => pair_threshold_with_pt(omega2, theta, Momentum::from_mev(pt))?,
        (None, Some(b)) => pair_threshold(&PairThresholdQuery::new(omega2, theta, Length::from_fm(b), a.l_gamma)?)?,
        (None, None) => return Err(config("one of --pt-mev or --b-fm is required")),
    };
    single_row(
        vec![
            Column::new("threshold", "GeV"),
            Column::new("plane_wave", "GeV"),
            Column::new("p_T", "MeV/c"),
            Column::new("p_z", "GeV/c"),
        ],
        vec![t.photon_energy.gev(), t.plane_wave.gev(), t.p_t.mev(), t.p_z.ev() * 1e-9],
    )
}

fn crossover(a: &CrossoverArgs) -> Result<Table> {
    let omega2 = Energy::from_ev(a.omega2_ev);
    let c = crossover_product(omega2, a.l_gamma)?;
    let m = electron_mass().ev();
    let analytic = f64::from(a.l_gamma) * hbar_c() * a.omega2_ev / (m * m) * 1e9;
    single_row(
        vec![
            Column::new("product", "pm*urad"),
            Column::new("analytic", "pm*urad"),
            Column::new("variation", "1"),
            Column::new("b_at_reference", "fm"),
        ],
        vec![c.pm_urad(), analytic, c.variation, c.product / c.reference_angle * 1e6],
    )
    .map(|t| t.with_meta("reference_pitch_urad", c.reference_angle * 1e6))
}

fn beam_fit(a: &BeamFitArgs) -> Result<Table> {
    let omega2 = Energy::from_ev(a.omega2_ev);
    let fit = fit_beam_for_threshold_factor(a.factor, omega2, a.l_gamma)?;
    let reference = profile_peak_for(
        a.factor.max(1.0),
        omega2,
        a.l_gamma,
        a.reference_pitch_urad * 1e-6,
        Length::from_fm(a.reference_w0_fm),
    );
    let mut columns =
        vec![Column::new("factor", "1"), Column::new("p_T", "MeV/c"), Column::new("photon_energy", "GeV")];
    let mut row = vec![fit.factor, fit.p_t.mev(), fit.photon_energy.gev()];
    match (fit.impact_parameter, fit.w0, fit.achieved_peak) {
        (Some(b), Some(w0), Some(peak)) => {
            columns.extend([
                Column::new("b", "fm"),
                Column::new("pitch", "urad"),
                Column::new("w0", "fm"),
                Column::new("achieved_peak", "fm"),
            ]);
            row.extend([b.fm(), fit.pitch_angle * 1e6, w0.fm(), peak.fm()]);
        }
        _ => eprintln!("note: factor = 1 needs no transverse kick; the impact parameter is unbounded"),
    }
    if let Ok(peak) = &reference {
        columns.push(Column::new("reference_peak", "fm"));
        row.push(peak.fm());
    }
    let t = single_row(columns, row)?
        .with_meta("impact_parameter", if fit.impact_parameter.is_some() { "bounded" } else { "unbounded" })
        .with_meta("reference_pitch_urad", a.reference_pitch_urad)
        .with_meta("reference_w0_fm", a.reference_w0_fm);
    Ok(t)
}

fn reproduce(a: &ReproduceArgs) -> Result<Table> {
    let figure: FigureId = a.figure.parse()?;
    let mut overrides = BTreeMap::new();
    for item in &a.set {
        let (name, value) =
            item.split_once('=').ok_or_else(|| config(format!("--set expects NAME=VALUE, got `{item}`")))?;
        let value: f64 =
            value.trim().parse().map_err(|_| config(format!("--set {name}: `{value}` is not a number")))?;
        overrides.insert(name.trim().to_string(), value);
    }
    let mut grid = figure.default_grid();
    if let Some(v) = a.grid_min {
        grid.min = v;
    }
    if let Some(v) = a.grid_max {
        grid.max = v;
    }
    if let Some(v) = a.grid_count {
        grid.count = v;
    }
    if let Some(s) = &a.grid_scale {
        grid.scale = s.parse::<GridScale>()?;
    }
    let spec = SweepSpec { figure, overrides, grid: Some(grid) };
    let result = run_sweep(&spec)?;
    if result.dropped_rows > 0 {
        eprintln!("note: {} grid points failed to evaluate and were dropped", result.dropped_rows);
    }
    Ok(result.table)
}

fn execute(cli: &Cli) -> Result<Table> {
    match &cli.command {
        Command::AmTransfer(a) => am_transfer(a),
        Command::RecoilRatio(a) => recoil_ratio_cmd(a),
        Command::IonRecoil(a) => ion_recoil(a),
        Command::TrapJump(a) => trap_jump(a),
        Command::Sidebands(a) => sidebands(a),
        Command::DeuteronThreshold(a) => deuteron(a),
        Command::FocusFraction(a) => focus(a),
        Command::PairThreshold(a) => pair(a),
        Command::Crossover(a) => crossover(a),
        Command::BeamFit(a) => beam_fit(a),
        Command::Reproduce(a) => reproduce(a),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| config(format!("could not size the thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    let table = execute(cli)?;
    let text = match cli.format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json()?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 1 {
                eprint!("error[USAGE]: {e}");
            } else {
                print!("{e}");
            }
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
