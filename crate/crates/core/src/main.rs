use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use bec_coupling::de::{
    bp_threshold_coupled, Coupled, CoupledThreshold, DeConfig, DeSystem, Variant,
};
use bec_coupling::distance::{ss_exponent, ss_growth_curve, GrowthPoint, SsExponentReport};
use bec_coupling::ensemble::RegularEnsemble;
use bec_coupling::exit::{
    default_wiggle_band, ebp_curve, map_threshold_via_area, wiggle_report, ExitCurve, ExitPoint,
    WiggleReport,
};
use bec_coupling::fp::{
    construct_one_sided_fp, family_area, fp_diagnostics, AreaReport, FpConfig, FpDiagnostics,
    FpOutcome, InterpolatedFamily, OneSidedFP,
};
use bec_coupling::landscape::{h_landscape, HLandscape};
use bec_coupling::numeric::linspace;
use bec_coupling::output::{summary_json, CurveFile, Plot, RunManifest};
use bec_coupling::thresholds::thresholds_regular;
use bec_coupling::Error;

#[derive(Parser, Debug)]
#[command(
    name = "bec-coupling",
    version,
    about = "Thresholds, EXIT curves and fixed points of coupled LDPC ensembles on the BEC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug, Clone)]
struct IoArgs {
    /// Write the curve file here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Also write the JSON summary here (it always goes to stdout).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Render a plot here.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Worker threads for grid sweeps.
    #[arg(long, global = true, env = "BEC_COUPLING_THREADS")]
    threads: Option<usize>,
    /// Store the wall-clock time in the manifest (makes outputs run-dependent).
    #[arg(long, global = true)]
    record_timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// BP and MAP thresholds, optionally of a coupled ensemble.
    Thresholds(ThresholdsArgs),
    /// EBP EXIT curve by fixed-entropy continuation.
    Ebp(EbpArgs),
    /// Wiggle amplitude of the steep branch for one or more windows.
    Wiggle(WiggleArgs),
    /// One-sided fixed point and its diagnostics.
    Fp(FpArgs),
    /// EXIT area of the interpolated family built from a one-sided fixed point.
    Area(AreaArgs),
    /// Stopping-set growth exponent.
    Ss(SsArgs),
    /// Fixed points and stationary points of the scalar DE landscape.
    Hprops(HpropsArgs),
}

#[derive(Args, Debug, Serialize)]
struct CoupledArgs {
    /// Chain half-length.
    #[arg(long = "L")]
    half_length: Option<usize>,
    /// Smoothing window.
    #[arg(long)]
    w: Option<usize>,
    /// uncoupled, chain or smoothed; inferred from --L/--w when absent.
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long, default_value_t = 1e-12)]
    de_tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iterations: usize,
}

impl CoupledArgs {
    fn variant(&self) -> Variant {
        self.variant.unwrap_or(match (self.half_length, self.w) {
            (None, _) => Variant::Uncoupled,
            (Some(_), None) => Variant::Chain,
            (Some(_), Some(_)) => Variant::Smoothed,
        })
    }

    fn de(&self) -> DeConfig {
        DeConfig {
            tolerance: self.de_tol,
            max_iterations: self.max_iterations,
            ..DeConfig::default()
        }
    }

    fn build(&self, l: u32, r: u32, w: Option<usize>) -> Result<Coupled, Failure> {
        let variant = self.variant();
        let half_length = self.half_length.unwrap_or(0);
        if variant != Variant::Uncoupled && half_length == 0 {
            return Err(Failure::usage("--L is required for coupled variants"));
        }
        let w = w.or(self.w).unwrap_or(0);
        if variant == Variant::Smoothed && w == 0 {
            return Err(Failure::usage("--w is required for the smoothed variant"));
        }
        Ok(Coupled::build(variant, l, r, half_length, w)?)
    }
}

#[derive(Args, Debug, Serialize)]
struct ThresholdsArgs {
    #[arg(value_name = "LEFT_DEGREE")]
    l: u32,
    #[arg(value_name = "RIGHT_DEGREE")]
    r: u32,
    #[command(flatten)]
    coupled: CoupledArgs,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Bracket width of the coupled threshold search.
    #[arg(long, default_value_t = 1e-6)]
    bisect_tol: f64,
}

#[derive(Args, Debug, Serialize)]
struct EbpArgs {
    #[arg(value_name = "LEFT_DEGREE")]
    l: u32,
    #[arg(value_name = "RIGHT_DEGREE")]
    r: u32,
    #[command(flatten)]
    coupled: CoupledArgs,
    /// Number of entropy points.
    #[arg(long, default_value_t = 400)]
    chi_grid: usize,
    #[arg(long)]
    chi_lo: Option<f64>,
    #[arg(long)]
    chi_hi: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct WiggleArgs {
    #[arg(value_name = "LEFT_DEGREE")]
    l: u32,
    #[arg(value_name = "RIGHT_DEGREE")]
    r: u32,
    #[command(flatten)]
    coupled: CoupledArgs,
    /// Windows to compare (smoothed variant), comma separated; defaults to `--w` or `2,3`.
    #[arg(long = "windows", value_delimiter = ',')]
    windows: Vec<usize>,
    #[arg(long, default_value_t = 400)]
    chi_grid: usize,
    /// Entropy band `lo,hi`; defaults to [0.5, 0.7] x_s(eps_MAP).
    #[arg(long, value_name = "LO,HI", value_parser = parse_band)]
    band: Option<(f64, f64)>,
}

#[derive(Args, Debug, Serialize)]
struct FpShared {
    #[arg(value_name = "LEFT_DEGREE")]
    l: u32,
    #[arg(value_name = "RIGHT_DEGREE")]
    r: u32,
    #[arg(long)]
    w: usize,
    /// One-sided length.
    #[arg(long)]
    lp: usize,
    #[arg(long)]
    chi: f64,
    /// Allow lengths below the existence bound.
    #[arg(long)]
    no_length_bound: bool,
    #[arg(long, default_value_t = 1e-11)]
    v_tol: f64,
}

impl FpShared {
    fn construct(&self) -> Result<OneSidedFP, Failure> {
        let cfg = FpConfig {
            v_tolerance: self.v_tol,
            enforce_length_bound: !self.no_length_bound,
            ..FpConfig::default()
        };
        Ok(construct_one_sided_fp(
            self.l, self.r, self.w, self.lp, self.chi, &cfg,
        )?)
    }
}

#[derive(Args, Debug, Serialize)]
struct FpArgs {
    #[command(flatten)]
    fp: FpShared,
    /// Margin of the transition count.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
}

#[derive(Args, Debug, Serialize)]
struct AreaArgs {
    #[command(flatten)]
    fp: FpShared,
    /// Family half-length.
    #[arg(long = "L")]
    half_length: usize,
    /// Initial number of alpha intervals.
    #[arg(long, default_value_t = 2000)]
    intervals: usize,
    /// Rows of the emitted family curve.
    #[arg(long, default_value_t = 201)]
    curve_points: usize,
}

#[derive(Args, Debug, Serialize)]
struct SsArgs {
    #[arg(value_name = "LEFT_DEGREE")]
    l: u32,
    #[arg(value_name = "RIGHT_DEGREE")]
    r: u32,
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    /// Number of relative weights on the growth curve.
    #[arg(long, default_value_t = 99)]
    omega_grid: usize,
}

#[derive(Args, Debug, Serialize)]
struct HpropsArgs {
    eps: f64,
    #[arg(value_name = "LEFT_DEGREE")]
    l: u32,
    #[arg(value_name = "RIGHT_DEGREE")]
    r: u32,
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    /// Rows of the emitted h(x) curve.
    #[arg(long, default_value_t = 1001)]
    grid: usize,
}

/// A failed run: exit code plus JSON diagnostic.
#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(msg: &str) -> Self {
        Self {
            code: 2,
            kind: "usage",
            message: msg.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::InvalidParams(_) => "invalid-params",
            Error::Precondition(_) => "precondition",
            Error::NoBracket { .. } => "no-bracket",
            Error::NoNontrivialFixedPoint { .. } => "no-nontrivial-fixed-point",
            Error::NoConvergence { .. } => "no-convergence",
            Error::Unreachable { .. } => "unreachable",
            Error::Quadrature(_) => "quadrature",
            Error::Empty(_) => "empty",
        };
        let code = if matches!(e, Error::InvalidParams(_) | Error::Precondition(_)) {
            2
        } else {
            1
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

/// What a subcommand produces.
struct Output {
    manifest: RunManifest,
    summary: serde_json::Value,
    curve: CurveFile,
    plot: Plot,
}

fn parse_band(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(lo)?, num(hi)?))
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn b(v: bool) -> f64 {
    if v {
        1.0
    } else {
        0.0
    }
}

#[derive(Serialize)]
struct ThresholdsSummary {
    l: u32,
    r: u32,
    design_rate: f64,
    eps_bp: f64,
    eps_map: f64,
    eps_map_area: f64,
    x_bp: f64,
    x_map: f64,
    coupled: Option<CoupledSummary>,
}

#[derive(Serialize)]
struct CoupledSummary {
    system: String,
    variant: Variant,
    design_rate: f64,
    threshold: CoupledThreshold,
}

fn coupled_rate(sys: &Coupled) -> Result<f64, Failure> {
    Ok(match sys {
        Coupled::Uncoupled(s) => s.ensemble().design_rate(),
        Coupled::Chain(s) => s.params().design_rate(),
        Coupled::Smoothed(s) => s.params().design_rate()?,
    })
}

fn cmd_thresholds(a: &ThresholdsArgs) -> Result<Output, Failure> {
    let e = RegularEnsemble::new(a.l, a.r)?;
    let t = thresholds_regular(&e, a.tol)?;
    let area = map_threshold_via_area(&e, 1e-10)?;
    let coupled = if a.coupled.variant() == Variant::Uncoupled {
        None
    } else {
        let sys = a.coupled.build(a.l, a.r, None)?;
        let threshold = bp_threshold_coupled(&sys, &a.coupled.de(), a.bisect_tol)?;
        Some(CoupledSummary {
            system: sys.describe(),
            variant: a.coupled.variant(),
            design_rate: coupled_rate(&sys)?,
            threshold,
        })
    };
    let mut names = cols(&["l", "r", "design_rate", "eps_bp", "eps_map", "eps_map_area"]);
    let mut row = vec![
        a.l as f64,
        a.r as f64,
        e.design_rate(),
        t.eps_bp,
        t.eps_map,
        area,
    ];
    if let Some(c) = &coupled {
        names.extend(cols(&["coupled_design_rate", "coupled_eps_bp"]));
        row.extend([c.design_rate, c.threshold.eps]);
    }
    let summary = ThresholdsSummary {
        l: a.l,
        r: a.r,
        design_rate: e.design_rate(),
        eps_bp: t.eps_bp,
        eps_map: t.eps_map,
        eps_map_area: area,
        x_bp: t.x_bp,
        x_map: t.x_map,
        coupled,
    };
    let plot = Plot {
        x_label: "eps".into(),
        y_label: "h".into(),
        series: vec![exit_regular_series(&e, summary.eps_bp)],
        bounds: Some(((0.0, 1.0), (0.0, 1.0))),
        unit_box: true,
    };
    Ok(Output {
        manifest: RunManifest::new("thresholds", to_value(a))
            .tolerance("root", a.tol)
            .tolerance("de", a.coupled.de_tol)
            .tolerance("coupled_bisection", a.bisect_tol),
        summary: to_value(&summary),
        curve: CurveFile::new(names, vec![row])?,
        plot,
    })
}

fn exit_regular_series(e: &RegularEnsemble, eps_bp: f64) -> Vec<(f64, f64)> {
    let mut pts = vec![(0.0, 0.0), (eps_bp, 0.0)];
    pts.extend(linspace(1e-4, 1.0, 400).into_iter().filter_map(|x| {
        let eps = e.eps_of_x(x);
        (eps >= eps_bp).then(|| (eps, bec_coupling::numeric::powi(e.check_out(x), e.l())))
    }));
    pts
}

fn chi_grid(n: usize, lo: Option<f64>, hi: Option<f64>) -> Result<Vec<f64>, Failure> {
    if n == 0 {
        return Err(Failure::usage("--chi-grid must be positive"));
    }
    Ok(match (lo, hi) {
        (None, None) => (1..=n).map(|k| k as f64 / (n + 1) as f64).collect(),
        (lo, hi) => linspace(lo.unwrap_or(1e-3), hi.unwrap_or(0.999), n),
    })
}

fn curve_rows(curve: &ExitCurve) -> Result<CurveFile, Failure> {
    let rows = curve
        .points
        .iter()
        .map(|p| vec![p.chi, p.eps, p.h_ebp, b(p.converged), p.iterations as f64])
        .collect();
    Ok(CurveFile::new(
        cols(&["chi", "eps", "h_ebp", "converged", "iterations"]),
        rows,
    )?)
}

#[derive(Serialize)]
struct EbpSummary {
    system: String,
    points: usize,
    converged: usize,
    min_eps: Option<ExitPoint>,
    wiggle: Option<WiggleReport>,
}

fn cmd_ebp(a: &EbpArgs) -> Result<Output, Failure> {
    let sys = a.coupled.build(a.l, a.r, None)?;
    let grid = chi_grid(a.chi_grid, a.chi_lo, a.chi_hi)?;
    let curve = ebp_curve(&sys, &grid, &a.coupled.de())?;
    let wiggle = if a.coupled.variant() == Variant::Uncoupled {
        None
    } else {
        wiggle_report(&curve, default_wiggle_band(&sys.base())?).ok()
    };
    let summary = EbpSummary {
        system: sys.describe(),
        points: curve.points.len(),
        converged: curve.points.iter().filter(|p| p.converged).count(),
        min_eps: curve.min_eps(),
        wiggle,
    };
    let plot = Plot {
        x_label: "eps".into(),
        y_label: "h".into(),
        series: vec![curve.points.iter().map(|p| (p.eps, p.h_ebp)).collect()],
        bounds: Some(((0.0, 1.0), (0.0, 1.0))),
        unit_box: true,
    };
    Ok(Output {
        manifest: RunManifest::new("ebp", to_value(a)).tolerance("de", a.coupled.de_tol),
        summary: to_value(&summary),
        curve: curve_rows(&curve)?,
        plot,
    })
}

#[derive(Serialize)]
struct WiggleEntry {
    system: String,
    w: Option<usize>,
    report: WiggleReport,
}

#[derive(Serialize)]
struct WiggleSummary {
    band: (f64, f64),
    entries: Vec<WiggleEntry>,
    /// First amplitude over last amplitude.
    ratio: Option<f64>,
}

fn cmd_wiggle(a: &WiggleArgs) -> Result<Output, Failure> {
    let e = RegularEnsemble::new(a.l, a.r)?;
    let variant = match a.coupled.variant {
        Some(v) => v,
        None if a.coupled.half_length.is_some() => Variant::Smoothed,
        None => Variant::Uncoupled,
    };
    let windows: Vec<Option<usize>> = match variant {
        Variant::Smoothed => {
            let list = match (a.windows.is_empty(), a.coupled.w) {
                (false, _) => a.windows.clone(),
                (true, Some(w)) => vec![w],
                (true, None) => vec![2, 3],
            };
            if list.windows(2).any(|p| p[1] <= p[0]) {
                return Err(Failure::usage("--windows must be strictly increasing"));
            }
            list.into_iter().map(Some).collect()
        }
        _ => vec![None],
    };
    let band = match a.band {
        Some(b) => b,
        None => default_wiggle_band(&e)?,
    };
    let grid = chi_grid(a.chi_grid, None, None)?;
    let de = a.coupled.de();
    let results: Vec<Result<(WiggleEntry, ExitCurve), Failure>> = windows
        .par_iter()
        .map(|w| {
            let sys = match variant {
                Variant::Smoothed => Coupled::build(
                    variant,
                    a.l,
                    a.r,
                    a.coupled.half_length.unwrap_or(0),
                    w.unwrap_or(0),
                )?,
                _ => a.coupled.build(a.l, a.r, None)?,
            };
            let curve = ebp_curve(&sys, &grid, &de)?;
            let report = wiggle_report(&curve, band)?;
            Ok((
                WiggleEntry {
                    system: sys.describe(),
                    w: *w,
                    report,
                },
                curve,
            ))
        })
        .collect();
    let mut entries = Vec::new();
    let mut curves = Vec::new();
    for r in results {
        let (entry, curve) = r?;
        entries.push(entry);
        curves.push(curve);
    }
    let ratio = (entries.len() > 1)
        .then(|| entries[0].report.amplitude / entries[entries.len() - 1].report.amplitude);
    let rows = entries
        .iter()
        .enumerate()
        .map(|(k, en)| {
            let r = en.report;
            vec![
                k as f64,
                en.w.unwrap_or(0) as f64,
                r.amplitude,
                r.eps_min,
                r.eps_max,
                r.chi_lo,
                r.chi_hi,
                r.points as f64,
                r.wiggle_count as f64,
            ]
        })
        .collect();
    let names = cols(&[
        "index",
        "w",
        "amplitude",
        "eps_min",
        "eps_max",
        "chi_lo",
        "chi_hi",
        "points",
        "wiggle_count",
    ]);
    let plot = Plot {
        x_label: "chi".into(),
        y_label: "eps".into(),
        series: curves
            .iter()
            .map(|c| {
                c.points
                    .iter()
                    .filter(|p| p.converged && p.chi >= band.0 && p.chi <= band.1)
                    .map(|p| (p.chi, p.eps))
                    .collect()
            })
            .collect(),
        bounds: None,
        unit_box: false,
    };
    Ok(Output {
        manifest: RunManifest::new("wiggle", to_value(a)).tolerance("de", a.coupled.de_tol),
        summary: to_value(&WiggleSummary {
            band,
            entries,
            ratio,
        }),
        curve: CurveFile::new(names, rows)?,
        plot,
    })
}

#[derive(Serialize)]
struct FpSummary {
    eps_star: f64,
    chi: f64,
    outcome: FpOutcome,
    eps_spread: f64,
    residual: f64,
    length_bound: f64,
    v_iterations: usize,
    diagnostics: Option<FpDiagnostics>,
}

fn fp_summary(fp: &OneSidedFP, delta: f64) -> Result<FpSummary, Failure> {
    let diagnostics = if fp.is_proper() {
        Some(fp_diagnostics(fp, delta)?)
    } else {
        None
    };
    Ok(FpSummary {
        eps_star: fp.eps_star,
        chi: fp.chi,
        outcome: fp.outcome,
        eps_spread: fp.eps_spread,
        residual: fp.residual,
        length_bound: fp.length_bound,
        v_iterations: fp.v_iterations,
        diagnostics,
    })
}

fn cmd_fp(a: &FpArgs) -> Result<Output, Failure> {
    let fp = a.fp.construct()?;
    let lp = fp.length() as isize;
    let rows: Vec<Vec<f64>> = (-lp..=0).map(|i| vec![i as f64, fp.x.get(i)]).collect();
    let plot = Plot {
        x_label: "section".into(),
        y_label: "x".into(),
        series: vec![rows.iter().map(|r| (r[0], r[1])).collect()],
        bounds: Some(((-lp as f64, 0.0), (0.0, 1.0))),
        unit_box: false,
    };
    Ok(Output {
        manifest: RunManifest::new("fp", to_value(a)).tolerance("v", a.fp.v_tol),
        summary: to_value(&fp_summary(&fp, a.delta)?),
        curve: CurveFile::new(cols(&["section", "x"]), rows)?,
        plot,
    })
}

#[derive(Serialize)]
struct AreaSummary {
    fixed_point: FpSummary,
    area: AreaReport,
    within_bound: bool,
}

fn cmd_area(a: &AreaArgs) -> Result<Output, Failure> {
    let fp = a.fp.construct()?;
    let fixed_point = fp_summary(&fp, 0.05)?;
    let family = InterpolatedFamily::new(fp, a.half_length)?;
    let area = family_area(&family, a.intervals)?;
    if a.curve_points < 2 {
        return Err(Failure::usage("--curve-points must be at least 2"));
    }
    let mut rows = Vec::with_capacity(a.curve_points);
    let mut series = Vec::with_capacity(a.curve_points);
    for alpha in linspace(0.0, 1.0, a.curve_points) {
        let p = family.interpolate(alpha)?;
        let mid = family.half_length();
        rows.push(vec![
            alpha,
            p.x.entropy(),
            bec_coupling::de::entropy(&p.h),
            p.eps[mid],
            p.h[mid],
        ]);
        series.push((p.eps[mid], p.h[mid]));
    }
    let plot = Plot {
        x_label: "eps".into(),
        y_label: "h".into(),
        series: vec![series],
        bounds: Some(((0.0, 1.0), (0.0, 1.0))),
        unit_box: true,
    };
    Ok(Output {
        manifest: RunManifest::new("area", to_value(a))
            .tolerance("v", a.fp.v_tol)
            .tolerance("refinement", 1e-4),
        summary: to_value(&AreaSummary {
            fixed_point,
            within_bound: area.residual <= area.bound,
            area,
        }),
        curve: CurveFile::new(
            cols(&["alpha", "entropy", "exit_mean", "eps_center", "h_center"]),
            rows,
        )?,
        plot,
    })
}

#[derive(Serialize)]
struct SsSummary {
    exponent: SsExponentReport,
    unsolved_points: usize,
    growth: Vec<GrowthPoint>,
}

fn cmd_ss(a: &SsArgs) -> Result<Output, Failure> {
    let e = RegularEnsemble::new(a.l, a.r)?;
    let exponent = ss_exponent(&e, a.tol)?;
    let grid: Vec<f64> = (1..=a.omega_grid)
        .map(|k| k as f64 / (a.omega_grid + 1) as f64)
        .collect();
    let growth = ss_growth_curve(&e, &grid)?;
    let rows = growth
        .iter()
        .map(|g| {
            vec![
                g.omega,
                g.x.unwrap_or(f64::NAN),
                g.exponent.unwrap_or(f64::NAN),
                b(g.x.is_some()),
            ]
        })
        .collect();
    let plot = Plot {
        x_label: "omega".into(),
        y_label: "exponent".into(),
        series: vec![growth
            .iter()
            .filter_map(|g| g.exponent.map(|b| (g.omega, b)))
            .collect()],
        bounds: None,
        unit_box: false,
    };
    Ok(Output {
        manifest: RunManifest::new("ss", to_value(a)).tolerance("root", a.tol),
        summary: to_value(&SsSummary {
            exponent,
            unsolved_points: growth.iter().filter(|g| g.x.is_none()).count(),
            growth,
        }),
        curve: CurveFile::new(cols(&["omega", "x", "exponent", "solved"]), rows)?,
        plot,
    })
}

fn cmd_hprops(a: &HpropsArgs) -> Result<Output, Failure> {
    let e = RegularEnsemble::new(a.l, a.r)?;
    let land: HLandscape = h_landscape(a.eps, &e, a.tol)?;
    if a.grid < 2 {
        return Err(Failure::usage("--grid must be at least 2"));
    }
    let rows: Vec<Vec<f64>> = linspace(0.0, 1.0, a.grid)
        .into_iter()
        .map(|x| vec![x, e.h(a.eps, x)])
        .collect();
    let plot = Plot {
        x_label: "x".into(),
        y_label: "h(x)".into(),
        series: vec![rows.iter().map(|r| (r[0], r[1])).collect()],
        bounds: None,
        unit_box: false,
    };
    Ok(Output {
        manifest: RunManifest::new("hprops", to_value(a)).tolerance("root", a.tol),
        summary: to_value(&land),
        curve: CurveFile::new(cols(&["x", "h"]), rows)?,
        plot,
    })
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure {
        code: 1,
        kind: "io",
        message: format!("writing {}: {e}", path.display()),
    })
}

fn run(cli: &Cli, started: Instant) -> Result<(), (Failure, Option<RunManifest>)> {
    if let Some(n) = cli.io.threads {
        if n == 0 {
            return Err((Failure::usage("thread count must be positive"), None));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| {
                (
                    Failure {
                        code: 1,
                        kind: "threads",
                        message: e.to_string(),
                    },
                    None,
                )
            })?;
    }
    let out = match &cli.command {
        Command::Thresholds(a) => cmd_thresholds(a),
        Command::Ebp(a) => cmd_ebp(a),
        Command::Wiggle(a) => cmd_wiggle(a),
        Command::Fp(a) => cmd_fp(a),
        Command::Area(a) => cmd_area(a),
        Command::Ss(a) => cmd_ss(a),
        Command::Hprops(a) => cmd_hprops(a),
    }
    .map_err(|f| (f, None))?;
    let mut manifest = out.manifest;
    if cli.io.record_timing {
        manifest.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    }
    let summary = summary_json(&manifest, &out.summary);
    let with_manifest = |f: Failure| (f, Some(manifest.clone()));
    if let Some(p) = &cli.io.csv {
        write_file(p, &out.curve.to_csv(&manifest)).map_err(with_manifest)?;
    }
    if let Some(p) = &cli.io.svg {
        let mut svg = out.plot.to_svg();
        // "--" may not appear inside an XML comment
        let json = serde_json::to_string(&manifest)
            .expect("manifest serializes")
            .replace("--", "- -");
        let comment = format!("<!-- manifest {json} -->\n");
        let at = svg.find('\n').map_or(svg.len(), |k| k + 1);
        svg.insert_str(at, &comment);
        write_file(p, &svg).map_err(with_manifest)?;
    }
    if let Some(p) = &cli.io.json {
        write_file(p, &summary).map_err(with_manifest)?;
    }
    print!("{summary}");
    Ok(())
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    match run(&cli, started) {
        Ok(()) => ExitCode::SUCCESS,
        Err((f, manifest)) => {
            let diag = serde_json::json!({
                "error": { "kind": f.kind, "message": f.message },
                "manifest": manifest,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&diag).expect("diagnostic serializes")
            );
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
