//! Fidelity-versus-noise curves for a coherent state and the ECS `|Ψ(α, −α)⟩`.

use std::fmt::Write as _;

use cvtelefid_core::analytics::{coherent_entanglement_fidelity, ecs_entanglement_fidelity, EcsSpec};
use cvtelefid_core::channels::GaussianNoiseChannel;
use cvtelefid_core::entfid::{entanglement_fidelity_brute, entanglement_fidelity_overlap, Purification};
use cvtelefid_core::fock::{ComplexAmplitude, FockSpace};
use cvtelefid_core::quadrature::QuadratureGrid;
use cvtelefid_core::Error;
use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

pub const CSV_HEADER: &str = "sigma,fe_coherent,fe_ecs_closed,fe_ecs_exact,fe_ecs_brute,est_error";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub sigma: f64,
    pub fe_coherent: f64,
    pub fe_ecs_closed: f64,
    pub fe_ecs_exact: f64,
    pub fe_ecs_brute: Option<f64>,
    pub est_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum BruteMode {
    /// Run the Fock brute force when the state fits the cutoff.
    #[default]
    Auto,
    /// Always run it; a state that does not fit is an error.
    Always,
    Never,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub alpha: f64,
    pub beta: f64,
    pub cutoff: usize,
    pub gh_order: usize,
    /// Why the brute-force column is empty, when it is.
    pub brute_note: Option<String>,
    pub points: Vec<CurvePoint>,
}

/// `steps` evenly spaced variances from 0 to `sigma_max` inclusive.
pub fn sigma_grid(sigma_max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!("steps must be >= 2, got {steps}")));
    }
    if !(sigma_max > 0.0 && sigma_max.is_finite()) {
        return Err(CliError::Usage(format!("sigma-max must be > 0, got {sigma_max}")));
    }
    Ok((0..steps).map(|i| sigma_max * i as f64 / (steps - 1) as f64).collect())
}

pub fn compute_curve(
    alpha: f64,
    sigma_max: f64,
    steps: usize,
    brute: BruteMode,
    cfg: &RunConfig,
) -> Result<Curve, CliError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(CliError::Usage(format!("alpha must be > 0, got {alpha}")));
    }
    let sigmas = sigma_grid(sigma_max, steps)?;
    let (a, b) = (ComplexAmplitude::real(alpha), ComplexAmplitude::real(-alpha));
    let spec = EcsSpec::new(a, b)?;
    let grid = QuadratureGrid::gauss_hermite(cfg.gh_order)?;
    let tol = cfg.core_tolerances();

    let (gamma, brute_note) = match brute {
        BruteMode::Never => (None, Some("brute force disabled".to_string())),
        _ => match Purification::ecs(a, b, FockSpace::single(cfg.cutoff), &tol) {
            Ok(g) => (Some(g), None),
            Err(e @ Error::CutoffTooSmall { .. }) if brute == BruteMode::Auto => (None, Some(e.to_string())),
            Err(e) => return Err(e.into()),
        },
    };

    let mut points = Vec::with_capacity(sigmas.len());
    for sigma in sigmas {
        let exact = entanglement_fidelity_overlap(a, b, sigma, &grid)?;
        let brute = match &gamma {
            Some(g) => {
                let ch = GaussianNoiseChannel::new(sigma, grid.clone())?.with_trace_tolerance(tol.channel_trace);
                Some(entanglement_fidelity_brute(g, &ch)?)
            }
            None => None,
        };
        points.push(CurvePoint {
            sigma,
            fe_coherent: coherent_entanglement_fidelity(sigma)?,
            fe_ecs_closed: ecs_entanglement_fidelity(&spec, sigma)?,
            fe_ecs_exact: exact.value,
            fe_ecs_brute: brute.map(|r| r.value),
            est_error: brute.map_or(exact.est_error, |r| r.est_error.max(exact.est_error)),
        });
    }
    Ok(Curve {
        alpha,
        beta: -alpha,
        cutoff: cfg.cutoff,
        gh_order: cfg.gh_order,
        brute_note,
        points,
    })
}

/// `x` with `digits` significant digits, trailing zeros trimmed, switching
/// to exponent form outside `[1e-5, 1e12)` like C's `%g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    }
}

fn sig12(x: f64) -> String {
    format_sig(x, 12)
}

pub fn render_csv(curve: &Curve) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &curve.points {
        let brute = p.fe_ecs_brute.map(sig12).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sig12(p.sigma),
            sig12(p.fe_coherent),
            sig12(p.fe_ecs_closed),
            sig12(p.fe_ecs_exact),
            brute,
            sig12(p.est_error)
        );
    }
    out
}

pub fn render_json(curve: &Curve) -> String {
    let mut s = serde_json::to_string_pretty(curve).expect("curve serializes");
    s.push('\n');
    s
}

/// A self-contained SVG line chart of the curve.
pub fn render_svg(curve: &Curve) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const L: f64 = 60.0;
    const R: f64 = 20.0;
    const T: f64 = 40.0;
    const B: f64 = 50.0;
    let sigma_max = curve.points.last().map_or(1.0, |p| p.sigma).max(1e-12);
    let x = |s: f64| L + (W - L - R) * s / sigma_max;
    let y = |f: f64| T + (H - T - B) * (1.0 - f);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">Entanglement fidelity, alpha = {}, beta = {}</text>"#,
        W / 2.0,
        format_sig(curve.alpha, 6),
        format_sig(curve.beta, 6)
    );
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{L}" y1="{yy:.2}" x2="{x2}" y2="{yy:.2}" stroke="#ddd"/><text x="{tx}" y="{ty:.2}" text-anchor="end">{f:.1}</text>"##,
            yy = y(f),
            x2 = W - R,
            tx = L - 6.0,
            ty = y(f) + 4.0
        );
        let s = sigma_max * f;
        let _ = writeln!(
            svg,
            r#"<text x="{xx:.2}" y="{ty}" text-anchor="middle">{}</text>"#,
            format_sig(s, 3),
            xx = x(s),
            ty = H - B + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{L}" y1="{yb}" x2="{xr}" y2="{yb}" stroke="black"/><line x1="{L}" y1="{T}" x2="{L}" y2="{yb}" stroke="black"/>"#,
        yb = H - B,
        xr = W - R
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">noise variance sigma (vacuum = 1/2)</text>"#,
        (L + W - R) / 2.0,
        H - 12.0
    );

    let series: [(&str, &str, Box<dyn Fn(&CurvePoint) -> Option<f64>>); 3] = [
        ("coherent", "#1f77b4", Box::new(|p| Some(p.fe_coherent))),
        ("ECS closed form", "#d62728", Box::new(|p| Some(p.fe_ecs_closed))),
        ("ECS exact", "#2ca02c", Box::new(|p| Some(p.fe_ecs_exact))),
    ];
    for (i, (label, color, get)) in series.iter().enumerate() {
        let pts: Vec<String> = curve
            .points
            .iter()
            .filter_map(|p| get(p).map(|f| format!("{:.2},{:.2}", x(p.sigma), y(f))))
            .collect();
        let dash = if i == 2 { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        let ly = T + 16.0 * i as f64 + 10.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{a}" y1="{ly}" x2="{b}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{c}" y="{ty}">{label}</text>"#,
            a = W - R - 170.0,
            b = W - R - 145.0,
            c = W - R - 140.0,
            ty = ly + 4.0
        );
    }
    if curve.points.iter().any(|p| p.fe_ecs_brute.is_some()) {
        for p in &curve.points {
            if let Some(f) = p.fe_ecs_brute {
                let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, x(p.sigma), y(f));
            }
        }
        let ly = T + 58.0;
        let _ = writeln!(
            svg,
            r#"<circle cx="{a}" cy="{ly}" r="3" fill="black"/><text x="{c}" y="{ty}">ECS Fock brute force</text>"#,
            a = W - R - 157.5,
            c = W - R - 140.0,
            ty = ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
