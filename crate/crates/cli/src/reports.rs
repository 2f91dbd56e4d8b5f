//! `noise-budget` and `required-squeezing` reports.

use std::fmt::Write as _;

use cvtelefid_core::analytics::{
    coherent_entanglement_fidelity, is_quantum_duty, required_sigma_for_ecs_fidelity, squeezing_db, EcsSpec,
    NoiseBudget, Threshold,
};
use serde::Serialize;

use crate::curve::format_sig;
use crate::CliError;

pub const DB_CONVENTION: &str =
    "dB = -10 log10(sigma_eta) with sigma_eta = exp(-2 r); sigma is a variance with vacuum noise 1/2";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdCheck {
    pub label: &'static str,
    pub fidelity: f64,
    pub max_sigma: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseBudgetReport {
    pub eta: f64,
    pub nu: f64,
    pub components: NoiseBudget,
    pub total: f64,
    pub coherent_fidelity: f64,
    pub thresholds: Vec<ThresholdCheck>,
    pub squeezing_db: f64,
    pub quantum_duty: bool,
    pub note: Option<String>,
}

pub fn noise_budget(sigma_g: f64, eta: f64, nu: f64, sigma_other: f64) -> Result<NoiseBudgetReport, CliError> {
    let components = NoiseBudget::from_physical(sigma_g, eta, nu, sigma_other)?;
    let total = components.total();
    let quantum_duty = is_quantum_duty(total);
    Ok(NoiseBudgetReport {
        eta,
        nu,
        components,
        total,
        coherent_fidelity: coherent_entanglement_fidelity(total)?,
        thresholds: Threshold::ALL
            .iter()
            .map(|&t| ThresholdCheck {
                label: t.label(),
                fidelity: t.fidelity(),
                max_sigma: t.max_sigma(),
                passes: t.passes(total),
            })
            .collect(),
        squeezing_db: squeezing_db(components.sigma_eta)?,
        quantum_duty,
        note: quantum_duty.then(|| {
            "total variance >= 1: no better than the unit noise of an unentangled resource (quantum duty)".to_string()
        }),
    })
}

impl NoiseBudgetReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("field,value\n");
        let c = &self.components;
        let rows = [
            ("eta", format_sig(self.eta, 12)),
            ("nu", format_sig(self.nu, 12)),
            ("sigma_g", format_sig(c.sigma_g, 12)),
            ("sigma_eta", format_sig(c.sigma_eta, 12)),
            ("sigma_nu", format_sig(c.sigma_nu, 12)),
            ("sigma_other", format_sig(c.sigma_other, 12)),
            ("total", format_sig(self.total, 12)),
            ("coherent_fidelity", format_sig(self.coherent_fidelity, 12)),
            ("squeezing_db", format_sig(self.squeezing_db, 12)),
            ("quantum_duty", self.quantum_duty.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(out, "{k},{v}");
        }
        for t in &self.thresholds {
            let _ = writeln!(out, "threshold {},{}", t.label, if t.passes { "pass" } else { "fail" });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqueezingReport {
    pub alpha: f64,
    pub beta: f64,
    pub target: f64,
    pub sigma: f64,
    /// Squeezing needed if the whole budget goes to finite squeezing; zero
    /// when `sigma >= 1`.
    pub db: f64,
    pub mean_photon_number: f64,
    pub convention: &'static str,
}

pub fn required_squeezing(alpha: f64, target: f64) -> Result<SqueezingReport, CliError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(CliError::Usage(format!("alpha must be > 0, got {alpha}")));
    }
    let spec = EcsSpec::symmetric(alpha)?;
    let sigma = required_sigma_for_ecs_fidelity(&spec, target)?;
    Ok(SqueezingReport {
        alpha,
        beta: -alpha,
        target,
        sigma,
        db: if sigma >= 1.0 { 0.0 } else { squeezing_db(sigma)? },
        mean_photon_number: spec.mean_photon_number_approx(),
        convention: DB_CONVENTION,
    })
}

impl SqueezingReport {
    pub fn to_csv(&self) -> String {
        format!(
            "alpha,beta,target,sigma,db,mean_photon_number\n{},{},{},{},{},{}\n",
            format_sig(self.alpha, 12),
            format_sig(self.beta, 12),
            format_sig(self.target, 12),
            format_sig(self.sigma, 12),
            format_sig(self.db, 12),
            format_sig(self.mean_photon_number, 12)
        )
    }
}
