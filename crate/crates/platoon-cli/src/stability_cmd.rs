//! The `stability` subcommand: criterion verdicts, closed-form eigenvalues,
//! numeric spectral abscissae, and neutral-line CSV generation.

use std::fmt::Write as _;

use platoon_core::models::ModelKind;
use platoon_core::ovf::Ovf;
use platoon_core::stability::{
    build_linearized, neutral_line, ovm_criterion, povm_eigenvalues, spectral_abscissa,
    tovm_criterion, NeutralLine, Verdict,
};
use platoon_core::Complex64;

use crate::config::parse_number;
use crate::csvio::{neutral_csv, sig9};
use crate::error::CliError;

/// Everything the subcommand's flags can ask for.
#[derive(Debug, Clone, Default)]
pub struct StabilityRequest {
    pub model: Option<String>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub n: Option<usize>,
    pub vp: Option<f64>,
    /// OVF family for deriving `vp` from a headway (`cosine`/`triangular`,
    /// stock parameters).
    pub ovf: Option<String>,
    pub headway: Option<f64>,
    pub neutral: bool,
    pub fractions: Vec<f64>,
    pub vp_min: f64,
    pub vp_max: f64,
    pub vp_samples: usize,
}

pub struct StabilityOutput {
    pub report: String,
    pub neutral: Option<String>,
}

pub fn execute(req: &StabilityRequest) -> Result<StabilityOutput, CliError> {
    if req.model.is_none() && !req.neutral {
        return Err(CliError::config(
            "nothing to do: pass --model with its parameters, --neutral, or both",
        ));
    }

    let mut report = String::from("# stability report\n");
    if let Some(model) = &req.model {
        let kind = match model.as_str() {
            "ovm" => ModelKind::Ovm,
            "povm" => ModelKind::POvm,
            "tovm" => ModelKind::TOvm,
            "fovm" => ModelKind::FOvm,
            other => {
                return Err(CliError::config(format!(
                    "unknown model '{other}' (expected ovm, povm, tovm, or fovm)"
                )))
            }
        };
        let a = req.a.ok_or_else(|| CliError::config("--model needs --a"))?;
        let b = req.b.unwrap_or(0.0);
        let vp = resolve_vp(req)?;

        let _ = writeln!(report, "model = {}", kind.as_str());
        let _ = writeln!(report, "a = {a}");
        if matches!(kind, ModelKind::TOvm | ModelKind::FOvm) {
            let _ = writeln!(report, "b = {b}");
        }
        let _ = writeln!(report, "vp = {}", sig9(vp));

        let verdict: Option<Verdict> = match kind {
            ModelKind::Ovm => {
                let _ = writeln!(report, "criterion = a > 2 vp");
                let _ = writeln!(report, "threshold_2vp = {}", sig9(2.0 * vp));
                Some(ovm_criterion(a, vp))
            }
            ModelKind::TOvm => {
                let _ = writeln!(report, "criterion = (a+b)^2/a > 2 vp (large-platoon limit)");
                let _ = writeln!(report, "threshold_2vp = {}", sig9(2.0 * vp));
                let _ = writeln!(report, "effective_sensitivity = {}", sig9((a + b) * (a + b) / a));
                Some(tovm_criterion(a, b, vp))
            }
            ModelKind::POvm => {
                let _ = writeln!(report, "criterion = unconditionally stable");
                if let Some(n) = req.n {
                    if n < 2 {
                        return Err(CliError::config("--n must be at least 2"));
                    }
                    let [l1, l2] = povm_eigenvalues(a, vp, n);
                    let _ = writeln!(report, "eigenvalue_1 = {}", fmt_complex(l1));
                    let _ = writeln!(report, "eigenvalue_2 = {}", fmt_complex(l2));
                }
                Some(Verdict::Stable)
            }
            ModelKind::FOvm => {
                let _ = writeln!(report, "criterion = none (numeric verdict only)");
                None
            }
        };

        if let Some(n) = req.n {
            if n < 2 {
                return Err(CliError::config("--n must be at least 2"));
            }
            let b_eff = match kind {
                ModelKind::Ovm | ModelKind::POvm => 0.0,
                _ => b,
            };
            let spec = platoon_core::models::ModelSpec::new(
                kind,
                a,
                b_eff,
                platoon_core::models::LeaderRule::OvmFollowsFirst,
            )
            .map_err(|e| CliError::config(e.to_string()))?;
            let sys = build_linearized(&spec, vp, n);
            let alpha = spectral_abscissa(&sys)?;
            let _ = writeln!(report, "n = {n}");
            let _ = writeln!(report, "spectral_abscissa = {}", sig9(alpha));
            let numeric = if alpha < 0.0 { Verdict::Stable } else { Verdict::Unstable };
            let _ = writeln!(report, "numeric_verdict = {numeric}");
        }
        if let Some(v) = verdict {
            let _ = writeln!(report, "criterion_verdict = {v}");
        }
    }

    let neutral = if req.neutral {
        let fractions = if req.fractions.is_empty() {
            vec![0.0, 0.2, 0.4, 0.6, 0.8]
        } else {
            req.fractions.clone()
        };
        if req.vp_samples < 2 {
            return Err(CliError::config("--vp-samples must be at least 2"));
        }
        if !req.vp_min.is_finite() || !req.vp_max.is_finite() || req.vp_max <= req.vp_min {
            return Err(CliError::config("--vp-max must exceed --vp-min"));
        }
        let vps: Vec<f64> = (0..req.vp_samples)
            .map(|i| {
                req.vp_min
                    + (req.vp_max - req.vp_min) * i as f64 / (req.vp_samples - 1) as f64
            })
            .collect();
        let lines: Vec<NeutralLine> = fractions
            .iter()
            .map(|f| neutral_line(*f, &vps).map_err(|e| CliError::config(e.to_string())))
            .collect::<Result<_, _>>()?;
        let _ = writeln!(report, "neutral_fractions = {fractions:?}");
        Some(neutral_csv(&lines))
    } else {
        None
    };

    Ok(StabilityOutput { report, neutral })
}

fn resolve_vp(req: &StabilityRequest) -> Result<f64, CliError> {
    match (req.vp, &req.ovf, req.headway) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(CliError::config(
            "pass either --vp or --ovf with --h, not both",
        )),
        (Some(vp), None, None) => Ok(vp),
        (None, Some(kind), Some(h)) => {
            let ovf = stock_ovf(kind)?;
            Ok(ovf.eval_derivative(h))
        }
        (None, Some(_), None) => Err(CliError::config("--ovf needs --h")),
        (None, None, Some(_)) => Err(CliError::config("--h needs --ovf")),
        (None, None, None) => Err(CliError::config("pass --vp, or --ovf with --h")),
    }
}

/// Stock OVF parameterizations (the ring cosine and the open-road
/// triangular); custom parameters go through a config file and `simulate`.
fn stock_ovf(kind: &str) -> Result<Ovf, CliError> {
    match kind {
        "cosine" => Ovf::cosine(7.0, 37.0, 20.0, 5.0),
        "triangular" => Ovf::triangular(30.0, 5.0, 5.0 / 37.0, 5.0 / 7.0),
        other => {
            return Err(CliError::config(format!(
                "unknown ovf '{other}' (expected cosine or triangular)"
            )))
        }
    }
    .map_err(|e| CliError::config(e.to_string()))
}

fn fmt_complex(z: Complex64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", sig9(z.re), sig9(z.im))
    } else {
        format!("{}-{}i", sig9(z.re), sig9(-z.im))
    }
}

/// Parse a comma-separated fraction list from the CLI.
pub fn parse_fractions(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_number(s, "fractions"))
        .collect()
}
