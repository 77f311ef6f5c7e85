//! Single-point evaluation: model -> stability -> covariance -> negativity.

use crate::covariance::{solve_lyapunov_generic, CovarianceMatrix};
use crate::effective::EffectiveModel;
use crate::entanglement::{log_negativity, EntanglementResult};
use crate::error::Result;
use crate::params::ModelParams;
use crate::stability::{routh_hurwitz, StabilityReport};

/// Result of evaluating one parameter point through the reduced pipeline.
/// Unstable points carry no covariance or negativity.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEvaluation {
    pub model: EffectiveModel,
    pub stability: StabilityReport,
    pub covariance: Option<CovarianceMatrix>,
    pub entanglement: Option<EntanglementResult>,
}

impl PointEvaluation {
    pub fn e_n(&self) -> Option<f64> {
        self.entanglement.map(|e| e.e_n)
    }

    pub fn v_s(&self) -> Option<f64> {
        self.entanglement.map(|e| e.v_s)
    }
}

/// Evaluate one parameter point with the generic Lyapunov path.
pub fn evaluate_model(params: &ModelParams) -> Result<PointEvaluation> {
    let model = EffectiveModel::new(params)?;
    let stability = routh_hurwitz(&model);
    if !stability.stable {
        return Ok(PointEvaluation {
            model,
            stability,
            covariance: None,
            entanglement: None,
        });
    }
    let diffusion = model.diffusion()?;
    let covariance = solve_lyapunov_generic(&model.drift(), &diffusion)?;
    let entanglement = log_negativity(&covariance)?;
    Ok(PointEvaluation {
        model,
        stability,
        covariance: Some(covariance),
        entanglement: Some(entanglement),
    })
}
