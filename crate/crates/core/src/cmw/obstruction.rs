use serde::Serialize;

use super::cone::{cone_definiteness, ConeConfig, Definiteness, DefinitenessVerdict};
use super::prepare::prepare_at_point;
use super::tensor::cmw_tensor;
use super::CmwError;
use crate::hermpoly::ComplexRational;
use crate::levi::Hypersurface;

#[derive(Clone, Debug, Default)]
pub struct ObstructionConfig {
    pub cone: ConeConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ObstructionOutcome {
    Fires,
    DoesNotFire,
    Vacuous,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub surface: String,
    pub point: Vec<String>,
    /// CR dimension.
    pub n: usize,
    pub ell: usize,
    pub orientation_flipped: bool,
    pub quartic22: String,
    pub tensor_is_zero: bool,
    pub verdict: DefinitenessVerdict,
    pub outcome: ObstructionOutcome,
    pub criterion: String,
    pub explanation: String,
}

impl ObstructionReport {
    pub fn fires(&self) -> bool {
        self.outcome == ObstructionOutcome::Fires
    }
}

const CRITERION_UNBALANCED: &str = "null-cone sign test for maps into hyperquadrics, ell < n/2: \
the tensor must be pseudo negative semi-definite";
const CRITERION_BALANCED: &str = "null-cone sign test for maps into hyperquadrics, ell = n/2: \
the tensor must be pseudo semi-definite of one sign";

/// Runs preparation, tensor extraction and the cone test at `p`, and reports whether the sign condition
/// needed for a local holomorphic map into a hyperquadric of signature `ℓ` (image off the quadric) fails.
pub fn hyperquadric_obstruction(
    m: &Hypersurface,
    p: &[ComplexRational],
    cfg: &ObstructionConfig,
) -> Result<ObstructionReport, CmwError> {
    let prepared = prepare_at_point(m, p)?;
    let tensor = cmw_tensor(&prepared)?;
    let verdict = cone_definiteness(&tensor, &cfg.cone);
    let (n, ell) = (prepared.n, prepared.ell);
    let (outcome, criterion, explanation) = if ell == 0 {
        (
            ObstructionOutcome::Vacuous,
            "none: strongly pseudoconvex point".to_string(),
            "the Levi null cone is {0}, so the cone test says nothing".to_string(),
        )
    } else if 2 * ell < n {
        let fires = verdict.positive_witness.is_some();
        let explanation = if fires {
            "positive value on the null cone: no local holomorphic map into a hyperquadric of signature ell \
             (any dimension) with image off the quadric exists near p"
        } else {
            "no positive cone value found; the necessary condition holds on the samples"
        };
        (
            if fires { ObstructionOutcome::Fires } else { ObstructionOutcome::DoesNotFire },
            CRITERION_UNBALANCED.to_string(),
            explanation.to_string(),
        )
    } else {
        let fires = verdict.classification == Definiteness::Indefinite;
        let explanation = if fires {
            "values of both signs on the null cone: neither orientation gives a semi-definite tensor, so no \
             local holomorphic map into a hyperquadric of signature ell with image off the quadric exists near p"
        } else {
            "the tensor is semi-definite on the samples for one orientation; no obstruction"
        };
        (
            if fires { ObstructionOutcome::Fires } else { ObstructionOutcome::DoesNotFire },
            CRITERION_BALANCED.to_string(),
            explanation.to_string(),
        )
    };
    Ok(ObstructionReport {
        surface: m.name().to_string(),
        point: p.iter().map(|c| c.to_string()).collect(),
        n,
        ell,
        orientation_flipped: prepared.orientation < 0,
        quartic22: prepared.quartic22.to_string(),
        tensor_is_zero: tensor.is_zero(),
        verdict,
        outcome,
        criterion,
        explanation,
    })
}
