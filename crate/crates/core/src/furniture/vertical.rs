use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerticalMode {
    /// Scale the ceiling and floor bands so the image edges stay fixed.
    #[default]
    Bijective,
    /// Use the configured `alpha` / `beta`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutOfRange {
    #[default]
    Clamp,
}

/// How rows outside the wall band are mapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerticalPolicy {
    pub mode: VerticalMode,
    /// Ceiling-band slope, fixed mode only.
    pub alpha: f64,
    /// Floor-band slope, fixed mode only.
    pub beta: f64,
    pub out_of_range: OutOfRange,
}

impl Default for VerticalPolicy {
    fn default() -> Self {
        Self {
            mode: VerticalMode::Bijective,
            alpha: 1.0,
            beta: 1.0,
            out_of_range: OutOfRange::Clamp,
        }
    }
}

impl VerticalPolicy {
    pub fn fixed(alpha: f64, beta: f64) -> Self {
        Self {
            mode: VerticalMode::Fixed,
            alpha,
            beta,
            out_of_range: OutOfRange::Clamp,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == VerticalMode::Fixed
            && !(self.alpha > 0.0 && self.beta > 0.0 && self.alpha.is_finite() && self.beta.is_finite())
        {
            return Err(Error::Config(format!(
                "fixed vertical policy needs positive alpha and beta, got {} and {}",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }

    /// `(alpha, beta)` for one column's boundaries.
    fn slopes(&self, a_src: f64, b_src: f64, a_dst: f64, b_dst: f64, height: usize) -> (f64, f64) {
        match self.mode {
            VerticalMode::Fixed => (self.alpha, self.beta),
            VerticalMode::Bijective => {
                let last = (height - 1) as f64;
                let alpha = if a_dst > 0.0 && a_src > 0.0 { a_src / a_dst } else { 1.0 };
                let beta = if b_dst < last && b_src < last {
                    (last - b_src) / (last - b_dst)
                } else {
                    1.0
                };
                (alpha, beta)
            }
        }
    }
}

/// Source row for destination row `r` of one column.
///
/// Rows above the destination ceiling boundary `a_dst` step back from the
/// source ceiling boundary with slope `alpha`, rows below the floor boundary
/// `b_dst` step forward from `b_src` with slope `beta`, and the wall band in
/// between is mapped linearly onto `[a_src, b_src]`. The result is clamped
/// to `[0, H − 1]`.
pub fn vertical_source_row(
    r: f64,
    a_src: f64,
    b_src: f64,
    a_dst: f64,
    b_dst: f64,
    policy: &VerticalPolicy,
    height: usize,
) -> Result<f64> {
    if !(a_dst < b_dst) {
        return Err(Error::DegenerateBoundary { ceil: a_dst, floor: b_dst });
    }
    if !(a_src < b_src) {
        return Err(Error::DegenerateBoundary { ceil: a_src, floor: b_src });
    }
    let (alpha, beta) = policy.slopes(a_src, b_src, a_dst, b_dst, height);
    let src = if r < a_dst {
        a_src - alpha * (a_dst - r)
    } else if r >= b_dst {
        b_src + beta * (r - b_dst)
    } else {
        (a_src + (b_src - a_src) * ((r - a_dst) / (b_dst - a_dst))).min(b_src)
    };
    Ok(src.clamp(0.0, (height - 1) as f64))
}
