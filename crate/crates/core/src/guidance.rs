//! Guidance map: normalized saliency scaled per pixel by the importance prior
//! of the pixel's semantic category, `G = c(category) * S / max(S)`.
//! Edges are kept as a separate channel.

use std::fmt;
use std::str::FromStr;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{GrayMap, SemanticMap};
use crate::semantics::PriorWeights;
use crate::vision::{canny, EdgeParams};

#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceBundle {
    /// Normalized saliency the guidance was built from.
    pub saliency: GrayMap,
    pub guidance: GrayMap,
    /// Binary edge map.
    pub edges: GrayMap,
}

impl GuidanceBundle {
    pub fn new(guidance: GrayMap, edges: GrayMap) -> Result<Self> {
        if guidance.dims() != edges.dims() {
            return Err(Error::dims("edge map", guidance.dims(), edges.dims()));
        }
        Ok(Self {
            saliency: guidance.clone(),
            guidance,
            edges,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.guidance.dims()
    }
}

/// `G(x, y) = c(semantic(x, y)) * S(x, y) / max(S)`.
///
/// An all-zero saliency map yields an all-zero guidance map.
pub fn build_guidance(saliency: &GrayMap, semantic: &SemanticMap, priors: &PriorWeights) -> Result<GrayMap> {
    if saliency.dims() != semantic.dims() {
        return Err(Error::dims("semantic map", saliency.dims(), semantic.dims()));
    }
    let max = saliency.max();
    if max == 0.0 {
        log::warn!("saliency map is identically zero; guidance map is zero");
        return Ok(GrayMap::zeros(saliency.width(), saliency.height()));
    }
    let c = priors.lookup();
    let data = saliency
        .data()
        .iter()
        .zip(semantic.ids())
        .map(|(&s, &id)| c[id as usize] * (s / max))
        .collect();
    GrayMap::new(saliency.width(), saliency.height(), data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SaliencyKind {
    /// Built-in frequency-tuned saliency.
    Ft,
    /// Precomputed map referenced by the scene.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemanticKind {
    Off,
    /// Ground-truth segmentation.
    Gt,
    /// Predicted segmentation.
    Pred,
}

/// Which inputs feed the guidance map.
///
/// Written as `+`-joined tokens: a saliency source (`ft` or `file`),
/// optionally a semantic source (`gt` or `pred`), optionally `noprior`.
/// `ft` alone is the saliency-only mode; `file+gt` is the full pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AblationMode {
    pub saliency: SaliencyKind,
    pub semantic: SemanticKind,
    pub prior: bool,
}

impl AblationMode {
    pub const fn saliency_only(saliency: SaliencyKind) -> Self {
        Self {
            saliency,
            semantic: SemanticKind::Off,
            prior: false,
        }
    }

    pub const fn full(saliency: SaliencyKind) -> Self {
        Self {
            saliency,
            semantic: SemanticKind::Gt,
            prior: true,
        }
    }

    /// True when the prior actually scales the saliency.
    pub fn uses_prior(&self) -> bool {
        self.prior && self.semantic != SemanticKind::Off
    }
}

impl fmt::Display for AblationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.saliency {
            SaliencyKind::Ft => "ft",
            SaliencyKind::File => "file",
        })?;
        match self.semantic {
            SemanticKind::Off => return Ok(()),
            SemanticKind::Gt => f.write_str("+gt")?,
            SemanticKind::Pred => f.write_str("+pred")?,
        }
        if !self.prior {
            f.write_str("+noprior")?;
        }
        Ok(())
    }
}

impl FromStr for AblationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split('+').map(str::trim);
        let saliency = match tokens.next() {
            Some("ft") => SaliencyKind::Ft,
            Some("file") => SaliencyKind::File,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "mode `{s}`: expected saliency source `ft` or `file`, found {other:?}"
                )))
            }
        };
        let mut mode = AblationMode::saliency_only(saliency);
        mode.prior = true;
        for t in tokens {
            match t {
                "gt" => mode.semantic = SemanticKind::Gt,
                "pred" => mode.semantic = SemanticKind::Pred,
                "noprior" => mode.prior = false,
                other => return Err(Error::InvalidConfig(format!("mode `{s}`: unknown token `{other}`"))),
            }
        }
        if mode.semantic == SemanticKind::Off {
            mode.prior = false;
        }
        Ok(mode)
    }
}

impl TryFrom<String> for AblationMode {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<AblationMode> for String {
    fn from(m: AblationMode) -> String {
        m.to_string()
    }
}

/// Assembles guidance and edges for one image.
///
/// `saliency` is normalized here; with `semantic` absent or `priors` uniform
/// the guidance equals the normalized saliency bit for bit.
pub fn build_bundle(
    image: &RgbImage,
    saliency: &GrayMap,
    semantic: Option<&SemanticMap>,
    priors: &PriorWeights,
    edge_params: &EdgeParams,
) -> Result<GuidanceBundle> {
    let dims = (image.width() as usize, image.height() as usize);
    if saliency.dims() != dims {
        return Err(Error::dims("saliency map", dims, saliency.dims()));
    }
    let saliency = saliency.normalized();
    let guidance = match semantic {
        Some(sem) => build_guidance(&saliency, sem, priors)?,
        None => saliency.clone(),
    };
    let edges = canny(image, edge_params)?;
    Ok(GuidanceBundle { saliency, guidance, edges })
}
