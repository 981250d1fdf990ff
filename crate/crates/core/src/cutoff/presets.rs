use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    make_dual_cutoff, make_multivariate, make_small_derivative_univariate, make_univariate,
    radial_negative_control, Construction, CutoffFunction, CutoffType, DerivativeGauge,
};
use crate::error::{Error, Result};

/// Named cutoff constructions used by the command line and the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffPreset {
    ProductA,
    ProductB,
    QuasinormB,
    SinSpliceC,
    SqrtSpliceC,
    RadialNegativeControl,
    /// Sin splice of a product of small-derivative type-(a) factors, `L(t) = 1 + t`.
    SmallDerivative,
    /// Dual of `ProductB`.
    DualProductB,
}

impl CutoffPreset {
    pub const ALL: [CutoffPreset; 8] = [
        CutoffPreset::ProductA,
        CutoffPreset::ProductB,
        CutoffPreset::QuasinormB,
        CutoffPreset::SinSpliceC,
        CutoffPreset::SqrtSpliceC,
        CutoffPreset::RadialNegativeControl,
        CutoffPreset::SmallDerivative,
        CutoffPreset::DualProductB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CutoffPreset::ProductA => "product-a",
            CutoffPreset::ProductB => "product-b",
            CutoffPreset::QuasinormB => "quasinorm-b",
            CutoffPreset::SinSpliceC => "sin-splice-c",
            CutoffPreset::SqrtSpliceC => "sqrt-splice-c",
            CutoffPreset::RadialNegativeControl => "radial-negative-control",
            CutoffPreset::SmallDerivative => "small-derivative",
            CutoffPreset::DualProductB => "dual-product-b",
        }
    }

    pub fn build(&self, d: usize) -> Result<CutoffFunction> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let a = make_univariate(CutoffType::A).expect("type A");
        match self {
            CutoffPreset::ProductA => make_multivariate(Construction::Product, d, CutoffType::A, &[a]),
            CutoffPreset::ProductB => {
                make_multivariate(Construction::Difference, d, CutoffType::B, &[a])
            }
            CutoffPreset::QuasinormB => make_multivariate(
                Construction::QuasiNorm,
                d,
                CutoffType::B,
                &[make_univariate(CutoffType::B).expect("type B"), a],
            ),
            CutoffPreset::SinSpliceC => {
                make_multivariate(Construction::SinSplice, d, CutoffType::C, &[a])
            }
            CutoffPreset::SqrtSpliceC => {
                make_multivariate(Construction::SqrtSplice, d, CutoffType::C, &[a])
            }
            CutoffPreset::RadialNegativeControl => {
                radial_negative_control(&make_univariate(CutoffType::B).expect("type B"), d)
            }
            CutoffPreset::SmallDerivative => {
                let g = DerivativeGauge::power(1.0)?;
                let sa = make_small_derivative_univariate(&g, CutoffType::A, 32)?;
                make_multivariate(Construction::SinSplice, d, CutoffType::C, &[sa])
            }
            CutoffPreset::DualProductB => make_dual_cutoff(&CutoffPreset::ProductB.build(d)?),
        }
    }
}

impl fmt::Display for CutoffPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutoffPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CutoffPreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown cutoff '{s}' (expected one of {})",
                    CutoffPreset::ALL.map(|p| p.name()).join(", ")
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in CutoffPreset::ALL {
            assert_eq!(p.name().parse::<CutoffPreset>().unwrap(), p);
        }
        assert!("nope".parse::<CutoffPreset>().is_err());
    }

    #[test]
    fn every_preset_builds_in_two_dimensions() {
        for p in CutoffPreset::ALL {
            let c = p.build(2).unwrap();
            assert_eq!(c.dim(), 2);
        }
    }
}
