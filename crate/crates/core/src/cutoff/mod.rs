//! Admissible cutoff functions: univariate types (a)/(b)/(c), small-derivative
//! variants, multivariate constructions of second kind, and the dual cutoff.

mod gauge;
mod multivariate;
mod presets;
mod smooth;
mod univariate;
mod verify;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use gauge::{DerivativeGauge, GaugeClaim, GaugeFamily};
pub use multivariate::{
    make_dual_cutoff, make_multivariate, product, product_difference, quasi_norm,
    quasi_norm_cutoff, radial_negative_control, sin_splice, sqrt_splice, Construction,
};
pub use presets::CutoffPreset;
pub use smooth::{make_small_derivative_univariate, SmallDerivativeProfile};
pub use univariate::{make_univariate, smooth_step};
pub use verify::{
    gauge_derivatives, verify_admissibility, verify_dyadic_covering, AdmissibilityReport,
    CoveringReport, DerivativeEstimate, PropertyCheck,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CutoffKind {
    Univariate,
    First,
    Second,
    /// No boundary condition is claimed (negative controls, user functions).
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CutoffType {
    A,
    B,
    C,
    None,
}

pub type UnivariateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type MultivariateFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A real univariate cutoff on `[0, inf)`, extended evenly to negative arguments.
#[derive(Clone)]
pub struct Univariate {
    f: UnivariateFn,
    type_tag: CutoffType,
    gauge: Option<GaugeClaim>,
    label: String,
}

impl Univariate {
    pub fn new(label: impl Into<String>, type_tag: CutoffType, f: UnivariateFn) -> Self {
        Self {
            f,
            type_tag,
            gauge: None,
            label: label.into(),
        }
    }

    pub fn with_gauge(mut self, claim: GaugeClaim) -> Self {
        self.gauge = Some(claim);
        self
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t.abs())
    }

    pub fn type_tag(&self) -> CutoffType {
        self.type_tag
    }

    pub fn gauge(&self) -> Option<&GaugeClaim> {
        self.gauge.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `t -> a(scale * t)`, keeping the label and dropping type and gauge claims.
    pub fn dilate(&self, scale: f64) -> Univariate {
        let f = self.f.clone();
        Univariate {
            f: Arc::new(move |t| f(scale * t)),
            type_tag: CutoffType::None,
            gauge: None,
            label: format!("{}({scale}t)", self.label),
        }
    }

    /// Lifts to a one-dimensional [`CutoffFunction`].
    pub fn to_cutoff(&self) -> CutoffFunction {
        let f = self.f.clone();
        CutoffFunction {
            dim: 1,
            eval: Arc::new(move |t: &[f64]| Complex64::new(f(t[0].abs()), 0.0)),
            kind: CutoffKind::Univariate,
            type_tag: self.type_tag,
            support_bound: 2.0,
            gauge: self.gauge.clone(),
            separable: Some(vec![SeparableTerm {
                coeff: 1.0,
                factors: vec![self.clone()],
            }]),
            flat_radius: flat_radius_for(self.type_tag),
            real: true,
            label: self.label.clone(),
        }
    }
}

impl fmt::Debug for Univariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Univariate")
            .field("label", &self.label)
            .field("type_tag", &self.type_tag)
            .field("gauge", &self.gauge)
            .finish()
    }
}

/// `coeff * prod_i factors[i](t_i)`.
#[derive(Clone, Debug)]
pub struct SeparableTerm {
    pub coeff: f64,
    pub factors: Vec<Univariate>,
}

/// An evaluable map `[0, inf)^d -> C` with the metadata the rest of the library relies on.
#[derive(Clone)]
pub struct CutoffFunction {
    dim: usize,
    eval: MultivariateFn,
    kind: CutoffKind,
    type_tag: CutoffType,
    support_bound: f64,
    gauge: Option<GaugeClaim>,
    separable: Option<Vec<SeparableTerm>>,
    flat_radius: Option<f64>,
    real: bool,
    label: String,
}

pub(crate) fn flat_radius_for(type_tag: CutoffType) -> Option<f64> {
    match type_tag {
        CutoffType::A => Some(1.0),
        CutoffType::B | CutoffType::C => Some(0.5),
        CutoffType::None => None,
    }
}

impl CutoffFunction {
    /// A user-supplied cutoff with no claimed kind or type.
    pub fn custom(label: impl Into<String>, dim: usize, eval: MultivariateFn) -> Self {
        Self {
            dim,
            eval,
            kind: CutoffKind::Unclassified,
            type_tag: CutoffType::None,
            support_bound: 2.0,
            gauge: None,
            separable: None,
            flat_radius: None,
            real: false,
            label: label.into(),
        }
    }

    pub(crate) fn from_parts(
        label: String,
        dim: usize,
        eval: MultivariateFn,
        kind: CutoffKind,
        type_tag: CutoffType,
    ) -> Self {
        Self {
            dim,
            eval,
            kind,
            type_tag,
            support_bound: 2.0,
            gauge: None,
            separable: None,
            flat_radius: flat_radius_for(type_tag),
            real: true,
            label,
        }
    }

    pub fn with_kind(mut self, kind: CutoffKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_type(mut self, type_tag: CutoffType) -> Self {
        self.type_tag = type_tag;
        self.flat_radius = flat_radius_for(type_tag);
        self
    }

    pub fn with_real(mut self, real: bool) -> Self {
        self.real = real;
        self
    }

    pub fn with_gauge(mut self, claim: Option<GaugeClaim>) -> Self {
        self.gauge = claim;
        self
    }

    pub(crate) fn with_separable(mut self, terms: Option<Vec<SeparableTerm>>) -> Self {
        self.separable = terms;
        self
    }

    #[inline]
    pub fn eval(&self, t: &[f64]) -> Complex64 {
        debug_assert_eq!(t.len(), self.dim);
        (self.eval)(t)
    }

    #[inline]
    pub fn eval_re(&self, t: &[f64]) -> f64 {
        self.eval(t).re
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> CutoffKind {
        self.kind
    }

    pub fn type_tag(&self) -> CutoffType {
        self.type_tag
    }

    pub fn support_bound(&self) -> f64 {
        self.support_bound
    }

    pub fn gauge(&self) -> Option<&GaugeClaim> {
        self.gauge.as_ref()
    }

    /// Terms of a separable representation, when the cutoff is a sum of products.
    pub fn separable_terms(&self) -> Option<&[SeparableTerm]> {
        self.separable.as_deref()
    }

    /// Radius in the l1 sense of the ball around 0 on which the cutoff is constant.
    pub fn flat_radius(&self) -> Option<f64> {
        self.flat_radius
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn eval_fn(&self) -> MultivariateFn {
        self.eval.clone()
    }
}

impl fmt::Debug for CutoffFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CutoffFunction")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .field("type_tag", &self.type_tag)
            .field("gauge", &self.gauge)
            .field("separable_terms", &self.separable.as_ref().map(Vec::len))
            .finish()
    }
}
