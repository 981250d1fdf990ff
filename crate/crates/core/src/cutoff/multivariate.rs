use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gauge::GaugeClaim;
use super::verify::verify_dyadic_covering;
use super::{CutoffFunction, CutoffKind, CutoffType, SeparableTerm, Univariate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Construction {
    Product,
    QuasiNorm,
    SinSplice,
    SqrtSplice,
    Difference,
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn require_type(u: &Univariate, want: CutoffType, role: &str) -> Result<()> {
    if u.type_tag() != want {
        return Err(Error::TypeMismatch(format!(
            "{role} must be of type {want:?}, got {:?} ({})",
            u.type_tag(),
            u.label()
        )));
    }
    Ok(())
}

/// Runs `f` on `scale * t` without a heap allocation for `d <= 8`.
#[inline]
fn with_scaled<R>(t: &[f64], scale: f64, f: impl FnOnce(&[f64]) -> R) -> R {
    if t.len() <= 8 {
        let mut buf = [0.0; 8];
        for (b, x) in buf.iter_mut().zip(t) {
            *b = scale * x;
        }
        f(&buf[..t.len()])
    } else {
        let v: Vec<f64> = t.iter().map(|x| scale * x).collect();
        f(&v)
    }
}

fn shared_claim<'a>(claims: impl Iterator<Item = Option<&'a GaugeClaim>>) -> Option<GaugeClaim> {
    let mut out: Option<GaugeClaim> = None;
    for c in claims {
        let c = c?;
        out = Some(match out {
            None => c.clone(),
            Some(prev) => GaugeClaim {
                gauge: prev.gauge,
                gamma: prev.gamma.max(c.gamma),
                scale: prev.scale.max(c.scale),
            },
        });
    }
    out
}

/// `A(t) = prod_j a_j(t_j)` for type-(a) factors: second kind, type (a).
pub fn product(factors: Vec<Univariate>) -> Result<CutoffFunction> {
    if factors.is_empty() {
        return Err(Error::InvalidParameter("product needs at least one factor".into()));
    }
    for f in &factors {
        require_type(f, CutoffType::A, "product factor")?;
    }
    let d = factors.len();
    let claim = shared_claim(factors.iter().map(|f| f.gauge()));
    let label = format!(
        "product[{}]",
        factors.iter().map(|f| f.label()).collect::<Vec<_>>().join(",")
    );
    let fs = factors.clone();
    let eval = Arc::new(move |t: &[f64]| real(fs.iter().zip(t).map(|(f, &x)| f.eval(x)).product()));
    let kind = if d == 1 {
        CutoffKind::Univariate
    } else {
        CutoffKind::Second
    };
    Ok(
        CutoffFunction::from_parts(label, d, eval, kind, CutoffType::A)
            .with_gauge(claim)
            .with_separable(Some(vec![SeparableTerm {
                coeff: 1.0,
                factors,
            }])),
    )
}

/// `A(t) = A_1(t) - A_2(2t)` for type-(a) cutoffs of the same dimension: type (b).
pub fn product_difference(a1: &CutoffFunction, a2: &CutoffFunction) -> Result<CutoffFunction> {
    for (a, role) in [(a1, "minuend"), (a2, "subtrahend")] {
        if a.type_tag() != CutoffType::A {
            return Err(Error::TypeMismatch(format!(
                "difference {role} must be of type A, got {:?}",
                a.type_tag()
            )));
        }
    }
    if a1.dim() != a2.dim() {
        return Err(Error::DimensionMismatch {
            expected: a1.dim(),
            got: a2.dim(),
        });
    }
    let (f1, f2) = (a1.eval_fn(), a2.eval_fn());
    let eval = Arc::new(move |t: &[f64]| f1(t) - with_scaled(t, 2.0, |s| f2(s)));
    let separable = match (a1.separable_terms(), a2.separable_terms()) {
        (Some(s1), Some(s2)) => {
            let mut terms = s1.to_vec();
            terms.extend(s2.iter().map(|term| SeparableTerm {
                coeff: -term.coeff,
                factors: term.factors.iter().map(|f| f.dilate(2.0)).collect(),
            }));
            Some(terms)
        }
        _ => None,
    };
    let claim = match (a1.gauge(), a2.gauge()) {
        (Some(c1), Some(c2)) => Some(GaugeClaim {
            gauge: c1.gauge.clone(),
            gamma: c1.gamma + c2.gamma,
            scale: c1.scale.max(2.0 * c2.scale),
        }),
        _ => None,
    };
    let kind = match (a1.kind(), a2.kind()) {
        (CutoffKind::Univariate, CutoffKind::Univariate) => CutoffKind::Univariate,
        (CutoffKind::Second | CutoffKind::Univariate, CutoffKind::Second | CutoffKind::Univariate) => {
            CutoffKind::Second
        }
        (CutoffKind::Unclassified, _) | (_, CutoffKind::Unclassified) => CutoffKind::Unclassified,
        _ => CutoffKind::First,
    };
    let label = format!("{} - {}(2t)", a1.label(), a2.label());
    Ok(
        CutoffFunction::from_parts(label, a1.dim(), eval, kind, CutoffType::B)
            .with_gauge(claim)
            .with_separable(separable),
    )
}

/// `N(t) = sum_m |t_m| prod_j c(t_j / t_m)` with the convention `c(tau / 0) = 0`.
pub fn quasi_norm(t: &[f64], c_hat: &Univariate) -> f64 {
    let mut total = 0.0;
    for &tm in t {
        if tm == 0.0 {
            continue;
        }
        let mut w = tm.abs();
        for &tj in t {
            if w == 0.0 {
                break;
            }
            w *= c_hat.eval(tj / tm);
        }
        total += w;
    }
    total
}

/// `A(t) = a(N(t))` with `N` the quasi-norm built from the type-(a) function `c_hat`.
pub fn quasi_norm_cutoff(a: &Univariate, c_hat: &Univariate, d: usize) -> Result<CutoffFunction> {
    require_type(c_hat, CutoffType::A, "quasi-norm profile")?;
    if a.type_tag() == CutoffType::None {
        return Err(Error::TypeMismatch("quasi-norm cutoff needs a typed base".into()));
    }
    let (a2, c2) = (a.clone(), c_hat.clone());
    let eval = Arc::new(move |t: &[f64]| real(a2.eval(quasi_norm(t, &c2))));
    let label = format!("{}(N_{})", a.label(), c_hat.label());
    Ok(CutoffFunction::from_parts(label, d, eval, CutoffKind::Second, a.type_tag()))
}

fn require_product_a(a: &CutoffFunction) -> Result<()> {
    let is_product = a.type_tag() == CutoffType::A
        && matches!(a.separable_terms(), Some([t]) if t.coeff == 1.0);
    if !is_product {
        return Err(Error::TypeMismatch(format!(
            "splice constructions need a product of type-(a) factors, got {}",
            a.label()
        )));
    }
    Ok(())
}

fn sup_norm(t: &[f64]) -> f64 {
    t.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Type-(c) splice: `cos(pi/2 A(2t))` on `B_inf \ 1/2 B_inf`, `sin(pi/2 A(t))` on
/// `2 B_inf \ B_inf`, zero elsewhere.
pub fn sin_splice(a: &CutoffFunction) -> Result<CutoffFunction> {
    require_product_a(a)?;
    let f = a.eval_fn();
    let eval = Arc::new(move |t: &[f64]| {
        let r = sup_norm(t);
        if r <= 0.5 || r >= 2.0 {
            real(0.0)
        } else if r <= 1.0 {
            real((FRAC_PI_2 * with_scaled(t, 2.0, |s| f(s).re)).cos())
        } else {
            real((FRAC_PI_2 * f(t).re).sin())
        }
    });
    let claim = a.gauge().map(|c| GaugeClaim {
        gauge: c.gauge.clone(),
        gamma: 1.0,
        scale: (std::f64::consts::PI * c.gamma + 2.0) * c.scale,
    });
    let kind = if a.dim() == 1 {
        CutoffKind::Univariate
    } else {
        CutoffKind::Second
    };
    Ok(CutoffFunction::from_parts(
        format!("sin-splice[{}]", a.label()),
        a.dim(),
        eval,
        kind,
        CutoffType::C,
    )
    .with_gauge(claim))
}

/// Type-(c) splice: `1 - A(2t)^2` on `B_inf`, `A(t) sqrt(2 - A(t)^2)` on `2 B_inf \ B_inf`.
pub fn sqrt_splice(a: &CutoffFunction) -> Result<CutoffFunction> {
    require_product_a(a)?;
    let f = a.eval_fn();
    let eval = Arc::new(move |t: &[f64]| {
        let r = sup_norm(t);
        if r >= 2.0 {
            real(0.0)
        } else if r <= 1.0 {
            let v = with_scaled(t, 2.0, |s| f(s).re);
            real(1.0 - v * v)
        } else {
            let v = f(t).re;
            real(v * (2.0 - v * v).sqrt())
        }
    });
    let kind = if a.dim() == 1 {
        CutoffKind::Univariate
    } else {
        CutoffKind::Second
    };
    Ok(CutoffFunction::from_parts(
        format!("sqrt-splice[{}]", a.label()),
        a.dim(),
        eval,
        kind,
        CutoffType::C,
    ))
}

/// `A(t) = b(||t||_1)`: vanishes on `1/2 B_1` but is not flat at the coordinate planes.
pub fn radial_negative_control(b: &Univariate, d: usize) -> Result<CutoffFunction> {
    require_type(b, CutoffType::B, "radial profile")?;
    let b2 = b.clone();
    let eval = Arc::new(move |t: &[f64]| real(b2.eval(t.iter().map(|x| x.abs()).sum())));
    Ok(CutoffFunction::from_parts(
        format!("radial[{}]", b.label()),
        d,
        eval,
        CutoffKind::Unclassified,
        CutoffType::B,
    ))
}

/// Dispatches to the construction named by `construction`.
///
/// `bases` holds univariate building blocks: one (reused in every coordinate) or `d` for
/// products; one or two type-(a) functions for differences; `[a, c_hat]` for quasi-norms;
/// one type-(a) function for the splices.
pub fn make_multivariate(
    construction: Construction,
    d: usize,
    type_tag: CutoffType,
    bases: &[Univariate],
) -> Result<CutoffFunction> {
    let replicate = |u: &Univariate| vec![u.clone(); d];
    let want = |t: CutoffType| {
        if type_tag != t {
            Err(Error::TypeMismatch(format!(
                "{construction:?} produces type {t:?}, requested {type_tag:?}"
            )))
        } else {
            Ok(())
        }
    };
    let arity = |n: &[usize]| {
        if n.contains(&bases.len()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{construction:?} takes {n:?} base functions, got {}",
                bases.len()
            )))
        }
    };
    match construction {
        Construction::Product => {
            want(CutoffType::A)?;
            arity(&[1, d])?;
            if bases.len() == d {
                product(bases.to_vec())
            } else {
                product(replicate(&bases[0]))
            }
        }
        Construction::Difference => {
            want(CutoffType::B)?;
            arity(&[1, 2])?;
            let a1 = product(replicate(&bases[0]))?;
            let a2 = product(replicate(bases.last().unwrap()))?;
            product_difference(&a1, &a2)
        }
        Construction::QuasiNorm => {
            arity(&[2])?;
            want(bases[0].type_tag())?;
            quasi_norm_cutoff(&bases[0], &bases[1], d)
        }
        Construction::SinSplice | Construction::SqrtSplice => {
            want(CutoffType::C)?;
            arity(&[1])?;
            let a = product(replicate(&bases[0]))?;
            if construction == Construction::SinSplice {
                sin_splice(&a)
            } else {
                sqrt_splice(&a)
            }
        }
    }
}

/// Dual cutoff `B(t) = A(t) / sum_{j in Z} |A(2^{-j} t)|^2` of a type-(b) cutoff with the
/// dyadic covering property.
pub fn make_dual_cutoff(a: &CutoffFunction) -> Result<CutoffFunction> {
    if !matches!(a.type_tag(), CutoffType::B | CutoffType::C) {
        return Err(Error::TypeMismatch(format!(
            "dual cutoff needs a type-(b) function, got {:?}",
            a.type_tag()
        )));
    }
    let cover = verify_dyadic_covering(a);
    if !cover.passed {
        return Err(Error::CoveringFailure {
            value: cover.min_inf,
            location: cover.worst_location,
        });
    }
    let f = a.eval_fn();
    let eval = Arc::new(move |t: &[f64]| {
        let num = f(t);
        if num == Complex64::new(0.0, 0.0) {
            return num;
        }
        let sup = sup_norm(t);
        let l1: f64 = t.iter().map(|x| x.abs()).sum();
        let j_lo = (sup / 2.0).log2().floor() as i32;
        let j_hi = (2.0 * l1).log2().ceil() as i32;
        let mut denom = 0.0;
        for j in j_lo..=j_hi {
            denom += with_scaled(t, 2f64.powi(-j), |s| f(s).norm_sqr());
        }
        if denom < 1e-10 {
            return Complex64::new(0.0, 0.0);
        }
        num / denom
    });
    Ok(CutoffFunction::from_parts(
        format!("dual[{}]", a.label()),
        a.dim(),
        eval,
        a.kind(),
        CutoffType::B,
    )
    .with_real(a.is_real()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::make_univariate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ua() -> Univariate {
        make_univariate(CutoffType::A).unwrap()
    }

    #[test]
    fn product_example() {
        let p = product(vec![ua(), ua()]).unwrap();
        assert_eq!(p.eval_re(&[0.5, 0.9]), 1.0);
        assert_eq!(p.kind(), CutoffKind::Second);
        assert!(product(vec![make_univariate(CutoffType::B).unwrap()]).is_err());
    }

    #[test]
    fn difference_vanishes_on_half_simplex() {
        let b = make_multivariate(Construction::Difference, 2, CutoffType::B, &[ua()]).unwrap();
        assert_eq!(b.eval_re(&[0.1, 0.3]), 0.0);
        assert_eq!(b.eval_re(&[0.4, 0.0]), 0.0);
        assert_eq!(b.separable_terms().unwrap().len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let t = [rng.gen_range(0.0..2.5), rng.gen_range(0.0..2.5)];
            let sep: f64 = b
                .separable_terms()
                .unwrap()
                .iter()
                .map(|term| term.coeff * term.factors.iter().zip(&t).map(|(f, &x)| f.eval(x)).product::<f64>())
                .sum();
            assert!((sep - b.eval_re(&t)).abs() < 1e-15);
        }
    }

    #[test]
    fn quasi_norm_examples() {
        let c = ua();
        assert_eq!(quasi_norm(&[0.0, 5.0, 0.0], &c), 5.0);
        assert_eq!(quasi_norm(&[1.0, 1.0], &c), 2.0);
        assert_eq!(quasi_norm(&[0.0, 0.0], &c), 0.0);
    }

    #[test]
    fn sin_splice_continuity_at_unit_sphere() {
        let a = product(vec![ua(), ua()]).unwrap();
        let c = sin_splice(&a).unwrap();
        let t = [1.0, 0.37];
        let outer = (FRAC_PI_2 * a.eval_re(&t)).sin();
        let inner = (FRAC_PI_2 * a.eval_re(&[2.0, 0.74])).cos();
        assert!((outer - inner).abs() < 1e-12);
        assert!((c.eval_re(&t) - outer).abs() < 1e-12);
        let eps = 1e-9;
        assert!((c.eval_re(&[1.0 + eps, 0.37]) - c.eval_re(&t)).abs() < 1e-6);
    }

    #[test]
    fn splices_satisfy_square_partition() {
        let a = product(vec![ua(), ua(), ua()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for c in [sin_splice(&a).unwrap(), sqrt_splice(&a).unwrap()] {
            for _ in 0..10_000 {
                let r: f64 = rng.gen_range(1.0..8.0);
                let k = rng.gen_range(0..3);
                let mut t = [rng.gen_range(0.0..r), rng.gen_range(0.0..r), rng.gen_range(0.0..r)];
                t[k] = r;
                let s: f64 = (0..6)
                    .map(|j| {
                        let sc = 2f64.powi(-j);
                        c.eval(&[t[0] * sc, t[1] * sc, t[2] * sc]).norm_sqr()
                    })
                    .sum();
                assert!((s - 1.0).abs() < 1e-12, "{}: {s} at {t:?}", c.label());
            }
        }
    }

    #[test]
    fn splice_rejects_non_products() {
        let q = quasi_norm_cutoff(&ua(), &ua(), 2).unwrap();
        assert!(matches!(sin_splice(&q), Err(Error::TypeMismatch(_))));
    }

    #[test]
    fn dual_examples() {
        let a = make_multivariate(Construction::Difference, 2, CutoffType::B, &[ua()]).unwrap();
        let b = make_dual_cutoff(&a).unwrap();
        let t = [1.7, 0.9];
        let s: Complex64 = (0..8)
            .map(|j| {
                let sc = 2f64.powi(-j);
                let p = [t[0] * sc, t[1] * sc];
                a.eval(&p).conj() * b.eval(&p)
            })
            .sum();
        assert!((s - 1.0).norm() < 1e-12);
        assert_eq!(b.eval_re(&[0.1, 0.2]), 0.0);

        let c = sin_splice(&product(vec![ua(), ua()]).unwrap()).unwrap();
        let bc = make_dual_cutoff(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let t = [rng.gen_range(1.0..2.0), rng.gen_range(0.0..2.0)];
            assert!((bc.eval(&t) - c.eval(&t)).norm() < 1e-12);
        }
    }

    #[test]
    fn dual_rejects_type_a() {
        assert!(make_dual_cutoff(&product(vec![ua()]).unwrap()).is_err());
    }

    #[test]
    fn radial_control_metadata() {
        let r = radial_negative_control(&make_univariate(CutoffType::B).unwrap(), 2).unwrap();
        assert_eq!(r.kind(), CutoffKind::Unclassified);
        assert_eq!(r.eval_re(&[0.2, 0.2]), 0.0);
    }

    proptest! {
        #[test]
        fn quasi_norm_sandwich_and_homogeneity(
            t in prop::collection::vec(0.0f64..5.0, 2..=3),
            lam in 0.1f64..10.0,
        ) {
            let c = ua();
            let n = quasi_norm(&t, &c);
            let sup = t.iter().cloned().fold(0.0, f64::max);
            let l1: f64 = t.iter().sum();
            prop_assert!(n >= sup * (1.0 - 1e-15) && n <= l1 * (1.0 + 1e-15));
            let scaled: Vec<f64> = t.iter().map(|x| 3.0 * x).collect();
            prop_assert!((quasi_norm(&scaled, &c) - 3.0 * n).abs() <= 1e-14 * n.max(1.0));
            let st: Vec<f64> = t.iter().map(|x| lam * x).collect();
            prop_assert!((quasi_norm(&st, &c) - lam * n).abs() <= 1e-13 * (lam * n).max(1.0));
        }
    }
}
