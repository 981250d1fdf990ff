use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use super::{CutoffType, Univariate};

/// `s(u) = sigma(u) / (sigma(u) + sigma(1 - u))` with `sigma(u) = exp(-1/u)` for `u > 0`.
///
/// Infinitely flat at both ends: `s = 0` on `(-inf, 0]` and `s = 1` on `[1, inf)`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / u - 1.0 / (1.0 - u)).exp())
    }
}

fn type_a(t: f64) -> f64 {
    smooth_step(2.0 - t)
}

fn type_b(t: f64) -> f64 {
    type_a(t) - type_a(2.0 * t)
}

fn type_c(t: f64) -> f64 {
    if t <= 0.5 || t >= 2.0 {
        0.0
    } else if t <= 1.0 {
        (FRAC_PI_2 * type_a(2.0 * t)).cos()
    } else {
        (FRAC_PI_2 * type_a(t)).sin()
    }
}

/// Closed-form univariate cutoff of the requested type.
///
/// Returns `None` for [`CutoffType::None`].
pub fn make_univariate(type_tag: CutoffType) -> Option<Univariate> {
    let (label, f): (&str, fn(f64) -> f64) = match type_tag {
        CutoffType::A => ("a", type_a),
        CutoffType::B => ("b", type_b),
        CutoffType::C => ("c", type_c),
        CutoffType::None => return None,
    };
    Some(Univariate::new(label, type_tag, Arc::new(f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let a = make_univariate(CutoffType::A).unwrap();
        assert_eq!(a.eval(0.7), 1.0);
        assert_eq!(a.eval(2.0), 0.0);
        let b = make_univariate(CutoffType::B).unwrap();
        assert_eq!(b.eval(0.2), 0.0);
        assert_eq!(b.eval(3.0), 0.0);
        let c = make_univariate(CutoffType::C).unwrap();
        let s = c.eval(1.3).powi(2) + c.eval(2.6).powi(2) + c.eval(0.65).powi(2);
        assert!((s - 1.0).abs() < 1e-12);
        assert!(make_univariate(CutoffType::None).is_none());
    }

    #[test]
    fn smooth_step_symmetry_and_slope() {
        for i in 0..=100 {
            let u = i as f64 / 100.0;
            assert!((smooth_step(u) + smooth_step(1.0 - u) - 1.0).abs() < 1e-15);
        }
        let h = 1e-6;
        let slope = (smooth_step(0.5 + h) - smooth_step(0.5 - h)) / (2.0 * h);
        assert!((slope - 2.0).abs() < 1e-6);
    }

    #[test]
    fn type_c_partition_on_dense_chain() {
        let c = make_univariate(CutoffType::C).unwrap();
        for i in 0..5000 {
            let t = 1.0 + 15.0 * i as f64 / 4999.0;
            let s: f64 = (0..8).map(|j| c.eval(t / 2f64.powi(j)).powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-12, "t = {t}: {s}");
        }
    }

    #[test]
    fn values_lie_in_unit_interval() {
        for tag in [CutoffType::A, CutoffType::B, CutoffType::C] {
            let f = make_univariate(tag).unwrap();
            for i in 0..=3000 {
                let v = f.eval(3.0 * i as f64 / 3000.0);
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
