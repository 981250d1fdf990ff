//! Browser bindings for the demo page. Every grid is row-major over `[x_2][x_1]`.

use cube_needlets::cutoff::CutoffPreset;
use cube_needlets::expansion::TensorJacobiParams;
use cube_needlets::frame::{build_frame, Family, FrameConfig};
use cube_needlets::kernel::KernelSpec;
use wasm_bindgen::prelude::*;

const MAX_RESOLUTION: usize = 512;

type Res<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

fn check_resolution(resolution: usize) -> Res<()> {
    if (2..=MAX_RESOLUTION).contains(&resolution) {
        Ok(())
    } else {
        Err(err(format!("resolution must be in 2..={MAX_RESOLUTION}")))
    }
}

fn cube_axis(resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|i| -1.0 + 2.0 * i as f64 / (resolution - 1) as f64)
        .collect()
}

fn transposed(values: Vec<f64>, resolution: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for i in 0..resolution {
        for k in 0..resolution {
            out[k * resolution + i] = values[i * resolution + k];
        }
    }
    out
}

/// Names of the built-in cutoffs.
#[wasm_bindgen]
pub fn cutoff_names() -> Vec<String> {
    CutoffPreset::ALL.iter().map(|p| p.name().to_string()).collect()
}

fn cutoff_grid(name: &str, resolution: usize, t_max: f64) -> Res<Vec<f64>> {
    check_resolution(resolution)?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(err("t_max must be positive"));
    }
    let cutoff = name.parse::<CutoffPreset>().map_err(err)?.build(2).map_err(err)?;
    let step = t_max / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for r in 0..resolution {
        for c in 0..resolution {
            out.push(cutoff.eval_re(&[c as f64 * step, r as f64 * step]));
        }
    }
    Ok(out)
}

fn kernel_grid(
    name: &str,
    n: usize,
    alpha: f64,
    beta: f64,
    y1: f64,
    y2: f64,
    resolution: usize,
) -> Res<Vec<f64>> {
    check_resolution(resolution)?;
    if !(1..=128).contains(&n) {
        return Err(err("n must be in 1..=128"));
    }
    let params = TensorJacobiParams::from_lists(2, &[alpha], &[beta]).map_err(err)?;
    let cutoff = name.parse::<CutoffPreset>().map_err(err)?.build(2).map_err(err)?;
    let spec = KernelSpec::new(params, cutoff, n).map_err(err)?;
    let y = [y1.clamp(-1.0, 1.0), y2.clamp(-1.0, 1.0)];
    let row = spec.row_expansion(&y).map_err(err)?;
    let axis = cube_axis(resolution);
    let values = row.eval_grid(&[axis.clone(), axis]);
    Ok(transposed(values.iter().map(|v| v.norm()).collect(), resolution))
}

fn needlet_grid(
    j: u32,
    alpha: f64,
    beta: f64,
    x1: f64,
    x2: f64,
    resolution: usize,
) -> Res<Vec<f64>> {
    check_resolution(resolution)?;
    if j > 6 {
        return Err(err("level must be at most 6"));
    }
    let params = TensorJacobiParams::from_lists(2, &[alpha], &[beta]).map_err(err)?;
    let config = FrameConfig::default_tight(2).map_err(err)?;
    let frame = build_frame(&params, config, j).map_err(err)?;
    let level = frame.level(j);
    let flat = level.locate(&[x1.clamp(-1.0, 1.0), x2.clamp(-1.0, 1.0)]);
    let node = level.node(flat);
    let psi = frame.needlet(j, flat, Family::Synthesis);
    let axis = cube_axis(resolution);
    let values: Vec<f64> = psi.eval_grid(&[axis.clone(), axis]).iter().map(|v| v.re).collect();
    let mut out = node;
    out.extend(transposed(values, resolution));
    Ok(out)
}

/// Real part of a two-dimensional cutoff on `[0, t_max]^2`.
#[wasm_bindgen]
pub fn cutoff_heatmap(name: &str, resolution: usize, t_max: f64) -> Result<Vec<f64>, JsError> {
    cutoff_grid(name, resolution, t_max).map_err(js)
}

/// `|Lambda_n(x, y)|` over `x` in `[-1, 1]^2` for fixed `y`, with `alpha`, `beta` shared by
/// both coordinates.
#[wasm_bindgen]
pub fn kernel_heatmap(
    name: &str,
    n: usize,
    alpha: f64,
    beta: f64,
    y1: f64,
    y2: f64,
    resolution: usize,
) -> Result<Vec<f64>, JsError> {
    kernel_grid(name, n, alpha, beta, y1, y2, resolution).map_err(js)
}

/// Synthesis needlet of the tight sin-splice frame at level `j`, centred at the cubature node
/// whose tile contains `(x1, x2)`. The first two entries are the node, the rest the grid.
#[wasm_bindgen]
pub fn needlet_heatmap(
    j: u32,
    alpha: f64,
    beta: f64,
    x1: f64,
    x2: f64,
    resolution: usize,
) -> Result<Vec<f64>, JsError> {
    needlet_grid(j, alpha, beta, x1, x2, resolution).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_peaks_near_its_centre() {
        let res = 41;
        let v = kernel_grid("product-a", 8, 0.0, 0.0, 0.5, -0.5, res).unwrap();
        let (imax, _) = v
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
        let axis = cube_axis(res);
        let (x1, x2) = (axis[imax % res], axis[imax / res]);
        assert!((x1 - 0.5).abs() < 0.15 && (x2 + 0.5).abs() < 0.15, "peak at ({x1}, {x2})");
    }

    #[test]
    fn needlet_reports_its_node() {
        let out = needlet_grid(3, 0.0, 0.0, 0.2, 0.7, 9).unwrap();
        assert_eq!(out.len(), 2 + 81);
        assert!(out[..2].iter().all(|t| t.abs() < 1.0));
    }

    #[test]
    fn cutoff_grid_is_row_major() {
        let v = cutoff_grid("product-b", 5, 2.0).unwrap();
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], 0.0);
        assert!(cutoff_grid("nope", 5, 2.0).is_err());
    }
}
