//! Grid-based comparisons between unnormalized log densities: KL divergence
//! and the score-matching squared distance, both after trapezoidal
//! normalization on a regular lattice. A boundary-mass check guards against
//! grids too narrow for the densities they carry.

use super::DiagnosticsError;
use ndarray::{Array1, Array2};

const BOUNDARY_MASS_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Grid1d {
    pub xs: Vec<f64>,
}

impl Grid1d {
    pub fn regular(lo: f64, hi: f64, n: usize) -> Self {
        assert!(n >= 3 && hi > lo);
        let step = (hi - lo) / (n - 1) as f64;
        Grid1d { xs: (0..n).map(|i| lo + step * i as f64).collect() }
    }

    pub fn spacing(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }
}

#[derive(Debug, Clone)]
pub struct Grid2d {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Grid2d {
    pub fn regular(xlo: f64, xhi: f64, nx: usize, ylo: f64, yhi: f64, ny: usize) -> Self {
        assert!(nx >= 3 && ny >= 3 && xhi > xlo && yhi > ylo);
        let dx = (xhi - xlo) / (nx - 1) as f64;
        let dy = (yhi - ylo) / (ny - 1) as f64;
        Grid2d {
            xs: (0..nx).map(|i| xlo + dx * i as f64).collect(),
            ys: (0..ny).map(|j| ylo + dy * j as f64).collect(),
        }
    }

    pub fn dx(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn dy(&self) -> f64 {
        self.ys[1] - self.ys[0]
    }
}

fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        0.5
    } else {
        1.0
    }
}

/// Normalized density values on the lattice (integrating to one under the
/// trapezoid rule), from unnormalized log values.
pub struct Normalized1d {
    pub density: Vec<f64>,
    pub log_norm: f64,
    boundary_mass: f64,
}

pub fn normalize_1d<F: Fn(f64) -> f64>(log_f: F, grid: &Grid1d) -> Normalized1d {
    let n = grid.xs.len();
    let logs: Vec<f64> = grid.xs.iter().map(|&x| log_f(x)).collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let h = grid.spacing();
    let mut z = 0.0;
    for (i, &l) in logs.iter().enumerate() {
        z += trapezoid_weight(i, n) * (l - max).exp() * h;
    }
    let density: Vec<f64> = logs.iter().map(|&l| (l - max).exp() / z).collect();
    let boundary = (density[0] * 0.5 + density[n - 1] * 0.5) * h;
    Normalized1d { density, log_norm: max + z.ln(), boundary_mass: boundary }
}

fn check_boundary(mass: f64, what: &str) -> Result<(), DiagnosticsError> {
    if mass >= BOUNDARY_MASS_LIMIT {
        return Err(DiagnosticsError::BoundaryMass {
            mass,
            limit: BOUNDARY_MASS_LIMIT,
            what: what.to_string(),
        });
    }
    Ok(())
}

/// KL(p || q) on a 1D lattice, both densities given as unnormalized logs.
pub fn grid_kl_1d<F, G>(log_p: F, log_q: G, grid: &Grid1d) -> Result<f64, DiagnosticsError>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let p = normalize_1d(&log_p, grid);
    let q = normalize_1d(&log_q, grid);
    check_boundary(p.boundary_mass, "p")?;
    check_boundary(q.boundary_mass, "q")?;
    let n = grid.xs.len();
    let h = grid.spacing();
    let mut kl = 0.0;
    for i in 0..n {
        let (pi, qi) = (p.density[i], q.density[i]);
        if pi > 0.0 {
            let lp = log_p(grid.xs[i]) - p.log_norm;
            let lq = log_q(grid.xs[i]) - q.log_norm;
            kl += trapezoid_weight(i, n) * pi * (lp - lq) * h;
        }
        let _ = qi;
    }
    Ok(kl)
}

/// Cumulative distribution on the lattice, for equal-probability binning.
pub fn cdf_1d(norm: &Normalized1d, grid: &Grid1d) -> Vec<f64> {
    let h = grid.spacing();
    let mut acc = 0.0;
    let mut out = vec![0.0; grid.xs.len()];
    for i in 1..grid.xs.len() {
        acc += 0.5 * (norm.density[i - 1] + norm.density[i]) * h;
        out[i] = acc;
    }
    let total = out[grid.xs.len() - 1];
    for v in out.iter_mut() {
        *v /= total;
    }
    out
}

pub struct Normalized2d {
    pub density: Array2<f64>,
    pub log_norm: f64,
    boundary_mass: f64,
}

pub fn normalize_2d<F: Fn(f64, f64) -> f64>(log_f: F, grid: &Grid2d) -> Normalized2d {
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    let mut logs = Array2::<f64>::zeros((nx, ny));
    for i in 0..nx {
        for j in 0..ny {
            logs[[i, j]] = log_f(grid.xs[i], grid.ys[j]);
        }
    }
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cell = grid.dx() * grid.dy();
    let mut z = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            z += trapezoid_weight(i, nx)
                * trapezoid_weight(j, ny)
                * (logs[[i, j]] - max).exp()
                * cell;
        }
    }
    let density = logs.mapv(|l| (l - max).exp() / z);
    let mut boundary = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            if i == 0 || i == nx - 1 || j == 0 || j == ny - 1 {
                boundary += trapezoid_weight(i, nx)
                    * trapezoid_weight(j, ny)
                    * density[[i, j]]
                    * cell;
            }
        }
    }
    Normalized2d { density, log_norm: max + z.ln(), boundary_mass: boundary }
}

/// KL(p || q) over a 2D lattice.
pub fn grid_kl_2d<F, G>(log_p: F, log_q: G, grid: &Grid2d) -> Result<f64, DiagnosticsError>
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64, f64) -> f64,
{
    let p = normalize_2d(&log_p, grid);
    let q = normalize_2d(&log_q, grid);
    check_boundary(p.boundary_mass, "p")?;
    check_boundary(q.boundary_mass, "q")?;
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    let cell = grid.dx() * grid.dy();
    let mut kl = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            let pi = p.density[[i, j]];
            if pi > 0.0 {
                let lp = log_p(grid.xs[i], grid.ys[j]) - p.log_norm;
                let lq = log_q(grid.xs[i], grid.ys[j]) - q.log_norm;
                kl += trapezoid_weight(i, nx) * trapezoid_weight(j, ny) * pi * (lp - lq) * cell;
            }
        }
    }
    Ok(kl)
}

/// Score-matching squared distance on a 2D lattice:
/// 1/2 sum q * ||grad log p - grad log q||^2 * cellarea, gradients by central
/// differences on the grid (interior nodes only; the boundary check keeps
/// the excluded ring negligible). The q argument is the weighting density.
pub fn grid_sm_2d<F, G>(log_p: F, log_q: G, grid: &Grid2d) -> Result<f64, DiagnosticsError>
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64, f64) -> f64,
{
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    let mut lp = Array2::<f64>::zeros((nx, ny));
    let mut lq = Array2::<f64>::zeros((nx, ny));
    for i in 0..nx {
        for j in 0..ny {
            lp[[i, j]] = log_p(grid.xs[i], grid.ys[j]);
            lq[[i, j]] = log_q(grid.xs[i], grid.ys[j]);
        }
    }
    let qn = normalize_2d(&log_q, grid);
    check_boundary(qn.boundary_mass, "q")?;
    check_boundary(normalize_2d(&log_p, grid).boundary_mass, "p")?;

    let (dx, dy) = (grid.dx(), grid.dy());
    let cell = dx * dy;
    let mut acc = 0.0;
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let gpx = (lp[[i + 1, j]] - lp[[i - 1, j]]) / (2.0 * dx);
            let gqx = (lq[[i + 1, j]] - lq[[i - 1, j]]) / (2.0 * dx);
            let gpy = (lp[[i, j + 1]] - lp[[i, j - 1]]) / (2.0 * dy);
            let gqy = (lq[[i, j + 1]] - lq[[i, j - 1]]) / (2.0 * dy);
            let d2 = (gpx - gqx).powi(2) + (gpy - gqy).powi(2);
            acc += 0.5 * qn.density[[i, j]] * d2 * cell;
        }
    }
    Ok(acc)
}

/// Equal-probability bin edges of a normalized 1D density (nbins + 1 edges
/// spanning the grid).
pub fn equal_probability_edges(
    norm: &Normalized1d,
    grid: &Grid1d,
    nbins: usize,
) -> Vec<f64> {
    let cdf = cdf_1d(norm, grid);
    let mut edges = Vec::with_capacity(nbins + 1);
    edges.push(grid.xs[0]);
    let mut k = 1usize;
    for b in 1..nbins {
        let target = b as f64 / nbins as f64;
        while k < cdf.len() - 1 && cdf[k] < target {
            k += 1;
        }
        // linear interpolation inside the bracketing cell
        let (c0, c1) = (cdf[k - 1], cdf[k]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        edges.push(grid.xs[k - 1] + frac * grid.spacing());
    }
    edges.push(grid.xs[grid.xs.len() - 1]);
    edges
}

/// Bin probabilities of the normalized density between consecutive edges.
pub fn bin_probabilities(norm: &Normalized1d, grid: &Grid1d, edges: &[f64]) -> Array1<f64> {
    let cdf = cdf_1d(norm, grid);
    let interp = |x: f64| -> f64 {
        if x <= grid.xs[0] {
            return 0.0;
        }
        if x >= grid.xs[grid.xs.len() - 1] {
            return 1.0;
        }
        let idx = ((x - grid.xs[0]) / grid.spacing()).floor() as usize;
        let idx = idx.min(grid.xs.len() - 2);
        let frac = (x - grid.xs[idx]) / grid.spacing();
        cdf[idx] + frac * (cdf[idx + 1] - cdf[idx])
    };
    Array1::from_shape_fn(edges.len() - 1, |b| interp(edges[b + 1]) - interp(edges[b]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_densities_have_zero_divergences() {
        let grid = Grid2d::regular(-6.0, 6.0, 81, -6.0, 6.0, 81);
        let logp = |x: f64, y: f64| -0.5 * (x * x + y * y);
        let kl = grid_kl_2d(logp, logp, &grid).unwrap();
        let sm = grid_sm_2d(logp, logp, &grid).unwrap();
        assert!(kl.abs() < 1e-12);
        assert!(sm.abs() < 1e-12);
    }

    #[test]
    fn gaussian_pair_matches_closed_form_kl() {
        // KL(N(0,1) || N(0.5,1)) = mu^2 / 2 = 0.125
        let grid = Grid1d::regular(-8.0, 8.0, 4001);
        let kl = grid_kl_1d(
            |x| -0.5 * x * x,
            |x| -0.5 * (x - 0.5) * (x - 0.5),
            &grid,
        )
        .unwrap();
        assert!((kl - 0.125).abs() < 1e-4, "kl = {}", kl);
    }

    #[test]
    fn refining_the_grid_barely_moves_the_answer() {
        let coarse = Grid1d::regular(-8.0, 8.0, 2001);
        let fine = Grid1d::regular(-8.0, 8.0, 4001);
        let f = |x: f64| -0.5 * x * x;
        let g = |x: f64| -0.5 * (x - 0.5) * (x - 0.5);
        let a = grid_kl_1d(f, g, &coarse).unwrap();
        let b = grid_kl_1d(f, g, &fine).unwrap();
        assert!((a - b).abs() < 1e-5);
    }

    #[test]
    fn kl_is_nonnegative_and_asymmetric_on_random_pairs() {
        let grid = Grid2d::regular(-7.0, 7.0, 101, -7.0, 7.0, 101);
        let p = |x: f64, y: f64| -0.5 * (1.3 * x * x + 0.8 * y * y + 0.4 * x * y);
        let q = |x: f64, y: f64| -0.5 * ((x - 0.4) * (x - 0.4) + y * y) - 0.05 * x * y;
        let kl_pq = grid_kl_2d(p, q, &grid).unwrap();
        let kl_qp = grid_kl_2d(q, p, &grid).unwrap();
        assert!(kl_pq > 0.0 && kl_qp > 0.0);
        assert!((kl_pq - kl_qp).abs() > 1e-6);
    }

    #[test]
    fn narrow_grid_fails_the_boundary_check() {
        let grid = Grid1d::regular(-1.0, 1.0, 101);
        let err = grid_kl_1d(|x| -0.5 * x * x, |x| -0.5 * x * x, &grid).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("wider"), "error should advise a wider grid: {}", msg);
    }

    #[test]
    fn sm_distance_sees_scale_mismatch() {
        let grid = Grid2d::regular(-9.0, 9.0, 181, -9.0, 9.0, 181);
        let p = |x: f64, y: f64| -0.5 * (x * x + y * y);
        let q = |x: f64, y: f64| -0.25 * (x * x + y * y);
        let sm = grid_sm_2d(p, q, &grid).unwrap();
        // closed form: grad diff = -x/2, weighting N(0, 2I):
        // 1/2 E||x/2||^2 = 1/2 * (1/4) * (2 + 2) = 0.5
        assert!((sm - 0.5).abs() < 1e-3, "sm = {}", sm);
    }

    #[test]
    fn equal_probability_bins_partition_mass() {
        let grid = Grid1d::regular(-8.0, 8.0, 2001);
        let norm = normalize_1d(|x| -0.5 * x * x, &grid);
        let edges = equal_probability_edges(&norm, &grid, 20);
        assert_eq!(edges.len(), 21);
        let probs = bin_probabilities(&norm, &grid, &edges);
        for &p in probs.iter() {
            assert!((p - 0.05).abs() < 1e-3, "bin mass {}", p);
        }
    }
}
