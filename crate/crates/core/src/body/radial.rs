use super::extrema::{refine_min, tangent_basis};
use super::{pad, ConvexBody};
use crate::error::{GeometryError, Result};
use crate::sphere::{dot, Vec3};

impl ConvexBody {
    /// Radial function `rho_K(u) = max{t : t u in K}`.
    pub fn radial_function(&self, u: &[f64]) -> Result<f64> {
        self.radial_about(&vec![0.0; self.dim()], u)
    }

    /// Radial function of `K - x`.
    pub fn radial_about(&self, x: &[f64], u: &[f64]) -> Result<f64> {
        // validates the direction
        self.support_at(u)?;
        let margin = self.interior_margin(x);
        if margin <= 0.0 {
            return Err(GeometryError::NotInterior { min: margin });
        }
        let x = pad(x);
        let u = pad(u);
        let directions = self.boundary_directions(&x);
        Ok(self.solve_radial(&x, &u, &directions))
    }

    /// `rho_{K-x}` at every node.
    pub fn radial_at_nodes(&self, x: &[f64]) -> Result<Vec<f64>> {
        let margin = self.interior_margin(x);
        if margin <= 0.0 {
            return Err(GeometryError::NotInterior { min: margin });
        }
        let x = pad(x);
        let directions = self.boundary_directions(&x);
        Ok(self.grid.nodes().iter().map(|u| self.solve_radial(&x, u, &directions)).collect())
    }

    /// Directions of the boundary node points seen from `x`.
    fn boundary_directions(&self, x: &Vec3) -> Vec<(Vec3, Vec3)> {
        self.boundary_points()
            .into_iter()
            .zip(self.grid.nodes())
            .map(|(y, v)| {
                let z = [y[0] - x[0], y[1] - x[1], y[2] - x[2]];
                let n = dot(&z, &z).sqrt();
                ([z[0] / n, z[1] / n, z[2] / n], *v)
            })
            .collect()
    }

    fn solve_radial(&self, x: &Vec3, u: &Vec3, directions: &[(Vec3, Vec3)]) -> f64 {
        let start = directions
            .iter()
            .max_by(|a, b| dot(&a.0, u).total_cmp(&dot(&b.0, u)))
            .map(|d| d.1)
            .expect("grid has nodes");
        if let Some(rho) = self.radial_newton(x, u, start) {
            return rho;
        }
        // rho(u) = min over v with u.v > 0 of (h(v) - x.v) / (u.v)
        let (_, value) = refine_min(self.dim(), &start, 4.0 * self.spacing(), |v| {
            let c = dot(u, v);
            if c <= 1e-12 {
                f64::INFINITY
            } else {
                (self.support_unchecked(v) - dot(x, v)) / c
            }
        });
        value
    }

    /// Newton iteration on the normal `v` for `P_u (y(v) - x) = 0`.
    fn radial_newton(&self, x: &Vec3, u: &Vec3, start: Vec3) -> Option<f64> {
        let dim = self.dim();
        let frame = |w: &Vec3| -> [Vec3; 2] {
            if dim == 2 {
                [[-w[1], w[0], 0.0], [0.0; 3]]
            } else {
                tangent_basis(w)
            }
        };
        let k = dim - 1;
        let s = frame(u);
        let state = |v: &Vec3| {
            let jet = self.jet(v);
            let y = jet.boundary_point(v);
            let z = [y[0] - x[0], y[1] - x[1], y[2] - x[2]];
            let res = [dot(&s[0], &z), dot(&s[1], &z)];
            (jet, z, res)
        };
        let norm = |r: &[f64; 2]| (r[0] * r[0] + r[1] * r[1]).sqrt();
        let mut v = start;
        let (mut jet, mut z, mut res) = state(&v);
        for _ in 0..60 {
            let scale = dot(&z, &z).sqrt();
            if norm(&res) <= 1e-15 * scale {
                break;
            }
            let t = frame(&v);
            let at: Vec<Vec3> = (0..k)
                .map(|c| {
                    let mut out = [0.0; 3];
                    for (a, row) in jet.radii.iter().enumerate() {
                        out[a] = dot(row, &t[c]);
                    }
                    out
                })
                .collect();
            let mut delta = if k == 1 {
                let j = dot(&s[0], &at[0]);
                [-res[0] / j, 0.0]
            } else {
                let (a, b, c, d) = (dot(&s[0], &at[0]), dot(&s[0], &at[1]), dot(&s[1], &at[0]), dot(&s[1], &at[1]));
                let det = a * d - b * c;
                [-(d * res[0] - b * res[1]) / det, -(-c * res[0] + a * res[1]) / det]
            };
            if !delta[0].is_finite() || !delta[1].is_finite() {
                return None;
            }
            let len = (delta[0] * delta[0] + delta[1] * delta[1]).sqrt();
            if len > 0.3 {
                delta = [delta[0] * 0.3 / len, delta[1] * 0.3 / len];
            }
            let mut accepted = false;
            let mut factor = 1.0;
            for _ in 0..30 {
                let mut w = [0.0; 3];
                for a in 0..3 {
                    w[a] = v[a] + factor * (delta[0] * t[0][a] + delta[1] * t[1][a]);
                }
                let n = dot(&w, &w).sqrt();
                let w = [w[0] / n, w[1] / n, w[2] / n];
                let (j2, z2, r2) = state(&w);
                if norm(&r2) < norm(&res) || factor * len < 1e-15 {
                    v = w;
                    jet = j2;
                    z = z2;
                    res = r2;
                    accepted = true;
                    break;
                }
                factor *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let rho = dot(&z, u);
        let scale = dot(&z, &z).sqrt();
        if norm(&res) <= 1e-11 * scale && rho > 0.0 {
            Some(rho)
        } else {
            None
        }
    }
}
