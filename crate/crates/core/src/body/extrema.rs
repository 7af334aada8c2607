use crate::optimize::{brent_minimize, nelder_mead, SimplexOptions};
use crate::sphere::{dot, Vec3};

/// Orthonormal basis of the tangent plane at a unit vector `u` in R^3.
pub(crate) fn tangent_basis(u: &Vec3) -> [Vec3; 2] {
    let seed = if u[0].abs() < 0.6 { [1.0, 0.0, 0.0] } else if u[1].abs() < 0.6 { [0.0, 1.0, 0.0] } else { [0.0, 0.0, 1.0] };
    let d = dot(&seed, u);
    let mut a = [seed[0] - d * u[0], seed[1] - d * u[1], seed[2] - d * u[2]];
    let na = dot(&a, &a).sqrt();
    for v in a.iter_mut() {
        *v /= na;
    }
    let b = [u[1] * a[2] - u[2] * a[1], u[2] * a[0] - u[0] * a[2], u[0] * a[1] - u[1] * a[0]];
    [a, b]
}

/// Locally minimise `f` over unit directions near `center`, searching a
/// neighbourhood of angular size about `spacing`.
pub(crate) fn refine_min(dim: usize, center: &Vec3, spacing: f64, mut f: impl FnMut(&Vec3) -> f64) -> (Vec3, f64) {
    let start_value = f(center);
    let (point, value) = if dim == 2 {
        let t0 = center[1].atan2(center[0]);
        let at = |t: f64| [t.cos(), t.sin(), 0.0];
        let (t, v) = brent_minimize(|t| f(&at(t)), t0 - 1.5 * spacing, t0 + 1.5 * spacing, 1e-12, 200);
        (at(t), v)
    } else {
        let [a, b] = tangent_basis(center);
        let at = |p: &[f64]| {
            let mut v = [0.0; 3];
            for k in 0..3 {
                v[k] = center[k] + p[0] * a[k] + p[1] * b[k];
            }
            let n = dot(&v, &v).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        };
        let options = SimplexOptions { max_evaluations: 400, value_tolerance: 1e-15, point_tolerance: 1e-10 };
        let r = nelder_mead(|p| f(&at(p)), &[0.0, 0.0], 0.5 * spacing, &options);
        (at(&r.point), r.value)
    };
    if value <= start_value {
        (point, value)
    } else {
        (*center, start_value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FieldExtrema {
    pub min: f64,
    pub argmin: Vec3,
    pub max: f64,
    pub argmax: Vec3,
}

/// Up to `count` indices taken in `order`, each at least `gap` away from
/// the ones already taken, so that the picks sit on distinct local extrema.
fn separated(nodes: &[Vec3], order: impl Iterator<Item = usize>, count: usize, gap: f64) -> Vec<usize> {
    let mut picked: Vec<usize> = Vec::with_capacity(count);
    for i in order {
        if picked.len() == count {
            break;
        }
        let far = picked.iter().all(|&j| {
            let d = [nodes[i][0] - nodes[j][0], nodes[i][1] - nodes[j][1], nodes[i][2] - nodes[j][2]];
            dot(&d, &d) > gap * gap
        });
        if far {
            picked.push(i);
        }
    }
    picked
}

/// Refine the extremes of a function of the direction, starting from up to
/// `candidates` well separated nodes on each side.
pub(crate) fn refine_field_extrema(
    dim: usize,
    nodes: &[Vec3],
    node_values: &[f64],
    spacing: f64,
    candidates: usize,
    mut f: impl FnMut(&Vec3) -> f64,
) -> FieldExtrema {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| node_values[a].total_cmp(&node_values[b]));
    let gap = 2.5 * spacing;
    let (mut min, mut argmin) = (node_values[order[0]], nodes[order[0]]);
    for i in separated(nodes, order.iter().copied(), candidates, gap) {
        let (p, v) = refine_min(dim, &nodes[i], spacing, &mut f);
        if v < min {
            min = v;
            argmin = p;
        }
    }
    let last = order[order.len() - 1];
    let (mut max, mut argmax) = (node_values[last], nodes[last]);
    for i in separated(nodes, order.iter().rev().copied(), candidates, gap) {
        let (p, v) = refine_min(dim, &nodes[i], spacing, |u| -f(u));
        if -v > max {
            max = -v;
            argmax = p;
        }
    }
    FieldExtrema { min, argmin, max, argmax }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refines_between_nodes() {
        // minimum of -cos(t - 0.3) sits at t = 0.3
        let center = [1.0, 0.0, 0.0];
        let (p, v) = refine_min(2, &center, 0.2, |u| -(u[0] * 0.3f64.cos() + u[1] * 0.3f64.sin()));
        assert!((v + 1.0).abs() < 1e-14);
        assert!((p[1].atan2(p[0]) - 0.3).abs() < 1e-7);
    }

    #[test]
    fn refines_on_the_sphere() {
        let target = [0.6, 0.0, 0.8];
        let center = [0.5, 0.1, (1.0f64 - 0.26).sqrt()];
        let (p, v) = refine_min(3, &center, 0.2, |u| -dot(u, &target));
        assert!((v + 1.0).abs() < 1e-12);
        assert!(dot(&p, &target) > 1.0 - 1e-12);
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        for u in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.6, 0.0, 0.8]] {
            let [a, b] = tangent_basis(&u);
            assert!(dot(&a, &u).abs() < 1e-15 && dot(&b, &u).abs() < 1e-15 && dot(&a, &b).abs() < 1e-15);
            assert!((dot(&a, &a) - 1.0).abs() < 1e-15 && (dot(&b, &b) - 1.0).abs() < 1e-15);
        }
    }
}
