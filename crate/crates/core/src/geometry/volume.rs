//! Volumes of node spheres and edge cylinders clipped to an axis-aligned box.

use std::f64::consts::PI;

use rand::Rng;

use super::{Aabb, Segment};
use crate::{rng, Point3};

pub fn ball_volume(r: f64) -> f64 {
    4.0 / 3.0 * PI * r * r * r
}

/// Lateral cylinder volume `pi r^2 L` (no end caps).
pub fn cylinder_volume(seg: &Segment, r: f64) -> f64 {
    PI * r * r * seg.length()
}

/// Volume of `ball(center, r) ∩ bx`.
///
/// Cross-sections perpendicular to z are disks clipped to a rectangle, whose
/// area is closed-form; the remaining 1-D integral is Gauss–Legendre
/// quadrature split at every height where the section changes shape.
pub fn ball_box_volume(center: &Point3, r: f64, bx: &Aabb) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let lo = bx.min - center;
    let hi = bx.max - center;
    if (0..3).any(|i| lo[i] >= r || hi[i] <= -r || hi[i] <= lo[i]) {
        return 0.0;
    }
    if (0..3).all(|i| lo[i] <= -r && hi[i] >= r) {
        return ball_volume(r);
    }
    let (z0, z1) = (lo.z.max(-r), hi.z.min(r));
    let mut cuts = vec![z0, z1];
    // Heights where the section radius crosses a rectangle side or corner distance.
    let xs = [lo.x, hi.x];
    let ys = [lo.y, hi.y];
    let mut dists: Vec<f64> = xs.iter().chain(&ys).map(|d| d.abs()).collect();
    for x in xs {
        for y in ys {
            dists.push((x * x + y * y).sqrt());
        }
    }
    for d in dists {
        if d < r {
            let z = (r * r - d * d).sqrt();
            for z in [-z, z] {
                if z > z0 && z < z1 {
                    cuts.push(z);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let section = |z: f64| disk_rect_area((r * r - z * z).max(0.0).sqrt(), lo.x, hi.x, lo.y, hi.y);
    cuts.windows(2).map(|w| smoothed_integral(&section, w[0], w[1])).sum()
}

/// Area of the disk of radius `rho` at the origin intersected with `[x0,x1] x [y0,y1]`.
pub fn disk_rect_area(rho: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    if rho <= 0.0 || x1 <= x0 || y1 <= y0 {
        return 0.0;
    }
    let g = |a, b| quadrant_area(rho, a, b);
    (g(x1, y1) - g(x0, y1) - g(x1, y0) + g(x0, y0)).max(0.0)
}

/// Area of the disk of radius `rho` at the origin intersected with `{x <= a, y <= b}`.
fn quadrant_area(rho: f64, a: f64, b: f64) -> f64 {
    if b <= -rho || a <= -rho {
        return 0.0;
    }
    let a = a.min(rho);
    // Antiderivative of the half-chord h(x) = sqrt(rho^2 - x^2).
    let h_int = |x: f64| {
        let x = x.clamp(-rho, rho);
        0.5 * (x * (rho * rho - x * x).max(0.0).sqrt() + rho * rho * (x / rho).clamp(-1.0, 1.0).asin())
    };
    // Integral over [lo, hi] ∩ [-rho, a] of (k_h * h(x) + k_b * b).
    let piece = |lo: f64, hi: f64, k_h: f64, k_b: f64| {
        let (lo, hi) = (lo.max(-rho), hi.min(a));
        if hi <= lo {
            0.0
        } else {
            k_h * (h_int(hi) - h_int(lo)) + k_b * b * (hi - lo)
        }
    };
    if b >= rho {
        return piece(-rho, rho, 2.0, 0.0);
    }
    let xb = (rho * rho - b * b).sqrt();
    if b >= 0.0 {
        // Chord is [-h, b] where h > b, [-h, h] elsewhere.
        piece(-rho, -xb, 2.0, 0.0) + piece(-xb, xb, 1.0, 1.0) + piece(xb, rho, 2.0, 0.0)
    } else {
        // Chord [-h, b] is non-empty only where h > -b.
        piece(-xb, xb, 1.0, 1.0)
    }
}

const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Integral over `[a, b]` after the substitution `z = a + (b - a)(3t² - 2t³)`,
/// which removes square-root singularities at both ends.
fn smoothed_integral(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = b - a;
    let g = |t: f64| f(a + h * t * t * (3.0 - 2.0 * t)) * 6.0 * h * t * (1.0 - t);
    gauss_legendre(&g, 0.0, 1.0, 8)
}

/// Composite 8-point Gauss–Legendre rule over `panels` equal panels.
fn gauss_legendre(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * h;
            let half = h / 2.0;
            GL8.iter().map(|&(x, w)| w * (f(mid - half * x) + f(mid + half * x))).sum::<f64>() * half
        })
        .sum()
}

/// Volume of the lateral cylinder of radius `r` around `seg` inside `bx`.
///
/// Exact when the cylinder lies wholly inside or outside the box; otherwise
/// a Monte-Carlo estimate from `samples` uniform points drawn from the
/// cylinder with the given seed.
pub fn cylinder_box_volume(seg: &Segment, r: f64, bx: &Aabb, samples: usize, seed: u64) -> f64 {
    let full = cylinder_volume(seg, r);
    if full == 0.0 {
        return 0.0;
    }
    let hull = Aabb::around(&[seg.a, seg.b]).inflated(r);
    if !hull.intersects(bx) {
        return 0.0;
    }
    let inner = Aabb { min: bx.min + Point3::repeat(r), max: bx.max - Point3::repeat(r) };
    if inner.contains(&seg.a) && inner.contains(&seg.b) {
        return full;
    }
    let axis = (seg.b - seg.a).normalize();
    let helper = if axis.x.abs() < 0.9 { Point3::x() } else { Point3::y() };
    let e1 = axis.cross(&helper).normalize();
    let e2 = axis.cross(&e1);
    let mut rng = rng::stream(seed, 1);
    let samples = samples.max(1);
    let inside = (0..samples)
        .filter(|_| {
            let t: f64 = rng.random();
            let rad = r * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            let p = seg.at(t) + e1 * (rad * phi.cos()) + e2 * (rad * phi.sin());
            bx.contains(&p)
        })
        .count();
    full * inside as f64 / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cap(r: f64, h: f64) -> f64 {
        PI * h * h * (3.0 * r - h) / 3.0
    }

    #[test]
    fn ball_inside_outside_and_cap() {
        let bx = Aabb::cube(Point3::zeros(), 2.0);
        assert!((ball_box_volume(&Point3::zeros(), 0.5, &bx) - ball_volume(0.5)).abs() < 1e-15);
        assert_eq!(ball_box_volume(&Point3::new(3.0, 0.0, 0.0), 0.5, &bx), 0.0);
        // Center 0.2 inside the +x face: cap of height 0.3 is cut away.
        let c = Point3::new(0.8, 0.0, 0.0);
        let expect = ball_volume(0.5) - cap(0.5, 0.3);
        assert!((ball_box_volume(&c, 0.5, &bx) - expect).abs() < 1e-10);
        // Ball centered on a box corner keeps one octant.
        let corner = Point3::new(1.0, 1.0, 1.0);
        assert!((ball_box_volume(&corner, 0.3, &bx) - ball_volume(0.3) / 8.0).abs() < 1e-10);
        // Ball swallowing the box keeps the box.
        assert!((ball_box_volume(&Point3::zeros(), 2.0, &bx) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn ball_on_box_edge_matches_monte_carlo() {
        let bx = Aabb::cube(Point3::zeros(), 1.0);
        let c = Point3::new(0.45, 0.42, 0.1);
        let r = 0.1;
        let mut rng = rng::stream(5, 0);
        let n = 2_000_000;
        let hits = (0..n)
            .filter(|_| {
                let p = c + Point3::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0) * r;
                (p - c).norm() <= r && bx.contains(&p)
            })
            .count();
        let mc = hits as f64 / n as f64 * 8.0 * r * r * r;
        let exact = ball_box_volume(&c, r, &bx);
        assert!((exact - mc).abs() < 0.01 * exact, "{exact} vs {mc}");
    }

    #[test]
    fn disk_rect_basics() {
        assert!((disk_rect_area(1.0, -2.0, 2.0, -2.0, 2.0) - PI).abs() < 1e-12);
        assert!((disk_rect_area(1.0, 0.0, 2.0, 0.0, 2.0) - PI / 4.0).abs() < 1e-12);
        assert!((disk_rect_area(1.0, -2.0, 2.0, -2.0, 0.0) - PI / 2.0).abs() < 1e-12);
        assert!((disk_rect_area(2.0, -0.5, 0.5, -0.5, 0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_clipping() {
        let bx = Aabb::cube(Point3::zeros(), 1.0);
        let inside = Segment::new(Point3::new(-0.2, 0.0, 0.0), Point3::new(0.2, 0.0, 0.0));
        assert_eq!(cylinder_box_volume(&inside, 0.01, &bx, 1000, 1), cylinder_volume(&inside, 0.01));
        // Half the segment sticks out of the +x face.
        let half = Segment::new(Point3::new(0.3, 0.0, 0.0), Point3::new(0.7, 0.0, 0.0));
        let v = cylinder_box_volume(&half, 0.01, &bx, 100_000, 1);
        assert!((v / cylinder_volume(&half, 0.01) - 0.5).abs() < 0.01);
        let out = Segment::new(Point3::new(2.0, 0.0, 0.0), Point3::new(3.0, 0.0, 0.0));
        assert_eq!(cylinder_box_volume(&out, 0.01, &bx, 1000, 1), 0.0);
        assert_eq!(cylinder_box_volume(&half, 0.01, &bx, 5000, 9), cylinder_box_volume(&half, 0.01, &bx, 5000, 9));
    }
}
