//! Geometric primitives used by the complexity measures.

mod mvee;
pub mod volume;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, Point3, Result};

pub use mvee::{mvee, MveeOptions};

/// Relative slack on region membership, `q(x) <= level * (1 + MEMBERSHIP_TOL)`.
/// Points defining a region (ellipsoid support points, the farthest
/// neighbor on a sphere) sit on its boundary up to rounding.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    /// Tight box around `points`; a degenerate box at the origin when empty.
    pub fn around(points: &[Point3]) -> Self {
        let Some(first) = points.first() else {
            return Self { min: Point3::zeros(), max: Point3::zeros() };
        };
        points.iter().fold(Self { min: *first, max: *first }, |b, p| Self { min: b.min.inf(p), max: b.max.sup(p) })
    }

    pub fn cube(center: Point3, side: f64) -> Self {
        let h = Point3::repeat(side / 2.0);
        Self { min: center - h, max: center + h }
    }

    pub fn center(&self) -> Point3 {
        (self.min + self.max) / 2.0
    }

    pub fn extents(&self) -> Point3 {
        self.max - self.min
    }

    pub fn max_extent(&self) -> f64 {
        self.extents().max()
    }

    pub fn volume(&self) -> f64 {
        let e = self.extents();
        e.x * e.y * e.z
    }

    pub fn contains(&self, p: &Point3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn contains_box(&self, other: &Aabb, tol: f64) -> bool {
        (0..3).all(|i| other.min[i] >= self.min[i] - tol && other.max[i] <= self.max[i] + tol)
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }

    pub fn inflated(&self, r: f64) -> Self {
        Self { min: self.min - Point3::repeat(r), max: self.max + Point3::repeat(r) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere3 {
    pub center: Point3,
    pub radius: f64,
}

impl Sphere3 {
    pub fn new(center: Point3, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::InvalidArgument(format!("sphere radius must be non-negative, got {radius}")));
        }
        Ok(Self { center, radius })
    }
}

/// `{x : (x - c)^T A (x - c) <= 1}` with `A` symmetric positive definite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipsoid3 {
    pub center: Point3,
    pub form: Matrix3<f64>,
}

impl Ellipsoid3 {
    pub fn new(center: Point3, form: Matrix3<f64>) -> Result<Self> {
        let scale = form.amax().max(f64::MIN_POSITIVE);
        if (form - form.transpose()).amax() > 1e-9 * scale {
            return Err(Error::InvalidArgument("ellipsoid form is not symmetric".into()));
        }
        let form = (form + form.transpose()) / 2.0;
        if SymmetricEigen::new(form).eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidArgument("ellipsoid form is not positive definite".into()));
        }
        Ok(Self { center, form })
    }

    /// Builds `A = R diag(a_i^-2) R^T` from orthonormal axis directions (columns of `axes`).
    pub fn from_axes(center: Point3, axes: &Matrix3<f64>, semi_axes: [f64; 3]) -> Result<Self> {
        if semi_axes.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::Degenerate(format!("semi-axes must be positive, got {semi_axes:?}")));
        }
        let d = Matrix3::from_diagonal(&Point3::from(semi_axes.map(|a| 1.0 / (a * a))));
        Self::new(center, axes * d * axes.transpose())
    }

    pub fn ball(center: Point3, radius: f64) -> Result<Self> {
        Self::from_axes(center, &Matrix3::identity(), [radius; 3])
    }

    pub fn quadratic_form(&self, x: &Point3) -> f64 {
        let y = x - self.center;
        y.dot(&(self.form * y))
    }

    pub fn contains(&self, x: &Point3) -> bool {
        self.quadratic_form(x) <= 1.0 + MEMBERSHIP_TOL
    }

    /// Semi-axis lengths (ascending) and their unit directions (matching columns).
    pub fn axes(&self) -> ([f64; 3], Matrix3<f64>) {
        let eig = SymmetricEigen::new(self.form);
        let mut idx = [0usize, 1, 2];
        // Largest eigenvalue first gives ascending semi-axes.
        idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let semi = idx.map(|i| 1.0 / eig.eigenvalues[i].sqrt());
        let dirs = Matrix3::from_columns(&idx.map(|i| eig.eigenvectors.column(i).into_owned()));
        (semi, dirs)
    }

    pub fn semi_axes(&self) -> [f64; 3] {
        self.axes().0
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * std::f64::consts::PI / self.form.determinant().sqrt()
    }

    /// Same orientation with every semi-axis lengthened by `delta`. Contains
    /// all points within distance `delta` of the original ellipsoid.
    pub fn inflated(&self, delta: f64) -> Result<Self> {
        let (semi, dirs) = self.axes();
        Self::from_axes(self.center, &dirs, semi.map(|a| a + delta))
    }

    /// Scales every semi-axis by `factor` about the center.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.center, self.form / (factor * factor))
    }

    /// `{center, A_rows}` diagnostic form.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<[f64; 3]> = (0..3).map(|i| [self.form[(i, 0)], self.form[(i, 1)], self.form[(i, 2)]]).collect();
        serde_json::json!({ "center": [self.center.x, self.center.y, self.center.z], "A_rows": rows })
    }
}

/// A region of inspection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Sphere(Sphere3),
    Ellipsoid(Ellipsoid3),
}

impl Region {
    /// `(center, form, level)` such that the region is `(x-c)^T F (x-c) <= level`.
    fn quadric(&self) -> (Point3, Matrix3<f64>, f64) {
        match self {
            Region::Sphere(s) => (s.center, Matrix3::identity(), s.radius * s.radius),
            Region::Ellipsoid(e) => (e.center, e.form, 1.0),
        }
    }

    pub fn contains(&self, x: &Point3) -> bool {
        let (c, f, level) = self.quadric();
        let y = x - c;
        y.dot(&(f * y)) <= level * (1.0 + MEMBERSHIP_TOL)
    }

    /// The region grown so that it contains every point within `delta` of it.
    pub fn inflated(&self, delta: f64) -> Result<Region> {
        Ok(match self {
            Region::Sphere(s) => Region::Sphere(Sphere3::new(s.center, s.radius + delta)?),
            Region::Ellipsoid(e) => Region::Ellipsoid(e.inflated(delta)?),
        })
    }

    /// Coefficients of `q(t) = alpha t^2 + 2 beta t + gamma` along the segment.
    fn along(&self, seg: &Segment) -> (f64, f64, f64, f64) {
        let (c, f, level) = self.quadric();
        let e = seg.b - seg.a;
        let y = seg.a - c;
        let fe = f * e;
        (e.dot(&fe), fe.dot(&y), y.dot(&(f * y)), level)
    }
}

/// Straight segment between two points (an edge's center line).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point3,
    pub b: Point3,
}

impl Segment {
    pub fn new(a: Point3, b: Point3) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn at(&self, t: f64) -> Point3 {
        self.a + (self.b - self.a) * t
    }
}

/// How a node is tested against a region.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeTest {
    /// Only the node's center point.
    #[default]
    Center,
    /// The whole node sphere (region inflated by the node radius).
    Sphere,
}

/// A drawn graph element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    Node { center: Point3, radius: f64 },
    Edge(Segment),
}

/// Angle in degrees, in `[0, 180]`, between `prev - w` and `next - w`.
pub fn node_angle(prev: &Point3, w: &Point3, next: &Point3) -> Result<f64> {
    let a = prev - w;
    let b = next - w;
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::Degenerate("node angle with a zero-length edge".into()));
    }
    Ok(a.cross(&b).norm().atan2(a.dot(&b)).to_degrees())
}

/// Whether any point of the segment lies in the region.
pub fn segment_in_region(seg: &Segment, region: &Region) -> bool {
    let (alpha, beta, gamma, level) = region.along(seg);
    let t = if alpha > 0.0 { (-beta / alpha).clamp(0.0, 1.0) } else { 0.0 };
    alpha * t * t + 2.0 * beta * t + gamma <= level * (1.0 + MEMBERSHIP_TOL)
}

pub fn element_in_region(element: &Element, region: &Region, node_test: NodeTest) -> Result<bool> {
    Ok(match element {
        Element::Edge(seg) => segment_in_region(seg, region),
        Element::Node { center, radius } => match node_test {
            NodeTest::Center => region.contains(center),
            NodeTest::Sphere => region.inflated(*radius)?.contains(center),
        },
    })
}

/// Length of the part of the segment inside the region.
pub fn clipped_length(seg: &Segment, region: &Region) -> f64 {
    let (alpha, beta, gamma, level) = region.along(seg);
    if alpha <= 0.0 {
        return 0.0;
    }
    let disc = beta * beta - alpha * (gamma - level);
    if disc <= 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    // Numerically stable pair of roots.
    let q = -(beta + beta.signum() * sq);
    let (r1, r2) = if q != 0.0 { (q / alpha, (gamma - level) / q) } else { (-sq / alpha, sq / alpha) };
    let (t0, t1) = (r1.min(r2).max(0.0), r1.max(r2).min(1.0));
    if t1 <= t0 {
        0.0
    } else {
        (t1 - t0) * seg.length()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn node_angles() {
        let o = p(0.0, 0.0, 0.0);
        assert!((node_angle(&p(-1.0, 0.0, 0.0), &o, &p(2.0, 0.0, 0.0)).unwrap() - 180.0).abs() < 1e-12);
        assert!((node_angle(&p(1.0, 0.0, 0.0), &o, &p(0.0, 0.0, 3.0)).unwrap() - 90.0).abs() < 1e-12);
        assert!(node_angle(&p(1.0, 0.0, 0.0), &o, &p(2.0, 0.0, 0.0)).unwrap().abs() < 1e-12);
        assert!(node_angle(&o, &o, &p(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn segment_through_sphere_center() {
        let s = Region::Sphere(Sphere3::new(p(0.0, 0.0, 0.0), 0.5).unwrap());
        let seg = Segment::new(p(-2.0, 0.0, 0.0), p(2.0, 0.0, 0.0));
        assert!(segment_in_region(&seg, &s));
        assert!((clipped_length(&seg, &s) - 1.0).abs() < 1e-12);
        let far = Segment::new(p(3.0, 3.0, 3.0), p(4.0, 3.0, 3.0));
        assert!(!segment_in_region(&far, &s));
        assert_eq!(clipped_length(&far, &s), 0.0);
    }

    #[test]
    fn grazing_segment_matches_dense_sampling() {
        let e = Ellipsoid3::from_axes(p(0.0, 0.0, 0.0), &Matrix3::identity(), [2.0, 1.0, 0.5]).unwrap();
        let r = Region::Ellipsoid(e);
        // Along y = const the minimum form value is y^2; choose it as 0.999.
        let y = 0.999f64.sqrt();
        let seg = Segment::new(p(-1.0, y, 0.0), p(1.0, y, 0.0));
        let sampled = (0..=10_000).any(|i| e.contains(&seg.at(i as f64 / 10_000.0)));
        assert!(segment_in_region(&seg, &r));
        assert_eq!(sampled, segment_in_region(&seg, &r));
        let miss = Segment::new(p(-1.0, 1.0005, 0.0), p(1.0, 1.0005, 0.0));
        assert!(!segment_in_region(&miss, &r));
    }

    #[test]
    fn node_tests() {
        let r = Region::Sphere(Sphere3::new(p(0.0, 0.0, 0.0), 1.0).unwrap());
        let node = Element::Node { center: p(1.05, 0.0, 0.0), radius: 0.1 };
        assert!(!element_in_region(&node, &r, NodeTest::Center).unwrap());
        assert!(element_in_region(&node, &r, NodeTest::Sphere).unwrap());
    }

    #[test]
    fn ellipsoid_axes_and_volume() {
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -0.7, 1.1).into_inner();
        let e = Ellipsoid3::from_axes(p(1.0, 2.0, 3.0), &rot, [0.5, 3.0, 1.0]).unwrap();
        let semi = e.semi_axes();
        for (a, b) in semi.iter().zip([0.5, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((e.volume() - 4.0 / 3.0 * std::f64::consts::PI * 1.5).abs() < 1e-12);
        assert!(Ellipsoid3::new(p(0.0, 0.0, 0.0), Matrix3::new(1.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)).is_err());
        assert!(Ellipsoid3::new(p(0.0, 0.0, 0.0), Matrix3::from_diagonal_element(-1.0)).is_err());
    }

    /// Dense-sampling estimate of the inside length.
    fn sampled_length(seg: &Segment, r: &Region, n: usize) -> f64 {
        let inside = (0..n).filter(|&i| r.contains(&seg.at((i as f64 + 0.5) / n as f64))).count();
        inside as f64 / n as f64 * seg.length()
    }

    fn arb_point() -> impl Strategy<Value = Point3> {
        (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y, z)| p(x, y, z))
    }

    fn arb_ellipsoid() -> impl Strategy<Value = Ellipsoid3> {
        (arb_point(), -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, 0.2f64..2.0, 0.2f64..2.0, 0.2f64..2.0).prop_map(
            |(c, r, pi, y, a, b, d)| {
                let rot = nalgebra::Rotation3::from_euler_angles(r, pi, y).into_inner();
                Ellipsoid3::from_axes(c * 0.5, &rot, [a, b, d]).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn clipped_length_matches_sampling(a in arb_point(), b in arb_point(), e in arb_ellipsoid()) {
            let seg = Segment::new(a, b);
            let r = Region::Ellipsoid(e);
            let exact = clipped_length(&seg, &r);
            prop_assert!(exact <= seg.length() + 1e-12);
            prop_assert!((exact - sampled_length(&seg, &r, 100_000)).abs() < 1e-4);
            let touches = segment_in_region(&seg, &r);
            prop_assert_eq!(touches, exact > 0.0 || r.contains(&a) || r.contains(&b));
        }

        #[test]
        fn node_angle_is_rigid_and_scale_invariant(
            a in arb_point(), w in arb_point(), b in arb_point(),
            r in -3.0f64..3.0, s in 0.1f64..10.0, t in arb_point()
        ) {
            prop_assume!((a - w).norm() > 1e-2 && (b - w).norm() > 1e-2);
            let rot = nalgebra::Rotation3::from_euler_angles(r, 0.5 * r, -r);
            let f = |x: &Point3| rot * x * s + t;
            let before = node_angle(&a, &w, &b).unwrap();
            let after = node_angle(&f(&a), &f(&w), &f(&b)).unwrap();
            prop_assert!((before - after).abs() < 1e-9);
            prop_assert!((0.0..=180.0).contains(&before));
        }
    }
}
