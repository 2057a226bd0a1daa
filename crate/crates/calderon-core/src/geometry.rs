//! Integer lattice bookkeeping: the paving, its boundary partition, normals,
//! tangential traces, anti-diagonal planes and propagation cones.
//!
//! The domain is always the box `[[1,R1]] x [[1,R2]] x [[1,R3]]`; pavings with
//! other corners are handled by translating inputs before they reach this
//! module. The boundary consists of the lattice sites adjacent to the box but
//! outside it; corner and edge sites of the bounding box are not adjacent to
//! the box and therefore not boundary sites, so the six faces partition the
//! boundary exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A lattice point in `Z^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point3 {
    pub n1: i32,
    pub n2: i32,
    pub n3: i32,
}

impl Point3 {
    pub const fn new(n1: i32, n2: i32, n3: i32) -> Self {
        Point3 { n1, n2, n3 }
    }

    /// Coordinate along `axis`.
    pub fn coord(&self, axis: Axis) -> i32 {
        match axis {
            Axis::X1 => self.n1,
            Axis::X2 => self.n2,
            Axis::X3 => self.n3,
        }
    }

    /// The point shifted by `step` along `axis`.
    pub fn shifted(&self, axis: Axis, step: i32) -> Point3 {
        let mut p = *self;
        match axis {
            Axis::X1 => p.n1 += step,
            Axis::X2 => p.n2 += step,
            Axis::X3 => p.n3 += step,
        }
        p
    }

    /// Anti-diagonal plane index `n1 + n2` of this point.
    pub fn plane(&self) -> i32 {
        self.n1 + self.n2
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n1, self.n2, self.n3)
    }
}

/// One of the three lattice axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    /// Zero-based index of the axis.
    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    /// The two other axes, in increasing order.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X1 => (Axis::X2, Axis::X3),
            Axis::X2 => (Axis::X1, Axis::X3),
            Axis::X3 => (Axis::X1, Axis::X2),
        }
    }
}

/// Which side of the box a boundary face lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceSign {
    Minus,
    Plus,
}

impl FaceSign {
    pub fn step(self) -> i32 {
        match self {
            FaceSign::Minus => -1,
            FaceSign::Plus => 1,
        }
    }
}

/// The box `[[1,R1]] x [[1,R2]] x [[1,R3]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paving {
    pub r1: i32,
    pub r2: i32,
    pub r3: i32,
}

impl Paving {
    /// Build a paving, requiring every edge length to be at least one.
    pub fn new(r1: i32, r2: i32, r3: i32) -> crate::error::Result<Paving> {
        if r1 < 1 || r2 < 1 || r3 < 1 {
            return Err(crate::error::CoreError::Validation(format!(
                "paving edge lengths must be >= 1, got ({r1},{r2},{r3})"
            )));
        }
        Ok(Paving { r1, r2, r3 })
    }

    pub fn extent(&self, axis: Axis) -> i32 {
        match axis {
            Axis::X1 => self.r1,
            Axis::X2 => self.r2,
            Axis::X3 => self.r3,
        }
    }

    /// Number of interior sites `R1*R2*R3`.
    pub fn site_count(&self) -> usize {
        (self.r1 as usize) * (self.r2 as usize) * (self.r3 as usize)
    }

    /// Membership test for the box.
    pub fn contains(&self, p: Point3) -> bool {
        (1..=self.r1).contains(&p.n1) && (1..=self.r2).contains(&p.n2) && (1..=self.r3).contains(&p.n3)
    }

    /// Interior sites in lexicographic `(n1,n2,n3)` order.
    pub fn sites(&self) -> impl Iterator<Item = Point3> + '_ {
        let (r1, r2, r3) = (self.r1, self.r2, self.r3);
        (1..=r1).flat_map(move |n1| {
            (1..=r2).flat_map(move |n2| (1..=r3).map(move |n3| Point3::new(n1, n2, n3)))
        })
    }

    /// Lexicographic rank of an interior site.
    pub fn site_index(&self, p: Point3) -> usize {
        debug_assert!(self.contains(p));
        (((p.n1 - 1) * self.r2 + (p.n2 - 1)) * self.r3 + (p.n3 - 1)) as usize
    }

    /// Range of anti-diagonal plane indices `n1+n2` meeting the box.
    pub fn plane_range(&self) -> std::ops::RangeInclusive<i32> {
        2..=(self.r1 + self.r2)
    }
}

/// A boundary site together with its face labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySite {
    pub point: Point3,
    pub face_axis: Axis,
    pub face_sign: FaceSign,
}

impl BoundarySite {
    /// Outward unit normal as integer steps along the face axis.
    pub fn normal_step(&self) -> i32 {
        self.face_sign.step()
    }

    /// The unique interior neighbor of this boundary site.
    pub fn inner_neighbor(&self) -> Point3 {
        self.point.shifted(self.face_axis, -self.face_sign.step())
    }

    /// Tangential axes of the face, in increasing order.
    pub fn tangential_axes(&self) -> (Axis, Axis) {
        self.face_axis.others()
    }
}

/// All boundary sites in the canonical order: faces `1-, 1+, 2-, 2+, 3-, 3+`,
/// lexicographic by `(n1,n2,n3)` within each face. This order is fixed and
/// reused as the basis layout of the DtN matrix.
pub fn boundary_sites(paving: &Paving) -> Vec<BoundarySite> {
    let mut out = Vec::with_capacity(boundary_site_count(paving));
    for axis in Axis::ALL {
        for sign in [FaceSign::Minus, FaceSign::Plus] {
            let fixed = match sign {
                FaceSign::Minus => 0,
                FaceSign::Plus => paving.extent(axis) + 1,
            };
            let (ta, tb) = axis.others();
            // Lexicographic (n1,n2,n3) given that ta < tb as axes.
            for a in 1..=paving.extent(ta) {
                for b in 1..=paving.extent(tb) {
                    let mut p = Point3::new(0, 0, 0);
                    p = set_coord(p, axis, fixed);
                    p = set_coord(p, ta, a);
                    p = set_coord(p, tb, b);
                    out.push(BoundarySite { point: p, face_axis: axis, face_sign: sign });
                }
            }
        }
    }
    out
}

fn set_coord(mut p: Point3, axis: Axis, v: i32) -> Point3 {
    match axis {
        Axis::X1 => p.n1 = v,
        Axis::X2 => p.n2 = v,
        Axis::X3 => p.n3 = v,
    }
    p
}

/// `|boundary| = 2(R1 R2 + R2 R3 + R3 R1)`.
pub fn boundary_site_count(paving: &Paving) -> usize {
    let (r1, r2, r3) = (paving.r1 as usize, paving.r2 as usize, paving.r3 as usize);
    2 * (r1 * r2 + r2 * r3 + r3 * r1)
}

/// Classify a boundary point, returning its face labels, or `None` if the
/// point is not a boundary site of the paving.
pub fn classify_boundary(paving: &Paving, p: Point3) -> Option<BoundarySite> {
    for axis in Axis::ALL {
        let (ta, tb) = axis.others();
        let in_ta = (1..=paving.extent(ta)).contains(&p.coord(ta));
        let in_tb = (1..=paving.extent(tb)).contains(&p.coord(tb));
        if in_ta && in_tb {
            if p.coord(axis) == 0 {
                return Some(BoundarySite { point: p, face_axis: axis, face_sign: FaceSign::Minus });
            }
            if p.coord(axis) == paving.extent(axis) + 1 {
                return Some(BoundarySite { point: p, face_axis: axis, face_sign: FaceSign::Plus });
            }
        }
    }
    None
}

/// Cross product of complex 3-vectors.
pub fn cross(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Remove the normal component of a vector at a boundary site.
pub fn tangential_trace(v: [Complex64; 3], site: &BoundarySite) -> [Complex64; 3] {
    let mut out = v;
    out[site.face_axis.index()] = Complex64::ZERO;
    out
}

/// Tangential derivative `(u(n) - u(m)) ^ nu(n)` at a boundary site, where
/// `u_at_site` is the value at the boundary site and `u_at_inner` the value at
/// its interior neighbor. Normal components of the inputs do not affect the
/// result.
pub fn tangential_derivative(
    u_at_site: [Complex64; 3],
    u_at_inner: [Complex64; 3],
    site: &BoundarySite,
) -> [Complex64; 3] {
    let diff = [
        u_at_site[0] - u_at_inner[0],
        u_at_site[1] - u_at_inner[1],
        u_at_site[2] - u_at_inner[2],
    ];
    let mut nu = [Complex64::ZERO; 3];
    nu[site.face_axis.index()] = Complex64::new(site.normal_step() as f64, 0.0);
    cross(diff, nu)
}

/// Invert the tangential derivative: given `g = diff ^ nu`, recover the two
/// tangential components of `diff`. The normal slot of the result is zero
/// (it is not determined by `g`).
pub fn invert_tangential_derivative(g: [Complex64; 3], site: &BoundarySite) -> [Complex64; 3] {
    let s = site.normal_step() as f64;
    let mut d = [Complex64::ZERO; 3];
    match site.face_axis {
        // diff ^ (s e1) = s (0, d3, -d2)
        Axis::X1 => {
            d[2] = g[1] * s;
            d[1] = -g[2] * s;
        }
        // diff ^ (s e2) = s (-d3, 0, d1)
        Axis::X2 => {
            d[2] = -g[0] * s;
            d[0] = g[2] * s;
        }
        // diff ^ (s e3) = s (d2, -d1, 0)
        Axis::X3 => {
            d[1] = g[0] * s;
            d[0] = -g[1] * s;
        }
    }
    d
}

/// Position of a point relative to the anti-diagonal plane `n1 + n2 = p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneClass {
    /// `n1 + n2 < p`
    Minus,
    /// `n1 + n2 = p`
    Zero,
    /// `n1 + n2 > p`
    Plus,
}

pub fn plane_membership(n: Point3, p: i32) -> PlaneClass {
    match (n.n1 + n.n2).cmp(&p) {
        std::cmp::Ordering::Less => PlaneClass::Minus,
        std::cmp::Ordering::Equal => PlaneClass::Zero,
        std::cmp::Ordering::Greater => PlaneClass::Plus,
    }
}

/// Direction of a propagation cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeDirection {
    /// Sites reachable marching backward in `n1` (dependence).
    Backward,
    /// Sites reachable marching forward in `n1` (influence).
    Forward,
}

/// Which written form of the cone inequality to use.
///
/// The mixed form combines the transverse offsets as `-|dn2| + |dn3|`; the
/// symmetric form uses `-|dn2| - |dn3|`. Only the symmetric form matches the
/// one-cell-per-layer spread of the marching stencil; the propagation tests
/// select it, and it is the default everywhere else in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConeVariant {
    #[default]
    Symmetric,
    Mixed,
}

/// Cone membership test: is `m` inside the backward cone `C^-(apex)` or the
/// forward cone `C^+(apex)`?
pub fn cone_contains(apex: Point3, m: Point3, direction: ConeDirection, variant: ConeVariant) -> bool {
    let d2 = (apex.n2 - m.n2).abs();
    let d3 = (apex.n3 - m.n3).abs();
    let spread = match variant {
        ConeVariant::Symmetric => d2 + d3,
        ConeVariant::Mixed => d2 - d3,
    };
    match direction {
        ConeDirection::Backward => m.n1 <= apex.n1 - spread,
        ConeDirection::Forward => m.n1 >= apex.n1 + spread,
    }
}
