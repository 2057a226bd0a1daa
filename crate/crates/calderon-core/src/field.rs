//! Six-component complex lattice fields.
//!
//! A field assigns to each lattice site a pair of complex 3-vectors (the E and
//! H parts). Buffers store explicit "undefined" markers rather than zeros for
//! absent components: reading an undefined value is a bug and fails loudly.

use crate::error::{CoreError, Result};
use crate::geometry::{classify_boundary, Axis, BoundarySite, Paving, Point3};
use num_complex::Complex64;

/// Which of the two field blocks a component belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    E,
    H,
}

impl FieldKind {
    pub const ALL: [FieldKind; 2] = [FieldKind::E, FieldKind::H];

    pub fn other(self) -> FieldKind {
        match self {
            FieldKind::E => FieldKind::H,
            FieldKind::H => FieldKind::E,
        }
    }
}

/// One of the six scalar components `(E|H, axis)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub kind: FieldKind,
    pub axis: Axis,
}

impl Component {
    pub const fn new(kind: FieldKind, axis: Axis) -> Self {
        Component { kind, axis }
    }

    /// All six components, E block first, axes in order.
    pub const ALL: [Component; 6] = [
        Component::new(FieldKind::E, Axis::X1),
        Component::new(FieldKind::E, Axis::X2),
        Component::new(FieldKind::E, Axis::X3),
        Component::new(FieldKind::H, Axis::X1),
        Component::new(FieldKind::H, Axis::X2),
        Component::new(FieldKind::H, Axis::X3),
    ];

    /// Flat index 0..6 (E1,E2,E3,H1,H2,H3).
    pub fn index(self) -> usize {
        let base = match self.kind {
            FieldKind::E => 0,
            FieldKind::H => 3,
        };
        base + self.axis.index()
    }

    pub fn from_index(i: usize) -> Component {
        Component::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self.index() {
            0 => "E1",
            1 => "E2",
            2 => "E3",
            3 => "H1",
            4 => "H2",
            5 => "H3",
            _ => unreachable!(),
        }
    }
}

/// Inclusive integer box in `Z^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Box3 {
    pub lo: Point3,
    pub hi: Point3,
}

impl Box3 {
    pub fn new(lo: Point3, hi: Point3) -> Box3 {
        assert!(lo.n1 <= hi.n1 && lo.n2 <= hi.n2 && lo.n3 <= hi.n3);
        Box3 { lo, hi }
    }

    /// Bounding box of the paving together with its boundary layer.
    pub fn hull(paving: &Paving) -> Box3 {
        Box3::new(Point3::new(0, 0, 0), Point3::new(paving.r1 + 1, paving.r2 + 1, paving.r3 + 1))
    }

    pub fn contains(&self, p: Point3) -> bool {
        (self.lo.n1..=self.hi.n1).contains(&p.n1)
            && (self.lo.n2..=self.hi.n2).contains(&p.n2)
            && (self.lo.n3..=self.hi.n3).contains(&p.n3)
    }

    pub fn dims(&self) -> [usize; 3] {
        [
            (self.hi.n1 - self.lo.n1 + 1) as usize,
            (self.hi.n2 - self.lo.n2 + 1) as usize,
            (self.hi.n3 - self.lo.n3 + 1) as usize,
        ]
    }

    pub fn cell_count(&self) -> usize {
        let d = self.dims();
        d[0] * d[1] * d[2]
    }

    fn offset(&self, p: Point3) -> usize {
        let d = self.dims();
        let i = (p.n1 - self.lo.n1) as usize;
        let j = (p.n2 - self.lo.n2) as usize;
        let k = (p.n3 - self.lo.n3) as usize;
        (i * d[1] + j) * d[2] + k
    }

    pub fn points(&self) -> impl Iterator<Item = Point3> + '_ {
        let (lo, hi) = (self.lo, self.hi);
        (lo.n1..=hi.n1).flat_map(move |n1| {
            (lo.n2..=hi.n2).flat_map(move |n2| (lo.n3..=hi.n3).map(move |n3| Point3::new(n1, n2, n3)))
        })
    }
}

/// Dense six-component buffer over an integer box, with per-cell defined
/// markers.
#[derive(Debug, Clone)]
pub struct FieldWindow {
    bounds: Box3,
    values: Vec<Complex64>,
    defined: Vec<bool>,
}

impl FieldWindow {
    pub fn new(bounds: Box3) -> FieldWindow {
        let cells = bounds.cell_count() * 6;
        FieldWindow { bounds, values: vec![Complex64::ZERO; cells], defined: vec![false; cells] }
    }

    pub fn bounds(&self) -> Box3 {
        self.bounds
    }

    fn slot(&self, comp: Component, p: Point3) -> Option<usize> {
        if !self.bounds.contains(p) {
            return None;
        }
        Some(self.bounds.offset(p) * 6 + comp.index())
    }

    /// Read a value, failing loudly if the component is undefined there.
    pub fn get(&self, comp: Component, p: Point3) -> Result<Complex64> {
        match self.slot(comp, p) {
            Some(s) if self.defined[s] => Ok(self.values[s]),
            _ => Err(CoreError::MissingValue { component: comp.name(), point: p }),
        }
    }

    /// Read a value that may legitimately be absent.
    pub fn try_get(&self, comp: Component, p: Point3) -> Option<Complex64> {
        self.slot(comp, p).filter(|&s| self.defined[s]).map(|s| self.values[s])
    }

    pub fn is_defined(&self, comp: Component, p: Point3) -> bool {
        self.slot(comp, p).map(|s| self.defined[s]).unwrap_or(false)
    }

    pub fn set(&mut self, comp: Component, p: Point3, v: Complex64) {
        let s = self
            .slot(comp, p)
            .unwrap_or_else(|| panic!("write outside window: {} at {}", comp.name(), p));
        self.values[s] = v;
        self.defined[s] = true;
    }

    /// Read the three components of one block as a vector, requiring all
    /// three to be defined.
    pub fn get_vec(&self, kind: FieldKind, p: Point3) -> Result<[Complex64; 3]> {
        Ok([
            self.get(Component::new(kind, Axis::X1), p)?,
            self.get(Component::new(kind, Axis::X2), p)?,
            self.get(Component::new(kind, Axis::X3), p)?,
        ])
    }

    /// Vector read that substitutes zero for the undefined normal slot at
    /// boundary sites. Only valid when the undefined slot does not matter
    /// (tangential operations).
    pub fn get_vec_lenient(&self, kind: FieldKind, p: Point3) -> [Complex64; 3] {
        std::array::from_fn(|i| {
            self.try_get(Component::new(kind, Axis::from_index(i)), p).unwrap_or(Complex64::ZERO)
        })
    }
}

/// A field in the state space over the paving: each component `(kind, j)` is
/// defined on the interior and on every boundary face except the two faces
/// normal to axis `j` (where that component would be the normal one).
#[derive(Debug, Clone)]
pub struct LatticeField {
    paving: Paving,
    window: FieldWindow,
}

impl LatticeField {
    /// An empty (all-undefined) field over the paving hull.
    pub fn new(paving: Paving) -> LatticeField {
        LatticeField { paving, window: FieldWindow::new(Box3::hull(&paving)) }
    }

    pub fn paving(&self) -> &Paving {
        &self.paving
    }

    /// Whether component `comp` belongs to the state space at `p`.
    pub fn in_domain(&self, comp: Component, p: Point3) -> bool {
        if self.paving.contains(p) {
            return true;
        }
        match classify_boundary(&self.paving, p) {
            Some(site) => site.face_axis != comp.axis,
            None => false,
        }
    }

    pub fn get(&self, comp: Component, p: Point3) -> Result<Complex64> {
        self.window.get(comp, p)
    }

    pub fn try_get(&self, comp: Component, p: Point3) -> Option<Complex64> {
        self.window.try_get(comp, p)
    }

    pub fn set(&mut self, comp: Component, p: Point3, v: Complex64) {
        debug_assert!(self.in_domain(comp, p), "{} undefined at {}", comp.name(), p);
        self.window.set(comp, p, v);
    }

    pub fn window(&self) -> &FieldWindow {
        &self.window
    }

    pub fn window_mut(&mut self) -> &mut FieldWindow {
        &mut self.window
    }

    /// Tangential trace vector of one block at a boundary site (normal slot
    /// zero).
    pub fn trace(&self, kind: FieldKind, site: &BoundarySite) -> Result<[Complex64; 3]> {
        let (ta, tb) = site.tangential_axes();
        let mut out = [Complex64::ZERO; 3];
        out[ta.index()] = self.get(Component::new(kind, ta), site.point)?;
        out[tb.index()] = self.get(Component::new(kind, tb), site.point)?;
        Ok(out)
    }

    /// Tangential derivative of one block at a boundary site.
    pub fn tangential_derivative(&self, kind: FieldKind, site: &BoundarySite) -> Result<[Complex64; 3]> {
        let at_site = self.trace(kind, site)?;
        let m = site.inner_neighbor();
        let (ta, tb) = site.tangential_axes();
        let mut at_inner = [Complex64::ZERO; 3];
        at_inner[ta.index()] = self.get(Component::new(kind, ta), m)?;
        at_inner[tb.index()] = self.get(Component::new(kind, tb), m)?;
        Ok(crate::geometry::tangential_derivative(at_site, at_inner, site))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_reads_fail_loudly_when_undefined() {
        let b = Box3::new(Point3::new(0, 0, 0), Point3::new(2, 2, 2));
        let mut w = FieldWindow::new(b);
        let comp = Component::new(FieldKind::E, Axis::X2);
        let p = Point3::new(1, 1, 1);
        assert!(w.get(comp, p).is_err());
        w.set(comp, p, Complex64::new(2.0, -1.0));
        assert_eq!(w.get(comp, p).unwrap(), Complex64::new(2.0, -1.0));
        // Outside the window is also a missing value.
        assert!(w.get(comp, Point3::new(5, 0, 0)).is_err());
    }

    #[test]
    fn state_space_excludes_normal_components_on_own_faces() {
        let paving = Paving::new(2, 2, 2).unwrap();
        let f = LatticeField::new(paving);
        let e1 = Component::new(FieldKind::E, Axis::X1);
        let e2 = Component::new(FieldKind::E, Axis::X2);
        // Face normal to axis 1.
        let p = Point3::new(0, 1, 2);
        assert!(!f.in_domain(e1, p));
        assert!(f.in_domain(e2, p));
        // Interior holds everything.
        assert!(f.in_domain(e1, Point3::new(1, 1, 1)));
        // Edge of the hull is outside the domain entirely.
        assert!(!f.in_domain(e2, Point3::new(0, 0, 1)));
    }
}
