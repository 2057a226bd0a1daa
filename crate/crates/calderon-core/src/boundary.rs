//! Canonical layout of admissible boundary data and the tangential data
//! vectors built on it.
//!
//! Admissible data assigns to every boundary site a complex 3-vector per field
//! block, orthogonal to the face normal. Only the two tangential scalars per
//! block are stored. The degree-of-freedom order is: boundary sites in the
//! canonical face-major order, and per site the four scalars
//! `[E_ta, E_tb, H_ta, H_tb]` where `ta < tb` are the tangential axes of the
//! face. This layout is the `face-major-lex-v1` basis of the DtN matrix files.

use crate::error::{CoreError, Result};
use crate::field::{Component, FieldKind, LatticeField};
use crate::geometry::{boundary_sites, Axis, BoundarySite, FaceSign, Paving, Point3};
use nalgebra::DVector;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

/// Precomputed boundary enumeration and degree-of-freedom indexing for one
/// paving.
#[derive(Debug, Clone)]
pub struct BoundaryLayout {
    paving: Paving,
    sites: Vec<BoundarySite>,
    rank_of: HashMap<Point3, usize>,
}

impl BoundaryLayout {
    pub fn new(paving: Paving) -> Arc<BoundaryLayout> {
        let sites = boundary_sites(&paving);
        let rank_of = sites.iter().enumerate().map(|(i, s)| (s.point, i)).collect();
        Arc::new(BoundaryLayout { paving, sites, rank_of })
    }

    pub fn paving(&self) -> &Paving {
        &self.paving
    }

    pub fn sites(&self) -> &[BoundarySite] {
        &self.sites
    }

    /// Dimension of the admissible data space for both blocks together.
    pub fn dof_count(&self) -> usize {
        4 * self.sites.len()
    }

    pub fn rank(&self, p: Point3) -> Option<usize> {
        self.rank_of.get(&p).copied()
    }

    pub fn site(&self, rank: usize) -> &BoundarySite {
        &self.sites[rank]
    }

    /// Degree-of-freedom index of a tangential scalar at a boundary site.
    /// Panics if `axis` is the face normal.
    pub fn dof(&self, rank: usize, kind: FieldKind, axis: Axis) -> usize {
        let site = &self.sites[rank];
        let (ta, tb) = site.tangential_axes();
        let slot = match axis {
            a if a == ta => 0,
            a if a == tb => 1,
            _ => panic!("axis {:?} is normal at {}", axis, site.point),
        };
        let block = match kind {
            FieldKind::E => 0,
            FieldKind::H => 2,
        };
        4 * rank + block + slot
    }

    /// Inverse of `dof`: the boundary-site rank and component of an index.
    pub fn dof_component(&self, dof: usize) -> (usize, Component) {
        let rank = dof / 4;
        let within = dof % 4;
        let site = &self.sites[rank];
        let (ta, tb) = site.tangential_axes();
        let kind = if within < 2 { FieldKind::E } else { FieldKind::H };
        let axis = if within % 2 == 0 { ta } else { tb };
        (rank, Component::new(kind, axis))
    }

    /// All dof indices whose boundary site satisfies a predicate.
    pub fn dofs_where<F: Fn(&BoundarySite) -> bool>(&self, pred: F) -> Vec<usize> {
        let mut out = Vec::new();
        for (rank, site) in self.sites.iter().enumerate() {
            if pred(site) {
                out.extend(4 * rank..4 * rank + 4);
            }
        }
        out
    }

    /// Dofs on the face with the given axis and sign.
    pub fn face_dofs(&self, axis: Axis, sign: FaceSign) -> Vec<usize> {
        self.dofs_where(|s| s.face_axis == axis && s.face_sign == sign)
    }
}

/// Admissible tangential data for both field blocks in the canonical layout.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentialData {
    layout: Arc<BoundaryLayout>,
    values: DVector<Complex64>,
}

impl TangentialData {
    pub fn zero(layout: Arc<BoundaryLayout>) -> TangentialData {
        let n = layout.dof_count();
        TangentialData { layout, values: DVector::zeros(n) }
    }

    pub fn from_vector(layout: Arc<BoundaryLayout>, values: DVector<Complex64>) -> Result<TangentialData> {
        if values.len() != layout.dof_count() {
            return Err(CoreError::Validation(format!(
                "tangential data needs {} entries, got {}",
                layout.dof_count(),
                values.len()
            )));
        }
        Ok(TangentialData { layout, values })
    }

    /// Basis vector with a one in the given dof.
    pub fn basis(layout: Arc<BoundaryLayout>, dof: usize) -> TangentialData {
        let mut data = TangentialData::zero(layout);
        data.values[dof] = Complex64::ONE;
        data
    }

    pub fn layout(&self) -> &Arc<BoundaryLayout> {
        &self.layout
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.values
    }

    pub fn vector_mut(&mut self) -> &mut DVector<Complex64> {
        &mut self.values
    }

    pub fn get_dof(&self, dof: usize) -> Complex64 {
        self.values[dof]
    }

    pub fn set_dof(&mut self, dof: usize, v: Complex64) {
        self.values[dof] = v;
    }

    /// Value of a tangential component at a boundary point.
    pub fn at(&self, point: Point3, comp: Component) -> Result<Complex64> {
        let rank = self
            .layout
            .rank(point)
            .ok_or_else(|| CoreError::Validation(format!("{point} is not a boundary site")))?;
        Ok(self.values[self.layout.dof(rank, comp.kind, comp.axis)])
    }

    pub fn set_at(&mut self, point: Point3, comp: Component, v: Complex64) {
        let rank = self.layout.rank(point).expect("boundary site");
        let dof = self.layout.dof(rank, comp.kind, comp.axis);
        self.values[dof] = v;
    }

    /// Tangential 3-vector of one block at a boundary site (normal slot
    /// zero).
    pub fn vec3(&self, rank: usize, kind: FieldKind) -> [Complex64; 3] {
        let site = self.layout.site(rank);
        let (ta, tb) = site.tangential_axes();
        let mut out = [Complex64::ZERO; 3];
        out[ta.index()] = self.values[self.layout.dof(rank, kind, ta)];
        out[tb.index()] = self.values[self.layout.dof(rank, kind, tb)];
        out
    }

    /// Dirichlet traces of a solved field.
    pub fn dirichlet_of(layout: Arc<BoundaryLayout>, field: &LatticeField) -> Result<TangentialData> {
        let mut data = TangentialData::zero(layout.clone());
        for (rank, site) in layout.sites().iter().enumerate() {
            for kind in FieldKind::ALL {
                let (ta, tb) = site.tangential_axes();
                for axis in [ta, tb] {
                    let v = field.get(Component::new(kind, axis), site.point)?;
                    data.values[layout.dof(rank, kind, axis)] = v;
                }
            }
        }
        Ok(data)
    }

    /// Tangential-derivative traces of a solved field. The output of the
    /// derivative at a site is again orthogonal to the normal, so it lives in
    /// the same layout.
    pub fn neumann_of(layout: Arc<BoundaryLayout>, field: &LatticeField) -> Result<TangentialData> {
        let mut data = TangentialData::zero(layout.clone());
        for (rank, site) in layout.sites().iter().enumerate() {
            for kind in FieldKind::ALL {
                let g = field.tangential_derivative(kind, site)?;
                let (ta, tb) = site.tangential_axes();
                for axis in [ta, tb] {
                    data.values[layout.dof(rank, kind, axis)] = g[axis.index()];
                }
            }
        }
        Ok(data)
    }

    /// Zero out every dof outside the given set.
    pub fn restricted_to(&self, dofs: &[usize]) -> TangentialData {
        let mut out = TangentialData::zero(self.layout.clone());
        for &d in dofs {
            out.values[d] = self.values[d];
        }
        out
    }

    /// Dof indices carrying an exactly nonzero value.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i] != Complex64::ZERO).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dof_round_trip_and_counts() {
        let paving = Paving::new(2, 3, 4).unwrap();
        let layout = BoundaryLayout::new(paving);
        assert_eq!(layout.dof_count(), 4 * 52);
        for dof in 0..layout.dof_count() {
            let (rank, comp) = layout.dof_component(dof);
            assert_eq!(layout.dof(rank, comp.kind, comp.axis), dof);
        }
    }

    #[test]
    fn face_restriction_counts() {
        let paving = Paving::new(3, 4, 2).unwrap();
        let layout = BoundaryLayout::new(paving);
        let minus1 = layout.face_dofs(Axis::X1, FaceSign::Minus);
        assert_eq!(minus1.len(), 4 * (4 * 2) as usize);
        let all: usize = Axis::ALL
            .iter()
            .flat_map(|&a| [FaceSign::Minus, FaceSign::Plus].map(|s| layout.face_dofs(a, s).len()))
            .sum();
        assert_eq!(all, layout.dof_count());
    }
}
