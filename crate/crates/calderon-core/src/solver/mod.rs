//! Forward solvers: the full Dirichlet boundary-value problem behind the DtN
//! map, the marching solver for the mixed problem, the windowed forward
//! recursion for the weighted special solutions, and the backward sweep that
//! rebuilds a solution from boundary data on the upper half of the lattice.

mod backward;
mod march;
mod mixed;

pub use backward::{propagate_backward, BoundaryValuePacket};
pub use march::{march_forward, MarchInit};
pub use mixed::{dense_mixed_matrix, solve_mixed, MixedBoundaryData};

use crate::boundary::{BoundaryLayout, TangentialData};
use crate::error::{CoreError, Result};
use crate::field::{Component, FieldKind, FieldWindow, LatticeField};
use crate::geometry::{Axis, Paving, Point3};
use crate::operators::{MaterialTensor, PotentialView, SpectralParameter};
use crate::tolerances::SINGULAR_REL;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

/// Coefficients of one curl row: `(curl v)_i = D_j v_k - D_k v_j` with
/// `(i,j,k)` a cyclic permutation, scaled by `1/(2i)`.
fn curl_row(i: Axis) -> [(Axis, Axis, f64); 2] {
    // (component axis, difference axis, sign)
    match i {
        Axis::X1 => [(Axis::X3, Axis::X2, 1.0), (Axis::X2, Axis::X3, -1.0)],
        Axis::X2 => [(Axis::X1, Axis::X3, 1.0), (Axis::X3, Axis::X1, -1.0)],
        Axis::X3 => [(Axis::X2, Axis::X1, 1.0), (Axis::X1, Axis::X2, -1.0)],
    }
}

/// The assembled interior system of the Dirichlet problem, with the boundary
/// unknowns eliminated into an affine right-hand-side builder.
pub struct DirichletSystem {
    paving: Paving,
    layout: Arc<BoundaryLayout>,
    lambda: SpectralParameter,
    matrix: DMatrix<Complex64>,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_adjoint: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    /// `(row, boundary dof, coefficient)` triplets: the boundary contribution
    /// to row `row` is `coeff * f[dof]`, moved to the right-hand side.
    boundary_coeffs: Vec<(usize, usize, Complex64)>,
    norm: f64,
    sigma_min: f64,
}

/// Row index of the scalar equation for `(site, block, axis)`.
fn row_index(paving: &Paving, n: Point3, kind: FieldKind, axis: Axis) -> usize {
    6 * paving.site_index(n) + Component::new(kind, axis).index()
}

/// Column index of the interior unknown `(site, component)`.
fn col_index(paving: &Paving, n: Point3, comp: Component) -> usize {
    6 * paving.site_index(n) + comp.index()
}

impl DirichletSystem {
    /// Assemble and factorize the interior system for an admissible potential.
    ///
    /// Rows are the six scalar equations `M uE = VH uH`, `M uH = -VE uE` at
    /// every interior site; Dirichlet boundary unknowns are substituted away,
    /// which leaves a square system in the `6 R1 R2 R3` interior unknowns.
    /// The stencil only ever reaches tangential components at boundary sites,
    /// so every boundary reference resolves to admissible data.
    pub fn assemble(
        potential: &impl PotentialView,
        lambda: SpectralParameter,
        layout: Arc<BoundaryLayout>,
    ) -> Result<DirichletSystem> {
        let paving = *potential.paving();
        let n_unknowns = 6 * paving.site_count();
        let mut matrix = DMatrix::<Complex64>::zeros(n_unknowns, n_unknowns);
        let mut boundary_coeffs = Vec::new();
        let half_i_inv = Complex64::new(0.0, -0.5); // 1/(2i)

        let mut add = |matrix: &mut DMatrix<Complex64>,
                       boundary: &mut Vec<(usize, usize, Complex64)>,
                       row: usize,
                       comp: Component,
                       q: Point3,
                       w: Complex64| {
            if paving.contains(q) {
                matrix[(row, col_index(&paving, q, comp))] += w;
            } else {
                let rank = layout
                    .rank(q)
                    .unwrap_or_else(|| panic!("stencil reached non-boundary exterior point {q}"));
                let site = layout.site(rank);
                assert_ne!(site.face_axis, comp.axis, "stencil reached a normal boundary component");
                boundary.push((row, layout.dof(rank, comp.kind, comp.axis), w));
            }
        };

        for n in paving.sites() {
            // E rows: (M uE)_i - VH_i uH_i = 0
            // H rows: (M uH)_i + VE_i uE_i = 0
            for (block, v_sign) in [(FieldKind::E, -1.0), (FieldKind::H, 1.0)] {
                for i in Axis::ALL {
                    let row = row_index(&paving, n, block, i);
                    for (comp_axis, diff_axis, sign) in curl_row(i) {
                        let comp = Component::new(block, comp_axis);
                        let w = half_i_inv * sign;
                        add(&mut matrix, &mut boundary_coeffs, row, comp, n.shifted(diff_axis, 1), w);
                        add(&mut matrix, &mut boundary_coeffs, row, comp, n.shifted(diff_axis, -1), -w);
                    }
                    let other = Component::new(block.other(), i);
                    let v_entry = potential.entry(other, n)?;
                    matrix[(row, col_index(&paving, n, other))] += v_entry * v_sign;
                }
            }
        }

        let norm = matrix.norm();
        let lu = nalgebra::LU::new(matrix.clone());
        let lu_adjoint = nalgebra::LU::new(matrix.adjoint());
        let sigma_min = estimate_sigma_min(&lu, &lu_adjoint, n_unknowns);
        Ok(DirichletSystem {
            paving,
            layout,
            lambda,
            matrix,
            lu,
            lu_adjoint,
            boundary_coeffs,
            norm,
            sigma_min,
        })
    }

    pub fn paving(&self) -> &Paving {
        &self.paving
    }

    pub fn layout(&self) -> &Arc<BoundaryLayout> {
        &self.layout
    }

    pub fn lambda(&self) -> SpectralParameter {
        self.lambda
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Frobenius norm of the assembled matrix.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Estimated smallest singular value of the assembled matrix.
    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn is_near_singular(&self) -> bool {
        self.sigma_min < SINGULAR_REL * self.norm
    }

    fn rhs(&self, f: &TangentialData) -> DVector<Complex64> {
        let mut rhs = DVector::zeros(self.matrix.nrows());
        for &(row, dof, w) in &self.boundary_coeffs {
            let fv = f.get_dof(dof);
            if fv != Complex64::ZERO {
                rhs[row] -= w * fv;
            }
        }
        rhs
    }

    fn field_from(&self, x: &DVector<Complex64>, f: &TangentialData) -> LatticeField {
        let mut field = LatticeField::new(self.paving);
        for n in self.paving.sites() {
            for comp in Component::ALL {
                field.set(comp, n, x[col_index(&self.paving, n, comp)]);
            }
        }
        for (rank, site) in self.layout.sites().iter().enumerate() {
            let (ta, tb) = site.tangential_axes();
            for kind in FieldKind::ALL {
                for axis in [ta, tb] {
                    field.set(
                        Component::new(kind, axis),
                        site.point,
                        f.get_dof(self.layout.dof(rank, kind, axis)),
                    );
                }
            }
        }
        field
    }

    /// Solve the Dirichlet problem for one admissible data vector.
    pub fn solve(&self, f: &TangentialData) -> Result<LatticeField> {
        if self.is_near_singular() {
            return Err(CoreError::SingularSystem { sigma_min: self.sigma_min, norm: self.norm });
        }
        let x = self
            .lu
            .solve(&self.rhs(f))
            .ok_or(CoreError::SingularSystem { sigma_min: 0.0, norm: self.norm })?;
        Ok(self.field_from(&x, f))
    }

    /// Solve for many data vectors against the shared factorization,
    /// in parallel.
    pub fn solve_many(&self, fs: &[TangentialData]) -> Result<Vec<LatticeField>> {
        if self.is_near_singular() {
            return Err(CoreError::SingularSystem { sigma_min: self.sigma_min, norm: self.norm });
        }
        fs.par_iter().map(|f| self.solve(f)).collect()
    }
}

/// Inverse-power estimate of the smallest singular value, using the two
/// factorizations of `A` and `A^H`. Returns 0 for an exactly singular
/// factorization.
fn estimate_sigma_min(
    lu: &nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_adjoint: &nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
) -> f64 {
    // Deterministic pseudo-random start vector.
    let mut state = 0x853c49e6748fea9bu64;
    let mut rand = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut v = DVector::from_fn(n, |_, _| Complex64::new(rand(), rand()));
    v /= Complex64::new(v.norm(), 0.0);
    let mut mu_prev = 0.0f64;
    for _ in 0..64 {
        // w = (A^H A)^{-1} v = A^{-1} (A^{-H} v)
        let y = match lu_adjoint.solve(&v) {
            Some(y) => y,
            None => return 0.0,
        };
        let w = match lu.solve(&y) {
            Some(w) => w,
            None => return 0.0,
        };
        let mu = w.norm();
        if !mu.is_finite() || mu == 0.0 {
            return 0.0;
        }
        v = w / Complex64::new(mu, 0.0);
        if (mu - mu_prev).abs() <= 1e-6 * mu {
            mu_prev = mu;
            break;
        }
        mu_prev = mu;
    }
    1.0 / mu_prev.sqrt()
}

/// Smallest singular value and Frobenius norm of the assembled Dirichlet
/// system for a material at a given spectral parameter. Callers treat
/// `sigma_min < SINGULAR_REL * norm` as a spectral hit.
pub fn eigenvalue_indicator(
    material: &MaterialTensor,
    lambda: SpectralParameter,
    layout: Arc<BoundaryLayout>,
) -> Result<(f64, f64)> {
    let v = crate::operators::potential_from_material(material, lambda);
    let system = DirichletSystem::assemble(&v, lambda, layout)?;
    Ok((system.sigma_min(), system.norm()))
}

/// Split of the assembled matrix as `A(lambda) = A_curl + lambda * D`: the
/// curl stencil is independent of `lambda`, and the zeroth-order block is
/// linear in it. Used to refine spectral hits.
fn pencil_parts(
    material: &MaterialTensor,
    layout: &Arc<BoundaryLayout>,
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let paving = *material.paving();
    let lambda_one = SpectralParameter::new(Complex64::ONE).unwrap();
    let v = crate::operators::potential_from_material(material, lambda_one);
    let system = DirichletSystem::assemble(&v, lambda_one, layout.clone()).unwrap();
    let a1 = system.matrix.clone();
    // D = A(1) - A(0); A(0) is the pure curl part. Rebuild it by zeroing the
    // diagonal zero-order block, which lives at the V coefficient positions.
    let mut d = DMatrix::<Complex64>::zeros(a1.nrows(), a1.ncols());
    for n in paving.sites() {
        for i in Axis::ALL {
            // E row couples uH_i with -VH_i = +lambda/mu_i.
            let row = row_index(&paving, n, FieldKind::E, i);
            let col = col_index(&paving, n, Component::new(FieldKind::H, i));
            d[(row, col)] = Complex64::ONE / material.mu(n, i);
            // H row couples uE_i with +VE_i = -lambda/eps_i.
            let row = row_index(&paving, n, FieldKind::H, i);
            let col = col_index(&paving, n, Component::new(FieldKind::E, i));
            d[(row, col)] = -Complex64::ONE / material.eps(n, i);
        }
    }
    let a_curl = a1 - &d;
    (a_curl, d)
}

/// Refine a spectral parameter toward the nearest true eigenvalue of the
/// Dirichlet system by shift-and-invert iteration on the linear pencil
/// `A_curl + lambda D`. Returns the refined eigenvalue.
pub fn refine_eigenvalue(
    material: &MaterialTensor,
    lambda0: Complex64,
    layout: &Arc<BoundaryLayout>,
) -> Result<Complex64> {
    let (a_curl, d) = pencil_parts(material, layout);
    let n = a_curl.nrows();
    let mut shift = lambda0;
    let mut state = 0xda3e39cb94b95bdbu64;
    let mut rand = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut x = DVector::from_fn(n, |_, _| Complex64::new(rand(), rand()));
    x /= Complex64::new(x.norm(), 0.0);
    for _ in 0..25 {
        let shifted = &a_curl + &d * shift;
        let lu = nalgebra::LU::new(shifted);
        let y = match lu.solve(&(&d * &x)) {
            Some(y) => y,
            None => break, // exactly singular: the shift is the eigenvalue
        };
        let ny = y.norm();
        if !ny.is_finite() || ny == 0.0 {
            break;
        }
        x = y / Complex64::new(ny, 0.0);
        // Least-squares update: minimize ||(A_curl + lambda D) x|| over lambda.
        let ax = &a_curl * &x;
        let dx = &d * &x;
        let denom = dx.dotc(&dx);
        if denom.norm() == 0.0 {
            break;
        }
        let next = -(dx.dotc(&ax)) / denom;
        if (next - shift).norm() <= 1e-14 * (1.0 + shift.norm()) {
            shift = next;
            break;
        }
        shift = next;
    }
    Ok(shift)
}

/// Residual of the six scalar field equations at one interior site:
/// `M uE - VH uH` and `M uH + VE uE`.
pub fn eq1_residual(
    window: &FieldWindow,
    potential: &impl PotentialView,
    n: Point3,
) -> Result<[Complex64; 6]> {
    let me = crate::operators::curl(window, FieldKind::E, n)?;
    let mh = crate::operators::curl(window, FieldKind::H, n)?;
    let mut out = [Complex64::ZERO; 6];
    for i in Axis::ALL {
        let ve = potential.entry(Component::new(FieldKind::E, i), n)?;
        let vh = potential.entry(Component::new(FieldKind::H, i), n)?;
        let ue = window.get(Component::new(FieldKind::E, i), n)?;
        let uh = window.get(Component::new(FieldKind::H, i), n)?;
        out[i.index()] = me[i.index()] - vh * uh;
        out[3 + i.index()] = mh[i.index()] + ve * ue;
    }
    Ok(out)
}

/// Largest residual of the field equations over all interior sites, scaled by
/// the largest field magnitude.
pub fn max_relative_residual(
    field: &LatticeField,
    potential: &impl PotentialView,
) -> Result<f64> {
    let paving = *field.paving();
    let mut max_res = 0.0f64;
    let mut max_val = 0.0f64;
    for n in paving.sites() {
        for comp in Component::ALL {
            max_val = max_val.max(field.get(comp, n)?.norm());
        }
    }
    for n in paving.sites() {
        let r = eq1_residual(field.window(), potential, n)?;
        for v in r {
            max_res = max_res.max(v.norm());
        }
    }
    Ok(max_res / max_val.max(f64::MIN_POSITIVE))
}
