//! Discrete difference and curl operators, the isotropic Maxwell operator,
//! and material/potential conversions.
//!
//! The centered difference is `D_j u(n) = u(n+e_j) - u(n-e_j)` and the curl is
//!
//! ```text
//! M v = (2i)^{-1} (-D3 v2 + D2 v3,  D3 v1 - D1 v3,  -D2 v1 + D1 v2).
//! ```
//!
//! The isotropic operator acts block-wise as `H0 u = (M uH, -M uE)`, and the
//! material enters through the diagonal multiplier `V = -lambda D^{-1}` on the
//! box (extended by the identity outside it).

use crate::error::{CoreError, Result};
use crate::field::{Component, FieldKind, FieldWindow};
use crate::geometry::{Axis, Paving, Point3};
use num_complex::Complex64;
use std::sync::atomic::{AtomicU64, Ordering};

/// Nonzero spectral parameter of the boundary-value problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter(Complex64);

impl SpectralParameter {
    pub fn new(lambda: Complex64) -> Result<SpectralParameter> {
        if lambda == Complex64::ZERO {
            return Err(CoreError::Validation(
                "the spectral parameter must be nonzero: at lambda = 0 the boundary data carry no material information".into(),
            ));
        }
        Ok(SpectralParameter(lambda))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// Centered difference of one component along one axis.
pub fn difference(buffer: &FieldWindow, comp: Component, n: Point3, axis: Axis) -> Result<Complex64> {
    Ok(buffer.get(comp, n.shifted(axis, 1))? - buffer.get(comp, n.shifted(axis, -1))?)
}

/// Discrete curl of one three-component block at a site.
pub fn curl(buffer: &FieldWindow, kind: FieldKind, n: Point3) -> Result<[Complex64; 3]> {
    let d = |axis_of: Axis, along: Axis| -> Result<Complex64> {
        difference(buffer, Component::new(kind, axis_of), n, along)
    };
    let half_i_inv = Complex64::new(0.0, -0.5); // 1/(2i)
    Ok([
        half_i_inv * (-d(Axis::X2, Axis::X3)? + d(Axis::X3, Axis::X2)?),
        half_i_inv * (d(Axis::X1, Axis::X3)? - d(Axis::X3, Axis::X1)?),
        half_i_inv * (-d(Axis::X1, Axis::X2)? + d(Axis::X2, Axis::X1)?),
    ])
}

/// The isotropic Maxwell operator at a site: `(M uH, -M uE)`.
pub fn apply_h0(buffer: &FieldWindow, n: Point3) -> Result<[Complex64; 6]> {
    let mh = curl(buffer, FieldKind::H, n)?;
    let me = curl(buffer, FieldKind::E, n)?;
    Ok([mh[0], mh[1], mh[2], -me[0], -me[1], -me[2]])
}

/// Read access to a (possibly partially known) diagonal potential. Lookups
/// outside the box always return the identity value 1.
pub trait PotentialView {
    fn paving(&self) -> &Paving;

    /// Value of the diagonal entry for `comp` at `n`.
    fn entry(&self, comp: Component, n: Point3) -> Result<Complex64>;
}

/// Per-site diagonal material tensor (permittivity and permeability
/// diagonals), with constant background entries outside the box.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialTensor {
    paving: Paving,
    /// Site-major storage, six entries per site: eps1..3, mu1..3.
    entries: Vec<[Complex64; 6]>,
    pub background_eps: [f64; 3],
    pub background_mu: [f64; 3],
}

impl MaterialTensor {
    pub fn new(paving: Paving, entries: Vec<[Complex64; 6]>) -> Result<MaterialTensor> {
        if entries.len() != paving.site_count() {
            return Err(CoreError::Validation(format!(
                "material needs {} sites, got {}",
                paving.site_count(),
                entries.len()
            )));
        }
        for (idx, site_entries) in entries.iter().enumerate() {
            for (c, &v) in site_entries.iter().enumerate() {
                if v == Complex64::ZERO {
                    let point = paving.sites().nth(idx).unwrap();
                    return Err(CoreError::ZeroEntry { component: material_slot_name(c), point });
                }
            }
        }
        Ok(MaterialTensor { paving, entries, background_eps: [1.0; 3], background_mu: [1.0; 3] })
    }

    /// Homogeneous unit medium.
    pub fn identity(paving: Paving) -> MaterialTensor {
        let entries = vec![[Complex64::ONE; 6]; paving.site_count()];
        MaterialTensor::new(paving, entries).expect("identity entries are nonzero")
    }

    pub fn paving(&self) -> &Paving {
        &self.paving
    }

    pub fn eps(&self, n: Point3, axis: Axis) -> Complex64 {
        self.entries[self.paving.site_index(n)][axis.index()]
    }

    pub fn mu(&self, n: Point3, axis: Axis) -> Complex64 {
        self.entries[self.paving.site_index(n)][3 + axis.index()]
    }

    pub fn entries(&self) -> &[[Complex64; 6]] {
        &self.entries
    }

    /// True when every entry is positive real within a relative tolerance.
    pub fn is_physical(&self) -> bool {
        self.entries.iter().flatten().all(|v| v.re > 0.0 && v.im.abs() <= 1e-9 * v.norm())
    }

    /// Largest relative entry-wise deviation from another tensor on the same
    /// paving.
    pub fn max_relative_error(&self, other: &MaterialTensor) -> f64 {
        assert_eq!(self.paving, other.paving);
        self.entries
            .iter()
            .zip(&other.entries)
            .flat_map(|(a, b)| a.iter().zip(b.iter()))
            .map(|(a, b)| (a - b).norm() / b.norm().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

fn material_slot_name(c: usize) -> &'static str {
    ["eps1", "eps2", "eps3", "mu1", "mu2", "mu3"][c]
}

/// Admissible diagonal potential: six invertible complex entries per interior
/// site, implicitly the identity outside the box.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPotential {
    paving: Paving,
    /// Site-major storage, component order E1,E2,E3,H1,H2,H3.
    entries: Vec<[Complex64; 6]>,
}

impl DiagonalPotential {
    pub fn new(paving: Paving, entries: Vec<[Complex64; 6]>) -> Result<DiagonalPotential> {
        if entries.len() != paving.site_count() {
            return Err(CoreError::Validation(format!(
                "potential needs {} sites, got {}",
                paving.site_count(),
                entries.len()
            )));
        }
        for (idx, site_entries) in entries.iter().enumerate() {
            for (c, &v) in site_entries.iter().enumerate() {
                if v == Complex64::ZERO {
                    let point = paving.sites().nth(idx).unwrap();
                    return Err(CoreError::ZeroEntry { component: Component::from_index(c).name(), point });
                }
            }
        }
        Ok(DiagonalPotential { paving, entries })
    }

    /// The potential that is the identity everywhere (used for the
    /// medium-independent boundary constructions).
    pub fn free_space(paving: Paving) -> DiagonalPotential {
        DiagonalPotential { paving, entries: vec![[Complex64::ONE; 6]; paving.site_count()] }
    }

    pub fn entries(&self) -> &[[Complex64; 6]] {
        &self.entries
    }
}

impl PotentialView for DiagonalPotential {
    fn paving(&self) -> &Paving {
        &self.paving
    }

    fn entry(&self, comp: Component, n: Point3) -> Result<Complex64> {
        if self.paving.contains(n) {
            Ok(self.entries[self.paving.site_index(n)][comp.index()])
        } else {
            Ok(Complex64::ONE)
        }
    }
}

/// Wrapper that counts every potential read. Test suites use it to verify
/// that the reconstruction path never touches the true potential.
pub struct TrackedPotential<'a> {
    inner: &'a DiagonalPotential,
    reads: AtomicU64,
}

impl<'a> TrackedPotential<'a> {
    pub fn new(inner: &'a DiagonalPotential) -> TrackedPotential<'a> {
        TrackedPotential { inner, reads: AtomicU64::new(0) }
    }

    pub fn read_count(&self) -> u64 {
        self.reads.load(Ordering::SeqCst)
    }
}

impl PotentialView for TrackedPotential<'_> {
    fn paving(&self) -> &Paving {
        self.inner.paving()
    }

    fn entry(&self, comp: Component, n: Point3) -> Result<Complex64> {
        self.reads.fetch_add(1, Ordering::SeqCst);
        self.inner.entry(comp, n)
    }
}

/// `V = -lambda D^{-1}` on the box: `V^E_j = -lambda/eps_j`,
/// `V^H_j = -lambda/mu_j`.
pub fn potential_from_material(m: &MaterialTensor, lambda: SpectralParameter) -> DiagonalPotential {
    let l = lambda.value();
    let entries = m
        .entries()
        .iter()
        .map(|site| std::array::from_fn(|c| -l / site[c]))
        .collect();
    DiagonalPotential::new(*m.paving(), entries)
        .expect("nonzero lambda over nonzero material entries is nonzero")
}

/// Invert `potential_from_material`: `eps_j = -lambda/V^E_j`,
/// `mu_j = -lambda/V^H_j`.
pub fn material_from_potential(v: &DiagonalPotential, lambda: SpectralParameter) -> MaterialTensor {
    let l = lambda.value();
    let entries = v
        .entries()
        .iter()
        .map(|site| std::array::from_fn(|c| -l / site[c]))
        .collect();
    MaterialTensor::new(*v.paving(), entries)
        .expect("nonzero lambda over nonzero potential entries is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Box3;
    use proptest::prelude::*;

    fn window_with<F: Fn(Point3) -> [Complex64; 6]>(lo: i32, hi: i32, f: F) -> FieldWindow {
        let b = Box3::new(Point3::new(lo, lo, lo), Point3::new(hi, hi, hi));
        let mut w = FieldWindow::new(b);
        for p in b.points() {
            let vals = f(p);
            for comp in Component::ALL {
                w.set(comp, p, vals[comp.index()]);
            }
        }
        w
    }

    #[test]
    fn difference_on_linear_and_constant_fields() {
        let w = window_with(-2, 2, |p| {
            let mut v = [Complex64::ZERO; 6];
            v[0] = Complex64::new(3.5, -1.0); // constant E1
            v[1] = Complex64::new(p.n2 as f64, 0.0); // linear E2
            v
        });
        let n = Point3::new(0, 0, 0);
        let e1 = Component::new(FieldKind::E, Axis::X1);
        let e2 = Component::new(FieldKind::E, Axis::X2);
        assert_eq!(difference(&w, e1, n, Axis::X1).unwrap(), Complex64::ZERO);
        assert_eq!(difference(&w, e2, n, Axis::X2).unwrap(), Complex64::new(2.0, 0.0));
        // i^{n3} along axis 3: direct evaluation of both terms.
        let w2 = window_with(-2, 2, |p| {
            let mut v = [Complex64::ZERO; 6];
            v[2] = Complex64::i().powi(p.n3);
            v
        });
        let e3 = Component::new(FieldKind::E, Axis::X3);
        let got = difference(&w2, e3, n, Axis::X3).unwrap();
        let expected = Complex64::i().powi(1) - Complex64::i().powi(-1);
        assert!((got - expected).norm() < 1e-15);
        // Missing neighbor fails loudly.
        assert!(difference(&w, e1, Point3::new(2, 0, 0), Axis::X1).is_err());
    }

    #[test]
    fn curl_of_constant_vanishes_and_stencil_example() {
        let w = window_with(-2, 2, |_| [Complex64::new(1.0, 2.0); 6]);
        let n = Point3::new(0, 0, 0);
        assert_eq!(curl(&w, FieldKind::E, n).unwrap(), [Complex64::ZERO; 3]);

        // v = (0,0,n2): first component (2i)^{-1} D2 v3 = (2i)^{-1} * 2 = -i.
        let w = window_with(-2, 2, |p| {
            let mut v = [Complex64::ZERO; 6];
            v[2] = Complex64::new(p.n2 as f64, 0.0);
            v
        });
        let got = curl(&w, FieldKind::E, n).unwrap();
        assert!((got[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(got[1], Complex64::ZERO);
        assert_eq!(got[2], Complex64::ZERO);
    }

    #[test]
    fn curl_of_discrete_gradient_vanishes() {
        // Discrete gradient field v_j(n) = phi(n+e_j) - phi(n-e_j) for a
        // random scalar phi; the centered curl of a centered gradient is
        // identically zero because the mixed differences commute.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rand = move || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let b = Box3::new(Point3::new(-3, -3, -3), Point3::new(3, 3, 3));
        let mut phi = std::collections::HashMap::new();
        for p in b.points() {
            phi.insert(p, Complex64::new(rand(), rand()));
        }
        let inner = Box3::new(Point3::new(-2, -2, -2), Point3::new(2, 2, 2));
        let mut w = FieldWindow::new(inner);
        for p in inner.points() {
            for axis in Axis::ALL {
                let v = phi[&p.shifted(axis, 1)] - phi[&p.shifted(axis, -1)];
                w.set(Component::new(FieldKind::E, axis), p, v);
            }
        }
        for p in Box3::new(Point3::new(-1, -1, -1), Point3::new(1, 1, 1)).points() {
            let c = curl(&w, FieldKind::E, p).unwrap();
            for comp in c {
                assert!(comp.norm() < 1e-13, "curl of gradient at {p} = {comp}");
            }
        }
    }

    #[test]
    fn h0_block_structure() {
        let w = window_with(-2, 2, |p| {
            let mut v = [Complex64::ZERO; 6];
            // E block arbitrary, H block zero.
            v[0] = Complex64::new(p.n2 as f64, p.n3 as f64);
            v[1] = Complex64::new(p.n1 as f64, 0.0);
            v[2] = Complex64::new(0.0, p.n1 as f64);
            v
        });
        let out = apply_h0(&w, Point3::new(0, 0, 0)).unwrap();
        // E part of the output is M uH = 0; H part is -M uE.
        assert_eq!(&out[0..3], &[Complex64::ZERO; 3]);
        assert!(out[3..].iter().any(|v| *v != Complex64::ZERO));
    }

    #[test]
    fn material_conversions_examples() {
        let paving = Paving::new(2, 2, 2).unwrap();
        let lambda = SpectralParameter::new(Complex64::ONE).unwrap();
        let m = MaterialTensor::identity(paving);
        let v = potential_from_material(&m, lambda);
        for site in paving.sites() {
            for comp in Component::ALL {
                assert_eq!(v.entry(comp, site).unwrap(), -Complex64::ONE);
            }
        }
        // eps_1 = 2 gives V^E_1 = -1/2.
        let mut entries = vec![[Complex64::ONE; 6]; paving.site_count()];
        entries[0][0] = Complex64::new(2.0, 0.0);
        let m = MaterialTensor::new(paving, entries).unwrap();
        let v = potential_from_material(&m, lambda);
        assert_eq!(
            v.entry(Component::new(FieldKind::E, Axis::X1), Point3::new(1, 1, 1)).unwrap(),
            Complex64::new(-0.5, 0.0)
        );
        // Lookup outside the box is the identity.
        assert_eq!(
            v.entry(Component::new(FieldKind::H, Axis::X2), Point3::new(0, 1, 1)).unwrap(),
            Complex64::ONE
        );
        // V^E_2 = -0.25 inverts to eps_2 = 4.
        let mut ventries = vec![[-Complex64::ONE; 6]; paving.site_count()];
        ventries[3][1] = Complex64::new(-0.25, 0.0);
        let v = DiagonalPotential::new(paving, ventries).unwrap();
        let m = material_from_potential(&v, lambda);
        let p = paving.sites().nth(3).unwrap();
        assert_eq!(m.eps(p, Axis::X2), Complex64::new(4.0, 0.0));
        assert!(m.is_physical());
    }

    #[test]
    fn zero_entries_are_rejected() {
        let paving = Paving::new(1, 1, 1).unwrap();
        let err = MaterialTensor::new(paving, vec![[Complex64::ZERO; 6]]).unwrap_err();
        assert!(matches!(err, CoreError::ZeroEntry { .. }));
        assert!(SpectralParameter::new(Complex64::ZERO).is_err());
    }

    proptest! {
        #[test]
        fn material_potential_round_trip(
            res in proptest::collection::vec(0.5f64..2.0, 6),
            ims in proptest::collection::vec(-0.5f64..0.5, 6),
            lre in 0.5f64..2.0,
        ) {
            let paving = Paving::new(1, 1, 1).unwrap();
            let entries: [Complex64; 6] = std::array::from_fn(|i| Complex64::new(res[i], ims[i]));
            let m = MaterialTensor::new(paving, vec![entries]).unwrap();
            let lambda = SpectralParameter::new(Complex64::new(lre, 0.3)).unwrap();
            let back = material_from_potential(&potential_from_material(&m, lambda), lambda);
            prop_assert!(m.max_relative_error(&back) < 1e-14);
        }

        #[test]
        fn h0_is_linear(seed in 0u64..1000) {
            let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut rand = move || {
                state = state.wrapping_add(0x9e3779b97f4a7c15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
                ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let b = Box3::new(Point3::new(-1, -1, -1), Point3::new(1, 1, 1));
            let mut u = FieldWindow::new(b);
            let mut v = FieldWindow::new(b);
            let mut w = FieldWindow::new(b);
            let alpha = Complex64::new(rand(), rand());
            let beta = Complex64::new(rand(), rand());
            for p in b.points() {
                for comp in Component::ALL {
                    let uv = Complex64::new(rand(), rand());
                    let vv = Complex64::new(rand(), rand());
                    u.set(comp, p, uv);
                    v.set(comp, p, vv);
                    w.set(comp, p, alpha * uv + beta * vv);
                }
            }
            let n = Point3::new(0, 0, 0);
            let hu = apply_h0(&u, n).unwrap();
            let hv = apply_h0(&v, n).unwrap();
            let hw = apply_h0(&w, n).unwrap();
            for i in 0..6 {
                let lin = alpha * hu[i] + beta * hv[i];
                prop_assert!((hw[i] - lin).norm() <= 1e-14 * (1.0 + lin.norm()));
            }
        }
    }
}
