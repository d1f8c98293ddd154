//! Operators labeled by an ordered list of tensor factors.
//!
//! Factor order is canonicalized (sorted by region id) on construction, and
//! every binary operation aligns factors by id — padding each operand with
//! identities on the union of factor sets — before combining matrices. This
//! makes expressions like `rho_xa.star(&rho_a.pseudo_inverse(tol)?, tol)`
//! well-formed even when the operands mention different regions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::region::Region;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledOperator {
    factors: Vec<Region>,
    matrix: CMat,
}

impl LabeledOperator {
    /// Build an operator over the given factors. The matrix is read in the
    /// row-major lexicographic basis of `factors` *as passed*; the factor list
    /// is then sorted by id and the matrix permuted to match.
    pub fn new(factors: Vec<Region>, matrix: CMat) -> Result<Self> {
        for f in &factors {
            f.validate()?;
        }
        let mut seen = std::collections::BTreeSet::new();
        for f in &factors {
            if !seen.insert(f.id.clone()) {
                return Err(Error::DuplicateRegion(f.id.clone()));
            }
        }
        let n: usize = factors.iter().map(|f| f.dim).product();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::MatrixShape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected: n,
            });
        }
        let mut order: Vec<usize> = (0..factors.len()).collect();
        order.sort_by(|&a, &b| factors[a].id.cmp(&factors[b].id));
        let dims: Vec<usize> = factors.iter().map(|f| f.dim).collect();
        let matrix = if order.iter().enumerate().all(|(k, &p)| k == p) {
            matrix
        } else {
            linalg::permute_factors(&matrix, &dims, &order)
        };
        let factors = order.into_iter().map(|k| factors[k].clone()).collect();
        Ok(Self { factors, matrix })
    }

    /// A 1x1 operator with no factors (the result of a full trace).
    pub fn scalar(value: Complex64) -> Self {
        Self {
            factors: Vec::new(),
            matrix: CMat::from_element(1, 1, value),
        }
    }

    pub fn identity_on(factors: &[Region]) -> Result<Self> {
        let n: usize = factors.iter().map(|f| f.dim).product();
        Self::new(factors.to_vec(), linalg::identity(n))
    }

    pub fn zeros_on(factors: &[Region]) -> Result<Self> {
        let n: usize = factors.iter().map(|f| f.dim).product();
        Self::new(factors.to_vec(), CMat::zeros(n, n))
    }

    pub fn factors(&self) -> &[Region] {
        &self.factors
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn factor(&self, id: &str) -> Option<&Region> {
        self.factors.iter().find(|f| f.id == id)
    }

    pub fn factor_ids(&self) -> Vec<String> {
        self.factors.iter().map(|f| f.id.clone()).collect()
    }

    fn require_factors(&self, over: &[&str]) -> Result<()> {
        for id in over {
            if self.factor(id).is_none() {
                return Err(Error::UnknownRegion((*id).into()));
            }
        }
        Ok(())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        for f in &other.factors {
            if self.factor(&f.id).is_some() {
                return Err(Error::DuplicateRegion(f.id.clone()));
            }
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self::new(factors, linalg::kron(&self.matrix, &other.matrix))
    }

    /// Embed into a larger factor set by tensoring identities on the missing
    /// factors. `target` must contain every factor of `self` with matching
    /// dim/kind.
    pub fn pad_to(&self, target: &[Region]) -> Result<Self> {
        let mut out = self.clone();
        for f in target {
            match out.factor(&f.id) {
                Some(existing) => existing.check_same(f)?,
                None => out = out.tensor(&Self::identity_on(std::slice::from_ref(f))?)?,
            }
        }
        if out.factors.len() != target.len() {
            let extra = out
                .factors
                .iter()
                .find(|f| !target.iter().any(|t| t.id == f.id))
                .expect("factor count mismatch implies an extra factor");
            return Err(Error::UnknownRegion(extra.id.clone()));
        }
        Ok(out)
    }

    /// Union of the two factor lists (sorted by id), checking consistency of
    /// shared ids.
    pub fn union_factors(&self, other: &Self) -> Result<Vec<Region>> {
        let mut union = self.factors.clone();
        for f in &other.factors {
            match union.iter().find(|g| g.id == f.id) {
                Some(g) => g.check_same(f)?,
                None => union.push(f.clone()),
            }
        }
        union.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(union)
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        let union = self.union_factors(other)?;
        Ok((self.pad_to(&union)?, other.pad_to(&union)?))
    }

    /// Matrix product after aligning factors by id.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        Ok(Self {
            factors: a.factors,
            matrix: a.matrix * b.matrix,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        Ok(Self {
            factors: a.factors,
            matrix: a.matrix + b.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        Ok(Self {
            factors: a.factors,
            matrix: a.matrix - b.matrix,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            factors: self.factors.clone(),
            matrix: self.matrix.scale(s),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            factors: self.factors.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn partial_trace(&self, over: &[&str]) -> Result<Self> {
        self.require_factors(over)?;
        let keep: Vec<bool> = self.factors.iter().map(|f| !over.contains(&f.id.as_str())).collect();
        let kept: Vec<Region> = self
            .factors
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(f, _)| f.clone())
            .collect();
        let matrix = linalg::partial_trace(&self.matrix, &self.dims(), &keep);
        Ok(Self { factors: kept, matrix })
    }

    /// Trace out everything except the listed factors.
    pub fn marginal(&self, keep: &[&str]) -> Result<Self> {
        self.require_factors(keep)?;
        let over: Vec<&str> = self
            .factors
            .iter()
            .filter(|f| !keep.contains(&f.id.as_str()))
            .map(|f| f.id.as_str())
            .collect();
        self.partial_trace(&over)
    }

    /// Transpose the listed factors in the canonical basis. For classical
    /// factors the canonical basis is the preferred basis, so transposing a
    /// block-diagonal classical operator leaves it unchanged.
    pub fn partial_transpose(&self, over: &[&str]) -> Result<Self> {
        self.require_factors(over)?;
        let mask: Vec<bool> = self.factors.iter().map(|f| over.contains(&f.id.as_str())).collect();
        let matrix = linalg::partial_transpose(&self.matrix, &self.dims(), &mask);
        Ok(Self {
            factors: self.factors.clone(),
            matrix,
        })
    }

    /// `self ⋆ n = n^{1/2} · self · n^{1/2}` after factor alignment.
    /// `n` must be positive semidefinite up to the eigenvalue cut.
    pub fn star(&self, n: &Self, tol: &Tolerance) -> Result<Self> {
        let n_sqrt = n.sqrt_psd(tol)?;
        let out = n_sqrt.mul(self)?.mul(&n_sqrt)?;
        if self.hermitian_deviation() <= tol.eq_tol {
            Ok(out.hermitize())
        } else {
            Ok(out)
        }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        linalg::hermitian_deviation(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.hermitian_deviation() <= tol.eq_tol
    }

    pub fn hermitize(&self) -> Self {
        Self {
            factors: self.factors.clone(),
            matrix: linalg::hermitize(&self.matrix),
        }
    }

    fn require_hermitian(&self, tol: &Tolerance) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > tol.eq_tol {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::herm_eig(&self.matrix).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `true` iff `λ_min ≥ −eig_cut·max(1, λ_max)`.
    pub fn is_psd(&self, tol: &Tolerance) -> Result<bool> {
        self.require_hermitian(tol)?;
        let vals = self.eigenvalues();
        let max = vals.last().copied().unwrap_or(0.0);
        let min = vals.first().copied().unwrap_or(0.0);
        Ok(min >= -tol.eig_cut * f64::max(1.0, max))
    }

    /// Projector, rank, and orthonormal basis of the span of eigenvectors with
    /// eigenvalue above the relative cut.
    pub fn support(&self, tol: &Tolerance) -> Result<SupportSubspace> {
        self.require_hermitian(tol)?;
        let (vals, vecs) = linalg::herm_eig(&self.matrix);
        let max = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let cut = tol.eig_threshold(max);
        let idx: Vec<usize> = (0..vals.len()).filter(|&k| vals[k].abs() > cut).collect();
        let n = self.dim();
        let basis = CMat::from_fn(n, idx.len(), |i, j| vecs[(i, idx[j])]);
        let projector = &basis * basis.adjoint();
        Ok(SupportSubspace {
            projector: Self {
                factors: self.factors.clone(),
                matrix: projector,
            },
            rank: idx.len(),
            basis,
        })
    }

    fn psd_spectral_map(
        &self,
        tol: &Tolerance,
        what: &str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        self.require_hermitian(tol)?;
        let (vals, vecs) = linalg::herm_eig(&self.matrix);
        let max = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let cut = tol.eig_threshold(max);
        if let Some(&min) = vals.first() {
            if min < -cut {
                return Err(Error::NotPositive {
                    what: what.into(),
                    min_eig: min,
                });
            }
        }
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for (k, &v) in vals.iter().enumerate() {
            let fv = f(v.max(0.0), cut);
            if fv != 0.0 {
                let col = vecs.column(k);
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] += col[i] * col[j].conj() * Complex64::new(fv, 0.0);
                    }
                }
            }
        }
        Ok(Self {
            factors: self.factors.clone(),
            matrix: out,
        })
    }

    /// PSD square root; eigenvalues within `−cut` of zero are clamped to zero.
    pub fn sqrt_psd(&self, tol: &Tolerance) -> Result<Self> {
        self.psd_spectral_map(tol, "square-root argument", |v, _| v.sqrt())
    }

    /// Moore–Penrose inverse restricted to the support.
    pub fn pseudo_inverse(&self, tol: &Tolerance) -> Result<Self> {
        self.psd_spectral_map(tol, "pseudo-inverse argument", |v, cut| {
            if v > cut {
                1.0 / v
            } else {
                0.0
            }
        })
    }

    /// `(op⁺)^{1/2}`, the square root of the pseudo-inverse.
    pub fn pseudo_inverse_sqrt(&self, tol: &Tolerance) -> Result<Self> {
        self.psd_spectral_map(tol, "pseudo-inverse argument", |v, cut| {
            if v > cut {
                1.0 / v.sqrt()
            } else {
                0.0
            }
        })
    }

    /// `−Σ λ log₂ λ` over the spectrum, in bits.
    pub fn von_neumann_entropy(&self, tol: &Tolerance) -> Result<f64> {
        self.require_hermitian(tol)?;
        let tr = self.trace().re;
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::TraceNotOne {
                what: "entropy argument".into(),
                trace: tr,
            });
        }
        let vals = self.eigenvalues();
        let max = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let cut = tol.eig_threshold(max);
        if let Some(&min) = vals.first() {
            if min < -cut {
                return Err(Error::NotPositive {
                    what: "entropy argument".into(),
                    min_eig: min,
                });
            }
        }
        Ok(vals
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| -v * v.log2())
            .sum())
    }

    /// Largest singular value.
    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }

    /// Spectral norm of the difference after factor alignment. Errors if the
    /// factor sets are inconsistent.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.distance(other).map(|d| d <= eps).unwrap_or(false)
    }

    /// The matrix re-expressed with factors in the order given by `order`
    /// (which must list every factor id exactly once).
    pub fn matrix_in_order(&self, order: &[&str]) -> Result<CMat> {
        if order.len() != self.factors.len() {
            return Err(Error::Invalid(format!(
                "factor order lists {} ids but operator has {} factors",
                order.len(),
                self.factors.len()
            )));
        }
        let mut perm = Vec::with_capacity(order.len());
        for id in order {
            let k = self
                .factors
                .iter()
                .position(|f| f.id == *id)
                .ok_or_else(|| Error::UnknownRegion((*id).into()))?;
            perm.push(k);
        }
        Ok(linalg::permute_factors(&self.matrix, &self.dims(), &perm))
    }
}

/// A subspace presented as projector + orthonormal basis, used for support
/// and compatibility geometry.
#[derive(Debug, Clone)]
pub struct SupportSubspace {
    pub projector: LabeledOperator,
    pub rank: usize,
    pub basis: CMat,
}

impl SupportSubspace {
    pub fn full(factors: &[Region]) -> Result<Self> {
        let projector = LabeledOperator::identity_on(factors)?;
        let n = projector.dim();
        Ok(Self {
            projector,
            rank: n,
            basis: linalg::identity(n),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.rank == 0
    }

    /// `true` if `v` lies in the subspace (projector leaves it fixed).
    pub fn contains_vector(&self, v: &CMat, eps: f64) -> bool {
        let pv = self.projector.matrix() * v;
        linalg::op_norm(&(pv - v)) <= eps
    }
}

/// Geometric intersection of two subspaces of the same ambient space: the
/// eigenspace of `P + Q` with eigenvalue within `INTERSECTION_TOL` of 2.
pub fn subspace_intersection(
    p: &SupportSubspace,
    q: &SupportSubspace,
    _tol: &Tolerance,
) -> Result<SupportSubspace> {
    const INTERSECTION_TOL: f64 = 1e-8;
    let sum = p.projector.add(&q.projector)?;
    let (vals, vecs) = linalg::herm_eig(sum.matrix());
    let idx: Vec<usize> = (0..vals.len())
        .filter(|&k| (vals[k] - 2.0).abs() < INTERSECTION_TOL)
        .collect();
    let n = sum.dim();
    let basis = CMat::from_fn(n, idx.len(), |i, j| vecs[(i, idx[j])]);
    let projector = &basis * basis.adjoint();
    Ok(SupportSubspace {
        projector: LabeledOperator::new(sum.factors().to_vec(), projector)?,
        rank: idx.len(),
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr};
    use approx::assert_abs_diff_eq;

    fn qubit(id: &str) -> Region {
        Region::quantum(id, 2)
    }

    fn op(id: &str, rows: &[&[f64]]) -> LabeledOperator {
        let n = rows.len();
        LabeledOperator::new(
            vec![Region::quantum(id, n)],
            CMat::from_fn(n, n, |i, j| cr(rows[i][j])),
        )
        .unwrap()
    }

    fn sigma_x(id: &str) -> LabeledOperator {
        op(id, &[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn sigma_z(id: &str) -> LabeledOperator {
        op(id, &[&[1.0, 0.0], &[0.0, -1.0]])
    }

    fn bell(a: &str, b: &str) -> LabeledOperator {
        // (|00> + |11>)/sqrt(2) density matrix
        let mut m = CMat::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                m[(i, j)] = cr(0.5);
            }
        }
        LabeledOperator::new(vec![qubit(a), qubit(b)], m).unwrap()
    }

    const TOL: Tolerance = Tolerance::new(1e-10, 1e-9);

    #[test]
    fn tensor_identity_case() {
        let i2a = LabeledOperator::identity_on(&[qubit("A")]).unwrap();
        let i2b = LabeledOperator::identity_on(&[qubit("B")]).unwrap();
        let t = i2a.tensor(&i2b).unwrap();
        assert_eq!(t.dim(), 4);
        assert!(t.approx_eq(
            &LabeledOperator::identity_on(&[qubit("A"), qubit("B")]).unwrap(),
            1e-15
        ));
    }

    #[test]
    fn tensor_basis_product() {
        let p0 = op("A", &[&[1.0, 0.0], &[0.0, 0.0]]);
        let p1 = op("B", &[&[0.0, 0.0], &[0.0, 1.0]]);
        let t = p0.tensor(&p1).unwrap();
        let mut expected = CMat::zeros(4, 4);
        expected[(1, 1)] = cr(1.0); // |01> in AB order
        assert_abs_diff_eq!(linalg::op_norm(&(t.matrix() - expected)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tensor_pauli_oracle() {
        let t = sigma_x("A").tensor(&sigma_z("B")).unwrap();
        let expected = linalg::kron(sigma_x("A").matrix(), sigma_z("B").matrix());
        assert_abs_diff_eq!(linalg::op_norm(&(t.matrix() - expected)), 0.0, epsilon = 1e-15);
        // canonicalization: building in the other order gives the same matrix
        let t2 = sigma_z("B").tensor(&sigma_x("A")).unwrap();
        assert!(t.approx_eq(&t2, 1e-15));
    }

    #[test]
    fn tensor_rejects_duplicates() {
        let e = sigma_x("A").tensor(&sigma_z("A"));
        assert!(matches!(e, Err(Error::DuplicateRegion(_))));
    }

    #[test]
    fn partial_trace_product_and_bell() {
        let ra = op("A", &[&[0.7, 0.0], &[0.0, 0.3]]);
        let rb = op("B", &[&[0.6, 0.1], &[0.1, 0.4]]);
        let joint = ra.tensor(&rb).unwrap();
        assert!(joint.partial_trace(&["A"]).unwrap().approx_eq(&rb, 1e-14));
        assert!(joint.partial_trace(&["B"]).unwrap().approx_eq(&ra, 1e-14));

        let half = op("B", &[&[0.5, 0.0], &[0.0, 0.5]]);
        assert!(bell("A", "B").partial_trace(&["A"]).unwrap().approx_eq(&half, 1e-14));

        let full = joint.partial_trace(&["A", "B"]).unwrap();
        assert_eq!(full.dim(), 1);
        assert_abs_diff_eq!(full.trace().re, 1.0, epsilon = 1e-14);

        assert!(matches!(
            joint.partial_trace(&["Q"]),
            Err(Error::UnknownRegion(_))
        ));
    }

    #[test]
    fn partial_transpose_bell_is_swap() {
        let pt = bell("A", "B").partial_transpose(&["A"]).unwrap();
        // SWAP/2 has entries 1/2 at (0,0),(3,3),(1,2),(2,1)
        let mut swap_half = CMat::zeros(4, 4);
        swap_half[(0, 0)] = cr(0.5);
        swap_half[(3, 3)] = cr(0.5);
        swap_half[(1, 2)] = cr(0.5);
        swap_half[(2, 1)] = cr(0.5);
        assert_abs_diff_eq!(linalg::op_norm(&(pt.matrix() - swap_half)), 0.0, epsilon = 1e-14);
        let vals = pt.eigenvalues();
        assert_abs_diff_eq!(vals[0], -0.5, epsilon = 1e-12);
        assert!(!pt.is_psd(&TOL).unwrap());
        // involution
        let back = pt.partial_transpose(&["A"]).unwrap();
        assert!(back.approx_eq(&bell("A", "B"), 1e-14));
    }

    #[test]
    fn partial_transpose_classical_diagonal_fixed() {
        let d = LabeledOperator::new(
            vec![Region::classical("X", 3)],
            CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![cr(0.2), cr(0.3), cr(0.5)])),
        )
        .unwrap();
        assert!(d.partial_transpose(&["X"]).unwrap().approx_eq(&d, 0.0));
    }

    #[test]
    fn star_product_examples() {
        let i2 = LabeledOperator::identity_on(&[qubit("A")]).unwrap();
        assert!(sigma_x("A").star(&i2, &TOL).unwrap().approx_eq(&sigma_x("A"), 1e-14));

        let m = op("A", &[&[2.0, 0.0], &[0.0, 3.0]]);
        let n = op("A", &[&[4.0, 0.0], &[0.0, 1.0]]);
        let expected = op("A", &[&[8.0, 0.0], &[0.0, 3.0]]);
        assert!(m.star(&n, &TOL).unwrap().approx_eq(&expected, 1e-13));

        let expected_x = op("A", &[&[0.0, 2.0], &[2.0, 0.0]]);
        assert!(sigma_x("A").star(&n, &TOL).unwrap().approx_eq(&expected_x, 1e-13));

        // negative n rejected
        assert!(sigma_x("A").star(&sigma_z("A"), &TOL).is_err());
    }

    #[test]
    fn star_pads_disjoint_factors() {
        let rb = op("B", &[&[0.5, 0.0], &[0.0, 0.5]]);
        let xa = sigma_x("A");
        let s = xa.star(&rb, &TOL).unwrap();
        let expected = sigma_x("A").tensor(&rb).unwrap();
        assert!(s.approx_eq(&expected, 1e-13));
    }

    #[test]
    fn support_examples() {
        let half = op("A", &[&[0.5, 0.0], &[0.0, 0.5]]);
        let s = half.support(&TOL).unwrap();
        assert_eq!(s.rank, 2);

        let p0 = op("A", &[&[1.0, 0.0], &[0.0, 0.0]]);
        let s = p0.support(&TOL).unwrap();
        assert_eq!(s.rank, 1);
        assert!(s.projector.approx_eq(&p0, 1e-13));

        let d = op("A", &[&[0.7, 0.0, 0.0], &[0.0, 0.3, 0.0], &[0.0, 0.0, 0.0]]);
        let s = d.support(&TOL).unwrap();
        assert_eq!(s.rank, 2);
        let expected = op("A", &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert!(s.projector.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn pseudo_inverse_examples() {
        let half = op("A", &[&[0.5, 0.0], &[0.0, 0.5]]);
        let two = op("A", &[&[2.0, 0.0], &[0.0, 2.0]]);
        assert!(half.pseudo_inverse(&TOL).unwrap().approx_eq(&two, 1e-12));

        let d = op("A", &[&[0.5, 0.0], &[0.0, 0.0]]);
        let expected = op("A", &[&[2.0, 0.0], &[0.0, 0.0]]);
        assert!(d.pseudo_inverse(&TOL).unwrap().approx_eq(&expected, 1e-12));
        // op · pinv = support projector
        let proj = d.mul(&d.pseudo_inverse(&TOL).unwrap()).unwrap();
        assert!(proj.approx_eq(&d.support(&TOL).unwrap().projector, 1e-12));
    }

    #[test]
    fn subspace_intersection_examples() {
        let full = SupportSubspace::full(&[Region::quantum("A", 3)]).unwrap();
        let p = op("A", &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]])
            .support(&TOL)
            .unwrap();
        let i = subspace_intersection(&full, &p, &TOL).unwrap();
        assert_eq!(i.rank, 2);
        assert!(i.projector.approx_eq(&p.projector, 1e-10));

        let p0 = op("A", &[&[1.0, 0.0], &[0.0, 0.0]]).support(&TOL).unwrap();
        let p1 = op("A", &[&[0.0, 0.0], &[0.0, 1.0]]).support(&TOL).unwrap();
        assert_eq!(subspace_intersection(&p0, &p1, &TOL).unwrap().rank, 0);

        let span01 = op("A", &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]])
            .support(&TOL)
            .unwrap();
        let span12 = op("A", &[&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])
            .support(&TOL)
            .unwrap();
        let i = subspace_intersection(&span01, &span12, &TOL).unwrap();
        assert_eq!(i.rank, 1);
        let e1 = op("A", &[&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert!(i.projector.approx_eq(&e1, 1e-10));
    }

    #[test]
    fn entropy_examples() {
        let p0 = op("A", &[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_abs_diff_eq!(p0.von_neumann_entropy(&TOL).unwrap(), 0.0, epsilon = 1e-12);
        let half = op("A", &[&[0.5, 0.0], &[0.0, 0.5]]);
        assert_abs_diff_eq!(half.von_neumann_entropy(&TOL).unwrap(), 1.0, epsilon = 1e-12);
        let d = op("A", &[&[0.75, 0.0], &[0.0, 0.25]]);
        let expected = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert_abs_diff_eq!(d.von_neumann_entropy(&TOL).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.8112781244591328, epsilon = 1e-12);
        // trace != 1 rejected
        assert!(sigma_x("A").von_neumann_entropy(&TOL).is_err());
    }

    #[test]
    fn entropy_additive_over_tensor() {
        let a = op("A", &[&[0.75, 0.0], &[0.0, 0.25]]);
        let b = op("B", &[&[0.5, 0.0], &[0.0, 0.5]]);
        let ab = a.tensor(&b).unwrap();
        assert_abs_diff_eq!(
            ab.von_neumann_entropy(&TOL).unwrap(),
            a.von_neumann_entropy(&TOL).unwrap() + b.von_neumann_entropy(&TOL).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn is_psd_examples() {
        let i2 = LabeledOperator::identity_on(&[qubit("A")]).unwrap();
        assert!(i2.is_psd(&TOL).unwrap());
        assert!(!sigma_z("A").is_psd(&TOL).unwrap());
    }

    #[test]
    fn adjointness_of_trace_and_tensor() {
        // Tr(Tr_A(op) m_B) = Tr(op (I_A ⊗ m_B))
        let joint = bell("A", "B");
        let m_b = op("B", &[&[0.3, 0.2], &[0.2, 0.9]]);
        let lhs = joint.partial_trace(&["A"]).unwrap().mul(&m_b).unwrap().trace();
        let rhs = joint.mul(&m_b).unwrap().trace();
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn matrix_in_order_roundtrip() {
        let t = sigma_x("A").tensor(&sigma_z("B")).unwrap();
        let ab = t.matrix_in_order(&["A", "B"]).unwrap();
        assert_abs_diff_eq!(linalg::op_norm(&(ab.clone() - t.matrix().clone())), 0.0, epsilon = 1e-15);
        let ba = t.matrix_in_order(&["B", "A"]).unwrap();
        let expected = linalg::kron(sigma_z("B").matrix(), sigma_x("A").matrix());
        assert_abs_diff_eq!(linalg::op_norm(&(ba - expected)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn scalar_and_zero_factor_ops() {
        let s = LabeledOperator::scalar(c(0.25, 0.0));
        assert_eq!(s.dim(), 1);
        assert_abs_diff_eq!(s.trace().re, 0.25, epsilon = 1e-15);
    }
}
