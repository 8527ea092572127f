//! First-order jets of matrix- and scalar-valued fields, with the algebra
//! needed to differentiate composite tensors exactly.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// A matrix value together with its partial derivative along every chart
/// coordinate: `partials[k] = ∂_k M`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatJet {
    pub value: DMatrix<f64>,
    pub partials: Vec<DMatrix<f64>>,
}

impl MatJet {
    pub fn new(value: DMatrix<f64>, partials: Vec<DMatrix<f64>>) -> Self {
        debug_assert!(partials.iter().all(|d| d.shape() == value.shape()));
        MatJet { value, partials }
    }

    /// A field that does not vary over a chart with `coords` coordinates.
    pub fn constant(value: DMatrix<f64>, coords: usize) -> Self {
        let zero = DMatrix::zeros(value.nrows(), value.ncols());
        MatJet { partials: vec![zero; coords], value }
    }

    pub fn coords(&self) -> usize {
        self.partials.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.value.shape()
    }

    pub fn transpose(&self) -> Self {
        MatJet {
            value: self.value.transpose(),
            partials: self.partials.iter().map(|d| d.transpose()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        MatJet {
            value: &self.value + &other.value,
            partials: zip_map(&self.partials, &other.partials, |a, b| a + b),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        MatJet {
            value: &self.value - &other.value,
            partials: zip_map(&self.partials, &other.partials, |a, b| a - b),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        MatJet {
            value: &self.value * c,
            partials: self.partials.iter().map(|d| d * c).collect(),
        }
    }

    /// Product rule: `∂(AB) = ∂A·B + A·∂B`.
    pub fn mul(&self, other: &Self) -> Self {
        MatJet {
            value: &self.value * &other.value,
            partials: zip_map(&self.partials, &other.partials, |da, db| {
                da * &other.value + &self.value * db
            }),
        }
    }

    /// `f·M` for a scalar field `f`.
    pub fn scale_by(&self, f: &ScalarJet) -> Self {
        MatJet {
            value: &self.value * f.value,
            partials: self
                .partials
                .iter()
                .enumerate()
                .map(|(k, d)| d * f.value + &self.value * f.gradient[k])
                .collect(),
        }
    }

    /// `∂(A⁻¹) = −A⁻¹·∂A·A⁻¹`.
    pub fn inverse(&self) -> Result<Self> {
        let inv = invert(&self.value)?;
        let partials = self.partials.iter().map(|d| -(&inv * d * &inv)).collect();
        Ok(MatJet { value: inv, partials })
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let zr = DMatrix::zeros(a.shape().0, b.shape().1);
        let zl = DMatrix::zeros(b.shape().0, a.shape().1);
        let tr = MatJet::constant(zr, a.coords());
        let bl = MatJet::constant(zl, a.coords());
        Self::from_blocks(a, &tr, &bl, b)
    }

    /// `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Self {
        let value = block_matrix(&tl.value, &tr.value, &bl.value, &br.value);
        let partials = (0..tl.coords())
            .map(|k| {
                block_matrix(
                    &tl.partials[k],
                    &tr.partials[k],
                    &bl.partials[k],
                    &br.partials[k],
                )
            })
            .collect();
        MatJet { value, partials }
    }

    /// Re-express over a larger chart in which the current coordinates come
    /// first and the field does not depend on the extra ones.
    pub fn pad_coords(&self, total: usize) -> Self {
        let mut partials = self.partials.clone();
        let zero = DMatrix::zeros(self.value.nrows(), self.value.ncols());
        partials.resize(total, zero);
        MatJet { value: self.value.clone(), partials }
    }

    /// Re-express the partials in new coordinates `q`, given
    /// `jinv[(b, a)] = ∂old_b/∂q_a`: `∂_{q_a} = Σ_b jinv[(b, a)]·∂_{old_b}`.
    pub fn change_coords(&self, jinv: &DMatrix<f64>) -> Self {
        assert_eq!(jinv.nrows(), self.coords(), "Jacobian does not match the chart");
        let zero = DMatrix::zeros(self.value.nrows(), self.value.ncols());
        let partials = (0..jinv.ncols())
            .map(|a| {
                self.partials
                    .iter()
                    .enumerate()
                    .fold(zero.clone(), |acc, (b, d)| acc + d * jinv[(b, a)])
            })
            .collect();
        MatJet { value: self.value.clone(), partials }
    }
}

fn zip_map(
    a: &[DMatrix<f64>],
    b: &[DMatrix<f64>],
    f: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>,
) -> Vec<DMatrix<f64>> {
    assert_eq!(a.len(), b.len(), "jets over different charts");
    a.iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Inverse with a determinant guard, so near-singular input is reported
/// instead of producing huge entries.
pub fn invert(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let lu = m.clone().lu();
    let det = lu.determinant();
    let scale = m.amax().max(1.0).powi(m.nrows() as i32);
    if !det.is_finite() || det.abs() <= 1e-14 * scale {
        return Err(Error::Singular { det: det.abs() });
    }
    lu.try_inverse().ok_or(Error::Singular { det: det.abs() })
}

/// Assemble a 2×2 block matrix.
pub fn block_matrix(
    tl: &DMatrix<f64>,
    tr: &DMatrix<f64>,
    bl: &DMatrix<f64>,
    br: &DMatrix<f64>,
) -> DMatrix<f64> {
    let (r1, c1) = tl.shape();
    let (r2, c2) = br.shape();
    let mut out = DMatrix::zeros(r1 + r2, c1 + c2);
    out.view_mut((0, 0), (r1, c1)).copy_from(tl);
    out.view_mut((0, c1), (r1, c2)).copy_from(tr);
    out.view_mut((r1, 0), (r2, c1)).copy_from(bl);
    out.view_mut((r1, c1), (r2, c2)).copy_from(br);
    out
}

pub fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    block_matrix(
        a,
        &DMatrix::zeros(a.nrows(), b.ncols()),
        &DMatrix::zeros(b.nrows(), a.ncols()),
        b,
    )
}

/// A scalar value with its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub gradient: DVector<f64>,
}

impl ScalarJet {
    pub fn new(value: f64, gradient: DVector<f64>) -> Self {
        ScalarJet { value, gradient }
    }

    /// `1/f`, gradient `−∇f/f²`.
    pub fn recip(&self) -> Self {
        let v = 1.0 / self.value;
        ScalarJet { value: v, gradient: &self.gradient * (-v * v) }
    }

    pub fn pad_coords(&self, total: usize) -> Self {
        let mut gradient = DVector::zeros(total);
        gradient.rows_mut(0, self.gradient.len()).copy_from(&self.gradient);
        ScalarJet { value: self.value, gradient }
    }
}

/// A rank-3 array `t[(a, b, c)]` with every index ranging over `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 { n, data: vec![0.0; n * n * n] }
    }

    /// `t[(k, i, j)] = partials[k][(i, j)]`, i.e. `∂_k M_ij`.
    pub fn from_partials(partials: &[DMatrix<f64>]) -> Self {
        let n = partials.len();
        let mut t = Tensor3::zeros(n);
        for (k, d) in partials.iter().enumerate() {
            assert_eq!(d.shape(), (n, n), "partials must be n×n over n coordinates");
            for i in 0..n {
                for j in 0..n {
                    t[(k, i, j)] = d[(i, j)];
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest deviation from invariance under every permutation of the
    /// three indices.
    pub fn total_symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = self[(a, b, c)];
                    for w in [
                        self[(a, c, b)],
                        self[(b, a, c)],
                        self[(b, c, a)],
                        self[(c, a, b)],
                        self[(c, b, a)],
                    ] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Tensor3 {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    fn index(&self, (a, b, c): (usize, usize, usize)) -> &f64 {
        &self.data[(a * self.n + b) * self.n + c]
    }
}

impl std::ops::IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (a, b, c): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[(a * self.n + b) * self.n + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    /// M(x, y) = [[x, y], [0, x·y]] as an exact jet.
    fn sample_jet(x: f64, y: f64) -> MatJet {
        MatJet::new(
            dmatrix![x, y; 0.0, x * y],
            vec![dmatrix![1.0, 0.0; 0.0, y], dmatrix![0.0, 1.0; 0.0, x]],
        )
    }

    fn fd_check(f: impl Fn(f64, f64) -> MatJet) {
        let (x, y, h) = (1.3, 0.7, 1e-6);
        let jet = f(x, y);
        let dx = (f(x + h, y).value - f(x - h, y).value) / (2.0 * h);
        let dy = (f(x, y + h).value - f(x, y - h).value) / (2.0 * h);
        assert!((&jet.partials[0] - dx).amax() < 1e-8);
        assert!((&jet.partials[1] - dy).amax() < 1e-8);
    }

    #[test]
    fn change_of_coordinates_is_the_chain_rule() {
        // old = (s + t, s - t)
        let jinv = dmatrix![1.0, 1.0; 1.0, -1.0];
        fd_check(|s, t| sample_jet(s + t, s - t).change_coords(&jinv));
    }

    #[test]
    fn product_and_inverse_rules_match_finite_differences() {
        fd_check(|x, y| sample_jet(x, y).mul(&sample_jet(x, y).transpose()));
        fd_check(|x, y| sample_jet(x, y).inverse().unwrap());
        fd_check(|x, y| {
            let f = ScalarJet::new(x * x * y, nalgebra::dvector![2.0 * x * y, x * x]);
            sample_jet(x, y).scale_by(&f.recip())
        });
        fd_check(|x, y| {
            let m = sample_jet(x, y);
            MatJet::from_blocks(&m, &m.neg(), &m.transpose(), &m.scale(2.0))
        });
    }

    #[test]
    fn singular_inverse_is_reported() {
        assert!(matches!(
            invert(&dmatrix![1.0, 2.0; 2.0, 4.0]),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn symmetry_defect_of_partials() {
        let mut t = Tensor3::zeros(2);
        t[(0, 1, 1)] = 1.0;
        assert_eq!(t.total_symmetry_defect(), 1.0);
        t[(1, 0, 1)] = 1.0;
        t[(1, 1, 0)] = 1.0;
        assert_eq!(t.total_symmetry_defect(), 0.0);
    }
}
