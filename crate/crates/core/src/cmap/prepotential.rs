//! Rigid special Kähler geometry generated by a holomorphic prepotential
//! `F(z¹, …, zᵐ)`.
//!
//! With `z = x + iη`, `N = Im F''` and `R = Re F''`, the special coordinates
//! are `q = (u, v) = (x, Re F'(z))`. Their Jacobian with respect to `(x, η)`
//! is `J_c = [[I, 0], [R, −N]]`, so the Hermitian metric `N_ij dzⁱdz̄ʲ`
//! (realified to `blockdiag(N, N)`) and multiplication by `√−1`
//! (`[[0, −I], [I, 0]]`) become
//!
//! ```text
//! g = J_c⁻ᵀ blockdiag(N, N) J_c⁻¹ = [[N + R N⁻¹ R, −R N⁻¹], [−N⁻¹ R, N⁻¹]]
//! I = J_c [[0, −I], [I, 0]] J_c⁻¹
//! ```
//!
//! and `g·I = [[0, Id], [−Id, 0]]` is constant. Derivatives are exact: since
//! `F''` is holomorphic, `∂_x F'' = F'''` and `∂_η F'' = i F'''`, and the
//! jets are then carried to `q` by the inverse Jacobian.

use crate::error::{Error, Result};
use crate::expr::{Mode, ScalarExpression};
use crate::rmap::standard_complex_structure;
use crate::tensor::{invert, MatJet};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Newton stops once `‖Re F'(z) − v‖_∞ ≤ NEWTON_TOL·max(1, ‖q‖_∞)`.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 40;

/// Signature of `Im F''` on the sampling box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    /// Positive definite: a Riemannian special Kähler metric.
    #[default]
    Definite,
    /// Nondegenerate of mixed signature (e.g. conic prepotentials of degree
    /// two, whose `Im F''` always has a negative direction).
    Indefinite,
}

/// A holomorphic prepotential with its sampling box on `(Re z, Im z)`.
#[derive(Debug, Clone)]
pub struct Prepotential {
    m: usize,
    f: ScalarExpression,
    bounds: Vec<(f64, f64)>,
    signature: Signature,
}

fn to_complex(x: &[f64], eta: &[f64]) -> Vec<Complex64> {
    x.iter().zip(eta).map(|(&a, &b)| Complex64::new(a, b)).collect()
}

/// `(Re z, Im z)` of a complex point, for error reports.
pub fn realify(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|c| c.re).chain(z.iter().map(|c| c.im)).collect()
}

impl Prepotential {
    /// `bounds` lists the intervals for `Re z¹..Re zᵐ` then `Im z¹..Im zᵐ`.
    pub fn new(f: ScalarExpression, bounds: Vec<(f64, f64)>, signature: Signature) -> Result<Self> {
        if f.mode() != Mode::Complex {
            return Err(Error::Config("a prepotential must be a complex-mode expression".into()));
        }
        let m = f.arity();
        if bounds.len() != 2 * m {
            return Err(Error::Config(format!(
                "prepotential in {m} variables needs {} box intervals, got {}",
                2 * m,
                bounds.len()
            )));
        }
        if bounds.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::Config("box intervals must satisfy lo < hi".into()));
        }
        Ok(Prepotential { m, f, bounds, signature })
    }

    /// Parse `F` over `z1..zm`.
    pub fn parse(text: &str, m: usize, bounds: Vec<(f64, f64)>, signature: Signature) -> Result<Self> {
        Self::new(ScalarExpression::parse(text, m, Mode::Complex)?, bounds, signature)
    }

    /// Complex dimension `m`; the special coordinates number `2m`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn expression(&self) -> &ScalarExpression {
        &self.f
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    /// `(F', F'')` at `z`; any failure to evaluate is reported as a pole.
    pub fn derivatives(&self, z: &[Complex64]) -> Result<(DVector<Complex64>, DMatrix<Complex64>)> {
        let (_, d1, d2) = self
            .f
            .eval_complex_jet2(z)
            .map_err(|_| Error::PoleInDomain { point: realify(z) })?;
        let finite = d1.iter().chain(d2.iter()).all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::PoleInDomain { point: realify(z) });
        }
        Ok((d1, d2))
    }

    /// `Im F''(z)`.
    pub fn imaginary_hessian(&self, z: &[Complex64]) -> Result<DMatrix<f64>> {
        Ok(self.derivatives(z)?.1.map(|c| c.im))
    }

    /// Special coordinates `q = (Re z, Re F'(z))`.
    pub fn darboux(&self, z: &[Complex64]) -> Result<DVector<f64>> {
        let (d1, _) = self.derivatives(z)?;
        Ok(DVector::from_iterator(
            2 * self.m,
            z.iter().map(|c| c.re).chain(d1.iter().map(|c| c.re)),
        ))
    }

    /// Solve `(Re z, Re F'(z)) = q` for `z`. `Re z = u` is read off directly;
    /// `Im z` is found by damped Newton iteration on `Re F'(u + iη) = v`
    /// (Jacobian `−Im F''`) started at the centre of the box, followed by one
    /// polishing step.
    pub fn invert(&self, q: &[f64]) -> Result<Vec<Complex64>> {
        let m = self.m;
        if q.len() != 2 * m {
            return Err(Error::Dimension(format!("special coordinates have {} entries, expected {}", q.len(), 2 * m)));
        }
        let (u, v) = (&q[..m], DVector::from_column_slice(&q[m..]));
        let diverged = || Error::NewtonDivergence { point: q.to_vec() };
        let tol = NEWTON_TOL * q.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        let residual = |eta: &DVector<f64>| -> Result<(DVector<f64>, DMatrix<f64>)> {
            let (d1, d2) = self.derivatives(&to_complex(u, eta.as_slice()))?;
            Ok((d1.map(|c| c.re) - &v, d2.map(|c| c.im)))
        };
        let mut eta = DVector::from_iterator(m, self.bounds[m..].iter().map(|(lo, hi)| 0.5 * (lo + hi)));
        let (mut r, mut n) = residual(&eta).map_err(|_| diverged())?;
        for _ in 0..NEWTON_MAX_ITER {
            let step = invert(&n).map_err(|_| diverged())? * &r;
            if r.amax() <= tol {
                let polished = &eta + &step;
                if residual(&polished).is_ok_and(|(rp, _)| rp.amax() <= r.amax()) {
                    eta = polished;
                }
                return Ok(to_complex(u, eta.as_slice()));
            }
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..MAX_HALVINGS {
                let trial = &eta + &step * t;
                if let Ok((rt, nt)) = residual(&trial) {
                    if rt.amax() < r.amax() {
                        (eta, r, n) = (trial, rt, nt);
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(diverged());
            }
        }
        Err(diverged())
    }

    /// Metric and complex structure in special coordinates at the point with
    /// complex coordinates `z`, as jets over the `2m` special coordinates.
    pub fn special_jets(&self, z: &[Complex64]) -> Result<(MatJet, MatJet)> {
        let m = self.m;
        let jet = self.f.eval_complex(z).map_err(|_| Error::PoleInDomain { point: realify(z) })?;
        let f2 = &jet.hessian;
        let part = |k: usize, re: bool| -> DMatrix<f64> {
            // ∂_x F'' = F''', ∂_η F'' = i F'''
            let d = if k < m { jet.third[k].clone() } else { jet.third[k - m].map(|c| c * Complex64::i()) };
            if re { d.map(|c| c.re) } else { d.map(|c| c.im) }
        };
        let n = MatJet::new(f2.map(|c| c.im), (0..2 * m).map(|k| part(k, false)).collect());
        let r = MatJet::new(f2.map(|c| c.re), (0..2 * m).map(|k| part(k, true)).collect());
        self.push_forward(&n, &r, z)
    }

    /// Values only, without third derivatives.
    pub fn special_values(&self, z: &[Complex64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let (_, f2) = self.derivatives(z)?;
        let n = MatJet::constant(f2.map(|c| c.im), 0);
        let r = MatJet::constant(f2.map(|c| c.re), 0);
        let (g, i) = self.push_forward(&n, &r, z)?;
        Ok((g.value, i.value))
    }

    fn push_forward(&self, n: &MatJet, r: &MatJet, z: &[Complex64]) -> Result<(MatJet, MatJet)> {
        let (m, c) = (self.m, n.coords());
        let id = MatJet::constant(DMatrix::identity(m, m), c);
        let zero = MatJet::constant(DMatrix::zeros(m, m), c);
        let jc = MatJet::from_blocks(&id, &zero, r, &n.neg());
        let jinv = jc.inverse().map_err(|_| Error::SingularMetric { point: realify(z) })?;
        let g = jinv.transpose().mul(&MatJet::block_diag(n, n)).mul(&jinv);
        let i = jc.mul(&MatJet::constant(standard_complex_structure(m), c)).mul(&jinv);
        if c == 0 {
            return Ok((g, i));
        }
        Ok((g.change_coords(&jinv.value), i.change_coords(&jinv.value)))
    }

    /// Uniform seeded samples from the box, as complex points.
    pub fn sample_z(&self, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.m;
        (0..count)
            .map(|_| {
                let p: Vec<f64> = self.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
                to_complex(&p[..m], &p[m..])
            })
            .collect()
    }

    /// True iff `z` lies in the closed box.
    pub fn in_box(&self, z: &[Complex64]) -> bool {
        realify(z).iter().zip(&self.bounds).all(|(x, (lo, hi))| lo <= x && x <= hi)
    }
}
