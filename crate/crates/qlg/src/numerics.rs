//! Complex scalars, small fixed-size matrices, and the periodic lattice
//! field container shared by every other module.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex64;

/// Tolerance on `max |U U^dag - 1|` for anything claimed unitary.
pub const UNITARITY_TOL: f64 = 1e-12;

pub fn sigma_x() -> Mat2 {
    Mat2::new([
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ])
}

pub fn sigma_y() -> Mat2 {
    Mat2::new([
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        [C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    ])
}

pub fn sigma_z() -> Mat2 {
    Mat2::new([
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
    ])
}

/// The Hadamard-like involution (sigma_x + sigma_z)/sqrt(2) that exchanges
/// the chiral and mass-diagonal representations.
pub fn rotation_r() -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::new([
        [C64::new(s, 0.0), C64::new(s, 0.0)],
        [C64::new(s, 0.0), C64::new(-s, 0.0)],
    ])
}

/// Two-component spinor amplitude at one lattice site. `up` is the
/// right-moving (spin-up) amplitude, `down` the left-moving one.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor2 {
    pub up: C64,
    pub down: C64,
}

impl Spinor2 {
    pub fn new(up: C64, down: C64) -> Self {
        Self { up, down }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.up.re.is_finite()
            && self.up.im.is_finite()
            && self.down.re.is_finite()
            && self.down.im.is_finite()
    }

    pub fn scaled(&self, z: C64) -> Self {
        Self::new(self.up * z, self.down * z)
    }
}

/// A 2-spinor field over a periodic one-dimensional lattice, together with
/// the grid length `ell` and grid time `tau` it is sampled on.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    sites: Vec<Spinor2>,
    ell: f64,
    tau: f64,
}

impl SpinorField {
    pub fn new(sites: Vec<Spinor2>, ell: f64, tau: f64) -> Result<Self> {
        if sites.len() < 2 {
            return Err(Error::SizeMismatch(format!(
                "lattice needs at least 2 sites, got {}",
                sites.len()
            )));
        }
        if !(ell > 0.0 && ell.is_finite()) || !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!(
                "grid scales must be positive and finite: ell = {ell}, tau = {tau}"
            )));
        }
        if !sites.iter().all(Spinor2::is_finite) {
            return Err(Error::NonFinite("spinor field amplitudes"));
        }
        Ok(Self { sites, ell, tau })
    }

    pub fn zeros(len: usize, ell: f64, tau: f64) -> Result<Self> {
        Self::new(vec![Spinor2::zero(); len], ell, tau)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sites(&self) -> &[Spinor2] {
        &self.sites
    }

    pub fn sites_mut(&mut self) -> &mut [Spinor2] {
        &mut self.sites
    }

    pub fn site(&self, l: usize) -> Spinor2 {
        self.sites[l]
    }

    /// sqrt(sum_l |psi_up(l)|^2 + |psi_down(l)|^2), the lattice L2 norm.
    pub fn l2_norm(&self) -> f64 {
        self.sites.iter().map(Spinor2::norm_sqr).sum::<f64>().sqrt()
    }

    /// Rescale to unit L2 norm. Errors on a zero field.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.l2_norm();
        if n == 0.0 {
            return Err(Error::Domain("cannot normalize the zero field".into()));
        }
        let inv = C64::new(1.0 / n, 0.0);
        for s in &mut self.sites {
            *s = s.scaled(inv);
        }
        Ok(self)
    }

    pub fn scaled(mut self, z: C64) -> Self {
        for s in &mut self.sites {
            *s = s.scaled(z);
        }
        self
    }

    /// Inner product `<self|other>` with the conjugate on `self`.
    pub fn inner(&self, other: &SpinorField) -> C64 {
        self.sites
            .iter()
            .zip(&other.sites)
            .map(|(a, b)| a.up.conj() * b.up + a.down.conj() * b.down)
            .sum()
    }
}

/// 2 x 2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn new(rows: [[C64; 2]; 2]) -> Self {
        Self(rows)
    }

    pub fn zero() -> Self {
        Self([[C64::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.0[0][0] = C64::new(1.0, 0.0);
        m.0[1][1] = C64::new(1.0, 0.0);
        m
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }

    pub fn scaled(&self, z: C64) -> Mat2 {
        let mut out = *self;
        for row in &mut out.0 {
            for e in row {
                *e *= z;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2::new([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn apply(&self, s: Spinor2) -> Spinor2 {
        Spinor2::new(
            self.0[0][0] * s.up + self.0[0][1] * s.down,
            self.0[1][0] * s.up + self.0[1][1] * s.down,
        )
    }

    pub fn max_abs_diff(&self, rhs: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - rhs.0[i][j]).norm());
            }
        }
        worst
    }

    /// max |M M^dag - 1|, zero for an exactly unitary matrix.
    pub fn unitarity_error(&self) -> f64 {
        self.mul(&self.adjoint()).max_abs_diff(&Mat2::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() < tol
    }

    /// Eigenvalues from the characteristic quadratic.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let tr = self.trace();
        let disc = (tr * tr - self.det().scale(4.0)).sqrt();
        let half = C64::new(0.5, 0.0);
        ((tr + disc) * half, (tr - disc) * half)
    }
}

/// exp(-i * angle * A) = cos(angle) 1 - i sin(angle) A for an involution A.
pub fn mat_exp_involution(a: &Mat2, angle: f64) -> Result<Mat2> {
    let deviation = a.mul(a).max_abs_diff(&Mat2::identity());
    if deviation > UNITARITY_TOL {
        return Err(Error::NotInvolution { deviation });
    }
    let c = Mat2::identity().scaled(C64::new(angle.cos(), 0.0));
    let s = a.scaled(C64::new(0.0, -angle.sin()));
    Ok(c.add(&s))
}

/// 4 x 4 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl Mat4 {
    pub fn new(rows: [[C64; 4]; 4]) -> Self {
        Self(rows)
    }

    pub fn zero() -> Self {
        Self([[C64::new(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul(&self, rhs: &Mat4) -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..4 {
                    acc += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = acc;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat4) -> Mat4 {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }

    pub fn scaled(&self, z: C64) -> Mat4 {
        let mut out = *self;
        for row in &mut out.0 {
            for e in row {
                *e *= z;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, rhs: &Mat4) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - rhs.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn unitarity_error(&self) -> f64 {
        self.mul(&self.adjoint()).max_abs_diff(&Mat4::identity())
    }
}

/// Dense square complex matrix for the small-Q qubit algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMat {
    dim: usize,
    data: Vec<C64>,
}

impl DenseMat {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn from_mat2(m: &Mat2) -> Self {
        let mut out = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                out.set(i, j, m.0[i][j]);
            }
        }
        out
    }

    pub fn mul(&self, rhs: &DenseMat) -> DenseMat {
        assert_eq!(self.dim, rhs.dim, "dense matrix dimension mismatch");
        let n = self.dim;
        let mut out = DenseMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &DenseMat) -> DenseMat {
        assert_eq!(self.dim, rhs.dim, "dense matrix dimension mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, rhs: &DenseMat) -> DenseMat {
        assert_eq!(self.dim, rhs.dim, "dense matrix dimension mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
        out
    }

    pub fn scaled(&self, z: C64) -> DenseMat {
        let mut out = self.clone();
        for a in &mut out.data {
            *a *= z;
        }
        out
    }

    pub fn transpose(&self) -> DenseMat {
        let n = self.dim;
        let mut out = DenseMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> DenseMat {
        let n = self.dim;
        let mut out = DenseMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Kronecker product, left factor on the most significant index block.
    pub fn kron(&self, rhs: &DenseMat) -> DenseMat {
        let (na, nb) = (self.dim, rhs.dim);
        let n = na * nb;
        let mut out = DenseMat::zeros(n);
        for ia in 0..na {
            for ja in 0..na {
                let a = self.data[ia * na + ja];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for ib in 0..nb {
                    for jb in 0..nb {
                        out.data[(ia * nb + ib) * n + (ja * nb + jb)] = a * rhs.data[ib * nb + jb];
                    }
                }
            }
        }
        out
    }

    /// {A, B} = AB + BA.
    pub fn anticommutator(&self, rhs: &DenseMat) -> DenseMat {
        self.mul(rhs).add(&rhs.mul(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &DenseMat) -> f64 {
        assert_eq!(self.dim, rhs.dim, "dense matrix dimension mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
