//! The checkerboard path-summation propagator over a finite spacetime
//! region: exact enumeration of spin histories with bend counting, the
//! fixed-magnetization partition-function form, and the N-fold
//! transfer-matrix product. The two routes are exactly equal and serve as
//! each other's oracle.
//!
//! A path of N light-speed steps is a sign sequence (s_0, ..., s_{N-1})
//! with fixed sum M (the net displacement in lattice units). Every
//! adjacent pair, including the pair formed with the terminal boundary
//! spin s_N, contributes a factor sqrt(1 - (m tau)^2) when straight and
//! i m tau when bent.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{Mat2, C64};

/// Hard cap on exact enumeration; above this the path count is unwieldy.
pub const ENUMERATION_BUDGET: usize = 24;

/// Direction label of one checkerboard step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    /// Right mover, s = +1.
    Up,
    /// Left mover, s = -1.
    Down,
}

impl Spin {
    pub fn value(self) -> i64 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    /// Row/column index in the transfer-matrix basis (+1 first).
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];
}

/// A fixed-endpoint checkerboard problem: N steps, net displacement M
/// lattice units, bend amplitude set by m tau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathProblem {
    n_steps: usize,
    magnetization: i64,
    mass: f64,
    tau: f64,
}

impl PathProblem {
    pub fn new(n_steps: usize, magnetization: i64, mass: f64, tau: f64) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::Domain("need at least one step".into()));
        }
        if magnetization.unsigned_abs() as usize > n_steps {
            return Err(Error::Domain(format!(
                "|M| = {} exceeds N = {n_steps}",
                magnetization.unsigned_abs()
            )));
        }
        if (n_steps as i64 - magnetization) % 2 != 0 {
            return Err(Error::InvalidParity {
                n: n_steps,
                m: magnetization,
            });
        }
        if !(mass >= 0.0 && mass.is_finite()) || !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!(
                "mass and tau must be finite with mass >= 0, tau > 0: {mass}, {tau}"
            )));
        }
        let eps = mass * tau;
        if eps > 1.0 {
            return Err(Error::Domain(format!("m tau = {eps} exceeds 1")));
        }
        Ok(Self {
            n_steps,
            magnetization,
            mass,
            tau,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn magnetization(&self) -> i64 {
        self.magnetization
    }

    /// Left-moving edge count P = (N - M)/2 of the allowed region.
    pub fn p_edge(&self) -> usize {
        ((self.n_steps as i64 - self.magnetization) / 2) as usize
    }

    /// Right-moving edge count Q = (N + M)/2 of the allowed region.
    pub fn q_edge(&self) -> usize {
        ((self.n_steps as i64 + self.magnetization) / 2) as usize
    }

    /// Bend amplitude parameter eps = m tau.
    pub fn eps(&self) -> f64 {
        self.mass * self.tau
    }

    /// Straight-segment amplitude sqrt(1 - eps^2).
    pub fn straight_amp(&self) -> f64 {
        (1.0 - self.eps() * self.eps()).sqrt()
    }

    /// Bend amplitude i eps.
    pub fn bend_amp(&self) -> C64 {
        C64::new(0.0, self.eps())
    }
}

/// Number of N-step paths with net displacement M: the binomial
/// C(P + Q, P) over the edge counts of the allowed region.
pub fn count_paths(prob: &PathProblem) -> u128 {
    binomial(prob.p_edge() + prob.q_edge(), prob.p_edge())
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc
}

/// Count admissible sign sequences by direct search; equals
/// [`count_paths`] and exists to keep the enumeration honest.
pub fn enumerate_path_count(prob: &PathProblem) -> Result<u128> {
    check_budget(prob)?;
    let mut total = 0u128;
    for s0 in Spin::BOTH {
        dfs_count(prob, 1, s0.value(), &mut total);
    }
    Ok(total)
}

fn dfs_count(prob: &PathProblem, depth: usize, partial: i64, total: &mut u128) {
    let remaining = (prob.n_steps - depth) as i64;
    let gap = prob.magnetization - partial;
    if gap.abs() > remaining || (gap + remaining) % 2 != 0 {
        return;
    }
    if depth == prob.n_steps {
        *total += 1;
        return;
    }
    dfs_count(prob, depth + 1, partial + 1, total);
    dfs_count(prob, depth + 1, partial - 1, total);
}

fn check_budget(prob: &PathProblem) -> Result<()> {
    if prob.n_steps > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            n: prob.n_steps,
            max: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Weighting rule for path amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weighting {
    /// Unitary rule: straight pairs carry sqrt(1 - (m tau)^2).
    Unitary,
    /// Comparison mode with unit weight on straight pairs, i.e. the
    /// historical sum that is unitary only in the continuum limit.
    BendOnly,
}

/// Kernel entry with both boundary spins fixed, by exact enumeration.
pub fn enumerate_kernel(prob: &PathProblem, s0: Spin, s_n: Spin) -> Result<C64> {
    enumerate_with(prob, Some(s0), s_n, Weighting::Unitary)
}

/// Default kernel column: the fixed-endpoint entry summed over the initial spin.
pub fn enumerate_kernel_summed(prob: &PathProblem, s_n: Spin) -> Result<C64> {
    enumerate_with(prob, None, s_n, Weighting::Unitary)
}

/// Comparison mode dropping the straight-segment factor.
pub fn enumerate_kernel_bend_only(prob: &PathProblem, s0: Spin, s_n: Spin) -> Result<C64> {
    enumerate_with(prob, Some(s0), s_n, Weighting::BendOnly)
}

fn enumerate_with(
    prob: &PathProblem,
    s0: Option<Spin>,
    s_n: Spin,
    weighting: Weighting,
) -> Result<C64> {
    check_budget(prob)?;
    let n = prob.n_steps;
    // amplitude lookup: weight(R) = straight^(N-R) * bend^R
    let straight = match weighting {
        Weighting::Unitary => prob.straight_amp(),
        Weighting::BendOnly => 1.0,
    };
    let bend = prob.bend_amp();
    let mut weight_by_bends = Vec::with_capacity(n + 1);
    for r in 0..=n {
        weight_by_bends.push(C64::new(straight.powi((n - r) as i32), 0.0) * bend.powu(r as u32));
    }
    let mut acc = C64::new(0.0, 0.0);
    let starts = match s0 {
        Some(s) => vec![s],
        None => Spin::BOTH.to_vec(),
    };
    for start in starts {
        dfs_kernel(
            prob,
            1,
            start.value(),
            0,
            start.value(),
            s_n.value(),
            &weight_by_bends,
            &mut acc,
        );
    }
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn dfs_kernel(
    prob: &PathProblem,
    depth: usize,
    partial: i64,
    bends: usize,
    prev: i64,
    s_n: i64,
    weight_by_bends: &[C64],
    acc: &mut C64,
) {
    let remaining = (prob.n_steps - depth) as i64;
    let gap = prob.magnetization - partial;
    if gap.abs() > remaining || (gap + remaining) % 2 != 0 {
        return;
    }
    if depth == prob.n_steps {
        let total_bends = bends + usize::from(prev != s_n);
        *acc += weight_by_bends[total_bends];
        return;
    }
    for next in [1i64, -1] {
        dfs_kernel(
            prob,
            depth + 1,
            partial + next,
            bends + usize::from(prev != next),
            next,
            s_n,
            weight_by_bends,
            acc,
        );
    }
}

/// Number of Fourier modes resolving the fixed-magnetization constraint.
///
/// The magnetization of an N-spin chain differs from M by an even integer
/// in [-2N, 2N], so 2N + 1 equally spaced modes make the delta exact; with
/// only 2N modes the sum aliases sequences with |M - sum| = 2N (and, for
/// frequencies 2 pi n / N, every |M - sum| that is a multiple of N).
pub fn mode_count(n_steps: usize) -> usize {
    2 * n_steps + 1
}

/// One per-mode transfer matrix, its couplings, and its collide/stream
/// factorization.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    /// Mode index n in [-N, N].
    pub mode_index: i64,
    /// Mode angle omega_n = 2 pi n / (2N + 1), playing the role of ell k_z.
    pub omega: f64,
    /// mu = -log(sqrt(1 - (m tau)^2)) / 2, the straight-segment coupling.
    pub mu: C64,
    /// nu = -log(i m tau) / 2 on the principal branch; only e^{-2 nu}
    /// is ever consumed, so the branch choice is unobservable.
    pub nu: C64,
    /// The matrix U = C S with row/column order (+1, -1).
    pub matrix: Mat2,
}

impl TransferMatrix {
    pub fn new(prob: &PathProblem, mode_index: i64) -> Result<Self> {
        let modes = mode_count(prob.n_steps) as i64;
        if mode_index.abs() > prob.n_steps as i64 {
            return Err(Error::Domain(format!(
                "mode index {mode_index} outside [-N, N] for N = {}",
                prob.n_steps
            )));
        }
        let omega = 2.0 * PI * mode_index as f64 / modes as f64;
        let straight = C64::new(prob.straight_amp(), 0.0);
        let bend = prob.bend_amp();
        let mu = -straight.ln() * C64::new(0.5, 0.0);
        let nu = -bend.ln() * C64::new(0.5, 0.0);
        let mat =
            Self::collide_factor_of(omega, straight, bend).mul(&Self::stream_factor_of(omega));
        Ok(Self {
            mode_index,
            omega,
            mu,
            nu,
            matrix: mat,
        })
    }

    fn stream_factor_of(omega: f64) -> Mat2 {
        Mat2::new([
            [C64::from_polar(1.0, -omega), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::from_polar(1.0, omega)],
        ])
    }

    // With the diagonal stream applied second (U = C S), the bend phases
    // sit conjugate to the stream phases so they cancel in the product:
    // (C S)[0][1] = b e^{-i w} e^{+i w} = b.
    fn collide_factor_of(omega: f64, straight: C64, bend: C64) -> Mat2 {
        Mat2::new([
            [straight, bend * C64::from_polar(1.0, -omega)],
            [bend * C64::from_polar(1.0, omega), straight],
        ])
    }

    /// Diagonal stream factor S = diag(e^{-i omega}, e^{+i omega}).
    pub fn stream_factor(&self) -> Mat2 {
        Self::stream_factor_of(self.omega)
    }

    /// Collide factor C with the couplings on the off-diagonal.
    pub fn collide_factor(&self) -> Mat2 {
        Self::collide_factor_of(
            self.omega,
            C64::new((-2.0 * self.mu).exp().re, 0.0),
            (-C64::new(2.0, 0.0) * self.nu).exp(),
        )
    }

    /// N-th matrix power of the transfer matrix.
    pub fn power(&self, n: usize) -> Mat2 {
        let mut acc = Mat2::identity();
        for _ in 0..n {
            acc = acc.mul(&self.matrix);
        }
        acc
    }
}

/// Kernel entry with both boundary spins fixed, by the mode-summed
/// transfer-matrix product:
/// K = (1/modes) sum_n e^{i omega_n M} e^{-i (omega_n / 2)(s0 - sN)}
///     [U_n^N]_{sN, s0}.
pub fn transfer_kernel(prob: &PathProblem, s0: Spin, s_n: Spin) -> Result<C64> {
    let n = prob.n_steps;
    let modes = mode_count(n);
    let m = prob.magnetization as f64;
    let mut acc = C64::new(0.0, 0.0);
    // ascending mode order keeps the reduction deterministic
    for mode in -(n as i64)..=(n as i64) {
        let tm = TransferMatrix::new(prob, mode)?;
        let z = tm.power(n);
        let boundary = C64::from_polar(1.0, -0.5 * tm.omega * (s0.value() - s_n.value()) as f64);
        let constraint = C64::from_polar(1.0, tm.omega * m);
        acc += constraint * boundary * z.0[s_n.index()][s0.index()];
    }
    Ok(acc / modes as f64)
}

/// Transfer-route kernel column summed over the initial spin.
pub fn transfer_kernel_summed(prob: &PathProblem, s_n: Spin) -> Result<C64> {
    Ok(transfer_kernel(prob, Spin::Up, s_n)? + transfer_kernel(prob, Spin::Down, s_n)?)
}

/// The two eigenphases e^{-/+ i arccos sqrt(1 - (E tau)^2)} of the mode-n
/// transfer matrix, with E from the grid-level energy relation at
/// ell k = omega_n.
///
/// For modes with |omega| > pi/2 the cosine of the phase angle is the
/// signed quantity sqrt(1 - eps^2) cos(omega); the arccos is continued
/// into the second quadrant there so the result always matches direct
/// diagonalization.
pub fn transfer_generator_phase(prob: &PathProblem, mode_index: i64) -> Result<(C64, C64)> {
    let tm = TransferMatrix::new(prob, mode_index)?;
    let eps = prob.eps();
    let e_tau = ((tm.omega.sin().powi(2)) + eps * eps * tm.omega.cos().powi(2)).sqrt();
    if e_tau > 1.0 {
        return Err(Error::Domain(format!("E tau = {e_tau} exceeds 1")));
    }
    debug_assert!(
        ((1.0 - e_tau * e_tau).sqrt() - (prob.straight_amp() * tm.omega.cos()).abs()).abs() < 1e-12
    );
    let theta = (prob.straight_amp() * tm.omega.cos())
        .clamp(-1.0, 1.0)
        .acos();
    Ok((C64::from_polar(1.0, -theta), C64::from_polar(1.0, theta)))
}
