//! Two-grid overset channel for 1-D advection: a coarse "slow" line grid
//! spanning the whole domain and a finer "fast" patch inset in its middle.
//!
//! Layout, for `c > 0` (flow left to right):
//!
//! ```text
//!   inflow SAT                hole (deactivated)              outflow free
//!   v                         v                               v
//!   s s s s s s s s s s . . . . . . . . . . . s s s s s s s s s   slow
//!             f f f f f f f f f f f f f f f f f f f               fast
//!             ^^                              ^
//!             fringe rows (penalized)         receiver row r0
//! ```
//!
//! The slow grid is split into an upstream block (rows `0..i0+5`) and a
//! downstream block (rows `i1-5..`); the rows between are cut (their RHS is
//! zero, their state frozen), so each block acts as an independent SBP line
//! operator. Data moves one way: the fast patch picks up its two upstream
//! fringe rows from the upstream slow block, and the downstream slow block
//! picks up its first row from the fast patch, each through a four-point
//! Lagrange interpolant applied as a characteristic SAT. Outflow-side fringe
//! rows keep their interpolation maps for diagnostics but carry no penalty:
//! with upwind flow, penalizing them would inject downstream information.
//!
//! The five-row overlap margins keep every interpolation stencil strictly
//! inside its donor block and away from that block's own closures.

use super::{Grid1D, PdeError, SbpOperator, SAT_SIGMA};
use nalgebra::DMatrix;

/// Overlap margin: slow rows kept active past each end of the fast patch.
const MARGIN: usize = 5;
/// Lagrange interpolation stencil width.
const STENCIL: usize = 4;

/// One interpolation transfer: `receiver` (an index in the receiving grid)
/// takes the value `sum(weights[k] * donor[donor_base + k])` from the donor
/// grid. `tau` is the penalty strength per unit wave speed; unpenalized maps
/// (outflow-side fringes) store `tau = 0`.
#[derive(Debug, Clone)]
pub struct FringeMap {
    pub receiver: usize,
    pub donor_base: usize,
    pub weights: [f64; STENCIL],
    pub tau: f64,
    pub penalized: bool,
}

impl FringeMap {
    /// Interpolated donor value at the receiver location.
    pub fn interpolate(&self, donor: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(&donor[self.donor_base..self.donor_base + STENCIL])
            .map(|(w, u)| w * u)
            .sum()
    }
}

/// The assembled two-grid channel. Constructed once by [`OversetPair1D::build`];
/// all index arithmetic, donor searches and penalty scales are frozen here so
/// the RHS is straight-line code.
#[derive(Debug, Clone)]
pub struct OversetPair1D {
    grid_slow: Grid1D,
    grid_fast: Grid1D,
    op: SbpOperator,
    i0: usize,
    i1: usize,
    refine: usize,
    n_l: usize,
    r0: usize,
    inflow_tau: f64,
    fast_fringes: Vec<FringeMap>,
    slow_receiver: FringeMap,
}

fn lagrange_weights(nodes: &[f64], x: f64) -> [f64; STENCIL] {
    let mut w = [1.0; STENCIL];
    for k in 0..STENCIL {
        for j in 0..STENCIL {
            if j != k {
                w[k] *= (x - nodes[j]) / (nodes[k] - nodes[j]);
            }
        }
    }
    w
}

impl OversetPair1D {
    /// Build the channel on `domain` with `n_slow` coarse points, the fast
    /// patch spanning slow nodes `i0..=i1` at `refine` times the resolution.
    ///
    /// Margins are validated so that both slow blocks and the fast patch are
    /// legal SBP grids and every donor stencil stays inside its active donor
    /// block: `i0 >= 4`, `i1 <= n_slow - 4`, `i1 - i0 >= 11`, `refine >= 2`.
    pub fn build(
        domain: (f64, f64),
        n_slow: usize,
        i0: usize,
        i1: usize,
        refine: usize,
    ) -> Result<Self, PdeError> {
        let grid_slow = Grid1D::line(domain.0, domain.1, n_slow)?;
        if refine < 2 {
            return Err(PdeError::BadLayout(format!(
                "refine {refine} < 2 leaves the fast patch no finer than the slow grid"
            )));
        }
        if i0 < STENCIL {
            return Err(PdeError::BadLayout(format!(
                "i0 = {i0} leaves the upstream slow block under 9 points"
            )));
        }
        if i1 + STENCIL > n_slow {
            return Err(PdeError::BadLayout(format!(
                "i1 = {i1} leaves the downstream slow block under 9 points (n_slow = {n_slow})"
            )));
        }
        if i1 - i0 < 2 * MARGIN + 1 {
            return Err(PdeError::BadLayout(format!(
                "patch span i1 - i0 = {} cannot hold two {MARGIN}-row margins and a hole",
                i1 - i0
            )));
        }

        let op = SbpOperator::order_4_2();
        let n_f = (i1 - i0) * refine + 1;
        let grid_fast = Grid1D::line(grid_slow.x[i0], grid_slow.x[i1], n_f)?;
        let n_l = i0 + MARGIN;
        let r0 = i1 - MARGIN;
        let dx_s = grid_slow.dx;
        let dx_f = grid_fast.dx;
        let a = grid_slow.x[0];

        // Upstream fringes: fast rows 0 and 1 receive from the L block.
        // Downstream rows n_f-2 and n_f-1 get the mirror maps from the R
        // block, unpenalized.
        let mut fast_fringes = Vec::with_capacity(4);
        for row in [0usize, 1] {
            let x = grid_fast.x[row];
            let base = (((x - a) / dx_s + 1e-12).floor() as isize - 1)
                .clamp(0, (n_l - STENCIL) as isize) as usize;
            let weights = lagrange_weights(&grid_slow.x[base..base + STENCIL], x);
            fast_fringes.push(FringeMap {
                receiver: row,
                donor_base: base,
                weights,
                tau: SAT_SIGMA / (op.boundary_norm(row) * dx_f),
                penalized: true,
            });
        }
        for row in [n_f - 2, n_f - 1] {
            let x = grid_fast.x[row];
            let base = (((x - a) / dx_s + 1e-12).floor() as isize - 1)
                .clamp(r0 as isize, (n_slow - STENCIL) as isize) as usize;
            let weights = lagrange_weights(&grid_slow.x[base..base + STENCIL], x);
            fast_fringes.push(FringeMap {
                receiver: row,
                donor_base: base,
                weights,
                tau: 0.0,
                penalized: false,
            });
        }

        // Downstream slow block head receives from the fast patch.
        let xr = grid_slow.x[r0];
        let rbase = (((xr - grid_fast.x[0]) / dx_f + 1e-12).floor() as isize - 1)
            .clamp(0, (n_f - STENCIL) as isize) as usize;
        let slow_receiver = FringeMap {
            receiver: r0,
            donor_base: rbase,
            weights: lagrange_weights(&grid_fast.x[rbase..rbase + STENCIL], xr),
            tau: SAT_SIGMA / (op.boundary_norm(0) * dx_s),
            penalized: true,
        };

        let pair = OversetPair1D {
            inflow_tau: SAT_SIGMA / (op.boundary_norm(0) * dx_s),
            grid_slow,
            grid_fast,
            op,
            i0,
            i1,
            refine,
            n_l,
            r0,
            fast_fringes,
            slow_receiver,
        };
        pair.check_transfers()?;
        Ok(pair)
    }

    /// Defensive post-construction checks: donor stencils inside their donor
    /// blocks, weights a partition of unity.
    fn check_transfers(&self) -> Result<(), PdeError> {
        let maps = self
            .fast_fringes
            .iter()
            .map(|m| (m, if m.penalized { self.n_l } else { self.grid_slow.len() }))
            .chain(std::iter::once((&self.slow_receiver, self.grid_fast.len())));
        for (m, donor_len) in maps {
            if m.donor_base + STENCIL > donor_len {
                return Err(PdeError::BadLayout(format!(
                    "donor stencil {}..{} leaves the donor block of {donor_len}",
                    m.donor_base,
                    m.donor_base + STENCIL
                )));
            }
            let s: f64 = m.weights.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(PdeError::BadLayout(format!(
                    "interpolation weights sum to {s}, not one"
                )));
            }
        }
        Ok(())
    }

    pub fn grid_slow(&self) -> &Grid1D {
        &self.grid_slow
    }

    pub fn grid_fast(&self) -> &Grid1D {
        &self.grid_fast
    }

    pub fn operator(&self) -> &SbpOperator {
        &self.op
    }

    pub fn refine(&self) -> usize {
        self.refine
    }

    /// Slow nodes spanned by the fast patch.
    pub fn patch(&self) -> (usize, usize) {
        (self.i0, self.i1)
    }

    /// Deactivated slow rows, as a half-open range.
    pub fn hole(&self) -> std::ops::Range<usize> {
        self.i0 + MARGIN..self.i1 - MARGIN
    }

    /// Rows of the upstream slow block (`0..n_l`).
    pub fn upstream_len(&self) -> usize {
        self.n_l
    }

    /// First row of the downstream slow block.
    pub fn receiver_row(&self) -> usize {
        self.r0
    }

    pub fn fast_fringes(&self) -> &[FringeMap] {
        &self.fast_fringes
    }

    pub fn slow_receiver(&self) -> &FringeMap {
        &self.slow_receiver
    }

    /// Slow indices that actually evolve (both blocks, hole excluded).
    pub fn active_slow_indices(&self) -> Vec<usize> {
        (0..self.n_l).chain(self.r0..self.grid_slow.len()).collect()
    }

    /// Number of evolving degrees of freedom across both grids.
    pub fn active_len(&self) -> usize {
        self.n_l + self.grid_fast.len() + (self.grid_slow.len() - self.r0)
    }

    /// Semi-discrete RHS of both grids. `inflow` is the characteristic data
    /// `g(t)` fed to the domain inlet. Hole rows come back exactly zero, so
    /// the frozen state there never moves.
    pub fn rhs(
        &self,
        u_slow: &[f64],
        u_fast: &[f64],
        wave_speed: f64,
        inflow: f64,
    ) -> Result<(Vec<f64>, Vec<f64>), PdeError> {
        let n_s = self.grid_slow.len();
        let n_f = self.grid_fast.len();
        if u_slow.len() != n_s {
            return Err(PdeError::LengthMismatch {
                want: n_s,
                got: u_slow.len(),
            });
        }
        if u_fast.len() != n_f {
            return Err(PdeError::LengthMismatch {
                want: n_f,
                got: u_fast.len(),
            });
        }
        // The one-way donor layout is only upwind-consistent for c > 0.
        if !(wave_speed > 0.0) {
            return Err(PdeError::BadWaveSpeed(wave_speed));
        }
        let c = wave_speed;

        let mut rs = vec![0.0; n_s];
        let du_l = self.op.apply(&u_slow[..self.n_l], self.grid_slow.dx, false)?;
        for (r, d) in rs[..self.n_l].iter_mut().zip(&du_l) {
            *r = -c * d;
        }
        rs[0] -= c * self.inflow_tau * (u_slow[0] - inflow);
        let du_r = self.op.apply(&u_slow[self.r0..], self.grid_slow.dx, false)?;
        for (r, d) in rs[self.r0..].iter_mut().zip(&du_r) {
            *r = -c * d;
        }
        let uhat = self.slow_receiver.interpolate(u_fast);
        rs[self.r0] -= c * self.slow_receiver.tau * (u_slow[self.r0] - uhat);

        let du_f = self.op.apply(u_fast, self.grid_fast.dx, false)?;
        let mut rf: Vec<f64> = du_f.iter().map(|d| -c * d).collect();
        for m in self.fast_fringes.iter().filter(|m| m.penalized) {
            let uhat = m.interpolate(u_slow);
            rf[m.receiver] -= c * m.tau * (u_fast[m.receiver] - uhat);
        }
        Ok((rs, rf))
    }

    /// Pack `(u_slow, u_fast)` into the active ordering `[L block | fast | R
    /// block]` used by [`OversetPair1D::assemble_operator`].
    pub fn pack_active(&self, u_slow: &[f64], u_fast: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.active_len());
        v.extend_from_slice(&u_slow[..self.n_l]);
        v.extend_from_slice(u_fast);
        v.extend_from_slice(&u_slow[self.r0..]);
        v
    }

    /// Scatter an active vector back to full `(u_slow, u_fast)` storage,
    /// zero in the hole.
    pub fn unpack_active(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n_f = self.grid_fast.len();
        let mut us = vec![0.0; self.grid_slow.len()];
        us[..self.n_l].copy_from_slice(&v[..self.n_l]);
        us[self.r0..].copy_from_slice(&v[self.n_l + n_f..]);
        let uf = v[self.n_l..self.n_l + n_f].to_vec();
        (us, uf)
    }

    /// Dense semi-discrete operator on the active ordering, with zero inflow
    /// data. The RHS is linear, so probing with unit vectors is exact; the
    /// result is what the coupled-spectrum and step-matrix analyses consume.
    pub fn assemble_operator(&self, wave_speed: f64) -> Result<DMatrix<f64>, PdeError> {
        let n = self.active_len();
        let mut a = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let (us, uf) = self.unpack_active(&e);
            let (rs, rf) = self.rhs(&us, &uf, wave_speed, 0.0)?;
            let col = self.pack_active(&rs, &rf);
            for (i, v) in col.iter().enumerate() {
                a[(i, j)] = *v;
            }
            e[j] = 0.0;
        }
        Ok(a)
    }
}

/// Free-function form of [`OversetPair1D::rhs`].
pub fn overset_rhs(
    pair: &OversetPair1D,
    u_slow: &[f64],
    u_fast: &[f64],
    wave_speed: f64,
    inflow: f64,
) -> Result<(Vec<f64>, Vec<f64>), PdeError> {
    pair.rhs(u_slow, u_fast, wave_speed, inflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multirate::{mrab_integrate, MrabConfig, TwoRateSystem};
    use proptest::prelude::*;

    fn pair33() -> OversetPair1D {
        OversetPair1D::build((0.0, 1.0), 33, 9, 23, 4).unwrap()
    }

    #[test]
    fn geometry_and_margins() {
        let p = pair33();
        assert_eq!(p.upstream_len(), 14);
        assert_eq!(p.receiver_row(), 18);
        assert_eq!(p.grid_fast().len(), 57);
        assert_eq!(p.hole(), 14..18);
        assert_eq!(p.active_len(), 14 + 57 + 15);
        assert_eq!(p.active_slow_indices().len(), 29);
        // Patch endpoints coincide with slow nodes.
        let (i0, i1) = p.patch();
        assert!((p.grid_fast().x[0] - p.grid_slow().x[i0]).abs() < 1e-15);
        assert!((p.grid_fast().x[56] - p.grid_slow().x[i1]).abs() < 1e-13);
        // Every refine-th fast node lands on a slow node.
        for k in 0..=(i1 - i0) {
            let xf = p.grid_fast().x[k * p.refine()];
            let xs = p.grid_slow().x[i0 + k];
            assert!((xf - xs).abs() < 1e-13);
        }
    }

    #[test]
    fn fringe_maps_partition_unity_and_stay_inside_donors() {
        let p = OversetPair1D::build((0.0, 1.0), 65, 19, 45, 4).unwrap();
        assert_eq!(p.fast_fringes().len(), 4);
        for m in p.fast_fringes() {
            let s: f64 = m.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-13);
            if m.penalized {
                assert!(m.receiver <= 1);
                assert!(m.donor_base + 4 <= p.upstream_len());
                assert!(m.tau > 0.0);
            } else {
                assert!(m.receiver >= p.grid_fast().len() - 2);
                assert!(m.donor_base >= p.receiver_row());
                assert!(m.donor_base + 4 <= p.grid_slow().len());
                assert_eq!(m.tau, 0.0);
            }
        }
        let r = p.slow_receiver();
        let s: f64 = r.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-13);
        assert!(r.donor_base + 4 <= p.grid_fast().len());
    }

    #[test]
    fn transfers_reproduce_cubics_exactly() {
        // Four-point Lagrange maps are exact through degree three.
        let p = pair33();
        let q = |x: f64| 0.3 - 1.7 * x + 2.2 * x * x - 0.9 * x * x * x;
        let us: Vec<f64> = p.grid_slow().x.iter().map(|&x| q(x)).collect();
        let uf: Vec<f64> = p.grid_fast().x.iter().map(|&x| q(x)).collect();
        for m in p.fast_fringes() {
            let x = p.grid_fast().x[m.receiver];
            assert!((m.interpolate(&us) - q(x)).abs() < 1e-12);
        }
        let xr = p.grid_slow().x[p.receiver_row()];
        assert!((p.slow_receiver().interpolate(&uf) - q(xr)).abs() < 1e-12);
    }

    #[test]
    fn coincident_receivers_get_nodal_weights() {
        // Fast row 0 and the slow receiver sit exactly on donor nodes, so
        // their stencils collapse to a Kronecker delta at offset one.
        let p = pair33();
        let m0 = &p.fast_fringes()[0];
        for (k, &w) in m0.weights.iter().enumerate() {
            let want = if k == 1 { 1.0 } else { 0.0 };
            assert!((w - want).abs() < 1e-12);
        }
        let r = p.slow_receiver();
        for (k, &w) in r.weights.iter().enumerate() {
            let want = if k == 1 { 1.0 } else { 0.0 };
            assert!((w - want).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_state_is_an_equilibrium() {
        let p = pair33();
        let us = vec![0.8; p.grid_slow().len()];
        let uf = vec![0.8; p.grid_fast().len()];
        let (rs, rf) = p.rhs(&us, &uf, 1.0, 0.8).unwrap();
        for v in rs.iter().chain(&rf) {
            assert!(v.abs() < 1e-12, "constant RHS residual {v}");
        }
    }

    #[test]
    fn hole_rows_are_inert() {
        let p = pair33();
        let us: Vec<f64> = (0..p.grid_slow().len()).map(|i| (i as f64 * 0.83).sin()).collect();
        let uf: Vec<f64> = (0..p.grid_fast().len()).map(|i| (i as f64 * 0.51).cos()).collect();
        let (rs, _) = p.rhs(&us, &uf, 2.0, 0.3).unwrap();
        for i in p.hole() {
            assert_eq!(rs[i], 0.0);
        }
    }

    #[test]
    fn operator_is_block_triangular_upstream_to_downstream() {
        // Active ordering [L | F | R]: L sees nothing downstream, F sees
        // only L (fringes), R sees only F (receiver). Zero blocks are exact.
        let p = pair33();
        let a = p.assemble_operator(1.0).unwrap();
        let n_l = p.upstream_len();
        let n_f = p.grid_fast().len();
        let n = p.active_len();
        for i in 0..n_l {
            for j in n_l..n {
                assert_eq!(a[(i, j)], 0.0, "L row {i} reads downstream col {j}");
            }
        }
        for i in n_l..n_l + n_f {
            for j in n_l + n_f..n {
                assert_eq!(a[(i, j)], 0.0, "F row {i} reads R col {j}");
            }
        }
    }

    #[test]
    fn assembled_operator_matches_rhs() {
        let p = pair33();
        let a = p.assemble_operator(1.7).unwrap();
        let us: Vec<f64> = p.grid_slow().x.iter().map(|&x| (3.0 * x).sin()).collect();
        let uf: Vec<f64> = p.grid_fast().x.iter().map(|&x| (3.0 * x).sin()).collect();
        let (rs, rf) = p.rhs(&us, &uf, 1.7, 0.0).unwrap();
        let packed = nalgebra::DVector::from_vec(p.pack_active(&us, &uf));
        let want = nalgebra::DVector::from_vec(p.pack_active(&rs, &rf));
        let got = &a * packed;
        for i in 0..p.active_len() {
            assert!((got[i] - want[i]).abs() < 1e-11, "row {i}");
        }
    }

    #[test]
    fn coupled_spectrum_is_strictly_stable_with_penalty_modes() {
        // Every eigenvalue sits in the open left half-plane; the SAT rows
        // inject strongly damped modes far from the advective arcs.
        let p = pair33();
        let a = p.assemble_operator(1.0).unwrap();
        let schur = nalgebra::Schur::try_new(a, 1e-12, 1_000_000).unwrap();
        let eig = schur.complex_eigenvalues();
        let max_re = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let min_re = eig.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        assert!(max_re <= -1e-3, "rightmost eigenvalue {max_re}");
        assert!(min_re <= -10.0, "no penalty-damped modes, leftmost {min_re}");
    }

    #[test]
    fn bad_layouts_are_rejected() {
        assert!(OversetPair1D::build((0.0, 1.0), 33, 3, 23, 4).is_err());
        assert!(OversetPair1D::build((0.0, 1.0), 33, 9, 30, 4).is_err());
        assert!(OversetPair1D::build((0.0, 1.0), 33, 9, 19, 4).is_err());
        assert!(OversetPair1D::build((0.0, 1.0), 33, 9, 23, 1).is_err());
        assert!(OversetPair1D::build((1.0, 0.0), 33, 9, 23, 4).is_err());
        let p = pair33();
        assert!(matches!(
            p.rhs(&vec![0.0; 33], &vec![0.0; 57], -1.0, 0.0),
            Err(PdeError::BadWaveSpeed(_))
        ));
        assert!(p.rhs(&vec![0.0; 32], &vec![0.0; 57], 1.0, 0.0).is_err());
        assert!(p.rhs(&vec![0.0; 33], &vec![0.0; 56], 1.0, 0.0).is_err());
    }

    /// Advect sin(2 pi (x - t)) through the channel with MRAB and report the
    /// max-norm error over active points at the final time.
    fn mrab_channel_error(n_s: usize, i0: usize, i1: usize, sr: usize) -> (f64, f64) {
        let c = 1.0;
        let tau = 2.0 * std::f64::consts::PI;
        let p = OversetPair1D::build((0.0, 1.0), n_s, i0, i1, 4).unwrap();
        let exact = |x: f64, t: f64| (tau * (x - c * t)).sin();
        let us0: Vec<f64> = p.grid_slow().x.iter().map(|&x| exact(x, 0.0)).collect();
        let uf0: Vec<f64> = p.grid_fast().x.iter().map(|&x| exact(x, 0.0)).collect();
        let h = 0.3 * p.grid_fast().dx;
        let big_h = sr as f64 * h;
        let n_macro = (0.8 / big_h).round();
        let t_end = n_macro * big_h;
        let pf = &p;
        let mut sys = TwoRateSystem {
            dim_f: p.grid_fast().len(),
            dim_s: p.grid_slow().len(),
            rhs_f: |t: f64, f: &[f64], s: &[f64]| {
                pf.rhs(s, f, c, exact(0.0, t)).unwrap().1
            },
            rhs_s: |t: f64, f: &[f64], s: &[f64]| {
                pf.rhs(s, f, c, exact(0.0, t)).unwrap().0
            },
        };
        let cfg = MrabConfig::new(3, 3, sr, big_h);
        let run = mrab_integrate(&mut sys, 0.0, &uf0, &us0, t_end, &cfg).unwrap();
        let mut err = 0.0f64;
        for &i in &p.active_slow_indices() {
            err = err.max((run.s[i] - exact(p.grid_slow().x[i], run.t)).abs());
        }
        for (i, &x) in p.grid_fast().x.iter().enumerate() {
            err = err.max((run.f[i] - exact(x, run.t)).abs());
        }
        (err, p.grid_fast().dx)
    }

    #[test]
    fn mrab_advection_converges_on_the_channel() {
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for (n_s, i0, i1) in [(33usize, 9usize, 23usize), (65, 19, 45), (129, 39, 90)] {
            let (e, h) = mrab_channel_error(n_s, i0, i1, 2);
            errs.push(e);
            hs.push(h);
        }
        let slope = (errs[0] / errs[2]).ln() / (hs[0] / hs[2]).ln();
        assert!(slope > 2.5, "channel EOC {slope}, errors {errs:?}");
    }

    #[test]
    fn mrab_preserves_constants_on_the_channel() {
        let p = OversetPair1D::build((0.0, 1.0), 65, 19, 45, 4).unwrap();
        let us0 = vec![1.0; p.grid_slow().len()];
        let uf0 = vec![1.0; p.grid_fast().len()];
        let h = 0.3 * p.grid_fast().dx;
        let big_h = 2.0 * h;
        let pf = &p;
        let mut sys = TwoRateSystem {
            dim_f: p.grid_fast().len(),
            dim_s: p.grid_slow().len(),
            rhs_f: |_t: f64, f: &[f64], s: &[f64]| pf.rhs(s, f, 1.0, 1.0).unwrap().1,
            rhs_s: |_t: f64, f: &[f64], s: &[f64]| pf.rhs(s, f, 1.0, 1.0).unwrap().0,
        };
        let cfg = MrabConfig::new(3, 3, 2, big_h);
        let run = mrab_integrate(&mut sys, 0.0, &uf0, &us0, 102.0 * big_h, &cfg).unwrap();
        let dev = run
            .s
            .iter()
            .chain(&run.f)
            .map(|v| (v - 1.0).abs())
            .fold(0.0f64, f64::max);
        assert!(dev < 1e-12, "constant drift {dev} after 100 macro steps");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        // Any legal layout yields transfers that are partitions of unity with
        // in-bounds donors, and keeps constants in equilibrium.
        #[test]
        fn prop_legal_layouts_build_sound_transfers(
            n_s in 33usize..120,
            gap in 11usize..20,
            off in 4usize..30,
            refine in 2usize..6,
        ) {
            let i0 = off.min(n_s - 4 - gap - 1).max(4);
            let i1 = i0 + gap;
            prop_assume!(i1 + 4 <= n_s);
            let p = OversetPair1D::build((0.0, 2.0), n_s, i0, i1, refine).unwrap();
            let us = vec![0.37; p.grid_slow().len()];
            let uf = vec![0.37; p.grid_fast().len()];
            let (rs, rf) = p.rhs(&us, &uf, 1.0, 0.37).unwrap();
            for v in rs.iter().chain(&rf) {
                prop_assert!(v.abs() < 1e-11);
            }
        }
    }
}
