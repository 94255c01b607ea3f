//! Estimation-based formation control and Jury-criterion gain design.
//!
//! Each agent is a double integrator `x+ = A x + B u + w` with
//! `A = [[1, h], [0, 1]] (x) I_n` and `B = [h^2/2, h]^T (x) I_n`. Neighbor
//! states only arrive once per window of `tau` steps, so the control law runs
//! on open-loop estimates `A^s x_snapshot` for both neighbors and self.
//!
//! Stability analysis uses scalar (`n = 1`) blocks. The error dynamics
//! decouple along the Laplacian eigenvectors into one 4x4 window map per
//! nonzero eigenvalue, whose characteristic quartic is checked with the Jury
//! table.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix2, RowVector2, SymmetricEigen, Vector2};

use crate::error::{check_positive, Error, Result};

/// Position (or offset-corrected position) and velocity of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub position: DVector<f64>,
    pub velocity: DVector<f64>,
}

impl AgentState {
    pub fn new(position: DVector<f64>, velocity: DVector<f64>) -> Result<Self> {
        if position.len() != velocity.len() {
            return Err(Error::DimensionMismatch {
                expected: position.len(),
                found: velocity.len(),
            });
        }
        Ok(AgentState { position, velocity })
    }

    pub fn from_slices(position: &[f64], velocity: &[f64]) -> Result<Self> {
        AgentState::new(
            DVector::from_column_slice(position),
            DVector::from_column_slice(velocity),
        )
    }

    pub fn zeros(dim: usize) -> Self {
        AgentState {
            position: DVector::zeros(dim),
            velocity: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.position.len()
    }

    /// `A^steps x`: coast for `steps` sampling periods with zero input.
    pub fn advanced(&self, steps: usize, h: f64) -> AgentState {
        AgentState {
            position: &self.position + &self.velocity * (steps as f64 * h),
            velocity: self.velocity.clone(),
        }
    }

    pub fn sub(&self, other: &AgentState) -> AgentState {
        AgentState {
            position: &self.position - &other.position,
            velocity: &self.velocity - &other.velocity,
        }
    }

    pub fn add_scaled(&mut self, other: &AgentState, scale: f64) {
        self.position += &other.position * scale;
        self.velocity += &other.velocity * scale;
    }

    /// Shift the position by `-offset`, moving into formation coordinates.
    pub fn offset_by(&self, offset: &DVector<f64>) -> AgentState {
        AgentState {
            position: &self.position - offset,
            velocity: self.velocity.clone(),
        }
    }

    /// Stacked `[p; v]` vector.
    pub fn stacked(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_iterator(2 * n, self.position.iter().chain(self.velocity.iter()).copied())
    }
}

/// Feedback gain `K = [alpha beta] (x) I_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain {
    alpha: f64,
    beta: f64,
}

impl Gain {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        Ok(Gain { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `K x`.
    pub fn apply(&self, x: &AgentState) -> DVector<f64> {
        &x.position * self.alpha + &x.velocity * self.beta
    }

    /// `K A^steps x`.
    pub fn apply_advanced(&self, steps: usize, h: f64, x: &AgentState) -> DVector<f64> {
        &x.position * self.alpha + &x.velocity * (self.alpha * steps as f64 * h + self.beta)
    }

    fn row(&self) -> RowVector2<f64> {
        RowVector2::new(self.alpha, self.beta)
    }
}

/// Fixed undirected weighted graph the controller runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlTopology {
    weights: DMatrix<f64>,
}

impl ControlTopology {
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if n == 0 || weights.ncols() != n {
            return Err(Error::InvalidTopology);
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::InvalidTopology);
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !(w >= 0.0 && w.is_finite()) || w != weights[(j, i)] {
                    return Err(Error::InvalidTopology);
                }
            }
        }
        Ok(ControlTopology { weights })
    }

    /// Build from undirected `(i, j, weight)` triples with zero-based ids.
    pub fn from_edges(n_agents: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut w = DMatrix::zeros(n_agents, n_agents);
        for &(i, j, weight) in edges {
            if i >= n_agents || j >= n_agents || i == j {
                return Err(Error::InvalidTopology);
            }
            w[(i, j)] = weight;
            w[(j, i)] = weight;
        }
        ControlTopology::new(w)
    }

    /// Unit-weight ring `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n_agents: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n_agents).map(|i| (i, (i + 1) % n_agents, 1.0)).collect();
        ControlTopology::from_edges(n_agents, &edges)
    }

    pub fn n_agents(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Control neighbors of `i` with their weights, in ascending id order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.n_agents())
            .map(move |j| (j, self.weights[(i, j)]))
            .filter(|&(_, w)| w > 0.0)
    }

    /// Undirected edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_agents();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.weights[(i, j)] > 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.n_agents();
        let mut l = -self.weights.clone();
        for i in 0..n {
            l[(i, i)] = self.weights.row(i).sum();
        }
        l
    }

    /// Graph search connectivity over positive-weight edges.
    pub fn is_connected(&self) -> bool {
        connected_components_of(self.n_agents(), |i, j| self.weights[(i, j)] > 0.0) == 1
    }
}

/// Number of connected components of the undirected graph given by `adjacent`.
pub(crate) fn connected_components_of(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> usize {
    let mut seen = alloc::vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && adjacent(i, j) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    components
}

const EIG_ZERO: f64 = 1e-10;

/// Laplacian eigenvalues in ascending order, with values below `1e-10` in
/// magnitude snapped to zero.
pub fn laplacian_eigs(t: &ControlTopology) -> Vec<f64> {
    let eig = SymmetricEigen::new(t.laplacian());
    let mut values: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&v| if libm::fabs(v) < EIG_ZERO { 0.0 } else { v })
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// The nonzero Laplacian eigenvalues `lambda_2..lambda_N`, or an error when
/// the topology is disconnected.
pub fn stability_eigs(t: &ControlTopology) -> Result<Vec<f64>> {
    let eigs = laplacian_eigs(t);
    if eigs.len() < 2 || eigs[1] <= 0.0 {
        return Err(Error::Disconnected);
    }
    Ok(eigs[1..].to_vec())
}

/// Scalar double-integrator blocks `(A, B)` for sampling period `h`.
pub fn block_matrices(h: f64) -> (Matrix2<f64>, Vector2<f64>) {
    (Matrix2::new(1.0, h, 0.0, 1.0), Vector2::new(0.5 * h * h, h))
}

/// Full `(A (x) I_n, B (x) I_n)` pair in stacked `[p; v]` coordinates.
pub fn system_matrices(h: f64, n: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_positive("h", h)?;
    if n == 0 {
        return Err(Error::InvalidCount { name: "n", value: 0 });
    }
    let (a, b) = block_matrices(h);
    let eye = DMatrix::<f64>::identity(n, n);
    let a = DMatrix::from_column_slice(2, 2, a.as_slice()).kronecker(&eye);
    let b = DMatrix::from_column_slice(2, 1, b.as_slice()).kronecker(&eye);
    Ok((a, b))
}

/// Step at which the snapshot used for control at step `k` was taken.
pub fn snapshot_step(k: usize, tau: usize) -> usize {
    (k / tau).saturating_sub(1) * tau
}

/// Open-loop estimate of the state at `current` from a snapshot taken at `snapshot`.
pub fn state_estimate(last_known: &AgentState, snapshot: usize, current: usize, h: f64) -> Result<AgentState> {
    if current < snapshot {
        return Err(Error::NonCausal { snapshot, current });
    }
    Ok(last_known.advanced(current - snapshot, h))
}

/// `u = K sum_j w_j (x_j - x_own)` on state estimates.
pub fn control_input(own_est: &AgentState, neighbor_ests: &[(f64, AgentState)], gain: &Gain) -> DVector<f64> {
    let mut agg = AgentState::zeros(own_est.dim());
    for (w, x) in neighbor_ests {
        agg.add_scaled(&x.sub(own_est), *w);
    }
    gain.apply(&agg)
}

/// Closed form of the window accumulation matrix `N(s)` for eigenvalue `lambda`.
pub fn n_matrix(s: usize, lambda: f64, gain: &Gain, h: f64) -> Result<Matrix2<f64>> {
    if s < 1 {
        return Err(Error::InvalidCount { name: "s", value: s });
    }
    let (a, b) = (gain.alpha, gain.beta);
    let s = s as f64;
    Ok(Matrix2::new(
        a * h * h * s * s / 2.0,
        a * h * h * h / 12.0 * s * (8.0 * s * s - 3.0 * s + 1.0) + b * h * h * s * s / 2.0,
        a * h * s,
        a * h * h / 2.0 * s * (3.0 * s - 1.0) + b * h * s,
    ) * lambda)
}

/// `N(s) = lambda sum_{l=0}^{s-1} A^{s-1-l} B K A^{s+l}`, evaluated term by term.
pub fn n_matrix_sum(s: usize, lambda: f64, gain: &Gain, h: f64) -> Result<Matrix2<f64>> {
    if s < 1 {
        return Err(Error::InvalidCount { name: "s", value: s });
    }
    let (a, b) = block_matrices(h);
    let bk = b * gain.row();
    let mut acc = Matrix2::zeros();
    for l in 0..s {
        acc += a.pow((s - 1 - l) as u32) * bk * a.pow((s + l) as u32);
    }
    Ok(acc * lambda)
}

/// One-step window map `[[A^tau, -N(tau)], [I, 0]]` for a single eigenvalue.
pub fn window_map(lambda: f64, gain: &Gain, h: f64, tau: usize) -> Result<nalgebra::Matrix4<f64>> {
    let (a, _) = block_matrices(h);
    let at = a.pow(tau as u32);
    let n = n_matrix(tau, lambda, gain, h)?;
    let mut m = nalgebra::Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&at);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(-n));
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&Matrix2::identity());
    Ok(m)
}

/// Jury table quantities for the characteristic quartic
/// `f(z) = a4 z^4 + a3 z^3 + a2 z^2 + a1 z + a0` of the window map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JuryTest {
    /// `[a0, a1, a2, a3, a4]`.
    pub coefficients: [f64; 5],
    pub phi: [f64; 3],
    pub f_at_one: f64,
    pub f_at_minus_one: f64,
}

impl JuryTest {
    /// All roots strictly inside the unit circle.
    pub fn is_schur(&self) -> bool {
        self.phi.iter().all(|&p| p > 0.0) && self.f_at_one > 0.0 && self.f_at_minus_one > 0.0
    }
}

pub fn jury_coefficients(lambda: f64, alpha: f64, beta: f64, h: f64, tau: usize) -> [f64; 5] {
    let t = tau as f64;
    let a0 = lambda * lambda * alpha * alpha * h * h * h * h * t * t * (t * t - 1.0) / 12.0;
    let a1 = lambda * alpha * h * h * (t - 2.0 * t * t) / 2.0 - lambda * beta * h * t;
    let a2 = 1.0 + lambda * alpha * h * h * (4.0 * t * t - t) / 2.0 + lambda * beta * h * t;
    [a0, a1, a2, -2.0, 1.0]
}

fn jury_from_coefficients(c: [f64; 5]) -> JuryTest {
    let [a0, a1, a2, a3, a4] = c;
    let b0 = a0 * a0 - a4 * a4;
    let b3 = a0 * a3 - a1 * a4;
    let b1 = a0 * a1 - a3 * a4;
    let phi1 = a4 - libm::fabs(a0);
    let phi2 = libm::fabs(b0) - libm::fabs(b3);
    let c0 = b0 * b0 - b3 * b3;
    let c2 = -b1 * b3 + a2 * (a0 + a4) * (a0 - a4) * (a0 - a4);
    let phi3 = libm::fabs(c0) - libm::fabs(c2);
    JuryTest {
        coefficients: c,
        phi: [phi1, phi2, phi3],
        f_at_one: a4 + a3 + a2 + a1 + a0,
        f_at_minus_one: a4 - a3 + a2 - a1 + a0,
    }
}

/// Jury margins for one Laplacian eigenvalue. Accepts a zero gain so the
/// marginal boundary can be inspected.
pub fn jury_phis(lambda: f64, alpha: f64, beta: f64, h: f64, tau: usize) -> JuryTest {
    jury_from_coefficients(jury_coefficients(lambda, alpha, beta, h, tau))
}

/// Gain lies in the intersection of the per-eigenvalue Jury regions.
pub fn gain_feasible(gain: &Gain, eigs: &[f64], h: f64, tau: usize) -> Result<bool> {
    if eigs.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if let Some(&bad) = eigs.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter { name: "eigenvalue", value: bad });
    }
    check_positive("h", h)?;
    if tau == 0 {
        return Err(Error::InvalidCount { name: "tau", value: 0 });
    }
    Ok(eigs
        .iter()
        .all(|&l| jury_phis(l, gain.alpha, gain.beta, h, tau).is_schur()))
}

/// Boolean feasibility mask over a rectangular `(alpha, beta)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GainGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Row-major by alpha: `mask[ia * betas.len() + ib]`.
    pub mask: Vec<bool>,
}

impl GainGrid {
    pub fn is_feasible(&self, ia: usize, ib: usize) -> bool {
        self.mask[ia * self.betas.len() + ib]
    }

    pub fn feasible_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Scan the gain plane. Cells on or below the axes are never feasible.
pub fn gain_region_grid(
    eigs: &[f64],
    h: f64,
    tau: usize,
    alpha_range: (f64, f64),
    beta_range: (f64, f64),
    resolution: usize,
) -> Result<GainGrid> {
    if resolution < 2 {
        return Err(Error::InvalidCount { name: "resolution", value: resolution });
    }
    for (name, (lo, hi)) in [("alpha_range", alpha_range), ("beta_range", beta_range)] {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter { name, value: hi });
        }
    }
    let alphas = linspace(alpha_range.0, alpha_range.1, resolution);
    let betas = linspace(beta_range.0, beta_range.1, resolution);
    let mut mask = Vec::with_capacity(resolution * resolution);
    for &alpha in &alphas {
        for &beta in &betas {
            let ok = match Gain::new(alpha, beta) {
                Ok(g) => gain_feasible(&g, eigs, h, tau)?,
                Err(_) => false,
            };
            mask.push(ok);
        }
    }
    Ok(GainGrid { alphas, betas, mask })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn system_matrices_unit_step() {
        let (a, b) = system_matrices(1.0, 1).unwrap();
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
        assert_eq!(b, DMatrix::from_row_slice(2, 1, &[0.5, 1.0]));
    }

    #[test]
    fn system_matrices_kronecker_layout() {
        let h = 0.05;
        let (a, _) = system_matrices(h, 2).unwrap();
        let x = AgentState::from_slices(&[1.0, 2.0], &[3.0, -4.0]).unwrap();
        let next = &a * x.stacked();
        assert_eq!(next, x.advanced(1, h).stacked());
        let a7 = a.pow(7);
        assert!((a7[(0, 2)] - 7.0 * h).abs() < 1e-14);
        assert!((a7[(1, 3)] - 7.0 * h).abs() < 1e-14);
        assert_eq!(a7[(0, 3)], 0.0);
    }

    #[test]
    fn cycle_spectrum() {
        let eigs = laplacian_eigs(&ControlTopology::cycle(6).unwrap());
        let expected: Vec<f64> = {
            let mut e: Vec<f64> = (0..6)
                .map(|k| 2.0 - 2.0 * libm::cos(2.0 * core::f64::consts::PI * k as f64 / 6.0))
                .collect();
            e.sort_by(f64::total_cmp);
            e
        };
        for (got, want) in eigs.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12);
        }
        for (got, want) in eigs.iter().zip([0.0, 1.0, 1.0, 3.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(eigs[0], 0.0);
    }

    #[test]
    fn two_nodes_and_disconnected() {
        let t = ControlTopology::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let e = laplacian_eigs(&t);
        assert_eq!(e[0], 0.0);
        assert!((e[1] - 2.0).abs() < 1e-12);

        let t = ControlTopology::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(laplacian_eigs(&t)[1], 0.0);
        assert!(!t.is_connected());
        assert_eq!(stability_eigs(&t), Err(Error::Disconnected));
    }

    #[test]
    fn topology_rejects_asymmetry() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert_eq!(ControlTopology::new(w), Err(Error::InvalidTopology));
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        assert_eq!(ControlTopology::new(w), Err(Error::InvalidTopology));
    }

    #[test]
    fn estimate_identity_and_one_step() {
        let x = AgentState::from_slices(&[1.0, 2.0], &[0.5, -1.0]).unwrap();
        assert_eq!(state_estimate(&x, 4, 4, 0.05).unwrap(), x);
        let one = state_estimate(&x, 4, 5, 0.05).unwrap();
        assert_eq!(one.position, DVector::from_column_slice(&[1.025, 1.95]));
        assert_eq!(one.velocity, x.velocity);
        assert!(matches!(state_estimate(&x, 5, 4, 0.05), Err(Error::NonCausal { .. })));
    }

    #[test]
    fn estimate_power_matches_iteration() {
        // tau = 2, k = 5 -> snapshot at step 2, power 3
        assert_eq!(snapshot_step(5, 2), 2);
        assert_eq!(snapshot_step(1, 2), 0);
        assert_eq!(snapshot_step(3, 2), 0);
        let h = 0.05;
        let x = AgentState::from_slices(&[0.3], &[1.7]).unwrap();
        let direct = state_estimate(&x, 2, 5, h).unwrap();
        let mut iter = x.clone();
        for _ in 0..3 {
            iter = iter.advanced(1, h);
        }
        assert!((direct.position[0] - iter.position[0]).abs() < 1e-15);
    }

    #[test]
    fn control_input_cases() {
        let g = Gain::new(1.54, 1.61).unwrap();
        let x = AgentState::from_slices(&[1.0, 1.0], &[0.2, 0.0]).unwrap();
        let u = control_input(&x, &[(1.0, x.clone()), (2.0, x.clone())], &g);
        assert_eq!(u, DVector::zeros(2));

        let y = AgentState::from_slices(&[4.0, -1.0], &[0.2, 0.0]).unwrap();
        let u = control_input(&x, &[(1.0, y)], &g);
        assert!((u[0] - 1.54 * 3.0).abs() < 1e-12);
        assert!((u[1] + 1.54 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn gain_apply_advanced_matches_estimate() {
        let g = Gain::new(0.7, 1.3).unwrap();
        let x = AgentState::from_slices(&[1.0, -2.0], &[0.4, 0.9]).unwrap();
        let lhs = g.apply_advanced(3, 0.05, &x);
        let rhs = g.apply(&x.advanced(3, 0.05));
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn n_matrix_small_cases() {
        let g = Gain::new(1.3, 0.8).unwrap();
        let (h, lam) = (0.1, 2.5);
        let (a, b) = block_matrices(h);
        let bk = b * g.row();
        let one = n_matrix(1, lam, &g, h).unwrap();
        assert!((one - bk * a * lam).norm() < 1e-14);
        let two = n_matrix(2, lam, &g, h).unwrap();
        assert!((two - (a * bk * a * a + bk * a * a * a) * lam).norm() < 1e-14);
        assert_eq!(n_matrix(3, 0.0, &g, h).unwrap(), Matrix2::zeros());
        assert!(n_matrix(0, lam, &g, h).is_err());
        assert!(n_matrix_sum(0, lam, &g, h).is_err());
    }

    #[test]
    fn jury_zero_gain_is_marginal() {
        for tau in 1..5 {
            let j = jury_phis(3.0, 0.0, 0.0, 0.05, tau);
            assert_eq!(j.phi[2], 0.0);
            assert!(!j.is_schur());
            assert_eq!(j.coefficients, [0.0, 0.0, 1.0, -2.0, 1.0]);
        }
    }

    #[test]
    fn six_cycle_gain_is_feasible() {
        let g = Gain::new(1.54, 1.61).unwrap();
        let j = jury_phis(4.0, g.alpha(), g.beta(), 0.05, 2);
        assert!(j.phi.iter().all(|&p| p > 0.0), "{:?}", j.phi);
        let eigs = stability_eigs(&ControlTopology::cycle(6).unwrap()).unwrap();
        assert!(gain_feasible(&g, &eigs, 0.05, 2).unwrap());
    }

    #[test]
    fn gain_feasible_rejects_empty_spectrum() {
        let g = Gain::new(1.0, 1.0).unwrap();
        assert_eq!(gain_feasible(&g, &[], 0.05, 2), Err(Error::EmptySpectrum));
        assert!(Gain::new(0.0, 0.0).is_err());
    }

    #[test]
    fn intersection_semantics() {
        // A gain that passes at lambda = 1 but fails at lambda = 4 (tau = 3).
        let g = Gain::new(1.54, 1.61).unwrap();
        assert!(gain_feasible(&g, &[1.0], 0.05, 3).unwrap());
        assert!(!gain_feasible(&g, &[4.0], 0.05, 3).unwrap());
        assert!(!gain_feasible(&g, &[1.0, 4.0], 0.05, 3).unwrap());
    }

    #[test]
    fn grid_excludes_axes_and_contains_design_gain() {
        let eigs = vec![1.0, 1.0, 3.0, 3.0, 4.0];
        let grid = gain_region_grid(&eigs, 0.05, 2, (0.0, 3.08), (0.0, 3.22), 101).unwrap();
        for ib in 0..grid.betas.len() {
            assert!(!grid.is_feasible(0, ib));
        }
        for ia in 0..grid.alphas.len() {
            assert!(!grid.is_feasible(ia, 0));
        }
        // 1.54 = 50 * 0.0308, 1.61 = 50 * 0.0322
        assert!((grid.alphas[50] - 1.54).abs() < 1e-12);
        assert!((grid.betas[50] - 1.61).abs() < 1e-12);
        assert!(grid.is_feasible(50, 50));

        let mut shuffled = eigs.clone();
        shuffled.reverse();
        let again = gain_region_grid(&shuffled, 0.05, 2, (0.0, 3.08), (0.0, 3.22), 101).unwrap();
        assert_eq!(grid.mask, again.mask);
    }
}
