//! Independent numerical ground truth for walks: a truncated
//! stationary-distribution solver, boundary-sequence extraction, truncated
//! generating-function evaluation, and the tail regression used to verify
//! predicted asymptotics.
//!
//! The truncated chain lives on `{0..N}^2`; jumps leaving the box are
//! dropped and the row renormalized, which keeps the chain stochastic and
//! biases the tail predictably (quantified by `mass_at_edge`). Moderate
//! truncations are solved by GTH elimination, which is subtraction-free and
//! exploits the lattice band structure; larger ones by damped power
//! iteration with a safeguarded log-space Aitken extrapolation at the end.

use crate::error::OracleError;
use crate::model::WalkSpec;

/// Smallest admissible truncation.
pub const MIN_TRUNCATION: usize = 50;

/// Largest truncation solved by GTH elimination; beyond this the
/// `O(N^4)` elimination cost and `O(N^3)` band storage favor iteration.
pub const GTH_MAX_TRUNCATION: usize = 300;

/// Stationary-equation residual bound enforced on every solution.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Frontier mass above which the truncation is deemed untrustworthy.
pub const EDGE_MASS_TOL: f64 = 1e-8;

/// Componentwise `|delta log pi|` bound per snapshot span that stops the
/// power iteration.
const LOG_STEP_TOL: f64 = 1e-12;

/// Iterations between convergence snapshots of the power iteration.
const SNAPSHOT_SPAN: usize = 100;

/// Hard cap on power-iteration sweeps.
const MAX_ITERATIONS: usize = 500_000;

/// Identity damping of the power iteration; removes periodic oscillation
/// without moving the stationary vector.
const DAMPING: f64 = 0.015625;

/// Components below this are treated as numerically zero in log-space
/// convergence checks.
const LOG_FLOOR: f64 = 1e-290;

/// Stationary distribution of the truncated walk.
#[derive(Debug, Clone)]
pub struct TruncatedSolution {
    /// Truncation size: states are `(m, n)` with `0 <= m, n <= N`.
    pub n: usize,
    /// Dense stationary vector, indexed `m * (N + 1) + n`; sums to one.
    pub pi: Vec<f64>,
    /// `l1` residual of the stationary equation, `||pi P - pi||_1`.
    pub residual: f64,
    /// Total probability on the truncation frontier (`m = N` or `n = N`).
    pub mass_at_edge: f64,
}

impl TruncatedSolution {
    /// Stationary probability of state `(m, n)`.
    pub fn prob(&self, m: usize, n: usize) -> f64 {
        self.pi[m * (self.n + 1) + n]
    }

    /// Stationary probability of the origin.
    pub fn origin(&self) -> f64 {
        self.pi[0]
    }
}

/// Fitted tail parameters of a boundary sequence, modeling
/// `pi_{n,0} ~ c * n^alpha * theta^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    /// Geometric rate `theta`.
    pub theta_hat: f64,
    /// Polynomial exponent `alpha`.
    pub alpha_hat: f64,
    /// Constant `c` multiplying `n^alpha * theta^n`.
    pub c_hat: f64,
    /// Coefficient of determination of the `log` regression for `alpha`.
    pub r_squared: f64,
    /// Fit window `[n0, n1]` in the 1-based index of the sequence.
    pub window: (usize, usize),
    /// Absolute differences `(|d theta|, |d alpha|)` between fits on the
    /// two disjoint halves of the window.
    pub window_sensitivity: (f64, f64),
}

/// Truncated generating-function queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GfQuery {
    /// `pi_1(x) = sum_{m >= 1} pi_{m,0} x^{m-1}`.
    Boundary1 { x: f64 },
    /// `pi_2(y) = sum_{n >= 1} pi_{0,n} y^{n-1}`.
    Boundary2 { y: f64 },
    /// `pi(x, y) = sum_{m,n >= 1} pi_{m,n} x^{m-1} y^{n-1}`.
    Joint { x: f64, y: f64 },
}

/// A truncated series value with an estimate of the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfValue {
    pub value: f64,
    /// First derivative, when requested (never computed for joint queries).
    pub derivative: Option<f64>,
    /// Geometric-majorant estimate of the truncated remainder.
    pub tail_bound: f64,
}

/// Sparse row-compressed transpose of the truncated transition matrix:
/// row `j` lists the incoming edges `(i, P(i, j))`, so one pass computes
/// `(pi P)_j` for every `j`.
struct CsrTranspose {
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    val: Vec<f64>,
}

/// Per-state outgoing edges of the truncated chain, with the frontier
/// clipping and renormalization applied.
struct TruncatedChain {
    n: usize,
    states: usize,
    interior: Vec<(i32, i32, f64)>,
    hwall: Vec<(i32, i32, f64)>,
    vwall: Vec<(i32, i32, f64)>,
    origin: Vec<(i32, i32, f64)>,
}

impl TruncatedChain {
    fn new(spec: &WalkSpec, n: usize) -> Self {
        TruncatedChain {
            n,
            states: (n + 1) * (n + 1),
            interior: spec.jumps_interior(),
            hwall: spec.jumps_hwall(),
            vwall: spec.jumps_vwall(),
            origin: spec.jumps_origin(),
        }
    }

    /// Outgoing edges of state `(m, n)` as `(target_index, probability)`.
    /// Jumps leaving the box are dropped and the survivors renormalized; a
    /// state whose every jump leaves becomes absorbing.
    fn out_edges(&self, m: usize, nn: usize, buf: &mut Vec<(usize, f64)>) {
        buf.clear();
        let jumps = match (m > 0, nn > 0) {
            (true, true) => &self.interior,
            (true, false) => &self.hwall,
            (false, true) => &self.vwall,
            (false, false) => &self.origin,
        };
        let side = self.n + 1;
        let mut kept = 0.0;
        for &(di, dj, p) in jumps {
            if p == 0.0 {
                continue;
            }
            let tm = m as i32 + di;
            let tn = nn as i32 + dj;
            if tm < 0 || tn < 0 || tm as usize > self.n || tn as usize > self.n {
                continue;
            }
            buf.push((tm as usize * side + tn as usize, p));
            kept += p;
        }
        if buf.is_empty() {
            buf.push((m * side + nn, 1.0));
            return;
        }
        if (kept - 1.0).abs() > 1e-15 {
            for e in buf.iter_mut() {
                e.1 /= kept;
            }
        }
    }

    fn transpose_csr(&self) -> CsrTranspose {
        let side = self.n + 1;
        let mut counts = vec![0usize; self.states + 1];
        let mut buf = Vec::with_capacity(12);
        for m in 0..side {
            for nn in 0..side {
                self.out_edges(m, nn, &mut buf);
                for &(tgt, _) in &buf {
                    counts[tgt + 1] += 1;
                }
            }
        }
        for k in 0..self.states {
            counts[k + 1] += counts[k];
        }
        let nnz = counts[self.states];
        let mut col_idx = vec![0u32; nnz];
        let mut val = vec![0.0f64; nnz];
        let mut cursor = counts.clone();
        for m in 0..side {
            for nn in 0..side {
                let src = m * side + nn;
                self.out_edges(m, nn, &mut buf);
                for &(tgt, p) in &buf {
                    let slot = cursor[tgt];
                    col_idx[slot] = src as u32;
                    val[slot] = p;
                    cursor[tgt] += 1;
                }
            }
        }
        CsrTranspose { row_ptr: counts, col_idx, val }
    }
}

impl CsrTranspose {
    /// `out[j] = sum_i P(i, j) x[i]`, the row of `pi P` for every state.
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (j, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[j]..self.row_ptr[j + 1] {
                acc += self.val[k] * x[self.col_idx[k] as usize];
            }
            *slot = acc;
        }
    }

    fn residual_l1(&self, pi: &[f64]) -> f64 {
        let mut out = vec![0.0; pi.len()];
        self.apply(pi, &mut out);
        out.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Stationary distribution of the truncated walk on `{0..N}^2`.
///
/// Dispatches to GTH elimination for `N <= 300` and to damped power
/// iteration with log-space Aitken extrapolation beyond; both paths must
/// satisfy the residual postcondition, and a frontier mass above
/// [`EDGE_MASS_TOL`] is reported as an error rather than silently folded
/// into the answer.
pub fn solve_truncated(spec: &WalkSpec, n: usize) -> Result<TruncatedSolution, OracleError> {
    if n < MIN_TRUNCATION {
        return Err(OracleError::TruncationTooSmall { n, min: MIN_TRUNCATION });
    }
    let chain = TruncatedChain::new(spec, n);
    let csr = chain.transpose_csr();
    let (pi, iterations) = if n <= GTH_MAX_TRUNCATION {
        (solve_gth(&chain), 0)
    } else {
        solve_power(&chain, &csr)?
    };

    let residual = csr.residual_l1(&pi);
    if !residual.is_finite() || residual > RESIDUAL_TOL {
        return Err(OracleError::NotConverged { residual, iterations });
    }
    let side = n + 1;
    let mut mass_at_edge = 0.0;
    for nn in 0..side {
        mass_at_edge += pi[n * side + nn];
    }
    for m in 0..n {
        mass_at_edge += pi[m * side + n];
    }
    if mass_at_edge > EDGE_MASS_TOL {
        return Err(OracleError::TruncationSuspect { mass_at_edge });
    }
    Ok(TruncatedSolution { n, pi, residual, mass_at_edge })
}

/// GTH elimination on the banded lattice matrix.
///
/// States are eliminated from the highest index down; every fill-in edge
/// `(i, j)` created while eliminating `k` has `i, j` within the bandwidth
/// `B = N + 2` below `k`, so `|i - j| < B` and the band never grows. The
/// algorithm adds and divides nonnegative quantities only, which is what
/// makes the deep tail of the stationary vector relatively accurate.
fn solve_gth(chain: &TruncatedChain) -> Vec<f64> {
    let side = chain.n + 1;
    let states = chain.states;
    let band = chain.n + 2;
    let width = 2 * band + 1;
    let mut mat = vec![0.0f64; states * width];
    let mut buf = Vec::with_capacity(12);
    for m in 0..side {
        for nn in 0..side {
            let src = m * side + nn;
            chain.out_edges(m, nn, &mut buf);
            for &(tgt, p) in &buf {
                if tgt != src {
                    let off = tgt as isize - src as isize;
                    mat[src * width + (band as isize + off) as usize] += p;
                }
            }
        }
    }

    let mut scales = vec![0.0f64; states];
    let mut dead = vec![false; states];
    let mut row_k: Vec<(usize, f64)> = Vec::with_capacity(width);
    for k in (1..states).rev() {
        row_k.clear();
        let lo = k.saturating_sub(band);
        let mut scale = 0.0;
        for j in lo..k {
            let p = mat[k * width + band + j - k];
            if p > 0.0 {
                row_k.push((j, p));
                scale += p;
            }
        }
        scales[k] = scale;
        if scale == 0.0 {
            dead[k] = true;
            continue;
        }
        let inv = 1.0 / scale;
        for i in lo..k {
            let pik = mat[i * width + band + k - i];
            if pik == 0.0 {
                continue;
            }
            let w = pik * inv;
            let base = i * width + band;
            for &(j, pkj) in &row_k {
                mat[(base as isize + (j as isize - i as isize)) as usize] += w * pkj;
            }
        }
    }

    let mut pi = vec![0.0f64; states];
    pi[0] = 1.0;
    for k in 1..states {
        if dead[k] {
            continue;
        }
        let lo = k.saturating_sub(band);
        let mut acc = 0.0;
        for i in lo..k {
            acc += pi[i] * mat[i * width + band + k - i];
        }
        pi[k] = acc / scales[k];
    }
    let total: f64 = pi.iter().sum();
    for p in pi.iter_mut() {
        *p /= total;
    }
    pi
}

/// Damped power iteration `x <- (1 - d) x P + d x` with convergence judged
/// componentwise in log space: the iteration stops when no component's log
/// moved more than [`LOG_STEP_TOL`] across a [`SNAPSHOT_SPAN`]-sweep span.
/// A final safeguarded Aitken extrapolation in log space removes most of
/// the remaining geometric transient.
fn solve_power(
    chain: &TruncatedChain,
    csr: &CsrTranspose,
) -> Result<(Vec<f64>, usize), OracleError> {
    let states = chain.states;
    let mut x = vec![1.0 / states as f64; states];
    let mut y = vec![0.0f64; states];
    let mut snap_prev2: Vec<f64> = Vec::new();
    let mut snap_prev: Vec<f64> = Vec::new();
    let mut iterations = 0usize;

    loop {
        for _ in 0..SNAPSHOT_SPAN {
            csr.apply(&x, &mut y);
            let mut total = 0.0;
            for (xj, yj) in x.iter_mut().zip(y.iter()) {
                *xj = (1.0 - DAMPING) * yj + DAMPING * *xj;
                total += *xj;
            }
            let inv = 1.0 / total;
            for xj in x.iter_mut() {
                *xj *= inv;
            }
        }
        iterations += SNAPSHOT_SPAN;

        let converged = !snap_prev.is_empty()
            && x.iter().zip(snap_prev.iter()).all(|(&cur, &old)| {
                if cur < LOG_FLOOR || old < LOG_FLOOR {
                    cur < LOG_FLOOR && old < LOG_FLOOR
                } else {
                    libm::log(cur / old).abs() < LOG_STEP_TOL
                }
            });
        if converged {
            if !snap_prev2.is_empty() {
                aitken_log(&mut x, &snap_prev, &snap_prev2);
            }
            let total: f64 = x.iter().sum();
            for xj in x.iter_mut() {
                *xj /= total;
            }
            return Ok((x, iterations));
        }
        if iterations >= MAX_ITERATIONS {
            let total: f64 = x.iter().sum();
            for xj in x.iter_mut() {
                *xj /= total;
            }
            let residual = csr.residual_l1(&x);
            return Err(OracleError::NotConverged { residual, iterations });
        }
        snap_prev2 = std::mem::take(&mut snap_prev);
        snap_prev = x.clone();
    }
}

/// Componentwise Aitken extrapolation in log space over the last three
/// snapshots. Components where the extrapolation is ill-conditioned (tiny
/// denominator, non-finite result, or a jump larger than ten times the last
/// observed step) keep their plain iterated value.
fn aitken_log(x: &mut [f64], prev: &[f64], prev2: &[f64]) {
    for ((cur, &p1), &p2) in x.iter_mut().zip(prev).zip(prev2) {
        if *cur < LOG_FLOOR || p1 < LOG_FLOOR || p2 < LOG_FLOOR {
            continue;
        }
        let l0 = libm::log(p2);
        let l1 = libm::log(p1);
        let l2 = libm::log(*cur);
        let d1 = l1 - l0;
        let d2 = l2 - l1;
        let denom = d2 - d1;
        if denom.abs() < 1e-3 * d2.abs().max(1e-300) {
            continue;
        }
        let extrapolated = l2 - d2 * d2 / denom;
        if extrapolated.is_finite() && (extrapolated - l2).abs() <= 10.0 * d2.abs() {
            *cur = libm::exp(extrapolated);
        }
    }
}

/// The horizontal boundary sequence `pi_{m,0}` for `m = 1..N`.
pub fn boundary_sequence(ts: &TruncatedSolution) -> Vec<f64> {
    (1..=ts.n).map(|m| ts.prob(m, 0)).collect()
}

/// The vertical boundary sequence `pi_{0,n}` for `n = 1..N`.
pub fn vertical_sequence(ts: &TruncatedSolution) -> Vec<f64> {
    (1..=ts.n).map(|nn| ts.prob(0, nn)).collect()
}

/// Median of a slice; empty input returns `None`.
fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[mid] } else { 0.5 * (values[mid - 1] + values[mid]) })
}

/// Rough geometric rate of a positive sequence: the median successor ratio
/// over the middle third, a region far from both the pre-asymptotic head
/// and the truncation-polluted tail.
fn rough_rate(seq: &[f64]) -> Option<f64> {
    let len = seq.len();
    if len < 9 {
        return None;
    }
    let lo = len / 3;
    let hi = len / 2;
    let mut ratios: Vec<f64> = (lo..hi)
        .filter(|&k| seq[k] > LOG_FLOOR && seq[k - 1] > LOG_FLOOR)
        .map(|k| seq[k] / seq[k - 1])
        .filter(|r| r.is_finite() && *r > 0.0)
        .collect();
    let m = median(&mut ratios)?;
    (m > 0.0 && m < 1.0).then_some(m)
}

/// Evaluate a truncated generating function at a real point, with an
/// optional derivative and a geometric estimate of the neglected tail.
/// Points at or beyond the estimated radius of convergence are refused:
/// a truncated sum there is meaningless however many terms it has.
pub fn eval_gf(
    ts: &TruncatedSolution,
    query: GfQuery,
    want_derivative: bool,
) -> Result<GfValue, OracleError> {
    match query {
        GfQuery::Boundary1 { x } => {
            let seq = boundary_sequence(ts);
            series_value(&seq, x, want_derivative, "pi_1")
        }
        GfQuery::Boundary2 { y } => {
            let seq = vertical_sequence(ts);
            series_value(&seq, y, want_derivative, "pi_2")
        }
        GfQuery::Joint { x, y } => {
            // Marginal row/column sums bound the joint coefficients, so the
            // marginal rates bound the joint radii coordinatewise.
            let side = ts.n + 1;
            let row_sums: Vec<f64> =
                (1..=ts.n).map(|m| (0..side).map(|nn| ts.prob(m, nn)).sum()).collect();
            let col_sums: Vec<f64> =
                (1..=ts.n).map(|nn| (0..side).map(|m| ts.prob(m, nn)).sum()).collect();
            check_radius(&row_sums, x, "pi(x, y) in x")?;
            check_radius(&col_sums, y, "pi(x, y) in y")?;
            let mut value = 0.0;
            for m in (1..=ts.n).rev() {
                let mut row = 0.0;
                for nn in (1..=ts.n).rev() {
                    row = row * y + ts.prob(m, nn);
                }
                value = value * x + row;
            }
            let tail_bound = joint_tail_bound(&row_sums, &col_sums, x, y);
            Ok(GfValue { value, derivative: None, tail_bound })
        }
    }
}

fn check_radius(seq: &[f64], point: f64, name: &'static str) -> Result<f64, OracleError> {
    let rate = rough_rate(seq).unwrap_or(0.0);
    let radius = if rate > 0.0 { 1.0 / rate } else { f64::INFINITY };
    if point.abs() >= radius {
        return Err(OracleError::OutsideConvergence {
            point: name.to_string(),
            modulus: point.abs(),
            radius,
        });
    }
    Ok(rate)
}

fn series_value(
    seq: &[f64],
    point: f64,
    want_derivative: bool,
    name: &'static str,
) -> Result<GfValue, OracleError> {
    let rate = check_radius(seq, point, name)?;
    let mut value = 0.0;
    for &c in seq.iter().rev() {
        value = value * point + c;
    }
    // With seq[k] the coefficient of x^k, the derivative is
    // sum_{k >= 1} k seq[k] x^{k-1}, evaluated by Horner.
    let derivative = want_derivative.then(|| {
        let mut d = 0.0;
        for (k, &c) in seq.iter().enumerate().rev() {
            if k >= 1 {
                d = d * point + k as f64 * c;
            }
        }
        d
    });
    let tail_bound = geometric_tail_bound(seq, point, rate);
    Ok(GfValue { value, derivative, tail_bound })
}

/// Bound the neglected remainder `sum_{m > N} c_m x^{m-1}` by continuing
/// the last retained coefficient geometrically at the fitted rate.
fn geometric_tail_bound(seq: &[f64], point: f64, rate: f64) -> f64 {
    let last = match seq.iter().rposition(|&c| c > 0.0) {
        Some(k) => k,
        None => return 0.0,
    };
    let q = rate * point.abs();
    if q >= 1.0 {
        return f64::INFINITY;
    }
    seq[last] * point.abs().powi(last as i32) * q / (1.0 - q)
}

/// Coordinatewise majorant on the joint remainder: rows beyond the
/// truncation plus columns beyond it, each bounded through its marginal
/// and inflated by the geometric sum over the other coordinate.
fn joint_tail_bound(row_sums: &[f64], col_sums: &[f64], x: f64, y: f64) -> f64 {
    let rate_x = rough_rate(row_sums).unwrap_or(0.0);
    let rate_y = rough_rate(col_sums).unwrap_or(0.0);
    let cross = |q: f64| if q < 1.0 { 1.0 / (1.0 - q) } else { f64::INFINITY };
    let bx = geometric_tail_bound(row_sums, x, rate_x) * cross(rate_y * y.abs());
    let by = geometric_tail_bound(col_sums, y, rate_y) * cross(rate_x * x.abs());
    bx + by
}

/// Fit `pi_{n,0} ~ c * n^alpha * theta^n` on a window of the boundary
/// sequence (`seq[k]` is `pi_{k+1,0}`).
///
/// The rate comes from a two-term elimination of successor log-ratios that
/// is exact on the model family: with `L_n = log(p(n+1)/p(n))`,
/// `u = log((n+1)/n)` and `v = log(n/(n-1))`, the combination
/// `(v L_n - u L_{n-1}) / (v - u)` equals `log theta` identically, so its
/// median over the window's upper half is immune to the `n^alpha` factor.
/// Given `theta`, `alpha` and `c` follow from least squares of
/// `log(p(n) theta^{-n})` against `log n`. The same fit on the two disjoint
/// halves of the window must agree (`theta` within 1e-3, `alpha` within
/// 0.15) or the window is declared too noisy.
pub fn fit_tail(seq: &[f64], window: Option<(usize, usize)>) -> Result<TailFit, OracleError> {
    let p = |n: usize| seq[n - 1];
    let n_max = seq.len();
    let (n0, n1) = match window {
        Some((a, b)) => (a.max(2), b.min(n_max)),
        None => {
            let rate = rough_rate(seq).ok_or_else(|| {
                OracleError::WindowTooNoisy(
                    "no geometric decay detected in the middle of the sequence".into(),
                )
            })?;
            // Largest n whose relative truncation contamination stays below
            // 1e-3: contamination decays like theta^(N - n).
            let guard = (libm::log(1e-3) / libm::log(rate)).ceil() as usize;
            let n_eff = n_max.saturating_sub(guard);
            let n0 = ((n_eff as f64) * 0.5).floor() as usize;
            let n1 = ((n_eff as f64) * 0.8).floor() as usize;
            (n0.max(2), n1.min(n_max))
        }
    };
    if n1 <= n0 + 6 {
        return Err(OracleError::WindowTooNoisy(format!(
            "window [{n0}, {n1}] has fewer than 8 points"
        )));
    }
    for n in n0.saturating_sub(1)..=n1 {
        if n >= 1 && (!p(n).is_finite() || p(n) <= 0.0) {
            return Err(OracleError::WindowTooNoisy(format!(
                "non-positive value at n = {n} inside the fit window"
            )));
        }
    }

    let full = fit_on(seq, n0, n1)?;
    let mid = (n0 + n1) / 2;
    let left = fit_on(seq, n0, mid)?;
    let right = fit_on(seq, mid + 1, n1)?;
    let d_theta = (left.0 - right.0).abs();
    let d_alpha = (left.1 - right.1).abs();
    if d_theta > 1e-3 || d_alpha > 0.15 {
        return Err(OracleError::WindowTooNoisy(format!(
            "disjoint half-windows disagree: |d theta| = {d_theta:.2e}, |d alpha| = {d_alpha:.2e}"
        )));
    }

    Ok(TailFit {
        theta_hat: full.0,
        alpha_hat: full.1,
        c_hat: full.2,
        r_squared: full.3,
        window: (n0, n1),
        window_sensitivity: (d_theta, d_alpha),
    })
}

/// One fit pass over `[n0, n1]`: rate by the exact ratio annihilator,
/// exponent and constant by least squares. Returns
/// `(theta, alpha, c, r_squared)`.
fn fit_on(seq: &[f64], n0: usize, n1: usize) -> Result<(f64, f64, f64, f64), OracleError> {
    let p = |n: usize| seq[n - 1];
    if n0 < 2 || n1 <= n0 + 2 || n1 > seq.len() {
        return Err(OracleError::WindowTooNoisy(format!(
            "fit window [{n0}, {n1}] too small for the sequence"
        )));
    }

    // log theta from the annihilated ratios over the upper half.
    let mid = (n0 + n1) / 2;
    let mut estimates: Vec<f64> = Vec::new();
    for n in mid.max(3)..n1 {
        let ln = libm::log(p(n + 1) / p(n));
        let ln_prev = libm::log(p(n) / p(n - 1));
        let u = libm::log((n as f64 + 1.0) / n as f64);
        let v = libm::log(n as f64 / (n as f64 - 1.0));
        estimates.push((v * ln - u * ln_prev) / (v - u));
    }
    let log_theta = median(&mut estimates).ok_or_else(|| {
        OracleError::WindowTooNoisy(format!("no ratio estimates available in [{n0}, {n1}]"))
    })?;
    let theta = libm::exp(log_theta);

    // Least squares of log(p(n)) - n log(theta) against log n.
    let mut y_scale: f64 = 1.0;
    let pts: Vec<(f64, f64)> = (n0..=n1)
        .map(|n| {
            let lp = libm::log(p(n));
            y_scale = y_scale.max(lp.abs() + n as f64 * log_theta.abs());
            (libm::log(n as f64), lp - n as f64 * log_theta)
        })
        .collect();
    let count = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(a, _)| a).sum();
    let sy: f64 = pts.iter().map(|(_, b)| b).sum();
    let sxx: f64 = pts.iter().map(|(a, _)| a * a).sum();
    let sxy: f64 = pts.iter().map(|(a, b)| a * b).sum();
    let denom = count * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(OracleError::WindowTooNoisy("degenerate regression abscissae".into()));
    }
    let alpha = (count * sxy - sx * sy) / denom;
    let intercept = (sy - alpha * sx) / count;
    let c = libm::exp(intercept);

    let mean_y = sy / count;
    let ss_tot: f64 = pts.iter().map(|(_, b)| (b - mean_y) * (b - mean_y)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|(a, b)| {
            let fit = intercept + alpha * a;
            (b - fit) * (b - fit)
        })
        .sum();
    // When the true exponent is zero the regression target is constant and
    // ss_tot is pure cancellation noise of order eps * (|log p| + n |log theta|)
    // per point, so the variance ratio carries no information. Totals at that
    // noise level count as an exact fit.
    let noise_floor = count * (1e-12 * y_scale) * (1e-12 * y_scale);
    let r_squared = if ss_tot > noise_floor { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((theta, alpha, c, r_squared))
}
