//! Helpers shared by the integration suites: seeded random stable walks,
//! a product-form walk construction, and reusable invariant checks.

// Each integration test target compiles this module separately and none of
// them uses every helper.
#![allow(dead_code)]

use kernel_tail::kernel::{branch_real, BranchPoints, KernelSystem};
use kernel_tail::model::{classify_walk, walk_stability, Stability, WalkSpec};
use kernel_tail::singularity::{classify_with_eps, PoleCandidates, EPS_EQ_DEFAULT};
use rand::Rng;

/// Draw a random nonsingular genus-1 walk with negative interior drift and
/// stable wall conditions. Rejection-samples until the structural and
/// stability filters pass; the caller supplies a seeded generator so runs
/// are reproducible.
pub fn random_stable_walk(rng: &mut impl Rng) -> WalkSpec {
    for _ in 0..20_000 {
        let mut weights = [0.0f64; 8];
        for w in &mut weights {
            *w = rng.random_range(0.05..1.0);
        }
        let total: f64 = weights.iter().sum();
        let moving_mass = rng.random_range(0.6..0.95);
        let scale = moving_mass / total;
        let p = |k: usize| weights[k] * scale;

        // Moving jumps in the order (1,1),(1,0),(1,-1),(0,1),(0,-1),
        // (-1,1),(-1,0),(-1,-1); the remainder stays put.
        let mut interior = [[0.0; 3]; 3];
        interior[2][2] = p(0);
        interior[2][1] = p(1);
        interior[2][0] = p(2);
        interior[1][2] = p(3);
        interior[1][0] = p(4);
        interior[0][2] = p(5);
        interior[0][1] = p(6);
        interior[0][0] = p(7);
        interior[1][1] = 1.0 - moving_mass;

        let mut hw = [0.0f64; 5];
        for w in &mut hw {
            *w = rng.random_range(0.05..1.0);
        }
        let hw_total: f64 = hw.iter().sum();
        let hw_mass = rng.random_range(0.5..0.95);
        let hs = hw_mass / hw_total;
        // Horizontal wall jumps (i, j): (1,1),(1,0),(-1,1),(-1,0),(0,1).
        let hwall = [
            [hw[3] * hs, hw[2] * hs],
            [1.0 - hw_mass, hw[4] * hs],
            [hw[1] * hs, hw[0] * hs],
        ];

        let mut vw = [0.0f64; 5];
        for w in &mut vw {
            *w = rng.random_range(0.05..1.0);
        }
        let vw_total: f64 = vw.iter().sum();
        let vw_mass = rng.random_range(0.5..0.95);
        let vs = vw_mass / vw_total;
        // Vertical wall jumps (i, j): (1,1),(0,1),(1,-1),(0,-1),(1,0).
        let vwall = [
            [vw[3] * vs, 1.0 - vw_mass, vw[1] * vs],
            [vw[2] * vs, vw[4] * vs, vw[0] * vs],
        ];

        let up = rng.random_range(0.05..0.45);
        let right = rng.random_range(0.05..0.45);
        let diag = rng.random_range(0.0..0.1);
        let origin = [[1.0 - up - right - diag, up], [right, diag]];

        let spec = WalkSpec { interior, hwall, vwall, origin };
        let class = classify_walk(&spec);
        if !(class.nonsingular && class.genus == 1 && !class.x_shaped) {
            continue;
        }
        match walk_stability(&spec) {
            Ok(v) if v.status == Stability::Stable => return spec,
            _ => continue,
        }
    }
    panic!("rejection sampling found no stable genus-1 walk in 20000 tries");
}

/// Two independent reflected birth-death chains moving simultaneously:
/// coordinate `i` steps up with rate `u_i`, down with `d_i` (never below
/// zero). The joint stationary law is the product of two geometric laws
/// with ratios `u_i / d_i`.
pub fn product_form_walk(u1: f64, d1: f64, u2: f64, d2: f64) -> WalkSpec {
    assert!(u1 + d1 < 1.0 && u2 + d2 < 1.0, "need positive holding probability");
    let q1 = [(1i32, u1), (-1, d1), (0, 1.0 - u1 - d1)];
    let q2 = [(1i32, u2), (-1, d2), (0, 1.0 - u2 - d2)];
    let q1_wall = [(1i32, u1), (0, 1.0 - u1)];
    let q2_wall = [(1i32, u2), (0, 1.0 - u2)];

    let mut interior = [[0.0; 3]; 3];
    for &(i, pi) in &q1 {
        for &(j, pj) in &q2 {
            interior[(i + 1) as usize][(j + 1) as usize] += pi * pj;
        }
    }
    let mut hwall = [[0.0; 2]; 3];
    for &(i, pi) in &q1 {
        for &(j, pj) in &q2_wall {
            hwall[(i + 1) as usize][j as usize] += pi * pj;
        }
    }
    let mut vwall = [[0.0; 3]; 2];
    for &(i, pi) in &q1_wall {
        for &(j, pj) in &q2 {
            vwall[i as usize][(j + 1) as usize] += pi * pj;
        }
    }
    let mut origin = [[0.0; 2]; 2];
    for &(i, pi) in &q1_wall {
        for &(j, pj) in &q2_wall {
            origin[i as usize][j as usize] += pi * pj;
        }
    }
    WalkSpec { interior, hwall, vwall, origin }
}

/// Branch points must interleave the unit circle: `|p1| < p2 < 1 < p3 < |p4|`
/// in both directions.
pub fn check_branch_ordering(bp: &BranchPoints) -> Result<(), String> {
    for (name, q) in [("x", &bp.x), ("y", &bp.y)] {
        let ok = q.p1.abs() < q.p2 && q.p2 < 1.0 && 1.0 < q.p3 && q.p3 < q.p4.abs();
        if !ok {
            return Err(format!(
                "{name} ordering violated: p1 = {}, p2 = {}, p3 = {}, p4 = {}",
                q.p1, q.p2, q.p3, q.p4
            ));
        }
    }
    Ok(())
}

/// Between the cuts the two branches are real and must satisfy the Vieta
/// identities of the kernel quadratic to 1e-10 (relative).
pub fn check_vieta(ks: &KernelSystem, bp: &BranchPoints) -> Result<(), String> {
    let points = [1.0, (1.0 + bp.x.p3) / 2.0, (bp.x.p2 + 1.0) / 2.0];
    for x in points {
        let Some((y0, y1)) = branch_real(ks, x) else {
            return Err(format!("no real branches at x = {x}"));
        };
        let a = ks.a.eval(x);
        let b = ks.b.eval(x);
        let c = ks.c.eval(x);
        let scale = 1.0 + y0.abs().max(y1.abs());
        let sum_residual = (y0 + y1 + b / a).abs();
        let prod_residual = (y0 * y1 - c / a).abs();
        if sum_residual > 1e-10 * scale || prod_residual > 1e-10 * scale * scale {
            return Err(format!(
                "Vieta residuals at x = {x}: sum {sum_residual:e}, product {prod_residual:e}"
            ));
        }
    }
    Ok(())
}

/// Both branches must annihilate the kernel to 1e-10 relative to its
/// coefficient scale.
pub fn check_kernel_residual(ks: &KernelSystem, bp: &BranchPoints) -> Result<(), String> {
    let points = [1.0, (1.0 + bp.x.p3) / 2.0, (bp.x.p2 + 1.0) / 2.0];
    let coeff_scale = 1.0 + ks.h.max_abs_coeff();
    for x in points {
        let Some((y0, y1)) = branch_real(ks, x) else {
            return Err(format!("no real branches at x = {x}"));
        };
        for y in [y0, y1] {
            let residual = ks.h.eval(x, y).abs();
            let scale = coeff_scale * (1.0 + x.abs()).powi(2) * (1.0 + y.abs()).powi(2);
            if residual > 1e-10 * scale {
                return Err(format!("kernel residual {residual:e} at ({x}, {y})"));
            }
        }
    }
    Ok(())
}

/// 1e-12 perturbations of the candidate triple must not move the case
/// label (away from genuinely near-degenerate configurations).
pub fn check_classifier_determinism(
    pc: &PoleCandidates,
    rng: &mut impl Rng,
) -> Result<(), String> {
    let base = classify_with_eps(pc, EPS_EQ_DEFAULT);
    if base.near_degenerate {
        return Ok(());
    }
    for _ in 0..5 {
        let mut bump = |v: f64| {
            if v.is_finite() {
                v + (rng.random::<f64>() - 0.5) * 2e-12 * (1.0 + v.abs())
            } else {
                v
            }
        };
        let perturbed = PoleCandidates {
            x_star: bump(pc.x_star),
            y_tilde: pc.y_tilde,
            x_tilde1: bump(pc.x_tilde1),
            rejected_x1: pc.rejected_x1,
            x3: bump(pc.x3),
        };
        let label = classify_with_eps(&perturbed, EPS_EQ_DEFAULT);
        if label.case_id != base.case_id {
            return Err(format!(
                "case flipped {} -> {} under 1e-12 perturbation of ({}, {}, {})",
                base.case_id, label.case_id, pc.x_star, pc.x_tilde1, pc.x3
            ));
        }
    }
    Ok(())
}
