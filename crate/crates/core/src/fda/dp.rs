//! Optimal warping between two SRSFs by dynamic programming on the grid
//! lattice.
//!
//! A path runs from node `(0, 0)` to `(n-1, n-1)`; node `(i, j)` pairs `t_i`
//! in the domain of `q1` with `t_j = γ(t_i)`. Each step moves by `(dk, dl)`
//! with `1 <= dk, dl <= MAX_STEP` and `gcd(dk, dl) = 1`; between nodes `γ` is
//! linear. The step cost is the left-point Riemann sum of
//! `(q1(t) − √γ̇ q2(γ(t)))²` over the step.

use std::f64::consts::SQRT_2;

use super::grid;
use super::srsf::act;
use super::types::{check_same_grid, Srsf, Warping};
use crate::error::Result;

/// Largest lattice step along either axis.
pub const MAX_STEP: usize = 7;

/// A lattice move `(dk, dl)`.
pub type Step = (usize, usize);

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The move set, diagonal first. On exact ties the earliest move wins, so
/// regions where both SRSFs vanish are matched along the diagonal.
pub fn stencil() -> Vec<Step> {
    let mut steps = vec![(1, 1)];
    for dk in 1..=MAX_STEP {
        for dl in 1..=MAX_STEP {
            if (dk, dl) != (1, 1) && gcd(dk, dl) == 1 {
                steps.push((dk, dl));
            }
        }
    }
    steps
}

/// Cost of the straight segment from node `(k, l)` to node `(i, j)`.
pub fn segment_cost(q1: &[f64], q2: &[f64], from: (usize, usize), to: (usize, usize)) -> f64 {
    let (k, l) = from;
    let (i, j) = to;
    let dk = i - k;
    let dl = j - l;
    let slope = dl as f64 / dk as f64;
    let root = slope.sqrt();
    let mut acc = 0.0;
    for s in 0..dk {
        let whole = dl * s / dk;
        let frac = (dl * s % dk) as f64 / dk as f64;
        let idx = l + whole;
        let v2 = if frac == 0.0 {
            q2[idx]
        } else {
            q2[idx] + frac * (q2[idx + 1] - q2[idx])
        };
        let d = q1[k + s] - root * v2;
        acc += d * d;
    }
    acc * grid::step(q1.len())
}

struct Move {
    dk: usize,
    dl: usize,
    /// `rows[s][l] = √(dl/dk) · q2(l + s·dl/dk)`: the warped `q2` seen at
    /// offset `s` of a move starting in column `l`.
    rows: Vec<Vec<f64>>,
}

fn moves(q2: &[f64]) -> Vec<Move> {
    let n = q2.len();
    stencil()
        .into_iter()
        .map(|(dk, dl)| {
            let root = (dl as f64 / dk as f64).sqrt();
            let at = |p: usize| {
                let idx = p / dk;
                let frac = (p % dk) as f64 / dk as f64;
                let v2 = if frac == 0.0 {
                    q2[idx]
                } else {
                    q2[idx] + frac * (q2[idx + 1] - q2[idx])
                };
                root * v2
            };
            let cols = n.saturating_sub(dl);
            let rows = (0..dk)
                .map(|s| (0..cols).map(|l| at(l * dk + dl * s)).collect())
                .collect();
            Move { dk, dl, rows }
        })
        .collect()
}

/// Minimum lattice energy and the optimal node path.
pub fn optimal_path(q1: &[f64], q2: &[f64]) -> (f64, Vec<(usize, usize)>) {
    let n = q1.len();
    debug_assert_eq!(n, q2.len());
    let h = grid::step(n);
    let moves = moves(q2);
    let mut cost = vec![f64::INFINITY; n * n];
    let mut pred = vec![u8::MAX; n * n];
    let mut acc = vec![0.0; n];
    cost[0] = 0.0;
    // Row i only reads rows above it, so each move is swept across a whole
    // row at once. Moves are tried in stencil order with a strict comparison,
    // so ties keep the earliest move.
    for i in 1..n {
        let (done, row) = cost.split_at_mut(i * n);
        let row = &mut row[..n];
        let prow = &mut pred[i * n..(i + 1) * n];
        for (m, mv) in moves.iter().enumerate() {
            if mv.dk > i || mv.dl >= n {
                continue;
            }
            let k = i - mv.dk;
            let cols = n - mv.dl;
            let acc = &mut acc[..cols];
            acc.fill(0.0);
            for (s, r) in mv.rows.iter().enumerate() {
                let a = q1[k + s];
                for (x, b) in acc.iter_mut().zip(r) {
                    let d = a - b;
                    *x += d * d;
                }
            }
            let start = &done[k * n..k * n + cols];
            for (l, (st, x)) in start.iter().zip(acc.iter()).enumerate() {
                let total = st + x * h;
                let j = l + mv.dl;
                if total < row[j] {
                    row[j] = total;
                    prow[j] = m as u8;
                }
            }
        }
    }
    let mut path = vec![(n - 1, n - 1)];
    let (mut i, mut j) = (n - 1, n - 1);
    while (i, j) != (0, 0) {
        let mv = &moves[pred[i * n + j] as usize];
        i -= mv.dk;
        j -= mv.dl;
        path.push((i, j));
    }
    path.reverse();
    (cost[n * n - 1], path)
}

/// Piecewise-linear warping through the path nodes, sampled on the grid.
pub fn path_to_warp(path: &[(usize, usize)], n: usize) -> Warping {
    let t = grid::nodes(n);
    let mut values = vec![0.0; n];
    for w in path.windows(2) {
        let ((k, l), (i, j)) = (w[0], w[1]);
        let slope = (t[j] - t[l]) / (t[i] - t[k]);
        for x in k..i {
            values[x] = t[l] + slope * (t[x] - t[k]);
        }
    }
    values[0] = 0.0;
    values[n - 1] = 1.0;
    Warping::new(values).expect("lattice paths are strictly increasing")
}

/// Result of aligning `q2` to `q1`.
#[derive(Debug, Clone)]
pub struct Alignment {
    /// `‖q1 − (q2, γ) √γ̇‖` for the returned warp.
    pub distance: f64,
    /// The optimal `γ`.
    pub warp: Warping,
    /// Energy of the optimal lattice path.
    pub energy: f64,
    /// Distance reached by the lattice path alone.
    pub lattice_distance: f64,
}

/// Alignment restricted to lattice paths.
pub fn lattice_alignment(q1: &Srsf, q2: &Srsf) -> Result<Alignment> {
    check_same_grid(q1.grid_size(), q2.grid_size())?;
    let (energy, path) = optimal_path(q1.values(), q2.values());
    let warp = path_to_warp(&path, q1.grid_size());
    let warped = act(q2.values(), warp.values());
    let distance = grid::distance(q1.values(), &warped);
    Ok(Alignment {
        distance,
        warp,
        energy,
        lattice_distance: distance,
    })
}

/// Approximates `D_a([q1], [q2]) = inf_γ ‖q1 − (q2, γ)‖` and the minimising
/// warp of `q2`.
///
/// The lattice optimum only realises slopes `dl/dk` with small terms, so it
/// is refined by descent over smooth warps composed onto it (see
/// [`polish`]). The refined warp replaces the lattice one only when it is
/// strictly better.
pub fn amplitude_distance(q1: &Srsf, q2: &Srsf) -> Result<Alignment> {
    let mut a = lattice_alignment(q1, q2)?;
    if a.distance > 0.0 && q1.grid_size() >= POLISH_MIN_GRID {
        let (d, w) = polish(q1.values(), q2.values(), a.warp.values());
        if d < a.distance {
            a.distance = d;
            a.warp = Warping::new(w)?;
        }
    }
    Ok(a)
}

/// Grids smaller than this are aligned on the lattice alone.
pub const POLISH_MIN_GRID: usize = 24;

/// Harmonics used by [`polish`] on an `n`-point grid.
pub fn polish_harmonics(n: usize) -> usize {
    (n / 12).clamp(1, 20)
}

const POLISH_ITER: usize = 60;
const POLISH_REL_TOL: f64 = 1e-9;

/// Descends `‖q1 − (q2, γ)‖²` from three starting warps derived from `warp`:
/// the warp itself, a lightly smoothed copy and its projection onto the
/// first few harmonics of the tangent space at the identity. Each step
/// composes `γ` with `exp_id(s v)`, where `v` is the steepest-descent
/// direction within the span of those harmonics. Returns the best distance
/// and warp found.
pub fn polish(q1: &[f64], q2: &[f64], warp: &[f64]) -> (f64, Vec<f64>) {
    let n = q1.len();
    let basis = Basis::new(n, polish_harmonics(n));
    let mut starts = vec![warp.to_vec(), smooth_warp(warp, 2, 2)];
    let id = vec![1.0; n];
    if let Ok(srt) = super::sphere::to_srt(&Warping::new(warp.to_vec()).expect("valid warp")) {
        if let Ok(v) = super::sphere::log_raw(&id, srt.values()) {
            if let Some(g) = exp_warp(&basis.project(&v)) {
                starts.push(g);
            }
        }
    }
    let mut best = (f64::INFINITY, warp.to_vec());
    for s in starts {
        let (e, g) = descend(q1, q2, s, &basis);
        if e < best.0 {
            best = (e, g);
        }
    }
    (best.0.sqrt(), best.1)
}

struct Basis {
    /// `√2 sin(2πkt)`, `√2 cos(2πkt)` for `k = 1..=K`.
    funcs: Vec<Vec<f64>>,
    /// `2 ∫₀ᵗ b`: the first-order change of `γ` along `b`.
    shifts: Vec<Vec<f64>>,
}

impl Basis {
    fn new(n: usize, k: usize) -> Self {
        let t = grid::nodes(n);
        let mut funcs = Vec::with_capacity(2 * k);
        for j in 1..=k {
            let w = 2.0 * std::f64::consts::PI * j as f64;
            funcs.push(t.iter().map(|t| SQRT_2 * (w * t).sin()).collect());
            funcs.push(t.iter().map(|t| SQRT_2 * (w * t).cos()).collect());
        }
        let shifts = funcs
            .iter()
            .map(|b: &Vec<f64>| grid::cumulative(b, 0.0).into_iter().map(|v| 2.0 * v).collect())
            .collect();
        Self { funcs, shifts }
    }

    fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for b in &self.funcs {
            let c = grid::inner(v, b);
            out.iter_mut().zip(b).for_each(|(o, b)| *o += c * b);
        }
        out
    }
}

/// Warp whose SRT is `exp_id(v)`, if that stays in the positive orthant.
fn exp_warp(v: &[f64]) -> Option<Vec<f64>> {
    let len = grid::norm(v);
    let psi: Vec<f64> = if len == 0.0 {
        vec![1.0; v.len()]
    } else {
        let (s, c) = len.sin_cos();
        v.iter().map(|x| c + s * x / len).collect()
    };
    if psi.iter().any(|&p| p <= 0.0) {
        return None;
    }
    let g = super::sphere::integrate_square(&psi);
    strictly_increasing(&g).then_some(g)
}

fn strictly_increasing(g: &[f64]) -> bool {
    g.windows(2).all(|w| w[1] > w[0])
}

/// Moving average with odd reflection at the ends, which keeps `γ(0) = 0`
/// and `γ(1) = 1`.
fn smooth_warp(g: &[f64], half_width: usize, passes: usize) -> Vec<f64> {
    let n = g.len() as isize;
    let w = half_width as isize;
    let mut cur = g.to_vec();
    for _ in 0..passes {
        let at = |i: isize, c: &[f64]| -> f64 {
            if i < 0 {
                -c[(-i).min(n - 1) as usize]
            } else if i >= n {
                2.0 - c[(2 * (n - 1) - i).max(0) as usize]
            } else {
                c[i as usize]
            }
        };
        cur = (0..n)
            .map(|i| (-w..=w).map(|d| at(i + d, &cur)).sum::<f64>() / (2 * w + 1) as f64)
            .collect();
    }
    cur[0] = 0.0;
    cur[g.len() - 1] = 1.0;
    cur
}

fn descend(q1: &[f64], q2: &[f64], start: Vec<f64>, basis: &Basis) -> (f64, Vec<f64>) {
    let n = q1.len();
    if !strictly_increasing(&start) {
        return (f64::INFINITY, start);
    }
    let mut g = start;
    let mut qt = act(q2, &g);
    let mut e = grid::distance(q1, &qt).powi(2);
    let mut step = 0.05;
    for _ in 0..POLISH_ITER {
        let r: Vec<f64> = q1.iter().zip(&qt).map(|(a, b)| a - b).collect();
        let dq = grid::derivative(&qt);
        let grad: Vec<f64> = basis
            .funcs
            .iter()
            .zip(&basis.shifts)
            .map(|(b, w)| {
                let dir: Vec<f64> = (0..n).map(|i| dq[i] * w[i] + qt[i] * b[i]).collect();
                -2.0 * grid::inner(&r, &dir)
            })
            .collect();
        let gn = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let mut v = vec![0.0; n];
        for (gk, b) in grad.iter().zip(&basis.funcs) {
            v.iter_mut().zip(b).for_each(|(x, b)| *x -= gk / gn * b);
        }
        let mut improved = false;
        for _ in 0..12 {
            let sv: Vec<f64> = v.iter().map(|x| x * step).collect();
            if let Some(inc) = exp_warp(&sv) {
                let mut cand: Vec<f64> = inc.iter().map(|&t| grid::interpolate(&g, t)).collect();
                cand[0] = 0.0;
                cand[n - 1] = 1.0;
                if strictly_increasing(&cand) {
                    let qc = act(q2, &cand);
                    let ec = grid::distance(q1, &qc).powi(2);
                    if ec < e {
                        improved = (e - ec) > POLISH_REL_TOL * e;
                        g = cand;
                        qt = qc;
                        e = ec;
                        step *= 1.5;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (e, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_is_coprime_and_diagonal_first() {
        let s = stencil();
        assert_eq!(s[0], (1, 1));
        assert!(s.iter().all(|&(a, b)| gcd(a, b) == 1 && a <= MAX_STEP && b <= MAX_STEP));
        assert_eq!(s.len(), 35);
    }

    #[test]
    fn identical_inputs_give_identity() {
        let q = Srsf::from_fn(64, |t| (6.0 * t).sin()).unwrap();
        let a = amplitude_distance(&q, &q).unwrap();
        assert_eq!(a.distance, 0.0);
        assert_eq!(a.warp, Warping::identity(64));
    }

    #[test]
    fn flat_regions_follow_diagonal() {
        let q = Srsf::new(vec![0.0; 40]).unwrap();
        let a = amplitude_distance(&q, &q).unwrap();
        assert_eq!(a.warp, Warping::identity(40));
    }

    #[test]
    fn segment_cost_agrees_with_table_sum() {
        let q1: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
        let q2: Vec<f64> = (0..12).map(|i| (i as f64 * 0.3).cos()).collect();
        let (energy, path) = optimal_path(&q1, &q2);
        let mut acc = 0.0;
        for w in path.windows(2) {
            acc += segment_cost(&q1, &q2, w[0], w[1]);
        }
        assert_eq!(acc, energy);
    }

    #[test]
    fn orbit_member_is_recovered() {
        for n in [101, 257] {
            let q = Srsf::from_fn(n, |t| 2.0 * (-(t - 0.5f64).powi(2) / 0.05).exp()).unwrap();
            let g = Warping::from_fn(n, |t| t + 0.3 * t * (1.0 - t)).unwrap();
            let qw = crate::fda::group_action(&q, &g).unwrap();
            let a = amplitude_distance(&q, &qw).unwrap();
            assert!(a.distance <= 1e-2 * q.norm(), "n={n} d={}", a.distance);
            assert!(a.distance <= a.lattice_distance);
            assert!(a.warp.sup_distance(&g.inverse()) <= 2.0 * grid::step(n));
        }
    }

    #[test]
    fn smoothing_keeps_endpoints() {
        let g: Vec<f64> = grid::nodes(30).iter().map(|t| t * t).collect();
        let s = smooth_warp(&g, 2, 3);
        assert_eq!((s[0], s[29]), (0.0, 1.0));
        assert!(strictly_increasing(&s));
    }
}
