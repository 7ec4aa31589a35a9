//! Periods, the L² base metric and fiber volumes for charts whose leaves
//! are coordinate tori of period one. Since `ω` has constant coefficients
//! the period matrix `λ` is constant, so every `ξ_i = Σ_j λ_ij db^j` is
//! closed.

use rayon::prelude::*;

use super::LeafChart;
use crate::error::{Error, Result};
use crate::exterior::{Vector, DIM};
use crate::linalg::Mat;
use crate::patch::{format_point, point_in, Coef, Jet};
use crate::scalar::{Field, Rational, Ring};

type M3 = [[f64; 3]; 3];

/// Fiber data at one base point. The fiber through `anchor` is the leaf
/// torus obtained by varying the leaf coordinates over one period.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FiberData {
    pub anchor: Vec<String>,
    /// `l(∂b_j)` as the coefficients `[j][a]` of `dl^a`.
    pub leaf_forms: M3,
    /// `λ_ij = ∫_{A_i} l(∂b_j)`.
    pub lambda: M3,
    /// `μ_ij = ∫_{B_i} *l(∂b_j)`.
    pub mu: M3,
    /// `g_B(∂b_j, ∂b_k) = ∫ ⟨l(∂b_j), l(∂b_k)⟩ vol`.
    pub g_base: M3,
    pub volume: f64,
    /// `det` of the base metric in the coordinates `u_i` with `du_i = ξ_i`.
    pub det_g_u: f64,
    /// Largest `|q(∂b_j, ∂b_k) − vol⁻¹ g_B(∂b_j, ∂b_k)|` over the fiber,
    /// relative to `max |vol⁻¹ g_B|`.
    pub isometry_residual: f64,
    /// Largest `|d * l(∂b_j)|` over the quadrature nodes.
    pub coclosed_residual: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FibrationData {
    pub fibers: Vec<FiberData>,
    /// Quadrature nodes per leaf axis.
    pub nodes: usize,
    /// Largest change of `μ`, `g_B` and the volume when the node count doubles.
    pub richardson: f64,
    pub volume_spread: f64,
    pub det_g_u_spread: f64,
    /// Fiber volumes constant across the base.
    pub monge_ampere: bool,
    /// Constant `det g_u` and constant fiber volume agree.
    pub monge_ampere_consistent: bool,
    pub isometry_residual: f64,
    pub coclosed_residual: f64,
}

fn to_m3<V: Field>(m: &Mat<V>) -> M3 {
    std::array::from_fn(|i| std::array::from_fn(|j| m.get(i, j).to_f64()))
}

fn max_diff(a: &M3, b: &M3) -> f64 {
    (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| (a[i][j] - b[i][j]).abs()).fold(0.0, f64::max)
}

fn spread(xs: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

struct Quadrature<'a, C: Coef> {
    chart: &'a LeafChart<C>,
    leaf_forms: Mat<C::Value>,
}

/// Leaf metric `G_ab = g(∂l_a, ∂l_b)` and the base pairing at one point.
struct NodeData<V> {
    metric: Mat<Jet<V>>,
    q: Mat<V>,
}

impl<'a, C: Coef> Quadrature<'a, C> {
    fn new(chart: &'a LeafChart<C>) -> Self {
        let m = chart.frame().matrix();
        let (leaf, base) = (chart.leaf_axes(), chart.base_axes());
        let leaf_forms = Mat::from_fn(3, 3, |j, a| m.get(base[j], leaf[a]).clone());
        Quadrature { chart, leaf_forms }
    }

    fn node(&self, p: &[Rational; DIM]) -> Result<NodeData<C::Value>> {
        let pv = point_in::<C::Value>(p);
        let cp = self.chart.point(&pv, false);
        let leaf = self.chart.leaf_axes();
        let at = |e: Error| Error::Domain(format!("at {}: {e}", format_point(p)));
        let mut metric = Mat::from_fn(3, 3, |_, _| Jet::zero());
        for a in 0..3 {
            for b in 0..3 {
                let ea = Vector::<Jet<C::Value>>::basis(leaf[a]);
                let eb = Vector::<Jet<C::Value>>::basis(leaf[b]);
                metric.set(a, b, cp.leaf_metric_jet(&ea, &eb).map_err(at)?);
            }
        }
        let q = cp.hessian_jets().map(|x| x.value.clone());
        Ok(NodeData { metric, q })
    }

    /// `|∂_a(√det G (G⁻¹ l)^a)| / √det G` for each leaf form.
    fn coclosed(&self, node: &NodeData<C::Value>) -> Result<f64> {
        let leaf = self.chart.leaf_axes();
        let det = node.metric.det_cofactor();
        let inv = super::cofactor_inverse(&node.metric).ok_or_else(|| Error::Domain("degenerate leaf metric".into()))?;
        let mut worst: f64 = 0.0;
        for j in 0..3 {
            let u: [Jet<C::Value>; 3] = std::array::from_fn(|a| {
                (0..3).fold(Jet::zero(), |acc, b| acc + inv.get(a, b).clone() * Jet::constant(self.leaf_forms.get(j, b).clone()))
            });
            let mut div = C::Value::zero();
            for a in 0..3 {
                div = div + u[a].grad[leaf[a]].clone();
                div = div + det.grad[leaf[a]].clone() * u[a].value.clone() / (C::Value::from_i64(2) * det.value.clone());
            }
            worst = worst.max(div.to_f64().abs());
        }
        Ok(worst)
    }

    fn shifted(&self, anchor: &[Rational; DIM], offsets: [Rational; 3]) -> [Rational; DIM] {
        let mut p = anchor.clone();
        for (a, off) in self.chart.leaf_axes().into_iter().zip(offsets) {
            p[a] = p[a].clone() + off;
        }
        p
    }

    /// `λ_ij = ω(∂b_j, ∂l_i)`: the leaf forms have constant coefficients,
    /// so each loop integral over one period is exact.
    fn lambda(&self) -> M3 {
        std::array::from_fn(|i| std::array::from_fn(|j| self.leaf_forms.get(j, i).to_f64()))
    }

    fn fiber(&self, anchor: &[Rational; DIM], n: usize) -> Result<FiberData> {
        let mid = |k: usize| Rational::new((2 * k + 1).into(), (2 * n).into());
        let zero = Rational::zero();
        let cells: Vec<[usize; 3]> = (0..n).flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| [a, b, c]))).collect();
        let l = to_m3(&self.leaf_forms);
        let lambda = self.lambda();

        struct Cell {
            g: M3,
            vol: f64,
            q: M3,
            coclosed: f64,
        }
        let cell_data: Vec<Cell> = cells
            .par_iter()
            .map(|&[a, b, c]| {
                let p = self.shifted(anchor, [mid(a), mid(b), mid(c)]);
                let node = self.node(&p)?;
                let gm = nalgebra::Matrix3::from_fn(|i, j| node.metric.get(i, j).value.to_f64());
                let ginv = gm.try_inverse().ok_or_else(|| Error::Domain(format!("degenerate leaf metric at {}", format_point(&p))))?;
                let sq = gm.determinant().sqrt();
                let g = std::array::from_fn(|j| {
                    std::array::from_fn(|k| (0..3).flat_map(|s| (0..3).map(move |t| (s, t))).map(|(s, t)| l[j][s] * ginv[(s, t)] * l[k][t]).sum::<f64>() * sq)
                });
                Ok(Cell { g, vol: sq, q: to_m3(&node.q), coclosed: self.coclosed(&node)? })
            })
            .collect::<Result<_>>()?;
        let w = 1.0 / (n * n * n) as f64;
        let mut g_base = [[0.0; 3]; 3];
        let mut volume = 0.0;
        for cell in &cell_data {
            volume += cell.vol * w;
            for j in 0..3 {
                for k in 0..3 {
                    g_base[j][k] += cell.g[j][k] * w;
                }
            }
        }

        // μ over the 2-tori spanned by the two remaining leaf axes
        let mut mu = [[0.0; 3]; 3];
        let w2 = 1.0 / (n * n) as f64;
        for i in 0..3 {
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            for a in 0..n {
                for b in 0..n {
                    let mut off = [zero.clone(), zero.clone(), zero.clone()];
                    off[i1] = mid(a);
                    off[i2] = mid(b);
                    let p = self.shifted(anchor, off);
                    let node = self.node(&p)?;
                    let gm = nalgebra::Matrix3::from_fn(|s, t| node.metric.get(s, t).value.to_f64());
                    let ginv = gm.try_inverse().ok_or_else(|| Error::Domain(format!("degenerate leaf metric at {}", format_point(&p))))?;
                    let sq = gm.determinant().sqrt();
                    for j in 0..3 {
                        mu[i][j] += sq * (0..3).map(|t| ginv[(i, t)] * l[j][t]).sum::<f64>() * w2;
                    }
                }
            }
        }

        let avg: M3 = std::array::from_fn(|j| std::array::from_fn(|k| g_base[j][k] / volume));
        let scale = avg.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let isometry_residual = cell_data.iter().map(|c| max_diff(&c.q, &avg) / scale).fold(0.0, f64::max);
        let lam = nalgebra::Matrix3::from_fn(|i, j| lambda[i][j]);
        let lam_inv = lam.try_inverse().ok_or_else(|| Error::Domain("period matrix λ is singular".into()))?;
        let gb = nalgebra::Matrix3::from_fn(|i, j| g_base[i][j]);
        let g_u = lam_inv.transpose() * gb * lam_inv;
        Ok(FiberData {
            anchor: anchor.iter().map(ToString::to_string).collect(),
            leaf_forms: l,
            lambda,
            mu,
            g_base,
            volume,
            det_g_u: g_u.determinant(),
            isometry_residual,
            coclosed_residual: cell_data.iter().map(|c| c.coclosed).fold(0.0, f64::max),
        })
    }
}

/// Fiber integrals at the base nodes of the chart grid, using `nodes`
/// midpoint nodes per leaf axis and a second pass at `2·nodes` for the
/// Richardson check. The leaf coordinates must have period one, which
/// requires every leaf axis of the patch to have length one.
pub fn fibration_analysis<C: Coef>(chart: &LeafChart<C>, nodes: usize, tol: f64) -> Result<FibrationData> {
    let patch = chart.patch();
    let leaf = chart.leaf_axes();
    if let Some(&a) = leaf.iter().find(|&&a| patch.length(a) != Rational::one()) {
        return Err(Error::Domain(format!("leaf coordinate {} must have period 1, the patch has length {}", patch.names()[a], patch.length(a))));
    }
    if nodes == 0 {
        return Err(Error::Domain("at least one quadrature node per axis is required".into()));
    }
    let mut anchors: Vec<[Rational; DIM]> = patch
        .grid_points()
        .into_iter()
        .map(|mut p| {
            for &a in &leaf {
                p[a] = patch.lower()[a].clone();
            }
            p
        })
        .collect();
    anchors.sort();
    anchors.dedup();
    let quad = Quadrature::new(chart);
    let fibers = anchors.iter().map(|p| quad.fiber(p, nodes)).collect::<Result<Vec<_>>>()?;
    let mut richardson: f64 = 0.0;
    for (p, coarse) in anchors.iter().zip(&fibers) {
        let fine = quad.fiber(p, 2 * nodes)?;
        richardson = richardson
            .max(max_diff(&fine.mu, &coarse.mu))
            .max(max_diff(&fine.g_base, &coarse.g_base))
            .max((fine.volume - coarse.volume).abs());
    }

    let volume_spread = spread(fibers.iter().map(|f| f.volume));
    let det_g_u_spread = spread(fibers.iter().map(|f| f.det_g_u));
    let vol_scale = fibers.iter().map(|f| f.volume.abs()).fold(1.0, f64::max);
    let det_scale = fibers.iter().map(|f| f.det_g_u.abs()).fold(1.0, f64::max);
    let monge_ampere = volume_spread <= tol * vol_scale;
    let det_constant = det_g_u_spread <= tol * det_scale;
    Ok(FibrationData {
        nodes,
        richardson,
        volume_spread,
        det_g_u_spread,
        monge_ampere,
        monge_ampere_consistent: monge_ampere == det_constant,
        isometry_residual: fibers.iter().map(|f| f.isometry_residual).fold(0.0, f64::max),
        coclosed_residual: fibers.iter().map(|f| f.coclosed_residual).fold(0.0, f64::max),
        fibers,
    })
}
