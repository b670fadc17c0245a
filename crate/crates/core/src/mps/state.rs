//! Open-boundary matrix product state in mixed-canonical form.
//!
//! Tensors have shape `(χ_left, d, χ_right)`. Sites left of the centre are
//! left-isometries and sites right of it are right-isometries, so the state
//! norm is the Frobenius norm of the centre tensor.

use ndarray::{s, Array1, Array2, Array3, Axis};
use ndarray_linalg::{JobSvd, SVD, SVDDC};

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

/// SVD truncation policy for two-site updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub chi_max: usize,
    /// Largest relative discarded weight allowed per split.
    pub threshold: f64,
}

impl Truncation {
    pub fn exact() -> Self {
        Truncation {
            chi_max: usize::MAX,
            threshold: 0.0,
        }
    }
}

/// Direction the canonical centre moves during a two-site update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpsState {
    tensors: Vec<Array3<C64>>,
    center: usize,
    /// Sum of discarded weights over all truncations so far.
    pub cumulative_discarded: f64,
}

impl MpsState {
    /// Product state with site `i` in local level `levels[i]`.
    pub fn product(dims: &[usize], levels: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.len() != levels.len() {
            return Err(Error::invalid(
                "mps",
                "site dims and levels must be non-empty and equal length",
            ));
        }
        let mut tensors = Vec::with_capacity(dims.len());
        for (i, (&d, &l)) in dims.iter().zip(levels).enumerate() {
            if l >= d {
                return Err(Error::invalid(
                    "mps",
                    format!("level {l} out of range at site {i}"),
                ));
            }
            let mut t = Array3::zeros((1, d, 1));
            t[[0, l, 0]] = ONE;
            tensors.push(t);
        }
        Ok(MpsState {
            tensors,
            center: 0,
            cumulative_discarded: 0.0,
        })
    }

    /// Build from raw tensors; `center` must be consistent with the gauge.
    pub fn from_tensors(tensors: Vec<Array3<C64>>, center: usize) -> Result<Self> {
        if tensors.is_empty() || center >= tensors.len() {
            return Err(Error::invalid("mps", "centre out of range"));
        }
        for w in tensors.windows(2) {
            if w[0].dim().2 != w[1].dim().0 {
                return Err(Error::invalid("mps", "bond dimensions do not match"));
            }
        }
        if tensors[0].dim().0 != 1 || tensors[tensors.len() - 1].dim().2 != 1 {
            return Err(Error::invalid(
                "mps",
                "open boundary requires unit edge bonds",
            ));
        }
        Ok(MpsState {
            tensors,
            center,
            cumulative_discarded: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn tensors(&self) -> &[Array3<C64>] {
        &self.tensors
    }

    pub fn site_dims(&self) -> Vec<usize> {
        self.tensors.iter().map(|t| t.dim().1).collect()
    }

    /// Bond dimensions between consecutive sites.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.len() - 1]
            .iter()
            .map(|t| t.dim().2)
            .collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    pub fn norm(&self) -> f64 {
        self.tensors[self.center]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn move_center(&mut self, target: usize) -> Result<()> {
        assert!(target < self.len());
        while self.center < target {
            let c = self.center;
            let (l, d, r) = self.tensors[c].dim();
            let m = self.tensors[c].to_shape((l * d, r)).unwrap().to_owned();
            let (u, s, vt) = block_svd(&m)?;
            let k = s.len();
            let sv = &vt * &s.mapv(|x| C64::new(x, 0.0)).insert_axis(Axis(1));
            self.tensors[c] = u.into_shape_with_order((l, d, k)).unwrap();
            self.tensors[c + 1] = absorb_left(&sv, &self.tensors[c + 1]);
            self.center += 1;
        }
        while self.center > target {
            let c = self.center;
            let (l, d, r) = self.tensors[c].dim();
            let m = self.tensors[c].to_shape((l, d * r)).unwrap().to_owned();
            let (u, s, vt) = block_svd(&m)?;
            let k = s.len();
            let us = &u * &s.mapv(|x| C64::new(x, 0.0)).insert_axis(Axis(0));
            self.tensors[c] = vt.into_shape_with_order((k, d, r)).unwrap();
            self.tensors[c - 1] = absorb_right(&self.tensors[c - 1], &us);
            self.center -= 1;
        }
        Ok(())
    }

    /// Apply a two-site gate on sites `(i, i+1)` and split with truncation.
    ///
    /// The centre is moved onto the pair first; afterwards it sits on `i+1`
    /// for [`Sweep::Right`] and on `i` for [`Sweep::Left`]. Returns the
    /// relative discarded weight.
    pub fn apply_two_site(
        &mut self,
        i: usize,
        gate: &Array2<C64>,
        sweep: Sweep,
        trunc: Truncation,
    ) -> Result<f64> {
        if self.center != i && self.center != i + 1 {
            self.move_center(i)?;
        }
        let (l, d1, _) = self.tensors[i].dim();
        let (_, d2, r) = self.tensors[i + 1].dim();
        let theta = two_site_matrix(&self.tensors[i], &self.tensors[i + 1]);
        let theta = apply_gate(theta, gate, l, d1, d2, r);
        let (u, s, vt, discarded) = split(theta, trunc)?;
        let k = s.len();
        match sweep {
            Sweep::Right => {
                self.tensors[i] = u.into_shape_with_order((l, d1, k)).unwrap();
                let sv = &vt * &s.mapv(|x| C64::new(x, 0.0)).insert_axis(Axis(1));
                self.tensors[i + 1] = sv.into_shape_with_order((k, d2, r)).unwrap();
                self.center = i + 1;
            }
            Sweep::Left => {
                let us = &u * &s.mapv(|x| C64::new(x, 0.0)).insert_axis(Axis(0));
                self.tensors[i] = us.into_shape_with_order((l, d1, k)).unwrap();
                self.tensors[i + 1] = vt.into_shape_with_order((k, d2, r)).unwrap();
                self.center = i;
            }
        }
        self.cumulative_discarded += discarded;
        Ok(discarded)
    }

    /// `⟨ψ|O_site|ψ⟩` for a single-site operator.
    pub fn local_expectation_complex(&mut self, site: usize, op: &Array2<C64>) -> Result<C64> {
        self.move_center(site)?;
        let t = &self.tensors[site];
        let (l, d, r) = t.dim();
        if op.dim() != (d, d) {
            return Err(Error::invalid(
                "observable",
                format!("expected {d}x{d} matrix"),
            ));
        }
        let mut acc = ZERO;
        for a in 0..l {
            for b in 0..r {
                for s in 0..d {
                    let bra = t[[a, s, b]].conj();
                    if bra == ZERO {
                        continue;
                    }
                    for s2 in 0..d {
                        acc += bra * op[[s, s2]] * t[[a, s2, b]];
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Real expectation of a Hermitian single-site observable.
    pub fn local_expectation(&mut self, site: usize, op: &Array2<C64>) -> Result<f64> {
        let z = self.local_expectation_complex(site, op)?;
        let scale = op.iter().map(|x| x.norm()).fold(1.0, f64::max);
        debug_assert!(z.im.abs() <= 1e-10 * scale, "imaginary residue {}", z.im);
        Ok(z.re)
    }

    /// `⟨ψ|O_{i,i+1}|ψ⟩` for an operator on two adjacent sites, indexed
    /// `(s_i s_{i+1}, s_i' s_{i+1}')`.
    pub fn bond_expectation(&mut self, i: usize, op: &Array2<C64>) -> Result<C64> {
        if self.center != i && self.center != i + 1 {
            self.move_center(i)?;
        }
        let (l, d1, _) = self.tensors[i].dim();
        let (_, d2, r) = self.tensors[i + 1].dim();
        let theta = two_site_matrix(&self.tensors[i], &self.tensors[i + 1]);
        let applied = apply_gate(theta.clone(), op, l, d1, d2, r);
        Ok(theta
            .iter()
            .zip(applied.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Dense state vector with site 0 as the most significant index.
    /// Exponential in length; meant for small checks.
    pub fn to_dense(&self) -> Array1<C64> {
        let mut acc: Array2<C64> = self.tensors[0].index_axis(Axis(0), 0).to_owned();
        for t in &self.tensors[1..] {
            let (l, d, r) = t.dim();
            let m = t.to_shape((l, d * r)).unwrap();
            let rows = acc.nrows();
            acc = acc.dot(&m).into_shape_with_order((rows * d, r)).unwrap();
        }
        acc.column(0).to_owned()
    }

    /// Largest deviation from the isometry conditions of the canonical form.
    pub fn canonical_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, t) in self.tensors.iter().enumerate() {
            let (l, d, r) = t.dim();
            if i < self.center {
                let m = t.to_shape((l * d, r)).unwrap();
                let g = adjoint(&m.to_owned()).dot(&m);
                worst = worst.max(identity_defect(&g));
            } else if i > self.center {
                let m = t.to_shape((l, d * r)).unwrap();
                let g = m.dot(&adjoint(&m.to_owned()));
                worst = worst.max(identity_defect(&g));
            }
        }
        worst
    }
}

fn identity_defect(g: &Array2<C64>) -> f64 {
    g.indexed_iter()
        .map(|((a, b), z)| (z - if a == b { ONE } else { ZERO }).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn adjoint(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj()).as_standard_layout().into_owned()
}

/// `R · T` contracted over the left bond of `T`.
fn absorb_left(r: &Array2<C64>, t: &Array3<C64>) -> Array3<C64> {
    let (l, d, rr) = t.dim();
    let m = t.to_shape((l, d * rr)).unwrap();
    let k = r.nrows();
    r.dot(&m)
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((k, d, rr))
        .unwrap()
}

/// `T · R` contracted over the right bond of `T`.
fn absorb_right(t: &Array3<C64>, r: &Array2<C64>) -> Array3<C64> {
    let (l, d, rr) = t.dim();
    let m = t.to_shape((l * d, rr)).unwrap();
    let k = r.ncols();
    m.dot(r)
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((l, d, k))
        .unwrap()
}

/// Contract two neighbours into the `(χ_l d₁) × (d₂ χ_r)` matrix.
fn two_site_matrix(a: &Array3<C64>, b: &Array3<C64>) -> Array2<C64> {
    let (l, d1, m) = a.dim();
    let (_, d2, r) = b.dim();
    let am = a.to_shape((l * d1, m)).unwrap();
    let bm = b.to_shape((m, d2 * r)).unwrap();
    am.dot(&bm)
}

/// Apply `gate[(s1' s2'), (s1 s2)]` to the physical legs of a two-site matrix.
fn apply_gate(
    theta: Array2<C64>,
    gate: &Array2<C64>,
    l: usize,
    d1: usize,
    d2: usize,
    r: usize,
) -> Array2<C64> {
    let t4 = theta
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((l, d1, d2, r))
        .unwrap();
    let phys_first = t4.permuted_axes([1, 2, 0, 3]);
    let flat = phys_first
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((d1 * d2, l * r))
        .unwrap();
    let out = gate
        .dot(&flat)
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((d1, d2, l, r))
        .unwrap();
    out.permuted_axes([2, 0, 1, 3])
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((l * d1, d2 * r))
        .unwrap()
}

type SplitResult = (Array2<C64>, Array1<f64>, Array2<C64>, f64);

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Row and column index sets of the independent blocks of `m`: rows and
/// columns linked by exactly nonzero entries end up in the same block.
fn blocks(m: &Array2<C64>) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (nr, nc) = m.dim();
    let mut parent: Vec<usize> = (0..nr + nc).collect();
    for ((i, j), z) in m.indexed_iter() {
        if *z != ZERO {
            let (a, b) = (find(&mut parent, i), find(&mut parent, nr + j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut slot = vec![usize::MAX; nr + nc];
    for x in 0..nr + nc {
        let root = find(&mut parent, x);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push((Vec::new(), Vec::new()));
        }
        let g = &mut groups[slot[root]];
        if x < nr {
            g.0.push(x);
        } else {
            g.1.push(x - nr);
        }
    }
    groups.retain(|g| !g.0.is_empty() && !g.1.is_empty());
    groups
}

fn dense_svd(m: Array2<C64>) -> Result<(Array2<C64>, Array1<f64>, Array2<C64>)> {
    match m.svddc(JobSvd::Some) {
        Ok((Some(u), s, Some(vt))) => Ok((u, s, vt)),
        _ => {
            // divide-and-conquer occasionally fails to converge
            let (u, s, vt) = m.svd(true, true)?;
            let k = s.len();
            Ok((
                u.unwrap().slice(s![.., ..k]).to_owned(),
                s,
                vt.unwrap().slice(s![..k, ..]).to_owned(),
            ))
        }
    }
}

/// SVD computed block by block, singular values in descending order.
///
/// Matrices built from charge-conserving gates are block diagonal up to a
/// permutation, and the exact zeros between blocks survive the contraction,
/// so each block is decomposed on its own.
pub(crate) fn block_svd(theta: &Array2<C64>) -> Result<(Array2<C64>, Array1<f64>, Array2<C64>)> {
    let (nr, nc) = theta.dim();
    let mut parts = Vec::new();
    for (rows, cols) in blocks(theta) {
        let sub =
            Array2::from_shape_fn((rows.len(), cols.len()), |(a, b)| theta[[rows[a], cols[b]]]);
        let (u, s, vt) = dense_svd(sub)?;
        parts.push((rows, cols, u, s, vt));
    }
    let mut order: Vec<(f64, usize, usize)> = parts
        .iter()
        .enumerate()
        .flat_map(|(b, p)| p.3.iter().enumerate().map(move |(k, &x)| (x, b, k)))
        .collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    let k = order.len();
    let mut u = Array2::zeros((nr, k));
    let mut vt = Array2::zeros((k, nc));
    let mut sv = Array1::zeros(k);
    for (col, &(x, b, kk)) in order.iter().enumerate() {
        let (rows, cols, pu, _, pv) = &parts[b];
        sv[col] = x;
        for (a, &r) in rows.iter().enumerate() {
            u[[r, col]] = pu[[a, kk]];
        }
        for (a, &c) in cols.iter().enumerate() {
            vt[[col, c]] = pv[[kk, a]];
        }
    }
    Ok((u, sv, vt))
}

/// Truncated SVD. Singular values are renormalized to unit total weight.
pub(crate) fn split(theta: Array2<C64>, trunc: Truncation) -> Result<SplitResult> {
    let (u, s, vt) = block_svd(&theta)?;
    let total: f64 = s.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return Err(Error::invalid("mps", "two-site wavefunction vanished"));
    }
    let mut keep = s.len();
    let mut dropped = 0.0;
    while keep > 1 {
        let w = s[keep - 1] * s[keep - 1] / total;
        if keep > trunc.chi_max || dropped + w <= trunc.threshold {
            dropped += w;
            keep -= 1;
        } else {
            break;
        }
    }
    let kept_weight: f64 = s.iter().take(keep).map(|x| x * x).sum();
    let scale = (total / kept_weight).sqrt() / total.sqrt();
    let s_kept = s.slice(s![..keep]).mapv(|x| x * scale);
    Ok((
        u.slice(s![.., ..keep]).as_standard_layout().into_owned(),
        s_kept,
        vt.slice(s![..keep, ..]).as_standard_layout().into_owned(),
        dropped,
    ))
}
