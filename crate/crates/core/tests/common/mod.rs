//! Reference implementations used by several integration tests.

#![allow(dead_code)]

use num_complex::Complex64 as C64;
use thermal_stirap::bath::ChainBath;
use thermal_stirap::PulseShape;

/// Sparse matrix in coordinate form.
#[derive(Default, Clone)]
pub struct Coo {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Coo {
    fn push(&mut self, r: usize, c: usize, v: f64) {
        if v != 0.0 {
            self.rows.push(r);
            self.cols.push(c);
            self.vals.push(v);
        }
    }

    fn apply(&self, scale: f64, x: &[C64], y: &mut [C64]) {
        for ((&r, &c), &v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            y[r] += x[c] * (scale * v);
        }
    }
}

/// State-vector model of the two qubits plus both chains in the lab frame.
///
/// Basis digits are `[q₁, q₂, c₁,₁ … c₁,n, c₂,₁ … c₂,m]`, first digit most
/// significant.
pub struct DenseLattice {
    pub dims: Vec<usize>,
    pub h0: Coo,
    pub hp: Coo,
    pub hs: Coo,
    pub pulse: PulseShape,
}

impl DenseLattice {
    pub fn new(
        omega_q1: f64,
        omega_q2: f64,
        chain: &ChainBath,
        d_loc: usize,
        pulse: PulseShape,
    ) -> Self {
        let n1 = chain.chain1.len();
        let n2 = chain.chain2.len();
        let mut dims = vec![2, 2];
        dims.extend(std::iter::repeat(d_loc).take(n1 + n2));
        let dim: usize = dims.iter().product();
        let c1 = |j: usize| 2 + j;
        let c2 = |j: usize| 2 + n1 + j;
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let (mut h0, mut hp, mut hs) = (Coo::default(), Coo::default(), Coo::default());
        let mut digits = vec![0usize; dims.len()];
        for idx in 0..dim {
            let mut rem = idx;
            for k in 0..dims.len() {
                digits[k] = rem / strides[k];
                rem %= strides[k];
            }
            let mut e = omega_q1 * digits[0] as f64 + omega_q2 * digits[1] as f64;
            for j in 0..n1 {
                e += chain.chain1.alpha[j] * digits[c1(j)] as f64;
            }
            for j in 0..n2 {
                e += chain.chain2.alpha[j] * digits[c2(j)] as f64;
            }
            h0.push(idx, idx, e);
            // b_a† b_b |..⟩ for a != b, hermitian partner generated by the swap
            let hop = |h: &mut Coo, a: usize, b: usize, coef: f64| {
                for (x, y) in [(a, b), (b, a)] {
                    if digits[y] > 0 && digits[x] + 1 < dims[x] {
                        let amp = ((digits[y]) as f64).sqrt() * ((digits[x] + 1) as f64).sqrt();
                        let target = idx + strides[x] - strides[y];
                        h.push(target, idx, coef * amp);
                    }
                }
            };
            for j in 1..n1 {
                hop(&mut h0, c1(j - 1), c1(j), chain.chain1.beta[j]);
            }
            for j in 1..n2 {
                hop(&mut h0, c2(j - 1), c2(j), chain.chain2.beta[j]);
            }
            // σ⁻ c₁† + h.c. behaves like a hop between a qubit and the chain-1 head
            if n1 > 0 {
                hop(&mut hp, 0, c1(0), chain.chain1.head_coupling());
                hop(&mut hs, 1, c1(0), chain.chain1.head_coupling());
            }
            // σ⁻ c₂ + σ⁺ c₂†: lower (raise) the qubit and the chain-2 head together
            if n2 > 0 {
                let g = chain.chain2.head_coupling();
                for (h, q) in [(&mut hp, 0usize), (&mut hs, 1usize)] {
                    let head = c2(0);
                    if digits[q] == 1 && digits[head] > 0 {
                        let amp = (digits[head] as f64).sqrt();
                        h.push(idx - strides[q] - strides[head], idx, g * amp);
                    }
                    if digits[q] == 0 && digits[head] + 1 < d_loc {
                        let amp = ((digits[head] + 1) as f64).sqrt();
                        h.push(idx + strides[q] + strides[head], idx, g * amp);
                    }
                }
            }
        }
        DenseLattice {
            dims,
            h0,
            hp,
            hs,
            pulse,
        }
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn derivative(&self, t: f64, x: &[C64], out: &mut [C64]) {
        let (wp, ws) = self.pulse.values(t);
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        self.h0.apply(1.0, x, out);
        self.hp.apply(wp, x, out);
        self.hs.apply(ws, x, out);
        out.iter_mut().for_each(|z| *z = C64::new(z.im, -z.re));
    }

    /// Initial state: first qubit excited, everything else in its ground state.
    pub fn initial(&self) -> Vec<C64> {
        let mut psi = vec![C64::new(0.0, 0.0); self.dim()];
        psi[self.dim() / 2] = C64::new(1.0, 0.0);
        psi
    }

    pub fn fidelities(&self, psi: &[C64]) -> (f64, f64) {
        let quarter = self.dim() / 4;
        let mut f = (0.0, 0.0);
        for (i, z) in psi.iter().enumerate() {
            let q = i / quarter;
            if q >= 2 {
                f.0 += z.norm_sqr();
            }
            if q % 2 == 1 {
                f.1 += z.norm_sqr();
            }
        }
        f
    }

    /// RK4 over `[t0, t0 + steps·dt]`, sampling `(t, F₁, F₂)` every `stride` steps.
    pub fn evolve(&self, t0: f64, dt: f64, steps: usize, stride: usize) -> Vec<(f64, f64, f64)> {
        let n = self.dim();
        let mut psi = self.initial();
        let zero = C64::new(0.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4) =
            (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
        let mut tmp = vec![zero; n];
        let mut out = vec![{
            let f = self.fidelities(&psi);
            (t0, f.0, f.1)
        }];
        for step in 0..steps {
            let t = t0 + step as f64 * dt;
            self.derivative(t, &psi, &mut k1);
            for i in 0..n {
                tmp[i] = psi[i] + k1[i] * (dt / 2.0);
            }
            self.derivative(t + dt / 2.0, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = psi[i] + k2[i] * (dt / 2.0);
            }
            self.derivative(t + dt / 2.0, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = psi[i] + k3[i] * dt;
            }
            self.derivative(t + dt, &tmp, &mut k4);
            for i in 0..n {
                psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
            }
            if (step + 1) % stride == 0 {
                let f = self.fidelities(&psi);
                out.push((t0 + (step + 1) as f64 * dt, f.0, f.1));
            }
        }
        out
    }
}

/// Four modes per family, small enough for the dense oracle.
pub fn small_params(temperature: f64) -> thermal_stirap::mps::ContinuumModelParams {
    thermal_stirap::mps::ContinuumModelParams {
        pulse: PulseShape::new(1.5, 1.0, 0.6).unwrap(),
        delta: 0.5,
        n_chain: 4,
        ..thermal_stirap::mps::ContinuumModelParams::ci_scale(temperature)
    }
}

/// Largest |ΔF₁|, |ΔF₂| between an MPS run of the small lattice with
/// unbounded bond dimension and dense state-vector integration.
pub fn small_oracle_diff(
    temperature: f64,
    integrator: thermal_stirap::mps::Integrator,
    dt: f64,
    t_max: f64,
) -> f64 {
    use thermal_stirap::mps::{evolve_tcmps, EvolveConfig};
    let p = small_params(temperature);
    let chain = p.build_chain().unwrap();
    let record_every = 0.1;
    let cfg = EvolveConfig {
        dt,
        chi_max: 100_000,
        svd_threshold: 0.0,
        d_loc: 3,
        t_max: Some(t_max),
        integrator,
        stride: (record_every / dt).round() as usize,
        discarded_ceiling: 1e-3,
    };
    let r = evolve_tcmps(&p, &chain, &cfg).unwrap();
    let dense_dt = 0.002;
    let steps = (2.0 * t_max / dense_dt).round() as usize;
    let dense = DenseLattice::new(p.omega_q1, p.omega_q2, &chain, 3, p.pulse);
    let reference = dense.evolve(
        -t_max,
        dense_dt,
        steps,
        (record_every / dense_dt).round() as usize,
    );
    assert_eq!(reference.len(), r.times.len());
    let mut worst = 0.0f64;
    for (k, &(t, f1, f2)) in reference.iter().enumerate() {
        assert!((t - r.times[k]).abs() < 1e-9, "time grids differ");
        worst = worst.max((f1 - r.f1[k]).abs()).max((f2 - r.f2[k]).abs());
    }
    worst
}

/// `Σ_j g_j² ω_j^k` for a star.
pub fn star_moment(freqs: &[f64], couplings: &[f64], k: u32) -> f64 {
    freqs
        .iter()
        .zip(couplings)
        .map(|(w, g)| g * g * w.powi(k as i32))
        .sum()
}

/// `β₁² (T^k)₀₀` for the tridiagonal chain matrix `T`, by repeated
/// matrix-vector products.
pub fn chain_moment(chain: &thermal_stirap::bath::Chain, k: u32) -> f64 {
    let n = chain.len();
    if n == 0 {
        return 0.0;
    }
    let hop = chain.hoppings();
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    for _ in 0..k {
        let mut w = vec![0.0; n];
        for i in 0..n {
            w[i] += chain.alpha[i] * v[i];
            if i + 1 < n {
                w[i] += hop[i] * v[i + 1];
                w[i + 1] += hop[i] * v[i];
            }
        }
        v = w;
    }
    chain.head_coupling().powi(2) * v[0]
}
