//! Gated recurrent unit with an explicit backward pass.
//!
//! Gate rows are stacked as `[reset; update; candidate]`:
//!
//! ```text
//! r  = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
//! z  = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
//! n  = tanh(W_in x + b_in + r * (W_hn h + b_hn))
//! h' = (1 - z) * n + z * h
//! ```

use rand::Rng;

use super::tensor::{sigmoid, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct GruCell {
    pub w_ih: Matrix,
    pub w_hh: Matrix,
    pub b_ih: Matrix,
    pub b_hh: Matrix,
}

/// Everything the backward pass needs from one forward step.
#[derive(Debug, Clone)]
pub struct GruStep {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub n: Vec<f64>,
    /// `W_hn h + b_hn`, before the reset gate is applied.
    pub hn: Vec<f64>,
    pub h: Vec<f64>,
}

impl GruCell {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Self {
            w_ih: Matrix::zeros(3 * hidden, input),
            w_hh: Matrix::zeros(3 * hidden, hidden),
            b_ih: Matrix::zeros(3 * hidden, 1),
            b_hh: Matrix::zeros(3 * hidden, 1),
        }
    }

    /// Uniform weights in `[-scale, scale]`, zero biases.
    pub fn random<R: Rng>(input: usize, hidden: usize, scale: f64, rng: &mut R) -> Self {
        Self {
            w_ih: Matrix::uniform(3 * hidden, input, scale, rng),
            w_hh: Matrix::uniform(3 * hidden, hidden, scale, rng),
            b_ih: Matrix::zeros(3 * hidden, 1),
            b_hh: Matrix::zeros(3 * hidden, 1),
        }
    }

    pub fn hidden(&self) -> usize {
        self.w_hh.cols()
    }

    pub fn input(&self) -> usize {
        self.w_ih.cols()
    }

    /// Tensors in name order.
    pub fn tensors(&self) -> [(&'static str, &Matrix); 4] {
        [("b_hh", &self.b_hh), ("b_ih", &self.b_ih), ("w_hh", &self.w_hh), ("w_ih", &self.w_ih)]
    }

    pub fn tensors_mut(&mut self) -> [(&'static str, &mut Matrix); 4] {
        [
            ("b_hh", &mut self.b_hh),
            ("b_ih", &mut self.b_ih),
            ("w_hh", &mut self.w_hh),
            ("w_ih", &mut self.w_ih),
        ]
    }

    pub fn forward(&self, x: &[f64], h_prev: &[f64]) -> GruStep {
        let hs = self.hidden();
        let mut gi = self.w_ih.matvec(x);
        let mut gh = self.w_hh.matvec(h_prev);
        for (g, b) in gi.iter_mut().zip(self.b_ih.as_slice()) {
            *g += b;
        }
        for (g, b) in gh.iter_mut().zip(self.b_hh.as_slice()) {
            *g += b;
        }
        let mut r = vec![0.0; hs];
        let mut z = vec![0.0; hs];
        let mut n = vec![0.0; hs];
        let mut h = vec![0.0; hs];
        let hn = gh[2 * hs..].to_vec();
        for j in 0..hs {
            r[j] = sigmoid(gi[j] + gh[j]);
            z[j] = sigmoid(gi[hs + j] + gh[hs + j]);
            n[j] = (gi[2 * hs + j] + r[j] * hn[j]).tanh();
            h[j] = (1.0 - z[j]) * n[j] + z[j] * h_prev[j];
        }
        GruStep { x: x.to_vec(), h_prev: h_prev.to_vec(), r, z, n, hn, h }
    }

    /// Accumulates parameter gradients into `grad`, adds the input gradient
    /// to `dx` and returns the gradient with respect to the previous state.
    pub fn backward(&self, step: &GruStep, dh: &[f64], grad: &mut GruCell, dx: &mut [f64]) -> Vec<f64> {
        let hs = self.hidden();
        let mut dgi = vec![0.0; 3 * hs];
        let mut dgh = vec![0.0; 3 * hs];
        let mut dh_prev = vec![0.0; hs];
        for j in 0..hs {
            let (r, z, n) = (step.r[j], step.z[j], step.n[j]);
            let dn = dh[j] * (1.0 - z);
            let dz = dh[j] * (step.h_prev[j] - n);
            dh_prev[j] = dh[j] * z;
            let dpre_n = dn * (1.0 - n * n);
            let dr = dpre_n * step.hn[j];
            let dpre_r = dr * r * (1.0 - r);
            let dpre_z = dz * z * (1.0 - z);
            dgi[j] = dpre_r;
            dgi[hs + j] = dpre_z;
            dgi[2 * hs + j] = dpre_n;
            dgh[j] = dpre_r;
            dgh[hs + j] = dpre_z;
            dgh[2 * hs + j] = dpre_n * r;
        }
        grad.w_ih.add_outer(&dgi, &step.x);
        grad.b_ih.add_vec(&dgi);
        grad.w_hh.add_outer(&dgh, &step.h_prev);
        grad.b_hh.add_vec(&dgh);
        self.w_ih.tmatvec_acc(&dgi, dx);
        self.w_hh.tmatvec_acc(&dgh, &mut dh_prev);
        dh_prev
    }
}
