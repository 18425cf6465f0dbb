//! Slice transform: for fixed `t`, the field is a two-dimensional DFT of the
//! modulated node weights whenever `h_a d_a = 2 pi / L_a` for integers `L_a`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::density::Nodes;
use super::grid::SpacetimeGrid;

pub(crate) struct FftSlice {
    l: [usize; 2],
    inv: [Arc<dyn Fft<f64>>; 2],
}

/// The integer `L` with `h d L = 2 pi`, if there is one.
pub fn transform_length(h: f64, d: f64) -> Option<usize> {
    let l = 2.0 * std::f64::consts::PI / (h * d);
    let r = l.round();
    (r >= 1.0 && (l - r).abs() <= 1e-12 * r && r < 1e8).then_some(r as usize)
}

impl FftSlice {
    pub fn plan(nodes: &Nodes, grid: &SpacetimeGrid) -> Option<Self> {
        let l1 = transform_length(grid.spacing(1), nodes.d1)?;
        let l2 = transform_length(grid.spacing(2), nodes.d2)?;
        let mut planner = FftPlanner::new();
        Some(FftSlice { l: [l1, l2], inv: [planner.plan_fft_inverse(l1), planner.plan_fft_inverse(l2)] })
    }

    pub fn eval(&self, nodes: &Nodes, grid: &SpacetimeGrid, t: f64, out: &mut [Complex64]) {
        let [l1, l2] = self.l;
        let mut buf = vec![Complex64::new(0.0, 0.0); l1 * l2];
        for (u, v, w) in nodes.points() {
            let (a, b) = ((u as f64 + 0.5) * nodes.d1, (v as f64 + 0.5) * nodes.d2);
            let i = u.rem_euclid(l1 as i64) as usize * l2 + v.rem_euclid(l2 as i64) as usize;
            buf[i] += w * Complex64::from_polar(1.0, t * a * b);
        }
        // rows, then columns
        self.inv[1].process(&mut buf);
        let mut col = vec![Complex64::new(0.0, 0.0); l1];
        for k in 0..l2 {
            for i in 0..l1 {
                col[i] = buf[i * l2 + k];
            }
            self.inv[0].process(&mut col);
            for i in 0..l1 {
                buf[i * l2 + k] = col[i];
            }
        }
        let (h1, h2) = (grid.spacing(1), grid.spacing(2));
        let (c1, c2) = ((grid.m[1] / 2) as i64, (grid.m[2] / 2) as i64);
        let scale = nodes.d1 * nodes.d2;
        for i1 in 0..grid.m[1] {
            let m1 = i1 as i64 - c1;
            let r = m1.rem_euclid(l1 as i64) as usize;
            for i2 in 0..grid.m[2] {
                let m2 = i2 as i64 - c2;
                let s = m2.rem_euclid(l2 as i64) as usize;
                let phase = 0.5 * (m1 as f64 * h1 * nodes.d1 + m2 as f64 * h2 * nodes.d2);
                out[i1 * grid.m[2] + i2] = buf[r * l2 + s] * Complex64::from_polar(scale, phase);
            }
        }
    }
}
