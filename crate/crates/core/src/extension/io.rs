//! Binary field dumps and CSV slice export.
//!
//! Layout: little-endian `M_t, M_x, R_t, R_x` (two `u64`, two `f64`), then
//! `re, im` pairs as `f64` in `(t, x1, x2)` row-major order. The format
//! stores one `x` size, so only grids isotropic in `x` can be written.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::eval::Field;
use super::grid::SpacetimeGrid;
use crate::error::{ensure, Result};

pub fn write_field(field: &Field, mut w: impl Write) -> Result<()> {
    let g = &field.grid;
    ensure!(g.m[1] == g.m[2] && g.r[1] == g.r[2], Input, "field dumps need a grid isotropic in x");
    let mut buf = Vec::with_capacity(32 + 16 * field.samples.len());
    buf.extend_from_slice(&(g.m[0] as u64).to_le_bytes());
    buf.extend_from_slice(&(g.m[1] as u64).to_le_bytes());
    buf.extend_from_slice(&g.r[0].to_le_bytes());
    buf.extend_from_slice(&g.r[1].to_le_bytes());
    for z in &field.samples {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field(mut r: impl Read) -> Result<Field> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    ensure!(bytes.len() >= 32, Input, "field dump shorter than its header");
    let word = |i: usize| <[u8; 8]>::try_from(&bytes[8 * i..8 * i + 8]).unwrap();
    let (mt, mx) = (u64::from_le_bytes(word(0)) as usize, u64::from_le_bytes(word(1)) as usize);
    let (rt, rx) = (f64::from_le_bytes(word(2)), f64::from_le_bytes(word(3)));
    let grid = SpacetimeGrid::new(rt, rx, mt, mx)?;
    ensure!(
        bytes.len() == 32 + 16 * grid.len(),
        Input,
        "field dump has {} bytes, expected {}",
        bytes.len(),
        32 + 16 * grid.len()
    );
    let samples = (0..grid.len())
        .map(|k| Complex64::new(f64::from_le_bytes(word(4 + 2 * k)), f64::from_le_bytes(word(5 + 2 * k))))
        .collect();
    Ok(Field { grid, samples })
}

/// `|F|` on the slice `it` as CSV rows `x1,x2,abs`.
pub fn slice_csv(field: &Field, it: usize) -> String {
    let g = &field.grid;
    let mut out = String::from("x1,x2,abs\n");
    for i1 in 0..g.m[1] {
        for i2 in 0..g.m[2] {
            out.push_str(&format!("{},{},{}\n", g.point(1, i1), g.point(2, i2), field.get(it, i1, i2).norm()));
        }
    }
    out
}
