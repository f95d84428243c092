//! Phase-as-hue rendering of complex images to binary PPM.
//!
//! Each pixel maps phase to hue around the HSV wheel (phase 0 is red),
//! saturation to 1, and value to the modulus clamped at 1, so inactive
//! pixels are black and active ones are fully saturated color.

use crate::error::{Error, Result};
use crate::math::Angle;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

fn hsv_byte(channel: f64) -> u8 {
    (channel * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Hue in turns (`[0, 1)`), saturation 1, value in `[0, 1]` to RGB bytes.
fn hue_value_to_rgb(hue_turns: f64, value: f64) -> [u8; 3] {
    let h6 = hue_turns * 6.0;
    let sector = h6.floor() as usize % 6;
    let x = value * (1.0 - (h6 % 2.0 - 1.0).abs());
    let (r, g, b) = match sector {
        0 => (value, x, 0.0),
        1 => (x, value, 0.0),
        2 => (0.0, value, x),
        3 => (0.0, x, value),
        4 => (x, 0.0, value),
        _ => (value, 0.0, x),
    };
    [hsv_byte(r), hsv_byte(g), hsv_byte(b)]
}

/// Writes `sample` as a binary PPM (P6) image of the given `(width, height)`
/// shape. `global_phase` rotates every hue by a constant, leaving the value
/// (modulus) channel untouched. Output bytes are deterministic.
pub fn render_complex_image(
    sample: &[Complex64],
    shape: (usize, usize),
    path: &Path,
    global_phase: Angle,
) -> Result<()> {
    let (w, h) = shape;
    if w == 0 || h == 0 || w * h != sample.len() {
        return Err(Error::Shape(format!(
            "shape {w}x{h} does not match {} pixels",
            sample.len()
        )));
    }
    let mut buf = Vec::with_capacity(32 + 3 * sample.len());
    write!(&mut buf, "P6\n{w} {h}\n255\n").expect("writing to a Vec cannot fail");
    for z in sample {
        let hue = (Angle::new(z.arg()) + global_phase).radians() / TAU;
        let value = z.norm().min(1.0);
        buf.extend_from_slice(&hue_value_to_rgb(hue, value));
    }
    std::fs::write(path, &buf)?;
    Ok(())
}
