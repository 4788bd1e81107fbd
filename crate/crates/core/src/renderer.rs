//! Rasterizes world models to RGB bitmaps and PNG files.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::Write;

use rand::Rng;
use thiserror::Error;

use crate::worldmodel::{Color, Entity, Shape, WorldModel};

pub const DEFAULT_CANVAS: u32 = 64;
pub const MIN_CANVAS: u32 = 32;
pub const BACKGROUND: [u8; 3] = [0, 0, 0];

/// Base RGB per color, indexed in `Color::ALL` order.
pub const COLOR_TABLE: [(Color, [u8; 3]); 7] = [
    (Color::Red, [230, 50, 50]),
    (Color::Green, [50, 200, 50]),
    (Color::Blue, [60, 90, 230]),
    (Color::Yellow, [230, 220, 40]),
    (Color::Magenta, [220, 50, 220]),
    (Color::Cyan, [40, 210, 220]),
    (Color::Gray, [140, 140, 140]),
];

pub fn base_rgb(color: Color) -> [u8; 3] {
    COLOR_TABLE
        .iter()
        .find(|(c, _)| *c == color)
        .map(|(_, rgb)| *rgb)
        .expect("color table covers every color")
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),
    #[error("png decoding failed: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("unsupported png layout: {0}")]
    Layout(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    pub width: u32,
    pub height: u32,
    /// Row-major RGB triples.
    pub pixels: Vec<u8>,
}

impl Bitmap {
    pub fn new(width: u32, height: u32) -> Bitmap {
        let mut pixels = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            pixels.extend_from_slice(&BACKGROUND);
        }
        Bitmap {
            width,
            height,
            pixels,
        }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn set(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = ((y * self.width + x) * 3) as usize;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn colored_pixel_count(&self) -> usize {
        self.pixels
            .chunks_exact(3)
            .filter(|px| *px != BACKGROUND)
            .count()
    }

    pub fn write_png<W: Write>(&self, out: W) -> Result<(), RenderError> {
        let mut encoder = png::Encoder::new(out, self.width, self.height);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header()?;
        writer.write_image_data(&self.pixels)?;
        writer.finish()?;
        Ok(())
    }

    pub fn to_png_bytes(&self) -> Result<Vec<u8>, RenderError> {
        let mut buf = Vec::new();
        self.write_png(&mut buf)?;
        Ok(buf)
    }

    pub fn from_png_bytes(bytes: &[u8]) -> Result<Bitmap, RenderError> {
        let decoder = png::Decoder::new(bytes);
        let mut reader = decoder.read_info()?;
        let mut pixels = vec![0; reader.output_buffer_size()];
        let info = reader.next_frame(&mut pixels)?;
        if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
            return Err(RenderError::Layout(format!(
                "{:?}/{:?}",
                info.color_type, info.bit_depth
            )));
        }
        pixels.truncate(info.buffer_size());
        Ok(Bitmap {
            width: info.width,
            height: info.height,
            pixels,
        })
    }
}

fn inside_regular_polygon(u: f64, v: f64, sides: usize) -> bool {
    // vertices on the unit circle, first vertex pointing up (negative v)
    let vertex = |k: usize| {
        let a = -FRAC_PI_2 + TAU * k as f64 / sides as f64;
        (a.cos(), a.sin())
    };
    (0..sides).all(|k| {
        let (ax, ay) = vertex(k);
        let (bx, by) = vertex((k + 1) % sides);
        (bx - ax) * (v - ay) - (by - ay) * (u - ax) >= 0.0
    })
}

/// Shape membership in local coordinates normalized so the size rectangle is [-1,1]².
fn inside_shape(shape: Shape, u: f64, v: f64) -> bool {
    match shape {
        Shape::Square | Shape::Rectangle => u.abs() <= 1.0 && v.abs() <= 1.0,
        Shape::Circle | Shape::Ellipse => u * u + v * v <= 1.0,
        // half disc, flat edge along the bottom of the box
        Shape::Semicircle => {
            let dv = (v - 1.0) / 2.0;
            v <= 1.0 && u * u + dv * dv <= 1.0
        }
        // apex at the top, base along the bottom
        Shape::Triangle => v <= 1.0 && u.abs() <= (v + 1.0) / 2.0,
        Shape::Pentagon => inside_regular_polygon(u, v, 5),
        Shape::Cross => {
            let arm = 1.0 / 3.0;
            (u.abs() <= arm && v.abs() <= 1.0) || (v.abs() <= arm && u.abs() <= 1.0)
        }
    }
}

fn jittered<R: Rng + ?Sized>(rgb: [u8; 3], rng: &mut R) -> [u8; 3] {
    let scale = 1.0 + rng.gen_range(-0.1..=0.1);
    rgb.map(|c| (c as f64 * scale).round().clamp(1.0, 255.0) as u8)
}

fn draw_entity(bitmap: &mut Bitmap, e: &Entity, rgb: [u8; 3]) {
    let (w, h) = (bitmap.width as f64, bitmap.height as f64);
    let (sin, cos) = e.rotation.sin_cos();
    let (hw, hh) = (e.size.w / 2.0, e.size.h / 2.0);
    let b = crate::worldmodel::bounding_box(e);
    let px0 = ((b.x0 * w).floor().max(0.0)) as u32;
    let py0 = ((b.y0 * h).floor().max(0.0)) as u32;
    let px1 = ((b.x1 * w).ceil() as u32).min(bitmap.width);
    let py1 = ((b.y1 * h).ceil() as u32).min(bitmap.height);
    for py in py0..py1 {
        for px in px0..px1 {
            let dx = (px as f64 + 0.5) / w - e.center.x;
            let dy = (py as f64 + 0.5) / h - e.center.y;
            // rotate the sample point into the entity frame
            let lx = dx * cos + dy * sin;
            let ly = -dx * sin + dy * cos;
            if inside_shape(e.shape, lx / hw, ly / hh) {
                bitmap.set(px, py, rgb);
            }
        }
    }
}

/// Draws entities in list order onto a black canvas. With `jitter`, each entity's color is
/// scaled by a seeded factor in [0.9, 1.1].
pub fn render<R: Rng + ?Sized>(
    world: &WorldModel,
    canvas_size: u32,
    mut jitter: Option<&mut R>,
) -> Bitmap {
    assert!(
        canvas_size >= MIN_CANVAS,
        "canvas must be at least {MIN_CANVAS} px"
    );
    let mut bitmap = Bitmap::new(canvas_size, canvas_size);
    for e in &world.entities {
        let base = base_rgb(e.color);
        let rgb = match jitter.as_deref_mut() {
            Some(rng) => jittered(base, rng),
            None => base,
        };
        draw_entity(&mut bitmap, e, rgb);
    }
    bitmap
}

/// Deterministic rendering without jitter.
pub fn render_plain(world: &WorldModel, canvas_size: u32) -> Bitmap {
    render::<rand_chacha::ChaCha8Rng>(world, canvas_size, None)
}
