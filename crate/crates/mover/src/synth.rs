//! Procedural face generator.
//!
//! Renders parametric faces where every facial part (eyes, cheeks & nose,
//! lips) is driven by its own expression scalar. A face is labeled real when
//! all parts share the global expression scalar; overriding any part's scalar
//! produces a part-inconsistent fake. Landmarks are the analytic control
//! points of the rendered shapes, so they are exact by construction.
//!
//! Inconsistency is injected at the semantic-parameter level only: fake and
//! real faces are drawn from the same renderer with the same noise model, so
//! cross-part disagreement is the only signal separating the classes.

use crate::error::{MoverError, Result};
use crate::face::{FaceImage, LandmarkSet, LandmarkSource, FACE_SIZE, N_LANDMARKS};
use crate::manifest::{DatasetManifest, Label, Split, VideoEntry};
use crate::rng::Stream;
use crate::scalar::Scalar;
use ndarray::Array3;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::Path;

/// The three facial parts of the masking strategy.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum FacePart {
    Eyes,
    CheekNose,
    Lips,
}

impl FacePart {
    pub const ALL: [FacePart; 3] = [FacePart::Eyes, FacePart::CheekNose, FacePart::Lips];

    pub fn as_str(self) -> &'static str {
        match self {
            FacePart::Eyes => "eyes",
            FacePart::CheekNose => "cheek_nose",
            FacePart::Lips => "lips",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "eyes" => Ok(FacePart::Eyes),
            "cheek_nose" => Ok(FacePart::CheekNose),
            "lips" => Ok(FacePart::Lips),
            other => Err(MoverError::Parameter(format!("unknown face part {other}"))),
        }
    }
}

/// Parameters of one synthetic face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceParams {
    /// Global expression scalar in [-1, 1]; -1 frown, +1 smile.
    pub expression: f64,
    pub identity_seed: u64,
    /// Per-part expression overrides. Non-empty marks the face fake.
    pub part_overrides: BTreeMap<FacePart, f64>,
    /// Std-dev of additive pixel noise; must be < 0.5.
    pub noise_level: f64,
}

impl FaceParams {
    pub fn consistent(expression: f64, identity_seed: u64, noise_level: f64) -> Self {
        FaceParams {
            expression,
            identity_seed,
            part_overrides: BTreeMap::new(),
            noise_level,
        }
    }

    pub fn with_override(mut self, part: FacePart, value: f64) -> Self {
        self.part_overrides.insert(part, value);
        self
    }

    pub fn is_consistent(&self) -> bool {
        self.part_overrides.is_empty()
    }

    /// The scalar actually governing a part.
    pub fn part_scalar(&self, part: FacePart) -> f64 {
        *self.part_overrides.get(&part).unwrap_or(&self.expression)
    }

    /// Manipulation tag for fake faces: overridden part names joined by '+'.
    pub fn manipulation_tag(&self) -> Option<String> {
        if self.part_overrides.is_empty() {
            None
        } else {
            Some(
                self.part_overrides
                    .keys()
                    .map(|p| p.as_str())
                    .collect::<Vec<_>>()
                    .join("+"),
            )
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.noise_level) {
            return Err(MoverError::Parameter(format!(
                "noise_level {} outside [0, 0.5)",
                self.noise_level
            )));
        }
        let check = |name: &str, v: f64| {
            if !(-1.0..=1.0).contains(&v) {
                Err(MoverError::Parameter(format!(
                    "{name} scalar {v} outside [-1, 1]"
                )))
            } else {
                Ok(())
            }
        };
        check("expression", self.expression)?;
        for (p, v) in &self.part_overrides {
            check(p.as_str(), *v)?;
        }
        Ok(())
    }
}

const CX: f64 = 112.0;
const CY: f64 = 116.0;

/// Identity-level appearance drawn once per face from identity_seed.
struct Identity {
    rx: f64,
    ry: f64,
    skin: [f64; 3],
    iris: [f64; 3],
    background: [f64; 3],
    eye_spread: f64,
    mouth_width: f64,
}

impl Identity {
    fn from_seed(seed: u64) -> Self {
        let mut st = Stream::new(seed, "identity");
        let rng = st.rng();
        let j = |rng: &mut rand_chacha::ChaCha8Rng| rng.gen_range(-1.0f64..1.0);
        let rx = 76.0 * (1.0 + 0.10 * j(rng));
        let ry = 96.0 * (1.0 + 0.07 * j(rng));
        let warm = 0.05 * j(rng);
        let skin = [0.86 + warm, 0.72 + 0.6 * warm, 0.62 + 0.4 * warm];
        let iris = match rng.gen_range(0u8..3) {
            0 => [0.35, 0.22, 0.15],
            1 => [0.25, 0.35, 0.50],
            _ => [0.25, 0.40, 0.28],
        };
        let bg_shift = 0.06 * j(rng);
        let background = [0.55 + bg_shift, 0.58 + bg_shift, 0.62 + bg_shift];
        let eye_spread = 0.40 * (1.0 + 0.06 * j(rng));
        let mouth_width = 0.34 * (1.0 + 0.06 * j(rng));
        Identity {
            rx,
            ry,
            skin,
            iris,
            background,
            eye_spread,
            mouth_width,
        }
    }
}

/// All analytic geometry of one face, derived from (identity, part scalars).
struct Geometry {
    id: Identity,
    s_eyes: f64,
    s_cheek: f64,
    s_lips: f64,
}

impl Geometry {
    fn new(params: &FaceParams) -> Self {
        Geometry {
            id: Identity::from_seed(params.identity_seed),
            s_eyes: params.part_scalar(FacePart::Eyes),
            s_cheek: params.part_scalar(FacePart::CheekNose),
            s_lips: params.part_scalar(FacePart::Lips),
        }
    }

    fn eye_y(&self) -> f64 {
        CY - 0.24 * self.id.ry
    }
    fn eye_dx(&self) -> f64 {
        self.id.eye_spread * self.id.rx
    }
    fn eye_half_w(&self) -> f64 {
        0.175 * self.id.rx
    }
    fn eye_half_h(&self) -> f64 {
        self.eye_half_w() * (0.42 + 0.18 * self.s_eyes)
    }
    fn brow_base_y(&self) -> f64 {
        self.eye_y() - 0.14 * self.id.ry - 2.0 * self.s_eyes
    }
    fn brow_arch(&self) -> f64 {
        3.5 + 3.0 * self.s_eyes
    }
    fn brow_half_w(&self) -> f64 {
        1.25 * self.eye_half_w()
    }
    fn nose_tip_y(&self) -> f64 {
        CY + 0.18 * self.id.ry
    }
    fn nose_wing(&self) -> f64 {
        0.16 * self.id.rx * (1.0 + 0.08 * self.s_cheek)
    }
    fn cheek_center_y(&self) -> f64 {
        CY + 0.10 * self.id.ry - 6.0 * self.s_cheek
    }
    fn cheek_dx(&self) -> f64 {
        0.45 * self.id.rx
    }
    fn cheek_sigma(&self) -> f64 {
        0.21 * self.id.rx
    }
    fn mouth_y(&self) -> f64 {
        CY + 0.55 * self.id.ry
    }
    fn mouth_half_w(&self) -> f64 {
        self.id.mouth_width * self.id.rx
    }
    fn mouth_corner_y(&self) -> f64 {
        self.mouth_y() - 0.105 * self.id.ry * self.s_lips
    }
    fn lip_top_y(&self) -> f64 {
        self.mouth_y() - 10.5
    }
    fn lip_bottom_y(&self) -> f64 {
        self.mouth_y() + 11.5
    }
    fn seam_center_y(&self) -> f64 {
        self.mouth_y() + 1.0
    }

    /// Upper outer lip boundary as a function of u = (x - CX)/half_w.
    fn lip_upper(&self, u: f64) -> f64 {
        self.lip_top_y() + (self.mouth_corner_y() - self.lip_top_y()) * u * u
    }
    fn lip_lower(&self, u: f64) -> f64 {
        self.lip_bottom_y() - (self.lip_bottom_y() - self.mouth_corner_y()) * u * u
    }
    fn lip_seam(&self, u: f64) -> f64 {
        self.seam_center_y() + (self.mouth_corner_y() - self.seam_center_y()) * u * u
    }

    fn brow_point(&self, center_x: f64, t: f64) -> (f64, f64) {
        (
            center_x + t * self.brow_half_w(),
            self.brow_base_y() - self.brow_arch() * (1.0 - t * t),
        )
    }

    fn landmarks(&self) -> [(f64, f64); N_LANDMARKS] {
        let mut p = [(0.0, 0.0); N_LANDMARKS];
        let (rx, ry) = (self.id.rx, self.id.ry);
        // jaw 0..=16 along the lower head ellipse
        for i in 0..17 {
            let theta = std::f64::consts::PI * (1.0 - i as f64 / 16.0);
            p[i] = (CX + rx * theta.cos(), CY + ry * theta.sin());
        }
        // brows 17..=21 (left), 22..=26 (right), left-to-right each
        let lb = CX - self.eye_dx();
        let rb = CX + self.eye_dx();
        for k in 0..5 {
            let t = -1.0 + 0.5 * k as f64;
            p[17 + k] = self.brow_point(lb, t);
            p[22 + k] = self.brow_point(rb, t);
        }
        // nose bridge 27..=30, bottom 31..=35
        let y27 = self.eye_y() - 1.0;
        let y30 = self.nose_tip_y() - 6.0;
        for k in 0..4 {
            p[27 + k] = (CX, y27 + (y30 - y27) * k as f64 / 3.0);
        }
        let nw = self.nose_wing();
        let nty = self.nose_tip_y();
        p[31] = (CX - nw, nty - 1.0);
        p[32] = (CX - 0.5 * nw, nty + 1.0);
        p[33] = (CX, nty + 2.0);
        p[34] = (CX + 0.5 * nw, nty + 1.0);
        p[35] = (CX + nw, nty - 1.0);
        // eyes 36..=41 (left), 42..=47 (right)
        let (we, he) = (self.eye_half_w(), self.eye_half_h());
        let ey = self.eye_y();
        let arc = he * (1.0 - 0.4f64 * 0.4).sqrt();
        let eye = |cx: f64, out: &mut [(f64, f64)]| {
            out[0] = (cx - we, ey);
            out[1] = (cx - 0.4 * we, ey - arc);
            out[2] = (cx + 0.4 * we, ey - arc);
            out[3] = (cx + we, ey);
            out[4] = (cx + 0.4 * we, ey + arc);
            out[5] = (cx - 0.4 * we, ey + arc);
        };
        eye(lb, &mut p[36..42]);
        eye(rb, &mut p[42..48]);
        // mouth outer 48..=59: 48..=54 along the top curve left to right,
        // 55..=59 along the bottom curve right to left
        let mw = self.mouth_half_w();
        let lip_x = |u: f64| CX + u * mw;
        for (k, u) in (-3..=3).enumerate() {
            let u = u as f64 / 3.0;
            p[48 + k] = (lip_x(u), self.lip_upper(u));
        }
        for (k, u) in [2.0 / 3.0, 1.0 / 3.0, 0.0, -1.0 / 3.0, -2.0 / 3.0]
            .iter()
            .enumerate()
        {
            p[55 + k] = (lip_x(*u), self.lip_lower(*u));
        }
        // mouth inner 60..=67 on the seam curve
        let iu = 0.82;
        let seam = |u: f64| (lip_x(u), self.lip_seam(u));
        p[60] = seam(-iu);
        p[61] = seam(-0.4);
        p[62] = seam(0.0);
        p[63] = seam(0.4);
        p[64] = seam(iu);
        let lower_seam = |u: f64| (lip_x(u), self.lip_seam(u) + 1.5);
        p[65] = lower_seam(0.4);
        p[66] = lower_seam(0.0);
        p[67] = lower_seam(-0.4);
        p
    }
}

/// Landmarks for a parameter set, without rendering. Exact control points.
pub fn landmarks_for(params: &FaceParams) -> Result<LandmarkSet> {
    params.validate()?;
    LandmarkSet::new(Geometry::new(params).landmarks(), LandmarkSource::Synthetic)
}

struct Canvas {
    px: Vec<[f64; 3]>,
}

impl Canvas {
    fn new(color: [f64; 3]) -> Self {
        Canvas {
            px: vec![color; FACE_SIZE * FACE_SIZE],
        }
    }

    #[inline]
    fn blend(&mut self, x: i64, y: i64, color: [f64; 3], alpha: f64) {
        if alpha <= 0.0 || !(0..FACE_SIZE as i64).contains(&x) || !(0..FACE_SIZE as i64).contains(&y)
        {
            return;
        }
        let a = alpha.min(1.0);
        let p = &mut self.px[y as usize * FACE_SIZE + x as usize];
        for c in 0..3 {
            p[c] = p[c] * (1.0 - a) + color[c] * a;
        }
    }

    #[inline]
    fn shift(&mut self, x: i64, y: i64, delta: [f64; 3], alpha: f64) {
        if alpha <= 0.0 || !(0..FACE_SIZE as i64).contains(&x) || !(0..FACE_SIZE as i64).contains(&y)
        {
            return;
        }
        let p = &mut self.px[y as usize * FACE_SIZE + x as usize];
        for c in 0..3 {
            p[c] += delta[c] * alpha;
        }
    }

    /// Anti-aliased filled ellipse.
    fn ellipse(&mut self, cx: f64, cy: f64, rx: f64, ry: f64, color: [f64; 3]) {
        let (x0, x1) = ((cx - rx - 2.0) as i64, (cx + rx + 2.0) as i64);
        let (y0, y1) = ((cy - ry - 2.0) as i64, (cy + ry + 2.0) as i64);
        let r_eff = rx.min(ry);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let dx = (x as f64 + 0.5 - cx) / rx;
                let dy = (y as f64 + 0.5 - cy) / ry;
                let d = (dx * dx + dy * dy).sqrt();
                let alpha = ((1.0 - d) * r_eff / 1.2).clamp(0.0, 1.0);
                self.blend(x, y, color, alpha);
            }
        }
    }

    /// Additive gaussian tint blob.
    fn blob(&mut self, cx: f64, cy: f64, sigma: f64, delta: [f64; 3]) {
        let r = (3.0 * sigma) as i64;
        for y in (cy as i64 - r)..=(cy as i64 + r) {
            for x in (cx as i64 - r)..=(cx as i64 + r) {
                let dx = x as f64 + 0.5 - cx;
                let dy = y as f64 + 0.5 - cy;
                let w = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
                self.shift(x, y, delta, w);
            }
        }
    }

    /// Stroke y = f(x) for x in [x0, x1] with vertical thickness.
    fn stroke(&mut self, x0: f64, x1: f64, f: impl Fn(f64) -> f64, half: f64, color: [f64; 3]) {
        for x in x0.floor() as i64..=x1.ceil() as i64 {
            let xc = x as f64 + 0.5;
            if xc < x0 || xc > x1 {
                continue;
            }
            let yc = f(xc);
            for y in (yc - half - 1.5) as i64..=(yc + half + 1.5) as i64 {
                let d = (y as f64 + 0.5 - yc).abs();
                let alpha = (half + 0.75 - d).clamp(0.0, 1.0);
                self.blend(x, y, color, alpha);
            }
        }
    }
}

fn render(params: &FaceParams, seed: u64) -> (Array3<f64>, [(f64, f64); N_LANDMARKS]) {
    let g = Geometry::new(params);
    let id = &g.id;
    let mut cv = Canvas::new(id.background);

    // head
    cv.ellipse(CX, CY, id.rx, id.ry, id.skin);

    // cheeks: raised bright blush when positive, low shadow when negative
    let q = 0.05 + 0.06 * (g.s_cheek + 1.0) / 2.0;
    let delta = [
        0.9 * q,
        -0.15 * q - 0.03 * (1.0 - g.s_cheek) / 2.0,
        -0.25 * q - 0.05 * (1.0 - g.s_cheek) / 2.0,
    ];
    for side in [-1.0, 1.0] {
        cv.blob(
            CX + side * g.cheek_dx(),
            g.cheek_center_y(),
            g.cheek_sigma(),
            delta,
        );
    }

    // brows
    let brow_color = [0.25, 0.17, 0.12];
    for side in [-1.0, 1.0] {
        let bx = CX + side * g.eye_dx();
        let w = g.brow_half_w();
        cv.stroke(
            bx - w,
            bx + w,
            |x| {
                let t = (x - bx) / w;
                g.brow_base_y() - g.brow_arch() * (1.0 - t * t)
            },
            1.3,
            brow_color,
        );
    }

    // eyes
    let (we, he) = (g.eye_half_w(), g.eye_half_h());
    for side in [-1.0, 1.0] {
        let ex = CX + side * g.eye_dx();
        let ey = g.eye_y();
        cv.ellipse(ex, ey, we, he, [0.97, 0.97, 0.95]);
        // iris and pupil, clipped to the lid opening
        let ri = 0.42 * we;
        for y in (ey - he - 1.0) as i64..=(ey + he + 1.0) as i64 {
            for x in (ex - ri - 1.0) as i64..=(ex + ri + 1.0) as i64 {
                let dx = x as f64 + 0.5 - ex;
                let dy = y as f64 + 0.5 - ey;
                let lid = (dx / we).powi(2) + (dy / he).powi(2);
                if lid > 1.0 {
                    continue;
                }
                let d = (dx * dx + dy * dy).sqrt();
                let a_iris = (ri - d + 0.5).clamp(0.0, 1.0);
                cv.blend(x, y, id.iris, a_iris);
                let a_pupil = (0.42 * ri - d + 0.5).clamp(0.0, 1.0);
                cv.blend(x, y, [0.05, 0.05, 0.06], a_pupil);
            }
        }
    }

    // nose: bridge shading, wing dots
    let bridge = [
        id.skin[0] - 0.10,
        id.skin[1] - 0.10,
        id.skin[2] - 0.10,
    ];
    let y27 = g.eye_y() - 1.0;
    let y30 = g.nose_tip_y() - 6.0;
    for y in y27 as i64..=y30 as i64 {
        for x in (CX as i64 - 2)..=(CX as i64 + 2) {
            let d = (x as f64 + 0.5 - CX).abs();
            cv.blend(x, y, bridge, (1.6 - d).clamp(0.0, 0.8));
        }
    }
    let nw = g.nose_wing();
    let nty = g.nose_tip_y();
    for side in [-1.0, 1.0] {
        cv.ellipse(CX + side * 0.55 * nw, nty, 2.2, 1.6, [0.30, 0.20, 0.18]);
    }

    // mouth: fill between the outer lip curves, darker seam
    let mw = g.mouth_half_w();
    let lip = [0.70, 0.18, 0.22];
    let seam_color = [0.42, 0.08, 0.12];
    for x in (CX - mw).floor() as i64..=(CX + mw).ceil() as i64 {
        let u = (x as f64 + 0.5 - CX) / mw;
        if u.abs() > 1.0 {
            continue;
        }
        let yu = g.lip_upper(u);
        let yl = g.lip_lower(u);
        for y in (yu - 1.5) as i64..=(yl + 1.5) as i64 {
            let yc = y as f64 + 0.5;
            let inside = (yc - yu).min(yl - yc);
            // taper toward the corners so the fill ends exactly at them
            let edge = (1.0 - u.abs()) * mw;
            let alpha = inside.min(edge).clamp(-1.0, 1.0) * 0.5 + 0.5;
            cv.blend(x, y, lip, alpha.clamp(0.0, 1.0));
        }
        let ys = g.lip_seam(u);
        for y in (ys - 2.5) as i64..=(ys + 2.5) as i64 {
            let d = (y as f64 + 0.5 - ys).abs();
            let alpha = (1.9 - d).clamp(0.0, 1.0);
            // seam only where the lip fill exists
            let gate = ((1.0 - u.abs()) * mw).clamp(0.0, 1.0);
            cv.blend(x, y, seam_color, alpha * gate);
        }
    }

    // pixel noise
    let mut raster = Array3::zeros((FACE_SIZE, FACE_SIZE, 3));
    let mut noise = Stream::new(seed, "pixel-noise");
    if params.noise_level > 0.0 {
        let dist = rand_distr::Normal::new(0.0f64, params.noise_level).unwrap();
        for y in 0..FACE_SIZE {
            for x in 0..FACE_SIZE {
                let base = cv.px[y * FACE_SIZE + x];
                for c in 0..3 {
                    let n: f64 = noise.rng().sample(dist);
                    raster[(y, x, c)] = (base[c] + n).clamp(0.0, 1.0);
                }
            }
        }
    } else {
        for y in 0..FACE_SIZE {
            for x in 0..FACE_SIZE {
                let base = cv.px[y * FACE_SIZE + x];
                for c in 0..3 {
                    raster[(y, x, c)] = base[c].clamp(0.0, 1.0);
                }
            }
        }
    }

    (raster, g.landmarks())
}

/// Renders one face. Deterministic in (params, seed).
pub fn generate_face<T: Scalar>(
    params: &FaceParams,
    seed: u64,
) -> Result<(FaceImage<T>, LandmarkSet, Label, Option<String>)> {
    params.validate()?;
    let (raster, points) = render(params, seed);
    let pixels = raster.mapv(T::of_f64);
    let landmarks = LandmarkSet::new(points, LandmarkSource::Synthetic)?;
    let label = if params.is_consistent() {
        Label::Real
    } else {
        Label::Fake
    };
    let face = FaceImage::new(pixels, 0, "synthetic")?;
    Ok((face, landmarks, label, params.manipulation_tag()))
}

/// Benchmark generation settings. The spec'd knobs plus the noise level.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub n_real: usize,
    pub n_fake: usize,
    pub manipulations: Vec<FacePart>,
    pub noise_level: f64,
    pub frames_per_video: usize,
}

impl BenchmarkSpec {
    pub fn new(n_real: usize, n_fake: usize, manipulations: Vec<FacePart>) -> Self {
        BenchmarkSpec {
            n_real,
            n_fake,
            manipulations,
            noise_level: 0.02,
            frames_per_video: 10,
        }
    }
}

struct VideoPlan {
    video_id: String,
    label: Label,
    override_part: Option<FacePart>,
    identity_seed: u64,
    base_expression: f64,
    drift: f64,
    noise_seed: u64,
}

impl VideoPlan {
    fn frame_params(&self, t: usize, frames: usize, noise_level: f64) -> FaceParams {
        let center = (frames as f64 - 1.0) / 2.0;
        let e = (self.base_expression + (t as f64 - center) * self.drift).clamp(-1.0, 1.0);
        let mut p = FaceParams::consistent(e, self.identity_seed, noise_level);
        if let Some(part) = self.override_part {
            p = p.with_override(part, -e);
        }
        p
    }
}

/// Writes a rendered corpus (frame folders, landmark caches, manifest) and
/// returns the manifest. Split is 70/10/20 by video, stratified by label.
pub fn generate_benchmark(root: &Path, spec: &BenchmarkSpec, seed: u64) -> Result<DatasetManifest> {
    if spec.n_real < 1 || spec.n_fake < 1 {
        return Err(MoverError::Parameter(
            "n_real and n_fake must be >= 1".into(),
        ));
    }
    if spec.manipulations.is_empty() {
        return Err(MoverError::Parameter("manipulations must be non-empty".into()));
    }
    if !(0.0..0.5).contains(&spec.noise_level) {
        return Err(MoverError::Parameter("noise_level outside [0, 0.5)".into()));
    }
    let videos_dir = root.join("videos");
    std::fs::create_dir_all(&videos_dir).map_err(|e| MoverError::io(&videos_dir, e))?;

    let mut st = Stream::new(seed, "benchmark");
    let mut plans = Vec::new();
    for i in 0..spec.n_real + spec.n_fake {
        let fake = i >= spec.n_real;
        let video_id = if fake {
            format!("fake_{:04}", i - spec.n_real)
        } else {
            format!("real_{i:04}")
        };
        let rng = st.rng();
        let magnitude = rng.gen_range(0.35f64..0.95);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let drift_dir = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        plans.push(VideoPlan {
            video_id,
            label: if fake { Label::Fake } else { Label::Real },
            override_part: fake
                .then(|| spec.manipulations[(i - spec.n_real) % spec.manipulations.len()]),
            identity_seed: rng.gen(),
            base_expression: magnitude * sign,
            drift: drift_dir * rng.gen_range(0.01f64..0.03),
            noise_seed: rng.gen(),
        });
    }

    // stratified 70/10/20 split by video
    let mut split_of: BTreeMap<String, Split> = BTreeMap::new();
    for label in [Label::Real, Label::Fake] {
        let mut ids: Vec<String> = plans
            .iter()
            .filter(|p| p.label == label)
            .map(|p| p.video_id.clone())
            .collect();
        ids.shuffle(st.rng());
        let n = ids.len();
        let n_train = (0.7 * n as f64).round() as usize;
        let n_val = (0.1 * n as f64).round() as usize;
        for (k, id) in ids.into_iter().enumerate() {
            let split = if k < n_train {
                Split::Train
            } else if k < n_train + n_val {
                Split::Val
            } else {
                Split::Test
            };
            split_of.insert(id, split);
        }
    }

    let frames = spec.frames_per_video;
    let entries: Vec<Result<VideoEntry>> = plans
        .par_iter()
        .map(|plan| -> Result<VideoEntry> {
            let vdir = videos_dir.join(&plan.video_id);
            std::fs::create_dir_all(&vdir).map_err(|e| MoverError::io(&vdir, e))?;
            let mut cache_rows = Vec::with_capacity(frames);
            for t in 0..frames {
                let params = plan.frame_params(t, frames, spec.noise_level);
                let frame_seed = plan.noise_seed.wrapping_add(t as u64);
                let (mut face, landmarks, _, _) = generate_face::<f32>(&params, frame_seed)?;
                face.frame_index = t;
                face.video_id = plan.video_id.clone();
                face.save_png(&vdir.join(format!("frame_{t}.png")))?;
                cache_rows.push((t, landmarks));
            }
            crate::ingest::write_landmark_cache(
                &videos_dir.join(format!("{}.landmarks.csv", plan.video_id)),
                &cache_rows,
            )?;
            Ok(VideoEntry {
                video_id: plan.video_id.clone(),
                path: vdir,
                label: plan.label,
                manipulation: plan.override_part.map(|p| p.as_str().to_string()),
                split: split_of[&plan.video_id],
                frame_indices: None,
            })
        })
        .collect();

    let entries: Vec<VideoEntry> = entries.into_iter().collect::<Result<_>>()?;
    let mut entries = entries;
    entries.sort_by(|a, b| a.video_id.cmp(&b.video_id));
    let manifest = DatasetManifest::new(entries, true)?;
    manifest.save(&root.join("manifest.jsonl"))?;
    Ok(manifest)
}

/// Random valid landmark sets for fuzz oracles: landmarks of random faces.
pub fn sample_landmarks(rng: &mut rand_chacha::ChaCha8Rng) -> LandmarkSet {
    let mut params = FaceParams::consistent(rng.gen_range(-1.0..1.0), rng.gen(), 0.0);
    if rng.gen_bool(0.5) {
        let part = FacePart::ALL[rng.gen_range(0..3)];
        params = params.with_override(part, rng.gen_range(-1.0..1.0));
    }
    landmarks_for(&params).expect("random params stay in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// iBUG mirror pairs (left index, right index); self-mirrored points
    /// appear as (i, i).
    pub(crate) fn mirror_pairs() -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..=8 {
            pairs.push((i, 16 - i));
        }
        for k in 0..5 {
            pairs.push((17 + k, 26 - k));
        }
        for i in 27..=30 {
            pairs.push((i, i));
        }
        pairs.extend([(31, 35), (32, 34), (33, 33)]);
        pairs.extend([(36, 45), (37, 44), (38, 43), (39, 42), (40, 47), (41, 46)]);
        pairs.extend([(48, 54), (49, 53), (50, 52), (51, 51)]);
        pairs.extend([(55, 59), (56, 58), (57, 57)]);
        pairs.extend([(60, 64), (61, 63), (62, 62)]);
        pairs.extend([(65, 67), (66, 66)]);
        pairs
    }

    #[test]
    fn determinism_bit_identical() {
        let params = FaceParams::consistent(0.4, 99, 0.05).with_override(FacePart::Lips, -0.4);
        let (f1, l1, _, _) = generate_face::<f32>(&params, 7).unwrap();
        let (f2, l2, _, _) = generate_face::<f32>(&params, 7).unwrap();
        assert_eq!(f1.pixels, f2.pixels);
        assert_eq!(l1, l2);
        let (f3, _, _, _) = generate_face::<f32>(&params, 8).unwrap();
        assert_ne!(f1.pixels, f3.pixels);
    }

    #[test]
    fn lips_override_opposes_brow_curvature() {
        // evaluate the analytic control points for both signs
        for e in [0.7, -0.7] {
            let base = landmarks_for(&FaceParams::consistent(0.0, 5, 0.0)).unwrap();
            let params = FaceParams::consistent(e, 5, 0.0).with_override(FacePart::Lips, -e);
            let lm = landmarks_for(&params).unwrap();
            // brow curvature change relative to neutral (mid of left brow, idx 19)
            let brow_delta = base.points[19].1 - lm.points[19].1; // up = positive
            // mouth corner elevation relative to neutral (idx 48)
            let corner_delta = base.points[48].1 - lm.points[48].1;
            assert!(
                brow_delta * corner_delta < 0.0,
                "e={e}: brow {brow_delta} corner {corner_delta} must oppose"
            );
        }
    }

    #[test]
    fn neutral_face_is_mirror_symmetric() {
        for id_seed in [1u64, 42, 777] {
            let lm = landmarks_for(&FaceParams::consistent(0.0, id_seed, 0.0)).unwrap();
            for (l, r) in mirror_pairs() {
                let (xl, yl) = lm.points[l];
                let (xr, yr) = lm.points[r];
                assert!(
                    (xl + xr - 224.0).abs() <= 0.5,
                    "pair ({l},{r}): {xl} vs {xr}"
                );
                assert!((yl - yr).abs() <= 0.5, "pair ({l},{r}): y {yl} vs {yr}");
            }
        }
    }

    #[test]
    fn label_soundness_over_generated_corpus() {
        let mut st = Stream::new(11, "label-soundness");
        for _ in 0..200 {
            let e: f64 = st.rng().gen_range(-1.0..1.0);
            let mut params = FaceParams::consistent(e, st.rng().gen(), 0.0);
            let do_override = st.rng().gen_bool(0.5);
            if do_override {
                let part = FacePart::ALL[st.rng().gen_range(0..3)];
                params = params.with_override(part, -e.signum() * st.rng().gen_range(0.2..1.0));
            }
            let (_, _, label, tag) = generate_face::<f32>(&params, 3).unwrap();
            let differs = FacePart::ALL
                .iter()
                .any(|&p| params.part_scalar(p) != params.expression);
            assert_eq!(label == Label::Fake, differs);
            assert_eq!(tag.is_some(), differs);
        }
    }

    #[test]
    fn mouth_corner_extrema_match_landmarks() {
        for (e, seed) in [(0.8, 21u64), (-0.6, 22), (0.0, 23)] {
            let params = FaceParams::consistent(e, seed, 0.0);
            let (face, lm, _, _) = generate_face::<f64>(&params, 1).unwrap();
            // lip pixels are strongly red against skin
            let mut min_x = f64::INFINITY;
            let mut max_x = f64::NEG_INFINITY;
            for ((_, x, _), _) in face.pixels.indexed_iter().filter(|((y, x, c), _)| {
                *c == 0 && {
                    let r = face.pixels[(*y, *x, 0)];
                    let g = face.pixels[(*y, *x, 1)];
                    r - g > 0.33
                }
            }) {
                min_x = min_x.min(x as f64 + 0.5);
                max_x = max_x.max(x as f64 + 0.5);
            }
            assert!(
                (min_x - lm.points[48].0).abs() <= 1.0,
                "left corner: pixel {min_x} vs landmark {}",
                lm.points[48].0
            );
            assert!(
                (max_x - lm.points[54].0).abs() <= 1.0,
                "right corner: pixel {max_x} vs landmark {}",
                lm.points[54].0
            );
        }
    }

    #[test]
    fn noise_level_bounds() {
        let params = FaceParams::consistent(0.0, 1, 0.5);
        assert!(matches!(
            generate_face::<f32>(&params, 0),
            Err(MoverError::Parameter(_))
        ));
        let params = FaceParams::consistent(0.0, 1, -0.1);
        assert!(generate_face::<f32>(&params, 0).is_err());
    }

    #[test]
    fn benchmark_smallest_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let spec = BenchmarkSpec::new(1, 1, vec![FacePart::Lips]);
        let m = generate_benchmark(dir.path(), &spec, 5).unwrap();
        assert_eq!(m.entries.len(), 2);
        for e in &m.entries {
            for t in 0..10 {
                assert!(e.path.join(format!("frame_{t}.png")).exists());
            }
        }
        let loaded = DatasetManifest::load(&dir.path().join("manifest.jsonl")).unwrap();
        assert_eq!(loaded, m);
    }

    #[test]
    fn benchmark_manipulation_cycling() {
        let dir = tempfile::tempdir().unwrap();
        let spec = BenchmarkSpec::new(1, 4, vec![FacePart::Eyes, FacePart::Lips]);
        let m = generate_benchmark(dir.path(), &spec, 5).unwrap();
        let mut tags: Vec<(String, String)> = m
            .entries
            .iter()
            .filter(|e| e.label == Label::Fake)
            .map(|e| (e.video_id.clone(), e.manipulation.clone().unwrap()))
            .collect();
        tags.sort();
        let tags: Vec<&str> = tags.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(tags, vec!["eyes", "lips", "eyes", "lips"]);
    }

    #[test]
    fn benchmark_split_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let spec = BenchmarkSpec::new(50, 50, vec![FacePart::Eyes]);
        let m = generate_benchmark(dir.path(), &spec, 9).unwrap();
        for label in [Label::Real, Label::Fake] {
            let count = |s: Split| {
                m.entries
                    .iter()
                    .filter(|e| e.label == label && e.split == s)
                    .count() as i64
            };
            assert!((count(Split::Train) - 35).abs() <= 1);
            assert!((count(Split::Val) - 5).abs() <= 1);
            assert!((count(Split::Test) - 10).abs() <= 1);
        }
    }
}
