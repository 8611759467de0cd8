//! Facial-part masking: ROIs, part bands, and mask plans on the 14x14 grid.
//!
//! A plan selects one facial part, signs the grid blocks of that part's row
//! band that carry ROI anchor landmarks, and masks a seeded uniform sample of
//! the signed blocks at the configured ratio.

use crate::error::{MoverError, Result};
use crate::face::{LandmarkSet, BROWS, EYES, MOUTH};
use crate::rng::Stream;
use crate::synth::FacePart;
use rand::Rng;
use std::collections::BTreeSet;

/// The fixed 224 / 16 patch grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchGrid {
    pub image_size: usize,
    pub patch_size: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Default for PatchGrid {
    fn default() -> Self {
        PatchGrid {
            image_size: 224,
            patch_size: 16,
            rows: 14,
            cols: 14,
        }
    }
}

impl PatchGrid {
    pub fn blocks(&self) -> usize {
        self.rows * self.cols
    }

    pub fn block_of(&self, x: f64, y: f64) -> Option<usize> {
        if !(0.0..self.image_size as f64).contains(&x)
            || !(0.0..self.image_size as f64).contains(&y)
        {
            return None;
        }
        let c = (x / self.patch_size as f64) as usize;
        let r = (y / self.patch_size as f64) as usize;
        Some(r * self.cols + c)
    }

    pub fn row_of_block(&self, block: usize) -> usize {
        block / self.cols
    }
}

/// Semantic tag of each of the 11 ROIs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoiTag {
    LeftEyebrow,
    RightEyebrow,
    LeftLowerEyelid,
    RightLowerEyelid,
    NoseRoot,
    LeftCheek,
    RightCheek,
    LeftMouthCorner,
    RightMouthCorner,
    ChinSides,
    Chin,
}

impl RoiTag {
    pub const ALL: [RoiTag; 11] = [
        RoiTag::LeftEyebrow,
        RoiTag::RightEyebrow,
        RoiTag::LeftLowerEyelid,
        RoiTag::RightLowerEyelid,
        RoiTag::NoseRoot,
        RoiTag::LeftCheek,
        RoiTag::RightCheek,
        RoiTag::LeftMouthCorner,
        RoiTag::RightMouthCorner,
        RoiTag::ChinSides,
        RoiTag::Chin,
    ];

    /// Which facial part each ROI informs.
    pub fn part(self) -> FacePart {
        match self {
            RoiTag::LeftEyebrow
            | RoiTag::RightEyebrow
            | RoiTag::LeftLowerEyelid
            | RoiTag::RightLowerEyelid => FacePart::Eyes,
            RoiTag::NoseRoot | RoiTag::LeftCheek | RoiTag::RightCheek => FacePart::CheekNose,
            RoiTag::LeftMouthCorner
            | RoiTag::RightMouthCorner
            | RoiTag::ChinSides
            | RoiTag::Chin => FacePart::Lips,
        }
    }

    /// Landmark indices feeding this ROI. Cheek ROIs synthesize their anchor
    /// points from these (midpoints of jaw points and the nose wing), since
    /// the 68-point convention has no direct cheek landmarks.
    pub fn anchor_indices(self) -> &'static [usize] {
        match self {
            RoiTag::LeftEyebrow => &[17, 18, 19, 20, 21],
            RoiTag::RightEyebrow => &[22, 23, 24, 25, 26],
            RoiTag::LeftLowerEyelid => &[36, 39, 40, 41],
            RoiTag::RightLowerEyelid => &[42, 45, 46, 47],
            RoiTag::NoseRoot => &[27, 28],
            RoiTag::LeftCheek => &[1, 2, 3, 4, 31],
            RoiTag::RightCheek => &[12, 13, 14, 15, 35],
            RoiTag::LeftMouthCorner => &[48],
            RoiTag::RightMouthCorner => &[54],
            RoiTag::ChinSides => &[5, 6, 10, 11],
            RoiTag::Chin => &[7, 8, 9],
        }
    }

    /// Anchor points in crop coordinates.
    pub fn anchor_points(self, lm: &LandmarkSet) -> Vec<(f64, f64)> {
        match self {
            RoiTag::LeftCheek => {
                let wing = lm.points[31];
                (1..=4)
                    .map(|i| {
                        let p = lm.points[i];
                        ((p.0 + wing.0) / 2.0, (p.1 + wing.1) / 2.0)
                    })
                    .collect()
            }
            RoiTag::RightCheek => {
                let wing = lm.points[35];
                (12..=15)
                    .map(|i| {
                        let p = lm.points[i];
                        ((p.0 + wing.0) / 2.0, (p.1 + wing.1) / 2.0)
                    })
                    .collect()
            }
            _ => self
                .anchor_indices()
                .iter()
                .map(|&i| lm.points[i])
                .collect(),
        }
    }
}

/// Pixel-space rectangle, half-open on both axes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }
    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Roi {
    pub tag: RoiTag,
    pub bbox: Rect,
    pub anchor_points: Vec<(f64, f64)>,
}

/// The 11 landmark-anchored ROI rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiSet {
    pub rois: Vec<Roi>,
}

/// Pixels added on each side of an ROI's anchor bounding box.
pub const ROI_EXPAND: f64 = 8.0;

pub fn compute_rois(landmarks: &LandmarkSet) -> Result<RoiSet> {
    landmarks.validate()?;
    let size = 224.0;
    let mut rois = Vec::with_capacity(11);
    for tag in RoiTag::ALL {
        let pts = tag.anchor_points(landmarks);
        let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
        let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let bbox = Rect {
            x0: (x0 - ROI_EXPAND).max(0.0),
            y0: (y0 - ROI_EXPAND).max(0.0),
            x1: (x1 + ROI_EXPAND).min(size),
            y1: (y1 + ROI_EXPAND).min(size),
        };
        if bbox.width() <= 0.0 || bbox.height() <= 0.0 {
            return Err(MoverError::Geometry(format!(
                "ROI {tag:?} degenerate after expansion: {bbox:?}"
            )));
        }
        rois.push(Roi {
            tag,
            bbox,
            anchor_points: pts,
        });
    }
    Ok(RoiSet { rois })
}

impl RoiSet {
    pub fn for_part(&self, part: FacePart) -> impl Iterator<Item = &Roi> {
        self.rois.iter().filter(move |r| r.tag.part() == part)
    }
}

/// The three contiguous grid-row bands, top to bottom, partitioning 0..=13.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PartBands {
    pub eyes_rows: (usize, usize),
    pub cheek_nose_rows: (usize, usize),
    pub lips_rows: (usize, usize),
}

impl PartBands {
    pub fn rows(&self, part: FacePart) -> std::ops::RangeInclusive<usize> {
        let (a, b) = match part {
            FacePart::Eyes => self.eyes_rows,
            FacePart::CheekNose => self.cheek_nose_rows,
            FacePart::Lips => self.lips_rows,
        };
        a..=b
    }

    pub fn contains(&self, part: FacePart, row: usize) -> bool {
        self.rows(part).contains(&row)
    }
}

/// Splits grid rows into eyes / cheek & nose / lips bands from landmark
/// y-extrema: the eyes band ends at the row holding the lowest eyebrow or
/// eye landmark, the lips band starts below the row of the highest mouth
/// landmark.
pub fn compute_part_bands(landmarks: &LandmarkSet, grid: &PatchGrid) -> Result<PartBands> {
    landmarks.validate()?;
    let y_eyes_bottom = landmarks.max_y_over(BROWS.chain(EYES));
    let y_mouth_top = landmarks.min_y_over(MOUTH);
    if y_eyes_bottom >= y_mouth_top {
        return Err(MoverError::Geometry(format!(
            "eyes bottom {y_eyes_bottom} not above mouth top {y_mouth_top}"
        )));
    }
    let row = |y: f64| (y / grid.patch_size as f64) as usize;
    let eyes_end = row(y_eyes_bottom);
    let cheek_end = row(y_mouth_top);
    let last = grid.rows - 1;
    if cheek_end <= eyes_end || cheek_end >= last {
        return Err(MoverError::Geometry(format!(
            "degenerate bands: eyes end row {eyes_end}, cheek end row {cheek_end}"
        )));
    }
    Ok(PartBands {
        eyes_rows: (0, eyes_end),
        cheek_nose_rows: (eyes_end + 1, cheek_end),
        lips_rows: (cheek_end + 1, last),
    })
}

/// Masking strategies: the facial-part strategy plus its ablation variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskStrategy {
    /// Randomly select a part, sign its ROI-bearing band blocks.
    Proposed,
    /// Plain random masking over all 196 blocks.
    MaeRandom,
    /// Like Proposed but with the part forced.
    FixedPart(FacePart),
    /// Sign every block of the selected band, ignoring ROIs.
    NoRois,
}

/// How eligible blocks are signed within the selected band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignerMode {
    /// A block is signed iff it contains an anchor landmark of the part's
    /// ROIs (the default, literal reading).
    #[default]
    LandmarkContainment,
    /// A block is signed iff its pixel rectangle intersects any ROI box of
    /// the part.
    RoiBoxIntersection,
}

/// Output of the mask planner.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MaskPlan {
    pub strategy: MaskStrategy,
    /// None only for the MaeRandom strategy.
    pub selected_part: Option<FacePart>,
    pub signed_blocks: BTreeSet<usize>,
    pub masked_blocks: BTreeSet<usize>,
    pub ratio: f64,
    pub seed: u64,
    /// True when the selected part had zero signed blocks and signing fell
    /// back to the whole band.
    pub fallback: bool,
}

impl MaskPlan {
    /// A plan that masks nothing: stage-2 full-visible mode.
    pub fn full_visible(seed: u64) -> MaskPlan {
        MaskPlan {
            strategy: MaskStrategy::Proposed,
            selected_part: None,
            signed_blocks: BTreeSet::new(),
            masked_blocks: BTreeSet::new(),
            ratio: 1.0,
            seed,
            fallback: false,
        }
    }

    pub fn masked_count(&self) -> usize {
        self.masked_blocks.len()
    }

    pub fn is_masked(&self, block: usize) -> bool {
        self.masked_blocks.contains(&block)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }
}

/// Masked-count rule: floor of signed * ratio, clamped to at least one.
pub fn masked_count_rule(signed: usize, ratio: f64) -> usize {
    ((signed as f64 * ratio).floor() as usize).max(1)
}

fn signed_blocks_for_part(
    landmarks: &LandmarkSet,
    grid: &PatchGrid,
    bands: &PartBands,
    rois: &RoiSet,
    part: FacePart,
    signer: SignerMode,
) -> BTreeSet<usize> {
    let mut signed = BTreeSet::new();
    match signer {
        SignerMode::LandmarkContainment => {
            for roi in rois.for_part(part) {
                for &(x, y) in &roi.anchor_points {
                    if let Some(block) = grid.block_of(x, y) {
                        if bands.contains(part, grid.row_of_block(block)) {
                            signed.insert(block);
                        }
                    }
                }
            }
        }
        SignerMode::RoiBoxIntersection => {
            for row in bands.rows(part) {
                for col in 0..grid.cols {
                    let p = grid.patch_size as f64;
                    let rect = Rect {
                        x0: col as f64 * p,
                        y0: row as f64 * p,
                        x1: (col + 1) as f64 * p,
                        y1: (row + 1) as f64 * p,
                    };
                    if rois.for_part(part).any(|r| r.bbox.intersects(&rect)) {
                        signed.insert(row * grid.cols + col);
                    }
                }
            }
        }
    }
    let _ = landmarks;
    signed
}

fn whole_band(grid: &PatchGrid, bands: &PartBands, part: FacePart) -> BTreeSet<usize> {
    let mut signed = BTreeSet::new();
    for row in bands.rows(part) {
        for col in 0..grid.cols {
            signed.insert(row * grid.cols + col);
        }
    }
    signed
}

pub fn plan_mask(
    landmarks: &LandmarkSet,
    ratio: f64,
    seed: u64,
    strategy: MaskStrategy,
) -> Result<MaskPlan> {
    plan_mask_with(landmarks, ratio, seed, strategy, SignerMode::default())
}

pub fn plan_mask_with(
    landmarks: &LandmarkSet,
    ratio: f64,
    seed: u64,
    strategy: MaskStrategy,
    signer: SignerMode,
) -> Result<MaskPlan> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(MoverError::Parameter(format!(
            "mask ratio {ratio} outside (0, 1]"
        )));
    }
    let grid = PatchGrid::default();
    let mut st = Stream::new(seed, "mask-plan");

    if strategy == MaskStrategy::MaeRandom {
        let signed: BTreeSet<usize> = (0..grid.blocks()).collect();
        let masked = sample_blocks(&signed, masked_count_rule(signed.len(), ratio), &mut st);
        return Ok(MaskPlan {
            strategy,
            selected_part: None,
            signed_blocks: signed,
            masked_blocks: masked,
            ratio,
            seed,
            fallback: false,
        });
    }

    let bands = compute_part_bands(landmarks, &grid)?;
    let rois = compute_rois(landmarks)?;
    let part = match strategy {
        MaskStrategy::FixedPart(p) => p,
        // uniform over the three parts, seeded
        _ => FacePart::ALL[st.rng().gen_range(0..3)],
    };

    let (signed, fallback) = match strategy {
        MaskStrategy::NoRois => (whole_band(&grid, &bands, part), false),
        _ => {
            let s = signed_blocks_for_part(landmarks, &grid, &bands, &rois, part, signer);
            if s.is_empty() {
                // unspecified edge: sign the whole band and record it
                (whole_band(&grid, &bands, part), true)
            } else {
                (s, false)
            }
        }
    };

    let masked = sample_blocks(&signed, masked_count_rule(signed.len(), ratio), &mut st);
    Ok(MaskPlan {
        strategy,
        selected_part: Some(part),
        signed_blocks: signed,
        masked_blocks: masked,
        ratio,
        seed,
        fallback,
    })
}

fn sample_blocks(signed: &BTreeSet<usize>, count: usize, st: &mut Stream) -> BTreeSet<usize> {
    let pool: Vec<usize> = signed.iter().copied().collect();
    let count = count.min(pool.len());
    rand::seq::index::sample(st.rng(), pool.len(), count)
        .into_iter()
        .map(|i| pool[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::face::{LandmarkSource, N_LANDMARKS};
    use crate::synth::{landmarks_for, sample_landmarks, FaceParams};

    fn fixture() -> LandmarkSet {
        landmarks_for(&FaceParams::consistent(0.3, 1234, 0.0)).unwrap()
    }

    #[test]
    fn bands_worked_example() {
        // y_eyes_bottom = 95 -> row 5; y_mouth_top = 150 -> row 9
        let mut pts = [(100.0, 60.0); N_LANDMARKS];
        for i in BROWS.chain(EYES) {
            pts[i] = (100.0, 80.0);
        }
        pts[40] = (100.0, 95.0); // deepest eye landmark
        for i in MOUTH {
            pts[i] = (100.0, 160.0);
        }
        pts[51] = (100.0, 150.0); // highest mouth landmark
        let lm = LandmarkSet {
            points: pts,
            source: LandmarkSource::Synthetic,
        };
        let bands = compute_part_bands(&lm, &PatchGrid::default()).unwrap();
        assert_eq!(bands.eyes_rows, (0, 5));
        assert_eq!(bands.cheek_nose_rows, (6, 9));
        assert_eq!(bands.lips_rows, (10, 13));
    }

    #[test]
    fn bands_partition_rows_for_random_faces() {
        let mut st = Stream::new(5, "bands");
        for _ in 0..500 {
            let lm = sample_landmarks(st.rng());
            let bands = compute_part_bands(&lm, &PatchGrid::default()).unwrap();
            assert_eq!(bands.eyes_rows.0, 0);
            assert_eq!(bands.cheek_nose_rows.0, bands.eyes_rows.1 + 1);
            assert_eq!(bands.lips_rows.0, bands.cheek_nose_rows.1 + 1);
            assert_eq!(bands.lips_rows.1, 13);
            assert!(bands.eyes_rows.1 >= bands.eyes_rows.0);
            assert!(bands.cheek_nose_rows.1 >= bands.cheek_nose_rows.0);
        }
    }

    #[test]
    fn mouth_above_eyes_is_geometry_error() {
        let mut pts = [(100.0, 120.0); N_LANDMARKS];
        for i in MOUTH {
            pts[i] = (100.0, 40.0);
        }
        for i in BROWS.chain(EYES) {
            pts[i] = (100.0, 100.0);
        }
        let lm = LandmarkSet {
            points: pts,
            source: LandmarkSource::Synthetic,
        };
        assert!(matches!(
            compute_part_bands(&lm, &PatchGrid::default()),
            Err(MoverError::Geometry(_))
        ));
    }

    #[test]
    fn rois_mirror_for_symmetric_template() {
        let lm = landmarks_for(&FaceParams::consistent(0.0, 77, 0.0)).unwrap();
        let rois = compute_rois(&lm).unwrap();
        let get = |tag: RoiTag| rois.rois.iter().find(|r| r.tag == tag).unwrap();
        for (l, r) in [
            (RoiTag::LeftEyebrow, RoiTag::RightEyebrow),
            (RoiTag::LeftLowerEyelid, RoiTag::RightLowerEyelid),
            (RoiTag::LeftCheek, RoiTag::RightCheek),
            (RoiTag::LeftMouthCorner, RoiTag::RightMouthCorner),
        ] {
            let (bl, br) = (get(l).bbox, get(r).bbox);
            assert!((bl.x0 - (224.0 - br.x1)).abs() <= 1.0, "{l:?}/{r:?}");
            assert!((bl.x1 - (224.0 - br.x0)).abs() <= 1.0);
            assert!((bl.y0 - br.y0).abs() <= 1.0 && (bl.y1 - br.y1).abs() <= 1.0);
        }
    }

    #[test]
    fn nose_root_box_is_anchor_bbox_plus_expand() {
        let lm = fixture();
        let rois = compute_rois(&lm).unwrap();
        let r5 = rois
            .rois
            .iter()
            .find(|r| r.tag == RoiTag::NoseRoot)
            .unwrap();
        let (p27, p28) = (lm.points[27], lm.points[28]);
        assert!((r5.bbox.x0 - (p27.0.min(p28.0) - 8.0)).abs() < 1e-9);
        assert!((r5.bbox.x1 - (p27.0.max(p28.0) + 8.0)).abs() < 1e-9);
        assert!((r5.bbox.y0 - (p27.1.min(p28.1) - 8.0)).abs() < 1e-9);
        assert!((r5.bbox.y1 - (p27.1.max(p28.1) + 8.0)).abs() < 1e-9);
    }

    #[test]
    fn roi_translation_equivariance() {
        let lm = fixture();
        let rois = compute_rois(&lm).unwrap();
        let mut shifted = lm.clone();
        for p in shifted.points.iter_mut() {
            p.0 += 10.0;
            p.1 += 10.0;
        }
        // fixture landmarks sit well inside, so expansion is not clipped
        let rois2 = compute_rois(&shifted).unwrap();
        for (a, b) in rois.rois.iter().zip(rois2.rois.iter()) {
            assert!((b.bbox.x0 - a.bbox.x0 - 10.0).abs() < 1e-9, "{:?}", a.tag);
            assert!((b.bbox.y0 - a.bbox.y0 - 10.0).abs() < 1e-9);
            assert!((b.bbox.x1 - a.bbox.x1 - 10.0).abs() < 1e-9);
            assert!((b.bbox.y1 - a.bbox.y1 - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ratio_one_masks_all_signed() {
        let lm = fixture();
        let plan = plan_mask(&lm, 1.0, 3, MaskStrategy::Proposed).unwrap();
        assert_eq!(plan.masked_blocks, plan.signed_blocks);
        assert!(!plan.signed_blocks.is_empty());
    }

    #[test]
    fn mae_random_cardinality() {
        let lm = fixture();
        let plan = plan_mask(&lm, 0.75, 11, MaskStrategy::MaeRandom).unwrap();
        assert_eq!(plan.signed_blocks.len(), 196);
        assert_eq!(plan.masked_blocks.len(), 147);
        assert_eq!(plan.selected_part, None);
    }

    #[test]
    fn fixed_part_matches_brute_force_count() {
        let lm = fixture();
        let plan = plan_mask(&lm, 0.75, 7, MaskStrategy::FixedPart(FacePart::Eyes)).unwrap();
        // independent count: iterate all 196 blocks and all eyes anchors
        let grid = PatchGrid::default();
        let bands = compute_part_bands(&lm, &grid).unwrap();
        let rois = compute_rois(&lm).unwrap();
        let mut expect = BTreeSet::new();
        for block in 0..196 {
            let (r, c) = (block / 14, block % 14);
            if !bands.contains(FacePart::Eyes, r) {
                continue;
            }
            let hit = rois.for_part(FacePart::Eyes).any(|roi| {
                roi.anchor_points.iter().any(|&(x, y)| {
                    (x / 16.0) as usize == c && (y / 16.0) as usize == r
                })
            });
            if hit {
                expect.insert(block);
            }
        }
        assert_eq!(plan.signed_blocks, expect);
        let s = expect.len();
        assert_eq!(plan.masked_blocks.len(), ((0.75 * s as f64) as usize).max(1));
        assert!(plan.masked_blocks.is_subset(&plan.signed_blocks));
    }

    #[test]
    fn plans_are_deterministic_and_seed_sensitive() {
        let lm = fixture();
        let a = plan_mask(&lm, 0.75, 42, MaskStrategy::Proposed).unwrap();
        let b = plan_mask(&lm, 0.75, 42, MaskStrategy::Proposed).unwrap();
        assert_eq!(a, b);
        let c = plan_mask(&lm, 0.75, 43, MaskStrategy::Proposed).unwrap();
        assert!(a != c || a.seed != c.seed);
    }

    #[test]
    fn part_selection_is_uniform() {
        let lm = fixture();
        let mut counts = [0usize; 3];
        let n = 3000;
        for seed in 0..n {
            let plan = plan_mask(&lm, 0.75, seed, MaskStrategy::Proposed).unwrap();
            match plan.selected_part.unwrap() {
                FacePart::Eyes => counts[0] += 1,
                FacePart::CheekNose => counts[1] += 1,
                FacePart::Lips => counts[2] += 1,
            }
        }
        let mean = n as f64 / 3.0;
        let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!(
                (c as f64 - mean).abs() <= 3.0 * sigma,
                "part counts {counts:?} outside 3 sigma"
            );
        }
    }

    #[test]
    fn proposed_masks_stay_in_selected_band() {
        let mut st = Stream::new(9, "containment");
        for seed in 0..200 {
            let lm = sample_landmarks(st.rng());
            let plan = plan_mask(&lm, 0.75, seed, MaskStrategy::Proposed).unwrap();
            let bands = compute_part_bands(&lm, &PatchGrid::default()).unwrap();
            let part = plan.selected_part.unwrap();
            for &b in &plan.masked_blocks {
                assert!(bands.contains(part, b / 14));
            }
            assert!(plan.masked_blocks.is_subset(&plan.signed_blocks));
        }
    }

    #[test]
    fn no_rois_signs_whole_band() {
        let lm = fixture();
        let plan = plan_mask(&lm, 0.5, 4, MaskStrategy::NoRois).unwrap();
        let bands = compute_part_bands(&lm, &PatchGrid::default()).unwrap();
        let part = plan.selected_part.unwrap();
        let rows = bands.rows(part);
        let expected = (rows.end() - rows.start() + 1) * 14;
        assert_eq!(plan.signed_blocks.len(), expected);
    }

    #[test]
    fn invalid_ratio_rejected() {
        let lm = fixture();
        assert!(plan_mask(&lm, 0.0, 1, MaskStrategy::Proposed).is_err());
        assert!(plan_mask(&lm, 1.5, 1, MaskStrategy::Proposed).is_err());
    }
}
