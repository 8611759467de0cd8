//! Corpus ingestion: directory scanning, landmark caches, face alignment,
//! frame sampling.
//!
//! A "video" on disk is either a media file or a directory of frame images.
//! Aligned synthetic corpora store 224x224 frames directly; raw frames of
//! other sizes are aligned through [`extract_aligned_face`] using cached
//! landmarks in frame coordinates.

use crate::error::{MoverError, Result};
use crate::face::{FaceImage, LandmarkSet, LandmarkSource, FACE_SIZE, N_LANDMARKS};
use crate::manifest::{DatasetManifest, Label, Split, VideoEntry};
use crate::scalar::Scalar;
use ndarray::Array3;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

const VIDEO_EXTS: [&str; 5] = ["mp4", "avi", "mov", "mkv", "webm"];
const FRAME_EXTS: [&str; 4] = ["png", "jpg", "jpeg", "bmp"];

/// Naming-convention descriptor for [`build_manifest`].
///
/// The expected tree is `real/<video>` and `fake/<manipulation>/<video>`,
/// optionally nested under `train/`, `val/`, `test/` when `split_dirs` is set
/// (otherwise every entry lands in the train split).
#[derive(Debug, Clone, Copy, Default)]
pub struct Layout {
    pub split_dirs: bool,
}

fn has_ext(path: &Path, exts: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| exts.iter().any(|x| e.eq_ignore_ascii_case(x)))
        .unwrap_or(false)
}

fn is_video_file(path: &Path) -> bool {
    has_ext(path, &VIDEO_EXTS)
}

/// A directory is a video iff it directly contains at least one frame image.
fn is_frame_dir(path: &Path) -> bool {
    std::fs::read_dir(path)
        .map(|rd| {
            rd.flatten()
                .any(|e| e.path().is_file() && has_ext(&e.path(), &FRAME_EXTS))
        })
        .unwrap_or(false)
}

fn video_id_for(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let mut s = rel
        .with_extension("")
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("_");
    s.retain(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    s
}

fn sorted_children(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| MoverError::io(dir, e))?
        .flatten()
        .map(|e| e.path())
        .collect();
    out.sort();
    Ok(out)
}

fn is_sidecar(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .map(|n| n.ends_with(".landmarks.csv") || n == "manifest.jsonl")
        .unwrap_or(false)
}

fn scan_label_dir(
    root: &Path,
    dir: &Path,
    label: Label,
    manipulation: Option<&str>,
    split: Split,
    out: &mut Vec<VideoEntry>,
) -> Result<()> {
    for child in sorted_children(dir)? {
        if is_sidecar(&child) {
            continue;
        }
        let is_video = (child.is_file() && is_video_file(&child))
            || (child.is_dir() && is_frame_dir(&child));
        if is_video {
            if label == Label::Fake && manipulation.is_none() {
                return Err(MoverError::schema(
                    &child,
                    "fake video has no manipulation directory",
                ));
            }
            out.push(VideoEntry {
                video_id: video_id_for(root, &child),
                path: child,
                label,
                manipulation: manipulation.map(String::from),
                split,
                frame_indices: None,
            });
        } else if child.is_dir() {
            if label == Label::Fake && manipulation.is_none() {
                let tag = child
                    .file_name()
                    .and_then(|n| n.to_str())
                    .ok_or_else(|| MoverError::schema(&child, "unreadable manipulation name"))?
                    .to_string();
                scan_label_dir(root, &child, label, Some(&tag), split, out)?;
            } else {
                // nested grouping below real/ or a manipulation dir
                scan_label_dir(root, &child, label, manipulation, split, out)?;
            }
        } else if child.is_file() && has_ext(&child, &FRAME_EXTS) {
            // stray image outside a frame dir: not a video
            continue;
        }
    }
    Ok(())
}

fn scan_split_root(
    root: &Path,
    dir: &Path,
    split: Split,
    out: &mut Vec<VideoEntry>,
) -> Result<()> {
    for child in sorted_children(dir)? {
        if is_sidecar(&child) {
            continue;
        }
        let name = child
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .to_ascii_lowercase();
        match name.as_str() {
            "real" if child.is_dir() => {
                scan_label_dir(root, &child, Label::Real, None, split, out)?
            }
            "fake" if child.is_dir() => {
                scan_label_dir(root, &child, Label::Fake, None, split, out)?
            }
            _ => {
                if let Some(media) = find_media_under(&child) {
                    return Err(MoverError::schema(
                        media,
                        "cannot parse label: expected real/ or fake/ parent",
                    ));
                }
                // anything else (docs, caches, unrelated dirs) is ignored
            }
        }
    }
    Ok(())
}

/// Scans a directory tree into a validated manifest. Deterministic for a
/// fixed tree: entries come out sorted by video_id.
pub fn build_manifest(root: &Path, layout: Layout) -> Result<DatasetManifest> {
    if !root.is_dir() {
        return Err(MoverError::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "root is not a directory"),
        ));
    }
    let mut entries = Vec::new();
    if layout.split_dirs {
        for (name, split) in [
            ("train", Split::Train),
            ("val", Split::Val),
            ("test", Split::Test),
        ] {
            let dir = root.join(name);
            if dir.is_dir() {
                scan_split_root(root, &dir, split, &mut entries)?;
            }
        }
    } else {
        scan_split_root(root, root, Split::Train, &mut entries)?;
    }
    entries.sort_by(|a, b| a.video_id.cmp(&b.video_id));
    DatasetManifest::new(entries, true)
}

/// Affine crop transform: frame coordinates -> 224x224 crop coordinates.
/// Scale plus translation only, per-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub x0: f64,
    pub y0: f64,
    pub sx: f64,
    pub sy: f64,
}

impl AffineMap {
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * self.sx, (y - self.y0) * self.sy)
    }

    pub fn invert(&self, x: f64, y: f64) -> (f64, f64) {
        (x / self.sx + self.x0, y / self.sy + self.y0)
    }
}

/// Fraction of the landmark bounding box added on each side before cropping.
pub const CROP_MARGIN: f64 = 0.125;

fn bilinear<T: Scalar>(frame: &Array3<T>, x: f64, y: f64, c: usize) -> T {
    let (h, w, _) = frame.dim();
    let u = x - 0.5;
    let v = y - 0.5;
    let x0 = u.floor();
    let y0 = v.floor();
    let fx = u - x0;
    let fy = v - y0;
    let xi = |k: f64| (k.max(0.0) as usize).min(w - 1);
    let yi = |k: f64| (k.max(0.0) as usize).min(h - 1);
    let (x0i, x1i) = (xi(x0), xi(x0 + 1.0));
    let (y0i, y1i) = (yi(y0), yi(y0 + 1.0));
    let fx = T::of_f64(fx);
    let fy = T::of_f64(fy);
    let one = T::one();
    frame[(y0i, x0i, c)] * (one - fx) * (one - fy)
        + frame[(y0i, x1i, c)] * fx * (one - fy)
        + frame[(y1i, x0i, c)] * (one - fx) * fy
        + frame[(y1i, x1i, c)] * fx * fy
}

/// Crops the landmark bounding box (expanded by [`CROP_MARGIN`], clipped to
/// the frame) and resizes it to 224x224. Returns the aligned face, the
/// landmarks in crop coordinates, and the transform used.
pub fn extract_aligned_face<T: Scalar>(
    frame: &Array3<T>,
    landmarks: &LandmarkSet,
    frame_index: usize,
    video_id: &str,
) -> Result<(FaceImage<T>, LandmarkSet, AffineMap)> {
    let (h, w, ch) = frame.dim();
    if ch != 3 {
        return Err(MoverError::Shape {
            expected: "HxWx3 frame".into(),
            got: format!("{:?}", frame.dim()),
        });
    }
    for (i, &(x, y)) in landmarks.points.iter().enumerate() {
        if !(0.0..w as f64).contains(&x) || !(0.0..h as f64).contains(&y) {
            return Err(MoverError::Geometry(format!(
                "landmark {i} ({x}, {y}) outside frame {w}x{h}"
            )));
        }
    }
    let (min_x, min_y, max_x, max_y) = landmarks.bbox();
    let bw = max_x - min_x;
    let bh = max_y - min_y;
    if bw <= f64::EPSILON || bh <= f64::EPSILON {
        return Err(MoverError::Geometry(format!(
            "degenerate landmark box {bw}x{bh}"
        )));
    }
    let x0 = (min_x - CROP_MARGIN * bw).max(0.0);
    let x1 = (max_x + CROP_MARGIN * bw).min(w as f64);
    let y0 = (min_y - CROP_MARGIN * bh).max(0.0);
    let y1 = (max_y + CROP_MARGIN * bh).min(h as f64);
    let map = AffineMap {
        x0,
        y0,
        sx: FACE_SIZE as f64 / (x1 - x0),
        sy: FACE_SIZE as f64 / (y1 - y0),
    };

    let mut pixels = Array3::zeros((FACE_SIZE, FACE_SIZE, 3));
    for i in 0..FACE_SIZE {
        let sy = y0 + (i as f64 + 0.5) / map.sy;
        for j in 0..FACE_SIZE {
            let sx = x0 + (j as f64 + 0.5) / map.sx;
            for c in 0..3 {
                pixels[(i, j, c)] = bilinear(frame, sx, sy, c);
            }
        }
    }

    let mut points = [(0.0, 0.0); N_LANDMARKS];
    for (p, &(x, y)) in points.iter_mut().zip(landmarks.points.iter()) {
        *p = map.apply(x, y);
    }
    let out_lm = LandmarkSet::new(points, landmarks.source)?;
    Ok((
        FaceImage::new(pixels, frame_index, video_id)?,
        out_lm,
        map,
    ))
}

// ---- landmark caches -------------------------------------------------------

/// Writes a per-video landmark sidecar: rows `frame_index,p0x,p0y,...,p67x,p67y`.
pub fn write_landmark_cache(path: &Path, rows: &[(usize, LandmarkSet)]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| MoverError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for (frame_index, lm) in rows {
        write!(w, "{frame_index}").map_err(|e| MoverError::io(path, e))?;
        for &(x, y) in &lm.points {
            write!(w, ",{x},{y}").map_err(|e| MoverError::io(path, e))?;
        }
        writeln!(w).map_err(|e| MoverError::io(path, e))?;
    }
    Ok(())
}

pub fn read_landmark_cache(path: &Path) -> Result<BTreeMap<usize, LandmarkSet>> {
    let file = std::fs::File::open(path).map_err(|e| MoverError::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut out = BTreeMap::new();
    for (ln, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| MoverError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 1 + 2 * N_LANDMARKS {
            return Err(MoverError::schema(
                path,
                format!("line {}: expected {} fields, got {}", ln + 1, 1 + 2 * N_LANDMARKS, fields.len()),
            ));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| MoverError::schema(path, format!("line {}: {e}", ln + 1)))
        };
        let frame_index = fields[0]
            .parse::<usize>()
            .map_err(|e| MoverError::schema(path, format!("line {}: {e}", ln + 1)))?;
        let mut points = [(0.0, 0.0); N_LANDMARKS];
        for (k, p) in points.iter_mut().enumerate() {
            *p = (parse(fields[1 + 2 * k])?, parse(fields[2 + 2 * k])?);
        }
        out.insert(
            frame_index,
            LandmarkSet {
                points,
                source: LandmarkSource::Cache,
            },
        );
    }
    Ok(out)
}

/// Pluggable landmark source. The shipped implementations are the sidecar
/// cache reader and the synthetic generator; wrapping a real detector is
/// optional glue.
pub trait LandmarkProvider: Send + Sync {
    fn landmarks(&self, entry: &VideoEntry, frame_index: usize) -> Result<LandmarkSet>;
}

/// Reads `<video_id>.landmarks.csv` sidecars next to each video.
pub struct CacheProvider;

pub fn sidecar_path(entry: &VideoEntry) -> PathBuf {
    let parent = entry.path.parent().unwrap_or(Path::new("."));
    parent.join(format!("{}.landmarks.csv", entry.video_id))
}

impl LandmarkProvider for CacheProvider {
    fn landmarks(&self, entry: &VideoEntry, frame_index: usize) -> Result<LandmarkSet> {
        let path = sidecar_path(entry);
        let cache = read_landmark_cache(&path)?;
        cache.get(&frame_index).cloned().ok_or_else(|| {
            MoverError::schema(&path, format!("no cached landmarks for frame {frame_index}"))
        })
    }
}

// ---- frame access -----------------------------------------------------------

/// Frame image files of a directory video, sorted by frame index.
pub fn list_frame_files(dir: &Path) -> Result<Vec<(usize, PathBuf)>> {
    let mut frames: Vec<(usize, PathBuf)> = Vec::new();
    let mut unnumbered: Vec<PathBuf> = Vec::new();
    for child in sorted_children(dir)? {
        if !(child.is_file() && has_ext(&child, &FRAME_EXTS)) {
            continue;
        }
        let stem = child
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default();
        match stem.rsplit('_').next().and_then(|t| t.parse::<usize>().ok()) {
            Some(idx) => frames.push((idx, child)),
            None => unnumbered.push(child),
        }
    }
    if frames.is_empty() {
        frames = unnumbered.into_iter().enumerate().collect();
    }
    frames.sort();
    if frames.is_empty() {
        return Err(MoverError::Media {
            path: dir.to_path_buf(),
            reason: "no frame images found".into(),
        });
    }
    Ok(frames)
}

/// Frame indices fed to the models: the manifest's explicit list when
/// present, otherwise `target` uniformly spaced indices (cycling when the
/// video is shorter than `target`).
pub fn sample_indices(available: usize, explicit: Option<&[usize]>, target: usize) -> Vec<usize> {
    if let Some(list) = explicit {
        return list.to_vec();
    }
    if available == 0 {
        return Vec::new();
    }
    if available < target {
        (0..target).map(|k| k % available).collect()
    } else {
        (0..target)
            .map(|k| k * available / target)
            .collect()
    }
}

/// Loads the sampled aligned faces of a video entry. 224x224 frames are used
/// as-is; other sizes are aligned via cached landmarks in frame coordinates.
pub fn load_faces<T: Scalar>(entry: &VideoEntry, target: usize) -> Result<Vec<FaceImage<T>>> {
    if entry.path.is_file() {
        return Err(MoverError::Media {
            path: entry.path.clone(),
            reason: "decoding container video files is not supported; use frame directories"
                .into(),
        });
    }
    let frames = list_frame_files(&entry.path)?;
    let picks = sample_indices(frames.len(), entry.frame_indices.as_deref(), target);
    let mut out = Vec::with_capacity(picks.len());
    for pos in picks {
        let (frame_index, path) = frames.get(pos).ok_or_else(|| MoverError::Media {
            path: entry.path.clone(),
            reason: format!("frame position {pos} out of range ({} frames)", frames.len()),
        })?;
        match FaceImage::<T>::load_png(path, *frame_index, &entry.video_id) {
            Ok(face) => out.push(face),
            Err(MoverError::Shape { .. }) => {
                let img = image::open(path).map_err(|e| MoverError::Media {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
                let rgb = img.to_rgb8();
                let (w, h) = (rgb.width() as usize, rgb.height() as usize);
                let mut raw: Array3<T> = Array3::zeros((h, w, 3));
                for (x, y, p) in rgb.enumerate_pixels() {
                    for c in 0..3 {
                        raw[(y as usize, x as usize, c)] = T::of_f64(p.0[c] as f64 / 255.0);
                    }
                }
                let lm = CacheProvider.landmarks(entry, *frame_index)?;
                let (face, _, _) =
                    extract_aligned_face(&raw, &lm, *frame_index, &entry.video_id)?;
                out.push(face);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
