//! Translation, amplitude and phase boxplots and the combined outlier
//! report.
//!
//! The amplitude and phase boxplots share one construction in a linear
//! space with an L² metric: the amplitude space of aligned SRSFs, and the
//! tangent space of the SRT sphere at the phase median. The translation
//! boxplot is the classical Tukey boxplot of a scalar.

mod report;

use serde::{Deserialize, Serialize};

pub use report::{
    full_report, AnalysisConfig, OutlierReport, ReportCurves, SampleVerdict, TranslationStatistic,
    CSV_HEADER,
};

use crate::error::{Error, Result};
use crate::fda::{
    exp_map, grid, inv_exp_map, karcher_median_phase, to_srt, AlignedSample, SrtPoint,
    TangentVector,
};

/// Default whisker length in IQR units.
pub const WHISKER_FACTOR: f64 = 1.5;

/// Default weight of the spread term in the quartile objective.
pub const LAMBDA: f64 = 0.5;

/// Smallest sample a boxplot accepts.
pub const MIN_SAMPLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Translation,
    Amplitude,
    Phase,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Translation, Component::Amplitude, Component::Phase];

    pub fn name(self) -> &'static str {
        match self {
            Component::Translation => "translation",
            Component::Amplitude => "amplitude",
            Component::Phase => "phase",
        }
    }
}

/// Boxplot construction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxplotOptions {
    pub lambda: f64,
    pub whisker_factor: f64,
    /// Use the smaller of the two extreme distances as the threshold.
    pub conservative: bool,
}

impl Default for BoxplotOptions {
    fn default() -> Self {
        Self {
            lambda: LAMBDA,
            whisker_factor: WHISKER_FACTOR,
            conservative: false,
        }
    }
}

impl BoxplotOptions {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::config("lambda", format!("must lie in [0, 1], got {}", self.lambda)));
        }
        if !(self.whisker_factor > 0.0 && self.whisker_factor.is_finite()) {
            return Err(Error::config(
                "whisker_factor",
                format!("must be positive, got {}", self.whisker_factor),
            ));
        }
        Ok(())
    }
}

/// A boxplot in one component space.
///
/// `median`, `q1`, `q3`, `whisker1` and `whisker3` are elements of the
/// component space: one-element vectors for translation, SRSFs for
/// amplitude and SRT points for phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentBoxplot {
    pub component: Component,
    pub median: Vec<f64>,
    pub q1: Vec<f64>,
    pub q3: Vec<f64>,
    pub whisker1: Vec<f64>,
    pub whisker3: Vec<f64>,
    /// Whether each whisker end is the SRT of a warping.
    pub whiskers_in_orthant: [bool; 2],
    pub q1_index: Option<usize>,
    pub q3_index: Option<usize>,
    pub extreme1: Option<usize>,
    pub extreme3: Option<usize>,
    /// Indices of the central region, nearest first.
    pub central: Vec<usize>,
    pub iqr: f64,
    pub lambda: f64,
    pub whisker_factor: f64,
    pub conservative: bool,
    /// Per sample: the translation scalar, or the distance to the median.
    pub values: Vec<f64>,
    /// Samples with `values[i] > threshold` are outliers.
    pub threshold: f64,
    /// Translation only: samples with `values[i] < lower_threshold` are
    /// outliers too.
    pub lower_threshold: Option<f64>,
}

impl ComponentBoxplot {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Outlier flags of a boxplot.
pub fn classify(b: &ComponentBoxplot) -> Vec<bool> {
    b.values
        .iter()
        .map(|&v| v > b.threshold || b.lower_threshold.is_some_and(|lo| v < lo))
        .collect()
}

fn check_n(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSample { needed: MIN_SAMPLES, got: n });
    }
    Ok(())
}

/// Quartiles, whiskers and extremes of `elems` around `center`.
struct Functional {
    q1_index: usize,
    q3_index: usize,
    whisker1: Vec<f64>,
    whisker3: Vec<f64>,
    extreme1: Option<usize>,
    extreme3: Option<usize>,
    central: Vec<usize>,
    iqr: f64,
    threshold: f64,
}

fn unit(v: &[f64], center: &[f64], d: f64) -> Vec<f64> {
    if d > 0.0 {
        v.iter().zip(center).map(|(a, b)| (a - b) / d).collect()
    } else {
        vec![0.0; v.len()]
    }
}

/// Order of the samples by distance, ties broken by index.
fn depth_order(dist: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    order
}

/// Best `(Q1, Q3)` pair of the central region under the quartile
/// objective, by exhaustive search over ordered pairs.
pub fn select_quartiles(
    elems: &[Vec<f64>],
    center: &[f64],
    dist: &[f64],
    central: &[usize],
    lambda: f64,
) -> (usize, usize) {
    let dmax = central.iter().map(|&i| dist[i]).fold(0.0, f64::max);
    let units: Vec<Vec<f64>> = central.iter().map(|&i| unit(&elems[i], center, dist[i])).collect();
    let mut best = (f64::NEG_INFINITY, central[0], central[central.len().min(2) - 1]);
    for (a, &ia) in central.iter().enumerate() {
        for (b, &ib) in central.iter().enumerate() {
            if a == b {
                continue;
            }
            let spread = if dmax > 0.0 { (dist[ia] + dist[ib]) / dmax } else { 0.0 };
            let cos = grid::inner(&units[a], &units[b]);
            let score = lambda * spread - (1.0 - lambda) * (cos + 1.0);
            if score > best.0 {
                best = (score, ia, ib);
            }
        }
    }
    (best.1, best.2)
}

fn functional_boxplot(elems: &[Vec<f64>], center: &[f64], dist: &[f64], opts: &BoxplotOptions) -> Functional {
    let n = elems.len();
    let order = depth_order(dist);
    let central: Vec<usize> = order[..n / 2].to_vec();
    let (q1, q3) = select_quartiles(elems, center, dist, &central, opts.lambda);
    let iqr = dist[q1] + dist[q3];
    let whisker = |q: usize| -> Vec<f64> {
        let u = unit(&elems[q], center, dist[q]);
        elems[q]
            .iter()
            .zip(&u)
            .map(|(e, u)| e + opts.whisker_factor * iqr * u)
            .collect()
    };
    let (w1, w3) = (whisker(q1), whisker(q3));
    let r1 = grid::distance(&w1, center);
    let r3 = grid::distance(&w3, center);
    let reach = r1.max(r3);
    let in_center: Vec<bool> = {
        let mut v = vec![false; n];
        central.iter().for_each(|&i| v[i] = true);
        v
    };
    let candidates: Vec<usize> = (0..n).filter(|&i| !in_center[i] && dist[i] <= reach).collect();
    let nearest = |w: &[f64]| -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for &i in &candidates {
            let d = grid::distance(&elems[i], w);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, i));
            }
        }
        best.map(|(_, i)| i)
    };
    let (e1, e3) = (nearest(&w1), nearest(&w3));
    let side1 = e1.map_or(r1, |i| dist[i]);
    let side3 = e3.map_or(r3, |i| dist[i]);
    let threshold = if opts.conservative { side1.min(side3) } else { side1.max(side3) };
    Functional {
        q1_index: q1,
        q3_index: q3,
        whisker1: w1,
        whisker3: w3,
        extreme1: e1,
        extreme3: e3,
        central,
        iqr,
        threshold,
    }
}

/// Boxplot of the aligned SRSFs around the amplitude median.
pub fn amplitude_boxplot(aligned: &AlignedSample, opts: &BoxplotOptions) -> Result<ComponentBoxplot> {
    check_n(aligned.len())?;
    opts.validate()?;
    let elems: Vec<Vec<f64>> = aligned.aligned_srsfs.iter().map(|q| q.values().to_vec()).collect();
    let center = aligned.median_srsf.values().to_vec();
    let dist: Vec<f64> = elems.iter().map(|e| grid::distance(e, &center)).collect();
    let f = functional_boxplot(&elems, &center, &dist, opts);
    Ok(ComponentBoxplot {
        component: Component::Amplitude,
        q1: elems[f.q1_index].clone(),
        q3: elems[f.q3_index].clone(),
        median: center,
        whisker1: f.whisker1,
        whisker3: f.whisker3,
        whiskers_in_orthant: [true, true],
        q1_index: Some(f.q1_index),
        q3_index: Some(f.q3_index),
        extreme1: f.extreme1,
        extreme3: f.extreme3,
        central: f.central,
        iqr: f.iqr,
        lambda: opts.lambda,
        whisker_factor: opts.whisker_factor,
        conservative: opts.conservative,
        values: dist,
        threshold: f.threshold,
        lower_threshold: None,
    })
}

/// Boxplot of the optimal warps, built in the tangent space at their
/// Karcher median and mapped back to the sphere.
pub fn phase_boxplot(aligned: &AlignedSample, opts: &BoxplotOptions) -> Result<ComponentBoxplot> {
    check_n(aligned.len())?;
    opts.validate()?;
    let srts = aligned.warpings.iter().map(to_srt).collect::<Result<Vec<_>>>()?;
    phase_boxplot_of(&srts, opts)
}

/// [`phase_boxplot`] on SRT points directly.
pub fn phase_boxplot_of(srts: &[SrtPoint], opts: &BoxplotOptions) -> Result<ComponentBoxplot> {
    check_n(srts.len())?;
    opts.validate()?;
    let median = karcher_median_phase(srts)?.median;
    let mut elems = Vec::with_capacity(srts.len());
    for (i, p) in srts.iter().enumerate() {
        let v = inv_exp_map(&median, p)?;
        let d = v.norm();
        if d >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::Domain(format!(
                "warp {i} lies {d:.4} from the phase median; the phase boxplot needs every warp within π/2"
            )));
        }
        elems.push(v.values().to_vec());
    }
    let n = median.grid_size();
    let zero = vec![0.0; n];
    let dist: Vec<f64> = elems.iter().map(|e| grid::norm(e)).collect();
    let f = functional_boxplot(&elems, &zero, &dist, opts);
    let back = |v: &[f64]| -> Result<(Vec<f64>, bool)> {
        let t = TangentVector::projected(v.to_vec(), median.clone())?;
        let img = exp_map(&median, &t)?;
        Ok((img.values, img.in_orthant))
    };
    let (w1, in1) = back(&f.whisker1)?;
    let (w3, in3) = back(&f.whisker3)?;
    Ok(ComponentBoxplot {
        component: Component::Phase,
        median: median.values().to_vec(),
        q1: srts[f.q1_index].values().to_vec(),
        q3: srts[f.q3_index].values().to_vec(),
        whisker1: w1,
        whisker3: w3,
        whiskers_in_orthant: [in1, in3],
        q1_index: Some(f.q1_index),
        q3_index: Some(f.q3_index),
        extreme1: f.extreme1,
        extreme3: f.extreme3,
        central: f.central,
        iqr: f.iqr,
        lambda: opts.lambda,
        whisker_factor: opts.whisker_factor,
        conservative: opts.conservative,
        values: dist,
        threshold: f.threshold,
        lower_threshold: None,
    })
}

/// Sample quantile by linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Tukey boxplot of scalar translations.
pub fn translation_boxplot(values: &[f64], whisker_factor: f64) -> Result<ComponentBoxplot> {
    check_n(values.len())?;
    let opts = BoxplotOptions { whisker_factor, ..Default::default() };
    opts.validate()?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (q1, med, q3) = (quantile(&sorted, 0.25), quantile(&sorted, 0.5), quantile(&sorted, 0.75));
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - whisker_factor * iqr, q3 + whisker_factor * iqr);
    let dist: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    let order = depth_order(&dist);
    let inside = |i: &usize| values[*i] >= lo && values[*i] <= hi;
    let extreme1 = (0..values.len()).filter(inside).min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let extreme3 = (0..values.len()).filter(inside).max_by(|&a, &b| values[a].total_cmp(&values[b]).then(b.cmp(&a)));
    Ok(ComponentBoxplot {
        component: Component::Translation,
        median: vec![med],
        q1: vec![q1],
        q3: vec![q3],
        whisker1: vec![lo],
        whisker3: vec![hi],
        whiskers_in_orthant: [true, true],
        q1_index: None,
        q3_index: None,
        extreme1,
        extreme3,
        central: order[..values.len() / 2].to_vec(),
        iqr,
        lambda: opts.lambda,
        whisker_factor,
        conservative: false,
        values: values.to_vec(),
        threshold: hi,
        lower_threshold: Some(lo),
    })
}
