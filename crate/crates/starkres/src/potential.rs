//! Real, bounded, compactly supported potentials.
//!
//! Two shapes cover everything the solver needs: piecewise-constant steps
//! (the analytically tractable corpus) and uniformly sampled profiles with
//! linear interpolation. Both vanish identically outside `[-L, L]`, and the
//! half-width `L` is tightened to the support of the nonzero content at
//! construction time (a caller-supplied `L` can only enlarge it).

use std::fmt;

/// One constant step `v` on the half-open interval `[x_lo, x_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x_lo: f64,
    pub x_hi: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    /// Sorted, pairwise disjoint steps. Gaps between steps are zero.
    Steps(Vec<Segment>),
    /// Uniform grid `x0 + i*dx`, linearly interpolated between nodes,
    /// zero outside the grid.
    Sampled { x0: f64, dx: f64, values: Vec<f64> },
}

/// A real potential supported in `[-L, L]`.
///
/// Immutable after construction; evaluation is exact zero outside the
/// support interval, so integrators may treat the exterior analytically.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    profile: Profile,
    half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialError {
    /// The document is not syntactically a potential description.
    Parse(String),
    /// Syntactically fine, but the described potential is invalid
    /// (overlapping segments, non-finite values, bad grid, ...).
    Domain(String),
}

impl fmt::Display for PotentialError {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialError::Parse(msg) => write!(fm, "potential parse error: {msg}"),
            PotentialError::Domain(msg) => write!(fm, "potential domain error: {msg}"),
        }
    }
}

impl std::error::Error for PotentialError {}

impl Potential {
    /// The zero potential with the conventional unit half-width.
    pub fn zero() -> Self {
        Potential {
            profile: Profile::Steps(Vec::new()),
            half_width: 1.0,
        }
    }

    /// Single step of (signed) height `v0` on `(-a, a)`.
    pub fn square_well(v0: f64, a: f64) -> Self {
        Potential::from_segments(
            vec![Segment {
                x_lo: -a,
                x_hi: a,
                v: v0,
            }],
            None,
        )
        .expect("square well construction")
    }

    /// Identical to [`square_well`](Self::square_well); spelled separately so
    /// call sites read correctly for repulsive steps.
    pub fn square_barrier(v0: f64, a: f64) -> Self {
        Potential::square_well(v0, a)
    }

    /// Two steps of height `v0` and width `a`, separated by a `gap` of zero
    /// potential centred at the origin.
    pub fn double_bump(v0: f64, a: f64, gap: f64) -> Self {
        Potential::from_segments(
            vec![
                Segment {
                    x_lo: -(gap / 2.0 + a),
                    x_hi: -gap / 2.0,
                    v: v0,
                },
                Segment {
                    x_lo: gap / 2.0,
                    x_hi: gap / 2.0 + a,
                    v: v0,
                },
            ],
            None,
        )
        .expect("double bump construction")
    }

    /// Like [`double_bump`](Self::double_bump) but with independent step
    /// heights. A mirror-symmetric pair of bumps has perfectly transmitting
    /// cavity modes, pinning every reflection zero to the real axis; breaking
    /// the symmetry is what pushes them into the open lower sector, so this
    /// is the shape to use when a genuinely complex reflection zero is
    /// wanted.
    pub fn double_bump_uneven(v_left: f64, v_right: f64, a: f64, gap: f64) -> Self {
        Potential::from_segments(
            vec![
                Segment {
                    x_lo: -(gap / 2.0 + a),
                    x_hi: -gap / 2.0,
                    v: v_left,
                },
                Segment {
                    x_lo: gap / 2.0,
                    x_hi: gap / 2.0 + a,
                    v: v_right,
                },
            ],
            None,
        )
        .expect("uneven double bump construction")
    }

    /// Build a piecewise-constant potential. Segments may arrive unsorted;
    /// they must be disjoint (touching endpoints are fine). `user_l`, when
    /// given, can only enlarge the computed support half-width.
    pub fn from_segments(
        mut segments: Vec<Segment>,
        user_l: Option<f64>,
    ) -> Result<Self, PotentialError> {
        for s in &segments {
            if !(s.x_lo.is_finite() && s.x_hi.is_finite() && s.v.is_finite()) {
                return Err(PotentialError::Domain(format!(
                    "non-finite segment ({}, {}, {})",
                    s.x_lo, s.x_hi, s.v
                )));
            }
            if s.x_lo >= s.x_hi {
                return Err(PotentialError::Domain(format!(
                    "segment [{}, {}] has non-positive length",
                    s.x_lo, s.x_hi
                )));
            }
        }
        segments.sort_by(|a, b| a.x_lo.total_cmp(&b.x_lo));
        for pair in segments.windows(2) {
            if pair[1].x_lo < pair[0].x_hi {
                return Err(PotentialError::Domain(format!(
                    "segments [{}, {}] and [{}, {}] overlap",
                    pair[0].x_lo, pair[0].x_hi, pair[1].x_lo, pair[1].x_hi
                )));
            }
        }
        // Smallest half-width covering the nonzero steps.
        let mut content: f64 = 0.0;
        for s in &segments {
            if s.v != 0.0 {
                content = content.max(s.x_lo.abs()).max(s.x_hi.abs());
            }
        }
        let half_width = resolve_half_width(content, user_l)?;
        Ok(Potential {
            profile: Profile::Steps(segments),
            half_width,
        })
    }

    /// Build a sampled potential on the uniform grid `x0 + i*dx`.
    pub fn from_samples(
        x0: f64,
        dx: f64,
        values: Vec<f64>,
        user_l: Option<f64>,
    ) -> Result<Self, PotentialError> {
        if !x0.is_finite() || !dx.is_finite() || dx <= 0.0 {
            return Err(PotentialError::Domain(format!(
                "bad sample grid: x0 = {x0}, dx = {dx}"
            )));
        }
        if values.len() < 2 {
            return Err(PotentialError::Domain(
                "sampled potential needs at least two nodes".into(),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(PotentialError::Domain(format!("non-finite sample {bad}")));
        }
        // Nonzero content reaches one node beyond the outermost nonzero
        // sample (interpolation toward a zero neighbour is still nonzero),
        // clamped to the grid itself.
        let n = values.len();
        let mut content: f64 = 0.0;
        if let Some(first) = values.iter().position(|&v| v != 0.0) {
            let last = n - 1 - values.iter().rev().position(|&v| v != 0.0).unwrap();
            let lo = x0 + dx * (first.saturating_sub(1)) as f64;
            let hi = x0 + dx * ((last + 1).min(n - 1)) as f64;
            content = lo.abs().max(hi.abs());
        }
        let half_width = resolve_half_width(content, user_l)?;
        Ok(Potential {
            profile: Profile::Sampled { x0, dx, values },
            half_width,
        })
    }

    /// Parse the JSON potential description; see the crate docs for the
    /// accepted fields (`kind`, optional `L`, `segments` or `samples`).
    pub fn parse(document: &str) -> Result<Self, PotentialError> {
        let raw: RawPotential = serde_json::from_str(document)
            .map_err(|e| PotentialError::Parse(e.to_string()))?;
        if let Some(l) = raw.l {
            if !l.is_finite() || l <= 0.0 {
                return Err(PotentialError::Domain(format!("L must be positive, got {l}")));
            }
        }
        match raw.kind.as_str() {
            "piecewise_constant" => {
                if raw.samples.is_some() {
                    return Err(PotentialError::Parse(
                        "piecewise_constant potential must not carry samples".into(),
                    ));
                }
                let segments = raw
                    .segments
                    .unwrap_or_default()
                    .into_iter()
                    .map(|[x_lo, x_hi, v]| Segment { x_lo, x_hi, v })
                    .collect();
                Potential::from_segments(segments, raw.l)
            }
            "sampled" => {
                if raw.segments.is_some() {
                    return Err(PotentialError::Parse(
                        "sampled potential must not carry segments".into(),
                    ));
                }
                let s = raw.samples.ok_or_else(|| {
                    PotentialError::Parse("sampled potential needs a samples object".into())
                })?;
                Potential::from_samples(s.x0, s.dx, s.values, raw.l)
            }
            other => Err(PotentialError::Parse(format!(
                "unknown potential kind {other:?}"
            ))),
        }
    }

    /// Serialize back to the JSON document format accepted by [`parse`](Self::parse).
    pub fn to_json(&self) -> String {
        let doc = match &self.profile {
            Profile::Steps(segments) => serde_json::json!({
                "kind": "piecewise_constant",
                "L": self.half_width,
                "segments": segments
                    .iter()
                    .map(|s| [s.x_lo, s.x_hi, s.v])
                    .collect::<Vec<_>>(),
            }),
            Profile::Sampled { x0, dx, values } => serde_json::json!({
                "kind": "sampled",
                "L": self.half_width,
                "samples": { "x0": x0, "dx": dx, "values": values },
            }),
        };
        doc.to_string()
    }

    /// Support half-width `L`: the potential vanishes for `|x| >= L`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// `V(x)`; exactly zero outside `[-L, L]`.
    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() > self.half_width {
            return 0.0;
        }
        match &self.profile {
            Profile::Steps(segments) => {
                // Few segments in practice; a linear scan beats bookkeeping.
                for s in segments {
                    if x >= s.x_lo && x < s.x_hi {
                        return s.v;
                    }
                }
                0.0
            }
            Profile::Sampled { x0, dx, values } => {
                let n = values.len();
                let t = (x - x0) / dx;
                if t <= 0.0 || t >= (n - 1) as f64 {
                    // Outside the grid (or exactly at its ends, where the
                    // stored node value is what interpolation gives anyway).
                    if t == 0.0 {
                        return values[0];
                    }
                    if t == (n - 1) as f64 {
                        return values[n - 1];
                    }
                    return 0.0;
                }
                let i = t.floor() as usize;
                let frac = t - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    /// Points in `[-L, L]` where `V` is not smooth, plus the support
    /// endpoints themselves, sorted ascending. Integrators split their steps
    /// here so every step sees an analytic right-hand side.
    pub fn breakpoints(&self) -> Vec<f64> {
        let l = self.half_width;
        let mut pts = vec![-l, l];
        match &self.profile {
            Profile::Steps(segments) => {
                for s in segments {
                    pts.push(s.x_lo);
                    pts.push(s.x_hi);
                }
            }
            Profile::Sampled { x0, dx, values } => {
                for i in 0..values.len() {
                    pts.push(x0 + dx * i as f64);
                }
            }
        }
        pts.retain(|x| x.abs() <= l);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `max |V|` over the line.
    pub fn max_abs(&self) -> f64 {
        match &self.profile {
            Profile::Steps(segments) => segments.iter().fold(0.0, |m, s| m.max(s.v.abs())),
            Profile::Sampled { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// True when the potential is identically zero.
    pub fn is_zero(&self) -> bool {
        match &self.profile {
            Profile::Steps(segments) => segments.iter().all(|s| s.v == 0.0),
            Profile::Sampled { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// True for step profiles, where `V` is exactly constant between
    /// consecutive breakpoints (enables closed-form field-free propagation).
    pub fn is_piecewise_constant(&self) -> bool {
        matches!(self.profile, Profile::Steps(_))
    }
}

fn resolve_half_width(content: f64, user_l: Option<f64>) -> Result<f64, PotentialError> {
    let fallback = if content > 0.0 { content } else { 1.0 };
    let half_width = match user_l {
        Some(l) if l.is_finite() && l > 0.0 => l.max(content),
        Some(l) => {
            return Err(PotentialError::Domain(format!(
                "L must be positive and finite, got {l}"
            )))
        }
        None => fallback,
    };
    Ok(half_width)
}

#[derive(serde::Deserialize)]
struct RawPotential {
    kind: String,
    #[serde(rename = "L", default)]
    l: Option<f64>,
    #[serde(default)]
    segments: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    samples: Option<RawSamples>,
}

#[derive(serde::Deserialize)]
struct RawSamples {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
}
