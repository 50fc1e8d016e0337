//! Piecewise polynomial functions of time.
//!
//! Acceleration profiles are piecewise linear, so the speed and course-rate
//! trajectories obtained by integrating them are piecewise quadratic and the
//! course trajectory is piecewise cubic. Everything here is exact (up to
//! floating point) so trajectory evaluation needs no numeric integration.

/// Polynomial on one segment, coefficients in powers of `(t - seg_start)`,
/// constant term first.
type Coeffs = Vec<f64>;

/// A piecewise polynomial over a closed time span.
///
/// Evaluation outside the span extends the boundary values as constants, which
/// gives "hold the final value" semantics for free when a trajectory is
/// queried past its horizon.
#[derive(Debug, Clone)]
pub struct Piecewise {
    /// Segment boundaries; `breaks[i]..breaks[i+1]` is segment `i`.
    breaks: Vec<f64>,
    /// Per-segment coefficients in `(t - breaks[i])`.
    coeffs: Vec<Coeffs>,
}

impl Piecewise {
    /// Constant function on `[start, end]`.
    pub fn constant(start: f64, end: f64, value: f64) -> Self {
        assert!(end >= start, "empty span: [{start}, {end}]");
        Piecewise {
            breaks: vec![start, end],
            coeffs: vec![vec![value]],
        }
    }

    /// Piecewise-linear interpolation through `(time, value)` points.
    /// Times must be non-decreasing; zero-length pieces are dropped.
    pub fn linear_through(points: &[(f64, f64)]) -> Self {
        assert!(points.len() >= 2, "need at least two breakpoints");
        let mut breaks = vec![points[0].0];
        let mut coeffs = Vec::new();
        for pair in points.windows(2) {
            let (t0, v0) = pair[0];
            let (t1, v1) = pair[1];
            assert!(t1 >= t0, "breakpoint times must be non-decreasing");
            if t1 - t0 == 0.0 {
                continue;
            }
            coeffs.push(vec![v0, (v1 - v0) / (t1 - t0)]);
            breaks.push(t1);
        }
        assert!(!coeffs.is_empty(), "all breakpoints coincide");
        Piecewise { breaks, coeffs }
    }

    pub fn start(&self) -> f64 {
        self.breaks[0]
    }

    pub fn end(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    fn segment_index(&self, t: f64) -> usize {
        // Rightmost segment whose start is <= t; clamps to the span.
        if t <= self.start() {
            return 0;
        }
        if t >= self.end() {
            return self.coeffs.len() - 1;
        }
        let i = self.breaks.partition_point(|&b| b <= t);
        (i - 1).min(self.coeffs.len() - 1)
    }

    fn eval_segment(&self, i: usize, t: f64) -> f64 {
        let u = t - self.breaks[i];
        let mut acc = 0.0;
        for &c in self.coeffs[i].iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    /// Value at `t`, with constant extension outside the span.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.start(), self.end());
        let i = self.segment_index(t);
        self.eval_segment(i, t)
    }

    /// Derivative at `t`; zero outside the span (the extension is constant).
    pub fn deriv(&self, t: f64) -> f64 {
        if t < self.start() || t > self.end() {
            return 0.0;
        }
        let i = self.segment_index(t);
        let u = t - self.breaks[i];
        let mut acc = 0.0;
        for (k, &c) in self.coeffs[i].iter().enumerate().skip(1).rev() {
            acc = acc * u + c * k as f64;
        }
        acc
    }

    /// Antiderivative with value `initial` at the start of the span.
    pub fn integral(&self, initial: f64) -> Piecewise {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut running = initial;
        for (i, segment) in self.coeffs.iter().enumerate() {
            let mut anti = vec![running];
            for (k, &c) in segment.iter().enumerate() {
                anti.push(c / (k + 1) as f64);
            }
            let len = self.breaks[i + 1] - self.breaks[i];
            let mut acc = 0.0;
            for &c in anti.iter().rev() {
                acc = acc * len + c;
            }
            running = acc;
            coeffs.push(anti);
        }
        Piecewise {
            breaks: self.breaks.clone(),
            coeffs,
        }
    }

    /// Multiplies the function by `factor`.
    pub fn scale(&self, factor: f64) -> Piecewise {
        Piecewise {
            breaks: self.breaks.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|seg| seg.iter().map(|c| c * factor).collect())
                .collect(),
        }
    }

    /// Shifts the time axis by `dt` (a function of `t` becomes one of `t - dt`).
    pub fn shifted(&self, dt: f64) -> Piecewise {
        Piecewise {
            breaks: self.breaks.iter().map(|b| b + dt).collect(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// Pointwise sum over the union of both spans, each input extended as a
    /// constant outside its own span.
    pub fn add(&self, other: &Piecewise) -> Piecewise {
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .copied()
            .collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let mut coeffs = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let (s, e) = (w[0], w[1]);
            coeffs.push(add_coeffs(
                &self.segment_poly_at(s, e),
                &other.segment_poly_at(s, e),
            ));
        }
        Piecewise { breaks, coeffs }
    }

    /// Polynomial for `[s, e]` re-centered at `s`, honoring constant extension.
    fn segment_poly_at(&self, s: f64, e: f64) -> Coeffs {
        if e <= self.start() {
            return vec![self.eval(self.start())];
        }
        if s >= self.end() {
            return vec![self.eval(self.end())];
        }
        let i = self.segment_index(s.max(self.start()));
        recenter(&self.coeffs[i], s - self.breaks[i])
    }

    /// Pointwise `max(0, f)`; segments must be at most quadratic. Crossings are
    /// split exactly, so the result is still piecewise polynomial.
    pub fn clamp_min_zero(&self) -> Piecewise {
        let mut breaks = vec![self.start()];
        let mut coeffs = Vec::new();
        for (i, segment) in self.coeffs.iter().enumerate() {
            let (s, e) = (self.breaks[i], self.breaks[i + 1]);
            let len = e - s;
            let mut cuts = vec![0.0];
            for r in quadratic_roots(segment) {
                if r > 1e-12 && r < len - 1e-12 {
                    cuts.push(r);
                }
            }
            cuts.push(len);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b - a <= 0.0 {
                    continue;
                }
                let mid = 0.5 * (a + b);
                let piece = recenter(segment, a);
                let mut val = 0.0;
                for &c in piece.iter().rev() {
                    val = val * (mid - a) + c;
                }
                coeffs.push(if val < 0.0 { vec![0.0] } else { piece });
                breaks.push(s + b);
            }
        }
        Piecewise { breaks, coeffs }
    }

    /// Concatenates `other` after `self`. Spans must abut.
    pub fn append(mut self, other: &Piecewise) -> Piecewise {
        assert!(
            (other.start() - self.end()).abs() < 1e-9,
            "spans must abut: {} vs {}",
            self.end(),
            other.start()
        );
        let n = self.breaks.len();
        self.breaks.extend_from_slice(&other.breaks[1..]);
        // Reuse the exact end time so lookups never fall in a phantom gap.
        self.breaks[n - 1] = other.breaks[0];
        self.coeffs.extend_from_slice(&other.coeffs);
        self
    }
}

fn add_coeffs(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

/// Re-expresses a polynomial in `(u - du)` given coefficients in `u`.
fn recenter(coeffs: &Coeffs, du: f64) -> Coeffs {
    if du == 0.0 {
        return coeffs.clone();
    }
    // Horner-style Taylor shift: repeatedly evaluate and deflate.
    let mut work = coeffs.clone();
    let n = work.len();
    let mut out = vec![0.0; n];
    for item in out.iter_mut().take(n) {
        let mut acc = 0.0;
        for &c in work.iter().rev() {
            acc = acc * du + c;
        }
        *item = acc;
        // Deflate: divide (p(u) - p(du)) by (u - du) synthetically.
        let mut new_work = vec![0.0; work.len().saturating_sub(1)];
        let mut carry = 0.0;
        for (k, &c) in work.iter().enumerate().rev().take_while(|(k, _)| *k >= 1) {
            carry = carry * du + c;
            new_work[k - 1] = carry;
        }
        work = new_work;
        if work.is_empty() {
            break;
        }
    }
    out
}

/// Real roots in local coordinates for constant/linear/quadratic coefficients.
fn quadratic_roots(coeffs: &Coeffs) -> Vec<f64> {
    let c = *coeffs.first().unwrap_or(&0.0);
    let b = *coeffs.get(1).unwrap_or(&0.0);
    let a = *coeffs.get(2).unwrap_or(&0.0);
    assert!(
        coeffs.iter().skip(3).all(|&h| h == 0.0),
        "clamp only supports segments up to quadratic"
    );
    if a == 0.0 {
        if b == 0.0 {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    // Numerically stable split: avoid cancellation in the smaller root.
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}
