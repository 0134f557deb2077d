//! Pair-cost evaluation: Euclidean arc length, axis-weighted metrics (with
//! optional wraparound axes), and line-integral costs along straight
//! segments.
//!
//! Line-integral costs are not metrics (no triangle inequality) but are
//! bounded by `f_lower * |uv| <= Cost(u,v) <= f_upper * |uv|`, which is what
//! the planners rely on when converting cost radii to Euclidean candidate
//! radii. Piecewise-constant box fields are integrated exactly by splitting
//! the segment at region boundaries; smooth fields go through quadrature.

use crate::error::{Error, Result};
use crate::geometry::{self, Aabb, Point};
use crate::rng::Seed;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// How `Cost(u,v)` is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CostModel {
    Euclidean,
    /// `sqrt(sum_i (w_i d_i)^2)` where `d_i` is the plain or wrapped
    /// coordinate difference. Wrapped axes use `min(|d|, 1-|d|)`.
    Weighted { weights: Vec<f64>, wrap: Vec<bool> },
    /// Integral of a positive field along the straight segment.
    Field {
        field: FieldSpec,
        f_lower: f64,
        f_upper: f64,
        #[serde(default)]
        quadrature: QuadratureRule,
    },
}

/// Built-in cost fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum FieldSpec {
    Constant { value: f64 },
    /// `base` everywhere except inside a region box, where the value is
    /// `base * factor`. Regions are assumed interior-disjoint.
    BoxRegions { base: f64, regions: Vec<CostRegion> },
    /// `clamp(scale / (eps + |x - center|), lo, hi)`: cost grows toward the
    /// center.
    Radial {
        center: Point,
        scale: f64,
        eps: f64,
        lo: f64,
        hi: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRegion {
    pub min: Point,
    pub max: Point,
    pub factor: f64,
}

impl CostRegion {
    fn aabb(&self) -> Aabb {
        Aabb {
            min: self.min.clone(),
            max: self.max.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QuadratureRule {
    /// Composite 5-point Gauss-Legendre using roughly `points` evaluations.
    FixedGauss { points: usize },
    AdaptiveSimpson { tolerance: f64 },
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::AdaptiveSimpson { tolerance: 1e-8 }
    }
}

impl FieldSpec {
    /// Field value at a point. Errors if the value escapes declared bounds.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            FieldSpec::Constant { value } => *value,
            FieldSpec::BoxRegions { base, regions } => {
                for r in regions {
                    if r.aabb().contains(x) {
                        return base * r.factor;
                    }
                }
                *base
            }
            FieldSpec::Radial {
                center,
                scale,
                eps,
                lo,
                hi,
            } => (scale / (eps + geometry::dist(x, center))).clamp(*lo, *hi),
        }
    }
}

impl CostModel {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            CostModel::Euclidean => Ok(()),
            CostModel::Weighted { weights, wrap } => {
                if weights.len() != dim || wrap.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: weights.len(),
                    });
                }
                if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
                    return Err(Error::InvalidSpec("metric weights must be positive".into()));
                }
                Ok(())
            }
            CostModel::Field {
                f_lower, f_upper, quadrature, ..
            } => {
                if !(0.0 < *f_lower && *f_lower <= *f_upper && f_upper.is_finite()) {
                    return Err(Error::InvalidSpec(format!(
                        "field bounds must satisfy 0 < lower <= upper, got [{f_lower}, {f_upper}]"
                    )));
                }
                if let QuadratureRule::AdaptiveSimpson { tolerance } = quadrature {
                    if *tolerance <= 0.0 {
                        return Err(Error::InvalidSpec("quadrature tolerance must be positive".into()));
                    }
                }
                Ok(())
            }
        }
    }

    /// The factor by which a planner must inflate its connection radius so
    /// cost balls contain their Euclidean counterparts: `f_upper` for field
    /// costs, 1 otherwise. A knob because the safe practical choice is
    /// debatable; callers may use `f_upper / f_lower` instead.
    pub fn radius_inflation(&self) -> f64 {
        match self {
            CostModel::Field { f_upper, .. } => *f_upper,
            _ => 1.0,
        }
    }

    /// Smallest possible cost-per-unit-length; converts a cost radius into a
    /// Euclidean candidate radius (`cost < r` implies `|uv| < r / lower`).
    pub fn unit_length_lower_bound(&self) -> f64 {
        match self {
            CostModel::Euclidean => 1.0,
            CostModel::Weighted { weights, .. } => {
                weights.iter().cloned().fold(f64::INFINITY, f64::min)
            }
            CostModel::Field { f_lower, .. } => *f_lower,
        }
    }

    pub fn has_wrap(&self) -> bool {
        matches!(self, CostModel::Weighted { wrap, .. } if wrap.iter().any(|&w| w))
    }
}

/// Cost of the straight line joining `u` and `v`. Zero for `u == v`,
/// symmetric in its arguments, well-defined regardless of collisions.
pub fn pair_cost(model: &CostModel, u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    match model {
        CostModel::Euclidean => Ok(geometry::dist(u, v)),
        CostModel::Weighted { weights, wrap } => {
            let mut sq = 0.0;
            for i in 0..u.len() {
                let mut d = (u[i] - v[i]).abs();
                if wrap[i] {
                    d = d.min(1.0 - d);
                }
                let wd = weights[i] * d;
                sq += wd * wd;
            }
            Ok(sq.sqrt())
        }
        CostModel::Field {
            field,
            f_lower,
            f_upper,
            quadrature,
        } => {
            let len = geometry::dist(u, v);
            if len == 0.0 {
                return Ok(0.0);
            }
            let eval = |t: f64| -> Result<f64> {
                let x: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + t * (b - a)).collect();
                let val = field.value(&x);
                if val < *f_lower - 1e-9 || val > *f_upper + 1e-9 {
                    return Err(Error::FieldOutOfBounds {
                        value: val,
                        lower: *f_lower,
                        upper: *f_upper,
                    });
                }
                Ok(val)
            };
            let integral = match field {
                // piecewise-constant: split exactly at region boundaries
                FieldSpec::Constant { .. } | FieldSpec::BoxRegions { .. } => {
                    let regions: &[CostRegion] = match field {
                        FieldSpec::BoxRegions { regions, .. } => regions,
                        _ => &[],
                    };
                    let mut cuts = vec![0.0, 1.0];
                    for r in regions {
                        let (t0, t1) = segment_box_interval(u, v, &r.aabb());
                        if t0 < t1 {
                            cuts.push(t0.max(0.0));
                            cuts.push(t1.min(1.0));
                        }
                    }
                    cuts.sort_by(f64::total_cmp);
                    cuts.dedup();
                    let mut total = 0.0;
                    for w in cuts.windows(2) {
                        let mid = 0.5 * (w[0] + w[1]);
                        total += eval(mid)? * (w[1] - w[0]);
                    }
                    total
                }
                FieldSpec::Radial { .. } => integrate_unit(&eval, *quadrature)?,
            };
            Ok(integral * len)
        }
    }
}

/// Parameter interval where the segment `uv` lies inside the box, or an
/// empty interval. Unclamped, so callers can clip to `[0,1]` themselves.
fn segment_box_interval(u: &[f64], v: &[f64], b: &Aabb) -> (f64, f64) {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for i in 0..u.len() {
        let d = v[i] - u[i];
        if d.abs() < geometry::SLAB_TOL {
            if u[i] < b.min[i] || u[i] > b.max[i] {
                return (1.0, 0.0);
            }
        } else {
            let mut a = (b.min[i] - u[i]) / d;
            let mut z = (b.max[i] - u[i]) / d;
            if a > z {
                std::mem::swap(&mut a, &mut z);
            }
            t0 = t0.max(a);
            t1 = t1.min(z);
            if t0 >= t1 {
                return (1.0, 0.0);
            }
        }
    }
    (t0, t1)
}

/// Integrate `f` over `[0,1]` with the chosen rule.
pub fn integrate_unit(
    f: &dyn Fn(f64) -> Result<f64>,
    rule: QuadratureRule,
) -> Result<f64> {
    match rule {
        QuadratureRule::FixedGauss { points } => {
            // 5-point Gauss-Legendre nodes/weights on [-1, 1]
            const X: [f64; 5] = [
                -0.906179845938664,
                -0.538469310105683,
                0.0,
                0.538469310105683,
                0.906179845938664,
            ];
            const W: [f64; 5] = [
                0.236926885056189,
                0.478628670499366,
                0.568888888888889,
                0.478628670499366,
                0.236926885056189,
            ];
            let pieces = points.div_ceil(5).max(1);
            let h = 1.0 / pieces as f64;
            let mut total = 0.0;
            for p in 0..pieces {
                let a = p as f64 * h;
                for (x, w) in X.iter().zip(&W) {
                    let t = a + 0.5 * h * (x + 1.0);
                    total += w * f(t)? * 0.5 * h;
                }
            }
            Ok(total)
        }
        QuadratureRule::AdaptiveSimpson { tolerance } => {
            fn simpson(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
                let _ = f;
                (b - a) / 6.0 * (fa + 4.0 * fm + fb)
            }
            fn recurse(
                f: &dyn Fn(f64) -> Result<f64>,
                a: f64,
                b: f64,
                fa: f64,
                fm: f64,
                fb: f64,
                whole: f64,
                tol: f64,
                depth: u32,
            ) -> Result<f64> {
                let m = 0.5 * (a + b);
                let lm = 0.5 * (a + m);
                let rm = 0.5 * (m + b);
                let flm = f(lm)?;
                let frm = f(rm)?;
                let left = simpson(f, a, m, fa, flm, fm);
                let right = simpson(f, m, b, fm, frm, fb);
                let err = left + right - whole;
                if depth == 0 || err.abs() <= 15.0 * tol {
                    Ok(left + right + err / 15.0)
                } else {
                    Ok(recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
                        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
                }
            }
            let fa = f(0.0)?;
            let fm = f(0.5)?;
            let fb = f(1.0)?;
            let whole = simpson(f, 0.0, 1.0, fa, fm, fb);
            recurse(f, 0.0, 1.0, fa, fm, fb, whole, tolerance, 40)
        }
    }
}

/// Lebesgue measure of the unit cost-ball `{x : dist(0, x) < 1}`.
///
/// Closed form for axis-weighted metrics; Monte Carlo when wraparound makes
/// the ball shape awkward. Line-integral models have no cost ball (radius
/// scaling is handled by `radius_inflation` instead).
pub fn metric_ball_volume(model: &CostModel, d: usize) -> Result<f64> {
    match model {
        CostModel::Euclidean => Ok(geometry::unit_ball_volume(d)),
        CostModel::Weighted { weights, wrap } => {
            if weights.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: weights.len(),
                });
            }
            if !wrap.iter().any(|&w| w) {
                let scale: f64 = weights.iter().product();
                return Ok(geometry::unit_ball_volume(d) / scale);
            }
            // torus chart: wrapped axes live on [-1/2, 1/2), others on the
            // ball's axis extent [-1/w, 1/w]
            let spans: Vec<f64> = weights
                .iter()
                .zip(wrap)
                .map(|(w, &wr)| if wr { 0.5 } else { 1.0 / w })
                .collect();
            let domain: f64 = spans.iter().map(|s| 2.0 * s).product();
            let mut rng = Seed::new(0).with_stream(crate::rng::streams::MEASURE).rng();
            let samples = 2_000_000;
            let origin = vec![0.0; d];
            let mut x = vec![0.0; d];
            let mut hits = 0u64;
            for _ in 0..samples {
                for (c, s) in x.iter_mut().zip(&spans) {
                    *c = (rng.random::<f64>() * 2.0 - 1.0) * s;
                }
                if pair_cost(model, &origin, &x)? < 1.0 {
                    hits += 1;
                }
            }
            Ok(domain * hits as f64 / samples as f64)
        }
        CostModel::Field { .. } => Err(Error::Unsupported(
            "line-integral models have no metric ball; scale the radius by f_upper".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn euclid() -> CostModel {
        CostModel::Euclidean
    }

    #[test]
    fn three_four_five() {
        let c = pair_cost(&euclid(), &[0.0, 0.0], &[0.6, 0.8]).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_field_scales_length() {
        let model = CostModel::Field {
            field: FieldSpec::Constant { value: 2.0 },
            f_lower: 2.0,
            f_upper: 2.0,
            quadrature: QuadratureRule::default(),
        };
        let c = pair_cost(&model, &[0.2, 0.5], &[0.7, 0.5]).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn linear_field_integrates_to_half() {
        // f(x) = x_1 along (0,0) -> (1,0): integral 1/2
        let f = |t: f64| -> Result<f64> { Ok(t) };
        let got = integrate_unit(&f, QuadratureRule::default()).unwrap();
        assert!((got - 0.5).abs() < 1e-9);
        let gauss = integrate_unit(&f, QuadratureRule::FixedGauss { points: 10 }).unwrap();
        assert!((gauss - 0.5).abs() < 1e-12);
    }

    #[test]
    fn box_region_split_is_exact() {
        let model = CostModel::Field {
            field: FieldSpec::BoxRegions {
                base: 1.0,
                regions: vec![CostRegion {
                    min: Point(vec![0.4, 0.0]),
                    max: Point(vec![0.6, 1.0]),
                    factor: 3.0,
                }],
            },
            f_lower: 1.0,
            f_upper: 3.0,
            quadrature: QuadratureRule::default(),
        };
        // horizontal unit segment: 0.8 outside + 0.2 inside at 3x
        let c = pair_cost(&model, &[0.0, 0.5], &[1.0, 0.5]).unwrap();
        assert!((c - (0.8 + 0.6)).abs() < 1e-12, "c = {c}");
    }

    #[test]
    fn field_bound_violation_is_detected() {
        let model = CostModel::Field {
            field: FieldSpec::Constant { value: 5.0 },
            f_lower: 1.0,
            f_upper: 2.0,
            quadrature: QuadratureRule::default(),
        };
        assert!(matches!(
            pair_cost(&model, &[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::FieldOutOfBounds { .. })
        ));
    }

    #[test]
    fn weighted_metric_with_wrap() {
        let model = CostModel::Weighted {
            weights: vec![1.0, 1.0],
            wrap: vec![false, true],
        };
        // wrapped axis: 0.9 apart is really 0.1 apart
        let c = pair_cost(&model, &[0.5, 0.05], &[0.5, 0.95]).unwrap();
        assert!((c - 0.1).abs() < 1e-12);
    }

    #[test]
    fn metric_ball_volumes() {
        assert!((metric_ball_volume(&euclid(), 2).unwrap() - std::f64::consts::PI).abs() < 1e-12);
        let w21 = CostModel::Weighted {
            weights: vec![2.0, 1.0],
            wrap: vec![false, false],
        };
        // ellipse area pi * (1/2) * 1
        assert!((metric_ball_volume(&w21, 2).unwrap() - std::f64::consts::PI / 2.0).abs() < 1e-12);
        let unit = CostModel::Weighted {
            weights: vec![1.0; 3],
            wrap: vec![false; 3],
        };
        assert_eq!(
            metric_ball_volume(&unit, 3).unwrap(),
            geometry::unit_ball_volume(3)
        );
        let field = CostModel::Field {
            field: FieldSpec::Constant { value: 1.0 },
            f_lower: 1.0,
            f_upper: 1.0,
            quadrature: QuadratureRule::default(),
        };
        assert!(metric_ball_volume(&field, 2).is_err());
    }

    #[test]
    fn triangle_inequality_on_random_triples() {
        let model = CostModel::Weighted {
            weights: vec![2.0, 0.5, 1.3],
            wrap: vec![true, false, false],
        };
        let mut rng = Seed::new(11).rng();
        for _ in 0..10_000 {
            let p: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
                .collect();
            let ab = pair_cost(&model, &p[0], &p[1]).unwrap();
            let bc = pair_cost(&model, &p[1], &p[2]).unwrap();
            let ac = pair_cost(&model, &p[0], &p[2]).unwrap();
            assert!(ac <= ab + bc + 1e-12);
            // symmetry and identity
            assert_eq!(ab, pair_cost(&model, &p[1], &p[0]).unwrap());
            assert_eq!(pair_cost(&model, &p[0], &p[0]).unwrap(), 0.0);
        }
    }

    #[test]
    fn line_integral_costs_respect_bounds() {
        let model = CostModel::Field {
            field: FieldSpec::Radial {
                center: Point(vec![0.5, 0.5]),
                scale: 0.3,
                eps: 0.1,
                lo: 0.5,
                hi: 3.0,
            },
            f_lower: 0.5,
            f_upper: 3.0,
            quadrature: QuadratureRule::default(),
        };
        let mut rng = Seed::new(12).rng();
        for _ in 0..200 {
            let u: Vec<f64> = (0..2).map(|_| rng.random::<f64>()).collect();
            let v: Vec<f64> = (0..2).map(|_| rng.random::<f64>()).collect();
            let len = geometry::dist(&u, &v);
            let c = pair_cost(&model, &u, &v).unwrap();
            assert!(c >= 0.5 * len - 1e-9 && c <= 3.0 * len + 1e-9);
        }
    }

    #[test]
    fn adaptive_simpson_matches_riemann_on_smooth_field() {
        let model = CostModel::Field {
            field: FieldSpec::Radial {
                center: Point(vec![0.5, 0.5]),
                scale: 0.3,
                eps: 0.1,
                lo: 0.1,
                hi: 10.0,
            },
            f_lower: 0.1,
            f_upper: 10.0,
            quadrature: QuadratureRule::AdaptiveSimpson { tolerance: 1e-10 },
        };
        let u = [0.1, 0.2];
        let v = [0.9, 0.7];
        let adaptive = pair_cost(&model, &u, &v).unwrap();
        let n = 1_000_000usize;
        let len = geometry::dist(&u, &v);
        let mut riemann = 0.0;
        let (field, _) = match &model {
            CostModel::Field { field, f_lower, .. } => (field, f_lower),
            _ => unreachable!(),
        };
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            let x = [u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1])];
            riemann += field.value(&x);
        }
        riemann *= len / n as f64;
        assert!(
            ((adaptive - riemann) / riemann).abs() < 1e-6,
            "adaptive {adaptive} vs riemann {riemann}"
        );
    }
}
