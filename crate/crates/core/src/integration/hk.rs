//! Gauge-adaptive Henstock-Kurzweil integration on a real interval.
//!
//! The integral is approximated by Riemann sums over δ-fine tagged
//! partitions. Regular parts of `[a, b]` are covered by cells; each cell
//! carries a Gauss-Legendre rule (a tagged partition, see [`super::gauss`]) on
//! the whole cell and on its two halves. Cells whose two sums disagree by more
//! than their length-proportional share of the tolerance are bisected, which
//! halves the gauge there.
//!
//! Declared singular points are tags of their own: the piece
//! `[s, s + r]` (or `[s - r, s]`) is tagged at `s`, where the integrand counts
//! as zero. The radius `r` is halved while the freed strips
//! `[s + r/2, s + r]` indicate that the remaining piece still carries more
//! than its share of the tolerance: the largest excursion of the running
//! integral across each strip is extrapolated geometrically towards `s`.

use serde::Serialize;

use super::gauss::GaussRule;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEPTH: usize = 40;
pub const DEFAULT_MAX_CELLS: usize = 1 << 23;

const MAX_RATIO: f64 = 0.9;

const RELATIVE_FLOOR: f64 = 1.0 / (1u64 << 30) as f64;

/// Radii below this put quadrature nodes among subnormal offsets.
const MIN_RADIUS: f64 = f64::MIN_POSITIVE / RELATIVE_FLOOR;

#[derive(Debug, Clone, PartialEq)]
pub struct HkOptions {
    pub tol: f64,
    pub singularities: Vec<f64>,
    pub max_depth: usize,
    pub max_cells: usize,
}

impl HkOptions {
    pub fn new(tol: f64) -> Self {
        HkOptions {
            tol,
            singularities: Vec::new(),
            max_depth: DEFAULT_MAX_DEPTH,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }

    pub fn singular_at(mut self, points: &[f64]) -> Self {
        self.singularities.extend_from_slice(points);
        self
    }

    pub fn max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HkResult {
    pub value: f64,
    pub achieved_tol: f64,
    /// Deepest bisection of a cell, or the most radius halvings at a
    /// singular point, whichever is larger.
    pub refinement_depth: usize,
    pub evaluations: usize,
}

/// One piece of a tagged partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedPiece {
    pub lo: f64,
    pub hi: f64,
    pub tag: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaggedPartition {
    pub pieces: Vec<TaggedPiece>,
}

impl TaggedPartition {
    /// `Σ f(ξ_j) |A_j|`, with `f` counted as zero at `zero_tags`.
    pub fn riemann_sum<F: Fn(f64) -> f64>(&self, f: F, zero_tags: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                if zero_tags.contains(&p.tag) {
                    0.0
                } else {
                    f(p.tag) * (p.hi - p.lo)
                }
            })
            .sum()
    }

    /// Pieces sorted, contiguous from `a` to `b`, tags inside their pieces.
    pub fn is_partition_of(&self, a: f64, b: f64) -> bool {
        let mut pieces = self.pieces.clone();
        pieces.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        let Some(first) = pieces.first() else {
            return false;
        };
        if first.lo != a || pieces.last().map(|p| p.hi) != Some(b) {
            return false;
        }
        pieces.windows(2).all(|w| w[0].hi == w[1].lo)
            && pieces
                .iter()
                .all(|p| p.lo < p.hi && p.lo <= p.tag && p.tag <= p.hi)
    }

    /// Every piece lies in the open gauge neighbourhood of its tag.
    pub fn is_fine(&self, gauge: &Gauge) -> bool {
        self.pieces.iter().all(|p| {
            let d = gauge.radius(p.tag);
            d > 0.0 && p.lo > p.tag - d && p.hi < p.tag + d
        })
    }
}

/// Piecewise-constant gauge: each span carries a radius, and declared
/// singular points carry their own.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gauge {
    spans: Vec<(f64, f64, f64)>,
    points: Vec<(f64, f64)>,
}

impl Gauge {
    pub fn radius(&self, x: f64) -> f64 {
        if let Some((_, r)) = self.points.iter().find(|(p, _)| *p == x) {
            return *r;
        }
        let i = self.spans.partition_point(|(_, hi, _)| *hi < x);
        let mut r = f64::INFINITY;
        for (lo, hi, rad) in self.spans.iter().skip(i).take(2) {
            if *lo <= x && x <= *hi {
                r = r.min(*rad);
            }
        }
        if r.is_finite() {
            r
        } else {
            // outside every span; the smallest radius is a valid choice
            self.spans.iter().map(|s| s.2).fold(f64::INFINITY, f64::min)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: f64,
    hi: f64,
    coarse: f64,
    left: f64,
    right: f64,
    abs: f64,
}

impl Cell {
    fn fine(&self) -> f64 {
        self.left + self.right
    }

    fn discrepancy(&self) -> f64 {
        (self.fine() - self.coarse).abs()
    }
}

struct SingularSide {
    point: f64,
    dir: f64,
    radius: f64,
    history: Vec<f64>,
    tol: f64,
    done: bool,
    stuck: bool,
}

impl SingularSide {
    /// Geometric extrapolation of the running-integral oscillation over the
    /// last two strips.
    fn residual_estimate(&self) -> f64 {
        let n = self.history.len();
        if n < 2 {
            return f64::INFINITY;
        }
        let (last, prev) = (self.history[n - 1], self.history[n - 2]);
        if last == 0.0 {
            return 0.0;
        }
        let ratio = if prev == 0.0 {
            MAX_RATIO
        } else {
            (last / prev).min(MAX_RATIO)
        };
        last * ratio / (1.0 - ratio)
    }

    fn piece(&self) -> (f64, f64) {
        let far = self.point + self.dir * self.radius;
        if self.dir > 0.0 {
            (self.point, far)
        } else {
            (far, self.point)
        }
    }
}

/// Largest modulus of the running integral over a freshly covered interval,
/// measured from either end.
struct Coverage {
    from_left: f64,
    from_right: f64,
}

struct Integrator<'a, F> {
    f: &'a F,
    rule: &'static GaussRule,
    cells: Vec<Cell>,
    evaluations: usize,
    length: f64,
    cell_tol: f64,
    max_depth: usize,
    max_cells: usize,
    deepest: usize,
}

impl<F: Fn(f64) -> f64> Integrator<'_, F> {
    fn rule(&mut self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let (v, abs, finite) = self.rule.apply(self.f, lo, hi);
        self.evaluations += self.rule.nodes.len();
        if !finite {
            return Err(Error::Validation(format!(
                "integrand is not finite somewhere in [{lo}, {hi}]; declare the singular point"
            )));
        }
        Ok((v, abs))
    }

    fn make_cell(&mut self, lo: f64, hi: f64, coarse: Option<f64>) -> Result<Cell> {
        let coarse = match coarse {
            Some(c) => c,
            None => self.rule(lo, hi)?.0,
        };
        let mid = 0.5 * (lo + hi);
        let (left, la) = self.rule(lo, mid)?;
        let (right, ra) = self.rule(mid, hi)?;
        Ok(Cell {
            lo,
            hi,
            coarse,
            left,
            right,
            abs: la + ra,
        })
    }

    fn share(&self, c: &Cell) -> f64 {
        let proportional = self.cell_tol * (c.hi - c.lo) / self.length;
        // two sums agreeing to 30 bits of the absolute integral are as close
        // as badly conditioned integrands can be evaluated
        proportional.max(RELATIVE_FLOOR * c.abs)
    }

    fn resolved(&self, c: &Cell) -> bool {
        c.discrepancy() <= self.share(c) || below_resolution(c.lo, c.hi)
    }

    /// Adds `[lo, hi]` and bisects until every piece meets its share.
    fn cover(&mut self, lo: f64, hi: f64, coarse: Option<f64>) -> Result<Coverage> {
        let mut stack = vec![(self.make_cell(lo, hi, coarse)?, 0)];
        let mut total = 0.0;
        let mut max_prefix = 0.0f64;
        let mut min_prefix = 0.0f64;
        while let Some((c, depth)) = stack.pop() {
            self.deepest = self.deepest.max(depth);
            if self.resolved(&c) {
                // cells come off the stack left to right
                total += c.left;
                max_prefix = max_prefix.max(total);
                min_prefix = min_prefix.min(total);
                total += c.right;
                max_prefix = max_prefix.max(total);
                min_prefix = min_prefix.min(total);
                self.cells.push(c);
                continue;
            }
            if depth >= self.max_depth || !splittable(c.lo, c.hi) {
                return Err(self.non_convergence(depth, &stack, &c));
            }
            if self.cells.len() + stack.len() >= self.max_cells {
                return Err(self.non_convergence(depth, &stack, &c));
            }
            let mid = 0.5 * (c.lo + c.hi);
            let right = self.make_cell(mid, c.hi, Some(c.right))?;
            let left = self.make_cell(c.lo, mid, Some(c.left))?;
            stack.push((right, depth + 1));
            stack.push((left, depth + 1));
        }
        Ok(Coverage {
            from_left: max_prefix.max(-min_prefix),
            from_right: (total - min_prefix).max(max_prefix - total),
        })
    }

    fn non_convergence(&self, depth: usize, pending: &[(Cell, usize)], failed: &Cell) -> Error {
        let mut last = failed.fine();
        let mut previous = failed.coarse;
        for c in self.cells.iter().chain(pending.iter().map(|(c, _)| c)) {
            last += c.fine();
            previous += c.coarse;
        }
        Error::NonConvergence {
            depth,
            last,
            previous,
        }
    }

    fn advance(&mut self, side: &mut SingularSide) -> Result<()> {
        loop {
            if side.residual_estimate() <= side.tol {
                side.done = true;
                return Ok(());
            }
            let half = 0.5 * side.radius;
            let inner = side.point + side.dir * half;
            let outer = side.point + side.dir * side.radius;
            let (lo, hi) = if side.dir > 0.0 { (inner, outer) } else { (outer, inner) };
            if inner == side.point || half < MIN_RADIUS || !splittable(lo, hi) {
                side.stuck = true;
                return Ok(());
            }
            let cov = self.cover(lo, hi, None)?;
            // running integral measured from the end nearest the singularity
            let oscillation = if side.dir > 0.0 { cov.from_left } else { cov.from_right };
            side.radius = half;
            side.history.push(oscillation);
        }
    }
}

/// Cells narrower than 2^-30 of their magnitude leave the integrand's
/// argument with too few significant bits for bisection to help.
fn below_resolution(lo: f64, hi: f64) -> bool {
    hi - lo <= RELATIVE_FLOOR * lo.abs().max(hi.abs())
}

fn splittable(lo: f64, hi: f64) -> bool {
    let mid = 0.5 * (lo + hi);
    lo < mid && mid < hi
}

/// Integrates `f` over `[a, b]`.
pub fn hk_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &HkOptions) -> Result<HkResult> {
    run(&f, a, b, opts, false).map(|(r, _)| r)
}

/// As [`hk_integrate`], also returning the final tagged partition and the
/// gauge it is fine with respect to.
pub fn hk_integrate_detailed<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &HkOptions,
) -> Result<(HkResult, TaggedPartition, Gauge)> {
    let (r, extra) = run(&f, a, b, opts, true)?;
    let (partition, gauge) = extra.expect("detail requested");
    Ok((r, partition, gauge))
}

type Detail = Option<(TaggedPartition, Gauge)>;

fn run<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    opts: &HkOptions,
    detail: bool,
) -> Result<(HkResult, Detail)> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Validation(format!("need finite a < b, got [{a}, {b}]")));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::Validation(format!("tolerance must be positive, got {}", opts.tol)));
    }

    let mut singular: Vec<f64> = opts
        .singularities
        .iter()
        .copied()
        .filter(|s| s.is_finite() && *s >= a && *s <= b)
        .collect();
    singular.sort_by(f64::total_cmp);
    singular.dedup();

    let mut breaks = vec![a];
    breaks.extend(singular.iter().copied().filter(|s| *s > a && *s < b));
    breaks.push(b);

    let mut integ = Integrator {
        f,
        rule: GaussRule::standard(),
        cells: Vec::new(),
        evaluations: 0,
        length: b - a,
        cell_tol: 0.5 * opts.tol,
        max_depth: opts.max_depth,
        max_cells: opts.max_cells,
        deepest: 0,
    };
    let mut sides = Vec::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let left_sing = singular.contains(&lo);
        let right_sing = singular.contains(&hi);
        let radius = match (left_sing, right_sing) {
            (true, true) => 0.25 * (hi - lo),
            (true, false) | (false, true) => 0.5 * (hi - lo),
            (false, false) => 0.0,
        };
        let (mut clo, mut chi) = (lo, hi);
        if left_sing {
            sides.push((lo, 1.0, radius));
            clo = lo + radius;
        }
        if right_sing {
            sides.push((hi, -1.0, radius));
            chi = hi - radius;
        }
        integ.cover(clo, chi, None)?;
    }
    let side_tol = if sides.is_empty() {
        0.0
    } else {
        0.5 * opts.tol / sides.len() as f64
    };
    let mut sides: Vec<SingularSide> = sides
        .into_iter()
        .map(|(point, dir, radius)| SingularSide {
            point,
            dir,
            radius,
            history: Vec::new(),
            tol: side_tol,
            done: false,
            stuck: false,
        })
        .collect();

    for side in sides.iter_mut() {
        integ.advance(side)?;
    }

    let mut fine = 0.0;
    let mut coarse = 0.0;
    for c in &integ.cells {
        fine += c.fine();
        coarse += c.coarse;
    }
    let residual: f64 = sides.iter().map(|s| s.residual_estimate()).sum();
    let achieved = (fine - coarse).abs() + residual;
    if sides.iter().any(|s| s.stuck) || achieved.is_nan() || achieved >= opts.tol {
        return Err(Error::NonConvergence {
            depth: integ.deepest,
            last: fine,
            previous: coarse,
        });
    }
    let halvings = sides.iter().map(|s| s.history.len()).max().unwrap_or(0);
    let result = HkResult {
        value: fine,
        achieved_tol: achieved,
        refinement_depth: integ.deepest.max(halvings),
        evaluations: integ.evaluations,
    };
    let extra = detail.then(|| build_detail(&integ, &sides));
    Ok((result, extra))
}

fn build_detail<F>(integ: &Integrator<'_, F>, sides: &[SingularSide]) -> (TaggedPartition, Gauge) {
    let rule = integ.rule;
    let mut pieces = Vec::new();
    let mut spans = Vec::new();
    for c in &integ.cells {
        let mid = 0.5 * (c.lo + c.hi);
        for (lo, hi) in [(c.lo, mid), (mid, c.hi)] {
            let bounds = rule.piece_bounds(lo, hi);
            let half = 0.5 * (hi - lo);
            let centre = 0.5 * (hi + lo);
            for (i, x) in rule.nodes.iter().enumerate() {
                let (lo, hi) = (bounds[i], bounds[i + 1]);
                // cells a few ulps wide round some pieces to nothing
                if lo < hi {
                    let tag = (centre + half * x).clamp(lo, hi);
                    pieces.push(TaggedPiece { lo, hi, tag });
                }
            }
            spans.push((lo, hi, hi - lo));
        }
    }
    let mut points = Vec::new();
    for s in sides {
        let (lo, hi) = s.piece();
        pieces.push(TaggedPiece { lo, hi, tag: s.point });
        spans.push((lo, hi, s.radius));
        let r = points
            .iter()
            .find(|(p, _)| *p == s.point)
            .map(|(_, r): &(f64, f64)| *r)
            .unwrap_or(0.0);
        points.retain(|(p, _)| *p != s.point);
        // wide enough for the pieces on both sides of the point
        points.push((s.point, r.max(2.0 * s.radius)));
    }
    spans.sort_by(|x, y| x.0.total_cmp(&y.0));
    (TaggedPartition { pieces }, Gauge { spans, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = hk_integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, &HkOptions::new(1e-10)).unwrap();
        // x^3 - x^2/2 + 2x from -1 to 2
        assert!((r.value - 13.5).abs() < 1e-12);
        assert!(r.achieved_tol < 1e-10);
    }

    #[test]
    fn inverse_square_root_at_interior_point() {
        let opts = HkOptions::new(1e-6).singular_at(&[0.5]);
        let r = hk_integrate(|x: f64| (x - 0.5).abs().powf(-0.5), 0.0, 1.0, &opts).unwrap();
        assert!((r.value - 4.0 * 0.5f64.sqrt()).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn divergent_integral_reports_non_convergence() {
        let opts = HkOptions::new(1e-6).singular_at(&[0.0]);
        let err = hk_integrate(|x: f64| 1.0 / x, 0.0, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }), "{err}");
    }

    #[test]
    fn rejects_bad_interval_and_tolerance() {
        assert!(hk_integrate(|x| x, 1.0, 0.0, &HkOptions::new(1e-6)).is_err());
        assert!(hk_integrate(|x| x, 0.0, 1.0, &HkOptions::new(0.0)).is_err());
    }

    #[test]
    fn detail_is_a_fine_tagged_partition_with_matching_sum() {
        let opts = HkOptions::new(1e-5).singular_at(&[0.0, 1.0]);
        let f = |x: f64| {
            if x == 0.0 || x == 1.0 {
                0.0
            } else {
                x.powf(-0.5) + (1.0 - x).powf(-0.5)
            }
        };
        let (r, part, gauge) = hk_integrate_detailed(f, 0.0, 1.0, &opts).unwrap();
        assert!(part.is_partition_of(0.0, 1.0));
        assert!(part.is_fine(&gauge));
        let sum = part.riemann_sum(f, &opts.singularities);
        assert!((sum - r.value).abs() < 1e-10, "{sum} vs {}", r.value);
        assert!((r.value - 4.0).abs() < 1e-5);
    }
}
