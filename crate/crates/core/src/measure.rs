//! Finite measures on bounded radius intervals.
//!
//! A [`RadiusMeasure`] is a finite sum of weighted atoms and weighted uniform
//! segments on `(0, b]`. Arbitrary continuous radius laws have to be
//! discretized into segments by the caller; in exchange every moment and every
//! quantile is exact.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math::unit_ball_volume;

/// Point mass `weight` at `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub radius: f64,
    pub weight: f64,
}

/// Mass `weight` spread uniformly over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub weight: f64,
}

impl Segment {
    fn overlaps(&self, other: &Segment) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    fn same_interval(&self, other: &Segment) -> bool {
        self.lo.to_bits() == other.lo.to_bits() && self.hi.to_bits() == other.hi.to_bits()
    }
}

/// Finite measure on `(0, b]` made of atoms and uniform segments.
///
/// Atoms are kept sorted by radius with bit-identical radii merged; segments
/// are sorted by `(lo, hi)` with identical intervals merged. The zero measure
/// is representable (it is needed as a part of a [`SignedRadiusMeasure`]) but
/// is rejected by [`RadiusMeasure::new`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadiusMeasure {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

fn check_atom(a: &Atom) -> Result<()> {
    if !(a.radius.is_finite() && a.radius > 0.0) {
        return Err(Error::InvalidMeasure("atom radius must be finite and > 0"));
    }
    if !(a.weight.is_finite() && a.weight > 0.0) {
        return Err(Error::InvalidMeasure("atom weight must be finite and > 0"));
    }
    Ok(())
}

fn check_segment(s: &Segment) -> Result<()> {
    if !(s.lo.is_finite() && s.hi.is_finite() && s.lo > 0.0 && s.hi > s.lo) {
        return Err(Error::InvalidMeasure(
            "segment needs finite endpoints with 0 < lo < hi",
        ));
    }
    if !(s.weight.is_finite() && s.weight > 0.0) {
        return Err(Error::InvalidMeasure(
            "segment weight must be finite and > 0",
        ));
    }
    Ok(())
}

fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if last.radius.to_bits() == a.radius.to_bits() => last.weight += a.weight,
            _ => out.push(a),
        }
    }
    out
}

fn segment_order(a: &Segment, b: &Segment) -> Ordering {
    a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi))
}

fn merge_segments(mut segments: Vec<Segment>) -> Vec<Segment> {
    segments.sort_by(segment_order);
    let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
    for s in segments {
        match out.last_mut() {
            Some(last) if last.same_interval(&s) => last.weight += s.weight,
            _ => out.push(s),
        }
    }
    out
}

/// Splits every segment at the union of all segment endpoints so that any two
/// resulting pieces are either identical or disjoint.
fn refine_segments(segments: &[Segment]) -> Vec<Segment> {
    let mut cuts: Vec<f64> = segments.iter().flat_map(|s| [s.lo, s.hi]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| a.to_bits() == b.to_bits());
    let mut out = Vec::new();
    for s in segments {
        let density = s.weight / (s.hi - s.lo);
        for w in cuts.windows(2) {
            if w[0] >= s.lo && w[1] <= s.hi {
                out.push(Segment {
                    lo: w[0],
                    hi: w[1],
                    weight: density * (w[1] - w[0]),
                });
            }
        }
    }
    merge_segments(out)
}

impl RadiusMeasure {
    /// Builds a non-zero measure, validating and canonicalizing the parts.
    pub fn new(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        let m = Self::with_zero(atoms, segments)?;
        if m.is_zero() {
            return Err(Error::InvalidMeasure("total mass must be positive"));
        }
        Ok(m)
    }

    /// Like [`RadiusMeasure::new`] but accepts the zero measure.
    pub fn with_zero(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        atoms.iter().try_for_each(check_atom)?;
        segments.iter().try_for_each(check_segment)?;
        Ok(Self {
            atoms: merge_atoms(atoms),
            segments: merge_segments(segments),
        })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `weight * delta_radius`.
    pub fn atom(radius: f64, weight: f64) -> Result<Self> {
        Self::new(alloc::vec![Atom { radius, weight }], Vec::new())
    }

    /// Unit point mass at `radius`: balls of fixed radius.
    pub fn dirac(radius: f64) -> Result<Self> {
        Self::atom(radius, 1.0)
    }

    pub fn segment(lo: f64, hi: f64, weight: f64) -> Result<Self> {
        Self::new(Vec::new(), alloc::vec![Segment { lo, hi, weight }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }

    /// `|F|`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>()
            + self.segments.iter().map(|s| s.weight).sum::<f64>()
    }

    /// Support bound `b`; zero for the zero measure.
    pub fn support_bound(&self) -> f64 {
        let a = self.atoms.iter().map(|a| a.radius).fold(0.0, f64::max);
        self.segments.iter().map(|s| s.hi).fold(a, f64::max)
    }

    /// `∫ r^k F(dr)`, segments integrated in closed form.
    pub fn moment(&self, k: u32) -> f64 {
        let kf = k as f64;
        let atoms: f64 = self
            .atoms
            .iter()
            .map(|a| a.weight * libm::pow(a.radius, kf))
            .sum();
        let segments: f64 = self
            .segments
            .iter()
            .map(|s| {
                let span = libm::pow(s.hi, kf + 1.0) - libm::pow(s.lo, kf + 1.0);
                s.weight * span / ((kf + 1.0) * (s.hi - s.lo))
            })
            .sum();
        atoms + segments
    }

    /// `t * F`.
    pub fn scale(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidScale(t));
        }
        Ok(Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    weight: a.weight * t,
                    ..*a
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    weight: s.weight * t,
                    ..*s
                })
                .collect(),
        })
    }

    /// `F + h G`, failing with [`Error::NotAMeasure`] when a component weight
    /// would become negative. Components whose weight becomes exactly zero are
    /// dropped.
    pub fn combine(&self, h: f64, g: &SignedRadiusMeasure) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::param("h", "must be finite"));
        }
        if h == 0.0 {
            return Ok(self.clone());
        }
        let signed_atoms = |m: &RadiusMeasure, sign: f64| {
            m.atoms
                .iter()
                .map(move |a| Atom {
                    radius: a.radius,
                    weight: sign * h * a.weight,
                })
                .collect::<Vec<_>>()
        };
        let signed_segments = |m: &RadiusMeasure, sign: f64| {
            m.segments
                .iter()
                .map(move |s| Segment {
                    weight: sign * h * s.weight,
                    ..*s
                })
                .collect::<Vec<_>>()
        };

        let mut atoms = self.atoms.clone();
        atoms.extend(signed_atoms(&g.pos, 1.0));
        atoms.extend(signed_atoms(&g.neg, -1.0));
        let mut atoms = merge_atoms(atoms);
        if let Some(bad) = atoms.iter().find(|a| a.weight < 0.0) {
            return Err(Error::NotAMeasure {
                lo: bad.radius,
                hi: bad.radius,
                weight: bad.weight,
            });
        }
        atoms.retain(|a| a.weight != 0.0);

        let mut raw = self.segments.clone();
        raw.extend(signed_segments(&g.pos, 1.0));
        raw.extend(signed_segments(&g.neg, -1.0));
        let mut segments = merge_segments(raw.clone());
        if segments.iter().any(|s| s.weight < 0.0) {
            // Partially overlapping intervals: compare densities piecewise.
            segments = refine_segments(&raw);
            let scale = self.total_mass() + h.abs() * g.total_variation();
            for s in segments.iter_mut() {
                if s.weight.abs() <= 1e-12 * scale {
                    s.weight = 0.0;
                }
            }
        }
        if let Some(bad) = segments.iter().find(|s| s.weight < 0.0) {
            return Err(Error::NotAMeasure {
                lo: bad.lo,
                hi: bad.hi,
                weight: bad.weight,
            });
        }
        segments.retain(|s| s.weight != 0.0);

        Ok(Self { atoms, segments })
    }

    /// Generalized inverse of the normalized distribution function,
    /// `inf { r : F((0, r]) / |F| > u }`.
    pub fn quantile_sample(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::InvalidQuantile(u));
        }
        if self.is_zero() {
            return Err(Error::InvalidMeasure("cannot sample from the zero measure"));
        }
        Ok(self.quantile_table().quantile(u))
    }

    /// Precomputed table for repeated quantile evaluation.
    pub fn quantile_table(&self) -> QuantileTable {
        QuantileTable::new(self)
    }

    /// `1 - exp(-t κ_d ∫ r^d F(dr))`: probability that a fixed point is covered.
    pub fn closed_form_volume_fraction(&self, t: f64, d: usize) -> f64 {
        let x = t * unit_ball_volume(d) * self.moment(d as u32);
        -libm::expm1(-x)
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Atom { radius: f64, mass: f64 },
    Linear { lo: f64, hi: f64, mass: f64 },
}

/// Distribution function of `F / |F|` laid out as ordered atoms and linear
/// pieces.
#[derive(Debug, Clone)]
pub struct QuantileTable {
    pieces: Vec<Piece>,
    total: f64,
    top: f64,
}

impl QuantileTable {
    fn new(m: &RadiusMeasure) -> Self {
        let mut cuts: Vec<f64> = m
            .atoms
            .iter()
            .map(|a| a.radius)
            .chain(m.segments.iter().flat_map(|s| [s.lo, s.hi]))
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| a.to_bits() == b.to_bits());

        let mut pieces = Vec::new();
        let mut atoms = m.atoms.iter().peekable();
        for (k, &x) in cuts.iter().enumerate() {
            if k > 0 {
                let lo = cuts[k - 1];
                let density: f64 = m
                    .segments
                    .iter()
                    .filter(|s| s.lo <= lo && s.hi >= x)
                    .map(|s| s.weight / (s.hi - s.lo))
                    .sum();
                if density > 0.0 {
                    pieces.push(Piece::Linear {
                        lo,
                        hi: x,
                        mass: density * (x - lo),
                    });
                }
            }
            if let Some(a) = atoms.next_if(|a| a.radius.to_bits() == x.to_bits()) {
                pieces.push(Piece::Atom {
                    radius: a.radius,
                    mass: a.weight,
                });
            }
        }
        let total = pieces
            .iter()
            .map(|p| match p {
                Piece::Atom { mass, .. } | Piece::Linear { mass, .. } => *mass,
            })
            .sum();
        Self {
            pieces,
            total,
            top: m.support_bound(),
        }
    }

    /// Quantile at level `u ∈ [0, 1)`; out-of-range levels are clamped.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = u * self.total;
        let mut acc = 0.0;
        for p in &self.pieces {
            match *p {
                Piece::Atom { radius, mass } => {
                    if acc + mass > target {
                        return radius;
                    }
                    acc += mass;
                }
                Piece::Linear { lo, hi, mass } => {
                    if acc + mass > target {
                        let r = lo + (target - acc) / mass * (hi - lo);
                        return r.clamp(lo, hi);
                    }
                    acc += mass;
                }
            }
        }
        self.top
    }
}

/// Signed measure `G = G+ - G-` in Hahn–Jordan form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignedRadiusMeasure {
    pos: RadiusMeasure,
    neg: RadiusMeasure,
}

impl SignedRadiusMeasure {
    /// Fails unless `pos` and `neg` are mutually singular: no shared atom
    /// radius and no overlapping segments.
    pub fn new(pos: RadiusMeasure, neg: RadiusMeasure) -> Result<Self> {
        let shared_atom = pos.atoms.iter().any(|a| {
            neg.atoms
                .iter()
                .any(|b| a.radius.to_bits() == b.radius.to_bits())
        });
        let overlap = pos
            .segments
            .iter()
            .any(|s| neg.segments.iter().any(|q| s.overlaps(q)));
        if shared_atom || overlap {
            return Err(Error::InvalidMeasure(
                "positive and negative parts must be mutually singular",
            ));
        }
        Ok(Self { pos, neg })
    }

    pub fn positive(m: RadiusMeasure) -> Self {
        Self {
            pos: m,
            neg: RadiusMeasure::zero(),
        }
    }

    pub fn pos(&self) -> &RadiusMeasure {
        &self.pos
    }

    pub fn neg(&self) -> &RadiusMeasure {
        &self.neg
    }

    /// `|G+| + |G-|`.
    pub fn total_variation(&self) -> f64 {
        self.pos.total_mass() + self.neg.total_mass()
    }

    pub fn support_bound(&self) -> f64 {
        self.pos.support_bound().max(self.neg.support_bound())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn two_atoms() -> RadiusMeasure {
        RadiusMeasure::new(
            vec![
                Atom {
                    radius: 1.0,
                    weight: 0.7,
                },
                Atom {
                    radius: 0.5,
                    weight: 0.3,
                },
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn total_mass_examples() {
        assert_eq!(two_atoms().total_mass(), 1.0);
        assert_eq!(
            RadiusMeasure::segment(0.5, 1.0, 2.0).unwrap().total_mass(),
            2.0
        );
        assert_eq!(RadiusMeasure::atom(1.0, 1.0).unwrap().total_mass(), 1.0);
    }

    #[test]
    fn moment_examples() {
        assert!((two_atoms().moment(2) - 0.775).abs() < 1e-15);
        assert_eq!(two_atoms().moment(0), two_atoms().total_mass());
        let seg = RadiusMeasure::segment(0.5, 1.5, 1.0).unwrap();
        assert!((seg.moment(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scale_examples() {
        let f = RadiusMeasure::atom(1.0, 1.0).unwrap();
        assert_eq!(
            f.scale(2.0).unwrap(),
            RadiusMeasure::atom(1.0, 2.0).unwrap()
        );
        assert_eq!(two_atoms().scale(1.0).unwrap(), two_atoms());
        assert_eq!(f.scale(0.0), Err(Error::InvalidScale(0.0)));
        assert!(f.scale(-1.0).is_err());
    }

    #[test]
    fn construction_rejects_bad_parts() {
        assert!(RadiusMeasure::atom(0.0, 1.0).is_err());
        assert!(RadiusMeasure::atom(1.0, 0.0).is_err());
        assert!(RadiusMeasure::segment(0.0, 1.0, 1.0).is_err());
        assert!(RadiusMeasure::segment(1.0, 1.0, 1.0).is_err());
        assert!(RadiusMeasure::new(vec![], vec![]).is_err());
        assert!(RadiusMeasure::with_zero(vec![], vec![]).unwrap().is_zero());
    }

    #[test]
    fn atoms_merge_on_identical_radius() {
        let m = RadiusMeasure::new(
            vec![
                Atom {
                    radius: 1.0,
                    weight: 0.25,
                },
                Atom {
                    radius: 1.0,
                    weight: 0.5,
                },
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert_eq!(m.atoms()[0].weight, 0.75);
    }

    fn example_direction() -> SignedRadiusMeasure {
        SignedRadiusMeasure::new(
            RadiusMeasure::atom(0.5, 0.5).unwrap(),
            RadiusMeasure::atom(1.0, 0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn combine_examples() {
        let f = RadiusMeasure::atom(1.0, 1.0).unwrap();
        let g = example_direction();
        let expected = RadiusMeasure::new(
            vec![
                Atom {
                    radius: 1.0,
                    weight: 0.5,
                },
                Atom {
                    radius: 0.5,
                    weight: 0.5,
                },
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(f.combine(1.0, &g).unwrap(), expected);
        assert!(matches!(
            f.combine(3.0, &g),
            Err(Error::NotAMeasure { weight, .. }) if weight == -0.5
        ));
        assert_eq!(f.combine(0.0, &g).unwrap(), f);
    }

    #[test]
    fn combine_drops_exact_zeros() {
        let f = RadiusMeasure::atom(1.0, 1.0).unwrap();
        let g = example_direction();
        let out = f.combine(2.0, &g).unwrap();
        assert_eq!(out, RadiusMeasure::atom(0.5, 1.0).unwrap());
    }

    #[test]
    fn combine_refines_partially_overlapping_segments() {
        let f = RadiusMeasure::segment(0.5, 1.5, 1.0).unwrap();
        let g = SignedRadiusMeasure::new(
            RadiusMeasure::zero(),
            RadiusMeasure::segment(0.5, 1.0, 0.25).unwrap(),
        )
        .unwrap();
        let out = f.combine(1.0, &g).unwrap();
        assert!((out.total_mass() - 0.75).abs() < 1e-12);
        assert!((out.moment(1) - (1.0 - 0.25 * 0.75)).abs() < 1e-12);
        assert!(f.combine(3.0, &g).is_err());
    }

    #[test]
    fn signed_measure_requires_singular_parts() {
        let a = RadiusMeasure::atom(1.0, 1.0).unwrap();
        assert!(SignedRadiusMeasure::new(a.clone(), a).is_err());
        let s1 = RadiusMeasure::segment(0.5, 1.0, 1.0).unwrap();
        let s2 = RadiusMeasure::segment(0.9, 1.5, 1.0).unwrap();
        assert!(SignedRadiusMeasure::new(s1.clone(), s2).is_err());
        let s3 = RadiusMeasure::segment(1.0, 1.5, 1.0).unwrap();
        assert!(SignedRadiusMeasure::new(s1, s3).is_ok());
    }

    #[test]
    fn quantile_examples() {
        let f = two_atoms();
        assert_eq!(f.quantile_sample(0.2).unwrap(), 0.5);
        assert_eq!(f.quantile_sample(0.9).unwrap(), 1.0);
        assert_eq!(f.quantile_sample(0.0).unwrap(), 0.5);
        let seg = RadiusMeasure::segment(0.5, 1.5, 1.0).unwrap();
        assert_eq!(seg.quantile_sample(0.5).unwrap(), 1.0);
        assert_eq!(f.quantile_sample(1.0), Err(Error::InvalidQuantile(1.0)));
        assert_eq!(f.quantile_sample(-0.1), Err(Error::InvalidQuantile(-0.1)));
    }

    #[test]
    fn quantile_with_atom_inside_segment() {
        let m = RadiusMeasure::new(
            vec![Atom {
                radius: 1.0,
                weight: 1.0,
            }],
            vec![Segment {
                lo: 0.5,
                hi: 1.5,
                weight: 1.0,
            }],
        )
        .unwrap();
        // cdf: linear 0..0.25 on [0.5,1), jump to 0.75 at 1, linear to 1.
        assert!((m.quantile_sample(0.125).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(m.quantile_sample(0.5).unwrap(), 1.0);
        assert!((m.quantile_sample(0.875).unwrap() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn quantile_atom_frequencies_chi_square() {
        use rand::{Rng, SeedableRng};
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let f = RadiusMeasure::new(
            vec![
                Atom {
                    radius: 0.25,
                    weight: 0.1,
                },
                Atom {
                    radius: 0.5,
                    weight: 0.3,
                },
                Atom {
                    radius: 1.0,
                    weight: 0.6,
                },
            ],
            vec![],
        )
        .unwrap();
        let table = f.quantile_table();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut counts = [0u64; 3];
        for _ in 0..draws {
            let r = table.quantile(rng.random::<f64>());
            let idx = f.atoms().iter().position(|a| a.radius == r).unwrap();
            counts[idx] += 1;
        }
        let chi2: f64 = f
            .atoms()
            .iter()
            .zip(counts)
            .map(|(a, c)| {
                let e = a.weight * draws as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let p = 1.0 - ChiSquared::new(2.0).unwrap().cdf(chi2);
        assert!(p > 0.001, "chi2 = {chi2}, p = {p}");
    }

    #[test]
    fn volume_fraction_examples() {
        let f = RadiusMeasure::dirac(1.0).unwrap();
        assert!((f.closed_form_volume_fraction(1.0, 2) - 0.956_786).abs() < 1e-6);
        assert!((f.closed_form_volume_fraction(1.0, 3) - 0.984_835_4).abs() < 1e-6);
        assert!(f.closed_form_volume_fraction(1e-12, 2) < 1e-11);
        // scaling F by 2 or t by 2 hits the same value
        let f2 = f.scale(2.0).unwrap();
        assert_eq!(
            f2.closed_form_volume_fraction(0.3, 2),
            f.closed_form_volume_fraction(0.6, 2)
        );
    }

    fn arb_measure() -> impl Strategy<Value = RadiusMeasure> {
        let atoms = prop::collection::vec((0.05f64..2.0, 0.01f64..3.0), 0..4);
        let segs = prop::collection::vec((0.05f64..1.5, 0.01f64..1.0, 0.01f64..3.0), 0..3);
        (atoms, segs).prop_filter_map("non-empty", |(atoms, segs)| {
            RadiusMeasure::new(
                atoms
                    .into_iter()
                    .map(|(radius, weight)| Atom { radius, weight })
                    .collect(),
                segs.into_iter()
                    .map(|(lo, len, weight)| Segment {
                        lo,
                        hi: lo + len,
                        weight,
                    })
                    .collect(),
            )
            .ok()
        })
    }

    proptest! {
        #[test]
        fn moment_is_linear_in_scale(f in arb_measure(), t in 0.01f64..10.0, k in 0u32..5) {
            let lhs = f.scale(t).unwrap().moment(k);
            let rhs = t * f.moment(k);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }

        #[test]
        fn quantile_is_nondecreasing(f in arb_measure(), mut u in prop::collection::vec(0.0f64..1.0, 2..30)) {
            u.sort_by(f64::total_cmp);
            let table = f.quantile_table();
            let q: Vec<f64> = u.iter().map(|&u| table.quantile(u)).collect();
            prop_assert!(q.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(q.iter().all(|&r| r > 0.0 && r <= f.support_bound()));
        }

        #[test]
        fn combine_round_trip(
            base in prop::collection::vec(1u32..8, 1..4),
            extra in prop::collection::vec(1u32..8, 0..3),
            h in 0.0f64..1.0,
        ) {
            // atoms on a grid of radii; negative part on radii already in F
            let f = RadiusMeasure::new(
                base.iter().enumerate().map(|(i, &w)| Atom { radius: 0.25 * (i + 1) as f64, weight: w as f64 }).collect(),
                vec![],
            ).unwrap();
            let neg = RadiusMeasure::with_zero(
                vec![Atom { radius: 0.25, weight: 0.5 }],
                vec![],
            ).unwrap();
            let pos = RadiusMeasure::with_zero(
                extra.iter().enumerate().map(|(i, &w)| Atom { radius: 2.0 + 0.25 * i as f64, weight: w as f64 }).collect(),
                vec![],
            ).unwrap();
            let g = SignedRadiusMeasure::new(pos, neg).unwrap();
            let there = f.combine(h, &g).unwrap();
            let back = there.combine(-h, &g).unwrap();
            prop_assert_eq!(back.atoms().len(), f.atoms().len());
            for (a, b) in back.atoms().iter().zip(f.atoms()) {
                prop_assert_eq!(a.radius, b.radius);
                prop_assert!((a.weight - b.weight).abs() <= 1e-12 * b.weight);
            }
        }

        #[test]
        fn volume_fraction_increasing_in_t(f in arb_measure(), t in 0.001f64..2.0, dt in 0.001f64..1.0) {
            prop_assert!(f.closed_form_volume_fraction(t + dt, 2) >= f.closed_form_volume_fraction(t, 2));
        }
    }
}
