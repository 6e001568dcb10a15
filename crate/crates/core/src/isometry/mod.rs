//! Surjective isometries of `l^p` in the form `T(e_n) = lambda_n e_phi(n)`,
//! the classifier for basis images, and the rotation that only `l^2` admits.

mod rotation;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::genset::{
    ballmap_from_disjoint_family, standard_genset, DisjointFamilyMap, Field, GeneratingSet, VectorRep,
};
use crate::lpspace::FiniteVector;
use crate::rigor::{modulus, pow2, CRat, Enclosure, Exponent, Rat};

pub use rotation::{rotation_demo, rotation_images, RotationReport, RotationSample};

/// `phi` is given by finitely many pairs and is `n -> n + shift` elsewhere;
/// `lambda_n` is `lambdas[n]`, or `lambda_tail` past the end of the list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsometryDescriptor {
    pub pairs: BTreeMap<usize, usize>,
    pub shift: usize,
    pub lambdas: Vec<CRat>,
    pub lambda_tail: CRat,
}

impl IsometryDescriptor {
    pub fn identity() -> Self {
        Self {
            pairs: BTreeMap::new(),
            shift: 0,
            lambdas: Vec::new(),
            lambda_tail: CRat::one(),
        }
    }

    /// Validates injectivity of `phi` and `|lambda_n| = 1`.
    pub fn new(pairs: BTreeMap<usize, usize>, shift: usize, lambdas: Vec<CRat>, lambda_tail: CRat) -> Result<Self> {
        let d = Self { pairs, shift, lambdas, lambda_tail };
        d.validate()?;
        Ok(d)
    }

    pub fn scalar(zeta: CRat) -> Result<Self> {
        Self::new(BTreeMap::new(), 0, Vec::new(), zeta)
    }

    pub fn shift_by(shift: usize) -> Self {
        Self { shift, ..Self::identity() }
    }

    /// Past this index `phi` is the plain shift.
    pub fn range(&self) -> usize {
        let keys = self.pairs.keys().next_back().map_or(0, |n| n + 1);
        let vals = self.pairs.values().max().map_or(0, |m| m + 1);
        keys.max(vals).max(self.lambdas.len())
    }

    pub fn phi(&self, n: usize) -> usize {
        self.pairs.get(&n).copied().unwrap_or(n + self.shift)
    }

    pub fn lambda(&self, n: usize) -> &CRat {
        self.lambdas.get(n).unwrap_or(&self.lambda_tail)
    }

    pub fn validate(&self) -> Result<()> {
        for (n, l) in self.lambdas.iter().enumerate() {
            if !l.is_unimodular() {
                return Err(Error::NotUnimodular { index: n });
            }
        }
        if !self.lambda_tail.is_unimodular() {
            return Err(Error::NotUnimodular { index: self.lambdas.len() });
        }
        // past range, phi(n) = n + shift exceeds every earlier value
        let r = self.range();
        let mut seen = BTreeSet::new();
        for n in 0..r {
            if !seen.insert(self.phi(n)) {
                return Err(Error::InvalidDescriptor(format!("phi is not injective at {n}")));
            }
        }
        Ok(())
    }

    /// The checkable stand-in for surjectivity: no shift, and `phi` maps
    /// `0..range` onto itself.
    pub fn surjective_on_range(&self) -> bool {
        let r = self.range();
        self.shift == 0 && (0..r).map(|n| self.phi(n)).collect::<BTreeSet<_>>() == (0..r).collect()
    }

    pub fn is_real(&self) -> bool {
        self.lambdas.iter().all(CRat::is_real) && self.lambda_tail.is_real()
    }

    /// `T(e_n)`.
    pub fn image(&self, n: usize) -> FiniteVector {
        FiniteVector::basis(self.phi(n)).scale(self.lambda(n))
    }

    /// `T(v)`, exactly.
    pub fn apply(&self, v: &FiniteVector) -> FiniteVector {
        FiniteVector::from_coords(v.iter().map(|(n, a)| (self.phi(n), a * self.lambda(n))))
    }

    /// `T^-1(v)` when `T` is surjective onto the support of `v`.
    pub fn apply_inverse(&self, v: &FiniteVector) -> Option<FiniteVector> {
        let r = self.range();
        let mut out = FiniteVector::zero();
        for (m, a) in v.iter() {
            let n = (0..r.max(m + 1))
                .find(|&n| self.phi(n) == m)
                .or_else(|| (m >= r + self.shift).then(|| m - self.shift))?;
            let l = self.lambda(n);
            out.add_at(n, &(a * &l.conj()));
        }
        Some(out)
    }

    /// `T` followed by `other`.
    pub fn then(&self, other: &IsometryDescriptor) -> Result<IsometryDescriptor> {
        let r = self.range().max(other.range()) + self.shift + other.shift + 1;
        let mut pairs = BTreeMap::new();
        let mut lambdas = Vec::with_capacity(r);
        for n in 0..r {
            let m = self.phi(n);
            pairs.insert(n, other.phi(m));
            lambdas.push(self.lambda(n) * other.lambda(m));
        }
        IsometryDescriptor::new(
            pairs,
            self.shift + other.shift,
            lambdas,
            &self.lambda_tail * &other.lambda_tail,
        )
    }
}

/// The ball map of `T` over the standard presentation in both source and
/// target.
pub fn descriptor_to_ballmap(d: &IsometryDescriptor, p: Exponent, field: Field) -> Result<DisjointFamilyMap> {
    d.validate()?;
    if field == Field::Real && !d.is_real() {
        return Err(Error::FieldMismatch);
    }
    let target: Arc<dyn GeneratingSet> = Arc::new(standard_genset(p, field));
    let dd = d.clone();
    let family = Arc::new(move |n: usize| VectorRep::exact("E", dd.image(n).to_dense()));
    let map = ballmap_from_disjoint_family(family, "E", target, None)?;
    let params = Vec::from([
        (String::from("pairs"), format!("{:?}", d.pairs)),
        (String::from("shift"), format!("{}", d.shift)),
        (String::from("lambdas"), d.lambdas.iter().map(|l| format!("{l}")).collect::<Vec<_>>().join(",")),
        (String::from("lambda_tail"), format!("{}", d.lambda_tail)),
    ]);
    Ok(map.with_params("descriptor", params))
}

/// A candidate basis image known to within `radius` in norm: the true image
/// `g` satisfies `||g - approx|| < radius` (or `g = approx` when the radius is 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageCandidate {
    pub approx: FiniteVector,
    pub radius: Rat,
}

impl ImageCandidate {
    pub fn exact(v: FiniteVector) -> Self {
        Self { approx: v, radius: Rat::zero() }
    }

    /// Truncates a represented image at precision `tol + 2`. `None` when the
    /// presentation has no finite back-end.
    pub fn from_rep(rep: &VectorRep, target: &dyn GeneratingSet, tol: u32) -> Option<Result<Self>> {
        let coeffs = match rep.eval(tol + 2) {
            Ok(c) => c,
            Err(e) => return Some(Err(e)),
        };
        let approx = target.realize(&coeffs)?;
        Some(Ok(Self { approx, radius: pow2(-(tol as i64) - 2) }))
    }

    fn coordinate(&self, n: usize, k: u32) -> Enclosure {
        let m = modulus(&self.approx.get(n), k);
        let lo = m.lo() - &self.radius;
        let lo = if lo < Rat::zero() { Rat::zero() } else { lo };
        Enclosure::new(lo, m.hi() + &self.radius)
    }

    /// Whether the true coordinate `n` is certainly nonzero.
    fn certainly_nonzero(&self, n: usize) -> bool {
        self.approx.get(n).norm_sqr() > &self.radius * &self.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Conforms,
    Violates,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Conforms => "conforms",
            Verdict::Violates => "violates",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// Evidence: an enclosure of `||g_index||`.
    Norm { index: usize },
    /// Evidence: enclosures of `|g_first(coordinate)|` and
    /// `|g_second(coordinate)|`.
    Overlap { first: usize, second: usize, coordinate: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub evidence: Vec<Enclosure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifierVerdict {
    pub verdict: Verdict,
    pub tol: u32,
    /// Certified failures; nonempty exactly when the verdict is `Violates`.
    pub witnesses: Vec<Witness>,
    /// Checks whose enclosures straddled the decision thresholds.
    pub undecided: Vec<Witness>,
}

/// Checks that every image is a unit vector (norm in `(1 - 2^-tol, 1 + 2^-tol)`)
/// and that distinct images have disjoint supports, where a coordinate below
/// `2^-tol` on either side counts as absent.
pub fn classify(images: &[ImageCandidate], p: &Exponent, tol: u32) -> Result<ClassifierVerdict> {
    let eps = pow2(-(tol as i64));
    let one = Rat::one();
    let mut witnesses = Vec::new();
    let mut undecided = Vec::new();
    for (i, g) in images.iter().enumerate() {
        let e = g.approx.norm_p(p, tol + 3)?;
        let lo = e.lo() - &g.radius;
        let norm = Enclosure::new(if lo < Rat::zero() { Rat::zero() } else { lo }, e.hi() + &g.radius);
        let w = Witness { kind: WitnessKind::Norm { index: i }, evidence: Vec::from([norm.clone()]) };
        if norm.certainly_lt(&one) || norm.certainly_gt(&one) {
            witnesses.push(w);
        } else if !(norm.certainly_gt(&(&one - &eps)) && norm.certainly_lt(&(&one + &eps))) {
            undecided.push(w);
        }
    }
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let (a, b) = (&images[i], &images[j]);
            let coords: BTreeSet<usize> = a.approx.support().indices().chain(b.approx.support().indices()).collect();
            for n in coords {
                let evidence = || Vec::from([a.coordinate(n, tol + 4), b.coordinate(n, tol + 4)]);
                let kind = WitnessKind::Overlap { first: i, second: j, coordinate: n };
                if a.certainly_nonzero(n) && b.certainly_nonzero(n) {
                    witnesses.push(Witness { kind, evidence: evidence() });
                    continue;
                }
                let ev = evidence();
                if !(ev[0].certainly_lt(&eps) || ev[1].certainly_lt(&eps)) {
                    undecided.push(Witness { kind, evidence: ev });
                }
            }
            // coordinates outside both truncations are bounded by the radii
            if a.radius >= eps && b.radius >= eps {
                let kind = WitnessKind::Overlap { first: i, second: j, coordinate: usize::MAX };
                let ev = Vec::from([Enclosure::new(Rat::zero(), a.radius.clone()), Enclosure::new(Rat::zero(), b.radius.clone())]);
                undecided.push(Witness { kind, evidence: ev });
            }
        }
    }
    let verdict = if !witnesses.is_empty() {
        Verdict::Violates
    } else if !undecided.is_empty() {
        Verdict::Unknown
    } else {
        Verdict::Conforms
    };
    Ok(ClassifierVerdict { verdict, tol, witnesses, undecided })
}
