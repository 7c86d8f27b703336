//! Seeded test instances: preservers of both kinds, Jordan embeddings with
//! prescribed multiplicities, near misses, and operators on either side of
//! the extreme-point boundary.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    gaussian_matrix, haar_unitary_with, random_contraction, random_partial_isometry,
    random_projection, seeded_rng, ComplexMatrix, Tolerance,
};
use crate::preserver::{perturb, Verdict};
use crate::superop::{EmbeddingKind, SuperOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceKind {
    /// `A ↦ U·A·V`.
    HomPreserver,
    /// `A ↦ U·Aᵗ·V`.
    AntiPreserver,
    /// `A ↦ W·(A ⊕ … ⊕ A ⊕ Aᵗ ⊕ … ⊕ Aᵗ)·Wᴴ` with `p` and `q` copies.
    MixedJordan { p: usize, q: usize },
    /// `A ↦ (tr A / n)·I`.
    TracePinch,
    /// A fresh preserver plus a perturbation of Frobenius size `epsilon`.
    PerturbedPreserver { epsilon: f64 },
    /// `A ↦ C·A` for a random contraction `C`.
    RandomContraction,
}

impl InstanceKind {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::HomPreserver => "hom",
            Self::AntiPreserver => "anti",
            Self::MixedJordan { .. } => "mixed",
            Self::TracePinch => "trace-pinch",
            Self::PerturbedPreserver { .. } => "perturbed",
            Self::RandomContraction => "random-contraction",
        }
    }

    /// Ground-truth verdict, or `None` for maps outside the endomorphism case.
    pub fn expected_verdict(&self) -> Option<Verdict> {
        match *self {
            Self::HomPreserver | Self::AntiPreserver => Some(Verdict::Preserver),
            Self::MixedJordan { p, q } if p + q == 1 => Some(Verdict::Preserver),
            Self::MixedJordan { .. } => None,
            Self::TracePinch | Self::PerturbedPreserver { .. } | Self::RandomContraction => {
                Some(Verdict::NotPreserver)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    #[serde(flatten)]
    pub kind: InstanceKind,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(n: usize, kind: InstanceKind, seed: u64) -> Result<Self> {
        let spec = Self { n, kind, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInstance("n must be at least 1".into()));
        }
        match self.kind {
            InstanceKind::MixedJordan { p, q } if p + q == 0 => Err(Error::InvalidInstance(
                "mixed Jordan embedding needs p + q >= 1".into(),
            )),
            InstanceKind::PerturbedPreserver { epsilon }
                if !epsilon.is_finite() || epsilon < 0.0 =>
            {
                Err(Error::InvalidInstance(format!(
                    "epsilon must be finite and >= 0, got {epsilon}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Mixes `(seed, tag, index)` into a sub-seed (SplitMix64 finaliser chain),
/// so corpus members do not depend on generation order.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let mut h = mix(seed);
    for b in tag.bytes() {
        h = mix(h ^ b as u64);
    }
    mix(h ^ index)
}

fn haar_preserver<R: RngCore>(rng: &mut R, n: usize, transpose: bool) -> SuperOperator {
    let u = haar_unitary_with(rng, n);
    let v = haar_unitary_with(rng, n);
    let base = SuperOperator::from_left_right(&u, &v).expect("square factors");
    if transpose {
        SuperOperator::compose(&base, &SuperOperator::transpose_map(n)).expect("same size")
    } else {
        base
    }
}

/// Builds the map described by `spec`; identical specs give bit-identical maps.
pub fn generate(spec: &InstanceSpec) -> Result<SuperOperator> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = seeded_rng(spec.seed);
    match spec.kind {
        InstanceKind::HomPreserver => Ok(haar_preserver(&mut rng, n, false)),
        InstanceKind::AntiPreserver => Ok(haar_preserver(&mut rng, n, true)),
        InstanceKind::MixedJordan { p, q } => {
            let kinds: Vec<EmbeddingKind> = std::iter::repeat_n(EmbeddingKind::Id, p)
                .chain(std::iter::repeat_n(EmbeddingKind::Transpose, q))
                .collect();
            let w = haar_unitary_with(&mut rng, (p + q) * n);
            SuperOperator::direct_sum_embedding(&kinds, &w, &Tolerance::default())
        }
        InstanceKind::TracePinch => Ok(SuperOperator::trace_pinch(n)),
        InstanceKind::PerturbedPreserver { epsilon } => {
            let transpose = rng.random::<bool>();
            let base = haar_preserver(&mut rng, n, transpose);
            perturb(&base, epsilon, rng.next_u64())
        }
        InstanceKind::RandomContraction => {
            let c = random_contraction(&mut rng, n);
            SuperOperator::from_left_right(&c, &ComplexMatrix::identity(n))
        }
    }
}

const MIXED_PATTERNS: [(usize, usize); 6] = [(1, 1), (2, 0), (0, 2), (2, 1), (1, 2), (1, 0)];
const PERTURBATIONS: [f64; 2] = [1e-3, 1e-2];

/// Kind template `index` of each family, in a fixed order.
fn corpus_kinds(index: usize) -> [InstanceKind; 6] {
    let (p, q) = MIXED_PATTERNS[index % MIXED_PATTERNS.len()];
    [
        InstanceKind::HomPreserver,
        InstanceKind::AntiPreserver,
        InstanceKind::MixedJordan { p, q },
        InstanceKind::TracePinch,
        InstanceKind::PerturbedPreserver {
            epsilon: PERTURBATIONS[index % PERTURBATIONS.len()],
        },
        InstanceKind::RandomContraction,
    ]
}

/// `per_kind` instances of each of the six kinds at every size.
pub fn corpus(
    sizes: &[usize],
    per_kind: usize,
    seed: u64,
) -> Result<Vec<(InstanceSpec, SuperOperator)>> {
    let mut out = Vec::with_capacity(sizes.len() * per_kind * 6);
    for &n in sizes {
        for index in 0..per_kind {
            for kind in corpus_kinds(index) {
                let tag = format!("{}/n={n}", kind.tag());
                let spec = InstanceSpec::new(n, kind, derive_seed(seed, &tag, index as u64))?;
                let phi = generate(&spec)?;
                out.push((spec, phi));
            }
        }
    }
    Ok(out)
}

/// Families for extreme-point experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorClass {
    Unitary,
    Projection { rank: usize },
    PartialIsometry { rank: usize },
    Contraction,
    Gaussian,
}

impl OperatorClass {
    pub fn is_unitary(&self, n: usize) -> bool {
        match *self {
            Self::Unitary => true,
            Self::Projection { rank } => rank == n,
            Self::PartialIsometry { rank } => rank == n,
            Self::Contraction | Self::Gaussian => false,
        }
    }
}

pub fn sample_operator<R: RngCore>(rng: &mut R, n: usize, class: OperatorClass) -> ComplexMatrix {
    match class {
        OperatorClass::Unitary => haar_unitary_with(rng, n),
        OperatorClass::Projection { rank } => random_projection(rng, n, rank),
        OperatorClass::PartialIsometry { rank } => random_partial_isometry(rng, n, rank),
        OperatorClass::Contraction => random_contraction(rng, n),
        OperatorClass::Gaussian => gaussian_matrix(rng, n, n),
    }
}

/// `count` operators cycling through unitaries, projections and partial
/// isometries of every rank `0..=n`, contractions and Gaussian matrices.
pub fn mixed_operators(n: usize, count: usize, seed: u64) -> Vec<(OperatorClass, ComplexMatrix)> {
    let mut classes = vec![
        OperatorClass::Unitary,
        OperatorClass::Contraction,
        OperatorClass::Gaussian,
    ];
    for rank in 0..=n {
        classes.push(OperatorClass::Projection { rank });
        classes.push(OperatorClass::PartialIsometry { rank });
    }
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|k| {
            let class = classes[k % classes.len()];
            (class, sample_operator(&mut rng, n, class))
        })
        .collect()
}
