//! Qubit and two-qubit density operators, Bell measurements and Pauli
//! corrections.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Pure single-qubit state `α|0⟩ + β|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Qubit {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Qubit {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let q = Self { alpha, beta };
        q.check_normalized()?;
        Ok(q)
    }

    /// Point on the Bloch sphere at polar angle `theta` and azimuth `phi`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        Self {
            alpha: c((0.5 * theta).cos()),
            beta: Complex64::from_polar((0.5 * theta).sin(), phi),
        }
    }

    pub fn zero() -> Self {
        Self::bloch(0.0, 0.0)
    }

    pub fn one() -> Self {
        Self {
            alpha: c(0.0),
            beta: c(1.0),
        }
    }

    /// The six axis states: |0⟩, |1⟩, |+⟩, |−⟩, |+i⟩, |−i⟩.
    pub fn axis_states() -> [Self; 6] {
        use std::f64::consts::{FRAC_PI_2, PI};
        [
            Self::zero(),
            Self::one(),
            Self::bloch(FRAC_PI_2, 0.0),
            Self::bloch(FRAC_PI_2, PI),
            Self::bloch(FRAC_PI_2, FRAC_PI_2),
            Self::bloch(FRAC_PI_2, -FRAC_PI_2),
        ]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > STATE_TOL || !n.is_finite() {
            return Err(Error::NonNormalizedReference(n));
        }
        Ok(())
    }

    pub fn vector(&self) -> Vector2<Complex64> {
        Vector2::new(self.alpha, self.beta)
    }

    pub fn density(&self) -> Matrix2<Complex64> {
        let v = self.vector();
        v * v.adjoint()
    }
}

/// `⟨ψ|ρ|ψ⟩` for a single-qubit density operator.
pub fn qubit_fidelity(rho: &Matrix2<Complex64>, reference: &Qubit) -> Result<f64> {
    reference.check_normalized()?;
    let v = reference.vector();
    Ok((v.adjoint() * rho * v)[(0, 0)].re.clamp(0.0, 1.0))
}

/// The Bell basis, in the order used for measurement outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn vector(self) -> Vector4<Complex64> {
        let h = c(std::f64::consts::FRAC_1_SQRT_2);
        let z = c(0.0);
        match self {
            BellState::PhiPlus => Vector4::new(h, z, z, h),
            BellState::PhiMinus => Vector4::new(h, z, z, -h),
            BellState::PsiPlus => Vector4::new(z, h, h, z),
            BellState::PsiMinus => Vector4::new(z, h, -h, z),
        }
    }

    /// Pauli correction that maps the post-measurement state back to Φ⁺.
    pub fn correction(self) -> Matrix2<Complex64> {
        let x = Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0));
        let z = Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0));
        match self {
            BellState::PhiPlus => Matrix2::identity(),
            BellState::PhiMinus => z,
            BellState::PsiPlus => x,
            BellState::PsiMinus => z * x,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        }
    }
}

/// Density operator of a two-qubit system.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Matrix4<Complex64>,
}

impl TwoQubitState {
    pub fn new(rho: Matrix4<Complex64>) -> Result<Self> {
        let s = Self { rho };
        s.validate()?;
        Ok(s)
    }

    pub fn bell(b: BellState) -> Self {
        let v = b.vector();
        Self {
            rho: v * v.adjoint(),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: Matrix4::identity() * c(0.25),
        }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.rho;
        if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        if (r - r.adjoint()).iter().any(|z| z.norm() > STATE_TOL) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = r.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = r.symmetric_eigenvalues().min();
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("eigenvalue {min}")));
        }
        Ok(())
    }

    /// `⟨ψ|ρ|ψ⟩` against a pure two-qubit reference.
    pub fn fidelity(&self, reference: &Vector4<Complex64>) -> Result<f64> {
        let n = reference.norm_squared();
        if (n - 1.0).abs() > STATE_TOL {
            return Err(Error::NonNormalizedReference(n));
        }
        Ok((reference.adjoint() * self.rho * reference)[(0, 0)]
            .re
            .clamp(0.0, 1.0))
    }

    pub fn bell_fidelity(&self) -> f64 {
        self.fidelity(&BellState::PhiPlus.vector())
            .expect("Bell vectors are normalized")
    }

    /// Two-qubit depolarizing channel `ρ → (1−p)ρ + p·I/4`.
    pub fn depolarize(&self, p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self {
            rho: self.rho * c(1.0 - p) + Matrix4::identity() * c(0.25 * p),
        })
    }

    /// Phase flip with probability `q` on each qubit independently.
    pub fn dephase(&self, q: f64) -> Result<Self> {
        check_probability("q", q)?;
        let z = Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0));
        let i = Matrix2::<Complex64>::identity();
        let mut rho = self.rho;
        for op in [z.kronecker(&i), i.kronecker(&z)] {
            rho = rho * c(1.0 - q) + op * rho * op * c(q);
        }
        Ok(Self { rho })
    }

    fn to_dynamic(&self) -> DMatrix<Complex64> {
        DMatrix::from_column_slice(4, 4, self.rho.as_slice())
    }

    fn from_dynamic(m: &DMatrix<Complex64>) -> Self {
        Self {
            rho: Matrix4::from_column_slice(m.as_slice()),
        }
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::FactorOutOfRange { name, value: p });
    }
    Ok(())
}

/// How Bell-measurement outcomes are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BsmOutcomePolicy {
    /// Draw from the Born-rule probabilities.
    #[default]
    Sample,
    /// Force one outcome. Fails if it has zero probability.
    Fixed(BellState),
}

/// Result of a Bell measurement on the two middle qubits of
/// `L ⊗ M₁ ⊗ M₂ ⊗ R`, where `R` is one qubit and `L` has dimension `dl`.
pub(crate) struct Measured {
    pub outcome: BellState,
    /// Normalized state of `L ⊗ R` before the correction on `R`.
    pub state: DMatrix<Complex64>,
}

pub(crate) fn bell_measure<R: Rng + ?Sized>(
    joint: &DMatrix<Complex64>,
    dl: usize,
    policy: BsmOutcomePolicy,
    rng: &mut R,
) -> Result<Measured> {
    let idx = |l: usize, m: usize, r: usize| (l * 4 + m) * 2 + r;
    let project = |b: BellState| {
        let v = b.vector();
        let mut out = DMatrix::zeros(2 * dl, 2 * dl);
        for l in 0..dl {
            for r in 0..2 {
                for l2 in 0..dl {
                    for r2 in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for m in 0..4 {
                            for m2 in 0..4 {
                                acc += v[m].conj() * v[m2] * joint[(idx(l, m, r), idx(l2, m2, r2))];
                            }
                        }
                        out[(2 * l + r, 2 * l2 + r2)] = acc;
                    }
                }
            }
        }
        out
    };
    let branches: Vec<(BellState, DMatrix<Complex64>)> =
        BellState::ALL.iter().map(|&b| (b, project(b))).collect();
    let probs: Vec<f64> = branches.iter().map(|(_, m)| m.trace().re.max(0.0)).collect();
    let pick = match policy {
        BsmOutcomePolicy::Fixed(b) => BellState::ALL.iter().position(|&x| x == b).unwrap(),
        BsmOutcomePolicy::Sample => {
            let total: f64 = probs.iter().sum();
            let u = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut k = 3;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    k = i;
                    break;
                }
            }
            while probs[k] <= 0.0 {
                k -= 1;
            }
            k
        }
    };
    let p = probs[pick];
    if p <= 1e-15 {
        return Err(Error::InvalidState(format!(
            "outcome {} has zero probability",
            branches[pick].0.label()
        )));
    }
    let (outcome, m) = &branches[pick];
    Ok(Measured {
        outcome: *outcome,
        state: m / c(p),
    })
}

/// Apply `u` to the last qubit of a `(dl·2)`-dimensional state.
pub(crate) fn correct_last(state: &DMatrix<Complex64>, u: &Matrix2<Complex64>) -> DMatrix<Complex64> {
    let dl = state.nrows() / 2;
    let u = DMatrix::from_column_slice(2, 2, u.as_slice());
    let full = DMatrix::<Complex64>::identity(dl, dl).kronecker(&u);
    &full * state * full.adjoint()
}

/// Entanglement swap: Bell measurement on the inner qubits of
/// `left ⊗ right`, then the Pauli correction on the outer right qubit.
pub fn swap_once<R: Rng + ?Sized>(
    left: &TwoQubitState,
    right: &TwoQubitState,
    policy: BsmOutcomePolicy,
    rng: &mut R,
) -> Result<(TwoQubitState, BellState)> {
    left.validate()?;
    right.validate()?;
    let measured = swap_uncorrected(left, right, policy, rng)?;
    let out = correct_pair(&measured.0, measured.1);
    out.validate()?;
    Ok((out, measured.1))
}

pub(crate) fn swap_uncorrected<R: Rng + ?Sized>(
    left: &TwoQubitState,
    right: &TwoQubitState,
    policy: BsmOutcomePolicy,
    rng: &mut R,
) -> Result<(TwoQubitState, BellState)> {
    let joint = left.to_dynamic().kronecker(&right.to_dynamic());
    let m = bell_measure(&joint, 2, policy, rng)?;
    Ok((TwoQubitState::from_dynamic(&m.state), m.outcome))
}

pub(crate) fn correct_pair(state: &TwoQubitState, outcome: BellState) -> TwoQubitState {
    TwoQubitState::from_dynamic(&correct_last(&state.to_dynamic(), &outcome.correction()))
}

/// Teleport `input` through `pair` (first qubit at the sender). Returns the
/// receiver's state before correction and the measurement outcome.
pub(crate) fn teleport_uncorrected<R: Rng + ?Sized>(
    input: &Qubit,
    pair: &TwoQubitState,
    policy: BsmOutcomePolicy,
    rng: &mut R,
) -> Result<(Matrix2<Complex64>, BellState)> {
    let psi = DMatrix::from_column_slice(2, 2, input.density().as_slice());
    let joint = psi.kronecker(&pair.to_dynamic());
    let m = bell_measure(&joint, 1, policy, rng)?;
    Ok((Matrix2::from_column_slice(m.state.as_slice()), m.outcome))
}

pub(crate) fn correct_qubit(rho: &Matrix2<Complex64>, outcome: BellState) -> Matrix2<Complex64> {
    let u = outcome.correction();
    u * rho * u.adjoint()
}
