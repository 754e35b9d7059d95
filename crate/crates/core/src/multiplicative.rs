//! Multiplicative functions `M: [0,1]^k -> R` written as products of
//! per-coordinate atoms, together with their additivity defects and
//! non-additivity witnesses.

use serde::{Deserialize, Serialize};

use crate::domain::{interior_grid, DkPair, KVec};
use crate::error::{Error, Result};
use crate::scan::{self, Exec};

/// Default threshold below which a defect is treated as zero.
pub const DEFAULT_TAU: f64 = 1e-6;

/// A multiplicative function of one variable on `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Atom {
    /// `t ↦ t^alpha`, `alpha > 0`, with value 0 at `t = 0`.
    Power {
        alpha: f64,
    },
    One,
    Zero,
}

impl Atom {
    pub fn power(alpha: f64) -> Atom {
        assert!(
            alpha > 0.0 && alpha.is_finite(),
            "power atom needs alpha > 0, got {alpha}"
        );
        Atom::Power { alpha }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Atom::Power { alpha } => {
                if t == 0.0 {
                    0.0
                } else if alpha == 1.0 {
                    t
                } else {
                    t.powf(alpha)
                }
            }
            Atom::One => 1.0,
            Atom::Zero => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Atom::Power { alpha } if !(alpha > 0.0 && alpha.is_finite()) => Err(Error::Config(
                format!("power atom needs a finite alpha > 0, got {alpha}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Structural classification of a multiplicative function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Class {
    ZeroFn,
    ConstOne,
    /// `M(x) = x_j`, `j` counted from 1.
    Projection(usize),
    NonAdditive,
}

/// `M(x) = Π m_i(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Atom>", try_from = "Vec<Atom>")]
pub struct MultiplicativeSpec {
    atoms: Vec<Atom>,
}

impl From<MultiplicativeSpec> for Vec<Atom> {
    fn from(m: MultiplicativeSpec) -> Self {
        m.atoms
    }
}

impl TryFrom<Vec<Atom>> for MultiplicativeSpec {
    type Error = Error;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        MultiplicativeSpec::new(atoms)
    }
}

/// A non-additivity witness `q*` with its defect `M(q*) + M(1-q*) - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub qstar: KVec,
    pub defect: f64,
}

impl MultiplicativeSpec {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Config(
                "multiplicative spec needs at least one atom".into(),
            ));
        }
        atoms.iter().try_for_each(Atom::validate)?;
        Ok(MultiplicativeSpec { atoms })
    }

    /// The same power atom on each of `k` coordinates.
    pub fn power(alpha: f64, k: usize) -> Self {
        Self::new(vec![Atom::power(alpha); k]).expect("k >= 1")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms.len()
    }

    /// Evaluates `M(x)`. Panics if `x` has the wrong dimension.
    #[inline]
    pub fn eval(&self, x: &KVec) -> f64 {
        assert_eq!(
            x.dim(),
            self.dim(),
            "point dimension does not match the atom count"
        );
        self.atoms
            .iter()
            .zip(x.coords())
            .map(|(a, &t)| a.eval(t))
            .product()
    }

    /// `M(q) + M(1 - q) - 1`.
    pub fn additivity_defect(&self, q: &KVec) -> f64 {
        self.eval(q) + self.eval(&q.complement()) - 1.0
    }

    /// `max |M(x+y) - M(x) - M(y)|` over the grid.
    pub fn dk_additivity_defect(&self, grid: &[DkPair]) -> Result<f64> {
        let m = scan::try_max(Exec::default(), grid, |p| {
            let s = p.x().add(p.y())?;
            Ok::<_, Error>((self.eval(&s) - self.eval(p.x()) - self.eval(p.y())).abs())
        })?;
        m.map(|a| a.value).ok_or(Error::EmptyGrid)
    }

    /// Interior grid point of largest `|defect|`, or `NoWitness` when that
    /// maximum falls below `tau`.
    pub fn find_witness(&self, m: u32, tau: f64) -> Result<Witness> {
        assert!(m >= 2 && tau > 0.0);
        let grid: Vec<KVec> = interior_grid(self.dim(), m).collect();
        let best = scan::max(Exec::default(), &grid, |q| self.additivity_defect(q).abs())
            .ok_or(Error::EmptyGrid)?;
        if best.value < tau {
            return Err(Error::NoWitness {
                max_defect: best.value,
                tau,
            });
        }
        let qstar = grid[best.index].clone();
        let defect = self.additivity_defect(&qstar);
        Ok(Witness { qstar, defect })
    }

    /// Structural classification. `NonAdditive` covers every spec that is not
    /// zero, constant one or a projection; whether a witness is found at a
    /// given resolution is a separate question for [`Self::find_witness`].
    pub fn classify(&self) -> Class {
        if self.atoms.iter().any(|a| matches!(a, Atom::Zero)) {
            return Class::ZeroFn;
        }
        if self.atoms.iter().all(|a| matches!(a, Atom::One)) {
            return Class::ConstOne;
        }
        let mut identity = self
            .atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, Atom::Power { alpha } if *alpha == 1.0));
        let rest_one = |skip: usize| {
            self.atoms
                .iter()
                .enumerate()
                .all(|(i, a)| i == skip || matches!(a, Atom::One))
        };
        match (identity.next(), identity.next()) {
            (Some((j, _)), None) if rest_one(j) => Class::Projection(j + 1),
            _ => Class::NonAdditive,
        }
    }

    /// Upper bound `B` of `M` on the cube.
    pub fn upper_bound(&self) -> f64 {
        if self.atoms.iter().any(|a| matches!(a, Atom::Zero)) {
            0.0
        } else {
            1.0
        }
    }
}
