//! Diagonal operators `V(f)_k = Σ_i b_{ik} f_i²` and the three-parameter
//! family `V(f) = (f1², a·f2² + b·f3², c·f3²)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::QqoTensor;
use crate::pauli::StateVec;
use crate::tolerance::DEFAULT;
use crate::vec3::R3;

/// Diagonal operator, `b[i][k] = b_{ii,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DiagonalQO {
    pub b: [[f64; 3]; 3],
}

impl DiagonalQO {
    pub fn new(b: [[f64; 3]; 3]) -> Self {
        Self { b }
    }

    pub fn to_tensor(&self) -> QqoTensor {
        diagonal_to_tensor(self)
    }

    /// `Σ_k max_i b_{ik}²`.
    fn bb3_value(&self) -> f64 {
        (0..3)
            .map(|k| (0..3).map(|i| self.b[i][k] * self.b[i][k]).fold(0.0, f64::max))
            .sum()
    }
}

pub fn diagonal_to_tensor(d: &DiagonalQO) -> QqoTensor {
    QqoTensor::from_fn(|i, j, k| if i == j { d.b[i][k] } else { 0.0 })
}

/// The diagonal part of `t`, if `t` has no off-diagonal coefficients.
pub fn to_diagonal(t: &QqoTensor) -> Option<DiagonalQO> {
    for i in 0..3 {
        for j in 0..3 {
            if i != j && (0..3).any(|k| t.get(i, j, k) != 0.0) {
                return None;
            }
        }
    }
    Some(DiagonalQO {
        b: std::array::from_fn(|i| std::array::from_fn(|k| t.get(i, i, k))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AbcParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidArgument("a, b, c must be finite".into()));
        }
        Ok(Self { a, b, c })
    }

    pub fn to_tensor(&self) -> QqoTensor {
        abc_to_tensor(self)
    }

    pub fn to_diagonal(&self) -> DiagonalQO {
        DiagonalQO::new([[1.0, 0.0, 0.0], [0.0, self.a, 0.0], [0.0, self.b, self.c]])
    }
}

pub fn abc_to_tensor(p: &AbcParams) -> QqoTensor {
    let mut t = QqoTensor::single(0, 0, 0, 1.0);
    t.set(1, 1, 1, p.a);
    t.set(2, 2, 1, p.b);
    t.set(2, 2, 2, p.c);
    t
}

/// Recovers `(a, b, c)` if `t` has exactly the shape of the family.
pub fn to_abc(t: &QqoTensor) -> Option<AbcParams> {
    let p = AbcParams { a: t.get(1, 1, 1), b: t.get(2, 2, 1), c: t.get(2, 2, 2) };
    (abc_to_tensor(&p) == *t).then_some(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyVerdict {
    pub holds: bool,
    pub value: f64,
}

/// `Σ_k max_i b_{ik}² <= 1`, sufficient for the product-state bound.
pub fn check_bb3(d: &DiagonalQO) -> FamilyVerdict {
    let value = d.bb3_value();
    FamilyVerdict { holds: value <= 1.0 + DEFAULT.family, value }
}

/// `Σ_k max_i b_{ik}² < 1`, under which `0` is the unique stable fixed point.
pub fn check_bb4(d: &DiagonalQO) -> FamilyVerdict {
    let value = d.bb3_value();
    FamilyVerdict { holds: value < 1.0 - DEFAULT.family, value }
}

/// `max{a², b²} + c² <= 1`.
pub fn check_bb5(p: &AbcParams) -> FamilyVerdict {
    let value = (p.a * p.a).max(p.b * p.b) + p.c * p.c;
    FamilyVerdict { holds: value <= 1.0 + DEFAULT.family, value }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NotKsVerdict {
    pub proved_not_ks: bool,
    /// `a² + 2·max{b², c²}`.
    pub e14: f64,
    /// `|a| + |b|`.
    pub e15: f64,
}

pub fn not_ks_predicate(p: &AbcParams) -> NotKsVerdict {
    let e15 = p.a.abs() + p.b.abs();
    NotKsVerdict {
        proved_not_ks: check_bb5(p).holds && e15 > 1.0 + DEFAULT.family,
        e14: p.a * p.a + 2.0 * (p.b * p.b).max(p.c * p.c),
        e15,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AbcCase {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Silent,
}

impl AbcCase {
    pub fn label(self) -> &'static str {
        match self {
            AbcCase::I => "i",
            AbcCase::Ii => "ii",
            AbcCase::Iii => "iii",
            AbcCase::Iv => "iv",
            AbcCase::V => "v",
            AbcCase::Vi => "vi",
            AbcCase::Silent => "silent",
        }
    }
}

impl fmt::Display for AbcCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcPrediction {
    pub case: AbcCase,
    /// `None` when the theorem is silent.
    pub limit: Option<R3>,
}

fn is_one(x: f64) -> bool {
    (x.abs() - 1.0).abs() <= DEFAULT.case_equality
}

/// Case analysis of the family's dynamics; requires `max{a², b²} + c² <= 1`.
pub fn abc_classify(p: &AbcParams, f0: &StateVec) -> Result<AbcPrediction> {
    let bb5 = check_bb5(p);
    if !bb5.holds {
        return Err(Error::HypothesisUnmet(format!(
            "max(a^2, b^2) + c^2 = {} exceeds 1",
            bb5.value
        )));
    }
    let [f1, f2, f3] = f0.get();
    let zero = [0.0; 3];
    let predict = |case, limit| Ok(AbcPrediction { case, limit });

    if f0.get() == zero || f0.get() == [1.0, 0.0, 0.0] {
        return predict(AbcCase::I, Some(f0.get()));
    }
    if is_one(f1) {
        return predict(AbcCase::Ii, Some([1.0, 0.0, 0.0]));
    }
    if is_one(p.c) {
        if is_one(f3) {
            return predict(AbcCase::Iii, Some([0.0, 0.0, p.c]));
        }
        if f1.abs().max(f3.abs()) < 1.0 {
            return predict(AbcCase::Iii, Some(zero));
        }
    }
    if is_one(p.a) {
        if is_one(p.a * f2 * f2 + p.b * f3 * f3) {
            return predict(AbcCase::Iv, Some([0.0, p.a, 0.0]));
        }
        return predict(AbcCase::Iv, Some(zero));
    }
    if is_one(p.b) && p.a.abs() < 1.0 {
        return predict(AbcCase::V, Some(zero));
    }
    if bb5.value < 1.0 - DEFAULT.case_equality {
        return predict(AbcCase::Vi, Some(zero));
    }
    predict(AbcCase::Silent, None)
}

/// Parameter-level regime: which case of the analysis governs generic
/// starting points, or `bb5_violated` / `silent`.
pub fn abc_regime(p: &AbcParams) -> &'static str {
    let bb5 = check_bb5(p);
    if !bb5.holds {
        "bb5_violated"
    } else if is_one(p.c) {
        "iii"
    } else if is_one(p.a) {
        "iv"
    } else if is_one(p.b) && p.a.abs() < 1.0 {
        "v"
    } else if bb5.value < 1.0 - DEFAULT.case_equality {
        "vi"
    } else {
        "silent"
    }
}
