//! Machine-readable reports. Every float is printed as `{:.16e}` (17
//! significant digits), so values round-trip exactly; non-finite values
//! become `null` in JSON.

use num_complex::Complex64;
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::dense::{eig_hermitian, DenseHermitian};
use crate::dynamics::{self, StabilityCertificates, Terminal, TildeProbe, Trajectory};
use crate::error::{Error, Result};
use crate::families::{
    abc_regime, check_bb3, check_bb4, check_bb5, not_ks_predicate, to_abc, to_diagonal, AbcParams,
};
use crate::format::OperatorSpec;
use crate::ks::{self, KsReport, KsWitness};
use crate::operator::{
    check_coassociativity, check_dstar1, check_dstar3, check_flip_symmetry, triple_norm, QqoTensor,
};
use crate::pauli::{PauliElement, StateVec};
use crate::tolerance::ScanConfig;
use crate::vec3::{C3, R3};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A float serialized with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(fmt_float(self.0))
            .map_err(S::Error::custom)?
            .serialize(s)
    }
}

fn r3(v: &R3) -> [Num; 3] {
    v.map(Num)
}

fn cnum(z: Complex64) -> [Num; 2] {
    [Num(z.re), Num(z.im)]
}

fn c3(v: &C3) -> [[Num; 2]; 3] {
    v.map(cnum)
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorIdentity {
    pub file: String,
    pub sha256: String,
    pub format: &'static str,
}

impl OperatorIdentity {
    pub fn new(file: &str, contents: &[u8], spec: &OperatorSpec) -> Self {
        Self {
            file: file.to_string(),
            sha256: hex::encode(Sha256::digest(contents)),
            format: spec.format_name(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigView {
    pub seed: u64,
    pub sphere_points: usize,
    pub pair_samples: usize,
    pub oracle_samples: usize,
    pub refine_steps: usize,
}

impl From<&ScanConfig> for ConfigView {
    fn from(c: &ScanConfig) -> Self {
        Self {
            seed: c.seed,
            sphere_points: c.sphere_points,
            pair_samples: c.pair_samples,
            oracle_samples: c.oracle_samples,
            refine_steps: c.refine_steps,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessView {
    pub channel: &'static str,
    pub margin: Num,
    pub violation: bool,
    pub f: [Num; 3],
    pub w: [[Num; 2]; 3],
    pub w0: [Num; 2],
}

impl From<&KsWitness> for WitnessView {
    fn from(w: &KsWitness) -> Self {
        Self {
            channel: w.channel.as_str(),
            margin: Num(w.margin),
            violation: w.is_violation(),
            f: r3(&w.f),
            w: c3(&w.w),
            w0: cnum(w.w0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Dstar1View {
    pub holds: bool,
    pub worst: Num,
    pub margin: Num,
    pub witness_f: [Num; 3],
    pub witness_p: [Num; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictView {
    pub holds: bool,
    pub value: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleNormView {
    pub estimate: Num,
    pub at_most_one: bool,
    pub argmax: [Num; 3],
    pub grid_estimate: Num,
    pub gap_estimate: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityBlock {
    pub dstar1: Dstar1View,
    pub dstar3: VerdictView,
    pub triple_norm: TripleNormView,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureBlock {
    pub flip_symmetric: bool,
    pub max_asymmetry: Num,
    pub coassociativity_deviation: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct KsBlock {
    pub verdict: &'static str,
    pub violation_found: bool,
    pub worst: WitnessView,
    pub ks11: WitnessView,
    pub ks2: WitnessView,
    pub oracle: WitnessView,
    pub oracle_min_eigenvalue: Num,
}

impl From<&KsReport> for KsBlock {
    fn from(r: &KsReport) -> Self {
        Self {
            verdict: r.verdict(),
            violation_found: r.violation_found(),
            worst: (&r.worst()).into(),
            ks11: (&r.ks11).into(),
            ks2: (&r.ks2).into(),
            oracle: (&r.oracle).into(),
            oracle_min_eigenvalue: Num(r.oracle.margin),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TildeView {
    pub bounded_up_to_horizon: bool,
    pub sup_seen: Num,
    pub converged_to_zero: bool,
}

impl From<&TildeProbe> for TildeView {
    fn from(p: &TildeProbe) -> Self {
        Self {
            bounded_up_to_horizon: p.bounded_up_to_horizon,
            sup_seen: Num(p.sup_seen),
            converged_to_zero: p.converged_to_zero,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicsBlock {
    pub class: &'static str,
    pub alpha_k: [Num; 3],
    pub alpha: Num,
    pub alfa_contraction: bool,
    pub delta: [Num; 3],
    pub bb2: bool,
    pub bb33_n0: Option<usize>,
    pub bb_main: bool,
    pub tilde_orbit: TildeView,
    pub fixed_points: Vec<[Num; 3]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalBlock {
    pub bb3: VerdictView,
    pub bb4: VerdictView,
}

#[derive(Debug, Clone, Serialize)]
pub struct AbcBlock {
    pub a: Num,
    pub b: Num,
    pub c: Num,
    pub bb5: VerdictView,
    pub e14: Num,
    pub e15: Num,
    pub not_ks: bool,
    pub regime: &'static str,
    /// ks2 margin at `f = e1`, `w = e2`.
    pub ks2_at_e1_e2: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyBlock {
    pub diagonal: Option<DiagonalBlock>,
    pub abc: Option<AbcBlock>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub operator: OperatorIdentity,
    pub config: ConfigView,
    pub positivity: PositivityBlock,
    pub structure: StructureBlock,
    pub ks: KsBlock,
    pub dynamics: DynamicsBlock,
    pub family: FamilyBlock,
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub scan: ScanConfig,
    /// Subdivisions of the ball grid used to seed the fixed-point search.
    pub fixed_point_grid: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { scan: ScanConfig::default(), fixed_point_grid: 8 }
    }
}

fn verdict(holds: bool, value: f64) -> VerdictView {
    VerdictView { holds, value: Num(value) }
}

fn dynamics_block(t: &QqoTensor, fixed_point_grid: usize) -> DynamicsBlock {
    let c: StabilityCertificates = dynamics::certificates(t);
    let probe = dynamics::tilde_orbit_probe(t, dynamics::DEFAULT_TILDE_HORIZON);
    let seeds = dynamics::default_seeds(fixed_point_grid);
    let fixed = dynamics::find_fixed_points(t, &seeds, dynamics::DEFAULT_FIXED_POINT_TOL);
    DynamicsBlock {
        class: c.label(),
        alpha_k: r3(&c.alpha_k),
        alpha: Num(c.alpha),
        alfa_contraction: c.alfa_contraction,
        delta: r3(&c.delta),
        bb2: c.bb2,
        bb33_n0: c.bb33_n0,
        bb_main: c.bb_main,
        tilde_orbit: (&probe).into(),
        fixed_points: fixed.iter().map(r3).collect(),
    }
}

fn abc_block(p: &AbcParams) -> Result<AbcBlock> {
    let bb5 = check_bb5(p);
    let nk = not_ks_predicate(p);
    let e2 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    Ok(AbcBlock {
        a: Num(p.a),
        b: Num(p.b),
        c: Num(p.c),
        bb5: verdict(bb5.holds, bb5.value),
        e14: Num(nk.e14),
        e15: Num(nk.e15),
        not_ks: nk.proved_not_ks,
        regime: abc_regime(p),
        ks2_at_e1_e2: Num(ks::ks2_margin(&p.to_tensor(), &StateVec::e1(), &e2)?),
    })
}

fn family_block(spec: &OperatorSpec, t: &QqoTensor) -> Result<FamilyBlock> {
    let diagonal = to_diagonal(t).map(|d| {
        let (b3, b4) = (check_bb3(&d), check_bb4(&d));
        DiagonalBlock { bb3: verdict(b3.holds, b3.value), bb4: verdict(b4.holds, b4.value) }
    });
    let abc = match spec {
        OperatorSpec::Abc(p) => Some(*p),
        _ => to_abc(t),
    };
    Ok(FamilyBlock { diagonal, abc: abc.as_ref().map(abc_block).transpose()? })
}

/// Runs every certificate on the operator.
pub fn classify(
    identity: OperatorIdentity,
    spec: &OperatorSpec,
    opts: &CheckOptions,
) -> Result<ClassificationReport> {
    let t = spec.tensor();
    let cfg = &opts.scan;
    let d1 = check_dstar1(&t, cfg);
    let d3 = check_dstar3(&t);
    let tn = triple_norm(&t, cfg.sphere_points, cfg.refine_steps);
    let flip = check_flip_symmetry(&t);
    let ks = ks::ks_scan(&t, cfg)?;
    Ok(ClassificationReport {
        operator: identity,
        config: cfg.into(),
        positivity: PositivityBlock {
            dstar1: Dstar1View {
                holds: d1.holds,
                worst: Num(d1.worst),
                margin: Num(d1.margin),
                witness_f: r3(&d1.witness_f),
                witness_p: r3(&d1.witness_p),
            },
            dstar3: verdict(d3.holds, d3.value),
            triple_norm: TripleNormView {
                estimate: Num(tn.estimate),
                at_most_one: tn.at_most_one(),
                argmax: r3(&tn.argmax),
                grid_estimate: Num(tn.grid_estimate),
                gap_estimate: Num(tn.gap_estimate),
            },
        },
        structure: StructureBlock {
            flip_symmetric: flip.symmetric,
            max_asymmetry: Num(flip.max_asymmetry),
            coassociativity_deviation: Num(check_coassociativity(&t)),
        },
        ks: (&ks).into(),
        dynamics: dynamics_block(&t, opts.fixed_point_grid),
        family: family_block(spec, &t)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DenseView {
    /// The element `x = w0 + w·σ` fed to the oracle.
    pub x_w0: [Num; 2],
    pub x_w: [[Num; 2]; 3],
    /// `Δ(x*x) - Δ(x)*Δ(x)` as rows of `[re, im]` pairs.
    pub matrix: Vec<Vec<[Num; 2]>>,
    pub eigenvalues: Vec<Num>,
    pub min_eigenvalue: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationView {
    pub f: [Num; 3],
    /// Smallest eigenvalue of `E_f(Δ(x*x) - Δ(x)*Δ(x))`.
    pub min_eigenvalue: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelDetail {
    pub witness: WitnessView,
    pub dense: DenseView,
    pub conditional_expectation: Option<ExpectationView>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub operator: OperatorIdentity,
    pub config: ConfigView,
    pub found: bool,
    pub worst: ChannelDetail,
    pub channels: Vec<ChannelDetail>,
}

impl WitnessReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

fn channel_detail(t: &QqoTensor, w: &KsWitness) -> ChannelDetail {
    let x: PauliElement = w.element();
    let m = ks::ks_difference_dense(t, &x);
    let eig = eig_hermitian(&DenseHermitian::with_tolerance(m.clone(), f64::INFINITY).expect("any tolerance"));
    let matrix = (0..4).map(|r| (0..4).map(|c| cnum(m[(r, c)])).collect()).collect();
    let conditional_expectation = match w.channel {
        ks::Channel::Oracle => None,
        _ => {
            let f = StateVec::clamped(w.f);
            Some(ExpectationView {
                f: r3(&w.f),
                min_eigenvalue: Num(ks::ef_difference(t, &f, &x).min_eigenvalue()),
            })
        }
    };
    ChannelDetail {
        witness: w.into(),
        dense: DenseView {
            x_w0: cnum(x.w0),
            x_w: c3(&x.w),
            matrix,
            min_eigenvalue: Num(eig[0]),
            eigenvalues: eig.into_iter().map(Num).collect(),
        },
        conditional_expectation,
    }
}

pub fn witness_report(
    identity: OperatorIdentity,
    spec: &OperatorSpec,
    cfg: &ScanConfig,
) -> Result<WitnessReport> {
    let t = spec.tensor();
    let r = ks::ks_scan(&t, cfg)?;
    Ok(WitnessReport {
        operator: identity,
        config: cfg.into(),
        found: r.violation_found(),
        worst: channel_detail(&t, &r.worst()),
        channels: r.channels().iter().map(|w| channel_detail(&t, w)).collect(),
    })
}

fn terminal_fields(t: &Terminal) -> (&'static str, Option<R3>) {
    match t {
        Terminal::FixedPoint(p) => (t.name(), Some(*p)),
        other => (other.name(), None),
    }
}

/// `n,f1,f2,f3,norm` rows, then a `terminal,<kind>,p1,p2,p3` row.
pub fn trajectory_csv(tr: &Trajectory) -> String {
    let mut s = String::from("n,f1,f2,f3,norm\n");
    for (n, f) in tr.points.iter().enumerate() {
        let norm = crate::vec3::real_norm(f);
        s += &format!(
            "{n},{},{},{},{}\n",
            fmt_float(f[0]),
            fmt_float(f[1]),
            fmt_float(f[2]),
            fmt_float(norm)
        );
    }
    let (kind, point) = terminal_fields(&tr.terminal);
    match point {
        Some(p) => s += &format!("terminal,{kind},{},{},{}\n", fmt_float(p[0]), fmt_float(p[1]), fmt_float(p[2])),
        None => s += &format!("terminal,{kind},,,\n"),
    }
    s
}

#[derive(Debug, Clone, Serialize)]
struct TrajectoryView {
    points: Vec<[Num; 3]>,
    terminal: &'static str,
    fixed_point: Option<[Num; 3]>,
}

pub fn trajectory_json(tr: &Trajectory) -> String {
    let (kind, point) = terminal_fields(&tr.terminal);
    to_json(&TrajectoryView {
        points: tr.points.iter().map(r3).collect(),
        terminal: kind,
        fixed_point: point.as_ref().map(r3),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub a: Num,
    pub b: Num,
    pub c: Num,
    pub bb5: bool,
    pub bb5_value: Num,
    pub e14: Num,
    pub e15: Num,
    pub not_ks: bool,
    pub dynamics_class: &'static str,
    pub ks_worst_margin: Num,
    pub ks_worst_channel: &'static str,
}

pub const SCAN_HEADER: &str =
    "a,b,c,bb5,bb5_value,e14,e15,not_ks,dynamics_class,ks_worst_margin,ks_worst_channel";

impl ScanRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_float(self.a.0),
            fmt_float(self.b.0),
            fmt_float(self.c.0),
            self.bb5,
            fmt_float(self.bb5_value.0),
            fmt_float(self.e14.0),
            fmt_float(self.e15.0),
            self.not_ks,
            self.dynamics_class,
            fmt_float(self.ks_worst_margin.0),
            self.ks_worst_channel,
        )
    }
}

pub fn scan_row(p: &AbcParams, cfg: &ScanConfig) -> Result<ScanRow> {
    let bb5 = check_bb5(p);
    let nk = not_ks_predicate(p);
    let worst = ks::ks_scan(&p.to_tensor(), cfg)?.worst();
    Ok(ScanRow {
        a: Num(p.a),
        b: Num(p.b),
        c: Num(p.c),
        bb5: bb5.holds,
        bb5_value: Num(bb5.value),
        e14: Num(nk.e14),
        e15: Num(nk.e15),
        not_ks: nk.proved_not_ks,
        dynamics_class: abc_regime(p),
        ks_worst_margin: Num(worst.margin),
        ks_worst_channel: worst.channel.as_str(),
    })
}

/// Rows in `a`-major order.
pub fn scan_abc(points: &[AbcParams], cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    points.iter().map(|p| scan_row(p, cfg)).collect()
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut s = format!("{SCAN_HEADER}\n");
    for r in rows {
        s += &r.csv();
        s.push('\n');
    }
    s
}

pub fn scan_json(rows: &[ScanRow]) -> String {
    to_json(&rows)
}

/// Cartesian product with `a` varying slowest.
pub fn abc_grid(a: &[f64], b: &[f64], c: &[f64]) -> Vec<AbcParams> {
    let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
    for &a in a {
        for &b in b {
            for &c in c {
                out.push(AbcParams { a, b, c });
            }
        }
    }
    out
}

/// Parses `lo:hi:step`, `lo:hi` (with `grid` evenly spaced points) or a single value.
/// Stepped ranges are generated as `lo + i·step`, so endpoints do not accumulate error.
pub fn parse_range(s: &str, grid: usize) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::InvalidArgument(format!("range `{s}`: {msg}"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad("expected numbers")))
        .collect::<Result<_>>()?;
    if parts.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    let out = match parts[..] {
        [v] => vec![v],
        [lo, hi] => {
            if grid == 0 {
                return Err(bad("grid must be positive"));
            }
            if hi < lo {
                return Err(bad("empty range"));
            }
            if grid == 1 {
                vec![lo]
            } else {
                (0..grid).map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64).collect()
            }
        }
        [lo, hi, step] => {
            if step <= 0.0 {
                return Err(bad("step must be positive"));
            }
            if hi < lo {
                return Err(bad("empty range"));
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            (0..n).map(|i| lo + step * i as f64).collect()
        }
        _ => return Err(bad("expected lo:hi:step, lo:hi or a single value")),
    };
    Ok(out)
}
