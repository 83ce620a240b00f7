//! Constructors for the concrete devices: a three-level machine joined to
//! its work reservoir through a two-level wire (absorption and driven
//! variants), the driven three-level system without a wire, and the bare
//! three-level absorption machine. Each builder evaluates the bosonic rate
//! function at the channel quanta and scales by the analytic mixing
//! coefficients; a numeric diagonalization cross-checks those tables.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Bath, BathKind, BathSpec, Edge, RateGraph, Vertex};

/// Bosonic rates (Γ_ω, Γ_-ω) for a transition of frequency ω > 0 coupled to
/// a thermal bath: Γ_ω = γ (ω/ω₀)^d [N(ω) + 1] and Γ_-ω = Γ_ω e^{-ω/T},
/// with N the Bose occupation evaluated through expm1 for stability.
pub fn bose_rate(omega: f64, bath: &BathSpec) -> Result<(f64, f64)> {
    if bath.kind == BathKind::WorkSource {
        return Err(Error::WorkSourceRate);
    }
    if !(omega > 0.0) {
        return Err(Error::NonpositiveFrequency(omega));
    }
    let x = omega / bath.temperature;
    let occupation_plus_one = 1.0 / (-(-x).exp_m1());
    let gamma_plus = bath.coupling * omega.powi(bath.dimension as i32) * occupation_plus_one;
    let gamma_minus = gamma_plus * (-x).exp();
    Ok((gamma_plus, gamma_minus))
}

/// Channel quanta closer than this (relative to the device frequency
/// scale) collapse a decay channel and invalidate the construction.
const CHANNEL_TOL: f64 = 1e-12;

/// Build one edge for a transition channel. `quantum` is the signed energy
/// the bath exchanges when the system moves `lo → hi` along the printed
/// table; a negative value flips the edge orientation.
fn channel_edge(
    id: usize,
    lo: usize,
    hi: usize,
    bath: &BathSpec,
    quantum: f64,
    weight: f64,
    scale: f64,
) -> Result<Edge> {
    if quantum.abs() <= CHANNEL_TOL * scale {
        return Err(Error::DegenerateSpectrum(format!(
            "channel ({lo},{hi}) via bath {} has vanishing quantum",
            bath.label
        )));
    }
    let (tail, head, q) = if quantum > 0.0 {
        (lo, hi, quantum)
    } else {
        (hi, lo, -quantum)
    };
    let (emission, absorption) = bose_rate(q, bath)?;
    Ok(Edge {
        id,
        tail,
        head,
        bath: bath.label,
        quantum: q,
        rate_up: weight * absorption,
        rate_down: weight * emission,
    })
}

fn check_bath(spec: &BathSpec, expect: Bath) -> Result<()> {
    if spec.label != expect {
        return Err(Error::InvalidParameters(format!(
            "bath labeled {} supplied where {} was expected",
            spec.label, expect
        )));
    }
    if spec.kind == BathKind::Thermal && !(spec.temperature > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "bath {} temperature must be positive",
            spec.label
        )));
    }
    if !(spec.coupling > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "bath {} coupling must be positive",
            spec.label
        )));
    }
    if spec.dimension == 0 {
        return Err(Error::InvalidParameters(format!(
            "bath {} dimension must be a positive integer",
            spec.label
        )));
    }
    Ok(())
}

fn reference_bath(label: Bath, temperature: f64) -> BathSpec {
    BathSpec::thermal(label, temperature, 3, 1e-6)
}

// ---------------------------------------------------------------------------
// Absorption machine with a two-level wire to the work bath
// ---------------------------------------------------------------------------

/// Parameters of the wire-coupled absorption machine. The detuning is
/// Δ = ω_h - ω_c - ω_w.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionWireParams {
    pub omega_c: f64,
    pub omega_h: f64,
    pub omega_w: f64,
    pub g: f64,
    pub bath_c: BathSpec,
    pub bath_h: BathSpec,
    pub bath_w: BathSpec,
}

impl AbsorptionWireParams {
    /// Reference operating point: T_c = 9, T_h = 10, T_w = 20, ω_h = 1,
    /// g = 0.05, resonant wire (Δ = 0), d_α = 3, γ_α = 1e-6.
    pub fn reference(omega_c: f64) -> Self {
        AbsorptionWireParams {
            omega_c,
            omega_h: 1.0,
            omega_w: 1.0 - omega_c,
            g: 0.05,
            bath_c: reference_bath(Bath::Cold, 9.0),
            bath_h: reference_bath(Bath::Hot, 10.0),
            bath_w: reference_bath(Bath::Work, 20.0),
        }
    }

    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.omega_w = self.omega_h - self.omega_c - delta;
        self
    }

    pub fn delta(&self) -> f64 {
        self.omega_h - self.omega_c - self.omega_w
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_h", self.omega_h),
            ("omega_w", self.omega_w),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameters(format!("{name} must be > 0")));
            }
        }
        if !(self.g > 0.0) {
            return Err(Error::DegenerateSpectrum(
                "g must be positive; g = 0 merges the hybridized levels".into(),
            ));
        }
        check_bath(&self.bath_c, Bath::Cold)?;
        check_bath(&self.bath_h, Bath::Hot)?;
        check_bath(&self.bath_w, Bath::Work)?;
        Ok(())
    }

    /// Regime cautions mirroring the weak-coupling assumptions. Empty when
    /// γ_α ≪ g ≪ ω_c comfortably holds.
    pub fn validity_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let max_gamma = self
            .bath_c
            .coupling
            .max(self.bath_h.coupling)
            .max(self.bath_w.coupling);
        if max_gamma / self.g > 0.1 {
            warnings.push(format!(
                "bath coupling {max_gamma:.3e} is not small against g = {:.3e}",
                self.g
            ));
        }
        if self.g / self.omega_c > 0.5 {
            warnings.push(format!(
                "g = {:.3e} is not small against omega_c = {:.3e}",
                self.g, self.omega_c
            ));
        }
        warnings
    }
}

/// Eigenfrequencies and level-mixing amplitudes of the wire-coupled
/// absorption machine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionCoefficients {
    pub omega: [f64; 6],
    pub c_plus: f64,
    pub c_minus: f64,
    pub cprime_plus: f64,
    pub cprime_minus: f64,
}

impl AbsorptionCoefficients {
    pub fn from_params(params: &AbsorptionWireParams) -> Self {
        let delta = params.delta();
        let g = params.g;
        let root = (delta * delta + 4.0 * g * g).sqrt();
        let omega = [
            0.0,
            params.omega_w,
            params.omega_c,
            (2.0 * params.omega_h - delta - root) / 2.0,
            (2.0 * params.omega_h - delta + root) / 2.0,
            params.omega_w + params.omega_h,
        ];
        // root ∓ delta cancel badly when g ≪ |delta|; the conjugate form
        // root² - delta² = 4g² evaluates the small branch stably.
        let root_minus_delta = if delta > 0.0 {
            4.0 * g * g / (root + delta)
        } else {
            root - delta
        };
        let root_plus_delta = if delta < 0.0 {
            4.0 * g * g / (root - delta)
        } else {
            root + delta
        };
        let d_plus = (4.0 * g * g + root_plus_delta * root_plus_delta).sqrt();
        let d_minus = (4.0 * g * g + root_minus_delta * root_minus_delta).sqrt();
        AbsorptionCoefficients {
            omega,
            c_plus: root_minus_delta * d_plus / (4.0 * g * root),
            c_minus: -root_plus_delta * d_minus / (4.0 * g * root),
            cprime_plus: d_plus / (2.0 * root),
            cprime_minus: d_minus / (2.0 * root),
        }
    }
}

/// Assemble the six-level, eleven-edge graph of the wire-coupled
/// absorption machine.
pub fn build_absorption_wire(
    params: &AbsorptionWireParams,
) -> Result<(RateGraph, AbsorptionCoefficients)> {
    params.validate()?;
    let coeff = AbsorptionCoefficients::from_params(params);
    let w = &coeff.omega;
    let scale = params.omega_h.max(params.omega_w).max(params.omega_c);

    let cm2 = coeff.c_minus * coeff.c_minus;
    let cp2 = coeff.c_plus * coeff.c_plus;
    let cpm2 = coeff.cprime_minus * coeff.cprime_minus;
    let cpp2 = coeff.cprime_plus * coeff.cprime_plus;

    let channels: [(usize, usize, &BathSpec, f64, f64); 11] = [
        (1, 3, &params.bath_c, w[2] - w[0], 1.0),
        (2, 4, &params.bath_c, w[3] - w[1], cm2),
        (2, 5, &params.bath_c, w[4] - w[1], cp2),
        (1, 4, &params.bath_h, w[3] - w[0], cpm2),
        (1, 5, &params.bath_h, w[4] - w[0], cpp2),
        (2, 6, &params.bath_h, w[5] - w[1], 1.0),
        (1, 2, &params.bath_w, w[1] - w[0], 1.0),
        (3, 4, &params.bath_w, w[3] - w[2], cm2),
        (3, 5, &params.bath_w, w[4] - w[2], cp2),
        (4, 6, &params.bath_w, w[5] - w[3], cpm2),
        (5, 6, &params.bath_w, w[5] - w[4], cpp2),
    ];

    let vertices = w
        .iter()
        .enumerate()
        .map(|(k, &frequency)| Vertex {
            index: k + 1,
            frequency,
        })
        .collect();
    let edges = channels
        .iter()
        .enumerate()
        .map(|(id, &(lo, hi, bath, quantum, weight))| {
            channel_edge(id, lo, hi, bath, quantum, weight, scale)
        })
        .collect::<Result<Vec<_>>>()?;
    let graph = RateGraph::new(
        vertices,
        edges,
        vec![
            params.bath_c.clone(),
            params.bath_h.clone(),
            params.bath_w.clone(),
        ],
    );
    Ok((graph, coeff))
}

// ---------------------------------------------------------------------------
// Driven machine with a two-level wire to a classical field
// ---------------------------------------------------------------------------

/// Parameters of the wire-coupled driven machine. The field is resonant:
/// its frequency is ω_w = ω_h - ω_c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivenWireParams {
    pub omega_c: f64,
    pub omega_h: f64,
    pub g: f64,
    pub lambda: f64,
    pub bath_c: BathSpec,
    pub bath_h: BathSpec,
}

impl DrivenWireParams {
    /// Reference operating point: g = 0.25, λ = 0.05, baths as in the
    /// absorption reference without the work bath.
    pub fn reference(omega_c: f64) -> Self {
        DrivenWireParams {
            omega_c,
            omega_h: 1.0,
            g: 0.25,
            lambda: 0.05,
            bath_c: reference_bath(Bath::Cold, 9.0),
            bath_h: reference_bath(Bath::Hot, 10.0),
        }
    }

    pub fn omega_w(&self) -> f64 {
        self.omega_h - self.omega_c
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0) || !(self.omega_h > 0.0) {
            return Err(Error::InvalidParameters(
                "transition frequencies must be > 0".into(),
            ));
        }
        if !(self.omega_w() > 0.0) {
            return Err(Error::InvalidParameters(
                "resonant field frequency omega_h - omega_c must be > 0".into(),
            ));
        }
        if !(self.g > 0.0) || !(self.lambda > 0.0) {
            return Err(Error::DegenerateSpectrum(
                "g and lambda must be positive to split the dressed levels".into(),
            ));
        }
        check_bath(&self.bath_c, Bath::Cold)?;
        check_bath(&self.bath_h, Bath::Hot)?;
        Ok(())
    }

    pub fn validity_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let max_gamma = self.bath_c.coupling.max(self.bath_h.coupling);
        let min_coupling = self.g.min(self.lambda);
        if max_gamma / min_coupling > 0.1 {
            warnings.push(format!(
                "bath coupling {max_gamma:.3e} is not small against min(g, lambda) = {min_coupling:.3e}"
            ));
        }
        if self.g.max(self.lambda) / self.omega_c > 0.5 {
            warnings.push(format!(
                "couplings are not small against omega_c = {:.3e}",
                self.omega_c
            ));
        }
        warnings
    }
}

/// Dressed-level frequencies and transition weights of the driven machine.
/// `c_sq[i-1][j-3]` is |c_ij|² for the pair (i, j), i ∈ {1,2}, j ∈ {3..6}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivenCoefficients {
    pub omega: [f64; 6],
    pub u_plus: f64,
    pub u_minus: f64,
    pub c_sq: [[f64; 4]; 2],
}

impl DrivenCoefficients {
    pub fn from_params(params: &DrivenWireParams) -> Self {
        let g = params.g;
        let lambda = params.lambda;
        let root = (4.0 * lambda * lambda + g * g).sqrt();
        let omega = [
            -lambda,
            lambda,
            -(g + root) / 2.0,
            (g - root) / 2.0,
            (root - g) / 2.0,
            (g + root) / 2.0,
        ];
        let u_plus = 2.0 * lambda / (g + root);
        // g - root ≈ -2λ²/g cancels for λ ≪ g; the conjugate form
        // (g - root)(g + root) = -4λ² gives the stable equivalent.
        let u_minus = -(g + root) / (2.0 * lambda);
        let sq = |u: f64, sign: f64| (1.0 + sign * u).powi(2) / (4.0 * (1.0 + u * u));
        // Rows are i = 1, 2; columns are j = 3, 4, 5, 6.
        let c_sq = [
            [
                sq(u_minus, -1.0),
                sq(u_plus, 1.0),
                sq(u_plus, -1.0),
                sq(u_minus, 1.0),
            ],
            [
                sq(u_minus, 1.0),
                sq(u_plus, -1.0),
                sq(u_plus, 1.0),
                sq(u_minus, -1.0),
            ],
        ];
        DrivenCoefficients {
            omega,
            u_plus,
            u_minus,
            c_sq,
        }
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.c_sq[i - 1][j - 3]
    }
}

/// Assemble the six-level, sixteen-edge graph of the driven machine: the
/// dressed pair {1, 2} couples to {3, 4, 5, 6} through one cold and one hot
/// edge per pair, with quanta ω_α + ω_j - ω_i.
pub fn build_driven_wire(params: &DrivenWireParams) -> Result<(RateGraph, DrivenCoefficients)> {
    params.validate()?;
    let coeff = DrivenCoefficients::from_params(params);
    let w = &coeff.omega;

    let vertices = w
        .iter()
        .enumerate()
        .map(|(k, &frequency)| Vertex {
            index: k + 1,
            frequency,
        })
        .collect();
    let mut edges = Vec::with_capacity(16);
    for i in 1..=2usize {
        for j in 3..=6usize {
            let shift = w[j - 1] - w[i - 1];
            for (bath, omega_bath) in [
                (&params.bath_c, params.omega_c),
                (&params.bath_h, params.omega_h),
            ] {
                let quantum = omega_bath + shift;
                if !(quantum > 0.0) {
                    return Err(Error::NonpositiveQuantum {
                        i,
                        j,
                        bath: bath.label.label(),
                        quantum,
                    });
                }
                let (emission, absorption) = bose_rate(quantum, bath)?;
                let weight = coeff.weight(i, j);
                edges.push(Edge {
                    id: edges.len(),
                    tail: i,
                    head: j,
                    bath: bath.label,
                    quantum,
                    rate_up: weight * absorption,
                    rate_down: weight * emission,
                });
            }
        }
    }
    let graph = RateGraph::new(
        vertices,
        edges,
        vec![params.bath_c.clone(), params.bath_h.clone()],
    );
    Ok((graph, coeff))
}

// ---------------------------------------------------------------------------
// Driven three-level system without a wire
// ---------------------------------------------------------------------------

/// Parameters of the bare driven three-level system (field coupled
/// directly to the device transition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixThreeLevelParams {
    pub omega_c: f64,
    pub omega_h: f64,
    pub lambda: f64,
    pub bath_c: BathSpec,
    pub bath_h: BathSpec,
}

impl AppendixThreeLevelParams {
    pub fn reference(omega_c: f64) -> Self {
        AppendixThreeLevelParams {
            omega_c,
            omega_h: 1.0,
            lambda: 0.05,
            bath_c: reference_bath(Bath::Cold, 9.0),
            bath_h: reference_bath(Bath::Hot, 10.0),
        }
    }
}

/// Three dressed levels, four edges: the pairs (1,2) and (1,3) each carry
/// one cold and one hot edge with quanta ω_α ∓ λ and weight 1/2; the
/// dressed pair 2-3 is uncoupled.
pub fn build_appendix_three_level(params: &AppendixThreeLevelParams) -> Result<RateGraph> {
    if !(params.omega_c > 0.0) || !(params.omega_c < params.omega_h) {
        return Err(Error::InvalidParameters(
            "require 0 < omega_c < omega_h".into(),
        ));
    }
    if !(params.lambda > 0.0) || params.lambda >= params.omega_c {
        return Err(Error::InvalidParameters(
            "require 0 < lambda < omega_c so every channel quantum stays positive".into(),
        ));
    }
    check_bath(&params.bath_c, Bath::Cold)?;
    check_bath(&params.bath_h, Bath::Hot)?;

    let lambda = params.lambda;
    let vertices = vec![
        Vertex {
            index: 1,
            frequency: 0.0,
        },
        Vertex {
            index: 2,
            frequency: -lambda,
        },
        Vertex {
            index: 3,
            frequency: lambda,
        },
    ];
    let channels: [(usize, usize, &BathSpec, f64); 4] = [
        (1, 2, &params.bath_c, params.omega_c - lambda),
        (1, 2, &params.bath_h, params.omega_h - lambda),
        (1, 3, &params.bath_c, params.omega_c + lambda),
        (1, 3, &params.bath_h, params.omega_h + lambda),
    ];
    let mut edges = Vec::with_capacity(4);
    for (id, &(i, j, bath, quantum)) in channels.iter().enumerate() {
        let (emission, absorption) = bose_rate(quantum, bath)?;
        // The bath quantum is emitted on the j -> i transition, so state i
        // sits at the absorbing end of the edge.
        edges.push(Edge {
            id,
            tail: i,
            head: j,
            bath: bath.label,
            quantum,
            rate_up: 0.5 * absorption,
            rate_down: 0.5 * emission,
        });
    }
    Ok(RateGraph::new(
        vertices,
        edges,
        vec![params.bath_c.clone(), params.bath_h.clone()],
    ))
}

// ---------------------------------------------------------------------------
// Directly coupled three-level absorption machine
// ---------------------------------------------------------------------------

/// Parameters of the bare three-level absorption machine, the baseline the
/// wire-coupled device is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectThreeLevelParams {
    pub omega_c: f64,
    pub omega_h: f64,
    pub bath_c: BathSpec,
    pub bath_h: BathSpec,
    pub bath_w: BathSpec,
}

impl DirectThreeLevelParams {
    pub fn reference(omega_c: f64) -> Self {
        DirectThreeLevelParams {
            omega_c,
            omega_h: 1.0,
            bath_c: reference_bath(Bath::Cold, 9.0),
            bath_h: reference_bath(Bath::Hot, 10.0),
            bath_w: reference_bath(Bath::Work, 20.0),
        }
    }

    /// Upper edge of the cooling window,
    /// ω_{c,rev} = ω_h T_c (T_w - T_h) / [T_h (T_w - T_c)].
    pub fn cooling_window_edge(&self) -> f64 {
        let tc = self.bath_c.temperature;
        let th = self.bath_h.temperature;
        let tw = self.bath_w.temperature;
        self.omega_h * tc * (tw - th) / (th * (tw - tc))
    }

    /// Carnot coefficient of performance,
    /// ε_C = T_c (T_w - T_h) / [T_w (T_h - T_c)].
    pub fn carnot_cop(&self) -> f64 {
        let tc = self.bath_c.temperature;
        let th = self.bath_h.temperature;
        let tw = self.bath_w.temperature;
        tc * (tw - th) / (tw * (th - tc))
    }
}

/// The single-circuit triangle: three levels, one edge per bath with
/// quanta ω_c, ω_w = ω_h - ω_c and ω_h.
pub fn build_direct_three_level(params: &DirectThreeLevelParams) -> Result<RateGraph> {
    if !(params.omega_c > 0.0) || !(params.omega_c < params.omega_h) {
        return Err(Error::InvalidParameters(
            "require 0 < omega_c < omega_h".into(),
        ));
    }
    check_bath(&params.bath_c, Bath::Cold)?;
    check_bath(&params.bath_h, Bath::Hot)?;
    check_bath(&params.bath_w, Bath::Work)?;
    let omega_w = params.omega_h - params.omega_c;
    let vertices = vec![
        Vertex {
            index: 1,
            frequency: 0.0,
        },
        Vertex {
            index: 2,
            frequency: params.omega_c,
        },
        Vertex {
            index: 3,
            frequency: params.omega_h,
        },
    ];
    let channels: [(usize, usize, &BathSpec, f64); 3] = [
        (1, 2, &params.bath_c, params.omega_c),
        (2, 3, &params.bath_w, omega_w),
        (1, 3, &params.bath_h, params.omega_h),
    ];
    let mut edges = Vec::with_capacity(3);
    for (id, &(i, j, bath, quantum)) in channels.iter().enumerate() {
        let (emission, absorption) = bose_rate(quantum, bath)?;
        edges.push(Edge {
            id,
            tail: i,
            head: j,
            bath: bath.label,
            quantum,
            rate_up: absorption,
            rate_down: emission,
        });
    }
    Ok(RateGraph::new(
        vertices,
        edges,
        vec![
            params.bath_c.clone(),
            params.bath_h.clone(),
            params.bath_w.clone(),
        ],
    ))
}

// ---------------------------------------------------------------------------
// Model dispatch
// ---------------------------------------------------------------------------

/// A fully specified device, ready to build at its current ω_c or rebuilt
/// along a frequency sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ModelSpec {
    #[serde(rename = "absorption_wire")]
    AbsorptionWire(AbsorptionWireParams),
    #[serde(rename = "driven_wire")]
    DrivenWire(DrivenWireParams),
    #[serde(rename = "appendix_three_level")]
    AppendixThreeLevel(AppendixThreeLevelParams),
    #[serde(rename = "direct_three_level")]
    DirectThreeLevel(DirectThreeLevelParams),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::AbsorptionWire(_) => "absorption_wire",
            ModelSpec::DrivenWire(_) => "driven_wire",
            ModelSpec::AppendixThreeLevel(_) => "appendix_three_level",
            ModelSpec::DirectThreeLevel(_) => "direct_three_level",
        }
    }

    pub fn omega_c(&self) -> f64 {
        match self {
            ModelSpec::AbsorptionWire(p) => p.omega_c,
            ModelSpec::DrivenWire(p) => p.omega_c,
            ModelSpec::AppendixThreeLevel(p) => p.omega_c,
            ModelSpec::DirectThreeLevel(p) => p.omega_c,
        }
    }

    /// Same device at a different cold-transition frequency. The
    /// absorption wire keeps its detuning, so ω_w moves with ω_c.
    pub fn at_omega_c(&self, omega_c: f64) -> ModelSpec {
        match self {
            ModelSpec::AbsorptionWire(p) => {
                let delta = p.delta();
                let mut q = p.clone();
                q.omega_c = omega_c;
                q.omega_w = q.omega_h - omega_c - delta;
                ModelSpec::AbsorptionWire(q)
            }
            ModelSpec::DrivenWire(p) => {
                let mut q = p.clone();
                q.omega_c = omega_c;
                ModelSpec::DrivenWire(q)
            }
            ModelSpec::AppendixThreeLevel(p) => {
                let mut q = p.clone();
                q.omega_c = omega_c;
                ModelSpec::AppendixThreeLevel(q)
            }
            ModelSpec::DirectThreeLevel(p) => {
                let mut q = p.clone();
                q.omega_c = omega_c;
                ModelSpec::DirectThreeLevel(q)
            }
        }
    }

    pub fn build(&self) -> Result<RateGraph> {
        match self {
            ModelSpec::AbsorptionWire(p) => Ok(build_absorption_wire(p)?.0),
            ModelSpec::DrivenWire(p) => Ok(build_driven_wire(p)?.0),
            ModelSpec::AppendixThreeLevel(p) => build_appendix_three_level(p),
            ModelSpec::DirectThreeLevel(p) => build_direct_three_level(p),
        }
    }

    pub fn validity_warnings(&self) -> Vec<String> {
        match self {
            ModelSpec::AbsorptionWire(p) => p.validity_warnings(),
            ModelSpec::DrivenWire(p) => p.validity_warnings(),
            _ => Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Numeric cross-check of the analytic tables
// ---------------------------------------------------------------------------

/// Deviations between the analytic eigenfrequency/coefficient tables and a
/// numeric diagonalization of the system Hamiltonian.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub max_frequency_deviation: f64,
    pub max_coefficient_deviation: f64,
}

pub const CROSSCHECK_FREQ_TOL: f64 = 1e-12;
pub const CROSSCHECK_COEFF_TOL: f64 = 1e-10;
const EIGEN_GAP_TOL: f64 = 1e-8;

struct CrosscheckProblem {
    hamiltonian: DMatrix<f64>,
    /// Lowering operators in the bare product basis.
    couplings: Vec<(Bath, DMatrix<f64>)>,
    /// Analytic eigenfrequencies indexed by state label - 1.
    frequencies: Vec<f64>,
    /// Expected |⟨i|S^α_-|j⟩|² for i < j; absent pairs must vanish.
    expected: BTreeMap<(usize, usize, Bath), f64>,
}

/// Diagonalize the system Hamiltonian numerically and compare the matrix
/// elements of the bath lowering operators in its eigenbasis against the
/// analytic tables wired into the builders.
pub fn eigen_crosscheck(spec: &ModelSpec) -> Result<CrosscheckReport> {
    let problem = crosscheck_problem(spec)?;
    let n = problem.frequencies.len();

    for a in 0..n {
        for b in a + 1..n {
            if (problem.frequencies[a] - problem.frequencies[b]).abs() < EIGEN_GAP_TOL {
                return Err(Error::DegenerateSpectrum(format!(
                    "states {} and {} are quasi-degenerate; the eigenbasis comparison is ill-posed",
                    a + 1,
                    b + 1
                )));
            }
        }
    }

    let eigen = nalgebra::SymmetricEigen::new(problem.hamiltonian.clone());
    // Match each analytic level to the nearest numeric eigenvalue.
    let mut column_of = vec![usize::MAX; n];
    let mut max_freq_dev: f64 = 0.0;
    for (state, &freq) in problem.frequencies.iter().enumerate() {
        let (best, dev) = (0..n)
            .map(|k| (k, (eigen.eigenvalues[k] - freq).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if column_of.contains(&best) {
            return Err(Error::CrosscheckMismatch(format!(
                "two analytic levels matched numeric eigenvalue {best}"
            )));
        }
        column_of[state] = best;
        max_freq_dev = max_freq_dev.max(dev);
    }
    if max_freq_dev > CROSSCHECK_FREQ_TOL {
        return Err(Error::CrosscheckMismatch(format!(
            "eigenfrequency deviation {max_freq_dev:.3e} exceeds {CROSSCHECK_FREQ_TOL:.0e}"
        )));
    }

    let mut max_coeff_dev: f64 = 0.0;
    for (bath, op) in &problem.couplings {
        for i in 0..n {
            for j in i + 1..n {
                let vi = eigen.eigenvectors.column(column_of[i]);
                let vj = eigen.eigenvectors.column(column_of[j]);
                let amp = (vi.transpose() * op * vj)[(0, 0)];
                let numeric = amp * amp;
                let analytic = problem
                    .expected
                    .get(&(i + 1, j + 1, *bath))
                    .copied()
                    .unwrap_or(0.0);
                max_coeff_dev = max_coeff_dev.max((numeric - analytic).abs());
            }
        }
    }
    if max_coeff_dev > CROSSCHECK_COEFF_TOL {
        return Err(Error::CrosscheckMismatch(format!(
            "coefficient deviation {max_coeff_dev:.3e} exceeds {CROSSCHECK_COEFF_TOL:.0e}"
        )));
    }
    Ok(CrosscheckReport {
        max_frequency_deviation: max_freq_dev,
        max_coefficient_deviation: max_coeff_dev,
    })
}

fn crosscheck_problem(spec: &ModelSpec) -> Result<CrosscheckProblem> {
    match spec {
        ModelSpec::AbsorptionWire(p) => {
            p.validate()?;
            let coeff = AbsorptionCoefficients::from_params(p);
            // Product basis |device, wire⟩ in the order
            // 1D1W, 1D2W, 2D1W, 2D2W, 3D1W, 3D2W.
            let mut h = DMatrix::zeros(6, 6);
            for (k, v) in [
                0.0,
                p.omega_w,
                p.omega_c,
                p.omega_c + p.omega_w,
                p.omega_h,
                p.omega_h + p.omega_w,
            ]
            .into_iter()
            .enumerate()
            {
                h[(k, k)] = v;
            }
            h[(3, 4)] = p.g;
            h[(4, 3)] = p.g;

            let mut s_c = DMatrix::zeros(6, 6);
            s_c[(0, 2)] = 1.0;
            s_c[(1, 3)] = 1.0;
            let mut s_h = DMatrix::zeros(6, 6);
            s_h[(0, 4)] = 1.0;
            s_h[(1, 5)] = 1.0;
            let mut s_w = DMatrix::zeros(6, 6);
            s_w[(0, 1)] = 1.0;
            s_w[(2, 3)] = 1.0;
            s_w[(4, 5)] = 1.0;

            let cm2 = coeff.c_minus * coeff.c_minus;
            let cp2 = coeff.c_plus * coeff.c_plus;
            let cpm2 = coeff.cprime_minus * coeff.cprime_minus;
            let cpp2 = coeff.cprime_plus * coeff.cprime_plus;
            let expected = BTreeMap::from([
                ((1, 3, Bath::Cold), 1.0),
                ((2, 4, Bath::Cold), cm2),
                ((2, 5, Bath::Cold), cp2),
                ((1, 4, Bath::Hot), cpm2),
                ((1, 5, Bath::Hot), cpp2),
                ((2, 6, Bath::Hot), 1.0),
                ((1, 2, Bath::Work), 1.0),
                ((3, 4, Bath::Work), cm2),
                ((3, 5, Bath::Work), cp2),
                ((4, 6, Bath::Work), cpm2),
                ((5, 6, Bath::Work), cpp2),
            ]);
            Ok(CrosscheckProblem {
                hamiltonian: h,
                couplings: vec![(Bath::Cold, s_c), (Bath::Hot, s_h), (Bath::Work, s_w)],
                frequencies: coeff.omega.to_vec(),
                expected,
            })
        }
        ModelSpec::DrivenWire(p) => {
            p.validate()?;
            let coeff = DrivenCoefficients::from_params(p);
            let mut h = DMatrix::zeros(6, 6);
            h[(3, 4)] = p.g;
            h[(4, 3)] = p.g;
            for (a, b) in [(0, 1), (2, 3), (4, 5)] {
                h[(a, b)] = p.lambda;
                h[(b, a)] = p.lambda;
            }
            let mut s_c = DMatrix::zeros(6, 6);
            s_c[(0, 2)] = 1.0;
            s_c[(1, 3)] = 1.0;
            let mut s_h = DMatrix::zeros(6, 6);
            s_h[(0, 4)] = 1.0;
            s_h[(1, 5)] = 1.0;

            let mut expected = BTreeMap::new();
            for i in 1..=2usize {
                for j in 3..=6usize {
                    expected.insert((i, j, Bath::Cold), coeff.weight(i, j));
                    expected.insert((i, j, Bath::Hot), coeff.weight(i, j));
                }
            }
            Ok(CrosscheckProblem {
                hamiltonian: h,
                couplings: vec![(Bath::Cold, s_c), (Bath::Hot, s_h)],
                frequencies: coeff.omega.to_vec(),
                expected,
            })
        }
        ModelSpec::AppendixThreeLevel(p) => {
            let mut h = DMatrix::zeros(3, 3);
            h[(1, 2)] = p.lambda;
            h[(2, 1)] = p.lambda;
            let mut s_c = DMatrix::zeros(3, 3);
            s_c[(0, 1)] = 1.0;
            let mut s_h = DMatrix::zeros(3, 3);
            s_h[(0, 2)] = 1.0;
            let expected = BTreeMap::from([
                ((1, 2, Bath::Cold), 0.5),
                ((1, 3, Bath::Cold), 0.5),
                ((1, 2, Bath::Hot), 0.5),
                ((1, 3, Bath::Hot), 0.5),
            ]);
            Ok(CrosscheckProblem {
                hamiltonian: h,
                couplings: vec![(Bath::Cold, s_c), (Bath::Hot, s_h)],
                frequencies: vec![0.0, -p.lambda, p.lambda],
                expected,
            })
        }
        ModelSpec::DirectThreeLevel(p) => {
            let mut h = DMatrix::zeros(3, 3);
            h[(1, 1)] = p.omega_c;
            h[(2, 2)] = p.omega_h;
            let mut s_c = DMatrix::zeros(3, 3);
            s_c[(0, 1)] = 1.0;
            let mut s_h = DMatrix::zeros(3, 3);
            s_h[(0, 2)] = 1.0;
            let mut s_w = DMatrix::zeros(3, 3);
            s_w[(1, 2)] = 1.0;
            let expected = BTreeMap::from([
                ((1, 2, Bath::Cold), 1.0),
                ((1, 3, Bath::Hot), 1.0),
                ((2, 3, Bath::Work), 1.0),
            ]);
            Ok(CrosscheckProblem {
                hamiltonian: h,
                couplings: vec![(Bath::Cold, s_c), (Bath::Hot, s_h), (Bath::Work, s_w)],
                frequencies: vec![0.0, p.omega_c, p.omega_h],
                expected,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_circuits, validate_graph};
    use approx::assert_relative_eq;

    #[test]
    fn bose_rate_reference_value() {
        // Independently evaluated: N = 1/(e^0.1 - 1) at omega = 1, T = 10.
        let bath = BathSpec::thermal(Bath::Hot, 10.0, 3, 1e-6);
        let (up, down) = bose_rate(1.0, &bath).unwrap();
        assert_relative_eq!(up, 1.050833194477505e-5, max_relative = 1e-14);
        assert_relative_eq!(down, 9.50833194477505e-6, max_relative = 1e-14);
    }

    #[test]
    fn bose_rate_zero_temperature_limit() {
        let bath = BathSpec::thermal(Bath::Cold, 1e-12, 3, 1e-6);
        let (up, down) = bose_rate(0.8, &bath).unwrap();
        assert_relative_eq!(up, 1e-6 * 0.8f64.powi(3), max_relative = 1e-14);
        assert_eq!(down, 0.0);
    }

    #[test]
    fn bose_rate_rejects_nonpositive_frequency() {
        let bath = BathSpec::thermal(Bath::Cold, 5.0, 3, 1e-6);
        assert!(bose_rate(0.0, &bath).is_err());
        assert!(bose_rate(-0.3, &bath).is_err());
    }

    #[test]
    fn absorption_reference_structure() {
        let (graph, coeff) = build_absorption_wire(&AbsorptionWireParams::reference(0.4)).unwrap();
        assert!(validate_graph(&graph).is_valid());
        assert_eq!(graph.vertex_count(), 6);
        assert_eq!(graph.edges().len(), 11);
        // Resonant case: omega_4 = omega_h - g, omega_5 = omega_h + g and
        // all mixing weights are 1/2.
        assert_relative_eq!(coeff.omega[3], 0.95, max_relative = 1e-14);
        assert_relative_eq!(coeff.omega[4], 1.05, max_relative = 1e-14);
        for c in [
            coeff.c_plus,
            coeff.c_minus,
            coeff.cprime_plus,
            coeff.cprime_minus,
        ] {
            assert_relative_eq!(c * c, 0.5, max_relative = 1e-12);
        }
        assert_eq!(enumerate_circuits(&graph).unwrap().len(), 38);
    }

    #[test]
    fn absorption_rejects_zero_coupling() {
        let mut p = AbsorptionWireParams::reference(0.4);
        p.g = 0.0;
        let err = build_absorption_wire(&p).unwrap_err();
        assert!(err.to_string().contains("secular approximation invalid"));
    }

    #[test]
    fn absorption_coefficient_sum_rules() {
        let p = AbsorptionWireParams::reference(0.4).with_detuning(0.07);
        let coeff = AbsorptionCoefficients::from_params(&p);
        let cp2 = coeff.c_plus.powi(2);
        let cm2 = coeff.c_minus.powi(2);
        let cpp2 = coeff.cprime_plus.powi(2);
        let cpm2 = coeff.cprime_minus.powi(2);
        assert_relative_eq!(cp2 + cm2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(cpp2 + cpm2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(cp2, cpm2, epsilon = 1e-12);
        assert_relative_eq!(cm2, cpp2, epsilon = 1e-12);
    }

    #[test]
    fn detuned_regime_suppresses_crossed_channels() {
        let p = AbsorptionWireParams {
            g: 1e-3,
            bath_c: BathSpec::thermal(Bath::Cold, 9.0, 3, 1e-8),
            bath_h: BathSpec::thermal(Bath::Hot, 10.0, 3, 1e-8),
            bath_w: BathSpec::thermal(Bath::Work, 20.0, 3, 1e-8),
            ..AbsorptionWireParams::reference(0.4)
        }
        .with_detuning(0.1);
        let coeff = AbsorptionCoefficients::from_params(&p);
        let bound = 2.0 * (p.g / p.delta()).powi(2);
        assert!(coeff.c_plus.powi(2) <= bound);
        assert!(coeff.cprime_minus.powi(2) <= bound);
        // Exact values from an extended-precision evaluation.
        assert_relative_eq!(
            coeff.c_plus.powi(2),
            9.99700099965013e-5,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            coeff.cprime_minus.powi(2),
            9.99700099965013e-5,
            max_relative = 1e-10
        );
    }

    #[test]
    fn driven_reference_structure() {
        let (graph, coeff) = build_driven_wire(&DrivenWireParams::reference(0.7)).unwrap();
        assert!(validate_graph(&graph).is_valid());
        assert_eq!(graph.vertex_count(), 6);
        assert_eq!(graph.edges().len(), 16);
        // Each dressed pair is traceless.
        assert_relative_eq!(coeff.omega[0] + coeff.omega[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(coeff.omega[2] + coeff.omega[5], 0.0, epsilon = 1e-14);
        assert_relative_eq!(coeff.omega[3] + coeff.omega[4], 0.0, epsilon = 1e-14);
        // States 1 and 2 couple only to 3..6.
        for e in graph.edges() {
            assert!(e.tail <= 2 && e.head >= 3);
        }
        assert_eq!(enumerate_circuits(&graph).unwrap().len(), 104);
    }

    #[test]
    fn driven_coefficient_identities() {
        let coeff = DrivenCoefficients::from_params(&DrivenWireParams::reference(0.7));
        assert_relative_eq!(coeff.u_plus * coeff.u_minus, -1.0, epsilon = 1e-12);
        for j in 3..=6 {
            assert_relative_eq!(
                coeff.weight(1, j) + coeff.weight(2, j),
                0.5,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn driven_rejects_nonpositive_quantum() {
        // omega_c below the largest level split makes a cold quantum negative.
        let p = DrivenWireParams::reference(0.25);
        let err = build_driven_wire(&p).unwrap_err();
        assert!(matches!(err, Error::NonpositiveQuantum { .. }));
    }

    #[test]
    fn appendix_structure() {
        let graph = build_appendix_three_level(&AppendixThreeLevelParams::reference(0.5)).unwrap();
        assert!(validate_graph(&graph).is_valid());
        assert_eq!(graph.vertex_count(), 3);
        assert_eq!(graph.edges().len(), 4);
        assert!(graph.find_edge(2, 3, Bath::Cold).is_none());
        assert!(graph.find_edge(2, 3, Bath::Hot).is_none());
        let circuits = enumerate_circuits(&graph).unwrap();
        assert_eq!(circuits.len(), 2);
        let sets: Vec<_> = circuits.iter().map(|c| c.vertex_set()).collect();
        assert!(sets.contains(&[1, 2].into_iter().collect()));
        assert!(sets.contains(&[1, 3].into_iter().collect()));
        // Each edge carries the half-weighted bosonic rate.
        let p = AppendixThreeLevelParams::reference(0.5);
        let e = graph.find_edge(1, 2, Bath::Cold).unwrap();
        let (emission, _) = bose_rate(p.omega_c - p.lambda, &p.bath_c).unwrap();
        assert_relative_eq!(e.rate_down, emission / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn appendix_rejects_large_lambda() {
        let mut p = AppendixThreeLevelParams::reference(0.5);
        p.lambda = 0.5;
        assert!(build_appendix_three_level(&p).is_err());
    }

    #[test]
    fn direct_three_level_is_a_triangle() {
        let graph = build_direct_three_level(&DirectThreeLevelParams::reference(0.5)).unwrap();
        assert!(validate_graph(&graph).is_valid());
        assert_eq!(enumerate_circuits(&graph).unwrap().len(), 1);
    }

    #[test]
    fn direct_cooling_window_edge_reference() {
        let p = DirectThreeLevelParams::reference(0.5);
        assert_relative_eq!(p.cooling_window_edge(), 9.0 / 11.0, max_relative = 1e-15);
        assert_relative_eq!(p.carnot_cop(), 4.5, max_relative = 1e-15);
    }

    #[test]
    fn crosscheck_absorption_resonant() {
        let spec = ModelSpec::AbsorptionWire(AbsorptionWireParams::reference(0.4));
        let report = eigen_crosscheck(&spec).unwrap();
        assert!(report.max_frequency_deviation < CROSSCHECK_FREQ_TOL);
        assert!(report.max_coefficient_deviation < CROSSCHECK_COEFF_TOL);
    }

    #[test]
    fn crosscheck_driven_reference() {
        let spec = ModelSpec::DrivenWire(DrivenWireParams::reference(0.7));
        let report = eigen_crosscheck(&spec).unwrap();
        assert!(report.max_frequency_deviation < CROSSCHECK_FREQ_TOL);
        assert!(report.max_coefficient_deviation < CROSSCHECK_COEFF_TOL);
    }

    #[test]
    fn crosscheck_flags_degeneracy() {
        // omega_c = omega_w makes states 2 and 3 degenerate.
        let p = AbsorptionWireParams::reference(0.5);
        let err = eigen_crosscheck(&ModelSpec::AbsorptionWire(p)).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpectrum(_)));
    }

    #[test]
    fn appendix_reference_rate_value() {
        // W_12^c = Gamma^c_{omega_c - lambda} / 2 at omega_c = 0.5,
        // lambda = 0.05, T_c = 9; frozen from an extended-precision
        // evaluation of the rate function.
        let p = AppendixThreeLevelParams::reference(0.5);
        let graph = build_appendix_three_level(&p).unwrap();
        let e = graph.find_edge(1, 2, Bath::Cold).unwrap();
        assert_relative_eq!(e.rate_down, 9.342210858403145e-7, max_relative = 1e-14);
    }
}
