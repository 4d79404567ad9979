#pragma once

#include "nlk/fields.hpp"
#include "nlk/params.hpp"
#include "nlk/profiles.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nlk {

enum class Flavor { lie, strang };
enum class TransportScheme { spectral, bilinear };

std::string to_string(Flavor f);
std::string to_string(TransportScheme s);
Flavor parse_flavor(const std::string& s);
TransportScheme parse_transport(const std::string& s);

/// Options shared by the explicit drift-diffusion substeps.
struct DiffusionControl {
    double cfl = 0.45;
    /// Lower bound used for G inside the pressure when m < 1 (caps the diffusivity).
    double floor = 1e-10;
    /// Optional cellwise floor, e.g. a sandwich lower envelope; overrides floor where given.
    const std::vector<double>* floor_field = nullptr;
    std::int64_t max_substeps = 2'000'000;
};

/// Coefficients of dG/dt = kappa (Lap_v G^m + b div_v(v G)).
struct DriftDiffusion {
    double m = 0.0;
    double kappa = 1.0;
    double b = 1.0;
};

struct DiffusionStats {
    std::int64_t max_substeps = 0;
    std::int64_t total_substeps = 0;
    double clipped_mass = 0.0;
};

/// Conservative explicit finite-volume update in v for every x-cell, zero-flux boundaries.
/// The face flux is -kappa G_up dPhi/dv with Phi = (m/(m-1)) G^(m-1) + b|v|^2/2 and G_up
/// upwinded by the sign of dPhi, so every profile with Phi constant in v is an exact steady state.
DiffusionStats step_drift_diffusion(Field& G, double dt, const DriftDiffusion& coef, const DiffusionControl& ctl);

/// The diffusion half of the splitting, factor 2 included: kappa = 2/A, b = (1+A) sqrt(A).
Field step_diffusion(const Field& G, double dt, const ModelParams& p, const DiffusionControl& ctl = {});

/// Rigid rotation by angle 2 dt in every (x_i, v_i) plane (transport half of the splitting).
Field step_transport(const Field& G, double dt, TransportScheme scheme = TransportScheme::spectral);

/// Rotation of a field by angle theta: new(X, V) = old(X cos - V sin, X sin + V cos).
void rotate(Field& G, double theta, TransportScheme scheme);

/// Translation in x by shift_per_v * v along every (x_i, v_i) plane (free transport), periodic in x.
void shear_x(Field& F, double shift_per_v);

/// Zeroes negative cells and rescales to the incoming mass; returns the clipped mass.
double clip_and_rescale(Field& F, double target_mass);

/// g-frame <-> G-frame: values are kept, the grid extents are rescaled.
PhaseGrid to_G_grid(const PhaseGrid& g_grid, const ModelParams& p);
PhaseGrid to_g_grid(const PhaseGrid& G_grid, const ModelParams& p);
Field to_G_frame(const Field& g, const ModelParams& p);
Field to_g_frame(const Field& G, const ModelParams& p);

struct SolverConfig {
    ModelParams p;
    PhaseGrid grid;
    int n = 64;
    double cfl = 0.45;
    Flavor flavor = Flavor::lie;
    TransportScheme transport = TransportScheme::spectral;
    double T = 10.0;
    double snapshot_every = 1.0;
    double floor = 1e-10;
    /// Offset of the lower sandwich profile; when set, its samples serve as the diffusivity cap.
    std::optional<double> sandwich_gamma_lower;
    std::int64_t max_substeps = 2'000'000;
    bool diagnostics = true;
};

struct Snapshot {
    double time = 0.0;
    Field field;
    DiagnosticsReport report;
};

struct Trajectory {
    SolverConfig config;
    std::string initial_datum;
    std::vector<Snapshot> snapshots;
    double clipped_mass = 0.0;
    std::int64_t max_substeps = 0;
    std::int64_t steps = 0;
};

/// Integrates the rescaled equation from a g-frame datum with the splitting scheme.
Trajectory evolve(const Field& g0, const SolverConfig& cfg, const std::string& descriptor = "field");

/// Physical-frame trajectory represented through the self-similar map with scale R0.
struct FTrajectory {
    SelfSimilarMap map;
    Trajectory g;

    double t_at(std::size_t k) const { return map.t_of_tau(g.snapshots[k].time); }
    double R_at(std::size_t k) const { return std::exp(g.snapshots[k].time); }
    /// Mass of f, equal to the mass of g since the map preserves the measure.
    double mass_at(std::size_t k) const { return mass(g.snapshots[k].field); }
    /// f(t_k) sampled on a physical grid.
    Field f_on(std::size_t k, const PhaseGrid& grid) const;
};

/// Evolves an f-frame datum given pointwise; the g-frame grid comes from cfg.
FTrajectory evolve_f(const PhaseFunction& f0, const SolverConfig& cfg, double R0 = 1.0);
/// Same for a sampled datum (multilinear interpolation onto the g-frame grid).
FTrajectory evolve_f(const Field& f0, const SolverConfig& cfg, double R0 = 1.0);

/// Samples the g-frame image of a physical evolution at time t on the given grid.
Field pullback(const Evolution& f, const SelfSimilarMap& map, double t, const PhaseGrid& grid);

/// Series of int (g2 - g1)_+ at simultaneous snapshots.
std::vector<double> check_contraction(const Trajectory& a, const Trajectory& b);
/// Cellwise a <= b + tol at every snapshot, enforced only if it held at t = 0.
std::vector<bool> check_comparison(const Trajectory& a, const Trajectory& b, double tol = 1e-12);

/// Smooth random datum g_{gamma1} + theta (g_{gamma2} - g_{gamma1}), theta in [0, 1],
/// shifted so that its mass matches target_mass when possible.
Field sandwiched_datum(const ModelParams& p, const PhaseGrid& grid, double gamma1, double gamma2, std::uint64_t seed,
                       std::optional<double> target_mass = std::nullopt);

/// Least-squares slope of log(values) against times.
double log_slope(const std::vector<double>& times, const std::vector<double>& values);

} // namespace nlk
