#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prandtl/march.hpp"
#include "prandtl/self_similar.hpp"

namespace prandtl {

/// Physical fields at one station, sampled at the psi-grid nodes.
struct PhysicalSlice {
  double x = 0.0;
  double xi = 0.0;
  double d_shift = 1.0;
  Vector psi;
  Vector y_grid;
  Vector u;
  Vector u_y;
  Vector u_yy;
  Vector u_x;
  Vector v;
};

/// Inverts the modified von Mises map at one station:
///   y = e^{xi/2} int_0^psi omega^{-1/2},  u = sqrt(omega),
///   u_y = e^{-xi/2} omega_psi / 2,  u_yy = e^{-xi} sqrt(omega) omega_psipsi / 2,
///   u_x = e^{-xi} (omega_xi / (2 sqrt(omega)) - omega_psi I / 4),
///   v = e^{-xi/2} (sqrt(omega) I - psi) / 2,  I = int_0^psi omega^{-1/2} (1 - omega_xi / omega).
/// omega_xi comes from the equation, not from differencing in xi. The
/// integrals are exact for omega linear on each cell, which covers the wall.
PhysicalSlice reconstruct(const OmegaField& field, const SelfSimilarProfile* reference = nullptr);

/// Derivative pairs (i, j) for d_x^i d_y^j.
enum class Derivative { U00 = 0, U01 = 1, U02 = 2, U10 = 3 };
inline constexpr std::array<Derivative, 4> kDerivatives{Derivative::U00, Derivative::U01, Derivative::U02,
                                                        Derivative::U10};
const char* derivative_name(Derivative d);  // "00", "01", "02", "10"

struct NormRow {
  double x = 0.0;
  std::array<double, 4> norm{};  // indexed by Derivative

  double operator[](Derivative d) const { return norm[static_cast<std::size_t>(d)]; }
};

/// Blasius flow normalized with d = 1, z = y / sqrt(2 (x + 1)).
struct BlasiusFlow {
  double u = 0.0, u_y = 0.0, u_yy = 0.0, u_x = 0.0, v = 0.0;
};
BlasiusFlow blasius_flow(const BlasiusProfile& blasius, double x, double y, double shift = 1.0);

/// Sup norms of the differences against the Blasius flow over the slice
/// nodes with y <= y_limit (the whole slice by default).
NormRow error_norms(const PhysicalSlice& slice, const BlasiusProfile& blasius,
                    std::optional<double> y_limit = std::nullopt);

/// Centered-difference u_y of the reconstructed u(y), for cross-checks.
Vector finite_difference_uy(const PhysicalSlice& slice);

/// Closed-form norms of d_x^i d_y^j (u^s - u^d) with u^s = f'(y / sqrt(2 (x + s))),
/// by dense sampling in y.
std::vector<NormRow> sharpness_family(const BlasiusProfile& blasius, double s, double d,
                                      const std::vector<double>& stations, Index samples = 8000);

struct DecayFit {
  double slope = 0.0;
  double half_width = 0.0;  // 95 %
  double intercept = 0.0;
  double rms_residual = 0.0;
  Index points = 0;
};

/// Two-sided 95 % Student t quantile.
double t_quantile_95(Index dof);

/// Ordinary least squares of log(y) on t with a 95 % half-width.
DecayFit fit_line(const std::vector<double>& t, const std::vector<double>& y);

/// Slope of log norm against log(x + 1) over rows with x in [x_lo, x_hi].
/// Rejects windows with fewer than six rows (TooFewStations) and windows where
/// the norms sit on a floor: too small, flat, or flattening out (NoisyFloor).
DecayFit fit_decay(const std::vector<NormRow>& rows, double x_lo, double x_hi, Derivative which);

enum class BarrierFamily { Phi1, Phi2 };

struct BarrierParams {
  double M = 0.0;  // <= 0: fit at the first snapshot
  double alpha = 0.5;
  double mu = 0.05;
  double delta = 0.5;
  std::optional<double> B;  // empty: smallest B that holds (phi2)
  double margin = 1.1;
  double psi_cut = 8.0;  // envelope checked on 0 < psi <= psi_cut
};

struct EnvelopeVerdict {
  BarrierFamily family = BarrierFamily::Phi1;
  BarrierParams params;  // resolved M and B
  bool holds = true;
  std::optional<std::size_t> first_violation_snapshot;
  double first_violation_psi = 0.0;
  std::vector<double> xi;
  std::vector<double> tightness;  // sup |omega - wbar| / phi per snapshot
};

/// phi1 = M e^{-alpha xi} e^{-mu psi^2} wbar,
/// phi2 = M e^{B} e^{-xi} psi wbar_p e^{-B exp(-delta xi)}.
EnvelopeVerdict barrier_envelope(const std::vector<OmegaField>& snapshots, const SelfSimilarProfile& profile,
                                 BarrierFamily family, BarrierParams params = {});

struct RateFit {
  double rate = 0.0;
  double half_width = 0.0;
  Index points = 0;
};

struct WeightedDecay {
  std::vector<double> xi;
  std::vector<double> a_norm;         // ||sqrt(A) w||
  std::vector<double> rho_psi_norm;   // ||sqrt(rho) w_psi||
  std::vector<double> a_xi_norm;      // ||sqrt(A) w_xi||
  std::vector<double> rho_xipsi_norm; // ||sqrt(rho) w_xipsi||
  std::optional<RateFit> a_rate, rho_psi_rate, a_xi_rate, rho_xipsi_rate;
};

/// Weighted norms of w = omega - wbar per snapshot and their exponential
/// rates in xi; a rate is left empty when its norms vanish.
WeightedDecay weighted_decay(const std::vector<OmegaField>& snapshots, const SelfSimilarProfile& profile);

struct RoundTrip {
  double error = 0.0;          // max |u_rec - u0| at the reconstructed y
  double interp_error = 0.0;   // reference interpolation error
  bool pass = false;           // error <= 2 interp_error
};

/// ingest -> reconstruct on the grid and compare with u0. `exact` evaluates
/// the generating function when the samples come from one. The reference
/// error is the sample interpolation error plus the error of linear
/// interpolation of u between neighbouring grid nodes in y.
RoundTrip round_trip(const InitialProfile& profile, double d_shift, GridPtr grid,
                     const std::function<double(double)>& exact = {});

/// Everything the decay pipeline reports.
struct DecayReport {
  std::vector<double> stations;
  std::vector<NormRow> norms;
  std::vector<NormRow> oracle;  // closed-form sharpness table, when applicable
  std::array<std::optional<DecayFit>, 4> slopes;
  std::array<std::optional<std::string>, 4> slope_errors;
  std::array<std::optional<DecayFit>, 4> oracle_slopes;
  std::vector<EnvelopeVerdict> barriers;
  std::optional<WeightedDecay> weighted;
  double fit_lo = 5.0;
  double fit_hi = 50.0;
};

/// Decay pipeline: march the shifted family u^s (or a tabulated inlet) and
/// measure it against the Blasius flow at the stations.
struct DecayStudy {
  double s = 4.0;
  double d = 1.0;
  double psi_max = 20.0;
  Index cells = 512;
  double dxi = 1e-2;
  Scheme scheme = Scheme::CrankNicolson;
  std::vector<double> stations;  // x values
  double fit_lo = 5.0;
  double fit_hi = 50.0;
  bool oracle = true;
  bool weighted = false;
  std::vector<std::pair<BarrierFamily, BarrierParams>> barriers;
  std::optional<InitialProfile> initial;  // replaces the shifted family
};

/// `count` stations spaced evenly in log(x + 1) over [lo, hi].
std::vector<double> log_stations(double lo, double hi, int count);

DecayReport run_decay(BlasiusPtr blasius, const DecayStudy& study);

}  // namespace prandtl
