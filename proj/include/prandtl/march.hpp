#pragma once

#include <optional>
#include <vector>

#include "prandtl/errors.hpp"
#include "prandtl/fields.hpp"
#include "prandtl/self_similar.hpp"

namespace prandtl {

enum class Scheme { BackwardEuler, CrankNicolson };

/// Full: difference omega itself. Perturbation: difference w = omega - wbar
/// and add the source (sqrt(omega) - sqrt(wbar)) wbar_pp with the tabulated
/// wbar_pp, so that wbar is an exact discrete equilibrium. Both discretize
/// the same equation to second order.
enum class Form { Full, Perturbation };

struct GuardFlags {
  bool comparison = true;
  bool wall_slope = true;
  bool concavity = false;
  bool fatal = false;
};

struct MarchConfig {
  double d_shift = 1.0;
  double xi_end = 1.0;
  double dxi = 1e-2;
  Scheme scheme = Scheme::CrankNicolson;
  Form form = Form::Perturbation;
  GuardFlags guards;
  int picard_max = 1;
  double picard_tol = 1e-10;
  double envelope_slack = 1e-6;
  double concavity_rel_tol = 1e-8;
  double dxi_max = 0.5;
  // Crank-Nicolson only: the first few steps are taken as two backward Euler
  // half steps each, which damps the stiff transient of wall-incompatible data.
  int startup_steps = 2;
};

struct ComparisonCheck {
  double k1 = 1.0;
  double k2 = 1.0;
  bool pass = true;
};

struct ConcavityCheck {
  double max_p = 0.0;
  double scale = 0.0;  // max |p| over interior nodes
  bool pass = true;
};

struct GuardRecord {
  double xi = 0.0;
  double k1 = 1.0;
  double k2 = 1.0;
  double wall_slope = 0.0;
  double max_p = 0.0;
  bool envelope_ok = true;
  bool wall_ok = true;
  bool concavity_ok = true;

  bool ok() const { return envelope_ok && wall_ok && concavity_ok; }
};

struct Trajectory {
  std::vector<OmegaField> snapshots;
  std::vector<GuardRecord> guard_log;
  double k1_initial = 1.0;
  double k2_initial = 1.0;
  Index steps = 0;
};

/// Thrown by `march` when a fatal guard fails; keeps what was computed.
class GuardViolationError : public Error {
 public:
  GuardViolationError(const std::string& message, Trajectory partial, GuardRecord record);

  const Trajectory& partial() const noexcept { return partial_; }
  const GuardRecord& record() const noexcept { return record_; }

 private:
  Trajectory partial_;
  GuardRecord record_;
};

/// Right-hand side sqrt(omega) omega_psipsi + psi omega_psi / 2 evaluated with
/// the same stencils as the implicit rows (zero at both boundary nodes).
/// With a reference profile the perturbation form is used.
Vector omega_rate(const Vector& omega, const PsiGrid& grid, const SelfSimilarProfile* reference = nullptr);

/// One step of length dxi. dxi = 0 returns the input unchanged. A non-null
/// reference selects the perturbation form; it must live on the field's grid.
OmegaField step(const OmegaField& field, double dxi, Scheme scheme, int picard_max = 1, double picard_tol = 1e-10,
                const SelfSimilarProfile* reference = nullptr);

/// Marches to every requested station in order; steps are shortened so that
/// each station is hit exactly. Guards and the perturbation form need the
/// self-similar profile on the same grid; without it the full form is used.
Trajectory march(const OmegaField& initial, const MarchConfig& config, const std::vector<double>& output_xis,
                 const SelfSimilarProfile* self_similar = nullptr);

/// Envelope of omega / wbar over interior nodes and the wall slope ratio.
/// With no reference envelope the observed one passes.
ComparisonCheck check_comparison(const OmegaField& field, const SelfSimilarProfile& self_similar,
                                 std::optional<ComparisonCheck> reference = std::nullopt, double slack = 1e-6);

/// p = sqrt(omega) d2(omega) at interior nodes; passes when max p is at most
/// rel_tol times the largest |p|.
ConcavityCheck check_concavity(const OmegaField& field, double rel_tol = 1e-8);

}  // namespace prandtl
