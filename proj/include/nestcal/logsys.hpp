#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nestcal/covariance.hpp"
#include "nestcal/geometry.hpp"

namespace nestcal {

enum class SystemMode {
  /// L = N1: second-level Toeplitz nuisances are merged into first-row
  /// replicas, giving a full-rank system with the three standard references.
  Proposed,
  /// L = N1 + 1: rank-deficient by one (second-level phase ramp).
  Conventional,
  /// L = N1 + 1 with one extra phase reference on a second-level sensor.
  ConventionalThirdRef,
};

struct DesignMode {
  SystemMode kind = SystemMode::Proposed;
  int third_ref_sensor = -1;  // 0-based; used only by ConventionalThirdRef

  static DesignMode proposed() { return {SystemMode::Proposed, -1}; }
  static DesignMode conventional() { return {SystemMode::Conventional, -1}; }
  static DesignMode third_reference(int sensor) {
    return {SystemMode::ConventionalThirdRef, sensor};
  }
};

std::string to_string(const DesignMode& mode);

enum class SlotKind {
  LogGain,    // log psi_n, n >= 1
  Phase,      // phi_n, n >= 2
  Rho1,       // Re log c1 at lag 0..N1
  Iota1,      // Im log c1 at lag 1..N1
  Rho2,       // Re log c2 at lag 1..N2-1 (conventional modes only)
  Iota2,      // Im log c2 at lag 1..N2-1 (conventional modes only)
  CrossReal,  // Re log of cross block, (row 0..N1-1, col 0..N2-2)
  CrossImag,  // Im log of cross block
};

struct ThetaSlot {
  SlotKind kind;
  int index;       // sensor, lag, or cross-block row
  int index2 = 0;  // cross-block column

  bool operator==(const ThetaSlot&) const = default;
};

/// Ordered unknowns of the log-linear system. Slots for psi_1, phi_1, phi_2,
/// iota1 lag 0, iota2 lag 0 and rho2 lag 0 never appear.
class ThetaLayout {
 public:
  ThetaLayout() = default;
  ThetaLayout(int n1, int n2, DesignMode mode);

  const std::vector<ThetaSlot>& slots() const noexcept { return slots_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(slots_.size()); }
  const DesignMode& mode() const noexcept { return mode_; }
  int sensor_count() const noexcept { return n1_ + n2_; }

  /// Column of a slot, or -1 when the slot is eliminated.
  int column(const ThetaSlot& slot) const;
  int log_gain_column(int sensor) const { return column({SlotKind::LogGain, sensor}); }
  int phase_column(int sensor) const { return column({SlotKind::Phase, sensor}); }

  std::string slot_name(Eigen::Index col) const;

 private:
  int n1_ = 0;
  int n2_ = 0;
  DesignMode mode_;
  std::vector<ThetaSlot> slots_;
};

enum class RowKind { Mu, Nu };

/// One equation: mu rows for i <= j, nu rows for i < j (0-based sensors).
struct SystemRow {
  RowKind kind;
  int i;
  int j;
};

/// Canonical row order: all mu rows lexicographic in (i, j), then nu rows.
std::vector<SystemRow> system_rows(int n);

struct LogMeasurements {
  Eigen::VectorXd mu;            // N(N+1)/2, lexicographic i <= j
  Eigen::VectorXd nu;            // N(N-1)/2, lexicographic i < j
  std::vector<bool> wrap_flags;  // per nu entry, |nu| > pi - wrap_margin
};

inline constexpr double wrap_margin = 0.3;

LogMeasurements log_transform(const CovarianceEstimate& cov);

struct DesignMatrix {
  Eigen::MatrixXd matrix;  // N^2 x K
  ThetaLayout layout;
};

DesignMatrix build_design_matrix(const ArrayGeometry& geom, const DesignMode& mode);

struct LogLinearSystem {
  Eigen::MatrixXd design;
  Eigen::VectorXd measurements;  // y_xi = [mu; nu]
  ThetaLayout layout;
  std::vector<SystemRow> rows;
  /// Principal-branch proximity to +-pi, per row (always false on mu rows).
  std::vector<bool> wrap_flags;
  /// Rows whose phase stays within wrap_margin of the branch cut after
  /// alignment to the other rows of the same nuisance column. These are the
  /// rows the weights down-weight.
  std::vector<bool> branch_ambiguous;
  Eigen::Index sample_count = 0;

  int wrap_warning_count() const;
};

/// Builds y_xi = H theta + xi from a covariance. Phase measurements that share
/// a nuisance column are moved onto a common 2*pi branch (centred on their
/// circular mean) so a nuisance phase close to +-pi does not split its rows
/// across the cut.
LogLinearSystem assemble_system(const CovarianceEstimate& cov, const ArrayGeometry& geom,
                                const DesignMode& mode);

/// Numerical rank via SVD with tolerance max(rows, cols) * eps * sigma_max.
Eigen::Index numerical_rank(const Eigen::MatrixXd& m);

}  // namespace nestcal
