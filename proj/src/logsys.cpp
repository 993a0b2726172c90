#include "nestcal/logsys.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "nestcal/error.hpp"

namespace nestcal {

namespace {

constexpr double pi = std::numbers::pi;

// Maps angle into (-pi, pi].
double wrap_angle(double a) { return -std::remainder(-a, 2.0 * pi); }

void check_mode(const ArrayGeometry& geom, const DesignMode& mode) {
  switch (mode.kind) {
    case SystemMode::Proposed:
      if (!geom.is_proposed_design()) {
        throw Error(ErrorKind::ModeMismatch, "proposed mode requires L = N1");
      }
      break;
    case SystemMode::Conventional:
      if (!geom.is_conventional_design()) {
        throw Error(ErrorKind::ModeMismatch, "conventional mode requires L = N1 + 1");
      }
      break;
    case SystemMode::ConventionalThirdRef:
      if (!geom.is_conventional_design()) {
        throw Error(ErrorKind::ModeMismatch, "third-reference mode requires L = N1 + 1");
      }
      // The rank deficiency is a phase ramp over second-level sensors
      // N1+1..N-1; a reference anywhere else leaves it unresolved.
      if (mode.third_ref_sensor <= geom.n1() || mode.third_ref_sensor >= geom.size()) {
        throw Error(ErrorKind::ModeMismatch,
                    "third phase reference must be a second-level sensor in [" +
                        std::to_string(geom.n1() + 1) + ", " + std::to_string(geom.size() - 1) +
                        "], got " + std::to_string(mode.third_ref_sensor));
      }
      break;
  }
}

// Nuisance slot for the (i, j) entry, i <= j, before any merging.
ThetaSlot raw_nuisance(int n1, RowKind kind, int i, int j) {
  const bool re = kind == RowKind::Mu;
  if (j <= n1) return {re ? SlotKind::Rho1 : SlotKind::Iota1, j - i};
  if (i >= n1) {
    if (i == j) return {SlotKind::Rho1, 0};  // shared first element
    return {re ? SlotKind::Rho2 : SlotKind::Iota2, j - i};
  }
  return {re ? SlotKind::CrossReal : SlotKind::CrossImag, i, j - n1 - 1};
}

// With L = N1, second-level lag q equals the (0, N1 + q - 1) entry.
ThetaSlot merged_nuisance(int n1, const ThetaSlot& slot) {
  if (slot.kind != SlotKind::Rho2 && slot.kind != SlotKind::Iota2) return slot;
  const bool re = slot.kind == SlotKind::Rho2;
  const int q = slot.index;
  if (q == 1) return {re ? SlotKind::Rho1 : SlotKind::Iota1, n1};
  return {re ? SlotKind::CrossReal : SlotKind::CrossImag, 0, q - 2};
}

ThetaSlot nuisance_slot(int n1, const DesignMode& mode, RowKind kind, int i, int j) {
  const ThetaSlot slot = raw_nuisance(n1, kind, i, j);
  return mode.kind == SystemMode::Proposed ? merged_nuisance(n1, slot) : slot;
}

const char* slot_kind_name(SlotKind k) {
  switch (k) {
    case SlotKind::LogGain: return "log_gain";
    case SlotKind::Phase: return "phase";
    case SlotKind::Rho1: return "rho1";
    case SlotKind::Iota1: return "iota1";
    case SlotKind::Rho2: return "rho2";
    case SlotKind::Iota2: return "iota2";
    case SlotKind::CrossReal: return "cross_re";
    case SlotKind::CrossImag: return "cross_im";
  }
  return "?";
}

}  // namespace

std::string to_string(const DesignMode& mode) {
  switch (mode.kind) {
    case SystemMode::Proposed: return "proposed";
    case SystemMode::Conventional: return "conventional";
    case SystemMode::ConventionalThirdRef: return "third-ref";
  }
  return "?";
}

ThetaLayout::ThetaLayout(int n1, int n2, DesignMode mode) : n1_(n1), n2_(n2), mode_(mode) {
  const int n = n1 + n2;
  for (int s = 1; s < n; ++s) slots_.push_back({SlotKind::LogGain, s});
  for (int s = 2; s < n; ++s) {
    if (mode.kind == SystemMode::ConventionalThirdRef && s == mode.third_ref_sensor) continue;
    slots_.push_back({SlotKind::Phase, s});
  }
  for (int lag = 0; lag <= n1; ++lag) slots_.push_back({SlotKind::Rho1, lag});
  for (int lag = 1; lag <= n1; ++lag) slots_.push_back({SlotKind::Iota1, lag});
  if (mode.kind != SystemMode::Proposed) {
    for (int lag = 1; lag < n2; ++lag) slots_.push_back({SlotKind::Rho2, lag});
    for (int lag = 1; lag < n2; ++lag) slots_.push_back({SlotKind::Iota2, lag});
  }
  for (int r = 0; r < n1; ++r) {
    for (int c = 0; c + 1 < n2; ++c) slots_.push_back({SlotKind::CrossReal, r, c});
  }
  for (int r = 0; r < n1; ++r) {
    for (int c = 0; c + 1 < n2; ++c) slots_.push_back({SlotKind::CrossImag, r, c});
  }
}

int ThetaLayout::column(const ThetaSlot& slot) const {
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (slots_[k] == slot) return static_cast<int>(k);
  }
  return -1;
}

std::string ThetaLayout::slot_name(Eigen::Index col) const {
  const ThetaSlot& s = slots_.at(static_cast<std::size_t>(col));
  std::string name = std::string(slot_kind_name(s.kind)) + "[" + std::to_string(s.index);
  if (s.kind == SlotKind::CrossReal || s.kind == SlotKind::CrossImag) {
    name += "," + std::to_string(s.index2);
  }
  return name + "]";
}

std::vector<SystemRow> system_rows(int n) {
  std::vector<SystemRow> rows;
  rows.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) rows.push_back({RowKind::Mu, i, j});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) rows.push_back({RowKind::Nu, i, j});
  }
  return rows;
}

LogMeasurements log_transform(const CovarianceEstimate& cov) {
  const auto& r = cov.matrix;
  const int n = static_cast<int>(r.rows());
  if (n == 0 || r.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "covariance must be square and nonempty");
  }
  LogMeasurements out;
  out.mu.resize(n * (n + 1) / 2);
  out.nu.resize(n * (n - 1) / 2);
  out.wrap_flags.assign(static_cast<std::size_t>(n * (n - 1) / 2), false);

  Eigen::Index mu_k = 0;
  Eigen::Index nu_k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const std::complex<double> z = r(i, j);
      if (z == 0.0) {
        throw EntryError(ErrorKind::ZeroElement, i, j, "zero covariance entry");
      }
      if (i == j && !(z.real() > 0.0)) {
        throw EntryError(ErrorKind::ZeroElement, i, j, "nonpositive diagonal entry");
      }
      const std::complex<double> lz = std::log(z);
      out.mu(mu_k++) = lz.real();
      if (j > i) {
        out.wrap_flags[static_cast<std::size_t>(nu_k)] = std::abs(lz.imag()) > pi - wrap_margin;
        out.nu(nu_k++) = lz.imag();
      }
    }
  }
  return out;
}

DesignMatrix build_design_matrix(const ArrayGeometry& geom, const DesignMode& mode) {
  check_mode(geom, mode);
  const int n = geom.size();
  const int n1 = geom.n1();
  ThetaLayout layout(n1, geom.n2(), mode);
  const auto rows = system_rows(n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), layout.size());

  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    const auto rk = static_cast<Eigen::Index>(k);
    if (row.kind == RowKind::Mu) {
      for (int s : {row.i, row.j}) {
        if (const int c = layout.log_gain_column(s); c >= 0) h(rk, c) += 1.0;
      }
    } else {
      if (const int c = layout.phase_column(row.i); c >= 0) h(rk, c) += 1.0;
      if (const int c = layout.phase_column(row.j); c >= 0) h(rk, c) -= 1.0;
    }
    const int c = layout.column(nuisance_slot(n1, mode, row.kind, row.i, row.j));
    if (c < 0) {
      throw Error(ErrorKind::InvalidArgument, "internal: row without nuisance column");
    }
    h(rk, c) += 1.0;
  }
  return {std::move(h), std::move(layout)};
}

int LogLinearSystem::wrap_warning_count() const {
  int count = 0;
  for (bool f : branch_ambiguous) count += f ? 1 : 0;
  return count;
}

LogLinearSystem assemble_system(const CovarianceEstimate& cov, const ArrayGeometry& geom,
                                const DesignMode& mode) {
  if (cov.size() != geom.size()) {
    throw Error(ErrorKind::DimensionMismatch, "covariance does not match geometry");
  }
  DesignMatrix dm = build_design_matrix(geom, mode);
  const LogMeasurements lm = log_transform(cov);

  LogLinearSystem sys;
  sys.rows = system_rows(geom.size());
  sys.sample_count = cov.sample_count;
  sys.measurements.resize(static_cast<Eigen::Index>(sys.rows.size()));
  sys.measurements << lm.mu, lm.nu;
  sys.wrap_flags.assign(sys.rows.size(), false);
  sys.branch_ambiguous.assign(sys.rows.size(), false);
  const auto mu_count = static_cast<std::size_t>(lm.mu.size());
  for (std::size_t k = 0; k < lm.wrap_flags.size(); ++k) {
    sys.wrap_flags[mu_count + k] = lm.wrap_flags[k];
  }

  // Group nu rows by their nuisance column and put each group on the branch
  // centred at its circular mean.
  const int n1 = geom.n1();
  std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(dm.layout.size()));
  for (std::size_t k = mu_count; k < sys.rows.size(); ++k) {
    const auto& row = sys.rows[k];
    const int c = dm.layout.column(nuisance_slot(n1, mode, row.kind, row.i, row.j));
    groups[static_cast<std::size_t>(c)].push_back(static_cast<Eigen::Index>(k));
  }
  for (const auto& group : groups) {
    if (group.empty()) continue;
    std::complex<double> sum = 0.0;
    for (auto k : group) sum += std::polar(1.0, sys.measurements(k));
    const double centre = std::abs(sum) > 0.0 ? std::arg(sum) : 0.0;
    for (auto k : group) {
      const double offset = wrap_angle(sys.measurements(k) - centre);
      sys.measurements(k) = centre + offset;
      sys.branch_ambiguous[static_cast<std::size_t>(k)] = std::abs(offset) > pi - wrap_margin;
    }
  }

  sys.design = std::move(dm.matrix);
  sys.layout = std::move(dm.layout);
  return sys;
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double tol = static_cast<double>(std::max(m.rows(), m.cols())) *
                     std::numeric_limits<double>::epsilon() * s(0);
  return (s.array() > tol).count();
}

}  // namespace nestcal
