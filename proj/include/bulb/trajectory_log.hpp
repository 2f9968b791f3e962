#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bulb {

struct LogRow {
  double t = 0.0;
  double energy = 0.0;     // (1/2) ||v||_2^2
  double enstrophy = 0.0;  // ||omega||_2^2
  double grad_sup = 0.0;
  double omega_sup = 0.0;
  std::vector<double> omega_lp;  // one entry per configured p
  double bkm_integral = 0.0;     // int_0^t ||omega||_inf
  double gradint = 0.0;          // int_0^t ||grad v||_inf
  double tail_fraction = 0.0;
};

/// Time series of norms along a run, with stride and convention metadata.
///
/// `t` is the physical time for physical-frame runs and the renormalized
/// time s for renormalized runs. Accumulator columns are filled in by append()
/// using the trapezoid rule, so callers only supply the instantaneous values.
class TrajectoryLog {
 public:
  TrajectoryLog() = default;
  explicit TrajectoryLog(std::vector<double> p_list);

  const std::vector<double>& p_list() const { return p_list_; }
  const std::vector<LogRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const LogRow& operator[](std::size_t i) const { return rows_[i]; }
  const LogRow& back() const { return rows_.back(); }

  /// Appends a row; throws DomainError unless t increases strictly and values are finite.
  void append(LogRow row);
  /// Appends a row whose accumulators are already set (e.g. read from disk).
  void append_raw(LogRow row);

  /// Column index of p in the configured list, or throws DomainError naming the column.
  std::size_t lp_column(double p) const;

  std::vector<double> times() const;
  std::vector<double> column(const std::string& name) const;
  std::vector<std::string> header() const;

  /// Free-form metadata written as "# key=value" lines ahead of the header.
  std::map<std::string, std::string> meta;

  void write_csv(std::ostream& out) const;
  static TrajectoryLog read_csv(std::istream& in);

 private:
  std::vector<double> p_list_;
  std::vector<LogRow> rows_;
};

/// Column label for an L^p norm ("omega_lp_2", "omega_lp_inf", "omega_lp_0.5").
std::string lp_label(double p);
/// Round-trip double formatting used by every text artifact.
std::string format_double(double v);

/// Cumulative trapezoid integral of f over t; out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> t, std::span<const double> f);
/// Integral of the piecewise-linear interpolant of f from t[0] to x (x clamped to the range).
double trapezoid_to(std::span<const double> t, std::span<const double> f, double x);
/// Piecewise-linear interpolation; throws DomainError outside [t.front(), t.back()].
double interpolate(std::span<const double> t, std::span<const double> f, double x);

}  // namespace bulb
