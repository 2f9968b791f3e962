#include "bulb/trajectory_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bulb/errors.hpp"

namespace bulb {

namespace {

const std::vector<std::string> kLeading = {"t", "energy", "enstrophy", "grad_sup", "omega_sup"};
const std::vector<std::string> kTrailing = {"bkm_integral", "gradint", "tail_fraction"};

bool finite_row(const LogRow& r) {
  auto ok = [](double v) { return std::isfinite(v); };
  if (!(ok(r.t) && ok(r.energy) && ok(r.enstrophy) && ok(r.grad_sup) && ok(r.omega_sup) &&
        ok(r.bkm_integral) && ok(r.gradint) && ok(r.tail_fraction))) {
    return false;
  }
  return std::all_of(r.omega_lp.begin(), r.omega_lp.end(), ok);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("log: cannot parse number '" + s + "'");
  }
  if (used != s.size()) throw DomainError("log: cannot parse number '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string lp_label(double p) {
  if (std::isinf(p)) return "omega_lp_inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "omega_lp_%g", p);
  return buf;
}

TrajectoryLog::TrajectoryLog(std::vector<double> p_list) : p_list_(std::move(p_list)) {
  for (double p : p_list_) {
    if (!(p > 0.0)) throw DomainError("log: p must be positive");
  }
}

void TrajectoryLog::append(LogRow row) {
  if (!rows_.empty()) {
    const LogRow& prev = rows_.back();
    const double dt = row.t - prev.t;
    row.bkm_integral = prev.bkm_integral + 0.5 * dt * (prev.omega_sup + row.omega_sup);
    row.gradint = prev.gradint + 0.5 * dt * (prev.grad_sup + row.grad_sup);
  } else {
    row.bkm_integral = 0.0;
    row.gradint = 0.0;
  }
  append_raw(std::move(row));
}

void TrajectoryLog::append_raw(LogRow row) {
  if (row.omega_lp.size() != p_list_.size()) throw DomainError("log: row has wrong number of L^p entries");
  if (!finite_row(row)) throw DomainError("log: non-finite entry at t=" + format_double(row.t));
  if (!rows_.empty() && !(row.t > rows_.back().t)) {
    throw DomainError("log: times must increase strictly");
  }
  rows_.push_back(std::move(row));
}

std::size_t TrajectoryLog::lp_column(double p) const {
  for (std::size_t i = 0; i < p_list_.size(); ++i) {
    if (p_list_[i] == p || (std::isinf(p) && std::isinf(p_list_[i]))) return i;
  }
  throw DomainError("log: missing column " + lp_label(p));
}

std::vector<double> TrajectoryLog::times() const { return column("t"); }

std::vector<double> TrajectoryLog::column(const std::string& name) const {
  std::vector<double> out;
  out.reserve(rows_.size());
  auto pick = [&](auto getter) {
    for (const auto& r : rows_) out.push_back(getter(r));
  };
  if (name == "t") pick([](const LogRow& r) { return r.t; });
  else if (name == "energy") pick([](const LogRow& r) { return r.energy; });
  else if (name == "enstrophy") pick([](const LogRow& r) { return r.enstrophy; });
  else if (name == "grad_sup") pick([](const LogRow& r) { return r.grad_sup; });
  else if (name == "omega_sup") pick([](const LogRow& r) { return r.omega_sup; });
  else if (name == "bkm_integral") pick([](const LogRow& r) { return r.bkm_integral; });
  else if (name == "gradint") pick([](const LogRow& r) { return r.gradint; });
  else if (name == "tail_fraction") pick([](const LogRow& r) { return r.tail_fraction; });
  else {
    for (std::size_t i = 0; i < p_list_.size(); ++i) {
      if (lp_label(p_list_[i]) == name) {
        pick([i](const LogRow& r) { return r.omega_lp[i]; });
        return out;
      }
    }
    throw DomainError("log: missing column " + name);
  }
  return out;
}

std::vector<std::string> TrajectoryLog::header() const {
  std::vector<std::string> h = kLeading;
  for (double p : p_list_) h.push_back(lp_label(p));
  h.insert(h.end(), kTrailing.begin(), kTrailing.end());
  return h;
}

void TrajectoryLog::write_csv(std::ostream& out) const {
  // The manifest line, when present, always comes first.
  if (auto it = meta.find("manifest"); it != meta.end()) out << "# manifest=" << it->second << '\n';
  for (const auto& [k, v] : meta) {
    if (k != "manifest") out << "# " << k << '=' << v << '\n';
  }
  const auto h = header();
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
  out << '\n';
  for (const auto& r : rows_) {
    out << format_double(r.t) << ',' << format_double(r.energy) << ',' << format_double(r.enstrophy) << ','
        << format_double(r.grad_sup) << ',' << format_double(r.omega_sup);
    for (double v : r.omega_lp) out << ',' << format_double(v);
    out << ',' << format_double(r.bkm_integral) << ',' << format_double(r.gradint) << ','
        << format_double(r.tail_fraction) << '\n';
  }
}

TrajectoryLog TrajectoryLog::read_csv(std::istream& in) {
  std::string line;
  std::map<std::string, std::string> meta;
  std::vector<std::string> head;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    head = split(line, ',');
    break;
  }
  if (head.size() < kLeading.size() + kTrailing.size()) throw DomainError("log: missing or short header");
  for (std::size_t i = 0; i < kLeading.size(); ++i) {
    if (head[i] != kLeading[i]) throw DomainError("log: missing column " + kLeading[i]);
  }
  const std::size_t n_lp = head.size() - kLeading.size() - kTrailing.size();
  for (std::size_t i = 0; i < kTrailing.size(); ++i) {
    if (head[kLeading.size() + n_lp + i] != kTrailing[i]) throw DomainError("log: missing column " + kTrailing[i]);
  }
  std::vector<double> ps;
  for (std::size_t i = 0; i < n_lp; ++i) {
    const std::string& label = head[kLeading.size() + i];
    const std::string prefix = "omega_lp_";
    if (label.rfind(prefix, 0) != 0) throw DomainError("log: unexpected column " + label);
    const std::string p = label.substr(prefix.size());
    ps.push_back(p == "inf" ? std::numeric_limits<double>::infinity() : parse_double(p));
  }
  TrajectoryLog log(ps);
  log.meta = std::move(meta);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != head.size()) throw DomainError("log: row has wrong number of cells");
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(parse_double(c));
    LogRow r;
    r.t = v[0];
    r.energy = v[1];
    r.enstrophy = v[2];
    r.grad_sup = v[3];
    r.omega_sup = v[4];
    r.omega_lp.assign(v.begin() + 5, v.begin() + 5 + n_lp);
    r.bkm_integral = v[5 + n_lp];
    r.gradint = v[6 + n_lp];
    r.tail_fraction = v[7 + n_lp];
    log.append_raw(std::move(r));
  }
  return log;
}

std::vector<double> cumulative_trapezoid(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) throw DomainError("trapezoid: size mismatch");
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return out;
}

double interpolate(std::span<const double> t, std::span<const double> f, double x) {
  if (t.empty() || t.size() != f.size()) throw DomainError("interpolate: bad table");
  const double span = t.back() - t.front();
  const double slack = 1e-12 * std::max(1.0, std::abs(span));
  if (x < t.front() - slack || x > t.back() + slack) throw DomainError("interpolate: outside coverage");
  if (t.size() == 1 || x <= t.front()) return f.front();
  if (x >= t.back()) return f.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
  return f[i - 1] + w * (f[i] - f[i - 1]);
}

double trapezoid_to(std::span<const double> t, std::span<const double> f, double x) {
  if (t.empty() || t.size() != f.size()) throw DomainError("trapezoid: bad table");
  x = std::clamp(x, t.front(), t.back());
  double sum = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] <= x) {
      sum += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    } else {
      const double fx = f[i - 1] + (x - t[i - 1]) / (t[i] - t[i - 1]) * (f[i] - f[i - 1]);
      sum += 0.5 * (x - t[i - 1]) * (f[i - 1] + fx);
      break;
    }
  }
  return sum;
}

}  // namespace bulb
