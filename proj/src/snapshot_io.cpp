#include "bulb/snapshot_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bulb/errors.hpp"
#include "bulb/spectral.hpp"

namespace bulb {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T swap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  template <class T>
  void put(T v) {
    v = swap_if_big(v);
    buf_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  std::string& bytes() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& b) : b_(b) {}
  template <class T>
  T get() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return swap_if_big(v);
  }
  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, b_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw IoError("snapshot: file is truncated");
  }
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_snapshot(const Snapshot& snap) {
  const GridSpec& g = snap.velocity.grid;
  Writer w;
  w.raw("BULB", 4);
  w.put<std::uint32_t>(kSnapshotVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.n));
  w.put<double>(snap.time);
  w.put<double>(snap.viscosity);
  w.put<std::uint8_t>(snap.frame == Frame::renormalized ? 1 : 0);
  w.put<double>(snap.alpha);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(snap.mu.family));
  w.put<double>(snap.mu.T);
  w.put<double>(snap.mu.gamma);
  w.put<std::int32_t>(snap.mu.sign);
  w.put<double>(g.domain_length);
  w.put<double>(g.dealias_fraction);
  w.put<double>(snap.log_mu);
  w.put<double>(snap.s);
  w.put<double>(snap.window_radius);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(snap.provenance));
  w.raw(snap.manifest.data(), snap.manifest.size());
  const PhysicalField p = to_physical(snap.velocity);
  for (int d = 0; d < 3; ++d)
    for (double v : p.comp[d]) w.put<double>(v);
  const Sha1 h = sha1(w.bytes());
  w.raw(h.data(), h.size());
  return std::move(w.bytes());
}

Snapshot decode_snapshot(const std::string& bytes) {
  if (bytes.size() < 4 + 20 || std::memcmp(bytes.data(), "BULB", 4) != 0) throw IoError("snapshot: bad magic");
  const std::string body = bytes.substr(0, bytes.size() - 20);
  Sha1 stored{};
  std::memcpy(stored.data(), bytes.data() + body.size(), 20);
  Reader r(body);
  char magic[4];
  r.raw(magic, 4);
  const auto version = r.get<std::uint32_t>();
  if (version != kSnapshotVersion) throw IoError("snapshot: unsupported version " + std::to_string(version));
  Snapshot s;
  GridSpec g;
  g.n = static_cast<int>(r.get<std::uint32_t>());
  s.time = r.get<double>();
  s.viscosity = r.get<double>();
  const auto frame = r.get<std::uint8_t>();
  if (frame > 1) throw IoError("snapshot: bad frame flag");
  s.frame = frame ? Frame::renormalized : Frame::physical;
  s.alpha = r.get<double>();
  const auto fam = r.get<std::uint32_t>();
  if (fam > 3) throw IoError("snapshot: bad mu family");
  s.mu.family = static_cast<MuFamily>(fam);
  s.mu.T = r.get<double>();
  s.mu.gamma = r.get<double>();
  s.mu.sign = r.get<std::int32_t>();
  g.domain_length = r.get<double>();
  g.dealias_fraction = r.get<double>();
  s.log_mu = r.get<double>();
  s.s = r.get<double>();
  s.window_radius = r.get<double>();
  const auto prov = r.get<std::uint8_t>();
  if (prov > 2) throw IoError("snapshot: bad provenance");
  s.provenance = static_cast<Provenance>(prov);
  r.raw(s.manifest.data(), s.manifest.size());
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw IoError(std::string("snapshot: bad grid: ") + e.what());
  }
  if (body.size() != r.pos() + 3 * g.points() * sizeof(double)) throw IoError("snapshot: payload size mismatch");
  if (sha1(body) != stored) throw IoError("snapshot: checksum mismatch");
  PhysicalField p = PhysicalField::zeros(g);
  for (int d = 0; d < 3; ++d)
    for (double& v : p.comp[d]) {
      v = r.get<double>();
      if (!std::isfinite(v)) throw IoError("snapshot: non-finite velocity value");
    }
  s.velocity = to_spectral(p);
  return s;
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  const std::string bytes = encode_snapshot(snap);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("snapshot: cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("snapshot: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return decode_snapshot(ss.str());
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

WindowField to_window(const Snapshot& snap) {
  WindowField w;
  w.field = snap.velocity;
  const double half_box = 0.5 * snap.velocity.grid.domain_length;
  if (snap.window_radius > 0.0 && std::abs(snap.window_radius - half_box) > 1e-12 * half_box)
    throw IoError("window radius " + std::to_string(snap.window_radius) + " does not match box length " +
                  std::to_string(snap.velocity.grid.domain_length));
  w.radius = snap.window_radius > 0.0 ? snap.window_radius : half_box;
  w.t = snap.time;
  w.s = snap.s;
  w.alpha = snap.alpha;
  w.mu = std::exp(snap.log_mu);
  return w;
}

}  // namespace bulb
