#pragma once

#include <string>

#include "bulb/digest.hpp"
#include "bulb/grid.hpp"
#include "bulb/profile.hpp"
#include "bulb/similarity.hpp"
#include "bulb/tracer.hpp"

namespace bulb {

/// A velocity field on disk together with the frame it lives in.
///
/// File layout (little-endian): "BULB", u32 version, u32 n, f64 time, f64 viscosity,
/// u8 frame (0 physical, 1 renormalized), f64 alpha, u32 mu family, f64 mu T, f64 mu gamma,
/// i32 mu sign, f64 domain length, f64 dealias fraction, f64 log mu, f64 s, f64 window radius
/// (0 for a full box), u8 provenance, 20-byte manifest hash, then 3 n^3 f64 velocity values in
/// physical space (component-major, x fastest), then the SHA-1 of every preceding byte.
struct Snapshot {
  SpectralField velocity;
  double time = 0.0;
  double viscosity = 0.0;
  Frame frame = Frame::physical;
  double alpha = 0.0;
  MuParams mu;
  double log_mu = 0.0;
  double s = 0.0;
  double window_radius = 0.0;
  Provenance provenance = Provenance::external;
  Sha1 manifest{};
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

std::string encode_snapshot(const Snapshot& snap);
/// Throws IoError on bad magic, unknown version, truncation or checksum mismatch.
Snapshot decode_snapshot(const std::string& bytes);

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

/// Renormalized snapshot as a window field (radius from the header, or half the box when 0).
WindowField to_window(const Snapshot& snap);

}  // namespace bulb
