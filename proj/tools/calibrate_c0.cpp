// Brute-force calibration of the enstrophy-inequality constant.
#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "bulb/estimates.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Estimate C0 from random band-limited solenoidal fields"};
  int samples = 1000;
  int n = 32;
  std::uint64_t seed = 1;
  app.add_option("--samples", samples, "number of random fields")->check(CLI::PositiveNumber);
  app.add_option("--n", n, "lattice size")->check(CLI::Range(8, 512));
  app.add_option("--seed", seed, "first seed");
  CLI11_PARSE(app, argc, argv);
  try {
    const bulb::C0Calibration c = bulb::calibrate_c0(samples, n, seed);
    std::printf("samples=%d n=%d seed=%llu\nC=%.17g\nC0=%.17g\nadopted=%.17g\nmethod: %s\n", c.samples, c.n,
                static_cast<unsigned long long>(c.seed), c.C, c.C0, c.adopted, c.method.c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "calibrate_c0: %s\n", e.what());
    return 3;
  }
  return 0;
}
