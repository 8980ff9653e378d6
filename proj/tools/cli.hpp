#pragma once

// Command implementations behind the polytoep executable. Each command writes
// its primary output to `out` and returns the process exit code.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polytoep/weights.hpp"

namespace polytoep::cli {

enum ExitCode : int { kPass = 0, kVerificationFailure = 1, kInputError = 2, kDimensionError = 3 };

struct RunConfig {
  std::string spec_path;       // empty: built-in default spec
  std::string trunc = "4";     // "4" or "4,3"
  int coeff_dim = 1;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::string out;             // output directory, optional
};

// k=2, n=(2,1), m=(2,1), f1 = Z1 + Z2 + 0.5 Z1Z2, f2 = z + 0.3 z^2
PolydomainSpec default_spec();
PolydomainSpec load_spec(const RunConfig& cfg);
// one truncation per factor; a single value is broadcast
std::vector<int> resolve_trunc(const RunConfig& cfg, const PolydomainSpec& spec);

struct VerifyOptions {
  bool inject_violation = false;
};

int run_weights(const RunConfig& cfg, std::ostream& out);
int run_model(const RunConfig& cfg, std::ostream& out);
int run_verify(const RunConfig& cfg, const VerifyOptions& opt, std::ostream& out);
int run_toeplitz(const RunConfig& cfg, const std::string& op_path, std::ostream& out);
int run_fourier(const RunConfig& cfg, const std::string& symbol_path, double r, std::ostream& out);

struct BerezinOptions {
  std::string manifest;  // JSON manifest of X_{i,j} files; empty: random pure tuple
  int dim_h = 2;         // per factor, for random tuples
  double fraction = 0.5;
};
int run_berezin(const RunConfig& cfg, const BerezinOptions& opt, std::ostream& out);

struct BrownHalmosOptions {
  std::string op_path;   // empty: operator from a random symbol
  int factor = 0;        // 1-based; 0 = all factors
  int search = 0;        // > 0: number of random candidates in search mode
};
int run_brown_halmos(const RunConfig& cfg, const BrownHalmosOptions& opt, std::ostream& out);

struct KernelPsdOptions {
  std::string symbol_path;  // empty: random Hermitian symbols
  double r = 0.5;
  int samples = 10;
};
int run_kernel_psd(const RunConfig& cfg, const KernelPsdOptions& opt, std::ostream& out);

// Full command line; errors are mapped to exit codes and reported on err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polytoep::cli
