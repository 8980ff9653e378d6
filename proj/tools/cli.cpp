#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "polytoep/brownhalmos.hpp"
#include "polytoep/cpmaps.hpp"
#include "polytoep/errors.hpp"
#include "polytoep/sampling.hpp"
#include "polytoep/toeplitz.hpp"

namespace polytoep::cli {

using nlohmann::json;
namespace fs = std::filesystem;

PolydomainSpec default_spec() {
  PolydomainSpec s;
  s.k = 2;
  s.n = {2, 1};
  s.m = {2, 1};
  s.coeffs = {{{Word(2, {1}), 1.0}, {Word(2, {2}), 1.0}, {Word(2, {1, 2}), 0.5}},
              {{Word(1, {1}), 1.0}, {Word(1, {1, 1}), 0.3}}};
  return s;
}

PolydomainSpec load_spec(const RunConfig& cfg) {
  return cfg.spec_path.empty() ? default_spec() : PolydomainSpec::load(cfg.spec_path);
}

std::vector<int> resolve_trunc(const RunConfig& cfg, const PolydomainSpec& spec) {
  std::vector<int> t;
  std::stringstream ss(cfg.trunc);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw SpecError("--trunc: cannot parse '" + item + "'");
    }
    if (used != item.size()) throw SpecError("--trunc: cannot parse '" + item + "'");
    if (v < 1) throw SpecError("--trunc: truncation degrees must be at least 1");
    t.push_back(v);
  }
  if (t.size() == 1) t.assign(static_cast<std::size_t>(spec.k), t[0]);
  if (static_cast<int>(t.size()) != spec.k)
    throw SpecError("--trunc: expected 1 or " + std::to_string(spec.k) + " values, got " + std::to_string(t.size()));
  return t;
}

namespace {

void check_config(const RunConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw SpecError("--tol must be positive");
  if (cfg.coeff_dim < 1) throw SpecError("--coeff-dim must be at least 1");
}

void write_file(const RunConfig& cfg, const std::string& name, const std::string& text) {
  fs::create_directories(cfg.out);
  std::ofstream f(fs::path(cfg.out) / name);
  if (!f) throw FormatError("cannot write " + (fs::path(cfg.out) / name).string());
  f << text;
}

json config_json(const RunConfig& cfg, const PolydomainSpec& spec, const std::vector<int>& trunc) {
  return {{"spec", json::parse(spec.to_json_text())},
          {"trunc", trunc},
          {"coeff_dim", cfg.coeff_dim},
          {"tol", cfg.tol},
          {"seed", cfg.seed}};
}

// coefficient dimension implied by an operator file on the given scalar space
FockOperator load_operator(const std::string& path, const PolydomainSpec& spec, const std::vector<int>& trunc) {
  const SparseMatrix m = read_coo(path);
  const auto scalar = make_space(spec, trunc);
  if (m.rows() != m.cols()) throw DimensionMismatch("operator file is not square");
  if (m.rows() == 0 || m.rows() % scalar->dim() != 0)
    throw DimensionMismatch("operator has " + std::to_string(m.rows()) + " rows; expected a multiple of the Fock dimension " +
                            std::to_string(scalar->dim()));
  return FockOperator(with_coeff_dim(scalar, static_cast<int>(m.rows() / scalar->dim())), m, path);
}

FourierSymbol load_symbol(const std::string& path, const PolydomainSpec& spec, const std::vector<int>& trunc,
                          int fallback_dim) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  int cd = fallback_dim;
  if (j.is_array() && !j.empty() && j[0].contains("re") && j[0]["re"].is_array()) cd = static_cast<int>(j[0]["re"].size());
  if (cd < 1) throw DimensionMismatch("symbol coefficients are empty");
  return FourierSymbol::from_json(make_space(spec, trunc, cd), j);
}

// largest entrywise deviation of the defect from the vacuum projection
double vacuum_defect_error(const SparseTuple& X) {
  const SparseMatrix D = defect(X, X.spec().m);
  SparseMatrix P(D.rows(), D.cols());
  P.insert(0, 0) = 1.0;
  return max_abs(SparseMatrix(D - P));
}

double symbol_distance(const FourierSymbol& a, const FourierSymbol& b) {
  double worst = 0.0;
  for (const auto& [p, A] : a.coefficients()) {
    const DenseMatrix* B = b.find(p);
    worst = std::max(worst, B ? max_abs(DenseMatrix(A - *B)) : max_abs(A));
  }
  for (const auto& [p, B] : b.coefficients())
    if (!a.find(p)) worst = std::max(worst, max_abs(B));
  return worst;
}

// a basis pair to corrupt: non-comparable when one exists, else a comparable off-diagonal pair
std::pair<Index, Index> injection_target(const FockSpace& s) {
  const auto& B = s.basis();
  for (Index r = 0; r < s.dim(); ++r)
    for (Index c = 0; c < s.dim(); ++c)
      if (!comparable(B.multiword(r), B.multiword(c))) return {r, c};
  return {1, 0};
}

json weights_oracle_check(const PolydomainSpec& spec, const std::vector<int>& trunc) {
  double worst = 0.0;
  Index words = 0;
  std::vector<int> t = trunc;
  for (auto& x : t) x = std::min(x, 8);
  const WeightTable table = build_weight_table(spec, t);
  for (int i = 0; i < spec.k; ++i)
    for (Index w = 0; w < table.indexer(i).count(); ++w) {
      const double ref = brute_force_weight(spec, i, table.indexer(i).word(w));
      worst = std::max(worst, std::abs(table.at(i, w) - ref) / ref);
      ++words;
    }
  return {{"passed", worst <= 1e-12}, {"max_relative_error", worst}, {"threshold", 1e-12}, {"words", words}};
}

json defect_check(const SpacePtr& s) {
  const double w = vacuum_defect_error(universal_model(s));
  const double l = vacuum_defect_error(right_universal_model(s));
  return {{"passed", std::max(w, l) <= 1e-10},
          {"left_model_error", w},
          {"right_model_error", l},
          {"threshold", 1e-10},
          {"headroom", 0}};
}

json berezin_check(const PolydomainSpec& spec, const std::vector<int>& trunc, Rng& rng, double tol, int samples) {
  const auto s = make_space(spec, trunc);
  double worst_excess = -1.0, worst_defect = 0.0, worst_tail = 0.0, worst_inter = 0.0;
  const std::vector<int> dims(static_cast<std::size_t>(spec.k), 2);
  for (int t = 0; t < samples; ++t) {
    const PureTupleSample sample = random_pure_tuple(spec, dims, rng, 0.5);
    const BerezinKernel K = berezin_kernel(s, sample.tuple);
    const double d = kernel_isometry_defect(K);
    worst_excess = std::max(worst_excess, d - std::max(1e-8, K.tail_bound));
    worst_defect = std::max(worst_defect, d);
    worst_tail = std::max(worst_tail, K.tail_bound);
    worst_inter = std::max(worst_inter, intertwining_residual(K, sample.tuple).residual);
  }
  return {{"passed", worst_excess <= 0.0 && worst_inter <= tol},
          {"samples", samples},
          {"max_isometry_defect", worst_defect},
          {"max_tail_bound", worst_tail},
          {"max_intertwining_residual", worst_inter},
          {"intertwining_threshold", tol},
          {"intertwining_headroom", 1}};
}

}  // namespace

int run_weights(const RunConfig& cfg, std::ostream& out) {
  check_config(cfg);
  const PolydomainSpec spec = load_spec(cfg);
  const std::vector<int> trunc = resolve_trunc(cfg, spec);
  const WeightTable table = build_weight_table(spec, trunc);
  json report;
  report["oracle"] = weights_oracle_check(spec, trunc);
  report["compactness"] = json::array();
  for (int i = 0; i < spec.k; ++i) {
    const CompactnessReport c = compactness_ratios(table, i);
    json trend = json::array();
    for (const auto& t : c.trend)
      trend.push_back({{"degree", t.degree}, {"min_ratio", t.min_ratio}, {"max_ratio", t.max_ratio}});
    report["compactness"].push_back({{"factor", i + 1}, {"supremum", c.supremum}, {"trend", trend}});
  }
  if (cfg.out.empty()) {
    out << table.to_csv();
  } else {
    write_file(cfg, "weights.csv", table.to_csv());
    write_file(cfg, "weights_report.json", report.dump(2) + "\n");
    out << report.dump(2) << "\n";
  }
  return report["oracle"]["passed"].get<bool>() ? kPass : kVerificationFailure;
}

int run_model(const RunConfig& cfg, std::ostream& out) {
  check_config(cfg);
  const PolydomainSpec spec = load_spec(cfg);
  const std::vector<int> trunc = resolve_trunc(cfg, spec);
  const auto s = make_space(spec, trunc);
  json report;
  report["config"] = config_json(cfg, spec, trunc);
  report["dim"] = s->dim();
  report["defect_identity"] = defect_check(s);
  report["membership"] = is_member(universal_model(s), 1e-10).member;
  json files = json::array();
  if (!cfg.out.empty()) {
    for (int i = 0; i < spec.k; ++i)
      for (int j = 1; j <= spec.n[static_cast<std::size_t>(i)]; ++j) {
        const std::string tag = std::to_string(i + 1) + "_" + std::to_string(j);
        std::ostringstream w, l;
        write_coo(w, weighted_left_creation(s, i, j).matrix());
        write_coo(l, weighted_right_creation(s, i, j).matrix());
        write_file(cfg, "W_" + tag + ".coo", w.str());
        write_file(cfg, "Lambda_" + tag + ".coo", l.str());
        files.push_back("W_" + tag + ".coo");
        files.push_back("Lambda_" + tag + ".coo");
      }
    write_file(cfg, "model.json", report.dump(2) + "\n");
  }
  report["files"] = files;
  out << report.dump(2) << "\n";
  return report["defect_identity"]["passed"].get<bool>() && report["membership"].get<bool>() ? kPass
                                                                                           : kVerificationFailure;
}

int run_verify(const RunConfig& cfg, const VerifyOptions& opt, std::ostream& out) {
  check_config(cfg);
  const PolydomainSpec spec = load_spec(cfg);
  const std::vector<int> trunc = resolve_trunc(cfg, spec);
  Rng rng(cfg.seed);
  const auto scalar = make_space(spec, trunc);
  const auto space = with_coeff_dim(scalar, cfg.coeff_dim);
  json checks;

  checks["weights_oracle"] = weights_oracle_check(spec, trunc);
  checks["defect_identity"] = defect_check(scalar);
  checks["berezin"] = berezin_check(spec, trunc, rng, cfg.tol, 5);

  {  // Toeplitz round trip
    double worst_violation = 0.0, worst_recovery = 0.0;
    bool verdicts = true;
    json flagged = nullptr;
    const int samples = 10;
    for (int t = 0; t < samples; ++t) {
      const FourierSymbol sym = random_symbol(space, rng, 10);
      FockOperator T = evaluate_symbol(sym, 1.0);
      if (opt.inject_violation && t == 0) {
        const auto [r, c] = injection_target(*space);
        std::vector<Triplet> tr;
        tr.emplace_back(r, c, cplx(1e-3));
        SparseMatrix bump(space->total_dim(), space->total_dim());
        bump.setFromTriplets(tr.begin(), tr.end());
        T = T + FockOperator(space, bump);
      }
      const ToeplitzReport rep = is_multi_toeplitz(T);
      worst_violation = std::max(worst_violation, rep.max_violation);
      if (!rep.verdict) {
        verdicts = false;
        if (flagged.is_null()) flagged = {{"sample", t}, {"report", rep.to_json()}};
        continue;
      }
      worst_recovery = std::max(worst_recovery, symbol_distance(extract_fourier(T), sym));
    }
    checks["toeplitz_roundtrip"] = {{"passed", verdicts && worst_recovery <= 1e-12 && worst_violation <= 1e-10},
                                    {"samples", samples},
                                    {"max_violation", worst_violation},
                                    {"max_coefficient_error", worst_recovery},
                                    {"flagged", flagged}};
  }

  {  // homogeneous decomposition, exact identities only
    const FockOperator T = evaluate_symbol(random_symbol(space, rng, 10), 1.0);
    DenseMatrix sum = DenseMatrix::Zero(space->total_dim(), space->total_dim());
    double adjoint_err = 0.0;
    for (const auto& [deg, part] : homogeneous_decomposition(T)) {
      sum += part.dense();
      std::vector<int> neg = deg;
      for (auto& x : neg) x = -x;
      adjoint_err = std::max(adjoint_err, max_abs(SparseMatrix(homogeneous_part(T.adjoint(), deg).matrix() -
                                                               SparseMatrix(homogeneous_part(T, neg).matrix().adjoint()))));
    }
    const double sum_err = max_abs(DenseMatrix(sum - T.dense()));
    std::vector<int> N2(trunc);
    for (auto& x : N2) x *= 2;
    const double partial_err = max_abs(SparseMatrix(partial_sum_reconstruct(T, N2).matrix() - T.matrix()));
    const double fejer_err = max_abs(SparseMatrix(cesaro_reconstruct(T, N2).matrix() - T.matrix()));
    checks["homogeneous_decomposition"] = {{"passed", sum_err == 0.0 && adjoint_err == 0.0 && partial_err <= 1e-14},
                                           {"sum_error", sum_err},
                                           {"adjoint_error", adjoint_err},
                                           {"partial_sum_error_at_2L", partial_err},
                                           {"fejer_error_at_2L_measured", fejer_err}};
  }

  {  // radial monotonicity
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
      const FourierSymbol sym = random_symbol(space, rng, 10);
      double prev = 0.0;
      for (int step = 0; step <= 10; ++step) {
        const double n = op_norm(evaluate_symbol(sym, step / 10.0).matrix());
        worst = std::max(worst, prev - n);
        prev = n;
      }
    }
    checks["radial_monotonicity"] = {{"passed", worst <= 1e-10}, {"max_decrease", worst}, {"threshold", 1e-10}};
  }

  {  // Schur-type equivalence
    int agree = 0, total = 0, psd = 0;
    for (int t = 0; t < 8; ++t) {
      const FourierSymbol sym = random_hermitian_symbol(space, rng, 4, 0.25 * t - 0.5);
      for (double r : {0.3, 0.7}) {
        const bool k = psd_check(pluriharmonic_kernel(sym, r).matrix(), 1e-9).psd;
        const bool f = psd_check(evaluate_symbol(sym, r).matrix(), 1e-9).psd;
        agree += (k == f);
        psd += f;
        ++total;
      }
    }
    checks["kernel_psd"] = {{"passed", agree == total}, {"agreements", agree}, {"cases", total}, {"psd_cases", psd}};
  }

  {  // Brown-Halmos
    double worst = 0.0, idem = 0.0, proj = 0.0, psi = 0.0;
    bool exact = true;
    std::vector<FockOperator> ops = {identity(space)};
    for (int t = 0; t < 2; ++t) ops.push_back(evaluate_symbol(random_symbol(space, rng, 10), 1.0));
    for (const auto& T : ops)
      for (int i = 0; i < spec.k; ++i) {
        const BHResidual r = bh_residual(T, i);
        worst = std::max(worst, r.residual);
        exact = exact && r.exact_norm;
      }
    for (int i = 0; i < spec.k; ++i) {
      const RowOperator C = build_row(space, i);
      const DualIdentities d = dual_identities(C, cauchy_dual(C));
      idem = std::max(idem, d.idempotency);
      proj = std::max(proj, d.projection_residual);
      psi = std::max(psi, d.psi_identity);
    }
    checks["brown_halmos"] = {{"passed", worst <= cfg.tol && idem <= 1e-10 && proj <= 1e-9 && psi <= 1e-9},
                              {"max_residual", worst},
                              {"residual_exact_norm", exact},
                              {"max_idempotency", idem},
                              {"max_projection_residual", proj},
                              {"max_psi_identity_residual", psi},
                              {"operators", static_cast<int>(ops.size())}};
  }

  bool passed = true;
  for (const auto& [name, c] : checks.items()) passed = passed && c["passed"].get<bool>();
  json report = {{"config", config_json(cfg, spec, trunc)}, {"checks", checks}, {"passed", passed}};
  const std::string text = report.dump(2) + "\n";
  if (!cfg.out.empty()) write_file(cfg, "verify.json", text);
  out << text;
  return passed ? kPass : kVerificationFailure;
}

int run_toeplitz(const RunConfig& cfg, const std::string& op_path, std::ostream& out) {
  check_config(cfg);
  const PolydomainSpec spec = load_spec(cfg);
  const std::vector<int> trunc = resolve_trunc(cfg, spec);
  const FockOperator T = load_operator(op_path, spec, trunc);
  const ToeplitzReport rep = is_multi_toeplitz(T, std::min(cfg.tol, 1e-10));
  json j = rep.to_json();
  if (rep.verdict) {
    const FourierSymbol sym = extract_fourier(T, rep.tolerance, 1e-14);
    j["symbol"] = sym.to_json();
    if (!cfg.out.empty()) write_file(cfg, "symbol.json", sym.to_json().dump(2) + "\n");
  }
  if (!cfg.out.empty()) {
    write_file(cfg, "toeplitz.json", rep.to_json().dump(2) + "\n");
    write_file(cfg, "toeplitz.txt", rep.to_text());
  }
  out << j.dump(2) << "\n";
  return rep.verdict ? kPass : kVerificationFailure;
}

int run_fourier(const RunConfig& cfg, const std::string& symbol_path, double r, std::ostream& out) {
  check_config(cfg);
  if (r < 0.0 || r > 1.0) throw SpecError("--r must lie in [0, 1]");
  const PolydomainSpec spec = load_spec(cfg);
  const std::vector<int> trunc = resolve_trunc(cfg, spec);
  const FourierSymbol sym = load_symbol(symbol_path, spec, trunc, cfg.coeff_dim);
  const FockOperator T = evaluate_symbol(sym, r);
  std::ostringstream coo;
  write_coo(coo, T.matrix());
  if (cfg.out.empty()) {
    out << coo.str();
  } else {
    write_file(cfg, "operator.coo", coo.str());
    out << json({{"rows", T.matrix().rows()}, {"nnz", T.matrix().nonZeros()}, {"file", "operator.coo"}}).dump(2) << "\n";
  }
  return kPass;
}

namespace {

DenseTuple load_tuple(const std::string& manifest, const PolydomainSpec& spec) {
  std::ifstream f(manifest);
  if (!f) throw FormatError("cannot open " + manifest);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError(manifest + ": " + e.what());
  }
  if (!j.contains("factors") || !j["factors"].is_array()) throw FormatError("manifest needs a 'factors' array");
  const fs::path base = fs::path(manifest).parent_path();
  std::vector<std::vector<DenseMatrix>> e;
  for (const auto& factor : j["factors"]) {
    e.emplace_back();
    for (const auto& file : factor) e.back().push_back(DenseMatrix(read_coo((base / file.get<std::string>()).string())));
  }
  return DenseTuple(spec, std::move(e));
}

}  // namespace

int run_berezin(const RunConfig& cfg, const BerezinOptions& opt, std::ostream& out) {
  check_config(cfg);
  const PolydomainSpec spec = load_spec(cfg);
  const std::vector<int> trunc = resolve_trunc(cfg, spec);
  const auto s = make_space(spec, trunc);
  Rng rng(cfg.seed);
  json j;
  j["config"] = config_json(cfg, spec, trunc);
  DenseTuple X = [&] {
    if (!opt.manifest.empty()) return load_tuple(opt.manifest, spec);
    if (opt.dim_h < 1 || !(opt.fraction > 0.0 && opt.fraction < 1.0)) throw SpecError("--dim-h >= 1 and 0 < --fraction < 1");
    const PureTupleSample p = random_pure_tuple(spec, std::vector<int>(static_cast<std::size_t>(spec.k), opt.dim_h), rng, opt.fraction);
    j["random_tuple"] = {{"r_max", p.r_max}, {"radius", p.radius}};
    return p.tuple;
  }();
  const MembershipResult mem = is_member(X, 1e-10);
  j["member"] = mem.member;
  j["purity"] = {{"pure", is_pure(X, 200, 1e-12).pure}};
  if (!mem.member) {
    j["witness"] = {{"p", mem.witness_p}, {"eigenvalue", mem.witness_eigenvalue}};
    out << j.dump(2) << "\n";
    return kVerificationFailure;
  }
  const BerezinKernel K = berezin_kernel(s, X);
  const double d = kernel_isometry_defect(K);
  const IntertwiningResult inter = intertwining_residual(K, X);
  const double knorm = op_norm(K.K);
  j["isometry_defect"] = d;
  j["tail_bound"] = K.tail_bound;
  j["tail_terms"] = K.tail_terms;
  j["kernel_norm"] = knorm;
  j["intertwining"] = {{"residual", inter.residual}, {"safe_rows", inter.safe_rows}, {"headroom", inter.headroom}};
  const bool ok = d <= std::max(1e-8, K.tail_bound) && inter.residual <= cfg.tol && knorm <= 1.0 + 1e-10;
  j["passed"] = ok;
  if (!cfg.out.empty()) write_file(cfg, "berezin.json", j.dump(2) + "\n");
  out << j.dump(2) << "\n";
  return ok ? kPass : kVerificationFailure;
}

int run_brown_halmos(const RunConfig& cfg, const BrownHalmosOptions& opt, std::ostream& out) {
  check_config(cfg);
  const PolydomainSpec spec = load_spec(cfg);
  const std::vector<int> trunc = resolve_trunc(cfg, spec);
  if (opt.factor < 0 || opt.factor > spec.k) throw SpecError("--factor must lie in 1.." + std::to_string(spec.k));
  Rng rng(cfg.seed);
  const auto space = make_space(spec, trunc, cfg.coeff_dim);

  if (opt.search > 0) {
    // Candidates: Toeplitz operators plus a single-entry perturbation. Nothing is asserted.
    json found = json::array();
    double best = std::numeric_limits<double>::infinity();
    std::uniform_int_distribution<Index> pick(0, space->total_dim() - 1);
    for (int t = 0; t < opt.search; ++t) {
      FockOperator T = evaluate_symbol(random_symbol(space, rng, 6), 1.0);
      const Index r = pick(rng), c = pick(rng);
      std::vector<Triplet> tr;
      tr.emplace_back(r, c, cplx(1.0));
      SparseMatrix bump(space->total_dim(), space->total_dim());
      bump.setFromTriplets(tr.begin(), tr.end());
      T = T + FockOperator(space, bump);
      const BHScan scan = bh_scan(T, cfg.tol);
      double worst = 0.0;
      for (const auto& f : scan.factors) worst = std::max(worst, f.residual);
      best = std::min(best, worst);
      if (scan.classification == "BH-consistent") found.push_back({{"candidate", t}, {"row", r}, {"col", c}, {"max_residual", worst}});
    }
    json j = {{"mode", "search"}, {"candidates", opt.search}, {"bh_consistent_non_toeplitz", found}, {"smallest_max_residual", best}};
    out << j.dump(2) << "\n";
    return kPass;
  }

  const FockOperator T =
      opt.op_path.empty() ? evaluate_symbol(random_symbol(space, rng, 10), 1.0) : load_operator(opt.op_path, spec, trunc);
  json j;
  j["config"] = config_json(cfg, spec, trunc);
  j["operator"] = opt.op_path.empty() ? "random symbol" : opt.op_path;
  bool ok = true;
  if (opt.factor > 0) {
    const BHResidual r = bh_residual(T, opt.factor - 1);
    ok = r.residual <= cfg.tol;
    j["factors"] = json::array({{{"factor", opt.factor},
                                 {"residual", r.residual},
                                 {"residual_is_upper_bound", !r.exact_norm},
                                 {"range_dim", r.range_dim},
                                 {"headroom", r.headroom}}});
    j["satisfied"] = ok;
  } else {
    const BHScan scan = bh_scan(T, cfg.tol);
    ok = scan.satisfied;
    const json sj = scan.to_json();
    for (const auto& [k, v] : sj.items()) j[k] = v;
  }
  if (!cfg.out.empty()) write_file(cfg, "brown_halmos.json", j.dump(2) + "\n");
  out << j.dump(2) << "\n";
  return ok ? kPass : kVerificationFailure;
}

int run_kernel_psd(const RunConfig& cfg, const KernelPsdOptions& opt, std::ostream& out) {
  check_config(cfg);
  if (opt.r < 0.0 || opt.r >= 1.0) throw SpecError("--r must lie in [0, 1)");
  const PolydomainSpec spec = load_spec(cfg);
  const std::vector<int> trunc = resolve_trunc(cfg, spec);
  std::vector<FourierSymbol> symbols;
  if (!opt.symbol_path.empty()) {
    symbols.push_back(load_symbol(opt.symbol_path, spec, trunc, cfg.coeff_dim));
  } else {
    Rng rng(cfg.seed);
    const auto space = make_space(spec, trunc, cfg.coeff_dim);
    for (int t = 0; t < opt.samples; ++t) symbols.push_back(random_hermitian_symbol(space, rng, 4, 0.25 * t - 0.5));
  }
  json cases = json::array();
  bool all = true;
  for (const auto& sym : symbols) {
    const PsdResult k = psd_check(pluriharmonic_kernel(sym, opt.r).matrix(), 1e-9);
    const PsdResult f = psd_check(evaluate_symbol(sym, opt.r).matrix(), 1e-9);
    all = all && (k.psd == f.psd);
    cases.push_back({{"kernel_psd", k.psd},
                     {"kernel_min_eigenvalue", k.min_eigenvalue},
                     {"evaluation_psd", f.psd},
                     {"evaluation_min_eigenvalue", f.min_eigenvalue},
                     {"agree", k.psd == f.psd}});
  }
  json j = {{"r", opt.r}, {"cases", cases}, {"all_agree", all}};
  if (!cfg.out.empty()) write_file(cfg, "kernel_psd.json", j.dump(2) + "\n");
  out << j.dump(2) << "\n";
  return all ? kPass : kVerificationFailure;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted multi-Toeplitz operators on truncated Fock spaces"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--spec", cfg.spec_path, "polydomain JSON (default: built-in two-factor example)");
    sub->add_option("--trunc", cfg.trunc, "truncation degree, one value or one per factor")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "verification tolerance")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--coeff-dim", cfg.coeff_dim, "dimension of the coefficient space K")->capture_default_str();
  };

  auto* weights = app.add_subcommand("weights", "weight table, oracle cross-check and compactness ratios");
  common(weights);
  auto* model = app.add_subcommand("model", "universal model operators and the defect identity");
  common(model);
  auto* verify = app.add_subcommand("verify", "run the full property suite");
  common(verify);
  VerifyOptions vopt;
  verify->add_flag("--inject-violation", vopt.inject_violation, "corrupt one Toeplitz test operator");
  auto* toeplitz = app.add_subcommand("toeplitz", "classify an operator file and extract its symbol");
  common(toeplitz);
  std::string op_path;
  toeplitz->add_option("--op", op_path, "operator in coordinate format")->required();
  auto* fourier = app.add_subcommand("fourier", "evaluate a symbol on the universal model");
  common(fourier);
  std::string symbol_path;
  double r = 1.0;
  fourier->add_option("--symbol", symbol_path, "symbol JSON")->required();
  fourier->add_option("--r", r, "radius in [0,1]")->capture_default_str();
  auto* berezin = app.add_subcommand("berezin", "Berezin kernel checks for a pure tuple");
  common(berezin);
  BerezinOptions bopt;
  berezin->add_option("--tuple", bopt.manifest, "JSON manifest of X_{i,j} coordinate files");
  berezin->add_option("--dim-h", bopt.dim_h, "per-factor dimension of a random tuple")->capture_default_str();
  berezin->add_option("--fraction", bopt.fraction, "radius of a random tuple relative to the membership boundary")
      ->capture_default_str();
  auto* bh = app.add_subcommand("brown-halmos", "Brown-Halmos residuals");
  common(bh);
  BrownHalmosOptions hopt;
  bh->add_option("--op", hopt.op_path, "operator in coordinate format (default: random Toeplitz operator)");
  bh->add_option("--factor", hopt.factor, "single factor, 1-based");
  bh->add_option("--search", hopt.search, "search mode: number of perturbed candidates to scan");
  auto* kpsd = app.add_subcommand("kernel-psd", "positivity of the kernel versus the evaluated symbol");
  common(kpsd);
  KernelPsdOptions kopt;
  kpsd->add_option("--symbol", kopt.symbol_path, "Hermitian symbol JSON (default: random symbols)");
  kpsd->add_option("--r", kopt.r, "radius in [0,1)")->capture_default_str();
  kpsd->add_option("--samples", kopt.samples, "number of random symbols")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*weights) return run_weights(cfg, out);
    if (*model) return run_model(cfg, out);
    if (*verify) return run_verify(cfg, vopt, out);
    if (*toeplitz) return run_toeplitz(cfg, op_path, out);
    if (*fourier) return run_fourier(cfg, symbol_path, r, out);
    if (*berezin) return run_berezin(cfg, bopt, out);
    if (*bh) return run_brown_halmos(cfg, hopt, out);
    if (*kpsd) return run_kernel_psd(cfg, kopt, out);
  } catch (const SpecError& e) {
    err << "SpecError: " << e.what() << "\n";
    return kInputError;
  } catch (const TruncationError& e) {
    err << "TruncationError: " << e.what() << "\n";
    return kInputError;
  } catch (const NotComparable& e) {
    err << "NotComparable: " << e.what() << "\n";
    return kInputError;
  } catch (const DimensionMismatch& e) {
    err << "DimensionMismatch: " << e.what() << "\n";
    return kDimensionError;
  } catch (const FormatError& e) {
    err << "FormatError: " << e.what() << "\n";
    return kDimensionError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailure;
  }
  return kInputError;
}

}  // namespace polytoep::cli
