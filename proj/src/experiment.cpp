#include "ballop/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "ballop/certificate_json.hpp"
#include "ballop/error.hpp"

namespace ballop::experiment {

using nlohmann::json;

namespace {

// Runs f(i) for i in [0, count) on up to `threads` workers; results come back
// in index order whatever the completion order.
template <typename F>
auto parallel_map(std::size_t count, unsigned threads, F f) -> std::vector<decltype(f(std::size_t{0}))> {
  std::vector<decltype(f(std::size_t{0}))> out(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) out[i] = f(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

std::mt19937_64 cell_rng(std::uint64_t seed, std::size_t cell) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(cell >> 32)};
  return std::mt19937_64(seq);
}

CMatrix random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix Z(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) Z(r, c) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(Z);
  CMatrix Q = qr.householderQ();
  const CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double m = std::abs(R(j, j));
    if (m > 0.0) Q.col(j) *= R(j, j) / m;
  }
  return Q;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string vector_label(const CVector& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ";";
    out += fmt_short(v[i].real());
    if (v[i].imag() != 0.0) out += (v[i].imag() < 0 ? "" : "+") + fmt_short(v[i].imag()) + "i";
  }
  return out + ")";
}

int aggregate_exit(const std::vector<ReportRow>& rows) {
  int code = kAllPass;
  for (const auto& r : rows) {
    if (r.exploratory) continue;
    if (r.status == Status::Error) return kNumericalError;
    if (r.status == Status::Fail) code = kCellFailed;
  }
  return code;
}

std::optional<Calibration> maybe_calibration(const ExperimentConfig& cfg) {
  if (!cfg.calibration_path) return std::nullopt;
  return Calibration::load(*cfg.calibration_path);
}

const json& need(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing field '" + key + "'");
  return j.at(key);
}

std::vector<int> parse_degrees(const json& j, const char* where) {
  std::vector<int> out;
  if (j.contains("degrees")) {
    out = j.at("degrees").get<std::vector<int>>();
  } else if (j.contains("D")) {
    out = {j.at("D").get<int>()};
  }
  if (out.empty()) throw ConfigError(std::string(where) + ": needs 'D' or a non-empty 'degrees' list");
  for (int D : out) {
    if (D < 0 || D > 64) throw ConfigError(std::string(where) + ": degrees must lie in [0, 64]");
  }
  return out;
}

std::string symbol_label(const SymbolCell& sym) {
  if (!sym.label.empty()) return sym.label;
  if (sym.kind == "mobius") return "mobius" + vector_label(sym.a);
  return sym.kind;
}

}  // namespace

// ---------------------------------------------------------------- config --

SpaceSpec SpaceCell::at_degree(int D) const {
  if (s) return SpaceSpec::hardy_s(n, *s, D);
  return SpaceSpec::weighted(n, std::vector<double>(beta.begin(), beta.begin() + D + 1));
}

std::string SpaceCell::label() const {
  std::string out = "n=" + std::to_string(n) + ";";
  out += s ? "s=" + fmt_short(*s) : "beta";
  return out;
}

int SymbolCell::dim() const {
  if (kind == "mobius") return static_cast<int>(a.size());
  if (kind == "linear") return static_cast<int>(V.rows());
  return static_cast<int>(B.size());
}

LinearFractionalMap SymbolCell::map() const {
  if (kind == "mobius") return mobius(a);
  if (kind == "linear") return linear_map(V);
  return LinearFractionalMap(A, B, C, d);
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  try {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    cfg.source_hash = content_hash(j.dump());

    for (const auto& sj : j.value("spaces", json::array())) {
      SpaceCell cell;
      cell.n = need(sj, "n", "space").get<int>();
      if (cell.n < 1 || cell.n > 4) throw ConfigError("space: n must lie in [1, 4]");
      cell.degrees = parse_degrees(sj, "space");
      if (sj.contains("s")) {
        cell.s = sj.at("s").get<double>();
        if (!(*cell.s > 0.0 && *cell.s <= 10.0)) throw ConfigError("space: s must lie in (0, 10]");
      } else if (sj.contains("beta")) {
        cell.beta = sj.at("beta").get<std::vector<double>>();
        const int dmax = *std::max_element(cell.degrees.begin(), cell.degrees.end());
        if (static_cast<int>(cell.beta.size()) < dmax + 1) {
          throw ConfigError("space: beta must list beta_0..beta_D for the largest degree");
        }
      } else {
        throw ConfigError("space: needs either 's' or 'beta'");
      }
      for (int D : cell.degrees) (void)cell.at_degree(D);  // validates weights
      cfg.spaces.push_back(std::move(cell));
    }

    for (const auto& yj : j.value("symbols", json::array())) {
      SymbolCell sym;
      sym.kind = need(yj, "kind", "symbol").get<std::string>();
      sym.label = yj.value("label", "");
      if (sym.kind == "mobius") {
        sym.a = vector_from_json(need(yj, "a", "mobius symbol"));
        if (sym.a.size() < 1 || !(sym.a.norm() < 1.0)) throw ConfigError("mobius symbol: need |a| < 1");
      } else if (sym.kind == "linear") {
        sym.V = matrix_from_json(need(yj, "V", "linear symbol"));
        if (sym.V.rows() != sym.V.cols()) throw ConfigError("linear symbol: V must be square");
        if (spectral_norm(sym.V) > 1.0 + 1e-12) throw ConfigError("linear symbol: need ||V|| <= 1");
      } else if (sym.kind == "lfm") {
        sym.A = matrix_from_json(need(yj, "A", "lfm symbol"));
        sym.B = vector_from_json(need(yj, "B", "lfm symbol"));
        sym.C = vector_from_json(need(yj, "C", "lfm symbol"));
        sym.d = complex_from_json(yj.value("d", json(1.0)));
        (void)sym.map();
      } else {
        throw ConfigError("symbol: unknown kind '" + sym.kind + "' (expected mobius, linear or lfm)");
      }
      cfg.symbols.push_back(std::move(sym));
    }

    for (const auto& tj : j.value("takagi", json::array())) {
      TakagiCell cell;
      cell.label = tj.value("label", "takagi" + std::to_string(cfg.takagi.size()));
      if (tj.value("construct", false)) {
        cell.mode = "construct";
        cell.n = tj.value("n", 2);
        if (cell.n < 2) throw ConfigError("takagi construct cell: n must be >= 2");
      } else {
        cell.V = matrix_from_json(need(tj, "V", "takagi cell"));
        cell.n = static_cast<int>(cell.V.rows());
        if (cell.V.rows() != cell.V.cols()) throw ConfigError("takagi cell: V must be square");
        if (spectral_norm(cell.V) > 1.0 + 1e-12) throw ConfigError("takagi cell: need ||V|| <= 1");
        const json& kj = need(tj, "K", "takagi cell");
        if (kj.is_string()) {
          if (kj.get<std::string>() != "search") throw ConfigError("takagi cell: K must be a matrix or \"search\"");
          if (cell.n != 2) throw ConfigError("takagi cell: K search is available for n = 2 only");
          cell.mode = "search";
        } else {
          cell.mode = "explicit";
          cell.K = matrix_from_json(kj);
          if (cell.K.rows() != cell.n || cell.K.cols() != cell.n) throw ConfigError("takagi cell: K must be n x n");
        }
      }
      cfg.takagi.push_back(std::move(cell));
    }

    auto parse_sweep = [](const json& wj) {
      Sweep sw;
      sw.n = need(wj, "n", "sweep").get<int>();
      if (sw.n < 1 || sw.n > 4) throw ConfigError("sweep: n must lie in [1, 4]");
      const json& sv = need(wj, "s", "sweep");
      sw.s_values = sv.is_array() ? sv.get<std::vector<double>>() : std::vector<double>{sv.get<double>()};
      sw.a_norms = need(wj, "a_norms", "sweep").get<std::vector<double>>();
      sw.degrees = parse_degrees(wj, "sweep");
      if (!std::is_sorted(sw.degrees.begin(), sw.degrees.end())) throw ConfigError("sweep: degrees must ascend");
      for (double r : sw.a_norms) {
        if (!(r >= 0.0 && r < 1.0)) throw ConfigError("sweep: a_norms must lie in [0, 1)");
      }
      for (double s : sw.s_values) {
        if (!(s > 0.0 && s <= 10.0)) throw ConfigError("sweep: s must lie in (0, 10]");
      }
      if (wj.contains("directions")) {
        for (const auto& dj : wj.at("directions")) {
          CVector d = vector_from_json(dj);
          if (d.size() != sw.n || d.norm() == 0.0) throw ConfigError("sweep: direction must be a nonzero n-vector");
          sw.directions.push_back(d / d.norm());
        }
      } else {
        CVector e = CVector::Zero(sw.n);
        e[0] = 1.0;
        sw.directions.push_back(e);
      }
      sw.probe_degree = wj.value("probe_degree", std::max(1, sw.degrees.front() / 2));
      if (sw.probe_degree < 0 || sw.probe_degree > sw.degrees.front()) {
        throw ConfigError("sweep: probe_degree must not exceed the smallest degree");
      }
      return sw;
    };
    if (j.contains("sweep")) cfg.sweeps.push_back(parse_sweep(j.at("sweep")));
    for (const auto& wj : j.value("sweeps", json::array())) cfg.sweeps.push_back(parse_sweep(wj));

    if (j.contains("thresholds")) {
      const json& tj = j.at("thresholds");
      Thresholds& t = cfg.thresholds;
      t.isometry = tj.value("isometry", t.isometry);
      t.involution = tj.value("involution", t.involution);
      t.symmetry = tj.value("symmetry", t.symmetry);
      t.normal_tol = tj.value("normal_tol", t.normal_tol);
      t.nonnormal_floor = tj.value("nonnormal_floor", t.nonnormal_floor);
      t.takagi_residual = tj.value("takagi_residual", t.takagi_residual);
      t.exploratory_a_norm = tj.value("exploratory_a_norm", t.exploratory_a_norm);
      t.monotone_floor = tj.value("monotone_floor", t.monotone_floor);
    }
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("output")) {
      const json& oj = j.at("output");
      cfg.output_dir = oj.is_string() ? oj.get<std::string>() : oj.value("dir", cfg.output_dir.string());
    }
    if (j.contains("calibration")) {
      std::filesystem::path p = j.at("calibration").get<std::string>();
      cfg.calibration_path = p.is_relative() ? base_dir / p : p;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ConfigError("configuration is not valid JSON: " + std::string(e.what()));
  }
  ExperimentConfig cfg = parse_config(j, path.parent_path());
  cfg.source_hash = content_hash(buf.str());
  return cfg;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Error: return "ERROR";
  }
  return "?";
}

// ----------------------------------------------------------- calibration --

Calibration Calibration::from_json(const json& j, std::string reference) {
  Calibration c;
  c.raw_ = j;
  c.reference_ = std::move(reference);
  return c;
}

Calibration Calibration::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open calibration file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    json j = json::parse(buf.str());
    std::string ref = path.filename().string() + "#" + content_hash(buf.str());
    return from_json(j, ref);
  } catch (const json::exception& e) {
    throw ConfigError("calibration file is not valid JSON: " + std::string(e.what()));
  }
}

std::optional<Calibration::Frozen> Calibration::threshold(int n, std::optional<double> s, const CVector& a, int D,
                                                          std::string_view name) const {
  if (!raw_.contains("cells")) return std::nullopt;
  for (const auto& cell : raw_.at("cells")) {
    if (cell.at("n").get<int>() != n) continue;
    const bool cell_has_s = cell.contains("s") && !cell.at("s").is_null();
    if (cell_has_s != s.has_value()) continue;
    if (s && std::abs(cell.at("s").get<double>() - *s) > 1e-12) continue;
    const CVector ca = vector_from_json(cell.at("a"));
    if (ca.size() != a.size() || (ca - a).cwiseAbs().maxCoeff() > 1e-12) continue;
    const auto degrees = cell.at("degrees").get<std::vector<int>>();
    const auto it = std::find(degrees.begin(), degrees.end(), D);
    if (it == degrees.end()) continue;
    const json& res = cell.at("residuals");
    if (!res.contains(std::string(name))) continue;
    const auto thresholds = res.at(std::string(name)).at("thresholds").get<std::vector<double>>();
    return Frozen{thresholds.at(static_cast<std::size_t>(it - degrees.begin())), cell.at("probe_degree").get<int>()};
  }
  return std::nullopt;
}

// -------------------------------------------------------------- symcheck --

namespace {

struct CellOutput {
  std::vector<ReportRow> rows;
  json certificates = json::array();
  std::vector<ConvergencePoint> points;
  json calibration_cell;
};

ReportRow error_row(std::string command, std::string space, std::string symbol, int D, std::size_t N,
                    const std::string& message) {
  ReportRow r;
  r.command = std::move(command);
  r.space = std::move(space);
  r.symbol = std::move(symbol);
  r.degree = D;
  r.basis_size = N;
  r.residual = "error";
  r.exactness = "exact";
  r.status = Status::Error;
  r.message = message;
  return r;
}

RunResult collect(std::vector<CellOutput> cells) {
  RunResult result;
  for (auto& c : cells) {
    for (auto& r : c.rows) result.rows.push_back(std::move(r));
    for (auto& cert : c.certificates) result.certificates.push_back(std::move(cert));
    for (auto& p : c.points) result.convergence.push_back(std::move(p));
  }
  result.exit_code = aggregate_exit(result.rows);
  return result;
}

}  // namespace

RunResult cmd_symcheck(const ExperimentConfig& cfg, const RunOptions& opts) {
  struct Job {
    const SpaceCell* space;
    int D;
    const SymbolCell* symbol;
  };
  std::vector<Job> jobs;
  for (const auto& sp : cfg.spaces) {
    for (int D : sp.degrees) {
      for (const auto& sym : cfg.symbols) {
        if (sym.kind == "mobius" && sym.dim() == sp.n) jobs.push_back({&sp, D, &sym});
      }
    }
  }
  if (jobs.empty()) throw ConfigError("symcheck: no (space, mobius symbol) pair with matching dimension");
  const auto calibration = maybe_calibration(cfg);
  const Thresholds& t = cfg.thresholds;

  auto outputs = parallel_map(jobs.size(), opts.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    CellOutput out;
    const auto start = std::chrono::steady_clock::now();
    const std::string space_label = job.space->label();
    const std::string sym_label = symbol_label(*job.symbol);
    const bool exploratory = job.symbol->a.norm() > t.exploratory_a_norm;
    SpaceSpec space = job.space->at_degree(job.D);
    try {
      CertifyOptions co;
      co.isometry_tol = t.isometry;
      co.symmetry_tol = t.symmetry;
      co.involution_tol = t.involution;
      std::string reference = "uncalibrated";
      bool calibrated = false;
      if (calibration) {
        if (auto frozen = calibration->threshold(job.space->n, job.space->s, job.symbol->a, job.D, "ja_involution")) {
          co.involution_tol = frozen->threshold;
          co.probe_degree = frozen->probe_degree;
          reference = calibration->reference();
          calibrated = true;
        }
      }
      ConjugationCertificate cert = certify(space, job.symbol->a, co);
      cert.calibration_reference = reference;
      const double ms = elapsed_ms(start);
      for (const auto& r : cert.residuals) {
        ReportRow row{.command = "symcheck",
                      .space = space_label,
                      .symbol = sym_label,
                      .degree = job.D,
                      .basis_size = space.size(),
                      .residual = r.name,
                      .value = r.value,
                      .exactness = std::string(to_string(r.exactness)),
                      .threshold = r.threshold,
                      .status = r.pass() ? Status::Pass : Status::Fail,
                      .exploratory = exploratory,
                      .message = exploratory ? "exploratory: |a| above calibrated range" : "",
                      .wall_ms = ms};
        // Convergent rows only count toward the exit code against a frozen threshold.
        if (!exploratory && r.exactness == Exactness::Convergent && !calibrated) {
          row.exploratory = true;
          row.message = "uncalibrated: convergent threshold not frozen";
        }
        out.rows.push_back(std::move(row));
      }
      json cj = certificate_to_json(cert);
      cj["exploratory"] = exploratory;
      cj["wall_ms"] = ms;
      out.certificates.push_back(std::move(cj));
    } catch (const Error& e) {
      auto row = error_row("symcheck", space_label, sym_label, job.D, space.size(), e.what());
      row.exploratory = exploratory;
      out.rows.push_back(std::move(row));
    }
    return out;
  });
  return collect(std::move(outputs));
}

// ------------------------------------------------------------- normality --

RunResult cmd_normality(const ExperimentConfig& cfg, const RunOptions& opts) {
  struct Job {
    const SpaceCell* space;
    int D;
    const SymbolCell* symbol;
  };
  std::vector<Job> jobs;
  for (const auto& sp : cfg.spaces) {
    for (int D : sp.degrees) {
      for (const auto& sym : cfg.symbols) {
        if (sym.dim() == sp.n) jobs.push_back({&sp, D, &sym});
      }
    }
  }
  if (jobs.empty()) throw ConfigError("normality: no (space, symbol) pair with matching dimension");
  const Thresholds& t = cfg.thresholds;

  auto outputs = parallel_map(jobs.size(), opts.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    CellOutput out;
    const auto start = std::chrono::steady_clock::now();
    const SpaceSpec space = job.space->at_degree(job.D);
    const std::string sym_label = symbol_label(*job.symbol);
    try {
      const LinearFractionalMap psi = job.symbol->map();
      const bool linear = psi.is_linear(0.0);
      bool predicted_normal = false;
      if (linear) {
        const CMatrix& V = psi.A();
        predicted_normal = spectral_norm(V * V.adjoint() - V.adjoint() * V) < t.normal_tol;
      }
      const double r = normality_residual(composition_matrix(space, psi));
      ReportRow row{.command = "normality",
                    .space = job.space->label(),
                    .symbol = sym_label,
                    .degree = job.D,
                    .basis_size = space.size(),
                    .exactness = linear ? "exact" : "convergent",
                    .wall_ms = elapsed_ms(start)};
      if (predicted_normal) {
        row.residual = "normality";
        row.value = r;
        row.threshold = t.normal_tol;
        row.message = "predicted normal";
      } else {
        // Pass requires the residual to clear the non-normality floor.
        row.residual = "nonnormality_shortfall";
        row.value = std::max(0.0, t.nonnormal_floor - r);
        row.threshold = 0.0;
        row.message = "predicted non-normal; normality residual " + fmt_double(r);
      }
      row.status = row.value <= row.threshold ? Status::Pass : Status::Fail;
      out.rows.push_back(std::move(row));
    } catch (const Error& e) {
      out.rows.push_back(error_row("normality", job.space->label(), sym_label, job.D, space.size(), e.what()));
    }
    return out;
  });
  return collect(std::move(outputs));
}

// ---------------------------------------------------------------- takagi --

RunResult cmd_takagi(const ExperimentConfig& cfg, const RunOptions& opts) {
  struct Job {
    const SpaceCell* space;
    int D;
    const TakagiCell* cell;
    std::size_t cell_index;
  };
  std::vector<Job> jobs;
  for (const auto& sp : cfg.spaces) {
    for (int D : sp.degrees) {
      for (std::size_t k = 0; k < cfg.takagi.size(); ++k) {
        if (cfg.takagi[k].n == sp.n) jobs.push_back({&sp, D, &cfg.takagi[k], k});
      }
    }
  }
  if (jobs.empty()) throw ConfigError("takagi: no (space, takagi cell) pair with matching dimension");
  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  const Thresholds& t = cfg.thresholds;

  auto outputs = parallel_map(jobs.size(), opts.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    CellOutput out;
    const auto start = std::chrono::steady_clock::now();
    const SpaceSpec space = job.space->at_degree(job.D);
    try {
      CMatrix V = job.cell->V;
      CMatrix K = job.cell->K;
      if (job.cell->mode == "construct") {
        // Seeded per takagi cell so every space sees the same V.
        auto rng = cell_rng(seed, job.cell_index);
        const int n = job.cell->n;
        CMatrix S(n, n);
        if (n == 2) {
          S << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 0.0;
          S *= 0.5;
        } else {
          std::normal_distribution<double> g;
          for (int r = 0; r < n; ++r) {
            for (int c = r; c < n; ++c) S(r, c) = S(c, r) = Complex(g(rng), g(rng));
          }
          S *= 0.8 / spectral_norm(S);
        }
        const CMatrix U0 = random_unitary(n, rng);
        V = U0 * S * U0.adjoint();
        K = U0 * U0.transpose();
      } else if (job.cell->mode == "search") {
        K = find_conjugation_2x2(V);
      }
      PipelineOptions po;
      po.residual_tol = t.takagi_residual;
      ConjugationCertificate cert = jv_pipeline(space, V, K, po);
      cert.calibration_reference = "exact";
      const double ms = elapsed_ms(start);
      for (const auto& r : cert.residuals) {
        out.rows.push_back(ReportRow{.command = "takagi",
                                     .space = job.space->label(),
                                     .symbol = job.cell->label,
                                     .degree = job.D,
                                     .basis_size = space.size(),
                                     .residual = r.name,
                                     .value = r.value,
                                     .exactness = std::string(to_string(r.exactness)),
                                     .threshold = r.threshold,
                                     .status = r.pass() ? Status::Pass : Status::Fail,
                                     .wall_ms = ms});
      }
      json cj = certificate_to_json(cert);
      cj["label"] = job.cell->label;
      cj["wall_ms"] = ms;
      out.certificates.push_back(std::move(cj));
    } catch (const Error& e) {
      out.rows.push_back(error_row("takagi", job.space->label(), job.cell->label, job.D, space.size(), e.what()));
    }
    return out;
  });
  return collect(std::move(outputs));
}

// ----------------------------------------------------------- convergence --

const std::vector<std::string>& convergence_residuals() {
  static const std::vector<std::string> kinds{"w_involution", "w_selfadjoint", "ja_involution", "symmetry",
                                              "abs_inverse"};
  return kinds;
}

bool monotone_nonincreasing(const std::vector<double>& values, double floor) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] && values[i] > floor) return false;
  }
  return true;
}

namespace {

struct Chain {
  const Sweep* sweep;
  double s;
  CVector direction;
  double a_norm;
};

std::vector<Chain> expand_sweeps(const ExperimentConfig& cfg) {
  std::vector<Chain> chains;
  for (const auto& sw : cfg.sweeps) {
    for (double s : sw.s_values) {
      for (const auto& dir : sw.directions) {
        for (double r : sw.a_norms) chains.push_back({&sw, s, dir, r});
      }
    }
  }
  return chains;
}

std::map<std::string, double> chain_point(const SpaceSpec& space, const CVector& a, int probe) {
  CertifyOptions co;
  co.probe_degree = probe;
  const ConjugationCertificate cert = certify(space, a, co);
  return {{"w_involution", cert.diagnostics.at("w_involution_probe")},
          {"w_selfadjoint", cert.diagnostics.at("w_selfadjoint_probe")},
          {"ja_involution", cert.residual("involution").value},
          {"symmetry", cert.residual("symmetry").value},
          {"abs_inverse", cert.diagnostics.at("abs_inverse_probe")}};
}

bool exact_kind(const std::string& kind) { return kind == "symmetry"; }

}  // namespace

RunResult cmd_convergence(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto chains = expand_sweeps(cfg);
  if (chains.empty()) throw ConfigError("convergence: configuration has no sweeps");
  const auto calibration = maybe_calibration(cfg);
  const Thresholds& t = cfg.thresholds;

  auto outputs = parallel_map(chains.size(), opts.threads, [&](std::size_t i) {
    const Chain& ch = chains[i];
    CellOutput out;
    const CVector a = ch.a_norm * ch.direction;
    const std::string space_label = "n=" + std::to_string(ch.sweep->n) + ";s=" + fmt_short(ch.s);
    const std::string sym_label = "mobius" + vector_label(a);
    std::map<std::string, std::vector<double>> series;
    const auto start = std::chrono::steady_clock::now();
    try {
      for (int D : ch.sweep->degrees) {
        const SpaceSpec space = SpaceSpec::hardy_s(ch.sweep->n, ch.s, D);
        for (const auto& [kind, value] : chain_point(space, a, ch.sweep->probe_degree)) {
          series[kind].push_back(value);
          out.points.push_back({ch.sweep->n, space_label, sym_label, ch.a_norm, D, kind, value});
        }
      }
    } catch (const Error& e) {
      out.rows.push_back(error_row("convergence", space_label, sym_label, ch.sweep->degrees.back(), 0, e.what()));
      return out;
    }
    const double ms = elapsed_ms(start);
    const int dmax = ch.sweep->degrees.back();
    const std::size_t N = basis_size(ch.sweep->n, dmax);
    for (const auto& kind : convergence_residuals()) {
      const auto& values = series.at(kind);
      double threshold = exact_kind(kind) ? t.symmetry : t.involution;
      std::string reference = "uncalibrated";
      if (calibration) {
        if (auto frozen = calibration->threshold(ch.sweep->n, ch.s, a, dmax, kind)) {
          threshold = frozen->threshold;
          reference = calibration->reference();
        }
      }
      const bool monotone = monotone_nonincreasing(values, t.monotone_floor);
      ReportRow row{.command = "convergence",
                    .space = space_label,
                    .symbol = sym_label,
                    .degree = dmax,
                    .basis_size = N,
                    .residual = kind,
                    .value = values.back(),
                    .exactness = exact_kind(kind) ? "exact" : "convergent",
                    .threshold = threshold,
                    .wall_ms = ms};
      row.status = monotone && row.value <= threshold ? Status::Pass : Status::Fail;
      row.message = std::string(monotone ? "monotone" : "NOT monotone") + "; probe degree " +
                    std::to_string(ch.sweep->probe_degree) + "; " + reference;
      out.rows.push_back(std::move(row));
    }
    return out;
  });
  return collect(std::move(outputs));
}

// ------------------------------------------------------------- calibrate --

RunResult cmd_calibrate(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto chains = expand_sweeps(cfg);
  if (chains.empty()) throw ConfigError("calibrate: configuration has no sweeps");
  const Thresholds& t = cfg.thresholds;
  constexpr double kFactor = 3.0;

  auto outputs = parallel_map(chains.size(), opts.threads, [&](std::size_t i) {
    const Chain& ch = chains[i];
    CellOutput out;
    const CVector a = ch.a_norm * ch.direction;
    const int reference_degree = 2 * ch.sweep->degrees.back();
    const std::string space_label = "n=" + std::to_string(ch.sweep->n) + ";s=" + fmt_short(ch.s);
    const std::string sym_label = "mobius" + vector_label(a);
    try {
      std::map<std::string, std::vector<double>> values;
      for (int D : ch.sweep->degrees) {
        for (const auto& [k, v] : chain_point(SpaceSpec::hardy_s(ch.sweep->n, ch.s, D), a, ch.sweep->probe_degree)) {
          values[k].push_back(v);
        }
      }
      const auto ref = chain_point(SpaceSpec::hardy_s(ch.sweep->n, ch.s, reference_degree), a,
                                   ch.sweep->probe_degree);
      json residuals = json::object();
      for (const auto& kind : convergence_residuals()) {
        std::vector<double> thresholds;
        for (double v : values[kind]) thresholds.push_back(std::max(kFactor * v, t.monotone_floor));
        const double final_value = values[kind].back();
        const bool continues = ref.at(kind) <= final_value || ref.at(kind) <= t.monotone_floor;
        residuals[kind] = {{"values", values[kind]},
                           {"thresholds", thresholds},
                           {"reference", ref.at(kind)},
                           {"reference_confirms_decay", continues}};
        out.rows.push_back(ReportRow{.command = "calibrate",
                                     .space = space_label,
                                     .symbol = sym_label,
                                     .degree = reference_degree,
                                     .basis_size = basis_size(ch.sweep->n, reference_degree),
                                     .residual = kind,
                                     .value = ref.at(kind),
                                     .exactness = exact_kind(kind) ? "exact" : "convergent",
                                     .threshold = thresholds.back(),
                                     .status = continues ? Status::Pass : Status::Fail,
                                     .message = continues ? "reference confirms decay" : "reference above final value"});
      }
      out.calibration_cell = {{"n", ch.sweep->n},
                              {"s", ch.s},
                              {"a", vector_to_json(a)},
                              {"a_norm", ch.a_norm},
                              {"probe_degree", ch.sweep->probe_degree},
                              {"degrees", ch.sweep->degrees},
                              {"reference_degree", reference_degree},
                              {"residuals", residuals}};
    } catch (const Error& e) {
      out.rows.push_back(error_row("calibrate", space_label, sym_label, reference_degree, 0, e.what()));
    }
    return out;
  });

  json cells = json::array();
  for (const auto& o : outputs) {
    if (!o.calibration_cell.is_null()) cells.push_back(o.calibration_cell);
  }
  RunResult result = collect(std::move(outputs));
  result.calibration = {{"provenance",
                         {{"date", utc_timestamp()},
                          {"config_hash", cfg.source_hash},
                          {"reference_degree_rule", "2 * D_max of each sweep"},
                          {"threshold_rule", "max(3 * measured value at each degree, monotone_floor)"},
                          {"monotone_floor", t.monotone_floor},
                          {"norm", "spectral"},
                          {"convergent_residuals", "leading block of degree <= probe_degree"}}},
                        {"cells", cells}};
  return result;
}

// ----------------------------------------------------------------- basis --

RunResult cmd_basis(const ExperimentConfig& cfg, const RunOptions&) {
  if (cfg.spaces.empty()) throw ConfigError("basis: configuration has no spaces");
  RunResult result;
  result.basis_lines.push_back("space,D,index,degree,exponents,norm_sq,beta");
  for (const auto& sp : cfg.spaces) {
    for (int D : sp.degrees) {
      const auto start = std::chrono::steady_clock::now();
      const SpaceSpec space = sp.at_degree(D);
      const Basis& basis = space.basis();
      // beta_m must not depend on which monomial of degree m represents it.
      std::vector<double> lo(static_cast<std::size_t>(D) + 1, INFINITY), hi(static_cast<std::size_t>(D) + 1, 0.0);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const MultiIndex& alpha = basis[i];
        const double ratio = std::sqrt(space.norm_sq_at(i) / h2_norm_sq(alpha));
        const auto m = static_cast<std::size_t>(alpha.degree());
        lo[m] = std::min(lo[m], ratio);
        hi[m] = std::max(hi[m], ratio);
        std::string exps;
        for (int j = 0; j < alpha.dim(); ++j) exps += (j ? ";" : "") + std::to_string(alpha[j]);
        result.basis_lines.push_back(sp.label() + "," + std::to_string(D) + "," + std::to_string(i) + "," +
                                     std::to_string(alpha.degree()) + ",(" + exps + ")," +
                                     fmt_double(space.norm_sq_at(i)) + "," + fmt_double(ratio));
      }
      double spread = 0.0;
      for (std::size_t m = 0; m < lo.size(); ++m) spread = std::max(spread, (hi[m] - lo[m]) / hi[m]);
      ReportRow row{.command = "basis",
                    .space = sp.label(),
                    .symbol = "-",
                    .degree = D,
                    .basis_size = space.size(),
                    .residual = "beta_representative_spread",
                    .value = spread,
                    .exactness = "exact",
                    .threshold = 1e-12,
                    .wall_ms = elapsed_ms(start)};
      row.status = spread <= 1e-12 ? Status::Pass : Status::Fail;
      result.rows.push_back(std::move(row));
    }
  }
  result.exit_code = aggregate_exit(result.rows);
  return result;
}

// ---------------------------------------------------------------- output --

std::string render_csv(const std::vector<ReportRow>& rows, std::string_view command) {
  std::ostringstream os;
  os << "# ballop " << command << " generated " << utc_timestamp() << "\n";
  os << "# norm=spectral; convergent residuals are measured on the leading block of degree <= probe degree\n";
  os << "command,space,symbol,D,N,residual,value,exactness,threshold,status,exploratory,message\n";
  for (const auto& r : rows) {
    os << r.command << ',' << csv_field(r.space) << ',' << csv_field(r.symbol) << ',' << r.degree << ','
       << r.basis_size << ',' << r.residual << ',' << fmt_double(r.value) << ',' << r.exactness << ','
       << fmt_double(r.threshold) << ',' << to_string(r.status) << ',' << (r.exploratory ? "yes" : "no") << ','
       << csv_field(r.message) << '\n';
  }
  return os.str();
}

std::string render_convergence_csv(const std::vector<ConvergencePoint>& points) {
  std::ostringstream os;
  os << "n,s,a_norm,D,residual_name,value,symbol\n";
  for (const auto& p : points) {
    const auto spos = p.space.find("s=");
    const std::string s = spos == std::string::npos ? "" : p.space.substr(spos + 2);
    os << p.n << ',' << s << ',' << fmt_short(p.a_norm) << ',' << p.degree << ',' << p.residual << ','
       << fmt_double(p.value) << ',' << csv_field(p.symbol) << '\n';
  }
  return os.str();
}

void write_outputs(const RunResult& result, std::string_view command, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << body;
  };
  write("report.csv", render_csv(result.rows, command));
  if (!result.certificates.empty()) write("certificates.json", result.certificates.dump(2) + "\n");
  if (!result.convergence.empty()) write("convergence.csv", render_convergence_csv(result.convergence));
  if (!result.calibration.is_null()) write("calibration.json", result.calibration.dump(2) + "\n");
  if (!result.basis_lines.empty()) {
    std::string body;
    for (const auto& l : result.basis_lines) body += l + "\n";
    write("basis.csv", body);
  }
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("BALLOP_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace ballop::experiment
