#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ballop/symmetry.hpp"

namespace ballop::experiment {

/// Raised for malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kAllPass = 0, kCellFailed = 1, kConfigError = 2, kNumericalError = 3 };

struct SpaceCell {
  int n = 1;
  std::optional<double> s;
  std::vector<double> beta;
  std::vector<int> degrees;

  SpaceSpec at_degree(int D) const;
  std::string label() const;
};

struct SymbolCell {
  std::string kind;  // mobius | linear | lfm
  std::string label;
  CVector a;
  CMatrix V;
  CMatrix A;
  CVector B;
  CVector C;
  Complex d = 1.0;

  int dim() const;
  LinearFractionalMap map() const;
};

struct TakagiCell {
  std::string label;
  std::string mode;  // explicit | construct | search
  CMatrix V;
  CMatrix K;
  int n = 2;
};

struct Sweep {
  int n = 1;
  std::vector<double> s_values;
  std::vector<double> a_norms;
  std::vector<int> degrees;
  std::vector<CVector> directions;  // normalized on parse
  int probe_degree = 1;
};

struct Thresholds {
  double isometry = 1e-11;
  double involution = 1e-8;
  double symmetry = 1e-11;
  double normal_tol = 1e-10;
  double nonnormal_floor = 1e-4;
  double takagi_residual = 1e-9;
  double exploratory_a_norm = 0.6;
  double monotone_floor = 1e-12;
};

struct ExperimentConfig {
  std::vector<SpaceCell> spaces;
  std::vector<SymbolCell> symbols;
  std::vector<TakagiCell> takagi;
  std::vector<Sweep> sweeps;
  Thresholds thresholds;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "ballop_out";
  std::optional<std::filesystem::path> calibration_path;
  std::string source_hash;
};

/// Parses the JSON configuration. Relative calibration paths resolve against
/// `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the given bytes, rendered as 16 hex digits.
std::string content_hash(std::string_view bytes);

enum class Status { Pass, Fail, Error };
std::string_view to_string(Status s);

struct ReportRow {
  std::string command;
  std::string space;
  std::string symbol;
  int degree = 0;
  std::size_t basis_size = 0;
  std::string residual;
  double value = 0.0;
  std::string exactness;
  double threshold = 0.0;
  Status status = Status::Pass;
  bool exploratory = false;
  std::string message;
  double wall_ms = 0.0;
};

struct ConvergencePoint {
  int n = 1;
  std::string space;
  std::string symbol;
  double a_norm = 0.0;
  int degree = 0;
  std::string residual;
  double value = 0.0;
};

struct RunResult {
  std::vector<ReportRow> rows;
  nlohmann::json certificates = nlohmann::json::array();
  std::vector<ConvergencePoint> convergence;
  nlohmann::json calibration;  // set by calibrate
  std::vector<std::string> basis_lines;
  int exit_code = kAllPass;
};

struct RunOptions {
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;  // overrides config seed
};

/// Frozen per-degree thresholds read from a calibration file.
class Calibration {
 public:
  static Calibration load(const std::filesystem::path& path);
  static Calibration from_json(const nlohmann::json& j, std::string reference);

  struct Frozen {
    double threshold = 0.0;
    int probe_degree = 1;
  };

  /// Threshold for residual `name` of the cell (n, s, a) at degree D, if frozen.
  std::optional<Frozen> threshold(int n, std::optional<double> s, const CVector& a, int D,
                                  std::string_view name) const;
  const std::string& reference() const { return reference_; }
  const nlohmann::json& raw() const { return raw_; }

 private:
  nlohmann::json raw_;
  std::string reference_;
};

RunResult cmd_symcheck(const ExperimentConfig& cfg, const RunOptions& opts = {});
RunResult cmd_normality(const ExperimentConfig& cfg, const RunOptions& opts = {});
RunResult cmd_takagi(const ExperimentConfig& cfg, const RunOptions& opts = {});
RunResult cmd_convergence(const ExperimentConfig& cfg, const RunOptions& opts = {});
RunResult cmd_basis(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Runs every sweep at its degrees plus the reference degree 2 * D_max and
/// freezes thresholds max(3 * value, monotone_floor) per degree.
RunResult cmd_calibrate(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// The convergent residual kinds recorded by sweeps.
const std::vector<std::string>& convergence_residuals();

/// Nonincreasing across the sweep, where values at or below `floor` count as
/// converged regardless of rounding jitter.
bool monotone_nonincreasing(const std::vector<double>& values, double floor);

std::string render_csv(const std::vector<ReportRow>& rows, std::string_view command);
std::string render_convergence_csv(const std::vector<ConvergencePoint>& points);

/// Writes report.csv and whichever of certificates.json, convergence.csv,
/// calibration.json and basis.csv the result carries.
void write_outputs(const RunResult& result, std::string_view command, const std::filesystem::path& dir);

/// --threads, then BALLOP_THREADS, then 1.
unsigned resolve_threads(std::optional<unsigned> flag);

}  // namespace ballop::experiment
