#pragma once

// Files on disk: CSV tables, the run configuration, the binary posterior
// artifact, the omega-moment table and the run manifest.

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hsvar/gibbs.hpp"
#include "hsvar/model.hpp"

namespace hsvar::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header field; throws InputError naming the file if absent.
  std::size_t column(const std::string& name) const;
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
CsvTable parse_csv(const std::string& text, const std::string& source = "<csv>");
CsvTable read_csv(const fs::path& path);

/// Quotes a field only when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);
std::string format_double(double x);

/// Data file: header row, one column per series. Empty cells read as NaN.
TimeSeriesData load_data(const fs::path& path, const std::vector<std::string>& variables,
                         const std::vector<std::string>& deterministic, bool constant);
void write_data_csv(const fs::path& path, const TimeSeriesData& data);

struct RunConfig {
  fs::path data_path;
  std::vector<std::string> variables;
  std::vector<std::string> deterministic;
  bool constant = true;
  ModelConfig model;
  /// Set when model.stationary is a single flag for every variable.
  std::optional<bool> stationary_all;
  PriorConfig priors;
  GibbsConfig gibbs;
  int chains = 1;
  fs::path output_dir = ".";
  /// The document as read, used for the digest and the artifact header.
  json document;
};

/// Relative data and output paths resolve against base_dir.
RunConfig parse_config(const json& doc, const fs::path& base_dir);
RunConfig load_config(const fs::path& path);

TimeSeriesData load_data(const RunConfig& rc);
/// Model settings with a scalar stationary flag broadcast over the variables.
ModelConfig resolved_model(const RunConfig& rc, const TimeSeriesData& data);

json priors_to_json(const PriorConfig& p);
PriorConfig priors_from_json(const json& j);

std::string sha256_hex(const std::string& bytes);
std::string utc_timestamp();

struct ArtifactHeader {
  int N = 0;
  int K = 0;
  int T = 0;
  int p = 1;
  bool store_h = false;
  std::uint64_t n_draws = 0;
  PriorConfig priors;
  PosteriorMeta meta;
  std::vector<std::string> names;
  std::vector<std::string> deterministic_names;
  std::vector<bool> stationary_flags;
  std::string data_path;
  json config = json::object();
  /// Benchmark and weighting used by a normalization pass; null otherwise.
  json normalization = nullptr;

  json to_json() const;
  static ArtifactHeader from_json(const json& j);
  /// Doubles per draw record.
  std::size_t record_size() const;
};

struct Artifact {
  ArtifactHeader header;
  PosteriorSample sample;
};

/// Layout: the line "HSVAR-POSTERIOR 1\n", a little-endian uint64 header
/// length, the compact JSON header, then n_draws records of little-endian
/// doubles: B0 (row-major), A (row-major), omega[N], rho[N], sigma2_omega[N],
/// gamma_0[N], s_0[N], s_gamma0, gamma_A[N], s_A[N], s_gammaA and, with
/// store_h, h as N rows of T periods.
void write_artifact(const fs::path& path, const Artifact& a);
Artifact read_artifact(const fs::path& path);

/// Moments table with columns draw, equation, mean, var (1-based equation).
void write_moments(const fs::path& path, const std::vector<std::vector<OmegaMoments>>& m);
std::vector<std::vector<OmegaMoments>> read_moments(const fs::path& path);

/// Sibling moment file of an artifact: "x.hsv" -> "x.moments.csv".
fs::path moments_path_for(const fs::path& artifact);

/// Rebuilds the estimation data and sampler context an artifact came from.
SamplerContext context_for(const ArtifactHeader& h);

/// Reads a whitespace/comma separated numeric matrix from a CSV without header.
Eigen::MatrixXd read_matrix_csv(const fs::path& path);

/// Writes text, creating parent directories.
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace hsvar::io
