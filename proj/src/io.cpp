#include "hsvar/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "hsvar/errors.hpp"

namespace hsvar::io {
namespace {

constexpr const char* kMagic = "HSVAR-POSTERIOR 1\n";

static_assert(std::endian::native == std::endian::little,
              "artifact IO assumes a little-endian host");

double parse_double(const std::string& s, const std::string& where) {
  if (s.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
  if (b == e) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e) {
    if (std::string(b, e) == "NA" || std::string(b, e) == "NaN" || std::string(b, e) == "nan") {
      return std::numeric_limits<double>::quiet_NaN();
    }
    throw InputError(where + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

/// Walks a dotted key path, naming the first missing component.
const json& require(const json& doc, const std::string& path) {
  const json* cur = &doc;
  std::string prefix;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    prefix += (prefix.empty() ? "" : ".") + key;
    if (!cur->is_object() || !cur->contains(key)) {
      throw InputError("missing config key: " + prefix);
    }
    cur = &(*cur)[key];
    if (dot == std::string::npos) {
      break;
    }
    start = dot + 1;
  }
  return *cur;
}

template <class T>
T get_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw InputError("config key " + path + " has the wrong type");
  }
}

template <class T>
T get_or(const json& doc, const std::string& section, const std::string& key, T fallback) {
  if (!doc.contains(section) || !doc[section].is_object() || !doc[section].contains(key)) {
    return fallback;
  }
  return get_as<T>(doc[section][key], section + "." + key);
}

void put_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  throw InputError("column '" + name + "' not found in CSV header");
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    rec.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(rec.size() == 1 && rec[0].empty())) {
      records.push_back(std::move(rec));
    }
    rec.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw InputError(source + ":" + std::to_string(line) + ": stray quote inside field");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) {
    throw InputError(source + ": unterminated quoted field");
  }
  if (field_started || !rec.empty()) {
    end_record();
  }
  if (records.empty()) {
    throw InputError(source + ": empty CSV");
  }
  CsvTable t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw InputError(source + ": row " + std::to_string(r) + " has " +
                       std::to_string(records[r].size()) + " fields, header has " +
                       std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text(path), path.string()); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw InputError("write failed for " + path.string());
  }
}

TimeSeriesData load_data(const fs::path& path, const std::vector<std::string>& variables,
                         const std::vector<std::string>& deterministic, bool constant) {
  const CsvTable t = read_csv(path);
  std::vector<std::string> vars = variables;
  if (vars.empty()) {
    for (const auto& h : t.header) {
      const bool listed =
          std::find(deterministic.begin(), deterministic.end(), h) != deterministic.end();
      if (!listed && !(constant && h == "const")) {
        vars.push_back(h);
      }
    }
  }
  TimeSeriesData d;
  const auto T = static_cast<Eigen::Index>(t.rows.size());
  d.Y.resize(T, static_cast<Eigen::Index>(vars.size()));
  d.D.resize(T, static_cast<Eigen::Index>(deterministic.size() + (constant ? 1 : 0)));
  auto fill = [&](Eigen::MatrixXd& M, Eigen::Index col, const std::string& name) {
    const std::size_t c = t.column(name);
    for (Eigen::Index r = 0; r < T; ++r) {
      const std::string where = path.string() + " row " + std::to_string(r + 1) + ", column '" +
                                name + "'";
      const double v = parse_double(t.rows[r][c], where);
      if (!std::isfinite(v)) {
        throw InputError(where + ": missing or non-finite value");
      }
      M(r, col) = v;
    }
  };
  for (std::size_t i = 0; i < vars.size(); ++i) {
    fill(d.Y, static_cast<Eigen::Index>(i), vars[i]);
  }
  for (std::size_t i = 0; i < deterministic.size(); ++i) {
    fill(d.D, static_cast<Eigen::Index>(i), deterministic[i]);
  }
  if (constant) {
    d.D.col(d.D.cols() - 1).setOnes();
  }
  d.names = vars;
  d.deterministic_names = deterministic;
  if (constant) {
    d.deterministic_names.push_back("const");
  }
  return d;
}

TimeSeriesData load_data(const RunConfig& rc) {
  return load_data(rc.data_path, rc.variables, rc.deterministic, rc.constant);
}

ModelConfig resolved_model(const RunConfig& rc, const TimeSeriesData& data) {
  ModelConfig mc = rc.model;
  if (rc.stationary_all) {
    mc.stationary_flags.assign(static_cast<std::size_t>(data.N()), *rc.stationary_all);
  }
  return mc;
}

void write_data_csv(const fs::path& path, const TimeSeriesData& data) {
  std::string out;
  std::vector<std::string> header = data.names;
  for (std::size_t i = 0; i < data.deterministic_names.size(); ++i) {
    header.push_back(data.deterministic_names[i]);
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    out += (i ? "," : "") + csv_field(header[i]);
  }
  out += "\n";
  for (Eigen::Index t = 0; t < data.Y.rows(); ++t) {
    for (Eigen::Index n = 0; n < data.Y.cols(); ++n) {
      out += (n ? "," : "") + format_double(data.Y(t, n));
    }
    for (Eigen::Index j = 0; j < data.D.cols(); ++j) {
      out += "," + format_double(data.D(t, j));
    }
    out += "\n";
  }
  write_text(path, out);
}

json priors_to_json(const PriorConfig& p) {
  json j = {{"S_omega", p.S_omega}, {"A_omega", p.A_omega},     {"nu_0", p.nu_0},
            {"nu_gamma0", p.nu_gamma0}, {"s_s0", p.s_s0},       {"nu_s0", p.nu_s0},
            {"nu_A", p.nu_A},           {"nu_gammaA", p.nu_gammaA}, {"s_sA", p.s_sA},
            {"nu_sA", p.nu_sA}};
  if (!p.omega_bar.empty()) {
    j["omega_bar"] = p.omega_bar;
  }
  return j;
}

PriorConfig priors_from_json(const json& j) {
  PriorConfig p;
  if (j.is_null()) {
    return p;
  }
  if (!j.is_object()) {
    throw InputError("config key priors must be an object");
  }
  static const char* known[] = {"S_omega", "A_omega", "nu_0",  "nu_gamma0", "s_s0",     "nu_s0",
                                "nu_A",    "nu_gammaA", "s_sA", "nu_sA",     "omega_bar"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known)) {
      throw InputError("unknown config key: priors." + it.key());
    }
  }
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) {
      dst = get_as<double>(j[key], std::string("priors.") + key);
    }
  };
  num("S_omega", p.S_omega);
  num("A_omega", p.A_omega);
  num("nu_0", p.nu_0);
  num("nu_gamma0", p.nu_gamma0);
  num("s_s0", p.s_s0);
  num("nu_s0", p.nu_s0);
  num("nu_A", p.nu_A);
  num("nu_gammaA", p.nu_gammaA);
  num("s_sA", p.s_sA);
  num("nu_sA", p.nu_sA);
  if (j.contains("omega_bar")) {
    p.omega_bar = get_as<std::vector<double>>(j["omega_bar"], "priors.omega_bar");
  }
  return p;
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) {
    throw InputError("config must be a JSON object");
  }
  RunConfig rc;
  rc.document = doc;
  const fs::path data_path = get_as<std::string>(require(doc, "data.path"), "data.path");
  rc.data_path = data_path.is_absolute() ? data_path : base_dir / data_path;
  rc.variables = get_or<std::vector<std::string>>(doc, "data", "variables", {});
  rc.deterministic = get_or<std::vector<std::string>>(doc, "data", "deterministic", {});
  rc.constant = get_or<bool>(doc, "data", "constant", true);

  rc.model.p = get_as<int>(require(doc, "model.p"), "model.p");
  if (rc.model.p < 1) {
    throw InputError("config key model.p must be at least 1");
  }
  if (doc["model"].contains("stationary")) {
    const json& s = doc["model"]["stationary"];
    if (s.is_boolean()) {
      rc.stationary_all = s.get<bool>();
    } else {
      rc.model.stationary_flags = get_as<std::vector<bool>>(s, "model.stationary");
    }
  }
  rc.priors = priors_from_json(doc.contains("priors") ? doc["priors"] : json());

  rc.gibbs.n_burn = get_as<int>(require(doc, "gibbs.n_burn"), "gibbs.n_burn");
  rc.gibbs.n_keep = get_as<int>(require(doc, "gibbs.n_keep"), "gibbs.n_keep");
  rc.gibbs.thin = get_or<int>(doc, "gibbs", "thin", 1);
  rc.gibbs.seed = get_or<std::uint64_t>(doc, "gibbs", "seed", 1);
  rc.gibbs.store_h = get_or<bool>(doc, "gibbs", "store_h", false);
  rc.chains = get_or<int>(doc, "gibbs", "chains", 1);
  if (rc.gibbs.n_burn < 0 || rc.gibbs.n_keep < 1 || rc.gibbs.thin < 1 || rc.chains < 1) {
    throw InputError("config: gibbs.n_burn >= 0, gibbs.n_keep >= 1, gibbs.thin >= 1 and "
                     "gibbs.chains >= 1 are required");
  }
  const fs::path out = get_or<std::string>(doc, "outputs", "dir", ".");
  rc.output_dir = out.is_absolute() ? out : base_dir / out;
  return rc;
}

RunConfig load_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_config(doc, fs::absolute(path).parent_path());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json ArtifactHeader::to_json() const {
  json j;
  j["dims"] = {{"N", N}, {"K", K}, {"T", T}, {"p", p}, {"n_draws", n_draws}};
  j["store_h"] = store_h;
  j["priors"] = priors_to_json(priors);
  j["meta"] = {{"seed", meta.seed}, {"chain", meta.chain}, {"n_burn", meta.n_burn},
               {"thin", meta.thin}};
  j["names"] = names;
  j["deterministic_names"] = deterministic_names;
  j["stationary"] = stationary_flags;
  j["data_path"] = data_path;
  j["config"] = config;
  if (!normalization.is_null()) {
    j["normalization"] = normalization;
  }
  j["record_layout"] = {"B0", "A", "omega", "rho", "sigma2_omega", "gamma_0", "s_0", "s_gamma0",
                        "gamma_A", "s_A", "s_gammaA", "h"};
  return j;
}

ArtifactHeader ArtifactHeader::from_json(const json& j) {
  ArtifactHeader h;
  try {
    const json& d = j.at("dims");
    h.N = d.at("N").get<int>();
    h.K = d.at("K").get<int>();
    h.T = d.at("T").get<int>();
    h.p = d.at("p").get<int>();
    h.n_draws = d.at("n_draws").get<std::uint64_t>();
    h.store_h = j.at("store_h").get<bool>();
    h.priors = priors_from_json(j.at("priors"));
    const json& m = j.at("meta");
    h.meta.seed = m.at("seed").get<std::uint64_t>();
    h.meta.chain = m.at("chain").get<int>();
    h.meta.n_burn = m.at("n_burn").get<int>();
    h.meta.thin = m.at("thin").get<int>();
    h.names = j.at("names").get<std::vector<std::string>>();
    h.deterministic_names = j.at("deterministic_names").get<std::vector<std::string>>();
    h.stationary_flags = j.at("stationary").get<std::vector<bool>>();
    h.data_path = j.at("data_path").get<std::string>();
    h.config = j.at("config");
    if (j.contains("normalization")) {
      h.normalization = j["normalization"];
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("artifact header: ") + e.what());
  }
  if (h.N < 1 || h.K < 1 || h.T < 0 || h.p < 1) {
    throw InputError("artifact header: invalid dimensions");
  }
  return h;
}

std::size_t ArtifactHeader::record_size() const {
  const auto n = static_cast<std::size_t>(N);
  const auto k = static_cast<std::size_t>(K);
  return n * n + n * k + 3 * n + 2 * n + 1 + 2 * n + 1 +
         (store_h ? n * static_cast<std::size_t>(T) : 0);
}

void write_artifact(const fs::path& path, const Artifact& a) {
  const ArtifactHeader& h = a.header;
  if (h.n_draws != a.sample.draws.size()) {
    throw InputError("artifact: header n_draws differs from the number of draws");
  }
  const std::string header = h.to_json().dump();
  std::string out = kMagic;
  put_u64(out, header.size());
  out += header;
  std::vector<double> rec;
  rec.reserve(h.record_size());
  const Eigen::Index N = h.N;
  for (std::size_t s = 0; s < a.sample.draws.size(); ++s) {
    const StructuralState& d = a.sample.draws[s];
    if (d.B0.rows() != N || d.A.rows() != N || d.A.cols() != h.K ||
        static_cast<Eigen::Index>(d.sv.size()) != N) {
      throw InputError("artifact: draw " + std::to_string(s) + " has inconsistent dimensions");
    }
    rec.clear();
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) rec.push_back(d.B0(i, j));
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < h.K; ++j) rec.push_back(d.A(i, j));
    for (const auto& e : d.sv) rec.push_back(e.omega);
    for (const auto& e : d.sv) rec.push_back(e.rho);
    for (const auto& e : d.sv) rec.push_back(e.sigma2_omega);
    for (Eigen::Index i = 0; i < N; ++i) rec.push_back(d.hyper.gamma_0(i));
    for (Eigen::Index i = 0; i < N; ++i) rec.push_back(d.hyper.s_0(i));
    rec.push_back(d.hyper.s_gamma0);
    for (Eigen::Index i = 0; i < N; ++i) rec.push_back(d.hyper.gamma_A(i));
    for (Eigen::Index i = 0; i < N; ++i) rec.push_back(d.hyper.s_A(i));
    rec.push_back(d.hyper.s_gammaA);
    if (h.store_h) {
      for (const auto& e : d.sv) {
        if (e.h.size() != h.T) {
          throw InputError("artifact: draw " + std::to_string(s) + " lacks an h path of length " +
                           std::to_string(h.T));
        }
        for (Eigen::Index t = 0; t < h.T; ++t) rec.push_back(e.h(t));
      }
    }
    out.append(reinterpret_cast<const char*>(rec.data()), rec.size() * sizeof(double));
  }
  write_text(path, out);
}

Artifact read_artifact(const fs::path& path) {
  const std::string bytes = read_text(path);
  const std::size_t magic_len = std::strlen(kMagic);
  if (bytes.size() < magic_len + 8 || bytes.compare(0, magic_len, kMagic) != 0) {
    throw InputError(path.string() + ": not a posterior artifact");
  }
  std::uint64_t hlen = 0;
  std::memcpy(&hlen, bytes.data() + magic_len, 8);
  const std::size_t body = magic_len + 8 + hlen;
  if (body > bytes.size()) {
    throw InputError(path.string() + ": truncated header");
  }
  Artifact a;
  try {
    a.header = ArtifactHeader::from_json(json::parse(bytes.substr(magic_len + 8, hlen)));
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": header is not JSON: " + e.what());
  }
  const ArtifactHeader& h = a.header;
  const std::size_t rs = h.record_size();
  if (bytes.size() - body != rs * sizeof(double) * h.n_draws) {
    throw InputError(path.string() + ": payload size does not match " + std::to_string(h.n_draws) +
                     " records");
  }
  a.sample.meta = h.meta;
  const Eigen::Index N = h.N;
  std::vector<double> rec(rs);
  for (std::uint64_t s = 0; s < h.n_draws; ++s) {
    std::memcpy(rec.data(), bytes.data() + body + s * rs * sizeof(double), rs * sizeof(double));
    std::size_t k = 0;
    StructuralState d;
    d.B0.resize(N, N);
    d.A.resize(N, h.K);
    d.sv.resize(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) d.B0(i, j) = rec[k++];
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < h.K; ++j) d.A(i, j) = rec[k++];
    for (auto& e : d.sv) e.omega = rec[k++];
    for (auto& e : d.sv) e.rho = rec[k++];
    for (auto& e : d.sv) e.sigma2_omega = rec[k++];
    d.hyper.gamma_0.resize(N);
    d.hyper.s_0.resize(N);
    d.hyper.gamma_A.resize(N);
    d.hyper.s_A.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) d.hyper.gamma_0(i) = rec[k++];
    for (Eigen::Index i = 0; i < N; ++i) d.hyper.s_0(i) = rec[k++];
    d.hyper.s_gamma0 = rec[k++];
    for (Eigen::Index i = 0; i < N; ++i) d.hyper.gamma_A(i) = rec[k++];
    for (Eigen::Index i = 0; i < N; ++i) d.hyper.s_A(i) = rec[k++];
    d.hyper.s_gammaA = rec[k++];
    if (h.store_h) {
      for (auto& e : d.sv) {
        e.h.resize(h.T);
        for (Eigen::Index t = 0; t < h.T; ++t) e.h(t) = rec[k++];
      }
    }
    a.sample.draws.push_back(std::move(d));
  }
  return a;
}

void write_moments(const fs::path& path, const std::vector<std::vector<OmegaMoments>>& m) {
  std::string out = "draw,equation,mean,var\n";
  for (std::size_t s = 0; s < m.size(); ++s) {
    for (std::size_t n = 0; n < m[s].size(); ++n) {
      out += std::to_string(s) + "," + std::to_string(n + 1) + "," + format_double(m[s][n].mean) +
             "," + format_double(m[s][n].var) + "\n";
    }
  }
  write_text(path, out);
}

std::vector<std::vector<OmegaMoments>> read_moments(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t cd = t.column("draw");
  const std::size_t ce = t.column("equation");
  const std::size_t cm = t.column("mean");
  const std::size_t cv = t.column("var");
  std::vector<std::vector<OmegaMoments>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path.string() + " row " + std::to_string(r + 1);
    const auto draw = static_cast<std::size_t>(parse_double(t.rows[r][cd], where));
    const auto eq = static_cast<std::size_t>(parse_double(t.rows[r][ce], where));
    if (draw == out.size()) {
      out.emplace_back();
    } else if (out.empty() || draw != out.size() - 1) {
      throw InputError(where + ": draws must be listed in order starting at 0");
    }
    if (eq != out.back().size() + 1) {
      throw InputError(where + ": equations must be listed in order starting at 1");
    }
    const OmegaMoments m{parse_double(t.rows[r][cm], where), parse_double(t.rows[r][cv], where)};
    if (!std::isfinite(m.mean) || !(m.var > 0.0)) {
      throw InputError(where + ": mean must be finite and var positive");
    }
    out.back().push_back(m);
  }
  return out;
}

fs::path moments_path_for(const fs::path& artifact) {
  fs::path p = artifact;
  p.replace_extension(".moments.csv");
  return p;
}

SamplerContext context_for(const ArtifactHeader& h) {
  RunConfig rc = parse_config(h.config, fs::path(h.data_path).parent_path());
  rc.data_path = h.data_path;
  const TimeSeriesData data = load_data(rc.data_path, rc.variables, rc.deterministic, rc.constant);
  ModelConfig mc;
  mc.p = h.p;
  mc.stationary_flags = h.stationary_flags;
  rc.gibbs.store_h = h.store_h;
  SamplerContext ctx = make_context(data, mc, h.priors, rc.gibbs);
  if (ctx.N() != h.N || ctx.K() != h.K || ctx.T() != h.T) {
    throw InputError("data at " + h.data_path + " no longer matches the artifact dimensions");
  }
  return ctx;
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (auto& c : line) {
      if (c == ',' || c == '\t' || c == ';' || c == '\r') c = ' ';
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      row.push_back(parse_double(tok, path.string() + " line " + std::to_string(lineno)));
    }
    if (!row.empty()) {
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw InputError(path.string() + " line " + std::to_string(lineno) +
                         ": ragged matrix row");
      }
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) {
    throw InputError(path.string() + ": empty matrix");
  }
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

}  // namespace hsvar::io
