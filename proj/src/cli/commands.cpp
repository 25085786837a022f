#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "hsvar/cli.hpp"
#include "hsvar/errors.hpp"
#include "hsvar/gibbs.hpp"
#include "hsvar/sddr.hpp"
#include "hsvar/simulate.hpp"
#include "hsvar/structural.hpp"
#include "hsvar/theory.hpp"

namespace hsvar::cli {
namespace {

using io::fs::path;
using io::json;

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw InputError(what + " must be a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw InputError(what + ": row " + std::to_string(r + 1) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw InputError(what + ": entry (" + std::to_string(r + 1) + ", " +
                         std::to_string(c + 1) + ") is not a number");
      }
      M(r, c) = j[r][c].get<double>();
    }
  }
  return M;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json j = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    j.push_back(row);
  }
  return j;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) {
    throw InputError(what + " must be an array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw InputError(what + ": entry " + std::to_string(i + 1) + " is not a number");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

sim::DgpSpec spec_from_json(const json& j) {
  auto need = [&](const char* k) -> const json& {
    if (!j.contains(k)) throw InputError(std::string("missing spec key: ") + k);
    return j[k];
  };
  sim::DgpSpec s;
  s.B0 = matrix_from_json(need("B0"), "B0");
  s.A = matrix_from_json(need("A"), "A");
  s.omega = vector_from_json(need("omega"), "omega");
  s.rho = vector_from_json(need("rho"), "rho");
  s.T = j.value("T", 300);
  s.p = j.value("p", 1);
  s.constant = j.value("constant", true);
  s.seed = j.value("seed", std::uint64_t{1});
  return s;
}

// ---------------------------------------------------------------------------

struct SimulateOpts {
  std::string preset = "heteroskedastic";
  std::string spec_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> T;
  bool allow_unstable = false;
  std::string out;
  std::string truth;
};

int cmd_simulate(const SimulateOpts& o, std::ostream& out) {
  sim::DgpSpec spec = o.spec_file.empty() ? sim::preset(o.preset)
                                          : spec_from_json(json::parse(io::read_text(o.spec_file)));
  if (o.seed) spec.seed = *o.seed;
  if (o.T) spec.T = *o.T;
  spec.allow_unstable = o.allow_unstable;
  const sim::SimulationResult r = sim::generate(spec);
  io::write_data_csv(o.out, r.data);
  json truth;
  truth["B0"] = matrix_to_json(spec.B0);
  truth["A"] = matrix_to_json(spec.A);
  truth["omega"] = to_std(spec.omega);
  truth["rho"] = to_std(spec.rho);
  truth["T"] = spec.T;
  truth["p"] = spec.p;
  truth["constant"] = spec.constant;
  truth["seed"] = spec.seed;
  truth["presample_rows"] = spec.p;
  truth["h"] = matrix_to_json(r.h.transpose());
  truth["w"] = matrix_to_json(r.w.transpose());
  const path truth_path = o.truth.empty() ? path(o.out).replace_extension(".truth.json") : path(o.truth);
  io::write_text(truth_path, truth.dump(2) + "\n");
  out << "wrote " << o.out << " and " << truth_path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EstimateOpts {
  std::string config;
  std::optional<int> chains;
  std::optional<std::uint64_t> seed;
  bool store_h = false;
  std::string out_dir;
};

int cmd_estimate(const EstimateOpts& o, std::ostream& out) {
  json doc;
  try {
    doc = json::parse(io::read_text(o.config));
  } catch (const json::parse_error& e) {
    throw InputError(o.config + ": invalid JSON: " + e.what());
  }
  if (o.chains) doc["gibbs"]["chains"] = *o.chains;
  if (o.seed) doc["gibbs"]["seed"] = *o.seed;
  if (o.store_h) doc["gibbs"]["store_h"] = true;
  if (!o.out_dir.empty()) doc["outputs"]["dir"] = io::fs::absolute(o.out_dir).string();
  const io::RunConfig rc = io::parse_config(doc, io::fs::absolute(o.config).parent_path());
  const EstimateOutputs res = estimate(rc);
  for (std::size_t k = 0; k < res.artifacts.size(); ++k) {
    out << "chain " << k << ": " << res.artifacts[k].string() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyOpts {
  std::vector<std::string> artifacts;
  std::string out;
  int batches = 30;
  bool verbose = false;
};

int cmd_verify(const VerifyOpts& o, std::ostream& out, std::ostream& err) {
  std::optional<io::ArtifactHeader> header;
  std::vector<std::vector<OmegaMoments>> moments;
  for (const auto& a : o.artifacts) {
    const io::Artifact art = io::read_artifact(a);
    if (!header) {
      header = art.header;
    } else if (art.header.N != header->N) {
      throw InputError(a + ": artifacts disagree on the number of equations");
    }
    const auto m = io::read_moments(io::moments_path_for(a));
    if (m.size() != art.header.n_draws) {
      throw InputError(io::moments_path_for(a).string() + ": " + std::to_string(m.size()) +
                       " draws, artifact has " + std::to_string(art.header.n_draws));
    }
    moments.insert(moments.end(), m.begin(), m.end());
  }
  // Fails early with VerificationInfeasible when the prior ordinate is unbounded.
  prior_ordinate_at_zero(header->priors);
  std::ostringstream csv;
  csv << "equation,log_sddr,nse,category\n";
  for (int n = 0; n < header->N; ++n) {
    std::vector<OmegaMoments> eq;
    eq.reserve(moments.size());
    for (const auto& d : moments) {
      if (static_cast<int>(d.size()) != header->N) {
        throw InputError("moment file has the wrong number of equations");
      }
      eq.push_back(d[static_cast<std::size_t>(n)]);
    }
    const SddrResult r = compute_sddr(eq, header->priors, o.batches);
    csv << n + 1 << "," << io::format_double(r.log_sddr) << "," << io::format_double(r.nse) << ","
        << evidence_category(r.log_sddr) << "\n";
    if (o.verbose) {
      err << "equation " << n + 1 << ": log_numerator=" << r.log_numerator
          << " log_denominator=" << r.log_denominator << " batch_sd=" << r.batch_sd
          << " draws=" << r.n_draws << " batches=" << r.n_subsamples << "\n";
    }
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    io::write_text(o.out, csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct IrfOpts {
  std::string artifact;
  int horizon = 20;
  std::vector<double> quantiles{0.05, 0.16, 0.5, 0.84, 0.95};
  std::vector<double> scale;
  std::string out;
};

std::string quantile_label(double q) {
  std::ostringstream os;
  os << "q" << q;
  return os.str();
}

int cmd_irf(const IrfOpts& o, std::ostream& out) {
  const io::Artifact art = io::read_artifact(o.artifact);
  if (art.sample.draws.empty()) {
    throw InputError(o.artifact + ": no draws");
  }
  std::optional<ImpactScaling> scaling;
  if (!o.scale.empty()) {
    if (o.scale.size() != 3) {
      throw InputError("--scale expects shock,variable,value");
    }
    scaling = ImpactScaling{static_cast<int>(o.scale[0]) - 1, static_cast<int>(o.scale[1]) - 1,
                            o.scale[2]};
  }
  for (double q : o.quantiles) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw InputError("quantiles must lie in [0, 1]");
    }
  }
  const int N = art.header.N;
  const int H = o.horizon;
  const std::size_t S = art.sample.draws.size();
  // values[((h * N + i) * N + j) * S + s]
  std::vector<double> values(static_cast<std::size_t>(H + 1) * N * N * S);
  for (std::size_t s = 0; s < S; ++s) {
    const IrfResult r = compute_irf(art.sample.draws[s], art.header.p, H, scaling);
    for (int h = 0; h <= H; ++h)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          values[((static_cast<std::size_t>(h) * N + i) * N + j) * S + s] = r.theta[h](i, j);
  }
  std::ostringstream csv;
  csv << "horizon,variable,shock";
  for (double q : o.quantiles) csv << "," << quantile_label(q);
  csv << "\n";
  for (int h = 0; h <= H; ++h) {
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        const auto begin = values.begin() + static_cast<std::ptrdiff_t>(
                                                ((static_cast<std::size_t>(h) * N + i) * N + j) * S);
        const std::vector<double> v(begin, begin + static_cast<std::ptrdiff_t>(S));
        csv << h << "," << io::csv_field(art.header.names[i]) << "," << j + 1;
        for (double q : o.quantiles) csv << "," << io::format_double(quantile(v, q));
        csv << "\n";
      }
    }
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    io::write_text(o.out, csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct NormalizeOpts {
  std::string artifact;
  std::string out;
  std::string benchmark;
  bool from_mode = false;
  bool first = false;
  std::string omega_hat;
};

int cmd_normalize(const NormalizeOpts& o, std::ostream& out) {
  const int modes = (!o.benchmark.empty()) + o.from_mode + o.first;
  if (modes != 1) {
    throw InputError("choose exactly one of --benchmark, --from-mode, --first");
  }
  io::Artifact art = io::read_artifact(o.artifact);
  if (art.sample.draws.empty()) {
    throw InputError(o.artifact + ": no draws");
  }
  art.sample.sddr_moments = io::read_moments(io::moments_path_for(o.artifact));
  if (art.sample.sddr_moments.size() != art.sample.draws.size()) {
    throw InputError("moment file does not match the artifact");
  }
  NormalizationBenchmark bench;
  if (!o.benchmark.empty()) {
    bench.B0_hat = io::read_matrix_csv(o.benchmark);
  } else if (o.first) {
    bench.B0_hat = art.sample.draws.front().B0;
  } else {
    if (!art.header.store_h) {
      throw InputError("--from-mode needs h paths; estimate with --store-h");
    }
    bench = benchmark_from_mode(art.sample, io::context_for(art.header));
  }
  if (!o.omega_hat.empty()) {
    bench.Omega_hat = io::read_matrix_csv(o.omega_hat);
  }
  const PosteriorSample ns = normalize_sample(art.sample, bench);
  io::Artifact res{art.header, ns};
  json norm;
  norm["B0_hat"] = matrix_to_json(bench.B0_hat);
  if (bench.Omega_hat.size() > 0) {
    norm["Omega_hat"] = matrix_to_json(bench.Omega_hat);
  }
  res.header.normalization = norm;
  io::write_artifact(o.out, res);
  io::write_moments(io::moments_path_for(o.out), ns.sddr_moments);
  out << "wrote " << o.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct IdentOpts {
  std::string input;
  std::uint64_t seed = 1;
  bool verbose = false;
};

int cmd_check_identification(const IdentOpts& o, std::ostream& out) {
  const json doc = json::parse(io::read_text(o.input));
  if (!doc.contains("sigmas") || !doc["sigmas"].is_array() || doc["sigmas"].empty()) {
    throw InputError("missing key: sigmas (array of covariance matrices)");
  }
  std::vector<Eigen::MatrixXd> sigmas;
  for (std::size_t t = 0; t < doc["sigmas"].size(); ++t) {
    sigmas.push_back(matrix_from_json(doc["sigmas"][t], "sigmas[" + std::to_string(t) + "]"));
  }
  Rng rng(o.seed);
  theory::RecoveredStructure rec;
  if (doc.contains("lambdas")) {
    std::vector<Eigen::VectorXd> per_eq;
    for (std::size_t n = 0; n < doc["lambdas"].size(); ++n) {
      per_eq.push_back(vector_from_json(doc["lambdas"][n], "lambdas[" + std::to_string(n) + "]"));
    }
    rec = theory::recover_structure(sigmas, theory::VarianceSequence::from_equations(per_eq), rng);
  } else {
    rec = theory::recover_structure(sigmas, rng);
  }
  for (std::size_t n = 0; n < rec.identified.size(); ++n) {
    out << "column " << n + 1 << ": " << (rec.identified[n] ? "identified" : "not identified");
    if (o.verbose) {
      out << " [";
      for (Eigen::Index i = 0; i < rec.B.rows(); ++i) {
        out << (i ? ", " : "") << rec.B(i, static_cast<Eigen::Index>(n));
      }
      out << "]";
    }
    out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct VolatilityOpts {
  std::string artifact;
  double level = 0.9;
  std::string out;
};

int cmd_volatility(const VolatilityOpts& o, std::ostream& out) {
  const io::Artifact art = io::read_artifact(o.artifact);
  if (!art.header.store_h) {
    throw InputError(o.artifact + ": variance paths need h; estimate with --store-h");
  }
  const VariancePaths vp = conditional_variance_paths(art.sample, o.level);
  std::ostringstream csv;
  csv << "period,equation,mean,lower,upper\n";
  for (Eigen::Index t = 0; t < vp.mean.rows(); ++t) {
    for (Eigen::Index n = 0; n < vp.mean.cols(); ++n) {
      csv << t << "," << n + 1 << "," << io::format_double(vp.mean(t, n)) << ","
          << io::format_double(vp.lower(t, n)) << "," << io::format_double(vp.upper(t, n)) << "\n";
    }
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    io::write_text(o.out, csv.str());
  }
  return 0;
}

}  // namespace

double quantile(std::vector<double> x, double q) {
  if (x.empty()) {
    throw DomainError("quantile of an empty set");
  }
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

EstimateOutputs estimate(const io::RunConfig& rc) {
  const TimeSeriesData data = io::load_data(rc);
  const ModelConfig model = io::resolved_model(rc, data);
  validate_data(data, model);
  const std::string serialized = rc.document.dump();
  const std::string digest = io::sha256_hex(serialized);
  const auto K = static_cast<int>(data.N() * model.p + data.d());
  const auto T = static_cast<int>(data.T()) - model.p;

  EstimateOutputs outs;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(rc.chains));
  std::vector<std::thread> threads;
  for (int k = 0; k < rc.chains; ++k) {
    const std::string stem = "posterior_chain" + std::to_string(k);
    outs.artifacts.push_back(rc.output_dir / (stem + ".hsv"));
    outs.moments.push_back(io::moments_path_for(outs.artifacts.back()));
    outs.manifests.push_back(rc.output_dir / ("manifest_chain" + std::to_string(k) + ".json"));
  }
  for (int k = 0; k < rc.chains; ++k) {
    threads.emplace_back([&, k] {
      try {
        const std::string started = io::utc_timestamp();
        GibbsConfig g = rc.gibbs;
        g.seed = rc.gibbs.seed + static_cast<std::uint64_t>(k);
        g.chain = k;
        const PosteriorSample sample = run_chain(data, model, rc.priors, g);
        io::Artifact art;
        art.sample = sample;
        art.header.N = static_cast<int>(data.N());
        art.header.K = K;
        art.header.T = T;
        art.header.p = model.p;
        art.header.store_h = g.store_h;
        art.header.n_draws = sample.draws.size();
        art.header.priors = rc.priors;
        art.header.meta = sample.meta;
        art.header.names = data.names;
        art.header.deterministic_names = data.deterministic_names;
        art.header.stationary_flags = model.stationary_flags.empty()
                                          ? std::vector<bool>(static_cast<std::size_t>(data.N()), false)
                                          : model.stationary_flags;
        art.header.data_path = io::fs::absolute(rc.data_path).string();
        art.header.config = rc.document;
        const auto idx = static_cast<std::size_t>(k);
        io::write_artifact(outs.artifacts[idx], art);
        io::write_moments(outs.moments[idx], sample.sddr_moments);
        json m;
        m["config_sha256"] = digest;
        m["config"] = serialized;
        m["base_seed"] = rc.gibbs.seed;
        m["seed"] = g.seed;
        m["seed_derivation"] = "base seed + chain index";
        m["chain"] = k;
        m["chains"] = rc.chains;
        m["started"] = started;
        m["finished"] = io::utc_timestamp();
        m["artifact"] = outs.artifacts[idx].string();
        m["moments"] = outs.moments[idx].string();
        io::write_text(outs.manifests[idx], m.dump(2) + "\n");
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outs;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian SVAR with stochastic volatility: estimation and identification checks"};
  app.name("hsvar");
  app.require_subcommand(1);

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "Generate data from a known DGP");
  sim->add_option("--preset", so.preset, "heteroskedastic or homoskedastic");
  sim->add_option("--spec", so.spec_file, "JSON DGP spec (B0, A, omega, rho, T, p, constant, seed)");
  sim->add_option("--seed", so.seed);
  sim->add_option("--T", so.T, "Sample length");
  sim->add_flag("--allow-unstable", so.allow_unstable);
  sim->add_option("--out", so.out, "Data CSV")->required();
  sim->add_option("--truth", so.truth, "Ground-truth JSON (default: <out>.truth.json)");

  EstimateOpts eo;
  auto* est = app.add_subcommand("estimate", "Run the Gibbs sampler");
  est->add_option("--config", eo.config, "JSON configuration")->required();
  est->add_option("--chains", eo.chains);
  est->add_option("--seed", eo.seed);
  est->add_flag("--store-h", eo.store_h, "Keep h paths in the artifact");
  est->add_option("--out-dir", eo.out_dir);

  VerifyOpts vo;
  auto* ver = app.add_subcommand("verify", "Savage-Dickey test of homoskedasticity per shock");
  ver->add_option("--artifact", vo.artifacts, "Posterior artifact(s)")->required();
  ver->add_option("--out", vo.out, "CSV output (default stdout)");
  ver->add_option("--batches", vo.batches, "Batches for the numerical standard error");
  ver->add_flag("--verbose", vo.verbose);

  IrfOpts io_;
  auto* irf = app.add_subcommand("irf", "Posterior quantiles of impulse responses");
  irf->add_option("--artifact", io_.artifact)->required();
  irf->add_option("--horizon", io_.horizon)->check(CLI::NonNegativeNumber);
  irf->add_option("--quantiles", io_.quantiles)->delimiter(',');
  irf->add_option("--scale", io_.scale, "shock,variable,value (1-based)")->delimiter(',');
  irf->add_option("--out", io_.out);

  NormalizeOpts no;
  auto* nor = app.add_subcommand("normalize", "Row sign/order normalization of every draw");
  nor->add_option("--artifact", no.artifact)->required();
  nor->add_option("--out", no.out)->required();
  nor->add_option("--benchmark", no.benchmark, "CSV with the benchmark B0");
  nor->add_flag("--from-mode", no.from_mode, "Use the draw with the highest posterior kernel");
  nor->add_flag("--first", no.first, "Use the first draw");
  nor->add_option("--omega-hat", no.omega_hat, "CSV with the N^2 x N^2 weighting matrix");

  IdentOpts ido;
  auto* idn = app.add_subcommand("check-identification",
                                 "Which columns of B a covariance sequence pins down");
  idn->add_option("--input", ido.input, "JSON with sigmas and optional lambdas")->required();
  idn->add_option("--seed", ido.seed);
  idn->add_flag("--verbose", ido.verbose);

  VolatilityOpts vol;
  auto* vp = app.add_subcommand("volatility", "Conditional variance paths with HPD bands");
  vp->add_option("--artifact", vol.artifact)->required();
  vp->add_option("--level", vol.level);
  vp->add_option("--out", vol.out);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  try {
    if (sim->parsed()) return cmd_simulate(so, out);
    if (est->parsed()) return cmd_estimate(eo, out);
    if (ver->parsed()) return cmd_verify(vo, out, err);
    if (irf->parsed()) return cmd_irf(io_, out);
    if (nor->parsed()) return cmd_normalize(no, out);
    if (idn->parsed()) return cmd_check_identification(ido, out);
    if (vp->parsed()) return cmd_volatility(vol, out);
  } catch (const VerificationInfeasible& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace hsvar::cli
