#ifndef ILR_TOOLS_CLI_HPP
#define ILR_TOOLS_CLI_HPP

// Command-line front end: synth, fit, eval.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ilr/ilr.hpp"

namespace ilr::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

inline bool is_json_path(const std::string& path) {
  return std::filesystem::path(path).extension() == ".json";
}

inline Dataset load_dataset(const std::string& path, const std::string& text,
                            const CsvSchema& schema) {
  if (is_json_path(path)) {
    try {
      return dataset_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("'" + path + "': " + e.what());
    }
  }
  return load_csv_string(text, schema);
}

inline std::vector<double> parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = parse_real(item);
    if (!v) throw UsageError(flag + ": cannot parse '" + item + "' as a number");
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

inline std::string provenance_header(std::uint64_t seed,
                                     const std::vector<std::pair<std::string, std::string>>& inputs) {
  std::string h = "# tool=ilr version=" ILR_VERSION " seed=" + std::to_string(seed) + "\n";
  for (const auto& [name, dig] : inputs) h += "# input " + name + "=" + dig + "\n";
  return h;
}

inline nlohmann::json provenance_json(std::uint64_t seed,
                                      const std::vector<std::pair<std::string, std::string>>& inputs) {
  nlohmann::json j;
  j["tool"] = "ilr";
  j["version"] = ILR_VERSION;
  j["seed"] = seed;
  nlohmann::json in = nlohmann::json::object();
  for (const auto& [name, dig] : inputs) in[name] = dig;
  j["inputs"] = in;
  return j;
}

inline nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::string opt_csv(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

inline nlohmann::json report_json(const FitReport& r) {
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"final_nll", r.final_nll},
          {"gradient_norm", r.gradient_norm},
          {"separation_detected", r.separation_detected}};
}

}  // namespace detail

struct SynthArgs {
  std::size_t n = 50;
  std::uint64_t seed = 0;
  std::string truth_beta = "-5,1";
  std::string x_range = "0,10";
  std::string intervalize = "none";
  std::optional<double> epsilon;
  std::optional<double> split_point;
  std::size_t censor_labels = 0;
  std::string out = "-";
};

inline int cmd_synth(const SynthArgs& a) {
  const auto beta = detail::parse_list(a.truth_beta, "--truth-beta");
  const auto range = detail::parse_list(a.x_range, "--x-range");
  if (range.size() != 2 || range[0] > range[1]) {
    throw UsageError("--x-range: expected lo,hi with lo <= hi");
  }
  if (a.n == 0) throw UsageError("--n must be at least 1");
  std::optional<CensorMode> mode;
  if (a.intervalize != "none") {
    mode = parse_censor_mode(a.intervalize);
    if (!mode) throw UsageError("--intervalize: unknown mode '" + a.intervalize + "'");
  }
  if (a.split_point && mode != CensorMode::split_biased) {
    throw UsageError("--split-point requires --intervalize split");
  }
  if (mode == CensorMode::split_biased && !a.split_point) {
    throw UsageError("--intervalize split requires --split-point");
  }
  if (a.epsilon && !mode) throw UsageError("--epsilon requires --intervalize");
  if (mode && !a.epsilon) throw UsageError("--intervalize requires --epsilon");

  const Coefficients truth(beta);
  Dataset d = synthesize(a.n, a.seed, truth, Interval(range[0], range[1]));
  std::set<std::size_t> censored;
  if (a.censor_labels > 0) {
    if (a.censor_labels > d.size()) throw UsageError("--censor-labels exceeds --n");
    censored = rows_nearest_boundary(d, truth, a.censor_labels);
  }
  if (mode) d = intervalize(d, *mode, *a.epsilon, derive_seed(a.seed, 1), a.split_point);
  d = censor_labels(d, censored);

  if (detail::is_json_path(a.out)) {
    nlohmann::json j = detail::provenance_json(a.seed, {});
    j["dataset"] = to_json(d);
    j["digest"] = digest(d);
    detail::write_file(a.out, j.dump(2) + "\n");
  } else {
    detail::write_file(a.out, detail::provenance_header(a.seed, {}) + "# digest=" + digest(d) +
                                  "\n" + to_csv_string(d));
  }
  return kOk;
}

struct FitArgs {
  std::string data;
  std::string mode = "precise";
  std::string out = "-";
  std::string label_column = "y";
  std::uint64_t seed = 0;
  double ridge = 0.0;
  double tolerance = 1e-8;
  int max_iterations = 100;
  int refine_budget = 500;
};

inline Dataset load_dataset_arg(const std::string& path, const std::string& label_column,
                                std::string* digest_out) {
  const std::string text = detail::read_file(path);
  if (digest_out) *digest_out = digest_bytes(text);
  if (detail::is_json_path(path)) {
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DataError("'" + path + "': invalid JSON");
    return dataset_from_json(j.contains("dataset") ? j["dataset"] : j);
  }
  CsvSchema schema;
  schema.label_column = label_column;
  return load_csv_string(text, schema);
}

inline int cmd_fit(const FitArgs& a) {
  std::string data_digest;
  const Dataset d = load_dataset_arg(a.data, a.label_column, &data_digest);
  if (d.empty()) throw DataError("'" + a.data + "' has no rows");
  FitOptions fo;
  fo.tolerance = a.tolerance;
  fo.max_iterations = a.max_iterations;
  fo.ridge = a.ridge;

  nlohmann::json j = detail::provenance_json(a.seed, {{"data", data_digest}});
  j["mode"] = a.mode;
  j["feature_names"] = d.feature_names();

  if (a.mode == "precise" || a.mode == "midpoint" || a.mode == "drop-uncertain") {
    Dataset train = d;
    if (a.mode == "precise") {
      auto bad = d.uncertain_rows();
      if (!bad.empty()) {
        throw DataError("--mode precise needs a fully certain dataset; uncertain rows: " +
                        describe_rows(bad));
      }
    } else {
      train = collapse(d, a.mode == "midpoint" ? CollapseStrategy::midpoint
                                               : CollapseStrategy::drop_uncertain);
    }
    const FitResult fit = fit_mle(train, fo);
    if (!fit.report.converged && !fit.report.separation_detected) {
      std::cerr << "ilr fit: did not converge in " << fit.report.iterations
                << " iterations (gradient norm " << fit.report.gradient_norm << ")\n";
      return kNumerical;
    }
    if (fit.report.separation_detected) {
      std::cerr << "ilr fit: warning: separation detected, coefficients capped\n";
    }
    j["beta"] = fit.coefficients.vector();
    j["report"] = detail::report_json(fit.report);
    j["digest"] = digest(train);
    j["rows"] = train.size();
  } else if (a.mode == "imprecise" || a.mode == "brute-force") {
    ImpreciseOptions io;
    io.tolerance = a.tolerance;
    io.refine_budget = a.refine_budget;
    io.fit = fo;
    const ModelSet ms = a.mode == "imprecise" ? fit_imprecise(d, io)
                                              : fit_imprecise_bruteforce(d, {}, fo);
    nlohmann::json body = to_json(ms);
    j["models"] = body["models"];
    j["digest"] = body["digest"];
    j["rows"] = d.size();
  } else {
    throw UsageError("--mode: unknown mode '" + a.mode + "'");
  }
  detail::write_file(a.out, j.dump(2) + "\n");
  return kOk;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string label_column = "y";
  std::string out = "-";
  std::string plot_data;
  std::string rule = "abstain";
  double threshold = 0.5;
  std::uint64_t seed = 0;
};

inline ModelSet load_model(const std::string& text, const std::string& path) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("'" + path + "': invalid JSON");
  if (j.contains("models")) return model_set_from_json(j);
  if (j.contains("beta")) {
    try {
      return ModelSet::single(Coefficients(j.at("beta").get<std::vector<double>>()), "precise",
                              j.value("/report/separation_detected"_json_pointer, false),
                              j.value("digest", std::string()));
    } catch (const std::exception& e) {
      throw DataError("'" + path + "': " + e.what());
    }
  }
  throw DataError("'" + path + "': neither a model nor a model set");
}

inline int cmd_eval(const EvalArgs& a) {
  const auto rule = parse_rule(a.rule);
  if (!rule) throw UsageError("--rule: unknown rule '" + a.rule + "'");
  if (!(a.threshold > 0 && a.threshold < 1)) throw UsageError("--threshold must lie in (0, 1)");
  const std::string model_text = detail::read_file(a.model);
  const ModelSet ms = load_model(model_text, a.model);
  std::string data_digest;
  const Dataset test = load_dataset_arg(a.data, a.label_column, &data_digest);
  if (test.dimension() != ms.dimension()) {
    throw DataError("dimension mismatch: model has " + std::to_string(ms.dimension()) +
                    " features, data has " + std::to_string(test.dimension()));
  }
  const std::vector<std::pair<std::string, std::string>> inputs{
      {"model", digest_bytes(model_text)}, {"data", data_digest}};

  const auto probs = predict_intervals(ms, test);
  const auto labels = labels_of(test);
  const auto decisions = classify_all(probs, a.threshold, *rule);
  const TernaryConfusion tc = ternary_confusion(decisions, labels);
  const IntervalConfusion ic = interval_confusion(tc);
  const UncertaintyStats st = uncertainty_stats(tc);

  nlohmann::json j = detail::provenance_json(a.seed, inputs);
  j["threshold"] = a.threshold;
  j["rule"] = to_string(*rule);
  j["models"] = ms.size();
  j["rows"] = test.size();
  j["ternary_confusion"] = {{"a", tc.a}, {"b", tc.b}, {"c", tc.c}, {"d", tc.d},
                            {"e", tc.e}, {"f", tc.f}, {"positives", tc.positives()},
                            {"negatives", tc.negatives()}};
  auto range = [](const CountRange& r) { return nlohmann::json::array({r.lo, r.hi}); };
  j["interval_confusion"] = {{"a", range(ic.a)}, {"b", range(ic.b)}, {"c", range(ic.c)},
                             {"d", range(ic.d)}, {"positives", ic.positives},
                             {"negatives", ic.negatives}};
  j["stats"] = {{"s", detail::opt_json(st.sensitivity)},
                {"t", detail::opt_json(st.specificity)},
                {"s_prime", detail::opt_json(st.predictive_sensitivity)},
                {"t_prime", detail::opt_json(st.predictive_specificity)},
                {"sigma", detail::opt_json(st.positive_incertitude)},
                {"tau", detail::opt_json(st.negative_incertitude)}};
  auto iv_json = [](const std::optional<Interval>& iv) {
    return iv ? nlohmann::json::array({iv->lo(), iv->hi()}) : nlohmann::json(nullptr);
  };
  j["interval_stats"] = {{"s", iv_json(ic.sensitivity())}, {"t", iv_json(ic.specificity())}};

  const bool rankable = test.features_precise() && tc.positives() > 0 && tc.negatives() > 0;
  std::optional<RocBand> band;
  if (rankable) {
    band = roc_band(ms, test);
    if (ms.size() == 1) {
      j["auc"] = band->auc.lo();
    } else {
      j["auc"] = nlohmann::json::array({band->auc.lo(), band->auc.hi()});
    }
  } else {
    j["auc"] = nullptr;
  }

  if (!a.plot_data.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(a.plot_data);
    const std::string header = detail::provenance_header(a.seed, inputs);
    auto put = [&](const std::string& name, const std::string& body) {
      detail::write_file((fs::path(a.plot_data) / name).string(), header + body);
    };
    const auto grid = default_threshold_grid();
    if (rankable) {
      std::ostringstream roc_csv;
      if (ms.size() == 1) {
        const RocCurve r = roc(member_scores(ms[0].coefficients, test), labels);
        roc_csv << "C,fpr,s\n";
        for (const auto& p : r.points) {
          roc_csv << format_real(p.threshold) << ',' << format_real(p.fpr) << ','
                  << format_real(p.sensitivity) << '\n';
        }
      } else {
        roc_csv << "C,fpr_lo,fpr_hi,s_lo,s_hi\n";
        for (double c : grid) {
          const IntervalConfusion g =
              interval_confusion(ternary_confusion(classify_all(probs, c, Rule::abstain), labels));
          const double np = static_cast<double>(g.positives), nn = static_cast<double>(g.negatives);
          roc_csv << format_real(c) << ',' << format_real(g.b.lo / nn) << ','
                  << format_real(g.b.hi / nn) << ',' << format_real(g.a.lo / np) << ','
                  << format_real(g.a.hi / np) << '\n';
        }
      }
      put("roc.csv", roc_csv.str());

      std::ostringstream band_csv;
      band_csv << "fpr,s_lo,s_hi\n";
      for (std::size_t k = 0; k < band->fpr.size(); ++k) {
        band_csv << format_real(band->fpr[k]) << ',' << format_real(band->s_lo[k]) << ','
                 << format_real(band->s_hi[k]) << '\n';
      }
      put("roc_band.csv", band_csv.str());

      const Roc3D r3 = roc3d(ms, test, grid);
      std::ostringstream r3_csv;
      r3_csv << "C,fpr_prime,s_prime,sigma,tau\n";
      for (const auto& p : r3.points) {
        r3_csv << format_real(p.threshold) << ',' << detail::opt_csv(p.fpr_prime) << ','
               << detail::opt_csv(p.s_prime) << ',' << detail::opt_csv(p.sigma) << ','
               << detail::opt_csv(p.tau) << '\n';
      }
      put("roc3d.csv", r3_csv.str());
    }

    Rng rng(derive_seed(a.seed, 2));
    std::ostringstream sc;
    sc << "index,y,y_jitter,p_lo,p_hi\n";
    for (std::size_t i = 0; i < test.size(); ++i) {
      const double y = labels[i].value();
      sc << i << ',' << labels[i].value() << ',' << format_real(y + rng.uniform(-0.05, 0.05))
         << ',' << format_real(probs[i].lo()) << ',' << format_real(probs[i].hi()) << '\n';
    }
    put("scatter.csv", sc.str());
  }

  detail::write_file(a.out, j.dump(2) + "\n");
  return kOk;
}

inline int run(int argc, const char* const* argv) {
  CLI::App app{"Imprecise logistic regression toolkit", "ilr"};
  app.set_version_flag("--version", ILR_VERSION);
  app.set_config("--config", "", "key=value file mirroring the command-line flags");
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--n", sa.n, "Number of rows")->capture_default_str();
  synth->add_option("--seed", sa.seed, "Generator seed")->capture_default_str();
  synth->add_option("--truth-beta", sa.truth_beta, "Ground-truth coefficients b0,b1,...")
      ->capture_default_str();
  synth->add_option("--x-range", sa.x_range, "Covariate range lo,hi")->capture_default_str();
  synth->add_option("--intervalize", sa.intervalize, "none|symmetric|left|right|split")
      ->capture_default_str();
  synth->add_option("--epsilon", sa.epsilon, "Interval half-width");
  synth->add_option("--split-point", sa.split_point, "Split point for --intervalize split");
  synth->add_option("--censor-labels", sa.censor_labels,
                    "Mark the k rows nearest the true decision boundary unknown");
  synth->add_option("-o,--out", sa.out, "Output path (.csv or .json; - for stdout)");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit a precise model or an imprecise model set");
  fit->add_option("--data", fa.data, "Training dataset (.csv or .json)")->required();
  fit->add_option("--mode", fa.mode, "Fitting mode")
      ->check(CLI::IsMember({"precise", "midpoint", "drop-uncertain", "imprecise", "brute-force"}))
      ->capture_default_str();
  fit->add_option("-o,--out", fa.out, "Output JSON path (- for stdout)");
  fit->add_option("--label-column", fa.label_column)->capture_default_str();
  fit->add_option("--seed", fa.seed, "Seed echoed into the output")->capture_default_str();
  fit->add_option("--ridge", fa.ridge)->capture_default_str();
  fit->add_option("--tolerance", fa.tolerance)->capture_default_str();
  fit->add_option("--max-iterations", fa.max_iterations)->capture_default_str();
  fit->add_option("--refine-budget", fa.refine_budget, "Fits per extremization")
      ->capture_default_str();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a model or model set on labelled data");
  eval->add_option("--model", ea.model, "Model or model-set JSON")->required();
  eval->add_option("--data", ea.data, "Test dataset (.csv or .json)")->required();
  eval->add_option("--label-column", ea.label_column)->capture_default_str();
  eval->add_option("--threshold", ea.threshold)->capture_default_str();
  eval->add_option("--rule", ea.rule, "abstain|upper|lower")->capture_default_str();
  eval->add_option("-o,--out", ea.out, "Report JSON path (- for stdout)");
  eval->add_option("--plot-data", ea.plot_data, "Directory for ROC/band/3-D/scatter CSVs");
  eval->add_option("--seed", ea.seed, "Seed for scatter jitter")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*synth) return cmd_synth(sa);
    if (*fit) return cmd_fit(fa);
    if (*eval) return cmd_eval(ea);
  } catch (const UsageError& e) {
    std::cerr << "ilr: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "ilr: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const LimitExceeded& e) {
    std::cerr << "ilr: " << e.what() << "; use --mode imprecise\n";
    return kData;
  } catch (const DataError& e) {
    std::cerr << "ilr: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ilr: " << e.what() << '\n';
    return kData;
  } catch (const std::out_of_range& e) {
    std::cerr << "ilr: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace ilr::cli

#endif
