#ifndef LINKFLOW_IO_HPP
#define LINKFLOW_IO_HPP

// Network/observation documents (JSON, format "linkflow-network" version 1)
// and the correction / recoverability report writers.
//
//   {
//     "format": "linkflow-network", "version": 1, "name": "toy",
//     "nodes": ["1", "2", "3"],
//     "links": [{"id": "1", "tail": null, "head": "1"}, ...],
//     "monitored": ["1", "2", ...],
//     "observed": {"1": 300, ...},
//     "ground_truth": {"1": 300, ...}            (optional)
//   }
//
// Identifiers may be written as JSON strings or integers; they are kept as
// strings. See docs/file-format.md.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "linkflow/correction.hpp"
#include "linkflow/error.hpp"
#include "linkflow/network.hpp"
#include "linkflow/recoverability.hpp"

namespace linkflow {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kNetworkFormat = "linkflow-network";
inline constexpr std::string_view kCorrectionFormat = "linkflow-correction";
inline constexpr std::string_view kRecoverabilityFormat = "linkflow-recoverability";
inline constexpr std::string_view kTruthFormat = "linkflow-truth";
inline constexpr int kFormatVersion = 1;

struct NetworkDocument {
  Network network;
  MonitoredSet monitored;
  FlowObservation observation;
  std::optional<std::map<std::string, double>> ground_truth;
};

namespace detail {

inline std::string id_of(const Json& j, std::string_view what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer() || j.is_number_unsigned()) return std::to_string(j.get<long long>());
  throw Error(Errc::SyntaxError, std::string(what) + " must be a string or integer identifier");
}

inline std::optional<std::string> endpoint_of(const Json& link, const char* key) {
  if (!link.contains(key) || link.at(key).is_null()) return std::nullopt;
  return id_of(link.at(key), key);
}

inline std::map<std::string, double> counts_of(const Json& j, std::string_view what) {
  if (!j.is_object()) throw Error(Errc::SyntaxError, std::string(what) + " must be an object");
  std::map<std::string, double> out;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) {
      throw Error(Errc::SyntaxError,
                  std::string(what) + " value for link '" + key + "' is not a number");
    }
    if (!out.emplace(key, value.get<double>()).second) {
      throw Error(Errc::DuplicateId, std::string(what) + " lists link '" + key + "' twice");
    }
  }
  return out;
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw Error(Errc::SyntaxError, "line " + std::to_string(line) + ": " + e.what());
  }
}

inline void check_format(const Json& doc, std::string_view expected) {
  if (!doc.is_object()) throw Error(Errc::SyntaxError, "document root must be an object");
  if (doc.contains("format") && doc.at("format") != std::string(expected)) {
    throw Error(Errc::SyntaxError, "expected format '" + std::string(expected) + "'");
  }
  if (doc.contains("version") && doc.at("version") != kFormatVersion) {
    throw Error(Errc::SyntaxError, "unsupported format version");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline NetworkDocument network_from_json(const Json& doc) {
  detail::check_format(doc, kNetworkFormat);
  for (const char* key : {"nodes", "links"}) {
    if (!doc.contains(key) || !doc.at(key).is_array()) {
      throw Error(Errc::SyntaxError, std::string("missing array '") + key + "'");
    }
  }
  std::vector<std::string> nodes;
  for (const auto& n : doc.at("nodes")) nodes.push_back(detail::id_of(n, "node id"));
  std::vector<Link> links;
  for (const auto& l : doc.at("links")) {
    if (!l.is_object() || !l.contains("id")) {
      throw Error(Errc::SyntaxError, "each link must be an object with an 'id'");
    }
    links.push_back(
        {detail::id_of(l.at("id"), "link id"), detail::endpoint_of(l, "tail"), detail::endpoint_of(l, "head")});
  }
  const std::string name = doc.contains("name") && doc.at("name").is_string()
                               ? doc.at("name").get<std::string>()
                               : std::string{};
  NetworkDocument out;
  out.network = Network(std::move(nodes), std::move(links), name);

  std::vector<std::string> monitored;
  if (doc.contains("monitored")) {
    if (!doc.at("monitored").is_array()) throw Error(Errc::SyntaxError, "'monitored' must be an array");
    for (const auto& m : doc.at("monitored")) monitored.push_back(detail::id_of(m, "monitored id"));
  }
  out.monitored = MonitoredSet(out.network, monitored);
  const auto observed = doc.contains("observed") ? detail::counts_of(doc.at("observed"), "observed")
                                                 : std::map<std::string, double>{};
  out.observation = FlowObservation(out.network, out.monitored, observed);
  if (doc.contains("ground_truth") && !doc.at("ground_truth").is_null()) {
    auto truth = detail::counts_of(doc.at("ground_truth"), "ground_truth");
    for (const auto& [id, v] : truth) {
      if (!out.network.link_index(id)) {
        throw Error(Errc::SyntaxError, "ground_truth names unknown link '" + id + "'");
      }
      if (!std::isfinite(v)) throw Error(Errc::SyntaxError, "ground_truth value is not finite");
    }
    out.ground_truth = std::move(truth);
  }
  return out;
}

inline NetworkDocument parse_network(std::string_view text) {
  return network_from_json(detail::parse_json(text));
}

inline NetworkDocument load_network_file(const std::string& path) {
  return parse_network(detail::read_file(path));
}

/// Numbers that are integral print without a fractional part.
inline Json number_json(double v) {
  if (std::isfinite(v) && v == std::round(v) && std::abs(v) < 9.0e15) {
    return static_cast<long long>(v);
  }
  return v;
}

inline Json network_to_json(const NetworkDocument& d) {
  Json doc;
  doc["format"] = kNetworkFormat;
  doc["version"] = kFormatVersion;
  doc["name"] = d.network.name();
  doc["nodes"] = d.network.nodes();
  Json links = Json::array();
  for (const auto& l : d.network.links()) {
    Json jl;
    jl["id"] = l.id;
    jl["tail"] = l.tail ? Json(*l.tail) : Json(nullptr);
    jl["head"] = l.head ? Json(*l.head) : Json(nullptr);
    links.push_back(std::move(jl));
  }
  doc["links"] = std::move(links);
  Json monitored = Json::array();
  Json observed = Json::object();
  const auto& idx = d.monitored.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& id = d.network.links()[idx[i]].id;
    monitored.push_back(id);
    observed[id] = number_json(d.observation.values()(static_cast<Index>(i)));
  }
  doc["monitored"] = std::move(monitored);
  doc["observed"] = std::move(observed);
  if (d.ground_truth) {
    Json truth = Json::object();
    for (const auto& l : d.network.links()) {
      auto it = d.ground_truth->find(l.id);
      if (it != d.ground_truth->end()) truth[l.id] = number_json(it->second);
    }
    doc["ground_truth"] = std::move(truth);
  }
  return doc;
}

/// Canonical text form: ids as strings, links and monitored links in file
/// order, two-space indentation, trailing newline.
inline std::string serialize_network(const NetworkDocument& d) {
  return network_to_json(d).dump(2) + "\n";
}

/// Estimated minus observed over observed, in percent; NaN when observed is 0.
inline double percent_difference(double estimate, double observed) {
  if (observed == 0.0) return std::nan("");
  return 100.0 * (estimate - observed) / observed;
}

inline std::string format_fixed(double v, int digits) {
  if (std::isnan(v)) return "N/A";
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;  // no "-0.0"
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline const char* solver_name(L1Solver s) { return s == L1Solver::Admm ? "admm" : "exact-lp"; }

inline Json correction_to_json(const NetworkDocument& d, const CorrectionResult& r) {
  const auto& links = d.network.links();
  const auto& idx = d.monitored.indices();
  Json doc;
  doc["format"] = kCorrectionFormat;
  doc["version"] = kFormatVersion;
  doc["network"] = network_to_json(d);
  Json rows = Json::array();
  for (Index j = 0; j < static_cast<Index>(links.size()); ++j) {
    Json row;
    row["id"] = links[j].id;
    const auto pos = std::lower_bound(idx.begin(), idx.end(), j);
    const bool monitored = pos != idx.end() && *pos == j;
    row["monitored"] = monitored;
    row["estimate"] = number_json(r.f_star(j));
    row["estimate_raw"] = r.f_star_raw(j);
    if (monitored) {
      const double obs = d.observation.values()(pos - idx.begin());
      row["observed"] = number_json(obs);
      row["difference"] = number_json(r.f_star(j) - obs);
      row["residual_raw"] = r.f_star_raw(j) - obs;
      const double pct = percent_difference(r.f_star(j), obs);
      row["percent_difference"] = std::isnan(pct) ? Json(nullptr) : Json(pct);
    } else {
      row["observed"] = nullptr;
      row["difference"] = nullptr;
      row["residual_raw"] = nullptr;
      row["percent_difference"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  doc["links"] = std::move(rows);
  Json suspects = Json::array();
  for (const auto& s : r.suspects) {
    suspects.push_back({{"id", links[s.link].id}, {"abs_residual", s.abs_residual}, {"flagged", s.flagged}});
  }
  doc["suspects"] = std::move(suspects);
  Json base = Json::array();
  for (Index j : r.kernel.base_set.links) base.push_back(links[j].id);
  Json diag;
  diag["solver"] = solver_name(r.solver);
  diag["objective"] = r.objective;
  diag["iterations"] = r.iterations;
  diag["converged"] = r.converged;
  diag["rounded"] = r.rounded;
  diag["possibly_nonunique"] = r.possibly_nonunique;
  diag["base_set"] = std::move(base);
  diag["x_star"] = std::vector<double>(r.x_star.data(), r.x_star.data() + r.x_star.size());
  diag["max_node_residual_raw"] =
      r.node_residuals_raw.size() ? r.node_residuals_raw.cwiseAbs().maxCoeff() : 0.0;
  diag["max_node_residual_reported"] =
      r.node_residuals_reported.size() ? r.node_residuals_reported.cwiseAbs().maxCoeff() : 0.0;
  doc["diagnostics"] = std::move(diag);
  return doc;
}

/// Human-readable table: Link ID | Observation | Estimation | Difference |
/// Percentage Difference, then solver diagnostics and the suspect ranking.
inline std::string correction_to_table(const NetworkDocument& d, const CorrectionResult& r) {
  const auto& links = d.network.links();
  const auto& idx = d.monitored.indices();
  const int digits = r.rounded ? 0 : 3;
  std::ostringstream os;
  os << std::left << std::setw(10) << "Link ID" << std::right << std::setw(14) << "Observation"
     << std::setw(14) << "Estimation" << std::setw(14) << "Difference" << std::setw(12)
     << "Pct Diff" << "\n";
  for (Index j = 0; j < static_cast<Index>(links.size()); ++j) {
    const auto pos = std::lower_bound(idx.begin(), idx.end(), j);
    const bool monitored = pos != idx.end() && *pos == j;
    os << std::left << std::setw(10) << links[j].id << std::right;
    if (monitored) {
      const double obs = d.observation.values()(pos - idx.begin());
      const double pct = percent_difference(r.f_star(j), obs);
      os << std::setw(14) << format_fixed(obs, d.observation.all_integer() ? 0 : 3)
         << std::setw(14) << format_fixed(r.f_star(j), digits) << std::setw(14)
         << format_fixed(r.f_star(j) - obs, digits) << std::setw(12)
         << (std::isnan(pct) ? std::string("N/A") : format_fixed(pct, 1) + "%");
    } else {
      os << std::setw(14) << "N/A" << std::setw(14) << format_fixed(r.f_star(j), digits)
         << std::setw(14) << "N/A" << std::setw(12) << "N/A";
    }
    os << "\n";
  }
  os << "\nsolver: " << solver_name(r.solver) << "  objective: " << format_fixed(r.objective, 6)
     << "  iterations: " << r.iterations << "  converged: " << (r.converged ? "yes" : "no")
     << (r.possibly_nonunique ? "  (l1 minimizer not unique)" : "") << "\n";
  os << "suspects:";
  std::size_t shown = 0;
  for (const auto& s : r.suspects) {
    if (shown == 5 || !(s.abs_residual > 0.0)) break;
    os << " " << links[s.link].id << "(" << format_fixed(s.abs_residual, 1)
       << (s.flagged ? ", flagged" : "") << ")";
    ++shown;
  }
  os << "\n";
  return os.str();
}

inline const char* method_name(RecMethod m) {
  return m == RecMethod::ExactOracle ? "exact-oracle" : "inverse-power";
}

inline Json value_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

inline Json recoverability_to_json(const Network& net, const RecoverabilityReport& r) {
  const auto& links = net.links();
  auto ids = [&](const std::vector<Index>& v) {
    Json a = Json::array();
    for (Index j : v) a.push_back(links[j].id);
    return a;
  };
  Json doc;
  doc["format"] = kRecoverabilityFormat;
  doc["version"] = kFormatVersion;
  doc["subset"] = ids(r.subset);
  doc["value"] = value_json(r.value);
  doc["method"] = method_name(r.method);
  doc["inverse_power_value"] = r.inverse_power_value ? value_json(*r.inverse_power_value) : Json(nullptr);
  doc["exact_value"] = r.exact_value ? value_json(*r.exact_value) : Json(nullptr);
  doc["certified_exact_recovery"] = r.certified_exact_recovery;
  doc["degenerate_subset"] = r.degenerate;
  doc["lambda"] = r.lambda ? Json(*r.lambda) : Json(nullptr);
  doc["lambda_base_set"] = r.lambda_base_set ? ids(r.lambda_base_set->links) : Json(nullptr);
  doc["bound_base_sets_examined"] = r.bound_base_sets_examined;
  doc["truncated"] = r.truncated;
  doc["trace_length"] = r.trace.size();
  doc["trace"] = r.trace;
  return doc;
}

inline std::string recoverability_to_text(const Network& net, const RecoverabilityReport& r) {
  const auto& links = net.links();
  std::ostringstream os;
  os << "subset:      {";
  for (std::size_t i = 0; i < r.subset.size(); ++i) os << (i ? "," : "") << links[r.subset[i]].id;
  os << "}\n";
  os << "Rec:         " << (std::isinf(r.value) ? std::string("inf") : format_fixed(r.value, 6))
     << "  (" << method_name(r.method) << ")\n";
  if (r.inverse_power_value) {
    os << "inverse pow: " << format_fixed(*r.inverse_power_value, 6) << "  trace length "
       << r.trace.size() << "\n";
  }
  os << "certified:   " << (r.certified_exact_recovery ? "yes" : "no")
     << (r.degenerate ? " (vacuous: Z_S = 0)" : "") << "\n";
  if (r.lambda) {
    os << "lambda:      " << format_fixed(*r.lambda, 6) << "  over "
       << r.bound_base_sets_examined << " base sets" << (r.truncated ? " (truncated)" : "")
       << ", minimizing K = {";
    for (std::size_t i = 0; i < r.lambda_base_set->links.size(); ++i) {
      os << (i ? "," : "") << links[r.lambda_base_set->links[i]].id;
    }
    os << "}\n";
  }
  return os.str();
}

/// Ground-truth flows from any document with a "ground_truth" object.
inline std::map<std::string, double> load_ground_truth(const std::string& text) {
  const Json doc = detail::parse_json(text);
  if (!doc.is_object() || !doc.contains("ground_truth")) {
    throw Error(Errc::MissingGroundTruth, "document has no 'ground_truth' object");
  }
  return detail::counts_of(doc.at("ground_truth"), "ground_truth");
}

}  // namespace linkflow

#endif  // LINKFLOW_IO_HPP
