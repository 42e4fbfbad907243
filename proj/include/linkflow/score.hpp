#ifndef LINKFLOW_SCORE_HPP
#define LINKFLOW_SCORE_HPP

// Scoring a correction report against ground truth, optionally with the
// small-noise error bound ||f* - f||_1 <= lambda * ||e_{M\S}||_1 for a
// declared corrupted subset S.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linkflow/error.hpp"
#include "linkflow/io.hpp"
#include "linkflow/recoverability.hpp"

namespace linkflow {

struct LinkError {
  std::string id;
  double estimate = 0.0;
  double truth = 0.0;
  double error = 0.0;  // estimate - truth
};

struct BoundCheck {
  std::vector<std::string> subset;
  double recoverability = 0.0;
  bool certified = false;
  std::optional<double> lambda;
  double noise_l1 = 0.0;  // ||e_{M\S}||_1 = sum over M\S of |observed - truth|
  std::optional<double> bound;
  std::optional<bool> holds;
};

struct Score {
  std::vector<LinkError> links;
  double l1_error = 0.0;      // on the reported (possibly rounded) estimate
  double l1_error_raw = 0.0;  // on the unrounded estimate
  std::optional<BoundCheck> bound;
};

inline Score score_report(const Json& report, const std::map<std::string, double>& truth,
                          const std::optional<std::vector<std::string>>& subset = std::nullopt,
                          const CertifyConfig& cfg = {}) {
  if (!report.is_object() || report.value("format", std::string{}) != kCorrectionFormat ||
      !report.contains("links") || !report.contains("network")) {
    throw Error(Errc::SyntaxError, "not a correction report");
  }
  Score out;
  for (const auto& row : report.at("links")) {
    const std::string id = row.at("id").get<std::string>();
    const auto it = truth.find(id);
    if (it == truth.end()) {
      throw Error(Errc::MissingGroundTruth, "no ground truth for link '" + id + "'");
    }
    const double est = row.at("estimate").get<double>();
    const double raw = row.at("estimate_raw").get<double>();
    out.links.push_back({id, est, it->second, est - it->second});
    out.l1_error += std::abs(est - it->second);
    out.l1_error_raw += std::abs(raw - it->second);
  }
  if (subset) {
    const NetworkDocument doc = network_from_json(report.at("network"));
    std::vector<Index> s;
    for (const auto& id : *subset) {
      const auto j = doc.network.link_index(id);
      if (!j) throw Error(Errc::InvalidArgument, "unknown link '" + id + "' in subset");
      s.push_back(*j);
    }
    const RecoverabilityReport rep = certify(doc.network, doc.monitored, s, cfg);
    BoundCheck b;
    b.subset = *subset;
    b.recoverability = rep.value;
    b.certified = rep.certified_exact_recovery;
    b.lambda = rep.lambda;
    const auto& idx = doc.monitored.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (std::binary_search(rep.subset.begin(), rep.subset.end(), idx[i])) continue;
      const auto& id = doc.network.links()[static_cast<std::size_t>(idx[i])].id;
      b.noise_l1 += std::abs(doc.observation.values()(static_cast<Index>(i)) - truth.at(id));
    }
    if (b.lambda) {
      b.bound = *b.lambda * b.noise_l1;
      // Slack for the solver's own stopping tolerance.
      b.holds = out.l1_error_raw <= *b.bound + 1e-6 * (1.0 + *b.bound);
    }
    out.bound = std::move(b);
  }
  return out;
}

inline Json score_to_json(const Score& s) {
  Json doc;
  doc["l1_error"] = number_json(s.l1_error);
  doc["l1_error_raw"] = s.l1_error_raw;
  Json rows = Json::array();
  for (const auto& l : s.links) {
    rows.push_back({{"id", l.id},
                    {"estimate", number_json(l.estimate)},
                    {"truth", number_json(l.truth)},
                    {"error", number_json(l.error)}});
  }
  doc["links"] = std::move(rows);
  if (s.bound) {
    const auto& b = *s.bound;
    Json jb;
    jb["subset"] = b.subset;
    jb["recoverability"] = value_json(b.recoverability);
    jb["certified"] = b.certified;
    jb["lambda"] = b.lambda ? Json(*b.lambda) : Json(nullptr);
    jb["noise_l1"] = number_json(b.noise_l1);
    jb["bound"] = b.bound ? Json(*b.bound) : Json(nullptr);
    jb["holds"] = b.holds ? Json(*b.holds) : Json(nullptr);
    doc["bound_check"] = std::move(jb);
  }
  return doc;
}

inline std::string score_to_text(const Score& s) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "Link ID" << std::right << std::setw(14) << "Truth"
     << std::setw(14) << "Estimate" << std::setw(14) << "Error" << "\n";
  for (const auto& l : s.links) {
    os << std::left << std::setw(10) << l.id << std::right << std::setw(14)
       << format_fixed(l.truth, 3) << std::setw(14) << format_fixed(l.estimate, 3)
       << std::setw(14) << format_fixed(l.error, 3) << "\n";
  }
  os << "\n||f* - f||_1 = " << format_fixed(s.l1_error, 6) << "  (unrounded "
     << format_fixed(s.l1_error_raw, 6) << ")\n";
  if (s.bound) {
    const auto& b = *s.bound;
    os << "Rec(S) = " << (std::isinf(b.recoverability) ? std::string("inf")
                                                       : format_fixed(b.recoverability, 6));
    if (b.bound) {
      os << "  lambda = " << format_fixed(*b.lambda, 6) << "  ||e_{M\\S}||_1 = "
         << format_fixed(b.noise_l1, 6) << "  bound = " << format_fixed(*b.bound, 6)
         << "  " << (*b.holds ? "holds" : "VIOLATED") << "\n";
    } else {
      os << "  not certified, no bound\n";
    }
  }
  return os.str();
}

}  // namespace linkflow

#endif  // LINKFLOW_SCORE_HPP
