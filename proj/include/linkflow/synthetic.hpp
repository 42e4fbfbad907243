#ifndef LINKFLOW_SYNTHETIC_HPP
#define LINKFLOW_SYNTHETIC_HPP

// Random test instances: an acyclic road network whose every link lies on an
// entry-to-exit route, an integer conservation-consistent ground truth built
// from route flows, and an observation with a few gross miscounts plus small
// Gaussian noise elsewhere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "linkflow/error.hpp"
#include "linkflow/io.hpp"
#include "linkflow/kernel.hpp"
#include "linkflow/network.hpp"

namespace linkflow {

struct SyntheticSpec {
  int node_count = 9;
  int link_count = 18;
  double monitored_fraction = 15.0 / 18.0;
  int corrupt_count = 2;
  double corruption_min = 1000.0;
  double corruption_max = 10000.0;
  double noise_sigma = 5.0;
  std::uint64_t seed = 1;
};

struct SyntheticInstance {
  NetworkDocument document;  // includes ground_truth
  std::vector<std::string> corrupted;
};

namespace detail {

struct RawLink {
  int tail;  // 0 = outside, otherwise 1-based node number
  int head;
};

}  // namespace detail

inline SyntheticInstance generate_instance(const SyntheticSpec& spec) {
  const int n = spec.node_count;
  const int l = spec.link_count;
  if (n < 1 || l <= n || l < 2 || spec.corrupt_count < 0 || !(spec.monitored_fraction > 0.0) ||
      spec.monitored_fraction > 1.0 || spec.noise_sigma < 0.0 ||
      spec.corruption_min < 0.0 || spec.corruption_max < spec.corruption_min) {
    throw Error(Errc::InfeasibleSpec, "synthetic spec fields out of range");
  }
  const int monitored_count =
      std::max(l - n, static_cast<int>(std::lround(spec.monitored_fraction * l)));
  if (spec.corrupt_count > monitored_count) {
    throw Error(Errc::InfeasibleSpec, "more corrupted links than monitored links");
  }
  std::mt19937_64 rng(spec.seed);
  auto uniform_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  for (int attempt = 0; attempt < 100; ++attempt) {
    // Topology: nodes 1..n in topological order.
    std::vector<detail::RawLink> raw;
    raw.push_back({0, 1});
    for (int j = 2; j <= n; ++j) raw.push_back({uniform_int(1, j - 1), j});
    std::vector<bool> has_out(static_cast<std::size_t>(n) + 1, false);
    for (const auto& e : raw) has_out[static_cast<std::size_t>(e.tail)] = true;
    for (int i = 1; i <= n; ++i) {
      if (has_out[static_cast<std::size_t>(i)]) continue;
      const int head = (i == n || uniform_int(0, 1) == 0) ? 0 : uniform_int(i + 1, n);
      raw.push_back({i, head});
    }
    if (static_cast<int>(raw.size()) > l) {
      throw Error(Errc::InfeasibleSpec, "too few links to give every node an entry and exit");
    }
    while (static_cast<int>(raw.size()) < l) {
      const int kind = uniform_int(0, 2);
      if (kind == 0 && n >= 2) {
        const int a = uniform_int(1, n - 1);
        raw.push_back({a, uniform_int(a + 1, n)});
      } else if (kind == 1) {
        raw.push_back({0, uniform_int(1, n)});
      } else {
        raw.push_back({uniform_int(1, n), 0});
      }
    }
    std::shuffle(raw.begin(), raw.end(), rng);

    // Ground truth: for each link add a weighted entry-to-exit route through it.
    std::vector<std::vector<int>> in_links(static_cast<std::size_t>(n) + 1);
    std::vector<std::vector<int>> out_links(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j < l; ++j) {
      if (raw[j].head) in_links[static_cast<std::size_t>(raw[j].head)].push_back(j);
      if (raw[j].tail) out_links[static_cast<std::size_t>(raw[j].tail)].push_back(j);
    }
    std::vector<double> truth(static_cast<std::size_t>(l), 0.0);
    for (int j = 0; j < l; ++j) {
      const double w = uniform_int(50, 500);
      truth[static_cast<std::size_t>(j)] += w;
      for (int node = raw[j].tail; node != 0;) {
        const auto& ins = in_links[static_cast<std::size_t>(node)];
        const int e = ins[static_cast<std::size_t>(uniform_int(0, static_cast<int>(ins.size()) - 1))];
        truth[static_cast<std::size_t>(e)] += w;
        node = raw[e].tail;
      }
      for (int node = raw[j].head; node != 0;) {
        const auto& outs = out_links[static_cast<std::size_t>(node)];
        const int e = outs[static_cast<std::size_t>(uniform_int(0, static_cast<int>(outs.size()) - 1))];
        truth[static_cast<std::size_t>(e)] += w;
        node = raw[e].head;
      }
    }

    std::vector<std::string> node_ids;
    for (int i = 1; i <= n; ++i) node_ids.push_back("n" + std::to_string(i));
    std::vector<Link> links;
    for (int j = 0; j < l; ++j) {
      Link link{std::to_string(j + 1), std::nullopt, std::nullopt};
      if (raw[j].tail) link.tail = node_ids[static_cast<std::size_t>(raw[j].tail - 1)];
      if (raw[j].head) link.head = node_ids[static_cast<std::size_t>(raw[j].head - 1)];
      links.push_back(std::move(link));
    }
    Network net(node_ids, links, "synthetic-seed-" + std::to_string(spec.seed));
    IncidenceMatrix a;
    try {
      a = build_incidence(net);
    } catch (const Error&) {
      continue;
    }

    std::vector<Index> order(static_cast<std::size_t>(l));
    for (int j = 0; j < l; ++j) order[static_cast<std::size_t>(j)] = j;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Index> monitored(order.begin(), order.begin() + monitored_count);
    std::sort(monitored.begin(), monitored.end());
    try {
      find_base_set(a, monitored);
    } catch (const Error&) {
      continue;
    }

    std::vector<Index> corrupt = monitored;
    std::shuffle(corrupt.begin(), corrupt.end(), rng);
    corrupt.resize(static_cast<std::size_t>(spec.corrupt_count));
    std::sort(corrupt.begin(), corrupt.end());

    std::uniform_real_distribution<double> magnitude(spec.corruption_min, spec.corruption_max);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
    std::map<std::string, double> observed;
    for (Index j : monitored) {
      const double t = truth[static_cast<std::size_t>(j)];
      double v = t;
      if (std::binary_search(corrupt.begin(), corrupt.end(), j)) {
        const double mag = magnitude(rng);
        v = t + (uniform_int(0, 1) == 0 ? -mag : mag);
      } else if (spec.noise_sigma > 0.0) {
        v = t + noise(rng);
      }
      observed[links[static_cast<std::size_t>(j)].id] = std::max(0.0, std::round(v));
    }

    SyntheticInstance out;
    std::vector<std::string> monitored_ids;
    for (Index j : monitored) monitored_ids.push_back(links[static_cast<std::size_t>(j)].id);
    out.document.network = net;
    out.document.monitored = MonitoredSet(net, monitored_ids);
    out.document.observation = FlowObservation(net, out.document.monitored, observed);
    std::map<std::string, double> truth_map;
    for (int j = 0; j < l; ++j) {
      truth_map[links[static_cast<std::size_t>(j)].id] = truth[static_cast<std::size_t>(j)];
    }
    out.document.ground_truth = std::move(truth_map);
    for (Index j : corrupt) out.corrupted.push_back(links[static_cast<std::size_t>(j)].id);
    return out;
  }
  throw Error(Errc::InfeasibleSpec,
              "no observable instance after 100 attempts (monitored fraction too small?)");
}

/// Ground-truth sidecar document for scoring with `validate`.
inline std::string serialize_truth(const SyntheticInstance& inst) {
  Json doc;
  doc["format"] = kTruthFormat;
  doc["version"] = kFormatVersion;
  Json truth = Json::object();
  for (const auto& l : inst.document.network.links()) {
    truth[l.id] = number_json(inst.document.ground_truth->at(l.id));
  }
  doc["ground_truth"] = std::move(truth);
  doc["corrupted"] = inst.corrupted;
  return doc.dump(2) + "\n";
}

}  // namespace linkflow

#endif  // LINKFLOW_SYNTHETIC_HPP
