#ifndef LINKFLOW_NETWORK_HPP
#define LINKFLOW_NETWORK_HPP

// Road network model: non-centroid nodes, directed links (possibly dangling
// to an external centroid), the monitored link set, observed counts, and the
// node-link incidence matrix.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "linkflow/error.hpp"
#include "linkflow/linalg.hpp"

namespace linkflow {

/// A directed link. An absent endpoint means the link leaves or enters the
/// modeled network (it touches an external centroid).
struct Link {
  std::string id;
  std::optional<std::string> tail;
  std::optional<std::string> head;

  friend bool operator==(const Link&, const Link&) = default;
};

class Network {
 public:
  Network() = default;

  Network(std::vector<std::string> nodes, std::vector<Link> links, std::string name = {})
      : nodes_(std::move(nodes)), links_(std::move(links)), name_(std::move(name)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!node_pos_.emplace(nodes_[i], static_cast<Index>(i)).second) {
        throw Error(Errc::DuplicateId, "node '" + nodes_[i] + "' appears more than once");
      }
    }
    for (std::size_t j = 0; j < links_.size(); ++j) {
      const Link& link = links_[j];
      if (!link_pos_.emplace(link.id, static_cast<Index>(j)).second) {
        throw Error(Errc::DuplicateId, "link '" + link.id + "' appears more than once");
      }
      if (!link.tail && !link.head) {
        throw Error(Errc::SyntaxError,
                    "link '" + link.id + "' has neither tail nor head inside the network");
      }
      for (const auto* end : {&link.tail, &link.head}) {
        if (*end && !node_pos_.contains(**end)) {
          throw Error(Errc::UnknownNode,
                      "link '" + link.id + "' references unknown node '" + **end + "'");
        }
      }
      if (link.tail && link.head && *link.tail == *link.head) {
        throw Error(Errc::SyntaxError, "link '" + link.id + "' is a self-loop");
      }
    }
    if (nodes_.empty() || links_.size() < 2 || links_.size() <= nodes_.size()) {
      throw Error(Errc::DegenerateNetwork,
                  "need n >= 1, l >= 2 and l > n (got n=" + std::to_string(nodes_.size()) +
                      ", l=" + std::to_string(links_.size()) + ")");
    }
  }

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  const std::string& name() const noexcept { return name_; }
  Index node_count() const noexcept { return static_cast<Index>(nodes_.size()); }
  Index link_count() const noexcept { return static_cast<Index>(links_.size()); }

  std::optional<Index> node_index(const std::string& id) const {
    auto it = node_pos_.find(id);
    if (it == node_pos_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<Index> link_index(const std::string& id) const {
    auto it = link_pos_.find(id);
    if (it == link_pos_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const Network& a, const Network& b) {
    return a.nodes_ == b.nodes_ && a.links_ == b.links_ && a.name_ == b.name_;
  }

 private:
  std::vector<std::string> nodes_;
  std::vector<Link> links_;
  std::string name_;
  std::unordered_map<std::string, Index> node_pos_;
  std::unordered_map<std::string, Index> link_pos_;
};

/// Links carrying a sensor. Stored as column indices in ascending (file) order.
class MonitoredSet {
 public:
  MonitoredSet() = default;

  MonitoredSet(const Network& net, const std::vector<std::string>& ids) {
    std::set<Index> seen;
    for (const auto& id : ids) {
      auto j = net.link_index(id);
      if (!j) throw Error(Errc::SyntaxError, "monitored link '" + id + "' is not a network link");
      if (!seen.insert(*j).second) {
        throw Error(Errc::DuplicateId, "monitored link '" + id + "' listed twice");
      }
    }
    links_.assign(seen.begin(), seen.end());
  }

  static MonitoredSet from_indices(const Network& net, std::vector<Index> idx) {
    std::vector<std::string> ids;
    for (Index j : idx) {
      if (j < 0 || j >= net.link_count()) {
        throw Error(Errc::DimensionMismatch, "monitored index out of range");
      }
      ids.push_back(net.links()[j].id);
    }
    return MonitoredSet(net, ids);
  }

  const std::vector<Index>& indices() const noexcept { return links_; }
  Index size() const noexcept { return static_cast<Index>(links_.size()); }
  bool contains(Index j) const { return std::binary_search(links_.begin(), links_.end(), j); }

  friend bool operator==(const MonitoredSet&, const MonitoredSet&) = default;

 private:
  std::vector<Index> links_;
};

/// Observed counts on exactly the monitored links, aligned with
/// MonitoredSet::indices().
class FlowObservation {
 public:
  FlowObservation() = default;

  FlowObservation(const Network& net, const MonitoredSet& monitored,
                  const std::map<std::string, double>& values)
      : values_(monitored.size()) {
    for (const auto& [id, value] : values) {
      auto j = net.link_index(id);
      if (!j || !monitored.contains(*j)) {
        throw Error(Errc::UnmonitoredObservation,
                    "observation given for link '" + id + "' which is not monitored");
      }
      if (!std::isfinite(value)) {
        throw Error(Errc::SyntaxError, "observation for link '" + id + "' is not finite");
      }
      if (value < 0.0) {
        throw Error(Errc::NegativeCount, "observation for link '" + id + "' is negative");
      }
    }
    const auto& idx = monitored.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto& id = net.links()[idx[i]].id;
      auto it = values.find(id);
      if (it == values.end()) {
        throw Error(Errc::MissingObservation, "monitored link '" + id + "' has no observation");
      }
      values_(static_cast<Index>(i)) = it->second;
    }
  }

  const Vector& values() const noexcept { return values_; }

  bool all_integer() const {
    for (Index i = 0; i < values_.size(); ++i) {
      if (values_(i) != std::round(values_(i))) return false;
    }
    return true;
  }

  friend bool operator==(const FlowObservation& a, const FlowObservation& b) {
    return a.values_ == b.values_;
  }

 private:
  Vector values_;
};

/// The n x l node-link incidence matrix: +1 where the link enters the node,
/// -1 where it leaves.
struct IncidenceMatrix {
  Matrix entries;
  std::vector<std::string> node_ids;
  std::vector<std::string> link_ids;

  Index rows() const noexcept { return entries.rows(); }
  Index cols() const noexcept { return entries.cols(); }
};

inline IncidenceMatrix build_incidence(const Network& net) {
  const Index n = net.node_count();
  const Index l = net.link_count();
  if (l <= n) throw Error(Errc::DegenerateNetwork, "l <= n, the kernel is trivial");
  IncidenceMatrix a;
  a.entries = Matrix::Zero(n, l);
  a.node_ids = net.nodes();
  for (Index j = 0; j < l; ++j) {
    const Link& link = net.links()[j];
    a.link_ids.push_back(link.id);
    if (link.tail) a.entries(*net.node_index(*link.tail), j) = -1.0;
    if (link.head) a.entries(*net.node_index(*link.head), j) = 1.0;
  }
  const Index rank = matrix_rank(a.entries, kPivotTolerance);
  if (rank < n) {
    throw Error(Errc::RankDeficient,
                "incidence matrix has rank " + std::to_string(rank) + " < n=" + std::to_string(n) +
                    " (some group of nodes has no link to the outside)");
  }
  return a;
}

/// A * f, the per-node imbalance of a full link-flow vector.
inline Vector conservation_residual(const IncidenceMatrix& a, const Vector& f) {
  if (f.size() != a.cols()) {
    throw Error(Errc::DimensionMismatch, "flow vector length " + std::to_string(f.size()) +
                                             " != link count " + std::to_string(a.cols()));
  }
  return a.entries * f;
}

}  // namespace linkflow

#endif  // LINKFLOW_NETWORK_HPP
