// Geo-distributed latency model: city topology, delay perturbation and the
// per-node receive timestamps each invocation produces.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bercow/domain.hpp"
#include "bercow/rng.hpp"

namespace bercow {

struct City {
  std::string name;
  std::size_t node_count = 0;
};

class CityTopology {
 public:
  /// Validates counts and delays; fills missing pairs from the reverse
  /// direction. Throws Error(parse) on anything inconsistent.
  CityTopology(std::vector<City> cities, std::map<std::pair<std::string, std::string>, double> delays_ms,
               double intra_city_ms);

  const std::vector<City>& cities() const { return cities_; }
  std::size_t node_count() const { return node_city_.size(); }
  std::size_t city_index(std::string_view name) const;
  bool has_city(std::string_view name) const;
  const std::string& city_of(NodeId node) const { return cities_[node_city_.at(node)].name; }

  /// One-way base delay in microseconds between two cities.
  Micros delay(std::size_t from_city, std::size_t to_city) const {
    return matrix_[from_city * cities_.size() + to_city];
  }
  Micros delay_to_node(std::size_t from_city, NodeId node) const {
    return delay(from_city, node_city_[node]);
  }
  Micros intra_city() const { return intra_; }

  struct MaxDelay {
    std::string from, to;
    Micros delay = 0;
  };
  MaxDelay max_delay() const;

  /// The `count` nodes with the lowest base delay from `city` (ties by id).
  std::vector<NodeId> nearest_nodes(std::string_view city, std::size_t count) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Single-city topology (every delay equals intra_city_ms).
  static CityTopology single_city(std::string name, std::size_t nodes, double intra_city_ms);

 private:
  std::vector<City> cities_;
  std::vector<std::size_t> node_city_;
  std::vector<Micros> matrix_;
  Micros intra_ = 0;
  std::vector<std::string> warnings_;
};

/// Parses the line-oriented topology format:
///   intra <ms>
///   city <name> <node_count>
///   delay <cityA> <cityB> <ms>
CityTopology parse_topology(std::string_view text);
CityTopology load_topology(const std::filesystem::path& path);

/// Directory holding bundled topologies; $BERCOW_TOPOLOGY_DIR overrides.
std::filesystem::path default_topology_dir();
CityTopology load_bundled_ethereum80();

struct DelayModel {
  Micros jitter = 0;           // uniform in [-jitter, +jitter]; 0 = none
  Micros clock_drift_max = 0;  // per-node fixed offset in [-max, +max]
};

struct Observation {
  std::vector<NodeTimestamp> timestamps;  // one per node, ordered by node id
  std::size_t clamped = 0;                // raw values outside [T, T + dnet]
};

/// Topology plus perturbations, with per-node clock offsets fixed at
/// construction.
class LatencyModel {
 public:
  LatencyModel(CityTopology topology, DelayModel delays, Micros dnet, Rng& drift_rng);
  LatencyModel(CityTopology topology, Micros dnet);  // no jitter, no drift

  const CityTopology& topology() const { return topology_; }
  Micros dnet() const { return dnet_; }
  std::size_t node_count() const { return topology_.node_count(); }

  /// Receive timestamps T + delay + jitter + drift, clamped to [T, T + dnet].
  Observation observe(const Invocation& inv, std::string_view origin_city, Rng& rng) const;

 private:
  CityTopology topology_;
  DelayModel delays_;
  Micros dnet_ = 0;
  std::vector<Micros> drift_;
};

}  // namespace bercow
