#include "bercow/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#ifndef BERCOW_DEFAULT_DATA_DIR
#define BERCOW_DEFAULT_DATA_DIR "data"
#endif

namespace bercow {

namespace {

Micros ms_to_micros(double ms) { return static_cast<Micros>(std::llround(ms * 1000.0)); }

}  // namespace

CityTopology::CityTopology(std::vector<City> cities,
                           std::map<std::pair<std::string, std::string>, double> delays_ms,
                           double intra_city_ms)
    : cities_(std::move(cities)) {
  if (cities_.empty()) fail(ErrorCategory::parse, "topology has no cities");
  if (intra_city_ms < 0) fail(ErrorCategory::parse, "negative intra-city delay");
  intra_ = ms_to_micros(intra_city_ms);

  std::set<std::string> names;
  for (std::size_t c = 0; c < cities_.size(); ++c) {
    if (!names.insert(cities_[c].name).second) {
      fail(ErrorCategory::parse, "duplicate city " + cities_[c].name);
    }
    if (cities_[c].node_count == 0) fail(ErrorCategory::parse, "city " + cities_[c].name + " has no nodes");
    node_city_.insert(node_city_.end(), cities_[c].node_count, c);
  }
  for (const auto& [pair, ms] : delays_ms) {
    if (!names.count(pair.first) || !names.count(pair.second)) {
      fail(ErrorCategory::parse, "delay references unknown city " + pair.first + "/" + pair.second);
    }
    if (ms < 0) fail(ErrorCategory::parse, "negative delay " + pair.first + "->" + pair.second);
  }

  const std::size_t k = cities_.size();
  matrix_.assign(k * k, 0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) {
        matrix_[a * k + b] = intra_;
        continue;
      }
      auto fwd = delays_ms.find({cities_[a].name, cities_[b].name});
      auto rev = delays_ms.find({cities_[b].name, cities_[a].name});
      if (fwd == delays_ms.end() && rev == delays_ms.end()) {
        fail(ErrorCategory::parse, "missing delay " + cities_[a].name + " <-> " + cities_[b].name);
      }
      if (fwd != delays_ms.end() && rev != delays_ms.end() && fwd->second != rev->second && a < b) {
        warnings_.push_back("asymmetric delay " + cities_[a].name + " <-> " + cities_[b].name);
        std::clog << "warning: " << warnings_.back() << "\n";
      }
      matrix_[a * k + b] = ms_to_micros(fwd != delays_ms.end() ? fwd->second : rev->second);
    }
  }
}

CityTopology CityTopology::single_city(std::string name, std::size_t nodes, double intra_city_ms) {
  return CityTopology({{std::move(name), nodes}}, {}, intra_city_ms);
}

std::size_t CityTopology::city_index(std::string_view name) const {
  for (std::size_t c = 0; c < cities_.size(); ++c) {
    if (cities_[c].name == name) return c;
  }
  fail(ErrorCategory::config, "unknown city " + std::string(name));
}

bool CityTopology::has_city(std::string_view name) const {
  return std::any_of(cities_.begin(), cities_.end(), [&](const City& c) { return c.name == name; });
}

CityTopology::MaxDelay CityTopology::max_delay() const {
  MaxDelay best{cities_[0].name, cities_[0].name, intra_};
  for (std::size_t a = 0; a < cities_.size(); ++a) {
    for (std::size_t b = 0; b < cities_.size(); ++b) {
      if (delay(a, b) > best.delay) best = {cities_[a].name, cities_[b].name, delay(a, b)};
    }
  }
  return best;
}

std::vector<NodeId> CityTopology::nearest_nodes(std::string_view city, std::size_t count) const {
  require(count <= node_count(), "asked for more nodes than the topology has");
  auto origin = city_index(city);
  std::vector<NodeId> ids(node_count());
  std::iota(ids.begin(), ids.end(), NodeId{0});
  std::stable_sort(ids.begin(), ids.end(), [&](NodeId x, NodeId y) {
    return delay_to_node(origin, x) < delay_to_node(origin, y);
  });
  ids.resize(count);
  return ids;
}

CityTopology parse_topology(std::string_view text) {
  std::vector<City> cities;
  std::map<std::pair<std::string, std::string>, double> delays;
  double intra = 1.0;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string keyword;
    if (!(fields >> keyword)) continue;
    auto where = "line " + std::to_string(lineno) + ": ";
    if (keyword == "city") {
      std::string name;
      long long count = -1;
      if (!(fields >> name >> count) || count <= 0) {
        fail(ErrorCategory::parse, where + "expected `city <name> <node_count>`");
      }
      cities.push_back({name, static_cast<std::size_t>(count)});
    } else if (keyword == "delay") {
      std::string a, b;
      double ms = 0;
      if (!(fields >> a >> b >> ms)) fail(ErrorCategory::parse, where + "expected `delay <a> <b> <ms>`");
      if (ms < 0) fail(ErrorCategory::parse, where + "negative latency");
      delays[{a, b}] = ms;
    } else if (keyword == "intra") {
      if (!(fields >> intra)) fail(ErrorCategory::parse, where + "expected `intra <ms>`");
    } else {
      fail(ErrorCategory::parse, where + "unknown keyword `" + keyword + "`");
    }
    std::string extra;
    if (fields >> extra) fail(ErrorCategory::parse, where + "trailing token `" + extra + "`");
  }
  return CityTopology(std::move(cities), std::move(delays), intra);
}

CityTopology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open topology " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_topology(buf.str());
  } catch (const Error& e) {
    fail(e.category(), path.string() + ": " + e.what());
  }
}

std::filesystem::path default_topology_dir() {
  if (const char* env = std::getenv("BERCOW_TOPOLOGY_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return BERCOW_DEFAULT_DATA_DIR;
}

CityTopology load_bundled_ethereum80() { return load_topology(default_topology_dir() / "ethereum80.topo"); }

LatencyModel::LatencyModel(CityTopology topology, DelayModel delays, Micros dnet, Rng& drift_rng)
    : topology_(std::move(topology)), delays_(delays), dnet_(dnet) {
  require(dnet >= 0, "dnet must be non-negative");
  require(delays.jitter >= 0 && delays.clock_drift_max >= 0, "negative jitter or drift bound");
  drift_.resize(topology_.node_count(), 0);
  if (delays_.clock_drift_max > 0) {
    for (auto& d : drift_) d = drift_rng.between(-delays_.clock_drift_max, delays_.clock_drift_max);
  }
}

LatencyModel::LatencyModel(CityTopology topology, Micros dnet)
    : topology_(std::move(topology)), dnet_(dnet) {
  require(dnet >= 0, "dnet must be non-negative");
  drift_.resize(topology_.node_count(), 0);
}

Observation LatencyModel::observe(const Invocation& inv, std::string_view origin_city, Rng& rng) const {
  auto origin = topology_.city_index(origin_city);
  const Micros t = inv.invoke_time;
  Observation obs;
  obs.timestamps.reserve(node_count());
  for (NodeId node = 0; node < node_count(); ++node) {
    Micros raw = t + topology_.delay_to_node(origin, node) + drift_[node];
    if (delays_.jitter > 0) raw += rng.between(-delays_.jitter, delays_.jitter);
    Micros clamped = std::clamp(raw, t, t + dnet_);
    if (clamped != raw) ++obs.clamped;
    obs.timestamps.push_back({node, clamped});
  }
  return obs;
}

}  // namespace bercow
