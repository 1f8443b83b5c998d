#include <doctest.h>

#include "bercow/netmodel.hpp"

using namespace bercow;

TEST_CASE("bundled topology") {
  auto topo = load_bundled_ethereum80();
  CHECK(topo.node_count() == 80);
  auto worst = topo.max_delay();
  CHECK(worst.delay == 296'000);
  CHECK(((worst.from == "Canberra" && worst.to == "Oulu") || (worst.from == "Oulu" && worst.to == "Canberra")));
  for (std::size_t i = 0; i < topo.cities().size(); ++i) {
    CHECK(topo.delay(i, i) == topo.intra_city());
    for (std::size_t j = 0; j < topo.cities().size(); ++j) CHECK(topo.delay(i, j) >= 0);
  }
}

TEST_CASE("observations stay within [T, T + dnet]") {
  LatencyModel net(load_bundled_ethereum80(), 300'000);
  auto inv = Invocation::at("x", 1'000'000);
  for (const auto& city : net.topology().cities()) {
    Rng rng(1);
    auto obs = net.observe(inv, city.name, rng);
    CHECK(obs.timestamps.size() == 80);
    CHECK(obs.clamped == 0);
    for (const auto& ts : obs.timestamps) {
      CHECK(ts.timestamp >= inv.invoke_time);
      CHECK(ts.timestamp <= inv.invoke_time + 300'000);
    }
  }
}

TEST_CASE("raw delays beyond dnet are clamped and counted") {
  LatencyModel net(load_bundled_ethereum80(), 100'000);
  Rng rng(1);
  auto inv = Invocation::at("x", 0);
  auto obs = net.observe(inv, "Canberra", rng);
  CHECK(obs.clamped > 0);
  for (const auto& ts : obs.timestamps) CHECK(ts.timestamp <= 100'000);
}

TEST_CASE("zero latency topology gives T everywhere") {
  auto topo = CityTopology::single_city("Here", 4, 0);
  LatencyModel net(topo, 300'000);
  Rng rng(3);
  auto obs = net.observe(Invocation::at("x", 777), "Here", rng);
  for (const auto& ts : obs.timestamps) CHECK(ts.timestamp == 777);
  CHECK_THROWS_AS(net.observe(Invocation::at("x", 0), "Elsewhere", rng), Error);
}

TEST_CASE("jitter and drift are deterministic per seed and still clamped") {
  DelayModel delays{20'000, 5'000};
  Rng drift_a(9), drift_b(9);
  LatencyModel a(load_bundled_ethereum80(), delays, 300'000, drift_a);
  LatencyModel b(load_bundled_ethereum80(), delays, 300'000, drift_b);
  auto inv = Invocation::at("x", 50'000);
  Rng ra(4), rb(4);
  auto oa = a.observe(inv, "Tokyo", ra);
  auto ob = b.observe(inv, "Tokyo", rb);
  for (std::size_t i = 0; i < oa.timestamps.size(); ++i) {
    CHECK(oa.timestamps[i].timestamp == ob.timestamps[i].timestamp);
    CHECK(oa.timestamps[i].timestamp >= 50'000);
    CHECK(oa.timestamps[i].timestamp <= 350'000);
  }
}

TEST_CASE("topology parsing") {
  auto t = parse_topology("intra 2\ncity A 2\ncity B 1\ndelay A B 10 # one way\n");
  CHECK(t.node_count() == 3);
  CHECK(t.delay(t.city_index("B"), t.city_index("A")) == 10'000);
  CHECK(t.delay(0, 0) == 2'000);
  CHECK(t.nearest_nodes("A", 2).size() == 2);
  CHECK(t.city_of(t.nearest_nodes("B", 1)[0]) == "B");

  CHECK_THROWS_AS(parse_topology(""), Error);
  CHECK_THROWS_AS(parse_topology("city A 1\ncity B 1\n"), Error);
  CHECK_THROWS_AS(parse_topology("city A 1\ncity B 1\ndelay A B -4\n"), Error);
  CHECK_THROWS_AS(parse_topology("city A 1\nfrobnicate\n"), Error);
  CHECK_THROWS_AS(parse_topology("city A 1\ncity A 2\n"), Error);
  CHECK_THROWS_AS(load_topology("/nonexistent/file.topo"), Error);

  auto asym = parse_topology("city A 1\ncity B 1\ndelay A B 10\ndelay B A 12\n");
  CHECK_FALSE(asym.warnings().empty());

  auto single = CityTopology::single_city("Solo", 5, 3);
  for (NodeId i = 0; i < 5; ++i) CHECK(single.delay_to_node(0, i) == 3'000);
}
