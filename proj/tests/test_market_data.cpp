#include <doctest.h>

#include <cmath>
#include <random>

#include "opsel/errors.hpp"
#include "opsel/market_data.hpp"
#include "opsel/synth.hpp"
#include "test_support.hpp"

using namespace opsel;
using opsel::test::TempDir;
using opsel::test::write_file;

TEST_CASE("load_prices parses a well-formed file") {
  TempDir tmp("load");
  write_file(tmp.file("p.csv"),
             "date,AAA,BBB\n"
             "2001-01-01,100,50\n"
             "2001-01-02,110,45\n"
             "2001-01-03,121,54\n");
  const PriceMatrix p = load_prices(tmp.file("p.csv"));
  CHECK(p.days() == 3);
  CHECK(p.assets() == 2);
  CHECK(p.names()[0] == "AAA");
  CHECK(p.at(1, 1) == 45.0);
  CHECK(p.complete());
}

TEST_CASE("load_prices rejects bad content with coordinates") {
  TempDir tmp("load_bad");

  SUBCASE("non-positive price") {
    write_file(tmp.file("p.csv"), "date,A\n2001-01-01,0.0\n2001-01-02,1\n");
    CHECK_THROWS_WITH_AS(load_prices(tmp.file("p.csv")),
                         doctest::Contains("non-positive price at (row 1, col 1)"),
                         DataError);
  }
  SUBCASE("dates out of order") {
    write_file(tmp.file("p.csv"), "date,A\n2001-01-02,1\n2001-01-01,2\n");
    CHECK_THROWS_WITH_AS(load_prices(tmp.file("p.csv")),
                         doctest::Contains("dates not strictly increasing"), DataError);
  }
  SUBCASE("duplicate date") {
    write_file(tmp.file("p.csv"), "date,A\n2001-01-01,1\n2001-01-01,2\n");
    CHECK_THROWS_AS(load_prices(tmp.file("p.csv")), DataError);
  }
  SUBCASE("ragged row") {
    write_file(tmp.file("p.csv"), "date,A,B\n2001-01-01,1,2\n2001-01-02,1\n");
    CHECK_THROWS_WITH_AS(load_prices(tmp.file("p.csv")),
                         doctest::Contains("row 2"), DataError);
  }
  SUBCASE("unparseable number") {
    write_file(tmp.file("p.csv"), "date,A,B\n2001-01-01,1,2\n2001-01-02,1,x2\n");
    CHECK_THROWS_WITH_AS(load_prices(tmp.file("p.csv")),
                         doctest::Contains("unparseable number \"x2\" at (row 2, col 2)"),
                         DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_WITH_AS(load_prices(tmp.file("nope.csv")),
                         doctest::Contains("cannot open file"), DataError);
  }
  SUBCASE("missing header") {
    write_file(tmp.file("p.csv"), "2001-01-01,1\n2001-01-02,2\n");
    CHECK_THROWS_AS(load_prices(tmp.file("p.csv")), DataError);
  }
}

TEST_CASE("missing cells load as NA and block relatives") {
  TempDir tmp("na");
  write_file(tmp.file("p.csv"),
             "date,A,B\n"
             "2001-01-01,NA,1\n"
             "2001-01-02,2,1\n"
             "2001-01-03,3,1\n");
  const PriceMatrix p = load_prices(tmp.file("p.csv"));
  CHECK(p.missing(0, 0));
  CHECK_FALSE(p.missing(0, 1));
  CHECK_FALSE(p.complete());
  CHECK_THROWS_AS(to_relatives(p), DataError);

  SUBCASE("empty cell also counts as missing") {
    write_file(tmp.file("q.csv"), "date,A,B\n2001-01-01,,1\n2001-01-02,2,1\n");
    CHECK(load_prices(tmp.file("q.csv")).missing(0, 0));
  }
  SUBCASE("relatives files may not have holes") {
    write_file(tmp.file("r.csv"), "date,A\n2001-01-01,NA\n2001-01-02,1\n");
    CHECK_THROWS_WITH_AS(load_relatives(tmp.file("r.csv")),
                         doctest::Contains("missing value"), DataError);
  }
}

TEST_CASE("to_relatives divides consecutive rows") {
  const PriceMatrix p({"A", "B"}, {"d1", "d2"}, {100, 50, 110, 45});
  const RelativeMatrix r = to_relatives(p);
  REQUIRE(r.days() == 1);
  CHECK(r.at(0, 0) == doctest::Approx(1.10).epsilon(1e-12));
  CHECK(r.at(0, 1) == doctest::Approx(0.90).epsilon(1e-12));
}

TEST_CASE("to_relatives of constant prices is all ones") {
  const SynthSpec spec{SynthProcess::random_walk, 5, 3};
  const RelativeMatrix r = to_relatives(synth_market(spec, 7));
  REQUIRE(r.days() == 4);
  for (std::size_t t = 0; t < r.days(); ++t) {
    for (std::size_t j = 0; j < r.assets(); ++j) CHECK(r.at(t, j) == 1.0);
  }
}

TEST_CASE("to_relatives single column") {
  const PriceMatrix p({"A"}, {"d1", "d2", "d3"}, {2, 1, 2});
  const RelativeMatrix r = to_relatives(p);
  REQUIRE(r.days() == 2);
  CHECK(r.at(0, 0) == 0.5);
  CHECK(r.at(1, 0) == 2.0);
}

TEST_CASE("describe reports extremes and shape") {
  const RelativeMatrix one_row({"A", "B"}, {1.0, 1.0}, 1);
  const DatasetSummary s = describe(one_row, "tiny", "d1", "d1");
  CHECK(s.days == 1);
  CHECK(s.assets == 2);
  CHECK(s.max_relative == 1.0);
  CHECK(s.min_relative == 1.0);
}

TEST_CASE("describe extremes match a brute-force scan") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const RelativeMatrix r = opsel::test::random_relatives(rng, 40, 6, 0.5, 1.6);
    double lo = r.at(0, 0), hi = r.at(0, 0);
    for (std::size_t t = 0; t < r.days(); ++t) {
      for (std::size_t j = 0; j < r.assets(); ++j) {
        lo = std::min(lo, r.at(t, j));
        hi = std::max(hi, r.at(t, j));
      }
    }
    const DatasetSummary s = describe(r, "rand", "a", "b");
    CHECK(s.min_relative == lo);
    CHECK(s.max_relative == hi);
  }
}

TEST_CASE("split_universe sorts then chunks") {
  const PriceMatrix p({"D", "A", "C", "B"}, {"d1", "d2"}, {4, 1, 3, 2, 4, 1, 3, 2});

  SUBCASE("two groups") {
    const auto groups = split_universe(p, 2);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].names() == std::vector<std::string>{"A", "B"});
    CHECK(groups[1].names() == std::vector<std::string>{"C", "D"});
    CHECK(groups[0].at(0, 0) == 1.0);  // column data follows its asset
    CHECK(groups[1].at(0, 1) == 4.0);
  }
  SUBCASE("singletons") {
    const PriceMatrix q({"E", "B", "A", "D", "C"}, {"d1", "d2"},
                        std::vector<double>(10, 1.0));
    const auto groups = split_universe(q, 5);
    REQUIRE(groups.size() == 5);
    for (const auto& g : groups) CHECK(g.assets() == 1);
    CHECK(groups[0].names()[0] == "A");
    CHECK(groups[4].names()[0] == "E");
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(split_universe(p, 0), ValidationError);
    CHECK_THROWS_AS(split_universe(p, 5), ValidationError);
  }
}

TEST_CASE("split_universe group sizes are balanced and cover the universe") {
  std::mt19937_64 rng(3);
  for (std::size_t m : {3u, 7u, 10u, 389u}) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < m; ++j) names.push_back("T" + std::to_string(rng() % 100000) + "_" + std::to_string(j));
    const PriceMatrix p(names, {"d1", "d2"}, std::vector<double>(2 * m, 1.0));
    for (std::size_t k : {1u, 2u, 3u, 10u}) {
      if (k > m) continue;
      const auto groups = split_universe(p, k);
      std::size_t total = 0;
      std::size_t hi = 0, lo = m;
      std::vector<std::string> concatenated;
      for (const auto& g : groups) {
        total += g.assets();
        hi = std::max(hi, g.assets());
        lo = std::min(lo, g.assets());
        concatenated.insert(concatenated.end(), g.names().begin(), g.names().end());
      }
      CHECK(total == m);
      CHECK(hi - lo <= 1);
      CHECK(std::is_sorted(concatenated.begin(), concatenated.end(),
                           [](const std::string& a, const std::string& b) {
                             auto fold = [](const std::string& s) {
                               std::string t = s;
                               for (auto& c : t) c = static_cast<char>(std::tolower(c));
                               return t;
                             };
                             return fold(a) < fold(b);
                           }));
    }
  }
}

TEST_CASE("389 assets split ten ways gives nine groups of 39 and one of 38") {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < 389; ++j) {
    names.push_back("S" + std::to_string(1000 + j));
  }
  const PriceMatrix p(names, {"d1", "d2"}, std::vector<double>(2 * 389, 1.0));
  const auto groups = split_universe(p, 10);
  REQUIRE(groups.size() == 10);
  for (std::size_t g = 0; g < 9; ++g) CHECK(groups[g].assets() == 39);
  CHECK(groups[9].assets() == 38);
}

TEST_CASE("filter_by_listing drops late listings") {
  const double na = std::nan("");
  // Asset B has no data before the cutoff; C is complete; A is complete.
  const PriceMatrix p({"A", "B", "C"}, {"d1", "d2", "d3"},
                      {1, na, 3, 1, 2, 3, 1, 2, 3});

  SUBCASE("drops the incomplete column") {
    const PriceMatrix f = filter_by_listing(p, "d1");
    CHECK(f.names() == std::vector<std::string>{"A", "C"});
    CHECK(f.complete());
  }
  SUBCASE("identity when nothing is missing") {
    const PriceMatrix q({"A", "B"}, {"d1", "d2"}, {1, 2, 1, 2});
    const PriceMatrix f = filter_by_listing(q, "d1");
    CHECK(f.names() == q.names());
    CHECK(f.at(1, 1) == 2.0);
  }
  SUBCASE("all assets excluded") {
    const PriceMatrix q({"A", "B"}, {"d1", "d2"}, {na, na, 1, 2});
    CHECK_THROWS_WITH_AS(filter_by_listing(q, "d1"),
                         doctest::Contains("empty universe"), DataError);
  }
  SUBCASE("gaps after the cutoff are reported, not dropped") {
    const PriceMatrix q({"A", "B"}, {"d1", "d2", "d3"}, {1, 2, 1, na, 1, 2});
    CHECK_THROWS_WITH_AS(filter_by_listing(q, "d1"),
                         doctest::Contains("after the cutoff"), DataError);
  }
  SUBCASE("idempotent") {
    const PriceMatrix once = filter_by_listing(p, "d1");
    const PriceMatrix twice = filter_by_listing(once, "d1");
    CHECK(once.names() == twice.names());
    for (std::size_t r = 0; r < once.days(); ++r) {
      for (std::size_t j = 0; j < once.assets(); ++j) {
        CHECK(once.at(r, j) == twice.at(r, j));
      }
    }
  }
}

TEST_CASE("synth alternating market oscillates asset 0") {
  const SynthSpec spec{SynthProcess::alternating, 4, 2};
  const RelativeMatrix r = to_relatives(synth_market(spec, 0));
  REQUIRE(r.days() == 3);
  CHECK(r.at(0, 0) == 2.0);
  CHECK(r.at(0, 1) == 1.0);
  CHECK(r.at(1, 0) == 0.5);
  CHECK(r.at(1, 1) == 1.0);
  CHECK(r.at(2, 0) == 2.0);
}

TEST_CASE("synth markets are deterministic in (spec, seed)") {
  const SynthSpec spec{SynthProcess::random_walk, 30, 4, 100.0, 2.0, 0.5, 0.0002, 0.02};
  const PriceMatrix a = synth_market(spec, 99);
  const PriceMatrix b = synth_market(spec, 99);
  for (std::size_t r = 0; r < a.days(); ++r) {
    for (std::size_t j = 0; j < a.assets(); ++j) CHECK(a.at(r, j) == b.at(r, j));
  }
  const PriceMatrix c = synth_market(spec, 100);
  bool any_diff = false;
  for (std::size_t r = 0; r < a.days() && !any_diff; ++r) {
    for (std::size_t j = 0; j < a.assets(); ++j) any_diff |= a.at(r, j) != c.at(r, j);
  }
  CHECK(any_diff);
}

TEST_CASE("synth degenerate random walk stays constant") {
  const SynthSpec spec{SynthProcess::random_walk, 10, 2};
  const PriceMatrix p = synth_market(spec, 1);
  for (std::size_t r = 0; r < p.days(); ++r) {
    CHECK(p.at(r, 0) == 100.0);
    CHECK(p.at(r, 1) == 100.0);
  }
}

TEST_CASE("synth validation") {
  CHECK_THROWS_AS(synth_market(SynthSpec{SynthProcess::alternating, 1, 2}, 0),
                  ValidationError);
  CHECK_THROWS_AS(synth_market(SynthSpec{SynthProcess::alternating, 5, 0}, 0),
                  ValidationError);
  SynthSpec bad{SynthProcess::mean_reverting, 5, 2};
  bad.reversion = 1.5;
  CHECK_THROWS_AS(synth_market(bad, 0), ValidationError);
}

TEST_CASE("synth token grammar") {
  const SynthSpec spec = parse_synth_spec("synth:gbm:n=200,m=5,vol=0.02,drift=0.001");
  CHECK(spec.process == SynthProcess::random_walk);
  CHECK(spec.days == 200);
  CHECK(spec.assets == 5);
  CHECK(spec.vol == 0.02);
  CHECK(spec.drift == 0.001);
  CHECK_THROWS_AS(parse_synth_spec("synth:nope:n=2,m=2"), ValidationError);
  CHECK_THROWS_AS(parse_synth_spec("synth:gbm:m=2"), ValidationError);
  CHECK_THROWS_AS(parse_synth_spec("synth:gbm:n=2,m=2,junk=1"), ValidationError);
  CHECK(is_synth_token("synth:gbm:n=2,m=2"));
  CHECK_FALSE(is_synth_token("data/synth.csv"));
}

TEST_CASE("price csv round-trips bitwise through write and load") {
  TempDir tmp("roundtrip");
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    SynthSpec spec{SynthProcess::random_walk, 25, 3, 37.5, 2.0, 0.5, 0.0004, 0.03};
    const PriceMatrix p = synth_market(spec, rng());
    write_prices_csv(p, tmp.file("m.csv"));
    const PriceMatrix q = load_prices(tmp.file("m.csv"));
    const RelativeMatrix ra = to_relatives(p);
    const RelativeMatrix rb = to_relatives(q);
    REQUIRE(ra.days() == rb.days());
    for (std::size_t t = 0; t < ra.days(); ++t) {
      for (std::size_t j = 0; j < ra.assets(); ++j) {
        CHECK(ra.at(t, j) == rb.at(t, j));
      }
    }
  }
}

TEST_CASE("missing cells survive a write and reload") {
  TempDir tmp("na_roundtrip");
  const double na = std::nan("");
  const PriceMatrix p({"A", "B"}, {"d1", "d2", "d3"}, {na, 1, 2, 1, 3, 1});
  write_prices_csv(p, tmp.file("na.csv"));
  const PriceMatrix q = load_prices(tmp.file("na.csv"));
  CHECK(q.missing(0, 0));
  CHECK_FALSE(q.missing(1, 0));
  CHECK(q.at(2, 0) == 3.0);
}

TEST_CASE("load_dataset wires prices and relatives together") {
  TempDir tmp("dataset");
  write_file(tmp.file("x.csv"), "date,A\n2001-01-01,2\n2001-01-02,1\n2001-01-03,2\n");

  const DatasetFile as_prices = load_dataset(tmp.file("x.csv"), InputKind::prices);
  CHECK(as_prices.name == "x");
  CHECK(as_prices.prices.has_value());
  CHECK(as_prices.relatives.days() == 2);
  CHECK(as_prices.relatives.at(0, 0) == 0.5);

  const DatasetFile as_relatives = load_dataset(tmp.file("x.csv"), InputKind::relatives);
  CHECK_FALSE(as_relatives.prices.has_value());
  CHECK(as_relatives.relatives.days() == 3);
  CHECK(as_relatives.relatives.at(0, 0) == 2.0);
}
