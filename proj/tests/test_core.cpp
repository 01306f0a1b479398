#include <cmath>
#include <random>

#include "core.hpp"
#include "doctest.h"

using namespace modsum;

namespace {

bool within_ulps(double a, double b, int ulps) {
  return std::fabs(a - b) <= ulps * std::numeric_limits<double>::epsilon() * std::max(std::fabs(a), std::fabs(b));
}

Partition random_partition(std::mt19937_64& rng, const Interval& base, std::size_t interior) {
  std::uniform_real_distribution<double> u(base.lo, base.hi);
  std::vector<double> x{base.lo, base.hi};
  for (std::size_t i = 0; i < interior; ++i) x.push_back(u(rng));
  std::sort(x.begin(), x.end());
  return Partition(base, std::move(x));
}

}  // namespace

TEST_CASE("uniform_partition examples") {
  const auto p = uniform_partition({0.0, 1.0}, 4);
  const std::vector<double> expect{0.0, 0.25, 0.5, 0.75, 1.0};
  CHECK(std::vector<double>(p.breakpoints().begin(), p.breakpoints().end()) == expect);

  const auto single = uniform_partition({2.0, 2.5}, 1);
  CHECK(single.size() == 1);
  CHECK(single.cell(0) == Interval(2.0, 2.5));

  const auto thirds = uniform_partition({0.0, 1.0}, 3);
  CHECK(within_ulps(thirds.mesh(), 1.0 / 3.0, 1));
  CHECK(thirds.breakpoints().back() == 1.0);

  CHECK_THROWS_AS(uniform_partition({0.0, 1.0}, 0), Error);
}

TEST_CASE("uniform cells have width |I|/n up to one ulp and the last breakpoint is exact") {
  for (std::size_t n : {1u, 3u, 7u, 10u, 1000u, 4097u}) {
    const Interval base(-0.3, 2.7);
    const auto p = uniform_partition(base, n);
    CHECK(p.breakpoints().back() == base.hi);
    const double w = base.width() / static_cast<double>(n);
    for (std::size_t k = 0; k < p.size(); ++k)
      CHECK(std::fabs(p.cell(k).width() - w) <= 2.0 * std::numeric_limits<double>::epsilon() * 2.7);
  }
}

TEST_CASE("common_refinement examples") {
  const Interval I(0.0, 1.0);
  const Partition p(I, {0.0, 0.5, 1.0});
  const Partition q(I, {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
  const auto r = common_refinement(p, q);
  const std::vector<double> expect{0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0};
  CHECK(std::vector<double>(r.breakpoints().begin(), r.breakpoints().end()) == expect);
  CHECK(r.refines(p));
  CHECK(r.refines(q));
  CHECK(r.mesh() <= std::min(p.mesh(), q.mesh()));

  CHECK(common_refinement(p, p) == p);
  CHECK(common_refinement(uniform_partition(I, 2), uniform_partition(I, 4)) == uniform_partition(I, 4));

  CHECK_THROWS_AS(common_refinement(p, uniform_partition({0.0, 2.0}, 2)), Error);
}

TEST_CASE("partition rejects degenerate and malformed breakpoints") {
  const Interval I(0.0, 1.0);
  CHECK_THROWS_AS(Partition(I, {0.0, 0.5}), Error);
  CHECK_THROWS_AS(Partition(I, {0.0, 0.6, 0.5, 1.0}), Error);
  CHECK_THROWS_AS(Partition(I, {0.0, 0.5, std::nextafter(0.5, 1.0), 1.0}), Error);
  CHECK(Partition(I, {0.0, 0.5, 0.5, 1.0}).size() == 2);
  CHECK_THROWS_AS(Interval(1.0, 0.0), Error);
  CHECK_THROWS_AS(Interval(0.0, INFINITY), Error);
}

TEST_CASE("refinement is commutative and associative; widths sum to |I|") {
  std::mt19937_64 rng(2024);
  const Interval I(-1.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_partition(rng, I, 1 + trial % 7);
    const auto b = random_partition(rng, I, 2 + trial % 5);
    const auto c = random_partition(rng, I, 3);
    CHECK(common_refinement(a, b) == common_refinement(b, a));
    CHECK(common_refinement(common_refinement(a, b), c) == common_refinement(a, common_refinement(b, c)));

    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) total += a.cell(k).width();
    CHECK(std::fabs(total - I.width()) <= a.size() * std::numeric_limits<double>::epsilon() * 4.0);
  }
}

TEST_CASE("sample_point examples") {
  CHECK(sample_point(SamplePointRule::mid(), 0, {0.0, 1.0}) == 0.5);
  CHECK(sample_point(SamplePointRule::left(), 3, {0.2, 0.4}) == 0.2);
  CHECK(sample_point(SamplePointRule::right(), 3, {0.2, 0.4}) == 0.4);
  const double first = sample_point(SamplePointRule::seeded(7), 3, {0.2, 0.4});
  CHECK(sample_point(SamplePointRule::seeded(7), 3, {0.2, 0.4}) == first);
  CHECK(sample_point(SamplePointRule::seeded(8), 3, {0.2, 0.4}) != first);
}

TEST_CASE("sample_point always lands inside its cell") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_real_distribution<double> width(0.0, 5.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const double lo = u(rng);
    const Interval cell(lo, lo + width(rng) * (trial % 3 == 0 ? 1e-12 : 1.0));
    const SamplePointRule rule = SamplePointRule::seeded(rng());
    const double x = sample_point(rule, static_cast<std::size_t>(trial), cell);
    REQUIRE(cell.contains(x));
  }
}

TEST_CASE("parse_rule") {
  CHECK(parse_rule("left") == SamplePointRule::left());
  CHECK(parse_rule("seeded:42") == SamplePointRule::seeded(42));
  CHECK(to_string(parse_rule("seeded:42")) == "seeded:42");
  CHECK_THROWS_AS(parse_rule("seeded:"), Error);
  CHECK_THROWS_AS(parse_rule("middle"), Error);
}

TEST_CASE("pairwise_sum is exact on representable data and independent of worker count") {
  std::vector<double> ones(1000, 0.125);
  CHECK(pairwise_sum(ones) == 125.0);
  CHECK(pairwise_sum(std::span<const double>()) == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> terms(100000);
  for (auto& t : terms) t = u(rng);
  const double serial = pairwise_sum(terms);

  std::vector<double> filled(terms.size());
  set_thread_count(4);
  parallel_for(terms.size(), [&](std::size_t i) { filled[i] = terms[i]; });
  set_thread_count(0);
  CHECK(pairwise_sum(filled) == serial);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  set_thread_count(4);
  CHECK_THROWS_AS(parallel_for(10000, [](std::size_t i) {
                    if (i == 7777) fail(ErrorCode::DomainError, "boom");
                  }),
                  Error);
  set_thread_count(0);
}
