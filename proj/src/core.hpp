#pragma once

// Intervals, partitions, sample-point rules and the deterministic reduction
// and parallel-for helpers every sum in the library is built on.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "error.hpp"

namespace modsum {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double lo_, double hi_);  // validates finiteness and lo <= hi

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool contains(const Interval& j) const noexcept { return lo <= j.lo && j.hi <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

std::string to_string(const Interval& j);

class Partition {
 public:
  // Breakpoints must be nondecreasing, start at base.lo and end at base.hi.
  // Exact duplicates are merged; distinct points closer than
  // 1e-15 * base.width() are rejected.
  Partition(Interval base, std::vector<double> breakpoints);

  const Interval& base() const noexcept { return base_; }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::size_t size() const noexcept { return breakpoints_.size() - 1; }
  Interval cell(std::size_t k) const { return {breakpoints_[k], breakpoints_[k + 1]}; }
  double mesh() const noexcept { return mesh_; }

  // True when every breakpoint of `coarser` is also a breakpoint here.
  bool refines(const Partition& coarser) const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.base_ == b.base_ && a.breakpoints_ == b.breakpoints_;
  }

 private:
  Interval base_;
  std::vector<double> breakpoints_;
  double mesh_ = 0.0;
};

Partition uniform_partition(const Interval& base, std::size_t n);
Partition common_refinement(const Partition& p, const Partition& q);

struct SamplePointRule {
  enum class Kind { Left, Right, Mid, Seeded };
  Kind kind = Kind::Mid;
  std::uint64_t seed = 0;

  static SamplePointRule left() { return {Kind::Left, 0}; }
  static SamplePointRule right() { return {Kind::Right, 0}; }
  static SamplePointRule mid() { return {Kind::Mid, 0}; }
  static SamplePointRule seeded(std::uint64_t s) { return {Kind::Seeded, s}; }

  friend bool operator==(const SamplePointRule&, const SamplePointRule&) = default;
};

std::string to_string(const SamplePointRule& rule);
SamplePointRule parse_rule(const std::string& text);

double sample_point(const SamplePointRule& rule, std::size_t cell_index, const Interval& cell);

// Fixed-shape pairwise summation. The split points depend only on the
// length of the input, so the result is bit-reproducible.
double pairwise_sum(std::span<const double> terms);

// Worker count: MODSUM_THREADS (0 or unset = hardware concurrency) unless
// overridden by set_thread_count. A value of 0 restores the automatic choice.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Work is split into contiguous chunks; the
// first exception (in index order) is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  constexpr std::size_t kMinParallel = 2048;
  const unsigned workers = thread_count();
  if (workers <= 1 || n < kMinParallel) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n / (kMinParallel / 2));
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      pool.emplace_back([&, c] {
        const std::size_t begin = n * c / chunks;
        const std::size_t end = n * (c + 1) / chunks;
        try {
          for (std::size_t i = begin; i < end; ++i) body(i);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace modsum
