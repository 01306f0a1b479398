#include "core.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace modsum {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::UnknownIdentifier: return "unknown-identifier";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::HypothesisViolation: return "hypothesis-violation";
    case ErrorCode::CellTooWide: return "cell-too-wide";
    case ErrorCode::NoRoot: return "no-root";
    case ErrorCode::ScheduleTooCoarse: return "schedule-too-coarse";
    case ErrorCode::DerivativeDisagreement: return "derivative-disagreement";
  }
  return "unknown";
}

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  require(std::isfinite(lo) && std::isfinite(hi), "interval bounds must be finite");
  require(lo <= hi, "interval requires lo <= hi, got " + to_string(*this));
}

std::string to_string(const Interval& j) {
  std::ostringstream os;
  os.precision(17);
  os << '[' << j.lo << ", " << j.hi << ']';
  return os.str();
}

Partition::Partition(Interval base, std::vector<double> breakpoints)
    : base_(base), breakpoints_(std::move(breakpoints)) {
  require(base_.width() > 0.0, "partition base must have positive width");
  require(breakpoints_.size() >= 2, "partition needs at least two breakpoints");
  require(breakpoints_.front() == base_.lo && breakpoints_.back() == base_.hi,
          "partition breakpoints must start at base.lo and end at base.hi");
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
  require(breakpoints_.size() >= 2, "partition needs at least one cell");

  const double min_gap = 1e-15 * base_.width();
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
    const double w = breakpoints_[k + 1] - breakpoints_[k];
    require(std::isfinite(breakpoints_[k]), "partition breakpoints must be finite");
    require(w > 0.0, "partition breakpoints must be increasing");
    require(w >= min_gap, "degenerate cell narrower than 1e-15*|I| at index " + std::to_string(k));
    mesh_ = std::max(mesh_, w);
  }
}

bool Partition::refines(const Partition& coarser) const {
  if (!(coarser.base_ == base_)) return false;
  return std::includes(breakpoints_.begin(), breakpoints_.end(), coarser.breakpoints_.begin(),
                       coarser.breakpoints_.end());
}

Partition uniform_partition(const Interval& base, std::size_t n) {
  require(n >= 1, "uniform_partition requires n >= 1");
  std::vector<double> x(n + 1);
  const double w = base.width();
  for (std::size_t k = 0; k < n; ++k) x[k] = base.lo + w * static_cast<double>(k) / static_cast<double>(n);
  x[n] = base.hi;
  return Partition(base, std::move(x));
}

Partition common_refinement(const Partition& p, const Partition& q) {
  require(p.base() == q.base(), "common_refinement requires identical base intervals");
  std::vector<double> merged;
  merged.reserve(p.breakpoints().size() + q.breakpoints().size());
  std::merge(p.breakpoints().begin(), p.breakpoints().end(), q.breakpoints().begin(), q.breakpoints().end(),
             std::back_inserter(merged));
  return Partition(p.base(), std::move(merged));
}

std::string to_string(const SamplePointRule& rule) {
  switch (rule.kind) {
    case SamplePointRule::Kind::Left: return "left";
    case SamplePointRule::Kind::Right: return "right";
    case SamplePointRule::Kind::Mid: return "mid";
    case SamplePointRule::Kind::Seeded: return "seeded:" + std::to_string(rule.seed);
  }
  return "mid";
}

SamplePointRule parse_rule(const std::string& text) {
  if (text == "left") return SamplePointRule::left();
  if (text == "right") return SamplePointRule::right();
  if (text == "mid") return SamplePointRule::mid();
  if (text.rfind("seeded:", 0) == 0) {
    const std::string digits = text.substr(7);
    require(!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos,
            "seeded rule expects a non-negative integer seed, got '" + digits + "'");
    return SamplePointRule::seeded(std::stoull(digits));
  }
  fail(ErrorCode::InvalidArgument, "unknown sample rule '" + text + "' (expected left|right|mid|seeded:<int>)");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

double sample_point(const SamplePointRule& rule, std::size_t cell_index, const Interval& cell) {
  switch (rule.kind) {
    case SamplePointRule::Kind::Left: return cell.lo;
    case SamplePointRule::Kind::Right: return cell.hi;
    case SamplePointRule::Kind::Mid: return std::clamp(cell.lo + 0.5 * cell.width(), cell.lo, cell.hi);
    case SamplePointRule::Kind::Seeded: break;
  }
  std::uint64_t h = splitmix64(rule.seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(cell_index));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(cell.lo));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(cell.hi));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return std::clamp(cell.lo + u * cell.width(), cell.lo, cell.hi);
}

double pairwise_sum(std::span<const double> terms) {
  constexpr std::size_t kBlock = 8;
  if (terms.size() <= kBlock) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

namespace {

std::atomic<unsigned> g_thread_override{0};

unsigned automatic_threads() {
  if (const char* env = std::getenv("MODSUM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void set_thread_count(unsigned n) { g_thread_override.store(n); }

unsigned thread_count() {
  const unsigned n = g_thread_override.load();
  return n > 0 ? n : automatic_threads();
}

}  // namespace modsum
