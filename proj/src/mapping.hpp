#pragma once

// Set mappings J -> Phi(J). Every image is a single closed interval (or
// empty), so its indicator is trivially Riemann integrable, and for cells
// narrower than the contraction threshold eta the image lies inside J.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "core.hpp"
#include "expr.hpp"
#include "stieltjes.hpp"

namespace modsum {

enum class MapKind { GammaLeft, LengthPhi, WeightedTargetC, WeightedTargetD, LipschitzImage };
enum class Side { Right, Left };

const char* to_string(MapKind kind) noexcept;

struct Placement {
  enum class Kind { Left, Seeded };
  Kind kind = Kind::Left;
  std::uint64_t seed = 0;

  static Placement left() { return {}; }
  static Placement seeded(std::uint64_t s) { return {Kind::Seeded, s}; }
};

struct CellImage {
  Interval source;
  std::optional<Interval> image;  // nullopt = empty image
  double psi_len = 0.0;
  // Length requested by a length-only map (phi(alpha +- |J|)); equals the
  // image width otherwise.
  double nominal_length = 0.0;
  // Weighted-target maps: more than one sign change seen in the 64-point scan.
  bool multiple_roots = false;
};

class IntervalMap {
 public:
  struct GammaParams {
    double gamma;
  };
  struct LengthPhiParams {
    Expr phi;
    double alpha;
    Side side;
    Interval window;
    double derivative;  // one-sided rate lim phi(alpha +- h) / h
    double delta;       // sampled window where the difference quotient is within 0.1 of the rate
  };
  struct TargetParams {
    RealFunction lambda;
    double gamma;
    std::shared_ptr<const Weight> psi;       // weight the map was built against
    std::shared_ptr<const Weight> upsilon;   // indefinite integral of lambda*psi (kind D only)
  };
  struct LipschitzParams {
    RealFunction Lambda;
  };

  MapKind kind() const noexcept { return kind_; }
  double eta() const noexcept { return eta_; }
  const Placement& placement() const noexcept { return placement_; }
  // Limit factor: gamma for the gamma-kinds, the one-sided rate for
  // LengthPhi, 1 for LipschitzImage.
  double factor() const noexcept;
  std::string describe() const;

  const GammaParams* gamma_params() const { return std::get_if<GammaParams>(&params_); }
  const LengthPhiParams* length_phi_params() const { return std::get_if<LengthPhiParams>(&params_); }
  const TargetParams* target_params() const { return std::get_if<TargetParams>(&params_); }
  const LipschitzParams* lipschitz_params() const { return std::get_if<LipschitzParams>(&params_); }

  // Image of one cell; psi_len is measured with `w`. Throws cell-too-wide
  // when j.width() >= eta and no-root when a weighted target cannot be met.
  CellImage apply(const Weight& w, const Interval& j, std::size_t cell_index = 0) const;

  IntervalMap with_placement(Placement p) const;
  IntervalMap with_eta(double eta) const;

 private:
  using Params = std::variant<GammaParams, LengthPhiParams, TargetParams, LipschitzParams>;
  IntervalMap(MapKind kind, double eta, Params params) : kind_(kind), eta_(eta), params_(std::move(params)) {}

  Interval place(const Interval& j, double length, std::size_t cell_index) const;

  friend IntervalMap gamma_left(double, double);
  friend IntervalMap length_phi(const Expr&, double, Side, Interval, Placement);
  friend IntervalMap weighted_target_c(const RealFunction&, double, const Weight&);
  friend IntervalMap weighted_target_d(const RealFunction&, double, const Weight&);
  friend IntervalMap lipschitz_image(const RealFunction&);

  MapKind kind_;
  double eta_;
  Placement placement_;
  Params params_;
};

inline CellImage apply_map(const IntervalMap& m, const Weight& w, const Interval& j) { return m.apply(w, j); }

// Images [c, c + gamma*(d - c)]; requires 0 < gamma < 1.
IntervalMap gamma_left(double gamma, double eta);

// Images of length phi(alpha + |J|) (Right) or phi(alpha - |J|) (Left).
// `window` is the t-range on which phi(t) <= t - alpha (resp. alpha - t) is
// checked at 256 samples; it must start (Right) or end (Left) at alpha.
IntervalMap length_phi(const Expr& phi, double alpha, Side side, Interval window,
                       Placement placement = Placement::left());

// Image [c, c'] with lambda(c') * |[c, c']|_Psi = gamma * |J|_Psi.
IntervalMap weighted_target_c(const RealFunction& lambda, double gamma, const Weight& w);

// Image [c, c'] with |[c, c']|_Upsilon = gamma * |J|_Psi, Upsilon an
// indefinite integral of lambda * psi.
IntervalMap weighted_target_d(const RealFunction& lambda, double gamma, const Weight& w);

// Image [c, c + Lambda(d) - Lambda(c)] for nondecreasing 1-Lipschitz Lambda.
IntervalMap lipschitz_image(const RealFunction& Lambda);

// Bisection on a bracket with g(lo) * g(hi) <= 0, until the bracket is
// narrower than tol. Throws no-root otherwise.
double solve_monotone(const std::function<double(double)>& g, const Interval& bracket, double tol);

struct RootScan {
  double root = 0.0;
  int sign_changes = 0;
};

// Smallest root of g on the bracket: a 64-point scan locates the first sign
// change, bisection refines it.
RootScan smallest_root(const std::function<double(double)>& g, const Interval& bracket, double tol);

// Descriptor grammar:
//   gamma:<g>[:eta=<e>]
//   lengthphi:<expr in t>:alpha=<a>[:side=left][:window=<len>][:seed=<s>]
//   targetc:<lambda expr>:gamma=<g>
//   targetd:<lambda expr>:gamma=<g>
//   lipschitz:<Lambda expr>
IntervalMap parse_map(const std::string& descriptor, const Weight& w);

}  // namespace modsum
