#include "mapping.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

namespace modsum {

namespace {

constexpr std::size_t kHypothesisSamples = 256;
constexpr double kDerivativeStep = 1e-6;
constexpr double kDerivativeCheckStep = 1e-7;
constexpr double kDerivativeAgreement = 1e-4;
constexpr double kDeltaTolerance = 0.1;
constexpr double kRootTolerance = 1e-13;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

[[noreturn]] void violated(const std::string& what) { fail(ErrorCode::HypothesisViolation, what); }

// Automatic-contraction kinds accept every cell of the base interval,
// including the single-cell partition.
double automatic_eta(const Interval& base) { return 2.0 * base.width(); }

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

const char* to_string(MapKind kind) noexcept {
  switch (kind) {
    case MapKind::GammaLeft: return "gamma";
    case MapKind::LengthPhi: return "lengthphi";
    case MapKind::WeightedTargetC: return "targetc";
    case MapKind::WeightedTargetD: return "targetd";
    case MapKind::LipschitzImage: return "lipschitz";
  }
  return "unknown";
}

double IntervalMap::factor() const noexcept {
  if (const auto* g = gamma_params()) return g->gamma;
  if (const auto* p = length_phi_params()) return p->derivative;
  if (const auto* t = target_params()) return t->gamma;
  return 1.0;
}

std::string IntervalMap::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_) << ':';
  if (const auto* g = gamma_params()) {
    os << g->gamma;
  } else if (const auto* p = length_phi_params()) {
    os << p->phi.str() << ":alpha=" << p->alpha;
    if (p->side == Side::Left) os << ":side=left";
    os << ":window=" << p->window.width();
    if (placement_.kind == Placement::Kind::Seeded) os << ":seed=" << placement_.seed;
  } else if (const auto* t = target_params()) {
    os << t->lambda.label() << ":gamma=" << t->gamma;
  } else if (const auto* l = lipschitz_params()) {
    os << l->Lambda.label();
  }
  return os.str();
}

IntervalMap IntervalMap::with_placement(Placement p) const {
  IntervalMap copy = *this;
  copy.placement_ = p;
  return copy;
}

IntervalMap IntervalMap::with_eta(double eta) const {
  require(eta > 0.0 && std::isfinite(eta), "eta must be positive and finite");
  IntervalMap copy = *this;
  copy.eta_ = eta;
  return copy;
}

Interval IntervalMap::place(const Interval& j, double length, std::size_t cell_index) const {
  double start = j.lo;
  if (placement_.kind == Placement::Kind::Seeded) {
    const double slack = std::max(0.0, j.width() - length);
    start = sample_point(SamplePointRule::seeded(placement_.seed), cell_index, Interval(j.lo, j.lo + slack));
  }
  const double end = std::min(start + length, j.hi);
  return {std::min(start, end), end};
}

CellImage IntervalMap::apply(const Weight& w, const Interval& j, std::size_t cell_index) const {
  if (!w.base().contains(j))
    fail(ErrorCode::InvalidArgument, "cell " + to_string(j) + " is outside the base " + to_string(w.base()));
  if (!(j.width() < eta_))
    fail(ErrorCode::CellTooWide, "cell " + to_string(j) + " has width " + fmt(j.width()) +
                                     " >= eta = " + fmt(eta_) + "; refine the partition");

  CellImage out;
  out.source = j;
  const double c = j.lo, d = j.hi;

  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GammaParams>) {
          out.nominal_length = p.gamma * j.width();
          if (out.nominal_length > 0.0) out.image = Interval(c, std::min(c + out.nominal_length, d));
        } else if constexpr (std::is_same_v<P, LengthPhiParams>) {
          const double h = j.width();
          const double len = p.phi.eval(p.side == Side::Right ? p.alpha + h : p.alpha - h);
          if (len < 0.0) violated("phi >= 0 violated: phi-image length " + fmt(len) + " for |J| = " + fmt(h));
          if (len > h * (1.0 + 1e-12))
            violated("image longer than its cell: phi gives " + fmt(len) + " for |J| = " + fmt(h));
          out.nominal_length = std::min(len, h);
          if (out.nominal_length > 0.0) out.image = place(j, out.nominal_length, cell_index);
        } else if constexpr (std::is_same_v<P, TargetParams>) {
          const double target = p.gamma * p.psi->length(j);
          if (target > 0.0) {
            std::function<double(double)> g;
            if (kind_ == MapKind::WeightedTargetC) {
              g = [&](double x) { return p.lambda(x) * p.psi->length(Interval(c, x)) - target; };
            } else {
              g = [&](double x) { return p.upsilon->length(Interval(c, x)) - target; };
            }
            const RootScan scan = smallest_root(g, j, kRootTolerance * w.base().width());
            out.multiple_roots = scan.sign_changes > 1;
            if (scan.root > c) out.image = Interval(c, std::min(scan.root, d));
          }
          out.nominal_length = out.image ? out.image->width() : 0.0;
        } else {
          const double rise = p.Lambda(d) - p.Lambda(c);
          out.nominal_length = std::clamp(rise, 0.0, j.width());
          if (out.nominal_length > 0.0) out.image = Interval(c, std::min(c + out.nominal_length, d));
        }
      },
      params_);

  out.psi_len = out.image ? w.length(*out.image) : 0.0;
  return out;
}

IntervalMap gamma_left(double gamma, double eta) {
  require(gamma > 0.0 && gamma < 1.0, "gamma must satisfy 0 < gamma < 1, got " + fmt(gamma));
  require(eta > 0.0 && std::isfinite(eta), "eta must be positive and finite");
  return IntervalMap(MapKind::GammaLeft, eta, IntervalMap::GammaParams{gamma});
}

IntervalMap length_phi(const Expr& phi, double alpha, Side side, Interval window, Placement placement) {
  require(std::isfinite(alpha), "alpha must be finite");
  require(window.width() > 0.0, "phi window must have positive width");
  if (side == Side::Right)
    require(window.lo == alpha, "right-sided phi window must start at alpha");
  else
    require(window.hi == alpha, "left-sided phi window must end at alpha");

  const double s = side == Side::Right ? 1.0 : -1.0;
  const double at_alpha = phi.eval(alpha);
  if (!(std::fabs(at_alpha) <= 1e-12))
    violated("φ(α)=0 violated: phi(" + fmt(alpha) + ") = " + fmt(at_alpha));

  const double len = window.width();
  for (std::size_t k = 1; k <= kHypothesisSamples; ++k) {
    const double h = len * static_cast<double>(k) / kHypothesisSamples;
    const double t = alpha + s * h;
    const double v = phi.eval(t);
    if (v < -1e-12) violated("phi >= 0 violated at t = " + fmt(t) + " (phi = " + fmt(v) + ")");
    if (v > h + 4.0 * std::numeric_limits<double>::epsilon() * std::max(h, std::fabs(t)))
      violated(std::string(side == Side::Right ? "φ(t) <= t-α" : "φ(t) <= α-t") + " violated at t = " + fmt(t) +
               " (phi = " + fmt(v) + ")");
  }

  const auto rate = [&](double h) { return (phi.eval(alpha + s * h) - at_alpha) / h; };
  const double r1 = rate(kDerivativeStep);
  const double r2 = rate(kDerivativeCheckStep);
  if (!(std::fabs(r1 - r2) <= kDerivativeAgreement))
    fail(ErrorCode::DerivativeDisagreement, "one-sided derivative estimates disagree: " + fmt(r1) + " at h=1e-6 vs " +
                                                fmt(r2) + " at h=1e-7");

  double delta = len / kHypothesisSamples;
  for (std::size_t k = 1; k <= kHypothesisSamples; ++k) {
    const double h = len * static_cast<double>(k) / kHypothesisSamples;
    if (std::fabs(phi.eval(alpha + s * h) / h - r1) > kDeltaTolerance) break;
    delta = h;
  }
  const double eta = std::min(delta, len);

  IntervalMap m(MapKind::LengthPhi, eta, IntervalMap::LengthPhiParams{phi, alpha, side, window, r1, delta});
  m.placement_ = placement;
  return m;
}

namespace {

void check_lambda(const RealFunction& lambda, double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, "gamma must satisfy 0 < gamma <= 1, got " + fmt(gamma));
  const Interval& d = lambda.domain();
  for (std::size_t k = 0; k <= kHypothesisSamples; ++k) {
    const double x = k == kHypothesisSamples ? d.hi : d.lo + d.width() * static_cast<double>(k) / kHypothesisSamples;
    const double v = lambda(x);
    if (!(v > 1.0)) violated("λ > 1 violated at x = " + fmt(x) + " (lambda = " + fmt(v) + ")");
  }
}

}  // namespace

IntervalMap weighted_target_c(const RealFunction& lambda, double gamma, const Weight& w) {
  require(lambda.domain() == w.base(), "lambda must be defined on the weight's base interval");
  check_lambda(lambda, gamma);
  auto psi = std::make_shared<const Weight>(w);
  return IntervalMap(MapKind::WeightedTargetC, automatic_eta(w.base()),
                     IntervalMap::TargetParams{lambda, gamma, std::move(psi), nullptr});
}

IntervalMap weighted_target_d(const RealFunction& lambda, double gamma, const Weight& w) {
  require(lambda.domain() == w.base(), "lambda must be defined on the weight's base interval");
  check_lambda(lambda, gamma);
  auto psi = std::make_shared<const Weight>(w);
  auto upsilon = std::make_shared<const Weight>(Weight::from_density(RealFunction::product(lambda, w.density())));
  return IntervalMap(MapKind::WeightedTargetD, automatic_eta(w.base()),
                     IntervalMap::TargetParams{lambda, gamma, std::move(psi), std::move(upsilon)});
}

IntervalMap lipschitz_image(const RealFunction& Lambda) {
  const Interval& d = Lambda.domain();
  require(d.width() > 0.0, "Lambda needs a non-degenerate domain");
  double x0 = d.lo, y0 = Lambda(x0);
  for (std::size_t k = 1; k <= kHypothesisSamples; ++k) {
    const double x1 = k == kHypothesisSamples ? d.hi : d.lo + d.width() * static_cast<double>(k) / kHypothesisSamples;
    const double y1 = Lambda(x1);
    const double tiny = 4.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::fabs(y0), std::fabs(y1)});
    if (y1 < y0 - tiny) violated("Λ nondecreasing violated on [" + fmt(x0) + ", " + fmt(x1) + "]");
    if (y1 - y0 > (x1 - x0) * (1.0 + 1e-12) + tiny)
      violated("Λ Lipschitz constant 1 violated on [" + fmt(x0) + ", " + fmt(x1) + "]: rise " + fmt(y1 - y0) +
               " over run " + fmt(x1 - x0));
    x0 = x1;
    y0 = y1;
  }
  return IntervalMap(MapKind::LipschitzImage, automatic_eta(d), IntervalMap::LipschitzParams{Lambda});
}

double solve_monotone(const std::function<double(double)>& g, const Interval& bracket, double tol) {
  require(tol > 0.0, "solve_monotone requires tol > 0");
  double lo = bracket.lo, hi = bracket.hi;
  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if (sign(glo) == sign(ghi))
    fail(ErrorCode::NoRoot, "no sign change on " + to_string(bracket) + " (g = " + fmt(glo) + ", " + fmt(ghi) + ")");
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if (sign(gm) == sign(glo)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

RootScan smallest_root(const std::function<double(double)>& g, const Interval& bracket, double tol) {
  constexpr std::size_t kScan = 64;
  std::vector<double> xs(kScan + 1), gs(kScan + 1);
  for (std::size_t k = 0; k <= kScan; ++k) {
    xs[k] = k == kScan ? bracket.hi : bracket.lo + bracket.width() * static_cast<double>(k) / kScan;
    gs[k] = g(xs[k]);
  }
  RootScan out;
  std::optional<std::size_t> first;
  int prev = sign(gs[0]);
  if (prev == 0) first = 0;
  for (std::size_t k = 1; k <= kScan; ++k) {
    const int cur = sign(gs[k]);
    if (cur != 0 && prev != 0 && cur != prev) ++out.sign_changes;
    if (!first && (cur == 0 || (prev != 0 && cur != prev))) first = k;
    if (cur != 0) prev = cur;
  }
  if (!first)
    fail(ErrorCode::NoRoot, "no sign change on " + to_string(bracket) + " (g = " + fmt(gs.front()) + ", " +
                                fmt(gs.back()) + "); check lambda > 1 and 0 < gamma <= 1");
  if (*first == 0) {
    out.root = xs[0];
  } else if (gs[*first] == 0.0) {
    out.root = xs[*first];
  } else {
    out.root = solve_monotone(g, Interval(xs[*first - 1], xs[*first]), tol);
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
    fail(ErrorCode::InvalidArgument, "map descriptor: '" + key + "' expects a number, got '" + text + "'");
  return v;
}

struct Options {
  std::vector<std::pair<std::string, std::string>> kv;

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : kv)
      if (k == key) return v;
    return std::nullopt;
  }
};

Options parse_options(const std::vector<std::string>& parts, std::size_t from,
                      std::initializer_list<const char*> allowed) {
  Options o;
  for (std::size_t i = from; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::InvalidArgument, "map descriptor: expected key=value, got '" + parts[i] + "'");
    std::string key = parts[i].substr(0, eq);
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(ErrorCode::InvalidArgument, "map descriptor: unknown option '" + key + "'");
    o.kv.emplace_back(std::move(key), parts[i].substr(eq + 1));
  }
  return o;
}

}  // namespace

IntervalMap parse_map(const std::string& descriptor, const Weight& w) {
  const auto parts = split(descriptor, ':');
  const std::string& kind = parts[0];
  const Interval& base = w.base();
  const auto need = [&](std::size_t n) {
    if (parts.size() < n || parts[1].empty())
      fail(ErrorCode::InvalidArgument, "map descriptor '" + descriptor + "' is missing its argument");
  };

  if (kind == "gamma") {
    need(2);
    const double gamma = parse_number("gamma", parts[1]);
    const Options o = parse_options(parts, 2, {"eta"});
    const double eta = o.get("eta") ? parse_number("eta", *o.get("eta")) : automatic_eta(base);
    return gamma_left(gamma, eta);
  }
  if (kind == "lengthphi") {
    need(2);
    const Expr phi = Expr::parse(parts[1]);
    const Options o = parse_options(parts, 2, {"alpha", "side", "window", "seed"});
    if (!o.get("alpha")) fail(ErrorCode::InvalidArgument, "lengthphi descriptor requires alpha=<value>");
    const double alpha = parse_number("alpha", *o.get("alpha"));
    Side side = Side::Right;
    if (auto s = o.get("side")) {
      if (*s == "left") side = Side::Left;
      else if (*s != "right") fail(ErrorCode::InvalidArgument, "lengthphi side must be left or right");
    }
    const double len = o.get("window") ? parse_number("window", *o.get("window")) : base.width();
    require(len > 0.0, "lengthphi window must be positive");
    const Interval window = side == Side::Right ? Interval(alpha, alpha + len) : Interval(alpha - len, alpha);
    Placement placement;
    if (auto s = o.get("seed")) {
      require(!s->empty() && s->find_first_not_of("0123456789") == std::string::npos,
              "lengthphi seed must be a non-negative integer");
      placement = Placement::seeded(std::stoull(*s));
    }
    return length_phi(phi, alpha, side, window, placement);
  }
  if (kind == "targetc" || kind == "targetd") {
    need(2);
    const RealFunction lambda = RealFunction::from_expr(Expr::parse(parts[1]), base);
    const Options o = parse_options(parts, 2, {"gamma"});
    if (!o.get("gamma")) fail(ErrorCode::InvalidArgument, kind + " descriptor requires gamma=<value>");
    const double gamma = parse_number("gamma", *o.get("gamma"));
    return kind == "targetc" ? weighted_target_c(lambda, gamma, w) : weighted_target_d(lambda, gamma, w);
  }
  if (kind == "lipschitz") {
    need(2);
    parse_options(parts, 2, {});
    return lipschitz_image(RealFunction::from_expr(Expr::parse(parts[1]), base));
  }
  fail(ErrorCode::InvalidArgument,
       "unknown map kind '" + kind + "' (expected gamma, lengthphi, targetc, targetd or lipschitz)");
}

}  // namespace modsum
