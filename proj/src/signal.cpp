#include "signal.hpp"

namespace modsum {

namespace {

IntervalMap carrier_map(const Weight& w, double duty) { return gamma_left(duty, 2.0 * w.base().width()); }

void check_spec(const GatedSignalSpec& spec) {
  require(spec.carrier_n >= 1, "carrier_n must be >= 1");
  require(spec.duty > 0.0 && spec.duty < 1.0, "duty must lie in (0, 1)");
}

}  // namespace

double gated_integral(const GatedSignalSpec& spec, const Weight& w) {
  check_spec(spec);
  const Partition p = uniform_partition(w.base(), spec.carrier_n);
  return modified_sums(spec.f, w, p, carrier_map(w, spec.duty), SamplePointRule::left()).s_val;
}

double gated_integral_reference(const GatedSignalSpec& spec, const Weight& w, std::size_t sub_cells) {
  check_spec(spec);
  require(sub_cells >= 1, "sub_cells must be >= 1");
  const Partition p = uniform_partition(w.base(), spec.carrier_n);
  const IntervalMap m = carrier_map(w, spec.duty);
  std::vector<double> gates(p.size());
  parallel_for(p.size(), [&](std::size_t k) {
    const CellImage img = m.apply(w, p.cell(k), k);
    if (!img.image) return;
    const Partition sub = uniform_partition(*img.image, sub_cells);
    std::vector<double> terms(sub.size());
    for (std::size_t i = 0; i < sub.size(); ++i)
      terms[i] = spec.f(sample_point(SamplePointRule::mid(), i, sub.cell(i))) * w.length(sub.cell(i));
    gates[k] = pairwise_sum(terms);
  });
  return pairwise_sum(gates);
}

ConvergenceReport retrieval_study(const RealFunction& f, const Weight& w, const std::vector<std::size_t>& carrier_n,
                                  double duty, double tol) {
  require(duty > 0.0 && duty < 1.0, "duty must lie in (0, 1)");
  return convergence_study(f, w, carrier_map(w, duty), carrier_n, SamplePointRule::left(), tol);
}

}  // namespace modsum
