#include "shoeprint/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "shoeprint/rng.hpp"

namespace shoeprint {

const GradCheckEntry* GradCheckReport::worst() const {
  const GradCheckEntry* worst_entry = nullptr;
  for (const auto& entry : entries) {
    if (!worst_entry || entry.rel_error > worst_entry->rel_error) worst_entry = &entry;
  }
  return worst_entry;
}

GradCheckReport finite_difference_check(const std::string& name, std::vector<double>& value,
                                        const std::vector<double>& analytic_grad,
                                        const std::function<double()>& loss, double epsilon,
                                        double tolerance, int max_coords,
                                        std::uint64_t coord_seed, bool skip_nonsmooth) {
  if (value.size() != analytic_grad.size()) {
    throw ShapeError("finite_difference_check: gradient size does not match value size");
  }

  const long long total = static_cast<long long>(value.size());
  const bool exhaustive = max_coords < 0 || max_coords >= total;
  const long long wanted = exhaustive ? total : max_coords;
  // The nonsmooth filter can reject candidates, so keep spares to draw from.
  const long long candidates =
      exhaustive ? total : std::min<long long>(total, skip_nonsmooth ? 4 * wanted : wanted);

  std::vector<long long> coords;
  if (exhaustive) {
    coords.resize(static_cast<size_t>(total));
    for (long long i = 0; i < total; ++i) coords[static_cast<size_t>(i)] = i;
  } else {
    // sample distinct coordinates
    Rng rng(hash_combine(coord_seed, 0x67726164ULL));
    std::vector<long long> pool(static_cast<size_t>(total));
    for (long long i = 0; i < total; ++i) pool[static_cast<size_t>(i)] = i;
    for (long long i = 0; i < candidates; ++i) {
      const long long j = rng.uniform_int(i, total - 1);
      std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    }
    coords.assign(pool.begin(), pool.begin() + candidates);
  }

  const double base_loss = skip_nonsmooth ? loss() : 0.0;
  // Cancellation noise of a one-sided difference, used as the floor of the
  // kink-detection bands. Gradients below noise_floor / tolerance cannot be
  // verified to the requested relative tolerance at this loss scale.
  const double noise_floor = 40.0 * std::abs(base_loss) * 2.22e-16 / epsilon;

  const auto eval_at = [&](size_t i, double step) {
    const double saved = value[i];
    value[i] = saved + step;
    const double up = loss();
    value[i] = saved - step;
    const double down = loss();
    value[i] = saved;
    return std::array<double, 2>{up, down};
  };

  GradCheckReport report;
  report.tolerance = tolerance;
  for (long long idx : coords) {
    if (static_cast<long long>(report.entries.size()) >= wanted) break;
    const size_t i = static_cast<size_t>(idx);
    const auto [up, down] = eval_at(i, epsilon);
    double numeric = (up - down) / (2.0 * epsilon);

    if (skip_nonsmooth) {
      // Derivative comparisons are only meaningful where the loss is locally
      // smooth and the gradient rises above the measurement noise; reject and
      // resample otherwise. Three guards:
      //  - measurability: both slopes below the noise-driven floor,
      //  - one-sided split: a kink (relu or pooling-argmax flip) inside the
      //    window separates forward and backward slopes by its slope jump,
      //  - two-scale drift: kinks with near-symmetric jumps can leave the
      //    one-sided slopes agreeing, but shrinking the window moves the
      //    estimate; a smooth point stays put to O(epsilon^2).
      if (std::max(std::abs(numeric), std::abs(analytic_grad[i])) <
          noise_floor / tolerance) {
        continue;
      }
      const double fwd = (up - base_loss) / epsilon;
      const double bwd = (base_loss - down) / epsilon;
      const double split_band =
          std::max(1e-4 * std::max(std::abs(fwd), std::abs(bwd)), noise_floor);
      if (std::abs(fwd - bwd) > split_band) continue;

      const auto [up_half, down_half] = eval_at(i, 0.5 * epsilon);
      const double numeric_half = (up_half - down_half) / epsilon;
      const double drift_band =
          std::max(1e-4 * std::max(std::abs(numeric), std::abs(numeric_half)), noise_floor);
      if (std::abs(numeric - numeric_half) > drift_band) continue;
      numeric = numeric_half;
    }

    GradCheckEntry entry;
    entry.name = name;
    entry.index = idx;
    entry.analytic = analytic_grad[i];
    entry.numeric = numeric;
    const double denom = std::max(1e-12, std::abs(entry.analytic) + std::abs(entry.numeric));
    entry.rel_error = std::abs(entry.analytic - entry.numeric) / denom;
    report.max_rel_error = std::max(report.max_rel_error, entry.rel_error);
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

GradCheckReport merge_reports(const std::vector<GradCheckReport>& reports, double tolerance) {
  GradCheckReport merged;
  merged.tolerance = tolerance;
  for (const auto& report : reports) {
    merged.entries.insert(merged.entries.end(), report.entries.begin(), report.entries.end());
    merged.max_rel_error = std::max(merged.max_rel_error, report.max_rel_error);
  }
  merged.passed = merged.max_rel_error <= tolerance;
  return merged;
}

}  // namespace shoeprint
