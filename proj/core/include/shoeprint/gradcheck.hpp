#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shoeprint/tensor.hpp"

namespace shoeprint {

struct GradCheckEntry {
  std::string name;       // parameter or input the coordinate belongs to
  long long index = 0;    // flat coordinate
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  bool passed = false;
  double tolerance = 0.0;

  const GradCheckEntry* worst() const;
};

// Central-difference check of d loss / d value against an analytic gradient.
// rel err = |a - n| / max(1e-12, |a| + |n|). loss() must be a pure function
// of *value for fixed everything-else. With skip_nonsmooth, coordinates are
// deterministically resampled when the derivative comparison is undefined or
// unmeasurable there: gradients below the cancellation noise floor, kinks
// splitting the one-sided slopes, or estimates that drift between step sizes.
GradCheckReport finite_difference_check(const std::string& name, std::vector<double>& value,
                                        const std::vector<double>& analytic_grad,
                                        const std::function<double()>& loss, double epsilon,
                                        double tolerance, int max_coords = -1,
                                        std::uint64_t coord_seed = 0, bool skip_nonsmooth = false);

// Merges per-parameter reports into one.
GradCheckReport merge_reports(const std::vector<GradCheckReport>& reports, double tolerance);

}  // namespace shoeprint
