#pragma once

#include <cstddef>
#include <span>

namespace lightpath::harness {

// Boxplot statistics. Quartiles use linear interpolation between order
// statistics (position (n-1)p); std is the population standard deviation.
// Whiskers reach the most extreme samples within 1.5 IQR of the box.
struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
};

inline constexpr const char* kQuartileMethod = "linear";

// Throws std::invalid_argument on empty input.
Summary Describe(std::span<const double> values);

double Quantile(std::span<const double> sorted, double p);

}  // namespace lightpath::harness
