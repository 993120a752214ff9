#pragma once

#include <span>
#include <vector>

namespace fedecay {

/// Median of a sample; for an even count the mean of the two central values.
double median(std::span<const double> values);

/// Median absolute deviation from the sample median.
double median_absolute_deviation(std::span<const double> values);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least-squares line through (x, y) pairs.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

double geometric_mean(std::span<const double> values);

}  // namespace fedecay
